use std::f64::consts::LN_2;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lcbound::capacity::{capacity_csv, capacity_point, CapacityOptions};
use lcbound::entropy_bounds::{
    entropy_lower_gamma_concave, entropy_lower_general, entropy_lower_symmetric, entropy_upper,
};
use lcbound::rate_distortion::{rd_curve, universal_gap_curve, RDCurve, RdOptions};
use lcbound::report::format_cell;
use lcbound::reverse_epi::{verify_reverse_epi_gamma, verify_reverse_epi_scalar, EpiReport};
use lcbound::verify::{run_all, CriterionOutcome};
use lcbound::{BoundReport, DistributionSpec, Error, Units};

/// Entropy, rate-distortion and capacity bounds with numerical certificates.
#[derive(Parser)]
#[command(name = "lcbound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy sandwich lower ≤ h(X) ≤ upper over a grid of moment orders.
    Bounds {
        #[arg(long)]
        dist: DistributionSpec,
        #[arg(long, value_parser = parse_range)]
        p_grid: Range,
        #[command(flatten)]
        common: Common,
    },
    /// Shannon lower bound, test-channel upper bounds and Blahut–Arimoto R(d).
    RdCurve {
        #[arg(long)]
        dist: DistributionSpec,
        #[arg(long, value_parser = parse_range)]
        r_grid: Range,
        #[arg(long, value_parser = parse_range)]
        d_grid: Range,
        #[command(flatten)]
        common: Common,
    },
    /// Capacity of the additive channel with noise `--dist` over a grid of powers.
    Capacity {
        #[arg(long)]
        dist: DistributionSpec,
        #[arg(long, value_parser = parse_range)]
        power_grid: Range,
        #[command(flatten)]
        common: Common,
    },
    /// Forward and reverse entropy power inequality for X + Y.
    ReverseEpi {
        #[arg(long)]
        dist: DistributionSpec,
        #[arg(long)]
        dist_y: DistributionSpec,
        #[command(flatten)]
        common: Common,
    },
    /// Universal rate-distortion gap curves over r ∈ [1, 10].
    Figures {
        #[command(flatten)]
        common: Common,
    },
    /// The full acceptance matrix.
    VerifyAll {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 4096, value_parser = clap::value_parser!(u32).range(64..))]
    grid_n: u32,
    #[arg(long, value_enum, default_value_t = UnitsArg::Bits)]
    units: UnitsArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitsArg {
    Nats,
    Bits,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    #[value(alias = "structured-text")]
    Json,
}

#[derive(Clone, Debug)]
struct Range(Vec<f64>);

/// `start:stop:step` with both ends included, or a single number.
fn parse_range(text: &str) -> Result<Range, String> {
    let nums = text
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let (start, stop, step) = match nums[..] {
        [x] => (x, x, 1.0),
        [a, b, s] => (a, b, s),
        _ => return Err(format!("expected start:stop:step, got '{text}'")),
    };
    if !start.is_finite() || !stop.is_finite() || !(step > 0.0) || !step.is_finite() {
        return Err(format!(
            "range '{text}' needs finite ends and a positive step"
        ));
    }
    if stop < start {
        return Err(format!("range '{text}' is empty (stop < start)"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if n > 100_000 {
        return Err(format!("range '{text}' has {n} points"));
    }
    Ok(Range((0..n).map(|i| start + i as f64 * step).collect()))
}

struct Document {
    text: String,
    /// One line per failed bound.
    failures: Vec<String>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Accuracy { .. } | Error::Internal(_) => 3,
        _ => 2,
    }
}

fn csv_line(cells: &[String]) -> String {
    let mut line = cells.join(",");
    line.push('\n');
    line
}

fn json(value: &impl serde::Serialize) -> lcbound::Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Internal(e.to_string()))
}

fn bounds(dist: &DistributionSpec, ps: &[f64], common: &Common) -> lcbound::Result<Document> {
    let h = dist.entropy()?;
    let mut reports = Vec::new();
    for &p in ps {
        let lower = if dist.gamma_concave().is_some() {
            entropy_lower_gamma_concave(dist, p)?
        } else if dist.is_symmetric() {
            entropy_lower_symmetric(dist, p)?
        } else {
            entropy_lower_general(dist, p)?
        };
        let upper = if p > 0.0 && dist.is_log_concave() {
            Some(entropy_upper(dist, p)?)
        } else {
            None
        };
        reports.push(
            BoundReport::new("entropy", Some(lower), h, upper, 1e-6, Units::Nats)
                .with_param("p", p),
        );
    }
    let failures = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| {
            format!(
                "{dist} p={}: {} ∉ [{:?}, {:?}]",
                r.parameters["p"], r.measured, r.lower, r.upper
            )
        })
        .collect();
    let bits = common.units == UnitsArg::Bits;
    let text = match common.format {
        Format::Json => {
            let shown: Vec<BoundReport> = if bits {
                reports.iter().map(BoundReport::to_bits).collect()
            } else {
                reports
            };
            json(&shown)?
        }
        Format::Csv => {
            let cols = ["lower", "entropy", "upper"];
            let mut header = vec!["p".to_string()];
            header.extend(cols.iter().map(|c| format!("{c}_nats")));
            header.push("passed".into());
            if bits {
                header.extend(cols.iter().map(|c| format!("{c}_bits")));
            }
            let mut text = csv_line(&header);
            for r in &reports {
                let values = [r.lower, Some(r.measured), r.upper];
                let mut row = vec![format_cell(r.parameters.get("p").copied())];
                row.extend(values.iter().map(|v| format_cell(*v)));
                row.push(r.passed.to_string());
                if bits {
                    row.extend(values.iter().map(|v| format_cell(v.map(|x| x / LN_2))));
                }
                text += &csv_line(&row);
            }
            text
        }
    };
    Ok(Document { text, failures })
}

/// max(0, SLB) − 0.01 ≤ R_BA ≤ min(upper) + 0.02 nats at every point.
fn rd_sandwich_failures(curve: &RDCurve) -> Vec<String> {
    curve
        .points
        .iter()
        .filter_map(|p| {
            let ba = p.ba_rate?;
            let lo = p.slb.max(0.0) - 0.01;
            let hi = p.upper_bounds.min().map_or(f64::INFINITY, |u| u + 0.02);
            (ba < lo || ba > hi).then(|| {
                format!(
                    "{} r={} d={}: R = {ba} nats ∉ [{lo}, {hi}]",
                    curve.spec, p.r, p.d
                )
            })
        })
        .collect()
}

fn rd(
    dist: &DistributionSpec,
    rs: &[f64],
    ds: &[f64],
    common: &Common,
) -> lcbound::Result<Document> {
    let options = RdOptions {
        grid_n: common.grid_n as usize,
        ..RdOptions::default()
    };
    let curves = rs
        .iter()
        .map(|&r| rd_curve(dist, r, ds, &options))
        .collect::<lcbound::Result<Vec<_>>>()?;
    let failures = curves.iter().flat_map(rd_sandwich_failures).collect();
    let text = match common.format {
        Format::Json => json(&curves)?,
        Format::Csv => {
            let mut text = String::new();
            for (i, c) in curves.iter().enumerate() {
                let body = c.to_csv(common.units == UnitsArg::Bits)?;
                let skip = if i == 0 {
                    0
                } else {
                    body.find('\n').map_or(body.len(), |k| k + 1)
                };
                text += &body[skip..];
            }
            text
        }
    };
    Ok(Document { text, failures })
}

fn capacity(dist: &DistributionSpec, powers: &[f64], common: &Common) -> lcbound::Result<Document> {
    let options = CapacityOptions {
        grid_n: common.grid_n as usize,
        ..CapacityOptions::default()
    };
    let points = powers
        .iter()
        .map(|&p| capacity_point(dist, p, &options))
        .collect::<lcbound::Result<Vec<_>>>()?;
    let failures = points
        .iter()
        .filter_map(|pt| {
            let c = pt.ba_capacity?;
            let (lo, hi) = (pt.lower_gaussian - 0.01, pt.upper + 0.01);
            (c < lo || c > hi)
                .then(|| format!("{dist} P={}: C = {c} nats ∉ [{lo}, {hi}]", pt.power))
        })
        .collect();
    let text = match common.format {
        Format::Json => json(&points)?,
        Format::Csv => capacity_csv(&points, common.units == UnitsArg::Bits)?,
    };
    Ok(Document { text, failures })
}

fn reverse_epi(
    x: &DistributionSpec,
    y: &DistributionSpec,
    common: &Common,
) -> lcbound::Result<Document> {
    let rep: EpiReport = if x.gamma_concave().is_some() || y.gamma_concave().is_some() {
        verify_reverse_epi_gamma(x, y)?
    } else {
        verify_reverse_epi_scalar(x, y)?
    };
    let text = match common.format {
        Format::Json => json(&rep)?,
        Format::Csv => {
            let header = [
                "x",
                "y",
                "n_x",
                "n_y",
                "n_sum",
                "ratio",
                "reverse_constant",
                "forward_passed",
                "reverse_passed",
            ];
            let row = [
                x.to_string(),
                y.to_string(),
                format_cell(Some(rep.n_x)),
                format_cell(Some(rep.n_y)),
                format_cell(Some(rep.n_sum)),
                format_cell(Some(rep.ratio)),
                format_cell(Some(rep.reverse_constant)),
                rep.forward_passed.to_string(),
                rep.reverse_passed.to_string(),
            ];
            csv_line(&header.map(String::from)) + &csv_line(&row)
        }
    };
    let mut failures = Vec::new();
    if !rep.forward_passed {
        failures.push(format!("{x} + {y}: forward ratio {} < 1", rep.ratio));
    }
    if !rep.reverse_passed {
        failures.push(format!(
            "{x} + {y}: ratio {} > {}",
            rep.ratio, rep.reverse_constant
        ));
    }
    Ok(Document { text, failures })
}

fn figures(common: &Common) -> lcbound::Result<Document> {
    let rs: Vec<f64> = (0..=180).map(|k| 1.0 + 0.05 * k as f64).collect();
    let mut rows = Vec::new();
    for (name, symmetric) in [("general", false), ("symmetric", true)] {
        for &r in &rs {
            rows.push((name, r, universal_gap_curve(r, symmetric)?));
        }
    }
    let bits = common.units == UnitsArg::Bits;
    let text = match common.format {
        Format::Json => {
            let value: Vec<serde_json::Value> = rows
                .iter()
                .map(|(f, r, v)| {
                    let mut o = serde_json::json!({ "figure": f, "r": r, "gap_nats": v });
                    if bits {
                        o["gap_bits"] = serde_json::json!(v / LN_2);
                    }
                    o
                })
                .collect();
            json(&value)?
        }
        Format::Csv => {
            let mut header = vec!["figure".to_string(), "r".into(), "gap_nats".into()];
            if bits {
                header.push("gap_bits".into());
            }
            let mut text = csv_line(&header);
            for (f, r, v) in &rows {
                let mut row = vec![f.to_string(), format_cell(Some(*r)), format_cell(Some(*v))];
                if bits {
                    row.push(format_cell(Some(v / LN_2)));
                }
                text += &csv_line(&row);
            }
            text
        }
    };
    Ok(Document {
        text,
        failures: Vec::new(),
    })
}

fn verify_all(common: &Common) -> lcbound::Result<(Document, Vec<CriterionOutcome>)> {
    let outcomes = run_all();
    let mut failures = Vec::new();
    for o in &outcomes {
        if let Some(e) = &o.error {
            failures.push(format!("criterion {}: {e}", o.id));
        }
        failures.extend(o.failures().map(|c| format!("criterion {}: {c}", o.id)));
    }
    let text = match common.format {
        Format::Json => json(&outcomes)?,
        Format::Csv => {
            let mut text =
                csv_line(&["criterion", "title", "status", "checks", "failed"].map(String::from));
            for o in &outcomes {
                let status = if o.passed() { "pass" } else { "fail" };
                let failed = o.failures().count() + usize::from(o.error.is_some());
                text += &csv_line(&[
                    o.id.to_string(),
                    o.title.to_string(),
                    status.to_string(),
                    o.checks.len().to_string(),
                    failed.to_string(),
                ]);
            }
            text
        }
    };
    Ok((Document { text, failures }, outcomes))
}

fn emit(doc: &Document, out: &Option<PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, &doc.text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(doc.text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, common) = match &cli.command {
        Command::Bounds {
            dist,
            p_grid,
            common,
        } => (bounds(dist, &p_grid.0, common), common),
        Command::RdCurve {
            dist,
            r_grid,
            d_grid,
            common,
        } => (rd(dist, &r_grid.0, &d_grid.0, common), common),
        Command::Capacity {
            dist,
            power_grid,
            common,
        } => (capacity(dist, &power_grid.0, common), common),
        Command::ReverseEpi {
            dist,
            dist_y,
            common,
        } => (reverse_epi(dist, dist_y, common), common),
        Command::Figures { common } => (figures(common), common),
        Command::VerifyAll { common } => {
            let res = verify_all(common);
            if let Ok((doc, outcomes)) = &res {
                if let Err(e) = emit(doc, &common.out) {
                    eprintln!("lcbound: cannot write output: {e}");
                    return ExitCode::from(2);
                }
                if doc.failures.is_empty() {
                    return ExitCode::SUCCESS;
                }
                doc.failures.iter().for_each(|f| eprintln!("lcbound: {f}"));
                let accuracy = outcomes.iter().any(|o| o.accuracy_error);
                return ExitCode::from(if accuracy { 3 } else { 1 });
            }
            (res.map(|(d, _)| d), common)
        }
    };
    match result {
        Ok(doc) => {
            if let Err(e) = emit(&doc, &common.out) {
                eprintln!("lcbound: cannot write output: {e}");
                return ExitCode::from(2);
            }
            if doc.failures.is_empty() {
                return ExitCode::SUCCESS;
            }
            eprintln!("lcbound: {} bound(s) failed", doc.failures.len());
            doc.failures.iter().for_each(|f| eprintln!("  {f}"));
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("lcbound: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(
            parse_range("0.5:2:0.5").unwrap().0,
            vec![0.5, 1.0, 1.5, 2.0]
        );
        assert_eq!(parse_range("3").unwrap().0, vec![3.0]);
        assert_eq!(parse_range("0:0.3:0.1").unwrap().0.len(), 4);
        assert!(parse_range("2:1:0.5").is_err());
        assert!(parse_range("1:2:0").is_err());
        assert!(parse_range("1:2").is_err());
        assert!(parse_range("a:2:1").is_err());
    }
}
