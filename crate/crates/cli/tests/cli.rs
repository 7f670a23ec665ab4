use std::f64::consts::LN_2;
use std::process::{Command, Output};

fn lcbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("UTF-8 output")
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn column(table: &[Vec<String>], name: &str) -> usize {
    table[0]
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn bounds_matches_golden() {
    let out = lcbound(&["bounds", "--dist", "laplace:1.0", "--p-grid", "0.5:5:0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), include_str!("golden/bounds_laplace.csv"));
    let t = rows(&stdout(&out));
    assert_eq!(t.len(), 11);
    // h(Laplace(1)) = 1 + ln 2
    let h: f64 = t[1][column(&t, "entropy_nats")].parse().unwrap();
    assert!((h - (1.0 + LN_2)).abs() < 1e-11);
}

#[test]
fn figures_value_at_two() {
    let out = lcbound(&["figures"]);
    assert_eq!(out.status.code(), Some(0));
    let t = rows(&stdout(&out));
    assert_eq!(t[0], ["figure", "r", "gap_nats", "gap_bits"]);
    assert_eq!(t.len(), 1 + 2 * 181);
    let want = 0.5 * (0.5 * std::f64::consts::PI * std::f64::consts::E).log2();
    for fig in ["general", "symmetric"] {
        let row = t
            .iter()
            .find(|r| r[0] == fig && r[1] == "2.00000000000e0")
            .unwrap();
        let v: f64 = row[3].parse().unwrap();
        assert!((v - want).abs() < 1e-11, "{fig}: {v}");
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["figures", "--format", "json"][..],
        &[
            "rd-curve",
            "--dist",
            "laplace:1",
            "--r-grid",
            "1:2:0.5",
            "--d-grid",
            "0.1:0.2:0.1",
            "--grid-n",
            "1024",
        ][..],
        &[
            "capacity",
            "--dist",
            "uniform:2",
            "--power-grid",
            "0.5",
            "--grid-n",
            "256",
        ][..],
    ] {
        let a = lcbound(args);
        let b = lcbound(args);
        assert_eq!(
            a.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn units_round_trip() {
    let args = [
        "rd-curve",
        "--dist",
        "uniform:3.4641016151377544",
        "--r-grid",
        "2",
        "--d-grid",
        "0.05:0.15:0.05",
        "--grid-n",
        "256",
    ];
    let nats = rows(&stdout(&lcbound(
        &[&args[..], &["--units", "nats"]].concat(),
    )));
    let bits = rows(&stdout(&lcbound(
        &[&args[..], &["--units", "bits"]].concat(),
    )));
    assert!(!nats[0].iter().any(|h| h.ends_with("_bits")));
    for name in ["slb", "ba", "ub_gauss"] {
        let (cn, cb) = (
            column(&nats, &format!("{name}_nats")),
            column(&bits, &format!("{name}_bits")),
        );
        for (rn, rb) in nats[1..].iter().zip(&bits[1..]) {
            let n: f64 = rn[cn].parse().unwrap();
            let b: f64 = rb[cb].parse().unwrap();
            // cells carry 12 significant digits
            assert!(
                (b - n / LN_2).abs() <= 1e-11 * b.abs().max(1e-300),
                "{name}: {b} vs {n}"
            );
        }
    }
    // full precision through the structured format
    let jn: serde_json::Value = serde_json::from_str(&stdout(&lcbound(&[
        "bounds", "--dist", "gg:3,1", "--p-grid", "1:3:1", "--format", "json", "--units", "nats",
    ])))
    .unwrap();
    let jb: serde_json::Value = serde_json::from_str(&stdout(&lcbound(&[
        "bounds", "--dist", "gg:3,1", "--p-grid", "1:3:1", "--format", "json",
    ])))
    .unwrap();
    for (a, b) in jn.as_array().unwrap().iter().zip(jb.as_array().unwrap()) {
        for key in ["lower", "measured", "upper"] {
            let (x, y) = (a[key].as_f64().unwrap(), b[key].as_f64().unwrap());
            assert!((y - x / LN_2).abs() <= 1e-12, "{key}: {y} vs {x}");
        }
    }
}

#[test]
fn parse_errors_exit_two() {
    for args in [
        &["bounds", "--dist", "nosuch:1", "--p-grid", "1:2:1"][..],
        &["bounds", "--dist", "laplace:1", "--p-grid", "3:1:1"][..],
        &[
            "bounds",
            "--dist",
            "laplace:1",
            "--p-grid",
            "1:2:1",
            "--grid-n",
            "32",
        ][..],
        &["rd-curve", "--dist", "laplace:1"][..],
        &["teleport"][..],
    ] {
        let out = lcbound(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn coarse_grid_fails_the_sandwich() {
    // at step ≈ 0.11 the discrete rate drops 0.08 nats below the lower bound
    let out = lcbound(&[
        "rd-curve",
        "--dist",
        "laplace:1",
        "--r-grid",
        "1",
        "--d-grid",
        "0.1",
        "--grid-n",
        "256",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("failed"));
    assert_eq!(rows(&stdout(&out)).len(), 2);
}

#[test]
fn contract_violation_is_reported() {
    let out = lcbound(&["capacity", "--dist", "cauchyext:-0.2", "--power-grid", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("log-concave"));
}

#[test]
fn reverse_epi_and_out_file() {
    let path = std::env::temp_dir().join(format!("lcbound-epi-{}.csv", std::process::id()));
    let out = lcbound(&[
        "reverse-epi",
        "--dist",
        "uniform:1",
        "--dist-y",
        "uniform:1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let t = rows(&text);
    let ratio: f64 = t[1][column(&t, "ratio")].parse().unwrap();
    // h(triangle on [−1, 1]) = ½, so N(sum) = e and N(X) = N(Y) = 1
    assert!((ratio - std::f64::consts::E / 2.0).abs() < 1e-5, "{ratio}");
}

#[test]
fn verify_all_passes() {
    let out = lcbound(&["verify-all"]);
    let text = stdout(&out);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{text}\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t = rows(&text);
    assert_eq!(t.len(), 11);
    assert!(t[1..].iter().all(|r| r[2] == "pass"));
}
