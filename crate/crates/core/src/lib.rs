pub mod capacity;
pub mod distributions;
pub mod entropy_bounds;
pub mod error;
pub mod numerics;
pub mod rate_distortion;
pub mod report;
pub mod reverse_epi;
pub mod vector_bounds;
pub mod verify;

pub use distributions::{DistributionSpec, Family, MomentMethod, MomentValue};
pub use error::{Error, Result};
pub use report::{BoundReport, Units};
