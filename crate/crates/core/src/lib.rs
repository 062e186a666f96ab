pub mod characters;
pub mod error;
pub mod families;
pub mod phase;
pub mod poly;
pub mod specfun;
pub mod stability;
pub mod winding;
pub mod zerofind;

pub use error::{Error, Result};
pub use num_complex::Complex64;
