pub mod coeffs;
pub mod global;
pub mod config;
pub mod error;
pub mod forms;
pub mod local;
pub mod primes;
pub mod sampler;

pub use error::{Error, Result};
pub use num_complex::Complex64;
