//! Numeric policy knobs shared by the pipeline.
//!
//! The crossover constants were chosen by measuring, for each route, where its
//! error budget breaks down; see the module docs on [`crate::local`] for the
//! cancellation estimate behind `SERIES_F64_NATS`.

/// Largest prime bound the sieve accepts.
pub const SIEVE_CAP: u64 = 100_000_000;

/// Hard cap on the number of Taylor coefficients in a local table.
pub const TABLE_CAP: usize = 10_000;

/// Default tolerance for local coefficient-table tails.
pub const DEFAULT_SERIES_TOL: f64 = 1e-10;

/// Default boundary tolerance for Fourier grids meant for inversion.
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-10;

/// Tolerance used when validating |t| = 1 inputs.
pub const UNIT_CIRCLE_TOL: f64 = 1e-12;

/// The Taylor-square sum for the local transform cancels catastrophically once
/// its largest term reaches exp(2|x| asin(p^-sigma)). Below this many nats the
/// f64 route keeps absolute error under ~1e-12; above it the evaluation
/// switches to 256-bit arithmetic (oracle contexts) or to circle quadrature
/// (grid production, where it is also cheaper).
pub const SERIES_F64_NATS: f64 = 12.0;

/// Binary precision of the extended-precision series fallback.
pub const HP_PRECISION_BITS: usize = 256;

/// |x| above which grid production prefers circle quadrature outright.
pub const QUAD_PREFERRED_X: f64 = 16.0;

/// Cap on circle-quadrature node counts (2^22).
pub const QUAD_NODE_CAP: usize = 1 << 22;

/// Fraction of the Fourier grid tapered by the Hann window before inversion.
pub const TAPER_FRACTION: f64 = 0.25;

/// Default tolerance for the inversion's recorded imaginary residual.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Default tolerance for negative ringing in inverted densities.
pub const NEGATIVITY_TOL: f64 = 1e-9;

/// Values clamped to zero on export when they exceed this (raw kept in memory).
pub const EXPORT_CLAMP: f64 = 1e-9;

/// Name of the random number generator pinned in all sampling metadata.
pub const RNG_NAME: &str = "ChaCha12 (rand_chacha 0.3, per-sample streams)";

/// Relative truncation for the j-series in variance sums.
pub const VARIANCE_J_REL_TOL: f64 = 1e-14;
