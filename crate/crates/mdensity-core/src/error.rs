use thiserror::Error;

/// Errors shared across the density pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sigma must be greater than 1/2, got {0}")]
    SigmaOutOfRange(f64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prime list must be strictly increasing, got {0} after {1}")]
    UnsortedPrimes(u64, u64),

    #[error("prime bound {0} exceeds the sieve cap {1}; this is a desk-scale tool")]
    SieveBound(u64, u64),

    #[error("mu must be at least {min}, got {got}")]
    MuOutOfRange { min: u32, got: u32 },

    #[error("|t| must equal 1 within {tol:e}, got |t| = {got}")]
    OffUnitCircle { got: f64, tol: f64 },

    #[error("theta = {0} lies outside the open interval (-pi, 0)")]
    ThetaOutOfRange(f64),

    #[error("u = {u} lies outside the open support ({lo}, {hi})")]
    OutsideSupport { u: f64, lo: f64, hi: f64 },

    #[error("nested coefficient sum rejected: a = {0} > 25 (composition count grows as 2^(a-1))")]
    NestedTooLarge(usize),

    #[error(
        "coefficient table for p={p}, sigma={sigma}, x={x} needs more than {cap} terms; \
         x is too large for this (p, sigma)"
    )]
    TableOverflow { p: u64, sigma: f64, x: f64, cap: usize },

    #[error("quadrature needs at least {min} nodes, got {got}")]
    TooFewNodes { got: usize, min: usize },

    #[error(
        "fourier grid boundary |M~({x})| = {mag:e} exceeds tol {tol:e}; increase x_max or add \
         primes (the transform decays like (1+|x|)^(-|P|/2))"
    )]
    BoundaryDecay { x: f64, mag: f64, tol: f64 },

    #[error(
        "refusing sigma = {sigma} with only {nprimes} primes: the transform decays like \
         (1+|x|)^(-|P|/2), too slowly near sigma = 1/2 to control the inversion tail; \
         use sigma >= 0.51 or at least 8 primes"
    )]
    SlowDecay { sigma: f64, nprimes: usize },

    #[error("grid spacing dx = {dx} violates the aliasing bound pi/width = {limit} for support width {width}")]
    Aliasing { dx: f64, limit: f64, width: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("inversion residual too large: {what} = {value:e} exceeds {tol:e}; increase x_max or shrink dx")]
    InversionResidual { what: &'static str, value: f64, tol: f64 },

    #[error("empty sample batch")]
    EmptyBatch,

    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),

    #[error("density grid is not normalized: integral = {0}")]
    NotNormalized(f64),

    #[error("form {label}: missing eigenvalues for primes {missing:?}")]
    MissingEigenvalues { label: String, missing: Vec<u64> },

    #[error("form {label}: |lambda({p})| = {value} violates the unramified bound 2")]
    EigenvalueBound { label: String, p: u64, value: f64 },

    #[error("form {label}: weight must be positive, got {weight}")]
    NonPositiveWeight { label: String, weight: f64 },

    #[error("the level prime {0} must not appear in the partial product; exclude it from the prime set")]
    LevelPrimeInSet(u64),

    #[error("inhomogeneous family: {0}")]
    InhomogeneousFamily(String),

    #[error("mu - nu must equal 2 with nu >= 1, got mu = {mu}, nu = {nu}")]
    BadSymPowerPair { mu: u32, nu: u32 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid value: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
