//! Monte Carlo side: random Euler products on the torus, the value map
//! Phi(t, t^-1), empirical statistics against the density pipeline, and the
//! two-prime torus integral that realizes the key averaging identity at desk
//! scale.
//!
//! Reproducibility contract: sample i draws its angles from an independent
//! ChaCha12 stream (seed -> key, stream = i), one angle per prime in prime
//! order. Parallel generation is therefore order-independent, and reductions
//! run over the index-ordered value vector with a fixed pairwise tree.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::coeffs::g_local_unchecked;
use crate::error::{Error, Result};
use crate::global::{pairwise_sum, CdfGrid};
use crate::primes::PrimeSet;

/// A reproducible batch of sample values of the log-difference map.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub sigma: f64,
    pub tau: f64,
    pub primes: PrimeSet,
    pub mu: u32,
    pub seed: u64,
    pub values: Vec<f64>,
}

impl SampleBatch {
    pub fn count(&self) -> usize {
        self.values.len()
    }
}

/// Draws `n` samples of sum_p 2 Re g_{sigma,p}(t_p^mu p^{-i tau}) with the
/// t_p independently Haar-uniform on the unit circle.
pub fn sample_values(
    sigma: f64,
    tau: f64,
    primes: &PrimeSet,
    mu: u32,
    n: usize,
    seed: u64,
) -> Result<SampleBatch> {
    if !(sigma > 0.5) {
        return Err(Error::SigmaOutOfRange(sigma));
    }
    if mu < 1 {
        return Err(Error::MuOutOfRange { min: 1, got: mu });
    }
    if n < 1 {
        return Err(Error::Invalid("need at least one sample".into()));
    }
    let plist: Vec<u64> = primes.iter().collect();
    let values: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let mut acc = 0.0;
            for &p in &plist {
                let theta: f64 = rng.gen::<f64>() * std::f64::consts::TAU - std::f64::consts::PI;
                let t_mu = Complex64::from_polar(1.0, mu as f64 * theta);
                acc += 2.0 * g_local_unchecked(sigma, p, t_mu, tau).re;
            }
            acc
        })
        .collect();
    Ok(SampleBatch {
        sigma,
        tau,
        primes: primes.clone(),
        mu,
        seed,
        values,
    })
}

/// Kolmogorov-Smirnov sup distance between the batch's empirical CDF and a
/// model CDF from the density pipeline. The batch must be a tau = 0 batch for
/// the same sigma and prime set as the grid.
pub fn ks_distance(batch: &SampleBatch, cdf: &CdfGrid) -> Result<f64> {
    if batch.values.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if batch.tau != 0.0 {
        return Err(Error::ParamMismatch(format!(
            "KS comparison requires tau = 0, batch has tau = {}",
            batch.tau
        )));
    }
    if (batch.sigma - cdf.sigma).abs() > 1e-12 {
        return Err(Error::ParamMismatch(format!(
            "sigma mismatch: batch {} vs model {}",
            batch.sigma, cdf.sigma
        )));
    }
    if batch.primes.primes() != cdf.primes.primes() {
        return Err(Error::ParamMismatch(
            "prime set mismatch between batch and model".into(),
        ));
    }
    let mut sorted = batch.values.clone();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("sample values are finite"));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        let f = cdf.eval(v);
        d = d.max(f - i as f64 / n).max((i as f64 + 1.0) / n - f);
    }
    Ok(d)
}

/// (1/n) sum_i exp(i x v_i), summed with the fixed pairwise tree.
pub fn empirical_characteristic(batch: &SampleBatch, x: f64) -> Complex64 {
    if batch.values.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    let re: Vec<f64> = batch.values.iter().map(|&v| (x * v).cos()).collect();
    let im: Vec<f64> = batch.values.iter().map(|&v| (x * v).sin()).collect();
    let n = batch.values.len() as f64;
    Complex64::new(pairwise_sum(&re) / n, pairwise_sum(&im) / n)
}

/// Tensor-product trapezoid over the two-torus of
/// psi_x(Phi_{sigma,tau,{p1,p2}}(t, t^-1)). The integrand factorizes over the
/// two circles, so the double sum collapses to a product of one-dimensional
/// averages; `nodes` is the per-dimension count.
pub fn torus_integral_2d(
    sigma: f64,
    tau: f64,
    p1: u64,
    p2: u64,
    x: f64,
    nodes: usize,
) -> Result<Complex64> {
    if nodes < 64 {
        return Err(Error::TooFewNodes { got: nodes, min: 64 });
    }
    if !(sigma > 0.5) {
        return Err(Error::SigmaOutOfRange(sigma));
    }
    Ok(circle_factor(sigma, tau, p1, x, nodes) * circle_factor(sigma, tau, p2, x, nodes))
}

/// (1/2pi) int psi_x(g(t p^{-i tau}) + g(t^-1 p^{-i tau})) dtheta. At tau = 0
/// the exponent is 2 Re g(t); for general tau it stays a complex analytic
/// function of t and the average acquires the rotation p^{-2 i a tau} on the
/// a-th coefficient square.
fn circle_factor(sigma: f64, tau: f64, p: u64, x: f64, nodes: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..nodes {
        let theta = (j as f64 + 0.5) * std::f64::consts::TAU / nodes as f64 - std::f64::consts::PI;
        let t = Complex64::from_polar(1.0, theta);
        let phi = g_local_unchecked(sigma, p, t, tau) + g_local_unchecked(sigma, p, t.conj(), tau);
        acc += (Complex64::new(0.0, x) * phi).exp();
    }
    acc / nodes as f64
}
