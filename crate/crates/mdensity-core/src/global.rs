//! Assembly of the many-prime density: Euler product of local transforms,
//! Fourier inversion back to u-space, direct convolution, and the moment and
//! integration helpers the verification suites are built on.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{
    EXPORT_CLAMP, NEGATIVITY_TOL, RESIDUAL_TOL, TAPER_FRACTION,
    VARIANCE_J_REL_TOL,
};
use crate::error::{Error, Result};
use crate::local::{self, SupportInterval};
use crate::primes::PrimeSet;

const SQRT_2PI: f64 = 2.5066282746310002;

/// Which evaluation route(s) filled a Fourier grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    Series,
    Mixed,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::Series => "series",
            Method::Mixed => "mixed",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "quadrature" => Ok(Method::Quadrature),
            "series" => Ok(Method::Series),
            "mixed" => Ok(Method::Mixed),
            other => Err(Error::Invalid(format!("unknown method tag '{other}'"))),
        }
    }
}

/// Uniform symmetric grid of transform values prod_p M~_{sigma,p}(x_j),
/// x_j = j dx for j in [-n_half, n_half]. Hermitian by construction.
#[derive(Debug, Clone)]
pub struct FourierGrid {
    pub sigma: f64,
    pub primes: PrimeSet,
    pub dx: f64,
    pub n_half: usize,
    pub values: Vec<Complex64>,
    pub method: Method,
}

impl FourierGrid {
    pub fn x_max(&self) -> f64 {
        self.n_half as f64 * self.dx
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n_half as i64;
        let dx = self.dx;
        (-n..=n).map(move |j| j as f64 * dx)
    }

    /// Value at a grid node; x must sit on the lattice within 1e-9.
    pub fn value_at(&self, x: f64) -> Result<Complex64> {
        let j = (x / self.dx).round();
        if (x - j * self.dx).abs() > 1e-9 {
            return Err(Error::GridMismatch(format!(
                "x = {x} is not a node of the grid with dx = {}",
                self.dx
            )));
        }
        let idx = j as i64 + self.n_half as i64;
        if idx < 0 || idx as usize >= self.values.len() {
            return Err(Error::GridMismatch(format!("x = {x} outside the grid")));
        }
        Ok(self.values[idx as usize])
    }

    /// Support of the matching u-space density (Minkowski sum of local supports).
    pub fn support(&self) -> SupportInterval {
        SupportInterval::minkowski(self.sigma, self.primes.iter())
    }
}

/// Transform grid as the Euler product of local factors over `primes`.
///
/// `tol` is the boundary requirement: |prod| must have fallen below it at
/// x_max or the grid is rejected as too short for inversion (the decay rate
/// is (1+|x|)^(-|P|/2), half a power per prime). Pass tol = 1.0 for grids
/// meant only for pointwise lookup.
pub fn fourier_product(
    sigma: f64,
    primes: &PrimeSet,
    x_max: f64,
    dx: f64,
    tol: f64,
) -> Result<FourierGrid> {
    if !(sigma > 0.5) {
        return Err(Error::SigmaOutOfRange(sigma));
    }
    if primes.is_empty() {
        return Err(Error::Invalid("fourier_product needs a nonempty prime set".into()));
    }
    if sigma < 0.51 && primes.len() < 8 {
        return Err(Error::SlowDecay {
            sigma,
            nprimes: primes.len(),
        });
    }
    if !(dx > 0.0) || !(x_max > 0.0) {
        return Err(Error::Invalid(format!("need positive x_max and dx, got {x_max}, {dx}")));
    }
    let width = SupportInterval::minkowski(sigma, primes.iter()).width();
    let dx_limit = std::f64::consts::PI / width;
    if dx > dx_limit {
        return Err(Error::Aliasing {
            dx,
            limit: dx_limit,
            width,
        });
    }

    let n_half = (x_max / dx).ceil() as usize;
    let local_tol = (tol * 1e-3).clamp(1e-13, 1e-11);
    let plist: Vec<u64> = primes.iter().collect();
    let caches: Vec<local::CircleCache> = plist
        .iter()
        .map(|&p| local::CircleCache::new(sigma, p, x_max))
        .collect::<Result<_>>()?;

    // positive-x half, mirrored for the negative half; conjugation is exact,
    // so Hermitian symmetry holds bitwise
    let half: Vec<(Complex64, bool)> = (0..=n_half)
        .into_par_iter()
        .map(|j| {
            let x = j as f64 * dx;
            let mut prod = Complex64::new(1.0, 0.0);
            let mut used_quad = false;
            for (i, &p) in plist.iter().enumerate() {
                if x.abs() <= crate::config::QUAD_PREFERRED_X
                    && crate::coeffs::cancellation_nats(sigma, p, x) <= crate::config::SERIES_F64_NATS
                {
                    prod *= crate::coeffs::CoeffTable::build(p, sigma, x, local_tol)?.char_sum();
                } else {
                    prod *= caches[i].transform(x);
                    used_quad = true;
                }
            }
            Ok((prod, used_quad))
        })
        .collect::<Result<_>>()?;

    let any_quad = half.iter().any(|&(_, q)| q);
    let all_quad = half.iter().all(|&(_, q)| q);
    let method = if all_quad {
        Method::Quadrature
    } else if any_quad {
        Method::Mixed
    } else {
        Method::Series
    };

    let mut values = vec![Complex64::new(0.0, 0.0); 2 * n_half + 1];
    for (j, &(v, _)) in half.iter().enumerate() {
        values[n_half + j] = v;
        values[n_half - j] = v.conj();
    }

    let grid = FourierGrid {
        sigma,
        primes: primes.clone(),
        dx,
        n_half,
        values,
        method,
    };

    // invariants: value 1 at the origin, trivial bound, boundary decay
    let at0 = grid.values[n_half];
    if (at0 - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
        return Err(Error::Invalid(format!("transform at x=0 is {at0}, expected 1")));
    }
    for (j, v) in grid.values.iter().enumerate() {
        if v.norm() > 1.0 + 1e-12 {
            return Err(Error::Invalid(format!(
                "transform magnitude {} at node {j} exceeds the trivial bound 1",
                v.norm()
            )));
        }
    }
    let boundary = grid.values[grid.values.len() - 1].norm();
    if boundary > tol {
        return Err(Error::BoundaryDecay {
            x: grid.x_max(),
            mag: boundary,
            tol,
        });
    }
    Ok(grid)
}

/// Scans outward for an x_max where the product magnitude stays below
/// 0.3 * tol, then builds the grid. dx defaults to half the aliasing bound.
pub fn fourier_grid_auto(
    sigma: f64,
    primes: &PrimeSet,
    dx: Option<f64>,
    tol: f64,
) -> Result<FourierGrid> {
    if !(sigma > 0.5) {
        return Err(Error::SigmaOutOfRange(sigma));
    }
    if primes.is_empty() {
        return Err(Error::Invalid("fourier_grid_auto needs a nonempty prime set".into()));
    }
    let width = SupportInterval::minkowski(sigma, primes.iter()).width();
    let dx = dx.unwrap_or(std::f64::consts::PI / width * 0.5);
    let probe = |x: f64| -> Result<f64> {
        let mut prod = 1.0;
        for p in primes.iter() {
            prod *= local::local_fourier_auto(sigma, p, x, 1e-11)?.0.norm();
        }
        Ok(prod)
    };
    let mut x = 8.0f64.max(4.0 * dx);
    loop {
        if probe(x)? < 0.3 * tol && probe(1.2 * x)? < 0.3 * tol && probe(1.45 * x)? < 0.3 * tol {
            break;
        }
        x *= 1.3;
        if x > 1e6 {
            return Err(Error::BoundaryDecay {
                x,
                mag: probe(x)?,
                tol,
            });
        }
    }
    fourier_product(sigma, primes, 1.45 * x, dx, tol)
}

/// Uniform density grid: values[i] approximates the density at
/// u = (i0 + i) du; u0 = i0 du always sits on the du-lattice so that
/// convolutions of aligned grids stay aligned.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub sigma: f64,
    pub primes: PrimeSet,
    pub i0: i64,
    pub du: f64,
    pub values: Vec<f64>,
    pub support: SupportInterval,
    /// Largest |imaginary part| dropped when taking the real part of the
    /// inversion; zero for grids built without a transform.
    pub imag_residual: f64,
}

impl DensityGrid {
    pub fn u0(&self) -> f64 {
        self.i0 as f64 * self.du
    }

    pub fn us(&self) -> impl Iterator<Item = f64> + '_ {
        let i0 = self.i0;
        let du = self.du;
        (0..self.values.len()).map(move |i| (i0 + i as i64) as f64 * du)
    }

    pub fn u_at(&self, i: usize) -> f64 {
        (self.i0 + i as i64) as f64 * self.du
    }

    /// Nearest-node value; zero outside the grid.
    pub fn value_near(&self, u: f64) -> f64 {
        let idx = (u / self.du).round() as i64 - self.i0;
        if idx < 0 || idx as usize >= self.values.len() {
            0.0
        } else {
            self.values[idx as usize]
        }
    }

    /// Trapezoid integral of the density against du/sqrt(2 pi).
    pub fn integral(&self) -> f64 {
        self.moment_weighted(|_| 1.0)
    }

    pub fn mean(&self) -> f64 {
        self.moment_weighted(|u| u)
    }

    pub fn second_moment(&self) -> f64 {
        self.moment_weighted(|u| u * u)
    }

    fn moment_weighted(&self, w: impl Fn(f64) -> f64) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let mut acc = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            let weight = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += weight * v * w(self.u_at(i));
        }
        acc * self.du / SQRT_2PI
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Values for export: ringing above -EXPORT_CLAMP is clamped to zero,
    /// anything more negative is passed through (callers validated earlier).
    pub fn export_values(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|&v| if v < 0.0 && v > -EXPORT_CLAMP { 0.0 } else { v })
            .collect()
    }
}

/// Options for the inverse transform; defaults match the spec tolerances.
#[derive(Debug, Clone, Copy)]
pub struct InversionOptions {
    /// Fraction of the x-range smoothed by a Hann taper before inversion.
    /// Irrelevant when the boundary has already decayed below tolerance;
    /// essential for few-prime grids whose transform decays slowly.
    pub taper_fraction: f64,
    pub residual_tol: f64,
    pub negativity_tol: f64,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions {
            taper_fraction: TAPER_FRACTION,
            residual_tol: RESIDUAL_TOL,
            negativity_tol: NEGATIVITY_TOL,
        }
    }
}

/// Fourier inversion by direct trapezoid on the transform grid:
/// M(u) = (1/sqrt(2pi)) int M~(x) e^{-iux} dx, real part taken.
pub fn inverse_transform(fg: &FourierGrid, u_lo: f64, u_hi: f64, du: f64) -> Result<DensityGrid> {
    inverse_transform_with(fg, u_lo, u_hi, du, &InversionOptions::default())
}

pub fn inverse_transform_with(
    fg: &FourierGrid,
    u_lo: f64,
    u_hi: f64,
    du: f64,
    opts: &InversionOptions,
) -> Result<DensityGrid> {
    if !(du > 0.0) || !(u_hi > u_lo) {
        return Err(Error::Invalid(format!(
            "need positive du and u_hi > u_lo, got du={du}, [{u_lo}, {u_hi}]"
        )));
    }
    let i0 = (u_lo / du).floor() as i64;
    let i1 = (u_hi / du).ceil() as i64;
    let n = (i1 - i0 + 1) as usize;

    // Hermitian symmetry lets the sum run over x >= 0 with doubled real
    // parts, which keeps the result exactly real; the residual recorded is
    // the deviation of the stored grid from exact symmetry.
    let n_half = fg.n_half;
    let dx = fg.dx;
    let x_max = fg.x_max();
    let taper_start = (1.0 - opts.taper_fraction) * x_max;
    let weights: Vec<f64> = (0..=n_half)
        .map(|j| {
            let x = j as f64 * dx;
            let trap = if j == n_half { 0.5 } else { 1.0 };
            let taper = if x <= taper_start || x_max <= taper_start {
                1.0
            } else {
                0.5 * (1.0 + (std::f64::consts::PI * (x - taper_start) / (x_max - taper_start)).cos())
            };
            trap * taper
        })
        .collect();
    let pos: Vec<Complex64> = (0..=n_half).map(|j| fg.values[n_half + j] * weights[j]).collect();

    let mut residual: f64 = fg.values[n_half].im.abs();
    for j in 1..=n_half {
        residual = residual.max((fg.values[n_half - j] - fg.values[n_half + j].conj()).norm());
    }
    if residual > opts.residual_tol {
        return Err(Error::InversionResidual {
            what: "imaginary residual",
            value: residual,
            tol: opts.residual_tol,
        });
    }

    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let u = (i0 + i as i64) as f64 * du;
            let mut acc = 0.5 * pos[0].re; // x=0 counted once
            for (j, v) in pos.iter().enumerate().skip(1) {
                let (s, c) = (u * j as f64 * dx).sin_cos();
                // Re(v e^{-iux}) = v.re cos(ux) + v.im sin(ux)
                acc += v.re * c + v.im * s;
            }
            2.0 * acc * dx / SQRT_2PI
        })
        .collect();

    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -opts.negativity_tol {
        return Err(Error::InversionResidual {
            what: "negative ringing",
            value: -min,
            tol: opts.negativity_tol,
        });
    }

    Ok(DensityGrid {
        sigma: fg.sigma,
        primes: fg.primes.clone(),
        i0,
        du,
        values,
        support: fg.support(),
        imag_residual: residual,
    })
}

/// Cell-averaged single-prime density grid. Each node carries the exact mass
/// of its du-cell (computed in theta space, where the endpoint singularities
/// vanish) divided by du. Pointwise sampling would put inverse-square-root
/// spikes on the grid; cell averages are what discrete convolution needs.
pub fn local_density_grid(sigma: f64, p: u64, du: f64) -> Result<DensityGrid> {
    if !(sigma > 0.5) {
        return Err(Error::SigmaOutOfRange(sigma));
    }
    if !(du > 0.0) {
        return Err(Error::Invalid(format!("du must be positive, got {du}")));
    }
    let support = SupportInterval::local(sigma, p);
    let i0 = (support.lo / du).floor() as i64 - 1;
    let i1 = (support.hi / du).ceil() as i64 + 1;
    let n = (i1 - i0 + 1) as usize;
    let values: Vec<f64> = (0..n)
        .map(|i| {
            let u = (i0 + i as i64) as f64 * du;
            local::local_mass(u - du / 2.0, u + du / 2.0, sigma, p) * SQRT_2PI / du
        })
        .collect();
    Ok(DensityGrid {
        sigma,
        primes: PrimeSet::new(vec![p], None)?,
        i0,
        du,
        values,
        support,
        imag_residual: 0.0,
    })
}

/// Builds a single-node unit-mass grid (a point mass standing in for the
/// density of a prime with p^-sigma below resolution).
pub fn point_mass_grid(sigma: f64, du: f64) -> Result<DensityGrid> {
    Ok(DensityGrid {
        sigma,
        primes: PrimeSet::new(vec![], None)?,
        i0: 0,
        du,
        values: vec![SQRT_2PI / du],
        support: SupportInterval {
            lo: -du / 2.0,
            hi: du / 2.0,
        },
        imag_residual: 0.0,
    })
}

/// Discrete convolution of two aligned density grids, scaled by du/sqrt(2pi).
/// Supports add (Minkowski sum).
pub fn convolve(d1: &DensityGrid, d2: &DensityGrid) -> Result<DensityGrid> {
    if (d1.du - d2.du).abs() > 1e-12 * d1.du.max(d2.du) {
        return Err(Error::GridMismatch(format!(
            "du mismatch: {} vs {}",
            d1.du, d2.du
        )));
    }
    if (d1.sigma - d2.sigma).abs() > 1e-12 {
        return Err(Error::GridMismatch(format!(
            "sigma mismatch: {} vs {}",
            d1.sigma, d2.sigma
        )));
    }
    let n1 = d1.values.len();
    let n2 = d2.values.len();
    let n = n1 + n2 - 1;
    let scale = d1.du / SQRT_2PI;
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let jlo = k.saturating_sub(n2 - 1);
            let jhi = k.min(n1 - 1);
            let mut acc = 0.0;
            for j in jlo..=jhi {
                acc += d1.values[j] * d2.values[k - j];
            }
            acc * scale
        })
        .collect();

    let mut merged: Vec<u64> = d1.primes.iter().chain(d2.primes.iter()).collect();
    merged.sort_unstable();
    merged.dedup();
    let excluded = d1.primes.excluded().or(d2.primes.excluded());
    Ok(DensityGrid {
        sigma: d1.sigma,
        primes: PrimeSet::new(merged, excluded)?,
        i0: d1.i0 + d2.i0,
        du: d1.du,
        values,
        support: SupportInterval {
            lo: d1.support.lo + d2.support.lo,
            hi: d1.support.hi + d2.support.hi,
        },
        imag_residual: d1.imag_residual.max(d2.imag_residual),
    })
}

/// Cumulative distribution on the same lattice as its density grid.
#[derive(Debug, Clone)]
pub struct CdfGrid {
    pub sigma: f64,
    pub primes: PrimeSet,
    pub i0: i64,
    pub du: f64,
    pub values: Vec<f64>,
}

impl CdfGrid {
    pub fn u_at(&self, i: usize) -> f64 {
        (self.i0 + i as i64) as f64 * self.du
    }

    /// Linear interpolation; 0 left of the grid, 1 right of it.
    pub fn eval(&self, u: f64) -> f64 {
        let pos = u / self.du - self.i0 as f64;
        if pos <= 0.0 {
            return 0.0;
        }
        let n = self.values.len();
        if pos >= (n - 1) as f64 {
            return 1.0;
        }
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}

/// Running trapezoid integral of a normalized density, clamped monotone and
/// renormalized so the last value is exactly 1.
pub fn density_cdf(d: &DensityGrid) -> Result<CdfGrid> {
    let total = d.integral();
    if (total - 1.0).abs() > 1e-4 {
        return Err(Error::NotNormalized(total));
    }
    let n = d.values.len();
    let mut values = Vec::with_capacity(n);
    let mut acc = 0.0;
    values.push(0.0);
    for i in 1..n {
        acc += 0.5 * (d.values[i - 1] + d.values[i]) * d.du / SQRT_2PI;
        values.push(acc);
    }
    let last = *values.last().unwrap();
    if last <= 0.0 {
        return Err(Error::NotNormalized(last));
    }
    let mut running: f64 = 0.0;
    for v in values.iter_mut() {
        *v = (*v / last).clamp(0.0, 1.0);
        running = running.max(*v);
        *v = running;
    }
    Ok(CdfGrid {
        sigma: d.sigma,
        primes: d.primes.clone(),
        i0: d.i0,
        du: d.du,
        values,
    })
}

/// Test functions accepted by the integration endpoints.
pub enum TestFn<'a> {
    /// Indicator of the closed interval [lo, hi].
    Indicator { lo: f64, hi: f64 },
    /// Any bounded continuous function.
    Continuous(&'a (dyn Fn(f64) -> f64 + Sync)),
    /// The oscillatory character psi_x(u) = exp(i x u).
    Oscillatory { x: f64 },
}

impl TestFn<'_> {
    pub fn eval(&self, u: f64) -> Complex64 {
        match self {
            TestFn::Indicator { lo, hi } => {
                if u >= *lo && u <= *hi {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            TestFn::Continuous(f) => Complex64::new(f(u), 0.0),
            TestFn::Oscillatory { x } => Complex64::from_polar(1.0, x * u),
        }
    }
}

/// Trapezoid integral of density * psi against du/sqrt(2 pi). Real test
/// functions produce a vanishing imaginary part.
pub fn integrate_against(d: &DensityGrid, psi: &TestFn) -> Complex64 {
    let n = d.values.len();
    if n < 2 {
        return Complex64::new(0.0, 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &v) in d.values.iter().enumerate() {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        acc += psi.eval(d.u_at(i)) * (w * v);
    }
    acc * (d.du / SQRT_2PI)
}

/// Second moment of the full density as a prime sum:
/// sum_p sum_j 2 / (j^2 p^{2 j sigma}), truncated at relative 1e-14.
pub fn analytic_variance(sigma: f64, primes: &PrimeSet) -> f64 {
    primes.iter().map(|p| single_prime_variance(sigma, p)).sum()
}

fn single_prime_variance(sigma: f64, p: u64) -> f64 {
    let mut acc = 0.0;
    let mut j = 1u32;
    loop {
        let term = 2.0 / ((j as f64) * (j as f64) * (p as f64).powf(2.0 * j as f64 * sigma));
        acc += term;
        if term < VARIANCE_J_REL_TOL * acc || j > 500 {
            return acc;
        }
        j += 1;
    }
}

/// Variance mass carried by primes beyond y: an honest computable proxy for
/// the truncation quality of P_y (the limit density adds exactly this much
/// second moment from the omitted primes). Returns (partial sum over primes
/// in (y, Y], integral bound on the rest).
pub fn variance_tail_indicator(sigma: f64, y: u64) -> Result<(f64, f64)> {
    let cap = 1_000_000u64.max(y.saturating_mul(4).min(10_000_000));
    let primes = crate::primes::sieve(cap)?;
    let sum: f64 = primes
        .iter()
        .copied()
        .filter(|&p| p > y)
        .map(|p| single_prime_variance(sigma, p))
        .sum();
    // remaining primes bounded by the integral of 2 t^{-2 sigma} / ln t
    let c = cap as f64;
    let bound = 2.0 * c.powf(1.0 - 2.0 * sigma) / ((2.0 * sigma - 1.0) * c.ln());
    Ok((sum, bound))
}

/// Deterministic pairwise sum: fixed reduction tree independent of thread
/// schedule, better rounding than left-to-right.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p_upto(y: u64) -> PrimeSet {
        PrimeSet::primes_up_to(y).unwrap()
    }

    #[test]
    fn single_prime_grid_equals_local_values() {
        let ps = PrimeSet::new(vec![2], None).unwrap();
        let fg = fourier_product(1.0, &ps, 30.0, 0.25, 1.0).unwrap();
        for j in [0usize, 1, 17, 60] {
            let x = j as f64 * 0.25;
            let direct = local::local_fourier_quad_adaptive(1.0, 2, x, 1e-12).unwrap();
            assert!((fg.value_at(x).unwrap() - direct).norm() < 1e-10);
        }
        assert!((fg.value_at(0.0).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn product_invariants_hold() {
        let ps = p_upto(20);
        let fg = fourier_product(1.0, &ps, 60.0, 0.2, 1.0).unwrap();
        // Hermitian symmetry and trivial bound
        for j in 0..=fg.n_half {
            let a = fg.values[fg.n_half + j];
            let b = fg.values[fg.n_half - j];
            assert_eq!(a.conj(), b);
            assert!(a.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn monotone_domination_under_prime_growth() {
        let small = p_upto(20);
        let large = p_upto(50);
        let fs = fourier_product(1.0, &small, 40.0, 0.2, 1.0).unwrap();
        let fl = fourier_product(1.0, &large, 40.0, 0.2, 1.0).unwrap();
        for (a, b) in fl.values.iter().zip(fs.values.iter()) {
            assert!(a.norm() <= b.norm() + 1e-12);
            assert!(a.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn refusals() {
        let ps = p_upto(10);
        assert!(matches!(
            fourier_product(0.505, &ps, 10.0, 0.05, 1.0),
            Err(Error::SlowDecay { .. })
        ));
        // aliasing guard
        let wide = p_upto(50);
        assert!(matches!(
            fourier_product(1.0, &wide, 10.0, 3.0, 1.0),
            Err(Error::Aliasing { .. })
        ));
        // boundary guard: x_max clearly too short for tol
        assert!(matches!(
            fourier_product(1.0, &ps, 2.0, 0.2, 1e-10),
            Err(Error::BoundaryDecay { .. })
        ));
    }

    #[test]
    fn auto_grid_meets_boundary() {
        let ps = p_upto(50);
        let fg = fourier_grid_auto(1.0, &ps, None, 1e-10).unwrap();
        assert!(fg.values.last().unwrap().norm() < 1e-10);
        assert!(fg.x_max() < 400.0);
    }

    #[test]
    fn inversion_normalizes_15_primes() {
        let ps = p_upto(50);
        let fg = fourier_grid_auto(1.0, &ps, None, 1e-11).unwrap();
        let sup = fg.support();
        let d = inverse_transform(&fg, sup.lo - 0.4, sup.hi + 0.4, 1e-3).unwrap();
        assert!((d.integral() - 1.0).abs() < 1e-6, "integral {}", d.integral());
        assert!(d.mean().abs() < 1e-6, "mean {}", d.mean());
        let var = analytic_variance(1.0, &ps);
        assert!(
            (d.second_moment() - var).abs() < 1e-5,
            "variance {} vs {}",
            d.second_moment(),
            var
        );
        assert!(d.min_value() > -1e-9);
        // vanishing outside the support (one grid cell of slack)
        for (i, &v) in d.values.iter().enumerate() {
            let u = d.u_at(i);
            if u < sup.lo - d.du || u > sup.hi + d.du {
                assert!(v.abs() < 1e-8, "nonzero {v} at u={u}");
            }
        }
    }

    #[test]
    fn single_prime_inversion_matches_theta_formula() {
        // slow transform decay forces a long tapered grid for 2e-4 pointwise
        let ps = PrimeSet::new(vec![2], None).unwrap();
        let fg = fourier_product(1.0, &ps, 8000.0, 0.6, 1.0).unwrap();
        let sup = fg.support();
        let d = inverse_transform_with(
            &fg,
            sup.lo + 0.05,
            sup.hi - 0.05,
            0.013,
            &InversionOptions {
                negativity_tol: 0.05,
                ..Default::default()
            },
        )
        .unwrap();
        for (i, &v) in d.values.iter().enumerate() {
            let u = d.u_at(i);
            if u < sup.lo + 0.05 || u > sup.hi - 0.05 {
                continue;
            }
            let re = local::local_density(u, 1.0, 2);
            assert!((v - re).abs() < 2e-4, "u={u}: {v} vs {re}");
        }
    }

    #[test]
    fn convolve_point_mass_is_identity() {
        let d1 = local_density_grid(1.0, 2, 1e-3).unwrap();
        let pm = point_mass_grid(1.0, 1e-3).unwrap();
        let out = convolve(&d1, &pm).unwrap();
        for (i, &v) in d1.values.iter().enumerate() {
            let u = d1.u_at(i);
            assert!(
                (out.value_near(u) - v).abs() < 1e-6 * (1.0 + v.abs()),
                "u={u}"
            );
        }
    }

    #[test]
    fn convolve_adds_supports() {
        let d2 = local_density_grid(1.0, 2, 1e-3).unwrap();
        let d3 = local_density_grid(1.0, 3, 1e-3).unwrap();
        let c = convolve(&d2, &d3).unwrap();
        let s2 = SupportInterval::local(1.0, 2);
        let s3 = SupportInterval::local(1.0, 3);
        assert_relative_eq!(c.support.lo, s2.lo + s3.lo, epsilon = 1e-12);
        assert_relative_eq!(c.support.hi, s2.hi + s3.hi, epsilon = 1e-12);
        assert!((c.integral() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn convolve_rejects_mismatch() {
        let a = local_density_grid(1.0, 2, 1e-3).unwrap();
        let b = local_density_grid(1.0, 3, 2e-3).unwrap();
        assert!(matches!(convolve(&a, &b), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn cdf_endpoints_and_median() {
        let d = local_density_grid(1.0, 2, 2e-4).unwrap();
        let cdf = density_cdf(&d).unwrap();
        let sup = d.support;
        assert_eq!(cdf.eval(sup.lo - 1.0), 0.0);
        assert_eq!(cdf.eval(sup.hi + 1.0), 1.0);
        // median of the pushforward of uniform theta: u(-pi/2) = -ln(5/4)
        let median = -(1.25f64.ln());
        assert!((cdf.eval(median) - 0.5).abs() < 1e-4);
    }

    #[test]
    fn integrate_against_basics() {
        let ps = p_upto(50);
        let fg = fourier_grid_auto(1.0, &ps, Some(0.05), 1e-10).unwrap();
        let sup = fg.support();
        let d = inverse_transform(&fg, sup.lo - 0.3, sup.hi + 0.3, 1e-3).unwrap();

        let one = integrate_against(&d, &TestFn::Continuous(&|_| 1.0));
        assert!((one.re - 1.0).abs() < 1e-6 && one.im.abs() < 1e-15);

        let full = integrate_against(
            &d,
            &TestFn::Indicator {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            },
        );
        assert!((full.re - 1.0).abs() < 1e-6);

        // Fourier duality: psi_x integration reproduces the transform node
        for &x in &[0.5, 1.0, 2.0] {
            let via_density = integrate_against(&d, &TestFn::Oscillatory { x });
            let node = fg.value_at(x).unwrap();
            assert!(
                (via_density - node).norm() < 1e-6,
                "x={x}: {via_density} vs {node}"
            );
        }
    }

    #[test]
    fn analytic_variance_values() {
        let two = PrimeSet::new(vec![2], None).unwrap();
        // 2 Li_2(1/4), by direct summation
        assert_relative_eq!(
            analytic_variance(1.0, &two),
            0.5353052781654652,
            max_relative = 1e-12
        );
        let empty = PrimeSet::new(vec![], None).unwrap();
        assert_eq!(analytic_variance(1.0, &empty), 0.0);
        // additivity over disjoint sets
        let a = PrimeSet::new(vec![2, 5], None).unwrap();
        let b = PrimeSet::new(vec![3, 7], None).unwrap();
        let ab = PrimeSet::new(vec![2, 3, 5, 7], None).unwrap();
        assert_relative_eq!(
            analytic_variance(0.8, &a) + analytic_variance(0.8, &b),
            analytic_variance(0.8, &ab),
            max_relative = 1e-14
        );
        // frozen P_50 values
        assert_relative_eq!(
            analytic_variance(0.75, &p_upto(50)),
            1.7031003875366513,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            analytic_variance(1.0, &p_upto(50)),
            0.9396336958008008,
            max_relative = 1e-12
        );
    }

    #[test]
    fn transform_converges_in_y() {
        // sup_x |M~_{P_y} - M~_{P_2y}| decreases as y doubles
        for &sigma in &[1.0, 0.75] {
            let mut prev = f64::INFINITY;
            for &y in &[20u64, 40, 80] {
                let py = p_upto(y);
                let p2y = p_upto(2 * y);
                let fa = fourier_product(sigma, &py, 20.0, 0.1, 1.0).unwrap();
                let fb = fourier_product(sigma, &p2y, 20.0, 0.1, 1.0).unwrap();
                let sup = fa
                    .values
                    .iter()
                    .zip(fb.values.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0f64, f64::max);
                assert!(sup < prev, "sup {sup} did not decrease at y={y}");
                prev = sup;
            }
        }
    }

    #[test]
    fn variance_tail_indicator_sane() {
        let (sum, bound) = variance_tail_indicator(1.0, 50).unwrap();
        assert!(sum > 0.0 && sum < 0.1);
        assert!(bound < 1e-4);
        // tail shrinks with y
        let (sum2, _) = variance_tail_indicator(1.0, 500).unwrap();
        assert!(sum2 < sum);
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert_relative_eq!(pairwise_sum(&xs), naive, max_relative = 1e-12);
    }
}
