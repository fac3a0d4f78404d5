//! The single-prime density and its Fourier transform, computed by two
//! independent routes.
//!
//! For one prime the value map is u(theta) = -2 log|1 - e^{i theta} p^-sigma|
//! on (-pi, 0); the density is the pushforward of the uniform angle measure,
//!
//!   m_{sigma,p}(u) = |1 - e^{i theta} p^-sigma|^2 / (-sqrt(2 pi) sin(theta) p^-sigma)
//!
//! on the open support and 0 elsewhere. Its Fourier transform is evaluated
//! either as a full-circle trapezoid average of psi_x(u(theta)) (spectrally
//! accurate, cost growing linearly in |x|) or as the coefficient square sum
//! sum_a G_a(p,x)^2. The square sum cancels catastrophically in f64 once
//! 2|x| asin(p^-sigma) passes ~12 nats, so the series route switches to
//! 256-bit arithmetic there; grid production prefers quadrature for large |x|
//! instead, which is both cheaper and exact.

use num_complex::Complex64;

use crate::coeffs::{self, cancellation_nats, CoeffTable};
use crate::config::{QUAD_NODE_CAP, QUAD_PREFERRED_X, SERIES_F64_NATS};
use crate::error::{Error, Result};

/// The abscissa sigma > 1/2 with an optional shift tau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaParam {
    pub sigma: f64,
    pub tau: f64,
}

impl SigmaParam {
    pub fn new(sigma: f64, tau: f64) -> Result<Self> {
        if !(sigma > 0.5) || !sigma.is_finite() {
            return Err(Error::SigmaOutOfRange(sigma));
        }
        if !tau.is_finite() {
            return Err(Error::Invalid(format!("tau must be finite, got {tau}")));
        }
        Ok(SigmaParam { sigma, tau })
    }

    pub fn at(sigma: f64) -> Result<Self> {
        Self::new(sigma, 0.0)
    }
}

/// Closed interval carrying the support of a density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SupportInterval {
    /// Support of the single-prime density: [-2 ln(1 + p^-sigma), -2 ln(1 - p^-sigma)].
    pub fn local(sigma: f64, p: u64) -> Self {
        let r = (p as f64).powf(-sigma);
        SupportInterval {
            lo: -2.0 * r.ln_1p(),
            hi: -2.0 * (-r).ln_1p(),
        }
    }

    /// Minkowski sum of the local supports over a prime set.
    pub fn minkowski(sigma: f64, primes: impl IntoIterator<Item = u64>) -> Self {
        let mut lo = 0.0;
        let mut hi = 0.0;
        for p in primes {
            let s = Self::local(sigma, p);
            lo += s.lo;
            hi += s.hi;
        }
        SupportInterval { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains_open(&self, u: f64) -> bool {
        u > self.lo && u < self.hi
    }
}

/// u(theta) = -2 log|1 - e^{i theta} p^-sigma| for theta in (-pi, 0);
/// monotonically increasing there.
pub fn theta_to_u(theta: f64, sigma: f64, p: u64) -> Result<f64> {
    if !(theta > -std::f64::consts::PI && theta < 0.0) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    Ok(theta_to_u_unchecked(theta, sigma, p))
}

#[inline]
pub(crate) fn theta_to_u_unchecked(theta: f64, sigma: f64, p: u64) -> f64 {
    let r = (p as f64).powf(-sigma);
    // |1 - r e^{i theta}|^2 = 1 - 2 r cos theta + r^2
    -((r - 2.0 * theta.cos()) * r).ln_1p()
}

/// Inverse of [`theta_to_u`] on the open support, via the closed form
/// cos(theta) = (1 + r^2 - e^{-u}) / (2r) followed by one Newton polish.
pub fn u_to_theta(u: f64, sigma: f64, p: u64) -> Result<f64> {
    let support = SupportInterval::local(sigma, p);
    if !support.contains_open(u) {
        return Err(Error::OutsideSupport {
            u,
            lo: support.lo,
            hi: support.hi,
        });
    }
    let r = (p as f64).powf(-sigma);
    let c = ((1.0 + r * r - (-u).exp()) / (2.0 * r)).clamp(-1.0, 1.0);
    let mut theta = -c.acos();
    // Newton in theta tightens the acos rounding; du/dtheta vanishes at the
    // endpoints, so skip the polish when the step would be ill-conditioned.
    for _ in 0..2 {
        let denom_sq = 1.0 - 2.0 * r * theta.cos() + r * r;
        let slope = -2.0 * r * theta.sin() / denom_sq;
        if slope.abs() < 1e-8 {
            break;
        }
        let f = theta_to_u_unchecked(theta, sigma, p) - u;
        let step = f / slope;
        let next = theta - step;
        if next <= -std::f64::consts::PI || next >= 0.0 {
            break;
        }
        theta = next;
        if step.abs() < 1e-15 {
            break;
        }
    }
    Ok(theta)
}

/// The single-prime density. Zero outside the open support (including the two
/// closed endpoints, where the true density diverges; integrals are always
/// computed in theta space where the substitution removes the singularity).
pub fn local_density(u: f64, sigma: f64, p: u64) -> f64 {
    let support = SupportInterval::local(sigma, p);
    if !support.contains_open(u) {
        return 0.0;
    }
    let theta = match u_to_theta(u, sigma, p) {
        Ok(t) => t,
        Err(_) => return 0.0,
    };
    let r = (p as f64).powf(-sigma);
    let mod_sq = 1.0 - 2.0 * r * theta.cos() + r * r;
    let d = mod_sq / (-(2.0 * std::f64::consts::PI).sqrt() * theta.sin() * r);
    d.max(0.0)
}

/// Mass of the single-prime density over [a, b], exact up to the angle
/// arithmetic: the theta substitution turns it into (theta(b) - theta(a))/pi.
pub fn local_mass(a: f64, b: f64, sigma: f64, p: u64) -> f64 {
    let support = SupportInterval::local(sigma, p);
    let clampu = |u: f64| u.clamp(support.lo, support.hi);
    let (a, b) = (clampu(a), clampu(b));
    if b <= a {
        return 0.0;
    }
    let th = |u: f64| -> f64 {
        if u <= support.lo {
            -std::f64::consts::PI
        } else if u >= support.hi {
            0.0
        } else {
            u_to_theta(u, sigma, p).unwrap_or(0.0)
        }
    };
    (th(b) - th(a)) / std::f64::consts::PI
}

/// Fourier transform of the local density by full-circle trapezoid quadrature
/// with a fixed node count: (1/2pi) int exp(i x u(theta)) dtheta. The
/// integrand is smooth and periodic, so the uniform rule converges
/// spectrally once the oscillation is resolved.
pub fn local_fourier_quad(sigma: f64, p: u64, x: f64, nodes: usize) -> Result<Complex64> {
    if nodes < 64 {
        return Err(Error::TooFewNodes { got: nodes, min: 64 });
    }
    if !(sigma > 0.5) {
        return Err(Error::SigmaOutOfRange(sigma));
    }
    Ok(quad_fixed(sigma, p, x, nodes))
}

fn quad_fixed(sigma: f64, p: u64, x: f64, nodes: usize) -> Complex64 {
    // integrand is even in theta: average over (0, pi) at midpoints
    let r = (p as f64).powf(-sigma);
    let n = nodes;
    let mut re = 0.0;
    let mut im = 0.0;
    for j in 0..n {
        let theta = (j as f64 + 0.5) * std::f64::consts::PI / n as f64;
        let u = -((r - 2.0 * theta.cos()) * r).ln_1p();
        let (s, c) = (x * u).sin_cos();
        re += c;
        im += s;
    }
    Complex64::new(re / n as f64, im / n as f64)
}

/// Quadrature with node doubling until two successive estimates agree to `tol`.
pub fn local_fourier_quad_adaptive(sigma: f64, p: u64, x: f64, tol: f64) -> Result<Complex64> {
    if !(sigma > 0.5) {
        return Err(Error::SigmaOutOfRange(sigma));
    }
    let r = (p as f64).powf(-sigma);
    // phase speed max |x| du/dtheta <= 2 |x| r / (1-r)^2; start above Nyquist
    let speed = 2.0 * x.abs() * r / ((1.0 - r) * (1.0 - r));
    let mut n: usize = 64;
    while (n as f64) < speed {
        n *= 2;
    }
    let mut prev = quad_fixed(sigma, p, x, n);
    loop {
        n *= 2;
        if n > QUAD_NODE_CAP {
            return Err(Error::TooFewNodes {
                got: n,
                min: QUAD_NODE_CAP,
            });
        }
        let cur = quad_fixed(sigma, p, x, n);
        if (cur - prev).norm() <= tol {
            return Ok(cur);
        }
        prev = cur;
    }
}

/// Precomputed table of u(theta_j) on [0, pi] for one (sigma, p), shared by
/// all transform evaluations on a grid. theta_j = j pi / n_max with endpoint
/// trapezoid weights; halving the node count reuses every second entry, so a
/// single table serves every x once n_max resolves the fastest oscillation.
pub struct CircleCache {
    sigma: f64,
    p: u64,
    u: Vec<f64>,
}

impl CircleCache {
    /// `x_peak` is the largest |x| the cache will be asked to integrate.
    pub fn new(sigma: f64, p: u64, x_peak: f64) -> Result<Self> {
        if !(sigma > 0.5) {
            return Err(Error::SigmaOutOfRange(sigma));
        }
        let n_max = Self::nodes_for(sigma, p, x_peak).min(QUAD_NODE_CAP);
        let r = (p as f64).powf(-sigma);
        let u = (0..=n_max)
            .map(|j| {
                let theta = j as f64 * std::f64::consts::PI / n_max as f64;
                -((r - 2.0 * theta.cos()) * r).ln_1p()
            })
            .collect();
        Ok(CircleCache { sigma, p, u })
    }

    /// Smallest power of two comfortably past the phase speed 2|x| r/(1-r)^2;
    /// trapezoid error decays geometrically beyond that.
    fn nodes_for(sigma: f64, p: u64, x: f64) -> usize {
        let r = (p as f64).powf(-sigma);
        let speed = 2.0 * x.abs() * r / ((1.0 - r) * (1.0 - r));
        let target = 1.6 * speed + 512.0;
        let mut n = 512usize;
        while (n as f64) < target && n < QUAD_NODE_CAP {
            n *= 2;
        }
        n
    }

    pub fn transform(&self, x: f64) -> Complex64 {
        let n_max = self.u.len() - 1;
        let n = Self::nodes_for(self.sigma, self.p, x).min(n_max);
        let stride = n_max / n;
        let mut re = 0.0;
        let mut im = 0.0;
        let mut j = stride;
        while j < n_max {
            let (s, c) = (x * self.u[j]).sin_cos();
            re += c;
            im += s;
            j += stride;
        }
        let (s0, c0) = (x * self.u[0]).sin_cos();
        let (s1, c1) = (x * self.u[n_max]).sin_cos();
        re += 0.5 * (c0 + c1);
        im += 0.5 * (s0 + s1);
        Complex64::new(re / n as f64, im / n as f64)
    }
}

/// Fourier transform of the local density by the coefficient square sum
/// sum_a G_a(p,x)^2. Uses f64 tables while the cancellation stays within the
/// f64 budget and 256-bit arithmetic beyond it, so the result honors `tol`
/// across the whole parameter range.
pub fn local_fourier_series(sigma: f64, p: u64, x: f64, tol: f64) -> Result<Complex64> {
    if !(sigma > 0.5) {
        return Err(Error::SigmaOutOfRange(sigma));
    }
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("tol must be positive, got {tol}")));
    }
    if cancellation_nats(sigma, p, x) <= SERIES_F64_NATS {
        let table = CoeffTable::build(p, sigma, x, tol)?;
        Ok(table.char_sum())
    } else {
        coeffs::hp::char_sum_default(p, sigma, x, 0.0)
    }
}

/// Which route produced a local transform value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Quadrature,
    Series,
}

/// Production crossover: the series is cheapest while |x| is small and its
/// f64 cancellation budget holds; past that the circle quadrature wins.
pub fn local_fourier_auto(sigma: f64, p: u64, x: f64, tol: f64) -> Result<(Complex64, Route)> {
    if x.abs() <= QUAD_PREFERRED_X && cancellation_nats(sigma, p, x) <= SERIES_F64_NATS {
        let table = CoeffTable::build(p, sigma, x, tol)?;
        Ok((table.char_sum(), Route::Series))
    } else {
        Ok((local_fourier_quad_adaptive(sigma, p, x, tol)?, Route::Quadrature))
    }
}
