//! Taylor-coefficient calculus for the local oscillatory factor.
//!
//! Everything here expands psi_x(g_{sigma,p}(t)) = sum_a G_a(p,x) t^a where
//! g_{sigma,p}(t) = -Log(1 - t p^{-sigma}). The closed form is
//!
//!   G_a(p,x) = p^{-a sigma} (ix)(ix+1)...(ix+a-1) / a!
//!
//! with the positive majorant |G_a(p,x)| <= p^{-a sigma} G_a(|x|),
//! G_a(x) = sum_{n=1..a} x^n/n! C(a-1,n-1), and the weighted majorant series
//! summing to exp(|x| / (p^sigma - 1)).

use num_complex::Complex64;

use crate::config::{HP_PRECISION_BITS, TABLE_CAP, UNIT_CIRCLE_TOL};
use crate::error::{Error, Result};

/// The local Euler-factor logarithm -Log(1 - t p^{-i tau} p^{-sigma}),
/// principal branch. Well-defined since |t p^{-sigma}| < 1.
pub fn g_local(sigma: f64, p: u64, t: Complex64, tau: f64) -> Result<Complex64> {
    if !(sigma > 0.5) {
        return Err(Error::SigmaOutOfRange(sigma));
    }
    let norm = t.norm();
    if (norm - 1.0).abs() > UNIT_CIRCLE_TOL {
        return Err(Error::OffUnitCircle {
            got: norm,
            tol: UNIT_CIRCLE_TOL,
        });
    }
    Ok(g_local_unchecked(sigma, p, t, tau))
}

/// Same as [`g_local`] without input validation; hot paths call this with
/// arguments they constructed themselves.
#[inline]
pub(crate) fn g_local_unchecked(sigma: f64, p: u64, t: Complex64, tau: f64) -> Complex64 {
    let pf = p as f64;
    let rot = if tau == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, -tau * pf.ln())
    };
    let w = t * rot * pf.powf(-sigma);
    -(Complex64::new(1.0, 0.0) - w).ln()
}

/// The positive majorant G_a(x) = sum_{n=1..a} x^n/n! C(a-1,n-1); G_0 = 1.
pub fn majorant(a: usize, xabs: f64) -> f64 {
    debug_assert!(xabs >= 0.0);
    let x = xabs.abs();
    if a == 0 {
        return 1.0;
    }
    // term(n) = x^n/n! * C(a-1, n-1), updated incrementally
    let mut term = x;
    let mut sum = x;
    for n in 1..a {
        term *= x * (a - n) as f64 / ((n + 1) as f64 * n as f64);
        sum += term;
    }
    sum
}

/// Partial sum L_r(x) = sum_{m=0..r} G_m(x).
pub fn majorant_partial(r: usize, xabs: f64) -> f64 {
    (0..=r).map(|m| majorant(m, xabs)).sum()
}

/// G_a(p,x) by exact enumeration of the compositions of a. Test oracle only:
/// the composition count is 2^(a-1), so a > 25 is rejected.
pub fn coeff_nested(p: u64, sigma: f64, x: f64, a: usize) -> Result<Complex64> {
    if a > 25 {
        return Err(Error::NestedTooLarge(a));
    }
    if a == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    // s[n-1] = sum over compositions a = j_1 + ... + j_n of 1/(j_1 ... j_n)
    let mut s = vec![0.0f64; a];
    fn visit(remaining: usize, parts: usize, inv_prod: f64, s: &mut [f64]) {
        for j in 1..=remaining {
            let next = inv_prod / j as f64;
            if j == remaining {
                s[parts] += next;
            } else {
                visit(remaining - j, parts + 1, next, s);
            }
        }
    }
    visit(a, 0, 1.0, &mut s);

    let ix = Complex64::new(0.0, x);
    let mut pw = Complex64::new(1.0, 0.0); // (ix)^n / n!
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, sn) in s.iter().enumerate() {
        pw *= ix / (n + 1) as f64;
        acc += pw * sn;
    }
    Ok(acc * (p as f64).powf(-(a as f64) * sigma))
}

/// G_a(p,x) by the closed form p^{-a sigma} rising(ix, a)/a!. Production path:
/// O(a), numerically stable incremental products.
pub fn coeff_rising(p: u64, sigma: f64, x: f64, a: usize) -> Complex64 {
    let z = (p as f64).powf(-sigma);
    let ix = Complex64::new(0.0, x);
    let mut c = Complex64::new(1.0, 0.0);
    for k in 0..a {
        c = c * (ix + k as f64) * (z / (k + 1) as f64);
    }
    c
}

/// Weighted majorant terms t_a = p^{-a sigma} G_a(|x|) via the three-term
/// recurrence (a+1) G_{a+1} = (2a+x) G_a - (a-1) G_{a-1}, which follows from
/// the generating function exp(x z / (1-z)). Forward recursion is stable here
/// because G_a is the dominant solution.
struct MajorantTerms {
    z: f64,
    x: f64,
    a: usize,
    t_prev: f64, // t_{a-1}
    t_cur: f64,  // t_a
}

impl MajorantTerms {
    fn new(p: u64, sigma: f64, xabs: f64) -> Self {
        MajorantTerms {
            z: (p as f64).powf(-sigma),
            x: xabs,
            a: 0,
            t_prev: 0.0,
            t_cur: 1.0,
        }
    }
}

impl Iterator for MajorantTerms {
    type Item = f64;
    fn next(&mut self) -> Option<f64> {
        let out = self.t_cur;
        let a = self.a as f64;
        let t_next =
            self.z * ((2.0 * a + self.x) * self.t_cur - (a - 1.0) * self.z * self.t_prev) / (a + 1.0);
        self.t_prev = self.t_cur;
        self.t_cur = t_next.max(0.0);
        self.a += 1;
        Some(out)
    }
}

/// Immutable table of local Taylor coefficients with a rigorous tail bound.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    pub p: u64,
    pub sigma: f64,
    pub x: f64,
    pub values: Vec<Complex64>,
    pub tail_bound: f64,
}

impl CoeffTable {
    /// Chooses A_max as the smallest cut with majorant tail below `tol`,
    /// using exact suffix sums of the weighted majorant terms (summed
    /// backwards, so the small tail is not lost to cancellation) plus a
    /// geometric remainder for what lies past the last generated term.
    pub fn build(p: u64, sigma: f64, x: f64, tol: f64) -> Result<Self> {
        if !(sigma > 0.5) {
            return Err(Error::SigmaOutOfRange(sigma));
        }
        if !(tol > 0.0) {
            return Err(Error::Invalid(format!("tol must be positive, got {tol}")));
        }
        let xabs = x.abs();
        let z = (p as f64).powf(-sigma);

        // generate weighted majorant terms until they are both past the peak
        // and well below tol (or the hard cap is hit)
        let mut terms = Vec::with_capacity(64);
        let mut gen = MajorantTerms::new(p, sigma, xabs);
        let cutoff = tol * 1e-3;
        let mut peaked = false;
        loop {
            let t = gen.next().expect("infinite iterator");
            if let Some(&prev) = terms.last() {
                if t < prev {
                    peaked = true;
                }
            }
            terms.push(t);
            let a = terms.len() - 1;
            if t == 0.0 {
                break;
            }
            if peaked && t < cutoff && t < z.sqrt().min(0.95) * terms[a - 1] {
                break;
            }
            if a >= TABLE_CAP {
                return Err(Error::TableOverflow {
                    p,
                    sigma,
                    x,
                    cap: TABLE_CAP,
                });
            }
        }

        // geometric remainder past the last generated term
        let last = *terms.last().unwrap();
        let remainder = if last == 0.0 {
            0.0
        } else {
            let n = terms.len();
            let ratio = (terms[n - 1] / terms[n - 2]).max(z).min(0.97);
            last * ratio / (1.0 - ratio)
        };

        // exact suffix sums, summed backwards: suffix[a] = sum_{b > a} t_b + remainder
        let n = terms.len();
        let mut suffix = vec![0.0f64; n];
        let mut acc = remainder;
        for a in (0..n).rev() {
            suffix[a] = acc;
            acc += terms[a];
        }

        let a_max = match suffix.iter().position(|&s| s < tol) {
            Some(a) => a,
            None => {
                return Err(Error::TableOverflow {
                    p,
                    sigma,
                    x,
                    cap: TABLE_CAP,
                })
            }
        };

        // fill values and check the majorant domination invariant
        let ix = Complex64::new(0.0, x);
        let mut values = Vec::with_capacity(a_max + 1);
        let mut c = Complex64::new(1.0, 0.0);
        values.push(c);
        for k in 0..a_max {
            c = c * (ix + k as f64) * (z / (k + 1) as f64);
            values.push(c);
        }
        for (a, v) in values.iter().enumerate() {
            let bound = terms[a] * (1.0 + 1e-9 * (a + 1) as f64) + 1e-300;
            if v.norm() > bound {
                return Err(Error::Invalid(format!(
                    "majorant violated at a={a}: |G|={} > {bound}",
                    v.norm()
                )));
            }
        }

        Ok(CoeffTable {
            p,
            sigma,
            x,
            values,
            tail_bound: suffix[a_max],
        })
    }

    pub fn a_max(&self) -> usize {
        self.values.len() - 1
    }

    /// sum_a G_a(p,x)^2 (complex squares, not modulus squares).
    pub fn char_sum(&self) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for v in &self.values {
            s += v * v;
        }
        s
    }

    /// sum_a G_a(p,x)^2 p^{-2 i a tau}: the tau-rotated square sum that the
    /// two-variable torus average produces when the shift is nonzero.
    pub fn char_sum_rotated(&self, tau: f64) -> Complex64 {
        if tau == 0.0 {
            return self.char_sum();
        }
        let rot = Complex64::from_polar(1.0, -2.0 * tau * (self.p as f64).ln());
        let mut rp = Complex64::new(1.0, 0.0);
        let mut s = Complex64::new(0.0, 0.0);
        for v in &self.values {
            s += v * v * rp;
            rp *= rot;
        }
        s
    }

    /// Evaluates sum_a G_a t^a (the generating series) at a point on the circle.
    pub fn series_at(&self, t: Complex64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for v in self.values.iter().rev() {
            s = s * t + v;
        }
        s
    }
}

/// 2 |x| asin(p^-sigma): the (natural-log) size of the worst cancellation in
/// the f64 square sum; compared against `config::SERIES_F64_NATS`.
pub fn cancellation_nats(sigma: f64, p: u64, x: f64) -> f64 {
    2.0 * x.abs() * (p as f64).powf(-sigma).asin()
}

pub mod hp {
    //! 256-bit evaluation of the coefficient square sum. The complex squares
    //! G_a^2 cancel down from magnitudes as large as exp(2|x| asin p^-sigma),
    //! far beyond what f64 can absorb for |x| over ~15; this path keeps the
    //! oracle identities exact to 1e-12 across the full sweep.

    use astro_float::{BigFloat, RoundingMode, Sign};
    use num_complex::Complex64;

    use super::MajorantTerms;
    use crate::config::TABLE_CAP;
    use crate::error::{Error, Result};

    const RM: RoundingMode = RoundingMode::ToEven;

    fn to_f64(v: &BigFloat) -> f64 {
        if v.is_zero() {
            return 0.0;
        }
        if let Some((words, _, sign, exp, _)) = v.as_raw_parts() {
            let top = *words.last().unwrap_or(&0);
            let frac = top as f64 / (u64::MAX as f64 + 1.0); // in [0.5, 1)
            let mag = frac * (exp as f64).exp2();
            if sign == Sign::Neg {
                -mag
            } else {
                mag
            }
        } else {
            f64::NAN
        }
    }

    struct C {
        re: BigFloat,
        im: BigFloat,
    }

    /// sum_a G_a(p,x)^2 p^{-2 i a tau} in `prec`-bit arithmetic.
    pub fn char_sum(p: u64, sigma: f64, x: f64, tau: f64, prec: usize) -> Result<Complex64> {
        // termination from the same majorant analysis as the f64 table
        let xabs = x.abs();
        let z64 = (p as f64).powf(-sigma);
        let mut n_terms = 0usize;
        let mut peaked = false;
        let mut prev = f64::INFINITY;
        for (a, t) in MajorantTerms::new(p, sigma, xabs).enumerate() {
            if a > 0 && t < prev {
                peaked = true;
            }
            // squares: stop when the *squared* term would be negligible
            if (peaked && (t < 1e-18 || t * t < 1e-30)) || t == 0.0 {
                n_terms = a + 1;
                break;
            }
            prev = t;
            if a >= 4 * TABLE_CAP {
                return Err(Error::TableOverflow {
                    p,
                    sigma,
                    x,
                    cap: 4 * TABLE_CAP,
                });
            }
        }

        // z = p^-sigma at full precision: exp(-sigma ln p)
        let mut cc = astro_float::Consts::new()
            .map_err(|e| Error::Invalid(format!("bigfloat consts: {e:?}")))?;
        let pb = BigFloat::from_u64(p, prec);
        let sig = BigFloat::from_f64(sigma, prec);
        let z = pb
            .ln(prec, RM, &mut cc)
            .mul(&sig.neg(), prec, RM)
            .exp(prec, RM, &mut cc);

        let xb = BigFloat::from_f64(x, prec);
        let zero = BigFloat::from_f64(0.0, prec);

        // rotation p^{-2 i tau} as (cos, sin) of -2 tau ln p
        let rot = if tau == 0.0 {
            None
        } else {
            let ang = pb
                .ln(prec, RM, &mut cc)
                .mul(&BigFloat::from_f64(-2.0 * tau, prec), prec, RM);
            Some(C {
                re: ang.cos(prec, RM, &mut cc),
                im: ang.sin(prec, RM, &mut cc),
            })
        };

        // c_a = rising(ix, a)/a! z^a ; s = sum c_a^2 rot^a
        let mut c = C {
            re: BigFloat::from_f64(1.0, prec),
            im: zero.clone(),
        };
        let mut rp = C {
            re: BigFloat::from_f64(1.0, prec),
            im: zero.clone(),
        };
        let mut s_re = BigFloat::from_f64(1.0, prec);
        let mut s_im = zero.clone();
        let _ = z64;

        for a in 1..n_terms {
            // c *= (ix + (a-1)) * z / a  with ix + k = (k, x)
            let k = BigFloat::from_u64((a - 1) as u64, prec);
            let re = c.re.mul(&k, prec, RM).sub(&c.im.mul(&xb, prec, RM), prec, RM);
            let im = c.re.mul(&xb, prec, RM).add(&c.im.mul(&k, prec, RM), prec, RM);
            let za = z.div(&BigFloat::from_u64(a as u64, prec), prec, RM);
            c = C {
                re: re.mul(&za, prec, RM),
                im: im.mul(&za, prec, RM),
            };
            // term = c^2
            let t_re = c
                .re
                .mul(&c.re, prec, RM)
                .sub(&c.im.mul(&c.im, prec, RM), prec, RM);
            let t_im = c.re.mul(&c.im, prec, RM).mul(&BigFloat::from_u64(2, prec), prec, RM);
            let (t_re, t_im) = if let Some(r) = &rot {
                let nr = rp.re.mul(&r.re, prec, RM).sub(&rp.im.mul(&r.im, prec, RM), prec, RM);
                let ni = rp.re.mul(&r.im, prec, RM).add(&rp.im.mul(&r.re, prec, RM), prec, RM);
                rp = C { re: nr, im: ni };
                (
                    t_re.mul(&rp.re, prec, RM).sub(&t_im.mul(&rp.im, prec, RM), prec, RM),
                    t_re.mul(&rp.im, prec, RM).add(&t_im.mul(&rp.re, prec, RM), prec, RM),
                )
            } else {
                (t_re, t_im)
            };
            s_re = s_re.add(&t_re, prec, RM);
            s_im = s_im.add(&t_im, prec, RM);
        }

        Ok(Complex64::new(to_f64(&s_re), to_f64(&s_im)))
    }

    /// Default-precision wrapper.
    pub fn char_sum_default(p: u64, sigma: f64, x: f64, tau: f64) -> Result<Complex64> {
        char_sum(p, sigma, x, tau, super::HP_PRECISION_BITS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn g_local_real_points() {
        let one = Complex64::new(1.0, 0.0);
        let v = g_local(1.0, 2, one, 0.0).unwrap();
        assert_relative_eq!(v.re, std::f64::consts::LN_2, max_relative = 1e-14);
        assert!(v.im.abs() < 1e-15);

        let w = g_local(1.0, 2, -one, 0.0).unwrap();
        assert_relative_eq!(w.re, -(1.5f64.ln()), max_relative = 1e-14);
    }

    #[test]
    fn g_local_complex_point() {
        // -Log(1 - i 5^-0.6), assembled from |w| and atan2 as an independent route
        let r = 5f64.powf(-0.6);
        let v = g_local(0.6, 5, Complex64::new(0.0, 1.0), 0.0).unwrap();
        // 1 - i r has modulus sqrt(1+r^2) and argument -atan(r)
        assert_relative_eq!(v.re, -0.5 * (1.0 + r * r).ln(), max_relative = 1e-13);
        assert_relative_eq!(v.im, r.atan(), max_relative = 1e-13);
    }

    #[test]
    fn g_local_rejects_bad_inputs() {
        let one = Complex64::new(1.0, 0.0);
        assert!(matches!(
            g_local(0.5, 2, one, 0.0),
            Err(Error::SigmaOutOfRange(_))
        ));
        assert!(matches!(
            g_local(1.0, 2, Complex64::new(1.0, 1e-3), 0.0),
            Err(Error::OffUnitCircle { .. })
        ));
    }

    #[test]
    fn majorant_values() {
        assert_eq!(majorant(0, 5.0), 1.0);
        assert_eq!(majorant(1, 3.5), 3.5);
        assert_relative_eq!(majorant(3, 1.0), 13.0 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(majorant(2, 1.0), 1.5, max_relative = 1e-15);
    }

    #[test]
    fn majorant_partial_values() {
        assert_eq!(majorant_partial(0, 7.0), 1.0);
        assert_eq!(majorant_partial(1, 2.0), 3.0);
        assert_relative_eq!(majorant_partial(2, 1.0), 3.5, max_relative = 1e-15);
    }

    #[test]
    fn recurrence_matches_direct_majorant() {
        for &x in &[0.0, 0.3, 1.0, 3.0, 7.5] {
            let terms: Vec<f64> = MajorantTerms::new(3, 0.8, x).take(40).collect();
            let z = 3f64.powf(-0.8);
            for (a, t) in terms.iter().enumerate() {
                let direct = z.powi(a as i32) * majorant(a, x);
                assert_relative_eq!(*t, direct, max_relative = 1e-10, epsilon = 1e-280);
            }
        }
    }

    #[test]
    fn nested_small_cases() {
        let g0 = coeff_nested(2, 1.0, 1.0, 0).unwrap();
        assert_eq!(g0, Complex64::new(1.0, 0.0));

        let g1 = coeff_nested(2, 1.0, 1.0, 1).unwrap();
        assert_relative_eq!(g1.im, 0.5, max_relative = 1e-14);
        assert!(g1.re.abs() < 1e-16);

        // compositions {2} and {1,1}: (1/4)(i/2 - 1/2)
        let g2 = coeff_nested(2, 1.0, 1.0, 2).unwrap();
        assert_relative_eq!(g2.re, -0.125, max_relative = 1e-13);
        assert_relative_eq!(g2.im, 0.125, max_relative = 1e-13);

        assert!(matches!(
            coeff_nested(2, 1.0, 1.0, 26),
            Err(Error::NestedTooLarge(26))
        ));
    }

    #[test]
    fn rising_small_cases() {
        assert_eq!(coeff_rising(5, 0.7, 2.0, 0), Complex64::new(1.0, 0.0));
        let g1 = coeff_rising(2, 1.0, 1.0, 1);
        assert_relative_eq!(g1.im, 0.5, max_relative = 1e-15);
        let g2 = coeff_rising(2, 1.0, 1.0, 2);
        assert_relative_eq!(g2.re, -0.125, max_relative = 1e-14);
        assert_relative_eq!(g2.im, 0.125, max_relative = 1e-14);
    }

    #[test]
    fn nested_equals_rising_sweep() {
        for &p in &[2u64, 3, 5] {
            for &sigma in &[0.6, 1.0, 1.5] {
                for xi in -3..=3 {
                    let x = xi as f64;
                    for a in 0..=12 {
                        let n = coeff_nested(p, sigma, x, a).unwrap();
                        let r = coeff_rising(p, sigma, x, a);
                        let scale = 1.0 + r.norm();
                        assert!(
                            (n - r).norm() <= 1e-12 * scale,
                            "mismatch p={p} sigma={sigma} x={x} a={a}: {n} vs {r}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn majorant_dominates_rising() {
        for &p in &[2u64, 3, 5] {
            for &sigma in &[0.6, 1.0, 1.5] {
                for xi in -3..=3 {
                    let x = xi as f64;
                    let z = (p as f64).powf(-sigma);
                    for a in 0..=20 {
                        let g = coeff_rising(p, sigma, x, a).norm();
                        let bound = z.powi(a as i32) * majorant(a, x.abs());
                        assert!(g <= bound + 1e-14, "p={p} s={sigma} x={x} a={a}");
                    }
                }
            }
        }
    }

    #[test]
    fn weighted_majorant_sums_to_exponential() {
        for &p in &[2u64, 3, 5] {
            for &sigma in &[0.6, 1.0, 1.5] {
                for xi in -3..=3i32 {
                    let x = (xi as f64).abs();
                    let z = (p as f64).powf(-sigma);
                    let total: f64 = MajorantTerms::new(p, sigma, x)
                        .take_while(|&t| t > 1e-18)
                        .sum();
                    let expect = (x / ((p as f64).powf(sigma) - 1.0)).exp();
                    assert_relative_eq!(total, expect, max_relative = 1e-10);
                    let _ = z;
                }
            }
        }
    }

    #[test]
    fn table_zero_x() {
        let t = CoeffTable::build(2, 1.0, 0.0, 1e-12).unwrap();
        assert_eq!(t.a_max(), 0);
        assert_eq!(t.values[0], Complex64::new(1.0, 0.0));
        assert_eq!(t.tail_bound, 0.0);
        assert_eq!(t.char_sum(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn table_small_matches_nested() {
        let t = CoeffTable::build(3, 1.0, 1.0, 1e-10).unwrap();
        assert!(t.a_max() <= 30, "a_max = {}", t.a_max());
        for a in 0..=t.a_max().min(20) {
            let n = coeff_nested(3, 1.0, 1.0, a).unwrap();
            assert!((t.values[a] - n).norm() <= 1e-12 * (1.0 + n.norm()));
        }
        assert!(t.tail_bound < 1e-10);
    }

    #[test]
    fn table_handles_sigma_near_half_large_x() {
        let t = CoeffTable::build(2, 0.51, 100.0, 1e-10).unwrap();
        assert!(t.a_max() > 100);
        assert!(t.a_max() < TABLE_CAP);
        assert!(t.tail_bound < 1e-10);
    }

    #[test]
    fn generating_series_matches_exponential_on_circle() {
        for &(p, sigma, x) in &[(2u64, 1.0, 1.0), (3, 0.8, 2.0), (5, 0.6, 0.5)] {
            let table = CoeffTable::build(p, sigma, x, 1e-12).unwrap();
            for k in 0..32 {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / 32.0;
                let t = Complex64::from_polar(1.0, theta);
                let series = table.series_at(t);
                let direct = (Complex64::new(0.0, x) * g_local(sigma, p, t, 0.0).unwrap()).exp();
                assert!(
                    (series - direct).norm() <= table.tail_bound + 1e-12,
                    "p={p} sigma={sigma} x={x} k={k}"
                );
            }
        }
    }

    #[test]
    fn hp_matches_f64_where_safe() {
        for &(p, sigma, x) in &[(2u64, 1.0, 1.0), (3, 0.8, 2.0), (5, 0.6, 4.0)] {
            let t = CoeffTable::build(p, sigma, x, 1e-14).unwrap();
            let f = t.char_sum();
            let h = hp::char_sum(p, sigma, x, 0.0, 192).unwrap();
            assert!((f - h).norm() < 1e-11, "p={p} s={sigma} x={x}: {f} vs {h}");
        }
    }

    #[test]
    fn hp_rotated_reduces_to_plain_at_tau_zero() {
        let a = hp::char_sum(3, 0.75, 2.5, 0.0, 192).unwrap();
        let t = CoeffTable::build(3, 0.75, 2.5, 1e-14).unwrap();
        assert!((a - t.char_sum_rotated(0.0)).norm() < 1e-12);
    }
}
