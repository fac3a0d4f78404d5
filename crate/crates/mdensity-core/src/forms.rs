//! Hecke eigenvalue ingestion and the per-form pipeline: partial
//! log-differences of symmetric-power L-values, smoothed tail sums, and
//! weighted family averages at finite truncation.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::global::TestFn;
use crate::primes::{self, PrimeSet};

/// One primitive form's data: weight k, level q^m, real Hecke eigenvalues
/// lambda(p) on primes, and an externally supplied family weight standing in
/// for 1/(C_k (1 - C_q(m)) <f,f>). Petersson norms are not computable from
/// eigenvalue files, so the weight column is opaque here.
#[derive(Debug, Clone, PartialEq)]
pub struct HeckeFormRecord {
    pub label: String,
    pub k: u32,
    pub q: u64,
    pub m: u32,
    pub lambda: BTreeMap<u64, f64>,
    pub weight: f64,
}

impl HeckeFormRecord {
    pub fn new(
        label: String,
        k: u32,
        q: u64,
        m: u32,
        lambda: BTreeMap<u64, f64>,
        weight: f64,
    ) -> Result<Self> {
        if !primes::is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if k < 2 || k % 2 != 0 {
            return Err(Error::Invalid(format!(
                "form {label}: weight k must be an even integer >= 2, got {k}"
            )));
        }
        if m < 1 {
            return Err(Error::Invalid(format!(
                "form {label}: level exponent m must be >= 1, got {m}"
            )));
        }
        if !(weight > 0.0) {
            return Err(Error::NonPositiveWeight { label, weight });
        }
        for (&p, &v) in &lambda {
            if !primes::is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if p != q && v.abs() > 2.0 {
                return Err(Error::EigenvalueBound { label, p, value: v });
            }
        }
        Ok(HeckeFormRecord {
            label,
            k,
            q,
            m,
            lambda,
            weight,
        })
    }

    /// The averaging theory behind the pipeline needs 2 <= k < 12 or k = 14;
    /// other weights are accepted for exploration with a warning.
    pub fn weight_class_warning(&self) -> Option<String> {
        if (self.k < 12 && self.k >= 2) || self.k == 14 {
            None
        } else {
            Some(format!(
                "form {}: weight k = {} outside the supported classes (2 <= k < 12 or k = 14); results are exploratory",
                self.label, self.k
            ))
        }
    }

    fn angle(&self, p: u64) -> Result<f64> {
        let lam = *self.lambda.get(&p).ok_or_else(|| Error::MissingEigenvalues {
            label: self.label.clone(),
            missing: vec![p],
        })?;
        if lam.abs() > 2.0 {
            return Err(Error::EigenvalueBound {
                label: self.label.clone(),
                p,
                value: lam,
            });
        }
        Ok((lam / 2.0).acos())
    }
}

/// The exponent pair (mu, nu) with mu - nu = 2, nu >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymPowerPair {
    mu: u32,
    nu: u32,
}

impl SymPowerPair {
    pub fn new(mu: u32, nu: u32) -> Result<Self> {
        if nu < 1 || mu != nu + 2 {
            return Err(Error::BadSymPowerPair { mu, nu });
        }
        Ok(SymPowerPair { mu, nu })
    }

    pub fn mu(&self) -> u32 {
        self.mu
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }
}

/// lambda(p^gamma) from lambda(p). Ramified primes carry lambda(p)^gamma;
/// unramified ones follow the Chebyshev-type recurrence
/// u_0 = 1, u_1 = lambda, u_{l+1} = lambda u_l - u_{l-1}
/// (equivalently sin((gamma+1) theta)/sin(theta) for lambda = 2 cos theta).
pub fn lambda_prime_power(lam_p: f64, gamma: u32, ramified: bool) -> Result<f64> {
    if ramified {
        return Ok(lam_p.powi(gamma as i32));
    }
    if lam_p.abs() > 2.0 {
        return Err(Error::EigenvalueBound {
            label: "<direct>".into(),
            p: 0,
            value: lam_p,
        });
    }
    let mut prev = 1.0;
    let mut cur = lam_p;
    match gamma {
        0 => Ok(prev),
        1 => Ok(cur),
        _ => {
            for _ in 2..=gamma {
                let next = lam_p * cur - prev;
                prev = cur;
                cur = next;
            }
            Ok(cur)
        }
    }
}

/// log L_P(Sym^mu, sigma) - log L_P(Sym^nu, sigma) over a finite prime set:
/// the ratio collapses to sum_p -2 ln|1 - e^{i mu theta_p} p^-sigma| with
/// theta_p = arccos(lambda(p)/2); the value depends on nu only through
/// mu = nu + 2.
pub fn log_partial_sym_diff(
    form: &HeckeFormRecord,
    pair: SymPowerPair,
    sigma: f64,
    primes: &PrimeSet,
) -> Result<f64> {
    if !(sigma > 0.5) {
        return Err(Error::SigmaOutOfRange(sigma));
    }
    if primes.contains(form.q) {
        return Err(Error::LevelPrimeInSet(form.q));
    }
    let missing: Vec<u64> = primes.iter().filter(|p| !form.lambda.contains_key(p)).collect();
    if !missing.is_empty() {
        return Err(Error::MissingEigenvalues {
            label: form.label.clone(),
            missing,
        });
    }
    let mu = pair.mu() as f64;
    let mut acc = 0.0;
    for p in primes.iter() {
        let theta = form.angle(p)?;
        let r = (p as f64).powf(-sigma);
        // -2 ln|1 - e^{i mu theta} r| = -ln(1 - 2 r cos(mu theta) + r^2)
        acc -= ((r - 2.0 * (mu * theta).cos()) * r).ln_1p();
    }
    Ok(acc)
}

/// Full Euler-factor evaluation of log L_P(Sym^gamma, sigma) as a sum over
/// all gamma+1 inverse factors; independent route used to cross-check the
/// collapsed difference formula.
pub fn log_partial_sym_full(
    form: &HeckeFormRecord,
    gamma: u32,
    sigma: f64,
    primes: &PrimeSet,
) -> Result<f64> {
    if primes.contains(form.q) {
        return Err(Error::LevelPrimeInSet(form.q));
    }
    let mut acc = 0.0;
    for p in primes.iter() {
        let theta = form.angle(p)?;
        let r = (p as f64).powf(-sigma);
        for h in 0..=gamma {
            // alpha^{gamma-h} beta^h = e^{i (gamma - 2h) theta}
            let ang = (gamma as f64 - 2.0 * h as f64) * theta;
            let w = Complex64::new(1.0 - r * ang.cos(), -r * ang.sin());
            acc -= w.ln().re;
        }
    }
    Ok(acc)
}

/// Named conventions for the smoothing scale of the tail sum. The statement
/// form uses q^{m/((k-1) gamma)}; the proof's choice is q^{m/(4 (k-1) gamma)}.
/// The two differ by the factor 4 in the exponent, so both are exposed and
/// the tail operation takes the scale as an explicit argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothingScale {
    LemmaStatement,
    ProofChoice,
}

pub fn smoothing_scale(scale: SmoothingScale, q: u64, m: u32, k: u32, gamma: u32) -> f64 {
    let denom = match scale {
        SmoothingScale::LemmaStatement => (k as f64 - 1.0) * gamma as f64,
        SmoothingScale::ProofChoice => 4.0 * (k as f64 - 1.0) * gamma as f64,
    };
    (q as f64).powf(m as f64 / denom)
}

/// Smoothed tail sum over p in (p_min, p_max], p != q, of
/// lambda(p^gamma) p^-sigma e^{-p/x_smooth}, plus a bound on the omitted
/// p > p_max remainder from |lambda(p^gamma)| <= gamma + 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedTail {
    pub value: f64,
    pub omitted_bound: f64,
}

pub fn smoothed_tail(
    form: &HeckeFormRecord,
    gamma: u32,
    sigma: f64,
    x_smooth: f64,
    p_min: f64,
    p_max: f64,
) -> Result<SmoothedTail> {
    if !(x_smooth > 0.0) {
        return Err(Error::Invalid(format!(
            "smoothing scale must be positive, got {x_smooth}"
        )));
    }
    if !(p_max >= p_min) {
        return Err(Error::Invalid(format!(
            "need p_max >= p_min, got ({p_min}, {p_max}]"
        )));
    }
    let plist = primes::sieve(p_max.floor() as u64)?;
    let mut missing = Vec::new();
    let mut acc = 0.0;
    for &p in plist.iter().filter(|&&p| (p as f64) > p_min && p != form.q) {
        let lam = match form.lambda.get(&p) {
            Some(&v) => v,
            None => {
                missing.push(p);
                continue;
            }
        };
        let lam_power = lambda_prime_power(lam, gamma, false)?;
        acc += lam_power * (p as f64).powf(-sigma) * (-(p as f64) / x_smooth).exp();
    }
    if !missing.is_empty() {
        return Err(Error::MissingEigenvalues {
            label: form.label.clone(),
            missing,
        });
    }
    // sum_{n > p_max} n^-sigma e^{-n/x} <= p_max^-sigma e^{-(p_max+1)/x} / (1 - e^{-1/x})
    let geo = (-1.0 / x_smooth).exp();
    let omitted_bound = (gamma as f64 + 1.0)
        * p_max.powf(-sigma)
        * (-(p_max + 1.0) / x_smooth).exp()
        / (1.0 - geo);
    Ok(SmoothedTail {
        value: acc,
        omitted_bound,
    })
}

/// Weighted family average of psi applied to the per-form log-difference.
/// `raw` uses the weights exactly as supplied (the analogue of the primed
/// Petersson sum); `normalized` rescales them to total 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyAverage {
    pub raw: Complex64,
    pub normalized: Complex64,
}

pub fn family_average(
    records: &[HeckeFormRecord],
    pair: SymPowerPair,
    sigma: f64,
    primes: &PrimeSet,
    psi: &TestFn,
) -> Result<FamilyAverage> {
    let first = records
        .first()
        .ok_or_else(|| Error::InhomogeneousFamily("empty family".into()))?;
    for r in records {
        if (r.k, r.q, r.m) != (first.k, first.q, first.m) {
            return Err(Error::InhomogeneousFamily(format!(
                "form {} has (k,q,m)=({},{},{}), family started with ({},{},{})",
                r.label, r.k, r.q, r.m, first.k, first.q, first.m
            )));
        }
    }
    // deterministic aggregation order regardless of input or schedule
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[a].label.cmp(&records[b].label));

    let evaluated: Vec<(f64, f64)> = order
        .par_iter()
        .map(|&i| {
            let r = &records[i];
            let v = log_partial_sym_diff(r, pair, sigma, primes)?;
            Ok((r.weight, v))
        })
        .collect::<Result<_>>()?;

    let total_weight: f64 = evaluated.iter().map(|&(w, _)| w).sum();
    let mut raw = Complex64::new(0.0, 0.0);
    for &(w, v) in &evaluated {
        raw += psi.eval(v) * w;
    }
    Ok(FamilyAverage {
        raw,
        normalized: raw / total_weight,
    })
}

/// One (q, m) family of records.
#[derive(Debug, Clone)]
pub struct FormFamily {
    pub q: u64,
    pub m: u32,
    pub records: Vec<HeckeFormRecord>,
}

/// Groups records by (q, m), ordered by (q, m).
pub fn group_families(records: Vec<HeckeFormRecord>) -> Vec<FormFamily> {
    let mut map: BTreeMap<(u64, u32), Vec<HeckeFormRecord>> = BTreeMap::new();
    for r in records {
        map.entry((r.q, r.m)).or_default().push(r);
    }
    map.into_iter()
        .map(|((q, m), records)| FormFamily { q, m, records })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateMode {
    /// Average over primes q <= X at fixed m, denominator pi(X).
    PrimeSum,
    /// Average over prime powers q^m <= X, denominator pi*(X).
    PrimePowerSum,
}

/// Finite-X aggregate of family averages. Families absent from the data
/// contribute zero to the numerator but still count in the enumerated
/// denominator; they are listed in `missing`.
#[derive(Debug, Clone)]
pub struct AggregateReport {
    pub value_raw: Complex64,
    pub value_normalized: Complex64,
    pub denominator: u64,
    pub included: Vec<(u64, u32)>,
    pub missing: Vec<(u64, u32)>,
}

pub fn corollary_aggregate(
    families: &[FormFamily],
    pair: SymPowerPair,
    sigma: f64,
    base_primes: &PrimeSet,
    psi: &TestFn,
    mode: AggregateMode,
    x_cut: u64,
) -> Result<AggregateReport> {
    let in_cut = |q: u64, m: u32| -> bool {
        match mode {
            AggregateMode::PrimeSum => q <= x_cut,
            AggregateMode::PrimePowerSum => {
                let mut v: u64 = 1;
                for _ in 0..m {
                    v = match v.checked_mul(q) {
                        Some(n) => n,
                        None => return false,
                    };
                }
                v <= x_cut
            }
        }
    };

    let denominator = match mode {
        AggregateMode::PrimeSum => primes::prime_pi(x_cut)?,
        AggregateMode::PrimePowerSum => primes::prime_power_pi(x_cut)?,
    };

    let mut included = Vec::new();
    let mut sum_raw = Complex64::new(0.0, 0.0);
    let mut sum_norm = Complex64::new(0.0, 0.0);
    for fam in families.iter().filter(|f| in_cut(f.q, f.m)) {
        let primes_for_family = base_primes.exclude(fam.q)?;
        let avg = family_average(&fam.records, pair, sigma, &primes_for_family, psi)?;
        sum_raw += avg.raw;
        sum_norm += avg.normalized;
        included.push((fam.q, fam.m));
    }

    // enumerate the full denominator key set to report what is absent
    let mut missing = Vec::new();
    match mode {
        AggregateMode::PrimeSum => {
            for q in primes::sieve(x_cut)? {
                if !families.iter().any(|f| f.q == q && in_cut(f.q, f.m)) {
                    let m = families.first().map(|f| f.m).unwrap_or(1);
                    missing.push((q, m));
                }
            }
        }
        AggregateMode::PrimePowerSum => {
            for q in primes::sieve(x_cut)? {
                let mut v = q;
                let mut m = 1u32;
                while v <= x_cut {
                    if !families.iter().any(|f| f.q == q && f.m == m) {
                        missing.push((q, m));
                    }
                    v = match v.checked_mul(q) {
                        Some(n) => n,
                        None => break,
                    };
                    m += 1;
                }
            }
        }
    }

    let d = denominator.max(1) as f64;
    Ok(AggregateReport {
        value_raw: sum_raw / d,
        value_normalized: sum_norm / d,
        denominator,
        included,
        missing,
    })
}

// ---------------------------------------------------------------------------
// ingestion

#[derive(Serialize, Deserialize)]
struct FormJson {
    label: String,
    k: u32,
    q: u64,
    m: u32,
    weight: f64,
    lambda: BTreeMap<String, f64>,
}

#[derive(Serialize, Deserialize)]
struct FormsFileJson {
    forms: Vec<FormJson>,
}

/// Parses the two-section CSV format: a `label,k,q,m,weight` header with one
/// row per form, then a `label,p,lambda` header with one row per eigenvalue.
/// Blank lines and `#` comments are skipped. Returns records plus weight-class
/// warnings.
pub fn parse_forms_csv(text: &str) -> Result<(Vec<HeckeFormRecord>, Vec<String>)> {
    #[derive(Clone, Copy, PartialEq)]
    enum Section {
        Head,
        Meta,
        Lambda,
    }
    let mut section = Section::Head;
    let mut meta: Vec<(String, u32, u64, u32, f64)> = Vec::new();
    let mut lambdas: BTreeMap<String, BTreeMap<u64, f64>> = BTreeMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse {
            line: lineno + 1,
            msg,
        };
        if line == "label,k,q,m,weight" {
            section = Section::Meta;
            continue;
        }
        if line == "label,p,lambda" {
            section = Section::Lambda;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match section {
            Section::Head => {
                return Err(err("expected the header 'label,k,q,m,weight'".into()));
            }
            Section::Meta => {
                if fields.len() != 5 {
                    return Err(err(format!("expected 5 fields, got {}", fields.len())));
                }
                let k: u32 = fields[1].parse().map_err(|e| err(format!("bad k: {e}")))?;
                let q: u64 = fields[2].parse().map_err(|e| err(format!("bad q: {e}")))?;
                let m: u32 = fields[3].parse().map_err(|e| err(format!("bad m: {e}")))?;
                let w: f64 = fields[4].parse().map_err(|e| err(format!("bad weight: {e}")))?;
                meta.push((fields[0].to_string(), k, q, m, w));
            }
            Section::Lambda => {
                if fields.len() != 3 {
                    return Err(err(format!("expected 3 fields, got {}", fields.len())));
                }
                let p: u64 = fields[1].parse().map_err(|e| err(format!("bad p: {e}")))?;
                let v: f64 = fields[2].parse().map_err(|e| err(format!("bad lambda: {e}")))?;
                lambdas
                    .entry(fields[0].to_string())
                    .or_default()
                    .insert(p, v);
            }
        }
    }

    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for (label, k, q, m, w) in meta {
        let lam = lambdas.remove(&label).unwrap_or_default();
        let rec = HeckeFormRecord::new(label, k, q, m, lam, w)?;
        if let Some(warning) = rec.weight_class_warning() {
            warnings.push(warning);
        }
        out.push(rec);
    }
    if let Some(orphan) = lambdas.keys().next() {
        return Err(Error::Invalid(format!(
            "eigenvalue rows for undeclared form '{orphan}'"
        )));
    }
    Ok((out, warnings))
}

/// JSON mirror of the CSV schema.
pub fn parse_forms_json(text: &str) -> Result<(Vec<HeckeFormRecord>, Vec<String>)> {
    let file: FormsFileJson =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("forms json: {e}")))?;
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for f in file.forms {
        let mut lam = BTreeMap::new();
        for (key, v) in f.lambda {
            let p: u64 = key
                .parse()
                .map_err(|e| Error::Invalid(format!("bad prime key '{key}': {e}")))?;
            lam.insert(p, v);
        }
        let rec = HeckeFormRecord::new(f.label, f.k, f.q, f.m, lam, f.weight)?;
        if let Some(warning) = rec.weight_class_warning() {
            warnings.push(warning);
        }
        out.push(rec);
    }
    Ok((out, warnings))
}

/// Canonical CSV rendering (17 significant digits; numeric round trip is
/// bit-exact).
pub fn write_forms_csv(records: &[HeckeFormRecord]) -> String {
    let mut s = String::from("label,k,q,m,weight\n");
    for r in records {
        s.push_str(&format!("{},{},{},{},{:.16e}\n", r.label, r.k, r.q, r.m, r.weight));
    }
    s.push_str("label,p,lambda\n");
    for r in records {
        for (&p, &v) in &r.lambda {
            s.push_str(&format!("{},{p},{v:.16e}\n", r.label));
        }
    }
    s
}

/// Canonical JSON rendering.
pub fn write_forms_json(records: &[HeckeFormRecord]) -> String {
    let file = FormsFileJson {
        forms: records
            .iter()
            .map(|r| FormJson {
                label: r.label.clone(),
                k: r.k,
                q: r.q,
                m: r.m,
                weight: r.weight,
                lambda: r
                    .lambda
                    .iter()
                    .map(|(&p, &v)| (p.to_string(), v))
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("forms serialize")
}
