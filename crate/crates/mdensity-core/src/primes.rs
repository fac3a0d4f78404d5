//! Prime enumeration and the finite prime sets everything else is indexed by.

use crate::config::SIEVE_CAP;
use crate::error::{Error, Result};

/// Trial-division primality test; adequate for the desk scale this tool targets.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// All primes \<= y by a sieve of Eratosthenes.
pub fn sieve(y: u64) -> Result<Vec<u64>> {
    if y > SIEVE_CAP {
        return Err(Error::SieveBound(y, SIEVE_CAP));
    }
    if y < 2 {
        return Ok(Vec::new());
    }
    let n = y as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    Ok(primes)
}

/// Number of primes \<= x, by enumeration.
pub fn prime_pi(x: u64) -> Result<u64> {
    Ok(sieve(x)?.len() as u64)
}

/// Number of prime powers q^m \<= x (q prime, m >= 1), by enumeration.
pub fn prime_power_pi(x: u64) -> Result<u64> {
    let primes = sieve(x)?;
    let mut count = 0u64;
    for &q in &primes {
        let mut v = q;
        loop {
            count += 1;
            match v.checked_mul(q) {
                Some(next) if next <= x => v = next,
                _ => break,
            }
        }
    }
    Ok(count)
}

/// An ordered finite set of primes with an optional excluded prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSet {
    primes: Vec<u64>,
    excluded: Option<u64>,
}

impl PrimeSet {
    /// Validates the invariants: strictly increasing, all prime, excluded prime absent.
    pub fn new(primes: Vec<u64>, excluded: Option<u64>) -> Result<Self> {
        let mut prev = 0u64;
        for &p in &primes {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if p <= prev {
                return Err(Error::UnsortedPrimes(p, prev));
            }
            prev = p;
        }
        if let Some(q) = excluded {
            if !is_prime(q) {
                return Err(Error::NotPrime(q));
            }
            if primes.binary_search(&q).is_ok() {
                return Err(Error::Invalid(format!(
                    "excluded prime {q} still present in the set"
                )));
            }
        }
        Ok(PrimeSet { primes, excluded })
    }

    /// All primes \<= y in increasing order, no exclusion.
    pub fn primes_up_to(y: u64) -> Result<Self> {
        Ok(PrimeSet {
            primes: sieve(y)?,
            excluded: None,
        })
    }

    /// Removes q from the set and records it as excluded. q must be prime; it
    /// need not be present.
    pub fn exclude(&self, q: u64) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        let primes = self.primes.iter().copied().filter(|&p| p != q).collect();
        Ok(PrimeSet {
            primes,
            excluded: Some(q),
        })
    }

    /// The truncation set: primes \<= m ln q, excluding q itself. "log q^m" is
    /// read as the natural logarithm.
    pub fn truncation_set(q: u64, m: u32) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if m < 1 {
            return Err(Error::Invalid("truncation exponent m must be >= 1".into()));
        }
        let bound = f64::from(m) * (q as f64).ln();
        let y = bound.floor().max(0.0) as u64;
        Self::primes_up_to(y)?.exclude(q)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn excluded(&self) -> Option<u64> {
        self.excluded
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    /// True when every member of `self` is also a member of `other`.
    pub fn is_subset_of(&self, other: &PrimeSet) -> bool {
        self.primes.iter().all(|&p| other.contains(p))
    }

    /// Compact rendering for provenance headers: "2,3,5,...".
    pub fn describe(&self) -> String {
        let body = self
            .primes
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",");
        match self.excluded {
            Some(q) => format!("{body};excluded={q}"),
            None => body,
        }
    }

    /// Parses the `describe` format back.
    pub fn parse(s: &str) -> Result<Self> {
        let (body, excluded) = match s.split_once(";excluded=") {
            Some((b, q)) => {
                let q = q
                    .trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Invalid(format!("bad excluded prime: {e}")))?;
                (b, Some(q))
            }
            None => (s, None),
        };
        let mut primes = Vec::new();
        for tok in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            primes.push(
                tok.parse::<u64>()
                    .map_err(|e| Error::Invalid(format!("bad prime '{tok}': {e}")))?,
            );
        }
        PrimeSet::new(primes, excluded)
    }
}

/// The smallest prime Q with 2^mu / sqrt(Q) < 1, i.e. the first prime above 4^mu.
pub fn q_min(mu: u32) -> Result<u64> {
    if mu < 3 {
        return Err(Error::MuOutOfRange { min: 3, got: mu });
    }
    if mu > 20 {
        return Err(Error::MuOutOfRange { min: 3, got: mu });
    }
    let mut candidate = 4u64.pow(mu) + 1;
    loop {
        if is_prime(candidate) {
            return Ok(candidate);
        }
        candidate += 1;
    }
}
