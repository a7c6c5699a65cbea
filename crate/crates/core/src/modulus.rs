//! Moduli `m = m_f * m_inf` and place sets `S` over the rationals.

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime};
use crate::error::{Error, Result};

/// A modulus of the rationals: a positive integer and optionally the real place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Modulus {
    pub m_f: u64,
    pub infinite: bool,
}

impl Modulus {
    pub fn new(m_f: u64, infinite: bool) -> Result<Self> {
        if m_f == 0 {
            return Err(Error::Domain("modulus must be a positive integer".into()));
        }
        Ok(Modulus { m_f, infinite })
    }

    /// The trivial modulus.
    pub fn one() -> Self {
        Modulus {
            m_f: 1,
            infinite: false,
        }
    }

    /// The product of the real places: ray classes become narrow classes.
    pub fn real_place() -> Self {
        Modulus {
            m_f: 1,
            infinite: true,
        }
    }

    /// `(p, v_p(m_f))` for every prime dividing the finite part.
    pub fn prime_powers(&self) -> Vec<(u64, u32)> {
        factorize(self.m_f as i64)
            .map(|f| f.factors)
            .unwrap_or_default()
    }

    pub fn divides_prime(&self, p: u64) -> bool {
        self.m_f % p == 0
    }
}

impl std::fmt::Display for Modulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.infinite {
            write!(f, "{}*inf", self.m_f)
        } else {
            write!(f, "{}", self.m_f)
        }
    }
}

/// A finite set of places of Q containing the real place. Only the finite
/// primes are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlaceSet {
    primes: Vec<u64>,
}

impl PlaceSet {
    /// `S = {inf}`.
    pub fn infinite_only() -> Self {
        PlaceSet::default()
    }

    pub fn with_primes(primes: &[u64]) -> Result<Self> {
        let mut primes = primes.to_vec();
        primes.sort_unstable();
        primes.dedup();
        if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        Ok(PlaceSet { primes })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    /// Checks `S ∩ supp(m_f) = ∅`.
    pub fn check_disjoint(&self, m: &Modulus) -> Result<()> {
        match self.primes.iter().find(|&&p| m.m_f % p == 0) {
            Some(&prime) => Err(Error::ModulusMeetsS { m_f: m.m_f, prime }),
            None => Ok(()),
        }
    }

    /// Compact label such as `inf;2;3`.
    pub fn label(&self) -> String {
        std::iter::once("inf".to_string())
            .chain(self.primes.iter().map(|p| p.to_string()))
            .collect::<Vec<_>>()
            .join(";")
    }
}
