//! Quadratic Hilbert symbols over Q, the Hasse norm test, and truncated
//! p-adic enumeration of the local unit norm groups `N(1 + p^e O_w)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, kronecker_i128, mod_inverse, valuation, Discriminant};
use crate::error::{Error, Result};
use crate::modulus::Modulus;

/// Rational numbers accepted by the symbol routines.
pub type Rational = Ratio<i64>;

/// Largest residue span `p^(M-e)` enumerated before giving up on a level.
const SPAN_CAP: u128 = 1 << 22;

/// A place of Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Finite(u64),
    RealInfinite,
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::RealInfinite => write!(f, "inf"),
        }
    }
}

/// Integer in the same square class as the rational `x`.
fn square_class_integer(x: Rational) -> i128 {
    *x.numer() as i128 * *x.denom() as i128
}

fn split_valuation(n: i128, p: u64) -> (u32, i128) {
    let v = valuation(n, p);
    (v, n / (p as i128).pow(v))
}

fn hilbert_integers(a: i128, b: i128, v: Place) -> i8 {
    match v {
        Place::RealInfinite => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let (alpha, u) = split_valuation(a, 2);
            let (beta, w) = split_valuation(b, 2);
            let eps = |x: i128| (x.rem_euclid(4) == 3) as u32;
            let omega = |x: i128| matches!(x.rem_euclid(8), 3 | 5) as u32;
            let e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Finite(p) => {
            let (alpha, u) = split_valuation(a, p);
            let (beta, w) = split_valuation(b, p);
            let pi = p as i128;
            let mut s: i8 = if (alpha * beta) % 2 == 1 && p % 4 == 3 {
                -1
            } else {
                1
            };
            if beta % 2 == 1 {
                s *= kronecker_i128(u.rem_euclid(pi), pi);
            }
            if alpha % 2 == 1 {
                s *= kronecker_i128(w.rem_euclid(pi), pi);
            }
            s
        }
    }
}

/// The quadratic Hilbert symbol `(a, b)_v` for nonzero rationals.
pub fn hilbert_symbol(a: impl Into<Rational>, b: impl Into<Rational>, v: Place) -> i8 {
    let (a, b) = (a.into(), b.into());
    assert!(
        *a.numer() != 0 && *b.numer() != 0,
        "Hilbert symbol needs nonzero arguments"
    );
    hilbert_integers(square_class_integer(a), square_class_integer(b), v)
}

/// `log` of a sign, as an element of F_2.
pub fn log_sign(s: i8) -> bool {
    s == -1
}

/// Places where `(x, d)_v` can be nontrivial: the real place and the primes
/// dividing `2 * d * numerator(x) * denominator(x)`.
pub fn relevant_places(x: Rational, d: &Discriminant) -> Vec<Place> {
    let mut primes: Vec<u64> = vec![2];
    primes.extend_from_slice(d.ramified_primes());
    for n in [*x.numer(), *x.denom()] {
        if let Ok(f) = factorize(n) {
            primes.extend(f.primes());
        }
    }
    primes.sort_unstable();
    primes.dedup();
    let mut places: Vec<Place> = primes.into_iter().map(Place::Finite).collect();
    places.push(Place::RealInfinite);
    places
}

/// Hasse norm test: whether `x` is a norm from `Q(sqrt d)`.
pub fn is_global_norm(x: impl Into<Rational>, d: &Discriminant) -> bool {
    let x = x.into();
    relevant_places(x, d)
        .into_iter()
        .all(|v| hilbert_symbol(x, d.value(), v) == 1)
}

/// Summary of a local unit norm index computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalNormIndexReport {
    pub p: u64,
    pub m_exponent: u32,
    pub index: u64,
    pub truncation_level: u32,
    pub stabilized: bool,
}

/// The truncated image of `N(1 + p^e O_w)` inside `(1 + p^e Z_p) / (1 + p^M Z_p)`
/// together with an F_2 coordinate system on the quotient.
#[derive(Clone, Debug)]
pub struct LocalNormGroup {
    p: u64,
    m_exp: u32,
    level: u32,
    modulus: u64,
    /// Membership bitmap over residues mod `p^level`; empty for split `p`.
    image: Vec<bool>,
    index: u64,
    /// Residues whose classes form an F_2 basis of the quotient.
    basis: Vec<u64>,
    stabilized: bool,
}

fn norm_image(d: i64, p: u64, m_exp: u32, level: u32) -> Result<(Vec<bool>, u64)> {
    let modulus = (p as u128).pow(level);
    let span = (p as u128).pow(level - m_exp);
    if span > SPAN_CAP {
        return Err(Error::NoStabilization { p, cap: level });
    }
    let (modulus, span) = (modulus as i128, span as i128);
    let pe = (p as i128).pow(m_exp);
    let dd = d as i128;
    // O_K = Z[w], w = (d + sqrt d)/2: N(x + y w) = x^2 + d x y + (d^2 - d)/4 y^2.
    let nw = (dd * dd - dd) / 4;
    // Norms of 1 + p^e z are ≡ 1 mod p^e; slot (n - 1) / p^e.
    let mut image = vec![false; span as usize];
    let mut found = 0i128;
    'outer: for x in 0..span {
        let s = (1 + pe * x).rem_euclid(modulus);
        for y in 0..span {
            let t = (pe * y).rem_euclid(modulus);
            let n = (s * s + (dd.rem_euclid(modulus) * s % modulus) * t + nw.rem_euclid(modulus) * (t * t % modulus))
                .rem_euclid(modulus);
            let slot = &mut image[((n - 1) / pe) as usize];
            if !*slot {
                *slot = true;
                found += 1;
                if found == span {
                    break 'outer;
                }
            }
        }
    }
    let index = (span / found) as u64;
    debug_assert_eq!(span % found, 0);
    Ok((image, index))
}

impl LocalNormGroup {
    /// Computes the group for `w | p` in `Q(sqrt d)` and exponent `m_exp >= 1`.
    pub fn new(d: &Discriminant, p: u64, m_exp: u32) -> Result<Self> {
        if m_exp == 0 {
            return Err(Error::Domain("local norm index needs m_exp >= 1".into()));
        }
        // Split w has K_w = Q_p. For odd p, 1 + p^e Z_p consists of squares.
        if p != 2 || kronecker_i128(d.value() as i128, p as i128) == 1 {
            return Ok(LocalNormGroup {
                p,
                m_exp,
                level: m_exp,
                modulus: p.pow(m_exp),
                image: Vec::new(),
                index: 1,
                basis: Vec::new(),
                stabilized: true,
            });
        }
        let start = 2 * m_exp + valuation(4 * d.value() as i128, p) + 2;
        let mut level = start;
        let (mut image, mut index) = norm_image(d.value(), p, m_exp, level)?;
        loop {
            let (next_image, next_index) = norm_image(d.value(), p, m_exp, level + 1)?;
            if next_index == index {
                break;
            }
            level += 1;
            image = next_image;
            index = next_index;
        }
        let mut group = LocalNormGroup {
            p,
            m_exp,
            level,
            modulus: p.pow(level),
            image,
            index,
            basis: Vec::new(),
            stabilized: true,
        };
        group.choose_basis()?;
        Ok(group)
    }

    /// Shared cached instance.
    pub fn cached(d: &Discriminant, p: u64, m_exp: u32) -> Result<Arc<Self>> {
        type Cache = Mutex<HashMap<(i64, u64, u32), Arc<LocalNormGroup>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (d.value(), p, m_exp);
        if let Some(g) = cache.lock().unwrap().get(&key) {
            return Ok(g.clone());
        }
        let g = Arc::new(LocalNormGroup::new(d, p, m_exp)?);
        cache.lock().unwrap().insert(key, g.clone());
        Ok(g)
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Dimension of the quotient over F_2.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn report(&self) -> LocalNormIndexReport {
        LocalNormIndexReport {
            p: self.p,
            m_exponent: self.m_exp,
            index: self.index,
            truncation_level: self.level,
            stabilized: self.stabilized,
        }
    }

    fn in_image(&self, r: u64) -> bool {
        let pe = self.p.pow(self.m_exp);
        let r = r % self.modulus;
        debug_assert_eq!(r % pe, 1 % pe);
        self.image.is_empty() || self.image[((r + self.modulus - 1) % self.modulus / pe) as usize]
    }

    fn combo(&self, bits: u64) -> u64 {
        let m = self.modulus as u128;
        self.basis
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .fold(1u128, |acc, (_, &b)| acc * b as u128 % m) as u64
    }

    /// Coordinates of a residue `r ≡ 1 mod p^e` in the quotient, or `None`
    /// if `r` is not in the expected coset space.
    fn coords_of_residue(&self, r: u64) -> Option<u64> {
        if self.index == 1 {
            return Some(0);
        }
        let m = self.modulus as i128;
        (0..1u64 << self.basis.len()).find(|&bits| {
            let inv = mod_inverse(self.combo(bits) as i128, m).expect("unit");
            self.in_image((r as i128 * inv % m) as u64)
        })
    }

    fn choose_basis(&mut self) -> Result<()> {
        if self.index == 1 {
            return Ok(());
        }
        let pe = self.p.pow(self.m_exp);
        let mut r = 1 + pe;
        while (1u64 << self.basis.len()) < self.index {
            if r >= self.modulus {
                return Err(Error::FormulaViolation(format!(
                    "local quotient at p={} is not elementary abelian",
                    self.p
                )));
            }
            if self.coords_of_residue(r).is_none() {
                self.basis.push(r);
            }
            r += pe;
        }
        if (1u64 << self.basis.len()) != self.index {
            return Err(Error::FormulaViolation(format!(
                "local quotient at p={} is not elementary abelian",
                self.p
            )));
        }
        Ok(())
    }

    fn residue_of(&self, x: Rational) -> Result<u64> {
        let m = self.modulus as i128;
        let den = mod_inverse(*x.denom() as i128, m)
            .ok_or_else(|| Error::Precondition(format!("{x} is not a p-adic unit at {}", self.p)))?;
        let r = (*x.numer() as i128).rem_euclid(m) * den % m;
        let pe = self.p.pow(self.m_exp) as i128;
        if r.rem_euclid(pe) != 1 % pe {
            return Err(Error::Precondition(format!(
                "{x} is not congruent to 1 mod {}^{}",
                self.p, self.m_exp
            )));
        }
        Ok(r as u64)
    }

    /// Whether `x ∈ 1 + p^e Z_p` lies in `N(1 + p^e O_w)`.
    pub fn contains(&self, x: Rational) -> Result<bool> {
        let r = self.residue_of(x)?;
        Ok(self.in_image(r))
    }

    /// F_2 coordinates (bit i = basis element i) of `x ∈ 1 + p^e Z_p`.
    pub fn coordinates(&self, x: Rational) -> Result<Vec<bool>> {
        let r = self.residue_of(x)?;
        self.coordinates_of_residue(r)
    }

    /// `p^level`: residues handed to [`Self::coordinates_of_residue`] live here.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Coordinates of a residue mod `p^level` that is `≡ 1 mod p^e`.
    pub fn coordinates_of_residue(&self, r: u64) -> Result<Vec<bool>> {
        let pe = self.p.pow(self.m_exp);
        if r % pe != 1 % pe {
            return Err(Error::Precondition(format!("{r} is not 1 mod {pe}")));
        }
        let bits = self
            .coords_of_residue(r)
            .ok_or_else(|| Error::FormulaViolation("residue outside the coset space".into()))?;
        Ok((0..self.basis.len()).map(|i| bits >> i & 1 == 1).collect())
    }
}

/// `[1 + p^e Z_p : N(1 + p^e O_w)]` for `w | p` in `Q(sqrt d)`.
pub fn local_norm_index(d: &Discriminant, p: u64, m_exp: u32) -> Result<LocalNormIndexReport> {
    Ok(LocalNormGroup::cached(d, p, m_exp)?.report())
}

/// Checks `x ≡ 1 mod* m_f` and positivity when the real place divides `m`.
pub fn in_ray(x: Rational, m: &Modulus) -> bool {
    if m.infinite && *x.numer() < 0 {
        return false;
    }
    let mf = m.m_f as i128;
    if mf == 1 {
        return true;
    }
    match mod_inverse(*x.denom() as i128, mf) {
        Some(inv) => (*x.numer() as i128).rem_euclid(mf) * inv % mf == 1,
        None => false,
    }
}

/// Whether `x ∈ Q^m` is the norm of an element of `K^m`, decided locally.
pub fn is_ray_norm(x: impl Into<Rational>, d: &Discriminant, m: &Modulus) -> Result<bool> {
    let x = x.into();
    if *x.numer() == 0 || !in_ray(x, m) {
        return Err(Error::Precondition(format!("{x} does not lie in Q^m for m = {m}")));
    }
    if !is_global_norm(x, d) {
        return Ok(false);
    }
    for (p, e) in m.prime_powers() {
        if !LocalNormGroup::cached(d, p, e)?.contains(x)? {
            return Ok(false);
        }
    }
    Ok(true)
}
