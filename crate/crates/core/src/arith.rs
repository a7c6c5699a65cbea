//! Exact integer primitives: factorization, the Kronecker symbol and
//! fundamental discriminants with their prime-discriminant decomposition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Primes below this bound are removed by trial division before any
/// probabilistic-looking machinery runs.
const TRIAL_BOUND: u64 = 1 << 12;

/// Witness set making Miller-Rabin deterministic for every `u64`.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// A nonzero integer together with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub value: i64,
    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn is_negative(&self) -> bool {
        self.value < 0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Multiplies the factorization back together, as an `i128` so that
    /// `-2^63` round-trips.
    pub fn recompose(&self) -> i128 {
        let mag: i128 = self
            .factors
            .iter()
            .map(|&(p, e)| (p as i128).pow(e))
            .product();
        if self.value < 0 {
            -mag
        } else {
            mag
        }
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `m`, if it exists. `m = 1` yields `Some(0)`.
pub fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let (g, x, _) = xgcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Floor of the square root.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> bool {
    n >= 0 && {
        let r = isqrt(n as u128);
        r * r == n as u128
    }
}

/// Deterministic primality test for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho. Returns a nontrivial factor of the odd
/// composite `n`. Deterministic: the polynomial constants are tried in order.
fn rho_split(n: u64) -> u64 {
    for c in 1..n {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let (mut x, mut ys) = (0u64, 0u64);
        let mut g = 1u64;
        const BATCH: u64 = 64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // Batched product overshot: backtrack one step at a time.
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("rho failed for every constant on composite {n}")
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let f = rho_split(n);
    split_into(f, out);
    split_into(n / f, out);
}

/// Factors a nonzero integer.
pub fn factorize(n: i64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factor zero".into()));
    }
    let mut m = n.unsigned_abs();
    let mut primes: Vec<u64> = Vec::new();
    let tz = m.trailing_zeros();
    primes.extend(std::iter::repeat_n(2, tz as usize));
    m >>= tz;
    let mut p = 3u64;
    while p < TRIAL_BOUND && p * p <= m {
        while m % p == 0 {
            primes.push(p);
            m /= p;
        }
        p += 2;
    }
    if m > 1 {
        if m < TRIAL_BOUND * TRIAL_BOUND {
            // Trial division already passed sqrt(m): m is prime.
            primes.push(m);
        } else {
            split_into(m, &mut primes);
        }
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { value: n, factors })
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: i128, p: u64) -> u32 {
    debug_assert!(n != 0);
    let p = p as i128;
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Kronecker symbol `(a | n)`.
pub fn kronecker(a: i64, n: i64) -> Result<i8> {
    if a == 0 && n == 0 {
        return Err(Error::Domain("kronecker(0, 0) is undefined".into()));
    }
    Ok(kronecker_i128(a as i128, n as i128))
}

pub(crate) fn kronecker_i128(a: i128, n: i128) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i8;
    let mut n = n;
    let mut a = a;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let v = n.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        n >>= v;
    }
    // Jacobi symbol (a | n) for odd positive n.
    a = a.rem_euclid(n);
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Whether `d` is the discriminant of a quadratic field.
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let Ok(f) = factorize(d) else { return false };
    match d.rem_euclid(4) {
        1 => f.is_squarefree(),
        0 => {
            let m = d / 4;
            if !matches!(m.rem_euclid(4), 2 | 3) {
                return false;
            }
            factorize(m).map(|g| g.is_squarefree()).unwrap_or(false)
        }
        _ => false,
    }
}

/// A fundamental quadratic discriminant with its ramification data.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Discriminant {
    d: i64,
    ramified: Vec<u64>,
    prime_discs: Vec<i64>,
}

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        if !is_fundamental(d) {
            return Err(Error::NotFundamental(d));
        }
        let ramified: Vec<u64> = factorize(d)?.primes().collect();
        let prime_discs = decompose(d, &ramified)?;
        Ok(Discriminant {
            d,
            ramified,
            prime_discs,
        })
    }

    pub fn value(&self) -> i64 {
        self.d
    }

    /// The ramified primes `T`, increasing.
    pub fn ramified_primes(&self) -> &[u64] {
        &self.ramified
    }

    /// Prime discriminants aligned with [`Self::ramified_primes`].
    pub fn prime_discriminants(&self) -> &[i64] {
        &self.prime_discs
    }

    /// `t = |T|`.
    pub fn t(&self) -> u32 {
        self.ramified.len() as u32
    }

    pub fn is_real(&self) -> bool {
        self.d > 0
    }

    pub fn is_ramified(&self, p: u64) -> bool {
        self.ramified.binary_search(&p).is_ok()
    }

    /// Fundamental discriminants in `[from, to]`, increasing.
    pub fn range(from: i64, to: i64) -> Vec<Discriminant> {
        (from..=to).filter_map(|d| Discriminant::new(d).ok()).collect()
    }
}

impl std::fmt::Display for Discriminant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.d)
    }
}

fn decompose(d: i64, ramified: &[u64]) -> Result<Vec<i64>> {
    let mut odd_product = 1i64;
    let mut out = Vec::with_capacity(ramified.len());
    for &p in ramified.iter().filter(|&&p| p != 2) {
        let p = p as i64;
        let star = if p % 4 == 1 { p } else { -p };
        odd_product *= star;
        out.push(star);
    }
    if ramified.first() == Some(&2) {
        let two_star = d / odd_product;
        if !matches!(two_star, -4 | 8 | -8) || two_star * odd_product != d {
            return Err(Error::NotFundamental(d));
        }
        out.insert(0, two_star);
    } else if odd_product != d {
        return Err(Error::NotFundamental(d));
    }
    Ok(out)
}

/// Prime discriminants `p*` of `d`, one per ramified prime.
pub fn prime_discriminants(d: &Discriminant) -> Vec<i64> {
    d.prime_discs.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().factors.is_empty());
        let f = factorize(-84).unwrap();
        assert!(f.is_negative());
        assert_eq!(f.factors, vec![(2, 2), (3, 1), (7, 1)]);
        assert_eq!(factorize(9991).unwrap().factors, vec![(97, 1), (103, 1)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorize_large_semiprimes() {
        let p = 4_294_967_291u64; // largest prime below 2^32
        let q = 2_147_483_647u64;
        let f = factorize((p * q) as i64).unwrap();
        assert_eq!(f.factors, vec![(q, 1), (p, 1)]);
        let f = factorize(i64::MIN).unwrap();
        assert_eq!(f.factors, vec![(2, 63)]);
        assert_eq!(f.recompose(), i64::MIN as i128);
        let big_prime = 9_223_372_036_854_775_783i64;
        assert_eq!(factorize(big_prime).unwrap().factors, vec![(big_prime as u64, 1)]);
    }

    #[test]
    fn factorization_round_trips_exhaustively() {
        for n in -1_000_000i64..=1_000_000 {
            if n == 0 {
                continue;
            }
            let f = factorize(n).unwrap();
            assert_eq!(f.recompose(), n as i128);
            assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.primes().all(is_prime));
        }
    }

    #[test]
    fn kronecker_examples() {
        assert!(kronecker(0, 0).is_err());
        for n in [-7, 1, 2, 15, 1000] {
            assert_eq!(kronecker(1, n).unwrap(), 1);
        }
        assert_eq!(kronecker(5, 11).unwrap(), 1);
        assert_eq!(kronecker(3, 7).unwrap(), -1);
        assert_eq!(kronecker(-23, 2).unwrap(), 1);
        assert_eq!(kronecker(5, 2).unwrap(), -1);
        assert_eq!(kronecker(-1, -1).unwrap(), -1);
    }

    #[test]
    fn kronecker_matches_residue_enumeration() {
        let primes: Vec<u64> = (3..500).filter(|&p| is_prime(p)).collect();
        for p in primes {
            let squares: std::collections::HashSet<u64> = (1..p).map(|x| x * x % p).collect();
            for a in 0..p {
                let expected = if a == 0 {
                    0
                } else if squares.contains(&a) {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a as i64, p as i64).unwrap(), expected, "({a}|{p})");
            }
        }
    }

    #[test]
    fn kronecker_is_multiplicative() {
        for a in -40i64..40 {
            for b in -40i64..40 {
                for n in 1i64..60 {
                    let lhs = kronecker(a * b, n).unwrap();
                    let rhs = kronecker(a, n).unwrap() * kronecker(b, n).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
        for a in -30i64..30 {
            for m in -30i64..30 {
                for n in -30i64..30 {
                    if m == 0 || n == 0 {
                        continue;
                    }
                    let lhs = kronecker(a, m * n).unwrap();
                    let rhs = kronecker(a, m).unwrap() * kronecker(a, n).unwrap();
                    assert_eq!(lhs, rhs, "a={a} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn fundamental_examples() {
        assert!(is_fundamental(-4));
        assert!(is_fundamental(8));
        assert!(!is_fundamental(45));
        assert!(is_fundamental(5));
        assert!(is_fundamental(-3));
        assert!(!is_fundamental(-16));
        assert!(!is_fundamental(12 * 4));
        assert!(is_fundamental(12));
        assert!(!is_fundamental(1));
    }

    #[test]
    fn prime_discriminant_examples() {
        let d = Discriminant::new(-4).unwrap();
        assert_eq!(prime_discriminants(&d), vec![-4]);
        let d = Discriminant::new(-84).unwrap();
        let pd = prime_discriminants(&d);
        assert_eq!(pd.iter().product::<i64>(), -84);
        let mut sorted = pd.clone();
        sorted.sort();
        assert_eq!(sorted, vec![-7, -4, -3]);
        let d = Discriminant::new(12).unwrap();
        assert_eq!(prime_discriminants(&d), vec![-4, -3]);
        assert!(Discriminant::new(45).is_err());
    }

    #[test]
    fn prime_discriminants_multiply_back() {
        for d in -100_000i64..=100_000 {
            if let Ok(disc) = Discriminant::new(d) {
                let pd = disc.prime_discriminants();
                assert_eq!(pd.iter().product::<i64>(), d);
                assert_eq!(pd.len(), disc.ramified_primes().len());
                for (&p, &s) in disc.ramified_primes().iter().zip(pd) {
                    assert_eq!(s.unsigned_abs() >> s.unsigned_abs().trailing_zeros(), p >> p.trailing_zeros());
                    assert!(is_fundamental(s));
                }
            }
        }
    }
}
