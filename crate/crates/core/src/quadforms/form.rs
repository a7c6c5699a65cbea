use serde::{Deserialize, Serialize};

use crate::arith::{gcd_i128, isqrt, xgcd};
use crate::error::{Error, Result};

/// The binary quadratic form `a x^2 + b xy + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl std::fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl QuadraticForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        QuadraticForm { a, b, c }
    }

    /// The form `(a, b, (b^2 - d) / 4a)`, if that is integral.
    pub fn from_ab(a: i64, b: i64, d: i64) -> Option<Self> {
        let num = b as i128 * b as i128 - d as i128;
        let den = 4 * a as i128;
        if a == 0 || num % den != 0 {
            return None;
        }
        i64::try_from(num / den).ok().map(|c| QuadraticForm { a, b, c })
    }

    /// The principal form `(1, d mod 2, (d mod 2 - d)/4)`, unreduced when `d > 0`.
    pub fn principal(d: i64) -> Self {
        Self::from_ab(1, d.rem_euclid(2), d).expect("d is a discriminant")
    }

    pub fn discriminant(&self) -> i128 {
        self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128
    }

    pub fn is_primitive(&self) -> bool {
        gcd_i128(gcd_i128(self.a as i128, self.b as i128), self.c as i128) == 1
    }

    /// The inverse class: `(a, -b, c)`.
    pub fn inverse(&self) -> Self {
        QuadraticForm::new(self.a, -self.b, self.c)
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    pub fn is_reduced(&self) -> bool {
        let d = self.discriminant();
        if d < 0 {
            let (a, b, c) = (self.a, self.b, self.c);
            a > 0 && b.abs() <= a && a <= c && !(b < 0 && (b.abs() == a || a == c))
        } else {
            let s = isqrt(d as u128) as i128;
            let (a, b) = (self.a.abs() as i128, self.b as i128);
            0 < b && b <= s && 2 * a - b <= s && 2 * a + b > s
        }
    }

    /// A reduced form in the same proper class. For definite forms this is
    /// the unique reduced representative; for indefinite forms it is some
    /// member of the reduction cycle.
    pub fn reduce(&self) -> Self {
        if self.discriminant() < 0 {
            reduce_definite(*self)
        } else {
            let mut f = *self;
            while !f.is_reduced() {
                f = f.rho().0;
            }
            f
        }
    }

    /// One step of the indefinite reduction operator: the form `(c, b', .)`
    /// obtained by the substitution `[[0, -1], [1, t]]`. Returns it with `t`.
    pub fn rho(&self) -> (Self, i64) {
        let d = self.discriminant();
        debug_assert!(d > 0);
        let s = isqrt(d as u128) as i128;
        let (b, c) = (self.b as i128, self.c as i128);
        let two_c = 2 * c.abs();
        let nb = if c.abs() > s {
            let r = (-b).rem_euclid(two_c);
            if r > c.abs() {
                r - two_c
            } else {
                r
            }
        } else {
            s - (s + b).rem_euclid(two_c)
        };
        let t = (nb + b) / (2 * c);
        let nc = (nb * nb - d) / (4 * c);
        (
            QuadraticForm::new(c as i64, nb as i64, nc as i64),
            t as i64,
        )
    }

    /// The reduction cycle of a reduced indefinite form.
    pub fn cycle(&self) -> Vec<Self> {
        debug_assert!(self.is_reduced() && self.discriminant() > 0);
        let mut out = vec![*self];
        let mut f = self.rho().0;
        while f != *self {
            out.push(f);
            f = f.rho().0;
        }
        out
    }

    /// Canonical representative of the proper class: the reduced form for
    /// `d < 0`, the cycle member minimizing `(|a|, a < 0, b)` for `d > 0`.
    pub fn canonical(&self) -> Self {
        let r = self.reduce();
        if self.discriminant() < 0 {
            return r;
        }
        r.cycle()
            .into_iter()
            .min_by_key(|f| (f.a.abs(), f.a < 0, f.b))
            .expect("cycle is nonempty")
    }
}

fn reduce_definite(f: QuadraticForm) -> QuadraticForm {
    let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
    loop {
        if b > a || b <= -a {
            let k = (a - b).div_euclid(2 * a);
            c += a * k * k + b * k;
            b += 2 * a * k;
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        break;
    }
    QuadraticForm::new(a as i64, b as i64, c as i64)
}

/// Dirichlet composition without reduction.
pub(super) fn compose_raw(f: &QuadraticForm, g: &QuadraticForm) -> QuadraticForm {
    let d = f.discriminant();
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2) = (g.a as i128, g.b as i128);
    let h = (b1 + b2) / 2;
    let (e1, u, v) = xgcd(a1, a2);
    let (e, w, z) = xgcd(e1, h);
    // x a1 + y a2 + z h = e
    let (x, y) = (w * u, w * v);
    let big_a = a1 * a2 / (e * e);
    let num = x * a1 * b2 + y * a2 * b1 + z * (b1 * b2 + d) / 2;
    let big_b = (num / e).rem_euclid(2 * big_a);
    let big_c = (big_b * big_b - d) / (4 * big_a);
    QuadraticForm::new(big_a as i64, big_b as i64, big_c as i64)
}

/// Gauss composition of two primitive forms of the same discriminant,
/// returning a reduced form.
pub fn compose(f: &QuadraticForm, g: &QuadraticForm) -> Result<QuadraticForm> {
    let (df, dg) = (f.discriminant(), g.discriminant());
    if df != dg {
        return Err(Error::DiscriminantMismatch(df as i64, dg as i64));
    }
    if !f.is_primitive() || !g.is_primitive() {
        return Err(Error::Domain("composition needs primitive forms".into()));
    }
    Ok(normalize_sign(compose_raw(&normalize_sign(*f), &normalize_sign(*g))).reduce())
}

/// Definite forms are kept positive; indefinite forms pass through.
fn normalize_sign(f: QuadraticForm) -> QuadraticForm {
    if f.a < 0 && f.discriminant() < 0 {
        QuadraticForm::new(-f.a, -f.b, -f.c)
    } else {
        f
    }
}

/// Reduced forms of discriminant `d`: for `d < 0` one per class, for `d > 0`
/// every reduced form (all cycles, both signs of `a`).
pub fn all_reduced(d: i64) -> Vec<QuadraticForm> {
    let mut out = Vec::new();
    if d < 0 {
        let bmax = isqrt((-d / 3) as u128) as i64;
        for b in (-bmax..=bmax).filter(|b| (b - d).rem_euclid(2) == 0) {
            let ac = (b * b - d) / 4;
            let mut a = b.abs().max(1);
            while a * a <= ac {
                if ac % a == 0 {
                    let f = QuadraticForm::new(a, b, ac / a);
                    if f.is_reduced() && f.is_primitive() {
                        out.push(f);
                    }
                }
                a += 1;
            }
        }
    } else {
        let s = isqrt(d as u128) as i64;
        for b in (1..=s).filter(|b| (b - d).rem_euclid(2) == 0) {
            let n = (d - b * b) / 4;
            for a in ((s - b) / 2).max(1)..=(s + b) / 2 {
                if n % a != 0 {
                    continue;
                }
                for sign in [1, -1] {
                    let f = QuadraticForm::new(sign * a, b, -sign * (n / a));
                    if f.is_reduced() && f.is_primitive() {
                        out.push(f);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// One canonical reduced representative per narrow class.
pub fn enumerate_reduced(d: i64) -> Vec<QuadraticForm> {
    if d < 0 {
        return all_reduced(d);
    }
    let mut seen = std::collections::HashSet::new();
    let mut reps = Vec::new();
    for f in all_reduced(d) {
        if seen.contains(&f) {
            continue;
        }
        let cyc = f.cycle();
        seen.extend(cyc.iter().copied());
        reps.push(f.canonical());
    }
    reps.sort_by_key(|f| (f.a.abs(), f.a < 0, f.b));
    reps
}
