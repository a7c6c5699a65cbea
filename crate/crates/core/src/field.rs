//! Elements, ideals and residues of the maximal order of `Q(√d)`.
//!
//! Elements are written `(x + y√d)/2`; ideals as `n·[a, (b + √d)/2]`.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, gcd_i128, isqrt, xgcd};
use crate::quadforms::QuadraticForm;

/// `(x + y√d)/2` with `x ≡ y·d mod 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadElt {
    pub x: BigInt,
    pub y: BigInt,
}

impl QuadElt {
    pub fn from_int(n: i64) -> Self {
        QuadElt {
            x: BigInt::from(2 * n),
            y: BigInt::zero(),
        }
    }

    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        QuadElt { x: x.into(), y: y.into() }
    }

    pub fn mul(&self, o: &QuadElt, d: i64) -> QuadElt {
        let x = (&self.x * &o.x + &self.y * &o.y * d) / 2;
        let y = (&self.x * &o.y + &o.x * &self.y) / 2;
        QuadElt { x, y }
    }

    pub fn conj(&self) -> QuadElt {
        QuadElt {
            x: self.x.clone(),
            y: -&self.y,
        }
    }

    pub fn norm(&self, d: i64) -> BigInt {
        (&self.x * &self.x - &self.y * &self.y * d) / 4
    }

    /// Sign of the real embedding with `√d > 0` (only for `d > 0`).
    pub fn is_positive(&self, d: i64) -> bool {
        debug_assert!(d > 0);
        match (self.x.sign(), self.y.sign()) {
            (num_bigint::Sign::Minus, num_bigint::Sign::Minus) => false,
            (num_bigint::Sign::Minus, _) => &self.y * &self.y * d > &self.x * &self.x,
            (_, num_bigint::Sign::Minus) => &self.x * &self.x > &self.y * &self.y * d,
            _ => !(self.x.is_zero() && self.y.is_zero()),
        }
    }

    /// Coordinates `(u, v)` in the basis `1, ω = (δ + √d)/2` reduced mod `m`.
    pub fn residue(&self, d: i64, m: u64) -> (u64, u64) {
        let delta = d.rem_euclid(2);
        let u: BigInt = (&self.x - &self.y * delta) / 2;
        let m = BigInt::from(m);
        (
            u.mod_floor(&m).to_u64().expect("reduced"),
            self.y.mod_floor(&m).to_u64().expect("reduced"),
        )
    }
}

/// The integral ideal `n·[a, (b + √d)/2]` with `0 <= b < 2a`, `b² ≡ d mod 4a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IdealRep {
    pub n: u64,
    pub a: u64,
    pub b: i64,
}

impl std::fmt::Display for IdealRep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}*[{},({}+sqrt d)/2]", self.n, self.a, self.b)
    }
}

impl IdealRep {
    pub fn unit(d: i64) -> Self {
        IdealRep {
            n: 1,
            a: 1,
            b: d.rem_euclid(2),
        }
    }

    pub fn norm(&self) -> u64 {
        self.n * self.n * self.a
    }

    /// The associated form `(a, b, (b² - d)/4a)` of the primitive part.
    pub fn form(&self, d: i64) -> QuadraticForm {
        QuadraticForm::from_ab(self.a as i64, self.b, d).expect("valid ideal")
    }

    fn basis(&self) -> [(i128, i128); 2] {
        let (n, a, b) = (self.n as i128, self.a as i128, self.b as i128);
        [(2 * n * a, 0), (n * b, n)]
    }

    fn from_lattice(vs: &[(i128, i128)]) -> Self {
        let mut x_gcd = 0i128;
        let mut pivot = (0i128, 0i128);
        for &(vx, vy) in vs {
            if vy == 0 {
                x_gcd = gcd_i128(x_gcd, vx);
                continue;
            }
            let (g, s, t) = xgcd(pivot.1, vy);
            let z = (vy / g) * pivot.0 - (pivot.1 / g) * vx;
            x_gcd = gcd_i128(x_gcd, z);
            pivot = (s * pivot.0 + t * vx, g);
        }
        if pivot.1 < 0 {
            pivot = (-pivot.0, -pivot.1);
        }
        let (big_x, big_y) = (x_gcd.abs(), pivot.1);
        let bx = pivot.0.rem_euclid(big_x);
        debug_assert!(big_x % (2 * big_y) == 0 && bx % big_y == 0);
        let a = big_x / (2 * big_y);
        IdealRep {
            n: big_y as u64,
            a: a as u64,
            b: ((bx / big_y).rem_euclid(2 * a)) as i64,
        }
    }

    pub fn mul(&self, o: &IdealRep, d: i64) -> IdealRep {
        let d = d as i128;
        let mut vs = Vec::with_capacity(4);
        for &(x1, y1) in &self.basis() {
            for &(x2, y2) in &o.basis() {
                vs.push(((x1 * x2 + d * y1 * y2) / 2, (x1 * y2 + x2 * y1) / 2));
            }
        }
        IdealRep::from_lattice(&vs)
    }

    pub fn conj(&self) -> IdealRep {
        IdealRep {
            n: self.n,
            a: self.a,
            b: (-self.b).rem_euclid(2 * self.a as i64),
        }
    }

    /// Whether the norm is coprime to `c`.
    pub fn is_coprime_to(&self, c: u64) -> bool {
        gcd(self.norm(), c) == 1
    }
}

/// Integral ideals of norm at most `bound` whose norm is coprime to `avoid`,
/// ordered by `(norm, n, a, b)`.
pub fn ideals_up_to(d: i64, bound: u64, avoid: u64) -> Vec<IdealRep> {
    let mut out = Vec::new();
    let mut n = 1u64;
    while n * n <= bound {
        if gcd(n, avoid) == 1 {
            for a in 1..=bound / (n * n) {
                if gcd(a, avoid) != 1 {
                    continue;
                }
                let four_a = 4 * a as i64;
                for b in 0..2 * a as i64 {
                    if (b * b - d).rem_euclid(four_a) == 0 {
                        out.push(IdealRep { n, a, b });
                    }
                }
            }
        }
        n += 1;
    }
    out.sort_by_key(|i| (i.norm(), i.n, i.a, i.b));
    out
}

/// The prime ideals above `p` (one for inert or ramified `p`, two for split).
pub fn primes_above(d: i64, p: u64) -> Vec<IdealRep> {
    let four_p = 4 * p as i64;
    let bs: Vec<i64> = (0..2 * p as i64).filter(|b| (b * b - d).rem_euclid(four_p) == 0).collect();
    if bs.is_empty() {
        vec![IdealRep {
            n: p,
            a: 1,
            b: d.rem_euclid(2),
        }]
    } else {
        bs.into_iter().map(|b| IdealRep { n: 1, a: p, b }).collect()
    }
}

type Mat = [[BigInt; 2]; 2];

fn rho_tracked(f: &QuadraticForm, m: &mut Mat) -> QuadraticForm {
    let (g, t) = f.rho();
    for row in m.iter_mut() {
        let c0 = std::mem::take(&mut row[0]);
        let c1 = row[1].clone();
        row[1] = &c1 * t - c0;
        row[0] = c1;
    }
    g
}

fn identity_mat() -> Mat {
    [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]]
}

/// `(u, v)` with `f(u, v) = ±1`, if the form represents a unit.
fn represent_unit(f: &QuadraticForm, d: i64) -> Option<(BigInt, BigInt)> {
    let (a, b) = (f.a as i128, f.b as i128);
    if d < 0 {
        // (2au + bv)² - d v² = 4a
        let dd = -(d as i128);
        let mut v = 0i128;
        while dd * v * v <= 4 * a {
            let r = 4 * a - dd * v * v;
            let s = isqrt(r as u128) as i128;
            if s * s == r {
                for s in [s, -s] {
                    if (s - b * v).rem_euclid(2 * a) == 0 {
                        return Some((BigInt::from((s - b * v) / (2 * a)), BigInt::from(v)));
                    }
                }
            }
            v += 1;
        }
        return None;
    }
    let mut m = identity_mat();
    let mut g = *f;
    while !g.is_reduced() {
        g = rho_tracked(&g, &mut m);
    }
    let start = g;
    loop {
        if g.a.abs() == 1 {
            return Some((m[0][0].clone(), m[1][0].clone()));
        }
        g = rho_tracked(&g, &mut m);
        if g == start {
            return None;
        }
    }
}

/// A generator of the ideal, if it is principal.
pub fn generator(ideal: &IdealRep, d: i64) -> Option<QuadElt> {
    let f = ideal.form(d);
    let (u, v) = represent_unit(&f, d)?;
    let n = BigInt::from(ideal.n);
    let x = (&u * (2 * f.a) + &v * f.b) * &n;
    Some(QuadElt { x, y: v * n })
}

/// Generators of the unit group: `-1`, a root of unity of order 4 or 6
/// when present, and for `d > 0` the fundamental unit found by walking the
/// reduction cycle of the principal form.
pub fn unit_generators(d: i64) -> Vec<QuadElt> {
    let mut gens = vec![QuadElt::from_int(-1)];
    match d {
        -4 => gens.push(QuadElt::new(0, 1)),
        -3 => gens.push(QuadElt::new(1, 1)),
        _ if d > 0 => gens.push(cycle_unit(d)),
        _ => {}
    }
    gens
}

/// The unit `ε > 1` with the smallest `|y|` found between consecutive
/// appearances of `±1` as leading coefficient in the principal cycle.
pub fn cycle_unit(d: i64) -> QuadElt {
    let f = QuadraticForm::principal(d);
    let elt = |m: &Mat| {
        let (u, v) = (&m[0][0], &m[1][0]);
        QuadElt {
            x: u * 2 + v * f.b,
            y: v.clone(),
        }
    };
    let mut m = identity_mat();
    let mut g = f;
    while !(g.is_reduced() && g.a.abs() == 1) {
        g = rho_tracked(&g, &mut m);
    }
    let first = elt(&m);
    g = rho_tracked(&g, &mut m);
    while g.a.abs() != 1 {
        g = rho_tracked(&g, &mut m);
    }
    let second = elt(&m);
    // second / first = second · conj(first) · N(first)
    let mut e = second.mul(&first.conj(), d);
    if first.norm(d).is_negative() {
        e = QuadElt { x: -e.x, y: -e.y };
    }
    let (x, y) = (e.x.abs(), e.y.abs());
    QuadElt { x, y }
}

/// The group `(O/m)^× × {±1}^r` with `r = 2` exactly when `d > 0` and the
/// real places divide the modulus. Elements are indices
/// `unit_index · 2^r + sign_bits`.
#[derive(Clone, Debug)]
pub struct ResidueUnits {
    d: i64,
    m: u64,
    r: u32,
    delta: u64,
    n0: u64,
    units: Vec<(u64, u64)>,
    index: Vec<u32>,
}

impl ResidueUnits {
    pub fn new(d: i64, m: u64, signs: bool) -> Self {
        let r = if signs && d > 0 { 2 } else { 0 };
        let delta = d.rem_euclid(2) as u64;
        let n0 = ((d - delta as i64) / 4).rem_euclid(m as i64) as u64;
        let mut units = Vec::new();
        let mut index = vec![u32::MAX; (m * m) as usize];
        for u in 0..m {
            for v in 0..m {
                // N(u + vω) = u² + δuv - n0 v²
                let norm = (u as i128 * u as i128 + (delta * u * v) as i128 - (n0 as i128) * (v as i128) * (v as i128))
                    .rem_euclid(m as i128) as u64;
                if gcd(norm, m) == 1 {
                    index[(u * m + v) as usize] = units.len() as u32;
                    units.push((u, v));
                }
            }
        }
        ResidueUnits {
            d,
            m,
            r,
            delta,
            n0,
            units,
            index,
        }
    }

    pub fn order(&self) -> usize {
        self.units.len() << self.r
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    pub fn sign_count(&self) -> u32 {
        self.r
    }

    pub fn identity(&self) -> usize {
        (self.index[(1 % self.m * self.m) as usize] as usize) << self.r
    }

    pub fn op(&self, x: usize, y: usize) -> usize {
        let m = self.m;
        let (u1, v1) = self.units[x >> self.r];
        let (u2, v2) = self.units[y >> self.r];
        let u = (u1 * u2 + v1 * v2 % m * self.n0) % m;
        let v = (u1 * v2 + u2 * v1 + v1 * v2 % m * self.delta) % m;
        let sign = (x ^ y) & ((1 << self.r) - 1);
        ((self.index[(u * m + v) as usize] as usize) << self.r) | sign
    }

    /// Index of an element coprime to `m`, or `None` if it is not a unit mod `m`.
    pub fn element(&self, e: &QuadElt) -> Option<usize> {
        let (u, v) = e.residue(self.d, self.m);
        let i = self.index[(u * self.m + v) as usize];
        if i == u32::MAX {
            return None;
        }
        let mut signs = 0;
        if self.r == 2 {
            signs |= (!e.is_positive(self.d)) as usize;
            signs |= (!e.conj().is_positive(self.d) as usize) << 1;
        }
        Some(((i as usize) << self.r) | signs)
    }

    /// Membership mask of the subgroup generated by `gens`.
    pub fn subgroup(&self, gens: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.order()];
        let id = self.identity();
        mask[id] = true;
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.op(x, g);
                if !mask[y] {
                    mask[y] = true;
                    queue.push_back(y);
                }
            }
        }
        mask
    }

    /// Coset labels of the subgroup `h`, numbered by smallest element.
    pub fn coset_labels(&self, h: &[bool]) -> (Vec<u32>, usize) {
        let members: Vec<usize> = (0..self.order()).filter(|&i| h[i]).collect();
        let mut label = vec![u32::MAX; self.order()];
        let mut count = 0;
        for x in 0..self.order() {
            if label[x] != u32::MAX {
                continue;
            }
            for &w in &members {
                label[self.op(x, w)] = count as u32;
            }
            count += 1;
        }
        (label, count)
    }
}
