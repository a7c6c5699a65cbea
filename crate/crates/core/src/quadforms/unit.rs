use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{isqrt, Discriminant};
use crate::error::{Error, Result};

/// The fundamental unit `ε > 1` of a real quadratic field.
///
/// `ε = (x + y√d)/2` when `d ≡ 1 mod 4`, otherwise `ε = x + y√(d/4)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalUnit {
    pub d: i64,
    pub x: BigInt,
    pub y: BigInt,
    pub norm: i8,
}

impl FundamentalUnit {
    /// Coordinates `(u, v)` with `ε = (u + v√d)/2` for every `d`.
    pub fn half_coords(&self) -> (BigInt, BigInt) {
        if self.d % 4 == 0 {
            (&self.x * 2, self.y.clone())
        } else {
            (self.x.clone(), self.y.clone())
        }
    }
}

/// Continued-fraction expansion of `ω`, stopping at the first convergent
/// `p/q` with `N(p - q ω̄) = ±1`.
pub fn fundamental_unit(d: &Discriminant) -> Result<FundamentalUnit> {
    let dv = d.value();
    if dv <= 0 {
        return Err(Error::Domain(format!("{dv} is not a real discriminant")));
    }
    let big_d = dv as i128;
    let s = isqrt(dv as u128) as i128;
    // ω = (P + √d)/Q with trace t and norm n.
    let (t, n): (i64, i64) = if dv % 4 == 1 { (1, (1 - dv) / 4) } else { (0, -dv / 4) };
    let (mut big_p, mut big_q) = (t as i128, 2i128);
    let (mut p_prev, mut p_cur) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q_cur) = (BigInt::one(), BigInt::zero());
    loop {
        let a = (big_p + s).div_euclid(big_q);
        let p_next = &p_cur * a + &p_prev;
        let q_next = &q_cur * a + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        let norm = &p_cur * &p_cur - &p_cur * &q_cur * t + &q_cur * &q_cur * n;
        if norm.is_one() || norm == -BigInt::one() {
            let norm = if norm.is_one() { 1 } else { -1 };
            let (x, y) = if t == 1 {
                (&p_cur * 2 - &q_cur, q_cur)
            } else {
                (p_cur, q_cur)
            };
            return Ok(FundamentalUnit { d: dv, x, y, norm });
        }
        big_p = a * big_q - big_p;
        big_q = (big_d - big_p * big_p) / big_q;
    }
}
