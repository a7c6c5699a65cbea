use crate::arith::gcd;
use crate::error::Result;
use crate::group::{quotient_by, AbelianGroup, TableGroup};
use crate::modulus::{Modulus, PlaceSet};

/// `Cl^m_{Q,S} = ((Z/m_f)^× × {±1}^[m_inf]) / <-1, S>`, built directly.
#[derive(Clone, Debug)]
pub struct BaseRayGroup {
    m: Modulus,
    units: Vec<u64>,
    index: Vec<u32>,
    r: u32,
    group: TableGroup,
    proj: Vec<usize>,
}

impl BaseRayGroup {
    pub fn new(m: &Modulus, s: &PlaceSet) -> Result<Self> {
        s.check_disjoint(m)?;
        let mf = m.m_f;
        let mut units = Vec::new();
        let mut index = vec![u32::MAX; mf as usize];
        for x in 0..mf {
            if gcd(x, mf) == 1 {
                index[x as usize] = units.len() as u32;
                units.push(x);
            }
        }
        let r = m.infinite as u32;
        let n = units.len() << r;
        let elem = |x: i64| -> usize {
            let res = x.rem_euclid(mf as i64) as usize;
            ((index[res] as usize) << r) | (r as usize & (x < 0) as usize)
        };
        let mut gens = vec![elem(-1)];
        gens.extend(s.primes().iter().map(|&p| elem(p as i64)));
        let op = |a: usize, b: usize| -> usize {
            let (x, y) = (units[a >> r], units[b >> r]);
            let prod = (x * y % mf) as usize;
            ((index[prod] as usize) << r) | ((a ^ b) & ((1 << r) - 1))
        };
        let identity = elem(1);
        let (group, proj) = quotient_by(n, identity, op, &gens);
        Ok(BaseRayGroup {
            m: *m,
            units,
            index,
            r,
            group,
            proj,
        })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.m
    }

    pub fn group(&self) -> &TableGroup {
        &self.group
    }

    /// `|(Z/m_f)^× × {±1}^[m_inf]|`.
    pub fn full_order(&self) -> usize {
        self.units.len() << self.r
    }

    /// Class of the principal ideal `(x)`, for `x` coprime to `m_f`.
    pub fn class_of_integer(&self, x: i64) -> Option<usize> {
        let mf = self.m.m_f as i64;
        let i = self.index[x.rem_euclid(mf) as usize];
        if i == u32::MAX || x == 0 {
            return None;
        }
        let e = ((i as usize) << self.r) | (self.r as usize & (x < 0) as usize);
        Some(self.proj[e])
    }
}

impl AbelianGroup for BaseRayGroup {
    fn order(&self) -> usize {
        self.group.order()
    }

    fn identity(&self) -> usize {
        self.group.identity()
    }

    fn op(&self, x: usize, y: usize) -> usize {
        self.group.op(x, y)
    }
}
