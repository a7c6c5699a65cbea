use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::form::{all_reduced, compose_raw, enumerate_reduced, QuadraticForm};
use super::unit::fundamental_unit;
use crate::arith::{kronecker, Discriminant};
use crate::group::{mask_size, AbelianGroup, TableGroup};
use crate::modulus::PlaceSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnitNorm {
    Minus,
    Plus,
    NotApplicable,
}

/// Class-group invariants of a fundamental discriminant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupSummary {
    pub d: i64,
    pub h_plus: usize,
    pub h: usize,
    pub two_torsion_plus: usize,
    pub four_torsion_plus: usize,
    pub two_torsion: usize,
    pub unit_norm: UnitNorm,
}

/// Orders and 2-torsion of `Cl^+_{K,S}` and `Cl_{K,S}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SClassCounts {
    pub narrow_order: usize,
    pub narrow_two_torsion: usize,
    pub order: usize,
    pub two_torsion: usize,
}

/// The narrow class of a prime ideal above `p`, or the marker for an inert
/// prime (whose ideal `pO` is principal).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeClass {
    Form(QuadraticForm),
    Inert,
}

/// Narrow class group of binary quadratic forms, with an explicit Cayley table.
#[derive(Clone, Debug)]
pub struct FormClassGroup {
    d: i64,
    reps: Vec<QuadraticForm>,
    lookup: HashMap<QuadraticForm, usize>,
    group: TableGroup,
}

impl FormClassGroup {
    pub fn new(d: &Discriminant) -> Self {
        let dv = d.value();
        let mut reps = enumerate_reduced(dv);
        let principal = QuadraticForm::principal(dv).canonical();
        let pos = reps.iter().position(|f| *f == principal).expect("principal class");
        reps.swap(0, pos);
        let mut lookup = HashMap::new();
        if dv < 0 {
            for (i, f) in reps.iter().enumerate() {
                lookup.insert(*f, i);
            }
        } else {
            let index: HashMap<QuadraticForm, usize> =
                reps.iter().enumerate().map(|(i, f)| (*f, i)).collect();
            for f in all_reduced(dv) {
                lookup.insert(f, index[&f.canonical()]);
            }
        }
        let n = reps.len();
        let mut table = vec![0u32; n * n];
        for i in 0..n {
            for j in i..n {
                let k = lookup[&compose_raw(&reps[i], &reps[j]).reduce()] as u32;
                table[i * n + j] = k;
                table[j * n + i] = k;
            }
        }
        FormClassGroup {
            d: dv,
            reps,
            lookup,
            group: TableGroup::from_table(n, 0, table),
        }
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    pub fn reps(&self) -> &[QuadraticForm] {
        &self.reps
    }

    pub fn table(&self) -> &TableGroup {
        &self.group
    }

    /// Class index of any primitive form of this discriminant.
    pub fn class_of(&self, f: &QuadraticForm) -> usize {
        let f = if f.a < 0 && self.d < 0 {
            QuadraticForm::new(-f.a, -f.b, -f.c)
        } else {
            *f
        };
        self.lookup[&f.reduce()]
    }

    /// The class of `(-1, b, .)`: trivial iff the fundamental unit has norm
    /// `-1` (or `d < 0`). It generates the kernel of `Cl^+ -> Cl`.
    pub fn negative_principal_class(&self) -> usize {
        if self.d < 0 {
            return self.identity();
        }
        let p = QuadraticForm::principal(self.d);
        self.class_of(&QuadraticForm::new(-p.a, p.b, -p.c))
    }

    /// The ordinary class group `Cl = Cl^+ / <negative principal class>`,
    /// with the projection from narrow class indices.
    pub fn ordinary(&self) -> (TableGroup, Vec<usize>) {
        let h = self.subgroup(&[self.negative_principal_class()]);
        self.group.quotient(&h)
    }

    /// Narrow class of the primes above `p` (`None` when `p` is inert).
    pub fn prime_class(&self, p: u64) -> Option<usize> {
        match prime_to_class(p, self.d) {
            PrimeClass::Form(f) => Some(self.class_of(&f)),
            PrimeClass::Inert => None,
        }
    }

    /// Subgroup generated by the ramified prime classes.
    pub fn ramified_subgroup(&self, d: &Discriminant) -> Vec<bool> {
        let gens: Vec<usize> = d.ramified_primes().iter().filter_map(|&p| self.prime_class(p)).collect();
        self.subgroup(&gens)
    }

    pub fn two_torsion_mask(&self) -> Vec<bool> {
        (0..self.order()).map(|x| self.op(x, x) == self.identity()).collect()
    }
}

impl AbelianGroup for FormClassGroup {
    fn order(&self) -> usize {
        self.group.order()
    }

    fn identity(&self) -> usize {
        0
    }

    fn op(&self, x: usize, y: usize) -> usize {
        self.group.op(x, y)
    }
}

/// Smallest `b >= 0` with `b^2 = d mod 4p`, giving the form `(p, b, .)`.
pub fn prime_to_class(p: u64, d: i64) -> PrimeClass {
    if kronecker(d, p as i64).unwrap_or(0) == -1 {
        return PrimeClass::Inert;
    }
    let p = p as i64;
    let b = (0..2 * p)
        .find(|b| (b * b - d).rem_euclid(4 * p) == 0)
        .expect("p is split or ramified");
    let f = QuadraticForm::from_ab(p, b, d).expect("b^2 = d mod 4p");
    PrimeClass::Form(f.canonical())
}

fn two_torsion_count<G: AbelianGroup>(g: &G) -> usize {
    g.count_squares_into(None)
}

pub fn class_group_summary(d: &Discriminant) -> ClassGroupSummary {
    summary_of(d, &FormClassGroup::new(d))
}

pub fn summary_of(d: &Discriminant, g: &FormClassGroup) -> ClassGroupSummary {
    let two_plus = g.two_torsion_mask();
    let (ordinary, _) = g.ordinary();
    let unit_norm = if d.value() < 0 {
        UnitNorm::NotApplicable
    } else if ordinary.order() == g.order() {
        UnitNorm::Minus
    } else {
        UnitNorm::Plus
    };
    ClassGroupSummary {
        d: d.value(),
        h_plus: g.order(),
        h: ordinary.order(),
        two_torsion_plus: mask_size(&two_plus),
        four_torsion_plus: g.count_squares_into(Some(&two_plus)),
        two_torsion: two_torsion_count(&ordinary),
        unit_norm,
    }
}

pub fn s_class_counts(d: &Discriminant, s: &PlaceSet) -> SClassCounts {
    s_class_counts_of(&FormClassGroup::new(d), s)
}

pub fn s_class_counts_of(g: &FormClassGroup, s: &PlaceSet) -> SClassCounts {
    let gens: Vec<usize> = s.primes().iter().filter_map(|&p| g.prime_class(p)).collect();
    let (narrow_q, _) = g.table().quotient(&g.subgroup(&gens));
    let (ordinary, proj) = g.ordinary();
    let ord_gens: Vec<usize> = gens.iter().map(|&x| proj[x]).collect();
    let (ord_q, _) = ordinary.quotient(&ordinary.subgroup(&ord_gens));
    SClassCounts {
        narrow_order: narrow_q.order(),
        narrow_two_torsion: two_torsion_count(&narrow_q),
        order: ord_q.order(),
        two_torsion: two_torsion_count(&ord_q),
    }
}

/// Unit norm read off the continued-fraction unit, for cross-checks.
pub fn unit_norm_from_cf(d: &Discriminant) -> UnitNorm {
    if d.value() < 0 {
        UnitNorm::NotApplicable
    } else if fundamental_unit(d).expect("real discriminant").norm < 0 {
        UnitNorm::Minus
    } else {
        UnitNorm::Plus
    }
}
