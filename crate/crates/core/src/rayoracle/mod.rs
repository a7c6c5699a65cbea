//! Ray class groups of quadratic fields by exhaustion over integral ideals.

mod base;
mod persist;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use base::BaseRayGroup;
pub use persist::{cache_path, load_oracle, save_oracle, CACHE_FORMAT};

use crate::arith::{isqrt, Discriminant};
use crate::error::{Error, Result};
use crate::field::{generator, ideals_up_to, primes_above, unit_generators, IdealRep, ResidueUnits};
use crate::group::{mask_size, AbelianGroup, TableGroup};
use crate::modulus::{Modulus, PlaceSet};

/// Limits on oracle construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest ideal norm the doubling loop may reach.
    pub max_norm_bound: u64,
    /// Largest `m_f^2` (size of the residue ring `O/m_f`).
    pub max_residues: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_norm_bound: 1 << 16,
            max_residues: 1 << 20,
        }
    }
}

/// How the submodule `C` of the S-ray class group is specified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubmoduleSpec {
    Trivial,
    TwoTorsion,
    RamifiedGenerated,
    /// Generators given as S-class indices.
    Explicit(Vec<usize>),
}

impl SubmoduleSpec {
    pub fn tag(&self) -> String {
        match self {
            SubmoduleSpec::Trivial => "trivial".into(),
            SubmoduleSpec::TwoTorsion => "two-torsion".into(),
            SubmoduleSpec::RamifiedGenerated => "ramified".into(),
            SubmoduleSpec::Explicit(g) => {
                let g: Vec<String> = g.iter().map(|x| x.to_string()).collect();
                format!("explicit:{}", g.join(";"))
            }
        }
    }
}

/// Which ideals represent the generators of `C` when building `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DChoice {
    /// First representative of the first preimage class.
    Primary,
    /// Second representative of the last preimage class, plus a
    /// nontrivial ray-principal ideal.
    Alternate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub rep: IdealRep,
    pub alt: IdealRep,
    pub first_norm: u64,
}

type Key = (usize, u32);

/// Ray-equivalence keys: ordinary class plus a coset of the unit image in
/// `(O/m)^× × signs`.
#[derive(Clone, Debug)]
struct RayContext {
    d: i64,
    res: ResidueUnits,
    labels: Vec<u32>,
    ord_reps: Vec<IdealRep>,
    ord_conj: Vec<IdealRep>,
}

impl RayContext {
    fn new(d: i64, m: &Modulus, ord_reps: Vec<IdealRep>) -> Self {
        let res = ResidueUnits::new(d, m.m_f, m.infinite);
        let w: Vec<usize> = unit_generators(d)
            .iter()
            .map(|u| res.element(u).expect("units are invertible"))
            .collect();
        let (labels, _) = res.coset_labels(&res.subgroup(&w));
        let ord_conj = ord_reps.iter().map(|r| r.conj()).collect();
        RayContext {
            d,
            res,
            labels,
            ord_reps,
            ord_conj,
        }
    }

    fn key(&self, ideal: &IdealRep) -> Option<Key> {
        for (k, rc) in self.ord_conj.iter().enumerate() {
            if let Some(beta) = generator(&ideal.mul(rc, self.d), self.d) {
                let e = self.res.element(&beta).expect("coprime to m");
                return Some((k, self.labels[e]));
            }
        }
        None
    }

    fn key_or_extend(&mut self, ideal: &IdealRep) -> Key {
        if let Some(k) = self.key(ideal) {
            return k;
        }
        self.ord_reps.push(*ideal);
        self.ord_conj.push(ideal.conj());
        self.key(ideal).expect("new representative is its own class")
    }
}

/// The S-ray class group `Cl^m_{K,S}` of `K = Q(√d)` with its Galois action.
#[derive(Clone, Debug)]
pub struct RayClassOracle {
    d: Discriminant,
    m: Modulus,
    s: PlaceSet,
    bound: u64,
    classes: Vec<ClassRecord>,
    group: TableGroup,
    sigma: Vec<usize>,
    s_prime_classes: Vec<usize>,
    ramified_classes: Vec<usize>,
    ctx: RayContext,
    class_index: HashMap<Key, usize>,
    s_group: TableGroup,
    s_proj: Vec<usize>,
    s_sigma: Vec<usize>,
    base: BaseRayGroup,
    norm_to_base: Vec<usize>,
}

/// Starting bound for the doubling loop.
pub fn initial_bound(d: &Discriminant, m: &Modulus) -> u64 {
    (isqrt(d.value().unsigned_abs() as u128) as u64 + 1) * m.m_f * 4
}

pub fn build_oracle(
    d: &Discriminant,
    m: &Modulus,
    s: &PlaceSet,
    norm_bound: Option<u64>,
    budget: &Budget,
) -> Result<RayClassOracle> {
    s.check_disjoint(m)?;
    if m.m_f.saturating_mul(m.m_f) > budget.max_residues {
        return Err(Error::Budget(format!(
            "residue ring of size {}^2 exceeds {}",
            m.m_f, budget.max_residues
        )));
    }
    let dv = d.value();
    let avoid = s.primes().iter().fold(m.m_f, |acc, &p| acc * p);
    let mut bound = norm_bound.unwrap_or_else(|| initial_bound(d, m)).max(1);
    loop {
        let big = bound * 2;
        if big > budget.max_norm_bound {
            return Err(Error::Budget(format!(
                "norm bound {big} exceeds {} for d={dv}, m={m}",
                budget.max_norm_bound
            )));
        }
        let mut ctx = RayContext::new(dv, m, vec![IdealRep::unit(dv)]);
        let mut class_index: HashMap<Key, usize> = HashMap::new();
        let mut classes: Vec<ClassRecord> = Vec::new();
        for ideal in ideals_up_to(dv, big, avoid) {
            let key = ctx.key_or_extend(&ideal);
            match class_index.get(&key) {
                Some(&i) => {
                    let rec = &mut classes[i];
                    if rec.alt == rec.rep {
                        rec.alt = ideal;
                    }
                }
                None => {
                    class_index.insert(key, classes.len());
                    classes.push(ClassRecord {
                        rep: ideal,
                        alt: ideal,
                        first_norm: ideal.norm(),
                    });
                }
            }
        }
        if classes.iter().any(|c| c.first_norm > bound) {
            bound = big;
            continue;
        }
        let lookup = |ideal: &IdealRep| ctx.key(ideal).and_then(|k| class_index.get(&k).copied());
        let n = classes.len();
        let mut table = vec![0u32; n * n];
        let mut closed = true;
        'table: for i in 0..n {
            for j in i..n {
                match lookup(&classes[i].rep.mul(&classes[j].rep, dv)) {
                    Some(k) => {
                        table[i * n + j] = k as u32;
                        table[j * n + i] = k as u32;
                    }
                    None => {
                        closed = false;
                        break 'table;
                    }
                }
            }
        }
        let sigma: Option<Vec<usize>> = classes.iter().map(|c| lookup(&c.rep.conj())).collect();
        let s_prime_classes: Option<Vec<usize>> = s
            .primes()
            .iter()
            .flat_map(|&p| primes_above(dv, p))
            .map(|q| lookup(&q))
            .collect();
        let ramified_classes: Option<Vec<usize>> = d
            .ramified_primes()
            .iter()
            .filter(|&&p| m.m_f % p != 0)
            .flat_map(|&p| primes_above(dv, p))
            .map(|q| lookup(&q))
            .collect();
        let (Some(sigma), Some(s_prime_classes), Some(ramified_classes), true) =
            (sigma, s_prime_classes, ramified_classes, closed)
        else {
            bound = big;
            continue;
        };
        let group = TableGroup::from_table(n, 0, table);
        return RayClassOracle::assemble(
            d.clone(),
            *m,
            s.clone(),
            bound,
            classes,
            group,
            sigma,
            s_prime_classes,
            ramified_classes,
            ctx.ord_reps,
        );
    }
}

impl RayClassOracle {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        d: Discriminant,
        m: Modulus,
        s: PlaceSet,
        bound: u64,
        classes: Vec<ClassRecord>,
        group: TableGroup,
        sigma: Vec<usize>,
        s_prime_classes: Vec<usize>,
        ramified_classes: Vec<usize>,
        ord_reps: Vec<IdealRep>,
    ) -> Result<Self> {
        let dv = d.value();
        let ctx = RayContext::new(dv, &m, ord_reps);
        let mut class_index = HashMap::new();
        for (i, c) in classes.iter().enumerate() {
            let key = ctx
                .key(&c.rep)
                .ok_or_else(|| Error::Cache("representative outside the recorded classes".into()))?;
            if class_index.insert(key, i).is_some() {
                return Err(Error::Cache("two recorded classes coincide".into()));
            }
        }
        let (s_group, s_proj) = group.quotient(&group.subgroup(&s_prime_classes));
        let mut s_sigma = vec![0; s_group.order()];
        for (i, &x) in sigma.iter().enumerate() {
            s_sigma[s_proj[i]] = s_proj[x];
        }
        let base = BaseRayGroup::new(&m, &s)?;
        let norm_to_base = classes
            .iter()
            .map(|c| base.class_of_integer(c.rep.norm() as i64).expect("coprime to m"))
            .collect();
        Ok(RayClassOracle {
            d,
            m,
            s,
            bound,
            classes,
            group,
            sigma,
            s_prime_classes,
            ramified_classes,
            ctx,
            class_index,
            s_group,
            s_proj,
            s_sigma,
            base,
            norm_to_base,
        })
    }

    pub fn discriminant(&self) -> &Discriminant {
        &self.d
    }

    pub fn modulus(&self) -> &Modulus {
        &self.m
    }

    pub fn places(&self) -> &PlaceSet {
        &self.s
    }

    /// The norm bound at which the class list was certified by doubling.
    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Classes of `Cl^m_K` (before the S-quotient).
    pub fn classes(&self) -> &[ClassRecord] {
        &self.classes
    }

    /// `Cl^m_K` with its Cayley table.
    pub fn ray_group(&self) -> &TableGroup {
        &self.group
    }

    /// Galois action on `Cl^m_K`.
    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    /// `Cl^m_{K,S}`.
    pub fn s_group(&self) -> &TableGroup {
        &self.s_group
    }

    pub fn s_sigma(&self) -> &[usize] {
        &self.s_sigma
    }

    /// Projection `Cl^m_K -> Cl^m_{K,S}`.
    pub fn s_projection(&self) -> &[usize] {
        &self.s_proj
    }

    pub fn s_prime_classes(&self) -> &[usize] {
        &self.s_prime_classes
    }

    pub fn ramified_classes(&self) -> &[usize] {
        &self.ramified_classes
    }

    pub(crate) fn ordinary_reps(&self) -> &[IdealRep] {
        &self.ctx.ord_reps
    }

    /// `|Cl^m_{K,S}|`.
    pub fn order(&self) -> usize {
        self.s_group.order()
    }

    pub fn base(&self) -> &BaseRayGroup {
        &self.base
    }

    /// Base-field class of the norm of each class of `Cl^m_K`.
    pub fn norm_to_base(&self) -> &[usize] {
        &self.norm_to_base
    }

    /// Class of `Cl^m_K` containing the ideal, if it is coprime to `m_f`
    /// and its class was met during construction.
    pub fn class_of(&self, ideal: &IdealRep) -> Option<usize> {
        if !ideal.is_coprime_to(self.m.m_f) {
            return None;
        }
        self.ctx.key(ideal).and_then(|k| self.class_index.get(&k).copied())
    }

    /// Whether `I·J^{-1}` is principal with a generator in `K^m`, up to S-units.
    pub fn ray_principal_test(&self, i: &IdealRep, j: &IdealRep) -> Result<bool> {
        let avoid = self.s.primes().iter().fold(self.m.m_f, |acc, &p| acc * p);
        if !i.is_coprime_to(avoid) || !j.is_coprime_to(avoid) {
            return Err(Error::Precondition("ideals must be coprime to m_f and S".into()));
        }
        match (self.class_of(i), self.class_of(j)) {
            (Some(a), Some(b)) => Ok(self.s_proj[a] == self.s_proj[b]),
            _ => Err(Error::Precondition("ideal class outside the oracle".into())),
        }
    }

    /// Membership mask of `C` inside `Cl^m_{K,S}`.
    pub fn submodule_mask(&self, spec: &SubmoduleSpec) -> Result<Vec<bool>> {
        let g = &self.s_group;
        let gens: Vec<usize> = match spec {
            SubmoduleSpec::Trivial => vec![],
            SubmoduleSpec::TwoTorsion => (0..g.order()).filter(|&x| g.op(x, x) == g.identity()).collect(),
            SubmoduleSpec::RamifiedGenerated => self.ramified_classes.iter().map(|&i| self.s_proj[i]).collect(),
            SubmoduleSpec::Explicit(v) => {
                if let Some(&bad) = v.iter().find(|&&x| x >= g.order()) {
                    return Err(Error::Domain(format!("class index {bad} out of range")));
                }
                v.clone()
            }
        };
        let mask = g.subgroup(&gens);
        if gens.iter().any(|&x| !mask[self.s_sigma[x]]) {
            return Err(Error::NotGaloisStable);
        }
        Ok(mask)
    }

    /// `|(Cl^m_{K,S}/C)^G|`.
    pub fn ambiguous_count(&self, spec: &SubmoduleSpec) -> Result<usize> {
        let mask = self.submodule_mask(spec)?;
        let (q, proj) = self.s_group.quotient(&mask);
        let mut sigma_q = vec![usize::MAX; q.order()];
        for x in 0..self.s_group.order() {
            sigma_q[proj[x]] = proj[self.s_sigma[x]];
        }
        Ok((0..q.order()).filter(|&y| sigma_q[y] == y).count())
    }

    /// `N(C)` as a membership mask on `Cl^m_{Q,S}`.
    pub fn norm_submodule(&self, spec: &SubmoduleSpec) -> Result<Vec<bool>> {
        let mask = self.submodule_mask(spec)?;
        let mut image = Vec::new();
        for (i, &c) in self.s_proj.iter().enumerate() {
            if mask[c] {
                image.push(self.norm_to_base[i]);
            }
        }
        image.sort_unstable();
        image.dedup();
        Ok(self.base.subgroup(&image))
    }

    /// `|Cl^m_{Q,S} / N(C)|`.
    pub fn base_quotient_order(&self, spec: &SubmoduleSpec) -> Result<usize> {
        let n = self.norm_submodule(spec)?;
        Ok(self.base.order() / mask_size(&n))
    }

    /// Ideals generating a group `D` whose image in `Cl^m_{K,S}` is `C`.
    pub fn d_generators(&self, spec: &SubmoduleSpec, choice: DChoice) -> Result<Vec<IdealRep>> {
        let mask = self.submodule_mask(spec)?;
        let g = &self.s_group;
        let mut gens: Vec<usize> = Vec::new();
        let mut span = g.subgroup(&[]);
        for x in 0..g.order() {
            if mask[x] && !span[x] {
                gens.push(x);
                span = g.subgroup(&gens);
            }
        }
        let mut out = Vec::new();
        for c in gens {
            let pre: Vec<usize> = (0..self.classes.len()).filter(|&i| self.s_proj[i] == c).collect();
            out.push(match choice {
                DChoice::Primary => self.classes[pre[0]].rep,
                DChoice::Alternate => self.classes[*pre.last().expect("nonempty fibre")].alt,
            });
        }
        if choice == DChoice::Alternate && self.classes[0].alt != self.classes[0].rep {
            out.push(self.classes[0].alt);
        }
        Ok(out)
    }

    /// Group-law, Galois and norm-compatibility checks.
    pub fn self_check(&self) -> Result<()> {
        let sample = if self.group.order() > 100 { Some(20_000) } else { None };
        self.group
            .check_axioms(sample)
            .map_err(|e| Error::FormulaViolation(format!("ray class group: {e}")))?;
        let n = self.group.order();
        for x in 0..n {
            if self.sigma[self.sigma[x]] != x {
                return Err(Error::FormulaViolation("sigma is not an involution".into()));
            }
            for y in 0..n {
                if self.sigma[self.group.op(x, y)] != self.group.op(self.sigma[x], self.sigma[y]) {
                    return Err(Error::FormulaViolation("sigma is not a homomorphism".into()));
                }
            }
            // x·σ(x) is the extension of the norm class; its norm is N(x)^2.
            let xs = self.group.op(x, self.sigma[x]);
            let base_sq = self.base.op(self.norm_to_base[x], self.norm_to_base[x]);
            if self.norm_to_base[xs] != base_sq {
                return Err(Error::FormulaViolation("norm map is not compatible".into()));
            }
            let ext = self.class_of(&IdealRep {
                n: self.classes[x].rep.norm(),
                a: 1,
                b: self.d.value().rem_euclid(2),
            });
            if ext != Some(xs) {
                return Err(Error::FormulaViolation("x·σ(x) differs from the extended norm".into()));
            }
        }
        Ok(())
    }
}
