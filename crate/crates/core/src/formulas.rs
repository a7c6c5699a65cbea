//! Right-hand sides of the ambiguous class number formula and its
//! specializations, Rédei matrices, and ray class numbers from units.

use std::collections::HashMap;
use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd, kronecker, mod_inverse, Discriminant};
use crate::error::{Error, Result};
use crate::f2::{f2_rank, F2Matrix};
use crate::field::{generator, primes_above, unit_generators, IdealRep, QuadElt, ResidueUnits};
use crate::group::AbelianGroup;
use crate::hilbert::{hilbert_symbol, log_sign, LocalNormGroup, Place};
use crate::modulus::{Modulus, PlaceSet};
use crate::quadforms::{s_class_counts_of, FormClassGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingData {
    pub v: Place,
    pub e: u32,
    pub f: u32,
}

/// Ramification index and inertia degree of `v` in `Q(sqrt d)`. The real
/// place counts as ramified when it becomes complex.
pub fn splitting(d: &Discriminant, v: Place) -> SplittingData {
    let (e, f) = match v {
        Place::RealInfinite if d.value() < 0 => (2, 1),
        Place::RealInfinite => (1, 1),
        Place::Finite(p) if d.is_ramified(p) => (2, 1),
        Place::Finite(p) => match kronecker(d.value(), p as i64).expect("p is a prime") {
            1 => (1, 1),
            _ => (1, 2),
        },
    };
    SplittingData { v, e, f }
}

/// `R = (log (p_i, d)_{p_j})` over the ramified primes `p_1 < ... < p_t`.
pub fn redei_matrix(d: &Discriminant) -> F2Matrix {
    let ps = d.ramified_primes();
    let mut r = F2Matrix::zeros(ps.len(), ps.len());
    for (i, &pi) in ps.iter().enumerate() {
        for (j, &pj) in ps.iter().enumerate() {
            r.set(i, j, log_sign(hilbert_symbol(pi as i64, d.value(), Place::Finite(pj))));
        }
    }
    r
}

/// `t - 1 - rank(R)`.
pub fn redei_four_rank(d: &Discriminant) -> u32 {
    d.t() - 1 - f2_rank(&redei_matrix(d)) as u32
}

/// The group `Z^g -> (Z/m_f)^× × {±1}^[m_inf]`, as residue/sign pairs.
#[derive(Clone, Copy, Debug)]
struct RayTarget {
    m_f: u64,
    signs: bool,
}

type TargetElt = (u64, bool);

impl RayTarget {
    fn new(m: &Modulus) -> Self {
        RayTarget {
            m_f: m.m_f,
            signs: m.infinite,
        }
    }

    fn image(&self, x: i64) -> TargetElt {
        (x.rem_euclid(self.m_f as i64) as u64, self.signs && x < 0)
    }

    fn identity(&self) -> TargetElt {
        (1 % self.m_f, false)
    }

    fn op(&self, a: TargetElt, b: TargetElt) -> TargetElt {
        ((a.0 as u128 * b.0 as u128 % self.m_f as u128) as u64, a.1 ^ b.1)
    }

    /// Schreier generators of the kernel of `e_i -> image(gens[i])`, plus
    /// the size of the image.
    fn kernel(&self, gens: &[i64]) -> (Vec<Vec<i64>>, usize) {
        let imgs: Vec<TargetElt> = gens.iter().map(|&g| self.image(g)).collect();
        let id = self.identity();
        let mut words: HashMap<TargetElt, Vec<i64>> = HashMap::from([(id, vec![0; gens.len()])]);
        let mut queue = VecDeque::from([id]);
        let mut order = Vec::new();
        while let Some(h) = queue.pop_front() {
            order.push(h);
            for (i, &g) in imgs.iter().enumerate() {
                let y = self.op(h, g);
                if !words.contains_key(&y) {
                    let mut w = words[&h].clone();
                    w[i] += 1;
                    words.insert(y, w);
                    queue.push_back(y);
                }
            }
        }
        let mut basis: Vec<Vec<i64>> = Vec::new();
        for h in &order {
            for (i, &g) in imgs.iter().enumerate() {
                let w = &words[&self.op(*h, g)];
                let mut v = words[h].clone();
                v[i] += 1;
                for (a, b) in v.iter_mut().zip(w) {
                    *a -= b;
                }
                if v.iter().any(|&x| x != 0) && !basis.contains(&v) {
                    basis.push(v);
                }
            }
        }
        (basis, order.len())
    }
}

/// `Λ = {x ∈ Q^m : (x) ∈ <N(D), S>}`, given by raw generators and a basis of
/// exponent vectors cutting out the congruence and sign conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaGroup {
    pub generators: Vec<i64>,
    pub congruence_kernel_basis: Vec<Vec<i64>>,
}

impl LambdaGroup {
    /// `∏ g_i^{v_i}` modulo `n` (the generators must be prime to `n`).
    pub fn residue(&self, v: &[i64], n: u64) -> Result<u64> {
        let n128 = n as i128;
        let mut acc: i128 = 1 % n128;
        for (&g, &e) in self.generators.iter().zip(v) {
            let mut base = g.rem_euclid(n as i64) as i128;
            if e < 0 {
                base = mod_inverse(base, n128)
                    .ok_or_else(|| Error::Precondition(format!("{g} is not invertible mod {n}")))?;
            }
            for _ in 0..e.unsigned_abs() {
                acc = acc * base % n128;
            }
        }
        Ok(acc as u64)
    }

    /// Sign of `∏ g_i^{v_i}`.
    pub fn is_negative(&self, v: &[i64]) -> bool {
        self.generators
            .iter()
            .zip(v)
            .filter(|(&g, &e)| g < 0 && e % 2 != 0)
            .count()
            % 2
            == 1
    }
}

/// Builds `Λ` over Q from `-1`, the finite primes of `S` and the norms of
/// the ideals generating `D`.
pub fn lambda_group(m: &Modulus, s: &PlaceSet, d_norms: &[u64]) -> Result<LambdaGroup> {
    s.check_disjoint(m)?;
    let mut generators: Vec<i64> = vec![-1];
    generators.extend(s.primes().iter().map(|&p| p as i64));
    for &n in d_norms {
        if n == 0 || gcd(n, m.m_f) != 1 {
            return Err(Error::Precondition(format!("norm {n} is not prime to m_f = {}", m.m_f)));
        }
        generators.push(n as i64);
    }
    let (congruence_kernel_basis, _) = RayTarget::new(m).kernel(&generators);
    Ok(LambdaGroup {
        generators,
        congruence_kernel_basis,
    })
}

fn primes_of(n: i64) -> Vec<u64> {
    factorize(n).map(|f| f.primes().collect()).unwrap_or_default()
}

/// `[Λ : Λ ∩ N(K^m)]`, as `2^rank` of the local symbol matrix.
pub fn lambda_norm_index(l: &LambdaGroup, d: &Discriminant, m: &Modulus) -> Result<u64> {
    let mut finite: Vec<u64> = vec![2];
    finite.extend_from_slice(d.ramified_primes());
    for &g in &l.generators {
        finite.extend(primes_of(g));
    }
    finite.sort_unstable();
    finite.dedup();
    finite.retain(|&p| !m.divides_prime(p));
    let mut places: Vec<Place> = finite.into_iter().map(Place::Finite).collect();
    if !m.infinite {
        places.push(Place::RealInfinite);
    }
    let symbols: Vec<Vec<bool>> = l
        .generators
        .iter()
        .map(|&g| places.iter().map(|&v| log_sign(hilbert_symbol(g, d.value(), v))).collect())
        .collect();
    let locals: Vec<std::sync::Arc<LocalNormGroup>> = m
        .prime_powers()
        .into_iter()
        .map(|(p, e)| LocalNormGroup::cached(d, p, e))
        .collect::<Result<_>>()?;
    let cols = places.len() + locals.iter().map(|g| g.rank()).sum::<usize>();
    let mut rows = Vec::with_capacity(l.congruence_kernel_basis.len());
    for v in &l.congruence_kernel_basis {
        let mut row = vec![false; places.len()];
        for (g, &e) in v.iter().enumerate() {
            if e % 2 != 0 {
                for (bit, &s) in row.iter_mut().zip(&symbols[g]) {
                    *bit ^= s;
                }
            }
        }
        for local in &locals {
            row.extend(local.coordinates_of_residue(l.residue(v, local.modulus())?)?);
        }
        rows.push(row);
    }
    let rank = f2_rank(&F2Matrix::from_rows(cols, &rows));
    Ok(1u64 << rank)
}

/// Every factor of the assembled right-hand side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrasBreakdown {
    /// `∏_{v ∈ S \ S(m)} e_v f_v`.
    pub s_factor: u64,
    /// `∏_{p | m_f} [1 + m Z_p : N(1 + m O_w)]`.
    pub modulus_factor: u64,
    /// `∏_{v ∉ S ∪ S(m)} e_v`.
    pub ramified_factor: u64,
    pub lambda_index: u64,
    /// `|Cl^m_{Q,S} / N(C)|`.
    pub base_quotient_order: u64,
    /// `s_factor · modulus_factor · ramified_factor`.
    pub numerator: u64,
    /// `2 · lambda_index`.
    pub denominator: u64,
    /// `base_quotient_order · numerator / denominator`.
    pub rhs: u64,
}

/// The predicted `|(Cl^m_{K,S}/C)^G|`, where `C` is the image of the ideals
/// whose norms are `d_norms`. The ratio alone may be fractional when `m_f`
/// meets `d`; a non-integral product with the base quotient is a formula
/// violation.
pub fn gras_rhs(
    d: &Discriminant,
    m: &Modulus,
    s: &PlaceSet,
    d_norms: &[u64],
    base_quotient_order: u64,
) -> Result<GrasBreakdown> {
    let lambda = lambda_group(m, s, d_norms)?;
    let lambda_index = lambda_norm_index(&lambda, d, m)?;
    let ef = |v| {
        let sp = splitting(d, v);
        (sp.e * sp.f) as u64
    };
    let mut s_factor: u64 = s.primes().iter().map(|&p| ef(Place::Finite(p))).product();
    if !m.infinite {
        s_factor *= ef(Place::RealInfinite);
    }
    let modulus_factor = m
        .prime_powers()
        .into_iter()
        .map(|(p, e)| Ok(LocalNormGroup::cached(d, p, e)?.index()))
        .product::<Result<u64>>()?;
    let ramified_factor: u64 = d
        .ramified_primes()
        .iter()
        .filter(|&&p| !s.contains(p) && !m.divides_prime(p))
        .map(|_| 2)
        .product();
    let numerator = s_factor * modulus_factor * ramified_factor;
    let denominator = 2 * lambda_index;
    let total = base_quotient_order * numerator;
    if total % denominator != 0 {
        return Err(Error::FormulaViolation(format!(
            "non-integral right-hand side {total}/{denominator} for d={d}, m={m}, S={}",
            s.label()
        )));
    }
    Ok(GrasBreakdown {
        s_factor,
        modulus_factor,
        ramified_factor,
        lambda_index,
        base_quotient_order,
        numerator,
        denominator,
        rhs: total / denominator,
    })
}

/// `|Cl_K[2]|` predicted for the trivial modulus.
pub fn chevalley_ordinary(d: &Discriminant) -> Result<u64> {
    Ok(gras_rhs(d, &Modulus::one(), &PlaceSet::infinite_only(), &[], 1)?.rhs)
}

/// `|Cl^+_K[2]|` predicted for the modulus of real places.
pub fn chevalley_narrow(d: &Discriminant) -> Result<u64> {
    Ok(gras_rhs(d, &Modulus::real_place(), &PlaceSet::infinite_only(), &[], 1)?.rhs)
}

/// `|(Cl^+_K / Cl^+_K[2])^G|` with `D` generated by the ramified primes.
pub fn redei_gras_prediction(d: &Discriminant) -> Result<u64> {
    let norms = d.ramified_primes().to_vec();
    Ok(gras_rhs(d, &Modulus::real_place(), &PlaceSet::infinite_only(), &norms, 1)?.rhs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseField {
    Rationals,
    Quadratic(Discriminant),
}

/// `|(O_K / m_f)^×|` from the splitting of each prime power.
pub fn residue_unit_count(d: &Discriminant, m_f: u64) -> u64 {
    Modulus::new(m_f, false)
        .expect("positive modulus")
        .prime_powers()
        .into_iter()
        .map(|(p, e)| {
            let q = p.pow(e - 1);
            match splitting(d, Place::Finite(p)) {
                SplittingData { e: 2, .. } => p.pow(2 * e - 1) * (p - 1),
                SplittingData { f: 2, .. } => (p * p - 1) * q * q,
                _ => (p - 1) * (p - 1) * q * q,
            }
        })
        .product()
}

fn euler_phi(n: u64) -> u64 {
    Modulus::new(n, false)
        .expect("positive modulus")
        .prime_powers()
        .into_iter()
        .map(|(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

fn inverse_in(res: &ResidueUnits, x: usize) -> usize {
    let id = res.identity();
    let mut z = id;
    while res.op(z, x) != id {
        z = res.op(z, x);
    }
    z
}

/// Images of `E_{K,S}` in `(O/m_f)^× × signs`: the units and, for each
/// relation among the primes above `S` in `Cl_K`, a generator of the
/// corresponding principal ideal.
fn s_unit_images(d: &Discriminant, g: &FormClassGroup, s: &PlaceSet, res: &ResidueUnits) -> Result<Vec<usize>> {
    let dv = d.value();
    let mut out: Vec<usize> = unit_generators(dv)
        .iter()
        .map(|u| res.element(u).expect("units are invertible"))
        .collect();
    let primes: Vec<(u64, IdealRep)> = s
        .primes()
        .iter()
        .flat_map(|&p| primes_above(dv, p).into_iter().map(move |q| (p, q)))
        .collect();
    if primes.is_empty() {
        return Ok(out);
    }
    let (ord, proj) = g.ordinary();
    let classes: Vec<usize> = primes.iter().map(|(_, q)| proj[g.class_of(&q.form(dv))]).collect();
    let mut words: HashMap<usize, Vec<i64>> = HashMap::from([(ord.identity(), vec![0; primes.len()])]);
    let mut queue = VecDeque::from([ord.identity()]);
    let mut relations: Vec<Vec<i64>> = Vec::new();
    while let Some(h) = queue.pop_front() {
        for (i, &c) in classes.iter().enumerate() {
            let y = ord.op(h, c);
            let mut v = words[&h].clone();
            v[i] += 1;
            match words.get(&y) {
                Some(w) => {
                    for (a, b) in v.iter_mut().zip(w) {
                        *a -= b;
                    }
                    if v.iter().any(|&x| x != 0) {
                        relations.push(v);
                    }
                }
                None => {
                    words.insert(y, v);
                    queue.push_back(y);
                }
            }
        }
    }
    for v in relations {
        // ∏ q_i^{v_i} = ∏ q_i^{v_i^+} · conj(q_i)^{v_i^-} / ∏ p_i^{v_i^-}
        let mut ideal = IdealRep::unit(dv);
        let mut denom = res.identity();
        for (&(p, q), &e) in primes.iter().zip(&v) {
            let f = if e >= 0 { q } else { q.conj() };
            let pe = res.element(&QuadElt::from_int(p as i64)).expect("p is prime to m_f");
            for _ in 0..e.unsigned_abs() {
                ideal = ideal.mul(&f, dv);
                if e < 0 {
                    denom = res.op(denom, pe);
                }
            }
        }
        let gen = generator(&ideal, dv)
            .ok_or_else(|| Error::FormulaViolation(format!("S-relation {v:?} is not principal for d={d}")))?;
        let x = res.element(&gen).expect("S-units are prime to m_f");
        out.push(res.op(x, inverse_in(res, denom)));
    }
    Ok(out)
}

/// `|Cl^m_{k,S}| = |Cl_{k,S}| · |(O_{k,S}/m_f)^×| · 2^{|S(m_inf)|} / [E_{k,S} : E^m_{k,S}]`.
pub fn prop_a3_ray_number(k: &BaseField, m: &Modulus, s: &PlaceSet) -> Result<u64> {
    s.check_disjoint(m)?;
    match k {
        BaseField::Rationals => {
            let full = euler_phi(m.m_f) << (m.infinite as u32);
            let mut gens = vec![-1i64];
            gens.extend(s.primes().iter().map(|&p| p as i64));
            let (_, image) = RayTarget::new(m).kernel(&gens);
            Ok(full / image as u64)
        }
        BaseField::Quadratic(d) => {
            let g = FormClassGroup::new(d);
            let h_s = s_class_counts_of(&g, s).order as u64;
            let res = ResidueUnits::new(d.value(), m.m_f, m.infinite);
            let real_places = if d.value() > 0 && m.infinite { 2 } else { 0 };
            let full = residue_unit_count(d, m.m_f) << real_places;
            if full != res.order() as u64 {
                return Err(Error::FormulaViolation(format!(
                    "|(O/{})^×| disagrees with the residue enumeration for d={d}",
                    m.m_f
                )));
            }
            let gens = s_unit_images(d, &g, s, &res)?;
            let image = res
                .subgroup(&gens)
                .iter()
                .filter(|&&b| b)
                .count() as u64;
            Ok(h_s * full / image)
        }
    }
}

/// Second form over Q: `|Cl^m_{Q,S}| = |Cl^{m_r}_{Q,S}| · 2^{|S(m^c_inf)|} / [E^{m_r} : E^m]`,
/// where `m_r` drops the real place when it becomes complex in `Q(sqrt d)`.
pub fn prop_a3_ray_number_reduced(d: &Discriminant, m: &Modulus, s: &PlaceSet) -> Result<u64> {
    let complex = m.infinite && d.value() < 0;
    let m_r = Modulus::new(m.m_f, m.infinite && !complex)?;
    let base = prop_a3_ray_number(&BaseField::Rationals, &m_r, s)?;
    let mut gens = vec![-1i64];
    gens.extend(s.primes().iter().map(|&p| p as i64));
    let (_, img_m) = RayTarget::new(m).kernel(&gens);
    let (_, img_r) = RayTarget::new(&m_r).kernel(&gens);
    let unit_index = (img_m / img_r) as u64;
    Ok((base << complex as u32) / unit_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadforms::class_group_summary;
    use crate::rayoracle::BaseRayGroup;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    #[test]
    fn splitting_examples() {
        let sp = |d, v| {
            let s = splitting(&disc(d), v);
            (s.e, s.f)
        };
        assert_eq!(sp(-84, Place::Finite(3)), (2, 1));
        assert_eq!(sp(-23, Place::Finite(2)), (1, 1));
        assert_eq!(sp(-4, Place::RealInfinite), (2, 1));
        assert_eq!(sp(12, Place::RealInfinite), (1, 1));
        assert_eq!(sp(-4, Place::Finite(3)), (1, 2));
    }

    #[test]
    fn redei_examples() {
        assert_eq!(redei_matrix(&disc(-4)), F2Matrix::zeros(1, 1));
        assert_eq!(f2_rank(&redei_matrix(&disc(-84))), 2);
        assert_eq!(redei_matrix(&disc(-56)), F2Matrix::zeros(2, 2));
        for d in Discriminant::range(-3000, 3000) {
            let r = redei_matrix(&d);
            assert!((0..r.rows()).all(|i| !r.row_sum(i)), "d={d}");
        }
    }

    #[test]
    fn lambda_examples() {
        let s = PlaceSet::infinite_only();
        let l = lambda_group(&Modulus::one(), &s, &[]).unwrap();
        assert_eq!(l.generators, vec![-1]);
        assert_eq!(lambda_norm_index(&l, &disc(-4), &Modulus::one()).unwrap(), 2);
        let l5 = lambda_group(&Modulus::new(5, false).unwrap(), &s, &[]).unwrap();
        assert_eq!(l5.congruence_kernel_basis, vec![vec![2]]);
        assert_eq!(lambda_norm_index(&l5, &disc(-4), &Modulus::new(5, false).unwrap()).unwrap(), 1);
        let l84 = lambda_group(&Modulus::real_place(), &s, &[2, 3, 7]).unwrap();
        assert_eq!(lambda_norm_index(&l84, &disc(-84), &Modulus::real_place()).unwrap(), 4);
    }

    #[test]
    fn kernel_vectors_lie_in_the_ray() {
        let m = Modulus::new(12, true).unwrap();
        let s = PlaceSet::with_primes(&[5, 7]).unwrap();
        let l = lambda_group(&m, &s, &[11, 13]).unwrap();
        for v in &l.congruence_kernel_basis {
            assert_eq!(l.residue(v, 12).unwrap(), 1);
            assert!(!l.is_negative(v));
        }
    }

    #[test]
    fn gras_examples() {
        let s = PlaceSet::infinite_only();
        let rhs = |d, m: Modulus, s: &PlaceSet, norms: &[u64]| gras_rhs(&disc(d), &m, s, norms, 1).unwrap();
        assert_eq!(rhs(-4, Modulus::real_place(), &s, &[]).rhs, 1);
        let b = rhs(-4, Modulus::new(5, false).unwrap(), &s, &[]);
        assert_eq!((b.s_factor, b.modulus_factor, b.ramified_factor, b.lambda_index), (2, 1, 2, 1));
        assert_eq!((b.numerator, b.denominator, b.rhs), (4, 2, 2));
        // m_f meeting d: the ratio is 1/2 and only the product with
        // |Cl^m_Q| = 6 is integral.
        let b = gras_rhs(&disc(-7), &Modulus::new(7, true).unwrap(), &s, &[], 6).unwrap();
        assert_eq!((b.numerator, b.denominator, b.rhs), (1, 2, 3));
        assert!(gras_rhs(&disc(-7), &Modulus::new(7, true).unwrap(), &s, &[], 1).is_err());
        assert_eq!(rhs(-84, Modulus::real_place(), &s, &[2, 3, 7]).rhs, 1);
        let s2 = PlaceSet::with_primes(&[2]).unwrap();
        assert_eq!(rhs(-23, Modulus::one(), &s2, &[]).rhs, 1);
    }

    #[test]
    fn chevalley_examples() {
        assert_eq!(chevalley_narrow(&disc(-84)).unwrap(), 4);
        assert_eq!(chevalley_ordinary(&disc(-4)).unwrap(), 1);
        assert_eq!(chevalley_narrow(&disc(5)).unwrap(), 1);
        for d in Discriminant::range(-2000, 2000) {
            assert_eq!(chevalley_narrow(&d).unwrap(), 1 << (d.t() - 1), "d={d}");
            let s = class_group_summary(&d);
            assert_eq!(chevalley_ordinary(&d).unwrap(), s.two_torsion as u64, "d={d}");
            let four = s.four_torsion_plus / s.two_torsion_plus;
            assert_eq!(redei_gras_prediction(&d).unwrap(), four as u64, "d={d}");
            assert_eq!(1usize << redei_four_rank(&d), four, "d={d}");
        }
    }

    #[test]
    fn lambda_index_ignores_redundant_generators() {
        let d = disc(-84);
        let m = Modulus::new(5, false).unwrap();
        let s = PlaceSet::infinite_only();
        let a = lambda_norm_index(&lambda_group(&m, &s, &[2, 3]).unwrap(), &d, &m).unwrap();
        let b = lambda_norm_index(&lambda_group(&m, &s, &[3, 2, 6, 9]).unwrap(), &d, &m).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn prop_a3_examples() {
        let s = PlaceSet::infinite_only();
        let q = BaseField::Rationals;
        assert_eq!(prop_a3_ray_number(&q, &Modulus::new(5, true).unwrap(), &s).unwrap(), 4);
        let k = BaseField::Quadratic(disc(-4));
        assert_eq!(prop_a3_ray_number(&k, &Modulus::new(5, false).unwrap(), &s).unwrap(), 4);
        assert_eq!(prop_a3_ray_number(&k, &Modulus::one(), &s).unwrap(), 1);
        for mf in 1..=200 {
            for inf in [false, true] {
                let m = Modulus::new(mf, inf).unwrap();
                let direct = BaseRayGroup::new(&m, &s).unwrap().order() as u64;
                assert_eq!(prop_a3_ray_number(&q, &m, &s).unwrap(), direct, "m={m}");
                for d in [-4, -23, 5, 12] {
                    assert_eq!(prop_a3_ray_number_reduced(&disc(d), &m, &s).unwrap(), direct, "d={d} m={m}");
                }
            }
        }
    }

    #[test]
    fn residue_unit_counts_match_enumeration() {
        for d in Discriminant::range(-60, 60) {
            for mf in 1..=30 {
                let res = ResidueUnits::new(d.value(), mf, false);
                assert_eq!(residue_unit_count(&d, mf), res.unit_count() as u64, "d={d} m={mf}");
            }
        }
    }
}
