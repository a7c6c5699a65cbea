//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every comparison is between exact integers; the tolerance is pinned at
//! zero.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use gras_core::arith::{factorize, is_prime, Discriminant};
use gras_core::f2::f2_rank;
use gras_core::formulas::{lambda_group, lambda_norm_index, redei_matrix, BaseField};
use gras_core::hilbert::{hilbert_symbol, LocalNormGroup, Place};
use gras_core::quadforms::{compose, FormClassGroup, QuadraticForm};
use gras_core::rayoracle::{build_oracle, Budget, DChoice, SubmoduleSpec};
use gras_core::verify::{
    run_cases, verify_chevalley, verify_gras, verify_rayclass, verify_redei, Exec, OracleSource, Status,
    VerificationRecord,
};
use gras_core::{Modulus, PlaceSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Allowed |lhs - rhs| for every identity.
const TOLERANCE: u64 = 0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn within_tolerance(r: &VerificationRecord) -> bool {
    r.status != Status::Skipped
        && matches!((r.lhs, r.rhs), (Some(l), Some(r)) if l.abs_diff(r) <= TOLERANCE)
}

fn summarize(records: &[VerificationRecord]) -> Outcome {
    let bad: Vec<&VerificationRecord> = records.iter().filter(|r| !within_tolerance(r)).collect();
    let mut detail = format!("{} cases, {} failing", records.len(), bad.len());
    if let Some(r) = bad.first() {
        detail.push_str(&format!("; first: {} {:?}", r.csv_row(), r.reason));
    }
    Outcome {
        pass: bad.is_empty() && !records.is_empty(),
        detail,
    }
}

fn source() -> OracleSource<'static> {
    OracleSource {
        budget: Budget::default(),
        cache_dir: None,
    }
}

fn criterion_1() -> Outcome {
    let ds: Vec<Discriminant> = Discriminant::range(-10_000, 10_000);
    summarize(&run_cases(&ds, Exec::Parallel, |d| verify_chevalley(d, true, &PlaceSet::infinite_only())))
}

fn criterion_2() -> Outcome {
    let ds: Vec<Discriminant> = Discriminant::range(-5000, 5000);
    summarize(&run_cases(&ds, Exec::Parallel, |d| verify_chevalley(d, false, &PlaceSet::infinite_only())))
}

fn criterion_3() -> Outcome {
    let ds: Vec<Discriminant> = Discriminant::range(-10_000, 10_000);
    summarize(&run_cases(&ds, Exec::Parallel, verify_redei))
}

const MODULI_4: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];

fn cases_4() -> Vec<(Discriminant, Modulus)> {
    let mut out = Vec::new();
    for d in Discriminant::range(-40, 40) {
        for mf in MODULI_4 {
            for inf in [false, true] {
                out.push((d.clone(), Modulus::new(mf, inf).unwrap()));
            }
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let src = source();
    let s = PlaceSet::infinite_only();
    summarize(&run_cases(&cases_4(), Exec::Parallel, |(d, m)| {
        verify_gras(d, m, &s, &SubmoduleSpec::Trivial, DChoice::Primary, &src)
    }))
}

fn criterion_5() -> Outcome {
    let mut cases = Vec::new();
    for d in Discriminant::range(-60, 60) {
        for p in [2u64, 3, 5] {
            for mf in 1..=5u64 {
                if mf % p == 0 {
                    continue;
                }
                for inf in [false, true] {
                    for spec in [SubmoduleSpec::Trivial, SubmoduleSpec::TwoTorsion] {
                        cases.push((d.clone(), p, Modulus::new(mf, inf).unwrap(), spec));
                    }
                }
            }
        }
    }
    let src = source();
    summarize(&run_cases(&cases, Exec::Parallel, |(d, p, m, spec)| {
        verify_gras(d, m, &PlaceSet::with_primes(&[*p]).unwrap(), spec, DChoice::Primary, &src)
    }))
}

fn criterion_6() -> Outcome {
    let src = source();
    let s = PlaceSet::infinite_only();
    let mut base = Vec::new();
    for mf in 1..=200 {
        for inf in [false, true] {
            base.push((BaseField::Rationals, Modulus::new(mf, inf).unwrap()));
        }
    }
    for d in Discriminant::range(-40, 40) {
        for mf in 1..=10 {
            for inf in [false, true] {
                base.push((BaseField::Quadratic(d.clone()), Modulus::new(mf, inf).unwrap()));
            }
        }
    }
    summarize(&run_cases(&base, Exec::Parallel, |(k, m)| verify_rayclass(k, m, &s, &src)))
}

fn nonzero(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    loop {
        let x = rng.gen_range(-bound..=bound);
        if x != 0 {
            return x;
        }
    }
}

fn product_formula() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..10_000 {
        let (a, b) = (nonzero(&mut rng, 1_000_000), nonzero(&mut rng, 1_000_000));
        let mut primes: Vec<u64> = vec![2];
        primes.extend(factorize(a).unwrap().primes());
        primes.extend(factorize(b).unwrap().primes());
        primes.sort_unstable();
        primes.dedup();
        let prod: i32 = primes
            .into_iter()
            .map(Place::Finite)
            .chain([Place::RealInfinite])
            .map(|v| hilbert_symbol(a, b, v) as i32)
            .product();
        if prod != 1 {
            return Err(format!("product formula fails for ({a}, {b})"));
        }
    }
    Ok("10000 pairs".into())
}

fn valuation_mod(x: u64, p: u64, n: u32) -> u32 {
    if x == 0 {
        return n;
    }
    let mut x = x;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Decides `z^2 = a x^2 + b y^2` over Q_p. A primitive solution has `x` or
/// `y` a unit, so it can be scaled to `x = 1` or `y = 1`. No such solution
/// mod p^N means no p-adic solution; one whose gradient has valuation `k`
/// with `N >= 2k + 1` lifts by Hensel's lemma.
fn solvable(a: i64, b: i64, p: u64) -> Option<bool> {
    for n in 1..=24u32 {
        let q = p.pow(n);
        if q > 1 << 22 {
            return None;
        }
        let mut roots: HashMap<u64, Vec<u64>> = HashMap::new();
        for z in 0..q {
            roots.entry((z as u128 * z as u128 % q as u128) as u64).or_default().push(z);
        }
        let (am, bm) = (a.rem_euclid(q as i64) as u128, b.rem_euclid(q as i64) as u128);
        let q128 = q as u128;
        let mut any = false;
        for t in 0..q {
            let t2 = t as u128 * t as u128 % q128;
            // (x, y) = (1, t) and (t, 1)
            for (x, y, r) in [(1, t, (am + bm * t2) % q128), (t, 1, (am * t2 + bm) % q128)] {
                let Some(zs) = roots.get(&(r as u64)) else { continue };
                for &z in zs {
                    any = true;
                    let grads = [
                        (2 * z as u128 % q128) as u64,
                        (2 * am * x as u128 % q128) as u64,
                        (2 * bm * y as u128 % q128) as u64,
                    ];
                    let k = grads.iter().map(|&g| valuation_mod(g, p, n)).min().unwrap();
                    if n >= 2 * k + 1 {
                        return Some(true);
                    }
                }
            }
        }
        if !any {
            return Some(false);
        }
    }
    None
}

fn symbol_vs_solvability() -> Result<String, String> {
    let mut checked = 0;
    for p in (2..=50u64).filter(|&p| is_prime(p)) {
        for a in (-30..=30i64).filter(|&a| a != 0) {
            for b in (a..=30i64).filter(|&b| b != 0) {
                let expect = match solvable(a, b, p) {
                    Some(s) => s,
                    None => return Err(format!("solvability undecided for ({a}, {b}) at {p}")),
                };
                if (hilbert_symbol(a, b, Place::Finite(p)) == 1) != expect {
                    return Err(format!("symbol disagrees for ({a}, {b}) at {p}"));
                }
                if (hilbert_symbol(a, b, Place::RealInfinite) == 1) != (a > 0 || b > 0) {
                    return Err(format!("real symbol disagrees for ({a}, {b})"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} triples"))
}

fn composition_axioms() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ds = Discriminant::range(-3000, 3000);
    for d in &ds {
        let g = FormClassGroup::new(d);
        g.table().check_axioms(Some(5000)).map_err(|e| format!("d={d}: {e}"))?;
        let reps = g.reps();
        let cls = |f: &QuadraticForm| g.class_of(f);
        let one = QuadraticForm::principal(d.value());
        for _ in 0..20 {
            let pick = |rng: &mut ChaCha8Rng| reps[rng.gen_range(0..reps.len())];
            let (f, h, k) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let c = |x: QuadraticForm, y: QuadraticForm| compose(&x, &y).map_err(|e| format!("d={d}: {e}"));
            let fh = c(f, h)?;
            let hk = c(h, k)?;
            if cls(&c(f, one)?) != cls(&f)
                || cls(&c(f, f.inverse())?) != 0
                || cls(&c(fh, k)?) != cls(&c(f, hk)?)
                || cls(&fh) != cls(&c(h, f)?)
            {
                return Err(format!("composition axioms fail for d={d} on {f}, {h}, {k}"));
            }
        }
    }
    Ok(format!("{} discriminants", ds.len()))
}

fn redei_row_sums() -> Result<String, String> {
    let ds = Discriminant::range(-10_000, 10_000);
    for d in &ds {
        let r = redei_matrix(d);
        if (0..r.rows()).any(|i| r.row_sum(i)) {
            return Err(format!("nonzero row sum for d={d}"));
        }
        if f2_rank(&r) >= d.t() as usize && d.t() > 0 {
            return Err(format!("full rank Rédei matrix for d={d}"));
        }
    }
    Ok(format!("{} discriminants", ds.len()))
}

/// `[1 + p^e Z_p : N(1 + p^e O_w)]` from the full image mod `p^level`.
fn brute_index(d: i64, p: u64, e: u32, level: u32) -> u64 {
    let m = p.pow(level) as i128;
    let pe = p.pow(e) as i128;
    let dd = d as i128;
    let mut seen = HashSet::new();
    for x in (1..=m).step_by(pe as usize) {
        for y in (0..m).step_by(pe as usize) {
            seen.insert((x * x + dd * x * y + (dd * dd - dd) / 4 * y * y).rem_euclid(m));
        }
    }
    (m / pe) as u64 / seen.len() as u64
}

fn truncation_stability() -> Result<String, String> {
    let mut checked = 0;
    for d in Discriminant::range(-40, 40) {
        for p in [2u64, 3, 5, 7] {
            for e in 1..=3 {
                let g = LocalNormGroup::new(&d, p, e).map_err(|err| err.to_string())?;
                for extra in 1..=2 {
                    let span = p.pow(g.level() + extra - e);
                    if span > 1 << 11 {
                        continue;
                    }
                    let b = brute_index(d.value(), p, e, g.level() + extra);
                    if b != g.index() {
                        return Err(format!("d={d} p={p} e={e}: index {} vs {b}", g.index()));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} truncations"))
}

fn lambda_independence() -> Result<String, String> {
    let s = PlaceSet::infinite_only();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    for (d, m) in cases_4() {
        let o = build_oracle(&d, &m, &s, None, &Budget::default()).map_err(|e| e.to_string())?;
        for spec in [SubmoduleSpec::Trivial, SubmoduleSpec::TwoTorsion] {
            let index = |norms: &[u64]| {
                lambda_group(&m, &s, norms)
                    .and_then(|l| lambda_norm_index(&l, &d, &m))
                    .map_err(|e| e.to_string())
            };
            let norms = |c| -> Result<Vec<u64>, String> {
                Ok(o.d_generators(&spec, c).map_err(|e| e.to_string())?.iter().map(|i| i.norm()).collect())
            };
            let primary = norms(DChoice::Primary)?;
            let alternate = norms(DChoice::Alternate)?;
            let mut redundant = primary.clone();
            if let Some(&x) = primary.first() {
                redundant.push(x * x);
            }
            redundant.extend(alternate.iter().copied());
            for i in (1..redundant.len()).rev() {
                redundant.swap(i, rng.gen_range(0..=i));
            }
            let base = index(&primary)?;
            if primary == alternate {
                return Err(format!("D choices coincide for d={d} m={m}"));
            }
            for other in [&alternate, &redundant] {
                if index(other)? != base {
                    return Err(format!("Λ index depends on D for d={d} m={m} {}", spec.tag()));
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} cases"))
}

fn criterion_7() -> Outcome {
    let suites: [(&str, fn() -> Result<String, String>); 6] = [
        ("product formula", product_formula),
        ("symbol vs solvability", symbol_vs_solvability),
        ("composition axioms", composition_axioms),
        ("Rédei row sums", redei_row_sums),
        ("truncation stability", truncation_stability),
        ("Λ independence of D", lambda_independence),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, f) in suites {
        match f() {
            Ok(s) => parts.push(format!("{name}: ok ({s})")),
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: FAILED ({e})"));
            }
        }
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 Chevalley narrow, 0 < |d| <= 10^4", criterion_1),
        ("2 Chevalley ordinary, |d| <= 5000", criterion_2),
        ("3 Redei 4-rank and Gras route, |d| <= 10^4", criterion_3),
        ("4 ray classes, S = {inf}, trivial C", criterion_4),
        ("5 ray classes, S = {inf, p}", criterion_5),
        ("6 ray class numbers from units", criterion_6),
        ("7 property suites", criterion_7),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {name}: {} [{:.1}s]", o.detail, start.elapsed().as_secs_f64());
        failed += !o.pass as u32;
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
