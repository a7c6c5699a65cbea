use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{ClassRecord, RayClassOracle};
use crate::arith::Discriminant;
use crate::error::{Error, Result};
use crate::field::IdealRep;
use crate::group::{AbelianGroup, TableGroup};
use crate::modulus::{Modulus, PlaceSet};

/// First line of every cache file.
pub const CACHE_FORMAT: &str = "gras-oracle v1";

fn ideal_str(i: &IdealRep) -> String {
    format!("{} {} {}", i.n, i.a, i.b)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn render(o: &RayClassOracle) -> String {
    let mut out = String::new();
    let n = o.ray_group().order();
    let _ = writeln!(out, "{CACHE_FORMAT}");
    let _ = writeln!(out, "d {}", o.discriminant().value());
    let _ = writeln!(out, "mf {}", o.modulus().m_f);
    let _ = writeln!(out, "minf {}", o.modulus().infinite as u8);
    let _ = writeln!(out, "S {}", o.places().label());
    let _ = writeln!(out, "bound {}", o.bound());
    let _ = writeln!(out, "ordinary {}", o.ordinary_reps().len());
    for r in o.ordinary_reps() {
        let _ = writeln!(out, "{}", ideal_str(r));
    }
    let _ = writeln!(out, "classes {n}");
    for c in o.classes() {
        let _ = writeln!(out, "{} {} {}", ideal_str(&c.rep), ideal_str(&c.alt), c.first_norm);
    }
    let _ = writeln!(out, "mul");
    let table = o.ray_group().table();
    for i in 0..n {
        let _ = writeln!(out, "{}", join(&table[i * n..(i + 1) * n]));
    }
    let _ = writeln!(out, "sigma {}", join(o.sigma()));
    let _ = writeln!(out, "sprimes {}", join(o.s_prime_classes()));
    let _ = writeln!(out, "ramified {}", join(o.ramified_classes()));
    out
}

/// File name inside a cache directory for the given case.
pub fn cache_path(dir: &Path, d: &Discriminant, m: &Modulus, s: &PlaceSet) -> PathBuf {
    let s_tag = s.label().replace(';', "-");
    dir.join(format!("oracle_d{}_m{}_{}_{}.txt", d.value(), m.m_f, m.infinite as u8, s_tag))
}

/// Writes the oracle atomically (temporary file, then rename).
pub fn save_oracle(o: &RayClassOracle, path: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, render(o)).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

struct Lines<'a> {
    it: std::str::Lines<'a>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        self.it.next().ok_or_else(|| Error::Cache("truncated file".into()))
    }

    fn field(&mut self, name: &str) -> Result<&'a str> {
        let line = self.next()?;
        match line.split_once(' ') {
            Some((k, v)) if k == name => Ok(v),
            None if line == name => Ok(""),
            _ => Err(Error::Cache(format!("expected `{name}`, found `{line}`"))),
        }
    }
}

fn nums<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split_whitespace()
        .map(|x| x.parse().map_err(|_| Error::Cache(format!("bad number `{x}`"))))
        .collect()
}

fn ideal_from(v: &[i64]) -> IdealRep {
    IdealRep {
        n: v[0] as u64,
        a: v[1] as u64,
        b: v[2],
    }
}

/// Loads an oracle, checking that the header matches the requested case.
pub fn load_oracle(path: &Path, d: &Discriminant, m: &Modulus, s: &PlaceSet) -> Result<RayClassOracle> {
    let text = fs::read_to_string(path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
    let mut l = Lines { it: text.lines() };
    if l.next()? != CACHE_FORMAT {
        return Err(Error::Cache("unknown cache format".into()));
    }
    let header = (
        l.field("d")?.to_string(),
        l.field("mf")?.to_string(),
        l.field("minf")?.to_string(),
        l.field("S")?.to_string(),
    );
    let expected = (
        d.value().to_string(),
        m.m_f.to_string(),
        (m.infinite as u8).to_string(),
        s.label(),
    );
    if header != expected {
        return Err(Error::Cache("cache header does not match the requested case".into()));
    }
    let bound: u64 = l.field("bound")?.parse().map_err(|_| Error::Cache("bad bound".into()))?;
    let n_ord: usize = l.field("ordinary")?.parse().map_err(|_| Error::Cache("bad count".into()))?;
    let mut ord = Vec::with_capacity(n_ord);
    for _ in 0..n_ord {
        ord.push(ideal_from(&nums::<i64>(l.next()?)?));
    }
    let n: usize = l.field("classes")?.parse().map_err(|_| Error::Cache("bad count".into()))?;
    let mut classes = Vec::with_capacity(n);
    for _ in 0..n {
        let v = nums::<i64>(l.next()?)?;
        if v.len() != 7 {
            return Err(Error::Cache("bad class line".into()));
        }
        classes.push(ClassRecord {
            rep: ideal_from(&v[0..3]),
            alt: ideal_from(&v[3..6]),
            first_norm: v[6] as u64,
        });
    }
    l.field("mul")?;
    let mut table = Vec::with_capacity(n * n);
    for _ in 0..n {
        let row = nums::<u32>(l.next()?)?;
        if row.len() != n || row.iter().any(|&k| k as usize >= n) {
            return Err(Error::Cache("bad multiplication row".into()));
        }
        table.extend(row);
    }
    let sigma = nums::<usize>(l.field("sigma")?)?;
    let sprimes = nums::<usize>(l.field("sprimes")?)?;
    let ramified = nums::<usize>(l.field("ramified")?)?;
    if sigma.len() != n || sigma.iter().chain(&sprimes).chain(&ramified).any(|&k| k >= n) {
        return Err(Error::Cache("class index out of range".into()));
    }
    let group = TableGroup::from_table(n, 0, table);
    group
        .check_axioms(Some(4096))
        .map_err(|e| Error::Cache(format!("multiplication table: {e}")))?;
    RayClassOracle::assemble(
        d.clone(),
        *m,
        s.clone(),
        bound,
        classes,
        group,
        sigma,
        sprimes,
        ramified,
        ord,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rayoracle::{build_oracle, Budget, SubmoduleSpec};

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = Discriminant::new(-84).unwrap();
        let m = Modulus::new(5, true).unwrap();
        let s = PlaceSet::infinite_only();
        let o = build_oracle(&d, &m, &s, None, &Budget::default()).unwrap();
        let path = cache_path(dir.path(), &d, &m, &s);
        save_oracle(&o, &path).unwrap();
        let first = fs::read_to_string(&path).unwrap();
        let back = load_oracle(&path, &d, &m, &s).unwrap();
        assert_eq!(back.order(), o.order());
        assert_eq!(back.sigma(), o.sigma());
        assert_eq!(
            back.ambiguous_count(&SubmoduleSpec::Trivial).unwrap(),
            o.ambiguous_count(&SubmoduleSpec::Trivial).unwrap()
        );
        save_oracle(&back, &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), first);
        let other = Modulus::new(5, false).unwrap();
        assert!(load_oracle(&path, &d, &other, &s).is_err());

        // Swap two products in one row of the table.
        let mut lines: Vec<String> = first.lines().map(str::to_string).collect();
        let at = lines.iter().position(|l| l == "mul").unwrap() + 2;
        let mut row: Vec<&str> = lines[at].split(' ').collect();
        row.swap(1, 2);
        lines[at] = row.join(" ");
        fs::write(&path, lines.join("\n") + "\n").unwrap();
        assert!(load_oracle(&path, &d, &m, &s).is_err());

        // Record the same class twice.
        let mut lines: Vec<String> = first.lines().map(str::to_string).collect();
        let at = lines.iter().position(|l| l.starts_with("classes ")).unwrap();
        lines[at + 2] = lines[at + 1].clone();
        fs::write(&path, lines.join("\n") + "\n").unwrap();
        assert!(load_oracle(&path, &d, &m, &s).is_err());
    }
}
