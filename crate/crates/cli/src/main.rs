use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gras_core::arith::Discriminant;
use gras_core::formulas::BaseField;
use gras_core::rayoracle::{Budget, DChoice, SubmoduleSpec, CACHE_FORMAT};
use gras_core::verify::{
    exit_code, run_cases, verify_chevalley, verify_gras, verify_rayclass, verify_redei, Exec, OracleSource,
    VerificationRecord, CSV_HEADER,
};
use gras_core::{Modulus, PlaceSet};

/// Exact checks of ambiguous class number formulas for quadratic fields.
///
/// Exit status: 0 when every case matches, 2 on any mismatch, 3 when cases
/// were skipped (budget) without a mismatch, 1 on usage errors.
#[derive(Parser, Debug)]
#[command(name = "gras-verify", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-torsion of (narrow) S-class groups against Chevalley's formula.
    VerifyChevalley {
        #[command(flatten)]
        range: DRange,
        #[arg(long, value_enum, default_value_t = Kind::Narrow)]
        kind: Kind,
        #[arg(long, value_delimiter = ',')]
        s_primes: Vec<u64>,
        #[command(flatten)]
        out: Output,
    },
    /// 4-ranks of narrow class groups against Rédei matrices.
    VerifyRedei {
        #[command(flatten)]
        range: DRange,
        #[command(flatten)]
        out: Output,
    },
    /// Ambiguous ray classes modulo a submodule against the full formula.
    VerifyGras {
        #[command(flatten)]
        range: DRange,
        #[command(flatten)]
        modulus: ModulusArgs,
        #[arg(long, value_delimiter = ',')]
        s_primes: Vec<u64>,
        #[arg(long, value_enum, default_value_t = Submodule::Trivial)]
        submodule: Submodule,
        /// Pick the second set of ideal representatives for D.
        #[arg(long)]
        alternate_d: bool,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Ray class numbers: direct construction against the unit formula.
    VerifyRayclass {
        /// Use the base field Q instead of quadratic fields.
        #[arg(long, conflicts_with_all = ["d", "d_from", "d_to"])]
        base: bool,
        #[command(flatten)]
        range: DRange,
        #[command(flatten)]
        modulus: ModulusArgs,
        #[arg(long, value_delimiter = ',')]
        s_primes: Vec<u64>,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Inspect or clear an oracle cache directory.
    Cache {
        #[arg(long)]
        cache_dir: PathBuf,
        #[arg(long)]
        clear: bool,
    },
}

#[derive(Args, Debug)]
struct DRange {
    /// A single discriminant.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["d_from", "d_to"])]
    d: Option<i64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = -100)]
    d_from: i64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 100)]
    d_to: i64,
}

impl DRange {
    fn discriminants(&self) -> Result<Vec<Discriminant>, String> {
        match self.d {
            Some(d) => Discriminant::new(d).map(|d| vec![d]).map_err(|e| e.to_string()),
            None => Ok(Discriminant::range(self.d_from, self.d_to)),
        }
    }
}

#[derive(Args, Debug)]
struct ModulusArgs {
    /// Finite part m_f (or the first value of a range with --modulus-to).
    #[arg(long, default_value_t = 1)]
    modulus: u64,
    #[arg(long)]
    modulus_to: Option<u64>,
    /// Include the real place in the modulus.
    #[arg(long)]
    infinite_modulus: bool,
}

impl ModulusArgs {
    fn moduli(&self) -> Result<Vec<Modulus>, String> {
        let to = self.modulus_to.unwrap_or(self.modulus);
        (self.modulus..=to)
            .map(|mf| Modulus::new(mf, self.infinite_modulus).map_err(|e| e.to_string()))
            .collect()
    }
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Ignore --cache-dir.
    #[arg(long)]
    no_cache: bool,
    /// Largest ideal norm the ray class oracle may enumerate.
    #[arg(long, env = "GRAS_VERIFY_BUDGET", default_value_t = Budget::default().max_norm_bound)]
    budget: u64,
}

impl OracleArgs {
    fn source(&self) -> OracleSource<'_> {
        OracleSource {
            budget: Budget {
                max_norm_bound: self.budget,
                ..Budget::default()
            },
            cache_dir: if self.no_cache { None } else { self.cache_dir.as_deref() },
        }
    }
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Run cases one at a time.
    #[arg(long)]
    sequential: bool,
}

impl Output {
    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Narrow,
    Ordinary,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Submodule {
    Trivial,
    TwoTorsion,
    Ramified,
}

impl From<Submodule> for SubmoduleSpec {
    fn from(s: Submodule) -> Self {
        match s {
            Submodule::Trivial => SubmoduleSpec::Trivial,
            Submodule::TwoTorsion => SubmoduleSpec::TwoTorsion,
            Submodule::Ramified => SubmoduleSpec::RamifiedGenerated,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

fn places(primes: &[u64]) -> Result<PlaceSet, String> {
    PlaceSet::with_primes(primes).map_err(|e| e.to_string())
}

fn emit(records: &[VerificationRecord], format: Format, elapsed: Duration) -> io::Result<()> {
    let mut out = BufWriter::new(io::stdout().lock());
    if format == Format::Csv {
        writeln!(out, "{CSV_HEADER}")?;
    }
    for r in records {
        match format {
            Format::Csv => writeln!(out, "{}", r.csv_row())?,
            Format::Jsonl => writeln!(out, "{}", r.json_line())?,
        }
    }
    out.flush()?;
    let busy: Duration = records.iter().map(|r| r.elapsed).sum();
    eprintln!(
        "{} cases in {:.3}s (sum of case times {:.3}s)",
        records.len(),
        elapsed.as_secs_f64(),
        busy.as_secs_f64()
    );
    for r in records.iter().filter(|r| r.reason.is_some()) {
        eprintln!("d={} m={} S={}: {}", r.d, r.mf, r.s, r.reason.as_deref().unwrap_or_default());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, String> {
    let start = Instant::now();
    let (records, out) = match &cli.command {
        Command::VerifyChevalley {
            range,
            kind,
            s_primes,
            out,
        } => {
            let s = places(s_primes)?;
            let narrow = matches!(kind, Kind::Narrow);
            let ds = range.discriminants()?;
            (run_cases(&ds, out.exec(), |d| verify_chevalley(d, narrow, &s)), out)
        }
        Command::VerifyRedei { range, out } => (run_cases(&range.discriminants()?, out.exec(), verify_redei), out),
        Command::VerifyGras {
            range,
            modulus,
            s_primes,
            submodule,
            alternate_d,
            oracle,
            out,
        } => {
            let s = places(s_primes)?;
            let spec = SubmoduleSpec::from(*submodule);
            let choice = if *alternate_d { DChoice::Alternate } else { DChoice::Primary };
            let source = oracle.source();
            let moduli = modulus.moduli()?;
            let cases: Vec<(Discriminant, Modulus)> = range
                .discriminants()?
                .into_iter()
                .flat_map(|d| moduli.iter().map(move |m| (d.clone(), *m)))
                .collect();
            let records = run_cases(&cases, out.exec(), |(d, m)| verify_gras(d, m, &s, &spec, choice, &source));
            (records, out)
        }
        Command::VerifyRayclass {
            base,
            range,
            modulus,
            s_primes,
            oracle,
            out,
        } => {
            let s = places(s_primes)?;
            let source = oracle.source();
            let fields: Vec<BaseField> = if *base {
                vec![BaseField::Rationals]
            } else {
                range.discriminants()?.into_iter().map(BaseField::Quadratic).collect()
            };
            let moduli = modulus.moduli()?;
            let cases: Vec<(BaseField, Modulus)> = fields
                .into_iter()
                .flat_map(|k| moduli.iter().map(move |m| (k.clone(), *m)))
                .collect();
            (run_cases(&cases, out.exec(), |(k, m)| verify_rayclass(k, m, &s, &source)), out)
        }
        Command::Cache { cache_dir, clear } => return cache(cache_dir, *clear),
    };
    emit(&records, out.format, start.elapsed()).map_err(|e| e.to_string())?;
    Ok(exit_code(&records))
}

fn cache(dir: &PathBuf, clear: bool) -> Result<i32, String> {
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
        Err(e) => return Err(format!("{}: {e}", dir.display())),
    };
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("oracle_") && n.ends_with(".txt"))
        })
        .collect();
    files.sort();
    for f in &files {
        if clear {
            std::fs::remove_file(f).map_err(|e| format!("{}: {e}", f.display()))?;
        } else {
            let first = std::fs::read_to_string(f).ok().and_then(|t| t.lines().next().map(str::to_string));
            let status = if first.as_deref() == Some(CACHE_FORMAT) { "ok" } else { "stale" };
            println!("{}\t{status}", f.display());
        }
    }
    if clear {
        eprintln!("removed {} cache files", files.len());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
