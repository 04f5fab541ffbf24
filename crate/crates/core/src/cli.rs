//! Command-line front end: band scans, bounds, classification, hidden-variable
//! feasibility of correlation tables, and forging from seed files.
//!
//! Exit codes: 0 success, 2 I/O failure, 3 usage or input error,
//! 4 forged polynomial failed verification.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::exec::Execution;
use crate::forge::{classify, forge, CommutingSeed, PairingScheme};
use crate::interval::Interval;
use crate::lhv::{enumerate_lhv, fine_feasible, fine_inequalities, fine_inequalities_hold, CorrelationTable};
use crate::pauli::{family_s, family_t, ObservableFamily};
use crate::polynomial::{chsh_polynomial, t_polynomial, BellPolynomial};
use crate::quantum::{band_scan, global_quantum_range, named_states, quantum_band, DEFAULT_GRID};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Header of the `band` CSV.
pub const BAND_HEADER: &str = "theta,q_lo,q_hi,h_lo,h_hi,singlet,chi";

#[derive(Debug, Parser)]
#[command(name = "bellforge", version, about = "Bell-type inequality bounds, bands and forging")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Operator {
    S,
    T,
}

impl Operator {
    fn parts(self) -> (&'static str, BellPolynomial, ObservableFamily) {
        match self {
            Operator::S => ("S", chsh_polynomial(), family_s()),
            Operator::T => ("T", t_polynomial(), family_t()),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantum band, hidden-variable band and named-state curves over θ ∈ [0, 2π].
    Band {
        #[arg(long, value_enum)]
        operator: Operator,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        steps: usize,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hidden-variable bounds and the quantum range over all θ.
    Bounds {
        #[arg(long, value_enum)]
        operator: Operator,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Test type of the hidden-variable range against the quantum band at θ.
    Classify {
        #[arg(long, value_enum)]
        operator: Operator,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        /// Interpret --theta in degrees.
        #[arg(long)]
        degrees: bool,
    },
    /// Hidden-variable realizability of an `aIndex,bIndex,value` correlation CSV.
    Fine {
        corr: PathBuf,
        /// Where to write the witness distribution when feasible
        /// (default: `<corr>.witness.csv`).
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Forge a Bell polynomial from a commuting seed and a pairing scheme.
    Forge {
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        scheme: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Usage(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Io(_) => EXIT_IO,
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Verification(_) => EXIT_VERIFY,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Usage(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::VerificationFailed { .. } => Failure::Verification(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Band { operator, steps, out: path } => cmd_band(operator, steps, path.as_deref(), out),
        Command::Bounds { operator, grid } => cmd_bounds(operator, grid, out),
        Command::Classify {
            operator,
            theta,
            degrees,
        } => cmd_classify(operator, if degrees { theta.to_radians() } else { theta }, out),
        Command::Fine { corr, witness } => cmd_fine(&corr, witness, out),
        Command::Forge { seed, scheme } => cmd_forge(&seed, &scheme, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

/// Decimal rendering rounded to 12 significant digits, shortest form that
/// round-trips that rounded value. Magnitudes below 1e-12 print as `0`.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return "nan".into();
    }
    if x.abs() < 1e-12 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

fn fmt_interval(i: &Interval) -> String {
    format!("[{}, {}]", format_number(i.lo), format_number(i.hi))
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_failure(path, e))?;
    tmp.write_all(contents).map_err(|e| io_failure(path, e))?;
    tmp.flush().map_err(|e| io_failure(path, e))?;
    tmp.persist(path).map_err(|e| io_failure(path, e.error))?;
    Ok(())
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Io(format!("stdout: {e}")))
}

/// CSV text of a band scan.
pub fn band_csv(poly: &BellPolynomial, fam: &ObservableFamily, steps: usize) -> crate::Result<String> {
    let hlv = enumerate_lhv(poly)?.bounds;
    let ns = named_states();
    let states = vec![("singlet".to_string(), ns.singlet), ("chi".to_string(), ns.chi)];
    let samples = band_scan(poly, fam, steps, &states, Execution::default())?;
    let mut csv = String::with_capacity(64 * (steps + 1));
    csv.push_str(BAND_HEADER);
    csv.push('\n');
    for s in samples {
        let fields = [
            s.theta,
            s.q.lo,
            s.q.hi,
            hlv.lo,
            hlv.hi,
            s.expectations[0].1,
            s.expectations[1].1,
        ];
        let line: Vec<String> = fields.iter().map(|&x| format_number(x)).collect();
        csv.push_str(&line.join(","));
        csv.push('\n');
    }
    Ok(csv)
}

fn cmd_band(op: Operator, steps: usize, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    if steps < 2 {
        return Err(Failure::Usage(format!("--steps must be at least 2, got {steps}")));
    }
    let (_, poly, fam) = op.parts();
    let csv = band_csv(&poly, &fam, steps)?;
    match path {
        Some(p) => write_atomic(p, csv.as_bytes()),
        None => emit(out, &csv),
    }
}

fn cmd_bounds(op: Operator, grid: usize, out: &mut dyn Write) -> Result<(), Failure> {
    let (name, poly, fam) = op.parts();
    let lhv = enumerate_lhv(&poly)?;
    let global = global_quantum_range(&poly, &fam, grid)?;
    let quarter = quantum_band(&poly, &fam, std::f64::consts::FRAC_PI_4)?;
    let values: Vec<String> = lhv.value_set.iter().map(|&v| format_number(v)).collect();
    let mut s = String::new();
    writeln!(s, "operator: {name}").unwrap();
    writeln!(s, "polynomial:").unwrap();
    for line in poly.to_string().lines() {
        writeln!(s, "  {line}").unwrap();
    }
    writeln!(s, "lhv value set: {{{}}}", values.join(", ")).unwrap();
    writeln!(s, "lhv bounds: {}", fmt_interval(&lhv.bounds)).unwrap();
    writeln!(s, "quantum range (grid {grid}): {}", fmt_interval(&global)).unwrap();
    writeln!(s, "quantum band at theta=pi/4: {}", fmt_interval(&quarter)).unwrap();
    emit(out, &s)
}

fn cmd_classify(op: Operator, theta: f64, out: &mut dyn Write) -> Result<(), Failure> {
    if !theta.is_finite() {
        return Err(Failure::Usage("--theta must be finite".into()));
    }
    let (name, poly, fam) = op.parts();
    let hlv = enumerate_lhv(&poly)?.bounds;
    let q = quantum_band(&poly, &fam, theta)?;
    let verdict = classify(hlv, q)?;
    let mut s = String::new();
    writeln!(s, "operator: {name}").unwrap();
    writeln!(s, "theta: {}", format_number(theta)).unwrap();
    writeln!(s, "lhv: {}", fmt_interval(&hlv)).unwrap();
    writeln!(s, "quantum: {}", fmt_interval(&q)).unwrap();
    writeln!(s, "type: {verdict}").unwrap();
    emit(out, &s)
}

fn cmd_fine(corr: &Path, witness: Option<PathBuf>, out: &mut dyn Write) -> Result<(), Failure> {
    let file = std::fs::File::open(corr).map_err(|e| io_failure(corr, e))?;
    let table = CorrelationTable::from_csv(file)?;
    let result = fine_feasible(&table)?;
    let mut s = String::new();
    writeln!(s, "{}", if result.feasible { "FEASIBLE" } else { "INFEASIBLE" }).unwrap();
    let sc = table.scenario();
    match fine_inequalities(&table) {
        Ok(values) => {
            let shown: Vec<String> = values.iter().map(|&v| format_number(v)).collect();
            writeln!(s, "fine combinations: {}", shown.join(", ")).unwrap();
            writeln!(
                s,
                "fine inequalities: {}",
                if fine_inequalities_hold(&values, 1e-9) { "satisfied" } else { "violated" }
            )
            .unwrap();
        }
        Err(_) => writeln!(s, "fine combinations: n/a for scenario ({},{})", sc.m_a(), sc.n_b()).unwrap(),
    }
    if let Some(w) = &result.witness {
        let path = witness.unwrap_or_else(|| {
            let mut p = corr.as_os_str().to_owned();
            p.push(".witness.csv");
            PathBuf::from(p)
        });
        let mut csv = String::from("strategy,a_values,b_values,weight\n");
        let sign = |v: &[i8]| v.iter().map(|&x| if x > 0 { "+1" } else { "-1" }).collect::<Vec<_>>().join(" ");
        for (strategy, weight) in w {
            writeln!(
                csv,
                "{},{},{},{}",
                strategy.index(),
                sign(&strategy.a),
                sign(&strategy.b),
                format_number(*weight)
            )
            .unwrap();
        }
        write_atomic(&path, csv.as_bytes())?;
        writeln!(s, "witness: {} strategies written to {}", w.len(), path.display()).unwrap();
    }
    emit(out, &s)
}

fn cmd_forge(seed_path: &Path, scheme_path: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let seed_text = std::fs::read_to_string(seed_path).map_err(|e| io_failure(seed_path, e))?;
    let scheme_text = std::fs::read_to_string(scheme_path).map_err(|e| io_failure(scheme_path, e))?;
    let seed = CommutingSeed::from_text(&seed_text)?;
    let scheme = PairingScheme::from_text(&scheme_text)?;
    let report = forge(&seed, &scheme)?;

    let mut s = String::new();
    writeln!(s, "scenario: ({},{})", report.polynomial.scenario().m_a(), report.polynomial.scenario().n_b()).unwrap();
    for (i, a) in report.a_settings.iter().enumerate() {
        writeln!(s, "A{} = {a}", i + 1).unwrap();
    }
    for (j, b) in report.b_settings.iter().enumerate() {
        writeln!(s, "B{} = {b}", j + 1).unwrap();
    }
    writeln!(s, "polynomial:").unwrap();
    for t in report.polynomial.terms() {
        writeln!(s, "  {} A{} B{}", format_number(t.coeff), t.a, t.b).unwrap();
    }
    writeln!(s, "verification: ok (max deviation {:.3e})", report.deviation).unwrap();
    let cands: Vec<String> = report.seed_spectrum.candidates.iter().map(|&v| format_number(v)).collect();
    writeln!(s, "seed candidates: {{{}}}", cands.join(", ")).unwrap();
    writeln!(s, "lhv bounds: {}", fmt_interval(&report.hlv_bounds)).unwrap();
    writeln!(s, "quantum bounds: {}", fmt_interval(&report.quantum_bounds)).unwrap();
    writeln!(s, "type: {}", report.test_type).unwrap();
    emit(out, &s)
}
