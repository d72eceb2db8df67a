//! Command-line front end. `run` does all the work so tests can drive it
//! with in-memory writers.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::amenability::{self, AmenabilityError, Condition3Options, MassMode};
use crate::builders::{self, InstanceKind};
use crate::format::{self, ParseError};
use crate::pointset::PointSet;
use crate::rational;
use crate::report::RunReport;
use crate::sampling;
use crate::structure::{FiniteSemihypergroup, StructureError, DEFAULT_ENUMERATION_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INVALID_STRUCTURE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_SOFTWARE: i32 = 70;

#[derive(Debug, Parser)]
#[command(name = "shg", version, about = "Exact checks for finite semihypergroups and invariant means")]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Full,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    RightZero,
    LeftZero,
    TwoPoint,
    Group,
    Classes,
    Random,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the semihypergroup axioms.
    Verify { file: PathBuf },
    /// Decide TLIM existence four ways and compare.
    Amen {
        file: PathBuf,
        /// Extra random mass-zero witnesses for the convolution-norm test.
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Find a TLIM, or an H-invariant mean with --sub.
    Mean {
        file: PathBuf,
        #[arg(long)]
        sub: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
    },
    /// Compare restriction of products with products of restrictions.
    Gap {
        file: PathBuf,
        #[arg(long)]
        sub: String,
        #[arg(long, default_value_t = 50)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sub-semihypergroup TLIM against H-invariant means on the whole structure.
    Thm2 {
        file: PathBuf,
        #[arg(long)]
        sub: String,
    },
    /// Write a built-in structure in .shg form.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        params: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Failure that ends a command early, with its exit code.
struct Abort {
    code: i32,
    message: String,
}

impl Abort {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Abort { code, message: message.into() }
    }
}

impl From<AmenabilityError> for Abort {
    fn from(e: AmenabilityError) -> Self {
        match e {
            AmenabilityError::Structure(StructureError::NotClosed { set }) => {
                Abort::new(EXIT_USAGE, format!("{set} is not closed under convolution"))
            }
            AmenabilityError::Structure(e) => Abort::new(EXIT_USAGE, e.to_string()),
            other => Abort::new(EXIT_SOFTWARE, other.to_string()),
        }
    }
}

struct Outcome {
    code: i32,
    text: String,
    result: serde_json::Value,
    structure: Option<FiniteSemihypergroup>,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let name = echo.iter().find(|a| !a.starts_with("--") && *a != "text" && *a != "json").cloned().unwrap_or_default();

    if let Command::Gen { kind, params, output } = &cli.command {
        return generate(*kind, params, output.as_deref(), out, err);
    }

    let outcome = match execute(&cli.command) {
        Ok(outcome) => outcome,
        Err(abort) => {
            let _ = writeln!(err, "shg: {}", abort.message);
            if cli.format == OutputFormat::Json {
                let mut report = RunReport::new(&name, &echo);
                report.result = json!({ "error": abort.message });
                report.exit_code = abort.code;
                let _ = out.write_all(report.to_json().as_bytes());
            }
            return abort.code;
        }
    };
    match cli.format {
        OutputFormat::Text => {
            let _ = out.write_all(outcome.text.as_bytes());
        }
        OutputFormat::Json => {
            let mut report = RunReport::new(&name, &echo);
            if let Some(k) = &outcome.structure {
                report = report.with_structure(k);
            }
            report.result = outcome.result;
            report.exit_code = outcome.code;
            let _ = out.write_all(report.to_json().as_bytes());
        }
    }
    outcome.code
}

fn read_file(path: &Path) -> Result<String, Abort> {
    std::fs::read_to_string(path).map_err(|e| Abort::new(EXIT_NO_INPUT, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<FiniteSemihypergroup, Abort> {
    let text = read_file(path)?;
    format::parse_structure(&text).map_err(|e| Abort::new(EXIT_INVALID_STRUCTURE, format!("{}: {e}", path.display())))
}

fn parse_sub(k: &FiniteSemihypergroup, spec: &str) -> Result<PointSet, Abort> {
    let n = k.points();
    let mut indices = Vec::new();
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let index = token
            .parse::<usize>()
            .ok()
            .or_else(|| k.names().and_then(|names| names.iter().position(|name| name == token)))
            .ok_or_else(|| Abort::new(EXIT_USAGE, format!("`{token}` is not a point")))?;
        if index >= n {
            return Err(Abort::new(EXIT_USAGE, format!("point {index} out of range for {n} points")));
        }
        indices.push(index);
    }
    if indices.is_empty() {
        return Err(Abort::new(EXIT_USAGE, "--sub needs at least one point"));
    }
    let h = PointSet::from_indices(n, indices);
    if !k.is_closed(&h) {
        return Err(Abort::new(EXIT_USAGE, format!("{h} is not closed under convolution")));
    }
    Ok(h)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn to_value<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("report values serialize")
}

fn execute(command: &Command) -> Result<Outcome, Abort> {
    match command {
        Command::Verify { file } => verify(file),
        Command::Amen { file, samples, seed } => amen(file, *samples, *seed),
        Command::Mean { file, sub, mode } => mean(file, sub.as_deref(), *mode),
        Command::Gap { file, sub, samples, seed } => gap(file, sub, *samples, *seed),
        Command::Thm2 { file, sub } => thm2(file, sub),
        Command::Gen { .. } => unreachable!("handled before execute"),
    }
}

fn verify(file: &Path) -> Result<Outcome, Abort> {
    let text = read_file(file)?;
    let parsed = format::parse_tensor(&text)
        .map_err(|e: ParseError| Abort::new(EXIT_INVALID_STRUCTURE, format!("{}: {e}", file.display())))?;
    let axioms = parsed.tensor.verify_axioms();
    if !axioms.is_empty() {
        let mut out = format!("valid: no\n{axioms}");
        if !out.ends_with('\n') {
            out.push('\n');
        }
        return Ok(Outcome {
            code: EXIT_INVALID_STRUCTURE,
            text: out,
            result: json!({ "valid": false, "axioms": to_value(&axioms) }),
            structure: None,
        });
    }
    let k = FiniteSemihypergroup::new(parsed.tensor, parsed.names).map_err(|e| Abort::new(EXIT_INVALID_STRUCTURE, e.to_string()))?;
    let mut out = String::new();
    let _ = writeln!(out, "valid: yes ({} points)", k.points());
    let identity = k.detect_identity();
    let hypergroup = k.hypergroup_structure();
    let _ = writeln!(out, "identity: {}", identity.map_or("none".to_string(), |e| k.label(e)));
    let _ = writeln!(out, "commutative: {}", yes(k.is_commutative()));
    match &hypergroup {
        Some(hg) => {
            let _ = writeln!(out, "hypergroup: yes, involution {:?}", hg.involution());
        }
        None => {
            let _ = writeln!(out, "hypergroup: no");
        }
    }
    let subs = if k.points() <= DEFAULT_ENUMERATION_CAP {
        k.enumerate_sub_semihypergroups(None).ok()
    } else {
        None
    };
    let mut sub_rows = Vec::new();
    if let Some(subs) = &subs {
        let _ = writeln!(out, "sub-semihypergroups: {}", subs.len());
        for sub in subs {
            let type_l = k.is_type_l(&sub.set);
            let mut line = format!("  {} Type L: {}", sub.set, yes(type_l));
            if let Some(is_sub) = sub.sub_hypergroup {
                let _ = write!(line, ", sub-hypergroup: {}", yes(is_sub));
            }
            let _ = writeln!(out, "{line}");
            sub_rows.push(json!({ "set": to_value(&sub.set), "type_l": type_l, "sub_hypergroup": sub.sub_hypergroup }));
        }
    }
    Ok(Outcome {
        code: EXIT_OK,
        text: out,
        result: json!({
            "valid": true,
            "identity": identity,
            "commutative": k.is_commutative(),
            "involution": hypergroup.as_ref().map(|hg| hg.involution().to_vec()),
            "sub_semihypergroups": subs.map(|_| sub_rows),
        }),
        structure: Some(k),
    })
}

fn amen(file: &Path, samples: usize, seed: u64) -> Result<Outcome, Abort> {
    let k = load(file)?;
    let options = Condition3Options { random_witnesses: samples, seed };
    let report = amenability::verify_amenability_equivalence(&k, options)?;
    let mut out = String::new();
    let _ = writeln!(out, "TLIM: {}", yes(report.tlim_exists));
    if let Some(cert) = &report.tlim {
        let _ = writeln!(out, "  m = {}", cert.mean);
    }
    let _ = writeln!(out, "minimal defect: {}", report.defect.minimal_defect);
    match report.condition3.refuting_witness() {
        Some(w) => {
            let _ = writeln!(out, "norm condition: fails for {} (inf {} > |mass| {})", w.label, w.infimum, w.mass_abs);
        }
        None => {
            let _ = writeln!(out, "norm condition: holds on {} witnesses", report.condition3.witnesses.len());
        }
    }
    match &report.stationary {
        Some(nu) => {
            let _ = writeln!(out, "stationary measure: yes, p_z*nu = p_0*nu for nu = {nu}");
        }
        None => {
            let _ = writeln!(out, "stationary measure: no");
        }
    }
    let _ = writeln!(out, "agreement: {}", yes(report.consistent));
    for note in &report.notes {
        let _ = writeln!(out, "note: {note}");
    }
    Ok(Outcome {
        code: if report.consistent { EXIT_OK } else { EXIT_NEGATIVE },
        text: out,
        result: to_value(&report),
        structure: Some(k),
    })
}

fn mean(file: &Path, sub: Option<&str>, mode: ModeArg) -> Result<Outcome, Abort> {
    let k = load(file)?;
    let mut out = String::new();
    let Some(spec) = sub else {
        return match amenability::find_tlim(&k)? {
            Some(cert) => {
                let _ = writeln!(out, "TLIM: yes\n  m = {}\n  residuals: all 0", cert.mean);
                Ok(Outcome { code: EXIT_OK, text: out, result: json!({ "tlim": to_value(&cert) }), structure: Some(k) })
            }
            None => {
                let defect = amenability::minimize_defect(&k)?;
                let _ = writeln!(out, "TLIM: no, δ* = {}\n  minimizer = {}", defect.minimal_defect, defect.minimizer);
                Ok(Outcome {
                    code: EXIT_NEGATIVE,
                    text: out,
                    result: json!({ "tlim": null, "defect": to_value(&defect) }),
                    structure: Some(k),
                })
            }
        };
    };
    let h = parse_sub(&k, spec)?;
    let (mass_mode, label) = match mode {
        ModeArg::Full => (MassMode::Full, "full"),
        ModeArg::Max => (MassMode::Max, "max"),
    };
    let found = amenability::find_h_invariant_mean(&k, &h, mass_mode)?;
    let _ = writeln!(out, "H-invariant mean ({label}) for H = {h}: {}", yes(found.is_some()));
    if let Some(cert) = &found {
        let _ = writeln!(out, "  m = {}", cert.mean);
        if let Some(mass) = &cert.mass_on_h {
            let _ = writeln!(out, "  m(H) = {mass}");
        }
    }
    Ok(Outcome {
        code: if found.is_some() { EXIT_OK } else { EXIT_NEGATIVE },
        text: out,
        result: json!({ "h": to_value(&h), "mode": label, "mean": to_value(&found) }),
        structure: Some(k),
    })
}

fn gap(file: &Path, sub: &str, samples: u64, seed: u64) -> Result<Outcome, Abort> {
    let k = load(file)?;
    let h = parse_sub(&k, sub)?;
    let hypergroup = k.hypergroup_structure();
    let n = k.points();
    let reports = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (mu, nu) = sampling::gap_sample(n, &h, seed, i);
            amenability::restriction_gap(&k, &h, &mu, &nu, hypergroup.as_ref())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let failures: Vec<(usize, String)> = reports
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.failures().into_iter().map(move |f| (i, f)))
        .collect();
    let max_gap = reports.iter().map(|r| r.gap.clone()).max().unwrap_or_else(rational::zero);
    let zero_gaps = reports.iter().filter(|r| r.gap == rational::zero()).count();
    let mut out = String::new();
    let _ = writeln!(out, "H = {h}, samples: {samples}, seed: {seed}");
    let _ = writeln!(out, "hypergroup: {}, sub-hypergroup: {}", yes(hypergroup.is_some()), yes(hypergroup.as_ref().is_some_and(|hg| hg.is_sub_hypergroup(&h))));
    let _ = writeln!(out, "largest gap: {max_gap}, zero gaps: {zero_gaps}");
    if failures.is_empty() {
        let _ = writeln!(out, "bounds: all hold");
    } else {
        let _ = writeln!(out, "bounds: {} failures", failures.len());
        for (i, f) in &failures {
            let _ = writeln!(out, "  sample {i}: {f}");
        }
    }
    Ok(Outcome {
        code: if failures.is_empty() { EXIT_OK } else { EXIT_NEGATIVE },
        text: out,
        result: json!({
            "h": to_value(&h),
            "samples": samples,
            "seed": seed,
            "all_hold": failures.is_empty(),
            "reports": to_value(&reports),
        }),
        structure: Some(k),
    })
}

fn thm2(file: &Path, sub: &str) -> Result<Outcome, Abort> {
    let k = load(file)?;
    let h = parse_sub(&k, sub)?;
    let report = amenability::verify_sub_equivalence(&k, &h)?;
    let (a, b, c) = report.outcomes();
    let mut out = String::new();
    if a == b && b == c {
        let _ = write!(out, "(a)=(b)=(c)={}", yes(a));
    } else {
        let _ = write!(out, "(a)={} (b)={} (c)={}", yes(a), yes(b), yes(c));
    }
    let _ = writeln!(out, ", Type L: {}", yes(report.type_l));
    if let Some(m) = &report.standalone_tlim {
        let _ = writeln!(out, "  TLIM of H: {m}");
    }
    if let Some(cert) = &report.full_mass {
        let _ = writeln!(out, "  full-mass H-invariant mean: {}", cert.mean);
    }
    if let Some(mass) = &report.max_mass {
        let _ = writeln!(out, "  largest mass on H: {mass}");
    }
    let _ = writeln!(out, "agreement: {}", yes(report.consistent));
    Ok(Outcome {
        code: if report.consistent { EXIT_OK } else { EXIT_NEGATIVE },
        text: out,
        result: to_value(&report),
        structure: Some(k),
    })
}

fn instance(kind: GenKind, params: &[String]) -> Result<FiniteSemihypergroup, Abort> {
    let usage = |what: &str| Abort::new(EXIT_USAGE, format!("gen: expected {what}"));
    let single = || match params {
        [p] => Ok(p.as_str()),
        _ => Err(usage("exactly one parameter")),
    };
    let count = || single()?.parse::<usize>().map_err(|_| usage("a point count"));
    let built = match kind {
        GenKind::RightZero => builders::build_instance(&InstanceKind::RightZero(count()?)),
        GenKind::LeftZero => builders::build_instance(&InstanceKind::LeftZero(count()?)),
        GenKind::TwoPoint => {
            let theta = rational::parse(single()?).ok_or_else(|| usage("θ as p/q"))?;
            builders::build_instance(&InstanceKind::TwoPoint(theta))
        }
        GenKind::Group => builders::parse_group_spec(single()?).and_then(|t| builders::build_instance(&InstanceKind::Group(t))),
        GenKind::Classes => {
            builders::parse_group_spec(single()?).and_then(|t| builders::build_instance(&InstanceKind::ConjugacyClass(t)))
        }
        GenKind::Random => {
            let seed = single()?.parse::<u64>().map_err(|_| usage("a seed"))?;
            Ok(sampling::random_structure(seed))
        }
    };
    built.map_err(|e| Abort::new(EXIT_USAGE, e.to_string()))
}

fn generate(kind: GenKind, params: &[String], output: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let k = match instance(kind, params) {
        Ok(k) => k,
        Err(abort) => {
            let _ = writeln!(err, "shg: {}", abort.message);
            return abort.code;
        }
    };
    let text = format::emit_structure(&k);
    match output {
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "shg: {}: {e}", path.display());
                EXIT_NO_INPUT
            }
        },
        None => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
    }
}
