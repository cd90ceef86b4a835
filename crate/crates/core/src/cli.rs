//! The `sidon` command-line tool: argument parsing, command dispatch and
//! output rendering.
//!
//! Exit status: 0 verified, 1 verification failed, 2 invalid input,
//! 3 ceiling exceeded.

use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::admissibility::{cross_validate, CrossValidation};
use crate::arith::factorial;
use crate::builder::{build_system, density_table, lower_bound_witness, BuildOptions, ConstructionCertificate, DensityRow};
use crate::classical::{bose_chowla_set, is_bhg, rep_orbit, EnumerationLimits};
use crate::error::{Error, Result};
use crate::ff::{FieldTower, TowerConfig, DEFAULT_FIELD_CEILING};
use crate::linear_form::{counting_bound, system_profile, CountingBound, LinearForm, SidonSystem, SystemSpec, VerificationReport};
use crate::oracle::{classical_bracket, exact_classical, exact_system, oracle_vs_construction, ClassicalBracket, ComparisonReport, ExtremalResult, OracleConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "sidon", version, about = "Construct and verify Sidon sets and Sidon systems for linear forms")]
pub struct Cli {
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Upper bound on the field size q^h.
    #[arg(long, global = true, default_value_t = DEFAULT_FIELD_CEILING)]
    pub ceiling: u64,

    /// Multiplicity to check against (system, verify, oracle).
    #[arg(long, global = true)]
    pub g: Option<u64>,

    /// Allow prime powers q in `system` (results are marked unproven).
    #[arg(long, global = true)]
    pub experimental_prime_power: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bose–Chowla set over GF(p^k) ⊂ GF(p^(k·h)), verified modulo q^h - 1.
    Classical {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        h: u32,
    },
    /// System of multiplicity at most h! for a form and an admissible prime q.
    System {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        phi: Vec<i64>,
        #[arg(long)]
        q: u64,
    },
    /// Largest admissible q with q^h - 2 <= n, and its system.
    Witness {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        phi: Vec<i64>,
        #[arg(long)]
        n: u64,
    },
    /// Admissible primes up to a bound, cross-checked against the CRT progression.
    Admissible {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        phi: Vec<i64>,
        #[arg(long)]
        bound: u64,
    },
    /// Witness q and q / n^(1/h) for each n.
    Table {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        phi: Vec<i64>,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
    },
    /// Exact extremal value by exhaustive search, bracketed by construction
    /// and counting bounds. With --phi: two-set systems; otherwise B_h sets.
    Oracle {
        #[arg(long)]
        n: u64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "h")]
        phi: Option<Vec<i64>>,
        #[arg(long)]
        h: Option<usize>,
    },
    /// Re-verify a system JSON {"phi": [...], "sets": [[...]], "g": int|null}
    /// read from FILE or standard input.
    Verify { file: Option<PathBuf> },
}

/// Rendered output and whether every claim in it was verified.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub body: String,
    pub verified: bool,
}

impl Rendered {
    pub fn exit_code(&self) -> i32 {
        if self.verified {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalOutput {
    pub p: u64,
    pub k: u32,
    pub h: u32,
    pub q: u64,
    pub modulus: u64,
    pub set: Vec<i64>,
    pub max_count: u64,
    pub verified: bool,
    #[serde(skip)]
    profile: Vec<(i64, u64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemOutput {
    pub phi: Vec<i64>,
    pub sets: Vec<Vec<i64>>,
    pub g: u64,
    pub certificate: ConstructionCertificate,
    pub report: VerificationReport,
    pub counting_bound: Option<CountingBound>,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessOutput {
    pub phi: Vec<i64>,
    pub n: u64,
    pub q: Option<u64>,
    pub system: Option<SystemOutput>,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibleOutput {
    pub phi: Vec<i64>,
    #[serde(flatten)]
    pub cross_validation: CrossValidation,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableOutput {
    pub phi: Vec<i64>,
    pub g: u64,
    pub rows: Vec<DensityRow>,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleOutput {
    pub result: ExtremalResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<ClassicalBracket>,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutput {
    pub phi: Vec<i64>,
    pub sets: Vec<Vec<i64>>,
    pub g: Option<u64>,
    pub report: VerificationReport,
    pub verified: bool,
}

fn build_options(cli: &Cli) -> BuildOptions {
    BuildOptions {
        experimental_prime_power: cli.experimental_prime_power,
        tower: TowerConfig { field_ceiling: cli.ceiling, ..TowerConfig::default() },
        limits: EnumerationLimits::default(),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

fn csv_rows<R: AsRef<[String]>>(header: &[&str], rows: impl IntoIterator<Item = R>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r.as_ref()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn profile_csv(profile: impl IntoIterator<Item = (i64, u64)>) -> String {
    csv_rows(&["value", "count"], profile.into_iter().map(|(w, c)| vec![w.to_string(), c.to_string()]))
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn sets_text(sets: &[Vec<i64>]) -> String {
    sets.iter()
        .enumerate()
        .map(|(i, s)| format!("A_{} = {{{}}}\n", i + 1, join(s)))
        .collect()
}

fn system_output(phi: &LinearForm, system: &SidonSystem, cert: ConstructionCertificate, g: u64, opts: &BuildOptions) -> Result<SystemOutput> {
    let system = system.clone().with_declared_g(Some(g));
    let report = system_profile(phi, &system, &opts.limits)?;
    let n = cert.group_order as i64 - 1;
    let cb = if report.max_multiplicity <= g {
        Some(counting_bound(phi, &system, g, n, &opts.limits)?)
    } else {
        None
    };
    let recheck = cert.recheck(&opts.limits).is_ok();
    let verified = recheck && report.checks_hold() && cb.as_ref().is_some_and(|c| c.holds);
    Ok(SystemOutput {
        phi: phi.coeffs().to_vec(),
        sets: system.sets().to_vec(),
        g,
        certificate: cert,
        report,
        counting_bound: cb,
        verified,
    })
}

fn render_system(out: &SystemOutput, format: Format) -> String {
    match format {
        Format::Json => json(out),
        Format::Csv => profile_csv(out.report.profile.iter().map(|(&w, &c)| (w, c))),
        Format::Text => {
            let mut s = format!("phi = ({})  q = {}  h = {}\n", join(&out.phi), out.certificate.q, out.certificate.h);
            s += &sets_text(&out.sets);
            let _ = writeln!(
                s,
                "max multiplicity {} (g = {}), image size {}, product {}",
                out.report.max_multiplicity, out.g, out.report.image_size, out.report.product_size
            );
            if let Some(cb) = &out.counting_bound {
                let _ = writeln!(s, "counting bound: {} <= {} ({})", cb.product_size, cb.ceiling, if cb.holds { "holds" } else { "FAILS" });
            }
            if !out.certificate.proven {
                s += "prime-power q: experimental, no proof backs the h! bound\n";
            }
            let _ = writeln!(s, "verified: {}", out.verified);
            s
        }
    }
}

fn cmd_classical(cli: &Cli, p: u64, k: u32, h: u32) -> Result<Rendered> {
    let opts = build_options(cli);
    if let (false, Some((base, e))) = (crate::arith::is_prime(p), crate::arith::prime_power(p)) {
        return Err(Error::InvalidInput(format!("{p} is not prime (use --p {base} --k {})", e * k)));
    }
    let tower = FieldTower::with_config(p, k, h, opts.tower)?;
    let set = bose_chowla_set(&tower)?;
    let m = tower.order();
    let check = is_bhg(&set, h as usize, 1, Some(m), &opts.limits)?;
    let profile = rep_orbit(&set, h as usize, Some(m), &opts.limits)?;
    let in_range = set.elements().iter().all(|&a| a >= 1 && a < m as i64);
    let out = ClassicalOutput {
        p,
        k,
        h,
        q: tower.q(),
        modulus: m,
        set: set.elements().to_vec(),
        max_count: check.max_count,
        verified: check.holds && in_range && set.len() as u64 == tower.q(),
        profile: profile.counts.into_iter().collect(),
    };
    let body = match cli.format {
        Format::Json => json(&out),
        Format::Csv => profile_csv(out.profile.iter().copied()),
        Format::Text => format!(
            "q = {} (p = {}, k = {}), h = {}\nA = {{{}}}\nmax multiset count mod {}: {}\nverified: {}\n",
            out.q,
            p,
            k,
            h,
            join(&out.set),
            m,
            out.max_count,
            out.verified
        ),
    };
    Ok(Rendered { body, verified: out.verified })
}

fn cmd_system(cli: &Cli, phi: &[i64], q: u64) -> Result<Rendered> {
    let phi = LinearForm::new(phi.to_vec())?;
    let opts = build_options(cli);
    let g = cli.g.unwrap_or_else(|| factorial(phi.h() as u64));
    let (system, cert) = build_system(&phi, q, &opts)?;
    let out = system_output(&phi, &system, cert, g, &opts)?;
    Ok(Rendered { body: render_system(&out, cli.format), verified: out.verified })
}

fn cmd_witness(cli: &Cli, phi: &[i64], n: u64) -> Result<Rendered> {
    let phi = LinearForm::new(phi.to_vec())?;
    let opts = build_options(cli);
    let g = factorial(phi.h() as u64);
    let system = match lower_bound_witness(&phi, n, &opts)? {
        Some(w) => Some(system_output(&phi, &w.system, w.certificate, g, &opts)?),
        None => None,
    };
    let q = system.as_ref().map(|s| s.certificate.q);
    let verified = system.as_ref().is_none_or(|s| s.verified && s.certificate.group_order - 1 <= n);
    let out = WitnessOutput { phi: phi.coeffs().to_vec(), n, q, system, verified };
    let body = match cli.format {
        Format::Json => json(&out),
        Format::Csv => csv_rows(&["n", "q"], [vec![n.to_string(), q.map_or(String::new(), |q| q.to_string())]]),
        Format::Text => match &out.system {
            Some(s) => format!("F_{{phi,{g}}}({n}) >= {}\n{}", s.certificate.q, render_system(s, Format::Text)),
            None => format!("no admissible prime q with q^{} - 2 <= {n}\n", phi.h()),
        },
    };
    Ok(Rendered { body, verified })
}

fn cmd_admissible(cli: &Cli, phi: &[i64], bound: u64) -> Result<Rendered> {
    let phi = LinearForm::new(phi.to_vec())?;
    let cv = cross_validate(&phi, bound)?;
    let out = AdmissibleOutput { phi: phi.coeffs().to_vec(), verified: cv.holds, cross_validation: cv };
    let cv = &out.cross_validation;
    let body = match cli.format {
        Format::Json => json(&out),
        Format::Csv => csv_rows(
            &["prime", "in_progression"],
            cv.direct_primes
                .iter()
                .map(|q| vec![q.to_string(), cv.progression.contains(*q).to_string()]),
        ),
        Format::Text => format!(
            "admissible primes <= {}: {}\nprogression {} mod {}: {}\nviolations: {}\nverified: {}\n",
            bound,
            join(&cv.direct_primes),
            cv.progression.u,
            cv.progression.modulus,
            join(&cv.progression_primes),
            if cv.violations.is_empty() { "none".to_string() } else { join(&cv.violations) },
            out.verified
        ),
    };
    Ok(Rendered { body, verified: out.verified })
}

fn cmd_table(cli: &Cli, phi: &[i64], ns: &[u64]) -> Result<Rendered> {
    let phi = LinearForm::new(phi.to_vec())?;
    let opts = build_options(cli);
    let rows = density_table(&phi, ns, &opts)?;
    let out = TableOutput { phi: phi.coeffs().to_vec(), g: factorial(phi.h() as u64), rows, verified: true };
    let opt = |v: Option<String>| v.unwrap_or_default();
    let body = match cli.format {
        Format::Json => json(&out),
        Format::Csv => csv_rows(
            &["n", "q", "ratio"],
            out.rows.iter().map(|r| {
                vec![r.n.to_string(), opt(r.q.map(|q| q.to_string())), opt(r.ratio.map(|x| format!("{x:.6}")))]
            }),
        ),
        Format::Text => out
            .rows
            .iter()
            .map(|r| match (r.q, r.ratio) {
                (Some(q), Some(x)) => format!("n = {:>8}  q = {:>6}  q/n^(1/{}) = {x:.6}\n", r.n, q, phi.h()),
                _ => format!("n = {:>8}  (no witness)\n", r.n),
            })
            .collect(),
    };
    Ok(Rendered { body, verified: true })
}

fn cmd_oracle(cli: &Cli, n: u64, phi: Option<&[i64]>, h: Option<usize>) -> Result<Rendered> {
    let opts = build_options(cli);
    let config = OracleConfig::default();
    let g = cli.g.unwrap_or(1);
    let out = match phi {
        Some(phi) => {
            let phi = LinearForm::new(phi.to_vec())?;
            let result = exact_system(&phi, n, g, &config)?;
            let comparison = oracle_vs_construction(&phi, n, g, &config, &opts)?;
            let witness_ok = crate::oracle::verify_witness(&result, Some(&phi), &opts.limits)?;
            let verified = comparison.holds && witness_ok;
            OracleOutput { result, comparison: Some(comparison), bracket: None, verified }
        }
        None => {
            let h = h.unwrap_or(2);
            let result = exact_classical(n, h, g, &config)?;
            let witness_ok = crate::oracle::verify_witness(&result, None, &opts.limits)?;
            let bracket = if g == 1 { Some(classical_bracket(n, h, &config, &opts)?) } else { None };
            let verified = witness_ok && bracket.as_ref().is_none_or(|b| b.holds);
            OracleOutput { result, comparison: None, bracket, verified }
        }
    };
    let witness = serde_json::to_string(&out.result.witness).expect("serializable");
    let r = &out.result;
    let body = match cli.format {
        Format::Json => json(&out),
        Format::Csv => csv_rows(
            &["n", "h", "g", "exact", "witness"],
            [vec![r.n.to_string(), r.h.to_string(), r.g.to_string(), r.exact_value.to_string(), witness]],
        ),
        Format::Text => {
            let mut s = format!("n = {}, h = {}, g = {}: exact = {}, witness {}\n", r.n, r.h, r.g, r.exact_value, witness);
            if let Some(c) = &out.comparison {
                let _ = writeln!(
                    s,
                    "construction {} <= exact {} <= counting ceiling {}",
                    c.construction_q.map_or("n/a".into(), |q| q.to_string()),
                    c.exact,
                    c.counting_ceiling
                );
            }
            if let Some(b) = &out.bracket {
                let _ = writeln!(
                    s,
                    "construction {} <= exact {} <= multiset ceiling {}{}",
                    b.construction_q.map_or("n/a".into(), |q| q.to_string()),
                    b.exact,
                    b.multiset_ceiling,
                    b.counting_ceiling.map_or(String::new(), |c| format!(", counting ceiling {c}"))
                );
            }
            let _ = writeln!(s, "verified: {}", out.verified);
            s
        }
    };
    Ok(Rendered { body, verified: out.verified })
}

/// Verifies a system given as JSON text.
pub fn verify_json(text: &str, g_override: Option<u64>, format: Format) -> Result<Rendered> {
    let spec: SystemSpec = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("system JSON: {e}")))?;
    let (phi, system) = spec.into_parts()?;
    let g = g_override.or(system.declared_g());
    let system = system.with_declared_g(g);
    let report = system_profile(&phi, &system, &EnumerationLimits::default())?;
    let verified = report.checks_hold();
    let out = VerifyOutput { phi: phi.coeffs().to_vec(), sets: system.sets().to_vec(), g, report, verified };
    let body = match format {
        Format::Json => json(&out),
        Format::Csv => profile_csv(out.report.profile.iter().map(|(&w, &c)| (w, c))),
        Format::Text => format!(
            "phi = ({})\n{}max multiplicity {}{}\nverified: {}\n",
            join(&out.phi),
            sets_text(&out.sets),
            out.report.max_multiplicity,
            g.map_or(String::new(), |g| format!(" (g = {g})")),
            verified
        ),
    };
    Ok(Rendered { body, verified })
}

fn cmd_verify(cli: &Cli, file: Option<&PathBuf>) -> Result<Rendered> {
    let text = match file {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?,
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::InvalidInput(format!("cannot read standard input: {e}")))?;
            s
        }
    };
    verify_json(&text, cli.g, cli.format)
}

pub fn run(cli: &Cli) -> Result<Rendered> {
    if cli.ceiling < 4 {
        return Err(Error::InvalidInput("ceiling must be at least 4".into()));
    }
    if cli.g == Some(0) {
        return Err(Error::InvalidInput("g must be at least 1".into()));
    }
    match &cli.command {
        Command::Classical { p, k, h } => cmd_classical(cli, *p, *k, *h),
        Command::System { phi, q } => cmd_system(cli, phi, *q),
        Command::Witness { phi, n } => cmd_witness(cli, phi, *n),
        Command::Admissible { phi, bound } => cmd_admissible(cli, phi, *bound),
        Command::Table { phi, n } => cmd_table(cli, phi, n),
        Command::Oracle { n, phi, h } => cmd_oracle(cli, *n, phi.as_deref(), *h),
        Command::Verify { file } => cmd_verify(cli, file.as_ref()),
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: &'a str,
    message: String,
}

/// JSON diagnostic for an error, as written to standard error.
pub fn error_json(err: &Error) -> String {
    serde_json::to_string(&serde_json::json!({ "error": ErrorBody { code: err.code(), message: err.to_string() } }))
        .expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<Rendered> {
        let cli = Cli::try_parse_from(std::iter::once("sidon").chain(args.iter().copied())).unwrap();
        run(&cli)
    }

    #[test]
    fn classical_json() {
        let r = run_args(&["classical", "--p", "3", "--h", "2"]).unwrap();
        assert!(r.verified);
        let v: serde_json::Value = serde_json::from_str(&r.body).unwrap();
        assert_eq!(v["set"], serde_json::json!([1, 6, 7]));
        assert_eq!(v["modulus"], 8);
    }

    #[test]
    fn classical_rejects_composite_p() {
        assert!(matches!(run_args(&["classical", "--p", "4", "--h", "2"]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn negative_coefficients_parse() {
        let r = run_args(&["admissible", "--phi", "-1,5", "--bound", "50"]).unwrap();
        assert!(r.verified);
    }

    #[test]
    fn verify_override_g() {
        let text = r#"{"phi": [1, 1], "sets": [[0, 1], [0, 1]], "g": 2}"#;
        assert!(verify_json(text, None, Format::Json).unwrap().verified);
        assert!(!verify_json(text, Some(1), Format::Json).unwrap().verified);
        assert!(verify_json("{", None, Format::Json).is_err());
    }

    #[test]
    fn error_body() {
        let e = Error::InvalidInput("x".into());
        let v: serde_json::Value = serde_json::from_str(&error_json(&e)).unwrap();
        assert_eq!(v["error"]["code"], "invalid_input");
    }
}
