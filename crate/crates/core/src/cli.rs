//! Command-line front end. Every subcommand produces an [`Outcome`], which is
//! written as text, JSON, CSV or SVG.
//!
//! Exit codes: 0 when the computation succeeded and any check it carries
//! passed, 1 when a check failed, 2 for usage and configuration errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis;
use crate::combinatorics::PartialPartition;
use crate::error::{QfockError, Result};
use crate::fock::{FockSpace, FockVector, Letter, SpaceConfig, Word, DEFAULT_MAX_DIM};
use crate::identities::{self, ClaimReading, FaultInjection};
use crate::render::{render_partition, RenderFormat};
use crate::scalars::{QPolynomial, Scalar};
use crate::wick;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the number of basis words of a space.
pub const MAX_DIM_VAR: &str = "QFOCK_MAX_DIM";

/// Tolerance for floating-point checks reported by the CLI.
const FLOAT_TOL: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(name = "qfock", version, about = "Computations on truncated q-Fock spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Svg,
    Ascii,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Dimension of the one-particle space H.
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Copies of H: 1, or 2 for H ⊕ H.
    #[arg(long, default_value_t = 1)]
    copies: usize,
    /// Truncation degree; each command picks a default when omitted.
    #[arg(long)]
    max_degree: Option<usize>,
    /// `generic` for exact polynomials in q, or a number in (-1, 1).
    #[arg(long, default_value = "generic", allow_hyphen_values = true)]
    q: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Fault {
    /// Corrupt the verifier on purpose.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gram matrix of the q-inner product in one degree.
    Gram {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: usize,
    },
    /// Vacuum moment of field operators, e.g. `--letters 1,1,~2,2`.
    Moment {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        letters: String,
    },
    /// Apply a Wick product to the vacuum or to a word.
    Wick {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        word: String,
        /// Word to act on (vacuum when omitted).
        #[arg(long)]
        on: Option<String>,
        /// Also list the level-k coset expansion.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Product of the Wick products of the two halves of a word.
    Split {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        word: String,
        /// Length of the right half.
        #[arg(long)]
        k: usize,
    },
    /// Colored finite-N moments against the limit moment.
    Clt {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        letters: String,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    /// Exhaustive check of the closed form of iota'.
    VerifyIota {
        #[arg(long, default_value_t = 8)]
        nmax: usize,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        fault: Fault,
    },
    /// Inclusion-exclusion for Wick products, all words up to a degree.
    VerifyIe {
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        fault: Fault,
    },
    /// Alternating sum over pair subsets of partial partitions.
    VerifyClaim {
        #[arg(long, default_value_t = 8)]
        nmax: usize,
        #[arg(long, default_value_t = 3)]
        max_pairs: usize,
        #[arg(long, value_enum, default_value_t = Reading::PrimePlain)]
        reading: Reading,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        fault: Fault,
    },
    /// Schatten norm of the diagonal map Phi_{e1,e1}.
    Schatten {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: f64,
    },
    /// Check that Phi_{h,k} is diagonal with eigenvalues q^n <h,k>.
    PhiCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        h: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        k: String,
    },
    /// Block norms and decay of Phi_{xi,xi} for a word of second-copy letters.
    Decay {
        #[command(flatten)]
        common: Common,
        /// Indices of the second-copy letters of xi.
        #[arg(long, default_value = "1")]
        letters: String,
    },
    /// Deformation estimate for the rotation dilation over a grid of t.
    Deform {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        kcut: usize,
        /// Comma-separated t values; defaults to 2^-kcut times 0.1, ..., 0.9.
        #[arg(long)]
        t: Option<String>,
    },
    /// Norm of the Ornstein-Uhlenbeck tail beyond a degree.
    Tail {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        word: String,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        cutoff: usize,
    },
    /// Draw a partial partition.
    Render {
        #[command(flatten)]
        common: Common,
        /// Built-in example: fig1, fig2 or rho3.
        #[arg(long)]
        figure: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        /// Size of the right block.
        #[arg(long)]
        k: Option<usize>,
        /// Pairs such as `2-5,4-7`.
        #[arg(long, default_value = "")]
        pairs: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Reading {
    PrimePrime,
    PrimePlain,
}

impl From<Reading> for ClaimReading {
    fn from(r: Reading) -> Self {
        match r {
            Reading::PrimePrime => ClaimReading::PrimePrime,
            Reading::PrimePlain => ClaimReading::PrimePlain,
        }
    }
}

/// Parsed value of `--q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QArg {
    Generic,
    Float(f64),
}

impl QArg {
    pub fn parse(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("generic") {
            return Ok(QArg::Generic);
        }
        let q: f64 = s.parse().map_err(|_| QfockError::Parse(format!("--q expects `generic` or a number, got `{s}`")))?;
        crate::scalars::ScalarMode::float(q)?;
        Ok(QArg::Float(q))
    }

    fn json(&self) -> Value {
        match self {
            QArg::Generic => json!("generic"),
            QArg::Float(q) => json!(q),
        }
    }
}

/// Result of one subcommand before formatting.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub command: String,
    pub config: Value,
    pub results: Vec<Value>,
    pub verified: bool,
    pub violations: Vec<String>,
    pub text: String,
    /// Rows for CSV output, header `n,t,left,right,ratio`.
    pub csv_rows: Option<Vec<[String; 5]>>,
    pub svg: Option<String>,
}

impl Outcome {
    fn new(command: &str, config: Value) -> Self {
        Outcome {
            command: command.into(),
            config,
            results: Vec::new(),
            verified: true,
            violations: Vec::new(),
            text: String::new(),
            csv_rows: None,
            svg: None,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "verified": self.verified,
            "violations": self.violations,
        })
    }

    fn violation(&mut self, v: String) {
        self.verified = false;
        self.violations.push(v);
    }
}

/// Scalars as they appear in output: exact values become strings.
trait Emit: Scalar {
    fn emit(&self) -> Value;
}

impl Emit for f64 {
    fn emit(&self) -> Value {
        if self.is_finite() {
            json!(self)
        } else {
            json!(self.to_string())
        }
    }
}

impl Emit for QPolynomial {
    fn emit(&self) -> Value {
        json!(self.to_string())
    }
}

fn emit_vector<S: Emit>(v: &FockVector<S>) -> Value {
    Value::Array(v.terms().map(|(w, c)| json!({"word": w.to_string(), "coefficient": c.emit()})).collect())
}

fn max_dim() -> Result<usize> {
    match std::env::var(MAX_DIM_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| QfockError::Parse(format!("{MAX_DIM_VAR} must be a positive integer, got `{s}`"))),
        Err(_) => Ok(DEFAULT_MAX_DIM),
    }
}

/// Resolved configuration shared by the subcommands.
struct Config {
    d: usize,
    copies: usize,
    max_degree: usize,
    q: QArg,
}

impl Config {
    fn new(common: &Common, default_degree: usize) -> Result<Self> {
        if common.d == 0 {
            return Err(QfockError::Domain("--d must be at least 1".into()));
        }
        if common.copies != 1 && common.copies != 2 {
            return Err(QfockError::Domain(format!("--copies must be 1 or 2, got {}", common.copies)));
        }
        Ok(Config {
            d: common.d,
            copies: common.copies,
            max_degree: common.max_degree.unwrap_or(default_degree),
            q: QArg::parse(&common.q)?,
        })
    }

    fn json(&self) -> Value {
        json!({
            "d": self.d,
            "copies": self.copies,
            "max_degree": self.max_degree,
            "q": self.q.json(),
            "scalar_mode": match self.q { QArg::Generic => "exact", QArg::Float(_) => "float" },
        })
    }

    fn space_config(&self, copies: usize) -> SpaceConfig {
        SpaceConfig::new(self.d, copies, self.max_degree)
    }

    fn space<S: Scalar>(&self, q: S) -> Result<FockSpace<S>> {
        FockSpace::with_limit(self.space_config(self.copies), q, max_dim()?)
    }

    fn float_q(&self, command: &str) -> Result<f64> {
        match self.q {
            QArg::Float(q) => Ok(q),
            QArg::Generic => Err(QfockError::Domain(format!("`{command}` needs a numeric --q"))),
        }
    }

    fn float_spaces(&self, q: f64) -> Result<(FockSpace<f64>, FockSpace<f64>)> {
        let limit = max_dim()?;
        Ok((
            FockSpace::with_limit(self.space_config(2), q, limit)?,
            FockSpace::with_limit(self.space_config(1), q, limit)?,
        ))
    }
}

/// Letters like `1,2,~1`; a leading `~` selects the second copy.
pub fn parse_word(s: &str) -> Result<Word> {
    let s = s.trim();
    if s.is_empty() || s == "vacuum" {
        return Ok(Word::empty());
    }
    let letters = s
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            let (second, digits) = match tok.strip_prefix('~') {
                Some(rest) => (true, rest),
                None => (false, tok),
            };
            let index: usize = digits.parse().map_err(|_| QfockError::Parse(format!("bad letter `{tok}`")))?;
            if index == 0 {
                return Err(QfockError::Parse("letters are numbered from 1".into()));
            }
            Ok(if second { Letter::second(index) } else { Letter::first(index) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Word::new(letters))
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| QfockError::Parse(format!("bad number `{t}`"))))
        .collect()
}

fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (a, b) = t
                .split_once('-')
                .ok_or_else(|| QfockError::Parse(format!("pair `{t}` should look like `2-5`")))?;
            let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| QfockError::Parse(format!("bad pair `{t}`")));
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}

fn letter_vectors<S: Scalar>(space: &FockSpace<S>, word: &Word) -> Result<Vec<Vec<S>>> {
    space.check_letters(&FockVector::word(word.clone()))?;
    Ok(word.letters().iter().map(|&l| space.unit(l)).collect())
}

fn copies_for(word: &Word, requested: usize) -> usize {
    if word.second_copy_count() > 0 {
        2
    } else {
        requested
    }
}

/// Run the CLI on `argv` (program name first) and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (format, output) = match &cli.command {
        Command::Gram { common, .. }
        | Command::Moment { common, .. }
        | Command::Wick { common, .. }
        | Command::Split { common, .. }
        | Command::Clt { common, .. }
        | Command::VerifyIota { common, .. }
        | Command::VerifyIe { common, .. }
        | Command::VerifyClaim { common, .. }
        | Command::Schatten { common, .. }
        | Command::PhiCheck { common, .. }
        | Command::Decay { common, .. }
        | Command::Deform { common, .. }
        | Command::Tail { common, .. }
        | Command::Render { common, .. } => (common.format, common.output.clone()),
    };
    let outcome = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("qfock: {e}");
            return EXIT_USAGE;
        }
    };
    let body = match format_outcome(&outcome, format) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("qfock: {e}");
            return EXIT_USAGE;
        }
    };
    let written = match output {
        Some(path) => std::fs::write(&path, body.as_bytes()),
        None => std::io::stdout().write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("qfock: cannot write output: {e}");
        return EXIT_USAGE;
    }
    if outcome.verified {
        EXIT_OK
    } else {
        for v in outcome.violations.iter().take(10) {
            eprintln!("violation: {v}");
        }
        EXIT_VIOLATION
    }
}

fn format_outcome(outcome: &Outcome, format: Format) -> Result<String> {
    match format {
        Format::Text | Format::Ascii => Ok(outcome.text.clone()),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.to_json()).map_err(|e| QfockError::Parse(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let rows = outcome
                .csv_rows
                .as_ref()
                .ok_or_else(|| QfockError::Domain(format!("`{}` has no CSV output", outcome.command)))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| QfockError::Parse(e.to_string());
            w.write_record(["n", "t", "left", "right", "ratio"]).map_err(io)?;
            for r in rows {
                w.write_record(r).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| QfockError::Parse(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        Format::Svg => outcome
            .svg
            .clone()
            .ok_or_else(|| QfockError::Domain(format!("`{}` has no SVG output", outcome.command))),
    }
}

fn dispatch(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Gram { common, degree } => {
            let cfg = Config::new(common, *degree)?;
            match cfg.q {
                QArg::Generic => gram(&cfg, *degree, cfg.space(QPolynomial::q())?),
                QArg::Float(q) => gram(&cfg, *degree, cfg.space(q)?),
            }
        }
        Command::Moment { common, letters } => {
            let word = parse_word(letters)?;
            let mut cfg = Config::new(common, word.degree())?;
            cfg.copies = copies_for(&word, cfg.copies);
            match cfg.q {
                QArg::Generic => moment(&cfg, &word, cfg.space(QPolynomial::q())?),
                QArg::Float(q) => moment(&cfg, &word, cfg.space(q)?),
            }
        }
        Command::Wick { common, word, on, k } => {
            let xi = parse_word(word)?;
            let v = match on {
                Some(s) => parse_word(s)?,
                None => Word::empty(),
            };
            let mut cfg = Config::new(common, xi.degree().max(v.degree()))?;
            cfg.copies = copies_for(&xi, copies_for(&v, cfg.copies));
            let on = on.as_ref().map(|_| v);
            match cfg.q {
                QArg::Generic => wick_cmd(&cfg, &xi, on, *k, cfg.space(QPolynomial::q())?),
                QArg::Float(q) => wick_cmd(&cfg, &xi, on, *k, cfg.space(q)?),
            }
        }
        Command::Split { common, word, k } => {
            let xi = parse_word(word)?;
            let mut cfg = Config::new(common, xi.degree())?;
            cfg.copies = copies_for(&xi, cfg.copies);
            match cfg.q {
                QArg::Generic => split(&cfg, &xi, *k, cfg.space(QPolynomial::q())?),
                QArg::Float(q) => split(&cfg, &xi, *k, cfg.space(q)?),
            }
        }
        Command::Clt { common, letters, n_max } => {
            let word = parse_word(letters)?;
            let mut cfg = Config::new(common, word.degree())?;
            cfg.copies = copies_for(&word, cfg.copies);
            match cfg.q {
                QArg::Generic => clt(&cfg, &word, *n_max, cfg.space(QPolynomial::q())?),
                QArg::Float(q) => clt(&cfg, &word, *n_max, cfg.space(q)?),
            }
        }
        Command::VerifyIota { nmax, common, fault } => verify_iota(&Config::new(common, *nmax)?, *nmax, fault),
        Command::VerifyIe { nmax, common, fault } => verify_ie(&Config::new(common, *nmax)?, *nmax, fault),
        Command::VerifyClaim { nmax, max_pairs, reading, common, fault } => {
            verify_claim(&Config::new(common, *nmax)?, *nmax, *max_pairs, (*reading).into(), fault)
        }
        Command::Schatten { common, p } => schatten(&Config::new(common, 4)?, *p),
        Command::PhiCheck { common, h, k } => phi_check(&Config::new(common, 3)?, h, k),
        Command::Decay { common, letters } => decay(&Config::new(common, 4)?, letters),
        Command::Deform { common, kcut, t } => deform(&Config::new(common, 3)?, *kcut, t.as_deref()),
        Command::Tail { common, word, t, cutoff } => {
            let x = parse_word(word)?;
            tail(&Config::new(common, x.degree())?, &x, *t, *cutoff)
        }
        Command::Render { common, figure, n, k, pairs } => render(common, figure.as_deref(), *n, *k, pairs),
    }
}

fn gram<S: Emit>(cfg: &Config, degree: usize, space: FockSpace<S>) -> Result<Outcome> {
    let mut out = Outcome::new("gram", cfg.json());
    let g = space.gram_matrix(degree)?;
    let words = space.enumerate_words(degree)?;
    let rows: Vec<Vec<Value>> = (0..g.rows()).map(|i| (0..g.cols()).map(|j| g.get(i, j).emit()).collect()).collect();
    let mut result = json!({
        "degree": degree,
        "dimension": words.len(),
        "words": words.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "matrix": rows,
    });
    let mut text = String::new();
    for i in 0..g.rows() {
        let row: Vec<String> = (0..g.cols()).map(|j| g.get(i, j).to_string()).collect();
        text.push_str(&row.join("\t"));
        text.push('\n');
    }
    if let QArg::Float(_) = cfg.q {
        let float = crate::linalg::DenseMatrix::from_fn(g.rows(), g.cols(), |i, j| g.get(i, j).to_f64().unwrap_or(f64::NAN));
        let min = crate::linalg::min_eigenvalue(&float.to_nalgebra());
        result["min_eigenvalue"] = json!(min);
        text.push_str(&format!("min eigenvalue: {min:e}\n"));
        if !(min > 0.0) {
            out.violation(format!("degree {degree}: minimum eigenvalue {min:e}"));
        }
    }
    out.results.push(result);
    out.text = text;
    Ok(out)
}

fn moment<S: Emit>(cfg: &Config, word: &Word, space: FockSpace<S>) -> Result<Outcome> {
    let mut out = Outcome::new("moment", cfg.json());
    let hs = letter_vectors(&space, word)?;
    let value = wick::moment_pair_partitions(&space, &hs);
    let matrix = wick::vacuum_moment_matrix(&space, &hs)?;
    if !value.approx_eq(&matrix, FLOAT_TOL) {
        out.violation(format!("pair partitions give {value}, field operators give {matrix}"));
    }
    out.results.push(json!({"letters": word.to_string(), "value": value.emit(), "matrix_value": matrix.emit()}));
    out.text = format!("{value}\n");
    Ok(out)
}

fn wick_cmd<S: Emit>(cfg: &Config, xi: &Word, on: Option<Word>, k: Option<usize>, space: FockSpace<S>) -> Result<Outcome> {
    let mut out = Outcome::new("wick", cfg.json());
    let xi_v = FockVector::word(xi.clone());
    let target = on.clone().unwrap_or_else(Word::empty);
    let value = wick::wick_apply(&space, &xi_v, &FockVector::word(target.clone()))?;
    if on.is_none() && !value.approx_eq(&xi_v, FLOAT_TOL) {
        out.violation(format!("W({xi})Ω = {value}"));
    }
    let mut result = json!({"word": xi.to_string(), "on": target.to_string(), "value": emit_vector(&value)});
    out.text = format!("{value}\n");
    if let Some(k) = k {
        let exp = wick::r_star(&space, &xi_v, k)?;
        let terms: Vec<Value> = exp
            .terms
            .iter()
            .map(|t| {
                json!({
                    "subset": t.subset.elements(),
                    "coefficient": t.coefficient.emit(),
                    "left": t.left.to_string(),
                    "right": t.right.to_string(),
                })
            })
            .collect();
        for t in &exp.terms {
            out.text.push_str(&format!("{:?}: ({}) {} | {}\n", t.subset.elements(), t.coefficient, t.left, t.right));
        }
        result["coset_expansion"] = json!({"k": k, "terms": terms});
    }
    out.results.push(result);
    Ok(out)
}

fn split<S: Emit>(cfg: &Config, xi: &Word, k: usize, space: FockSpace<S>) -> Result<Outcome> {
    let mut out = Outcome::new("split", cfg.json());
    let xi_v = FockVector::word(xi.clone());
    let value = wick::wick_split_product(&space, &xi_v, k)?;
    let n = xi.degree();
    let left = FockVector::word(Word::new(xi.letters()[..n - k].to_vec()));
    let right = FockVector::word(Word::new(xi.letters()[n - k..].to_vec()));
    let direct = wick::wick_apply(&space, &left, &right)?;
    if !value.approx_eq(&direct, FLOAT_TOL) {
        out.violation(format!("partition expansion {value} differs from {direct}"));
    }
    out.results.push(json!({"word": xi.to_string(), "k": k, "value": emit_vector(&value)}));
    out.text = format!("{value}\n");
    Ok(out)
}

fn clt<S: Emit>(cfg: &Config, word: &Word, n_max: usize, space: FockSpace<S>) -> Result<Outcome> {
    let mut out = Outcome::new("clt", cfg.json());
    let hs = letter_vectors(&space, word)?;
    let limit = wick::moment_pair_partitions(&space, &hs);
    out.text = format!("limit: {limit}\n");
    for n in 1..=n_max {
        let value = wick::clt_finite(&space, n, &hs)?;
        if !value.approx_eq(&limit, FLOAT_TOL) {
            out.violation(format!("N = {n}: {value} differs from the limit {limit}"));
        }
        out.text.push_str(&format!("N = {n}: {value}\n"));
        out.results.push(json!({"n": n, "value": value.emit(), "limit": limit.emit()}));
    }
    Ok(out)
}

fn fault_of(f: &Fault) -> FaultInjection {
    FaultInjection { enabled: f.inject_fault }
}

fn verify_iota(cfg: &Config, nmax: usize, fault: &Fault) -> Result<Outcome> {
    let mut out = Outcome::new("verify-iota", cfg.json());
    let scan = identities::iota_prime_identity_scan(nmax, fault_of(fault))?;
    for v in &scan.report.violations {
        out.violation(v.clone());
    }
    out.results.push(json!({
        "n_max": nmax,
        "cases": scan.report.cases,
        "violations": scan.report.violations.len(),
        "alternative_orientation_violations": scan.alternative_orientation_violations,
    }));
    out.text = format!(
        "iota' closed form, n <= {nmax}: {} cases, {} violations\n",
        scan.report.cases,
        scan.report.violations.len()
    );
    Ok(out)
}

fn verify_ie(cfg: &Config, nmax: usize, fault: &Fault) -> Result<Outcome> {
    let mut out = Outcome::new("verify-ie", cfg.json());
    for n in 0..=nmax {
        for k in 0..=n {
            let report = identities::inclusion_exclusion_verify(n, k, cfg.d, fault_of(fault))?;
            out.text.push_str(&format!("n = {n}, k = {k}: {} words, {} violations\n", report.cases, report.violations.len()));
            out.results.push(json!({"n": n, "k": k, "cases": report.cases, "violations": report.violations.len()}));
            for v in report.violations {
                out.violation(format!("n = {n}, k = {k}: {v}"));
            }
        }
    }
    Ok(out)
}

fn verify_claim(cfg: &Config, nmax: usize, max_pairs: usize, reading: ClaimReading, fault: &Fault) -> Result<Outcome> {
    let mut out = Outcome::new("verify-claim", cfg.json());
    for r in [ClaimReading::PrimePlain, ClaimReading::PrimePrime] {
        let selected = r == reading;
        let scan = identities::claim_scan(nmax, max_pairs, r, if selected { fault_of(fault) } else { FaultInjection::default() })?;
        out.text.push_str(&format!(
            "{r:?}{}: {} partitions, {} nonzero\n",
            if selected { " (checked)" } else { "" },
            scan.partitions,
            scan.nonzero.len()
        ));
        out.results.push(json!({
            "reading": r,
            "checked": selected,
            "partitions": scan.partitions,
            "nonzero": scan.nonzero.len(),
            "examples": scan.nonzero.iter().take(5).collect::<Vec<_>>(),
        }));
        if selected {
            for v in scan.nonzero {
                out.violation(v);
            }
        }
    }
    Ok(out)
}

fn schatten(cfg: &Config, p: f64) -> Result<Outcome> {
    let mut out = Outcome::new("schatten", cfg.json());
    let q = cfg.float_q("schatten")?;
    let (doubled, single) = cfg.float_spaces(q)?;
    let e1 = analysis::first_letter(&single, 1);
    let phi = analysis::phi_hk_operator(&doubled, &single, &e1, &e1)?;
    let report = analysis::schatten_norm(&single, &phi, p)?;
    let closed = analysis::diagonal_schatten_closed_form(q, cfg.d, p, cfg.max_degree, 1.0);
    if (report.norm - closed).abs() > FLOAT_TOL * closed.max(1.0) {
        out.violation(format!("norm {} differs from closed form {closed}", report.norm));
    }
    let ratio = analysis::schatten_term_ratio(q, cfg.d, p);
    let sums = analysis::schatten_partial_sums(q, cfg.d, p, cfg.max_degree);
    out.text = format!(
        "p = {p}: truncated norm {} (closed form {closed}); threshold {}; term ratio {ratio}\n",
        report.norm, report.threshold
    );
    out.results.push(json!({
        "p": p,
        "norm": report.norm,
        "closed_form": closed,
        "threshold": report.threshold,
        "term_ratio": ratio,
        "partial_sums": sums,
        "truncation": report.truncation,
    }));
    Ok(out)
}

fn phi_check(cfg: &Config, h: &str, k: &str) -> Result<Outcome> {
    let mut out = Outcome::new("phi-check", cfg.json());
    let q = cfg.float_q("phi-check")?;
    let (doubled, single) = cfg.float_spaces(q)?;
    let pad = |v: Vec<f64>| -> Result<Vec<f64>> {
        if v.len() > cfg.d {
            return Err(QfockError::SpaceMismatch(format!("vector of length {} in dimension {}", v.len(), cfg.d)));
        }
        let mut v = v;
        v.resize(cfg.d, 0.0);
        Ok(v)
    };
    let (h, k) = (pad(parse_floats(h)?)?, pad(parse_floats(k)?)?);
    let check = analysis::phi_hk_check(&doubled, &single, &h, &k)?;
    if !(check.max_deviation < FLOAT_TOL) {
        out.violation(format!("deviation {:e}", check.max_deviation));
    }
    out.text = format!("<h,k> = {}; max deviation {:e} up to degree {}\n", check.inner, check.max_deviation, check.max_degree);
    out.results.push(serde_json::to_value(&check).expect("serializable"));
    Ok(out)
}

fn decay(cfg: &Config, letters: &str) -> Result<Outcome> {
    let mut out = Outcome::new("decay", cfg.json());
    let q = cfg.float_q("decay")?;
    let (doubled, single) = cfg.float_spaces(q)?;
    let indices = parse_word(letters)?;
    let word = Word::new(indices.letters().iter().map(|l| Letter::second(l.index)).collect());
    let xi = FockVector::word(word.clone());
    let report = analysis::block_decay(&doubled, &single, &xi, &xi, word.degree())?;
    if report.off_band_max > FLOAT_TOL {
        out.violation(format!("block outside the band has norm {:e}", report.off_band_max));
    }
    let expected = report.expected_log_rate;
    if (report.log_rate - expected).abs() > 0.1 * expected.abs() {
        out.violation(format!("fitted log-rate {} is not within 10% of {expected}", report.log_rate));
    }
    out.text = format!(
        "xi = {word}: fitted rate {} (log {}), expected log {expected}; band {}; off-band max {:e}\n",
        report.rate, report.log_rate, report.band_width, report.off_band_max
    );
    out.results.push(serde_json::to_value(&report).expect("serializable"));
    Ok(out)
}

fn deform(cfg: &Config, kcut: usize, t: Option<&str>) -> Result<Outcome> {
    let mut out = Outcome::new("deform", cfg.json());
    let q = cfg.float_q("deform")?;
    let (doubled, _) = cfg.float_spaces(q)?;
    let grid = match t {
        Some(s) => parse_floats(s)?,
        None => (1..=9).map(|i| 0.5f64.powi(kcut as i32) * i as f64 / 10.0).collect(),
    };
    let report = analysis::deformation_scan(&doubled, kcut, cfg.max_degree, &grid)?;
    if !report.all_finite {
        out.violation("ratio is not finite on the grid".into());
    }
    let mut rows = Vec::new();
    for r in &report.rows {
        if !(r.matrix_deviation < FLOAT_TOL) {
            out.violation(format!("n = {}, t = {}: matrix deviation {:e}", r.n, r.t, r.matrix_deviation));
        }
        rows.push([r.n.to_string(), r.t.to_string(), r.left.to_string(), r.right.to_string(), r.ratio.to_string()]);
        out.results.push(serde_json::to_value(r).expect("serializable"));
    }
    out.text = format!("kcut = {kcut}: max ratio {} over {} grid points\n", report.max_ratio, report.rows.len());
    out.csv_rows = Some(rows);
    Ok(out)
}

fn tail(cfg: &Config, x: &Word, t: f64, cutoff: usize) -> Result<Outcome> {
    let mut out = Outcome::new("tail", cfg.json());
    let q = cfg.float_q("tail")?;
    let space = cfg.space(q)?;
    let v = FockVector::word(x.clone());
    let value = analysis::ou_tail(&space, &v, t, cutoff)?;
    let n = x.degree();
    let expected = if n > cutoff { (-(n as f64) * t).exp() * space.q_norm(&v) } else { 0.0 };
    if (value - expected).abs() > FLOAT_TOL * expected.max(1.0) {
        out.violation(format!("tail {value} differs from {expected}"));
    }
    out.text = format!("{value}\n");
    out.results.push(json!({"word": x.to_string(), "t": t, "cutoff": cutoff, "value": value}));
    Ok(out)
}

/// Name, ground size, right block and pairs of a built-in diagram.
pub type Figure = (&'static str, usize, usize, &'static [(usize, usize)]);

pub const FIGURES: [Figure; 3] = [
    ("fig1", 8, 4, &[(2, 5), (4, 7)]),
    ("fig2", 8, 4, &[(1, 6), (2, 5)]),
    ("rho3", 8, 4, &[(1, 6), (2, 5), (4, 7)]),
];

pub fn figure(name: &str) -> Result<PartialPartition> {
    let (_, n, k, pairs) = FIGURES
        .iter()
        .find(|f| f.0 == name)
        .ok_or_else(|| QfockError::Parse(format!("unknown figure `{name}`; expected fig1, fig2 or rho3")))?;
    PartialPartition::new(*n, *k, pairs.to_vec())
}

fn render(common: &Common, name: Option<&str>, n: Option<usize>, k: Option<usize>, pairs: &str) -> Result<Outcome> {
    let rho = match (name, n) {
        (Some(f), None) => figure(f)?,
        (None, Some(n)) => PartialPartition::new(n, k.unwrap_or(n / 2), parse_pairs(pairs)?)?,
        _ => return Err(QfockError::Domain("give either --figure or --n".into())),
    };
    let cfg = Config::new(common, rho.ground_size())?;
    let mut out = Outcome::new("render", cfg.json());
    out.text = render_partition(&rho, RenderFormat::Ascii);
    out.svg = Some(render_partition(&rho, RenderFormat::Svg));
    out.results.push(json!({
        "partition": rho.to_string(),
        "n": rho.ground_size(),
        "k": rho.right_block(),
        "iota": rho.crossings(),
        "iota_prime": rho.iota_prime().ok(),
        "ascii": out.text,
    }));
    Ok(out)
}
