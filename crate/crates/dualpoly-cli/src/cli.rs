//! Command-line definitions and the command implementations.
//!
//! Every command produces a [`Report`]: a verdict, a one-line summary, named
//! certificate documents and optional extra artifacts (CSV, DOT). [`run`]
//! writes them to the output directory together with a [`RunManifest`] and
//! maps the verdict to the exit code.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dualpoly::amplify::{
    amplify_circuit_once, booleanize_all, booleanize_min_theta, build_compression, build_g, min_smooth_amplify,
    AmplifyParams,
};
use dualpoly::circuits::{and_n, build_fkn, dictator, krause_pudlak, mp, or_n, parity_dnf, surj, CircuitDesc};
use dualpoly::corrector::{build_zeta_cube, build_zeta_u};
use dualpoly::dual_mp::{build_mp_smooth_witness, build_mp_witness, build_rs_smooth, OrthEvidence};
use dualpoly::dual_or::build_psi_default;
use dualpoly::lp::oracles::{
    discrepancy_2party, iii_approx_degree, smooth_threshold_degree, threshold_degree, threshold_density, DegreeAnswer,
    DensityAnswer, IiiSpec, SignMatrix,
};
use dualpoly::matrix::{
    check_pattern_norm, forster_bound, pm_discrepancy_bound, pp_lower_bound, signrank_lb_pattern, signrank_le_1,
    upp_range, PatternMatrix, BISECTION_STEPS,
};
use dualpoly::orth::orth_at_least;
use dualpoly::rational::{parse_q, q, to_f64};
use dualpoly::{orth, Domain, FnTable, Q};
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::acceptance::{self, KNOWN_FAILURES};
use crate::json::{self as js, rat, SCHEMA_VERSION};
use crate::manifest::{canonical, sha256_hex, Artifact, RunManifest};
use crate::numeric::{compare_pattern_norm, REL_TOL};

/// Environment variable naming the default output directory.
pub const WORKDIR_ENV: &str = "DUALPOLY_WORKDIR";

/// Exact construction and verification of dual polynomials.
#[derive(Debug, Parser)]
#[command(name = "dualpoly", version, about)]
pub struct Cli {
    /// Output directory for JSON/CSV/DOT artifacts and the run manifest
    /// (defaults to $DUALPOLY_WORKDIR; nothing is written when neither is set).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Subcommand.
    #[command(subcommand)]
    pub command: Command,
}

/// Top-level subcommands.
#[allow(missing_docs)] // variant fields are described by their argument help
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a dual object and its certificate.
    Witness {
        #[command(subcommand)]
        what: WitnessCmd,
    },
    /// Exact LP oracles.
    Oracle {
        #[command(subcommand)]
        what: OracleCmd,
    },
    /// Pattern matrices, sign-rank and communication bounds.
    Bounds {
        #[command(subcommand)]
        what: BoundsCmd,
    },
    /// Compression, Booleanization and amplification.
    Amplify {
        #[command(subcommand)]
        what: AmplifyCmd,
    },
    /// Circuit constructors and evaluators.
    Circuits {
        #[command(subcommand)]
        what: CircuitCmd,
    },
    /// Re-check the claims recorded in a witness document.
    Verify(VerifyArgs),
    /// Re-run the acceptance suite or a recorded manifest.
    Repro {
        #[command(subcommand)]
        what: ReproCmd,
    },
}

/// `witness build ...`.
#[allow(missing_docs)] // variant fields are described by their argument help
#[derive(Debug, Subcommand)]
pub enum WitnessCmd {
    /// Build a witness.
    Build {
        #[command(subcommand)]
        kind: WitnessKind,
    },
}

/// Witness kinds.
#[derive(Debug, Subcommand)]
pub enum WitnessKind {
    /// The dual polynomial psi for OR on {0..N}.
    DualOr {
        /// Length parameter of omega.
        #[arg(long)]
        n: u64,
        /// Domain {0..N} (defaults to n).
        #[arg(long = "N")]
        big_n: Option<u64>,
        /// Error parameter as "p/q".
        #[arg(long, default_value = "1/3")]
        eps: String,
    },
    /// A corrector: on {0,1}^n (with --n) or on the box below --u.
    Corrector {
        /// Cube dimension.
        #[arg(long)]
        n: Option<usize>,
        /// Anchor as comma-separated integers.
        #[arg(long)]
        u: Option<String>,
        /// Degree budget.
        #[arg(long)]
        d: u32,
    },
    /// Bounded dual distributions for MP*_{m,r}.
    Mp {
        /// Number of blocks.
        #[arg(long)]
        m: usize,
        /// Block range.
        #[arg(long)]
        r: u64,
    },
    /// Locally smooth dual distributions for MP*_{m,r} on {0..R}^m.
    MpSmooth {
        /// Number of blocks.
        #[arg(long)]
        m: usize,
        /// Gadget scale.
        #[arg(long)]
        r: u64,
        /// Box side.
        #[arg(long = "R")]
        big_r: u64,
    },
    /// Min-smooth dual distribution for MP_{m,r} on ({0,1}^r)^m.
    RsSmooth {
        /// Number of blocks.
        #[arg(long)]
        m: usize,
        /// Block length.
        #[arg(long)]
        r: usize,
    },
}

/// Named Boolean functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FnName {
    /// PARITY_n.
    Parity,
    /// AND_n.
    And,
    /// OR_n.
    Or,
    /// x_1 on n variables.
    Dictator,
    /// MP_{m,r} on m*r variables.
    Mp,
}

/// How a Boolean function is specified.
#[derive(Debug, Clone, Args)]
pub struct FnSpec {
    /// Named function.
    #[arg(long = "fn", value_enum)]
    pub name: Option<FnName>,
    /// Number of variables (for parity, and, or, dictator).
    #[arg(long)]
    pub n: Option<usize>,
    /// Blocks (for mp).
    #[arg(long)]
    pub m: Option<usize>,
    /// Block length (for mp).
    #[arg(long)]
    pub r: Option<usize>,
    /// Boolean table as a JSON document.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Circuit as a JSON document.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
}

/// LP oracles.
#[allow(missing_docs)] // variant fields are described by their argument help
#[derive(Debug, Subcommand)]
pub enum OracleCmd {
    /// Threshold degree.
    Degthr {
        #[command(flatten)]
        f: FnSpec,
    },
    /// gamma-smooth threshold degree.
    SmoothDegthr {
        #[command(flatten)]
        f: FnSpec,
        /// Smoothness as "p/q".
        #[arg(long)]
        gamma: String,
    },
    /// eps-approximate degree.
    Approx {
        #[command(flatten)]
        f: FnSpec,
        /// Error as "p/q".
        #[arg(long)]
        eps: String,
    },
    /// Exact two-party discrepancy of a sign matrix.
    Disc {
        /// CSV of +1/-1 entries.
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Threshold density.
    Density {
        #[command(flatten)]
        f: FnSpec,
        /// Largest family size searched.
        #[arg(long, default_value_t = 8)]
        cap: usize,
    },
}

/// Matrix bounds.
#[allow(missing_docs)] // variant fields are described by their argument help
#[derive(Debug, Subcommand)]
pub enum BoundsCmd {
    /// Closed-form spectral norm of a pattern matrix, with exact and numeric checks.
    Pattern {
        #[command(flatten)]
        f: FnSpec,
        /// Row length N (a multiple of n).
        #[arg(long = "N")]
        big_n: usize,
    },
    /// Forster lower bound for a CSV matrix, optionally with a realization.
    Forster {
        /// CSV matrix.
        #[arg(long)]
        matrix: PathBuf,
        /// CSV real matrix with the same sign pattern.
        #[arg(long)]
        realization: Option<PathBuf>,
    },
    /// gamma T^{d/2} after certifying the smooth threshold degree.
    Signrank {
        #[command(flatten)]
        f: FnSpec,
        /// Smoothness as "p/q".
        #[arg(long)]
        gamma: String,
        /// Degree to certify.
        #[arg(long)]
        d: u32,
        /// Block size T.
        #[arg(long = "T")]
        t: u64,
    },
    /// Closed-form discrepancy, PP and UPP bounds.
    Formulas {
        /// Constant c as "p/q".
        #[arg(long, default_value = "1")]
        c: String,
        /// Number of parties.
        #[arg(long, default_value_t = 2)]
        l: u32,
        /// Block size m.
        #[arg(long)]
        m: u64,
        /// Threshold degree.
        #[arg(long)]
        d: u32,
        /// Sign-rank for the UPP range.
        #[arg(long)]
        srank: Option<u64>,
        /// Discrepancy for the PP bound, as "p/q".
        #[arg(long)]
        disc: Option<String>,
    },
    /// Decide whether a CSV sign pattern has sign-rank one.
    Rank1 {
        /// CSV matrix.
        #[arg(long)]
        matrix: PathBuf,
    },
}

/// Amplification steps.
#[allow(missing_docs)] // variant fields are described by their argument help
#[derive(Debug, Subcommand)]
pub enum AmplifyCmd {
    /// The re-encoding map g.
    G {
        /// Number of labels minus one (1..3).
        #[arg(long)]
        n: usize,
    },
    /// The compression map G and its fibre sizes.
    Compression {
        /// Output dimension.
        #[arg(long)]
        n: usize,
        /// Number of blocks.
        #[arg(long)]
        theta: usize,
    },
    /// Booleanized distributions for every z in {0,1}^n.
    Booleanize {
        /// Number of Boolean inputs.
        #[arg(long)]
        n: usize,
        /// Blocks per input.
        #[arg(long)]
        m: usize,
        /// Block range.
        #[arg(long)]
        r: u64,
        /// Degree budget.
        #[arg(long)]
        d: u32,
        /// Threshold (defaults to the smallest admissible value).
        #[arg(long)]
        theta: Option<u64>,
    },
    /// Smooth amplification of the uniform witness of a function.
    Smooth {
        #[command(flatten)]
        f: FnSpec,
        /// Blocks per input.
        #[arg(long = "blocks", default_value_t = 1)]
        blocks: usize,
        /// Gadget scale.
        #[arg(long = "scale", default_value_t = 1)]
        scale: u64,
        /// Box side.
        #[arg(long = "R")]
        big_r: u64,
        /// Threshold.
        #[arg(long)]
        theta: u64,
        /// Smoothness of the input witness as "p/q".
        #[arg(long, default_value = "1")]
        gamma: String,
        /// Target orthogonality.
        #[arg(long)]
        d: u32,
    },
    /// The circuits for f o H and f o not H.
    Circuit {
        #[command(flatten)]
        f: FnSpec,
        /// Blocks per input.
        #[arg(long = "blocks", default_value_t = 1)]
        blocks: usize,
        /// Threshold.
        #[arg(long)]
        theta: usize,
    },
}

/// Circuit commands.
#[allow(missing_docs)] // variant fields are described by their argument help
#[derive(Debug, Subcommand)]
pub enum CircuitCmd {
    /// MP_{m,r} as a circuit.
    Mp {
        /// Blocks.
        #[arg(long)]
        m: usize,
        /// Block length.
        #[arg(long)]
        r: usize,
    },
    /// The symmetric SURJ_{n,r} table.
    Surj {
        /// Input weight.
        #[arg(long)]
        n: usize,
        /// Range size.
        #[arg(long)]
        r: usize,
    },
    /// The Krause–Pudlák lift of a circuit.
    Kp {
        #[command(flatten)]
        f: FnSpec,
    },
    /// The recursive family f_{k,N}.
    Fkn {
        /// Level.
        #[arg(long)]
        k: u32,
        /// Input budget.
        #[arg(long)]
        n: usize,
    },
    /// Evaluate a circuit at a bit string.
    Eval {
        /// Circuit JSON.
        #[arg(long)]
        circuit: PathBuf,
        /// Input bits, e.g. 0101.
        #[arg(long)]
        x: String,
    },
    /// Truth table of a circuit.
    Table {
        #[command(flatten)]
        f: FnSpec,
    },
}

/// `verify`.
#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Witness document written by `witness build` (or any document with
    /// `table` and `claims`).
    #[arg(long)]
    pub file: PathBuf,
}

/// `repro`.
#[derive(Debug, Subcommand)]
pub enum ReproCmd {
    /// Run every acceptance criterion.
    All,
    /// Run one acceptance criterion.
    Criterion {
        /// Criterion number.
        id: u8,
    },
    /// Re-run the command of a manifest and compare certificate digests.
    Manifest {
        /// Manifest file.
        path: PathBuf,
    },
}

/// Outcome of one command.
#[derive(Debug, Clone, Default)]
pub struct Report {
    /// Subcommand path.
    pub command: String,
    /// Every requested certificate passed.
    pub pass: bool,
    /// Human-readable summary; names the failing invariant on failure.
    pub summary: String,
    /// Named certificate / result documents (canonical JSON, digested).
    pub certificates: BTreeMap<String, Value>,
    /// Extra artifacts `(file name, contents)`.
    pub files: Vec<(String, String)>,
    /// Parameters as strings.
    pub parameters: BTreeMap<String, String>,
    /// Seeds used.
    pub seeds: Vec<u64>,
}

impl Report {
    fn new(command: &str) -> Self {
        Report { command: command.into(), pass: true, ..Default::default() }
    }

    fn param(mut self, k: &str, v: impl ToString) -> Self {
        self.parameters.insert(k.into(), v.to_string());
        self
    }

    fn cert(mut self, name: &str, v: Value) -> Self {
        self.certificates.insert(name.into(), v);
        self
    }

    fn file(mut self, name: &str, contents: String) -> Self {
        self.files.push((name.into(), contents));
        self
    }

    /// Records a named invariant; failing ones are listed in the summary.
    fn check(&mut self, name: &str, ok: bool) {
        if !ok {
            self.pass = false;
            if !self.summary.is_empty() {
                self.summary.push_str("; ");
            }
            self.summary.push_str(&format!("FAILED invariant: {name}"));
        }
    }

    fn summary(mut self, s: impl Into<String>) -> Self {
        let s = s.into();
        self.summary = if self.summary.is_empty() { s } else { format!("{s}; {}", self.summary) };
        self
    }
}

fn rq(s: &str) -> Result<Q> {
    parse_q(s).map_err(|e| anyhow!("{e} (rationals are written p/q)"))
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_csv_matrix(path: &Path) -> Result<Vec<Vec<Q>>> {
    js::parse_matrix_csv(&std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| anyhow!("missing --{flag}"))
}

impl FnSpec {
    /// The function as a circuit (named functions and circuit files only).
    pub fn circuit(&self) -> Result<CircuitDesc> {
        if let Some(p) = &self.circuit {
            return js::parse_circuit(&read_json(p)?);
        }
        let name = self.name.ok_or_else(|| anyhow!("give --fn or --circuit"))?;
        Ok(match name {
            FnName::Parity => parity_dnf(need(self.n, "n")?)?,
            FnName::And => and_n(need(self.n, "n")?)?,
            FnName::Or => or_n(need(self.n, "n")?)?,
            FnName::Dictator => dictator(need(self.n, "n")?)?,
            FnName::Mp => mp(need(self.m, "m")?, need(self.r, "r")?)?,
        })
    }

    /// The function as a Boolean table.
    pub fn table(&self) -> Result<FnTable> {
        if let Some(p) = &self.table {
            return js::parse_table(&read_json(p)?);
        }
        if self.circuit.is_none() {
            if let (Some(FnName::Parity), Some(n)) = (self.name, self.n) {
                return Ok(FnTable::boolean(Domain::Hypercube(n), |x| x.iter().sum::<i64>() % 2 == 1));
            }
        }
        Ok(self.circuit()?.truth_table()?)
    }

    fn describe(&self) -> String {
        if let Some(p) = &self.table {
            return format!("table {}", p.display());
        }
        if let Some(p) = &self.circuit {
            return format!("circuit {}", p.display());
        }
        match self.name {
            Some(FnName::Mp) => format!("mp m={:?} r={:?}", self.m, self.r),
            Some(n) => format!("{n:?} n={:?}", self.n).to_lowercase(),
            None => "unspecified".into(),
        }
    }
}

fn degree_answer(a: &DegreeAnswer) -> Value {
    json!({
        "value": a.value,
        "primal": js::polynomial(&a.primal),
        "dual": a.dual.as_ref().map(js::table),
    })
}

fn orth_evidence(o: &OrthEvidence) -> Value {
    match o {
        OrthEvidence::Dense(r) => json!({ "kind": "dense", "orth": js::orth(r) }),
        OrthEvidence::Factorization => json!({ "kind": "factorization" }),
    }
}

/// Witness document: the object, its recorded claims and the certificate.
fn witness_doc(kind: &str, table: &FnTable, claims: Value, certificate: Value) -> Value {
    json!({ "schema": SCHEMA_VERSION, "kind": kind, "table": js::table(table), "claims": claims, "certificate": certificate })
}

/// Executes a parsed command line.
pub fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Witness { what: WitnessCmd::Build { kind } } => witness(kind),
        Command::Oracle { what } => oracle(what),
        Command::Bounds { what } => bounds(what),
        Command::Amplify { what } => amplify(what),
        Command::Circuits { what } => circuits(what),
        Command::Verify(args) => verify(&args.file),
        Command::Repro { what } => repro(what),
    }
}

fn witness(kind: &WitnessKind) -> Result<Report> {
    match kind {
        WitnessKind::DualOr { n, big_n, eps } => {
            let big_n = big_n.unwrap_or(*n);
            let e = rq(eps)?;
            let (psi, cert) = build_psi_default(*n, big_n, &e)?;
            let verified = cert.verify(&psi).is_ok();
            let claims = json!({ "l1": "1", "alternating": true, "orth_at_least": cert.orth_bound });
            let c = json!({
                "n": n, "N": big_n, "eps": rat(&e),
                "Delta": cert.omega.spec.big_delta, "fallback": cert.omega.spec.fallback,
                "delta": cert.params.delta.as_ref().map(rat), "halvings": cert.halvings,
                "l1": rat(&cert.l1), "psi0": rat(&cert.psi0), "orth_bound": cert.orth_bound,
                "orth": js::orth(&cert.orth), "alternating": cert.alternating, "c_prime": rat(&cert.c_prime),
            });
            let mut r = Report::new("witness build dual-or").param("n", n).param("N", big_n).param("eps", eps);
            r.check("certificate re-verification", verified);
            r.check("psi(0) > (1 - eps)/2", cert.psi0 > (Q::one() - &e) / q(2));
            Ok(r.summary(format!("psi on {{0..{big_n}}}: orth {}, psi(0) ~ {:.6}", cert.orth.lower_bound(), to_f64(&cert.psi0)))
                .file("psi.csv", js::table_csv(&psi)?)
                .cert("witness", witness_doc("dual-or", &psi, claims, c)))
        }
        WitnessKind::Corrector { n, u, d } => {
            let (z, cert) = match (n, u) {
                (Some(n), None) => build_zeta_cube(*n, *d)?,
                (None, Some(u)) => {
                    let u: Vec<i64> = u.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>()?;
                    build_zeta_u(&u, *d)?
                }
                _ => bail!("give exactly one of --n and --u"),
            };
            let claims = json!({ "orth_at_least": d + 1, "l1_at_most": rat(&cert.l1_bound) });
            let c = json!({
                "anchor": cert.anchor, "d": d, "l1": rat(&cert.l1), "l1_bound": rat(&cert.l1_bound),
                "linf": rat(&cert.linf), "determinant": rat(&cert.determinant),
            });
            Ok(Report::new("witness build corrector")
                .param("d", d)
                .summary(format!("corrector anchored at {:?}: l1 {} <= {}", cert.anchor, to_f64(&cert.l1), to_f64(&cert.l1_bound)))
                .file("zeta.csv", js::table_csv(&z)?)
                .cert("witness", witness_doc("corrector", &z, claims, c)))
        }
        WitnessKind::Mp { m, r } => {
            let (wit, cert) = build_mp_witness(*m, *r)?;
            let c = json!({
                "m": m, "r": r, "d_gadget": cert.gadget.d_gadget, "orth_bound": cert.orth_bound,
                "c1": rat(&cert.gadget.c1), "alpha_sq": rat(&cert.gadget.alpha_sq), "eps": rat(&cert.gadget.eps),
                "delta": rat(&cert.gadget.delta), "orth": orth_evidence(&cert.orth),
            });
            let doc = json!({
                "schema": SCHEMA_VERSION, "kind": "mp",
                "lambda0": js::mixture(&wit.lambda0), "lambda1": js::mixture(&wit.lambda1), "certificate": c,
            });
            Ok(Report::new("witness build mp")
                .param("m", m)
                .param("r", r)
                .summary(format!("MP*_{{{m},{r}}} witness: orth(Lambda1 - Lambda0) >= {}", cert.orth_bound))
                .cert("witness", doc))
        }
        WitnessKind::MpSmooth { m, r, big_r } => {
            let (wit, cert) = build_mp_smooth_witness(*m, *r, *big_r)?;
            let c = json!({
                "m": m, "r": r, "R": big_r, "d_gadget": cert.gadget.d_gadget, "orth_bound": cert.orth_bound,
                "k_gadget": rat(&cert.k_gadget), "k_mix": rat(&cert.k_mix), "k_within_bound": cert.k_within_bound,
                "psi1_sandwich": cert.psi1_sandwich, "psi2_sandwich": cert.psi2_sandwich,
                "orth": js::orth(&cert.orth),
            });
            let doc = json!({
                "schema": SCHEMA_VERSION, "kind": "mp-smooth",
                "lambda0": js::table(&wit.lambda0), "lambda1": js::table(&wit.lambda1),
                "mixture0": js::mixture(&wit.mixture0), "mixture1": js::mixture(&wit.mixture1), "certificate": c,
            });
            let mut rep = Report::new("witness build mp-smooth").param("m", m).param("r", r).param("R", big_r);
            rep.check("smoothness constant within bound", cert.k_within_bound);
            rep.check("psi sandwich", cert.psi1_sandwich && cert.psi2_sandwich);
            Ok(rep
                .summary(format!("smooth MP*_{{{m},{r}}} witness on {{0..{big_r}}}^{m}: K ~ {:.6}", to_f64(&cert.k_mix)))
                .cert("witness", doc))
        }
        WitnessKind::RsSmooth { m, r } => {
            let (lam, cert) = build_rs_smooth(*m, *r)?;
            let claims = json!({ "distribution": true, "min_at_least": rat(&cert.floor) });
            let c = json!({
                "m": m, "r": r, "delta": rat(&cert.delta), "psi0": rat(&cert.psi0), "d_psi": cert.d_psi,
                "floor": rat(&cert.floor), "min_value": rat(&cert.min_value), "orth_bound": cert.orth_bound,
                "orth": js::orth(&cert.orth),
            });
            let mut rep = Report::new("witness build rs-smooth").param("m", m).param("r", r);
            rep.check("min Lambda >= floor", cert.min_value >= cert.floor);
            rep.check("orth >= bound", cert.orth.at_least(cert.orth_bound));
            Ok(rep
                .summary(format!("min-smooth MP_{{{m},{r}}} witness: orth >= {}", cert.orth_bound))
                .cert("witness", witness_doc("rs-smooth", &lam, claims, c)))
        }
    }
}

fn oracle(cmd: &OracleCmd) -> Result<Report> {
    match cmd {
        OracleCmd::Degthr { f } => {
            let a = threshold_degree(&f.table()?)?;
            Ok(Report::new("oracle degthr")
                .param("fn", f.describe())
                .summary(format!("threshold degree = {}", a.value))
                .cert("answer", degree_answer(&a)))
        }
        OracleCmd::SmoothDegthr { f, gamma } => {
            let a = smooth_threshold_degree(&f.table()?, &rq(gamma)?)?;
            Ok(Report::new("oracle smooth-degthr")
                .param("fn", f.describe())
                .param("gamma", gamma)
                .summary(format!("smooth threshold degree = {}", a.value))
                .cert("answer", degree_answer(&a)))
        }
        OracleCmd::Approx { f, eps } => {
            let a = iii_approx_degree(&f.table()?, &[], &IiiSpec::approx(&rq(eps)?))?;
            Ok(Report::new("oracle approx")
                .param("fn", f.describe())
                .param("eps", eps)
                .summary(format!("approximate degree = {}", a.value))
                .cert("answer", degree_answer(&a)))
        }
        OracleCmd::Disc { matrix } => {
            let m = read_csv_matrix(matrix)?;
            let signs: SignMatrix = m
                .iter()
                .map(|r| r.iter().map(|v| if v.is_positive() { 1 } else { -1 }).collect())
                .collect();
            if m.iter().flatten().any(|v| v.abs() != Q::one()) {
                bail!("discrepancy needs a +1/-1 matrix");
            }
            let d = discrepancy_2party(&signs)?;
            let p: Vec<Vec<Value>> = d.p.iter().map(|r| r.iter().map(rat).collect()).collect();
            Ok(Report::new("oracle disc")
                .summary(format!("discrepancy = {}", d.value))
                .cert("answer", json!({ "value": rat(&d.value), "p": p })))
        }
        OracleCmd::Density { f, cap } => {
            let a = threshold_density(&f.table()?, *cap)?;
            let doc = match &a {
                DensityAnswer::Found { family, weights } => {
                    json!({ "value": family.len(), "family": family, "weights": weights.iter().map(rat).collect::<Vec<_>>() })
                }
                DensityAnswer::AtLeast(v) => json!({ "at_least": v }),
            };
            let text = match a {
                DensityAnswer::Found { .. } => format!("threshold density = {}", a.value()),
                DensityAnswer::AtLeast(v) => format!("threshold density >= {v}"),
            };
            Ok(Report::new("oracle density").param("fn", f.describe()).param("cap", cap).summary(text).cert("answer", doc))
        }
    }
}

fn bounds(cmd: &BoundsCmd) -> Result<Report> {
    match cmd {
        BoundsCmd::Pattern { f, big_n } => {
            let phi = match &f.table {
                Some(p) => js::parse_table(&read_json(p)?)?,
                None => {
                    let t = f.table()?;
                    FnTable::from_fn(t.domain().clone(), |x| if t.get(x).is_zero() { q(1) } else { q(-1) })
                }
            };
            let n = phi.domain().require_hypercube()?;
            let pm = PatternMatrix::new(*big_n, n, phi)?;
            let norm = pm.norm_sq()?;
            let mut rep = Report::new("bounds pattern").param("N", big_n).param("n", n);
            let mut doc = json!({ "norm_sq": rat(&norm.norm_sq), "argmax": norm.argmax, "coefficient": rat(&norm.coefficient), "norm": js::bracket(&norm.norm) });
            if pm.rows() * pm.cols() <= 1 << 12 {
                let chk = check_pattern_norm(&pm, BISECTION_STEPS)?;
                rep.check("closed form inside certified enclosure", chk.inside);
                rep.check("closed form is an exact eigenvalue", chk.exact_eigenvalue);
                doc["exact_check"] = json!({ "enclosure": js::bracket(&chk.bracket), "exact_eigenvalue": chk.exact_eigenvalue });
            }
            if let Ok(cmp) = compare_pattern_norm(&pm) {
                rep.check("numeric agreement", cmp.relative_error <= REL_TOL);
                doc["numeric"] = json!({ "formula": cmp.formula, "svd": cmp.numeric, "relative_error": cmp.relative_error });
            }
            Ok(rep.summary(format!("||A||^2 = {}", norm.norm_sq)).cert("pattern", doc))
        }
        BoundsCmd::Forster { matrix, realization } => {
            let m = read_csv_matrix(matrix)?;
            let mut b = forster_bound(&m)?;
            if let Some(p) = realization {
                b = b.with_realization(&m, &read_csv_matrix(p)?)?;
            }
            let doc = json!({ "lower": rat(&b.lower), "value": js::bracket(&b.value), "upper": b.upper, "methods": format!("{:?}", b.methods) });
            Ok(Report::new("bounds forster")
                .summary(format!("sign-rank >= {:.6}{}", to_f64(&b.lower), b.upper.map(|u| format!(", <= {u}")).unwrap_or_default()))
                .cert("bound", doc))
        }
        BoundsCmd::Signrank { f, gamma, d, t } => {
            let b = signrank_lb_pattern(&f.table()?, &rq(gamma)?, *d, *t)?;
            Ok(Report::new("bounds signrank")
                .param("fn", f.describe())
                .param("gamma", gamma)
                .param("d", d)
                .param("T", t)
                .summary(format!("sign-rank >= {:.6} (certified degree {})", to_f64(&b.bound.lo), b.certified_degree))
                .cert("bound", json!({ "bound": js::bracket(&b.bound), "certified_degree": b.certified_degree })))
        }
        BoundsCmd::Formulas { c, l, m, d, srank, disc } => {
            let cq = rq(c)?;
            let disc_b = pm_discrepancy_bound(&cq, *l, *m, *d)?;
            let mut doc = json!({ "disc_upper": js::bracket(&disc_b) });
            if let Some(s) = srank {
                doc["upp_range"] = js::bracket(&upp_range(*s)?);
            }
            if let Some(dq) = disc {
                doc["pp_lower"] = js::bracket(&pp_lower_bound(&rq(dq)?)?);
            }
            Ok(Report::new("bounds formulas")
                .param("c", c)
                .param("l", l)
                .param("m", m)
                .param("d", d)
                .summary(format!("disc <= {:.6}", to_f64(&disc_b.hi)))
                .cert("formulas", doc))
        }
        BoundsCmd::Rank1 { matrix } => {
            let yes = signrank_le_1(&read_csv_matrix(matrix)?);
            Ok(Report::new("bounds rank1").summary(format!("sign-rank <= 1: {yes}")).cert("answer", json!({ "rank_one": yes })))
        }
    }
}

fn amplify(cmd: &AmplifyCmd) -> Result<Report> {
    match cmd {
        AmplifyCmd::G { n } => {
            let g = build_g(*n)?;
            let checked = g.verify()?;
            let doc = json!({
                "n": n, "L": g.l, "bits": g.bits, "checks": g.checks, "labels": g.labels,
                "search_based": g.search_based, "candidates_tried": g.candidates_tried,
                "fibre_sizes": g.fibre_sizes(), "moment_checks": checked,
            });
            Ok(Report::new("amplify g").param("n", n).summary(format!("g: {checked} moment equalities verified")).cert("g", doc))
        }
        AmplifyCmd::Compression { n, theta } => {
            let big = build_compression(*n, *theta)?;
            let fib: Vec<Value> =
                big.codomain().points().iter().map(|v| json!([v, big.fibre_size(v).to_string()])).collect();
            Ok(Report::new("amplify compression")
                .param("n", n)
                .param("theta", theta)
                .summary(format!("G on {} bits onto N^{n}|<={theta}", big.input_bits()))
                .cert("compression", json!({ "input_bits": big.input_bits(), "fibre_sizes": fib, "checks": big.g.checks })))
        }
        AmplifyCmd::Booleanize { n, m, r, d, theta } => {
            let theta = match theta {
                Some(t) => *t,
                None => {
                    let c1 = build_mp_witness(*m, *r)?.1.gadget.c1;
                    booleanize_min_theta(n * m, &c1.min(Q::one()), *d)
                }
            };
            let all = booleanize_all(*n, *m, *r, *d, theta)?;
            let items: Vec<Value> = all
                .iter()
                .map(|b| json!({ "z": b.z, "lambda_tilde": js::table(&b.lambda_tilde), "support_ok": b.cert.support_ok, "heavy_points": b.cert.weight.heavy_points }))
                .collect();
            let mut rep = Report::new("amplify booleanize").param("n", n).param("m", m).param("r", r).param("d", d).param("theta", theta);
            rep.check("support and distribution", all.iter().all(|b| b.cert.support_ok && b.cert.distribution));
            rep.check("orthogonality of the correction", all.iter().all(|b| b.cert.weight.orth_ok));
            Ok(rep
                .summary(format!("{} Booleanized distributions at theta = {theta}", all.len()))
                .cert("booleanize", json!({ "theta": theta, "orth_bound": all[0].cert.orth_bound, "items": items })))
        }
        AmplifyCmd::Smooth { f, blocks, scale, big_r, theta, gamma, d } => {
            let table = f.table()?;
            let n = table.domain().require_hypercube()?;
            let mu = FnTable::from_fn(Domain::Hypercube(n), |_| Q::new(1.into(), (1u64 << n).into()));
            let params = AmplifyParams { m: *blocks, r: *scale, big_r: *big_r, theta: *theta, gamma: rq(gamma)?, d: *d };
            let out = min_smooth_amplify(&table, &mu, &params)?;
            let c = &out.cert;
            let mut rep = Report::new("amplify smooth").param("fn", f.describe()).param("R", big_r).param("theta", theta).param("d", d);
            rep.check("re-verification", out.verify().is_ok());
            let doc = json!({
                "lambda": js::table(&out.lambda), "d_f": c.d_f, "orth": js::orth(&c.orth), "sign_ok": c.sign_ok,
                "half_condition": c.half_condition, "min_smooth_factor": rat(&c.min_smooth_factor), "l1_final": rat(&c.l1_final),
            });
            Ok(rep.summary(format!("orth >= {}, min-smooth factor ~ {:.6e}", c.orth.lower_bound(), to_f64(&c.min_smooth_factor))).cert("amplified", doc))
        }
        AmplifyCmd::Circuit { f, blocks, theta } => {
            let c = f.circuit()?;
            let amp = amplify_circuit_once(&c, *blocks, *theta)?;
            let [fs, hs, cs] = &amp.stats;
            Ok(Report::new("amplify circuit")
                .param("fn", f.describe())
                .param("blocks", blocks)
                .param("theta", theta)
                .summary(format!("f o H: size {}, depth {}, bottom fan-in {}", cs.size, cs.depth, cs.bottom_fan_in))
                .file("composed.dot", amp.composed.to_dot())
                .cert("composed", js::circuit(&amp.composed))
                .cert("negated", js::circuit(&amp.negated))
                .cert("stats", json!({ "f": js::stats(fs), "h": js::stats(hs), "composed": js::stats(cs) })))
        }
    }
}

fn circuits(cmd: &CircuitCmd) -> Result<Report> {
    match cmd {
        CircuitCmd::Mp { m, r } => {
            let c = mp(*m, *r)?;
            Ok(circuit_report("circuits mp", &c).param("m", m).param("r", r))
        }
        CircuitCmd::Surj { n, r } => {
            let t = surj(*n, *r)?;
            Ok(Report::new("circuits surj")
                .param("n", n)
                .param("r", r)
                .summary(format!("SURJ_{{{n},{r}}}: {} ones among {} points", t.support_len(), t.domain().size()))
                .file("surj.csv", js::table_csv(&t)?)
                .cert("table", js::table(&t)))
        }
        CircuitCmd::Kp { f } => Ok(circuit_report("circuits kp", &krause_pudlak(&f.circuit()?)?).param("fn", f.describe())),
        CircuitCmd::Fkn { k, n } => {
            let fk = build_fkn(*k, *n)?;
            let levels: Vec<Value> = fk
                .levels
                .iter()
                .map(|l| json!({ "k": l.k, "budget": l.budget, "inner_n": l.inner_n, "m": l.m, "theta": l.theta }))
                .collect();
            Ok(circuit_report("circuits fkn", &fk.circuit).param("k", k).param("n", n).cert("levels", Value::Array(levels)))
        }
        CircuitCmd::Eval { circuit, x } => {
            let c = js::parse_circuit(&read_json(circuit)?)?;
            let bits: Vec<bool> = x
                .chars()
                .map(|ch| match ch {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(anyhow!("input bits must be 0/1, got {other:?}")),
                })
                .collect::<Result<_>>()?;
            let v = c.evaluate(&bits)?;
            Ok(Report::new("circuits eval").param("x", x).summary(format!("value = {}", v as u8)).cert("answer", json!({ "value": v })))
        }
        CircuitCmd::Table { f } => {
            let t = f.table()?;
            Ok(Report::new("circuits table")
                .param("fn", f.describe())
                .summary(format!("{} ones among {} points", t.support_len(), t.domain().size()))
                .file("table.csv", js::table_csv(&t)?)
                .cert("table", js::table(&t)))
        }
    }
}

fn circuit_report(command: &str, c: &CircuitDesc) -> Report {
    let s = c.stats();
    Report::new(command)
        .summary(format!("{} inputs, size {}, depth {}, bottom fan-in {}", c.inputs, s.size, s.depth, s.bottom_fan_in))
        .file("circuit.dot", c.to_dot())
        .cert("circuit", js::circuit(c))
}

/// Re-checks the `claims` of a witness document against its `table`.
pub fn verify(path: &Path) -> Result<Report> {
    let file = read_json(path)?;
    // Accept both bare witness documents and the envelopes written by `--out`.
    let doc = file.get("content").unwrap_or(&file);
    let table = js::parse_table(doc.get("table").ok_or_else(|| anyhow!("document has no table"))?)?;
    let claims = doc.get("claims").cloned().unwrap_or(json!({}));
    let mut rep = Report::new("verify").param("file", path.display());
    let mut checked = Vec::new();
    if let Some(d) = claims.get("orth_at_least").and_then(Value::as_u64) {
        rep.check(&format!("orth >= {d}"), orth_at_least(&table, d as u32));
        checked.push("orth");
    }
    if let Some(l1) = claims.get("l1") {
        rep.check("l1 norm", table.l1() == js::parse_rat(l1)?);
        checked.push("l1");
    }
    if let Some(b) = claims.get("l1_at_most") {
        rep.check("l1 bound", table.l1() <= js::parse_rat(b)?);
        checked.push("l1 bound");
    }
    if claims.get("alternating").and_then(Value::as_bool) == Some(true) {
        let ok = table.domain().points().iter().all(|x| {
            let v = table.get(x);
            !v.is_zero() && v.is_positive() == (x.iter().sum::<i64>() % 2 == 0)
        });
        rep.check("alternating signs", ok);
        checked.push("signs");
    }
    if claims.get("distribution").and_then(Value::as_bool) == Some(true) {
        rep.check("distribution", table.is_distribution());
        checked.push("distribution");
    }
    if let Some(m) = claims.get("min_at_least") {
        let floor = js::parse_rat(m)?;
        rep.check("pointwise floor", table.domain().points().iter().all(|x| table.get(x) >= floor));
        checked.push("floor");
    }
    let o = orth(&table, 64);
    Ok(rep
        .summary(format!("checked {}: orth {}", checked.join(", "), o.lower_bound()))
        .cert("verification", json!({ "checked": checked, "orth": js::orth(&o) })))
}

fn repro(cmd: &ReproCmd) -> Result<Report> {
    match cmd {
        ReproCmd::All => Ok(acceptance_report(acceptance::run_all())),
        ReproCmd::Criterion { id } => Ok(acceptance_report(vec![acceptance::run_one(*id)?])),
        ReproCmd::Manifest { path } => {
            let old = RunManifest::load(path)?;
            let cli = Cli::try_parse_from(std::iter::once("dualpoly".to_string()).chain(old.argv.iter().cloned()))
                .map_err(|e| anyhow!("manifest argv no longer parses: {e}"))?;
            let rep = execute(&cli)?;
            let new = manifest_for(&rep, old.argv.clone(), &[], 0);
            let mismatches = old.digest_mismatches(&new);
            let mut out = Report::new("repro manifest").param("manifest", path.display());
            out.check(&format!("identical certificates (differ: {mismatches:?})"), mismatches.is_empty());
            Ok(out
                .summary(format!("re-ran `{}`: {} certificates compared", old.command, new.certificate_digests.len()))
                .cert("comparison", json!({ "mismatches": mismatches, "command": old.command })))
        }
    }
}

fn acceptance_report(results: Vec<acceptance::CriterionResult>) -> Report {
    let mut rep = Report::new("repro").param("seed", acceptance::SEED);
    rep.seeds.push(acceptance::SEED);
    let lines: Vec<String> = results.iter().map(|r| r.line()).collect();
    let doc: Vec<Value> = results
        .iter()
        .map(|r| json!({ "id": r.id, "title": r.title, "pass": r.pass, "detail": r.detail, "known_failure": KNOWN_FAILURES.contains(&r.id) }))
        .collect();
    for r in &results {
        rep.check(&format!("criterion {}", r.id), r.pass);
    }
    let passed = results.iter().filter(|r| r.pass).count();
    rep.summary(format!("{passed}/{} criteria pass\n{}", results.len(), lines.join("\n"))).cert("acceptance", Value::Array(doc))
}

fn manifest_for(rep: &Report, argv: Vec<String>, artifacts: &[Artifact], ms: u128) -> RunManifest {
    let mut m = RunManifest::new(&rep.command, argv);
    m.parameters = rep.parameters.clone();
    m.seeds = rep.seeds.clone();
    m.artifacts = artifacts.to_vec();
    m.pass = rep.pass;
    m.wall_clock_ms = ms;
    // Acceptance timings are not reproducible, so only verdicts are digested there.
    for (k, v) in &rep.certificates {
        m.certificate_digests.insert(k.clone(), sha256_hex(canonical(v).as_bytes()));
    }
    m
}

fn write_artifacts(dir: &Path, rep: &Report, argv: Vec<String>, ms: u128) -> Result<RunManifest> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut artifacts = Vec::new();
    let mut write = |name: &str, contents: &str| -> Result<()> {
        std::fs::write(dir.join(name), contents).with_context(|| format!("writing {name}"))?;
        artifacts.push(Artifact { path: name.into(), sha256: sha256_hex(contents.as_bytes()) });
        Ok(())
    };
    for (k, v) in &rep.certificates {
        let doc = json!({ "schema": SCHEMA_VERSION, "command": rep.command, "name": k, "pass": rep.pass, "content": v });
        write(&format!("{k}.json"), &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    }
    for (name, contents) in &rep.files {
        write(name, contents)?;
    }
    let m = manifest_for(rep, argv, &artifacts, ms);
    m.save(&dir.join("manifest.json"))?;
    Ok(m)
}

/// Parses `argv` (including the program name), runs the command, writes
/// artifacts and returns the exit code: 0 when every certificate passes, 1
/// otherwise. Usage errors are reported by clap with exit code 2.
pub fn run(argv: Vec<String>) -> Result<i32> {
    let cli = Cli::parse_from(argv.clone());
    let start = Instant::now();
    let rep = execute(&cli)?;
    let ms = start.elapsed().as_millis();
    let out = cli.out.clone().or_else(|| std::env::var_os(WORKDIR_ENV).map(PathBuf::from));
    // Output errors (e.g. a closed pipe) must not turn a verdict into a panic.
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{}: {}", if rep.pass { "PASS" } else { "FAIL" }, rep.summary);
    if let Some(dir) = out {
        write_artifacts(&dir, &rep, argv[1..].to_vec(), ms)?;
        let _ = writeln!(stdout, "artifacts written to {}", dir.display());
    } else {
        for (k, v) in &rep.certificates {
            if k != "acceptance" {
                let _ = writeln!(stdout, "{k}: {}", serde_json::to_string_pretty(v)?);
            }
        }
    }
    Ok(if rep.pass { 0 } else { 1 })
}
