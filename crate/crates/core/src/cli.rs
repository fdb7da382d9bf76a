//! The `convlab` command line.
//!
//! Exit status: 0 when the check passes (converges, member, finite norm,
//! successful construction), 1 when it is disproved at the horizon, 2 when
//! it stays undecided, 64 for usage and input errors.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::convergence::{
    check_alpha_p, check_alpha_p_cauchy, check_cauchy_in_measure, check_in_measure, synthesize_witness,
    AlphaPReport, CheckConfig, DecisionRule, InMeasureReport, Verdict, WitnessSequence, DEFAULT_DELTA_GRID,
};
use crate::error::Error;
use crate::func::{lp_integral_on, superlevel_set, FunctionSequence, IntegralValue, PiecewiseFunction};
use crate::gallery::{self, GalleryId, GalleryItem};
use crate::input::{ProblemFile, WitnessTemplate};
use crate::measure::{Interval, IntervalSet};
use crate::oracle::{grid_measure, mc_integral, GridEstimate, McEstimate};
use crate::weak::{
    check_ap_membership, check_weak_lp_convergence, weak_lp_quasinorm, weak_to_ap_embedding, ApCertificate, ApStatus,
    Embedding, WeakConvergenceReport, WeakLpReport,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "convlab", version, about = "Finite-horizon convergence certificates on 1-D Lebesgue spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Source {
    /// JSON problem file
    #[arg(long, value_name = "PATH", conflicts_with = "gallery")]
    pub spec: Option<PathBuf>,
    /// Built-in example: E1, E2, E3 or E4
    #[arg(long, value_name = "ID")]
    pub gallery: Option<String>,
    /// Exponent p >= 1 (default: the problem file's, else 2)
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Write the report here (atomically) instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct RuleArgs {
    /// Largest last term accepted as converged
    #[arg(long = "pass-th", default_value_t = crate::convergence::DEFAULT_PASS_THRESHOLD)]
    pub pass_th: f64,
    /// Smallest tail minimum rejected as non-convergent
    #[arg(long = "fail-th", default_value_t = crate::convergence::DEFAULT_FAIL_THRESHOLD)]
    pub fail_th: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// Construct B_k from the sequence itself
    Synth,
    /// B_k = X for every k
    Full,
    /// Take the witness template from the problem file
    Spec,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// mu(|f_n - f| >= delta) -> 0 at each delta
    CheckInMeasure {
        #[command(flatten)]
        source: Source,
        /// A number, a comma-separated list, or `grid` for 1,0.1,0.01,0.001
        #[arg(long, default_value = "grid")]
        delta: String,
        #[arg(long, default_value_t = 256)]
        horizon: u64,
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Asymptotic L_p-convergence along a witness sequence
    CheckAlpha {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 256)]
        horizon: u64,
        #[arg(long, value_enum, default_value_t = WitnessKind::Synth)]
        witness: WitnessKind,
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Build the witness sets B_k = E_k(lambda_k)^c
    SynthWitness {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 256)]
        horizon: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Cauchy in measure, or asymptotically L_p-Cauchy with --alpha
    CheckCauchy {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "grid")]
        delta: String,
        #[arg(long, default_value_t = 256)]
        horizon: u64,
        #[arg(long = "pair-window", default_value_t = crate::convergence::DEFAULT_PAIR_WINDOW)]
        pair_window: u64,
        #[arg(long = "pair-budget", default_value_t = 4096)]
        pair_budget: u64,
        /// Check the integral form over B_n ∩ B_m instead
        #[arg(long)]
        alpha: bool,
        #[arg(long, value_enum, default_value_t = WitnessKind::Synth)]
        witness: WitnessKind,
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Weak L_p quasinorm of a function (or of f_n with --n)
    WeakNorm {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Weak L_p quasinorm of f_n - f -> 0
    CheckWeakConv {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 256)]
        horizon: u64,
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Almost-L_p membership on a delta grid
    ApMember {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value = "grid")]
        delta: String,
        #[command(flatten)]
        output: Output,
    },
    /// The set E_delta = {|f| >= K} and bound K^p mu(X) for weak L_p functions
    Embed {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        output: Output,
    },
    /// List the built-in examples, or print one with --gallery
    Gallery {
        #[arg(long, value_name = "ID")]
        gallery: Option<String>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Cross-check superlevel measure and integral against brute force
    Oracle {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        delta: f64,
        /// Bounded window `lo,hi` (default: the carrier)
        #[arg(long)]
        window: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        cells: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Print the JSON schema of the report files
    Schema {
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct OracleReport {
    pub delta: f64,
    pub p: f64,
    pub window: Interval,
    pub grid: GridEstimate,
    pub analytic_measure: f64,
    pub mc: McEstimate,
    pub analytic_integral: IntegralValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", content = "data", rename_all = "kebab-case")]
pub enum Report {
    InMeasure(Vec<InMeasureReport>),
    AlphaP(AlphaPReport),
    Witness(WitnessSequence),
    CauchyInMeasure(Vec<InMeasureReport>),
    AlphaPCauchy(AlphaPReport),
    WeakNorm(WeakLpReport),
    WeakConvergence(WeakConvergenceReport),
    ApMembership(ApCertificate),
    Embedding(Embedding),
    Gallery(Vec<GalleryItem>),
    Oracle(OracleReport),
}

/// Top-level object of every JSON report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Envelope {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub source: String,
    pub exit_code: i32,
    pub summary: String,
    pub report: Report,
}

pub fn report_schema() -> serde_json::Value {
    serde_json::to_value(schemars::schema_for!(Envelope)).expect("schema serializes")
}

/// Failure of a run, with its exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PieceCap { .. } | Error::Invariant(_) => EXIT_UNDECIDED,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

type Outcome = std::result::Result<(), Failure>;

/// What a source resolved to.
struct Problem {
    label: String,
    p: f64,
    sequence: Option<FunctionSequence>,
    limit: Option<PiecewiseFunction>,
    function: Option<PiecewiseFunction>,
    witness: Option<WitnessTemplate>,
}

impl Problem {
    fn load(src: &Source) -> std::result::Result<Self, Failure> {
        if let Some(p) = src.p {
            if !(p >= 1.0) || !p.is_finite() {
                return Err(usage(format!("--p must be a finite number >= 1, got {p}")));
            }
        }
        match (&src.spec, &src.gallery) {
            (Some(path), None) => {
                let file = ProblemFile::load(path).map_err(|e| usage(e.to_string()))?;
                let p = src.p.or(file.p).unwrap_or(2.0);
                Ok(Problem {
                    label: path.display().to_string(),
                    p,
                    sequence: file.sequence(p),
                    limit: file.limit.clone(),
                    function: file.function.clone(),
                    witness: file.witness.clone(),
                })
            }
            (None, Some(id)) => {
                let id: GalleryId = id.parse()?;
                let p = src.p.unwrap_or(2.0);
                let item = gallery::build(id, p)?;
                Ok(Problem {
                    label: format!("gallery {id}"),
                    p,
                    sequence: item.sequence().cloned(),
                    limit: item.sequence().map(|_| item.limit()),
                    function: item.function().cloned(),
                    witness: None,
                })
            }
            _ => Err(usage("exactly one of --spec or --gallery is required")),
        }
    }

    fn sequence(&self) -> std::result::Result<&FunctionSequence, Failure> {
        self.sequence.as_ref().ok_or_else(|| usage(format!("{} does not define a sequence", self.label)))
    }

    /// The candidate limit, zero when the problem names none.
    fn limit(&self) -> std::result::Result<PiecewiseFunction, Failure> {
        let seq = self.sequence()?;
        Ok(self.limit.clone().unwrap_or_else(|| PiecewiseFunction::zero(seq.domain())))
    }

    /// A single function: the problem's own, or `f_n` of its sequence.
    fn function(&self, n: Option<u64>) -> std::result::Result<PiecewiseFunction, Failure> {
        match (n, &self.function, &self.sequence) {
            (Some(n), _, Some(seq)) => Ok(seq.instantiate(n)?),
            (None, Some(f), _) => Ok(f.clone()),
            (None, None, Some(_)) => Err(usage(format!("{} defines a sequence; pick a term with --n", self.label))),
            (Some(_), _, None) => Err(usage(format!("{} has no sequence to index with --n", self.label))),
            (None, None, None) => Err(usage(format!("{} defines no function", self.label))),
        }
    }

    fn witness(&self, kind: WitnessKind, horizon: u64) -> std::result::Result<WitnessSequence, Failure> {
        let seq = self.sequence()?;
        match kind {
            WitnessKind::Synth => Ok(synthesize_witness(seq, &self.limit()?, self.p, horizon)?),
            WitnessKind::Full => Ok(WitnessSequence::full(seq.domain(), horizon)),
            WitnessKind::Spec => {
                let t = self
                    .witness
                    .as_ref()
                    .ok_or_else(|| usage(format!("{} has no witness template", self.label)))?;
                Ok(t.instantiate(seq.domain(), horizon, self.p)?)
            }
        }
    }
}

fn parse_deltas(s: &str) -> std::result::Result<Vec<f64>, Failure> {
    if s.trim().eq_ignore_ascii_case("grid") {
        return Ok(DEFAULT_DELTA_GRID.to_vec());
    }
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("bad --delta value {t:?}"))))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if v.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
        return Err(usage("--delta values must be positive"));
    }
    Ok(v)
}

fn config(rule: &RuleArgs, pair_window: Option<u64>) -> std::result::Result<CheckConfig, Failure> {
    if !(rule.pass_th >= 0.0) || !(rule.fail_th >= 0.0) {
        return Err(usage("thresholds must be non-negative"));
    }
    let mut cfg = CheckConfig { rule: DecisionRule::new(rule.pass_th, rule.fail_th), ..CheckConfig::default() };
    if let Some(w) = pair_window {
        cfg.pair_window = w;
    }
    Ok(cfg)
}

fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    verdicts.into_iter().fold(Verdict::ConvergesAtHorizon, Verdict::and)
}

fn horizon_ok(h: u64) -> Outcome {
    if h < crate::convergence::MIN_HORIZON {
        return Err(usage(format!("--horizon must be at least {}, got {h}", crate::convergence::MIN_HORIZON)));
    }
    Ok(())
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}

struct Emit<'a> {
    command: &'a str,
    source: String,
    summary: String,
    code: i32,
    report: Report,
    csv: Option<String>,
}

fn emit(out: &Output, e: Emit) -> Outcome {
    let body = match out.format {
        Format::Json => {
            let env = Envelope {
                tool: "convlab".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: e.command.into(),
                source: e.source,
                exit_code: e.code,
                summary: e.summary.clone(),
                report: e.report,
            };
            let mut s = serde_json::to_string_pretty(&env).map_err(|err| Failure {
                code: EXIT_UNDECIDED,
                message: format!("report could not be serialized: {err}"),
            })?;
            s.push('\n');
            s
        }
        Format::Csv => e.csv.ok_or_else(|| usage(format!("{} has no CSV form; use --format json", e.command)))?,
    };
    match &out.out {
        Some(path) => {
            write_atomic(path, body.as_bytes())
                .map_err(|err| usage(format!("cannot write {}: {err}", path.display())))?;
            println!("{} ({})", e.summary, path.display());
        }
        None => {
            print!("{body}");
            eprintln!("{}", e.summary);
        }
    }
    if e.code == EXIT_PASS {
        Ok(())
    } else {
        Err(Failure { code: e.code, message: String::new() })
    }
}

fn in_measure_csv(reports: &[InMeasureReport]) -> String {
    let mut s = format!("{}\n", InMeasureReport::CSV_HEADER);
    for r in reports {
        s.push_str(&r.csv_rows());
    }
    s
}

fn weak_conv_csv(r: &WeakConvergenceReport) -> String {
    let mut s = String::from("n,value,err,verdict_contribution\n");
    for (n, q) in r.indices.iter().zip(&r.per_n) {
        let (v, tag) = match q.value() {
            Some(v) if *n < r.decision_rule.window_start => (format!("{v:e}"), "warmup"),
            Some(v) if v > r.decision_rule.rule.fail_threshold => (format!("{v:e}"), "above-fail"),
            Some(v) if v > r.decision_rule.rule.pass_threshold => (format!("{v:e}"), "between"),
            Some(v) => (format!("{v:e}"), "below-pass"),
            None => ("inf".into(), "divergent"),
        };
        s.push_str(&format!("{n},{v},0,{tag}\n"));
    }
    s
}

fn witness_csv(w: &WitnessSequence) -> String {
    let mut s = String::from("n,value,err,verdict_contribution,lambda\n");
    for k in 1..=w.len() {
        let level = w.level_of(k).map_or("before-schedule".to_string(), |l| format!("level-{l}"));
        let lambda = w.lambda(k).map_or(String::new(), |l| format!("{l:e}"));
        s.push_str(&format!("{k},{:e},0,{level},{lambda}\n", w.complement_measure(k).unwrap_or(f64::NAN)));
    }
    s
}

fn run_command(cmd: Command) -> Outcome {
    match cmd {
        Command::CheckInMeasure { source, delta, horizon, rule, output } => {
            horizon_ok(horizon)?;
            let prob = Problem::load(&source)?;
            let cfg = config(&rule, None)?;
            let (seq, f) = (prob.sequence()?, prob.limit()?);
            let reports = parse_deltas(&delta)?
                .into_iter()
                .map(|d| check_in_measure(seq, &f, d, horizon, &cfg))
                .collect::<crate::Result<Vec<_>>>()?;
            let v = combine(reports.iter().map(|r| r.verdict));
            let detail: Vec<String> = reports.iter().map(|r| format!("delta={}: {}", r.delta, r.verdict)).collect();
            emit(
                &output,
                Emit {
                    command: "check-in-measure",
                    summary: format!("check-in-measure {} horizon={horizon}: {v} [{}]", prob.label, detail.join(", ")),
                    source: prob.label,
                    code: v.exit_code(),
                    csv: Some(in_measure_csv(&reports)),
                    report: Report::InMeasure(reports),
                },
            )
        }
        Command::CheckAlpha { source, horizon, witness, rule, output } => {
            horizon_ok(horizon)?;
            let prob = Problem::load(&source)?;
            let cfg = config(&rule, None)?;
            let w = prob.witness(witness, horizon)?;
            let r = check_alpha_p(prob.sequence()?, &prob.limit()?, prob.p, &w, horizon, &cfg)?;
            emit(
                &output,
                Emit {
                    command: "check-alpha",
                    summary: format!(
                        "check-alpha {} p={} horizon={horizon}: {} (complements {}, integrals {})",
                        prob.label, prob.p, r.verdict, r.complement_rule.verdict, r.integral_rule.verdict
                    ),
                    source: prob.label,
                    code: r.verdict.exit_code(),
                    csv: Some(r.to_csv()),
                    report: Report::AlphaP(r),
                },
            )
        }
        Command::SynthWitness { source, horizon, output } => {
            horizon_ok(horizon)?;
            let prob = Problem::load(&source)?;
            let w = prob.witness(WitnessKind::Synth, horizon)?;
            let levels = w.thresholds.as_ref().map_or(0, Vec::len);
            let note = w.truncation.as_ref().map_or(String::new(), |t| format!("; truncated: {}", t.reason));
            emit(
                &output,
                Emit {
                    command: "synth-witness",
                    summary: format!("synth-witness {} horizon={horizon}: {levels} levels{note}", prob.label),
                    source: prob.label,
                    code: EXIT_PASS,
                    csv: Some(witness_csv(&w)),
                    report: Report::Witness(w),
                },
            )
        }
        Command::CheckCauchy { source, delta, horizon, pair_window, pair_budget, alpha, witness, rule, output } => {
            horizon_ok(horizon)?;
            let prob = Problem::load(&source)?;
            let cfg = config(&rule, Some(pair_window))?;
            let seq = prob.sequence()?;
            if alpha {
                let w = prob.witness(witness, horizon)?;
                let r = check_alpha_p_cauchy(seq, prob.p, &w, horizon, pair_budget, &cfg)?;
                emit(
                    &output,
                    Emit {
                        command: "check-cauchy",
                        summary: format!("check-cauchy --alpha {} p={} horizon={horizon}: {}", prob.label, prob.p, r.verdict),
                        source: prob.label,
                        code: r.verdict.exit_code(),
                        csv: Some(r.to_csv()),
                        report: Report::AlphaPCauchy(r),
                    },
                )
            } else {
                let reports = parse_deltas(&delta)?
                    .into_iter()
                    .map(|d| check_cauchy_in_measure(seq, d, horizon, pair_budget, &cfg))
                    .collect::<crate::Result<Vec<_>>>()?;
                let v = combine(reports.iter().map(|r| r.verdict));
                emit(
                    &output,
                    Emit {
                        command: "check-cauchy",
                        summary: format!("check-cauchy {} horizon={horizon}: {v}", prob.label),
                        source: prob.label,
                        code: v.exit_code(),
                        csv: Some(in_measure_csv(&reports)),
                        report: Report::CauchyInMeasure(reports),
                    },
                )
            }
        }
        Command::WeakNorm { source, n, output } => {
            let prob = Problem::load(&source)?;
            let r = weak_lp_quasinorm(&prob.function(n)?, prob.p)?;
            let (shown, code) = match r.quasinorm.value() {
                Some(v) => (format!("{v}"), EXIT_PASS),
                None => ("inf".to_string(), EXIT_FAIL),
            };
            emit(
                &output,
                Emit {
                    command: "weak-norm",
                    summary: format!("weak-norm {} p={}: quasinorm {shown}", prob.label, prob.p),
                    source: prob.label,
                    code,
                    csv: None,
                    report: Report::WeakNorm(r),
                },
            )
        }
        Command::CheckWeakConv { source, horizon, rule, output } => {
            horizon_ok(horizon)?;
            let prob = Problem::load(&source)?;
            let cfg = config(&rule, None)?;
            let r = check_weak_lp_convergence(prob.sequence()?, &prob.limit()?, prob.p, horizon, &cfg)?;
            emit(
                &output,
                Emit {
                    command: "check-weak-conv",
                    summary: format!("check-weak-conv {} p={} horizon={horizon}: {}", prob.label, prob.p, r.verdict),
                    source: prob.label,
                    code: r.verdict.exit_code(),
                    csv: Some(weak_conv_csv(&r)),
                    report: Report::WeakConvergence(r),
                },
            )
        }
        Command::ApMember { source, n, delta, output } => {
            let prob = Problem::load(&source)?;
            let mut grid = parse_deltas(&delta)?;
            grid.sort_by(|a, b| b.total_cmp(a));
            grid.dedup();
            let cert = check_ap_membership(&prob.function(n)?, prob.p, &grid)?;
            let code = match cert.status {
                ApStatus::Member => EXIT_PASS,
                ApStatus::NotMember => EXIT_FAIL,
                ApStatus::Unknown => EXIT_UNDECIDED,
            };
            let why = cert
                .obstruction
                .as_ref()
                .or(cert.diagnostic.as_ref())
                .map_or(String::new(), |s| format!(" ({s})"));
            let member = cert.member.map_or("unknown".to_string(), |m| m.to_string());
            emit(
                &output,
                Emit {
                    command: "ap-member",
                    summary: format!("ap-member {} p={}: member={member}{why}", prob.label, prob.p),
                    source: prob.label,
                    code,
                    csv: None,
                    report: Report::ApMembership(cert),
                },
            )
        }
        Command::Embed { source, n, delta, output } => {
            let prob = Problem::load(&source)?;
            let e = weak_to_ap_embedding(&prob.function(n)?, prob.p, delta)?;
            emit(
                &output,
                Emit {
                    command: "embed",
                    summary: format!(
                        "embed {} p={} delta={delta}: C={} K={} mu(E)={} bound={}",
                        prob.label, prob.p, e.quasinorm, e.k, e.set_measure, e.bound
                    ),
                    source: prob.label,
                    code: EXIT_PASS,
                    csv: None,
                    report: Report::Embedding(e),
                },
            )
        }
        Command::Gallery { gallery, p, output } => {
            let ids = match gallery {
                Some(id) => vec![id.parse::<GalleryId>()?],
                None => GalleryId::ALL.to_vec(),
            };
            let items = ids.into_iter().map(|id| gallery::build(id, p)).collect::<crate::Result<Vec<_>>>()?;
            let names: Vec<String> = items.iter().map(|i| i.id.to_string()).collect();
            emit(
                &output,
                Emit {
                    command: "gallery",
                    summary: format!("gallery p={p}: {}", names.join(" ")),
                    source: "gallery".into(),
                    code: EXIT_PASS,
                    csv: None,
                    report: Report::Gallery(items),
                },
            )
        }
        Command::Oracle { source, n, delta, window, cells, samples, seed, output } => {
            let prob = Problem::load(&source)?;
            let f = prob.function(n)?;
            let window = match window {
                Some(w) => {
                    let parts: Vec<&str> = w.split(',').collect();
                    let [lo, hi] = parts[..] else {
                        return Err(usage("--window takes `lo,hi`"));
                    };
                    let lo: f64 = lo.trim().parse().map_err(|_| usage("bad --window lower end"))?;
                    let hi: f64 = hi.trim().parse().map_err(|_| usage("bad --window upper end"))?;
                    Interval::closed(lo, hi)?
                }
                None => *f.domain().carrier(),
            };
            let grid = grid_measure(&f, delta, cells, &window)?;
            let analytic_measure = superlevel_set(&f, delta)?.intersect_interval(&window).measure();
            let b = IntervalSet::from_interval(window).intersect(&f.domain().as_set());
            let mc = mc_integral(&f, prob.p, &b, samples, seed)?;
            let analytic_integral = lp_integral_on(&f, prob.p, &b)?;
            let r = OracleReport { delta, p: prob.p, window, grid, analytic_measure, mc, analytic_integral };
            emit(
                &output,
                Emit {
                    command: "oracle",
                    summary: format!(
                        "oracle {}: measure analytic {} grid {} (h={:e}); integral analytic {:?} mc {} +- {}",
                        prob.label,
                        r.analytic_measure,
                        r.grid.value,
                        r.grid.resolution,
                        r.analytic_integral.value(),
                        r.mc.value,
                        r.mc.stderr
                    ),
                    source: prob.label,
                    code: EXIT_PASS,
                    csv: None,
                    report: Report::Oracle(r),
                },
            )
        }
        Command::Schema { output } => {
            let mut body = serde_json::to_string_pretty(&report_schema()).expect("schema serializes");
            body.push('\n');
            match &output.out {
                Some(path) => write_atomic(path, body.as_bytes())
                    .map_err(|err| usage(format!("cannot write {}: {err}", path.display()))),
                None => {
                    print!("{body}");
                    Ok(())
                }
            }
        }
    }
}

/// Parses `args` and runs the command; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match run_command(cli.command) {
        Ok(()) => EXIT_PASS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("convlab: {}", f.message);
            }
            f.code
        }
    }
}
