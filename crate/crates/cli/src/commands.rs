//! Subcommand implementations and the exit-code policy:
//! 0 = all checks pass, 1 = at least one failed, 2 = usage or IO error,
//! 3 = only undetermined outcomes (nothing failed, something was out of
//! reach of the enumeration bound or a ball cap, or a verdict was skipped).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use symx_core::construction::{
    build_groups, verify_lemma1, verify_lemma2, verify_theorem3, ConstructedSpecJson,
    ConstructionError, ParamsJson,
};
use symx_core::coset_graph::{CosetGraphSpec, CosetSpecJson, ExplicitGraph, ExplicitGraphJson};
use symx_core::local_analysis::{
    Analysis, AnalysisError, AnalysisOptions, AnalysisReport, Conformance,
};
use symx_core::stab_chain::GroupError;

use crate::corpus::{corpus_build, Check, ConformanceKind, Source};

/// Exact analysis of arc-transitive graphs given as coset presentations or
/// explicit graphs with a supplied automorphism group.
#[derive(Parser)]
#[command(name = "symx", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build the wreath-layered family from a parameter triple and write
    /// the coset spec (plus layout block).
    Construct {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full local analysis of a coset spec or explicit graph.
    Analyze {
        #[arg(long)]
        spec: PathBuf,
        /// Write the machine-readable report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Verify one statement family against a spec or parameter file.
    Verify {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Built-in example corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
pub enum CorpusAction {
    /// Analyse every corpus entry and check its expected values.
    Run {
        /// Only run entries whose name contains this substring.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Family {
    Lemma1,
    Lemma2,
    Thm3,
    Thm1,
    Hyp1,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Undetermined,
    Fail,
}

impl Outcome {
    fn merge(self, other: Outcome) -> Outcome {
        use Outcome::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Undetermined, _) | (_, Undetermined) => Undetermined,
            _ => Pass,
        }
    }

    fn code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Undetermined => 3,
        }
    }
}

/// Usage and IO problems; everything here exits with code 2.
pub enum CmdError {
    Io(PathBuf, std::io::Error),
    Json { path: PathBuf, line: usize, column: usize, message: String },
    Input(String),
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Io(path, e) => write!(f, "io error on {}: {}", path.display(), e),
            CmdError::Json { path, line, column, message } => write!(
                f,
                "malformed JSON in {} at line {}, column {}: {}",
                path.display(),
                line,
                column,
                message
            ),
            CmdError::Input(msg) => write!(f, "{}", msg),
        }
    }
}

fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, CmdError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CmdError::Io(path.to_path_buf(), e))?;
    serde_json::from_str(&text).map_err(|e| CmdError::Json {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CmdError> {
    let mut text = serde_json::to_string_pretty(value).expect("serialisable report");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CmdError::Io(path.to_path_buf(), e))
}

/// Enumeration bound from SYMX_ENUM_BOUND (decimal), default otherwise.
pub fn options_from_env() -> Result<AnalysisOptions, CmdError> {
    let mut opts = AnalysisOptions::default();
    if let Ok(text) = std::env::var("SYMX_ENUM_BOUND") {
        opts.enum_bound = text.trim().parse::<u64>().map_err(|_| {
            CmdError::Input(format!("SYMX_ENUM_BOUND must be a decimal integer, got {text:?}"))
        })?;
    }
    Ok(opts)
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(outcome) => outcome.code(),
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<Outcome, CmdError> {
    let opts = options_from_env()?;
    match cli.command {
        Command::Construct { params, out } => cmd_construct(&params, &out),
        Command::Analyze { spec, report } => cmd_analyze(&spec, report.as_deref(), opts),
        Command::Verify { family, spec, params, report } => {
            cmd_verify(family, spec.as_deref(), params.as_deref(), report.as_deref(), opts)
        }
        Command::Corpus { action: CorpusAction::Run { filter, report } } => {
            cmd_corpus_run(filter.as_deref(), report.as_deref(), opts)
        }
    }
}

fn construction_outcome(e: ConstructionError) -> Result<Outcome, CmdError> {
    match e {
        ConstructionError::BadR(_)
        | ConstructionError::BadS(_)
        | ConstructionError::BadM(_)
        | ConstructionError::BadCycleString { .. } => Err(CmdError::Input(e.to_string())),
        other => {
            eprintln!("construction check failed: {other}");
            Ok(Outcome::Fail)
        }
    }
}

fn cmd_construct(params_path: &Path, out_path: &Path) -> Result<Outcome, CmdError> {
    let params_json: ParamsJson = load_json(params_path)?;
    let params = match params_json.to_params() {
        Ok(p) => p,
        Err(e) => return construction_outcome(e),
    };
    let out = match build_groups(&params) {
        Ok(o) => o,
        Err(e) => return construction_outcome(e),
    };
    write_json(out_path, &ConstructedSpecJson::from_output(&out))?;
    println!(
        "constructed (r={}, s={}, m={}): n={}, |H|={}, |G|={}, wrote {}",
        params.r(),
        params.s(),
        params.m(),
        out.layout.n,
        out.h.order(),
        out.g.order(),
        out_path.display()
    );
    Ok(Outcome::Pass)
}

enum LoadedSpec {
    Coset(Box<CosetGraphSpec>),
    Explicit(Box<ExplicitGraph>),
}

fn load_spec(path: &Path) -> Result<LoadedSpec, CmdError> {
    let value: serde_json::Value = load_json(path)?;
    if value.get("degree").is_some() {
        let json: CosetSpecJson = serde_json::from_value(value).map_err(|e| CmdError::Json {
            path: path.to_path_buf(),
            line: 0,
            column: 0,
            message: e.to_string(),
        })?;
        let spec = json.to_spec().map_err(|e| CmdError::Input(e.to_string()))?;
        Ok(LoadedSpec::Coset(Box::new(spec)))
    } else if value.get("vertices").is_some() {
        let json: ExplicitGraphJson =
            serde_json::from_value(value).map_err(|e| CmdError::Json {
                path: path.to_path_buf(),
                line: 0,
                column: 0,
                message: e.to_string(),
            })?;
        let graph = json.to_graph().map_err(|e| CmdError::Input(e.to_string()))?;
        Ok(LoadedSpec::Explicit(Box::new(graph)))
    } else {
        Err(CmdError::Input(format!(
            "{}: neither a coset spec (degree/...) nor an explicit graph (vertices/...)",
            path.display()
        )))
    }
}

fn analysis_failure(e: AnalysisError) -> Outcome {
    match e {
        AnalysisError::Graph(symx_core::coset_graph::CosetGraphError::CapExceeded { .. })
        | AnalysisError::Group(GroupError::EnumerationBoundExceeded { .. }) => {
            eprintln!("analysis out of reach: {e}");
            Outcome::Undetermined
        }
        other => {
            eprintln!("analysis failed: {other}");
            Outcome::Fail
        }
    }
}

fn summarise(report: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "valency {}, |G_x| = {}, local action order {}, |G_x^[1]| = {}, |G_{{x,y}}^[1]| = {} ({}), branch {}, fstar {}, conformance {}",
        report.local.valency,
        report.local.order_gx,
        report.local.local_action_order,
        report.local.order_kernels.gx1,
        report.local.order_arc_kernel,
        report.local.arc_kernel_p,
        report.tw_verdict.branch,
        report.tw_verdict.fstar_clause,
        report.conformance,
    );
    s
}

fn analyze_loaded(
    loaded: &LoadedSpec,
    opts: AnalysisOptions,
) -> Result<(AnalysisReport, Outcome), Outcome> {
    match loaded {
        LoadedSpec::Coset(spec) => {
            let validation = spec.validate();
            if let Some(failure) = validation.failure() {
                eprintln!("invalid presentation: {failure}");
                return Err(Outcome::Fail);
            }
            let analysis = match Analysis::of_coset(spec, opts) {
                Ok(a) => a,
                Err(e) => return Err(analysis_failure(e)),
            };
            let report = AnalysisReport::from_analysis(&analysis, Some(validation));
            let outcome = report_outcome(&report);
            Ok((report, outcome))
        }
        LoadedSpec::Explicit(graph) => {
            let analysis = match Analysis::of_explicit(graph, 0, opts) {
                Ok(a) => a,
                Err(e) => return Err(analysis_failure(e)),
            };
            let report = AnalysisReport::from_analysis(&analysis, None);
            let outcome = report_outcome(&report);
            Ok((report, outcome))
        }
    }
}

fn report_outcome(report: &AnalysisReport) -> Outcome {
    match &report.conformance {
        Conformance::Fail(_) => Outcome::Fail,
        Conformance::Skip(why) if why.contains("undetermined") => Outcome::Undetermined,
        _ => Outcome::Pass,
    }
}

fn cmd_analyze(
    spec_path: &Path,
    report_path: Option<&Path>,
    opts: AnalysisOptions,
) -> Result<Outcome, CmdError> {
    let loaded = load_spec(spec_path)?;
    match analyze_loaded(&loaded, opts) {
        Ok((report, outcome)) => {
            if let Some(path) = report_path {
                write_json(path, &report)?;
            }
            println!("{}: {}", spec_path.display(), summarise(&report));
            Ok(outcome)
        }
        Err(outcome) => Ok(outcome),
    }
}

fn require<'p>(opt: Option<&'p Path>, what: &str, family: &str) -> Result<&'p Path, CmdError> {
    opt.ok_or_else(|| CmdError::Input(format!("verify --family {family} requires --{what}")))
}

fn cmd_verify(
    family: Family,
    spec_path: Option<&Path>,
    params_path: Option<&Path>,
    report_path: Option<&Path>,
    opts: AnalysisOptions,
) -> Result<Outcome, CmdError> {
    match family {
        Family::Lemma1 | Family::Lemma2 | Family::Thm3 => {
            let name = match family {
                Family::Lemma1 => "lemma1",
                Family::Lemma2 => "lemma2",
                _ => "thm3",
            };
            let params_json: ParamsJson = load_json(require(params_path, "params", name)?)?;
            let params = match params_json.to_params() {
                Ok(p) => p,
                Err(e) => return construction_outcome(e),
            };
            let out = match build_groups(&params) {
                Ok(o) => o,
                Err(e) => return construction_outcome(e),
            };
            let (ok, json) = match family {
                Family::Lemma1 => match verify_lemma1(&params, &out, opts) {
                    Ok(rep) => {
                        println!(
                            "lemma1: orbit={} conj-orbit={} K<=H^a={} K=stab={} core=L(order {})={} signature={}",
                            rep.orbit_is_x0,
                            rep.conjugate_orbit_ok,
                            rep.k_inside_conjugate,
                            rep.k_is_point_stabiliser,
                            rep.core_order,
                            rep.core_is_l,
                            rep.signature_agrees
                        );
                        (rep.all_pass(), serde_json::to_value(&rep).unwrap())
                    }
                    Err(e) => return construction_outcome(e),
                },
                Family::Lemma2 => match verify_lemma2(&out, opts) {
                    Ok(rep) => {
                        println!(
                            "lemma2: <V,a> transitive={} primitive={} |G|={} ({})",
                            rep.va_transitive,
                            rep.va_primitive,
                            rep.g_order,
                            if rep.full_symmetric {
                                "full symmetric"
                            } else if rep.alternating {
                                "alternating"
                            } else {
                                "neither n! nor n!/2"
                            }
                        );
                        (rep.all_pass(), serde_json::to_value(&rep).unwrap())
                    }
                    Err(e) => return construction_outcome(e),
                },
                _ => match verify_theorem3(&params, &out, opts) {
                    Ok(rep) => {
                        println!(
                            "thm3: valency {} ok={} |G_x^[1]|={} ok={} |G_{{x,y}}^[1]|={} ok={} product-witness={}",
                            rep.valency,
                            rep.valency_ok,
                            rep.gx1_order,
                            rep.gx1_ok,
                            rep.arc_kernel_order,
                            rep.arc_kernel_ok,
                            rep.product_witness_ok
                        );
                        (rep.all_pass(), serde_json::to_value(&rep).unwrap())
                    }
                    Err(e) => return construction_outcome(e),
                },
            };
            if let Some(path) = report_path {
                write_json(path, &json)?;
            }
            Ok(if ok { Outcome::Pass } else { Outcome::Fail })
        }
        Family::Thm1 => {
            let loaded = load_spec(require(spec_path, "spec", "thm1")?)?;
            match analyze_loaded(&loaded, opts) {
                Ok((report, _)) => {
                    println!("thm1: conformance {}", report.conformance);
                    if let Some(path) = report_path {
                        write_json(path, &report)?;
                    }
                    Ok(match &report.conformance {
                        Conformance::Pass => Outcome::Pass,
                        Conformance::Skip(_) => Outcome::Undetermined,
                        Conformance::Fail(_) => Outcome::Fail,
                    })
                }
                Err(outcome) => Ok(outcome),
            }
        }
        Family::Hyp1 => {
            let loaded = load_spec(require(spec_path, "spec", "hyp1")?)?;
            match analyze_loaded(&loaded, opts) {
                Ok((report, _)) => {
                    let hyp = &report.hypothesis;
                    println!(
                        "hyp1: cond(i) {:?}; cond(ii): {}",
                        hyp.cond_i.status,
                        hyp.cond_ii
                            .iter()
                            .map(|c| format!("p={} {:?}", c.prime, c.status))
                            .collect::<Vec<_>>()
                            .join(", ")
                    );
                    if let Some(path) = report_path {
                        write_json(path, &report)?;
                    }
                    Ok(if hyp.any_fail() {
                        Outcome::Fail
                    } else if hyp.any_undetermined() {
                        Outcome::Undetermined
                    } else {
                        Outcome::Pass
                    })
                }
                Err(outcome) => Ok(outcome),
            }
        }
    }
}

#[derive(Serialize)]
struct EntryResult {
    name: &'static str,
    outcome: &'static str,
    checks: Vec<Check>,
    conformance: ConformanceKind,
    report: AnalysisReport,
}

/// Runs one corpus entry: build, validate, analyse, compare to the
/// expected block. A conformance failure fails the entry regardless of the
/// expectations (the dichotomy must never be violated under a passing
/// hypothesis).
fn run_corpus_entry(
    entry: &crate::corpus::CorpusEntry,
    opts: AnalysisOptions,
) -> Result<EntryResult, String> {
    let (report, local_action) = match &entry.source {
        Source::Coset(json) => {
            let spec = json.to_spec().map_err(|e| e.to_string())?;
            let validation = spec.validate();
            if let Some(failure) = validation.failure() {
                return Err(failure.to_string());
            }
            let analysis = Analysis::of_coset(&spec, opts).map_err(|e| e.to_string())?;
            (
                AnalysisReport::from_analysis(&analysis, Some(validation)),
                analysis.local_action.clone(),
            )
        }
        Source::Explicit(json) => {
            let graph = json.to_graph().map_err(|e| e.to_string())?;
            let analysis = Analysis::of_explicit(&graph, 0, opts).map_err(|e| e.to_string())?;
            (AnalysisReport::from_analysis(&analysis, None), analysis.local_action.clone())
        }
        Source::Params(json) => {
            let params = json.to_params().map_err(|e| e.to_string())?;
            let out = build_groups(&params).map_err(|e| e.to_string())?;
            let validation = out.spec.validate();
            if let Some(failure) = validation.failure() {
                return Err(failure.to_string());
            }
            let analysis = Analysis::of_coset(&out.spec, opts).map_err(|e| e.to_string())?;
            (
                AnalysisReport::from_analysis(&analysis, Some(validation)),
                analysis.local_action.clone(),
            )
        }
    };
    let checks = entry.expected.run_checks(&report, &local_action, opts.enum_bound);
    let conformance = ConformanceKind::of(&report.conformance);
    let all_ok = checks.iter().all(|c| c.ok) && conformance != ConformanceKind::Fail;
    let undetermined = report.hypothesis.any_undetermined();
    let outcome = if !all_ok {
        "fail"
    } else if undetermined {
        "undetermined"
    } else {
        "pass"
    };
    Ok(EntryResult { name: entry.name, outcome, checks, conformance, report })
}

fn cmd_corpus_run(
    filter: Option<&str>,
    report_path: Option<&Path>,
    opts: AnalysisOptions,
) -> Result<Outcome, CmdError> {
    let mut entries = corpus_build();
    entries.sort_by_key(|e| e.name);
    if let Some(f) = filter {
        entries.retain(|e| e.name.contains(f));
        if entries.is_empty() {
            return Err(CmdError::Input(format!("no corpus entry matches filter {f:?}")));
        }
    }
    let mut results = Vec::new();
    let mut outcome = Outcome::Pass;
    for entry in &entries {
        match run_corpus_entry(entry, opts) {
            Ok(result) => {
                let failed: Vec<&str> = result
                    .checks
                    .iter()
                    .filter(|c| !c.ok)
                    .map(|c| c.name)
                    .collect();
                println!(
                    "{}: {}{}",
                    result.name,
                    result.outcome,
                    if failed.is_empty() {
                        String::new()
                    } else {
                        format!(" (failed: {})", failed.join(", "))
                    }
                );
                outcome = outcome.merge(match result.outcome {
                    "pass" => Outcome::Pass,
                    "undetermined" => Outcome::Undetermined,
                    _ => Outcome::Fail,
                });
                results.push(result);
            }
            Err(message) => {
                println!("{}: fail ({message})", entry.name);
                outcome = outcome.merge(Outcome::Fail);
            }
        }
    }
    if let Some(path) = report_path {
        write_json(path, &results)?;
    }
    Ok(outcome)
}
