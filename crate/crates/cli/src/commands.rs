use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use hmod_core::campaign::{
    run_campaign, CampaignConfig, CampaignOutcome, CampaignTask, FailureRecord, GroupSummary, TagSummary,
};
use hmod_core::error::Error;
use hmod_core::generate::{Dims, FamilyKind, GenConfig};
use hmod_core::inequality::{evaluate, InequalityId, InequalityInstance};
use hmod_core::par::Execution;
use hmod_core::search::{search as run_search, SearchConfig, SearchResult};
use hmod_core::tolerance::ToleranceConfig;
use serde::Serialize;

use crate::args::{CaseArgs, GenArgs, ListArgs, SearchArgs, VerifyArgs};

pub const EXIT_INEQUALITY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_ALARM: u8 = 4;

pub const TOOL_VERSION: &str = concat!("hmod ", env!("CARGO_PKG_VERSION"));

/// Dimension profiles used when `verify` gets no dimensions.
pub const DEFAULT_PROFILES: [(usize, usize, usize); 5] = [(3, 1, 2), (4, 2, 2), (6, 2, 3), (6, 3, 3), (8, 2, 4)];
const DEFAULT_DIMS: (usize, usize, usize) = (6, 2, 3);

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Numerical(_) | Error::NotPositive { .. } => EXIT_NUMERICAL,
            Error::Contract(_) | Error::Precondition(_) | Error::Validation(_) => EXIT_USAGE,
        };
        let message = match e {
            Error::Validation(list) => format!("invalid input:\n  {}", list.join("\n  ")),
            other => other.to_string(),
        };
        Failure { code, message }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    }
}

type CmdResult = Result<ExitCode, Failure>;

/// Writes to stdout; a closed pipe (`hmod list | head`) is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn json_text(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn tolerance(tol: Option<f64>) -> Result<ToleranceConfig, Failure> {
    let t = match tol {
        Some(v) => ToleranceConfig::default().with_psd_rel_tol(v),
        None => ToleranceConfig::default(),
    };
    t.validate()?;
    Ok(t)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    fs::write(path, json_text(value)).map_err(|e| io_failure(path, e))
}

fn execution(g: &GenArgs) -> Execution {
    Execution::with_jobs(g.jobs.map(|j| j as usize))
}

/// Generation template for one tag. Flags a tag cannot use are dropped
/// unless the tag was requested explicitly, in which case validation
/// reports them.
fn template(g: &GenArgs, id: InequalityId, explicit: bool) -> GenConfig {
    let mut cfg = GenConfig::new(0, 1, 1, 1);
    cfg.coeffs = g.coeffs;
    cfg.magnitude = g.magnitude;
    cfg.branch = g.branch;
    cfg.form = g.form;
    let family_ok = g.family.is_some_and(|f| FamilyKind::allowed_for(id).contains(&f));
    cfg.family = if explicit || family_ok { g.family } else { None };
    let probe_ok = matches!(
        id,
        InequalityId::Bessel | InequalityId::Lemma | InequalityId::OrthRanges | InequalityId::CauchySchwarz
    );
    cfg.probe = g.probe && (explicit || probe_ok);
    cfg
}

fn profiles(g: &GenArgs) -> Vec<Dims> {
    if g.m.is_none() && g.d.is_none() && g.n.is_none() {
        DEFAULT_PROFILES.iter().map(|&(m, d, n)| Dims { m, d, n }).collect()
    } else {
        vec![Dims {
            m: g.m.unwrap_or(DEFAULT_DIMS.0),
            d: g.d.unwrap_or(DEFAULT_DIMS.1),
            n: g.n.unwrap_or(DEFAULT_DIMS.2),
        }]
    }
}

#[derive(Serialize)]
struct TaskEcho {
    id: InequalityId,
    #[serde(flatten)]
    gen: GenConfig,
}

#[derive(Serialize)]
struct CampaignEcho {
    seed: u64,
    trials: usize,
    profiles: Vec<Dims>,
    tolerance: ToleranceConfig,
    inequalities: Vec<TaskEcho>,
}

#[derive(Serialize)]
struct Totals {
    trials: usize,
    passes: usize,
    failures: usize,
}

#[derive(Serialize)]
struct CampaignReport<'a> {
    tool_version: &'static str,
    config: CampaignEcho,
    totals: Totals,
    per_inequality: &'a [TagSummary],
    groups: &'a [GroupSummary],
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time: Option<f64>,
    failures: &'a [FailureRecord],
}

fn summary_line(g: &GroupSummary) -> String {
    format!(
        "{:<18} ({},{},{})  trials {:>6}  passes {:>6}  failures {:>4}  min slack {:>11.3e}  near-equality {:>6}",
        g.id.as_str(),
        g.dims.m,
        g.dims.d,
        g.dims.n,
        g.trials,
        g.passes,
        g.failures,
        g.min_relative_slack,
        g.near_equality
    )
}

fn write_csv(path: &Path, outcome: &CampaignOutcome) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_failure(path, e))?;
    for row in &outcome.rows {
        w.serialize(row).map_err(|e| io_failure(path, e))?;
    }
    w.flush().map_err(|e| io_failure(path, e))
}

pub fn verify(a: VerifyArgs) -> CmdResult {
    let g = &a.gen;
    let tol = tolerance(g.tol)?;
    let explicit = !a.ineq.is_empty();
    let mut ids = if explicit {
        a.ineq.clone()
    } else {
        InequalityId::ALL.to_vec()
    };
    ids.dedup();
    let tasks: Vec<CampaignTask> = ids
        .iter()
        .map(|&id| CampaignTask {
            id,
            template: template(g, id, explicit),
        })
        .collect();
    let cfg = CampaignConfig {
        seed: g.seed,
        trials: a.trials as usize,
        profiles: profiles(g),
        tasks,
        tol,
        keep_rows: a.csv.is_some(),
    };
    let start = Instant::now();
    let outcome = run_campaign(&cfg, execution(g))?;
    let elapsed = start.elapsed().as_secs_f64();

    let report = CampaignReport {
        tool_version: TOOL_VERSION,
        config: CampaignEcho {
            seed: cfg.seed,
            trials: cfg.trials,
            profiles: cfg.profiles.clone(),
            tolerance: cfg.tol,
            inequalities: cfg
                .tasks
                .iter()
                .map(|t| TaskEcho {
                    id: t.id,
                    gen: t.template.clone(),
                })
                .collect(),
        },
        totals: Totals {
            trials: outcome.total_trials,
            passes: outcome.total_trials - outcome.total_failures,
            failures: outcome.total_failures,
        },
        per_inequality: &outcome.per_inequality,
        groups: &outcome.groups,
        wall_time: g.timing.then_some(elapsed),
        failures: &outcome.failures,
    };
    if let Some(path) = &g.out {
        write_json(path, &report)?;
    }
    if let Some(path) = &a.csv {
        write_csv(path, &outcome)?;
    }
    if g.json {
        emit(&json_text(&report));
    } else {
        let mut text = String::new();
        for group in &outcome.groups {
            let _ = writeln!(text, "{}", summary_line(group));
        }
        let _ = writeln!(
            text,
            "total: {} trials, {} passes, {} failures",
            report.totals.trials, report.totals.passes, report.totals.failures
        );
        if g.timing {
            let _ = writeln!(text, "wall time: {elapsed:.2} s");
        }
        emit(&text);
    }
    Ok(if outcome.total_failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_INEQUALITY)
    })
}

pub fn case(a: CaseArgs) -> CmdResult {
    let tol = tolerance(a.tol)?;
    let text = fs::read_to_string(&a.file).map_err(|e| io_failure(&a.file, e))?;
    let inst = InequalityInstance::from_json(&text)?;
    let mut report = evaluate(&inst, &tol)?;
    report.tool_version = Some(TOOL_VERSION.to_string());
    if let Some(path) = &a.out {
        write_json(path, &report)?;
    }
    emit(&(report.to_json_pretty() + "\n"));
    Ok(if report.all_hold() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_INEQUALITY)
    })
}

#[derive(Serialize)]
struct SearchReport<'a> {
    tool_version: &'static str,
    config: &'a SearchConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time: Option<f64>,
    #[serde(flatten)]
    result: &'a SearchResult,
}

pub fn search(a: SearchArgs) -> CmdResult {
    let g = &a.gen;
    let tol = tolerance(g.tol)?;
    let mut gen = template(g, a.ineq, true);
    gen.m = g.m.unwrap_or(DEFAULT_DIMS.0);
    gen.d = g.d.unwrap_or(DEFAULT_DIMS.1);
    gen.n = g.n.unwrap_or(DEFAULT_DIMS.2);
    let cfg = SearchConfig {
        ineq: a.ineq,
        gen,
        restarts: a.restarts as usize,
        steps_per_restart: a.steps as usize,
        initial_step: a.initial_step,
        shrink: a.shrink,
        patience: a.patience as usize,
        seed: g.seed,
    };
    let start = Instant::now();
    let result = run_search(&cfg, &tol, execution(g))?;
    let elapsed = start.elapsed().as_secs_f64();
    let report = SearchReport {
        tool_version: TOOL_VERSION,
        config: &cfg,
        wall_time: g.timing.then_some(elapsed),
        result: &result,
    };
    if let Some(path) = &g.out {
        write_json(path, &report)?;
    }
    if g.json {
        emit(&json_text(&report));
    } else {
        emit(&format!(
            "{}  ({},{},{})  restarts {}  steps {}\nbest slack {:.6e} (restart {})\nalarms: {}\n",
            cfg.ineq,
            cfg.gen.m,
            cfg.gen.d,
            cfg.gen.n,
            cfg.restarts,
            cfg.steps_per_restart,
            result.best_slack,
            result.best_restart,
            result.alarms.len()
        ));
    }
    if result.alarm() {
        return Err(Failure {
            code: EXIT_ALARM,
            message: format!(
                "{} iterate(s) violated the inequality beyond tolerance; first at restart {}, step {}",
                result.alarms.len(),
                result.alarms[0].restart,
                result.alarms[0].step
            ),
        });
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ListEntry {
    tag: &'static str,
    citation: &'static str,
    equation: Option<&'static str>,
    statement: &'static str,
    fields: &'static str,
    branches: bool,
}

pub fn list(a: ListArgs) -> CmdResult {
    let entries: Vec<ListEntry> = InequalityId::ALL
        .into_iter()
        .map(|id| {
            let (citation, equation) = id.citation();
            ListEntry {
                tag: id.as_str(),
                citation,
                equation,
                statement: id.statement(),
                fields: id.fields(),
                branches: id.has_branches(),
            }
        })
        .collect();
    if a.json {
        emit(&json_text(&entries));
    } else {
        let mut text = String::new();
        for e in &entries {
            let label = match e.equation {
                Some(eq) => format!("{}, {}", e.citation, eq),
                None => e.citation.to_string(),
            };
            let _ = writeln!(text, "{:<18} {label}", e.tag);
            let _ = writeln!(text, "{:<18} {}", "", e.statement);
            let _ = writeln!(text, "{:<18} fields: {}", "", e.fields);
        }
        emit(&text);
    }
    Ok(ExitCode::SUCCESS)
}
