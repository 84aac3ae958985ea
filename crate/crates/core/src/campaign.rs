//! Seeded verification campaigns and slack histograms.
//!
//! Trial `t` of tag `id` at profile `(m, d, n)` uses the master seed
//! `mix(mix(mix(seed, (m << 32) | (d << 16) | n), id.index()), t)`, so every
//! instance is independent of scheduling and of which other tags run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::rng::mix;
use crate::generate::{gen_instance, Dims, GenConfig};
use crate::inequality::{evaluate, InequalityId, InequalityInstance};
use crate::par::{map_indexed, Execution};
use crate::tolerance::ToleranceConfig;

/// Failing instances kept in a report.
pub const MAX_REPORTED_FAILURES: usize = 10;

pub fn profile_key(dims: Dims) -> u64 {
    ((dims.m as u64) << 32) | ((dims.d as u64) << 16) | dims.n as u64
}

pub fn trial_seed(seed: u64, dims: Dims, id: InequalityId, trial: usize) -> u64 {
    mix(mix(mix(seed, profile_key(dims)), id.index() as u64), trial as u64)
}

/// One tag with its generation template (seed and dims are filled per trial).
#[derive(Clone, Debug, PartialEq)]
pub struct CampaignTask {
    pub id: InequalityId,
    pub template: GenConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignConfig {
    pub seed: u64,
    pub trials: usize,
    pub profiles: Vec<Dims>,
    pub tasks: Vec<CampaignTask>,
    pub tol: ToleranceConfig,
    /// Keep one row per trial (for CSV export).
    pub keep_rows: bool,
}

impl CampaignConfig {
    fn config_for(&self, task: &CampaignTask, dims: Dims, trial: usize) -> GenConfig {
        GenConfig {
            master_seed: trial_seed(self.seed, dims, task.id, trial),
            m: dims.m,
            d: dims.d,
            n: dims.n,
            ..task.template.clone()
        }
    }

    /// Every (task, profile) pair must be feasible before anything runs.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.trials == 0 {
            errs.push("trials must be at least 1".to_string());
        }
        if self.profiles.is_empty() || self.tasks.is_empty() {
            errs.push("nothing to run: no profiles or no inequalities".to_string());
        }
        if let Err(e) = self.tol.validate() {
            errs.push(e.to_string());
        }
        for task in &self.tasks {
            for &dims in &self.profiles {
                if let Err(Error::Validation(list)) = self.config_for(task, dims, 0).validate_for(task.id) {
                    errs.extend(
                        list.into_iter()
                            .map(|e| format!("({},{},{}): {e}", dims.m, dims.d, dims.n)),
                    );
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}

/// Flat per-trial record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub id: InequalityId,
    pub seed: u64,
    pub m: usize,
    pub d: usize,
    pub n: usize,
    pub min_eig_gap: f64,
    pub relative_slack: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub id: InequalityId,
    pub dims: Dims,
    pub family: Option<String>,
    pub trials: usize,
    pub passes: usize,
    pub failures: usize,
    pub min_relative_slack: f64,
    pub near_equality: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TagSummary {
    pub id: InequalityId,
    pub trials: usize,
    pub passes: usize,
    pub failures: usize,
    pub min_relative_slack: f64,
    pub near_equality: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub id: InequalityId,
    pub dims: Dims,
    pub trial: usize,
    pub seed: u64,
    pub min_eig_gap: f64,
    pub relative_slack: f64,
    pub instance: InequalityInstance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignOutcome {
    pub groups: Vec<GroupSummary>,
    pub per_inequality: Vec<TagSummary>,
    pub total_trials: usize,
    pub total_failures: usize,
    pub failures: Vec<FailureRecord>,
    pub rows: Vec<TrialRow>,
}

struct Trial {
    row: TrialRow,
    near_equality: bool,
}

fn run_trial(cfg: &CampaignConfig, task: &CampaignTask, dims: Dims, trial: usize) -> Result<Trial> {
    let gen = cfg.config_for(task, dims, trial);
    let inst = gen_instance(&gen, task.id)?;
    let report = evaluate(&inst, &cfg.tol).map_err(|e| {
        let context = format!(
            "{} at ({},{},{}), trial {trial}, seed {}: ",
            task.id, dims.m, dims.d, dims.n, gen.master_seed
        );
        match e {
            Error::Numerical(s) => Error::Numerical(context + &s),
            Error::Precondition(s) => Error::Precondition(context + &s),
            other => other,
        }
    })?;
    Ok(Trial {
        row: TrialRow {
            id: task.id,
            seed: gen.master_seed,
            m: dims.m,
            d: dims.d,
            n: dims.n,
            min_eig_gap: report.min_eig_gap,
            relative_slack: report.relative_slack,
            holds: report.all_hold(),
        },
        near_equality: report.near_equality,
    })
}

/// Runs every trial; the result is identical for any execution mode.
pub fn run_campaign(cfg: &CampaignConfig, exec: Execution) -> Result<CampaignOutcome> {
    cfg.validate()?;
    let groups: Vec<(&CampaignTask, Dims)> = cfg
        .tasks
        .iter()
        .flat_map(|t| cfg.profiles.iter().map(move |&p| (t, p)))
        .collect();
    let total = groups.len() * cfg.trials;
    let trials = map_indexed(total, exec, |k| {
        let (task, dims) = groups[k / cfg.trials];
        run_trial(cfg, task, dims, k % cfg.trials)
    });
    let trials = trials.into_iter().collect::<Result<Vec<_>>>()?;

    let mut summaries = Vec::with_capacity(groups.len());
    let mut failures = Vec::new();
    let mut total_failures = 0;
    for (g, &(task, dims)) in groups.iter().enumerate() {
        let chunk = &trials[g * cfg.trials..(g + 1) * cfg.trials];
        let fails = chunk.iter().filter(|t| !t.row.holds).count();
        total_failures += fails;
        for (trial, t) in chunk.iter().enumerate().filter(|(_, t)| !t.row.holds) {
            if failures.len() < MAX_REPORTED_FAILURES {
                failures.push(FailureRecord {
                    id: task.id,
                    dims,
                    trial,
                    seed: t.row.seed,
                    min_eig_gap: t.row.min_eig_gap,
                    relative_slack: t.row.relative_slack,
                    instance: gen_instance(&cfg.config_for(task, dims, trial), task.id)?,
                });
            }
        }
        summaries.push(GroupSummary {
            id: task.id,
            dims,
            family: cfg.config_for(task, dims, 0).family_for(task.id).map(|f| f.to_string()),
            trials: cfg.trials,
            passes: cfg.trials - fails,
            failures: fails,
            min_relative_slack: chunk.iter().map(|t| t.row.relative_slack).fold(f64::INFINITY, f64::min),
            near_equality: chunk.iter().filter(|t| t.near_equality).count(),
        });
    }
    let per_inequality = cfg
        .tasks
        .iter()
        .map(|task| {
            let mine: Vec<&GroupSummary> = summaries.iter().filter(|s| s.id == task.id).collect();
            TagSummary {
                id: task.id,
                trials: mine.iter().map(|s| s.trials).sum(),
                passes: mine.iter().map(|s| s.passes).sum(),
                failures: mine.iter().map(|s| s.failures).sum(),
                min_relative_slack: mine.iter().map(|s| s.min_relative_slack).fold(f64::INFINITY, f64::min),
                near_equality: mine.iter().map(|s| s.near_equality).sum(),
            }
        })
        .collect();
    let rows = if cfg.keep_rows {
        trials.into_iter().map(|t| t.row).collect()
    } else {
        Vec::new()
    };
    Ok(CampaignOutcome {
        groups: summaries,
        per_inequality,
        total_trials: total,
        total_failures,
        failures,
        rows,
    })
}

/// Upper bin edges; the last bin is unbounded.
pub const HISTOGRAM_EDGES: [f64; 8] = [0.0, 1e-6, 1e-4, 1e-2, 1e-1, 1.0, 10.0, f64::INFINITY];

/// Binned relative slack. `counts[k]` covers `[edges[k], edges[k+1])`;
/// slacks below zero are counted in `negative`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackHistogram {
    pub id: InequalityId,
    pub dims: Dims,
    pub trials: usize,
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub negative: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl SlackHistogram {
    pub fn from_slacks(id: InequalityId, dims: Dims, slacks: &[f64]) -> Result<Self> {
        if slacks.is_empty() {
            return Err(Error::invalid("histogram needs at least one trial"));
        }
        let mut counts = vec![0; HISTOGRAM_EDGES.len() - 1];
        let mut negative = 0;
        for &s in slacks {
            if s < 0.0 {
                negative += 1;
            } else {
                let bin = HISTOGRAM_EDGES[1..]
                    .iter()
                    .position(|&edge| s < edge)
                    .unwrap_or(counts.len() - 1);
                counts[bin] += 1;
            }
        }
        let mut sorted = slacks.to_vec();
        sorted.sort_by(f64::total_cmp);
        let k = sorted.len();
        let median = if k % 2 == 1 {
            sorted[k / 2]
        } else {
            0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
        };
        Ok(Self {
            id,
            dims,
            trials: k,
            edges: HISTOGRAM_EDGES.to_vec(),
            counts,
            negative,
            min: sorted[0],
            median,
            max: sorted[k - 1],
        })
    }
}

/// Evaluates `trials` generated instances (same seeds as a campaign) and bins their slack.
pub fn slack_histogram(
    id: InequalityId,
    trials: usize,
    template: &GenConfig,
    seed: u64,
    tol: &ToleranceConfig,
    exec: Execution,
) -> Result<SlackHistogram> {
    let cfg = CampaignConfig {
        seed,
        trials,
        profiles: vec![template.dims()],
        tasks: vec![CampaignTask {
            id,
            template: template.clone(),
        }],
        tol: *tol,
        keep_rows: true,
    };
    let outcome = run_campaign(&cfg, exec)?;
    let slacks: Vec<f64> = outcome.rows.iter().map(|r| r.relative_slack).collect();
    SlackHistogram::from_slacks(id, template.dims(), &slacks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::CoeffKind;

    fn all_tasks() -> Vec<CampaignTask> {
        InequalityId::ALL
            .into_iter()
            .map(|id| CampaignTask {
                id,
                template: GenConfig::new(0, 1, 1, 1),
            })
            .collect()
    }

    #[test]
    fn small_campaign_is_deterministic_across_modes() {
        let cfg = CampaignConfig {
            seed: 42,
            trials: 5,
            profiles: vec![Dims { m: 4, d: 2, n: 2 }, Dims { m: 6, d: 3, n: 3 }],
            tasks: all_tasks(),
            tol: ToleranceConfig::default(),
            keep_rows: true,
        };
        let seq = run_campaign(&cfg, Execution::Sequential).unwrap();
        let par = run_campaign(&cfg, Execution::Parallel { jobs: Some(4) }).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.total_failures, 0);
        assert_eq!(seq.rows.len(), 13 * 2 * 5);
        for g in &seq.groups {
            assert_eq!(g.passes + g.failures, g.trials);
        }
    }

    #[test]
    fn trial_seeds_do_not_depend_on_other_tags() {
        let dims = Dims { m: 6, d: 2, n: 3 };
        let a = trial_seed(1, dims, InequalityId::Mpf, 3);
        assert_eq!(a, trial_seed(1, dims, InequalityId::Mpf, 3));
        assert_ne!(a, trial_seed(1, dims, InequalityId::Thm311, 3));
        assert_ne!(a, trial_seed(1, Dims { m: 6, d: 3, n: 2 }, InequalityId::Mpf, 3));
    }

    #[test]
    fn zero_trials_are_rejected() {
        let cfg = CampaignConfig {
            seed: 0,
            trials: 0,
            profiles: vec![Dims { m: 3, d: 1, n: 2 }],
            tasks: all_tasks(),
            tol: ToleranceConfig::default(),
            keep_rows: false,
        };
        assert!(matches!(
            run_campaign(&cfg, Execution::Sequential),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn histogram_bins() {
        let dims = Dims { m: 1, d: 1, n: 1 };
        let h = SlackHistogram::from_slacks(InequalityId::Bessel, dims, &[0.5]).unwrap();
        assert_eq!(h.counts.iter().sum::<usize>(), 1);
        assert_eq!((h.min, h.median, h.max), (0.5, 0.5, 0.5));
        let h = SlackHistogram::from_slacks(InequalityId::Bessel, dims, &[-1e-17, 0.0, 1e-5, 3.0, 50.0, 1e-6]).unwrap();
        assert_eq!(h.negative, 1);
        assert_eq!(h.counts, vec![1, 2, 0, 0, 0, 1, 1]);
        assert_eq!(h.median, 0.5 * (1e-6 + 1e-5));
        assert!(SlackHistogram::from_slacks(InequalityId::Bessel, dims, &[]).is_err());
    }

    #[test]
    fn zero_coefficient_histogram_uses_first_bin() {
        let mut template = GenConfig::new(0, 6, 2, 3);
        template.coeffs = CoeffKind::Zero;
        let h = slack_histogram(
            InequalityId::Mpf,
            50,
            &template,
            3,
            &ToleranceConfig::default(),
            Execution::default(),
        )
        .unwrap();
        assert_eq!(h.counts[0], 50);
        let one = slack_histogram(
            InequalityId::Bombieri,
            1,
            &GenConfig::new(0, 4, 2, 2),
            3,
            &ToleranceConfig::default(),
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(one.trials, 1);
        assert!(one.min == one.median && one.median == one.max);
    }
}
