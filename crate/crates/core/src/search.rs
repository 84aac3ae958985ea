//! Random-restart perturbation descent on relative slack.
//!
//! Restart `r` draws its starting instance with master seed `mix(seed, r)`
//! and its perturbations from `NormalStream::new(mix(!mix(seed, r), 0))`.
//! A step adds `step · z` to every latent entry, `z` complex normal with
//! per-part standard deviation `1/√2`, and rebuilds the instance, so every
//! iterate satisfies the structural hypotheses of its inequality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::rng::{mix, NormalStream};
use crate::generate::{build_from_latent, gen_instance_with_latent, GenConfig, Latent};
use crate::inequality::{evaluate, EvaluationReport, InequalityId, InequalityInstance};
use crate::par::{map_indexed, Execution};
use crate::tolerance::ToleranceConfig;

/// Trajectories longer than this are downsampled.
pub const MAX_TRAJECTORY_POINTS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub ineq: InequalityId,
    /// Dimensions, family, coefficient kind, branch, ... (`master_seed` is ignored).
    pub gen: GenConfig,
    pub restarts: usize,
    pub steps_per_restart: usize,
    pub initial_step: f64,
    pub shrink: f64,
    pub patience: usize,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(ineq: InequalityId, gen: GenConfig, seed: u64) -> Self {
        Self {
            ineq,
            gen,
            restarts: 32,
            steps_per_restart: 500,
            initial_step: 0.1,
            shrink: 0.7,
            patience: 25,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.restarts == 0 {
            errs.push("restarts must be at least 1".to_string());
        }
        if self.steps_per_restart == 0 {
            errs.push("steps must be at least 1".to_string());
        }
        if self.patience == 0 {
            errs.push("patience must be at least 1".to_string());
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            errs.push(format!("shrink must lie in (0, 1), got {}", self.shrink));
        }
        if !(self.initial_step.is_finite() && self.initial_step > 0.0) {
            errs.push(format!("initial step must be positive, got {}", self.initial_step));
        }
        if let Err(Error::Validation(list)) = self.gen.validate_for(self.ineq) {
            errs.extend(list);
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub seed: u64,
    pub initial_slack: f64,
    pub best_slack: f64,
    pub accepted: usize,
    pub final_step: f64,
}

/// An iterate whose comparison failed beyond tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchAlarm {
    pub restart: usize,
    pub step: usize,
    pub relative_slack: f64,
    pub instance: InequalityInstance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_slack: f64,
    pub best_restart: usize,
    pub best_instance: InequalityInstance,
    pub best_report: EvaluationReport,
    /// `(step, best slack so far)` for the winning restart.
    pub trajectory: Vec<(usize, f64)>,
    pub restarts_summary: Vec<RestartSummary>,
    pub alarms: Vec<SearchAlarm>,
}

impl SearchResult {
    pub fn alarm(&self) -> bool {
        !self.alarms.is_empty()
    }
}

struct RestartRun {
    summary: RestartSummary,
    best_instance: InequalityInstance,
    best_report: EvaluationReport,
    trajectory: Vec<(usize, f64)>,
    alarms: Vec<SearchAlarm>,
}

fn perturb(latent: &Latent, step: f64, rng: &mut NormalStream) -> Latent {
    let std = std::f64::consts::FRAC_1_SQRT_2;
    Latent {
        slots: latent
            .slots
            .iter()
            .map(|slot| slot.iter().map(|z| z + rng.complex(std) * step).collect())
            .collect(),
    }
}

fn run_restart(cfg: &SearchConfig, tol: &ToleranceConfig, restart: usize) -> Result<RestartRun> {
    let seed = mix(cfg.seed, restart as u64);
    let gen = cfg.gen.with_seed(seed);
    let (mut best_instance, mut latent) = gen_instance_with_latent(&gen, cfg.ineq)?;
    let mut best_report = evaluate(&best_instance, tol)?;
    let mut alarms = Vec::new();
    if !best_report.all_hold() {
        alarms.push(SearchAlarm {
            restart,
            step: 0,
            relative_slack: best_report.relative_slack,
            instance: best_instance.clone(),
        });
    }
    let initial_slack = best_report.relative_slack;
    let mut rng = NormalStream::new(mix(!seed, 0));
    let mut step = cfg.initial_step;
    let mut rejections = 0;
    let mut accepted = 0;
    let mut trajectory = Vec::with_capacity(cfg.steps_per_restart + 1);
    trajectory.push((0, initial_slack));
    for s in 1..=cfg.steps_per_restart {
        let candidate = perturb(&latent, step, &mut rng);
        let inst = build_from_latent(&gen, cfg.ineq, &candidate)?;
        let report = evaluate(&inst, tol)?;
        if !report.all_hold() {
            alarms.push(SearchAlarm {
                restart,
                step: s,
                relative_slack: report.relative_slack,
                instance: inst.clone(),
            });
        }
        if report.relative_slack < best_report.relative_slack {
            latent = candidate;
            best_instance = inst;
            best_report = report;
            accepted += 1;
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= cfg.patience {
                step *= cfg.shrink;
                rejections = 0;
            }
        }
        trajectory.push((s, best_report.relative_slack));
    }
    Ok(RestartRun {
        summary: RestartSummary {
            restart,
            seed,
            initial_slack,
            best_slack: best_report.relative_slack,
            accepted,
            final_step: step,
        },
        best_instance,
        best_report,
        trajectory,
        alarms,
    })
}

/// Evenly spaced subsample that keeps the first and last points.
fn downsample(points: Vec<(usize, f64)>, max: usize) -> Vec<(usize, f64)> {
    if points.len() <= max {
        return points;
    }
    let last = points.len() - 1;
    let mut idx: Vec<usize> = (0..max).map(|i| i * last / (max - 1)).collect();
    idx.dedup();
    idx.into_iter().map(|i| points[i]).collect()
}

/// Runs all restarts; the merged result does not depend on `exec`.
pub fn search(cfg: &SearchConfig, tol: &ToleranceConfig, exec: Execution) -> Result<SearchResult> {
    cfg.validate()?;
    tol.validate()?;
    let runs = map_indexed(cfg.restarts, exec, |r| run_restart(cfg, tol, r))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    // best slack, ties to the lowest restart index
    let winner = runs.iter().enumerate().fold(0, |best, (i, r)| {
        if r.summary.best_slack < runs[best].summary.best_slack {
            i
        } else {
            best
        }
    });
    let restarts_summary = runs.iter().map(|r| r.summary.clone()).collect();
    let alarms = runs.iter().flat_map(|r| r.alarms.iter().cloned()).collect();
    let win = runs.into_iter().nth(winner).expect("at least one restart");
    Ok(SearchResult {
        best_slack: win.summary.best_slack,
        best_restart: winner,
        best_instance: win.best_instance,
        best_report: win.best_report,
        trajectory: downsample(win.trajectory, MAX_TRAJECTORY_POINTS),
        restarts_summary,
        alarms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(ineq: InequalityId, gen: GenConfig, seed: u64) -> SearchConfig {
        SearchConfig {
            restarts: 4,
            steps_per_restart: 60,
            ..SearchConfig::new(ineq, gen, seed)
        }
    }

    #[test]
    fn deterministic_and_mode_independent() {
        let cfg = quick(InequalityId::Mpf, GenConfig::new(0, 6, 2, 3), 1);
        let tol = ToleranceConfig::default();
        let a = search(&cfg, &tol, Execution::Sequential).unwrap();
        let b = search(&cfg, &tol, Execution::Parallel { jobs: Some(3) }).unwrap();
        assert_eq!(a, b);
        assert!(!a.alarm());
        assert_eq!(
            a.best_slack,
            a.restarts_summary
                .iter()
                .map(|r| r.best_slack)
                .fold(f64::INFINITY, f64::min)
        );
    }

    #[test]
    fn improves_on_the_start_and_is_monotone() {
        let cfg = quick(InequalityId::Bombieri, GenConfig::new(0, 4, 1, 2), 9);
        let res = search(&cfg, &ToleranceConfig::default(), Execution::Sequential).unwrap();
        let start = res.restarts_summary[res.best_restart].initial_slack;
        assert!(res.best_slack < start);
        assert!(res.trajectory.windows(2).all(|w| w[1].1 <= w[0].1 && w[1].0 > w[0].0));
        assert_eq!(res.trajectory.last().unwrap().1, res.best_slack);
        assert!(res.best_instance.validate().is_ok());
    }

    #[test]
    fn downsampling_keeps_endpoints() {
        let pts: Vec<(usize, f64)> = (0..501).map(|i| (i, -(i as f64))).collect();
        let d = downsample(pts, MAX_TRAJECTORY_POINTS);
        assert_eq!(d.len(), MAX_TRAJECTORY_POINTS);
        assert_eq!(d[0], (0, 0.0));
        assert_eq!(*d.last().unwrap(), (500, -500.0));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = quick(InequalityId::Mpf, GenConfig::new(0, 6, 2, 3), 1);
        cfg.shrink = 1.0;
        cfg.restarts = 0;
        let Err(Error::Validation(list)) = search(&cfg, &ToleranceConfig::default(), Execution::Sequential) else {
            panic!("expected validation error")
        };
        assert_eq!(list.len(), 2);
    }
}
