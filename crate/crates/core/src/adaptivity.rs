//! The hp marking and refinement loop.
//!
//! Each step solves, estimates, marks every element with
//! `eta_comp,K^2 >= sigma * mean`, and then h-refines a marked element when
//! its indicator did not drop below the predicted value, p-refines it
//! otherwise. Predictions follow an exponential-convergence model:
//! `gamma_h / N^E * 0.5^{2p} eta^2` for the children of an h-refined
//! element, `gamma_p eta^2` after p-refinement and `gamma_n pred` for
//! untouched elements.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::assembly::{assemble, solve, Discretization, SolveOptions};
use crate::error::{Error, Result};
use crate::estimator::{report, EstimatorReport};
use crate::mesh::{refine_elements, PolyMesh};
use crate::problems::{energy_error, EnergyError, ManufacturedProblem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptConfig {
    pub sigma: f64,
    /// `None` means `N^E`, the number of children of the refined element.
    pub gamma_h: Option<f64>,
    pub gamma_p: f64,
    pub gamma_n: f64,
    pub p0: usize,
    pub p_min: usize,
    pub p_max: usize,
    pub max_steps: usize,
    pub max_dofs: Option<usize>,
    /// Stop once the relative estimator drops below this value.
    pub target_eta: Option<f64>,
    pub solver: SolveOptions,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        Self {
            sigma: 0.75,
            gamma_h: None,
            gamma_p: 0.4,
            gamma_n: 1.0,
            p0: 2,
            p_min: 2,
            p_max: 12,
            max_steps: 10,
            max_dofs: None,
            target_eta: None,
            solver: SolveOptions::default(),
        }
    }
}

impl AdaptConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: &str| Err(Error::InvalidArgument(format!("{field}: {why}")));
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return bad("sigma", "must lie in (0, 1)");
        }
        if !(self.gamma_p > 0.0 && self.gamma_p < 1.0) {
            return bad("gamma_p", "must lie in (0, 1)");
        }
        if self.gamma_h.is_some_and(|g| !(g > 0.0)) {
            return bad("gamma_h", "must be positive");
        }
        if !(self.gamma_n > 0.0) {
            return bad("gamma_n", "must be positive");
        }
        if self.p_min < 2 {
            return bad("p_min", "the estimator needs degree at least 2");
        }
        if self.p0 < self.p_min || self.p0 > self.p_max {
            return bad("p0", "must lie in [p_min, p_max]");
        }
        if self.max_steps == 0 {
            return bad("max_steps", "must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Hp,
    /// Predictions pinned to zero: every marked element is h-refined.
    HOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptState {
    pub mesh: PolyMesh,
    pub degrees: Vec<usize>,
    /// Predicted `eta^2` per element; `None` before the first estimate.
    pub pred: Option<Vec<f64>>,
    pub step: usize,
}

impl AdaptState {
    pub fn new(mesh: PolyMesh, p0: usize) -> Self {
        let n = mesh.n_elements();
        Self { mesh, degrees: vec![p0; n], pred: None, step: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistoryRow {
    pub step: usize,
    pub n_elements: usize,
    pub n_dofs: usize,
    pub p_min: usize,
    pub p_max: usize,
    /// `eta_comp / |u|_1`.
    pub eta_comp: f64,
    /// `|u - Pi u_n|_1 / |u|_1`.
    pub energy_error: Option<f64>,
    pub n_h_refined: usize,
    pub n_p_refined: usize,
}

/// Marked elements: `eta_comp,K^2 >= sigma * mean`.
pub fn mark(report: &EstimatorReport, sigma: f64) -> Vec<usize> {
    let threshold = sigma * report.eta2_mean;
    (0..report.eta2_comp_elem.len()).filter(|&k| report.eta2_comp_elem[k] >= threshold).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Decisions {
    pub n_h: usize,
    pub n_p: usize,
}

/// Applies the h/p decisions for `marked` and returns the next state.
pub fn decide_and_refine(
    state: &AdaptState,
    marked: &[usize],
    report: &EstimatorReport,
    config: &AdaptConfig,
    strategy: Strategy,
) -> Result<(AdaptState, Decisions)> {
    let ne = state.mesh.n_elements();
    let eta2 = &report.eta2_comp_elem;
    let pred: Vec<f64> = match (strategy, &state.pred) {
        (Strategy::HOnly, _) => vec![0.0; ne],
        (Strategy::Hp, Some(p)) => p.clone(),
        (Strategy::Hp, None) => eta2.iter().map(|v| 0.5 * v).collect(),
    };
    let mut is_marked = vec![false; ne];
    marked.iter().for_each(|&k| is_marked[k] = true);
    let mut h_set = Vec::new();
    let mut p_set = vec![false; ne];
    for &k in marked {
        if eta2[k] >= pred[k] || state.degrees[k] >= config.p_max {
            h_set.push(k);
        } else {
            p_set[k] = true;
        }
    }
    let refined = refine_elements(&state.mesh, &h_set)?;
    let n_new = refined.mesh.n_elements();
    let mut degrees = vec![0; n_new];
    let mut next_pred = vec![0.0; n_new];
    for (k, kids) in refined.children.iter().enumerate() {
        let p = state.degrees[k];
        let (deg, value) = if !is_marked[k] {
            (p, config.gamma_n * pred[k])
        } else if p_set[k] {
            (p + 1, config.gamma_p * eta2[k])
        } else {
            let ne_children = kids.len() as f64;
            let gamma_h = config.gamma_h.unwrap_or(ne_children);
            (p, gamma_h / ne_children * 0.5f64.powi(2 * p as i32) * eta2[k])
        };
        for &c in kids {
            degrees[c] = deg;
            next_pred[c] = if strategy == Strategy::HOnly { 0.0 } else { value };
        }
    }
    let decisions = Decisions { n_h: h_set.len(), n_p: p_set.iter().filter(|b| **b).count() };
    let next = AdaptState { mesh: refined.mesh, degrees, pred: Some(next_pred), step: state.step + 1 };
    Ok((next, decisions))
}

/// Everything computed in one SOLVE-ESTIMATE pass.
pub struct StepData {
    pub disc: Discretization,
    pub u: Vec<f64>,
    pub report: EstimatorReport,
    pub error: EnergyError,
}

pub fn solve_and_estimate(
    problem: &ManufacturedProblem,
    state: &AdaptState,
    solver: &SolveOptions,
) -> Result<StepData> {
    let disc = Discretization::new(state.mesh.clone(), &state.degrees)?;
    let sys = assemble(&disc, |x| problem.f(x), |x| problem.g(x))?;
    let u = solve(&sys, solver)?;
    let report = report(&disc, &u, |x| problem.f(x))?;
    let error = energy_error(problem, &disc, &u);
    Ok(StepData { disc, u, report, error })
}

/// A run stopped by an error, with the rows completed before it.
#[derive(Debug)]
pub struct Aborted {
    pub history: Vec<HistoryRow>,
    pub error: Error,
}

impl fmt::Display for Aborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "adaptive run aborted after {} steps: {}", self.history.len(), self.error)
    }
}

impl std::error::Error for Aborted {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Runs the loop, calling `observe` after every estimate.
pub fn run_with(
    problem: &ManufacturedProblem,
    mesh: PolyMesh,
    config: &AdaptConfig,
    strategy: Strategy,
    mut observe: impl FnMut(&AdaptState, &StepData),
) -> Result<Vec<HistoryRow>, Aborted> {
    let abort = |history: &Vec<HistoryRow>, error| Aborted { history: history.clone(), error };
    let mut history = Vec::new();
    config.validate().map_err(|e| abort(&history, e))?;
    let seminorm = problem.h1_seminorm();
    let mut state = AdaptState::new(mesh, config.p0);
    loop {
        let data = solve_and_estimate(problem, &state, &config.solver).map_err(|e| abort(&history, e))?;
        observe(&state, &data);
        let eta_rel = data.report.eta_comp() / seminorm;
        let mut row = HistoryRow {
            step: state.step,
            n_elements: state.mesh.n_elements(),
            n_dofs: data.disc.n_dofs(),
            p_min: state.degrees.iter().copied().min().unwrap_or(0),
            p_max: state.degrees.iter().copied().max().unwrap_or(0),
            eta_comp: eta_rel,
            energy_error: Some(data.error.relative),
            n_h_refined: 0,
            n_p_refined: 0,
        };
        let last = state.step + 1 >= config.max_steps
            || config.max_dofs.is_some_and(|m| row.n_dofs >= m)
            || config.target_eta.is_some_and(|t| eta_rel <= t);
        if last {
            history.push(row);
            return Ok(history);
        }
        let marked = mark(&data.report, config.sigma);
        let (next, d) =
            decide_and_refine(&state, &marked, &data.report, config, strategy).map_err(|e| abort(&history, e))?;
        row.n_h_refined = d.n_h;
        row.n_p_refined = d.n_p;
        history.push(row);
        log::info!(
            "step {}: {} elements, {} dofs, eta {:.3e}, error {:.3e}, {} h / {} p",
            state.step,
            state.mesh.n_elements(),
            data.disc.n_dofs(),
            eta_rel,
            data.error.relative,
            d.n_h,
            d.n_p
        );
        state = next;
    }
}

pub fn run(problem: &ManufacturedProblem, mesh: PolyMesh, config: &AdaptConfig) -> Result<Vec<HistoryRow>, Aborted> {
    run_with(problem, mesh, config, Strategy::Hp, |_, _| {})
}

pub fn run_h_only(
    problem: &ManufacturedProblem,
    mesh: PolyMesh,
    config: &AdaptConfig,
) -> Result<Vec<HistoryRow>, Aborted> {
    run_with(problem, mesh, config, Strategy::HOnly, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cartesian, Rect};

    fn fake_report(eta2: Vec<f64>) -> EstimatorReport {
        let n = eta2.len();
        let total: f64 = eta2.iter().sum();
        EstimatorReport {
            eta_elem: vec![0.0; n],
            eta_edge: Vec::new(),
            zeta: vec![0.0; n],
            rho: vec![0.0; n],
            edge_share: vec![0.0; n],
            eta2_p: eta2.clone(),
            eta2_comp: total,
            eta2_mean: total / n as f64,
            eta2_comp_elem: eta2,
        }
    }

    #[test]
    fn marking_rule() {
        assert_eq!(mark(&fake_report(vec![2.0; 5]), 0.75), vec![0, 1, 2, 3, 4]);
        assert_eq!(mark(&fake_report(vec![0.0, 0.0, 3.0]), 0.75), vec![2]);
        assert_eq!(mark(&fake_report(vec![4.0, 1.0, 1.0, 1.0, 1.0]), 0.75), vec![0]);
    }

    #[test]
    fn first_step_is_h_and_prediction_values() {
        let mesh = build_cartesian(2, 1, Rect::new(0.0, 2.0, 0.0, 1.0)).unwrap();
        let state = AdaptState::new(mesh, 2);
        let r = fake_report(vec![1.0, 1.0]);
        let cfg = AdaptConfig::default();
        let (next, d) = decide_and_refine(&state, &[0, 1], &r, &cfg, Strategy::Hp).unwrap();
        assert_eq!(d, Decisions { n_h: 2, n_p: 0 });
        assert_eq!(next.mesh.n_elements(), 8);
        // four children of a square at p = 2: 0.25 * 4 * 0.5^4
        assert!(next.pred.as_ref().unwrap().iter().all(|&v| (v - 0.0625).abs() < 1e-15));
    }

    #[test]
    fn p_refinement_prediction() {
        let mesh = build_cartesian(1, 1, Rect::unit()).unwrap();
        let state = AdaptState { pred: Some(vec![2.0]), ..AdaptState::new(mesh, 2) };
        let r = fake_report(vec![1.0]);
        let (next, d) = decide_and_refine(&state, &[0], &r, &AdaptConfig::default(), Strategy::Hp).unwrap();
        assert_eq!(d, Decisions { n_h: 0, n_p: 1 });
        assert_eq!(next.degrees, vec![3]);
        assert!((next.pred.unwrap()[0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn cap_falls_back_to_h_and_no_marks_is_noop() {
        let mesh = build_cartesian(1, 1, Rect::unit()).unwrap();
        let cfg = AdaptConfig { p_max: 3, ..AdaptConfig::default() };
        let state = AdaptState { pred: Some(vec![2.0]), ..AdaptState::new(mesh.clone(), 3) };
        let (next, d) = decide_and_refine(&state, &[0], &fake_report(vec![1.0]), &cfg, Strategy::Hp).unwrap();
        assert_eq!(d.n_h, 1);
        assert_eq!(next.degrees, vec![3; 4]);

        let (next, d) = decide_and_refine(&state, &[], &fake_report(vec![1.0]), &cfg, Strategy::Hp).unwrap();
        assert_eq!(d, Decisions::default());
        assert_eq!(next.mesh, mesh);
        assert_eq!(next.pred, Some(vec![2.0]));
    }

    #[test]
    fn config_validation() {
        assert!(AdaptConfig::default().validate().is_ok());
        assert!(AdaptConfig { sigma: 1.5, ..AdaptConfig::default() }.validate().is_err());
        assert!(AdaptConfig { p0: 1, p_min: 1, ..AdaptConfig::default() }.validate().is_err());
    }
}
