//! CSV and snapshot writers.

use std::fs::File;
use std::path::Path;

use hpvem::adaptivity::HistoryRow;
use hpvem::estimator::ElementRow;

use crate::CliError;

pub const HISTORY_HEADER: [&str; 9] =
    ["step", "n_elements", "n_dofs", "p_min", "p_max", "eta_comp", "energy_error", "n_h_refined", "n_p_refined"];
pub const P_STUDY_HEADER: [&str; 5] = ["p", "n_dofs", "error", "eta_comp", "effectivity"];
pub const ELEMENT_HEADER: [&str; 8] = ["element", "h", "p", "eta_e", "edge_share", "zeta", "rho", "eta2_comp"];

/// One row of `p_study.csv`; `error` and `eta_comp` are relative to `|u|_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PStudyRow {
    pub p: usize,
    pub n_dofs: usize,
    pub error: f64,
    pub eta_comp: f64,
    pub effectivity: f64,
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("cannot write {}: {e}", path.display()))
}

fn write_csv<const N: usize>(
    path: &Path,
    header: [&str; N],
    rows: impl Iterator<Item = [String; N]>,
) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header).map_err(|e| io_error(path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

pub fn write_history(path: &Path, rows: &[HistoryRow]) -> Result<(), CliError> {
    write_csv(
        path,
        HISTORY_HEADER,
        rows.iter().map(|r| {
            [
                r.step.to_string(),
                r.n_elements.to_string(),
                r.n_dofs.to_string(),
                r.p_min.to_string(),
                r.p_max.to_string(),
                float(r.eta_comp),
                r.energy_error.map(float).unwrap_or_default(),
                r.n_h_refined.to_string(),
                r.n_p_refined.to_string(),
            ]
        }),
    )
}

pub fn write_p_study(path: &Path, rows: &[PStudyRow]) -> Result<(), CliError> {
    write_csv(
        path,
        P_STUDY_HEADER,
        rows.iter()
            .map(|r| [r.p.to_string(), r.n_dofs.to_string(), float(r.error), float(r.eta_comp), float(r.effectivity)]),
    )
}

pub fn write_elements(path: &Path, rows: &[ElementRow]) -> Result<(), CliError> {
    write_csv(
        path,
        ELEMENT_HEADER,
        rows.iter().map(|r| {
            [
                r.element.to_string(),
                float(r.h),
                r.p.to_string(),
                float(r.eta_e),
                float(r.edge_share),
                float(r.zeta),
                float(r.rho),
                float(r.eta2_comp),
            ]
        }),
    )
}
