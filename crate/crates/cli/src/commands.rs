//! Command implementations.

use std::fs;
use std::path::{Path, PathBuf};

use hpvem::adaptivity::{run_with, Strategy};
use hpvem::assembly::{assemble, solve, Discretization};
use hpvem::estimator::report;
use hpvem::mesh::{validate, MeshFile, PolyMesh};
use hpvem::problems::{effectivity, energy_error};

use crate::config::{positional_mesh, RunConfig};
use crate::output::{write_elements, write_history, write_p_study, PStudyRow};
use crate::CliError;

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))
}

fn write_mesh(path: &Path, mesh: &PolyMesh, degrees: Option<&[u32]>) -> Result<(), CliError> {
    MeshFile::from_mesh(mesh, degrees)
        .write(path)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

pub fn p_study(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    cfg.check_p_study()?;
    let problem = cfg.problem()?;
    let mesh = cfg.mesh.build(Some(problem.domain))?;
    create_dir(out)?;
    write_mesh(&out.join("mesh.json"), &mesh, None)?;
    let seminorm = problem.h1_seminorm();
    let mut rows = Vec::new();
    let path = out.join("p_study.csv");
    for p in cfg.p_study.p_min..=cfg.p_study.p_max {
        let step = || -> hpvem::Result<PStudyRow> {
            let disc = Discretization::new(mesh.clone(), &vec![p; mesh.n_elements()])?;
            let sys = assemble(&disc, |x| problem.f(x), |x| problem.g(x))?;
            let u = solve(&sys, &cfg.p_study.solver)?;
            let eta = report(&disc, &u, |x| problem.f(x))?.eta_comp() / seminorm;
            let error = energy_error(&problem, &disc, &u).relative;
            Ok(PStudyRow {
                p,
                n_dofs: disc.n_dofs(),
                error,
                eta_comp: eta,
                effectivity: effectivity(eta, error, 1e-14),
            })
        };
        match step() {
            Ok(row) => {
                log::info!("p = {p}: {} dofs, error {:.3e}, eta {:.3e}", row.n_dofs, row.error, row.eta_comp);
                rows.push(row);
            }
            Err(e) => {
                write_p_study(&path, &rows)?;
                return Err(CliError::from(e).context(&format!("p-study stopped at p = {p}")));
            }
        }
    }
    write_p_study(&path, &rows)
}

pub fn adaptive(cfg: &RunConfig, out: &Path, strategy: Strategy, snapshots: bool) -> Result<(), CliError> {
    cfg.check_adapt()?;
    let problem = cfg.problem()?;
    let mesh = cfg.mesh.build(Some(problem.domain))?;
    create_dir(out)?;
    let snap_dir = out.join("snapshots");
    if snapshots {
        create_dir(&snap_dir)?;
    }
    let mut snap_error = None;
    let result = run_with(&problem, mesh, &cfg.adapt, strategy, |state, data| {
        if !snapshots || snap_error.is_some() {
            return;
        }
        let degrees: Vec<u32> = state.degrees.iter().map(|&p| p as u32).collect();
        let stem = format!("step_{:02}", state.step);
        let written = write_mesh(&snap_dir.join(format!("{stem}.json")), &state.mesh, Some(&degrees)).and_then(|_| {
            write_elements(&snap_dir.join(format!("{stem}_elements.csv")), &data.report.rows(&data.disc))
        });
        snap_error = written.err();
    });
    let path = out.join("history.csv");
    match result {
        Ok(history) => {
            write_history(&path, &history)?;
            snap_error.map_or(Ok(()), Err)
        }
        Err(aborted) => {
            write_history(&path, &aborted.history)?;
            let steps = aborted.history.len();
            Err(CliError::from(aborted.error).context(&format!("adaptive run aborted after {steps} steps")))
        }
    }
}

pub enum MeshSource<'a> {
    Positional(&'a [String], u64),
    Config(&'a RunConfig),
}

pub fn mesh_gen(source: MeshSource<'_>, out: &Path) -> Result<PathBuf, CliError> {
    let mesh = match source {
        MeshSource::Positional(spec, seed) => positional_mesh(spec, seed)?,
        MeshSource::Config(cfg) => {
            let domain = match &cfg.problem {
                Some(_) => Some(cfg.problem()?.domain),
                None => None,
            };
            cfg.mesh.build(domain)?
        }
    };
    create_dir(out)?;
    let path = out.join("mesh.json");
    write_mesh(&path, &mesh, None)?;
    Ok(path)
}

pub fn validate_file(path: &Path) -> Result<String, CliError> {
    let file = MeshFile::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mesh = file.to_mesh().map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if let Some(d) = &file.degrees {
        if d.len() != mesh.n_elements() {
            return Err(CliError::Data(format!(
                "{}: {} degrees for {} elements",
                path.display(),
                d.len(),
                mesh.n_elements()
            )));
        }
    }
    let quality = validate(&mesh).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(format!("vertices: {}\nedges: {}\n{quality}", mesh.n_vertices(), mesh.n_edges()))
}
