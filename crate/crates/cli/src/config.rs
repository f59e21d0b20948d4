//! JSON run configuration.
//!
//! ```json
//! {
//!   "problem": "u3",
//!   "mesh": { "kind": "cartesian", "n": 4 },
//!   "p_study": { "p_min": 2, "p_max": 8 },
//!   "adapt": { "max_steps": 10, "sigma": 0.75 }
//! }
//! ```
//!
//! `mesh.kind` is one of `cartesian` (`n` cells per unit length),
//! `voronoi` (`n_seeds`, `lloyd_iters`, `rng_seed`) or `file` (`path`).
//! Generated meshes cover the domain of the problem unless `domain` is
//! given. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use hpvem::adaptivity::AdaptConfig;
use hpvem::assembly::SolveOptions;
use hpvem::mesh::{build_cartesian, build_voronoi, MeshFile, PolyMesh, Rect, VoronoiDomain};
use hpvem::problems::{make_problem, Domain, ManufacturedProblem};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    Cartesian {
        n: usize,
        #[serde(default)]
        domain: Option<Domain>,
    },
    Voronoi {
        n_seeds: usize,
        #[serde(default = "default_lloyd")]
        lloyd_iters: usize,
        #[serde(default)]
        rng_seed: u64,
        #[serde(default)]
        domain: Option<Domain>,
    },
    File {
        path: PathBuf,
    },
}

fn default_lloyd() -> usize {
    20
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PStudyConfig {
    pub p_min: usize,
    pub p_max: usize,
    pub solver: SolveOptions,
}

impl Default for PStudyConfig {
    fn default() -> Self {
        Self { p_min: 2, p_max: 6, solver: SolveOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub problem: Option<String>,
    pub mesh: MeshSpec,
    #[serde(default)]
    pub p_study: PStudyConfig,
    #[serde(default)]
    pub adapt: AdaptConfig,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub snapshots: bool,
}

impl RunConfig {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: Self =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // relative mesh paths resolve against the config file
        if let MeshSpec::File { path: p } = &mut cfg.mesh {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn problem(&self) -> Result<ManufacturedProblem, CliError> {
        let name =
            self.problem.as_deref().ok_or_else(|| CliError::Config("problem: required for this command".into()))?;
        make_problem(name).map_err(|e| CliError::Config(format!("problem: {e}")))
    }

    pub fn check_p_study(&self) -> Result<(), CliError> {
        let p = &self.p_study;
        if p.p_min < 2 {
            return Err(CliError::Config("p_study.p_min: the estimator needs degree at least 2".into()));
        }
        if p.p_max < p.p_min {
            return Err(CliError::Config("p_study.p_max: must be at least p_min".into()));
        }
        Ok(())
    }

    pub fn check_adapt(&self) -> Result<(), CliError> {
        self.adapt.validate().map_err(|e| CliError::Config(format!("adapt: {e}")))
    }

    /// Overrides the Voronoi seed; other mesh kinds have none.
    pub fn apply_seed(&mut self, seed: Option<u64>) {
        let Some(s) = seed else { return };
        match &mut self.mesh {
            MeshSpec::Voronoi { rng_seed, .. } => *rng_seed = s,
            _ => log::warn!("--seed only affects Voronoi meshes; ignored"),
        }
    }
}

fn voronoi_domain(d: Domain) -> VoronoiDomain {
    match d {
        Domain::UnitSquare => VoronoiDomain::Rect(Rect::unit()),
        Domain::LShape => VoronoiDomain::LShape,
    }
}

impl MeshSpec {
    fn domain(&self) -> Option<Domain> {
        match self {
            Self::Cartesian { domain, .. } | Self::Voronoi { domain, .. } => *domain,
            Self::File { .. } => None,
        }
    }

    /// Builds the mesh on `fallback` unless it names its own domain.
    pub fn build(&self, fallback: Option<Domain>) -> Result<PolyMesh, CliError> {
        if let (Some(own), Some(problem)) = (self.domain(), fallback) {
            if own != problem {
                return Err(CliError::Config(format!(
                    "mesh.domain: {own:?} does not match the problem domain {problem:?}"
                )));
            }
        }
        let domain = self.domain().or(fallback);
        let need = || domain.ok_or_else(|| CliError::Config("mesh.domain: required when no problem is given".into()));
        let bad = |field: &str| CliError::Config(format!("mesh.{field}: must be positive"));
        match self {
            Self::Cartesian { n, .. } => {
                if *n == 0 {
                    return Err(bad("n"));
                }
                need()?.cartesian(*n).map_err(CliError::from)
            }
            Self::Voronoi { n_seeds, lloyd_iters, rng_seed, .. } => {
                if *n_seeds == 0 {
                    return Err(bad("n_seeds"));
                }
                build_voronoi(*n_seeds, *lloyd_iters, *rng_seed, voronoi_domain(need()?)).map_err(CliError::from)
            }
            Self::File { path } => {
                let file = MeshFile::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                if file.degrees.is_some() {
                    log::warn!(
                        "{}: stored degrees are ignored, the run starts from its configured degree",
                        path.display()
                    );
                }
                let mesh = file.to_mesh().map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                if let Some(d) = fallback {
                    let a = mesh.total_area();
                    if (a - d.area()).abs() > 1e-10 * d.area() {
                        return Err(CliError::Data(format!(
                            "{}: mesh area {a} does not match the {d:?} problem domain",
                            path.display()
                        )));
                    }
                }
                Ok(mesh)
            }
        }
    }
}

/// Positional `mesh-gen` forms: `cartesian NX NY`, `lshape N`,
/// `voronoi N [LLOYD]` and `voronoi-lshape N [LLOYD]`.
pub fn positional_mesh(spec: &[String], seed: u64) -> Result<PolyMesh, CliError> {
    let usage = || {
        CliError::Config(format!(
            "mesh-gen: expected `cartesian NX NY`, `lshape N`, `voronoi N [LLOYD]` or `voronoi-lshape N [LLOYD]`, got `{}`",
            spec.join(" ")
        ))
    };
    let num = |i: usize| -> Result<usize, CliError> {
        spec.get(i)
            .ok_or_else(usage)?
            .parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| CliError::Config(format!("mesh-gen: `{}` is not a positive integer", spec[i])))
    };
    let lloyd = || spec.get(2).map_or(Ok(default_lloyd()), |s| s.parse().map_err(|_| usage()));
    let kind = spec.first().map(String::as_str).ok_or_else(usage)?;
    let mesh = match (kind, spec.len()) {
        ("cartesian", 3) => build_cartesian(num(1)?, num(2)?, Rect::unit()),
        ("lshape", 2) => Domain::LShape.cartesian(num(1)?),
        ("voronoi", 2 | 3) => build_voronoi(num(1)?, lloyd()?, seed, VoronoiDomain::Rect(Rect::unit())),
        ("voronoi-lshape", 2 | 3) => build_voronoi(num(1)?, lloyd()?, seed, VoronoiDomain::LShape),
        _ => return Err(usage()),
    };
    mesh.map_err(CliError::from)
}
