//! Executes a [`RunConfig`] and collects a serializable [`RunResult`].

use std::path::Path;
use std::time::Instant;

use log::info;
use serde::Serialize;

use crate::config::{RunConfig, SectorSpec, StateSpec, Task};
use crate::error::{Error, Result};
use crate::group::{validate, GroupCatalogEntry, GroupKind};
use crate::lattice::{Model, OperatorChain};
use crate::linalg::C64;
use crate::link::Basis;
use crate::report::CheckResult;
use crate::spectra::{
    eigensolve, observables, sector_eigensolve, vortex_masses, EigenOptions, Level, Method, ObservableReport,
    SpectrumResult, VortexMass, DEGENERACY_TOL, OBSERVABLES,
};
use crate::verify::{verify_all, VerifyOptions};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
const VORTEX_TOL: f64 = 1e-10;

/// Command-line overrides applied on top of a config.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub basis: Option<Basis>,
    /// Run only tasks of this kind, or its default task if the config has none.
    pub only: Option<String>,
    /// Record wall-clock timings (makes output files run-dependent).
    pub timings: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelSummary {
    pub group: String,
    pub order: Option<usize>,
    pub irreps: Vec<String>,
    pub basis: Basis,
    pub dimension: usize,
    pub vertices: usize,
    pub links: usize,
    pub plaquettes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumOutput {
    pub method: Method,
    pub iterations: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub levels: Vec<Level>,
}

impl From<&SpectrumResult> for SpectrumOutput {
    fn from(r: &SpectrumResult) -> Self {
        Self {
            method: r.method,
            iterations: r.iterations,
            eigenvalues: r.eigenvalues.clone(),
            residuals: r.residuals.clone(),
            levels: r.levels(DEGENERACY_TOL),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TaskOutput {
    Verify {
        passed: bool,
        checks: Vec<CheckResult>,
    },
    Spectrum {
        full: SpectrumOutput,
        #[serde(skip_serializing_if = "Option::is_none")]
        sector: Option<SpectrumOutput>,
    },
    Observables {
        state: StateSpec,
        values: Vec<ObservableReport>,
    },
    VortexMasses {
        irrep: String,
        passed: bool,
        masses: Vec<VortexMass>,
    },
    Failed {
        task: String,
        error: String,
    },
}

impl TaskOutput {
    pub fn passed(&self) -> bool {
        match self {
            TaskOutput::Verify { passed, .. } | TaskOutput::VortexMasses { passed, .. } => *passed,
            TaskOutput::Failed { .. } => false,
            _ => true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub task: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunResult {
    pub version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub model: ModelSummary,
    pub tasks: Vec<TaskOutput>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

impl RunResult {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("results serialize");
        s.push('\n');
        s
    }
}

/// Loads the group and rejects catalogs that fail validation.
pub fn load_group(config: &RunConfig, base: &Path) -> Result<GroupCatalogEntry> {
    let entry = config.group.load(base)?;
    check_group(&entry)?;
    Ok(entry)
}

/// Fails with the first invariant the entry violates.
pub fn check_group(entry: &GroupCatalogEntry) -> Result<()> {
    match validate(entry).first_failure() {
        Some(bad) => Err(Error::InvalidGroup(format!(
            "{} (residual {:.3e}, tolerance {:.1e})",
            bad.name, bad.residual, bad.tolerance
        ))),
        None => Ok(()),
    }
}

fn fmt_complex(z: C64) -> String {
    let clean = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im == 0.0 {
        format!("{re:.4}")
    } else if re == 0.0 {
        format!("{im:.4}i")
    } else {
        format!("{re:.4}{im:+.4}i")
    }
}

/// Human-readable summary of a validated group: order, classes, irreps,
/// character table and the dimension-sum check.
pub fn group_info(entry: &GroupCatalogEntry) -> Result<String> {
    use std::fmt::Write;
    check_group(entry)?;
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "group      {}", entry.name).unwrap();
    match &entry.group {
        GroupKind::Finite(g) => {
            let table = entry.character_table()?;
            writeln!(w, "order      {}", g.order).unwrap();
            writeln!(w, "classes    {} (sizes {:?})", table.num_classes(), table.class_sizes).unwrap();
            writeln!(w, "irreps     {}", entry.irreps.len()).unwrap();
            for r in &entry.irreps {
                writeln!(w, "  {:<8} dim {}", r.label, r.dim).unwrap();
            }
            let sum = entry.dim_sum_squares();
            writeln!(
                w,
                "sum dim^2  {sum} {} |G| = {}",
                if sum == g.order { "==" } else { "!=" },
                g.order
            )
            .unwrap();
            writeln!(w, "characters").unwrap();
            let header: Vec<String> = table
                .class_representatives
                .iter()
                .map(|&e| g.element_labels[e].clone())
                .collect();
            let cells: Vec<Vec<String>> = table.chi.iter().map(|row| row.iter().map(|&z| fmt_complex(z)).collect()).collect();
            let width = header
                .iter()
                .chain(cells.iter().flatten())
                .map(String::len)
                .max()
                .unwrap_or(1)
                .max(4);
            write!(w, "  {:<8}", "").unwrap();
            for h in &header {
                write!(w, " {h:>width$}").unwrap();
            }
            writeln!(w).unwrap();
            for (label, row) in table.irrep_labels.iter().zip(&cells) {
                write!(w, "  {label:<8}").unwrap();
                for c in row {
                    write!(w, " {c:>width$}").unwrap();
                }
                writeln!(w).unwrap();
            }
        }
        GroupKind::Lie(l) => {
            writeln!(w, "algebra    dimension {}", l.algebra_dim()).unwrap();
            writeln!(w, "irreps     {}", entry.irreps.len()).unwrap();
            for r in &entry.irreps {
                write!(w, "  {:<8} dim {}", r.label, r.dim).unwrap();
                if let Some(c) = r.casimir {
                    write!(w, "  casimir {c}").unwrap();
                }
                writeln!(w).unwrap();
            }
            writeln!(w, "link dim   {}", entry.dim_sum_squares()).unwrap();
        }
    }
    Ok(out)
}

fn resolve_sector(model: &Model, sector: &SectorSpec) -> Result<Option<Vec<usize>>> {
    model.catalog().require_finite("sector projection")?;
    match sector {
        SectorSpec::Trivial => Ok(None),
        SectorSpec::Labels(labels) => {
            let n = model.lattice.num_vertices();
            if labels.len() != n {
                return Err(Error::InvalidParameter {
                    name: "sector".into(),
                    reason: format!("{} labels for {n} vertices", labels.len()),
                });
            }
            labels.iter().map(|l| model.catalog().irrep_index(l)).collect::<Result<_>>().map(Some)
        }
    }
}

fn projector(model: &Model, sector: &SectorSpec) -> Result<OperatorChain> {
    let labels = resolve_sector(model, sector)?;
    model.physical_projector(labels.as_deref())
}

/// Runs one task; solver failures become [`TaskOutput::Failed`], input
/// problems are returned as errors.
fn run_task(model: &Model, task: &Task, seed: u64) -> Result<TaskOutput> {
    let eig = EigenOptions {
        seed,
        ..EigenOptions::default()
    };
    let solver = |r: Result<SpectrumResult>| -> Result<std::result::Result<SpectrumResult, String>> {
        match r {
            Ok(s) => Ok(Ok(s)),
            Err(e) if !e.is_config_error() => Ok(Err(e.to_string())),
            Err(e) => Err(e),
        }
    };
    let failed = |error: String| TaskOutput::Failed {
        task: task.kind().to_string(),
        error,
    };
    Ok(match task {
        Task::Verify { probes } => {
            let opts = VerifyOptions {
                seed,
                probes: *probes,
                ..VerifyOptions::default()
            };
            let report = verify_all(model, &opts)?;
            TaskOutput::Verify {
                passed: report.passed(),
                checks: report.checks,
            }
        }
        Task::Spectrum { k, sector } => {
            let h = model.hamiltonian()?;
            let full = match solver(eigensolve(&h, *k, &eig))? {
                Ok(s) => s,
                Err(e) => return Ok(failed(e)),
            };
            let sector = match sector {
                Some(spec) => {
                    let p = projector(model, spec)?;
                    match solver(sector_eigensolve(&h, &p, *k, &eig))? {
                        Ok(s) => Some(SpectrumOutput::from(&s)),
                        Err(e) => return Ok(failed(e)),
                    }
                }
                None => None,
            };
            TaskOutput::Spectrum {
                full: SpectrumOutput::from(&full),
                sector,
            }
        }
        Task::Observables { names, state, sector } => {
            let names: Vec<String> = if names.is_empty() {
                OBSERVABLES.iter().map(|s| s.to_string()).collect()
            } else {
                names.clone()
            };
            let vector = match state {
                StateSpec::Vacuum => model.vacuum()?,
                StateSpec::Ground => {
                    let h = model.hamiltonian()?;
                    let opts = EigenOptions {
                        keep_vectors: true,
                        ..eig.clone()
                    };
                    let r = match sector {
                        Some(spec) => solver(sector_eigensolve(&h, &projector(model, spec)?, 1, &opts))?,
                        None => solver(eigensolve(&h, 1, &opts))?,
                    };
                    match r {
                        Ok(mut s) => s.eigenvectors.take().and_then(|v| v.into_iter().next()).ok_or_else(|| {
                            Error::InvalidModel("the requested sector is empty".into())
                        })?,
                        Err(e) => return Ok(failed(e)),
                    }
                }
            };
            let label = match state {
                StateSpec::Vacuum => "vacuum",
                StateSpec::Ground => "ground",
            };
            TaskOutput::Observables {
                state: *state,
                values: observables(model, &names, &vector, label)?,
            }
        }
        Task::VortexMasses => {
            let grp;
            let target = if model.link_basis == Basis::Group {
                model
            } else {
                grp = Model::new(
                    model.catalog().clone(),
                    model.lattice.clone(),
                    model.params.clone(),
                    Basis::Group,
                )?;
                &grp
            };
            let masses = match vortex_masses(target, &eig) {
                Ok(m) => m,
                Err(e) if !e.is_config_error() => return Ok(failed(e.to_string())),
                Err(e) => return Err(e),
            };
            let passed = masses
                .iter()
                .all(|m| (m.gap - m.predicted).abs() <= VORTEX_TOL && m.spectrum_mismatch <= VORTEX_TOL);
            TaskOutput::VortexMasses {
                irrep: model.catalog().irreps[model.magnetic_irrep].label.clone(),
                passed,
                masses,
            }
        }
    })
}

/// Builds the model and runs the configured tasks. Errors are input
/// problems; task failures are reported inside the result.
pub fn execute(config: &RunConfig, base: &Path, opts: &RunOptions) -> Result<RunResult> {
    let mut config = config.clone();
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    if let Some(basis) = opts.basis {
        config.basis = basis;
    }
    if let Some(kind) = &opts.only {
        let selected: Vec<Task> = config.tasks.iter().filter(|t| t.kind() == kind).cloned().collect();
        config.tasks = if selected.is_empty() {
            vec![Task::default_of(kind).ok_or_else(|| Error::Parse(format!("unknown task `{kind}`")))?]
        } else {
            selected
        };
    }
    config.validate()?;
    let entry = load_group(&config, base)?;
    let model = Model::new(entry, config.lattice.clone(), config.params.clone(), config.basis)?;
    let cat = model.catalog();
    let summary = ModelSummary {
        group: cat.name.clone(),
        order: cat.order(),
        irreps: cat.irreps.iter().map(|r| r.label.clone()).collect(),
        basis: model.link_basis,
        dimension: model.dim(),
        vertices: model.lattice.num_vertices(),
        links: model.links.len(),
        plaquettes: model.plaquettes.len(),
    };
    info!("model {} dimension {}", summary.group, summary.dimension);
    let mut tasks = Vec::new();
    let mut timings = Vec::new();
    for task in &config.tasks {
        let start = Instant::now();
        info!("running {}", task.kind());
        tasks.push(run_task(&model, task, config.seed)?);
        timings.push(Timing {
            task: task.kind().to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    let passed = tasks.iter().all(TaskOutput::passed);
    Ok(RunResult {
        version: VERSION.to_string(),
        seed: config.seed,
        config,
        model: summary,
        tasks,
        passed,
        timings: opts.timings.then_some(timings),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z2_TORUS: &str = r#"
[group]
builtin = "Z2"

[lattice]
lx = 2
ly = 2
boundary_x = "periodic"
boundary_y = "periodic"

[params]
terms = { mass = false, tunneling = false, electric = false }

[[tasks]]
kind = "spectrum"
k = 6
sector = "trivial"

[[tasks]]
kind = "observables"
names = ["magnetic", "singlet_fraction"]
state = "vacuum"
"#;

    #[test]
    fn torus_spectrum_and_vacuum_observables() {
        let cfg = RunConfig::from_toml(Z2_TORUS).unwrap();
        let r = execute(&cfg, Path::new("."), &RunOptions::default()).unwrap();
        assert!(r.passed);
        let TaskOutput::Spectrum { full, sector } = &r.tasks[0] else { panic!() };
        assert_eq!(full.levels[0].multiplicity, 6);
        assert_eq!(sector.as_ref().unwrap().levels[0].multiplicity, 4);
        let TaskOutput::Observables { values, .. } = &r.tasks[1] else { panic!() };
        assert_eq!(values[1].value, [1.0, 0.0]);
        assert!(values[0].value[0].abs() < 1e-12);
    }

    #[test]
    fn group_info_tables() {
        let d3 = group_info(&crate::group::parse_group_ref("D3").unwrap()).unwrap();
        assert!(d3.contains("order      6") && d3.contains("classes    3"), "{d3}");
        assert!(d3.contains("sum dim^2  6 == |G| = 6"));
        let z4 = group_info(&crate::group::parse_group_ref("Z4").unwrap()).unwrap();
        assert!(z4.contains("classes    4") && z4.contains("irreps     4"), "{z4}");
        let su2 = group_info(&crate::group::parse_group_ref("SU2_trunc:J_max=1").unwrap()).unwrap();
        assert!(su2.contains("link dim   14"), "{su2}");
    }

    #[test]
    fn only_selects_or_defaults() {
        let cfg = RunConfig::from_toml(Z2_TORUS).unwrap();
        let opts = RunOptions {
            only: Some("vortex-masses".into()),
            ..RunOptions::default()
        };
        let err = execute(&cfg, Path::new("."), &opts).unwrap_err();
        assert!(err.is_config_error(), "{err}");
    }
}
