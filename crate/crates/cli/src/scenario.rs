//! Scenario execution: resolve defaults, run the pipeline, verify the
//! scenario's checks, export artifacts.
//!
//! Every check name maps onto one criterion of the acceptance suite in
//! `crates/core/tests/acceptance.rs`; scenario defaults are chosen so a
//! plain run passes each check at the suite's tolerance.

use crate::config::{
    ConfigError, GridConfig, HamiltonianConfig, InitialConfig, PotentialConfig, ScenarioConfig,
    ScenarioKind, TimeConfig, TrajectoriesConfig,
};
use crate::report::RunReport;
use explicate_core::bohm::{integrate_trajectory, trajectory_ensemble};
use explicate_core::clifford::matrix_rep;
use explicate_core::evolution::{
    energy_equation_residual, energy_expectation, evolve, gaussian_packet,
    gaussian_superposition, harmonic_eigenstate, liouville_residual, measured_order,
    EvolutionTrace, EvolveParams,
};
use explicate_core::explicate::{
    continuity_residual_x, explicate_frames, polar_sequence, projected_equations_check,
    qhj_residual_x, ExplicateFrame, PolarField,
    ProjectionBasis, INTERIOR_FRACTION,
};
use explicate_core::export::{write_frames_csv, write_trace_csv, write_trajectories_csv};
use explicate_core::logic::{
    distributivity_counterexample, mixed_state, sequential_filter, Projection, ProjectionLattice,
};
use explicate_core::spinor::{AlgebraicSpinor, ColumnSpinor, Idempotent};
use explicate_core::{Grid, Hamiltonian, Potential};
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("runtime failure: {0}")]
    Runtime(String),
}

fn runtime(e: impl std::fmt::Display) -> RunError {
    RunError::Runtime(e.to_string())
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    pub quiet: bool,
}

struct Resolved {
    kind: ScenarioKind,
    grid: GridConfig,
    hamiltonian: HamiltonianConfig,
    initial: InitialConfig,
    time: TimeConfig,
    trajectories: TrajectoriesConfig,
    output_dir: PathBuf,
}

fn defaults(kind: ScenarioKind) -> Resolved {
    let harmonic = HamiltonianConfig {
        mass: 1.0,
        potential: PotentialConfig::Harmonic { stiffness: 1.0 },
    };
    let free = HamiltonianConfig {
        mass: 1.0,
        potential: PotentialConfig::Free,
    };
    let ground_width = std::f64::consts::FRAC_1_SQRT_2;
    let (grid, hamiltonian, initial, time, count) = match kind {
        ScenarioKind::GroundState => (
            GridConfig {
                points: 1024,
                half_width: 12.0,
                self_dual: false,
            },
            harmonic,
            InitialConfig {
                center: 0.0,
                width: ground_width,
                momentum: 0.0,
            },
            TimeConfig {
                dt: 1e-5,
                dt_out: 1e-4,
                duration: 4e-4,
            },
            0,
        ),
        ScenarioKind::Coherent => (
            GridConfig {
                points: 512,
                half_width: 12.0,
                self_dual: false,
            },
            harmonic,
            InitialConfig {
                center: 1.0,
                width: ground_width,
                momentum: 0.0,
            },
            TimeConfig {
                dt: 5e-4,
                dt_out: 2.5e-3,
                duration: 2.0 * std::f64::consts::PI,
            },
            400,
        ),
        ScenarioKind::FreePacket => (
            GridConfig {
                points: 1024,
                half_width: 24.0,
                self_dual: false,
            },
            free,
            InitialConfig {
                center: 0.0,
                width: 1.0,
                momentum: 0.0,
            },
            TimeConfig {
                dt: 5e-4,
                dt_out: 2.5e-3,
                duration: 2.4,
            },
            0,
        ),
        ScenarioKind::Cubic => (
            GridConfig {
                points: 1024,
                half_width: 12.0,
                self_dual: false,
            },
            HamiltonianConfig {
                mass: 1.0,
                potential: PotentialConfig::Cubic {
                    stiffness: 1.0,
                    cubic: 0.05,
                },
            },
            InitialConfig {
                center: 0.0,
                width: ground_width,
                momentum: 0.0,
            },
            TimeConfig {
                dt: 2.5e-4,
                dt_out: 2.5e-3,
                duration: 0.2,
            },
            0,
        ),
        ScenarioKind::TwoSlitPreset => (
            GridConfig {
                points: 1024,
                half_width: 24.0,
                self_dual: false,
            },
            free,
            InitialConfig {
                center: 4.0, // packets sit at +/- center
                width: 0.7,
                momentum: 0.0,
            },
            TimeConfig {
                dt: 1e-3,
                dt_out: 2e-2,
                duration: 4.0,
            },
            400,
        ),
        // The algebra demos run no grid dynamics; placeholders below.
        _ => (
            GridConfig {
                points: 256,
                half_width: 12.0,
                self_dual: false,
            },
            harmonic,
            InitialConfig {
                center: 0.0,
                width: ground_width,
                momentum: 0.0,
            },
            TimeConfig {
                dt: 1e-3,
                dt_out: 1e-2,
                duration: 1e-2,
            },
            0,
        ),
    };
    Resolved {
        kind,
        grid,
        hamiltonian,
        initial,
        time,
        trajectories: TrajectoriesConfig {
            count,
            points: Vec::new(),
        },
        output_dir: PathBuf::from(format!("out/{}", kind.name())),
    }
}

fn resolve(config: &ScenarioConfig, opts: &RunOptions) -> Resolved {
    let mut r = defaults(config.scenario);
    if let Some(grid) = &config.grid {
        r.grid = grid.clone();
    }
    if let Some(h) = &config.hamiltonian {
        r.hamiltonian = h.clone();
    }
    if let Some(initial) = &config.initial {
        r.initial = initial.clone();
    }
    if let Some(time) = &config.time {
        r.time = time.clone();
    }
    if let Some(tr) = &config.trajectories {
        r.trajectories = tr.clone();
    }
    if let Some(dir) = &config.output_dir {
        r.output_dir = dir.clone();
    }
    if let Some(dir) = &opts.output_dir {
        r.output_dir = dir.clone();
    }
    r
}

impl Resolved {
    fn grid(&self) -> Result<Grid, RunError> {
        if self.grid.self_dual {
            Grid::self_dual(self.grid.points).map_err(runtime)
        } else {
            Grid::symmetric(self.grid.half_width, self.grid.points).map_err(runtime)
        }
    }

    fn hamiltonian(&self) -> Result<Hamiltonian, RunError> {
        let potential = match self.hamiltonian.potential {
            PotentialConfig::Free => Potential::Free,
            PotentialConfig::Harmonic { stiffness } => Potential::Harmonic { stiffness },
            PotentialConfig::Cubic { stiffness, cubic } => Potential::Cubic { stiffness, cubic },
        };
        Hamiltonian::new(self.hamiltonian.mass, potential).map_err(runtime)
    }

    /// Snapshot cadence: the step is adjusted so an integer number of
    /// steps lands exactly on each output time.
    fn evolve_params(&self) -> EvolveParams {
        let steps = (self.time.dt_out / self.time.dt).round().max(1.0) as usize;
        let snapshots = (self.time.duration / self.time.dt_out).round().max(1.0) as usize;
        EvolveParams {
            dt: self.time.dt_out / steps as f64,
            steps_per_snapshot: steps,
            snapshots,
        }
    }
}

/// Runs one scenario end to end and writes `report.json` plus the
/// scenario's data artifacts into the output directory.
pub fn run_scenario(config: &ScenarioConfig, opts: &RunOptions) -> Result<RunReport, RunError> {
    config.validate()?;
    let resolved = resolve(config, opts);
    std::fs::create_dir_all(&resolved.output_dir)
        .map_err(|e| runtime(format!("cannot create output dir: {e}")))?;

    let started = Instant::now();
    let mut report = RunReport::new(config.scenario.name());
    let tol = |name: &str, fallback: f64| *config.tolerances.get(name).unwrap_or(&fallback);

    match resolved.kind {
        ScenarioKind::GroundState => ground_state(&resolved, &mut report, &tol)?,
        ScenarioKind::Coherent => coherent(&resolved, &mut report, &tol)?,
        ScenarioKind::FreePacket => free_packet(&resolved, &mut report, &tol)?,
        ScenarioKind::Cubic => cubic(&resolved, &mut report, &tol)?,
        ScenarioKind::TwoSlitPreset => two_slit(&resolved, &mut report, &tol)?,
        ScenarioKind::LatticeDemo => lattice_demo(&resolved, &mut report, &tol)?,
        ScenarioKind::FilterDemo => filter_demo(&resolved, &mut report, &tol)?,
        ScenarioKind::SpinorDemo => spinor_demo(&resolved, &mut report, &tol)?,
    }

    report.runtime_seconds = started.elapsed().as_secs_f64();
    let report_path = resolved.output_dir.join("report.json");
    report.artifact(&report_path);
    report
        .write_json(&report_path)
        .map_err(|e| runtime(format!("cannot write report: {e}")))?;
    Ok(report)
}

fn export_position_fields(
    dir: &Path,
    frames: &[ExplicateFrame],
    report: &mut RunReport,
) -> Result<(), RunError> {
    let path = dir.join("fields_x.csv");
    write_frames_csv(&path, frames).map_err(runtime)?;
    report.artifact(&path);
    Ok(())
}

fn max_abs_interior(values: &[f64], polar: &PolarField) -> f64 {
    let interior = polar.grid().interior(INTERIOR_FRACTION);
    interior
        .filter(|&j| !polar.node_mask()[j])
        .map(|j| values[j].abs())
        .fold(0.0, f64::max)
}

fn ground_state(
    r: &Resolved,
    report: &mut RunReport,
    tol: &dyn Fn(&str, f64) -> f64,
) -> Result<(), RunError> {
    let grid = r.grid()?;
    let h = r.hamiltonian()?;
    let stiffness = match h.potential {
        Potential::Harmonic { stiffness } => stiffness,
        _ => {
            return Err(RunError::Runtime(
                "ground_state scenario needs a harmonic potential".into(),
            ))
        }
    };
    let psi0 = harmonic_eigenstate(&grid, 0, h.mass, stiffness).map_err(runtime)?;
    let energy = 0.5 * (stiffness / h.mass).sqrt();
    let trace = evolve(&psi0, &h, &r.evolve_params()).map_err(runtime)?;

    report.check("norm-drift", trace.norm_drift(), tol("norm-drift", 1e-9));
    let last = trace.fields().last().expect("nonempty trace");
    let overlap = psi0.inner(last).map_err(runtime)?.norm();
    report.check(
        "stationary-overlap-defect",
        (overlap - 1.0).abs(),
        tol("stationary-overlap-defect", 1e-8),
    );

    let liouville = liouville_residual(&trace, &h).map_err(runtime)?;
    report.check(
        "liouville-residual",
        liouville.max(),
        tol("liouville-residual", 1e-8),
    );
    let energy_eq = energy_equation_residual(&trace, &h).map_err(runtime)?;
    report.check(
        "energy-equation-residual",
        energy_eq.max(),
        tol("energy-equation-residual", 1e-8),
    );

    let frames = explicate_frames(&trace, &h).map_err(runtime)?;
    let polar0 = &frames[0].polar;
    let qv_defect: Vec<f64> = frames[0]
        .quantum_potential
        .iter()
        .enumerate()
        .map(|(j, q)| {
            if polar0.node_mask()[j] {
                0.0
            } else {
                q + h.potential.value(grid.point(j)) - energy
            }
        })
        .collect();
    report.check(
        "quantum-potential-constant",
        max_abs_interior(&qv_defect, polar0),
        tol("quantum-potential-constant", 1e-6),
    );

    let cont = continuity_residual_x(&frames, h.mass).map_err(runtime)?;
    report.check(
        "continuity-residual",
        cont.series.max(),
        tol("continuity-residual", 1e-8),
    );
    let qhj = qhj_residual_x(&frames, &h).map_err(runtime)?;
    report.check("qhj-residual", qhj.series.max(), tol("qhj-residual", 1e-6));
    if qhj.node_dominated {
        report.warn(format!(
            "node/amplitude mask covers {:.0}% of the interior window",
            qhj.masked_fraction * 100.0
        ));
    }

    // Momentum-representation mirror of the quantum-potential balance.
    let momentum_trace = trace.to_momentum().map_err(runtime)?;
    let momentum_frames = explicate_frames(&momentum_trace, &h).map_err(runtime)?;
    let polar_p = &momentum_frames[0].polar;
    let qv_p: Vec<f64> = momentum_frames[0]
        .quantum_potential
        .iter()
        .enumerate()
        .map(|(j, q)| {
            if polar_p.node_mask()[j] {
                0.0
            } else {
                let p = polar_p.grid().point(j);
                q + p * p / (2.0 * h.mass) - energy
            }
        })
        .collect();
    report.check(
        "momentum-quantum-potential-constant",
        max_abs_interior(&qv_p, polar_p),
        tol("momentum-quantum-potential-constant", 1e-6),
    );

    let trace_path = r.output_dir.join("trace.csv");
    write_trace_csv(&trace_path, &trace).map_err(runtime)?;
    report.artifact(&trace_path);
    export_position_fields(&r.output_dir, &frames, report)?;
    let fields_p = r.output_dir.join("fields_p.csv");
    write_frames_csv(&fields_p, &momentum_frames).map_err(runtime)?;
    report.artifact(&fields_p);
    Ok(())
}

fn coherent(
    r: &Resolved,
    report: &mut RunReport,
    tol: &dyn Fn(&str, f64) -> f64,
) -> Result<(), RunError> {
    let grid = r.grid()?;
    let h = r.hamiltonian()?;
    let psi0 =
        gaussian_packet(&grid, r.initial.center, r.initial.width, r.initial.momentum)
            .map_err(runtime)?;
    let trace = evolve(&psi0, &h, &r.evolve_params()).map_err(runtime)?;
    report.check("norm-drift", trace.norm_drift(), tol("norm-drift", 1e-9));

    // Classical orbit of the packet center (harmonic case).
    if let Some(omega) = h.omega() {
        let orbit_defect = trace
            .fields()
            .iter()
            .map(|f| {
                let t = f.time();
                let expect = r.initial.center * (omega * t).cos()
                    + r.initial.momentum / (h.mass * omega) * (omega * t).sin();
                (f.coordinate_mean() - expect).abs()
            })
            .fold(0.0, f64::max);
        report.check("orbit-defect", orbit_defect, tol("orbit-defect", 2e-3));
    }

    // Residuals at dt_out = 1e-2 via striding, plus the convergence order.
    // Coarse series targets dt_out = 1e-2; keep one halving in hand so
    // the convergence order is always measurable.
    let stride = ((1e-2 / trace.dt_out()).round() as usize).max(2);
    let coarse = trace.strided(stride).map_err(runtime)?;
    let fine = trace.strided(stride / 2).map_err(runtime)?;
    let liouville_coarse = liouville_residual(&coarse, &h).map_err(runtime)?;
    let liouville_fine = liouville_residual(&fine, &h).map_err(runtime)?;
    report.check(
        "liouville-residual",
        liouville_coarse.max(),
        tol("liouville-residual", 1e-3),
    );
    report.check(
        "liouville-order-defect",
        (measured_order(&liouville_coarse, &liouville_fine, 2.0) - 2.0).abs(),
        tol("liouville-order-defect", 0.2),
    );
    let energy_coarse = energy_equation_residual(&coarse, &h).map_err(runtime)?;
    let energy_fine = energy_equation_residual(&fine, &h).map_err(runtime)?;
    report.check(
        "energy-equation-residual",
        energy_coarse.max(),
        tol("energy-equation-residual", 1e-3),
    );
    report.check(
        "energy-order-defect",
        (measured_order(&energy_coarse, &energy_fine, 2.0) - 2.0).abs(),
        tol("energy-order-defect", 0.2),
    );

    let frames = explicate_frames(&coarse, &h).map_err(runtime)?;
    let cont = continuity_residual_x(&frames, h.mass).map_err(runtime)?;
    report.check(
        "continuity-residual",
        cont.series.max(),
        tol("continuity-residual", 1e-3),
    );
    let qhj = qhj_residual_x(&frames, &h).map_err(runtime)?;
    report.check("qhj-residual", qhj.series.max(), tol("qhj-residual", 1e-3));

    // Projection closure on a short window (identical numbers on any).
    let closure_window = coarse.strided(1).map_err(runtime)?;
    let check_x = projected_equations_check(&closure_window, &h, ProjectionBasis::PositionCells)
        .map_err(runtime)?;
    report.check(
        "projection-closure-commutator",
        check_x.max_commutator_gap,
        tol("projection-closure-commutator", 1e-10),
    );
    report.check(
        "projection-closure-anticommutator",
        check_x.max_anticommutator_gap,
        tol("projection-closure-anticommutator", 1e-10),
    );
    let check_p = projected_equations_check(&closure_window, &h, ProjectionBasis::MomentumCells)
        .map_err(runtime)?;
    report.check(
        "projection-closure-momentum-anticommutator",
        check_p.max_anticommutator_gap,
        tol("projection-closure-momentum-anticommutator", 1e-10),
    );

    // Rigid translation of individual trajectories over the full run.
    if let Some(omega) = h.omega() {
        let starts = if r.trajectories.points.is_empty() {
            vec![
                r.initial.center - 1.0,
                r.initial.center,
                r.initial.center + 1.0,
            ]
        } else {
            r.trajectories.points.clone()
        };
        let mut rigidity = 0.0_f64;
        let mut exported = Vec::new();
        for x0 in starts {
            let tr = integrate_trajectory(&coarse, x0, h.mass).map_err(runtime)?;
            for (t, x) in tr.times.iter().zip(&tr.positions) {
                let center_shift = r.initial.center * ((omega * t).cos() - 1.0)
                    + r.initial.momentum / (h.mass * omega) * (omega * t).sin();
                rigidity = rigidity.max((x - x0 - center_shift).abs());
            }
            exported.push(tr);
        }
        report.check(
            "trajectory-rigidity",
            rigidity,
            tol("trajectory-rigidity", 1e-3),
        );
        let path = r.output_dir.join("trajectories.csv");
        write_trajectories_csv(&path, &exported).map_err(runtime)?;
        report.artifact(&path);
    }

    if r.trajectories.count >= 100 {
        let (_, ensemble) =
            trajectory_ensemble(&coarse, h.mass, r.trajectories.count).map_err(runtime)?;
        report.check_flag("ensemble-non-crossing", ensemble.non_crossing);
        report.check(
            "ensemble-ks-distance",
            ensemble.max_ks_distance,
            tol("ensemble-ks-distance", 0.05),
        );
        let path = r.output_dir.join("ensemble.json");
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&ensemble).expect("report serializes"),
        )
        .map_err(runtime)?;
        report.artifact(&path);
    }

    let trace_path = r.output_dir.join("trace.csv");
    write_trace_csv(&trace_path, &coarse).map_err(runtime)?;
    report.artifact(&trace_path);
    export_position_fields(&r.output_dir, &frames, report)?;
    Ok(())
}

fn free_packet(
    r: &Resolved,
    report: &mut RunReport,
    tol: &dyn Fn(&str, f64) -> f64,
) -> Result<(), RunError> {
    let grid = r.grid()?;
    let h = r.hamiltonian()?;
    let psi0 =
        gaussian_packet(&grid, r.initial.center, r.initial.width, r.initial.momentum)
            .map_err(runtime)?;
    let trace = evolve(&psi0, &h, &r.evolve_params()).map_err(runtime)?;
    report.check("norm-drift", trace.norm_drift(), tol("norm-drift", 1e-9));

    let s = r.initial.width;
    let spreading_defect = trace
        .fields()
        .iter()
        .map(|f| {
            let t = f.time();
            let expect = s * (1.0 + (t / (2.0 * h.mass * s * s)).powi(2)).sqrt();
            (f.coordinate_std() - expect).abs()
        })
        .fold(0.0, f64::max);
    report.check(
        "spreading-law-defect",
        spreading_defect,
        tol("spreading-law-defect", 1e-3),
    );

    // Coarse series targets dt_out = 1e-2; keep one halving in hand so
    // the convergence order is always measurable.
    let stride = ((1e-2 / trace.dt_out()).round() as usize).max(2);
    let coarse = trace.strided(stride).map_err(runtime)?;
    let fine = trace.strided(stride / 2).map_err(runtime)?;
    let frames_coarse = explicate_frames(&coarse, &h).map_err(runtime)?;
    let frames_fine = explicate_frames(&fine, &h).map_err(runtime)?;
    let cont_coarse = continuity_residual_x(&frames_coarse, h.mass).map_err(runtime)?;
    let cont_fine = continuity_residual_x(&frames_fine, h.mass).map_err(runtime)?;
    report.check(
        "continuity-residual",
        cont_coarse.series.max(),
        tol("continuity-residual", 1e-3),
    );
    report.check(
        "continuity-order-defect",
        (measured_order(&cont_coarse.series, &cont_fine.series, 2.0) - 2.0).abs(),
        tol("continuity-order-defect", 0.3),
    );

    // Center trajectory stays put by symmetry.
    let tr = integrate_trajectory(&coarse, r.initial.center, h.mass).map_err(runtime)?;
    let center_defect = tr
        .positions
        .iter()
        .map(|x| (x - r.initial.center).abs())
        .fold(0.0, f64::max);
    report.check(
        "center-trajectory-defect",
        center_defect,
        tol("center-trajectory-defect", 1e-6),
    );
    let path = r.output_dir.join("trajectories.csv");
    write_trajectories_csv(&path, &[tr]).map_err(runtime)?;
    report.artifact(&path);

    let trace_path = r.output_dir.join("trace.csv");
    write_trace_csv(&trace_path, &coarse).map_err(runtime)?;
    report.artifact(&trace_path);
    export_position_fields(&r.output_dir, &frames_coarse, report)?;
    Ok(())
}

/// Momentum-representation frames without a quantum potential, for
/// potentials where none is defined (the cubic case exports `R_p`, `S_p`,
/// and `x_B` only; the `Q` column is zero by construction).
fn momentum_frames_without_q(
    trace: &EvolutionTrace,
) -> Result<Vec<ExplicateFrame>, RunError> {
    let momentum_trace = trace.to_momentum().map_err(runtime)?;
    let polar_fields = polar_sequence(&momentum_trace).map_err(runtime)?;
    let mut frames = Vec::with_capacity(polar_fields.len());
    for polar in polar_fields {
        let density: Vec<f64> = polar.amplitude().iter().map(|&a| a * a).collect();
        let gradient: Vec<f64> = explicate_core::bohm::bohm_position_field(&polar)
            .map_err(runtime)?
            .into_iter()
            .map(|v| -v)
            .collect();
        let quantum_potential = vec![0.0; density.len()];
        frames.push(ExplicateFrame {
            polar,
            density,
            phase_gradient: gradient,
            quantum_potential,
        });
    }
    Ok(frames)
}

fn cubic(
    r: &Resolved,
    report: &mut RunReport,
    tol: &dyn Fn(&str, f64) -> f64,
) -> Result<(), RunError> {
    let grid = r.grid()?;
    let h = r.hamiltonian()?;
    let psi0 =
        gaussian_packet(&grid, r.initial.center, r.initial.width, r.initial.momentum)
            .map_err(runtime)?;
    let trace = evolve(&psi0, &h, &r.evolve_params()).map_err(runtime)?;
    report.check("norm-drift", trace.norm_drift(), tol("norm-drift", 1e-9));

    let e0 = energy_expectation(&trace.fields()[0], &h).map_err(runtime)?;
    let drift = trace
        .fields()
        .iter()
        .map(|f| {
            let e = energy_expectation(f, &h).expect("position representation");
            ((e - e0) / e0).abs()
        })
        .fold(0.0, f64::max);
    report.check(
        "energy-drift-relative",
        drift,
        tol("energy-drift-relative", 1e-6),
    );

    // Coarse series targets dt_out = 1e-2; keep one halving in hand so
    // the convergence order is always measurable.
    let stride = ((1e-2 / trace.dt_out()).round() as usize).max(2);
    let coarse = trace.strided(stride).map_err(runtime)?;
    let fine = trace.strided(stride / 2).map_err(runtime)?;
    let frames_coarse = explicate_frames(&coarse, &h).map_err(runtime)?;
    let frames_fine = explicate_frames(&fine, &h).map_err(runtime)?;
    let cont_coarse = continuity_residual_x(&frames_coarse, h.mass).map_err(runtime)?;
    let cont_fine = continuity_residual_x(&frames_fine, h.mass).map_err(runtime)?;
    report.check(
        "continuity-residual",
        cont_coarse.series.max(),
        tol("continuity-residual", 1e-3),
    );
    report.check(
        "continuity-order-defect",
        (measured_order(&cont_coarse.series, &cont_fine.series, 2.0) - 2.0).abs(),
        tol("continuity-order-defect", 0.2),
    );

    // Local-momentum fields in both representations, finite off-node.
    let momentum_frames = momentum_frames_without_q(&coarse)?;
    let mut finite = true;
    for f in frames_coarse.iter().chain(momentum_frames.iter()) {
        for (j, masked) in f.polar.node_mask().iter().enumerate() {
            if !masked && !f.phase_gradient[j].is_finite() {
                finite = false;
            }
        }
    }
    report.check_flag("bohm-fields-finite", finite);

    let trace_path = r.output_dir.join("trace.csv");
    write_trace_csv(&trace_path, &coarse).map_err(runtime)?;
    report.artifact(&trace_path);
    export_position_fields(&r.output_dir, &frames_coarse, report)?;
    let fields_p = r.output_dir.join("fields_p.csv");
    write_frames_csv(&fields_p, &momentum_frames).map_err(runtime)?;
    report.artifact(&fields_p);
    Ok(())
}

fn two_slit(
    r: &Resolved,
    report: &mut RunReport,
    tol: &dyn Fn(&str, f64) -> f64,
) -> Result<(), RunError> {
    let grid = r.grid()?;
    let h = r.hamiltonian()?;
    let separation = r.initial.center;
    let psi0 = gaussian_superposition(
        &grid,
        &[
            (Complex64::ONE, -separation, r.initial.width, r.initial.momentum),
            (Complex64::ONE, separation, r.initial.width, -r.initial.momentum),
        ],
    )
    .map_err(runtime)?;
    let trace = evolve(&psi0, &h, &r.evolve_params()).map_err(runtime)?;
    report.check("norm-drift", trace.norm_drift(), tol("norm-drift", 1e-9));

    // Interference lanes: count density maxima in the central half at the
    // final time.
    let last = trace.fields().last().expect("nonempty trace");
    let density = last.density();
    let peak = density.iter().copied().fold(0.0, f64::max);
    let central = grid.interior(0.5);
    let mut lanes = 0usize;
    for j in central.clone().skip(1).take(central.len() - 2) {
        if density[j] > density[j - 1] && density[j] > density[j + 1] && density[j] > 0.1 * peak {
            lanes += 1;
        }
    }
    report.check(
        "interference-lanes-defect",
        (3.0 - lanes as f64).max(0.0),
        tol("interference-lanes-defect", 0.5),
    );

    let count = r.trajectories.count.max(100);
    let (trajectories, ensemble) = trajectory_ensemble(&trace, h.mass, count).map_err(runtime)?;
    report.check_flag("ensemble-non-crossing", ensemble.non_crossing);
    report.check(
        "trajectory-completion-defect",
        1.0 - ensemble.completed as f64 / count as f64,
        tol("trajectory-completion-defect", 0.05),
    );

    let path = r.output_dir.join("trajectories.csv");
    write_trajectories_csv(&path, &trajectories).map_err(runtime)?;
    report.artifact(&path);
    let ens_path = r.output_dir.join("ensemble.json");
    std::fs::write(
        &ens_path,
        serde_json::to_string_pretty(&ensemble).expect("report serializes"),
    )
    .map_err(runtime)?;
    report.artifact(&ens_path);
    let trace_path = r.output_dir.join("trace.csv");
    write_trace_csv(&trace_path, &trace).map_err(runtime)?;
    report.artifact(&trace_path);
    let frames = explicate_frames(&trace, &h).map_err(runtime)?;
    export_position_fields(&r.output_dir, &frames, report)?;
    Ok(())
}

fn lattice_demo(
    r: &Resolved,
    report: &mut RunReport,
    tol: &dyn Fn(&str, f64) -> f64,
) -> Result<(), RunError> {
    let z_plus = Projection::from_axis([0.0, 0.0, 1.0], true)
        .map_err(runtime)?
        .with_label("z+");
    let z_minus = Projection::from_axis([0.0, 0.0, 1.0], false)
        .map_err(runtime)?
        .with_label("z-");
    let x_plus = Projection::from_axis([1.0, 0.0, 0.0], true)
        .map_err(runtime)?
        .with_label("x+");
    let x_minus = Projection::from_axis([1.0, 0.0, 0.0], false)
        .map_err(runtime)?
        .with_label("x-");
    let lattice = ProjectionLattice::generate(&[z_plus, z_minus, x_plus, x_minus])
        .map_err(runtime)?;

    let ortho = lattice.orthomodular_check().map_err(runtime)?;
    report.check(
        "orthomodular-violations",
        ortho.violations.len() as f64,
        tol("orthomodular-violations", 0.5),
    );
    report.check(
        "orthomodular-max-defect",
        ortho.max_defect,
        tol("orthomodular-max-defect", 1e-10),
    );

    let blocks = lattice.boolean_blocks().map_err(runtime)?;
    report.check(
        "boolean-block-count-defect",
        (blocks.len() as f64 - 2.0).abs(),
        tol("boolean-block-count-defect", 0.5),
    );
    let worst_block = blocks
        .iter()
        .map(|b| b.max_distributivity_defect)
        .fold(0.0, f64::max);
    report.check(
        "block-distributivity-defect",
        worst_block,
        tol("block-distributivity-defect", 1e-10),
    );

    let ce = distributivity_counterexample().map_err(runtime)?;
    report.check(
        "counterexample-lhs-defect",
        ce.lhs.distance(&ce.a),
        tol("counterexample-lhs-defect", 1e-10),
    );
    report.check(
        "counterexample-rhs-defect",
        ce.rhs.rank() as f64,
        tol("counterexample-rhs-defect", 0.5),
    );
    report.check(
        "counterexample-separation-defect",
        (0.9 - ce.separation).max(0.0),
        tol("counterexample-separation-defect", 1e-12),
    );

    #[derive(serde::Serialize)]
    struct LatticeReport {
        elements: Vec<String>,
        pairs_checked: usize,
        orthomodular_max_defect: f64,
        blocks: Vec<Vec<String>>,
        counterexample: CounterexampleReport,
    }
    #[derive(serde::Serialize)]
    struct CounterexampleReport {
        a: String,
        b: String,
        c: String,
        lhs_equals_a: bool,
        rhs_rank: usize,
        separation: f64,
    }
    let label = |p: &Projection, i: usize| {
        p.label()
            .map(String::from)
            .unwrap_or_else(|| format!("p{i} (rank {})", p.rank()))
    };
    let elements: Vec<String> = lattice
        .elements()
        .iter()
        .enumerate()
        .map(|(i, p)| label(p, i))
        .collect();
    let doc = LatticeReport {
        elements: elements.clone(),
        pairs_checked: ortho.pairs_checked,
        orthomodular_max_defect: ortho.max_defect,
        blocks: blocks
            .iter()
            .map(|b| b.members.iter().map(|&i| elements[i].clone()).collect())
            .collect(),
        counterexample: CounterexampleReport {
            a: "z+".into(),
            b: "x+".into(),
            c: "x-".into(),
            lhs_equals_a: ce.lhs.distance(&ce.a) < 1e-10,
            rhs_rank: ce.rhs.rank(),
            separation: ce.separation,
        },
    };
    let path = r.output_dir.join("lattice_report.json");
    std::fs::write(
        &path,
        serde_json::to_string_pretty(&doc).expect("report serializes"),
    )
    .map_err(runtime)?;
    report.artifact(&path);
    Ok(())
}

fn filter_demo(
    r: &Resolved,
    report: &mut RunReport,
    tol: &dyn Fn(&str, f64) -> f64,
) -> Result<(), RunError> {
    let z_plus = Projection::from_axis([0.0, 0.0, 1.0], true).map_err(runtime)?;
    let x_plus = Projection::from_axis([1.0, 0.0, 0.0], true).map_err(runtime)?;
    let z_minus = Projection::from_axis([0.0, 0.0, 1.0], false).map_err(runtime)?;

    // Shape, colour, shape again: the re-test halves the ensemble.
    let chain = [z_plus.clone(), x_plus, z_plus.clone()];
    let outcome = sequential_filter(&chain, &mixed_state(2)).map_err(runtime)?;
    let defect = outcome
        .probabilities
        .iter()
        .map(|p| (p - 0.5).abs())
        .fold(0.0, f64::max);
    report.check(
        "filter-probability-defect",
        defect,
        tol("filter-probability-defect", 1e-12),
    );

    // Orthogonal filters annihilate the beam; the error is the point.
    let up = explicate_core::logic::pure_state(&ColumnSpinor::new(
        Complex64::ONE,
        Complex64::ZERO,
    ));
    let rejected = sequential_filter(&[z_plus, z_minus], &up).is_err();
    report.check_flag("orthogonal-chain-rejected", rejected);

    #[derive(serde::Serialize)]
    struct FilterReport {
        stage_probabilities: Vec<f64>,
        survival_probability: f64,
    }
    let doc = FilterReport {
        survival_probability: outcome.probabilities.iter().product(),
        stage_probabilities: outcome.probabilities,
    };
    let path = r.output_dir.join("filter_report.json");
    std::fs::write(
        &path,
        serde_json::to_string_pretty(&doc).expect("report serializes"),
    )
    .map_err(runtime)?;
    report.artifact(&path);
    Ok(())
}

/// Deterministic low-discrepancy stream in [-1, 1]; keeps the demo
/// bit-reproducible without a random number generator.
fn quasi_random(i: usize, lane: usize) -> f64 {
    const ALPHA: [f64; 4] = [
        0.6180339887498949,
        0.7548776662466927,
        0.8191725133961645,
        0.8566748838545029,
    ];
    let x = (i as f64 + 1.0) * ALPHA[lane % 4];
    2.0 * (x - x.floor()) - 1.0
}

fn spinor_demo(
    r: &Resolved,
    report: &mut RunReport,
    tol: &dyn Fn(&str, f64) -> f64,
) -> Result<(), RunError> {
    let e = Idempotent::z_axis();

    // Tabulated dictionary rows.
    let cases = [
        (Complex64::new(1.0, 0.0), Complex64::ZERO, [1.0, 0.0, 0.0, 0.0]),
        (Complex64::ZERO, Complex64::new(1.0, 0.0), [0.0, 0.0, 1.0, 0.0]),
        (Complex64::new(0.0, 1.0), Complex64::ZERO, [0.0, 0.0, 0.0, 1.0]),
    ];
    let mut tabulated_defect = 0.0_f64;
    for (upper, lower, expect) in cases {
        let spinor = AlgebraicSpinor::from_column(&ColumnSpinor::new(upper, lower), e.clone())
            .map_err(runtime)?;
        for (g, want) in spinor.components().iter().zip(expect.iter()) {
            tabulated_defect = tabulated_defect.max((g - want).abs());
        }
    }
    report.check(
        "dictionary-tabulated-defect",
        tabulated_defect,
        tol("dictionary-tabulated-defect", 0.0),
    );

    let mut round_trip = 0.0_f64;
    let mut purity = 0.0_f64;
    let mut trace_defect = 0.0_f64;
    let mut polar_defect = 0.0_f64;
    for i in 0..1000 {
        let psi = ColumnSpinor::new(
            Complex64::new(quasi_random(i, 0), quasi_random(i, 1)),
            Complex64::new(quasi_random(i, 2), quasi_random(i, 3)),
        );
        if psi.norm_sqr() < 1e-3 {
            continue;
        }
        let alg = AlgebraicSpinor::from_column(&psi, e.clone()).map_err(runtime)?;
        let back = alg.to_column();
        round_trip = round_trip
            .max((back.upper - psi.upper).norm())
            .max((back.lower - psi.lower).norm());

        let normalized =
            AlgebraicSpinor::from_column(&psi.normalized(), e.clone()).map_err(runtime)?;
        let rho = normalized.density_element().map_err(runtime)?;
        let squared = rho
            .element()
            .product(rho.element())
            .map_err(runtime)?;
        purity = purity.max(squared.distance(rho.element()));
        trace_defect = trace_defect.max((rho.trace() - Complex64::ONE).norm());

        let polar = alg.polar_decompose().map_err(runtime)?;
        let rebuilt = polar
            .positive
            .product(&polar.unitary)
            .map_err(runtime)?;
        let diff = matrix_rep(&rebuilt).map_err(runtime)?
            - matrix_rep(alg.element()).map_err(runtime)?;
        polar_defect = polar_defect.max(diff.norm());
    }
    report.check(
        "dictionary-round-trip",
        round_trip,
        tol("dictionary-round-trip", 1e-14),
    );
    report.check("density-purity", purity, tol("density-purity", 1e-12));
    report.check("density-trace", trace_defect, tol("density-trace", 1e-12));
    report.check(
        "polar-reconstruction",
        polar_defect,
        tol("polar-reconstruction", 1e-12),
    );

    // rho for spin-up is the defining idempotent itself.
    let up = AlgebraicSpinor::from_column(
        &ColumnSpinor::new(Complex64::ONE, Complex64::ZERO),
        e.clone(),
    )
    .map_err(runtime)?;
    let rho_up = up.density_element().map_err(runtime)?;
    report.check(
        "density-reference-defect",
        rho_up.element().distance(e.element()),
        tol("density-reference-defect", 0.0),
    );

    #[derive(serde::Serialize)]
    struct SpinorReport {
        round_trip_defect: f64,
        purity_defect: f64,
        polar_defect: f64,
    }
    let doc = SpinorReport {
        round_trip_defect: round_trip,
        purity_defect: purity,
        polar_defect,
    };
    let path = r.output_dir.join("spinor_report.json");
    std::fs::write(
        &path,
        serde_json::to_string_pretty(&doc).expect("report serializes"),
    )
    .map_err(runtime)?;
    report.artifact(&path);
    Ok(())
}

/// Catalogue printed by `explicate list`.
pub fn catalogue() -> String {
    let mut out = String::new();
    for kind in ScenarioKind::ALL {
        out.push_str(&format!("{:<16} {}\n", kind.name(), kind.describe()));
    }
    out
}
