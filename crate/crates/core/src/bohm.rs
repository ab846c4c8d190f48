//! Boolean phase spaces `(x, p_B(x))` and `(x_B(p), p)` and trajectory
//! integration through the evolved local-momentum field.
//!
//! The guidance law `dx/dt = (dS/dx)/m` is integrated with classical RK4
//! over each snapshot interval, with the velocity field interpolated
//! linearly in space and in time between snapshots.  Trajectories are
//! independent given an immutable trace; ensembles use deterministic
//! quantile-spaced initial points so runs are exactly reproducible.

use crate::evolution::EvolutionTrace;
use crate::explicate::{polar_sequence, ExplicateError, PolarField};
use crate::grid::{Grid, Representation, SpectralOps};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BohmError {
    #[error(transparent)]
    Explicate(#[from] ExplicateError),
    #[error("initial point {0} is outside the grid interior")]
    StartOutsideGrid(f64),
    #[error("ensemble needs at least {needed} trajectories, asked for {got}")]
    EnsembleTooSmall { needed: usize, got: usize },
    #[error("trace has fewer than two snapshots")]
    TooShort,
}

/// Local (Bohm) momentum field `p_B = dS/dx` on a position-representation
/// polar field; zero at masked points.
pub fn bohm_momentum_field(polar: &PolarField) -> Result<Vec<f64>, ExplicateError> {
    if polar.representation() != Representation::Position {
        return Err(crate::grid::GridError::WrongRepresentation {
            expected: Representation::Position,
            got: polar.representation(),
        }
        .into());
    }
    Ok(smooth_phase_gradient(polar))
}

/// Bohm position field `x_B = -dS_p/dp` on a momentum-representation polar
/// field; zero at masked points.
pub fn bohm_position_field(polar: &PolarField) -> Result<Vec<f64>, ExplicateError> {
    if polar.representation() != Representation::Momentum {
        return Err(crate::grid::GridError::WrongRepresentation {
            expected: Representation::Momentum,
            got: polar.representation(),
        }
        .into());
    }
    Ok(smooth_phase_gradient(polar).into_iter().map(|v| -v).collect())
}

fn smooth_phase_gradient(polar: &PolarField) -> Vec<f64> {
    let ops = SpectralOps::new(polar.grid());
    let psi = polar.reconstruct();
    let d1 = ops.derivative(&psi, 1);
    (0..psi.len())
        .map(|j| {
            if polar.node_mask()[j] {
                0.0
            } else {
                (d1[j] * psi[j].conj()).im / (polar.amplitude()[j] * polar.amplitude()[j])
            }
        })
        .collect()
}

/// How a trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TrajectoryFate {
    /// Ran through the whole trace.
    Completed,
    /// Left the grid margin at the given time.
    Escaped { time: f64 },
    /// Entered a node-masked cell where the velocity is undefined.
    NodeEncounter { time: f64 },
}

/// A single integrated trajectory, sampled at the trace snapshot times.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub initial: f64,
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub fate: TrajectoryFate,
}

/// Velocity field `v(x, t) = p_B(x, t)/m` sampled on the trace, shared by
/// all trajectories integrated from it.
pub struct VelocityField {
    grid: Grid,
    times: Vec<f64>,
    velocity: Vec<Vec<f64>>,
    valid: Vec<Vec<bool>>,
}

impl VelocityField {
    pub fn from_trace(trace: &EvolutionTrace, mass: f64) -> Result<Self, BohmError> {
        if trace.len() < 2 {
            return Err(BohmError::TooShort);
        }
        let polar_fields = polar_sequence(trace)?;
        let mut velocity = Vec::with_capacity(polar_fields.len());
        let mut valid = Vec::with_capacity(polar_fields.len());
        for polar in &polar_fields {
            let v: Vec<f64> = smooth_phase_gradient(polar)
                .into_iter()
                .map(|g| g / mass)
                .collect();
            valid.push(polar.node_mask().iter().map(|&m| !m).collect());
            velocity.push(v);
        }
        Ok(Self {
            grid: *trace.grid(),
            times: trace.fields().iter().map(|f| f.time()).collect(),
            velocity,
            valid,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Velocity at `(x, t)` with bilinear interpolation; `None` when the
    /// supporting cells are node-masked or `x` is outside the margin.
    fn sample(&self, frame: usize, alpha: f64, x: f64) -> Option<f64> {
        let n = self.grid.len();
        let fx = (x - self.grid.origin()) / self.grid.spacing();
        if fx < 0.0 || fx >= (n - 1) as f64 {
            return None;
        }
        let j = fx as usize;
        let frac = fx - j as f64;
        let blend = |t: usize| -> Option<f64> {
            if !(self.valid[t][j] && self.valid[t][j + 1]) {
                return None;
            }
            Some(self.velocity[t][j] * (1.0 - frac) + self.velocity[t][j + 1] * frac)
        };
        let lo = blend(frame)?;
        if alpha == 0.0 {
            return Some(lo);
        }
        let hi = blend(frame + 1)?;
        Some(lo * (1.0 - alpha) + hi * alpha)
    }

    /// Integrates one trajectory from `x0` through the whole trace.
    pub fn integrate(&self, x0: f64) -> Result<Trajectory, BohmError> {
        let n = self.grid.len();
        let span = self.grid.spacing() * (n - 1) as f64;
        if x0 < self.grid.origin() || x0 > self.grid.origin() + span {
            return Err(BohmError::StartOutsideGrid(x0));
        }
        let mut x = x0;
        let mut times = vec![self.times[0]];
        let mut positions = vec![x0];
        let mut fate = TrajectoryFate::Completed;

        'frames: for frame in 0..self.times.len() - 1 {
            let h = self.times[frame + 1] - self.times[frame];
            let stage = |alpha: f64, y: f64| self.sample(frame, alpha, y);
            let step = (|| {
                let k1 = stage(0.0, x)?;
                let k2 = stage(0.5, x + 0.5 * h * k1)?;
                let k3 = stage(0.5, x + 0.5 * h * k2)?;
                let k4 = stage(1.0, x + h * k3)?;
                Some(h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
            })();
            match step {
                Some(dx) => x += dx,
                None => {
                    // Distinguish leaving the grid from hitting a node.
                    let inside =
                        x >= self.grid.origin() && x <= self.grid.origin() + span;
                    fate = if inside {
                        TrajectoryFate::NodeEncounter {
                            time: self.times[frame],
                        }
                    } else {
                        TrajectoryFate::Escaped {
                            time: self.times[frame],
                        }
                    };
                    break 'frames;
                }
            }
            times.push(self.times[frame + 1]);
            positions.push(x);
        }
        Ok(Trajectory {
            initial: x0,
            times,
            positions,
            fate,
        })
    }
}

/// Convenience wrapper: velocity field plus a single integration.
pub fn integrate_trajectory(
    trace: &EvolutionTrace,
    x0: f64,
    mass: f64,
) -> Result<Trajectory, BohmError> {
    VelocityField::from_trace(trace, mass)?.integrate(x0)
}

/// Equivariance snapshot: Kolmogorov-Smirnov distance between the evolved
/// ensemble and the quantum density at one checkpoint.
#[derive(Debug, Clone, Serialize)]
pub struct KsCheckpoint {
    pub time: f64,
    pub distance: f64,
}

/// Ensemble run summary, serializable as the machine-readable report.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleReport {
    pub count: usize,
    pub checkpoints: Vec<KsCheckpoint>,
    pub max_ks_distance: f64,
    /// True when the initial ordering is preserved at every checkpoint
    /// (1-D flow lines cannot cross).
    pub non_crossing: bool,
    /// Most negative ordering gap seen, in grid units (0 when perfectly
    /// sorted).
    pub worst_ordering_violation: f64,
    pub completed: usize,
}

/// Integrates `count` trajectories from quantile-spaced starting points of
/// the initial density and reports equivariance (KS distance per
/// checkpoint) plus the no-crossing property.
pub fn trajectory_ensemble(
    trace: &EvolutionTrace,
    mass: f64,
    count: usize,
) -> Result<(Vec<Trajectory>, EnsembleReport), BohmError> {
    if count < 100 {
        return Err(BohmError::EnsembleTooSmall {
            needed: 100,
            got: count,
        });
    }
    let field = VelocityField::from_trace(trace, mass)?;
    let starts = quantile_points(&trace.fields()[0].density(), trace.grid(), count);
    let trajectories: Vec<Trajectory> = starts
        .iter()
        .map(|&x0| field.integrate(x0))
        .collect::<Result<_, _>>()?;

    let completed = trajectories
        .iter()
        .filter(|t| t.fate == TrajectoryFate::Completed)
        .count();

    let mut checkpoints = Vec::new();
    let mut non_crossing = true;
    let mut worst_gap = 0.0_f64;
    for (snap, field_state) in trace.fields().iter().enumerate() {
        let mut positions: Vec<f64> = trajectories
            .iter()
            .filter(|t| t.positions.len() > snap)
            .map(|t| t.positions[snap])
            .collect();
        if positions.len() < count {
            break;
        }
        for w in positions.windows(2) {
            let gap = w[1] - w[0];
            if gap < -1e-9 {
                non_crossing = false;
                worst_gap = worst_gap.min(gap);
            }
        }
        positions.sort_by(|a, b| a.partial_cmp(b).expect("finite positions"));
        let cdf = CumulativeDensity::new(&field_state.density(), trace.grid());
        let mut d = 0.0_f64;
        for (i, &x) in positions.iter().enumerate() {
            let f = cdf.at(x);
            d = d.max((f - i as f64 / count as f64).abs());
            d = d.max((f - (i + 1) as f64 / count as f64).abs());
        }
        checkpoints.push(KsCheckpoint {
            time: field_state.time(),
            distance: d,
        });
    }
    let max_ks_distance = checkpoints
        .iter()
        .map(|c| c.distance)
        .fold(0.0, f64::max);
    let report = EnsembleReport {
        count,
        checkpoints,
        max_ks_distance,
        non_crossing,
        worst_ordering_violation: worst_gap,
        completed,
    };
    Ok((trajectories, report))
}

/// Piecewise-linear CDF of a gridded density.
struct CumulativeDensity {
    grid: Grid,
    cumulative: Vec<f64>,
}

impl CumulativeDensity {
    fn new(density: &[f64], grid: &Grid) -> Self {
        let dx = grid.spacing();
        let mut cumulative = Vec::with_capacity(density.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for &p in density {
            acc += p * dx;
            cumulative.push(acc);
        }
        let total = acc;
        for c in &mut cumulative {
            *c /= total;
        }
        Self {
            grid: *grid,
            cumulative,
        }
    }

    /// CDF value at `x`; the point sample at `x_j` owns the cell centered
    /// on it, `[x_j - dx/2, x_j + dx/2)`.
    fn at(&self, x: f64) -> f64 {
        let fx = (x - self.grid.origin()) / self.grid.spacing() + 0.5;
        if fx <= 0.0 {
            return 0.0;
        }
        let n = self.cumulative.len() - 1;
        if fx >= n as f64 {
            return 1.0;
        }
        let j = fx as usize;
        let frac = fx - j as f64;
        self.cumulative[j] * (1.0 - frac) + self.cumulative[j + 1] * frac
    }

    /// Inverse CDF by bisection on the piecewise-linear table.
    fn quantile(&self, q: f64) -> f64 {
        let c = &self.cumulative;
        let mut lo = 0usize;
        let mut hi = c.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if c[mid] < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let span = c[hi] - c[lo];
        let frac = if span > 0.0 { (q - c[lo]) / span } else { 0.5 };
        self.grid.origin() + (lo as f64 + frac - 0.5) * self.grid.spacing()
    }
}

/// Deterministic quantile-spaced sample of a density: the `(i + 1/2)/n`
/// quantiles, ascending.
pub fn quantile_points(density: &[f64], grid: &Grid, count: usize) -> Vec<f64> {
    let cdf = CumulativeDensity::new(density, grid);
    (0..count)
        .map(|i| cdf.quantile((i as f64 + 0.5) / count as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{
        evolve, gaussian_packet, harmonic_eigenstate, EvolveParams, Hamiltonian,
    };
    use crate::grid::{Representation, WaveField};
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn grid() -> Grid {
        Grid::symmetric(12.0, 512).unwrap()
    }

    fn oscillator() -> Hamiltonian {
        Hamiltonian::harmonic(1.0, 1.0).unwrap()
    }

    #[test]
    fn plane_wave_momentum_field_is_uniform() {
        let g = Grid::symmetric(std::f64::consts::PI, 256).unwrap();
        let p0 = 3.0;
        let values: Vec<Complex64> = g
            .points()
            .map(|x| Complex64::from_polar(1.0, p0 * x))
            .collect();
        let field = WaveField::new(g, Representation::Position, values, 0.0);
        let polar = PolarField::from_wave(&field).unwrap();
        let pb = bohm_momentum_field(&polar).unwrap();
        for &v in &pb {
            assert!((v - p0).abs() < 1e-9);
        }
    }

    #[test]
    fn stationary_state_momentum_field_vanishes() {
        let psi0 = harmonic_eigenstate(&grid(), 0, 1.0, 1.0).unwrap();
        let polar = PolarField::from_wave(&psi0).unwrap();
        let pb = bohm_momentum_field(&polar).unwrap();
        let peak = polar.amplitude().iter().copied().fold(0.0, f64::max);
        for j in 0..pb.len() {
            if polar.amplitude()[j] >= 1e-4 * peak {
                assert!(pb[j].abs() < 1e-9);
            }
        }
    }

    #[test]
    fn coherent_momentum_field_is_uniform_in_x() {
        let psi0 = gaussian_packet(&grid(), 2.0, FRAC_1_SQRT_2, 0.0).unwrap();
        let params = EvolveParams {
            dt: 1e-3,
            steps_per_snapshot: 250,
            snapshots: 4,
        };
        let trace = evolve(&psi0, &oscillator(), &params).unwrap();
        let polar_fields = polar_sequence(&trace).unwrap();
        for polar in &polar_fields {
            let pb = bohm_momentum_field(polar).unwrap();
            let expected = -2.0 * polar.time().sin(); // p_c(t) for x0 = 2
            let peak = polar.amplitude().iter().copied().fold(0.0, f64::max);
            for j in 0..pb.len() {
                if polar.amplitude()[j] >= 1e-4 * peak {
                    assert!(
                        (pb[j] - expected).abs() < 1e-4,
                        "t={} x_j={} pb={} expect={}",
                        polar.time(),
                        polar.grid().point(j),
                        pb[j],
                        expected
                    );
                }
            }
        }
    }

    #[test]
    fn position_field_reads_off_the_packet_center() {
        // Shifted ground state: x_B = a uniformly.
        let a = 1.5;
        let psi = gaussian_packet(&grid(), a, FRAC_1_SQRT_2, 0.0).unwrap();
        let phi = psi.to_momentum().unwrap();
        let polar = PolarField::from_wave(&phi).unwrap();
        let xb = bohm_position_field(&polar).unwrap();
        let peak = polar.amplitude().iter().copied().fold(0.0, f64::max);
        for j in 0..xb.len() {
            if polar.amplitude()[j] >= 1e-4 * peak {
                assert!((xb[j] - a).abs() < 1e-6, "xb={} at j={j}", xb[j]);
            }
        }

        // Centered ground state: x_B = 0.
        let psi = gaussian_packet(&grid(), 0.0, FRAC_1_SQRT_2, 0.0).unwrap();
        let phi = psi.to_momentum().unwrap();
        let polar = PolarField::from_wave(&phi).unwrap();
        let xb = bohm_position_field(&polar).unwrap();
        for j in 0..xb.len() {
            if polar.amplitude()[j] >= 1e-4 * peak {
                assert!(xb[j].abs() < 1e-6);
            }
        }
    }

    #[test]
    fn coherent_position_field_tracks_the_center() {
        let psi0 = gaussian_packet(&grid(), 2.0, FRAC_1_SQRT_2, 0.0).unwrap();
        let params = EvolveParams {
            dt: 1e-3,
            steps_per_snapshot: 300,
            snapshots: 3,
        };
        let trace = evolve(&psi0, &oscillator(), &params).unwrap();
        let momentum_trace = trace.to_momentum().unwrap();
        let polar_fields = polar_sequence(&momentum_trace).unwrap();
        for polar in &polar_fields {
            let xb = bohm_position_field(polar).unwrap();
            let expected = 2.0 * polar.time().cos();
            let peak = polar.amplitude().iter().copied().fold(0.0, f64::max);
            for j in 0..xb.len() {
                if polar.amplitude()[j] >= 1e-3 * peak {
                    assert!(
                        (xb[j] - expected).abs() < 1e-4,
                        "t={}: xb={} expect={expected}",
                        polar.time(),
                        xb[j]
                    );
                }
            }
        }
    }

    #[test]
    fn ground_state_trajectories_are_static() {
        let psi0 = harmonic_eigenstate(&grid(), 0, 1.0, 1.0).unwrap();
        let params = EvolveParams {
            dt: 1e-3,
            steps_per_snapshot: 100,
            snapshots: 5,
        };
        let trace = evolve(&psi0, &oscillator(), &params).unwrap();
        for x0 in [-1.0, 0.3, 2.0] {
            let tr = integrate_trajectory(&trace, x0, 1.0).unwrap();
            assert_eq!(tr.fate, TrajectoryFate::Completed);
            for &x in &tr.positions {
                // Static up to the Trotter-level phase wobble of the
                // discrete propagator.
                assert!((x - x0).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn coherent_trajectories_translate_rigidly() {
        let psi0 = gaussian_packet(&grid(), 2.0, FRAC_1_SQRT_2, 0.0).unwrap();
        let period = 2.0 * std::f64::consts::PI;
        let snapshots = 628;
        let params = EvolveParams {
            dt: period / (100.0 * snapshots as f64),
            steps_per_snapshot: 100,
            snapshots,
        };
        let trace = evolve(&psi0, &oscillator(), &params).unwrap();
        let field = VelocityField::from_trace(&trace, 1.0).unwrap();
        for x0 in [1.0, 2.0, 3.0] {
            let tr = field.integrate(x0).unwrap();
            assert_eq!(tr.fate, TrajectoryFate::Completed);
            for (i, &x) in tr.positions.iter().enumerate() {
                let t = tr.times[i];
                let expected = x0 - 2.0 + 2.0 * t.cos();
                assert!(
                    (x - expected).abs() < 1e-3,
                    "x0={x0} t={t}: x={x} expect={expected}"
                );
            }
        }
    }

    #[test]
    fn free_packet_center_trajectory_is_fixed() {
        let g = Grid::symmetric(24.0, 1024).unwrap();
        let h = Hamiltonian::free(1.0).unwrap();
        let psi0 = gaussian_packet(&g, 0.0, 1.0, 0.0).unwrap();
        let params = EvolveParams {
            dt: 1e-3,
            steps_per_snapshot: 100,
            snapshots: 20,
        };
        let trace = evolve(&psi0, &h, &params).unwrap();
        let tr = integrate_trajectory(&trace, 0.0, 1.0).unwrap();
        for &x in &tr.positions {
            assert!(x.abs() < 1e-6);
        }
    }

    #[test]
    fn ensemble_is_equivariant_and_non_crossing() {
        let psi0 = gaussian_packet(&grid(), 2.0, FRAC_1_SQRT_2, 0.0).unwrap();
        let params = EvolveParams {
            dt: 2e-3,
            steps_per_snapshot: 50,
            snapshots: 31,
        };
        let trace = evolve(&psi0, &oscillator(), &params).unwrap();
        let (trajectories, report) = trajectory_ensemble(&trace, 1.0, 400).unwrap();
        assert_eq!(trajectories.len(), 400);
        assert_eq!(report.completed, 400);
        assert!(report.non_crossing);
        assert!(
            report.max_ks_distance < 0.05,
            "KS {:.4}",
            report.max_ks_distance
        );
    }

    #[test]
    fn static_ensemble_ks_is_small() {
        let psi0 = harmonic_eigenstate(&grid(), 0, 1.0, 1.0).unwrap();
        let params = EvolveParams {
            dt: 1e-3,
            steps_per_snapshot: 100,
            snapshots: 5,
        };
        let trace = evolve(&psi0, &oscillator(), &params).unwrap();
        let n = 400;
        let (_, report) = trajectory_ensemble(&trace, 1.0, n).unwrap();
        let bound = 2.0 / (n as f64).sqrt();
        assert!(report.max_ks_distance < bound, "KS {}", report.max_ks_distance);
        // Static trajectories: the distance must also be constant in time.
        let first = report.checkpoints[0].distance;
        for c in &report.checkpoints {
            assert!((c.distance - first).abs() < 1e-9);
        }
    }

    #[test]
    fn small_ensembles_are_rejected() {
        let psi0 = harmonic_eigenstate(&grid(), 0, 1.0, 1.0).unwrap();
        let params = EvolveParams {
            dt: 1e-3,
            steps_per_snapshot: 10,
            snapshots: 2,
        };
        let trace = evolve(&psi0, &oscillator(), &params).unwrap();
        assert!(matches!(
            trajectory_ensemble(&trace, 1.0, 50),
            Err(BohmError::EnsembleTooSmall { .. })
        ));
    }

    #[test]
    fn start_outside_grid_is_rejected() {
        let psi0 = harmonic_eigenstate(&grid(), 0, 1.0, 1.0).unwrap();
        let params = EvolveParams {
            dt: 1e-3,
            steps_per_snapshot: 10,
            snapshots: 2,
        };
        let trace = evolve(&psi0, &oscillator(), &params).unwrap();
        assert!(matches!(
            integrate_trajectory(&trace, 99.0, 1.0),
            Err(BohmError::StartOutsideGrid(_))
        ));
    }

    #[test]
    fn quantile_points_are_sorted_and_central() {
        let g = grid();
        let psi0 = harmonic_eigenstate(&g, 0, 1.0, 1.0).unwrap();
        let pts = quantile_points(&psi0.density(), &g, 101);
        for w in pts.windows(2) {
            assert!(w[1] > w[0]);
        }
        // Median of the symmetric ground state is the origin.
        assert!(pts[50].abs() < 1e-6);
    }
}
