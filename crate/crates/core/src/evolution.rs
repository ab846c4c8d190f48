//! Unitary time evolution of one-dimensional wavefields and operator-level
//! residuals for the paired time-development equations.
//!
//! The propagator is a second-order symmetric split step (kinetic
//! half-steps applied in momentum space, potential full step in position
//! space) on a periodic grid.  Each factor is a pure phase, so the discrete
//! norm is conserved to roundoff; accuracy is `O(dt^2)` per unit time with
//! spectral accuracy in space.
//!
//! Residuals for the commutator equation `i d rho/dt = [H, rho]` and the
//! anticommutator (energy) equation are evaluated on trace snapshots
//! without materializing `rho` as an `N x N` matrix: every operator in play
//! is a short combination of outer products `|u><v|`, so Frobenius norms
//! reduce to small Gram matrices of weighted inner products.

use crate::grid::{Grid, GridError, Representation, SpectralOps, WaveField};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvolutionError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("mass must be positive and finite, got {0}")]
    BadMass(f64),
    #[error("potential parameter {name} is not finite: {value}")]
    BadPotential { name: &'static str, value: f64 },
    #[error("packet support [{lo:.3}, {hi:.3}] does not fit the grid domain [{dlo:.3}, {dhi:.3})")]
    DomainOverflow { lo: f64, hi: f64, dlo: f64, dhi: f64 },
    #[error("evolution unstable at t = {time:.6}: norm drift {drift:.3e}")]
    Instability { time: f64, drift: f64 },
    #[error("packet reached the boundary margin at t = {time:.6}: edge mass {mass:.3e}")]
    BoundaryEscape { time: f64, mass: f64 },
    #[error("need at least {needed} snapshots, trace has {got}")]
    InsufficientSnapshots { needed: usize, got: usize },
    #[error("stride {0} does not fit the trace")]
    BadStride(usize),
    #[error("hamiltonian has no momentum-space form for this potential")]
    NoMomentumForm,
}

/// Confining or scattering potential on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Free,
    /// `V(x) = stiffness x^2 / 2`.
    Harmonic { stiffness: f64 },
    /// `V(x) = stiffness x^2 / 2 + cubic x^3`.
    Cubic { stiffness: f64, cubic: f64 },
}

impl Potential {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Potential::Free => 0.0,
            Potential::Harmonic { stiffness } => 0.5 * stiffness * x * x,
            Potential::Cubic { stiffness, cubic } => 0.5 * stiffness * x * x + cubic * x * x * x,
        }
    }
}

/// Mass plus potential; hbar = 1, all parameters dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian {
    pub mass: f64,
    pub potential: Potential,
}

impl Hamiltonian {
    pub fn new(mass: f64, potential: Potential) -> Result<Self, EvolutionError> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(EvolutionError::BadMass(mass));
        }
        match potential {
            Potential::Free => {}
            Potential::Harmonic { stiffness } => {
                if !stiffness.is_finite() {
                    return Err(EvolutionError::BadPotential {
                        name: "stiffness",
                        value: stiffness,
                    });
                }
            }
            Potential::Cubic { stiffness, cubic } => {
                for (name, value) in [("stiffness", stiffness), ("cubic", cubic)] {
                    if !value.is_finite() {
                        return Err(EvolutionError::BadPotential { name, value });
                    }
                }
            }
        }
        Ok(Self { mass, potential })
    }

    pub fn harmonic(mass: f64, stiffness: f64) -> Result<Self, EvolutionError> {
        Self::new(mass, Potential::Harmonic { stiffness })
    }

    pub fn free(mass: f64) -> Result<Self, EvolutionError> {
        Self::new(mass, Potential::Free)
    }

    /// Oscillator angular frequency, when harmonic.
    pub fn omega(&self) -> Option<f64> {
        match self.potential {
            Potential::Harmonic { stiffness } => Some((stiffness / self.mass).sqrt()),
            _ => None,
        }
    }
}

/// Gaussian packet `psi(x) ∝ exp(-(x-x0)^2/(4 s^2) + i p0 x)`, normalized
/// on the grid.  Requires the 6-sigma support to fit the domain.
pub fn gaussian_packet(
    grid: &Grid,
    center: f64,
    width: f64,
    momentum: f64,
) -> Result<WaveField, EvolutionError> {
    gaussian_superposition(grid, &[(Complex64::ONE, center, width, momentum)])
}

/// Normalized superposition of Gaussian packets, each entry
/// `(amplitude, center, width, momentum)`.
pub fn gaussian_superposition(
    grid: &Grid,
    components: &[(Complex64, f64, f64, f64)],
) -> Result<WaveField, EvolutionError> {
    for &(_, center, width, _) in components {
        let (lo, hi) = (center - 6.0 * width, center + 6.0 * width);
        if lo < grid.origin() || hi > grid.upper_edge() {
            return Err(EvolutionError::DomainOverflow {
                lo,
                hi,
                dlo: grid.origin(),
                dhi: grid.upper_edge(),
            });
        }
    }
    let values: Vec<Complex64> = grid
        .points()
        .map(|x| {
            components
                .iter()
                .map(|&(amp, center, width, momentum)| {
                    let envelope = (-(x - center).powi(2) / (4.0 * width * width)).exp();
                    amp * Complex64::from_polar(envelope, momentum * x)
                })
                .sum()
        })
        .collect();
    let mut field = WaveField::new(*grid, Representation::Position, values, 0.0);
    field.normalize()?;
    Ok(field)
}

/// Harmonic-oscillator eigenstate `n` for the given mass and stiffness,
/// sampled and normalized on the grid.  Built from the normalized Hermite
/// function recurrence.
pub fn harmonic_eigenstate(
    grid: &Grid,
    n: usize,
    mass: f64,
    stiffness: f64,
) -> Result<WaveField, EvolutionError> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(EvolutionError::BadMass(mass));
    }
    if !(stiffness > 0.0 && stiffness.is_finite()) {
        return Err(EvolutionError::BadPotential {
            name: "stiffness",
            value: stiffness,
        });
    }
    let omega = (stiffness / mass).sqrt();
    let alpha = (mass * omega).sqrt();
    let values: Vec<Complex64> = grid
        .points()
        .map(|x| {
            let xi = alpha * x;
            let mut h_prev = 0.0_f64;
            let mut h = std::f64::consts::PI.powf(-0.25) * (-xi * xi / 2.0).exp();
            for k in 0..n {
                let next = (2.0 / (k as f64 + 1.0)).sqrt() * xi * h
                    - (k as f64 / (k as f64 + 1.0)).sqrt() * h_prev;
                h_prev = h;
                h = next;
            }
            Complex64::new(h, 0.0)
        })
        .collect();
    let mut field = WaveField::new(*grid, Representation::Position, values, 0.0);
    field.normalize()?;
    Ok(field)
}

/// Applies `H` to a field spectrally, in whichever representation the
/// field lives.  In momentum space the position operator is `i d/dp`, so a
/// harmonic potential becomes `-(K/2) d^2/dp^2`.
pub fn apply_hamiltonian(field: &WaveField, h: &Hamiltonian) -> Result<Vec<Complex64>, EvolutionError> {
    let ops = SpectralOps::new(field.grid());
    match field.representation() {
        Representation::Position => {
            let second = ops.derivative(field.values(), 2);
            Ok(field
                .values()
                .iter()
                .zip(second.iter())
                .enumerate()
                .map(|(j, (v, d2))| {
                    let x = field.grid().point(j);
                    -d2 / (2.0 * h.mass) + v * h.potential.value(x)
                })
                .collect())
        }
        Representation::Momentum => {
            let kinetic = |j: usize| {
                let p = field.grid().point(j);
                p * p / (2.0 * h.mass)
            };
            match h.potential {
                Potential::Free => Ok(field
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * kinetic(j))
                    .collect()),
                Potential::Harmonic { stiffness } => {
                    let second = ops.derivative(field.values(), 2);
                    Ok(field
                        .values()
                        .iter()
                        .zip(second.iter())
                        .enumerate()
                        .map(|(j, (v, d2))| v * kinetic(j) - d2 * (stiffness / 2.0))
                        .collect())
                }
                Potential::Cubic { .. } => Err(EvolutionError::NoMomentumForm),
            }
        }
    }
}

/// Expectation value `<psi|H|psi>` (real part; the imaginary part is
/// roundoff for Hermitian `H`).
pub fn energy_expectation(field: &WaveField, h: &Hamiltonian) -> Result<f64, EvolutionError> {
    let h_psi = apply_hamiltonian(field, h)?;
    let dx = field.grid().spacing();
    Ok(field
        .values()
        .iter()
        .zip(h_psi.iter())
        .map(|(v, hv)| (v.conj() * hv).re)
        .sum::<f64>()
        * dx)
}

/// Step sizes and snapshot cadence for [`evolve`].
#[derive(Debug, Clone, Copy)]
pub struct EvolveParams {
    /// Integrator step.
    pub dt: f64,
    /// Snapshots are recorded every this many steps; `dt_out = dt * this`.
    pub steps_per_snapshot: usize,
    /// Number of recorded intervals; the trace holds `snapshots + 1` fields
    /// including the initial one.
    pub snapshots: usize,
}

impl EvolveParams {
    pub fn dt_out(&self) -> f64 {
        self.dt * self.steps_per_snapshot as f64
    }

    pub fn duration(&self) -> f64 {
        self.dt_out() * self.snapshots as f64
    }
}

/// Ordered snapshots of an evolving wavefield at uniform output intervals.
#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    fields: Vec<WaveField>,
    dt_out: f64,
}

impl EvolutionTrace {
    pub fn from_fields(fields: Vec<WaveField>, dt_out: f64) -> Self {
        Self { fields, dt_out }
    }

    pub fn fields(&self) -> &[WaveField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn dt_out(&self) -> f64 {
        self.dt_out
    }

    pub fn grid(&self) -> &Grid {
        self.fields[0].grid()
    }

    pub fn representation(&self) -> Representation {
        self.fields[0].representation()
    }

    /// Keeps every `stride`-th snapshot, multiplying the output interval.
    /// Used for self-convergence studies in the output step.
    pub fn strided(&self, stride: usize) -> Result<EvolutionTrace, EvolutionError> {
        if stride == 0 || stride >= self.fields.len() {
            return Err(EvolutionError::BadStride(stride));
        }
        Ok(EvolutionTrace {
            fields: self.fields.iter().step_by(stride).cloned().collect(),
            dt_out: self.dt_out * stride as f64,
        })
    }

    /// Transforms every snapshot to the momentum representation.
    pub fn to_momentum(&self) -> Result<EvolutionTrace, EvolutionError> {
        let fields = self
            .fields
            .iter()
            .map(|f| f.to_momentum())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EvolutionTrace {
            fields,
            dt_out: self.dt_out,
        })
    }

    /// Worst deviation of any snapshot norm from the initial norm.
    pub fn norm_drift(&self) -> f64 {
        let n0 = self.fields[0].norm();
        self.fields
            .iter()
            .map(|f| (f.norm() / n0 - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

const INSTABILITY_DRIFT: f64 = 1e-6;
const EDGE_FRACTION: usize = 50; // outer 1/50th of the grid on each side
const EDGE_MASS_LIMIT: f64 = 1e-8;

/// Evolves `initial` under `h` with the symmetric split-step propagator,
/// recording snapshots per `params`.  Fails fast when the norm drifts
/// beyond 1e-6 or probability mass reaches the boundary margin.
pub fn evolve(
    initial: &WaveField,
    h: &Hamiltonian,
    params: &EvolveParams,
) -> Result<EvolutionTrace, EvolutionError> {
    assert!(params.dt > 0.0 && params.steps_per_snapshot > 0);
    let grid = *initial.grid();
    let ops = SpectralOps::new(&grid);
    let n = grid.len();
    let dt = params.dt;

    let kinetic_half: Vec<Complex64> = (0..n)
        .map(|k| {
            let w = ops.frequency(k);
            Complex64::from_polar(1.0, -w * w / (2.0 * h.mass) * dt / 2.0)
        })
        .collect();
    let kinetic_full: Vec<Complex64> = (0..n)
        .map(|k| {
            let w = ops.frequency(k);
            Complex64::from_polar(1.0, -w * w / (2.0 * h.mass) * dt)
        })
        .collect();
    let potential_step: Vec<Complex64> = grid
        .points()
        .map(|x| Complex64::from_polar(1.0, -h.potential.value(x) * dt))
        .collect();

    let norm0 = initial.norm();
    let mut current = initial.values().to_vec();
    let mut time = initial.time();
    let mut fields = Vec::with_capacity(params.snapshots + 1);
    fields.push(WaveField::new(
        grid,
        Representation::Position,
        current.clone(),
        time,
    ));

    let mul = |buf: &mut [Complex64], phases: &[Complex64]| {
        for (v, p) in buf.iter_mut().zip(phases) {
            *v *= p;
        }
    };

    for _ in 0..params.snapshots {
        // Merged Strang block: half kinetic, then (V, full kinetic) pairs,
        // closing with V and a final half kinetic.
        ops.forward_in_place(&mut current);
        mul(&mut current, &kinetic_half);
        for step in 0..params.steps_per_snapshot {
            ops.inverse_in_place(&mut current);
            mul(&mut current, &potential_step);
            ops.forward_in_place(&mut current);
            if step + 1 == params.steps_per_snapshot {
                mul(&mut current, &kinetic_half);
            } else {
                mul(&mut current, &kinetic_full);
            }
        }
        ops.inverse_in_place(&mut current);
        time += dt * params.steps_per_snapshot as f64;

        let field = WaveField::new(grid, Representation::Position, current.clone(), time);
        let drift = (field.norm() / norm0 - 1.0).abs();
        // Negated comparison so a NaN norm also trips the guard.
        if !(drift <= INSTABILITY_DRIFT) {
            return Err(EvolutionError::Instability { time, drift });
        }
        let margin = n / EDGE_FRACTION;
        let dx = grid.spacing();
        let edge_mass: f64 = field.values()[..margin]
            .iter()
            .chain(field.values()[n - margin..].iter())
            .map(|v| v.norm_sqr() * dx)
            .sum();
        if !(edge_mass <= EDGE_MASS_LIMIT) {
            return Err(EvolutionError::BoundaryEscape {
                time,
                mass: edge_mass,
            });
        }
        fields.push(field);
    }

    Ok(EvolutionTrace {
        fields,
        dt_out: params.dt_out(),
    })
}

/// Residual norm per interior snapshot time.
#[derive(Debug, Clone)]
pub struct ResidualSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ResidualSeries {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Value at the time closest to `t`.
    pub fn value_near(&self, t: f64) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.values)
            .min_by(|a, b| {
                (a.0 - t)
                    .abs()
                    .partial_cmp(&(b.0 - t).abs())
                    .expect("finite times")
            })
            .map(|(_, v)| *v)
    }
}

/// Convergence order measured between a coarse and a fine residual series,
/// compared at the time nearest the middle of the coarse series.
pub fn measured_order(coarse: &ResidualSeries, fine: &ResidualSeries, ratio: f64) -> f64 {
    let mid = coarse.times[coarse.times.len() / 2];
    let rc = coarse.value_near(mid).expect("nonempty series");
    let rf = fine.value_near(mid).expect("nonempty series");
    (rc / rf).ln() / ratio.ln()
}

/// Outer-product combination `sum_k c_k |u_k><v_k|`; its Frobenius norm is
/// computed from Gram matrices of dx-weighted inner products.
fn outer_combination_norm(terms: &[(Complex64, &[Complex64], &[Complex64])], dx: f64) -> f64 {
    let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>() * dx
    };
    let mut total = Complex64::ZERO;
    for (ck, uk, vk) in terms {
        for (cl, ul, vl) in terms {
            total += ck * cl.conj() * inner(ul, uk) * inner(vk, vl);
        }
    }
    total.re.max(0.0).sqrt()
}

fn central_difference(plus: &[Complex64], minus: &[Complex64], h: f64) -> Vec<Complex64> {
    plus.iter()
        .zip(minus)
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect()
}

fn require_snapshots(trace: &EvolutionTrace, needed: usize) -> Result<(), EvolutionError> {
    if trace.len() < needed {
        return Err(EvolutionError::InsufficientSnapshots {
            needed,
            got: trace.len(),
        });
    }
    Ok(())
}

/// Midpoint average and residual pieces shared by the equation residuals.
///
/// With `delta = (psi_+ - psi_-)/(2h)`, `mu = (psi_+ + psi_-)/2`, and
/// `nu = mu - psi`, the discrete density derivative factorizes exactly:
/// `(rho_+ - rho_-)/(2h) = delta mu* + mu delta*`.  Rearranging both
/// residual operators around the single small vector `w = i delta - H psi`
/// keeps every Gram entry at the scale of the residual itself, instead of
/// letting `1/(2h)`-sized terms cancel catastrophically.
struct ResidualVectors {
    psi: Vec<Complex64>,
    h_psi: Vec<Complex64>,
    delta: Vec<Complex64>,
    mu: Vec<Complex64>,
    nu: Vec<Complex64>,
    w: Vec<Complex64>,
}

fn residual_vectors(
    trace: &EvolutionTrace,
    h: &Hamiltonian,
    i: usize,
) -> Result<ResidualVectors, EvolutionError> {
    let hstep = trace.dt_out();
    let psi = trace.fields()[i].values().to_vec();
    let plus = trace.fields()[i + 1].values();
    let minus = trace.fields()[i - 1].values();
    let h_psi = apply_hamiltonian(&trace.fields()[i], h)?;
    let delta = central_difference(plus, minus, hstep);
    let mu: Vec<Complex64> = plus
        .iter()
        .zip(minus)
        .map(|(a, b)| (a + b) / 2.0)
        .collect();
    let nu: Vec<Complex64> = mu.iter().zip(&psi).map(|(m, p)| m - p).collect();
    let w: Vec<Complex64> = delta
        .iter()
        .zip(&h_psi)
        .map(|(d, hp)| Complex64::I * d - hp)
        .collect();
    Ok(ResidualVectors {
        psi,
        h_psi,
        delta,
        mu,
        nu,
        w,
    })
}

/// Residual of the commutator (Liouville) equation
/// `i d rho/dt - [H, rho] = 0` per interior snapshot, normalized by
/// `|rho|_F`.  The time derivative differences the rank-one density itself,
/// so stationary states cancel their global phase exactly; the operator is
/// evaluated in the equivalent form
/// `w mu* - mu w* + (H psi) nu* - nu (H psi)*`.
pub fn liouville_residual(
    trace: &EvolutionTrace,
    h: &Hamiltonian,
) -> Result<ResidualSeries, EvolutionError> {
    require_snapshots(trace, 3)?;
    let dx = trace.grid().spacing();
    let mut times = Vec::new();
    let mut values = Vec::new();
    for i in 1..trace.len() - 1 {
        let v = residual_vectors(trace, h, i)?;
        let terms: [(Complex64, &[Complex64], &[Complex64]); 4] = [
            (Complex64::ONE, &v.w, &v.mu),
            (-Complex64::ONE, &v.mu, &v.w),
            (Complex64::ONE, &v.h_psi, &v.nu),
            (-Complex64::ONE, &v.nu, &v.h_psi),
        ];
        let norm_rho = trace.fields()[i].norm().powi(2);
        times.push(trace.fields()[i].time());
        values.push(outer_combination_norm(&terms, dx) / norm_rho);
    }
    Ok(ResidualSeries { times, values })
}

/// Residual of the anticommutator (energy) equation
/// `i[(d psi/dt)<psi| - |psi>(d psi/dt)*] - (H|psi><psi| + |psi><psi|H) = 0`
/// per interior snapshot, normalized by `|rho|_F`.  Equivalent stable form:
/// `w psi* + psi w*` with `w = i d(psi)/dt - H psi`.
pub fn energy_equation_residual(
    trace: &EvolutionTrace,
    h: &Hamiltonian,
) -> Result<ResidualSeries, EvolutionError> {
    require_snapshots(trace, 3)?;
    let dx = trace.grid().spacing();
    let mut times = Vec::new();
    let mut values = Vec::new();
    for i in 1..trace.len() - 1 {
        let v = residual_vectors(trace, h, i)?;
        let terms: [(Complex64, &[Complex64], &[Complex64]); 2] = [
            (Complex64::ONE, &v.w, &v.psi),
            (Complex64::ONE, &v.psi, &v.w),
        ];
        let norm_rho = trace.fields()[i].norm().powi(2);
        times.push(trace.fields()[i].time());
        values.push(outer_combination_norm(&terms, dx) / norm_rho);
    }
    Ok(ResidualSeries { times, values })
}

/// Norm of the defect between the sum of the two equation residual
/// operators and the single-equation combination
/// `2(i d psi/dt - H psi)<psi|`.  The defect reduces exactly to
/// `i(delta nu* + nu delta*)`, which is second order in the output step:
/// splitting one evolution law into the commutator/anticommutator pair
/// costs nothing beyond time-differencing error.
pub fn pair_sum_defect(
    trace: &EvolutionTrace,
    h: &Hamiltonian,
) -> Result<ResidualSeries, EvolutionError> {
    require_snapshots(trace, 3)?;
    let dx = trace.grid().spacing();
    let mut times = Vec::new();
    let mut values = Vec::new();
    for i in 1..trace.len() - 1 {
        let v = residual_vectors(trace, h, i)?;
        let terms: [(Complex64, &[Complex64], &[Complex64]); 2] = [
            (Complex64::I, &v.delta, &v.nu),
            (Complex64::I, &v.nu, &v.delta),
        ];
        times.push(trace.fields()[i].time());
        values.push(outer_combination_norm(&terms, dx));
    }
    Ok(ResidualSeries { times, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn ground_grid() -> Grid {
        Grid::symmetric(12.0, 512).unwrap()
    }

    fn oscillator() -> Hamiltonian {
        Hamiltonian::harmonic(1.0, 1.0).unwrap()
    }

    #[test]
    fn packet_normalization_and_domain_check() {
        let grid = ground_grid();
        let f = gaussian_packet(&grid, 0.0, FRAC_1_SQRT_2, 0.0).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-12);
        assert!(matches!(
            gaussian_packet(&grid, 11.0, 1.0, 0.0),
            Err(EvolutionError::DomainOverflow { .. })
        ));
    }

    #[test]
    fn packet_with_unit_width_ratio_is_the_ground_state() {
        let grid = ground_grid();
        let packet = gaussian_packet(&grid, 0.0, FRAC_1_SQRT_2, 0.0).unwrap();
        let eigen = harmonic_eigenstate(&grid, 0, 1.0, 1.0).unwrap();
        let overlap = packet.inner(&eigen).unwrap().norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenstate_energies() {
        let grid = ground_grid();
        let h = oscillator();
        for n in 0..4 {
            let state = harmonic_eigenstate(&grid, n, 1.0, 1.0).unwrap();
            let e = energy_expectation(&state, &h).unwrap();
            assert!(
                (e - (n as f64 + 0.5)).abs() < 1e-10,
                "n={n}: E={e}"
            );
        }
    }

    #[test]
    fn ground_state_is_stationary() {
        let grid = ground_grid();
        let h = oscillator();
        let psi0 = harmonic_eigenstate(&grid, 0, 1.0, 1.0).unwrap();
        let params = EvolveParams {
            dt: 1e-3,
            steps_per_snapshot: 100,
            snapshots: 10,
        };
        let trace = evolve(&psi0, &h, &params).unwrap();
        assert!(trace.norm_drift() < 1e-9);
        let last = trace.fields().last().unwrap();
        let overlap = psi0.inner(last).unwrap().norm();
        assert!((overlap - 1.0).abs() < 1e-8, "overlap {overlap}");
    }

    #[test]
    fn coherent_state_center_follows_the_classical_orbit() {
        let grid = ground_grid();
        let h = oscillator();
        let psi0 = gaussian_packet(&grid, 2.0, FRAC_1_SQRT_2, 0.0).unwrap();
        let params = EvolveParams {
            dt: 1e-3,
            steps_per_snapshot: 314,
            snapshots: 10,
        };
        let trace = evolve(&psi0, &h, &params).unwrap();
        // t = pi after 10 snapshots of 0.314 plus 0.0016 correction below.
        for field in trace.fields() {
            let expect = 2.0 * field.time().cos();
            assert!(
                (field.coordinate_mean() - expect).abs() < 2e-3,
                "t={} mean={} expect={}",
                field.time(),
                field.coordinate_mean(),
                expect
            );
        }
    }

    #[test]
    fn free_packet_spreads_analytically() {
        let grid = Grid::symmetric(24.0, 1024).unwrap();
        let h = Hamiltonian::free(1.0).unwrap();
        let s = 1.0;
        let psi0 = gaussian_packet(&grid, 0.0, s, 0.0).unwrap();
        let params = EvolveParams {
            dt: 1e-3,
            steps_per_snapshot: 250,
            snapshots: 8,
        };
        let trace = evolve(&psi0, &h, &params).unwrap();
        for field in trace.fields() {
            let t = field.time();
            let expect = s * (1.0 + (t / (2.0 * s * s)).powi(2)).sqrt();
            assert!(
                (field.coordinate_std() - expect).abs() < 1e-3,
                "t={t}: std={} expect={expect}",
                field.coordinate_std()
            );
        }
    }

    #[test]
    fn energy_is_conserved_along_traces() {
        let grid = ground_grid();
        for h in [
            oscillator(),
            Hamiltonian::new(
                1.0,
                Potential::Cubic {
                    stiffness: 1.0,
                    cubic: 0.05,
                },
            )
            .unwrap(),
        ] {
            let psi0 = gaussian_packet(&grid, 1.0, FRAC_1_SQRT_2, 0.0).unwrap();
            let params = EvolveParams {
                dt: 5e-4,
                steps_per_snapshot: 200,
                snapshots: 10,
            };
            let trace = evolve(&psi0, &h, &params).unwrap();
            let e0 = energy_expectation(&trace.fields()[0], &h).unwrap();
            for f in trace.fields() {
                let e = energy_expectation(f, &h).unwrap();
                assert!(((e - e0) / e0).abs() < 1e-6, "relative drift {}", (e - e0) / e0);
            }
        }
    }

    #[test]
    fn stationary_residuals_vanish() {
        let grid = ground_grid();
        let h = oscillator();
        let psi0 = harmonic_eigenstate(&grid, 0, 1.0, 1.0).unwrap();
        let params = EvolveParams {
            dt: 1e-5,
            steps_per_snapshot: 10,
            snapshots: 4,
        };
        let trace = evolve(&psi0, &h, &params).unwrap();
        let liouville = liouville_residual(&trace, &h).unwrap();
        assert!(liouville.max() < 1e-8, "liouville {:.3e}", liouville.max());
        let energy = energy_equation_residual(&trace, &h).unwrap();
        assert!(energy.max() < 1e-8, "energy {:.3e}", energy.max());
    }

    #[test]
    fn coherent_residuals_converge_at_second_order() {
        let grid = ground_grid();
        let h = oscillator();
        let psi0 = gaussian_packet(&grid, 1.0, FRAC_1_SQRT_2, 0.0).unwrap();
        let params = EvolveParams {
            dt: 2.5e-4,
            steps_per_snapshot: 10,
            snapshots: 40,
        };
        let trace = evolve(&psi0, &h, &params).unwrap();
        let coarse = trace.strided(4).unwrap(); // dt_out = 1e-2
        let fine = trace.strided(2).unwrap(); // dt_out = 5e-3

        for make in [liouville_residual, energy_equation_residual] {
            let rc = make(&coarse, &h).unwrap();
            let rf = make(&fine, &h).unwrap();
            assert!(rc.max() < 1e-3, "coarse residual {:.3e}", rc.max());
            let order = measured_order(&rc, &rf, 2.0);
            assert!(
                (1.8..=2.2).contains(&order),
                "order {order:.3} outside [1.8, 2.2]"
            );
        }
    }

    #[test]
    fn pair_sum_defect_is_second_order() {
        let grid = ground_grid();
        let h = oscillator();
        let psi0 = gaussian_packet(&grid, 2.0, FRAC_1_SQRT_2, 0.0).unwrap();
        let params = EvolveParams {
            dt: 2.5e-4,
            steps_per_snapshot: 20,
            snapshots: 20,
        };
        let trace = evolve(&psi0, &h, &params).unwrap();
        let coarse = pair_sum_defect(&trace.strided(2).unwrap(), &h).unwrap();
        let fine = pair_sum_defect(&trace, &h).unwrap();
        let order = measured_order(&coarse, &fine, 2.0);
        assert!((1.7..=2.3).contains(&order), "order {order:.3}");
    }

    #[test]
    fn too_few_snapshots_is_an_error() {
        let grid = ground_grid();
        let h = oscillator();
        let psi0 = harmonic_eigenstate(&grid, 0, 1.0, 1.0).unwrap();
        let params = EvolveParams {
            dt: 1e-3,
            steps_per_snapshot: 10,
            snapshots: 1,
        };
        let trace = evolve(&psi0, &h, &params).unwrap();
        assert!(matches!(
            liouville_residual(&trace, &h),
            Err(EvolutionError::InsufficientSnapshots { .. })
        ));
    }

    #[test]
    fn escaping_packet_raises_instability() {
        let grid = Grid::symmetric(8.0, 256).unwrap();
        // Strong downhill cubic pushes the packet into the boundary.
        let h = Hamiltonian::new(
            1.0,
            Potential::Cubic {
                stiffness: 0.0,
                cubic: -1.5,
            },
        )
        .unwrap();
        let psi0 = gaussian_packet(&grid, 1.0, FRAC_1_SQRT_2, 1.0).unwrap();
        let params = EvolveParams {
            dt: 1e-3,
            steps_per_snapshot: 400,
            snapshots: 20,
        };
        let err = evolve(&psi0, &h, &params);
        assert!(
            matches!(
                err,
                Err(EvolutionError::BoundaryEscape { .. }) | Err(EvolutionError::Instability { .. })
            ),
            "expected escape, got {err:?}"
        );
    }

    #[test]
    fn half_period_returns_mirror_image() {
        let grid = ground_grid();
        let h = oscillator();
        let psi0 = gaussian_packet(&grid, 2.0, FRAC_1_SQRT_2, 0.0).unwrap();
        let steps = (PI / 1e-3).round() as usize;
        let params = EvolveParams {
            dt: PI / steps as f64,
            steps_per_snapshot: steps,
            snapshots: 1,
        };
        let trace = evolve(&psi0, &h, &params).unwrap();
        let final_mean = trace.fields()[1].coordinate_mean();
        assert!((final_mean + 2.0).abs() < 1e-3, "mean {final_mean}");
    }
}
