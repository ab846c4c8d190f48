//! Algebraic quantum mechanics on Clifford algebras, with the projected
//! ("explicate") phase-space dynamics that follows from it.
//!
//! The crate is organised in layers:
//!
//! - [`clifford`]: generic finite-dimensional Clifford algebras `C(p,q)` over
//!   the complex field — blades, geometric product, involutions, and the 2x2
//!   Pauli matrix representation of `C(3,0)`.
//! - [`spinor`]: primitive idempotents, minimal left ideals, the dictionary
//!   between column spinors and algebraic spinors, polar decomposition, and
//!   pure-state density elements.
//! - [`grid`] / [`evolution`]: one-dimensional wavefields on uniform grids,
//!   split-step unitary evolution, and operator-level residuals for the
//!   commutator (Liouville) and anticommutator (energy) time-development
//!   equations.
//! - [`explicate`]: projection onto position/momentum representations —
//!   polar fields, quantum potential, continuity and quantum Hamilton-Jacobi
//!   residuals, and the closure check tying the projected equations back to
//!   the operator forms.
//! - [`bohm`]: local-momentum fields and trajectory integration, ensembles,
//!   and equivariance statistics.
//! - [`logic`]: finite orthomodular lattices of projections, Boolean blocks,
//!   and sequential (Lüders) filtering.
//! - [`export`]: CSV writers for traces, frames, and trajectories.
//!
//! Everything is a pure function over immutable values; all types are safe
//! to share across threads.

pub mod bohm;
pub mod clifford;
pub mod evolution;
pub mod explicate;
pub mod export;
pub mod grid;
pub mod logic;
pub mod spinor;

pub use clifford::{AlgebraTable, CliffordError, Multivector, Signature};
pub use evolution::{
    EvolutionError, EvolutionTrace, EvolveParams, Hamiltonian, Potential, ResidualSeries,
};
pub use explicate::{ExplicateError, ExplicateFrame, PolarField};
pub use grid::{Grid, GridError, Representation, WaveField};
pub use logic::{LogicError, Projection, ProjectionLattice};
pub use spinor::{AlgebraicSpinor, ColumnSpinor, DensityElement, Idempotent, SpinorError};
