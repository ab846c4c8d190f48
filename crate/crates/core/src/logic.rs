//! Projection logic: finite orthomodular lattices of Hermitian idempotent
//! matrices, Boolean blocks, the distributivity counterexample, and
//! sequential (Lüders) filtering.
//!
//! Projections play the role of propositions: eigenvalues 0 and 1 encode
//! falsity and truth, commuting projections generate Boolean sublattices,
//! and non-commuting ones break distributivity while keeping the
//! orthomodular law intact.

use crate::clifford::matrix_rep;
use crate::spinor::{ColumnSpinor, Idempotent, SpinorError};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LogicError {
    #[error("projection dimension {0} unsupported (expected 2 or 4)")]
    UnsupportedDimension(usize),
    #[error("matrix is not Hermitian: defect {0:.3e}")]
    NotHermitian(f64),
    #[error("matrix is not idempotent: defect {0:.3e}")]
    NotIdempotent(f64),
    #[error("operands have mismatched dimensions {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("axis ({0}, {1}, {2}) is not a unit vector")]
    NonUnitAxis(f64, f64, f64),
    #[error("lattice closure exceeded the {0}-element budget")]
    ClosureOverflow(usize),
    #[error("lattice is not closed: {0} products missing under {1}")]
    NotClosed(usize, &'static str),
    #[error("filter stage {stage} annihilates the state (probability {probability:.3e})")]
    ZeroProbabilityStage { stage: usize, probability: f64 },
    #[error("state is not normalized: trace defect {0:.3e}")]
    NotNormalized(f64),
}

const CONSTRUCTION_TOL: f64 = 1e-12;
const NULL_SPACE_TOL: f64 = 1e-10;
const EQUALITY_TOL: f64 = 1e-8;
/// Hard cap on lattice closure; generic non-commuting generators can
/// generate infinite lattices, so running past this is reported, never
/// truncated silently.
pub const CLOSURE_BUDGET: usize = 64;

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Hermitian idempotent matrix with an optional human-readable label.
#[derive(Debug, Clone)]
pub struct Projection {
    matrix: DMatrix<Complex64>,
    label: Option<String>,
}

impl Projection {
    /// Validates Hermiticity and idempotency at construction.  Both bounds
    /// together pin the eigenvalues to {0, 1} within the same tolerance.
    pub fn new(matrix: DMatrix<Complex64>, label: Option<String>) -> Result<Self, LogicError> {
        let d = matrix.nrows();
        if d != matrix.ncols() || !(d == 2 || d == 4) {
            return Err(LogicError::UnsupportedDimension(d));
        }
        let herm_defect = max_abs(&(&matrix - matrix.adjoint()));
        if herm_defect > CONSTRUCTION_TOL {
            return Err(LogicError::NotHermitian(herm_defect));
        }
        let idem_defect = max_abs(&(&matrix * &matrix - &matrix));
        if idem_defect > CONSTRUCTION_TOL {
            return Err(LogicError::NotIdempotent(idem_defect));
        }
        Ok(Self { matrix, label })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
            label: Some("0".into()),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
            label: Some("I".into()),
        }
    }

    /// Spin projection `(I ± n.sigma)/2` along a unit axis; coincides with
    /// the matrix representation of the standard idempotent.
    pub fn from_axis(axis: [f64; 3], positive: bool) -> Result<Self, LogicError> {
        let signed = if positive {
            axis
        } else {
            [-axis[0], -axis[1], -axis[2]]
        };
        let idem = Idempotent::from_axis(signed).map_err(|e| match e {
            SpinorError::NonUnitAxis(x, y, z) => LogicError::NonUnitAxis(x, y, z),
            _ => unreachable!(),
        })?;
        let m = matrix_rep(idem.element()).expect("pauli signature");
        let matrix = DMatrix::from_fn(2, 2, |r, c| m[(r, c)]);
        Ok(Self {
            matrix,
            label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        // Eigenvalues are 0/1, so the trace counts the range dimension.
        let t: Complex64 = self.matrix.diagonal().iter().sum();
        t.re.round() as usize
    }

    fn check_dim(&self, other: &Self) -> Result<(), LogicError> {
        if self.dim() != other.dim() {
            Err(LogicError::DimensionMismatch(self.dim(), other.dim()))
        } else {
            Ok(())
        }
    }

    /// Orthocomplement `I - P`.
    pub fn complement(&self) -> Self {
        let matrix = DMatrix::identity(self.dim(), self.dim()) - &self.matrix;
        Self {
            matrix,
            label: self.label.as_ref().map(|l| format!("~{l}")),
        }
    }

    /// Meet: projection onto `range(P) ∩ range(Q)`, computed as the null
    /// space of `(I - P) + (I - Q)` (a Hermitian PSD matrix whose kernel is
    /// exactly the common range).
    pub fn meet(&self, other: &Self) -> Result<Self, LogicError> {
        self.check_dim(other)?;
        let d = self.dim();
        let m = self.complement().matrix + other.complement().matrix;
        let eig = SymmetricEigen::new(m);
        let mut out = DMatrix::<Complex64>::zeros(d, d);
        for (k, lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda.abs() < NULL_SPACE_TOL {
                let v = eig.eigenvectors.column(k);
                out += v * v.adjoint();
            }
        }
        // Round away eigensolver noise so downstream validation stays exact.
        Projection::new(symmetrize(out), None)
    }

    /// Join via De Morgan: `P ∨ Q = ~(~P ∧ ~Q)`.
    pub fn join(&self, other: &Self) -> Result<Self, LogicError> {
        Ok(self.complement().meet(&other.complement())?.complement())
    }

    /// Lattice order `P ≤ Q`, i.e. `QP = P`.
    pub fn leq(&self, other: &Self) -> bool {
        max_abs(&(&other.matrix * &self.matrix - &self.matrix)) < EQUALITY_TOL
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        max_abs(&(&self.matrix * &other.matrix - &other.matrix * &self.matrix)) < EQUALITY_TOL
    }

    pub fn distance(&self, other: &Self) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }

    /// Expectation value `tr(rho P)`: the "degree of existence" a state
    /// assigns to the proposition; lands in [0, 1].
    pub fn expectation(&self, rho: &DMatrix<Complex64>) -> f64 {
        (rho * &self.matrix).diagonal().iter().sum::<Complex64>().re
    }
}

fn symmetrize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let adj = m.adjoint();
    (m + adj).map(|c| {
        let c = c / 2.0;
        // Snap coefficients that are exact dyadics up to eigensolver noise.
        let snap = |x: f64| {
            for target in [-1.0, -0.5, 0.0, 0.5, 1.0] {
                if (x - target).abs() < 1e-13 {
                    return target;
                }
            }
            x
        };
        Complex64::new(snap(c.re), snap(c.im))
    })
}

/// Finite set of projections containing 0 and I and closed under meet,
/// join, and orthocomplement.
#[derive(Debug, Clone)]
pub struct ProjectionLattice {
    elements: Vec<Projection>,
}

impl ProjectionLattice {
    /// Closes a generating set under the three lattice operations, erroring
    /// out if the closure would exceed [`CLOSURE_BUDGET`] elements.
    pub fn generate(generators: &[Projection]) -> Result<Self, LogicError> {
        let dim = generators
            .first()
            .map(Projection::dim)
            .ok_or(LogicError::UnsupportedDimension(0))?;
        for g in generators {
            if g.dim() != dim {
                return Err(LogicError::DimensionMismatch(dim, g.dim()));
            }
        }
        let mut elements = vec![Projection::zero(dim), Projection::identity(dim)];
        for g in generators {
            if !elements.iter().any(|e| e.distance(g) < EQUALITY_TOL) {
                elements.push(g.clone());
            }
        }
        loop {
            let mut added: Vec<Projection> = Vec::new();
            {
                let known = |elements: &[Projection], added: &[Projection], p: &Projection| {
                    elements
                        .iter()
                        .chain(added.iter())
                        .any(|e| e.distance(p) < EQUALITY_TOL)
                };
                let n = elements.len();
                for i in 0..n {
                    let c = elements[i].complement();
                    if !known(&elements, &added, &c) {
                        added.push(c);
                    }
                    for j in 0..n {
                        for candidate in
                            [elements[i].meet(&elements[j])?, elements[i].join(&elements[j])?]
                        {
                            if !known(&elements, &added, &candidate) {
                                added.push(candidate);
                            }
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            for p in added {
                elements.push(p);
                if elements.len() > CLOSURE_BUDGET {
                    return Err(LogicError::ClosureOverflow(CLOSURE_BUDGET));
                }
            }
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[Projection] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    fn index_of(&self, p: &Projection) -> Option<usize> {
        self.elements
            .iter()
            .position(|e| e.distance(p) < EQUALITY_TOL)
    }

    fn verify_closed(&self) -> Result<(), LogicError> {
        let mut missing_meet = 0;
        let mut missing_join = 0;
        for a in &self.elements {
            for b in &self.elements {
                if self.index_of(&a.meet(b)?).is_none() {
                    missing_meet += 1;
                }
                if self.index_of(&a.join(b)?).is_none() {
                    missing_join += 1;
                }
            }
        }
        if missing_meet > 0 {
            return Err(LogicError::NotClosed(missing_meet, "meet"));
        }
        if missing_join > 0 {
            return Err(LogicError::NotClosed(missing_join, "join"));
        }
        Ok(())
    }

    /// Verifies the orthomodular law `P ≤ Q  ⇒  Q = P ∨ (Q ∧ P^⊥)` on every
    /// comparable pair.
    pub fn orthomodular_check(&self) -> Result<OrthomodularReport, LogicError> {
        self.verify_closed()?;
        let mut pairs_checked = 0;
        let mut violations = Vec::new();
        let mut max_defect = 0.0_f64;
        for (i, p) in self.elements.iter().enumerate() {
            for (j, q) in self.elements.iter().enumerate() {
                if !p.leq(q) {
                    continue;
                }
                pairs_checked += 1;
                let rebuilt = p.join(&q.meet(&p.complement())?)?;
                let defect = rebuilt.distance(q);
                max_defect = max_defect.max(defect);
                if defect > EQUALITY_TOL {
                    violations.push((i, j, defect));
                }
            }
        }
        Ok(OrthomodularReport {
            pairs_checked,
            max_defect,
            violations,
        })
    }

    /// Maximal mutually-commuting subsets (cliques of the commutation
    /// graph), each verified distributive over all of its triples.
    pub fn boolean_blocks(&self) -> Result<Vec<BooleanBlock>, LogicError> {
        let n = self.elements.len();
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                adj[i][j] = i != j && self.elements[i].commutes_with(&self.elements[j]);
            }
        }
        let mut cliques = Vec::new();
        bron_kerbosch(
            &adj,
            &mut Vec::new(),
            (0..n).collect(),
            Vec::new(),
            &mut cliques,
        );
        let mut blocks = Vec::new();
        for mut members in cliques {
            members.sort_unstable();
            let mut max_distributivity_defect = 0.0_f64;
            for &a in &members {
                for &b in &members {
                    for &c in &members {
                        let lhs =
                            self.elements[a].meet(&self.elements[b].join(&self.elements[c])?)?;
                        let rhs = self.elements[a]
                            .meet(&self.elements[b])?
                            .join(&self.elements[a].meet(&self.elements[c])?)?;
                        max_distributivity_defect =
                            max_distributivity_defect.max(lhs.distance(&rhs));
                    }
                }
            }
            blocks.push(BooleanBlock {
                members,
                max_distributivity_defect,
            });
        }
        blocks.sort_by(|a, b| a.members.cmp(&b.members));
        Ok(blocks)
    }
}

/// Result of [`ProjectionLattice::orthomodular_check`].
#[derive(Debug, Clone)]
pub struct OrthomodularReport {
    pub pairs_checked: usize,
    pub max_defect: f64,
    /// `(i, j, defect)` for comparable pairs violating the law.
    pub violations: Vec<(usize, usize, f64)>,
}

impl OrthomodularReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A maximal mutually-commuting sublattice with its measured worst-case
/// distributivity defect (zero for a genuine Boolean block).
#[derive(Debug, Clone)]
pub struct BooleanBlock {
    pub members: Vec<usize>,
    pub max_distributivity_defect: f64,
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: &mut Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    while let Some(v) = p.first().copied() {
        r.push(v);
        let p_next = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let x_next = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r, p_next, x_next, out);
        r.pop();
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// The standard witness that distributivity fails: `A = P_z+`, `B = P_x+`,
/// `C = P_x-` give `A ∧ (B ∨ C) = A` but `(A ∧ B) ∨ (A ∧ C) = 0`.
#[derive(Debug, Clone)]
pub struct DistributivityCounterexample {
    pub a: Projection,
    pub b: Projection,
    pub c: Projection,
    pub lhs: Projection,
    pub rhs: Projection,
    /// Max-norm separation between the two sides.
    pub separation: f64,
}

pub fn distributivity_counterexample() -> Result<DistributivityCounterexample, LogicError> {
    let a = Projection::from_axis([0.0, 0.0, 1.0], true)?.with_label("z+");
    let b = Projection::from_axis([1.0, 0.0, 0.0], true)?.with_label("x+");
    let c = Projection::from_axis([1.0, 0.0, 0.0], false)?.with_label("x-");
    let lhs = a.meet(&b.join(&c)?)?;
    let rhs = a.meet(&b)?.join(&a.meet(&c)?)?;
    let separation = lhs.distance(&rhs);
    Ok(DistributivityCounterexample {
        a,
        b,
        c,
        lhs,
        rhs,
        separation,
    })
}

/// Outcome of a sequential projective filter chain.
#[derive(Debug, Clone)]
pub struct FilterOutcome {
    /// Conditional pass probability at each stage.
    pub probabilities: Vec<f64>,
    /// Lüders-updated state after the final stage.
    pub final_state: DMatrix<Complex64>,
}

/// Applies an ordered chain of projective filters to a density matrix with
/// the Lüders update rule: probability `tr(P rho P)`, state
/// `P rho P / tr(P rho P)` at each stage.
pub fn sequential_filter(
    filters: &[Projection],
    state: &DMatrix<Complex64>,
) -> Result<FilterOutcome, LogicError> {
    let trace: Complex64 = state.diagonal().iter().sum();
    if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-12 {
        return Err(LogicError::NotNormalized((trace - Complex64::ONE).norm()));
    }
    let mut rho = state.clone();
    let mut probabilities = Vec::with_capacity(filters.len());
    for (stage, filter) in filters.iter().enumerate() {
        if filter.dim() != rho.nrows() {
            return Err(LogicError::DimensionMismatch(filter.dim(), rho.nrows()));
        }
        let updated = filter.matrix() * &rho * filter.matrix();
        let p: Complex64 = updated.diagonal().iter().sum();
        let probability = p.re;
        if probability < 1e-12 {
            return Err(LogicError::ZeroProbabilityStage { stage, probability });
        }
        rho = updated / Complex64::from(probability);
        probabilities.push(probability);
    }
    Ok(FilterOutcome {
        probabilities,
        final_state: rho,
    })
}

/// Density matrix of a pure column spinor.
pub fn pure_state(psi: &ColumnSpinor) -> DMatrix<Complex64> {
    let n = psi.norm_sqr().sqrt();
    let up = psi.upper / n;
    let low = psi.lower / n;
    DMatrix::from_row_slice(
        2,
        2,
        &[
            up * up.conj(),
            up * low.conj(),
            low * up.conj(),
            low * low.conj(),
        ],
    )
}

/// Maximally mixed state `I/d`.
pub fn mixed_state(dim: usize) -> DMatrix<Complex64> {
    DMatrix::identity(dim, dim) / Complex64::from(dim as f64)
}
