//! Primitive idempotents, minimal left ideals, and algebraic spinors in the
//! Pauli algebra `C(3,0)`.
//!
//! An algebraic spinor is an element of a minimal left ideal generated by a
//! primitive idempotent `E = (1 + n.sigma)/2`.  In the z-axis gauge the
//! ideal is spanned over the reals by `{1, e23, e13, e12} . E`, and the four
//! real components translate to and from the usual two-component column
//! spinor.  The density element `rho = Psi Psi~` is the algebraic analogue
//! of the pure-state density matrix.

use crate::clifford::{from_matrix, matrix_rep, pauli_signature, trace, Multivector};
use nalgebra::Matrix2;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpinorError {
    #[error("axis ({0}, {1}, {2}) is not a unit vector")]
    NonUnitAxis(f64, f64, f64),
    #[error("operation is stated in the z-axis gauge; idempotent axis is ({0}, {1}, {2})")]
    WrongIdempotent(f64, f64, f64),
    #[error("element is not a member of the ideal: |x E - x| = {0:.3e}")]
    IdealMembership(f64),
    #[error("spinor is not normalized: | |psi|^2 - 1 | = {0:.3e}")]
    NotNormalized(f64),
    #[error("cannot polar-decompose the zero spinor")]
    ZeroSpinor,
}

const UNIT_AXIS_TOL: f64 = 1e-12;
const NORMALIZATION_TOL: f64 = 1e-9;

/// Primitive idempotent `E = (1 + n.sigma)/2` for a unit axis `n`.
#[derive(Debug, Clone)]
pub struct Idempotent {
    element: Multivector,
    axis: [f64; 3],
}

impl Idempotent {
    /// Standard idempotent along a unit axis.
    pub fn from_axis(axis: [f64; 3]) -> Result<Self, SpinorError> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if (norm - 1.0).abs() > UNIT_AXIS_TOL {
            return Err(SpinorError::NonUnitAxis(axis[0], axis[1], axis[2]));
        }
        let sig = pauli_signature();
        let mut element = Multivector::scalar(sig, Complex64::new(0.5, 0.0));
        for (i, n) in axis.iter().enumerate() {
            element = element
                .add(&Multivector::generator(sig, i as u32 + 1).scale(Complex64::new(n / 2.0, 0.0)))
                .expect("same signature");
        }
        Ok(Self { element, axis })
    }

    /// The conventional choice: spin projected along `+z`.
    pub fn z_axis() -> Self {
        Self::from_axis([0.0, 0.0, 1.0]).expect("unit axis")
    }

    pub fn element(&self) -> &Multivector {
        &self.element
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn is_z_axis(&self) -> bool {
        self.axis == [0.0, 0.0, 1.0]
    }
}

/// Two-component column spinor `(psi1, psi2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnSpinor {
    pub upper: Complex64,
    pub lower: Complex64,
}

impl ColumnSpinor {
    pub fn new(upper: Complex64, lower: Complex64) -> Self {
        Self { upper, lower }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.upper.norm_sqr() + self.lower.norm_sqr()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self {
            upper: self.upper / n,
            lower: self.lower / n,
        }
    }
}

/// Element of the minimal left ideal defined by an idempotent:
/// `(g0 + g1 e23 + g2 e13 + g3 e12) E` with real components `g`.
#[derive(Debug, Clone)]
pub struct AlgebraicSpinor {
    element: Multivector,
    components: [f64; 4],
    idempotent: Idempotent,
}

/// Blade masks of the even-subalgebra basis `{1, e23, e13, e12}` that spans
/// the ideal over the reals.
const ROTOR_BASIS: [u32; 4] = [0b000, 0b110, 0b101, 0b011];

impl AlgebraicSpinor {
    /// Builds the ideal element from its four real rotor-basis components.
    pub fn from_components(components: [f64; 4], idempotent: Idempotent) -> Self {
        let sig = pauli_signature();
        let mut even = Multivector::zero(sig);
        for (mask, g) in ROTOR_BASIS.iter().zip(components.iter()) {
            even.set_coeff(*mask, Complex64::new(*g, 0.0));
        }
        let element = even
            .product(idempotent.element())
            .expect("same signature");
        Self {
            element,
            components,
            idempotent,
        }
    }

    /// Translates a column spinor into the ideal, in the z-axis gauge where
    /// the dictionary is stated.
    pub fn from_column(psi: &ColumnSpinor, idempotent: Idempotent) -> Result<Self, SpinorError> {
        if !idempotent.is_z_axis() {
            let [x, y, z] = idempotent.axis();
            return Err(SpinorError::WrongIdempotent(x, y, z));
        }
        let g0 = (psi.upper.conj() + psi.upper).re / 2.0;
        let g1 = ((psi.lower.conj() - psi.lower) * Complex64::I).re / 2.0;
        let g2 = (psi.lower.conj() + psi.lower).re / 2.0;
        let g3 = ((psi.upper.conj() - psi.upper) * Complex64::I).re / 2.0;
        Ok(Self::from_components([g0, g1, g2, g3], idempotent))
    }

    /// Inverse dictionary: recovers the column spinor.  With the components
    /// as defined by `from_column`, `psi1 = g0 + i g3` and `psi2 = g2 + i g1`.
    pub fn to_column(&self) -> ColumnSpinor {
        let [g0, g1, g2, g3] = self.components;
        ColumnSpinor::new(Complex64::new(g0, g3), Complex64::new(g2, g1))
    }

    pub fn element(&self) -> &Multivector {
        &self.element
    }

    pub fn components(&self) -> [f64; 4] {
        self.components
    }

    pub fn idempotent(&self) -> &Idempotent {
        &self.idempotent
    }

    /// Checks right-multiplication invariance `Psi E = Psi`, the defining
    /// property of ideal membership.
    pub fn ideal_defect(&self) -> f64 {
        let projected = self
            .element
            .product(self.idempotent.element())
            .expect("same signature");
        projected.distance(&self.element)
    }

    /// Density element `rho = Psi Psi~`.  Requires a normalized spinor so
    /// that the result is a pure-state element with unit trace.
    pub fn density_element(&self) -> Result<DensityElement, SpinorError> {
        let column = self.to_column();
        let defect = (column.norm_sqr() - 1.0).abs();
        if defect > NORMALIZATION_TOL {
            return Err(SpinorError::NotNormalized(defect));
        }
        let element = self
            .element
            .product(&self.element.tilde())
            .expect("same signature");
        Ok(DensityElement {
            element,
            axis: self.idempotent.axis(),
        })
    }

    /// Polar decomposition `Psi = R U` computed through the singular value
    /// decomposition of the 2x2 matrix representation.  `R` is the positive
    /// semi-definite factor; `U` is unitary.  Every ideal element has a
    /// rank-deficient representation (the right factor `E` kills one
    /// column), so `U` is flagged non-unique whenever a singular value
    /// vanishes at working precision.
    pub fn polar_decompose(&self) -> Result<PolarDecomposition, SpinorError> {
        let m = matrix_rep(&self.element).expect("pauli signature");
        if m.norm() == 0.0 {
            return Err(SpinorError::ZeroSpinor);
        }
        let svd = m.svd(true, true);
        let u = svd.u.expect("requested");
        let v_t = svd.v_t.expect("requested");
        let s = svd.singular_values;
        let mut diag = Matrix2::zeros();
        diag[(0, 0)] = Complex64::new(s[0], 0.0);
        diag[(1, 1)] = Complex64::new(s[1], 0.0);
        let positive = u * diag * u.adjoint();
        let unitary = u * v_t;
        let unique = s[1] > 1e-12 * s[0].max(1.0);
        Ok(PolarDecomposition {
            positive: from_matrix(&positive),
            unitary: from_matrix(&unitary),
            unique,
        })
    }
}

/// Result of [`AlgebraicSpinor::polar_decompose`].
#[derive(Debug, Clone)]
pub struct PolarDecomposition {
    /// Positive semi-definite factor (Hermitian under the tilde involution).
    pub positive: Multivector,
    /// Unitary factor; arbitrary on the kernel when `unique` is false.
    pub unitary: Multivector,
    /// False when the input is rank-deficient and `U` carries gauge freedom.
    pub unique: bool,
}

/// Pure-state density element `rho = Psi Psi~`.
#[derive(Debug, Clone)]
pub struct DensityElement {
    element: Multivector,
    axis: [f64; 3],
}

impl DensityElement {
    /// Wraps an arbitrary multivector as a density element without the
    /// pure-state construction; purity is then a property to test, not an
    /// invariant.  Used for mixed-state probes such as `1/2`.
    pub fn from_multivector(element: Multivector, axis: [f64; 3]) -> Self {
        Self { element, axis }
    }

    pub fn element(&self) -> &Multivector {
        &self.element
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    /// Hermiticity defect under the tilde involution.
    pub fn hermiticity_defect(&self) -> f64 {
        self.element.tilde().distance(&self.element)
    }

    pub fn trace(&self) -> Complex64 {
        trace(&self.element).expect("pauli signature")
    }

    /// True when `rho^2 = rho` to within `tol` in the blade max-norm.
    pub fn is_pure(&self, tol: f64) -> bool {
        let squared = self.element.product(&self.element).expect("same signature");
        squared.distance(&self.element) < tol
    }
}

/// Rotor carrying the `+z` axis onto `axis`: `R E_z R~ = E_axis`.
///
/// For `axis = -z` the rotation plane is degenerate; a half-turn about `x`
/// is used.
pub fn rotor_z_to(axis: [f64; 3]) -> Result<Multivector, SpinorError> {
    let [x, y, z] = axis;
    let norm = (x * x + y * y + z * z).sqrt();
    if (norm - 1.0).abs() > UNIT_AXIS_TOL {
        return Err(SpinorError::NonUnitAxis(x, y, z));
    }
    let sig = pauli_signature();
    if z < -1.0 + 1e-14 {
        // Half-turn about x: R = e1 e3 (up to sign), since (e13)(e3)(e13)~ = -e3.
        return Ok(Multivector::basis_blade(sig, 0b101));
    }
    // R = (1 + n.sigma sigma3) / sqrt(2 (1 + n_z)) rotates z onto n.
    let n_dot_sigma = {
        let mut v = Multivector::zero(sig);
        v.set_coeff(0b001, Complex64::new(x, 0.0));
        v.set_coeff(0b010, Complex64::new(y, 0.0));
        v.set_coeff(0b100, Complex64::new(z, 0.0));
        v
    };
    let e3 = Multivector::generator(sig, 3);
    let numerator = Multivector::scalar(sig, Complex64::ONE)
        .add(&n_dot_sigma.product(&e3).expect("same signature"))
        .expect("same signature");
    let scale = 1.0 / (2.0 * (1.0 + z)).sqrt();
    Ok(numerator.scale(Complex64::new(scale, 0.0)))
}
