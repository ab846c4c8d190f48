//! Finite-dimensional Clifford algebras `C(p,q)` over the complex field.
//!
//! Basis blades are encoded as bitmasks over the generators, kept in
//! canonical ascending order: bit `i` set means generator `e_{i+1}` is a
//! factor of the blade.  The product of two blades is the XOR of their masks
//! with a sign determined by counting transpositions and by the squares of
//! the generators shared by both factors.  This gives `O(1)` blade products
//! and a dense `2^(p+q)`-coefficient multivector representation, which is
//! plenty for the signatures supported here (`p + q <= 6`).

use nalgebra::Matrix2;
use num_complex::Complex64;
use std::fmt;
use thiserror::Error;

/// Largest supported number of generators.
pub const MAX_GENERATORS: u32 = 6;

#[derive(Debug, Error, PartialEq)]
pub enum CliffordError {
    #[error("signature ({p},{q}) has {} generators, maximum is {MAX_GENERATORS}", p + q)]
    SignatureTooLarge { p: u32, q: u32 },
    #[error("operands have mismatched signatures {0} and {1}")]
    SignatureMismatch(Signature, Signature),
    #[error("operation requires signature {expected}, got {got}")]
    UnsupportedSignature { expected: Signature, got: Signature },
    #[error("grade {grade} out of range for signature {sig}")]
    GradeOutOfRange { grade: u32, sig: Signature },
}

/// Signature of a Clifford algebra: `p` generators squaring to `+1`,
/// `q` squaring to `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    p: u32,
    q: u32,
}

impl Signature {
    pub fn new(p: u32, q: u32) -> Result<Self, CliffordError> {
        if p + q > MAX_GENERATORS {
            return Err(CliffordError::SignatureTooLarge { p, q });
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Number of generators.
    pub fn dim(&self) -> u32 {
        self.p + self.q
    }

    /// Number of basis blades, `2^(p+q)`.
    pub fn blade_count(&self) -> usize {
        1 << self.dim()
    }

    /// Square of generator `i` (0-based): `+1` for `i < p`, `-1` otherwise.
    pub fn generator_square(&self, i: u32) -> f64 {
        if i < self.p {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({},{})", self.p, self.q)
    }
}

/// Product of two canonical blades: result mask is `a ^ b`, sign from the
/// transpositions needed to merge the factors plus the metric signs of the
/// generators they share.
pub fn blade_product(sig: Signature, a: u32, b: u32) -> (u32, f64) {
    let mut sign = 1.0_f64;
    // Count generators of `a` that each generator of `b` must move past.
    let mut swaps = 0u32;
    for i in 0..sig.dim() {
        if b & (1 << i) != 0 {
            swaps += (a >> (i + 1)).count_ones();
        }
    }
    if swaps % 2 == 1 {
        sign = -sign;
    }
    let common = a & b;
    for i in 0..sig.dim() {
        if common & (1 << i) != 0 {
            sign *= sig.generator_square(i);
        }
    }
    (a ^ b, sign)
}

/// Grade (number of generator factors) of a blade mask.
pub fn blade_grade(mask: u32) -> u32 {
    mask.count_ones()
}

/// Sign picked up by reversing the factor order of a grade-`k` blade:
/// `(-1)^(k(k-1)/2)`.
pub fn reversion_sign(grade: u32) -> f64 {
    if (grade * grade.wrapping_sub(1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Precomputed multiplication table: for blade indices `(a, b)` stores the
/// result blade `a ^ b` and the product sign.
#[derive(Debug, Clone)]
pub struct AlgebraTable {
    sig: Signature,
    result: Vec<u32>,
    sign: Vec<f64>,
}

impl AlgebraTable {
    pub fn new(sig: Signature) -> Self {
        let n = sig.blade_count();
        let mut result = Vec::with_capacity(n * n);
        let mut sign = Vec::with_capacity(n * n);
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                let (r, s) = blade_product(sig, a, b);
                result.push(r);
                sign.push(s);
            }
        }
        Self { sig, result, sign }
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn blade_count(&self) -> usize {
        self.sig.blade_count()
    }

    /// Blade masks in canonical index order.
    pub fn blades(&self) -> impl Iterator<Item = u32> + '_ {
        0..self.sig.blade_count() as u32
    }

    /// Product entry for a pair of blade masks.
    pub fn product(&self, a: u32, b: u32) -> (u32, f64) {
        let n = self.blade_count();
        let idx = a as usize * n + b as usize;
        (self.result[idx], self.sign[idx])
    }
}

/// Builds the complete product table for `C(p,q)`.
pub fn make_algebra(p: u32, q: u32) -> Result<AlgebraTable, CliffordError> {
    Ok(AlgebraTable::new(Signature::new(p, q)?))
}

/// Dense multivector with one complex coefficient per basis blade.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector {
    sig: Signature,
    coeffs: Vec<Complex64>,
}

impl Multivector {
    pub fn zero(sig: Signature) -> Self {
        Self {
            sig,
            coeffs: vec![Complex64::ZERO; sig.blade_count()],
        }
    }

    pub fn scalar(sig: Signature, value: Complex64) -> Self {
        let mut m = Self::zero(sig);
        m.coeffs[0] = value;
        m
    }

    /// The `i`-th generator (1-based, matching `e_1 .. e_{p+q}`).
    pub fn generator(sig: Signature, i: u32) -> Self {
        assert!(
            i >= 1 && i <= sig.dim(),
            "generator index {i} out of range for {sig}"
        );
        Self::basis_blade(sig, 1 << (i - 1))
    }

    /// Unit basis blade for a generator bitmask.
    pub fn basis_blade(sig: Signature, mask: u32) -> Self {
        assert!((mask as usize) < sig.blade_count());
        let mut m = Self::zero(sig);
        m.coeffs[mask as usize] = Complex64::ONE;
        m
    }

    pub fn from_coeffs(sig: Signature, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), sig.blade_count());
        Self { sig, coeffs }
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: u32) -> Complex64 {
        self.coeffs[mask as usize]
    }

    pub fn set_coeff(&mut self, mask: u32, value: Complex64) {
        self.coeffs[mask as usize] = value;
    }

    /// Grade-0 coefficient.
    pub fn scalar_part(&self) -> Complex64 {
        self.coeffs[0]
    }

    fn check_signature(&self, other: &Self) -> Result<(), CliffordError> {
        if self.sig != other.sig {
            Err(CliffordError::SignatureMismatch(self.sig, other.sig))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, CliffordError> {
        self.check_signature(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            sig: self.sig,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CliffordError> {
        self.check_signature(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            sig: self.sig,
            coeffs,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Geometric product.
    pub fn product(&self, other: &Self) -> Result<Self, CliffordError> {
        self.check_signature(other)?;
        let mut out = Self::zero(self.sig);
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.norm_sqr() == 0.0 {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                if cb.norm_sqr() == 0.0 {
                    continue;
                }
                let (r, s) = blade_product(self.sig, a as u32, b as u32);
                out.coeffs[r as usize] += ca * cb * s;
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, CliffordError> {
        self.product(other)?.sub(&other.product(self)?)
    }

    pub fn anticommutator(&self, other: &Self) -> Result<Self, CliffordError> {
        self.product(other)?.add(&other.product(self)?)
    }

    /// Tilde involution: reversion of generator order combined with complex
    /// conjugation of the coefficients.  Under the Pauli matrix
    /// representation this is the Hermitian conjugate.
    pub fn tilde(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(mask, c)| c.conj() * reversion_sign(blade_grade(mask as u32)))
            .collect();
        Self {
            sig: self.sig,
            coeffs,
        }
    }

    /// Keeps only the blades of the requested grade.
    pub fn grade_project(&self, grade: u32) -> Result<Self, CliffordError> {
        if grade > self.sig.dim() {
            return Err(CliffordError::GradeOutOfRange {
                grade,
                sig: self.sig,
            });
        }
        let mut out = Self::zero(self.sig);
        for (mask, c) in self.coeffs.iter().enumerate() {
            if blade_grade(mask as u32) == grade {
                out.coeffs[mask] = *c;
            }
        }
        Ok(out)
    }

    /// Largest absolute blade coefficient.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Max-norm distance between two multivectors.
    pub fn distance(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, c) in self.coeffs.iter().enumerate() {
            if c.norm() < 1e-14 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if mask == 0 {
                write!(f, "({:.6})", c)?;
            } else {
                write!(f, "({:.6})e", c)?;
                for i in 0..self.sig.dim() {
                    if mask & (1 << i) != 0 {
                        write!(f, "{}", i + 1)?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl std::ops::Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        self.add(rhs).expect("signature mismatch in +")
    }
}

impl std::ops::Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        self.sub(rhs).expect("signature mismatch in -")
    }
}

impl std::ops::Mul for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: &Multivector) -> Multivector {
        self.product(rhs).expect("signature mismatch in *")
    }
}

impl std::ops::Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// The Pauli signature `C(3,0)`.
pub fn pauli_signature() -> Signature {
    Signature::new(3, 0).expect("static signature")
}

fn pauli(i: u32) -> Matrix2<Complex64> {
    let o = Complex64::ZERO;
    let l = Complex64::ONE;
    let j = Complex64::I;
    match i {
        1 => Matrix2::new(o, l, l, o),
        2 => Matrix2::new(o, -j, j, o),
        3 => Matrix2::new(l, o, o, -l),
        _ => unreachable!(),
    }
}

/// Faithful 2x2 matrix representation of `C(3,0)`: generators map to the
/// Pauli matrices, blades to their ordered products, and the map extends
/// linearly.
pub fn matrix_rep(m: &Multivector) -> Result<Matrix2<Complex64>, CliffordError> {
    let sig = pauli_signature();
    if m.signature() != sig {
        return Err(CliffordError::UnsupportedSignature {
            expected: sig,
            got: m.signature(),
        });
    }
    let mut out = Matrix2::zeros();
    for (mask, c) in m.coeffs().iter().enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let mut blade = Matrix2::identity();
        for i in 1..=3u32 {
            if mask & (1 << (i - 1)) != 0 {
                blade *= pauli(i);
            }
        }
        out += blade * Complex64::from(*c);
    }
    Ok(out)
}

/// Converts a 2x2 complex matrix back to a multivector supported on the
/// blades `{1, e1, e2, e3}` with complex coefficients, using the Pauli
/// decomposition `c_k = tr(sigma_k M) / 2`.
pub fn from_matrix(m: &Matrix2<Complex64>) -> Multivector {
    let sig = pauli_signature();
    let mut out = Multivector::zero(sig);
    out.set_coeff(0, (m[(0, 0)] + m[(1, 1)]) / 2.0);
    for i in 1..=3u32 {
        let s = pauli(i) * *m;
        out.set_coeff(1 << (i - 1), (s[(0, 0)] + s[(1, 1)]) / 2.0);
    }
    out
}

/// Trace in `C(3,0)`, normalized to coincide with the matrix trace of
/// [`matrix_rep`].
///
/// For elements supported away from the pseudoscalar this is twice the
/// scalar part.  The pseudoscalar `e1e2e3` maps to `iI` under the Pauli
/// representation and therefore contributes `2i` times its coefficient;
/// density elements and projections never carry that blade, but the trace
/// stays faithful to the representation for every input.
pub fn trace(m: &Multivector) -> Result<Complex64, CliffordError> {
    if m.signature() != pauli_signature() {
        return Err(CliffordError::UnsupportedSignature {
            expected: pauli_signature(),
            got: m.signature(),
        });
    }
    Ok((m.scalar_part() + Complex64::I * m.coeff(0b111)) * 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_multivector(rng: &mut impl Rng, sig: Signature) -> Multivector {
        let coeffs = (0..sig.blade_count())
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Multivector::from_coeffs(sig, coeffs)
    }

    #[test]
    fn blade_counts_match_signature() {
        assert_eq!(make_algebra(3, 0).unwrap().blade_count(), 8);
        assert_eq!(make_algebra(0, 1).unwrap().blade_count(), 2);
        assert_eq!(make_algebra(1, 3).unwrap().blade_count(), 16);
        assert!(matches!(
            make_algebra(4, 3),
            Err(CliffordError::SignatureTooLarge { .. })
        ));
    }

    #[test]
    fn algebra_tower_constructs_up_to_the_cap() {
        // C(3,0) -> C(1,3) -> C(4,1) -> C(2,4): all constructible, with
        // generator squares following the signature.
        for (p, q) in [(3u32, 0u32), (1, 3), (4, 1), (2, 4)] {
            let table = make_algebra(p, q).unwrap();
            assert_eq!(table.blade_count(), 1 << (p + q));
            let sig = table.signature();
            for i in 0..p + q {
                let (blade, sign) = table.product(1 << i, 1 << i);
                assert_eq!(blade, 0);
                assert_eq!(sign, sig.generator_square(i));
            }
        }
    }

    #[test]
    fn generator_squares_follow_signature() {
        let sig = Signature::new(1, 3).unwrap();
        for i in 1..=4 {
            let e = Multivector::generator(sig, i);
            let sq = e.product(&e).unwrap();
            let expected = if i == 1 { 1.0 } else { -1.0 };
            assert_eq!(sq.scalar_part(), c(expected, 0.0));
        }
        // e1^2 = -1 in C(0,1): the complex-number algebra.
        let sig = Signature::new(0, 1).unwrap();
        let e = Multivector::generator(sig, 1);
        assert_eq!(e.product(&e).unwrap().scalar_part(), c(-1.0, 0.0));
    }

    #[test]
    fn basic_products_in_pauli_algebra() {
        let sig = pauli_signature();
        let e1 = Multivector::generator(sig, 1);
        let e2 = Multivector::generator(sig, 2);
        let e12 = &e1 * &e2;
        assert_eq!(e12.coeff(0b011), c(1.0, 0.0));
        // (e1 e2) e2 = e1
        let back = &e12 * &e2;
        assert_eq!(back.distance(&e1), 0.0);
        // E = (1 + e3)/2 is idempotent, exactly in dyadic arithmetic.
        let e3 = Multivector::generator(sig, 3);
        let ee = Multivector::scalar(sig, c(1.0, 0.0))
            .add(&e3)
            .unwrap()
            .scale(c(0.5, 0.0));
        assert_eq!(ee.product(&ee).unwrap().distance(&ee), 0.0);
    }

    #[test]
    fn commutators_of_generators() {
        let sig = pauli_signature();
        let e1 = Multivector::generator(sig, 1);
        let e2 = Multivector::generator(sig, 2);
        let comm = e1.commutator(&e2).unwrap();
        assert_eq!(comm.coeff(0b011), c(2.0, 0.0));
        let anti = e1.anticommutator(&e2).unwrap();
        assert_eq!(anti.max_abs_coeff(), 0.0);
        let self_comm = e1.commutator(&e1).unwrap();
        assert_eq!(self_comm.max_abs_coeff(), 0.0);
    }

    #[test]
    fn table_agrees_with_direct_products_and_is_associative() {
        for (p, q) in [(3, 0), (0, 2), (1, 3)] {
            let table = make_algebra(p, q).unwrap();
            let sig = table.signature();
            let n = table.blade_count() as u32;
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(table.product(a, b), blade_product(sig, a, b));
                }
            }
            // Associativity on the blade level by enumeration.
            if sig.dim() <= 4 {
                for a in 0..n {
                    for b in 0..n {
                        for cc in 0..n {
                            let (ab, s_ab) = table.product(a, b);
                            let (abc_l, s_l) = table.product(ab, cc);
                            let (bc, s_bc) = table.product(b, cc);
                            let (abc_r, s_r) = table.product(a, bc);
                            assert_eq!(abc_l, abc_r);
                            assert_eq!(s_ab * s_l, s_bc * s_r);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn reversion_examples() {
        let sig = pauli_signature();
        let one = Multivector::scalar(sig, c(1.0, 0.0));
        assert_eq!(one.tilde().distance(&one), 0.0);
        let e12 = Multivector::basis_blade(sig, 0b011);
        assert_eq!(e12.tilde().coeff(0b011), c(-1.0, 0.0));
        let ie3 = Multivector::generator(sig, 3).scale(c(0.0, 1.0));
        assert_eq!(ie3.tilde().coeff(0b100), c(0.0, -1.0));
    }

    #[test]
    fn reversion_is_an_antiautomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, q) in [(3, 0), (0, 1), (1, 3)] {
            let sig = Signature::new(p, q).unwrap();
            for _ in 0..50 {
                let a = random_multivector(&mut rng, sig);
                let b = random_multivector(&mut rng, sig);
                let lhs = a.product(&b).unwrap().tilde();
                let rhs = b.tilde().product(&a.tilde()).unwrap();
                assert!(lhs.distance(&rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn grade_projection_partitions() {
        let sig = pauli_signature();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random_multivector(&mut rng, sig);
        let mut sum = Multivector::zero(sig);
        for k in 0..=3 {
            sum = sum.add(&x.grade_project(k).unwrap()).unwrap();
        }
        assert!(sum.distance(&x) < 1e-15);

        let probe = Multivector::scalar(sig, c(1.0, 0.0))
            .add(&Multivector::generator(sig, 1))
            .unwrap()
            .add(&Multivector::basis_blade(sig, 0b011))
            .unwrap();
        let g1 = probe.grade_project(1).unwrap();
        assert_eq!(g1.distance(&Multivector::generator(sig, 1)), 0.0);
    }

    #[test]
    fn matrix_rep_of_basis_elements() {
        let sig = pauli_signature();
        let e3 = matrix_rep(&Multivector::generator(sig, 3)).unwrap();
        assert_eq!(e3[(0, 0)], c(1.0, 0.0));
        assert_eq!(e3[(1, 1)], c(-1.0, 0.0));
        // e1 e2 -> i sigma3
        let e12 = matrix_rep(&Multivector::basis_blade(sig, 0b011)).unwrap();
        assert_eq!(e12[(0, 0)], c(0.0, 1.0));
        assert_eq!(e12[(1, 1)], c(0.0, -1.0));
        // E = (1+e3)/2 -> diag(1, 0)
        let idem = Multivector::scalar(sig, c(0.5, 0.0))
            .add(&Multivector::generator(sig, 3).scale(c(0.5, 0.0)))
            .unwrap();
        let m = matrix_rep(&idem).unwrap();
        assert_eq!(m[(0, 0)], c(1.0, 0.0));
        assert_eq!(m[(1, 1)], c(0.0, 0.0));
        assert_eq!(m[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn matrix_rep_is_a_homomorphism() {
        let sig = pauli_signature();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let a = random_multivector(&mut rng, sig);
            let b = random_multivector(&mut rng, sig);
            let lhs = matrix_rep(&a.product(&b).unwrap()).unwrap();
            let rhs = matrix_rep(&a).unwrap() * matrix_rep(&b).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn from_matrix_round_trips_the_representation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let m = Matrix2::from_fn(|_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let back = matrix_rep(&from_matrix(&m)).unwrap();
            assert!((back - m).norm() < 1e-13);
        }
    }

    #[test]
    fn trace_matches_matrix_trace() {
        let sig = pauli_signature();
        assert_eq!(
            trace(&Multivector::scalar(sig, c(1.0, 0.0))).unwrap(),
            c(2.0, 0.0)
        );
        assert_eq!(trace(&Multivector::generator(sig, 3)).unwrap(), c(0.0, 0.0));
        let idem = Multivector::scalar(sig, c(0.5, 0.0))
            .add(&Multivector::generator(sig, 3).scale(c(0.5, 0.0)))
            .unwrap();
        assert_eq!(trace(&idem).unwrap(), c(1.0, 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..50 {
            let a = random_multivector(&mut rng, sig);
            let b = random_multivector(&mut rng, sig);
            let tr_ab = trace(&a.product(&b).unwrap()).unwrap();
            let tr_ba = trace(&b.product(&a).unwrap()).unwrap();
            assert!((tr_ab - tr_ba).norm() < 1e-12);
            let mat = matrix_rep(&a).unwrap();
            let tr_mat = mat[(0, 0)] + mat[(1, 1)];
            assert!((trace(&a).unwrap() - tr_mat).norm() < 1e-13);
        }
    }

    #[test]
    fn wrong_signature_is_rejected() {
        let a = Multivector::scalar(pauli_signature(), c(1.0, 0.0));
        let b = Multivector::scalar(Signature::new(0, 1).unwrap(), c(1.0, 0.0));
        assert!(matches!(
            a.product(&b),
            Err(CliffordError::SignatureMismatch(_, _))
        ));
        assert!(matches!(
            matrix_rep(&b),
            Err(CliffordError::UnsupportedSignature { .. })
        ));
        assert!(matches!(
            trace(&b),
            Err(CliffordError::UnsupportedSignature { .. })
        ));
    }
}
