//! Operators on a `d`-dimensional state space and the measurement rules
//! built from them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Tolerances of the density-matrix invariants.
pub const TRACE_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-8;

/// Half-width of the window around `[0, 1]` in which a probability is
/// clamped rather than rejected.
pub const PROBABILITY_SLACK: f64 = 1e-12;

/// A square complex matrix acting on the state space.
#[derive(Clone, PartialEq)]
pub struct Operator(CMatrix);

impl Operator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidParameter(
                "operator dimension must be positive".into(),
            ));
        }
        if !linalg::is_finite(&m) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// Builds a `dim x dim` operator from row-major entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(CMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_rows(dim, &c)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    /// The outer product `|ket><bra|`.
    pub fn outer(ket: &DVector<C64>, bra: &DVector<C64>) -> Result<Self> {
        if ket.len() != bra.len() {
            return Err(Error::DimensionMismatch {
                expected: ket.len(),
                found: bra.len(),
            });
        }
        Self::new(ket * bra.adjoint())
    }

    /// The projector `|k><k|` on the computational basis.
    pub fn projector(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, dim });
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Ok(Self(m))
    }

    pub fn diagonal(values: &[C64]) -> Result<Self> {
        Self::new(CMatrix::from_diagonal(&DVector::from_row_slice(values)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.conjugate())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `max |X - X^dagger|` over all entries.
    pub fn hermitian_defect(&self) -> f64 {
        linalg::hermitian_defect(&self.0)
    }

    pub fn hermitize(&self) -> Self {
        Self(linalg::hermitize(&self.0))
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.0)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self(&self.0 * &other.0 - &other.0 * &self.0))
    }

    pub fn expm(&self) -> Result<Self> {
        expm(&self.0).map(Self)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.0).0
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self(&self.0 * &other.0))
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator{}", self.0)
    }
}

impl AsRef<CMatrix> for Operator {
    fn as_ref(&self) -> &CMatrix {
        &self.0
    }
}

impl TryFrom<CMatrix> for Operator {
    type Error = Error;

    fn try_from(m: CMatrix) -> Result<Self> {
        Self::new(m)
    }
}

// Arithmetic panics on mismatched dimensions, like the underlying matrices;
// the fallible entry points check dimensions first.
macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Operator> for &Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                Operator(&self.0 $op &rhs.0)
            }
        }
        impl $tr<Operator> for Operator {
            type Output = Operator;
            fn $method(self, rhs: Operator) -> Operator {
                Operator(self.0 $op rhs.0)
            }
        }
        impl $tr<&Operator> for Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                Operator(self.0 $op &rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator(-self.0)
    }
}

pub(crate) fn check_dims(a: &Operator, b: &Operator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Qubit operators in the ordered basis `(|e>, |g>) = ((1,0), (0,1))`.
pub mod pauli {
    use super::{Operator, C64};

    fn op(entries: [C64; 4]) -> Operator {
        Operator::from_rows(2, &entries).expect("2x2 literal")
    }

    const O: C64 = C64::new(0.0, 0.0);
    const ONE: C64 = C64::new(1.0, 0.0);
    const I: C64 = C64::new(0.0, 1.0);

    pub fn identity() -> Operator {
        Operator::identity(2)
    }

    pub fn sigma_x() -> Operator {
        op([O, ONE, ONE, O])
    }

    pub fn sigma_y() -> Operator {
        op([O, -I, I, O])
    }

    pub fn sigma_z() -> Operator {
        op([ONE, O, O, -ONE])
    }

    /// `|e><g|`
    pub fn sigma_plus() -> Operator {
        op([O, ONE, O, O])
    }

    /// `|g><e|`
    pub fn sigma_minus() -> Operator {
        op([O, O, ONE, O])
    }
}

/// A validated density matrix: unit trace, Hermitian, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        let tr = op.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}, expected 1")));
        }
        let defect = op.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "hermiticity defect {defect:e}"
            )));
        }
        let min = op.hermitian_eigenvalues()[0];
        if min < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self(op))
    }

    /// Replaces `op` by `(op + op^dagger) / 2` before validating.
    pub fn from_hermitized(op: &Operator) -> Result<Self> {
        Self::new(op.hermitize())
    }

    /// `|psi><psi|` for a normalized state vector.
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        Self::new(Operator::outer(psi, psi)?)
    }

    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        Self::new(Operator::projector(dim, k)?)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(Operator::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0.hermitian_eigenvalues()[0]
    }
}

/// Measurement operators `M_m` with optional outcome values.
#[derive(Clone, Debug)]
pub struct MeasurementSet {
    ops: Vec<Operator>,
    labels: Option<Vec<f64>>,
}

impl MeasurementSet {
    /// Tolerance for [`MeasurementSet::is_complete`].
    pub const COMPLETENESS_TOL: f64 = 1e-10;
    /// Defect above which a set is rejected by [`nonselective_update`].
    pub const REJECT_TOL: f64 = 1e-8;

    pub fn new(ops: Vec<Operator>, labels: Option<Vec<f64>>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty measurement set".into()))?;
        for op in &ops[1..] {
            check_dims(first, op)?;
        }
        if let Some(l) = &labels {
            if l.len() != ops.len() {
                return Err(Error::DimensionMismatch {
                    expected: ops.len(),
                    found: l.len(),
                });
            }
        }
        Ok(Self { ops, labels })
    }

    /// Projective measurement onto the computational basis.
    pub fn computational(dim: usize) -> Self {
        let ops = (0..dim)
            .map(|k| Operator::projector(dim, k).expect("k < dim"))
            .collect();
        Self { ops, labels: None }
    }

    pub fn ops(&self) -> &[Operator] {
        &self.ops
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    /// `max |sum_m M_m^dagger M_m - I|`
    pub fn completeness_defect(&self) -> f64 {
        completeness_defect_of(&self.ops)
    }

    pub fn is_complete(&self) -> bool {
        self.completeness_defect() <= Self::COMPLETENESS_TOL
    }

    /// The observable `sum_m lambda_m M_m^dagger M_m`, if labels are present.
    pub fn observable(&self) -> Option<Operator> {
        let labels = self.labels.as_ref()?;
        let mut acc = Operator::zeros(self.dim());
        for (m, &l) in self.ops.iter().zip(labels) {
            acc = acc + (m.dagger() * m).scale_real(l);
        }
        Some(acc)
    }
}

pub(crate) fn completeness_defect_of(ops: &[Operator]) -> f64 {
    let d = ops[0].dim();
    let mut acc = CMatrix::zeros(d, d);
    for k in ops {
        acc += k.matrix().adjoint() * k.matrix();
    }
    acc -= CMatrix::identity(d, d);
    linalg::max_abs(&acc)
}

/// Hilbert-Schmidt inner product `<A, B> = Tr[B A^dagger]`.
pub fn hs_inner(a: &Operator, b: &Operator) -> Result<C64> {
    check_dims(a, b)?;
    Ok((b.matrix() * a.matrix().adjoint()).trace())
}

/// `Tr[rho^2]`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    (m * m).trace().re
}

/// `Tr[B rho]`.
pub fn expectation(rho: &DensityMatrix, b: &Operator) -> Result<C64> {
    check_dims(rho.operator(), b)?;
    Ok((b.matrix() * rho.matrix()).trace())
}

/// Outcome probability `Tr[M^dagger M rho]`, clamped to `[0, 1]`.
pub fn measure_prob(rho: &DensityMatrix, m: &Operator) -> Result<f64> {
    check_dims(rho.operator(), m)?;
    let p = (m.matrix().adjoint() * m.matrix() * rho.matrix()).trace().re;
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "probability {p} outside [0, 1]; M^dagger M exceeds the identity"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Post-measurement state when the outcome is not recorded:
/// `sum_m M_m rho M_m^dagger`.
pub fn nonselective_update(rho: &DensityMatrix, set: &MeasurementSet) -> Result<DensityMatrix> {
    check_dims(rho.operator(), &set.ops[0])?;
    let defect = set.completeness_defect();
    if defect > MeasurementSet::REJECT_TOL {
        return Err(Error::IncompleteMeasurementSet { defect });
    }
    let mut acc = CMatrix::zeros(rho.dim(), rho.dim());
    for m in &set.ops {
        acc += m.matrix() * rho.matrix() * m.matrix().adjoint();
    }
    DensityMatrix::from_hermitized(&Operator(acc))
}

/// Matrix exponential of a square matrix.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if !linalg::is_finite(a) {
        return Err(Error::NonFinite);
    }
    if a.is_empty() {
        return Ok(a.clone());
    }
    let e = a.exp();
    if !linalg::is_finite(&e) {
        return Err(Error::NonFinite);
    }
    Ok(e)
}

/// Kronecker product `[x_ij Y]`.
pub fn kron(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x.kronecker(y)
}

#[cfg(test)]
mod tests {
    use super::pauli::*;
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rho1(theta: f64) -> DensityMatrix {
        let e = C64::from_polar(1.0, theta);
        let m = Operator::from_rows(2, &[c(0.5, 0.0), -e * 0.5, -e.conj() * 0.5, c(0.5, 0.0)]).unwrap();
        DensityMatrix::new(m).unwrap()
    }

    fn rho2(theta: f64) -> DensityMatrix {
        let s = 2f64.sqrt() / 3.0 * theta.sin();
        let m = Operator::from_rows(2, &[c(0.5, 0.0), c(0.0, -s), c(0.0, s), c(0.5, 0.0)]).unwrap();
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn hs_inner_examples() {
        assert_eq!(hs_inner(&identity(), &identity()).unwrap(), c(2.0, 0.0));
        assert_eq!(hs_inner(&sigma_plus(), &sigma_plus()).unwrap(), c(1.0, 0.0));
        assert_eq!(hs_inner(&sigma_x(), &sigma_y()).unwrap(), c(0.0, 0.0));
        assert!(matches!(
            hs_inner(&identity(), &Operator::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn purity_of_reference_states() {
        for theta in [0.0, 0.3, PI / 4.0, PI / 3.0, 2.0] {
            assert!((purity(&rho1(theta)) - 1.0).abs() < 1e-12);
            let expected = 0.5 + 4.0 / 9.0 * theta.sin().powi(2);
            assert!((purity(&rho2(theta)) - expected).abs() < 1e-12);
        }
        assert!((purity(&rho2(PI / 3.0)) - 5.0 / 6.0).abs() < 1e-12);
        assert!((purity(&DensityMatrix::maximally_mixed(2)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn expectation_examples() {
        // S_z = (1/2)|1><1| - (1/2)|0><0| with |1> = (1,0).
        let sz = sigma_z().scale_real(0.5);
        let up = DensityMatrix::basis_state(2, 0).unwrap();
        assert!((expectation(&up, &sz).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(expectation(&mixed, &sigma_z()).unwrap().norm() < 1e-15);

        let rho = Operator::from_rows(2, &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]).unwrap();
        let rho = DensityMatrix::new(rho).unwrap();
        let v = expectation(&rho, &sigma_z()).unwrap();
        assert!((v.re - 0.4).abs() < 1e-15);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn measurement_probabilities() {
        let one = DensityMatrix::basis_state(2, 0).unwrap();
        let p1 = Operator::projector(2, 0).unwrap();
        let p0 = Operator::projector(2, 1).unwrap();
        assert_eq!(measure_prob(&one, &p1).unwrap(), 1.0);
        assert_eq!(measure_prob(&one, &p0).unwrap(), 0.0);

        let p = 0.35;
        let rho = DensityMatrix::new(Operator::diagonal(&[c(p, 0.0), c(1.0 - p, 0.0)]).unwrap()).unwrap();
        assert!((measure_prob(&rho, &sigma_plus()).unwrap() - (1.0 - p)).abs() < 1e-15);

        let too_big = Operator::identity(2).scale_real(2.0);
        assert!(measure_prob(&rho, &too_big).is_err());
    }

    #[test]
    fn nonselective_update_examples() {
        let rho = rho1(0.7);
        let id = MeasurementSet::new(vec![identity()], None).unwrap();
        let out = nonselective_update(&rho, &id).unwrap();
        assert!(linalg::max_abs(&(out.matrix() - rho.matrix())) < 1e-15);

        let dephase = MeasurementSet::computational(2);
        let out = nonselective_update(&rho, &dephase).unwrap();
        let half = Operator::identity(2).scale_real(0.5);
        assert!(linalg::max_abs(&(out.matrix() - half.matrix())) < 1e-15);

        let bad = MeasurementSet::new(vec![sigma_plus()], None).unwrap();
        assert!(matches!(
            nonselective_update(&rho, &bad),
            Err(Error::IncompleteMeasurementSet { .. })
        ));
    }

    #[test]
    fn spin_measurement_observable() {
        let set = MeasurementSet::new(
            vec![
                Operator::projector(2, 1).unwrap(),
                Operator::projector(2, 0).unwrap(),
            ],
            Some(vec![-0.5, 0.5]),
        )
        .unwrap();
        assert!(set.is_complete());
        let sz = set.observable().unwrap();
        assert!((sz - sigma_z().scale_real(0.5)).max_abs() < 1e-15);

        // sigma_+^dagger sigma_+ + sigma_-^dagger sigma_- = I
        let ladder = MeasurementSet::new(vec![sigma_plus(), sigma_minus()], None).unwrap();
        assert!(ladder.is_complete());
    }

    #[test]
    fn expm_examples() {
        assert_eq!(expm(&CMatrix::zeros(3, 3)).unwrap(), CMatrix::identity(3, 3));
        let n = Operator::from_real_rows(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let e = n.expm().unwrap();
        let expected = Operator::from_real_rows(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!((e - expected).max_abs() < 1e-15);

        let rot = sigma_x().scale(c(0.0, PI / 2.0)).expm().unwrap();
        let expected = sigma_x().scale(c(0.0, 1.0));
        assert!((rot - expected).max_abs() < 1e-14);

        let mut bad = CMatrix::zeros(2, 2);
        bad[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(expm(&bad), Err(Error::NonFinite)));
    }

    #[test]
    fn kron_examples() {
        let i4 = kron(identity().matrix(), identity().matrix());
        assert_eq!(i4, CMatrix::identity(4, 4));
        let k = kron(sigma_minus().matrix(), sigma_minus().matrix());
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i, j) == (3, 0) { 1.0 } else { 0.0 };
                assert_eq!(k[(i, j)], c(expected, 0.0));
            }
        }
    }

    #[test]
    fn density_matrix_validation() {
        let not_unit = Operator::identity(2);
        assert!(DensityMatrix::new(not_unit).is_err());
        let not_herm = Operator::from_rows(2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(DensityMatrix::new(not_herm).is_err());
        let negative = Operator::diagonal(&[c(1.5, 0.0), c(-0.5, 0.0)]).unwrap();
        assert!(DensityMatrix::new(negative).is_err());
        assert!(Operator::new(CMatrix::zeros(2, 3)).is_err());
    }
}

#[cfg(test)]
mod oracle_tests {
    use super::*;
    use crate::random;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    /// Plain Taylor series, stopped once a term is negligible against the sum.
    fn series_expm(a: &CMatrix) -> CMatrix {
        let n = a.nrows();
        let mut sum = CMatrix::identity(n, n);
        let mut term = CMatrix::identity(n, n);
        for k in 1..400 {
            term = &term * a / C64::new(k as f64, 0.0);
            sum += &term;
            if linalg::max_abs(&term) <= 1e-16 * linalg::max_abs(&sum) {
                break;
            }
        }
        sum
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn expm_matches_the_series(seed in any::<u64>(), d in 1usize..5, norm in 0.0f64..5.0) {
            let mut rng = StdRng::seed_from_u64(seed);
            let x = random::complex_operator(&mut rng, d).into_matrix();
            let s = linalg::spectral_norm(&x);
            let a = if s > 0.0 { x * C64::new(norm / s, 0.0) } else { x };
            let e = expm(&a).unwrap();
            let oracle = series_expm(&a);
            let scale = linalg::max_abs(&oracle).max(1.0);
            prop_assert!(linalg::max_abs(&(e - oracle)) <= 1e-12 * scale);
        }

        #[test]
        fn kronecker_rules(seed in any::<u64>(), d in 1usize..4) {
            let mut rng = StdRng::seed_from_u64(seed);
            let [a, b, c, e] = [0, 1, 2, 3].map(|_| random::complex_operator(&mut rng, d).into_matrix());
            let i = CMatrix::identity(d, d);
            // mixed product
            let lhs = kron(&a, &b) * kron(&c, &e);
            let rhs = kron(&(&a * &c), &(&b * &e));
            prop_assert!(linalg::max_abs(&(lhs - rhs)) < 1e-12);
            // adjoint and transpose distribute
            prop_assert!(linalg::max_abs(&(kron(&a, &b).adjoint() - kron(&a.adjoint(), &b.adjoint()))) < 1e-15);
            prop_assert!(linalg::max_abs(&(kron(&a, &b).transpose() - kron(&a.transpose(), &b.transpose()))) < 1e-15);
            // analytic functions act factor-wise
            let left = expm(&kron(&a, &i)).unwrap() - kron(&expm(&a).unwrap(), &i);
            let right = expm(&kron(&i, &a)).unwrap() - kron(&i, &expm(&a).unwrap());
            let scale = linalg::max_abs(&expm(&a).unwrap()).max(1.0);
            prop_assert!(linalg::max_abs(&left) <= 1e-12 * scale);
            prop_assert!(linalg::max_abs(&right) <= 1e-12 * scale);
        }
    }
}
