//! Operator-sum representations and their channel superoperators.

use crate::error::{Error, Result};
use crate::linalg;
use crate::qm::{check_dims, completeness_defect_of, kron, CMatrix, DensityMatrix, Operator, C64};
use crate::vectorization::{mho_inv, SuperKet, SuperOp};

/// Hermiticity defect of the Choi matrix above which extraction fails.
pub const CHOI_HERMITIAN_TOL: f64 = 1e-8;
/// Completeness defect accepted as trace preserving.
pub const TRACE_PRESERVING_TOL: f64 = 1e-8;

/// Kraus operators `K_a` acting on a common space, with an optional time tag.
#[derive(Clone, Debug)]
pub struct KrausSet {
    ops: Vec<Operator>,
    time: Option<f64>,
}

impl KrausSet {
    pub fn new(ops: Vec<Operator>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty kraus set".into()))?;
        for op in &ops[1..] {
            check_dims(first, op)?;
        }
        Ok(Self { ops, time: None })
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = Some(t);
        self
    }

    pub fn time(&self) -> Option<f64> {
        self.time
    }

    pub fn ops(&self) -> &[Operator] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn is_trace_preserving(&self) -> bool {
        completeness_defect(self) <= TRACE_PRESERVING_TOL
    }

    /// `K'_b = sum_a U[b, a] K_a` for a square mixing matrix `U`.
    pub fn mixed(&self, u: &CMatrix) -> Result<Self> {
        let n = self.ops.len();
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u.nrows(),
            });
        }
        let ops = (0..n)
            .map(|b| {
                let mut acc = CMatrix::zeros(self.dim(), self.dim());
                for (a, k) in self.ops.iter().enumerate() {
                    acc += k.matrix() * u[(b, a)];
                }
                Operator::new(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ops, time: self.time })
    }
}

/// The reshuffled superoperator, `R(S)[(a b), (c e)] = S[(a c), (b e)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    data: CMatrix,
}

impl ChoiMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn hermitian_defect(&self) -> f64 {
        linalg::hermitian_defect(&self.data)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.data).0
    }

    /// Undoes the reshuffle.
    pub fn to_superop(&self) -> SuperOp {
        SuperOp::new(self.dim, reshuffle(&self.data, self.dim)).expect("reshuffle keeps the shape")
    }
}

fn reshuffle(s: &CMatrix, d: usize) -> CMatrix {
    let n = d * d;
    CMatrix::from_fn(n, n, |row, col| {
        let (a, b) = (row / d, row % d);
        let (c, e) = (col / d, col % d);
        s[(a * d + c, b * d + e)]
    })
}

pub fn choi_reshuffle(s: &SuperOp) -> ChoiMatrix {
    ChoiMatrix {
        dim: s.dim(),
        data: reshuffle(s.matrix(), s.dim()),
    }
}

/// `sum_a K_a (x) K_a*`.
pub fn channel_superop(set: &KrausSet) -> SuperOp {
    let d = set.dim();
    let mut acc = CMatrix::zeros(d * d, d * d);
    for k in &set.ops {
        acc += kron(k.matrix(), &k.matrix().conjugate());
    }
    SuperOp::new(d, acc).expect("finite kraus operators")
}

/// `max |sum_a K_a^dagger K_a - I|`.
pub fn completeness_defect(set: &KrausSet) -> f64 {
    completeness_defect_of(&set.ops)
}

/// `sum_a K_a rho K_a^dagger`.
pub fn apply_kraus(set: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_dims(&set.ops[0], rho.operator())?;
    let mut acc = CMatrix::zeros(rho.dim(), rho.dim());
    for k in &set.ops {
        acc += k.matrix() * rho.matrix() * k.matrix().adjoint();
    }
    DensityMatrix::from_hermitized(&Operator::new(acc)?)
}

/// Kraus operators of a channel from the eigen-decomposition of its Choi
/// matrix, ordered by decreasing weight.
///
/// Eigenvalues at or below `tol` are dropped; the default is `1e-10` times
/// the largest eigenvalue. Eigenvalues below `-100 tol` are rejected.
pub fn kraus_from_superop(s: &SuperOp, tol: Option<f64>) -> Result<KrausSet> {
    let choi = choi_reshuffle(s);
    let defect = choi.hermitian_defect();
    if defect > CHOI_HERMITIAN_TOL * choi.data.iter().fold(1.0f64, |m, z| m.max(z.norm())) {
        return Err(Error::NotHermitianChoi { defect });
    }
    let (w, v) = linalg::hermitian_eigen(&choi.data);
    let w_max = w.last().copied().unwrap_or(0.0);
    let cutoff = tol.unwrap_or(1e-10 * w_max.max(0.0));
    if !(cutoff >= 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "kraus tolerance {cutoff} is invalid"
        )));
    }
    let w_min = w[0];
    if w_max <= 0.0 || w_min < -100.0 * cutoff {
        return Err(Error::NotCompletelyPositive {
            eigenvalue: if w_max <= 0.0 { w_max } else { w_min },
        });
    }
    let d = s.dim();
    let mut ops = Vec::new();
    for k in (0..w.len()).rev() {
        if w[k] <= cutoff {
            break;
        }
        let mut col = v.column(k).into_owned();
        linalg::fix_phase(&mut col);
        let ket = SuperKet::new(d, col * C64::new(w[k].sqrt(), 0.0))?;
        ops.push(mho_inv(&ket)?);
    }
    KrausSet::new(ops)
}

/// `max |S1 - S2| <= tol`.
pub fn channels_equal(s1: &SuperOp, s2: &SuperOp, tol: f64) -> Result<bool> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.dim(),
            found: s2.dim(),
        });
    }
    Ok(linalg::max_abs(&(s1.matrix() - s2.matrix())) <= tol)
}
