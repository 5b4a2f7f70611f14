//! Liouvillians built from a Hamiltonian and Lindblad jump operators.

use crate::error::{Error, Result};
use crate::qm::{check_dims, kron, CMatrix, Operator, C64, HERMITIAN_TOL};
use crate::vectorization::{super_acomm, super_comm, SuperOp};

/// Which physical terms a generator contains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Unitary,
    Dissipative,
    Combined,
}

/// One dissipative channel `gamma * D[A]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jump {
    pub rate: f64,
    pub op: Operator,
}

impl Jump {
    pub fn new(rate: f64, op: Operator) -> Self {
        Self { rate, op }
    }
}

/// A Hamiltonian with a list of jump terms, validated on construction.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    hamiltonian: Operator,
    jumps: Vec<Jump>,
}

impl LindbladModel {
    pub fn new(hamiltonian: Operator, jumps: Vec<Jump>) -> Result<Self> {
        let defect = hamiltonian.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NonHermitianHamiltonian { defect });
        }
        for (index, jump) in jumps.iter().enumerate() {
            if !(jump.rate >= 0.0 && jump.rate.is_finite()) {
                return Err(Error::NegativeRate {
                    index,
                    rate: jump.rate,
                });
            }
            check_dims(&hamiltonian, &jump.op)?;
        }
        Ok(Self { hamiltonian, jumps })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }
}

/// A generator `d|rho>>/dt = L |rho>>` with `hbar = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Liouvillian {
    op: SuperOp,
    kind: GeneratorKind,
}

impl Liouvillian {
    /// Wraps an arbitrary superoperator. The `Unitary` tag is only accepted
    /// for skew-Hermitian input.
    pub fn from_superop(op: SuperOp, kind: GeneratorKind) -> Result<Self> {
        if kind == GeneratorKind::Unitary {
            let skew = crate::linalg::max_abs(&(op.matrix() + op.matrix().adjoint()));
            let scale = op.max_abs().max(1.0);
            if skew > HERMITIAN_TOL * scale {
                return Err(Error::NonUnitaryKind);
            }
        }
        Ok(Self { op, kind })
    }

    /// A generator from a raw `d^2 x d^2` matrix, tagged `Combined`.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Ok(Self {
            op: SuperOp::from_matrix(m)?,
            kind: GeneratorKind::Combined,
        })
    }

    pub fn op(&self) -> &SuperOp {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            op: self.op.scale(C64::new(c, 0.0)),
            kind: self.kind,
        }
    }

    /// Sum of two generators on the same space.
    pub fn add(&self, other: &Liouvillian) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let kind = if self.kind == other.kind {
            self.kind
        } else {
            GeneratorKind::Combined
        };
        Ok(Self {
            op: &self.op + &other.op,
            kind,
        })
    }

    /// Entry `L[(nu nu'), (nu'' nu''')]` at row `nu d + nu'`, column
    /// `nu'' d + nu'''`.
    pub fn matrix_element(&self, nu: usize, nu_p: usize, nu_pp: usize, nu_ppp: usize) -> Result<C64> {
        let d = self.dim();
        for index in [nu, nu_p, nu_pp, nu_ppp] {
            if index >= d {
                return Err(Error::IndexOutOfRange { index, dim: d });
            }
        }
        Ok(self.op.matrix()[(nu * d + nu_p, nu_pp * d + nu_ppp)])
    }
}

/// `-i (H (x) I - I (x) H^T)`.
pub fn unitary_liouvillian(h: &Operator) -> Result<Liouvillian> {
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NonHermitianHamiltonian { defect });
    }
    let comm = super_comm(h, &Operator::identity(h.dim()))?;
    Ok(Liouvillian {
        op: comm.scale(C64::new(0.0, -1.0)),
        kind: GeneratorKind::Unitary,
    })
}

/// `-i [[H, I]] + sum_k gamma_k (A_k (x) A_k* - 1/2 [[A_k^dagger A_k, I]]_+)`.
///
/// Zero-rate terms are skipped. The number of jump terms is not limited.
pub fn lindblad_liouvillian(model: &LindbladModel) -> Result<Liouvillian> {
    let d = model.dim();
    let unitary = unitary_liouvillian(model.hamiltonian())?;
    let active: Vec<&Jump> = model.jumps().iter().filter(|j| j.rate > 0.0).collect();
    if active.is_empty() {
        return Ok(unitary);
    }
    let mut m = unitary.op.into_matrix();
    let id = Operator::identity(d);
    for jump in active {
        let a = &jump.op;
        let sandwich = kron(a.matrix(), &a.matrix().conjugate());
        let anti = super_acomm(&(a.dagger() * a), &id)?.into_matrix();
        m += (sandwich - anti * C64::new(0.5, 0.0)) * C64::new(jump.rate, 0.0);
    }
    let kind = if model.hamiltonian().max_abs() == 0.0 {
        GeneratorKind::Dissipative
    } else {
        GeneratorKind::Combined
    };
    Ok(Liouvillian {
        op: SuperOp::new(d, m)?,
        kind,
    })
}

/// Closed-form entry of a unitary Liouvillian:
/// `-i (H[nu, nu''] delta[nu', nu'''] - delta[nu, nu''] H*[nu', nu'''])`.
pub fn unitary_matrix_element(
    h: &Operator,
    nu: usize,
    nu_p: usize,
    nu_pp: usize,
    nu_ppp: usize,
) -> Result<C64> {
    let d = h.dim();
    for index in [nu, nu_p, nu_pp, nu_ppp] {
        if index >= d {
            return Err(Error::IndexOutOfRange { index, dim: d });
        }
    }
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let v = h.get(nu, nu_pp) * delta(nu_p, nu_ppp) - h.get(nu_p, nu_ppp).conj() * delta(nu, nu_pp);
    Ok(v * C64::new(0.0, -1.0))
}
