//! Liouville space: superkets, superoperators and the bra-flipper map.
//!
//! The bra-flipper sends `|a><b|` to `|a> (x) |b>*`. In the computational
//! basis this is row-major stacking: entry `X[nu, nu']` lands at flat index
//! `nu * d + nu'`. Column stacking (`vec` in the matrix-analysis sense) is
//! only reachable through [`to_column_stacked`] / [`from_column_stacked`].

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DVector, RowDVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::qm::{check_dims, kron, CMatrix, Operator, C64};

/// A vectorized operator `|X>>` of length `dim^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperKet {
    dim: usize,
    data: DVector<C64>,
}

impl SuperKet {
    pub fn new(dim: usize, data: DVector<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::BadSuperKetLength { len: data.len(), dim });
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: DVector::zeros(dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &DVector<C64> {
        &self.data
    }

    pub fn into_data(self) -> DVector<C64> {
        self.data
    }

    /// The superbra `<<X|`, i.e. the conjugate transpose.
    pub fn bra(&self) -> RowDVector<C64> {
        self.data.adjoint()
    }

    /// `<<self|other>>`.
    pub fn inner(&self, other: &SuperKet) -> Result<C64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(self.data.dotc(&other.data))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            dim: self.dim,
            data: &self.data * c,
        }
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs_vec(&self.data)
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }
}

impl Add<&SuperKet> for &SuperKet {
    type Output = SuperKet;
    fn add(self, rhs: &SuperKet) -> SuperKet {
        assert_eq!(self.dim, rhs.dim, "superket dimension mismatch");
        SuperKet {
            dim: self.dim,
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub<&SuperKet> for &SuperKet {
    type Output = SuperKet;
    fn sub(self, rhs: &SuperKet) -> SuperKet {
        assert_eq!(self.dim, rhs.dim, "superket dimension mismatch");
        SuperKet {
            dim: self.dim,
            data: &self.data - &rhs.data,
        }
    }
}

/// A linear map on Liouville space, stored as a `dim^2 x dim^2` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOp {
    dim: usize,
    data: CMatrix,
}

impl SuperOp {
    pub fn new(dim: usize, data: CMatrix) -> Result<Self> {
        let n = dim * dim;
        if dim == 0 || data.nrows() != n || data.ncols() != n {
            return Err(Error::ShapeMismatch {
                path: "superoperator".into(),
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", data.nrows(), data.ncols()),
            });
        }
        if !linalg::is_finite(&data) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    /// Infers the state-space dimension from a square matrix of size `d^2`.
    pub fn from_matrix(data: CMatrix) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::NotSquare {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        let n = data.nrows();
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n {
            return Err(Error::NotPerfectSquare(n));
        }
        Self::new(d, data)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            data: CMatrix::identity(dim * dim, dim * dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: CMatrix::zeros(dim * dim, dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Liouville-space dimension `dim^2`.
    pub fn size(&self) -> usize {
        self.dim * self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn apply(&self, v: &SuperKet) -> Result<SuperKet> {
        if v.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.dim,
            });
        }
        Ok(SuperKet {
            dim: self.dim,
            data: &self.data * &v.data,
        })
    }

    /// `self . other` as a composition of maps.
    pub fn compose(&self, other: &SuperOp) -> Result<SuperOp> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(SuperOp {
            dim: self.dim,
            data: &self.data * &other.data,
        })
    }

    pub fn dagger(&self) -> SuperOp {
        SuperOp {
            dim: self.dim,
            data: self.data.adjoint(),
        }
    }

    pub fn scale(&self, c: C64) -> SuperOp {
        SuperOp {
            dim: self.dim,
            data: &self.data * c,
        }
    }

    pub fn expm(&self) -> Result<SuperOp> {
        Ok(SuperOp {
            dim: self.dim,
            data: crate::qm::expm(&self.data)?,
        })
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.data)
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    /// Applies the map to an operator: `mho_inv(S mho(X))`.
    pub fn apply_operator(&self, x: &Operator) -> Result<Operator> {
        mho_inv(&self.apply(&mho(x))?)
    }
}

macro_rules! superop_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&SuperOp> for &SuperOp {
            type Output = SuperOp;
            fn $method(self, rhs: &SuperOp) -> SuperOp {
                assert_eq!(self.dim, rhs.dim, "superoperator dimension mismatch");
                SuperOp { dim: self.dim, data: &self.data $op &rhs.data }
            }
        }
        impl $tr<SuperOp> for SuperOp {
            type Output = SuperOp;
            fn $method(self, rhs: SuperOp) -> SuperOp {
                (&self).$method(&rhs)
            }
        }
    };
}

superop_binop!(Add, add, +);
superop_binop!(Sub, sub, -);
superop_binop!(Mul, mul, *);

impl Neg for SuperOp {
    type Output = SuperOp;
    fn neg(self) -> SuperOp {
        SuperOp {
            dim: self.dim,
            data: -self.data,
        }
    }
}

/// The bra-flipper: `X -> |X>>` with `|X>>[nu d + nu'] = X[nu, nu']`.
pub fn mho(x: &Operator) -> SuperKet {
    let d = x.dim();
    let m = x.matrix();
    SuperKet {
        dim: d,
        data: DVector::from_fn(d * d, |k, _| m[(k / d, k % d)]),
    }
}

/// Inverse of [`mho`].
pub fn mho_inv(v: &SuperKet) -> Result<Operator> {
    let d = v.dim;
    Operator::new(CMatrix::from_fn(d, d, |i, j| v.data[i * d + j]))
}

/// The basis superket `|nu, nu'>> = |nu> (x) |nu'>*`.
pub fn superket_basis(nu: usize, nu_p: usize, dim: usize) -> Result<SuperKet> {
    for index in [nu, nu_p] {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
    }
    let mut v = SuperKet::zeros(dim);
    v.data[nu * dim + nu_p] = C64::new(1.0, 0.0);
    Ok(v)
}

/// `A (x) C^T`, the superoperator with `(A (x) C^T) |B>> = |A B C>>`.
pub fn triple_superop(a: &Operator, c: &Operator) -> Result<SuperOp> {
    check_dims(a, c)?;
    Ok(SuperOp {
        dim: a.dim(),
        data: kron(a.matrix(), &c.matrix().transpose()),
    })
}

/// Super-commutator `[[X, Y]] = X (x) Y^T - Y (x) X^T`.
pub fn super_comm(x: &Operator, y: &Operator) -> Result<SuperOp> {
    check_dims(x, y)?;
    let a = kron(x.matrix(), &y.matrix().transpose());
    let b = kron(y.matrix(), &x.matrix().transpose());
    Ok(SuperOp {
        dim: x.dim(),
        data: a - b,
    })
}

/// Super-anticommutator `[[X, Y]]_+ = X (x) Y^T + Y (x) X^T`.
pub fn super_acomm(x: &Operator, y: &Operator) -> Result<SuperOp> {
    check_dims(x, y)?;
    let a = kron(x.matrix(), &y.matrix().transpose());
    let b = kron(y.matrix(), &x.matrix().transpose());
    Ok(SuperOp {
        dim: x.dim(),
        data: a + b,
    })
}

/// `|A (x) B>>` for a composite system of dimension `d1 * d2`.
pub fn vectorize_product(a: &Operator, b: &Operator) -> SuperKet {
    let ab = Operator::new(kron(a.matrix(), b.matrix())).expect("kron of square operators");
    mho(&ab)
}

/// Re-orders a row-major superket into column-stacked `vec[X]` order.
pub fn to_column_stacked(v: &SuperKet) -> DVector<C64> {
    let d = v.dim;
    DVector::from_fn(d * d, |k, _| {
        let (row, col) = (k % d, k / d);
        v.data[row * d + col]
    })
}

/// Inverse of [`to_column_stacked`].
pub fn from_column_stacked(dim: usize, data: &DVector<C64>) -> Result<SuperKet> {
    if data.len() != dim * dim {
        return Err(Error::BadSuperKetLength { len: data.len(), dim });
    }
    Ok(SuperKet {
        dim,
        data: DVector::from_fn(dim * dim, |k, _| {
            let (row, col) = (k / dim, k % dim);
            data[col * dim + row]
        }),
    })
}
