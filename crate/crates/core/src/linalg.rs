//! Small dense helpers shared by the numerical modules.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};

use crate::qm::{CMatrix, C64};

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &DVector<C64>) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitize(m));
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn eigenvalues(m: &CMatrix) -> Vec<C64> {
    let (_, t) = Schur::new(m.clone()).unpack();
    (0..t.nrows()).map(|k| t[(k, k)]).collect()
}

/// Singular values in descending order together with the matching right
/// singular vectors as columns.
pub fn svd_right(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.ncols();
    // Pad wide/short inputs so that V is always n x n.
    let padded;
    let a = if m.nrows() < n {
        padded = {
            let mut p = CMatrix::zeros(n, n);
            p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
            p
        };
        &padded
    } else {
        m
    };
    let svd = SVD::new(a.clone(), false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v = CMatrix::from_fn(n, k, |i, j| v_t[(order[j], i)].conj());
    (values, v)
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Orthonormal basis of the column space of `m`, dropping directions with
/// singular value at most `tol`.
pub fn orth(m: &CMatrix, tol: f64) -> CMatrix {
    if m.ncols() == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("u requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let keep: Vec<usize> = order
        .into_iter()
        .filter(|&i| svd.singular_values[i] > tol)
        .collect();
    CMatrix::from_fn(m.nrows(), keep.len(), |i, j| u[(i, keep[j])])
}

/// Multiply the vector by a unit phase so that its largest-magnitude entry
/// is real and positive. Ties go to the lowest index.
pub fn fix_phase(v: &mut DVector<C64>) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        // Relative slack keeps tie-breaking stable under roundoff.
        if z.norm() > best_abs * (1.0 + 1e-12) {
            best = i;
            best_abs = z.norm();
        }
    }
    if best_abs > 0.0 {
        let phase = v[best].conj() / best_abs;
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

/// Rotate an orthonormal basis of a subspace into a canonical one: pick
/// pivot rows greedily and make the basis the identity on them. Bases that
/// span coordinate subspaces come back as unit vectors.
pub fn canonical_basis(basis: &CMatrix) -> CMatrix {
    let g = basis.ncols();
    if g <= 1 {
        return basis.clone();
    }
    let mut work = basis.clone();
    let mut pivots = Vec::with_capacity(g);
    for col in 0..g {
        let (row, _) = (0..work.nrows())
            .filter(|r| !pivots.contains(r))
            .map(|r| (r, work[(r, col)].norm()))
            .fold(
                (0, -1.0),
                |best, cur| if cur.1 > best.1 * (1.0 + 1e-12) { cur } else { best },
            );
        pivots.push(row);
        let p = work[(row, col)];
        let scaled = work.column(col) / p;
        work.set_column(col, &scaled);
        for other in 0..g {
            if other != col {
                let f = work[(row, other)];
                let updated = work.column(other) - work.column(col) * f;
                work.set_column(other, &updated);
            }
        }
    }
    for col in 0..g {
        let norm = work.column(col).norm();
        let normalized = work.column(col) / C64::new(norm, 0.0);
        work.set_column(col, &normalized);
    }
    work
}

pub fn identity(n: usize) -> CMatrix {
    DMatrix::identity(n, n)
}
