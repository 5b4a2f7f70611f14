//! Spectral analysis of Liouvillians and the propagators built on it.
//!
//! [`analyze`] classifies a generator as skew-Hermitian, diagonalizable or
//! defective and stores right vectors as the columns of a matrix `B` and
//! left vectors as the rows of `B^-1`. Columns are grouped into Jordan
//! blocks; a block of length `l` holds the chain `zeta(1..l)` with
//! `(L - lambda) zeta(m) = zeta(m - 1)` in consecutive columns.

mod jordan;
mod pictures;
mod propagate;

use nalgebra::{DVector, RowDVector};

use crate::error::{Error, Result};
use crate::generators::Liouvillian;
use crate::linalg;
use crate::qm::{CMatrix, Operator, C64};
use crate::vectorization::{mho_inv, SuperKet, SuperOp};

pub use pictures::{dyson_propagator, heisenberg_superket, DysonOutcome};
pub use propagate::{
    propagate, propagate_expm_oracle, propagate_system, stability_report, steady_state, StabilityReport,
    Trajectory, ZeroMode,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralClass {
    SkewHermitian,
    Diagonalizable,
    Defective,
}

/// Which expansion of `e^{tL}` to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expansion {
    /// `sum_k e^{t lambda_k} |zeta_k>> <<zeta_k|`, skew-Hermitian only.
    Orthonormal,
    /// `sum_k e^{t lambda_k} |zeta_k>> <<xi_k|`, non-defective only.
    Biorthonormal,
    /// Chain expansion with polynomial-in-`t` terms, always applicable.
    Generalized,
}

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    /// Eigenvalues closer than this are one cluster. Default
    /// `max(1e-10, 1e-8 ||L||)`.
    pub tol_cluster: Option<f64>,
    /// Relative threshold on the smallest singular value of `B`. Default
    /// `d^2 * eps`.
    pub tol_diag: Option<f64>,
    /// `|Re lambda|` below this counts as zero. Default `1e-9 max(1, ||L||)`.
    pub tol_zero: Option<f64>,
    /// Largest Liouville-space size for which Jordan chains are built.
    pub max_jordan_dim: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            tol_cluster: None,
            tol_diag: None,
            tol_zero: None,
            max_jordan_dim: 16,
        }
    }
}

/// A Jordan block: eigenvalue and the column range of its chain in `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: C64,
    pub start: usize,
    pub len: usize,
}

/// Multiplicity data of one eigenvalue cluster.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenCluster {
    pub eigenvalue: C64,
    pub algebraic: usize,
    pub geometric: usize,
    pub max_chain: usize,
}

/// Ranked right and left chains of a single Jordan block.
#[derive(Clone, Debug)]
pub struct JordanChain {
    pub eigenvalue: C64,
    pub right: Vec<SuperKet>,
    pub left: Vec<SuperKet>,
}

#[derive(Clone, Debug)]
pub struct SpectralSystem {
    dim: usize,
    class: SpectralClass,
    eigenvalues: Vec<C64>,
    right: CMatrix,
    left: CMatrix,
    blocks: Vec<JordanBlock>,
    clusters: Vec<EigenCluster>,
    norm: f64,
    tol_zero: f64,
    chain_residual: f64,
}

impl SpectralSystem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class(&self) -> SpectralClass {
        self.class
    }

    /// Eigenvalue attached to each column of `B`.
    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    /// `B`, the right (generalized) eigenvectors as columns.
    pub fn right_matrix(&self) -> &CMatrix {
        &self.right
    }

    /// `B^-1`, the left (generalized) eigenvectors as rows.
    pub fn left_matrix(&self) -> &CMatrix {
        &self.left
    }

    pub fn blocks(&self) -> &[JordanBlock] {
        &self.blocks
    }

    pub fn clusters(&self) -> &[EigenCluster] {
        &self.clusters
    }

    pub fn tol_zero(&self) -> f64 {
        self.tol_zero
    }

    /// Spectral norm of the analysed generator.
    pub fn generator_norm(&self) -> f64 {
        self.norm
    }

    /// `max ||(L - lambda) zeta(m) - zeta(m-1)||` over all chains.
    pub fn chain_residual(&self) -> f64 {
        self.chain_residual
    }

    pub fn right(&self, k: usize) -> SuperKet {
        SuperKet::new(self.dim, self.right.column(k).into_owned()).expect("column of length d^2")
    }

    /// The left vector `xi_k` as a superket, so that `<<xi_k|` is row `k` of
    /// `B^-1`.
    pub fn left(&self, k: usize) -> SuperKet {
        SuperKet::new(self.dim, self.left.row(k).adjoint()).expect("row of length d^2")
    }

    pub fn right_operator(&self, k: usize) -> Operator {
        mho_inv(&self.right(k)).expect("finite column")
    }

    pub fn chains(&self) -> Vec<JordanChain> {
        self.blocks
            .iter()
            .map(|b| JordanChain {
                eigenvalue: b.eigenvalue,
                right: (b.start..b.start + b.len).map(|k| self.right(k)).collect(),
                left: (b.start..b.start + b.len).map(|k| self.left(k)).collect(),
            })
            .collect()
    }

    /// The projector `|zeta_k>> <<xi_k|`.
    pub fn projector(&self, k: usize) -> CMatrix {
        self.right.column(k) * self.left.row(k)
    }

    /// `max |<<xi_k|zeta_k'>> - delta_kk'|`.
    pub fn biorthonormality_defect(&self) -> f64 {
        let n = self.right.ncols();
        linalg::max_abs(&(&self.left * &self.right - linalg::identity(n)))
    }

    /// `max |sum_k |zeta_k>><<xi_k| - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let n = self.right.nrows();
        linalg::max_abs(&(&self.right * &self.left - linalg::identity(n)))
    }

    pub fn supports(&self, expansion: Expansion) -> bool {
        match expansion {
            Expansion::Orthonormal => self.class == SpectralClass::SkewHermitian,
            Expansion::Biorthonormal => self.class != SpectralClass::Defective,
            Expansion::Generalized => true,
        }
    }

    /// The expansion matching the class.
    pub fn natural_expansion(&self) -> Expansion {
        match self.class {
            SpectralClass::SkewHermitian => Expansion::Orthonormal,
            SpectralClass::Diagonalizable => Expansion::Biorthonormal,
            SpectralClass::Defective => Expansion::Generalized,
        }
    }

    /// Coefficients `<<xi_k|rho>>` for the chosen expansion.
    fn coefficients(&self, rho: &DVector<C64>, expansion: Expansion) -> DVector<C64> {
        match expansion {
            Expansion::Orthonormal => self.right.adjoint() * rho,
            _ => &self.left * rho,
        }
    }

    fn combine(&self, coeffs: &DVector<C64>, t: f64, expansion: Expansion) -> DVector<C64> {
        let n = self.right.nrows();
        let mut out = DVector::zeros(n);
        match expansion {
            Expansion::Orthonormal | Expansion::Biorthonormal => {
                for (k, lambda) in self.eigenvalues.iter().enumerate() {
                    let w = (lambda * t).exp() * coeffs[k];
                    out.axpy(w, &self.right.column(k), C64::new(1.0, 0.0));
                }
            }
            Expansion::Generalized => {
                for b in &self.blocks {
                    let e = (b.eigenvalue * t).exp();
                    // rank m = 1..len sits in column start + m - 1
                    for m in 1..=b.len {
                        let c = coeffs[b.start + m - 1] * e;
                        let mut factor = 1.0;
                        for n_ in 0..m {
                            if n_ > 0 {
                                factor *= t / n_ as f64;
                            }
                            let col = b.start + m - n_ - 1;
                            out.axpy(c * factor, &self.right.column(col), C64::new(1.0, 0.0));
                        }
                    }
                }
            }
        }
        out
    }

    /// `e^{tL} |rho>>` with the expansion matching the class.
    pub fn evolve(&self, rho: &SuperKet, t: f64) -> Result<SuperKet> {
        self.evolve_with(rho, t, self.natural_expansion())
    }

    pub fn evolve_with(&self, rho: &SuperKet, t: f64, expansion: Expansion) -> Result<SuperKet> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        self.check_expansion(expansion)?;
        if t == 0.0 {
            return Ok(rho.clone());
        }
        let coeffs = self.coefficients(rho.data(), expansion);
        SuperKet::new(self.dim, self.combine(&coeffs, t, expansion))
    }

    /// `e^{tL}` as a superoperator.
    pub fn propagator(&self, t: f64, expansion: Expansion) -> Result<SuperOp> {
        self.check_expansion(expansion)?;
        if t == 0.0 {
            return Ok(SuperOp::identity(self.dim));
        }
        let n = self.right.nrows();
        let mut out = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = DVector::zeros(n);
            e[j] = C64::new(1.0, 0.0);
            let col = self.combine(&self.coefficients(&e, expansion), t, expansion);
            out.set_column(j, &col);
        }
        SuperOp::new(self.dim, out)
    }

    fn check_expansion(&self, expansion: Expansion) -> Result<()> {
        if !self.supports(expansion) {
            return Err(Error::InvalidParameter(format!(
                "{expansion:?} expansion does not apply to a {:?} generator",
                self.class
            )));
        }
        Ok(())
    }

    /// Eigenvalues of `L`, as a row of `<<xi_k| L |zeta_k>>`, for diagnostics.
    pub fn rayleigh_quotients(&self, l: &Liouvillian) -> RowDVector<C64> {
        let lz = l.matrix() * &self.right;
        RowDVector::from_fn(self.right.ncols(), |_, k| {
            self.left.row(k).dot(&lz.column(k).transpose())
        })
    }
}

/// Single-linkage clusters of `values` with threshold `tol`, returned as
/// index lists.
fn cluster(values: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_of[r] == usize::MAX {
            root_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_of[r]].push(i);
    }
    groups
}

/// Deterministic ordering: real part descending, then imaginary ascending,
/// comparing on a grid of width `tol`.
fn ordering_key(z: C64, tol: f64) -> (i64, i64) {
    let q = |x: f64| (x / tol).round() as i64;
    (-q(z.re), q(z.im))
}

struct Cluster {
    mean: C64,
    size: usize,
}

fn clusters_of(values: &[C64], tol: f64) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = cluster(values, tol)
        .into_iter()
        .map(|idx| {
            let sum: C64 = idx.iter().map(|&i| values[i]).sum();
            Cluster {
                mean: sum / idx.len() as f64,
                size: idx.len(),
            }
        })
        .collect();
    out.sort_by_key(|c| ordering_key(c.mean, tol));
    out
}

/// Eigen-decomposition (or Jordan decomposition) of a generator.
pub fn analyze(l: &Liouvillian, opts: &AnalyzeOptions) -> Result<SpectralSystem> {
    let m = l.matrix();
    if !linalg::is_finite(m) {
        return Err(Error::NonFinite);
    }
    let n = m.nrows();
    let norm = linalg::spectral_norm(m);
    let tol_cluster = opts.tol_cluster.unwrap_or((1e-8 * norm).max(1e-10));
    let tol_diag = opts.tol_diag.unwrap_or(n as f64 * f64::EPSILON);
    let tol_zero = opts.tol_zero.unwrap_or(1e-9 * norm.max(1.0));
    for (name, v) in [
        ("tol_cluster", tol_cluster),
        ("tol_diag", tol_diag),
        ("tol_zero", tol_zero),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }

    let skew = linalg::max_abs(&(m + m.adjoint()));
    if skew <= 1e-10 * norm.max(1.0) {
        return Ok(analyze_skew(l, norm, tol_cluster, tol_zero));
    }

    let values = linalg::eigenvalues(m);
    let clusters = clusters_of(&values, tol_cluster);
    let mut bases = Vec::with_capacity(clusters.len());
    let mut defective = false;
    for c in &clusters {
        let shifted = m - linalg::identity(n) * c.mean;
        let basis = eigenbasis(&shifted, tol_cluster, c.size);
        defective |= basis.ncols() < c.size;
        bases.push(basis);
    }

    if defective {
        if n > opts.max_jordan_dim {
            return Err(Error::ChainConstructionFailed(format!(
                "defective generator of size {n} exceeds the Jordan limit {}",
                opts.max_jordan_dim
            )));
        }
        let mut parts = Vec::with_capacity(clusters.len());
        for (c, basis) in clusters.iter().zip(bases) {
            if basis.ncols() == c.size {
                parts.push((c.mean, basis.ncols(), vec![1; basis.ncols()], basis));
            } else {
                let shifted = m - linalg::identity(n) * c.mean;
                let (lengths, chains) = jordan::chains(&shifted, c.size, tol_cluster)?;
                parts.push((c.mean, basis.ncols(), lengths, chains));
            }
        }
        return assemble(l, SpectralClass::Defective, parts, norm, tol_diag, tol_zero);
    }

    let parts = clusters
        .iter()
        .zip(bases)
        .map(|(c, basis)| (c.mean, c.size, vec![1; c.size], basis))
        .collect();
    assemble(l, SpectralClass::Diagonalizable, parts, norm, tol_diag, tol_zero)
}

/// Orthonormal eigenbasis of a skew-Hermitian generator from the Hermitian
/// eigenproblem of `iL`.
fn analyze_skew(l: &Liouvillian, norm: f64, tol_cluster: f64, tol_zero: f64) -> SpectralSystem {
    let m = l.matrix();
    let n = m.nrows();
    let (mu, v) = linalg::hermitian_eigen(&(m * C64::new(0.0, 1.0)));
    let values: Vec<C64> = mu.iter().map(|&x| C64::new(0.0, -x)).collect();
    let clusters = clusters_of(&values, tol_cluster);

    // Reorder columns to follow the cluster ordering.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&k| ordering_key(values[k], tol_cluster));
    let right = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    let mut right = right;
    for j in 0..n {
        let mut col = right.column(j).into_owned();
        linalg::fix_phase(&mut col);
        right.set_column(j, &col);
    }
    let eigenvalues: Vec<C64> = order.iter().map(|&k| values[k]).collect();
    let left = right.adjoint();
    let blocks = (0..n)
        .map(|k| JordanBlock {
            eigenvalue: eigenvalues[k],
            start: k,
            len: 1,
        })
        .collect();
    let clusters = clusters
        .iter()
        .map(|c| EigenCluster {
            eigenvalue: c.mean,
            algebraic: c.size,
            geometric: c.size,
            max_chain: 1,
        })
        .collect();
    SpectralSystem {
        dim: l.dim(),
        class: SpectralClass::SkewHermitian,
        eigenvalues,
        right,
        left,
        blocks,
        clusters,
        norm,
        tol_zero,
        chain_residual: 0.0,
    }
}

/// Eigenvectors of `shifted = L - lambda` spanning at most `p` directions:
/// the right singular vectors below `tol`, at least one.
fn eigenbasis(shifted: &CMatrix, tol: f64, p: usize) -> CMatrix {
    let (s, v) = linalg::svd_right(shifted);
    let n = s.len();
    let below = s.iter().filter(|&&x| x <= tol).count();
    let g = below.clamp(1, p);
    let basis = v.columns(n - g, g).into_owned();
    let mut basis = linalg::canonical_basis(&basis);
    for j in 0..g {
        let mut col = basis.column(j).into_owned();
        linalg::fix_phase(&mut col);
        basis.set_column(j, &col);
    }
    basis
}

type Part = (C64, usize, Vec<usize>, CMatrix);

/// Builds the system from per-cluster `(eigenvalue, geometric, chain
/// lengths, columns)` and inverts `B`.
fn assemble(
    l: &Liouvillian,
    class: SpectralClass,
    parts: Vec<Part>,
    norm: f64,
    tol_diag: f64,
    tol_zero: f64,
) -> Result<SpectralSystem> {
    let m = l.matrix();
    let n = m.nrows();
    let mut right = CMatrix::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut blocks = Vec::new();
    let mut clusters = Vec::new();
    let mut col = 0;
    for (lambda, geometric, lengths, columns) in parts {
        let mut local = 0;
        for &len in &lengths {
            blocks.push(JordanBlock {
                eigenvalue: lambda,
                start: col,
                len,
            });
            for _ in 0..len {
                right.set_column(col, &columns.column(local));
                eigenvalues.push(lambda);
                col += 1;
                local += 1;
            }
        }
        clusters.push(EigenCluster {
            eigenvalue: lambda,
            algebraic: local,
            geometric,
            max_chain: lengths.iter().copied().max().unwrap_or(0),
        });
    }
    if col != n {
        return Err(Error::ChainConstructionFailed(format!(
            "collected {col} basis vectors for a space of dimension {n}"
        )));
    }

    let s = linalg::singular_values(&right);
    let (s_max, s_min) = (s[0], s[s.len() - 1]);
    if s_min.is_nan() || s_min <= tol_diag * s_max {
        return Err(Error::ChainConstructionFailed(format!(
            "eigenvector matrix is numerically singular (sigma_min/sigma_max = {:e}); \
             try a larger clustering tolerance",
            s_min / s_max
        )));
    }
    let left = right
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::ChainConstructionFailed("eigenvector matrix is singular".into()))?;

    let mut chain_residual: f64 = 0.0;
    for b in &blocks {
        for k in 0..b.len {
            let z = right.column(b.start + k);
            let mut r = m * z - z * b.eigenvalue;
            if k > 0 {
                r -= right.column(b.start + k - 1);
            }
            chain_residual = chain_residual.max(linalg::max_abs_vec(&r));
        }
    }

    Ok(SpectralSystem {
        dim: l.dim(),
        class,
        eigenvalues,
        right,
        left,
        blocks,
        clusters,
        norm,
        tol_zero,
        chain_residual,
    })
}
