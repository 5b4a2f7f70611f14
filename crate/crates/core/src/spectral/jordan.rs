//! Jordan chains from null spaces of powers of `M = L - lambda`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg;
use crate::qm::{CMatrix, C64};

/// Null space of `a` with exactly `min(count(sigma <= tol), cap)` columns.
fn capped_nullspace(a: &CMatrix, tol: f64, cap: usize) -> CMatrix {
    let (s, v) = linalg::svd_right(a);
    let n = s.len();
    let g = s.iter().filter(|&&x| x <= tol).count().min(cap);
    v.columns(n - g, g).into_owned()
}

fn hstack(parts: &[&CMatrix], rows: usize) -> CMatrix {
    let cols = parts.iter().map(|p| p.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut c = 0;
    for p in parts {
        out.columns_mut(c, p.ncols()).copy_from(p);
        c += p.ncols();
    }
    out
}

/// Chains for one eigenvalue of algebraic multiplicity `p`. Returns the
/// chain lengths and the chain vectors, chain by chain, rank 1 first.
pub(super) fn chains(m: &CMatrix, p: usize, tol: f64) -> Result<(Vec<usize>, CMatrix)> {
    let n = m.nrows();
    let scale = linalg::spectral_norm(m).max(1.0);

    // nulls[k] spans ker M^k, nulls[0] = {0}.
    let mut nulls = vec![CMatrix::zeros(n, 0)];
    let mut power = linalg::identity(n);
    while nulls.last().map_or(0, |z| z.ncols()) < p {
        let k = nulls.len();
        if k > p {
            return Err(Error::ChainConstructionFailed(format!(
                "null spaces of (L - lambda)^k stall at rank {} below the algebraic multiplicity {p}",
                nulls.last().map_or(0, |z| z.ncols())
            )));
        }
        power = m * power;
        let z = capped_nullspace(&power, tol * scale.powi(k as i32 - 1), p);
        if z.ncols() < nulls[k - 1].ncols() {
            return Err(Error::ChainConstructionFailed(
                "null space dimensions are not increasing".into(),
            ));
        }
        nulls.push(z);
    }
    let top = nulls.len() - 1;

    // Walk down from the highest level. `carried` holds images of chain tops
    // started above the current level.
    let mut tops: Vec<(usize, DVector<C64>)> = Vec::new();
    let mut carried = CMatrix::zeros(n, 0);
    for k in (1..=top).rev() {
        let new_count = (nulls[k].ncols() - nulls[k - 1].ncols())
            .checked_sub(carried.ncols())
            .ok_or_else(|| {
                Error::ChainConstructionFailed(format!("inconsistent chain count at level {k}"))
            })?;
        let mut level = carried.clone();
        if new_count > 0 {
            let span = linalg::orth(&hstack(&[&nulls[k - 1], &carried], n), tol);
            let projected = &nulls[k] - &span * (span.adjoint() * &nulls[k]);
            let fresh = linalg::orth(&projected, tol);
            if fresh.ncols() < new_count {
                return Err(Error::ChainConstructionFailed(format!(
                    "found {} of {new_count} new chain tops at level {k}",
                    fresh.ncols()
                )));
            }
            for j in 0..new_count {
                tops.push((k, fresh.column(j).into_owned()));
            }
            level = hstack(&[&level, &fresh.columns(0, new_count).into_owned()], n);
        }
        carried = m * level;
    }

    let mut lengths = Vec::with_capacity(tops.len());
    let mut out = CMatrix::zeros(n, p);
    let mut col = 0;
    for (len, top_vec) in tops {
        let mut chain = vec![top_vec];
        for _ in 1..len {
            let next = m * chain.last().expect("non-empty");
            chain.push(next);
        }
        chain.reverse();
        // Normalize so that the eigenvector has unit norm and a fixed phase.
        let norm = chain[0].norm();
        if norm == 0.0 {
            return Err(Error::ChainConstructionFailed("chain collapsed to zero".into()));
        }
        let mut eig = &chain[0] / C64::new(norm, 0.0);
        linalg::fix_phase(&mut eig);
        let factor = phase_between(&chain[0], &eig) / norm;
        for v in &chain {
            if col >= p {
                return Err(Error::ChainConstructionFailed("too many chain vectors".into()));
            }
            out.set_column(col, &(v * factor));
            col += 1;
        }
        lengths.push(len);
    }
    if col != p {
        return Err(Error::ChainConstructionFailed(format!(
            "built {col} chain vectors, expected {p}"
        )));
    }
    Ok((lengths, out))
}

/// The unit phase `c` with `c * from` pointing along `to`.
fn phase_between(from: &DVector<C64>, to: &DVector<C64>) -> C64 {
    let overlap = from.dotc(to);
    if overlap.norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        overlap / overlap.norm()
    }
}
