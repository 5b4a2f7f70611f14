//! Heisenberg and interaction pictures.

use crate::error::{Error, Result};
use crate::generators::{GeneratorKind, Liouvillian};
use crate::linalg;
use crate::qm::{CMatrix, Operator, C64};
use crate::vectorization::{mho, SuperKet, SuperOp};

/// `U(t)^dagger |A>>` with `U(t) = e^{tL}` for a unitary generator.
pub fn heisenberg_superket(l: &Liouvillian, a: &Operator, t: f64) -> Result<SuperKet> {
    if l.kind() != GeneratorKind::Unitary {
        return Err(Error::NonUnitaryKind);
    }
    if a.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: a.dim(),
        });
    }
    let u = l.op().scale(C64::new(t, 0.0)).expm()?;
    u.dagger().apply(&mho(a))
}

#[derive(Clone, Debug)]
pub struct DysonOutcome {
    pub propagator: SuperOp,
    /// Max-abs entry of the highest-order term kept.
    pub residual_estimate: f64,
}

/// Truncated Dyson series for `d/dt U = (L0 + L'(t)) U`:
/// `U(t) = U0(t) (I + sum_k I_k(t))` with
/// `I_k(s) = int_0^s L'_I(r) I_{k-1}(r) dr` and
/// `L'_I(s) = U0(s)^-1 L'(s) U0(s)`.
///
/// Each nested integral uses the composite trapezoid rule on `steps`
/// equal intervals.
pub fn dyson_propagator<F>(
    l0: &Liouvillian,
    lprime: F,
    t: f64,
    order: usize,
    steps: usize,
) -> Result<DysonOutcome>
where
    F: Fn(f64) -> SuperOp,
{
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "dyson order must be 1, 2 or 3, got {order}"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("dyson steps must be positive".into()));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time {t} must be finite and >= 0"
        )));
    }
    let d = l0.dim();
    let n = d * d;
    let h = t / steps as f64;
    let step_fwd = l0.op().scale(C64::new(h, 0.0)).expm()?.into_matrix();
    let step_bwd = l0.op().scale(C64::new(-h, 0.0)).expm()?.into_matrix();

    let mut fwd = linalg::identity(n);
    let mut bwd = linalg::identity(n);
    let mut integrand = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        if j > 0 {
            fwd = &step_fwd * &fwd;
            bwd = &bwd * &step_bwd;
        }
        let lp = lprime(j as f64 * h);
        if lp.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: lp.dim(),
            });
        }
        integrand.push(&bwd * lp.matrix() * &fwd);
    }

    let half = C64::new(h / 2.0, 0.0);
    let mut previous: Vec<CMatrix> = vec![linalg::identity(n); steps + 1];
    let mut total = linalg::identity(n);
    let mut last_term = CMatrix::zeros(n, n);
    for _ in 0..order {
        let mut current = Vec::with_capacity(steps + 1);
        current.push(CMatrix::zeros(n, n));
        for j in 1..=steps {
            let inc = (&integrand[j] * &previous[j] + &integrand[j - 1] * &previous[j - 1]) * half;
            let next = &current[j - 1] + inc;
            current.push(next);
        }
        last_term = current[steps].clone();
        total += &last_term;
        previous = current;
    }
    let propagator = SuperOp::new(d, fwd * total)?;
    Ok(DysonOutcome {
        propagator,
        residual_estimate: linalg::max_abs(&last_term),
    })
}
