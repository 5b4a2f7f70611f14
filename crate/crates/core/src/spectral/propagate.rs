use rayon::prelude::*;

use super::{analyze, AnalyzeOptions, SpectralSystem};
use crate::error::{Error, Result};
use crate::generators::Liouvillian;
use crate::qm::{expectation, purity, DensityMatrix, Operator, C64};
use crate::vectorization::{mho, mho_inv, SuperKet};

/// States of a density matrix sampled on a time grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn traces(&self) -> Vec<C64> {
        self.states.iter().map(|s| s.operator().trace()).collect()
    }

    pub fn purities(&self) -> Vec<f64> {
        self.states.iter().map(purity).collect()
    }

    pub fn expectations(&self, op: &Operator) -> Result<Vec<C64>> {
        self.states.iter().map(|s| expectation(s, op)).collect()
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time {t} is not finite")));
    }
    Ok(())
}

fn to_state(v: &SuperKet) -> Result<DensityMatrix> {
    DensityMatrix::from_hermitized(&mho_inv(v)?)
}

/// `rho(t) = e^{tL} rho(0)` on every time, by spectral expansion.
pub fn propagate(l: &Liouvillian, rho0: &DensityMatrix, times: &[f64]) -> Result<Trajectory> {
    let sys = analyze(l, &AnalyzeOptions::default())?;
    propagate_system(&sys, rho0, times)
}

/// Like [`propagate`] with a precomputed analysis.
pub fn propagate_system(sys: &SpectralSystem, rho0: &DensityMatrix, times: &[f64]) -> Result<Trajectory> {
    if rho0.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: rho0.dim(),
        });
    }
    check_times(times)?;
    let v0 = mho(rho0.operator());
    let states = times
        .par_iter()
        .map(|&t| sys.evolve(&v0, t).and_then(|v| to_state(&v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: times.to_vec(),
        states,
    })
}

/// `expm(tL) |rho(0)>>`, independent of [`analyze`].
pub fn propagate_expm_oracle(l: &Liouvillian, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: rho0.dim(),
        });
    }
    check_times(&[t])?;
    let u = l.op().scale(C64::new(t, 0.0)).expm()?;
    to_state(&u.apply(&mho(rho0.operator()))?)
}

/// An eigenvalue cluster with vanishing real part.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroMode {
    pub eigenvalue: C64,
    pub algebraic: usize,
    pub geometric: usize,
    pub max_chain: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub max_real_part: f64,
    pub stable: bool,
    pub zero_modes: Vec<ZeroMode>,
    /// Some zero mode has geometric multiplicity above 1 or a chain longer
    /// than 1.
    pub flagged: bool,
}

pub fn stability_report(sys: &SpectralSystem) -> StabilityReport {
    let tol = sys.tol_zero();
    let max_real_part = sys
        .clusters()
        .iter()
        .map(|c| c.eigenvalue.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let zero_modes: Vec<ZeroMode> = sys
        .clusters()
        .iter()
        .filter(|c| c.eigenvalue.re.abs() <= tol)
        .map(|c| ZeroMode {
            eigenvalue: c.eigenvalue,
            algebraic: c.algebraic,
            geometric: c.geometric,
            max_chain: c.max_chain,
        })
        .collect();
    let flagged = zero_modes.iter().any(|z| z.geometric > 1 || z.max_chain > 1);
    StabilityReport {
        max_real_part,
        stable: max_real_part <= tol,
        zero_modes,
        flagged,
    }
}

/// The unique stationary state: the zero-eigenvalue right vector,
/// normalized to unit trace.
///
/// More than one eigenvalue with `|Re lambda| <= tol_zero` is an error. Its
/// payload holds the zero-eigenvalue modes when there are several, and all
/// modes with vanishing real part otherwise.
pub fn steady_state(sys: &SpectralSystem) -> Result<DensityMatrix> {
    let tol = sys.tol_zero();
    let report = stability_report(sys);
    if !report.stable {
        return Err(Error::Unstable {
            max_re: report.max_real_part,
        });
    }
    let zero: Vec<usize> = (0..sys.eigenvalues().len())
        .filter(|&k| sys.eigenvalues()[k].re.abs() <= tol)
        .collect();
    match zero.as_slice() {
        [] => Err(Error::InvalidParameter(
            "generator has no eigenvalue with zero real part".into(),
        )),
        [k] => {
            let op = sys.right_operator(*k);
            let tr = op.trace();
            if tr.norm() <= f64::EPSILON * op.max_abs() {
                return Err(Error::InvalidDensityMatrix("stationary mode is traceless".into()));
            }
            DensityMatrix::from_hermitized(&op.scale(tr.inv()))
        }
        many => {
            // Report the kernel when it is degenerate, otherwise every
            // non-decaying mode.
            let kernel: Vec<usize> = many
                .iter()
                .copied()
                .filter(|&k| sys.eigenvalues()[k].norm() <= tol)
                .collect();
            let modes = if kernel.len() > 1 { kernel.as_slice() } else { many };
            Err(Error::NonUniqueSteadyState {
                basis: modes.iter().map(|&k| sys.right_operator(k)).collect(),
            })
        }
    }
}
