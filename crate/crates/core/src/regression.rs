//! Self-checks of the two-level model against its closed-form solution.

use std::f64::consts::PI;

use crate::kraus::{channel_superop, completeness_defect, kraus_from_superop};
use crate::linalg;
use crate::qm::{purity, DensityMatrix, Operator, C64};
use crate::spectral::{analyze, propagate, propagate_expm_oracle, steady_state, AnalyzeOptions};
use crate::tls::TlsParams;
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Largest observed deviation.
    pub error: f64,
    pub tolerance: f64,
}

fn outcome(name: &'static str, error: f64, tolerance: f64) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: error <= tolerance,
        error,
        tolerance,
    }
}

fn failed(name: &'static str, tolerance: f64) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: false,
        error: f64::INFINITY,
        tolerance,
    }
}

/// Greedy multiset distance between two eigenvalue lists.
pub fn multiset_distance(got: &[C64], expected: &[C64]) -> f64 {
    if got.len() != expected.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; got.len()];
    let mut worst: f64 = 0.0;
    for e in expected {
        let best = (0..got.len())
            .filter(|&i| !used[i])
            .min_by(|&a, &b| (got[a] - e).norm().total_cmp(&(got[b] - e).norm()))
            .expect("equal lengths");
        used[best] = true;
        worst = worst.max((got[best] - e).norm());
    }
    worst
}

fn max_diff(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    linalg::max_abs(&(a.matrix() - b.matrix()))
}

fn coherent_state() -> DensityMatrix {
    let rho = Operator::from_rows(
        2,
        &[
            C64::new(0.6, 0.0),
            C64::new(0.3, 0.2),
            C64::new(0.3, -0.2),
            C64::new(0.4, 0.0),
        ],
    )
    .expect("2x2");
    DensityMatrix::new(rho).expect("valid state")
}

fn eigenvalues(params: &TlsParams) -> Result<(f64, f64)> {
    let (_, lb) = params.generators();
    let g = params.gamma();
    let sys = analyze(&lb, &AnalyzeOptions::default())?;
    let expected: Vec<C64> = [0.0, -g / 2.0, -g / 2.0, -g]
        .iter()
        .map(|&x| C64::new(x, 0.0))
        .collect();
    let dissipator = multiset_distance(sys.eigenvalues(), &expected);

    let dressed = params.clone().with_delta(0.7)?;
    let sys = analyze(&dressed.full_generator(), &AnalyzeOptions::default())?;
    let expected = [
        C64::new(0.0, 0.0),
        C64::new(-g / 2.0, -0.7),
        C64::new(-g / 2.0, 0.7),
        C64::new(-g, 0.0),
    ];
    Ok((dissipator, multiset_distance(sys.eigenvalues(), &expected)))
}

fn closed_form_agreement(params: &TlsParams) -> Result<f64> {
    let params = params.clone().with_delta(0.7)?;
    let l = params.full_generator();
    let times = [0.0, 0.1, 1.0, 10.0];
    let mut worst: f64 = 0.0;
    for rho0 in [DensityMatrix::basis_state(2, 0)?, coherent_state()] {
        let tr = propagate(&l, &rho0, &times)?;
        for (t, spectral) in times.iter().zip(&tr.states) {
            let closed = params.closed_form_rho(&rho0, *t)?;
            let oracle = propagate_expm_oracle(&l, &rho0, *t)?;
            worst = worst
                .max(max_diff(&closed, spectral))
                .max(max_diff(&closed, &oracle))
                .max(max_diff(spectral, &oracle));
        }
    }
    Ok(worst)
}

fn steady(params: &TlsParams) -> Result<(f64, f64, f64)> {
    let (_, lb) = params.generators();
    let sys = analyze(&lb, &AnalyzeOptions::default())?;
    let rho = steady_state(&sys)?;
    let (ground, excited) = params.equilibrium_populations();
    let expected = Operator::diagonal(&[C64::new(excited, 0.0), C64::new(ground, 0.0)])?;
    let exact = linalg::max_abs(&(rho.matrix() - expected.matrix()));
    let late = propagate(&lb, &DensityMatrix::basis_state(2, 0)?, &[50.0 / params.gamma()])?;
    let relaxed = max_diff(&late.states[0], &rho);

    let thermal = TlsParams::thermal(1.0, params.gamma0, 3f64.ln())?;
    let gibbs = match thermal.gibbs_populations() {
        Some((g, e)) => {
            let (tg, te) = thermal.equilibrium_populations();
            (g - tg).abs().max((e - te).abs())
        }
        None => f64::INFINITY,
    };
    Ok((exact, relaxed, gibbs))
}

fn kraus_completeness(params: &TlsParams) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in [0.0, 0.1, 1.0, 5.0, 50.0] {
        worst = worst.max(completeness_defect(&params.closed_form_kraus(t, false)?));
    }
    Ok(worst)
}

fn kraus_channels(params: &TlsParams) -> Result<(f64, f64)> {
    let (_, lb) = params.generators();
    let dressed = params.clone().with_delta(0.7)?;
    let full = dressed.full_generator();
    let (mut bare, mut unitary): (f64, f64) = (0.0, 0.0);
    for t in [0.1, 1.0, 5.0] {
        let s = lb.op().scale(C64::new(t, 0.0)).expm()?;
        let extracted = channel_superop(&kraus_from_superop(&s, None)?);
        let closed = channel_superop(&params.closed_form_kraus(t, false)?);
        bare = bare.max(linalg::max_abs(&(extracted.matrix() - closed.matrix())));

        let s = full.op().scale(C64::new(t, 0.0)).expm()?;
        let extracted = channel_superop(&kraus_from_superop(&s, None)?);
        let closed = channel_superop(&dressed.closed_form_kraus(t, true)?);
        unitary = unitary.max(linalg::max_abs(&(extracted.matrix() - closed.matrix())));
    }
    Ok((bare, unitary))
}

fn purities() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for theta in [0.0, PI / 4.0, PI / 3.0] {
        let e = C64::from_polar(1.0, theta);
        let half = C64::new(0.5, 0.0);
        let rho1 = Operator::from_rows(2, &[half, -e * 0.5, -e.conj() * 0.5, half])?;
        worst = worst.max((purity(&DensityMatrix::new(rho1)?) - 1.0).abs());
    }
    let s = 2f64.sqrt() / 3.0 * (PI / 3.0).sin();
    let half = C64::new(0.5, 0.0);
    let rho2 = Operator::from_rows(2, &[half, C64::new(0.0, -s), C64::new(0.0, s), half])?;
    worst = worst.max((purity(&DensityMatrix::new(rho2)?) - 5.0 / 6.0).abs());
    Ok(worst)
}

/// Runs every check for the model with `gamma0 = 1`, `nbar = 1/2`.
pub fn tls_checks() -> Vec<CheckOutcome> {
    let params = TlsParams::new(1.0, 1.0, 0.5)
        .and_then(|p| p.with_delta(0.0))
        .expect("valid parameters");
    let mut out = Vec::new();
    match eigenvalues(&params) {
        Ok((a, b)) => {
            out.push(outcome("dissipator eigenvalues", a, 1e-10));
            out.push(outcome("full generator eigenvalues", b, 1e-10));
        }
        Err(_) => {
            out.push(failed("dissipator eigenvalues", 1e-10));
            out.push(failed("full generator eigenvalues", 1e-10));
        }
    }
    out.push(match closed_form_agreement(&params) {
        Ok(e) => outcome("closed form vs spectral vs expm", e, 1e-9),
        Err(_) => failed("closed form vs spectral vs expm", 1e-9),
    });
    match steady(&params) {
        Ok((a, b, c)) => {
            out.push(outcome("steady state populations", a, 1e-10));
            out.push(outcome("relaxation to steady state", b, 1e-8));
            out.push(outcome("gibbs populations", c, 1e-12));
        }
        Err(_) => {
            out.push(failed("steady state populations", 1e-10));
            out.push(failed("relaxation to steady state", 1e-8));
            out.push(failed("gibbs populations", 1e-12));
        }
    }
    out.push(match kraus_completeness(&params) {
        Ok(e) => outcome("kraus completeness", e, 1e-12),
        Err(_) => failed("kraus completeness", 1e-12),
    });
    match kraus_channels(&params) {
        Ok((a, b)) => {
            out.push(outcome("kraus channel equality", a, 1e-8));
            out.push(outcome("dressed kraus channel equality", b, 1e-8));
        }
        Err(_) => {
            out.push(failed("kraus channel equality", 1e-8));
            out.push(failed("dressed kraus channel equality", 1e-8));
        }
    }
    out.push(match purities() {
        Ok(e) => outcome("reference purities", e, 1e-12),
        Err(_) => failed("reference purities", 1e-12),
    });
    out
}
