//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;

use liouville_core::random;
use liouville_core::regression::{tls_checks, CheckOutcome};
use liouville_core::{
    analyze, dyson_propagator, expectation, mho, mho_inv, stability_report, triple_superop,
    unitary_liouvillian, AnalyzeOptions, CMatrix, DensityMatrix, Expansion, Liouvillian, Operator,
    SpectralClass, SuperOp, C64,
};
use nalgebra::SymmetricEigen;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Line {
    label: String,
    passed: bool,
    detail: String,
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn spectral_norm(m: &CMatrix) -> f64 {
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

fn from_checks(label: &str, checks: &[CheckOutcome], names: &[&str]) -> Line {
    let picked: Vec<&CheckOutcome> = checks.iter().filter(|c| names.contains(&c.name)).collect();
    let passed = picked.len() == names.len() && picked.iter().all(|c| c.passed);
    let detail = picked
        .iter()
        .map(|c| format!("{}: {:.3e} (tol {:.0e})", c.name, c.error, c.tolerance))
        .collect::<Vec<_>>()
        .join("; ");
    Line {
        label: label.into(),
        passed,
        detail,
    }
}

fn measured(label: &str, worst: f64, tol: f64) -> Line {
    Line {
        label: label.into(),
        passed: worst <= tol,
        detail: format!("worst {worst:.3e} (tol {tol:.0e})"),
    }
}

fn triple_product() -> Line {
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for d in 2..=4 {
        for _ in 0..1000 {
            let a = random::complex_operator(&mut rng, d);
            let b = random::complex_operator(&mut rng, d);
            let c = random::complex_operator(&mut rng, d);
            let lhs = mho(&(&(&a * &b) * &c));
            let rhs = triple_superop(&a, &c).unwrap().apply(&mho(&b)).unwrap();
            let scale =
                (spectral_norm(a.matrix()) * spectral_norm(b.matrix()) * spectral_norm(c.matrix())).max(1.0);
            worst = worst.max((&lhs - &rhs).max_abs() / scale);
        }
    }
    measured("triple-product property", worst, 1e-12)
}

fn physicality() -> Line {
    let mut rng = StdRng::seed_from_u64(7);
    let (mut trace, mut herm, mut min_eig): (f64, f64, f64) = (0.0, 0.0, f64::INFINITY);
    let mut failures = 0;
    for k in 0..200 {
        let d = 2 + k % 2;
        let jumps = rng.random_range(1..=3);
        let model = random::lindblad_model(&mut rng, d, jumps);
        let rho0 = random::density_matrix(&mut rng, d);
        let l = match liouville_core::lindblad_liouvillian(&model) {
            Ok(l) => l,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let sys = match analyze(&l, &AnalyzeOptions::default()) {
            Ok(s) => s,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        for t in [0.1, 1.0, 5.0] {
            let raw = match sys.evolve(&mho(rho0.operator()), t).and_then(|v| mho_inv(&v)) {
                Ok(op) => op,
                Err(_) => {
                    failures += 1;
                    continue;
                }
            };
            trace = trace.max((raw.trace() - C64::new(1.0, 0.0)).norm());
            herm = herm.max(raw.hermitian_defect());
            let lowest = raw
                .hermitize()
                .hermitian_eigenvalues()
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            min_eig = min_eig.min(lowest);
        }
    }
    Line {
        label: "physicality along trajectories".into(),
        passed: failures == 0 && trace <= 1e-10 && herm <= 1e-10 && min_eig >= -1e-8,
        detail: format!(
            "trace {trace:.3e} (tol 1e-10); hermiticity {herm:.3e} (tol 1e-10); min eigenvalue {min_eig:.3e} (tol -1e-8); failures {failures}"
        ),
    }
}

fn wrap(phase: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    (phase + std::f64::consts::PI).rem_euclid(tau) - std::f64::consts::PI
}

fn isolated_conservation() -> Line {
    let mut rng = StdRng::seed_from_u64(8);
    let (mut pop, mut mag, mut phase): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let times: Vec<f64> = (0..=40).map(|k| 0.25 * k as f64).collect();
    for d in 2..=4 {
        for _ in 0..30 {
            let h = random::hermitian(&mut rng, d);
            let rho0 = random::density_matrix(&mut rng, d);
            let eig = SymmetricEigen::new(h.matrix().clone());
            let v = eig.eigenvectors;
            let eps = eig.eigenvalues;
            let l = unitary_liouvillian(&h).unwrap();
            let tr = liouville_core::propagate(&l, &rho0, &times).unwrap();
            let p0 = v.adjoint() * rho0.matrix() * &v;
            for (t, s) in times.iter().zip(&tr.states) {
                let p = v.adjoint() * s.matrix() * &v;
                for i in 0..d {
                    pop = pop.max((p[(i, i)] - p0[(i, i)]).norm());
                    for j in 0..d {
                        if i == j {
                            continue;
                        }
                        mag = mag.max((p[(i, j)].norm() - p0[(i, j)].norm()).abs());
                        if p0[(i, j)].norm() > 1e-3 {
                            let got = (p[(i, j)] / p0[(i, j)]).arg();
                            phase = phase.max(wrap(got + (eps[i] - eps[j]) * t).abs());
                        }
                    }
                }
            }
        }
    }
    Line {
        label: "isolated-system conservation".into(),
        passed: pop <= 1e-12 && mag <= 1e-11 && phase <= 1e-10,
        detail: format!(
            "populations {pop:.3e} (tol 1e-12); coherence magnitudes {mag:.3e} (tol 1e-11); phases {phase:.3e} (tol 1e-10)"
        ),
    }
}

/// `lambda I + N` with one nilpotent block followed by diagonal entries.
fn jordan_generator(lambda: f64, block: usize, rest: &[f64]) -> CMatrix {
    let n = block + rest.len();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..block {
        m[(i, i)] = C64::new(lambda, 0.0);
        if i + 1 < block {
            m[(i, i + 1)] = C64::new(1.0, 0.0);
        }
    }
    for (k, &r) in rest.iter().enumerate() {
        m[(block + k, block + k)] = C64::new(r, 0.0);
    }
    m
}

/// Terminating power series of `e^{tL}` for [`jordan_generator`].
fn series_expm(m: &CMatrix, lambda: f64, block: usize, rest: &[f64], t: f64) -> CMatrix {
    let n = m.nrows();
    let mut nil = m.clone();
    for i in 0..block {
        nil[(i, i)] = C64::new(0.0, 0.0);
    }
    for k in 0..rest.len() {
        nil[(block + k, block + k)] = C64::new(0.0, 0.0);
    }
    let mut sum = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..block {
        term = &term * &nil * C64::new(t / k as f64, 0.0);
        sum += &term;
    }
    let mut scale = CMatrix::zeros(n, n);
    for i in 0..block {
        scale[(i, i)] = C64::new((lambda * t).exp(), 0.0);
    }
    for (k, &r) in rest.iter().enumerate() {
        scale[(block + k, block + k)] = C64::new((r * t).exp(), 0.0);
    }
    scale * sum
}

fn jordan_route() -> Line {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for lambda in [0.0, -0.5] {
        for (block, rest) in [(2usize, vec![-1.0, -0.25]), (3, vec![-1.5])] {
            let m = jordan_generator(lambda, block, &rest);
            let l = Liouvillian::from_matrix(m.clone()).unwrap();
            let sys = match analyze(&l, &AnalyzeOptions::default()) {
                Ok(s) => s,
                Err(_) => {
                    ok = false;
                    continue;
                }
            };
            ok &= sys.class() == SpectralClass::Defective;
            for k in 0..=20 {
                let t = 0.25 * k as f64;
                let u = sys.propagator(t, Expansion::Generalized).unwrap();
                let exact = series_expm(&m, lambda, block, &rest, t);
                worst = worst.max(max_abs(&(u.matrix() - exact)));
            }
            let report = stability_report(&sys);
            if lambda == 0.0 {
                ok &= report.flagged;
            } else {
                ok &= !report.flagged;
            }
        }
    }
    Line {
        label: "Jordan route".into(),
        passed: ok && worst <= 1e-8,
        detail: format!(
            "worst {worst:.3e} (tol 1e-8); classification and flags {}",
            if ok { "ok" } else { "wrong" }
        ),
    }
}

fn dyson_convergence() -> Line {
    let t = 1.0;
    let sz = Operator::from_real_rows(2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
    let sx = Operator::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
    let l0 = unitary_liouvillian(&sz.scale_real(3.0)).unwrap();
    let raw = unitary_liouvillian(&sx).unwrap();
    let lp: SuperOp = raw
        .op()
        .scale(C64::new(0.2 / (t * spectral_norm(raw.matrix())), 0.0));
    let exact = (l0.op() + &lp).scale(C64::new(t, 0.0)).expm().unwrap();
    let error = |steps| {
        let out = dyson_propagator(&l0, |_| lp.clone(), t, 2, steps).unwrap();
        max_abs(&(out.propagator.matrix() - exact.matrix()))
    };
    let e: Vec<f64> = [4, 8, 16, 64].iter().map(|&s| error(s)).collect();
    let (r1, r2) = (e[0] / e[1], e[1] / e[2]);
    Line {
        label: "Dyson convergence".into(),
        passed: r1 >= 3.5 && r2 >= 3.5 && e[3] <= 1e-4,
        detail: format!(
            "ratios 4->8 {r1:.2}, 8->16 {r2:.2} (min 3.5); error at 64 steps {:.3e} (tol 1e-4)",
            e[3]
        ),
    }
}

fn isomorphism_identities() -> Line {
    let mut rng = StdRng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let d = 2 + k % 3;
        let a = random::complex_operator(&mut rng, d);
        let b = random::complex_operator(&mut rng, d);
        let rho: DensityMatrix = random::density_matrix(&mut rng, d);
        let bh = b.hermitize();
        let rel = |x: C64, y: C64| (x - y).norm() / x.norm().max(y.norm()).max(1.0);

        let inner = mho(&a).inner(&mho(&b)).unwrap();
        let direct = (&b * &a.dagger()).trace();
        worst = worst.max(rel(inner, direct));

        let tr = mho(&Operator::identity(d)).inner(&mho(&b)).unwrap();
        worst = worst.max(rel(tr, b.trace()));

        let ev = mho(rho.operator()).inner(&mho(&bh)).unwrap();
        worst = worst.max(rel(ev, expectation(&rho, &bh).unwrap()));
    }
    measured("isomorphism identities", worst, 1e-12)
}

fn main() -> ExitCode {
    let checks = tls_checks();
    let lines = vec![
        from_checks(
            "TLS dissipator eigenvalues",
            &checks,
            &["dissipator eigenvalues", "full generator eigenvalues"],
        ),
        from_checks(
            "closed-form vs numeric propagation",
            &checks,
            &["closed form vs spectral vs expm"],
        ),
        from_checks(
            "steady state",
            &checks,
            &[
                "steady state populations",
                "relaxation to steady state",
                "gibbs populations",
            ],
        ),
        from_checks("Kraus completeness", &checks, &["kraus completeness"]),
        from_checks(
            "Kraus channel equality",
            &checks,
            &["kraus channel equality", "dressed kraus channel equality"],
        ),
        triple_product(),
        physicality(),
        isolated_conservation(),
        jordan_route(),
        dyson_convergence(),
        from_checks("purity regression", &checks, &["reference purities"]),
        isomorphism_identities(),
    ];
    let mut all = true;
    for (k, line) in lines.iter().enumerate() {
        all &= line.passed;
        let verdict = if line.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {}: {}", k + 1, line.label, line.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
