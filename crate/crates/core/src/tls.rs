//! Two-level atom coupled to a thermal radiation field.
//!
//! Basis order is `(|e>, |g>)`, so superkets are ordered `(ee, eg, ge, gg)`.
//! The generator splits into a unitary part `La = -i (Delta/2) [[s3, I]]`
//! and a dissipator `Lb` with emission rate `G1 = g0 (1 + n)` and
//! absorption rate `G2 = g0 n`.

use crate::error::{Error, Result};
use crate::generators::{lindblad_liouvillian, GeneratorKind, Jump, LindbladModel, Liouvillian};
use crate::kraus::KrausSet;
use crate::qm::{pauli, DensityMatrix, Operator, C64};
use crate::vectorization::SuperOp;

/// Mean photon number `1 / (e^{beta omega} - 1)`.
pub fn planck_nbar(omega0: f64, beta: f64) -> Result<f64> {
    let x = beta * omega0;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "beta * omega0 must be positive and finite, got {x}"
        )));
    }
    Ok(1.0 / x.exp_m1())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TlsParams {
    pub omega0: f64,
    pub gamma0: f64,
    pub nbar: f64,
    /// Frequency shift `Omega`, so that `Delta = omega0 - Omega`.
    pub lamb_shift: f64,
    /// Inverse temperature, when `nbar` came from it.
    pub beta: Option<f64>,
}

impl TlsParams {
    pub fn new(omega0: f64, gamma0: f64, nbar: f64) -> Result<Self> {
        let p = Self {
            omega0,
            gamma0,
            nbar,
            lamb_shift: 0.0,
            beta: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Thermal parameters with `nbar` from the Planck distribution.
    pub fn thermal(omega0: f64, gamma0: f64, beta: f64) -> Result<Self> {
        let nbar = planck_nbar(omega0, beta)?;
        let mut p = Self::new(omega0, gamma0, nbar)?;
        p.beta = Some(beta);
        Ok(p)
    }

    pub fn with_lamb_shift(mut self, shift: f64) -> Result<Self> {
        self.lamb_shift = shift;
        self.validate()?;
        Ok(self)
    }

    /// Sets the shift so that `Delta` takes the given value.
    pub fn with_delta(self, delta: f64) -> Result<Self> {
        let shift = self.omega0 - delta;
        self.with_lamb_shift(shift)
    }

    fn validate(&self) -> Result<()> {
        let checks = [
            (
                self.omega0 > 0.0 && self.omega0.is_finite(),
                "omega0 must be positive",
            ),
            (
                self.gamma0 > 0.0 && self.gamma0.is_finite(),
                "gamma0 must be positive",
            ),
            (
                self.nbar >= 0.0 && self.nbar.is_finite(),
                "nbar must be non-negative",
            ),
            (self.lamb_shift.is_finite(), "lamb shift must be finite"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::InvalidParameter((*msg).into())),
            None => Ok(()),
        }
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma0 * (1.0 + self.nbar)
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma0 * self.nbar
    }

    pub fn gamma(&self) -> f64 {
        self.gamma1() + self.gamma2()
    }

    pub fn delta(&self) -> f64 {
        self.omega0 - self.lamb_shift
    }

    /// `(Delta / 2) s3`.
    pub fn hamiltonian(&self) -> Operator {
        pauli::sigma_z().scale_real(self.delta() / 2.0)
    }

    pub fn lindblad_model(&self) -> LindbladModel {
        LindbladModel::new(
            self.hamiltonian(),
            vec![
                Jump::new(self.gamma1(), pauli::sigma_minus()),
                Jump::new(self.gamma2(), pauli::sigma_plus()),
            ],
        )
        .expect("valid parameters give a valid model")
    }

    /// `(La, Lb)` written out entry by entry.
    pub fn generators(&self) -> (Liouvillian, Liouvillian) {
        let delta = self.delta();
        let (g1, g2, g) = (self.gamma1(), self.gamma2(), self.gamma());
        let zero = C64::new(0.0, 0.0);
        let la = Operator::diagonal(&[zero, C64::new(0.0, -delta), C64::new(0.0, delta), zero])
            .expect("finite detuning");
        let la = Liouvillian::from_superop(
            SuperOp::new(2, la.into_matrix()).expect("4x4"),
            GeneratorKind::Unitary,
        )
        .expect("skew-hermitian");
        let lb = Operator::from_real_rows(
            4,
            &[
                -g1,
                0.0,
                0.0,
                g2, //
                0.0,
                -g / 2.0,
                0.0,
                0.0, //
                0.0,
                0.0,
                -g / 2.0,
                0.0, //
                g1,
                0.0,
                0.0,
                -g2,
            ],
        )
        .expect("finite rates");
        let lb = Liouvillian::from_superop(
            SuperOp::new(2, lb.into_matrix()).expect("4x4"),
            GeneratorKind::Dissipative,
        )
        .expect("dissipative tag");
        (la, lb)
    }

    /// `La + Lb` through the general Lindblad construction.
    pub fn full_generator(&self) -> Liouvillian {
        lindblad_liouvillian(&self.lindblad_model()).expect("valid model")
    }

    /// `(ground, excited) = (G1 / G, G2 / G)`.
    pub fn equilibrium_populations(&self) -> (f64, f64) {
        let g = self.gamma();
        (self.gamma1() / g, self.gamma2() / g)
    }

    /// Gibbs weights of `(omega0 / 2) s3` at the stored inverse temperature.
    pub fn gibbs_populations(&self) -> Option<(f64, f64)> {
        let beta = self.beta?;
        let half = beta * self.omega0 / 2.0;
        let (ground, excited) = (half.exp(), (-half).exp());
        let z = ground + excited;
        Some((ground / z, excited / z))
    }

    /// Closed-form solution of the master equation from `rho0`.
    pub fn closed_form_rho(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        if rho0.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: rho0.dim(),
            });
        }
        let (g1, g2, g) = (self.gamma1(), self.gamma2(), self.gamma());
        let p_gg = rho0.operator().get(1, 1).re;
        let s3 = -((g1 - g2) / g + 2.0 * (-g * t).exp() * (p_gg - g1 / g));
        let coherence = C64::new(-g * t / 2.0, -self.delta() * t).exp() * rho0.operator().get(0, 1);
        let rho = Operator::from_rows(
            2,
            &[
                C64::new((1.0 + s3) / 2.0, 0.0),
                coherence,
                coherence.conj(),
                C64::new((1.0 - s3) / 2.0, 0.0),
            ],
        )?;
        DensityMatrix::new(rho)
    }

    /// `K_0 .. K_3` of the dissipative channel `e^{t Lb}`; with
    /// `include_unitary` each is multiplied by `e^{-i Delta t s3 / 2}`.
    pub fn closed_form_kraus(&self, t: f64, include_unitary: bool) -> Result<KrausSet> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kraus time must be finite and >= 0, got {t}"
            )));
        }
        let (g1, g2, g) = (self.gamma1(), self.gamma2(), self.gamma());
        let half = (-g * t / 2.0).exp();
        let full = -(-g * t).exp_m1();
        let id = pauli::identity();
        let s3 = pauli::sigma_z();
        let plus_part =
            |sign: f64| id.scale_real((1.0 + half) / 2.0) + s3.scale_real(sign * (1.0 - half) / 2.0);
        let mut ops = vec![
            plus_part(-1.0).scale_real((g1 / g).sqrt()),
            plus_part(1.0).scale_real((g2 / g).sqrt()),
            pauli::sigma_minus().scale_real((g1 / g * full).sqrt()),
            pauli::sigma_plus().scale_real((g2 / g * full).sqrt()),
        ];
        if include_unitary {
            let phase = C64::new(0.0, -self.delta() * t / 2.0).exp();
            let u = Operator::diagonal(&[phase, phase.conj()])?;
            ops = ops.iter().map(|k| &u * k).collect();
        }
        Ok(KrausSet::new(ops)?.with_time(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kraus::{channel_superop, completeness_defect};
    use crate::linalg;
    use crate::qm::CMatrix;

    fn reference_params() -> TlsParams {
        TlsParams::new(1.0, 1.0, 0.5).unwrap().with_delta(0.0).unwrap()
    }

    #[test]
    fn planck_examples() {
        assert!(planck_nbar(1.0, 50.0).unwrap() < 1e-21);
        assert!((planck_nbar(2f64.ln(), 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((planck_nbar(1.0, 3f64.ln()).unwrap() - 0.5).abs() < 1e-14);
        assert!(planck_nbar(1.0, 0.0).is_err());
        assert!(planck_nbar(-1.0, 1.0).is_err());
    }

    #[test]
    fn rates() {
        let mut rng_params = vec![(1.0, 0.0), (0.3, 2.5), (2.0, 0.5)];
        for (g0, n) in rng_params.drain(..) {
            let p = TlsParams::new(1.0, g0, n).unwrap();
            assert!((p.gamma() - g0 * (2.0 * n + 1.0)).abs() < 1e-14);
            assert!(p.gamma1() > 0.0 && p.gamma2() >= 0.0 && p.gamma1() >= p.gamma2());
        }
        assert!(TlsParams::new(1.0, 0.0, 0.5).is_err());
        assert!(TlsParams::new(1.0, 1.0, -0.1).is_err());
        assert_eq!(TlsParams::new(2.0, 1.0, 0.0).unwrap().delta(), 2.0);
    }

    #[test]
    fn generator_matrices() {
        let p = TlsParams::new(3.0, 1.0, 0.5).unwrap().with_delta(2.0).unwrap();
        let (la, lb) = p.generators();
        let expected_a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, -2.0),
            C64::new(0.0, 2.0),
            C64::new(0.0, 0.0),
        ]));
        assert!(linalg::max_abs(&(la.matrix() - expected_a)) < 1e-15);
        let expected_b = Operator::from_real_rows(
            4,
            &[
                -1.5, 0., 0., 0.5, 0., -1., 0., 0., 0., 0., -1., 0., 1.5, 0., 0., -0.5,
            ],
        )
        .unwrap();
        assert_eq!(lb.matrix(), expected_b.matrix());

        let commutator = la.matrix() * lb.matrix() - lb.matrix() * la.matrix();
        assert!(linalg::max_abs(&commutator) < 1e-12);

        let full = p.full_generator();
        assert!(linalg::max_abs(&(full.matrix() - (la.matrix() + lb.matrix()))) < 1e-13);
    }

    #[test]
    fn closed_form_examples() {
        let p = reference_params();
        let e = DensityMatrix::basis_state(2, 0).unwrap();
        let at0 = p.closed_form_rho(&e, 0.0).unwrap();
        assert!((at0.operator() - e.operator()).max_abs() < 1e-15);

        let late = p.closed_form_rho(&e, 200.0).unwrap();
        let (ground, excited) = p.equilibrium_populations();
        assert!((late.operator().get(0, 0).re - excited).abs() < 1e-15);
        assert!((late.operator().get(1, 1).re - ground).abs() < 1e-15);

        let at1 = p.closed_form_rho(&e, 1.0).unwrap();
        let expected = 0.25 + 0.75 * (-2.0f64).exp();
        assert!((at1.operator().get(0, 0).re - expected).abs() < 1e-15);
    }

    #[test]
    fn equilibrium_examples() {
        let (g, e) = TlsParams::new(1.0, 1.0, 0.0).unwrap().equilibrium_populations();
        assert_eq!((g, e), (1.0, 0.0));
        let (g, e) = reference_params().equilibrium_populations();
        assert!((g - 0.75).abs() < 1e-15 && (e - 0.25).abs() < 1e-15);

        let p = TlsParams::thermal(1.0, 1.0, 3f64.ln()).unwrap();
        let (gg, ge) = p.gibbs_populations().unwrap();
        let s = 3f64.sqrt();
        assert!((gg - s / (s + 1.0 / s)).abs() < 1e-12);
        let (g, e) = p.equilibrium_populations();
        assert!((g - gg).abs() < 1e-12 && (e - ge).abs() < 1e-12);
        assert!((g - 0.75).abs() < 1e-12);
    }

    #[test]
    fn kraus_examples() {
        let p = reference_params();
        let k0 = p.closed_form_kraus(0.0, false).unwrap();
        let expected = [0.75f64.sqrt(), 0.25f64.sqrt(), 0.0, 0.0];
        for (k, &x) in k0.ops().iter().zip(&expected) {
            let diag = if x == 0.0 {
                Operator::zeros(2)
            } else {
                Operator::identity(2).scale_real(x)
            };
            assert!((k.clone() - diag).max_abs() < 1e-15);
        }
        assert!(linalg::max_abs(&(channel_superop(&k0).into_matrix() - CMatrix::identity(4, 4))) < 1e-15);

        let k1 = p.closed_form_kraus(1.0, false).unwrap();
        let amp = (0.75 * (1.0 - (-2.0f64).exp())).sqrt();
        assert!((k1.ops()[2].clone() - pauli::sigma_minus().scale_real(amp)).max_abs() < 1e-15);
        assert_eq!(k1.time(), Some(1.0));

        for t in [0.0, 0.1, 1.0, 5.0, 50.0] {
            for dressed in [false, true] {
                let set = p
                    .clone()
                    .with_delta(0.7)
                    .unwrap()
                    .closed_form_kraus(t, dressed)
                    .unwrap();
                assert!(completeness_defect(&set) <= 1e-12);
            }
        }
        assert!(p.closed_form_kraus(-1.0, false).is_err());
    }
}
