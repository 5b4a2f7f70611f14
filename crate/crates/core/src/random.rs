//! Seeded random operators, states and models for self-tests and benches.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::generators::{Jump, LindbladModel};
use crate::qm::{CMatrix, DensityMatrix, Operator, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Ginibre matrix with standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Operator with entries uniform in the unit square `[-1, 1] + i[-1, 1]`.
pub fn complex_operator<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    let u = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
    let m = CMatrix::from_fn(dim, dim, |_, _| C64::new(u.sample(rng), u.sample(rng)));
    Operator::new(m).expect("finite square matrix")
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    complex_operator(rng, dim).hermitize()
}

/// Haar-distributed unitary via QR of a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    let qr = ginibre(rng, dim, dim).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    Operator::new(q).expect("finite square matrix")
}

/// Random mixed state `G G^dagger / Tr[G G^dagger]`.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = ginibre(rng, dim, dim);
    let m = &g * g.adjoint();
    let tr = m.trace();
    let op = Operator::new(m / tr).expect("finite").hermitize();
    DensityMatrix::new(op).expect("G G^dagger is a valid state")
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let v: DVector<C64> = DVector::from_fn(dim, |_, _| gaussian(rng));
    let v = &v / C64::new(v.norm(), 0.0);
    DensityMatrix::from_hermitized(&Operator::outer(&v, &v).expect("same length"))
        .expect("normalized pure state")
}

/// Random Hermitian Hamiltonian plus `jumps` jump operators with rates in
/// `[0, 1)`.
pub fn lindblad_model<R: Rng + ?Sized>(rng: &mut R, dim: usize, jumps: usize) -> LindbladModel {
    let h = hermitian(rng, dim);
    let jumps = (0..jumps)
        .map(|_| Jump::new(rng.random_range(0.0..1.0), complex_operator(rng, dim)))
        .collect();
    LindbladModel::new(h, jumps).expect("valid random model")
}

/// A complete Kraus set of `count` operators: blocks of a random isometry.
pub fn kraus_ops<R: Rng + ?Sized>(rng: &mut R, dim: usize, count: usize) -> Vec<Operator> {
    let tall = ginibre(rng, dim * count, dim);
    let q = tall.qr().q();
    (0..count)
        .map(|k| Operator::new(q.rows(k * dim, dim).into_owned()).expect("finite"))
        .collect()
}
