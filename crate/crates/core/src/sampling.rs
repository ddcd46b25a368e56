//! Deterministic random streams and random forms.
//!
//! Every consumer derives its generator from a `(seed, stream)` pair so that
//! parallel work reproduces bit-exactly regardless of scheduling.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::forms::{Dims, VectorForm};

pub type Stream = ChaCha8Rng;

/// Generator for stream `stream` of `seed`.
pub fn stream(seed: u64, stream: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<f64> {
    DVector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Uniform point on the unit sphere `S^{dim-1}` (normalized Gaussian).
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, dim);
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Symmetric matrix with independent standard normal entries on and above
/// the diagonal.
pub fn gaussian_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.sample(StandardNormal);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Form with Gaussian free entries (not normalized).
pub fn gaussian_form<R: Rng + ?Sized>(rng: &mut R, dims: Dims) -> VectorForm {
    let free: Vec<f64> = (0..dims.free_entries())
        .map(|_| rng.sample(StandardNormal))
        .collect();
    VectorForm::from_free(dims, &free).expect("free entry count matches dims")
}

/// Gaussian form scaled to unit norm.
pub fn unit_form<R: Rng + ?Sized>(rng: &mut R, dims: Dims) -> VectorForm {
    loop {
        let b = gaussian_form(rng, dims);
        let norm = b.norm();
        if norm > 1e-12 {
            return b.scale(1.0 / norm);
        }
    }
}

/// Random orthogonal `n × n` matrix (QR of a Gaussian matrix with the sign
/// of `R`'s diagonal absorbed, which makes it Haar distributed).
pub fn orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let col = -q.column(j);
            q.set_column(j, &col);
        }
    }
    q
}
