//! Shared generators for the integration suites.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qpopov::model::DoubledMatrix;
use qpopov::{CMatrix, PlantSpec};

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rand_complex(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    cx(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

pub fn rand_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| rand_complex(rng, scale))
}

pub fn rand_hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMatrix {
    let x = rand_matrix(rng, n, n, scale);
    (&x + x.adjoint()).scale(0.5)
}

pub fn rand_symmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMatrix {
    let x = rand_matrix(rng, n, n, scale);
    (&x + x.transpose()).scale(0.5)
}

/// A random validated plant with the given block scales.
pub fn random_plant(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    channels: usize,
    squeeze: f64,
    uncertainty: f64,
) -> PlantSpec {
    let m1 = rand_hermitian(rng, n, 1.0);
    let m2 = rand_symmetric(rng, n, squeeze);
    let n1 = rand_matrix(rng, channels, n, 1.2);
    let n2 = rand_matrix(rng, channels, n, 0.3 * squeeze);
    let e1 = rand_matrix(rng, m, n, uncertainty);
    let e2 = rand_matrix(rng, m, n, 0.5 * uncertainty);
    let mut ntilde = CMatrix::zeros(channels, 2 * n);
    ntilde.view_mut((0, 0), (channels, n)).copy_from(&n1);
    ntilde.view_mut((0, n), (channels, n)).copy_from(&n2);
    PlantSpec::new(
        DoubledMatrix::embed_blocks(&m1, &m2).unwrap(),
        ntilde,
        DoubledMatrix::embed_blocks(&e1, &e2).unwrap(),
        2.0,
    )
    .unwrap()
}

/// A random annihilation-only plant (M2 = N2 = E2 = 0, m = 1).
pub fn random_annihilation_only(rng: &mut ChaCha8Rng, n: usize, uncertainty: f64) -> PlantSpec {
    let m1 = rand_hermitian(rng, n, 1.0);
    let n1 = rand_matrix(rng, 1, n, 1.2);
    let e1 = rand_matrix(rng, 1, n, uncertainty);
    let z = CMatrix::zeros(n, n);
    let zr = CMatrix::zeros(1, n);
    let mut ntilde = CMatrix::zeros(1, 2 * n);
    ntilde.view_mut((0, 0), (1, n)).copy_from(&n1);
    PlantSpec::new(
        DoubledMatrix::embed_blocks(&m1, &z).unwrap(),
        ntilde,
        DoubledMatrix::embed_blocks(&e1, &zr).unwrap(),
        2.0,
    )
    .unwrap()
}
