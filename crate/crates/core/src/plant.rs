//! Linear-case matrices: the drift A, uncertainty input B, output C, the
//! transfer function G, the closed loop under a quadratic perturbation, and
//! the annihilation-only SISO reduction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{c, jmat, max_norm, sigma_mat, validate_doubled, CMatrix, Delta, PlantSpec};
use crate::numeric::solve_linear;

/// State-space data of the nominal plant:
/// `A = -iJM - (1/2) J N^dag J N`, `B = -2iJE^dag`, `C = E`.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub n: usize,
    pub m: usize,
}

pub fn build_state_space(plant: &PlantSpec) -> Result<StateSpace> {
    plant.validate()?;
    let n = plant.n;
    let jn = jmat(n);
    let jc = jmat(plant.channels);
    let m_mat = plant.hamiltonian.matrix();
    let nd = plant.doubled_coupling();
    let nd = nd.matrix();
    let e = plant.e.matrix();

    let a = (&jn * m_mat).map(|v| v * c(0.0, -1.0)) - (&jn * nd.adjoint() * &jc * nd).scale(0.5);
    let b = (&jn * e.adjoint()).map(|v| v * c(0.0, -2.0));
    let c_mat = e.clone();

    let scale = max_norm(&a).max(1.0);
    let (ok, res) = validate_doubled(&a, 1e-10 * scale)?;
    if !ok {
        return Err(Error::NumericFailure(format!(
            "drift matrix lost doubled symmetry (residual {res:.3e})"
        )));
    }
    let cb = &c_mat * &b;
    let anti = max_norm(&(&cb + cb.adjoint()));
    if anti > 1e-10 * max_norm(&cb).max(1.0) {
        return Err(Error::NumericFailure(format!(
            "CB + B^dag C^dag = 0 violated (residual {anti:.3e})"
        )));
    }
    Ok(StateSpace {
        a,
        b,
        c: c_mat,
        n,
        m: plant.m,
    })
}

/// Evaluates `G(i omega) = -2i E (i omega I - A)^{-1} J E^dag` with a single
/// linear solve.
pub fn eval_g(ss: &StateSpace, omega: f64) -> Result<CMatrix> {
    if !omega.is_finite() {
        return Err(Error::Precondition(
            "eval_g needs finite omega; the infinite limit is handled analytically".into(),
        ));
    }
    let n2 = 2 * ss.n;
    let jn = jmat(ss.n);
    let resolvent_arg = CMatrix::identity(n2, n2).map(|v| v * c(0.0, omega)) - &ss.a;
    let rhs = &jn * ss.c.adjoint();
    let y = solve_linear(&resolvent_arg, &rhs)?;
    Ok((&ss.c * y).map(|v| v * c(0.0, -2.0)))
}

/// Closed-loop drift `-iJ(M + E^dag Delta E) - (1/2) J N^dag J N` for a given
/// admissible perturbation.
pub fn closed_loop_a(plant: &PlantSpec, delta: &Delta) -> Result<CMatrix> {
    if delta.m != plant.m {
        return Err(Error::InvalidDimension(format!(
            "delta has {} channels, plant has {}",
            delta.m, plant.m
        )));
    }
    let ss = build_state_space(plant)?;
    let e = plant.e.matrix();
    let jn = jmat(plant.n);
    let a_cl =
        &ss.a - (&jn * e.adjoint() * delta.matrix() * e).map(|v| v * c(0.0, 1.0));
    let scale = max_norm(&a_cl).max(1.0);
    let (ok, res) = validate_doubled(&a_cl, 1e-10 * scale)?;
    if !ok {
        return Err(Error::NumericFailure(format!(
            "closed loop lost doubled symmetry (residual {res:.3e})"
        )));
    }
    Ok(a_cl)
}

/// The constant commutator `[z, L] = E J Sigma Ntilde^T`, a 2m x c matrix.
pub fn commutator_zl(plant: &PlantSpec) -> CMatrix {
    let jn = jmat(plant.n);
    let sn = sigma_mat(plant.n);
    plant.e.matrix() * jn * sn * plant.ntilde.transpose()
}

/// Annihilation-only reduction: applies when M2, N2, E2 all vanish and the
/// uncertainty channel is scalar (m = 1).
#[derive(Debug, Clone)]
pub struct SisoReduction {
    /// `A1 = -i M1 - (1/2) N1^dag N1`, n x n.
    pub a1: CMatrix,
    /// `E1`, 1 x n.
    pub e1: CMatrix,
}

impl SisoReduction {
    /// `G1(s) = i E1 (s I - A1)^{-1} E1^dag` (scalar).
    pub fn g1(&self, s: Complex64) -> Result<Complex64> {
        let n = self.a1.nrows();
        let arg = CMatrix::identity(n, n).map(|v| v * s) - &self.a1;
        let x = solve_linear(&arg, &self.e1.adjoint())?;
        Ok(c(0.0, 1.0) * (&self.e1 * x)[(0, 0)])
    }

    pub fn g1_at_omega(&self, omega: f64) -> Result<Complex64> {
        self.g1(c(0.0, omega))
    }
}

/// Returns the reduction when applicable (`None` otherwise; not an error).
pub fn reduce_annihilation_only(plant: &PlantSpec) -> Option<SisoReduction> {
    let tol = 1e-12;
    if plant.m != 1 {
        return None;
    }
    let m2 = plant.hamiltonian.block2();
    let n2 = plant.n2();
    let e2 = plant.e.block2();
    if max_norm(&m2) > tol || max_norm(&n2) > tol || max_norm(&e2) > tol {
        return None;
    }
    let m1 = plant.hamiltonian.block1();
    let n1 = plant.n1();
    let a1 = m1.map(|v| v * c(0.0, -1.0)) - (n1.adjoint() * &n1).scale(0.5);
    Some(SisoReduction {
        a1,
        e1: plant.e.block1(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{identity, DoubledMatrix};
    use crate::numeric::{eigenvalues, is_hurwitz};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_plant(rng: &mut ChaCha8Rng, n: usize, m: usize, channels: usize) -> PlantSpec {
        let mut rc = |s: f64| c(rng.random_range(-s..s), rng.random_range(-s..s));
        let m1 = CMatrix::from_fn(n, n, |_, _| rc(1.0));
        let m1 = (&m1 + m1.adjoint()).scale(0.5);
        let m2 = CMatrix::from_fn(n, n, |_, _| rc(0.5));
        let m2 = (&m2 + m2.transpose()).scale(0.5);
        let n1 = CMatrix::from_fn(channels, n, |_, _| rc(1.2));
        let n2 = CMatrix::from_fn(channels, n, |_, _| rc(0.4));
        let e1 = CMatrix::from_fn(m, n, |_, _| rc(0.8));
        let e2 = CMatrix::from_fn(m, n, |_, _| rc(0.4));
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

    #[test]
    fn opa_state_space() {
        let kappa = 2.1;
        let ss = build_state_space(&PlantSpec::opa(kappa)).unwrap();
        // A = diag(i - kappa/2, -i - kappa/2)
        assert!((ss.a[(0, 0)] - c(-kappa / 2.0, 1.0)).norm() < 1e-14);
        assert!((ss.a[(1, 1)] - c(-kappa / 2.0, -1.0)).norm() < 1e-14);
        assert!(ss.a[(0, 1)].norm() < 1e-14 && ss.a[(1, 0)].norm() < 1e-14);
        // B = -2iJ, C = I for E = I
        assert!((ss.b[(0, 0)] - c(0.0, -2.0)).norm() < 1e-14);
        assert!((ss.b[(1, 1)] - c(0.0, 2.0)).norm() < 1e-14);
        assert!(max_norm(&(&ss.c - identity(2))) < 1e-14);
    }

    #[test]
    fn zero_uncertainty_channel() {
        let mut plant = PlantSpec::opa(2.1);
        let z = CMatrix::zeros(1, 1);
        plant.e = DoubledMatrix::embed_blocks(&z, &z).unwrap();
        let ss = build_state_space(&plant).unwrap();
        assert_eq!(max_norm(&ss.b), 0.0);
        assert_eq!(max_norm(&ss.c), 0.0);
    }

    #[test]
    fn cb_identity_random_plants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let plant = random_plant(&mut rng, 2, 2, 2);
            let ss = build_state_space(&plant).unwrap();
            let cb = &ss.c * &ss.b;
            assert!(max_norm(&(&cb + cb.adjoint())) <= 1e-12 * max_norm(&cb).max(1.0));
        }
    }

    #[test]
    fn eval_g_opa_closed_form() {
        let kappa = 2.1;
        let ss = build_state_space(&PlantSpec::opa(kappa)).unwrap();
        let g = eval_g(&ss, 1.0).unwrap();
        // G11(i) = -2i/(i - i + kappa/2) = -2i/1.05; G1(i) = 0.95238i
        assert!((g[(0, 0)] - c(0.0, -2.0 / 1.05)).norm() < 1e-12);
        let red = reduce_annihilation_only(&PlantSpec::opa(kappa)).unwrap();
        let g1 = red.g1_at_omega(1.0).unwrap();
        assert!((g1 - c(0.0, 1.0 / 1.05)).norm() < 1e-12);
        assert!((g1.im - 0.95238095238).abs() < 1e-10);
        // block identity: G = -2 diag(G1(s), G1(s*)^#)
        assert!((g[(0, 0)] - (-2.0 * g1)).norm() < 1e-12);
        let g1_swap = red.g1(c(0.0, 1.0).conj()).unwrap().conj();
        assert!((g[(1, 1)] - (-2.0 * g1_swap)).norm() < 1e-12);
    }

    #[test]
    fn eval_g_decays_like_one_over_omega() {
        let ss = build_state_space(&PlantSpec::opa(2.1)).unwrap();
        let g3 = max_norm(&eval_g(&ss, 1e3).unwrap());
        let g4 = max_norm(&eval_g(&ss, 1e4).unwrap());
        assert!(g3 < 3e-3);
        assert!((g3 / g4 - 10.0).abs() < 0.1);
    }

    #[test]
    fn eval_g_singular_at_drift_resonance() {
        // N = 0 leaves A = -iJM with eigenvalues +-i; omega = 1 makes the
        // resolvent argument exactly singular.
        let mut plant = PlantSpec::opa(2.1);
        plant.ntilde = CMatrix::zeros(1, 2);
        let ss = build_state_space(&plant).unwrap();
        match eval_g(&ss, 1.0) {
            Err(crate::error::Error::Singular { .. }) => {}
            other => panic!("expected singularity, got {other:?}"),
        }
        assert!(eval_g(&ss, f64::NAN).is_err());
    }

    #[test]
    fn eval_g_zero_channel() {
        let mut plant = PlantSpec::opa(2.1);
        let z = CMatrix::zeros(1, 1);
        plant.e = DoubledMatrix::embed_blocks(&z, &z).unwrap();
        let ss = build_state_space(&plant).unwrap();
        assert_eq!(max_norm(&eval_g(&ss, 0.7).unwrap()), 0.0);
    }

    #[test]
    fn closed_loop_opa_example() {
        let plant = PlantSpec::opa(2.1);
        let one = CMatrix::from_element(1, 1, c(1.0, 0.0));
        let eye = CMatrix::from_element(1, 1, c(0.0, 1.0));
        let delta = Delta::new(DoubledMatrix::embed_blocks(&one, &eye).unwrap());
        let a_cl = closed_loop_a(&plant, &delta).unwrap();
        let expect = CMatrix::from_row_slice(
            2,
            2,
            &[c(-1.05, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.05, 0.0)],
        );
        assert!(max_norm(&(&a_cl - &expect)) < 1e-12);
        let (h, absc) = is_hurwitz(&a_cl, 0.0).unwrap();
        assert!(h);
        assert!((absc + 0.05).abs() < 1e-12);

        // kappa = 1.9: unstable
        let plant = PlantSpec::opa(1.9);
        let a_cl = closed_loop_a(&plant, &delta).unwrap();
        let (h, absc) = is_hurwitz(&a_cl, 0.0).unwrap();
        assert!(!h);
        assert!((absc - 0.05).abs() < 1e-12);

        // zero perturbation reproduces the nominal drift exactly
        let plant = PlantSpec::opa(2.1);
        let ss = build_state_space(&plant).unwrap();
        let a_cl = closed_loop_a(&plant, &Delta::zero(1)).unwrap();
        assert_eq!(max_norm(&(&a_cl - &ss.a)), 0.0);
    }

    #[test]
    fn commutator_zl_examples() {
        // true OPA (c = 1): [z, L] = (0, -sqrt(kappa))^T
        let plant = PlantSpec::opa(2.1);
        let z = commutator_zl(&plant);
        assert_eq!(z.shape(), (2, 1));
        assert!(z[(0, 0)].norm() < 1e-14);
        assert!((z[(1, 0)] - c(-2.1f64.sqrt(), 0.0)).norm() < 1e-14);

        // two-channel variant with Ntilde = sqrt(kappa) I2 (c = 2, n = 1):
        // E J Sigma Ntilde^T = sqrt(kappa) [[0, 1], [-1, 0]]
        let kappa = 2.1f64;
        let mut plant2 = PlantSpec::opa(kappa);
        plant2.ntilde = identity(2).scale(kappa.sqrt());
        plant2.channels = 2;
        plant2.validate().unwrap();
        let z = commutator_zl(&plant2);
        let expect = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(kappa.sqrt(), 0.0), c(-kappa.sqrt(), 0.0), c(0.0, 0.0)],
        );
        assert!(max_norm(&(&z - &expect)) < 1e-14);

        // E = 0 gives the zero matrix
        let mut plant3 = PlantSpec::opa(2.1);
        let zm = CMatrix::zeros(1, 1);
        plant3.e = DoubledMatrix::embed_blocks(&zm, &zm).unwrap();
        assert_eq!(max_norm(&commutator_zl(&plant3)), 0.0);
    }

    #[test]
    fn commutator_zl_matches_definition_level_ccr_sum() {
        // Independent oracle: [z_i, L_j] = sum_{k,l} E_ik Ntilde_jl [x_k, x_l]
        // with [x, x^T] built entrywise from [a, a^dag] = I.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let plant = random_plant(&mut rng, 2, 2, 2);
            let n = plant.n;
            let ccr = CMatrix::from_fn(2 * n, 2 * n, |k, l| {
                if k < n && l >= n && l - n == k {
                    c(1.0, 0.0) // [a_k, a_l^#] = delta
                } else if k >= n && l < n && k - n == l {
                    c(-1.0, 0.0) // [a_k^#, a_l] = -delta
                } else {
                    c(0.0, 0.0)
                }
            });
            let direct = plant.e.matrix() * &ccr * plant.ntilde.transpose();
            let z = commutator_zl(&plant);
            assert!(max_norm(&(&z - &direct)) < 1e-12);
        }
    }

    #[test]
    fn reduction_applicability() {
        let red = reduce_annihilation_only(&PlantSpec::opa(2.1)).unwrap();
        assert!((red.a1[(0, 0)] - c(-1.05, 1.0)).norm() < 1e-14);
        assert!((red.e1[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        // G1(0) real part: -1/((kappa/2)^2 + 1)
        let g0 = red.g1_at_omega(0.0).unwrap();
        assert!((g0.re - (-1.0 / (1.05 * 1.05 + 1.0))).abs() < 1e-12);
        assert!((g0.re - (-0.47562)).abs() < 1e-5);

        let mut plant = PlantSpec::opa(2.1);
        let one = CMatrix::from_element(1, 1, c(1.0, 0.0));
        plant.hamiltonian =
            DoubledMatrix::embed_blocks(&plant.hamiltonian.block1(), &one).unwrap();
        assert!(reduce_annihilation_only(&plant).is_none());
    }

    #[test]
    fn annihilation_only_spectrum_splits() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let n = 3;
            let mut rc = |s: f64| c(rng.random_range(-s..s), rng.random_range(-s..s));
            let m1 = CMatrix::from_fn(n, n, |_, _| rc(1.0));
            let m1 = (&m1 + m1.adjoint()).scale(0.5);
            let n1 = CMatrix::from_fn(1, n, |_, _| rc(1.0));
            let e1 = CMatrix::from_fn(1, n, |_, _| rc(1.0));
            let z = CMatrix::zeros(n, n);
            let zr = CMatrix::zeros(1, n);
            let mut ntilde = CMatrix::zeros(1, 2 * n);
            ntilde.view_mut((0, 0), (1, n)).copy_from(&n1);
            let plant = PlantSpec::new(
                DoubledMatrix::embed_blocks(&m1, &z).unwrap(),
                ntilde,
                DoubledMatrix::embed_blocks(&e1, &zr).unwrap(),
                2.0,
            )
            .unwrap();
            let ss = build_state_space(&plant).unwrap();
            let red = reduce_annihilation_only(&plant).unwrap();
            let full: Vec<Complex64> = eigenvalues(&ss.a).unwrap().values;
            let half = eigenvalues(&red.a1).unwrap().values;
            let mut expected: Vec<Complex64> =
                half.iter().cloned().chain(half.iter().map(|l| l.conj())).collect();
            // greedy nearest-neighbor multiset matching
            for a in &full {
                let (idx, dist) = expected
                    .iter()
                    .enumerate()
                    .map(|(i, b)| (i, (a - b).norm()))
                    .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                    .unwrap();
                assert!(dist < 1e-8, "unmatched eigenvalue {a} (closest {dist:.2e})");
                expected.swap_remove(idx);
            }
        }
    }
}
