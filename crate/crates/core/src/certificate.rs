//! Lyapunov certificate: synthesis of the doubled Hermitian P through the
//! Schur-complemented Riccati equation, independent eigenvalue verification
//! of the block LMI, and the mean-square decay constants.
//!
//! With `K = C + theta C A` the block LMI
//! `[[PA + A^dag P, PB + K^dag], [B^dag P + K, -gamma I + theta(CB + B^dag C^dag)]] < 0`
//! Schur-complements (using `CB + B^dag C^dag = 0`) to
//! `M~ = PA + A^dag P + (1/gamma)(PB + K^dag)(B^dag P + K) < 0`,
//! which is solved strictly by the Riccati equation with an eps shift.

use crate::error::{Error, Result};
use crate::model::{
    hermitian_part, jmat, max_norm, sigma_conj_sigma, CMatrix, DoubledMatrix, PlantSpec,
};
use crate::numeric::{max_eig_hermitian, min_eig_hermitian, solve_riccati};
use crate::plant::{build_state_space, commutator_zl, StateSpace};
use crate::popov::FrequencySweep;

/// Number of /10 shrinks of eps before synthesis gives up.
const EPS_SHRINKS: usize = 6;
const GATE_GRID_POINTS: usize = 256;

/// A verified robust-stability certificate.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub p: DoubledMatrix,
    pub theta: f64,
    pub gamma: f64,
    /// max eigenvalue of the assembled block LMI (negative = valid).
    pub lmi_margin: f64,
    /// max eigenvalue of the Schur complement M~.
    pub mtilde_max_eig: f64,
    pub structure_residual: f64,
    pub p_min_eig: f64,
    pub lambda: f64,
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

fn gain_matrix(ss: &StateSpace, theta: f64) -> CMatrix {
    &ss.c + (&ss.c * &ss.a).scale(theta)
}

fn mtilde(p: &CMatrix, ss: &StateSpace, theta: f64, gamma: f64) -> CMatrix {
    let k = gain_matrix(ss, theta);
    let y = p * &ss.b + k.adjoint();
    p * &ss.a + ss.a.adjoint() * p + (&y * y.adjoint()).scale(1.0 / gamma)
}

/// Synthesizes P from the SPR Riccati equation
/// `P(A + BK/gamma) + (A + BK/gamma)^dag P + P(BB^dag/gamma)P + (K^dag K/gamma + eps I) = 0`,
/// then symmetrizes to the doubled form. The frequency-domain margin is
/// checked first on an internal grid; a nonpositive margin rules the
/// certificate out before any algebra runs. The eps ladder shrinks by /10 up
/// to six times before failing.
pub fn synthesize_p(ss: &StateSpace, theta: f64, gamma: f64, eps: f64) -> Result<DoubledMatrix> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    if theta < 0.0 || !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::Precondition("theta >= 0 and gamma > 0 required".into()));
    }
    let (hurwitz, abscissa) = crate::numeric::is_hurwitz(&ss.a, 0.0)?;
    if !hurwitz {
        return Err(Error::CertificateInfeasible(format!(
            "drift not Hurwitz (abscissa {abscissa:.3e})"
        )));
    }
    // Frequency gate: the certificate accompanies a certified-stable verdict.
    let grid = crate::popov::grid_from_drift(&ss.a, GATE_GRID_POINTS, None)?;
    let sweep = FrequencySweep::new(ss, &grid)?;
    let (margin, worst) = sweep.margin(theta, gamma)?;
    if margin <= 0.0 {
        return Err(Error::CertificateInfeasible(format!(
            "SPR margin {margin:.6e} at omega {worst:.4} is not positive"
        )));
    }

    let n2 = 2 * ss.n;
    let k = gain_matrix(ss, theta);
    let ahat = &ss.a + (&ss.b * &k).scale(1.0 / gamma);
    let r = (&ss.b * ss.b.adjoint()).scale(1.0 / gamma);
    let q_base = (k.adjoint() * &k).scale(1.0 / gamma);

    let mut eps_k = eps;
    let mut last_err: Option<Error> = None;
    for _ in 0..=EPS_SHRINKS {
        let q = &q_base + CMatrix::identity(n2, n2).scale(eps_k);
        match solve_riccati(&ahat, &r, &q) {
            Ok(p_raw) => {
                let p = DoubledMatrix::project(&hermitian_part(&p_raw))?;
                let mt = mtilde(p.matrix(), ss, theta, gamma);
                let mt_max = max_eig_hermitian(&mt)?;
                let p_min = min_eig_hermitian(p.matrix())?;
                if mt_max < 0.0 && p_min > 0.0 {
                    return Ok(p);
                }
                last_err = Some(Error::CertificateInfeasible(format!(
                    "synthesized P not strict at eps {eps_k:.1e} (M~ max {mt_max:.3e}, P min {p_min:.3e})"
                )));
            }
            Err(e @ (Error::RiccatiInfeasible(_) | Error::NumericFailure(_))) => {
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
        eps_k /= 10.0;
    }
    Err(Error::CertificateInfeasible(format!(
        "eps ladder exhausted: {}",
        last_err.map(|e| e.to_string()).unwrap_or_default()
    )))
}

/// Outcome of the pure (synthesis-independent) certificate check.
#[derive(Debug, Clone, Copy)]
pub struct VerifyReport {
    pub lmi_margin: f64,
    pub mtilde_max_eig: f64,
    pub structure_residual: f64,
    pub pos_def_min_eig: f64,
}

/// Assembles the full block LMI and M~ and reports their extreme
/// eigenvalues, the doubled-structure residual of P and its smallest
/// eigenvalue. Works for any P of matching shape.
pub fn verify_certificate(
    p: &CMatrix,
    ss: &StateSpace,
    theta: f64,
    gamma: f64,
) -> Result<VerifyReport> {
    let n2 = 2 * ss.n;
    let m2 = 2 * ss.m;
    if p.shape() != (n2, n2) {
        return Err(Error::InvalidDimension(format!(
            "P must be {n2}x{n2}, got {:?}",
            p.shape()
        )));
    }
    let k = gain_matrix(ss, theta);
    let top_left = p * &ss.a + ss.a.adjoint() * p;
    let top_right = p * &ss.b + k.adjoint();
    let cb = &ss.c * &ss.b;
    let bottom_right =
        CMatrix::identity(m2, m2).scale(-gamma) + (&cb + cb.adjoint()).scale(theta);
    let mut lmi = CMatrix::zeros(n2 + m2, n2 + m2);
    lmi.view_mut((0, 0), (n2, n2)).copy_from(&top_left);
    lmi.view_mut((0, n2), (n2, m2)).copy_from(&top_right);
    lmi.view_mut((n2, 0), (m2, n2)).copy_from(&top_right.adjoint());
    lmi.view_mut((n2, n2), (m2, m2)).copy_from(&bottom_right);

    let lmi_margin = max_eig_hermitian(&lmi)?;
    let mtilde_max_eig = max_eig_hermitian(&mtilde(p, ss, theta, gamma))?;
    let structure_residual = max_norm(&(sigma_conj_sigma(p)? - p));
    let pos_def_min_eig = min_eig_hermitian(p)?;
    Ok(VerifyReport {
        lmi_margin,
        mtilde_max_eig,
        structure_residual,
        pos_def_min_eig,
    })
}

/// Decay data of the certified exponential bound.
#[derive(Debug, Clone, Copy)]
pub struct StabilityConstants {
    pub lambda: f64,
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

/// Computes the residual-noise constant lambda and the decay constants:
/// `lambda = tr(P J Ntilde^dag Ntilde J) + (4 theta/gamma) tr([z,L]^dag [z,L])`,
/// `c` = largest value with `M~ + c (P + (4 theta/gamma) E^dag E) <= 0`
/// (bisection), `c1 = lmax[P + (4 theta/gamma) E^dag E] / lmin[P]`,
/// `c2 = c`, `c3 = lambda / (c lmin[P])`.
pub fn stability_constants(
    p: &CMatrix,
    plant: &PlantSpec,
    ss: &StateSpace,
    theta: f64,
    gamma: f64,
) -> Result<StabilityConstants> {
    let mt = mtilde(p, ss, theta, gamma);
    let mt_max = max_eig_hermitian(&mt)?;
    if mt_max >= 0.0 {
        return Err(Error::Precondition(format!(
            "M~ is not negative definite (max eig {mt_max:.3e})"
        )));
    }
    let jn = jmat(plant.n);
    // N^dag [[I_c, 0], [0, 0]] N = Ntilde^dag Ntilde
    let noise_core = &jn * plant.ntilde.adjoint() * &plant.ntilde * &jn;
    let term1 = (p * &noise_core).trace().re;
    let zl = commutator_zl(plant);
    let term2 = (4.0 * theta / gamma) * (zl.adjoint() * &zl).trace().re;
    let lambda = term1 + term2;
    let scale = max_norm(p) * max_norm(&noise_core) + term2.abs() + 1.0;
    if lambda < -1e-9 * scale {
        return Err(Error::NumericFailure(format!(
            "lambda = {lambda:.3e} is negative beyond round-off"
        )));
    }
    let lambda = lambda.max(0.0);

    let envelope = p + (plant.e.matrix().adjoint() * plant.e.matrix()).scale(4.0 * theta / gamma);
    let p_min = min_eig_hermitian(p)?;
    if p_min <= 0.0 {
        return Err(Error::Precondition(format!(
            "P is not positive definite (min eig {p_min:.3e})"
        )));
    }
    // bisection for the largest c with M~ + c * envelope <= 0
    let mut lo = 0.0f64;
    let mut hi = 10.0 * mt_max.abs() / p_min;
    debug_assert!(max_eig_hermitian(&(&mt + envelope.scale(hi)))? > 0.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if max_eig_hermitian(&(&mt + envelope.scale(mid)))? <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = lo;
    if c <= 0.0 {
        return Err(Error::NumericFailure(
            "decay-rate bisection collapsed to zero".into(),
        ));
    }
    let c1 = max_eig_hermitian(&envelope)? / p_min;
    let c3 = lambda / (c * p_min);
    Ok(StabilityConstants {
        lambda,
        c,
        c1,
        c2: c,
        c3,
    })
}

/// End-to-end synthesis: P plus verification and constants.
pub fn certify(plant: &PlantSpec, theta: f64, gamma: f64) -> Result<Certificate> {
    let ss = build_state_space(plant)?;
    let eps0 = 1e-2 * max_norm(&ss.a).max(1.0);
    let p = synthesize_p(&ss, theta, gamma, eps0)?;
    let report = verify_certificate(p.matrix(), &ss, theta, gamma)?;
    let constants = stability_constants(p.matrix(), plant, &ss, theta, gamma)?;
    Ok(Certificate {
        p,
        theta,
        gamma,
        lmi_margin: report.lmi_margin,
        mtilde_max_eig: report.mtilde_max_eig,
        structure_residual: report.structure_residual,
        p_min_eig: report.pos_def_min_eig,
        lambda: constants.lambda,
        c: constants.c,
        c1: constants.c1,
        c2: constants.c2,
        c3: constants.c3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{identity, DoubledMatrix, PlantSpec};
    use crate::plant::build_state_space;

    #[test]
    fn opa_certificate_valid() {
        let plant = PlantSpec::opa(2.1);
        let cert = certify(&plant, 0.2, 2.0).unwrap();
        assert!(cert.p_min_eig > 0.0);
        assert!(cert.structure_residual <= 1e-10);
        assert!(cert.lmi_margin < -1e-8, "lmi margin {}", cert.lmi_margin);
        assert!(cert.mtilde_max_eig < 0.0);
        assert!(cert.c1 >= 1.0);
        assert!(cert.c2 > 0.0);
        assert!(cert.c3 >= 0.0 && cert.c3.is_finite());
        assert!(cert.lambda >= 0.0);
    }

    #[test]
    fn opa_small_gain_infeasible_at_theta_zero() {
        let plant = PlantSpec::opa(2.1);
        let ss = build_state_space(&plant).unwrap();
        let err = synthesize_p(&ss, 0.0, 2.0, 1e-2).unwrap_err();
        assert!(matches!(err, Error::CertificateInfeasible(_)), "{err}");
    }

    #[test]
    fn zero_channel_reduces_to_lyapunov() {
        let mut plant = PlantSpec::opa(2.1);
        let z = CMatrix::zeros(1, 1);
        plant.e = DoubledMatrix::embed_blocks(&z, &z).unwrap();
        let ss = build_state_space(&plant).unwrap();
        let p = synthesize_p(&ss, 0.0, 2.0, 1e-2).unwrap();
        assert!(min_eig_hermitian(p.matrix()).unwrap() > 0.0);
        let rep = verify_certificate(p.matrix(), &ss, 0.0, 2.0).unwrap();
        assert!(rep.lmi_margin < 0.0);
        assert!(rep.mtilde_max_eig < 0.0);
    }

    #[test]
    fn verify_is_independent_of_synthesis() {
        // P = I on E = 0, A = -I, theta = 0: LMI = diag(-2I, -gamma I)
        let n = 2;
        let ss = StateSpace {
            a: -identity(2 * n),
            b: CMatrix::zeros(2 * n, 2),
            c: CMatrix::zeros(2, 2 * n),
            n,
            m: 1,
        };
        let rep = verify_certificate(&identity(2 * n), &ss, 0.0, 1.5).unwrap();
        assert!((rep.lmi_margin - (-1.5)).abs() < 1e-12);
        assert!((rep.mtilde_max_eig - (-2.0)).abs() < 1e-12);
        assert_eq!(rep.structure_residual, 0.0);
        assert!((rep.pos_def_min_eig - 1.0).abs() < 1e-12);

        // P = 0 is flagged by its zero smallest eigenvalue
        let rep = verify_certificate(&CMatrix::zeros(2 * n, 2 * n), &ss, 0.0, 1.5).unwrap();
        assert_eq!(rep.pos_def_min_eig, 0.0);
    }

    #[test]
    fn constants_noiseless_case() {
        // theta = 0, E = 0, N = 0, A = -I: lambda = 0, c3 = 0
        let m1 = identity(1).scale(0.0);
        let z = CMatrix::zeros(1, 1);
        let mut plant = PlantSpec::opa(1.0);
        plant.hamiltonian = DoubledMatrix::embed_blocks(&m1, &z).unwrap();
        plant.ntilde = CMatrix::zeros(1, 2);
        plant.e = DoubledMatrix::embed_blocks(&z, &z).unwrap();
        // A = -iJM - 0 = 0 is not Hurwitz, so damp through a synthetic drift
        let ss = StateSpace {
            a: -identity(2),
            b: CMatrix::zeros(2, 2),
            c: CMatrix::zeros(2, 2),
            n: 1,
            m: 1,
        };
        let p = identity(2);
        let k = stability_constants(&p, &plant, &ss, 0.0, 2.0).unwrap();
        assert_eq!(k.lambda, 0.0);
        assert_eq!(k.c3, 0.0);
        assert!(k.c > 0.0);
        // c1 at theta = 0 is the condition number of P
        assert!((k.c1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constants_require_negative_mtilde() {
        let plant = PlantSpec::opa(2.1);
        let ss = build_state_space(&plant).unwrap();
        // P = tiny makes M~ dominated by K^dag K / gamma > 0
        let p = identity(2).scale(1e-9);
        let err = stability_constants(&p, &plant, &ss, 0.2, 2.0).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn certificate_envelope_contract() {
        // M~ + c (P + (4 theta/gamma) E^dag E) <= 0 at the returned c
        let plant = PlantSpec::opa(2.1);
        let ss = build_state_space(&plant).unwrap();
        let cert = certify(&plant, 0.2, 2.0).unwrap();
        let envelope = cert.p.matrix()
            + (plant.e.matrix().adjoint() * plant.e.matrix()).scale(4.0 * 0.2 / 2.0);
        let mt = mtilde(cert.p.matrix(), &ss, 0.2, 2.0);
        let shifted = &mt + envelope.scale(cert.c);
        assert!(max_eig_hermitian(&shifted).unwrap() <= 1e-10);
    }

    #[test]
    fn lambda_opa_value() {
        // term2 = (4 theta / gamma) kappa for the OPA commutator
        let plant = PlantSpec::opa(2.1);
        let zl = crate::plant::commutator_zl(&plant);
        let t2 = (zl.adjoint() * &zl).trace().re;
        assert!((t2 - 2.1).abs() < 1e-12);
    }
}
