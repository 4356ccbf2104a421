//! Brute-force validation layer: samples admissible perturbations, decides
//! mean-square stability of each closed loop by the Hurwitz property, and
//! integrates the second-moment ODE
//! `dS/dt = A_cl S + S A_cl^dag + D`, `D = J Ntilde^dag Ntilde J`,
//! to corroborate the certified exponential envelope.

use crate::error::{Error, Result};
use crate::model::{
    hermitian_part, jmat, max_norm, CMatrix, Delta, DeltaStrategy, PlantSpec,
    random_admissible_delta,
};
use crate::numeric::{is_hurwitz, min_eig_hermitian};
use crate::plant::closed_loop_a;
use crate::popov::{default_grid, spr_margin, PopovAnalysis};

/// The constant noise matrix of the moment dynamics.
pub fn noise_matrix(plant: &PlantSpec) -> CMatrix {
    let jn = jmat(plant.n);
    &jn * plant.ntilde.adjoint() * &plant.ntilde * &jn
}

/// Hurwitz check of the closed loop under one perturbation.
pub fn mss_check(plant: &PlantSpec, delta: &Delta) -> Result<(bool, f64)> {
    let a_cl = closed_loop_a(plant, delta)?;
    is_hurwitz(&a_cl, 0.0)
}

/// A fixed-step RK4 covariance trajectory.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub traces: Vec<f64>,
    pub sigmas: Vec<CMatrix>,
    /// Trajectory blew past the overflow guard (reported, not an error).
    pub unstable: bool,
    /// Largest Hermiticity drift observed before per-step symmetrization.
    pub herm_residual_max: f64,
}

const DIVERGENCE_GUARD: f64 = 1e12;

/// Integrates `dS/dt = A_cl S + S A_cl^dag + D` from `sigma0` with fixed-step
/// RK4, recording `tr S` along the way.
pub fn covariance_trajectory(
    plant: &PlantSpec,
    delta: &Delta,
    sigma0: &CMatrix,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !dt.is_finite() || dt <= 0.0 || t_final < dt {
        return Err(Error::Precondition(
            "need dt > 0 and t_final >= dt".into(),
        ));
    }
    let n2 = 2 * plant.n;
    if sigma0.shape() != (n2, n2) {
        return Err(Error::InvalidDimension(format!(
            "sigma0 must be {n2}x{n2}, got {:?}",
            sigma0.shape()
        )));
    }
    let scale0 = max_norm(sigma0).max(1.0);
    if max_norm(&(sigma0 - sigma0.adjoint())) > 1e-9 * scale0 {
        return Err(Error::Precondition("sigma0 must be Hermitian".into()));
    }
    if min_eig_hermitian(sigma0)? < -1e-9 * scale0 {
        return Err(Error::Precondition("sigma0 must be positive semidefinite".into()));
    }
    let a_cl = closed_loop_a(plant, delta)?;
    let d = noise_matrix(plant);
    let deriv = |s: &CMatrix| -> CMatrix { &a_cl * s + s * a_cl.adjoint() + &d };

    let steps = (t_final / dt).ceil() as usize;
    let mut sigma = hermitian_part(sigma0);
    let mut times = Vec::with_capacity(steps + 1);
    let mut traces = Vec::with_capacity(steps + 1);
    let mut sigmas = Vec::with_capacity(steps + 1);
    let mut herm_residual_max: f64 = 0.0;
    let mut unstable = false;
    times.push(0.0);
    traces.push(sigma.trace().re);
    sigmas.push(sigma.clone());
    for step in 1..=steps {
        let k1 = deriv(&sigma);
        let k2 = deriv(&(&sigma + k1.scale(dt / 2.0)));
        let k3 = deriv(&(&sigma + k2.scale(dt / 2.0)));
        let k4 = deriv(&(&sigma + k3.scale(dt)));
        let next = &sigma + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);
        let herm_res = max_norm(&(&next - next.adjoint()));
        herm_residual_max = herm_residual_max.max(herm_res / max_norm(&next).max(1.0));
        sigma = hermitian_part(&next);
        let tr = sigma.trace().re;
        if !tr.is_finite() || tr.abs() > DIVERGENCE_GUARD * scale0 {
            unstable = true;
            break;
        }
        times.push(step as f64 * dt);
        traces.push(tr);
        sigmas.push(sigma.clone());
    }
    Ok(Trajectory {
        times,
        traces,
        sigmas,
        unstable,
        herm_residual_max,
    })
}

#[derive(Debug, Clone)]
pub struct SampleOutcome {
    pub delta: Delta,
    pub abscissa: f64,
    pub hurwitz: bool,
}

#[derive(Debug, Clone)]
pub enum Consistency {
    /// Every sampled closed loop was Hurwitz.
    Consistent,
    /// A sampled perturbation destabilized the closed loop.
    Counterexample(Box<Delta>),
}

#[derive(Debug)]
pub struct OracleReport {
    pub analysis: PopovAnalysis,
    pub samples: Vec<SampleOutcome>,
    pub consistency: Consistency,
}

impl OracleReport {
    pub fn consistent(&self) -> bool {
        matches!(self.consistency, Consistency::Consistent)
    }

    /// The must-never-happen outcome: a certified verdict contradicted by a
    /// sampled perturbation.
    pub fn refutes_certification(&self) -> bool {
        self.analysis.certified() && !self.consistent()
    }
}

/// Samples admissible perturbations (the extreme points 0 and `(4/gamma) I`
/// first, then boundary projections and interior draws) and checks each
/// closed loop. When the frequency test certified the plant, every sample
/// must be Hurwitz; the first offender is reported verbatim.
pub fn consistency_sweep(
    plant: &PlantSpec,
    theta: f64,
    gamma: f64,
    n_samples: usize,
    seed: u64,
) -> Result<OracleReport> {
    if n_samples == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    let grid = default_grid(plant, 256, None)?;
    let analysis = spr_margin(plant, theta, gamma, &grid)?;

    let mut samples = Vec::with_capacity(n_samples);
    let mut counterexample = None;
    for k in 0..n_samples {
        let delta = match k {
            0 => Delta::zero(plant.m),
            1 => random_admissible_delta(plant.m, gamma, seed, DeltaStrategy::Extreme)?,
            _ => {
                let strategy = if k % 3 == 2 {
                    DeltaStrategy::Boundary
                } else {
                    DeltaStrategy::Interior
                };
                random_admissible_delta(plant.m, gamma, seed.wrapping_add(k as u64), strategy)?
            }
        };
        let (hurwitz, abscissa) = mss_check(plant, &delta)?;
        if !hurwitz && counterexample.is_none() {
            counterexample = Some(delta.clone());
        }
        samples.push(SampleOutcome {
            delta,
            abscissa,
            hurwitz,
        });
    }
    let consistency = match counterexample {
        None => Consistency::Consistent,
        Some(d) => Consistency::Counterexample(Box::new(d)),
    };
    Ok(OracleReport {
        analysis,
        samples,
        consistency,
    })
}
