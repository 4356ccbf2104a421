//! Robust mean-square stability analysis for uncertain linear quantum
//! systems.
//!
//! The plant is a linear open quantum system in doubled-up form (mode vector
//! stacked with its adjoints), with a known quadratic Hamiltonian part, a
//! linear coupling vector, and an unknown quadratic Hamiltonian perturbation
//! `(1/2) z^dag Delta z` whose matrix is sector-bounded,
//! `0 <= Delta <= (4/gamma) I`. The crate decides robust stability three
//! complementary ways:
//!
//! - a frequency-domain test with Popov multiplier theta on the uncertainty
//!   channel's transfer function ([`popov`]),
//! - an algebraic certificate: a positive-definite doubled matrix P solving
//!   the associated strict-positive-real LMI via a Riccati equation, plus
//!   the exponential-decay constants it implies ([`certificate`]),
//! - a sampled-perturbation oracle that falsification-tests every verdict
//!   against closed-loop spectra and second-moment trajectories ([`oracle`]).

pub mod certificate;
pub mod error;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod plant;
pub mod popov;
pub mod report;

pub use error::{Error, Result};
pub use model::{
    make_structure, parse_plant, random_admissible_delta, CMatrix, Delta, DeltaStrategy,
    DoubledMatrix, PlantSpec, StructureMatrices,
};
pub use plant::{build_state_space, closed_loop_a, eval_g, reduce_annihilation_only, StateSpace};
pub use popov::{
    default_grid, min_gamma, popov_plot, search_theta, siso_conditions, spr_margin, spr_matrix,
    FrequencyGrid, MinGamma, PopovAnalysis, PopovPlot, ThetaPolicy, Verdict,
};
pub use certificate::{certify, stability_constants, synthesize_p, verify_certificate, Certificate};
pub use oracle::{consistency_sweep, covariance_trajectory, mss_check, OracleReport};
