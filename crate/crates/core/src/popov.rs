//! Frequency-domain robust stability test with Popov multiplier.
//!
//! For theta > 0 the per-frequency test matrix stacks both sector sides,
//! `diag(gamma I - (1+i theta w)G - h.c., gamma I + (1+i theta w)G + h.c.)`;
//! its smallest eigenvalue over a symmetric grid reproduces, for
//! annihilation-only plants, exactly the two scalar conditions of the SISO
//! reduction, and its positivity implies solvability of the certificate
//! Riccati equation. For theta = 0 the test is the unstructured small-gain
//! bound `gamma - 2 ||G(i w)||`, the most conservative member of the family.
//! The limit w -> +-inf is handled analytically: the test matrix tends to
//! `gamma I` exactly, because `E J E^dag` is Hermitian and the theta terms
//! cancel in the Hermitian part.


use crate::error::{Error, Result};
use crate::model::{c, hermitian_part, max_norm, CMatrix, PlantSpec};
use crate::numeric::{eigenvalues, is_hurwitz, min_eig_hermitian};
use crate::plant::{build_state_space, eval_g, SisoReduction, StateSpace};

/// Symmetric frequency grid (rad/s) plus the analytic infinity marker.
#[derive(Debug, Clone)]
pub struct FrequencyGrid {
    points: Vec<f64>,
    pub include_infinity: bool,
}

impl FrequencyGrid {
    /// Builds a grid from raw points: sorted, deduplicated, must be
    /// nonempty and symmetric about 0.
    pub fn from_points(mut points: Vec<f64>, include_infinity: bool) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Precondition("frequency grid must be nonempty".into()));
        }
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
        for &w in &points {
            if !w.is_finite() {
                return Err(Error::Precondition("grid points must be finite".into()));
            }
            let has_neg = points
                .iter()
                .any(|&v| (v + w).abs() <= 1e-9 * (1.0 + w.abs()));
            if !has_neg {
                return Err(Error::Precondition(format!(
                    "grid not symmetric: {w} present without {}",
                    -w
                )));
            }
        }
        Ok(FrequencyGrid {
            points,
            include_infinity,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Grid points ordered for the margin scan: ascending |w|, positive
    /// before negative, so ties in the margin resolve toward small positive
    /// frequencies deterministically.
    pub fn scan_order(&self) -> Vec<f64> {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| {
            (a.abs(), a.is_sign_negative())
                .partial_cmp(&(b.abs(), b.is_sign_negative()))
                .unwrap()
        });
        pts
    }
}

pub(crate) fn grid_from_drift(
    a: &CMatrix,
    n_points: usize,
    omega_max: Option<f64>,
) -> Result<FrequencyGrid> {
    let spec = eigenvalues(a)?;
    let rho = spec.values.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let mut resonances: Vec<f64> = spec
        .values
        .iter()
        .map(|l| l.im.abs())
        .filter(|&v| v > 1e-9 * rho.max(1.0))
        .collect();
    resonances.sort_by(|a, b| a.partial_cmp(b).unwrap());
    resonances.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));

    let band = 3.0 * rho.max(1.0);
    let omega_max = omega_max.unwrap_or((100.0 * rho).max(1e3)).max(2.0 * band);
    let half = n_points / 2 + 1;
    let n_lin = (half * 3) / 5;
    let n_log = half - n_lin;

    let mut nonneg: Vec<f64> = Vec::with_capacity(half + 12 * resonances.len() + 1);
    nonneg.push(0.0);
    for k in 1..=n_lin {
        nonneg.push(band * k as f64 / n_lin as f64);
    }
    let (lo, hi) = (band.ln(), omega_max.ln());
    for k in 1..=n_log {
        nonneg.push((lo + (hi - lo) * k as f64 / n_log as f64).exp());
    }
    // refinement near each resonance of the drift
    for &r in &resonances {
        let s = r.max(1.0);
        for d in [0.0, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2] {
            nonneg.push(r + d * s);
            if r - d * s > 0.0 {
                nonneg.push(r - d * s);
            }
        }
    }
    let mut pts: Vec<f64> = nonneg.iter().map(|&w| -w).chain(nonneg.iter().copied()).collect();
    pts.retain(|w| w.is_finite());
    FrequencyGrid::from_points(pts, true)
}

/// Default grid: a linear band spanning the drift spectrum, logarithmic
/// tails out to `max(1e3, 100 rho(A))` (or the explicit hint), and cluster
/// refinement near each resonance `|Im eig(A)|`.
pub fn default_grid(
    plant: &PlantSpec,
    n_points: usize,
    omega_max: Option<f64>,
) -> Result<FrequencyGrid> {
    if n_points < 16 {
        return Err(Error::Precondition("grid needs at least 16 points".into()));
    }
    let ss = build_state_space(plant)?;
    grid_from_drift(&ss.a, n_points, omega_max)
}

/// Per-frequency SPR test matrix (Hermitian by construction).
///
/// theta > 0: block diagonal over both sector sides; theta = 0: the
/// small-gain matrix `gamma I - 2 (G^dag G)^{1/2}`. A non-finite omega is
/// the infinity marker and yields `gamma I` exactly.
pub fn spr_matrix(g: &CMatrix, omega: f64, theta: f64, gamma: f64) -> CMatrix {
    let d = g.nrows();
    if !omega.is_finite() {
        let dim = if theta > 0.0 { 2 * d } else { d };
        return CMatrix::identity(dim, dim).scale(gamma);
    }
    if theta == 0.0 {
        let sq = sqrtm_psd(&(g.adjoint() * g));
        return hermitian_part(&(CMatrix::identity(d, d).scale(gamma) - sq.scale(2.0)));
    }
    let term = g.map(|v| v * c(1.0, theta * omega));
    let herm = &term + term.adjoint();
    let f_minus = CMatrix::identity(d, d).scale(gamma) - &herm;
    let f_plus = CMatrix::identity(d, d).scale(gamma) + &herm;
    let mut out = CMatrix::zeros(2 * d, 2 * d);
    out.view_mut((0, 0), (d, d)).copy_from(&f_minus);
    out.view_mut((d, d), (d, d)).copy_from(&f_plus);
    hermitian_part(&out)
}

fn sqrtm_psd(x: &CMatrix) -> CMatrix {
    let se = nalgebra::linalg::SymmetricEigen::new(hermitian_part(x));
    let d = CMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
        if i == j {
            c(se.eigenvalues[i].max(0.0).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    &se.eigenvectors * d * se.eigenvectors.adjoint()
}

/// Frequency responses precomputed over a grid, so margins for many
/// (theta, gamma) pairs reuse the same resolvent solves.
pub struct FrequencySweep {
    entries: Vec<(f64, CMatrix)>,
    include_infinity: bool,
}

impl FrequencySweep {
    pub fn new(ss: &StateSpace, grid: &FrequencyGrid) -> Result<Self> {
        let mut entries = Vec::with_capacity(grid.points().len());
        for w in grid.scan_order() {
            entries.push((w, eval_g(ss, w)?));
        }
        Ok(FrequencySweep {
            entries,
            include_infinity: grid.include_infinity,
        })
    }

    /// Minimum SPR eigenvalue over the grid and the frequency attaining it
    /// (`f64::INFINITY` for the analytic marker).
    pub fn margin(&self, theta: f64, gamma: f64) -> Result<(f64, f64)> {
        let mut best = f64::INFINITY;
        let mut worst = f64::NAN;
        for (w, g) in &self.entries {
            let me = min_eig_hermitian(&spr_matrix(g, *w, theta, gamma))?;
            if me < best {
                best = me;
                worst = *w;
            }
        }
        if self.include_infinity && gamma < best {
            best = gamma;
            worst = f64::INFINITY;
        }
        Ok((best, worst))
    }
}

/// Outcome of a frequency-domain robustness analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    CertifiedStable,
    NotCertified,
}

#[derive(Debug, Clone)]
pub struct PopovAnalysis {
    pub theta: f64,
    pub gamma: f64,
    /// min over the grid (and the infinity marker) of the smallest SPR
    /// eigenvalue.
    pub margin: f64,
    /// Frequency attaining the margin; `f64::INFINITY` marks the analytic
    /// endpoint.
    pub worst_omega: f64,
    pub verdict: Verdict,
    pub hurwitz: bool,
    pub abscissa: f64,
}

impl PopovAnalysis {
    pub fn certified(&self) -> bool {
        self.verdict == Verdict::CertifiedStable
    }
}

/// Sweeps the SPR test over the grid. Certified iff the drift is Hurwitz and
/// the margin is strictly positive.
pub fn spr_margin(
    plant: &PlantSpec,
    theta: f64,
    gamma: f64,
    grid: &FrequencyGrid,
) -> Result<PopovAnalysis> {
    if theta < 0.0 {
        return Err(Error::Precondition("theta must be nonnegative".into()));
    }
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::Precondition("gamma must be positive".into()));
    }
    let ss = build_state_space(plant)?;
    let (hurwitz, abscissa) = is_hurwitz(&ss.a, 0.0)?;
    let sweep = FrequencySweep::new(&ss, grid)?;
    analysis_from_sweep(&sweep, theta, gamma, hurwitz, abscissa)
}

fn analysis_from_sweep(
    sweep: &FrequencySweep,
    theta: f64,
    gamma: f64,
    hurwitz: bool,
    abscissa: f64,
) -> Result<PopovAnalysis> {
    let (margin, worst_omega) = sweep.margin(theta, gamma)?;
    let verdict = if hurwitz && margin > 0.0 {
        Verdict::CertifiedStable
    } else {
        Verdict::NotCertified
    };
    Ok(PopovAnalysis {
        theta,
        gamma,
        margin,
        worst_omega,
        verdict,
        hurwitz,
        abscissa,
    })
}

/// Maximizes the SPR margin over theta in `{0} U [1e-3, theta_max]`: coarse
/// logarithmic scan, then golden-section refinement around the best coarse
/// point. Ties break toward smaller theta.
pub fn search_theta(
    plant: &PlantSpec,
    gamma: f64,
    theta_max: f64,
    grid: &FrequencyGrid,
) -> Result<(f64, PopovAnalysis)> {
    if !theta_max.is_finite() || theta_max <= 0.0 {
        return Err(Error::Precondition("theta_max must be positive".into()));
    }
    let ss = build_state_space(plant)?;
    let (hurwitz, abscissa) = is_hurwitz(&ss.a, 0.0)?;
    let sweep = FrequencySweep::new(&ss, grid)?;
    let theta = search_theta_on_sweep(&sweep, gamma, theta_max)?;
    let analysis = analysis_from_sweep(&sweep, theta, gamma, hurwitz, abscissa)?;
    Ok((theta, analysis))
}

const THETA_TIE_TOL: f64 = 1e-12;

fn search_theta_on_sweep(sweep: &FrequencySweep, gamma: f64, theta_max: f64) -> Result<f64> {
    let mut candidates = vec![0.0];
    let n_coarse = 24;
    // log ladder over [min(1e-3, theta_max/4), theta_max]
    let floor = 1e-3f64.min(theta_max / 4.0).max(f64::MIN_POSITIVE);
    let (lo, hi) = (floor.ln(), theta_max.ln());
    for k in 0..n_coarse {
        candidates.push((lo + (hi - lo) * k as f64 / (n_coarse - 1) as f64).exp());
    }
    let mut best_idx = 0;
    let mut best_margin = f64::NEG_INFINITY;
    let mut margins = Vec::with_capacity(candidates.len());
    for (i, &th) in candidates.iter().enumerate() {
        let (m, _) = sweep.margin(th, gamma)?;
        margins.push(m);
        if m > best_margin + THETA_TIE_TOL * gamma {
            best_margin = m;
            best_idx = i;
        }
    }
    if best_idx == 0 {
        return Ok(0.0);
    }
    // golden-section refinement between the coarse neighbors, kept strictly
    // inside theta > 0 (theta = 0 is a different branch and competes below)
    let a = if best_idx == 1 {
        0.5 * floor
    } else {
        candidates[best_idx - 1]
    };
    let b = if best_idx + 1 < candidates.len() {
        candidates[best_idx + 1]
    } else {
        candidates[best_idx]
    };
    let b = b.max(a * (1.0 + 1e-9));
    let (theta_ref, margin_ref) = golden_max(a, b, 40, &mut |th| {
        Ok(sweep.margin(th, gamma)?.0)
    })?;
    let (theta_best, margin_best) = if margin_ref > best_margin + THETA_TIE_TOL * gamma {
        (theta_ref, margin_ref)
    } else {
        (candidates[best_idx], best_margin)
    };
    // never report a worse answer than theta = 0
    if margins[0] >= margin_best - THETA_TIE_TOL * gamma {
        return Ok(0.0);
    }
    Ok(theta_best.min(theta_max))
}

fn golden_max(
    mut a: f64,
    mut b: f64,
    iters: usize,
    f: &mut impl FnMut(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..iters {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    // prefer the smaller theta on ties
    if f1 >= f2 {
        Ok((x1, f1))
    } else {
        Ok((x2, f2))
    }
}

/// Policy for choosing theta inside the gamma minimization.
#[derive(Debug, Clone, Copy)]
pub enum ThetaPolicy {
    Fixed(f64),
    Search { theta_max: f64 },
}

#[derive(Debug, Clone)]
pub struct MinGamma {
    pub gamma_star: f64,
    /// theta used at the feasible end of the final bracket.
    pub theta: f64,
    /// Set when the uncertainty channel vanishes and any gamma > 0 passes.
    pub degenerate: bool,
}

const MIN_GAMMA_LO: f64 = 1e-6;
const MIN_GAMMA_HI: f64 = 65536.0;
const MIN_GAMMA_MAX_ITERS: usize = 60;

/// Bisects the smallest gamma at which the SPR test (under the theta
/// policy) still certifies. Smaller gamma admits a larger uncertainty set.
pub fn min_gamma(plant: &PlantSpec, policy: ThetaPolicy, tol: f64) -> Result<MinGamma> {
    let ss = build_state_space(plant)?;
    let (hurwitz, abscissa) = is_hurwitz(&ss.a, 0.0)?;
    if !hurwitz {
        return Err(Error::InfeasibleAtUpperBound(format!(
            "nominal drift not Hurwitz (abscissa {abscissa:.3e}); no gamma can certify"
        )));
    }
    if max_norm(plant.e.matrix()) == 0.0 {
        return Ok(MinGamma {
            gamma_star: 0.0,
            theta: match policy {
                ThetaPolicy::Fixed(t) => t,
                ThetaPolicy::Search { .. } => 0.0,
            },
            degenerate: true,
        });
    }
    let grid = grid_from_drift(&ss.a, 512, None)?;
    let sweep = FrequencySweep::new(&ss, &grid)?;
    let eval = |gamma: f64| -> Result<(bool, f64)> {
        let theta = match policy {
            ThetaPolicy::Fixed(t) => t,
            ThetaPolicy::Search { theta_max } => search_theta_on_sweep(&sweep, gamma, theta_max)?,
        };
        let (margin, _) = sweep.margin(theta, gamma)?;
        Ok((margin > 0.0, theta))
    };
    let (hi_ok, mut theta_at_hi) = eval(MIN_GAMMA_HI)?;
    if !hi_ok {
        return Err(Error::InfeasibleAtUpperBound(format!(
            "SPR fails even at gamma = {MIN_GAMMA_HI}"
        )));
    }
    let (lo_ok, theta_lo) = eval(MIN_GAMMA_LO)?;
    if lo_ok {
        return Ok(MinGamma {
            gamma_star: MIN_GAMMA_LO,
            theta: theta_lo,
            degenerate: true,
        });
    }
    let mut lo = MIN_GAMMA_LO;
    let mut hi = MIN_GAMMA_HI;
    for _ in 0..MIN_GAMMA_MAX_ITERS {
        if (hi - lo) <= tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (ok, theta_mid) = eval(mid)?;
        if ok {
            hi = mid;
            theta_at_hi = theta_mid;
        } else {
            lo = mid;
        }
    }
    Ok(MinGamma {
        gamma_star: 0.5 * (lo + hi),
        theta: theta_at_hi,
        degenerate: false,
    })
}

/// The two scalar test values of the SISO reduction at one frequency:
/// `gamma/4 +- (Re G1(iw) - theta w Im G1(iw))`.
pub fn siso_conditions(
    reduction: &SisoReduction,
    omega: f64,
    theta: f64,
    gamma: f64,
) -> Result<(f64, f64)> {
    let u = reduction.g1_at_omega(omega)?;
    let drive = u.re - theta * omega * u.im;
    Ok((gamma / 4.0 + drive, gamma / 4.0 - drive))
}

#[derive(Debug, Clone)]
pub struct PlotPoint {
    pub omega: f64,
    /// Re G1(i w)
    pub x: f64,
    /// w * Im G1(i w)
    pub y: f64,
    pub lhs_a: f64,
    pub lhs_b: f64,
}

/// Popov-plot data: the parametric curve and the allowable region between
/// two lines of slope 1/theta with x-intercepts +-gamma/4 (a vertical strip
/// when theta = 0).
#[derive(Debug, Clone)]
pub struct PopovPlot {
    pub points: Vec<PlotPoint>,
    pub theta: f64,
    pub gamma: f64,
    pub include_infinity: bool,
    /// Verdict of the authoritative frequency test on the same grid. For
    /// theta > 0 this coincides with "every point satisfies both scalar
    /// conditions"; for theta = 0 the small-gain test |G1| < gamma/4 decides
    /// (the strip alone constrains only Re G1).
    pub inside: bool,
}

pub fn popov_plot(
    reduction: &SisoReduction,
    grid: &FrequencyGrid,
    theta: f64,
    gamma: f64,
) -> Result<PopovPlot> {
    let mut points = Vec::with_capacity(grid.points().len());
    let mut all_positive = true;
    let mut sup_abs_g1: f64 = 0.0;
    for &w in grid.points() {
        let u = reduction.g1_at_omega(w)?;
        let (lhs_a, lhs_b) = siso_conditions(reduction, w, theta, gamma)?;
        all_positive &= lhs_a > 0.0 && lhs_b > 0.0;
        sup_abs_g1 = sup_abs_g1.max(u.norm());
        points.push(PlotPoint {
            omega: w,
            x: u.re,
            y: w * u.im,
            lhs_a,
            lhs_b,
        });
    }
    let inside = if theta > 0.0 {
        all_positive
    } else {
        sup_abs_g1 < gamma / 4.0
    };
    Ok(PopovPlot {
        points,
        theta,
        gamma,
        include_infinity: grid.include_infinity,
        inside,
    })
}

impl PopovPlot {
    /// CSV per the plot interface: one row per finite grid point, `inf`
    /// literal for the analytic marker.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,re_g1,omega_im_g1,lhs_a,lhs_b\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.omega, p.x, p.y, p.lhs_a, p.lhs_b
            ));
        }
        if self.include_infinity {
            let edge = self.gamma / 4.0;
            out.push_str(&format!("inf,0,0,{edge},{edge}\n"));
        }
        out
    }

    /// Standalone SVG: the curve, the allowable-region lines (slope 1/theta,
    /// x-intercepts +-gamma/4; vertical strip for theta = 0) and axes.
    pub fn to_svg(&self) -> String {
        let (w, h) = (720.0, 540.0);
        let margin = 64.0;
        let quarter = self.gamma / 4.0;
        let mut xmin = -1.4 * quarter;
        let mut xmax = 1.4 * quarter;
        let mut ymin = -1.0f64;
        let mut ymax = 1.0f64;
        for p in &self.points {
            xmin = xmin.min(p.x);
            xmax = xmax.max(p.x);
            ymin = ymin.min(p.y);
            ymax = ymax.max(p.y);
        }
        let pad = |lo: f64, hi: f64| {
            let d = (hi - lo).max(1e-9);
            (lo - 0.08 * d, hi + 0.08 * d)
        };
        let (xmin, xmax) = pad(xmin, xmax);
        let (ymin, ymax) = pad(ymin, ymax);
        let sx = (w - 2.0 * margin) / (xmax - xmin);
        let sy = (h - 2.0 * margin) / (ymax - ymin);
        let px = |x: f64| margin + (x - xmin) * sx;
        let py = |y: f64| h - margin - (y - ymin) * sy;

        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
        ));
        svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        // axes through the origin when visible
        if xmin < 0.0 && xmax > 0.0 {
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#999\" stroke-width=\"1\"/>\n",
                px(0.0), py(ymin), px(0.0), py(ymax)
            ));
        }
        if ymin < 0.0 && ymax > 0.0 {
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#999\" stroke-width=\"1\"/>\n",
                px(xmin), py(0.0), px(xmax), py(0.0)
            ));
        }
        // allowable region boundary
        if self.theta > 0.0 {
            for sign in [-1.0, 1.0] {
                // y = (x + sign * gamma/4) / theta
                let y_at = |x: f64| (x + sign * quarter) / self.theta;
                svg.push_str(&format!(
                    "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#c1121f\" stroke-width=\"1.5\" stroke-dasharray=\"7 4\"/>\n",
                    px(xmin), py(y_at(xmin)), px(xmax), py(y_at(xmax))
                ));
            }
        } else {
            for sign in [-1.0, 1.0] {
                let x = sign * quarter;
                svg.push_str(&format!(
                    "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#c1121f\" stroke-width=\"1.5\" stroke-dasharray=\"7 4\"/>\n",
                    px(x), py(ymin), px(x), py(ymax)
                ));
            }
        }
        // intercept markers
        for sign in [-1.0f64, 1.0] {
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#c1121f\">{}&#947;/4</text>\n",
                px(sign * quarter) + 3.0,
                py(0.0) - 5.0,
                if sign < 0.0 { "-" } else { "" }
            ));
        }
        // the curve, ordered by omega for a clean polyline
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| a.omega.partial_cmp(&b.omega).unwrap());
        let path: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", px(p.x), py(p.y)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1d4ed8\" stroke-width=\"1.8\"/>\n",
            path.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\">Re G&#8321;(i&#969;)</text>\n",
            w - margin - 80.0,
            h - margin + 36.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" transform=\"rotate(-90 {:.2} {:.2})\">&#969;&#183;Im G&#8321;(i&#969;)</text>\n",
            margin - 40.0,
            margin + 110.0,
            margin - 40.0,
            margin + 110.0
        ));
        svg.push_str(&format!(
            "<text x=\"{margin}\" y=\"{:.2}\" font-size=\"13\">&#952; = {}, &#947; = {}, {}</text>\n",
            margin - 18.0,
            self.theta,
            self.gamma,
            if self.inside { "curve inside allowable region" } else { "curve leaves allowable region" }
        ));
        svg.push_str("</svg>\n");
        svg
    }
}
