//! Doubled-up data model: structure matrices, block-symmetric matrices,
//! plant specifications and admissible perturbation sampling.
//!
//! A doubled-up matrix is a 2k x 2l complex matrix of the block form
//! `[[X1, X2], [X2^#, X1^#]]` (`^#` = entrywise conjugate), equivalently a
//! matrix satisfying `Sigma_2k * X^# * Sigma_2l = X` where `Sigma` is the
//! block-swap matrix. All model matrices (Hamiltonian, coupling, uncertainty
//! channel, perturbation, certificate) carry this symmetry.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Default tolerance for structural validation, relative to the largest
/// entry magnitude (double-precision round-off on dense products).
pub const STRUCTURE_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Max-norm (largest entry magnitude).
pub fn max_norm(x: &CMatrix) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Entrywise complex conjugate.
pub fn conj(x: &CMatrix) -> CMatrix {
    x.map(|v| v.conj())
}

/// Hermitian part `(X + X^dag)/2`.
pub fn hermitian_part(x: &CMatrix) -> CMatrix {
    (x + x.adjoint()).scale(0.5)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// The commutation structure matrix `J = diag(I_k, -I_k)`.
pub fn jmat(k: usize) -> CMatrix {
    CMatrix::from_fn(2 * k, 2 * k, |i, j| {
        if i == j {
            c(if i < k { 1.0 } else { -1.0 }, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// The block-swap matrix `Sigma = [[0, I_k], [I_k, 0]]`.
pub fn sigma_mat(k: usize) -> CMatrix {
    CMatrix::from_fn(2 * k, 2 * k, |i, j| {
        if (i + k) % (2 * k) == j {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// `Sigma_rows * X^# * Sigma_cols` for a matrix with even dimensions.
pub fn sigma_conj_sigma(x: &CMatrix) -> Result<CMatrix> {
    let (r, cl) = x.shape();
    if r % 2 != 0 || cl % 2 != 0 {
        return Err(Error::InvalidDimension(format!(
            "doubled symmetry requires even dimensions, got {r}x{cl}"
        )));
    }
    Ok(sigma_mat(r / 2) * conj(x) * sigma_mat(cl / 2))
}

/// The structure matrices J and Sigma of size 2k x 2k.
#[derive(Debug, Clone)]
pub struct StructureMatrices {
    pub j: CMatrix,
    pub sigma: CMatrix,
}

pub fn make_structure(k: usize) -> Result<StructureMatrices> {
    if k == 0 {
        return Err(Error::InvalidDimension(
            "structure matrices need k >= 1".into(),
        ));
    }
    Ok(StructureMatrices {
        j: jmat(k),
        sigma: sigma_mat(k),
    })
}

/// Residual and verdict of the doubled-symmetry check
/// `||Sigma X^# Sigma - X||_max <= tol`.
pub fn validate_doubled(x: &CMatrix, tol: f64) -> Result<(bool, f64)> {
    let swapped = sigma_conj_sigma(x)?;
    let residual = max_norm(&(swapped - x));
    Ok((residual <= tol, residual))
}

/// A matrix with the doubled block symmetry `[[X1, X2], [X2^#, X1^#]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledMatrix {
    data: CMatrix,
    half_rows: usize,
    half_cols: usize,
}

impl DoubledMatrix {
    /// Builds `[[X1, X2], [X2^#, X1^#]]` from its upper blocks.
    pub fn embed_blocks(x1: &CMatrix, x2: &CMatrix) -> Result<Self> {
        if x1.shape() != x2.shape() {
            return Err(Error::InvalidDimension(format!(
                "block shapes differ: {:?} vs {:?}",
                x1.shape(),
                x2.shape()
            )));
        }
        let (k, l) = x1.shape();
        if k == 0 || l == 0 {
            return Err(Error::InvalidDimension("empty blocks".into()));
        }
        let mut data = CMatrix::zeros(2 * k, 2 * l);
        data.view_mut((0, 0), (k, l)).copy_from(x1);
        data.view_mut((0, l), (k, l)).copy_from(x2);
        data.view_mut((k, 0), (k, l)).copy_from(&conj(x2));
        data.view_mut((k, l), (k, l)).copy_from(&conj(x1));
        Ok(DoubledMatrix {
            data,
            half_rows: k,
            half_cols: l,
        })
    }

    /// Wraps a full matrix, validating the block symmetry at `tol`
    /// (relative to the largest entry).
    pub fn from_full(data: CMatrix, tol: f64) -> Result<Self> {
        let scale = max_norm(&data).max(1.0);
        let (ok, residual) = validate_doubled(&data, tol * scale)?;
        if !ok {
            return Err(Error::Validation {
                path: "doubled".into(),
                message: format!("block-symmetry residual {residual:.3e} exceeds {tol:.1e}"),
            });
        }
        let (r, cl) = data.shape();
        Ok(DoubledMatrix {
            data,
            half_rows: r / 2,
            half_cols: cl / 2,
        })
    }

    /// Projects an (approximately doubled) matrix onto the doubled form:
    /// `(X + Sigma X^# Sigma)/2`.
    pub fn project(data: &CMatrix) -> Result<Self> {
        let projected = (data + sigma_conj_sigma(data)?).scale(0.5);
        let (r, cl) = projected.shape();
        Ok(DoubledMatrix {
            data: projected,
            half_rows: r / 2,
            half_cols: cl / 2,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn half_rows(&self) -> usize {
        self.half_rows
    }

    pub fn half_cols(&self) -> usize {
        self.half_cols
    }

    /// Upper-left block X1.
    pub fn block1(&self) -> CMatrix {
        self.data
            .view((0, 0), (self.half_rows, self.half_cols))
            .into()
    }

    /// Upper-right block X2.
    pub fn block2(&self) -> CMatrix {
        self.data
            .view((0, self.half_cols), (self.half_rows, self.half_cols))
            .into()
    }
}

/// Nominal plant data: mode count, Hamiltonian matrix, stacked coupling rows,
/// uncertainty channel and the sector bound.
#[derive(Debug, Clone)]
pub struct PlantSpec {
    /// Mode count n.
    pub n: usize,
    /// Coupling channel count c (rows of Ntilde).
    pub channels: usize,
    /// Uncertainty channel count m (rows of E1).
    pub m: usize,
    /// Hermitian doubled Hamiltonian matrix, 2n x 2n.
    pub hamiltonian: DoubledMatrix,
    /// Stacked coupling rows `[N1 N2]`, c x 2n.
    pub ntilde: CMatrix,
    /// Uncertainty channel, doubled 2m x 2n.
    pub e: DoubledMatrix,
    /// Sector bound gamma > 0.
    pub gamma: f64,
}

impl PlantSpec {
    pub fn new(
        hamiltonian: DoubledMatrix,
        ntilde: CMatrix,
        e: DoubledMatrix,
        gamma: f64,
    ) -> Result<Self> {
        let n = hamiltonian.half_rows();
        let plant = PlantSpec {
            n,
            channels: ntilde.nrows(),
            m: e.half_rows(),
            hamiltonian,
            ntilde,
            e,
            gamma,
        };
        plant.validate()?;
        Ok(plant)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if self.hamiltonian.half_cols() != n {
            return Err(Error::Validation {
                path: "M".into(),
                message: "Hamiltonian matrix must be square".into(),
            });
        }
        let m_full = self.hamiltonian.matrix();
        let scale = max_norm(m_full).max(1.0);
        let herm_res = max_norm(&(m_full - m_full.adjoint()));
        if herm_res > STRUCTURE_TOL * scale {
            return Err(Error::Validation {
                path: "M".into(),
                message: format!("Hamiltonian matrix not Hermitian (residual {herm_res:.3e})"),
            });
        }
        if self.ntilde.ncols() != 2 * n {
            return Err(Error::Validation {
                path: "Ntilde".into(),
                message: format!(
                    "coupling rows must have 2n = {} columns, got {}",
                    2 * n,
                    self.ntilde.ncols()
                ),
            });
        }
        if self.channels == 0 {
            return Err(Error::Validation {
                path: "Ntilde".into(),
                message: "at least one coupling channel required".into(),
            });
        }
        if self.e.half_cols() != n {
            return Err(Error::Validation {
                path: "E".into(),
                message: format!(
                    "uncertainty channel must have 2n = {} columns, got {}",
                    2 * n,
                    2 * self.e.half_cols()
                ),
            });
        }
        if !self.gamma.is_finite() || self.gamma <= 0.0 {
            return Err(Error::Validation {
                path: "gamma".into(),
                message: format!("sector bound must be positive and finite, got {}", self.gamma),
            });
        }
        for mat in [m_full, &self.ntilde, self.e.matrix()] {
            if mat.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::Validation {
                    path: "entries".into(),
                    message: "non-finite entry".into(),
                });
            }
        }
        Ok(())
    }

    /// N1 block (first n columns of Ntilde).
    pub fn n1(&self) -> CMatrix {
        self.ntilde.view((0, 0), (self.channels, self.n)).into()
    }

    /// N2 block (last n columns of Ntilde).
    pub fn n2(&self) -> CMatrix {
        self.ntilde.view((0, self.n), (self.channels, self.n)).into()
    }

    /// The doubled coupling matrix `N = [[N1, N2], [N2^#, N1^#]]`, 2c x 2n.
    pub fn doubled_coupling(&self) -> DoubledMatrix {
        DoubledMatrix::embed_blocks(&self.n1(), &self.n2())
            .expect("blocks of equal shape by construction")
    }

    /// Single-mode optical parametric amplifier test plant: one mode with
    /// M1 = -1, coupling sqrt(kappa) a, unit uncertainty channel, gamma = 2.
    pub fn opa(kappa: f64) -> PlantSpec {
        let m1 = CMatrix::from_element(1, 1, c(-1.0, 0.0));
        let m2 = CMatrix::from_element(1, 1, c(0.0, 0.0));
        let zero = CMatrix::from_element(1, 1, c(0.0, 0.0));
        let n1 = CMatrix::from_element(1, 1, c(kappa.sqrt(), 0.0));
        let e1 = CMatrix::from_element(1, 1, c(1.0, 0.0));
        let hamiltonian = DoubledMatrix::embed_blocks(&m1, &m2).unwrap();
        let mut ntilde = CMatrix::zeros(1, 2);
        ntilde[(0, 0)] = n1[(0, 0)];
        let e = DoubledMatrix::embed_blocks(&e1, &zero).unwrap();
        PlantSpec::new(hamiltonian, ntilde, e, 2.0).expect("valid by construction")
    }
}

/// An admissible quadratic perturbation: doubled Hermitian with
/// `0 <= Delta <= (4/gamma) I`.
#[derive(Debug, Clone)]
pub struct Delta {
    pub m: usize,
    pub value: DoubledMatrix,
}

impl Delta {
    pub fn new(value: DoubledMatrix) -> Self {
        let m = value.half_rows();
        Delta { m, value }
    }

    pub fn zero(m: usize) -> Self {
        let z = CMatrix::zeros(m, m);
        Delta::new(DoubledMatrix::embed_blocks(&z, &z).unwrap())
    }

    pub fn matrix(&self) -> &CMatrix {
        self.value.matrix()
    }

    /// Extreme eigenvalues of the (symmetrized) perturbation.
    pub fn eig_range(&self) -> (f64, f64) {
        let h = hermitian_part(self.value.matrix());
        let eigs = nalgebra::linalg::SymmetricEigen::new(h).eigenvalues;
        let lo = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Checks `0 <= Delta <= (4/gamma) I` by extreme eigenvalues, with an
    /// absolute slack `tol` on both ends.
    pub fn is_admissible(&self, gamma: f64, tol: f64) -> bool {
        let (lo, hi) = self.eig_range();
        lo >= -tol && hi <= 4.0 / gamma + tol
    }
}

/// Sampling strategy for admissible perturbations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaStrategy {
    /// The top extreme point `(4/gamma) I`.
    Extreme,
    /// `(4/gamma) Q diag(u) Q^dag`, `u` uniform in `[0, 1]`; spectrum spans
    /// the whole admissible interval.
    Interior,
    /// `(4/gamma)` times a random doubled projection; eigenvalues sit on the
    /// boundary {0, 4/gamma}.
    Boundary,
}

fn random_doubled_hermitian(m: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g1 = CMatrix::from_fn(m, m, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let g1 = hermitian_part(&g1);
    let g2 = CMatrix::from_fn(m, m, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let g2 = (&g2 + g2.transpose()).scale(0.5);
    DoubledMatrix::embed_blocks(&g1, &g2).unwrap().matrix().clone()
}

/// Draws a doubled Hermitian perturbation with eigenvalues in `[0, 4/gamma]`,
/// deterministically per seed.
///
/// The eigenbasis comes from a random doubled Hermitian matrix; its
/// eigenvectors satisfy `Sigma v^# = phase * v`, so any real respectral
/// recombination stays doubled (the result is projected back onto the
/// doubled form to scrub round-off).
pub fn random_admissible_delta(
    m: usize,
    gamma: f64,
    seed: u64,
    strategy: DeltaStrategy,
) -> Result<Delta> {
    if m == 0 {
        return Err(Error::InvalidDimension("delta needs m >= 1".into()));
    }
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::Precondition(format!("gamma must be positive, got {gamma}")));
    }
    let top = 4.0 / gamma;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let value = match strategy {
        DeltaStrategy::Extreme => identity(2 * m).scale(top),
        DeltaStrategy::Interior | DeltaStrategy::Boundary => {
            let g = random_doubled_hermitian(m, &mut rng);
            let q = nalgebra::linalg::SymmetricEigen::new(g).eigenvectors;
            let u: Vec<f64> = (0..2 * m)
                .map(|_| match strategy {
                    DeltaStrategy::Interior => rng.random_range(0.0..1.0),
                    _ => {
                        if rng.random_bool(0.5) {
                            1.0
                        } else {
                            0.0
                        }
                    }
                })
                .collect();
            let d = CMatrix::from_diagonal(&DVector::from_iterator(
                2 * m,
                u.iter().map(|&v| c(v * top, 0.0)),
            ));
            &q * d * q.adjoint()
        }
    };
    let value = hermitian_part(&value);
    let doubled = DoubledMatrix::project(&value)?;
    let delta = Delta::new(doubled);
    debug_assert!(delta.is_admissible(gamma, 1e-9 * top.max(1.0)));
    Ok(delta)
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

/// Complex matrix as nested rows of `[re, im]` pairs.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_rows(x: &CMatrix) -> MatrixRows {
    (0..x.nrows())
        .map(|i| (0..x.ncols()).map(|j| [x[(i, j)].re, x[(i, j)].im]).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &MatrixRows, path: &str) -> Result<CMatrix> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::Validation {
            path: path.into(),
            message: "matrix must be non-empty".into(),
        });
    }
    let ncols = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::Validation {
                path: format!("{path}[{i}]"),
                message: format!("ragged row: expected {ncols} entries, got {}", row.len()),
            });
        }
        for (j, entry) in row.iter().enumerate() {
            if !entry[0].is_finite() || !entry[1].is_finite() {
                return Err(Error::Validation {
                    path: format!("{path}[{i}][{j}]"),
                    message: "non-finite entry".into(),
                });
            }
        }
    }
    Ok(CMatrix::from_fn(rows.len(), ncols, |i, j| {
        c(rows[i][j][0], rows[i][j][1])
    }))
}

/// On-disk plant document. Doubled matrices are stored by their upper
/// blocks only; lower blocks are always reconstructed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantDocument {
    pub n: usize,
    #[serde(rename = "M1")]
    pub m1: MatrixRows,
    #[serde(rename = "M2")]
    pub m2: MatrixRows,
    #[serde(rename = "Ntilde1")]
    pub ntilde1: MatrixRows,
    #[serde(rename = "Ntilde2")]
    pub ntilde2: MatrixRows,
    #[serde(rename = "E1")]
    pub e1: MatrixRows,
    #[serde(rename = "E2")]
    pub e2: MatrixRows,
    pub gamma: f64,
}

impl PlantDocument {
    pub fn from_plant(plant: &PlantSpec) -> Self {
        PlantDocument {
            n: plant.n,
            m1: matrix_to_rows(&plant.hamiltonian.block1()),
            m2: matrix_to_rows(&plant.hamiltonian.block2()),
            ntilde1: matrix_to_rows(&plant.n1()),
            ntilde2: matrix_to_rows(&plant.n2()),
            e1: matrix_to_rows(&plant.e.block1()),
            e2: matrix_to_rows(&plant.e.block2()),
            gamma: plant.gamma,
        }
    }

    pub fn into_plant(&self) -> Result<PlantSpec> {
        let m1 = rows_to_matrix(&self.m1, "M1")?;
        let m2 = rows_to_matrix(&self.m2, "M2")?;
        let n = self.n;
        if n == 0 {
            return Err(Error::Validation {
                path: "n".into(),
                message: "mode count must be positive".into(),
            });
        }
        for (name, mat, rows, cols) in [
            ("M1", &m1, n, n),
            ("M2", &m2, n, n),
        ] {
            if mat.shape() != (rows, cols) {
                return Err(Error::Validation {
                    path: name.into(),
                    message: format!("expected {rows}x{cols}, got {:?}", mat.shape()),
                });
            }
        }
        let scale = max_norm(&m1).max(max_norm(&m2)).max(1.0);
        if max_norm(&(&m1 - m1.adjoint())) > STRUCTURE_TOL * scale {
            return Err(Error::Validation {
                path: "M1".into(),
                message: "M1 must be Hermitian".into(),
            });
        }
        if max_norm(&(&m2 - m2.transpose())) > STRUCTURE_TOL * scale {
            return Err(Error::Validation {
                path: "M2".into(),
                message: "M2 must be symmetric".into(),
            });
        }
        let ntilde1 = rows_to_matrix(&self.ntilde1, "Ntilde1")?;
        let ntilde2 = rows_to_matrix(&self.ntilde2, "Ntilde2")?;
        if ntilde1.shape() != ntilde2.shape() {
            return Err(Error::Validation {
                path: "Ntilde2".into(),
                message: format!(
                    "shape {:?} differs from Ntilde1 {:?}",
                    ntilde2.shape(),
                    ntilde1.shape()
                ),
            });
        }
        if ntilde1.ncols() != n {
            return Err(Error::Validation {
                path: "Ntilde1".into(),
                message: format!("expected n = {n} columns, got {}", ntilde1.ncols()),
            });
        }
        let channels = ntilde1.nrows();
        let mut ntilde = CMatrix::zeros(channels, 2 * n);
        ntilde.view_mut((0, 0), (channels, n)).copy_from(&ntilde1);
        ntilde.view_mut((0, n), (channels, n)).copy_from(&ntilde2);

        let e1 = rows_to_matrix(&self.e1, "E1")?;
        let e2 = rows_to_matrix(&self.e2, "E2")?;
        if e1.shape() != e2.shape() {
            return Err(Error::Validation {
                path: "E2".into(),
                message: format!("shape {:?} differs from E1 {:?}", e2.shape(), e1.shape()),
            });
        }
        if e1.ncols() != n {
            return Err(Error::Validation {
                path: "E1".into(),
                message: format!("expected n = {n} columns, got {}", e1.ncols()),
            });
        }
        let hamiltonian = DoubledMatrix::embed_blocks(&m1, &m2)?;
        let e = DoubledMatrix::embed_blocks(&e1, &e2)?;
        PlantSpec::new(hamiltonian, ntilde, e, self.gamma)
    }
}

/// Parses and validates a plant document from JSON text.
pub fn parse_plant(text: &str) -> Result<PlantSpec> {
    let doc: PlantDocument = serde_json::from_str(text)?;
    doc.into_plant()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m1x1(v: Complex64) -> CMatrix {
        CMatrix::from_element(1, 1, v)
    }

    #[test]
    fn structure_matrices_k1() {
        let s = make_structure(1).unwrap();
        assert_eq!(s.j[(0, 0)], c(1.0, 0.0));
        assert_eq!(s.j[(1, 1)], c(-1.0, 0.0));
        assert_eq!(s.sigma[(0, 1)], c(1.0, 0.0));
        assert_eq!(s.sigma[(1, 0)], c(1.0, 0.0));
        assert_eq!(s.sigma[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn structure_matrices_k2_and_involution() {
        let s = make_structure(2).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| s.j[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
        let s3 = make_structure(3).unwrap();
        assert!(max_norm(&(&s3.j * &s3.j - identity(6))) == 0.0);
        assert!(max_norm(&(&s3.sigma * &s3.sigma - identity(6))) == 0.0);
        // J Sigma = -Sigma J
        assert!(max_norm(&(&s3.j * &s3.sigma + &s3.sigma * &s3.j)) == 0.0);
    }

    #[test]
    fn structure_zero_k_rejected() {
        assert!(matches!(make_structure(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn validate_doubled_examples() {
        // OPA nominal Hamiltonian matrix
        let x = CMatrix::from_row_slice(2, 2, &[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let (ok, res) = validate_doubled(&x, 1e-12).unwrap();
        assert!(ok);
        assert_eq!(res, 0.0);

        let delta = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]);
        let (ok, res) = validate_doubled(&delta, 1e-12).unwrap();
        assert!(ok);
        assert_eq!(res, 0.0);

        let bad = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let (ok, res) = validate_doubled(&bad, 1e-12).unwrap();
        assert!(!ok);
        assert!((res - 1.0).abs() < 1e-15);
    }

    #[test]
    fn validate_doubled_odd_dimension() {
        let x = CMatrix::zeros(3, 3);
        assert!(matches!(validate_doubled(&x, 1e-12), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn embed_blocks_examples() {
        let d = DoubledMatrix::embed_blocks(&m1x1(c(-1.0, 0.0)), &m1x1(c(0.0, 0.0))).unwrap();
        assert_eq!(d.matrix()[(1, 1)], c(-1.0, 0.0));
        let d = DoubledMatrix::embed_blocks(&m1x1(c(1.0, 0.0)), &m1x1(c(0.0, 1.0))).unwrap();
        assert_eq!(d.matrix()[(1, 0)], c(0.0, -1.0));
        assert_eq!(d.matrix()[(1, 1)], c(1.0, 0.0));
        let (ok, res) = validate_doubled(d.matrix(), 0.0).unwrap();
        assert!(ok);
        assert_eq!(res, 0.0);
        let z = DoubledMatrix::embed_blocks(&m1x1(c(0.0, 0.0)), &m1x1(c(0.0, 0.0))).unwrap();
        assert_eq!(max_norm(z.matrix()), 0.0);
    }

    #[test]
    fn embed_blocks_shape_mismatch() {
        let a = CMatrix::zeros(1, 2);
        let b = CMatrix::zeros(2, 1);
        assert!(matches!(
            DoubledMatrix::embed_blocks(&a, &b),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn opa_plant_accepted() {
        let plant = PlantSpec::opa(2.1);
        assert_eq!(plant.n, 1);
        assert_eq!(plant.channels, 1);
        assert_eq!(plant.m, 1);
        assert!((plant.gamma - 2.0).abs() < 1e-15);
        assert!((plant.ntilde[(0, 0)].re - 2.1f64.sqrt()).abs() < 1e-15);
        plant.validate().unwrap();
    }

    #[test]
    fn parse_plant_roundtrip_and_errors() {
        let doc = PlantDocument::from_plant(&PlantSpec::opa(2.1));
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let plant = parse_plant(&text).unwrap();
        assert_eq!(plant.n, 1);
        assert!((plant.gamma - 2.0).abs() < 1e-15);

        // non-Hermitian M1
        let mut bad = doc.clone();
        bad.m1 = vec![vec![[0.0, 1.0]]];
        let err = bad.into_plant().unwrap_err();
        assert!(matches!(err, Error::Validation { ref path, .. } if path == "M1"), "{err}");

        // gamma = 0
        let mut bad = doc.clone();
        bad.gamma = 0.0;
        let err = bad.into_plant().unwrap_err();
        assert!(matches!(err, Error::Validation { ref path, .. } if path == "gamma"));

        // schema violation
        assert!(parse_plant("{\"n\": 1}").is_err());
    }

    #[test]
    fn delta_extreme_is_top_of_bound() {
        let d = random_admissible_delta(1, 2.0, 0, DeltaStrategy::Extreme).unwrap();
        assert!(max_norm(&(d.matrix() - identity(2).scale(2.0))) < 1e-14);
        let (lo, hi) = d.eig_range();
        assert!((lo - 2.0).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
    }

    #[test]
    fn delta_strategies_admissible() {
        for strategy in [DeltaStrategy::Extreme, DeltaStrategy::Interior, DeltaStrategy::Boundary] {
            for seed in 0..50 {
                for m in 1..=2 {
                    let d = random_admissible_delta(m, 2.0, seed, strategy).unwrap();
                    assert!(d.is_admissible(2.0, 1e-9), "{strategy:?} seed {seed}");
                    let (ok, res) = validate_doubled(d.matrix(), 1e-10).unwrap();
                    assert!(ok, "doubled residual {res:.2e}");
                }
            }
        }
    }

    #[test]
    fn example_perturbation_is_admissible() {
        // [[1, i], [-i, 1]] has eigenvalues {0, 2}: admissible at gamma = 2.
        let d = Delta::new(
            DoubledMatrix::embed_blocks(&m1x1(c(1.0, 0.0)), &m1x1(c(0.0, 1.0))).unwrap(),
        );
        assert!(d.is_admissible(2.0, 1e-12));
        let (lo, hi) = d.eig_range();
        assert!(lo.abs() < 1e-12);
        assert!((hi - 2.0).abs() < 1e-12);
        // but not at gamma = 4 (bound becomes 1)
        assert!(!d.is_admissible(4.0, 1e-12));
    }

    #[test]
    fn delta_deterministic_per_seed() {
        let a = random_admissible_delta(2, 1.5, 42, DeltaStrategy::Interior).unwrap();
        let b = random_admissible_delta(2, 1.5, 42, DeltaStrategy::Interior).unwrap();
        assert_eq!(max_norm(&(a.matrix() - b.matrix())), 0.0);
    }
}
