//! Dense complex linear-algebra kernel: eigenvalues, Hurwitz tests, linear
//! solves, Lyapunov and Riccati equations.
//!
//! Sizes in scope are small (2n <= 12), so Lyapunov-type equations go through
//! the Kronecker-product linear system and the Riccati through the stable
//! invariant subspace of its Hamiltonian matrix, polished by Newton steps.
//! Every solver verifies its own residual before returning.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{hermitian_part, max_norm, CMatrix};

/// Eigenvalues together with the spectral abscissa (max real part).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    pub abscissa: f64,
}

fn check_square_finite(x: &CMatrix) -> Result<()> {
    if x.nrows() != x.ncols() {
        return Err(Error::InvalidDimension(format!(
            "expected square matrix, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NumericFailure("non-finite entry".into()));
    }
    Ok(())
}

pub fn eigenvalues(x: &CMatrix) -> Result<Spectrum> {
    check_square_finite(x)?;
    let vals = x
        .clone()
        .eigenvalues()
        .ok_or_else(|| Error::NumericFailure("eigenvalue iteration did not converge".into()))?;
    let values: Vec<Complex64> = vals.iter().cloned().collect();
    let abscissa = values.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(Spectrum { values, abscissa })
}

/// Eigenvalues with right eigenvectors, via the complex Schur form and
/// triangular back-substitution. Each returned pair satisfies
/// `||X v - lambda v|| <= 1e-8 ||X||`.
pub fn eigen_pairs(x: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    check_square_finite(x)?;
    let n = x.nrows();
    let schur = nalgebra::linalg::Schur::try_new(x.clone(), 1e-14, 0)
        .ok_or_else(|| Error::NumericFailure("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let scale = max_norm(x).max(1e-300);
    let mut vecs = CMatrix::zeros(n, n);
    let lambdas: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    for k in 0..n {
        let lk = lambdas[k];
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * y[j];
            }
            let mut d = t[(i, i)] - lk;
            // Clustered eigenvalues make the shifted diagonal tiny; nudge it
            // to keep the substitution bounded (residual is checked below).
            if d.norm() < 1e-14 * scale {
                d = Complex64::new(1e-14 * scale, 0.0);
            }
            y[i] = -s / d;
        }
        let v = &q * DVector::from_vec(y);
        let norm = v.norm();
        vecs.set_column(k, &(v / Complex64::new(norm, 0.0)));
    }
    let residual = max_norm(&(x * &vecs - &vecs * CMatrix::from_diagonal(&DVector::from_vec(lambdas.clone()))));
    if residual > 1e-8 * scale {
        return Err(Error::NumericFailure(format!(
            "eigenvector residual {residual:.3e} exceeds 1e-8 * scale (near-defective matrix)"
        )));
    }
    Ok((lambdas, vecs))
}

/// True iff the spectral abscissa is below `-margin`.
pub fn is_hurwitz(x: &CMatrix, margin: f64) -> Result<(bool, f64)> {
    let spec = eigenvalues(x)?;
    Ok((spec.abscissa < -margin, spec.abscissa))
}

/// Eigenvalues of the explicitly symmetrized matrix `(X + X^dag)/2`,
/// ascending.
pub fn hermitian_eigenvalues(x: &CMatrix) -> Result<Vec<f64>> {
    check_square_finite(x)?;
    let h = hermitian_part(x);
    let mut eigs: Vec<f64> = nalgebra::linalg::SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .cloned()
        .collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(eigs)
}

pub fn min_eig_hermitian(x: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(x)?[0])
}

pub fn max_eig_hermitian(x: &CMatrix) -> Result<f64> {
    Ok(*hermitian_eigenvalues(x)?.last().unwrap())
}

/// Solves `A X = B` by LU with a pivot-based singularity guard.
pub fn solve_linear(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_square_finite(a)?;
    if a.nrows() != b.nrows() {
        return Err(Error::InvalidDimension(format!(
            "A is {}x{} but B has {} rows",
            a.nrows(),
            a.ncols(),
            b.nrows()
        )));
    }
    let n = a.nrows();
    let lu = a.clone().lu();
    let u = lu.u();
    let mut pmin = f64::INFINITY;
    let mut pmax: f64 = 0.0;
    for i in 0..n {
        let p = u[(i, i)].norm();
        pmin = pmin.min(p);
        pmax = pmax.max(p);
    }
    let scale = max_norm(a).max(1e-300);
    if pmin <= f64::EPSILON * scale * n as f64 {
        return Err(Error::Singular {
            cond: if pmin > 0.0 { pmax / pmin } else { f64::INFINITY },
        });
    }
    let x = lu
        .solve(b)
        .ok_or(Error::Singular { cond: f64::INFINITY })?;
    let residual = max_norm(&(a * &x - b));
    let bound = 1e-8 * scale * max_norm(&x).max(1.0);
    if residual > bound.max(1e-8 * max_norm(b)) {
        return Err(Error::NumericFailure(format!(
            "linear solve residual {residual:.3e} (ill-conditioned system)"
        )));
    }
    Ok(x)
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Solves the Sylvester-type equation `X A + A^dag X = C` through the
/// Kronecker-product system. No stability assumption; fails on singularity.
pub fn solve_sylvester_herm(a: &CMatrix, c_rhs: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    // vec(X A) = (A^T kron I) vec X, vec(A^dag X) = (I kron A^dag) vec X
    let id = CMatrix::identity(n, n);
    let big = kron(&a.transpose(), &id) + kron(&id, &a.adjoint());
    let rhs = CMatrix::from_iterator(n * n, 1, c_rhs.iter().cloned());
    let sol = solve_linear(&big, &rhs)?;
    Ok(CMatrix::from_iterator(n, n, sol.iter().cloned()))
}

/// Solves `A S + S A^dag + D = 0` for Hurwitz `A`, returning the Hermitian
/// steady covariance.
pub fn solve_lyapunov(a: &CMatrix, d: &CMatrix) -> Result<CMatrix> {
    check_square_finite(a)?;
    if d.shape() != a.shape() {
        return Err(Error::InvalidDimension(format!(
            "D must match A: {:?} vs {:?}",
            d.shape(),
            a.shape()
        )));
    }
    let (hurwitz, abscissa) = is_hurwitz(a, 0.0)?;
    if !hurwitz {
        return Err(Error::NoSolution(format!(
            "A is not Hurwitz (abscissa {abscissa:.3e})"
        )));
    }
    // A S + S A^dag = -D is X A^dag + A X = -D; reuse the Kronecker path on
    // the adjoint system: (X = S) satisfies S A^dag + (A^dag)^dag S = -D.
    let sol = solve_sylvester_herm(&a.adjoint(), &(-d))?;
    let sym = hermitian_part(&sol);
    let residual = max_norm(&(a * &sym + &sym * a.adjoint() + d));
    let scale = max_norm(a) * max_norm(&sym) + max_norm(d);
    if residual > 1e-8 * scale.max(1.0) {
        return Err(Error::NumericFailure(format!(
            "Lyapunov residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(sym)
}

fn riccati_residual(p: &CMatrix, ahat: &CMatrix, r: &CMatrix, q: &CMatrix) -> CMatrix {
    p * ahat + ahat.adjoint() * p + p * r * p + q
}

fn riccati_scale(p: &CMatrix, ahat: &CMatrix, r: &CMatrix, q: &CMatrix) -> f64 {
    let np = max_norm(p);
    (max_norm(ahat) * np + max_norm(r) * np * np + max_norm(q)).max(1.0)
}

/// Stabilizing solution of `P Ahat + Ahat^dag P + P R P + Q = 0` with
/// `R, Q >= 0` Hermitian, via the stable invariant subspace of
/// `[[Ahat, R], [-Q, -Ahat^dag]]`, refined by Newton (Kleinman) steps.
/// The closed loop `Ahat + R P` is Hurwitz on success.
pub fn solve_riccati(ahat: &CMatrix, r: &CMatrix, q: &CMatrix) -> Result<CMatrix> {
    check_square_finite(ahat)?;
    let n = ahat.nrows();
    if r.shape() != (n, n) || q.shape() != (n, n) {
        return Err(Error::InvalidDimension(
            "Ahat, R, Q must share one square shape".into(),
        ));
    }
    let mut ham = CMatrix::zeros(2 * n, 2 * n);
    ham.view_mut((0, 0), (n, n)).copy_from(ahat);
    ham.view_mut((0, n), (n, n)).copy_from(r);
    ham.view_mut((n, 0), (n, n)).copy_from(&(-q));
    ham.view_mut((n, n), (n, n)).copy_from(&(-ahat.adjoint()));

    let spec = eigenvalues(&ham)?;
    let scale = spec
        .values
        .iter()
        .map(|l| l.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    if spec.values.iter().any(|l| l.re.abs() <= 1e-9 * scale) {
        return Err(Error::RiccatiInfeasible(
            "Hamiltonian matrix has imaginary-axis eigenvalues".into(),
        ));
    }

    let (lambdas, vecs) = eigen_pairs(&ham)?;
    let stable: Vec<usize> = (0..2 * n).filter(|&i| lambdas[i].re < 0.0).collect();
    if stable.len() != n {
        return Err(Error::RiccatiInfeasible(format!(
            "expected {n} stable Hamiltonian eigenvalues, found {}",
            stable.len()
        )));
    }
    let mut x1 = CMatrix::zeros(n, n);
    let mut x2 = CMatrix::zeros(n, n);
    for (col, &i) in stable.iter().enumerate() {
        x1.set_column(col, &vecs.view((0, i), (n, 1)).column(0));
        x2.set_column(col, &vecs.view((n, i), (n, 1)).column(0));
    }
    // P X1 = X2  =>  X1^T P^T = X2^T
    let pt = match solve_linear(&x1.transpose(), &x2.transpose()) {
        Ok(pt) => pt,
        Err(Error::Singular { cond }) => {
            return Err(Error::NumericFailure(format!(
                "stable invariant subspace has no graph form (X1 condition {cond:.3e})"
            )))
        }
        Err(e) => return Err(e),
    };
    let mut p = hermitian_part(&pt.transpose());

    // Newton polish: linearize the residual at P and solve the resulting
    // Sylvester equation in the closed loop Ahat + R P.
    for _ in 0..8 {
        let res = riccati_residual(&p, ahat, r, q);
        let rel = max_norm(&res) / riccati_scale(&p, ahat, r, q);
        if rel < 1e-13 {
            break;
        }
        let acl = ahat + r * &p;
        match solve_sylvester_herm(&acl, &(-&res)) {
            Ok(dp) => {
                let cand = hermitian_part(&(&p + &dp));
                let better = max_norm(&riccati_residual(&cand, ahat, r, q))
                    < max_norm(&res) * 0.99;
                if better {
                    p = cand;
                } else {
                    break;
                }
            }
            Err(_) => break,
        }
    }

    let res = riccati_residual(&p, ahat, r, q);
    let scale = riccati_scale(&p, ahat, r, q);
    if max_norm(&res) > 1e-7 * scale {
        return Err(Error::NumericFailure(format!(
            "Riccati residual {:.3e} exceeds 1e-7 * scale {:.3e}",
            max_norm(&res),
            scale
        )));
    }
    let acl = ahat + r * &p;
    let (hurwitz, abscissa) = is_hurwitz(&acl, 0.0)?;
    if !hurwitz {
        return Err(Error::RiccatiInfeasible(format!(
            "closed loop not Hurwitz (abscissa {abscissa:.3e})"
        )));
    }
    Ok(p)
}
