//! Dense complex matrices of dimension 2 and 4 plus a cyclic Jacobi
//! eigensolver for Hermitian matrices.
//!
//! The solver embeds a Hermitian `H = A + iB` into the real symmetric
//! `[[A, -B], [B, A]]`, diagonalizes that with cyclic Jacobi rotations, and
//! collapses the doubled spectrum. Everything here is sized for the 2x2 / 4x4
//! operators of the CHSH scenario; no general-purpose routines are attempted.

use crate::{tol, Error, Result};
use num_complex::Complex64;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Square complex matrix, row-major, dimension 2 or 4.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    dim: usize,
    data: Vec<C64>,
}

impl Mat {
    /// Zero matrix of dimension `dim` (2 or 4).
    pub fn zeros(dim: usize) -> Result<Mat> {
        if dim != 2 && dim != 4 {
            return Err(Error::BadDim(dim));
        }
        Ok(Mat {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        })
    }

    /// Identity matrix of dimension `dim` (2 or 4).
    pub fn identity(dim: usize) -> Result<Mat> {
        let mut m = Mat::zeros(dim)?;
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        Ok(m)
    }

    /// Builds a matrix from rows; all rows must have length `rows.len()`.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Mat> {
        let dim = rows.len();
        let mut m = Mat::zeros(dim)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        Ok(m)
    }

    /// Dimension of the matrix.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at row `i`, column `j`.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    /// Sets the entry at row `i`, column `j`.
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Mat) -> Result<Mat> {
        if self.dim != rhs.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let n = self.dim;
        let mut out = Mat::zeros(n)?;
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Entrywise sum.
    pub fn add(&self, rhs: &Mat) -> Result<Mat> {
        if self.dim != rhs.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o += *r;
        }
        Ok(out)
    }

    /// Entrywise difference.
    pub fn sub(&self, rhs: &Mat) -> Result<Mat> {
        if self.dim != rhs.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o -= *r;
        }
        Ok(out)
    }

    /// Scalar multiple.
    pub fn scale(&self, s: C64) -> Mat {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v *= s;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat {
        let n = self.dim;
        let mut out = Mat::zeros(n).expect("dim already validated");
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product; `out[(a.dim * k + i') ...]` follows the convention
    /// `out[a.dim-block (i, j)][entry (k, l)] = a[i][j] * b[k][l]`, i.e. the
    /// row index is `i * b.dim + k` and the column index is `j * b.dim + l`.
    pub fn tensor(&self, rhs: &Mat) -> Result<Mat> {
        let n = self.dim * rhs.dim;
        if n != 4 {
            return Err(Error::BadDim(n));
        }
        let mut out = Mat::zeros(n)?;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                for k in 0..rhs.dim {
                    for l in 0..rhs.dim {
                        out.set(i * rhs.dim + k, j * rhs.dim + l, a * rhs.get(k, l));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Max-norm of `self - rhs`; panics on dimension mismatch.
    pub fn max_abs_diff(&self, rhs: &Mat) -> f64 {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max norm of the anti-Hermitian part `(self - self^dagger) / 2`.
    pub fn herm_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let r = (self.get(i, j) - self.get(j, i).conj()).norm() / 2.0;
                worst = worst.max(r);
            }
        }
        worst
    }
}

/// Pauli matrix sigma_x.
pub fn sigma_x() -> Mat {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    Mat::from_rows(&[vec![o, one], vec![one, o]]).expect("static 2x2")
}

/// Pauli matrix sigma_y.
pub fn sigma_y() -> Mat {
    let o = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    Mat::from_rows(&[vec![o, -i], vec![i, o]]).expect("static 2x2")
}

/// Pauli matrix sigma_z.
pub fn sigma_z() -> Mat {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    Mat::from_rows(&[vec![one, o], vec![o, -one]]).expect("static 2x2")
}

/// `n . sigma` for a real 3-vector `n`.
pub fn bloch_dot_sigma(n: [f64; 3]) -> Mat {
    let mut m = sigma_x().scale(C64::new(n[0], 0.0));
    m = m
        .add(&sigma_y().scale(C64::new(n[1], 0.0)))
        .expect("static 2x2");
    m.add(&sigma_z().scale(C64::new(n[2], 0.0)))
        .expect("static 2x2")
}

/// Hermitian matrix; the constructor symmetrizes and rejects inputs whose
/// anti-Hermitian part exceeds [`tol::HERMITICITY_REJECT`].
#[derive(Clone, Debug, PartialEq)]
pub struct HermMat {
    mat: Mat,
}

impl HermMat {
    /// Validates and symmetrizes `(m + m^dagger) / 2`.
    pub fn new(m: Mat) -> Result<HermMat> {
        let residual = m.herm_residual();
        if !residual.is_finite() {
            return Err(Error::NonFinite);
        }
        if residual > tol::HERMITICITY_REJECT {
            return Err(Error::NotHermitian { residual });
        }
        let sym = m.add(&m.adjoint())?.scale(C64::new(0.5, 0.0));
        Ok(HermMat { mat: sym })
    }

    /// Underlying matrix.
    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.mat.dim
    }

    /// All eigenvalues, ascending. Cyclic Jacobi on the real symmetric
    /// embedding `[[A, -B], [B, A]]` of `H = A + iB`; the embedded spectrum
    /// holds every eigenvalue twice, so adjacent sorted pairs are averaged.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.mat.dim;
        let m = 2 * n;
        let mut a = vec![0.0f64; m * m];
        for i in 0..n {
            for j in 0..n {
                let v = self.mat.get(i, j);
                a[i * m + j] = v.re;
                a[i * m + (j + n)] = -v.im;
                a[(i + n) * m + j] = v.im;
                a[(i + n) * m + (j + n)] = v.re;
            }
        }
        jacobi_diagonalize(&mut a, m)?;
        let mut diag: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
        diag.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        Ok((0..n)
            .map(|i| (diag[2 * i] + diag[2 * i + 1]) / 2.0)
            .collect())
    }

    /// True when the minimum eigenvalue is at least `-slack`.
    pub fn is_psd(&self, slack: f64) -> Result<bool> {
        let eigs = self.eigenvalues()?;
        Ok(eigs[0] >= -slack)
    }
}

/// Eigenvalues of a real symmetric matrix (row-major, any small n), ascending.
pub fn real_sym_eigenvalues(m: &[f64], n: usize) -> Result<Vec<f64>> {
    assert_eq!(m.len(), n * n, "row-major n x n expected");
    let mut a = m.to_vec();
    jacobi_diagonalize(&mut a, n)?;
    let mut diag: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    diag.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(diag)
}

/// Cyclic Jacobi sweeps until the off-diagonal Frobenius norm drops below
/// [`tol::JACOBI_OFF_FRO`]. Errors with [`Error::NonConvergence`] after
/// [`tol::JACOBI_MAX_SWEEPS`] sweeps.
fn jacobi_diagonalize(a: &mut [f64], n: usize) -> Result<()> {
    for v in a.iter() {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
    }
    for _ in 0..tol::JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() < tol::JACOBI_OFF_FRO {
            return Ok(());
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                // Stable rotation: t = sgn(theta) / (|theta| + sqrt(theta^2 + 1)).
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(Error::NonConvergence)
}

/// Matrix exponential by scaling and squaring with a degree-12 Taylor core.
/// Accuracy is ample for the unitary-invariance checks in the test suites;
/// this is not a general-purpose expm.
pub fn expm(m: &Mat) -> Mat {
    let norm = m.max_abs() * m.dim as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.scale(C64::new(1.0 / f64::powi(2.0, squarings as i32), 0.0));
    // Horner evaluation of sum_{k<=12} X^k / k!.
    let id = Mat::identity(m.dim()).expect("dim already validated");
    let mut acc = id.clone();
    for k in (1..=12u32).rev() {
        acc = scaled
            .mul(&acc)
            .expect("same dim")
            .scale(C64::new(1.0 / k as f64, 0.0))
            .add(&id)
            .expect("same dim");
    }
    for _ in 0..squarings {
        acc = acc.mul(&acc).expect("same dim");
    }
    acc
}

/// Density operator: Hermitian, unit trace within 1e-12, minimum eigenvalue
/// at least -[`tol::PSD_SLACK`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOp {
    herm: HermMat,
}

impl DensityOp {
    /// Validates trace and positivity.
    pub fn new(m: Mat) -> Result<DensityOp> {
        let herm = HermMat::new(m)?;
        let trace_residual = (herm.mat().trace().re - 1.0).abs();
        let eigs = herm.eigenvalues()?;
        let min_eig = eigs[0];
        if trace_residual > 1e-12 || min_eig < -tol::PSD_SLACK {
            return Err(Error::NotDensity {
                trace_residual,
                min_eig,
            });
        }
        Ok(DensityOp { herm })
    }

    /// Underlying Hermitian matrix.
    pub fn herm(&self) -> &HermMat {
        &self.herm
    }

    /// Underlying raw matrix.
    pub fn mat(&self) -> &Mat {
        self.herm.mat()
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.herm.dim()
    }

    /// Real part of `Tr[rho * obs]`; the imaginary part vanishes whenever
    /// `obs` is Hermitian.
    pub fn expect(&self, obs: &Mat) -> Result<f64> {
        let prod = self.herm.mat().mul(obs)?;
        Ok(prod.trace().re)
    }
}
