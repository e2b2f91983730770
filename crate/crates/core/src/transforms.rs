//! Symmetry reductions that strip a two-qubit state down to the moments that
//! matter for realizability: the four correlations and the coefficient `w33`.
//!
//! `T1` averages a state with its conjugation by the Hermitian involution
//! `E3 (x) F3`, killing every odd-order moment. `T2` averages with the
//! frame-adapted transpose, killing the two remaining unwanted coefficients
//! `w30` and `w03`. Their composition `reduce = T2 . T1` maps any density
//! operator to one whose only surviving frame coefficients are `w00`, the
//! four correlation blocks `w11, w21, w12, w22`, and `w33`, all unchanged
//! from the input.

use crate::linalg::{DensityOp, HermMat, Mat, C64};
use crate::observables::Setting;
use crate::Result;

/// Conjugation `u rho u^dagger`. The intended conjugators are unitary (here
/// always Hermitian involutions), for which this equals `u rho u^{-1}`.
pub fn ad(u: &Mat, rho: &Mat) -> Result<Mat> {
    u.mul(rho)?.mul(&u.adjoint())
}

/// Complex frame coefficients `c[mu][nu] = Tr[m (E_mu (x) F_nu)]`; real
/// whenever `m` is Hermitian.
pub fn expand_coeffs(m: &Mat, setting: &Setting) -> Result<[[C64; 4]; 4]> {
    let mut c = [[C64::new(0.0, 0.0); 4]; 4];
    for (mu, row) in c.iter_mut().enumerate() {
        for (nu, slot) in row.iter_mut().enumerate() {
            *slot = m.mul(&setting.basis(mu, nu)?)?.trace();
        }
    }
    Ok(c)
}

/// Reassembles `1/4 sum c[mu][nu] E_mu (x) F_nu`; inverse of
/// [`expand_coeffs`] because the scaled frame elements are orthonormal under
/// the trace inner product.
pub fn assemble_coeffs(c: &[[C64; 4]; 4], setting: &Setting) -> Result<Mat> {
    let mut m = Mat::zeros(4)?;
    for (mu, row) in c.iter().enumerate() {
        for (nu, v) in row.iter().enumerate() {
            if *v == C64::new(0.0, 0.0) {
                continue;
            }
            m = m.add(&setting.basis(mu, nu)?.scale(*v / C64::new(4.0, 0.0)))?;
        }
    }
    Ok(m)
}

/// First reduction: `T1(rho) = rho/2 + Ad_{E3 (x) F3}(rho)/2`. In the
/// coefficient picture this zeroes every `c[mu][nu]` with exactly one index
/// in `{1, 2}` and preserves the rest, so all first- and third-order moments
/// of the observable tuple vanish on the output.
pub fn t1(rho: &HermMat, setting: &Setting) -> Result<HermMat> {
    let u = setting.basis(3, 3)?;
    let conj = ad(&u, rho.mat())?;
    HermMat::new(rho.mat().add(&conj)?.scale(C64::new(0.5, 0.0)))
}

/// Frame-adapted transpose `rho^T = rho^{T_A} (x) rho^{T_B}`: each factor
/// maps `x0 I + x1 E1 + x2 E2 + x3 E3` to `x0 I + x1 E1 + x2 E2 - x3 E3`
/// (the transpose in the `E1` eigenbasis), so the tensor coefficient
/// `c[mu][nu]` flips sign iff exactly one of `mu`, `nu` equals 3. Implemented
/// in the coefficient picture; preserves the eigenvalue multiset.
pub fn partial_transpose(rho: &HermMat, setting: &Setting) -> Result<HermMat> {
    let mut c = expand_coeffs(rho.mat(), setting)?;
    for (mu, row) in c.iter_mut().enumerate() {
        for (nu, v) in row.iter_mut().enumerate() {
            if (mu == 3) ^ (nu == 3) {
                *v = -*v;
            }
        }
    }
    HermMat::new(assemble_coeffs(&c, setting)?)
}

/// Second reduction: `T2(rho) = rho/2 + rho^T/2`; zeroes the coefficients
/// `c[mu][3]` and `c[3][nu]` with `mu, nu != 3` and preserves all others.
pub fn t2(rho: &HermMat, setting: &Setting) -> Result<HermMat> {
    let tr = partial_transpose(rho, setting)?;
    HermMat::new(rho.mat().add(tr.mat())?.scale(C64::new(0.5, 0.0)))
}

/// Full reduction `T2 . T1`. Both steps are convex combinations of
/// density-preserving maps, so the output revalidates as a density operator;
/// the four correlations and `w33` survive unchanged while all single and
/// triple moments plus `w30`, `w03` vanish.
pub fn reduce(rho: &DensityOp, setting: &Setting) -> Result<DensityOp> {
    let step1 = t1(rho.herm(), setting)?;
    let step2 = t2(&step1, setting)?;
    DensityOp::new(step2.mat().clone())
}
