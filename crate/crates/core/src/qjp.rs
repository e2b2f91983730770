//! Discrete Kirkwood-Dirac characteristic vectors of the observable tuple
//! `X = (At1 (x) I, At2 (x) I, I (x) Bt1, I (x) Bt2)` and the reconstruction
//! of states from them.
//!
//! The characteristic vector collects the ordered-product moments
//! `phi_s = Tr[rho X1^s1 X2^s2 X3^s3 X4^s4]` over `s` in `{0,1}^4`. It is the
//! `Z_2^4` Fourier transform of the (generally complex) quasiprobability
//! `q(k)`, and pairs of commuting slots marginalize to genuine outcome
//! probabilities with outcomes `a = 1 - 2k`.

use crate::linalg::{DensityOp, HermMat, Mat, C64};
use crate::observables::Setting;
use crate::{tol, Error, Result};

/// Characteristic vector indexed by `s = s1*8 + s2*4 + s3*2 + s4`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharVec {
    /// Moments in index order.
    pub phi: [C64; 16],
}

/// Flat index of the exponent tuple `(s1, s2, s3, s4)`.
pub fn phi_index(s1: usize, s2: usize, s3: usize, s4: usize) -> usize {
    s1 * 8 + s2 * 4 + s3 * 2 + s4
}

impl CharVec {
    /// Moment at the exponent tuple.
    pub fn at(&self, s1: usize, s2: usize, s3: usize, s4: usize) -> C64 {
        self.phi[phi_index(s1, s2, s3, s4)]
    }

    /// Correlations of the normalized observables, in the frozen order.
    pub fn correlations(&self) -> [C64; 4] {
        [
            self.at(1, 0, 1, 0),
            self.at(0, 1, 1, 0),
            self.at(1, 0, 0, 1),
            self.at(0, 1, 0, 1),
        ]
    }
}

/// Computes the characteristic vector of `rho` for a Generic `setting`.
pub fn char_vec(rho: &DensityOp, setting: &Setting) -> Result<CharVec> {
    if setting.branch != crate::observables::Branch::Generic {
        return Err(Error::DegenerateAngle);
    }
    let id2 = Mat::identity(2)?;
    let x: [Mat; 4] = [
        setting.a_tilde(0).tensor(&id2)?,
        setting.a_tilde(1).tensor(&id2)?,
        id2.tensor(setting.b_tilde(0))?,
        id2.tensor(setting.b_tilde(1))?,
    ];
    let mut phi = [C64::new(0.0, 0.0); 16];
    for (idx, slot) in phi.iter_mut().enumerate() {
        let mut prod = Mat::identity(4)?;
        for (bit, xk) in x.iter().enumerate() {
            if idx >> (3 - bit) & 1 == 1 {
                prod = prod.mul(xk)?;
            }
        }
        *slot = rho.mat().mul(&prod)?.trace();
    }
    Ok(CharVec { phi })
}

/// Bloch coefficients `w[mu][nu] = Tr[rho E_mu (x) F_nu]` of the state behind
/// a characteristic vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WCoeffs {
    /// Coefficients indexed `[mu][nu]`.
    pub w: [[f64; 4]; 4],
}

/// Converts a characteristic vector into frame coefficients. Each formula
/// inverts the frame definitions `E2 = (At2 - cos(a) At1) / sin(a)`,
/// `E3 = (At1 At2 - cos(a) I) / (i sin(a))` and their B-side analogues, so
/// products over `s` reduce to linear combinations of `phi` entries. For a
/// Hermitian state every coefficient is real; an imaginary residual above
/// [`tol::IMAG_RESIDUAL`] signals an inconsistent vector and errors.
pub fn w_from_phi(phi: &CharVec, alpha: f64, beta: f64) -> Result<WCoeffs> {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    if sa.abs() < tol::PARALLEL_TOL || sb.abs() < tol::PARALLEL_TOL {
        return Err(Error::DegenerateAngle);
    }
    let p = |s1: usize, s2: usize, s3: usize, s4: usize| phi.at(s1, s2, s3, s4);
    let re = |v: f64| C64::new(v, 0.0);
    let isa = C64::new(0.0, sa);
    let isb = C64::new(0.0, sb);
    let isab = C64::new(0.0, sa * sb);
    let mut w = [[C64::new(0.0, 0.0); 4]; 4];
    w[0][0] = p(0, 0, 0, 0);
    w[1][0] = p(1, 0, 0, 0);
    w[2][0] = (p(0, 1, 0, 0) - p(1, 0, 0, 0) * re(ca)) / re(sa);
    w[3][0] = (p(1, 1, 0, 0) - p(0, 0, 0, 0) * re(ca)) / isa;
    w[0][1] = p(0, 0, 1, 0);
    w[1][1] = p(1, 0, 1, 0);
    w[2][1] = (p(0, 1, 1, 0) - p(1, 0, 1, 0) * re(ca)) / re(sa);
    w[3][1] = (p(1, 1, 1, 0) - p(0, 0, 1, 0) * re(ca)) / isa;
    w[0][2] = (p(0, 0, 0, 1) - p(0, 0, 1, 0) * re(cb)) / re(sb);
    w[1][2] = (p(1, 0, 0, 1) - p(1, 0, 1, 0) * re(cb)) / re(sb);
    w[2][2] = (p(0, 1, 0, 1) - p(1, 0, 0, 1) * re(ca) - p(0, 1, 1, 0) * re(cb)
        + p(1, 0, 1, 0) * re(ca * cb))
        / re(sa * sb);
    w[3][2] = (p(1, 1, 0, 1) - p(0, 0, 0, 1) * re(ca) - p(1, 1, 1, 0) * re(cb)
        + p(0, 0, 1, 0) * re(ca * cb))
        / isab;
    w[0][3] = (p(0, 0, 1, 1) - p(0, 0, 0, 0) * re(cb)) / isb;
    w[1][3] = (p(1, 0, 1, 1) - p(1, 0, 0, 0) * re(cb)) / isb;
    w[2][3] = (p(0, 1, 1, 1) - p(1, 0, 1, 1) * re(ca) - p(0, 1, 0, 0) * re(cb)
        + p(1, 0, 0, 0) * re(ca * cb))
        / isab;
    w[3][3] = (-p(1, 1, 1, 1) + p(0, 0, 1, 1) * re(ca) + p(1, 1, 0, 0) * re(cb)
        - p(0, 0, 0, 0) * re(ca * cb))
        / re(sa * sb);
    let mut out = [[0.0f64; 4]; 4];
    let mut imag = 0.0f64;
    for mu in 0..4 {
        for nu in 0..4 {
            imag = imag.max(w[mu][nu].im.abs());
            out[mu][nu] = w[mu][nu].re;
        }
    }
    if imag > tol::IMAG_RESIDUAL {
        return Err(Error::ResidualImag { residual: imag });
    }
    Ok(WCoeffs { w: out })
}

/// Reconstructs the operator `1/4 sum_{mu nu} w_{mu nu} E_mu (x) F_nu` from a
/// characteristic vector. Unit trace is not assumed: the output trace equals
/// `phi_0000`.
pub fn rho_from_phi(phi: &CharVec, setting: &Setting) -> Result<HermMat> {
    let w = w_from_phi(phi, setting.alpha, setting.beta)?;
    let mut rho = Mat::zeros(4)?;
    for mu in 0..4 {
        for nu in 0..4 {
            if w.w[mu][nu] == 0.0 {
                continue;
            }
            let basis = setting.basis(mu, nu)?;
            rho = rho.add(&basis.scale(C64::new(w.w[mu][nu] / 4.0, 0.0)))?;
        }
    }
    HermMat::new(rho)
}

/// Restricts a characteristic vector to the given slots (ascending subset of
/// `{1, 2, 3, 4}`): entries are `phi` at exponent tuples supported on the
/// kept slots, indexed by the kept bits in slot order (first kept slot is the
/// most significant bit).
pub fn marginal_phi(phi: &CharVec, keep: &[usize]) -> Result<Vec<C64>> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    for (pos, slot) in keep.iter().enumerate() {
        if !(1..=4).contains(slot) || (pos > 0 && keep[pos - 1] >= *slot) {
            return Err(Error::BadSlot(*slot));
        }
    }
    let k = keep.len();
    let mut out = Vec::with_capacity(1 << k);
    for idx in 0..1usize << k {
        let mut s = [0usize; 4];
        for (pos, slot) in keep.iter().enumerate() {
            s[slot - 1] = idx >> (k - 1 - pos) & 1;
        }
        out.push(phi.at(s[0], s[1], s[2], s[3]));
    }
    Ok(out)
}

/// Joint outcome probabilities of the commuting pair `(A_i, B_j)` (`i`, `j`
/// in {1, 2}): `p[k][l]` is the probability of outcomes `a = 1 - 2k`,
/// `b = 1 - 2l`, obtained by the inverse two-slot Fourier transform of the
/// pair marginal. Physical vectors give real tables; an imaginary residual
/// above [`tol::IMAG_RESIDUAL`] errors.
pub fn pair_probabilities(phi: &CharVec, i: usize, j: usize) -> Result<[[f64; 2]; 2]> {
    if !(1..=2).contains(&i) || !(1..=2).contains(&j) {
        return Err(Error::BadSlot(if (1..=2).contains(&i) { j } else { i }));
    }
    let red = marginal_phi(phi, &[i, j + 2])?;
    let mut p = [[0.0f64; 2]; 2];
    let mut imag = 0.0f64;
    for (k, row) in p.iter_mut().enumerate() {
        for (l, slot) in row.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for s in 0..2 {
                for t in 0..2 {
                    let sign = if (s * k + t * l) % 2 == 0 { 1.0 } else { -1.0 };
                    acc += red[s * 2 + t] * C64::new(sign, 0.0);
                }
            }
            acc /= C64::new(4.0, 0.0);
            imag = imag.max(acc.im.abs());
            *slot = acc.re;
        }
    }
    if imag > tol::IMAG_RESIDUAL {
        return Err(Error::ResidualImag { residual: imag });
    }
    Ok(p)
}

/// Forward `Z_2^4` transform: `phi(s) = sum_k (-1)^(s . k) q(k)`.
pub fn dft_forward(q: &[C64; 16]) -> [C64; 16] {
    let mut phi = [C64::new(0.0, 0.0); 16];
    for (s, slot) in phi.iter_mut().enumerate() {
        for (k, qv) in q.iter().enumerate() {
            let sign = if (s & k).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            *slot += qv * C64::new(sign, 0.0);
        }
    }
    phi
}

/// Inverse `Z_2^4` transform: `q(k) = (1/16) sum_s (-1)^(s . k) phi(s)`; the
/// quasiprobability behind a characteristic vector. Generally complex.
pub fn dft_inverse(phi: &[C64; 16]) -> [C64; 16] {
    let mut q = [C64::new(0.0, 0.0); 16];
    for (k, slot) in q.iter_mut().enumerate() {
        for (s, pv) in phi.iter().enumerate() {
            let sign = if (s & k).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            *slot += pv * C64::new(sign, 0.0);
        }
        *slot /= C64::new(16.0, 0.0);
    }
    q
}
