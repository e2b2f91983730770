//! Qubit binary observables in Bloch form, measurement settings, and the
//! orthonormal operator frames attached to each party.
//!
//! An observable `A = a0 I + a . sigma` with `|a| > 0` has the two eigenvalues
//! `a0 +- |a|`. Its normalization `At = (A - a0 I) / |a| = ahat . sigma`
//! satisfies `At^2 = I`, so every statement about correlations of normalized
//! observables transfers to raw ones by affine rescaling.

use crate::linalg::{bloch_dot_sigma, Mat, C64};
use crate::{tol, Error, Result};
use serde::Serialize;

/// Dot product of real 3-vectors.
fn dot(u: [f64; 3], v: [f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// Cross product of real 3-vectors.
fn cross(u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

/// Euclidean norm of a real 3-vector.
fn norm3(u: [f64; 3]) -> f64 {
    dot(u, u).sqrt()
}

fn scale3(u: [f64; 3], s: f64) -> [f64; 3] {
    [u[0] * s, u[1] * s, u[2] * s]
}

/// Binary qubit observable `a0 I + a . sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochObservable {
    /// Identity coefficient (mean of the two eigenvalues).
    pub a0: f64,
    /// Bloch vector; must be nonzero so the observable is nondegenerate.
    pub a: [f64; 3],
}

impl BlochObservable {
    /// Validates finiteness and nondegeneracy.
    pub fn new(a0: f64, a: [f64; 3]) -> Result<BlochObservable> {
        if !a0.is_finite() || a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if norm3(a) == 0.0 {
            return Err(Error::ZeroBloch);
        }
        Ok(BlochObservable { a0, a })
    }

    /// Unit observable along a Bloch direction (`a0 = 0`, `|a| = 1`).
    pub fn unit(a: [f64; 3]) -> Result<BlochObservable> {
        let n = norm3(a);
        if n == 0.0 {
            return Err(Error::ZeroBloch);
        }
        BlochObservable::new(0.0, scale3(a, 1.0 / n))
    }

    /// Bloch vector norm.
    pub fn norm(&self) -> f64 {
        norm3(self.a)
    }

    /// Unit Bloch vector.
    pub fn unit_bloch(&self) -> [f64; 3] {
        scale3(self.a, 1.0 / self.norm())
    }

    /// Raw 2x2 matrix `a0 I + a . sigma`.
    pub fn matrix(&self) -> Mat {
        let id = Mat::identity(2).expect("static 2x2");
        id.scale(C64::new(self.a0, 0.0))
            .add(&bloch_dot_sigma(self.a))
            .expect("static 2x2")
    }

    /// Normalized matrix `ahat . sigma` (unit eigenvalues).
    pub fn normalized_matrix(&self) -> Mat {
        bloch_dot_sigma(self.unit_bloch())
    }
}

/// Parallelism classification of a setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// Both parties have non-parallel observable pairs.
    Generic,
    /// Party A's pair is (anti-)parallel, party B's is not.
    AParallel,
    /// Party B's pair is (anti-)parallel, party A's is not.
    BParallel,
    /// Both pairs are (anti-)parallel.
    BothParallel,
}

/// Orthonormal Hermitian frame `[I, E1, E2, E3]` spanned by one party's
/// observable pair: `E1 = ahat1 . sigma`, `E2 = (ahat2 - cos(angle) ahat1)
/// . sigma / sin(angle)`, `E3 = (ahat1 x ahat2) . sigma / sin(angle)`.
/// The triple `(E1, E2, E3)` is right-handed: `E2 = -i E3 E1`.
#[derive(Clone, Debug)]
pub struct Frame {
    ops: [Mat; 4],
}

impl Frame {
    /// Builds the frame from two unit Bloch vectors with `sin(angle) =
    /// |u1 x u2|` above the parallel threshold.
    fn from_units(u1: [f64; 3], u2: [f64; 3]) -> Result<Frame> {
        let cr = cross(u1, u2);
        let sin_angle = norm3(cr);
        if sin_angle < tol::PARALLEL_TOL {
            return Err(Error::DegenerateAngle);
        }
        let cos_angle = dot(u1, u2);
        let e2 = scale3(
            [
                u2[0] - cos_angle * u1[0],
                u2[1] - cos_angle * u1[1],
                u2[2] - cos_angle * u1[2],
            ],
            1.0 / sin_angle,
        );
        let e3 = scale3(cr, 1.0 / sin_angle);
        Ok(Frame {
            ops: [
                Mat::identity(2).expect("static 2x2"),
                bloch_dot_sigma(u1),
                bloch_dot_sigma(e2),
                bloch_dot_sigma(e3),
            ],
        })
    }

    /// Frame element `E_mu`, `mu` in 0..4.
    pub fn op(&self, mu: usize) -> &Mat {
        &self.ops[mu]
    }
}

/// A CHSH measurement setting: two observables per party plus the derived
/// angles, branch classification, and frames.
#[derive(Clone, Debug)]
pub struct Setting {
    /// Party A observables.
    pub a1: BlochObservable,
    /// Second party A observable.
    pub a2: BlochObservable,
    /// Party B observables.
    pub b1: BlochObservable,
    /// Second party B observable.
    pub b2: BlochObservable,
    /// Angle between the unit Bloch vectors of party A, in [0, pi].
    pub alpha: f64,
    /// Angle between the unit Bloch vectors of party B, in [0, pi].
    pub beta: f64,
    /// Parallelism classification at [`tol::PARALLEL_TOL`] on |sin angle|.
    pub branch: Branch,
    /// Sign relating the parallel pair on side A (`ahat2 = s_a ahat1`).
    pub s_a: Option<i8>,
    /// Sign relating the parallel pair on side B (`bhat2 = s_b bhat1`).
    pub s_b: Option<i8>,
    frame_e: Option<Frame>,
    frame_f: Option<Frame>,
    a_tilde: [Mat; 2],
    b_tilde: [Mat; 2],
}

impl Setting {
    /// Normalized observable `At_i` (`i` in {0, 1} for settings 1, 2).
    pub fn a_tilde(&self, i: usize) -> &Mat {
        &self.a_tilde[i]
    }

    /// Normalized observable `Bt_j` (`j` in {0, 1} for settings 1, 2).
    pub fn b_tilde(&self, j: usize) -> &Mat {
        &self.b_tilde[j]
    }

    /// Party A frame; errors when side A is parallel.
    pub fn frame_e(&self) -> Result<&Frame> {
        self.frame_e.as_ref().ok_or(Error::DegenerateAngle)
    }

    /// Party B frame; errors when side B is parallel.
    pub fn frame_f(&self) -> Result<&Frame> {
        self.frame_f.as_ref().ok_or(Error::DegenerateAngle)
    }

    /// Tensor basis element `E_mu (x) F_nu`; requires both frames.
    pub fn basis(&self, mu: usize, nu: usize) -> Result<Mat> {
        self.frame_e()?.op(mu).tensor(self.frame_f()?.op(nu))
    }
}

/// Classifies one party's pair and returns (angle, sign, frame).
fn classify_side(
    o1: &BlochObservable,
    o2: &BlochObservable,
) -> Result<(f64, Option<i8>, Option<Frame>)> {
    let u1 = o1.unit_bloch();
    let u2 = o2.unit_bloch();
    let c = dot(u1, u2);
    let s = norm3(cross(u1, u2));
    let angle = s.atan2(c);
    if s < tol::PARALLEL_TOL {
        let sign = if c >= 0.0 { 1 } else { -1 };
        return Ok((angle, Some(sign), None));
    }
    let frame = Frame::from_units(u1, u2)?;
    Ok((angle, None, Some(frame)))
}

/// Builds a [`Setting`] from four observables, classifying each side at
/// [`tol::PARALLEL_TOL`].
pub fn build_setting(
    a1: BlochObservable,
    a2: BlochObservable,
    b1: BlochObservable,
    b2: BlochObservable,
) -> Result<Setting> {
    let (alpha, s_a, frame_e) = classify_side(&a1, &a2)?;
    let (beta, s_b, frame_f) = classify_side(&b1, &b2)?;
    let branch = match (s_a.is_some(), s_b.is_some()) {
        (false, false) => Branch::Generic,
        (true, false) => Branch::AParallel,
        (false, true) => Branch::BParallel,
        (true, true) => Branch::BothParallel,
    };
    let a_tilde = [a1.normalized_matrix(), a2.normalized_matrix()];
    let b_tilde = [b1.normalized_matrix(), b2.normalized_matrix()];
    Ok(Setting {
        a1,
        a2,
        b1,
        b2,
        alpha,
        beta,
        branch,
        s_a,
        s_b,
        frame_e,
        frame_f,
        a_tilde,
        b_tilde,
    })
}

/// Canonical setting for given angles: `ahat1 = bhat1 = z`, `ahat2 = (sin
/// alpha, 0, cos alpha)`, `bhat2 = (sin beta, 0, cos beta)`, all unit
/// observables with zero offset. Angles must lie in [0, pi]; values within
/// [`tol::PARALLEL_TOL`] of the endpoints classify as parallel.
pub fn setting_from_angles(alpha: f64, beta: f64) -> Result<Setting> {
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::NonFinite);
    }
    if !(0.0..=std::f64::consts::PI).contains(&alpha) {
        return Err(Error::BadAngle(alpha));
    }
    if !(0.0..=std::f64::consts::PI).contains(&beta) {
        return Err(Error::BadAngle(beta));
    }
    let z = [0.0, 0.0, 1.0];
    let a2 = [alpha.sin(), 0.0, alpha.cos()];
    let b2 = [beta.sin(), 0.0, beta.cos()];
    build_setting(
        BlochObservable::unit(z)?,
        BlochObservable::unit(a2)?,
        BlochObservable::unit(z)?,
        BlochObservable::unit(b2)?,
    )
}

/// A unit Bloch vector orthogonal to `u`, by Gram-Schmidt against whichever
/// standard basis vector is less aligned with `u`.
pub(crate) fn orthogonal_unit(u: [f64; 3]) -> [f64; 3] {
    let seed = if u[0].abs() <= 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let p = dot(seed, u);
    let v = [seed[0] - p * u[0], seed[1] - p * u[1], seed[2] - p * u[2]];
    scale3(v, 1.0 / norm3(v))
}
