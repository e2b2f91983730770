//! Feasibility of correlation vectors for fixed observables, plus the
//! explicit witness construction and its verification.
//!
//! Generic branch: `gamma` is realizable iff
//!
//! ```text
//! sqrt(gamma' F(alpha, beta) gamma) + sqrt(gamma' F(alpha, -beta) gamma) <= 2.
//! ```
//!
//! Parallel branches replace the test by its continuous extension: with
//! `Q = gamma_11^2 + gamma_21^2 - 2 cos(alpha) gamma_11 gamma_21`, a B-side
//! parallel pair (`bhat2 = s_b bhat1`) is realizable iff `sqrt(Q) <=
//! sin(alpha)` and `gamma_12 = s_b gamma_11`, `gamma_22 = s_b gamma_21`; the
//! A-side case mirrors this, and the doubly parallel case reduces to
//! `|gamma_11| <= 1` with all components locked to `gamma_11`.

use crate::linalg::{DensityOp, Mat, C64};
use crate::observables::{build_setting, orthogonal_unit, BlochObservable, Branch, Frame, Setting};
use crate::{tol, CorrVec, Error, Result};
use serde::{Serialize, Serializer};

/// Serializes an extended real: finite values as numbers, infinities as the
/// string `"inf"` (JSON has no infinity literal).
pub(crate) fn ser_ext_real<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    }
}

/// Symmetric 4x4 matrix of the feasibility quadratic form, acting on
/// correlation vectors in the frozen order `(g11, g21, g12, g22)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FMatrix {
    m: [[f64; 4]; 4],
}

impl FMatrix {
    /// Entry at row `i`, column `j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    /// Row-major copy of the entries.
    pub fn entries(&self) -> [[f64; 4]; 4] {
        self.m
    }
}

/// The form matrix
///
/// ```text
///                       1      [    1       -cos a   -cos b   cos(a+b) ]
/// F(a, b) = ----------------- *[ -cos a       1      cos(a-b)  -cos b  ]
///           sin^2(a) sin^2(b)  [ -cos b    cos(a-b)     1      -cos a  ]
///                              [ cos(a+b)   -cos b   -cos a       1    ]
/// ```
///
/// evaluated literally at the given (possibly signed) angles. Errors when
/// either sine is below the parallel-classification threshold (the prefactor
/// would be astronomically ill-conditioned there and the parallel branches
/// own those inputs) or an input is non-finite.
pub fn f_matrix(alpha: f64, beta: f64) -> Result<FMatrix> {
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::NonFinite);
    }
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    if sa.abs() < tol::PARALLEL_TOL || sb.abs() < tol::PARALLEL_TOL {
        return Err(Error::DegenerateAngle);
    }
    let k = 1.0 / (sa * sa * sb * sb);
    let cpb = (alpha + beta).cos();
    let cmb = (alpha - beta).cos();
    let raw = [
        [1.0, -ca, -cb, cpb],
        [-ca, 1.0, cmb, -cb],
        [-cb, cmb, 1.0, -ca],
        [cpb, -cb, -ca, 1.0],
    ];
    let m = raw.map(|row| row.map(|v| v * k));
    Ok(FMatrix { m })
}

/// Evaluates `gamma' F gamma`. The form is a sum of two squared linear
/// functionals, hence nonnegative; any negative result is floating-point
/// round-off and is clamped to zero so downstream square roots stay real.
///
/// The accumulation is grouped by the repeated entries of the form matrix
/// (every [`f_matrix`] output has four equal diagonal entries and pairwise
/// equal off-diagonals): the correlation monomials that share a coefficient
/// are summed first, so their cancellations happen exactly. Row-by-row
/// accumulation instead mixes unit-sized and round-off-sized terms and loses
/// about eight digits precisely at the boundary points where a form vanishes
/// (the square root then turns a 1e-16 residue into 1e-8).
pub fn quad_form(f: &FMatrix, gamma: CorrVec) -> f64 {
    let [g0, g1, g2, g3] = gamma;
    let s = g0 * g0 + g1 * g1 + g2 * g2 + g3 * g3;
    let u = g0 * g1 + g2 * g3;
    let v = g0 * g2 + g1 * g3;
    let q = f.m[0][0] * s
        + 2.0 * (f.m[0][1] * u + f.m[0][2] * v + f.m[0][3] * (g0 * g3) + f.m[1][2] * (g1 * g2));
    q.max(0.0)
}

/// The pair `F(alpha, beta)`, `F(alpha, -beta)` that drives the generic test.
#[derive(Clone, Debug)]
pub struct FPair {
    plus: FMatrix,
    minus: FMatrix,
}

/// Monomial basis used by [`FPair::quad_coeffs`]: the four squares followed
/// by the six ordered cross products of the correlation components.
pub const QUAD_MONOMIALS: [(usize, usize); 10] = [
    (0, 0),
    (1, 1),
    (2, 2),
    (3, 3),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 2),
    (1, 3),
    (2, 3),
];

/// Evaluates the monomial basis at `gamma`.
pub fn quad_monomials(gamma: CorrVec) -> [f64; 10] {
    let mut out = [0.0; 10];
    for (k, (i, j)) in QUAD_MONOMIALS.iter().enumerate() {
        out[k] = gamma[*i] * gamma[*j];
    }
    out
}

impl FPair {
    /// Builds both form matrices for `alpha`, `beta` in (0, pi).
    pub fn new(alpha: f64, beta: f64) -> Result<FPair> {
        Ok(FPair {
            plus: f_matrix(alpha, beta)?,
            minus: f_matrix(alpha, -beta)?,
        })
    }

    /// Form matrix at `+beta`.
    pub fn plus(&self) -> &FMatrix {
        &self.plus
    }

    /// Form matrix at `-beta`.
    pub fn minus(&self) -> &FMatrix {
        &self.minus
    }

    /// `(sqrt(gamma' F+ gamma), sqrt(gamma' F- gamma))`.
    pub fn terms(&self, gamma: CorrVec) -> (f64, f64) {
        (
            quad_form(&self.plus, gamma).sqrt(),
            quad_form(&self.minus, gamma).sqrt(),
        )
    }

    /// Left-hand side of the feasibility test.
    pub fn lhs(&self, gamma: CorrVec) -> f64 {
        let (p, m) = self.terms(gamma);
        p + m
    }

    /// Feasibility at slack [`tol::FEASIBILITY_SLACK`].
    pub fn feasible(&self, gamma: CorrVec) -> bool {
        self.lhs(gamma) <= 2.0 + tol::FEASIBILITY_SLACK
    }

    /// Coefficients of both quadratic forms over [`QUAD_MONOMIALS`] (cross
    /// terms already doubled), for grid scans that share monomial tables.
    pub fn quad_coeffs(&self) -> ([f64; 10], [f64; 10]) {
        let expand = |f: &FMatrix| {
            let mut c = [0.0; 10];
            for (k, (i, j)) in QUAD_MONOMIALS.iter().enumerate() {
                c[k] = if i == j {
                    f.m[*i][*j]
                } else {
                    2.0 * f.m[*i][*j]
                };
            }
            c
        };
        (expand(&self.plus), expand(&self.minus))
    }
}

/// One named residual of a constraint check.
#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    /// Constraint identifier.
    pub name: String,
    /// Absolute violation.
    pub value: f64,
}

/// Outcome of the feasibility decision.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    /// Realizable at slack [`tol::FEASIBILITY_SLACK`].
    pub feasible: bool,
    /// Branch the decision ran in.
    pub branch: Branch,
    /// Extended-real left-hand side; finite iff all equality constraints of
    /// the active branch hold.
    #[serde(serialize_with = "ser_ext_real")]
    pub lhs: f64,
    /// First summand `sqrt(gamma' F(alpha, beta) gamma)` or its branch limit.
    #[serde(serialize_with = "ser_ext_real")]
    pub term_plus: f64,
    /// Second summand `sqrt(gamma' F(alpha, -beta) gamma)` or its branch limit.
    #[serde(serialize_with = "ser_ext_real")]
    pub term_minus: f64,
    /// Feasible range `[lo, hi]` of the free coefficient `w33`; present iff
    /// feasible.
    pub w33_interval: Option<(f64, f64)>,
    /// Equality-constraint residuals checked by the active branch.
    pub residuals: Vec<Residual>,
}

fn infeasible_verdict(branch: Branch, residuals: Vec<Residual>) -> Verdict {
    Verdict {
        feasible: false,
        branch,
        lhs: f64::INFINITY,
        term_plus: f64::INFINITY,
        term_minus: f64::INFINITY,
        w33_interval: None,
        residuals,
    }
}

fn verdict_from_terms(branch: Branch, tp: f64, tm: f64, residuals: Vec<Residual>) -> Verdict {
    let lhs = tp + tm;
    let feasible = lhs <= 2.0 + tol::FEASIBILITY_SLACK;
    Verdict {
        feasible,
        branch,
        lhs,
        term_plus: tp,
        term_minus: tm,
        w33_interval: if feasible {
            Some((-1.0 + tp, 1.0 - tm))
        } else {
            None
        },
        residuals,
    }
}

/// `Q = g1^2 + g2^2 - 2 cos(angle) g1 g2`, the parallel-branch form.
fn parallel_q(g1: f64, g2: f64, angle: f64) -> f64 {
    (g1 * g1 + g2 * g2 - 2.0 * angle.cos() * g1 * g2).max(0.0)
}

/// Decides realizability of `gamma` for the observables of `setting`.
pub fn decide(setting: &Setting, gamma: CorrVec) -> Verdict {
    let [g11, g21, g12, g22] = gamma;
    match setting.branch {
        Branch::Generic => {
            let pair = FPair::new(setting.alpha, setting.beta)
                .expect("generic branch guarantees non-degenerate angles");
            let (tp, tm) = pair.terms(gamma);
            verdict_from_terms(Branch::Generic, tp, tm, Vec::new())
        }
        Branch::BParallel => {
            let sb = f64::from(setting.s_b.expect("branch carries the sign"));
            let residuals = vec![
                Residual {
                    name: "kernel_g12".into(),
                    value: (g12 - sb * g11).abs(),
                },
                Residual {
                    name: "kernel_g22".into(),
                    value: (g22 - sb * g21).abs(),
                },
            ];
            if residuals.iter().any(|r| r.value > tol::FEASIBILITY_SLACK) {
                return infeasible_verdict(Branch::BParallel, residuals);
            }
            let t = (parallel_q(g11, g21, setting.alpha)).sqrt() / setting.alpha.sin();
            verdict_from_terms(Branch::BParallel, t, t, residuals)
        }
        Branch::AParallel => {
            let sa = f64::from(setting.s_a.expect("branch carries the sign"));
            let residuals = vec![
                Residual {
                    name: "kernel_g21".into(),
                    value: (g21 - sa * g11).abs(),
                },
                Residual {
                    name: "kernel_g22".into(),
                    value: (g22 - sa * g12).abs(),
                },
            ];
            if residuals.iter().any(|r| r.value > tol::FEASIBILITY_SLACK) {
                return infeasible_verdict(Branch::AParallel, residuals);
            }
            let t = (parallel_q(g11, g12, setting.beta)).sqrt() / setting.beta.sin();
            verdict_from_terms(Branch::AParallel, t, t, residuals)
        }
        Branch::BothParallel => {
            let sa = f64::from(setting.s_a.expect("branch carries the sign"));
            let sb = f64::from(setting.s_b.expect("branch carries the sign"));
            let residuals = vec![
                Residual {
                    name: "kernel_g21".into(),
                    value: (g21 - sa * g11).abs(),
                },
                Residual {
                    name: "kernel_g12".into(),
                    value: (g12 - sb * g11).abs(),
                },
                Residual {
                    name: "kernel_g22".into(),
                    value: (g22 - sa * sb * g11).abs(),
                },
            ];
            if residuals.iter().any(|r| r.value > tol::FEASIBILITY_SLACK) {
                return infeasible_verdict(Branch::BothParallel, residuals);
            }
            let t = g11.abs();
            verdict_from_terms(Branch::BothParallel, t, t, residuals)
        }
    }
}

/// Decision for the canonical setting at the given angles; see
/// [`crate::observables::setting_from_angles`].
pub fn decide_at_angles(alpha: f64, beta: f64, gamma: CorrVec) -> Result<Verdict> {
    let setting = crate::observables::setting_from_angles(alpha, beta)?;
    Ok(decide(&setting, gamma))
}

/// Generic-branch left-hand side at `(alpha, beta_small)` for correlations
/// that already satisfy the B-parallel kernel constraints `g12 = g11` and
/// `g22 = g21`. As `beta_small` shrinks toward zero this value converges to
/// the parallel-branch criterion `2 sqrt(g11^2 + g21^2 - 2 cos(alpha)
/// g11 g21) / sin(alpha)`, which is what the convergence checks compare it
/// against. Errors when `gamma` violates the kernel constraints or either
/// angle degenerates out of the generic branch.
pub fn decide_continuity_probe(alpha: f64, gamma: CorrVec, beta_small: f64) -> Result<f64> {
    let [g11, g21, g12, g22] = gamma;
    let residual = (g12 - g11).abs().max((g22 - g21).abs());
    if residual > tol::FEASIBILITY_SLACK {
        return Err(Error::NotInKernel { residual });
    }
    let verdict = decide_at_angles(alpha, beta_small, gamma)?;
    if verdict.branch != Branch::Generic {
        return Err(Error::DegenerateAngle);
    }
    Ok(verdict.lhs)
}

/// Choice of the free `w33` coefficient inside its feasible interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum W33Choice {
    /// Interval midpoint (default; maximizes the distance to both PSD walls).
    Midpoint,
    /// Lower endpoint.
    Lo,
    /// Upper endpoint.
    Hi,
    /// Explicit value; must lie inside the interval up to 1e-12.
    Value(f64),
}

/// Builds the witness density operator for a feasible `gamma`.
///
/// Generic branch: in the tensor frame `E_mu (x) F_nu` the state has Bloch
/// coefficients
///
/// ```text
/// w00 = 1
/// w11 = g11
/// w21 = (g21 - g11 cos a) / sin a
/// w12 = (g12 - g11 cos b) / sin b
/// w22 = (g22 - g12 cos a - g21 cos b + g11 cos a cos b) / (sin a sin b)
/// w33 in [-1 + sqrt(q+), 1 - sqrt(q-)]
/// ```
///
/// and all remaining coefficients zero, which pins every single-party
/// marginal to zero. Parallel branches re-run the generic construction with
/// the degenerate partner replaced by an auxiliary orthogonal observable and
/// the corresponding correlations zeroed; the resulting state reproduces the
/// original correlations because the kernel constraints lock them to the
/// retained components.
pub fn witness(setting: &Setting, gamma: CorrVec, choice: W33Choice) -> Result<DensityOp> {
    let verdict = decide(setting, gamma);
    if !verdict.feasible {
        return Err(Error::Infeasible);
    }
    let [g11, g21, g12, _] = gamma;
    match setting.branch {
        Branch::Generic => witness_generic(
            setting.frame_e()?,
            setting.frame_f()?,
            setting.alpha,
            setting.beta,
            gamma,
            choice,
        ),
        Branch::BParallel => {
            let aux = aux_setting_b(setting)?;
            witness_generic(
                aux.frame_e()?,
                aux.frame_f()?,
                aux.alpha,
                aux.beta,
                [g11, g21, 0.0, 0.0],
                choice,
            )
        }
        Branch::AParallel => {
            let aux = aux_setting_a(setting)?;
            witness_generic(
                aux.frame_e()?,
                aux.frame_f()?,
                aux.alpha,
                aux.beta,
                [g11, 0.0, g12, 0.0],
                choice,
            )
        }
        Branch::BothParallel => {
            let aux = aux_setting_both(setting)?;
            witness_generic(
                aux.frame_e()?,
                aux.frame_f()?,
                aux.alpha,
                aux.beta,
                [g11, 0.0, 0.0, 0.0],
                choice,
            )
        }
    }
}

/// Replaces B's degenerate partner by a unit observable orthogonal to `bhat1`.
fn aux_setting_b(setting: &Setting) -> Result<Setting> {
    let b1u = setting.b1.unit_bloch();
    build_setting(
        BlochObservable::unit(setting.a1.unit_bloch())?,
        BlochObservable::unit(setting.a2.unit_bloch())?,
        BlochObservable::unit(b1u)?,
        BlochObservable::unit(orthogonal_unit(b1u))?,
    )
}

/// Replaces A's degenerate partner by a unit observable orthogonal to `ahat1`.
fn aux_setting_a(setting: &Setting) -> Result<Setting> {
    let a1u = setting.a1.unit_bloch();
    build_setting(
        BlochObservable::unit(a1u)?,
        BlochObservable::unit(orthogonal_unit(a1u))?,
        BlochObservable::unit(setting.b1.unit_bloch())?,
        BlochObservable::unit(setting.b2.unit_bloch())?,
    )
}

/// Replaces both degenerate partners by orthogonal unit observables.
fn aux_setting_both(setting: &Setting) -> Result<Setting> {
    let a1u = setting.a1.unit_bloch();
    let b1u = setting.b1.unit_bloch();
    build_setting(
        BlochObservable::unit(a1u)?,
        BlochObservable::unit(orthogonal_unit(a1u))?,
        BlochObservable::unit(b1u)?,
        BlochObservable::unit(orthogonal_unit(b1u))?,
    )
}

fn witness_generic(
    fe: &Frame,
    ff: &Frame,
    alpha: f64,
    beta: f64,
    gamma: CorrVec,
    choice: W33Choice,
) -> Result<DensityOp> {
    let pair = FPair::new(alpha, beta)?;
    let (tp, tm) = pair.terms(gamma);
    if tp + tm > 2.0 + tol::FEASIBILITY_SLACK {
        return Err(Error::Infeasible);
    }
    let (lo, hi) = (-1.0 + tp, 1.0 - tm);
    let w33 = match choice {
        W33Choice::Midpoint => (lo + hi) / 2.0,
        W33Choice::Lo => lo,
        W33Choice::Hi => hi,
        W33Choice::Value(v) => {
            if v < lo - tol::FEASIBILITY_SLACK || v > hi + tol::FEASIBILITY_SLACK {
                return Err(Error::W33OutOfInterval { value: v, lo, hi });
            }
            // Round-off can invert the interval by ~1e-16 exactly on the
            // boundary; order the ends before clamping.
            v.clamp(lo.min(hi), hi.max(lo))
        }
    };
    let [g11, g21, g12, g22] = gamma;
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let w11 = g11;
    let w21 = (g21 - g11 * ca) / sa;
    let w12 = (g12 - g11 * cb) / sb;
    let w22 = (g22 - g12 * ca - g21 * cb + g11 * ca * cb) / (sa * sb);
    let terms: [(usize, usize, f64); 6] = [
        (0, 0, 1.0),
        (1, 1, w11),
        (2, 1, w21),
        (1, 2, w12),
        (2, 2, w22),
        (3, 3, w33),
    ];
    let mut rho = Mat::zeros(4)?;
    for (mu, nu, w) in terms {
        let basis = fe.op(mu).tensor(ff.op(nu))?;
        rho = rho.add(&basis.scale(C64::new(w / 4.0, 0.0)))?;
    }
    DensityOp::new(rho)
}

/// Residual report of a witness against its target correlations.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    /// Max absolute error over the four correlations.
    pub corr_residual: f64,
    /// `|Tr rho - 1|`.
    pub trace_residual: f64,
    /// Minimum eigenvalue (Jacobi).
    pub min_eig: f64,
    /// Max absolute single-party expectation of the normalized observables.
    pub marginal_residual: f64,
    /// Max imaginary part encountered in the should-be-real expectations.
    pub imag_residual: f64,
}

/// Checks a density operator against the target correlations of `setting`.
pub fn verify_witness(setting: &Setting, gamma: CorrVec, rho: &DensityOp) -> Result<WitnessReport> {
    let id = Mat::identity(2)?;
    let mut corr_residual = 0.0f64;
    let mut imag_residual = 0.0f64;
    for (idx, (i, j)) in [(0, 0), (1, 0), (0, 1), (1, 1)].iter().enumerate() {
        let obs = setting.a_tilde(*i).tensor(setting.b_tilde(*j))?;
        let val = rho.mat().mul(&obs)?.trace();
        corr_residual = corr_residual.max((val.re - gamma[idx]).abs());
        imag_residual = imag_residual.max(val.im.abs());
    }
    let mut marginal_residual = 0.0f64;
    for i in 0..2 {
        let val = rho.mat().mul(&setting.a_tilde(i).tensor(&id)?)?.trace();
        marginal_residual = marginal_residual.max(val.re.abs());
        imag_residual = imag_residual.max(val.im.abs());
        let val = rho.mat().mul(&id.tensor(setting.b_tilde(i))?)?.trace();
        marginal_residual = marginal_residual.max(val.re.abs());
        imag_residual = imag_residual.max(val.im.abs());
    }
    let eigs = rho.herm().eigenvalues()?;
    Ok(WitnessReport {
        corr_residual,
        trace_residual: (rho.mat().trace().re - 1.0).abs(),
        min_eig: eigs[0],
        marginal_residual,
        imag_residual,
    })
}

/// Closed-form spectrum of the generic witness: `(1 + w33 +- sqrt(q+)) / 4`
/// and `(1 - w33 +- sqrt(q-)) / 4`, ascending.
pub fn witness_eigenvalues_analytic(q_plus: f64, q_minus: f64, w33: f64) -> [f64; 4] {
    let sp = q_plus.max(0.0).sqrt();
    let sm = q_minus.max(0.0).sqrt();
    let mut eigs = [
        (1.0 + w33 + sp) / 4.0,
        (1.0 + w33 - sp) / 4.0,
        (1.0 - w33 + sm) / 4.0,
        (1.0 - w33 - sm) / 4.0,
    ];
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eigs
}
