//! Correlation inequality families for the (2, 2, 2) scenario: CHSH and the
//! Tsirel'son bound, three equivalent forms of the Tsirel'son-Landau quantum
//! boundary, a Gram-matrix feasibility oracle, Bell's original three-term
//! inequality, and the probability-form CHSH criterion.
//!
//! All functions take correlations `C` of +-1-valued observables in the
//! frozen component order `(C11, C21, C12, C22)`.

use crate::linalg::{real_sym_eigenvalues, HermMat, Mat, C64};
use crate::{tol, CorrVec, Error, Result};
use serde::Serialize;

/// Validates cube membership with a small grace for round-off and returns
/// the clamped vector.
fn clamp_cube(c: CorrVec) -> Result<CorrVec> {
    let mut out = c;
    for v in out.iter_mut() {
        if !v.is_finite() || v.abs() > 1.0 + tol::ALGEBRAIC {
            return Err(Error::OutOfCube { value: *v });
        }
        *v = v.clamp(-1.0, 1.0);
    }
    Ok(out)
}

/// Largest CHSH combination `max_kl |sum_ij C_ij - 2 C_kl|`.
pub fn chsh_max(c: CorrVec) -> f64 {
    let total: f64 = c.iter().sum();
    c.iter()
        .map(|v| (total - 2.0 * v).abs())
        .fold(0.0, f64::max)
}

/// Local bound: every CHSH combination is at most 2.
pub fn chsh_local(c: CorrVec) -> bool {
    chsh_max(c) <= 2.0 + tol::ALGEBRAIC
}

/// Quantum bound: every CHSH combination is at most `2 sqrt(2)`.
pub fn tsirelson(c: CorrVec) -> bool {
    chsh_max(c) <= 2.0 * std::f64::consts::SQRT_2 + tol::ALGEBRAIC
}

/// Tsirel'son-Landau boundary, algebraic form:
///
/// ```text
/// |C11 C12 - C21 C22| <= sqrt((1 - C11^2)(1 - C12^2))
///                      + sqrt((1 - C21^2)(1 - C22^2)).
/// ```
pub fn tl_algebraic(c: CorrVec) -> Result<bool> {
    let [c11, c21, c12, c22] = clamp_cube(c)?;
    let lhs = (c11 * c12 - c21 * c22).abs();
    let rhs = ((1.0 - c11 * c11) * (1.0 - c12 * c12)).max(0.0).sqrt()
        + ((1.0 - c21 * c21) * (1.0 - c22 * c22)).max(0.0).sqrt();
    Ok(lhs <= rhs + tol::ALGEBRAIC)
}

/// Signed margin of the arcsin form: `pi - max_kl |sum_ij asin C_ij -
/// 2 asin C_kl|`. Positive inside the quantum set, negative outside.
pub fn tl_arcsin_margin(c: CorrVec) -> Result<f64> {
    let c = clamp_cube(c)?;
    let asins = c.map(f64::asin);
    let total: f64 = asins.iter().sum();
    let worst = asins
        .iter()
        .map(|v| (total - 2.0 * v).abs())
        .fold(0.0, f64::max);
    Ok(std::f64::consts::PI - worst)
}

/// Tsirel'son-Landau boundary, arcsin form: all arcsin combinations within
/// `pi`.
pub fn tl_arcsin(c: CorrVec) -> Result<bool> {
    Ok(tl_arcsin_margin(c)? >= -tol::ALGEBRAIC)
}

/// Tsirel'son-Landau boundary, polynomial form. Membership holds iff one of
/// two polynomial systems holds:
///
/// ```text
/// (1)  0 <= (C12 C21 - C11 C22)(C11 C12 - C21 C22)(C11 C21 - C12 C22)
///        <= (sum C^2)^2 / 4 - (sum C^4) / 2 - 2 prod C
/// (2)  0 <= 2 max C^4 - (max C^2)(sum C^2) + 2 prod C
/// ```
pub fn tl_thm22(c: CorrVec) -> Result<bool> {
    let [c11, c21, c12, c22] = clamp_cube(c)?;
    let p = (c12 * c21 - c11 * c22) * (c11 * c12 - c21 * c22) * (c11 * c21 - c12 * c22);
    let s2: f64 = [c11, c21, c12, c22].iter().map(|v| v * v).sum();
    let s4: f64 = [c11, c21, c12, c22].iter().map(|v| v.powi(4)).sum();
    let prod = c11 * c21 * c12 * c22;
    let upper = s2 * s2 / 4.0 - s4 / 2.0 - 2.0 * prod;
    let ineq1 = p >= -tol::ALGEBRAIC && p <= upper + tol::ALGEBRAIC;
    let m2 = [c11, c21, c12, c22]
        .iter()
        .map(|v| v * v)
        .fold(0.0, f64::max);
    let ineq2 = 2.0 * m2 * m2 - m2 * s2 + 2.0 * prod >= -tol::ALGEBRAIC;
    Ok(ineq1 || ineq2)
}

/// Gram matrix of the four unit vectors `(A1, A2, B1, B2)` with the unknown
/// same-party overlaps `x`, `y` in the off-blocks.
fn gram(c: CorrVec, x: f64, y: f64) -> [f64; 16] {
    let [c11, c21, c12, c22] = c;
    [
        1.0, x, c11, c12, //
        x, 1.0, c21, c22, //
        c11, c21, 1.0, y, //
        c12, c22, y, 1.0,
    ]
}

/// Cholesky success on `m + slack I` proves the minimum eigenvalue of `m`
/// is at least `-slack`; failure proves nothing (two-sided checks go through
/// the Jacobi path).
fn cholesky_psd(m: &[f64; 16], slack: f64) -> bool {
    let mut a = *m;
    for i in 0..4 {
        a[i * 4 + i] += slack;
    }
    let mut l = [0.0f64; 16];
    for i in 0..4 {
        for j in 0..=i {
            let mut s = a[i * 4 + j];
            for k in 0..j {
                s -= l[i * 4 + k] * l[j * 4 + k];
            }
            if i == j {
                if s < 0.0 {
                    return false;
                }
                l[i * 4 + i] = s.sqrt();
            } else if l[j * 4 + j] > 0.0 {
                l[i * 4 + j] = s / l[j * 4 + j];
            } else if s.abs() > 1e-12 {
                // Zero pivot with nonzero column: not PSD.
                return false;
            }
        }
    }
    true
}

fn gram_min_eig(c: CorrVec, x: f64, y: f64) -> f64 {
    let m = gram(c, x, y);
    real_sym_eigenvalues(&m, 4).expect("4x4 symmetric Jacobi converges")[0]
}

/// Quantum membership via a Gram-matrix search: `C` is feasible iff some
/// choice of same-party overlaps `x`, `y` makes the Gram matrix positive
/// semidefinite. The search assumes real overlaps (sufficient because any
/// realizable `C` is realized by real unit vectors); the complex fallback
/// [`gram_feasible_complex`] cross-checks that assumption.
///
/// Scans a `grid_n`^2 grid over `[-1, 1]^2`, accepting as soon as a Cholesky
/// factorization of the slack-shifted matrix succeeds; if no grid point
/// accepts, the minimum eigenvalue (concave in `(x, y)`) is maximized from
/// the best grid point by a shrinking pattern search before rejecting.
pub fn gram_feasible(c: CorrVec, grid_n: usize) -> Result<bool> {
    assert!(grid_n >= 2, "grid_n must be at least 2");
    let c = clamp_cube(c)?;
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / (grid_n - 1) as f64;
    for i in 0..grid_n {
        let x = coord(i);
        for j in 0..grid_n {
            if cholesky_psd(&gram(c, x, coord(j)), tol::GRAM_PSD_SLACK) {
                return Ok(true);
            }
        }
    }
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..grid_n {
        let x = coord(i);
        for j in 0..grid_n {
            let y = coord(j);
            let e = gram_min_eig(c, x, y);
            if e > best.0 {
                best = (e, x, y);
            }
        }
    }
    let (mut e0, mut x0, mut y0) = best;
    let mut step = 2.0 / (grid_n - 1) as f64;
    while step > 1e-7 {
        let mut improved = false;
        for (dx, dy) in [
            (1.0, 0.0),
            (-1.0, 0.0),
            (0.0, 1.0),
            (0.0, -1.0),
            (1.0, 1.0),
            (1.0, -1.0),
            (-1.0, 1.0),
            (-1.0, -1.0),
        ] {
            let x = (x0 + dx * step).clamp(-1.0, 1.0);
            let y = (y0 + dy * step).clamp(-1.0, 1.0);
            let e = gram_min_eig(c, x, y);
            if e > e0 {
                (e0, x0, y0) = (e, x, y);
                improved = true;
            }
        }
        if e0 >= -tol::GRAM_PSD_SLACK {
            return Ok(true);
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok(e0 >= -tol::GRAM_PSD_SLACK)
}

/// Gram-matrix search with complex same-party overlaps, scanning magnitude
/// and phase grids. Slower cross-check for the real-overlap assumption of
/// [`gram_feasible`]; no local refinement.
pub fn gram_feasible_complex(c: CorrVec, mag_n: usize, phase_n: usize) -> Result<bool> {
    assert!(mag_n >= 2 && phase_n >= 1, "degenerate search grid");
    let c = clamp_cube(c)?;
    let [c11, c21, c12, c22] = c;
    let re = |v: f64| C64::new(v, 0.0);
    for im in 0..mag_n {
        let mx = im as f64 / (mag_n - 1) as f64;
        for pm in 0..phase_n {
            let px = 2.0 * std::f64::consts::PI * pm as f64 / phase_n as f64;
            let x = C64::from_polar(mx, px);
            for jm in 0..mag_n {
                let my = jm as f64 / (mag_n - 1) as f64;
                for qm in 0..phase_n {
                    let py = 2.0 * std::f64::consts::PI * qm as f64 / phase_n as f64;
                    let y = C64::from_polar(my, py);
                    let rows = [
                        vec![re(1.0), x, re(c11), re(c12)],
                        vec![x.conj(), re(1.0), re(c21), re(c22)],
                        vec![re(c11), re(c21), re(1.0), y],
                        vec![re(c12), re(c22), y.conj(), re(1.0)],
                    ];
                    let m = HermMat::new(Mat::from_rows(&rows)?)?;
                    if m.eigenvalues()?[0] >= -tol::GRAM_PSD_SLACK {
                        return Ok(true);
                    }
                }
            }
        }
    }
    Ok(false)
}

/// Verdicts of all constraint families for one correlation vector.
#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    /// Largest CHSH combination.
    pub chsh_max: f64,
    /// `chsh_max <= 2`.
    pub chsh_ok: bool,
    /// `chsh_max <= 2 sqrt(2)`.
    pub tsirelson_ok: bool,
    /// Algebraic Tsirel'son-Landau form (false when outside the cube).
    pub tl_algebraic_ok: bool,
    /// Arcsin Tsirel'son-Landau form (false when outside the cube).
    pub tl_arcsin_ok: bool,
    /// Polynomial Tsirel'son-Landau form (false when outside the cube).
    pub tl_thm22_ok: bool,
    /// Gram-matrix oracle outcome, present when a search grid was requested
    /// and the input lies in the cube.
    pub gram_ok: Option<bool>,
    /// All components within [-1, 1].
    pub in_cube: bool,
}

/// Evaluates every family at once; `gram_grid` requests the (slower)
/// Gram-matrix oracle with that search resolution.
pub fn classify(c: CorrVec, gram_grid: Option<usize>) -> ClassifyReport {
    let chsh = chsh_max(c);
    let in_cube = clamp_cube(c).is_ok();
    let (alg, arc, thm, gram) = if in_cube {
        (
            tl_algebraic(c).expect("cube checked"),
            tl_arcsin(c).expect("cube checked"),
            tl_thm22(c).expect("cube checked"),
            gram_grid.map(|n| gram_feasible(c, n).expect("cube checked")),
        )
    } else {
        (false, false, false, None)
    };
    ClassifyReport {
        chsh_max: chsh,
        chsh_ok: chsh <= 2.0 + tol::ALGEBRAIC,
        tsirelson_ok: chsh <= 2.0 * std::f64::consts::SQRT_2 + tol::ALGEBRAIC,
        tl_algebraic_ok: alg,
        tl_arcsin_ok: arc,
        tl_thm22_ok: thm,
        gram_ok: gram,
        in_cube,
    }
}

/// Bell's original inequality `|c_ab - c_ac| <= 1 + c_bc` for three
/// correlations sharing the middle observable.
pub fn bell_original(c_ab: f64, c_ac: f64, c_bc: f64) -> bool {
    (c_ab - c_ac).abs() <= 1.0 + c_bc + tol::ALGEBRAIC
}

/// Realizability decision for the Bell scenario embedded in the CHSH one:
/// party A measures along `(a, b)`, party B along `(b, c)`, and the shared
/// direction is perfectly anticorrelated, so the correlation vector is
/// `(c_ab, -1, c_ac, c_bc)` with A-angle `alpha = angle(a, b)` and B-angle
/// `beta = angle(b, c)`.
pub fn bell_setting_decide(
    alpha: f64,
    beta: f64,
    c_ab: f64,
    c_ac: f64,
    c_bc: f64,
) -> Result<crate::realizability::Verdict> {
    crate::realizability::decide_at_angles(alpha, beta, [c_ab, -1.0, c_ac, c_bc])
}

/// Joint outcome table of one setting pair; `p[k][l]` is the probability of
/// outcomes `a = 1 - 2k` for A and `b = 1 - 2l` for B.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairDist {
    /// Probabilities indexed by outcome bits.
    pub p: [[f64; 2]; 2],
}

impl PairDist {
    /// Validates nonnegativity (round-off grace 1e-12) and unit mass.
    pub fn validate(&self) -> Result<()> {
        let mut sum = 0.0;
        for row in &self.p {
            for v in row {
                if !v.is_finite() || *v < -tol::ALGEBRAIC {
                    return Err(Error::BadProbability(format!("entry {v}")));
                }
                sum += v;
            }
        }
        if (sum - 1.0).abs() > tol::ALGEBRAIC {
            return Err(Error::BadProbability(format!("mass {sum}")));
        }
        Ok(())
    }

    /// Marginal of party A: `[P(a = +1), P(a = -1)]`.
    pub fn marginal_a(&self) -> [f64; 2] {
        [self.p[0][0] + self.p[0][1], self.p[1][0] + self.p[1][1]]
    }

    /// Marginal of party B: `[P(b = +1), P(b = -1)]`.
    pub fn marginal_b(&self) -> [f64; 2] {
        [self.p[0][0] + self.p[1][0], self.p[0][1] + self.p[1][1]]
    }

    /// Correlation `<ab>`.
    pub fn correlation(&self) -> f64 {
        self.p[0][0] - self.p[0][1] - self.p[1][0] + self.p[1][1]
    }
}

/// Probability-form CHSH criterion over the four setting-pair tables
/// `tables[i][j]` for `A_{i+1}` with `B_{j+1}`.
///
/// Checks every ordered instance of
///
/// ```text
/// -1 <= P(A_i = a, B_j = b) + P(A_i = a, B_j' = b') + P(A_i' = a', B_j' = b')
///     - P(A_i' = a', B_j = b) - P(A_i = a) - P(B_j' = b') <= 0
/// ```
///
/// over `i != i'`, `j != j'`, and all outcome sign patterns: 64 instances.
/// Errors when a table is malformed or the single-party marginals disagree
/// across tables by more than 1e-9.
pub fn fine_chsh_prob(tables: &[[PairDist; 2]; 2]) -> Result<bool> {
    for row in tables {
        for t in row {
            t.validate()?;
        }
    }
    for (i, row) in tables.iter().enumerate() {
        let m0 = row[0].marginal_a();
        let m1 = row[1].marginal_a();
        if (m0[0] - m1[0]).abs() > 1e-9 {
            return Err(Error::BadProbability(format!(
                "party A setting {} marginal mismatch {:e}",
                i + 1,
                (m0[0] - m1[0]).abs()
            )));
        }
    }
    for (j, (t0, t1)) in tables[0].iter().zip(&tables[1]).enumerate() {
        let m0 = t0.marginal_b();
        let m1 = t1.marginal_b();
        if (m0[0] - m1[0]).abs() > 1e-9 {
            return Err(Error::BadProbability(format!(
                "party B setting {} marginal mismatch {:e}",
                j + 1,
                (m0[0] - m1[0]).abs()
            )));
        }
    }
    let marg_a =
        |i: usize, k: usize| (tables[i][0].marginal_a()[k] + tables[i][1].marginal_a()[k]) / 2.0;
    let marg_b =
        |j: usize, l: usize| (tables[0][j].marginal_b()[l] + tables[1][j].marginal_b()[l]) / 2.0;
    for i in 0..2 {
        let ip = 1 - i;
        for j in 0..2 {
            let jp = 1 - j;
            for bits in 0..16u32 {
                let a = (bits & 1) as usize;
                let ap = ((bits >> 1) & 1) as usize;
                let b = ((bits >> 2) & 1) as usize;
                let bp = ((bits >> 3) & 1) as usize;
                let s = tables[i][j].p[a][b] + tables[i][jp].p[a][bp] + tables[ip][jp].p[ap][bp]
                    - tables[ip][j].p[ap][b]
                    - marg_a(i, a)
                    - marg_b(jp, bp);
                if !(-1.0 - tol::ALGEBRAIC..=tol::ALGEBRAIC).contains(&s) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Joint distribution over all four observables at once (a local hidden
/// variable model); `p[idx]` with `idx = k1*8 + k2*4 + l1*2 + l2` is the
/// probability of outcomes `a_i = 1 - 2 k_i`, `b_j = 1 - 2 l_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDist222 {
    /// Probabilities indexed by the four outcome bits.
    pub p: [f64; 16],
}

impl JointDist222 {
    /// Validates nonnegativity and unit mass.
    pub fn new(p: [f64; 16]) -> Result<JointDist222> {
        let mut sum = 0.0;
        for v in &p {
            if !v.is_finite() || *v < -tol::ALGEBRAIC {
                return Err(Error::BadProbability(format!("entry {v}")));
            }
            sum += v;
        }
        if (sum - 1.0).abs() > tol::ALGEBRAIC {
            return Err(Error::BadProbability(format!("mass {sum}")));
        }
        Ok(JointDist222 { p })
    }

    /// Pairwise tables `tables[i][j]` for `A_{i+1}` with `B_{j+1}`.
    pub fn pair_marginals(&self) -> [[PairDist; 2]; 2] {
        let mut tables = [[PairDist { p: [[0.0; 2]; 2] }; 2]; 2];
        for idx in 0..16 {
            let k = [(idx >> 3) & 1, (idx >> 2) & 1];
            let l = [(idx >> 1) & 1, idx & 1];
            for i in 0..2 {
                for j in 0..2 {
                    tables[i][j].p[k[i]][l[j]] += self.p[idx];
                }
            }
        }
        tables
    }

    /// Correlation vector of the pairwise marginals.
    pub fn correlations(&self) -> CorrVec {
        let t = self.pair_marginals();
        [
            t[0][0].correlation(),
            t[1][0].correlation(),
            t[0][1].correlation(),
            t[1][1].correlation(),
        ]
    }
}
