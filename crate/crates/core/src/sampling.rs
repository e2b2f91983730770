//! Seeded Monte Carlo generators and brute-force oracle sweeps.
//!
//! Randomness contract: every sample is a pure function of `(seed, index)`.
//! The generator is ChaCha8 with the 64-bit seed expanded by `seed_from_u64`
//! and the sample index installed as the ChaCha stream id, so sweeps
//! reproduce bit-for-bit on one platform regardless of thread count; report
//! merges are associative with index tie-breaking.

use crate::inequalities::{chsh_max, tl_algebraic, tl_arcsin_margin, tl_thm22};
use crate::linalg::{DensityOp, Mat, C64};
use crate::observables::{build_setting, BlochObservable, Setting};
use crate::realizability::{decide, verify_witness, witness, W33Choice};
use crate::{tol, CorrVec, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

/// Deterministic per-sample generator: ChaCha8 keyed by `seed` with `stream`
/// as the stream id.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Uniform unit vector on the sphere (normalized Gaussian triple).
pub fn random_unit_bloch(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [gauss(rng), gauss(rng), gauss(rng)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Ginibre-ensemble density operator: `G` a 4 x rank matrix of independent
/// standard complex Gaussians, `rho = G G^dagger / Tr[G G^dagger]`. Rank 4
/// samples full-rank interior states; ranks 1 to 3 hit the boundary.
pub fn random_density(rng: &mut ChaCha8Rng, rank: usize) -> DensityOp {
    assert!((1..=4).contains(&rank), "rank must be in 1..=4");
    let mut g = [[C64::new(0.0, 0.0); 4]; 4];
    for row in g.iter_mut().take(4) {
        for col in row.iter_mut().take(rank) {
            *col = C64::new(gauss(rng), gauss(rng));
        }
    }
    let mut m = Mat::zeros(4).expect("static 4x4");
    for i in 0..4 {
        for j in 0..4 {
            let mut v = C64::new(0.0, 0.0);
            for (gik, gjk) in g[i].iter().zip(&g[j]).take(rank) {
                v += gik * gjk.conj();
            }
            m.set(i, j, v);
        }
    }
    let tr = m.trace().re;
    DensityOp::new(m.scale(C64::new(1.0 / tr, 0.0))).expect("Ginibre output is a density operator")
}

/// Random setting at fixed angles: `a1` uniform on the sphere, `a2` at angle
/// `alpha` from it in a uniform tangent direction; the B pair likewise with
/// `beta`. All observables are unit with zero offset.
pub fn random_setting(alpha: f64, beta: f64, rng: &mut ChaCha8Rng) -> Result<Setting> {
    let pair = |angle: f64, rng: &mut ChaCha8Rng| -> ([f64; 3], [f64; 3]) {
        let u = random_unit_bloch(rng);
        let t = loop {
            let v = random_unit_bloch(rng);
            let p = v[0] * u[0] + v[1] * u[1] + v[2] * u[2];
            let t = [v[0] - p * u[0], v[1] - p * u[1], v[2] - p * u[2]];
            let n = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
            if n > 1e-6 {
                break [t[0] / n, t[1] / n, t[2] / n];
            }
        };
        let (s, c) = angle.sin_cos();
        (
            u,
            [
                c * u[0] + s * t[0],
                c * u[1] + s * t[1],
                c * u[2] + s * t[2],
            ],
        )
    };
    let (a1, a2) = pair(alpha, rng);
    let (b1, b2) = pair(beta, rng);
    build_setting(
        BlochObservable::unit(a1)?,
        BlochObservable::unit(a2)?,
        BlochObservable::unit(b1)?,
        BlochObservable::unit(b2)?,
    )
}

/// Uniform correlation vector in the cube.
pub fn random_corr(rng: &mut ChaCha8Rng) -> CorrVec {
    let mut g = [0.0; 4];
    for v in g.iter_mut() {
        *v = rng.random_range(-1.0..=1.0);
    }
    g
}

/// Correlations `gamma_ij = Tr[rho At_i (x) Bt_j]` of the normalized
/// observables.
pub fn measure(rho: &DensityOp, setting: &Setting) -> Result<CorrVec> {
    let mut g = [0.0; 4];
    for (idx, (i, j)) in [(0, 0), (1, 0), (0, 1), (1, 1)].iter().enumerate() {
        let obs = setting.a_tilde(*i).tensor(setting.b_tilde(*j))?;
        g[idx] = rho.mat().mul(&obs)?.trace().re;
    }
    Ok(g)
}

/// Outcome of one oracle sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    /// Sweep name.
    pub sweep: String,
    /// Iterations performed.
    pub samples: u64,
    /// Samples the oracle actually judged (off-band or feasible samples).
    pub checked: u64,
    /// Oracle failures; acceptance requires zero.
    pub violations: u64,
    /// Largest diagnostic margin seen (sweep-specific semantics; 0 when
    /// nothing was checked).
    pub worst_margin: f64,
    /// Serialized inputs of the worst sample.
    pub worst_case: Option<String>,
}

/// Per-sample outcome folded into a report; merges are associative and
/// deterministic (largest margin wins, ties to the smallest index).
#[derive(Clone, Debug, Default)]
struct Acc {
    samples: u64,
    checked: u64,
    violations: u64,
    worst: Option<(f64, u64, String)>,
}

impl Acc {
    fn merge(mut self, other: Acc) -> Acc {
        self.samples += other.samples;
        self.checked += other.checked;
        self.violations += other.violations;
        self.worst = match (self.worst, other.worst) {
            (None, w) | (w, None) => w,
            (Some(a), Some(b)) => {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    Some(b)
                } else {
                    Some(a)
                }
            }
        };
        self
    }

    fn into_report(self, name: &str) -> SweepReport {
        SweepReport {
            sweep: name.to_string(),
            samples: self.samples,
            checked: self.checked,
            violations: self.violations,
            worst_margin: self.worst.as_ref().map_or(0.0, |w| w.0),
            worst_case: self.worst.map(|w| w.2),
        }
    }
}

/// Runs `f` over the index range with the requested parallelism and merges
/// the per-index accumulators.
fn run_sweep<F>(n: u64, threads: usize, f: F) -> Acc
where
    F: Fn(u64) -> Acc + Sync + Send,
{
    if threads <= 1 {
        return (0..n).map(f).fold(Acc::default(), Acc::merge);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction");
    pool.install(|| {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(f)
            .reduce(Acc::default, Acc::merge)
    })
}

#[derive(Serialize)]
struct SampleCase {
    index: u64,
    alpha: f64,
    beta: f64,
    gamma: CorrVec,
    detail: String,
}

fn case_json(index: u64, alpha: f64, beta: f64, gamma: CorrVec, detail: String) -> String {
    serde_json::to_string(&SampleCase {
        index,
        alpha,
        beta,
        gamma,
        detail,
    })
    .expect("plain struct serializes")
}

/// Soundness oracle: measured correlations of random states are always
/// accepted, respect the Tsirel'son bound, and satisfy the algebraic
/// Tsirel'son-Landau inequality. `angles` is the sampled angle interval.
/// Margin semantics: `lhs - 2`, expected `<=` [`tol::SWEEP_SLACK`].
pub fn soundness_sweep(n: u64, seed: u64, threads: usize, angles: (f64, f64)) -> SweepReport {
    run_sweep(n, threads, |i| {
        let mut rng = substream(seed, i);
        let alpha = rng.random_range(angles.0..=angles.1);
        let beta = rng.random_range(angles.0..=angles.1);
        let setting = random_setting(alpha, beta, &mut rng).expect("angles are non-degenerate");
        let rank = 1 + (i % 4) as usize;
        let rho = random_density(&mut rng, rank);
        let gamma = measure(&rho, &setting).expect("measurement is total");
        let verdict = decide(&setting, gamma);
        let margin = verdict.lhs - 2.0;
        let clamped = gamma.map(|v| v.clamp(-1.0, 1.0));
        let hierarchy_ok = chsh_max(clamped) <= 2.0 * std::f64::consts::SQRT_2 + tol::SWEEP_SLACK
            && tl_algebraic(clamped).expect("clamped to cube");
        let bad = margin > tol::SWEEP_SLACK || !hierarchy_ok;
        Acc {
            samples: 1,
            checked: 1,
            violations: u64::from(bad),
            worst: Some((
                margin,
                i,
                case_json(i, alpha, beta, gamma, format!("lhs = {}", verdict.lhs)),
            )),
        }
    })
    .into_report("soundness")
}

const SWEEP_ANGLES: (f64, f64) = (0.05, std::f64::consts::PI - 0.05);

fn completeness_case(i: u64, seed: u64, boundary: bool) -> Acc {
    let mut rng = substream(seed, i);
    let alpha = rng.random_range(SWEEP_ANGLES.0..=SWEEP_ANGLES.1);
    let beta = rng.random_range(SWEEP_ANGLES.0..=SWEEP_ANGLES.1);
    let setting = random_setting(alpha, beta, &mut rng).expect("angles are non-degenerate");
    let mut gamma = random_corr(&mut rng);
    let mut verdict = decide(&setting, gamma);
    if boundary {
        if verdict.lhs < 1e-6 {
            return Acc {
                samples: 1,
                ..Acc::default()
            };
        }
        gamma = gamma.map(|v| v * 2.0 / verdict.lhs);
        verdict = decide(&setting, gamma);
    }
    if !verdict.feasible {
        return Acc {
            samples: 1,
            ..Acc::default()
        };
    }
    let outcome = witness(&setting, gamma, W33Choice::Midpoint)
        .and_then(|rho| verify_witness(&setting, gamma, &rho));
    match outcome {
        Ok(report) => {
            let margin = report
                .corr_residual
                .max(report.marginal_residual)
                .max(report.trace_residual)
                .max(-report.min_eig)
                .max(report.imag_residual);
            let mut bad = report.corr_residual > 1e-9
                || report.marginal_residual > 1e-9
                || report.trace_residual > 1e-12
                || report.min_eig < -tol::PSD_SLACK;
            if boundary {
                bad = bad || report.min_eig.abs() > 1e-8;
            }
            Acc {
                samples: 1,
                checked: 1,
                violations: u64::from(bad),
                worst: Some((
                    margin,
                    i,
                    case_json(
                        i,
                        alpha,
                        beta,
                        gamma,
                        format!("min_eig = {:e}", report.min_eig),
                    ),
                )),
            }
        }
        Err(e) => Acc {
            samples: 1,
            checked: 1,
            violations: 1,
            worst: Some((
                f64::INFINITY,
                i,
                case_json(i, alpha, beta, gamma, format!("witness failed: {e}")),
            )),
        },
    }
}

/// Completeness oracle: every accepted random correlation vector yields a
/// verified witness (correlations and marginals within 1e-9, unit trace,
/// PSD). Margin semantics: the largest witness residual.
pub fn completeness_sweep(n: u64, seed: u64, threads: usize) -> SweepReport {
    run_sweep(n, threads, |i| completeness_case(i, seed, false)).into_report("completeness")
}

/// Boundary-targeted completeness: correlation vectors are rescaled onto
/// `lhs = 2`, where the witness interval degenerates and the state must be
/// singular (`|min eigenvalue| < 1e-8`).
pub fn boundary_sweep(n: u64, seed: u64, threads: usize) -> SweepReport {
    run_sweep(n, threads, |i| completeness_case(i, seed, true)).into_report("boundary")
}

/// Agreement of the three Tsirel'son-Landau forms on uniform cube samples
/// outside a [`tol::SWEEP_SLACK`] boundary band. Margin semantics: |arcsin
/// margin| of the worst disagreeing point.
pub fn tl_equivalence_sweep(n: u64, seed: u64, threads: usize) -> SweepReport {
    run_sweep(n, threads, |i| {
        let mut rng = substream(seed, i);
        let c = random_corr(&mut rng);
        let m = tl_arcsin_margin(c).expect("cube sample");
        if m.abs() <= tol::SWEEP_SLACK {
            return Acc {
                samples: 1,
                ..Acc::default()
            };
        }
        let alg = tl_algebraic(c).expect("cube sample");
        let arc = m > 0.0;
        let poly = tl_thm22(c).expect("cube sample");
        let bad = alg != arc || poly != arc;
        Acc {
            samples: 1,
            checked: 1,
            violations: u64::from(bad),
            worst: if bad {
                Some((
                    m.abs(),
                    i,
                    case_json(
                        i,
                        f64::NAN,
                        f64::NAN,
                        c,
                        format!("algebraic = {alg}, arcsin = {arc}, polynomial = {poly}"),
                    ),
                ))
            } else {
                None
            },
        }
    })
    .into_report("tl-equivalence")
}

/// Agreement of the Gram-matrix oracle with the algebraic Tsirel'son-Landau
/// form outside a [`tol::TL_BOUNDARY_BUFFER`] band. Margin semantics as in
/// [`tl_equivalence_sweep`].
pub fn gram_agreement_sweep(n: u64, seed: u64, threads: usize, grid_n: usize) -> SweepReport {
    run_sweep(n, threads, |i| {
        let mut rng = substream(seed, i);
        let c = random_corr(&mut rng);
        let m = tl_arcsin_margin(c).expect("cube sample");
        if m.abs() <= tol::TL_BOUNDARY_BUFFER {
            return Acc {
                samples: 1,
                ..Acc::default()
            };
        }
        let gram = crate::inequalities::gram_feasible(c, grid_n).expect("cube sample");
        let bad = gram != (m > 0.0);
        Acc {
            samples: 1,
            checked: 1,
            violations: u64::from(bad),
            worst: if bad {
                Some((
                    m.abs(),
                    i,
                    case_json(i, f64::NAN, f64::NAN, c, format!("gram = {gram}")),
                ))
            } else {
                None
            },
        }
    })
    .into_report("gram-agreement")
}

/// Midpoint angle grid and per-pair coefficient tables for scanning the
/// feasibility test across all angle pairs. For fixed `gamma`, with
/// `S = sum gamma^2`, `U = g11 g21 + g12 g22`, `V = g11 g12 + g21 g22`,
/// `W = g11 g22 + g21 g12`, `X = g21 g12 - g11 g22`:
///
/// ```text
/// sin^2(a) sin^2(b) * q(+-) = S - 2 U cos a - 2 V cos b + 2 W cos a cos b
///                             +- 2 X sin a sin b,
/// ```
///
/// so each angle pair costs a handful of fused multiplies per point.
pub struct AngleGrid {
    n: usize,
    ca: Vec<f64>,
    cb: Vec<f64>,
    cc: Vec<f64>,
    ss: Vec<f64>,
    inv: Vec<f64>,
}

/// Per-point coefficients of the angle-grid decomposition.
#[derive(Clone, Copy, Debug)]
pub struct PointCoeffs {
    s: f64,
    u: f64,
    v: f64,
    w: f64,
    x: f64,
}

impl PointCoeffs {
    /// Coefficients for `gamma`.
    pub fn new(gamma: CorrVec) -> PointCoeffs {
        let [g11, g21, g12, g22] = gamma;
        PointCoeffs {
            s: g11 * g11 + g21 * g21 + g12 * g12 + g22 * g22,
            u: g11 * g21 + g12 * g22,
            v: g11 * g12 + g21 * g22,
            w: g11 * g22 + g21 * g12,
            x: g21 * g12 - g11 * g22,
        }
    }
}

impl AngleGrid {
    /// Midpoint grid `angle_k = pi (k + 1/2) / n` on both axes; midpoints
    /// keep every pair safely away from the degenerate endpoints.
    pub fn new(n: usize) -> AngleGrid {
        assert!(n >= 2, "angle grid needs at least 2 points per axis");
        let angle = |k: usize| std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
        let mut grid = AngleGrid {
            n,
            ca: Vec::with_capacity(n * n),
            cb: Vec::with_capacity(n * n),
            cc: Vec::with_capacity(n * n),
            ss: Vec::with_capacity(n * n),
            inv: Vec::with_capacity(n * n),
        };
        for ka in 0..n {
            let (sa, ca) = angle(ka).sin_cos();
            for kb in 0..n {
                let (sb, cb) = angle(kb).sin_cos();
                grid.ca.push(ca);
                grid.cb.push(cb);
                grid.cc.push(ca * cb);
                grid.ss.push(sa * sb);
                grid.inv.push(1.0 / (sa * sa * sb * sb));
            }
        }
        grid
    }

    /// Number of angle pairs.
    pub fn pairs(&self) -> usize {
        self.n * self.n
    }

    /// Angle pair behind a flat index.
    pub fn angles(&self, idx: usize) -> (f64, f64) {
        let angle = |k: usize| std::f64::consts::PI * (k as f64 + 0.5) / self.n as f64;
        (angle(idx / self.n), angle(idx % self.n))
    }

    /// Index of the pair closest to `(pi/2, pi/2)`.
    pub fn center(&self) -> usize {
        (self.n / 2) * self.n + self.n / 2
    }

    /// Acceptance test at one pair. A polynomial screen decides clear cases
    /// without square roots (`sqrt(qp) + sqrt(qm) <= 2` is equivalent to
    /// `qp + qm <= 4` and `4 qp qm <= (4 - qp - qm)^2`); only pairs within
    /// 1e-9 of either screen equality fall through to the exact comparison,
    /// which keeps the verdict identical to [`decide`] while the full-grid
    /// scans stay cheap.
    fn accepts(&self, p: &PointCoeffs, idx: usize) -> bool {
        let t = p.s - 2.0 * (p.u * self.ca[idx] + p.v * self.cb[idx] - p.w * self.cc[idx]);
        let xs = 2.0 * p.x * self.ss[idx];
        let qp = ((t + xs) * self.inv[idx]).max(0.0);
        let qm = ((t - xs) * self.inv[idx]).max(0.0);
        let a = qp + qm;
        if a > 4.0 + 4e-9 {
            // lhs >= sqrt(a) > 2 + 1e-9.
            return false;
        }
        let d = 4.0 - a;
        let screen = d * d - 4.0 * qp * qm;
        if a <= 4.0 - 1e-9 && screen >= 1e-9 {
            // lhs^2 = a + 2 sqrt(qp qm) <= a + d = 4.
            return true;
        }
        if a <= 4.0 && screen <= -1e-9 {
            // lhs^2 >= 4 + 1e-9 / (d + sqrt(d^2 + 1e-9)) > 4 + 1e-10.
            return false;
        }
        qp.sqrt() + qm.sqrt() <= 2.0 + tol::FEASIBILITY_SLACK
    }

    /// First pair (scanning from `start`, wrapping) whose test accepts
    /// `gamma`, or `None` when every sampled pair rejects.
    pub fn find_feasible(&self, p: &PointCoeffs, start: usize) -> Option<usize> {
        let total = self.pairs();
        let start = start % total;
        for off in 0..total {
            let idx = if start + off < total {
                start + off
            } else {
                start + off - total
            };
            if self.accepts(p, idx) {
                return Some(idx);
            }
        }
        None
    }

    /// Minimum of the test statistic over all sampled pairs (branch-free full
    /// scan; used to certify that no pair accepts).
    pub fn min_lhs(&self, p: &PointCoeffs) -> f64 {
        let mut best = f64::INFINITY;
        for idx in 0..self.pairs() {
            let t = p.s - 2.0 * (p.u * self.ca[idx] + p.v * self.cb[idx] - p.w * self.cc[idx]);
            let xs = 2.0 * p.x * self.ss[idx];
            let qp = ((t + xs) * self.inv[idx]).max(0.0);
            let qm = ((t - xs) * self.inv[idx]).max(0.0);
            let lhs = qp.sqrt() + qm.sqrt();
            best = if lhs < best { lhs } else { best };
        }
        best
    }
}

/// Proximity of a cube point to the boundary of the quantum correlation set:
/// the smaller of the arcsin-form margin and the distance to the nearest cube
/// face. Both surfaces bound the set — points with a component at `+-1` are
/// boundary points no matter how large the arcsin margin is — and the
/// accepting angle regions collapse toward either one.
fn boundary_proximity(m: f64, gamma: CorrVec) -> f64 {
    gamma.iter().fold(m, |acc, v| acc.min(1.0 - v.abs()))
}

fn union_point(grid: &AngleGrid, gamma: CorrVec, warm: &mut usize, index: u64, buffer: f64) -> Acc {
    let clamped = gamma.map(|v| v.clamp(-1.0, 1.0));
    let m = tl_arcsin_margin(clamped).expect("cube point");
    let p = PointCoeffs::new(gamma);
    if m > 0.0 && boundary_proximity(m, clamped) > buffer {
        match grid.find_feasible(&p, *warm) {
            Some(idx) => {
                *warm = idx;
                Acc {
                    samples: 1,
                    checked: 1,
                    ..Acc::default()
                }
            }
            None => Acc {
                samples: 1,
                checked: 1,
                violations: 1,
                worst: Some((
                    m,
                    index,
                    case_json(
                        index,
                        f64::NAN,
                        f64::NAN,
                        gamma,
                        "inside the quantum set but no sampled angle accepts".to_string(),
                    ),
                )),
            },
        }
    } else if m < -buffer {
        match grid.find_feasible(&p, *warm) {
            Some(idx) => Acc {
                samples: 1,
                checked: 1,
                violations: 1,
                worst: Some((
                    -m,
                    index,
                    case_json(
                        index,
                        f64::NAN,
                        f64::NAN,
                        gamma,
                        format!("outside the quantum set but accepted at pair {idx}"),
                    ),
                )),
            },
            None => Acc {
                samples: 1,
                checked: 1,
                ..Acc::default()
            },
        }
    } else {
        Acc {
            samples: 1,
            ..Acc::default()
        }
    }
}

/// Union oracle on random cube points: every point farther than `buffer`
/// from the quantum boundary (see the proximity measure above) must be
/// accepted at some sampled angle pair; every point with arcsin margin below
/// `-buffer` must be rejected at all of them. Margin semantics: |arcsin
/// margin| of the worst violator.
///
/// `buffer` must be sized to the angle resolution: accepting regions shrink
/// toward the boundary and the faces, and a `pi / angle_n` pitch resolves
/// them only down to proximity ≈ 0.08 at `angle_n = 64` (verified over the
/// full 41^4 coarse grid and 10^6 random points; at proximity 1e-3 the pitch
/// would have to shrink to ~1e-3 rad, far beyond a desk-scale scan).
pub fn union_sweep(n: u64, seed: u64, threads: usize, angle_n: usize, buffer: f64) -> SweepReport {
    let grid = AngleGrid::new(angle_n);
    run_sweep(n, threads, |i| {
        let mut rng = substream(seed, i);
        let gamma = random_corr(&mut rng);
        let mut warm = grid.center();
        union_point(&grid, gamma, &mut warm, i, buffer)
    })
    .into_report("union")
}

/// Union oracle on the full `cube_n`^4 correlation grid (see [`union_sweep`]
/// for the acceptance semantics and the `buffer` sizing constraint).
/// Deterministic; parallelized over the leading grid axis with warm-started
/// angle searches inside each slice.
pub fn region_hierarchy_sweep(
    cube_n: usize,
    angle_n: usize,
    threads: usize,
    buffer: f64,
) -> SweepReport {
    assert!(cube_n >= 2, "cube grid needs at least 2 points per axis");
    let grid = AngleGrid::new(angle_n);
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / (cube_n - 1) as f64;
    let slice = |i1: u64| -> Acc {
        let g11 = coord(i1 as usize);
        let mut acc = Acc::default();
        let mut warm = grid.center();
        for i2 in 0..cube_n {
            let g21 = coord(i2);
            for i3 in 0..cube_n {
                let g12 = coord(i3);
                for i4 in 0..cube_n {
                    let g22 = coord(i4);
                    let index = ((i1 as usize * cube_n + i2) * cube_n + i3) as u64 * cube_n as u64
                        + i4 as u64;
                    let one = union_point(&grid, [g11, g21, g12, g22], &mut warm, index, buffer);
                    acc = acc.merge(one);
                }
            }
        }
        acc
    };
    run_sweep(cube_n as u64, threads, slice).into_report("region-hierarchy")
}
