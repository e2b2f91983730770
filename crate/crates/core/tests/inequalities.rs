//! Inequality-family checks: CHSH values, the three quantum-boundary forms,
//! the Gram oracle, Bell's three-term chain, and the probability-form
//! criterion against explicit local models.

use chsh_core::inequalities::{
    bell_original, bell_setting_decide, chsh_local, chsh_max, classify, fine_chsh_prob,
    gram_feasible, gram_feasible_complex, tl_algebraic, tl_arcsin, tl_arcsin_margin, tl_thm22,
    tsirelson, JointDist222, PairDist,
};
use chsh_core::CorrVec;

const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Deterministic pseudo-random stream in [-1, 1].
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }
}

#[test]
fn chsh_values_at_landmarks() {
    assert_eq!(chsh_max([0.0; 4]), 0.0);
    // Deterministic corner: value 4, the algebraic maximum.
    assert_eq!(chsh_max([1.0, 1.0, 1.0, -1.0]), 4.0);
    assert!(!chsh_local([1.0, 1.0, 1.0, -1.0]));
    assert!(!tsirelson([1.0, 1.0, 1.0, -1.0]));
    // Quantum optimum: value 2 sqrt(2).
    let q: CorrVec = [R, R, R, -R];
    assert!((chsh_max(q) - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
    assert!(!chsh_local(q));
    assert!(tsirelson(q));
    // All-equal correlations never violate.
    assert_eq!(chsh_max([0.9, 0.9, 0.9, 0.9]), 1.8);
    assert!(chsh_local([0.9, 0.9, 0.9, 0.9]));
}

#[test]
fn quantum_boundary_forms_at_landmarks() {
    let q: CorrVec = [R, R, R, -R];
    assert!(tl_algebraic(q).unwrap());
    assert!(tl_arcsin(q).unwrap());
    assert!(tl_thm22(q).unwrap());
    // The arcsin margin vanishes exactly on the boundary.
    assert!(tl_arcsin_margin(q).unwrap().abs() < 1e-12);

    // Just outside: scale the optimum up (stays in the cube).
    let out = q.map(|v| v * 1.02);
    assert!(!tl_algebraic(out).unwrap());
    assert!(!tl_arcsin(out).unwrap());
    assert!(!tl_thm22(out).unwrap());
    assert!(tl_arcsin_margin(out).unwrap() < 0.0);

    // Just inside.
    let inside = q.map(|v| v * 0.98);
    assert!(tl_algebraic(inside).unwrap());
    assert!(tl_arcsin(inside).unwrap());
    assert!(tl_thm22(inside).unwrap());
}

#[test]
fn deterministic_corners_are_quantum() {
    // Every deterministic local point (products of fixed +-1 outcomes) lies
    // inside all three boundary forms.
    for bits in 0..16u32 {
        let a = [1.0, -1.0][(bits & 1) as usize];
        let a2 = [1.0, -1.0][((bits >> 1) & 1) as usize];
        let b = [1.0, -1.0][((bits >> 2) & 1) as usize];
        let b2 = [1.0, -1.0][((bits >> 3) & 1) as usize];
        let c: CorrVec = [a * b, a2 * b, a * b2, a2 * b2];
        assert!(chsh_local(c), "corner {c:?}");
        assert!(tl_algebraic(c).unwrap(), "corner {c:?}");
        assert!(tl_arcsin(c).unwrap(), "corner {c:?}");
        assert!(tl_thm22(c).unwrap(), "corner {c:?}");
    }
}

#[test]
fn boundary_forms_agree_on_random_points() {
    let mut rng = Lcg(7);
    let mut seen_both = (false, false);
    for _ in 0..2000 {
        let c: CorrVec = [rng.next(), rng.next(), rng.next(), rng.next()];
        let margin = tl_arcsin_margin(c).unwrap();
        if margin.abs() < 1e-6 {
            continue; // skip knife-edge points, checked separately
        }
        let a = tl_algebraic(c).unwrap();
        let b = tl_arcsin(c).unwrap();
        let t = tl_thm22(c).unwrap();
        assert!(a == b && b == t, "forms disagree at {c:?}: {a} {b} {t}");
        if a {
            seen_both.0 = true;
        } else {
            seen_both.1 = true;
        }
    }
    assert!(
        seen_both.0 && seen_both.1,
        "sampling never crossed the boundary"
    );
}

#[test]
fn out_of_cube_is_rejected() {
    assert!(tl_algebraic([1.2, 0.0, 0.0, 0.0]).is_err());
    assert!(tl_arcsin([0.0, -1.1, 0.0, 0.0]).is_err());
    assert!(tl_thm22([0.0, 0.0, f64::NAN, 0.0]).is_err());
    assert!(gram_feasible([2.0, 0.0, 0.0, 0.0], 11).is_err());
}

#[test]
fn gram_oracle_matches_boundary_forms() {
    let mut rng = Lcg(99);
    let mut tested = 0;
    while tested < 60 {
        let c: CorrVec = [rng.next(), rng.next(), rng.next(), rng.next()];
        let margin = tl_arcsin_margin(c).unwrap();
        if margin.abs() < 1e-3 {
            continue; // clear-margin points only
        }
        tested += 1;
        let want = margin > 0.0;
        let got = gram_feasible(c, 41).unwrap();
        assert_eq!(got, want, "gram disagrees at {c:?} (margin {margin})");
    }
}

#[test]
fn gram_real_and_complex_agree() {
    let points: [CorrVec; 4] = [
        [0.3, 0.1, -0.2, 0.4],
        [R, R, R, -R],
        [0.95, 0.95, 0.95, -0.95],
        [0.9, -0.9, 0.9, 0.9],
    ];
    for c in points {
        let real = gram_feasible(c, 41).unwrap();
        let complex = gram_feasible_complex(c, 9, 8).unwrap();
        // The complex scan is a coarse cross-check: it may miss feasible
        // points but must never accept infeasible ones.
        if complex {
            assert!(real, "complex accepted but real rejected at {c:?}");
        }
        let margin = tl_arcsin_margin(c).unwrap();
        if margin > 1e-2 {
            assert!(real, "clear interior point rejected: {c:?}");
        }
        if margin < -1e-2 {
            assert!(!real, "clear exterior point accepted: {c:?}");
        }
    }
}

#[test]
fn classify_report_is_consistent() {
    let mut rng = Lcg(3);
    for _ in 0..200 {
        let c: CorrVec = [rng.next(), rng.next(), rng.next(), rng.next()];
        let rep = classify(c, None);
        assert_eq!(rep.chsh_ok, chsh_max(c) <= 2.0 + 1e-12);
        assert_eq!(
            rep.tsirelson_ok,
            chsh_max(c) <= 2.0 * std::f64::consts::SQRT_2 + 1e-12
        );
        assert!(rep.in_cube);
        assert!(rep.gram_ok.is_none());
        if tl_arcsin_margin(c).unwrap().abs() > 1e-6 {
            assert_eq!(rep.tl_algebraic_ok, rep.tl_arcsin_ok);
            assert_eq!(rep.tl_arcsin_ok, rep.tl_thm22_ok);
        }
    }
    let rep = classify([3.0, 0.0, 0.0, 0.0], Some(11));
    assert!(!rep.in_cube);
    assert!(rep.gram_ok.is_none());
    let rep = classify([0.1, 0.1, 0.1, 0.1], Some(11));
    assert_eq!(rep.gram_ok, Some(true));
}

#[test]
fn bell_original_landmarks() {
    // Perfect anticorrelation chain: satisfied with equality.
    assert!(bell_original(-1.0, -1.0, 1.0));
    // Quantum singlet at 60/120 degrees violates: |c_ab - c_ac| = 1 > 1 - 1/2.
    let c_ab = -(std::f64::consts::PI / 3.0).cos(); // -0.5
    let c_ac = -(2.0 * std::f64::consts::PI / 3.0).cos(); // +0.5
    let c_bc = -(std::f64::consts::PI / 3.0).cos(); // -0.5
    assert!(!bell_original(c_ab, c_ac, c_bc));
    // Classical correlations from a shared coin always satisfy.
    assert!(bell_original(1.0, 1.0, 1.0));
}

#[test]
fn bell_embedding_boundary_family() {
    // Three-observable scenario embedded at alpha = beta = pi/4 with the
    // shared direction anticorrelated: gamma = (-r, -1, c, -r). The two
    // quadratic-form terms come out as 2|c| and 2|1 + c|, so the lhs equals
    // exactly 2 for every c in [-1, 0]: the whole family sits on the
    // feasibility boundary.
    for c in [-1.0, -0.75, -0.5, -0.25, 0.0] {
        let verdict = bell_setting_decide(
            std::f64::consts::PI / 4.0,
            std::f64::consts::PI / 4.0,
            -R,
            c,
            -R,
        )
        .unwrap();
        assert!(verdict.feasible, "c = {c}");
        assert!(
            (verdict.lhs - 2.0).abs() < 1e-9,
            "c = {c}: lhs {}",
            verdict.lhs
        );
    }
    // Positive c leaves the feasible set: lhs = 2 + 4c.
    let verdict = bell_setting_decide(
        std::f64::consts::PI / 4.0,
        std::f64::consts::PI / 4.0,
        -R,
        0.3,
        -R,
    )
    .unwrap();
    assert!(!verdict.feasible);
    assert!((verdict.lhs - 3.2).abs() < 1e-12, "lhs {}", verdict.lhs);
}

#[test]
fn singlet_violates_bell_original_but_is_realizable() {
    // The singlet family c_ac = c in (1 - sqrt(2), 0] violates the
    // three-term inequality while remaining quantum-realizable.
    let c = -0.25;
    assert!(!bell_original(-R, c, -R));
    let verdict = bell_setting_decide(
        std::f64::consts::PI / 4.0,
        std::f64::consts::PI / 4.0,
        -R,
        c,
        -R,
    )
    .unwrap();
    assert!(verdict.feasible);
}

fn uniform_tables(c: CorrVec) -> [[PairDist; 2]; 2] {
    // Unbiased marginals with prescribed correlations.
    let mut tables = [[PairDist { p: [[0.0; 2]; 2] }; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let corr = c[i + 2 * j];
            for k in 0..2 {
                for l in 0..2 {
                    let a = 1.0 - 2.0 * k as f64;
                    let b = 1.0 - 2.0 * l as f64;
                    tables[i][j].p[k][l] = (1.0 + a * b * corr) / 4.0;
                }
            }
        }
    }
    tables
}

#[test]
fn probability_form_accepts_local_joint_models() {
    let mut rng = Lcg(41);
    for _ in 0..50 {
        // Random local hidden-variable model: a distribution over the 16
        // deterministic outcome assignments.
        let mut p = [0.0f64; 16];
        let mut sum = 0.0;
        for v in p.iter_mut() {
            *v = rng.next().abs();
            sum += *v;
        }
        for v in p.iter_mut() {
            *v /= sum;
        }
        let joint = JointDist222::new(p).unwrap();
        let tables = joint.pair_marginals();
        assert!(
            fine_chsh_prob(&tables).unwrap(),
            "local model rejected: {:?}",
            joint.correlations()
        );
        // The pairwise correlations of a local model satisfy CHSH.
        assert!(chsh_local(joint.correlations()));
    }
}

#[test]
fn probability_form_rejects_quantum_optimum() {
    let tables = uniform_tables([R, R, R, -R]);
    assert!(!fine_chsh_prob(&tables).unwrap());
    // And accepts the same shape inside the local polytope.
    let tables = uniform_tables([0.4, 0.4, 0.4, -0.4]);
    assert!(fine_chsh_prob(&tables).unwrap());
}

#[test]
fn probability_form_rejects_inconsistent_marginals() {
    let mut tables = uniform_tables([0.2, 0.1, -0.1, 0.3]);
    // Skew party A's marginal in one table only.
    tables[0][0].p[0][0] += 0.05;
    tables[0][0].p[1][0] -= 0.05;
    assert!(fine_chsh_prob(&tables).is_err());
}

#[test]
fn probability_form_rejects_malformed_tables() {
    let mut tables = uniform_tables([0.0; 4]);
    tables[1][1].p[0][0] = -0.3;
    tables[1][1].p[1][1] = 0.8;
    assert!(fine_chsh_prob(&tables).is_err());
}

#[test]
fn joint_distribution_marginals_and_correlations() {
    // Point mass on one assignment: a1 = +1, a2 = -1, b1 = -1, b2 = +1
    // (bits k1 k2 l1 l2 = 0 1 1 0 -> index 6).
    let mut p = [0.0; 16];
    p[6] = 1.0;
    let joint = JointDist222::new(p).unwrap();
    let c = joint.correlations();
    assert_eq!(c, [-1.0, 1.0, 1.0, -1.0]);
    let tables = joint.pair_marginals();
    assert_eq!(tables[0][0].marginal_a(), [1.0, 0.0]);
    assert_eq!(tables[0][0].marginal_b(), [0.0, 1.0]);
    assert!(fine_chsh_prob(&tables).unwrap());
}

#[test]
fn pair_dist_accessors() {
    let t = PairDist {
        p: [[0.4, 0.1], [0.2, 0.3]],
    };
    t.validate().unwrap();
    assert!((t.correlation() - 0.4).abs() < 1e-15);
    assert_eq!(t.marginal_a(), [0.5, 0.5]);
    let mb = t.marginal_b();
    assert!((mb[0] - 0.6).abs() < 1e-15 && (mb[1] - 0.4).abs() < 1e-15);
}
