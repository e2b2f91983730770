//! Setting construction checks: angle extraction, branch classification,
//! frame orthonormality, and the frame product identities.

use chsh_core::linalg::{Mat, C64};
use chsh_core::observables::{build_setting, setting_from_angles, BlochObservable, Branch};
use chsh_core::{tol, Error};

const PI: f64 = std::f64::consts::PI;

fn tr_inner(a: &Mat, b: &Mat) -> C64 {
    a.adjoint().mul(b).unwrap().trace()
}

#[test]
fn bloch_observable_basics() {
    let o = BlochObservable::new(0.25, [0.0, 3.0, 4.0]).unwrap();
    assert!((o.norm() - 5.0).abs() < 1e-15);
    let u = o.unit_bloch();
    for (got, want) in u.iter().zip(&[0.0, 0.6, 0.8]) {
        assert!((got - want).abs() < 1e-15, "unit bloch {u:?}");
    }
    // matrix = a0 I + a . sigma has trace 2 a0.
    assert!((o.matrix().trace().re - 0.5).abs() < 1e-15);
    // normalized matrix squares to the identity.
    let n = o.normalized_matrix();
    let id = Mat::identity(2).unwrap();
    assert!(n.mul(&n).unwrap().max_abs_diff(&id) < 1e-15);
}

#[test]
fn zero_bloch_vector_is_rejected() {
    assert!(matches!(
        BlochObservable::new(0.0, [0.0, 0.0, 0.0]),
        Err(Error::ZeroBloch)
    ));
}

#[test]
fn angles_recovered_from_vectors() {
    for (alpha, beta) in [(0.3, 1.1), (PI / 2.0, PI / 2.0), (2.9, 0.4)] {
        let s = build_setting(
            BlochObservable::unit([0.0, 0.0, 1.0]).unwrap(),
            BlochObservable::unit([alpha.sin(), 0.0, alpha.cos()]).unwrap(),
            BlochObservable::unit([0.0, 0.0, 1.0]).unwrap(),
            BlochObservable::unit([beta.sin(), 0.0, beta.cos()]).unwrap(),
        )
        .unwrap();
        assert!((s.alpha - alpha).abs() < 1e-12, "alpha {alpha}");
        assert!((s.beta - beta).abs() < 1e-12, "beta for {beta}");
        assert_eq!(s.branch, Branch::Generic);
    }
}

#[test]
fn angle_independent_of_observable_norms_and_offsets() {
    let a1 = BlochObservable::new(0.7, [0.0, 0.0, 2.5]).unwrap();
    let a2 = BlochObservable::new(-0.2, [1.5, 0.0, 1.5]).unwrap();
    let b = BlochObservable::unit([0.0, 1.0, 0.0]).unwrap();
    let s = build_setting(a1, a2, b, BlochObservable::unit([1.0, 0.0, 0.0]).unwrap()).unwrap();
    assert!((s.alpha - PI / 4.0).abs() < 1e-12);
    assert!((s.beta - PI / 2.0).abs() < 1e-12);
}

#[test]
fn branch_classification_with_signs() {
    let z = BlochObservable::unit([0.0, 0.0, 1.0]).unwrap();
    let mz = BlochObservable::unit([0.0, 0.0, -1.0]).unwrap();
    let x = BlochObservable::unit([1.0, 0.0, 0.0]).unwrap();

    let s = build_setting(z, x, z, z).unwrap();
    assert_eq!(s.branch, Branch::BParallel);
    assert_eq!(s.s_b, Some(1));
    assert_eq!(s.s_a, None);

    let s = build_setting(z, mz, z, x).unwrap();
    assert_eq!(s.branch, Branch::AParallel);
    assert_eq!(s.s_a, Some(-1));

    let s = build_setting(z, z, z, mz).unwrap();
    assert_eq!(s.branch, Branch::BothParallel);
    assert_eq!(s.s_a, Some(1));
    assert_eq!(s.s_b, Some(-1));

    // Nearly parallel within tolerance classifies as parallel.
    let near = BlochObservable::unit([1e-11, 0.0, 1.0]).unwrap();
    let s = build_setting(z, near, z, x).unwrap();
    assert_eq!(s.branch, Branch::AParallel);
}

#[test]
fn frames_are_orthonormal() {
    let s = setting_from_angles(0.9, 2.2).unwrap();
    for frame in [s.frame_e().unwrap(), s.frame_f().unwrap()] {
        for mu in 0..4 {
            assert!(frame.op(mu).herm_residual() < 1e-14, "op {mu} Hermitian");
            for nu in 0..4 {
                let want = if mu == nu { 2.0 } else { 0.0 };
                let got = tr_inner(frame.op(mu), frame.op(nu));
                assert!(
                    (got.re - want).abs() < 1e-12 && got.im.abs() < 1e-12,
                    "inner product ({mu},{nu}) = {got}"
                );
            }
        }
    }
}

#[test]
fn frame_product_identity() {
    // At1 At2 = cos(alpha) I + i sin(alpha) E3, equivalently
    // E3 = (At1 At2 - cos(alpha) I) / (i sin(alpha)).
    let s = setting_from_angles(1.234, 0.77).unwrap();
    let e = s.frame_e().unwrap();
    let prod = s.a_tilde(0).mul(s.a_tilde(1)).unwrap();
    let expect = Mat::identity(2)
        .unwrap()
        .scale(C64::new(s.alpha.cos(), 0.0))
        .add(&e.op(3).scale(C64::new(0.0, s.alpha.sin())))
        .unwrap();
    assert!(prod.max_abs_diff(&expect) < 1e-13);

    let f = s.frame_f().unwrap();
    let prod = s.b_tilde(0).mul(s.b_tilde(1)).unwrap();
    let expect = Mat::identity(2)
        .unwrap()
        .scale(C64::new(s.beta.cos(), 0.0))
        .add(&f.op(3).scale(C64::new(0.0, s.beta.sin())))
        .unwrap();
    assert!(prod.max_abs_diff(&expect) < 1e-13);
}

#[test]
fn frame_expands_observables() {
    // At1 = E1 and At2 = cos(alpha) E1 + sin(alpha) E2.
    let s = setting_from_angles(0.6, 1.9).unwrap();
    let e = s.frame_e().unwrap();
    assert!(s.a_tilde(0).max_abs_diff(e.op(1)) < 1e-14);
    let expect = e
        .op(1)
        .scale(C64::new(s.alpha.cos(), 0.0))
        .add(&e.op(2).scale(C64::new(s.alpha.sin(), 0.0)))
        .unwrap();
    assert!(s.a_tilde(1).max_abs_diff(&expect) < 1e-13);
}

#[test]
fn basis_is_tensor_of_frames() {
    let s = setting_from_angles(1.0, 1.5).unwrap();
    let e = s.frame_e().unwrap();
    let f = s.frame_f().unwrap();
    for mu in 0..4 {
        for nu in 0..4 {
            let want = e.op(mu).tensor(f.op(nu)).unwrap();
            assert!(s.basis(mu, nu).unwrap().max_abs_diff(&want) < 1e-14);
        }
    }
}

#[test]
fn parallel_side_has_no_frame() {
    let z = BlochObservable::unit([0.0, 0.0, 1.0]).unwrap();
    let x = BlochObservable::unit([1.0, 0.0, 0.0]).unwrap();
    let s = build_setting(z, z, z, x).unwrap();
    assert!(matches!(s.frame_e(), Err(Error::DegenerateAngle)));
    assert!(s.frame_f().is_ok());
}

#[test]
fn setting_from_angles_validates_range() {
    assert!(matches!(
        setting_from_angles(-0.1, 1.0),
        Err(Error::BadAngle(_))
    ));
    assert!(matches!(
        setting_from_angles(1.0, PI + 0.1),
        Err(Error::BadAngle(_))
    ));
    assert!(setting_from_angles(0.0, PI).is_ok());
}

#[test]
fn setting_from_angles_hits_parallel_branches() {
    let s = setting_from_angles(0.0, 1.0).unwrap();
    assert_eq!(s.branch, Branch::AParallel);
    assert_eq!(s.s_a, Some(1));
    let s = setting_from_angles(1.0, PI).unwrap();
    assert_eq!(s.branch, Branch::BParallel);
    assert_eq!(s.s_b, Some(-1));
    let s = setting_from_angles(0.0, 0.0).unwrap();
    assert_eq!(s.branch, Branch::BothParallel);
}

#[test]
fn parallel_tolerance_boundary() {
    // sin(angle) right at the tolerance: angle approximately PARALLEL_TOL.
    let eps = tol::PARALLEL_TOL;
    let s = setting_from_angles(eps * 0.5, 1.0).unwrap();
    assert_eq!(s.branch, Branch::AParallel);
    let s = setting_from_angles(eps * 100.0, 1.0).unwrap();
    assert_eq!(s.branch, Branch::Generic);
}
