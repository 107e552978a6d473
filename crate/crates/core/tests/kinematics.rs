#![allow(clippy::needless_range_loop)]

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use opsent::kinematics::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn interior_point() -> impl Strategy<Value = DalitzPoint> {
    (0.0..1.0f64, 0.0..1.0f64)
        .prop_map(|(u1, u2)| dalitz_sample(u1, u2))
        .prop_filter("soft photon", |d| d.fractions().iter().all(|&x| x > 1e-6))
}

fn orientation() -> impl Strategy<Value = Orientation> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, b, c)| Orientation::from_unit(a, b, c))
}

proptest! {
    #[test]
    fn conservation(d in interior_point(), o in orientation()) {
        let t = build_event(d, o).unwrap();
        prop_assert!(t.momentum_residual() < 1e-12);
        prop_assert!(t.energy_residual() < 1e-12);
        prop_assert!(t.direction_norm_residual() < 1e-12);
    }

    #[test]
    fn opening_angles_follow_energies(d in interior_point(), o in orientation()) {
        let t = build_event(d, o).unwrap();
        let x = d.fractions();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let l = 3 - i - j;
            let expected = (x[l] * x[l] - x[i] * x[i] - x[j] * x[j]) / (2.0 * x[i] * x[j]);
            let dot = t.directions()[i].dot(&t.directions()[j]);
            prop_assert!((dot - expected).abs() < 1e-12, "{dot} vs {expected}");
        }
    }

    #[test]
    fn rotation_equivariance(d in interior_point(), o in orientation()) {
        let t0 = build_event(d, Orientation::identity()).unwrap();
        let t = build_event(d, o).unwrap();
        let r = o.rotation();
        for i in 0..3 {
            prop_assert!((r * t0.directions()[i] - t.directions()[i]).amax() < 1e-12);
        }
    }

    #[test]
    fn f_factor_symmetric(d in interior_point(), o in orientation()) {
        let t = build_event(d, o).unwrap();
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            let f = f_factor(&t, i, j).unwrap();
            prop_assert_eq!(f, f_factor(&t, j, i).unwrap());
            prop_assert!((0.0..=2.0).contains(&f));
        }
    }

    #[test]
    fn polarization_completeness(theta in 0.0..std::f64::consts::PI, phi in -3.2..3.2f64) {
        let k = unit_from_angles(theta, phi);
        let p = polarization_vector(theta, phi, Helicity::Plus);
        let m = polarization_vector(theta, phi, Helicity::Minus);
        for j in 0..3 {
            for l in 0..3 {
                let sum = p.components()[j] * p.components()[l].conj()
                    + m.components()[j] * m.components()[l].conj();
                let delta = if j == l { 1.0 } else { 0.0 };
                prop_assert!((sum - Complex64::new(delta - k[j] * k[l], 0.0)).norm() < 1e-12);
            }
        }
        for e in [p, m] {
            prop_assert!(e.transversality().norm() < 1e-12);
            prop_assert!((e.components().norm() - 1.0).abs() < 1e-12);
        }
        // eps(k, -) = -eps*(k, +)
        prop_assert!((m.components() + p.conj()).norm() < 1e-15);
    }

    #[test]
    fn plane_normal_equivariance(d in interior_point(), o in orientation()) {
        prop_assume!(d.x3() < 1.0 - 1e-6);
        let t = build_event(d, o).unwrap();
        let n = plane_normal(&t).unwrap();
        prop_assert!((n - o.rotation() * Vec3::z()).amax() < 1e-10);
        for k in t.directions() {
            prop_assert!(n.dot(k).abs() < 1e-10);
        }
    }

    #[test]
    fn orientation_is_canonical(a in -20.0..20.0f64, b in -20.0..20.0f64, g in -20.0..20.0f64) {
        let o = Orientation::new(a, b, g);
        prop_assert!((0.0..std::f64::consts::TAU).contains(&o.alpha()));
        prop_assert!((0.0..std::f64::consts::TAU).contains(&o.gamma()));
        prop_assert!((0.0..=std::f64::consts::PI).contains(&o.beta()));
        let raw = nalgebra::Rotation3::from_axis_angle(&Vec3::z_axis(), a)
            * nalgebra::Rotation3::from_axis_angle(&Vec3::y_axis(), b)
            * nalgebra::Rotation3::from_axis_angle(&Vec3::z_axis(), g);
        prop_assert!((raw.matrix() - o.rotation().matrix()).amax() < 1e-12);
    }
}

#[test]
fn mercedes_configuration() {
    let t = build_event(DalitzPoint::symmetric(), Orientation::identity()).unwrap();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        assert_abs_diff_eq!(t.directions()[i].dot(&t.directions()[j]), -0.5, epsilon = 1e-15);
    }
    assert_abs_diff_eq!(f_factor(&t, 1, 2).unwrap(), 1.5, epsilon = 1e-15);
    for (theta, _) in t.angles() {
        assert_abs_diff_eq!(theta, std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
    }
    assert_eq!(t.directions()[0], Vec3::x());
}

#[test]
fn collinear_boundary() {
    let t = build_event(DalitzPoint::new(1.0, 0.5).unwrap(), Orientation::identity()).unwrap();
    assert_abs_diff_eq!(t.directions()[1].dot(&t.directions()[2]), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(t.directions()[0].dot(&t.directions()[1]), -1.0, epsilon = 1e-15);
    assert_eq!(f_factor(&t, 2, 3).unwrap(), 0.0);
    assert_eq!(f_factor(&t, 1, 2).unwrap(), 2.0);
    // photons 1 and 2 back to back: no plane
    assert!(matches!(plane_normal(&t), Err(opsent::Error::DegenerateKinematics(_))));
}

#[test]
fn soft_photon_is_degenerate() {
    let d = DalitzPoint::new(0.0, 1.0).unwrap();
    let err = build_event(d, Orientation::identity()).unwrap_err();
    assert!(err.to_string().contains("photon 1"), "{err}");
    assert!(build_event(DalitzPoint::new(1e-10, 1.0).unwrap(), Orientation::identity()).is_err());
}

#[test]
fn index_errors() {
    let t = build_event(DalitzPoint::symmetric(), Orientation::identity()).unwrap();
    assert!(matches!(f_factor(&t, 1, 1), Err(opsent::Error::Index { i: 1, j: 1 })));
    assert!(f_factor(&t, 0, 2).is_err());
    assert!(f_factor(&t, 2, 4).is_err());
}

#[test]
fn dalitz_sampling_corners() {
    assert_eq!(dalitz_sample(1.0, 1.0).fractions(), [1.0, 1.0, 0.0]);
    let mid = dalitz_sample(2.0 / 3.0, 2.0 / 3.0);
    assert_abs_diff_eq!(mid.x3(), 2.0 / 3.0, epsilon = 1e-15);
}

#[test]
fn dalitz_sampling_is_uniform() {
    // 10x10 cells of the unit square; the triangle covers the 45 cells
    // above the diagonal fully and the 10 diagonal cells by half
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut counts = [[0usize; 10]; 10];
    for _ in 0..n {
        let d = dalitz_sample(rng.random(), rng.random());
        let i = ((d.x1() * 10.0) as usize).min(9);
        let j = ((d.x2() * 10.0) as usize).min(9);
        counts[i][j] += 1;
    }
    let area_total = 0.5;
    let mut chi2 = 0.0;
    let mut cells = 0;
    for i in 0..10 {
        for j in 0..10 {
            let area = match (i + j).cmp(&9) {
                std::cmp::Ordering::Greater => 0.01,
                std::cmp::Ordering::Equal => 0.005,
                std::cmp::Ordering::Less => 0.0,
            };
            if area == 0.0 {
                assert_eq!(counts[i][j], 0);
                continue;
            }
            let expected = n as f64 * area / area_total;
            let sigma = (expected * (1.0 - area / area_total)).sqrt();
            let dev = counts[i][j] as f64 - expected;
            assert!(
                dev.abs() < 3.0 * sigma,
                "cell ({i},{j}): {} vs {expected}",
                counts[i][j]
            );
            chi2 += dev * dev / expected;
            cells += 1;
        }
    }
    // 54 degrees of freedom; 99.9% quantile is about 95
    assert!(chi2 < 95.0, "chi2 = {chi2} over {cells} cells");
}

#[test]
fn pole_polarization() {
    let e = polarization_vector(0.0, 0.0, Helicity::Plus);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let expected = [
        Complex64::new(-s, 0.0),
        Complex64::new(0.0, -s),
        Complex64::new(0.0, 0.0),
    ];
    for k in 0..3 {
        assert!((e.components()[k] - expected[k]).norm() < 1e-15);
    }
    let t = build_event(DalitzPoint::new(0.8, 0.7).unwrap(), Orientation::new(0.0, 0.0, 0.0)).unwrap();
    let (_, phi) = direction_angles(&Vec3::z());
    assert_eq!(phi, 0.0);
    assert_eq!(t.angles_of(0).1, 0.0);
}

#[test]
fn json_roundtrip() {
    let t = build_event(DalitzPoint::new(0.81, 0.64).unwrap(), Orientation::new(0.3, 2.1, 5.9)).unwrap();
    let js = serde_json::to_string(&t).unwrap();
    let back: PhotonTriple = serde_json::from_str(&js).unwrap();
    assert_eq!(back, t);

    let d: DalitzPoint = serde_json::from_str(r#"{"x1": 0.9, "x2": 0.5}"#).unwrap();
    assert_eq!(d.x1(), 0.9);
    assert!(serde_json::from_str::<DalitzPoint>(r#"{"x1": 0.9, "x2": 0.5, "x3": 0.6}"#).is_err());
    assert!(serde_json::from_str::<DalitzPoint>(r#"{"x1": 0.2, "x2": 0.5}"#).is_err());
    let o: Orientation = serde_json::from_str(r#"{"alpha": -1.0, "beta": 0.5, "gamma": 7.0}"#).unwrap();
    assert!(o.alpha() > 0.0 && o.gamma() < std::f64::consts::TAU);
}

#[test]
fn relabeling_keeps_the_event() {
    let t = build_event(DalitzPoint::new(0.9, 0.75).unwrap(), Orientation::new(1.0, 0.4, 2.0)).unwrap();
    let p = t.permuted([2, 0, 1]).unwrap();
    assert_eq!(p.energies(), [t.energies()[2], t.energies()[0], t.energies()[1]]);
    assert!(p.momentum_residual() < 1e-12);
    assert!(t.permuted([0, 0, 1]).is_err());
}
