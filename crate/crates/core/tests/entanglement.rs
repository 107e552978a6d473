#![allow(clippy::needless_range_loop)]

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use opsent::amplitude::{state_tensor, Basis, SpinProjection, StateTensor};
use opsent::entanglement::*;
use opsent::kinematics::{build_event, dalitz_sample, DalitzPoint, Orientation};
use proptest::prelude::*;

/// Hyperdeterminant as the discriminant of `det(A0 + x A1)` in `x`, with
/// `A_i[j][k] = a[4i + 2j + k]`.
fn discriminant_oracle(a: &[Complex64; 8]) -> Complex64 {
    let det = |m: [Complex64; 4]| m[0] * m[3] - m[1] * m[2];
    let a0 = [a[0], a[1], a[2], a[3]];
    let a1 = [a[4], a[5], a[6], a[7]];
    let d0 = det(a0);
    let d2 = det(a1);
    // det(A0 + x A1) = d0 + d1 x + d2 x^2
    let d1 = a0[0] * a1[3] + a1[0] * a0[3] - a0[1] * a1[2] - a1[1] * a0[2];
    d1 * d1 - d0 * d2 * 4.0
}

fn complex8() -> impl Strategy<Value = [Complex64; 8]> {
    prop::array::uniform8((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(r, i)| Complex64::new(r, i)))
        .prop_filter("zero", |a| a.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3)
}

/// Random 2x2 unitary from Euler-type parameters.
fn unitary() -> impl Strategy<Value = Matrix2> {
    (0.0..6.3f64, 0.0..6.3f64, 0.0..6.3f64, 0.0..6.3f64).prop_map(|(t, p, q, g)| {
        let e = |x: f64| Complex64::from_polar(1.0, x);
        let (s, c) = t.sin_cos();
        [[e(g + p) * c, e(g + q) * s], [-e(g - q) * s, e(g - p) * c]]
    })
}

fn normalized(a: &[Complex64; 8]) -> [Complex64; 8] {
    let n = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    a.map(|c| c / n)
}

proptest! {
    #[test]
    fn cayley_matches_discriminant(a in complex8()) {
        let h = cayley(&a);
        let o = discriminant_oracle(&a);
        prop_assert!((h - o).norm() < 1e-12 * (1.0 + o.norm()));
    }

    #[test]
    fn hdet_local_unitary_invariance(a in complex8(), u1 in unitary(), u2 in unitary(), u3 in unitary()) {
        let s = StateTensor::new(Basis::Linear, a);
        let h = hyperdeterminant(&s).unwrap();
        let moved = StateTensor::new(Basis::Linear, apply_local(&a, [&u1, &u2, &u3]));
        let hm = hyperdeterminant(&moved).unwrap();
        prop_assert!((h.norm() - hm.norm()).abs() < 1e-10);
        prop_assert!(h.norm() <= 0.25 + 1e-12);
    }

    #[test]
    fn basis_round_trip(a in complex8()) {
        let s = StateTensor::new(Basis::Circular, a);
        let l = to_linear_basis(&s).unwrap();
        prop_assert_eq!(l.basis(), Basis::Linear);
        prop_assert!((l.norm() - s.norm()).abs() < 1e-14 * s.norm().max(1.0));
        let back = to_circular_basis(&l).unwrap();
        for k in 0..8 {
            prop_assert!((back.amplitude(k) - a[k]).norm() < 1e-13);
        }
    }

    #[test]
    fn schmidt_squares_sum_to_one(a in complex8()) {
        let s = StateTensor::new(Basis::Linear, a);
        for cut in Cut::ALL {
            let [s1, s2] = bipartition_schmidt(&s, cut).unwrap();
            prop_assert!(s1 >= s2 && s2 >= 0.0);
            prop_assert!((s1 * s1 + s2 * s2 - 1.0).abs() < 1e-12);
        }
        let r = classify(&s, &Tolerances::default()).unwrap();
        let h = cayley(&normalized(&a));
        prop_assert!((r.three_tangle - (4.0 * h.norm()).min(1.0)).abs() < 1e-12);
    }

    #[test]
    fn decay_state_class_is_basis_independent(u1 in 0.0..1.0f64, u2 in 0.0..1.0f64, a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64, k in 0usize..3) {
        let Ok(t) = build_event(dalitz_sample(u1, u2), Orientation::from_unit(a, b, c)) else {
            return Ok(());
        };
        let s = state_tensor(&t, SpinProjection::ALL[k]).unwrap();
        let tol = Tolerances::default();
        let rc = classify(&s, &tol).unwrap();
        let rl = classify(&to_linear_basis(&s).unwrap(), &tol).unwrap();
        prop_assert_eq!(rc.class, rl.class);
        prop_assert!((rc.three_tangle - rl.three_tangle).abs() < 1e-12);
    }
}

#[test]
fn anchors() {
    assert_abs_diff_eq!(hyperdeterminant(&StateTensor::ghz()).unwrap().re, 0.25, epsilon = 1e-15);
    assert_eq!(hyperdeterminant(&StateTensor::w()).unwrap().norm(), 0.0);
    assert_eq!(three_tangle(&StateTensor::basis_ket(Basis::Linear, 0)).unwrap(), 0.0);
    for cut in Cut::ALL {
        let [s1, s2] = bipartition_schmidt(&StateTensor::ghz(), cut).unwrap();
        assert_abs_diff_eq!(s1, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s2, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(
            bipartition_schmidt(&StateTensor::basis_ket(Basis::Linear, 0), cut).unwrap(),
            [1.0, 0.0]
        );
    }
    let tol = Tolerances::default();
    assert_eq!(
        classify(&StateTensor::w(), &tol).unwrap().class,
        EntanglementClass::WClass
    );
    assert_eq!(
        classify(&StateTensor::ghz(), &tol).unwrap().class,
        EntanglementClass::GhzClass
    );
    assert_eq!(
        classify(&StateTensor::basis_ket(Basis::Circular, 3), &tol)
            .unwrap()
            .class,
        EntanglementClass::Product
    );
}

#[test]
fn symmetric_point_tangle() {
    // alpha0 = beta0 = gamma0 makes the linear-basis state
    // (i/sqrt 6)(|010> + |100> + |001> + 3|111>) / sqrt 2 up to normalization;
    // the discriminant oracle on it gives 1/12, so tau = 1/3
    let t = build_event(DalitzPoint::symmetric(), Orientation::identity()).unwrap();
    let s = state_tensor(&t, SpinProjection::Zero).unwrap();
    let mut lin = [Complex64::new(0.0, 0.0); 8];
    for (idx, v) in [(0b010, 1.0), (0b100, 1.0), (0b001, 1.0), (0b111, 3.0)] {
        lin[idx] = Complex64::new(0.0, v);
    }
    let oracle = discriminant_oracle(&normalized(&lin));
    assert_abs_diff_eq!(oracle.norm(), 1.0 / 12.0, epsilon = 1e-15);
    assert_abs_diff_eq!(three_tangle(&s).unwrap(), 1.0 / 3.0, epsilon = 1e-14);
    let l = to_linear_basis(&s).unwrap().normalized().unwrap();
    let expected = normalized(&lin);
    let (g, _) = opsent::amplitude::global_factor(&l, &StateTensor::new(Basis::Linear, expected));
    for k in 0..8 {
        assert!((l.amplitude(k) - g * expected[k]).norm() < 1e-14);
    }
}

#[test]
fn sz0_linear_support() {
    let (a, b, g) = (0.3, 0.5, 0.7);
    let l = to_linear_basis(&s_z0_state(a, b, g)).unwrap();
    let i = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    let expected = [
        (0b001, a + b - g),
        (0b010, a - b + g),
        (0b100, -a + b + g),
        (0b111, a + b + g),
    ];
    let mut support = [false; 8];
    for (idx, v) in expected {
        support[idx] = true;
        assert!((l.amplitude(idx) - i * v).norm() < 1e-15, "{idx:03b}");
    }
    for k in 0..8 {
        if !support[k] {
            assert!(l.amplitude(k).norm() < 1e-15);
        }
    }
}

#[test]
fn product_formula_constant() {
    // one-parameter family on the unit-norm sphere
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let u = k as f64 / 199.0;
        let (a, b, g) = ((3.0 * u).cos(), (5.0 * u + 0.3).sin(), 0.4 - u);
        let n = (2.0 * (a * a + b * b + g * g)).sqrt();
        let (a, b, g) = (a / n, b / n, g / n);
        let l = to_linear_basis(&s_z0_state(a, b, g)).unwrap();
        let oracle = discriminant_oracle(l.amplitudes());
        let product = S_Z0_PRODUCT_FACTOR * s_z0_hdet_product(a, b, g);
        worst = worst.max((oracle - Complex64::new(product, 0.0)).norm());
    }
    assert!(worst < 1e-9, "{worst}");
    let c = 0.5 / 1.5f64.sqrt();
    assert_abs_diff_eq!(s_z0_hdet_product(c, c, c), -3.0 * c.powi(4), epsilon = 1e-16);
    assert_eq!(s_z0_hdet_product(1.0, 0.0, 0.0), 1.0);
    assert_eq!(s_z0_hdet_product(0.4, 0.4, 0.0), 0.0);
}

#[test]
fn factorizing_cases() {
    let tol = Tolerances::default();
    let cases = [
        ((1.0, 0.0, 1.0), Cut::Two),
        ((1.0, 0.0, -1.0), Cut::Two),
        ((1.0, 1.0, 0.0), Cut::Three),
        ((1.0, -1.0, 0.0), Cut::Three),
        ((0.0, 1.0, 1.0), Cut::One),
        ((0.0, 1.0, -1.0), Cut::One),
    ];
    for ((a, b, g), cut) in cases {
        let s = s_z0_state(a, b, g);
        let r = classify(&s, &tol).unwrap();
        assert_eq!(r.class, EntanglementClass::Biseparable(cut), "({a}, {b}, {g})");
        assert!(bipartition_schmidt(&s, cut).unwrap()[1] < 1e-9);
        assert!(r.three_tangle < 1e-15);
    }
}

#[test]
fn collinear_decay_is_biseparable() {
    let tol = Tolerances::default();
    for s in SpinProjection::ALL {
        // photons 1 and 2 collinear, photon 3 opposite
        let t = build_event(DalitzPoint::new(0.7, 0.3).unwrap(), Orientation::identity()).unwrap();
        let r = classify(&state_tensor(&t, s).unwrap(), &tol).unwrap();
        assert_eq!(r.class, EntanglementClass::Biseparable(Cut::Three), "{s}");
        assert!(r.singular_values[2][1] < 1e-9);
    }
}

#[test]
fn basis_tags_are_enforced() {
    let l = StateTensor::basis_ket(Basis::Linear, 1);
    assert!(matches!(to_linear_basis(&l), Err(opsent::Error::Basis(_))));
    let c = StateTensor::basis_ket(Basis::Circular, 1);
    assert!(matches!(to_circular_basis(&c), Err(opsent::Error::Basis(_))));
}

#[test]
fn plus_plus_plus_in_linear_basis() {
    let l = to_linear_basis(&StateTensor::basis_ket(Basis::Circular, 0)).unwrap();
    assert_abs_diff_eq!(l.norm(), 1.0, epsilon = 1e-15);
    let i = Complex64::i();
    for k in 0..8 {
        let ones = (k as u32).count_ones() as i32;
        let expected = i.powi(ones) / 8f64.sqrt();
        assert!((l.amplitude(k) - expected).norm() < 1e-15);
    }
}

#[test]
fn report_json_roundtrip() {
    let r = classify(&StateTensor::w(), &Tolerances::default()).unwrap();
    let js = serde_json::to_string(&r).unwrap();
    assert!(js.contains("\"W_CLASS\""));
    let back: EntanglementReport = serde_json::from_str(&js).unwrap();
    assert_eq!(back, r);
    let t = Tolerances {
        rank: 0.0,
        tangle: 1e-10,
    };
    assert!(classify(&StateTensor::w(), &t).is_err());
}
