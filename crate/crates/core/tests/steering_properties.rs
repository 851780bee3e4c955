use nalgebra::{Rotation3, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xysteer::linalg::Mat4;
use xysteer::qstate::TwoQubitState;
use xysteer::steering::{
    lhs_bound, optimize_orientation, quantum_value, rotate_bob, violation, AxisSet,
    CorrelationMatrix, Orientation,
};

/// Product-state maxima are quoted to four figures; the ten-setting maximum
/// is 0.5236065, just above the quoted 0.5236.
const BOUND_ROUNDING: f64 = 1e-5;

fn pure_qubit(theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let a = Complex64::new(c, 0.0);
    let b = Complex64::from_polar(s, phi);
    [[a * a.conj(), a * b.conj()], [b * a.conj(), b * b.conj()]]
}

fn random_pure_product(rng: &mut impl Rng) -> TwoQubitState {
    let mut angles = || {
        (
            rng.gen_range(0.0..std::f64::consts::PI),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
    };
    let (ta, pa) = angles();
    let (tb, pb) = angles();
    let m = Mat4::kron(&pure_qubit(ta, pa), &pure_qubit(tb, pb));
    TwoQubitState::from_matrix((m + m.adjoint()).scale(0.5)).unwrap()
}

fn random_x_state(rng: &mut impl Rng) -> TwoQubitState {
    loop {
        let mut c = || rng.gen_range(-1.0..=1.0);
        if let Ok(s) = TwoQubitState::from_pauli(c(), c(), c(), c(), c()) {
            return s;
        }
    }
}

fn random_rotation(rng: &mut impl Rng) -> Rotation3<f64> {
    let axis = Vector3::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    Rotation3::from_axis_angle(
        &nalgebra::Unit::new_normalize(axis),
        rng.gen_range(0.0..std::f64::consts::PI),
    )
}

#[test]
fn product_states_respect_the_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0201);
    for n in [2, 3, 10] {
        let axes = AxisSet::canonical(n).unwrap();
        let bound = lhs_bound(n).unwrap();
        let mut best: f64 = 0.0;
        for _ in 0..60 {
            let s = random_pure_product(&mut rng);
            best = best.max(quantum_value(&s, &axes, Orientation::Optimize));
        }
        assert!(best <= bound + BOUND_ROUNDING, "n = {n}: {best} > {bound}");
        // Optimizing over orientation reaches the bound for product states.
        assert!(
            best >= bound - BOUND_ROUNDING,
            "n = {n}: {best} well below {bound}"
        );
    }
}

#[test]
fn optimized_value_dominates_fixed_orientations() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0202);
    let axes = AxisSet::canonical(10).unwrap();
    for _ in 0..50 {
        let s = random_x_state(&mut rng);
        let best = quantum_value(&s, &axes, Orientation::Optimize);
        assert!(best >= quantum_value(&s, &axes, Orientation::Canonical) - 1e-12);
        for _ in 0..5 {
            let r = random_rotation(&mut rng);
            assert!(best >= quantum_value(&s, &axes, Orientation::Fixed(r)) - 1e-9);
        }
    }
}

#[test]
fn bob_rotation_moves_the_axes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0203);
    for n in [2, 3, 10] {
        let axes = AxisSet::canonical(n).unwrap();
        for _ in 0..50 {
            let s = random_x_state(&mut rng);
            let r = random_rotation(&mut rng);
            let rotated = rotate_bob(&s, &r).unwrap();
            // T' = T Rᵀ, so evaluating T' on n equals evaluating T on Rᵀ n.
            let lhs = quantum_value(&rotated, &axes, Orientation::Canonical);
            let rhs = quantum_value(&s, &axes, Orientation::Fixed(r.inverse()));
            assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
            let t = CorrelationMatrix::from_state(&s);
            let t_rot = CorrelationMatrix::from_state(&rotated);
            assert!((t_rot.singular_values() - t.singular_values()).norm() < 1e-10);
        }
    }
}

#[test]
fn optimum_is_invariant_under_bob_rotations() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0204);
    let axes = AxisSet::canonical(10).unwrap();
    for _ in 0..20 {
        let s = random_x_state(&mut rng);
        let rotated = rotate_bob(&s, &random_rotation(&mut rng)).unwrap();
        let a = quantum_value(&s, &axes, Orientation::Optimize);
        let b = quantum_value(&rotated, &axes, Orientation::Optimize);
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn optimizer_returns_a_rotation() {
    let s = TwoQubitState::from_pauli(0.1, 0.1, 0.5, -0.7, 0.2).unwrap();
    let t = CorrelationMatrix::from_state(&s);
    let axes = AxisSet::canonical(10).unwrap();
    let (r, v) = optimize_orientation(&t, &axes);
    let m = r.matrix();
    assert!((m.transpose() * m - nalgebra::Matrix3::identity()).norm() < 1e-12);
    assert!((m.determinant() - 1.0).abs() < 1e-12);
    assert_eq!(t.value(&axes, &r), v);
}

#[test]
fn maximally_entangled_states_violate_every_inequality() {
    let bell = TwoQubitState::from_pauli(0.0, 0.0, 1.0, 1.0, -1.0).unwrap();
    for n in [2, 3, 10] {
        let v = violation(&bell, n).unwrap();
        assert!(v.violated && (v.value - 1.0).abs() < 1e-12);
    }
}

#[test]
fn custom_axes_without_bound_cannot_be_tested() {
    let (axes, _) = AxisSet::custom(&[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]], None).unwrap();
    let bell = TwoQubitState::from_pauli(0.0, 0.0, 1.0, 1.0, -1.0).unwrap();
    assert!(xysteer::steering::violation_with(&bell, &axes).is_err());
    assert!(AxisSet::custom(&[], None).is_err());
    assert!(AxisSet::custom(&[[0.0, 0.0, 0.0]], None).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn correlation_singular_values_are_at_most_one(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_x_state(&mut rng);
        let s = rotate_bob(&s, &random_rotation(&mut rng)).unwrap();
        let sv = CorrelationMatrix::from_state(&s).singular_values();
        prop_assert!(sv.max() <= 1.0 + 1e-12);
    }

    #[test]
    fn axes_are_normalized(x in -5.0f64..5.0, y in -5.0f64..5.0, z in 0.1f64..5.0) {
        let (axes, warnings) = AxisSet::custom(&[[x, y, z]], Some(0.5)).unwrap();
        prop_assert!((axes.axes()[0].norm() - 1.0).abs() < 1e-12);
        let norm = (x * x + y * y + z * z).sqrt();
        prop_assert_eq!(warnings.is_empty(), (norm - 1.0).abs() <= 1e-6);
    }
}
