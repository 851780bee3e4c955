use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xysteer::linalg::Mat4;
use xysteer::qstate::{partial_transpose_b, TwoQubitState};

fn random_x_state(rng: &mut impl Rng) -> TwoQubitState {
    loop {
        let mut c = || rng.gen_range(-1.0..=1.0);
        let (z1, z2, zz, xx, yy) = (c(), c(), c(), c(), c());
        if let Ok(s) = TwoQubitState::from_pauli(z1, z2, zz, xx, yy) {
            return s;
        }
    }
}

fn random_qubit_state(rng: &mut impl Rng) -> [[Complex64; 2]; 2] {
    // Uniform in the Bloch ball.
    let v = loop {
        let v = [0; 3].map(|_| rng.gen_range(-1.0..=1.0));
        if v.iter().map(|x: &f64| x * x).sum::<f64>() <= 1.0 {
            break v;
        }
    };
    let c = |re, im| Complex64::new(re, im);
    [
        [c(0.5 * (1.0 + v[2]), 0.0), c(0.5 * v[0], -0.5 * v[1])],
        [c(0.5 * v[0], 0.5 * v[1]), c(0.5 * (1.0 - v[2]), 0.0)],
    ]
}

fn random_separable(rng: &mut impl Rng) -> TwoQubitState {
    let terms = rng.gen_range(1..=4);
    let weights: Vec<f64> = (0..terms).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = Mat4::zeros();
    for w in weights {
        let a = random_qubit_state(rng);
        let b = random_qubit_state(rng);
        m = m + Mat4::kron(&a, &b).scale(w / total);
    }
    // Restore exact Hermiticity lost to rounding.
    let m = (m + m.adjoint()).scale(0.5);
    TwoQubitState::from_matrix(m).expect("separable mixture is a state")
}

#[test]
fn x_state_closed_form_matches_eigensolver() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let s = random_x_state(&mut rng);
        let closed = s.pt_eigenvalues().values();
        let generic = s.pt_eigenvalues_generic().values();
        for (a, b) in closed.iter().zip(generic) {
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst <= 1e-10, "largest disagreement {worst:e}");
}

#[test]
fn separable_states_have_nonnegative_steerability() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for i in 0..10_000 {
        let s = random_separable(&mut rng);
        let pt = s.pt_eigenvalues();
        assert!(
            pt.values()[0] >= -1e-12,
            "sample {i}: separable state is NPT"
        );
        assert!(
            pt.steerability() >= -1e-12,
            "sample {i}: S = {}",
            pt.steerability()
        );
    }
}

#[test]
fn negative_steerability_implies_entanglement() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut seen = 0;
    for _ in 0..10_000 {
        let s = random_x_state(&mut rng);
        if s.steerability() < 0.0 {
            seen += 1;
            assert!(s.concurrence() > 0.0);
        }
    }
    assert!(
        seen > 100,
        "too few steerable samples ({seen}) to exercise the property"
    );
}

#[test]
fn werner_steerability_crosses_zero_at_one_half() {
    // p|Φ⁺⟩⟨Φ⁺| + (1 − p) I/4
    let s_of = |p: f64| {
        TwoQubitState::from_pauli(0.0, 0.0, p, p, -p)
            .unwrap()
            .steerability()
    };
    let (mut lo, mut hi) = (0.2, 0.9);
    assert!(s_of(lo) > 0.0 && s_of(hi) < 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if s_of(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((lo - 0.5).abs() < 1e-8, "crossing at {lo}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn partial_transpose_is_an_involution(
        z1 in -1.0f64..=1.0, z2 in -1.0f64..=1.0, zz in -1.0f64..=1.0,
        xx in -1.0f64..=1.0, yy in -1.0f64..=1.0,
    ) {
        let m = xysteer::qstate::PauliCorrelations { z1, z2, zz, xx, yy, xy: 0.3 * xx, yx: -0.2 * yy }
            .to_matrix();
        prop_assert!(partial_transpose_b(&partial_transpose_b(&m)).max_abs_diff(&m) == 0.0);
    }

    #[test]
    fn pt_spectrum_sums_to_one(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_separable(&mut rng);
        let sum: f64 = s.pt_eigenvalues().values().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-10);
        let x = random_x_state(&mut rng);
        let sum: f64 = x.pt_eigenvalues().values().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-10);
    }

    #[test]
    fn steerability_is_symmetric_in_the_two_smallest(a in 0.0f64..0.5, b in 0.0f64..0.5) {
        use xysteer::qstate::PtEigenvalues;
        let rest = (1.0 - a - b) / 2.0;
        let s1 = PtEigenvalues::from_unsorted([a, b, rest, rest]).steerability();
        let s2 = PtEigenvalues::from_unsorted([b, a, rest, rest]).steerability();
        prop_assert_eq!(s1, s2);
    }
}
