//! Property-based invariants: exercised over randomized inputs rather than
//! hand-picked cases.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qae_core::acquire::{
    acquire_half_series, acquire_series, symmetrize, AcquisitionConfig, AcquisitionMode,
};
use qae_core::gates;
use qae_core::grover::{build_amplifier, StatePrep};
use qae_core::io::{fmt_f64, parse_f64};
use qae_core::statevec::{Circuit, GateOp, Ket};

fn random_single(rng: &mut ChaCha8Rng, target: usize) -> GateOp {
    let matrix = match rng.gen_range(0..6) {
        0 => gates::h(),
        1 => gates::x(),
        2 => gates::ry(rng.gen_range(-3.0..3.0)),
        3 => gates::rz(rng.gen_range(-3.0..3.0)),
        4 => gates::rx(rng.gen_range(-3.0..3.0)),
        _ => gates::phase(rng.gen_range(-3.0..3.0)),
    };
    GateOp::Single { target, matrix }
}

fn random_circuit(n: usize, depth: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut circuit = Circuit::new(n).unwrap();
    for _ in 0..depth {
        let target = rng.gen_range(0..n);
        let op = if n >= 2 && rng.gen_bool(0.4) {
            let mut control = rng.gen_range(0..n);
            while control == target {
                control = rng.gen_range(0..n);
            }
            GateOp::Cnot { control, target }
        } else {
            random_single(&mut rng, target)
        };
        circuit.push(op).unwrap();
    }
    circuit
}

fn random_ket(n: usize, seed: u64) -> Ket {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1usize << n;
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    Ket::from_amplitudes(amps.into_iter().map(|c| c / norm).collect()).unwrap()
}

fn max_amp_diff(a: &Ket, b: &Ket) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Text serialization of finite floats is bit-exact both ways.
    #[test]
    fn float_text_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let text = fmt_f64(v);
        let back = parse_f64(&text, 1).unwrap();
        prop_assert_eq!(back.to_bits(), v.to_bits());
    }

    /// A circuit followed by its adjoint restores any state.
    #[test]
    fn circuit_adjoint_is_inverse(
        n in 1usize..=4,
        depth in 0usize..=12,
        circuit_seed in any::<u64>(),
        ket_seed in any::<u64>(),
    ) {
        let circuit = random_circuit(n, depth, circuit_seed);
        let original = random_ket(n, ket_seed);
        let mut state = original.clone();
        state.apply_circuit(&circuit).unwrap();
        state.apply_circuit(&circuit.adjoint()).unwrap();
        prop_assert!(max_amp_diff(&state, &original) < 1e-10);
    }

    /// Applying powers j then k equals applying j + k in one shot.
    #[test]
    fn amplifier_powers_compose(
        theta in 0.05f64..1.5,
        j in -6i64..=6,
        k in -6i64..=6,
        ket_seed in any::<u64>(),
    ) {
        let (psi, phi) = StatePrep::theta_pair(2, theta).unwrap();
        let amp = build_amplifier(&psi, &phi).unwrap();
        let start = random_ket(2, ket_seed);
        let mut stepwise = start.clone();
        amp.apply_power(&mut stepwise, j).unwrap();
        amp.apply_power(&mut stepwise, k).unwrap();
        let mut direct = start;
        amp.apply_power(&mut direct, j + k).unwrap();
        prop_assert!(max_amp_diff(&stepwise, &direct) < 1e-10);
    }

    /// Decomposing multi-controlled gates preserves their action.
    #[test]
    fn mcz_mcx_decomposition_preserves_action(
        n in 3usize..=5,
        use_x in any::<bool>(),
        ket_seed in any::<u64>(),
    ) {
        let controls: Vec<usize> = (0..n - 1).collect();
        let target = n - 1;
        let op = if use_x {
            GateOp::Mcx { controls, target }
        } else {
            GateOp::Mcz { controls, target }
        };
        let mut circuit = Circuit::new(n).unwrap();
        circuit.push(op).unwrap();

        let start = random_ket(n, ket_seed);
        let mut primitive = start.clone();
        primitive.apply_circuit(&circuit).unwrap();
        let mut decomposed = start;
        decomposed.apply_circuit(&circuit.decompose()).unwrap();
        prop_assert!(max_amp_diff(&primitive, &decomposed) < 1e-10);
    }

    /// Half-range acquisition plus mirroring reproduces the two-sided series.
    /// In exact mode the whole series must agree (the backward evolution is
    /// the conjugate of the forward one); under shot sampling the negative
    /// times of a full acquisition are independent draws, so only the shared
    /// non-negative half is compared sample-by-sample, plus the mirror's
    /// conjugate structure.
    #[test]
    fn symmetrized_half_series_matches_full(
        theta in 0.05f64..1.5,
        m in 1i64..=6,
        sampled in any::<bool>(),
    ) {
        let (psi, phi) = StatePrep::theta_pair(2, theta).unwrap();
        let amp = build_amplifier(&psi, &phi).unwrap();
        let mut cfg = AcquisitionConfig::exact_overlap(m, 12, 0.08).unwrap();
        if sampled {
            cfg.mode = AcquisitionMode::HadamardTest;
            cfg = cfg.with_shots(256, 17);
        }
        let full = acquire_series(&amp, &cfg).unwrap();
        let mirrored = symmetrize(&acquire_half_series(&amp, &cfg).unwrap()).unwrap();
        prop_assert_eq!(full.samples().len(), mirrored.samples().len());
        for (a, b) in full.samples().iter().zip(mirrored.samples()) {
            prop_assert_eq!(a.t, b.t);
            if !sampled || a.t >= 0 {
                prop_assert!((a.raw - b.raw).norm() < 1e-12);
                prop_assert!((a.windowed - b.windowed).norm() < 1e-12);
            }
        }
        // The mirrored half must be conjugate-symmetric by construction.
        for s in mirrored.samples() {
            if s.t > 0 {
                let partner = mirrored
                    .samples()
                    .iter()
                    .find(|p| p.t == -s.t)
                    .expect("mirror sample");
                prop_assert!((partner.raw - s.raw.conj()).norm() < 1e-12);
            }
        }
    }
}
