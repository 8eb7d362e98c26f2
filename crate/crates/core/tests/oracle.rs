//! Decomposition checked against the brute-force controlled-gate semantics.

use std::f64::consts::PI;

use mcu_forge_core::circuit::asap_layers;
use mcu_forge_core::sim::DenseUnitary;
use mcu_forge_core::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn oracle_error(c: &Circuit, spec: &McGateSpec) -> f64 {
    circuit_unitary(c)
        .unwrap()
        .max_abs_diff(&oracle_unitary(spec).unwrap())
}

fn with_phase(u: Unitary2, phase: f64) -> Unitary2 {
    let g = Complex64::from_polar(1.0, phase);
    Unitary2::new(u.entries().map(|z| z * g)).unwrap()
}

#[test]
fn fixed_targets_match_oracle() {
    let fixed = [
        Unitary2::x(),
        Unitary2::h(),
        Unitary2::y(),
        Unitary2::z(),
        Unitary2::identity(),
        Unitary2::rx(PI).unwrap(),
        Unitary2::phase(0.37).unwrap(),
        with_phase(Unitary2::h(), -2.2),
    ];
    for n in 0..=7 {
        for u in fixed {
            let spec = McGateSpec::new(n, u);
            let err = oracle_error(&build_cnu(&spec), &spec);
            assert!(err < 1e-9, "n = {n}, u = {u:?}: {err:e}");
        }
    }
}

#[test]
fn u2_targets_with_global_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xface);
    for n in 2..=7 {
        for _ in 0..5 {
            let u = with_phase(Unitary2::haar_su2(&mut rng), rng.gen_range(-PI..PI));
            let spec = McGateSpec::new(n, u);
            assert!(oracle_error(&build_cnu(&spec), &spec) < 1e-9);
        }
    }
}

#[test]
fn inactive_controls_leave_basis_states_alone() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 1..=7 {
        let u = Unitary2::haar_su2(&mut rng);
        let c = build_cnu(&McGateSpec::new(n, u));
        let width = n + 1;
        let controls_on = ((1usize << width) - 1) & !1;
        for idx in 0..1usize << width {
            if idx & controls_on == controls_on {
                continue;
            }
            let out = run(&c, &Statevector::basis(width, idx)).unwrap();
            assert!(
                out.distance(&Statevector::basis(width, idx)) < 1e-9,
                "n = {n}, input {idx:b}"
            );
        }
    }
}

#[test]
fn q_maps_all_ones_to_minus_i_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for n in 2..=6 {
        let q = build_q(n).unwrap();
        // Embed Q_n on the first n wires of an (n+1)-wire register; last wire holds psi.
        let mut wide = Circuit::new(n + 1, "Q");
        wide.append(&q).unwrap();
        let psi = Statevector::random(1, &mut rng);
        let ones = ((1usize << n) - 1) << 1;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (n + 1)];
        amps[ones] = psi.amplitudes()[0];
        amps[ones | 1] = psi.amplitudes()[1];
        let input = Statevector::from_amplitudes(n + 1, amps).unwrap();
        let out = run(&wide, &input).unwrap();

        let factor = Complex64::new(0.0, -1.0).powu((n - 1) as u32);
        let first_only = 1usize << n;
        let mut expected = vec![Complex64::new(0.0, 0.0); 1 << (n + 1)];
        expected[first_only] = factor * psi.amplitudes()[0];
        expected[first_only | 1] = factor * psi.amplitudes()[1];
        let expected = Statevector::from_amplitudes(n + 1, expected).unwrap();
        assert!(out.distance(&expected) < 1e-10, "n = {n}");
    }
}

#[test]
fn q_equals_cascade_of_multi_controlled_rx_pi() {
    // Q_n = C^1 Rx(pi) ... C^{n-1} Rx(pi) as an operator product, C^{n-1} acting first.
    let rx = Unitary2::rx(PI).unwrap();
    for n in 2..=7 {
        let q = build_q(n).unwrap();
        for idx in 0..1usize << n {
            let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
            amps[idx] = Complex64::new(1.0, 0.0);
            for k in (1..n).rev() {
                apply_prefix_controlled(&mut amps, n, k, &rx);
            }
            let expected = Statevector::from_amplitudes(n, amps).unwrap();
            let got = run(&q, &Statevector::basis(n, idx)).unwrap();
            assert!(got.distance(&expected) < 1e-10, "n = {n}, input {idx:b}");
        }
    }
}

/// `C^k m` with controls on wires `0..k` and target wire `k`, on an `n`-wire register.
fn apply_prefix_controlled(amps: &mut [Complex64], n: usize, k: usize, m: &Unitary2) {
    let bit = |w: usize| 1usize << (n - 1 - w);
    let controls: usize = (0..k).map(bit).sum();
    let target = bit(k);
    for i in 0..amps.len() {
        if i & controls == controls && i & target == 0 {
            let (a, b) = m.apply(amps[i], amps[i | target]);
            amps[i] = a;
            amps[i | target] = b;
        }
    }
}

#[test]
fn lowering_soundness_on_random_controlled_gates() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for i in 0..100 {
        let u = if i % 10 == 0 {
            with_phase(Unitary2::haar_su2(&mut rng), rng.gen_range(-PI..PI))
        } else {
            Unitary2::haar_su2(&mut rng)
        };
        let c = Circuit::with_gates(2, "", vec![Gate::controlled(0, 1, u)]).unwrap();
        let low = lower_controlled(&c);
        assert!(low.is_lowered());
        assert_eq!(low.count_controlled(), 2);
        assert!(low.len() - 2 <= 4);
        let err = circuit_unitary(&c)
            .unwrap()
            .max_abs_diff(&circuit_unitary(&low).unwrap());
        assert!(err < 1e-10, "gate {i}: {err:e}");
    }
}

#[test]
fn controlled_rx_half_pi_lowering() {
    let c = Circuit::with_gates(
        2,
        "",
        vec![Gate::controlled(0, 1, Unitary2::rx(PI / 2.0).unwrap())],
    )
    .unwrap();
    let low = lower_controlled(&c);
    assert_eq!(low.count_controlled(), 2);
    let err = circuit_unitary(&c)
        .unwrap()
        .max_abs_diff(&circuit_unitary(&low).unwrap());
    assert!(err < 1e-10);
}

#[test]
fn lowered_c3u_preserves_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let spec = McGateSpec::new(3, Unitary2::haar_su2(&mut rng));
    let low = lower_controlled(&build_cnu(&spec));
    assert!(oracle_error(&low, &spec) < 1e-9);
}

#[test]
fn lowered_depth_bounded_by_six_times_controlled() {
    for n in 1..=20 {
        let r = schedule_asap(&build_cnu(&McGateSpec::new(n, Unitary2::h())));
        assert!(r.depth_lowered <= 6 * r.depth_controlled, "n = {n}");
        assert_eq!(r.count_cx, 2 * r.count_controlled);
    }
}

#[test]
fn fig1_toffoli_six_qubits() {
    let spec = McGateSpec::new(5, Unitary2::x());
    let c = build_cnu(&spec);
    assert_eq!(c.width(), 6);
    assert_eq!(asap_layers(&c).1, 28);
    // Acts as a 6-qubit Toffoli on every basis state.
    for idx in 0..64usize {
        let out = run(&c, &Statevector::basis(6, idx)).unwrap();
        let expected = if idx >> 1 == 0b11111 { idx ^ 1 } else { idx };
        assert!(
            (out.amplitudes()[expected].norm() - 1.0).abs() < 1e-9,
            "{idx:06b}"
        );
    }
}

#[test]
fn invert_undoes_circuit() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for n in 1..=6 {
        let c = build_cnu(&McGateSpec::new(n, Unitary2::haar_su2(&mut rng)));
        let mut both = c.clone();
        both.append(&invert(&c)).unwrap();
        let u = circuit_unitary(&both).unwrap();
        assert!(u.max_abs_diff(&DenseUnitary::identity(n + 1)) < 1e-9);
        let twice = invert(&invert(&c));
        for (a, b) in twice.gates().iter().zip(c.gates()) {
            assert!(distance(a.matrix(), b.matrix(), false) <= 1e-12);
        }
    }
}

#[test]
fn faulty_root_branch_is_detected() {
    let spec = McGateSpec::new(4, Unitary2::x());
    let bad = build_cnu_with_branch(&spec, RootBranch::FaultySquareRoot);
    assert!(oracle_error(&bad, &spec) > 1e-3);
}

fn random_circuit(seed: u64, width: usize, len: usize) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(width, "");
    for _ in 0..len {
        let t = rng.gen_range(0..width);
        if width > 1 && rng.gen_bool(0.5) {
            let mut ctl = rng.gen_range(0..width - 1);
            if ctl >= t {
                ctl += 1;
            }
            c.push(Gate::cx(ctl, t)).unwrap();
        } else {
            c.push(Gate::single(t, Unitary2::h())).unwrap();
        }
    }
    c
}

proptest! {
    #[test]
    fn schedule_layers_are_valid(seed in any::<u64>(), width in 1usize..8, len in 0usize..60) {
        let c = random_circuit(seed, width, len);
        let r = schedule_asap(&c);
        prop_assert!(r.depth_controlled <= c.len());
        let gates = c.gates();
        for i in 0..gates.len() {
            for j in 0..i {
                let shares = gates[i].wires().any(|w| gates[j].wires().any(|v| v == w));
                if shares {
                    prop_assert!(r.layers[i] > r.layers[j]);
                }
                if r.layers[i] == r.layers[j] {
                    prop_assert!(!shares);
                }
            }
        }
    }

    #[test]
    fn json_roundtrip_exact(seed in any::<u64>(), n in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = build_cnu(&McGateSpec::new(n, Unitary2::haar_su2(&mut rng)));
        for circuit in [c.clone(), lower_controlled(&c)] {
            let back = Circuit::from_json(&circuit.to_json().unwrap()).unwrap();
            prop_assert_eq!(&back, &circuit);
        }
    }
}
