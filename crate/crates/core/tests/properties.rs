//! Randomized invariants of every module. Runs standalone with
//! `cargo test -p hyrep-core --test properties`.

use hyrep_core::channel::{
    amplitude_damping_channel, decoherence_factor, gamma_t_from_length, length_from_gamma_t, ChannelParams,
    LossChannel,
};
use hyrep_core::dynamics::{jcm_exact, tcm_exact, JcmParams, TcmParams};
use hyrep_core::entgen::{link_state, LinkState};
use hyrep_core::fockcore::{
    bell, coherent_overlap, concurrence, make_coherent, partial_trace, qop, quad_halfline_projector, CompositeState,
    FockOperator, FockVector, HalfLine, Qubit2, Subsystem, TwoQubitDensity, TwoQubitOp,
};
use hyrep_core::math::C64;
use hyrep_core::purify::{purify_n, purify_oracle_step, purify_step, purify_track_init};
use hyrep_core::rates::{attempts_avg, repeater_rate, RepeaterConfig};
use hyrep_core::swap::{bell_measurement_analytic, iterate_swaps, swap_fidelity_map, OUTCOMES};
use hyrep_core::dynamics::BellCoeffs;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn normalized(v: Vec<C64>) -> Vec<C64> {
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    v.into_iter().map(|c| c / n).collect()
}

fn qubit2() -> impl Strategy<Value = Qubit2> {
    prop::array::uniform4(complex()).prop_filter("nonzero", |v| v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3).prop_map(
        |v| {
            let n = normalized(v.to_vec());
            [n[0], n[1], n[2], n[3]]
        },
    )
}

/// Random mixture of up to three pure states.
fn density() -> impl Strategy<Value = TwoQubitDensity> {
    prop::collection::vec((qubit2(), 0.05..1.0f64), 1..4).prop_map(|parts| {
        let total: f64 = parts.iter().map(|(_, w)| w).sum();
        parts
            .iter()
            .fold(TwoQubitDensity::zero(), |acc, (v, w)| acc.plus(&TwoQubitDensity::from_pure(v).scaled(w / total)))
    })
}

fn unitary2(a: f64, b: f64, c: f64, d: f64) -> [[C64; 2]; 2] {
    // e^{ia} [[e^{ib} cos c, e^{id} sin c], [−e^{−id} sin c, e^{−ib} cos c]]
    let g = C64::from_polar(1.0, a);
    [
        [g * C64::from_polar(c.cos(), b), g * C64::from_polar(c.sin(), d)],
        [-g * C64::from_polar(c.sin(), -d), g * C64::from_polar(c.cos(), -b)],
    ]
}

fn max_diff(a: &TwoQubitOp, b: &TwoQubitOp) -> f64 {
    (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| (a[i][j] - b[i][j]).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    // fockcore

    #[test]
    fn coherent_overlap_matches_truncated(ar in -3.0..3.0f64, ai in -3.0..3.0f64, br in -3.0..3.0f64, bi in -3.0..3.0f64) {
        let (a, b) = (C64::new(ar, ai), C64::new(br, bi));
        let r = a.norm().max(b.norm());
        let dim = (r * r + 10.0 * r).ceil() as usize + 2;
        let va = make_coherent(a, dim).unwrap().state;
        let vb = make_coherent(b, dim).unwrap().state;
        let got = vb.inner(&va).unwrap();
        prop_assert!((got - coherent_overlap(a, b)).norm() < 1e-8);
    }

    #[test]
    fn halfline_projectors(phase in -3.2..3.2f64, dim in 2usize..48) {
        let keep = quad_halfline_projector(phase, HalfLine::NonNegative, dim).unwrap();
        let drop = quad_halfline_projector(phase, HalfLine::Negative, dim).unwrap();
        for p in [&keep, &drop] {
            let (idem, herm) = p.projector_defects();
            prop_assert!(idem < 1e-10 && herm < 1e-10);
        }
        let sum = keep.add(&drop).unwrap();
        prop_assert!(sum.max_abs_diff(&FockOperator::identity(dim).unwrap()).unwrap() < 1e-10);
    }

    #[test]
    fn concurrence_local_unitary_invariance(rho in density(), angles in prop::array::uniform8(-3.2..3.2f64)) {
        let [a, b, c, d, e, f, g, h] = angles;
        let u = qop::kron2(&unitary2(a, b, c, d), &unitary2(e, f, g, h));
        let before = concurrence(&rho).unwrap();
        let after = concurrence(&rho.conjugated(&u)).unwrap();
        prop_assert!((before - after).abs() < 1e-10, "{} vs {}", before, after);
    }

    #[test]
    fn partial_trace_keeps_trace_and_positivity(
        q in qubit2(), r in qubit2(), w in 0.0..1.0f64, ar in -1.5..1.5f64, ai in -1.5..1.5f64,
    ) {
        let dim = 16;
        let f1 = make_coherent(C64::new(ar, ai), dim).unwrap().state.normalized();
        let f2 = FockVector::number(dim, 3).unwrap();
        let s1 = CompositeState::product(&q, &f1).unwrap().density();
        let s2 = CompositeState::product(&r, &f2).unwrap().density();
        let mix: Vec<C64> = s1.iter().zip(&s2).map(|(a, b)| a * w + b * (1.0 - w)).collect();
        let state = CompositeState::mixed(2, dim, mix).unwrap();
        let qubits = partial_trace(&state, &[Subsystem::Qubit(0), Subsystem::Qubit(1)]).unwrap();
        prop_assert!((qubits.trace() - 1.0).abs() < 1e-12);
        prop_assert!(qubits.to_two_qubit().unwrap().eigenvalues().iter().all(|&l| l > -1e-12));
        let field = partial_trace(&state, &[Subsystem::Field]).unwrap();
        prop_assert!((field.trace() - 1.0).abs() < 1e-12);
        let one = partial_trace(&state, &[Subsystem::Qubit(1)]).unwrap();
        prop_assert!((one.trace() - 1.0).abs() < 1e-12);
        let m = one.density();
        // 2×2 Hermitian: positive iff trace ≥ 0 and det ≥ 0
        let det = (m[0] * m[3] - m[1] * m[2]).re;
        prop_assert!(det > -1e-12);
    }

    // dynamics

    #[test]
    fn jcm_conserves_norm_and_excitations(q0 in complex(), q1 in complex(), ar in -2.0..2.0f64, gt in 0.0..10.0f64) {
        let q = normalized(vec![q0, q1]);
        prop_assume!(q[0].norm_sqr() + q[1].norm_sqr() > 0.5);
        let dim = 40;
        let f = make_coherent(C64::new(ar, 0.5), dim).unwrap().state.normalized();
        let excitations = |s: &CompositeState| -> f64 {
            let (g, e) = (s.field_component(0).unwrap(), s.field_component(1).unwrap());
            (0..dim).map(|n| g[n].norm_sqr() * n as f64 + e[n].norm_sqr() * (n + 1) as f64).sum()
        };
        let before = CompositeState::product(&[q[0], q[1]], &f).unwrap();
        let after = jcm_exact([q[0], q[1]], &f, &JcmParams::from_g_tau(gt, 4.0)).unwrap();
        prop_assert!((after.trace() - 1.0).abs() < 1e-10);
        prop_assert!((excitations(&after) - excitations(&before)).abs() < 1e-10);
    }

    #[test]
    fn tcm_conserves_norm_and_excitations(q in qubit2(), ar in -2.0..2.0f64, tau in 0.0..1.0f64) {
        let dim = 48;
        let f = make_coherent(C64::new(ar, -0.3), dim).unwrap().state.normalized();
        let excitations = |s: &CompositeState| -> f64 {
            (0..4usize)
                .map(|r| {
                    let c = s.field_component(r).unwrap();
                    (0..dim).map(|n| c[n].norm_sqr() * (n + r.count_ones() as usize) as f64).sum::<f64>()
                })
                .sum()
        };
        let before = CompositeState::product(&q, &f).unwrap();
        let after = tcm_exact(q, &f, &TcmParams::new(4.0, tau)).unwrap();
        prop_assert!((after.trace() - 1.0).abs() < 1e-10);
        prop_assert!((excitations(&after) - excitations(&before)).abs() < 1e-10);
        // the singlet component does not move
        let s = BellCoeffs::from_state(&q).a_minus;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for n in 0..dim {
            let a = after.field_component(1).unwrap()[n] - after.field_component(2).unwrap()[n];
            prop_assert!((a * h - s * f.amps()[n]).norm() < 1e-12);
        }
    }

    // channel

    #[test]
    fn loss_is_trace_preserving(q0 in complex(), q1 in complex(), n in 0usize..10, gt in 0.0..2.0f64, eta in 0.0..1.0f64) {
        let q = normalized(vec![q0, q1]);
        prop_assume!(q[0].norm_sqr() + q[1].norm_sqr() > 0.5);
        let p = ChannelParams::new(gt, eta).unwrap();
        prop_assert!(LossChannel::from_params(&p, 14).unwrap().completeness_defect() < 1e-10);
        let s = CompositeState::product(&[q[0], q[1]], &FockVector::number(14, n).unwrap()).unwrap();
        let out = amplitude_damping_channel(&s, &p).unwrap();
        prop_assert!((out.trace() - 1.0).abs() < 1e-10);
        prop_assert!(out.hermitian_defect() < 1e-12);
    }

    #[test]
    fn decoherence_factor_bounded(gt in 0.0..3.0f64, eta in 0.0..1.0f64, phi in -1.5..1.5f64, nbar in 0.1..200.0f64) {
        let p = ChannelParams::new(gt, eta).unwrap();
        let m = decoherence_factor(&p, phi, nbar).norm();
        prop_assert!(m <= 1.0 + 1e-15);
        if phi.abs() > 1e-3 && p.transmissivity() < 1.0 - 1e-3 {
            prop_assert!(m < 1.0);
        }
        prop_assert!((decoherence_factor(&p, 0.0, nbar).norm() - 1.0).abs() < 1e-15);
        let lossless = ChannelParams::new(0.0, 1.0).unwrap();
        prop_assert!((decoherence_factor(&lossless, phi, nbar).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn length_conversion_inverts(l in 0.0..1000.0f64) {
        prop_assert!((length_from_gamma_t(gamma_t_from_length(l)) - l).abs() <= 1e-12 * l.max(1.0));
    }

    // entgen

    #[test]
    fn link_coherence_is_decoherence_modulus(gt in 0.0..0.3f64, eta in 0.3..1.0f64, nbar in 10.0..200.0f64, g_tau in 0.5..6.0f64) {
        let p = ChannelParams::new(gt, eta).unwrap();
        let l = link_state(&p, nbar, g_tau, 0.0).unwrap();
        let phi = g_tau / (2.0 * nbar.sqrt());
        prop_assert!((l.coherence() - decoherence_factor(&p, phi, nbar).norm()).abs() < 1e-12);
    }

    #[test]
    fn link_concurrence_is_coherence(r in 0.0..1.0f64, t in -3.2..3.2f64) {
        let (x, y) = (r * t.cos(), r * t.sin());
        let l = LinkState::from_xy(x, y).unwrap();
        prop_assert!((concurrence(&l.density()).unwrap() - r).abs() < 1e-10);
    }

    // purify

    #[test]
    fn oracle_step_equals_recurrence(r in 0.0..1.0f64, t in -3.2..3.2f64) {
        let (x, y) = (r * t.cos(), r * t.sin());
        let rho = LinkState::from_xy(x, y).unwrap().density();
        let (out, p) = purify_oracle_step(&rho, &rho).unwrap();
        let track = purify_step(&purify_track_init(x, y).unwrap()).unwrap();
        let (pm, pp) = (bell::psi_minus(), bell::psi_plus());
        prop_assert!((out.sandwich(&pm, &pm).re - track.f).abs() < 1e-10);
        prop_assert!((out.sandwich(&pp, &pp).re - track.g).abs() < 1e-10);
        prop_assert!((out.sandwich(&pm, &pp).re - track.h.unwrap()).abs() < 1e-10);
        prop_assert!((p - track.per_round_probs[0]).abs() < 1e-12);
    }

    #[test]
    fn purification_flows_to_fixed_points(x in -1.0..1.0f64, yf in -1.0..1.0f64) {
        let y = yf * (1.0 - x * x).sqrt();
        let mut t = purify_track_init(x, y).unwrap();
        let (f0, g0) = (t.f, t.g);
        let mut h_prev = f64::INFINITY;
        for _ in 0..12 {
            let n = purify_step(&t).unwrap();
            if f0 > g0 {
                prop_assert!(n.f >= t.f - 1e-15);
            } else if g0 > f0 {
                prop_assert!(n.g >= t.g - 1e-15);
            } else {
                prop_assert!((n.f - 0.5).abs() < 1e-15 && (n.g - 0.5).abs() < 1e-15);
            }
            let h = n.h.unwrap();
            if x != 0.0 {
                prop_assert!(h <= h_prev + 1e-15);
            }
            h_prev = h;
            t = n;
        }
        if x.abs() > 0.05 {
            prop_assert!(t.fidelity() > 1.0 - 1e-6);
        }
        // direct product of the per-round probabilities
        let direct: f64 = t
            .per_round_probs
            .iter()
            .enumerate()
            .map(|(k, p)| p.powi(1 << (t.per_round_probs.len() - 1 - k)))
            .product();
        if direct > 1e-300 {
            prop_assert!((t.overall_prob() - direct).abs() <= 1e-10 * direct);
        }
    }

    // swap

    #[test]
    fn swap_map_fixed_points(f in 0.5..1.0f64) {
        let g = swap_fidelity_map(f).unwrap();
        prop_assert!((0.5..=1.0).contains(&g));
        let g2 = swap_fidelity_map((f + 1e-6).min(1.0)).unwrap();
        prop_assert!(g2 >= g);
        if f > 0.5 + 1e-9 && f < 1.0 - 1e-9 {
            prop_assert!(g < f);
        }
    }

    #[test]
    fn analytic_bell_table_sums_to_one(q in qubit2()) {
        let d = bell_measurement_analytic(&BellCoeffs::from_state(&q)).unwrap();
        prop_assert!((d.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert_eq!(d.map(|(o, _)| o), OUTCOMES);
    }

    // rates

    #[test]
    fn attempts_monotone(n in 1u64..200, p in 0.01..0.99f64) {
        let a = attempts_avg(n, p).unwrap();
        prop_assert!(attempts_avg(n + 1, p).unwrap() >= a);
        prop_assert!(attempts_avg(n, p * 1.01).unwrap() <= a);
        prop_assert!(a >= 1.0 / p - 1e-9);
    }

    #[test]
    fn rate_round_trip_and_monotone_in_links(n in 1u64..80, l0 in 0.1..8.0f64, rounds in 0u32..4, endpoint in any::<bool>()) {
        let config = |n| RepeaterConfig { endpoint_purification: endpoint, ..RepeaterConfig::new(n, l0, rounds) };
        // end-point purification is undefined once the swapped pair hits F = 1/2
        let (Ok(r), Ok(more)) = (repeater_rate(&config(n)), repeater_rate(&config(n + 1))) else {
            prop_assume!(false);
            unreachable!()
        };
        if r.a_n.is_finite() && r.n_bar.is_finite() {
            prop_assert!((r.r * r.n_bar * (r.t_link * r.a_n + r.t_swap) - 1.0).abs() < 1e-12);
        }
        prop_assert!(more.log10_r <= r.log10_r + 1e-12);
    }
}

#[test]
fn swap_map_endpoints_are_fixed() {
    assert!((swap_fidelity_map(0.5).unwrap() - 0.5).abs() < 1e-15);
    assert!((swap_fidelity_map(1.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((iterate_swaps(1.0, 20).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn purification_fixed_line() {
    let t = purify_n(0.0, 0.7, 6).unwrap();
    assert_eq!((t.f, t.g), (0.5, 0.5));
}

#[test]
fn three_node_singlets_split_evenly() {
    let [a, b, c, d] = hyrep_core::swap::swap_pure(&bell::psi_minus(), &bell::psi_minus());
    for (_, w, _) in [a, b, c, d] {
        assert!((w - 0.25).abs() < 1e-12);
    }
}

#[test]
fn local_unitary_helper_is_unitary() {
    let u = qop::kron2(&unitary2(0.3, -1.0, 0.7, 2.0), &unitary2(1.1, 0.2, -0.4, 0.9));
    assert!(max_diff(&qop::matmul(&u, &qop::dagger(&u)), &qop::identity()) < 1e-14);
}
