use agassi_core::experiments::{
    correlation_12, fidelity_vs_time, rabi_period, transfer_amplitude, Dynamics, Evolution, ExperimentConfig,
    ExperimentKind,
};
use agassi_core::model::{build_split_j1, ModelParams};
use agassi_core::state::{apply_pauli_exponential, basis_state, fidelity, Propagator, StateVector};
use agassi_core::trotter::{build_schedule, digital_error, digital_error_with, trotter_evolve};
use num_complex::Complex64;
use proptest::prelude::*;

fn reference() -> StateVector {
    basis_state("ddUU").unwrap()
}

fn generic_state() -> StateVector {
    StateVector::normalized((0..16).map(|k| Complex64::new((k as f64).sin(), (2.0 * k as f64).cos())).collect())
        .unwrap()
}

#[test]
fn layer_order_does_not_matter() {
    let p = ModelParams::new(1.0, 0.8, 0.6);
    let s = build_schedule(&p, 1.5, 1).unwrap();
    let delta = s.step_duration();
    let psi = generic_state();
    let mut forward = psi.clone();
    for t in s.interaction_layer() {
        forward.apply_pauli_exponential(&t.string, t.rate * delta).unwrap();
    }
    for perm in [[7, 6, 5, 4, 3, 2, 1, 0], [3, 0, 6, 1, 7, 2, 5, 4]] {
        let mut other = psi.clone();
        for i in perm {
            let t = &s.interaction_layer()[i];
            other.apply_pauli_exponential(&t.string, t.rate * delta).unwrap();
        }
        let max = forward.amplitudes().iter().zip(other.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(max < 1e-12);
    }
}

#[test]
fn layer_equals_exponential_of_interaction() {
    let p = ModelParams::new(1.0, 0.3, 1.1);
    let h3 = build_split_j1(&p).unwrap().h3;
    let s = build_schedule(&p, 0.7, 1).unwrap();
    let mut layer = generic_state();
    for t in s.interaction_layer() {
        layer.apply_pauli_exponential(&t.string, t.rate * 0.7).unwrap();
    }
    let exact = Propagator::new(&h3).unwrap().evolve(&generic_state(), 0.7).unwrap();
    assert!(fidelity(&layer, &exact).unwrap() > 1.0 - 1e-13);
}

#[test]
fn trotter_is_exact_without_interaction() {
    let p = ModelParams::new(1.0, 0.65, -0.65);
    for (t, n) in [(0.5, 1), (3.0, 2), (11.0, 7)] {
        assert!(digital_error(&generic_state(), &p, t, n).unwrap() < 1e-12);
        assert!(digital_error(&reference(), &p, t, n).unwrap() < 1e-14);
    }
}

#[test]
fn digital_error_vanishes_at_zero_time() {
    let p = ModelParams::new(1.0, 1.0, 1.0);
    assert!(digital_error(&reference(), &p, 0.0, 0).unwrap().abs() < 1e-14);
}

#[test]
fn doubling_steps_at_least_halves_error() {
    let p = ModelParams::new(1.0, 1.0, 1.0);
    let prop = Propagator::new(&build_split_j1(&p).unwrap().total().unwrap()).unwrap();
    for t in [1.0, 5.0] {
        for n in [16, 32, 64] {
            let e1 = digital_error_with(&prop, &reference(), &p, t, n).unwrap();
            let e2 = digital_error_with(&prop, &reference(), &p, t, 2 * n).unwrap();
            assert!(e1 / e2 >= 2.0, "t={t} n={n}: {e1:e} -> {e2:e}");
        }
    }
}

#[test]
fn long_horizon_converges_monotonically_eventually() {
    // (g+V)t = 10
    let p = ModelParams::new(1.0, 1.0, 1.0);
    let prop = Propagator::new(&build_split_j1(&p).unwrap().total().unwrap()).unwrap();
    let errs: Vec<f64> = (1..=60).map(|n| digital_error_with(&prop, &reference(), &p, 5.0, n).unwrap()).collect();
    let n0 = (0..errs.len() - 1).rev().find(|&i| errs[i + 1] >= errs[i]).map_or(1, |i| i + 2);
    assert!(n0 <= 30, "monotone only from n_T = {n0}");
    let pts: Vec<(f64, f64)> = (n0..=60).map(|n| ((n as f64).ln(), errs[n - 1].ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let slope = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / pts.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    assert!(slope <= -1.0, "slope {slope}");
}

#[test]
fn norm_preserved_across_steps() {
    let p = ModelParams::new(1.0, 1.3, 0.2);
    let psi = trotter_evolve(&generic_state(), &p, 40.0, 500).unwrap();
    assert!((psi.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn fidelity_time_series_shape() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::FidelityVsTime);
    cfg.samples = 101;
    let rows = fidelity_vs_time(&cfg).unwrap();
    assert_eq!(rows[0].fidelity, 1.0);
    assert!((rows.last().unwrap().gvt - 10.0).abs() < 1e-12);
    assert!(rows.iter().all(|r| (0.0..=1.0 + 1e-9).contains(&r.fidelity)));
    let min = rows.iter().map(|r| r.fidelity).fold(1.0, f64::min);
    assert!(min < 1.0 && min > 0.5, "min fidelity {min}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Dense evolution against `P(t) = 1 − A sin²(Ωt)`, `Ω = √(ε² + (g+V)²)`.
    #[test]
    fn two_level_closed_form(eps in 0.3f64..2.0, g in -1.5f64..1.5, v in -1.5f64..1.5, t in 0.0f64..12.0) {
        let p = ModelParams::new(eps, g, v);
        let d = Dynamics::new(&p, &reference()).unwrap();
        let omega = (eps * eps + p.coupling().powi(2)).sqrt();
        let a = transfer_amplitude(&p);
        let transfer = a * (omega * t).sin().powi(2);
        prop_assert!((d.survival(t, Evolution::Exact).unwrap() - (1.0 - transfer)).abs() < 1e-10);
        let corr = d.correlation(t, Evolution::Exact).unwrap();
        prop_assert!((corr - 4.0 * transfer * (1.0 - transfer)).abs() < 1e-10);
        prop_assert!((rabi_period(&p) - std::f64::consts::PI / omega).abs() < 1e-15);
    }

    #[test]
    fn exact_evolution_composes(g in -1.0f64..1.0, v in -1.0f64..1.0, t1 in 0.0f64..4.0, t2 in 0.0f64..4.0) {
        let p = ModelParams::new(1.0, g, v);
        let prop = Propagator::new(&build_split_j1(&p).unwrap().total().unwrap()).unwrap();
        let psi = generic_state();
        let a = prop.evolve(&prop.evolve(&psi, t1).unwrap(), t2).unwrap();
        let b = prop.evolve(&psi, t1 + t2).unwrap();
        let max = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(max < 1e-12);
        let back = prop.evolve(&b, -(t1 + t2)).unwrap();
        prop_assert!(fidelity(&back, &psi).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn pauli_exponential_inverts(letters in "[IXYZ]{4}", theta in -3.0f64..3.0) {
        let p = agassi_core::pauli::PauliString::parse(Complex64::new(1.0, 0.0), &letters).unwrap();
        let psi = generic_state();
        let fwd = apply_pauli_exponential(&psi, &p, theta).unwrap();
        prop_assert!((fwd.norm() - 1.0).abs() < 1e-12);
        let back = apply_pauli_exponential(&fwd, &p, -theta).unwrap();
        let max = back.amplitudes().iter().zip(psi.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(max < 1e-12);
    }

    #[test]
    fn trotter_stays_in_pair_subspace(g in -1.5f64..1.5, v in -1.5f64..1.5, t in 0.0f64..8.0, n in 1usize..12) {
        let psi = trotter_evolve(&reference(), &ModelParams::new(1.0, g, v), t, n).unwrap();
        let inside = psi.probability(0b1100) + psi.probability(0b0011);
        prop_assert!((inside - 1.0).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&correlation_12(&psi)));
    }
}
