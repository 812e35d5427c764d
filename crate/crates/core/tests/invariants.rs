//! Properties every evolution must satisfy, over random small systems.

mod common;

use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use qwalk::dynamics::{evolve, run_evolution};
use qwalk::observables::{
    density_components, Bipartition, LeakMonitor, ObservableRequest, Subsystem,
};
use qwalk::{build_hamiltonian, FockBasis, ModelParams, QuantumState, TimeGrid};

use common::*;

fn params() -> impl Strategy<Value = ModelParams> {
    (
        0.3f64..2.0,
        -3.0f64..6.0,
        -0.5f64..0.5,
        -2.0f64..2.0,
        0.5f64..4.0,
        0.0f64..3.0,
        0.0f64..1.0,
    )
        .prop_map(|(j, u, f, v, alpha, lambda, phi)| ModelParams {
            tunneling: j,
            interaction: u,
            tilt: f,
            long_range: v,
            long_range_exponent: alpha,
            disorder: lambda,
            phase: phi,
            ..Default::default()
        })
}

fn system() -> impl Strategy<Value = (Arc<FockBasis>, Vec<Complex64>)> {
    (1usize..=4, 1usize..=3).prop_flat_map(|(l, n)| {
        let b = basis(l, n);
        let dim = b.dim();
        (
            Just(b),
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
                .prop_map(|v| v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect()),
        )
    })
}

fn random_state(b: &Arc<FockBasis>, amps: Vec<Complex64>) -> QuantumState {
    QuantumState::from_amplitudes(b.clone(), amps, 0.0).unwrap()
}

fn reflected(state: &QuantumState) -> QuantumState {
    let b = state.basis();
    let mut amps = vec![Complex64::new(0.0, 0.0); b.dim()];
    for (j, occ) in b.states().enumerate() {
        let mirror: Vec<u8> = occ.iter().rev().copied().collect();
        amps[b.index_of(&mirror).unwrap()] = state.amplitudes()[j];
    }
    QuantumState::from_amplitudes(b.clone(), amps, state.time()).unwrap()
}

fn distance(a: &QuantumState, b: &QuantumState) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_and_energy_are_conserved(
        (b, amps) in system(), p in params(), t in 0.0f64..20.0,
    ) {
        let h = build_hamiltonian(&b, &p).unwrap();
        let s = spectrum(&b, &p);
        let ini = random_state(&b, amps);
        let psi = evolve(&s, &ini, t).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-10);
        let e0 = h.expectation(&ini).unwrap();
        let e1 = h.expectation(&psi).unwrap();
        prop_assert!((e1 - e0).abs() <= 1e-9 * e0.abs().max(1.0));
    }

    #[test]
    fn evolution_composes_and_reverses(
        (b, amps) in system(), p in params(), t1 in 0.0f64..8.0, t2 in 0.0f64..8.0,
    ) {
        let s = spectrum(&b, &p);
        let ini = random_state(&b, amps);
        let direct = evolve(&s, &ini, t1 + t2).unwrap();
        let stepped = evolve(&s, &evolve(&s, &ini, t1).unwrap(), t2).unwrap();
        prop_assert!(direct.fidelity(&stepped).unwrap() > 1.0 - 1e-10);
        prop_assert!((stepped.time() - (t1 + t2)).abs() < 1e-12);
        let back = evolve(&s, &direct, -(t1 + t2)).unwrap();
        prop_assert!(distance(&back, &ini) < 1e-10);
    }

    #[test]
    fn densities_obey_sum_rules((b, amps) in system(), p in params(), t in 0.0f64..10.0) {
        let s = spectrum(&b, &p);
        let psi = evolve(&s, &random_state(&b, amps), t).unwrap();
        let profile = density_components(&psi);
        let n = b.particles() as f64;
        prop_assert!((profile.total.iter().sum::<f64>() - n).abs() < 1e-10);
        let comps = profile.components.unwrap();
        for i in 0..b.sites() {
            let parts: f64 = comps.iter().map(|c| c[i]).sum();
            prop_assert!((parts - profile.total[i]).abs() < 1e-10);
            prop_assert!(comps.iter().all(|c| c[i] >= -1e-14));
        }
    }

    #[test]
    fn reduced_states_are_physical(
        (b, amps) in system(), p in params(), t in 0.0f64..10.0, cut_frac in 0.0f64..1.0,
    ) {
        let l = b.lattice().half_length() as i64;
        let cut = -l + ((2 * l) as f64 * cut_frac).floor() as i64;
        let s = spectrum(&b, &p);
        let psi = evolve(&s, &random_state(&b, amps), t).unwrap();
        let bp = Bipartition::new(&b, cut).unwrap();
        let rho_a = bp.reduced_density_matrix(&psi, Subsystem::A).unwrap();
        let rho_b = bp.reduced_density_matrix(&psi, Subsystem::B).unwrap();
        prop_assert!((rho_a.trace() - 1.0).abs() < 1e-10);
        prop_assert!(rho_a.hermiticity_error() < 1e-12);
        prop_assert!(rho_a.eigenvalues().unwrap().iter().all(|&x| x > -1e-12));
        let (sa, sb) = (rho_a.entropy().unwrap(), rho_b.entropy().unwrap());
        prop_assert!((sa - sb).abs() < 1e-10, "{} vs {}", sa, sb);
    }

    #[test]
    fn mirror_symmetric_models_commute_with_parity(
        (b, amps) in system(), u in -2.0f64..5.0, v in -1.0f64..2.0, t in 0.0f64..10.0,
    ) {
        let p = ModelParams { interaction: u, long_range: v, ..Default::default() };
        let s = spectrum(&b, &p);
        let ini = random_state(&b, amps);
        let a = reflected(&evolve(&s, &ini, t).unwrap());
        let c = evolve(&s, &reflected(&ini), t).unwrap();
        prop_assert!(distance(&a, &c) < 1e-10);
    }
}

#[test]
fn recorded_diagnostics_stay_within_tolerance() {
    let b = basis(6, 3);
    let p = ModelParams {
        interaction: 2.0,
        tilt: 0.1,
        long_range: 0.5,
        disorder: 1.0,
        phase: 0.3,
        ..Default::default()
    };
    let s = spectrum(&b, &p);
    let request = ObservableRequest {
        entropy_cut: Some(0),
        leak: LeakMonitor {
            threshold: 1.0,
            halt: false,
        },
        ..Default::default()
    };
    let ini = QuantumState::product(b.clone(), &[-1, 0, 1]).unwrap();
    let series = run_evolution(&s, &ini, &TimeGrid::new(20.0, 0.5).unwrap(), &request).unwrap();
    let d = series.diagnostics;
    assert!(d.norm_error < 1e-10);
    assert!(d.sum_rule_error < 1e-10);
    assert!(d.component_sum_error < 1e-10);
    assert!(d.min_density.unwrap() > -1e-14);
    assert!(d.rdm_trace_error < 1e-10);
    assert!(d.rdm_min_eigenvalue.unwrap() > -1e-12);
    assert!(s.residual_max() < 1e-10 && s.orthonormality_error() < 1e-10);
}
