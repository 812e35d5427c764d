#![allow(dead_code)]

use std::sync::Arc;

use qwalk::dynamics::{diagonalize, SpectralDecomposition};
use qwalk::{build_hamiltonian, FockBasis, Lattice, ModelParams, QuantumState};

/// Bessel function of the first kind from its integral representation
/// `(1/pi) * int_0^pi cos(n s - x sin s) ds`, by the trapezoid rule. The
/// integrand is smooth and periodic, so the rule converges geometrically.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let steps = 512;
    let h = std::f64::consts::PI / steps as f64;
    let f = |s: f64| (n as f64 * s - x * s.sin()).cos();
    let mut acc = 0.5 * (f(0.0) + f(std::f64::consts::PI));
    for k in 1..steps {
        acc += f(k as f64 * h);
    }
    acc * h / std::f64::consts::PI
}

pub fn basis(half_length: usize, particles: usize) -> Arc<FockBasis> {
    Arc::new(FockBasis::new(Lattice::new(half_length).unwrap(), particles).unwrap())
}

pub fn spectrum(basis: &Arc<FockBasis>, params: &ModelParams) -> SpectralDecomposition {
    diagonalize(&build_hamiltonian(basis, params).unwrap()).unwrap()
}

pub fn free() -> ModelParams {
    ModelParams::default()
}

pub fn tilted(f: f64) -> ModelParams {
    ModelParams {
        tilt: f,
        ..Default::default()
    }
}

pub fn localized(basis: &Arc<FockBasis>, sites: &[i64]) -> QuantumState {
    QuantumState::product(basis.clone(), sites).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
