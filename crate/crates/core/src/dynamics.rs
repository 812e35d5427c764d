//! Exact propagation by full diagonalization:
//! `|psi(t)> = sum_m <psi_m|ini> exp(-i E_m t) |psi_m>`.

use std::sync::Arc;

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockBasis, QuantumState};
use crate::hamiltonian::HermitianOperator;
use crate::observables::{LeakEvent, ObservableRequest, ObservableSeries, Recorder};

/// Columns whose residual `|H v - E v|` exceeds this multiple of `|H|_F`
/// are treated as a solver failure.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_DT: f64 = 0.1;

/// Number of instants propagated together in one matrix product.
const TIME_BLOCK: usize = 128;

/// Uniform grid `0, dt, 2 dt, ..., t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_max: f64,
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Grid(format!("dt must be positive, got {dt}")));
        }
        if !(t_max.is_finite() && t_max >= dt) {
            return Err(Error::Grid(format!(
                "t_max must be at least dt ({dt}), got {t_max}"
            )));
        }
        // Tolerate t_max / dt landing a hair below an integer.
        let steps = (t_max / dt + 1e-9).floor() as usize;
        Ok(Self { t_max, dt, steps })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of instants, including `t = 0`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }
}

/// Eigenpairs of a Hamiltonian with ascending energies and orthonormal
/// real eigenvectors as columns.
#[derive(Debug)]
pub struct SpectralDecomposition {
    basis: Arc<FockBasis>,
    energies: Vec<f64>,
    vectors: Mat<f64>,
    residual_max: f64,
    orthonormality_error: f64,
    frobenius_norm: f64,
}

pub fn diagonalize(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let dim = h.dim();
    let norm = h.frobenius_norm();
    let fail = |reason: String| Error::Eigensolver {
        dimension: dim,
        norm,
        reason,
    };
    if !norm.is_finite() {
        return Err(fail("matrix has non-finite entries".into()));
    }
    let evd = h
        .matrix()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| fail(format!("{e:?}")))?;
    let diag = evd.S().column_vector();
    let energies: Vec<f64> = (0..dim).map(|i| diag[i]).collect();
    let vectors = evd.U().to_owned();

    if energies.windows(2).any(|w| w[0] > w[1]) {
        return Err(fail("eigenvalues are not sorted".into()));
    }

    let hv = h.matrix() * &vectors;
    let mut residual_max = 0f64;
    for j in 0..dim {
        let e = energies[j];
        let r: f64 = (0..dim)
            .map(|i| {
                let d = hv[(i, j)] - e * vectors[(i, j)];
                d * d
            })
            .sum::<f64>()
            .sqrt();
        residual_max = residual_max.max(r);
    }
    let gram = vectors.transpose() * &vectors;
    let mut orthonormality_error = 0f64;
    for j in 0..dim {
        for i in 0..dim {
            let target = if i == j { 1.0 } else { 0.0 };
            orthonormality_error = orthonormality_error.max((gram[(i, j)] - target).abs());
        }
    }

    let scale = norm.max(f64::MIN_POSITIVE);
    if residual_max > RESIDUAL_TOLERANCE * scale || !residual_max.is_finite() {
        return Err(fail(format!(
            "eigenvector residual {residual_max:.3e} exceeds {RESIDUAL_TOLERANCE:e} x |H|_F"
        )));
    }
    if orthonormality_error > ORTHONORMALITY_TOLERANCE || !orthonormality_error.is_finite() {
        return Err(fail(format!(
            "eigenvectors deviate from orthonormality by {orthonormality_error:.3e}"
        )));
    }

    Ok(SpectralDecomposition {
        basis: h.basis().clone(),
        energies,
        vectors,
        residual_max,
        orthonormality_error,
        frobenius_norm: norm,
    })
}

impl SpectralDecomposition {
    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &Mat<f64> {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Largest `|H v_m - E_m v_m|` over all columns.
    pub fn residual_max(&self) -> f64 {
        self.residual_max
    }

    pub fn orthonormality_error(&self) -> f64 {
        self.orthonormality_error
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm
    }

    /// `c_m = <psi_m|ini>`
    pub fn overlaps(&self, ini: &QuantumState) -> Result<Vec<Complex64>> {
        if !ini.same_basis(&self.basis) {
            return Err(Error::BasisMismatch);
        }
        let amps = ini.amplitudes();
        Ok((0..self.dim())
            .map(|m| {
                let v = self.vectors.col(m);
                amps.iter()
                    .enumerate()
                    .map(|(i, a)| a * v[i])
                    .sum::<Complex64>()
            })
            .collect())
    }

    pub fn propagator(&self, ini: &QuantumState) -> Result<Propagator<'_>> {
        Ok(Propagator {
            spectrum: self,
            overlaps: self.overlaps(ini)?,
            origin: ini.time(),
        })
    }
}

/// `ini` carried forward by `t`; the result is labelled `ini.time() + t`.
pub fn evolve(
    spectrum: &SpectralDecomposition,
    ini: &QuantumState,
    t: f64,
) -> Result<QuantumState> {
    Ok(spectrum.propagator(ini)?.state_at(t))
}

/// One initial state projected onto an eigenbasis, ready to be evaluated
/// at any time.
#[derive(Debug)]
pub struct Propagator<'a> {
    spectrum: &'a SpectralDecomposition,
    overlaps: Vec<Complex64>,
    origin: f64,
}

impl Propagator<'_> {
    pub fn overlaps(&self) -> &[Complex64] {
        &self.overlaps
    }

    pub fn state_at(&self, t: f64) -> QuantumState {
        let mut out = None;
        self.for_each_state(&[t], |s| {
            out = Some(s.clone());
            Ok(true)
        })
        .expect("callback is infallible");
        out.expect("one instant requested")
    }

    /// Evaluates the state at each of `times` in order and hands it to
    /// `visit`. Returning `Ok(false)` stops the sweep early.
    pub fn for_each_state<F>(&self, times: &[f64], mut visit: F) -> Result<()>
    where
        F: FnMut(&QuantumState) -> Result<bool>,
    {
        let dim = self.spectrum.dim();
        let v = &self.spectrum.vectors;
        let energies = &self.spectrum.energies;
        for block in times.chunks(TIME_BLOCK) {
            let cols = block.len();
            let mut w_re = Mat::<f64>::zeros(dim, cols);
            let mut w_im = Mat::<f64>::zeros(dim, cols);
            for (b, &t) in block.iter().enumerate() {
                for m in 0..dim {
                    let phase = Complex64::from_polar(1.0, -energies[m] * t);
                    let w = self.overlaps[m] * phase;
                    w_re[(m, b)] = w.re;
                    w_im[(m, b)] = w.im;
                }
            }
            let psi_re = v * &w_re;
            let psi_im = v * &w_im;
            for (b, &t) in block.iter().enumerate() {
                let amps = (0..dim)
                    .map(|i| Complex64::new(psi_re[(i, b)], psi_im[(i, b)]))
                    .collect();
                let state = QuantumState::from_parts_unchecked(
                    self.spectrum.basis.clone(),
                    amps,
                    self.origin + t,
                );
                if !visit(&state)? {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

/// Propagates `ini` over `grid` and records the requested observables at
/// every instant. When edge leakage crosses the monitor threshold the
/// series is flagged and, if the monitor says so, truncated right after
/// the offending instant.
pub fn run_evolution(
    spectrum: &SpectralDecomposition,
    ini: &QuantumState,
    grid: &TimeGrid,
    request: &ObservableRequest,
) -> Result<ObservableSeries> {
    let basis = spectrum.basis();
    let recorder = Recorder::new(basis, request)?;
    let mut series = ObservableSeries::new(basis.lattice(), basis.particles(), request);
    let propagator = spectrum.propagator(ini)?;
    let times = grid.times();
    propagator.for_each_state(&times, |state| {
        let leakage = recorder.record(state, &mut series)?;
        if leakage >= request.leak.threshold && series.leak.is_none() {
            series.leak = Some(LeakEvent {
                time: state.time(),
                leakage,
            });
            if request.leak.halt {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    series.truncated = series.len() < grid.len();
    Ok(series)
}
