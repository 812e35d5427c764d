//! Bose-Hubbard Hamiltonian with tilt, power-law density-density coupling
//! and quasiperiodic on-site modulation, assembled densely in a Fock basis.

use std::f64::consts::PI;
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockBasis, Lattice, QuantumState};

/// Inverse golden ratio, the default incommensuration of the on-site
/// modulation.
pub fn golden_tau() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// Couplings in units of the tunneling amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Nearest-neighbour tunneling `J`.
    pub tunneling: f64,
    /// On-site interaction `U`.
    pub interaction: f64,
    /// Linear tilt `F` per site.
    pub tilt: f64,
    /// Amplitude `V` of the `|i - j|^-alpha` density-density coupling.
    pub long_range: f64,
    pub long_range_exponent: f64,
    /// Quasiperiodic modulation amplitude `lambda`.
    pub disorder: f64,
    pub incommensuration: f64,
    /// Modulation phase in `[0, 1)`.
    pub phase: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            tunneling: 1.0,
            interaction: 0.0,
            tilt: 0.0,
            long_range: 0.0,
            long_range_exponent: 3.0,
            disorder: 0.0,
            incommensuration: golden_tau(),
            phase: 0.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("J", self.tunneling),
            ("U", self.interaction),
            ("F", self.tilt),
            ("V", self.long_range),
            ("alpha", self.long_range_exponent),
            ("lambda", self.disorder),
            ("tau", self.incommensuration),
            ("phi", self.phase),
        ];
        if let Some((name, value)) = finite.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "{name} must be finite, got {value}"
            )));
        }
        if self.tunneling <= 0.0 {
            return Err(Error::Parameter(format!(
                "J must be positive, got {}",
                self.tunneling
            )));
        }
        if self.long_range != 0.0 && self.long_range_exponent <= 0.0 {
            return Err(Error::Parameter(format!(
                "alpha must be positive when V != 0, got {}",
                self.long_range_exponent
            )));
        }
        if self.disorder < 0.0 {
            return Err(Error::Parameter(format!(
                "lambda must be non-negative, got {}",
                self.disorder
            )));
        }
        if !(0.0..1.0).contains(&self.phase) {
            return Err(Error::Parameter(format!(
                "phi must lie in [0, 1), got {}",
                self.phase
            )));
        }
        Ok(())
    }

    pub fn with_phase(self, phase: f64) -> Self {
        Self { phase, ..self }
    }
}

/// `lambda * cos(2 pi (tau i + phi))` for `i = -L..=L`.
pub fn disorder_profile(lattice: Lattice, lambda: f64, tau: f64, phi: f64) -> Vec<f64> {
    lattice
        .labels()
        .map(|i| lambda * (2.0 * PI * (tau * i as f64 + phi)).cos())
        .collect()
}

/// Total single-particle on-site energy: tilt plus modulation.
pub fn site_energies(lattice: Lattice, params: &ModelParams) -> Vec<f64> {
    disorder_profile(
        lattice,
        params.disorder,
        params.incommensuration,
        params.phase,
    )
    .into_iter()
    .zip(lattice.labels())
    .map(|(eps, i)| eps + params.tilt * i as f64)
    .collect()
}

/// Dense Hamiltonian matrix. All couplings are real, so the matrix is
/// stored as a real symmetric one.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    basis: Arc<FockBasis>,
    matrix: Mat<f64>,
}

impl HermitianOperator {
    pub fn from_matrix(basis: Arc<FockBasis>, matrix: Mat<f64>) -> Result<Self> {
        let dim = basis.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Parameter(format!(
                "matrix is {}x{} but the basis has dimension {dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { basis, matrix })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix[(row, col)]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm_l2()
    }

    /// `max |H - H^T|`
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0f64;
        for j in 0..n {
            for i in j + 1..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)]).abs());
            }
        }
        worst
    }

    /// `H |psi>` as a raw amplitude vector.
    pub fn apply(&self, state: &QuantumState) -> Result<Vec<Complex64>> {
        if !state.same_basis(&self.basis) {
            return Err(Error::BasisMismatch);
        }
        let amps = state.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (j, &a) in amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = self.matrix.col(j);
            for (i, o) in out.iter_mut().enumerate() {
                *o += a * col[i];
            }
        }
        Ok(out)
    }

    /// `<psi|H|psi>`
    pub fn expectation(&self, state: &QuantumState) -> Result<f64> {
        let h_psi = self.apply(state)?;
        Ok(state
            .amplitudes()
            .iter()
            .zip(&h_psi)
            .map(|(a, b)| (a.conj() * b).re)
            .sum())
    }
}

pub fn build_hamiltonian(
    basis: &Arc<FockBasis>,
    params: &ModelParams,
) -> Result<HermitianOperator> {
    params.validate()?;
    let lattice = basis.lattice();
    let sites = lattice.sites();
    let dim = basis.dim();

    let onsite = site_energies(lattice, params);
    // kernel[d] = d^-alpha for pair distance d.
    let kernel: Vec<f64> = (0..sites)
        .map(|d| {
            if d == 0 || params.long_range == 0.0 {
                0.0
            } else {
                params.long_range * (d as f64).powf(-params.long_range_exponent)
            }
        })
        .collect();

    let mut matrix = Mat::<f64>::zeros(dim, dim);
    let mut scratch = vec![0u8; sites];
    for col in 0..dim {
        let occ = basis.state(col);
        let occupied: Vec<(usize, u8)> = basis.occupied(col).collect();

        let mut diagonal = 0.0;
        for &(i, n) in &occupied {
            let n = f64::from(n);
            diagonal += 0.5 * params.interaction * n * (n - 1.0) + onsite[i] * n;
        }
        for (a, &(i, ni)) in occupied.iter().enumerate() {
            for &(j, nj) in &occupied[a + 1..] {
                diagonal += kernel[j - i] * f64::from(ni) * f64::from(nj);
            }
        }
        matrix[(col, col)] = diagonal;

        // a_{i+1}^dagger a_i, open chain; the Hermitian partner is filled
        // in by symmetry.
        for &(i, ni) in &occupied {
            if i + 1 == sites {
                continue;
            }
            scratch.copy_from_slice(occ);
            let target_occ = scratch[i + 1];
            scratch[i] -= 1;
            scratch[i + 1] += 1;
            let row = basis
                .index_of(&scratch)
                .expect("hopping preserves particle number");
            let element =
                -params.tunneling * (f64::from(ni) * (f64::from(target_occ) + 1.0)).sqrt();
            matrix[(row, col)] = element;
            matrix[(col, row)] = element;
        }
    }

    Ok(HermitianOperator {
        basis: basis.clone(),
        matrix,
    })
}
