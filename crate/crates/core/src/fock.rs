//! Fixed-particle-number Fock space of bosons on an open chain of `2L + 1`
//! sites, labelled `-L..=L`, together with the initial states used to seed
//! the walks.
//!
//! Basis states are stored in descending lexicographic order of their
//! occupation vectors (storage index 0 is site `-L`). Ranking and unranking
//! use the standard stars-and-bars completion counts, so `index_of` needs no
//! hash table.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_PARTICLES: usize = 3;
pub const DEFAULT_DIMENSION_CAP: usize = 20_000;

/// Chain of `2L + 1` sites with site labels `-L..=L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    first: i64,
    sites: usize,
}

impl Lattice {
    pub fn new(half_length: usize) -> Result<Self> {
        if half_length == 0 {
            return Err(Error::Lattice("half length L must be at least 1".into()));
        }
        Ok(Self {
            first: -(half_length as i64),
            sites: 2 * half_length + 1,
        })
    }

    /// Open chain with labels `0..sites`; only used to check tiny matrices.
    #[cfg(test)]
    pub(crate) fn chain(sites: usize) -> Self {
        Self { first: 0, sites }
    }

    pub fn half_length(&self) -> usize {
        (self.sites - 1) / 2
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Storage index of site label `site`.
    pub fn index(&self, site: i64) -> Option<usize> {
        let offset = site - self.first;
        (0..self.sites as i64)
            .contains(&offset)
            .then_some(offset as usize)
    }

    /// Site label of storage index `index`.
    pub fn site(&self, index: usize) -> i64 {
        self.first + index as i64
    }

    pub fn labels(&self) -> impl Iterator<Item = i64> {
        self.first..self.first + self.sites as i64
    }

    pub(crate) fn checked_index(&self, site: i64) -> Result<usize> {
        self.index(site).ok_or(Error::SiteOutOfRange {
            site,
            half_length: self.half_length(),
        })
    }
}

/// Number of ways to place `particles` bosons on `sites` modes.
pub fn multiset_count(sites: usize, particles: usize) -> u128 {
    if sites == 0 {
        return u128::from(particles == 0);
    }
    // C(sites + particles - 1, particles), exact at every step.
    let mut acc: u128 = 1;
    for k in 1..=particles as u128 {
        acc = acc * (sites as u128 - 1 + k) / k;
    }
    acc
}

#[derive(Debug, PartialEq, Eq)]
pub struct FockBasis {
    lattice: Lattice,
    particles: usize,
    /// Row-major `dim x sites` occupation table.
    occupations: Vec<u8>,
    /// `completions[s][p]` = number of ways to put `p` bosons on `s` sites.
    completions: Vec<Vec<usize>>,
}

impl FockBasis {
    pub fn new(lattice: Lattice, particles: usize) -> Result<Self> {
        Self::with_cap(lattice, particles, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(lattice: Lattice, particles: usize, cap: usize) -> Result<Self> {
        if !(1..=MAX_PARTICLES).contains(&particles) {
            return Err(Error::ParticleCount(particles));
        }
        let sites = lattice.sites();
        let dimension = multiset_count(sites, particles);
        if dimension > cap as u128 {
            return Err(Error::DimensionCap { dimension, cap });
        }
        let dim = dimension as usize;

        let completions = (0..=sites)
            .map(|s| {
                (0..=particles)
                    .map(|p| multiset_count(s, p) as usize)
                    .collect()
            })
            .collect();

        let mut occupations = Vec::with_capacity(dim * sites);
        let mut current = vec![0u8; sites];
        enumerate_descending(&mut current, 0, particles, &mut occupations);
        debug_assert_eq!(occupations.len(), dim * sites);

        Ok(Self {
            lattice,
            particles,
            occupations,
            completions,
        })
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn sites(&self) -> usize {
        self.lattice.sites()
    }

    pub fn dim(&self) -> usize {
        self.occupations.len() / self.sites()
    }

    /// Occupation vector of basis state `index`.
    pub fn state(&self, index: usize) -> &[u8] {
        let m = self.sites();
        &self.occupations[index * m..(index + 1) * m]
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &[u8]> {
        self.occupations.chunks_exact(self.sites())
    }

    /// Basis index of an occupation vector, or `None` if it does not belong
    /// to this basis (wrong length or wrong particle number).
    pub fn index_of(&self, occupation: &[u8]) -> Option<usize> {
        let m = self.sites();
        if occupation.len() != m {
            return None;
        }
        let total: usize = occupation.iter().map(|&n| n as usize).sum();
        if total != self.particles {
            return None;
        }
        let mut rank = 0;
        let mut remaining = self.particles;
        for (p, &n) in occupation.iter().enumerate() {
            let n = n as usize;
            // States with a larger value at position p come first.
            for larger in n + 1..=remaining {
                rank += self.completions[m - p - 1][remaining - larger];
            }
            remaining -= n;
        }
        Some(rank)
    }

    /// Single-site-resolved view: `(site index, occupation)` pairs of the
    /// occupied sites of state `index`.
    pub fn occupied(&self, index: usize) -> impl Iterator<Item = (usize, u8)> + '_ {
        self.state(index)
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, &n)| (i, n))
    }
}

fn enumerate_descending(current: &mut [u8], pos: usize, remaining: usize, out: &mut Vec<u8>) {
    if pos + 1 == current.len() {
        current[pos] = remaining as u8;
        out.extend_from_slice(current);
        return;
    }
    for n in (0..=remaining).rev() {
        current[pos] = n as u8;
        enumerate_descending(current, pos + 1, remaining - n, out);
    }
    current[pos] = 0;
}

/// Normalized amplitude vector over a shared Fock basis.
#[derive(Debug, Clone)]
pub struct QuantumState {
    basis: Arc<FockBasis>,
    amplitudes: Vec<Complex64>,
    time: f64,
}

impl QuantumState {
    /// Wraps raw amplitudes; the vector is normalized on the way in.
    pub fn from_amplitudes(
        basis: Arc<FockBasis>,
        mut amplitudes: Vec<Complex64>,
        time: f64,
    ) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::Parameter(format!(
                "amplitude vector has length {} but the basis has dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let norm = l2_norm(&amplitudes);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Parameter("state has zero or non-finite norm".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self {
            basis,
            amplitudes,
            time,
        })
    }

    pub(crate) fn from_parts_unchecked(
        basis: Arc<FockBasis>,
        amplitudes: Vec<Complex64>,
        time: f64,
    ) -> Self {
        Self {
            basis,
            amplitudes,
            time,
        }
    }

    /// The Fock state with the given occupation vector.
    pub fn basis_state(basis: Arc<FockBasis>, occupation: &[u8]) -> Result<Self> {
        let index = basis.index_of(occupation).ok_or_else(|| {
            Error::Parameter(format!("occupation {occupation:?} is not in the basis"))
        })?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self::from_parts_unchecked(basis, amplitudes, 0.0))
    }

    /// `prod_k a_k^dagger |vac>` for the listed sites (repeats allowed),
    /// normalized.
    pub fn product(basis: Arc<FockBasis>, sites: &[i64]) -> Result<Self> {
        if sites.len() != basis.particles() {
            return Err(Error::Parameter(format!(
                "{} sites given for {} particles",
                sites.len(),
                basis.particles()
            )));
        }
        let lattice = basis.lattice();
        let mut occupation = vec![0u8; lattice.sites()];
        for &site in sites {
            occupation[lattice.checked_index(site)?] += 1;
        }
        Self::basis_state(basis, &occupation)
    }

    /// `(sum_k exp(-(k - k0)^2 / (2 sigma2)) a_k^dagger)^N |vac>`, normalized.
    ///
    /// `sigma2 == 0` is the localized limit: all particles on `k0`.
    pub fn gaussian(basis: Arc<FockBasis>, center: i64, sigma2: f64) -> Result<Self> {
        let lattice = basis.lattice();
        lattice.checked_index(center)?;
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(Error::Parameter(format!(
                "gaussian variance sigma2 must be non-negative, got {sigma2}"
            )));
        }
        if sigma2 == 0.0 {
            let sites = vec![center; basis.particles()];
            return Self::product(basis, &sites);
        }

        let envelope: Vec<f64> = lattice
            .labels()
            .map(|k| {
                let d = (k - center) as f64;
                (-d * d / (2.0 * sigma2)).exp()
            })
            .collect();

        // Expanding the N-th power, |n> picks up N!/prod(n_k!) * prod g_k^n_k
        // times sqrt(prod n_k!) from the normalization of the Fock vector.
        let amplitudes = basis
            .states()
            .map(|occ| {
                let mut amp = 1.0;
                for (k, &n) in occ.iter().enumerate() {
                    if n > 0 {
                        amp *= envelope[k].powi(n as i32) / factorial(n).sqrt();
                    }
                }
                Complex64::new(amp, 0.0)
            })
            .collect();
        Self::from_amplitudes(basis, amplitudes, 0.0)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// `<self|other>`
    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        if !self.same_basis(other.basis()) {
            return Err(Error::BasisMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|`
    pub fn fidelity(&self, other: &QuantumState) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    pub(crate) fn same_basis(&self, basis: &Arc<FockBasis>) -> bool {
        Arc::ptr_eq(&self.basis, basis) || *self.basis == **basis
    }
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}
