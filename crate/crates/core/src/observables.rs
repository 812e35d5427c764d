//! Measured quantities: site densities, occupation-resolved densities,
//! bipartite entanglement entropy and packet moments.

use std::collections::HashMap;

use faer::{c64, Mat, Side as MatSide};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockBasis, Lattice, QuantumState};

/// Eigenvalues of a reduced density matrix below this are treated as zero.
pub const ENTROPY_CUTOFF: f64 = 1e-14;
/// Number of outermost sites on each edge that count towards leakage.
pub const EDGE_WINDOW: usize = 2;
pub const DEFAULT_LEAK_THRESHOLD: f64 = 1e-4;

/// Site-resolved density, optionally split by local occupation:
/// `components[k - 1][i] = k * P(n_i = k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub lattice: Lattice,
    pub total: Vec<f64>,
    pub components: Option<Vec<Vec<f64>>>,
}

/// `n(i) = <a_i^dagger a_i>`
pub fn density(state: &QuantumState) -> DensityProfile {
    let basis = state.basis();
    let mut total = vec![0.0; basis.sites()];
    for (j, amp) in state.amplitudes().iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for (i, n) in basis.occupied(j) {
            total[i] += p * f64::from(n);
        }
    }
    DensityProfile {
        lattice: basis.lattice(),
        total,
        components: None,
    }
}

/// Density together with its decomposition by local occupation number,
/// computed from exact projectors onto `n_i = k`.
pub fn density_components(state: &QuantumState) -> DensityProfile {
    let basis = state.basis();
    let m = basis.sites();
    let mut total = vec![0.0; m];
    let mut components = vec![vec![0.0; m]; basis.particles()];
    for (j, amp) in state.amplitudes().iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for (i, n) in basis.occupied(j) {
            let w = p * f64::from(n);
            total[i] += w;
            components[n as usize - 1][i] += w;
        }
    }
    DensityProfile {
        lattice: basis.lattice(),
        total,
        components: Some(components),
    }
}

/// `<a_i^dagger a_i^dagger a_i a_i>` per site.
pub fn pair_density(state: &QuantumState) -> Vec<f64> {
    let basis = state.basis();
    let mut out = vec![0.0; basis.sites()];
    for (j, amp) in state.amplitudes().iter().enumerate() {
        let p = amp.norm_sqr();
        for (i, n) in basis.occupied(j) {
            let n = f64::from(n);
            out[i] += p * n * (n - 1.0);
        }
    }
    out
}

/// Zeroth, first and second moments of a non-negative site profile,
/// normalized by its own weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub weight: f64,
    pub centroid: f64,
    pub width: f64,
}

pub fn moments(values: &[f64], lattice: Lattice) -> Moments {
    let mut weight = 0.0;
    let mut first = 0.0;
    let mut second = 0.0;
    for (v, i) in values.iter().zip(lattice.labels()) {
        let i = i as f64;
        weight += v;
        first += v * i;
        second += v * i * i;
    }
    if weight <= 1e-12 {
        return Moments {
            weight,
            centroid: 0.0,
            width: 0.0,
        };
    }
    let centroid = first / weight;
    let variance = (second / weight - centroid * centroid).max(0.0);
    Moments {
        weight,
        centroid,
        width: variance.sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketStatistics {
    pub centroid: f64,
    pub width: f64,
    pub edge_leakage: f64,
}

/// Centroid and width of the total density (normalized by the particle
/// number) and the weight sitting on the outermost sites.
pub fn packet_statistics(profile: &DensityProfile, particles: usize) -> PacketStatistics {
    let n = particles as f64;
    let mut first = 0.0;
    let mut second = 0.0;
    for (v, i) in profile.total.iter().zip(profile.lattice.labels()) {
        let i = i as f64;
        first += v * i;
        second += v * i * i;
    }
    let centroid = first / n;
    let width = (second / n - centroid * centroid).max(0.0).sqrt();
    PacketStatistics {
        centroid,
        width,
        edge_leakage: edge_leakage(&profile.total),
    }
}

pub fn edge_leakage(total: &[f64]) -> f64 {
    let m = total.len();
    total
        .iter()
        .enumerate()
        .filter(|(i, _)| *i < EDGE_WINDOW || *i + EDGE_WINDOW >= m)
        .map(|(_, v)| v)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    /// Sites `-L..=cut`.
    A,
    /// Sites `cut + 1..=L`.
    B,
}

#[derive(Debug)]
struct SectorLayout {
    rows: usize,
    cols: usize,
}

/// Precomputed split of a Fock basis into left block A (sites up to and
/// including `cut`) and right block B. Each basis vector maps to a
/// (particles in A, A configuration, B configuration) triple.
#[derive(Debug)]
pub struct Bipartition {
    cut: i64,
    sectors: Vec<SectorLayout>,
    /// Per basis state: (sector, row, col).
    placement: Vec<(usize, usize, usize)>,
}

impl Bipartition {
    pub fn new(basis: &FockBasis, cut: i64) -> Result<Self> {
        let lattice = basis.lattice();
        let split = match lattice.index(cut) {
            Some(i) if i + 1 < lattice.sites() => i + 1,
            _ => {
                return Err(Error::Parameter(format!(
                    "cut after site {cut} does not split the lattice -{l}..={l}",
                    l = lattice.half_length()
                )))
            }
        };
        let n = basis.particles();
        let mut row_maps: Vec<HashMap<&[u8], usize>> = vec![HashMap::new(); n + 1];
        let mut col_maps: Vec<HashMap<&[u8], usize>> = vec![HashMap::new(); n + 1];
        let mut placement = Vec::with_capacity(basis.dim());
        for occ in basis.states() {
            let (a, b) = occ.split_at(split);
            let sector = a.iter().map(|&x| x as usize).sum::<usize>();
            let next_row = row_maps[sector].len();
            let row = *row_maps[sector].entry(a).or_insert(next_row);
            let next_col = col_maps[sector].len();
            let col = *col_maps[sector].entry(b).or_insert(next_col);
            placement.push((sector, row, col));
        }
        let sectors = row_maps
            .iter()
            .zip(&col_maps)
            .map(|(r, c)| SectorLayout {
                rows: r.len(),
                cols: c.len(),
            })
            .collect();
        Ok(Self {
            cut,
            sectors,
            placement,
        })
    }

    pub fn cut(&self) -> i64 {
        self.cut
    }

    /// Amplitudes regrouped as one `A x B` matrix per particle-number
    /// sector.
    fn coefficient_blocks(&self, state: &QuantumState) -> Vec<Mat<c64>> {
        let mut blocks: Vec<Mat<c64>> = self
            .sectors
            .iter()
            .map(|s| Mat::zeros(s.rows, s.cols))
            .collect();
        for (&(sector, row, col), amp) in self.placement.iter().zip(state.amplitudes()) {
            blocks[sector][(row, col)] = *amp;
        }
        blocks
    }

    fn check(&self, state: &QuantumState) -> Result<()> {
        if state.amplitudes().len() != self.placement.len() {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }

    /// Reduced density matrix of one side, block diagonal in the number of
    /// particles on that side.
    pub fn reduced_density_matrix(
        &self,
        state: &QuantumState,
        side: Subsystem,
    ) -> Result<ReducedDensityMatrix> {
        self.check(state)?;
        let blocks = self
            .coefficient_blocks(state)
            .into_iter()
            .filter(|c| c.nrows() > 0 && c.ncols() > 0)
            .map(|c| match side {
                Subsystem::A => &c * c.adjoint(),
                // rho_B[b, b'] = sum_a C[a, b] conj(C[a, b'])
                Subsystem::B => c.transpose() * c.conjugate(),
            })
            .collect();
        Ok(ReducedDensityMatrix {
            cut: self.cut,
            side,
            blocks,
        })
    }

    /// Von Neumann entropy (natural log) of either side together with the
    /// trace and smallest eigenvalue of the reduced density matrix. Each
    /// sector is diagonalized on whichever side is smaller; both share the
    /// same nonzero spectrum.
    pub fn entropy(&self, state: &QuantumState) -> Result<SpectrumSummary> {
        self.check(state)?;
        let mut summary = SpectrumSummary::empty();
        for c in self.coefficient_blocks(state) {
            let (r, k) = (c.nrows(), c.ncols());
            if r == 0 || k == 0 {
                continue;
            }
            if r == 1 || k == 1 {
                let p: f64 = (0..r)
                    .flat_map(|i| (0..k).map(move |j| (i, j)))
                    .map(|(i, j)| c[(i, j)].norm_sqr())
                    .sum();
                summary.push(p);
                continue;
            }
            let gram = if r <= k {
                &c * c.adjoint()
            } else {
                c.adjoint() * &c
            };
            for p in hermitian_eigenvalues(&gram)? {
                summary.push(p);
            }
        }
        Ok(summary)
    }
}

/// Entropy plus the spectral checks that come with it for free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSummary {
    pub entropy: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl SpectrumSummary {
    fn empty() -> Self {
        Self {
            entropy: 0.0,
            trace: 0.0,
            min_eigenvalue: f64::INFINITY,
        }
    }

    fn push(&mut self, p: f64) {
        self.trace += p;
        self.min_eigenvalue = self.min_eigenvalue.min(p);
        if p > ENTROPY_CUTOFF {
            self.entropy -= p * p.ln();
        }
    }
}

fn hermitian_eigenvalues(m: &Mat<c64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(MatSide::Lower)
        .map_err(|e| Error::Eigensolver {
            dimension: m.nrows(),
            norm: m.norm_l2(),
            reason: format!("{e:?}"),
        })
}

#[derive(Debug, Clone)]
pub struct ReducedDensityMatrix {
    pub cut: i64,
    pub side: Subsystem,
    /// One Hermitian block per particle number on this side.
    pub blocks: Vec<Mat<c64>>,
}

impl ReducedDensityMatrix {
    pub fn trace(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (0..b.nrows()).map(|i| b[(i, i)].re).sum::<f64>())
            .sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0f64;
        for b in &self.blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    worst = worst.max((b[(i, j)] - b[(j, i)].conj()).norm());
                }
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut all = Vec::new();
        for b in &self.blocks {
            all.extend(hermitian_eigenvalues(b)?);
        }
        Ok(all)
    }

    /// `-Tr[rho log rho]`
    pub fn entropy(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .into_iter()
            .filter(|&p| p > ENTROPY_CUTOFF)
            .map(|p| -p * p.ln())
            .sum())
    }
}

/// Entanglement entropy between sites `-L..=cut` and the rest.
pub fn entanglement_entropy(state: &QuantumState, cut: i64) -> Result<f64> {
    Ok(Bipartition::new(state.basis(), cut)?
        .entropy(state)?
        .entropy)
}

/// What to record while propagating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableRequest {
    pub density: bool,
    pub components: bool,
    /// Last site of subsystem A, when the entropy is wanted.
    pub entropy_cut: Option<i64>,
    pub statistics: bool,
    pub leak: LeakMonitor,
}

impl Default for ObservableRequest {
    fn default() -> Self {
        Self {
            density: true,
            components: true,
            entropy_cut: None,
            statistics: true,
            leak: LeakMonitor::default(),
        }
    }
}

/// Edge-leak watchdog. Once the outermost-site weight reaches `threshold`
/// the run is flagged, and with `halt` set it also stops at that instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakMonitor {
    pub threshold: f64,
    pub halt: bool,
}

impl Default for LeakMonitor {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_LEAK_THRESHOLD,
            halt: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakEvent {
    pub time: f64,
    pub leakage: f64,
}

/// Worst-case violations of the sum rules and reduced-density-matrix
/// properties seen across a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantDiagnostics {
    pub norm_error: f64,
    pub sum_rule_error: f64,
    pub component_sum_error: f64,
    /// Smallest density or component value; `None` until something is
    /// recorded.
    pub min_density: Option<f64>,
    pub rdm_trace_error: f64,
    /// `None` when no entropy was computed.
    pub rdm_min_eigenvalue: Option<f64>,
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Default for InvariantDiagnostics {
    fn default() -> Self {
        Self {
            norm_error: 0.0,
            sum_rule_error: 0.0,
            component_sum_error: 0.0,
            min_density: None,
            rdm_trace_error: 0.0,
            rdm_min_eigenvalue: None,
        }
    }
}

impl InvariantDiagnostics {
    pub fn merge(&mut self, other: &InvariantDiagnostics) {
        self.norm_error = self.norm_error.max(other.norm_error);
        self.sum_rule_error = self.sum_rule_error.max(other.sum_rule_error);
        self.component_sum_error = self.component_sum_error.max(other.component_sum_error);
        self.min_density = min_opt(self.min_density, other.min_density);
        self.rdm_trace_error = self.rdm_trace_error.max(other.rdm_trace_error);
        self.rdm_min_eigenvalue = min_opt(self.rdm_min_eigenvalue, other.rdm_min_eigenvalue);
    }
}

/// Time-indexed observables. Disabled quantities hold `NaN` (scalars) or
/// are left empty (profiles).
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub lattice: Lattice,
    pub particles: usize,
    pub times: Vec<f64>,
    /// `density[t][site]`
    pub density: Vec<Vec<f64>>,
    /// `components[k - 1][t][site]`
    pub components: Vec<Vec<Vec<f64>>>,
    pub entropy: Vec<f64>,
    pub centroid: Vec<f64>,
    pub width: Vec<f64>,
    pub leakage: Vec<f64>,
    pub norm: Vec<f64>,
    pub leak: Option<LeakEvent>,
    pub truncated: bool,
    pub diagnostics: InvariantDiagnostics,
}

impl ObservableSeries {
    pub fn new(lattice: Lattice, particles: usize, request: &ObservableRequest) -> Self {
        Self {
            lattice,
            particles,
            times: Vec::new(),
            density: Vec::new(),
            components: if request.components {
                vec![Vec::new(); particles]
            } else {
                Vec::new()
            },
            entropy: Vec::new(),
            centroid: Vec::new(),
            width: Vec::new(),
            leakage: Vec::new(),
            norm: Vec::new(),
            leak: None,
            truncated: false,
            diagnostics: InvariantDiagnostics::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Moments of occupation component `k` (1-based) at every instant.
    pub fn component_moments(&self, k: usize) -> Option<Vec<Moments>> {
        let rows = self.components.get(k.checked_sub(1)?)?;
        Some(rows.iter().map(|r| moments(r, self.lattice)).collect())
    }

    /// Moments of the total density at every instant.
    pub fn density_moments(&self) -> Vec<Moments> {
        self.density
            .iter()
            .map(|r| moments(r, self.lattice))
            .collect()
    }
}

/// Samples every requested observable of one state into a series.
/// Returns the edge leakage of the state.
pub(crate) struct Recorder<'a> {
    request: &'a ObservableRequest,
    bipartition: Option<Bipartition>,
}

impl<'a> Recorder<'a> {
    pub fn new(basis: &FockBasis, request: &'a ObservableRequest) -> Result<Self> {
        let bipartition = request
            .entropy_cut
            .map(|cut| Bipartition::new(basis, cut))
            .transpose()?;
        Ok(Self {
            request,
            bipartition,
        })
    }

    pub fn record(&self, state: &QuantumState, series: &mut ObservableSeries) -> Result<f64> {
        let n = state.basis().particles();
        let profile = density_components(state);
        let norm = state.norm();
        let diag = &mut series.diagnostics;
        diag.norm_error = diag.norm_error.max((norm - 1.0).abs());
        let sum: f64 = profile.total.iter().sum();
        diag.sum_rule_error = diag.sum_rule_error.max((sum - n as f64).abs());
        let components = profile.components.as_ref().expect("components requested");
        for i in 0..profile.total.len() {
            let parts: f64 = components.iter().map(|c| c[i]).sum();
            diag.component_sum_error = diag
                .component_sum_error
                .max((parts - profile.total[i]).abs());
            diag.min_density = min_opt(diag.min_density, Some(profile.total[i]));
            for c in components {
                diag.min_density = min_opt(diag.min_density, Some(c[i]));
            }
        }

        let stats = packet_statistics(&profile, n);
        series.times.push(state.time());
        series.norm.push(norm);
        series.leakage.push(stats.edge_leakage);
        if self.request.statistics {
            series.centroid.push(stats.centroid);
            series.width.push(stats.width);
        } else {
            series.centroid.push(f64::NAN);
            series.width.push(f64::NAN);
        }
        match &self.bipartition {
            Some(bp) => {
                let spectrum = bp.entropy(state)?;
                let diag = &mut series.diagnostics;
                diag.rdm_trace_error = diag.rdm_trace_error.max((spectrum.trace - 1.0).abs());
                diag.rdm_min_eigenvalue =
                    min_opt(diag.rdm_min_eigenvalue, Some(spectrum.min_eigenvalue));
                series.entropy.push(spectrum.entropy);
            }
            None => series.entropy.push(f64::NAN),
        }
        if self.request.components {
            for (dst, src) in series.components.iter_mut().zip(components) {
                dst.push(src.clone());
            }
        }
        if self.request.density {
            series.density.push(profile.total);
        }
        Ok(stats.edge_leakage)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::sync::Arc;

    fn basis(l: usize, n: usize) -> Arc<FockBasis> {
        Arc::new(FockBasis::new(Lattice::new(l).unwrap(), n).unwrap())
    }

    fn site(l: usize, i: i64) -> usize {
        (i + l as i64) as usize
    }

    #[test]
    fn adjacent_state_density() {
        let b = basis(4, 2);
        let s = QuantumState::product(b, &[0, 1]).unwrap();
        let p = density_components(&s);
        for (k, i) in p.lattice.labels().enumerate() {
            let expected = if i == 0 || i == 1 { 1.0 } else { 0.0 };
            assert_eq!(p.total[k], expected);
            let c = p.components.as_ref().unwrap();
            assert_eq!(c[0][k], expected);
            assert_eq!(c[1][k], 0.0);
        }
        let stats = packet_statistics(&p, 2);
        assert!((stats.centroid - 0.5).abs() < 1e-15);
        assert!((stats.width - 0.5).abs() < 1e-15);
    }

    #[test]
    fn same_site_state_density() {
        let b = basis(4, 2);
        let s = QuantumState::product(b, &[0, 0]).unwrap();
        let p = density_components(&s);
        let c = p.components.as_ref().unwrap();
        assert_eq!(p.total[site(4, 0)], 2.0);
        assert_eq!(c[1][site(4, 0)], 2.0);
        assert!(c[0].iter().all(|&x| x == 0.0));
        assert_eq!(pair_density(&s)[site(4, 0)], 2.0);
        let stats = packet_statistics(&p, 2);
        assert_eq!(stats.centroid, 0.0);
        assert_eq!(stats.width, 0.0);
        assert_eq!(stats.edge_leakage, 0.0);
    }

    #[test]
    fn three_boson_components() {
        let b = basis(3, 3);
        let s = QuantumState::product(b, &[-1, 2, 2]).unwrap();
        let p = density_components(&s);
        let c = p.components.unwrap();
        assert_eq!(c[0][site(3, -1)], 1.0);
        assert_eq!(c[1][site(3, 2)], 2.0);
        assert!(c[2].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn leakage_window() {
        let total = vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
        assert_eq!(edge_leakage(&total), 1.0 + 2.0 + 32.0 + 64.0);
    }

    #[test]
    fn product_state_has_zero_entropy() {
        let b = basis(3, 2);
        let s = QuantumState::product(b.clone(), &[0, 1]).unwrap();
        assert_eq!(entanglement_entropy(&s, 0).unwrap(), 0.0);
        for j in 0..b.dim() {
            let s = QuantumState::basis_state(b.clone(), b.state(j)).unwrap();
            for cut in -3..=2 {
                assert!(entanglement_entropy(&s, cut).unwrap().abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn split_particle_has_ln2_entropy() {
        let b = basis(3, 1);
        let mut amps = vec![Complex64::new(0.0, 0.0); b.dim()];
        amps[site(3, -1)] = Complex64::new(1.0, 0.0);
        amps[site(3, 1)] = Complex64::new(0.0, 1.0);
        let s = QuantumState::from_amplitudes(b, amps, 0.0).unwrap();
        let e = entanglement_entropy(&s, 0).unwrap();
        assert!((e - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn rejects_cuts_outside_the_lattice() {
        let b = basis(2, 1);
        assert!(Bipartition::new(&b, 2).is_err());
        assert!(Bipartition::new(&b, -3).is_err());
        assert!(Bipartition::new(&b, -2).is_ok());
        assert!(Bipartition::new(&b, 1).is_ok());
    }

    fn random_state(b: Arc<FockBasis>, seed: u64) -> QuantumState {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..b.dim())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        QuantumState::from_amplitudes(b, amps, 0.0).unwrap()
    }

    #[test]
    fn both_sides_share_entropy_and_rdm_is_valid() {
        for (l, n) in [(3, 1), (3, 2), (2, 3)] {
            let b = basis(l, n);
            let s = random_state(b.clone(), 11 + n as u64);
            for cut in -(l as i64)..l as i64 {
                let bp = Bipartition::new(&b, cut).unwrap();
                let ra = bp.reduced_density_matrix(&s, Subsystem::A).unwrap();
                let rb = bp.reduced_density_matrix(&s, Subsystem::B).unwrap();
                let (sa, sb) = (ra.entropy().unwrap(), rb.entropy().unwrap());
                assert!((sa - sb).abs() < 1e-10, "cut {cut}: {sa} vs {sb}");
                let fast = bp.entropy(&s).unwrap();
                assert!((fast.entropy - sa).abs() < 1e-10);
                for r in [&ra, &rb] {
                    assert!((r.trace() - 1.0).abs() < 1e-10);
                    assert!(r.hermiticity_error() < 1e-14);
                    assert!(r.eigenvalues().unwrap().iter().all(|&p| p >= -1e-12));
                }
            }
        }
    }

    #[test]
    fn moments_of_empty_profile() {
        let lat = Lattice::new(2).unwrap();
        let m = moments(&[0.0; 5], lat);
        assert_eq!((m.weight, m.centroid, m.width), (0.0, 0.0, 0.0));
        let m = moments(&[0.0, 0.0, 0.0, 3.0, 0.0], lat);
        assert_eq!((m.weight, m.centroid, m.width), (3.0, 1.0, 0.0));
    }
}
