//! Sparse Fock-space simulation of the stimulated-emission cloner: the
//! post-selected down-conversion output, polarisation-preserving beam
//! splitters, photon-number post-selection and clone fidelities.
//!
//! Every spatial mode carries a vertical and a horizontal polarisation.
//! Occupation vectors are indexed `2 * spatial + polarisation`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default per-mode photon cutoff.
pub const DEFAULT_CUTOFF: u8 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    V = 0,
    H = 1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeLabel {
    pub spatial: usize,
    pub polarization: Polarization,
}

impl ModeLabel {
    pub fn index(self) -> usize {
        2 * self.spatial + self.polarization as usize
    }
}

/// Occupation numbers of every mode.
pub type FockBasisState = Vec<u8>;

/// A superposition of Fock basis states over a fixed set of spatial modes.
#[derive(Clone, Debug, PartialEq)]
pub struct OpticalState {
    spatial_modes: usize,
    cutoff: u8,
    amplitudes: BTreeMap<FockBasisState, Complex64>,
}

/// A beam splitter acting identically on both polarisations:
/// `a^+ -> sqrt(T) a^+ + sqrt(1-T) b^+`, `b^+ -> sqrt(T) b^+ - sqrt(1-T) a^+`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamSplitterSpec {
    pub a: usize,
    pub b: usize,
    pub transmittivity: f64,
}

impl BeamSplitterSpec {
    pub fn new(a: usize, b: usize, transmittivity: f64) -> Result<Self> {
        if a == b {
            return Err(Error::Domain("beam splitter needs two distinct modes"));
        }
        if !(0.0..=1.0).contains(&transmittivity) {
            return Err(Error::Domain("transmittivity must lie in [0, 1]"));
        }
        Ok(BeamSplitterSpec { a, b, transmittivity })
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn cpow(z: Complex64, k: u32) -> Complex64 {
    (0..k).fold(Complex64::new(1.0, 0.0), |acc, _| acc * z)
}

impl OpticalState {
    /// Vacuum on `spatial_modes` spatial modes.
    pub fn vacuum(spatial_modes: usize, cutoff: u8) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(alloc::vec![0; 2 * spatial_modes], Complex64::new(1.0, 0.0));
        OpticalState { spatial_modes, cutoff, amplitudes }
    }

    /// State from explicit amplitudes; not normalised.
    pub fn from_terms(
        spatial_modes: usize,
        cutoff: u8,
        terms: impl IntoIterator<Item = (FockBasisState, Complex64)>,
    ) -> Result<Self> {
        let mut amplitudes = BTreeMap::new();
        for (occ, amp) in terms {
            if occ.len() != 2 * spatial_modes {
                return Err(Error::Shape("occupation vector length differs from 2 x spatial modes"));
            }
            if let Some(&n) = occ.iter().find(|&&n| n > cutoff) {
                return Err(Error::Cutoff { count: u32::from(n), cutoff });
            }
            *amplitudes.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        Ok(OpticalState { spatial_modes, cutoff, amplitudes })
    }

    pub fn spatial_modes(&self) -> usize {
        self.spatial_modes
    }

    pub fn cutoff(&self) -> u8 {
        self.cutoff
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockBasisState, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, occupations: &[u8]) -> Complex64 {
        self.amplitudes.get(occupations).copied().unwrap_or_default()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for a in self.amplitudes.values_mut() {
                *a /= n;
            }
        }
        self
    }

    /// Appends vacuum spatial modes.
    pub fn with_extra_modes(self, extra: usize) -> Self {
        let amplitudes = self
            .amplitudes
            .into_iter()
            .map(|(mut occ, a)| {
                occ.resize(occ.len() + 2 * extra, 0);
                (occ, a)
            })
            .collect();
        OpticalState { spatial_modes: self.spatial_modes + extra, cutoff: self.cutoff, amplitudes }
    }

    /// Total photons in a spatial mode for each support term (sorted, unique).
    pub fn photon_counts(&self, spatial: usize) -> Vec<u32> {
        let mut counts: Vec<u32> =
            self.amplitudes.keys().map(|o| u32::from(o[2 * spatial]) + u32::from(o[2 * spatial + 1])).collect();
        counts.sort_unstable();
        counts.dedup();
        counts
    }

    /// Linear substitution of the creation operators of two modes (flat
    /// indices): `a_i^+ -> u[0][0] a_i^+ + u[1][0] a_j^+` and
    /// `a_j^+ -> u[0][1] a_i^+ + u[1][1] a_j^+`.
    pub fn apply_mode_transform(&self, i: usize, j: usize, u: [[Complex64; 2]; 2]) -> Result<Self> {
        let modes = 2 * self.spatial_modes;
        if i >= modes || j >= modes || i == j {
            return Err(Error::Domain("invalid mode pair"));
        }
        let mut out: BTreeMap<FockBasisState, Complex64> = BTreeMap::new();
        for (occ, amp) in &self.amplitudes {
            let (n, m) = (u32::from(occ[i]), u32::from(occ[j]));
            let norm = 1.0 / (factorial(n) * factorial(m)).sqrt();
            for k in 0..=n {
                let ck = cpow(u[0][0], k) * cpow(u[1][0], n - k) * binomial(n, k);
                if ck.norm_sqr() == 0.0 {
                    continue;
                }
                for l in 0..=m {
                    let cl = cpow(u[0][1], l) * cpow(u[1][1], m - l) * binomial(m, l);
                    if cl.norm_sqr() == 0.0 {
                        continue;
                    }
                    let (p, q) = (k + l, n + m - k - l);
                    let limit = u32::from(self.cutoff);
                    if p > limit || q > limit {
                        return Err(Error::Cutoff { count: p.max(q), cutoff: self.cutoff });
                    }
                    let weight = (factorial(p) * factorial(q)).sqrt() * norm;
                    let mut target = occ.clone();
                    target[i] = p as u8;
                    target[j] = q as u8;
                    *out.entry(target).or_default() += *amp * ck * cl * weight;
                }
            }
        }
        out.retain(|_, a| a.norm_sqr() > 1e-30);
        Ok(OpticalState { spatial_modes: self.spatial_modes, cutoff: self.cutoff, amplitudes: out })
    }

    pub fn apply_beam_splitter(&self, bs: BeamSplitterSpec) -> Result<Self> {
        if bs.a >= self.spatial_modes || bs.b >= self.spatial_modes {
            return Err(Error::Domain("beam splitter refers to a missing spatial mode"));
        }
        let t = Complex64::new(bs.transmittivity.sqrt(), 0.0);
        let r = Complex64::new((1.0 - bs.transmittivity).sqrt(), 0.0);
        let u = [[t, -r], [r, t]];
        let mut s = self.clone();
        for pol in [Polarization::V, Polarization::H] {
            let i = ModeLabel { spatial: bs.a, polarization: pol }.index();
            let j = ModeLabel { spatial: bs.b, polarization: pol }.index();
            s = s.apply_mode_transform(i, j, u)?;
        }
        Ok(s)
    }

    /// Applies the same polarisation unitary (columns are the images of
    /// `V` and `H`) to every spatial mode.
    pub fn apply_polarization_rotation(&self, u: [[Complex64; 2]; 2]) -> Result<Self> {
        let mut s = self.clone();
        for spatial in 0..self.spatial_modes {
            s = s.apply_mode_transform(2 * spatial, 2 * spatial + 1, u)?;
        }
        Ok(s)
    }

    /// Keeps the terms with the given total photon number in each listed
    /// spatial mode. Returns the renormalised state and the probability of
    /// the pattern; an impossible pattern gives an empty state and zero.
    pub fn post_select(&self, pattern: &[(usize, u32)]) -> Result<(Self, f64)> {
        if pattern.iter().any(|&(s, _)| s >= self.spatial_modes) {
            return Err(Error::Domain("pattern refers to a missing spatial mode"));
        }
        let total = self.norm_sqr();
        let kept: BTreeMap<FockBasisState, Complex64> = self
            .amplitudes
            .iter()
            .filter(|(o, _)| pattern.iter().all(|&(s, n)| u32::from(o[2 * s]) + u32::from(o[2 * s + 1]) == n))
            .map(|(o, a)| (o.clone(), *a))
            .collect();
        let state = OpticalState { spatial_modes: self.spatial_modes, cutoff: self.cutoff, amplitudes: kept };
        let p = if total > 0.0 { state.norm_sqr() / total } else { 0.0 };
        if p == 0.0 {
            let empty = OpticalState { amplitudes: BTreeMap::new(), ..state };
            return Ok((empty, 0.0));
        }
        Ok((state.normalized(), p))
    }

    /// Single-photon polarisation density matrix of a spatial mode,
    /// `rho[i][j] = <a_j^+ a_i> / k` sector by sector in the photon number
    /// `k` of that mode (`i, j` in `V, H`).
    pub fn reduced_polarization(&self, spatial: usize) -> Result<[[Complex64; 2]; 2]> {
        if spatial >= self.spatial_modes {
            return Err(Error::Domain("missing spatial mode"));
        }
        let norm = self.norm_sqr();
        if norm == 0.0 {
            return Err(Error::Domain("empty state"));
        }
        let base = 2 * spatial;
        let mut rho = [[Complex64::default(); 2]; 2];
        for (occ, amp) in &self.amplitudes {
            let k = u32::from(occ[base]) + u32::from(occ[base + 1]);
            if k == 0 {
                return Err(Error::Domain("mode holds no photon in some support term"));
            }
            for i in 0..2 {
                for j in 0..2 {
                    // <a_j^+ a_i>: remove a photon from i, add it to j.
                    let ni = occ[base + i];
                    if ni == 0 {
                        continue;
                    }
                    let mut other = occ.clone();
                    other[base + i] -= 1;
                    other[base + j] += 1;
                    let c = self.amplitude(&other);
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    let f = (f64::from(ni) * f64::from(other[base + j])).sqrt();
                    rho[i][j] += c.conj() * *amp * f / f64::from(k);
                }
            }
        }
        for row in rho.iter_mut() {
            for x in row.iter_mut() {
                *x /= norm;
            }
        }
        Ok(rho)
    }

    /// Fidelity of one photon of a spatial mode with the reference state
    /// `(c_V, c_H)`.
    pub fn single_clone_fidelity_against(&self, spatial: usize, reference: [Complex64; 2]) -> Result<f64> {
        let rho = self.reduced_polarization(spatial)?;
        let mut f = Complex64::default();
        for i in 0..2 {
            for j in 0..2 {
                f += reference[i].conj() * rho[i][j] * reference[j];
            }
        }
        Ok(f.re)
    }

    /// Fidelity of one photon of a spatial mode with `|V>`.
    pub fn single_clone_fidelity(&self, spatial: usize) -> Result<f64> {
        let v = [Complex64::new(1.0, 0.0), Complex64::default()];
        self.single_clone_fidelity_against(spatial, v)
    }
}

/// Post-selected down-conversion output with `M` photons in the signal for
/// `N` vertically polarised input photons, on spatial modes signal (0) and
/// idler (1):
/// `sum_j (-1)^j sqrt(C(M-j, N)) |M-j>_{V,s} |j>_{H,s} |j>_{V,i} |M-N-j>_{H,i}`,
/// normalised.
pub fn pdc_output(n: u32, m: u32) -> Result<OpticalState> {
    pdc_output_with_cutoff(n, m, DEFAULT_CUTOFF)
}

pub fn pdc_output_with_cutoff(n: u32, m: u32, cutoff: u8) -> Result<OpticalState> {
    if n == 0 || m < n {
        return Err(Error::Domain("need M >= N >= 1"));
    }
    if m > u32::from(cutoff) {
        return Err(Error::Cutoff { count: m, cutoff });
    }
    let terms = (0..=m - n).map(|j| {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let occ = alloc::vec![(m - j) as u8, j as u8, j as u8, (m - n - j) as u8];
        (occ, Complex64::new(sign * binomial(m - j, n).sqrt(), 0.0))
    });
    Ok(OpticalState::from_terms(2, cutoff, terms)?.normalized())
}

/// Knobs of the two-group scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilipConfig {
    /// Transmittivity of the clone splitter; defaults to `M_A / M`.
    pub split: Option<f64>,
    pub cutoff: u8,
    /// Polarisation unitary applied to every mode after down-conversion;
    /// fidelities are then measured against the rotated input.
    pub rotation: Option<[[Complex64; 2]; 2]>,
}

impl Default for FilipConfig {
    fn default() -> Self {
        FilipConfig { split: None, cutoff: DEFAULT_CUTOFF, rotation: None }
    }
}

/// Result of a post-selected scheme; `fidelities` is `None` when the
/// detection pattern has zero probability.
#[derive(Clone, Debug, PartialEq)]
pub struct OpticalOutcome {
    pub fidelities: Option<Vec<f64>>,
    pub probability: f64,
    /// Conditional state after post-selection.
    pub state: OpticalState,
}

fn reference_state(rotation: Option<[[Complex64; 2]; 2]>) -> [Complex64; 2] {
    match rotation {
        Some(u) => [u[0][0], u[1][0]],
        None => [Complex64::new(1.0, 0.0), Complex64::default()],
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain("transmittivity must lie in (0, 1]"));
    }
    Ok(())
}

/// Two-group scheme: the signal of `pdc_output(N, M_A + M_B)` is split into
/// clone modes 1 (spatial 0) and 2 (spatial 2); mode 2 meets the idler
/// (spatial 1) at a beam splitter of transmittivity `T`; `M_A` photons are
/// then required in mode 1 and `M_B` in mode 2. Returns `[F_A, F_B]`.
pub fn filip_scheme(n: u32, m_a: u32, m_b: u32, t: f64, config: &FilipConfig) -> Result<OpticalOutcome> {
    check_t(t)?;
    if m_a == 0 || m_b == 0 {
        return Err(Error::Domain("both clone groups must be non-empty"));
    }
    let m = m_a + m_b;
    if 2 * m - n > u32::from(config.cutoff) * 2 {
        return Err(Error::Cutoff { count: 2 * m - n, cutoff: config.cutoff });
    }
    let split = config.split.unwrap_or(f64::from(m_a) / f64::from(m));
    let mut s = pdc_output_with_cutoff(n, m, config.cutoff)?.with_extra_modes(1);
    if let Some(u) = config.rotation {
        s = s.apply_polarization_rotation(u)?;
    }
    s = s.apply_beam_splitter(BeamSplitterSpec::new(0, 2, split)?)?;
    s = s.apply_beam_splitter(BeamSplitterSpec::new(2, 1, t)?)?;
    let (post, p) = s.post_select(&[(0, m_a), (2, m_b)])?;
    if p == 0.0 {
        return Ok(OpticalOutcome { fidelities: None, probability: 0.0, state: post });
    }
    let reference = reference_state(config.rotation);
    let f = alloc::vec![
        post.single_clone_fidelity_against(0, reference)?,
        post.single_clone_fidelity_against(2, reference)?,
    ];
    Ok(OpticalOutcome { fidelities: Some(f), probability: p, state: post })
}

/// Three-group scheme built on `pdc_output(1, 3)`: the signal splits into
/// clone A (spatial 0) and a pair (spatial 2); the pair meets the idler
/// (spatial 1) at `T1`, then splits into clones B (spatial 2) and C
/// (spatial 3); the idler output then meets C at `T2`, entering on the
/// first port. One photon is required in each of A, B, C. Fidelities are
/// returned sorted in decreasing order.
pub fn three_way_scheme(t1: f64, t2: f64) -> Result<OpticalOutcome> {
    check_t(t1)?;
    check_t(t2)?;
    let mut s = pdc_output(1, 3)?.with_extra_modes(2);
    s = s.apply_beam_splitter(BeamSplitterSpec::new(0, 2, 1.0 / 3.0)?)?;
    s = s.apply_beam_splitter(BeamSplitterSpec::new(2, 1, t1)?)?;
    s = s.apply_beam_splitter(BeamSplitterSpec::new(2, 3, 0.5)?)?;
    s = s.apply_beam_splitter(BeamSplitterSpec::new(1, 3, t2)?)?;
    let (post, p) = s.post_select(&[(0, 1), (2, 1), (3, 1)])?;
    if p == 0.0 {
        return Ok(OpticalOutcome { fidelities: None, probability: 0.0, state: post });
    }
    let mut f =
        alloc::vec![post.single_clone_fidelity(0)?, post.single_clone_fidelity(2)?, post.single_clone_fidelity(3)?,];
    f.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    Ok(OpticalOutcome { fidelities: Some(f), probability: p, state: post })
}

/// Closed-form fidelities `(F_A, F_B)` of the two-group scheme for the
/// solved tuples `(1,1,2)`, `(1,2,1)`, `(2,2,1)`, `(2,1,2)`, `(N,N,1)`,
/// `(N,1,N)`. Tuples with the single clone in group A use `T -> 1/T`.
pub fn optical_formula(n: u32, m_a: u32, m_b: u32, t: f64) -> Result<(f64, f64)> {
    check_t(t)?;
    let nn1 = |n: u32, t: f64| {
        let nf = f64::from(n);
        let den = (nf + 2.0) * (2.0 * nf * t * t - 2.0 * nf * t + nf + 1.0);
        let group = 1.0 - (2.0 * t - 1.0) * (2.0 * t - 1.0) / den;
        let single = 1.0 - (nf * t - nf - 1.0) * (nf * t - nf - 1.0) / den;
        (group, single)
    };
    let one_pair = |t: f64| {
        let den = 12.0 * t * t - 12.0 * t + 9.0;
        ((4.0 * t * t - 4.0 * t + 7.0) / den, (8.0 * t * t - 4.0 * t + 3.0) / den)
    };
    match (n, m_a, m_b) {
        (1, 1, 2) => Ok(one_pair(t)),
        (1, 2, 1) => {
            let (single, pair) = one_pair(1.0 / t);
            Ok((pair, single))
        }
        (n, a, 1) if a == n && n >= 1 => Ok(nn1(n, t)),
        (n, 1, b) if b == n && n >= 1 => {
            let (group, single) = nn1(n, 1.0 / t);
            Ok((single, group))
        }
        _ => Err(Error::Domain("no closed form for this optical tuple")),
    }
}
