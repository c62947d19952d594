//! Coupling-angle sweeps on the unit circle `G = cos(phi)`, `J = sin(phi)`.
//!
//! `phi` runs over `[-pi/2, pi/2]`, so `G >= 0`; the `G < 0` half follows
//! from `spectrum(-G, -J) = -spectrum(G, J)`. On the unit circle the
//! normalized energy `lambda / sqrt(G^2 + J^2)` is the eigenvalue itself.

use std::f64::consts::FRAC_PI_2;

use crate::basis::HalfInt;
use crate::eigensolve::{spectrum_of_sectors, Spectrum, DEFAULT_DEGENERACY_TOLERANCE};
use crate::error::{Error, Result};
use crate::geometry::Topology;
use crate::hamiltonian::{check_couplings, GeneratorPair};
use crate::parallel::try_map_indexed;
use crate::sectors::SectorBlocks;

pub const DEFAULT_GRID_POINTS: usize = 721;

/// Coarse scan resolution of [`find_max`]: `pi / 2000`.
pub const MAX_SCAN_POINTS: usize = 2001;
/// Golden-section stopping width for [`find_max`].
pub const MAX_REFINE_WIDTH: f64 = 1e-6;
/// Variation of the top curve below which it counts as flat.
pub const FLAT_TOLERANCE: f64 = 1e-9;

/// Symmetry distances below this are "held".
pub const HELD_THRESHOLD: f64 = 1e-9;
/// Symmetry distances above this are "broken"; in between is inconclusive.
pub const BROKEN_THRESHOLD: f64 = 1e-3;

/// `(G, J) = (cos phi, sin phi)`, exact at `phi = 0` and `phi = +-pi/2`.
pub fn couplings(phi: f64) -> (f64, f64) {
    if phi == 0.0 {
        (1.0, 0.0)
    } else if phi == FRAC_PI_2 {
        (0.0, 1.0)
    } else if phi == -FRAC_PI_2 {
        (0.0, -1.0)
    } else {
        (phi.cos(), phi.sin())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiGrid {
    values: Vec<f64>,
}

impl PhiGrid {
    /// `count` evenly spaced angles, mirror-symmetric about 0, endpoints exact.
    pub fn uniform(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidArgument(format!(
                "a phi grid needs at least 2 points, got {count}"
            )));
        }
        let span = (count - 1) as f64;
        let mut values: Vec<f64> = (0..count)
            .map(|i| (2.0 * i as f64 - span) * FRAC_PI_2 / span)
            .collect();
        values[0] = -FRAC_PI_2;
        values[count - 1] = FRAC_PI_2;
        Ok(PhiGrid { values })
    }

    /// Explicit angles; must be finite, inside `[-pi/2, pi/2]` and strictly
    /// increasing. Missing endpoints are added.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty phi grid".into()));
        }
        for &phi in &values {
            if !phi.is_finite() || phi.abs() > FRAC_PI_2 {
                return Err(Error::InvalidArgument(format!(
                    "phi = {phi} is outside [-pi/2, pi/2]"
                )));
            }
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "phi values must be strictly increasing".into(),
            ));
        }
        if values[0] != -FRAC_PI_2 {
            values.insert(0, -FRAC_PI_2);
        }
        if values[values.len() - 1] != FRAC_PI_2 {
            values.push(FRAC_PI_2);
        }
        Ok(PhiGrid { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Default for PhiGrid {
    fn default() -> Self {
        PhiGrid::uniform(DEFAULT_GRID_POINTS).expect("default grid is valid")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepMeta {
    pub n_sites: usize,
    pub topology: Topology,
    pub jc_site: usize,
    pub tolerance: f64,
    /// `|total_mz|` when the sweep was restricted to a pair of sectors.
    pub sector_filter: Option<HalfInt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub grid: PhiGrid,
    /// One normalized spectrum per grid point.
    pub spectra: Vec<Spectrum>,
    pub meta: SweepMeta,
}

fn meta_of(pair: &GeneratorPair, sector_filter: Option<HalfInt>) -> SweepMeta {
    SweepMeta {
        n_sites: pair.n_sites,
        topology: pair.topology(),
        jc_site: pair.jc_site,
        tolerance: DEFAULT_DEGENERACY_TOLERANCE,
        sector_filter,
    }
}

fn run_grid(
    blocks: &SectorBlocks,
    grid: &PhiGrid,
    selection: Option<&[usize]>,
) -> Result<Vec<Spectrum>> {
    let phis = grid.values();
    try_map_indexed(phis.len(), |i| {
        let (g, j) = couplings(phis[i]);
        spectrum_of_sectors(blocks, g, j, selection)
    })
}

/// Full normalized spectrum at every grid angle.
pub fn sweep(pair: &GeneratorPair, grid: &PhiGrid) -> Result<SweepResult> {
    let blocks = SectorBlocks::new(pair)?;
    Ok(SweepResult {
        grid: grid.clone(),
        spectra: run_grid(&blocks, grid, None)?,
        meta: meta_of(pair, None),
    })
}

/// Indices of the sectors with `|total_mz| == abs_total_mz`.
pub fn sectors_with_abs_mz(blocks: &SectorBlocks, abs_total_mz: HalfInt) -> Result<Vec<usize>> {
    let n_bits = blocks.n_sites() as i32 + 1;
    let twice = abs_total_mz.twice();
    if twice < 0 || twice > n_bits || (twice - n_bits) % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "|total_mz| = {abs_total_mz} is not a sector of a {} site molecule (allowed: {})",
            blocks.n_sites(),
            allowed_abs_mz(blocks.n_sites())
        )));
    }
    Ok(blocks
        .sectors()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.total_mz.abs() == abs_total_mz)
        .map(|(i, _)| i)
        .collect())
}

fn allowed_abs_mz(n_sites: usize) -> String {
    let n_bits = n_sites as i32 + 1;
    (0..=n_bits)
        .rev()
        .step_by(2)
        .map(|t| HalfInt::from_twice(t).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Sweep restricted to the two sectors `total_mz = +-abs_total_mz`.
pub fn sector_sweep(
    pair: &GeneratorPair,
    grid: &PhiGrid,
    abs_total_mz: HalfInt,
) -> Result<SweepResult> {
    let blocks = SectorBlocks::new(pair)?;
    let selection = sectors_with_abs_mz(&blocks, abs_total_mz)?;
    Ok(SweepResult {
        grid: grid.clone(),
        spectra: run_grid(&blocks, grid, Some(&selection))?,
        meta: meta_of(pair, Some(abs_total_mz)),
    })
}

/// Spectrum at arbitrary `(G, J)` divided by `sqrt(G^2 + J^2)`.
pub fn normalized_spectrum(pair: &GeneratorPair, g: f64, j: f64) -> Result<Spectrum> {
    check_couplings(g, j)?;
    let norm = g.hypot(j);
    if norm == 0.0 {
        return Err(Error::InvalidArgument(
            "cannot normalize at G = J = 0".into(),
        ));
    }
    let blocks = SectorBlocks::new(pair)?;
    let mut spectrum = spectrum_of_sectors(&blocks, g, j, None)?;
    for e in &mut spectrum.energies {
        *e /= norm;
    }
    Ok(spectrum)
}

/// Largest eigenvalue over all sectors at angle `phi`.
///
/// Flipping every bit (photon included) maps sector `total_mz` onto
/// `-total_mz` and leaves both flip-flop generators unchanged, so the two
/// blocks are isospectral and only `total_mz >= 0` is diagonalized.
pub fn top_energy(blocks: &SectorBlocks, phi: f64) -> Result<f64> {
    let (g, j) = couplings(phi);
    let first = blocks
        .sectors()
        .iter()
        .position(|s| s.total_mz.twice() >= 0)
        .expect("sectors cover both signs");
    let count = blocks.sectors().len() - first;
    let tops = try_map_indexed(count, |offset| {
        Ok(blocks
            .sector_eigenvalues(first + offset, g, j)?
            .last()
            .copied()
            .unwrap_or(f64::NEG_INFINITY))
    })?;
    Ok(tops.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxReport {
    pub e_max: f64,
    pub phi_max: f64,
    pub is_flat: bool,
}

fn golden_section_max<F>(mut lo: f64, mut hi: f64, f: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while hi - lo > MAX_REFINE_WIDTH {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d)?;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok((mid, f(mid)?))
}

/// Location and value of the largest normalized eigenvalue over `[-pi/2, pi/2]`.
///
/// A coarse scan with spacing `pi/2000` brackets the maximum, which is then
/// refined by golden-section search to a width below `1e-6`. A top curve that
/// varies by less than `1e-9` is reported flat at `phi = 0`. When the maximum
/// is attained at mirror angles the non-positive one is reported.
pub fn find_max(pair: &GeneratorPair) -> Result<MaxReport> {
    let blocks = SectorBlocks::new(pair)?;
    let grid = PhiGrid::uniform(MAX_SCAN_POINTS)?;
    let phis = grid.values();
    let tops = try_map_indexed(phis.len(), |i| top_energy(&blocks, phis[i]))?;
    let (lowest, highest) = tops
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| {
            (lo.min(t), hi.max(t))
        });

    if highest - lowest < FLAT_TOLERANCE {
        let centre = phis
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .expect("grid is non-empty");
        return Ok(MaxReport {
            e_max: highest,
            phi_max: phis[centre],
            is_flat: true,
        });
    }

    // leftmost coarse point within the flat tolerance of the best one
    let best = tops
        .iter()
        .position(|&t| t >= highest - FLAT_TOLERANCE)
        .expect("maximum exists");
    let lo = phis[best.saturating_sub(1)];
    let hi = phis[(best + 1).min(phis.len() - 1)];
    let (refined_phi, refined_e) = golden_section_max(lo, hi, |phi| top_energy(&blocks, phi))?;

    let (mut phi_max, mut e_max) = if refined_e > tops[best] {
        (refined_phi, refined_e)
    } else {
        (phis[best], tops[best])
    };

    if phi_max > 0.0 {
        let mirrored = top_energy(&blocks, -phi_max)?;
        if mirrored >= e_max - FLAT_TOLERANCE {
            phi_max = -phi_max;
            e_max = e_max.max(mirrored);
        }
    }
    Ok(MaxReport {
        e_max,
        phi_max,
        is_flat: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Held,
    Broken,
    Inconclusive,
}

impl Verdict {
    pub fn classify(distance: f64) -> Verdict {
        if distance < HELD_THRESHOLD {
            Verdict::Held
        } else if distance > BROKEN_THRESHOLD {
            Verdict::Broken
        } else {
            Verdict::Inconclusive
        }
    }

    fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut all_held = true;
        for v in verdicts {
            match v {
                Verdict::Broken => return Verdict::Broken,
                Verdict::Inconclusive => all_held = false,
                Verdict::Held => {}
            }
        }
        if all_held {
            Verdict::Held
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Held => "held",
            Verdict::Broken => "broken",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryProbe {
    pub phi: f64,
    /// Max distance between sorted spectra at `(G, J)` and `(G, -J)`.
    pub j_sign_distance: f64,
    /// Max distance between sorted spectra at `(G, J)` and `(-G, J)`.
    pub g_sign_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub probes: Vec<SymmetryProbe>,
    pub j_sign: Verdict,
    pub g_sign: Verdict,
}

fn max_distance(a: &Spectrum, b: &Spectrum) -> f64 {
    a.energies
        .iter()
        .zip(&b.energies)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Tests whether the spectrum is unchanged when flipping the sign of `J` or of `G`.
pub fn symmetry_report(pair: &GeneratorPair, probe_phis: &[f64]) -> Result<SymmetryReport> {
    if probe_phis.is_empty() {
        return Err(Error::InvalidArgument("no probe angles given".into()));
    }
    for &phi in probe_phis {
        if !phi.is_finite() || phi.abs() < 1e-6 || FRAC_PI_2 - phi.abs() < 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "probe phi = {phi} must lie strictly inside (-pi/2, 0) or (0, pi/2)"
            )));
        }
    }
    let blocks = SectorBlocks::new(pair)?;
    let probes = try_map_indexed(probe_phis.len(), |i| {
        let phi = probe_phis[i];
        let (g, j) = couplings(phi);
        let base = spectrum_of_sectors(&blocks, g, j, None)?;
        let j_flip = spectrum_of_sectors(&blocks, g, -j, None)?;
        let g_flip = spectrum_of_sectors(&blocks, -g, j, None)?;
        Ok(SymmetryProbe {
            phi,
            j_sign_distance: max_distance(&base, &j_flip),
            g_sign_distance: max_distance(&base, &g_flip),
        })
    })?;
    Ok(SymmetryReport {
        j_sign: Verdict::combine(probes.iter().map(|p| Verdict::classify(p.j_sign_distance))),
        g_sign: Verdict::combine(probes.iter().map(|p| Verdict::classify(p.g_sign_distance))),
        probes,
    })
}
