//! Sparse generators of the JC + XY interaction Hamiltonian.
//!
//! The Hamiltonian is linear in the two couplings,
//! `H(G, J) = G * h_g + J * h_j`, so both generators are built once and a
//! sweep only rescales them. `h_g` is the Jaynes-Cummings flip-flop between
//! the photon pseudo-spin (bit 0) and spin site `k`; `h_j` is the XY exchange
//! `-2 J w (SxSx + SySy)` summed once per bond, which has matrix element
//! `-J w` between the exchanged configurations.

use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::basis::{dimension, encode, validate_sites, BasisState, Spin};
use crate::error::{Error, Result};
use crate::geometry::{build_coupling_map, CouplingMap, Topology};

/// Upper-triangle coordinate storage of a real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetric {
    dim: usize,
    /// `(row, col, value)` with `row <= col`, sorted, no zeros.
    entries: Vec<(u32, u32, f64)>,
}

impl SparseSymmetric {
    /// Builds from triplets anywhere in the matrix; each one is folded into the
    /// upper triangle and duplicates are summed.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut merged: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for (row, col, value) in triplets {
            if row >= dim || col >= dim {
                return Err(Error::InvalidArgument(format!(
                    "entry ({row}, {col}) outside a {dim}x{dim} matrix"
                )));
            }
            if !value.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite entry at ({row}, {col})"
                )));
            }
            let key = (row.min(col) as u32, row.max(col) as u32);
            *merged.entry(key).or_insert(0.0) += value;
        }
        let entries = merged
            .into_iter()
            .filter(|&(_, v)| v != 0.0)
            .map(|((r, c), v)| (r, c, v))
            .collect();
        Ok(SparseSymmetric { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        SparseSymmetric {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(u32, u32, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn trace(&self) -> f64 {
        self.entries
            .iter()
            .filter(|(r, c, _)| r == c)
            .map(|e| e.2)
            .sum()
    }

    /// `a * x + b * y` entrywise; entries that cancel are dropped.
    pub fn linear_combination(a: f64, x: &Self, b: f64, y: &Self) -> Result<Self> {
        if x.dim != y.dim {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch {} vs {}",
                x.dim, y.dim
            )));
        }
        let mut out = Vec::with_capacity(x.entries.len() + y.entries.len());
        let (mut p, mut q) = (0, 0);
        while p < x.entries.len() || q < y.entries.len() {
            let kx = x.entries.get(p).map(|e| (e.0, e.1));
            let ky = y.entries.get(q).map(|e| (e.0, e.1));
            let (key, value) = match (kx, ky) {
                (Some(u), Some(v)) if u == v => {
                    let value = a * x.entries[p].2 + b * y.entries[q].2;
                    p += 1;
                    q += 1;
                    (u, value)
                }
                (Some(u), Some(v)) if u < v => {
                    p += 1;
                    (u, a * x.entries[p - 1].2)
                }
                (Some(u), None) => {
                    p += 1;
                    (u, a * x.entries[p - 1].2)
                }
                (_, Some(v)) => {
                    q += 1;
                    (v, b * y.entries[q - 1].2)
                }
                (None, None) => unreachable!(),
            };
            if value != 0.0 {
                out.push((key.0, key.1, value));
            }
        }
        Ok(SparseSymmetric {
            dim: x.dim,
            entries: out,
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(
            x.len(),
            self.dim,
            "vector length must match matrix dimension"
        );
        let mut y = vec![0.0; self.dim];
        for &(r, c, v) in &self.entries {
            let (r, c) = (r as usize, c as usize);
            y[r] += v * x[c];
            if r != c {
                y[c] += v * x[r];
            }
        }
        y
    }

    /// Row-major dense copy with both triangles filled.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut dense = vec![0.0; n * n];
        for &(r, c, v) in &self.entries {
            let (r, c) = (r as usize, c as usize);
            dense[r * n + c] = v;
            dense[c * n + r] = v;
        }
        dense
    }

    /// Writes `row col value` lines, 1-indexed, lower triangle, sorted by row then column.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut lower: Vec<(u32, u32, f64)> =
            self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect();
        lower.sort_by_key(|e| (e.0, e.1));
        for (r, c, v) in lower {
            writeln!(out, "{} {} {:?}", r + 1, c + 1, v)?;
        }
        Ok(())
    }
}

fn validate_jc_site(n_sites: usize, jc_site: usize) -> Result<()> {
    validate_sites(n_sites)?;
    if !(1..=n_sites).contains(&jc_site) {
        return Err(Error::InvalidArgument(format!(
            "JC site must be in 1..={n_sites}, got {jc_site}"
        )));
    }
    Ok(())
}

/// JC coupling `a S_k^+ + a^dag S_k^-` as a flip-flop between bit 0 and bit `k`.
pub fn build_jc_generator(n_sites: usize, jc_site: usize) -> Result<SparseSymmetric> {
    validate_jc_site(n_sites, jc_site)?;
    let site_bit = 1u32 << jc_site;
    let mut entries = Vec::with_capacity(1 << (n_sites - 1));
    for code in 0..dimension(n_sites) as u32 {
        // photon present, site k down  <->  no photon, site k up
        if code & 1 == 1 && code & site_bit == 0 {
            let partner = code ^ 1 ^ site_bit;
            entries.push((code.min(partner), code.max(partner), 1.0));
        }
    }
    entries.sort_by_key(|e| (e.0, e.1));
    Ok(SparseSymmetric {
        dim: dimension(n_sites),
        entries,
    })
}

/// XY exchange over every bond of the map, matrix element `-w` per flip-flop.
pub fn build_xy_generator(map: &CouplingMap) -> Result<SparseSymmetric> {
    map.validate()?;
    let dim = dimension(map.n_sites);
    let mut entries = Vec::new();
    for bond in &map.bonds {
        let (bi, bj) = (1u32 << bond.i, 1u32 << bond.j);
        for code in 0..dim as u32 {
            if code & bi != 0 && code & bj == 0 {
                let partner = code ^ bi ^ bj;
                entries.push((code.min(partner), code.max(partner), -bond.weight));
            }
        }
    }
    entries.sort_by_key(|e| (e.0, e.1));
    Ok(SparseSymmetric { dim, entries })
}

/// Truncated bosonic ladder: `a|n> = sqrt(n)|n-1>`, `a^dag|n> = sqrt(n+1)|n+1>` for `n + 1 <= max`.
fn ladder(occupation: u8, raise: bool, max_occupation: u8) -> Option<(u8, f64)> {
    if raise {
        (occupation < max_occupation)
            .then(|| (occupation + 1, (f64::from(occupation) + 1.0).sqrt()))
    } else {
        (occupation > 0).then(|| (occupation - 1, f64::from(occupation).sqrt()))
    }
}

/// Spin-½ ladder on a single site: `S^+|down> = |up>`, `S^-|up> = |down>`.
fn spin_ladder(spin: Spin, raise: bool) -> Option<Spin> {
    match (spin, raise) {
        (Spin::Down, true) => Some(Spin::Up),
        (Spin::Up, false) => Some(Spin::Down),
        _ => None,
    }
}

/// The same JC generator built from operator products on the photon Fock space
/// `{|0>, |1>}` tensored with the spin configurations, without the pseudo-spin shortcut.
pub fn build_photon_explicit(n_sites: usize, jc_site: usize) -> Result<SparseSymmetric> {
    validate_jc_site(n_sites, jc_site)?;
    const MAX_PHOTONS: u8 = 1;
    let mut triplets = Vec::new();
    for photons in 0..=MAX_PHOTONS {
        for spin_bits in 0..1u32 << n_sites {
            let spins: Vec<Spin> = (0..n_sites)
                .map(|s| {
                    if spin_bits >> s & 1 == 1 {
                        Spin::Up
                    } else {
                        Spin::Down
                    }
                })
                .collect();
            let ket = encode(photons, &spins, n_sites)?;
            // a S_k^+  and  a^dag S_k^-
            for photon_raise in [false, true] {
                let spin_raise = !photon_raise;
                let Some(flipped) = spin_ladder(spins[jc_site - 1], spin_raise) else {
                    continue;
                };
                let Some((new_photons, amplitude)) = ladder(photons, photon_raise, MAX_PHOTONS)
                else {
                    continue;
                };
                let mut new_spins = spins.clone();
                new_spins[jc_site - 1] = flipped;
                let bra = encode(new_photons, &new_spins, n_sites)?;
                triplets.push((bra.code() as usize, ket.code() as usize, amplitude));
            }
        }
    }
    // Each symmetric pair was visited from both sides; keep one copy.
    SparseSymmetric::from_triplets(
        dimension(n_sites),
        triplets.into_iter().filter(|&(bra, ket, _)| bra <= ket),
    )
}

/// The two coupling generators of one model instance.
#[derive(Debug, Clone)]
pub struct GeneratorPair {
    pub h_g: SparseSymmetric,
    pub h_j: SparseSymmetric,
    pub n_sites: usize,
    pub jc_site: usize,
    pub coupling: CouplingMap,
}

impl GeneratorPair {
    pub fn new(n_sites: usize, topology: Topology, jc_site: usize) -> Result<Self> {
        let coupling = build_coupling_map(n_sites, topology)?;
        Self::from_coupling_map(coupling, jc_site)
    }

    pub fn from_coupling_map(coupling: CouplingMap, jc_site: usize) -> Result<Self> {
        let n_sites = coupling.n_sites;
        Ok(GeneratorPair {
            h_g: build_jc_generator(n_sites, jc_site)?,
            h_j: build_xy_generator(&coupling)?,
            n_sites,
            jc_site,
            coupling,
        })
    }

    pub fn topology(&self) -> Topology {
        self.coupling.topology
    }

    pub fn dim(&self) -> usize {
        dimension(self.n_sites)
    }

    /// `G * h_g + J * h_j`.
    pub fn assemble(&self, g: f64, j: f64) -> Result<SparseSymmetric> {
        check_couplings(g, j)?;
        SparseSymmetric::linear_combination(g, &self.h_g, j, &self.h_j)
    }

    /// The fully polarized states `|1, up...up>` and `|0, down...down>`.
    pub fn polarized_states(&self) -> [BasisState; 2] {
        let top = (dimension(self.n_sites) - 1) as u32;
        [
            BasisState::from_code(top, self.n_sites).expect("valid code"),
            BasisState::from_code(0, self.n_sites).expect("valid code"),
        ]
    }
}

pub(crate) fn check_couplings(g: f64, j: f64) -> Result<()> {
    if g.is_finite() && j.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "couplings must be finite, got G = {g}, J = {j}"
        )))
    }
}
