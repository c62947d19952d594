//! Block decomposition of the configuration space by the invariant `Inv = ½ + 𝓜_z`.
//!
//! Both generators conserve the number of up bits among all `N+1` sites, so
//! every sector is closed under `H(G, J)` and can be diagonalized on its own.

use std::collections::HashMap;

use crate::basis::{dimension, inv_of, twice_total_mz, validate_sites, HalfInt};
use crate::eigensolve::{eigvals_symmetric, DenseMatrix};
use crate::error::{Error, Result};
use crate::hamiltonian::{GeneratorPair, SparseSymmetric};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sector {
    pub total_mz: HalfInt,
    /// Member codes in ascending order.
    pub members: Vec<u32>,
}

impl Sector {
    pub fn dim(&self) -> usize {
        self.members.len()
    }

    pub fn inv_value(&self) -> HalfInt {
        self.total_mz + HalfInt::HALF
    }

    /// True for the two one-state sectors `|1, up...up>` and `|0, down...down>`.
    pub fn is_extremal(&self, n_sites: usize) -> bool {
        self.total_mz.abs().twice() == n_sites as i32 + 1
    }

    fn local_index(&self) -> HashMap<u32, u32> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, &code)| (code, i as u32))
            .collect()
    }
}

/// All `N + 2` sectors ordered by ascending `total_mz`.
pub fn decompose(n_sites: usize) -> Result<Vec<Sector>> {
    validate_sites(n_sites)?;
    let n_bits = n_sites as i32 + 1;
    let mut sectors: Vec<Sector> = (0..=n_bits)
        .map(|up| Sector {
            total_mz: HalfInt::from_twice(2 * up - n_bits),
            members: Vec::new(),
        })
        .collect();
    for code in 0..dimension(n_sites) as u32 {
        sectors[code.count_ones() as usize].members.push(code);
    }
    Ok(sectors)
}

fn straddle_error(row: u32, col: u32, n_sites: usize) -> Error {
    Error::SectorStraddle {
        row: row as usize,
        col: col as usize,
        row_inv: inv_of(row, n_sites).to_string(),
        col_inv: inv_of(col, n_sites).to_string(),
    }
}

fn n_sites_of(dim: usize) -> Result<usize> {
    if dim.is_power_of_two() && dim >= 4 {
        Ok(dim.trailing_zeros() as usize - 1)
    } else {
        Err(Error::InvalidArgument(format!(
            "matrix dimension {dim} is not 2^(N+1) for N >= 1"
        )))
    }
}

/// Local `(row, col, value)` entries of `h` inside `sector`, upper triangle.
fn sector_entries(
    h: &SparseSymmetric,
    sector: &Sector,
    index: &HashMap<u32, u32>,
    n_sites: usize,
) -> Result<Vec<(u32, u32, f64)>> {
    let mut local = Vec::new();
    for &(r, c, v) in h.entries() {
        match (index.get(&r), index.get(&c)) {
            (Some(&a), Some(&b)) => local.push((a, b, v)),
            (None, None) => {}
            _ => return Err(straddle_error(r, c, n_sites)),
        }
    }
    debug_assert!(local
        .iter()
        .all(|&(a, b, _)| (a as usize) < sector.dim() && (b as usize) < sector.dim()));
    Ok(local)
}

/// Dense restriction of `h` to one sector, in the sector's member order.
pub fn extract_block(h: &SparseSymmetric, sector: &Sector) -> Result<DenseMatrix> {
    let n_sites = n_sites_of(h.dim())?;
    let local = sector_entries(h, sector, &sector.local_index(), n_sites)?;
    let mut block = DenseMatrix::zeros(sector.dim());
    for (a, b, v) in local {
        block.set(a as usize, b as usize, v);
        block.set(b as usize, a as usize, v);
    }
    Ok(block)
}

/// `max |(Inv(row) - Inv(col)) * H[row][col]|` over the stored entries.
pub fn verify_commutation(h: &SparseSymmetric, n_sites: usize) -> f64 {
    h.entries()
        .iter()
        .map(|&(r, c, v)| {
            let delta = twice_total_mz(r, n_sites) - twice_total_mz(c, n_sites);
            (f64::from(delta) / 2.0 * v).abs()
        })
        .fold(0.0, f64::max)
}

/// Per-sector local entries of both generators, prepared once per model so
/// that each `(G, J)` point only fills dense blocks.
#[derive(Debug, Clone)]
pub struct SectorBlocks {
    n_sites: usize,
    sectors: Vec<Sector>,
    g_parts: Vec<Vec<(u32, u32, f64)>>,
    j_parts: Vec<Vec<(u32, u32, f64)>>,
}

impl SectorBlocks {
    pub fn new(pair: &GeneratorPair) -> Result<Self> {
        let n_sites = pair.n_sites;
        let sectors = decompose(n_sites)?;
        let mut g_parts = Vec::with_capacity(sectors.len());
        let mut j_parts = Vec::with_capacity(sectors.len());
        for sector in &sectors {
            let index = sector.local_index();
            g_parts.push(sector_entries(&pair.h_g, sector, &index, n_sites)?);
            j_parts.push(sector_entries(&pair.h_j, sector, &index, n_sites)?);
        }
        Ok(SectorBlocks {
            n_sites,
            sectors,
            g_parts,
            j_parts,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    /// Dense block of `G * h_g + J * h_j` on sector `idx`.
    pub fn block(&self, idx: usize, g: f64, j: f64) -> DenseMatrix {
        let mut block = DenseMatrix::zeros(self.sectors[idx].dim());
        for (part, scale) in [(&self.g_parts[idx], g), (&self.j_parts[idx], j)] {
            for &(a, b, v) in part {
                let (a, b) = (a as usize, b as usize);
                let value = block.get(a, b) + scale * v;
                block.set(a, b, value);
                if a != b {
                    block.set(b, a, value);
                }
            }
        }
        block
    }

    /// Ascending eigenvalues of one sector block.
    pub fn sector_eigenvalues(&self, idx: usize, g: f64, j: f64) -> Result<Vec<f64>> {
        eigvals_symmetric(&self.block(idx, g, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Topology;

    fn dims(n: usize) -> Vec<usize> {
        decompose(n).unwrap().iter().map(Sector::dim).collect()
    }

    #[test]
    fn sector_dimensions() {
        assert_eq!(dims(5), vec![1, 6, 15, 20, 15, 6, 1]);
        assert_eq!(dims(2), vec![1, 3, 3, 1]);
        let labels: Vec<i32> = decompose(6)
            .unwrap()
            .iter()
            .map(|s| s.total_mz.twice())
            .collect();
        assert_eq!(labels, vec![-7, -5, -3, -1, 1, 3, 5, 7]);
        assert_eq!(*dims(10).iter().max().unwrap(), 462);
    }

    #[test]
    fn sectors_partition_the_space() {
        for n in 1..=9 {
            let sectors = decompose(n).unwrap();
            assert_eq!(sectors.len(), n + 2);
            let mut all: Vec<u32> = sectors.iter().flat_map(|s| s.members.clone()).collect();
            all.sort_unstable();
            assert_eq!(all, (0..dimension(n) as u32).collect::<Vec<_>>());
            for s in &sectors {
                assert!(s.members.windows(2).all(|w| w[0] < w[1]));
                assert!(s.members.iter().all(|&c| inv_of(c, n) == s.inv_value()));
            }
        }
    }

    #[test]
    fn single_site_jc_block() {
        let pair = GeneratorPair::new(1, Topology::OpenNN, 1).unwrap();
        let g = 0.7;
        let h = pair.assemble(g, 0.3).unwrap();
        let sector = &decompose(1).unwrap()[1];
        assert_eq!(sector.members, vec![1, 2]);
        let block = extract_block(&h, sector).unwrap();
        assert_eq!(block.as_slice(), &[0.0, g, g, 0.0]);
    }

    #[test]
    fn extremal_blocks_are_zero() {
        for n in 1..=6 {
            let pair = GeneratorPair::new(n, Topology::RingLongRangeArc, 1).unwrap();
            let h = pair.assemble(0.4, -1.3).unwrap();
            let sectors = decompose(n).unwrap();
            for s in [&sectors[0], &sectors[n + 1]] {
                assert!(s.is_extremal(n));
                assert_eq!(extract_block(&h, s).unwrap().as_slice(), &[0.0]);
            }
        }
    }

    #[test]
    fn two_site_half_sector_at_pure_exchange() {
        let pair = GeneratorPair::new(2, Topology::OpenNN, 1).unwrap();
        let h = pair.assemble(0.0, 1.0).unwrap();
        let sector = decompose(2)
            .unwrap()
            .into_iter()
            .find(|s| s.total_mz == HalfInt::HALF)
            .unwrap();
        assert_eq!(sector.dim(), 3);
        let ev = eigvals_symmetric(&extract_block(&h, &sector).unwrap()).unwrap();
        for (got, want) in ev.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn commutation_is_exact_for_assembled_hamiltonians() {
        for n in 1..=7 {
            for topology in Topology::ALL {
                let pair = GeneratorPair::new(n, topology, 1).unwrap();
                let h = pair.assemble(0.83, -0.56).unwrap();
                assert_eq!(verify_commutation(&h, n), 0.0);
            }
        }
        assert_eq!(verify_commutation(&SparseSymmetric::zeros(16), 3), 0.0);
    }

    #[test]
    fn sigma_x_breaks_commutation_and_extraction() {
        let n = 3;
        let pair = GeneratorPair::new(n, Topology::OpenNN, 1).unwrap();
        let h = pair.assemble(1.0, 1.0).unwrap();
        let sigma_x = SparseSymmetric::from_triplets(
            dimension(n),
            (0..dimension(n))
                .map(|c| (c, c ^ 0b10, 0.5))
                .filter(|&(r, c, _)| r < c),
        )
        .unwrap();
        let broken = SparseSymmetric::linear_combination(1.0, &h, 1.0, &sigma_x).unwrap();
        assert!(verify_commutation(&broken, n) > 0.0);
        let sectors = decompose(n).unwrap();
        assert!(matches!(
            extract_block(&broken, &sectors[1]),
            Err(Error::SectorStraddle { .. })
        ));
    }

    #[test]
    fn prepared_blocks_match_extraction() {
        let pair = GeneratorPair::new(5, Topology::RingLongRangeChord, 2).unwrap();
        let blocks = SectorBlocks::new(&pair).unwrap();
        let (g, j) = (0.3, -0.9);
        let h = pair.assemble(g, j).unwrap();
        for (idx, sector) in blocks.sectors().iter().enumerate() {
            assert_eq!(blocks.block(idx, g, j), extract_block(&h, sector).unwrap());
        }
    }
}
