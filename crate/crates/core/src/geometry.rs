//! Spin-spin coupling maps for open chains and rings.
//!
//! Every map stores dimensionless positive weights `w_ij`; the physical
//! coupling is `J_ij = J * w_ij`. Lattice constant and ring side length are 1.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::basis::validate_sites;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Open chain, nearest-neighbour bonds.
    OpenNN,
    /// Open chain, all pairs with `w = 1/|i-j|^2`.
    OpenLongRange,
    /// Ring, nearest-neighbour bonds.
    RingNN,
    /// Ring, all pairs with the inverse square of the distance along the ring.
    RingLongRangeArc,
    /// Ring, all pairs with the inverse square of the straight chord length.
    RingLongRangeChord,
}

impl Topology {
    pub const ALL: [Topology; 5] = [
        Topology::OpenNN,
        Topology::OpenLongRange,
        Topology::RingNN,
        Topology::RingLongRangeArc,
        Topology::RingLongRangeChord,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Topology::OpenNN => "open-nn",
            Topology::OpenLongRange => "open-lr",
            Topology::RingNN => "ring-nn",
            Topology::RingLongRangeArc => "ring-lr-arc",
            Topology::RingLongRangeChord => "ring-lr-chord",
        }
    }

    pub fn is_ring(self) -> bool {
        matches!(
            self,
            Topology::RingNN | Topology::RingLongRangeArc | Topology::RingLongRangeChord
        )
    }

    pub fn is_nearest_neighbour(self) -> bool {
        matches!(self, Topology::OpenNN | Topology::RingNN)
    }

    /// Separation used by the weight law for sites `i < j`.
    fn separation(self, i: usize, j: usize, n_sites: usize) -> usize {
        let steps = j - i;
        if self.is_ring() {
            steps.min(n_sites - steps)
        } else {
            steps
        }
    }

    /// Weight at a given separation, or `None` when the pair is uncoupled.
    fn weight(self, separation: usize, n_sites: usize) -> Option<f64> {
        match self {
            Topology::OpenNN | Topology::RingNN => (separation == 1).then_some(1.0),
            Topology::OpenLongRange | Topology::RingLongRangeArc => {
                Some(1.0 / (separation * separation) as f64)
            }
            Topology::RingLongRangeChord => {
                // chord = 2R sin(pi s / N) with R = 1 / (2 sin(pi / N))
                let chord =
                    (PI * separation as f64 / n_sites as f64).sin() / (PI / n_sites as f64).sin();
                Some(1.0 / (chord * chord))
            }
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Topology::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown topology '{s}' (expected one of open-nn, open-lr, ring-nn, ring-lr-arc, ring-lr-chord)"
                ))
            })
    }
}

/// A weighted bond between spin sites `i < j` (1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMap {
    pub n_sites: usize,
    pub topology: Topology,
    /// Sorted by `(i, j)`; each unordered pair at most once.
    pub bonds: Vec<Bond>,
}

pub fn build_coupling_map(n_sites: usize, topology: Topology) -> Result<CouplingMap> {
    validate_sites(n_sites)?;
    let mut bonds = Vec::new();
    for i in 1..=n_sites {
        for j in i + 1..=n_sites {
            let separation = topology.separation(i, j, n_sites);
            if let Some(weight) = topology.weight(separation, n_sites) {
                bonds.push(Bond { i, j, weight });
            }
        }
    }
    Ok(CouplingMap {
        n_sites,
        topology,
        bonds,
    })
}

impl CouplingMap {
    /// Checks the structural invariants; used before building a Hamiltonian from a hand-made map.
    pub fn validate(&self) -> Result<()> {
        validate_sites(self.n_sites)?;
        let mut seen = std::collections::HashSet::new();
        for bond in &self.bonds {
            if !(1 <= bond.i && bond.i < bond.j && bond.j <= self.n_sites) {
                return Err(Error::InvalidArgument(format!(
                    "bond ({}, {}) is not an ordered pair of sites in 1..={}",
                    bond.i, bond.j, self.n_sites
                )));
            }
            if !(bond.weight.is_finite() && bond.weight > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "bond ({}, {}) has non-positive weight {}",
                    bond.i, bond.j, bond.weight
                )));
            }
            if !seen.insert((bond.i, bond.j)) {
                return Err(Error::InvalidArgument(format!(
                    "bond ({}, {}) listed twice",
                    bond.i, bond.j
                )));
            }
        }
        Ok(())
    }

    /// Distinct `(separation, weight)` pairs present in the map, sorted by separation.
    pub fn distance_profile(&self) -> Vec<(usize, f64)> {
        let mut profile: Vec<(usize, f64)> = self
            .bonds
            .iter()
            .map(|b| (self.topology.separation(b.i, b.j, self.n_sites), b.weight))
            .collect();
        profile.sort_by_key(|p| p.0);
        profile.dedup_by(|a, b| a.0 == b.0);
        profile
    }
}

pub fn distance_profile(n_sites: usize, topology: Topology) -> Result<Vec<(usize, f64)>> {
    Ok(build_coupling_map(n_sites, topology)?.distance_profile())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn triples(map: &CouplingMap) -> Vec<(usize, usize, f64)> {
        map.bonds.iter().map(|b| (b.i, b.j, b.weight)).collect()
    }

    #[test]
    fn open_nn_four_sites() {
        let map = build_coupling_map(4, Topology::OpenNN).unwrap();
        assert_eq!(triples(&map), vec![(1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)]);
    }

    #[test]
    fn open_long_range_four_sites() {
        let map = build_coupling_map(4, Topology::OpenLongRange).unwrap();
        let mut got = triples(&map);
        got.sort_by_key(|a| (a.0, a.1));
        assert_eq!(
            got,
            vec![
                (1, 2, 1.0),
                (1, 3, 0.25),
                (1, 4, 1.0 / 9.0),
                (2, 3, 1.0),
                (2, 4, 0.25),
                (3, 4, 1.0),
            ]
        );
    }

    #[test]
    fn chord_square_diagonal() {
        let map = build_coupling_map(4, Topology::RingLongRangeChord).unwrap();
        let diag = map.bonds.iter().find(|b| (b.i, b.j) == (1, 3)).unwrap();
        assert_relative_eq!(diag.weight, 0.5, epsilon = 1e-15);
        let wrap = map.bonds.iter().find(|b| (b.i, b.j) == (1, 4)).unwrap();
        assert_eq!(wrap.weight, 1.0);
    }

    #[test]
    fn ring_nn_small_rings() {
        let ring2 = build_coupling_map(2, Topology::RingNN).unwrap();
        assert_eq!(triples(&ring2), vec![(1, 2, 1.0)]);
        let ring3 = build_coupling_map(3, Topology::RingNN).unwrap();
        assert_eq!(triples(&ring3), vec![(1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)]);
        for topology in [Topology::RingLongRangeArc, Topology::RingLongRangeChord] {
            assert_eq!(
                triples(&build_coupling_map(2, topology).unwrap()),
                vec![(1, 2, 1.0)]
            );
        }
    }

    #[test]
    fn single_site_has_no_bonds() {
        for topology in Topology::ALL {
            assert!(build_coupling_map(1, topology).unwrap().bonds.is_empty());
        }
        assert!(build_coupling_map(0, Topology::OpenNN).is_err());
    }

    #[test]
    fn profiles() {
        assert_eq!(
            distance_profile(5, Topology::RingLongRangeArc).unwrap(),
            vec![(1, 1.0), (2, 0.25)]
        );
        assert_eq!(
            distance_profile(3, Topology::OpenNN).unwrap(),
            vec![(1, 1.0)]
        );
        let hexagon = distance_profile(6, Topology::RingLongRangeChord).unwrap();
        assert_eq!(hexagon.len(), 3);
        assert_eq!(hexagon[2].0, 3);
        assert_relative_eq!(hexagon[2].1, 0.25, epsilon = 1e-15);
        // separation 2 in a unit hexagon: chord sqrt(3)
        assert_relative_eq!(hexagon[1].1, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn topology_names_round_trip() {
        for topology in Topology::ALL {
            assert_eq!(topology.as_str().parse::<Topology>().unwrap(), topology);
        }
        assert!("ring".parse::<Topology>().is_err());
    }

    #[test]
    fn weight_depends_only_on_separation() {
        for n in 2..=9 {
            for topology in Topology::ALL {
                let map = build_coupling_map(n, topology).unwrap();
                map.validate().unwrap();
                let profile = map.distance_profile();
                for b in &map.bonds {
                    let s = topology.separation(b.i, b.j, n);
                    let w = profile.iter().find(|p| p.0 == s).unwrap().1;
                    assert_eq!(b.weight, w);
                }
            }
        }
    }

    #[test]
    fn ring_maps_invariant_under_cyclic_relabeling() {
        for n in 3..=9 {
            for topology in [
                Topology::RingNN,
                Topology::RingLongRangeArc,
                Topology::RingLongRangeChord,
            ] {
                let map = build_coupling_map(n, topology).unwrap();
                let shifted: Vec<(usize, usize, f64)> = map
                    .bonds
                    .iter()
                    .map(|b| {
                        let (a, c) = (b.i % n + 1, b.j % n + 1);
                        (a.min(c), a.max(c), b.weight)
                    })
                    .collect();
                for (i, j, w) in shifted {
                    let original = map.bonds.iter().find(|b| (b.i, b.j) == (i, j)).unwrap();
                    assert_relative_eq!(original.weight, w, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn nearest_neighbour_maps_are_unit_separation_subsets() {
        for n in 2..=9 {
            let pairs = [
                (Topology::OpenNN, Topology::OpenLongRange),
                (Topology::RingNN, Topology::RingLongRangeArc),
                (Topology::RingNN, Topology::RingLongRangeChord),
            ];
            for (nn, lr) in pairs {
                let nn_map = build_coupling_map(n, nn).unwrap();
                let lr_map = build_coupling_map(n, lr).unwrap();
                for b in &nn_map.bonds {
                    assert_eq!(b.weight, 1.0);
                    let partner = lr_map
                        .bonds
                        .iter()
                        .find(|c| (c.i, c.j) == (b.i, b.j))
                        .unwrap();
                    assert_eq!(partner.weight, 1.0);
                }
                let unit: Vec<_> = lr_map
                    .bonds
                    .iter()
                    .filter(|c| lr.separation(c.i, c.j, n) == 1)
                    .map(|c| (c.i, c.j))
                    .collect();
                let nn_pairs: Vec<_> = nn_map.bonds.iter().map(|c| (c.i, c.j)).collect();
                assert_eq!(unit, nn_pairs);
            }
        }
    }
}
