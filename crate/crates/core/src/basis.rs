//! Bit encoding of the photon pseudo-spin plus `N` spin-½ sites.
//!
//! Bit 0 holds the photon occupation (`1` = one photon, pseudo-spin up) and
//! bit `i` for `1 <= i <= N` holds spin site `i` (`1` = up). The resulting
//! codes span `0..2^(N+1)`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported number of spin sites (matrix dimension `2^15`).
pub const MAX_SITES: usize = 14;

/// A multiple of ½, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(value: i32) -> Self {
        HalfInt(2 * value)
    }

    /// Parses a decimal (`1.5`) or fraction (`3/2`) literal that must be a multiple of ½.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num: i32 = num.trim().parse().ok()?;
            return match den.trim() {
                "1" => Some(HalfInt(2 * num)),
                "2" => Some(HalfInt(num)),
                _ => None,
            };
        }
        let value: f64 = text.parse().ok()?;
        let twice = 2.0 * value;
        if twice.is_finite() && twice == twice.round() && twice.abs() < i32::MAX as f64 {
            Some(HalfInt(twice as i32))
        } else {
            None
        }
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// One configuration of the photon pseudo-spin and the spin sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    code: u32,
    n_sites: usize,
}

/// Diagonal quantum numbers of a basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantumNumbers {
    /// Spin-only magnetization `M_z`.
    pub m_z: HalfInt,
    /// Magnetization of the mapped `N+1` site chain, photon included.
    pub total_mz: HalfInt,
    pub n_ph: u8,
    /// Conserved invariant `n_ph + M_z`.
    pub inv: HalfInt,
}

pub fn validate_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(Error::InvalidArgument(format!(
            "number of spin sites must be in 1..={MAX_SITES}, got {n_sites}"
        )));
    }
    Ok(())
}

/// Dimension `2^(N+1)` of the configuration space.
pub fn dimension(n_sites: usize) -> usize {
    1usize << (n_sites + 1)
}

impl BasisState {
    pub fn from_code(code: u32, n_sites: usize) -> Result<Self> {
        validate_sites(n_sites)?;
        if code as usize >= dimension(n_sites) {
            return Err(Error::InvalidArgument(format!(
                "code {code} out of range for {n_sites} sites"
            )));
        }
        Ok(BasisState { code, n_sites })
    }

    pub fn code(self) -> u32 {
        self.code
    }

    pub fn n_sites(self) -> usize {
        self.n_sites
    }

    pub fn photon(self) -> u8 {
        (self.code & 1) as u8
    }

    /// Spin on site `site` (1-based).
    pub fn spin(self, site: usize) -> Spin {
        debug_assert!((1..=self.n_sites).contains(&site));
        if self.code >> site & 1 == 1 {
            Spin::Up
        } else {
            Spin::Down
        }
    }

    pub fn decode(self) -> (u8, Vec<Spin>) {
        let spins = (1..=self.n_sites).map(|site| self.spin(site)).collect();
        (self.photon(), spins)
    }

    pub fn quantum_numbers(self) -> QuantumNumbers {
        quantum_numbers_of(self.code, self.n_sites)
    }
}

pub fn encode(photon_occ: u8, spins: &[Spin], n_sites: usize) -> Result<BasisState> {
    validate_sites(n_sites)?;
    if spins.len() != n_sites {
        return Err(Error::InvalidArgument(format!(
            "expected {n_sites} spins, got {}",
            spins.len()
        )));
    }
    if photon_occ > 1 {
        return Err(Error::InvalidArgument(format!(
            "photon occupation must be 0 or 1, got {photon_occ}"
        )));
    }
    let mut code = u32::from(photon_occ);
    for (offset, spin) in spins.iter().enumerate() {
        if *spin == Spin::Up {
            code |= 1 << (offset + 1);
        }
    }
    Ok(BasisState { code, n_sites })
}

/// Twice the total magnetization of the mapped chain: `#up - #down` over all `N+1` bits.
#[inline]
pub(crate) fn twice_total_mz(code: u32, n_sites: usize) -> i32 {
    2 * code.count_ones() as i32 - (n_sites as i32 + 1)
}

#[inline]
pub(crate) fn quantum_numbers_of(code: u32, n_sites: usize) -> QuantumNumbers {
    let n_ph = (code & 1) as u8;
    let spins_up = (code >> 1).count_ones() as i32;
    let m_z = HalfInt::from_twice(2 * spins_up - n_sites as i32);
    let total_mz = HalfInt::from_twice(twice_total_mz(code, n_sites));
    QuantumNumbers {
        m_z,
        total_mz,
        n_ph,
        inv: HalfInt::from_int(i32::from(n_ph)) + m_z,
    }
}

/// Invariant `Inv = ½ + 𝓜_z` of a raw code.
#[inline]
pub(crate) fn inv_of(code: u32, n_sites: usize) -> HalfInt {
    HalfInt::from_twice(twice_total_mz(code, n_sites) + 1)
}
