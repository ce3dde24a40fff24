//! Spin-1/2 product-state bases of a two-leg ladder restricted to a fixed
//! total-magnetization sector.
//!
//! Site `i` of leg `k` (k = 1, 2) lives at bit `2i + (k - 1)`, so the two spins
//! of a rung occupy adjacent bits. A set bit means m = +1/2.
//!
//! For a fixed number of up spins, ascending integer order of the bit patterns
//! coincides with colexicographic order of the set-bit positions, so the
//! ordinal of a configuration is its combinadic rank and no lookup table is
//! needed.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, HalfIntDisplay, Result};

/// Largest supported number of sites per leg (2L bits must fit comfortably in a `u64`).
pub const MAX_SITES_PER_LEG: usize = 16;

/// Default cap on the number of configurations in a sector.
pub const DEFAULT_DIMENSION_CAP: usize = 10_000_000;

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(value: i64) -> Self {
        HalfInt(2 * value)
    }

    /// Rounds `value` to the nearest half-integer.
    pub fn from_f64(value: f64) -> Self {
        HalfInt((2.0 * value).round() as i64)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integral(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        HalfIntDisplay(self.0).fmt(f)
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        let h = HalfInt::from_f64(v);
        if (h.to_f64() - v).abs() > 1e-9 {
            return Err(serde::de::Error::custom(format!("{v} is not a half-integer")));
        }
        Ok(h)
    }
}

/// Bit-encoded product state of `2L` spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpinConfig(pub u64);

impl SpinConfig {
    /// Bit position of site `site` on leg `leg` (leg is 1 or 2).
    #[inline]
    pub const fn bit(site: usize, leg: usize) -> usize {
        2 * site + (leg - 1)
    }

    #[inline]
    pub fn is_up(self, bit: usize) -> bool {
        (self.0 >> bit) & 1 == 1
    }

    #[inline]
    pub fn up_count(self) -> u32 {
        self.0.count_ones()
    }
}

/// Total z-projection of `config`, i.e. (#up - #down)/2 = #up - L.
pub fn magnetization(config: SpinConfig, sites_per_leg: usize) -> HalfInt {
    debug_assert!(sites_per_leg >= 32 || config.0 >> (2 * sites_per_leg) == 0, "bits set above position 2L - 1");
    HalfInt::from_int(config.up_count() as i64 - sites_per_leg as i64)
}

/// Binomial coefficients C(n, k) for n, k <= 2 * MAX_SITES_PER_LEG.
struct Binomials {
    table: Vec<Vec<u64>>,
}

impl Binomials {
    fn new(max_n: usize) -> Self {
        let mut table = vec![vec![0u64; max_n + 1]; max_n + 1];
        for n in 0..=max_n {
            table[n][0] = 1;
            for k in 1..=n {
                table[n][k] = table[n - 1][k - 1] + if k < n { table[n - 1][k] } else { 0 };
            }
        }
        Binomials { table }
    }

    #[inline]
    fn get(&self, n: usize, k: usize) -> u64 {
        if k > n {
            0
        } else {
            self.table[n][k]
        }
    }
}

/// Ordered sector basis.
#[derive(Clone)]
pub struct SpinBasis {
    sites_per_leg: usize,
    m_tot: HalfInt,
    configs: Vec<SpinConfig>,
    binomials: std::sync::Arc<Binomials>,
}

impl fmt::Debug for SpinBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpinBasis")
            .field("sites_per_leg", &self.sites_per_leg)
            .field("m_tot", &self.m_tot)
            .field("dim", &self.configs.len())
            .finish()
    }
}

impl SpinBasis {
    pub fn sites_per_leg(&self) -> usize {
        self.sites_per_leg
    }

    pub fn n_spins(&self) -> usize {
        2 * self.sites_per_leg
    }

    pub fn m_tot(&self) -> HalfInt {
        self.m_tot
    }

    pub fn dim(&self) -> usize {
        self.configs.len()
    }

    pub fn configs(&self) -> &[SpinConfig] {
        &self.configs
    }

    pub fn config(&self, position: usize) -> SpinConfig {
        self.configs[position]
    }

    /// Ordinal of `config` in this basis, or `None` when it lies outside the sector.
    pub fn index_of(&self, config: SpinConfig) -> Option<usize> {
        let n = self.n_spins();
        if config.0 >> n != 0 {
            return None;
        }
        let up = (self.sites_per_leg as i64 + self.m_tot.twice() / 2) as u32;
        if config.up_count() != up {
            return None;
        }
        let mut rank = 0u64;
        let mut bits = config.0;
        let mut j = 1;
        while bits != 0 {
            let pos = bits.trailing_zeros() as usize;
            rank += self.binomials.get(pos, j);
            bits &= bits - 1;
            j += 1;
        }
        Some(rank as usize)
    }
}

/// Enumerates the sector with the default dimension cap.
pub fn enumerate_sector(sites_per_leg: usize, m_tot: HalfInt) -> Result<SpinBasis> {
    enumerate_sector_with_cap(sites_per_leg, m_tot, DEFAULT_DIMENSION_CAP)
}

/// All configurations of `2L` spins with total projection `m_tot`, in ascending bit order.
pub fn enumerate_sector_with_cap(sites_per_leg: usize, m_tot: HalfInt, cap: usize) -> Result<SpinBasis> {
    if sites_per_leg == 0 || sites_per_leg > MAX_SITES_PER_LEG {
        return Err(Error::InvalidLength { got: sites_per_leg, max: MAX_SITES_PER_LEG });
    }
    let n = 2 * sites_per_leg;
    // an even number of spin-1/2 always has integral total projection
    let up = sites_per_leg as i64 + m_tot.twice() / 2;
    if !m_tot.is_integral() || up < 0 || up > n as i64 {
        return Err(Error::EmptySector { m_tot: HalfIntDisplay(m_tot.twice()), sites: n });
    }
    let up = up as usize;
    let binomials = Binomials::new(2 * MAX_SITES_PER_LEG);
    let dim = binomials.get(n, up);
    if dim as u128 > cap as u128 {
        return Err(Error::DimensionOverflow { dim: dim as u128, cap });
    }

    let mut configs = Vec::with_capacity(dim as usize);
    if up == 0 {
        configs.push(SpinConfig(0));
    } else {
        // Gosper's hack: next larger integer with the same popcount.
        let limit = 1u64 << n;
        let mut x = (1u64 << up) - 1;
        while x < limit {
            configs.push(SpinConfig(x));
            let c = x & x.wrapping_neg();
            let r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
        }
    }
    debug_assert_eq!(configs.len() as u64, dim);

    Ok(SpinBasis { sites_per_leg, m_tot, configs, binomials: std::sync::Arc::new(binomials) })
}
