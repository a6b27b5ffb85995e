//! Constraint directions: nonempty interval subsets, with the elimination-path view.
//!
//! A direction at depth `q` selects intervals `S ⊆ {t+1..T}` with `t = T − q`.
//! Its path vector `u` is indexed `θ = 1..q`, where `θ` stands for interval
//! `T − θ + 1`, and `u(θ) = 1` iff that interval is in `S`.

use std::fmt;

use super::AfrError;

/// Largest horizon for which directions are enumerated (bit masks are `u64`).
pub const MAX_HORIZON: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectionIndex {
    horizon: usize,
    depth: usize,
    /// Bit `τ − 1` set iff interval `τ ∈ S`.
    mask: u64,
}

fn full(horizon: usize) -> u64 {
    if horizon == 64 {
        u64::MAX
    } else {
        (1u64 << horizon) - 1
    }
}

impl DirectionIndex {
    /// Canonical direction for the subset `mask`: depth reaches the earliest member.
    pub fn from_mask(horizon: usize, mask: u64) -> Result<Self, AfrError> {
        if horizon == 0 || horizon > MAX_HORIZON || mask == 0 || mask & !full(horizon) != 0 {
            return Err(AfrError::BadDirection(format!("mask {mask:#b} over T={horizon}")));
        }
        let depth = horizon - mask.trailing_zeros() as usize;
        Ok(DirectionIndex { horizon, depth, mask })
    }

    /// Canonical direction for an explicit interval list (1-based).
    pub fn from_intervals(horizon: usize, intervals: &[usize]) -> Result<Self, AfrError> {
        let mut mask = 0u64;
        for &tau in intervals {
            if tau == 0 || tau > horizon || tau > MAX_HORIZON || mask & (1 << (tau - 1)) != 0 {
                return Err(AfrError::BadDirection(format!("interval list {intervals:?} over T={horizon}")));
            }
            mask |= 1 << (tau - 1);
        }
        Self::from_mask(horizon, mask)
    }

    /// Direction at an explicit depth `q`; `S` must lie in `{T−q+1..T}`.
    pub fn at_depth(horizon: usize, depth: usize, mask: u64) -> Result<Self, AfrError> {
        let d = Self::from_mask(horizon, mask)?;
        if depth < d.depth || depth > horizon {
            return Err(AfrError::BadDirection(format!("depth {depth} for {d} over T={horizon}")));
        }
        Ok(DirectionIndex { depth, ..d })
    }

    /// Direction from a path vector `u(1..q)`.
    pub fn from_path(horizon: usize, u: &[bool]) -> Result<Self, AfrError> {
        let mask = u
            .iter()
            .enumerate()
            .filter(|(_, on)| **on)
            .fold(0u64, |m, (k, _)| m | 1 << (horizon.saturating_sub(k + 1)));
        if u.len() > horizon {
            return Err(AfrError::BadDirection(format!("path of length {} over T={horizon}", u.len())));
        }
        Self::at_depth(horizon, u.len(), mask)
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Elimination depth `q`.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// The interval `t = T − q` whose energies are being eliminated at this depth.
    pub fn elimination_interval(&self) -> usize {
        self.horizon - self.depth
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn contains(&self, tau: usize) -> bool {
        tau >= 1 && tau <= self.horizon && self.mask >> (tau - 1) & 1 == 1
    }

    /// Intervals of `S`, ascending.
    pub fn intervals(&self) -> Vec<usize> {
        (1..=self.horizon).filter(|&tau| self.contains(tau)).collect()
    }

    pub fn first_interval(&self) -> usize {
        self.mask.trailing_zeros() as usize + 1
    }

    pub fn last_interval(&self) -> usize {
        64 - self.mask.leading_zeros() as usize
    }

    /// `u(θ)` for `θ = 1..q`.
    pub fn path(&self) -> Vec<bool> {
        (1..=self.depth).map(|theta| self.contains(self.horizon - theta + 1)).collect()
    }

    /// First difference of the path, `v(θ) = u(θ) − u(θ−1)` with `u(0) = 0`.
    pub fn path_increments(&self) -> Vec<i8> {
        let u = self.path();
        (0..u.len()).map(|k| u[k] as i8 - if k == 0 { 0 } else { u[k - 1] as i8 }).collect()
    }

    /// `g`: first path position with `u(g) = 1`.
    pub fn first_active(&self) -> usize {
        self.horizon - self.last_interval() + 1
    }

    /// The interval where the path starts, `s = T − g + 1` (the latest member of `S`).
    pub fn start_interval(&self) -> usize {
        self.last_interval()
    }

    /// `+1` iff `u(q) = 1`, i.e. interval `t + 1` is in `S`.
    pub fn indicator(&self) -> i8 {
        if self.contains(self.elimination_interval() + 1) {
            1
        } else {
            -1
        }
    }

    /// Coefficient of `E(τ)`, `τ = 1..T`, in `Σ_{τ∈S} (E(τ) − E(τ−1))`.
    pub fn coefficients(&self) -> Vec<i8> {
        (1..=self.horizon).map(|tau| self.contains(tau) as i8 - self.contains(tau + 1) as i8).collect()
    }

    /// The subset whose power sum equals `v·E(q)`: `S ∪ {1..t}` when `u(q) = 1`, else `S`.
    pub fn aggregate_subset(&self) -> DirectionIndex {
        let t = self.elimination_interval();
        let mask = if self.indicator() == 1 { self.mask | full(t) } else { self.mask };
        DirectionIndex::from_mask(self.horizon, mask).expect("nonempty subset")
    }
}

impl fmt::Display for DirectionIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.intervals().iter().map(|t| t.to_string()).collect();
        write!(f, "{{{}}}", list.join(","))
    }
}

fn reverse_low_bits(x: u64, width: usize) -> u64 {
    if width == 0 {
        0
    } else {
        x.reverse_bits() >> (64 - width)
    }
}

/// Mask of the `i`-th direction (`i ≥ 1`) in enumeration order.
///
/// The order is the reflected Gray code with interval 1 as the most
/// significant bit, so neighbours differ in exactly one interval.
pub fn gray_mask(horizon: usize, i: u64) -> u64 {
    reverse_low_bits(i ^ (i >> 1), horizon)
}

/// Position of `mask` in [`enumerate_directions`] (0-based).
pub fn gray_position(horizon: usize, mask: u64) -> usize {
    let mut g = reverse_low_bits(mask, horizon);
    let mut i = 0;
    while g != 0 {
        i ^= g;
        g >>= 1;
    }
    i as usize - 1
}

/// All `2^T − 1` canonical directions in Gray order.
pub fn enumerate_directions(horizon: usize) -> Result<Vec<DirectionIndex>, AfrError> {
    if horizon > MAX_HORIZON {
        return Err(AfrError::HorizonTooLarge(horizon));
    }
    if horizon == 0 {
        return Ok(Vec::new());
    }
    Ok((1..1u64 << horizon)
        .map(|i| DirectionIndex::from_mask(horizon, gray_mask(horizon, i)).expect("nonzero code"))
        .collect())
}
