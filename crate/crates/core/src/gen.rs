//! Seeded random instances for tests, benchmarks and the theorem suites.
//!
//! Every generated resource satisfies the three hypotheses: raw bounds are
//! drawn on a grid of step `1/d` (`d ≤ 8`) and then tightened, which keeps
//! every bound on the same grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flex::{FlexResource, ResourceSet};
use crate::rational::{frac, Rational};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn grid<R: Rng>(rng: &mut R, d: i64, lo: i64, hi: i64) -> Rational {
    frac(rng.gen_range(lo * d..=hi * d), d)
}

/// A hypothesis-valid resource with mixed-sign power and binding energy envelopes.
pub fn random_resource<R: Rng>(rng: &mut R, id: &str, horizon: usize) -> FlexResource {
    loop {
        let d = rng.gen_range(1..=8);
        let p_lo: Vec<Rational> = (0..horizon).map(|_| grid(rng, d, -2, 1)).collect();
        let p_hi: Vec<Rational> = p_lo.iter().map(|p| p + grid(rng, d, 0, 3)).collect();
        let (mut lo_sum, mut hi_sum) = (Rational::default(), Rational::default());
        let (mut e_lo, mut e_hi) = (Vec::new(), Vec::new());
        for t in 0..horizon {
            lo_sum += &p_lo[t];
            hi_sum += &p_hi[t];
            let a = &lo_sum + grid(rng, d, 0, 2);
            let b = &hi_sum - grid(rng, d, 0, 2);
            e_lo.push(a.clone().min(b.clone()));
            e_hi.push(a.max(b));
        }
        let raw = FlexResource::new(id, p_lo, p_hi, e_lo, e_hi).expect("lengths match");
        if let Ok(r) = raw.tighten() {
            return r;
        }
    }
}

/// A power-only resource.
pub fn random_generator<R: Rng>(rng: &mut R, id: &str, horizon: usize) -> FlexResource {
    let d = rng.gen_range(1..=8);
    let p_lo: Vec<Rational> = (0..horizon).map(|_| grid(rng, d, -2, 1)).collect();
    let p_hi: Vec<Rational> = p_lo.iter().map(|p| p + grid(rng, d, 0, 3)).collect();
    FlexResource::from_generator(id, p_lo, p_hi).expect("ordered power bounds")
}

pub fn resource_id(i: usize) -> String {
    format!("r{i}")
}

pub fn random_fleet(seed: u64, n: usize, horizon: usize) -> ResourceSet {
    let mut rng = seeded(seed);
    let list = (0..n).map(|i| random_resource(&mut rng, &resource_id(i), horizon)).collect();
    ResourceSet::with_horizon(horizon, list).expect("generated resources are valid")
}

pub fn generator_fleet(seed: u64, n: usize, horizon: usize) -> ResourceSet {
    let mut rng = seeded(seed);
    let list = (0..n).map(|i| random_generator(&mut rng, &resource_id(i), horizon)).collect();
    ResourceSet::with_horizon(horizon, list).expect("generated resources are valid")
}

/// A feasible trajectory `e(1..T)` (relative to `e0`), sampled forward.
///
/// Each step picks a point of the reachable window on a 1/16 lattice,
/// endpoints included. Under the hypotheses the window is never empty.
pub fn random_trajectory<R: Rng>(rng: &mut R, r: &FlexResource) -> Vec<Rational> {
    let mut e = Rational::default();
    let mut out = Vec::with_capacity(r.horizon());
    for t in 1..=r.horizon() {
        let lo = r.e_lo(t).clone().max(&e + r.p_lo(t));
        let hi = r.e_hi(t).clone().min(&e + r.p_hi(t));
        let k = rng.gen_range(0..=16);
        e = &lo + (&hi - &lo) * frac(k, 16);
        out.push(e.clone());
    }
    out
}

/// Uniformly random subset of `0..n` as a bit mask.
pub fn random_mask<R: Rng>(rng: &mut R, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        rng.gen_range(0..(1u64 << n))
    }
}
