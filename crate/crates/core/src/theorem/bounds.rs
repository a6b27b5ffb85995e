//! Closed-form bounds of the two row families produced along an elimination path.
//!
//! For a direction `d` at depth `q` (`t = T − q`) and a resource group `X`:
//!
//! * the ψ row bounds `v·E(q) + σ Σ_{i∈X} e_i(t)` with `σ = −I`, i.e. `σ = −1`
//!   exactly when interval `t + 1` is in `S`. Per resource the functional is
//!   either a power sum over `S` (power group) or `e_i(L) − Σ` of the powers
//!   in the gaps of `(t, L]`, with `L` the latest interval of `S` (energy
//!   group). The energy group is `N − X` when `σ = −1` and `X` otherwise.
//! * the φ row bounds `v·E(q)` itself, with the two closed-form candidates
//!   under the calibrated reading.

use num_traits::Zero;

use super::{members, Group, Symbol, SymbolicInequality};
use crate::afr::calibration::{candidates, representations, CALIBRATED_READING};
use crate::afr::DirectionIndex;
use crate::flex::{FlexResource, ResourceSet};
use crate::rational::Rational;

fn aggregate_terms(d: &DirectionIndex) -> SymbolicInequality {
    let mut f = SymbolicInequality::trivial();
    for (k, c) in d.aggregate_subset().coefficients().into_iter().enumerate() {
        if c != 0 {
            f.add_term(Symbol::Aggregate { t: k + 1 }, Rational::from_integer(c.into()));
        }
    }
    f
}

fn energy_group_bounds(r: &FlexResource, d: &DirectionIndex) -> (Rational, Rational) {
    let last = d.last_interval();
    let (mut lo, mut hi) = (r.e_lo(last).clone(), r.e_hi(last).clone());
    for tau in d.elimination_interval() + 1..last {
        if !d.contains(tau) {
            lo -= r.p_hi(tau);
            hi -= r.p_lo(tau);
        }
    }
    (lo, hi)
}

fn power_group_bounds(r: &FlexResource, d: &DirectionIndex) -> (Rational, Rational) {
    d.intervals()
        .iter()
        .fold((Rational::zero(), Rational::zero()), |(lo, hi), &tau| (lo + r.p_lo(tau), hi + r.p_hi(tau)))
}

/// `σ = −I`.
pub fn psi_sign(d: &DirectionIndex) -> i8 {
    -d.indicator()
}

/// Bounds of `v·E(q) + σ Σ_X e_i(t)`.
pub fn psi_bounds(d: &DirectionIndex, x: Group, rs: &ResourceSet) -> (Rational, Rational) {
    let energy = if psi_sign(d) < 0 { !x } else { x };
    let (mut lo, mut hi) = (Rational::zero(), Rational::zero());
    for (i, r) in rs.iter().enumerate() {
        let (a, b) = if energy >> i & 1 == 1 { energy_group_bounds(r, d) } else { power_group_bounds(r, d) };
        lo += a;
        hi += b;
    }
    (lo, hi)
}

/// The ψ row as a symbolic inequality.
pub fn psi_row(d: &DirectionIndex, x: Group, rs: &ResourceSet) -> SymbolicInequality {
    let mut f = aggregate_terms(d);
    let t = d.elimination_interval();
    for i in members(x) {
        f.add_term(Symbol::Energy { resource: i, t }, Rational::from_integer(psi_sign(d).into()));
    }
    let (lo, hi) = psi_bounds(d, x, rs);
    f.shift(&lo, &hi);
    f
}

/// Published bounds of `v·E(q)` for group `X`: the energy candidate for the
/// energy group and the power candidate for the rest.
pub fn phi_bounds(d: &DirectionIndex, x: Group, rs: &ResourceSet) -> (Rational, Rational) {
    let energy = if d.indicator() > 0 { !x } else { x };
    let (mut lo, mut hi) = (Rational::zero(), Rational::zero());
    for (i, r) in rs.iter().enumerate() {
        let c = candidates(r, d, &CALIBRATED_READING);
        if energy >> i & 1 == 1 {
            lo += c.lo_energy;
            hi += c.hi_energy;
        } else {
            lo += c.lo_power;
            hi += c.hi_power;
        }
    }
    (lo, hi)
}

pub fn phi_row(d: &DirectionIndex, x: Group, rs: &ResourceSet) -> SymbolicInequality {
    let mut f = aggregate_terms(d);
    let (lo, hi) = phi_bounds(d, x, rs);
    f.shift(&lo, &hi);
    f
}

/// Tightest φ bounds of the power sum over `mask`, over every depth that
/// represents it and every group `X` (only `∅ ≠ X ≠ N` when `proper`).
pub fn phi_subset_bounds(mask: u64, rs: &ResourceSet, proper: bool) -> Option<(Rational, Rational)> {
    let all = (1u64 << rs.len()) - 1;
    let mut best: Option<(Rational, Rational)> = None;
    for d in representations(rs.horizon(), mask) {
        for x in 0..=all {
            if proper && (x == 0 || x == all) {
                continue;
            }
            let (lo, hi) = phi_bounds(&d, x, rs);
            best = Some(match best {
                None => (lo, hi),
                Some((l, h)) => (l.max(lo), h.min(hi)),
            });
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fme::joint_system;
    use crate::gen::random_fleet;
    use crate::rational::int;

    fn index(rs: &ResourceSet) -> impl Fn(Symbol) -> usize + '_ {
        let (n, horizon) = (rs.len(), rs.horizon());
        move |s| match s {
            Symbol::Energy { resource, t } => (t - 1) * n + resource,
            Symbol::Aggregate { t } => n * horizon + t - 1,
        }
    }

    #[test]
    fn single_interval_phi() {
        let r = FlexResource::new("r", vec![int(0)], vec![int(1)], vec![int(0)], vec![int(1)]).unwrap();
        let rs = ResourceSet::new(vec![r]).unwrap();
        let d = DirectionIndex::from_intervals(1, &[1]).unwrap();
        assert_eq!(phi_bounds(&d, 0, &rs).1, int(1));
        assert_eq!(phi_bounds(&d, 1, &rs).1, int(1));
    }

    #[test]
    fn rows_are_implied_by_the_joint_system() {
        for seed in 0..6 {
            let rs = random_fleet(seed, 2, 3);
            let sys = joint_system(&rs);
            for q in 1..=3 {
                for mask in 1..1u64 << 3 {
                    let Ok(d) = DirectionIndex::at_depth(3, q, mask) else { continue };
                    for x in 0..4 {
                        for row in
                            psi_row(&d, x, &rs).rows(index(&rs)).iter().chain(&phi_row(&d, x, &rs).rows(index(&rs)))
                        {
                            assert!(sys.implies(row), "{d} q={q} x={x}");
                        }
                    }
                }
            }
        }
    }
}
