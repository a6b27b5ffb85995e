//! Symbolic replay of the elimination operations and LP checks of the redundancy claims.
//!
//! An inequality is `lower ≤ Σ c·symbol ≤ upper` over energies `e_i(t)` and
//! aggregates `E(t)`, all relative to the initial energy, so `e_i(0)` is the
//! constant zero and never appears as a symbol.
//!
//! The operations act on the group of energy symbols at one interval `t`,
//! which carries a uniform sign `σ`:
//!
//! * SA completes the group to `σ E(t)` using each missing resource's power
//!   row (set `Y`, leaving `−σ e_Y(t−1)`) or energy row (the rest);
//! * RA cancels the group using power rows (set `Y ⊆ X`, leaving `σ e_Y(t−1)`)
//!   or energy rows;
//! * SP and RP do the same for only part of the resources.
//!
//! Resource sets are bit masks over the resource order of the [`ResourceSet`].

pub mod bounds;
pub mod checks;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::flex::ResourceSet;
use crate::linear::{Constraint, Relation};
use crate::rational::{format_rational, Rational};

pub use bounds::{phi_bounds, phi_row, phi_subset_bounds, psi_bounds, psi_row};
pub use checks::{
    check_method1_redundancy, check_theorem1, check_theorem2, check_theorem3, report_to_json, run_suite, CheckRecord,
    SuiteOptions, Theorem1Variant, Theorem2Case,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TheoremError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("mixed signs among the interval-{0} energy symbols")]
    MixedSigns(usize),
}

/// Bit mask of resources.
pub type Group = u64;

pub fn members(g: Group) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| g >> i & 1 == 1)
}

pub fn group_of(items: &[usize]) -> Group {
    items.iter().fold(0, |g, i| g | 1 << i)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Aggregate { t: usize },
    Energy { resource: usize, t: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicInequality {
    coeffs: BTreeMap<Symbol, Rational>,
    lower: Rational,
    upper: Rational,
}

impl SymbolicInequality {
    /// `0 ≤ 0 ≤ 0`.
    pub fn trivial() -> Self {
        SymbolicInequality { coeffs: BTreeMap::new(), lower: Rational::zero(), upper: Rational::zero() }
    }

    pub fn new(lower: Rational, upper: Rational) -> Self {
        SymbolicInequality { coeffs: BTreeMap::new(), lower, upper }
    }

    pub fn coeffs(&self) -> &BTreeMap<Symbol, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, s: &Symbol) -> Rational {
        self.coeffs.get(s).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn lower(&self) -> &Rational {
        &self.lower
    }

    pub fn upper(&self) -> &Rational {
        &self.upper
    }

    /// Adds `c·s`; `e_i(0)` is the constant zero.
    pub fn add_term(&mut self, s: Symbol, c: Rational) {
        if let Symbol::Energy { t: 0, .. } = s {
            return;
        }
        let v = self.coeffs.remove(&s).unwrap_or_else(Rational::zero) + c;
        if !v.is_zero() {
            self.coeffs.insert(s, v);
        }
    }

    pub fn shift(&mut self, lo: &Rational, hi: &Rational) {
        self.lower += lo;
        self.upper += hi;
    }

    pub fn negated(&self) -> Self {
        SymbolicInequality {
            coeffs: self.coeffs.iter().map(|(s, c)| (*s, -c)).collect(),
            lower: -&self.upper,
            upper: -&self.lower,
        }
    }

    /// `self + other` with bounds added.
    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in &other.coeffs {
            out.add_term(*s, c.clone());
        }
        out.shift(&other.lower, &other.upper);
        out
    }

    /// Resources with an energy symbol at `t`, and their common sign.
    pub fn energy_group(&self, t: usize) -> Result<(Group, Option<i8>), TheoremError> {
        let (mut g, mut sign) = (0, None);
        for (s, c) in &self.coeffs {
            if let Symbol::Energy { resource, t: u } = s {
                if *u != t {
                    continue;
                }
                let this = if c.is_positive() { 1 } else { -1 };
                if c.abs() != Rational::one() || sign.is_some_and(|x| x != this) {
                    return Err(TheoremError::MixedSigns(t));
                }
                sign = Some(this);
                g |= 1 << resource;
            }
        }
        Ok((g, sign))
    }

    pub fn has_symbols(&self) -> bool {
        !self.coeffs.is_empty()
    }

    /// Lower and upper rows with symbols mapped to variable indices.
    pub fn rows(&self, index: impl Fn(Symbol) -> usize) -> [Constraint; 2] {
        let coeffs: Vec<(usize, Rational)> = self.coeffs.iter().map(|(s, c)| (index(*s), c.clone())).collect();
        [
            Constraint::new(coeffs.clone(), Relation::Ge, self.lower.clone()),
            Constraint::new(coeffs, Relation::Le, self.upper.clone()),
        ]
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Aggregate { t } => write!(f, "E({t})"),
            Symbol::Energy { resource, t } => write!(f, "e_{resource}({t})"),
        }
    }
}

impl fmt::Display for SymbolicInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.coeffs.iter().map(|(s, c)| format!("{}*{s}", format_rational(c))).collect();
        let mid = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        write!(f, "{} <= {mid} <= {}", format_rational(&self.lower), format_rational(&self.upper))
    }
}

/// The four operations over one resource set.
#[derive(Debug, Clone, Copy)]
pub struct Calculus<'a> {
    rs: &'a ResourceSet,
    /// Test-only fault: SA keeps the previous-interval energy with the wrong sign.
    mutant: bool,
}

fn pre(ok: bool, what: impl Fn() -> String) -> Result<(), TheoremError> {
    if ok {
        Ok(())
    } else {
        Err(TheoremError::Precondition(what()))
    }
}

impl<'a> Calculus<'a> {
    pub fn new(rs: &'a ResourceSet) -> Self {
        Calculus { rs, mutant: false }
    }

    pub fn with_mutant(rs: &'a ResourceSet, mutant: bool) -> Self {
        Calculus { rs, mutant }
    }

    pub fn resources(&self) -> &ResourceSet {
        self.rs
    }

    /// All resources.
    pub fn everyone(&self) -> Group {
        (1u64 << self.rs.len()) - 1
    }

    /// The group at `t` must be exactly `x`; its sign defaults to `+1` when empty.
    fn sign_of(&self, f: &SymbolicInequality, x: Group, t: usize) -> Result<i8, TheoremError> {
        pre(t >= 1 && t <= self.rs.horizon(), || format!("interval {t} outside 1..={}", self.rs.horizon()))?;
        let (g, sign) = f.energy_group(t)?;
        pre(g == x, || format!("interval-{t} group is {g:#b}, expected {x:#b}"))?;
        Ok(sign.unwrap_or(1))
    }

    /// Adds `c·e_i(t)` to `f`, bounding it by resource `i`'s power row
    /// (which brings in `−c·e_i(t−1)`) or its energy row.
    fn combine(&self, f: &mut SymbolicInequality, i: usize, t: usize, c: i8, power: bool, flip: bool) {
        let r = self.rs.get(i);
        let (lo, hi) = if power { (r.p_lo(t), r.p_hi(t)) } else { (r.e_lo(t), r.e_hi(t)) };
        let unit = Rational::from_integer(c.into());
        f.add_term(Symbol::Energy { resource: i, t }, unit.clone());
        if power {
            let back = if flip { unit.clone() } else { -unit.clone() };
            f.add_term(Symbol::Energy { resource: i, t: t - 1 }, back);
        }
        if c > 0 {
            f.shift(lo, hi);
        } else {
            f.shift(&-hi, &-lo);
        }
    }

    /// `SA_{X,Y}(t)`: `Y ⊆ N − X` use power rows, the rest of `N − X` energy rows.
    pub fn apply_sa(
        &self,
        f: &SymbolicInequality,
        x: Group,
        y: Group,
        t: usize,
    ) -> Result<SymbolicInequality, TheoremError> {
        let all = self.everyone();
        let sigma = self.sign_of(f, x, t)?;
        pre(y & !(all & !x) == 0, || format!("Y={y:#b} is not inside N−X"))?;
        let mut out = f.clone();
        for i in members(all & !x) {
            self.combine(&mut out, i, t, sigma, y >> i & 1 == 1, self.mutant);
        }
        for i in members(all) {
            out.add_term(Symbol::Energy { resource: i, t }, -Rational::from_integer(sigma.into()));
        }
        out.add_term(Symbol::Aggregate { t }, Rational::from_integer(sigma.into()));
        Ok(out)
    }

    /// `RA_{X,Y}(t)`: `Y ⊆ X` use power rows, `X − Y` energy rows.
    pub fn apply_ra(
        &self,
        f: &SymbolicInequality,
        x: Group,
        y: Group,
        t: usize,
    ) -> Result<SymbolicInequality, TheoremError> {
        let sigma = self.sign_of(f, x, t)?;
        pre(y & !x == 0, || format!("Y={y:#b} is not inside X={x:#b}"))?;
        let mut out = f.clone();
        for i in members(x) {
            self.combine(&mut out, i, t, -sigma, y >> i & 1 == 1, false);
        }
        Ok(out)
    }

    /// SP from `X` to `target` (`X ⊊ target ⊊ N`); `wp ⊆ target − X` use power rows.
    pub fn apply_sp(
        &self,
        f: &SymbolicInequality,
        x: Group,
        target: Group,
        wp: Group,
        t: usize,
    ) -> Result<SymbolicInequality, TheoremError> {
        let sigma = self.sign_of(f, x, t)?;
        let all = self.everyone();
        pre(x & !target == 0 && x != target, || "SP target must strictly contain X".into())?;
        pre(target & !all == 0 && target != all, || "SP to every resource is SA".into())?;
        pre(wp & !(target & !x) == 0, || "SP power set outside target − X".into())?;
        let mut out = f.clone();
        for i in members(target & !x) {
            self.combine(&mut out, i, t, sigma, wp >> i & 1 == 1, false);
        }
        Ok(out)
    }

    /// RP from `X` to a nonempty `target ⊊ X`; `wp ⊆ X − target` use power rows.
    pub fn apply_rp(
        &self,
        f: &SymbolicInequality,
        x: Group,
        target: Group,
        wp: Group,
        t: usize,
    ) -> Result<SymbolicInequality, TheoremError> {
        let sigma = self.sign_of(f, x, t)?;
        pre(target & !x == 0 && target != x, || "RP target must be strictly inside X".into())?;
        pre(target != 0, || "RP to nothing is RA".into())?;
        pre(wp & !(x & !target) == 0, || "RP power set outside X − target".into())?;
        let mut out = f.clone();
        for i in members(x & !target) {
            self.combine(&mut out, i, t, -sigma, wp >> i & 1 == 1, false);
        }
        Ok(out)
    }

    /// Adds `sign·e_i(t)` for `i ∈ set`, each bounded by its energy row.
    pub fn supplement_energy(
        &self,
        f: &SymbolicInequality,
        set: Group,
        t: usize,
        sign: i8,
    ) -> Result<SymbolicInequality, TheoremError> {
        let (g, s) = f.energy_group(t)?;
        pre(g & set == 0, || "supplemented resources already present".into())?;
        pre(s.map_or(true, |s| s == sign), || "supplement sign differs from the group".into())?;
        let mut out = f.clone();
        for i in members(set) {
            self.combine(&mut out, i, t, sign, false, false);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flex::FlexResource;
    use crate::rational::int;

    fn pair() -> ResourceSet {
        let a = FlexResource::new("a", vec![int(0); 2], vec![int(1); 2], vec![int(0), int(0)], vec![int(1), int(2)])
            .unwrap();
        let b = FlexResource::new("b", vec![int(-1); 2], vec![int(1); 2], vec![int(-1), int(-1)], vec![int(1), int(1)])
            .unwrap();
        ResourceSet::new(vec![a, b]).unwrap()
    }

    #[test]
    fn energy_constraint_from_trivial() {
        let rs = pair();
        let c = Calculus::new(&rs);
        let f = c.apply_sa(&SymbolicInequality::trivial(), 0, 0, 2).unwrap();
        assert_eq!(f.to_string(), "-1 <= 1*E(2) <= 3");
    }

    #[test]
    fn power_constraint_after_one_chaining() {
        let rs = pair();
        let c = Calculus::new(&rs);
        let f = c.apply_sa(&SymbolicInequality::trivial(), 0, 0b11, 2).unwrap();
        assert_eq!(f.to_string(), "-1 <= 1*E(2) + -1*e_0(1) + -1*e_1(1) <= 2");
        assert_eq!(f.energy_group(1).unwrap(), (0b11, Some(-1)));
        let g = c.apply_sa(&f, 0b11, 0, 1).unwrap();
        assert_eq!(g.to_string(), "-1 <= -1*E(1) + 1*E(2) <= 2");
    }

    #[test]
    fn ra_with_all_power_clears_the_interval() {
        let rs = pair();
        let c = Calculus::new(&rs);
        let f = c.apply_sa(&SymbolicInequality::trivial(), 0, 0b01, 2).unwrap();
        let g = c.apply_ra(&f, 0b01, 0b01, 1).unwrap();
        assert_eq!(g.energy_group(1).unwrap().0, 0);
        // e_a(0) is the constant zero: E(2) − e_a(1) + x_a(1) with x_a(1) ∈ [0,1]
        assert_eq!(g.to_string(), "-1 <= 1*E(2) <= 3");
        let h = c.apply_ra(&f, 0b01, 0, 1).unwrap();
        assert_eq!(h.to_string(), "-1 <= 1*E(2) <= 3");
    }

    #[test]
    fn preconditions() {
        let rs = pair();
        let c = Calculus::new(&rs);
        let f = c.apply_sa(&SymbolicInequality::trivial(), 0, 0b01, 2).unwrap();
        assert!(c.apply_sa(&f, 0b10, 0, 1).is_err());
        assert!(c.apply_ra(&f, 0b01, 0b10, 1).is_err());
        assert!(c.apply_sa(&f, 0b01, 0b01, 1).is_err());
        assert!(c.apply_sp(&f, 0b01, 0b11, 0, 1).is_err());
        assert!(c.apply_rp(&f, 0b01, 0, 0, 1).is_err());
    }
}
