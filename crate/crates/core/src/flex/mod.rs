//! Individual storage-like resources: power and energy envelopes over a horizon.
//!
//! Energies are stored relative to the initial energy `e0`, so every
//! trajectory starts at zero. Power bounds are energy-per-interval (the
//! interval length is folded in on ingestion). Bound vectors are indexed
//! `1..=T`; index 0 holds the fixed initial state (energy 0, power unused).

mod io;

use std::collections::HashSet;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::linear::{Constraint, LinearSystem, Relation};
use crate::rational::Rational;

pub use io::{parse_resource_list, parse_resources, resources_to_csv, resources_to_json, Format, ParseOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlexError {
    #[error("resource `{id}`: {field} has {found} entries, expected {expected}")]
    Length { id: String, field: &'static str, found: usize, expected: usize },
    #[error("resource `{0}` has an empty horizon")]
    EmptyHorizon(String),
    #[error("resource `{id}` violates {violation}")]
    Hypothesis { id: String, violation: Box<Violation> },
    #[error("resource `{id}` admits no trajectory: bounds cross at t={t}")]
    Empty { id: String, t: usize },
    #[error("duplicate resource id `{0}`")]
    DuplicateId(String),
    #[error("resource `{id}` has horizon {found}, expected {expected}")]
    HorizonMismatch { id: String, found: usize, expected: usize },
    #[error("malformed resource document: {0}")]
    Malformed(String),
}

/// One failed hypothesis inequality `lhs <= rhs` (it holds with `lhs > rhs`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub hypothesis: u8,
    pub t: usize,
    pub condition: &'static str,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hypo {} at t={}: {} fails ({} > {})", self.hypothesis, self.t, self.condition, self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub id: String,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlexResource {
    id: String,
    p_lo: Vec<Rational>,
    p_hi: Vec<Rational>,
    e_lo: Vec<Rational>,
    e_hi: Vec<Rational>,
    energy_offset: Rational,
}

fn padded(id: &str, field: &'static str, v: Vec<Rational>, horizon: usize) -> Result<Vec<Rational>, FlexError> {
    if v.len() != horizon {
        return Err(FlexError::Length { id: id.to_string(), field, found: v.len(), expected: horizon });
    }
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(Rational::zero());
    out.extend(v);
    Ok(out)
}

impl FlexResource {
    /// Resource starting from zero energy. Hypotheses are not checked here.
    pub fn new(
        id: impl Into<String>,
        p_lo: Vec<Rational>,
        p_hi: Vec<Rational>,
        e_lo: Vec<Rational>,
        e_hi: Vec<Rational>,
    ) -> Result<Self, FlexError> {
        Self::with_initial_energy(id, p_lo, p_hi, e_lo, e_hi, Rational::zero())
    }

    /// Resource whose energy bounds are absolute and whose trajectory starts at `e0`.
    pub fn with_initial_energy(
        id: impl Into<String>,
        p_lo: Vec<Rational>,
        p_hi: Vec<Rational>,
        e_lo: Vec<Rational>,
        e_hi: Vec<Rational>,
        e0: Rational,
    ) -> Result<Self, FlexError> {
        let id = id.into();
        let horizon = p_lo.len();
        if horizon == 0 {
            return Err(FlexError::EmptyHorizon(id));
        }
        let shift = |v: Vec<Rational>| v.into_iter().map(|x| x - &e0).collect::<Vec<_>>();
        Ok(FlexResource {
            p_lo: padded(&id, "p_min", p_lo, horizon)?,
            p_hi: padded(&id, "p_max", p_hi, horizon)?,
            e_lo: padded(&id, "e_min", shift(e_lo), horizon)?,
            e_hi: padded(&id, "e_max", shift(e_hi), horizon)?,
            energy_offset: e0,
            id,
        })
    }

    /// Power-only resource: energy envelopes are the cumulative power bounds.
    pub fn from_generator(id: impl Into<String>, p_lo: Vec<Rational>, p_hi: Vec<Rational>) -> Result<Self, FlexError> {
        let id = id.into();
        if p_hi.len() != p_lo.len() {
            return Err(FlexError::Length { id, field: "p_max", found: p_hi.len(), expected: p_lo.len() });
        }
        let cumulative = |v: &[Rational]| {
            v.iter()
                .scan(Rational::zero(), |acc, x| {
                    *acc += x;
                    Some(acc.clone())
                })
                .collect::<Vec<_>>()
        };
        let (e_lo, e_hi) = (cumulative(&p_lo), cumulative(&p_hi));
        let r = FlexResource::new(id, p_lo, p_hi, e_lo, e_hi)?;
        if let Some(v) = r.validate().violations.into_iter().next() {
            return Err(FlexError::Hypothesis { id: r.id, violation: Box::new(v) });
        }
        Ok(r)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn horizon(&self) -> usize {
        self.p_lo.len() - 1
    }

    /// Initial energy removed from the stored energy bounds.
    pub fn energy_offset(&self) -> &Rational {
        &self.energy_offset
    }

    pub fn p_lo(&self, t: usize) -> &Rational {
        &self.p_lo[t]
    }

    pub fn p_hi(&self, t: usize) -> &Rational {
        &self.p_hi[t]
    }

    /// Lower energy bound relative to `e0`; `e_lo(0) == 0`.
    pub fn e_lo(&self, t: usize) -> &Rational {
        &self.e_lo[t]
    }

    pub fn e_hi(&self, t: usize) -> &Rational {
        &self.e_hi[t]
    }

    /// The same resource with every bound (and the offset) multiplied by `k`.
    pub fn scaled(&self, k: &Rational) -> FlexResource {
        let mul = |v: &[Rational]| v.iter().map(|x| x * k).collect();
        FlexResource {
            id: self.id.clone(),
            p_lo: mul(&self.p_lo),
            p_hi: mul(&self.p_hi),
            e_lo: mul(&self.e_lo),
            e_hi: mul(&self.e_hi),
            energy_offset: &self.energy_offset * k,
        }
    }

    pub fn with_id(&self, id: impl Into<String>) -> FlexResource {
        FlexResource { id: id.into(), ..self.clone() }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut need = |hypothesis, t, condition, lhs: Rational, rhs: Rational| {
            if lhs > rhs {
                violations.push(Violation { hypothesis, t, condition, lhs, rhs });
            }
        };
        for t in 1..=self.horizon() {
            let (pl, ph) = (&self.p_lo[t], &self.p_hi[t]);
            let (el, eh) = (&self.e_lo[t], &self.e_hi[t]);
            let (el0, eh0) = (&self.e_lo[t - 1], &self.e_hi[t - 1]);
            need(1, t, "p_lo(t) <= p_hi(t)", pl.clone(), ph.clone());
            need(1, t, "e_lo(t) <= e_hi(t)", el.clone(), eh.clone());
            need(2, t, "p_lo(t) <= e_lo(t) - e_lo(t-1)", pl.clone(), el - el0);
            need(2, t, "e_lo(t) - e_lo(t-1) <= p_hi(t)", el - el0, ph.clone());
            need(2, t, "p_lo(t) <= e_hi(t) - e_hi(t-1)", pl.clone(), eh - eh0);
            need(2, t, "e_hi(t) - e_hi(t-1) <= p_hi(t)", eh - eh0, ph.clone());
            need(3, t, "e_lo(t-1) + p_hi(t) <= e_hi(t)", el0 + ph, eh.clone());
            need(3, t, "e_lo(t) <= e_hi(t-1) + p_lo(t)", el.clone(), eh0 + pl);
        }
        ValidationReport { id: self.id.clone(), violations }
    }

    /// Tightest bounds with the same trajectory set; they satisfy all three hypotheses.
    ///
    /// Energy envelopes are propagated forward and backward to a fixed point,
    /// then power bounds are clipped to what the envelopes allow between
    /// consecutive intervals.
    pub fn tighten(&self) -> Result<FlexResource, FlexError> {
        for t in 1..=self.horizon() {
            for (lhs, rhs, condition) in [
                (&self.p_lo[t], &self.p_hi[t], "p_lo(t) <= p_hi(t)"),
                (&self.e_lo[t], &self.e_hi[t], "e_lo(t) <= e_hi(t)"),
            ] {
                if lhs > rhs {
                    let violation = Violation { hypothesis: 1, t, condition, lhs: lhs.clone(), rhs: rhs.clone() };
                    return Err(FlexError::Hypothesis { id: self.id.clone(), violation: Box::new(violation) });
                }
            }
        }
        let empty = |t| FlexError::Empty { id: self.id.clone(), t };
        let n = self.horizon();
        let mut r = self.clone();
        loop {
            let mut changed = false;
            for t in 1..=n {
                let hi = &r.e_hi[t - 1] + &r.p_hi[t];
                if hi < r.e_hi[t] {
                    r.e_hi[t] = hi;
                    changed = true;
                }
                let lo = &r.e_lo[t - 1] + &r.p_lo[t];
                if lo > r.e_lo[t] {
                    r.e_lo[t] = lo;
                    changed = true;
                }
                if r.e_lo[t] > r.e_hi[t] {
                    return Err(empty(t));
                }
            }
            for t in (1..=n).rev() {
                let hi = &r.e_hi[t] - &r.p_lo[t];
                if hi < r.e_hi[t - 1] {
                    r.e_hi[t - 1] = hi;
                    changed = true;
                }
                let lo = &r.e_lo[t] - &r.p_hi[t];
                if lo > r.e_lo[t - 1] {
                    r.e_lo[t - 1] = lo;
                    changed = true;
                }
                if r.e_lo[t - 1] > r.e_hi[t - 1] {
                    return Err(empty(t - 1));
                }
            }
            if !changed {
                break;
            }
        }
        for t in 1..=n {
            let hi = &r.e_hi[t] - &r.e_lo[t - 1];
            if hi < r.p_hi[t] {
                r.p_hi[t] = hi;
            }
            let lo = &r.e_lo[t] - &r.e_hi[t - 1];
            if lo > r.p_lo[t] {
                r.p_lo[t] = lo;
            }
        }
        Ok(r)
    }

    /// The `4T` rows of the resource's polytope over `e_<id>(1..T)`.
    pub fn polytope(&self) -> LinearSystem {
        let vars: Vec<String> = (1..=self.horizon()).map(|t| energy_var(&self.id, t)).collect();
        let mut sys = LinearSystem::new(vars).expect("distinct interval names");
        for row in self.rows(|t| t - 1) {
            sys.push(row).expect("rows reference known variables");
        }
        sys
    }

    /// Polytope rows with `e(t)` mapped to variable `var(t)`, ordered per interval as
    /// power lower, power upper, energy lower, energy upper.
    pub fn rows(&self, var: impl Fn(usize) -> usize) -> Vec<Constraint> {
        let mut rows = Vec::with_capacity(4 * self.horizon());
        let one = Rational::from_integer(1.into());
        for t in 1..=self.horizon() {
            let mut step = vec![(var(t), one.clone())];
            if t > 1 {
                step.push((var(t - 1), -one.clone()));
            }
            rows.push(Constraint::new(step.clone(), Relation::Ge, self.p_lo[t].clone()));
            rows.push(Constraint::new(step, Relation::Le, self.p_hi[t].clone()));
            rows.push(Constraint::new([(var(t), one.clone())], Relation::Ge, self.e_lo[t].clone()));
            rows.push(Constraint::new([(var(t), one.clone())], Relation::Le, self.e_hi[t].clone()));
        }
        rows
    }
}

pub fn validate_hypotheses(r: &FlexResource) -> ValidationReport {
    r.validate()
}

pub fn tighten_bounds(r: &FlexResource) -> Result<FlexResource, FlexError> {
    r.tighten()
}

pub fn individual_polytope(r: &FlexResource) -> LinearSystem {
    r.polytope()
}

/// Variable name of resource `id`'s energy at the end of interval `t`.
pub fn energy_var(id: &str, t: usize) -> String {
    format!("e_{id}({t})")
}

/// Variable name of the aggregate energy at the end of interval `t`.
pub fn aggregate_var(t: usize) -> String {
    format!("E({t})")
}

/// Validated resources sharing one horizon, with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceSet {
    horizon: usize,
    resources: Vec<FlexResource>,
}

impl ResourceSet {
    /// Horizon is taken from the first member; an empty set has horizon 0.
    pub fn new(resources: Vec<FlexResource>) -> Result<Self, FlexError> {
        let horizon = resources.first().map_or(0, FlexResource::horizon);
        Self::with_horizon(horizon, resources)
    }

    pub fn with_horizon(horizon: usize, resources: Vec<FlexResource>) -> Result<Self, FlexError> {
        let mut seen = HashSet::new();
        for r in &resources {
            if !seen.insert(r.id()) {
                return Err(FlexError::DuplicateId(r.id().to_string()));
            }
            if r.horizon() != horizon {
                return Err(FlexError::HorizonMismatch {
                    id: r.id().to_string(),
                    found: r.horizon(),
                    expected: horizon,
                });
            }
            if let Some(v) = r.validate().violations.into_iter().next() {
                return Err(FlexError::Hypothesis { id: r.id().to_string(), violation: Box::new(v) });
            }
        }
        Ok(ResourceSet { horizon, resources })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.resources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.resources.is_empty()
    }

    pub fn resources(&self) -> &[FlexResource] {
        &self.resources
    }

    pub fn get(&self, i: usize) -> &FlexResource {
        &self.resources[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FlexResource> {
        self.resources.iter()
    }

    pub fn into_resources(self) -> Vec<FlexResource> {
        self.resources
    }

    /// Sum of the members' initial energies.
    pub fn energy_offset(&self) -> Rational {
        self.resources.iter().map(|r| r.energy_offset().clone()).sum()
    }

    /// Members at the given positions, in that order.
    pub fn subset(&self, picks: &[usize]) -> ResourceSet {
        ResourceSet { horizon: self.horizon, resources: picks.iter().map(|&i| self.resources[i].clone()).collect() }
    }
}

impl<'a> IntoIterator for &'a ResourceSet {
    type Item = &'a FlexResource;
    type IntoIter = std::slice::Iter<'a, FlexResource>;

    fn into_iter(self) -> Self::IntoIter {
        self.resources.iter()
    }
}
