//! Per-resource support values of subset-sum functionals.
//!
//! The closed form is the saturating trajectory: for the upper bound of
//! `Σ_{τ∈S} x(τ)` the energy rises as fast as allowed inside `S` and falls as
//! fast as allowed outside it, each step clipped to the energy envelope; the
//! lower bound swaps the two moves. Under Hypotheses 1–3 this equals the LP
//! optimum over the resource polytope (checked exhaustively in the tests).

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::direction::DirectionIndex;
use super::AfrError;
use crate::flex::FlexResource;
use crate::linear::{LpStatus, Sense};
use crate::rational::{scaled_integer, Rational};

/// Exact scalar used by the support evaluator.
pub trait Amount: Clone + Ord + Send + Sync + Zero {
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
}

impl Amount for i128 {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
}

impl Amount for Rational {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
}

/// A resource's bounds in some exact scalar type; index 0 is unused.
#[derive(Debug, Clone)]
pub struct Envelope<A> {
    p_lo: Vec<A>,
    p_hi: Vec<A>,
    e_lo: Vec<A>,
    e_hi: Vec<A>,
}

impl Envelope<Rational> {
    pub fn exact(r: &FlexResource) -> Self {
        let pick = |f: &dyn Fn(usize) -> Rational| {
            (0..=r.horizon()).map(|t| if t == 0 { Rational::zero() } else { f(t) }).collect()
        };
        Envelope {
            p_lo: pick(&|t| r.p_lo(t).clone()),
            p_hi: pick(&|t| r.p_hi(t).clone()),
            e_lo: pick(&|t| r.e_lo(t).clone()),
            e_hi: pick(&|t| r.e_hi(t).clone()),
        }
    }
}

impl Envelope<i128> {
    /// Bounds multiplied by `scale`, if every scaled value is an integer of magnitude at most `limit`.
    pub fn scaled(r: &FlexResource, scale: &BigInt, limit: i128) -> Option<Self> {
        let conv = |v: &Rational| -> Option<i128> {
            let x = scaled_integer(v, scale)?.to_i128()?;
            (x.abs() <= limit).then_some(x)
        };
        let mut env = Envelope { p_lo: vec![0], p_hi: vec![0], e_lo: vec![0], e_hi: vec![0] };
        for t in 1..=r.horizon() {
            env.p_lo.push(conv(r.p_lo(t))?);
            env.p_hi.push(conv(r.p_hi(t))?);
            env.e_lo.push(conv(r.e_lo(t))?);
            env.e_hi.push(conv(r.e_hi(t))?);
        }
        Some(env)
    }
}

impl<A: Amount> Envelope<A> {
    pub fn horizon(&self) -> usize {
        self.p_lo.len() - 1
    }

    fn up(&self, e: &A, t: usize) -> A {
        self.e_hi[t].clone().min(e.plus(&self.p_hi[t]))
    }

    fn down(&self, e: &A, t: usize) -> A {
        self.e_lo[t].clone().max(e.plus(&self.p_lo[t]))
    }

    /// Upper and lower support of one subset, by a single greedy walk each.
    pub fn support(&self, mask: u64) -> (A, A) {
        let (mut eu, mut vu) = (A::zero(), A::zero());
        let (mut ed, mut vd) = (A::zero(), A::zero());
        for t in 1..=self.horizon() {
            if mask >> (t - 1) & 1 == 1 {
                let nu = self.up(&eu, t);
                let nd = self.down(&ed, t);
                vu = vu.plus(&nu.minus(&eu));
                vd = vd.plus(&nd.minus(&ed));
                eu = nu;
                ed = nd;
            } else {
                eu = self.down(&eu, t);
                ed = self.up(&ed, t);
            }
        }
        (vd, vu)
    }

    /// Lower and upper supports of every subset, indexed by mask (`mask = 0` holds zeros).
    ///
    /// A depth-first walk over interval choices shares every prefix, so the
    /// whole table costs `O(2^T)`.
    pub fn support_table(&self) -> (Vec<A>, Vec<A>) {
        let size = 1usize << self.horizon();
        let mut lo = vec![A::zero(); size];
        let mut hi = vec![A::zero(); size];
        let z = A::zero();
        self.walk(1, 0, [&z, &z, &z, &z], &mut lo, &mut hi);
        (lo, hi)
    }

    /// `state` is `[upper energy, upper value, lower energy, lower value]` after interval `t − 1`.
    fn walk(&self, t: usize, mask: usize, state: [&A; 4], lo: &mut [A], hi: &mut [A]) {
        let [eu, vu, ed, vd] = state;
        if t > self.horizon() {
            lo[mask] = vd.clone();
            hi[mask] = vu.clone();
            return;
        }
        let (ou, od) = (self.down(eu, t), self.up(ed, t));
        self.walk(t + 1, mask, [&ou, vu, &od, vd], lo, hi);
        let (iu, id) = (self.up(eu, t), self.down(ed, t));
        let (wu, wd) = (vu.plus(&iu.minus(eu)), vd.plus(&id.minus(ed)));
        self.walk(t + 1, mask | 1 << (t - 1), [&iu, &wu, &id, &wd], lo, hi);
    }
}

fn subset_objective(r: &FlexResource, mask: u64) -> Vec<(usize, Rational)> {
    let d = DirectionIndex::from_mask(r.horizon(), mask).expect("validated mask");
    d.coefficients()
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c != 0)
        .map(|(k, c)| (k, Rational::from_integer(c.into())))
        .collect()
}

fn support_lp(r: &FlexResource, intervals: &[usize], sense: Sense) -> Result<Rational, AfrError> {
    let d = DirectionIndex::from_intervals(r.horizon(), intervals)?;
    let out = r.polytope().optimize(&subset_objective(r, d.mask()), sense);
    match out.status {
        LpStatus::Optimal => Ok(out.value.expect("optimal value")),
        LpStatus::Infeasible => Err(AfrError::EmptyResource(r.id().to_string())),
        LpStatus::Unbounded => unreachable!("a bounded polytope has finite support"),
    }
}

/// Maximum of `Σ_{τ∈S} (e(τ) − e(τ−1))` over the resource polytope, by LP.
pub fn support_upper_lp(r: &FlexResource, intervals: &[usize]) -> Result<Rational, AfrError> {
    support_lp(r, intervals, Sense::Max)
}

/// Minimum of `Σ_{τ∈S} (e(τ) − e(τ−1))` over the resource polytope, by LP.
pub fn support_lower_lp(r: &FlexResource, intervals: &[usize]) -> Result<Rational, AfrError> {
    support_lp(r, intervals, Sense::Min)
}

fn closed(r: &FlexResource, d: &DirectionIndex) -> Result<(Rational, Rational), AfrError> {
    if d.horizon() != r.horizon() {
        return Err(AfrError::HorizonMismatch { expected: r.horizon(), found: d.horizon() });
    }
    if let Some(violation) = r.validate().violations.into_iter().next() {
        return Err(AfrError::Hypothesis { id: r.id().to_string(), violation: Box::new(violation) });
    }
    Ok(Envelope::exact(r).support(d.mask()))
}

/// Closed-form upper support; refuses resources that violate the hypotheses.
pub fn support_upper_closed(r: &FlexResource, d: &DirectionIndex) -> Result<Rational, AfrError> {
    closed(r, d).map(|(_, hi)| hi)
}

/// Closed-form lower support; refuses resources that violate the hypotheses.
pub fn support_lower_closed(r: &FlexResource, d: &DirectionIndex) -> Result<Rational, AfrError> {
    closed(r, d).map(|(lo, _)| lo)
}
