//! The aggregated feasible region as one two-sided bound per nonempty interval subset.
//!
//! Rows are stored in Gray order (see [`enumerate_directions`]); row `k`
//! bounds `Σ_{τ∈S} (E(τ) − E(τ−1))` for the subset with mask `gray_mask(T, k + 1)`.
//! Bounds are relative to the summed initial energy `energy_offset`.

pub mod calibration;
pub mod direction;
pub mod io;
pub mod support;

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

pub use direction::{enumerate_directions, gray_mask, gray_position, DirectionIndex, MAX_HORIZON};
pub use support::{support_lower_closed, support_lower_lp, support_upper_closed, support_upper_lp, Amount, Envelope};

use crate::flex::{aggregate_var, energy_var, FlexError, FlexResource, ResourceSet, Violation};
use crate::linear::{Constraint, LinearSystem, Relation};
use crate::rational::{common_denominator, Rational};

#[derive(Debug, Error)]
pub enum AfrError {
    #[error("invalid direction: {0}")]
    BadDirection(String),
    #[error("horizon {0} is too large to enumerate")]
    HorizonTooLarge(usize),
    #[error("horizon mismatch: expected {expected}, found {found}")]
    HorizonMismatch { expected: usize, found: usize },
    #[error("resource {id}: {violation}")]
    Hypothesis { id: String, violation: Box<Violation> },
    #[error("resource {0} has an empty feasible region")]
    EmptyResource(String),
    #[error("resource id {0} is already present")]
    DuplicateId(String),
    #[error("resource id {0} is not in the model")]
    UnknownResource(String),
    #[error("the model carries no per-resource contributions")]
    MissingContributions,
    #[error("profile has {found} entries, expected {expected}")]
    ProfileLength { expected: usize, found: usize },
    #[error("profile cannot be allocated to the resources")]
    Infeasible,
    #[error("thread pool: {0}")]
    Threads(String),
    #[error("malformed AFR document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Flex(#[from] FlexError),
}

/// One resource's share of every row, in row order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contribution {
    pub id: String,
    pub energy_offset: Rational,
    pub lo: Vec<Rational>,
    pub hi: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AfrModel {
    horizon: usize,
    lo: Vec<Rational>,
    hi: Vec<Rational>,
    resources: Vec<String>,
    energy_offset: Rational,
    contributions: Option<Vec<Contribution>>,
}

#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    /// Worker threads; `None` uses the global pool, `Some(1)` runs inline.
    pub threads: Option<usize>,
    /// Keep per-resource contributions (memory grows with `N·2^T`).
    pub contributions: bool,
}

fn row_count(horizon: usize) -> usize {
    if horizon == 0 {
        0
    } else {
        (1usize << horizon) - 1
    }
}

impl AfrModel {
    /// The model of no resources: every bound is zero.
    pub fn empty(horizon: usize) -> Result<Self, AfrError> {
        if horizon > MAX_HORIZON {
            return Err(AfrError::HorizonTooLarge(horizon));
        }
        let rows = row_count(horizon);
        Ok(AfrModel {
            horizon,
            lo: vec![Rational::zero(); rows],
            hi: vec![Rational::zero(); rows],
            resources: Vec::new(),
            energy_offset: Rational::zero(),
            contributions: Some(Vec::new()),
        })
    }

    /// Assemble a model from rows in Gray order; used by the document reader.
    pub fn from_parts(
        horizon: usize,
        lo: Vec<Rational>,
        hi: Vec<Rational>,
        resources: Vec<String>,
        energy_offset: Rational,
        contributions: Option<Vec<Contribution>>,
    ) -> Result<Self, AfrError> {
        let rows = row_count(horizon);
        if horizon > MAX_HORIZON {
            return Err(AfrError::HorizonTooLarge(horizon));
        }
        if lo.len() != rows || hi.len() != rows {
            return Err(AfrError::Malformed(format!("expected {rows} constraints")));
        }
        let mut seen = HashSet::new();
        for id in &resources {
            if !seen.insert(id.as_str()) {
                return Err(AfrError::DuplicateId(id.clone()));
            }
        }
        if let Some(list) = &contributions {
            let ids: Vec<&str> = list.iter().map(|c| c.id.as_str()).collect();
            if ids != resources.iter().map(String::as_str).collect::<Vec<_>>() {
                return Err(AfrError::Malformed("contribution ids differ from resources".into()));
            }
            for c in list {
                if c.lo.len() != rows || c.hi.len() != rows {
                    return Err(AfrError::Malformed(format!("contribution {} has wrong length", c.id)));
                }
            }
            let offset: Rational = list.iter().map(|c| c.energy_offset.clone()).sum();
            if offset != energy_offset {
                return Err(AfrError::Malformed("contribution offsets do not sum to e0".into()));
            }
            for k in 0..rows {
                let slo: Rational = list.iter().map(|c| c.lo[k].clone()).sum();
                let shi: Rational = list.iter().map(|c| c.hi[k].clone()).sum();
                if slo != lo[k] || shi != hi[k] {
                    return Err(AfrError::Malformed(format!("row {k} is not the sum of its contributions")));
                }
            }
        }
        Ok(AfrModel { horizon, lo, hi, resources, energy_offset, contributions })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Number of directions (`2^T − 1`, zero when `T = 0`).
    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    /// Number of scalar inequalities, one lower and one upper per direction.
    pub fn inequality_count(&self) -> usize {
        2 * self.len()
    }

    pub fn resources(&self) -> &[String] {
        &self.resources
    }

    pub fn energy_offset(&self) -> &Rational {
        &self.energy_offset
    }

    pub fn contributions(&self) -> Option<&[Contribution]> {
        self.contributions.as_deref()
    }

    pub fn direction(&self, k: usize) -> DirectionIndex {
        DirectionIndex::from_mask(self.horizon, gray_mask(self.horizon, k as u64 + 1)).expect("row in range")
    }

    pub fn lower(&self) -> &[Rational] {
        &self.lo
    }

    pub fn upper(&self) -> &[Rational] {
        &self.hi
    }

    /// `(direction, lo, hi)` in row order.
    pub fn rows(&self) -> impl Iterator<Item = (DirectionIndex, &Rational, &Rational)> + '_ {
        (0..self.len()).map(move |k| (self.direction(k), &self.lo[k], &self.hi[k]))
    }

    /// Bounds of the subset `d` (any depth; only the subset matters).
    pub fn bounds(&self, d: &DirectionIndex) -> Option<(&Rational, &Rational)> {
        if d.horizon() != self.horizon {
            return None;
        }
        let k = gray_position(self.horizon, d.mask());
        Some((&self.lo[k], &self.hi[k]))
    }

    /// Drop per-resource contributions.
    pub fn without_contributions(mut self) -> Self {
        self.contributions = None;
        self
    }

    /// Rowwise sum with a model over disjoint resources.
    pub fn merge(&self, other: &AfrModel) -> Result<AfrModel, AfrError> {
        if self.horizon != other.horizon {
            return Err(AfrError::HorizonMismatch { expected: self.horizon, found: other.horizon });
        }
        let mine: HashSet<&str> = self.resources.iter().map(String::as_str).collect();
        if let Some(id) = other.resources.iter().find(|id| mine.contains(id.as_str())) {
            return Err(AfrError::DuplicateId(id.clone()));
        }
        let add = |a: &[Rational], b: &[Rational]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        let contributions = match (&self.contributions, &other.contributions) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        Ok(AfrModel {
            horizon: self.horizon,
            lo: add(&self.lo, &other.lo),
            hi: add(&self.hi, &other.hi),
            resources: self.resources.iter().chain(&other.resources).cloned().collect(),
            energy_offset: &self.energy_offset + &other.energy_offset,
            contributions,
        })
    }

    /// Adds one resource's supports to every row.
    pub fn add_resource(&self, r: &FlexResource) -> Result<AfrModel, AfrError> {
        let single = ResourceSet::with_horizon(self.horizon, vec![r.clone()])?;
        let opts = BuildOptions { threads: Some(1), contributions: self.contributions.is_some() };
        self.merge(&build_afr_with(&single, &opts)?)
    }

    /// Subtracts a resource's recorded contribution.
    pub fn remove_resource(&self, id: &str) -> Result<AfrModel, AfrError> {
        let list = self.contributions.as_ref().ok_or(AfrError::MissingContributions)?;
        let pos = list.iter().position(|c| c.id == id).ok_or_else(|| AfrError::UnknownResource(id.to_string()))?;
        let c = &list[pos];
        let sub = |a: &[Rational], b: &[Rational]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        let mut rest = list.clone();
        rest.remove(pos);
        Ok(AfrModel {
            horizon: self.horizon,
            lo: sub(&self.lo, &c.lo),
            hi: sub(&self.hi, &c.hi),
            resources: self.resources.iter().filter(|r| *r != id).cloned().collect(),
            energy_offset: &self.energy_offset - &c.energy_offset,
            contributions: Some(rest),
        })
    }

    /// Rows violated by an absolute profile `E(1..T)`.
    pub fn check_membership(&self, profile: &[Rational]) -> Result<Membership, AfrError> {
        if profile.len() != self.horizon {
            return Err(AfrError::ProfileLength { expected: self.horizon, found: profile.len() });
        }
        let steps: Vec<Rational> = (0..self.horizon)
            .map(|k| if k == 0 { &profile[0] - &self.energy_offset } else { &profile[k] - &profile[k - 1] })
            .collect();
        let mut violations = Vec::new();
        let (mut mask, mut value) = (0u64, Rational::zero());
        for k in 0..self.len() {
            let next = gray_mask(self.horizon, k as u64 + 1);
            let bit = (next ^ mask).trailing_zeros() as usize;
            if next > mask {
                value += &steps[bit];
            } else {
                value -= &steps[bit];
            }
            mask = next;
            if value < self.lo[k] {
                violations.push(RowViolation {
                    direction: self.direction(k),
                    side: Side::Lower,
                    value: value.clone(),
                    bound: self.lo[k].clone(),
                });
            }
            if value > self.hi[k] {
                violations.push(RowViolation {
                    direction: self.direction(k),
                    side: Side::Upper,
                    value: value.clone(),
                    bound: self.hi[k].clone(),
                });
            }
        }
        Ok(Membership { violations })
    }

    /// The rows as a system over `E(1..T)` (relative to `energy_offset`).
    pub fn as_system(&self) -> LinearSystem {
        let mut sys = LinearSystem::new((1..=self.horizon).map(aggregate_var)).expect("distinct names");
        for (d, lo, hi) in self.rows() {
            let coeffs: Vec<(usize, Rational)> = d
                .coefficients()
                .into_iter()
                .enumerate()
                .filter(|(_, c)| *c != 0)
                .map(|(k, c)| (k, Rational::from_integer(c.into())))
                .collect();
            sys.push(Constraint::new(coeffs.clone(), Relation::Ge, lo.clone())).expect("known variables");
            sys.push(Constraint::new(coeffs, Relation::Le, hi.clone())).expect("known variables");
        }
        sys
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowViolation {
    pub direction: DirectionIndex,
    pub side: Side,
    pub value: Rational,
    pub bound: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub violations: Vec<RowViolation>,
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Per-resource energies `e_i(1..T)`, absolute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub ids: Vec<String>,
    pub energies: Vec<Vec<Rational>>,
}

impl Allocation {
    /// `Σ_i e_i(t)` for each `t`.
    pub fn totals(&self) -> Vec<Rational> {
        let horizon = self.energies.first().map_or(0, Vec::len);
        (0..horizon).map(|t| self.energies.iter().map(|e| e[t].clone()).sum()).collect()
    }
}

type Tables<A> = (Vec<A>, Vec<A>);

fn sum_tables<A: Amount>(mut acc: Tables<A>, other: &Tables<A>) -> Tables<A> {
    for (a, b) in acc.0.iter_mut().zip(&other.0) {
        *a = a.plus(b);
    }
    for (a, b) in acc.1.iter_mut().zip(&other.1) {
        *a = a.plus(b);
    }
    acc
}

/// Summed tables, plus each resource's own table when `keep` is set.
fn build_tables<A: Amount>(
    envs: &[Envelope<A>],
    size: usize,
    parallel: bool,
    keep: bool,
) -> (Tables<A>, Vec<Tables<A>>) {
    let zero = || (vec![A::zero(); size], vec![A::zero(); size]);
    if keep {
        let each: Vec<Tables<A>> = if parallel {
            envs.par_iter().map(Envelope::support_table).collect()
        } else {
            envs.iter().map(Envelope::support_table).collect()
        };
        let total = each.iter().fold(zero(), sum_tables);
        (total, each)
    } else if parallel {
        let total = envs
            .par_iter()
            .fold(zero, |acc, e| sum_tables(acc, &e.support_table()))
            .reduce(zero, |a, b| sum_tables(a, &b));
        (total, Vec::new())
    } else {
        (envs.iter().fold(zero(), |acc, e| sum_tables(acc, &e.support_table())), Vec::new())
    }
}

/// Mask-indexed table to row order.
fn to_rows<A>(horizon: usize, table: &[A], conv: &impl Fn(&A) -> Rational) -> Vec<Rational> {
    (1..=row_count(horizon) as u64).map(|i| conv(&table[gray_mask(horizon, i) as usize])).collect()
}

/// Largest scaled magnitude admitted on the `i128` path.
const FAST_LIMIT: i128 = 1 << 62;

fn build_inner(rs: &ResourceSet, opts: &BuildOptions) -> Result<AfrModel, AfrError> {
    let horizon = rs.horizon();
    let mut model = AfrModel::empty(horizon)?;
    model.resources = rs.iter().map(|r| r.id().to_string()).collect();
    model.energy_offset = rs.energy_offset();
    if horizon == 0 {
        model.contributions = opts.contributions.then(|| {
            rs.iter()
                .map(|r| Contribution {
                    id: r.id().to_string(),
                    energy_offset: r.energy_offset().clone(),
                    lo: vec![],
                    hi: vec![],
                })
                .collect()
        });
        return Ok(model);
    }
    let size = 1usize << horizon;
    let parallel = opts.threads != Some(1) && rs.len() > 1;
    let values = rs.iter().flat_map(|r| (1..=horizon).flat_map(move |t| [r.p_lo(t), r.p_hi(t), r.e_lo(t), r.e_hi(t)]));
    let scale = common_denominator(values);

    // |row| ≤ Σ_i Σ_t |x_i(t)| ≤ N·T·2·max|bound|, kept below 2^126.
    let headroom = (rs.len().max(1) as i128) * (horizon as i128) * 4;
    let limit = FAST_LIMIT.min((1i128 << 126) / headroom);
    let fast: Option<Vec<Envelope<i128>>> = rs.iter().map(|r| Envelope::scaled(r, &scale, limit)).collect();

    let (lo, hi, each) = match fast {
        Some(envs) => {
            let conv = |v: &i128| Rational::new(BigInt::from(*v), scale.clone());
            let ((tlo, thi), each) = build_tables(&envs, size, parallel, opts.contributions);
            let each: Vec<(Vec<Rational>, Vec<Rational>)> =
                each.iter().map(|(l, h)| (to_rows(horizon, l, &conv), to_rows(horizon, h, &conv))).collect();
            (to_rows(horizon, &tlo, &conv), to_rows(horizon, &thi, &conv), each)
        }
        None => {
            let envs: Vec<Envelope<Rational>> = rs.iter().map(Envelope::exact).collect();
            let conv = |v: &Rational| v.clone();
            let ((tlo, thi), each) = build_tables(&envs, size, parallel, opts.contributions);
            let each = each.iter().map(|(l, h)| (to_rows(horizon, l, &conv), to_rows(horizon, h, &conv))).collect();
            (to_rows(horizon, &tlo, &conv), to_rows(horizon, &thi, &conv), each)
        }
    };
    model.lo = lo;
    model.hi = hi;
    model.contributions = opts.contributions.then(|| {
        rs.iter()
            .zip(each)
            .map(|(r, (lo, hi))| Contribution {
                id: r.id().to_string(),
                energy_offset: r.energy_offset().clone(),
                lo,
                hi,
            })
            .collect()
    });
    Ok(model)
}

/// Closed-form AFR of a validated resource set, with contributions.
pub fn build_afr(rs: &ResourceSet) -> Result<AfrModel, AfrError> {
    build_afr_with(rs, &BuildOptions { threads: None, contributions: true })
}

pub fn build_afr_with(rs: &ResourceSet, opts: &BuildOptions) -> Result<AfrModel, AfrError> {
    if rs.horizon() > MAX_HORIZON {
        return Err(AfrError::HorizonTooLarge(rs.horizon()));
    }
    match opts.threads {
        Some(k) if k > 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| AfrError::Threads(e.to_string()))?
            .install(|| build_inner(rs, opts)),
        _ => build_inner(rs, opts),
    }
}

pub fn merge(a: &AfrModel, b: &AfrModel) -> Result<AfrModel, AfrError> {
    a.merge(b)
}

pub fn add_resource(a: &AfrModel, r: &FlexResource) -> Result<AfrModel, AfrError> {
    a.add_resource(r)
}

pub fn check_membership(a: &AfrModel, profile: &[Rational]) -> Result<Membership, AfrError> {
    a.check_membership(profile)
}

pub fn afr_as_system(a: &AfrModel) -> LinearSystem {
    a.as_system()
}

/// An exact allocation of the absolute profile `E(1..T)`, from the joint
/// feasibility problem with every `Σ_i e_i(t)` fixed.
pub fn disaggregate(rs: &ResourceSet, profile: &[Rational]) -> Result<Allocation, AfrError> {
    let (n, horizon) = (rs.len(), rs.horizon());
    if profile.len() != horizon {
        return Err(AfrError::ProfileLength { expected: horizon, found: profile.len() });
    }
    let ids: Vec<String> = rs.iter().map(|r| r.id().to_string()).collect();
    let offset = rs.energy_offset();
    if n == 0 {
        let zero = profile.iter().all(|e| *e == offset);
        return if zero { Ok(Allocation { ids, energies: Vec::new() }) } else { Err(AfrError::Infeasible) };
    }
    let names = (1..=horizon).flat_map(|t| rs.iter().map(move |r| energy_var(r.id(), t)));
    let mut sys = LinearSystem::new(names).expect("resource ids are unique");
    let var = |i: usize, t: usize| (t - 1) * n + i;
    for (i, r) in rs.iter().enumerate() {
        for row in r.rows(|t| var(i, t)) {
            sys.push(row).expect("indices in range");
        }
    }
    for t in 1..=horizon {
        let coeffs = (0..n).map(|i| (var(i, t), Rational::from_integer(1.into())));
        sys.push(Constraint::new(coeffs, Relation::Eq, &profile[t - 1] - &offset)).expect("indices in range");
    }
    let point = sys.feasible().witness.ok_or(AfrError::Infeasible)?;
    let energies = rs
        .iter()
        .enumerate()
        .map(|(i, r)| (1..=horizon).map(|t| &point[var(i, t)] + r.energy_offset()).collect())
        .collect();
    Ok(Allocation { ids, energies })
}

/// Largest absolute bound in the model, for quick sanity reporting.
pub fn max_abs_bound(a: &AfrModel) -> Rational {
    a.lo.iter().chain(&a.hi).map(|v| v.abs()).max().unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fme::aggregate_projection_oracle;
    use crate::gen::{random_fleet, random_trajectory, seeded};
    use crate::linear::system_equivalent;
    use crate::rational::int;

    fn res(id: &str, p: (i64, i64), e_lo: Vec<i64>, e_hi: Vec<i64>) -> FlexResource {
        let t = e_lo.len();
        FlexResource::new(
            id,
            vec![int(p.0); t],
            vec![int(p.1); t],
            e_lo.into_iter().map(int).collect(),
            e_hi.into_iter().map(int).collect(),
        )
        .unwrap()
    }

    fn pair_t1() -> (FlexResource, FlexResource) {
        (res("A", (0, 1), vec![0], vec![1]), res("B", (-1, 0), vec![-1], vec![0]))
    }

    #[test]
    fn single_and_pair_t1() {
        let (a, b) = pair_t1();
        let m = build_afr(&ResourceSet::new(vec![a.clone()]).unwrap()).unwrap();
        assert_eq!((m.lower(), m.upper()), (&[int(0)][..], &[int(1)][..]));
        let both = build_afr(&ResourceSet::new(vec![a.clone(), b.clone()]).unwrap()).unwrap();
        assert_eq!((both.lower(), both.upper()), (&[int(-1)][..], &[int(1)][..]));
        let mb = build_afr(&ResourceSet::new(vec![b.clone()]).unwrap()).unwrap();
        assert_eq!(m.merge(&mb).unwrap(), both);
        assert_eq!(m.add_resource(&b).unwrap(), both);
        assert_eq!(both.remove_resource("B").unwrap(), m);
        assert_eq!(AfrModel::empty(1).unwrap().merge(&m).unwrap(), m);
        assert!(matches!(m.merge(&m), Err(AfrError::DuplicateId(_))));

        assert!(both.check_membership(&[int(1)]).unwrap().is_inside());
        let out = both.check_membership(&[int(2)]).unwrap();
        assert_eq!(out.violations.len(), 1);
        assert_eq!(out.violations[0].side, Side::Upper);
        assert_eq!(out.violations[0].direction.intervals(), [1]);

        let rs = ResourceSet::new(vec![a, b]).unwrap();
        let alloc = disaggregate(&rs, &[int(1)]).unwrap();
        assert_eq!(alloc.totals(), [int(1)]);
        assert!(matches!(disaggregate(&rs, &[int(2)]), Err(AfrError::Infeasible)));
    }

    #[test]
    fn system_rows() {
        let m = build_afr(&ResourceSet::new(vec![res("A", (0, 1), vec![0], vec![1])]).unwrap()).unwrap();
        assert_eq!(m.as_system().dump(), "1*E(1) >= 0\n1*E(1) <= 1\n");
        let m = build_afr(&ResourceSet::new(vec![res("A", (0, 1), vec![0, 0], vec![1, 1])]).unwrap()).unwrap();
        assert_eq!(m.inequality_count(), 6);
        let sys = m.as_system();
        assert_eq!(sys.format_row(&sys.rows()[0]), "-1*E(1) + 1*E(2) >= 0");
        assert_eq!(sys.format_row(&sys.rows()[1]), "-1*E(1) + 1*E(2) <= 1");
    }

    #[test]
    fn matches_oracle_on_worked_pair() {
        let a = res("A", (0, 1), vec![0, 0], vec![1, 2]);
        let b = res("B", (-1, 1), vec![-1, -1], vec![1, 1]);
        let rs = ResourceSet::new(vec![a, b]).unwrap();
        let m = build_afr(&rs).unwrap();
        let oracle = aggregate_projection_oracle(&rs).unwrap();
        assert!(system_equivalent(&m.as_system(), &oracle).unwrap());
    }

    #[test]
    fn fast_and_exact_paths_agree() {
        let rs = random_fleet(4, 5, 6);
        let fast = build_afr(&rs).unwrap();
        let envs: Vec<Envelope<Rational>> = rs.iter().map(Envelope::exact).collect();
        let ((lo, hi), _) = build_tables(&envs, 1 << 6, false, false);
        let conv = |v: &Rational| v.clone();
        assert_eq!(fast.lower(), &to_rows(6, &lo, &conv)[..]);
        assert_eq!(fast.upper(), &to_rows(6, &hi, &conv)[..]);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let rs = random_fleet(8, 20, 7);
        let one = build_afr_with(&rs, &BuildOptions { threads: Some(1), contributions: true }).unwrap();
        let four = build_afr_with(&rs, &BuildOptions { threads: Some(4), contributions: true }).unwrap();
        assert_eq!(one, four);
        let lean = build_afr_with(&rs, &BuildOptions { threads: Some(3), contributions: false }).unwrap();
        assert_eq!(lean, one.without_contributions());
    }

    #[test]
    fn degenerate_models() {
        let m = build_afr(&ResourceSet::with_horizon(3, vec![]).unwrap()).unwrap();
        assert_eq!(m, AfrModel::empty(3).unwrap());
        assert_eq!(m.inequality_count(), 14);
        let z = build_afr(&ResourceSet::new(vec![]).unwrap()).unwrap();
        assert!(z.is_empty());
        assert!(z.check_membership(&[]).unwrap().is_inside());
    }

    #[test]
    fn sampled_aggregates_are_members() {
        let rs = random_fleet(21, 4, 5);
        let m = build_afr(&rs).unwrap();
        let mut rng = seeded(2);
        for _ in 0..100 {
            let mut total = vec![Rational::zero(); 5];
            for r in &rs {
                for (t, e) in random_trajectory(&mut rng, r).into_iter().enumerate() {
                    total[t] += e;
                }
            }
            assert!(m.check_membership(&total).unwrap().is_inside());
        }
    }
}
