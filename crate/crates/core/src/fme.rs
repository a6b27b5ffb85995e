//! Fourier–Motzkin elimination and the brute-force aggregate projection oracle.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::flex::{aggregate_var, energy_var, ResourceSet};
use crate::linear::{Constraint, LinearSystem, Relation};
use crate::rational::Rational;

/// Default cap on `N·T` for the oracle; FME cost grows doubly exponentially.
pub const DEFAULT_MAX_NT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FmeError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("row {0} is not in <= form")]
    NotNormalized(usize),
    #[error("elimination produced a false constant row: the system is infeasible")]
    Infeasible,
    #[error("N*T = {nt} exceeds the oracle guard of {max}")]
    GuardExceeded { nt: usize, max: usize },
}

/// Row indices split by the sign of one variable's coefficient.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    pub negative: Vec<usize>,
    pub zero: Vec<usize>,
    pub positive: Vec<usize>,
}

/// Outcome of one elimination. Combinations that collapse to a true
/// constant are dropped, so `system.len() + dropped == |Z| + |N|·|P|`.
#[derive(Debug, Clone)]
pub struct Elimination {
    pub system: LinearSystem,
    pub dropped: usize,
}

fn index_of(s: &LinearSystem, var: &str) -> Result<usize, FmeError> {
    s.var_index(var).ok_or_else(|| FmeError::UnknownVariable(var.to_string()))
}

/// Partitions `≤`-form rows by the sign of `var`'s coefficient.
pub fn classify(s: &LinearSystem, var: &str) -> Result<Partition, FmeError> {
    let j = index_of(s, var)?;
    let mut part = Partition::default();
    for (k, row) in s.rows().iter().enumerate() {
        if row.relation() != Relation::Le {
            return Err(FmeError::NotNormalized(k));
        }
        let c = row.coeff(j);
        if c.is_negative() {
            part.negative.push(k);
        } else if c.is_positive() {
            part.positive.push(k);
        } else {
            part.zero.push(k);
        }
    }
    Ok(part)
}

/// Eliminates `var`. Rows of any relation are accepted and put in `≤` form first.
pub fn eliminate(s: &LinearSystem, var: &str) -> Result<Elimination, FmeError> {
    let s = s.to_le_form();
    let j = index_of(&s, var)?;
    let part = classify(&s, var)?;

    let remaining: Vec<String> = s.variables().iter().filter(|v| *v != var).cloned().collect();
    let shift = |k: usize| if k > j { k - 1 } else { k };
    let mut out = LinearSystem::new(remaining).expect("names stay distinct");
    let rows = s.rows();
    let mut kept = Vec::with_capacity(part.zero.len() + part.negative.len() * part.positive.len());
    for &k in &part.zero {
        let r = &rows[k];
        kept.push(Constraint::new(
            r.coeffs().iter().map(|(i, c)| (shift(*i), c.clone())),
            Relation::Le,
            r.rhs().clone(),
        ));
    }
    let mut dropped = 0;
    for &n in &part.negative {
        let a_n = -rows[n].coeff(j);
        for &p in &part.positive {
            let a_p = rows[p].coeff(j);
            let coeffs = rows[n]
                .coeffs()
                .iter()
                .map(|(i, c)| (*i, c * &a_p))
                .chain(rows[p].coeffs().iter().map(|(i, c)| (*i, c * &a_n)))
                .filter(|(i, _)| *i != j)
                .map(|(i, c)| (shift(i), c));
            let rhs = rows[n].rhs() * &a_p + rows[p].rhs() * &a_n;
            let combined = Constraint::new(coeffs, Relation::Le, rhs).normalized();
            if combined.is_constant() {
                if combined.rhs().is_negative() {
                    return Err(FmeError::Infeasible);
                }
                dropped += 1;
            } else {
                kept.push(combined);
            }
        }
    }
    for row in kept {
        out.push(row).expect("rows are non-constant and in range");
    }
    Ok(Elimination { system: out, dropped })
}

/// Removes parallel duplicates, then every row implied by the rest.
///
/// The result is `≤`-form and irredundant. An infeasible input comes back
/// deduplicated only, since every row of an empty set is implied.
pub fn prune_redundant(s: &LinearSystem) -> LinearSystem {
    let mut order: Vec<Constraint> = Vec::new();
    let mut seen: HashMap<Vec<(usize, Rational)>, usize> = HashMap::new();
    for row in s.to_le_form().rows() {
        let row = row.normalized();
        match seen.get(row.coeffs()) {
            Some(&k) => {
                if row.rhs() < order[k].rhs() {
                    order[k] = row;
                }
            }
            None => {
                seen.insert(row.coeffs().to_vec(), order.len());
                order.push(row);
            }
        }
    }
    let deduped = s.with_rows(order);
    if !deduped.feasible().is_feasible() {
        return deduped;
    }
    let mut rows = deduped.rows().to_vec();
    let mut k = 0;
    while k < rows.len() {
        let candidate = rows.remove(k);
        let rest = s.with_rows(rows.clone());
        if rest.implies(&candidate) {
            continue;
        }
        rows.insert(k, candidate);
        k += 1;
    }
    s.with_rows(rows)
}

/// Every resource's polytope rows plus `E(t) = Σ_i e_i(t)`, over
/// `e_<id>(t)` (interval-major) followed by `E(1..T)`.
pub fn joint_system(rs: &ResourceSet) -> LinearSystem {
    let (n, horizon) = (rs.len(), rs.horizon());
    let mut names = Vec::with_capacity((n + 1) * horizon);
    for t in 1..=horizon {
        names.extend(rs.iter().map(|r| energy_var(r.id(), t)));
    }
    names.extend((1..=horizon).map(aggregate_var));
    let mut sys = LinearSystem::new(names).expect("resource ids are unique");
    let e = |i: usize, t: usize| (t - 1) * n + i;
    let agg = |t: usize| n * horizon + t - 1;
    for (i, r) in rs.iter().enumerate() {
        for row in r.rows(|t| e(i, t)) {
            sys.push(row).expect("indices in range");
        }
    }
    for t in 1..=horizon {
        let coeffs = std::iter::once((agg(t), Rational::one())).chain((0..n).map(|i| (e(i, t), -Rational::one())));
        sys.push(Constraint::new(coeffs, Relation::Eq, Rational::zero())).expect("indices in range");
    }
    sys
}

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub max_nt: usize,
    /// Within an interval, eliminate resources last-to-first.
    pub reverse_resources: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { max_nt: DEFAULT_MAX_NT, reverse_resources: false }
    }
}

/// Projection of the joint system onto `E(1..T)` by FME, last interval first, pruned after every step.
pub fn aggregate_projection_oracle(rs: &ResourceSet) -> Result<LinearSystem, FmeError> {
    aggregate_projection_oracle_with(rs, &OracleOptions::default())
}

pub fn aggregate_projection_oracle_with(rs: &ResourceSet, opts: &OracleOptions) -> Result<LinearSystem, FmeError> {
    let nt = rs.len() * rs.horizon();
    if nt > opts.max_nt {
        return Err(FmeError::GuardExceeded { nt, max: opts.max_nt });
    }
    let mut sys = prune_redundant(&joint_system(rs));
    for t in (1..=rs.horizon()).rev() {
        let mut ids: Vec<&str> = rs.iter().map(|r| r.id()).collect();
        if opts.reverse_resources {
            ids.reverse();
        }
        for id in ids {
            sys = prune_redundant(&eliminate(&sys, &energy_var(id, t))?.system);
        }
    }
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flex::FlexResource;
    use crate::rational::{frac, int};

    fn xy(rows: &[(i64, i64, Relation, Rational)]) -> LinearSystem {
        let mut s = LinearSystem::new(["x", "y"]).unwrap();
        for (a, b, rel, rhs) in rows {
            s.add(&[("x", int(*a)), ("y", int(*b))], *rel, rhs.clone()).unwrap();
        }
        s
    }

    #[test]
    fn classify_by_sign() {
        let s = xy(&[(1, -1, Relation::Le, int(0)), (0, 1, Relation::Le, int(1))]);
        let p = classify(&s, "y").unwrap();
        assert_eq!((p.negative, p.zero, p.positive), (vec![0], vec![], vec![1]));
        let mut lone = LinearSystem::new(["x", "z"]).unwrap();
        lone.add(&[("x", int(1))], Relation::Le, int(1)).unwrap();
        assert_eq!(classify(&lone, "z").unwrap().zero, vec![0]);
        assert_eq!(classify(&xy(&[(1, 0, Relation::Ge, int(0))]), "x"), Err(FmeError::NotNormalized(0)));
    }

    #[test]
    fn classify_last_interval_of_a_resource() {
        let r =
            FlexResource::new("a", vec![int(0); 2], vec![int(1); 2], vec![int(0); 2], vec![int(1), int(2)]).unwrap();
        let p = r.polytope().to_le_form();
        let part = classify(&p, "e_a(2)").unwrap();
        assert_eq!((part.negative.len(), part.positive.len(), part.zero.len()), (2, 2, 4));
    }

    #[test]
    fn eliminate_simple() {
        let s = xy(&[(0, 1, Relation::Ge, int(0)), (-1, 1, Relation::Ge, int(0)), (0, 1, Relation::Le, int(1))]);
        // y >= 0, y >= x, y <= 1
        let out = eliminate(&s, "y").unwrap();
        assert_eq!(out.system.variables(), ["x"]);
        assert_eq!(out.system.dump(), "1*x <= 1\n");
        assert_eq!(out.dropped, 1);
    }

    #[test]
    fn eliminate_pairs_every_bound() {
        // y >= x, y <= 2 - x, y <= 3/2
        let mut s = xy(&[(-1, 1, Relation::Ge, int(0)), (1, 1, Relation::Le, int(2))]);
        s.add(&[("y", int(1))], Relation::Le, frac(3, 2)).unwrap();
        let out = eliminate(&s, "y").unwrap();
        assert_eq!(out.system.dump(), "1*x <= 1\n1*x <= 3/2\n");
        let pruned = prune_redundant(&out.system);
        assert_eq!(pruned.dump(), "1*x <= 1\n");
    }

    #[test]
    fn eliminate_detects_infeasibility() {
        let s = xy(&[(0, 1, Relation::Ge, int(1)), (0, 1, Relation::Le, int(0))]);
        assert!(matches!(eliminate(&s, "y"), Err(FmeError::Infeasible)));
    }

    #[test]
    fn prune_keeps_irredundant_square() {
        let s = xy(&[
            (1, 0, Relation::Le, int(1)),
            (1, 0, Relation::Ge, int(0)),
            (0, 1, Relation::Le, int(1)),
            (0, 1, Relation::Ge, int(0)),
        ]);
        assert_eq!(prune_redundant(&s).len(), 4);
        assert!(prune_redundant(&s).equivalent(&s).unwrap());
    }

    fn unit(id: &str, lo: i64, hi: i64) -> FlexResource {
        FlexResource::new(id, vec![int(lo)], vec![int(hi)], vec![int(lo)], vec![int(hi)]).unwrap()
    }

    #[test]
    fn oracle_single_interval() {
        let rs = ResourceSet::new(vec![unit("a", 0, 1)]).unwrap();
        let out = aggregate_projection_oracle(&rs).unwrap();
        assert_eq!(out.variables(), ["E(1)"]);
        let mut want = LinearSystem::new(["E(1)"]).unwrap();
        want.add(&[("E(1)", int(1))], Relation::Ge, int(0)).unwrap();
        want.add(&[("E(1)", int(1))], Relation::Le, int(1)).unwrap();
        assert!(out.equivalent(&want).unwrap());

        let rs = ResourceSet::new(vec![unit("a", 0, 1), unit("b", -1, 0)]).unwrap();
        let out = aggregate_projection_oracle(&rs).unwrap();
        let mut want = LinearSystem::new(["E(1)"]).unwrap();
        want.add(&[("E(1)", int(1))], Relation::Ge, int(-1)).unwrap();
        want.add(&[("E(1)", int(1))], Relation::Le, int(1)).unwrap();
        assert!(out.equivalent(&want).unwrap());
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn oracle_guard() {
        let rs = crate::gen::random_fleet(1, 4, 4);
        assert_eq!(aggregate_projection_oracle(&rs).unwrap_err(), FmeError::GuardExceeded { nt: 16, max: 12 });
    }
}
