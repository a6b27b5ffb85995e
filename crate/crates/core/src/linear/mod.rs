//! Finite linear inequality systems over named variables, with exact LP queries.
//!
//! Every equivalence and redundancy claim in the crate is decided here.

mod simplex;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinearError {
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("constant row `0 {relation} {rhs}` is false")]
    FalseConstant { relation: Relation, rhs: String },
    #[error("variable sets differ")]
    VariableMismatch,
    #[error("system is infeasible")]
    Infeasible,
    #[error("objective is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

impl Relation {
    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

/// One row `Σ coeffs · x  (relation)  rhs`, coefficients keyed by variable index.
///
/// Coefficients are kept sorted by index with zeros removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    coeffs: Vec<(usize, Rational)>,
    relation: Relation,
    rhs: Rational,
}

impl Constraint {
    pub fn new<I>(coeffs: I, relation: Relation, rhs: Rational) -> Self
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
        for (j, c) in coeffs {
            *merged.entry(j).or_insert_with(Rational::zero) += c;
        }
        let coeffs = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Constraint { coeffs, relation, rhs }
    }

    pub fn coeffs(&self) -> &[(usize, Rational)] {
        &self.coeffs
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn rhs(&self) -> &Rational {
        &self.rhs
    }

    pub fn coeff(&self, var: usize) -> Rational {
        self.coeffs
            .binary_search_by_key(&var, |(j, _)| *j)
            .map(|k| self.coeffs[k].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lhs_value(&self, point: &[Rational]) -> Rational {
        self.coeffs.iter().fold(Rational::zero(), |acc, (j, c)| acc + c * &point[*j])
    }

    pub fn holds_at(&self, point: &[Rational]) -> bool {
        self.relation.holds(&self.lhs_value(point), &self.rhs)
    }

    /// The row in `≤` form; equalities become two rows.
    pub fn to_le(&self) -> Vec<Constraint> {
        let negated = || Constraint {
            coeffs: self.coeffs.iter().map(|(j, c)| (*j, -c)).collect(),
            relation: Relation::Le,
            rhs: -&self.rhs,
        };
        let as_le = || Constraint { relation: Relation::Le, ..self.clone() };
        match self.relation {
            Relation::Le => vec![as_le()],
            Relation::Ge => vec![negated()],
            Relation::Eq => vec![as_le(), negated()],
        }
    }

    /// Divides through by the magnitude of the leading coefficient.
    pub fn normalized(&self) -> Constraint {
        let Some((_, lead)) = self.coeffs.first() else {
            return self.clone();
        };
        let scale = lead.abs();
        Constraint {
            coeffs: self.coeffs.iter().map(|(j, c)| (*j, c / &scale)).collect(),
            relation: self.relation,
            rhs: &self.rhs / &scale,
        }
    }

    fn constant_holds(&self) -> bool {
        self.relation.holds(&Rational::zero(), &self.rhs)
    }

    fn remap(&self, map: &[usize]) -> Constraint {
        Constraint::new(self.coeffs.iter().map(|(j, c)| (map[*j], c.clone())), self.relation, self.rhs.clone())
    }
}

/// Linear objective keyed by variable index.
pub type Objective = Vec<(usize, Rational)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of an LP query. `witness` is aligned with the system's variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub value: Option<Rational>,
    pub witness: Option<Vec<Rational>>,
}

impl LpOutcome {
    fn infeasible() -> Self {
        LpOutcome { status: LpStatus::Infeasible, value: None, witness: None }
    }

    pub fn is_feasible(&self) -> bool {
        self.status != LpStatus::Infeasible
    }
}

/// Variables are ordered by insertion; rows refer to them by index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearSystem {
    variables: Vec<String>,
    index: HashMap<String, usize>,
    rows: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new<I, S>(variables: I) -> Result<Self, LinearError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut sys = LinearSystem::default();
        for v in variables {
            let v = v.into();
            if sys.index.contains_key(&v) {
                return Err(LinearError::DuplicateVariable(v));
            }
            sys.index.insert(v.clone(), sys.variables.len());
            sys.variables.push(v);
        }
        Ok(sys)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Adds a row. Constant rows are checked and then dropped.
    pub fn push(&mut self, row: Constraint) -> Result<(), LinearError> {
        if let Some((j, _)) = row.coeffs.last() {
            if *j >= self.variables.len() {
                return Err(LinearError::UnknownVariable(format!("#{j}")));
            }
        } else {
            if !row.constant_holds() {
                return Err(LinearError::FalseConstant { relation: row.relation, rhs: format_rational(&row.rhs) });
            }
            return Ok(());
        }
        self.rows.push(row);
        Ok(())
    }

    /// Adds a row given by variable names.
    pub fn add<S: AsRef<str>>(
        &mut self,
        terms: &[(S, Rational)],
        relation: Relation,
        rhs: Rational,
    ) -> Result<(), LinearError> {
        let coeffs = self.resolve(terms)?;
        self.push(Constraint::new(coeffs, relation, rhs))
    }

    /// Translates a name-keyed linear form into index form.
    pub fn resolve<S: AsRef<str>>(&self, terms: &[(S, Rational)]) -> Result<Objective, LinearError> {
        terms
            .iter()
            .map(|(name, c)| {
                let name = name.as_ref();
                self.var_index(name)
                    .map(|j| (j, c.clone()))
                    .ok_or_else(|| LinearError::UnknownVariable(name.to_string()))
            })
            .collect()
    }

    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        point.len() == self.variables.len() && self.rows.iter().all(|r| r.holds_at(point))
    }

    /// Same solution set, every row in `≤` form.
    pub fn to_le_form(&self) -> LinearSystem {
        LinearSystem {
            variables: self.variables.clone(),
            index: self.index.clone(),
            rows: self.rows.iter().flat_map(Constraint::to_le).collect(),
        }
    }

    /// Copy with `rows` replaced.
    pub fn with_rows(&self, rows: Vec<Constraint>) -> LinearSystem {
        LinearSystem { variables: self.variables.clone(), index: self.index.clone(), rows }
    }

    /// Names the entries of a witness.
    pub fn named(&self, point: &[Rational]) -> BTreeMap<String, Rational> {
        self.variables.iter().cloned().zip(point.iter().cloned()).collect()
    }

    pub fn feasible(&self) -> LpOutcome {
        let zero: Objective = Vec::new();
        match simplex::solve(self, &zero) {
            simplex::Solution::Optimal { point, .. } => {
                LpOutcome { status: LpStatus::Optimal, value: Some(Rational::zero()), witness: Some(point) }
            }
            _ => LpOutcome::infeasible(),
        }
    }

    pub fn optimize(&self, objective: &[(usize, Rational)], sense: Sense) -> LpOutcome {
        let c: Objective = match sense {
            Sense::Max => objective.to_vec(),
            Sense::Min => objective.iter().map(|(j, v)| (*j, -v)).collect(),
        };
        match simplex::solve(self, &c) {
            simplex::Solution::Optimal { value, point } => LpOutcome {
                status: LpStatus::Optimal,
                value: Some(match sense {
                    Sense::Max => value,
                    Sense::Min => -value,
                }),
                witness: Some(point),
            },
            simplex::Solution::Infeasible => LpOutcome::infeasible(),
            simplex::Solution::NotBounded => match self.feasible().witness {
                Some(point) => LpOutcome { status: LpStatus::Unbounded, value: None, witness: Some(point) },
                None => LpOutcome::infeasible(),
            },
        }
    }

    /// Whether every point of `self` satisfies `row`. Infeasible systems imply everything.
    pub fn implies(&self, row: &Constraint) -> bool {
        if row.is_constant() {
            return row.constant_holds() || !self.feasible().is_feasible();
        }
        let check = |sense: Sense, accept: fn(&Rational, &Rational) -> bool| {
            let out = self.optimize(&row.coeffs, sense);
            match out.status {
                LpStatus::Infeasible => true,
                LpStatus::Unbounded => false,
                LpStatus::Optimal => accept(out.value.as_ref().expect("optimal value"), &row.rhs),
            }
        };
        match row.relation {
            Relation::Le => check(Sense::Max, |v, b| v <= b),
            Relation::Ge => check(Sense::Min, |v, b| v >= b),
            Relation::Eq => check(Sense::Max, |v, b| v <= b) && check(Sense::Min, |v, b| v >= b),
        }
    }

    /// Optimal basic point for `objective` (maximized).
    pub fn sample_vertex(&self, objective: &[(usize, Rational)]) -> Result<Vec<Rational>, LinearError> {
        let out = self.optimize(objective, Sense::Max);
        match out.status {
            LpStatus::Optimal => Ok(out.witness.expect("optimal witness")),
            LpStatus::Infeasible => Err(LinearError::Infeasible),
            LpStatus::Unbounded => Err(LinearError::Unbounded),
        }
    }

    /// Rows of `other` rewritten over this system's variable indices.
    fn rows_from(&self, other: &LinearSystem) -> Result<Vec<Constraint>, LinearError> {
        let map: Vec<usize> = other
            .variables
            .iter()
            .map(|v| self.var_index(v).ok_or_else(|| LinearError::UnknownVariable(v.clone())))
            .collect::<Result<_, _>>()?;
        Ok(other.rows.iter().map(|r| r.remap(&map)).collect())
    }

    /// Same solution set (both variable sets must coincide).
    pub fn equivalent(&self, other: &LinearSystem) -> Result<bool, LinearError> {
        if self.variables.len() != other.variables.len() {
            return Err(LinearError::VariableMismatch);
        }
        let theirs = self.rows_from(other).map_err(|_| LinearError::VariableMismatch)?;
        let other_here = self.with_rows(theirs.clone());
        Ok(theirs.iter().all(|r| self.implies(r)) && self.rows.iter().all(|r| other_here.implies(r)))
    }

    /// One row per line: `c1*v1 + c2*v2 <= rhs`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&self.format_row(row));
            out.push('\n');
        }
        out
    }

    pub fn format_row(&self, row: &Constraint) -> String {
        let lhs = if row.coeffs.is_empty() {
            "0".to_string()
        } else {
            row.coeffs
                .iter()
                .map(|(j, c)| format!("{}*{}", format_rational(c), self.variables[*j]))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        format!("{lhs} {} {}", row.relation, format_rational(&row.rhs))
    }
}

/// Free-function spellings of the LP queries.
pub fn feasible(s: &LinearSystem) -> LpOutcome {
    s.feasible()
}

pub fn optimize(s: &LinearSystem, objective: &[(usize, Rational)], sense: Sense) -> LpOutcome {
    s.optimize(objective, sense)
}

pub fn implies(s: &LinearSystem, row: &Constraint) -> bool {
    s.implies(row)
}

pub fn system_equivalent(a: &LinearSystem, b: &LinearSystem) -> Result<bool, LinearError> {
    a.equivalent(b)
}

pub fn sample_vertex(s: &LinearSystem, objective: &[(usize, Rational)]) -> Result<Vec<Rational>, LinearError> {
    s.sample_vertex(objective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn xy() -> LinearSystem {
        LinearSystem::new(["x", "y"]).unwrap()
    }

    #[test]
    fn infeasible_interval() {
        let mut s = LinearSystem::new(["x"]).unwrap();
        s.add(&[("x", int(1))], Relation::Ge, int(0)).unwrap();
        s.add(&[("x", int(1))], Relation::Le, int(-1)).unwrap();
        assert_eq!(s.feasible().status, LpStatus::Infeasible);
    }

    #[test]
    fn feasible_interval_has_witness_inside() {
        let mut s = LinearSystem::new(["x"]).unwrap();
        s.add(&[("x", int(1))], Relation::Ge, int(0)).unwrap();
        s.add(&[("x", int(1))], Relation::Le, int(1)).unwrap();
        let out = s.feasible();
        let w = out.witness.unwrap();
        assert!(s.satisfied_by(&w));
    }

    #[test]
    fn small_optima() {
        let mut s = LinearSystem::new(["x"]).unwrap();
        s.add(&[("x", int(1))], Relation::Le, int(3)).unwrap();
        let out = s.optimize(&[(0, int(1))], Sense::Max);
        assert_eq!(out.value, Some(int(3)));

        let mut s = xy();
        s.add(&[("x", int(1))], Relation::Le, int(1)).unwrap();
        s.add(&[("y", int(1))], Relation::Le, int(2)).unwrap();
        let out = s.optimize(&[(0, int(1)), (1, int(1))], Sense::Max);
        assert_eq!(out.value, Some(int(3)));
        assert_eq!(out.witness, Some(vec![int(1), int(2)]));
        assert_eq!(s.optimize(&[(0, int(1))], Sense::Min).status, LpStatus::Unbounded);
    }

    #[test]
    fn implication() {
        let mut s = xy();
        s.add(&[("x", int(1))], Relation::Le, int(1)).unwrap();
        assert!(s.implies(&Constraint::new([(0, int(1))], Relation::Le, int(2))));
        s.add(&[("y", int(1))], Relation::Le, int(1)).unwrap();
        let sum = Constraint::new([(0, int(1)), (1, int(1))], Relation::Le, int(1));
        assert!(!s.implies(&sum));

        let mut bad = xy();
        bad.add(&[("x", int(1))], Relation::Ge, int(1)).unwrap();
        bad.add(&[("x", int(1))], Relation::Le, int(0)).unwrap();
        assert!(bad.implies(&sum));
    }

    #[test]
    fn equivalence() {
        let mut a = LinearSystem::new(["x"]).unwrap();
        a.add(&[("x", int(1))], Relation::Le, int(1)).unwrap();
        let mut b = a.clone();
        b.add(&[("x", int(1))], Relation::Le, int(2)).unwrap();
        assert!(a.equivalent(&b).unwrap());
        let mut c = LinearSystem::new(["x"]).unwrap();
        c.add(&[("x", int(1))], Relation::Le, frac(1, 2)).unwrap();
        assert!(!a.equivalent(&c).unwrap());
        assert_eq!(a.equivalent(&xy()), Err(LinearError::VariableMismatch));
    }

    #[test]
    fn equivalence_ignores_variable_order() {
        let mut a = LinearSystem::new(["x", "y"]).unwrap();
        a.add(&[("x", int(1)), ("y", int(2))], Relation::Le, int(1)).unwrap();
        let mut b = LinearSystem::new(["y", "x"]).unwrap();
        b.add(&[("y", int(2)), ("x", int(1))], Relation::Le, int(1)).unwrap();
        assert!(a.equivalent(&b).unwrap());
    }

    #[test]
    fn unit_square_vertices() {
        let mut s = xy();
        for v in ["x", "y"] {
            s.add(&[(v, int(1))], Relation::Ge, int(0)).unwrap();
            s.add(&[(v, int(1))], Relation::Le, int(1)).unwrap();
        }
        assert_eq!(s.sample_vertex(&[(0, int(1)), (1, int(1))]).unwrap(), vec![int(1), int(1)]);
        assert_eq!(s.sample_vertex(&[(0, int(-1)), (1, int(-1))]).unwrap(), vec![int(0), int(0)]);
    }

    #[test]
    fn constant_rows() {
        let mut s = xy();
        assert!(s.push(Constraint::new([], Relation::Le, int(0))).is_ok());
        assert!(s.is_empty());
        assert!(matches!(
            s.push(Constraint::new([(0, int(0))], Relation::Ge, int(1))),
            Err(LinearError::FalseConstant { .. })
        ));
    }

    #[test]
    fn equality_rows() {
        let mut s = xy();
        s.add(&[("x", int(1)), ("y", int(1))], Relation::Eq, int(2)).unwrap();
        s.add(&[("x", int(1))], Relation::Ge, int(0)).unwrap();
        s.add(&[("y", int(1))], Relation::Ge, int(0)).unwrap();
        let out = s.optimize(&[(0, int(1))], Sense::Max);
        assert_eq!(out.value, Some(int(2)));
        assert!(s.satisfied_by(&out.witness.unwrap()));
    }

    #[test]
    fn dump_format() {
        let mut s = xy();
        s.add(&[("x", frac(1, 2)), ("y", int(-1))], Relation::Le, int(3)).unwrap();
        assert_eq!(s.dump(), "1/2*x + -1*y <= 3\n");
    }
}
