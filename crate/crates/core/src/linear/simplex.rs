//! Dense two-phase simplex on the dual, with Bland's rule.
//!
//! The primal is `max cᵀx s.t. Ax ≤ b` with `x` free. Its dual
//! `min bᵀy s.t. Aᵀy = c, y ≥ 0` has one tableau row per primal variable,
//! which keeps the tableau small when rows outnumber variables (the usual
//! shape here). The primal point is read off the final simplex multipliers.

use num_traits::{One, Signed, Zero};

use super::{Constraint, LinearSystem};
use crate::rational::Rational;

pub(super) enum Solution {
    Optimal {
        value: Rational,
        point: Vec<Rational>,
    },
    /// The primal has no feasible point.
    Infeasible,
    /// The dual has no feasible point: the primal is unbounded or infeasible.
    NotBounded,
}

struct Tableau {
    /// `n` rows of `m + n` columns: dual variables, then one artificial per row.
    cells: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs and objective value for the current phase.
    reduced: Vec<Rational>,
    value: Rational,
    duals: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, k: usize) {
        let mut row = std::mem::take(&mut self.cells[r]);
        let piv = row[k].clone();
        if !piv.is_one() {
            for v in row.iter_mut().filter(|v| !v.is_zero()) {
                *v /= &piv;
            }
            self.rhs[r] /= &piv;
        }
        let support: Vec<usize> = (0..row.len()).filter(|&c| !row[c].is_zero()).collect();
        for i in 0..self.cells.len() {
            if i == r || self.cells[i][k].is_zero() {
                continue;
            }
            let f = self.cells[i][k].clone();
            for &c in &support {
                self.cells[i][c] -= &f * &row[c];
            }
            let delta = &f * &self.rhs[r];
            self.rhs[i] -= delta;
        }
        if !self.reduced[k].is_zero() {
            let f = self.reduced[k].clone();
            for &c in &support {
                self.reduced[c] -= &f * &row[c];
            }
            self.value += &f * &self.rhs[r];
        }
        self.cells[r] = row;
        self.basis[r] = k;
    }

    /// Sets reduced costs and value from column costs.
    fn price(&mut self, cost: &[Rational]) {
        let width = cost.len();
        self.reduced = cost.to_vec();
        self.value = Rational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for c in 0..width {
                if !self.cells[r][c].is_zero() {
                    self.reduced[c] -= cb * &self.cells[r][c];
                }
            }
            self.value += cb * &self.rhs[r];
        }
    }

    /// Minimizes with Bland's rule; only the first `enter_limit` columns may enter.
    fn run(&mut self, enter_limit: usize, stop_at_zero: bool) -> Step {
        loop {
            if stop_at_zero && self.value.is_zero() {
                return Step::Optimal;
            }
            let Some(k) = (0..enter_limit).find(|&c| self.reduced[c].is_negative()) else {
                return Step::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.cells.len() {
                let a = &self.cells[r][k];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, k),
                None => return Step::Unbounded,
            }
        }
    }
}

pub(super) fn solve(sys: &LinearSystem, objective: &[(usize, Rational)]) -> Solution {
    let n = sys.variables().len();
    let rows: Vec<Constraint> = sys.rows().iter().flat_map(Constraint::to_le).collect();
    let m = rows.len();
    let width = m + n;

    let mut c = vec![Rational::zero(); n];
    for (j, v) in objective {
        c[*j] += v;
    }
    let mut cells = vec![vec![Rational::zero(); width]; n];
    for (k, row) in rows.iter().enumerate() {
        for (j, a) in row.coeffs() {
            cells[*j][k] = a.clone();
        }
    }
    // Rows with negative rhs are negated so the artificial basis starts feasible.
    let mut sign = vec![Rational::one(); n];
    for j in 0..n {
        if c[j].is_negative() {
            sign[j] = -Rational::one();
            for v in cells[j][..m].iter_mut() {
                *v = -&*v;
            }
            c[j] = -&c[j];
        }
        cells[j][m + j] = Rational::one();
    }
    let mut tab =
        Tableau { cells, rhs: c, basis: (m..width).collect(), reduced: Vec::new(), value: Rational::zero(), duals: m };

    let mut phase_one = vec![Rational::zero(); width];
    for v in &mut phase_one[m..] {
        *v = Rational::one();
    }
    tab.price(&phase_one);
    tab.run(m, true);
    if !tab.value.is_zero() {
        return Solution::NotBounded;
    }
    for r in 0..n {
        if tab.basis[r] >= m {
            if let Some(k) = (0..m).find(|&k| !tab.cells[r][k].is_zero()) {
                tab.pivot(r, k);
            }
        }
    }

    let mut cost = vec![Rational::zero(); width];
    for (k, row) in rows.iter().enumerate() {
        cost[k] = row.rhs().clone();
    }
    tab.price(&cost);
    if let Step::Unbounded = tab.run(tab.duals, false) {
        return Solution::Infeasible;
    }

    let mut point = vec![Rational::zero(); n];
    for (r, &b) in tab.basis.iter().enumerate() {
        let cb = &cost[b];
        if cb.is_zero() {
            continue;
        }
        for (j, x) in point.iter_mut().enumerate() {
            let a = &tab.cells[r][m + j];
            if !a.is_zero() {
                *x += cb * a;
            }
        }
    }
    for (x, s) in point.iter_mut().zip(&sign) {
        *x *= s;
    }
    Solution::Optimal { value: tab.value, point }
}
