//! Dense two-phase simplex.
//!
//! Every computation in this crate reduces to a small dense linear program:
//! membership in a convex hull, minimal self-mass of a representing measure,
//! largest minorant value, separation. The engine here is a tableau method
//! with most-negative-cost pricing, Bland's rule on degenerate stalls and
//! periodic reinversion from the original rows. The final basis is
//! refactored so the returned point and dual multipliers are accurate to
//! roughly machine precision rather than carrying the tableau's round-off.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Primal feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-9;
/// Allowed difference between primal value and dual bound.
pub const GAP_TOL: f64 = 1e-9;
/// Pivot budget per solve (both phases together).
pub const ITERATION_LIMIT: usize = 100_000;

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-10;
const RATIO_TIE: f64 = 1e-12;
/// Reduced cost, relative to the largest cost, below which a blocked column is noise.
const RAY_TOL: f64 = 1e-7;
/// Pivots between reinversions of the tableau.
const REINVERT_EVERY: usize = 50;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("invalid linear program: {0}")]
    Validation(String),
    #[error("simplex iteration limit ({0}) exhausted")]
    IterationLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// Variable bounds. `None` stands for an infinite bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Bound {
    pub const NONNEG: Bound = Bound { lower: Some(0.0), upper: None };
    pub const FREE: Bound = Bound { lower: None, upper: None };

    pub fn new(lower: Option<f64>, upper: Option<f64>) -> Self {
        Bound { lower, upper }
    }

    pub fn boxed(lower: f64, upper: f64) -> Self {
        Bound { lower: Some(lower), upper: Some(upper) }
    }
}

/// `minimize objective·x` subject to `constraint_matrix·x (relations) rhs`
/// and per-variable bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraint_matrix: Vec<Vec<f64>>,
    pub relations: Vec<Relation>,
    pub rhs: Vec<f64>,
    pub variable_bounds: Vec<Bound>,
}

impl LinearProgram {
    /// Program over `n` nonnegative variables with a zero objective.
    pub fn new(n: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; n],
            constraint_matrix: Vec::new(),
            relations: Vec::new(),
            rhs: Vec::new(),
            variable_bounds: vec![Bound::NONNEG; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraint_matrix.len()
    }

    pub fn with_objective(mut self, objective: Vec<f64>) -> Self {
        self.objective = objective;
        self
    }

    pub fn with_bounds(mut self, bounds: Vec<Bound>) -> Self {
        self.variable_bounds = bounds;
        self
    }

    pub fn constrain(&mut self, row: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraint_matrix.push(row);
        self.relations.push(relation);
        self.rhs.push(rhs);
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        let m = self.constraint_matrix.len();
        if self.relations.len() != m || self.rhs.len() != m {
            return Err(LpError::Validation(format!(
                "{m} constraint rows but {} relations and {} right-hand sides",
                self.relations.len(),
                self.rhs.len()
            )));
        }
        if self.variable_bounds.len() != n {
            return Err(LpError::Validation(format!(
                "{n} variables but {} bounds",
                self.variable_bounds.len()
            )));
        }
        for (i, row) in self.constraint_matrix.iter().enumerate() {
            if row.len() != n {
                return Err(LpError::Validation(format!(
                    "constraint row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(LpError::Validation(format!("constraint row {i} has a non-finite entry")));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(LpError::Validation("objective has a non-finite entry".into()));
        }
        if self.rhs.iter().any(|v| !v.is_finite()) {
            return Err(LpError::Validation("right-hand side has a non-finite entry".into()));
        }
        for (j, b) in self.variable_bounds.iter().enumerate() {
            if b.lower.is_some_and(|v| !v.is_finite()) || b.upper.is_some_and(|v| !v.is_finite()) {
                return Err(LpError::Validation(format!(
                    "bound of variable {j} is non-finite; use null for an infinite bound"
                )));
            }
        }
        Ok(())
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for ((row, rel), &b) in self.constraint_matrix.iter().zip(&self.relations).zip(&self.rhs) {
            let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match rel {
                Relation::Le => lhs - b,
                Relation::Ge => b - lhs,
                Relation::Eq => (lhs - b).abs(),
            };
            worst = worst.max(v);
        }
        for (bound, &v) in self.variable_bounds.iter().zip(x) {
            if let Some(l) = bound.lower {
                worst = worst.max(l - v);
            }
            if let Some(u) = bound.upper {
                worst = worst.max(v - u);
            }
        }
        worst
    }

    /// Lagrangian lower bound `min_x {c·x − y·(Ax − b)}` over the variable
    /// box, for multipliers `y` projected onto the sign-feasible cone.
    /// Returns `-inf` when a reduced cost on an unbounded side is nonzero.
    pub fn dual_bound(&self, y: &[f64]) -> f64 {
        let n = self.num_vars();
        let y: Vec<f64> = y
            .iter()
            .zip(&self.relations)
            .map(|(&v, rel)| match rel {
                Relation::Le => v.min(0.0),
                Relation::Ge => v.max(0.0),
                Relation::Eq => v,
            })
            .collect();
        let mut total: f64 = y.iter().zip(&self.rhs).map(|(a, b)| a * b).sum();
        for j in 0..n {
            let mut r = self.objective[j];
            for (row, yi) in self.constraint_matrix.iter().zip(&y) {
                r -= row[j] * yi;
            }
            let b = self.variable_bounds[j];
            let side = if r > 0.0 { b.lower } else { b.upper };
            match side {
                Some(v) => total += r * v,
                None if r.abs() <= COST_TOL * 10.0 => {}
                None => return f64::NEG_INFINITY,
            }
        }
        total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub value: Option<f64>,
    pub point: Option<Vec<f64>>,
    pub dual_point: Option<Vec<f64>>,
    /// Lagrangian bound certified by `dual_point`.
    pub dual_value: Option<f64>,
    pub iterations: usize,
}

impl LpOutcome {
    fn without_solution(status: LpStatus, iterations: usize) -> Self {
        LpOutcome { status, value: None, point: None, dual_point: None, dual_value: None, iterations }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn duality_gap(&self) -> Option<f64> {
        Some((self.value? - self.dual_value?).abs())
    }
}

/// How an original variable is recovered from standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = offset + sign * s`
    Shift { col: usize, offset: f64, sign: f64 },
    /// `x = s⁺ − s⁻`
    Split { pos: usize, neg: usize },
}

/// `min c·s  s.t.  A s = b, s ≥ 0` with `b ≥ 0`.
struct StandardForm {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    /// Column that can start in the basis for each row (a `+1` slack), if any.
    slack_basis: Vec<Option<usize>>,
    /// `+1` or `-1` when the original row was negated to make `b ≥ 0`.
    row_sign: Vec<f64>,
    vars: Vec<VarMap>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Option<Self> {
        let n = lp.num_vars();
        let mut vars = Vec::with_capacity(n);
        let mut ncols = 0;
        // upper-bound rows: (structural column, capacity)
        let mut cap_rows = Vec::new();
        for b in &lp.variable_bounds {
            match (b.lower, b.upper) {
                (Some(l), Some(u)) => {
                    if l > u {
                        return None;
                    }
                    vars.push(VarMap::Shift { col: ncols, offset: l, sign: 1.0 });
                    cap_rows.push((ncols, u - l));
                    ncols += 1;
                }
                (Some(l), None) => {
                    vars.push(VarMap::Shift { col: ncols, offset: l, sign: 1.0 });
                    ncols += 1;
                }
                (None, Some(u)) => {
                    vars.push(VarMap::Shift { col: ncols, offset: u, sign: -1.0 });
                    ncols += 1;
                }
                (None, None) => {
                    vars.push(VarMap::Split { pos: ncols, neg: ncols + 1 });
                    ncols += 2;
                }
            }
        }
        let structural = ncols;
        let m = lp.num_constraints() + cap_rows.len();
        let n_slack = lp.relations.iter().filter(|r| **r != Relation::Eq).count() + cap_rows.len();
        let width = structural + n_slack;

        let mut a = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        let mut slack_sign = Vec::with_capacity(m);
        let mut slack_col = Vec::with_capacity(m);
        let mut next_slack = structural;

        for ((row, rel), &rhs) in lp.constraint_matrix.iter().zip(&lp.relations).zip(&lp.rhs) {
            let mut out = vec![0.0; width];
            let mut r = rhs;
            for (j, &coef) in row.iter().enumerate() {
                if coef == 0.0 {
                    continue;
                }
                match vars[j] {
                    VarMap::Shift { col, offset, sign } => {
                        r -= coef * offset;
                        out[col] += coef * sign;
                    }
                    VarMap::Split { pos, neg } => {
                        out[pos] += coef;
                        out[neg] -= coef;
                    }
                }
            }
            match rel {
                Relation::Le => {
                    out[next_slack] = 1.0;
                    slack_col.push(Some(next_slack));
                    slack_sign.push(1.0);
                    next_slack += 1;
                }
                Relation::Ge => {
                    out[next_slack] = -1.0;
                    slack_col.push(Some(next_slack));
                    slack_sign.push(-1.0);
                    next_slack += 1;
                }
                Relation::Eq => {
                    slack_col.push(None);
                    slack_sign.push(0.0);
                }
            }
            a.push(out);
            b.push(r);
        }
        for &(col, capacity) in &cap_rows {
            let mut out = vec![0.0; width];
            out[col] = 1.0;
            out[next_slack] = 1.0;
            slack_col.push(Some(next_slack));
            slack_sign.push(1.0);
            next_slack += 1;
            a.push(out);
            b.push(capacity);
        }

        let mut row_sign = vec![1.0; m];
        let mut slack_basis = vec![None; m];
        for i in 0..m {
            if b[i] < 0.0 {
                row_sign[i] = -1.0;
                b[i] = -b[i];
                for v in a[i].iter_mut() {
                    *v = -*v;
                }
            }
            if let Some(col) = slack_col[i] {
                if slack_sign[i] * row_sign[i] > 0.0 {
                    slack_basis[i] = Some(col);
                }
            }
        }

        let mut c = vec![0.0; width];
        for (j, &cj) in lp.objective.iter().enumerate() {
            match vars[j] {
                VarMap::Shift { col, sign, .. } => c[col] += cj * sign,
                VarMap::Split { pos, neg } => {
                    c[pos] += cj;
                    c[neg] -= cj;
                }
            }
        }

        Some(StandardForm { a, b, c, slack_basis, row_sign, vars })
    }

    fn recover(&self, s: &[f64]) -> Vec<f64> {
        self.vars
            .iter()
            .map(|v| match *v {
                VarMap::Shift { col, offset, sign } => offset + sign * s[col],
                VarMap::Split { pos, neg } => s[pos] - s[neg],
            })
            .collect()
    }
}

struct Tableau {
    /// `m` rows of `width + 1` entries; the last entry is the right-hand side.
    rows: Vec<Vec<f64>>,
    /// Reduced costs; the last entry is minus the objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    active: Vec<bool>,
    /// The other half of a split free variable.
    twin: Vec<Option<usize>>,
    in_basis: Vec<bool>,
    /// The initial rows, kept for reinversion.
    orig: Vec<Vec<f64>>,
    width: usize,
    iterations: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rows[r][c] = 1.0;
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for k in 0..=w {
                    row[k] -= f * pivot_row[k];
                }
                row[c] = 0.0;
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for k in 0..=w {
                self.cost[k] -= f * pivot_row[k];
            }
            self.cost[c] = 0.0;
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[c] = true;
        self.basis[r] = c;
    }

    fn price(&mut self, costs: &[f64]) {
        self.cost = costs.to_vec();
        self.cost.resize(self.width + 1, 0.0);
        for (r, row) in self.rows.iter().enumerate() {
            if !self.active[r] {
                continue;
            }
            let cb = self.cost_of(costs, self.basis[r]);
            if cb != 0.0 {
                for (k, v) in row.iter().enumerate() {
                    self.cost[k] -= cb * v;
                }
            }
        }
    }

    fn cost_of(&self, costs: &[f64], j: usize) -> f64 {
        costs.get(j).copied().unwrap_or(0.0)
    }

    /// Recomputes the tableau rows from the initial ones through an LU
    /// factorization of the current basis, discarding accumulated rounding.
    fn reinvert(&mut self) {
        let active: Vec<usize> = (0..self.rows.len()).filter(|&r| self.active[r]).collect();
        let k = active.len();
        if k == 0 {
            return;
        }
        let w = self.width;
        let bmat = DMatrix::from_fn(k, k, |i, j| self.orig[active[i]][self.basis[active[j]]]);
        let rhs = DMatrix::from_fn(k, w + 1, |i, c| self.orig[active[i]][c]);
        let Some(sol) = bmat.lu().solve(&rhs) else {
            return;
        };
        for (j, &r) in active.iter().enumerate() {
            let row = &mut self.rows[r];
            for c in 0..=w {
                row[c] = sol[(j, c)];
            }
            for &r2 in &active {
                row[self.basis[r2]] = if r2 == r { 1.0 } else { 0.0 };
            }
        }
    }

    /// Primal simplex over columns `< allowed`. Entering columns follow the
    /// most negative reduced cost; after a run of degenerate pivots the rule
    /// switches to Bland's until the objective moves again. A column with no
    /// positive entry and a reduced cost indistinguishable from zero is
    /// skipped rather than reported as an unbounded ray.
    fn run(&mut self, allowed: usize, costs: &[f64], cost_scale: f64) -> Result<Phase, LpError> {
        let w = self.width;
        let cost_tol = COST_TOL * cost_scale;
        let mut blocked = vec![false; allowed];
        let mut since_reinvert = 0;
        let mut degenerate = 0;
        loop {
            if since_reinvert >= REINVERT_EVERY {
                self.reinvert();
                self.price(costs);
                since_reinvert = 0;
            }
            let bland = degenerate > DEGENERATE_RUN;
            let mut enter = None;
            for j in 0..allowed {
                if self.cost[j] >= -cost_tol || blocked[j] || self.twin[j].is_some_and(|t| self.in_basis[t]) {
                    continue;
                }
                if bland {
                    enter = Some(j);
                    break;
                }
                if enter.is_none_or(|e: usize| self.cost[j] < self.cost[e]) {
                    enter = Some(j);
                }
            }
            let Some(enter) = enter else {
                if since_reinvert > 0 {
                    since_reinvert = REINVERT_EVERY;
                    continue;
                }
                return Ok(Phase::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !self.active[r] || row[enter] <= PIVOT_TOL {
                    continue;
                }
                let ratio = row[w].max(0.0) / row[enter];
                let better = match leave {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < best_ratio - RATIO_TIE
                            || (ratio <= best_ratio + RATIO_TIE
                                && if bland {
                                    self.basis[r] < self.basis[best]
                                } else {
                                    row[enter] > self.rows[best][enter]
                                })
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                None if since_reinvert > 0 => since_reinvert = REINVERT_EVERY,
                None if self.cost[enter] < -RAY_TOL * cost_scale => return Ok(Phase::Unbounded),
                None => blocked[enter] = true,
                Some((r, ratio)) => {
                    self.iterations += 1;
                    if self.iterations > ITERATION_LIMIT {
                        return Err(LpError::IterationLimit(ITERATION_LIMIT));
                    }
                    if ratio <= RATIO_TIE {
                        degenerate += 1;
                    } else {
                        degenerate = 0;
                    }
                    self.pivot(r, enter);
                    since_reinvert += 1;
                    blocked.iter_mut().for_each(|b| *b = false);
                }
            }
        }
    }
}

/// Solve a linear program.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let Some(sf) = StandardForm::build(lp) else {
        return Ok(LpOutcome::without_solution(LpStatus::Infeasible, 0));
    };
    let m = sf.a.len();
    let ncols = sf.c.len();

    // Artificial columns for rows without a usable slack.
    let art_rows: Vec<usize> = (0..m).filter(|&i| sf.slack_basis[i].is_none()).collect();
    let width = ncols + art_rows.len();
    let mut rows = Vec::with_capacity(m);
    let mut basis = vec![0; m];
    for i in 0..m {
        let mut row = Vec::with_capacity(width + 1);
        row.extend_from_slice(&sf.a[i]);
        row.resize(width, 0.0);
        row.push(sf.b[i]);
        rows.push(row);
    }
    for (k, &i) in art_rows.iter().enumerate() {
        rows[i][ncols + k] = 1.0;
        basis[i] = ncols + k;
    }
    for i in 0..m {
        if let Some(col) = sf.slack_basis[i] {
            basis[i] = col;
        }
    }
    let mut twin = vec![None; width];
    for v in &sf.vars {
        if let VarMap::Split { pos, neg } = *v {
            twin[pos] = Some(neg);
            twin[neg] = Some(pos);
        }
    }
    let mut in_basis = vec![false; width];
    for &j in &basis {
        in_basis[j] = true;
    }
    let orig = rows.clone();
    let mut t = Tableau { rows, cost: Vec::new(), basis, active: vec![true; m], twin, in_basis, orig, width, iterations: 0 };

    if !art_rows.is_empty() {
        let mut phase1 = vec![0.0; width];
        for k in 0..art_rows.len() {
            phase1[ncols + k] = 1.0;
        }
        t.price(&phase1);
        t.run(width, &phase1, 1.0)?;
        let infeasibility = -t.cost[width];
        let scale = 1.0 + sf.b.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if infeasibility > FEAS_TOL * scale {
            return Ok(LpOutcome::without_solution(LpStatus::Infeasible, t.iterations));
        }
        // Drive zero-level artificials out; rows where that is impossible are redundant.
        for r in 0..m {
            if t.basis[r] < ncols {
                continue;
            }
            let best = (0..ncols)
                .map(|j| (j, t.rows[r][j].abs()))
                .filter(|&(_, v)| v > PIVOT_TOL)
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
            match best {
                Some((j, _)) => t.pivot(r, j),
                None => t.active[r] = false,
            }
        }
    }

    t.price(&sf.c);
    let cost_scale = 1.0 + sf.c.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let phase = t.run(ncols, &sf.c, cost_scale)?;
    if let Phase::Unbounded = phase {
        return Ok(LpOutcome::without_solution(LpStatus::Unbounded, t.iterations));
    }

    let active: Vec<usize> = (0..m).filter(|&r| t.active[r]).collect();
    let mut s_tab = vec![0.0; ncols];
    for &r in &active {
        s_tab[t.basis[r]] = t.rows[r][width].max(0.0);
    }

    // Refactor the optimal basis against the untouched standard form.
    let k = active.len();
    if k == 0 {
        let x = sf.recover(&s_tab);
        let value: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        let dual = vec![0.0; lp.num_constraints()];
        let dual_value = lp.dual_bound(&dual);
        return Ok(LpOutcome {
            status: LpStatus::Optimal,
            value: Some(value),
            point: Some(x),
            dual_point: Some(dual),
            dual_value: Some(dual_value),
            iterations: t.iterations,
        });
    }
    let bmat = DMatrix::from_fn(k, k, |i, j| sf.a[active[i]][t.basis[active[j]]]);
    let lu = bmat.clone().lu();
    let rhs = DVector::from_fn(k, |i, _| sf.b[active[i]]);
    let cb = DVector::from_fn(k, |j, _| sf.c[t.basis[active[j]]]);

    let mut x = sf.recover(&s_tab);
    if let Some(xb) = lu.solve(&rhs) {
        let mut s_ref = vec![0.0; ncols];
        for (j, &r) in active.iter().enumerate() {
            s_ref[t.basis[r]] = xb[j].max(0.0);
        }
        let x_ref = sf.recover(&s_ref);
        if lp.max_violation(&x_ref) <= lp.max_violation(&x) {
            x = x_ref;
        }
    }

    let mut y_std = vec![0.0; m];
    if let Some(yb) = bmat.transpose().lu().solve(&cb) {
        for (j, &r) in active.iter().enumerate() {
            y_std[r] = yb[j];
        }
    }
    let n_orig_rows = lp.num_constraints();
    let dual: Vec<f64> = (0..n_orig_rows).map(|i| y_std[i] * sf.row_sign[i]).collect();

    let value: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    let dual_value = lp.dual_bound(&dual);
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        value: Some(value),
        point: Some(x),
        dual_point: Some(dual),
        dual_value: Some(dual_value),
        iterations: t.iterations,
    })
}

/// A feasible point, or `None` when the constraints are inconsistent.
pub fn feasible(lp: &LinearProgram) -> Result<Option<Vec<f64>>, LpError> {
    let mut zero = lp.clone();
    zero.objective = vec![0.0; lp.num_vars()];
    let out = solve(&zero)?;
    Ok(out.point)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bound() {
        let lp = LinearProgram::new(1)
            .with_objective(vec![1.0])
            .with_bounds(vec![Bound::new(Some(3.0), None)]);
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.value.unwrap() - 3.0).abs() < 1e-12);
        assert!((out.point.unwrap()[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_row_constraint() {
        let mut lp = LinearProgram::new(1).with_objective(vec![1.0]).with_bounds(vec![Bound::FREE]);
        lp.constrain(vec![1.0], Relation::Ge, 3.0);
        let out = solve(&lp).unwrap();
        assert!((out.value.unwrap() - 3.0).abs() < 1e-12);
        assert!((out.dual_point.as_ref().unwrap()[0] - 1.0).abs() < 1e-12);
        assert!(out.duality_gap().unwrap() < GAP_TOL);
    }

    #[test]
    fn contradictory_simplex_rows() {
        let mut lp = LinearProgram::new(2);
        lp.constrain(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.constrain(vec![1.0, -1.0], Relation::Eq, 3.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn free_unbounded() {
        let lp = LinearProgram::new(1).with_objective(vec![-1.0]).with_bounds(vec![Bound::FREE]);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn simplex_feasibility() {
        let mut lp = LinearProgram::new(3);
        lp.constrain(vec![1.0; 3], Relation::Eq, 1.0);
        let x = feasible(&lp).unwrap().unwrap();
        assert!(lp.max_violation(&x) <= FEAS_TOL);
        lp.constrain(vec![1.0; 3], Relation::Eq, 2.0);
        assert!(feasible(&lp).unwrap().is_none());
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(3).with_objective(vec![1.0, 2.0, 3.0]);
        lp.constrain(vec![1.0, 1.0, 1.0], Relation::Eq, 1.0);
        lp.constrain(vec![2.0, 2.0, 2.0], Relation::Eq, 2.0);
        lp.constrain(vec![0.0, 1.0, 1.0], Relation::Ge, 0.5);
        let out = solve(&lp).unwrap();
        assert!((out.value.unwrap() - 1.5).abs() < 1e-12);
        assert!(out.duality_gap().unwrap() < GAP_TOL);
    }

    #[test]
    fn upper_bounded_and_negative_lower() {
        // max x + y  s.t. x + 2y <= 4, x in [-1, 2], y <= 5 free below
        let mut lp = LinearProgram::new(2)
            .with_objective(vec![-1.0, -1.0])
            .with_bounds(vec![Bound::boxed(-1.0, 2.0), Bound::new(None, Some(5.0))]);
        lp.constrain(vec![1.0, 2.0], Relation::Le, 4.0);
        let out = solve(&lp).unwrap();
        assert!((out.value.unwrap() + 3.0).abs() < 1e-12, "{out:?}");
        assert!(out.duality_gap().unwrap() < GAP_TOL);
    }

    #[test]
    fn crossed_bounds_are_infeasible() {
        let lp = LinearProgram::new(1).with_bounds(vec![Bound::boxed(2.0, 1.0)]);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut lp = LinearProgram::new(2);
        lp.constrain(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(solve(&lp), Err(LpError::Validation(_))));
        let mut lp = LinearProgram::new(2);
        lp.variable_bounds.pop();
        assert!(matches!(solve(&lp), Err(LpError::Validation(_))));
        let mut lp = LinearProgram::new(1);
        lp.constrain(vec![f64::NAN], Relation::Le, 1.0);
        assert!(matches!(solve(&lp), Err(LpError::Validation(_))));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's classic cycling instance; Bland's rule must terminate.
        let mut lp = LinearProgram::new(4).with_objective(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.constrain(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        lp.constrain(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        lp.constrain(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let out = solve(&lp).unwrap();
        assert!((out.value.unwrap() + 0.05).abs() < 1e-12, "{out:?}");
        assert!(out.duality_gap().unwrap() < GAP_TOL);
    }

    #[test]
    fn json_round_trip_keeps_infinite_bounds() {
        let lp = LinearProgram::new(2).with_bounds(vec![Bound::FREE, Bound::new(None, Some(1.0))]);
        let s = serde_json::to_string(&lp).unwrap();
        let back: LinearProgram = serde_json::from_str(&s).unwrap();
        assert_eq!(lp, back);
    }
}
