//! Exact rational linear programming.
//!
//! Dense two-phase tableau simplex with Bland's rule. Phase one minimises the
//! sum of artificial variables; when that optimum is positive its duals give
//! a Farkas certificate, which is checked before it is returned. Every point
//! handed back to the caller has been substituted into the constraints.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rational::{self, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("internal solver failure: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub row: Vec<Rational>,
    pub rhs: Rational,
}

/// `equalities: row·x = rhs`, `inequalities: row·x ≤ rhs`, optional objective
/// to minimise. Variables are nonnegative unless marked free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    num_vars: usize,
    equalities: Vec<Constraint>,
    inequalities: Vec<Constraint>,
    nonneg: Vec<bool>,
    objective: Option<Vec<Rational>>,
}

impl LpProblem {
    /// A problem over `num_vars` nonnegative variables with no constraints.
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            num_vars,
            equalities: Vec::new(),
            inequalities: Vec::new(),
            nonneg: vec![true; num_vars],
            objective: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn equalities(&self) -> &[Constraint] {
        &self.equalities
    }

    pub fn inequalities(&self) -> &[Constraint] {
        &self.inequalities
    }

    pub fn is_nonneg(&self, var: usize) -> bool {
        self.nonneg[var]
    }

    pub fn objective(&self) -> Option<&[Rational]> {
        self.objective.as_deref()
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.nonneg[var] = false;
        self
    }

    pub fn add_equality(&mut self, row: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.equalities.push(Constraint { row, rhs });
        self
    }

    /// `row·x ≤ rhs`.
    pub fn add_le(&mut self, row: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.inequalities.push(Constraint { row, rhs });
        self
    }

    /// `row·x ≥ rhs`, stored as `-row·x ≤ -rhs`.
    pub fn add_ge(&mut self, row: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.add_le(row.into_iter().map(|v| -v).collect(), -rhs)
    }

    /// Objective to minimise.
    pub fn minimize(&mut self, objective: Vec<Rational>) -> &mut Self {
        self.objective = Some(objective);
        self
    }

    pub fn without_objective(&self) -> LpProblem {
        LpProblem {
            objective: None,
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<(), LpError> {
        let check = |what: &str, i: usize, row: &[Rational]| {
            if row.len() != self.num_vars {
                return Err(LpError::Malformed(format!(
                    "{what} {i} has {} coefficients, expected {}",
                    row.len(),
                    self.num_vars
                )));
            }
            Ok(())
        };
        for (i, c) in self.equalities.iter().enumerate() {
            check("equality", i, &c.row)?;
        }
        for (i, c) in self.inequalities.iter().enumerate() {
            check("inequality", i, &c.row)?;
        }
        if let Some(obj) = &self.objective {
            check("objective", 0, obj)?;
        }
        Ok(())
    }

    /// Exact check of every constraint at `point`.
    pub fn is_satisfied_by(&self, point: &[Rational]) -> bool {
        point.len() == self.num_vars
            && point.iter().zip(&self.nonneg).all(|(v, &nn)| !nn || !v.is_negative())
            && self.equalities.iter().all(|c| rational::dot(&c.row, point) == c.rhs)
            && self.inequalities.iter().all(|c| rational::dot(&c.row, point) <= c.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Feasible,
    Infeasible,
    Optimal,
    Unbounded,
}

/// Multipliers proving infeasibility: `λ` (any sign) on equalities and
/// `ρ ≥ 0` on inequalities whose combination `r = Σλa + Σρg` has `r_k ≥ 0`
/// on nonnegative variables, `r_k = 0` on free ones, and `Σλb + Σρh < 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub equality_multipliers: Vec<Rational>,
    pub inequality_multipliers: Vec<Rational>,
}

impl FarkasCertificate {
    pub fn verify(&self, problem: &LpProblem) -> bool {
        if self.equality_multipliers.len() != problem.equalities.len()
            || self.inequality_multipliers.len() != problem.inequalities.len()
            || self.inequality_multipliers.iter().any(Signed::is_negative)
        {
            return false;
        }
        let mut combined = vec![Rational::zero(); problem.num_vars];
        let mut rhs = Rational::zero();
        let pairs = self
            .equality_multipliers
            .iter()
            .zip(&problem.equalities)
            .chain(self.inequality_multipliers.iter().zip(&problem.inequalities));
        for (lambda, c) in pairs {
            if lambda.is_zero() {
                continue;
            }
            for (slot, a) in combined.iter_mut().zip(&c.row) {
                *slot += lambda * a;
            }
            rhs += lambda * &c.rhs;
        }
        let signs_ok = combined
            .iter()
            .zip(&problem.nonneg)
            .all(|(r, &nn)| if nn { !r.is_negative() } else { r.is_zero() });
        signs_ok && rhs.is_negative()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub point: Option<Vec<Rational>>,
    pub objective_value: Option<Rational>,
    pub farkas: Option<FarkasCertificate>,
    pub pivots: usize,
}

/// Finds a feasible point or proves there is none. Any objective is ignored.
pub fn solve_feasibility(problem: &LpProblem) -> Result<LpSolution, LpError> {
    problem.validate()?;
    let mut tableau = Tableau::standard_form(problem);
    match tableau.phase_one()? {
        PhaseOne::Infeasible(cert) => {
            if !cert.verify(problem) {
                return Err(LpError::Internal("Farkas certificate failed verification".into()));
            }
            Ok(LpSolution {
                status: LpStatus::Infeasible,
                point: None,
                objective_value: None,
                farkas: Some(cert),
                pivots: tableau.pivots,
            })
        }
        PhaseOne::Feasible => {
            let point = tableau.extract_point(problem)?;
            Ok(LpSolution {
                status: LpStatus::Feasible,
                point: Some(point),
                objective_value: None,
                farkas: None,
                pivots: tableau.pivots,
            })
        }
    }
}

/// Minimises the objective exactly.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution, LpError> {
    problem.validate()?;
    let objective = problem
        .objective
        .as_ref()
        .ok_or_else(|| LpError::Malformed("solve_lp needs an objective".into()))?;
    let mut tableau = Tableau::standard_form(problem);
    if let PhaseOne::Infeasible(cert) = tableau.phase_one()? {
        if !cert.verify(problem) {
            return Err(LpError::Internal("Farkas certificate failed verification".into()));
        }
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            point: None,
            objective_value: None,
            farkas: Some(cert),
            pivots: tableau.pivots,
        });
    }
    let bounded = tableau.phase_two(problem)?;
    if !bounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            point: None,
            objective_value: None,
            farkas: None,
            pivots: tableau.pivots,
        });
    }
    let point = tableau.extract_point(problem)?;
    let value = rational::dot(objective, &point);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        point: Some(point),
        objective_value: Some(value),
        farkas: None,
        pivots: tableau.pivots,
    })
}

enum PhaseOne {
    Feasible,
    Infeasible(FarkasCertificate),
}

/// Column `j` of the standard form, and where it came from.
#[derive(Clone, Copy)]
enum Column {
    Plus(usize),
    Minus(usize),
    Slack,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    cost: Vec<Rational>,
    basis: Vec<usize>,
    columns: Vec<Column>,
    /// For each original constraint (equalities first): its row sign and
    /// artificial column; `None` once the row was dropped as redundant.
    row_sign: Vec<bool>,
    row_artificial: Vec<usize>,
    /// Tableau row index -> original constraint index.
    row_origin: Vec<usize>,
    num_rows_original: usize,
    pivots: usize,
}

impl Tableau {
    fn standard_form(problem: &LpProblem) -> Tableau {
        let mut columns = Vec::new();
        let mut var_cols = Vec::with_capacity(problem.num_vars);
        for k in 0..problem.num_vars {
            columns.push(Column::Plus(k));
            let plus = columns.len() - 1;
            let minus = if problem.nonneg[k] {
                None
            } else {
                columns.push(Column::Minus(k));
                Some(columns.len() - 1)
            };
            var_cols.push((plus, minus));
        }
        let num_eq = problem.equalities.len();
        let m = num_eq + problem.inequalities.len();
        let slack_start = columns.len();
        columns.extend(std::iter::repeat_n(Column::Slack, problem.inequalities.len()));
        let art_start = columns.len();
        columns.extend(std::iter::repeat_n(Column::Artificial, m));
        let width = columns.len() + 1;

        let mut rows = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        let constraints = problem.equalities.iter().chain(&problem.inequalities);
        for (i, c) in constraints.enumerate() {
            let mut row = vec![Rational::zero(); width];
            for (k, a) in c.row.iter().enumerate() {
                let (plus, minus) = var_cols[k];
                row[plus] = a.clone();
                if let Some(minus) = minus {
                    row[minus] = -a;
                }
            }
            if i >= num_eq {
                row[slack_start + i - num_eq] = Rational::one();
            }
            row[width - 1] = c.rhs.clone();
            let negate = c.rhs.is_negative();
            if negate {
                for v in row.iter_mut() {
                    *v = -&*v;
                }
            }
            row[art_start + i] = Rational::one();
            rows.push(row);
            row_sign.push(negate);
        }
        Tableau {
            rows,
            cost: vec![Rational::zero(); width],
            basis: (art_start..art_start + m).collect(),
            columns,
            row_sign,
            row_artificial: (art_start..art_start + m).collect(),
            row_origin: (0..m).collect(),
            num_rows_original: m,
            pivots: 0,
        }
    }

    fn width(&self) -> usize {
        self.columns.len() + 1
    }

    fn rhs(&self) -> usize {
        self.columns.len()
    }

    fn is_artificial(&self, col: usize) -> bool {
        matches!(self.columns[col], Column::Artificial)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let inv = Rational::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let support: Vec<usize> = (0..self.width()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = self.rows[r].clone();
        let eliminate = |target: &mut Vec<Rational>| {
            let factor = target[c].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                target[j] -= delta;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[r] = c;
    }

    /// Runs Bland's rule on the current cost row. Returns false on an
    /// unbounded ray.
    fn optimise(&mut self, allow_artificial: bool) -> bool {
        loop {
            let entering = (0..self.columns.len())
                .filter(|&j| allow_artificial || !self.is_artificial(j))
                .find(|&j| self.cost[j].is_negative());
            let Some(c) = entering else {
                return true;
            };
            let rhs = self.rhs();
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn phase_one(&mut self) -> Result<PhaseOne, LpError> {
        let width = self.width();
        let mut cost = vec![Rational::zero(); width];
        for (j, slot) in cost.iter_mut().enumerate() {
            if j < self.columns.len() && self.is_artificial(j) {
                continue;
            }
            *slot = -self.rows.iter().fold(Rational::zero(), |acc, row| acc + &row[j]);
        }
        self.cost = cost;
        if !self.optimise(true) {
            return Err(LpError::Internal("phase one reported an unbounded ray".into()));
        }
        let value = -&self.cost[self.rhs()];
        if value.is_positive() {
            let mut eq = Vec::new();
            let mut ineq = Vec::new();
            for i in 0..self.num_rows_original {
                let y = Rational::one() - &self.cost[self.row_artificial[i]];
                let sign = if self.row_sign[i] { Rational::one() } else { -Rational::one() };
                // λ_i = -σ_i y_i, with σ_i = -1 for negated rows
                let multiplier = sign * y;
                if i < self.num_equalities() {
                    eq.push(multiplier);
                } else {
                    ineq.push(multiplier);
                }
            }
            return Ok(PhaseOne::Infeasible(FarkasCertificate {
                equality_multipliers: eq,
                inequality_multipliers: ineq,
            }));
        }
        if !value.is_zero() {
            return Err(LpError::Internal("negative phase one optimum".into()));
        }
        self.drive_out_artificials();
        Ok(PhaseOne::Feasible)
    }

    fn num_equalities(&self) -> usize {
        self.num_rows_original - self.columns.iter().filter(|c| matches!(c, Column::Slack)).count()
    }

    /// Pivots zero-level artificials out of the basis, dropping rows that are
    /// linear combinations of the others.
    fn drive_out_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if !self.is_artificial(self.basis[r]) {
                r += 1;
                continue;
            }
            let replacement = (0..self.columns.len()).find(|&j| !self.is_artificial(j) && !self.rows[r][j].is_zero());
            match replacement {
                Some(c) => {
                    self.pivot(r, c);
                    r += 1;
                }
                None => {
                    self.rows.remove(r);
                    self.basis.remove(r);
                    self.row_origin.remove(r);
                }
            }
        }
    }

    fn phase_two(&mut self, problem: &LpProblem) -> Result<bool, LpError> {
        let objective = problem.objective.as_ref().expect("checked by caller");
        let width = self.width();
        let col_cost = |col: &Column| match *col {
            Column::Plus(k) => objective[k].clone(),
            Column::Minus(k) => -&objective[k],
            Column::Slack | Column::Artificial => Rational::zero(),
        };
        let mut cost: Vec<Rational> = self.columns.iter().map(col_cost).collect();
        cost.push(Rational::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = col_cost(&self.columns[self.basis[i]]);
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                if !row[j].is_zero() {
                    cost[j] -= &cb * &row[j];
                }
            }
        }
        self.cost = cost;
        Ok(self.optimise(false))
    }

    fn extract_point(&self, problem: &LpProblem) -> Result<Vec<Rational>, LpError> {
        let rhs = self.rhs();
        let mut point = vec![Rational::zero(); problem.num_vars];
        for (i, &col) in self.basis.iter().enumerate() {
            match self.columns[col] {
                Column::Plus(k) => point[k] += &self.rows[i][rhs],
                Column::Minus(k) => point[k] -= &self.rows[i][rhs],
                Column::Slack => {}
                Column::Artificial => {
                    if !self.rows[i][rhs].is_zero() {
                        return Err(LpError::Internal("artificial variable left positive".into()));
                    }
                }
            }
        }
        if !problem.is_satisfied_by(&point) {
            return Err(LpError::Internal("solution failed substitution check".into()));
        }
        Ok(point)
    }
}
