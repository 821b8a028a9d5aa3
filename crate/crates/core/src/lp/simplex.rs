//! Two-phase dense simplex on an exchange (compact) tableau.
//!
//! Rows are basic variables, columns are nonbasic ones, and row `i` reads
//! `basic_i = rhs_i - Σ_j T[i][j] nonbasic_j`. Free columns enter in either
//! direction and never leave the basis once they are in.

use rayon::prelude::*;

use super::model::{LinearProgram, LpSolution, LpStatus, Relation};
use crate::error::{Error, Result};

pub const DEFAULT_ITERATION_LIMIT: u64 = 1_000_000;
const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
const PARALLEL_CELLS: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Label {
    Var(usize),
    Slack(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    pub iteration_limit: u64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            iteration_limit: DEFAULT_ITERATION_LIMIT,
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with(lp, SimplexOptions::default())
}

pub fn solve_lp_with(lp: &LinearProgram, options: SimplexOptions) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_variables();

    // All rows in `a·x ≤ b` form, equilibrated by the largest |a|.
    let mut rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for c in &lp.constraints {
        let scale = c.coeffs.iter().fold(0.0f64, |m, &(_, a)| m.max(a.abs()));
        if scale == 0.0 {
            let ok = match c.relation {
                Relation::Le => c.rhs >= -FEAS_TOL,
                Relation::Ge => c.rhs <= FEAS_TOL,
                Relation::Eq => c.rhs.abs() <= FEAS_TOL,
            };
            if !ok {
                return Ok(infeasible(n));
            }
            continue;
        }
        let scaled: Vec<(usize, f64)> = c.coeffs.iter().map(|&(j, a)| (j, a / scale)).collect();
        let rhs = c.rhs / scale;
        if matches!(c.relation, Relation::Le | Relation::Eq) {
            rows.push((scaled.clone(), rhs));
        }
        if matches!(c.relation, Relation::Ge | Relation::Eq) {
            rows.push((scaled.iter().map(|&(j, a)| (j, -a)).collect(), -rhs));
        }
    }

    let needs_phase1 = rows.iter().any(|(_, b)| *b < 0.0);
    let mut free: Vec<bool> = lp.variables.iter().map(|v| v.free).collect();
    let artificial = needs_phase1.then(|| {
        free.push(false);
        n
    });
    let mut tab = Tableau::new(&rows, free, &lp.objective, artificial, options);

    if let Some(art) = artificial {
        let worst = (0..tab.m)
            .min_by(|&a, &b| tab.rhs(a).total_cmp(&tab.rhs(b)))
            .expect("phase one needs a row");
        tab.pivot(worst, art);
        match tab.run(tab.m + 1)? {
            LpStatus::Optimal => {}
            status => unreachable!("phase one is bounded, got {status:?}"),
        }
        if tab.at(tab.m + 1, tab.ncols) < -FEAS_TOL {
            return Ok(LpSolution {
                iterations: tab.iterations,
                ..infeasible(n)
            });
        }
        tab.retire_artificial(art);
    }

    let status = tab.run(tab.m)?;
    if status == LpStatus::Unbounded {
        return Ok(LpSolution {
            status,
            objective: f64::INFINITY,
            values: vec![0.0; n],
            iterations: tab.iterations,
            max_violation: 0.0,
        });
    }

    let raw = tab.primal(n);
    let mut values = raw.clone();
    let mut violation = lp.max_violation(&raw);
    if let Some(refined) = tab.refine(&rows, n) {
        let v = lp.max_violation(&refined);
        if v <= violation {
            values = refined;
            violation = v;
        }
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: lp.objective_value(&values),
        values,
        iterations: tab.iterations,
        max_violation: violation,
    })
}

fn infeasible(n: usize) -> LpSolution {
    LpSolution {
        status: LpStatus::Infeasible,
        objective: f64::NEG_INFINITY,
        values: vec![0.0; n],
        iterations: 0,
        max_violation: 0.0,
    }
}

struct Tableau {
    /// Constraint rows; row `m` is the objective and `m + 1` the phase-one
    /// objective.
    m: usize,
    ncols: usize,
    stride: usize,
    data: Vec<f64>,
    row_label: Vec<Label>,
    col_label: Vec<Label>,
    live_row: Vec<bool>,
    live_col: Vec<bool>,
    free: Vec<bool>,
    sign: Vec<f64>,
    iterations: u64,
    limit: u64,
}

impl Tableau {
    fn new(
        rows: &[(Vec<(usize, f64)>, f64)],
        free: Vec<bool>,
        objective: &[f64],
        artificial: Option<usize>,
        options: SimplexOptions,
    ) -> Self {
        let m = rows.len();
        let ncols = free.len();
        let stride = ncols + 1;
        let mut data = vec![0.0; (m + 2) * stride];
        for (i, (coeffs, b)) in rows.iter().enumerate() {
            for &(j, a) in coeffs {
                data[i * stride + j] += a;
            }
            data[i * stride + ncols] = *b;
            if let Some(art) = artificial {
                if *b < 0.0 {
                    data[i * stride + art] = -1.0;
                }
            }
        }
        for (j, c) in objective.iter().enumerate() {
            data[m * stride + j] = -c;
        }
        if let Some(art) = artificial {
            data[(m + 1) * stride + art] = 1.0;
        }
        Self {
            m,
            ncols,
            stride,
            data,
            row_label: (0..m).map(Label::Slack).collect(),
            col_label: (0..ncols).map(Label::Var).collect(),
            live_row: vec![true; m],
            live_col: vec![true; ncols],
            sign: vec![1.0; ncols],
            free,
            iterations: 0,
            limit: options.iteration_limit,
        }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.stride + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.ncols)
    }

    fn is_free(&self, label: Label) -> bool {
        matches!(label, Label::Var(j) if self.free[j])
    }

    fn key(&self, label: Label) -> usize {
        match label {
            Label::Var(j) => j,
            Label::Slack(i) => self.ncols + i,
        }
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let stride = self.stride;
        let p = self.at(r, s);
        let inv = 1.0 / p;
        let mut prow: Vec<f64> = self.data[r * stride..(r + 1) * stride]
            .iter()
            .map(|x| x * inv)
            .collect();
        prow[s] = inv;
        let update = |(i, row): (usize, &mut [f64])| {
            if i == r {
                row.copy_from_slice(&prow);
                return;
            }
            let f = row[s];
            if f == 0.0 {
                return;
            }
            for (x, y) in row.iter_mut().zip(&prow) {
                *x -= f * y;
            }
            row[s] = -f * inv;
        };
        if self.data.len() >= PARALLEL_CELLS {
            self.data.par_chunks_mut(stride).enumerate().for_each(update);
        } else {
            self.data.chunks_mut(stride).enumerate().for_each(update);
        }
        std::mem::swap(&mut self.row_label[r], &mut self.col_label[s]);
        self.iterations += 1;
    }

    fn negate_column(&mut self, s: usize) {
        for i in 0..self.m + 2 {
            self.data[i * self.stride + s] *= -1.0;
        }
        if let Label::Var(j) = self.col_label[s] {
            self.sign[j] = -self.sign[j];
        }
    }

    fn entering(&self, obj: usize, bland: bool) -> Option<(usize, bool)> {
        let mut best: Option<(usize, bool, f64)> = None;
        for s in 0..self.ncols {
            if !self.live_col[s] {
                continue;
            }
            let d = self.at(obj, s);
            let label = self.col_label[s];
            let (score, flip) = if self.is_free(label) {
                (d.abs(), d > 0.0)
            } else {
                (-d, false)
            };
            if score <= COST_TOL {
                continue;
            }
            let better = match best {
                None => true,
                Some((b, _, bs)) => {
                    if bland {
                        self.key(label) < self.key(self.col_label[b])
                    } else {
                        score > bs
                    }
                }
            };
            if better {
                best = Some((s, flip, score));
            }
        }
        best.map(|(s, flip, _)| (s, flip))
    }

    fn leaving(&self, s: usize, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for i in 0..self.m {
            if !self.live_row[i] || self.is_free(self.row_label[i]) {
                continue;
            }
            let a = self.at(i, s);
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.rhs(i).max(0.0) / a;
            let better = match best {
                None => true,
                Some((b, br, ba)) => {
                    let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br);
                    if tie {
                        if bland {
                            self.key(self.row_label[i]) < self.key(self.row_label[b])
                        } else {
                            a > ba
                        }
                    } else {
                        ratio < br
                    }
                }
            };
            if better {
                best = Some((i, ratio, a));
            }
        }
        best.map(|(i, ratio, _)| (i, ratio))
    }

    fn run(&mut self, obj: usize) -> Result<LpStatus> {
        let mut degenerate = 0usize;
        let mut bland = false;
        loop {
            if self.iterations >= self.limit {
                return Err(Error::IterationLimit(self.iterations));
            }
            let Some((s, flip)) = self.entering(obj, bland) else {
                return Ok(LpStatus::Optimal);
            };
            if flip {
                self.negate_column(s);
            }
            let Some((r, ratio)) = self.leaving(s, bland) else {
                return Ok(LpStatus::Unbounded);
            };
            if ratio <= 1e-12 {
                degenerate += 1;
                if degenerate > 10 * self.m.max(1) {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }
            self.pivot(r, s);
        }
    }

    /// Moves the phase-one variable out of the basis (or drops its row when
    /// it cannot move) and retires its column.
    fn retire_artificial(&mut self, art: usize) {
        if let Some(r) = (0..self.m).find(|&i| self.row_label[i] == Label::Var(art)) {
            let s = (0..self.ncols)
                .filter(|&s| self.live_col[s])
                .max_by(|&a, &b| self.at(r, a).abs().total_cmp(&self.at(r, b).abs()))
                .filter(|&s| self.at(r, s).abs() > PIVOT_TOL);
            match s {
                Some(s) => self.pivot(r, s),
                None => self.live_row[r] = false,
            }
        }
        if let Some(s) = (0..self.ncols).find(|&s| self.col_label[s] == Label::Var(art)) {
            self.live_col[s] = false;
        }
    }

    fn primal(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for i in 0..self.m {
            if let (true, Label::Var(j)) = (self.live_row[i], self.row_label[i]) {
                if j < n {
                    x[j] = self.sign[j] * self.rhs(i);
                }
            }
        }
        x
    }

    /// Re-solves the final basis against the original rows: nonbasic columns
    /// sit at zero and nonbasic slacks mark tight rows.
    fn refine(&self, rows: &[(Vec<(usize, f64)>, f64)], n: usize) -> Option<Vec<f64>> {
        let mut system: Vec<Vec<f64>> = Vec::with_capacity(n);
        for s in 0..self.ncols {
            if !self.live_col[s] {
                continue;
            }
            let mut eq = vec![0.0; n + 1];
            match self.col_label[s] {
                Label::Var(j) if j < n => eq[j] = 1.0,
                Label::Var(_) => continue,
                Label::Slack(i) => {
                    for &(j, a) in &rows[i].0 {
                        eq[j] += a;
                    }
                    eq[n] = rows[i].1;
                }
            }
            system.push(eq);
        }
        if system.len() != n {
            return None;
        }
        gauss_solve(system, n)
    }
}

fn gauss_solve(mut a: Vec<Vec<f64>>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        let (top, rest) = a.split_at_mut(col + 1);
        let prow = &top[col];
        let p = prow[col];
        rest.par_iter_mut().for_each(|row| {
            let f = row[col] / p;
            if f != 0.0 {
                for (x, y) in row[col..].iter_mut().zip(&prow[col..]) {
                    *x -= f * y;
                }
            }
        });
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = a[i][n];
        for j in i + 1..n {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp1() -> (LinearProgram, usize) {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", false);
        lp.set_objective(x, 1.0);
        (lp, x)
    }

    #[test]
    fn single_bound() {
        let (mut lp, x) = lp1();
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_rows() {
        let (mut lp, x) = lp1();
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, 0.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Ge, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
        assert_eq!(solve_lp(&lp).unwrap().require_optimal(), Err(Error::Infeasible));
    }

    #[test]
    fn unbounded_ray() {
        let (mut lp, x) = lp1();
        lp.add_constraint(vec![(x, 1.0)], Relation::Ge, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn textbook_two_phase() {
        // max 3x + 2y, x + y ≤ 4, x + 3y ≥ 6, x ≤ 3 → (3, 1), value 11.
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", false);
        let y = lp.add_variable("y", false);
        lp.set_objective(x, 3.0);
        lp.set_objective(y, 2.0);
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Le, 4.0);
        lp.add_constraint(vec![(x, 1.0), (y, 3.0)], Relation::Ge, 6.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, 3.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective - 11.0).abs() < 1e-10);
        assert!((sol.values[0] - 3.0).abs() < 1e-10 && (sol.values[1] - 1.0).abs() < 1e-10);
        assert!(sol.max_violation <= 1e-12);
    }

    #[test]
    fn free_variables_and_equalities() {
        // max -|x - 2| style: max t, t ≤ x - 2, t ≤ 2 - x, x free, x + z = 5, z ≥ 0.
        let mut lp = LinearProgram::new();
        let t = lp.add_variable("t", true);
        let x = lp.add_variable("x", true);
        let z = lp.add_variable("z", false);
        lp.set_objective(t, 1.0);
        lp.add_constraint(vec![(t, 1.0), (x, -1.0)], Relation::Le, -2.0);
        lp.add_constraint(vec![(t, 1.0), (x, 1.0)], Relation::Le, 2.0);
        lp.add_constraint(vec![(x, 1.0), (z, 1.0)], Relation::Eq, 5.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.objective.abs() < 1e-10);
        assert!((sol.values[1] - 2.0).abs() < 1e-10);
        assert!((sol.values[2] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn negative_free_optimum() {
        // max -x subject to x ≥ -3 with x free.
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", true);
        lp.set_objective(x, -1.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Ge, -3.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.values[0] + 3.0).abs() < 1e-12);
        assert!((sol.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under naive Dantzig pricing.
        let mut lp = LinearProgram::new();
        let v: Vec<usize> = (0..4).map(|i| lp.add_variable(format!("x{i}"), false)).collect();
        for (j, c) in [0.75, -150.0, 0.02, -6.0].into_iter().enumerate() {
            lp.set_objective(v[j], c);
        }
        lp.add_constraint(
            vec![(v[0], 0.25), (v[1], -60.0), (v[2], -0.04), (v[3], 9.0)],
            Relation::Le,
            0.0,
        );
        lp.add_constraint(
            vec![(v[0], 0.5), (v[1], -90.0), (v[2], -0.02), (v[3], 3.0)],
            Relation::Le,
            0.0,
        );
        lp.add_constraint(vec![(v[2], 1.0)], Relation::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective - 0.05).abs() < 1e-10);
    }

    #[test]
    fn iteration_limit() {
        let (mut lp, x) = lp1();
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, 1.0);
        let err = solve_lp_with(&lp, SimplexOptions { iteration_limit: 0 }).unwrap_err();
        assert_eq!(err, Error::IterationLimit(0));
    }
}
