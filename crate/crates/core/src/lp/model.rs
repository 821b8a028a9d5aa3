use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Variable {
    pub name: String,
    /// Free variables are unbounded; all others are `≥ 0`.
    pub free: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Violation scaled by the largest coefficient magnitude.
    pub fn scaled_violation(&self, x: &[f64]) -> f64 {
        let scale = self
            .coeffs
            .iter()
            .fold(0.0f64, |m, &(_, a)| m.max(a.abs()))
            .max(f64::MIN_POSITIVE);
        let lhs = self.activity(x);
        let raw = match self.relation {
            Relation::Le => lhs - self.rhs,
            Relation::Ge => self.rhs - lhs,
            Relation::Eq => (lhs - self.rhs).abs(),
        };
        raw.max(0.0) / scale
    }
}

/// `maximize c·x` over linear rows, with free or non-negative columns.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LinearProgram {
    pub variables: Vec<Variable>,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, free: bool) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            free,
        });
        self.objective.push(0.0);
        self.variables.len() - 1
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        debug_assert!(coeffs.iter().all(|&(j, a)| j < self.variables.len() && a.is_finite()));
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        crate::numeric::kahan_sum(self.objective.iter().zip(x).map(|(c, x)| c * x))
    }

    /// Largest scaled row violation, also counting sign bounds.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .constraints
            .iter()
            .map(|c| c.scaled_violation(x))
            .fold(0.0, f64::max);
        let bounds = self
            .variables
            .iter()
            .zip(x)
            .filter(|(v, _)| !v.free)
            .map(|(_, &x)| (-x).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgs("non-finite objective coefficient".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() || c.coeffs.iter().any(|(_, a)| !a.is_finite()) {
                return Err(Error::InvalidArgs(format!("non-finite entry in row {i}")));
            }
            if let Some(&(j, _)) = c.coeffs.iter().find(|(j, _)| *j >= self.variables.len()) {
                return Err(Error::InvalidArgs(format!("row {i} references column {j}")));
            }
        }
        Ok(())
    }

    /// Fixed-layout MPS text. MPS minimizes, so the objective row holds `-c`.
    /// Columns and rows are renamed `C0000001`, `R0000001`, ... to fit the
    /// eight-character name fields.
    pub fn to_mps(&self, name: &str) -> String {
        let mut out = String::new();
        let short: String = name.chars().filter(|c| !c.is_whitespace()).take(8).collect();
        let _ = writeln!(out, "NAME          {short}");
        let _ = writeln!(out, "* objective negated: minimize -c.x");
        let _ = writeln!(out, "ROWS");
        let _ = writeln!(out, " N  COST");
        for (i, c) in self.constraints.iter().enumerate() {
            let kind = match c.relation {
                Relation::Le => "L",
                Relation::Ge => "G",
                Relation::Eq => "E",
            };
            let _ = writeln!(out, " {kind:<2} {}", row_name(i));
        }
        let mut columns: Vec<Vec<(String, f64)>> = vec![Vec::new(); self.variables.len()];
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                columns[j].push(("COST".to_string(), -c));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            for &(j, a) in &c.coeffs {
                if a != 0.0 {
                    columns[j].push((row_name(i), a));
                }
            }
        }
        let _ = writeln!(out, "COLUMNS");
        for (j, entries) in columns.iter().enumerate() {
            for (row, value) in entries {
                let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", col_name(j), row, fmt12(*value));
            }
        }
        let _ = writeln!(out, "RHS");
        for (i, c) in self.constraints.iter().enumerate() {
            if c.rhs != 0.0 {
                let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", "RHS", row_name(i), fmt12(c.rhs));
            }
        }
        if self.variables.iter().any(|v| v.free) {
            let _ = writeln!(out, "BOUNDS");
            for (j, v) in self.variables.iter().enumerate() {
                if v.free {
                    let _ = writeln!(out, " FR {:<8}  {:<8}", "BND", col_name(j));
                }
            }
        }
        let _ = writeln!(out, "ENDATA");
        out
    }
}

fn row_name(i: usize) -> String {
    format!("R{:07}", i + 1)
}

fn col_name(j: usize) -> String {
    format!("C{:07}", j + 1)
}

/// Shortest of the plain and exponent forms that fits twelve columns.
fn fmt12(x: f64) -> String {
    let plain = format!("{x}");
    if plain.len() <= 12 {
        return plain;
    }
    for digits in (0..=7).rev() {
        let s = format!("{x:.digits$e}");
        if s.len() <= 12 {
            return s;
        }
    }
    format!("{x:.0e}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub values: Vec<f64>,
    pub iterations: u64,
    /// Largest scaled constraint violation of `values`.
    pub max_violation: f64,
}

impl LpSolution {
    pub fn require_optimal(self) -> Result<Self> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            LpStatus::Infeasible => Err(Error::Infeasible),
            LpStatus::Unbounded => Err(Error::Unbounded),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_fits() {
        for x in [1.0, -0.5, 1.0 / 3.0, -1e-300, 123456789.0123, 729.0] {
            let s = fmt12(x);
            assert!(s.len() <= 12, "{s}");
            let back: f64 = s.parse().unwrap();
            assert!((back - x).abs() <= 1e-5 * x.abs());
        }
    }

    #[test]
    fn mps_layout() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", false);
        let y = lp.add_variable("y", true);
        lp.set_objective(x, 1.0);
        lp.add_constraint(vec![(x, 1.0), (y, 2.0)], Relation::Le, 4.0);
        lp.add_constraint(vec![(y, 1.0)], Relation::Ge, -1.0);
        let mps = lp.to_mps("toy");
        let expected = "\
NAME          toy
* objective negated: minimize -c.x
ROWS
 N  COST
 L  R0000001
 G  R0000002
COLUMNS
    C0000001  COST                -1
    C0000001  R0000001             1
    C0000002  R0000001             2
    C0000002  R0000002             1
RHS
    RHS       R0000001             4
    RHS       R0000002            -1
BOUNDS
 FR BND       C0000002
ENDATA
";
        assert_eq!(mps, expected);
    }

    #[test]
    fn violation_is_scaled() {
        let c = Constraint {
            coeffs: vec![(0, 100.0)],
            relation: Relation::Le,
            rhs: 100.0,
        };
        assert!((c.scaled_violation(&[1.01]) - 0.01).abs() < 1e-12);
        assert_eq!(c.scaled_violation(&[0.5]), 0.0);
    }
}
