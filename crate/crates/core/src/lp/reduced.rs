//! Symmetry-reduced program for cactus networks with per-class uniform
//! states. Coefficients depend only on how many Φ edges fall in each class.

use serde::Serialize;

use super::model::{LinearProgram, Relation};
use super::simplex::solve_lp;
use super::ssw::SolverStats;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::CactusDecomposition;
use crate::numeric::binomial;
use crate::witness::{NetworkState, Witness};

/// Mixed-radix enumeration of tuples `0 ≤ t_i ≤ bound_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Radix {
    bounds: Vec<usize>,
}

impl Radix {
    fn new(bounds: Vec<usize>) -> Self {
        Self { bounds }
    }

    fn len(&self) -> usize {
        self.bounds.iter().map(|b| b + 1).product()
    }

    fn index(&self, t: &[usize]) -> usize {
        t.iter()
            .zip(&self.bounds)
            .rev()
            .fold(0, |acc, (&x, &b)| acc * (b + 1) + x)
    }

    fn tuple(&self, mut index: usize) -> Vec<usize> {
        self.bounds
            .iter()
            .map(|&b| {
                let x = index % (b + 1);
                index /= b + 1;
                x
            })
            .collect()
    }

    fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(|i| self.tuple(i))
    }
}

/// `C(a, s, t) = Σ_j C(s,j) C(t-s, a-j) (-1)^j (d+1)^{s-j} (d-1)^{t-a-s+j}`:
/// the sum of `x_T[T']` over all `a`-subsets `T` of a `t`-edge class part
/// when `T'` has `s` of those edges.
pub fn class_overlap(d: u32, a: usize, s: usize, t: usize) -> f64 {
    let df = f64::from(d);
    let mut sum = 0.0;
    for j in 0..=a.min(s) {
        if a - j > t - s || t + j < a + s {
            continue;
        }
        let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
        sum += binomial(s, j)
            * binomial(t - s, a - j)
            * sign
            * (df + 1.0).powi((s - j) as i32)
            * (df - 1.0).powi((t + j - a - s) as i32);
    }
    sum
}

/// Number of reduced columns for one class: `Σ_k (c - k + 1)(k + 1)` over
/// the admissible cut counts `k` (all for the acyclic class, even ones for
/// cycles).
pub fn class_factor(size: usize, cycle: bool) -> usize {
    (0..=size)
        .filter(|k| !cycle || k % 2 == 0)
        .map(|k| (size - k + 1) * (k + 1))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReducedSolution {
    pub bound: f64,
    /// `(count tuple, w_t)` pairs.
    pub coefficients: Vec<(Vec<usize>, f64)>,
    pub stats: SolverStats,
}

#[derive(Clone, Debug)]
pub struct ReducedProgram {
    pub lp: LinearProgram,
    d: u32,
    sizes: Vec<usize>,
    class_of_edge: Vec<usize>,
    w_radix: Radix,
}

impl ReducedProgram {
    pub fn class_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn solve(&self) -> Result<ReducedSolution> {
        let sol = solve_lp(&self.lp)?.require_optimal()?;
        let coefficients = self
            .w_radix
            .tuples()
            .enumerate()
            .map(|(i, t)| (t, sol.values[i]))
            .collect();
        Ok(ReducedSolution {
            bound: sol.objective,
            coefficients,
            stats: SolverStats {
                rows: self.lp.num_constraints(),
                columns: self.lp.num_variables(),
                iterations: sol.iterations,
                max_violation: sol.max_violation,
            },
        })
    }

    /// The dense witness `w_T = w_{t(T)}`.
    pub fn expand(&self, solution: &ReducedSolution, caps: &Caps) -> Result<Witness> {
        let edges = self.class_of_edge.len();
        caps.check_bits("witness coefficient bits (edges)", edges)?;
        let coeffs = (0..1usize << edges)
            .map(|t| {
                let mut counts = vec![0; self.sizes.len()];
                for (e, &c) in self.class_of_edge.iter().enumerate() {
                    if t >> e & 1 == 1 {
                        counts[c] += 1;
                    }
                }
                solution.coefficients[self.w_radix.index(&counts)].1
            })
            .collect();
        Witness::new(self.d, coeffs)
    }
}

/// Builds the reduced negativity program. The state must be a product state
/// whose fidelity is constant on each class.
pub fn build_reduced_lp(
    dec: &CactusDecomposition,
    d: u32,
    state: &NetworkState,
    caps: &Caps,
) -> Result<ReducedProgram> {
    if d < 2 || state.local_dim() != d {
        return Err(Error::InvalidArgs(format!(
            "local dimension {d} does not match the state ({})",
            state.local_dim()
        )));
    }
    let classes = dec.classes();
    let edges = dec.acyclic_class.universe();
    if state.edge_count() != edges {
        return Err(Error::DimensionMismatch(format!(
            "state on {} edges, network has {edges}",
            state.edge_count()
        )));
    }
    let fids = state
        .fidelities()
        .ok_or_else(|| Error::InvalidState("reduced programs need a product state".into()))?;
    let mut class_fid = Vec::with_capacity(classes.len());
    for class in &classes {
        let mut it = class.indices();
        let f = it.next().map_or(0.0, |e| fids[e]);
        if let Some(e) = class.indices().find(|&e| fids[e] != f) {
            return Err(Error::NonUniformState(e));
        }
        class_fid.push(f);
    }

    let sizes: Vec<usize> = classes.iter().map(|c| c.count()).collect();
    let w_radix = Radix::new(sizes.clone());
    let cut_radix = Radix::new(sizes.clone());
    let cut_types: Vec<Vec<usize>> = cut_radix
        .tuples()
        .filter(|k| k.iter().any(|&x| x > 0))
        .filter(|k| k.iter().skip(1).all(|x| x % 2 == 0))
        .collect();

    let mut columns = w_radix.len();
    let mut rows = 0;
    for k in &cut_types {
        let block: usize = k.iter().zip(&sizes).map(|(&k, &c)| (k + 1) * (c - k + 1)).product();
        columns += block;
        rows += 3 * block;
    }
    let cells = (rows as u64 + 2) * (columns as u64 + 1);
    if cells > caps.lp_cells {
        return Err(Error::CapExceeded {
            what: format!("simplex tableau cells ({rows} rows x {columns} columns)"),
            requested: cells,
            limit: caps.lp_cells,
        });
    }

    let mut lp = LinearProgram::new();
    for t in w_radix.tuples() {
        let weight: f64 = t
            .iter()
            .zip(&sizes)
            .zip(&class_fid)
            .map(|((&t, &c), &f)| binomial(c, t) * f.powi(t as i32) * (1.0 - f).powi((c - t) as i32))
            .product();
        let j = lp.add_variable(format!("w{t:?}"), true);
        lp.set_objective(j, -weight);
    }

    let df = f64::from(d);
    for k in &cut_types {
        let a_radix = Radix::new(k.clone());
        let b_radix = Radix::new(sizes.iter().zip(k).map(|(c, k)| c - k).collect());
        let base = lp.num_variables();
        for a in a_radix.tuples() {
            for b in b_radix.tuples() {
                lp.add_variable(format!("q{k:?}{a:?}{b:?}"), true);
            }
        }
        let col = |a: &[usize], b: &[usize]| base + a_radix.index(a) * b_radix.len() + b_radix.index(b);
        let cap = df.powi(k.iter().sum::<usize>() as i32);
        for b in b_radix.tuples() {
            for s in a_radix.tuples() {
                let coeffs: Vec<(usize, f64)> = a_radix
                    .tuples()
                    .map(|a| {
                        let x: f64 = (0..sizes.len())
                            .map(|i| class_overlap(d, a[i], s[i], k[i]))
                            .product();
                        (col(&a, &b), x)
                    })
                    .filter(|&(_, x)| x != 0.0)
                    .collect();
                lp.add_constraint(coeffs.clone(), Relation::Le, cap);
                lp.add_constraint(coeffs, Relation::Ge, 0.0);
            }
        }
        for a in a_radix.tuples() {
            for b in b_radix.tuples() {
                let sum: Vec<usize> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                lp.add_constraint(
                    vec![(col(&a, &b), 1.0), (w_radix.index(&sum), -1.0)],
                    Relation::Le,
                    0.0,
                );
            }
        }
    }

    Ok(ReducedProgram {
        lp,
        d,
        sizes,
        class_of_edge: dec.class_of_edges(),
        w_radix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cactus_decomposition, Network};
    use crate::witness::tree_negativity;

    #[test]
    fn radix_round_trip() {
        let r = Radix::new(vec![2, 0, 3]);
        assert_eq!(r.len(), 12);
        for (i, t) in r.tuples().enumerate() {
            assert_eq!(r.index(&t), i);
        }
    }

    #[test]
    fn class_overlap_brute_force() {
        // Sum x_T[T'] over all a-subsets T of a t-set, T' fixed with s elements.
        for d in 2..4 {
            let df = f64::from(d);
            for t in 0..5usize {
                for s in 0..=t {
                    let tp = (1usize << s) - 1;
                    for a in 0..=t {
                        let mut want = 0.0;
                        for set in 0..1usize << t {
                            if set.count_ones() as usize != a {
                                continue;
                            }
                            let rest = ((1 << t) - 1) & !set;
                            let sign = if (set & tp).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                            want += sign
                                * (df + 1.0).powi((rest & tp).count_ones() as i32)
                                * (df - 1.0).powi((rest & !tp).count_ones() as i32);
                        }
                        assert!((class_overlap(d, a, s, t) - want).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn bilocal_counts() {
        let dec = cactus_decomposition(&Network::path(2)).unwrap();
        let state = NetworkState::isotropic(2, 2, 0.9).unwrap();
        let prog = build_reduced_lp(&dec, 2, &state, &Caps::default()).unwrap();
        assert_eq!(prog.lp.num_variables(), 10);
        assert_eq!(prog.lp.num_constraints(), 21);
        let sol = prog.solve().unwrap();
        assert_eq!(sol.coefficients.len(), 3);
        assert!((sol.bound - tree_negativity(2, 0.9, 2)).abs() < 1e-8);
    }

    #[test]
    fn class_factor_closed_forms() {
        for c in 0..12usize {
            assert_eq!(class_factor(c, false), (c + 1) * (c + 2) * (c + 3) / 6);
            let h = c / 2;
            // (⌊c/2⌋ + 1)(c + 1 + ⌊c/2⌋ (3c - 4⌊c/2⌋ - 2)/3), kept in thirds.
            let thirds = (h + 1) * (3 * (c + 1) + h * (3 * c - 4 * h) - 2 * h);
            assert_eq!(3 * class_factor(c, true), thirds);
        }
    }

    #[test]
    fn rejects_non_uniform_state() {
        let dec = cactus_decomposition(&Network::ring(3)).unwrap();
        let state = NetworkState::from_visibilities(2, &[0.9, 0.9, 0.8]).unwrap();
        let err = build_reduced_lp(&dec, 2, &state, &Caps::default()).unwrap_err();
        assert_eq!(err, Error::NonUniformState(2));
    }
}
