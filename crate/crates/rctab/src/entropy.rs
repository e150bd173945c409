//! Maximum-entropy machinery over the transportation polytope.
//!
//! `f(x) = (x+1)·ln(x+1) − x·ln x` is the entropy of a geometric law with
//! mean `x`; `g(M) = Σ f(M_ij)` is strictly concave on the polytope of real
//! non-negative matrices with the given margins, so it has a unique
//! maximizer — the typical table `Z`. At the maximum, the first-order
//! condition gives the dual form `Z_ij = 1/(exp(λ_i + μ_j) − 1)`, which
//! also identifies `e^{g(Z)}` as an upper bound on the number of integer
//! tables and `Geom(Z_ij)` as the entry-wise sampling model.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::table::Margins;

/// Entropy of a geometric law with mean `x`; `f(0) = 0` by the limit
/// convention.
pub fn entropy_f(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("entropy_f({x}): x must be >= 0")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok((x + 1.0) * (x + 1.0).ln() - x * x.ln())
}

/// Sum of [`entropy_f`] over the entries of a real matrix.
pub fn entropy_g(entries: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for &x in entries {
        acc += entropy_f(x)?;
    }
    Ok(acc)
}

/// The entropy-optimal real table for a margin pair, with its dual
/// potentials.
///
/// Invariants at convergence: every `z[i][j] > 0`, row and column sums of
/// `z` match the margins within `residual`, and
/// `z_ij = 1/(exp(row_potentials[i] + col_potentials[j]) − 1)` holds
/// exactly (the solver parameterizes `z` through its duals). Duals are
/// gauge-fixed so the column potentials sum to zero.
#[derive(Clone, Debug, Serialize)]
pub struct TypicalTable {
    pub m: usize,
    pub n: usize,
    /// Row-major m×n maximizer.
    pub z: Vec<f64>,
    pub row_potentials: Vec<f64>,
    pub col_potentials: Vec<f64>,
    /// Max absolute violation of any margin constraint.
    pub residual: f64,
    /// Entropy value g(Z).
    pub g_z: f64,
    /// Dual-ascent sweeps performed.
    pub sweeps: u64,
}

impl TypicalTable {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.z[i * self.n + j]
    }

    /// Largest deviation between `z` and its dual form — zero up to
    /// rounding, since `z` is stored through the duals.
    pub fn dual_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.m {
            for j in 0..self.n {
                let s = self.row_potentials[i] + self.col_potentials[j];
                let d = (self.get(i, j) - 1.0 / s.exp_m1()).abs();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// JSON object `{Z, duals: {row, col}, residual, gZ}`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<f64>> = (0..self.m)
            .map(|i| self.z[i * self.n..(i + 1) * self.n].to_vec())
            .collect();
        serde_json::json!({
            "Z": rows,
            "duals": {"row": self.row_potentials, "col": self.col_potentials},
            "residual": self.residual,
            "gZ": self.g_z,
        })
    }
}

pub const TYPICAL_DEFAULT_TOL: f64 = 1e-10;
pub const TYPICAL_MAX_SWEEPS: u64 = 100_000;

/// Solve for the typical table by alternating dual ascent.
///
/// Column potentials are held fixed while each row potential is found by
/// monotone 1-D root finding so that its row of `Z` sums to the row margin;
/// then the roles swap. Each subproblem is strictly monotone in its
/// potential, and the alternation stops when the largest margin violation
/// falls below `tol`. Margins must be strictly positive.
pub fn typical_table(margins: &Margins, tol: f64, max_sweeps: u64) -> Result<TypicalTable> {
    if !margins.is_positive() {
        return Err(Error::Domain(
            "typical table requires strictly positive margins".into(),
        ));
    }
    let (m, n) = (margins.m(), margins.n());
    let row = margins.row();
    let col = margins.col();
    let total = margins.total() as f64;

    // constant start Z_ij = N/(mn): exact for uniform margins, neutral
    // otherwise
    let z0 = total / (m as f64 * n as f64);
    let s0 = ((z0 + 1.0) / z0).ln();
    let mut lam = vec![s0 / 2.0; m];
    let mut mu = vec![s0 / 2.0; n];

    let mut sweeps = 0u64;
    let mut residual = margin_residual(&lam, &mu, row, col);
    while residual > tol {
        if sweeps >= max_sweeps {
            return Err(Error::NoConvergence { residual, sweeps });
        }
        for (i, &target) in row.iter().enumerate() {
            lam[i] = solve_potential(&mu, target as f64, lam[i]);
        }
        for (j, &target) in col.iter().enumerate() {
            mu[j] = solve_potential(&lam, target as f64, mu[j]);
        }
        sweeps += 1;
        residual = margin_residual(&lam, &mu, row, col);
    }

    // gauge: column potentials sum to zero
    let shift = mu.iter().sum::<f64>() / n as f64;
    for l in lam.iter_mut() {
        *l += shift;
    }
    for u in mu.iter_mut() {
        *u -= shift;
    }

    let mut z = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            z[i * n + j] = 1.0 / (lam[i] + mu[j]).exp_m1();
        }
    }
    let g_z = entropy_g(&z)?;
    Ok(TypicalTable {
        m,
        n,
        z,
        row_potentials: lam,
        col_potentials: mu,
        residual,
        g_z,
        sweeps,
    })
}

/// Row sum of `Z` as a function of this side's potential, given the other
/// side's potentials.
fn line_sum(t: f64, other: &[f64]) -> f64 {
    other.iter().map(|&u| 1.0 / (t + u).exp_m1()).sum()
}

/// Find `t` with `Σ_j 1/(exp(t + other_j) − 1) = target`.
///
/// The sum decreases strictly from +∞ (as `t` approaches `−min(other)`
/// from above) to 0, so bisection on a bracket is enough.
fn solve_potential(other: &[f64], target: f64, guess: f64) -> f64 {
    let floor = -other.iter().cloned().fold(f64::INFINITY, f64::min);
    // lower end: walk down toward the pole until the sum exceeds the target
    let mut step = 1.0;
    let mut lo = if guess > floor { guess } else { floor + 1.0 };
    while line_sum(lo, other) < target {
        let next = floor + (lo - floor) / 4.0;
        if next <= floor || !(line_sum(next, other) > line_sum(lo, other)) {
            // degenerate: pole too close in f64; fall back to tiny offset
            lo = floor + f64::EPSILON * floor.abs().max(1.0);
            break;
        }
        lo = next;
    }
    let mut hi = lo.max(guess) + step;
    while line_sum(hi, other) > target {
        step *= 2.0;
        hi += step;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if line_sum(mid, other) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn margin_residual(lam: &[f64], mu: &[f64], row: &[u64], col: &[u64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, &r) in row.iter().enumerate() {
        worst = worst.max((line_sum(lam[i], mu) - r as f64).abs());
    }
    for (j, &c) in col.iter().enumerate() {
        worst = worst.max((line_sum(mu[j], lam) - c as f64).abs());
    }
    worst
}

/// Entropy upper bound on the table count: `#M(r,c) ≤ exp(g(Z))`. The
/// matching lower bound carries an unspecified absolute constant, so it is
/// reported symbolically only.
#[derive(Clone, Debug, Serialize)]
pub struct BarvinokBounds {
    pub g_z: f64,
    /// ln of the upper bound = g(Z).
    pub log_upper: f64,
    /// The lower bound `N^{−γ(m+n)}·e^{g(Z)}` with γ an unspecified
    /// absolute constant.
    pub log_lower_symbolic: String,
}

pub fn barvinok_bounds(margins: &Margins, tol: f64) -> Result<BarvinokBounds> {
    let tt = typical_table(margins, tol, TYPICAL_MAX_SWEEPS)?;
    Ok(BarvinokBounds {
        g_z: tt.g_z,
        log_upper: tt.g_z,
        log_lower_symbolic: format!(
            "g(Z) - gamma*(m+n)*ln(N) = {:.6} - gamma*{}*{:.6} (gamma unspecified)",
            tt.g_z,
            margins.m() + margins.n(),
            (margins.total() as f64).ln()
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_exact;
    use crate::table::UniformMargins;
    use proptest::prelude::*;

    fn margins(row: &[u64], col: &[u64]) -> Margins {
        Margins::new(row.to_vec(), col.to_vec()).unwrap()
    }

    #[test]
    fn entropy_f_examples() {
        assert_eq!(entropy_f(0.0).unwrap(), 0.0);
        assert!((entropy_f(1.0).unwrap() - 2.0 * 2f64.ln().powi(1)).abs() < 1e-15);
        assert!((entropy_f(2.0).unwrap() - (3.0 * 3f64.ln() - 2.0 * 2f64.ln())).abs() < 1e-15);
        assert!(entropy_f(-0.5).is_err());
    }

    #[test]
    fn entropy_g_examples() {
        let c = 3.0;
        let mat = vec![c; 16];
        assert!((entropy_g(&mat).unwrap() - 16.0 * entropy_f(c).unwrap()).abs() < 1e-12);
        assert_eq!(entropy_g(&vec![0.0; 9]).unwrap(), 0.0);
        assert!((entropy_g(&[1.0, 1.0, 1.0, 1.0]).unwrap() - 8.0 * 2f64.ln()).abs() < 1e-12);
        assert!(entropy_g(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn typical_uniform_is_constant() {
        for n in [2usize, 5, 10] {
            for c in [1u64, 2, 3] {
                let tt = typical_table(
                    &UniformMargins::new(n, c).unwrap().margins(),
                    1e-10,
                    TYPICAL_MAX_SWEEPS,
                )
                .unwrap();
                for i in 0..n {
                    for j in 0..n {
                        assert!(
                            (tt.get(i, j) - c as f64).abs() < 1e-9,
                            "n={n} c={c} entry {i},{j} = {}",
                            tt.get(i, j)
                        );
                    }
                }
                assert!(tt.residual < 1e-10);
            }
        }
    }

    #[test]
    fn typical_single_row_is_the_column_margin() {
        let tt = typical_table(&margins(&[10], &[1, 2, 3, 4]), 1e-10, TYPICAL_MAX_SWEEPS).unwrap();
        for (j, &c) in [1.0, 2.0, 3.0, 4.0].iter().enumerate() {
            assert!((tt.get(0, j) - c).abs() < 1e-8, "col {j}: {}", tt.get(0, j));
        }
    }

    #[test]
    fn typical_square_symmetric_case() {
        let tt = typical_table(&margins(&[2, 2], &[2, 2]), 1e-12, TYPICAL_MAX_SWEEPS).unwrap();
        for v in &tt.z {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn typical_rejects_zero_margins() {
        assert!(typical_table(&margins(&[0, 2], &[1, 1]), 1e-10, 100).is_err());
    }

    #[test]
    fn typical_nonuniform_converges_and_is_dual_consistent() {
        let m = margins(&[7, 1, 4], &[2, 9, 1]);
        let tt = typical_table(&m, 1e-11, TYPICAL_MAX_SWEEPS).unwrap();
        assert!(tt.residual <= 1e-11);
        assert!(tt.dual_residual() <= 1e-10);
        // row/col sums recomputed from z
        for i in 0..3 {
            let s: f64 = (0..3).map(|j| tt.get(i, j)).sum();
            assert!((s - m.row()[i] as f64).abs() < 1e-9);
        }
        for j in 0..3 {
            let s: f64 = (0..3).map(|i| tt.get(i, j)).sum();
            assert!((s - m.col()[j] as f64).abs() < 1e-9);
        }
        for &z in &tt.z {
            assert!(z > 0.0);
        }
    }

    #[test]
    fn typical_permutation_equivariance() {
        let a = typical_table(&margins(&[5, 2], &[3, 4]), 1e-11, TYPICAL_MAX_SWEEPS).unwrap();
        let b = typical_table(&margins(&[2, 5], &[4, 3]), 1e-11, TYPICAL_MAX_SWEEPS).unwrap();
        // b is a with rows and columns swapped
        for i in 0..2 {
            for j in 0..2 {
                assert!((a.get(i, j) - b.get(1 - i, 1 - j)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn perturbations_lower_entropy() {
        // strict concavity: shifting mass around a 2x2 cycle of Z drops g
        let m = margins(&[6, 3], &[4, 5]);
        let tt = typical_table(&m, 1e-12, TYPICAL_MAX_SWEEPS).unwrap();
        let g0 = tt.g_z;
        for delta in [0.01f64, 0.1, 0.5] {
            let mut pert = tt.z.clone();
            let d = delta.min(pert[1] * 0.9).min(pert[2] * 0.9);
            pert[0] += d;
            pert[3] += d;
            pert[1] -= d;
            pert[2] -= d;
            let g = entropy_g(&pert).unwrap();
            assert!(g < g0, "delta {delta}: g {g} !< g0 {g0}");
        }
    }

    #[test]
    fn barvinok_upper_bound_examples() {
        // n=2, C=2: g(Z) = 4 f(2), upper bound >= exact count 5
        let u = UniformMargins::new(2, 2).unwrap().margins();
        let b = barvinok_bounds(&u, 1e-10).unwrap();
        assert!((b.g_z - 4.0 * entropy_f(2.0).unwrap()).abs() < 1e-8);
        assert!(b.log_upper >= count_exact(&u).ln());

        let m11 = margins(&[1, 1], &[1, 1]);
        let b = barvinok_bounds(&m11, 1e-10).unwrap();
        assert!(b.log_upper >= 2f64.ln());

        let single = margins(&[4], &[1, 1, 2]);
        let b = barvinok_bounds(&single, 1e-10).unwrap();
        assert!(b.log_upper >= 0.0); // exact count is 1
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn f_is_strictly_concave(x in 0.001f64..100.0, y in 0.001f64..100.0) {
            prop_assume!((x - y).abs() > 1e-9);
            let mid = entropy_f((x + y) / 2.0).unwrap();
            let avg = (entropy_f(x).unwrap() + entropy_f(y).unwrap()) / 2.0;
            prop_assert!(mid > avg);
        }

        #[test]
        fn upper_bound_dominates_exact_count(
            rows in proptest::collection::vec(1u64..5, 1..4),
            extra in 0u64..3,
        ) {
            let total: u64 = rows.iter().sum();
            let n_cols = (1 + extra as usize).min(total as usize);
            let cols = crate::counting::balanced_margin(total, n_cols);
            let m = margins(&rows, &cols);
            let b = barvinok_bounds(&m, 1e-10).unwrap();
            let exact = count_exact(&m);
            prop_assert!(exact.ln() <= b.log_upper + 1e-8);
        }
    }
}
