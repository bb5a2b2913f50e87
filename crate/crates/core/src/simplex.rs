//! Dense two-phase simplex for small linear programs in standard form:
//! minimize `c.x` subject to `A x = b`, `x >= 0`.
//!
//! Entering columns follow the most negative reduced cost, falling back to
//! Bland's lowest-index rule during runs of degenerate pivots so the method
//! cannot cycle. Leaving rows break ratio ties by lowest basic index. The
//! tableau is rebuilt from the original data every few pivots and before
//! optimality is declared, so rounding does not accumulate; basic values that
//! the rebuild leaves slightly negative are clipped to zero so a later ratio
//! test cannot push the basis far outside the feasible region. An iteration
//! cap turns any remaining stall into an error.

use faer::linalg::solvers::Solve;
use faer::Mat;

/// Smallest pivot element accepted; smaller entries are treated as elimination noise.
const PIVOT_EPS: f64 = 1e-7;
const COST_EPS: f64 = 1e-12;
/// Consecutive degenerate pivots after which entering columns switch from the
/// most negative reduced cost to Bland's lowest index.
const BLAND_AFTER: usize = 50;
/// Ratios closer than this are ties, broken by Bland's lowest index.
const RATIO_TIE: f64 = 1e-14;
const PHASE_ONE_TOL: f64 = 1e-10;
/// Pivots between rebuilds of the tableau from the original rows.
const REFRESH_EVERY: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
    Stalled,
}

enum Phase {
    Optimal,
    Unbounded,
    Stalled,
}

struct Tableau {
    /// Initial rows `[A | I | b]` with signs flipped so that `b >= 0`.
    original: Vec<Vec<f64>>,
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
    /// Costs of the current phase over all `width` columns.
    phase_cost: Vec<f64>,
    /// Reduced costs, with minus the objective value in the last slot.
    cost: Vec<f64>,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
    }

    fn set_phase(&mut self, phase_cost: Vec<f64>) {
        self.phase_cost = phase_cost;
        self.price();
    }

    /// Recomputes reduced costs from the phase costs and the current rows.
    fn price(&mut self) {
        let mut cost = self.phase_cost.clone();
        cost.push(0.0);
        for (row, &j) in self.rows.iter().zip(&self.basis) {
            let cb = self.phase_cost[j];
            if cb != 0.0 {
                cost.iter_mut().zip(row).for_each(|(v, t)| *v -= cb * t);
            }
        }
        self.cost = cost;
    }

    /// Rebuilds the rows as `B^-1 [A | I | b]` for the current basis and clips
    /// negative basic values. Keeps the old rows if the basis matrix is
    /// numerically singular.
    fn refresh(&mut self) {
        let m = self.rows.len();
        let basis_matrix = Mat::from_fn(m, m, |i, r| self.original[i][self.basis[r]]);
        let data = Mat::from_fn(m, self.width + 1, |i, j| self.original[i][j]);
        let solved = basis_matrix.partial_piv_lu().solve(&data);
        let fresh: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..=self.width).map(|j| solved[(i, j)]).collect())
            .collect();
        let consistent = fresh.iter().flatten().all(|v| v.is_finite())
            && fresh
                .iter()
                .zip(&self.basis)
                .enumerate()
                .all(|(i, (row, &j))| {
                    (0..m)
                        .all(|r| (row[self.basis[r]] - if r == i { 1.0 } else { 0.0 }).abs() < 1e-8)
                        && (row[j] - 1.0).abs() < 1e-8
                });
        if consistent {
            self.rows = fresh;
            for row in &mut self.rows {
                row[self.width] = row[self.width].max(0.0);
            }
            self.price();
        }
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row, &pivot_row, col);
            }
        }
        eliminate(&mut self.cost, &pivot_row, col);
        self.basis[r] = col;
    }

    /// Pivots over the first `allowed` columns until no reduced cost is negative.
    fn optimize(&mut self, allowed: usize) -> Phase {
        let limit = 50 * (self.rows.len() + self.width);
        let mut degenerate_run = 0;
        let mut since_refresh = 0;
        for _ in 0..limit {
            if since_refresh >= REFRESH_EVERY {
                self.refresh();
                since_refresh = 0;
            }
            let improving = (0..allowed).filter(|&j| self.cost[j] < -COST_EPS);
            let entering = if degenerate_run < BLAND_AFTER {
                improving.min_by(|&a, &b| self.cost[a].total_cmp(&self.cost[b]))
            } else {
                improving.min()
            };
            let Some(col) = entering else {
                if since_refresh == 0 {
                    return Phase::Optimal;
                }
                // Confirm optimality on freshly computed rows.
                self.refresh();
                since_refresh = 0;
                continue;
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i).max(0.0) / a;
                    let better = match best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < br - RATIO_TIE
                                || (ratio <= br + RATIO_TIE && self.basis[i] < self.basis[bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, ratio)) => {
                    degenerate_run = if ratio <= RATIO_TIE {
                        degenerate_run + 1
                    } else {
                        0
                    };
                    self.pivot(r, col);
                    since_refresh += 1;
                }
                None => return Phase::Unbounded,
            }
        }
        Phase::Stalled
    }
}

fn eliminate(row: &mut [f64], pivot_row: &[f64], col: usize) {
    let f = row[col];
    if f != 0.0 {
        row.iter_mut().zip(pivot_row).for_each(|(v, p)| *v -= f * p);
    }
}

pub(crate) fn solve(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert_eq!(b.len(), m);
    let width = n + m;

    let mut rows = Vec::with_capacity(m);
    for (i, (row, &bi)) in a.iter().zip(b).enumerate() {
        debug_assert_eq!(row.len(), n);
        let sign = if bi < 0.0 { -1.0 } else { 1.0 };
        let mut t = vec![0.0; width + 1];
        for (j, &v) in row.iter().enumerate() {
            t[j] = sign * v;
        }
        t[n + i] = 1.0;
        t[width] = sign * bi;
        rows.push(t);
    }
    let mut tab = Tableau {
        original: rows.clone(),
        rows,
        basis: (n..n + m).collect(),
        width,
        phase_cost: Vec::new(),
        cost: Vec::new(),
    };

    // Phase one: minimize the sum of artificials.
    let mut artificial = vec![0.0; width];
    artificial[n..].iter_mut().for_each(|v| *v = 1.0);
    tab.set_phase(artificial);
    if let Phase::Stalled = tab.optimize(n) {
        return LpOutcome::Stalled;
    }
    if -tab.cost[width] > PHASE_ONE_TOL {
        return LpOutcome::Infeasible;
    }
    // Drive remaining artificials out of the basis where possible.
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| tab.rows[r][j].abs() > PIVOT_EPS) {
                tab.pivot(r, col);
            }
        }
    }

    // Phase two on the true objective; artificials may no longer enter.
    let mut true_cost = c.to_vec();
    true_cost.resize(width, 0.0);
    tab.set_phase(true_cost);
    match tab.optimize(n) {
        Phase::Optimal => {}
        Phase::Unbounded => return LpOutcome::Unbounded,
        Phase::Stalled => return LpOutcome::Stalled,
    }
    let mut x = vec![0.0; n];
    for (r, &j) in tab.basis.iter().enumerate() {
        if j < n {
            x[j] = tab.rhs(r).max(0.0);
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { x, value }
}
