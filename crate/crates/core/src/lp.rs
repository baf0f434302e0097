//! Phase-one simplex for small dense feasibility problems.
//!
//! The only question asked of it is whether `A x = b, x >= 0` has a solution,
//! answered through the minimal L1 norm of the artificial residual. Bland's
//! rule keeps the pivoting finite on the degenerate systems that vertex
//! membership tests produce.

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 50_000;

/// Minimal `sum |A x - b|` over `x >= 0`, computed by phase one of the simplex
/// method. `a` is row-major with every row of equal length.
pub(crate) fn min_residual(a: &[Vec<f64>], b: &[f64]) -> f64 {
    let rows = a.len();
    assert_eq!(rows, b.len(), "row count mismatch");
    if rows == 0 {
        return 0.0;
    }
    let vars = a[0].len();
    let cols = vars + rows + 1;
    let rhs = cols - 1;

    let mut tab = vec![vec![0.0; cols]; rows];
    for (i, row) in a.iter().enumerate() {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..vars {
            tab[i][j] = sign * row[j];
        }
        tab[i][vars + i] = 1.0;
        tab[i][rhs] = sign * b[i];
    }
    let mut basis: Vec<usize> = (vars..vars + rows).collect();

    // reduced costs of the phase-one objective (sum of artificials)
    let mut cost = vec![0.0; cols];
    for row in &tab {
        for j in 0..vars {
            cost[j] -= row[j];
        }
        cost[rhs] -= row[rhs];
    }

    for _ in 0..MAX_PIVOTS {
        let Some(enter) = (0..cols - 1).find(|&j| cost[j] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..rows {
            let coef = tab[i][enter];
            if coef > PIVOT_EPS {
                let ratio = tab[i][rhs] / coef;
                let better =
                    ratio < best - 1e-15 || (ratio <= best + 1e-15 && leave.is_some_and(|l| basis[i] < basis[l]));
                if leave.is_none() || better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        // The phase-one objective is bounded below, so a column with a
        // negative reduced cost always has a positive entry.
        let Some(pr) = leave else { break };

        let piv = tab[pr][enter];
        for v in tab[pr].iter_mut() {
            *v /= piv;
        }
        let pivot_row = tab[pr].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != pr {
                let factor = row[enter];
                if factor != 0.0 {
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= factor * p;
                    }
                }
            }
        }
        let factor = cost[enter];
        for (v, p) in cost.iter_mut().zip(&pivot_row) {
            *v -= factor * p;
        }
        basis[pr] = enter;
    }

    basis.iter().zip(&tab).filter(|(&var, _)| var >= vars).map(|(_, row)| row[rhs].max(0.0)).sum()
}

/// Whether `target` is a convex combination of `points`, up to an L1
/// residual of `tol`.
pub(crate) fn in_convex_hull(points: &[&[f64]], target: &[f64], tol: f64) -> bool {
    if points.is_empty() {
        return false;
    }
    let dim = target.len();
    let mut a = vec![vec![0.0; points.len()]; dim + 1];
    for (j, p) in points.iter().enumerate() {
        for (i, &v) in p.iter().enumerate() {
            a[i][j] = v;
        }
        a[dim][j] = 1.0;
    }
    let mut b = target.to_vec();
    b.push(1.0);
    min_residual(&a, &b) <= tol
}
