//! Small dense helpers shared by the least-squares and Newton solvers.

/// Solves `a x = b` for symmetric positive definite `a` (row-major, `n x n`)
/// by Cholesky factorization. Returns `None` when a pivot is not positive.
pub(crate) fn cholesky_solve(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(sum > 0.0) || !sum.is_finite() {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * n + k] * y[k];
        }
        y[i] = sum / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in i + 1..n {
            sum -= l[k * n + i] * x[k];
        }
        x[i] = sum / l[i * n + i];
    }
    Some(x)
}

/// Least squares with an intercept column prepended: returns `[b0, b1, ...]`.
///
/// A ridge term scaled to the Gram diagonal keeps collinear covariate sets
/// (e.g. duplicated columns) solvable.
pub(crate) fn least_squares(columns: &[&[f64]], y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let d = columns.len() + 1;
    let value = |row: usize, j: usize| if j == 0 { 1.0 } else { columns[j - 1][row] };
    let mut gram = vec![0.0; d * d];
    let mut rhs = vec![0.0; d];
    for row in 0..n {
        for i in 0..d {
            let xi = value(row, i);
            rhs[i] += xi * y[row];
            for j in 0..=i {
                gram[i * d + j] += xi * value(row, j);
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            gram[j * d + i] = gram[i * d + j];
        }
    }
    let scale = (0..d).map(|i| gram[i * d + i]).fold(0.0, f64::max).max(1.0);
    let mut ridge = 1e-10 * scale;
    loop {
        let mut g = gram.clone();
        for i in 1..d {
            g[i * d + i] += ridge;
        }
        g[0] += ridge * 1e-3;
        if let Some(x) = cholesky_solve(&g, &rhs, d) {
            return x;
        }
        ridge *= 100.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = [4.0, 1.0, 1.0, 3.0];
        let x = cholesky_solve(&a, &[1.0, 2.0], 2).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-12);
        assert!((x[0] + 3.0 * x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn least_squares_recovers_exact_line() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 3.0 * v).collect();
        let coef = least_squares(&[&x], &y);
        assert!((coef[0] - 2.0).abs() < 1e-6);
        assert!((coef[1] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn least_squares_tolerates_duplicate_columns() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.0 + v).collect();
        let coef = least_squares(&[&x, &x], &y);
        let pred = coef[0] + coef[1] * 4.0 + coef[2] * 4.0;
        assert!((pred - 5.0).abs() < 1e-4);
    }
}
