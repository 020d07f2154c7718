//! Independent reference implementations used as test oracles. Nothing
//! here calls into the library's numerical code.
#![allow(dead_code)]

/// Topological overlap by the literal triple loop.
pub fn tom_brute(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = a.len();
    let mut k = vec![0.0; p];
    for i in 0..p {
        for u in 0..p {
            if u != i {
                k[i] += a[i][u];
            }
        }
    }
    let mut tom = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..p {
            if i == j {
                tom[i][j] = 1.0;
                continue;
            }
            let mut l = 0.0;
            for u in 0..p {
                if u != i && u != j {
                    l += a[i][u] * a[u][j];
                }
            }
            tom[i][j] = (l + a[i][j]) / (k[i].min(k[j]) + 1.0 - a[i][j]);
        }
    }
    tom
}

/// Mann-Whitney AUC by counting every positive/negative pair, ties worth
/// one half.
pub fn auc_pairs(scores: &[f64], labels: &[u8]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        if li != 1 {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj != 0 {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

fn gini(c0: f64, c1: f64) -> f64 {
    let n = c0 + c1;
    if n == 0.0 {
        return 0.0;
    }
    1.0 - (c0 / n).powi(2) - (c1 / n).powi(2)
}

/// Best root split over every feature and every midpoint between distinct
/// sorted values, minimizing the size-weighted child Gini. Candidates are
/// visited feature-ascending then threshold-ascending and replace the
/// incumbent only on a strict improvement beyond `eps`. `None` when no
/// split beats the parent impurity by more than `eps`.
pub fn best_split_exhaustive(x: &[Vec<f64>], y: &[u8], eps: f64) -> Option<(usize, f64)> {
    let n = y.len() as f64;
    let c1 = y.iter().filter(|&&l| l == 1).count() as f64;
    let parent = gini(n - c1, c1);
    let mut best: Option<(usize, f64, f64)> = None;
    for (f, col) in x.iter().enumerate() {
        let mut values = col.clone();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let (mut l0, mut l1, mut r0, mut r1) = (0.0, 0.0, 0.0, 0.0);
            for (v, &l) in col.iter().zip(y) {
                match (*v <= t, l) {
                    (true, 0) => l0 += 1.0,
                    (true, _) => l1 += 1.0,
                    (false, 0) => r0 += 1.0,
                    (false, _) => r1 += 1.0,
                }
            }
            let score = ((l0 + l1) * gini(l0, l1) + (r0 + r1) * gini(r0, r1)) / n;
            let better = match best {
                None => score < parent - eps,
                Some((_, _, s)) => score < s - eps,
            };
            if better {
                best = Some((f, t, score));
            }
        }
    }
    best.map(|(f, t, _)| (f, t))
}

/// Mean negative log-likelihood plus ridge on the slopes, written out
/// directly. `params = [intercept, slopes...]`.
pub fn logit_loss(rows: &[Vec<f64>], y: &[u8], lambda: f64, params: &[f64]) -> f64 {
    let n = rows.len() as f64;
    let mut nll = 0.0;
    for (row, &label) in rows.iter().zip(y) {
        let eta = params[0] + row.iter().zip(&params[1..]).map(|(a, b)| a * b).sum::<f64>();
        let p = 1.0 / (1.0 + (-eta).exp());
        nll -= if label == 1 { p.ln() } else { (1.0 - p).ln() };
    }
    nll / n + lambda * params[1..].iter().map(|w| w * w).sum::<f64>()
}

/// Plain batch gradient descent on the same objective, fixed step.
pub fn logit_gradient_descent(rows: &[Vec<f64>], y: &[u8], lambda: f64, step: f64, iters: usize) -> Vec<f64> {
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mut w = vec![0.0; d + 1];
    for _ in 0..iters {
        let mut g = vec![0.0; d + 1];
        for (row, &label) in rows.iter().zip(y) {
            let eta = w[0] + row.iter().zip(&w[1..]).map(|(a, b)| a * b).sum::<f64>();
            let r = 1.0 / (1.0 + (-eta).exp()) - f64::from(label);
            g[0] += r / n;
            for j in 0..d {
                g[j + 1] += r * row[j] / n;
            }
        }
        for j in 0..d {
            g[j + 1] += 2.0 * lambda * w[j + 1];
        }
        for j in 0..=d {
            w[j] -= step * g[j];
        }
    }
    w
}

/// Ordinary least squares via normal equations and Gaussian elimination
/// with partial pivoting. Returns `[intercept, slopes...]`.
pub fn ols(xs: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let d = xs.len() + 1;
    let n = y.len();
    let design = |r: usize, j: usize| if j == 0 { 1.0 } else { xs[j - 1][r] };
    let mut a = vec![vec![0.0; d + 1]; d];
    for i in 0..d {
        for j in 0..d {
            a[i][j] = (0..n).map(|r| design(r, i) * design(r, j)).sum();
        }
        a[i][d] = (0..n).map(|r| design(r, i) * y[r]).sum();
    }
    for c in 0..d {
        let piv = (c..d)
            .max_by(|&p, &q| a[p][c].abs().total_cmp(&a[q][c].abs()))
            .unwrap();
        a.swap(c, piv);
        for r in 0..d {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..=d {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    (0..d).map(|i| a[i][d] / a[i][i]).collect()
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Survivor sizes of one elimination schedule, written from the rule:
/// keep `max(stop, ceil(0.75 * n))`, forcing progress when that keeps all.
pub fn schedule(start: usize, stop: usize, keep: f64) -> Vec<usize> {
    let mut sizes = vec![start];
    let mut cur = start;
    while cur > stop {
        // Nudge down before the ceiling so 0.75 * 12 = 9 exactly.
        let mut next = ((keep * cur as f64) - 1e-9).ceil() as usize;
        next = next.max(stop);
        if next == cur {
            next = cur - 1;
        }
        sizes.push(next);
        cur = next;
    }
    sizes
}

pub mod checks;
