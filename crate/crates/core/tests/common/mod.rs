//! Independent reference implementations used as test oracles. Nothing
//! here calls into the crate's fitting or design code.
#![allow(dead_code)]

use dendi_core::{Dataset, FormSpec, Node, Recipe, SecondSplit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn ind(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Design columns of a form written out directly from the model formulas.
pub fn columns(form: &FormSpec, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    match *form {
        FormSpec::Null => vec![],
        FormSpec::Linear { j } => vec![x[j].clone()],
        FormSpec::PiecewiseConstant { j, c } => vec![x[j].iter().map(|&v| ind(v > c)).collect()],
        FormSpec::AdditiveCombo { j, c } => {
            vec![x[j].clone(), x[j].iter().map(|&v| ind(v > c)).collect()]
        }
        FormSpec::MultiplicativeCombo { j, k, c } => {
            let second = if k == j {
                x[j].iter().map(|&v| ind(v > c) * (v - c)).collect()
            } else {
                x[j].iter()
                    .zip(&x[k])
                    .map(|(&a, &b)| ind(b > c) * a)
                    .collect()
            };
            vec![x[j].clone(), second]
        }
        FormSpec::Tree { j, c, second } => {
            let first = x[j].iter().map(|&v| ind(v > c)).collect();
            let leaf = x[j]
                .iter()
                .zip(&x[second.k])
                .map(|(&a, &b)| match second.node {
                    Node::Left => ind(a <= c && b > second.c2),
                    Node::Right => ind(a > c && b > second.c2),
                })
                .collect();
            vec![first, leaf]
        }
    }
}

/// Intercept, form columns, adjustment columns (exact duplicates skipped),
/// confounders. `None` when a form column is constant.
pub fn design(
    form: &FormSpec,
    adjust: &[FormSpec],
    x: &[Vec<f64>],
    z: &[Vec<f64>],
) -> Option<Vec<Vec<f64>>> {
    let n = x.first().or(z.first()).map_or(0, Vec::len);
    let mut cols = vec![vec![1.0; n]];
    for f in std::iter::once(form).chain(adjust) {
        for col in columns(f, x) {
            if col.iter().all(|&v| v == col[0]) {
                return None;
            }
            if !cols.contains(&col) {
                cols.push(col);
            }
        }
    }
    cols.extend(z.iter().cloned());
    Some(cols)
}

pub fn rows(values: &[Vec<f64>], keep: impl Fn(usize) -> bool) -> Vec<Vec<f64>> {
    values
        .iter()
        .map(|c| {
            c.iter()
                .enumerate()
                .filter(|&(i, _)| keep(i))
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

/// Least squares through the normal equations, solved by Gaussian
/// elimination with partial pivoting and one step of iterative refinement.
/// `None` when the cross-product matrix is numerically singular.
pub fn ols(cols: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let m = cols.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let xtx: Vec<Vec<f64>> = (0..m)
        .map(|a| (0..m).map(|b| dot(&cols[a], &cols[b])).collect())
        .collect();
    let xty: Vec<f64> = (0..m).map(|a| dot(&cols[a], y)).collect();
    let scale = (0..m).map(|a| xtx[a][a]).fold(0.0, f64::max);
    let solve = |rhs: &[f64]| -> Option<Vec<f64>> {
        let mut a: Vec<Vec<f64>> = xtx
            .iter()
            .zip(rhs)
            .map(|(r, &v)| {
                let mut r = r.clone();
                r.push(v);
                r
            })
            .collect();
        for col in 0..m {
            let piv = (col..m).max_by(|&i, &k| a[i][col].abs().total_cmp(&a[k][col].abs()))?;
            if a[piv][col].abs() <= 1e-10 * scale {
                return None;
            }
            a.swap(col, piv);
            for r in col + 1..m {
                let f = a[r][col] / a[col][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
        let mut b = vec![0.0; m];
        for r in (0..m).rev() {
            let s: f64 = (r + 1..m).map(|c| a[r][c] * b[c]).sum();
            b[r] = (a[r][m] - s) / a[r][r];
        }
        Some(b)
    };
    let mut beta = solve(&xty)?;
    let resid: Vec<f64> = (0..m)
        .map(|a| xty[a] - (0..m).map(|b| xtx[a][b] * beta[b]).sum::<f64>())
        .collect();
    let delta = solve(&resid)?;
    for (b, d) in beta.iter_mut().zip(delta) {
        *b += d;
    }
    Some(beta)
}

/// Least squares by Gram-Schmidt orthogonalisation, each column projected
/// twice against the earlier ones. `None` when a column is (numerically)
/// in the span of the earlier ones.
pub fn lstsq(cols: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let m = cols.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut r = vec![vec![0.0; m]; m];
    for (j, col) in cols.iter().enumerate() {
        let norm0 = dot(col, col).sqrt();
        let mut v = col.clone();
        for _ in 0..2 {
            for (k, qk) in q.iter().enumerate() {
                let proj = dot(qk, &v);
                r[k][j] += proj;
                for (vi, qi) in v.iter_mut().zip(qk) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if !(norm > 1e-10 * norm0) {
            return None;
        }
        r[j][j] = norm;
        q.push(v.into_iter().map(|x| x / norm).collect());
    }
    let qty: Vec<f64> = q.iter().map(|qk| dot(qk, y)).collect();
    let mut b = vec![0.0; m];
    for k in (0..m).rev() {
        let s: f64 = (k + 1..m).map(|c| r[k][c] * b[c]).sum();
        b[k] = (qty[k] - s) / r[k][k];
    }
    Some(b)
}

pub fn predict(cols: &[Vec<f64>], beta: &[f64], i: usize) -> f64 {
    cols.iter().zip(beta).map(|(c, b)| c[i] * b).sum()
}

pub fn rss(cols: &[Vec<f64>], y: &[f64], beta: &[f64]) -> f64 {
    (0..y.len())
        .map(|i| (y[i] - predict(cols, beta, i)).powi(2))
        .sum()
}

/// Gaussian deviance at the maximum-likelihood fit; `+inf` if singular.
pub fn gaussian_deviance(cols: &[Vec<f64>], y: &[f64]) -> f64 {
    let Some(beta) = lstsq(cols, y) else {
        return f64::INFINITY;
    };
    let n = y.len() as f64;
    let s2 = (rss(cols, y, &beta) / n).max(1e-300);
    n * (LN_2PI + s2.ln()) + rss(cols, y, &beta) / s2
}

pub fn gaussian_logpdf(y: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (LN_2PI + var.ln() + (y - mean) * (y - mean) / var)
}

/// Index of the smallest value; an earlier entry is kept unless a later
/// one is smaller by more than a relative 1e-10.
pub fn first_argmin(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        match best {
            Some(b) if v >= values[b] - 1e-10 * values[b].abs().max(1.0) => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Quantile thresholds written out from their definition: order statistic
/// `floor(i (m - 1) / (g + 1))` of the sorted values, distinct, each
/// leaving at least `min_node` values on both sides.
pub fn thresholds(values: &[f64], g: usize, min_node: usize) -> Vec<f64> {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len();
    let mut out: Vec<f64> = Vec::new();
    if m == 0 {
        return out;
    }
    for i in 1..=g {
        let c = s[i * (m - 1) / (g + 1)];
        let left = s.iter().filter(|&&v| v <= c).count();
        if left >= min_node && m - left >= min_node && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Leave-one-out predictive log-likelihoods computed by refitting every
/// candidate from scratch on each training set.
pub fn naive_gaussian(recipe: &Recipe, data: &Dataset) -> (Vec<f64>, usize) {
    let n = data.n();
    let x: Vec<Vec<f64>> = (0..data.p()).map(|j| data.covariate(j).to_vec()).collect();
    let z: Vec<Vec<f64>> = (0..data.q()).map(|k| data.confounder(k).to_vec()).collect();
    let y = data.y();
    let fold = |forms: &[FormSpec], adjust: &[FormSpec], i: usize| -> Option<f64> {
        let mut devs = Vec::new();
        let mut preds = Vec::new();
        for f in forms {
            let fitted = design(f, adjust, &x, &z).and_then(|cols| {
                let train = rows(&cols, |r| r != i);
                let n_form = columns(f, &x).len();
                if train[1..=n_form]
                    .iter()
                    .any(|c| c.iter().all(|&v| v == c[0]))
                {
                    return None;
                }
                let y_train: Vec<f64> = (0..n).filter(|&r| r != i).map(|r| y[r]).collect();
                let beta = lstsq(&train, &y_train)?;
                let rss = rss(&train, &y_train, &beta);
                let m = (n - 1) as f64;
                let var = (rss / m).max(1e-300);
                let dev = m * (LN_2PI + var.ln()) + rss / var;
                Some((dev, gaussian_logpdf(y[i], predict(&cols, &beta, i), var)))
            });
            let (d, p) = fitted.unwrap_or((f64::INFINITY, f64::NAN));
            devs.push(d);
            preds.push(p);
        }
        first_argmin(&devs).map(|b| preds[b])
    };
    let mut failed = 0;
    let per_obs = (0..n)
        .map(|i| {
            fold(&recipe.candidates, &recipe.adjust, i).unwrap_or_else(|| {
                failed += 1;
                fold(&[FormSpec::Null], &recipe.adjust, i)
                    .or_else(|| fold(&[FormSpec::Null], &[], i))
                    .unwrap()
            })
        })
        .collect();
    (per_obs, failed)
}

/// Second-split candidates enumerated straight from their definition.
pub fn brute_second_split(
    data: &Dataset,
    j: usize,
    c: f64,
    g: usize,
    min_node: usize,
) -> Vec<FormSpec> {
    let mut out = Vec::new();
    let xj = data.covariate(j);
    for k in 0..data.p() {
        let xk = data.covariate(k);
        for node in [Node::Left, Node::Right] {
            let vals: Vec<f64> = (0..data.n())
                .filter(|&i| (xj[i] > c) == (node == Node::Right))
                .map(|i| xk[i])
                .collect();
            for c2 in thresholds(&vals, g, min_node) {
                let ok =
                    k != j || (node == Node::Left && c2 < c) || (node == Node::Right && c2 > c);
                if ok {
                    out.push(FormSpec::Tree {
                        j,
                        c,
                        second: SecondSplit { node, k, c2 },
                    });
                }
            }
        }
    }
    out
}
