//! Independent oracles shared by the integration tests. Nothing here calls
//! the library routine it is used to check.

#![allow(dead_code)]

use chrono::NaiveDate;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rating_markov::{GeneratorMatrix, Panel, N_STATES};

pub fn d(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    assert!(!v.is_empty());
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// `exp(a)` by a 50-term Taylor series on `a / 2^s` with `||a / 2^s||_1 <= 1/2`,
/// then `s` squarings.
pub fn taylor_expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let b = a / 2f64.powi(s);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=50 {
        term = &term * &b / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(sym: &DMatrix<f64>) -> Vec<f64> {
    let n = sym.nrows();
    let mut a = sym.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).collect()
}

/// Largest singular value as `sqrt(max eig(A^T A))`.
pub fn sigma_max_oracle(a: &DMatrix<f64>) -> f64 {
    let ata = a.transpose() * a;
    jacobi_eigenvalues(&ata)
        .into_iter()
        .fold(0.0, f64::max)
        .max(0.0)
        .sqrt()
}

/// Cohort matrix by scanning every bank's daily path.
pub fn brute_cohort(panel: &Panel, t0: NaiveDate, t1: NaiveDate) -> DMatrix<f64> {
    let mut counts = DMatrix::<f64>::zeros(N_STATES, N_STATES);
    for h in panel.histories() {
        let state_on = |day: NaiveDate| {
            if day < h.coverage_start() || day > h.coverage_end() {
                return None;
            }
            let mut s = None;
            for e in h.events() {
                if e.date <= day {
                    s = Some(e.state.index());
                }
            }
            s
        };
        if let (Some(a), Some(b)) = (state_on(t0), state_on(t1)) {
            counts[(a, b)] += 1.0;
        }
    }
    for i in 0..N_STATES {
        let n: f64 = counts.row(i).sum();
        if n == 0.0 {
            counts[(i, i)] = 1.0;
        } else {
            for j in 0..N_STATES {
                counts[(i, j)] /= n;
            }
        }
    }
    counts
}

/// Two-pass moments with explicit powers.
pub fn naive_moments(x: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let c = |k: i32| x.iter().map(|v| (v - m).powi(k)).sum::<f64>() / n;
    let var = c(2);
    (m, var, c(3) / var.powf(1.5), c(4) / (var * var))
}

/// Dense random generator with every off-diagonal rate in `[0, scale)`.
pub fn dense_generator(seed: u64, scale: f64) -> GeneratorMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rates = DMatrix::from_fn(N_STATES, N_STATES, |_, _| rng.random_range(0.0..scale));
    GeneratorMatrix::from_rates(rates).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
}

/// Stationary distribution from the null space of `Q^T` via SVD.
pub fn stationary(q: &GeneratorMatrix) -> Vec<f64> {
    let svd = q.matrix().transpose().svd(false, true);
    let v_t = svd.v_t.unwrap();
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let row: Vec<f64> = v_t.row(k).iter().copied().collect();
    let total: f64 = row.iter().sum();
    row.into_iter().map(|x| x / total).collect()
}

pub fn frobenius(a: &DMatrix<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
