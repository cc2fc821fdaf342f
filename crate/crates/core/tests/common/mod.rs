//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls the library routine it checks: forward passes are
//! scalar loops over the raw weights, neighbors come from a full sort, and
//! filter labels from a direct predicate.

#![allow(dead_code)]

use alloy_explorer::data::{ColumnGroup, ColumnSpec, Dataset};
use alloy_explorer::filter::{BoundsSpec, MatchLabel};
use alloy_explorer::surrogate::{MlpModel, Standardizer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform table with columns `c0..c{dims}` scaled differently per column.
pub fn random_table(rows: usize, dims: usize, seed: u64) -> Dataset {
    let mut r = rng(seed);
    let scales: Vec<(f64, f64)> = (0..dims)
        .map(|_| (r.random_range(-50.0..50.0), r.random_range(0.01..200.0)))
        .collect();
    let specs = (0..dims)
        .map(|d| ColumnSpec::new(format!("c{d}"), ColumnGroup::Property, ""))
        .collect();
    let data: Vec<Vec<f64>> = (0..rows)
        .map(|_| {
            scales
                .iter()
                .map(|(off, s)| off + s * r.random::<f64>())
                .collect()
        })
        .collect();
    Dataset::from_rows(specs, &data).unwrap()
}

pub fn column_min_max(ds: &Dataset, col: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in 0..ds.row_count() {
        let v = ds.row(r)[col];
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Exhaustive k-NN: min-max scale by hand, compute every distance, sort.
/// Returns `(row, distance)` pairs.
pub fn brute_top_k(ds: &Dataset, target: &[(String, f64)], k: usize) -> Vec<(usize, f64)> {
    let cols: Vec<(usize, f64, f64, f64)> = target
        .iter()
        .map(|(name, v)| {
            let c = ds.column_names().iter().position(|n| n == name).unwrap();
            let (lo, hi) = column_min_max(ds, c);
            (c, lo, hi, *v)
        })
        .collect();
    let scale = |x: f64, lo: f64, hi: f64| if hi > lo { (x - lo) / (hi - lo) } else { 0.5 };
    let mut all: Vec<(usize, f64)> = (0..ds.row_count())
        .map(|r| {
            let row = ds.row(r);
            let mut acc = 0.0;
            for &(c, lo, hi, t) in &cols {
                let x = scale(row[c].clamp(lo, hi), lo, hi);
                let g = if hi > lo { (t - lo) / (hi - lo) } else { 0.5 };
                acc += (x - g) * (x - g);
            }
            (r, acc.sqrt())
        })
        .collect();
    all.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Label each row by testing every bound directly in original units.
pub fn predicate_labels(ds: &Dataset, bounds: &BoundsSpec, tolerance: f64) -> Vec<MatchLabel> {
    let names = ds.column_names();
    let active: Vec<(usize, f64, f64, f64)> = bounds
        .iter()
        .map(|(name, iv)| {
            let c = names.iter().position(|n| *n == name).unwrap();
            let (lo, hi) = column_min_max(ds, c);
            (c, iv.lo, iv.hi, tolerance * (hi - lo))
        })
        .collect();
    (0..ds.row_count())
        .map(|r| {
            let row = ds.row(r);
            let hard = active.iter().all(|&(c, lo, hi, _)| lo <= row[c] && row[c] <= hi);
            let soft = active
                .iter()
                .all(|&(c, lo, hi, m)| lo <= hi && lo - m <= row[c] && row[c] <= hi + m);
            if hard {
                MatchLabel::Match
            } else if soft {
                MatchLabel::SoftMatch
            } else {
                MatchLabel::NoMatch
            }
        })
        .collect()
}

/// A seeded model with non-trivial biases, slopes and standardization.
pub fn random_model(dims: &[usize], seed: u64) -> MlpModel {
    let mut m = MlpModel::init(dims, seed).unwrap();
    let mut r = rng(seed ^ 0x5eed);
    for b in m.biases.iter_mut() {
        b.mapv_inplace(|_| r.random_range(-0.2..0.2));
    }
    for a in m.alphas.iter_mut() {
        *a = r.random_range(0.05..0.6);
    }
    let (n_in, n_out) = (dims[0], dims[dims.len() - 1]);
    m.input_stats = Standardizer {
        mean: (0..n_in).map(|_| r.random_range(-2.0..2.0)).collect(),
        std: (0..n_in).map(|_| r.random_range(0.1..5.0)).collect(),
    };
    m.output_stats = Standardizer {
        mean: (0..n_out).map(|_| r.random_range(-100.0..100.0)).collect(),
        std: (0..n_out).map(|_| r.random_range(0.01..50.0)).collect(),
    };
    m
}

/// Forward pass written as explicit scalar loops over the stored weights.
pub fn oracle_forward(m: &MlpModel, x: &[f64]) -> Vec<f64> {
    let mut h: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v - m.input_stats.mean[i]) / m.input_stats.std[i])
        .collect();
    let layers = m.weights.len();
    for l in 0..layers {
        let w = &m.weights[l];
        let (rows, cols) = w.dim();
        let mut next = vec![0.0; rows];
        for (o, slot) in next.iter_mut().enumerate() {
            let mut acc = m.biases[l][o];
            for i in 0..cols {
                acc += w[[o, i]] * h[i];
            }
            *slot = if l + 1 < layers && acc < 0.0 {
                m.alphas[l] * acc
            } else {
                acc
            };
        }
        h = next;
    }
    h.iter()
        .enumerate()
        .map(|(j, v)| v * m.output_stats.std[j] + m.output_stats.mean[j])
        .collect()
}

/// Central differences taken in standardized input space with step `h`,
/// reported per original input unit. Row `j`, column `i` is `d y_j / d x_i`.
pub fn fd_jacobian(m: &MlpModel, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n_out = m.layer_dims[m.layer_dims.len() - 1];
    let mut jac = vec![vec![0.0; x.len()]; n_out];
    for i in 0..x.len() {
        let step = h * m.input_stats.std[i];
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[i] += step;
        minus[i] -= step;
        let (fp, fm) = (oracle_forward(m, &plus), oracle_forward(m, &minus));
        for j in 0..n_out {
            jac[j][i] = (fp[j] - fm[j]) / (2.0 * step);
        }
    }
    jac
}

/// Smallest |pre-activation| over hidden units, computed independently.
pub fn oracle_min_abs_preactivation(m: &MlpModel, x: &[f64]) -> f64 {
    let mut h: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v - m.input_stats.mean[i]) / m.input_stats.std[i])
        .collect();
    let mut smallest = f64::INFINITY;
    for l in 0..m.weights.len() - 1 {
        let w = &m.weights[l];
        let (rows, cols) = w.dim();
        let mut next = vec![0.0; rows];
        for (o, slot) in next.iter_mut().enumerate() {
            let mut acc = m.biases[l][o];
            for i in 0..cols {
                acc += w[[o, i]] * h[i];
            }
            smallest = smallest.min(acc.abs());
            *slot = if acc < 0.0 { m.alphas[l] * acc } else { acc };
        }
        h = next;
    }
    smallest
}

pub fn random_input(m: &MlpModel, r: &mut ChaCha8Rng) -> Vec<f64> {
    (0..m.layer_dims[0])
        .map(|i| m.input_stats.mean[i] + m.input_stats.std[i] * r.random_range(-2.0..2.0))
        .collect()
}

/// Entry-wise comparison with a relative tolerance and an absolute floor.
pub fn close(a: f64, b: f64, rel: f64, abs_floor: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) || (a - b).abs() <= abs_floor
}

/// Plain dense matrix product for the affine-reduction oracle.
pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for p in 0..k {
            for j in 0..m {
                out[i][j] += a[i][p] * b[p][j];
            }
        }
    }
    out
}

pub fn to_rows(w: &ndarray::Array2<f64>) -> Vec<Vec<f64>> {
    w.outer_iter().map(|r| r.to_vec()).collect()
}
