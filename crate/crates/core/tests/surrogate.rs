mod common;

use std::collections::BTreeMap;

use alloy_explorer::data::synth::{synthesize_dataset, synthesize_linear_dataset};
use alloy_explorer::surrogate::{
    composition_center, max_normalized_residual, read_model, save_model, sensitivity_curve, train,
    write_model, SurrogateLayout, TrainConfig,
};
use common::*;
use ndarray::Array2;

#[test]
fn forward_agrees_with_scalar_oracle() {
    let m = random_model(&[12, 32, 16, 20], 3);
    let mut r = rng(9);
    for _ in 0..50 {
        let x = random_input(&m, &mut r);
        let got = m.forward(&x).unwrap();
        let want = oracle_forward(&m, &x);
        for (g, w) in got.iter().zip(&want) {
            assert!(close(*g, *w, 1e-10, 1e-12), "{g} vs {w}");
        }
    }
}

#[test]
fn batch_forward_matches_single() {
    let m = random_model(&[4, 8, 3], 5);
    let mut r = rng(1);
    let xs: Vec<Vec<f64>> = (0..7).map(|_| random_input(&m, &mut r)).collect();
    let flat: Vec<f64> = xs.iter().flatten().copied().collect();
    let batch = m.forward_batch(Array2::from_shape_vec((7, 4), flat).unwrap().view()).unwrap();
    for (i, x) in xs.iter().enumerate() {
        let single = m.forward(x).unwrap();
        for j in 0..3 {
            assert!(close(batch[[i, j]], single[j], 1e-12, 1e-12));
        }
    }
}

#[test]
fn jacobian_matches_central_differences() {
    let m = random_model(&[12, 24, 24, 20], 11);
    let mut r = rng(4);
    let mut checked = 0;
    while checked < 20 {
        let x = random_input(&m, &mut r);
        if oracle_min_abs_preactivation(&m, &x) < 1e-3 {
            continue;
        }
        let jac = m.input_jacobian(&x).unwrap();
        let fd = fd_jacobian(&m, &x, 1e-5);
        for j in 0..20 {
            for i in 0..12 {
                assert!(
                    close(jac[[j, i]], fd[j][i], 1e-4, 1e-6),
                    "d{j}/d{i}: {} vs {}",
                    jac[[j, i]],
                    fd[j][i]
                );
            }
        }
        checked += 1;
    }
}

#[test]
fn unit_slopes_reduce_to_an_affine_map() {
    let mut m = random_model(&[5, 7, 6, 3], 8);
    m.alphas.iter_mut().for_each(|a| *a = 1.0);

    // y = S_out (W2 W1 W0 S_in^-1 (x - mu_in) + c) + mu_out
    let w: Vec<Vec<Vec<f64>>> = m.weights.iter().map(to_rows).collect();
    let product = matmul(&matmul(&w[2], &w[1]), &w[0]);
    let b: Vec<Vec<f64>> = m.biases.iter().map(|b| b.to_vec()).collect();
    let col = |v: &[f64]| v.iter().map(|x| vec![*x]).collect::<Vec<_>>();
    let c1 = matmul(&w[1], &col(&b[0]));
    let c2 = matmul(&w[2], &c1.iter().zip(&b[1]).map(|(r, bb)| vec![r[0] + bb]).collect::<Vec<_>>());
    let offset: Vec<f64> = c2.iter().zip(&b[2]).map(|(r, bb)| r[0] + bb).collect();

    let mut r = rng(2);
    for _ in 0..10 {
        let x = random_input(&m, &mut r);
        let z: Vec<f64> = (0..5)
            .map(|i| (x[i] - m.input_stats.mean[i]) / m.input_stats.std[i])
            .collect();
        let lin = matmul(&product, &col(&z));
        let y = m.forward(&x).unwrap();
        let jac = m.input_jacobian(&x).unwrap();
        for j in 0..3 {
            let (s, mu) = (m.output_stats.std[j], m.output_stats.mean[j]);
            let want = s * (lin[j][0] + offset[j]) + mu;
            assert!(close(y[j], want, 1e-10, 1e-10), "{} vs {want}", y[j]);
            for i in 0..5 {
                let want = s * product[j][i] / m.input_stats.std[i];
                assert!(close(jac[[j, i]], want, 1e-10, 0.0));
            }
        }
    }
}

#[test]
fn curve_derivatives_match_differences_of_the_curve() {
    let m = random_model(&[3, 10, 2], 6);
    let anchor = vec![0.1, -0.2, 0.4];
    let curve = sensitivity_curve(&m, &anchor, "x1", (-3.0, 3.0), 41, &BTreeMap::new()).unwrap();
    for s in &curve.samples {
        let mut p = anchor.clone();
        p[1] = s.x;
        if oracle_min_abs_preactivation(&m, &p) < 1e-3 {
            continue;
        }
        let h = 1e-5 * m.input_stats.std[1];
        let (mut a, mut b) = (p.clone(), p.clone());
        a[1] += h;
        b[1] -= h;
        let (fa, fb) = (oracle_forward(&m, &a), oracle_forward(&m, &b));
        for j in 0..2 {
            let fd = (fa[j] - fb[j]) / (2.0 * h);
            assert!(close(s.derivatives[j], fd, 1e-4, 1e-6));
            assert!(close(s.outputs[j], oracle_forward(&m, &p)[j], 1e-10, 1e-12));
        }
    }
}

#[test]
fn linear_target_is_learned_at_desk_scale() {
    let ds = synthesize_linear_dataset(5000, 1).unwrap();
    let layout = SurrogateLayout::from_groups(&ds);
    let (_, report) = train(&ds, &layout, &TrainConfig::desk_scale()).unwrap();
    assert_eq!(report.layer_dims, vec![12, 64, 64, 20]);
    assert!(report.held_out.average_normalized_max < 0.05);
    for row in report.held_out.outputs.iter().chain(&report.in_sample.outputs) {
        assert!(close(row.original_max, row.normalized_max * row.std, 1e-9, 0.0));
    }
}

#[test]
fn saved_model_reloads_and_predicts_identically() {
    let ds = synthesize_dataset(800, 2).unwrap();
    let layout = SurrogateLayout::from_groups(&ds);
    let config = TrainConfig {
        epochs: 2,
        ..TrainConfig::desk_scale()
    };
    let (model, report) = train(&ds, &layout, &config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.bin");
    let mut files = save_model(&model);
    files.sidecar.residuals = vec![report.held_out.clone()];
    write_model(&path, &files).unwrap();
    let (back, sidecar) = read_model(&path).unwrap();
    assert_eq!(back, model);
    assert_eq!(sidecar.residuals[0], report.held_out);

    let full = max_normalized_residual(&back, &ds).unwrap();
    assert_eq!(full.rows_evaluated, 800);
    let center = composition_center(&ds, &back.input_names).unwrap();
    assert_eq!(back.forward(&center).unwrap(), model.forward(&center).unwrap());
}
