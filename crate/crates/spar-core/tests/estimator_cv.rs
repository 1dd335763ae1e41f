//! End-to-end behavior of the SPAR estimator: determinism, threshold
//! monotonicity, selection rules, prediction paths and the model document.

use ndarray::{Array1, Array2};
use spar_core::estimator::{averaged_coefficients, fit_ensemble, holp_weights, EnsembleOptions};
use spar_core::simgen::example_one;
use spar_core::{
    cross_validate, generate, predict, standardize, Dataset, ModelDocument, SelectionRule,
    SparConfig, SparError,
};

fn testbed(seed: u64) -> (Dataset, Dataset) {
    let (setting, coef) = example_one(150, 10);
    generate(&setting, &coef, 60, 30, 10.0, 1.0, seed).unwrap()
}

fn config(seed: u64) -> SparConfig {
    SparConfig {
        max_models: 8,
        folds: 5,
        threshold_grid_size: 12,
        seed,
        ..SparConfig::default()
    }
}

#[test]
fn cross_validate_is_deterministic() {
    let (train, _) = testbed(7);
    let m1 = cross_validate(&train, &config(3)).unwrap();
    let m2 = cross_validate(&train, &config(3)).unwrap();
    assert_eq!(m1, m2);
    let m3 = cross_validate(&train, &config(4)).unwrap();
    assert_ne!(m1.cv_table, m3.cv_table);
}

#[test]
fn cv_table_shape_and_monotone_sparsity() {
    let (train, _) = testbed(11);
    let cfg = config(5);
    let model = cross_validate(&train, &cfg).unwrap();

    let lambdas: Vec<f64> = model
        .cv_table
        .iter()
        .filter(|e| e.m == cfg.max_models)
        .map(|e| e.lambda)
        .collect();
    assert_eq!(lambdas[0], 0.0);
    assert!(lambdas.windows(2).all(|w| w[0] < w[1]));

    // num_active non-increasing in lambda for every fixed M.
    for m in 1..=cfg.max_models {
        let actives: Vec<usize> = model
            .cv_table
            .iter()
            .filter(|e| e.m == m)
            .map(|e| e.num_active)
            .collect();
        assert!(
            actives.windows(2).all(|w| w[0] >= w[1]),
            "m = {m}: {actives:?}"
        );
    }

    // lambda = 0 keeps the union of all screened index sets.
    let union: std::collections::BTreeSet<usize> = model
        .models
        .iter()
        .flat_map(|mm| mm.indices.iter().copied())
        .collect();
    let at_zero = model
        .cv_table
        .iter()
        .find(|e| e.m == cfg.max_models && e.lambda == 0.0)
        .unwrap();
    assert_eq!(at_zero.num_active, union.len());

    // Active sets are nested across lambda for the full ensemble.
    let support = |lambda: f64| -> std::collections::BTreeSet<usize> {
        let avg = averaged_coefficients(&model.models, cfg.max_models, lambda);
        avg.iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, _)| j)
            .collect()
    };
    for w in lambdas.windows(2) {
        let s_small = support(w[0]);
        let s_large = support(w[1]);
        assert!(s_large.is_subset(&s_small), "support not nested at {w:?}");
    }
}

#[test]
fn one_se_rule_never_uses_more_actives_than_best() {
    for seed in 0..5 {
        let (train, _) = testbed(100 + seed);
        let best = cross_validate(&train, &config(seed)).unwrap();
        let one_se = cross_validate(
            &train,
            &SparConfig {
                rule: SelectionRule::OneSe,
                ..config(seed)
            },
        )
        .unwrap();
        assert_eq!(best.cv_table, one_se.cv_table);
        let find = |m: &spar_core::SparModel| {
            m.cv_table
                .iter()
                .find(|e| e.m == m.chosen_m && e.lambda == m.chosen_lambda)
                .unwrap()
                .num_active
        };
        assert!(find(&one_se) <= find(&best));
    }
}

#[test]
fn ensemble_average_prediction_is_linear() {
    let (train, test) = testbed(21);
    let (train_std, info) = standardize(&train).unwrap();
    let weights = holp_weights(&train_std).unwrap();
    let mut rng = spar_core::rng_from_seed(17);
    let models = fit_ensemble(
        &train_std,
        &weights,
        &EnsembleOptions {
            n_models: 6,
            screen_size: Some(40),
            m_range: (4, 20),
        },
        &mut rng,
    )
    .unwrap();

    let (x_test_std, _) = info.apply(&test.x, &test.y);
    let avg = averaged_coefficients(&models, 6, 0.0);
    let pred_avg = x_test_std.dot(&avg);
    let mut pred_mean = Array1::<f64>::zeros(test.n());
    for m in &models {
        pred_mean += &x_test_std.dot(&m.beta);
    }
    pred_mean /= 6.0;
    for (a, b) in pred_avg.iter().zip(pred_mean.iter()) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn prediction_paths_agree_and_hit_training_mean() {
    let (train, test) = testbed(33);
    let model = cross_validate(&train, &config(9)).unwrap();

    // Standardized-space path: y = y_center + y_scale * (x_std . beta_std).
    let (x_test_std, _) = model.standardization.apply(&test.x, &test.y);
    let via_std = x_test_std
        .dot(&model.coefficients_std)
        .mapv(|v| model.standardization.y_center + model.standardization.y_scale * v);
    let via_orig = predict(&model, &test.x).unwrap();
    for (a, b) in via_std.iter().zip(via_orig.iter()) {
        assert!((a - b).abs() < 1e-10 * b.abs().max(1.0));
    }

    // The training-mean row predicts the training mean.
    let p = train.p();
    let mean_row = Array2::from_shape_fn((1, p), |(_, j)| model.standardization.x_center[j]);
    let at_mean = predict(&model, &mean_row).unwrap();
    assert!((at_mean[0] - model.standardization.y_center).abs() < 1e-10);

    // Dimension mismatch is rejected.
    let bad = Array2::<f64>::zeros((2, p + 1));
    assert!(matches!(
        predict(&model, &bad).unwrap_err(),
        SparError::DimensionMismatch { .. }
    ));
}

#[test]
fn model_document_roundtrip_preserves_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    let (train, test) = testbed(55);
    let model = cross_validate(&train, &config(2)).unwrap();
    model.document().save_json(&path).unwrap();
    let doc = ModelDocument::load_json(&path).unwrap();
    assert_eq!(doc.chosen_m, model.chosen_m);
    assert_eq!(doc.chosen_lambda, model.chosen_lambda);
    let direct = predict(&model, &test.x).unwrap();
    let via_doc = doc.predict(&test.x).unwrap();
    assert_eq!(direct, via_doc);
}

#[test]
fn fold_and_config_validation() {
    let (train, _) = testbed(66);
    let too_many_folds = SparConfig {
        folds: 40,
        ..config(0)
    };
    assert!(matches!(
        cross_validate(&train, &too_many_folds).unwrap_err(),
        SparError::FoldTooSmall { .. }
    ));

    let zero_models = SparConfig {
        max_models: 0,
        ..config(0)
    };
    assert!(matches!(
        cross_validate(&train, &zero_models).unwrap_err(),
        SparError::InvalidConfig(_)
    ));
}

#[test]
fn fixed_m_grid_when_cv_over_m_disabled() {
    let (train, _) = testbed(77);
    let cfg = SparConfig {
        cv_over_m: false,
        ..config(1)
    };
    let model = cross_validate(&train, &cfg).unwrap();
    assert!(model.cv_table.iter().all(|e| e.m == cfg.max_models));
    assert_eq!(model.chosen_m, cfg.max_models);
}
