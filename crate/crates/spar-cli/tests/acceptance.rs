//! Acceptance suite: exact property checks plus scaled-down statistical
//! replications of the headline experiments. Each test prints one pass/fail
//! line (run with `--nocapture` to see them).

use ndarray::{Array1, Array2, Axis};
use ndarray_linalg::{Solve, SVD};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use spar_cli::checks::{check_lemma_moments, check_theorem1};
use spar_cli::config::{ExperimentConfig, MethodSpec, RegimeSpec, RuleSpec, SettingSpec};
use spar_cli::runner::{simulation_records, sweep, write_records, ResultRecord};
use spar_cli::SweepParameter;
use spar_core::estimator::{
    averaged_coefficients, fit_ensemble, holp_weights, to_original_scale, EnsembleOptions,
    SparConfig,
};
use spar_core::screening::{marginal_correlation_scores, top_k};
use spar_core::simgen::{example_one, CoefficientRegime, CoefficientSpec, CovKind, CovarianceSpec};
use spar_core::{
    derive_seed, generate, holp, holp_scores, project_coefficient, ridge_dual, rng_from_seed,
    screening_report, standardize, CwProjection, DiagonalPolicy, SparRng,
};

fn randn(n: usize, p: usize, rng: &mut SparRng) -> Array2<f64> {
    Array2::from_shape_simple_fn((n, p), || {
        <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
    })
}

fn randv(n: usize, rng: &mut SparRng) -> Array1<f64> {
    Array1::from_shape_simple_fn(n, || {
        <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[test]
fn criterion_01_ridge_dual_equals_primal() {
    let mut rng = rng_from_seed(0xC1);
    let lambdas = [0.1, 1.0, 10.0];
    let mut worst = 0.0_f64;
    for trial in 0..50 {
        let n = rng.random_range(2..=30);
        let p = rng.random_range(2..=30);
        let x = randn(n, p, &mut rng);
        let y = randv(n, &mut rng);
        let lambda = lambdas[trial % 3];
        let dual = ridge_dual(&x, &y, lambda).unwrap();
        let mut g = x.t().dot(&x);
        for j in 0..p {
            g[[j, j]] += lambda;
        }
        let primal = g.solve_into(x.t().dot(&y)).unwrap();
        let err = dual
            .iter()
            .zip(primal.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(err);
    }
    println!("criterion 1 (ridge dual = primal, 50 instances): max err {worst:.2e} < 1e-8: PASS");
    assert!(worst < 1e-8);
}

#[test]
fn criterion_02_holp_minimum_norm() {
    let mut rng = rng_from_seed(0xC2);
    let x = randn(8, 40, &mut rng);
    let y = randv(8, &mut rng);
    let beta = holp(&x, &y, 0.0).unwrap();
    let base = beta.dot(&beta);

    let (_, s, vt) = x.svd(false, true).unwrap();
    let vt = vt.unwrap();
    let rank = s.iter().filter(|&&v| v > 1e-10 * s[0]).count();
    let v_range = vt.slice(ndarray::s![..rank, ..]).to_owned();

    for trial in 0..100 {
        let w = randv(40, &mut rng);
        let v = &w - &v_range.t().dot(&v_range.dot(&w));
        let b = &beta + &v;
        let norm = b.dot(&b);
        assert!(norm >= base - 1e-10, "trial {trial}: {norm} < {base}");
        if v.dot(&v) > 1e-10 {
            assert!(norm > base, "trial {trial}: equality off the minimizer");
        }
    }
    println!("criterion 2 (HOLP minimum norm, 100 null-space perturbations): PASS");
}

#[test]
fn criterion_03_bucket_projection_formula() {
    let mut rng = rng_from_seed(0xC3);
    let mut worst = 0.0_f64;
    for trial in 0..100 {
        let p = rng.random_range(4..=40);
        let m_target = rng.random_range(1..=8usize.min(p));
        let proj = CwProjection::draw(m_target, p, &DiagonalPolicy::RandomSign, &mut rng).unwrap();
        let beta = randv(p, &mut rng);
        let tilde = project_coefficient(&proj, &beta);
        let phi = proj.densify();
        let gram = phi.dot(&phi.t());
        let oracle = phi.t().dot(&gram.solve_into(phi.dot(&beta)).unwrap());
        let err = tilde
            .iter()
            .zip(oracle.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(err);
        assert!(err < 1e-10, "trial {trial}: dense-oracle err {err}");
    }

    // d proportional to beta returns beta exactly, including the full-rank
    // adaption on all-zero buckets.
    let mut adaptions = 0;
    let mut worst_exact = 0.0_f64;
    for _ in 0..200 {
        let p = rng.random_range(6..=40);
        let m_target = rng.random_range(2..=8usize.min(p));
        let beta = Array1::from_shape_fn(p, |_| {
            if rng.random::<f64>() < 0.2 {
                <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
            } else {
                0.0
            }
        });
        if beta.iter().all(|&b| b == 0.0) {
            continue;
        }
        let c = 10.0_f64.powf(rng.random_range(-1.5..1.5));
        let values: Vec<f64> = beta.iter().map(|b| c * b).collect();
        let proj =
            CwProjection::draw(m_target, p, &DiagonalPolicy::Values(values), &mut rng).unwrap();
        for dim in 0..proj.reduced_dim() {
            if (0..p)
                .filter(|&j| proj.goal_map()[j] == dim)
                .all(|j| beta[j] == 0.0)
            {
                adaptions += 1;
            }
        }
        let tilde = project_coefficient(&proj, &beta);
        let err = tilde
            .iter()
            .zip(beta.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst_exact = worst_exact.max(err);
        assert!(err < 1e-12);
    }
    assert!(
        adaptions > 20,
        "only {adaptions} adaption triggers exercised"
    );
    println!(
        "criterion 3 (bucket formula vs dense oracle {worst:.2e} < 1e-10; \
         d prop beta err {worst_exact:.2e} < 1e-12, {adaptions} adaption triggers): PASS"
    );
}

#[test]
fn criterion_04_moment_identities() {
    let report = check_lemma_moments(12, 12).unwrap();
    println!(
        "criterion 4 (moment identities: exact err {:.2e} < 1e-12, decay slopes {:.2}/{:.2} <= -3): {}",
        report.max_exact_error,
        report.inverse_second_slope,
        report.active_second_slope,
        if report.max_exact_error < 1e-12
            && report.inverse_second_slope <= -3.0
            && report.active_second_slope <= -3.0
        {
            "PASS"
        } else {
            "FAIL"
        }
    );
    assert!(report.max_exact_error < 1e-12);
    assert!(report.inverse_second_slope <= -3.0);
    assert!(report.active_second_slope <= -3.0);
}

#[test]
fn criterion_05_prediction_gain_bound() {
    let report = check_theorem1(50, 500, 20, 25, 200, 1).unwrap();
    println!(
        "criterion 5 (prediction gain {:.1} +- {:.1} >= bound {:.1} - 2se; oracle {:.1} <= rs {:.1}): {}",
        report.mean_diff,
        report.se_diff,
        report.bound,
        report.oracle_mean,
        report.random_sign_mean,
        if report.pass { "PASS" } else { "FAIL" }
    );
    assert!(report.oracle_mean <= report.random_sign_mean);
    assert!(report.mean_diff >= report.bound - 2.0 * report.se_diff);
    assert!(report.pass);
}

#[test]
fn criterion_06_model_count_plateau_and_screening_gain() {
    let (m20, m50, rp) = plateau_experiment(60);
    let rel = (m20 / m50 - 1.0).abs();
    println!(
        "criterion 6 (plateau: MSPE M=20 {m20:.3} vs M=50 {m50:.3}, rel {rel:.3} <= 0.05; \
         screen+project {m20:.3} <= project-only {rp:.3}): {}",
        if rel <= 0.05 && m20 <= rp {
            "PASS"
        } else {
            "FAIL"
        }
    );
    assert!(rel <= 0.05, "plateau violated: {m20} vs {m50}");
    assert!(m20 <= rp, "screening did not help: {m20} vs {rp}");
}

fn plateau_experiment(seed_base: u64) -> (f64, f64, f64) {
    let (n, p, a) = (100usize, 1000usize, 50usize);
    let (setting, coef) = example_one(p, a);
    let cfg = SparConfig::default();
    let m_range = cfg.resolve_m_range(n, p);
    let screen = cfg.resolve_screen_size(n, p);

    let mut mspe_20 = Vec::new();
    let mut mspe_50 = Vec::new();
    let mut mspe_rp_only = Vec::new();
    for rep in 0..30u64 {
        let (train, test) = generate(
            &setting,
            &coef,
            n,
            100,
            10.0,
            1.0,
            derive_seed(seed_base, rep),
        )
        .unwrap();
        let (train_std, info) = standardize(&train).unwrap();
        let weights = holp_weights(&train_std).unwrap();
        let mut rng = rng_from_seed(derive_seed(seed_base + 1, rep));

        let eval = |models: &[spar_core::estimator::MarginalModel], m: usize| -> f64 {
            let beta_std = averaged_coefficients(models, m, 0.0);
            let (beta, intercept) = to_original_scale(&info, &beta_std);
            let pred = test.x.dot(&beta) + intercept;
            pred.iter()
                .zip(test.y.iter())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                / test.n() as f64
        };

        let scr_rp = fit_ensemble(
            &train_std,
            &weights,
            &EnsembleOptions {
                n_models: 50,
                screen_size: Some(screen),
                m_range,
            },
            &mut rng,
        )
        .unwrap();
        mspe_20.push(eval(&scr_rp, 20));
        mspe_50.push(eval(&scr_rp, 50));

        let rp_only = fit_ensemble(
            &train_std,
            &weights,
            &EnsembleOptions {
                n_models: 20,
                screen_size: None,
                m_range,
            },
            &mut rng,
        )
        .unwrap();
        mspe_rp_only.push(eval(&rp_only, 20));
    }

    (mean(&mspe_20), mean(&mspe_50), mean(&mspe_rp_only))
}

#[test]
fn criterion_07_holp_screening_beats_marginal_correlation() {
    let (rh, rm, sh) = screening_experiment(70);
    println!(
        "criterion 7 (screening: HOLP recall {rh:.3} > marginal {rm:.3}; HOLP sign ratio {sh:.3} > 0.9): {}",
        if rh > rm && sh > 0.9 { "PASS" } else { "FAIL" }
    );
    assert!(rh > rm);
    assert!(sh > 0.9);
}

fn screening_experiment(seed_base: u64) -> (f64, f64, f64) {
    let (n, p, a) = (100usize, 500usize, 50usize);
    let (setting, coef) = example_one(p, a);
    let mut recall_holp = Vec::new();
    let mut recall_marginal = Vec::new();
    let mut sign_holp = Vec::new();
    for rep in 0..50u64 {
        let (train, _) = generate(
            &setting,
            &coef,
            n,
            2,
            10.0,
            1.0,
            derive_seed(seed_base, rep),
        )
        .unwrap();
        let truth = train.truth.clone().unwrap();
        let (train_std, _) = standardize(&train).unwrap();

        let holp_w = holp_weights(&train_std).unwrap();
        let holp_s = holp_scores(&train_std).unwrap();
        let sel = top_k(&holp_s, a);
        let rep_h = screening_report(&sel, &holp_w, &truth.beta);
        recall_holp.push(rep_h.recall);
        sign_holp.push(rep_h.sign_ratio);

        let marg = marginal_correlation_scores(&train_std).unwrap();
        let sel = top_k(&marg, a);
        let rep_m = screening_report(&sel, &marg.scores, &truth.beta);
        recall_marginal.push(rep_m.recall);
    }
    (mean(&recall_holp), mean(&recall_marginal), mean(&sign_holp))
}

fn group_medium_config(reps: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        setting: SettingSpec::GroupBlock { block_size: 100 },
        regime: RegimeSpec::Medium,
        n: 100,
        p: 1000,
        n_test: 100,
        rho_snr: 10.0,
        mu: 1.0,
        reps,
        seed,
        methods: vec![
            MethodSpec::Holp,
            MethodSpec::Spar {
                rule: RuleSpec::Best,
                max_models: None,
                screen_factor: None,
                folds: None,
                cv_over_m: None,
            },
            MethodSpec::Spar {
                rule: RuleSpec::OneSe,
                max_models: None,
                screen_factor: None,
                folds: None,
                cv_over_m: None,
            },
        ],
        output: None,
        parallelism: 1,
        timing: false,
    }
}

fn by_method<'r>(records: &'r [ResultRecord], method: &str) -> Vec<&'r ResultRecord> {
    records.iter().filter(|r| r.method == method).collect()
}

#[test]
fn criterion_08_spar_against_holp_on_group_medium() {
    let (mean_spar, mean_holp, frac) = group_medium_experiment(2026);
    println!(
        "criterion 8 (group/medium: SPAR-best rMSPE {mean_spar:.3} < 1 and <= 1.10 x HOLP {mean_holp:.3}; \
         1-se sparser in {frac:.2} of reps >= 0.9): {}",
        if mean_spar < 1.0 && mean_spar <= 1.10 * mean_holp && frac >= 0.9 {
            "PASS"
        } else {
            "FAIL"
        }
    );
    assert!(mean_spar < 1.0);
    assert!(mean_spar <= 1.10 * mean_holp);
    assert!(frac >= 0.9, "1-se sparser in only {frac} of replications");
}

fn group_medium_experiment(seed: u64) -> (f64, f64, f64) {
    let config = group_medium_config(30, seed);
    let records = simulation_records(&config).unwrap();
    assert!(
        records.iter().all(|r| r.error.is_none()),
        "method failures present"
    );

    let rmspe_of = |method: &str| -> Vec<f64> {
        by_method(&records, method)
            .iter()
            .map(|r| r.eval.as_ref().unwrap().rmspe)
            .collect()
    };
    let spar_best = rmspe_of("spar_best");
    let holp = rmspe_of("holp");
    let mean_spar = mean(&spar_best);
    let mean_holp = mean(&holp);
    let beats_naive = spar_best.iter().filter(|r| **r < 1.0).count();
    assert!(
        beats_naive as f64 >= 0.9 * spar_best.len() as f64,
        "SPAR rMSPE < 1 in only {beats_naive} of {} replications",
        spar_best.len()
    );

    let best_active: Vec<usize> = by_method(&records, "spar_best")
        .iter()
        .map(|r| r.eval.as_ref().unwrap().num_active)
        .collect();
    let one_se_active: Vec<usize> = by_method(&records, "spar_1se")
        .iter()
        .map(|r| r.eval.as_ref().unwrap().num_active)
        .collect();
    let sparser = best_active
        .iter()
        .zip(&one_se_active)
        .filter(|(b, o)| o < b)
        .count();
    let frac = sparser as f64 / best_active.len() as f64;
    (mean_spar, mean_holp, frac)
}

/// Seed-robustness sweeps of the statistical criteria; slow by design, run
/// with `cargo test -p spar-cli --test acceptance -- --ignored --nocapture`.
#[test]
#[ignore]
fn statistical_criteria_are_stable_across_seeds() {
    for seed in [160u64, 260, 360, 460] {
        let (m20, m50, rp) = plateau_experiment(seed);
        let rel = (m20 / m50 - 1.0).abs();
        println!("plateau, seed base {seed}: rel {rel:.3}, scr+rp {m20:.2} vs rp {rp:.2}");
        assert!(rel <= 0.05 && m20 <= rp);

        let (rh, rm, sh) = screening_experiment(seed + 10);
        println!(
            "screening, seed base {}: recall {rh:.3} vs {rm:.3}, sign {sh:.3}",
            seed + 10
        );
        assert!(rh > rm && sh > 0.9);

        let (ms, mh, frac) = group_medium_experiment(seed + 20);
        println!(
            "group/medium, seed {}: spar {ms:.3}, holp {mh:.3}, sparser frac {frac:.2}",
            seed + 20
        );
        assert!(ms < 1.0 && ms <= 1.10 * mh && frac >= 0.9);
    }
}

#[test]
fn criterion_09_byte_identical_csv_serial_vs_parallel() {
    let mut config = group_medium_config(8, 99);
    config.n = 60;
    config.p = 150;
    config.n_test = 40;
    config.methods.push(MethodSpec::CwProjectionVariant {
        diagonal: spar_cli::config::CwDiagonalSpec::HolpValues,
        m: 12,
    });

    let render = |cfg: &ExperimentConfig| -> Vec<u8> {
        let mut buf = Vec::new();
        write_records(&simulation_records(cfg).unwrap(), &mut buf).unwrap();
        buf
    };
    let serial_1 = render(&config);
    let serial_2 = render(&config);
    let mut par = config.clone();
    par.parallelism = 8;
    let parallel = render(&par);
    assert_eq!(serial_1, serial_2, "repeat runs differ");
    assert_eq!(serial_1, parallel, "parallel run differs from serial");

    // Sweep determinism, singleton grid.
    let sweep_bytes = |jobs: usize| -> Vec<u8> {
        let mut cfg = config.clone();
        cfg.parallelism = jobs;
        let mut buf = Vec::new();
        sweep(SweepParameter::ScreenFactor, &[2.0], &cfg, &mut buf).unwrap();
        buf
    };
    assert_eq!(sweep_bytes(1), sweep_bytes(8), "sweep bytes differ");
    println!("criterion 9 (byte-identical CSV, serial vs 8 workers, simulate and sweep): PASS");
}

#[test]
fn criterion_10_snr_calibration_and_extreme_ratio() {
    // Empirical Var(x' beta) / sigma^2 within 10% of rho_snr for all six
    // covariance settings at n = 5000.
    let p = 200;
    let a = 20;
    let settings: [CovKind; 6] = [
        CovKind::Independent,
        CovKind::CompoundSymmetry { rho: 0.5 },
        CovKind::Autoregressive { rho: 0.9 },
        CovKind::GroupBlock { block_size: 100 },
        CovKind::Factor { k: a },
        CovKind::ExtremeCorrelation { a },
    ];
    let mut worst_rel = 0.0_f64;
    for (i, kind) in settings.into_iter().enumerate() {
        let regime = if matches!(kind, CovKind::ExtremeCorrelation { .. }) {
            CoefficientRegime::ExtremeLadder
        } else {
            CoefficientRegime::Sparse
        };
        let coef = CoefficientSpec::with_active_count(regime, a);
        let setting = CovarianceSpec::new(kind.clone(), p);
        let (train, _) = generate(
            &setting,
            &coef,
            5000,
            2,
            10.0,
            1.0,
            derive_seed(1000, i as u64),
        )
        .unwrap();
        let truth = train.truth.as_ref().unwrap();
        let signal = train.x.dot(&truth.beta);
        let mean_sig = signal.sum() / signal.len() as f64;
        let var_sig =
            signal.iter().map(|v| (v - mean_sig).powi(2)).sum::<f64>() / (signal.len() - 1) as f64;
        let snr_hat = var_sig / truth.sigma2;
        let rel = (snr_hat / 10.0 - 1.0).abs();
        worst_rel = worst_rel.max(rel);
        assert!(rel < 0.10, "{kind:?}: empirical snr {snr_hat:.3}");
    }

    let max_z = extreme_ratio_max_z(2000);
    println!(
        "criterion 10 (SNR within 10% on six settings, worst rel {worst_rel:.3}; \
         extreme-correlation ratio within 3 MC se, worst {max_z:.2}): PASS"
    );
}

/// The extreme-correlation marginal-correlation ratio between active column
/// j and the (common) inactive level, estimated at total n = 20000 as a
/// ratio of mean covariances with a jackknife standard error over the
/// replicates. The latent construction gives cov(x_j, y) = j for j <= a and
/// a sqrt(a+1) 2^{-3/2} beyond, hence ratio (j/a) 2^{3/2} (a+1)^{-1/2}.
fn extreme_ratio_max_z(seed_base: u64) -> f64 {
    let (p, a) = (20usize, 5usize);
    let setting = CovarianceSpec::new(CovKind::ExtremeCorrelation { a }, p);
    let coef = CoefficientSpec::with_active_count(CoefficientRegime::ExtremeLadder, a);
    let replicates = 50usize;
    let n_rep = 400usize;
    let mut num: Vec<Vec<f64>> = vec![Vec::with_capacity(replicates); a];
    let mut den: Vec<f64> = Vec::with_capacity(replicates);
    for r in 0..replicates {
        let (train, _) = generate(
            &setting,
            &coef,
            n_rep,
            2,
            10.0,
            1.0,
            derive_seed(seed_base, r as u64),
        )
        .unwrap();
        let nf = train.n() as f64;
        let x_mean = train.x.sum_axis(Axis(0)) / nf;
        let y_mean = train.y.sum() / nf;
        let cov_with_y = |j: usize| -> f64 {
            train
                .x
                .column(j)
                .iter()
                .zip(train.y.iter())
                .map(|(x, y)| (x - x_mean[j]) * (y - y_mean))
                .sum::<f64>()
                / (nf - 1.0)
        };
        den.push(mean(&(a..p).map(cov_with_y).collect::<Vec<_>>()));
        for (j, col) in num.iter_mut().enumerate() {
            col.push(cov_with_y(j));
        }
    }

    let leave_one_out_mean = |xs: &[f64], skip: usize| -> f64 {
        (xs.iter().sum::<f64>() - xs[skip]) / (xs.len() - 1) as f64
    };
    let mut max_z = 0.0_f64;
    for (j, cov_j) in num.iter().enumerate() {
        let closed = ((j + 1) as f64 / a as f64) * 2.0_f64.powf(1.5) / ((a + 1) as f64).sqrt();
        let estimate = mean(cov_j) / mean(&den);
        let loo: Vec<f64> = (0..replicates)
            .map(|i| leave_one_out_mean(cov_j, i) / leave_one_out_mean(&den, i))
            .collect();
        let loo_mean = mean(&loo);
        let jack_var = (replicates - 1) as f64 / replicates as f64
            * loo.iter().map(|v| (v - loo_mean).powi(2)).sum::<f64>();
        let z = (estimate - closed).abs() / jack_var.sqrt();
        max_z = max_z.max(z);
        assert!(
            z <= 3.0,
            "ratio for j = {}: MC {estimate:.4} vs closed {closed:.4} ({z:.2} se)",
            j + 1
        );
    }
    max_z
}

/// Seed-robustness sweeps of the statistical criteria; slow by design, run
/// with `cargo test -p spar-cli --test acceptance -- --ignored`.
#[test]
#[ignore]
fn extreme_ratio_is_stable_across_seeds() {
    for seed in [3000u64, 4000, 5000, 6000] {
        let z = extreme_ratio_max_z(seed);
        println!("extreme ratio, seed base {seed}: worst z {z:.2}");
    }
}
