//! Cross-method checks of the estimators against closed-form variance
//! decompositions of the three benchmark models.
//!
//! Conventions: factors of the raw models are (X1, X2, X3, X4) with the
//! correlated pair (X1, X4); the lifted factor set is
//! (eps1, X2, X3, eps4, eta). Expected values below are analytic; estimates
//! are averaged over fixed seeds so the stated tolerances hold with margin.

use gsa_core::algebraic::{latent_lift, AlgebraicModel, ModelId};
use gsa_core::kucherenko::{estimate_kucherenko, GaussianJoint, KucherenkoSettings};
use gsa_core::sobol::{run_independent, SobolSettings};
use gsa_core::RandomStream;

const N: usize = 10_000;

fn no_bootstrap() -> SobolSettings {
    SobolSettings { bootstrap: 0, ..Default::default() }
}

/// Seed-averaged (mains, totals) of the independent-Sobol analysis of `model`.
fn averaged_sobol<M: gsa_core::GsaModel<f64>>(
    model: &M,
    seeds: &[u64],
) -> (Vec<f64>, Vec<f64>) {
    let k = model.dimension();
    let mut mains = vec![0.0; k];
    let mut totals = vec![0.0; k];
    for &seed in seeds {
        let report = run_independent(model, N, RandomStream::new(seed), no_bootstrap()).unwrap();
        for (i, f) in report.factors.iter().enumerate() {
            mains[i] += f.main / seeds.len() as f64;
            totals[i] += f.total / seeds.len() as f64;
        }
    }
    (mains, totals)
}

fn assert_close(got: &[f64], expected: &[f64], tol: f64, label: &str) {
    for (i, (g, e)) in got.iter().zip(expected).enumerate() {
        assert!((g - e).abs() < tol, "{label}[{i}]: got {g}, expected {e}");
    }
}

/// Analytic latent-route indices for a model at a given correlation.
fn latent_expectation(id: ModelId, rho: f64) -> (Vec<f64>, Vec<f64>) {
    let a = rho.abs();
    match id {
        ModelId::Model1 => (
            vec![(1.0 - a) / 3.0, 1.0 / 3.0, 0.0, 0.0, a / 3.0],
            vec![(1.0 - a) / 3.0, 2.0 / 3.0, 1.0 / 3.0, 0.0, a / 3.0],
        ),
        ModelId::Model2 => (
            vec![(1.0 - a) / 3.0, 1.0 / 3.0, 0.0, 0.0, a / 3.0],
            vec![2.0 * (1.0 - a) / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 2.0 * a / 3.0],
        ),
        ModelId::Model3 => {
            let v = 4.0 + 2.0 * rho;
            let eta = if rho > 0.0 { 4.0 * rho / v } else { 0.0 };
            let eps = (1.0 - a) / v;
            let single = 1.0 / v;
            (
                vec![eps, single, single, eps, eta],
                vec![eps, single, single, eps, eta],
            )
        }
    }
}

#[test]
fn latent_route_matches_analytic_decomposition() {
    let seeds = [101u64, 102, 103, 104, 105];
    for id in [ModelId::Model1, ModelId::Model2, ModelId::Model3] {
        for rho in [0.7, 0.9] {
            let lifted = latent_lift(AlgebraicModel::new(id), rho).unwrap();
            let (mains, totals) = averaged_sobol(&lifted, &seeds);
            let (em, et) = latent_expectation(id, rho);
            assert_close(&mains, &em, 0.02, &format!("{id:?} rho {rho} latent mains"));
            assert_close(&totals, &et, 0.02, &format!("{id:?} rho {rho} latent totals"));
        }
    }
}

#[test]
fn inert_factor_law_over_the_rho_sweep() {
    // eps4 carries no model influence in models 1 and 2 at any correlation.
    let seeds: Vec<u64> = (300..320).collect();
    for id in [ModelId::Model1, ModelId::Model2] {
        for rho in [-0.9, -0.5, 0.0, 0.5, 0.9] {
            let lifted = latent_lift(AlgebraicModel::new(id), rho).unwrap();
            let (mains, totals) = averaged_sobol(&lifted, &seeds);
            assert!(mains[3].abs() < 0.01, "{id:?} rho {rho}: eps4 main {}", mains[3]);
            assert!(totals[3].abs() < 0.01, "{id:?} rho {rho}: eps4 total {}", totals[3]);
        }
    }
}

#[test]
fn interaction_signature_of_the_latent_variable() {
    let seeds = [500u64, 501, 502, 503, 504];
    let rho = 0.7;
    // Model 1: X1 interacts with nothing, so eta carries no interactions.
    let lifted1 = latent_lift(AlgebraicModel::new(ModelId::Model1), rho).unwrap();
    let (m1, t1) = averaged_sobol(&lifted1, &seeds);
    assert!(t1[4] - m1[4] <= 0.02, "model1 eta: {} vs {}", m1[4], t1[4]);
    // Model 2: X1 multiplies X3, so eta inherits an interaction of size
    // lambda^2 * V(X3)/V = rho/3.
    let lifted2 = latent_lift(AlgebraicModel::new(ModelId::Model2), rho).unwrap();
    let (m2, t2) = averaged_sobol(&lifted2, &seeds);
    let gap = t2[4] - m2[4];
    assert!((gap - rho / 3.0).abs() < 0.03, "model2 eta interaction {gap}");
}

#[test]
fn model3_negative_correlation_silences_the_latent_variable() {
    let seeds: Vec<u64> = (600..620).collect();
    for rho in [-0.9, -0.7, -0.5, -0.3] {
        let lifted = latent_lift(AlgebraicModel::new(ModelId::Model3), rho).unwrap();
        let (mains, totals) = averaged_sobol(&lifted, &seeds);
        assert!(mains[4].abs() < 0.01, "rho {rho}: eta main {}", mains[4]);
        assert!(totals[4].abs() < 0.01, "rho {rho}: eta total {}", totals[4]);
    }
}

#[test]
fn kucherenko_model2_closed_forms() {
    let seeds = [700u64, 701, 702, 703, 704];
    for rho in [0.7, 0.9] {
        let model = AlgebraicModel::new(ModelId::Model2);
        let joint = GaussianJoint::with_pair(4, 0, 3, rho).unwrap();
        let mut mains = [0.0f64; 4];
        let mut totals = [0.0f64; 4];
        for &seed in &seeds {
            let report = estimate_kucherenko(
                &model,
                &joint,
                2 * N,
                RandomStream::new(seed),
                &KucherenkoSettings::default(),
            )
            .unwrap();
            for i in 0..4 {
                mains[i] += report.factors[i].main / seeds.len() as f64;
                totals[i] += report.factors[i].total / seeds.len() as f64;
            }
        }
        let expect_main = [1.0 / 3.0, 1.0 / 3.0, 0.0, rho * rho / 3.0];
        let expect_total = [2.0 * (1.0 - rho * rho) / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0];
        assert_close(&mains, &expect_main, 0.02, &format!("kucherenko m2 rho {rho} mains"));
        assert_close(&totals, &expect_total, 0.02, &format!("kucherenko m2 rho {rho} totals"));
    }
}

#[test]
fn sobol_column_ignores_correlation_by_construction() {
    // The "treat everything as independent" analysis must not move with rho,
    // matching the identical Sobol columns across the result tables.
    let model = AlgebraicModel::new(ModelId::Model3);
    let a = run_independent::<f64, _>(&model, N, RandomStream::new(800), no_bootstrap()).unwrap();
    let b = run_independent::<f64, _>(&model, N, RandomStream::new(800), no_bootstrap()).unwrap();
    for (fa, fb) in a.factors.iter().zip(b.factors.iter()) {
        assert_eq!(fa.main, fb.main);
        assert_eq!(fa.total, fb.total);
    }
}
