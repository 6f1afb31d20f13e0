//! Acceptance suite: one test per criterion, each printing a PASS line per
//! check at the stated tolerance. Run with
//! `cargo test -p gsa-cli --test acceptance -- --nocapture`.
//!
//! Criteria 1-4 cover the algebraic benchmark models against closed forms
//! and the published result tables; 5-7 run the PBPK model at desk scale
//! (n = 2000); 8 checks byte-level determinism of the CLI outputs.

use std::fs;
use std::time::Instant;

use gsa_core::algebraic::{latent_lift, AlgebraicModel, ModelId};
use gsa_core::kucherenko::{estimate_kucherenko, GaussianJoint, KucherenkoSettings};
use gsa_core::pbpk::{
    build_system, simulate_subject, subject_from_draws, BaseDraws, CypCorrelation, DrugParams,
    PbpkAucModel, PbpkGsaMode, PopulationConfig, Sex, SimulationSettings, TissueTable,
};
use gsa_core::sobol::{estimate_grouped_pair, run_independent, SensitivityReport, SobolSettings};
use gsa_core::{GsaModel, RandomStream};

use gsa_cli::config::RunConfig;
use gsa_cli::dispatch::run_command;

const N: usize = 10_000;

struct Checker {
    criterion: &'static str,
    failures: Vec<String>,
    checks: usize,
}

impl Checker {
    fn new(criterion: &'static str) -> Self {
        println!("=== acceptance {criterion}");
        Self { criterion, failures: Vec::new(), checks: 0 }
    }

    fn within(&mut self, label: &str, got: f64, expected: f64, tol: f64) {
        self.checks += 1;
        if (got - expected).abs() <= tol {
            println!("PASS {}: {label} = {got:.4} (target {expected:.4} +/- {tol})", self.criterion);
        } else {
            println!("FAIL {}: {label} = {got:.4} (target {expected:.4} +/- {tol})", self.criterion);
            self.failures.push(format!("{label}: {got:.4} vs {expected:.4} +/- {tol}"));
        }
    }

    fn holds(&mut self, label: &str, ok: bool, detail: String) {
        self.checks += 1;
        if ok {
            println!("PASS {}: {label} ({detail})", self.criterion);
        } else {
            println!("FAIL {}: {label} ({detail})", self.criterion);
            self.failures.push(format!("{label}: {detail}"));
        }
    }

    fn finish(self, started: Instant, budget_s: f64) {
        let elapsed = started.elapsed().as_secs_f64();
        println!(
            "{}: {} checks, {} failures, {elapsed:.1}s (budget {budget_s}s)",
            self.criterion,
            self.checks,
            self.failures.len()
        );
        assert!(
            self.failures.is_empty(),
            "{} failed checks:\n{}",
            self.criterion,
            self.failures.join("\n")
        );
        assert!(elapsed < budget_s, "{}: runtime {elapsed:.1}s over budget {budget_s}s", self.criterion);
    }
}

fn no_bootstrap() -> SobolSettings {
    SobolSettings { bootstrap: 0, ..Default::default() }
}

/// Seed-averaged independent-Sobol mains/totals.
fn averaged_sobol<M: GsaModel<f64>>(model: &M, n: usize, seeds: &[u64]) -> (Vec<f64>, Vec<f64>) {
    let k = model.dimension();
    let mut mains = vec![0.0; k];
    let mut totals = vec![0.0; k];
    for &seed in seeds {
        let r = run_independent(model, n, RandomStream::new(seed), no_bootstrap()).unwrap();
        for (i, f) in r.factors.iter().enumerate() {
            mains[i] += f.main / seeds.len() as f64;
            totals[i] += f.total / seeds.len() as f64;
        }
    }
    (mains, totals)
}

fn averaged_grouped(
    id: ModelId,
    rho: f64,
    n: usize,
    seeds: &[u64],
) -> (Vec<f64>, Vec<f64>, Vec<String>) {
    let model = AlgebraicModel::new(id);
    let mut mains = vec![0.0; 3];
    let mut totals = vec![0.0; 3];
    let mut names = Vec::new();
    for &seed in seeds {
        let r =
            estimate_grouped_pair(&model, rho, n, RandomStream::new(seed), no_bootstrap()).unwrap();
        names = r.factors.iter().map(|f| f.name.clone()).collect();
        for (i, f) in r.factors.iter().enumerate() {
            mains[i] += f.main / seeds.len() as f64;
            totals[i] += f.total / seeds.len() as f64;
        }
    }
    (mains, totals, names)
}

fn averaged_kucherenko(id: ModelId, rho: f64, n: usize, seeds: &[u64]) -> (Vec<f64>, Vec<f64>) {
    let model = AlgebraicModel::new(id);
    let joint = GaussianJoint::with_pair(4, 0, 3, rho).unwrap();
    let mut mains = vec![0.0; 4];
    let mut totals = vec![0.0; 4];
    for &seed in seeds {
        let r = estimate_kucherenko(
            &model,
            &joint,
            n,
            RandomStream::new(seed),
            &KucherenkoSettings::default(),
        )
        .unwrap();
        for (i, f) in r.factors.iter().enumerate() {
            mains[i] += f.main / seeds.len() as f64;
            totals[i] += f.total / seeds.len() as f64;
        }
    }
    (mains, totals)
}

fn averaged_latent(id: ModelId, rho: f64, n: usize, seeds: &[u64]) -> (Vec<f64>, Vec<f64>) {
    let lifted = latent_lift(AlgebraicModel::new(id), rho).unwrap();
    averaged_sobol(&lifted, n, seeds)
}

#[test]
fn criterion_1_algebraic_analytic_oracles() {
    let started = Instant::now();
    let mut c = Checker::new("criterion 1 (independent Sobol closed forms)");
    let seeds = [41u64, 42, 43, 44, 45];
    let cases = [
        (ModelId::Model1, [1. / 3., 1. / 3., 0., 0.], [1. / 3., 2. / 3., 1. / 3., 0.]),
        (ModelId::Model2, [1. / 3., 1. / 3., 0., 0.], [2. / 3., 1. / 3., 1. / 3., 0.]),
        (ModelId::Model3, [0.25; 4], [0.25; 4]),
    ];
    for (id, s_expected, st_expected) in cases {
        let (mains, totals) = averaged_sobol(&AlgebraicModel::new(id), N, &seeds);
        for i in 0..4 {
            c.within(&format!("{} S{}", id.as_str(), i + 1), mains[i], s_expected[i], 0.02);
            c.within(&format!("{} ST{}", id.as_str(), i + 1), totals[i], st_expected[i], 0.02);
        }
    }
    c.finish(started, 60.0);
}

/// Published Table 3 values (model 1). Latent rows are (eps1, X2, X3, eps4, eta).
struct TableRow {
    rho: f64,
    sobol_main: [f64; 4],
    sobol_total: [f64; 4],
    kucherenko_main: [f64; 4],
    kucherenko_total: [f64; 4],
    latent_main: [f64; 5],
    latent_total: [f64; 5],
    grouped_main: [f64; 3],
    grouped_total: [f64; 3],
}

/// A published cell whose mean is itself more than the matching tolerance
/// away from the analytic truth (estimator noise in the original run); the
/// analytic value is the target instead, per the same treatment the latent
/// eta main receives.
struct AnalyticOverride {
    kind: &'static str,
    index: usize,
    analytic: f64,
    tol: f64,
}

fn check_table(c: &mut Checker, id: ModelId, row: &TableRow, tol: f64, overrides: &[AnalyticOverride]) {
    let seeds: Vec<u64> = (200..210).collect();
    let label = |kind: &str, f: usize| format!("{} rho {} {kind} [{f}]", id.as_str(), row.rho);
    let mut within = |c: &mut Checker, kind: &'static str, i: usize, got: f64, reported: f64| {
        if let Some(o) = overrides.iter().find(|o| o.kind == kind && o.index == i) {
            c.within(&format!("{} (analytic target)", label(kind, i)), got, o.analytic, o.tol);
        } else {
            c.within(&label(kind, i), got, reported, tol);
        }
    };

    let (sm, st) = averaged_sobol(&AlgebraicModel::new(id), N, &seeds);
    for i in 0..4 {
        within(c, "sobol main", i, sm[i], row.sobol_main[i]);
        within(c, "sobol total", i, st[i], row.sobol_total[i]);
    }
    let (km, kt) = averaged_kucherenko(id, row.rho, N, &seeds);
    for i in 0..4 {
        within(c, "kucherenko main", i, km[i], row.kucherenko_main[i]);
        within(c, "kucherenko total", i, kt[i], row.kucherenko_total[i]);
    }
    let (lm, lt) = averaged_latent(id, row.rho, N, &seeds);
    for i in 0..5 {
        within(c, "latent main", i, lm[i], row.latent_main[i]);
        within(c, "latent total", i, lt[i], row.latent_total[i]);
    }
    let (gm, gt, _) = averaged_grouped(id, row.rho, N, &seeds);
    for i in 0..3 {
        within(c, "grouped main", i, gm[i], row.grouped_main[i]);
        within(c, "grouped total", i, gt[i], row.grouped_total[i]);
    }
}

#[test]
fn criterion_2_table3_model1() {
    let started = Instant::now();
    let mut c = Checker::new("criterion 2 (Table 3, model 1)");
    let rows = [
        TableRow {
            rho: 0.7,
            sobol_main: [0.34, 0.33, 0.0, 0.0],
            sobol_total: [0.33, 0.67, 0.33, 0.0],
            kucherenko_main: [0.33, 0.32, 0.0, 0.16],
            kucherenko_total: [0.17, 0.64, 0.34, 0.0],
            latent_main: [0.11, 0.32, 0.02, 0.02, 0.26],
            latent_total: [0.10, 0.65, 0.33, 0.0, 0.23],
            grouped_main: [0.31, 0.31, -0.03],
            grouped_total: [0.34, 0.70, 0.32],
        },
        TableRow {
            rho: 0.9,
            sobol_main: [0.33, 0.32, -0.01, -0.01],
            sobol_total: [0.35, 0.66, 0.33, 0.0],
            kucherenko_main: [0.33, 0.33, -0.01, 0.27],
            kucherenko_total: [0.06, 0.69, 0.35, 0.0],
            latent_main: [0.05, 0.33, 0.02, 0.01, 0.30],
            latent_total: [0.04, 0.65, 0.35, 0.0, 0.29],
            grouped_main: [0.33, 0.35, 0.0],
            grouped_total: [0.34, 0.67, 0.33],
        },
    ];
    // Two noise-afflicted published cells at rho 0.7 target analytic values:
    // the latent eta main (paper 0.26, analytic rho/3; spec-mandated) and the
    // grouped X2 total (paper 0.70, analytic 2/3, which lies 0.033 from the
    // reported mean -- outside its own matching tolerance).
    let overrides = [
        AnalyticOverride { kind: "latent main", index: 4, analytic: 0.7 / 3.0, tol: 0.02 },
        AnalyticOverride { kind: "grouped total", index: 1, analytic: 2.0 / 3.0, tol: 0.03 },
    ];
    check_table(&mut c, ModelId::Model1, &rows[0], 0.03, &overrides);
    check_table(&mut c, ModelId::Model1, &rows[1], 0.03, &[]);
    c.finish(started, 120.0);
}

#[test]
fn criterion_3_tables_4_and_5_models_2_and_3() {
    let started = Instant::now();
    let mut c = Checker::new("criterion 3 (Tables 4-5, models 2-3)");
    let model2 = [
        TableRow {
            rho: 0.7,
            sobol_main: [0.34, 0.32, 0.0, -0.01],
            sobol_total: [0.68, 0.33, 0.34, 0.0],
            kucherenko_main: [0.32, 0.33, 0.0, 0.16],
            kucherenko_total: [0.34, 0.32, 0.34, 0.0],
            latent_main: [0.11, 0.33, 0.01, 0.01, 0.24],
            latent_total: [0.20, 0.33, 0.33, 0.0, 0.47],
            grouped_main: [0.33, 0.32, -0.03],
            grouped_total: [0.68, 0.34, 0.33],
        },
        TableRow {
            rho: 0.9,
            sobol_main: [0.33, 0.32, 0.0, 0.0],
            sobol_total: [0.66, 0.34, 0.34, 0.0],
            kucherenko_main: [0.32, 0.32, 0.0, 0.25],
            kucherenko_total: [0.13, 0.33, 0.35, 0.0],
            latent_main: [0.03, 0.32, -0.01, 0.0, 0.29],
            latent_total: [0.06, 0.33, 0.34, 0.0, 0.61],
            grouped_main: [0.36, 0.35, 0.01],
            grouped_total: [0.65, 0.32, 0.34],
        },
    ];
    let model3 = [
        TableRow {
            rho: 0.7,
            sobol_main: [0.25, 0.25, 0.26, 0.26],
            sobol_total: [0.25, 0.24, 0.25, 0.25],
            kucherenko_main: [0.55, 0.19, 0.18, 0.54],
            kucherenko_total: [0.10, 0.19, 0.19, 0.10],
            latent_main: [0.07, 0.18, 0.20, 0.06, 0.51],
            latent_total: [0.05, 0.19, 0.19, 0.05, 0.51],
            grouped_main: [0.62, 0.19, 0.18],
            grouped_total: [0.63, 0.18, 0.19],
        },
        TableRow {
            rho: 0.9,
            sobol_main: [0.24, 0.24, 0.26, 0.25],
            sobol_total: [0.25, 0.25, 0.24, 0.26],
            kucherenko_main: [0.63, 0.17, 0.18, 0.62],
            kucherenko_total: [0.03, 0.17, 0.17, 0.03],
            latent_main: [0.02, 0.18, 0.17, 0.02, 0.63],
            latent_total: [0.02, 0.17, 0.17, 0.02, 0.62],
            grouped_main: [0.65, 0.17, 0.18],
            grouped_total: [0.65, 0.17, 0.19],
        },
    ];
    for row in &model2 {
        check_table(&mut c, ModelId::Model2, row, 0.03, &[]);
    }
    for row in &model3 {
        check_table(&mut c, ModelId::Model3, row, 0.03, &[]);
    }
    // Analytic anchors of criterion 3.
    let seeds: Vec<u64> = (200..210).collect();
    let (km, kt) = averaged_kucherenko(ModelId::Model3, 0.7, N, &seeds);
    c.within("model3 kucherenko main1 analytic", km[0], 0.5352, 0.02);
    c.within("model3 kucherenko total1 analytic", kt[0], 0.0944, 0.02);
    let (gm7, _, _) = averaged_grouped(ModelId::Model3, 0.7, N, &seeds);
    c.within("model3 grouped main analytic rho 0.7", gm7[0], 0.6296, 0.02);
    let (gm9, _, _) = averaged_grouped(ModelId::Model3, 0.9, N, &seeds);
    c.within("model3 grouped main analytic rho 0.9", gm9[0], 0.655, 0.02);
    c.finish(started, 120.0);
}

#[test]
fn criterion_4_rho_sweep_structure() {
    let started = Instant::now();
    let mut c = Checker::new("criterion 4 (rho-sweep structure)");
    let grid = [-0.9, -0.7, -0.5, -0.3, 0.0, 0.3, 0.5, 0.7, 0.9];
    let seeds: Vec<u64> = (400..420).collect();
    for id in [ModelId::Model1, ModelId::Model2] {
        for &rho in &grid {
            // Kucherenko total of the inert factor vanishes everywhere.
            let (_, kt) = averaged_kucherenko(id, rho, N, &seeds[..3]);
            c.within(&format!("{} rho {rho} kucherenko ST4", id.as_str()), kt[3], 0.0, 0.01);
            // Both latent eps4 indices vanish everywhere.
            let (lm, lt) = averaged_latent(id, rho, N, &seeds);
            c.within(&format!("{} rho {rho} latent eps4 main", id.as_str()), lm[3], 0.0, 0.01);
            c.within(&format!("{} rho {rho} latent eps4 total", id.as_str()), lt[3], 0.0, 0.01);
        }
    }
    for &rho in &grid {
        let (lm, _) = averaged_latent(ModelId::Model3, rho, N, &seeds);
        if rho < 0.0 {
            c.within(&format!("model3 rho {rho} latent eta main"), lm[4], 0.0, 0.01);
        } else if rho > 0.0 {
            let analytic = 4.0 * rho / (4.0 + 2.0 * rho);
            c.within(&format!("model3 rho {rho} latent eta main"), lm[4], analytic, 0.02);
        }
    }
    c.finish(started, 300.0);
}

fn desk_scale_pbpk(mode: PbpkGsaMode) -> PbpkAucModel<f64> {
    let mut model = PbpkAucModel::new(mode);
    model.sim = SimulationSettings::default();
    model
}

#[test]
fn criterion_5_pbpk_desk_scale_gsa() {
    let started = Instant::now();
    let mut c = Checker::new("criterion 5 (PBPK desk-scale GSA)");
    let n = 2000;
    let seeds = [42u64, 43, 44];

    let independent = desk_scale_pbpk(PbpkGsaMode::Independent);
    let (_, totals) = averaged_sobol(&independent, n, &seeds);
    let names = independent.factor_names();
    let total_of = |name: &str| totals[names.iter().position(|n| n == name).unwrap()];
    c.within("sobol MPPGL total", total_of("MPPGL"), 0.39, 0.06);
    c.within("sobol CYP3A4 total", total_of("CYP3A4"), 0.33, 0.06);
    c.within("sobol CYP3A5 total", total_of("CYP3A5"), 0.29, 0.06);
    let physiology_max =
        total_of("sex").max(total_of("height")).max(total_of("BMI"));
    c.holds(
        "ranking MPPGL > CYP3A4 > CYP3A5 > {sex, height, BMI}",
        total_of("MPPGL") > total_of("CYP3A4")
            && total_of("CYP3A4") > total_of("CYP3A5")
            && total_of("CYP3A5") > physiology_max,
        format!(
            "MPPGL {:.3}, CYP3A4 {:.3}, CYP3A5 {:.3}, max physiology {:.3}",
            total_of("MPPGL"),
            total_of("CYP3A4"),
            total_of("CYP3A5"),
            physiology_max
        ),
    );

    let latent = desk_scale_pbpk(PbpkGsaMode::Latent);
    let (lmains, _) = averaged_sobol(&latent, n, &seeds);
    let lnames = latent.factor_names();
    let main_of = |name: &str| lmains[lnames.iter().position(|n| n == name).unwrap()];
    let eta = main_of("eta");
    c.within("latent eta main", eta, 0.43, 0.06);
    c.holds(
        "eta has the largest latent main effect",
        lnames.iter().all(|n| n == "eta" || main_of(n) <= eta),
        format!("eta {eta:.3}"),
    );
    c.within("latent eps_CYP3A4 main", main_of("eps_CYP3A4"), 0.12, 0.05);
    c.within("latent eps_CYP3A5 main", main_of("eps_CYP3A5"), 0.09, 0.05);
    c.finish(started, 1200.0);
}

#[test]
fn criterion_6_pbpk_physical_invariants() {
    let started = Instant::now();
    let mut c = Checker::new("criterion 6 (PBPK physical invariants)");
    let table = TissueTable::builtin();
    let config = PopulationConfig::<f64>::reference();
    let drug = DrugParams::midazolam();

    // Mass balance over 168 h on 100 random subjects.
    let mut rng = RandomStream::new(600).rng();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let subject =
            subject_from_draws(&table, &config, &BaseDraws::sample(&mut rng), CypCorrelation::Correlated)
                .unwrap();
        let (trajectory, _) =
            simulate_subject(&subject, &drug, &table, 5.0, &SimulationSettings::default()).unwrap();
        let system = build_system(&subject, &drug, &table, 5.0).unwrap();
        for state in &trajectory.states {
            worst = worst.max((system.total_mass(state) - 5.0).abs() / 5.0);
        }
    }
    c.holds("mass balance to 1e-6 relative (100 subjects)", worst < 1e-6, format!("worst {worst:.2e}"));

    // Flow fractions close the circulation exactly.
    for sex in [Sex::Male, Sex::Female] {
        let fractions = table.normalized_flow_fractions(sex);
        let sum: f64 = gsa_core::pbpk::Organ::ALL
            .iter()
            .filter(|&&o| o != gsa_core::pbpk::Organ::Lung)
            .map(|&o| fractions[o.index()])
            .sum();
        c.holds(
            &format!("{} flow fractions sum to 1", sex.name()),
            (sum - 1.0).abs() < 1e-9,
            format!("sum {sum:.12}"),
        );
    }

    // Log-abundance correlation at 0.52 in both correlated generation modes.
    let mut rng = RandomStream::new(601).rng();
    let mut grouped_logs = Vec::with_capacity(100_000);
    for _ in 0..100_000 {
        let s = subject_from_draws(&table, &config, &BaseDraws::sample(&mut rng), CypCorrelation::Correlated)
            .unwrap();
        grouped_logs.push((s.cyp3a4.ln(), s.cyp3a5.ln()));
    }
    c.within("grouped-mode corr(log CYP3A4, log CYP3A5)", pearson(&grouped_logs), 0.52, 0.01);

    let zs: Vec<f64> = RandomStream::new(602).standard_normal(3 * 100_000);
    let mut latent_logs = Vec::with_capacity(100_000);
    for i in 0..100_000 {
        let u = [0.7, 0.0, 0.0, 0.0, zs[3 * i], zs[3 * i + 1], zs[3 * i + 2]];
        let s = gsa_core::pbpk::gsa_input_map(&u, PbpkGsaMode::Latent, &table, &config).unwrap();
        latent_logs.push((s.cyp3a4.ln(), s.cyp3a5.ln()));
    }
    c.within("latent-mode corr(log CYP3A4, log CYP3A5)", pearson(&latent_logs), 0.52, 0.01);
    c.finish(started, 600.0);
}

#[test]
fn criterion_7_exposure_widening() {
    let started = Instant::now();
    let mut c = Checker::new("criterion 7 (correlation widens exposure)");
    let table = TissueTable::builtin();
    let config = PopulationConfig::<f64>::reference();
    let drug = DrugParams::midazolam();
    let n = 2000;

    // Paired draws: identical base randomness, only the correlation differs.
    let mut rng = RandomStream::new(700).rng();
    let draws: Vec<BaseDraws<f64>> = (0..n).map(|_| BaseDraws::sample(&mut rng)).collect();
    let log_aucs = |mode: CypCorrelation| -> Vec<f64> {
        use rayon::prelude::*;
        draws
            .par_iter()
            .map(|d| {
                let subject = subject_from_draws(&table, &config, d, mode).unwrap();
                let (_, auc) =
                    simulate_subject(&subject, &drug, &table, 5.0, &SimulationSettings::default())
                        .unwrap();
                auc.ln()
            })
            .collect()
    };
    let independent = log_aucs(CypCorrelation::Independent);
    let correlated = log_aucs(CypCorrelation::Correlated);
    let var = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64
    };
    let v_ind = var(&independent);
    let v_cor = var(&correlated);
    c.holds(
        "var(log AUC) correlated > independent",
        v_cor > v_ind,
        format!("{v_cor:.4} vs {v_ind:.4}"),
    );

    // One-sided paired bootstrap on the variance difference at 0.05.
    let mut boot_rng = RandomStream::new(701).rng();
    let b = 1000;
    let mut negative = 0usize;
    let mut idx = vec![0usize; n];
    for _ in 0..b {
        for slot in idx.iter_mut() {
            *slot = rand::Rng::random_range(&mut boot_rng, 0..n);
        }
        let sample = |xs: &[f64]| -> f64 {
            let m = idx.iter().map(|&i| xs[i]).sum::<f64>() / n as f64;
            idx.iter().map(|&i| (xs[i] - m).powi(2)).sum::<f64>() / n as f64
        };
        if sample(&correlated) <= sample(&independent) {
            negative += 1;
        }
    }
    let p = negative as f64 / b as f64;
    c.holds("one-sided bootstrap test at 0.05", p < 0.05, format!("p = {p:.3}"));
    c.finish(started, 600.0);
}

#[test]
fn criterion_8_byte_identical_reports() {
    let started = Instant::now();
    let mut c = Checker::new("criterion 8 (determinism)");
    let config = RunConfig::from_str(
        r#"
model = "model2"
methods = ["sobol_independent", "sobol_grouped", "kucherenko", "latent"]
rho = 0.7
n = 500
bootstrap = 150
seed = 11
"#,
    )
    .unwrap();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    run_command(&config, dir_a.path()).unwrap();
    run_command(&config, dir_b.path()).unwrap();
    let mut names: Vec<String> = fs::read_dir(dir_a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let mut identical = true;
    for name in &names {
        let a = fs::read(dir_a.path().join(name)).unwrap();
        let b = fs::read(dir_b.path().join(name)).unwrap();
        if a != b {
            identical = false;
        }
    }
    c.holds(
        "repeated run produces byte-identical files",
        identical && !names.is_empty(),
        format!("{} files compared", names.len()),
    );
    c.finish(started, 300.0);
}

fn pearson(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    let ma = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let mb = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (a, b) in pairs {
        cov += (a - ma) * (b - mb);
        va += (a - ma).powi(2);
        vb += (b - mb).powi(2);
    }
    cov / (va.sqrt() * vb.sqrt())
}
