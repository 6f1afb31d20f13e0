//! Variance-based sensitivity analysis with pick-freeze sampling.
//!
//! A [`SamplePlan`] holds two independent base matrices `A` and `B` of
//! standard-normal draws plus one hybrid matrix per factor group, `AB_j`,
//! which is `A` with the group-`j` columns replaced by `B`'s. Main effects
//! use the Homma–Saltelli estimator on the pair `(f(B), f(AB_j))`, which
//! shares exactly the group-`j` coordinates; total effects use Jansen's
//! estimator on `(f(A), f(AB_j))`, which differ in exactly those coordinates.
//! One analysis costs `n·(g + 2)` model evaluations.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{evaluate_rows, GsaModel, PairCorrelated};
use crate::sampling::{standard_normal_matrix, RandomStream, SequenceKind};
use crate::scalar::{two, Scalar};

/// Paired base matrices and pick-freeze hybrids for a group partition.
#[derive(Debug, Clone)]
pub struct SamplePlan<R> {
    pub k: usize,
    pub n: usize,
    pub groups: Vec<Vec<usize>>,
    pub a: Matrix<R>,
    pub b: Matrix<R>,
    pub ab: Vec<Matrix<R>>,
    pub stream: RandomStream,
}

/// Point estimates (and optional bootstrap percentiles) for one factor or group.
#[derive(Debug, Clone)]
pub struct FactorSensitivity<R> {
    pub name: String,
    pub main: R,
    pub total: R,
    /// 2.5th and 97.5th bootstrap percentiles of the main effect.
    pub main_ci: Option<(R, R)>,
    pub total_ci: Option<(R, R)>,
}

/// Convergence-ladder entry: index estimates using the first `n` rows.
#[derive(Debug, Clone)]
pub struct ConvergenceRow<R> {
    pub n: usize,
    pub main: Vec<R>,
    pub total: Vec<R>,
}

/// Per-group main/total indices with run metadata.
#[derive(Debug, Clone)]
pub struct SensitivityReport<R> {
    pub method: String,
    pub factors: Vec<FactorSensitivity<R>>,
    pub n: usize,
    pub seed: u64,
    pub bootstrap: Option<usize>,
    /// Total number of model evaluations consumed by the analysis.
    pub evaluations: usize,
    pub output_variance: R,
    pub rho: Option<f64>,
    pub convergence: Option<Vec<ConvergenceRow<R>>>,
}

impl<R: Scalar> SensitivityReport<R> {
    pub fn factor(&self, name: &str) -> &FactorSensitivity<R> {
        self.factors
            .iter()
            .find(|f| f.name == name)
            .unwrap_or_else(|| panic!("no factor named {name}"))
    }
}

/// Options shared by the high-level estimator entry points.
#[derive(Debug, Clone, Copy)]
pub struct SobolSettings {
    /// Bootstrap resample count; 0 disables interval estimation.
    pub bootstrap: usize,
    /// Evaluate model rows on the rayon pool.
    pub parallel: bool,
    /// Base sequence for the sample matrices.
    pub sequence: SequenceKind,
}

impl Default for SobolSettings {
    fn default() -> Self {
        Self { bootstrap: 1000, parallel: false, sequence: SequenceKind::PseudoRandom }
    }
}

fn validate_groups(k: usize, groups: &[Vec<usize>]) -> Result<()> {
    if groups.is_empty() {
        return Err(Error::InvalidGroups("no groups given".into()));
    }
    let mut seen = vec![false; k];
    for (j, g) in groups.iter().enumerate() {
        if g.is_empty() {
            return Err(Error::InvalidGroups(format!("group {j} is empty")));
        }
        for &i in g {
            if i >= k {
                return Err(Error::InvalidGroups(format!(
                    "group {j} references factor {i} but k = {k}"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidGroups(format!("factor {i} appears twice")));
            }
            seen[i] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::InvalidGroups(format!("factor {missing} is not covered")));
    }
    Ok(())
}

/// Builds the pick-freeze plan. `A` and `B` are drawn back-to-back from the
/// one stream (pseudo-random), or as the first/last `k` columns of a
/// `2k`-dimensional low-discrepancy point set.
pub fn build_plan<R: Scalar>(
    k: usize,
    n: usize,
    groups: Vec<Vec<usize>>,
    stream: RandomStream,
    sequence: SequenceKind,
) -> Result<SamplePlan<R>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("sample size must exceed 1, got {n}")));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("factor count must be positive".into()));
    }
    validate_groups(k, &groups)?;
    let joint = standard_normal_matrix::<R>(sequence, stream, n, 2 * k);
    let mut a = Matrix::zeros(n, k);
    let mut b = Matrix::zeros(n, k);
    for (i, row) in joint.iter().enumerate() {
        a.row_mut(i).copy_from_slice(&row[..k]);
        b.row_mut(i).copy_from_slice(&row[k..]);
    }
    let ab = groups
        .iter()
        .map(|g| {
            let mut m = a.clone();
            for &col in g {
                m.copy_column_from(&b, col);
            }
            m
        })
        .collect();
    Ok(SamplePlan { k, n, groups, a, b, ab, stream })
}

/// Model outputs over every matrix of a plan.
#[derive(Debug, Clone)]
pub struct PlanEvaluations<R> {
    pub f_a: Vec<R>,
    pub f_b: Vec<R>,
    pub f_ab: Vec<Vec<R>>,
}

pub fn evaluate_plan<R: Scalar, M: GsaModel<R>>(
    model: &M,
    plan: &SamplePlan<R>,
    parallel: bool,
) -> Result<PlanEvaluations<R>> {
    let f_a = evaluate_rows(model, &plan.a, parallel, "A")?;
    let f_b = evaluate_rows(model, &plan.b, parallel, "B")?;
    let f_ab = plan
        .ab
        .iter()
        .enumerate()
        .map(|(j, m)| evaluate_rows(model, m, parallel, &format!("AB_{}", j + 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PlanEvaluations { f_a, f_b, f_ab })
}

#[inline]
fn pick<R: Copy>(v: &[R], rows: Option<&[usize]>, i: usize) -> R {
    match rows {
        Some(r) => v[r[i]],
        None => v[i],
    }
}

/// Per-matrix means, the pooled mean, and the pooled population variance.
fn pooled_stats<R: Scalar>(
    f_a: &[R],
    f_b: &[R],
    rows: Option<&[usize]>,
) -> (R, R, R, R) {
    let n = rows.map_or(f_a.len(), <[usize]>::len);
    let nf = R::from_usize(n).unwrap();
    let mut sum_a = R::zero();
    let mut sum_b = R::zero();
    for i in 0..n {
        sum_a += pick(f_a, rows, i);
        sum_b += pick(f_b, rows, i);
    }
    let mean_a = sum_a / nf;
    let mean_b = sum_b / nf;
    let pooled_mean = (sum_a + sum_b) / (nf + nf);
    let mut ss = R::zero();
    for i in 0..n {
        let da = pick(f_a, rows, i) - pooled_mean;
        let db = pick(f_b, rows, i) - pooled_mean;
        ss += da * da + db * db;
    }
    (mean_a, mean_b, pooled_mean, ss / (nf + nf))
}

/// Homma–Saltelli main effect and Jansen total effect for one group.
///
/// The evaluations enter centered by the pooled mean: the estimator's
/// expectation is unchanged, but without centering its sampling noise scales
/// with the output mean, which is ruinous for outputs with mean >> sd (AUC).
fn group_indices<R: Scalar>(
    f_a: &[R],
    f_b: &[R],
    f_abj: &[R],
    rows: Option<&[usize]>,
    mean_a: R,
    mean_b: R,
    pooled_mean: R,
    vhat: R,
) -> (R, R) {
    let n = rows.map_or(f_a.len(), <[usize]>::len);
    let nf = R::from_usize(n).unwrap();
    let mut cross = R::zero();
    let mut jansen = R::zero();
    for i in 0..n {
        let fa = pick(f_a, rows, i);
        let fb = pick(f_b, rows, i) - pooled_mean;
        let fab = pick(f_abj, rows, i) - pooled_mean;
        cross += fb * fab;
        let d = fa - pooled_mean - fab;
        jansen += d * d;
    }
    let main = (cross / nf - (mean_a - pooled_mean) * (mean_b - pooled_mean)) / vhat;
    let total = jansen / (two::<R>() * nf) / vhat;
    (main, total)
}

fn all_indices<R: Scalar>(
    evals: &PlanEvaluations<R>,
    rows: Option<&[usize]>,
) -> Result<(Vec<R>, Vec<R>, R)> {
    let (mean_a, mean_b, pooled_mean, vhat) = pooled_stats(&evals.f_a, &evals.f_b, rows);
    if !(vhat > R::zero()) {
        return Err(Error::DegenerateOutput);
    }
    let mut mains = Vec::with_capacity(evals.f_ab.len());
    let mut totals = Vec::with_capacity(evals.f_ab.len());
    for f_abj in &evals.f_ab {
        let (m, t) =
            group_indices(&evals.f_a, &evals.f_b, f_abj, rows, mean_a, mean_b, pooled_mean, vhat);
        mains.push(m);
        totals.push(t);
    }
    Ok((mains, totals, vhat))
}

/// Point estimates from a fully evaluated plan. Small negative estimates are
/// reported as-is; no clipping.
pub fn estimate<R: Scalar>(
    plan: &SamplePlan<R>,
    evals: &PlanEvaluations<R>,
    labels: &[String],
) -> Result<SensitivityReport<R>> {
    assert_eq!(labels.len(), plan.groups.len(), "one label per group");
    let (mains, totals, vhat) = all_indices(evals, None)?;
    let factors = labels
        .iter()
        .zip(mains.iter().zip(totals.iter()))
        .map(|(name, (&main, &total))| FactorSensitivity {
            name: name.clone(),
            main,
            total,
            main_ci: None,
            total_ci: None,
        })
        .collect();
    Ok(SensitivityReport {
        method: "sobol".into(),
        factors,
        n: plan.n,
        seed: plan.stream.seed,
        bootstrap: None,
        evaluations: plan.n * (plan.groups.len() + 2),
        output_variance: vhat,
        rho: None,
        convergence: None,
    })
}

/// Bootstrap percentile intervals for each group.
#[derive(Debug, Clone, Copy)]
pub struct GroupIntervals<R> {
    pub main: (R, R),
    pub total: (R, R),
}

/// Resamples rows with replacement, keeping `A`/`B`/`AB_j` rows paired, and
/// returns the (2.5th, 97.5th) percentiles of the recomputed indices.
pub fn bootstrap<R: Scalar>(
    evals: &PlanEvaluations<R>,
    resamples: usize,
    stream: RandomStream,
) -> Result<Vec<GroupIntervals<R>>> {
    if resamples < 100 {
        return Err(Error::InvalidArgument(format!(
            "bootstrap needs at least 100 resamples, got {resamples}"
        )));
    }
    let n = evals.f_a.len();
    if n < 2 {
        return Err(Error::InvalidArgument("bootstrap needs more than one row".into()));
    }
    let g = evals.f_ab.len();
    let mut rng = stream.rng();
    let mut mains: Vec<Vec<R>> = vec![Vec::with_capacity(resamples); g];
    let mut totals: Vec<Vec<R>> = vec![Vec::with_capacity(resamples); g];
    let mut rows = vec![0usize; n];
    for _ in 0..resamples {
        for r in rows.iter_mut() {
            *r = rng.random_range(0..n);
        }
        let (m, t, _) = all_indices(evals, Some(&rows))?;
        for j in 0..g {
            mains[j].push(m[j]);
            totals[j].push(t[j]);
        }
    }
    Ok((0..g)
        .map(|j| GroupIntervals {
            main: percentile_interval(&mut mains[j]),
            total: percentile_interval(&mut totals[j]),
        })
        .collect())
}

/// (2.5th, 97.5th) percentiles by linear interpolation on the sorted sample.
fn percentile_interval<R: Scalar>(values: &mut [R]) -> (R, R) {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite index estimates"));
    (percentile_sorted(values, 0.025), percentile_sorted(values, 0.975))
}

fn percentile_sorted<R: Scalar>(sorted: &[R], q: f64) -> R {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = R::cast(pos - pos.floor());
    if lo + 1 >= sorted.len() {
        sorted[sorted.len() - 1]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

fn attach_bootstrap<R: Scalar>(
    report: &mut SensitivityReport<R>,
    evals: &PlanEvaluations<R>,
    resamples: usize,
    stream: RandomStream,
) -> Result<()> {
    if resamples == 0 {
        return Ok(());
    }
    let intervals = bootstrap(evals, resamples, stream)?;
    for (f, ci) in report.factors.iter_mut().zip(intervals) {
        debug_assert!(ci.main.0 <= ci.main.1 && ci.total.0 <= ci.total.1);
        f.main_ci = Some(ci.main);
        f.total_ci = Some(ci.total);
    }
    report.bootstrap = Some(resamples);
    Ok(())
}

/// Classical Sobol analysis treating every factor as independent.
///
/// Consumes stream ids `{stream.stream_id, stream.stream_id + 1}`: the plan
/// draws from the first, bootstrap resampling from the second.
pub fn run_independent<R: Scalar, M: GsaModel<R>>(
    model: &M,
    n: usize,
    stream: RandomStream,
    settings: SobolSettings,
) -> Result<SensitivityReport<R>> {
    let k = model.dimension();
    let groups: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
    let plan = build_plan(k, n, groups, stream, settings.sequence)?;
    let evals = evaluate_plan(model, &plan, settings.parallel)?;
    let mut report = estimate(&plan, &evals, &model.factor_names())?;
    report.method = "sobol_independent".into();
    attach_bootstrap(&mut report, &evals, settings.bootstrap, stream.substream(stream.stream_id + 1))?;
    Ok(report)
}

/// Grouped analysis: the model's correlated pair is sampled jointly and
/// pick-frozen as one group (listed first), remaining factors singly.
pub fn estimate_grouped_pair<R: Scalar, M: GsaModel<R>>(
    model: &M,
    rho: R,
    n: usize,
    stream: RandomStream,
    settings: SobolSettings,
) -> Result<SensitivityReport<R>> {
    let names = model.factor_names();
    let correlated = PairCorrelated::new(model, rho)?;
    let (i, j) = correlated.correlated_pair().expect("pair checked in constructor");
    let k = correlated.dimension();
    let mut groups: Vec<Vec<usize>> = vec![vec![i, j]];
    let mut labels: Vec<String> = vec![format!("{}+{}", names[i], names[j])];
    for f in 0..k {
        if f != i && f != j {
            groups.push(vec![f]);
            labels.push(names[f].clone());
        }
    }
    let plan = build_plan(k, n, groups, stream, settings.sequence)?;
    let evals = evaluate_plan(&correlated, &plan, settings.parallel)?;
    let mut report = estimate(&plan, &evals, &labels)?;
    report.method = "sobol_grouped".into();
    report.rho = rho.to_f64();
    attach_bootstrap(&mut report, &evals, settings.bootstrap, stream.substream(stream.stream_id + 1))?;
    Ok(report)
}
