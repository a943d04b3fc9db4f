//! Parameter studies behind the benchmark claims: iteration benefit, width
//! plateau, sample-size rate trend, and training-cost scaling.

use std::time::Instant;

use crate::benchdata::{generate, DatasetSpec};
use crate::cfn::CfnModel;
use crate::error::Result;
use crate::harness::{
    build_chain, cross_validate, fit_with_params, rmse, ChosenParams, CvPlan, Method,
};

/// Mean test RMSE per iteration order, selecting `n` by cross-validation
/// separately for each order.
pub fn per_order_test_rmse(
    dataset: &DatasetSpec,
    plan: &CvPlan,
    trials: usize,
) -> Result<Vec<(usize, f64)>> {
    let orders = plan.r_grid.clone();
    let mut acc = vec![0.0; orders.len()];
    for trial in 0..trials {
        let ds = dataset.clone().with_seed(dataset.seed.wrapping_add(trial as u64));
        let (train, test) = generate(&ds)?;
        for (oi, &r) in orders.iter().enumerate() {
            let mut p = plan.clone();
            p.r_grid = vec![r];
            let cv = cross_validate(&train, &p, Method::Cfn, ds.seed)?;
            let model = fit_with_params(&train, &p, &cv.chosen, ds.seed)?;
            acc[oi] += rmse(&model.predict_samples(&test), test.outputs())?;
        }
    }
    Ok(orders.iter().zip(acc).map(|(&r, a)| (r, a / trials as f64)).collect())
}

#[derive(Debug, Clone)]
pub struct PlateauResult {
    pub rmse_at_recommended: f64,
    pub rmse_at_10x: f64,
}

impl PlateauResult {
    /// Relative change between the two widths.
    pub fn relative_difference(&self) -> f64 {
        (self.rmse_at_recommended - self.rmse_at_10x).abs()
            / self.rmse_at_recommended.max(f64::MIN_POSITIVE)
    }
}

/// Test RMSE at the theory width and at ten times it, with `n` and `r`
/// selected by cross-validation per trial. Past the theory width the sigmoid
/// already separates every cell, so the fit stops depending on `w`.
pub fn w_plateau(dataset: &DatasetSpec, plan: &CvPlan, trials: usize) -> Result<PlateauResult> {
    let mut at_w = 0.0;
    let mut at_10w = 0.0;
    for trial in 0..trials {
        let ds = dataset.clone().with_seed(dataset.seed.wrapping_add(trial as u64));
        let (train, test) = generate(&ds)?;
        let cv = cross_validate(&train, plan, Method::Cfn, ds.seed)?;
        let ChosenParams::Cfn { n, r } = cv.chosen else { unreachable!() };
        let w_rec = plan.activation.recommended_w(n, ds.d, 2.0)?;
        for (slot, w) in [(&mut at_w, w_rec), (&mut at_10w, 10.0 * w_rec)] {
            let chain = build_chain(&train, n)?;
            let model =
                CfnModel::train(chain, plan.activation, w, r, &train, plan.empty_cell)?;
            *slot += rmse(&model.predict_samples(&test), test.outputs())?;
        }
    }
    Ok(PlateauResult {
        rmse_at_recommended: at_w / trials as f64,
        rmse_at_10x: at_10w / trials as f64,
    })
}

/// Mean test RMSE at several training sizes, cross-validating per size.
pub fn rate_trend(
    dataset: &DatasetSpec,
    plan: &CvPlan,
    train_sizes: &[usize],
    trials: usize,
) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::with_capacity(train_sizes.len());
    for &m in train_sizes {
        let mut acc = 0.0;
        for trial in 0..trials {
            let mut ds = dataset.clone().with_seed(dataset.seed.wrapping_add(trial as u64));
            ds.m_train = m;
            let (train, test) = generate(&ds)?;
            let cv = cross_validate(&train, plan, Method::Cfn, ds.seed)?;
            let model = fit_with_params(&train, plan, &cv.chosen, ds.seed)?;
            acc += rmse(&model.predict_samples(&test), test.outputs())?;
        }
        out.push((m, acc / trials as f64));
    }
    Ok(out)
}

/// Least-squares slope of `log rmse` against `log m`.
pub fn log_log_slope(points: &[(usize, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(m, _)| (m as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, r)| r.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Wall-clock seconds to train the constructive network at fixed `(n, r)`,
/// the median of `reps` runs. Runs strictly sequentially.
pub fn train_seconds(
    dataset: &DatasetSpec,
    n: usize,
    r: usize,
    w_alpha: f64,
    reps: usize,
) -> Result<f64> {
    let (train, _) = generate(dataset)?;
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let chain = build_chain(&train, n)?;
        let w = crate::harness::CfnWidth::GapScaled { alpha: w_alpha }
            .resolve(&chain, crate::activation::Sigmoid::Logistic)?;
        let t0 = Instant::now();
        let model = CfnModel::train(
            chain,
            crate::activation::Sigmoid::Logistic,
            w,
            r,
            &train,
            crate::cfn::EmptyCellRule::ZeroMean,
        )?;
        times.push(t0.elapsed().as_secs_f64());
        std::hint::black_box(model.coeffs()[0]);
    }
    times.sort_by(f64::total_cmp);
    Ok(times[times.len() / 2])
}
