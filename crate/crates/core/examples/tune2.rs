use cfn_core::harness::{cross_validate, fit_with_params, ChosenParams};
use cfn_core::*;

fn main() {
    for alpha in [0.125, 0.25, 0.375, 0.5, 0.75, 1.0, 1.5] {
        let mut plan = CvPlan::default_for(1);
        plan.width = CfnWidth::GapScaled { alpha };
        let mut te_acc = 0.0;
        let mut tr_acc = 0.0;
        let mut picks = Vec::new();
        let trials = 5;
        for t in 0..trials {
            let ds = DatasetSpec::new(TargetFn::F1, 1, 1024, 1000).with_seed(1 + t);
            let (train, test) = generate(&ds).unwrap();
            let cv = cross_validate(&train, &plan, Method::Cfn, ds.seed).unwrap();
            let model = fit_with_params(&train, &plan, &cv.chosen, ds.seed).unwrap();
            te_acc += rmse(&model.predict_samples(&test), test.outputs()).unwrap();
            tr_acc += rmse(&model.predict_samples(&train), train.outputs()).unwrap();
            if let ChosenParams::Cfn { n, r } = cv.chosen { picks.push((n, r)); }
        }
        println!(
            "alpha={alpha:6}: train={:.4} test={:.4} picks={picks:?}",
            tr_acc / trials as f64, te_acc / trials as f64
        );
    }
}
