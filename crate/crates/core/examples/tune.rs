use cfn_core::harness::experiments;
use cfn_core::*;
use std::time::Instant;

fn bench_cfn(target: TargetFn, d: usize, m: usize, trials: usize, width: CfnWidth) -> (f64, f64, f64) {
    let mut plan = CvPlan::default_for(d);
    plan.width = width;
    let spec = BenchSpec {
        dataset: DatasetSpec::new(target, d, m, 1000).with_seed(1),
        trials,
        methods: vec![Method::Cfn],
        plan,
    };
    let rep = run_benchmark(&spec).unwrap();
    let row = rep.row(Method::Cfn).unwrap();
    (row.train_rmse_mean, row.test_rmse_mean, row.test_rmse_std)
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(|s| s.as_str()).unwrap_or("alpha");
    match mode {
        "alpha" => {
            for alpha in [1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0] {
                let t0 = Instant::now();
                let (tr, te, sd) = bench_cfn(TargetFn::F1, 1, 1024, 5, CfnWidth::GapScaled { alpha });
                println!("f1 alpha={alpha:5}: train={tr:.4} test={te:.4} (sd {sd:.4})  [{:.1}s]", t0.elapsed().as_secs_f64());
            }
            let (tr, te, sd) = bench_cfn(TargetFn::F1, 1, 1024, 5, CfnWidth::Auto { s: 2.0 });
            println!("f1 auto      : train={tr:.4} test={te:.4} (sd {sd:.4})");
        }
        "f2" => {
            for alpha in [2.0, 4.0, 8.0] {
                let (tr, te, sd) = bench_cfn(TargetFn::F2, 1, 1024, 5, CfnWidth::GapScaled { alpha });
                println!("f2 alpha={alpha:5}: train={tr:.4} test={te:.4} (sd {sd:.4})");
            }
        }
        "f5" => {
            for alpha in [2.0, 4.0, 8.0] {
                let t0 = Instant::now();
                let (tr, te, sd) = bench_cfn(TargetFn::F5, 5, 1024, 5, CfnWidth::GapScaled { alpha });
                println!("f5 d=5 alpha={alpha:5}: train={tr:.4} test={te:.4} (sd {sd:.4}) [{:.1}s]", t0.elapsed().as_secs_f64());
            }
        }
        "baselines" => {
            let plan = CvPlan::default_for(1);
            let spec = BenchSpec {
                dataset: DatasetSpec::new(TargetFn::F1, 1, 1024, 1000).with_seed(1),
                trials: 3,
                methods: vec![Method::Elm, Method::Krr],
                plan,
            };
            let t0 = Instant::now();
            let rep = run_benchmark(&spec).unwrap();
            for row in &rep.rows {
                println!(
                    "{}: train={:.4} test={:.4} (sd {:.4}) cv_time={:.2}s fit={:.3}s [total {:.1}s]",
                    row.method, row.train_rmse_mean, row.test_rmse_mean, row.test_rmse_std,
                    row.cv_time_s, row.fit_time_s, t0.elapsed().as_secs_f64()
                );
                for f in &row.failures { println!("  FAIL: {f}"); }
            }
        }
        "rate" => {
            let plan = CvPlan::default_for(1);
            let ds = DatasetSpec::new(TargetFn::F1, 1, 0, 1000).with_seed(1);
            let pts = experiments::rate_trend(&ds, &plan, &[512, 2048, 8192], 5).unwrap();
            for (m, r) in &pts {
                println!("m={m:6} rmse={r:.4}");
            }
            println!("slope = {:.3}", experiments::log_log_slope(&pts));
        }
        _ => eprintln!("unknown mode"),
    }
}
