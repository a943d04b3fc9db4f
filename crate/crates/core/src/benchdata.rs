//! Synthetic regression targets, the noise model, and dataset generation.
//!
//! The one-dimensional targets live on `[-1, 1]`. For d > 1 the domain is the
//! centered cube `[-1/sqrt(d), 1/sqrt(d)]^d`, the natural generalization of
//! the one-dimensional interval: every point has Euclidean norm at most 1, so
//! the radial targets below (whose interesting region is the unit ball) vary
//! over their full profile exactly as the 1-d targets do over `[-1, 1]`.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cfn::SampleSet;
use crate::error::{Error, Result};
use crate::geometry::AxisBox;

/// The five synthetic regression targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetFn {
    F1,
    F2,
    F3,
    F4,
    F5,
}

/// `1 + 80/3 t^2 - 40 t^3 + 15 t^4 + 8/3 t^5 + 20 t^2 ln t` for `t >= 0`,
/// with the removable singularity `t^2 ln t -> 0` at zero. Lipschitz but with
/// unbounded second derivative at the origin.
fn radial_profile_rough(t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let log_term = if t == 0.0 { 0.0 } else { 20.0 * t * t * t.ln() };
    1.0 + 80.0 / 3.0 * t * t - 40.0 * t.powi(3) + 15.0 * t.powi(4) + 8.0 / 3.0 * t.powi(5)
        + log_term
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl TargetFn {
    pub fn all() -> [TargetFn; 5] {
        [TargetFn::F1, TargetFn::F2, TargetFn::F3, TargetFn::F4, TargetFn::F5]
    }

    /// Dimensions the benchmark uses for this target.
    pub fn valid_dims(&self) -> &'static [usize] {
        match self {
            TargetFn::F1 | TargetFn::F2 => &[1],
            TargetFn::F3 => &[2, 3],
            TargetFn::F4 => &[5],
            TargetFn::F5 => &[2, 3, 5],
        }
    }

    /// The smoothness order `s` the target is known to have (and not exceed).
    pub fn smoothness_s(&self) -> f64 {
        match self {
            TargetFn::F1 | TargetFn::F5 => 1.0,
            TargetFn::F2 | TargetFn::F3 | TargetFn::F4 => 4.0,
        }
    }

    /// Evaluate the target. The plus-part `(.)_+` is applied before powers;
    /// logarithms are natural; `0^2 log 0 = 0`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TargetFn::F1 => {
                debug_assert_eq!(x.len(), 1);
                radial_profile_rough(x[0].abs())
            }
            TargetFn::F2 => {
                debug_assert_eq!(x.len(), 1);
                let t = x[0];
                let plus = (1.0 - t).max(0.0);
                plus.powi(5) * (8.0 * t * t + 5.0 * t + 1.0)
            }
            TargetFn::F3 => {
                let r = norm2(x);
                let plus = (1.0 - r).max(0.0);
                plus.powi(6) * (35.0 / 3.0 * r * r + 6.0 * r + 1.0)
            }
            TargetFn::F4 => {
                let r = norm2(x);
                let plus = (1.0 - r).max(0.0);
                plus.powi(7)
                    * (35.0 * r.powi(6)
                        + 245.0 * r.powi(5)
                        + 720.0 * r.powi(4)
                        + 1120.0 * r.powi(3)
                        + 928.0 * r * r
                        + 336.0 * r
                        + 48.0)
            }
            TargetFn::F5 => radial_profile_rough(norm2(x)),
        }
    }
}

impl fmt::Display for TargetFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TargetFn::F1 => "f1",
            TargetFn::F2 => "f2",
            TargetFn::F3 => "f3",
            TargetFn::F4 => "f4",
            TargetFn::F5 => "f5",
        };
        f.write_str(s)
    }
}

impl FromStr for TargetFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(TargetFn::F1),
            "f2" => Ok(TargetFn::F2),
            "f3" => Ok(TargetFn::F3),
            "f4" => Ok(TargetFn::F4),
            "f5" => Ok(TargetFn::F5),
            other => Err(Error::Parse(format!("unknown target function: {other}"))),
        }
    }
}

/// Input domain used for center placement and sampling: `[-1, 1]` for d = 1
/// and `[-1/sqrt(d), 1/sqrt(d)]^d` otherwise (see module docs).
pub fn domain_for(d: usize) -> AxisBox {
    if d <= 1 {
        AxisBox::interval(-1.0, 1.0).expect("static bounds")
    } else {
        AxisBox::symmetric(d, 1.0 / (d as f64).sqrt()).expect("static bounds")
    }
}

/// Everything needed to generate one train/test pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub target: TargetFn,
    pub d: usize,
    pub m_train: usize,
    pub m_test: usize,
    /// Variance of the additive Gaussian train noise (test data is noise free).
    pub noise_variance: f64,
    pub seed: u64,
}

impl DatasetSpec {
    pub fn new(target: TargetFn, d: usize, m_train: usize, m_test: usize) -> Self {
        DatasetSpec { target, d, m_train, m_test, noise_variance: 0.1, seed: 0 }
    }

    pub fn with_noise(mut self, variance: f64) -> Self {
        self.noise_variance = variance;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.target.valid_dims().contains(&self.d) {
            return Err(Error::invalid(format!(
                "{} is defined for d in {:?}, got {}",
                self.target,
                self.target.valid_dims(),
                self.d
            )));
        }
        if self.m_train == 0 || self.m_test == 0 {
            return Err(Error::invalid("m_train and m_test must be at least 1"));
        }
        if !(self.noise_variance >= 0.0) {
            return Err(Error::invalid("noise variance must be nonnegative"));
        }
        Ok(())
    }

    pub fn domain(&self) -> AxisBox {
        domain_for(self.d)
    }
}

/// Generate `(train, test)`: inputs i.i.d. uniform on the domain, train
/// outputs `f(x) + N(0, noise_variance)`, test outputs `f(x)` exactly.
/// Deterministic for a fixed seed; the stream order is train inputs, train
/// noise, test inputs.
pub fn generate(spec: &DatasetSpec) -> Result<(SampleSet, SampleSet)> {
    spec.validate()?;
    let domain = spec.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sd = spec.noise_variance.sqrt();

    let mut train_x = Vec::with_capacity(spec.m_train * spec.d);
    for _ in 0..spec.m_train {
        train_x.extend(domain.sample(&mut rng));
    }
    let mut train_y = Vec::with_capacity(spec.m_train);
    for i in 0..spec.m_train {
        let x = &train_x[i * spec.d..(i + 1) * spec.d];
        let z: f64 = StandardNormal.sample(&mut rng);
        train_y.push(spec.target.eval(x) + sd * z);
    }

    let mut test_x = Vec::with_capacity(spec.m_test * spec.d);
    for _ in 0..spec.m_test {
        test_x.extend(domain.sample(&mut rng));
    }
    let test_y: Vec<f64> = (0..spec.m_test)
        .map(|i| spec.target.eval(&test_x[i * spec.d..(i + 1) * spec.d]))
        .collect();

    Ok((
        SampleSet::new(spec.d, train_x, train_y)?,
        SampleSet::new(spec.d, test_x, test_y)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f2_boundary_values() {
        assert_eq!(TargetFn::F2.eval(&[1.0]), 0.0);
        assert_eq!(TargetFn::F2.eval(&[0.0]), 1.0);
        assert_eq!(TargetFn::F2.eval(&[2.0]), 0.0);
    }

    #[test]
    fn f1_at_one_direct_substitution() {
        // 1 + 80/3 - 40 + 15 + 8/3 + 0 = 16/3
        let want = 1.0 + 80.0 / 3.0 - 40.0 + 15.0 + 8.0 / 3.0;
        assert!((TargetFn::F1.eval(&[1.0]) - want).abs() < 1e-12);
        assert!((want - 16.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn f1_is_even_and_finite_at_zero() {
        for x in [0.1, 0.33, 0.5, 0.77, 1.0] {
            assert_eq!(TargetFn::F1.eval(&[x]), TargetFn::F1.eval(&[-x]));
        }
        assert_eq!(TargetFn::F1.eval(&[0.0]), 1.0);
    }

    #[test]
    fn f3_vanishes_outside_unit_ball() {
        assert_eq!(TargetFn::F3.eval(&[1.0, 0.0]), 0.0);
        assert_eq!(TargetFn::F3.eval(&[0.9, 0.9]), 0.0);
        assert!(TargetFn::F3.eval(&[0.2, 0.1]) > 0.0);
        assert_eq!(TargetFn::F3.eval(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn f4_center_value() {
        assert_eq!(TargetFn::F4.eval(&[0.0; 5]), 48.0);
        assert_eq!(TargetFn::F4.eval(&[0.6; 5]), 0.0); // norm > 1
    }

    #[test]
    fn radial_targets_depend_only_on_norm() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for f in [TargetFn::F3, TargetFn::F4, TargetFn::F5] {
            let d = 5;
            for _ in 0..50 {
                let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>() - 0.5).collect();
                let r = norm2(&x);
                // rotate onto an axis: same norm, different direction
                let mut y = vec![0.0; d];
                y[0] = r;
                let fx = f.eval(&x);
                let fy = f.eval(&y);
                assert!((fx - fy).abs() < 1e-9, "{f}: {fx} vs {fy}");
            }
        }
    }

    #[test]
    fn f5_matches_f1_profile_on_axis() {
        for t in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let f5 = TargetFn::F5.eval(&[t, 0.0]);
            let f1 = TargetFn::F1.eval(&[t]);
            assert!((f5 - f1).abs() < 1e-12);
        }
    }

    #[test]
    fn domain_keeps_norm_inside_unit_ball() {
        for d in [2usize, 3, 5] {
            let b = domain_for(d);
            let corner: f64 = b.hi().iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((corner - 1.0).abs() < 1e-12, "d={d}");
        }
        assert_eq!(domain_for(1).lo(), &[-1.0]);
        assert_eq!(domain_for(1).hi(), &[1.0]);
    }

    #[test]
    fn zero_noise_is_exact() {
        let spec =
            DatasetSpec::new(TargetFn::F1, 1, 64, 16).with_noise(0.0).with_seed(5);
        let (train, _test) = generate(&spec).unwrap();
        for i in 0..train.m() {
            assert_eq!(train.output(i), TargetFn::F1.eval(train.input(i)));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = DatasetSpec::new(TargetFn::F3, 2, 100, 50).with_seed(99);
        let (a1, b1) = generate(&spec).unwrap();
        let (a2, b2) = generate(&spec).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
        let other = generate(&spec.clone().with_seed(100)).unwrap();
        assert_ne!(a1, other.0);
    }

    #[test]
    fn noise_standard_deviation_near_target() {
        let spec = DatasetSpec::new(TargetFn::F1, 1, 100_000, 1).with_seed(12);
        let (train, _) = generate(&spec).unwrap();
        let resid: Vec<f64> = (0..train.m())
            .map(|i| train.output(i) - TargetFn::F1.eval(train.input(i)))
            .collect();
        let mean = resid.iter().sum::<f64>() / resid.len() as f64;
        let var =
            resid.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (resid.len() - 1) as f64;
        let sd = var.sqrt();
        assert!((0.31..=0.32).contains(&sd), "sd = {sd}");

        // lag-1 autocorrelation consistent with independence
        let mut acc = 0.0;
        for i in 1..resid.len() {
            acc += (resid[i] - mean) * (resid[i - 1] - mean);
        }
        let rho = acc / ((resid.len() - 1) as f64 * var);
        assert!(rho.abs() <= 3.0 / (resid.len() as f64).sqrt(), "rho = {rho}");
    }

    #[test]
    fn test_outputs_are_noise_free() {
        let spec = DatasetSpec::new(TargetFn::F2, 1, 16, 200).with_seed(3);
        let (_, test) = generate(&spec).unwrap();
        for i in 0..test.m() {
            assert_eq!(test.output(i), TargetFn::F2.eval(test.input(i)));
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(generate(&DatasetSpec::new(TargetFn::F1, 2, 10, 10)).is_err());
        assert!(generate(&DatasetSpec::new(TargetFn::F4, 3, 10, 10)).is_err());
        assert!(generate(&DatasetSpec::new(TargetFn::F1, 1, 0, 10)).is_err());
        let mut bad = DatasetSpec::new(TargetFn::F1, 1, 10, 10);
        bad.noise_variance = -1.0;
        assert!(generate(&bad).is_err());
    }

    #[test]
    fn target_names_round_trip() {
        for f in TargetFn::all() {
            assert_eq!(f.to_string().parse::<TargetFn>().unwrap(), f);
        }
        assert!("f6".parse::<TargetFn>().is_err());
    }
}
