//! Comparison learners: a random-hidden-layer network solved by minimum-norm
//! least squares (ELM) and Gaussian-kernel regularized least squares.

use ndarray::{Array1, Array2};
use ndarray_linalg::{cholesky::*, svddc::JobSvd, SVDDC, UPLO};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::activation::Sigmoid;
use crate::cfn::SampleSet;
use crate::error::{Error, Result};
use crate::geometry::dist_sq;

/// Singular values below `RELATIVE_SV_CUTOFF * s_max` are truncated in the
/// minimum-norm solve.
const RELATIVE_SV_CUTOFF: f64 = 1e-10;

/// Random single-hidden-layer network with least-squares outer weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ElmModel {
    activation: Sigmoid,
    /// `n_hidden x d` inner weights.
    hidden_weights: Array2<f64>,
    hidden_biases: Array1<f64>,
    outer_weights: Array1<f64>,
}

/// Draw hidden parameters i.i.d. uniform on `[-1, 1]` and solve the linear
/// least-squares problem for the outer weights by a rank-revealing SVD
/// (minimum-norm solution; degenerate columns are handled by truncation).
pub fn elm_train(
    samples: &SampleSet,
    n_hidden: usize,
    activation: Sigmoid,
    seed: u64,
) -> Result<ElmModel> {
    if n_hidden == 0 {
        return Err(Error::invalid("n_hidden must be at least 1"));
    }
    let d = samples.d();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hidden_weights = Array2::zeros((n_hidden, d));
    let mut hidden_biases = Array1::zeros(n_hidden);
    for k in 0..n_hidden {
        for j in 0..d {
            hidden_weights[[k, j]] = rng.random::<f64>() * 2.0 - 1.0;
        }
        hidden_biases[k] = rng.random::<f64>() * 2.0 - 1.0;
    }
    let mut model = ElmModel {
        activation,
        hidden_weights,
        hidden_biases,
        outer_weights: Array1::zeros(n_hidden),
    };
    let h = model.design_matrix(samples);
    let y = Array1::from_vec(samples.outputs().to_vec());
    model.outer_weights = min_norm_lstsq(&h, &y)?;
    Ok(model)
}

/// Minimum-norm least-squares solution of `H x ~ y` via thin SVD with
/// relative singular-value truncation.
fn min_norm_lstsq(h: &Array2<f64>, y: &Array1<f64>) -> Result<Array1<f64>> {
    let (u, s, vt) = h
        .svddc(JobSvd::Some)
        .map_err(|e| Error::Linalg(format!("svd failed: {e}")))?;
    let u = u.ok_or_else(|| Error::Linalg("svd returned no U".into()))?;
    let vt = vt.ok_or_else(|| Error::Linalg("svd returned no VT".into()))?;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let cutoff = RELATIVE_SV_CUTOFF * smax;
    let mut z = u.t().dot(y);
    for (zi, &si) in z.iter_mut().zip(s.iter()) {
        if si > cutoff && si > 0.0 {
            *zi /= si;
        } else {
            *zi = 0.0;
        }
    }
    Ok(vt.t().dot(&z))
}

impl ElmModel {
    fn design_matrix(&self, samples: &SampleSet) -> Array2<f64> {
        let m = samples.m();
        let n = self.hidden_weights.nrows();
        let mut h = Array2::zeros((m, n));
        for (i, x) in samples.inputs().enumerate() {
            for k in 0..n {
                let mut t = self.hidden_biases[k];
                for (j, &xj) in x.iter().enumerate() {
                    t += self.hidden_weights[[k, j]] * xj;
                }
                h[[i, k]] = self.activation.eval(t);
            }
        }
        h
    }

    pub fn n_hidden(&self) -> usize {
        self.hidden_weights.nrows()
    }

    pub fn d(&self) -> usize {
        self.hidden_weights.ncols()
    }

    pub fn activation(&self) -> Sigmoid {
        self.activation
    }

    pub fn hidden_weights(&self) -> &Array2<f64> {
        &self.hidden_weights
    }

    pub fn hidden_biases(&self) -> &Array1<f64> {
        &self.hidden_biases
    }

    pub fn outer_weights(&self) -> &Array1<f64> {
        &self.outer_weights
    }

    pub(crate) fn from_parts(
        activation: Sigmoid,
        hidden_weights: Array2<f64>,
        hidden_biases: Array1<f64>,
        outer_weights: Array1<f64>,
    ) -> Result<Self> {
        if hidden_weights.nrows() != hidden_biases.len()
            || hidden_weights.nrows() != outer_weights.len()
        {
            return Err(Error::invalid("inconsistent ELM component sizes"));
        }
        Ok(ElmModel { activation, hidden_weights, hidden_biases, outer_weights })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.n_hidden() {
            let mut t = self.hidden_biases[k];
            for (j, &xj) in x.iter().enumerate() {
                t += self.hidden_weights[[k, j]] * xj;
            }
            acc += self.outer_weights[k] * self.activation.eval(t);
        }
        acc
    }

    pub fn predict_samples(&self, samples: &SampleSet) -> Vec<f64> {
        samples.inputs().map(|x| self.predict(x)).collect()
    }

    /// Sum of squared training residuals for a given outer-weight vector;
    /// used to check least-squares optimality.
    pub fn residual_sq_with(&self, samples: &SampleSet, outer: &[f64]) -> f64 {
        let h = self.design_matrix(samples);
        let mut acc = 0.0;
        for (i, &y) in samples.outputs().iter().enumerate() {
            let mut p = 0.0;
            for k in 0..self.n_hidden() {
                p += h[[i, k]] * outer[k];
            }
            acc += (p - y) * (p - y);
        }
        acc
    }
}

/// Gaussian-kernel ridge regression in dual form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrrModel {
    d: usize,
    /// Support inputs, row-major (the training inputs).
    support: Vec<f64>,
    dual_coeffs: Vec<f64>,
    kernel_width: f64,
    ridge: f64,
}

/// `k(x, x') = exp(-|x - x'|^2 / gamma^2)`.
#[inline]
pub fn gaussian_kernel(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    (-dist_sq(x, y) / (gamma * gamma)).exp()
}

/// Solve `(K + m λ I) α = y` by a symmetric positive-definite factorization;
/// a failed factorization gets one retry with `1e-10` jitter on the diagonal.
pub fn krr_train(samples: &SampleSet, gamma: f64, lambda: f64) -> Result<KrrModel> {
    if gamma <= 0.0 || lambda <= 0.0 {
        return Err(Error::invalid("gamma and lambda must be positive"));
    }
    let m = samples.m();
    let mut a = Array2::zeros((m, m));
    for i in 0..m {
        for j in 0..=i {
            let k = gaussian_kernel(samples.input(i), samples.input(j), gamma);
            a[[i, j]] = k;
            a[[j, i]] = k;
        }
    }
    let ridge = m as f64 * lambda;
    for i in 0..m {
        a[[i, i]] += ridge;
    }
    let y = Array1::from_vec(samples.outputs().to_vec());
    let alpha = match a.factorizec(UPLO::Lower) {
        Ok(f) => f.solvec(&y).map_err(|e| Error::Linalg(format!("krr solve: {e}")))?,
        Err(_) => {
            for i in 0..m {
                a[[i, i]] += 1e-10;
            }
            let f = a
                .factorizec(UPLO::Lower)
                .map_err(|e| Error::Linalg(format!("krr factorization: {e}")))?;
            f.solvec(&y).map_err(|e| Error::Linalg(format!("krr solve: {e}")))?
        }
    };
    let mut support = Vec::with_capacity(m * samples.d());
    for x in samples.inputs() {
        support.extend_from_slice(x);
    }
    Ok(KrrModel {
        d: samples.d(),
        support,
        dual_coeffs: alpha.to_vec(),
        kernel_width: gamma,
        ridge: lambda,
    })
}

impl KrrModel {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.dual_coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dual_coeffs.is_empty()
    }

    pub fn kernel_width(&self) -> f64 {
        self.kernel_width
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn dual_coeffs(&self) -> &[f64] {
        &self.dual_coeffs
    }

    pub fn support_input(&self, i: usize) -> &[f64] {
        &self.support[i * self.d..(i + 1) * self.d]
    }

    pub(crate) fn from_parts(
        d: usize,
        support: Vec<f64>,
        dual_coeffs: Vec<f64>,
        kernel_width: f64,
        ridge: f64,
    ) -> Result<Self> {
        if d == 0 || support.len() != dual_coeffs.len() * d {
            return Err(Error::invalid("inconsistent KRR component sizes"));
        }
        Ok(KrrModel { d, support, dual_coeffs, kernel_width, ridge })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, &alpha) in self.dual_coeffs.iter().enumerate() {
            acc += alpha * gaussian_kernel(x, self.support_input(i), self.kernel_width);
        }
        acc
    }

    pub fn predict_samples(&self, samples: &SampleSet) -> Vec<f64> {
        samples.inputs().map(|x| self.predict(x)).collect()
    }

    /// Relative residual `|(K + m λ I) α - y| / |y|` of the training system.
    pub fn system_residual(&self, samples: &SampleSet) -> f64 {
        let m = self.len();
        let ridge = m as f64 * self.ridge;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..m {
            let mut row = 0.0;
            for j in 0..m {
                row += gaussian_kernel(self.support_input(i), self.support_input(j), self.kernel_width)
                    * self.dual_coeffs[j];
            }
            row += ridge * self.dual_coeffs[i];
            let y = samples.output(i);
            num += (row - y) * (row - y);
            den += y * y;
        }
        (num / den.max(f64::MIN_POSITIVE)).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_samples(m: usize, d: usize, seed: u64) -> SampleSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..m * d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let ys: Vec<f64> = (0..m)
            .map(|i| {
                let x = &xs[i * d..(i + 1) * d];
                x.iter().map(|v| (2.0 * v).sin()).sum::<f64>() + 0.05 * (i as f64).cos()
            })
            .collect();
        SampleSet::new(d, xs, ys).unwrap()
    }

    #[test]
    fn elm_interpolates_square_system() {
        // the square system is well conditioned only while it is small; the
        // sigmoid columns become numerically dependent quickly
        let samples = random_samples(6, 1, 1);
        let model = elm_train(&samples, 6, Sigmoid::Logistic, 7).unwrap();
        let pred = model.predict_samples(&samples);
        let rmse = crate::harness::rmse(&pred, samples.outputs()).unwrap();
        assert!(rmse <= 1e-6, "rmse = {rmse}");
    }

    #[test]
    fn elm_zero_targets_give_zero_weights() {
        let mut samples = random_samples(30, 2, 2);
        samples = SampleSet::new(2, samples.inputs().flatten().copied().collect(), vec![0.0; 30])
            .unwrap();
        let model = elm_train(&samples, 12, Sigmoid::Logistic, 3).unwrap();
        assert!(model.outer_weights().iter().all(|&c| c == 0.0));
        assert_eq!(model.predict(&[0.3, -0.4]), 0.0);
    }

    #[test]
    fn elm_single_unit_constant() {
        let samples = random_samples(10, 1, 4);
        let mut model = elm_train(&samples, 1, Sigmoid::Logistic, 5).unwrap();
        model.hidden_weights[[0, 0]] = 0.0;
        model.hidden_biases[0] = 0.0;
        model.outer_weights[0] = 1.0;
        for x in [-5.0, 0.0, 2.5] {
            assert_eq!(model.predict(&[x]), 0.5);
        }
    }

    #[test]
    fn elm_predict_matches_plain_sum() {
        let samples = random_samples(25, 3, 6);
        let model = elm_train(&samples, 17, Sigmoid::TanhSigmoid, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            // independent re-implementation of the forward sum
            let mut want = 0.0;
            for k in 0..model.n_hidden() {
                let mut t = model.hidden_biases()[k];
                for j in 0..3 {
                    t += model.hidden_weights()[[k, j]] * x[j];
                }
                want += model.outer_weights()[k] * 0.5 * (t.tanh() + 1.0);
            }
            assert!((model.predict(&x) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn elm_same_seed_identical() {
        let samples = random_samples(50, 2, 11);
        let a = elm_train(&samples, 16, Sigmoid::Logistic, 99).unwrap();
        let b = elm_train(&samples, 16, Sigmoid::Logistic, 99).unwrap();
        assert_eq!(a, b);
        let c = elm_train(&samples, 16, Sigmoid::Logistic, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn elm_least_squares_optimality_vs_perturbations() {
        let samples = random_samples(60, 1, 12);
        let model = elm_train(&samples, 12, Sigmoid::Logistic, 13).unwrap();
        let base: Vec<f64> = model.outer_weights().to_vec();
        let best = model.residual_sq_with(&samples, &base);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let perturbed: Vec<f64> =
                base.iter().map(|&c| c + 0.05 * (rng.random::<f64>() - 0.5)).collect();
            let r = model.residual_sq_with(&samples, &perturbed);
            assert!(best <= r + 1e-12);
        }
    }

    #[test]
    fn elm_handles_degenerate_column() {
        // a constant zero column arises from outer weights it cannot affect
        let samples = random_samples(20, 1, 15);
        // n_hidden > m makes the system rank deficient; must not fail
        let model = elm_train(&samples, 64, Sigmoid::Logistic, 16).unwrap();
        assert!(model.outer_weights().iter().all(|c| c.is_finite()));
    }

    #[test]
    fn krr_single_sample_closed_form() {
        let samples = SampleSet::new(1, vec![0.4], vec![2.0]).unwrap();
        for lambda in [0.5, 1.0, 3.0] {
            let model = krr_train(&samples, 1.0, lambda).unwrap();
            // alpha = y / (1 + lambda); k(x, x) = 1
            let want = 2.0 / (1.0 + lambda);
            assert!((model.predict(&[0.4]) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn krr_interpolates_at_tiny_ridge() {
        let samples = SampleSet::new(1, vec![0.4], vec![2.0]).unwrap();
        let model = krr_train(&samples, 1.0, 1e-14).unwrap();
        assert!((model.predict(&[0.4]) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn krr_large_ridge_shrinks_to_zero() {
        let samples = random_samples(40, 1, 20);
        let model = krr_train(&samples, 1.0, 1e6).unwrap();
        for x in [-0.9, 0.0, 0.7] {
            assert!(model.predict(&[x]).abs() < 1e-3);
        }
    }

    #[test]
    fn krr_matches_dense_solve_oracle() {
        let samples = random_samples(12, 2, 21);
        let gamma = 0.8;
        let lambda = 1e-3;
        let model = krr_train(&samples, gamma, lambda).unwrap();

        // independent oracle: Gaussian elimination with partial pivoting
        let m = samples.m();
        let mut a = vec![vec![0.0; m + 1]; m];
        for i in 0..m {
            for j in 0..m {
                a[i][j] = gaussian_kernel(samples.input(i), samples.input(j), gamma);
            }
            a[i][i] += m as f64 * lambda;
            a[i][m] = samples.output(i);
        }
        for col in 0..m {
            let piv = (col..m).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs())).unwrap();
            a.swap(col, piv);
            for row in col + 1..m {
                let f = a[row][col] / a[col][col];
                for k in col..=m {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
        let mut alpha = vec![0.0; m];
        for row in (0..m).rev() {
            let mut acc = a[row][m];
            for k in row + 1..m {
                acc -= a[row][k] * alpha[k];
            }
            alpha[row] = acc / a[row][row];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let x: Vec<f64> = (0..2).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let want: f64 = (0..m)
                .map(|i| alpha[i] * gaussian_kernel(&x, samples.input(i), gamma))
                .sum();
            assert!((model.predict(&x) - want).abs() < 1e-8);
        }
    }

    #[test]
    fn krr_system_residual_small() {
        let samples = random_samples(80, 2, 23);
        let model = krr_train(&samples, 1.4, 1e-4).unwrap();
        assert!(model.system_residual(&samples) <= 1e-8);
    }

    #[test]
    fn krr_rejects_bad_params() {
        let samples = random_samples(5, 1, 24);
        assert!(krr_train(&samples, 0.0, 1.0).is_err());
        assert!(krr_train(&samples, 1.0, 0.0).is_err());
        assert!(krr_train(&samples, 1.0, -2.0).is_err());
    }

    #[test]
    fn zero_dual_predicts_zero() {
        let model = KrrModel::from_parts(1, vec![0.5, 0.7], vec![0.0, 0.0], 1.0, 0.1).unwrap();
        assert_eq!(model.predict(&[0.1]), 0.0);
    }
}
