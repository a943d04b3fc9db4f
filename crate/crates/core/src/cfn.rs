//! The constructive network: cell averages over a Voronoi chain, a sigmoid
//! telescoping sum along the chain coordinate, and residual iteration.
//!
//! Training never solves an optimization problem. The first-order network
//! averages outputs per cell; each further order refits the same construction
//! to the training residuals and accumulates into one coefficient vector,
//! which is exact because every order lives in the span of the same basis.

use serde::{Deserialize, Serialize};

use crate::activation::Sigmoid;
use crate::error::{Error, Result};
use crate::geometry::{CenterChain, Point, VoronoiIndex};

/// Training samples `(x_i, y_i)` with row-major inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    d: usize,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SampleSet {
    pub fn new(d: usize, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if ys.is_empty() || xs.len() != ys.len() * d {
            return Err(Error::invalid(format!(
                "inconsistent sample sizes: {} inputs of dim {d}, {} outputs",
                xs.len() / d.max(1),
                ys.len()
            )));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite sample value"));
        }
        Ok(SampleSet { d, xs, ys })
    }

    pub fn from_points(points: &[Point], ys: Vec<f64>) -> Result<Self> {
        let d = points.first().map(|p| p.len()).ok_or(Error::EmptyInput("samples"))?;
        let mut xs = Vec::with_capacity(points.len() * d);
        for p in points {
            if p.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: p.len() });
            }
            xs.extend_from_slice(p);
        }
        Self::new(d, xs, ys)
    }

    pub fn m(&self) -> usize {
        self.ys.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.xs[i * self.d..(i + 1) * self.d]
    }

    pub fn inputs(&self) -> impl Iterator<Item = &[f64]> {
        self.xs.chunks_exact(self.d)
    }

    pub fn output(&self, i: usize) -> f64 {
        self.ys[i]
    }

    pub fn outputs(&self) -> &[f64] {
        &self.ys
    }

    /// `max_i |y_i|`, the almost-sure output bound of the sample.
    pub fn bound_m(&self) -> f64 {
        self.ys.iter().fold(0.0, |acc: f64, &y| acc.max(y.abs()))
    }

    pub fn subset(&self, idx: &[usize]) -> SampleSet {
        let mut xs = Vec::with_capacity(idx.len() * self.d);
        let mut ys = Vec::with_capacity(idx.len());
        for &i in idx {
            xs.extend_from_slice(self.input(i));
            ys.push(self.output(i));
        }
        SampleSet { d: self.d, xs, ys }
    }

    /// CSV with header `x1,..,xd,y`; doubles carry 17 significant digits so
    /// the round trip is lossless.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for k in 1..=self.d {
            out.push_str(&format!("x{k},"));
        }
        out.push_str("y\n");
        for i in 0..self.m() {
            for v in self.input(i) {
                out.push_str(&format!("{v:.16e},"));
            }
            out.push_str(&format!("{:.16e}\n", self.output(i)));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(Error::EmptyInput("csv"))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 2 || cols.last() != Some(&"y") {
            return Err(Error::Parse(format!("expected header x1,..,xd,y, got {header:?}")));
        }
        let d = cols.len() - 1;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let vals: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|t| t.trim().parse::<f64>()).collect();
            let vals = vals.map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
            if vals.len() != d + 1 {
                return Err(Error::Parse(format!(
                    "line {}: expected {} fields, got {}",
                    lineno + 2,
                    d + 1,
                    vals.len()
                )));
            }
            xs.extend_from_slice(&vals[..d]);
            ys.push(vals[d]);
        }
        Self::new(d, xs, ys)
    }
}

/// Per-cell sample counts and value means, with the `0/0 = 0` convention for
/// empty cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub counts: Vec<usize>,
    pub means: Vec<f64>,
}

impl CellStats {
    fn from_cells(n: usize, cells: &[usize], values: &[f64]) -> CellStats {
        let mut counts = vec![0usize; n];
        let mut sums = vec![0.0; n];
        for (&c, &v) in cells.iter().zip(values) {
            counts[c] += 1;
            sums[c] += v;
        }
        let means = sums
            .iter()
            .zip(&counts)
            .map(|(&s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
            .collect();
        CellStats { counts, means }
    }

    /// Means after applying the empty-cell rule.
    pub fn filled_means(&self, rule: EmptyCellRule) -> Vec<f64> {
        match rule {
            EmptyCellRule::ZeroMean => self.means.clone(),
            EmptyCellRule::CarryForward => {
                let mut out = self.means.clone();
                let first = self.counts.iter().position(|&c| c > 0);
                let Some(first) = first else { return out };
                let mut last = self.means[first];
                for (j, v) in out.iter_mut().enumerate() {
                    if self.counts[j] > 0 {
                        last = self.means[j];
                    } else {
                        *v = last;
                    }
                }
                out
            }
        }
    }
}

/// Per-cell mean of `values` grouped by the Voronoi cell of each input.
pub fn cell_stats(index: &VoronoiIndex, samples: &SampleSet, values: &[f64]) -> Result<CellStats> {
    if values.len() != samples.m() {
        return Err(Error::invalid("values length must match sample count"));
    }
    let cells: Vec<usize> = samples.inputs().map(|x| index.assign_cell(x)).collect();
    Ok(CellStats::from_cells(index.chain().n(), &cells, values))
}

/// What to store for a cell that received no samples: the literal `0/0 = 0`
/// convention of the construction, or the previous nonempty cell's mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EmptyCellRule {
    #[default]
    ZeroMean,
    CarryForward,
}

/// A trained constructive network of some order `r >= 1`.
#[derive(Debug, Clone)]
pub struct CfnModel {
    chain: CenterChain,
    activation: Sigmoid,
    w: f64,
    coeffs: Vec<f64>,
    order: usize,
    /// Evaluation form: the telescoping sum of consecutive coefficient
    /// differences, or the equivalent per-cell basis expansion.
    telescoped: bool,
}

impl CfnModel {
    /// First-order network: coefficients are the per-cell output means.
    pub fn build_first_order(
        chain: CenterChain,
        activation: Sigmoid,
        w: f64,
        samples: &SampleSet,
        rule: EmptyCellRule,
    ) -> Result<CfnModel> {
        Self::train(chain, activation, w, 1, samples, rule)
    }

    /// Fit the construction to the current residuals and absorb the update,
    /// raising the order by one.
    pub fn iterate_residual(mut self, samples: &SampleSet, rule: EmptyCellRule) -> Result<CfnModel> {
        let (coords, cells) = self.locate(samples)?;
        self.iterate_in_place(samples, &coords, &cells, rule);
        Ok(self)
    }

    /// Build the first order, then `r - 1` residual iterations.
    pub fn train(
        chain: CenterChain,
        activation: Sigmoid,
        w: f64,
        r: usize,
        samples: &SampleSet,
        rule: EmptyCellRule,
    ) -> Result<CfnModel> {
        if r == 0 {
            return Err(Error::invalid("order r must be at least 1"));
        }
        if samples.m() == 0 {
            return Err(Error::EmptyInput("training samples"));
        }
        if w <= 0.0 || !w.is_finite() {
            return Err(Error::invalid(format!("width w must be positive, got {w}")));
        }
        if samples.d() != chain.d() {
            return Err(Error::DimensionMismatch { expected: chain.d(), got: samples.d() });
        }
        let mut model = CfnModel {
            coeffs: vec![0.0; chain.n()],
            chain,
            activation,
            w,
            order: 0,
            telescoped: true,
        };
        let (coords, cells) = model.locate(samples)?;
        let stats = CellStats::from_cells(model.chain.n(), &cells, samples.outputs());
        model.coeffs = stats.filled_means(rule);
        model.order = 1;
        for _ in 1..r {
            model.iterate_in_place(samples, &coords, &cells, rule);
        }
        Ok(model)
    }

    fn locate(&self, samples: &SampleSet) -> Result<(Vec<f64>, Vec<usize>)> {
        if samples.d() != self.chain.d() {
            return Err(Error::DimensionMismatch { expected: self.chain.d(), got: samples.d() });
        }
        let v = self.chain.voronoi();
        let mut coords = Vec::with_capacity(samples.m());
        let mut cells = Vec::with_capacity(samples.m());
        for x in samples.inputs() {
            let k = v.assign_cell(x);
            cells.push(k);
            coords.push(self.chain.prefix()[k] + crate::geometry::euclidean(self.chain.center(k), x));
        }
        Ok((coords, cells))
    }

    fn iterate_in_place(
        &mut self,
        samples: &SampleSet,
        coords: &[f64],
        cells: &[usize],
        rule: EmptyCellRule,
    ) {
        let residuals: Vec<f64> = coords
            .iter()
            .zip(samples.outputs())
            .map(|(&t, &y)| y - self.eval_coordinate(t))
            .collect();
        let stats = CellStats::from_cells(self.chain.n(), cells, &residuals);
        for (g, u) in self.coeffs.iter_mut().zip(stats.filled_means(rule)) {
            *g += u;
        }
        self.order += 1;
    }

    pub fn chain(&self) -> &CenterChain {
        &self.chain
    }

    pub fn activation(&self) -> Sigmoid {
        self.activation
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn d(&self) -> usize {
        self.chain.d()
    }

    pub fn telescoped(&self) -> bool {
        self.telescoped
    }

    /// Select the evaluation form; both agree to rounding error.
    pub fn with_telescoped(mut self, telescoped: bool) -> Self {
        self.telescoped = telescoped;
        self
    }

    pub(crate) fn from_parts(
        chain: CenterChain,
        activation: Sigmoid,
        w: f64,
        coeffs: Vec<f64>,
        order: usize,
    ) -> Result<CfnModel> {
        if coeffs.len() != chain.n() {
            return Err(Error::invalid("coefficient count must match center count"));
        }
        Ok(CfnModel { chain, activation, w, coeffs, order, telescoped: true })
    }

    /// The chain coordinate of `x` (distance from the first center routed
    /// along the chain).
    pub fn chain_coordinate(&self, x: &[f64]) -> f64 {
        self.chain.voronoi().chain_coordinate(x)
    }

    /// Predict at a point; total over all of `R^d`.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let t = self.chain_coordinate(x);
        if self.telescoped {
            self.eval_coordinate(t)
        } else {
            self.eval_coordinate_basis(t)
        }
    }

    pub fn predict_batch(&self, xs: &[Point]) -> Vec<f64> {
        xs.iter().map(|x| self.predict(x)).collect()
    }

    pub fn predict_samples(&self, samples: &SampleSet) -> Vec<f64> {
        samples.inputs().map(|x| self.predict(x)).collect()
    }

    /// Telescoped form evaluated at a chain coordinate.
    pub fn eval_coordinate(&self, t: f64) -> f64 {
        let g = &self.coeffs;
        let p = self.chain.prefix();
        let mut acc = g[0];
        for k in 1..g.len() {
            acc += (g[k] - g[k - 1]) * self.activation.eval(self.w * (t - p[k - 1]));
        }
        acc
    }

    /// Basis form `Σ_j g_j c_j` evaluated at a chain coordinate.
    pub fn eval_coordinate_basis(&self, t: f64) -> f64 {
        basis_weights_at(&self.chain, self.activation, self.w, t)
            .iter()
            .zip(&self.coeffs)
            .map(|(c, g)| c * g)
            .sum()
    }

    /// Partition-of-unity weights `c_j(x)`; they sum to one by telescoping.
    pub fn basis_weights(&self, x: &[f64]) -> Vec<f64> {
        basis_weights_at(&self.chain, self.activation, self.w, self.chain_coordinate(x))
    }

    /// RMSE of the model on a sample set.
    pub fn rmse_on(&self, samples: &SampleSet) -> f64 {
        crate::harness::rmse(&self.predict_samples(samples), samples.outputs())
            .expect("matching lengths")
    }
}

/// Partition-of-unity basis at chain coordinate `t`:
/// `c_1 = 1 - σ(w(t - P_1))`, interior differences of consecutive sigmoid
/// steps, `c_n = σ(w(t - P_{n-1}))`. For a single center the basis is `[1]`.
pub fn basis_weights_at(chain: &CenterChain, activation: Sigmoid, w: f64, t: f64) -> Vec<f64> {
    let n = chain.n();
    if n == 1 {
        return vec![1.0];
    }
    let p = chain.prefix();
    // one sigmoid evaluation per threshold, shared by adjacent weights, so
    // the telescoped sum cancels to machine precision
    let sig: Vec<f64> = (0..n - 1).map(|k| activation.eval(w * (t - p[k]))).collect();
    let mut c = Vec::with_capacity(n);
    c.push(1.0 - sig[0]);
    for k in 1..n - 1 {
        c.push(sig[k - 1] - sig[k]);
    }
    c.push(sig[n - 2]);
    c
}

/// Spec'd operation form of [`basis_weights_at`], assigning `x` first.
pub fn basis_weights(chain: &CenterChain, activation: Sigmoid, w: f64, x: &[f64]) -> Vec<f64> {
    basis_weights_at(chain, activation, w, chain.voronoi().chain_coordinate(x))
}
