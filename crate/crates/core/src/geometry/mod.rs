//! Center generation, greedy chain ordering, Voronoi assignment, and the
//! partition-based (chain) distance.
//!
//! Centers are rearranged so consecutive points are near one another; the
//! chain prefix sums then linearize the input space: the chain coordinate of
//! a point is the distance from the first center routed through consecutive
//! centers, which is what the one-dimensional sigmoidal construction consumes.

pub mod sobol;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A point of the input space.
pub type Point = Vec<f64>;

/// Squared Euclidean distance.
#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let t = x - y;
        acc += t * t;
    }
    acc
}

/// Euclidean distance.
#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

/// An axis-aligned box, the domain the centers and samples live in.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::invalid("box bounds must be nonempty and equal length"));
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::invalid(format!("degenerate box side [{a}, {b}]")));
            }
        }
        Ok(AxisBox { lo, hi })
    }

    /// The unit cube `[0, 1]^d`.
    pub fn unit(d: usize) -> Self {
        AxisBox { lo: vec![0.0; d], hi: vec![1.0; d] }
    }

    /// The cube `[-h, h]^d`.
    pub fn symmetric(d: usize, h: f64) -> Result<Self> {
        AxisBox::new(vec![-h; d], vec![h; d])
    }

    /// A one-dimensional interval `[a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        AxisBox::new(vec![a], vec![b])
    }

    /// Tight bounding box of a point set (errors if degenerate in any axis).
    pub fn bounding(points: &[Point]) -> Result<Self> {
        let d = points.first().map(|p| p.len()).ok_or(Error::EmptyInput("points"))?;
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in points {
            for (k, &c) in p.iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        AxisBox::new(lo, hi)
    }

    pub fn d(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// Map a unit-cube point into the box.
    pub fn from_unit(&self, u: &[f64]) -> Point {
        u.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(&t, (&a, &b))| a + t * (b - a))
            .collect()
    }

    /// Draw a uniform point.
    pub fn sample(&self, rng: &mut impl Rng) -> Point {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| a + rng.random::<f64>() * (b - a))
            .collect()
    }
}

/// `n` Sobol points affinely mapped into the box. Deterministic for fixed
/// `(n, d, domain)`; dimensions above 21 are rejected.
pub fn sobol_centers(n: usize, d: usize, domain: &AxisBox) -> Result<Vec<Point>> {
    if domain.d() != d {
        return Err(Error::DimensionMismatch { expected: d, got: domain.d() });
    }
    let pts = sobol::sobol_unit_points(n, d)?;
    Ok(pts.iter().map(|u| domain.from_unit(u)).collect())
}

/// `n` cell midpoints `a + (2k-1)(b-a)/(2n)`, k = 1..n, so the Voronoi cells
/// are equal subintervals of `[a, b]`.
pub fn equispaced_centers(n: usize, a: f64, b: f64) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::EmptyInput("center count"));
    }
    if !(a < b) {
        return Err(Error::invalid(format!("interval [{a}, {b}] is empty")));
    }
    let h = (b - a) / (2.0 * n as f64);
    Ok((1..=n).map(|k| vec![a + (2 * k - 1) as f64 * h]).collect())
}

/// Ordered centers with chain prefix sums and spacing diagnostics.
///
/// `prefix[j]` is the summed distance along consecutive centers from the
/// first center to center `j` (0-based, `prefix[0] = 0`); it equals the chain
/// coordinate of center `j` and is strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterChain {
    d: usize,
    /// Row-major centers in chain order.
    centers: Vec<f64>,
    prefix: Vec<f64>,
    separation_radius: f64,
    max_consecutive_gap: f64,
    mesh_norm_estimate: f64,
}

impl CenterChain {
    /// Greedy rearrangement: start at the first point, repeatedly append the
    /// unvisited point nearest to the current one (ties to the lowest input
    /// index). The consecutive-gap bound from the construction is reported
    /// via `max_consecutive_gap`, never enforced.
    pub fn rearrange_greedy(points: &[Point]) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::EmptyInput("centers"));
        }
        let d = points[0].len();
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut current = 0usize;
        visited[0] = true;
        order.push(0);
        for _ in 1..n {
            let mut best = usize::MAX;
            let mut best_d = f64::INFINITY;
            for (j, p) in points.iter().enumerate() {
                if visited[j] {
                    continue;
                }
                let dj = dist_sq(&points[current], p);
                if dj < best_d {
                    best_d = dj;
                    best = j;
                }
            }
            if best_d == 0.0 {
                return Err(Error::DuplicateCenters);
            }
            visited[best] = true;
            order.push(best);
            current = best;
        }
        let ordered: Vec<Point> = order.into_iter().map(|j| points[j].clone()).collect();
        Self::from_ordered_points(&ordered, d)
    }

    /// Build a chain keeping the given order (used when loading persisted
    /// center sets, whose row order is the chain order).
    pub fn from_ordered(points: &[Point]) -> Result<Self> {
        let d = points.first().map(|p| p.len()).ok_or(Error::EmptyInput("centers"))?;
        Self::from_ordered_points(points, d)
    }

    fn from_ordered_points(points: &[Point], d: usize) -> Result<Self> {
        let n = points.len();
        if d == 0 {
            return Err(Error::invalid("points must have at least one coordinate"));
        }
        let mut centers = Vec::with_capacity(n * d);
        for p in points {
            if p.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: p.len() });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("non-finite center coordinate"));
            }
            centers.extend_from_slice(p);
        }
        let mut prefix = Vec::with_capacity(n);
        prefix.push(0.0);
        let mut max_gap: f64 = 0.0;
        for j in 1..n {
            let gap = euclidean(&centers[(j - 1) * d..j * d], &centers[j * d..(j + 1) * d]);
            if gap == 0.0 {
                return Err(Error::DuplicateCenters);
            }
            max_gap = max_gap.max(gap);
            prefix.push(prefix[j - 1] + gap);
        }
        // exact O(n^2) separation radius
        let mut min_pair = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                let dij = dist_sq(&centers[i * d..(i + 1) * d], &centers[j * d..(j + 1) * d]);
                if dij == 0.0 {
                    return Err(Error::DuplicateCenters);
                }
                min_pair = min_pair.min(dij);
            }
        }
        let separation_radius = if n == 1 { f64::INFINITY } else { 0.5 * min_pair.sqrt() };
        Ok(CenterChain {
            d,
            centers,
            prefix,
            separation_radius,
            max_consecutive_gap: max_gap,
            // lower bound; refine with `mesh_norm` probes when a domain is known
            mesh_norm_estimate: if n == 1 { 0.0 } else { separation_radius },
        })
    }

    pub fn n(&self) -> usize {
        self.prefix.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn center(&self, j: usize) -> &[f64] {
        &self.centers[j * self.d..(j + 1) * self.d]
    }

    pub fn iter_centers(&self) -> impl Iterator<Item = &[f64]> {
        self.centers.chunks_exact(self.d)
    }

    /// Chain coordinates of the centers (strictly increasing, starts at 0).
    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    /// Half the minimum pairwise center distance (infinite for one center).
    pub fn separation_radius(&self) -> f64 {
        self.separation_radius
    }

    pub fn max_consecutive_gap(&self) -> f64 {
        self.max_consecutive_gap
    }

    /// Mean consecutive gap along the chain; the natural length scale of one
    /// cell. Zero for a single center.
    pub fn mean_consecutive_gap(&self) -> f64 {
        let n = self.n();
        if n < 2 {
            0.0
        } else {
            self.prefix[n - 1] / (n - 1) as f64
        }
    }

    /// Probe-based lower bound of the mesh norm: max over probes of the
    /// distance to the nearest center.
    pub fn mesh_norm(&self, probes: &[Point]) -> f64 {
        let idx = self.voronoi();
        probes
            .iter()
            .map(|p| euclidean(p, self.center(idx.assign_cell(p))))
            .fold(0.0, f64::max)
    }

    /// Default probe set: `10_000 * d` uniform draws from the domain plus the
    /// centers themselves.
    pub fn default_mesh_probes(&self, domain: &AxisBox, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut probes: Vec<Point> = (0..10_000 * self.d).map(|_| domain.sample(&mut rng)).collect();
        probes.extend(self.iter_centers().map(|c| c.to_vec()));
        probes
    }

    /// Store a probe-based mesh norm estimate (builder style, keeps the chain
    /// immutable afterwards).
    pub fn with_mesh_norm_estimate(mut self, h: f64) -> Self {
        self.mesh_norm_estimate = h.max(self.mesh_norm_estimate);
        self
    }

    pub fn mesh_norm_estimate(&self) -> f64 {
        self.mesh_norm_estimate
    }

    /// Quasi-uniformity ratio `τ = h / q` at the stored mesh estimate.
    pub fn tau(&self) -> f64 {
        self.mesh_norm_estimate / self.separation_radius
    }

    pub fn voronoi(&self) -> VoronoiIndex<'_> {
        VoronoiIndex { chain: self }
    }

    /// One point per row, `d` columns, row order = chain order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in self.iter_centers() {
            let row: Vec<String> = c.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parse a headerless CSV of points, keeping row order as chain order.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Result<Point> = line
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
                })
                .collect();
            points.push(row?);
        }
        Self::from_ordered(&points)
    }
}

/// Nearest-center assignment over a chain; total over all of `R^d` so that
/// prediction never fails outside the nominal domain.
#[derive(Debug, Clone, Copy)]
pub struct VoronoiIndex<'a> {
    chain: &'a CenterChain,
}

impl<'a> VoronoiIndex<'a> {
    pub fn chain(&self) -> &'a CenterChain {
        self.chain
    }

    /// Index (0-based) of the nearest center, ties to the lowest index.
    pub fn assign_cell(&self, x: &[f64]) -> usize {
        debug_assert_eq!(x.len(), self.chain.d);
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (j, c) in self.chain.iter_centers().enumerate() {
            let dj = dist_sq(x, c);
            if dj < best_d {
                best_d = dj;
                best = j;
            }
        }
        best
    }

    /// Chain coordinate `prefix[k0] + d(ξ_{k0}, x)` where `k0` is the cell of
    /// `x`; the partition-based distance from the first center.
    pub fn chain_coordinate(&self, x: &[f64]) -> f64 {
        let k0 = self.assign_cell(x);
        self.chain.prefix[k0] + euclidean(self.chain.center(k0), x)
    }

    /// Partition-based distance: Euclidean within one cell, otherwise routed
    /// through the consecutive centers between the two cells. Terms are
    /// summed in cell-index order so symmetry is exact in floating point.
    pub fn partition_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let k0 = self.assign_cell(x);
        let j0 = self.assign_cell(y);
        if k0 == j0 {
            return euclidean(x, y);
        }
        let (lo, hi) = if k0 < j0 { (k0, j0) } else { (j0, k0) };
        let (d_lo, d_hi) = if k0 < j0 {
            (euclidean(self.chain.center(k0), x), euclidean(self.chain.center(j0), y))
        } else {
            (euclidean(self.chain.center(j0), y), euclidean(self.chain.center(k0), x))
        };
        (self.chain.prefix[hi] - self.chain.prefix[lo]) + d_lo + d_hi
    }
}
