//! Sigmoidal activation functions, their tail constants, and width guidance.
//!
//! All built-ins satisfy `σ(t) → 1` as `t → +∞` and `σ(t) → 0` as `t → -∞`
//! and are monotone nondecreasing. The tail constant `K(ε)` is the smallest
//! threshold with `|σ(t) - 1| < ε` for `t ≥ K` and `|σ(t)| < ε` for `t ≤ -K`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent clamp applied before calls to `exp`; far beyond any ε-tail at
/// which results are read, so it never changes values at tolerance.
const EXP_CLAMP: f64 = 700.0;

/// A sigmoidal activation function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Sigmoid {
    /// `1 / (1 + e^{-t})`
    Logistic,
    /// `(tanh(t) + 1) / 2`
    TanhSigmoid,
    /// `arctan(t)/π + 1/2`
    ArctanSigmoid,
    /// `e^{-a e^{-b t}}` with `a, b > 0`
    Gompertz { a: f64, b: f64 },
}

impl Default for Sigmoid {
    fn default() -> Self {
        Sigmoid::Logistic
    }
}

impl Sigmoid {
    /// Gompertz with the default shape `a = b = 1`.
    pub fn gompertz_default() -> Self {
        Sigmoid::Gompertz { a: 1.0, b: 1.0 }
    }

    /// Evaluate `σ(t)`. Stable for `|t|` up to `1e6` and beyond.
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Sigmoid::Logistic => {
                let t = t.clamp(-EXP_CLAMP, EXP_CLAMP);
                1.0 / (1.0 + (-t).exp())
            }
            Sigmoid::TanhSigmoid => 0.5 * (t.tanh() + 1.0),
            Sigmoid::ArctanSigmoid => t.atan() / std::f64::consts::PI + 0.5,
            Sigmoid::Gompertz { a, b } => {
                let u = (-b * t).clamp(-EXP_CLAMP, EXP_CLAMP);
                (-a * u.exp()).exp()
            }
        }
    }

    /// `‖σ‖∞` over the real line; equal to 1 for every built-in.
    pub fn sup_norm(&self) -> f64 {
        1.0
    }

    /// Smallest `K > 0` (closed form) such that `|σ(t) - 1| < ε` for `t ≥ K`
    /// and `|σ(t)| < ε` for `t ≤ -K`. Requires `0 < ε < 1/2`.
    pub fn tail_constant(&self, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::invalid(format!(
                "tail constant needs 0 < eps < 1/2, got {eps}"
            )));
        }
        let k = match *self {
            Sigmoid::Logistic => ((1.0 - eps) / eps).ln(),
            Sigmoid::TanhSigmoid => 0.5 * ((1.0 - eps) / eps).ln(),
            Sigmoid::ArctanSigmoid => (std::f64::consts::PI * (0.5 - eps)).tan(),
            Sigmoid::Gompertz { a, b } => {
                // upper tail: σ(K) = 1 - ε; lower tail: σ(-K) = ε
                let upper = -((-(1.0 - eps).ln()) / a).ln() / b;
                let lower = (((1.0 / eps).ln()) / a).ln() / b;
                upper.max(lower)
            }
        };
        Ok(k)
    }

    /// Width parameter `w = 4 K(n^{-(s+d)/d}) n^{1/d}`; large enough that the
    /// sigmoid resolves individual cells of an n-center chain. For `n = 1`
    /// there is a single cell and the width is irrelevant; a fixed default of
    /// 1 is returned.
    pub fn recommended_w(&self, n: usize, d: usize, s: f64) -> Result<f64> {
        if n == 0 || d == 0 {
            return Err(Error::invalid("recommended_w needs n >= 1 and d >= 1"));
        }
        if s <= 0.0 {
            return Err(Error::invalid("smoothness s must be positive"));
        }
        if n == 1 {
            return Ok(1.0);
        }
        let nf = n as f64;
        let df = d as f64;
        let eps = nf.powf(-(s + df) / df);
        let k = self.tail_constant(eps)?;
        Ok(4.0 * k * nf.powf(1.0 / df))
    }

    /// Stable name used in CLI flags and model files.
    pub fn name(&self) -> &'static str {
        match self {
            Sigmoid::Logistic => "logistic",
            Sigmoid::TanhSigmoid => "tanh",
            Sigmoid::ArctanSigmoid => "arctan",
            Sigmoid::Gompertz { .. } => "gompertz",
        }
    }

    /// Shape parameters, if any (`(a, b)` for Gompertz).
    pub fn params(&self) -> Option<(f64, f64)> {
        match *self {
            Sigmoid::Gompertz { a, b } => Some((a, b)),
            _ => None,
        }
    }

    /// Rebuild from a stored name plus optional parameters.
    pub fn from_name_params(name: &str, params: Option<(f64, f64)>) -> Result<Self> {
        match (name, params) {
            ("logistic", None) => Ok(Sigmoid::Logistic),
            ("tanh", None) => Ok(Sigmoid::TanhSigmoid),
            ("arctan", None) => Ok(Sigmoid::ArctanSigmoid),
            ("gompertz", Some((a, b))) if a > 0.0 && b > 0.0 => Ok(Sigmoid::Gompertz { a, b }),
            ("gompertz", None) => Ok(Sigmoid::gompertz_default()),
            _ => Err(Error::invalid(format!(
                "unknown activation {name:?} with params {params:?}"
            ))),
        }
    }
}

impl fmt::Display for Sigmoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Sigmoid::Gompertz { a, b } => write!(f, "gompertz:{a},{b}"),
            _ => f.write_str(self.name()),
        }
    }
}

impl FromStr for Sigmoid {
    type Err = Error;

    /// Accepts `logistic`, `tanh`, `arctan`, `gompertz` or `gompertz:a,b`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" => Ok(Sigmoid::Logistic),
            "tanh" => Ok(Sigmoid::TanhSigmoid),
            "arctan" => Ok(Sigmoid::ArctanSigmoid),
            "gompertz" => Ok(Sigmoid::gompertz_default()),
            other => {
                if let Some(rest) = other.strip_prefix("gompertz:") {
                    let mut it = rest.split(',');
                    let a = it
                        .next()
                        .and_then(|v| v.trim().parse::<f64>().ok())
                        .ok_or_else(|| Error::Parse(format!("bad gompertz params: {rest}")))?;
                    let b = it
                        .next()
                        .and_then(|v| v.trim().parse::<f64>().ok())
                        .ok_or_else(|| Error::Parse(format!("bad gompertz params: {rest}")))?;
                    if it.next().is_some() || a <= 0.0 || b <= 0.0 {
                        return Err(Error::Parse(format!("bad gompertz params: {rest}")));
                    }
                    Ok(Sigmoid::Gompertz { a, b })
                } else {
                    Err(Error::Parse(format!("unknown activation: {other}")))
                }
            }
        }
    }
}

/// The four built-in activations with default shapes.
pub fn builtin_sigmoids() -> [Sigmoid; 4] {
    [
        Sigmoid::Logistic,
        Sigmoid::TanhSigmoid,
        Sigmoid::ArctanSigmoid,
        Sigmoid::gompertz_default(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_values() {
        assert_eq!(Sigmoid::Logistic.eval(0.0), 0.5);
        assert_eq!(Sigmoid::TanhSigmoid.eval(0.0), 0.5);
        assert_eq!(Sigmoid::ArctanSigmoid.eval(0.0), 0.5);
        let g = Sigmoid::Gompertz { a: 1.0, b: 1.0 };
        assert!((g.eval(0.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn logistic_tail_constant_closed_form() {
        let k = Sigmoid::Logistic.tail_constant(0.1).unwrap();
        assert!((k - 9.0f64.ln()).abs() < 1e-12);
        // symmetry: σ(K) = 1 - ε and σ(-K) = ε simultaneously
        assert!((Sigmoid::Logistic.eval(k) - 0.9).abs() < 1e-12);
        assert!((Sigmoid::Logistic.eval(-k) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn arctan_tail_constant() {
        let k = Sigmoid::ArctanSigmoid.tail_constant(0.01).unwrap();
        let expect = (std::f64::consts::PI * 0.49).tan();
        assert!((k - expect).abs() < 1e-9);
        assert!((k - 31.8205).abs() < 1e-3);
    }

    #[test]
    fn tail_constant_bounds_and_minimality() {
        for sig in builtin_sigmoids() {
            for eps in [1e-1, 1e-2, 1e-4] {
                let k = sig.tail_constant(eps).unwrap();
                assert!(k > 0.0, "{sig} K not positive for eps {eps}");
                assert!(sig.eval(k) >= 1.0 - eps - 1e-9, "{sig} upper tail at K");
                assert!(sig.eval(-k) <= eps + 1e-9, "{sig} lower tail at -K");
                // K - 1e-3 must violate at least one tail bound
                let k2 = k - 1e-3;
                let ok_upper = sig.eval(k2) >= 1.0 - eps;
                let ok_lower = sig.eval(-k2) <= eps;
                assert!(!(ok_upper && ok_lower), "{sig} K not minimal for eps {eps}");
            }
        }
    }

    #[test]
    fn eps_out_of_range_is_error() {
        assert!(Sigmoid::Logistic.tail_constant(0.5).is_err());
        assert!(Sigmoid::Logistic.tail_constant(0.0).is_err());
        assert!(Sigmoid::Logistic.tail_constant(-0.1).is_err());
    }

    #[test]
    fn monotone_on_grid() {
        for sig in builtin_sigmoids() {
            let mut prev = f64::NEG_INFINITY;
            for i in 0..10_000 {
                let t = -100.0 + 200.0 * (i as f64) / 9_999.0;
                let v = sig.eval(t);
                assert!(v >= prev - 1e-15, "{sig} not monotone at t={t}");
                prev = v;
            }
        }
    }

    #[test]
    fn finite_for_huge_arguments() {
        for sig in builtin_sigmoids() {
            for t in [-1e6, -1e4, -700.0, 0.0, 700.0, 1e4, 1e6] {
                let v = sig.eval(t);
                assert!(v.is_finite(), "{sig} at {t} gave {v}");
                assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn recommended_w_composes_tail_constant() {
        // n = 16, d = 1, s = 2: eps = 16^-3 and w = 4 ln((1-eps)/eps) * 16
        let eps = 16f64.powi(-3);
        let expect = 4.0 * ((1.0 - eps) / eps).ln() * 16.0;
        let w = Sigmoid::Logistic.recommended_w(16, 1, 2.0).unwrap();
        assert!((w - expect).abs() < 1e-9);
        // cross-check against 4 (s+d)/d n^{1/d} ln n within 5%
        let approx = 4.0 * 3.0 * 16.0 * 16f64.ln();
        assert!((w - approx).abs() / approx < 0.05);
    }

    #[test]
    fn recommended_w_asymptotics() {
        // logistic, d = 1, s = 1: ratio to 4 (s+d) n ln n / d tends to 1
        let n = 1024;
        let w = Sigmoid::Logistic.recommended_w(n, 1, 1.0).unwrap();
        let guide = 4.0 * 2.0 * (n as f64) * (n as f64).ln();
        assert!((w / guide - 1.0).abs() < 1e-6);
    }

    #[test]
    fn recommended_w_linear_in_k() {
        // tanh's K is exactly half of logistic's, so w halves too
        let w_log = Sigmoid::Logistic.recommended_w(64, 2, 2.0).unwrap();
        let w_tanh = Sigmoid::TanhSigmoid.recommended_w(64, 2, 2.0).unwrap();
        assert!((w_log - 2.0 * w_tanh).abs() < 1e-9);
    }

    #[test]
    fn recommended_w_single_center_default() {
        assert_eq!(Sigmoid::Logistic.recommended_w(1, 3, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn parse_names() {
        assert_eq!("logistic".parse::<Sigmoid>().unwrap(), Sigmoid::Logistic);
        assert_eq!("tanh".parse::<Sigmoid>().unwrap(), Sigmoid::TanhSigmoid);
        assert_eq!("arctan".parse::<Sigmoid>().unwrap(), Sigmoid::ArctanSigmoid);
        assert_eq!(
            "gompertz:2,0.5".parse::<Sigmoid>().unwrap(),
            Sigmoid::Gompertz { a: 2.0, b: 0.5 }
        );
        assert!("relu".parse::<Sigmoid>().is_err());
        assert!("gompertz:-1,1".parse::<Sigmoid>().is_err());
    }

    #[test]
    fn limits_reached_numerically() {
        for sig in builtin_sigmoids() {
            // arctan approaches its limits only algebraically: 1 - σ(t) is
            // about 1/(π t), so ±50 reaches the limits to 7e-3, not 1e-6
            let tol = if sig == Sigmoid::ArctanSigmoid { 7e-3 } else { 1e-6 };
            assert!((sig.eval(50.0) - 1.0).abs() < tol, "{sig} upper limit");
            assert!(sig.eval(-50.0).abs() < tol, "{sig} lower limit");
        }
    }
}
