use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

/// Double-exponential substitution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// `x = 1/(1 + e^{−π sinh s})` on `(0, 1)`.
    TanhSinh,
    /// `u = e^{(π/2) sinh s}` on `(0, ∞)`.
    ExpSinh,
}

/// Truncated range of the substitution variable `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

/// One quadrature node; `w` already includes the step and the Jacobian.
#[derive(Debug, Clone)]
pub struct Node {
    pub x: Float,
    /// `1 − x`, accurate near `x = 1` for [`Rule::TanhSinh`].
    pub cx: Float,
    pub ln_x: Float,
    /// `ln(1 − x)`; only meaningful for [`Rule::TanhSinh`].
    pub ln_cx: Float,
    pub w: Float,
}

/// Tail behaviour at one end of the integration range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// Integrand `~ x^α` at a finite endpoint (`α > −1`).
    Power(f64),
    /// Integrand `~ e^{−κ u^p}` as `u → ∞`, with `shift` bounding the location of the bulk.
    Decay { kappa: f64, p: f64, shift: f64 },
    /// Integrand `~ e^{−κ/u}` as `u → 0`.
    Essential { kappa: f64 },
}

impl Window {
    /// Range where the neglected tails stay below `e^{−depth}` relative to the bulk.
    pub fn for_tails(rule: Rule, lo: Tail, hi: Tail, depth: f64) -> Result<Window> {
        let scale = match rule {
            Rule::TanhSinh => std::f64::consts::PI,
            Rule::ExpSinh => std::f64::consts::FRAC_PI_2,
        };
        let power = |alpha: f64| -> Result<f64> {
            if !(alpha > -1.0) {
                return Err(Error::Domain(format!("endpoint exponent {alpha} is not integrable")));
            }
            Ok((depth / ((alpha + 1.0).max(1e-3) * scale)).asinh() + 0.25)
        };
        let lo = match lo {
            Tail::Power(a) => power(a)?,
            Tail::Essential { kappa } => ((2.0 * depth / kappa).max(std::f64::consts::E).ln() / scale).asinh() + 0.5,
            Tail::Decay { .. } => return Err(Error::Internal("decay tail at the lower end".into())),
        };
        let hi = match hi {
            Tail::Power(a) => power(a)?,
            Tail::Decay { kappa, p, shift } => {
                let u = (2.0 * depth / kappa).powf(1.0 / p) + 2.0 * shift.abs();
                (u.max(std::f64::consts::E).ln() / scale).asinh() + 0.5
            }
            Tail::Essential { .. } => return Err(Error::Internal("essential tail at the upper end".into())),
        };
        Ok(Window { lo: -lo, hi })
    }
}

/// Nodes of step `2^{−level}` inside the window.
pub fn nodes(rule: Rule, win: Window, level: u32, prec: u32) -> Vec<Node> {
    let steps = 1i64 << level;
    let k_lo = (win.lo * steps as f64).floor() as i64;
    let k_hi = (win.hi * steps as f64).ceil() as i64;
    let pi = Float::with_val(prec, Constant::Pi);
    let h = Float::with_val(prec, 1) >> level;
    (k_lo..=k_hi)
        .map(|k| {
            let s = Float::with_val(prec, k) >> level;
            let (sh, ch) = s.sinh_cosh(Float::new(prec));
            match rule {
                Rule::TanhSinh => {
                    let v = Float::with_val(prec, &pi * &sh);
                    // x = 1/(1+e^{−v}), 1−x = 1/(1+e^{v})
                    let ev = v.exp();
                    let one = Float::with_val(prec, 1);
                    let x = Float::with_val(prec, &ev / Float::with_val(prec, &ev + &one));
                    let cx = Float::with_val(prec, &one / Float::with_val(prec, &ev + &one));
                    let w = Float::with_val(prec, &pi * &ch) * &x * &cx * &h;
                    let ln_x = x.clone().ln();
                    let ln_cx = cx.clone().ln();
                    Node { x, cx, ln_x, ln_cx, w }
                }
                Rule::ExpSinh => {
                    let half_pi = Float::with_val(prec, &pi >> 1u32);
                    let ln_x = Float::with_val(prec, &half_pi * &sh);
                    let x = ln_x.clone().exp();
                    let cx = Float::with_val(prec, 1) - &x;
                    let w = Float::with_val(prec, &half_pi * &ch) * &x * &h;
                    Node { x, cx, ln_x, ln_cx: Float::with_val(prec, rug::float::Special::Nan), w }
                }
            }
        })
        .collect()
}

/// Options shared by every quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Working precision in bits.
    pub prec: u32,
    /// Relative tolerance on the change between successive levels.
    pub tol: f64,
    pub min_level: u32,
    pub max_level: u32,
}

impl QuadOptions {
    pub const DEFAULT_PREC: u32 = 192;

    /// One-dimensional oracle settings: near full working precision.
    pub fn oracle(prec: u32) -> QuadOptions {
        let tol = 2f64.powi(-(prec as i32) * 3 / 4).max(1e-300);
        QuadOptions { prec, tol, min_level: 3, max_level: 12 }
    }

    /// Multi-dimensional settings.
    pub fn multi(prec: u32, tol: f64) -> QuadOptions {
        QuadOptions { prec, tol, min_level: 2, max_level: 9 }
    }

    /// Tail depth matching the tolerance.
    pub fn depth(&self) -> f64 {
        -self.tol.ln() + 12.0
    }
}

/// Converged vector of integrals.
#[derive(Debug, Clone)]
pub struct Converged<T> {
    pub values: Vec<T>,
    /// Largest change between the last two levels, relative to the largest component.
    pub rel_error: f64,
    pub level: u32,
    pub evaluations: usize,
}

/// Halves the step until successive results agree to `opts.tol`.
pub fn refine<T, F, N>(opts: &QuadOptions, mut at_level: F, norm: N) -> Result<Converged<T>>
where
    F: FnMut(u32) -> Result<(Vec<T>, usize)>,
    N: Fn(&T, &T) -> (f64, f64),
{
    let mut prev: Option<Vec<T>> = None;
    let mut evaluations = 0;
    let mut last_err = f64::INFINITY;
    for level in opts.min_level..=opts.max_level {
        let (v, n) = at_level(level)?;
        evaluations += n;
        if let Some(p) = &prev {
            let mut diff = 0f64;
            let mut size = 0f64;
            for (a, b) in v.iter().zip(p) {
                let (d, s) = norm(a, b);
                diff = diff.max(d);
                size = size.max(s);
            }
            last_err = if size > 0.0 { diff / size } else { diff };
            if !last_err.is_finite() {
                return Err(Error::Precision("non-finite quadrature sum".into()));
            }
            if last_err <= opts.tol {
                // the window was cut where the integrand falls below e^{-depth}
                let rel_error = last_err.max((-opts.depth()).exp());
                return Ok(Converged { values: v, rel_error, level, evaluations });
            }
        }
        prev = Some(v);
    }
    Err(Error::Precision(format!(
        "quadrature did not reach tolerance {:.1e} by level {} (last change {last_err:.2e})",
        opts.tol, opts.max_level
    )))
}

/// `(|a − b|, |a|)` for real values.
pub fn real_norm(a: &Float, b: &Float) -> (f64, f64) {
    (Float::with_val(a.prec(), a - b).abs().to_f64(), a.clone().abs().to_f64())
}

/// Deterministic pairwise sum of equally long vectors.
pub fn pairwise_sum<T: Clone, A: Fn(&T, &T) -> T>(mut parts: Vec<Vec<T>>, zero: Vec<T>, add: A) -> Vec<T> {
    if parts.is_empty() {
        return zero;
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.iter().zip(&b).map(|(x, y)| add(x, y)).collect()),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop().expect("nonempty")
}
