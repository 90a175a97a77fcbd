use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::exact::{rat_to_f64, Rat};
use crate::params::{Family, ParamSet};

use super::cfloat::{rat_to_float, CFloat};
use super::rules::{Rule, Tail, Window};

/// Canonical integration contour of one family and the parameter domain where it is admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContourSpec {
    pub family: Family,
    pub description: &'static str,
    pub constraints: &'static str,
}

impl ContourSpec {
    pub fn of(j: Family) -> Result<ContourSpec> {
        let (description, constraints) = match j {
            Family::II => ("polyline from infinity*exp(-2 pi i/3) through 0 to +infinity", "none"),
            Family::III => ("(0, infinity)", "t < 0"),
            Family::IV => ("(0, infinity)", "b < 0"),
            Family::V => ("[0, 1]", "b < 0, c < 0"),
            Family::VI => ("[0, 1]", "a + b < 0, c < 0, t > 1"),
            Family::I => return Err(Error::Usage("family I has no integral representation".into())),
        };
        Ok(ContourSpec { family: j, description, constraints })
    }

    /// Checks the declared constraints for real `t`.
    pub fn check(&self, p: &ParamSet, t: &Float) -> Result<()> {
        let get = |k: &str| p.rat(k);
        let zero = Rat::from_integer(0.into());
        let bad = |what: &str| Err(Error::Domain(format!("family {} contour needs {what}", self.family)));
        match self.family {
            Family::II => Ok(()),
            Family::III if *t >= 0 => bad("t < 0"),
            Family::IV if get("b")? >= zero => bad("b < 0"),
            Family::V if get("b")? >= zero || get("c")? >= zero => bad("b < 0 and c < 0"),
            Family::VI if get("a")? + get("b")? >= zero || get("c")? >= zero => bad("a + b < 0 and c < 0"),
            Family::VI if *t <= 1 => bad("t > 1"),
            _ => Ok(()),
        }
    }
}

/// Real point of the integration domain with accurate complements.
#[derive(Debug, Clone)]
pub struct RealPoint {
    pub u: Float,
    /// `1 − u` (only used on `[0, 1]`).
    pub cu: Float,
    pub ln_u: Float,
}

/// Numeric weight `Θ_J(u; t)` on its canonical contour.
#[derive(Debug, Clone)]
pub struct Weight {
    pub family: Family,
    pub prec: u32,
    pub t: Float,
    rats: [Rat; 4],
    a: Float,
    b: Float,
    c: Float,
    d: Float,
}

impl Weight {
    pub fn new(j: Family, p: &ParamSet, t: &Float) -> Result<Weight> {
        let spec = ContourSpec::of(j)?;
        let need: &[&str] = match j {
            Family::II => &[],
            Family::III | Family::IV => &["b"],
            Family::V => &["b", "c"],
            _ => &["a", "b", "c", "d"],
        };
        p.require(need)?;
        spec.check(p, t)?;
        let prec = t.prec();
        let get = |k: &str| p.get(k).unwrap_or_else(|| Rat::from_integer(0.into()));
        let rats = [get("a"), get("b"), get("c"), get("d")];
        let f = |r: &Rat| rat_to_float(r, prec);
        Ok(Weight {
            family: j,
            prec,
            t: t.clone(),
            a: f(&rats[0]),
            b: f(&rats[1]),
            c: f(&rats[2]),
            d: f(&rats[3]),
            rats,
        })
    }

    /// Same weight at another time.
    pub fn at_time(&self, t: &Float) -> Result<Weight> {
        let mut w = self.clone();
        w.t = t.clone();
        if (self.family == Family::III && *t >= 0) || (self.family == Family::VI && *t <= 1) {
            return Err(Error::Domain(format!("time {} leaves the admissible domain", t.to_f64())));
        }
        Ok(w)
    }

    pub fn rule(&self) -> Option<Rule> {
        match self.family {
            Family::V | Family::VI => Some(Rule::TanhSinh),
            Family::III | Family::IV => Some(Rule::ExpSinh),
            _ => None,
        }
    }

    /// Exponent of `Θ` at `u = 0` (real families).
    pub fn alpha0(&self) -> f64 {
        let f = |i: usize| rat_to_f64(&self.rats[i]);
        match self.family {
            Family::VI => -f(0) - f(1) - 1.0,
            _ => -f(1) - 1.0,
        }
    }

    /// Exponent of `Θ` at `u = 1` for `[0, 1]` families.
    pub fn alpha1(&self) -> f64 {
        -rat_to_f64(&self.rats[2]) - 1.0
    }

    /// Truncation window for an integrand `u^{extra}·Θ(u)·(polynomial)`; `extra` shifts the exponent at `0`.
    pub fn window(&self, extra: f64, depth: f64) -> Result<Window> {
        let t = self.t.to_f64();
        match self.family {
            Family::V | Family::VI => Window::for_tails(
                Rule::TanhSinh,
                Tail::Power(self.alpha0() + extra),
                Tail::Power(self.alpha1()),
                depth,
            ),
            Family::III => Window::for_tails(
                Rule::ExpSinh,
                Tail::Essential { kappa: -t },
                Tail::Decay { kappa: 1.0, p: 1.0, shift: 0.0 },
                depth,
            ),
            Family::IV => Window::for_tails(
                Rule::ExpSinh,
                Tail::Power(self.alpha0() + extra),
                Tail::Decay { kappa: 0.5, p: 2.0, shift: t },
                depth,
            ),
            Family::II => Window::for_tails(
                Rule::ExpSinh,
                Tail::Power(extra.max(0.0)),
                Tail::Decay { kappa: 2.0 / 3.0, p: 3.0, shift: t.abs().sqrt() },
                depth,
            ),
            Family::I => Err(Error::Internal("family I".into())),
        }
    }

    /// `ln Θ(u)` for a real point.
    pub fn ln_theta(&self, p: &RealPoint) -> Float {
        let prec = self.prec;
        let one = || Float::with_val(prec, 1);
        match self.family {
            Family::III => {
                let b1 = -(self.b.clone() + 1u32);
                b1 * &p.ln_u + Float::with_val(prec, &self.t / &p.u) - &p.u
            }
            Family::IV => {
                let b1 = -(self.b.clone() + 1u32);
                let q = Float::with_val(prec, &p.u * &p.u) >> 1u32;
                b1 * &p.ln_u - Float::with_val(prec, &p.u * &self.t) - q
            }
            Family::V => {
                let b1 = -(self.b.clone() + 1u32);
                let c1 = -(self.c.clone() + 1u32);
                b1 * &p.ln_u + c1 * p.cu.clone().ln() + Float::with_val(prec, &p.u * &self.t)
            }
            Family::VI => {
                let ab1 = -(Float::with_val(prec, &self.a + &self.b) + 1u32);
                let c1 = -(self.c.clone() + 1u32);
                let tu = Float::with_val(prec, &self.t - one()) + &p.cu;
                ab1 * &p.ln_u + c1 * p.cu.clone().ln() - Float::with_val(prec, &self.d * tu.ln())
            }
            _ => Float::with_val(prec, rug::float::Special::Nan),
        }
    }

    /// `∂_t ln Θ(u)` for a real point.
    pub fn dt_ln_theta(&self, p: &RealPoint) -> Float {
        let prec = self.prec;
        match self.family {
            Family::IV => -p.u.clone(),
            Family::III => Float::with_val(prec, 1) / &p.u,
            Family::V => p.u.clone(),
            Family::VI => {
                let tu = Float::with_val(prec, &self.t - 1u32) + &p.cu;
                -(self.d.clone() / tu)
            }
            _ => Float::with_val(prec, rug::float::Special::Nan),
        }
    }

    /// `(t − u)`, accurate on `[0, 1]`.
    pub fn t_minus(&self, p: &RealPoint) -> Float {
        match self.family {
            Family::VI => Float::with_val(self.prec, &self.t - 1u32) + &p.cu,
            _ => Float::with_val(self.prec, &self.t - &p.u),
        }
    }

    /// `Θ_II(u) = e^{−(ut + 2u³/3)}` for complex `u`.
    pub fn theta_complex(&self, u: &CFloat) -> CFloat {
        let prec = self.prec;
        let cube = u.pow(3).scale(&(Float::with_val(prec, 2) / 3u32));
        let lin = u.scale(&self.t);
        let e = lin.add(&cube).neg();
        let mag = e.re.clone().exp();
        CFloat::cis(&e.im).scale(&mag)
    }

    /// Rays of the second-family polyline: `(direction, orientation)`.
    pub fn rays(&self) -> Vec<(CFloat, i32)> {
        let prec = self.prec;
        let ang = -(Float::with_val(prec, Constant::Pi) * 2u32 / 3u32);
        vec![(CFloat::cis(&ang), -1), (CFloat::real(Float::with_val(prec, 1)), 1)]
    }
}
