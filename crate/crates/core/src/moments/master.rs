use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::{int, MPoly, Rat, RatFun, Registry};
use crate::params::{Family, ParamSet};

/// One-variable weight `Θ_J(u, t)` with evaluated parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterFunction {
    family: Family,
    a: Rat,
    b: Rat,
    c: Rat,
    d: Rat,
}

/// How `∂_t` acts on `ν_k = ∫ u^k Θ du`.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeShift {
    /// `∂_t ν_k = coeff · ν_{k+shift}`.
    Nu { shift: i64, coeff: Rat },
    /// `∂_t ν_k = coeff · ρ_k`.
    Rho { coeff: Rat },
}

fn ut_registry() -> Arc<Registry> {
    Registry::new(&["u", "t"])
}

impl MasterFunction {
    pub fn new(j: Family, p: &ParamSet) -> Result<MasterFunction> {
        let need: &[&str] = match j {
            Family::I => return Err(Error::Usage("family I has no master function".into())),
            Family::II => &[],
            Family::III | Family::IV => &["b"],
            Family::V => &["b", "c"],
            Family::VI => &["a", "b", "c", "d"],
        };
        p.require(need)?;
        let get = |k: &str| p.get(k).unwrap_or_else(|| int(0));
        Ok(MasterFunction { family: j, a: get("a"), b: get("b"), c: get("c"), d: get("d") })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn param(&self, key: &str) -> Rat {
        match key {
            "a" => self.a.clone(),
            "b" => self.b.clone(),
            "c" => self.c.clone(),
            _ => self.d.clone(),
        }
    }

    /// `Θ′/Θ` as a rational function over `[u, t]`.
    pub fn log_derivative(&self) -> RatFun {
        let reg = ut_registry();
        let u = MPoly::var(&reg, 0);
        let t = MPoly::var(&reg, 1);
        let one = MPoly::one(&reg);
        let k = |r: &Rat| RatFun::constant(&reg, r.clone());
        let over = |num: RatFun, f: &MPoly, e: u32| num.mul(&RatFun::inv_factor(f, e));
        let b1 = -(&self.b + int(1));
        match self.family {
            Family::II => RatFun::from_poly(t.add(&u.mul(&u).scale(&int(2))).neg()),
            Family::III => over(k(&b1), &u, 1)
                .add(&over(RatFun::from_poly(t.neg()), &u, 2))
                .sub(&RatFun::one(&reg)),
            Family::IV => over(k(&b1), &u, 1).sub(&RatFun::from_poly(t.add(&u))),
            Family::V => over(k(&b1), &u, 1)
                .add(&over(k(&(&self.c + int(1))), &one.sub(&u), 1))
                .add(&RatFun::from_poly(t)),
            Family::VI => over(k(&(b1 - &self.a)), &u, 1)
                .add(&over(k(&(&self.c + int(1))), &one.sub(&u), 1))
                .add(&over(k(&self.d), &t.sub(&u), 1)),
            Family::I => unreachable!(),
        }
    }

    /// Canonical clearing polynomial `c_J(u)` over `[u, t]`.
    pub fn clearing(&self) -> MPoly {
        let reg = ut_registry();
        let u = MPoly::var(&reg, 0);
        let t = MPoly::var(&reg, 1);
        let one = MPoly::one(&reg);
        match self.family {
            Family::II => one,
            Family::III => u.mul(&u),
            Family::IV => u,
            Family::V => u.mul(&one.sub(&u)),
            Family::VI => u.mul(&one.sub(&u)).mul(&t.sub(&u)),
            Family::I => unreachable!(),
        }
    }

    /// `c·Θ′/Θ`; fails if the clearing polynomial does not clear the poles.
    pub fn cleared_log_derivative_with(&self, clearing: &MPoly) -> Result<MPoly> {
        self.log_derivative()
            .mul_poly(clearing)
            .as_poly()
            .cloned()
            .ok_or_else(|| Error::Internal(format!("c(u) = {clearing} does not clear the log-derivative")))
    }

    /// `∂_t log Θ` over `[u, t]`.
    pub fn time_log_derivative(&self) -> RatFun {
        let reg = ut_registry();
        let u = MPoly::var(&reg, 0);
        let t = MPoly::var(&reg, 1);
        match self.family {
            Family::II | Family::IV => RatFun::from_poly(u.neg()),
            Family::III => RatFun::inv_factor(&u, 1),
            Family::V => RatFun::from_poly(u),
            Family::VI => RatFun::inv_factor(&t.sub(&u), 1).scale(&-self.d.clone()),
            Family::I => unreachable!(),
        }
    }

    pub fn time_shift(&self) -> TimeShift {
        match self.family {
            Family::II | Family::IV => TimeShift::Nu { shift: 1, coeff: int(-1) },
            Family::III => TimeShift::Nu { shift: -1, coeff: int(1) },
            Family::V => TimeShift::Nu { shift: 1, coeff: int(1) },
            Family::VI => TimeShift::Rho { coeff: -self.d.clone() },
            Family::I => unreachable!(),
        }
    }

    /// `Θ(u, t)` in double precision, for real `u` inside the integration domain.
    pub fn eval_f64(&self, u: f64, t: f64) -> f64 {
        let f = |r: &Rat| crate::exact::rat_to_f64(r);
        let (a, b, c, d) = (f(&self.a), f(&self.b), f(&self.c), f(&self.d));
        match self.family {
            Family::II => (-(u * t + 2.0 * u.powi(3) / 3.0)).exp(),
            Family::III => u.powf(-b - 1.0) * (t / u - u).exp(),
            Family::IV => u.powf(-b - 1.0) * (-(u * t + u * u / 2.0)).exp(),
            Family::V => u.powf(-b - 1.0) * (1.0 - u).powf(-c - 1.0) * (u * t).exp(),
            Family::VI => u.powf(-a - b - 1.0) * (1.0 - u).powf(-c - 1.0) * (t - u).powf(-d),
            Family::I => f64::NAN,
        }
    }
}

/// Coefficients of a `[u, t]` polynomial in powers of `u`, moved into `reg` (which must contain `t`).
pub(crate) fn u_coefficients(p: &MPoly, reg: &Arc<Registry>) -> Result<Vec<MPoly>> {
    let ti = reg.index("t").ok_or_else(|| Error::Internal("moment registry lacks `t`".into()))?;
    let by_u = p.coeffs_in(0);
    let top = by_u.keys().next_back().copied().unwrap_or(0) as usize;
    let mut out = vec![MPoly::zero(reg); top + 1];
    for (k, c) in by_u {
        let mut q = MPoly::zero(reg);
        for (e, v) in c.terms() {
            q = q.add(&MPoly::monomial(reg, &[(ti, e[1])], v.clone()));
        }
        out[k as usize] = q;
    }
    Ok(out)
}
