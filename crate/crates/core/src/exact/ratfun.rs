use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use super::mpoly::{same_registry, MPoly, Registry};
use super::rat::{int, Rat};
use crate::error::{Error, Result};

/// Rational function `num / Π f^e`.
///
/// The denominator is kept as a product of monic, non-constant factors. Sums use the
/// factor-wise maximum as common denominator, so no polynomial gcd is ever computed; a
/// factor is cancelled only when exact division by it succeeds.
#[derive(Clone)]
pub struct RatFun {
    num: MPoly,
    den: BTreeMap<MPoly, u32>,
}

impl RatFun {
    pub fn from_poly(p: MPoly) -> RatFun {
        RatFun { num: p, den: BTreeMap::new() }
    }

    pub fn zero(reg: &Arc<Registry>) -> RatFun {
        RatFun::from_poly(MPoly::zero(reg))
    }

    pub fn one(reg: &Arc<Registry>) -> RatFun {
        RatFun::from_poly(MPoly::one(reg))
    }

    pub fn constant(reg: &Arc<Registry>, c: Rat) -> RatFun {
        RatFun::from_poly(MPoly::constant(reg, c))
    }

    /// `num / den`; fails on a zero denominator.
    pub fn new(num: MPoly, den: MPoly) -> Result<RatFun> {
        if den.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        if !same_registry(num.registry(), den.registry()) {
            return Err(Error::Usage("numerator and denominator use different registries".into()));
        }
        if let Some(c) = den.constant_value() {
            return Ok(RatFun::from_poly(num.scale(&c.recip())));
        }
        let (lc, f) = den.monic();
        let mut den = BTreeMap::new();
        den.insert(f, 1);
        Ok(RatFun { num: num.scale(&lc.recip()), den }.cancel())
    }

    /// `1 / f^e` for a non-constant factor.
    pub fn inv_factor(f: &MPoly, e: u32) -> RatFun {
        let reg = f.registry().clone();
        if let Some(c) = f.constant_value() {
            return RatFun::constant(&reg, num_traits::pow(c.recip(), e as usize));
        }
        let (lc, m) = f.monic();
        let mut den = BTreeMap::new();
        den.insert(m, e);
        RatFun { num: MPoly::constant(&reg, num_traits::pow(lc.recip(), e as usize)), den }
    }

    pub fn registry(&self) -> &Arc<Registry> {
        self.num.registry()
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den_factors(&self) -> &BTreeMap<MPoly, u32> {
        &self.den
    }

    /// Expanded denominator.
    pub fn den(&self) -> MPoly {
        let mut d = MPoly::one(self.registry());
        for (f, &e) in &self.den {
            d = d.mul(&f.pow(e));
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_poly(&self) -> Option<&MPoly> {
        self.den.is_empty().then_some(&self.num)
    }

    pub fn constant_value(&self) -> Option<Rat> {
        if self.num.is_zero() {
            return Some(Rat::zero());
        }
        self.as_poly().and_then(|p| p.constant_value())
    }

    fn cancel(mut self) -> RatFun {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let mut out = BTreeMap::new();
        for (f, mut e) in std::mem::take(&mut self.den) {
            while e > 0 {
                match self.num.exact_div(&f) {
                    Some(q) => {
                        self.num = q;
                        e -= 1;
                    }
                    None => break,
                }
            }
            if e > 0 {
                out.insert(f, e);
            }
        }
        self.den = out;
        self
    }

    fn factor_product(reg: &Arc<Registry>, fs: &BTreeMap<MPoly, u32>) -> MPoly {
        let mut d = MPoly::one(reg);
        for (f, &e) in fs {
            if e > 0 {
                d = d.mul(&f.pow(e));
            }
        }
        d
    }

    /// Numerators of `self` and `other` over the factor-wise lcm denominator.
    fn common(&self, other: &RatFun) -> (MPoly, MPoly, BTreeMap<MPoly, u32>) {
        let reg = self.registry().clone();
        let mut l = self.den.clone();
        for (f, &e) in &other.den {
            let v = l.entry(f.clone()).or_insert(0);
            *v = (*v).max(e);
        }
        let miss = |d: &BTreeMap<MPoly, u32>| -> BTreeMap<MPoly, u32> {
            l.iter().map(|(f, &e)| (f.clone(), e - d.get(f).copied().unwrap_or(0))).collect()
        };
        let a = self.num.mul(&Self::factor_product(&reg, &miss(&self.den)));
        let b = other.num.mul(&Self::factor_product(&reg, &miss(&other.den)));
        (a, b, l)
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            return RatFun { num: self.num.add(&other.num), den: self.den.clone() }.cancel();
        }
        let (a, b, l) = self.common(other);
        RatFun { num: a.add(&b), den: l }.cancel()
    }

    pub fn sub(&self, other: &RatFun) -> RatFun {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFun {
        RatFun { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, c: &Rat) -> RatFun {
        if c.is_zero() {
            return RatFun::zero(self.registry());
        }
        RatFun { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &MPoly) -> RatFun {
        RatFun { num: self.num.mul(p), den: self.den.clone() }.cancel()
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        if self.is_zero() || other.is_zero() {
            return RatFun::zero(self.registry());
        }
        let (mut an, mut ad) = (self.num.clone(), self.den.clone());
        let (mut bn, mut bd) = (other.num.clone(), other.den.clone());
        cross_cancel(&mut an, &mut bd);
        cross_cancel(&mut bn, &mut ad);
        for (f, e) in bd {
            *ad.entry(f).or_insert(0) += e;
        }
        ad.retain(|_, e| *e > 0);
        RatFun { num: an.mul(&bn), den: ad }
    }

    pub fn recip(&self) -> Result<RatFun> {
        if self.is_zero() {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        let reg = self.registry().clone();
        let top = Self::factor_product(&reg, &self.den);
        RatFun::new(top, self.num.clone())
    }

    pub fn div(&self, other: &RatFun) -> Result<RatFun> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, k: u32) -> RatFun {
        let mut out = RatFun::one(self.registry());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn partial(&self, var: usize) -> RatFun {
        if self.den.is_empty() {
            return RatFun::from_poly(self.num.partial(var));
        }
        let reg = self.registry().clone();
        let deps: Vec<(&MPoly, u32)> =
            self.den.iter().filter(|(f, _)| f.uses_var(var)).map(|(f, &e)| (f, e)).collect();
        if deps.is_empty() {
            return RatFun { num: self.num.partial(var), den: self.den.clone() }.cancel();
        }
        let mut big_f = MPoly::one(&reg);
        for (f, _) in &deps {
            big_f = big_f.mul(f);
        }
        let mut num = self.num.partial(var).mul(&big_f);
        for (i, (f, e)) in deps.iter().enumerate() {
            let mut others = MPoly::one(&reg);
            for (j, (g, _)) in deps.iter().enumerate() {
                if i != j {
                    others = others.mul(g);
                }
            }
            let term = self.num.mul(&f.partial(var)).mul(&others).scale(&int(*e as i64));
            num = num.sub(&term);
        }
        let mut den = self.den.clone();
        for (f, _) in deps {
            *den.get_mut(f).unwrap() += 1;
        }
        RatFun { num, den }.cancel()
    }

    /// Exact value at a point; `None` if a denominator factor vanishes.
    pub fn eval(&self, vals: &[Rat]) -> Option<Rat> {
        let mut d = int(1);
        for (f, &e) in &self.den {
            let v = f.eval(vals);
            if v.is_zero() {
                return None;
            }
            d *= num_traits::pow(v, e as usize);
        }
        Some(self.num.eval(vals) / d)
    }

    /// Substitutes a rational value for one variable.
    pub fn subst_value(&self, var: usize, v: &Rat) -> Result<RatFun> {
        let reg = self.registry().clone();
        let mut out = RatFun::from_poly(self.num.subst_value(var, v));
        for (f, &e) in &self.den {
            let g = f.subst_value(var, v);
            if g.is_zero() {
                return Err(Error::Domain("denominator vanishes under substitution".into()));
            }
            out = out.mul(&RatFun::inv_factor(&g, e));
        }
        let _ = reg;
        Ok(out)
    }

    /// Substitutes a polynomial for one variable.
    pub fn subst(&self, var: usize, q: &MPoly) -> Result<RatFun> {
        let mut out = RatFun::from_poly(self.num.subst(var, q));
        for (f, &e) in &self.den {
            let g = f.subst(var, q);
            if g.is_zero() {
                return Err(Error::Domain("denominator vanishes under substitution".into()));
            }
            out = out.mul(&RatFun::inv_factor(&g, e));
        }
        Ok(out)
    }

    pub fn remap(&self, target: &Arc<Registry>) -> Result<RatFun> {
        let num = self.num.remap(target)?;
        let mut den = BTreeMap::new();
        for (f, &e) in &self.den {
            den.insert(f.remap(target)?, e);
        }
        Ok(RatFun { num, den })
    }

    pub fn permute(&self, perm: &[usize]) -> RatFun {
        let reg = self.registry().clone();
        let mut out = RatFun::from_poly(self.num.permute(perm));
        for (f, &e) in &self.den {
            out = out.mul(&RatFun::inv_factor(&f.permute(perm), e));
        }
        let _ = reg;
        out
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.num.uses_var(var) || self.den.keys().any(|f| f.uses_var(var))
    }

    /// Numerator after multiplying by the given common denominator factors.
    pub fn numerator_over(&self, l: &BTreeMap<MPoly, u32>) -> Option<MPoly> {
        let reg = self.registry().clone();
        let mut miss = BTreeMap::new();
        for (f, &e) in &self.den {
            let have = l.get(f).copied().unwrap_or(0);
            if have < e {
                return None;
            }
        }
        for (f, &e) in l {
            let own = self.den.get(f).copied().unwrap_or(0);
            miss.insert(f.clone(), e - own);
        }
        Some(self.num.mul(&Self::factor_product(&reg, &miss)))
    }

    /// Factor-wise lcm of several denominators.
    pub fn lcm_den<'a, I: IntoIterator<Item = &'a RatFun>>(it: I) -> BTreeMap<MPoly, u32> {
        let mut l: BTreeMap<MPoly, u32> = BTreeMap::new();
        for r in it {
            for (f, &e) in &r.den {
                let v = l.entry(f.clone()).or_insert(0);
                *v = (*v).max(e);
            }
        }
        l
    }
}

fn cross_cancel(num: &mut MPoly, den: &mut BTreeMap<MPoly, u32>) {
    if num.is_zero() {
        return;
    }
    for (f, e) in den.iter_mut() {
        while *e > 0 {
            match num.exact_div(f) {
                Some(q) => {
                    *num = q;
                    *e -= 1;
                }
                None => break,
            }
        }
    }
}

/// Decides `a = b` via `a.num·b.den − b.num·a.den = 0` over a common factor multiple.
pub fn ratfun_equal(a: &RatFun, b: &RatFun) -> bool {
    if !same_registry(a.registry(), b.registry()) {
        return false;
    }
    let (x, y, _) = a.common(b);
    x == y
}

impl PartialEq for RatFun {
    fn eq(&self, other: &RatFun) -> bool {
        ratfun_equal(self, other)
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let ds: Vec<String> = self
            .den
            .iter()
            .map(|(g, &e)| if e == 1 { format!("({g})") } else { format!("({g})^{e}") })
            .collect();
        write!(f, "({})/({})", self.num, ds.join("*"))
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFun({self})")
    }
}

impl From<MPoly> for RatFun {
    fn from(p: MPoly) -> RatFun {
        RatFun::from_poly(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> Arc<Registry> {
        Registry::new(&["z1", "z2", "t"])
    }

    fn p(s: &str) -> MPoly {
        MPoly::parse(&reg(), s).unwrap()
    }

    fn rf(n: &str, d: &str) -> RatFun {
        RatFun::new(p(n), p(d)).unwrap()
    }

    #[test]
    fn spec_equalities() {
        assert!(ratfun_equal(&rf("1", "z1 - z2"), &rf("z1 + z2", "z1^2 - z2^2")));
        assert!(ratfun_equal(&rf("t", "t^2"), &rf("1", "t")));
        assert!(!ratfun_equal(&rf("1", "z1 - z2"), &rf("1", "z2 - z1")));
    }

    #[test]
    fn sum_and_derivative() {
        let a = rf("1", "z1 - z2");
        let b = rf("1", "z2 - z1");
        assert!(a.add(&b).is_zero());
        let d = a.partial(0);
        assert!(ratfun_equal(&d, &rf("-1", "z1^2 - 2*z1*z2 + z2^2")));
        let w = rf("z1^2", "t");
        assert!(ratfun_equal(&w.partial(2), &rf("-z1^2", "t^2")));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(RatFun::new(p("1"), p("0")).is_err());
    }

    #[test]
    fn cancellation() {
        let a = rf("z1^2 - z2^2", "z1 - z2");
        assert_eq!(a.as_poly().unwrap(), &p("z1 + z2"));
        assert_eq!(a.eval(&[Rat::from_integer(2.into()), Rat::from_integer(1.into()), Rat::zero()]).unwrap(), Rat::from_integer(3.into()));
    }
}
