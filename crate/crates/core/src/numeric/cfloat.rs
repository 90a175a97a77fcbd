use std::fmt;

use rug::Float;

use crate::exact::Rat;

/// Complex number as a pair of MPFR floats.
#[derive(Clone, PartialEq)]
pub struct CFloat {
    pub re: Float,
    pub im: Float,
}

impl CFloat {
    pub fn zero(prec: u32) -> CFloat {
        CFloat { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn real(re: Float) -> CFloat {
        let im = Float::new(re.prec());
        CFloat { re, im }
    }

    pub fn new(re: Float, im: Float) -> CFloat {
        CFloat { re, im }
    }

    /// `e^{iθ}`.
    pub fn cis(theta: &Float) -> CFloat {
        let (s, c) = theta.clone().sin_cos(Float::new(theta.prec()));
        CFloat { re: c, im: s }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn add(&self, o: &CFloat) -> CFloat {
        CFloat { re: self.re.clone() + &o.re, im: self.im.clone() + &o.im }
    }

    pub fn sub(&self, o: &CFloat) -> CFloat {
        CFloat { re: self.re.clone() - &o.re, im: self.im.clone() - &o.im }
    }

    pub fn neg(&self) -> CFloat {
        CFloat { re: -self.re.clone(), im: -self.im.clone() }
    }

    pub fn mul(&self, o: &CFloat) -> CFloat {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        CFloat { re, im }
    }

    pub fn scale(&self, k: &Float) -> CFloat {
        CFloat { re: self.re.clone() * k, im: self.im.clone() * k }
    }

    pub fn scale_rat(&self, k: &Rat) -> CFloat {
        self.scale(&rat_to_float(k, self.prec()))
    }

    pub fn div(&self, o: &CFloat) -> CFloat {
        let p = self.prec();
        let den = Float::with_val(p, o.re.clone().square() + &o.im.clone().square());
        let conj = CFloat { re: o.re.clone(), im: -o.im.clone() };
        let num = self.mul(&conj);
        CFloat { re: num.re / &den, im: num.im / &den }
    }

    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn pow(&self, k: u32) -> CFloat {
        let mut out = CFloat::real(Float::with_val(self.prec(), 1));
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let re = fmt_float(&self.re, digits);
        if self.im.is_zero() {
            return re;
        }
        let im = fmt_float(&self.im.clone().abs(), digits);
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        format!("{re} {sign} {im}i")
    }
}

impl fmt::Debug for CFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20))
    }
}

impl fmt::Display for CFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20))
    }
}

/// Exact rational rounded to `prec` bits.
pub fn rat_to_float(r: &Rat, prec: u32) -> Float {
    let parse = |s: String| Float::with_val(prec, Float::parse(s).expect("integer literal"));
    parse(r.numer().to_string()) / parse(r.denom().to_string())
}

/// Scientific notation, `digits` significant digits.
pub fn fmt_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(digits.max(2)))
}

/// Short residual string, e.g. `3.2e-15`.
pub fn fmt_residual(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.3e}")
    }
}
