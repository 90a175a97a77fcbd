use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use super::rat::{fmt_rat, int, parse_rat, rat_pow, Rat};
use crate::error::{Error, Result};

/// Ordered list of variable names shared by the polynomials of one session.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Registry {
    names: Vec<String>,
}

impl Registry {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Arc<Registry> {
        Arc::new(Registry { names: names.iter().map(|s| s.as_ref().to_string()).collect() })
    }

    /// `z1 .. zN, t` followed by `extra`.
    pub fn session(n: usize, extra: &[&str]) -> Arc<Registry> {
        let mut names: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
        names.push("t".into());
        names.extend(extra.iter().map(|s| s.to_string()));
        Arc::new(Registry { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

pub type Exp = Vec<u32>;

/// Sparse multivariate polynomial with rational coefficients.
#[derive(Clone)]
pub struct MPoly {
    reg: Arc<Registry>,
    terms: BTreeMap<Exp, Rat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
}

pub fn same_registry(a: &Arc<Registry>, b: &Arc<Registry>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Checked arithmetic entry point.
pub fn mpoly_arith(lhs: &MPoly, rhs: &MPoly, op: ArithOp) -> Result<MPoly> {
    if !same_registry(&lhs.reg, &rhs.reg) {
        return Err(Error::Usage("polynomials belong to different registries".into()));
    }
    Ok(match op {
        ArithOp::Add => lhs.add(rhs),
        ArithOp::Mul => lhs.mul(rhs),
    })
}

impl MPoly {
    pub fn zero(reg: &Arc<Registry>) -> MPoly {
        MPoly { reg: reg.clone(), terms: BTreeMap::new() }
    }

    pub fn one(reg: &Arc<Registry>) -> MPoly {
        MPoly::constant(reg, int(1))
    }

    pub fn constant(reg: &Arc<Registry>, c: Rat) -> MPoly {
        let mut p = MPoly::zero(reg);
        if !c.is_zero() {
            p.terms.insert(vec![0; reg.len()], c);
        }
        p
    }

    pub fn var(reg: &Arc<Registry>, i: usize) -> MPoly {
        MPoly::monomial(reg, &[(i, 1)], int(1))
    }

    pub fn var_named(reg: &Arc<Registry>, name: &str) -> Result<MPoly> {
        let i = reg.index(name).ok_or_else(|| Error::Usage(format!("unknown variable `{name}`")))?;
        Ok(MPoly::var(reg, i))
    }

    pub fn monomial(reg: &Arc<Registry>, powers: &[(usize, u32)], c: Rat) -> MPoly {
        let mut e = vec![0; reg.len()];
        for &(i, k) in powers {
            e[i] += k;
        }
        let mut p = MPoly::zero(reg);
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Exp, Rat)>>(reg: &Arc<Registry>, it: I) -> MPoly {
        let mut p = MPoly::zero(reg);
        for (e, c) in it {
            assert_eq!(e.len(), reg.len(), "exponent vector length mismatch");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exp, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.reg
    }

    pub fn terms(&self) -> &BTreeMap<Exp, Rat> {
        &self.terms
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial has no variable dependence.
    pub fn constant_value(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn check(&self, other: &MPoly) {
        assert!(same_registry(&self.reg, &other.reg), "registry mismatch");
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        self.check(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.check(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly { reg: self.reg.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(&self.reg);
        }
        MPoly { reg: self.reg.clone(), terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        self.check(other);
        if self.is_zero() || other.is_zero() {
            return MPoly::zero(&self.reg);
        }
        let mut acc: HashMap<Exp, Rat> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exp = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let c = ca * cb;
                match acc.get_mut(&e) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        MPoly { reg: self.reg.clone(), terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut out = MPoly::one(&self.reg);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    pub fn partial(&self, var: usize) -> MPoly {
        let mut out = MPoly::zero(&self.reg);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut e2 = e.clone();
                e2[var] -= 1;
                out.add_term(e2, c * int(e[var] as i64));
            }
        }
        out
    }

    pub fn partial_named(&self, name: &str) -> Result<MPoly> {
        let i = self.reg.index(name).ok_or_else(|| Error::Usage(format!("unknown variable `{name}`")))?;
        Ok(self.partial(i))
    }

    pub fn degree(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Full evaluation; `vals` is indexed like the registry.
    pub fn eval(&self, vals: &[Rat]) -> Rat {
        assert_eq!(vals.len(), self.reg.len());
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    m *= rat_pow(&vals[i], k);
                }
            }
            acc += m;
        }
        acc
    }

    /// Evaluation with arbitrary commutative numeric type.
    pub fn eval_with<T, F>(&self, vals: &[T], lift: F) -> T
    where
        T: Clone + std::ops::Add<Output = T> + std::ops::Mul<Output = T>,
        F: Fn(&Rat) -> T,
    {
        let mut acc = lift(&Rat::zero());
        for (e, c) in &self.terms {
            let mut m = lift(c);
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    m = m * vals[i].clone();
                }
            }
            acc = acc + m;
        }
        acc
    }

    /// Substitutes polynomial `q` for variable `var`.
    pub fn subst(&self, var: usize, q: &MPoly) -> MPoly {
        self.check(q);
        let mut by_power: BTreeMap<u32, MPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e[var];
            let mut e2 = e.clone();
            e2[var] = 0;
            by_power.entry(k).or_insert_with(|| MPoly::zero(&self.reg)).add_term(e2, c.clone());
        }
        let mut out = MPoly::zero(&self.reg);
        let mut cache: Vec<MPoly> = vec![MPoly::one(&self.reg)];
        for (k, p) in by_power {
            while cache.len() <= k as usize {
                let next = cache.last().unwrap().mul(q);
                cache.push(next);
            }
            out = out.add(&p.mul(&cache[k as usize]));
        }
        out
    }

    pub fn subst_value(&self, var: usize, v: &Rat) -> MPoly {
        let mut out = MPoly::zero(&self.reg);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[var] = 0;
            out.add_term(e2, c * rat_pow(v, e[var]));
        }
        out
    }

    /// Re-expresses the polynomial over another registry, matching variables by name.
    pub fn remap(&self, target: &Arc<Registry>) -> Result<MPoly> {
        if same_registry(&self.reg, target) {
            return Ok(self.clone());
        }
        let map: Vec<Option<usize>> = self.reg.names().iter().map(|n| target.index(n)).collect();
        let mut out = MPoly::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => e2[j] += k,
                    None => {
                        return Err(Error::Usage(format!(
                            "variable `{}` missing from target registry",
                            self.reg.name(i)
                        )))
                    }
                }
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Lexicographically largest term.
    pub fn leading(&self) -> Option<(&Exp, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Scales so the leading coefficient is one; returns the removed factor.
    pub fn monic(&self) -> (Rat, MPoly) {
        match self.leading() {
            None => (Rat::zero(), self.clone()),
            Some((_, c)) => {
                let c = c.clone();
                let inv = c.recip();
                (c, self.scale(&inv))
            }
        }
    }

    /// Multivariate division in lex order; the remainder has no term divisible by `lt(d)`.
    pub fn div_rem(&self, d: &MPoly) -> (MPoly, MPoly) {
        self.check(d);
        let (le, lc) = d.leading().expect("division by zero polynomial");
        let (le, lc) = (le.clone(), lc.clone());
        let mut q = MPoly::zero(&self.reg);
        let mut r = MPoly::zero(&self.reg);
        let mut p = self.clone();
        while let Some((pe, pc)) = p.leading() {
            let pe = pe.clone();
            let pc = pc.clone();
            if pe.iter().zip(&le).all(|(a, b)| a >= b) {
                let qe: Exp = pe.iter().zip(&le).map(|(a, b)| a - b).collect();
                let qc = &pc / &lc;
                let mono = MPoly::from_terms(&self.reg, [(qe.clone(), qc.clone())]);
                p = p.sub(&d.mul(&mono));
                q.add_term(qe, qc);
            } else {
                p.terms.remove(&pe);
                r.add_term(pe, pc);
            }
        }
        (q, r)
    }

    pub fn exact_div(&self, d: &MPoly) -> Option<MPoly> {
        if let Some(c) = d.constant_value() {
            if c.is_zero() {
                return None;
            }
            return Some(self.scale(&c.recip()));
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        // cheap degree test before the full division
        for v in 0..self.reg.len() {
            if d.degree(v) > self.degree(v) {
                return None;
            }
        }
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Coefficients with respect to one variable.
    pub fn coeffs_in(&self, var: usize) -> BTreeMap<u32, MPoly> {
        let mut out: BTreeMap<u32, MPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[var] = 0;
            out.entry(e[var]).or_insert_with(|| MPoly::zero(&self.reg)).add_term(e2, c.clone());
        }
        out
    }

    /// Permutes variables: variable `i` becomes `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> MPoly {
        let mut out = MPoly::zero(&self.reg);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; e.len()];
            for (i, &k) in e.iter().enumerate() {
                e2[perm[i]] += k;
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    pub fn parse(reg: &Arc<Registry>, text: &str) -> Result<MPoly> {
        Parser { reg, toks: tokenize(text)?, pos: 0 }.expr()
    }

    fn fmt_monomial(&self, e: &Exp) -> String {
        let mut parts = Vec::new();
        for (i, &k) in e.iter().enumerate() {
            match k {
                0 => {}
                1 => parts.push(self.reg.name(i).to_string()),
                _ => parts.push(format!("{}^{}", self.reg.name(i), k)),
            }
        }
        parts.join("*")
    }
}

impl PartialEq for MPoly {
    fn eq(&self, other: &MPoly) -> bool {
        same_registry(&self.reg, &other.reg) && self.terms == other.terms
    }
}

impl Eq for MPoly {}

impl PartialOrd for MPoly {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MPoly {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.terms.cmp(&other.terms)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            let mono = self.fmt_monomial(e);
            let body = if mono.is_empty() { fmt_rat(&a) } else { format!("{}*{}", fmt_rat(&a), mono) };
            match (n, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr<&MPoly> for &MPoly {
            type Output = MPoly;
            fn $m(self, rhs: &MPoly) -> MPoly {
                MPoly::$f(self, rhs)
            }
        }
        impl std::ops::$tr<MPoly> for MPoly {
            type Output = MPoly;
            fn $m(self, rhs: MPoly) -> MPoly {
                MPoly::$f(&self, &rhs)
            }
        }
    };
}
binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl std::ops::Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly::neg(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            d if d.is_ascii_digit() => {
                let st = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Tok::Num(cs[st..i].iter().collect()));
            }
            a if a.is_alphabetic() || a == '_' => {
                let st = i;
                while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(cs[st..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    reg: &'a Arc<Registry>,
    toks: Vec<Tok>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<MPoly> {
        let mut acc = MPoly::zero(self.reg);
        let mut sign = int(1);
        if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            sign = int(-1);
        } else if let Some(Tok::Plus) = self.peek() {
            self.pos += 1;
        }
        loop {
            let t = self.term()?;
            acc = acc.add(&t.scale(&sign));
            match self.peek() {
                None | Some(Tok::RParen) => break,
                Some(Tok::Plus) => {
                    self.pos += 1;
                    sign = int(1)
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    sign = int(-1)
                }
                Some(t) => return Err(Error::Parse(format!("unexpected token {t:?}"))),
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let d = self.factor()?;
                    let c = d.constant_value().filter(|c| !c.is_zero());
                    let Some(c) = c else {
                        return Err(Error::Parse("division only by a nonzero number".into()));
                    };
                    acc = acc.scale(&c.recip());
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MPoly> {
        let base = match self.next() {
            Some(Tok::Num(n)) => {
                if let Some(Tok::Slash) = self.peek() {
                    self.pos += 1;
                    match self.next() {
                        Some(Tok::Num(d)) => MPoly::constant(self.reg, parse_rat(&format!("{n}/{d}"))?),
                        _ => return Err(Error::Parse("expected denominator".into())),
                    }
                } else {
                    MPoly::constant(self.reg, parse_rat(&n)?)
                }
            }
            Some(Tok::Ident(name)) => MPoly::var_named(self.reg, &name).map_err(|e| Error::Parse(e.to_string()))?,
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => e,
                    _ => return Err(Error::Parse("expected `)`".into())),
                }
            }
            Some(Tok::Minus) => return Ok(self.factor()?.neg()),
            other => return Err(Error::Parse(format!("unexpected token {other:?}"))),
        };
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.next() {
                Some(Tok::Num(k)) => {
                    let k: u32 = k.parse().map_err(|_| Error::Parse("bad exponent".into()))?;
                    return Ok(base.pow(k));
                }
                _ => return Err(Error::Parse("expected exponent".into())),
            }
        }
        Ok(base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::rat;

    fn reg() -> Arc<Registry> {
        Registry::new(&["z1", "z2", "t", "nu0"])
    }

    #[test]
    fn difference_of_squares() {
        let r = reg();
        let z = MPoly::var(&r, 0);
        let t = MPoly::var(&r, 2);
        assert_eq!(&(&z + &t) * &(&z - &t), MPoly::parse(&r, "z1^2 - t^2").unwrap());
    }

    #[test]
    fn binomial_cube() {
        let r = reg();
        let p = MPoly::parse(&r, "(z1+z2)^3").unwrap();
        assert_eq!(p.nterms(), 4);
        let mut cs: Vec<String> = p.terms().values().map(fmt_rat).collect();
        cs.sort();
        assert_eq!(cs, ["1", "1", "3", "3"]);
    }

    #[test]
    fn display_roundtrip() {
        let r = reg();
        let p = MPoly::parse(&r, "3/2*z1^2*t - 1*nu0").unwrap();
        assert_eq!(p.to_string(), "3/2*z1^2*t - 1*nu0");
        assert_eq!(MPoly::parse(&r, &p.to_string()).unwrap(), p);
    }

    #[test]
    fn partials() {
        let r = reg();
        let p = MPoly::parse(&r, "z1^2*z2").unwrap();
        assert_eq!(p.partial(0), MPoly::parse(&r, "2*z1*z2").unwrap());
        assert!(MPoly::constant(&r, rat(5, 3)).partial(2).is_zero());
        assert!(p.partial_named("w").is_err());
    }

    #[test]
    fn division() {
        let r = reg();
        let a = MPoly::parse(&r, "z1^2 - z2^2").unwrap();
        let d = MPoly::parse(&r, "z1 - z2").unwrap();
        assert_eq!(a.exact_div(&d).unwrap(), MPoly::parse(&r, "z1 + z2").unwrap());
        assert!(MPoly::parse(&r, "z1^2 + z2").unwrap().exact_div(&d).is_none());
    }

    #[test]
    fn registry_mismatch_is_usage_error() {
        let a = MPoly::var(&reg(), 0);
        let b = MPoly::var(&Registry::new(&["x"]), 0);
        assert!(matches!(mpoly_arith(&a, &b, ArithOp::Add), Err(Error::Usage(_))));
    }

    #[test]
    fn substitution() {
        let r = reg();
        let p = MPoly::parse(&r, "z1^2 + t").unwrap();
        let q = MPoly::parse(&r, "z2 - 1").unwrap();
        assert_eq!(p.subst(0, &q), MPoly::parse(&r, "z2^2 - 2*z2 + 1 + t").unwrap());
        assert_eq!(p.eval(&[rat(1, 2), int(0), int(3), int(0)]), rat(13, 4));
    }
}
