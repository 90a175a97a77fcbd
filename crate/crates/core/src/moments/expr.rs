use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::exact::{MPoly, Rat, RatFun, Registry};

/// `ν_k = ∫u^kΘ du` or `ρ_k = ∫u^k (t−u)^{-1} Θ du`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MomentSymbol {
    Nu(i64),
    Rho(i64),
}

impl fmt::Display for MomentSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentSymbol::Nu(k) => write!(f, "nu{k}"),
            MomentSymbol::Rho(k) => write!(f, "rho{k}"),
        }
    }
}

/// Sorted multiset of symbols; the empty product is `1`.
pub type MomentMonomial = Vec<MomentSymbol>;

fn fmt_monomial(m: &MomentMonomial) -> String {
    if m.is_empty() {
        return "1".into();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < m.len() {
        let mut j = i;
        while j < m.len() && m[j] == m[i] {
            j += 1;
        }
        parts.push(if j - i == 1 { m[i].to_string() } else { format!("{}^{}", m[i], j - i) });
        i = j;
    }
    parts.join("*")
}

/// Linear combination of moment products with rational-function coefficients.
#[derive(Clone)]
pub struct MomentExpr {
    reg: Arc<Registry>,
    terms: BTreeMap<MomentMonomial, RatFun>,
}

impl MomentExpr {
    pub fn zero(reg: &Arc<Registry>) -> MomentExpr {
        MomentExpr { reg: reg.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(c: RatFun) -> MomentExpr {
        let mut e = MomentExpr::zero(c.registry());
        e.add_term(Vec::new(), c);
        e
    }

    pub fn symbol(reg: &Arc<Registry>, s: MomentSymbol) -> MomentExpr {
        MomentExpr::monomial(reg, vec![s], RatFun::one(reg))
    }

    pub fn monomial(reg: &Arc<Registry>, mut m: MomentMonomial, c: RatFun) -> MomentExpr {
        m.sort();
        let mut e = MomentExpr::zero(reg);
        e.add_term(m, c);
        e
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.reg
    }

    pub fn terms(&self) -> &BTreeMap<MomentMonomial, RatFun> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &MomentMonomial) -> RatFun {
        self.terms.get(m).cloned().unwrap_or_else(|| RatFun::zero(&self.reg))
    }

    /// Adds `c·m`, keeping only nonzero coefficients.
    pub fn add_term(&mut self, m: MomentMonomial, c: RatFun) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = old.add(&c);
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &MomentExpr) -> MomentExpr {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MomentExpr) -> MomentExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MomentExpr {
        self.map_coefficients(|c| c.neg())
    }

    pub fn scale(&self, k: &Rat) -> MomentExpr {
        self.map_coefficients(|c| c.scale(k))
    }

    pub fn mul_fn(&self, f: &RatFun) -> MomentExpr {
        self.map_coefficients(|c| c.mul(f))
    }

    pub fn mul_poly(&self, f: &MPoly) -> MomentExpr {
        self.map_coefficients(|c| c.mul_poly(f))
    }

    pub fn mul(&self, other: &MomentExpr) -> MomentExpr {
        let mut out = MomentExpr::zero(&self.reg);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = ma.clone();
                m.extend_from_slice(mb);
                m.sort();
                out.add_term(m, ca.mul(cb));
            }
        }
        out
    }

    /// Applies `f` to every coefficient and drops zeros.
    pub fn map_coefficients<F: Fn(&RatFun) -> RatFun>(&self, f: F) -> MomentExpr {
        let mut out = MomentExpr::zero(&self.reg);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Coefficients evaluated at a point of the registry; `None` on a pole.
    pub fn eval_coefficients(&self, vals: &[Rat]) -> Option<BTreeMap<MomentMonomial, Rat>> {
        self.terms.iter().map(|(m, c)| Some((m.clone(), c.eval(vals)?))).collect()
    }

    /// Every symbol occurring in the expression.
    pub fn symbols(&self) -> Vec<MomentSymbol> {
        let mut s: Vec<MomentSymbol> = self.terms.keys().flatten().copied().collect();
        s.sort();
        s.dedup();
        s
    }

    /// Degree of the expression as a polynomial in the symbols, if homogeneous.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.len());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }
}

impl PartialEq for MomentExpr {
    fn eq(&self, other: &MomentExpr) -> bool {
        self.sub(other).is_zero()
    }
}

impl fmt::Display for MomentExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c})*{}", fmt_monomial(m))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for MomentExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MomentExpr({self})")
    }
}

pub fn monomial_name(m: &MomentMonomial) -> String {
    fmt_monomial(m)
}
