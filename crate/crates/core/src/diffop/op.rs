use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::exact::{int, MPoly, Rat, RatFun, Registry};

const MAX_VARS: usize = 8;

/// Session registry `z1 .. zN, t`.
pub fn z_registry(n: usize) -> Arc<Registry> {
    static REGS: [OnceLock<Arc<Registry>>; MAX_VARS + 1] = [const { OnceLock::new() }; MAX_VARS + 1];
    assert!(n <= MAX_VARS, "at most {MAX_VARS} particles");
    REGS[n].get_or_init(|| Registry::session(n, &[])).clone()
}

/// Registry of univariate term templates `g(x, t)`.
pub fn template_registry() -> &'static Arc<Registry> {
    static REG: OnceLock<Arc<Registry>> = OnceLock::new();
    REG.get_or_init(|| Registry::new(&["x", "t"]))
}

/// The template variable `x`.
pub fn tx() -> MPoly {
    MPoly::var(template_registry(), 0)
}

/// The template variable `t`.
pub fn tt() -> MPoly {
    MPoly::var(template_registry(), 1)
}

pub fn tc(c: Rat) -> MPoly {
    MPoly::constant(template_registry(), c)
}

/// `g(z_ρ, t)` from a template `g(x, t)`.
pub fn instantiate(g: &MPoly, reg: &Arc<Registry>, rho: usize) -> MPoly {
    let n = reg.len() - 1;
    let terms = g.terms().iter().map(|(e, c)| {
        let mut e2 = vec![0; n + 1];
        e2[rho] = e[0];
        e2[n] = e[1];
        (e2, c.clone())
    });
    MPoly::from_terms(reg, terms)
}

/// Term shapes of the symmetric operators, with sums over ordered pairs `ρ ≠ σ`.
#[derive(Clone, Debug)]
pub enum Term {
    /// `Σ_ρ g(z_ρ) ∂²_ρ`
    Second(MPoly),
    /// `Σ_ρ g(z_ρ) ∂_ρ`
    First(MPoly),
    /// `Σ_ρ g(z_ρ)`
    Zeroth(MPoly),
    /// `g(t)`
    Scalar(MPoly),
    /// `Σ_{ρ≠σ} (f(z_ρ)∂_ρ − f(z_σ)∂_σ)/(z_ρ − z_σ)`
    DividedDifference(MPoly),
    /// `Σ_{ρ≠σ} f(z_ρ)/(z_ρ − z_σ)²`
    PotentialSingle(MPoly),
    /// `Σ_{ρ≠σ} (f(z_ρ) + f(z_σ))/(z_ρ − z_σ)²`
    PotentialPair(MPoly),
}

/// `Σ A_ρ ∂²_ρ + Σ B_ρ ∂_ρ + C` acting on functions of `z1 .. zN, t`.
#[derive(Clone)]
pub struct DiffOp {
    n: usize,
    reg: Arc<Registry>,
    a: Vec<RatFun>,
    b: Vec<RatFun>,
    c: RatFun,
}

impl DiffOp {
    pub fn zero(n: usize) -> DiffOp {
        let reg = z_registry(n);
        let z = RatFun::zero(&reg);
        DiffOp { n, reg, a: vec![z.clone(); n], b: vec![z.clone(); n], c: z }
    }

    pub fn from_parts(n: usize, a: Vec<RatFun>, b: Vec<RatFun>, c: RatFun) -> Result<DiffOp> {
        if a.len() != n || b.len() != n {
            return Err(Error::Usage("coefficient count does not match the number of variables".into()));
        }
        Ok(DiffOp { n, reg: z_registry(n), a, b, c })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.reg
    }

    pub fn second(&self) -> &[RatFun] {
        &self.a
    }

    pub fn first(&self) -> &[RatFun] {
        &self.b
    }

    pub fn zeroth(&self) -> &RatFun {
        &self.c
    }

    fn z(&self, rho: usize) -> MPoly {
        MPoly::var(&self.reg, rho)
    }

    /// `1 / (z_ρ − z_σ)`.
    fn inv_diff(&self, rho: usize, sigma: usize, e: u32) -> RatFun {
        RatFun::inv_factor(&self.z(rho).sub(&self.z(sigma)), e)
    }

    /// `w_ρ = Σ_{σ≠ρ} 1/(z_ρ − z_σ)`.
    pub fn log_vandermonde_gradient(&self, rho: usize) -> RatFun {
        let mut w = RatFun::zero(&self.reg);
        for sigma in 0..self.n {
            if sigma != rho {
                w = w.add(&self.inv_diff(rho, sigma, 1));
            }
        }
        w
    }

    pub fn add_term(&mut self, term: &Term) {
        let reg = self.reg.clone();
        let n = self.n;
        match term {
            Term::Second(g) => {
                for r in 0..n {
                    self.a[r] = self.a[r].add(&instantiate(g, &reg, r).into());
                }
            }
            Term::First(g) => {
                for r in 0..n {
                    self.b[r] = self.b[r].add(&instantiate(g, &reg, r).into());
                }
            }
            Term::Zeroth(g) => {
                for r in 0..n {
                    self.c = self.c.add(&instantiate(g, &reg, r).into());
                }
            }
            Term::Scalar(g) => {
                self.c = self.c.add(&instantiate(g, &reg, 0).into());
            }
            Term::DividedDifference(f) => {
                for r in 0..n {
                    let fr = instantiate(f, &reg, r).scale(&int(2));
                    for s in 0..n {
                        if s != r {
                            self.b[r] = self.b[r].add(&self.inv_diff(r, s, 1).mul_poly(&fr));
                        }
                    }
                }
            }
            Term::PotentialSingle(f) => {
                for r in 0..n {
                    let fr = instantiate(f, &reg, r);
                    for s in 0..n {
                        if s != r {
                            self.c = self.c.add(&self.inv_diff(r, s, 2).mul_poly(&fr));
                        }
                    }
                }
            }
            Term::PotentialPair(f) => {
                for r in 0..n {
                    for s in 0..n {
                        if s != r {
                            let fs = instantiate(f, &reg, r).add(&instantiate(f, &reg, s));
                            self.c = self.c.add(&self.inv_diff(r, s, 2).mul_poly(&fs));
                        }
                    }
                }
            }
        }
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        assert_eq!(self.n, other.n, "operator size mismatch");
        DiffOp {
            n: self.n,
            reg: self.reg.clone(),
            a: self.a.iter().zip(&other.a).map(|(x, y)| x.add(y)).collect(),
            b: self.b.iter().zip(&other.b).map(|(x, y)| x.add(y)).collect(),
            c: self.c.add(&other.c),
        }
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, k: &Rat) -> DiffOp {
        DiffOp {
            n: self.n,
            reg: self.reg.clone(),
            a: self.a.iter().map(|x| x.scale(k)).collect(),
            b: self.b.iter().map(|x| x.scale(k)).collect(),
            c: self.c.scale(k),
        }
    }

    /// Multiplies every coefficient by a function.
    pub fn mul_fn(&self, k: &RatFun) -> DiffOp {
        DiffOp {
            n: self.n,
            reg: self.reg.clone(),
            a: self.a.iter().map(|x| x.mul(k)).collect(),
            b: self.b.iter().map(|x| x.mul(k)).collect(),
            c: self.c.mul(k),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().chain(&self.b).all(|x| x.is_zero()) && self.c.is_zero()
    }

    /// Applies the operator to a function of `z`, `t` without symmetry checks.
    pub fn apply_raw(&self, f: &RatFun) -> RatFun {
        let mut out = self.c.mul(f);
        for r in 0..self.n {
            let d = f.partial(r);
            if !self.b[r].is_zero() {
                out = out.add(&self.b[r].mul(&d));
            }
            if !self.a[r].is_zero() {
                out = out.add(&self.a[r].mul(&d.partial(r)));
            }
        }
        out
    }

    /// Applies the operator to a symmetric polynomial.
    pub fn apply(&self, f: &MPoly) -> Result<RatFun> {
        if !is_symmetric(f, self.n) {
            return Err(Error::Domain(format!("input is not symmetric in z: {f}")));
        }
        Ok(self.apply_raw(&RatFun::from_poly(f.clone())))
    }

    /// Applies the operator and asserts a polynomial result.
    pub fn apply_polynomial(&self, f: &MPoly) -> Result<MPoly> {
        let r = self.apply(f)?;
        let den = r.den();
        r.num()
            .exact_div(&den)
            .ok_or_else(|| Error::DivisionRemainder(format!("result is not polynomial: {r}")))
    }

    /// `Δ^{−R} ∘ op ∘ Δ^{R}`.
    pub fn conjugate_by_vandermonde(&self, r: &Rat) -> DiffOp {
        let rr = RatFun::constant(&self.reg, r.clone());
        let mut out = self.clone();
        for rho in 0..self.n {
            let w = self.log_vandermonde_gradient(rho);
            let rw = w.mul(&rr);
            out.b[rho] = self.b[rho].add(&self.a[rho].mul(&rw).scale(&int(2)));
            let second = rw.mul(&rw).add(&w.partial(rho).mul(&rr));
            out.c = out.c.add(&self.a[rho].mul(&second)).add(&self.b[rho].mul(&rw));
        }
        out
    }

    /// `e^{S/ħ} ∘ op ∘ e^{−S/ħ} + ∂_t S`.
    pub fn gauge_scalar_conjugate(&self, s: &MPoly, hbar: &Rat) -> Result<DiffOp> {
        if hbar == &Rat::from_integer(0.into()) {
            return Err(Error::Usage("hbar must be nonzero".into()));
        }
        let it = self.n;
        let inv_h = hbar.recip();
        let mut out = self.clone();
        for rho in 0..self.n {
            let sr = RatFun::from_poly(s.partial(rho).scale(&inv_h));
            out.b[rho] = self.b[rho].sub(&self.a[rho].mul(&sr).scale(&int(2)));
            let second = sr.mul(&sr).sub(&sr.partial(rho));
            out.c = out.c.add(&self.a[rho].mul(&second)).sub(&self.b[rho].mul(&sr));
        }
        out.c = out.c.add(&RatFun::from_poly(s.partial(it)));
        Ok(out)
    }

    /// Image under a permutation of the z variables.
    pub fn permuted(&self, perm: &[usize]) -> DiffOp {
        let mut full: Vec<usize> = perm.to_vec();
        full.push(self.n);
        let mut a = vec![RatFun::zero(&self.reg); self.n];
        let mut b = a.clone();
        for r in 0..self.n {
            a[perm[r]] = self.a[r].permute(&full);
            b[perm[r]] = self.b[r].permute(&full);
        }
        DiffOp { n: self.n, reg: self.reg.clone(), a, b, c: self.c.permute(&full) }
    }

    /// Invariance under every transposition of the z variables.
    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.n {
            for j in i + 1..self.n {
                let mut p: Vec<usize> = (0..self.n).collect();
                p.swap(i, j);
                if !operator_equal(self, &self.permuted(&p)) {
                    return false;
                }
            }
        }
        true
    }

    /// Differences per coefficient slot, as (slot name, difference).
    pub fn slot_differences(&self, other: &DiffOp) -> Vec<(String, RatFun)> {
        let mut out = Vec::new();
        for r in 0..self.n {
            let d = self.a[r].sub(&other.a[r]);
            if !d.is_zero() {
                out.push((format!("d2/dz{}", r + 1), d));
            }
        }
        for r in 0..self.n {
            let d = self.b[r].sub(&other.b[r]);
            if !d.is_zero() {
                out.push((format!("d/dz{}", r + 1), d));
            }
        }
        let d = self.c.sub(&other.c);
        if !d.is_zero() {
            out.push(("1".into(), d));
        }
        out
    }

    /// All coefficient slots in a fixed order.
    pub fn slots(&self) -> Vec<&RatFun> {
        self.a.iter().chain(&self.b).chain(std::iter::once(&self.c)).collect()
    }
}

/// Symmetric under all transpositions of `z1 .. zN`.
pub fn is_symmetric(f: &MPoly, n: usize) -> bool {
    let len = f.registry().len();
    for i in 0..n.saturating_sub(1) {
        let mut p: Vec<usize> = (0..len).collect();
        p.swap(i, i + 1);
        if f.permute(&p) != *f {
            return false;
        }
    }
    true
}

/// Builds a canonical operator from a term list.
pub fn canonicalize(n: usize, terms: &[Term]) -> DiffOp {
    let mut op = DiffOp::zero(n);
    for t in terms {
        op.add_term(t);
    }
    op
}

/// Coefficient-wise equality.
pub fn operator_equal(a: &DiffOp, b: &DiffOp) -> bool {
    a.n == b.n && a.slot_differences(b).is_empty()
}

impl PartialEq for DiffOp {
    fn eq(&self, other: &DiffOp) -> bool {
        operator_equal(self, other)
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.a.iter().enumerate() {
            if !a.is_zero() {
                write!(f, "{}({a})*d2/dz{}", if first { "" } else { " + " }, i + 1)?;
                first = false;
            }
        }
        for (i, b) in self.b.iter().enumerate() {
            if !b.is_zero() {
                write!(f, "{}({b})*d/dz{}", if first { "" } else { " + " }, i + 1)?;
                first = false;
            }
        }
        if !self.c.is_zero() || first {
            write!(f, "{}({})", if first { "" } else { " + " }, self.c)?;
        }
        Ok(())
    }
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOp[N={}]({self})", self.n)
    }
}
