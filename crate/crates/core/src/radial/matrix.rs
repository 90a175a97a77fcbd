use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::{fmt_rat, int, rat, rat_pow, MPoly, Rat, RatFun, Registry};
use crate::weyl::{check_size, cint, trace_combination, weyl_registry, Letter, Mode, NCPoly};

/// Dense square matrix over the rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    n: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zero(n: usize) -> RatMatrix {
        RatMatrix { n, data: vec![Rat::zero(); n * n] }
    }

    pub fn identity(n: usize) -> RatMatrix {
        let mut m = RatMatrix::zero(n);
        for i in 0..n {
            m.data[i * n + i] = Rat::one();
        }
        m
    }

    pub fn diagonal(d: &[Rat]) -> RatMatrix {
        let mut m = RatMatrix::zero(d.len());
        for (i, x) in d.iter().enumerate() {
            m.data[i * d.len() + i] = x.clone();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rat>]) -> Result<RatMatrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Usage("matrix must be square".into()));
        }
        Ok(RatMatrix { n, data: rows.iter().flatten().cloned().collect() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.n + j]
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        let n = self.n;
        let mut out = RatMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Rat {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            for j in 0..n {
                a.data.swap(col * n + j, piv * n + j);
                inv.data.swap(col * n + j, piv * n + j);
            }
            let s = a.get(col, col).recip();
            for j in 0..n {
                a.data[col * n + j] *= &s;
                inv.data[col * n + j] *= &s;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let x = &f * a.get(col, j);
                    a.data[r * n + j] -= x;
                    let y = &f * inv.get(col, j);
                    inv.data[r * n + j] -= y;
                }
            }
        }
        Some(inv)
    }

    /// `[I, M, M², ..., M^k]`.
    pub fn powers(&self, k: usize) -> Vec<RatMatrix> {
        let mut out = vec![RatMatrix::identity(self.n)];
        for i in 0..k {
            let next = out[i].mul(self);
            out.push(next);
        }
        out
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| (0..self.n).map(|j| fmt_rat(self.get(i, j))).collect::<Vec<_>>().join(", "))
            .collect();
        write!(f, "[[{}]]", rows.join("], ["))
    }
}

/// `Q = G Z G⁻¹` with `Z` diagonal with distinct entries.
#[derive(Clone, Debug)]
pub struct RationalMatrixPoint {
    z: Vec<Rat>,
    g: RatMatrix,
    q: RatMatrix,
}

impl RationalMatrixPoint {
    pub fn new(z: Vec<Rat>, g: RatMatrix) -> Result<RationalMatrixPoint> {
        if g.size() != z.len() {
            return Err(Error::Usage("conjugating matrix size does not match the eigenvalue count".into()));
        }
        for i in 0..z.len() {
            for j in i + 1..z.len() {
                if z[i] == z[j] {
                    return Err(Error::DegeneratePoint(format!("eigenvalue {} repeated", fmt_rat(&z[i]))));
                }
            }
        }
        let ginv = g.inverse().ok_or_else(|| Error::DegeneratePoint("conjugating matrix is singular".into()))?;
        let q = g.mul(&RatMatrix::diagonal(&z)).mul(&ginv);
        Ok(RationalMatrixPoint { z, g, q })
    }

    /// Random point with small distinct rational eigenvalues and a random integer conjugator.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> RationalMatrixPoint {
        loop {
            let mut z: Vec<Rat> = Vec::new();
            while z.len() < n {
                let v = rat(rng.gen_range(-9..=9), rng.gen_range(1..=4));
                if !z.contains(&v) {
                    z.push(v);
                }
            }
            let rows: Vec<Vec<Rat>> = (0..n).map(|_| (0..n).map(|_| int(rng.gen_range(-3..=3))).collect()).collect();
            if let Ok(pt) = RationalMatrixPoint::new(z, RatMatrix::from_rows(&rows).expect("square")) {
                return pt;
            }
        }
    }

    pub fn z(&self) -> &[Rat] {
        &self.z
    }

    pub fn g(&self) -> &RatMatrix {
        &self.g
    }

    pub fn q(&self) -> &RatMatrix {
        &self.q
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }
}

/// Largest power `j` of a trace symbol `T_j = Tr(Q^j)`.
pub const MAX_TRACE_POWER: usize = 6;

/// Registry `T1 .. T6`.
pub fn trace_registry() -> &'static Arc<Registry> {
    static REG: OnceLock<Arc<Registry>> = OnceLock::new();
    REG.get_or_init(|| {
        let names: Vec<String> = (1..=MAX_TRACE_POWER).map(|j| format!("T{j}")).collect();
        Registry::new(&names)
    })
}

/// Polynomial in the power traces `T_j = Tr(Q^j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TracePolynomial {
    poly: MPoly,
}

impl TracePolynomial {
    pub fn new(poly: MPoly) -> Result<TracePolynomial> {
        Ok(TracePolynomial { poly: poly.remap(trace_registry())? })
    }

    pub fn parse(text: &str) -> Result<TracePolynomial> {
        TracePolynomial::new(MPoly::parse(trace_registry(), text)?)
    }

    /// `T_j`.
    pub fn power_trace(j: usize) -> TracePolynomial {
        assert!((1..=MAX_TRACE_POWER).contains(&j));
        TracePolynomial { poly: MPoly::var(trace_registry(), j - 1) }
    }

    /// Random combination of `1, T1, T2, T3, T1², T1·T2, T1³` (eigenvalue degree ≤ 3).
    pub fn random<R: Rng>(rng: &mut R) -> TracePolynomial {
        let reg = trace_registry();
        let t = |j: usize| MPoly::var(reg, j - 1);
        let basis = [MPoly::one(reg), t(1), t(2), t(3), t(1).pow(2), t(1).mul(&t(2)), t(1).pow(3)];
        let mut p = MPoly::zero(reg);
        for b in &basis {
            let c = rat(rng.gen_range(-5..=5), rng.gen_range(1..=3));
            p = p.add(&b.scale(&c));
        }
        TracePolynomial { poly: p }
    }

    pub fn poly(&self) -> &MPoly {
        &self.poly
    }

    fn max_power(&self) -> usize {
        (0..MAX_TRACE_POWER).filter(|&j| self.poly.uses_var(j)).map(|j| j + 1).max().unwrap_or(0)
    }

    /// Traces `T_1 .. T_6` of a matrix.
    fn traces(powers: &[RatMatrix]) -> Vec<Rat> {
        (1..=MAX_TRACE_POWER).map(|j| powers.get(j).map(|m| m.trace()).unwrap_or_else(Rat::zero)).collect()
    }

    /// `Ψ(Q) = f(Tr Q, Tr Q², ...)`.
    pub fn eval_matrix(&self, q: &RatMatrix) -> Rat {
        self.poly.eval(&Self::traces(&q.powers(MAX_TRACE_POWER)))
    }

    /// Symmetric polynomial in `z1 .. zN` (and `t`) obtained from `T_j ↦ Σ z_ρ^j`.
    pub fn to_symmetric(&self, reg: &Arc<Registry>, n: usize) -> MPoly {
        let sums: Vec<MPoly> = (1..=MAX_TRACE_POWER as u32)
            .map(|j| (0..n).fold(MPoly::zero(reg), |acc, r| acc.add(&MPoly::var(reg, r).pow(j))))
            .collect();
        self.poly.eval_with(&sums, |c| MPoly::constant(reg, c.clone()))
    }
}

/// First and second derivatives of `Ψ(Q)` in the matrix entries, at a point.
pub struct MatrixDerivatives {
    n: usize,
    value: Rat,
    d1: Vec<Rat>,
    d2: Vec<Rat>,
}

impl MatrixDerivatives {
    /// Uses `∂Tr(Q^j)/∂q_ab = j (Q^{j−1})_ba` and
    /// `∂(Q^{j−1})_ba/∂q_cd = Σ_{r=0}^{j−2} (Q^r)_bc (Q^{j−2−r})_da`.
    pub fn compute(f: &TracePolynomial, q: &RatMatrix) -> MatrixDerivatives {
        let n = q.size();
        let pw = q.powers(MAX_TRACE_POWER);
        let tr = TracePolynomial::traces(&pw);
        let jmax = f.max_power();
        let fj: Vec<Rat> = (0..jmax).map(|j| f.poly.partial(j).eval(&tr)).collect();
        let fjk: Vec<Vec<Rat>> =
            (0..jmax).map(|j| (0..jmax).map(|k| f.poly.partial(j).partial(k).eval(&tr)).collect()).collect();
        // g[j][(a,b)] = ∂T_{j+1}/∂q_ab = (j+1) (Q^j)_ba
        let g: Vec<Vec<Rat>> = (0..jmax)
            .map(|j| {
                let mut v = Vec::with_capacity(n * n);
                for a in 0..n {
                    for b in 0..n {
                        v.push(pw[j].get(b, a) * int(j as i64 + 1));
                    }
                }
                v
            })
            .collect();
        let nn = n * n;
        let mut d1 = vec![Rat::zero(); nn];
        for j in 0..jmax {
            if fj[j].is_zero() {
                continue;
            }
            for (x, gv) in d1.iter_mut().zip(&g[j]) {
                *x += &fj[j] * gv;
            }
        }
        let mut d2 = vec![Rat::zero(); nn * nn];
        for j in 0..jmax {
            for k in 0..jmax {
                if fjk[j][k].is_zero() {
                    continue;
                }
                for u in 0..nn {
                    let gu = &fjk[j][k] * &g[j][u];
                    if gu.is_zero() {
                        continue;
                    }
                    for v in 0..nn {
                        d2[u * nn + v] += &gu * &g[k][v];
                    }
                }
            }
        }
        for j in 0..jmax {
            let power = j + 1;
            if fj[j].is_zero() || power < 2 {
                continue;
            }
            let scale = &fj[j] * int(power as i64);
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let mut s = Rat::zero();
                            for r in 0..=power - 2 {
                                s += pw[r].get(b, c) * pw[power - 2 - r].get(d, a);
                            }
                            if !s.is_zero() {
                                d2[(a * n + b) * nn + c * n + d] += &scale * s;
                            }
                        }
                    }
                }
            }
        }
        MatrixDerivatives { n, value: f.poly.eval(&tr), d1, d2 }
    }

    pub fn value(&self) -> &Rat {
        &self.value
    }

    /// `∂Ψ/∂q_ab`.
    pub fn first(&self, a: usize, b: usize) -> &Rat {
        &self.d1[a * self.n + b]
    }

    /// `∂²Ψ/∂q_ab ∂q_cd`.
    pub fn second(&self, a: usize, b: usize, c: usize, d: usize) -> &Rat {
        let nn = self.n * self.n;
        &self.d2[(a * self.n + b) * nn + c * self.n + d]
    }
}

/// Sum of products of traces of words, e.g. `Tr(q^k p²)` or `Tr(q)·Tr(p)`.
#[derive(Clone, Debug)]
pub struct MatrixOpSpec {
    pub terms: Vec<(Rat, Vec<String>)>,
}

impl MatrixOpSpec {
    pub fn trace(c: Rat, spelling: &str) -> MatrixOpSpec {
        MatrixOpSpec { terms: vec![(c, vec![spelling.to_string()])] }
    }

    pub fn plus(mut self, c: Rat, factors: &[&str]) -> MatrixOpSpec {
        self.terms.push((c, factors.iter().map(|s| s.to_string()).collect()));
        self
    }

    /// `Tr(q^k p²)`.
    pub fn qk_p2(k: usize) -> MatrixOpSpec {
        MatrixOpSpec::trace(int(1), &format!("{}pp", "q".repeat(k)))
    }

    /// Normal-ordered operator, rejecting p-degree above two.
    pub fn to_ncpoly(&self, n: usize) -> Result<NCPoly> {
        check_size(n)?;
        let mut total = NCPoly::zero(n, Mode::Weyl);
        for (c, factors) in &self.terms {
            let mut prod = NCPoly::one(n, Mode::Weyl);
            for s in factors {
                if s.chars().filter(|&ch| ch == 'p').count() > 2 {
                    return Err(Error::Usage(format!("word `{s}` has more than two momenta")));
                }
                let tr = trace_combination(n, Mode::Weyl, &[(cint(1), s.as_str())])?;
                prod = prod.mul(&tr);
            }
            total = total.add(&prod.scale_rat(c));
        }
        total.normal_order()
    }
}

/// Replaces the coefficient variables by rationals. Variables in `squares` are known only
/// through their square; odd powers are rejected.
pub fn specialize_coefficients(p: &NCPoly, values: &[(&str, Rat)], squares: &[(&str, Rat)]) -> Result<NCPoly> {
    let reg = weyl_registry();
    let mut out = NCPoly::zero(p.n(), p.mode());
    for (w, c) in p.terms() {
        let mut c = c.clone();
        for (name, v) in values {
            let i = reg.index(name).ok_or_else(|| Error::Usage(format!("unknown coefficient `{name}`")))?;
            c = c.subst_value(i, v)?;
        }
        for (name, sq) in squares {
            let i = reg.index(name).ok_or_else(|| Error::Usage(format!("unknown coefficient `{name}`")))?;
            if !c.uses_var(i) {
                continue;
            }
            if c.den_factors().keys().any(|f| f.uses_var(i)) {
                return Err(Error::Domain(format!("`{name}` appears in a denominator")));
            }
            let mut num = MPoly::zero(reg);
            for (e, part) in c.num().coeffs_in(i) {
                if e % 2 == 1 {
                    return Err(Error::Domain(format!("odd power of `{name}` cannot be evaluated from its square")));
                }
                num = num.add(&part.scale(&rat_pow(sq, e / 2)));
            }
            c = RatFun::new(num, c.den())?;
        }
        out.add_term(w.clone(), c);
    }
    Ok(out)
}

/// Applies a normal-ordered operator with rational coefficients to `Ψ(Q) = f(T(Q))` at `Q`,
/// with `p_ab ↦ ħ ∂/∂q_ba`.
pub fn apply_matrix_operator(op: &NCPoly, f: &TracePolynomial, q: &RatMatrix, hbar: &Rat) -> Result<Rat> {
    let n = q.size();
    if op.n() != n {
        return Err(Error::Usage("operator and point sizes differ".into()));
    }
    if op.mode() != Mode::Weyl || !op.is_normal() {
        return Err(Error::Usage("operator must be a normal-ordered Weyl polynomial".into()));
    }
    let der = MatrixDerivatives::compute(f, q);
    let mut total = Rat::zero();
    for (w, c) in op.terms() {
        let c = c.constant_value().ok_or_else(|| Error::Usage(format!("coefficient {c} is not specialized")))?;
        let mut mult = c;
        let mut ps: Vec<(usize, usize)> = Vec::new();
        for l in w {
            match *l {
                Letter::Q(i, j) => mult *= q.get(i as usize, j as usize),
                Letter::P(i, j) => ps.push((j as usize, i as usize)),
                _ => return Err(Error::UnsupportedMode("free letters have no matrix action".into())),
            }
        }
        if mult.is_zero() {
            continue;
        }
        let d = match ps.as_slice() {
            [] => der.value().clone(),
            [(a, b)] => hbar * der.first(*a, *b),
            [(a, b), (c, d)] => hbar * hbar * der.second(*a, *b, *c, *d),
            _ => return Err(Error::Usage("operators of order above two are not supported".into())),
        };
        total += mult * d;
    }
    Ok(total)
}
