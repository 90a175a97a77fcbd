use std::collections::BTreeMap;
use std::sync::Arc;

use crate::diffop::z_registry;
use crate::error::{Error, Result};
use crate::exact::{MPoly, RatFun, Registry};
use crate::params::Family;

use super::expr::{MomentExpr, MomentMonomial, MomentSymbol};
use super::system::MomentSystem;

pub const MAX_PHI_N: usize = 3;
pub const MAX_PHI_M: usize = 3;

/// `Φ(z; t)` as a symmetric polynomial in `z` with moment coefficients.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub hbar: u32,
    pub expr: MomentExpr,
}

/// `Δ(u)^{2ħ} Π_{ρ,i}(z_ρ − u_i)` over `[u_1..u_m, z_1..z_N]`.
pub fn ansatz_integrand(n: usize, m: usize, hbar: u32) -> MPoly {
    let mut names: Vec<String> = (1..=m).map(|i| format!("u{i}")).collect();
    names.extend((1..=n).map(|r| format!("z{r}")));
    let reg = Registry::new(&names);
    let u = |i: usize| MPoly::var(&reg, i);
    let z = |r: usize| MPoly::var(&reg, m + r);
    let mut vdm = MPoly::one(&reg);
    for i in 0..m {
        for j in i + 1..m {
            vdm = vdm.mul(&u(i).sub(&u(j)));
        }
    }
    let mut out = vdm.pow(2 * hbar);
    for r in 0..n {
        for i in 0..m {
            out = out.mul(&z(r).sub(&u(i)));
        }
    }
    out
}

/// Highest `ν` index occurring in `Φ`.
pub fn phi_max_index(n: usize, m: usize, hbar: u32) -> i64 {
    (n + 2 * hbar as usize * m.saturating_sub(1)) as i64
}

/// Unreduced `Φ`: every `Π u_i^{k_i}` replaced by `Π ν_{k_i}`; coefficients over `z_1..z_N, t`.
pub fn expand_phi(n: usize, m: usize, hbar: u32) -> MomentExpr {
    let reg = z_registry(n);
    let integrand = ansatz_integrand(n, m, hbar);
    let mut grouped: BTreeMap<MomentMonomial, MPoly> = BTreeMap::new();
    for (e, c) in integrand.terms() {
        let mut mono: MomentMonomial = e[..m].iter().map(|&k| MomentSymbol::Nu(k as i64)).collect();
        mono.sort();
        let powers: Vec<(usize, u32)> = e[m..].iter().enumerate().map(|(r, &k)| (r, k)).collect();
        let zm = MPoly::monomial(&reg, &powers, c.clone());
        let slot = grouped.entry(mono).or_insert_with(|| MPoly::zero(&reg));
        *slot = slot.add(&zm);
    }
    let mut out = MomentExpr::zero(&reg);
    for (mono, p) in grouped {
        out.add_term(mono, RatFun::from_poly(p));
    }
    out
}

/// Builds and reduces `Φ` for a positive integer `ħ`.
pub fn build_phi(sys: &MomentSystem, n: usize, m: usize, hbar: u32) -> Result<WaveFunction> {
    if hbar == 0 {
        return Err(Error::UnsupportedMode("symbolic path needs a positive integer hbar".into()));
    }
    if n == 0 || m == 0 || n > MAX_PHI_N || m > MAX_PHI_M {
        return Err(Error::Usage(format!("symbolic wave functions need 1 <= N, m <= 3 (got N={n}, m={m})")));
    }
    let expr = sys.reduce(&expand_phi(n, m, hbar))?;
    Ok(WaveFunction { family: sys.master().family(), n, m, hbar, expr })
}

impl WaveFunction {
    pub fn registry(&self) -> &Arc<Registry> {
        self.expr.registry()
    }

    /// Moment coefficient of each `z`-monomial.
    pub fn z_coefficients(&self) -> BTreeMap<Vec<u32>, MomentExpr> {
        split_z(&self.expr, self.n)
    }

    pub fn is_symmetric(&self) -> bool {
        let coeffs = self.z_coefficients();
        coeffs.iter().all(|(e, c)| {
            let mut ok = true;
            permutations(e, &mut |p| {
                if let Some(other) = coeffs.get(p) {
                    ok &= other == c;
                } else {
                    ok = false;
                }
            });
            ok
        })
    }

    /// Largest exponent of each `z_ρ`.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0; self.n];
        for e in self.z_coefficients().keys() {
            for (r, &k) in e.iter().enumerate() {
                d[r] = d[r].max(k);
            }
        }
        d
    }
}

fn permutations(e: &[u32], f: &mut dyn FnMut(&Vec<u32>)) {
    fn rec(cur: &mut Vec<u32>, rest: &mut Vec<u32>, f: &mut dyn FnMut(&Vec<u32>)) {
        if rest.is_empty() {
            f(cur);
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            rec(cur, rest, f);
            cur.pop();
            rest.insert(i, x);
        }
    }
    rec(&mut Vec::new(), &mut e.to_vec(), f);
}

/// Splits a moment expression with `z`-dependent coefficients by `z`-monomial.
pub fn split_z(expr: &MomentExpr, n: usize) -> BTreeMap<Vec<u32>, MomentExpr> {
    let reg = expr.registry().clone();
    let mut out: BTreeMap<Vec<u32>, MomentExpr> = BTreeMap::new();
    for (mono, c) in expr.terms() {
        let den = RatFun::one(&reg).div(&RatFun::from_poly(c.den())).expect("nonzero denominator");
        for (e, v) in c.num().terms() {
            let ze = e[..n].to_vec();
            let rest: Vec<(usize, u32)> = e.iter().enumerate().skip(n).map(|(i, &k)| (i, k)).collect();
            let part = den.mul_poly(&MPoly::monomial(&reg, &rest, v.clone()));
            out.entry(ze).or_insert_with(|| MomentExpr::zero(&reg)).add_term(mono.clone(), part);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}
