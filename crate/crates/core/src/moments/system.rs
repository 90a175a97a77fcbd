use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::{int, MPoly, RatFun, Registry};
use crate::params::Family;

use super::expr::{MomentExpr, MomentSymbol};
use super::master::{u_coefficients, MasterFunction, TimeShift};

fn t_index(reg: &Arc<Registry>) -> Result<usize> {
    reg.index("t").ok_or_else(|| Error::Internal("moment registry lacks `t`".into()))
}

fn ut_to_reg(p: &MPoly, reg: &Arc<Registry>) -> Result<Vec<RatFun>> {
    Ok(u_coefficients(p, reg)?.into_iter().map(RatFun::from_poly).collect())
}

/// `0 = ∫ d/du[u^n c(u) Θ] du` expanded into `ν`-symbols, for a clearing polynomial `c`.
fn divergence_relation(master: &MasterFunction, clearing: &MPoly, n: i64, reg: &Arc<Registry>) -> Result<MomentExpr> {
    let cleared = master.cleared_log_derivative_with(clearing)?;
    let e = clearing.partial(0).add(&cleared);
    let cs = ut_to_reg(clearing, reg)?;
    let es = ut_to_reg(&e, reg)?;
    let mut out = MomentExpr::zero(reg);
    for (i, c) in cs.iter().enumerate() {
        out.add_term(vec![MomentSymbol::Nu(n - 1 + i as i64)], c.scale(&int(n)));
    }
    for (i, c) in es.iter().enumerate() {
        out.add_term(vec![MomentSymbol::Nu(n + i as i64)], c.clone());
    }
    Ok(out)
}

/// Integration-by-parts relation `0 = ∫ d/du[u^n c_J(u) Θ_J(u)] du` in `ν`-symbols.
pub fn ibp_relation(master: &MasterFunction, n: i64, reg: &Arc<Registry>) -> Result<MomentExpr> {
    divergence_relation(master, &master.clearing(), n, reg)
}

/// Sixth family with clearing `u(1−u)`: `0 = ∫ d/du[u^{n+1}(1−u)Θ] du`, which brings in `ρ_{n+1}`.
pub fn rho_relation(master: &MasterFunction, n: i64, reg: &Arc<Registry>) -> Result<MomentExpr> {
    if master.family() != Family::VI {
        return Err(Error::Usage("rho symbols exist only for family VI".into()));
    }
    let ut = master.clearing().registry().clone();
    let u = MPoly::var(&ut, 0);
    let t = MPoly::var(&ut, 1);
    let c2 = u.mul(&MPoly::one(&ut).sub(&u));
    // Θ′/Θ minus its d/(t−u) part, cleared by u(1−u)
    let d = master.param("d");
    let regular = master
        .log_derivative()
        .sub(&RatFun::inv_factor(&t.sub(&u), 1).scale(&d))
        .mul_poly(&c2)
        .as_poly()
        .cloned()
        .ok_or_else(|| Error::Internal("u(1-u) does not clear the regular part".into()))?;
    let e = c2.partial(0).add(&regular);
    let cs = ut_to_reg(&c2, reg)?;
    let es = ut_to_reg(&e, reg)?;
    let mut out = MomentExpr::zero(reg);
    for (i, c) in cs.iter().enumerate() {
        out.add_term(vec![MomentSymbol::Nu(n - 1 + i as i64)], c.scale(&int(n)));
    }
    for (i, c) in es.iter().enumerate() {
        out.add_term(vec![MomentSymbol::Nu(n + i as i64)], c.clone());
    }
    // d·u^{n+1}(1−u)/(t−u) = d(1−t)·u^{n+1}/(t−u) + d·u^{n+1}
    let ti = t_index(reg)?;
    let one_minus_t = MPoly::one(reg).sub(&MPoly::var(reg, ti));
    out.add_term(vec![MomentSymbol::Rho(n + 1)], RatFun::from_poly(one_minus_t.scale(&d)));
    out.add_term(vec![MomentSymbol::Nu(n + 1)], RatFun::constant(reg, d));
    Ok(out)
}

/// `ρ_k − tρ_{k−1} + ν_{k−1} = 0`.
pub fn rho_shift_relation(k: i64, reg: &Arc<Registry>) -> Result<MomentExpr> {
    let ti = t_index(reg)?;
    let mut out = MomentExpr::zero(reg);
    out.add_term(vec![MomentSymbol::Rho(k)], RatFun::one(reg));
    out.add_term(vec![MomentSymbol::Rho(k - 1)], RatFun::from_poly(MPoly::var(reg, ti).neg()));
    out.add_term(vec![MomentSymbol::Nu(k - 1)], RatFun::one(reg));
    Ok(out)
}

fn elimination_key(s: &MomentSymbol) -> (u8, i64) {
    match *s {
        MomentSymbol::Rho(k) => (0, -k),
        MomentSymbol::Nu(k) if k >= 2 => (1, -k),
        MomentSymbol::Nu(k) if k < 0 => (2, k),
        MomentSymbol::Nu(k) => (3, 1 - k),
    }
}

/// Normal form of the moment symbols of one family inside an index window.
///
/// Built by Gauss–Jordan elimination of all divergence relations that fit in the window,
/// eliminating the highest index first and keeping `ν_0, ν_1` as seeds when possible.
#[derive(Debug, Clone)]
pub struct MomentSystem {
    master: MasterFunction,
    reg: Arc<Registry>,
    t_var: usize,
    lo: i64,
    hi: i64,
    rules: BTreeMap<MomentSymbol, MomentExpr>,
    free: Vec<MomentSymbol>,
}

impl MomentSystem {
    pub fn new(master: MasterFunction, reg: &Arc<Registry>, lo: i64, hi: i64) -> Result<MomentSystem> {
        if lo > 0 || hi < 1 {
            return Err(Error::Usage("moment window must contain 0 and 1".into()));
        }
        let t_var = t_index(reg)?;
        let vi = master.family() == Family::VI;
        let in_window = |e: &MomentExpr| {
            e.symbols().iter().all(|s| match *s {
                MomentSymbol::Nu(k) => (lo..=hi).contains(&k),
                MomentSymbol::Rho(k) => vi && (0..=hi).contains(&k),
            })
        };
        let mut relations = Vec::new();
        for n in (lo - 3)..=hi {
            let r = ibp_relation(&master, n, reg)?;
            if !r.is_zero() && in_window(&r) {
                relations.push(r);
            }
        }
        if vi {
            for n in 0..=hi {
                let r = rho_relation(&master, n, reg)?;
                if in_window(&r) {
                    relations.push(r);
                }
            }
            for k in 1..=hi {
                relations.push(rho_shift_relation(k, reg)?);
            }
        }
        let mut columns: Vec<MomentSymbol> = (lo..=hi).map(MomentSymbol::Nu).collect();
        if vi {
            columns.extend((0..=hi).map(MomentSymbol::Rho));
        }
        columns.sort_by_key(elimination_key);
        let (rules, free) = eliminate(reg, relations, &columns)?;
        Ok(MomentSystem { master, reg: reg.clone(), t_var, lo, hi, rules, free })
    }

    pub fn master(&self) -> &MasterFunction {
        &self.master
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.reg
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    /// Symbols left free after elimination (normally `ν_0, ν_1`).
    pub fn free_symbols(&self) -> &[MomentSymbol] {
        &self.free
    }

    /// Rule for one eliminated symbol, or the symbol itself if free.
    pub fn rule(&self, s: MomentSymbol) -> Result<MomentExpr> {
        if let Some(r) = self.rules.get(&s) {
            return Ok(r.clone());
        }
        if self.free.contains(&s) {
            return Ok(MomentExpr::symbol(&self.reg, s));
        }
        Err(Error::Internal(format!("irreducible moment symbol {s} (window {}..{})", self.lo, self.hi)))
    }

    /// Rewrites every symbol into the free ones.
    pub fn reduce(&self, e: &MomentExpr) -> Result<MomentExpr> {
        let mut out = MomentExpr::zero(&self.reg);
        for (m, c) in e.terms() {
            let mut acc = MomentExpr::constant(c.clone());
            for s in m {
                acc = acc.mul(&self.rule(*s)?);
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// `∂_t` of a `ν`-expression, reduced.
    pub fn d_dt(&self, e: &MomentExpr) -> Result<MomentExpr> {
        let shift = self.master.time_shift();
        let mut out = MomentExpr::zero(&self.reg);
        for (m, c) in e.terms() {
            out.add_term(m.clone(), c.partial(self.t_var));
            for i in 0..m.len() {
                let mut rest = m.clone();
                let s = rest.remove(i);
                let MomentSymbol::Nu(k) = s else {
                    return Err(Error::Usage("d/dt of rho symbols is not supported".into()));
                };
                let (sym, coeff) = match &shift {
                    TimeShift::Nu { shift, coeff } => (MomentSymbol::Nu(k + shift), coeff.clone()),
                    TimeShift::Rho { coeff } => (MomentSymbol::Rho(k), coeff.clone()),
                };
                rest.push(sym);
                rest.sort();
                out.add_term(rest, c.scale(&coeff));
            }
        }
        self.reduce(&out)
    }
}

type Row = BTreeMap<MomentSymbol, RatFun>;

fn eliminate(
    reg: &Arc<Registry>,
    relations: Vec<MomentExpr>,
    columns: &[MomentSymbol],
) -> Result<(BTreeMap<MomentSymbol, MomentExpr>, Vec<MomentSymbol>)> {
    let mut rows: Vec<Row> = relations
        .into_iter()
        .map(|r| r.terms().iter().map(|(m, c)| (m[0], c.clone())).collect())
        .collect();
    let mut used = vec![false; rows.len()];
    let mut pivots: Vec<(MomentSymbol, usize)> = Vec::new();
    for &col in columns {
        let cand = (0..rows.len())
            .filter(|&i| !used[i] && rows[i].get(&col).is_some_and(|c| !c.is_zero()))
            .min_by_key(|&i| (rows[i].len(), i));
        let Some(p) = cand else { continue };
        used[p] = true;
        let inv = rows[p][&col].recip()?;
        let prow: Row = rows[p].iter().map(|(s, c)| (*s, c.mul(&inv))).collect();
        rows[p] = prow.clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == p {
                continue;
            }
            let Some(f) = row.get(&col).cloned() else { continue };
            for (s, c) in &prow {
                let v = row.get(s).cloned().unwrap_or_else(|| RatFun::zero(reg)).sub(&c.mul(&f));
                if v.is_zero() {
                    row.remove(s);
                } else {
                    row.insert(*s, v);
                }
            }
        }
        pivots.push((col, p));
    }
    let pivot_cols: Vec<MomentSymbol> = pivots.iter().map(|(c, _)| *c).collect();
    let free: Vec<MomentSymbol> = {
        let mut f: Vec<MomentSymbol> = columns.iter().filter(|c| !pivot_cols.contains(c)).copied().collect();
        f.sort();
        f
    };
    for (i, row) in rows.iter().enumerate() {
        if !used[i] && !row.is_empty() {
            return Err(Error::Internal("inconsistent moment relations".into()));
        }
    }
    let mut rules = BTreeMap::new();
    for (col, p) in pivots {
        let mut e = MomentExpr::zero(reg);
        for (s, c) in &rows[p] {
            if *s != col {
                e.add_term(vec![*s], c.neg());
            }
        }
        rules.insert(col, e);
    }
    Ok((rules, free))
}
