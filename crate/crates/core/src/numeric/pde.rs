use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::Float;

use crate::diffop::{build_cp_hamiltonian, canonicalize, tx, z_registry, DiffOp, Term};
use crate::error::{Error, Result};
use crate::exact::{fmt_rat, rat_to_f64, MPoly, Rat};
use crate::moments::time_prefactor;
use crate::params::{Family, ParamSet};
use crate::report::{CheckRecord, Status};

use super::cfloat::{fmt_residual, rat_to_float, CFloat};
use super::oracle::eval_poly;
use super::phi::{phi_numeric, zpoly_rel_diff, ZPoly};
use super::rules::QuadOptions;

/// Settings of the numeric Schrödinger check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPdeConfig {
    pub quad: QuadOptions,
    /// Largest central-difference step in `t`.
    pub step: f64,
    /// Rows of the Richardson table.
    pub richardson: usize,
    /// Allowed relative gap between the two `∂_t` routes.
    pub route_tol: f64,
}

impl NumericPdeConfig {
    pub fn new(prec: u32) -> NumericPdeConfig {
        NumericPdeConfig { quad: QuadOptions::multi(prec, 1e-14), step: 1.0 / 16.0, richardson: 4, route_tol: 1e-8 }
    }
}

/// Both sides of `c(t)(λħ∂_t − H_J)Φ` with numeric coefficients.
#[derive(Debug, Clone)]
pub struct NumericPde {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub t: Rat,
    pub phi: ZPoly,
    /// `c(t)ħ∂_tΦ`, differentiated under the integral sign.
    pub time_side: ZPoly,
    /// `c(t)ħ∂_tΦ` from Richardson-extrapolated central differences.
    pub time_side_fd: ZPoly,
    /// `(c(t)H_J)Φ`.
    pub operator_side: ZPoly,
    /// Relative gap between the two time derivatives.
    pub route_gap: f64,
    /// Relative quadrature error estimate of `Φ`.
    pub quad_error: f64,
    /// Departure of `Φ` from permutation symmetry.
    pub asymmetry: f64,
    pub evaluations: usize,
}

impl NumericPde {
    /// `‖λ·time − op‖ / max(‖λ·time‖, ‖op‖)` over the coefficient vector.
    pub fn residual(&self, lambda: u32) -> f64 {
        let prec = self.time_side.values().next().map(|c| c.prec()).unwrap_or(QuadOptions::DEFAULT_PREC);
        let k = Float::with_val(prec, lambda);
        let scaled: ZPoly = self.time_side.iter().map(|(e, c)| (e.clone(), c.scale(&k))).collect();
        zpoly_rel_diff(&scaled, &self.operator_side)
    }
}

/// `c(t)H_J − 2mħ Σ_ρ z_ρ`: the `mħΣz_ρ` coupling with its sign reversed.
pub fn sign_flipped_operator(j: Family, n: usize, m: usize, p: &ParamSet) -> Result<DiffOp> {
    let mh = p.hbar() * Rat::from_integer((2 * m as i64).into());
    let shift = canonicalize(n, &[Term::Zeroth(tx().scale(&mh))]);
    Ok(build_cp_hamiltonian(j, n, m, p)?.sub(&shift))
}

/// Distinct permutations of an exponent vector.
fn orbit(e: &[u32]) -> Vec<Vec<u32>> {
    let mut cur = e.to_vec();
    cur.sort();
    let mut all = vec![cur.clone()];
    while next_permutation(&mut cur) {
        all.push(cur.clone());
    }
    all
}

fn next_permutation(v: &mut [u32]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `op(Φ)` for symmetric `Φ = Σ_λ T_λ m_λ(z)`; returns the result and the symmetry defect of `Φ`.
pub fn apply_operator(op: &DiffOp, phi: &ZPoly, t: &Float) -> Result<(ZPoly, f64)> {
    let n = op.n();
    let reg = z_registry(n);
    let prec = t.prec();
    let mut seen: BTreeMap<Vec<u32>, ()> = BTreeMap::new();
    let mut out = ZPoly::new();
    let mut defect = 0f64;
    let mut size = 0f64;
    for e in phi.keys() {
        let mut key = e.clone();
        key.sort();
        if seen.insert(key.clone(), ()).is_some() {
            continue;
        }
        let members = orbit(&key);
        let mut avg = CFloat::zero(prec);
        let mut poly = MPoly::zero(&reg);
        for mem in &members {
            let c = phi.get(mem).cloned().unwrap_or_else(|| CFloat::zero(prec));
            avg = avg.add(&c);
            let powers: Vec<(usize, u32)> = mem.iter().enumerate().map(|(r, &k)| (r, k)).collect();
            poly = poly.add(&MPoly::monomial(&reg, &powers, Rat::from_integer(1.into())));
        }
        avg = avg.scale(&(Float::with_val(prec, 1) / members.len() as u32));
        for mem in &members {
            let c = phi.get(mem).cloned().unwrap_or_else(|| CFloat::zero(prec));
            defect = defect.max(c.sub(&avg).abs_f64());
            size = size.max(c.abs_f64());
        }
        let image = op.apply_polynomial(&poly)?;
        for (ex, coef) in image.terms() {
            let ze = ex[..n].to_vec();
            let tk = t.clone().pow(ex[n]);
            let v = avg.scale(&(rat_to_float(coef, prec) * tk));
            let slot = out.entry(ze).or_insert_with(|| CFloat::zero(prec));
            *slot = slot.add(&v);
        }
    }
    out.retain(|_, v| !v.re.is_zero() || !v.im.is_zero());
    Ok((out, if size > 0.0 { defect / size } else { defect }))
}

fn admissible_step(j: Family, t: &Rat, step: f64) -> f64 {
    let tf = rat_to_f64(t);
    let room = match j {
        Family::III => -tf,
        Family::VI => tf - 1.0,
        _ => f64::INFINITY,
    };
    let mut h = step;
    while h > room / 16.0 {
        h /= 2.0;
    }
    h
}

/// Richardson-extrapolated `∂_tΦ` from central differences.
fn richardson_dt(j: Family, n: usize, m: usize, p: &ParamSet, t: &Rat, cfg: &NumericPdeConfig) -> Result<(ZPoly, usize)> {
    let prec = cfg.quad.prec;
    let t0 = rat_to_float(t, prec);
    let h0 = admissible_step(j, t, cfg.step);
    let mut table: Vec<Vec<ZPoly>> = Vec::new();
    let mut evals = 0;
    for i in 0..cfg.richardson {
        let h = Float::with_val(prec, h0) >> i as u32;
        let plus = phi_numeric(j, n, m, p, &Float::with_val(prec, &t0 + &h), &cfg.quad, false)?;
        let minus = phi_numeric(j, n, m, p, &Float::with_val(prec, &t0 - &h), &cfg.quad, false)?;
        evals += plus.evaluations + minus.evaluations;
        let inv = Float::with_val(prec, 1) / (h << 1u32);
        let d: ZPoly = plus
            .coeffs
            .iter()
            .map(|(e, c)| (e.clone(), c.sub(&minus.coeffs[e]).scale(&inv)))
            .collect();
        let mut row = vec![d];
        for k in 1..=i {
            let f = Float::with_val(prec, 1) / (4u32.pow(k as u32) - 1);
            let prev = &table[i - 1][k - 1];
            let cur = &row[k - 1];
            let next: ZPoly = cur.iter().map(|(e, c)| (e.clone(), c.add(&c.sub(&prev[e]).scale(&f)))).collect();
            row.push(next);
        }
        table.push(row);
    }
    let last = table.pop().and_then(|mut r| r.pop()).ok_or_else(|| Error::Usage("richardson needs at least one row".into()))?;
    Ok((last, evals))
}

fn prefactor_value(j: Family, n: usize, t: &Float) -> Float {
    let prec = t.prec();
    let mut vals = vec![Float::new(prec); n];
    vals.push(t.clone());
    eval_poly(&time_prefactor(j, n), &vals, prec)
}

/// Numeric `c(t)(ħ∂_t − H_J)Φ` for parameters already carrying `a = mħ` (and the sixth-family `d`).
///
/// `op` defaults to the printed `c(t)H_J`.
pub fn pde_residual_numeric(
    j: Family,
    n: usize,
    m: usize,
    p: &ParamSet,
    t: &Rat,
    cfg: &NumericPdeConfig,
    op: Option<&DiffOp>,
) -> Result<NumericPde> {
    let prec = cfg.quad.prec;
    let tf = rat_to_float(t, prec);
    let phi = phi_numeric(j, n, m, p, &tf, &cfg.quad, true)?;
    let (fd, fd_evals) = richardson_dt(j, n, m, p, t, cfg)?;
    let exact_dt = phi.dt.clone().ok_or_else(|| Error::Internal("missing time derivative".into()))?;
    let route_gap = zpoly_rel_diff(&exact_dt, &fd);
    if route_gap > cfg.route_tol {
        return Err(Error::QuadratureHealth(format!(
            "time derivative under the integral and by Richardson differences differ by {route_gap:.2e}"
        )));
    }
    let built;
    let op = match op {
        Some(o) => o,
        None => {
            built = build_cp_hamiltonian(j, n, m, p)?;
            &built
        }
    };
    let (operator_side, asymmetry) = apply_operator(op, &phi.coeffs, &tf)?;
    let k = prefactor_value(j, n, &tf) * rat_to_float(&p.hbar(), prec);
    let scale = |z: &ZPoly| -> ZPoly { z.iter().map(|(e, c)| (e.clone(), c.scale(&k))).collect() };
    Ok(NumericPde {
        family: j,
        n,
        m,
        t: t.clone(),
        phi: phi.coeffs.clone(),
        time_side: scale(&exact_dt),
        time_side_fd: scale(&fd),
        operator_side,
        route_gap,
        quad_error: phi.rel_error,
        asymmetry,
        evaluations: phi.evaluations + fd_evals,
    })
}

/// Numeric Schrödinger check: printed form, the `N·ħ∂_t` form, and the sign-flipped negative control.
pub fn verify_pde_numeric(j: Family, n: usize, m: usize, p: &ParamSet, t: &Rat, cfg: &NumericPdeConfig, tol: f64) -> Result<Vec<CheckRecord>> {
    let sides = pde_residual_numeric(j, n, m, p, t, cfg, None)?;
    let r1 = sides.residual(1);
    let rn = sides.residual(n as u32);
    let hb = fmt_rat(&p.hbar());
    let common = format!(
        "{}, prec={}, d/dt routes agree to {}, quadrature {}",
        p.clone().with_rat("t", t.clone())?.render(),
        cfg.quad.prec,
        fmt_residual(sides.route_gap),
        fmt_residual(sides.quad_error)
    );
    let mut printed = CheckRecord::new(
        format!("c(t)(hbar d/dt - H_{j}) Phi = 0 numerically, N={n}, m={m}, hbar={hb}"),
        "pde/numeric",
        r1 < tol,
        fmt_residual(r1),
    );
    let mut detail = common.clone();
    if r1 >= tol && rn < tol && n > 1 {
        detail.push_str(&format!("; N hbar d/dt form leaves {}", fmt_residual(rn)));
    }
    printed = printed.with_detail(detail);
    let scaled = CheckRecord::new(
        format!("c(t)(N hbar d/dt - H_{j}) Phi = 0 numerically, N={n}, m={m}, hbar={hb}"),
        "pde/numeric",
        rn < tol,
        fmt_residual(rn),
    )
    .with_detail(common);
    let flipped = sign_flipped_operator(j, n, m, p)?;
    let prec = cfg.quad.prec;
    let (neg_side, _) = apply_operator(&flipped, &sides.phi, &rat_to_float(t, prec))?;
    let neg = NumericPde { operator_side: neg_side, ..sides.clone() };
    let (n1, nn) = (neg.residual(1), neg.residual(n as u32));
    let control = CheckRecord::new(
        format!("reversed m hbar sum z coupling leaves an O(1) residual, N={n}, m={m}, hbar={hb}"),
        "pde/numeric",
        n1 > 1e-3 && nn > 1e-3,
        fmt_residual(n1.min(nn)),
    );
    if sides.asymmetry > 100.0 * cfg.quad.tol {
        printed = printed.with_status(Status::Fail);
    }
    Ok(vec![printed, scaled, control])
}
