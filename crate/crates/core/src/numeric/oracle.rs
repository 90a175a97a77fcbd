use std::collections::BTreeMap;

use rand::Rng;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::exact::{rat, MPoly, Rat, RatFun};
use crate::moments::{ibp_relation, rho_relation, rho_shift_relation, MasterFunction, MomentExpr, MomentSymbol};
use crate::params::{Family, ParamSet};
use crate::report::CheckRecord;

use super::cfloat::{fmt_residual, rat_to_float, CFloat};
use super::rules::{nodes, pairwise_sum, refine, Converged, QuadOptions};
use super::phi::{andreief_phi, phi_numeric, zpoly_rel_diff};
use super::weight::{RealPoint, Weight};

fn complex_norm(a: &CFloat, b: &CFloat) -> (f64, f64) {
    (a.sub(b).abs_f64(), a.abs_f64())
}

/// `∫ u^k (t−u)^{−s} Θ_J(u) du` on the canonical contour, for several `k` at once.
pub fn moments_numeric(j: Family, ks: &[i64], s: u32, t: &Float, p: &ParamSet, opts: &QuadOptions) -> Result<Converged<CFloat>> {
    if s > 1 {
        return Err(Error::Usage("s must be 0 or 1".into()));
    }
    if s == 1 && j != Family::VI {
        return Err(Error::Usage("s = 1 is only defined for family VI".into()));
    }
    if ks.is_empty() {
        return Err(Error::Usage("no moment index requested".into()));
    }
    let t = Float::with_val(opts.prec, t);
    let w = Weight::new(j, p, &t)?;
    let kmin = *ks.iter().min().expect("nonempty");
    if kmin < 0 && !matches!(j, Family::III) {
        return Err(Error::Domain(format!("negative moment index {kmin} diverges for family {j}")));
    }
    let extra = if j == Family::III { 0.0 } else { kmin as f64 };
    let win = w.window(extra, opts.depth())?;
    let prec = opts.prec;
    let zero = vec![CFloat::zero(prec); ks.len()];
    let add = |a: &CFloat, b: &CFloat| a.add(b);
    let at_level = |level: u32| -> Result<(Vec<CFloat>, usize)> {
        match w.rule() {
            Some(rule) => {
                let ns = nodes(rule, win, level, prec);
                let count = ns.len();
                let parts: Vec<Vec<CFloat>> = ns
                    .iter()
                    .map(|nd| {
                        let pt = RealPoint { u: nd.x.clone(), cu: nd.cx.clone(), ln_u: nd.ln_x.clone() };
                        let mut base = (w.ln_theta(&pt)).exp() * &nd.w;
                        if s == 1 {
                            base /= w.t_minus(&pt);
                        }
                        ks.iter().map(|&k| CFloat::real(Float::with_val(prec, (&pt.u).pow(k as i32)) * &base)).collect()
                    })
                    .collect();
                Ok((pairwise_sum(parts, zero.clone(), add), count))
            }
            None => {
                let ns = nodes(super::rules::Rule::ExpSinh, win, level, prec);
                let mut parts = Vec::new();
                for (dir, orient) in w.rays() {
                    for nd in &ns {
                        let u = dir.scale(&nd.x);
                        let mut base = w.theta_complex(&u).mul(&dir).scale(&nd.w);
                        if orient < 0 {
                            base = base.neg();
                        }
                        parts.push(ks.iter().map(|&k| u.pow(k as u32).mul(&base)).collect());
                    }
                }
                Ok((pairwise_sum(parts, zero.clone(), add), 2 * ns.len()))
            }
        }
    };
    refine(opts, at_level, complex_norm)
}

/// Single moment with its error estimate.
pub fn moment_numeric(j: Family, k: i64, s: u32, t: &Float, p: &ParamSet, opts: &QuadOptions) -> Result<(CFloat, f64)> {
    let r = moments_numeric(j, &[k], s, t, p, opts)?;
    Ok((r.values[0].clone(), r.rel_error))
}

/// `p(vals)` in floating point.
pub fn eval_poly(p: &MPoly, vals: &[Float], prec: u32) -> Float {
    let mut acc = Float::new(prec);
    for (e, c) in p.terms() {
        let mut m = rat_to_float(c, prec);
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                m *= Float::with_val(prec, (&vals[i]).pow(k));
            }
        }
        acc += m;
    }
    acc
}

pub fn eval_ratfun(f: &RatFun, vals: &[Float], prec: u32) -> Float {
    eval_poly(f.num(), vals, prec) / eval_poly(&f.den(), vals, prec)
}

/// `(Σ terms, max |term|)` of a moment expression at numeric moment values.
pub fn eval_moment_expr(e: &MomentExpr, vals: &[Float], moments: &BTreeMap<MomentSymbol, CFloat>) -> Result<(CFloat, f64)> {
    let prec = vals.first().map(|v| v.prec()).unwrap_or(QuadOptions::DEFAULT_PREC);
    let mut sum = CFloat::zero(prec);
    let mut biggest = 0f64;
    for (mono, c) in e.terms() {
        let mut term = CFloat::real(eval_ratfun(c, vals, prec));
        for s in mono {
            let v = moments.get(s).ok_or_else(|| Error::Internal(format!("moment {s} was not computed")))?;
            term = term.mul(v);
        }
        biggest = biggest.max(term.abs_f64());
        sum = sum.add(&term);
    }
    Ok((sum, biggest))
}

/// `(|Σ terms|, max |term|)` of a moment relation at numeric moment values.
pub fn relation_residual(e: &MomentExpr, vals: &[Float], moments: &BTreeMap<MomentSymbol, CFloat>) -> Result<(f64, f64)> {
    let (s, b) = eval_moment_expr(e, vals, moments)?;
    Ok((s.abs_f64(), b))
}

/// Largest relative residual of the integration-by-parts relations `n = 0..=kmax` on the quadrature.
pub fn moment_relation_residual(j: Family, p: &ParamSet, t: &Rat, kmax: i64, prec: u32) -> Result<f64> {
    let master = MasterFunction::new(j, p)?;
    let reg = crate::diffop::z_registry(0);
    let mut rels = Vec::new();
    for n in 0..=kmax {
        rels.push(ibp_relation(&master, n, &reg)?);
        if j == Family::VI {
            rels.push(rho_relation(&master, n, &reg)?);
            if n >= 1 {
                rels.push(rho_shift_relation(n, &reg)?);
            }
        }
    }
    let mut nu: Vec<i64> = Vec::new();
    let mut rho: Vec<i64> = Vec::new();
    for r in &rels {
        for s in r.symbols() {
            match s {
                MomentSymbol::Nu(k) => nu.push(k),
                MomentSymbol::Rho(k) => rho.push(k),
            }
        }
    }
    nu.sort();
    nu.dedup();
    rho.sort();
    rho.dedup();
    let opts = QuadOptions::oracle(prec);
    let tf = rat_to_float(t, prec);
    let mut moments = BTreeMap::new();
    let vals = moments_numeric(j, &nu, 0, &tf, p, &opts)?;
    for (k, v) in nu.iter().zip(vals.values) {
        moments.insert(MomentSymbol::Nu(*k), v);
    }
    if !rho.is_empty() {
        let vals = moments_numeric(j, &rho, 1, &tf, p, &opts)?;
        for (k, v) in rho.iter().zip(vals.values) {
            moments.insert(MomentSymbol::Rho(*k), v);
        }
    }
    let mut worst = 0f64;
    for r in &rels {
        let (res, size) = relation_residual(r, std::slice::from_ref(&tf), &moments)?;
        if size == 0.0 {
            return Err(Error::Precision("relation evaluated to all-zero terms".into()));
        }
        worst = worst.max(res / size);
    }
    Ok(worst)
}

/// Random admissible oracle point `(params, t)` with small-denominator rationals.
pub fn random_oracle_point<R: Rng>(j: Family, rng: &mut R) -> Result<(ParamSet, Rat)> {
    let mut pick = |lo: i64, hi: i64, den: i64| rat(rng.gen_range(lo..=hi), den);
    let mut p = ParamSet::new(j);
    let t = match j {
        Family::II => pick(-24, 24, 12),
        Family::III => {
            p.set_rat("b", pick(-24, 24, 12))?;
            pick(-36, -3, 12)
        }
        Family::IV => {
            p.set_rat("b", pick(-18, -1, 12))?;
            pick(-12, 24, 12)
        }
        Family::V => {
            p.set_rat("b", pick(-11, -1, 12))?;
            p.set_rat("c", pick(-11, -1, 12))?;
            pick(-24, 24, 12)
        }
        Family::VI => {
            let a = pick(-12, 12, 12);
            let ab = pick(-11, -1, 12);
            p.set_rat("a", a.clone())?;
            p.set_rat("b", ab - a)?;
            p.set_rat("c", pick(-11, -1, 12))?;
            p.set_rat("d", pick(-12, 12, 12))?;
            pick(15, 36, 12)
        }
        Family::I => return Err(Error::Usage("family I has no moments".into())),
    };
    Ok((p, t))
}

/// Oracle duty: relations `0..=kmax` hold on the quadrature to `tol`.
pub fn verify_moment_oracle(j: Family, p: &ParamSet, t: &Rat, kmax: i64, prec: u32, tol: f64) -> Result<CheckRecord> {
    let worst = moment_relation_residual(j, p, t, kmax, prec)?;
    Ok(CheckRecord::new(
        format!("integration-by-parts moment relations n = 0..{kmax} for family {j} on the quadrature oracle"),
        "oracle/moments",
        worst < tol,
        fmt_residual(worst),
    )
    .with_detail(format!("{}, prec={prec}, tol={tol:.0e}", p.clone().with_rat("t", t.clone())?.render())))
}

/// Simplex quadrature of `Φ` against the determinant of one-dimensional integrals at `ħ = 1`.
pub fn verify_andreief(j: Family, n: usize, m: usize, p: &ParamSet, t: &Rat, prec: u32, tol: f64) -> Result<CheckRecord> {
    let tf = rat_to_float(t, prec);
    let phi = phi_numeric(j, n, m, p, &tf, &QuadOptions::multi(prec, tol * 1e-4), false)?;
    let det = andreief_phi(j, n, m, p, &tf, &QuadOptions::oracle(prec))?;
    let gap = zpoly_rel_diff(&phi.coeffs, &det);
    Ok(CheckRecord::new(
        format!("m-fold simplex quadrature of Phi equals m! det[M_ij] for family {j}, N={n}, m={m}, hbar=1"),
        "oracle/andreief",
        gap < tol,
        fmt_residual(gap),
    )
    .with_detail(format!("{}, prec={prec}, {} integrand evaluations", p.clone().with_rat("t", t.clone())?.render(), phi.evaluations)))
}
