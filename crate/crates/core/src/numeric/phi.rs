use std::collections::BTreeMap;

use rug::Float;

use crate::error::{Error, Result};
use crate::exact::{fmt_rat, is_integer, is_positive, rat_to_f64, Rat};
use crate::params::{Family, ParamSet};

use super::cfloat::{rat_to_float, CFloat};
use super::oracle::moments_numeric;
use super::rules::{nodes, pairwise_sum, refine, Node, QuadOptions, Rule, Tail, Window};
use super::weight::{RealPoint, Weight};

/// Polynomial in `z_1..z_N` with numeric coefficients, keyed by exponent vector.
pub type ZPoly = BTreeMap<Vec<u32>, CFloat>;

pub const MAX_NUMERIC_M: usize = 3;

/// `Φ(z; t)` with numerically integrated coefficients.
#[derive(Debug, Clone)]
pub struct NumericPhi {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub hbar: Rat,
    pub t: Float,
    pub coeffs: ZPoly,
    /// `∂_tΦ` differentiated under the integral sign, if requested.
    pub dt: Option<ZPoly>,
    pub rel_error: f64,
    pub evaluations: usize,
}

impl NumericPhi {
    /// `Φ` at a point `z`.
    pub fn eval(&self, z: &[CFloat]) -> CFloat {
        zpoly_eval(&self.coeffs, z)
    }
}

pub fn zpoly_eval(p: &ZPoly, z: &[CFloat]) -> CFloat {
    let prec = z.first().map(|v| v.prec()).unwrap_or(QuadOptions::DEFAULT_PREC);
    let mut acc = CFloat::zero(prec);
    for (e, c) in p {
        let mut term = c.clone();
        for (zi, &k) in z.iter().zip(e) {
            term = term.mul(&zi.pow(k));
        }
        acc = acc.add(&term);
    }
    acc
}

pub fn zpoly_add(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut out = a.clone();
    for (e, c) in b {
        let v = match out.get(e) {
            Some(x) => x.add(c),
            None => c.clone(),
        };
        out.insert(e.clone(), v);
    }
    out
}

pub fn zpoly_mul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut out = ZPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let v = ca.mul(cb);
            let v = match out.get(&e) {
                Some(x) => x.add(&v),
                None => v,
            };
            out.insert(e, v);
        }
    }
    out
}

pub fn zpoly_scale(a: &ZPoly, k: &CFloat) -> ZPoly {
    a.iter().map(|(e, c)| (e.clone(), c.mul(k))).collect()
}

/// `max |a − b| / max(|a|, |b|)` over all coefficients.
pub fn zpoly_rel_diff(a: &ZPoly, b: &ZPoly) -> f64 {
    let mut keys: Vec<&Vec<u32>> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    let (mut diff, mut size) = (0f64, 0f64);
    for k in keys {
        let x = a.get(k);
        let y = b.get(k);
        let ax = x.map(|v| v.abs_f64()).unwrap_or(0.0);
        let ay = y.map(|v| v.abs_f64()).unwrap_or(0.0);
        size = size.max(ax).max(ay);
        diff = diff.max(match (x, y) {
            (Some(x), Some(y)) => x.sub(y).abs_f64(),
            _ => ax.max(ay),
        });
    }
    if size == 0.0 {
        diff
    } else {
        diff / size
    }
}

/// Exponent vectors `(m − k_1, …, m − k_N)` for `k ∈ {0..m}^N`, in a fixed order.
fn combos(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|c| {
                (0..=m).map(move |k| {
                    let mut c = c.clone();
                    c.push(k);
                    c
                })
            })
            .collect();
    }
    out
}

/// `(−1)^k e_k(u)` for `k = 0..=m`.
fn signed_elementary<T: Clone, M: Fn(&T, &T) -> T, A: Fn(&T, &T) -> T, N: Fn(&T) -> T>(
    us: &[T],
    one: T,
    zero: T,
    mul: M,
    add: A,
    neg: N,
) -> Vec<T> {
    // coefficients of Π(x − u_i), highest power first
    let mut c = vec![one];
    for u in us {
        let mut next = vec![zero.clone(); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i] = add(&next[i], ci);
            next[i + 1] = add(&next[i + 1], &neg(&mul(ci, u)));
        }
        c = next;
    }
    c
}

fn check_sizes(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 || m > MAX_NUMERIC_M {
        return Err(Error::Usage(format!("numeric wave functions need N >= 1 and 1 <= m <= 3 (got N={n}, m={m})")));
    }
    Ok(())
}

fn factorial(m: usize) -> u32 {
    (1..=m as u32).product()
}

/// Vector integrand layout: one slot per combo, then (optionally) the `∂_t` slots.
struct Layout {
    combos: Vec<Vec<usize>>,
    with_dt: bool,
}

impl Layout {
    fn len(&self) -> usize {
        self.combos.len() * if self.with_dt { 2 } else { 1 }
    }

    fn fill_real(&self, ck: &[Float], base: &Float, dt: Option<&Float>, out: &mut [Float]) {
        let c = self.combos.len();
        for (i, combo) in self.combos.iter().enumerate() {
            let mut v = base.clone();
            for &k in combo {
                if k > 0 {
                    v *= &ck[k];
                }
            }
            if let (true, Some(d)) = (self.with_dt, dt) {
                out[c + i] += Float::with_val(v.prec(), &v * d);
            }
            out[i] += v;
        }
    }

    fn to_zpoly(&self, m: usize, vals: &[CFloat], offset: usize, factor: u32) -> ZPoly {
        self.combos
            .iter()
            .enumerate()
            .map(|(i, combo)| {
                let e: Vec<u32> = combo.iter().map(|&k| (m - k) as u32).collect();
                (e, vals[offset + i].scale(&Float::with_val(vals[0].prec(), factor)))
            })
            .collect()
    }
}

struct Frame {
    pts: Vec<RealPoint>,
    /// `diffs[j][i] = u_i − u_j` for `i < j`.
    diffs: Vec<Vec<Float>>,
}

struct SimplexCtx<'a> {
    w: &'a Weight,
    inner: &'a [Node],
    m: usize,
    two_h: Float,
    layout: &'a Layout,
}

impl SimplexCtx<'_> {
    fn leaf(&self, frame: &Frame, log_acc: &Float, w_acc: &Float, out: &mut [Float]) {
        let prec = self.w.prec;
        let base = log_acc.clone().exp() * w_acc;
        if base.is_zero() {
            return;
        }
        let us: Vec<Float> = frame.pts.iter().map(|p| p.u.clone()).collect();
        let ck = signed_elementary(
            &us,
            Float::with_val(prec, 1),
            Float::new(prec),
            |a, b| Float::with_val(prec, a * b),
            |a, b| Float::with_val(prec, a + b),
            |a| -a.clone(),
        );
        let dt = self.layout.with_dt.then(|| {
            let mut s = Float::new(prec);
            for p in &frame.pts {
                s += self.w.dt_ln_theta(p);
            }
            s
        });
        self.layout.fill_real(&ck, &base, dt.as_ref(), out);
    }

    /// Adds the remaining ordered points `u_j = u_{j−1}·x`.
    fn visit(&self, frame: &mut Frame, log_acc: Float, w_acc: Float, out: &mut [Float]) {
        if frame.pts.len() == self.m {
            self.leaf(frame, &log_acc, &w_acc, out);
            return;
        }
        let prec = self.w.prec;
        let prev = frame.pts.last().expect("outer point").clone();
        let prev_diffs = frame.diffs.last().cloned().unwrap_or_default();
        for nd in self.inner {
            let u = Float::with_val(prec, &prev.u * &nd.x);
            let gap = Float::with_val(prec, &prev.u * &nd.cx);
            let cu = Float::with_val(prec, &prev.cu + &gap);
            let ln_u = Float::with_val(prec, &prev.ln_u + &nd.ln_x);
            let pt = RealPoint { u, cu, ln_u };
            let mut diffs: Vec<Float> = prev_diffs.iter().map(|d| Float::with_val(prec, d + &gap)).collect();
            diffs.push(gap);
            let mut log = Float::with_val(prec, &log_acc + &prev.ln_u) + self.w.ln_theta(&pt);
            for d in &diffs {
                log += d.clone().ln() * &self.two_h;
            }
            if log.is_nan() {
                continue;
            }
            frame.pts.push(pt);
            frame.diffs.push(diffs);
            self.visit(frame, log, Float::with_val(prec, &w_acc * &nd.w), out);
            frame.pts.pop();
            frame.diffs.pop();
        }
    }
}

fn real_windows(w: &Weight, m: usize, hbar: f64, depth: f64) -> Result<(Rule, Window, Window)> {
    let rule = w.rule().ok_or_else(|| Error::Internal("complex family on the real path".into()))?;
    let outer = w.window(0.0, depth)?;
    let top = match w.family {
        Family::V | Family::VI => w.alpha1().min(2.0 * hbar),
        _ => 2.0 * hbar,
    };
    let inner = if m > 1 {
        Window::for_tails(Rule::TanhSinh, Tail::Power(w.alpha0()), Tail::Power(top), depth)?
    } else {
        Window { lo: 0.0, hi: 0.0 }
    };
    Ok((rule, outer, inner))
}

fn simplex_at_level(w: &Weight, m: usize, hbar: &Rat, layout: &Layout, depth: f64, level: u32) -> Result<(Vec<CFloat>, usize)> {
    let prec = w.prec;
    let (rule, outer_win, inner_win) = real_windows(w, m, rat_to_f64(hbar), depth)?;
    let outer = nodes(rule, outer_win, level, prec);
    let inner = if m > 1 { nodes(Rule::TanhSinh, inner_win, level, prec) } else { Vec::new() };
    let ctx = SimplexCtx { w, inner: &inner, m, two_h: rat_to_float(&(hbar * Rat::from_integer(2.into())), prec), layout };
    let parts: Vec<Vec<Float>> = outer
        .iter()
        .map(|nd| {
            let mut out = vec![Float::new(prec); layout.len()];
            let pt = RealPoint { u: nd.x.clone(), cu: nd.cx.clone(), ln_u: nd.ln_x.clone() };
            let log = w.ln_theta(&pt);
            if !log.is_nan() {
                let mut frame = Frame { pts: vec![pt], diffs: vec![Vec::new()] };
                ctx.visit(&mut frame, log, nd.w.clone(), &mut out);
            }
            out
        })
        .collect();
    let sum = pairwise_sum(parts, vec![Float::new(prec); layout.len()], |a, b| Float::with_val(prec, a + b));
    let count = outer.len() * inner.len().max(1).pow(m as u32 - 1);
    Ok((sum.into_iter().map(CFloat::real).collect(), count))
}

fn product_at_level(w: &Weight, m: usize, hbar: u32, layout: &Layout, depth: f64, level: u32) -> Result<(Vec<CFloat>, usize)> {
    let prec = w.prec;
    let win = w.window(0.0, depth)?;
    let ns = nodes(Rule::ExpSinh, win, level, prec);
    // (u, orientation·ω·w·Θ(u)) for every node on both rays
    let mut pts: Vec<(CFloat, CFloat)> = Vec::new();
    for (dir, orient) in w.rays() {
        for nd in &ns {
            let u = dir.scale(&nd.x);
            let mut f = w.theta_complex(&u).mul(&dir).scale(&nd.w);
            if orient < 0 {
                f = f.neg();
            }
            pts.push((u, f));
        }
    }
    let one = CFloat::real(Float::with_val(prec, 1));
    let zero = CFloat::zero(prec);
    let c = layout.combos.len();
    let mut parts: Vec<Vec<CFloat>> = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        let us: Vec<&CFloat> = idx.iter().map(|&i| &pts[i].0).collect();
        let mut base = one.clone();
        for &i in &idx {
            base = base.mul(&pts[i].1);
        }
        for a in 0..m {
            for b in a + 1..m {
                base = base.mul(&us[a].sub(us[b]).pow(2 * hbar));
            }
        }
        let owned: Vec<CFloat> = us.iter().map(|u| (*u).clone()).collect();
        let ck = signed_elementary(&owned, one.clone(), zero.clone(), |a, b| a.mul(b), |a, b| a.add(b), |a| a.neg());
        let mut out = vec![zero.clone(); layout.len()];
        let dt = owned.iter().fold(zero.clone(), |acc, u| acc.sub(u));
        for (i, combo) in layout.combos.iter().enumerate() {
            let mut v = base.clone();
            for &k in combo {
                if k > 0 {
                    v = v.mul(&ck[k]);
                }
            }
            if layout.with_dt {
                out[c + i] = v.mul(&dt);
            }
            out[i] = v;
        }
        parts.push(out);
        // odometer over m indices
        let mut d = 0;
        while d < m {
            idx[d] += 1;
            if idx[d] < pts.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == m {
            break;
        }
    }
    let count = parts.len();
    Ok((pairwise_sum(parts, vec![zero; layout.len()], |a, b| a.add(b)), count))
}

/// `Φ(z; t) = ∫ Δ(u)^{2ħ} Π_{ρ,i}(z_ρ − u_i) Π_i Θ(u_i) du`.
///
/// Real contours integrate `m!` times the ordered simplex `u_1 > … > u_m`; the second family
/// integrates the full product of polylines and needs an integer `ħ`.
pub fn phi_numeric(j: Family, n: usize, m: usize, p: &ParamSet, t: &Float, opts: &QuadOptions, with_dt: bool) -> Result<NumericPhi> {
    check_sizes(n, m)?;
    let hbar = p.hbar();
    if !is_positive(&hbar) {
        return Err(Error::Domain(format!("hbar={} must be positive on real contours", fmt_rat(&hbar))));
    }
    let t = Float::with_val(opts.prec, t);
    let w = Weight::new(j, p, &t)?;
    let layout = Layout { combos: combos(n, m), with_dt };
    let depth = opts.depth();
    let (conv, factor) = if j == Family::II {
        if !is_integer(&hbar) {
            return Err(Error::UnsupportedMode("complex contours need an integer hbar".into()));
        }
        let h = hbar.to_integer().try_into().map_err(|_| Error::Usage("hbar too large".into()))?;
        let conv = refine(opts, |level| product_at_level(&w, m, h, &layout, depth, level), cnorm)?;
        (conv, 1)
    } else {
        let conv = refine(opts, |level| simplex_at_level(&w, m, &hbar, &layout, depth, level), cnorm)?;
        (conv, factorial(m))
    };
    let coeffs = layout.to_zpoly(m, &conv.values, 0, factor);
    let dt = with_dt.then(|| layout.to_zpoly(m, &conv.values, layout.combos.len(), factor));
    Ok(NumericPhi {
        family: j,
        n,
        m,
        hbar,
        t,
        coeffs,
        dt,
        rel_error: conv.rel_error,
        evaluations: conv.evaluations,
    })
}

fn cnorm(a: &CFloat, b: &CFloat) -> (f64, f64) {
    (a.sub(b).abs_f64(), a.abs_f64())
}

/// `Φ` at `ħ = 1` from `m!·det[∫ u^{i+j} Π_ρ(z_ρ − u) Θ(u) du]_{i,j<m}`.
pub fn andreief_phi(j: Family, n: usize, m: usize, p: &ParamSet, t: &Float, opts: &QuadOptions) -> Result<ZPoly> {
    check_sizes(n, m)?;
    if p.hbar() != Rat::from_integer(1.into()) {
        return Err(Error::Usage("the determinant form needs hbar = 1".into()));
    }
    let top = (2 * (m - 1) + n) as i64;
    let ks: Vec<i64> = (0..=top).collect();
    let nu = moments_numeric(j, &ks, 0, t, p, opts)?.values;
    let prec = opts.prec;
    // Π_ρ (z_ρ − u) = Σ_S z^S (−u)^{N−|S|}
    let entry = |shift: usize| -> ZPoly {
        let mut out = ZPoly::new();
        for mask in 0..(1u32 << n) {
            let e: Vec<u32> = (0..n).map(|r| (mask >> r) & 1).collect();
            let deg = n - mask.count_ones() as usize;
            let mut v = nu[shift + deg].clone();
            if deg % 2 == 1 {
                v = v.neg();
            }
            out.insert(e, v);
        }
        out
    };
    let mat: Vec<Vec<ZPoly>> = (0..m).map(|i| (0..m).map(|k| entry(i + k)).collect()).collect();
    let mut det = ZPoly::new();
    for (perm, sign) in permutations_with_sign(m) {
        let mut term: ZPoly = [(vec![0; n], CFloat::real(Float::with_val(prec, sign)))].into_iter().collect();
        for (i, &c) in perm.iter().enumerate() {
            term = zpoly_mul(&term, &mat[i][c]);
        }
        det = zpoly_add(&det, &term);
    }
    Ok(zpoly_scale(&det, &CFloat::real(Float::with_val(prec, factorial(m)))))
}

fn permutations_with_sign(m: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i32)>) {
        if cur.len() == used.len() {
            let mut inv = 0;
            for a in 0..cur.len() {
                for b in a + 1..cur.len() {
                    if cur[a] > cur[b] {
                        inv += 1;
                    }
                }
            }
            out.push((cur.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}
