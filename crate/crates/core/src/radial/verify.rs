use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::diffop::{z_registry, DiffOp};
use crate::error::{Error, Result};
use crate::exact::{fmt_rat, int, rat, Rat};
use crate::params::{Family, ParamSet};
use crate::report::CheckRecord;
use crate::weyl::{quantum_hamiltonian, NCPoly};

use super::hamiltonians::{
    build_radial_hamiltonian, build_radial_hamiltonian_with, pii_gauge_exponent, radial_trace_qk_p2, RadialCorrections,
    RadialForm,
};
use super::matrix::{apply_matrix_operator, specialize_coefficients, MatrixOpSpec, RationalMatrixPoint, TracePolynomial};

/// Radial operator applied to the symmetric image of `f`, evaluated at the eigenvalues and `t`.
pub fn radial_value(op: &DiffOp, f: &TracePolynomial, z: &[Rat], t: &Rat) -> Result<Rat> {
    let n = op.n();
    let sym = f.to_symmetric(&z_registry(n), n);
    let r = op.apply(&sym)?;
    let mut vals = z.to_vec();
    vals.push(t.clone());
    r.eval(&vals).ok_or_else(|| Error::DegeneratePoint("radial coefficients are singular at the point".into()))
}

/// `c(t)·H̃_J` as a normal-ordered matrix operator with every parameter evaluated.
pub fn matrix_hamiltonian(j: Family, n: usize, p: &ParamSet) -> Result<NCPoly> {
    specialize_hamiltonian(&quantum_hamiltonian(j, n)?.normal_order()?, p)
}

/// Evaluates `ħ`, `t`, the θ's and `k²` in a normal-ordered Hamiltonian.
pub fn specialize_hamiltonian(h: &NCPoly, p: &ParamSet) -> Result<NCPoly> {
    let t = p.rat("t")?;
    let mut values: Vec<(&str, Rat)> = vec![("hbar", p.hbar()), ("t", t)];
    for key in ["theta", "theta0", "theta1", "theta2", "thetat"] {
        if let Some(v) = p.get(key) {
            values.push((key, v));
        }
    }
    let squares: Vec<(&str, Rat)> = p.k2.iter().map(|k2| ("k", k2.clone())).collect();
    specialize_coefficients(h, &values, &squares)
}

/// Random complete parameter set for the radial operators with `κ = 0`.
pub fn random_radial_params<R: Rng>(j: Family, rng: &mut R) -> ParamSet {
    let mut r = |lo: i64, hi: i64| rat(rng.gen_range(lo..=hi), rng.gen_range(1..=5));
    let mut p = ParamSet::new(j);
    let mut h = r(1, 9);
    if h.is_zero() {
        h = int(1);
    }
    p.hbar = Some(h);
    p.kappa = Some(Rat::zero());
    p.t = Some(r(-7, 7));
    p.theta = Some(r(-6, 6));
    p.theta0 = Some(r(-6, 6));
    p.theta1 = Some(r(-6, 6));
    p.theta2 = Some(r(-6, 6));
    p.theta_t = Some(r(-6, 6));
    let k = r(-6, 6);
    p.k2 = Some(&k * &k);
    p
}

struct Trial {
    point: RationalMatrixPoint,
    f: TracePolynomial,
    params: ParamSet,
}

fn trials<F: FnMut(&mut ChaCha8Rng) -> ParamSet>(n: usize, count: usize, seed: u64, mut params: F) -> Vec<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let point = RationalMatrixPoint::random(n, &mut rng);
            let f = TracePolynomial::random(&mut rng);
            let params = params(&mut rng);
            Trial { point, f, params }
        })
        .collect()
}

fn describe(tr: &Trial) -> String {
    format!("z={:?}, f={}, {}", tr.point.z().iter().map(fmt_rat).collect::<Vec<_>>(), tr.f.poly(), tr.params.render())
}

/// Matrix Hamiltonian on `Ψ(Q)` versus the radial operator on the eigenvalues (`κ = 0`).
///
/// For the sixth family a mismatch is diagnosed by solving for the multiplier of the
/// `ħ(1+t)` entry of the first-order coefficient.
pub fn verify_radial_match(j: Family, n: usize, count: usize, seed: u64) -> Result<CheckRecord> {
    let form = RadialForm::Reduced;
    let set = trials(n, count, seed, |rng| random_radial_params(j, rng));
    let symbolic = quantum_hamiltonian(j, n)?.normal_order()?;
    let rows: Vec<Result<(Rat, Rat, Option<(Rat, Rat)>)>> = set
        .par_iter()
        .map(|tr| {
            let t = tr.params.rat("t")?;
            let h = specialize_hamiltonian(&symbolic, &tr.params)?;
            let lhs = apply_matrix_operator(&h, &tr.f, tr.point.q(), &tr.params.hbar())?;
            let rhs = radial_value(&build_radial_hamiltonian(j, n, &tr.params, form)?, &tr.f, tr.point.z(), &t)?;
            let probe = if j == Family::VI {
                let zero = RadialCorrections { vi_first_order: Rat::zero() };
                let r0 = radial_value(&build_radial_hamiltonian_with(j, n, &tr.params, form, &zero)?, &tr.f, tr.point.z(), &t)?;
                Some((r0, rhs.clone()))
            } else {
                None
            };
            Ok((lhs, rhs, probe))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let identity = format!("matrix {j} Hamiltonian equals the radial operator at kappa=0, N={n}, {count} random points");
    let bad = rows.iter().position(|(l, r, _)| l != r);
    let Some(i) = bad else {
        return Ok(CheckRecord::new(identity, "radial/harish-chandra", true, "0").with_detail(format!("seed {seed}")));
    };
    let (l, r, _) = &rows[i];
    let residual = format!("trial {}: matrix {} vs radial {} ({})", i + 1, fmt_rat(l), fmt_rat(r), describe(&set[i]));
    let mut rec = CheckRecord::new(identity, "radial/harish-chandra", false, residual);
    if j == Family::VI {
        // value(μ) = r0 + μ (r1 − r0); solve per trial and require agreement.
        let mus: Vec<Option<Rat>> = rows
            .iter()
            .map(|(l, r1, probe)| {
                let (r0, _) = probe.as_ref().expect("sixth-family probe");
                let slope = r1 - r0;
                if slope.is_zero() {
                    None
                } else {
                    Some((l - r0) / slope)
                }
            })
            .collect();
        let known: Vec<&Rat> = mus.iter().flatten().collect();
        let consistent = known.windows(2).all(|w| w[0] == w[1])
            && rows.iter().zip(&mus).all(|((l, r1, probe), mu)| mu.is_some() || {
                let (r0, _) = probe.as_ref().unwrap();
                l == r0 && r0 == r1
            });
        let note = match (consistent, known.first()) {
            (true, Some(mu)) => format!(
                "exact on every trial once the hbar(1+t) entry of the first-order coefficient carries the multiplier {} (printed 1)",
                fmt_rat(mu)
            ),
            _ => "no single multiplier of the hbar(1+t) entry repairs the mismatch".to_string(),
        };
        rec = rec.with_detail(format!("seed {seed}; {note}"));
    } else {
        rec = rec.with_detail(format!("seed {seed}"));
    }
    Ok(rec)
}

/// `Tr(q^k p²)` on `Ψ(Q)` against its displayed radial form with `κ = 0`.
pub fn verify_trace_qk_p2(n: usize, k: usize, count: usize, seed: u64) -> Result<CheckRecord> {
    let op = MatrixOpSpec::qk_p2(k).to_ncpoly(n)?;
    let set = trials(n, count, seed, |rng| {
        let mut p = ParamSet::default();
        p.hbar = Some(rat(rng.gen_range(1..=7), rng.gen_range(1..=4)));
        p
    });
    let rows: Vec<Result<(Rat, Rat)>> = set
        .par_iter()
        .map(|tr| {
            let h = tr.params.hbar();
            let hop = specialize_coefficients(&op, &[("hbar", h.clone())], &[])?;
            let lhs = apply_matrix_operator(&hop, &tr.f, tr.point.q(), &h)?;
            let rhs = radial_value(&radial_trace_qk_p2(n, k as u32, &h), &tr.f, tr.point.z(), &Rat::zero())?;
            Ok((lhs, rhs))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let identity = format!("Tr(q^{k} p^2) on trace functions equals its radial form at kappa=0, N={n}");
    Ok(match rows.iter().position(|(l, r)| l != r) {
        None => CheckRecord::new(identity, "radial/trace-qk-p2", true, "0"),
        Some(i) => CheckRecord::new(
            identity,
            "radial/trace-qk-p2",
            false,
            format!("trial {}: matrix {} vs radial {} ({})", i + 1, fmt_rat(&rows[i].0), fmt_rat(&rows[i].1), describe(&set[i])),
        ),
    }
    .with_detail(format!("seed {seed}")))
}

/// Exponential gauge of the reduced second-family operator recovers the gauged operator.
pub fn verify_pii_gauge(n: usize, p: &ParamSet) -> Result<CheckRecord> {
    let pre = build_radial_hamiltonian(Family::II, n, p, RadialForm::Reduced)?;
    let post = build_radial_hamiltonian(Family::II, n, p, RadialForm::Gauged)?;
    let got = pre.gauge_scalar_conjugate(&pii_gauge_exponent(n), &p.hbar())?;
    let diffs = post.slot_differences(&got);
    let residual = diffs.first().map(|(s, d)| format!("{s}: {d}")).unwrap_or_else(|| "0".into());
    Ok(CheckRecord::new(
        format!("exp(S/hbar) H~_II exp(-S/hbar) + dS/dt equals the gauged operator at N={n}"),
        "radial/pii-gauge",
        diffs.is_empty(),
        residual,
    )
    .with_detail(p.render()))
}

/// All radial checks of one size.
pub fn radial_suite(n: usize, count: usize, seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (i, j) in Family::ALL.iter().enumerate() {
        out.push(verify_radial_match(*j, n, count, seed.wrapping_add(i as u64))?);
    }
    for k in 0..=3 {
        out.push(verify_trace_qk_p2(n, k, count, seed.wrapping_add(100 + k as u64))?);
    }
    Ok(out)
}
