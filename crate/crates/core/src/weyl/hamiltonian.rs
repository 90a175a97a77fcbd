use crate::error::{Error, Result};
use crate::exact::{rat, Rat, RatFun};
use crate::params::Family;
use crate::report::CheckRecord;

use super::ncpoly::{
    check_size, classical_bracket, commutator_matrix, cconst, cint, cvar, fmt_word, matrix_combination,
    trace_combination, trace_word, Mode, NCMatrix, NCPoly,
};

/// `θ0 + θ1 + θt`, the combined sixth-family parameter.
pub fn theta_sum() -> RatFun {
    cvar("theta0").add(&cvar("theta1")).add(&cvar("thetat"))
}

fn t() -> RatFun {
    cvar("t")
}

/// Left factor `c(t)` multiplying the printed Hamiltonian: `t` for III and V, `t(t−1)` for VI.
pub fn hamiltonian_prefactor(family: Family) -> RatFun {
    match family {
        Family::III | Family::V => t(),
        Family::VI => t().mul(&t().sub(&cint(1))),
        _ => cint(1),
    }
}

fn quarter_k2_minus_theta2() -> RatFun {
    let th = theta_sum();
    cvar("k").pow(2).sub(&th.mul(&th)).scale(&rat(1, 4))
}

/// `c(t)·H̃_J` with the symmetrized orderings used for quantization.
pub fn quantum_hamiltonian(family: Family, n: usize) -> Result<NCPoly> {
    check_size(n)?;
    let half = cconst(rat(1, 2));
    let mh = half.neg();
    let (th0, th1, th2, tht) = (cvar("theta0"), cvar("theta1"), cvar("theta2"), cvar("thetat"));
    let parts: Vec<(RatFun, &str)> = match family {
        Family::I => vec![(half.clone(), "pp"), (mh.clone(), "qqq"), (t().scale(&rat(-1, 4)), "q")],
        Family::II => return hamiltonian_ii(n, Mode::Weyl),
        Family::III => vec![
            (half.clone(), "ppqq"),
            (half.clone(), "qqpp"),
            (mh.clone(), "qqp"),
            (mh.clone(), "pqq"),
            (th0.sub(&th1).neg(), "qp"),
            (t(), "p"),
            (th1.neg(), "q"),
        ],
        Family::IV => vec![
            (cint(1), "pqp"),
            (mh.clone(), "pqq"),
            (mh.clone(), "qqp"),
            (t().neg(), "pq"),
            (th0.clone(), "p"),
            (th0.add(&th1).neg(), "q"),
        ],
        Family::V => vec![
            (half.clone(), "ppqq"),
            (half.clone(), "qqpp"),
            (mh.clone(), "ppq"),
            (mh.clone(), "qpp"),
            (t().mul(&half), "pqq"),
            (t().mul(&half), "qqp"),
            (th0.sub(&th2).sub(&t()), "pq"),
            (th2.clone(), "p"),
            (th0.add(&th1).mul(&t()), "q"),
        ],
        Family::VI => vec![
            (cint(1), "qpqpq"),
            (t().neg(), "pqqp"),
            (t(), "pqp"),
            (mh.clone(), "pqpq"),
            (mh.clone(), "qpqp"),
            (theta_sum().neg(), "qpq"),
            (t().mul(&th0.add(&th1)), "pq"),
            (th0.add(&tht), "pq"),
            (th0.mul(&t()).neg(), "p"),
            (quarter_k2_minus_theta2().neg(), "q"),
        ],
    };
    trace_combination(n, Mode::Weyl, &parts)
}

fn hamiltonian_ii(n: usize, mode: Mode) -> Result<NCPoly> {
    // (q² + t/2)²/2 = q⁴/2 + t q²/2 + t²/8
    let parts = vec![
        (cconst(rat(1, 2)), "pp"),
        (cconst(rat(-1, 2)), "qqqq"),
        (t().scale(&rat(-1, 2)), "qq"),
        (t().mul(&t()).scale(&rat(-1, 8)), ""),
        (cvar("theta").neg(), "q"),
    ];
    trace_combination(n, mode, &parts)
}

/// `c(t)·H̃_J` in the unsymmetrized classical form, as a commutative polynomial.
pub fn classical_hamiltonian(family: Family, n: usize) -> Result<NCPoly> {
    check_size(n)?;
    let m = Mode::Classical;
    let (th0, th1, th2, tht) = (cvar("theta0"), cvar("theta1"), cvar("theta2"), cvar("thetat"));
    let parts: Vec<(RatFun, &str)> = match family {
        Family::I => vec![(cconst(rat(1, 2)), "pp"), (cconst(rat(-1, 2)), "qqq"), (t().scale(&rat(-1, 4)), "q")],
        Family::II => return hamiltonian_ii(n, m),
        Family::III => vec![
            (cint(1), "ppqq"),
            (cint(-1), "qqp"),
            (th0.sub(&th1).neg(), "qp"),
            (t(), "p"),
            (th1.neg(), "q"),
        ],
        Family::IV => vec![
            (cint(1), "pqp"),
            (cint(-1), "pqq"),
            (t().neg(), "pq"),
            (th0.clone(), "p"),
            (th0.add(&th1).neg(), "q"),
        ],
        Family::V => vec![
            (cint(1), "ppqq"),
            (cint(-1), "ppq"),
            (t(), "pqq"),
            (t().neg(), "pq"),
            (th0.sub(&th2), "pq"),
            (th2.clone(), "p"),
            (th0.add(&th1).mul(&t()), "q"),
        ],
        Family::VI => vec![
            (cint(1), "qpqpq"),
            (t().neg(), "pqqp"),
            (t(), "pqp"),
            (cint(-1), "pqpq"),
            (theta_sum().neg(), "qpq"),
            (t().mul(&th0.add(&th1)), "pq"),
            (th0.add(&tht), "pq"),
            (th0.mul(&t()).neg(), "p"),
            (quarter_k2_minus_theta2().neg(), "q"),
        ],
    };
    trace_combination(n, m, &parts)
}

/// `t(t−1)·𝒜(q, p)` as a matrix in the given algebra.
pub fn eom_a(n: usize, mode: Mode) -> Result<NCMatrix> {
    let (th0, th1, tht) = (cvar("theta0"), cvar("theta1"), cvar("thetat"));
    let parts = vec![
        (th0.mul(&t()).neg(), ""),
        (th0.add(&tht), "q"),
        (th0.add(&th1).mul(&t()), "q"),
        (theta_sum().neg(), "qq"),
        (cint(-2), "qpq"),
        (t(), "pq"),
        (t(), "qp"),
        (t().neg(), "pqq"),
        (t().neg(), "qqp"),
        (cint(1), "qpqq"),
        (cint(1), "qqpq"),
    ];
    matrix_combination(n, mode, &parts)
}

/// `t(t−1)·ℬ(q, p)` as a matrix in the given algebra.
pub fn eom_b(n: usize, mode: Mode) -> Result<NCMatrix> {
    let (th0, th1, tht) = (cvar("theta0"), cvar("theta1"), cvar("thetat"));
    let parts = vec![
        (quarter_k2_minus_theta2(), ""),
        (th0.add(&tht).neg(), "p"),
        (th0.add(&th1).mul(&t()).neg(), "p"),
        (theta_sum(), "qp"),
        (theta_sum(), "pq"),
        (t().neg(), "pp"),
        (t(), "qpp"),
        (t(), "ppq"),
        (cint(2), "pqp"),
        (cint(-1), "pqqp"),
        (cint(-1), "qpqp"),
        (cint(-1), "pqpq"),
    ];
    matrix_combination(n, mode, &parts)
}

fn hbar() -> RatFun {
    cvar("hbar")
}

fn residual_string(d: &NCPoly) -> String {
    if d.is_zero() {
        "0".into()
    } else {
        d.to_string()
    }
}

/// The five trace-reordering identities.
pub fn trace_identities_check(n: usize) -> Result<Vec<CheckRecord>> {
    check_size(n)?;
    let w = Mode::Weyl;
    let tr = |s: &str| trace_word(n, w, s);
    let nn = cint(n as i64);
    let h = hbar();
    let ident = |c: RatFun| NCPoly::scalar(n, w, c);
    let cases: Vec<(&str, NCPoly, NCPoly)> = vec![
        ("Tr(pq) = Tr(qp) + hbar N^2", tr("pq")?, tr("qp")?.add(&ident(h.mul(&nn).mul(&nn)))),
        ("Tr(pqp) = Tr(qp^2) + hbar N Tr(p)", tr("pqp")?, tr("qpp")?.add(&tr("p")?.scale(&h.mul(&nn)))),
        ("Tr(qpq) = Tr(q^2p) + hbar N Tr(q)", tr("qpq")?, tr("qqp")?.add(&tr("q")?.scale(&h.mul(&nn)))),
        ("Tr(pq^2) = Tr(q^2p) + 2 hbar N Tr(q)", tr("pqq")?, tr("qqp")?.add(&tr("q")?.scale(&h.mul(&nn).scale(&rat(2, 1))))),
        (
            "Tr(p^2q^2) = Tr(q^2p^2) + 2 hbar N Tr(qp) + 2 hbar Tr(q)Tr(p) + hbar^2 N(1+N^2)",
            tr("ppqq")?,
            tr("qqpp")?
                .add(&tr("qp")?.scale(&h.mul(&nn).scale(&rat(2, 1))))
                .add(&tr("q")?.mul(&tr("p")?).scale(&h.scale(&rat(2, 1))))
                .add(&ident(h.mul(&h).mul(&nn).mul(&cint(1 + (n * n) as i64)))),
        ),
    ];
    let mut out = Vec::new();
    for (name, lhs, rhs) in cases {
        let d = lhs.sub(&rhs).normal_order()?;
        out.push(CheckRecord::new(format!("{name} (N={n})"), "weyl/trace-identities", d.is_zero(), residual_string(&d)));
    }
    Ok(out)
}

/// Normal-ordered difference `Tr(pq) − Tr(qp)`, used by the classical-limit property.
pub fn trace_difference(n: usize, lhs: &str, rhs: &str) -> Result<NCPoly> {
    trace_word(n, Mode::Weyl, lhs)?.sub(&trace_word(n, Mode::Weyl, rhs)?).normal_order()
}

fn matrix_residual(a: &NCMatrix, b: &NCMatrix) -> Result<(bool, String)> {
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let (x, y) = (a.get(i, j).normal_order()?, b.get(i, j).normal_order()?);
            if let Some((w, cx, cy)) = x.first_difference(&y) {
                return Ok((false, format!("entry ({},{}) word {}: {} vs {}", i + 1, j + 1, fmt_word(&w), cx, cy)));
            }
        }
    }
    Ok((true, "0".into()))
}

/// The worked commutator example `[p, Tr(pqpq)]`, its symmetrized variant and the classical bracket.
pub fn worked_example_check(n: usize) -> Result<Vec<CheckRecord>> {
    check_size(n)?;
    let w = Mode::Weyl;
    let h = hbar();
    let p = NCMatrix::p(n, w);
    let pqp = NCMatrix::q(n, w);
    let pqp = p.mul(&pqp).mul(&p);
    let tr_pqpq = trace_word(n, w, "pqpq")?;
    let mut out = Vec::new();

    // [p, X]_ij = −[X, p_ij]
    let lhs = commutator_matrix(&tr_pqpq, &p)?.neg();
    let printed = pqp.scale(&h.scale(&rat(2, 1))).add(&p.scale(&h.mul(&h)));
    let (ok, res) = matrix_residual(&lhs, &printed)?;
    out.push(
        CheckRecord::new(format!("[p, Tr(pqpq)] = 2 hbar pqp + hbar^2 p (N={n})"), "weyl/worked-example", ok, res)
            .with_detail("entrywise, after normal ordering"),
    );
    let corrected = pqp.scale(&h.scale(&rat(2, 1))).add(&p.scale(&h.mul(&h).mul(&cint(n as i64))));
    let (ok_c, res_c) = matrix_residual(&lhs, &corrected)?;
    out.push(CheckRecord::new(
        format!("[p, Tr(pqpq)] = 2 hbar pqp + N hbar^2 p (N={n})"),
        "weyl/worked-example",
        ok_c,
        res_c,
    ));

    let sym = trace_word(n, w, "pqpq")?.add(&trace_word(n, w, "qpqp")?).scale(&cconst(rat(1, 2)));
    let lhs_s = commutator_matrix(&sym, &p)?.neg();
    let (ok_s, res_s) = matrix_residual(&lhs_s, &pqp.scale(&h.scale(&rat(2, 1))))?;
    out.push(CheckRecord::new(
        format!("[p, Tr(pqpq + qpqp)/2] = 2 hbar pqp (N={n})"),
        "weyl/worked-example",
        ok_s,
        res_s,
    ));

    let c = Mode::Classical;
    let pc = NCMatrix::p(n, c);
    let tr_c = trace_word(n, c, "pqpq")?;
    let pqp_c = pc.mul(&NCMatrix::q(n, c)).mul(&pc);
    let mut ok_cl = true;
    let mut res_cl = "0".to_string();
    'outer: for i in 0..n {
        for j in 0..n {
            let b = classical_bracket(pc.get(i, j), &tr_c)?;
            let d = b.sub(&pqp_c.get(i, j).scale(&cint(2)));
            if !d.is_zero() {
                ok_cl = false;
                res_cl = format!("entry ({},{}): {}", i + 1, j + 1, d);
                break 'outer;
            }
        }
    }
    out.push(CheckRecord::new(
        format!("{{p, Tr(pqpq)}} = 2 pqp (N={n})"),
        "weyl/worked-example",
        ok_cl,
        res_cl,
    ));

    let half_p2 = trace_word(n, w, "pp")?.scale(&cconst(rat(1, 2)));
    let (ok_k, res_k) = matrix_residual(&commutator_matrix(&half_p2, &NCMatrix::q(n, w))?, &p.scale(&h))?;
    out.push(CheckRecord::new(format!("[Tr(p^2)/2, q] = hbar p (N={n})"), "weyl/worked-example", ok_k, res_k));
    Ok(out)
}

/// Commutator sign convention adopted for the equations of motion.
pub const EOM_CONVENTION: &str = "hbar*dq/dt = [H, q] = H q - q H, with [p_ij, q_kl] = hbar delta_il delta_jk";

/// `[t(t−1)H̃_VI, q] = ħ t(t−1)𝒜` and `[t(t−1)H̃_VI, p] = ħ t(t−1)ℬ`, plus the scalar classical limit.
pub fn verify_eom_pvi(n: usize) -> Result<Vec<CheckRecord>> {
    if n == 0 || n > 3 {
        return Err(Error::Usage(format!("equations of motion are checked for N <= 3, got {n}")));
    }
    let w = Mode::Weyl;
    let h6 = quantum_hamiltonian(Family::VI, n)?;
    let mut out = Vec::new();
    let lhs_q = commutator_matrix(&h6, &NCMatrix::q(n, w))?;
    let (ok, res) = matrix_residual(&lhs_q, &eom_a(n, w)?.scale(&hbar()))?;
    out.push(
        CheckRecord::new(format!("[t(t-1)H_VI, q] = hbar t(t-1) A (N={n})"), "weyl/equations-of-motion", ok, res)
            .with_detail(EOM_CONVENTION),
    );
    let lhs_p = commutator_matrix(&h6, &NCMatrix::p(n, w))?;
    let (ok, res) = matrix_residual(&lhs_p, &eom_b(n, w)?.scale(&hbar()))?;
    out.push(
        CheckRecord::new(format!("[t(t-1)H_VI, p] = hbar t(t-1) B (N={n})"), "weyl/equations-of-motion", ok, res)
            .with_detail(EOM_CONVENTION),
    );

    // Scalar limit: dq/dt = ∂H/∂p, dp/dt = −∂H/∂q.
    let c = Mode::Classical;
    let h1 = classical_hamiltonian(Family::VI, 1)?;
    let (q1, p1) = (NCPoly::q(1, c, 0, 0), NCPoly::p(1, c, 0, 0));
    let qdot = classical_bracket(&h1, &q1)?;
    let pdot = classical_bracket(&h1, &p1)?;
    let da = qdot.sub(eom_a(1, c)?.get(0, 0));
    let db = pdot.sub(eom_b(1, c)?.get(0, 0));
    out.push(CheckRecord::new(
        "N=1 classical limit: {t(t-1)H, q} = t(t-1)A, {t(t-1)H, p} = t(t-1)B",
        "weyl/equations-of-motion",
        da.is_zero() && db.is_zero(),
        if da.is_zero() && db.is_zero() { "0".to_string() } else { format!("{da} ; {db}") },
    ));
    Ok(out)
}

/// Substitutes rational values for the named coefficient parameters.
pub fn specialize(p: &NCPoly, values: &[(&str, Rat)]) -> Result<NCPoly> {
    let mut out = p.clone();
    for (name, v) in values {
        out = out.subst_coeff(name, v)?;
    }
    Ok(out)
}
