use crate::error::{Error, Result};
use crate::exact::{int, rat, MPoly, Rat};
use crate::params::{Family, ParamSet};

use super::op::{canonicalize, tc, tt, tx, DiffOp, Term};

fn c(r: &Rat) -> MPoly {
    tc(r.clone())
}

fn ci(n: i64) -> MPoly {
    tc(int(n))
}

/// `x(x−1)` and `x(x−1)(x−t)`.
pub fn quadratic_weight() -> MPoly {
    tx().mul(&tx().sub(&ci(1)))
}

pub fn cubic_weight() -> MPoly {
    quadratic_weight().mul(&tx().sub(&tt()))
}

fn family_required(j: Family) -> &'static [&'static str] {
    match j {
        Family::II => &[],
        Family::III | Family::IV => &["b"],
        Family::V => &["b", "c"],
        Family::VI => &["a", "b", "c", "d"],
        Family::I => &[],
    }
}

/// Multi-particle generalized Nagoya Hamiltonian `c(t)·H_J` for `J = II..VI`.
pub fn build_cp_hamiltonian(j: Family, n: usize, m: usize, p: &ParamSet) -> Result<DiffOp> {
    Ok(canonicalize(n, &cp_terms(j, n, m, p)?))
}

/// Term list of `c(t)·H_J`.
pub fn cp_terms(j: Family, n: usize, m: usize, p: &ParamSet) -> Result<Vec<Term>> {
    if j == Family::I {
        return Err(Error::Usage("no integral-representation Hamiltonian exists for family I".into()));
    }
    p.require(family_required(j))?;
    let h = p.hbar();
    let hc = c(&h);
    let h2 = c(&(&h * &h));
    let mm = int(m as i64);
    let nn = int(n as i64);
    let mh = c(&(&mm * &h));
    let terms = match j {
        Family::II => vec![
            Term::DividedDifference(c(&(&h * rat(1, 2)))),
            Term::Second(c(&(&h * &h * rat(1, 2)))),
            Term::First(tx().mul(&tx()).add(&tt().scale(&rat(1, 2))).mul(&hc).neg()),
            Term::Zeroth(mh.mul(&tx())),
        ],
        Family::III => {
            let b = p.rat("b")?;
            vec![
                Term::DividedDifference(hc.mul(&tx()).mul(&tx())),
                Term::Second(h2.mul(&tx()).mul(&tx())),
                Term::First(
                    tx().mul(&tx()).add(&c(&(&b + &nn - int(1))).mul(&tx())).add(&tt()).mul(&hc).neg(),
                ),
                Term::Zeroth(mh.mul(&tx())),
            ]
        }
        Family::IV => {
            let b = p.rat("b")?;
            vec![
                Term::DividedDifference(hc.mul(&tx())),
                Term::Second(h2.mul(&tx())),
                Term::First(tx().mul(&tx()).add(&tt().mul(&tx())).add(&c(&b)).mul(&hc).neg()),
                Term::Zeroth(mh.mul(&tx())),
                Term::Scalar(c(&(&h * &nn * &mm)).mul(&tt())),
            ]
        }
        Family::V => {
            let (b, cc) = (p.rat("b")?, p.rat("c")?);
            let konst = c(&(&b + &cc - &h * (&mm - int(1)) - &nn + int(1))).add(&tt());
            vec![
                Term::DividedDifference(hc.mul(&quadratic_weight())),
                Term::Scalar(konst.mul(&c(&(&h * &nn * &mm)))),
                Term::Second(h2.mul(&quadratic_weight())),
                Term::First(
                    tt().mul(&tx()).mul(&tx()).sub(&c(&(&b + &cc)).add(&tt()).mul(&tx())).add(&c(&b)).mul(&hc),
                ),
                Term::Zeroth(mh.mul(&tt()).mul(&tx()).neg()),
            ]
        }
        Family::VI => {
            let (a, b, cc, d) = (p.rat("a")?, p.rat("b")?, p.rat("c")?, p.rat("d")?);
            let x = tx();
            let first = c(&(&a + &b))
                .mul(&x.sub(&ci(1)))
                .mul(&x.sub(&tt()))
                .add(&c(&cc).mul(&x).mul(&x.sub(&tt())))
                .add(&c(&(&d + &nn - int(1))).mul(&quadratic_weight()))
                .mul(&hc)
                .neg();
            let zeroth = &h * &mm * (&nn - int(1) - &h * &mm);
            let konst = &h * &mm * &nn * (&h * &mm + int(1) - &nn);
            vec![
                Term::DividedDifference(hc.mul(&cubic_weight())),
                Term::Second(h2.mul(&cubic_weight())),
                Term::First(first),
                Term::Zeroth(c(&zeroth).mul(&x).neg()),
                Term::Scalar(c(&konst).mul(&tt()).neg()),
            ]
        }
        Family::I => unreachable!(),
    };
    Ok(terms)
}

/// Single-particle operator `c(t)·H_J` with a free parameter `a`.
pub fn build_nagoya_single(j: Family, p: &ParamSet) -> Result<DiffOp> {
    if j == Family::I {
        return Err(Error::Usage("no single-particle integral Hamiltonian exists for family I".into()));
    }
    let mut req = vec!["a"];
    req.extend(family_required(j).iter().filter(|k| **k != "a"));
    p.require(&req)?;
    let h = p.hbar();
    let hc = c(&h);
    let h2 = c(&(&h * &h));
    let a = p.rat("a")?;
    let ac = c(&a);
    let x = tx();
    let terms = match j {
        Family::II => vec![
            Term::Second(c(&(&h * &h * rat(1, 2)))),
            Term::First(x.mul(&x).add(&tt().scale(&rat(1, 2))).mul(&hc).neg()),
            Term::Zeroth(ac.mul(&x)),
        ],
        Family::III => {
            let b = p.rat("b")?;
            vec![
                Term::Second(h2.mul(&x).mul(&x)),
                Term::First(x.mul(&x).add(&c(&b).mul(&x)).add(&tt()).mul(&hc).neg()),
                Term::Zeroth(ac.mul(&x)),
            ]
        }
        Family::IV => {
            let b = p.rat("b")?;
            vec![
                Term::Second(h2.mul(&x)),
                Term::First(x.mul(&x).add(&tt().mul(&x)).add(&c(&b)).mul(&hc).neg()),
                Term::Zeroth(ac.mul(&x)),
                Term::Scalar(ac.mul(&tt())),
            ]
        }
        Family::V => {
            let (b, cc) = (p.rat("b")?, p.rat("c")?);
            vec![
                Term::Second(h2.mul(&quadratic_weight())),
                Term::First(tt().mul(&x).mul(&x).sub(&c(&(&b + &cc)).add(&tt()).mul(&x)).add(&c(&b)).mul(&hc)),
                Term::Zeroth(ac.mul(&tt()).mul(&x).neg()),
                Term::Scalar(ac.mul(&c(&(&b + &cc - &a + &h)).add(&tt()))),
            ]
        }
        Family::VI => {
            let (b, cc, d) = (p.rat("b")?, p.rat("c")?, p.rat("d")?);
            let first = c(&(&a + &b))
                .mul(&x.sub(&ci(1)))
                .mul(&x.sub(&tt()))
                .add(&c(&cc).mul(&x).mul(&x.sub(&tt())))
                .add(&c(&d).mul(&quadratic_weight()))
                .mul(&hc)
                .neg();
            let k = &(&b + &cc + &d + &h) * &a;
            vec![
                Term::Second(h2.mul(&cubic_weight())),
                Term::First(first),
                Term::Zeroth(c(&k).mul(&x)),
                Term::Scalar(c(&k).mul(&tt()).neg()),
            ]
        }
        Family::I => unreachable!(),
    };
    Ok(canonicalize(1, &terms))
}
