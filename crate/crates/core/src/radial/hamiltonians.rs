use crate::diffop::{canonicalize, cubic_weight, quadratic_weight, tc, tt, tx, DiffOp, Term};
use crate::error::{Error, Result};
use crate::exact::{int, rat, MPoly, Rat};
use crate::params::{Family, ParamSet};

/// Which radial operator of the second family to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialForm {
    /// The operator obtained directly from the reduction.
    Reduced,
    /// The second-family operator after the exponential gauge transformation.
    Gauged,
}

/// Multiplier of the `ħ(1+t)` entry in the first-order coefficient of the sixth-family operator.
/// The printed operator has `1`.
#[derive(Clone, Debug)]
pub struct RadialCorrections {
    pub vi_first_order: Rat,
}

impl Default for RadialCorrections {
    fn default() -> Self {
        RadialCorrections { vi_first_order: int(1) }
    }
}

fn c(r: &Rat) -> MPoly {
    tc(r.clone())
}

fn required(j: Family) -> &'static [&'static str] {
    match j {
        Family::I => &[],
        Family::II => &["theta"],
        Family::III | Family::IV => &["theta0", "theta1"],
        Family::V => &["theta0", "theta1", "theta2"],
        Family::VI => &["theta0", "theta1", "thetat", "k2"],
    }
}

/// Radial Hamiltonian `c(t)·H̃_J` on the eigenvalues, as printed.
pub fn build_radial_hamiltonian(j: Family, n: usize, p: &ParamSet, form: RadialForm) -> Result<DiffOp> {
    build_radial_hamiltonian_with(j, n, p, form, &RadialCorrections::default())
}

pub fn build_radial_hamiltonian_with(
    j: Family,
    n: usize,
    p: &ParamSet,
    form: RadialForm,
    corr: &RadialCorrections,
) -> Result<DiffOp> {
    if n == 0 {
        return Err(Error::Usage("N must be positive".into()));
    }
    p.require(required(j))?;
    let h = p.hbar();
    let kap = p.kappa();
    let kk = &kap * (&kap + int(1));
    let h2 = &h * &h;
    let nn = int(n as i64);
    // −ħ²κ(κ+1)/2
    let pot = -(&h2 * &kk) * rat(1, 2);
    let x = tx();
    let terms = match j {
        Family::I => vec![
            Term::DividedDifference(c(&(&h2 * rat(1, 2)))),
            Term::PotentialSingle(c(&pot)),
            Term::Second(c(&(&h2 * rat(1, 2)))),
            Term::Zeroth(x.pow(3).scale(&rat(-1, 2)).sub(&tt().mul(&x).scale(&rat(1, 4)))),
        ],
        Family::II => {
            let th = p.rat("theta")?;
            let mut v = vec![
                Term::DividedDifference(c(&(&h2 * rat(1, 2)))),
                Term::PotentialSingle(c(&pot)),
                Term::Second(c(&(&h2 * rat(1, 2)))),
            ];
            let shifted = x.mul(&x).add(&tt().scale(&rat(1, 2)));
            match form {
                RadialForm::Reduced => {
                    v.push(Term::Zeroth(shifted.mul(&shifted).scale(&rat(-1, 2)).sub(&c(&th).mul(&x))));
                }
                RadialForm::Gauged => {
                    v.push(Term::First(shifted.mul(&c(&h)).neg()));
                    v.push(Term::Zeroth(c(&(rat(1, 2) - &th - &h * &nn)).mul(&x)));
                }
            }
            v
        }
        Family::III => {
            let (t0, t1) = (p.rat("theta0")?, p.rat("theta1")?);
            let first = x.mul(&x).sub(&c(&(&h * int(2) - &t0 + &t1)).mul(&x)).sub(&tt()).mul(&c(&h)).neg();
            vec![
                Term::DividedDifference(c(&h2).mul(&x).mul(&x)),
                Term::Second(c(&h2).mul(&x).mul(&x)),
                Term::First(first),
                Term::Zeroth(c(&(&h * &nn + &t1)).mul(&x).neg()),
                Term::PotentialPair(c(&pot).mul(&x).mul(&x)),
                Term::Scalar(c(&(&h2 * &nn * (int(1) + &nn * &nn) * rat(1, 2)))),
            ]
        }
        Family::IV => {
            let (t0, t1) = (p.rat("theta0")?, p.rat("theta1")?);
            let first = x.mul(&x).add(&tt().mul(&x)).sub(&c(&(&t0 + &h))).mul(&c(&h)).neg();
            vec![
                Term::DividedDifference(c(&h2).mul(&x)),
                Term::Second(c(&h2).mul(&x)),
                Term::First(first),
                Term::PotentialPair(c(&pot).mul(&x)),
                Term::Zeroth(c(&(&h * &nn + &t0 + &t1)).mul(&x).neg()),
                Term::Scalar(c(&(&h * &nn * &nn)).mul(&tt()).neg()),
            ]
        }
        Family::V => {
            let (t0, t1, t2) = (p.rat("theta0")?, p.rat("theta1")?, p.rat("theta2")?);
            let first = tt()
                .mul(&x)
                .mul(&x)
                .add(&c(&(&h * int(2) + &t0 - &t2)).sub(&tt()).mul(&x))
                .add(&c(&(&t2 - &h)))
                .mul(&c(&h));
            let konst = c(&(&t0 - &t2))
                .sub(&tt())
                .mul(&c(&(&nn * &nn * &h)))
                .add(&c(&(&nn * &h2 * (int(1) + &nn * &nn) * rat(1, 2))));
            vec![
                Term::DividedDifference(c(&h2).mul(&quadratic_weight())),
                Term::Second(c(&h2).mul(&quadratic_weight())),
                Term::PotentialPair(c(&pot).mul(&quadratic_weight())),
                Term::First(first),
                Term::Zeroth(tt().mul(&c(&(&h * &nn + &t0 + &t1))).mul(&x)),
                Term::Scalar(konst),
            ]
        }
        Family::VI => {
            let (t0, t1, tt_) = (p.rat("theta0")?, p.rat("theta1")?, p.rat("thetat")?);
            let k2 = p.rat("k2")?;
            let th = &t0 + &t1 + &tt_;
            let lin = c(&(&h * &corr.vi_first_order))
                .mul(&tc(int(1)).add(&tt()))
                .neg()
                .add(&tt().mul(&c(&(&t0 + &t1))))
                .add(&c(&(&t0 + &tt_)));
            let first = c(&(&h * int(3) - &th))
                .mul(&x)
                .mul(&x)
                .add(&lin.mul(&x))
                .add(&tt().mul(&c(&(&h - &t0))))
                .mul(&c(&h));
            let zeroth = &nn * &nn * &h2 - &th * &nn * &h - (&k2 - &th * &th) * rat(1, 4)
                + (&nn - int(1)) * &kk * &h2;
            let konst = c(&(-(&nn * &nn * &nn * &h2) * rat(1, 2)))
                .add(&tt().mul(&c(&(&h * &nn * &nn * (&t0 + &t1)))))
                .add(&c(&(&h * &nn * &nn * (&t0 + &tt_))))
                .sub(&c(&(&h2 * &nn * (&nn - int(1)) * &kk * rat(1, 2))));
            vec![
                Term::DividedDifference(c(&h2).mul(&cubic_weight())),
                Term::Second(c(&h2).mul(&cubic_weight())),
                Term::First(first),
                Term::PotentialPair(c(&pot).mul(&cubic_weight())),
                Term::Zeroth(c(&zeroth).mul(&x)),
                Term::Scalar(konst),
            ]
        }
    };
    Ok(canonicalize(n, &terms))
}

/// Exponent of the second-family gauge factor, `S = Σ (z³/3 + t z/2)`.
pub fn pii_gauge_exponent(n: usize) -> MPoly {
    let reg = crate::diffop::z_registry(n);
    let t = MPoly::var(&reg, n);
    let mut s = MPoly::zero(&reg);
    for r in 0..n {
        let z = MPoly::var(&reg, r);
        s = s.add(&z.pow(3).scale(&rat(1, 3))).add(&t.mul(&z).scale(&rat(1, 2)));
    }
    s
}

/// `Tr(q^k p²)` in radial form with κ = 0, as displayed after symmetrization.
pub fn radial_trace_qk_p2(n: usize, k: u32, hbar: &Rat) -> DiffOp {
    let h2 = hbar * hbar;
    let x = tx();
    let mut op = canonicalize(
        n,
        &[Term::Second(c(&h2).mul(&x.pow(k))), Term::DividedDifference(c(&h2).mul(&x.pow(k)))],
    );
    // −ħ² Σ_{j<k} Σ_σ z_σ^j Σ_τ z_τ^{k−j−1} ∂_τ + ħ² k Σ_τ z_τ^{k−1} ∂_τ
    let reg = op.registry().clone();
    let mut b: Vec<crate::exact::RatFun> = op.first().to_vec();
    for tau in 0..n {
        let zt = MPoly::var(&reg, tau);
        let mut acc = MPoly::zero(&reg);
        for j in 0..k {
            let mut pj = MPoly::zero(&reg);
            for s in 0..n {
                pj = pj.add(&MPoly::var(&reg, s).pow(j));
            }
            acc = acc.sub(&pj.mul(&zt.pow(k - j - 1)));
        }
        if k > 0 {
            acc = acc.add(&zt.pow(k - 1).scale(&int(k as i64)));
        }
        b[tau] = b[tau].add(&acc.scale(&h2).into());
    }
    op = DiffOp::from_parts(n, op.second().to_vec(), b, op.zeroth().clone()).expect("shape");
    op
}
