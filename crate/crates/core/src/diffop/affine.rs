use std::collections::BTreeSet;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{fmt_rat, solve, Exp, LinearSolution, Rat, RatFun};
use crate::report::{CheckRecord, Status};

use super::op::DiffOp;

/// `base + Σ x_i dir_i`, an operator depending affinely on named unknowns.
#[derive(Clone, Debug)]
pub struct AffineOp {
    pub base: DiffOp,
    pub dirs: Vec<(String, DiffOp)>,
}

impl AffineOp {
    pub fn constant(base: DiffOp) -> AffineOp {
        AffineOp { base, dirs: Vec::new() }
    }

    /// Builds the affine family from a builder that is affine in the named unknowns.
    pub fn from_builder<F>(names: &[&str], build: F) -> Result<AffineOp>
    where
        F: Fn(&[Rat]) -> Result<DiffOp>,
    {
        let zeros = vec![Rat::zero(); names.len()];
        let base = build(&zeros)?;
        let mut dirs = Vec::new();
        for (i, name) in names.iter().enumerate() {
            let mut v = zeros.clone();
            v[i] = Rat::from_integer(1.into());
            dirs.push((name.to_string(), build(&v)?.sub(&base)));
        }
        Ok(AffineOp { base, dirs })
    }

    pub fn at(&self, values: &[Rat]) -> DiffOp {
        let mut out = self.base.clone();
        for ((_, d), v) in self.dirs.iter().zip(values) {
            out = out.add(&d.scale(v));
        }
        out
    }

    /// Applies a map (e.g. a conjugation, linear in the operator) to base and directions.
    pub fn map<F: Fn(&DiffOp) -> DiffOp>(&self, f: F) -> AffineOp {
        let base = f(&self.base);
        let fz = f(&DiffOp::zero(self.base.n()));
        let dirs = self.dirs.iter().map(|(n, d)| (n.clone(), f(d).sub(&fz))).collect();
        AffineOp { base, dirs }
    }
}

/// Outcome of matching an affine operator family against a target.
#[derive(Clone, Debug)]
pub enum Resolution {
    /// The unknowns are determined uniquely.
    Unique(Vec<(String, Rat)>),
    /// A family of solutions; a particular one and the free directions' count.
    Underdetermined(Vec<(String, Rat)>, usize),
    /// No values make the operators equal.
    Inconsistent,
}

/// Solves `target = family(x)` by clearing denominators and matching monomials.
pub fn resolve(family: &AffineOp, target: &DiffOp) -> Result<Resolution> {
    if family.base.n() != target.n() {
        return Err(Error::Usage("operator size mismatch".into()));
    }
    let k = family.dirs.len();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    let diff = target.sub(&family.base);
    let diff_slots = diff.slots();
    let dir_slots: Vec<Vec<&RatFun>> = family.dirs.iter().map(|(_, d)| d.slots()).collect();
    for (s, r0) in diff_slots.iter().enumerate() {
        let mut all: Vec<&RatFun> = vec![r0];
        all.extend(dir_slots.iter().map(|d| d[s]));
        if all.iter().all(|r| r.is_zero()) {
            continue;
        }
        let l = RatFun::lcm_den(all.iter().copied());
        let nums: Vec<_> = all.iter().map(|r| r.numerator_over(&l).expect("lcm covers every factor")).collect();
        let monos: BTreeSet<Exp> = nums.iter().flat_map(|p| p.terms().keys().cloned()).collect();
        for mo in monos {
            let get = |i: usize| nums[i].terms().get(&mo).cloned().unwrap_or_else(Rat::zero);
            rows.push((1..=k).map(get).collect());
            rhs.push(get(0));
        }
    }
    let names: Vec<String> = family.dirs.iter().map(|(n, _)| n.clone()).collect();
    Ok(match solve(&rows, &rhs, k) {
        LinearSolution::Unique(v) => Resolution::Unique(names.into_iter().zip(v).collect()),
        LinearSolution::Family(v, basis) => Resolution::Underdetermined(names.into_iter().zip(v).collect(), basis.len()),
        LinearSolution::Inconsistent => Resolution::Inconsistent,
    })
}

fn render(vals: &[(String, Rat)]) -> String {
    vals.iter().map(|(n, v)| format!("{n}={}", fmt_rat(v))).collect::<Vec<_>>().join(", ")
}

/// Compares the printed values of the unknowns with the exact resolution.
///
/// Pass when the printed values make the identity exact, resolved-with-correction when a
/// different assignment does, and fail when none does.
pub fn correction_check(
    identity: &str,
    anchor: &str,
    family: &AffineOp,
    target: &DiffOp,
    printed: &[Rat],
) -> Result<CheckRecord> {
    let at_printed = family.at(printed);
    let diffs = target.slot_differences(&at_printed);
    let printed_named: Vec<(String, Rat)> =
        family.dirs.iter().map(|(n, _)| n.clone()).zip(printed.iter().cloned()).collect();
    if diffs.is_empty() {
        return Ok(CheckRecord::new(identity, anchor, true, "0").with_detail(format!("printed {}", render(&printed_named))));
    }
    let first = format!("{}: {}", diffs[0].0, diffs[0].1);
    let rec = match resolve(family, target)? {
        Resolution::Unique(v) => CheckRecord::new(identity, anchor, true, first)
            .with_status(Status::ResolvedWithCorrection)
            .with_detail(format!("printed {} ; exact {}", render(&printed_named), render(&v))),
        Resolution::Underdetermined(v, free) => CheckRecord::new(identity, anchor, true, first)
            .with_status(Status::ResolvedWithCorrection)
            .with_detail(format!(
                "printed {} ; exact {} ({free} free direction(s))",
                render(&printed_named),
                render(&v)
            )),
        Resolution::Inconsistent => CheckRecord::new(identity, anchor, false, first)
            .with_detail(format!("printed {} ; no correction of the unknowns makes the identity exact", render(&printed_named))),
    };
    Ok(rec)
}
