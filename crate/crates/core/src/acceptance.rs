//! The acceptance matrix: eleven criteria, each a list of checks.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diffop::{check_gauge_family, check_n1_reduction, check_pii_gauge_lemma, check_table1, kappa_branches, table1_params, Table1Mode};
use crate::error::{Error, Result};
use crate::exact::{int, rat, Rat};
use crate::moments::{nagoya_parameters, verify_pde_negative_control, verify_pde_symbolic, verify_pde_symbolic_scaled};
use crate::numeric::{random_oracle_point, verify_andreief, verify_moment_oracle, verify_pde_numeric, NumericPdeConfig};
use crate::params::{Family, ParamSet};
use crate::radial::{verify_radial_match, verify_trace_qk_p2};
use crate::report::{CheckRecord, Environment, Report, Status};
use crate::task::timed;
use crate::weyl::{trace_identities_check, verify_eom_pvi, verify_zero_curvature_pvi, worked_example_check};

pub struct Criterion {
    pub number: u32,
    pub title: &'static str,
    pub tolerance: &'static str,
}

pub const CRITERIA: [Criterion; 11] = [
    Criterion { number: 1, title: "Weyl trace-reordering identities, N = 1..3", tolerance: "exact" },
    Criterion { number: 2, title: "worked commutator [p, Tr(pqpq)] and classical bracket, N = 2, 3", tolerance: "exact" },
    Criterion { number: 3, title: "sixth-family equations of motion, N = 2", tolerance: "exact" },
    Criterion { number: 4, title: "sixth-family zero curvature in the free algebra", tolerance: "exact" },
    Criterion { number: 5, title: "radial reduction against matrix operators, kappa = 0, N = 2, 3", tolerance: "exact" },
    Criterion { number: 6, title: "Vandermonde gauge identities a = 0..3 and the second-family lemma", tolerance: "exact" },
    Criterion { number: 7, title: "parameter correspondence table, ungauged and gauged", tolerance: "exact" },
    Criterion { number: 8, title: "N = 1 reduction to the single-particle operators", tolerance: "exact" },
    Criterion { number: 9, title: "symbolic Schrodinger equation at integer hbar", tolerance: "exact" },
    Criterion { number: 10, title: "numeric Schrodinger equation at hbar = 1/2, N = m = 2", tolerance: "1e-6 (routes 1e-8)" },
    Criterion { number: 11, title: "moment recursions on the quadrature and the determinant cross-path", tolerance: "1e-10 / 1e-8" },
];

/// Admissible numeric test points `(params, t)` with `a = mħ` (and the sixth-family `d`) filled in.
pub fn numeric_sample_point(j: Family, m: usize, hbar: &Rat, which: usize) -> Result<(ParamSet, Rat)> {
    let mut base = ParamSet::new(j).with_rat("hbar", hbar.clone())?;
    let (b, c, t) = match (j, which % 2) {
        (Family::II, 0) => (None, None, rat(1, 2)),
        (Family::II, _) => (None, None, rat(-1, 3)),
        (Family::III, 0) => (Some(rat(-1, 3)), None, rat(-3, 2)),
        (Family::III, _) => (Some(rat(-3, 4)), None, rat(-1, 2)),
        (Family::IV, 0) => (Some(rat(-1, 3)), None, rat(1, 2)),
        (Family::IV, _) => (Some(rat(-3, 5)), None, rat(-1, 4)),
        (Family::V, 0) => (Some(rat(-1, 3)), Some(rat(-1, 5)), rat(3, 2)),
        (Family::V, _) => (Some(rat(-1, 2)), Some(rat(-2, 3)), rat(-1, 2)),
        (Family::VI, 0) => (Some(rat(-5, 2)), Some(rat(-1, 5)), rat(3, 2)),
        (Family::VI, _) => (Some(rat(-2, 1) - int(m as i64) * hbar), Some(rat(-2, 5)), rat(2, 1)),
        (Family::I, _) => return Err(Error::Usage("family I has no integral solution".into())),
    };
    if let Some(b) = b {
        base.set_rat("b", b)?;
    }
    if let Some(c) = c {
        base.set_rat("c", c)?;
    }
    Ok((nagoya_parameters(j, m, &base)?, t))
}

fn symbolic_point(j: Family, m: usize, hbar: i64) -> Result<ParamSet> {
    let base = ParamSet::new(j).with_rat("hbar", int(hbar))?.with("b", "-1/3")?.with("c", "-1/5")?;
    nagoya_parameters(j, m, &base)
}

fn each<F: FnMut(&mut Vec<CheckRecord>) -> Result<()>>(mut f: F) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    f(&mut out)?;
    Ok(out)
}

/// Checks of one criterion.
pub fn run_criterion(k: u32, seed: u64, prec: u32) -> Result<Vec<CheckRecord>> {
    match k {
        1 => each(|out| {
            for n in 1..=3 {
                out.extend(trace_identities_check(n)?);
            }
            Ok(())
        }),
        2 => each(|out| {
            for n in 2..=3 {
                out.extend(worked_example_check(n)?);
            }
            Ok(())
        }),
        3 => verify_eom_pvi(2),
        4 => verify_zero_curvature_pvi(),
        5 => each(|out| {
            for n in [2, 3] {
                for j in Family::ALL {
                    out.push(verify_radial_match(j, n, 5, seed)?);
                }
                for k in 0..=3 {
                    out.push(verify_trace_qk_p2(n, k, 5, seed)?);
                }
            }
            Ok(())
        }),
        6 => each(|out| {
            for n in [2, 3] {
                for h in [rat(1, 2), rat(1, 3), int(2)] {
                    for kap in kappa_branches(&h) {
                        for a in 0..=3 {
                            out.push(check_gauge_family(n, a, &h, &kap)?);
                        }
                        out.push(check_pii_gauge_lemma(n, 2, &h, &kap)?);
                    }
                }
            }
            Ok(())
        }),
        7 => each(|out| {
            let base = ParamSet::default().with("a", "1/3")?.with("b", "-1/5")?.with("c", "2/7")?.with("d", "1/11")?;
            for j in Family::NAGOYA {
                for n in [2, 3] {
                    let p = table1_params(j, &int(1), Table1Mode::Ungauged, 2, n, &base)?;
                    out.push(check_table1(j, n, 2, &p, Table1Mode::Ungauged)?);
                    for h in [rat(1, 2), int(2)] {
                        for kap in kappa_branches(&h) {
                            let p = table1_params(j, &h, Table1Mode::Gauged, 2, n, &base)?.with_rat("kappa", kap)?;
                            out.push(check_table1(j, n, 2, &p, Table1Mode::Gauged)?);
                        }
                    }
                }
            }
            Ok(())
        }),
        8 => each(|out| {
            for (h, b, c) in [("1/3", "2/5", "-1/7"), ("1/2", "-1/3", "-1/5"), ("2", "3/4", "1/6")] {
                let p = ParamSet::default().with("hbar", h)?.with("b", b)?.with("c", c)?;
                for j in Family::NAGOYA {
                    for m in 1..=3 {
                        out.push(check_n1_reduction(j, m, &p)?);
                    }
                }
            }
            Ok(())
        }),
        9 => each(|out| {
            let mut cases: Vec<(Family, usize, usize, i64)> = Vec::new();
            for j in Family::NAGOYA {
                for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
                    cases.push((j, n, m, 1));
                }
            }
            cases.push((Family::II, 2, 2, 2));
            cases.push((Family::IV, 2, 2, 2));
            for (j, n, m, h) in cases {
                let p = symbolic_point(j, m, h)?;
                out.push(verify_pde_symbolic(j, n, m, &p)?);
                out.push(verify_pde_symbolic_scaled(j, n, m, &p)?);
                out.push(verify_pde_negative_control(j, n, m, &p)?);
            }
            Ok(())
        }),
        10 => each(|out| {
            let cfg = NumericPdeConfig::new(prec);
            for j in [Family::V, Family::VI] {
                for which in 0..2 {
                    let (p, t) = numeric_sample_point(j, 2, &rat(1, 2), which)?;
                    out.extend(verify_pde_numeric(j, 2, 2, &p, &t, &cfg, 1e-6)?);
                }
            }
            Ok(())
        }),
        11 => each(|out| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for j in Family::NAGOYA {
                for _ in 0..3 {
                    let (p, t) = random_oracle_point(j, &mut rng)?;
                    out.push(verify_moment_oracle(j, &p, &t, 6, prec, 1e-10)?);
                }
            }
            for j in Family::NAGOYA {
                for n in [1, 2] {
                    let (p, t) = numeric_sample_point(j, 2, &int(1), 0)?;
                    out.push(verify_andreief(j, n, 2, &p, &t, prec, 1e-8)?);
                }
            }
            Ok(())
        }),
        _ => Err(Error::Usage(format!("no acceptance criterion {k} (expected 1..11)"))),
    }
}

/// Pass/fail of one criterion; corrections resolved by the solve procedure count as passing.
pub fn criterion_status(recs: &[CheckRecord]) -> Status {
    Status::combine(recs)
}

/// Runs the selected criteria (all when `only` is empty) into one report.
pub fn acceptance_report(only: &[u32], seed: u64, prec: u32, timings: bool) -> Result<Report> {
    let selected: Vec<u32> = if only.is_empty() { (1..=11).collect() } else { only.to_vec() };
    let mut checks = Vec::new();
    for &k in &selected {
        let recs = timed(timings, || run_criterion(k, seed, prec))?;
        checks.extend(recs.into_iter().map(|mut r| {
            r.identity = format!("criterion {k}: {}", r.identity);
            r
        }));
    }
    let mut task = BTreeMap::new();
    task.insert("kind".to_string(), "suite".to_string());
    task.insert("suite".to_string(), "acceptance".to_string());
    task.insert("criteria".to_string(), selected.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
    Ok(Report::new(task, checks, Environment::new(prec, seed)))
}
