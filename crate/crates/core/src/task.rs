//! Verification requests and their dispatch to the owning modules.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diffop::{check_gauge_family, check_n1_reduction, check_pii_gauge_lemma, check_table1, kappa_branches, table1_params, Table1Mode};
use crate::error::{Error, Result};
use crate::exact::{fmt_rat, int, Rat};
use crate::moments::{verify_pde_negative_control, verify_pde_symbolic, verify_pde_symbolic_scaled};
use crate::numeric::{random_oracle_point, verify_moment_oracle, verify_pde_numeric, NumericPdeConfig, QuadOptions};
use crate::params::{Family, ParamSet};
use crate::radial::{verify_radial_match, verify_trace_qk_p2};
use crate::report::{CheckRecord, Environment, Report};
use crate::weyl::{trace_identities_check, verify_eom_pvi, verify_zero_curvature_pvi, worked_example_check};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Weyl,
    Eom,
    ZeroCurvature,
    Radial,
    Gauge,
    Table1,
    N1,
    PdeSymbolic,
    PdeNumeric,
    OracleMoments,
}

impl TaskKind {
    pub const ALL: [TaskKind; 10] = [
        TaskKind::Weyl,
        TaskKind::Eom,
        TaskKind::ZeroCurvature,
        TaskKind::Radial,
        TaskKind::Gauge,
        TaskKind::Table1,
        TaskKind::N1,
        TaskKind::PdeSymbolic,
        TaskKind::PdeNumeric,
        TaskKind::OracleMoments,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Weyl => "weyl",
            TaskKind::Eom => "eom",
            TaskKind::ZeroCurvature => "zero-curvature",
            TaskKind::Radial => "radial",
            TaskKind::Gauge => "gauge",
            TaskKind::Table1 => "table1",
            TaskKind::N1 => "n1",
            TaskKind::PdeSymbolic => "pde-symbolic",
            TaskKind::PdeNumeric => "pde-numeric",
            TaskKind::OracleMoments => "oracle-moments",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<TaskKind> {
        TaskKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown task `{s}`")))
    }
}

/// One verification request.
#[derive(Debug, Clone)]
pub struct VerifyTask {
    pub kind: TaskKind,
    /// Family, sizes, `ħ`, `t` and the family parameters.
    pub params: ParamSet,
    pub trials: Option<usize>,
    pub seed: u64,
    pub prec: u32,
    /// Power `a` of the gauge family; all of `0..=3` when unset.
    pub gauge_a: Option<u32>,
    pub table_mode: Option<Table1Mode>,
    pub kmax: usize,
    pub tol: Option<f64>,
    pub timings: bool,
}

impl VerifyTask {
    pub fn new(kind: TaskKind, params: ParamSet) -> VerifyTask {
        VerifyTask {
            kind,
            params,
            trials: None,
            seed: 42,
            prec: QuadOptions::DEFAULT_PREC,
            gauge_a: None,
            table_mode: None,
            kmax: 6,
            tol: None,
            timings: false,
        }
    }

    fn family(&self) -> Result<Family> {
        self.params.family.ok_or_else(|| Error::Usage("missing parameters: family".into()))
    }

    /// Parameters the task cannot run without, in a fixed order.
    pub fn missing(&self) -> Vec<&'static str> {
        let p = &self.params;
        let mut need: Vec<&'static str> = match self.kind {
            TaskKind::Weyl | TaskKind::Eom => vec!["N"],
            TaskKind::ZeroCurvature => vec![],
            TaskKind::Radial => vec!["family", "N"],
            TaskKind::Gauge => vec!["N", "hbar"],
            TaskKind::Table1 => vec!["family", "N", "m", "hbar"],
            TaskKind::N1 => vec!["family", "m"],
            TaskKind::PdeSymbolic => vec!["family", "N", "m", "hbar"],
            TaskKind::PdeNumeric => vec!["family", "N", "m", "hbar", "t"],
            TaskKind::OracleMoments => vec!["family"],
        };
        if let Some(j) = p.family {
            let with_t = self.kind != TaskKind::OracleMoments || p.t.is_some();
            need.extend(match self.kind {
                TaskKind::Table1 => table_keys(j),
                TaskKind::N1 | TaskKind::PdeSymbolic | TaskKind::PdeNumeric => master_keys(j),
                TaskKind::OracleMoments if with_t => oracle_keys(j),
                _ => &[],
            });
        }
        need.retain(|k| match *k {
            "family" => p.family.is_none(),
            "N" => p.n.is_none(),
            "m" => p.m.is_none(),
            "hbar" => p.hbar.is_none(),
            k => p.get(k).is_none(),
        });
        need
    }

    pub fn validate(&self) -> Result<()> {
        let missing = self.missing();
        if !missing.is_empty() {
            return Err(Error::Usage(format!("missing parameters for `{}`: {}", self.kind, missing.join(", "))));
        }
        if let Some(j) = self.params.family {
            if j == Family::I && !matches!(self.kind, TaskKind::Radial) {
                return Err(Error::Usage(format!("family I is not supported by `{}`", self.kind)));
            }
        }
        Ok(())
    }

    /// Deterministic echo of the request for reports.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("kind".into(), self.kind.to_string());
        let rendered = self.params.render();
        if !rendered.is_empty() {
            m.insert("params".into(), rendered);
        }
        if let Some(t) = self.trials {
            m.insert("trials".into(), t.to_string());
        }
        if let Some(a) = self.gauge_a {
            m.insert("a".into(), a.to_string());
        }
        if let Some(mode) = self.table_mode {
            m.insert("mode".into(), mode.to_string());
        }
        if self.kind == TaskKind::OracleMoments {
            m.insert("kmax".into(), self.kmax.to_string());
        }
        if let Some(t) = self.tol {
            m.insert("tol".into(), format!("{t:e}"));
        }
        m
    }
}

fn master_keys(j: Family) -> &'static [&'static str] {
    match j {
        Family::III | Family::IV => &["b"],
        Family::V | Family::VI => &["b", "c"],
        _ => &[],
    }
}

fn oracle_keys(j: Family) -> &'static [&'static str] {
    match j {
        Family::VI => &["a", "b", "c", "d"],
        j => master_keys(j),
    }
}

fn table_keys(j: Family) -> &'static [&'static str] {
    match j {
        Family::VI => &["a", "b", "c", "d"],
        j => master_keys(j),
    }
}

/// Runs `f` and stamps its records with the elapsed time when requested.
pub fn timed<F: FnOnce() -> Result<Vec<CheckRecord>>>(timings: bool, f: F) -> Result<Vec<CheckRecord>> {
    let start = Instant::now();
    let mut recs = f()?;
    if timings {
        let ms = start.elapsed().as_millis() as u64;
        for r in &mut recs {
            r.millis = Some(ms);
        }
    }
    Ok(recs)
}

/// Fills `a = mħ` (and `d = (m−1)ħ − b − c` for VI) where unset and describes any violated condition.
pub fn integral_parameters(j: Family, m: usize, p: &ParamSet) -> Result<(ParamSet, Option<String>)> {
    let h = p.hbar();
    let mm = int(m as i64);
    let mut q = p.clone();
    if q.a.is_none() {
        q.a = Some(&mm * &h);
    }
    if j == Family::VI && q.d.is_none() {
        q.d = Some((&mm - int(1)) * &h - q.rat("b")? - q.rat("c")?);
    }
    let note = if j == Family::VI {
        let sum: Rat = q.rat("a")? + q.rat("b")? + q.rat("c")? + q.rat("d")?;
        let want = (int(2) * &mm - int(1)) * &h;
        (sum != want).then(|| {
            format!("parameter condition a+b+c+d = (2m-1)hbar = {} violated (sum {})", fmt_rat(&want), fmt_rat(&sum))
        })
    } else {
        let a = q.rat("a")?;
        let want = &mm * &h;
        (a != want).then(|| format!("parameter condition a = m hbar = {} violated (a = {})", fmt_rat(&want), fmt_rat(&a)))
    };
    Ok((q, note))
}

fn annotate(mut recs: Vec<CheckRecord>, note: &Option<String>) -> Vec<CheckRecord> {
    if let Some(n) = note {
        for r in &mut recs {
            r.detail = Some(match r.detail.take() {
                Some(d) => format!("{d}; {n}"),
                None => n.clone(),
            });
        }
    }
    recs
}

fn checks(task: &VerifyTask) -> Result<Vec<CheckRecord>> {
    let p = &task.params;
    let tm = task.timings;
    let n = p.n.unwrap_or(0);
    let m = p.m.unwrap_or(0);
    let h = p.hbar();
    match task.kind {
        TaskKind::Weyl => {
            let mut out = timed(tm, || trace_identities_check(n))?;
            out.extend(timed(tm, || worked_example_check(n))?);
            Ok(out)
        }
        TaskKind::Eom => timed(tm, || verify_eom_pvi(n)),
        TaskKind::ZeroCurvature => timed(tm, verify_zero_curvature_pvi),
        TaskKind::Radial => {
            let j = task.family()?;
            let trials = task.trials.unwrap_or(5);
            let mut out = timed(tm, || Ok(vec![verify_radial_match(j, n, trials, task.seed)?]))?;
            if j == Family::I {
                for k in 0..=3 {
                    out.extend(timed(tm, || Ok(vec![verify_trace_qk_p2(n, k, trials, task.seed)?]))?);
                }
            }
            Ok(out)
        }
        TaskKind::Gauge => {
            let kappas: Vec<Rat> = match &p.kappa {
                Some(k) => vec![k.clone()],
                None => kappa_branches(&h).to_vec(),
            };
            let powers: Vec<u32> = task.gauge_a.map(|a| vec![a]).unwrap_or_else(|| (0..=3).collect());
            let mut out = Vec::new();
            for k in &kappas {
                for &a in &powers {
                    out.extend(timed(tm, || Ok(vec![check_gauge_family(n, a, &h, k)?]))?);
                }
                if task.gauge_a.is_none() {
                    out.extend(timed(tm, || Ok(vec![check_pii_gauge_lemma(n, p.m.unwrap_or(2), &h, k)?]))?);
                }
            }
            Ok(out)
        }
        TaskKind::Table1 => {
            let j = task.family()?;
            let mode = task.table_mode.unwrap_or(if h == int(1) { Table1Mode::Ungauged } else { Table1Mode::Gauged });
            let mut q = table1_params(j, &h, mode, m, n, p)?;
            if let (Table1Mode::Gauged, Some(k)) = (mode, &p.kappa) {
                q.set_rat("kappa", k.clone())?;
            }
            timed(tm, || Ok(vec![check_table1(j, n, m, &q, mode)?]))
        }
        TaskKind::N1 => {
            let j = task.family()?;
            timed(tm, || Ok(vec![check_n1_reduction(j, m, p)?]))
        }
        TaskKind::PdeSymbolic => {
            let j = task.family()?;
            let (q, note) = integral_parameters(j, m, p)?;
            let recs = timed(tm, || {
                Ok(vec![
                    verify_pde_symbolic(j, n, m, &q)?,
                    verify_pde_symbolic_scaled(j, n, m, &q)?,
                    verify_pde_negative_control(j, n, m, &q)?,
                ])
            })?;
            Ok(annotate(recs, &note))
        }
        TaskKind::PdeNumeric => {
            let j = task.family()?;
            let (q, note) = integral_parameters(j, m, p)?;
            let t = p.rat("t")?;
            let cfg = NumericPdeConfig::new(task.prec);
            let recs = timed(tm, || verify_pde_numeric(j, n, m, &q, &t, &cfg, task.tol.unwrap_or(1e-6)))?;
            Ok(annotate(recs, &note))
        }
        TaskKind::OracleMoments => {
            let j = task.family()?;
            let tol = task.tol.unwrap_or(1e-10);
            let kmax = task.kmax as i64;
            if let Some(t) = &p.t {
                return timed(tm, || Ok(vec![verify_moment_oracle(j, p, t, kmax, task.prec, tol)?]));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(task.seed);
            let mut out = Vec::new();
            for _ in 0..task.trials.unwrap_or(3) {
                let (q, t) = random_oracle_point(j, &mut rng)?;
                out.extend(timed(tm, || Ok(vec![verify_moment_oracle(j, &q, &t, kmax, task.prec, tol)?]))?);
            }
            Ok(out)
        }
    }
}

/// Validates the task, dispatches it and wraps the checks in a report.
pub fn run(task: &VerifyTask) -> Result<Report> {
    task.validate()?;
    let recs = checks(task)?;
    Ok(Report::new(task.echo(), recs, Environment::new(task.prec, task.seed)))
}

impl VerifyTask {
    /// Sets a task option or, failing that, a parameter entry.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::Parse(format!("bad value `{value}` for `{key}`"));
        match key {
            "trials" => self.trials = Some(value.parse().map_err(|_| bad())?),
            "seed" => self.seed = value.parse().map_err(|_| bad())?,
            "prec" => self.prec = value.parse().map_err(|_| bad())?,
            "gauge_a" => self.gauge_a = Some(value.parse().map_err(|_| bad())?),
            "mode" => self.table_mode = Some(value.parse()?),
            "kmax" => self.kmax = value.parse().map_err(|_| bad())?,
            "tol" => self.tol = Some(value.parse().map_err(|_| bad())?),
            "timings" => self.timings = value.parse().map_err(|_| bad())?,
            _ => self.params.set(key, value)?,
        }
        Ok(())
    }
}
