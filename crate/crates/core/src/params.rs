//! Family tags and the parameter record shared by all modules.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{fmt_rat, int, parse_rat, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl Family {
    pub const NAGOYA: [Family; 5] = [Family::II, Family::III, Family::IV, Family::V, Family::VI];
    pub const ALL: [Family; 6] = [Family::I, Family::II, Family::III, Family::IV, Family::V, Family::VI];

    pub fn roman(self) -> &'static str {
        match self {
            Family::I => "I",
            Family::II => "II",
            Family::III => "III",
            Family::IV => "IV",
            Family::V => "V",
            Family::VI => "VI",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.roman())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        Ok(match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Family::I,
            "II" | "2" => Family::II,
            "III" | "3" => Family::III,
            "IV" | "4" => Family::IV,
            "V" | "5" => Family::V,
            "VI" | "6" => Family::VI,
            other => return Err(Error::Usage(format!("unknown family `{other}`"))),
        })
    }
}

/// Full parameter record. Unset entries are `None`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamSet {
    pub family: Option<Family>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub hbar: Option<Rat>,
    pub kappa: Option<Rat>,
    pub theta: Option<Rat>,
    pub theta0: Option<Rat>,
    pub theta1: Option<Rat>,
    pub theta2: Option<Rat>,
    pub theta_t: Option<Rat>,
    pub k2: Option<Rat>,
    pub a: Option<Rat>,
    pub b: Option<Rat>,
    pub c: Option<Rat>,
    pub d: Option<Rat>,
    pub t: Option<Rat>,
}

pub const PARAM_KEYS: [&str; 16] =
    ["family", "N", "m", "hbar", "kappa", "theta", "theta0", "theta1", "theta2", "thetat", "k2", "a", "b", "c", "d", "t"];

impl ParamSet {
    pub fn new(family: Family) -> ParamSet {
        ParamSet { family: Some(family), ..Default::default() }
    }

    /// Sets one `key = value` entry.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let r = || parse_rat(value);
        match key.trim() {
            "family" | "J" => self.family = Some(value.parse()?),
            "N" | "n" => self.n = Some(parse_count(value)?),
            "m" => self.m = Some(parse_count(value)?),
            "hbar" | "h" => {
                let h = r()?;
                if h.is_zero() {
                    return Err(Error::Usage("hbar must be nonzero".into()));
                }
                self.hbar = Some(h)
            }
            "kappa" => self.kappa = Some(r()?),
            "theta" => self.theta = Some(r()?),
            "theta0" => self.theta0 = Some(r()?),
            "theta1" => self.theta1 = Some(r()?),
            "theta2" => self.theta2 = Some(r()?),
            "thetat" | "theta_t" => self.theta_t = Some(r()?),
            "k2" => self.k2 = Some(r()?),
            "k" => {
                let k = r()?;
                self.k2 = Some(&k * &k)
            }
            "a" => self.a = Some(r()?),
            "b" => self.b = Some(r()?),
            "c" => self.c = Some(r()?),
            "d" => self.d = Some(r()?),
            "t" => self.t = Some(r()?),
            other => return Err(Error::Usage(format!("unknown parameter `{other}`"))),
        }
        Ok(())
    }

    /// Sets a rational-valued entry directly.
    pub fn set_rat(&mut self, key: &str, v: Rat) -> Result<()> {
        if key == "hbar" && v.is_zero() {
            return Err(Error::Usage("hbar must be nonzero".into()));
        }
        let slot = match key {
            "hbar" => &mut self.hbar,
            "kappa" => &mut self.kappa,
            "theta" => &mut self.theta,
            "theta0" => &mut self.theta0,
            "theta1" => &mut self.theta1,
            "theta2" => &mut self.theta2,
            "thetat" => &mut self.theta_t,
            "k2" => &mut self.k2,
            "a" => &mut self.a,
            "b" => &mut self.b,
            "c" => &mut self.c,
            "d" => &mut self.d,
            "t" => &mut self.t,
            other => return Err(Error::Usage(format!("unknown parameter `{other}`"))),
        };
        *slot = Some(v);
        Ok(())
    }

    pub fn with_rat(mut self, key: &str, v: Rat) -> Result<ParamSet> {
        self.set_rat(key, v)?;
        Ok(self)
    }

    pub fn with(mut self, key: &str, value: &str) -> Result<ParamSet> {
        self.set(key, value)?;
        Ok(self)
    }

    pub fn get(&self, key: &str) -> Option<Rat> {
        match key {
            "hbar" => self.hbar.clone(),
            "kappa" => self.kappa.clone(),
            "theta" => self.theta.clone(),
            "theta0" => self.theta0.clone(),
            "theta1" => self.theta1.clone(),
            "theta2" => self.theta2.clone(),
            "thetat" => self.theta_t.clone(),
            "k2" => self.k2.clone(),
            "a" => self.a.clone(),
            "b" => self.b.clone(),
            "c" => self.c.clone(),
            "d" => self.d.clone(),
            "t" => self.t.clone(),
            "N" => self.n.map(|n| int(n as i64)),
            "m" => self.m.map(|m| int(m as i64)),
            _ => None,
        }
    }

    /// Fails with a usage error listing every missing key.
    pub fn require(&self, keys: &[&str]) -> Result<()> {
        let missing: Vec<&str> = keys.iter().copied().filter(|k| self.get(k).is_none()).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Usage(format!("missing parameters: {}", missing.join(", "))))
        }
    }

    pub fn rat(&self, key: &str) -> Result<Rat> {
        self.get(key).ok_or_else(|| Error::Usage(format!("missing parameters: {key}")))
    }

    pub fn hbar(&self) -> Rat {
        self.hbar.clone().unwrap_or_else(|| int(1))
    }

    pub fn kappa(&self) -> Rat {
        self.kappa.clone().unwrap_or_else(Rat::zero)
    }

    /// `θ0 + θ1 + θt` when all are set, otherwise the explicit `theta`.
    pub fn theta_vi(&self) -> Result<Rat> {
        match (&self.theta0, &self.theta1, &self.theta_t) {
            (Some(a), Some(b), Some(c)) => Ok(a + b + c),
            _ => self.rat("theta"),
        }
    }

    /// Deterministic `key=value` rendering of the set entries.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        if let Some(f) = self.family {
            parts.push(format!("family={f}"));
        }
        for k in PARAM_KEYS.iter().skip(1) {
            if let Some(v) = self.get(k) {
                parts.push(format!("{k}={}", fmt_rat(&v)));
            }
        }
        parts.join(",")
    }
}

fn parse_count(v: &str) -> Result<usize> {
    v.trim().parse::<usize>().map_err(|_| Error::Parse(format!("expected a positive integer, got `{v}`")))
}

/// Parses `b=-1/3,c=-1/5` style lists.
pub fn parse_params(text: &str) -> Result<ParamSet> {
    let mut p = ParamSet::default();
    parse_params_into(&mut p, text)?;
    Ok(p)
}

pub fn parse_params_into(p: &mut ParamSet, text: &str) -> Result<()> {
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{item}`")))?;
        p.set(k.trim(), v.trim())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn parses_rationals() {
        let p = parse_params("b=-1/3,c=-1/5").unwrap();
        assert_eq!(p.b, Some(rat(-1, 3)));
        assert_eq!(p.c, Some(rat(-1, 5)));
    }

    #[test]
    fn rejects_zero_hbar() {
        assert!(matches!(parse_params("hbar=0"), Err(Error::Usage(_))));
    }

    #[test]
    fn accepts_k2_and_k() {
        assert_eq!(parse_params("k2=4/9").unwrap().k2, Some(rat(4, 9)));
        assert_eq!(parse_params("k=-2/3").unwrap().k2, Some(rat(4, 9)));
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(parse_params("zz=1").is_err());
        assert!(parse_params("b=1/0").is_err());
        assert!(parse_params("b").is_err());
    }

    #[test]
    fn missing_list() {
        let p = parse_params("a=1").unwrap();
        let e = p.require(&["a", "b", "c"]).unwrap_err();
        assert_eq!(e, Error::Usage("missing parameters: b, c".into()));
    }
}
