//! Flat `key=value` text: one pair per line or separated by `;`, `#`
//! starts a comment, lists are comma-separated.
//!
//! ```text
//! kind=piecewise; breakpoints=0,0.5,1; densities=0.5,1.5
//! ```

use std::str::FromStr;

use super::{DistributionModel, PiecewiseConstant};
use crate::error::{Error, Result};

/// Keys understood by [`DistributionModel::from_config`].
pub const MODEL_KEYS: [&str; 8] = [
    "kind",
    "alpha",
    "beta",
    "c",
    "d",
    "delta",
    "breakpoints",
    "densities",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    pairs: Vec<(String, String)>,
}

pub fn parse_key_values(text: &str) -> Result<KeyValues> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for item in line.split(';') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{item}`")))?;
            let key = key.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(Error::Parse(format!("missing key in `{item}`")));
            }
            let value = value.trim().to_string();
            // later assignments win
            pairs.retain(|(k, _)| *k != key);
            pairs.push((key, value));
        }
    }
    Ok(KeyValues { pairs })
}

impl KeyValues {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.pairs.retain(|(k, _)| k != key);
        self.pairs.push((key.to_string(), value.into()));
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|(k, _)| k.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_number(key, v)).transpose()
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        self.get_f64(key)?
            .ok_or_else(|| Error::Parse(format!("missing key `{key}`")))
    }

    pub fn get_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|item| parse_number(key, item.trim()))
                    .collect()
            })
            .transpose()
    }
}

fn parse_number(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("`{key}`: `{value}` is not a number")))
}

impl DistributionModel {
    /// Builds a model from the model keys of a parsed config; other keys
    /// are ignored.
    pub fn from_config(kv: &KeyValues) -> Result<Self> {
        let kind = kv
            .get("kind")
            .ok_or_else(|| Error::Parse("missing key `kind`".into()))?
            .to_ascii_lowercase();
        match kind.as_str() {
            "uniform" => Ok(DistributionModel::Uniform),
            "beta" => {
                let alpha = kv.require_f64("alpha")?;
                let beta = kv.get_f64("beta")?.unwrap_or(alpha);
                DistributionModel::beta(alpha, beta)
            }
            "trapezoid" | "trapezoidal" => match kv.get_f64("delta")? {
                Some(delta) => DistributionModel::symmetric_trapezoid(delta),
                None => DistributionModel::trapezoidal(kv.require_f64("c")?, kv.require_f64("d")?),
            },
            "piecewise" | "piecewise-constant" | "piecewise_constant" => {
                let bps = kv
                    .get_list("breakpoints")?
                    .ok_or_else(|| Error::Parse("missing key `breakpoints`".into()))?;
                let ds = kv
                    .get_list("densities")?
                    .ok_or_else(|| Error::Parse("missing key `densities`".into()))?;
                PiecewiseConstant::new(bps, ds).map(DistributionModel::PiecewiseConstant)
            }
            other => Err(Error::Parse(format!("unknown distribution kind `{other}`"))),
        }
    }
}

impl FromStr for DistributionModel {
    type Err = Error;

    /// Parses a fragment; unlike [`DistributionModel::from_config`], unknown
    /// keys are rejected.
    fn from_str(s: &str) -> Result<Self> {
        let kv = parse_key_values(s)?;
        if let Some(bad) = kv.keys().find(|k| !MODEL_KEYS.contains(k)) {
            return Err(Error::Parse(format!("unknown key `{bad}`")));
        }
        DistributionModel::from_config(&kv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let m: DistributionModel = "kind=uniform".parse().unwrap();
        assert!(matches!(m, DistributionModel::Uniform));

        let m: DistributionModel = "kind=beta; alpha=2; beta=3".parse().unwrap();
        match m {
            DistributionModel::Beta(b) => assert_eq!((b.alpha(), b.beta()), (2.0, 3.0)),
            other => panic!("{other}"),
        }

        let m: DistributionModel = "kind=beta\nalpha=0.5".parse().unwrap();
        assert!(m.is_symmetric(0.0));

        let m: DistributionModel = "kind=trapezoid;delta=0.25".parse().unwrap();
        match m {
            DistributionModel::Trapezoidal(t) => assert_eq!((t.c(), t.d()), (0.25, 0.75)),
            other => panic!("{other}"),
        }

        let m: DistributionModel = "kind=trapezoidal;c=0.1;d=0.35".parse().unwrap();
        assert!(!m.is_symmetric(1e-9));

        let m: DistributionModel =
            "# two steps\nkind=piecewise\nbreakpoints=0, 0.5, 1\ndensities=0.5,1.5"
                .parse()
                .unwrap();
        assert_eq!(m.cdf(0.5).unwrap(), 0.25);
    }

    #[test]
    fn rejects_malformed_fragments() {
        assert!("alpha=2".parse::<DistributionModel>().is_err());
        assert!("kind=gamma".parse::<DistributionModel>().is_err());
        assert!("kind=beta;alpha=x".parse::<DistributionModel>().is_err());
        assert!("kind=beta;alpha=2;gamma=1"
            .parse::<DistributionModel>()
            .is_err());
        assert!("kind=beta alpha=2".parse::<DistributionModel>().is_err());
        assert!("kind=piecewise;breakpoints=0,1"
            .parse::<DistributionModel>()
            .is_err());
        assert!(matches!(
            "kind=beta;alpha=-1".parse::<DistributionModel>(),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn later_keys_override_earlier_ones() {
        let mut kv = parse_key_values("a=1\nb=2;a=3").unwrap();
        assert_eq!(kv.get("a"), Some("3"));
        kv.set("b", "4");
        assert_eq!(kv.get_f64("b").unwrap(), Some(4.0));
        assert_eq!(kv.get_list("a").unwrap(), Some(vec![3.0]));
    }
}
