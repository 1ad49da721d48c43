use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

const KEYS: [&str; 14] = [
    "q", "p", "alpha", "lower", "points", "f", "derivative", "tol", "max_terms", "output", "format",
    "suite", "lambda", "integrand",
];

/// Values read from a `--config` file. Empty when no file was given.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config file {}", path.display()))
    }

    /// `key = value` lines; `#` starts a comment; dashes in keys count as
    /// underscores.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", n + 1))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key '{key}'", n + 1);
            }
            let key = if key == "integrand" { "f".to_string() } else { key };
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("line {}: duplicate key '{key}'", n + 1);
            }
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag if given, otherwise the config value, otherwise `default`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(self.pick_opt(flag, key)?.unwrap_or(default))
    }

    pub fn pick_opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|e| anyhow!("config key '{key}': cannot parse '{s}': {e}")),
        }
    }

    /// A boolean switch: set by the flag or by `key = true` in the file.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        self.pick(None, key, false)
    }
}

/// A comma list `a,b,c` or a geometric range `start:stop:count`.
pub fn parse_points(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let points = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
        let [start, stop, count] = parts[..] else {
            bail!("point range must be start:stop:count, got '{spec}'");
        };
        let start: f64 = parse_num(start)?;
        let stop: f64 = parse_num(stop)?;
        let count: usize = count
            .parse()
            .map_err(|_| anyhow!("point count must be a positive integer, got '{count}'"))?;
        if count == 0 {
            bail!("point count must be at least 1");
        }
        if !(start > 0.0 && stop > 0.0) {
            bail!("geometric point range needs positive endpoints, got {start}:{stop}");
        }
        if count == 1 {
            vec![start]
        } else {
            let ratio = (stop / start).ln() / (count - 1) as f64;
            (0..count)
                .map(|i| if i == count - 1 { stop } else { start * (ratio * i as f64).exp() })
                .collect()
        }
    } else {
        spec.split(',').map(|s| parse_num(s.trim())).collect::<Result<Vec<_>>>()?
    };
    if points.is_empty() {
        bail!("no evaluation points given");
    }
    if let Some(bad) = points.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        bail!("evaluation points must be positive, got {bad}");
    }
    Ok(points)
}

/// Comma-separated reals.
pub fn parse_list(spec: &str) -> Result<Vec<f64>> {
    spec.split(',').map(|s| parse_num(s.trim())).collect()
}

fn parse_num(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| anyhow!("'{s}' is not a number"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_config_lines() {
        let c = ConfigFile::parse("# comment\nq = 0.3\nmax-terms=500 # trailing\n\nintegrand = t^2\n").unwrap();
        assert_eq!(c.raw("q"), Some("0.3"));
        assert_eq!(c.raw("max_terms"), Some("500"));
        assert_eq!(c.raw("f"), Some("t^2"));
        assert_eq!(c.pick(Some(0.9), "q", 0.5).unwrap(), 0.9);
        assert_eq!(c.pick(None, "q", 0.5).unwrap(), 0.3);
        assert_eq!(c.pick(None, "alpha", 1.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(ConfigFile::parse("nonsense\n").is_err());
        assert!(ConfigFile::parse("colour = red\n").is_err());
        assert!(ConfigFile::parse("q = 1\nq = 2\n").is_err());
        let c = ConfigFile::parse("q = abc\n").unwrap();
        assert!(c.pick(None::<f64>, "q", 0.5).is_err());
    }

    #[test]
    fn point_lists_and_ranges() {
        assert_eq!(parse_points("1").unwrap(), vec![1.0]);
        assert_eq!(parse_points("0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        let r = parse_points("0.25:4:5").unwrap();
        assert_eq!(r.len(), 5);
        assert_eq!(r[0], 0.25);
        assert_eq!(r[4], 4.0);
        assert!((r[2] - 1.0).abs() < 1e-15);
        assert_eq!(parse_points("2:8:1").unwrap(), vec![2.0]);
        assert!(parse_points("").is_err());
        assert!(parse_points("1,-2").is_err());
        assert!(parse_points("0:1:3").is_err());
        assert!(parse_points("1:2").is_err());
        assert!(parse_points("1:2:0").is_err());
    }
}
