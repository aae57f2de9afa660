//! INI configuration with one section per subcommand plus `[common]`.
//!
//! Lookups try the subcommand's section first, then `[common]`; command-line
//! flags override both.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use ini::Ini;

pub const OUT_ENV: &str = "LFPP_LAB_OUT";
pub const DEFAULT_OUT: &str = "lfpp-out";

#[derive(Debug, Clone, Default)]
pub struct Config {
    ini: Ini,
}

/// A number, or a constant expression such as `1/math::sqrt(6)`.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    evalexpr::eval_number(s).map_err(|e| anyhow!("'{s}' is not a number: {e}"))
}

/// Comma-separated numbers; expressions must not contain commas.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_number).collect()
}

pub fn parse_levels(s: &str) -> Result<Vec<u32>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        // `a-b` expands to the inclusive run of levels
        if let Some((a, b)) = part.split_once('-') {
            let (a, b): (u32, u32) = (a.trim().parse()?, b.trim().parse()?);
            if a > b {
                bail!("level range '{part}' is reversed");
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().with_context(|| format!("'{part}' is not a level"))?);
        }
    }
    Ok(out)
}

/// `lo,hi`
pub fn parse_range(s: &str) -> Result<(f64, f64)> {
    match parse_list(s)?[..] {
        [lo, hi] => Ok((lo, hi)),
        _ => bail!("range '{s}' must be two comma-separated numbers"),
    }
}

pub fn parse_bool(s: &str) -> Result<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => bail!("'{other}' is not a boolean"),
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let ini = Ini::load_from_file(path).with_context(|| format!("reading config {}", path.display()))?;
        Ok(Config { ini })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(Config {
            ini: Ini::load_from_str(text)?,
        })
    }

    pub fn load_optional(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Config::default()), Config::load)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.ini
            .section(Some(section))
            .and_then(|p| p.get(key))
            .or_else(|| self.ini.section(Some("common")).and_then(|p| p.get(key)))
    }

    fn typed<T>(&self, section: &str, key: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Option<T>> {
        self.get(section, key)
            .map(|v| parse(v).with_context(|| format!("config [{section}] {key}")))
            .transpose()
    }

    pub fn number(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.typed(section, key, parse_number)
    }

    pub fn integer<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: std::error::Error + Send + Sync + 'static,
    {
        self.typed(section, key, |v| Ok(v.trim().parse::<T>()?))
    }

    pub fn list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.typed(section, key, parse_list)
    }

    pub fn levels(&self, section: &str, key: &str) -> Result<Option<Vec<u32>>> {
        self.typed(section, key, parse_levels)
    }

    pub fn range(&self, section: &str, key: &str) -> Result<Option<(f64, f64)>> {
        self.typed(section, key, parse_range)
    }

    pub fn flag(&self, section: &str, key: &str) -> Result<Option<bool>> {
        self.typed(section, key, parse_bool)
    }

    /// `(label, expression)` for every `previous_best*` key of `[plot]`, in file order.
    pub fn previous_best(&self) -> Vec<(String, String)> {
        let Some(p) = self.ini.section(Some("plot")) else {
            return Vec::new();
        };
        p.iter()
            .filter_map(|(k, v)| {
                let label = k.strip_prefix("previous_best")?;
                let label = match label.trim_start_matches(['_', '.']) {
                    "" => "previous best".to_string(),
                    suffix => format!("previous best ({suffix})"),
                };
                Some((label, v.to_string()))
            })
            .collect()
    }

    /// Flag, then config, then `LFPP_LAB_OUT`, then `./lfpp-out`.
    pub fn out_dir(&self, section: &str, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| self.get(section, "out").map(PathBuf::from))
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_lists() {
        assert_eq!(parse_number("0.25").unwrap(), 0.25);
        assert_eq!(parse_number("1/math::sqrt(6)").unwrap(), 1.0 / 6f64.sqrt());
        assert!(parse_number("abc").is_err());
        assert_eq!(parse_list("0, 0.5,1").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_list("").unwrap().is_empty());
        assert_eq!(parse_levels("5-7,9").unwrap(), vec![5, 6, 7, 9]);
        assert!(parse_levels("7-5").is_err());
        assert_eq!(parse_range("0,2").unwrap(), (0.0, 2.0));
        assert!(parse_range("0").is_err());
        assert!(parse_bool("maybe").is_err());
    }

    #[test]
    fn section_then_common() {
        let c = Config::parse(
            "[common]\nseed = 7\nworkers = 2\n[simulate]\nseed = 9\nxi = 0, 0.5\n[plot]\nprevious_best_lower = 2 + gamma\nprevious_best_upper = 3\n",
        )
        .unwrap();
        assert_eq!(c.integer::<u64>("simulate", "seed").unwrap(), Some(9));
        assert_eq!(c.integer::<u64>("bounds", "seed").unwrap(), Some(7));
        assert_eq!(c.integer::<usize>("simulate", "workers").unwrap(), Some(2));
        assert_eq!(c.list("simulate", "xi").unwrap(), Some(vec![0.0, 0.5]));
        assert_eq!(c.number("simulate", "missing").unwrap(), None);
        let pb = c.previous_best();
        assert_eq!(pb.len(), 2);
        assert_eq!(pb[0].0, "previous best (lower)");
        assert_eq!(pb[1].1, "3");
        assert!(Config::parse("[simulate]\nseed = x\n").unwrap().integer::<u64>("simulate", "seed").is_err());
    }
}
