//! Run configuration: a plain `key = value` file whose entries can be
//! overridden by command-line flags.
//!
//! ```text
//! # two files and one synthetic path
//! input = data/bund.csv
//! label = BUND
//! input = data/dax.csv
//! label = DAX
//! input = fbm:0.5:131072
//! series_kind = volatility_log
//! vol_windows = 660,1320
//! ma_windows = 5:1500:5
//! ```
//!
//! `input` and `label` are paired by position. Sources are file paths,
//! `fbm:<hurst>:<length>` or `garch:<omega>:<alpha>:<beta>:<length>`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::{MeanDenominator, ReturnKind, PAPER_VOL_WINDOWS};

/// Moving-average sweep used when `ma_windows = paper`.
pub const PAPER_MA_SWEEP: (usize, usize, usize) = (5, 1500, 5);

pub const DEFAULT_OUTPUT_DIR: &str = "macent-out";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InputSource {
    File {
        path: PathBuf,
    },
    Fbm {
        hurst: f64,
        length: usize,
    },
    Garch {
        omega: f64,
        alpha: f64,
        beta: f64,
        length: usize,
    },
}

impl InputSource {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let fields: Vec<&str> = s.split(':').collect();
        let num = |v: &str| -> Result<f64> {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("bad number {v:?} in input {s:?}")))
        };
        let int = |v: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("bad integer {v:?} in input {s:?}")))
        };
        match fields.as_slice() {
            ["fbm", h, n] => Ok(InputSource::Fbm {
                hurst: num(h)?,
                length: int(n)?,
            }),
            ["garch", o, a, b, n] => Ok(InputSource::Garch {
                omega: num(o)?,
                alpha: num(a)?,
                beta: num(b)?,
                length: int(n)?,
            }),
            ["fbm", ..] | ["garch", ..] => Err(Error::InvalidConfig(format!(
                "malformed synthetic input {s:?}"
            ))),
            _ if s.is_empty() => Err(Error::InvalidConfig("empty input".into())),
            _ => Ok(InputSource::File {
                path: PathBuf::from(s),
            }),
        }
    }

    fn default_label(&self, index: usize) -> String {
        match self {
            InputSource::File { path } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| format!("series{index}")),
            InputSource::Fbm { .. } => format!("fbm{index}"),
            InputSource::Garch { .. } => format!("garch{index}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputSpec {
    pub source: InputSource,
    pub label: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Price,
    VolatilityLinear,
    VolatilityLog,
}

impl SeriesKind {
    pub fn return_kind(self) -> ReturnKind {
        match self {
            SeriesKind::VolatilityLinear => ReturnKind::Linear,
            SeriesKind::Price | SeriesKind::VolatilityLog => ReturnKind::Logarithmic,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub inputs: Vec<InputSpec>,
    pub series_kind: SeriesKind,
    pub horizon: usize,
    pub vol_windows: Vec<usize>,
    pub ma_windows: Vec<usize>,
    pub n_min: usize,
    pub n_max: usize,
    pub risk_free_rate: f64,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub mean_denominator: MeanDenominator,
    pub price_column: String,
    pub delimiter: char,
    pub has_header: bool,
    /// Fixed power-law fit range; `None` uses `[2, n/2]` per window.
    pub power_law_range: Option<(usize, usize)>,
    /// Synthetic paths become prices `base_price · exp(price_sigma · x)`.
    pub base_price: f64,
    pub price_sigma: f64,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Combines file entries with flag entries. A flag replaces every file entry
/// with the same key, so `--ma-window` on the command line drops the file's
/// `ma_windows` list instead of extending it.
pub fn merge_entries(
    file: Vec<(String, String)>,
    flags: Vec<(String, String)>,
) -> Vec<(String, String)> {
    let mut merged: Vec<(String, String)> = file
        .into_iter()
        .filter(|(k, _)| !flags.iter().any(|(fk, _)| fk == k))
        .collect();
    merged.extend(flags);
    merged
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: {v:?} is not a non-negative integer")))
}

/// Window list: comma-separated integers, `start:end:step` ranges, or `paper`.
pub fn parse_windows(key: &str, v: &str, paper: &[usize]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "paper" {
            out.extend_from_slice(paper);
            continue;
        }
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [single] => out.push(parse_usize(key, single)?),
            [a, b] | [a, b, _] => {
                let (start, end) = (parse_usize(key, a)?, parse_usize(key, b)?);
                let step = if fields.len() == 3 {
                    parse_usize(key, fields[2])?
                } else {
                    1
                };
                if step == 0 || start > end {
                    return Err(Error::InvalidConfig(format!("{key}: bad range {part:?}")));
                }
                out.extend((start..=end).step_by(step));
            }
            _ => return Err(Error::InvalidConfig(format!("{key}: bad range {part:?}"))),
        }
    }
    Ok(out)
}

fn paper_ma_windows() -> Vec<usize> {
    let (a, b, s) = PAPER_MA_SWEEP;
    (a..=b).step_by(s).collect()
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::FileUnreadable {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_entries(&parse_entries(&text)?)
    }

    pub fn from_entries(entries: &[(String, String)]) -> Result<Self> {
        let mut sources = Vec::new();
        let mut labels = Vec::new();
        let mut vol_windows = Vec::new();
        let mut ma_windows = Vec::new();
        let mut cfg = RunConfig {
            inputs: Vec::new(),
            series_kind: SeriesKind::Price,
            horizon: 1,
            vol_windows: Vec::new(),
            ma_windows: Vec::new(),
            n_min: 0,
            n_max: 0,
            risk_free_rate: 0.0,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            seed: 0,
            mean_denominator: MeanDenominator::Paper,
            price_column: "price".into(),
            delimiter: ',',
            has_header: true,
            power_law_range: None,
            base_price: 100.0,
            price_sigma: 1e-3,
        };
        let (mut n_min, mut n_max) = (None, None);
        for (key, v) in entries {
            let bad = |what: &str| Error::InvalidConfig(format!("{key}: {v:?} is not {what}"));
            match key.as_str() {
                "input" => sources.push(InputSource::parse(v)?),
                "label" => labels.push(v.clone()),
                "series_kind" => {
                    cfg.series_kind = match v.as_str() {
                        "price" => SeriesKind::Price,
                        "volatility_linear" => SeriesKind::VolatilityLinear,
                        "volatility_log" => SeriesKind::VolatilityLog,
                        _ => return Err(bad("price, volatility_linear or volatility_log")),
                    }
                }
                "horizon" => cfg.horizon = parse_usize(key, v)?,
                "vol_windows" => vol_windows.extend(parse_windows(key, v, &PAPER_VOL_WINDOWS)?),
                "ma_windows" => ma_windows.extend(parse_windows(key, v, &paper_ma_windows())?),
                "n_min" => n_min = Some(parse_usize(key, v)?),
                "n_max" => n_max = Some(parse_usize(key, v)?),
                "risk_free_rate" => cfg.risk_free_rate = v.parse().map_err(|_| bad("a number"))?,
                "output_dir" => cfg.output_dir = PathBuf::from(v),
                "seed" => cfg.seed = v.parse().map_err(|_| bad("an unsigned integer"))?,
                "mean_denominator" => {
                    cfg.mean_denominator = match v.as_str() {
                        "paper" => MeanDenominator::Paper,
                        "standard" => MeanDenominator::Standard,
                        _ => return Err(bad("paper or standard")),
                    }
                }
                "price_column" => cfg.price_column = v.clone(),
                "delimiter" => {
                    cfg.delimiter = match v.as_str() {
                        "tab" | "\\t" => '\t',
                        s if s.chars().count() == 1 && s.is_ascii() => {
                            s.chars().next().unwrap_or(',')
                        }
                        _ => return Err(bad("a single ASCII character or 'tab'")),
                    }
                }
                "header" => cfg.has_header = v.parse().map_err(|_| bad("true or false"))?,
                "power_law_range" => {
                    let (a, b) = v.split_once(':').ok_or_else(|| bad("lo:hi"))?;
                    cfg.power_law_range = Some((parse_usize(key, a)?, parse_usize(key, b)?));
                }
                "base_price" => cfg.base_price = v.parse().map_err(|_| bad("a number"))?,
                "price_sigma" => cfg.price_sigma = v.parse().map_err(|_| bad("a number"))?,
                _ => return Err(Error::InvalidConfig(format!("unknown key {key:?}"))),
            }
        }
        if labels.len() > sources.len() {
            return Err(Error::InvalidConfig("more labels than inputs".into()));
        }
        cfg.inputs = sources
            .into_iter()
            .enumerate()
            .map(|(i, source)| InputSpec {
                label: labels
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| source.default_label(i)),
                source,
            })
            .collect();
        if ma_windows.is_empty() {
            ma_windows = vec![30, 50, 100, 150, 200];
        }
        ma_windows.sort_unstable();
        ma_windows.dedup();
        vol_windows.sort_unstable();
        vol_windows.dedup();
        if vol_windows.is_empty() && cfg.series_kind != SeriesKind::Price {
            vol_windows.push(660);
        }
        cfg.n_min = n_min.unwrap_or(ma_windows[0]);
        cfg.n_max = n_max.unwrap_or(ma_windows[ma_windows.len() - 1]);
        cfg.ma_windows = ma_windows;
        cfg.vol_windows = vol_windows;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidConfig(m));
        if self.inputs.is_empty() {
            return fail("no inputs".into());
        }
        let mut labels: Vec<&str> = self.inputs.iter().map(|i| i.label.as_str()).collect();
        if labels
            .iter()
            .any(|l| l.is_empty() || l.contains(['/', '\\']) || *l == "." || *l == "..")
        {
            return fail("labels must be non-empty and usable as directory names".into());
        }
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return fail("duplicate labels".into());
        }
        if self.horizon == 0 {
            return fail("horizon must be at least 1".into());
        }
        if self.ma_windows.is_empty() || self.ma_windows[0] < 2 {
            return fail("moving-average windows must be at least 2".into());
        }
        if self.series_kind != SeriesKind::Price
            && (self.vol_windows.is_empty() || self.vol_windows[0] < 2)
        {
            return fail("volatility windows must be at least 2".into());
        }
        if self.n_min > self.n_max {
            return fail(format!("n_min {} exceeds n_max {}", self.n_min, self.n_max));
        }
        if !self.risk_free_rate.is_finite() || !(self.base_price > 0.0) || !(self.price_sigma > 0.0)
        {
            return fail(
                "risk_free_rate, base_price and price_sigma must be finite, prices positive".into(),
            );
        }
        if let Some((lo, hi)) = self.power_law_range {
            if lo >= hi {
                return fail("power_law_range needs lo < hi".into());
            }
        }
        if !self.delimiter.is_ascii() {
            return fail("delimiter must be ASCII".into());
        }
        Ok(())
    }
}
