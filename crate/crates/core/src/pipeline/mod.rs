//! End-to-end run: ingest → returns and volatility → moving-average sweep →
//! entropy curves → `H_MIX` → MIX and weights → Sharpe baseline.
//!
//! Output layout under the output directory:
//!
//! ```text
//! <label>/T<T>/n<n>/distribution.tsv   tau, count, P
//! <label>/T<T>/n<n>/entropy.tsv        tau, count, P, S
//! <label>/T<T>/n<n>/summary.json       scalar entropy and fits
//! <label>/T<T>/hmix.tsv                n, hmix, tau_max, shannon, clusters
//! mix_T<T>.json                        MixReport across series
//! weights_T<T>.tsv                     MIX weights next to Sharpe weights
//! sharpe.json                          SharpeSolution
//! manifest.json                        parameters, decision modes, digests
//! ```
//!
//! `T0` stands for the price series themselves. Everything is written to
//! `<out>/.partial` first and moved into place only after the whole run
//! succeeded; a failed run leaves no partial outputs behind.

pub mod config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use config::{InputSource, InputSpec, RunConfig, SeriesKind};

use crate::entropy::{
    default_power_law_range, duration_distribution, entropy_curve, fit_entropy_model,
    fit_power_law, DurationDistribution, EntropyCurve, EntropyModelFit, PowerLawFit,
};
use crate::error::{Error, Result};
use crate::heterogeneity::{
    hmix, mix_report, HMixCurve, MixReport, INTEGRATION_METHOD, WEIGHT_BASIS,
};
use crate::ingest::{load_series, truncate_to_common_length, ColumnRef, ColumnSpec, PriceSeries};
use crate::partition::detect_clusters;
use crate::portfolio::{maximize_sharpe, panel_stats, AssetPanel, SharpeSolution};
use crate::preprocess::{returns, rolling_volatility_values, MeanDenominator, ReturnKind};
use crate::synthetic::{generate_fbm, generate_garch_prices, geometric_prices, FbmSpec, GarchSpec};

const STAGING: &str = ".partial";
const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Behavioural choices that shape every number in the outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionModes {
    pub mean_denominator: MeanDenominator,
    pub moving_average: String,
    pub tie_rule: String,
    pub censoring: String,
    pub tau_integration: String,
    pub window_integration: String,
    pub tau_max: String,
    pub weight_basis: String,
    pub gap_handling: String,
    pub sharpe_returns: ReturnKind,
    pub synthetic_prices: String,
}

impl DecisionModes {
    fn for_config(config: &RunConfig) -> Self {
        Self {
            mean_denominator: config.mean_denominator,
            moving_average: "trailing window of n samples ending at t".into(),
            tie_rule: "touches fold into the preceding sign-run; leading touches skipped".into(),
            censoring: "samples before the first and after the last crossing discarded".into(),
            tau_integration: format!("{INTEGRATION_METHOD} over observed durations"),
            window_integration: format!(
                "{INTEGRATION_METHOD} over the moving-average grid in [n_min, n_max]"
            ),
            tau_max: "largest observed duration per series and window".into(),
            weight_basis: WEIGHT_BASIS.into(),
            gap_handling: "rows concatenated in file order".into(),
            sharpe_returns: config.series_kind.return_kind(),
            synthetic_prices: format!("{} * exp({} * path)", config.base_price, config.price_sigma),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub modes: DecisionModes,
    pub files: Vec<FileDigest>,
    /// SHA-256 over every listed file path and content digest.
    pub digest: String,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub digest: String,
    pub files: Vec<FileDigest>,
    /// MIX report per volatility window (`0` for prices).
    pub mix_reports: Vec<(usize, MixReport<f64>)>,
    pub sharpe: SharpeSolution<f64>,
}

#[derive(Serialize)]
struct JobSummary<'a> {
    label: &'a str,
    vol_window: usize,
    window: usize,
    clusters: usize,
    support_size: usize,
    tau_max: usize,
    shannon: f64,
    hmix: f64,
    power_law: Option<PowerLawFit<f64>>,
    entropy_model: Option<EntropyModelFit<f64>>,
}

/// One analysed sequence: a price series or one of its volatility series.
struct Group {
    label: String,
    vol_window: usize,
    values: Vec<f64>,
}

struct JobOutput {
    group: usize,
    curve: EntropyCurve<f64>,
    clusters: usize,
}

fn column_spec(config: &RunConfig) -> ColumnSpec {
    ColumnSpec {
        price: ColumnRef::parse(&config.price_column),
        timestamp: None,
        delimiter: config.delimiter as u8,
        has_header: config.has_header,
    }
}

/// Loads every input (files or synthetic) and truncates to the common length.
/// The `i`-th synthetic input is seeded with `seed + i`.
pub fn load_inputs(config: &RunConfig) -> Result<Vec<PriceSeries<f64>>> {
    let spec = column_spec(config);
    let loaded = config
        .inputs
        .iter()
        .enumerate()
        .map(|(i, input)| {
            let seed = config.seed.wrapping_add(i as u64);
            match &input.source {
                InputSource::File { path } => load_series(path, &input.label, &spec),
                InputSource::Fbm { hurst, length } => {
                    let path: Vec<f64> = generate_fbm(&FbmSpec::new(*hurst, *length, seed)?)?;
                    PriceSeries::new(
                        &input.label,
                        geometric_prices(&path, config.base_price, config.price_sigma),
                    )
                }
                InputSource::Garch {
                    omega,
                    alpha,
                    beta,
                    length,
                } => {
                    let spec = GarchSpec {
                        omega: *omega,
                        alpha: *alpha,
                        beta: *beta,
                        length: *length,
                        seed,
                    };
                    PriceSeries::new(
                        &input.label,
                        generate_garch_prices(&spec, config.base_price)?,
                    )
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    truncate_to_common_length(&loaded)
}

fn build_groups(config: &RunConfig, prices: &[PriceSeries<f64>]) -> Result<Vec<Group>> {
    let mut groups = Vec::new();
    for series in prices {
        if config.series_kind == SeriesKind::Price {
            groups.push(Group {
                label: series.label.clone(),
                vol_window: 0,
                values: series.values().to_vec(),
            });
            continue;
        }
        let r = returns(series, config.series_kind.return_kind(), config.horizon)?;
        for &window in &config.vol_windows {
            groups.push(Group {
                label: series.label.clone(),
                vol_window: window,
                values: rolling_volatility_values(&r.values, window, config.mean_denominator)?,
            });
        }
    }
    Ok(groups)
}

fn group_dir(label: &str, vol_window: usize) -> String {
    format!("{label}/T{vol_window}")
}

fn distribution_tsv(dist: &DurationDistribution<f64>) -> String {
    let mut s = String::from("tau\tcount\tP\n");
    for ((t, c), p) in dist
        .support
        .iter()
        .zip(&dist.counts)
        .zip(&dist.probabilities)
    {
        let _ = writeln!(s, "{t}\t{c}\t{p}");
    }
    s
}

fn entropy_tsv(dist: &DurationDistribution<f64>, curve: &EntropyCurve<f64>) -> String {
    let mut s = String::from("tau\tcount\tP\tS\n");
    for (i, t) in dist.support.iter().enumerate() {
        let _ = writeln!(
            s,
            "{t}\t{}\t{}\t{}",
            dist.counts[i], dist.probabilities[i], curve.values[i]
        );
    }
    s
}

fn hmix_tsv(curve: &HMixCurve<f64>, shannon: &[f64], clusters: &[usize]) -> String {
    let mut s = String::from("n\thmix\ttau_max\tshannon\tclusters\n");
    for i in 0..curve.windows.len() {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}",
            curve.windows[i], curve.values[i], curve.tau_max[i], shannon[i], clusters[i]
        );
    }
    s
}

/// Reads an `H_MIX` table written by [`run_pipeline`].
pub fn read_hmix_tsv(path: &Path, label: &str) -> Result<HMixCurve<f64>> {
    let text = fs::read_to_string(path).map_err(|source| Error::FileUnreadable {
        path: path.to_path_buf(),
        source,
    })?;
    let mut curve = HMixCurve {
        label: label.to_string(),
        windows: Vec::new(),
        values: Vec::new(),
        tau_max: Vec::new(),
    };
    for (i, line) in text.lines().enumerate().skip(1) {
        let fields: Vec<&str> = line.split('\t').collect();
        let bad = || Error::ParseFailure {
            row: i,
            message: format!("malformed hmix row {line:?}"),
        };
        if fields.len() < 3 {
            return Err(bad());
        }
        curve.windows.push(fields[0].parse().map_err(|_| bad())?);
        curve.values.push(fields[1].parse().map_err(|_| bad())?);
        curve.tau_max.push(fields[2].parse().map_err(|_| bad())?);
    }
    if curve.windows.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::ParseFailure {
            row: 0,
            message: "windows must be strictly increasing".into(),
        });
    }
    Ok(curve)
}

/// Sharpe-optimal long-only weights over the return series of `prices`.
pub fn sharpe_from_prices(
    prices: &[PriceSeries<f64>],
    kind: ReturnKind,
    horizon: usize,
    risk_free_rate: f64,
) -> Result<SharpeSolution<f64>> {
    let columns = prices
        .iter()
        .map(|p| returns(p, kind, horizon).map(|r| r.values))
        .collect::<Result<Vec<_>>>()?;
    let panel =
        AssetPanel::from_columns(prices.iter().map(|p| p.label.clone()).collect(), &columns)?;
    maximize_sharpe(&panel_stats(&panel)?, risk_free_rate)
}

struct Staging {
    root: PathBuf,
}

impl Staging {
    fn create(output_dir: &Path) -> Result<Self> {
        let root = output_dir.join(STAGING);
        if root.exists() {
            fs::remove_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        }
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(Self { root })
    }

    fn write(&self, rel: &str, contents: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))
    }

    fn write_json<S: Serialize>(&self, rel: &str, value: &S) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(rel, text.as_bytes())
    }

    /// Moves every staged top-level entry into the output directory.
    fn commit(self, output_dir: &Path) -> Result<()> {
        let entries = fs::read_dir(&self.root).map_err(|e| Error::io(&self.root, e))?;
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(&self.root, e))?;
            let target = output_dir.join(entry.file_name());
            if target.is_dir() {
                fs::remove_dir_all(&target).map_err(|e| Error::io(&target, e))?;
            } else if target.exists() {
                fs::remove_file(&target).map_err(|e| Error::io(&target, e))?;
            }
            fs::rename(entry.path(), &target).map_err(|e| Error::io(&target, e))?;
        }
        fs::remove_dir(&self.root).map_err(|e| Error::io(&self.root, e))
    }

    fn discard(self) {
        let _ = fs::remove_dir_all(&self.root);
    }
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            if path.file_name().is_some_and(|n| n == STAGING) {
                continue;
            }
            collect_files(root, &path, out)?;
        } else {
            out.push(
                path.strip_prefix(root)
                    .expect("walk stays under root")
                    .to_path_buf(),
            );
        }
    }
    Ok(())
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digests of every file under `root` except the manifest, sorted by path.
pub fn digest_tree(root: &Path) -> Result<(Vec<FileDigest>, String)> {
    let mut paths = Vec::new();
    collect_files(root, root, &mut paths)?;
    let mut files: Vec<FileDigest> = paths
        .into_iter()
        .filter(|p| p != Path::new(MANIFEST))
        .map(|rel| {
            let full = root.join(&rel);
            let bytes = fs::read(&full).map_err(|e| Error::io(&full, e))?;
            let path = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/");
            Ok(FileDigest {
                path,
                sha256: sha256_hex(&bytes),
            })
        })
        .collect::<Result<_>>()?;
    files.sort_by(|a, b| a.path.cmp(&b.path));
    let mut hasher = Sha256::new();
    for f in &files {
        hasher.update(f.path.as_bytes());
        hasher.update([0]);
        hasher.update(f.sha256.as_bytes());
        hasher.update(b"\n");
    }
    Ok((files, hex::encode(hasher.finalize())))
}

/// Re-hashes an output directory and checks it against its manifest.
pub fn verify_output(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let text =
        fs::read_to_string(&path).map_err(|source| Error::FileUnreadable { path, source })?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let (files, digest) = digest_tree(dir)?;
    if files != manifest.files || digest != manifest.digest {
        return Err(Error::CorruptOutput(format!(
            "digest {digest} differs from recorded {}",
            manifest.digest
        )));
    }
    Ok(manifest)
}

pub fn run_pipeline(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let output_dir = config.output_dir.clone();
    fs::create_dir_all(&output_dir).map_err(|e| Error::io(&output_dir, e))?;
    let staging = Staging::create(&output_dir)?;
    match execute(config, &staging) {
        Ok((mix_reports, sharpe)) => {
            let (files, digest) = digest_tree(&staging.root)?;
            let manifest = Manifest {
                tool: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                config: config.clone(),
                modes: DecisionModes::for_config(config),
                files: files.clone(),
                digest: digest.clone(),
            };
            staging.write_json(MANIFEST, &manifest)?;
            staging.commit(&output_dir)?;
            Ok(RunSummary {
                output_dir,
                digest,
                files,
                mix_reports,
                sharpe,
            })
        }
        Err(e) => {
            staging.discard();
            Err(e)
        }
    }
}

type Reports = (Vec<(usize, MixReport<f64>)>, SharpeSolution<f64>);

fn execute(config: &RunConfig, staging: &Staging) -> Result<Reports> {
    let prices = load_inputs(config)?;
    let groups = build_groups(config, &prices)?;

    let jobs: Vec<(usize, usize)> = (0..groups.len())
        .flat_map(|g| config.ma_windows.iter().map(move |&n| (g, n)))
        .collect();
    let outputs = jobs
        .par_iter()
        .map(|&(g, n)| run_job(config, staging, g, &groups[g], n))
        .collect::<Result<Vec<JobOutput>>>()?;

    let mut by_group: BTreeMap<usize, Vec<&JobOutput>> = BTreeMap::new();
    for out in &outputs {
        by_group.entry(out.group).or_default().push(out);
    }
    let mut by_window: BTreeMap<usize, Vec<HMixCurve<f64>>> = BTreeMap::new();
    for (g, outs) in by_group {
        let group = &groups[g];
        let curves: Vec<EntropyCurve<f64>> = outs.iter().map(|o| o.curve.clone()).collect();
        let hcurve = HMixCurve::from_curves(&group.label, &curves)?;
        let shannon: Vec<f64> = outs.iter().map(|o| o.curve.shannon).collect();
        let clusters: Vec<usize> = outs.iter().map(|o| o.clusters).collect();
        staging.write(
            &format!("{}/hmix.tsv", group_dir(&group.label, group.vol_window)),
            hmix_tsv(&hcurve, &shannon, &clusters).as_bytes(),
        )?;
        by_window.entry(group.vol_window).or_default().push(hcurve);
    }

    let sharpe = sharpe_from_prices(
        &prices,
        config.series_kind.return_kind(),
        config.horizon,
        config.risk_free_rate,
    )?;
    staging.write_json("sharpe.json", &sharpe)?;

    let mut reports = Vec::new();
    for (window, curves) in by_window {
        let report = mix_report(&curves, config.n_min, config.n_max)?;
        staging.write_json(&format!("mix_T{window}.json"), &report)?;
        let mut table = String::from("label\traw_mix\trescaled_mix\tmix_weight\tsharpe_weight\n");
        for (i, label) in report.labels.iter().enumerate() {
            let _ = writeln!(
                table,
                "{label}\t{}\t{}\t{}\t{}",
                report.raw_mix[i], report.rescaled_mix[i], report.weights[i], sharpe.weights[i]
            );
        }
        staging.write(&format!("weights_T{window}.tsv"), table.as_bytes())?;
        reports.push((window, report));
    }
    Ok((reports, sharpe))
}

fn run_job(
    config: &RunConfig,
    staging: &Staging,
    g: usize,
    group: &Group,
    n: usize,
) -> Result<JobOutput> {
    let partition = detect_clusters(&group.values, n)?;
    let dist = duration_distribution::<f64>(&partition)?;
    let curve = entropy_curve(&dist);
    let range = config
        .power_law_range
        .unwrap_or_else(|| default_power_law_range(n));
    let summary = JobSummary {
        label: &group.label,
        vol_window: group.vol_window,
        window: n,
        clusters: partition.durations.len(),
        support_size: dist.support.len(),
        tau_max: dist.tau_max(),
        shannon: curve.shannon,
        hmix: hmix(&curve)?,
        power_law: fit_power_law(&dist, range).ok(),
        entropy_model: fit_entropy_model(&curve).ok(),
    };
    let dir = format!("{}/n{n}", group_dir(&group.label, group.vol_window));
    staging.write(
        &format!("{dir}/distribution.tsv"),
        distribution_tsv(&dist).as_bytes(),
    )?;
    staging.write(
        &format!("{dir}/entropy.tsv"),
        entropy_tsv(&dist, &curve).as_bytes(),
    )?;
    staging.write_json(&format!("{dir}/summary.json"), &summary)?;
    Ok(JobOutput {
        group: g,
        clusters: partition.durations.len(),
        curve,
    })
}
