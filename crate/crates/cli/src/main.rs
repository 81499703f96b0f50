use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use macent::ingest::{load_series, write_series, ColumnRef, ColumnSpec};
use macent::pipeline::config::{merge_entries, parse_entries};
use macent::pipeline::{read_hmix_tsv, run_pipeline, sharpe_from_prices, verify_output, RunConfig};
use macent::preprocess::ReturnKind;
use macent::synthetic::{
    generate_fbm, generate_garch_prices, geometric_prices, FbmSpec, GarchSpec,
};
use macent::{Error, PriceSeries, Result};

#[derive(Parser)]
#[command(
    name = "macent",
    version,
    about = "Moving-average cluster entropy of financial time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load price files and print a short description of each.
    IngestCheck(InputArgs),
    /// Generate a synthetic price series.
    #[command(subcommand)]
    Synth(Synth),
    /// Run the full analysis and write results to an output directory.
    Analyze(AnalyzeArgs),
    /// Compute MIX values and weights from hmix.tsv tables.
    Mix(MixArgs),
    /// Long-only maximum Sharpe portfolio over price files.
    Sharpe(SharpeArgs),
    /// Verify an output directory against its manifest and print the weights.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Price file (repeatable).
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    /// Label per input, in order; defaults to the file stem.
    #[arg(long = "label")]
    labels: Vec<String>,
    /// Price column by header name or zero-based index.
    #[arg(long, default_value = "price")]
    price_column: String,
    /// Field delimiter; "tab" for tab-separated files.
    #[arg(long, default_value = ",")]
    delimiter: String,
    #[arg(long)]
    no_header: bool,
}

impl InputArgs {
    fn column_spec(&self) -> Result<ColumnSpec> {
        let delimiter = match self.delimiter.as_str() {
            "tab" | "\\t" => b'\t',
            s if s.len() == 1 && s.is_ascii() => s.as_bytes()[0],
            s => {
                return Err(Error::InvalidConfig(format!(
                    "delimiter {s:?} is not a single ASCII character"
                )))
            }
        };
        Ok(ColumnSpec {
            price: ColumnRef::parse(&self.price_column),
            timestamp: None,
            delimiter,
            has_header: !self.no_header,
        })
    }

    fn load(&self) -> Result<Vec<PriceSeries>> {
        let spec = self.column_spec()?;
        self.inputs
            .iter()
            .enumerate()
            .map(|(i, path)| {
                let label = self.labels.get(i).cloned().unwrap_or_else(|| stem(path));
                load_series(path, &label, &spec)
            })
            .collect()
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".into())
}

#[derive(Subcommand)]
enum Synth {
    /// Geometric fractional Brownian motion prices.
    Fbm {
        #[arg(long)]
        hurst: f64,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100.0)]
        base_price: f64,
        #[arg(long, default_value_t = 1e-3)]
        sigma: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// GARCH(1,1) prices.
    Garch {
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100.0)]
        base_price: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Price,
    VolatilityLinear,
    VolatilityLog,
}

#[derive(Clone, Copy, ValueEnum)]
enum Returns {
    Linear,
    Log,
}

impl From<Returns> for ReturnKind {
    fn from(r: Returns) -> Self {
        match r {
            Returns::Linear => ReturnKind::Linear,
            Returns::Log => ReturnKind::Logarithmic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Denominator {
    Paper,
    Standard,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// key = value configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// File path, fbm:H:N or garch:omega:alpha:beta:N (repeatable).
    #[arg(long = "input")]
    inputs: Vec<String>,
    #[arg(long = "label")]
    labels: Vec<String>,
    #[arg(long, conflicts_with = "return_kind")]
    series_kind: Option<Kind>,
    /// Analyse rolling volatility of linear or log returns.
    #[arg(long, value_enum)]
    return_kind: Option<Returns>,
    /// Moving-average windows: list, lo:hi[:step] range or "paper" (repeatable).
    #[arg(long = "ma-window")]
    ma_windows: Vec<String>,
    /// Volatility windows: list, range or "paper" (repeatable).
    #[arg(long = "vol-window")]
    vol_windows: Vec<String>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    mean_denominator: Option<Denominator>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    risk_free_rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    price_column: Option<String>,
    #[arg(long)]
    delimiter: Option<String>,
    #[arg(long)]
    no_header: bool,
    /// Output directory.
    #[arg(long, env = "MACENT_OUTPUT_DIR")]
    out: Option<PathBuf>,
}

impl AnalyzeArgs {
    fn flag_entries(&self) -> Vec<(String, String)> {
        let mut e = Vec::new();
        let mut push = |k: &str, v: String| e.push((k.to_string(), v));
        for v in &self.inputs {
            push("input", v.clone());
        }
        for v in &self.labels {
            push("label", v.clone());
        }
        let kind = self.series_kind.or(self.return_kind.map(|r| match r {
            Returns::Linear => Kind::VolatilityLinear,
            Returns::Log => Kind::VolatilityLog,
        }));
        if let Some(k) = kind {
            let name = match k {
                Kind::Price => "price",
                Kind::VolatilityLinear => "volatility_linear",
                Kind::VolatilityLog => "volatility_log",
            };
            push("series_kind", name.into());
        }
        for v in &self.ma_windows {
            push("ma_windows", v.clone());
        }
        for v in &self.vol_windows {
            push("vol_windows", v.clone());
        }
        if let Some(v) = self.horizon {
            push("horizon", v.to_string());
        }
        if let Some(d) = self.mean_denominator {
            let name = match d {
                Denominator::Paper => "paper",
                Denominator::Standard => "standard",
            };
            push("mean_denominator", name.into());
        }
        if let Some(v) = self.n_min {
            push("n_min", v.to_string());
        }
        if let Some(v) = self.n_max {
            push("n_max", v.to_string());
        }
        if let Some(v) = self.risk_free_rate {
            push("risk_free_rate", v.to_string());
        }
        if let Some(v) = self.seed {
            push("seed", v.to_string());
        }
        if let Some(v) = &self.price_column {
            push("price_column", v.clone());
        }
        if let Some(v) = &self.delimiter {
            push("delimiter", v.clone());
        }
        if self.no_header {
            push("header", "false".into());
        }
        if let Some(v) = &self.out {
            push("output_dir", v.display().to_string());
        }
        e
    }
}

#[derive(Args)]
struct MixArgs {
    /// hmix.tsv table (repeatable); the label is the grandparent directory name.
    #[arg(long = "hmix", required = true)]
    tables: Vec<PathBuf>,
    #[arg(long)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
}

#[derive(Args)]
struct SharpeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.0)]
    risk_free_rate: f64,
    #[arg(long, value_enum, default_value = "log")]
    return_kind: Returns,
    #[arg(long, default_value_t = 1)]
    horizon: usize,
}

fn ingest_check(args: &InputArgs) -> Result<()> {
    println!("label\tlength\tmin\tmax\tfirst\tlast");
    for s in args.load()? {
        let v = s.values();
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "{}\t{}\t{min}\t{max}\t{}\t{}",
            s.label,
            v.len(),
            v[0],
            v[v.len() - 1]
        );
    }
    Ok(())
}

fn write_prices(out: &Path, series: &PriceSeries) -> Result<()> {
    let file = File::create(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    write_series(&mut w, series, b',')?;
    w.flush().map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })
}

fn synth(cmd: &Synth) -> Result<()> {
    let (out, prices) = match cmd {
        Synth::Fbm {
            hurst,
            length,
            seed,
            base_price,
            sigma,
            out,
        } => {
            let path: Vec<f64> = generate_fbm(&FbmSpec::new(*hurst, *length, *seed)?)?;
            (out, geometric_prices(&path, *base_price, *sigma))
        }
        Synth::Garch {
            omega,
            alpha,
            beta,
            length,
            seed,
            base_price,
            out,
        } => {
            let spec = GarchSpec {
                omega: *omega,
                alpha: *alpha,
                beta: *beta,
                length: *length,
                seed: *seed,
            };
            (out, generate_garch_prices(&spec, *base_price)?)
        }
    };
    let series = PriceSeries::new(stem(out), prices)?;
    write_prices(out, &series)?;
    println!("wrote {} prices to {}", series.len(), out.display());
    Ok(())
}

fn analyze(args: &AnalyzeArgs) -> Result<()> {
    let file_entries = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::FileUnreadable {
                path: path.clone(),
                source,
            })?;
            parse_entries(&text)?
        }
        None => Vec::new(),
    };
    let config = RunConfig::from_entries(&merge_entries(file_entries, args.flag_entries()))?;
    let summary = run_pipeline(&config)?;
    println!("output: {}", summary.output_dir.display());
    println!("digest: {}", summary.digest);
    for (window, report) in &summary.mix_reports {
        println!("T = {window}");
        print_weights(
            &report.labels,
            &report.raw_mix,
            &report.rescaled_mix,
            &report.weights,
        );
    }
    println!("sharpe ratio: {}", summary.sharpe.sharpe);
    Ok(())
}

fn print_weights(labels: &[String], raw: &[f64], rescaled: &[f64], weights: &[f64]) {
    println!("label\traw_mix\trescaled_mix\tweight");
    for i in 0..labels.len() {
        println!("{}\t{}\t{}\t{}", labels[i], raw[i], rescaled[i], weights[i]);
    }
}

fn mix_tables(args: &MixArgs) -> Result<()> {
    let curves = args
        .tables
        .iter()
        .map(|p| {
            let label = p
                .parent()
                .and_then(Path::parent)
                .and_then(Path::file_name)
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| stem(p));
            read_hmix_tsv(p, &label)
        })
        .collect::<Result<Vec<_>>>()?;
    let report = macent::heterogeneity::mix_report(&curves, args.n_min, args.n_max)?;
    print_weights(
        &report.labels,
        &report.raw_mix,
        &report.rescaled_mix,
        &report.weights,
    );
    Ok(())
}

fn sharpe(args: &SharpeArgs) -> Result<()> {
    let prices = macent::ingest::truncate_to_common_length(&args.input.load()?)?;
    let sol = sharpe_from_prices(
        &prices,
        args.return_kind.into(),
        args.horizon,
        args.risk_free_rate,
    )?;
    println!("label\tweight");
    for (s, w) in prices.iter().zip(&sol.weights) {
        println!("{}\t{w}", s.label);
    }
    println!("sharpe ratio: {}", sol.sharpe);
    println!(
        "status: {}",
        serde_json::to_string(&sol.status)?.trim_matches('"')
    );
    Ok(())
}

fn report(dir: &Path) -> Result<()> {
    let manifest = verify_output(dir)?;
    println!(
        "{} {} digest {} ({} files, verified)",
        manifest.tool,
        manifest.version,
        manifest.digest,
        manifest.files.len()
    );
    for f in manifest
        .files
        .iter()
        .filter(|f| f.path.starts_with("weights_T"))
    {
        let path = dir.join(&f.path);
        let text = std::fs::read_to_string(&path).map_err(|source| Error::Io { path, source })?;
        println!("{}", f.path);
        print!("{text}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::IngestCheck(a) => ingest_check(a),
        Command::Synth(s) => synth(s),
        Command::Analyze(a) => analyze(a),
        Command::Mix(a) => mix_tables(a),
        Command::Sharpe(a) => sharpe(a),
        Command::Report { dir } => report(dir),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
