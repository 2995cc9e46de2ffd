use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wpsk::approximators::NodeScheme;
use wpsk::harness::{self, ExperimentConfig, RowStatus, VerifyConfig};
use wpsk::sequences::Family;
use wpsk::{Error, Norm, Precision};

#[derive(Parser)]
#[command(name = "wpsk", version, about = "Worst-case errors for weighted power series kernels on [-1, 1]")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every inequality suite for a kernel family.
    Verify(Opts),
    /// Empirical worst-case errors against the lower and upper bounds, as CSV.
    Convergence(Opts),
    /// Unweighted vs weighted interpolation estimates (Gaussian only).
    CompareWeighted(Opts),
    /// Print the constants of the bounds.
    Constants(Opts),
    /// Lower bound for the tensor Gaussian kernel on the square.
    MultivariateDemo(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Gaussian,
    Exponential,
    Hermite,
    Bessel,
    Power,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Inf,
    L2,
}

#[derive(Args)]
struct Opts {
    #[arg(long, value_enum, default_value = "gaussian")]
    kernel: KernelArg,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, value_enum, default_value = "inf")]
    norm: NormArg,
    /// chebyshev, equispaced, random, or a file with one node per line
    #[arg(long, default_value = "chebyshev")]
    nodes: String,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, default_value_t = 60)]
    precision_digits: u32,
    #[arg(long, default_value_t = 1e-30)]
    truncation_tol: f64,
    #[arg(long, default_value_t = 4096)]
    grid_size: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    allow_inapplicable: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Opts {
    fn family(&self) -> wpsk::Result<Family> {
        let name = match self.kernel {
            KernelArg::Gaussian => "gaussian",
            KernelArg::Exponential => "exponential",
            KernelArg::Hermite => "hermite",
            KernelArg::Bessel => "bessel",
            KernelArg::Power => "power",
        };
        Family::from_name(name, self.epsilon, self.tau, self.beta)
    }

    fn norm(&self) -> Norm {
        match self.norm {
            NormArg::Inf => Norm::Sup,
            NormArg::L2 => Norm::L2,
        }
    }

    fn precision(&self) -> wpsk::Result<Precision> {
        if self.precision_digits < wpsk::precision::MIN_DIGITS {
            return Err(Error::Config(format!(
                "--precision-digits must be at least {}",
                wpsk::precision::MIN_DIGITS
            )));
        }
        Ok(Precision::new(self.precision_digits))
    }

    fn node_scheme(&self) -> NodeScheme {
        match self.nodes.as_str() {
            "chebyshev" => NodeScheme::Chebyshev,
            "equispaced" => NodeScheme::Equispaced,
            "random" => NodeScheme::Random { seed: self.seed },
            path => NodeScheme::File(PathBuf::from(path)),
        }
    }

    fn range(&self, lo: usize, hi: usize) -> (usize, usize) {
        (self.n_min.unwrap_or(lo), self.n_max.unwrap_or(hi))
    }

    fn sink(&self) -> wpsk::Result<Box<dyn Write>> {
        Ok(match &self.output {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        })
    }
}

fn verify(o: &Opts) -> wpsk::Result<i32> {
    let mut cfg = VerifyConfig::new(o.family()?);
    (cfg.n_min, cfg.n_max) = o.range(1, 40);
    cfg.seed = o.seed;
    cfg.precision = o.precision()?;
    let report = harness::verify(&cfg)?;
    let mut out = o.sink()?;
    let mut code = harness::EXIT_OK;
    for s in &report {
        writeln!(out, "{s}")?;
        if !s.passed() {
            code = harness::EXIT_VIOLATION;
        }
    }
    out.flush()?;
    Ok(code)
}

fn convergence(o: &Opts) -> wpsk::Result<i32> {
    let family = o.family()?;
    let mut cfg = ExperimentConfig::new(family);
    let prec = o.precision()?;
    let first = family.lambda(prec).map_or(1, |l| wpsk::bounds::first_applicable_n(&l, prec));
    (cfg.n_min, cfg.n_max) = o.range(first, 30.max(first));
    cfg.norm = o.norm();
    cfg.nodes = o.node_scheme();
    cfg.precision = o.precision()?;
    cfg.truncation_tol = o.truncation_tol;
    cfg.grid_size = o.grid_size;
    cfg.allow_inapplicable = o.allow_inapplicable;
    let rows = harness::convergence(&cfg)?;
    let mut out = o.sink()?;
    harness::write_csv(&mut out, &cfg, &rows)?;
    out.flush()?;
    if o.output.is_some() {
        print!("{}", harness::format_table(&rows));
    }
    let bad = rows.iter().any(|r| r.status == RowStatus::Violation);
    Ok(if bad { harness::EXIT_VIOLATION } else { harness::EXIT_OK })
}

fn compare_weighted(o: &Opts) -> wpsk::Result<i32> {
    let family = o.family()?;
    let Family::Gaussian { epsilon } = family else {
        return Err(Error::Config(format!("compare-weighted needs the gaussian kernel, got {family}")));
    };
    family.validate()?;
    let (lo, hi) = o.range(10, 25);
    let rep = harness::compare_weighted(epsilon, lo, hi, o.precision()?)?;
    let mut out = o.sink()?;
    harness::write_compare_csv(&mut out, epsilon, &rep)?;
    out.flush()?;
    Ok(harness::EXIT_OK)
}

fn constants(o: &Opts) -> wpsk::Result<i32> {
    let text = harness::constants_table(o.family()?, o.precision()?)?;
    let mut out = o.sink()?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(harness::EXIT_OK)
}

fn multivariate_demo(o: &Opts) -> wpsk::Result<i32> {
    if !matches!(o.kernel, KernelArg::Gaussian) {
        return Err(Error::Config("multivariate-demo uses the gaussian kernel".into()));
    }
    let (lo, hi) = o.range(1, 10);
    if lo == 0 || lo > hi {
        return Err(Error::Config(format!("empty n range {lo}..={hi}")));
    }
    let ns: Vec<usize> = (lo..=hi).collect();
    let rows = harness::multivariate_rows(o.epsilon, o.norm(), &ns, o.precision()?)?;
    let mut out = o.sink()?;
    writeln!(out, "epsilon,norm,n,witness")?;
    for (n, w) in rows {
        writeln!(out, "{},{},{n},{:.12e}", o.epsilon, o.norm().name(), w.to_f64())?;
    }
    out.flush()?;
    Ok(harness::EXIT_OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { harness::EXIT_USAGE as u8 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Verify(o) => verify(o),
        Command::Convergence(o) => convergence(o),
        Command::CompareWeighted(o) => compare_weighted(o),
        Command::Constants(o) => constants(o),
        Command::MultivariateDemo(o) => multivariate_demo(o),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("wpsk: {e}");
            ExitCode::from(harness::exit_code(&e) as u8)
        }
    }
}
