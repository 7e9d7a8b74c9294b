use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use skewtent::cli::{
    cmd_gamma, cmd_isentrope, cmd_kneading, cmd_markov, cmd_raster, parse_param_list,
    tangent_table, CliError, TraceFormat, REFERENCE_PARAMS,
};
use skewtent::raster::{RasterConfig, TangentSource};

#[derive(Parser)]
#[command(
    name = "skewtent",
    version,
    about = "Skew tent map toolkit: kneading sequences, isentropes, Lyapunov exponents"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the kneading sequence of the map at (alpha, beta)
    Kneading {
        alpha: f64,
        beta: f64,
        /// Maximum number of symbols
        #[arg(long, default_value_t = skewtent::kneading::DEFAULT_PREFIX_LEN)]
        len: usize,
        /// Tolerance for detecting a return to the peak
        #[arg(long, default_value_t = skewtent::kneading::DEFAULT_C_TOL)]
        ctol: f64,
    },
    /// Birkhoff estimate of gamma, the orbit fraction left of the peak
    Gamma {
        alpha: f64,
        beta: f64,
        #[arg(long, default_value_t = skewtent::birkhoff::DEFAULT_N_ITERATES)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = skewtent::birkhoff::DEFAULT_BURN_IN)]
        burn_in: usize,
    },
    /// CSV comparing tangent slopes from gamma and from the Theta series
    TangentTable {
        /// Inline list "alpha,beta;alpha,beta;..." (default: the six
        /// tabulated pairs; empty string: header only)
        #[arg(long)]
        params: Option<String>,
        /// File with one "alpha,beta" pair per line
        #[arg(long, conflicts_with = "params")]
        params_file: Option<PathBuf>,
        #[arg(long, default_value_t = skewtent::birkhoff::DEFAULT_N_ITERATES)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = skewtent::kneading::DEFAULT_PREFIX_LEN)]
        prefix: usize,
        /// Output path, or - for stdout
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Trace the constant-entropy curve through (alpha0, beta0)
    Isentrope {
        alpha0: f64,
        beta0: f64,
        /// Alpha range "lo,hi" (default: alpha0 +/- 0.05)
        #[arg(long)]
        range: Option<String>,
        #[arg(long, default_value_t = 41)]
        steps: usize,
        #[arg(long, default_value_t = skewtent::kneading::DEFAULT_PREFIX_LEN)]
        prefix: usize,
        #[arg(long, default_value_t = skewtent::isentrope::DEFAULT_BETA_TOL)]
        beta_tol: f64,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Output path, or - for stdout
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Rasterize the parameter region by kneading prefix (binary PPM)
    Raster {
        /// Parameter window "alpha_lo,alpha_hi,beta_lo,beta_hi"
        #[arg(long, default_value = "0.0,1.0,0.5,1.0")]
        range: String,
        /// Image size "WIDTHxHEIGHT"
        #[arg(long, default_value = "512x512")]
        size: String,
        /// Kneading prefix length per pixel
        #[arg(long, default_value_t = 10)]
        prefix: usize,
        /// Tangent overlay "alpha,beta,gamma|theta"; repeatable
        #[arg(long)]
        overlay: Vec<String>,
        #[arg(long, default_value_t = skewtent::birkhoff::DEFAULT_N_ITERATES)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output path for the PPM image, or - for stdout
        #[arg(long, default_value = "raster.ppm")]
        out: String,
        /// Also write per-pixel identifiers as CSV to this path
        #[arg(long)]
        ids_csv: Option<String>,
    },
    /// Exact Markov pipeline: period, partition, density, gamma, Lyapunov
    Markov {
        alpha: f64,
        beta: f64,
        #[arg(long, default_value_t = skewtent::markov::DEFAULT_MAX_ITER)]
        maxiter: usize,
        #[arg(long, default_value_t = skewtent::markov::DEFAULT_TOL)]
        tol: f64,
    },
}

fn parse_pair(text: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("expected \"lo,hi\", got {text:?}")));
    }
    let lo = parts[0]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad number {:?}", parts[0])))?;
    let hi = parts[1]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad number {:?}", parts[1])))?;
    Ok((lo, hi))
}

fn parse_quad(text: &str) -> Result<(f64, f64, f64, f64), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(CliError::Usage(format!(
            "expected \"a_lo,a_hi,b_lo,b_hi\", got {text:?}"
        )));
    }
    let mut nums = [0.0; 4];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| CliError::Usage(format!("bad number {part:?}")))?;
    }
    Ok((nums[0], nums[1], nums[2], nums[3]))
}

fn parse_size(text: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = text.split('x').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("expected WIDTHxHEIGHT, got {text:?}")));
    }
    let w = parts[0]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad width {:?}", parts[0])))?;
    let h = parts[1]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad height {:?}", parts[1])))?;
    Ok((w, h))
}

fn parse_overlay(text: &str) -> Result<(f64, f64, TangentSource), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "expected \"alpha,beta,gamma|theta\", got {text:?}"
        )));
    }
    let alpha = parts[0]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad number {:?}", parts[0])))?;
    let beta = parts[1]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad number {:?}", parts[1])))?;
    let source = match parts[2] {
        "gamma" => TangentSource::Gamma,
        "theta" => TangentSource::Theta,
        other => {
            return Err(CliError::Usage(format!(
                "overlay source must be gamma or theta, got {other:?}"
            )))
        }
    };
    Ok((alpha, beta, source))
}

/// Resolve relative output paths against SKEWTENT_OUT_DIR when set.
fn resolve_out(path: &str) -> PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        return p.to_path_buf();
    }
    match std::env::var_os("SKEWTENT_OUT_DIR") {
        Some(dir) => Path::new(&dir).join(p),
        None => p.to_path_buf(),
    }
}

fn write_output(path: &str, bytes: &[u8]) -> Result<(), CliError> {
    if path == "-" {
        std::io::stdout().write_all(bytes)?;
        Ok(())
    } else {
        fs::write(resolve_out(path), bytes)?;
        Ok(())
    }
}

fn run(args: Args) -> Result<(), CliError> {
    match args.command {
        Command::Kneading {
            alpha,
            beta,
            len,
            ctol,
        } => {
            println!("{}", cmd_kneading(alpha, beta, len, ctol)?);
        }
        Command::Gamma {
            alpha,
            beta,
            n,
            seed,
            burn_in,
        } => {
            println!("{}", cmd_gamma(alpha, beta, n, seed, burn_in)?);
        }
        Command::TangentTable {
            params,
            params_file,
            n,
            seed,
            prefix,
            out,
        } => {
            let pairs = if let Some(file) = params_file {
                let text = fs::read_to_string(file)?;
                parse_param_list(&text.lines().collect::<Vec<_>>().join(";"))?
            } else if let Some(inline) = params {
                parse_param_list(&inline)?
            } else {
                REFERENCE_PARAMS.to_vec()
            };
            let csv = tangent_table(&pairs, n, seed, prefix);
            write_output(&out, csv.as_bytes())?;
        }
        Command::Isentrope {
            alpha0,
            beta0,
            range,
            steps,
            prefix,
            beta_tol,
            format,
            out,
        } => {
            let (lo, hi) = match range {
                Some(text) => parse_pair(&text)?,
                None => (alpha0 - 0.05, alpha0 + 0.05),
            };
            let fmt = match format {
                FormatArg::Csv => TraceFormat::Csv,
                FormatArg::Json => TraceFormat::Json,
            };
            let text = cmd_isentrope(alpha0, beta0, lo, hi, steps, prefix, beta_tol, fmt)?;
            write_output(&out, text.as_bytes())?;
        }
        Command::Raster {
            range,
            size,
            prefix,
            overlay,
            n,
            seed,
            out,
            ids_csv,
        } => {
            let (a_lo, a_hi, b_lo, b_hi) = parse_quad(&range)?;
            let (width, height) = parse_size(&size)?;
            let overlays = overlay
                .iter()
                .map(|o| parse_overlay(o))
                .collect::<Result<Vec<_>, _>>()?;
            let config = RasterConfig {
                alpha_range: (a_lo, a_hi),
                beta_range: (b_lo, b_hi),
                width,
                height,
                prefix_len: prefix,
            };
            let (ppm, ids) = cmd_raster(&config, &overlays, n, seed, ids_csv.is_some())?;
            write_output(&out, &ppm)?;
            if let (Some(path), Some(text)) = (ids_csv, ids) {
                write_output(&path, text.as_bytes())?;
            }
        }
        Command::Markov {
            alpha,
            beta,
            maxiter,
            tol,
        } => {
            println!("{}", cmd_markov(alpha, beta, maxiter, tol)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}
