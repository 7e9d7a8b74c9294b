//! Command implementations behind the `skewtent` binary: tables, traces,
//! images, and Markov reports, all deterministic given their flags.

use thiserror::Error;

use crate::birkhoff::{estimate_gamma, lyapunov_from_gamma, slope_from_gamma};
use crate::isentrope::{trace_isentrope, IsentropeError};
use crate::kneading::{kneading_prefix, KneadingError, RlBlocks, SequenceKind};
use crate::map::{MapError, SkewTentMap};
use crate::markov::{self, MarkovError};
use crate::raster::{
    kneading_raster, overlay_segment, render_overlay, write_ids_csv, write_ppm, RasterConfig,
    TangentSource,
};
use crate::theta::{implicit_slope, ThetaError};

/// The six parameter pairs of the reference tangent comparison table.
pub const REFERENCE_PARAMS: [(f64, f64); 6] = [
    (0.3, 0.8),
    (0.49, 0.56),
    (0.5, 0.7),
    (0.5, 0.8),
    (0.6, 0.75),
    (0.6, 0.9),
];

/// 17 significant digits: round-trip safe for binary64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Kneading(#[from] KneadingError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Isentrope(#[from] IsentropeError),
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Single machine-parseable category for the exit line.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Map(MapError::OutsideRegionU { .. }) => "region",
            CliError::Map(MapError::OutsideDomain { .. }) => "domain",
            CliError::Kneading(_) => "malformed-sequence",
            CliError::Theta(e) => theta_category(e),
            CliError::Isentrope(e) => match e {
                IsentropeError::NotBracketed { .. } => "not-bracketed",
                IsentropeError::Ambiguous { .. } => "ambiguous",
                IsentropeError::EmptyTrace => "empty-trace",
                IsentropeError::InvalidRange => "usage",
                IsentropeError::Kneading(_) => "malformed-sequence",
                IsentropeError::Theta(t) => theta_category(t),
            },
            CliError::Markov(e) => match e {
                MarkovError::NoPeriod { .. } | MarkovError::NotTopEdge { .. } => "no-period",
                MarkovError::MarkovViolation { .. } => "markov-violation",
                MarkovError::NonUniqueDensity => "non-unique-density",
                MarkovError::NegativeDensity { .. } => "negative-density",
            },
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
        }
    }
}

fn theta_category(e: &ThetaError) -> &'static str {
    match e {
        ThetaError::Truncation { .. } => "truncation",
        ThetaError::DegenerateGradient { .. } => "degenerate-gradient",
        ThetaError::OutsideRegionU { .. } => "region",
        ThetaError::NonPositiveTolerance(_) => "usage",
    }
}

/// `kneading <alpha> <beta>`: the symbol string and its termination status.
pub fn cmd_kneading(alpha: f64, beta: f64, len: usize, c_tol: f64) -> Result<String, CliError> {
    let map = SkewTentMap::new(alpha, beta)?;
    let seq = kneading_prefix(&map, len, c_tol);
    let status = match seq.kind() {
        SequenceKind::CTerminated => format!("periodic, n={}", seq.len() - 1),
        SequenceKind::OpenPrefix => "open".to_string(),
    };
    Ok(format!("{seq} ({status})"))
}

/// `gamma <alpha> <beta>`: one Birkhoff estimate as a JSON object.
pub fn cmd_gamma(
    alpha: f64,
    beta: f64,
    n: usize,
    seed: u64,
    burn_in: usize,
) -> Result<String, CliError> {
    let map = SkewTentMap::new(alpha, beta)?;
    let est = estimate_gamma(&map, n, seed, burn_in);
    Ok(format!(
        "{{\"alpha\":{},\"beta\":{},\"gamma\":{},\"n\":{},\"seed\":{},\"burn_in\":{},\"x0\":{}}}",
        format_float(alpha),
        format_float(beta),
        format_float(est.gamma),
        n,
        seed,
        burn_in,
        format_float(est.x0)
    ))
}

/// `tangent-table`: CSV with one row per parameter pair. A failing row
/// leaves its numeric cells empty instead of aborting the table.
pub fn tangent_table(params: &[(f64, f64)], n: usize, seed: u64, prefix_len: usize) -> String {
    let mut out = String::from(
        "alpha,beta,gamma_birkhoff,slope_from_gamma,slope_from_theta,slope_discrepancy,lambda_birkhoff,lambda_markov\n",
    );
    for (i, &(alpha, beta)) in params.iter().enumerate() {
        let map = match SkewTentMap::new(alpha, beta) {
            Ok(m) => m,
            Err(_) => {
                out.push_str(&format!(
                    "{},{},,,,,,\n",
                    format_float(alpha),
                    format_float(beta)
                ));
                continue;
            }
        };
        let est = estimate_gamma(&map, n, seed.wrapping_add(i as u64), 1000);
        let sg = slope_from_gamma(alpha, beta, est.gamma);
        let lambda_b = lyapunov_from_gamma(alpha, beta, est.gamma);
        let slope_theta = kneading_blocks(&map, prefix_len)
            .and_then(|blocks| implicit_slope(&blocks, alpha, beta, 1e-9).map_err(CliError::from));
        let (st_cell, disc_cell) = match &slope_theta {
            Ok(st) => (format_float(*st), format_float((sg - st).abs())),
            Err(_) => (String::new(), String::new()),
        };
        let lambda_m = match markov::solve(&map, 100, 1e-9) {
            Ok(sol) => format_float(sol.tangent.lambda_exponent),
            Err(_) => String::new(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            format_float(alpha),
            format_float(beta),
            format_float(est.gamma),
            format_float(sg),
            st_cell,
            disc_cell,
            format_float(lambda_b),
            lambda_m
        ));
    }
    out
}

fn kneading_blocks(map: &SkewTentMap, prefix_len: usize) -> Result<RlBlocks, CliError> {
    let seq = kneading_prefix(map, prefix_len, crate::kneading::DEFAULT_C_TOL);
    Ok(RlBlocks::from_sequence(&seq, usize::MAX)?)
}

/// Parse an inline `alpha,beta;alpha,beta;...` parameter list.
pub fn parse_param_list(text: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut out = Vec::new();
    for part in text.split(';').filter(|p| !p.trim().is_empty()) {
        let mut nums = part.split(',').map(str::trim);
        let (a, b) = (nums.next(), nums.next());
        match (a, b, nums.next()) {
            (Some(a), Some(b), None) => {
                let alpha: f64 = a
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad number in params: {a:?}")))?;
                let beta: f64 = b
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad number in params: {b:?}")))?;
                out.push((alpha, beta));
            }
            _ => {
                return Err(CliError::Usage(format!(
                    "params entries must be alpha,beta pairs, got {part:?}"
                )))
            }
        }
    }
    Ok(out)
}

/// Output format of the isentrope trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    Json,
}

/// `isentrope <alpha0> <beta0>`: trace the curve through a point.
#[allow(clippy::too_many_arguments)]
pub fn cmd_isentrope(
    alpha0: f64,
    beta0: f64,
    alpha_lo: f64,
    alpha_hi: f64,
    steps: usize,
    prefix_len: usize,
    beta_tol: f64,
    format: TraceFormat,
) -> Result<String, CliError> {
    let reference = SkewTentMap::new(alpha0, beta0)?;
    let trace = trace_isentrope(&reference, alpha_lo, alpha_hi, steps, prefix_len, beta_tol)?;
    Ok(match format {
        TraceFormat::Csv => trace.to_csv(),
        TraceFormat::Json => trace.to_json(),
    })
}

/// `raster`: the PPM bytes and, when requested, the per-pixel identifier CSV.
pub fn cmd_raster(
    config: &RasterConfig,
    overlays: &[(f64, f64, TangentSource)],
    n: usize,
    seed: u64,
    want_ids_csv: bool,
) -> Result<(Vec<u8>, Option<String>), CliError> {
    if config.width == 0 || config.height == 0 {
        return Err(CliError::Usage("raster size must be positive".into()));
    }
    let mut image = kneading_raster(config);
    if !overlays.is_empty() {
        let mut segments = Vec::with_capacity(overlays.len());
        for &(alpha, beta, source) in overlays {
            let map = SkewTentMap::new(alpha, beta)?;
            segments.push(overlay_segment(
                &map,
                source,
                n,
                seed,
                crate::birkhoff::DEFAULT_BURN_IN,
                config.prefix_len.max(crate::kneading::DEFAULT_PREFIX_LEN),
            )?);
        }
        image = render_overlay(&image, config, &segments);
    }
    let mut ppm = Vec::new();
    write_ppm(&image, &mut ppm)?;
    let ids = if want_ids_csv {
        let mut buf = Vec::new();
        write_ids_csv(&image, &mut buf)?;
        Some(String::from_utf8(buf).expect("csv is ascii"))
    } else {
        None
    };
    Ok((ppm, ids))
}

/// `markov <alpha> <beta>`: JSON report of the exact pipeline. A missing
/// period is a status, not an error.
pub fn cmd_markov(alpha: f64, beta: f64, max_iter: usize, tol: f64) -> Result<String, CliError> {
    let map = SkewTentMap::new(alpha, beta)?;
    let sol = match markov::solve(&map, max_iter, tol) {
        Ok(sol) => sol,
        Err(MarkovError::NoPeriod { .. }) => {
            return Ok(format!(
                "{{\"status\":\"no-period-found\",\"alpha\":{},\"beta\":{},\"period\":null}}",
                format_float(alpha),
                format_float(beta)
            ));
        }
        Err(e) => return Err(e.into()),
    };
    let period = match sol.period {
        Some(p) => p.to_string(),
        None => "null".to_string(),
    };
    let partition = sol
        .partition
        .points()
        .iter()
        .map(|p| format_float(*p))
        .collect::<Vec<_>>()
        .join(",");
    let density = sol
        .density
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let (l, r) = sol.density.partition.cell(i);
            format!(
                "{{\"left\":{},\"right\":{},\"value\":{}}}",
                format_float(l),
                format_float(r),
                format_float(*v)
            )
        })
        .collect::<Vec<_>>()
        .join(",");
    Ok(format!(
        "{{\"status\":\"ok\",\"alpha\":{},\"beta\":{},\"period\":{},\"partition\":[{}],\"density\":[{}],\"gamma\":{},\"lambda\":{},\"psi_prime\":{}}}",
        format_float(alpha),
        format_float(beta),
        period,
        partition,
        density,
        format_float(sol.tangent.gamma),
        format_float(sol.tangent.lambda_exponent),
        format_float(sol.tangent.psi_prime)
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_beta() -> f64 {
        (1.0 + 5.0_f64.sqrt()) / 4.0
    }

    #[test]
    fn kneading_command_output() {
        assert_eq!(
            cmd_kneading(0.5, 1.0, 6, 1e-12).unwrap(),
            "RLLLLL (open)"
        );
        assert_eq!(
            cmd_kneading(0.5, golden_beta(), 6, 1e-6).unwrap(),
            "RLC (periodic, n=2)"
        );
        let err = cmd_kneading(0.3, 0.4, 6, 1e-12).unwrap_err();
        assert_eq!(err.category(), "region");
    }

    #[test]
    fn float_formatting_round_trips() {
        for x in [0.3, 1.0 / 3.0, golden_beta(), 1e-17, 123456.789] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn tangent_table_shape() {
        let csv = tangent_table(&REFERENCE_PARAMS, 20_000, 1, 200);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 7);
        assert!(lines[0].starts_with("alpha,beta,gamma_birkhoff"));
        for line in &lines[1..] {
            assert_eq!(line.split(',').count(), 8);
        }
        // discrepancy column is |slope_gamma - slope_theta|
        let cells: Vec<&str> = lines[1].split(',').collect();
        let sg: f64 = cells[3].parse().unwrap();
        let st: f64 = cells[4].parse().unwrap();
        let disc: f64 = cells[5].parse().unwrap();
        assert!((disc - (sg - st).abs()).abs() < 1e-15);
    }

    #[test]
    fn empty_param_list_gives_header_only() {
        let csv = tangent_table(&[], 1000, 1, 50);
        assert_eq!(csv.lines().count(), 1);
        assert_eq!(parse_param_list("").unwrap(), vec![]);
    }

    #[test]
    fn param_list_parsing() {
        assert_eq!(
            parse_param_list("0.3,0.8;0.6,0.9").unwrap(),
            vec![(0.3, 0.8), (0.6, 0.9)]
        );
        assert!(parse_param_list("0.3").is_err());
        assert!(parse_param_list("a,b").is_err());
    }

    #[test]
    fn markov_command_reports() {
        let json = cmd_markov(0.5, 1.0, 100, 1e-9).unwrap();
        assert!(json.contains("\"status\":\"ok\""));
        assert!(json.contains("\"period\":null"));
        assert!(json.contains("\"gamma\":5.0000000000000000e-1"));

        let json = cmd_markov(0.5, golden_beta(), 100, 1e-9).unwrap();
        assert!(json.contains("\"period\":2"));

        let json = cmd_markov(0.3, 0.8, 100, 1e-12).unwrap();
        assert!(json.contains("\"status\":\"no-period-found\""));
    }

    #[test]
    fn isentrope_command_streams_csv() {
        let text = cmd_isentrope(0.5, 1.0, 0.3, 0.7, 5, 200, 1e-10, TraceFormat::Csv).unwrap();
        assert!(text.starts_with("alpha,beta,theta_residual,slope\n"));
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn raster_command_produces_ppm_and_ids() {
        let cfg = RasterConfig {
            alpha_range: (0.2, 0.8),
            beta_range: (0.5, 1.0),
            width: 16,
            height: 12,
            prefix_len: 6,
        };
        let (ppm, ids) = cmd_raster(&cfg, &[], 1000, 1, true).unwrap();
        assert!(ppm.starts_with(b"P6\n16 12\n255\n"));
        assert_eq!(ppm.len(), "P6\n16 12\n255\n".len() + 16 * 12 * 3);
        assert_eq!(ids.unwrap().lines().count(), 1 + 16 * 12);
    }

    #[test]
    fn gamma_command_is_deterministic() {
        let a = cmd_gamma(0.3, 0.8, 10_000, 7, 100).unwrap();
        let b = cmd_gamma(0.3, 0.8, 10_000, 7, 100).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("{\"alpha\":"));
    }
}
