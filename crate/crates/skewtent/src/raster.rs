//! Rasterizing the parameter region by kneading-prefix equivalence, with
//! tangent-line overlays, and PPM export.
//!
//! Pixels sharing the first `prefix_len` kneading symbols get the same
//! stable identifier, so equi-kneading regions (which contain the
//! constant-entropy curves) render in one color. Overlays draw the
//! approximate tangent through a chosen parameter point with the slope
//! taken either from a Birkhoff gamma estimate or from the Theta series.

use std::io::{self, Write};

use crate::birkhoff::{estimate_gamma, slope_from_gamma};
use crate::kneading::{kneading_prefix, RlBlocks};
use crate::map::{in_region_u, SkewTentMap};
use crate::theta::{implicit_slope, ThetaError};

/// Where an overlay takes its slope from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TangentSource {
    Gamma,
    Theta,
}

/// Raster geometry and sampling depth.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterConfig {
    pub alpha_range: (f64, f64),
    pub beta_range: (f64, f64),
    pub width: usize,
    pub height: usize,
    pub prefix_len: usize,
}

impl RasterConfig {
    /// Parameter point at the center of pixel `(x, y)`; row 0 is the top of
    /// the image (largest beta).
    pub fn param_at(&self, x: usize, y: usize) -> (f64, f64) {
        let (a0, a1) = self.alpha_range;
        let (b0, b1) = self.beta_range;
        let alpha = a0 + (x as f64 + 0.5) * (a1 - a0) / self.width as f64;
        let beta = b1 - (y as f64 + 0.5) * (b1 - b0) / self.height as f64;
        (alpha, beta)
    }

    /// Pixel whose cell contains the parameter point, if inside the ranges.
    pub fn pixel_of(&self, alpha: f64, beta: f64) -> Option<(usize, usize)> {
        let (a0, a1) = self.alpha_range;
        let (b0, b1) = self.beta_range;
        let fx = (alpha - a0) / (a1 - a0) * self.width as f64;
        let fy = (b1 - beta) / (b1 - b0) * self.height as f64;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (x, y) = (fx as usize, fy as usize);
        if x < self.width && y < self.height {
            Some((x, y))
        } else {
            None
        }
    }
}

/// Per-pixel content.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    OutOfRegion,
    /// Stable 64-bit hash of the kneading-prefix symbol string.
    Prefix(u64),
    OverlayGamma,
    OverlayTheta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    cells: Vec<Cell>,
}

impl RasterImage {
    pub fn cell(&self, x: usize, y: usize) -> Cell {
        self.cells[y * self.width + x]
    }
}

/// FNV-1a, 64-bit. Stable across runs and platforms.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x1_0000_0000_01b3);
    }
    h
}

/// Identifier of a map's kneading prefix: hash of its symbol string.
pub fn prefix_id(map: &SkewTentMap, prefix_len: usize) -> u64 {
    let seq = kneading_prefix(map, prefix_len, crate::kneading::DEFAULT_C_TOL);
    let text: String = seq.symbols().iter().map(|s| s.as_char()).collect();
    fnv1a64(text.as_bytes())
}

/// Sample the kneading prefix at every pixel center. Deterministic: equal
/// configs give bit-identical images.
pub fn kneading_raster(config: &RasterConfig) -> RasterImage {
    let mut cells = Vec::with_capacity(config.width * config.height);
    for y in 0..config.height {
        for x in 0..config.width {
            let (alpha, beta) = config.param_at(x, y);
            let cell = if in_region_u(alpha, beta) {
                let map = SkewTentMap::new(alpha, beta).expect("checked membership");
                Cell::Prefix(prefix_id(&map, config.prefix_len))
            } else {
                Cell::OutOfRegion
            };
            cells.push(cell);
        }
    }
    RasterImage {
        width: config.width,
        height: config.height,
        cells,
    }
}

/// A tangent segment through `(alpha, beta)` with a precomputed slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlaySegment {
    pub alpha: f64,
    pub beta: f64,
    pub slope: f64,
    pub source: TangentSource,
}

/// Compute the overlay slope for a map from the requested source.
pub fn overlay_segment(
    map: &SkewTentMap,
    source: TangentSource,
    n: usize,
    seed: u64,
    burn_in: usize,
    prefix_len: usize,
) -> Result<OverlaySegment, ThetaError> {
    let slope = match source {
        TangentSource::Gamma => {
            let est = estimate_gamma(map, n, seed, burn_in);
            slope_from_gamma(map.alpha(), map.beta(), est.gamma)
        }
        TangentSource::Theta => {
            let seq = kneading_prefix(map, prefix_len, crate::kneading::DEFAULT_C_TOL);
            let blocks =
                RlBlocks::from_sequence(&seq, usize::MAX).expect("kneading prefix starts with R");
            implicit_slope(&blocks, map.alpha(), map.beta(), crate::theta::DEFAULT_TOL)?
        }
    };
    Ok(OverlaySegment {
        alpha: map.alpha(),
        beta: map.beta(),
        slope,
        source,
    })
}

/// Draw tangent segments over a copy of the image, clipped to its extent.
/// Gamma-sourced and Theta-sourced segments carry distinct cell markers.
pub fn render_overlay(image: &RasterImage, config: &RasterConfig, segments: &[OverlaySegment]) -> RasterImage {
    assert_eq!(image.width, config.width);
    assert_eq!(image.height, config.height);
    let mut out = image.clone();
    for seg in segments {
        let marker = match seg.source {
            TangentSource::Gamma => Cell::OverlayGamma,
            TangentSource::Theta => Cell::OverlayTheta,
        };
        // walk columns, then rows, so steep segments stay connected
        for x in 0..config.width {
            let (alpha, _) = config.param_at(x, 0);
            let beta = seg.beta + seg.slope * (alpha - seg.alpha);
            if let Some((px, py)) = config.pixel_of(alpha, beta) {
                out.cells[py * config.width + px] = marker;
            }
        }
        if seg.slope != 0.0 {
            for y in 0..config.height {
                let (_, beta) = config.param_at(0, y);
                let alpha = seg.alpha + (beta - seg.beta) / seg.slope;
                if let Some((px, py)) = config.pixel_of(alpha, beta) {
                    out.cells[py * config.width + px] = marker;
                }
            }
        }
    }
    out
}

/// Fixed palette: out-of-region pixels are white, overlay segments are red
/// (gamma source) and blue (Theta source), prefix classes get deterministic
/// colors derived from their identifier.
pub fn rgb(cell: Cell) -> [u8; 3] {
    match cell {
        Cell::OutOfRegion => [255, 255, 255],
        Cell::OverlayGamma => [255, 0, 0],
        Cell::OverlayTheta => [0, 0, 255],
        Cell::Prefix(id) => {
            // spread hash bits over mid-range channels so classes stay
            // distinguishable from the fixed markers
            let r = 32 + ((id >> 40) & 0xBF) as u8;
            let g = 32 + ((id >> 24) & 0xBF) as u8;
            let b = 32 + ((id >> 8) & 0xBF) as u8;
            [r, g, b]
        }
    }
}

/// Binary PPM (P6) encoding of the image.
pub fn write_ppm(image: &RasterImage, out: &mut dyn Write) -> io::Result<()> {
    write!(out, "P6\n{} {}\n255\n", image.width, image.height)?;
    for cell in &image.cells {
        out.write_all(&rgb(*cell))?;
    }
    Ok(())
}

/// CSV of per-pixel identifiers: `x,y,cell` with `-` for out-of-region
/// pixels and named markers for overlay pixels.
pub fn write_ids_csv(image: &RasterImage, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "x,y,cell")?;
    for y in 0..image.height {
        for x in 0..image.width {
            let text = match image.cell(x, y) {
                Cell::OutOfRegion => "-".to_string(),
                Cell::Prefix(id) => id.to_string(),
                Cell::OverlayGamma => "overlay-gamma".to_string(),
                Cell::OverlayTheta => "overlay-theta".to_string(),
            };
            writeln!(out, "{x},{y},{text}")?;
        }
    }
    Ok(())
}
