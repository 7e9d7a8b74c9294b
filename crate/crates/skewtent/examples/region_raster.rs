//! Render the parameter region colored by kneading prefix, with the two
//! tangent overlays (red: gamma route, blue: series route) through one
//! point. Writes a PPM next to the system temp directory.
//!
//! ```bash
//! cargo run --release --example region_raster
//! ```

use std::fs::File;

use skewtent::map::SkewTentMap;
use skewtent::raster::{
    kneading_raster, overlay_segment, render_overlay, write_ppm, RasterConfig, TangentSource,
};

fn main() {
    let config = RasterConfig {
        alpha_range: (0.05, 0.95),
        beta_range: (0.5, 1.0),
        width: 480,
        height: 270,
        prefix_len: 10,
    };
    let image = kneading_raster(&config);

    let map = SkewTentMap::new(0.3, 0.8).unwrap();
    let overlays = [
        overlay_segment(&map, TangentSource::Gamma, 200_000, 1, 1000, 200).unwrap(),
        overlay_segment(&map, TangentSource::Theta, 200_000, 1, 1000, 200).unwrap(),
    ];
    println!(
        "tangent slopes through (0.3, 0.8): gamma route {:+.6}, series route {:+.6}",
        overlays[0].slope, overlays[1].slope
    );
    let image = render_overlay(&image, &config, &overlays);

    let path = std::env::temp_dir().join("skewtent-region.ppm");
    let mut file = File::create(&path).unwrap();
    write_ppm(&image, &mut file).unwrap();
    println!("wrote {} ({}x{})", path.display(), config.width, config.height);
}
