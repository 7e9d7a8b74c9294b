//! The auxiliary series: evaluate it on and off a constant-entropy curve,
//! differentiate it term by term, and read off the curve slope.
//!
//! ```bash
//! cargo run --example theta_tangent
//! ```

use skewtent::kneading::{kneading_prefix, RlBlocks, DEFAULT_C_TOL};
use skewtent::map::SkewTentMap;
use skewtent::theta::{implicit_slope, theta_eval, theta_partials};

fn main() {
    let golden_beta = (1.0 + 5.0_f64.sqrt()) / 4.0;
    let map = SkewTentMap::new(0.5, golden_beta).unwrap();
    let seq = kneading_prefix(&map, 200, DEFAULT_C_TOL);
    let blocks = RlBlocks::from_sequence(&seq, usize::MAX).unwrap();
    println!("kneading of the golden map: {seq} -> blocks {:?}", blocks.exponents());

    // the series vanishes on the curve and not off it
    for beta in [0.75, golden_beta, 0.9] {
        let eval = theta_eval(&blocks, 0.5, beta, 1e-12).unwrap();
        println!(
            "theta(0.5, {beta:.6}) = {:+.12e}   (tail <= {:.1e}, {} terms)",
            eval.value, eval.tail_bound, eval.terms_used
        );
    }

    // partial derivatives and the implicit slope
    let grad = theta_partials(&blocks, 0.5, golden_beta, 1e-12).unwrap();
    let slope = implicit_slope(&blocks, 0.5, golden_beta, 1e-12).unwrap();
    println!(
        "\nd_alpha = {:+.9}, d_beta = {:+.9}  =>  curve slope {:+.9}",
        grad.d_alpha, grad.d_beta, slope
    );
    println!("(equal branch slopes give the closed form -(sqrt 5 - 1)^2 phi/2 here)");

    // a reference point with an open (non-periodic) kneading prefix
    let skew = SkewTentMap::new(0.3, 0.8).unwrap();
    let blocks = RlBlocks::from_sequence(&kneading_prefix(&skew, 200, DEFAULT_C_TOL), usize::MAX)
        .unwrap();
    let slope = implicit_slope(&blocks, 0.3, 0.8, 1e-6).unwrap();
    println!("\nslope of the curve through (0.3, 0.8): {slope:+.6}");
}
