//! Trace a constant-entropy curve through a parameter point and locate the
//! approximate ends of its domain.
//!
//! ```bash
//! cargo run --example isentrope_trace
//! ```

use skewtent::isentrope::{domain_endpoints, solve_beta, trace_isentrope};
use skewtent::map::SkewTentMap;

fn main() {
    let golden_beta = (1.0 + 5.0_f64.sqrt()) / 4.0;
    let reference = SkewTentMap::new(0.5, golden_beta).unwrap();

    // one solve: find beta with the same kneading at a nearby alpha
    let point = solve_beta(&reference, 0.52, 200, 1e-10).unwrap();
    println!(
        "through (0.52, .): beta = {:.9}, residual = {:+.1e}, slope = {:+.6}",
        point.beta, point.theta_residual, point.slope
    );

    // a polyline across an alpha window
    let trace = trace_isentrope(&reference, 0.45, 0.55, 11, 200, 1e-10).unwrap();
    println!("\nalpha      beta         slope");
    for p in &trace.points {
        println!("{:.4}   {:.8}   {:+.6}", p.alpha, p.beta, p.slope);
    }

    // approximate domain of the curve
    let d = domain_endpoints(&reference, 200, 1e-4).unwrap();
    println!(
        "\ndomain of the golden curve: ({:.5}, {:.5})  status {:?}",
        d.alpha_1, d.alpha_2, d.status
    );
    println!("(the curve leaves the region through beta = alpha at alpha = 2/3)");
}
