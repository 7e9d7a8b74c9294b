//! Kneading sequences: symbolic itineraries of the turning point, their
//! parity-lexicographic order, and the RL-block encoding.
//!
//! ```bash
//! cargo run --example kneading_sequences
//! ```

use skewtent::kneading::{kneading_prefix, parity_lex_compare, RlBlocks, DEFAULT_C_TOL};
use skewtent::map::SkewTentMap;

fn main() {
    let golden_beta = (1.0 + 5.0_f64.sqrt()) / 4.0;
    let maps = [
        ("full tent", SkewTentMap::new(0.5, 1.0).unwrap()),
        ("golden", SkewTentMap::new(0.5, golden_beta).unwrap()),
        ("skew", SkewTentMap::new(0.3, 0.8).unwrap()),
        ("slow", SkewTentMap::new(0.49, 0.56).unwrap()),
    ];

    for (name, map) in &maps {
        let seq = kneading_prefix(map, 24, DEFAULT_C_TOL);
        let blocks = RlBlocks::from_sequence(&seq, 64).unwrap();
        println!(
            "{name:>9} (alpha={}, beta={:.6}): {} {:?}",
            map.alpha(),
            map.beta(),
            seq,
            blocks.tail()
        );
        println!("{:>9}  block exponents: {:?}", "", blocks.exponents());
    }

    // kneading grows with beta at fixed alpha
    let low = kneading_prefix(&SkewTentMap::new(0.45, 0.6).unwrap(), 12, DEFAULT_C_TOL);
    let high = kneading_prefix(&SkewTentMap::new(0.45, 0.95).unwrap(), 12, DEFAULT_C_TOL);
    println!(
        "\norder check at alpha = 0.45: {low} vs {high} -> {:?}",
        parity_lex_compare(&low, &high)
    );
}
