//! Symbolic itineraries of the turning point, the parity-lexicographic
//! order, and the RL-block encoding that feeds the Theta series.
//!
//! The kneading sequence of a map records, for each iterate `T^n(alpha)`,
//! whether it lands left of the peak (`L`), on it (`C`), or right of it
//! (`R`). Sequences that hit `C` stop there; the turning point is then
//! periodic and the map is Markov.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::map::SkewTentMap;

/// Prefix length used by default throughout the crate.
pub const DEFAULT_PREFIX_LEN: usize = 200;

/// Absolute tolerance for detecting a return of the orbit to the peak.
/// Exact-zero detection would misclassify nearly every Markov parameter
/// representable in binary64.
pub const DEFAULT_C_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum KneadingError {
    #[error("kneading sequence must start with R")]
    MissingLeadingR,
    #[error("C may appear only as the final symbol")]
    MisplacedC,
    #[error("empty kneading sequence")]
    Empty,
    #[error("unrecognized symbol {0:?}")]
    BadSymbol(char),
}

/// One itinerary symbol. The base order is `L < C < R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    L,
    C,
    R,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::L => 'L',
            Symbol::C => 'C',
            Symbol::R => 'R',
        }
    }

    fn from_char(c: char) -> Result<Self, KneadingError> {
        match c {
            'L' => Ok(Symbol::L),
            'C' => Ok(Symbol::C),
            'R' => Ok(Symbol::R),
            other => Err(KneadingError::BadSymbol(other)),
        }
    }
}

/// Whether a sequence terminated at the peak or is an open prefix of an
/// infinite itinerary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    /// Exactly one `C`, at the last position: the turning point is periodic.
    CTerminated,
    /// No `C` within the computed prefix.
    OpenPrefix,
}

/// A kneading sequence or a finite prefix of one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KneadingSequence {
    symbols: Vec<Symbol>,
    kind: SequenceKind,
}

impl KneadingSequence {
    /// Build a sequence from raw symbols, inferring the kind and validating
    /// that `C`, if present, is the single final symbol.
    pub fn from_symbols(symbols: Vec<Symbol>) -> Result<Self, KneadingError> {
        if symbols.is_empty() {
            return Err(KneadingError::Empty);
        }
        let c_count = symbols.iter().filter(|&&s| s == Symbol::C).count();
        let kind = match c_count {
            0 => SequenceKind::OpenPrefix,
            1 if *symbols.last().unwrap() == Symbol::C => SequenceKind::CTerminated,
            _ => return Err(KneadingError::MisplacedC),
        };
        Ok(Self { symbols, kind })
    }

    /// Parse "RLC"-style strings (test fixtures, CLI round trips).
    pub fn parse(s: &str) -> Result<Self, KneadingError> {
        let symbols = s
            .chars()
            .map(Symbol::from_char)
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_symbols(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_c_terminated(&self) -> bool {
        self.kind == SequenceKind::CTerminated
    }
}

impl fmt::Display for KneadingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

/// First `n` symbols of the itinerary of the turning point.
///
/// Emits `C` and stops as soon as `|T^k(alpha) - alpha| <= c_tol`; otherwise
/// the k-th symbol is `L` or `R` according to the side of the peak. For any
/// map in region U the first symbol is `R`, since `T(alpha) = beta > alpha`.
pub fn kneading_prefix(map: &SkewTentMap, n: usize, c_tol: f64) -> KneadingSequence {
    let alpha = map.alpha();
    let mut x = map.eval(alpha);
    let mut symbols = Vec::with_capacity(n.min(4096));
    for _ in 0..n {
        if (x - alpha).abs() <= c_tol {
            symbols.push(Symbol::C);
            return KneadingSequence {
                symbols,
                kind: SequenceKind::CTerminated,
            };
        }
        symbols.push(if x < alpha { Symbol::L } else { Symbol::R });
        x = map.eval(x);
    }
    KneadingSequence {
        symbols,
        kind: SequenceKind::OpenPrefix,
    }
}

/// Parity-lexicographic comparison.
///
/// At the first differing position the base order `L < C < R` applies when
/// the number of `R` symbols strictly before that position is even, and the
/// reversed order when it is odd. If neither sequence differs from the other
/// within the common length the sequences compare equal (prefix semantics);
/// callers needing strict extension semantics must compare at a common
/// length.
pub fn parity_lex_compare(a: &KneadingSequence, b: &KneadingSequence) -> Ordering {
    let common = a.symbols.len().min(b.symbols.len());
    let mut r_parity_even = true;
    for j in 0..common {
        let (sa, sb) = (a.symbols[j], b.symbols[j]);
        if sa != sb {
            let base = sa.cmp(&sb);
            return if r_parity_even { base } else { base.reverse() };
        }
        if sa == Symbol::R {
            r_parity_even = !r_parity_even;
        }
    }
    Ordering::Equal
}

/// Tail behaviour of an RL-block encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockTail {
    /// Exponents repeat with the given block period (C-terminated source).
    Periodic { period: usize },
    /// The block after the recorded ones consists of infinitely many `L`s,
    /// so all later series terms vanish.
    LInfinity,
    /// Data ends after `blocks` recorded blocks. The last recorded exponent
    /// is a lower bound (its closing `R` was never observed); exponents
    /// before it are exact.
    Truncated { blocks: usize },
}

/// The exponents `m_1, m_2, ...` of the factorization
/// `R L^(m_1) R L^(m_2) R ...` of a kneading word.
///
/// For a C-terminated sequence the word is the sequence concatenated with
/// itself infinitely often with each `C` replaced by `L`, and the exponents
/// are periodic. For an open prefix the word is truncated at its last `R`:
/// trailing `L`s belong to a block whose end was never observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RlBlocks {
    m: Vec<u64>,
    tail: BlockTail,
}

impl RlBlocks {
    /// Encode a kneading sequence. `max_blocks` caps the number of stored
    /// exponents; a periodic encoding whose period exceeds the cap degrades
    /// to a truncated one.
    pub fn from_sequence(
        seq: &KneadingSequence,
        max_blocks: usize,
    ) -> Result<Self, KneadingError> {
        let symbols = seq.symbols();
        if symbols.is_empty() {
            return Err(KneadingError::Empty);
        }
        if symbols[0] != Symbol::R {
            return Err(KneadingError::MissingLeadingR);
        }
        match seq.kind() {
            SequenceKind::CTerminated => {
                let word: Vec<Symbol> = symbols
                    .iter()
                    .map(|&s| if s == Symbol::C { Symbol::L } else { s })
                    .collect();
                let period = word.iter().filter(|&&s| s == Symbol::R).count();
                if period <= max_blocks {
                    // Runs wrap across the repetition boundary, so scan two
                    // copies and keep the first `period` of them.
                    let doubled: Vec<Symbol> =
                        word.iter().chain(word.iter()).copied().collect();
                    let mut m = scan_closed_runs(&doubled);
                    m.truncate(period);
                    debug_assert_eq!(m.len(), period);
                    Ok(Self {
                        m,
                        tail: BlockTail::Periodic { period },
                    })
                } else {
                    Ok(Self::truncated_from_word(&word, max_blocks))
                }
            }
            SequenceKind::OpenPrefix => {
                if symbols.len() >= 2 && symbols[1..].iter().all(|&s| s == Symbol::L) {
                    // Single R then only Ls: the top-edge sequence R L L L ...
                    return Ok(Self {
                        m: Vec::new(),
                        tail: BlockTail::LInfinity,
                    });
                }
                Ok(Self::truncated_from_word(symbols, max_blocks))
            }
        }
    }

    fn truncated_from_word(word: &[Symbol], max_blocks: usize) -> Self {
        let last_r = word
            .iter()
            .rposition(|&s| s == Symbol::R)
            .expect("word starts with R");
        let mut m = scan_closed_runs(&word[..=last_r]);
        m.push(0); // the final R opens a block whose length is unknown
        m.truncate(max_blocks.max(1));
        let blocks = m.len();
        Self {
            m,
            tail: BlockTail::Truncated { blocks },
        }
    }

    pub fn exponents(&self) -> &[u64] {
        &self.m
    }

    pub fn tail(&self) -> BlockTail {
        self.tail
    }

    /// Exact exponent of the k-th block (1-based), or `None` once the data
    /// runs out (truncated tail) or the block is infinite (`L^inf` tail).
    pub fn exponent(&self, k: usize) -> Option<u64> {
        debug_assert!(k >= 1);
        match self.tail {
            BlockTail::Periodic { period } => Some(self.m[(k - 1) % period]),
            BlockTail::LInfinity => self.m.get(k - 1).copied(),
            BlockTail::Truncated { blocks } => {
                if k < blocks {
                    Some(self.m[k - 1])
                } else {
                    None
                }
            }
        }
    }

    /// Number of leading blocks with exact exponents; `None` means
    /// unbounded (periodic tail).
    pub fn exact_len(&self) -> Option<usize> {
        match self.tail {
            BlockTail::Periodic { .. } => None,
            BlockTail::LInfinity => Some(self.m.len()),
            BlockTail::Truncated { blocks } => Some(blocks - 1),
        }
    }

    /// Expand the encoded word back to symbols, for round trips and display.
    pub fn word_prefix(&self, len: usize) -> Vec<Symbol> {
        let mut out = Vec::with_capacity(len);
        let mut k = 1usize;
        'outer: while out.len() < len {
            let mk = match self.tail {
                BlockTail::Periodic { period } => self.m[(k - 1) % period],
                BlockTail::LInfinity => match self.m.get(k - 1) {
                    Some(&v) => v,
                    None => {
                        // the infinite block: one R, then Ls forever
                        out.push(Symbol::R);
                        while out.len() < len {
                            out.push(Symbol::L);
                        }
                        break 'outer;
                    }
                },
                BlockTail::Truncated { blocks } => {
                    if k > blocks {
                        break 'outer;
                    }
                    self.m[k - 1]
                }
            };
            out.push(Symbol::R);
            for _ in 0..mk {
                if out.len() == len {
                    break 'outer;
                }
                out.push(Symbol::L);
            }
            k += 1;
        }
        out
    }
}

/// L-run lengths after each R that is closed by a following R.
fn scan_closed_runs(word: &[Symbol]) -> Vec<u64> {
    let mut runs = Vec::new();
    let mut current: Option<u64> = None;
    for &s in word {
        match s {
            Symbol::R => {
                if let Some(run) = current.take() {
                    runs.push(run);
                }
                current = Some(0);
            }
            Symbol::L => {
                if let Some(run) = current.as_mut() {
                    *run += 1;
                }
            }
            Symbol::C => unreachable!("C replaced before block extraction"),
        }
    }
    runs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::SkewTentMap;
    use proptest::prelude::*;

    fn golden() -> SkewTentMap {
        SkewTentMap::new(0.5, (1.0 + 5.0_f64.sqrt()) / 4.0).unwrap()
    }

    fn seq(s: &str) -> KneadingSequence {
        KneadingSequence::parse(s).unwrap()
    }

    #[test]
    fn full_tent_prefix_is_open() {
        let m = SkewTentMap::new(0.5, 1.0).unwrap();
        let k = kneading_prefix(&m, 5, DEFAULT_C_TOL);
        assert_eq!(k.to_string(), "RLLLL");
        assert_eq!(k.kind(), SequenceKind::OpenPrefix);
    }

    #[test]
    fn golden_prefix_terminates_in_c() {
        let k = kneading_prefix(&golden(), 5, 1e-9);
        assert_eq!(k.to_string(), "RLC");
        assert_eq!(k.kind(), SequenceKind::CTerminated);
    }

    #[test]
    fn skew_prefix_starts_with_r_and_misses_c() {
        let m = SkewTentMap::new(0.3, 0.8).unwrap();
        let k = kneading_prefix(&m, 3, 0.0);
        assert_eq!(k.symbols()[0], Symbol::R);
        assert!(!k.is_c_terminated());
        // oracle: direct iteration of the orbit of the peak
        let orbit = m.orbit(0.3, 3, 0).unwrap();
        for (i, &x) in orbit.points.iter().enumerate() {
            let expect = if x < 0.3 { Symbol::L } else { Symbol::R };
            assert_eq!(k.symbols()[i], expect);
        }
    }

    #[test]
    fn first_symbol_is_r_for_maps_in_u() {
        let mut rng = crate::birkhoff::SplitMix64::new(11);
        for _ in 0..200 {
            let beta = 0.5 + 0.5 * rng.next_unit();
            let alpha = (1.0 - beta) + (2.0 * beta - 1.0) * rng.next_unit();
            if let Ok(m) = SkewTentMap::new(alpha, beta) {
                let k = kneading_prefix(&m, 4, DEFAULT_C_TOL);
                assert_eq!(k.symbols()[0], Symbol::R);
            }
        }
    }

    #[test]
    fn parity_compare_examples() {
        assert_eq!(parity_lex_compare(&seq("RLL"), &seq("RLL")), Ordering::Equal);
        // one R precedes position 2, so odd parity reverses L < R
        assert_eq!(parity_lex_compare(&seq("RL"), &seq("RR")), Ordering::Greater);
        assert_eq!(parity_lex_compare(&seq("LL"), &seq("RL")), Ordering::Less);
        // prefix semantics: shorter sequence equal to its extension
        assert_eq!(parity_lex_compare(&seq("RL"), &seq("RLL")), Ordering::Equal);
    }

    #[test]
    fn ordering_matches_dynamics_at_fixed_alpha() {
        // Entropy grows with beta, so at fixed alpha the kneading prefix of
        // the lower-beta map must not exceed that of the higher-beta map.
        let low = kneading_prefix(&SkewTentMap::new(0.45, 0.6).unwrap(), 10, 0.0);
        let high = kneading_prefix(&SkewTentMap::new(0.45, 0.95).unwrap(), 10, 0.0);
        assert!(low.to_string().starts_with("RLR"));
        assert!(high.to_string().starts_with("RLL"));
        assert_eq!(parity_lex_compare(&low, &high), Ordering::Less);
    }

    #[test]
    fn kneading_is_monotone_in_beta() {
        let mut rng = crate::birkhoff::SplitMix64::new(20260808);
        let mut checked = 0;
        while checked < 200 {
            let b1 = 0.52 + 0.47 * rng.next_unit();
            let b2 = 0.52 + 0.47 * rng.next_unit();
            let (b1, b2) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
            if b2 - b1 < 1e-6 {
                continue;
            }
            let lo = (1.0 - b1).max(0.02) + 0.01;
            let hi = b1 - 0.01;
            if hi <= lo {
                continue;
            }
            let alpha = lo + (hi - lo) * rng.next_unit();
            let (m1, m2) = match (SkewTentMap::new(alpha, b1), SkewTentMap::new(alpha, b2)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            let k1 = kneading_prefix(&m1, 30, DEFAULT_C_TOL);
            let k2 = kneading_prefix(&m2, 30, DEFAULT_C_TOL);
            for len in 1..=k1.len().min(k2.len()) {
                let a = KneadingSequence::from_symbols(k1.symbols()[..len].to_vec()).unwrap();
                let b = KneadingSequence::from_symbols(k2.symbols()[..len].to_vec()).unwrap();
                assert_ne!(
                    parity_lex_compare(&a, &b),
                    Ordering::Greater,
                    "monotonicity violated at alpha={alpha}, beta1={b1}, beta2={b2}, len={len}"
                );
            }
            checked += 1;
        }
    }

    #[test]
    fn blocks_of_rlc_are_periodic() {
        let blocks = RlBlocks::from_sequence(&seq("RLC"), 1000).unwrap();
        assert_eq!(blocks.exponents(), &[2]);
        assert_eq!(blocks.tail(), BlockTail::Periodic { period: 1 });
        // the expanded word is RLLRLLRLL...
        let word: String = blocks.word_prefix(9).iter().map(|s| s.as_char()).collect();
        assert_eq!(word, "RLLRLLRLL");
        assert_eq!(blocks.exponent(1), Some(2));
        assert_eq!(blocks.exponent(7), Some(2));
    }

    #[test]
    fn blocks_of_top_edge_prefix() {
        let m = SkewTentMap::new(0.5, 1.0).unwrap();
        let k = kneading_prefix(&m, 20, DEFAULT_C_TOL);
        let blocks = RlBlocks::from_sequence(&k, 1000).unwrap();
        assert_eq!(blocks.tail(), BlockTail::LInfinity);
        assert!(blocks.exponents().is_empty());
        assert_eq!(blocks.exponent(1), None);
    }

    #[test]
    fn blocks_of_truncated_prefix() {
        let blocks = RlBlocks::from_sequence(&seq("RLRL"), 1000).unwrap();
        assert_eq!(blocks.exponents(), &[1, 0]);
        assert_eq!(blocks.tail(), BlockTail::Truncated { blocks: 2 });
        assert_eq!(blocks.exact_len(), Some(1));
        assert_eq!(blocks.exponent(1), Some(1));
        assert_eq!(blocks.exponent(2), None);
    }

    #[test]
    fn blocks_reject_missing_leading_r() {
        assert_eq!(
            RlBlocks::from_sequence(&seq("LRL"), 10).unwrap_err(),
            KneadingError::MissingLeadingR
        );
    }

    #[test]
    fn cumulative_sums_are_nondecreasing() {
        for s in ["RLC", "RLRC", "RLLRLC", "RLRLLLRRC", "RLRL", "RRRR", "RLLLLRR"] {
            let blocks = RlBlocks::from_sequence(&seq(s), 100).unwrap();
            let mut mbar = 0u64;
            for k in 1..=20 {
                match blocks.exponent(k) {
                    Some(m) => {
                        let next = mbar + m;
                        assert!(next >= mbar);
                        mbar = next;
                    }
                    None => break,
                }
            }
        }
    }

    #[test]
    fn misplaced_c_is_rejected() {
        assert_eq!(
            KneadingSequence::parse("RCL").unwrap_err(),
            KneadingError::MisplacedC
        );
        assert_eq!(
            KneadingSequence::parse("RCC").unwrap_err(),
            KneadingError::MisplacedC
        );
    }

    proptest! {
        #[test]
        fn parity_compare_is_antisymmetric(a in "[LR]{1,8}", b in "[LR]{1,8}") {
            let sa = KneadingSequence::parse(&a).unwrap();
            let sb = KneadingSequence::parse(&b).unwrap();
            prop_assert_eq!(
                parity_lex_compare(&sa, &sb),
                parity_lex_compare(&sb, &sa).reverse()
            );
        }

        #[test]
        fn parity_compare_is_transitive(a in "[LR]{5}", b in "[LR]{5}", c in "[LR]{5}") {
            let sa = KneadingSequence::parse(&a).unwrap();
            let sb = KneadingSequence::parse(&b).unwrap();
            let sc = KneadingSequence::parse(&c).unwrap();
            let ab = parity_lex_compare(&sa, &sb);
            let bc = parity_lex_compare(&sb, &sc);
            if ab == bc || bc == Ordering::Equal {
                prop_assert_eq!(parity_lex_compare(&sa, &sc), ab);
            } else if ab == Ordering::Equal {
                prop_assert_eq!(parity_lex_compare(&sa, &sc), bc);
            }
        }

        #[test]
        fn c_terminated_round_trip(body in "[LR]{0,12}") {
            // word_prefix of the periodic encoding must reproduce the
            // C->L word repeated, position by position
            let text = format!("R{body}C");
            let s = KneadingSequence::parse(&text).unwrap();
            let blocks = RlBlocks::from_sequence(&s, 1000).unwrap();
            let replaced: Vec<Symbol> = s
                .symbols()
                .iter()
                .map(|&x| if x == Symbol::C { Symbol::L } else { x })
                .collect();
            let len = replaced.len();
            let word = blocks.word_prefix(3 * len);
            for (i, &w) in word.iter().enumerate() {
                prop_assert_eq!(w, replaced[i % len]);
            }
        }
    }
}
