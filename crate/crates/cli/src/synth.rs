//! Test-only generator for the committed synthetic compound collection.
//! The fixture is deliberately easy: the two activity classes use
//! disjoint atom- and bond-type ranges, so their bond-weight scales
//! differ strongly and any reasonable classifier separates them. What the
//! tests exercise is the pipeline — parsing, pairwise metrics, feature
//! export, and the classification sweep — not classifier strength.
//!
//! `fixtures/compounds_synthetic.cmp` is the canonical output of
//! `synthetic_compounds(42)`; a regular test regenerates and byte-compares
//! it so the committed file can never drift from this code.
#![cfg(test)]

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const COMPOUND_COUNT: usize = 188;
pub const ACTIVE_COUNT: usize = 125;
pub const FIXTURE_SEED: u64 = 42;

pub fn fixture_path() -> &'static str {
    concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/compounds_synthetic.cmp"
    )
}

/// Builds the whole collection as compound-format text: `ACTIVE_COUNT`
/// active molecules (ring plus three chords, light atoms), the rest
/// inactive (random tree plus two extra edges, heavy atoms). Every
/// molecule has at least 16 atoms and is connected by construction.
pub fn synthetic_compounds(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("# synthetic compound collection (generated, committed)\n");
    for k in 0..COMPOUND_COUNT {
        let class = usize::from(k < ACTIVE_COUNT) as u8;
        let _ = writeln!(out, "\ncompound c{:03} {}", k + 1, class);
        let mut bonds: BTreeSet<(usize, usize)> = BTreeSet::new();
        let n;
        if class == 1 {
            n = rng.random_range(16..=22);
            for i in 0..n {
                let _ = writeln!(out, "atom {i} {}", rng.random_range(1..=2));
            }
            for i in 0..n {
                bonds.insert(key(i, (i + 1) % n));
            }
            let mut chords = 0;
            while chords < 3 {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                if i != j && bonds.insert(key(i, j)) {
                    chords += 1;
                }
            }
        } else {
            n = rng.random_range(16..=26);
            for i in 0..n {
                let _ = writeln!(out, "atom {i} {}", rng.random_range(3..=5));
            }
            for i in 1..n {
                bonds.insert(key(rng.random_range(0..i), i));
            }
            let mut extras = 0;
            while extras < 2 {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                if i != j && bonds.insert(key(i, j)) {
                    extras += 1;
                }
            }
        }
        let (lo, hi) = if class == 1 { (1, 2) } else { (3, 4) };
        for (i, j) in bonds {
            let _ = writeln!(out, "bond {i} {j} {}", rng.random_range(lo..=hi));
        }
    }
    out
}

fn key(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

mod tests {
    use super::*;
    use crate::compounds::parse_compounds;

    /// Regenerates the committed fixture. Run explicitly when the
    /// generator changes:
    /// `cargo test -p netgauss-cli write_synthetic_fixture -- --ignored`
    #[test]
    #[ignore]
    fn write_synthetic_fixture() {
        std::fs::write(fixture_path(), synthetic_compounds(FIXTURE_SEED)).unwrap();
    }

    #[test]
    fn committed_fixture_matches_the_generator_byte_for_byte() {
        let committed = std::fs::read_to_string(fixture_path()).unwrap();
        assert_eq!(committed, synthetic_compounds(FIXTURE_SEED));
    }

    #[test]
    fn fixture_has_the_documented_shape() {
        let compounds = parse_compounds(&synthetic_compounds(FIXTURE_SEED)).unwrap();
        assert_eq!(compounds.len(), COMPOUND_COUNT);
        let active = compounds.iter().filter(|c| c.class == 1).count();
        assert_eq!(active, ACTIVE_COUNT);
        for c in &compounds {
            assert!(c.graph.n() >= 16, "{} has {} atoms", c.id, c.graph.n());
            assert!(c.graph.is_connected());
        }
        // Disjoint weight scales: active bonds peak at 2·2+2 = 6, inactive
        // bonds start at 3·3+3 = 12.
        for c in &compounds {
            let max = c
                .graph
                .edges()
                .map(|(_, _, w)| w)
                .fold(f64::NEG_INFINITY, f64::max);
            let min = c
                .graph
                .edges()
                .map(|(_, _, w)| w)
                .fold(f64::INFINITY, f64::min);
            if c.class == 1 {
                assert!(max <= 6.0, "{}: active weight {max}", c.id);
            } else {
                assert!(min >= 12.0, "{}: inactive weight {min}", c.id);
            }
        }
    }
}
