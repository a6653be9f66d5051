//! Classic STATIS must be reproduced exactly by the interval pipeline on
//! degenerate inputs.

use interstatis::classic::{run_classic, ClassicOptions};
use interstatis::interval::Interval;
use interstatis::matrix::{equivalence_gap, is_equivalent, IntervalMatrix, RealMatrix};
use interstatis::pipeline::{run, StudyInput, StudyOptions};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_study(seed: u64, n: usize, widths: &[usize]) -> Vec<RealMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    widths.iter().map(|&p| RealMatrix::from_fn(n, p, |_, _| rng.gen_range(-5.0..5.0))).collect()
}

fn embed(tables: &[RealMatrix]) -> StudyInput {
    StudyInput::new(tables.iter().map(IntervalMatrix::embed_classic).collect()).unwrap()
}

#[test]
fn degenerate_study_matches_classic() {
    let tables = random_study(7, 6, &[3, 3, 3]);
    let classic = run_classic(&tables, &ClassicOptions::default()).unwrap();
    let interval = run(&embed(&tables)).unwrap();
    for (name, a, b) in [
        ("T", &classic.t, &interval.t),
        ("Ev", &classic.ev, &interval.ev),
        ("Mi", &classic.mi, &interval.mi),
        ("Ei", &classic.ei, &interval.ei),
        ("X~", &classic.xtilde, &interval.xtilde),
        ("compromise", &classic.compromise, &interval.compromise),
    ] {
        assert!(is_equivalent(a, b, 1e-9).unwrap(), "{name}: gap {}", equivalence_gap(a, b));
    }
    assert!((classic.lambda1 - interval.lambda1).abs() <= 1e-9);
    for (a, b) in classic.beta.iter().zip(&interval.beta) {
        assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn normalisation_preserves_equivalence() {
    let tables = random_study(8, 5, &[2, 4]);
    let classic = run_classic(&tables, &ClassicOptions { normalize: true, ..Default::default() }).unwrap();
    let study = embed(&tables).with_options(StudyOptions { normalize_widths: true, ..Default::default() });
    let interval = run(&study).unwrap();
    assert!(is_equivalent(&classic.ei, &interval.ei, 1e-9).unwrap());
    assert!(is_equivalent(&classic.t, &interval.t, 1e-9).unwrap());
}

#[test]
fn interval_outputs_enclose_classic_outputs_of_the_centers() {
    // with tiny widths the interval result collapses onto the classic one
    let tables = random_study(9, 6, &[3, 4, 3]);
    let narrow: Vec<IntervalMatrix> = tables
        .iter()
        .map(|t| {
            IntervalMatrix::from_fn(t.n_rows(), t.n_cols(), |i, j| {
                Interval::from_center_radius(t[(i, j)], 1e-9).unwrap()
            })
        })
        .collect();
    let classic = run_classic(&tables, &ClassicOptions::default()).unwrap();
    let interval = run(&StudyInput::new(narrow).unwrap()).unwrap();
    assert!(equivalence_gap(&classic.t, &interval.t) < 1e-5);
    assert!(equivalence_gap(&classic.mi, &interval.mi) < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn corollary_holds_for_random_studies(
        seed in any::<u64>(),
        n in 3usize..8,
        widths in proptest::collection::vec(1usize..5, 1..4),
    ) {
        let tables = random_study(seed, n, &widths);
        let classic = run_classic(&tables, &ClassicOptions::default()).unwrap();
        let interval = run(&embed(&tables)).unwrap();
        prop_assert!(is_equivalent(&classic.t, &interval.t, 1e-9).unwrap());
        prop_assert!(is_equivalent(&classic.ev, &interval.ev, 1e-9).unwrap());
        prop_assert!(is_equivalent(&classic.mi, &interval.mi, 1e-9).unwrap());
        prop_assert!(is_equivalent(&classic.ei, &interval.ei, 1e-9).unwrap());
    }
}
