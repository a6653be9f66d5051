//! Regenerates the bundled wine study under `data/`.
//!
//! `data/wine-classic` holds the expert ratings as degenerate cells.
//! `data/wine` keeps the same values as interval centers with seeded
//! symmetric half-widths drawn uniformly from {0.25, 0.30, …, 1.00}.
//!
//! ```text
//! cargo run --example gen_wine
//! ```

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 2013;

const WINES: [&str; 6] = ["wine1", "wine2", "wine3", "wine4", "wine5", "wine6"];

struct Expert {
    file: &'static str,
    variables: &'static [&'static str],
    ratings: [&'static [f64]; 6],
}

const EXPERTS: [Expert; 3] = [
    Expert {
        file: "expert1.csv",
        variables: &["fruity", "woody", "coffee"],
        ratings: [&[1., 6., 7.], &[5., 3., 2.], &[6., 1., 1.], &[7., 1., 2.], &[2., 5., 4.], &[3., 4., 4.]],
    },
    Expert {
        file: "expert2.csv",
        variables: &["red_fruit", "roasted", "vanillin", "woody"],
        ratings: [
            &[2., 5., 7., 6.],
            &[4., 4., 4., 2.],
            &[5., 2., 1., 1.],
            &[7., 2., 1., 2.],
            &[3., 5., 6., 5.],
            &[3., 5., 4., 5.],
        ],
    },
    Expert {
        file: "expert3.csv",
        variables: &["fruity", "butter", "woody"],
        ratings: [&[3., 6., 7.], &[4., 4., 3.], &[7., 1., 1.], &[2., 2., 2.], &[2., 6., 6.], &[1., 7., 5.]],
    },
];

fn main() -> std::io::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let classic = root.join("wine-classic");
    let interval = root.join("wine");
    fs::create_dir_all(&classic)?;
    fs::create_dir_all(&interval)?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for expert in &EXPERTS {
        let header = format!("wine,{}\n", expert.variables.join(","));
        let mut point = header.clone();
        let mut boxed = header;
        for (name, row) in WINES.iter().zip(expert.ratings) {
            let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
            point.push_str(&format!("{name},{}\n", cells.join(",")));
            let cells: Vec<String> = row
                .iter()
                .map(|&x| {
                    let half = 0.05 * rng.gen_range(5..=20) as f64;
                    format!("{:.2}:{:.2}", x - half, x + half)
                })
                .collect();
            boxed.push_str(&format!("{name},{}\n", cells.join(",")));
        }
        fs::write(classic.join(expert.file), point)?;
        fs::write(interval.join(expert.file), boxed)?;
    }
    println!("wrote {} and {}", classic.display(), interval.display());
    Ok(())
}
