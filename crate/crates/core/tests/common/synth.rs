//! Large synthetic transport corpora for indexing and latency checks.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const NS: &str = "http://example.org/transport#";
const CLASSES: [&str; 6] = [
    "STOP_POINT",
    "CONNECTION_POINT",
    "SHELTER",
    "BANK",
    "POST_OFFICE",
    "TRIP",
];
const NAMED: [&str; 10] = [
    "Hotel",
    "Istria",
    "Trip",
    "CDG",
    "Port-Royal",
    "Montparnasse",
    "Gare",
    "Paris",
    "Banque",
    "Aeroport",
];

fn word(rng: &mut StdRng) -> String {
    if rng.random_bool(0.15) {
        NAMED[rng.random_range(0..NAMED.len())].to_string()
    } else {
        format!("w{}", rng.random_range(0..5000))
    }
}

fn phrase(rng: &mut StdRng) -> String {
    let n = rng.random_range(1..=4);
    (0..n).map(|_| word(rng)).collect::<Vec<_>>().join(" ")
}

/// Exactly `statements` distinct N-Triples lines, five per entity.
pub fn synthetic_ntriples(statements: usize, seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let entities = statements.div_ceil(5);
    let mut out = String::with_capacity(statements * 120);
    let mut written = 0;
    'outer: for e in 0..entities {
        let class = CLASSES[e % CLASSES.len()];
        let lines = [
            format!("<{NS}{class}_{e}> <{NS}type> <{NS}{class}> ."),
            format!("<{NS}{class}_{e}> <{NS}name> \"{}\" .", phrase(&mut rng)),
            format!(
                "<{NS}{class}_{e}> <{NS}description> \"{}\" .",
                phrase(&mut rng)
            ),
            format!(
                "<{NS}{class}_{e}> <{NS}next_stop> <{NS}{}_{}> .",
                CLASSES[(e + 1) % CLASSES.len()],
                e + 1
            ),
            format!(
                "<{NS}{class}_{e}> <{NS}encercles> <{NS}{}_{}> .",
                CLASSES[(e + 7) % CLASSES.len()],
                e + 7
            ),
        ];
        for line in lines {
            if written == statements {
                break 'outer;
            }
            out.push_str(&line);
            out.push('\n');
            written += 1;
        }
    }
    out
}
