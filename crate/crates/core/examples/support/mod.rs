//! Synthetic encounter data shared by the prediction examples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Patients with a binary outcome and one to three encounters each. The
/// first encounter facet tracks the outcome with noise; the second is noise.
/// Items are categorical attributes such as `sex_f` or `age_2`.
pub fn encounters(patients: usize, noise: f64, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::from("container(hospital).\nfacetLabel(obj, 0, outcome).\nfacetLabel(tx, 0, marker).\nfacetLabel(tx, 1, other).\n");
    for p in 0..patients {
        let outcome = rng.random_range(0..=1);
        s += &format!("object(p{p:04}, hospital). objectUtilityVector(p{p:04}, {outcome}).\n");
        let attrs = [
            format!("sex_{}", ["f", "m"][rng.random_range(0..2)]),
            format!("age_{}", rng.random_range(0..4)),
            format!("group_{}", rng.random_range(0..2)),
        ];
        for e in 0..rng.random_range(1..=3) {
            let tid = format!("p{p:04}e{e}");
            let marker = outcome as f64 * 2.0 + rng.random_range(-noise..=noise);
            let other: f64 = rng.random_range(0.0..5.0);
            s += &format!("transaction({tid}, p{p:04}). transactionUtilityVector({tid}, {marker:.3}, {other:.3}).\n");
            for a in &attrs {
                s += &format!("item({tid}, {a}).\n");
            }
        }
    }
    s
}
