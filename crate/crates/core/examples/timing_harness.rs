//! Reports mining and cross-validation wall time on synthetic data of
//! growing size. Numbers are informational only.
//!
//! Usage: `cargo run --release --example timing_harness [threads]`

mod support;

use std::time::Instant;

use ehupm::miner::{mine, MiningConfig};
use ehupm::prediction::{cross_validate, PredictorConfig};
use ehupm::{assemble_dataset, parse_facts};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let threads: usize = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(0);
    println!("patients,transactions,mine_ms,patterns,cv_ms");
    for patients in [250, 500, 1000, 2000] {
        let dataset = assemble_dataset(&parse_facts(&support::encounters(patients, 1.2, 1))?)?;

        let mut config = MiningConfig::new("vfirst:max(tx.0, tx.1):sum".parse()?);
        config.min_support = 5;
        config.threads = threads;
        let start = Instant::now();
        let result = mine(&dataset, &config)?;
        let mine_ms = start.elapsed().as_secs_f64() * 1e3;

        let cv = PredictorConfig {
            threads,
            ..Default::default()
        };
        let start = Instant::now();
        cross_validate(&dataset, &cv, 5, 0)?;
        let cv_ms = start.elapsed().as_secs_f64() * 1e3;

        println!(
            "{patients},{},{mine_ms:.1},{},{cv_ms:.1}",
            dataset.transactions().len(),
            result.entries.len()
        );
    }
    Ok(())
}
