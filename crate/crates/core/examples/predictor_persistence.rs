//! Saves a fitted predictor set and reloads it against the same dataset.

mod support;

use std::io::BufReader;

use ehupm::prediction::{build_predictors, coverage_metrics, read_predictors, write_predictors, PredictorConfig};
use ehupm::{assemble_dataset, parse_facts};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dataset = assemble_dataset(&parse_facts(&support::encounters(150, 1.0, 11))?)?;
    let config = PredictorConfig {
        min_support: 8,
        max_len: Some(2),
        ..Default::default()
    };
    let set = build_predictors(&dataset, &config)?;

    let mut buffer = Vec::new();
    write_predictors(&set, &dataset, &mut buffer)?;
    let text = String::from_utf8(buffer)?;
    for line in text.lines().take(4) {
        println!("{line}");
    }

    let loaded = read_predictors(BufReader::new(text.as_bytes()), &dataset)?;
    println!("reloaded {} of {} predictors, {} dropped", loaded.set.len(), set.len(), loaded.dropped);
    let coverage = coverage_metrics(&dataset, &loaded.set.patterns(), false);
    println!(
        "transaction coverage {:.3}, combination coverage {:.3}",
        coverage.transaction, coverage.combination
    );
    Ok(())
}
