//! Sweeps occurrence and correlation thresholds and prints long-format CSV
//! ready for plotting accuracy, missing rate and coverage.

mod support;

use ehupm::cli::emit_plot_data;
use ehupm::prediction::{sweep, PredictorConfig};
use ehupm::{assemble_dataset, parse_facts};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dataset = assemble_dataset(&parse_facts(&support::encounters(200, 1.5, 3))?)?;
    let config = PredictorConfig {
        max_len: Some(2),
        ..Default::default()
    };
    let min_supports = [5, 10, 15, 20, 25];
    let thresholds = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
    let cells = sweep(&dataset, &config, &min_supports, &thresholds, Some((5, 0)))?;
    print!("{}", emit_plot_data(&cells));
    Ok(())
}
