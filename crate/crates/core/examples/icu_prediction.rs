//! Pattern-based outcome prediction: fit one regression line per
//! (pattern, facet) pair, combine them per encounter, and cross-validate.

mod support;

use ehupm::prediction::{build_predictors, classify, cross_validate, predict, PredictorConfig};
use ehupm::{assemble_dataset, parse_facts};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dataset = assemble_dataset(&parse_facts(&support::encounters(300, 1.2, 7))?)?;
    let config = PredictorConfig {
        min_support: 10,
        min_abs_gamma: 0.5,
        max_len: Some(3),
        ..Default::default()
    };

    let set = build_predictors(&dataset, &config)?;
    println!("{} predictors, strongest:", set.len());
    let mut ranked: Vec<_> = set.predictors.iter().collect();
    ranked.sort_by(|a, b| b.gamma.abs().total_cmp(&a.gamma.abs()));
    for p in ranked.iter().take(5) {
        println!(
            "  {:<32} facet {} support {:>3} gamma {:+.3} line {:.3}x{:+.3}",
            p.pattern.display(&dataset),
            dataset.label(ehupm::FacetRef::tx(p.facet)).unwrap_or("?"),
            p.support,
            p.gamma,
            p.fit.slope,
            p.fit.intercept
        );
    }

    let first = &dataset.transactions()[0];
    match predict(&set, &dataset, first.id) {
        Some(e) => println!("encounter {}: estimate {e:.3}, class {}", first.name, classify(e)),
        None => println!("encounter {}: no prediction", first.name),
    }

    let report = cross_validate(&dataset, &config, 5, 42)?;
    for f in &report.folds {
        println!(
            "  fold {}: {} predictors, accuracy {:.3}, missing {}/{}",
            f.fold, f.predictors, f.accuracy, f.missing, f.test_transactions
        );
    }
    println!(
        "mean accuracy {:.3} (variance {:.4}), missing rate {:.3}",
        report.mean_accuracy, report.accuracy_variance, report.missing_rate
    );
    Ok(())
}
