//! Disagreement between a sentence-level sentiment and the paper decision,
//! with a pre-filter on useful words and pattern masks.

use ehupm::masks::Mask;
use ehupm::miner::{mine, MiningConfig};
use ehupm::{assemble_dataset, parse_facts};

const CATEGORIES: &str = "
itemCategory(paper, noun). itemCategory(problem, noun). itemCategory(concern, noun).
itemCategory(reproducibility, noun). itemCategory(experiment, noun).
itemCategory(hard, adj). itemCategory(narrow, adj). itemCategory(readable, adj).
itemCategory(good, adj).
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = format!("{}{CATEGORIES}", include_str!("../data/running_example.lp"));
    let dataset = assemble_dataset(&parse_facts(&text)?)?;

    // Positive appropriateness in a rejected paper.
    let mut config = MiningConfig::new("hfirst:disagree(tx.0>0, cont.0=0)".parse()?);
    config.item_filter = "cond:tx.0>0, cont.0=0".parse()?;
    config.min_utility = 40.0;
    config.masks = vec![Mask::size(2, 3), "cover:noun@2".parse()?];
    let result = mine(&dataset, &config)?;

    println!("utility: {}", config.utility);
    println!("masks:   {}", config.masks.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" & "));
    for e in &result.entries {
        println!("  {:<28} support {} disagreement {:.1}%", e.pattern.display(&dataset), e.support, e.utility);
    }
    println!("{:?}", result.diagnostics);
    Ok(())
}
