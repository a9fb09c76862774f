//! Loads the small paper-review database and walks through one pattern's
//! utility matrix and a handful of utility functions, then mines it.

use ehupm::miner::{mine, support_set, MiningConfig, Pattern};
use ehupm::utility::{pattern_utility_matrix, IntraAggregator, UtilitySpec};
use ehupm::{assemble_dataset, parse_facts};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let facts = parse_facts(include_str!("../data/running_example.lp"))?;
    let dataset = assemble_dataset(&facts)?;

    let items: Vec<_> = ["paper", "reproducibility"]
        .iter()
        .map(|n| dataset.item_by_name(n).expect("item exists"))
        .collect();
    let pattern = Pattern::itemset(items.clone());
    let tids = support_set(&dataset, &pattern, false);
    let matrix = pattern_utility_matrix(&dataset, &items, &tids, IntraAggregator::Sum)?;

    println!("pattern {} occurs in {} sentences", pattern.display(&dataset), tids.len());
    for (tid, row) in tids.iter().zip(matrix.rows()) {
        println!("  {:<3} {:?}", dataset.transaction(*tid).name, row.values);
    }

    for text in [
        "hfirst:filter(obj.0):max",
        "vfirst:max(obj.0):filter",
        "vfirst:max(obj.0, obj.1):sum",
        "mixed:pearson(tx.1, obj.0)",
        "hfirst:disagree(tx.0>0, cont.0=0)",
    ] {
        let spec: UtilitySpec = text.parse()?;
        println!("  {text:<36} = {}", spec.evaluate(&matrix)?);
    }

    let mut config = MiningConfig::new("hfirst:filter(obj.0):max".parse()?);
    config.min_support = 2;
    config.min_utility = 4.0;
    let result = mine(&dataset, &config)?;
    println!("\npatterns with support >= 2 and max rating > 4:");
    for entry in &result.entries {
        println!("  {:<28} support {} utility {}", entry.pattern.display(&dataset), entry.support, entry.utility);
    }
    Ok(())
}
