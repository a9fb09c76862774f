//! Classical high-utility itemset mining: one external utility per item,
//! quantities per transaction, and utility summed over occurrences.

use ehupm::miner::{mine, MiningConfig};
use ehupm::utility::UtilitySpec;
use ehupm::{assemble_dataset, parse_facts, FacetRef};

const SHOP: &str = "
container(shop). object(day1, shop). object(day2, shop).
transaction(t1, day1). transaction(t2, day1). transaction(t3, day2). transaction(t4, day2).

% item(Item, Transaction, Position, Quantity)
item(bread, t1, 1, 2). item(milk, t1, 2, 1). item(cheese, t1, 3, 1).
item(bread, t2, 1, 1). item(cheese, t2, 2, 3).
item(milk, t3, 1, 2). item(wine, t3, 2, 1).
item(bread, t4, 1, 1). item(cheese, t4, 2, 1). item(wine, t4, 3, 2).

% unit profit
itemUtilityVector(bread, 1). itemUtilityVector(milk, 2).
itemUtilityVector(cheese, 4). itemUtilityVector(wine, 9).
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dataset = assemble_dataset(&parse_facts(SHOP)?)?;
    let mut config = MiningConfig::new(UtilitySpec::filter_sum(FacetRef::item(0)));
    config.min_utility = 15.0;
    let result = mine(&dataset, &config)?;
    println!("itemsets with total profit above 15:");
    for e in &result.entries {
        println!("  {:<24} support {} profit {}", e.pattern.display(&dataset), e.support, e.utility);
    }
    println!("{:?}", result.diagnostics);
    Ok(())
}
