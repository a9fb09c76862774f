//! Sequence mode: item order inside a transaction matters. Gaps are allowed
//! unless the contiguous flag is set.

use ehupm::miner::{mine, MiningConfig, Mode};
use ehupm::{assemble_dataset, parse_facts};

const NOTES: &str = "
container(ward). object(a, ward). object(b, ward).
transaction(n1, a). transaction(n2, a). transaction(n3, b). transaction(n4, b).
item(fever, n1, 1, 1). item(cough, n1, 2, 1). item(rest, n1, 3, 1).
item(fever, n2, 1, 1). item(rest, n2, 2, 1).
item(cough, n3, 1, 1). item(fever, n3, 2, 1). item(rest, n3, 3, 1).
item(fever, n4, 1, 1). item(cough, n4, 2, 1).
transactionUtilityVector(n1, 3). transactionUtilityVector(n2, 1).
transactionUtilityVector(n3, 2). transactionUtilityVector(n4, 5).
facetLabel(tx, 0, severity).
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dataset = assemble_dataset(&parse_facts(NOTES)?)?;
    for contiguous in [false, true] {
        let mut config = MiningConfig::new("hfirst:filter(tx.0):sum".parse()?);
        config.mode = Mode::Sequence;
        config.contiguous = contiguous;
        config.min_support = 2;
        config.min_len = 2;
        let result = mine(&dataset, &config)?;
        println!("contiguous = {contiguous}");
        for e in &result.entries {
            println!("  {:<22} support {} severity {}", e.pattern.display(&dataset), e.support, e.utility);
        }
    }
    Ok(())
}
