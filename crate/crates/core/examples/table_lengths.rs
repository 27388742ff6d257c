//! Lengths of the qubit-qutrit table rows, computed without a witness.

use birank::atlas::{self, FIXED_IDS};
use birank::bipartite::birank;
use birank::surgery::length_2x3;

fn main() -> birank::Result<()> {
    for id in FIXED_IDS.iter().filter(|id| id.starts_with("table2")) {
        let ex = atlas::fixed_example(id)?;
        let res = length_2x3(&ex.state, None, 1e-9)?;
        let chain: Vec<String> = res.chain.iter().map(|b| b.to_string()).collect();
        println!(
            "{id}: birank {}, length {}, chain {}, error {:.1e}",
            birank(&ex.state, 1e-9)?,
            res.length,
            chain.join(" -> "),
            res.reconstruction_error
        );
    }
    Ok(())
}
