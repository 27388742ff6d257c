//! Birank, PPT verdict and spectra of a few named states.

use birank::atlas;
use birank::bipartite::{birank, classify, local_ranks, partial_transpose};
use birank::numerics::eig_hermitian;

fn main() -> birank::Result<()> {
    let tau = 1e-9;
    for id in ["table1-(3,4)", "table2-(4,6)", "example26"] {
        let ex = atlas::fixed_example(id)?;
        let b = birank(&ex.state, tau)?;
        let cls = classify(&ex.state, tau)?;
        let (ra, rb) = local_ranks(&ex.state, tau)?;
        let spectrum = eig_hermitian(partial_transpose(&ex.state).matrix())?;
        println!("{id}: birank {b}, {}, local ranks ({ra}, {rb})", cls.verdict);
        println!("  partial transpose spectrum {:.4?}", spectrum.values);
    }
    let rho = atlas::tura_state(4)?;
    println!("edge family N=4: birank {}", birank(&rho, tau)?);
    Ok(())
}
