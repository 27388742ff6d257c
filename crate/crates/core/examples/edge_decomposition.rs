//! Splitting a state of birank (N+1, N+1) into product summands and a core.

use birank::atlas;
use birank::bipartite::{birank, ProductVector};
use birank::numerics::c;
use birank::surgery::theorem23_decompose;

fn main() -> birank::Result<()> {
    let core = atlas::tura_state(4)?.extend_b(5)?;
    let mut b = vec![c(0.0, 0.0); 5];
    b[4] = c(1.0, 0.0);
    let extra = ProductVector::new(vec![c(1.0, 0.0), c(0.0, 1.0)], b)?;
    let rho = core.plus_projector(1.0, &extra.tensor());
    println!("input birank {}", birank(&rho, 1e-9)?);
    let d = theorem23_decompose(&rho, 1024, 1e-9)?;
    println!("{} product summands, core {:?}", d.summands.len(), d.core_kind);
    println!("core birank {}, direct sum verified {}", birank(&d.core, 1e-9)?, d.direct_sum_verified);
    if let Some(edge) = &d.edge {
        println!("edge test residual {:.3e} at grid {}", edge.residual, edge.grid_resolution);
    }
    Ok(())
}
