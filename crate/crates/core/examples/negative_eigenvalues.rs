//! NPT states whose partial transpose has a prescribed number of negative
//! eigenvalues.

use birank::atlas;
use birank::bipartite::classify;

fn main() -> birank::Result<()> {
    for n in 4..=6 {
        for k in 1..n - 1 {
            let ex = atlas::example29_state(n, k, None)?;
            let cls = classify(&ex.state, 1e-9)?;
            println!(
                "N = {n}, k = {k}: {} negative eigenvalues (min {:.4}), cross defect {:.1e}",
                cls.negative_count,
                cls.min_eigenvalue,
                atlas::parts_cross_defect(&ex.parts)
            );
        }
    }
    let single = atlas::example29_single(4)?;
    println!("single: {} negative eigenvalue", classify(&single, 1e-9)?.negative_count);
    Ok(())
}
