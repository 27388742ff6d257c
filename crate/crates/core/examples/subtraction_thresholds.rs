//! The two thresholds of a product-state subtraction and the four ways the
//! birank can drop.

use birank::sampling;
use birank::surgery::{subtract, subtraction_analysis};

fn main() -> birank::Result<()> {
    let mut rng = sampling::rng(11);
    for count in [3, 5, 8] {
        let (rho, terms) = sampling::separable(&mut rng, 2, 3, count)?;
        let pv = &terms[0].vector;
        let an = subtraction_analysis(&rho, pv, 1e-9)?;
        println!(
            "{count} terms: lambda0 = {:.6}, lambda1 = {:.6}, g = {:+.4}",
            an.lambda0, an.lambda1, an.g
        );
        for lambda in [0.5 * an.threshold(), an.threshold()] {
            let sub = subtract(&rho, pv, lambda, 1e-9)?;
            println!(
                "  lambda = {lambda:.6}: {} -> {} (predicted {})",
                sub.before, sub.observed, sub.predicted
            );
        }
    }
    Ok(())
}
