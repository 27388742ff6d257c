//! Minimal indices and the product-vector bundle of a completely entangled
//! subspace of C^2 (x) C^N.

use birank::pencil::{
    bundle_members, ces_standard, fiber_at, fibonacci_points, minimal_indices, pencil_from_subspace,
    span_dimension, spanning_product_vectors,
};

fn main() -> birank::Result<()> {
    let n = 5;
    for k in 1..n {
        let p = pencil_from_subspace(n, &ces_standard(n, k)?, 1e-9)?;
        let indices = minimal_indices(&p)?;
        let fiber = fiber_at(&p, fibonacci_points(7)[3])?;
        let span = spanning_product_vectors(&p)?;
        let members = bundle_members(&p, &fibonacci_points(4 * n))?;
        println!(
            "N = {n}, k = {k}: indices {indices:?}, fiber dimension {}, {} spanning vectors, partial conjugates of {} members span {}",
            fiber.basis.len(),
            span.len(),
            members.len(),
            span_dimension(&members, true, 1e-9)?
        );
    }
    Ok(())
}
