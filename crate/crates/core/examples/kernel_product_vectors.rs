//! The six product vectors in the kernel of a two-qutrit rank-four state
//! and the subtraction that certifies entanglement of what remains.

use birank::atlas;
use birank::bipartite::birank;
use birank::numerics::C64;

fn show(v: &[C64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{:+.3}{:+.3}i", x.re, x.im)).collect();
    format!("({})", parts.join(", "))
}

fn main() -> birank::Result<()> {
    let ex = atlas::example21_sigma()?;
    for (i, v) in ex.vectors.iter().enumerate() {
        println!("psi_{}: {} (x) {}", i + 1, show(&v.a), show(&v.b));
    }
    println!("sum of the six projectors: birank {}", birank(&ex.sigma, 1e-9)?);
    let cert = atlas::example21_certificate(&ex, 1e-9)?;
    println!(
        "threshold c = {:.6}, remainder birank {}, PPT {}, c1 = {:.6}",
        cert.threshold, cert.birank_after, cert.ppt_after, cert.coefficients[0]
    );
    println!("entanglement certified: {}", cert.certifies_entanglement());
    Ok(())
}
