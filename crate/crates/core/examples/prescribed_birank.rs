//! PPT states of every birank (N+1+p, N+1+k) and separable mixtures of
//! birank (N+j, N+k).

use birank::atlas;
use birank::bipartite::birank;

fn main() -> birank::Result<()> {
    let n = 4;
    println!("PPT family, N = {n}");
    for k in 0..n {
        let row: Vec<String> = (0..n)
            .map(|p| {
                atlas::prop28_state(n, k, p, None, None)
                    .and_then(|c| birank(&c.state, 1e-9))
                    .map_or_else(|e| e.to_string(), |b| b.to_string())
            })
            .collect();
        println!("  k = {k}: {}", row.join(" "));
    }
    println!("separable mixtures, N = {n}");
    for j in 1..=n {
        let row: Vec<String> = (j..=n)
            .map(|k| {
                atlas::prop25_separable(n, j, k)
                    .and_then(|c| birank(&c.state, 1e-9))
                    .map_or_else(|e| e.to_string(), |b| b.to_string())
            })
            .collect();
        println!("  j = {j}: {}", row.join(" "));
    }
    Ok(())
}
