//! Writing a state file and reading it back.

use birank::atlas;
use birank::io::{parse_state, write_state, Meta};
use serde_json::json;

fn main() -> birank::Result<()> {
    let rho = atlas::prop2_sigma(1.0, 2.0, 0.5, 1.5)?;
    let meta = Meta::new("prop2", json!({ "a": 1.0, "b": 2.0, "c": 0.5, "d": 1.5 }), 1e-9);
    let text = write_state(&rho, Some(&meta))?;
    let back = parse_state(&text)?;
    let again = write_state(&back.state, back.meta.as_ref())?;
    println!("{} bytes, identical after round trip: {}", text.len(), text == again);
    println!("max entry difference {:e}", back.state.matrix().max_abs_diff(rho.matrix()));
    Ok(())
}
