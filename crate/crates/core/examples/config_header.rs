//! Strict run configuration and the header block attached to every output.

use std::collections::BTreeMap;

use tronquee::config::{Header, RunConfig};

fn main() -> tronquee::error::Result<()> {
    let cfg = RunConfig::parse("# tighter tolerances\node_tol = 1e-13\nk_levels = 6\n")?;
    println!("canonical form:\n{}", cfg.canonical());
    let header = Header::new(&cfg, "example", BTreeMap::new());
    print!("{}", header.comment_block());
    match RunConfig::parse("odetol = 1e-13\n") {
        Err(e) => println!("rejected: {} ({})", e, e.kind()),
        Ok(_) => println!("unexpectedly accepted"),
    }
    Ok(())
}
