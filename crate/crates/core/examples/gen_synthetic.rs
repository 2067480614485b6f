//! Write a synthetic treebank to standard output.
//!
//! Usage: cargo run -p edparse --example gen_synthetic -- [COUNT] [SEED]

use std::io::{self, Write};

fn main() -> io::Result<()> {
    let mut args = std::env::args().skip(1);
    let count = args.next().map_or(50, |a| a.parse().expect("COUNT must be a number"));
    let seed = args.next().map_or(2020, |a| a.parse().expect("SEED must be a number"));
    let doc = edparse::synth::synthetic_treebank(count, seed);
    let mut out = io::stdout().lock();
    out.write_all(edparse::serialize_conllu(&doc).as_bytes())?;
    out.flush()
}
