//! The lemma suite, optionally against a deliberately broken construction.
//!
//! `cargo run --example lemma_suite -- flip` or `-- drop`.

use fnse::construction::Fault;
use fnse::harness::{verify_lemmas, LemmaSuite};

fn main() -> fnse::Result<()> {
    let fault = match std::env::args().nth(1).as_deref() {
        Some("flip") => Fault::FlipE0Sign,
        Some("drop") => Fault::DropWeights,
        _ => Fault::None,
    };
    let suite = LemmaSuite {
        fault,
        mutation: false,
        ..LemmaSuite::default()
    };
    let report = verify_lemmas(&suite)?;
    println!("{report}");
    Ok(())
}
