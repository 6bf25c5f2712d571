//! Regenerates the shipped transition-matrix corpus.
//!
//! ```bash
//! cargo run -p smale-ktheory --example generate_corpus -- crates/ktheory/fixtures/corpus.json
//! ```

use smale_ktheory::corpus::{generate_corpus, CORPUS_MAX_DIM, CORPUS_SEED, CORPUS_SIZE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = generate_corpus(CORPUS_SEED, CORPUS_SIZE, CORPUS_MAX_DIM);
    // One matrix per line keeps fixture diffs readable.
    let rows = corpus
        .matrices
        .iter()
        .map(serde_json::to_string)
        .collect::<Result<Vec<_>, _>>()?;
    let json = format!(
        "{{\n  \"seed\": {},\n  \"max_dim\": {},\n  \"matrices\": [\n    {}\n  ]\n}}",
        corpus.seed,
        corpus.max_dim,
        rows.join(",\n    ")
    );
    match std::env::args().nth(1) {
        Some(path) => std::fs::write(path, json + "\n")?,
        None => println!("{json}"),
    }
    Ok(())
}
