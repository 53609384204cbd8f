//! Extracts Model 1 and Model 2 vectors from one synthetic clip and prints
//! the block layout of each.
//!
//! ```bash
//! cargo run -p voxemo --example feature_extraction
//! ```

use voxemo::eval::{synth_corpus, SynthCorpusSpec};
use voxemo::features::{extract_clip, FrontendConfig, ModelId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SynthCorpusSpec {
        clips_per_class: 1,
        ..SynthCorpusSpec::default()
    };
    let corpus = synth_corpus(&spec)?;
    let sample = &corpus[0];
    println!("clip {} ({})", sample.clip.source_id, sample.label);

    let cfg = FrontendConfig::default();
    for model_id in [ModelId::Model1, ModelId::Model2] {
        let v = extract_clip(&sample.clip, model_id, &cfg)?;
        println!("\n{model_id}: {} values ({})", v.values.len(), model_id.combination());
        for block in &v.layout {
            let vals = &v.values[block.offset..block.offset + block.len];
            println!(
                "  {:<14} [{:>2}..{:>2}) first {:.4}",
                block.name,
                block.offset,
                block.offset + block.len,
                vals[0]
            );
        }
    }
    Ok(())
}
