//! Spectral-only vs spectral+prosodic comparison on a synthetic corpus: synthesize a
//! 3-class corpus, extract Model 1 and Model 2 vectors, and report held-out
//! recognition and 5-fold cross-validation rates for both.
//!
//! ```bash
//! cargo run --release -p voxemo --example surrogate_experiment
//! ```

use rayon::prelude::*;
use voxemo::eval::{
    cross_validate, evaluate, render_confusion_percent, render_recognition_table, synth_corpus, SynthCorpusSpec,
};
use voxemo::features::{extract_clip, FrontendConfig, ModelId};
use voxemo::svm::{KernelParams, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SynthCorpusSpec::default();
    let corpus = synth_corpus(&spec)?;
    let labels: Vec<String> = corpus.iter().map(|c| c.label.clone()).collect();
    println!("synthesized {} clips", corpus.len());

    let frontend = FrontendConfig::default();
    let config = TrainConfig::default();
    let mut reports = Vec::new();
    for model_id in [ModelId::Model1, ModelId::Model2] {
        let x: Vec<Vec<f64>> = corpus
            .par_iter()
            .map(|c| extract_clip(&c.clip, model_id, &frontend).map(|v| v.values))
            .collect::<Result<_, _>>()?;
        let kernel = KernelParams::for_dims(model_id.dims());
        let cv = cross_validate(model_id, &x, &labels, 5, kernel, &config, spec.seed)?;
        println!("{model_id}: 5-fold accuracies {:?}", cv.fold_accuracies);
        print!("{}", render_confusion_percent(&cv.confusion).to_text());
        reports.push(evaluate(model_id, &x, &labels, 5, kernel, &config, spec.seed)?);
    }
    println!();
    print!("{}", render_recognition_table(&reports));
    Ok(())
}
