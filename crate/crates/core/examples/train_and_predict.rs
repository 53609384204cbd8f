//! Trains a one-vs-one RBF model on a holdout split, saves it, reloads it and
//! checks that predictions survive the round trip.
//!
//! ```bash
//! cargo run --release -p voxemo --example train_and_predict
//! ```

use rayon::prelude::*;
use voxemo::eval::{stratified_holdout, synth_corpus, SynthCorpusSpec};
use voxemo::features::{extract_clip, FrontendConfig, ModelId};
use voxemo::svm::{load_model, model_to_string, train_ovo, KernelParams, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SynthCorpusSpec {
        clips_per_class: 40,
        ..SynthCorpusSpec::default()
    };
    let corpus = synth_corpus(&spec)?;
    let model_id = ModelId::Model2;
    let cfg = FrontendConfig::default();
    let x: Vec<Vec<f64>> = corpus
        .par_iter()
        .map(|c| extract_clip(&c.clip, model_id, &cfg).map(|v| v.values))
        .collect::<Result<_, _>>()?;
    let y: Vec<String> = corpus.iter().map(|c| c.label.clone()).collect();

    let (train, test) = stratified_holdout(&y, 0.25, spec.seed)?;
    let pick =
        |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<String>) { idx.iter().map(|&i| (x[i].clone(), y[i].clone())).unzip() };
    let (tx, ty) = pick(&train);
    let model = train_ovo(
        model_id,
        &tx,
        &ty,
        KernelParams::for_dims(model_id.dims()),
        &TrainConfig::default(),
    )?;
    let support: usize = model.pairwise.iter().map(|m| m.support_vectors.len()).sum();
    println!(
        "trained on {} clips, {} pairwise models, {support} support vectors",
        tx.len(),
        model.pairwise.len()
    );

    let text = model_to_string(&model);
    let reloaded = load_model(text.as_bytes())?;
    let mut correct = 0;
    for &i in &test {
        let a = model.predict(&x[i])?;
        assert_eq!(a, reloaded.predict(&x[i])?);
        correct += usize::from(a == y[i]);
    }
    println!(
        "holdout accuracy {}/{} (saved model is {} bytes)",
        correct,
        test.len(),
        text.len()
    );
    Ok(())
}
