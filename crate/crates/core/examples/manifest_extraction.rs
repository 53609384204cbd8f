//! Writes a small synthetic corpus plus manifest to a temp directory, then
//! loads the manifest and extracts a feature matrix in parallel.
//!
//! ```bash
//! cargo run --release -p voxemo --example manifest_extraction
//! ```

use std::fs;

use voxemo::audio::write_wav;
use voxemo::emotion::EmotionLabel;
use voxemo::eval::{synth_corpus, SynthCorpusSpec};
use voxemo::features::{FrontendConfig, ModelId};
use voxemo::manifest::{
    extract_dataset, filter_classes, load_manifest, save_manifest, AgeBand, Manifest, ManifestEntry, Sex,
    UtteranceKind, DEFAULT_FAILURE_THRESHOLD,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("voxemo-manifest-{}", std::process::id()));
    fs::create_dir_all(dir.join("clips"))?;
    let spec = SynthCorpusSpec {
        clips_per_class: 10,
        ..SynthCorpusSpec::default()
    };
    let mut entries = Vec::new();
    for c in synth_corpus(&spec)? {
        let path = format!("clips/{}.wav", c.clip.source_id);
        fs::write(dir.join(&path), write_wav(&c.clip))?;
        entries.push(ManifestEntry {
            path,
            emotion: c.label.parse()?,
            speaker_id: "synth".into(),
            sex: Sex::Unknown,
            age_band: AgeBand::Unknown,
            kind: UtteranceKind::Sentence,
            text: None,
        });
    }
    let manifest_path = dir.join("manifest.csv");
    save_manifest(
        &Manifest {
            entries,
            sample_rate: Some(spec.sample_rate),
            base_dir: dir.clone(),
        },
        &manifest_path,
    )?;

    let manifest = load_manifest(&manifest_path)?;
    let two = filter_classes(&manifest, &[EmotionLabel::Sadness, EmotionLabel::Happiness])?;
    println!(
        "{} rows, {} after keeping Sadness and Happiness",
        manifest.len(),
        two.len()
    );

    let data = extract_dataset(
        &two,
        ModelId::Model1,
        &FrontendConfig::default(),
        DEFAULT_FAILURE_THRESHOLD,
    )?;
    println!(
        "{} x {} matrix, {} failures",
        data.matrix.len(),
        ModelId::Model1.dims(),
        data.failures.len()
    );
    println!("first row source: {}", data.source_ids[0]);
    fs::remove_dir_all(&dir)?;
    Ok(())
}
