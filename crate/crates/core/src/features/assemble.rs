use super::pitch::PitchTrack;
use super::stats::{stats19, SeriesStats19};
use super::{FeatureError, ModelId};

/// Named contiguous slice of a [`FeatureVector`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub name: &'static str,
    pub offset: usize,
    pub len: usize,
}

/// Utterance-level descriptor for one feature combination.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub model_id: ModelId,
    pub values: Vec<f64>,
    pub layout: Vec<Block>,
}

impl FeatureVector {
    pub fn block(&self, name: &str) -> Option<&[f64]> {
        self.layout
            .iter()
            .find(|b| b.name == name)
            .map(|b| &self.values[b.offset..b.offset + b.len])
    }
}

/// Per-coefficient mean followed by per-coefficient population std.
fn mean_std_block(frames: &[Vec<f64>], name: &'static str) -> Result<Vec<f64>, FeatureError> {
    let first = frames.first().ok_or(FeatureError::MissingBlock(name))?;
    let dims = first.len();
    if frames.iter().any(|f| f.len() != dims) {
        return Err(FeatureError::DimensionMismatch {
            expected: dims,
            found: frames.iter().map(Vec::len).find(|&l| l != dims).unwrap_or(0),
        });
    }
    let n = frames.len() as f64;
    let means: Vec<f64> = (0..dims)
        .map(|d| frames.iter().map(|f| f[d]).sum::<f64>() / n)
        .collect();
    let stds = (0..dims).map(|d| {
        let var = frames.iter().map(|f| (f[d] - means[d]).powi(2)).sum::<f64>() / n;
        var.sqrt()
    });
    let mut out = means.clone();
    out.extend(stds);
    Ok(out)
}

/// Builds a Model 1 (MFCC, LPCC) or Model 2 (MFCC, LPCC, energy, pitch) vector.
///
/// An utterance with no voiced frame gets an all-zero pitch block.
pub fn assemble_features(
    model_id: ModelId,
    mfcc_frames: &[Vec<f64>],
    lpcc_frames: &[Vec<f64>],
    energy: Option<&[f64]>,
    pitch: Option<&PitchTrack>,
) -> Result<FeatureVector, FeatureError> {
    if matches!(model_id, ModelId::Raw(_)) {
        return Err(FeatureError::UnsupportedModel(model_id));
    }
    let mut values = Vec::with_capacity(model_id.dims());
    let mut layout = Vec::new();
    let mut push = |name: &'static str, block: Vec<f64>| {
        layout.push(Block {
            name,
            offset: values.len(),
            len: block.len(),
        });
        values.extend(block);
    };

    push("mfcc", mean_std_block(mfcc_frames, "mfcc")?);
    push("lpcc", mean_std_block(lpcc_frames, "lpcc")?);

    if model_id == ModelId::Model2 {
        let energy = energy.ok_or(FeatureError::MissingBlock("energy"))?;
        let pitch = pitch.ok_or(FeatureError::MissingBlock("pitch"))?;
        push("energy", stats19(energy)?.to_array().to_vec());
        let voiced = pitch.voiced();
        let pitch_block = if voiced.is_empty() {
            SeriesStats19::default()
        } else {
            stats19(&voiced)?
        };
        push("pitch", pitch_block.to_array().to_vec());
    }

    if values.len() != model_id.dims() {
        return Err(FeatureError::DimensionMismatch {
            expected: model_id.dims(),
            found: values.len(),
        });
    }
    Ok(FeatureVector {
        model_id,
        values,
        layout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frames(n: usize, dims: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..dims).map(|d| (i * dims + d) as f64).collect())
            .collect()
    }

    fn track() -> PitchTrack {
        PitchTrack {
            frames: vec![Some(150.0), None, Some(160.0)],
            fmin: 60.0,
            fmax: 400.0,
        }
    }

    #[test]
    fn model_lengths_and_partition() {
        let m = frames(5, 12);
        let e = [1.0, 2.0, 3.0];
        let v1 = assemble_features(ModelId::Model1, &m, &m, None, None).unwrap();
        assert_eq!(v1.values.len(), 48);
        let v2 = assemble_features(ModelId::Model2, &m, &m, Some(&e), Some(&track())).unwrap();
        assert_eq!(v2.values.len(), 86);
        let mut offset = 0;
        for b in &v2.layout {
            assert_eq!(b.offset, offset);
            offset += b.len;
        }
        assert_eq!(offset, 86);
        assert_eq!(
            v2.layout.iter().map(|b| b.name).collect::<Vec<_>>(),
            ["mfcc", "lpcc", "energy", "pitch"]
        );
    }

    #[test]
    fn identical_frames_have_zero_std() {
        let m = vec![vec![0.3; 12]; 7];
        let v = assemble_features(ModelId::Model1, &m, &m, None, None).unwrap();
        assert!(v.block("mfcc").unwrap()[12..].iter().all(|&s| s == 0.0));
    }

    #[test]
    fn unvoiced_utterance_has_zero_pitch_block() {
        let m = frames(3, 12);
        let silent = PitchTrack {
            frames: vec![None; 3],
            fmin: 60.0,
            fmax: 400.0,
        };
        let v = assemble_features(ModelId::Model2, &m, &m, Some(&[0.0; 3]), Some(&silent)).unwrap();
        assert!(v.block("pitch").unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn model2_requires_prosody() {
        let m = frames(3, 12);
        assert_eq!(
            assemble_features(ModelId::Model2, &m, &m, None, Some(&track())),
            Err(FeatureError::MissingBlock("energy"))
        );
        assert_eq!(
            assemble_features(ModelId::Model2, &m, &m, Some(&[1.0]), None),
            Err(FeatureError::MissingBlock("pitch"))
        );
    }
}
