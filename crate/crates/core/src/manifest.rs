//! Corpus index: one row per clip with emotion and speaker metadata, and
//! batch feature extraction over it.
//!
//! The file is comma-separated with the header
//! `path,emotion,speaker_id,sex,age_band,kind,text`. An optional first line
//! `# sample_rate=N` declares the rate every clip must have. Relative paths
//! resolve against the manifest's directory.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::audio::parse_wav;
use crate::emotion::EmotionLabel;
use crate::features::{extract_clip, FeatureError, FeatureMatrix, FrontendConfig, ModelId};

pub const HEADER: [&str; 7] = ["path", "emotion", "speaker_id", "sex", "age_band", "kind", "text"];
pub const DEFAULT_FAILURE_THRESHOLD: f64 = 0.10;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("bad header: expected `{}`, found `{found}`", HEADER.join(","))]
    BadHeader { found: String },
    #[error("line {line}: missing column `{column}`")]
    MissingColumn { line: u64, column: &'static str },
    #[error("line {line}: unknown emotion `{value}`")]
    UnknownEmotion { line: u64, value: String },
    #[error("line {line}: invalid {column} `{value}`")]
    InvalidField {
        line: u64,
        column: &'static str,
        value: String,
    },
    #[error("line {line}: duplicate path `{path}`")]
    DuplicatePath { line: u64, path: String },
    #[error("bad sample rate declaration `{0}`")]
    BadSampleRate(String),
    #[error("no entries match the requested classes")]
    EmptyResult,
    #[error("{failed} of {total} files failed")]
    TooManyFailures {
        failed: usize,
        total: usize,
        diagnostics: Vec<FileFailure>,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sex {
    M,
    F,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgeBand {
    Age12To18,
    Age18To25,
    Age25To40,
    Age40To60,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UtteranceKind {
    Word,
    Sentence,
    Passage,
}

macro_rules! text_enum {
    ($ty:ty, $($variant:path => $text:literal),+ $(,)?) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($variant => $text),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = ();

            fn from_str(s: &str) -> Result<Self, ()> {
                let s = s.trim();
                $(if s.eq_ignore_ascii_case($text) { return Ok($variant); })+
                Err(())
            }
        }
    };
}

text_enum!(Sex, Sex::M => "M", Sex::F => "F", Sex::Unknown => "unknown");
text_enum!(
    AgeBand,
    AgeBand::Age12To18 => "12-18",
    AgeBand::Age18To25 => "18-25",
    AgeBand::Age25To40 => "25-40",
    AgeBand::Age40To60 => "40-60",
    AgeBand::Unknown => "unknown",
);
text_enum!(
    UtteranceKind,
    UtteranceKind::Word => "word",
    UtteranceKind::Sentence => "sentence",
    UtteranceKind::Passage => "passage",
);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: String,
    pub emotion: EmotionLabel,
    pub speaker_id: String,
    pub sex: Sex,
    pub age_band: AgeBand,
    pub kind: UtteranceKind,
    pub text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    pub sample_rate: Option<u32>,
    /// Directory that relative entry paths resolve against.
    pub base_dir: PathBuf,
}

impl Manifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        self.base_dir.join(&entry.path)
    }

    /// Serializes to the manifest text format.
    pub fn to_csv(&self) -> Result<String, ManifestError> {
        let mut out = Vec::new();
        if let Some(rate) = self.sample_rate {
            out.extend_from_slice(format!("# sample_rate={rate}\n").as_bytes());
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(HEADER)?;
            for e in &self.entries {
                w.write_record([
                    e.path.as_str(),
                    e.emotion.name(),
                    e.speaker_id.as_str(),
                    e.sex.as_str(),
                    e.age_band.as_str(),
                    e.kind.as_str(),
                    e.text.as_deref().unwrap_or(""),
                ])?;
            }
            w.flush().map_err(csv::Error::from)?;
        }
        Ok(String::from_utf8(out).expect("csv writer emits the UTF-8 it was given"))
    }
}

fn parse_rate_line(line: &str) -> Result<Option<u32>, ManifestError> {
    let Some(rest) = line.trim().strip_prefix('#') else {
        return Ok(None);
    };
    let Some(value) = rest.trim().strip_prefix("sample_rate=") else {
        return Ok(None);
    };
    value
        .trim()
        .parse::<u32>()
        .ok()
        .filter(|&r| r > 0)
        .map(Some)
        .ok_or_else(|| ManifestError::BadSampleRate(value.trim().to_string()))
}

/// Parses manifest text; relative paths resolve against `base_dir`.
pub fn parse_manifest(text: &str, base_dir: impl Into<PathBuf>) -> Result<Manifest, ManifestError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let first = text.lines().next().unwrap_or_default();
    let sample_rate = parse_rate_line(first)?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().map(str::trim).ne(HEADER) {
        return Err(ManifestError::BadHeader {
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<&str, ManifestError> {
            record.get(i).map(str::trim).ok_or(ManifestError::MissingColumn {
                line,
                column: HEADER[i],
            })
        };
        let invalid = |i: usize, value: &str| ManifestError::InvalidField {
            line,
            column: HEADER[i],
            value: value.to_string(),
        };

        let path = field(0)?;
        if path.is_empty() {
            return Err(invalid(0, path));
        }
        let emotion = field(1)?;
        let emotion = emotion
            .parse::<EmotionLabel>()
            .map_err(|_| ManifestError::UnknownEmotion {
                line,
                value: emotion.to_string(),
            })?;
        let speaker_id = field(2)?;
        let sex = field(3)?;
        let sex = sex.parse::<Sex>().map_err(|_| invalid(3, sex))?;
        let age_band = field(4)?;
        let age_band = age_band.parse::<AgeBand>().map_err(|_| invalid(4, age_band))?;
        let kind = field(5)?;
        let kind = kind.parse::<UtteranceKind>().map_err(|_| invalid(5, kind))?;
        // The transcription column may be omitted entirely.
        let text = record.get(6).filter(|t| !t.is_empty()).map(str::to_string);

        if !seen.insert(path.to_string()) {
            return Err(ManifestError::DuplicatePath {
                line,
                path: path.to_string(),
            });
        }
        entries.push(ManifestEntry {
            path: path.to_string(),
            emotion,
            speaker_id: speaker_id.to_string(),
            sex,
            age_band,
            kind,
            text,
        });
    }
    Ok(Manifest {
        entries,
        sample_rate,
        base_dir: base_dir.into(),
    })
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest, ManifestError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| ManifestError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_manifest(&text, base)
}

pub fn save_manifest(manifest: &Manifest, path: impl AsRef<Path>) -> Result<(), ManifestError> {
    let path = path.as_ref();
    fs::write(path, manifest.to_csv()?).map_err(|e| ManifestError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Keeps entries whose emotion is in `classes`, preserving order.
pub fn filter_classes(manifest: &Manifest, classes: &[EmotionLabel]) -> Result<Manifest, ManifestError> {
    let keep: BTreeSet<EmotionLabel> = classes.iter().copied().collect();
    let entries: Vec<ManifestEntry> = manifest
        .entries
        .iter()
        .filter(|e| keep.contains(&e.emotion))
        .cloned()
        .collect();
    if entries.is_empty() {
        return Err(ManifestError::EmptyResult);
    }
    Ok(Manifest {
        entries,
        ..manifest.clone()
    })
}

/// Why one manifest entry produced no feature row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileFailure {
    pub index: usize,
    pub path: String,
    pub message: String,
}

impl fmt::Display for FileFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedDataset {
    /// Rows labelled with emotion names, in manifest order.
    pub matrix: FeatureMatrix,
    /// Manifest path of each row.
    pub source_ids: Vec<String>,
    pub failures: Vec<FileFailure>,
}

fn extract_entry(
    manifest: &Manifest,
    entry: &ManifestEntry,
    model_id: ModelId,
    frontend: &FrontendConfig,
) -> Result<Vec<f64>, String> {
    let path = manifest.resolve(entry);
    let bytes = fs::read(&path).map_err(|e| e.to_string())?;
    let clip = parse_wav(&bytes, entry.path.clone()).map_err(|e| e.to_string())?;
    if let Some(rate) = manifest.sample_rate {
        if clip.sample_rate != rate {
            return Err(format!("sample rate {} differs from declared {rate}", clip.sample_rate));
        }
    }
    extract_clip(&clip, model_id, frontend)
        .map(|v| v.values)
        .map_err(|e: FeatureError| e.to_string())
}

/// Extracts one feature row per readable entry, in parallel.
///
/// Fails only when the fraction of failed files exceeds `failure_threshold`.
pub fn extract_dataset(
    manifest: &Manifest,
    model_id: ModelId,
    frontend: &FrontendConfig,
    failure_threshold: f64,
) -> Result<ExtractedDataset, ManifestError> {
    let results: Vec<Result<Vec<f64>, String>> = manifest
        .entries
        .par_iter()
        .map(|e| extract_entry(manifest, e, model_id, frontend))
        .collect();

    let mut matrix = FeatureMatrix {
        model_id,
        labels: Vec::new(),
        rows: Vec::new(),
    };
    let mut source_ids = Vec::new();
    let mut failures = Vec::new();
    for (index, (entry, result)) in manifest.entries.iter().zip(results).enumerate() {
        match result {
            Ok(row) => {
                matrix.labels.push(entry.emotion.name().to_string());
                matrix.rows.push(row);
                source_ids.push(entry.path.clone());
            }
            Err(message) => failures.push(FileFailure {
                index,
                path: entry.path.clone(),
                message,
            }),
        }
    }
    let total = manifest.len();
    if total == 0 || failures.len() as f64 > failure_threshold * total as f64 || matrix.is_empty() {
        return Err(ManifestError::TooManyFailures {
            failed: failures.len(),
            total,
            diagnostics: failures,
        });
    }
    Ok(ExtractedDataset {
        matrix,
        source_ids,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# sample_rate=16000\n\
path,emotion,speaker_id,sex,age_band,kind,text\n\
a.wav,Sadness,s01,F,18-25,word,\n\
b.wav,happiness,s02,M,40-60,sentence,\"hello, world\"\n\
c.wav,NEUTRAL,s03,unknown,unknown,passage\n";

    #[test]
    fn parses_sample() {
        let m = parse_manifest(SAMPLE, "").unwrap();
        assert_eq!(m.sample_rate, Some(16000));
        assert_eq!(m.len(), 3);
        assert_eq!(m.entries[1].emotion, EmotionLabel::Happiness);
        assert_eq!(m.entries[1].text.as_deref(), Some("hello, world"));
        assert_eq!(m.entries[2].text, None);
        assert_eq!(m.entries[2].age_band, AgeBand::Unknown);
    }

    #[test]
    fn round_trip() {
        let m = parse_manifest(SAMPLE, "").unwrap();
        assert_eq!(parse_manifest(&m.to_csv().unwrap(), "").unwrap(), m);
    }

    #[test]
    fn rejects_joy() {
        let text = "path,emotion,speaker_id,sex,age_band,kind,text\na.wav,joy,s,F,18-25,word,\n";
        assert!(matches!(
            parse_manifest(text, ""),
            Err(ManifestError::UnknownEmotion { value, .. }) if value == "joy"
        ));
    }

    #[test]
    fn rejects_duplicate_path() {
        let text = "path,emotion,speaker_id,sex,age_band,kind,text\n\
a.wav,Fear,s,F,18-25,word,\na.wav,Anger,s,F,18-25,word,\n";
        assert!(matches!(
            parse_manifest(text, ""),
            Err(ManifestError::DuplicatePath { .. })
        ));
    }

    #[test]
    fn rejects_bad_header_and_short_rows() {
        let text = "file,emotion,speaker_id,sex,age_band,kind,text\n";
        assert!(matches!(parse_manifest(text, ""), Err(ManifestError::BadHeader { .. })));
        let text = "path,emotion,speaker_id,sex,age_band,kind,text\na.wav,Fear,s,F\n";
        assert!(matches!(
            parse_manifest(text, ""),
            Err(ManifestError::MissingColumn { column: "age_band", .. })
        ));
    }

    #[test]
    fn filter_keeps_order_and_rejects_empty() {
        let m = parse_manifest(SAMPLE, "").unwrap();
        let f = filter_classes(&m, &[EmotionLabel::Neutral, EmotionLabel::Sadness]).unwrap();
        let paths: Vec<_> = f.entries.iter().map(|e| e.path.as_str()).collect();
        assert_eq!(paths, ["a.wav", "c.wav"]);
        assert_eq!(filter_classes(&m, &EmotionLabel::ALL).unwrap(), m);
        assert!(matches!(
            filter_classes(&m, &[EmotionLabel::Fear]),
            Err(ManifestError::EmptyResult)
        ));
    }
}
