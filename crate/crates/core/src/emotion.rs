use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The seven-emotion taxonomy of the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EmotionLabel {
    Neutral,
    Anger,
    Surprise,
    Disgust,
    Fear,
    Happiness,
    Sadness,
}

impl EmotionLabel {
    pub const ALL: [EmotionLabel; 7] = [
        EmotionLabel::Neutral,
        EmotionLabel::Anger,
        EmotionLabel::Surprise,
        EmotionLabel::Disgust,
        EmotionLabel::Fear,
        EmotionLabel::Happiness,
        EmotionLabel::Sadness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EmotionLabel::Neutral => "Neutral",
            EmotionLabel::Anger => "Anger",
            EmotionLabel::Surprise => "Surprise",
            EmotionLabel::Disgust => "Disgust",
            EmotionLabel::Fear => "Fear",
            EmotionLabel::Happiness => "Happiness",
            EmotionLabel::Sadness => "Sadness",
        }
    }

    /// Three-letter column heading used in listening-test tables.
    pub fn abbrev(self) -> &'static str {
        match self {
            EmotionLabel::Neutral => "Neu",
            EmotionLabel::Anger => "Ang",
            EmotionLabel::Surprise => "Sup",
            EmotionLabel::Disgust => "Dis",
            EmotionLabel::Fear => "Fea",
            EmotionLabel::Happiness => "Hap",
            EmotionLabel::Sadness => "Sad",
        }
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownEmotion(pub String);

impl fmt::Display for UnknownEmotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown emotion `{}`", self.0)
    }
}

impl std::error::Error for UnknownEmotion {}

impl FromStr for EmotionLabel {
    type Err = UnknownEmotion;

    /// Case-insensitive on canonical names and table abbreviations.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        EmotionLabel::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(t) || e.abbrev().eq_ignore_ascii_case(t))
            .ok_or_else(|| UnknownEmotion(s.to_string()))
    }
}
