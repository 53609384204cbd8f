//! Text feature matrix: one `label,v1,...,vD` row per utterance.

use std::fmt::Write as _;

use crate::numfmt::sig9;

use super::{FeatureError, ModelId};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub model_id: ModelId,
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (label, row) in self.labels.iter().zip(&self.rows) {
            out.push_str(label);
            for v in row {
                let _ = write!(out, ",{}", sig9(*v));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text form. The model is inferred from the row width
    /// (48 or 86 columns; anything else is a raw matrix).
    pub fn from_text(text: &str) -> Result<Self, FeatureError> {
        let mut labels = Vec::new();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split(',');
            let label = fields.next().unwrap_or_default().trim();
            if label.is_empty() {
                return Err(FeatureError::MalformedMatrix(format!(
                    "line {}: empty label",
                    lineno + 1
                )));
            }
            let row = fields
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| FeatureError::MalformedMatrix(format!("line {}: {e}", lineno + 1)))?;
            if row.is_empty() || row.iter().any(|v| !v.is_finite()) {
                return Err(FeatureError::MalformedMatrix(format!(
                    "line {}: no finite values",
                    lineno + 1
                )));
            }
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(FeatureError::DimensionMismatch {
                        expected: first.len(),
                        found: row.len(),
                    });
                }
            }
            labels.push(label.to_string());
            rows.push(row);
        }
        let dims = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| FeatureError::MalformedMatrix("no rows".into()))?;
        Ok(Self {
            model_id: ModelId::from_dims(dims),
            labels,
            rows,
        })
    }
}
