//! Confusion matrices and their row-percentage tables.

use std::fmt::Write as _;

use serde::Serialize;

use crate::emotion::EmotionLabel;

use super::EvalError;

/// Rows are actual (intended) classes, columns assigned (heard) classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

pub fn build_confusion<A: AsRef<str>, B: AsRef<str>>(
    actual: &[A],
    assigned: &[B],
    classes: &[String],
) -> Result<ConfusionMatrix, EvalError> {
    if actual.len() != assigned.len() {
        return Err(EvalError::LengthMismatch {
            left: actual.len(),
            right: assigned.len(),
        });
    }
    let index = |l: &str| {
        classes
            .iter()
            .position(|c| c == l)
            .ok_or_else(|| EvalError::UnknownLabel(l.to_string()))
    };
    let n = classes.len();
    let mut counts = vec![vec![0u64; n]; n];
    for (a, p) in actual.iter().zip(assigned) {
        counts[index(a.as_ref())?][index(p.as_ref())?] += 1;
    }
    Ok(ConfusionMatrix {
        classes: classes.to_vec(),
        counts,
    })
}

/// Overall and per-class accuracy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracySummary {
    pub accuracy: f64,
    /// Diagonal rate per class; `None` for classes with no items.
    pub per_class: Vec<(String, Option<f64>)>,
    pub min: Option<ClassRate>,
    pub max: Option<ClassRate>,
}

/// A class name with its diagonal rate.
pub type ClassRate = (String, f64);

fn extremes(per_class: &[(String, Option<f64>)]) -> (Option<ClassRate>, Option<ClassRate>) {
    let rated = per_class.iter().filter_map(|(c, r)| r.map(|r| (c.clone(), r)));
    let min = rated
        .clone()
        .fold(None, |acc: Option<(String, f64)>, (c, r)| match acc {
            Some((_, m)) if m <= r => acc,
            _ => Some((c, r)),
        });
    let max = rated.fold(None, |acc: Option<(String, f64)>, (c, r)| match acc {
        Some((_, m)) if m >= r => acc,
        _ => Some((c, r)),
    });
    (min, max)
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_total(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    pub fn overall_accuracy(&self) -> Result<AccuracySummary, EvalError> {
        let total = self.total();
        if total == 0 {
            return Err(EvalError::NoItems);
        }
        let per_class: Vec<(String, Option<f64>)> = self
            .classes
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let row = self.row_total(i);
                (c.clone(), (row > 0).then(|| self.counts[i][i] as f64 / row as f64))
            })
            .collect();
        let (min, max) = extremes(&per_class);
        Ok(AccuracySummary {
            accuracy: self.trace() as f64 / total as f64,
            per_class,
            min,
            max,
        })
    }

    /// Drops classes whose row and column are both empty.
    pub fn without_unused(&self) -> ConfusionMatrix {
        let n = self.classes.len();
        let keep: Vec<usize> = (0..n)
            .filter(|&i| self.row_total(i) > 0 || (0..n).any(|r| self.counts[r][i] > 0))
            .collect();
        ConfusionMatrix {
            classes: keep.iter().map(|&i| self.classes[i].clone()).collect(),
            counts: keep
                .iter()
                .map(|&r| keep.iter().map(|&c| self.counts[r][c]).collect())
                .collect(),
        }
    }

    /// `actual,assigned,count` rows for every non-zero cell.
    pub fn to_rows(&self) -> String {
        let mut out = String::from("actual,assigned,count\n");
        for (i, a) in self.classes.iter().enumerate() {
            for (j, p) in self.classes.iter().enumerate() {
                if self.counts[i][j] > 0 {
                    let _ = writeln!(out, "{a},{p},{}", self.counts[i][j]);
                }
            }
        }
        out
    }
}

/// Row percentages at one decimal; `None` marks an empty row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercentTable {
    pub classes: Vec<String>,
    pub rows: Vec<Option<Vec<f64>>>,
}

/// Splits 100% over a row in tenths of a percent by largest remainder, so
/// every rendered row sums to exactly 100.0.
fn row_percentages(row: &[u64]) -> Option<Vec<f64>> {
    let total: u64 = row.iter().sum();
    if total == 0 {
        return None;
    }
    let exact: Vec<f64> = row.iter().map(|&c| 1000.0 * c as f64 / total as f64).collect();
    let mut tenths: Vec<u64> = exact.iter().map(|v| v.floor() as u64).collect();
    let missing = 1000u64.saturating_sub(tenths.iter().sum::<u64>());
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(missing as usize) {
        tenths[i] += 1;
    }
    Some(tenths.iter().map(|&t| t as f64 / 10.0).collect())
}

pub fn render_confusion_percent(matrix: &ConfusionMatrix) -> PercentTable {
    PercentTable {
        classes: matrix.classes.clone(),
        rows: matrix.counts.iter().map(|r| row_percentages(r)).collect(),
    }
}

fn heading(label: &str) -> String {
    label
        .parse::<EmotionLabel>()
        .map(|e| e.abbrev().to_string())
        .unwrap_or_else(|_| label.to_string())
}

impl PercentTable {
    /// Diagonal entries read as per-class recognition rates (percent).
    pub fn diagonal_rates(&self) -> Vec<(String, Option<f64>)> {
        self.classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), self.rows[i].as_ref().map(|r| r[i])))
            .collect()
    }

    /// Lowest and highest diagonal rate.
    pub fn rate_range(&self) -> (Option<ClassRate>, Option<ClassRate>) {
        extremes(&self.diagonal_rates())
    }

    /// Fixed-width text table, rows actual and columns assigned.
    pub fn to_text(&self) -> String {
        let mut out = String::from("Act / Listn");
        for c in &self.classes {
            let _ = write!(out, "\t{}", heading(c));
        }
        out.push('\n');
        for (c, row) in self.classes.iter().zip(&self.rows) {
            out.push_str(&heading(c));
            match row {
                Some(vals) => vals.iter().for_each(|v| {
                    let _ = write!(out, "\t{v:.1}");
                }),
                None => self.classes.iter().for_each(|_| out.push_str("\t-")),
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| EvalError::MalformedTable("empty".into()))?;
        let classes: Vec<String> = header.split('\t').skip(1).map(str::to_string).collect();
        let mut rows = Vec::new();
        for line in lines {
            let cells: Vec<&str> = line.split('\t').collect();
            if cells.len() != classes.len() + 1 {
                return Err(EvalError::MalformedTable(format!("row `{line}`")));
            }
            if cells[1..].iter().all(|c| *c == "-") {
                rows.push(None);
            } else {
                let vals = cells[1..]
                    .iter()
                    .map(|c| c.parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| EvalError::MalformedTable(e.to_string()))?;
                rows.push(Some(vals));
            }
        }
        if rows.len() != classes.len() {
            return Err(EvalError::MalformedTable("row count".into()));
        }
        Ok(Self { classes, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classes(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn all_correct_is_diagonal() {
        let c = classes(&["a", "b"]);
        let m = build_confusion(&["a", "b", "b"], &["a", "b", "b"], &c).unwrap();
        assert_eq!(m.counts, vec![vec![1, 0], vec![0, 2]]);
        assert_eq!(m.overall_accuracy().unwrap().accuracy, 1.0);
    }

    #[test]
    fn single_cell() {
        let c = classes(&["Sadness", "Neutral"]);
        let m = build_confusion(&["Sadness"], &["Neutral"], &c).unwrap();
        assert_eq!(m.counts[0][1], 1);
        assert_eq!(m.to_rows(), "actual,assigned,count\nSadness,Neutral,1\n");
    }

    #[test]
    fn unknown_label_and_length() {
        let c = classes(&["a"]);
        assert!(matches!(
            build_confusion(&["a"], &["z"], &c),
            Err(EvalError::UnknownLabel(_))
        ));
        assert!(build_confusion(&["a"], &[] as &[&str], &c).is_err());
    }

    #[test]
    fn half_accuracy() {
        let m = ConfusionMatrix {
            classes: classes(&["a", "b"]),
            counts: vec![vec![1, 1], vec![1, 1]],
        };
        let s = m.overall_accuracy().unwrap();
        assert_eq!(s.accuracy, 0.5);
        assert_eq!(s.per_class[0].1, Some(0.5));
        assert_eq!(s.per_class[1].1, Some(0.5));
    }

    #[test]
    fn percent_rows() {
        let m = ConfusionMatrix {
            classes: classes(&["a", "b", "c"]),
            counts: vec![vec![2, 0, 0], vec![1, 1, 1], vec![0, 0, 0]],
        };
        let t = render_confusion_percent(&m);
        assert_eq!(t.rows[0], Some(vec![100.0, 0.0, 0.0]));
        let thirds = t.rows[1].as_ref().unwrap();
        assert!((thirds.iter().sum::<f64>() - 100.0).abs() < 1e-9);
        assert_eq!(t.rows[2], None);
        let text = t.to_text();
        assert!(text.contains("c\t-\t-\t-"));
        assert_eq!(PercentTable::parse(&text).unwrap().to_text(), text);
    }

    #[test]
    fn empty_classes_are_dropped() {
        let m = ConfusionMatrix {
            classes: classes(&["a", "b", "c"]),
            counts: vec![vec![1, 0, 0], vec![0, 0, 0], vec![0, 0, 2]],
        };
        let pruned = m.without_unused();
        assert_eq!(pruned.classes, classes(&["a", "c"]));
        assert_eq!(pruned.counts, vec![vec![1, 0], vec![0, 2]]);
    }

    #[test]
    fn emotion_headings_are_abbreviated() {
        let m = build_confusion(&["Neutral"], &["Surprise"], &classes(&["Neutral", "Surprise"])).unwrap();
        let text = render_confusion_percent(&m).to_text();
        assert!(text.starts_with("Act / Listn\tNeu\tSup\n"));
    }
}
