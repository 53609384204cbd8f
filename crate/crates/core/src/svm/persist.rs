//! Line-oriented text model file.
//!
//! ```text
//! voxemo-svm 1
//! model_id model2
//! classes Happiness,Neutral,Sadness
//! gamma 0.0116279070
//! c 10
//! dims 86
//! scale <min> <max>                 (dims lines)
//! pair <positive> <negative>        (one block per class pair)
//! bias <b>
//! sv <count>
//! <coeff> <x_1> ... <x_dims>        (count lines)
//! end
//! ```

use std::io::{BufRead, BufReader, Read, Write};

use crate::features::{ModelId, ScalingParams};
use crate::numfmt::sig9;

use super::kernel::KernelParams;
use super::multiclass::MulticlassModel;
use super::smo::BinaryModel;
use super::SvmError;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "voxemo-svm";

pub fn model_to_string(model: &MulticlassModel) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("{MAGIC} {FORMAT_VERSION}"));
    line(format!("model_id {}", model.model_id));
    line(format!("classes {}", model.classes.join(",")));
    line(format!("gamma {}", sig9(model.kernel.gamma)));
    line(format!("c {}", sig9(model.c)));
    line(format!("dims {}", model.dims()));
    for (lo, hi) in model.scaling.min.iter().zip(&model.scaling.max) {
        line(format!("scale {} {}", sig9(*lo), sig9(*hi)));
    }
    for pm in &model.pairwise {
        line(format!("pair {} {}", pm.class_pair.0, pm.class_pair.1));
        line(format!("bias {}", sig9(pm.bias)));
        line(format!("sv {}", pm.support_vectors.len()));
        for (coef, sv) in pm.dual_coeffs.iter().zip(&pm.support_vectors) {
            let mut row = sig9(*coef);
            for v in sv {
                row.push(' ');
                row.push_str(&sig9(*v));
            }
            line(row);
        }
    }
    line("end".to_string());
    out
}

pub fn save_model(model: &MulticlassModel, mut sink: impl Write) -> Result<(), SvmError> {
    sink.write_all(model_to_string(model).as_bytes())
        .map_err(|e| SvmError::Io(e.to_string()))
}

fn corrupt(msg: impl Into<String>) -> SvmError {
    SvmError::CorruptModel(msg.into())
}

struct Lines<I> {
    inner: I,
    lineno: usize,
}

impl<I: Iterator<Item = std::io::Result<String>>> Lines<I> {
    fn next_line(&mut self) -> Result<String, SvmError> {
        self.lineno += 1;
        match self.inner.next() {
            Some(Ok(l)) => Ok(l),
            Some(Err(e)) => Err(SvmError::Io(e.to_string())),
            None => Err(corrupt(format!("unexpected end of file at line {}", self.lineno))),
        }
    }

    /// Reads `key value...` and returns the value part.
    fn keyed(&mut self, key: &str) -> Result<String, SvmError> {
        let line = self.next_line()?;
        let (k, v) = line.split_once(' ').unwrap_or((line.as_str(), ""));
        if k != key {
            return Err(corrupt(format!("line {}: expected `{key}`, found `{k}`", self.lineno)));
        }
        Ok(v.to_string())
    }
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, SvmError> {
    s.trim().parse().map_err(|_| corrupt(format!("bad {what}: `{s}`")))
}

fn finite(s: &str, what: &str) -> Result<f64, SvmError> {
    let v: f64 = num(s, what)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(corrupt(format!("non-finite {what}")))
    }
}

pub fn load_model(source: impl Read) -> Result<MulticlassModel, SvmError> {
    let mut lines = Lines {
        inner: BufReader::new(source).lines(),
        lineno: 0,
    };
    let header = lines.next_line()?;
    let version = header
        .strip_prefix(MAGIC)
        .map(str::trim)
        .ok_or_else(|| corrupt("missing model header"))?;
    let version: u32 = num(version, "version")?;
    if version != FORMAT_VERSION {
        return Err(SvmError::VersionMismatch {
            found: version,
            supported: FORMAT_VERSION,
        });
    }

    let model_id: ModelId = lines.keyed("model_id")?.parse().map_err(|e: String| corrupt(e))?;
    let classes: Vec<String> = lines.keyed("classes")?.split(',').map(str::to_string).collect();
    if classes.len() < 2 || classes.iter().any(String::is_empty) {
        return Err(corrupt("class list"));
    }
    let gamma = finite(&lines.keyed("gamma")?, "gamma")?;
    let kernel = KernelParams::new(gamma).map_err(|_| corrupt("gamma must be > 0"))?;
    let c = finite(&lines.keyed("c")?, "C")?;
    let dims: usize = num(&lines.keyed("dims")?, "dims")?;
    if dims != model_id.dims() {
        return Err(corrupt(format!("dims {dims} do not match {model_id}")));
    }

    let mut min = Vec::with_capacity(dims);
    let mut max = Vec::with_capacity(dims);
    for _ in 0..dims {
        let v = lines.keyed("scale")?;
        let (lo, hi) = v.split_once(' ').ok_or_else(|| corrupt("scale row"))?;
        min.push(finite(lo, "scale min")?);
        max.push(finite(hi, "scale max")?);
    }

    let n = classes.len();
    let mut pairwise = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            let pair = lines.keyed("pair")?;
            let expected = format!("{} {}", classes[a], classes[b]);
            if pair != expected {
                return Err(corrupt(format!("expected pair `{expected}`, found `{pair}`")));
            }
            let bias = finite(&lines.keyed("bias")?, "bias")?;
            let count: usize = num(&lines.keyed("sv")?, "support vector count")?;
            if count == 0 {
                return Err(corrupt("pair model without support vectors"));
            }
            let mut coeffs = Vec::with_capacity(count);
            let mut svs = Vec::with_capacity(count);
            for _ in 0..count {
                let row = lines.next_line()?;
                let vals = row
                    .split(' ')
                    .map(|s| finite(s, "support vector value"))
                    .collect::<Result<Vec<_>, _>>()?;
                if vals.len() != dims + 1 {
                    return Err(corrupt(format!(
                        "line {}: support vector row has {} values",
                        lines.lineno,
                        vals.len()
                    )));
                }
                coeffs.push(vals[0]);
                svs.push(vals[1..].to_vec());
            }
            pairwise.push(BinaryModel {
                support_vectors: svs,
                dual_coeffs: coeffs,
                bias,
                kernel,
                class_pair: (classes[a].clone(), classes[b].clone()),
            });
        }
    }
    if lines.next_line()? != "end" {
        return Err(corrupt("missing end marker"));
    }

    Ok(MulticlassModel {
        model_id,
        classes,
        kernel,
        c,
        scaling: ScalingParams { model_id, min, max },
        pairwise,
    })
}
