//! `voxemo` command line. Reports go to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 success, 1 usage, 2 data or validation error, 3 internal.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::annotation::{self, AnnotationState};
use crate::audio::{parse_wav, write_wav};
use crate::emotion::EmotionLabel;
use crate::eval::{
    build_confusion, evaluate, grid_search, render_confusion_percent, render_recognition_table, synth_corpus,
    EvalError, SynthCorpusSpec,
};
use crate::features::{extract_clip, FeatureMatrix, FrontendConfig, ModelId};
use crate::manifest::{
    extract_dataset, filter_classes, load_manifest, save_manifest, AgeBand, Manifest, ManifestEntry, Sex,
    UtteranceKind, DEFAULT_FAILURE_THRESHOLD,
};
use crate::numfmt::sig9;
use crate::svm::{load_model, model_to_string, train_ovo, KernelParams, SvmError, TrainConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

impl From<SvmError> for CliError {
    fn from(e: SvmError) -> Self {
        match e {
            SvmError::InvalidConfig(m) => CliError::Usage(m),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::InvalidK(_) | EvalError::InvalidSplit(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "voxemo", version, about = "Speech emotion recognition toolkit")]
struct Cli {
    /// Seed for every stochastic choice (folds, SMO, synthesis, sessions).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress progress diagnostics.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Model1,
    Model2,
}

impl From<ModelArg> for ModelId {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Model1 => ModelId::Model1,
            ModelArg::Model2 => ModelId::Model2,
        }
    }
}

#[derive(Debug, Args)]
struct ManifestArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Keep only these emotions (comma-separated).
    #[arg(long, value_delimiter = ',')]
    classes: Vec<EmotionLabel>,
    /// Largest tolerated fraction of unreadable clips.
    #[arg(long, default_value_t = DEFAULT_FAILURE_THRESHOLD)]
    max_failures: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract a feature matrix from a manifest.
    Extract {
        #[command(flatten)]
        input: ManifestArgs,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a one-vs-one RBF model from a feature matrix.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, conflicts_with = "grid")]
        c: Option<f64>,
        #[arg(long, conflicts_with = "grid")]
        gamma: Option<f64>,
        /// Pick C and gamma by cross-validated grid search.
        #[arg(long)]
        grid: bool,
        /// Folds used by the grid search.
        #[arg(long, default_value_t = 5)]
        k: usize,
    },
    /// Classify one WAV file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        wav: PathBuf,
        /// Also print the decision value of every class pair.
        #[arg(long)]
        verbose: bool,
    },
    /// Cross-validation and held-out recognition rates.
    Crossval {
        #[command(flatten)]
        input: ManifestArgs,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Percentage confusion table from label-per-line files.
    Confusion {
        #[arg(long)]
        actual: PathBuf,
        #[arg(long)]
        assigned: PathBuf,
    },
    /// Write a synthetic corpus and its manifest.
    Synth {
        /// TOML corpus description; the built-in three-class corpus when absent.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the listening-test service.
    Serve {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Append-only response log.
        #[arg(long)]
        results: PathBuf,
        /// Directory with the listening-test UI.
        #[arg(long)]
        ui: Option<PathBuf>,
    },
}

struct Ctx {
    seed: u64,
    seed_given: bool,
    quiet: bool,
}

impl Ctx {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

/// Parses `argv` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let ctx = Ctx {
        seed: cli.seed.unwrap_or(0),
        seed_given: cli.seed.is_some(),
        quiet: cli.quiet,
    };
    match dispatch(cli.command, &ctx) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("voxemo: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, ctx: &Ctx) -> Result<(), CliError> {
    match command {
        Command::Extract { input, model, out } => cmd_extract(&input, model.into(), &out, ctx),
        Command::Train {
            features,
            out,
            c,
            gamma,
            grid,
            k,
        } => cmd_train(&features, &out, c, gamma, grid, k, ctx),
        Command::Predict { model, wav, verbose } => cmd_predict(&model, &wav, verbose),
        Command::Crossval {
            input,
            model,
            k,
            c,
            gamma,
        } => cmd_crossval(&input, model.into(), k, c, gamma, ctx),
        Command::Confusion { actual, assigned } => cmd_confusion(&actual, &assigned),
        Command::Synth { spec, out } => cmd_synth(spec.as_deref(), &out, ctx),
        Command::Serve {
            manifest,
            port,
            host,
            results,
            ui,
        } => cmd_serve(&manifest, SocketAddr::new(host, port), &results, ui, ctx),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn stdout(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Internal(format!("stdout: {e}")))
}

fn load_input(input: &ManifestArgs) -> Result<Manifest, CliError> {
    if !(0.0..=1.0).contains(&input.max_failures) {
        return Err(CliError::Usage(format!(
            "--max-failures must lie in [0, 1], got {}",
            input.max_failures
        )));
    }
    let manifest = load_manifest(&input.manifest).map_err(data)?;
    if input.classes.is_empty() {
        Ok(manifest)
    } else {
        filter_classes(&manifest, &input.classes).map_err(data)
    }
}

fn extract_matrix(input: &ManifestArgs, model_id: ModelId, ctx: &Ctx) -> Result<FeatureMatrix, CliError> {
    let manifest = load_input(input)?;
    let dataset = match extract_dataset(&manifest, model_id, &FrontendConfig::default(), input.max_failures) {
        Ok(d) => d,
        Err(crate::manifest::ManifestError::TooManyFailures {
            failed,
            total,
            diagnostics,
        }) => {
            for d in &diagnostics {
                eprintln!("{d}");
            }
            return Err(CliError::Data(format!("{failed} of {total} files failed")));
        }
        Err(e) => return Err(data(e)),
    };
    for f in &dataset.failures {
        eprintln!("skipped {f}");
    }
    ctx.note(format!(
        "extracted {} x {} ({})",
        dataset.matrix.len(),
        model_id.dims(),
        model_id
    ));
    Ok(dataset.matrix)
}

fn cmd_extract(input: &ManifestArgs, model_id: ModelId, out: &Path, ctx: &Ctx) -> Result<(), CliError> {
    let matrix = extract_matrix(input, model_id, ctx)?;
    write_file(out, matrix.to_text())
}

fn train_config(c: Option<f64>, ctx: &Ctx) -> Result<TrainConfig, CliError> {
    let mut config = TrainConfig {
        seed: ctx.seed,
        ..TrainConfig::default()
    };
    if let Some(c) = c {
        config.c = c;
    }
    config.validate()?;
    Ok(config)
}

fn kernel_for(model_id: ModelId, gamma: Option<f64>) -> Result<KernelParams, CliError> {
    match gamma {
        Some(g) => Ok(KernelParams::new(g)?),
        None => Ok(KernelParams::for_dims(model_id.dims())),
    }
}

fn cmd_train(
    features: &Path,
    out: &Path,
    c: Option<f64>,
    gamma: Option<f64>,
    grid: bool,
    k: usize,
    ctx: &Ctx,
) -> Result<(), CliError> {
    let matrix = FeatureMatrix::from_text(&read_text(features)?).map_err(data)?;
    let mut config = train_config(c, ctx)?;
    let mut kernel = kernel_for(matrix.model_id, gamma)?;
    if grid {
        let (best, best_kernel, score) =
            grid_search(matrix.model_id, &matrix.rows, &matrix.labels, k, &config, ctx.seed)?;
        ctx.note(format!(
            "grid search: C = {}, gamma = {}, {k}-fold accuracy {}",
            sig9(best.c),
            sig9(best_kernel.gamma),
            sig9(score)
        ));
        config = best;
        kernel = best_kernel;
    }
    let model = train_ovo(matrix.model_id, &matrix.rows, &matrix.labels, kernel, &config)?;
    ctx.note(format!(
        "trained {} pair models over {} classes",
        model.pairwise.len(),
        model.classes.len()
    ));
    write_file(out, model_to_string(&model))
}

fn cmd_predict(model_path: &Path, wav: &Path, verbose: bool) -> Result<(), CliError> {
    let file = fs::File::open(model_path).map_err(|e| CliError::Data(format!("{}: {e}", model_path.display())))?;
    let model = load_model(std::io::BufReader::new(file))?;
    let bytes = fs::read(wav).map_err(|e| CliError::Data(format!("{}: {e}", wav.display())))?;
    let clip = parse_wav(&bytes, wav.display().to_string()).map_err(data)?;
    let features = extract_clip(&clip, model.model_id, &FrontendConfig::default()).map_err(data)?;
    let mut report = format!("{}\n", model.predict(&features.values)?);
    if verbose {
        let decisions = model.decision_values(&features.values)?;
        for ((a, b), d) in model.pair_indices().into_iter().zip(decisions) {
            report.push_str(&format!("{},{},{}\n", model.classes[a], model.classes[b], sig9(d)));
        }
    }
    stdout(&report)
}

fn cmd_crossval(
    input: &ManifestArgs,
    model_id: ModelId,
    k: usize,
    c: Option<f64>,
    gamma: Option<f64>,
    ctx: &Ctx,
) -> Result<(), CliError> {
    if k < 2 {
        return Err(CliError::Usage(format!("--k must be at least 2, got {k}")));
    }
    let config = train_config(c, ctx)?;
    let kernel = kernel_for(model_id, gamma)?;
    let matrix = extract_matrix(input, model_id, ctx)?;
    let report = evaluate(model_id, &matrix.rows, &matrix.labels, k, kernel, &config, ctx.seed)?;
    let mut text = render_recognition_table(std::slice::from_ref(&report));
    text.push('\n');
    text.push_str(&report.cv.to_rows());
    text.push('\n');
    text.push_str(&render_confusion_percent(&report.cv.confusion).to_text());
    stdout(&text)
}

fn read_labels(path: &Path) -> Result<Vec<String>, CliError> {
    Ok(read_text(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

/// Emotion names are canonicalized and kept in taxonomy order; other labels
/// sort lexicographically after them.
fn canonical(label: &str) -> String {
    label
        .parse::<EmotionLabel>()
        .map(|e| e.name().to_string())
        .unwrap_or_else(|_| label.to_string())
}

fn cmd_confusion(actual: &Path, assigned: &Path) -> Result<(), CliError> {
    let actual: Vec<String> = read_labels(actual)?.iter().map(|l| canonical(l)).collect();
    let assigned: Vec<String> = read_labels(assigned)?.iter().map(|l| canonical(l)).collect();
    let mut classes: Vec<String> = EmotionLabel::ALL.iter().map(|e| e.name().to_string()).collect();
    let mut extra: Vec<String> = actual
        .iter()
        .chain(&assigned)
        .filter(|l| !classes.contains(l))
        .cloned()
        .collect();
    extra.sort();
    extra.dedup();
    classes.extend(extra);

    let matrix = build_confusion(&actual, &assigned, &classes)?.without_unused();
    let summary = matrix.overall_accuracy()?;
    let mut text = render_confusion_percent(&matrix).to_text();
    text.push_str(&format!("\naccuracy\t{:.1}\n", 100.0 * summary.accuracy));
    if let (Some((min_c, min_r)), Some((max_c, max_r))) = (&summary.min, &summary.max) {
        text.push_str(&format!("min\t{min_c}\t{:.1}\n", 100.0 * min_r));
        text.push_str(&format!("max\t{max_c}\t{:.1}\n", 100.0 * max_r));
    }
    stdout(&text)
}

fn cmd_synth(spec_path: Option<&Path>, out: &Path, ctx: &Ctx) -> Result<(), CliError> {
    let mut spec = match spec_path {
        Some(p) => toml::from_str::<SynthCorpusSpec>(&read_text(p)?)
            .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?,
        None => SynthCorpusSpec::default(),
    };
    if ctx.seed_given {
        spec.seed = ctx.seed;
    }
    let clips = synth_corpus(&spec)?;
    let clip_dir = out.join("clips");
    fs::create_dir_all(&clip_dir).map_err(|e| CliError::Data(format!("{}: {e}", clip_dir.display())))?;

    let mut entries = Vec::with_capacity(clips.len());
    for c in &clips {
        let emotion = c
            .label
            .parse::<EmotionLabel>()
            .map_err(|e| CliError::Data(format!("profile label: {e}")))?;
        let rel = format!("clips/{}.wav", c.clip.source_id);
        write_file(&out.join(&rel), write_wav(&c.clip))?;
        entries.push(ManifestEntry {
            path: rel,
            emotion,
            speaker_id: "synth".to_string(),
            sex: Sex::Unknown,
            age_band: AgeBand::Unknown,
            kind: UtteranceKind::Sentence,
            text: None,
        });
    }
    let manifest = Manifest {
        entries,
        sample_rate: Some(spec.sample_rate),
        base_dir: out.to_path_buf(),
    };
    save_manifest(&manifest, out.join("manifest.csv")).map_err(data)?;
    ctx.note(format!("wrote {} clips to {}", clips.len(), out.display()));
    Ok(())
}

fn cmd_serve(
    manifest: &Path,
    addr: SocketAddr,
    results: &Path,
    ui: Option<PathBuf>,
    ctx: &Ctx,
) -> Result<(), CliError> {
    let manifest = load_manifest(manifest).map_err(data)?;
    let state = AnnotationState::open(manifest, results, ctx.seed).map_err(data)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
    ctx.note(format!("listening on http://{addr}"));
    runtime
        .block_on(annotation::serve(state, addr, ui, async {
            let _ = tokio::signal::ctrl_c().await;
        }))
        .map_err(data)
}
