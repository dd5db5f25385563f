//! The `attrition` command line: argument definitions, the four subcommands
//! and the run manifest every invocation leaves behind.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cluster::{kmeans_fit, select_k, ChScoring, KMeansConfig, SelectKConfig};
use crate::domain::{build_matrix, CurriculumSpec, GradeMatrix, StudentRecord};
use crate::error::{Error, Result};
use crate::eval::{compare_classifiers, CompareConfig, Comparison, ConfusionCounts};
use crate::ingest::{read_cohort, read_curriculum, write_cohort, write_curriculum, IngestReport};
use crate::insight::{bottleneck_rank, cluster_profile, early_warning_features, DivisionFilter};
use crate::predict::LogisticConfig;
use crate::synth::{default_department_spec, generate_cohort, CohortSpec};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "attrition", version, about = "Predict student attrition from course grades")]
pub struct Cli {
    /// Seed for every random stream of the run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Existing directory receiving all artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Suppress console summaries and ingest warnings.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic cohort and its curriculum.
    Synth(SynthArgs),
    /// Choose the cluster count by cross-validated Calinski-Harabasz index.
    SelectK(SelectKArgs),
    /// Compare the co-cluster classifier with logistic regression.
    Evaluate(EvaluateArgs),
    /// Rank bottleneck courses and profile the clusters.
    Bottlenecks(BottleneckArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SpecSource {
    /// Cohort spec JSON file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Use the built-in 113-course department.
    #[arg(long = "default")]
    pub use_default: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub source: SpecSource,
}

#[derive(Debug, Args)]
pub struct CohortInput {
    #[arg(long)]
    pub cohort: PathBuf,
    #[arg(long)]
    pub curriculum: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScoreOn {
    Train,
    HeldOut,
}

#[derive(Debug, Args)]
pub struct SelectKArgs {
    #[command(flatten)]
    pub input: CohortInput,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
    pub k_min: u64,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(2..))]
    pub k_max: u64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..))]
    pub folds: u64,
    #[arg(long, default_value_t = KMeansConfig::DEFAULT_RESTARTS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
    /// Fold portion the index is computed on.
    #[arg(long, value_enum, default_value_t = ScoreOn::Train)]
    pub score_on: ScoreOn,
    /// Also render an SVG chart of the index curve.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: CohortInput,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub first_n: u64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..))]
    pub folds: u64,
    #[arg(long, default_value_t = KMeansConfig::DEFAULT_RESTARTS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
    /// L2 strength of the logistic baseline.
    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,
    /// Also render SVG charts of the ROC curves.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DivisionArg {
    Lower,
    Any,
}

#[derive(Debug, Args)]
pub struct BottleneckArgs {
    #[command(flatten)]
    pub input: CohortInput,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, value_enum, default_value_t = DivisionArg::Lower)]
    pub division: DivisionArg,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub top: u64,
    #[arg(long, default_value_t = KMeansConfig::DEFAULT_RESTARTS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestSummary {
    pub records_read: usize,
    pub rejected_rows: usize,
    pub warnings: usize,
}

/// What a run read, how it was configured and what it wrote.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    pub inputs: Vec<String>,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ingest: Option<IngestSummary>,
    pub outputs: Vec<String>,
    pub duration_ms: f64,
}

impl RunManifest {
    pub fn file_name(command: &str) -> String {
        format!("{command}.manifest.json")
    }
}

struct Run<'a> {
    command: &'static str,
    out: &'a Path,
    quiet: bool,
    started: Instant,
    outputs: Vec<String>,
}

impl<'a> Run<'a> {
    fn new(command: &'static str, out: Option<&'a Path>, quiet: bool) -> Result<Self> {
        let out = out.ok_or_else(|| Error::InvalidArgument("--out <dir> is required".into()))?;
        if !out.is_dir() {
            return Err(Error::InvalidArgument(format!(
                "output directory {} does not exist",
                out.display()
            )));
        }
        Ok(Run {
            command,
            out,
            quiet,
            started: Instant::now(),
            outputs: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        let path = self.out.join(name);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush().map_err(|e| Error::io(&path, e))?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w).map_err(|e| Error::io(name, e))
        })
    }

    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn finish(
        self,
        seed: u64,
        inputs: Vec<String>,
        config: serde_json::Value,
        ingest: Option<IngestSummary>,
    ) -> Result<RunManifest> {
        let manifest = RunManifest {
            command: self.command.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            seed,
            inputs,
            config,
            ingest,
            outputs: self.outputs,
            duration_ms: self.started.elapsed().as_secs_f64() * 1e3,
        };
        let path = self.out.join(RunManifest::file_name(self.command));
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(manifest)
    }
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<RunManifest> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Synth(a) => cmd_synth(&a, cli.seed, out, cli.quiet),
        Command::SelectK(a) => cmd_select_k(&a, cli.seed.unwrap_or(0), out, cli.quiet),
        Command::Evaluate(a) => cmd_evaluate(&a, cli.seed.unwrap_or(0), out, cli.quiet),
        Command::Bottlenecks(a) => cmd_bottlenecks(&a, cli.seed.unwrap_or(0), out, cli.quiet),
    }
}

pub fn cmd_synth(args: &SynthArgs, seed: Option<u64>, out: Option<&Path>, quiet: bool) -> Result<RunManifest> {
    let mut run = Run::new("synth", out, quiet)?;
    let (mut spec, inputs) = match &args.source.spec {
        Some(path) => (CohortSpec::from_json_path(path)?, vec![path.display().to_string()]),
        None => (default_department_spec(seed.unwrap_or(0)), Vec::new()),
    };
    if let Some(s) = seed {
        spec.seed = s;
    }
    let cohort = generate_cohort(&spec)?;

    run.write("cohort.csv", |w| write_cohort(w, &cohort.records, &cohort.curriculum))?;
    run.write("curriculum.csv", |w| write_curriculum(w, &cohort.curriculum))?;
    run.write_json("cohort_spec.json", &spec)?;

    let grads = cohort.records.iter().filter(|r| r.graduated).count();
    run.say(format!(
        "generated {} students ({} graduated) over {} courses",
        cohort.records.len(),
        grads,
        cohort.curriculum.len()
    ));
    let config = serde_json::json!({
        "source": if args.source.spec.is_some() { "file" } else { "default" },
        "n_students": spec.n_students,
        "courses": spec.courses.len(),
        "graduate_fraction": spec.graduate_fraction,
    });
    run.finish(spec.seed, inputs, config, None)
}

struct LoadedCohort {
    records: Vec<StudentRecord>,
    curriculum: CurriculumSpec,
    matrix: GradeMatrix,
    summary: IngestSummary,
}

fn load(input: &CohortInput, quiet: bool) -> Result<LoadedCohort> {
    let curriculum = read_curriculum(&input.curriculum)?;
    let (records, report) = read_cohort(&input.cohort, &curriculum)?;
    report_warnings(&report, quiet);
    let matrix = build_matrix(&records, &curriculum)?;
    Ok(LoadedCohort {
        records,
        curriculum,
        matrix,
        summary: IngestSummary {
            records_read: report.records_read,
            rejected_rows: report.rejected_rows,
            warnings: report.warnings.len(),
        },
    })
}

fn report_warnings(report: &IngestReport, quiet: bool) {
    if quiet {
        return;
    }
    const SHOWN: usize = 20;
    for w in report.warnings.iter().take(SHOWN) {
        eprintln!("warning: row {} column {}: {}", w.row, w.column, w.message);
    }
    if report.warnings.len() > SHOWN {
        eprintln!("warning: {} more warnings", report.warnings.len() - SHOWN);
    }
}

fn input_paths(input: &CohortInput) -> Vec<String> {
    vec![input.cohort.display().to_string(), input.curriculum.display().to_string()]
}

pub fn cmd_select_k(args: &SelectKArgs, seed: u64, out: Option<&Path>, quiet: bool) -> Result<RunManifest> {
    let mut run = Run::new("select-k", out, quiet)?;
    let data = load(&args.input, quiet)?;
    let mut cfg = SelectKConfig::new(args.k_min as usize, args.k_max as usize, args.folds as usize, seed);
    cfg.restarts = args.restarts as usize;
    cfg.scoring = match args.score_on {
        ScoreOn::Train => ChScoring::Train,
        ScoreOn::HeldOut => ChScoring::HeldOut,
    };
    let result = select_k(data.matrix.features(), &cfg)?;

    run.write_json("k_selection.json", &result)?;
    run.write("ch_curve.csv", |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["k", "mean_ch"])?;
        for (k, v) in &result.per_k {
            csv.write_record([k.to_string(), v.to_string()])?;
        }
        csv.flush().map_err(|e| Error::io("ch_curve.csv", e))
    })?;
    if args.svg {
        let pts: Vec<(f64, f64)> = result
            .per_k
            .iter()
            .filter(|(_, v)| v.is_finite())
            .map(|(&k, &v)| (k as f64, v))
            .collect();
        let svg = line_chart_svg("Calinski-Harabasz index", "k", "mean CH", &pts);
        run.write("ch_curve.svg", |w| w.write_all(svg.as_bytes()).map_err(|e| Error::io("ch_curve.svg", e)))?;
    }

    for (k, v) in &result.per_k {
        run.say(format!("k = {k}: mean CH = {v:.3}"));
    }
    run.say(format!("chosen_k = {}", result.chosen_k));
    let config = serde_json::to_value(&cfg)?;
    run.finish(seed, input_paths(&args.input), config, Some(data.summary))
}

#[derive(Serialize)]
struct MetricsEntry<'a> {
    classifier: String,
    feature_set: String,
    n_features: usize,
    accuracy: f64,
    precision: f64,
    recall: f64,
    f1: f64,
    auc: f64,
    counts: &'a ConfusionCounts,
    roc_csv: String,
}

#[derive(Serialize)]
struct MetricsFile<'a> {
    seed: u64,
    k: usize,
    first_n: usize,
    folds: usize,
    entries: Vec<MetricsEntry<'a>>,
}

fn roc_file_name(classifier: &str, feature_set: &str, ext: &str) -> String {
    format!("roc_{classifier}_{feature_set}.{ext}")
}

pub fn cmd_evaluate(args: &EvaluateArgs, seed: u64, out: Option<&Path>, quiet: bool) -> Result<RunManifest> {
    let mut run = Run::new("evaluate", out, quiet)?;
    let data = load(&args.input, quiet)?;
    let cfg = CompareConfig {
        k: args.k as usize,
        first_n: args.first_n as usize,
        folds: args.folds as usize,
        seed,
        kmeans_restarts: args.restarts as usize,
        logistic: LogisticConfig {
            l2_lambda: args.l2,
            ..LogisticConfig::default()
        },
        ..CompareConfig::default()
    };
    let comparison: Comparison = compare_classifiers(&data.matrix, &data.curriculum, &cfg)?;

    let mut entries = Vec::new();
    for cell in &comparison.cells {
        let (c, f) = (cell.classifier.to_string(), cell.feature_set.to_string());
        let name = roc_file_name(&c, &f, "csv");
        run.write(&name, |w| cell.report.roc.write_csv(w))?;
        if args.svg {
            let pts: Vec<(f64, f64)> = cell.report.roc.points.iter().map(|p| (p.fpr, p.tpr)).collect();
            let svg = line_chart_svg(&format!("ROC {c} / {f}"), "false positive rate", "true positive rate", &pts);
            let svg_name = roc_file_name(&c, &f, "svg");
            run.write(&svg_name, |w| w.write_all(svg.as_bytes()).map_err(|e| Error::io("roc svg", e)))?;
        }
        let m = &cell.report.metrics;
        run.say(format!(
            "{c:<8} {f:<9} acc {:.3}  prec {:.3}  rec {:.3}  f1 {:.3}  auc {:.3}",
            m.accuracy, m.precision, m.recall, m.f1, cell.report.roc.auc
        ));
        entries.push(MetricsEntry {
            classifier: c,
            feature_set: f,
            n_features: cell.n_features,
            accuracy: m.accuracy,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            auc: cell.report.roc.auc,
            counts: &cell.report.counts,
            roc_csv: name,
        });
    }
    run.write_json(
        "metrics.json",
        &MetricsFile {
            seed,
            k: cfg.k,
            first_n: cfg.first_n,
            folds: cfg.folds,
            entries,
        },
    )?;
    let config = serde_json::to_value(&cfg)?;
    run.finish(seed, input_paths(&args.input), config, Some(data.summary))
}

pub fn cmd_bottlenecks(args: &BottleneckArgs, seed: u64, out: Option<&Path>, quiet: bool) -> Result<RunManifest> {
    let mut run = Run::new("bottlenecks", out, quiet)?;
    let data = load(&args.input, quiet)?;
    let km = KMeansConfig::new(args.k as usize, seed).with_restarts(args.restarts as usize);
    let model = kmeans_fit(data.matrix.features(), &km)?;
    let report = bottleneck_rank(&data.matrix, &model, &data.curriculum)?;
    let profile = cluster_profile(&data.records, &model)?;
    let filter = match args.division {
        DivisionArg::Lower => DivisionFilter::Lower,
        DivisionArg::Any => DivisionFilter::Any,
    };
    let warning = early_warning_features(&report, filter, args.top as usize)?;

    run.write("bottlenecks.csv", |w| report.write_csv(w))?;
    run.write_json("bottlenecks.json", &report)?;
    run.write("profile.csv", |w| profile.write_csv(w))?;
    run.write_json("profile.json", &profile)?;
    run.write("early_warning.csv", |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["rank", "course_id"])?;
        for (i, c) in warning.iter().enumerate() {
            csv.write_record([(i + 1).to_string(), c.clone()])?;
        }
        csv.flush().map_err(|e| Error::io("early_warning.csv", e))
    })?;

    for c in &profile.clusters {
        run.say(format!(
            "cluster {}: {} students, graduation rate {:.3}, mean semesters {:.2}",
            c.cluster, c.size, c.graduation_rate, c.mean_semesters
        ));
    }
    run.say(format!("early-warning courses: {}", warning.join(", ")));
    let config = serde_json::json!({
        "kmeans": km,
        "division": filter,
        "top": args.top,
    });
    run.finish(seed, input_paths(&args.input), config, Some(data.summary))
}

/// A bare static SVG line chart of `points` (x ascending).
pub fn line_chart_svg(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    const W: f64 = 480.0;
    const H: f64 = 360.0;
    const M: f64 = 50.0;
    let bounds = |sel: fn(&(f64, f64)) -> f64| {
        let lo = points.iter().map(sel).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(sel).fold(f64::NEG_INFINITY, f64::max);
        match (lo.is_finite(), hi > lo) {
            (true, true) => (lo, hi),
            (true, false) => (lo - 0.5, lo + 0.5),
            _ => (0.0, 1.0),
        }
    };
    let (x0, x1) = bounds(|p| p.0);
    let (y0, y1) = bounds(|p| p.1);
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let poly: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    let esc = |s: &str| s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
            "<text x=\"{cx}\" y=\"25\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n",
            "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
            "<line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
            "<text x=\"{cx}\" y=\"{xl}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{xlabel}</text>\n",
            "<text x=\"15\" y=\"{cy}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 15 {cy})\">{ylabel}</text>\n",
            "<text x=\"{m}\" y=\"{tl}\" font-family=\"sans-serif\" font-size=\"10\">{x0:.3}</text>\n",
            "<text x=\"{r}\" y=\"{tl}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{x1:.3}</text>\n",
            "<text x=\"{ytx}\" y=\"{b}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{y0:.3}</text>\n",
            "<text x=\"{ytx}\" y=\"{m}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{y1:.3}</text>\n",
            "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{poly}\"/>\n",
            "</svg>\n"
        ),
        w = W,
        h = H,
        m = M,
        b = H - M,
        r = W - M,
        cx = W / 2.0,
        cy = H / 2.0,
        xl = H - 10.0,
        tl = H - M + 14.0,
        ytx = M - 4.0,
        title = esc(title),
        xlabel = esc(x_label),
        ylabel = esc(y_label),
        x0 = x0,
        x1 = x1,
        y0 = y0,
        y1 = y1,
        poly = poly.join(" "),
    )
}
