//! Command-line front end.
//!
//! Exit status is 0 on success, 1 for bad input (files, flags, study
//! configuration) and 2 when a numerical step fails.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::classic::{run_classic, ClassicOptions};
use crate::exec::Exec;
use crate::io::manifest::{load_study, LoadedStudy};
use crate::io::results::{read_results, write_results, Metadata, ResultsDocument};
use crate::io::InputError;
use crate::pipeline::{run, StatisError};
use crate::plot::{parse_axes, render, PlotError, PlotKind, PlotSpec};

pub const RESULTS_FILE: &str = "results.json";
pub const CLASSIC_RESULTS_FILE: &str = "classic-results.json";

#[derive(Debug, Parser)]
#[command(name = "interstatis", version, about = "STATIS multi-table analysis for interval-valued data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the interval analysis, write results.json and the four figures.
    Run(RunArgs),
    /// Run classic STATIS on a study whose cells are all degenerate.
    Classic(RunArgs),
    /// Parse and check a study without running it.
    Validate { manifest: PathBuf },
    /// Re-render figures from a results document.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub manifest: PathBuf,
    /// Output directory; defaults to the manifest's output_dir.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ExecArg::default())]
    pub exec: ExecArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExecArg {
    Sequential,
    Parallel,
}

impl Default for ExecArg {
    fn default() -> Self {
        match Exec::default() {
            Exec::Sequential => ExecArg::Sequential,
            Exec::Parallel => ExecArg::Parallel,
        }
    }
}

impl From<ExecArg> for Exec {
    fn from(e: ExecArg) -> Exec {
        match e {
            ExecArg::Sequential => Exec::Sequential,
            ExecArg::Parallel => Exec::Parallel,
        }
    }
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    pub results: PathBuf,
    /// Figure to draw; all four when omitted.
    #[arg(long, value_parser = |s: &str| s.parse::<PlotKind>())]
    pub which: Option<PlotKind>,
    /// 1-based axis pair.
    #[arg(long, default_value = "1,2", value_parser = |s: &str| parse_axes(s))]
    pub axes: (usize, usize),
    /// Comma-separated individuals for the principal planes.
    #[arg(long, value_delimiter = ',')]
    pub subset: Option<Vec<String>>,
    /// Output directory; defaults to the results file's directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 640.0)]
    pub width: f64,
    #[arg(long, default_value_t = 640.0)]
    pub height: f64,
    #[arg(long)]
    pub no_labels: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Statis(#[from] StatisError),
    #[error("plot: {0}")]
    Plot(#[from] PlotError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Statis(StatisError::Step { .. }) => 2,
            _ => 1,
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Run(args) => cmd_run(args, stdout),
        Command::Classic(args) => cmd_classic(args, stdout),
        Command::Validate { manifest } => cmd_validate(manifest, stdout),
        Command::Plot(args) => cmd_plot(args, stdout),
    }
}

fn metadata(loaded: &LoadedStudy) -> Metadata {
    let mut m = Metadata::new(loaded.manifest.name.clone(), loaded.digest.clone());
    m.options = loaded.manifest.options.clone();
    m.plot = loaded.manifest.plot.clone();
    m
}

fn out_dir(args: &RunArgs, loaded: &LoadedStudy) -> Result<PathBuf, CliError> {
    let dir = args.out.clone().unwrap_or_else(|| loaded.output_dir());
    fs::create_dir_all(&dir).map_err(|e| InputError::io(&dir, e))?;
    Ok(dir)
}

fn cmd_run(args: &RunArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load_study(&args.manifest, args.exec.into())?;
    let output = run(&loaded.study)?;
    let doc = ResultsDocument::from_interstatis(&loaded.study, &output, metadata(&loaded));
    let dir = out_dir(args, &loaded)?;
    let path = dir.join(RESULTS_FILE);
    write_results(&path, &doc)?;
    let _ = writeln!(stdout, "wrote {}", path.display());
    for kind in PlotKind::ALL {
        let file = write_figure(&doc, default_spec(&doc, kind), &dir)?;
        let _ = writeln!(stdout, "wrote {}", file.display());
    }
    Ok(())
}

/// The first cell wider than the degeneracy tolerance, as a located error.
fn require_degenerate(loaded: &LoadedStudy) -> Result<(), InputError> {
    let tol = loaded.manifest.options.degeneracy_tol;
    let base = loaded.manifest_path.parent().unwrap_or(Path::new("."));
    for (k, t) in loaded.study.tables.iter().enumerate() {
        for i in 0..t.n_rows() {
            for j in 0..t.n_cols() {
                let c = t[(i, j)];
                if !c.is_degenerate(tol) {
                    return Err(InputError::Table {
                        origin: base.join(&loaded.manifest.tables[k].file).display().to_string(),
                        message: format!(
                            "row {}, column '{}': cell {c} is not degenerate (tolerance {tol}); classic needs point values",
                            i + 2,
                            loaded.study.variable_names[k][j]
                        ),
                    });
                }
            }
        }
    }
    Ok(())
}

fn cmd_classic(args: &RunArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load_study(&args.manifest, args.exec.into())?;
    require_degenerate(&loaded)?;
    let o = &loaded.study.options;
    let options =
        ClassicOptions { center: o.center, normalize: o.normalize_widths, weights: Some(loaded.study.weights.clone()) };
    let tables: Vec<_> = loaded.study.tables.iter().map(|t| t.centers()).collect();
    let output = run_classic(&tables, &options)?;
    let doc = ResultsDocument::from_classic(&loaded.study, &output, metadata(&loaded));
    let path = out_dir(args, &loaded)?.join(CLASSIC_RESULTS_FILE);
    write_results(&path, &doc)?;
    let _ = writeln!(stdout, "wrote {}", path.display());
    Ok(())
}

fn cmd_validate(manifest: &Path, stdout: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load_study(manifest, Exec::Sequential)?;
    let s = &loaded.study;
    let _ = writeln!(
        stdout,
        "ok: '{}' with {} tables, {} individuals, {} variables (sha256 {})",
        loaded.manifest.name,
        s.n_tables(),
        s.n_individuals(),
        s.n_variables(),
        loaded.digest
    );
    Ok(())
}

fn default_spec(doc: &ResultsDocument, kind: PlotKind) -> PlotSpec {
    let mut spec = PlotSpec::new(kind);
    spec.degeneracy_tol = doc.metadata.options.degeneracy_tol;
    if kind == PlotKind::IndividualEvolution {
        spec.subset = doc.metadata.plot.subset.clone();
    }
    spec
}

fn write_figure(doc: &ResultsDocument, spec: PlotSpec, dir: &Path) -> Result<PathBuf, CliError> {
    let svg = render(doc, &spec)?;
    let path = dir.join(spec.kind.file_name());
    fs::write(&path, svg).map_err(|e| InputError::io(&path, e))?;
    Ok(path)
}

fn cmd_plot(args: &PlotArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let doc = read_results(&args.results)?;
    let dir = match &args.out {
        Some(d) => d.clone(),
        None => args.results.parent().unwrap_or(Path::new(".")).to_path_buf(),
    };
    fs::create_dir_all(&dir).map_err(|e| InputError::io(&dir, e))?;
    let kinds: Vec<PlotKind> = match args.which {
        Some(k) => vec![k],
        None => PlotKind::ALL.to_vec(),
    };
    for kind in kinds {
        let mut spec = default_spec(&doc, kind);
        spec.axes = args.axes;
        spec.width = args.width;
        spec.height = args.height;
        spec.labels = !args.no_labels;
        let planes = matches!(kind, PlotKind::AverageIndividuals | PlotKind::IndividualEvolution);
        if let (true, Some(subset)) = (planes, &args.subset) {
            spec.subset = subset.clone();
        }
        let file = write_figure(&doc, spec, &dir)?;
        let _ = writeln!(stdout, "wrote {}", file.display());
    }
    Ok(())
}
