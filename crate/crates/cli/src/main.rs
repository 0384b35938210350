use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ietk::analytics::aligned_table;
use ietk::openie_clean::FilterMode;
use ietk::pipeline::{self, PipelineConfig, Stage};
use ietk::Error;

/// Information extraction over file-based corpora: entity linking, statement
/// extraction, OpenIE cleaning and relation canonicalization.
#[derive(Debug, Parser)]
#[command(name = "ietk", version)]
struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Workspace directory; overrides the configuration.
    #[arg(long, global = true, value_name = "PATH")]
    workspace: Option<PathBuf>,
    /// Worker threads; overrides the configuration.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load documents, parses, triples and external annotations.
    Ingest(StageArgs),
    /// Link entity vocabularies into the documents.
    Link(StageArgs),
    /// Extract statements along dependency paths.
    Pathie(StageArgs),
    /// Clean OpenIE triples with an entity filter.
    CleanOpenie(StageArgs),
    /// Map predicates to the relation vocabulary.
    Canonicalize(StageArgs),
    /// Remove statements violating relation type constraints.
    Constrain(StageArgs),
    /// Complexity and extraction statistics.
    Stats(StatsArgs),
    /// Run every enabled stage, skipping those that are up to date.
    Run(StageArgs),
    /// Summarize a workspace.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct StageArgs {
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// Also write the statistics as an aligned text table.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Write the report as TSV to this file.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

/// Settings that override the configuration file.
#[derive(Debug, Default, Args)]
struct Overrides {
    #[arg(long, value_name = "N")]
    min_length: Option<usize>,
    #[arg(long)]
    no_homonym_rule: bool,
    #[arg(long)]
    no_abbreviation_rule: bool,
    #[arg(long, value_name = "PATH")]
    ignore_list: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    keywords: Option<PathBuf>,
    /// Keep negations in predicates (PathIE and OpenIE cleaning).
    #[arg(long)]
    keep_negations: bool,
    #[arg(long, value_name = "MODE")]
    filter: Option<FilterMode>,
    #[arg(long)]
    entity_sentences_only: bool,
    #[arg(long, value_name = "X")]
    min_similarity: Option<f64>,
    #[arg(long, value_name = "N")]
    min_frequency: Option<usize>,
    #[arg(long)]
    keep_unmapped: bool,
    #[arg(long, value_name = "PATH")]
    constraints: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    connectives: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    prepositions: Option<PathBuf>,
}

impl Overrides {
    fn apply(self, c: &mut PipelineConfig) {
        if let Some(n) = self.min_length {
            c.linker.min_length = n;
        }
        c.linker.homonym_rule &= !self.no_homonym_rule;
        c.linker.abbreviation_rule &= !self.no_abbreviation_rule;
        if self.ignore_list.is_some() {
            c.vocabulary.ignore = self.ignore_list;
        }
        if self.keywords.is_some() {
            c.pathie.keywords = self.keywords;
        }
        if self.keep_negations {
            c.pathie.keep_negations = true;
            c.openie.keep_negations = true;
        }
        if let Some(f) = self.filter {
            c.openie.filter = f;
        }
        c.openie.entity_sentences_only |= self.entity_sentences_only;
        if let Some(x) = self.min_similarity {
            c.canonical.min_similarity = x;
        }
        if let Some(n) = self.min_frequency {
            c.canonical.min_phrase_frequency = n;
        }
        c.canonical.keep_unmapped |= self.keep_unmapped;
        if self.constraints.is_some() {
            c.vocabulary.constraints = self.constraints;
        }
        if self.connectives.is_some() {
            c.analytics.connectives = self.connectives;
        }
        if self.prepositions.is_some() {
            c.analytics.prepositions = self.prepositions;
        }
    }
}

const EXIT_INVALID: u8 = 1;
const EXIT_STAGE: u8 = 2;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Invalid(_) => EXIT_INVALID,
        _ => EXIT_STAGE,
    }
}

fn load_config(
    cli_config: Option<&Path>,
    workspace: Option<PathBuf>,
    workers: Option<usize>,
    overrides: Overrides,
) -> Result<PipelineConfig, Error> {
    let path = cli_config.ok_or_else(|| Error::Config(vec!["--config is required".to_string()]))?;
    let content = std::fs::read_to_string(path).map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))?;
    let mut config = PipelineConfig::from_toml(&content, path.parent().unwrap_or(Path::new(".")))?;
    overrides.apply(&mut config);
    if let Some(w) = workspace {
        config.workspace = w;
    }
    if let Some(n) = workers {
        config.workers = n;
    }
    config.check()?;
    Ok(config)
}

fn stats_text(workspace: &Path) -> Result<String, Error> {
    let read = |file: &str| {
        let p = workspace.join(Stage::Stats.name()).join(file);
        std::fs::read_to_string(&p).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))
    };
    let table = |content: String| {
        let mut lines = content.lines();
        let header: Vec<String> = lines.next().unwrap_or_default().split('\t').map(str::to_string).collect();
        let rows: Vec<Vec<String>> = lines.map(|l| l.split('\t').map(str::to_string).collect()).collect();
        aligned_table(&header.iter().map(String::as_str).collect::<Vec<_>>(), &rows)
    };
    Ok(format!("{}\n{}", table(read("complexity.tsv")?), table(read("extraction_statistics.tsv")?)))
}

fn execute(cli: Cli) -> Result<(), Error> {
    let stage_run = |stage: Option<Stage>, overrides: Overrides| -> Result<PipelineConfig, Error> {
        let config = load_config(cli.config.as_deref(), cli.workspace.clone(), cli.workers, overrides)?;
        let only = stage.map(|s| vec![s]);
        let log = pipeline::run(&config, only.as_deref())?;
        for e in &log.stages {
            let what =
                if e.executed { format!("done in {:.3} s", e.elapsed_seconds) } else { "up to date".to_string() };
            println!("{:<13} {what}", e.stage.name());
        }
        Ok(config)
    };
    match cli.command {
        Command::Ingest(a) => stage_run(Some(Stage::Ingest), a.overrides).map(drop),
        Command::Link(a) => stage_run(Some(Stage::Link), a.overrides).map(drop),
        Command::Pathie(a) => stage_run(Some(Stage::Pathie), a.overrides).map(drop),
        Command::CleanOpenie(a) => stage_run(Some(Stage::CleanOpenie), a.overrides).map(drop),
        Command::Canonicalize(a) => stage_run(Some(Stage::Canonicalize), a.overrides).map(drop),
        Command::Constrain(a) => stage_run(Some(Stage::Constrain), a.overrides).map(drop),
        Command::Run(a) => stage_run(None, a.overrides).map(drop),
        Command::Stats(a) => {
            let config = stage_run(Some(Stage::Stats), a.overrides)?;
            let text = stats_text(&config.workspace)?;
            print!("{text}");
            if let Some(p) = a.report {
                std::fs::write(&p, text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
            }
            Ok(())
        }
        Command::Report(a) => {
            let workspace = match (&cli.workspace, &cli.config) {
                (Some(w), _) => w.clone(),
                (None, Some(_)) => load_config(cli.config.as_deref(), None, None, Overrides::default())?.workspace,
                (None, None) => return Err(Error::Config(vec!["--workspace or --config is required".to_string()])),
            };
            let report = pipeline::report(&workspace)?;
            print!("{}", report.to_text());
            if let Some(p) = a.report {
                std::fs::write(&p, report.to_tsv()).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
