//! `quill`: run the curation service or work on a store directly.
//!
//! Settings come from `--config` (TOML), then `QUILL_*` environment
//! variables, then flags; later sources win.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use chrono::SecondsFormat;
use clap::{Parser, Subcommand};
use quill_core::profile::load_profile;
use quill_core::rdf::{is_absolute_iri, parse_nquads, parse_turtle, serialize_nquads, Graph};
use quill_core::shacl::validate;
use quill_core::versioning::{SnapshotRecord, SystemClock, VersionError};
use quill_server::config::AuthMode;
use quill_server::service::ServiceError;
use quill_server::{open_curator, Config, Curator};

#[derive(Parser)]
#[command(name = "quill", version, about = "Scholarly metadata curation with provenance")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Profile directory (shapes.ttl, vocabulary.yaml, display.json).
    #[arg(long, global = true)]
    profile: Option<PathBuf>,
    /// Store directory.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    #[arg(long, global = true)]
    port: Option<u16>,
    #[arg(long, global = true, value_parser = parse_mode)]
    auth_mode: Option<AuthMode>,
    #[command(subcommand)]
    command: Command,
}

fn parse_mode(s: &str) -> Result<AuthMode, String> {
    s.parse()
}

#[derive(Subcommand)]
enum Command {
    /// Serve the HTTP API until interrupted.
    Serve,
    /// Validate a Turtle or N-Quads file against the profile.
    Validate { file: PathBuf },
    /// Import every typed entity in a file as its first snapshot.
    Import {
        file: PathBuf,
        /// Identity IRI the snapshots are attributed to.
        #[arg(long)]
        agent: String,
    },
    /// Write the whole store as sorted N-Quads (`-` for stdout).
    Export { out: PathBuf },
    /// Print the snapshot table of an entity.
    History { iri: String },
    /// Restore an entity to snapshot `n` as a new snapshot.
    Restore {
        iri: String,
        n: u64,
        #[arg(long)]
        agent: String,
    },
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

/// Service errors about the request (unknown entity, bad index) are usage
/// errors; anything from the store is I/O.
impl From<ServiceError> for Failure {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Version(VersionError::Store(_) | VersionError::CorruptProvenance { .. }) => Failure::Io(e.into()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = resolve(&cli).and_then(|config| run(cli.command, config));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("quill: {e:#}");
            ExitCode::from(e.code())
        }
    }
}

fn resolve(cli: &Cli) -> Result<Config, Failure> {
    let mut config = match &cli.config {
        Some(path) => Config::from_file(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => Config::default(),
    };
    config.apply_process_env().map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(p) = &cli.profile {
        config.profile = p.clone();
    }
    if let Some(d) = &cli.data {
        config.data = Some(d.clone());
    }
    if let Some(port) = cli.port {
        config.port = port;
    }
    if let Some(mode) = cli.auth_mode {
        config.auth.mode = mode;
    }
    Ok(config)
}

fn run(command: Command, config: Config) -> Result<ExitCode, Failure> {
    match command {
        Command::Serve => serve(config),
        Command::Validate { file } => cmd_validate(&config, &file),
        Command::Import { file, agent } => cmd_import(&config, &file, &agent),
        Command::Export { out } => cmd_export(&config, &out),
        Command::History { iri } => cmd_history(&config, &iri),
        Command::Restore { iri, n, agent } => cmd_restore(&config, &iri, n, &agent),
    }
}

fn serve(config: Config) -> Result<ExitCode, Failure> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();
    let rt = tokio::runtime::Runtime::new().context("cannot start runtime")?;
    rt.block_on(quill_server::serve(config, async {
        let _ = tokio::signal::ctrl_c().await;
    }))
    .context("server failed")?;
    Ok(ExitCode::SUCCESS)
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let parsed = match path.extension().and_then(|e| e.to_str()) {
        Some("nq" | "nt") => parse_nquads(&text).map(|ds| ds.quads().map(|q| q.triple()).collect()).map_err(|e| e.to_string()),
        _ => parse_turtle(&text, None).map_err(|e| e.to_string()),
    };
    parsed.map_err(|e| Failure::Io(anyhow::anyhow!("{}: {e}", path.display())))
}

fn open(config: &Config) -> Result<Curator, Failure> {
    Ok(open_curator(config, Arc::new(SystemClock)).context("cannot open store")?)
}

fn check_agent(agent: &str) -> Result<(), Failure> {
    if is_absolute_iri(agent) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--agent must be an absolute IRI, got {agent:?}")))
    }
}

fn cmd_validate(config: &Config, file: &Path) -> Result<ExitCode, Failure> {
    let profile = load_profile(&config.profile).context("cannot load profile")?;
    let data = read_graph(file)?;
    let report = validate(&data, &profile.shapes);
    let mut out = std::io::stdout().lock();
    for r in &report.results {
        writeln!(out, "{:?}\t{}\t<{}>\t{}", r.component, r.focus_node, r.path, r.message).context("stdout")?;
    }
    if report.conforms {
        writeln!(out, "conforms: {} triples", data.len()).context("stdout")?;
        Ok(ExitCode::SUCCESS)
    } else {
        Err(Failure::Invalid(format!("{} violation(s)", report.results.len())))
    }
}

fn cmd_import(config: &Config, file: &Path, agent: &str) -> Result<ExitCode, Failure> {
    check_agent(agent)?;
    let data = read_graph(file)?;
    let curator = open(config)?;
    let summary = curator.import(&data, agent);
    curator.persist().context("cannot compact store")?;
    let mut out = std::io::stdout().lock();
    for i in &summary.imported {
        writeln!(out, "imported\t{}\t{}", i.iri, i.index).context("stdout")?;
    }
    for s in &summary.skipped {
        writeln!(out, "skipped\t{}\t{}", s.iri, s.reason).context("stdout")?;
    }
    writeln!(
        out,
        "{} imported, {} skipped, {} unowned triples",
        summary.imported.len(),
        summary.skipped.len(),
        summary.unowned_triples
    )
    .context("stdout")?;
    if summary.skipped.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(Failure::Invalid(format!("{} entities skipped", summary.skipped.len())))
    }
}

fn cmd_export(config: &Config, out: &Path) -> Result<ExitCode, Failure> {
    let curator = open(config)?;
    let text = serialize_nquads(&curator.versions().store().snapshot());
    if out == Path::new("-") {
        std::io::stdout().write_all(text.as_bytes()).context("stdout")?;
    } else {
        std::fs::write(out, text).with_context(|| format!("cannot write {}", out.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn time(t: &chrono::DateTime<chrono::Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn row(s: &SnapshotRecord) -> String {
    format!(
        "{}\t{}\t{}\t{}\t+{} -{}\t{}",
        s.index,
        time(&s.generated_at),
        s.invalidated_at.as_ref().map(time).unwrap_or_else(|| "-".into()),
        s.agent,
        s.delta.added.len(),
        s.delta.removed.len(),
        s.description.as_deref().unwrap_or("")
    )
}

fn cmd_history(config: &Config, iri: &str) -> Result<ExitCode, Failure> {
    let curator = open(config)?;
    let history = curator.history(&curator.resolve_id(iri))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "index\tgeneratedAt\tinvalidatedAt\tagent\tdelta\tdescription").context("stdout")?;
    for s in &history.snapshots {
        writeln!(out, "{}", row(s)).context("stdout")?;
    }
    if history.tombstoned {
        writeln!(out, "(deleted)").context("stdout")?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_restore(config: &Config, iri: &str, n: u64, agent: &str) -> Result<ExitCode, Failure> {
    check_agent(agent)?;
    let curator = open(config)?;
    let record = curator.restore(&curator.resolve_id(iri), n, agent)?;
    curator.persist().context("cannot compact store")?;
    println!("{}", row(&record));
    Ok(ExitCode::SUCCESS)
}
