use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use traffic_ilp::config::{PipelineConfig, Scope};
use traffic_ilp::pipeline::{run, Command};

/// Traffic violation analytics and rule learning.
#[derive(Debug, Parser)]
#[command(name = "traffic-ilp", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// key = value configuration file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    violations: Option<PathBuf>,
    #[arg(long, global = true)]
    weather: Option<PathBuf>,
    #[arg(long, global = true)]
    census: Option<PathBuf>,
    #[arg(long, global = true)]
    annotations: Option<PathBuf>,
    /// Output directory (default `out`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Analysis year
    #[arg(long, global = true)]
    year: Option<i32>,
    /// Decimal places used to snap coordinates into location cells
    #[arg(long, global = true)]
    precision: Option<u8>,
    /// Minimum events for a location to count as a hotspot
    #[arg(long, global = true)]
    hotspot_threshold: Option<u64>,
    /// all, category1, category2 or event:<description>
    #[arg(long, global = true)]
    scope: Option<Scope>,
    /// Comma-separated cities to profile
    #[arg(long, global = true, value_delimiter = ',')]
    cities: Option<Vec<String>>,
    /// Target predicate, e.g. is_event_ingaithersburg
    #[arg(long, global = true)]
    target: Option<String>,
    /// Rule file to evaluate, or `builtin`
    #[arg(long, global = true)]
    rules: Option<String>,
    /// Facts file (default <out>/facts/facts.pl)
    #[arg(long, global = true)]
    facts: Option<PathBuf>,
    /// Facts file with negative examples of the target
    #[arg(long, global = true)]
    negatives: Option<PathBuf>,
    /// Abort on the first malformed violation row
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Parse and validate inputs, write a normalized snapshot
    Ingest,
    /// Descriptive statistics, hotspots, night analysis and city profiles
    Analyze,
    /// Compile city and event facts
    CompileFacts,
    /// Learn rules for --target
    Learn,
    /// Evaluate --rules against --target
    Eval,
    /// Bundle every JSON artifact into report.json
    Report,
    /// Every stage in order
    All,
}

impl Cli {
    fn config(&self) -> Result<PipelineConfig, String> {
        let mut cfg = PipelineConfig::default();
        if let Some(p) = &self.config {
            cfg.apply_file(p).map_err(|e| format!("{}: {e}", p.display()))?;
        }
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = &self.$f { cfg.$f = v.clone().into(); })* };
        }
        set!(violations, weather, census, annotations, facts, negatives, target, rules);
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if let Some(v) = self.year {
            cfg.year = v;
        }
        if let Some(v) = self.precision {
            cfg.precision = v;
        }
        if let Some(v) = self.hotspot_threshold {
            cfg.hotspot_threshold = v;
        }
        if let Some(v) = &self.scope {
            cfg.scope = v.clone();
        }
        if let Some(v) = &self.cities {
            cfg.cities = v.clone();
        }
        cfg.strict |= self.strict;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let cfg = match cli.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("traffic-ilp: {e}");
            return ExitCode::from(1);
        }
    };
    let cmd = match cli.command {
        Cmd::Ingest => Command::Ingest,
        Cmd::Analyze => Command::Analyze,
        Cmd::CompileFacts => Command::CompileFacts,
        Cmd::Learn => Command::Learn,
        Cmd::Eval => Command::Eval,
        Cmd::Report => Command::Report,
        Cmd::All => Command::All,
    };
    match run(cmd, &cfg) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            for p in &outcome.written {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("traffic-ilp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
