use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dashprov::layering::Layer;
use dashprov::query::{self, Attribution, FreshnessReport, LineageReport, Stats};
use dashprov::render::{self, RenderOptions};
use dashprov::scaffold;
use dashprov::serialization::{self, FormatId};
use dashprov::validation::{self, Profile, Severity};
use dashprov::{ProvenanceDocument, QualifiedName};

/// Dashboard provenance toolkit: validate, convert, query and render
/// provenance documents for data dashboards.
#[derive(Debug, Parser)]
#[command(name = "dashprov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a document against a validation profile.
    Validate {
        path: PathBuf,
        #[arg(long, env = "DASHPROV_PROFILE", default_value = "core", value_parser = validation::PROFILE_NAMES)]
        profile: String,
        #[command(flatten)]
        input: InputFormat,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        report: Report,
        /// Exit with status 1 when warnings are reported.
        #[arg(long)]
        strict_warnings: bool,
    },
    /// Convert between PROV-JSON (.provjson) and Turtle (.ttl).
    Convert {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        format: InputFormat,
        /// Output format; inferred from the output extension by default.
        #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
        to: FormatArg,
    },
    /// Answer a provenance question about one element.
    Query {
        #[arg(value_enum)]
        kind: QueryKind,
        id: String,
        path: PathBuf,
        #[command(flatten)]
        input: InputFormat,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        report: Report,
    },
    /// Draw the document as Graphviz DOT (.dot) or an HTML report (.html).
    Render {
        path: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Render only one layer's view.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        layer: Option<u8>,
        #[arg(long)]
        title: Option<String>,
        /// Put dash attributes and relation times in DOT labels.
        #[arg(long)]
        attributes: bool,
        #[command(flatten)]
        input: InputFormat,
    },
    /// Generate a skeleton document from a JSON outline.
    Scaffold {
        outline: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Count elements, relations and layer sizes.
    Stats {
        path: PathBuf,
        #[command(flatten)]
        input: InputFormat,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        report: Report,
    },
    /// Describe a validation rule.
    Explain { rule: String },
}

#[derive(Debug, Args)]
struct InputFormat {
    /// Input format; `auto` uses the file extension.
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Auto,
    Provjson,
    Ttl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Report {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QueryKind {
    Lineage,
    Delegation,
    Attribution,
    Freshness,
}

/// Failure classes mapped onto exit statuses.
enum Failure {
    Input(anyhow::Error),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure::Input(err)
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
        Err(Failure::Usage(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Validate { path, profile, input, report, strict_warnings } => {
            let doc = load(&path, input.format)?;
            let profile = Profile::from_name(&profile).map_err(|e| Failure::Usage(e.into()))?;
            let diagnostics = validation::validate(&doc, &profile);
            match report {
                Report::Text => print!("{}", validation::text_report(&diagnostics)),
                Report::Json => println!("{}", validation::json_report(&diagnostics)),
            }
            let failing = validation::has_errors(&diagnostics)
                || (strict_warnings && diagnostics.iter().any(|d| d.severity == Severity::Warning));
            Ok(u8::from(failing))
        }
        Command::Convert { input, output, format, to } => {
            let target = output_format(&output, to)?;
            let doc = load(&input, format.format)?;
            save(&output, &serialization::write(&doc, target))?;
            Ok(0)
        }
        Command::Query { kind, id, path, input, report } => {
            let doc = load(&path, input.format)?;
            let id: QualifiedName = id.parse().map_err(|e| anyhow!("{e}"))?;
            let text = match kind {
                QueryKind::Lineage => {
                    let r = query::lineage(&doc, &id).map_err(anyhow::Error::from)?;
                    emit(report, &r, || lineage_text(&doc, &r))
                }
                QueryKind::Delegation => {
                    let chain = query::delegation_chain(&doc, &id).map_err(anyhow::Error::from)?;
                    emit(report, &chain, || delegation_text(&doc, &id, &chain))
                }
                QueryKind::Attribution => {
                    let r = query::attribution(&doc, &id).map_err(anyhow::Error::from)?;
                    emit(report, &r, || attribution_text(&doc, &id, &r))
                }
                QueryKind::Freshness => {
                    let r = query::freshness(&doc, &id).map_err(anyhow::Error::from)?;
                    emit(report, &r, || freshness_text(&r))
                }
            };
            print!("{text}");
            Ok(0)
        }
        Command::Render { path, out, layer, title, attributes, input } => {
            let ext = out.extension().and_then(|e| e.to_str()).unwrap_or("");
            if ext != "dot" && ext != "html" {
                return Err(Failure::Usage(anyhow!(
                    "cannot render to `{}`: the output must end in .dot or .html",
                    out.display()
                )));
            }
            let doc = load(&path, input.format)?;
            let opts = RenderOptions {
                layer_filter: layer.and_then(Layer::from_number),
                include_attributes: attributes,
                title,
            };
            let text = if ext == "dot" {
                render::to_dot(&doc, &opts)
            } else {
                render::to_html_report(&doc, &opts)
            }
            .map_err(anyhow::Error::from)?;
            save(&out, text.as_bytes())?;
            Ok(0)
        }
        Command::Scaffold { outline, out } => {
            let target = output_format(&out, FormatArg::Auto)?;
            let text = fs::read_to_string(&outline).with_context(|| format!("cannot read {}", outline.display()))?;
            let outline_doc = scaffold::parse_outline(&text)
                .and_then(|o| scaffold::scaffold(&o))
                .with_context(|| format!("{}", outline.display()))?;
            save(&out, &serialization::write(&outline_doc, target))?;
            Ok(0)
        }
        Command::Stats { path, input, report } => {
            let doc = load(&path, input.format)?;
            let s = query::stats(&doc);
            print!("{}", emit(report, &s, || stats_text(&s)));
            Ok(0)
        }
        Command::Explain { rule } => {
            let text = validation::explain_rule(&rule).map_err(anyhow::Error::from)?;
            print!("{text}");
            Ok(0)
        }
    }
}

fn input_format(path: &Path, arg: FormatArg) -> anyhow::Result<FormatId> {
    match arg {
        FormatArg::Provjson => Ok(FormatId::ProvJson),
        FormatArg::Ttl => Ok(FormatId::TurtleProfile),
        FormatArg::Auto => FormatId::from_path(path).ok_or_else(|| {
            anyhow!("cannot tell the format of {} from its extension (use .provjson or .ttl, or --format)", path.display())
        }),
    }
}

fn output_format(path: &Path, arg: FormatArg) -> Result<FormatId, Failure> {
    input_format(path, arg).map_err(Failure::Usage)
}

fn load(path: &Path, format: FormatArg) -> anyhow::Result<ProvenanceDocument> {
    let format = input_format(path, format)?;
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    serialization::parse(&bytes, format).with_context(|| format!("{}", path.display()))
}

fn save(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn emit<T: serde::Serialize>(report: Report, value: &T, text: impl FnOnce() -> String) -> String {
    match report {
        Report::Json => serde_json::to_string_pretty(value).expect("reports serialize") + "\n",
        Report::Text => text(),
    }
}

fn named(doc: &ProvenanceDocument, id: &QualifiedName) -> String {
    match doc.element(id).and_then(|e| e.name()) {
        Some(name) => format!("{id} ({name})"),
        None => id.to_string(),
    }
}

fn lineage_text(doc: &ProvenanceDocument, r: &LineageReport) -> String {
    let closure = r.closure();
    let mut out = format!("lineage of {}: {} source(s)\n", named(doc, &r.root), closure.len());
    for id in closure {
        let _ = writeln!(out, "  depth {}: {}", r.depth_by_node[id], named(doc, id));
    }
    for e in &r.edges {
        let _ = writeln!(out, "  edge: {} {} {}", e.subject, e.kind, e.object);
    }
    out
}

fn delegation_text(doc: &ProvenanceDocument, agent: &QualifiedName, chain: &[QualifiedName]) -> String {
    let mut out = format!("delegation chain of {}: {} principal(s)\n", named(doc, agent), chain.len());
    for (i, id) in chain.iter().enumerate() {
        let _ = writeln!(out, "  {}. {}", i + 1, named(doc, id));
    }
    out
}

fn attribution_text(doc: &ProvenanceDocument, entity: &QualifiedName, r: &[Attribution]) -> String {
    let mut out = format!("attribution of {}: {} agent(s)\n", named(doc, entity), r.len());
    for a in r {
        let how = if a.via_delegation { "via delegation" } else { "direct" };
        let _ = write!(out, "  {} [{how}]", named(doc, &a.agent));
        if !a.roles.is_empty() {
            let _ = write!(out, " role: {}", a.roles.join(", "));
        }
        out.push('\n');
    }
    out
}

fn freshness_text(r: &FreshnessReport) -> String {
    let show = |t: &Option<dashprov::Timestamp>| t.map_or_else(|| "unknown".to_string(), |t| t.to_string());
    format!(
        "freshness of {}\n  latest generation: {}\n  latest data update end: {}\n  effective freshness: {}\n",
        r.entity,
        show(&r.latest_generation),
        show(&r.latest_update_activity_end),
        show(&r.effective_freshness)
    )
}

fn stats_text(s: &Stats) -> String {
    let mut out = String::new();
    let e = &s.elements;
    let _ = writeln!(out, "elements: {} (entities {}, activities {}, agents {})", e.total, e.entity, e.activity, e.agent);
    for (label, n) in &s.refinements {
        let _ = writeln!(out, "  {label}: {n}");
    }
    let _ = writeln!(out, "relations: {}", s.relation_total);
    for (kind, n) in s.relations.iter().filter(|(_, n)| **n > 0) {
        let _ = writeln!(out, "  {kind}: {n}");
    }
    let l = &s.layers;
    let _ = writeln!(out, "layers: L1={} L2={} L3={} unlayered={}", l.l1, l.l2, l.l3, l.unlayered);
    if let Some(err) = &s.layering_error {
        let _ = writeln!(out, "  layering failed: {err}");
    }
    let _ = writeln!(out, "prefixes: {}", s.prefixes);
    out
}
