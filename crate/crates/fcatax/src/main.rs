//! The fcatax command-line pipeline.
//!
//! ```text
//! usage log ──build-context──▶ .cxt ──lattice────▶ concepts JSON
//!                                   ├─stability──▶ sigma JSON
//!                                   ├─select─────▶ DOT + JSON taxonomy
//!                                   └─compare────▶ overlap report
//! ```
//!
//! Every file-producing command drops a `.manifest.json` sidecar next
//! to each output recording inputs, configuration, and stage timings.
//!
//! Exit codes: 0 success, 2 usage or parse problem, 3 empty result,
//! 4 concept capacity exceeded, 5 internal consistency failure.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use serde::Deserialize;

use fcatax::error::{Error, Result};
use fcatax::export::{
    format_significant, lattice_to_json, selection_to_dot, selection_to_json, stability_to_json,
};
use fcatax::ingest::{self, IngestConfig, LogKind, MergeMap};
use fcatax::lattice::{build_cover_graph, enumerate_concepts_with, ConceptLattice, LatticeOptions};
use fcatax::manifest::RunManifest;
use fcatax::selection::{
    iceberg_filter, selection_overlap, stability_threshold_filter, top_k_extent, top_k_stability,
    SelectionResult,
};
use fcatax::stability::{stability_all, verify_counting_identity, StabilityReport};
use fcatax::{io as fio, FormalContext};

#[derive(Parser)]
#[command(
    name = "fcatax",
    version,
    about = "Concept lattices, stability indices, and user-group taxonomies from web-usage logs"
)]
struct Cli {
    /// Worker threads for enumeration and stability (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Abort lattice construction beyond this many concepts.
    #[arg(long, global = true, default_value_t = LatticeOptions::default().max_concepts)]
    max_concepts: usize,

    /// Reserved for future sampling features; accepted and recorded in
    /// manifests but currently unused.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a formal context from a usage log and write it as CXT.
    BuildContext {
        /// Usage log CSV.
        log: PathBuf,
        /// TOML ingest configuration; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CXT path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Enumerate all concepts and the cover graph of a CXT context.
    Lattice {
        cxt: PathBuf,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the stability index of every concept.
    Stability {
        cxt: PathBuf,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Select a taxonomy slice and export it as DOT and JSON.
    #[command(group(
        ArgGroup::new("criterion")
            .required(true)
            .args(["iceberg", "top_extent", "top_stability", "stability_gt"]),
    ))]
    Select {
        cxt: PathBuf,
        /// All concepts with at least this many objects in the extent.
        #[arg(long, value_name = "MIN_EXTENT")]
        iceberg: Option<usize>,
        /// The K concepts of largest extent.
        #[arg(long, value_name = "K")]
        top_extent: Option<usize>,
        /// The K concepts of largest stability.
        #[arg(long, value_name = "K")]
        top_stability: Option<usize>,
        /// All concepts with stability strictly above this threshold.
        #[arg(long, value_name = "THETA")]
        stability_gt: Option<f64>,
        /// Drop the degenerate extremes before ranking by stability
        /// (the default).
        #[arg(long, conflicts_with = "include_extremes")]
        exclude_extremes: bool,
        /// Keep the extremes when ranking by stability.
        #[arg(long)]
        include_extremes: bool,
        /// Output DOT path.
        #[arg(long)]
        dot: PathBuf,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Contrast the top-K concepts by extent with the top-K by
    /// stability.
    Compare {
        cxt: PathBuf,
        /// How many concepts each ranking keeps.
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::EmptyContext => 3,
                Error::CapacityExceeded { .. } => 4,
                Error::InconsistentConceptSet(_) => 5,
                _ => 2,
            })
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::BuildContext { log, config, out } => cmd_build_context(cli, log, config.as_deref(), out),
        Command::Lattice { cxt, out } => cmd_lattice(cli, cxt, out),
        Command::Stability { cxt, out } => cmd_stability(cli, cxt, out),
        Command::Select {
            cxt,
            iceberg,
            top_extent,
            top_stability,
            stability_gt,
            include_extremes,
            dot,
            out,
            ..
        } => {
            let flags = SelectFlags {
                iceberg: *iceberg,
                top_extent: *top_extent,
                top_stability: *top_stability,
                stability_gt: *stability_gt,
                exclude_extremes: !include_extremes,
            };
            cmd_select(cli, cxt, &flags, dot, out)
        }
        Command::Compare { cxt, k } => cmd_compare(cli, cxt, *k as usize),
    }
}

/// The ingest configuration file. All paths are resolved relative to
/// the file's own directory.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    /// "external" (site attributes) or "internal" (page attributes).
    kind: Option<String>,
    min_sessions: Option<u64>,
    window_start: Option<i64>,
    window_end: Option<i64>,
    merge_map: Option<PathBuf>,
    site_filter: Option<PathBuf>,
}

fn load_config(path: Option<&Path>) -> Result<(LogKind, IngestConfig, serde_json::Value)> {
    let file = match path {
        None => ConfigFile::default(),
        Some(p) => {
            let text = with_path(fs::read_to_string(p), p)?;
            toml::from_str(&text)
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", p.display())))?
        }
    };
    let base = path.and_then(Path::parent).unwrap_or(Path::new("."));
    let resolve = |p: &PathBuf| if p.is_relative() { base.join(p) } else { p.clone() };

    let kind = match file.kind.as_deref() {
        None | Some("external") => LogKind::External,
        Some("internal") => LogKind::Internal,
        Some(other) => {
            return Err(Error::InvalidConfig(format!(
                "kind must be \"external\" or \"internal\", not {other:?}"
            )))
        }
    };
    let mut cfg = IngestConfig::default();
    if let Some(v) = file.min_sessions {
        cfg.min_sessions = v;
    }
    if let Some(v) = file.window_start {
        cfg.window_start = v;
    }
    if let Some(v) = file.window_end {
        cfg.window_end = v;
    }
    if let Some(p) = &file.merge_map {
        let p = resolve(p);
        cfg.merge_map = with_path_ctx(MergeMap::read_file(&p), &p)?;
    }
    if let Some(p) = &file.site_filter {
        let p = resolve(p);
        cfg.site_filter = Some(with_path_ctx(ingest::read_site_filter(&p), &p)?);
    }
    cfg.validate()?;

    let snapshot = serde_json::json!({
        "kind": match kind { LogKind::External => "external", LogKind::Internal => "internal" },
        "min_sessions": cfg.min_sessions,
        "window_start": cfg.window_start,
        "window_end": cfg.window_end,
        "merge_map": file.merge_map.as_ref().map(|p| resolve(p).display().to_string()),
        "site_filter": file.site_filter.as_ref().map(|p| resolve(p).display().to_string()),
    });
    Ok((kind, cfg, snapshot))
}

fn cmd_build_context(cli: &Cli, log: &Path, config: Option<&Path>, out: &Path) -> Result<()> {
    let mut manifest = RunManifest::new("build-context");
    manifest.inputs.push(log.display().to_string());
    if let Some(c) = config {
        manifest.inputs.push(c.display().to_string());
    }

    let (kind, cfg, mut snapshot) = load_config(config)?;
    let file = with_path(fs::File::open(log), log)?;
    let parsed = manifest.time("parse", || {
        ingest::parse_usage_log(&mut std::io::BufReader::new(file), kind)
    })?;
    warn_rejects(&parsed.rejected);
    snapshot["rejected_rows"] = serde_json::json!(parsed.rejected.len());
    record_globals(cli, &mut snapshot);
    manifest.config = snapshot;

    let ctx = manifest.time("build", || ingest::build_context(&parsed.records, &cfg))?;
    with_path_ctx(fio::write_cxt_file(&ctx, out), out)?;
    manifest.write_for(out)?;
    println!(
        "context: {} objects, {} attributes",
        ctx.object_count(),
        ctx.attribute_count()
    );
    Ok(())
}

fn cmd_lattice(cli: &Cli, cxt: &Path, out: &Path) -> Result<()> {
    let mut manifest = RunManifest::new("lattice");
    manifest.inputs.push(cxt.display().to_string());
    let mut snapshot = serde_json::json!({});
    record_globals(cli, &mut snapshot);
    manifest.config = snapshot;

    let ctx = read_context(cxt)?;
    let lat = build_lattice(cli, &ctx, &mut manifest)?;
    manifest.concept_count = Some(lat.len());
    let json = lattice_to_json(&ctx, &lat);
    with_path(fs::write(out, json), out)?;
    manifest.write_for(out)?;
    println!("concepts: {}", lat.len());
    Ok(())
}

fn cmd_stability(cli: &Cli, cxt: &Path, out: &Path) -> Result<()> {
    let mut manifest = RunManifest::new("stability");
    manifest.inputs.push(cxt.display().to_string());
    let mut snapshot = serde_json::json!({});
    record_globals(cli, &mut snapshot);
    manifest.config = snapshot;

    let ctx = read_context(cxt)?;
    let lat = build_lattice(cli, &ctx, &mut manifest)?;
    manifest.concept_count = Some(lat.len());
    let report = manifest.time("stability", || stability_all(&ctx, &lat));
    if !verify_counting_identity(&report, &ctx) {
        return Err(Error::InconsistentConceptSet(
            "stability counting identity failed: generator counts do not sum to 2^|G|".into(),
        ));
    }
    let json = stability_to_json(&report);
    with_path(fs::write(out, json), out)?;
    manifest.write_for(out)?;
    println!("concepts: {}", lat.len());
    Ok(())
}

struct SelectFlags {
    iceberg: Option<usize>,
    top_extent: Option<usize>,
    top_stability: Option<usize>,
    stability_gt: Option<f64>,
    exclude_extremes: bool,
}

fn cmd_select(cli: &Cli, cxt: &Path, flags: &SelectFlags, dot: &Path, out: &Path) -> Result<()> {
    let mut manifest = RunManifest::new("select");
    manifest.inputs.push(cxt.display().to_string());

    let ctx = read_context(cxt)?;
    let lat = build_lattice(cli, &ctx, &mut manifest)?;
    manifest.concept_count = Some(lat.len());
    let report = manifest.time("stability", || stability_all(&ctx, &lat));

    let sel: SelectionResult = if let Some(min_extent) = flags.iceberg {
        iceberg_filter(&lat, min_extent)
    } else if let Some(k) = flags.top_extent {
        top_k_extent(&lat, k)
    } else if let Some(k) = flags.top_stability {
        top_k_stability(&lat, &report, k, flags.exclude_extremes)
    } else {
        let theta = flags.stability_gt.expect("clap enforces one criterion");
        stability_threshold_filter(&lat, &report, theta)
    };
    if sel.is_empty() {
        eprintln!("warning: selection is empty");
    }

    let mut snapshot = serde_json::json!({});
    record_globals(cli, &mut snapshot);
    manifest.config = snapshot;
    manifest.criterion = Some(sel.criterion.clone());
    manifest.outputs.push(dot.display().to_string());
    manifest.outputs.push(out.display().to_string());

    with_path(fs::write(dot, selection_to_dot(&ctx, &lat, &sel, &report)), dot)?;
    with_path(fs::write(out, selection_to_json(&ctx, &lat, &sel)), out)?;
    manifest.write_for(dot)?;
    manifest.write_for(out)?;
    println!("selected: {}", sel.len());
    Ok(())
}

fn cmd_compare(cli: &Cli, cxt: &Path, k: usize) -> Result<()> {
    let ctx = read_context(cxt)?;
    let options = LatticeOptions {
        max_concepts: cli.max_concepts,
    };
    let lat = ConceptLattice::from_context_with(&ctx, &options)?;
    let report: StabilityReport = stability_all(&ctx, &lat);

    let by_extent = top_k_extent(&lat, k);
    let by_stability = top_k_stability(&lat, &report, k, false);
    let overlap = selection_overlap(&by_extent, &by_stability)?;

    let extent_set: BTreeSet<usize> = by_extent.selected_ids.iter().copied().collect();
    let stability_set: BTreeSet<usize> = by_stability.selected_ids.iter().copied().collect();
    println!("jaccard: {}", format_significant(overlap.jaccard, 12));
    println!("common: {}", id_list(overlap.common.iter().copied()));
    println!(
        "only-extent: {}",
        id_list(extent_set.difference(&stability_set).copied())
    );
    println!(
        "only-stability: {}",
        id_list(stability_set.difference(&extent_set).copied())
    );
    Ok(())
}

fn id_list(ids: impl Iterator<Item = usize>) -> String {
    let parts: Vec<String> = ids.map(|id| format!("c{id}")).collect();
    if parts.is_empty() {
        "(none)".into()
    } else {
        parts.join(" ")
    }
}

fn read_context(path: &Path) -> Result<FormalContext> {
    let file = with_path(fs::File::open(path), path)?;
    fio::read_cxt(&mut std::io::BufReader::new(file))
}

fn build_lattice(cli: &Cli, ctx: &FormalContext, manifest: &mut RunManifest) -> Result<ConceptLattice> {
    let options = LatticeOptions {
        max_concepts: cli.max_concepts,
    };
    let concepts = manifest.time("enumerate", || enumerate_concepts_with(ctx, &options))?;
    manifest.time("cover-graph", || build_cover_graph(ctx, concepts))
}

fn record_globals(cli: &Cli, snapshot: &mut serde_json::Value) {
    snapshot["max_concepts"] = serde_json::json!(cli.max_concepts);
    snapshot["threads"] = serde_json::json!(cli.threads);
    snapshot["seed"] = serde_json::json!(cli.seed);
}

fn warn_rejects(rejected: &[ingest::RejectedRow]) {
    const SHOWN: usize = 20;
    let mut err = std::io::stderr().lock();
    for row in rejected.iter().take(SHOWN) {
        let _ = writeln!(err, "warning: rejected line {}: {}", row.line, row.reason);
    }
    if rejected.len() > SHOWN {
        let _ = writeln!(err, "warning: {} more rows rejected", rejected.len() - SHOWN);
    }
}

/// Attaches the file path to a bare I/O error, so "No such file or
/// directory" always names the file.
fn with_path<T>(r: std::io::Result<T>, path: &Path) -> Result<T> {
    r.map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

/// Same, for library results that may wrap an I/O error.
fn with_path_ctx<T>(r: Result<T>, path: &Path) -> Result<T> {
    r.map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", path.display()),
        )),
        other => other,
    })
}
