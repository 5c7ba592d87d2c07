use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde_json::json;
use surfsteer_core::experiment::{
    self, bin_groups, require_strongly_connected, run_detailed, write_failures_csv,
    write_grouped_bins_csv, write_records_csv, write_records_jsonl, Binning,
};
use surfsteer_core::graph::{
    largest_scc, load_edge_list, strongly_connected_components, write_edge_list, GraphMetadata,
    SccProvenance,
};
use surfsteer_core::seed::derive_seed;
use surfsteer_core::surfer::{stationary_of, write_lorenz_csv, write_stationary_csv};
use surfsteer_core::synthetic::{scale_free, ScaleFreeConfig};
use surfsteer_core::targets::{sample_targets, write_targets_csv};
use surfsteer_core::{
    Error, ModificationSpec, PowerIteration, Strategy, SweepConfig, TargetSet, WeightedDigraph,
};

use crate::{
    BinningArg, Format, GenerateArgs, GraphArgs, LorenzArgs, Mode, ModifyArgs, SolverArgs,
    StationaryArgs, SweepArgs,
};

/// CLI-level failures that are not core errors.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0} sweep run(s) failed; see the failure manifest")]
    PartialSweep(usize),
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn validation(msg: impl Into<String>) -> anyhow::Error {
    Error::Validation(msg.into()).into()
}

/// A seed for runs where none was given, echoed so the run can be replayed.
fn fresh_seed(what: &str) -> u64 {
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or_default();
    let seed = derive_seed(nanos, &[u64::from(std::process::id())]);
    eprintln!("{what}: no seed given, using {seed}");
    seed
}

fn solver(args: &SolverArgs) -> Result<PowerIteration> {
    Ok(PowerIteration::new(args.tolerance, args.max_iterations)?)
}

fn graph_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".to_owned())
}

/// Loads an edge list and makes it strongly connected, either by refusing
/// (`strict`) or by keeping only the largest component.
fn prepare_graph(path: &Path, strict: bool) -> Result<(WeightedDigraph, GraphMetadata)> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let loaded = load_edge_list(BufReader::new(file))
        .with_context(|| format!("cannot read {}", path.display()))?;
    let g = loaded.graph;
    if g.is_empty() {
        return Err(Error::EmptyGraph).with_context(|| format!("{} has no links", path.display()));
    }
    if strict {
        require_strongly_connected(&g)?;
        let meta = GraphMetadata::describe(&g);
        return Ok((g, meta));
    }
    let components = strongly_connected_components(&g).len();
    if components == 1 {
        let meta = GraphMetadata::describe(&g);
        return Ok((g, meta));
    }
    let (reduced, _) = largest_scc(&g)?;
    log::warn!(
        "graph has {components} strongly connected components; keeping the largest ({} of {} nodes)",
        reduced.node_count(),
        g.node_count()
    );
    let mut meta = GraphMetadata::describe(&reduced);
    meta.scc = Some(SccProvenance {
        original_nodes: g.node_count(),
        original_edges: g.edge_count(),
        retained_nodes: reduced.node_count(),
        components,
    });
    Ok((reduced, meta))
}

fn load(args: &GraphArgs) -> Result<(WeightedDigraph, GraphMetadata)> {
    prepare_graph(&args.input, args.strict)
}

pub fn stationary(args: StationaryArgs) -> Result<()> {
    let (g, mut meta) = load(&args.graph)?;
    let solver = solver(&args.solver)?;
    let result = stationary_of(&g, &solver)?;
    log::info!(
        "converged after {} iterations, residual {:e}",
        result.iterations,
        result.residual
    );

    let mut out = output(args.output.as_deref())?;
    match args.format {
        Format::Csv => write_stationary_csv(&g, &result.pi, &mut out)?,
        Format::Jsonl => {
            for (i, p) in result.pi.iter().enumerate() {
                serde_json::to_writer(
                    &mut out,
                    &json!({ "node": i, "label": g.label(i), "pi": p }),
                )?;
                writeln!(out)?;
            }
        }
    }
    out.flush()?;

    if let Some(path) = &args.output {
        meta.extra = Some(json!({
            "input": args.graph.input,
            "tolerance": solver.tolerance,
            "max_iterations": solver.max_iterations,
            "iterations": result.iterations,
            "residual": result.residual,
        }));
        write_json(&sidecar(path, ".meta.json"), &serde_json::to_value(&meta)?)?;
    }
    Ok(())
}

fn read_target_labels(path: &Path) -> Result<Vec<String>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let mut labels = Vec::new();
    let first = lines.next();
    if first == Some("sample_id,node_index,label") {
        for line in lines {
            let label = line.splitn(3, ',').nth(2).ok_or_else(|| {
                validation(format!("{}: malformed target row {line:?}", path.display()))
            })?;
            labels.push(label.to_owned());
        }
    } else {
        labels.extend(first.into_iter().chain(lines).map(str::to_owned));
    }
    Ok(labels)
}

fn resolve_targets(g: &WeightedDigraph, labels: &[String]) -> Result<TargetSet> {
    let members = labels
        .iter()
        .map(|l| {
            g.find_label(l)
                .ok_or_else(|| validation(format!("target {l:?} is not a node of the graph")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TargetSet::from_members(members, g.node_count())?)
}

pub fn modify(args: ModifyArgs) -> Result<()> {
    let (g, input_meta) = load(&args.graph)?;
    let solver = solver(&args.solver)?;
    let needs_seed = args.phi.is_some() || args.strategy == Strategy::Combined;
    let seed = match args.seed {
        Some(s) => s,
        None if needs_seed => fresh_seed("modify"),
        None => 0,
    };

    let targets = if let Some(phi) = args.phi {
        sample_targets(&g, phi, seed, 0)?
    } else if let Some(path) = &args.targets_file {
        resolve_targets(&g, &read_target_labels(path)?)?
    } else if !args.targets.is_empty() {
        resolve_targets(&g, &args.targets)?
    } else {
        return Err(validation(
            "one of --targets, --targets-file or --phi is required",
        ));
    };

    let spec = match args.strategy {
        Strategy::ClickBias => ModificationSpec::click_bias(args.bias_strength),
        Strategy::LinkInsertion => ModificationSpec::link_insertion(args.bias_strength),
        Strategy::Combined => {
            let alpha = args
                .alpha
                .ok_or_else(|| validation("--alpha is required for the combined strategy"))?;
            ModificationSpec::combined(args.bias_strength, alpha, seed)
        }
    };
    if args.alpha.is_some() && args.strategy != Strategy::Combined {
        log::warn!("--alpha only applies to the combined strategy; ignored");
    }

    let run = run_detailed(&g, &graph_id(&args.graph.input), &targets, &spec, &solver)?;

    let mut w = create(&args.output)?;
    write_edge_list(&run.modified, &mut w)?;
    w.flush()?;

    let mut meta = GraphMetadata::describe(&run.modified);
    meta.scc = input_meta.scc;
    let target_labels: Vec<String> = targets.members().iter().map(|&m| g.label(m)).collect();
    meta.extra = Some(json!({
        "input": args.graph.input,
        "modification": spec,
        "budget": run.budget,
        "seed": seed,
        "targets": {
            "labels": target_labels,
            "phi": args.phi,
            "fingerprint": format!("{:016x}", targets.fingerprint()),
        },
        "tolerance": solver.tolerance,
        "max_iterations": solver.max_iterations,
    }));
    write_json(
        &sidecar(&args.output, ".meta.json"),
        &serde_json::to_value(&meta)?,
    )?;

    let mut tw = create(&sidecar(&args.output, ".targets.csv"))?;
    write_targets_csv(&g, [&targets], &mut tw)?;
    tw.flush()?;

    let records = [run.record];
    let mut mw = create(&sidecar(&args.output, ".metrics.csv"))?;
    write_records_csv(&records, &mut mw, false)?;
    mw.flush()?;
    let stdout = io::stdout().lock();
    write_records_csv(&records, stdout, false)?;
    Ok(())
}

fn config_sets_seed(text: &str) -> bool {
    text.lines().any(|l| {
        l.split('#')
            .next()
            .and_then(|l| l.split_once('='))
            .is_some_and(|(k, _)| k.trim() == "master_seed")
    })
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig> {
    let (mut cfg, seeded) = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let cfg = SweepConfig::from_kv_str(&text)
                .with_context(|| format!("bad config {}", path.display()))?;
            (cfg, config_sets_seed(&text))
        }
        None => (SweepConfig::default(), false),
    };
    match args.mode {
        Some(Mode::Realistic) => cfg.bias_strengths = experiment::realistic_strengths(),
        Some(Mode::Saturation) => cfg.bias_strengths = experiment::saturation_strengths(),
        None => {}
    }
    if !args.phi.is_empty() {
        cfg.phi_values = args.phi.clone();
    }
    if !args.bias_strength.is_empty() {
        cfg.bias_strengths = args.bias_strength.clone();
    }
    if !args.alpha.is_empty() {
        cfg.alpha_values = args.alpha.clone();
    }
    if !args.strategies.is_empty() {
        cfg.strategies = args.strategies.clone();
    }
    if let Some(n) = args.samples {
        cfg.samples_per_phi = n;
    }
    if let Some(t) = args.tolerance {
        cfg.tolerance = t;
    }
    if let Some(m) = args.max_iterations {
        cfg.max_iterations = m;
    }
    cfg.master_seed = match args.seed {
        Some(s) => s,
        None if seeded => cfg.master_seed,
        None => fresh_seed("sweep"),
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    let cfg = sweep_config(&args)?;
    let (g, mut meta, id) = if args.synthetic {
        let gen = ScaleFreeConfig {
            nodes: args
                .synthetic_nodes
                .unwrap_or(ScaleFreeConfig::default().nodes),
            ..ScaleFreeConfig::default()
        };
        let g = scale_free(&gen)?;
        let mut meta = GraphMetadata::describe(&g);
        meta.synthetic = true;
        let id = format!("synthetic-n{}-s{}", gen.nodes, gen.seed);
        meta.extra = Some(json!({ "generator": gen }));
        (g, meta, id)
    } else {
        let input = args
            .input
            .as_deref()
            .expect("clap requires input without --synthetic");
        let (g, meta) = prepare_graph(input, args.strict)?;
        (g, meta, graph_id(input))
    };
    let workers = match args.workers {
        Some(0) => return Err(validation("--workers must be at least 1")),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    log::info!("{} runs on {workers} worker(s)", cfg.run_count());

    let outcome = experiment::sweep(&g, &id, &cfg, workers)?;

    let mut w = create(&args.output)?;
    match args.format {
        Format::Csv => write_records_csv(&outcome.records, &mut w, args.timing)?,
        Format::Jsonl => write_records_jsonl(&outcome.records, &mut w, args.timing)?,
    }
    w.flush()?;

    let mut fw = create(&sidecar(&args.output, ".failures.csv"))?;
    write_failures_csv(&outcome.failures, &mut fw)?;
    fw.flush()?;

    fs::write(sidecar(&args.output, ".config"), cfg.to_kv_string())
        .context("cannot write config echo")?;

    let mut tw = create(&sidecar(&args.output, ".targets.csv"))?;
    write_targets_csv(&g, outcome.target_sets.iter().map(|(_, t)| t), &mut tw)?;
    tw.flush()?;

    if let Some(n_bins) = args.bins {
        let binning = match args.binning {
            BinningArg::EqualWidth => Binning::EqualWidth,
            BinningArg::EqualCount => Binning::EqualCount,
        };
        let groups = bin_groups(&outcome.records, n_bins, binning)?;
        let mut bw = create(&sidecar(&args.output, ".bins.csv"))?;
        write_grouped_bins_csv(&groups, &mut bw)?;
        bw.flush()?;
    }

    let graph_extra = meta.extra.take();
    meta.extra = Some(json!({
        "graph_id": id,
        "config": cfg,
        "generator": graph_extra,
        "baseline_iterations": outcome.baseline.iterations,
        "records": outcome.records.len(),
        "failures": outcome.failures.len(),
    }));
    write_json(
        &sidecar(&args.output, ".meta.json"),
        &serde_json::to_value(&meta)?,
    )?;

    if !outcome.failures.is_empty() {
        return Err(Failure::PartialSweep(outcome.failures.len()).into());
    }
    Ok(())
}

pub fn lorenz(args: LorenzArgs) -> Result<()> {
    let (g, mut meta) = load(&args.graph)?;
    let solver = solver(&args.solver)?;
    let points = experiment::lorenz_report(&g, &solver)?;
    let mut out = output(args.output.as_deref())?;
    write_lorenz_csv(&points, &mut out)?;
    out.flush()?;
    if let Some(path) = &args.output {
        meta.extra = Some(json!({
            "input": args.graph.input,
            "tolerance": solver.tolerance,
            "max_iterations": solver.max_iterations,
        }));
        write_json(&sidecar(path, ".meta.json"), &serde_json::to_value(&meta)?)?;
    }
    Ok(())
}

pub fn generate(args: GenerateArgs) -> Result<()> {
    let cfg = ScaleFreeConfig {
        nodes: args.nodes,
        mean_out_degree: args.mean_out_degree,
        exponent: args.exponent,
        seed: args.seed,
    };
    let g = scale_free(&cfg)?;
    let mut w = create(&args.output)?;
    write_edge_list(&g, &mut w)?;
    w.flush()?;
    let mut meta = GraphMetadata::describe(&g);
    meta.synthetic = true;
    meta.extra = Some(json!({ "generator": cfg }));
    write_json(
        &sidecar(&args.output, ".meta.json"),
        &serde_json::to_value(&meta)?,
    )?;
    Ok(())
}
