use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use relprop::io;
use relprop::{
    build_graph as build, mean_ap, run_query, run_sweep, ChainParams, ClusterParams, Error, EvalTruth, KernelParams,
    MatchGraph, PropagationParams, Query, RankConfig, SubgraphParams, SweepSpec, SynthModel,
};

use crate::config::FileConfig;
use crate::{BuildGraphArgs, CliError, EvalArgs, Model, PipelineFlags, RankArgs, SweepArgs, SynthArgs};

type Result<T> = std::result::Result<T, CliError>;

fn progress(quiet: bool, msg: impl AsRef<str>) {
    if !quiet {
        eprintln!("{}", msg.as_ref());
    }
}

fn read_text(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path).map_err(Error::from)?)
}

fn load_graph(path: &Path) -> Result<MatchGraph> {
    let bytes = fs::read(path).map_err(Error::from)?;
    Ok(io::decode_graph(&bytes)?)
}

fn file_stem(path: &Path) -> Result<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_owned)
        .ok_or_else(|| Error::BadParams(format!("cannot derive a query id from {}", path.display())).into())
}

pub(crate) fn build_graph(args: BuildGraphArgs, quiet: bool) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let defaults = KernelParams::default();
    let kernel = KernelParams::new(
        args.theta.or(file.kernel.theta).unwrap_or(defaults.theta),
        args.sigma.or(file.kernel.sigma).unwrap_or(defaults.sigma),
    )?;
    let records = io::parse_matches(&read_text(&args.matches)?)?;
    let graph = build(&records, &kernel)?;
    fs::write(&args.out, io::encode_graph(&graph)).map_err(Error::from)?;
    println!("vertices\t{}", graph.vertex_count());
    println!("edges\t{}", graph.edge_count());
    progress(quiet, format!("wrote {}", args.out.display()));
    Ok(())
}

fn rank_config(flags: &PipelineFlags) -> Result<RankConfig> {
    let file = FileConfig::load(flags.config.as_deref())?;
    let sub_defaults = SubgraphParams::default();
    let prop_defaults = PropagationParams::default();
    let use_subgraph = !flags.no_subgraph && file.subgraph.enabled.unwrap_or(true);
    let subgraph = if use_subgraph {
        Some(SubgraphParams::new(
            flags.roots.or(file.subgraph.roots).unwrap_or(sub_defaults.root_size),
            flags.depth.or(file.subgraph.depth).unwrap_or(sub_defaults.depth),
        )?)
    } else {
        None
    };
    let propagation = PropagationParams {
        alpha: flags.alpha.or(file.propagation.alpha).unwrap_or(prop_defaults.alpha),
        gamma: flags.gamma.or(file.propagation.gamma).unwrap_or(prop_defaults.gamma),
        iters: flags.iters.or(file.propagation.iters).unwrap_or(prop_defaults.iters),
        tolerance: flags.tol.or(file.propagation.tolerance),
    };
    propagation.validate()?;
    Ok(RankConfig { subgraph, propagation })
}

pub(crate) fn rank(args: RankArgs, quiet: bool) -> Result<()> {
    let config = rank_config(&args.pipeline)?;
    let graph = load_graph(&args.graph)?;
    let query = match (&args.query, &args.query_id) {
        (Some(path), _) => Query::new(file_stem(path)?, io::parse_query(&read_text(path)?)?),
        (None, Some(id)) => Query::from_member(&graph, id)?,
        (None, None) => unreachable!("clap requires a query source"),
    };
    let outcome = run_query(&graph, &query, &config)?;
    fs::write(&args.out, io::write_ranking(&outcome.ranking)).map_err(Error::from)?;
    progress(
        quiet,
        format!(
            "query {}: |V*| = {}, {} ranked, wrote {}",
            query.id,
            outcome.subgraph.order(),
            outcome.ranking.len(),
            args.out.display()
        ),
    );
    Ok(())
}

pub(crate) fn eval(args: EvalArgs) -> Result<()> {
    let truths = io::parse_truth(&read_text(&args.truth)?)?;
    let mut scores: BTreeMap<String, f64> = BTreeMap::new();
    for path in &args.rankings {
        let qid = file_stem(path)?;
        let truth = truths.get(&qid).ok_or_else(|| Error::MissingTruth(qid.clone()))?;
        let ranking = io::parse_ranking(&read_text(path)?)?;
        let ids: Vec<&str> = ranking.iter().map(|(id, _)| id.as_str()).collect();
        let ap = relprop::average_precision(&ids, truth)?;
        if scores.insert(qid.clone(), ap).is_some() {
            return Err(Error::BadParams(format!("query {qid} given twice")).into());
        }
    }
    let aps: Vec<f64> = scores.values().copied().collect();
    let map = mean_ap(&aps)?;

    let mut out = String::new();
    for (qid, ap) in &scores {
        let _ = writeln!(out, "{qid}\t{ap:.6}");
    }
    let _ = writeln!(out, "mAP\t{map:.6}");
    print!("{out}");

    if let Some(csv) = &args.csv {
        let mut text = String::from("query,ap\n");
        for (qid, ap) in &scores {
            let _ = writeln!(text, "{qid},{ap:.6}");
        }
        let _ = writeln!(text, "mAP,{map:.6}");
        fs::write(csv, text).map_err(Error::from)?;
    }
    Ok(())
}

/// Grid values: flag list, else the config value, else the default grid.
fn pick<T>(flag: Vec<T>, file: Option<T>, default: Vec<T>) -> Vec<T> {
    if !flag.is_empty() {
        flag
    } else if let Some(v) = file {
        vec![v]
    } else {
        default
    }
}

fn load_queries(dir: &Path) -> Result<Vec<Query>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(Error::from)?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<std::result::Result<_, _>>()
        .map_err(Error::from)?;
    paths.retain(|p| {
        p.is_file()
            && !p
                .file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with('.'))
    });
    paths.sort();
    paths
        .iter()
        .map(|p| Ok(Query::new(file_stem(p)?, io::parse_query(&read_text(p)?)?)))
        .collect()
}

pub(crate) fn sweep(args: SweepArgs, quiet: bool) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let defaults = SweepSpec::default();
    let spec = SweepSpec {
        root_sizes: pick(args.roots, file.subgraph.roots, defaults.root_sizes),
        depths: pick(args.depth, file.subgraph.depth, defaults.depths),
        alphas: pick(args.alpha, file.propagation.alpha, defaults.alphas),
        gammas: pick(args.gamma, file.propagation.gamma, defaults.gammas),
        iters: pick(args.iters, file.propagation.iters, defaults.iters),
    };
    spec.validate()?;
    if args.workers == 0 {
        return Err(Error::BadParams("workers must be at least 1".into()).into());
    }
    let graph = load_graph(&args.graph)?;
    let queries = load_queries(&args.queries)?;
    let truths: BTreeMap<String, EvalTruth> = io::parse_truth(&read_text(&args.truth)?)?;
    progress(
        quiet,
        format!(
            "sweeping {} grid points over {} queries",
            spec.points().len(),
            queries.len()
        ),
    );
    let rows = run_sweep(&graph, &queries, &truths, &spec, args.workers)?;
    fs::write(&args.out, io::write_sweep_csv(&rows)).map_err(Error::from)?;
    progress(quiet, format!("wrote {}", args.out.display()));
    Ok(())
}

pub(crate) fn synth(args: SynthArgs, quiet: bool) -> Result<()> {
    let model = match args.model {
        Model::Chain => {
            let d = ChainParams::default();
            SynthModel::Chain(ChainParams {
                relevant: args.relevant.unwrap_or(d.relevant),
                noise: args.noise.unwrap_or(d.noise),
                query_inliers: args.query_inliers.unwrap_or(d.query_inliers),
            })
        }
        Model::Clusters => {
            let d = ClusterParams::default();
            SynthModel::Clusters(ClusterParams {
                distractors: args.distractors.unwrap_or(d.distractors),
                relevant_size: args.relevant_size.unwrap_or(d.relevant_size),
                distractor_size: args.distractor_size.unwrap_or(d.distractor_size),
                relevant_reach: args.reach.unwrap_or(d.relevant_reach),
                relevant_density: args.relevant_density.unwrap_or(d.relevant_density),
                distractor_density: args.distractor_density.unwrap_or(d.distractor_density),
                hubs: args.hubs.unwrap_or(d.hubs),
                hub_fanout: args.hub_fanout.unwrap_or(d.hub_fanout),
                queries: args.queries.unwrap_or(d.queries),
                query_matches: args.query_matches.unwrap_or(d.query_matches),
            })
        }
    };
    let corpus = relprop::gen_synthetic(&model, args.seed)?;

    let queries_dir = args.out.join("queries");
    fs::create_dir_all(&queries_dir).map_err(Error::from)?;
    fs::write(args.out.join("matches.tsv"), io::write_matches(&corpus.records)).map_err(Error::from)?;
    for q in &corpus.queries {
        fs::write(queries_dir.join(format!("{}.tsv", q.id)), io::write_query(&q.counts)).map_err(Error::from)?;
    }
    fs::write(args.out.join("truth.json"), io::write_truth(&corpus.truths)).map_err(Error::from)?;
    progress(
        quiet,
        format!(
            "wrote {} records and {} queries to {}",
            corpus.records.len(),
            corpus.queries.len(),
            args.out.display()
        ),
    );
    Ok(())
}
