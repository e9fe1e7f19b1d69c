//! `astarlab`: generate instances, validate heuristics, measure A* overhead
//! and audit embeddings. Every run writes `config.toml` next to its outputs;
//! `--config` replays it.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use astarlab_core::analysis::{
    audit_crucial_coordinates, check_admissibility, check_consistency, check_subadditivity,
    count_bad_pairs, measure_overhead, sample_triples, verify_usp_margin, AnalysisError,
    OverheadMode, OverheadReport, PairSource, Violation,
};
use astarlab_core::heuristics::{
    beacon_count, build_beacon_embedding, build_tiebreak_embedding, parse_embedding,
    sample_beacons, Embedding, HeuristicError, HeuristicSpec, NormP,
};
use astarlab_core::instances::{
    default_edge_probability, gen_labeling_clique, gen_labeling_grid, gen_linf_clique,
    gen_linf_grid, gen_lp_lb, gen_random_usp, random_delta, random_x, read_bundle, write_bundle,
    InstanceBundle, InstanceError, WeightMode,
};
use astarlab_core::search::TiePolicy;
use astarlab_core::grid::{Cell, GridError};
use astarlab_core::{
    graph_to_grid, grid_to_graph, parse_graph_file, parse_grid, serialize_graph, serialize_grid, Graph, Weight,
};

const CONFIG_VERSION: i64 = 1;

#[derive(Debug)]
enum CliError {
    Param(String),
    Io(String),
    Validation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Param(_) => 2,
            CliError::Io(_) => 3,
            CliError::Validation(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Param(m) => write!(f, "parameter error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Validation(m) => write!(f, "validation failed: {m}"),
        }
    }
}

impl From<InstanceError> for CliError {
    fn from(e: InstanceError) -> Self {
        match e {
            InstanceError::Io(e) => CliError::Io(e.to_string()),
            InstanceError::MarginNotReached(_) => CliError::Validation(e.to_string()),
            e => CliError::Param(e.to_string()),
        }
    }
}

impl From<HeuristicError> for CliError {
    fn from(e: HeuristicError) -> Self {
        CliError::Param(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Inconsistent { .. } => CliError::Validation(e.to_string()),
            e => CliError::Param(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn param(msg: impl Into<String>) -> CliError {
    CliError::Param(msg.into())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Prints to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[derive(Parser)]
#[command(name = "astarlab", version, about = "A* heuristic overhead experiments")]
struct Cli {
    /// Worker threads for pair evaluation; output order does not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance directory (graph, manifest, families, queries).
    Gen(GenArgs),
    /// Check consistency, admissibility and subadditivity of a heuristic.
    Validate(ValidateArgs),
    /// Measure additive overhead (extra scanned vertices) over a pair source.
    Overhead(OverheadArgs),
    /// Crucial-coordinate audit of an embedding and bad-pair counts.
    Audit(AuditArgs),
    /// Convert a grid file into a graph file, or a graph plus its cell table back into a grid.
    Convert(ConvertArgs),
}

/// Output directory and optional config replay, shared by every subcommand.
#[derive(Args, Clone, Default)]
struct RunOpts {
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replay a config.toml written by an earlier run; other flags are ignored.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunOpts {
    fn out_dir(&self) -> Result<&Path> {
        let dir = self.out.as_deref().ok_or_else(|| param("--out is required"))?;
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(dir)
    }
}

/// Loads `[command]` from a config file in place of the parsed flags.
fn replay<T: DeserializeOwned>(args: T, run: &RunOpts, command: &str) -> Result<T> {
    let Some(path) = &run.config else {
        return Ok(args);
    };
    let table: toml::Table = toml::from_str(&read_text(path)?)
        .map_err(|e| param(format!("{}: {e}", path.display())))?;
    match table.get("command").and_then(toml::Value::as_str) {
        Some(c) if c == command => {}
        other => {
            return Err(param(format!(
                "{} is a config for `{}`, not `{command}`",
                path.display(),
                other.unwrap_or("?")
            )))
        }
    }
    let section = table
        .get(command)
        .cloned()
        .ok_or_else(|| param(format!("{} has no [{command}] section", path.display())))?;
    section
        .try_into()
        .map_err(|e| param(format!("{}: {e}", path.display())))
}

fn write_config<T: Serialize>(dir: &Path, command: &str, args: &T) -> Result<()> {
    let mut table = toml::Table::new();
    table.insert("version".into(), CONFIG_VERSION.into());
    table.insert("command".into(), command.into());
    let section = toml::Table::try_from(args).map_err(|e| param(e.to_string()))?;
    table.insert(command.into(), section.into());
    let text = toml::to_string(&table).map_err(|e| param(e.to_string()))?;
    write_text(&dir.join("config.toml"), &format!("# astarlab experiment config\n{text}"))
}

/// CSV with a versioned schema comment as its first line.
fn write_csv<R: Serialize>(path: &Path, schema: &str, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    let mut text = format!("# astarlab {schema} v1\n");
    text.push_str(&String::from_utf8(body).map_err(|e| CliError::Io(e.to_string()))?);
    write_text(path, &text)
}

fn absolute(p: &Option<PathBuf>) -> Result<Option<PathBuf>> {
    p.as_ref()
        .map(|p| fs::canonicalize(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))))
        .transpose()
}

// ---------------------------------------------------------------- gen

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Family {
    LpLb,
    LinfClique,
    LabelingClique,
    LinfGrid,
    LabelingGrid,
    Usp,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    Deterministic,
    Random,
}

#[derive(Args, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct GenArgs {
    /// Instance family.
    #[arg(value_enum)]
    family: Option<Family>,
    /// Bit count (lp-lb) or vertex count (usp).
    #[arg(long)]
    n: Option<usize>,
    /// Clique size, or side of the grid block.
    #[arg(long)]
    m: Option<usize>,
    /// Leaves per clique vertex, or flank width.
    #[arg(long)]
    k: Option<usize>,
    /// Bit length of the labeling offsets.
    #[arg(long)]
    b: Option<u32>,
    /// Weight offsets for the linf instances.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Seed for every random draw of this family.
    #[arg(long)]
    seed: Option<u64>,
    /// Tie-freeness tolerance for random mode.
    #[arg(long)]
    epsilon: Option<Weight>,
    /// Comma-separated m² offsets for labeling-grid; drawn from --seed if absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<i64>>,
    /// Edge probability for usp; defaults to 3 ln n / n.
    #[arg(long)]
    edge_probability: Option<f64>,
    /// Denominator bits for usp weights.
    #[arg(long)]
    weight_bits: Option<u32>,
    /// Required second-shortest margin for usp.
    #[arg(long)]
    margin: Option<Weight>,
    /// Permit labeling-clique sizes below 10.
    #[arg(long)]
    #[serde(default)]
    allow_small: bool,
    #[command(flatten)]
    #[serde(skip)]
    run: RunOpts,
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| param(format!("{flag} is required for this family")))
}

fn cmd_gen(mut a: GenArgs) -> Result<()> {
    a = GenArgs { run: a.run.clone(), ..replay(a.clone(), &a.run, "gen")? };
    let family = need(a.family, "the family argument")?;
    let seed = *a.seed.get_or_insert(0);
    let mode = |a: &mut GenArgs| -> Result<WeightMode> {
        match a.mode.get_or_insert(ModeArg::Deterministic) {
            ModeArg::Deterministic => Ok(WeightMode::Deterministic),
            ModeArg::Random => Ok(WeightMode::Random {
                seed,
                epsilon: a.epsilon.clone().ok_or_else(|| param("--epsilon is required in random mode"))?,
            }),
        }
    };
    let bundle = match family {
        Family::LpLb => gen_lp_lb(need(a.n, "--n")?)?,
        Family::LinfClique => {
            let mode = mode(&mut a)?;
            gen_linf_clique(need(a.m, "--m")?, need(a.k, "--k")?, mode)?
        }
        Family::LinfGrid => {
            let mode = mode(&mut a)?;
            gen_linf_grid(need(a.m, "--m")?, need(a.k, "--k")?, mode)?
        }
        Family::LabelingClique => {
            let (m, b) = (need(a.m, "--m")?, need(a.b, "--b")?);
            if !(1..=62).contains(&b) {
                return Err(param("--b must be in 1..=62"));
            }
            gen_labeling_clique(m, need(a.k, "--k")?, b, &random_delta(m, b, seed), a.allow_small)?
        }
        Family::LabelingGrid => {
            let (m, b) = (need(a.m, "--m")?, need(a.b, "--b")?);
            if !(1..=62).contains(&b) {
                return Err(param("--b must be in 1..=62"));
            }
            let x = a.x.get_or_insert_with(|| random_x(m, b, seed)).clone();
            gen_labeling_grid(m, need(a.k, "--k")?, b, &x)?
        }
        Family::Usp => {
            let n = need(a.n, "--n")?;
            let p = *a.edge_probability.get_or_insert_with(|| default_edge_probability(n));
            let margin = a.margin.get_or_insert_with(|| Weight::integer(3)).clone();
            let bundle = gen_random_usp(n, p, a.weight_bits, &margin, seed)?;
            let report = verify_usp_margin(&bundle.graph, &margin);
            if !report.pass {
                return Err(CliError::Validation(format!("margin {margin} not met at {:?}", report.witness)));
            }
            bundle
        }
    };
    let dir = a.run.out_dir()?.to_path_buf();
    write_bundle(&bundle, &dir)?;
    write_config(&dir, "gen", &a)?;
    let mut line = format!(
        "{}: {} vertices, {} edges",
        bundle.kind,
        bundle.graph.n(),
        bundle.graph.edge_count()
    );
    for key in ["epsilon", "realized-margin", "tie-rejections"] {
        if let Some(v) = bundle.params.get(key) {
            let v = v.as_str().map_or_else(|| v.to_string(), str::to_owned);
            let _ = write!(line, ", {key} {v}");
        }
    }
    emit(&format!("{line}\n"));
    Ok(())
}

// ---------------------------------------------------------------- inputs

#[derive(Args, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct InputArgs {
    /// Graph file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Grid file.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Instance directory written by `gen`.
    #[arg(long)]
    instance: Option<PathBuf>,
}

struct Input {
    graph: Graph,
    bundle: Option<InstanceBundle>,
}

impl InputArgs {
    fn resolve(&mut self) -> Result<()> {
        self.graph = absolute(&self.graph)?;
        self.grid = absolute(&self.grid)?;
        self.instance = absolute(&self.instance)?;
        Ok(())
    }

    fn load(&self) -> Result<Input> {
        match (&self.graph, &self.grid, &self.instance) {
            (Some(p), None, None) => Ok(Input {
                graph: parse_graph_file(&read_text(p)?).map_err(|e| param(format!("{}: {e}", p.display())))?,
                bundle: None,
            }),
            (None, Some(p), None) => {
                let spec = parse_grid(&read_text(p)?).map_err(|e| param(format!("{}: {e}", p.display())))?;
                let (graph, _) = grid_to_graph(&spec).map_err(|e| param(e.to_string()))?;
                Ok(Input { graph, bundle: None })
            }
            (None, None, Some(dir)) => {
                let bundle = read_bundle(dir)?;
                Ok(Input {
                    graph: bundle.graph.clone(),
                    bundle: Some(bundle),
                })
            }
            _ => Err(param("give exactly one of --graph, --grid, --instance")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum HeuristicKind {
    Zero,
    Exact,
    Beacon,
    BeaconTiebreak,
    Norm,
}

#[derive(Args, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct HeuristicArgs {
    /// Heuristic family.
    #[arg(long, value_enum)]
    heuristic: Option<HeuristicKind>,
    /// Embedding file; replaces beacon selection.
    #[arg(long)]
    embedding: Option<PathBuf>,
    /// Beacon count.
    #[arg(long)]
    beacons: Option<usize>,
    /// Beacon count as n^alpha, rounded to the nearest integer, at least 1.
    #[arg(long)]
    alpha: Option<f64>,
    /// Use a vertex family of the instance as the beacon set.
    #[arg(long)]
    beacon_family: Option<String>,
    /// Seed for beacon sampling.
    #[arg(long)]
    beacon_seed: Option<u64>,
    /// Norm exponent: a positive integer or `inf`.
    #[arg(long)]
    norm: Option<String>,
    /// Irrational comparisons closer than this count as ties (norm only).
    #[arg(long)]
    gap: Option<Weight>,
}

impl HeuristicArgs {
    fn kind(&self) -> Result<HeuristicKind> {
        self.heuristic.ok_or_else(|| param("--heuristic is required"))
    }

    fn uses_sampled_beacons(&self) -> bool {
        self.embedding.is_none() && self.beacon_family.is_none()
    }

    /// Fills in derived values (absolute paths, realized beacon count).
    fn resolve(&mut self, n: usize) -> Result<()> {
        self.embedding = absolute(&self.embedding)?;
        let kind = self.kind()?;
        if matches!(kind, HeuristicKind::Zero | HeuristicKind::Exact) || !self.uses_sampled_beacons() {
            return Ok(());
        }
        match (self.beacons, self.alpha) {
            (Some(_), _) => {}
            (None, Some(alpha)) => {
                if !(alpha.is_finite() && alpha >= 0.0) {
                    return Err(param("--alpha must be a non-negative number"));
                }
                self.beacons = Some(beacon_count(n, alpha));
            }
            (None, None) => {
                return Err(param("beacon heuristics need --beacons, --alpha, --beacon-family or --embedding"))
            }
        }
        self.beacon_seed.get_or_insert(0);
        Ok(())
    }

    fn build(&self, g: &Graph, bundle: Option<&InstanceBundle>, seed: u64) -> Result<HeuristicSpec> {
        let kind = self.kind()?;
        match kind {
            HeuristicKind::Zero => return Ok(HeuristicSpec::Zero),
            HeuristicKind::Exact => return Ok(HeuristicSpec::Exact),
            _ => {}
        }
        let emb = if let Some(path) = &self.embedding {
            let emb = parse_embedding(&read_text(path)?).map_err(|e| param(format!("{}: {e}", path.display())))?;
            emb.validate(g.n())?;
            emb
        } else {
            let beacons = match &self.beacon_family {
                Some(name) => {
                    let b = bundle
                        .ok_or_else(|| param("--beacon-family needs --instance"))?
                        .family(name)
                        .to_vec();
                    if b.is_empty() {
                        return Err(param(format!("no vertex family `{name}`")));
                    }
                    b
                }
                None => sample_beacons(g.n(), self.beacons.unwrap_or(1), seed)?,
            };
            if kind == HeuristicKind::BeaconTiebreak {
                build_tiebreak_embedding(g, &beacons)?
            } else {
                build_beacon_embedding(g, &beacons)?
            }
        };
        let emb = Arc::new(emb);
        Ok(match kind {
            HeuristicKind::Beacon => HeuristicSpec::Beacon(emb),
            HeuristicKind::BeaconTiebreak => {
                if emb.pi1.is_none() {
                    return Err(param("beacon-tiebreak needs an embedding with Euler positions"));
                }
                HeuristicSpec::BeaconTieBreak(emb)
            }
            HeuristicKind::Norm => HeuristicSpec::Norm {
                p: self.norm.as_deref().unwrap_or("inf").parse::<NormP>().map_err(param)?,
                emb,
                gap: self.gap.clone().unwrap_or_else(Weight::zero),
            },
            HeuristicKind::Zero | HeuristicKind::Exact => unreachable!(),
        })
    }
}

fn embedding_of(h: &HeuristicSpec) -> Result<&Embedding> {
    h.embedding()
        .ok_or_else(|| param("this command needs an embedding-based heuristic"))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum PairKind {
    #[default]
    All,
    Sampled,
    Family,
}

#[derive(Args, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct PairArgs {
    /// Pair source.
    #[arg(long, value_enum)]
    pairs: Option<PairKind>,
    /// Seed for sampled pairs.
    #[arg(long)]
    pair_seed: Option<u64>,
    /// Number of sampled pairs.
    #[arg(long)]
    pair_count: Option<usize>,
    /// Query family of the instance; a vertex family gives all its pairs.
    #[arg(long)]
    family: Option<String>,
}

impl PairArgs {
    fn resolve(&mut self) {
        if *self.pairs.get_or_insert_with(PairKind::default) == PairKind::Sampled {
            self.pair_seed.get_or_insert(0);
            self.pair_count.get_or_insert(1000);
        }
    }

    fn source(&self, bundle: Option<&InstanceBundle>) -> Result<PairSource> {
        match self.pairs.unwrap_or_default() {
            PairKind::All => Ok(PairSource::AllPairs),
            PairKind::Sampled => Ok(PairSource::Sampled {
                seed: self.pair_seed.unwrap_or(0),
                count: self.pair_count.unwrap_or(1000),
            }),
            PairKind::Family => {
                let name = self.family.as_deref().ok_or_else(|| param("--pairs family needs --family"))?;
                let bundle = bundle.ok_or_else(|| param("--pairs family needs --instance"))?;
                let mut pairs = bundle.query_family(name).to_vec();
                if pairs.is_empty() {
                    let vs = bundle.family(name);
                    pairs = vs
                        .iter()
                        .flat_map(|&u| vs.iter().filter(move |&&v| v != u).map(move |&v| (u, v)))
                        .collect();
                }
                if pairs.is_empty() {
                    return Err(param(format!("no query or vertex family `{name}`")));
                }
                Ok(PairSource::Explicit(pairs))
            }
        }
    }
}

// ---------------------------------------------------------------- validate

#[derive(Args, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct ValidateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    heuristic: HeuristicArgs,
    /// Targets checked for consistency and admissibility; all when n is at most this.
    #[arg(long)]
    targets: Option<usize>,
    /// Triples checked for subadditivity; all when n³ is at most this.
    #[arg(long)]
    triples: Option<usize>,
    /// Seed for target and triple sampling.
    #[arg(long)]
    check_seed: Option<u64>,
    #[command(flatten)]
    #[serde(skip)]
    run: RunOpts,
}

#[derive(Serialize)]
struct ViolationRow {
    kind: String,
    vertices: String,
    slack: String,
    approx_slack: f64,
}

impl From<&Violation> for ViolationRow {
    fn from(v: &Violation) -> Self {
        ViolationRow {
            kind: serde_plain_kind(v),
            vertices: v.vertices.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
            slack: v.slack.as_ref().map_or_else(String::new, Weight::to_string),
            approx_slack: v.approx_slack,
        }
    }
}

fn serde_plain_kind(v: &Violation) -> String {
    toml::Value::try_from(v.kind)
        .ok()
        .and_then(|k| k.as_str().map(str::to_owned))
        .unwrap_or_else(|| format!("{:?}", v.kind))
}

fn cmd_validate(a: ValidateArgs) -> Result<()> {
    let mut a = ValidateArgs { run: a.run.clone(), ..replay(a.clone(), &a.run, "validate")? };
    a.input.resolve()?;
    let input = a.input.load()?;
    let g = &input.graph;
    let n = g.n();
    a.heuristic.resolve(n)?;
    let limit = *a.targets.get_or_insert(256);
    let triple_count = *a.triples.get_or_insert(20_000);
    let seed = *a.check_seed.get_or_insert(0);
    let h = a.heuristic.build(g, input.bundle.as_ref(), a.heuristic.beacon_seed.unwrap_or(0))?;

    let targets: Vec<usize> = if n <= limit {
        (0..n).collect()
    } else {
        sample_beacons(n, limit, seed)?
    };
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|s| targets.iter().map(move |&t| (s, t))).collect();
    let triples = sample_triples(n, triple_count, seed);
    let consistency = check_consistency(g, &h, &targets)?;
    let admissibility = check_admissibility(g, &h, &pairs)?;
    let subadditivity = check_subadditivity(g, &h, &triples)?;

    let dir = a.run.out_dir()?.to_path_buf();
    let all: Vec<&Violation> = consistency.iter().chain(&admissibility).chain(&subadditivity).collect();
    write_csv(&dir.join("violations.csv"), "violations", all.iter().map(|v| ViolationRow::from(*v)))?;
    let mut summary = String::new();
    let _ = writeln!(summary, "heuristic = {}", h.name());
    let _ = writeln!(summary, "n = {n}");
    let _ = writeln!(summary, "targets = {}", targets.len());
    let _ = writeln!(summary, "triples = {}", triples.len());
    let _ = writeln!(summary, "consistency-violations = {}", consistency.len());
    let _ = writeln!(summary, "admissibility-violations = {}", admissibility.len());
    let _ = writeln!(summary, "subadditivity-violations = {}", subadditivity.len());
    write_text(&dir.join("summary.txt"), &summary)?;
    write_config(&dir, "validate", &a)?;
    emit(&summary);
    for v in all.iter().take(20) {
        emit(&format!("violation: {v}\n"));
    }
    if all.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{} violations", all.len())))
    }
}

// ---------------------------------------------------------------- overhead

#[derive(Clone, Copy, Debug, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModeKind {
    #[default]
    Optimal,
    Fifo,
    Lifo,
    MinH,
    MaxDist,
}

impl ModeKind {
    fn mode(self) -> OverheadMode {
        match self {
            ModeKind::Optimal => OverheadMode::Optimal,
            ModeKind::Fifo => OverheadMode::Policy(TiePolicy::Fifo),
            ModeKind::Lifo => OverheadMode::Policy(TiePolicy::Lifo),
            ModeKind::MinH => OverheadMode::Policy(TiePolicy::MinH),
            ModeKind::MaxDist => OverheadMode::Policy(TiePolicy::MaxDist),
        }
    }
}

#[derive(Args, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct OverheadArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    heuristic: HeuristicArgs,
    #[command(flatten)]
    pairs: PairArgs,
    /// Optimal tie-breaking, or an A* run under a tie policy.
    #[arg(long, value_enum)]
    mode: Option<ModeKind>,
    /// Independent beacon draws with seeds beacon-seed, beacon-seed + 1, ...
    #[arg(long)]
    repeat: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    run: RunOpts,
}

#[derive(Serialize)]
struct OverheadRow {
    run: usize,
    s: usize,
    t: usize,
    scanned: usize,
    path_vertices: usize,
    overhead: i64,
}

fn cmd_overhead(a: OverheadArgs) -> Result<()> {
    let mut a = OverheadArgs { run: a.run.clone(), ..replay(a.clone(), &a.run, "overhead")? };
    a.input.resolve()?;
    let input = a.input.load()?;
    let g = &input.graph;
    a.heuristic.resolve(g.n())?;
    a.pairs.resolve();
    let mode = a.mode.get_or_insert_with(ModeKind::default).mode();
    let repeat = *a.repeat.get_or_insert(1);
    if repeat == 0 {
        return Err(param("--repeat must be at least 1"));
    }
    let sampled = !matches!(a.heuristic.kind()?, HeuristicKind::Zero | HeuristicKind::Exact)
        && a.heuristic.uses_sampled_beacons();
    if repeat > 1 && !sampled {
        return Err(param("--repeat needs sampled beacons"));
    }
    let source = a.pairs.source(input.bundle.as_ref())?;
    let base = a.heuristic.beacon_seed.unwrap_or(0);
    let mut reports: Vec<OverheadReport> = Vec::with_capacity(repeat);
    for r in 0..repeat {
        let h = a.heuristic.build(g, input.bundle.as_ref(), base + r as u64)?;
        reports.push(measure_overhead(g, &h, &source, mode)?);
    }

    let dir = a.run.out_dir()?.to_path_buf();
    let rows = reports.iter().enumerate().flat_map(|(run, rep)| {
        rep.records.iter().map(move |p| OverheadRow {
            run,
            s: p.s,
            t: p.t,
            scanned: p.scanned,
            path_vertices: p.path_vertices,
            overhead: p.overhead,
        })
    });
    write_csv(&dir.join("overhead.csv"), "overhead", rows)?;
    let mut summary = String::new();
    for (r, rep) in reports.iter().enumerate() {
        if repeat > 1 {
            let _ = writeln!(summary, "[run {r}] beacon-seed = {}", base + r as u64);
        }
        summary.push_str(&rep.summary());
    }
    if repeat > 1 {
        let total: Weight = reports.iter().map(|r| r.mean_overhead.clone()).sum();
        let mean = total / Weight::integer(repeat as i64);
        let _ = writeln!(summary, "[all] mean-overhead-over-runs = {mean} (~{:.6})", mean.to_f64());
    }
    write_text(&dir.join("summary.txt"), &summary)?;
    write_config(&dir, "overhead", &a)?;
    emit(&summary);
    Ok(())
}

// ---------------------------------------------------------------- audit

#[derive(Args, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct AuditArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    heuristic: HeuristicArgs,
    #[command(flatten)]
    pairs: PairArgs,
    /// Crucial-pair slack; defaults to the instance's crucial-slack.
    #[arg(long)]
    slack: Option<Weight>,
    /// Bad-pair threshold; defaults to the instance's bad-threshold when present.
    #[arg(long)]
    bad_threshold: Option<Weight>,
    #[command(flatten)]
    #[serde(skip)]
    run: RunOpts,
}

#[derive(Serialize)]
struct CoordinateRow {
    coordinate: usize,
    crucial_pairs: usize,
}

#[derive(Serialize)]
struct PairRow {
    u: usize,
    v: usize,
}

fn cmd_audit(a: AuditArgs) -> Result<()> {
    let mut a = AuditArgs { run: a.run.clone(), ..replay(a.clone(), &a.run, "audit")? };
    a.input.resolve()?;
    let input = a.input.load()?;
    let g = &input.graph;
    let bundle = input.bundle.as_ref();
    a.heuristic.heuristic.get_or_insert(HeuristicKind::Beacon);
    a.heuristic.resolve(g.n())?;
    a.pairs.resolve();
    if a.slack.is_none() {
        a.slack = bundle.and_then(|b| b.param_weight("crucial-slack"));
    }
    let slack = a.slack.clone().ok_or_else(|| param("--slack is required (instance has no crucial-slack)"))?;
    if a.bad_threshold.is_none() {
        a.bad_threshold = bundle.and_then(|b| b.param_weight("bad-threshold"));
    }
    let h = a.heuristic.build(g, bundle, a.heuristic.beacon_seed.unwrap_or(0))?;
    let emb = embedding_of(&h)?;
    // Crucial-pair graphs are undirected.
    let pairs: Vec<(usize, usize)> = a
        .pairs
        .source(bundle)?
        .pairs(g.n())
        .into_iter()
        .filter(|(u, v)| u != v)
        .map(|(u, v)| (u.min(v), u.max(v)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let report = audit_crucial_coordinates(g, emb, &pairs, &slack)?;
    let bad = a
        .bad_threshold
        .as_ref()
        .map(|t| count_bad_pairs(g, &h, &pairs, t))
        .transpose()?;

    let dir = a.run.out_dir()?.to_path_buf();
    write_csv(
        &dir.join("audit.csv"),
        "audit",
        report.counts().into_iter().enumerate().map(|(coordinate, crucial_pairs)| CoordinateRow {
            coordinate,
            crucial_pairs,
        }),
    )?;
    write_csv(
        &dir.join("distorted.csv"),
        "distorted",
        report.distorted.iter().map(|&(u, v)| PairRow { u, v }),
    )?;
    let mut summary = format!("pairs = {}\n", pairs.len());
    summary.push_str(&report.summary());
    if let Some(bad) = &bad {
        write_csv(&dir.join("bad-pairs.csv"), "bad-pairs", bad.bad.iter().map(|&(u, v)| PairRow { u, v }))?;
        let _ = writeln!(summary, "bad-threshold = {}", bad.threshold);
        let _ = writeln!(summary, "bad-pairs = {} of {}", bad.bad.len(), bad.total);
    }
    write_text(&dir.join("summary.txt"), &summary)?;
    write_config(&dir, "audit", &a)?;
    emit(&summary);
    match &report.cycle {
        Some(c) if !c.verified => Err(CliError::Validation(format!(
            "cycle on coordinate {} has |sum| {} above bound {}",
            c.coordinate,
            c.sum.abs(),
            c.bound
        ))),
        _ => Ok(()),
    }
}

// ---------------------------------------------------------------- convert

#[derive(Args, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct ConvertArgs {
    /// Grid file to convert; writes graph.txt and cells.csv.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Graph file to convert back; writes grid.toml. Needs --cells.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Cell table (vertex, x, y, weight) as written by the grid direction.
    #[arg(long)]
    cells: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    run: RunOpts,
}

#[derive(Serialize, Deserialize)]
struct CellRow {
    vertex: usize,
    x: i64,
    y: i64,
    weight: String,
}

fn read_cells(path: &Path, n: usize) -> Result<Vec<(Cell, Weight)>> {
    let text = read_text(path)?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let mut cells: Vec<Option<(Cell, Weight)>> = vec![None; n];
    for row in r.deserialize::<CellRow>() {
        let row = row.map_err(|e| param(format!("{}: {e}", path.display())))?;
        let w: Weight = row.weight.parse().map_err(|e| param(format!("{}: weight: {e}", path.display())))?;
        let slot = cells
            .get_mut(row.vertex)
            .ok_or_else(|| param(format!("{}: vertex {} out of range", path.display(), row.vertex)))?;
        *slot = Some(((row.x, row.y), w));
    }
    cells
        .into_iter()
        .enumerate()
        .map(|(v, c)| c.ok_or_else(|| param(format!("{}: no cell for vertex {v}", path.display()))))
        .collect()
}

fn cmd_convert(a: ConvertArgs) -> Result<()> {
    let mut a = ConvertArgs { run: a.run.clone(), ..replay(a.clone(), &a.run, "convert")? };
    a.grid = absolute(&a.grid)?;
    a.graph = absolute(&a.graph)?;
    a.cells = absolute(&a.cells)?;
    let dir = a.run.out_dir()?.to_path_buf();
    match (&a.grid, &a.graph) {
        (Some(path), None) => {
            let spec = parse_grid(&read_text(path)?).map_err(|e| param(format!("{}: {e}", path.display())))?;
            let (graph, index) = grid_to_graph(&spec).map_err(|e| param(e.to_string()))?;
            write_text(&dir.join("graph.txt"), &serialize_graph(&graph))?;
            let rows = index.cell_of.iter().enumerate().map(|(vertex, &(x, y))| CellRow {
                vertex,
                x,
                y,
                weight: spec.cells[&(x, y)].to_string(),
            });
            write_csv(&dir.join("cells.csv"), "cells", rows)?;
            write_config(&dir, "convert", &a)?;
            emit(&format!("{} cells, {} edges\n", graph.n(), graph.edge_count()));
        }
        (None, Some(path)) => {
            let cells_path = a.cells.clone().ok_or_else(|| param("--graph needs --cells"))?;
            let graph = parse_graph_file(&read_text(path)?).map_err(|e| param(format!("{}: {e}", path.display())))?;
            let cells = read_cells(&cells_path, graph.n())?;
            let spec = graph_to_grid(&graph, &cells).map_err(|e| match e {
                GridError::EdgeMismatch(..) | GridError::EdgeNotAdjacent(..) => CliError::Validation(e.to_string()),
                _ => param(e.to_string()),
            })?;
            write_text(&dir.join("grid.toml"), &serialize_grid(&spec))?;
            write_config(&dir, "convert", &a)?;
            emit(&format!(
                "{} cells, {} blocked pairs\n",
                spec.cells.len(),
                spec.blocked().len()
            ));
        }
        _ => return Err(param("exactly one of --grid and --graph is required")),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("parameter error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("parameter error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Overhead(a) => cmd_overhead(a),
        Command::Audit(a) => cmd_audit(a),
        Command::Convert(a) => cmd_convert(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
