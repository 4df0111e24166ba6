use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use disjunct::covers::{
    chromatic_triangulation_cover, multilinear_cover, sos2_gray_cover, sosk_cover, sosk_half_cover, stars_cover,
    triangulation_cover, validate_cover, CoverViolation,
};
use disjunct::formulations::{
    adhoc_disaggregated, branching_report, embed_data, emit_lp, encoded_extended, idealness_check, jeroslow,
    multiway_ib, pairwise_ideal, projection_check_with_jobs, FormulationError, Idealness, Rational, SizeReport,
    IDEALNESS_VAR_LIMIT, PROJECTION_NODE_LIMIT,
};
use disjunct::generators::{
    cardinality, k1, multilinear_grid, random_triangulation, sos2, sosk, union_jack, GridTriangulation,
};
use disjunct::geometry::{
    parse_rational, partition_rank, random_partition, square_ring, t_junction, triangle_ring, validate_partition,
    GeometryError, PartitionViolation,
};
use disjunct::io::{read_document, scheme_to_json, Document};
use disjunct::search::{feasibility_mip, log_lower_bound, min_cover_decide_with_limit, SearchError, EXACT_NODE_LIMIT};
use disjunct::{BicliqueCover, Cdc, ConflictGraph, MipModel};

/// Outcomes with dedicated exit codes.
#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    SizeGate(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage(_) => 2,
            Failure::SizeGate(_) => 3,
        }
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Failure::Usage(msg.into()).into()
}

#[derive(Parser)]
#[command(
    name = "disjunct",
    version,
    about = "Combinatorial disjunctive constraints: analysis, biclique covers, MIP formulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest graph the exact cover search accepts.
    #[arg(long, global = true, default_value_t = EXACT_NODE_LIMIT)]
    exact_node_limit: usize,
    /// Deepest cover the exact search tries.
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    /// Seed for random generators; required by them.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for batch verification.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Writes a CDC, triangulation, or partition file.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// Reports size, conflict structure, and representability.
    Analyze {
        input: PathBuf,
        /// Largest minimal infeasible set searched for.
        #[arg(long, default_value_t = 6)]
        max_rank: usize,
        /// Writes the conflict graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Builds and validates a biclique cover, or a scheme for `cnf`.
    Cover {
        input: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Grid sizes for `multilinear`, comma separated.
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
    },
    /// Writes a formulation in LP format.
    Emit {
        input: PathBuf,
        #[arg(long, value_enum)]
        formulation: Formulation,
        /// Cover file for `ideal`, or scheme file for `multiway`.
        #[arg(long)]
        cover: Option<PathBuf>,
        /// Breakpoint data: `{"x": {label: [values]}, "y": {...}}`.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Number of levels for `covermip`.
        #[arg(long)]
        depth: Option<usize>,
        /// Writes a JSON model summary.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Checks a cover against a CDC, or a formulation's correctness.
    Verify {
        input: PathBuf,
        #[arg(long, conflicts_with = "model")]
        cover: Option<PathBuf>,
        #[arg(long, value_enum, required_unless_present = "cover")]
        model: Option<Formulation>,
        /// Cover or scheme file the model is built from.
        #[arg(long, requires = "model")]
        with_cover: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Family {
    Sos2 {
        #[arg(long)]
        n: usize,
    },
    Sosk {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    Cardinality {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
    },
    Multilinear {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
    },
    Unionjack {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    K1 {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Grid triangulation with seeded diagonals.
    Random {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    Partition {
        #[arg(value_enum)]
        kind: PartitionKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PartitionKind {
    TJunction,
    SquareRing,
    TriangleRing,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Stars,
    Gray,
    Multilinear,
    Triangulation,
    Chromatic,
    Sosk,
    SoskHalf,
    Exact,
    Cnf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Formulation {
    Jeroslow,
    Encoded,
    Adhoc,
    Ideal,
    Multiway,
    Covermip,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Failure>().map_or(2, Failure::code);
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate { family } => generate(cli, family),
        Command::Analyze { input, max_rank, dot } => analyze(input, *max_rank, dot.as_deref()),
        Command::Cover { input, method, dims } => cover(cli, input, *method, dims),
        Command::Emit { input, formulation, cover, data, depth, summary } => {
            let cdc = read_input(input)?.to_cdc()?;
            let mut model = build_model(cli, &cdc, *formulation, cover.as_deref(), *depth)?;
            if let Some(path) = data {
                model = embed(&model, path)?;
            }
            let lp = emit_lp(&model)?;
            eprintln!("{}\n{}", SizeReport::TSV_HEADER, model.size_report().tsv_row());
            if let Some(path) = summary {
                write_json(Some(path), &model.summary_json())?;
            }
            write_text(cli.out.as_deref(), &lp)
        }
        Command::Verify { input, cover, model, with_cover } => match (cover, model) {
            (Some(c), _) => verify_cover(input, c),
            (None, Some(f)) => verify_model(cli, input, *f, with_cover.as_deref()),
            (None, None) => Err(usage("verify needs --cover or --model")),
        },
    }
}

fn read_input(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_document(&text).with_context(|| format!("parsing {}", path.display())).map_err(|e| usage(format!("{e:#}")))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_json(path: Option<&Path>, v: &Value) -> Result<()> {
    write_text(path, &(serde_json::to_string_pretty(v)? + "\n"))
}

fn seed(cli: &Cli) -> Result<u64> {
    cli.seed.ok_or_else(|| usage("random generation needs --seed"))
}

fn generate(cli: &Cli, family: &Family) -> Result<()> {
    let bad = |e: &dyn std::fmt::Display| usage(e.to_string());
    let doc = match family {
        Family::Sos2 { n } => Document::Cdc(sos2(*n).map_err(|e| bad(&e))?),
        Family::Sosk { n, k } => Document::Cdc(sosk(*n, *k).map_err(|e| bad(&e))?),
        Family::Cardinality { n, l } => Document::Cdc(cardinality(*n, *l).map_err(|e| bad(&e))?),
        Family::Multilinear { dims } => Document::Cdc(multilinear_grid(dims).map_err(|e| bad(&e))?),
        Family::Unionjack { m, n } => Document::Triangulation(union_jack(*m, *n).map_err(|e| bad(&e))?),
        Family::K1 { m, n } => Document::Triangulation(k1(*m, *n).map_err(|e| bad(&e))?),
        Family::Random { m, n } => {
            Document::Triangulation(random_triangulation(*m, *n, seed(cli)?).map_err(|e| bad(&e))?)
        }
        Family::Partition { kind } => Document::Partition(match kind {
            PartitionKind::TJunction => t_junction(),
            PartitionKind::SquareRing => square_ring(),
            PartitionKind::TriangleRing => triangle_ring(),
            PartitionKind::Random => random_partition(seed(cli)?),
        }),
    };
    write_json(cli.out.as_deref(), &doc.to_json())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn analyze(input: &Path, max_rank: usize, dot: Option<&Path>) -> Result<()> {
    let doc = read_input(input)?;
    if let Document::Partition(p) = &doc {
        if let Err(violations) = validate_partition(p) {
            for v in &violations {
                println!("violation: {}", partition_violation(v));
            }
            return Err(Failure::Verification(format!("{} partition violations", violations.len())).into());
        }
    }
    let cdc = doc.to_cdc()?;
    let graph = cdc.conflict_graph();
    let h = cdc.minimal_infeasible_sets(max_rank.max(2)).map_err(|e| usage(e.to_string()))?;
    let rank = match h.truncated_at {
        Some(cap) => format!("> {cap}"),
        None => h.rank.to_string(),
    };
    let pairwise = h.truncated_at.is_none() && h.rank <= 2;
    println!("input: {}", doc.kind());
    println!("ground set: {}", cdc.len());
    println!("sets: {}", cdc.sets().len());
    println!("conflict edges: {}", graph.edge_count());
    println!("minimal infeasible sets: {}", h.edges.len());
    if let Ok(p) = cdc.pairwise_representability(40) {
        if let Some(w) = p.witness {
            println!("infeasible maximal independent set: {{{}}}", cdc.labels_of(&w).join(", "));
        }
    }
    if let Document::Partition(p) = &doc {
        match partition_rank(p) {
            Ok(r) => println!("partition rank <= 3: yes ({r})"),
            Err(GeometryError::TheoremViolation { at_least }) => println!("partition rank <= 3: no (>= {at_least})"),
            Err(e) => return Err(e.into()),
        }
    }
    println!("pairwise: {}, rank {rank}, log-lb {}", yes(pairwise), log_lower_bound(&cdc));
    if let Some(path) = dot {
        fs::write(path, graph.to_dot(cdc.labels())).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn triangulation_input(doc: &Document, method: &str) -> Result<GridTriangulation> {
    match doc {
        Document::Triangulation(t) => Ok(t.clone()),
        other => Err(usage(format!("--method {method} needs a triangulation, got a {}", other.kind()))),
    }
}

/// Checks that `cdc` has the conflict graph of `expected`, naming the family.
fn same_graph(graph: &ConflictGraph, expected: Option<Cdc>, family: &str) -> Result<()> {
    match expected {
        Some(e) if e.conflict_graph() == *graph => Ok(()),
        _ => Err(usage(format!("input is not a {family} instance"))),
    }
}

fn cover(cli: &Cli, input: &Path, method: Method, dims: &[usize]) -> Result<()> {
    let doc = read_input(input)?;
    let cdc = doc.to_cdc()?;
    let graph = cdc.conflict_graph();
    let n = cdc.len();
    if method == Method::Cnf {
        let scheme = cdc.cnf_ib_scheme(n.max(2))?;
        if n <= 20 && !scheme.represents(&cdc) {
            return Err(Failure::Verification("scheme does not represent the input".into()).into());
        }
        eprintln!("scheme: {} levels, {}-way", scheme.levels().len(), scheme.k());
        return write_json(cli.out.as_deref(), &scheme_to_json(&scheme));
    }
    if !cdc.k_way_representable(2)? {
        return Err(usage("input is not pairwise representable; use --method cnf"));
    }
    let max_set = cdc.sets().iter().map(|s| s.len()).max().unwrap_or(0);
    let cover: BicliqueCover = match method {
        Method::Stars => stars_cover(&graph),
        Method::Gray => {
            same_graph(&graph, sos2(n).ok(), "SOS2")?;
            sos2_gray_cover(n)?
        }
        Method::Multilinear => {
            if dims.is_empty() {
                return Err(usage("--method multilinear needs --dims"));
            }
            same_graph(&graph, multilinear_grid(dims).ok(), "multilinear grid")?;
            multilinear_cover(dims)?
        }
        Method::Sosk => {
            same_graph(&graph, sosk(n, max_set).ok(), "SOSk")?;
            sosk_cover(n, max_set)?
        }
        Method::SoskHalf => {
            same_graph(&graph, sosk(n, max_set).ok(), "SOSk")?;
            sosk_half_cover(n, max_set).map_err(|e| usage(e.to_string()))?
        }
        Method::Triangulation => triangulation_cover(&triangulation_input(&doc, "triangulation")?)?,
        Method::Chromatic => {
            let out = chromatic_triangulation_cover(&triangulation_input(&doc, "chromatic")?)?;
            match out.cover {
                Some(c) => c,
                None => {
                    for c in &out.classes {
                        eprintln!(
                            "class {:?}: {} conflicting diagonals, test {:?}",
                            c.class,
                            c.conflicts.len(),
                            c.test
                        );
                    }
                    return Err(Failure::Verification("no 2-colouring of the conflicting diagonals".into()).into());
                }
            }
        }
        Method::Exact => exact_cover(cli, &cdc, &graph)?,
        Method::Cnf => unreachable!("handled above"),
    };
    if let Err(v) = validate_cover(&graph, &cover) {
        let first = v.first().map(|v| cover_violation(v, cdc.labels())).unwrap_or_default();
        return Err(Failure::Verification(format!("constructed cover is invalid: {first}")).into());
    }
    eprintln!("depth: {} ({} levels)", cover.depth(), cover.levels.len());
    write_json(cli.out.as_deref(), &serde_json::to_value(cover.to_file())?)
}

fn exact_cover(cli: &Cli, cdc: &Cdc, graph: &ConflictGraph) -> Result<BicliqueCover> {
    let size_gate = |e: SearchError| -> anyhow::Error {
        match e {
            SearchError::SizeLimit { .. } => Failure::SizeGate(e.to_string()).into(),
            other => other.into(),
        }
    };
    let upper = cli.max_depth.unwrap_or(usize::MAX);
    let mut t = log_lower_bound(cdc);
    loop {
        if t > upper {
            return Err(Failure::Verification(format!("no cover of depth at most {upper}")).into());
        }
        let d = min_cover_decide_with_limit(graph, t, cli.exact_node_limit).map_err(size_gate)?;
        if let Some(c) = d.cover {
            return Ok(c);
        }
        t += 1;
    }
}

fn read_cover(path: &Path, cdc: &Cdc) -> Result<BicliqueCover> {
    match read_input(path)? {
        Document::Cover(c) if c.node_count == cdc.len() => Ok(c),
        Document::Cover(c) => Err(usage(format!("cover has {} nodes, input has {}", c.node_count, cdc.len()))),
        other => Err(usage(format!("{} is a {}, not a cover", path.display(), other.kind()))),
    }
}

fn build_model(
    cli: &Cli,
    cdc: &Cdc,
    f: Formulation,
    cover_path: Option<&Path>,
    depth: Option<usize>,
) -> Result<MipModel> {
    Ok(match f {
        Formulation::Jeroslow => jeroslow(cdc)?,
        Formulation::Encoded => encoded_extended(cdc, None)?,
        Formulation::Adhoc => adhoc_disaggregated(cdc)?,
        Formulation::Ideal => {
            let cover = match cover_path {
                Some(p) => read_cover(p, cdc)?,
                None if cdc.len() <= cli.exact_node_limit => exact_cover(cli, cdc, &cdc.conflict_graph())?,
                None => stars_cover(&cdc.conflict_graph()),
            };
            pairwise_ideal(cdc, &cover).map_err(|e| match e {
                FormulationError::NotPairwise | FormulationError::InvalidCover(_) => usage(e.to_string()),
                other => other.into(),
            })?
        }
        Formulation::Multiway => {
            let scheme = match cover_path {
                Some(p) => match read_input(p)? {
                    Document::Scheme(s) => s,
                    other => return Err(usage(format!("{} is a {}, not a scheme", p.display(), other.kind()))),
                },
                None => cdc.cnf_ib_scheme(cdc.len().max(2))?,
            };
            multiway_ib(&scheme, cdc.labels())?
        }
        Formulation::Covermip => {
            let t = depth.ok_or_else(|| usage("--formulation covermip needs --depth"))?;
            feasibility_mip(&cdc.conflict_graph(), t).map_err(|e| usage(e.to_string()))?.model
        }
    })
}

fn data_table(v: &Value) -> Result<BTreeMap<String, Vec<Rational>>> {
    let obj = v.as_object().ok_or_else(|| usage("data must map labels to value lists"))?;
    obj.iter()
        .map(|(label, vals)| {
            let list = vals.as_array().ok_or_else(|| usage(format!("data for {label} must be a list")))?;
            let parsed = list
                .iter()
                .map(|x| {
                    let text = match x {
                        Value::String(s) => s.clone(),
                        Value::Number(n) => n.to_string(),
                        _ => return Err(usage(format!("bad value for {label}"))),
                    };
                    parse_rational(&text).map_err(|e| usage(e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((label.clone(), parsed))
        })
        .collect()
}

fn embed(model: &MipModel, path: &Path) -> Result<MipModel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| usage(e.to_string()))?;
    let x = data_table(v.get("x").ok_or_else(|| usage("data needs an \"x\" table"))?)?;
    let y = v.get("y").map(data_table).transpose()?;
    embed_data(model, &x, y.as_ref()).map_err(|e| usage(e.to_string()))
}

fn verify_cover(input: &Path, cover_path: &Path) -> Result<()> {
    let cdc = read_input(input)?.to_cdc()?;
    let cover = read_cover(cover_path, &cdc)?;
    if let Err(violations) = validate_cover(&cdc.conflict_graph(), &cover) {
        for v in &violations {
            println!("violation: {}", cover_violation(v, cdc.labels()));
        }
        return Err(Failure::Verification(format!("{} cover violations", violations.len())).into());
    }
    println!("valid cover: depth {}", cover.depth());
    if !cdc.k_way_representable(2)? {
        return Err(
            Failure::Verification("input is not pairwise representable; the cover is a relaxation".into()).into()
        );
    }
    Ok(())
}

fn verify_model(cli: &Cli, input: &Path, f: Formulation, cover: Option<&Path>) -> Result<()> {
    if f == Formulation::Covermip {
        return Err(usage("covermip has no CDC to check against"));
    }
    let cdc = read_input(input)?.to_cdc()?;
    let model = build_model(cli, &cdc, f, cover, None)?;
    let mut failed = Vec::new();
    let mut gated = Vec::new();
    let jobs = cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()));
    match projection_check_with_jobs(&model, &cdc, jobs) {
        Ok(r) => match &r.counterexample {
            None => println!("projection: pass ({} supports up to size {})", r.supports_checked, r.max_support),
            Some(c) => {
                let verdict = if c.feasible_in_cdc { "feasible but cut off" } else { "infeasible but admitted" };
                println!("projection: fail, {{{}}} is {verdict}", c.labels.join(", "));
                failed.push("projection");
            }
        },
        Err(FormulationError::SizeLimit { .. }) => {
            println!("projection: skipped, more than {PROJECTION_NODE_LIMIT} ground elements");
            gated.push("projection");
        }
        Err(e) => return Err(e.into()),
    }
    match idealness_check(&model) {
        Ok(Idealness::Ideal { vertices }) => println!("ideal: yes ({vertices} vertices)"),
        Ok(Idealness::Fractional { vertex }) => {
            let shown: Vec<String> = vertex.iter().map(ToString::to_string).collect();
            println!("ideal: no, fractional vertex ({})", shown.join(", "));
            if f == Formulation::Ideal {
                failed.push("ideal");
            }
        }
        Err(FormulationError::SizeLimit { vars, limit }) => {
            println!("ideal: skipped, {vars} variables exceed {limit}");
            gated.push("ideal");
        }
        Err(e) => return Err(e.into()),
    }
    if f == Formulation::Ideal {
        match branching_report(&model) {
            Ok(r) => {
                println!("{r}");
                if !r.holds() {
                    failed.push("branching");
                }
            }
            Err(FormulationError::NotIbModel) => println!("branching: no levels"),
            Err(e) => return Err(e.into()),
        }
    }
    if !failed.is_empty() {
        return Err(Failure::Verification(format!("failed: {}", failed.join(", "))).into());
    }
    if !gated.is_empty() {
        let hint = format!("size gate (ideal limit {IDEALNESS_VAR_LIMIT} variables)");
        return Err(Failure::SizeGate(format!("skipped {}: {hint}", gated.join(", "))).into());
    }
    Ok(())
}

fn partition_violation(v: &PartitionViolation) -> String {
    match v {
        PartitionViolation::TooFewVertices { polygon } => format!("polygon {polygon} has fewer than 3 vertices"),
        PartitionViolation::RepeatedVertex { polygon } => format!("polygon {polygon} repeats a vertex"),
        PartitionViolation::NonConvex { polygon } => {
            format!("polygon {polygon} is not strictly convex in counter-clockwise order")
        }
        PartitionViolation::Overlap { first, second } => format!("polygons {first} and {second} overlap"),
        PartitionViolation::InternalVertex { vertex, polygon } => {
            format!("vertex {vertex} lies on polygon {polygon} without being one of its vertices")
        }
    }
}

fn cover_violation(v: &CoverViolation, labels: &[String]) -> String {
    let name = |i: &usize| labels.get(*i).cloned().unwrap_or_else(|| format!("#{i}"));
    match v {
        CoverViolation::NodeCountMismatch { graph, cover } => format!("cover has {cover} nodes, graph has {graph}"),
        CoverViolation::IndexOutOfRange { level, index } => format!("level {level} names node #{index}"),
        CoverViolation::Overlap { level, nodes } => {
            let names: Vec<String> = nodes.iter().map(name).collect();
            format!("level {level} puts {{{}}} on both sides", names.join(", "))
        }
        CoverViolation::NonEdge { level, u, v } => {
            format!("level {level} separates {} and {}, which do not conflict", name(u), name(v))
        }
        CoverViolation::Uncovered { u, v } => format!("conflict {} - {} is not covered", name(u), name(v)),
    }
}
