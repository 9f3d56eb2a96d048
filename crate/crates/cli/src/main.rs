//! `epm`: command-line front end for packing and covering rooted minor-models.

use clap::{Args, Parser, Subcommand, ValueEnum};
use ep_core::counterexample::{figure1_instance, negative_family, verify_negative};
use ep_core::engine::{ep_pipeline, EngineConfig, Kappa};
use ep_core::enumerate::connected_graphs;
use ep_core::graph::InstanceJson;
use ep_core::linkage::{
    linkage_or_separation, validate_linkage, validate_linkage_separation, LinkageOutcome,
};
use ep_core::minor_model::{find_hzl_model, find_pure_model, pattern_preset};
use ep_core::pack_cover::{check_duality, covering_number, packing_number, Status};
use ep_core::rooted_grid::{rooted_grid_or_separation, GridModel, RootedGridOutcome};
use ep_core::treewidth::{
    bounded_tw_pack_or_hit, exact_treewidth, min_degree_decomposition, validate_td,
    TreeDecomposition,
};
use ep_core::{grid_graph, Budget, EpError, Graph, RootedGraph, VSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "epm",
    version,
    about = "Packing and covering of minor-models meeting prescribed vertex sets"
)]
struct Cli {
    /// Read the instance from this file instead of stdin.
    #[arg(long, global = true)]
    input: Option<String>,
    /// Step cap for every exhaustive search.
    #[arg(long, global = true, default_value_t = ep_core::error::DEFAULT_BUDGET)]
    budget: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Search for a single object.
    #[command(subcommand)]
    Find(FindCmd),
    /// Maximum number of disjoint models.
    Pack(PatternArgs),
    /// Minimum deletion set.
    Cover(PatternArgs),
    /// Check `ν ≥ k` or `τ ≤ bound(k)` on one instance or a sweep.
    DualityCheck(DualityArgs),
    /// Tree decompositions.
    #[command(subcommand)]
    Td(TdCmd),
    /// Run the full case analysis with oracle certification.
    Pipeline(PipelineArgs),
    /// Check the negative family for given parameters.
    VerifyNegative(NegativeArgs),
    /// Export an instance.
    #[command(subcommand)]
    Export(ExportCmd),
}

#[derive(Subcommand)]
enum GenCmd {
    /// The `g x h` grid; `--z-blocks m` splits the first row into m members.
    Grid {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        h: usize,
        #[arg(long, default_value_t = 0)]
        z_blocks: usize,
    },
    /// n x n grid with first column, first row and last column (minus corners) as Z.
    Figure1 {
        #[arg(long)]
        n: usize,
    },
    /// Disjoint grids with first-row members defeating every small deletion set.
    Negative(NegativeArgs),
    /// Random graph `G(n, p)` with `m` random members of size at most 3.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.4)]
        p: f64,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum FindCmd {
    /// An `(H, Z, ℓ)`-model.
    Model(PatternArgs),
    /// A pure `(H, Z, ℓ)`-model.
    Pure(PatternArgs),
    /// `kℓ` disjoint paths from Z to `--y` or a small separation.
    Linkage {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        /// Comma-separated target vertices.
        #[arg(long, value_delimiter = ',')]
        y: Vec<usize>,
    },
    /// A rooted grid model of order `--g` from the instance's grid tag.
    RootedGrid {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        permissive: bool,
    },
}

#[derive(Subcommand)]
enum TdCmd {
    /// Validate the decomposition in `--td` against the instance.
    Validate {
        #[arg(long)]
        td: String,
    },
    /// Bounded-treewidth packing or deletion.
    PackOrHit {
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long)]
        k: usize,
        /// Decomposition file; an exact or greedy one is computed otherwise.
        #[arg(long)]
        td: Option<String>,
    },
}

#[derive(Subcommand)]
enum ExportCmd {
    /// Graphviz DOT with Z members as labels.
    Dot,
}

#[derive(Args, Clone)]
struct PatternArgs {
    /// Preset name (K1, K2, P3, C4, 2K1, ...) or inline JSON `{"n":..,"edges":..}`.
    #[arg(long)]
    h: String,
    #[arg(long)]
    l: usize,
    #[arg(long)]
    pure: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    /// `2k − 2`.
    Mader,
    /// No bound: report ν and τ only.
    None,
}

#[derive(Args)]
struct DualityArgs {
    #[command(flatten)]
    pattern: PatternArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "mader")]
    bound: BoundKind,
    /// Sweep every connected graph with at most this many vertices.
    #[arg(long)]
    exhaustive: Option<usize>,
    /// Sweep this many random graphs instead.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 9)]
    max_n: usize,
    /// Random Z families drawn per swept graph.
    #[arg(long, default_value_t = 1)]
    families: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    pattern: PatternArgs,
    #[arg(long)]
    k: usize,
    /// Use the instance's grid tag as the grid model.
    #[arg(long)]
    grid: bool,
    /// Subgrid side `14h` instead of `--block`.
    #[arg(long)]
    full_constants: bool,
    #[arg(long, default_value_t = 1)]
    block: usize,
    /// Emit the branch trace as JSON lines on stderr.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct NegativeArgs {
    #[arg(long, default_value = "K1")]
    h: String,
    #[arg(long)]
    l: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    x: usize,
}

/// Failure modes mapped to exit codes.
enum Fail {
    Usage(String),
    Undecided(String),
}

impl From<EpError> for Fail {
    fn from(e: EpError) -> Self {
        if e.is_undecided() {
            Fail::Undecided(e.to_string())
        } else {
            Fail::Usage(e.to_string())
        }
    }
}

type Res = Result<u8, Fail>;

fn emit<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string(value).expect("output serialises")
    );
}

fn read_instance(path: &Option<String>) -> Result<(RootedGraph, InstanceJson), Fail> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text = std::fs::read_to_string(p).map_err(|e| Fail::Usage(format!("{p}: {e}")))?
        }
        None => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Fail::Usage(e.to_string()))?;
        }
    }
    let json: InstanceJson =
        serde_json::from_str(&text).map_err(|e| Fail::Usage(format!("instance JSON: {e}")))?;
    Ok((json.to_rooted()?, json))
}

fn parse_pattern(spec: &str) -> Result<Graph, Fail> {
    if let Some(g) = pattern_preset(spec) {
        return Ok(g);
    }
    let json: InstanceJson =
        serde_json::from_str(spec).map_err(|_| Fail::Usage(format!("unknown pattern {spec:?}")))?;
    Ok(json.to_rooted()?.graph)
}

fn read_td(path: &str) -> Result<TreeDecomposition, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Fail::Usage(format!("decomposition JSON: {e}")))
}

fn grid_model_of(json: &InstanceJson, rg: &RootedGraph) -> Result<GridModel, Fail> {
    let [r, c] = json
        .grid
        .ok_or_else(|| Fail::Usage("the instance carries no grid tag".into()))?;
    if r != c {
        return Err(Fail::Usage("the grid tag must be square".into()));
    }
    let gg = grid_graph(r, c)?;
    let m = GridModel::identity(&gg);
    m.validate(&rg.graph)
        .map_err(|e| Fail::Usage(format!("grid tag does not match the graph: {e}")))?;
    Ok(m)
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, p: f64, m: usize) -> RootedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let g = Graph::from_edges(n, &edges).expect("pairs are simple");
    let z = random_family(rng, n, m);
    RootedGraph::new(g, z).expect("members are in range")
}

fn random_family(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<VSet> {
    (0..m)
        .map(|_| {
            let size = rng.gen_range(1..=3.min(n));
            (0..size).map(|_| rng.gen_range(0..n)).collect()
        })
        .collect()
}

fn status_code(s: Status) -> u8 {
    s.exit_code() as u8
}

fn run(cli: Cli) -> Res {
    let budget = Budget::new(cli.budget);
    match cli.cmd {
        Cmd::Gen(g) => gen(g),
        Cmd::Find(f) => find(f, &cli.input, budget),
        Cmd::Pack(p) => {
            let (rg, _) = read_instance(&cli.input)?;
            let h = parse_pattern(&p.h)?;
            emit(&packing_number(&rg, &h, p.l, p.pure, budget)?);
            Ok(0)
        }
        Cmd::Cover(p) => {
            let (rg, _) = read_instance(&cli.input)?;
            let h = parse_pattern(&p.h)?;
            emit(&covering_number(&rg, &h, p.l, p.pure, budget)?);
            Ok(0)
        }
        Cmd::DualityCheck(d) => duality(d, &cli.input, budget),
        Cmd::Td(t) => td(t, &cli.input, budget),
        Cmd::Pipeline(p) => pipeline(p, &cli.input, cli.budget),
        Cmd::VerifyNegative(a) => {
            let h = parse_pattern(&a.h)?;
            let inst = negative_family(&h, a.l, a.n, a.x)?;
            let report = verify_negative(&inst, &h, a.x, budget)?;
            emit(&report);
            Ok(if report.holds() { 0 } else { 2 })
        }
        Cmd::Export(ExportCmd::Dot) => {
            let (rg, json) = read_instance(&cli.input)?;
            print!("{}", to_dot(&rg, json.grid));
            Ok(0)
        }
    }
}

fn gen(cmd: GenCmd) -> Res {
    let json = match cmd {
        GenCmd::Grid { g, h, z_blocks } => {
            let gg = grid_graph(g, h)?;
            let z: Vec<VSet> = match h.checked_div(z_blocks) {
                None => vec![],
                Some(w) => {
                    let width = w.max(1);
                    (0..z_blocks)
                        .map(|b| {
                            (b * width + 1..=((b + 1) * width).min(h))
                                .map(|c| gg.id(1, c))
                                .collect()
                        })
                        .collect()
                }
            };
            InstanceJson::from_rooted(&RootedGraph::new(gg.graph, z)?, Some([g, h]))
        }
        GenCmd::Figure1 { n } => {
            let rg = figure1_instance(n)?;
            InstanceJson::from_rooted(&rg, Some([n, n]))
        }
        GenCmd::Negative(a) => {
            let h = parse_pattern(&a.h)?;
            negative_family(&h, a.l, a.n, a.x)?.to_json()
        }
        GenCmd::Random { n, p, m, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            InstanceJson::from_rooted(&random_instance(&mut rng, n, p.clamp(0.0, 1.0), m), None)
        }
    };
    println!("{}", json.to_canonical_string());
    Ok(0)
}

fn find(cmd: FindCmd, input: &Option<String>, budget: Budget) -> Res {
    let (rg, json) = read_instance(input)?;
    match cmd {
        FindCmd::Model(p) => {
            let h = parse_pattern(&p.h)?;
            emit(&find_hzl_model(&rg, &h, p.l, budget)?);
        }
        FindCmd::Pure(p) => {
            let h = parse_pattern(&p.h)?;
            emit(&find_pure_model(&rg, &h, p.l, budget)?);
        }
        FindCmd::Linkage { k, l, y } => {
            let y: VSet = y.iter().collect();
            let out = linkage_or_separation(&rg, &y, k, l);
            let valid = match &out {
                LinkageOutcome::Linkage(lk) => validate_linkage(&rg, &y, k, k * l, lk),
                LinkageOutcome::Separation(s) => {
                    validate_linkage_separation(&rg, &y, k, l, s).map(|_| ())
                }
            };
            emit(&out);
            if let Err(e) = valid {
                eprintln!("validator: {e}");
                return Ok(2);
            }
        }
        FindCmd::RootedGrid {
            g,
            k,
            l,
            permissive,
        } => {
            let m = grid_model_of(&json, &rg)?;
            let out: RootedGridOutcome = rooted_grid_or_separation(&rg, &m, g, k, l, permissive)?;
            emit(&out);
        }
    }
    Ok(0)
}

fn duality(d: DualityArgs, input: &Option<String>, budget: Budget) -> Res {
    let h = parse_pattern(&d.pattern.h)?;
    let bound = |k: usize| match d.bound {
        BoundKind::Mader => 2 * k - 2,
        BoundKind::None => usize::MAX,
    };
    let check = |rg: &RootedGraph| {
        check_duality(
            rg,
            &h,
            d.pattern.l,
            d.k,
            &bound,
            d.pattern.pure,
            budget.clone(),
        )
    };
    if d.exhaustive.is_none() && d.random.is_none() {
        let (rg, _) = read_instance(input)?;
        let report = check(&rg);
        emit(&report);
        return Ok(status_code(report.status));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(d.seed);
    let mut instances: Vec<RootedGraph> = Vec::new();
    if let Some(max) = d.exhaustive {
        for n in 1..=max.min(7) {
            for g in connected_graphs(n) {
                for _ in 0..d.families {
                    let m = rng.gen_range(1..=4);
                    instances.push(RootedGraph::new(g.clone(), random_family(&mut rng, n, m))?);
                }
            }
        }
    }
    if let Some(count) = d.random {
        for _ in 0..count {
            let n = rng.gen_range(1..=d.max_n.max(1));
            let m = rng.gen_range(1..=4);
            let p = rng.gen_range(0.2..0.7);
            instances.push(random_instance(&mut rng, n, p, m));
        }
    }
    #[derive(Serialize)]
    struct Sweep {
        instances: usize,
        violations: usize,
        undecided: usize,
        first_violation: Option<InstanceJson>,
    }
    let mut sweep = Sweep {
        instances: instances.len(),
        violations: 0,
        undecided: 0,
        first_violation: None,
    };
    for rg in &instances {
        match check(rg).status {
            Status::Ok => {}
            Status::Violation => {
                sweep.violations += 1;
                sweep.first_violation.get_or_insert_with(|| rg.to_json());
            }
            Status::Undecided => sweep.undecided += 1,
        }
    }
    emit(&sweep);
    Ok(if sweep.violations > 0 {
        2
    } else if sweep.undecided > 0 {
        3
    } else {
        0
    })
}

fn td(cmd: TdCmd, input: &Option<String>, budget: Budget) -> Res {
    let (rg, _) = read_instance(input)?;
    match cmd {
        TdCmd::Validate { td } => {
            let td = read_td(&td)?;
            match validate_td(&rg.graph, &td) {
                Ok(w) => {
                    emit(&serde_json::json!({ "valid": true, "width": w }));
                    Ok(0)
                }
                Err(e) => {
                    emit(&serde_json::json!({ "valid": false, "violation": e.to_string() }));
                    Ok(2)
                }
            }
        }
        TdCmd::PackOrHit { pattern, k, td } => {
            let h = parse_pattern(&pattern.h)?;
            let td = match td {
                Some(p) => read_td(&p)?,
                None if rg.graph.vertex_count() <= 16 => exact_treewidth(&rg.graph)?.1,
                None => min_degree_decomposition(&rg.graph),
            };
            emit(&bounded_tw_pack_or_hit(
                &rg,
                &h,
                pattern.l,
                k,
                &td,
                pattern.pure,
                budget,
            )?);
            Ok(0)
        }
    }
}

fn pipeline(p: PipelineArgs, input: &Option<String>, budget: u64) -> Res {
    let (rg, json) = read_instance(input)?;
    let h = parse_pattern(&p.pattern.h)?;
    let grid = if p.grid {
        Some(grid_model_of(&json, &rg)?)
    } else {
        None
    };
    let cfg = EngineConfig {
        use_paper_constants: p.full_constants,
        kappa: Kappa::Identity,
        block: p.block,
        budget,
        ..Default::default()
    };
    let report = ep_pipeline(
        &rg,
        &h,
        p.pattern.l,
        p.k,
        &cfg,
        p.pattern.pure,
        grid.as_ref(),
        None,
    )?;
    if p.trace {
        for e in &report.trace {
            eprintln!("{}", serde_json::to_string(e).expect("trace serialises"));
        }
    }
    emit(&report);
    Ok(status_code(report.report.status))
}

fn to_dot(rg: &RootedGraph, grid: Option<[usize; 2]>) -> String {
    let mut out = String::from("graph G {\n");
    for v in rg.graph.vertices().iter() {
        let members: Vec<String> = rg
            .hit_positions(&VSet::singleton(v))
            .iter()
            .map(|i| format!("Z{i}"))
            .collect();
        let mut attrs = Vec::new();
        if !members.is_empty() {
            attrs.push(format!("label=\"{v}\\n{}\"", members.join(",")));
            attrs.push("style=filled".into());
        }
        if let Some([_, cols]) = grid {
            attrs.push(format!("pos=\"{},{}!\"", v % cols, -((v / cols) as i64)));
        }
        if attrs.is_empty() {
            out.push_str(&format!("  {v};\n"));
        } else {
            out.push_str(&format!("  {v} [{}];\n", attrs.join(", ")));
        }
    }
    for (u, v) in rg.graph.edges() {
        out.push_str(&format!("  {u} -- {v};\n"));
    }
    out.push_str("}\n");
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Undecided(m)) => {
            eprintln!("undecided: {m}");
            ExitCode::from(3)
        }
    }
}
