//! `wonderful`: analysis and renormalization of Feynman graph files from the command line.
//!
//! Artifacts (JSON, DOT, CSV) go to `--out` or stdout; the human summary goes to stderr.
//! Exit codes: 0 pass, 1 statistical failure, 2 usage or precondition error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wonderful::analysis::{analyze, Building, HomologyReport};
use wonderful::charts::{default_chart, Chart};
use wonderful::renorm::fixed::{pullback, renormalize_with, Scheme};
use wonderful::renorm::{
    locality_check, locality_numeric, ms_cutoff_change, period, remainder_bump, rg_check, BumpSpec, McParams, McRun,
};
use wonderful::report::{chart_id, hasse_dot, to_json, trace_csv, EstimateRecord};
use wonderful::{parse_graph, EdgeSet, Graph, SubgraphPoset};

const DEFAULT_SEED: u64 = 1;
const DEFAULT_SAMPLES: u64 = 1_000_000;
const DEFAULT_BATCHES: u64 = 64;

#[derive(Parser)]
#[command(name = "wonderful", version, about = "Divergent lattices, wonderful-model charts and renormalization of Feynman graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Divergent lattice, property checks, irreducibles, nested sets, Betti tables and charts.
    Analyze(Common),
    /// Nested-set complex of the chosen building set.
    Nested(Common),
    /// Betti tables of the arrangement complement by both methods.
    Homology(Common),
    /// Period of a primitive graph.
    Period(Common),
    /// Renormalized pairing in the chart of a maximal nested set.
    Renorm {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        chart: ChartArgs,
        /// ν radius for every nested member (fixed scheme).
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Cutoff in every marked coordinate (ms scheme).
        #[arg(long, default_value_t = 1.0)]
        cutoff: f64,
        /// Regularization parameter.
        #[arg(long, default_value_t = 1.0)]
        s: f64,
    },
    /// Change of renormalization conditions: fixed radii r1 → r2, or ms cutoffs r1 → r2.
    Rgcheck {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        chart: ChartArgs,
        #[arg(long, default_value_t = 0.8)]
        r1: f64,
        #[arg(long, default_value_t = 1.2)]
        r2: f64,
    },
    /// Locality for two disjoint divergent subgraphs.
    Locality {
        #[command(flatten)]
        common: Common,
        /// Edge indices of the first subgraph, e.g. "0,1".
        #[arg(long)]
        g: Option<String>,
        /// Edge indices of the second subgraph.
        #[arg(long)]
        h: Option<String>,
        /// Also check the factorization numerically.
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = 1.0)]
        r1: f64,
        #[arg(long, default_value_t = 0.7)]
        r2: f64,
    },
}

#[derive(Args)]
struct Common {
    /// Graph file.
    input: PathBuf,
    /// Override the spacetime dimension declared in the file.
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long, value_enum, default_value_t = BuildingArg::Minimal)]
    building: BuildingArg,
    #[arg(long, value_enum, default_value_t = SchemeArg::Fixed)]
    scheme: SchemeArg,
    /// Monte Carlo sample count; accepts forms like 1e7.
    #[arg(long, value_parser = parse_count, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    #[arg(long, value_parser = parse_count, default_value_t = DEFAULT_BATCHES)]
    batches: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output path; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct ChartArgs {
    /// Radius of the bump test function centred at the origin.
    #[arg(long, default_value_t = 1.0)]
    psi_radius: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildingArg {
    Minimal,
    Maximal,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SchemeArg {
    Ms,
    Fixed,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Csv,
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return if v >= 1 { Ok(v) } else { Err("must be at least 1".into()) };
    }
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if !(v >= 1.0 && v.fract() == 0.0 && v <= u64::MAX as f64) {
        return Err(format!("`{s}` is not a positive integer"));
    }
    Ok(v as u64)
}

enum Failure {
    Usage(String),
    Statistical(String),
}

type Outcome = Result<(), Failure>;

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

impl Common {
    fn graph(&self) -> Result<Graph, Failure> {
        let text = std::fs::read_to_string(&self.input).map_err(|e| usage(format!("{}: {e}", self.input.display())))?;
        let g = parse_graph(&text).map_err(|e| usage(format!("{}: {e}", self.input.display())))?;
        Ok(match self.dim {
            Some(d) if d == 0 => return Err(usage("--dim must be positive")),
            Some(d) => g.with_dim(d),
            None => g,
        })
    }

    fn building(&self) -> Building {
        match self.building {
            BuildingArg::Minimal => Building::Minimal,
            BuildingArg::Maximal => Building::Maximal,
        }
    }

    fn mc(&self) -> Result<McParams, Failure> {
        if self.batches > self.samples {
            return Err(usage("--batches must not exceed --samples"));
        }
        Ok(McParams::new(self.samples, self.seed).with_batches(self.batches))
    }

    fn formats(&self, allowed: &[Format]) -> Outcome {
        if allowed.contains(&self.format) {
            Ok(())
        } else {
            Err(usage("output format not available for this command"))
        }
    }

    fn emit(&self, text: &str) -> Outcome {
        match &self.out {
            Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn stem(&self) -> String {
        self.input.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string()
    }
}

fn input_name(p: &Path) -> String {
    p.file_name().and_then(|s| s.to_str()).unwrap_or_default().to_string()
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    command: &'static str,
    input: String,
    #[serde(flatten)]
    body: T,
}

fn emit_json<T: Serialize>(c: &Common, command: &'static str, body: T) -> Outcome {
    c.emit(&to_json(&Envelope { command, input: input_name(&c.input), body }))
}

fn run_analyze(c: &Common) -> Outcome {
    c.formats(&[Format::Json, Format::Dot])?;
    let g = c.graph()?;
    let a = analyze(&g, c.building()).map_err(usage)?;
    eprintln!(
        "{}: {} divergent lattice elements, {} irreducibles, pole order {}",
        input_name(&c.input),
        a.lattice_elements(),
        a.irreducibles.len(),
        a.max_nested_cardinality
    );
    match c.format {
        Format::Dot => {
            let lattice = SubgraphPoset::divergent_lattice(&g).map_err(usage)?;
            c.emit(&hasse_dot(&lattice, &c.stem()))
        }
        _ => emit_json(c, "analyze", a),
    }
}

#[derive(Serialize)]
struct NestedReport {
    building_set: Vec<EdgeSet>,
    nested_sets: Vec<Vec<EdgeSet>>,
    max_nested_cardinality: usize,
    maximal_nested_sizes: Vec<usize>,
}

fn run_nested(c: &Common) -> Outcome {
    c.formats(&[Format::Json])?;
    let g = c.graph()?;
    let lattice = SubgraphPoset::divergent_lattice(&g).map_err(usage)?;
    let b = c.building().of(&lattice);
    let r = NestedReport {
        building_set: b.members.clone(),
        nested_sets: b.nested_sets(),
        max_nested_cardinality: b.max_nested_cardinality(),
        maximal_nested_sizes: b.maximal_nested_sizes().into_iter().collect(),
    };
    eprintln!("{} nested sets, maximal cardinality {}", r.nested_sets.len(), r.max_nested_cardinality);
    emit_json(c, "nested", r)
}

fn run_homology(c: &Common) -> Outcome {
    c.formats(&[Format::Json])?;
    let g = c.graph()?;
    let lattice = SubgraphPoset::divergent_lattice(&g).map_err(usage)?;
    let h = HomologyReport::new(&lattice);
    eprintln!("ranks {:?}; methods agree: {}", h.from_atoms, h.agree);
    let agree = h.agree;
    emit_json(c, "homology", h)?;
    if agree {
        Ok(())
    } else {
        Err(Failure::Statistical("Betti tables differ between methods".into()))
    }
}

fn emit_run(c: &Common, command: &'static str, run: &McRun, record: EstimateRecord) -> Outcome {
    eprintln!("{} ± {}", record.value, record.stderr);
    match c.format {
        Format::Csv => c.emit(&trace_csv(&run.trace)),
        _ => emit_json(c, command, record),
    }
}

fn run_period(c: &Common) -> Outcome {
    c.formats(&[Format::Json, Format::Csv])?;
    let g = c.graph()?;
    let run = period(&g, &c.mc()?).map_err(usage)?;
    let chart = default_chart(&g, &[g.all()]).map_err(usage)?;
    let record = EstimateRecord::new(&run.estimate, &chart, "period", BTreeMap::new());
    emit_run(c, "period", &run, record)
}

/// Chart of the first maximal nested set of largest cardinality.
fn top_chart(c: &Common, g: &Graph) -> Result<Chart, Failure> {
    let lattice = SubgraphPoset::divergent_lattice(g).map_err(usage)?;
    let b = c.building().of(&lattice);
    let k = b.max_nested_cardinality();
    let nested = b.maximal_nested_sets().into_iter().find(|n| n.len() == k).ok_or_else(|| usage("no divergent subgraphs"))?;
    default_chart(g, &nested).map_err(usage)
}

fn run_renorm(c: &Common, ch: &ChartArgs, radius: f64, cutoff: f64, s: f64) -> Outcome {
    c.formats(&[Format::Json, Format::Csv])?;
    let g = c.graph()?;
    let chart = top_chart(c, &g)?;
    let psi = BumpSpec::test(ch.psi_radius);
    psi.validate().map_err(usage)?;
    let scheme = match c.scheme {
        SchemeArg::Fixed => Scheme::Fixed(vec![radius; chart.nested.len()]),
        SchemeArg::Ms => Scheme::Ms(cutoff),
    };
    let run = renormalize_with(&chart, &scheme, &pullback(&chart, &psi), s, &c.mc()?, 0).map_err(usage)?;
    let params = BTreeMap::from([("s".to_string(), s), ("psi_radius".to_string(), ch.psi_radius)]);
    let record = EstimateRecord::with_scheme(&run.estimate, &chart, &scheme, params);
    emit_run(c, "renorm", &run, record)
}

#[derive(Serialize)]
struct RgOutput<T: Serialize> {
    #[serde(rename = "chart-id")]
    chart_id: String,
    scheme: &'static str,
    seed: u64,
    samples: u64,
    psi_radius: f64,
    report: T,
}

fn run_rgcheck(c: &Common, ch: &ChartArgs, r1: f64, r2: f64) -> Outcome {
    c.formats(&[Format::Json])?;
    let g = c.graph()?;
    let chart = top_chart(c, &g)?;
    let psi = BumpSpec::test(ch.psi_radius);
    let mc = c.mc()?;
    let wrap = |scheme, report| RgOutput {
        chart_id: chart_id(&chart),
        scheme,
        seed: c.seed,
        samples: c.samples,
        psi_radius: ch.psi_radius,
        report,
    };
    let (pass, lhs, rhs, sigmas) = match c.scheme {
        SchemeArg::Fixed => {
            let n = chart.nested.len();
            let r = rg_check(&chart, &vec![r1; n], &vec![r2; n], &psi, &mc).map_err(usage)?;
            let out = (r.pass, r.lhs.clone(), r.rhs.clone(), r.sigmas);
            emit_json(c, "rgcheck", wrap("fixed", serde_json::to_value(&r).expect("serializable")))?;
            out
        }
        SchemeArg::Ms => {
            let r = ms_cutoff_change(&chart, r1, r2, &psi, &mc).map_err(usage)?;
            let out = (r.pass, r.lhs.clone(), r.rhs.clone(), r.sigmas);
            emit_json(c, "rgcheck", wrap("ms", serde_json::to_value(&r).expect("serializable")))?;
            out
        }
    };
    let verdict = if pass { "pass" } else { "FAIL" };
    eprintln!(
        "lhs {} ± {}, rhs {} ± {}, {:.2} sigma: {verdict}",
        lhs.value, lhs.stderr, rhs.value, rhs.stderr, sigmas
    );
    if pass {
        Ok(())
    } else {
        Err(Failure::Statistical(format!("sides differ by {sigmas:.2} sigma")))
    }
}

fn parse_edges(s: &str, g: &Graph) -> Result<EdgeSet, Failure> {
    let mut out = EdgeSet::EMPTY;
    for tok in s.trim_matches(|c| c == '{' || c == '}').split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let e: usize = tok.parse().map_err(|_| usage(format!("bad edge index `{tok}`")))?;
        if e >= g.n_edges() {
            return Err(usage(format!("edge {e} out of range")));
        }
        out = out.union(EdgeSet::single(e));
    }
    Ok(out)
}

/// First two vertex-disjoint connected members of the minimal building set other than G.
fn default_pair(g: &Graph) -> Result<(EdgeSet, EdgeSet), Failure> {
    let lattice = SubgraphPoset::divergent_lattice(g).map_err(usage)?;
    let members: Vec<EdgeSet> =
        lattice.minimal_building_set().members.into_iter().filter(|&m| m != g.all() && g.n_components(m) == 1).collect();
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            if g.touched(a) & g.touched(b) == 0 {
                return Ok((a, b));
            }
        }
    }
    Err(usage("no pair of disjoint divergent subgraphs; pass --g and --h"))
}

#[derive(Serialize)]
struct LocalityOutput {
    combinatorial: wonderful::renorm::LocalityReport,
    numeric: Option<wonderful::renorm::NumericLocality>,
    seed: u64,
    samples: u64,
    radii: [f64; 2],
}

fn run_locality(c: &Common, g_arg: &Option<String>, h_arg: &Option<String>, numeric: bool, radii: [f64; 2]) -> Outcome {
    c.formats(&[Format::Json])?;
    let graph = c.graph()?;
    let (g, h) = match (g_arg, h_arg) {
        (Some(a), Some(b)) => (parse_edges(a, &graph)?, parse_edges(b, &graph)?),
        (None, None) => default_pair(&graph)?,
        _ => return Err(usage("pass both --g and --h or neither")),
    };
    let comb = locality_check(&graph, g, h).map_err(usage)?;
    let num = if numeric {
        let psi = remainder_bump(&graph, g, h, 0.9, 3.0).map_err(usage)?;
        Some(locality_numeric(&graph, g, h, radii, &psi, &c.mc()?).map_err(usage)?)
    } else {
        None
    };
    eprintln!("g = {g}, h = {h}: combinatorial split {}", if comb.pass { "pass" } else { "FAIL" });
    if let Some(n) = &num {
        eprintln!("numeric: {} ± {} vs {} ± {} ({:.2} sigma)", n.lhs.value, n.lhs.stderr, n.rhs.value, n.rhs.stderr, n.sigmas);
    }
    let pass = comb.pass && num.as_ref().is_none_or(|n| n.pass);
    emit_json(c, "locality", LocalityOutput { combinatorial: comb, numeric: num, seed: c.seed, samples: c.samples, radii })?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Statistical("locality check failed".into()))
    }
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Analyze(c) => run_analyze(c),
        Command::Nested(c) => run_nested(c),
        Command::Homology(c) => run_homology(c),
        Command::Period(c) => run_period(c),
        Command::Renorm { common, chart, radius, cutoff, s } => run_renorm(common, chart, *radius, *cutoff, *s),
        Command::Rgcheck { common, chart, r1, r2 } => run_rgcheck(common, chart, *r1, *r2),
        Command::Locality { common, g, h, numeric, r1, r2 } => run_locality(common, g, h, *numeric, [*r1, *r2]),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Statistical(m)) => {
            eprintln!("fail: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

