use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polarcl::bitset::BitSet;
use polarcl::clsets::gq::Gq;
use polarcl::clsets::{ClContext, ConstructionSpec, Domain, GeneratorSet, SpaceType};
use polarcl::combinatorics::{self, EigenvalueTable, SchemeParameters};
use polarcl::enumeration::{GeneratorClass, PolarSpaceInstance};
use polarcl::geometry::PolarSpaceDescriptor;
use polarcl::io::{self, SpaceFile};
use polarcl::scheme::SchemeContext;
use polarcl::search::{self, SearchResult};
use polarcl::suite::{self, SpaceCache, SuiteOptions};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "polarcl", version, about = "Cameron-Liebler sets of generators in finite classical polar spaces")]
struct Cli {
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parameters of a polar space, or its canonical enumeration
    Space {
        #[command(subcommand)]
        action: SpaceAction,
    },
    /// Association scheme checks
    Scheme {
        #[command(subcommand)]
        action: SchemeAction,
    },
    /// Write a standard Cameron-Liebler set as a set file
    Construct(ConstructArgs),
    /// Run every characterisation test on a generator set
    Check(CheckArgs),
    /// Exhaustive searches
    Search {
        #[command(subcommand)]
        target: SearchTarget,
    },
    /// Run the acceptance battery
    Suite(SuiteArgs),
}

#[derive(Args, Clone)]
struct SpaceArgs {
    /// space.json file or a symbol such as "Q+(7,2)"
    #[arg(long)]
    space: Option<String>,
    /// Q+, Q, Q-, W or H
    #[arg(long, allow_hyphen_values = true)]
    family: Option<String>,
    #[arg(long)]
    rank: Option<usize>,
    /// Field order (for H the square order, e.g. 4)
    #[arg(long)]
    q: Option<u32>,
    /// Projective dimension of the ambient space (selects H(2d-1) or H(2d))
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args)]
struct OutArgs {
    /// Write the JSON artifact here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SpaceAction {
    Info {
        #[command(flatten)]
        space: SpaceArgs,
        /// Print JSON instead of the text view
        #[arg(long)]
        json: bool,
    },
    Enumerate {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Subcommand)]
enum SchemeAction {
    Verify {
        #[command(flatten)]
        space: SpaceArgs,
        /// Sample size for the intersection-number check (default: all pairs)
        #[arg(long)]
        sample: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Latin,
    Greek,
}

impl From<ClassArg> for GeneratorClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Latin => GeneratorClass::Latin,
            ClassArg::Greek => GeneratorClass::Greek,
        }
    }
}

fn domain_of(class: Option<ClassArg>) -> Domain {
    class.map_or(Domain::Full, |c| Domain::Class(c.into()))
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionKind {
    Pencil,
    HyperbolicClass,
    Embedded,
    BasePlane,
    BaseSolid,
    MixedClass,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(value_enum)]
    kind: ConstructionKind,
    /// Vertex of a pencil
    #[arg(long, default_value_t = 0)]
    point: usize,
    /// Index of a hyperbolic class or embedded section
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Base generator of a base-plane or base-solid set
    #[arg(long, default_value_t = 0)]
    generator: usize,
    /// Restrict a pencil to one class of generators
    #[arg(long, value_enum)]
    class: Option<ClassArg>,
    /// Write the complement instead
    #[arg(long)]
    complement: bool,
    /// Write the set file here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Set file with `idx:` lines or subspace rows
    #[arg(long)]
    set: PathBuf,
    /// Spread list (JSON) for the spread statement
    #[arg(long)]
    spreads: Option<PathBuf>,
    /// Treat the set as a subset of one class (overrides the file)
    #[arg(long, value_enum)]
    class: Option<ClassArg>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SearchCommon {
    #[command(flatten)]
    space: SpaceArgs,
    /// Node budget (default: POLARCL_BUDGET_NODES or 500M)
    #[arg(long)]
    budget: Option<u64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Subcommand)]
enum SearchTarget {
    /// All spreads
    Spread {
        #[command(flatten)]
        common: SearchCommon,
        #[arg(long, value_enum)]
        class: Option<ClassArg>,
    },
    /// m-regular systems, optionally inside a sum of eigenspaces
    Regular {
        #[command(flatten)]
        common: SearchCommon,
        #[arg(long)]
        m: usize,
        /// Eigenspace indices, e.g. "0,2"
        #[arg(long, value_delimiter = ',')]
        eigenspaces: Option<Vec<usize>>,
        #[arg(long, value_enum)]
        class: Option<ClassArg>,
        /// Stop after this many solutions
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Tight sets of points of a generalized quadrangle
    Tight {
        #[command(flatten)]
        common: SearchCommon,
        #[arg(long)]
        xmax: usize,
        /// Use the dual quadrangle (generators as points)
        #[arg(long)]
        dual: bool,
    },
    /// Cameron-Liebler sets with parameter 1..=xmax
    Cl {
        #[command(flatten)]
        common: SearchCommon,
        #[arg(long, default_value_t = 1)]
        xmax: u64,
        #[arg(long, value_enum)]
        class: Option<ClassArg>,
        /// Leave out the per-distance counts used for pruning
        #[arg(long)]
        no_implied: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    /// Full battery (corpus of 500 sets per space)
    Desk,
    /// Smaller corpus, for smoke runs
    Quick,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, value_enum, default_value_t = Level::Desk)]
    level: Level,
    #[arg(long)]
    seed: Option<u64>,
    /// Run only these criteria, e.g. "1,4,9"
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<u8>>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Serialize)]
struct RunManifest {
    command_line: String,
    descriptor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    version: &'static str,
    seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    complete: Option<bool>,
}

impl RunManifest {
    fn new(desc: Option<&PolarSpaceDescriptor>, start: Instant) -> Self {
        RunManifest {
            command_line: std::env::args().collect::<Vec<_>>().join(" "),
            descriptor: desc.map(|d| d.to_string()),
            seed: None,
            version: env!("CARGO_PKG_VERSION"),
            seconds: start.elapsed().as_secs_f64(),
            complete: None,
        }
    }
}

#[derive(Serialize)]
struct Artifact<T: Serialize> {
    manifest: RunManifest,
    #[serde(flatten)]
    body: T,
}

fn emit<T: Serialize>(out: &OutArgs, manifest: RunManifest, body: T) -> Result<()> {
    let text = serde_json::to_string_pretty(&Artifact { manifest, body })? + "\n";
    write_or_print(out.out.as_deref(), &text)
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Errors that are the caller's fault map to exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

/// Loaded space: the descriptor and, for file input, the checked instance.
struct Loaded {
    desc: PolarSpaceDescriptor,
    inst: Option<PolarSpaceInstance>,
}

impl SpaceArgs {
    fn load(&self) -> Result<Loaded> {
        if let Some(s) = &self.space {
            if self.family.is_some() || self.rank.is_some() || self.q.is_some() {
                return Err(usage("--space cannot be combined with --family/--rank/--q"));
            }
            let path = Path::new(s);
            if path.exists() {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {s}"))?;
                let file: SpaceFile = serde_json::from_str(&text).map_err(|e| usage(format!("{s}: {e}")))?;
                let inst = file.instantiate().map_err(|e| usage(e.to_string()))?;
                return Ok(Loaded { desc: inst.descriptor().clone(), inst: Some(inst) });
            }
            let desc = PolarSpaceDescriptor::parse_symbol(s)
                .map_err(|e| usage(format!("'{s}' is neither a file nor a space symbol: {e}")))?;
            return Ok(Loaded { desc, inst: None });
        }
        let (Some(f), Some(r), Some(q)) = (&self.family, self.rank, self.q) else {
            return Err(usage("give --space, or all of --family, --rank and --q"));
        };
        let desc = PolarSpaceDescriptor::from_cli(f, r, q, self.dim).map_err(|e| usage(e.to_string()))?;
        Ok(Loaded { desc, inst: None })
    }

    fn context(&self) -> Result<ClContext> {
        let l = self.load()?;
        let inst = match l.inst {
            Some(i) => i,
            None => PolarSpaceInstance::enumerate(&l.desc)?,
        };
        Ok(ClContext::new(Arc::new(SchemeContext::new(Arc::new(inst))?)))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let is_usage = e.downcast_ref::<Usage>().is_some()
                || matches!(
                    e.downcast_ref::<polarcl::error::Error>(),
                    Some(polarcl::error::Error::InvalidInput(_) | polarcl::error::Error::InvalidSpace(_))
                );
            ExitCode::from(if is_usage { 2 } else { 1 })
        }
    }
}

/// Returns whether every verification passed.
fn run(cmd: Command) -> Result<bool> {
    let start = Instant::now();
    match cmd {
        Command::Space { action: SpaceAction::Info { space, json } } => space_info(&space.load()?.desc, json),
        Command::Space { action: SpaceAction::Enumerate { space, out } } => {
            let l = space.load()?;
            let inst = match l.inst {
                Some(i) => i,
                None => PolarSpaceInstance::enumerate(&l.desc)?,
            };
            let file = SpaceFile::from_instance(&inst);
            eprintln!("{}: {} points, {} generators", file.symbol, file.num_points, file.num_generators);
            emit(&out, RunManifest::new(Some(&l.desc), start), file)?;
            Ok(true)
        }
        Command::Scheme { action: SchemeAction::Verify { space, sample, out } } => scheme_verify(&space, sample, &out, start),
        Command::Construct(a) => construct(a),
        Command::Check(a) => check(a, start),
        Command::Search { target } => search_cmd(target, start),
        Command::Suite(a) => run_suite(a, start),
    }
}

#[derive(Serialize)]
struct SpaceInfo {
    symbol: String,
    family: String,
    rank: usize,
    q: u64,
    ambient_dim: usize,
    e: String,
    space_type: String,
    subspace_counts: Vec<String>,
    pencil_size: String,
    spread_size: String,
    disjoint_coefficient: String,
    b: Vec<String>,
    c: Vec<String>,
    valencies: Vec<String>,
    /// eigenvalues[j][i]: eigenvalue of the distance-i relation on V_j
    eigenvalues: Vec<Vec<String>>,
    cl_eigenspaces: Vec<usize>,
}

fn strings(v: &[num_bigint::BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn space_info(desc: &PolarSpaceDescriptor, json: bool) -> Result<bool> {
    let d = desc.rank();
    let params = SchemeParameters::new(desc);
    let table = EigenvalueTable::new(desc)?;
    let info = SpaceInfo {
        symbol: desc.to_string(),
        family: desc.family().symbol().to_string(),
        rank: d,
        q: desc.q(),
        ambient_dim: desc.ambient_dim(),
        e: desc.e_string(),
        space_type: SpaceType::of(desc).to_string(),
        subspace_counts: (0..d).map(|k| combinatorics::subspace_count(desc, k).to_string()).collect(),
        pencil_size: combinatorics::pencil_size(desc).to_string(),
        spread_size: combinatorics::spread_size(desc).to_string(),
        disjoint_coefficient: combinatorics::disjoint_coefficient(desc).to_string(),
        b: strings(&params.b),
        c: strings(&params.c),
        valencies: strings(&params.k),
        eigenvalues: (0..=d).map(|j| (0..=d).map(|i| table.get(j, i).to_string()).collect()).collect(),
        cl_eigenspaces: combinatorics::cl_eigenspace_indices(desc),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&info)?);
        return Ok(true);
    }
    println!("{}  rank {d}, e = {}, type {}", info.symbol, info.e, info.space_type);
    let names = ["points", "lines", "planes", "solids"];
    for (k, n) in info.subspace_counts.iter().enumerate() {
        let name = names.get(k).map_or_else(|| format!("{k}-spaces"), |s| s.to_string());
        let tag = if k + 1 == d { " (generators)" } else { "" };
        println!("  {n:>10} {name}{tag}");
    }
    println!("  pencil {}, spread {}, disjointness coefficient {}", info.pencil_size, info.spread_size, info.disjoint_coefficient);
    println!("  b = [{}]  c = [{}]", info.b.join(", "), info.c.join(", "));
    println!("  P table (row j = eigenspace V_j, column i = distance i):");
    let width = info.eigenvalues.iter().flatten().map(|s| s.len()).max().unwrap_or(1);
    for (j, row) in info.eigenvalues.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
        println!("    V{j}: {}", cells.join(" "));
    }
    println!("  Cameron-Liebler eigenspaces: {:?}", info.cl_eigenspaces);
    Ok(true)
}

#[derive(Serialize)]
struct SchemeReport {
    distance_regular: bool,
    b: Vec<String>,
    c: Vec<String>,
    regularity_violation: Option<String>,
    intersection_numbers: bool,
    intersection_violation: Option<String>,
    spectrum_dims: Vec<usize>,
    spectrum_vectors_checked: usize,
    spectrum_failures: Vec<String>,
    passed: bool,
}

fn scheme_verify(space: &SpaceArgs, sample: Option<usize>, out: &OutArgs, start: Instant) -> Result<bool> {
    let ctx = space.context()?;
    let sc = ctx.scheme();
    let reg = sc.verify_distance_regularity();
    let inter = sc.verify_intersection_numbers(sample);
    let spec = sc.verify_spectrum()?;
    let (b, c) = match &reg {
        Ok(p) => (strings(&p.b), strings(&p.c)),
        Err(_) => (Vec::new(), Vec::new()),
    };
    let passed = reg.is_ok() && inter.is_ok() && spec.passed();
    let report = SchemeReport {
        distance_regular: reg.is_ok(),
        b,
        c,
        regularity_violation: reg.err().map(|v| v.to_string()),
        intersection_numbers: inter.is_ok(),
        intersection_violation: inter.err().map(|v| format!("{v:?}")),
        spectrum_dims: spec.dims.clone(),
        spectrum_vectors_checked: spec.vectors_checked,
        spectrum_failures: spec.failures.clone(),
        passed,
    };
    eprintln!(
        "{}: distance-regular {}, intersection numbers {}, spectrum {} ({} vectors)",
        ctx.descriptor(),
        report.distance_regular,
        report.intersection_numbers,
        spec.passed(),
        spec.vectors_checked
    );
    emit(out, RunManifest::new(Some(ctx.descriptor()), start), report)?;
    Ok(passed)
}

fn construct(a: ConstructArgs) -> Result<bool> {
    let ctx = a.space.context()?;
    let spec = match a.kind {
        ConstructionKind::Pencil => ConstructionSpec::PointPencil { point: a.point, domain: domain_of(a.class) },
        ConstructionKind::HyperbolicClass => ConstructionSpec::HyperbolicClass { index: a.index },
        ConstructionKind::Embedded => ConstructionSpec::EmbeddedPolarSpace { index: a.index },
        ConstructionKind::BasePlane => ConstructionSpec::BasePlane { generator: a.generator },
        ConstructionKind::BaseSolid => ConstructionSpec::BaseSolid { generator: a.generator },
        ConstructionKind::MixedClass => {
            let k = suite::mixed_class_set(&ctx).map_err(|e| usage(e.to_string()))?;
            return write_construction(&ctx, k, a.complement, a.out.as_deref());
        }
    };
    let k = ctx.construct(&spec).map_err(|e| usage(e.to_string()))?;
    write_construction(&ctx, k, a.complement, a.out.as_deref())
}

fn write_construction(ctx: &ClContext, k: polarcl::clsets::Construction, complement: bool, out: Option<&Path>) -> Result<bool> {
    let k = if complement {
        ctx.construct(&ConstructionSpec::Complement { of: k.set })?
    } else {
        k
    };
    let class = match k.set.domain() {
        Domain::Full => None,
        Domain::Class(c) => Some(c),
    };
    eprintln!("{} on {} ({}): {} generators, x = {}", k.kind, ctx.descriptor(), k.set.domain(), k.set.len(), k.predicted_x);
    write_or_print(out, &io::write_set_file(k.set.members(), class))?;
    Ok(true)
}

fn check(a: CheckArgs, start: Instant) -> Result<bool> {
    let ctx = a.space.context()?;
    let inst = ctx.scheme().instance();
    let text = std::fs::read_to_string(&a.set).with_context(|| format!("reading {}", a.set.display()))?;
    let file = io::parse_set_file(&text, inst).map_err(|e| usage(format!("{}: {e}", a.set.display())))?;
    let class = a.class.map(GeneratorClass::from).or(file.class);
    let domain = class.map_or(Domain::Full, Domain::Class);
    if domain != Domain::Full && !ctx.has_class_domain() {
        return Err(usage(format!("{} has no generator classes to restrict to", ctx.descriptor())));
    }
    let set = GeneratorSet::from_indices(ctx.num_generators(), file.members, domain);
    if let Domain::Class(c) = domain {
        if set.members().iter().any(|g| ctx.class_of(g) != Some(c)) {
            return Err(usage(format!("the set has generators outside the {domain}")));
        }
    }
    let spreads = match &a.spreads {
        Some(p) => {
            let t = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            io::parse_spreads(&t, ctx.num_generators()).map_err(|e| usage(e.to_string()))?
        }
        None => Vec::new(),
    };
    let report = ctx.check(&set, &spreads)?;
    eprintln!(
        "{}: {} generators, x = {}, Cameron-Liebler {}, verdicts consistent {}",
        ctx.descriptor(),
        report.size,
        report.x,
        report.is_cameron_liebler,
        report.consistent
    );
    let ok = report.consistent;
    emit(&a.out, RunManifest::new(Some(ctx.descriptor()), start), report)?;
    Ok(ok)
}

#[derive(Serialize)]
struct SearchOut<L: Serialize> {
    target: String,
    domain: String,
    runs: Vec<SearchRun<L>>,
}

#[derive(Serialize)]
struct SearchRun<L: Serialize> {
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<u64>,
    complete: bool,
    nodes: u64,
    seconds: f64,
    count: usize,
    solutions: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    labels: Vec<L>,
}

fn run_of<L: Serialize>(x: Option<u64>, r: SearchResult, labels: Vec<L>) -> SearchRun<L> {
    SearchRun {
        x,
        complete: r.complete,
        nodes: r.nodes,
        seconds: r.seconds,
        count: r.solutions.len(),
        solutions: r.solutions.iter().map(BitSet::to_vec).collect(),
        labels,
    }
}

fn emit_search<L: Serialize>(common: &SearchCommon, desc: &PolarSpaceDescriptor, start: Instant, body: SearchOut<L>) -> Result<bool> {
    let complete = body.runs.iter().all(|r| r.complete);
    for r in &body.runs {
        let x = r.x.map_or(String::new(), |x| format!(" x = {x}:"));
        eprintln!(
            "{} on {desc}:{x} {} solutions, {} nodes{}",
            body.target,
            r.count,
            r.nodes,
            if r.complete { "" } else { " (incomplete)" }
        );
    }
    let mut m = RunManifest::new(Some(desc), start);
    m.complete = Some(complete);
    emit(&common.out, m, body)?;
    Ok(true)
}

fn search_cmd(target: SearchTarget, start: Instant) -> Result<bool> {
    match target {
        SearchTarget::Spread { common, class } => {
            let ctx = common.space.context()?;
            let domain = class_domain(&ctx, class)?;
            let r = search::find_spreads(&ctx, domain, budget(&common))?;
            let body = SearchOut::<()> { target: "spread".into(), domain: domain.to_string(), runs: vec![run_of(None, r, vec![])] };
            emit_search(&common, ctx.descriptor(), start, body)
        }
        SearchTarget::Regular { common, m, eigenspaces, class, limit } => {
            let ctx = common.space.context()?;
            let domain = class_domain(&ctx, class)?;
            let r = search::find_regular_systems(&ctx, domain, m, eigenspaces.as_deref(), budget(&common), limit)?;
            let target = match &eigenspaces {
                Some(s) => format!("{m}-regular system in V{s:?}"),
                None => format!("{m}-regular system"),
            };
            let body = SearchOut::<()> { target, domain: domain.to_string(), runs: vec![run_of(None, r, vec![])] };
            emit_search(&common, ctx.descriptor(), start, body)
        }
        SearchTarget::Tight { common, xmax, dual } => {
            let ctx = common.space.context()?;
            let gq = Gq::from_instance(ctx.scheme().instance()).map_err(|e| usage(e.to_string()))?;
            let gq = if dual { gq.dual() } else { gq };
            let mut runs = Vec::new();
            for x in 1..=xmax {
                let c = search::find_tight_sets(&gq, x, budget(&common))?;
                runs.push(run_of(Some(x as u64), c.result, c.labels));
            }
            let (s, t) = gq.order();
            let domain = if dual { "points of the dual quadrangle" } else { "points" };
            let body = SearchOut { target: format!("tight set of GQ({s},{t})"), domain: domain.into(), runs };
            emit_search(&common, ctx.descriptor(), start, body)
        }
        SearchTarget::Cl { common, xmax, class, no_implied } => {
            let ctx = common.space.context()?;
            let domain = class_domain(&ctx, class)?;
            let mut runs = Vec::new();
            for x in 1..=xmax {
                let c = search::find_cl_sets(&ctx, domain, x, !no_implied, budget(&common))?;
                runs.push(run_of(Some(x), c.result, c.labels));
            }
            let body = SearchOut { target: "Cameron-Liebler set".into(), domain: domain.to_string(), runs };
            emit_search(&common, ctx.descriptor(), start, body)
        }
    }
}

fn budget(c: &SearchCommon) -> u64 {
    c.budget.unwrap_or_else(search::node_budget)
}

fn class_domain(ctx: &ClContext, class: Option<ClassArg>) -> Result<Domain> {
    let d = domain_of(class);
    if d != Domain::Full && !ctx.has_class_domain() {
        return Err(usage(format!("{} has no generator classes to restrict to", ctx.descriptor())));
    }
    Ok(d)
}

#[derive(Serialize)]
struct SuiteOut {
    options: SuiteOptions,
    passed: bool,
    criteria: Vec<suite::CriterionOutcome>,
}

fn run_suite(a: SuiteArgs, start: Instant) -> Result<bool> {
    let mut opts = SuiteOptions::default();
    if let Some(s) = a.seed {
        opts.seed = s;
    }
    if let Level::Quick = a.level {
        opts.corpus_size = 100;
    }
    let ids: Vec<u8> = a.only.unwrap_or_else(|| (1..=12).collect());
    if let Some(bad) = ids.iter().find(|&&i| !(1..=12).contains(&i)) {
        bail!(usage(format!("no criterion {bad}")));
    }
    let cache = SpaceCache::new();
    let mut outcomes = Vec::new();
    println!("{:>3}  {:<6} {:>8}  criterion", "id", "result", "seconds");
    for id in ids {
        let o = suite::run_criterion(id, &opts, &cache);
        println!("{:>3}  {:<6} {:>8.2}  {}", o.id, if o.passed { "PASS" } else { "FAIL" }, o.seconds, o.title);
        if !o.passed {
            for d in &o.details {
                println!("            {d}");
            }
        }
        outcomes.push(o);
    }
    let passed = outcomes.iter().all(|o| o.passed);
    println!("{} of {} criteria passed", outcomes.iter().filter(|o| o.passed).count(), outcomes.len());
    if a.out.out.is_some() {
        let mut m = RunManifest::new(None, start);
        m.seed = Some(opts.seed);
        emit(&a.out, m, SuiteOut { options: opts, passed, criteria: outcomes })?;
    }
    Ok(passed)
}
