use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ultrasmall::experiment::{self, ReportFormat};
use ultrasmall::structure::{CmExplorer, PamExplorer};
use ultrasmall::{
    asymptotic_constants, census_mkc_cm, census_mkc_pam, cm_distance_bound, cm_growth_sequence,
    cm_mk_first_moment, cm_mk_second_moment_bound, diameter, distance_to_core, extract_core_cm,
    extract_core_pam, generate_cm, generate_pam, i_k, pam_path_weight, quantile_sequence,
    sample_iid_powerlaw, AsymptoticConstants, CoreSet, DegreeSequence, DiameterMethod,
    DoublingParams, ExperimentConfig, GrowthSequences, ModelKind, ModelParams, MultiGraph,
    PamGraph, PamParams, PowerLawSpec,
};

#[derive(Parser)]
#[command(name = "ultrasmall", version, about = "Ultra-small distances in scale-free random graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a configuration-model multigraph as an edge list.
    GenCm(GenCm),
    /// Make the total degree of a degree file even by bumping the last entry.
    FixParity {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a preferential attachment graph as `w j xi` triples.
    GenPam {
        #[arg(long)]
        m: u32,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long)]
        t: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diameter of the largest component.
    Diameter(DiameterArgs),
    /// Structural analyses: minimally-k-connected census, explorations,
    /// distances to the core.
    Analyze(AnalyzeArgs),
    /// Evaluate closed-form quantities and bounds.
    Bounds {
        #[arg(long, value_enum)]
        which: Which,
        /// JSON object, or `@path` to read it from a file.
        #[arg(long)]
        params: String,
    },
    /// Run a replicated experiment from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Also write aggregate.dat for gnuplot.
        #[arg(long)]
        gnuplot: bool,
    },
}

#[derive(Args)]
struct GenCm {
    #[arg(long, required_unless_present = "degrees")]
    tau: Option<f64>,
    #[arg(long, required_unless_present = "degrees")]
    dmin: Option<u32>,
    #[arg(long, required_unless_present = "degrees")]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Read degrees (one per line) instead of building them from the power law.
    #[arg(long, conflicts_with_all = ["tau", "dmin", "n", "iid"])]
    degrees: Option<PathBuf>,
    /// Sample i.i.d. degrees rather than using the deterministic quantile sequence.
    #[arg(long)]
    iid: bool,
    /// Bump the last degree when the total is odd instead of failing.
    #[arg(long)]
    fix_parity: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GraphInput {
    #[arg(long = "in")]
    input: PathBuf,
    /// Treat the input as preferential attachment triples. Inferred from a
    /// `# pam` header when absent.
    #[arg(long)]
    pam: bool,
    /// delta for triple files without a header.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
}

#[derive(Args)]
struct DiameterArgs {
    #[command(flatten)]
    graph: GraphInput,
    #[arg(long)]
    threads: Option<usize>,
    /// All-sources BFS (the default).
    #[arg(long, conflicts_with = "ifub")]
    exact: bool,
    /// Iterative fringe upper bound.
    #[arg(long)]
    ifub: bool,
    /// Seed recorded in the output row.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Mkc,
    Explore,
    CoreDist,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    graph: GraphInput,
    #[arg(long, value_enum)]
    what: What,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 2.2)]
    sigma: f64,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Degree exponent of a configuration-model input; needed for the core.
    #[arg(long)]
    tau: Option<f64>,
    /// Emit a per-vertex CSV instead of a JSON summary.
    #[arg(long)]
    per_vertex: bool,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Mk1,
    Mk2,
    Pathbound,
    Pathweight,
    #[value(name = "appA")]
    AppA,
    Constants,
}

enum Loaded {
    Cm(MultiGraph),
    Pam(PamGraph),
}

impl Loaded {
    fn view(&self) -> std::borrow::Cow<'_, MultiGraph> {
        match self {
            Loaded::Cm(g) => std::borrow::Cow::Borrowed(g),
            Loaded::Pam(g) => std::borrow::Cow::Owned(g.undirected_view()),
        }
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::GenCm(a) => gen_cm(a),
        Cmd::FixParity { input, out } => {
            let seq = DegreeSequence::read_from(open(&input)?)?;
            seq.fix_parity().write_to(create(out.as_deref())?)?;
            Ok(())
        }
        Cmd::GenPam { m, delta, t, seed, out } => {
            let g = generate_pam(PamParams::new(m, delta)?, t, seed)?;
            let mut w = create(out.as_deref())?;
            g.write_triples(&mut w)?;
            w.flush()?;
            Ok(())
        }
        Cmd::Diameter(a) => {
            init_threads(a.threads)?;
            let g = load(&a.graph)?;
            let method = if a.ifub { DiameterMethod::Ifub } else { DiameterMethod::AllSources };
            let view = g.view();
            let d = diameter(&view, method)?;
            println!("n,seed,diam,lcc_fraction");
            println!("{},{},{},{}", view.n(), a.seed, d.diam, d.component_fraction);
            Ok(())
        }
        Cmd::Analyze(a) => analyze(a),
        Cmd::Bounds { which, params } => {
            let text = match params.strip_prefix('@') {
                Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
                None => params,
            };
            let input: Value = serde_json::from_str(&text).context("parsing --params")?;
            let result = bounds(which, &input)?;
            let name = which.to_possible_value().expect("no skipped variants").get_name().to_owned();
            println!("{}", serde_json::to_string_pretty(&json!({ "which": name, "input": input, "result": result }))?);
            Ok(())
        }
        Cmd::Experiment { config, out, threads, gnuplot } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = ExperimentConfig::from_json(&text)?;
            let result = experiment::run(&cfg, threads)?;
            experiment::report(&result, ReportFormat::Csv, &out)?;
            experiment::report(&result, ReportFormat::Json, &out)?;
            if gnuplot {
                experiment::report(&result, ReportFormat::Gnuplot, &out)?;
            }
            experiment::write_timings(&result, &out)?;
            let failures: usize = result.aggregates.iter().map(|a| a.failures).sum();
            eprintln!(
                "{} rows, {} failed, {:.1}s of replica time, written to {}",
                result.rows.len(),
                failures,
                result.elapsed.iter().sum::<f64>(),
                out.display()
            );
            Ok(())
        }
    }
}

fn gen_cm(a: GenCm) -> Result<()> {
    let seq = match &a.degrees {
        Some(path) => DegreeSequence::read_from(open(path)?)?,
        None => {
            let spec = PowerLawSpec {
                tau: a.tau.expect("required by clap"),
                d_min: a.dmin.expect("required by clap"),
                n: a.n.expect("required by clap"),
            };
            if a.iid {
                sample_iid_powerlaw(spec, a.seed)?
            } else {
                quantile_sequence(spec)?
            }
        }
    };
    let seq = if a.fix_parity { seq.fix_parity() } else { seq };
    let g = generate_cm(&seq, a.seed)?;
    let mut w = create(a.out.as_deref())?;
    g.write_edge_list(&mut w)?;
    w.flush()?;
    Ok(())
}

fn analyze(a: AnalyzeArgs) -> Result<()> {
    init_threads(a.threads)?;
    let g = load(&a.graph)?;
    let out = io::stdout().lock();
    match a.what {
        What::Mkc => {
            let census = match &g {
                Loaded::Cm(g) => census_mkc_cm(g, a.k)?,
                Loaded::Pam(g) => census_mkc_pam(g, a.k)?,
            };
            if a.per_vertex {
                let mut w = csv_writer(out);
                w.write_record(["vertex"])?;
                for v in &census.members {
                    w.write_record([(v + 1).to_string()])?;
                }
                w.flush()?;
            } else {
                let n = g.view().n();
                emit(json!({
                    "n": n,
                    "k": census.k,
                    "i_k": census.i_k,
                    "count": census.count,
                    "fraction": census.count as f64 / n as f64,
                }))?;
            }
        }
        What::Explore => {
            let core = core_for(&g, &a)?;
            let n = g.view().n() as u32;
            let explorations: Vec<_> = match &g {
                Loaded::Cm(g) => {
                    let mut ex = CmExplorer::new(g);
                    (0..n).map(|v| ex.explore(v, a.k, core.as_ref())).collect::<ultrasmall::Result<_>>()?
                }
                Loaded::Pam(g) => {
                    let mut ex = PamExplorer::new(g);
                    (1..=n).map(|v| ex.explore(v, a.k, core.as_ref())).collect::<ultrasmall::Result<_>>()?
                }
            };
            let offset = matches!(g, Loaded::Cm(_)) as u32;
            if a.per_vertex {
                let mut w = csv_writer(out);
                w.write_record(["vertex", "boundary", "collisions", "collisions_before_core", "hit_core_level"])?;
                for e in &explorations {
                    w.write_record([
                        (e.root + offset).to_string(),
                        e.boundary().len().to_string(),
                        e.collisions.len().to_string(),
                        e.collisions_before_core.to_string(),
                        e.hit_core.map(|l| l.to_string()).unwrap_or_default(),
                    ])?;
                }
                w.flush()?;
            } else {
                let total = explorations.len().max(1) as f64;
                let multi = explorations.iter().filter(|e| e.collisions.len() >= 2).count();
                let collisions: usize = explorations.iter().map(|e| e.collisions.len()).sum();
                let hit = explorations.iter().filter(|e| e.hit_core.is_some()).count();
                emit(json!({
                    "n": n,
                    "k": a.k,
                    "core_size": core.as_ref().map(|c| c.len()),
                    "frac_multi_collision": multi as f64 / total,
                    "mean_collisions": collisions as f64 / total,
                    "frac_hit_core": hit as f64 / total,
                }))?;
            }
        }
        What::CoreDist => {
            let core = core_for(&g, &a)?.context("core distances on a configuration-model input need --tau")?;
            let view = g.view();
            let dist = distance_to_core(&view, &core)?;
            if a.per_vertex {
                let mut w = csv_writer(out);
                w.write_record(["vertex", "distance"])?;
                for (v, &d) in dist.distances.iter().enumerate() {
                    let d = if d == u32::MAX { String::new() } else { d.to_string() };
                    w.write_record([(v + 1).to_string(), d])?;
                }
                w.flush()?;
            } else {
                let params = match &g {
                    Loaded::Cm(m) => ModelParams::Cm { tau: a.tau.expect("core implies tau"), d_min: min_degree(m) },
                    Loaded::Pam(p) => ModelParams::Pam { m: p.m(), delta: p.params().delta },
                };
                let n = view.n() as u64;
                let dp = DoublingParams::default_for(a.sigma);
                let h = AsymptoticConstants::h(n, dp.b(), dp.c()).max(0);
                // CM with d_min = 2 has no forward growth and hence no reference radius.
                let reference = asymptotic_constants(&params)
                    .ok()
                    .map(|c| (c.k_plus(n, a.eps).max(0) + c.c_dist as i64 * h) as u32);
                emit(json!({
                    "n": n,
                    "sigma": a.sigma,
                    "core_size": core.len(),
                    "threshold": core.threshold,
                    "max": dist.max,
                    "unreachable": dist.unreachable,
                    "reference": reference,
                    "fraction_within_reference": reference.map(|r| dist.fraction_within(r)),
                }))?;
            }
        }
    }
    Ok(())
}

fn core_for(g: &Loaded, a: &AnalyzeArgs) -> Result<Option<CoreSet>> {
    Ok(match g {
        Loaded::Cm(m) => match a.tau {
            Some(tau) => Some(extract_core_cm(m, tau, a.sigma)?),
            None => None,
        },
        Loaded::Pam(p) => Some(extract_core_pam(p, a.sigma)?),
    })
}

fn min_degree(g: &MultiGraph) -> u32 {
    (0..g.n() as u32).map(|v| g.degree(v)).min().unwrap_or(0)
}

fn bounds(which: Which, p: &Value) -> Result<Value> {
    Ok(match which {
        Which::Mk1 | Which::Mk2 => {
            let seq = degrees_from(p)?;
            let k = get_u64(p, "k")? as u32;
            let d = seq.d_min().context("empty degree sequence")?;
            let ik = i_k(ModelKind::Cm, d, k)?;
            let value = if matches!(which, Which::Mk1) {
                cm_mk_first_moment(&seq, k)?
            } else {
                cm_mk_second_moment_bound(&seq, k)?
            };
            json!({ "n": seq.n(), "ell": seq.ell(), "d_min": d, "n_dmin": seq.count(d), "i_k": ik, "value": value })
        }
        Which::Pathbound => {
            let seq = degrees_from(p)?;
            let tau = get_f64(p, "tau")?;
            let eta = p.get("eta").and_then(Value::as_f64).unwrap_or(0.05);
            let k_bar = get_u64(p, "k_bar")? as u32;
            let d_a = get_u64(p, "d_a")? as u32;
            let d_b = get_u64(p, "d_b")? as u32;
            let g = cm_growth_sequence(seq.n() as u64, tau, eta, 2 * k_bar as usize + 1)?;
            json!({ "g": g, "value": cm_distance_bound(&seq, d_a, d_b, k_bar, &g)? })
        }
        Which::Pathweight => {
            let path: Vec<u32> = serde_json::from_value(p.get("path").cloned().context("missing `path`")?)?;
            let m = get_u64(p, "m")? as u32;
            let delta = get_f64(p, "delta")?;
            let c = p.get("c").and_then(Value::as_f64).unwrap_or(1.0);
            let gamma = PamParams::new(m, delta)?.gamma();
            json!({ "gamma": gamma, "value": pam_path_weight(&path, c, m, gamma)? })
        }
        Which::AppA => {
            let t = get_u64(p, "t")?;
            let r = get_f64(p, "r")?;
            let gamma = get_f64(p, "gamma")?;
            let k_max = get_u64(p, "k_max")? as u32;
            let seq = GrowthSequences::new(t, r, gamma, k_max)?;
            let mut out = json!({
                "R": seq.r,
                "c": seq.c,
                "g": seq.g,
                "alpha": seq.alpha.iter().map(|a| if a.is_finite() { json!(a) } else { Value::Null }).collect::<Vec<_>>(),
                "beta": seq.beta.iter().map(|b| if b.is_finite() { json!(b) } else { Value::Null }).collect::<Vec<_>>(),
                "eta": seq.eta(),
                "eta_recursion_constant": seq.eta_recursion_constant(),
                "degenerate": seq.degenerate,
            });
            if p.get("check").and_then(Value::as_bool).unwrap_or(false) {
                let tol = p.get("rel_tol").and_then(Value::as_f64).unwrap_or(1e-9);
                let v = seq.bound_violations(tol)?;
                out["violations"] = json!(v.len());
                out["first_violations"] = json!(v.iter().take(10).collect::<Vec<_>>());
            }
            out
        }
        Which::Constants => {
            let params: ModelParams = serde_json::from_value(p.get("params").cloned().unwrap_or_else(|| p.clone()))
                .context("expected a model description such as {\"model\":\"cm\",\"tau\":2.5,\"d_min\":2}")?;
            params.validate()?;
            let consts = asymptotic_constants(&params)?;
            let mut out = serde_json::to_value(consts)?;
            if let Some(n) = p.get("n").and_then(Value::as_u64) {
                let eps = p.get("eps").and_then(Value::as_f64).unwrap_or(0.1);
                let sigma = p.get("sigma").and_then(Value::as_f64).unwrap_or(2.2);
                let dp = DoublingParams::default_for(sigma);
                out["loglog_n"] = json!((n as f64).ln().ln());
                out["k_minus"] = json!(consts.k_minus(n, eps));
                out["k_plus"] = json!(consts.k_plus(n, eps));
                out["k_bar"] = json!(consts.k_bar(n, eps));
                out["h"] = json!(AsymptoticConstants::h(n, dp.b(), dp.c()));
            }
            out
        }
    })
}

/// Degrees from `degrees` (inline array), `degrees_file`, or the quantile
/// sequence for `tau`, `d_min`, `n`.
fn degrees_from(p: &Value) -> Result<DegreeSequence> {
    if let Some(d) = p.get("degrees") {
        return Ok(DegreeSequence::new(serde_json::from_value(d.clone())?)?);
    }
    if let Some(path) = p.get("degrees_file").and_then(Value::as_str) {
        return Ok(DegreeSequence::read_from(open(Path::new(path))?)?);
    }
    let spec = PowerLawSpec {
        tau: get_f64(p, "tau")?,
        d_min: get_u64(p, "d_min")? as u32,
        n: get_u64(p, "n")? as usize,
    };
    Ok(quantile_sequence(spec)?)
}

fn get_u64(p: &Value, key: &str) -> Result<u64> {
    p.get(key).and_then(Value::as_u64).with_context(|| format!("missing or non-integer `{key}`"))
}

fn get_f64(p: &Value, key: &str) -> Result<f64> {
    p.get(key).and_then(Value::as_f64).with_context(|| format!("missing or non-numeric `{key}`"))
}

fn load(a: &GraphInput) -> Result<Loaded> {
    let mut reader = open(&a.input)?;
    let is_pam = a.pam || reader.fill_buf()?.starts_with(b"# pam");
    Ok(if is_pam {
        Loaded::Pam(PamGraph::read_triples(reader, a.delta)?)
    } else {
        Loaded::Cm(MultiGraph::read_edge_list(reader)?)
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn create(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::Writer::from_writer(w)
}

fn emit(v: Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(&v)?);
    Ok(())
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = experiment::resolve_threads(threads) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
