//! Multi-size, multi-replica experiments with CSV/JSON reporting.
//!
//! Replica `i` (counted across all sizes) uses seed `seed_base + i` with
//! `ChaCha8Rng::seed_from_u64`, so results are reproducible on any platform.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{asymptotic_constants, cm_mk_first_moment, AsymptoticConstants, DoublingParams};
use crate::cm::generate_cm;
use crate::degree::{quantile_sequence, sample_iid_powerlaw, DegreeSequence, PowerLawSpec};
use crate::error::{invalid, Error, Result};
use crate::graph::MultiGraph;
use crate::metrics::{
    core_diameter, diameter, extract_core_cm, extract_core_pam, typical_distance_sample, CoreSet,
    DiameterMethod,
};
use crate::pam::{generate_pam, PamGraph, PamParams};
use crate::params::ModelParams;
use crate::structure::{
    census_mkc_cm, census_mkc_pam, distance_to_core, find_connectors, CmExplorer, PamExplorer,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measurement {
    Diameter,
    Typical,
    Mkc,
    Core,
    Exploration,
    Connectors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeMode {
    /// Deterministic quantile sequence of the power law.
    #[default]
    Quantile,
    /// i.i.d. draws, reseeded per replica.
    Iid,
}

fn default_eps() -> f64 {
    0.1
}
fn default_sigma() -> f64 {
    2.2
}
fn default_eta() -> f64 {
    0.05
}
fn default_pairs() -> usize {
    100
}
fn default_method() -> DiameterMethod {
    DiameterMethod::Ifub
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    /// `n` for CM, `t` for PAM.
    pub sizes: Vec<u64>,
    pub replicas: u32,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "default_eps")]
    pub epsilon: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Override for `B` in `h_n`; defaults to `1/gamma_d`.
    #[serde(default)]
    pub b: Option<f64>,
    /// Override for `C` in `h_n`; defaults to `log(sigma / log 2)`.
    #[serde(default)]
    pub c: Option<f64>,
    pub measurements: BTreeSet<Measurement>,
    #[serde(default)]
    pub degrees: DegreeMode,
    /// MKC depth; defaults to `k_n^-`.
    #[serde(default)]
    pub mkc_k: Option<u32>,
    #[serde(default = "default_pairs")]
    pub typical_pairs: usize,
    #[serde(default = "default_method")]
    pub diameter_method: DiameterMethod,
    /// Per-replica budget; once exceeded the remaining measurements are
    /// skipped and the row is flagged.
    #[serde(default)]
    pub timeout_secs: Option<f64>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.sizes.is_empty() {
            return Err(invalid("sizes must be nonempty"));
        }
        if self.replicas == 0 {
            return Err(invalid("replicas must be at least 1"));
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| n < 16 || n > u32::MAX as u64 / 2) {
            return Err(invalid(format!("size {n} out of range")));
        }
        if let ModelParams::Cm { d_min, .. } = self.params {
            if d_min < 2 {
                return Err(invalid("CM experiments need d_min >= 2"));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn doubling(&self) -> DoublingParams {
        DoublingParams::default_for(self.sigma)
    }

    pub fn h_constants(&self) -> (f64, f64) {
        let d = self.doubling();
        (self.b.unwrap_or(d.b()), self.c.unwrap_or(d.c()))
    }

    pub fn total_rows(&self) -> usize {
        self.sizes.len() * self.replicas as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRow {
    pub size: u64,
    pub replica: u32,
    pub seed: u64,
    pub values: BTreeMap<String, f64>,
    pub timed_out: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub count: usize,
    pub mean: f64,
    pub stderr: f64,
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeAggregate {
    pub size: u64,
    pub rows: usize,
    pub failures: usize,
    pub timed_out: usize,
    pub columns: BTreeMap<String, ColumnSummary>,
    pub theory: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub rows: Vec<ReplicaRow>,
    pub aggregates: Vec<SizeAggregate>,
    /// Wall-clock seconds per row; kept out of the CSV so it stays
    /// byte-for-byte reproducible.
    #[serde(skip)]
    pub elapsed: Vec<f64>,
}

/// Thread count: explicit value, else `ULTRASMALL_THREADS`, else rayon's
/// default.
pub fn resolve_threads(explicit: Option<usize>) -> Option<usize> {
    explicit.or_else(|| std::env::var("ULTRASMALL_THREADS").ok().and_then(|s| s.parse().ok()))
}

pub fn run(config: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentResult> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = resolve_threads(threads) {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| invalid(format!("thread pool: {e}")))?;
    let jobs: Vec<(u64, u32, u64)> = config
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(si, &size)| {
            (0..config.replicas).map(move |r| {
                let index = si as u64 * config.replicas as u64 + r as u64;
                (size, r, config.seed_base.wrapping_add(index))
            })
        })
        .collect();
    let mut out: Vec<(ReplicaRow, f64)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(size, replica, seed)| {
                let start = Instant::now();
                let row = run_replica(config, size, replica, seed);
                (row, start.elapsed().as_secs_f64())
            })
            .collect()
    });
    out.sort_by_key(|(r, _)| r.seed.wrapping_sub(config.seed_base));
    let (rows, elapsed): (Vec<_>, Vec<_>) = out.into_iter().unzip();
    let aggregates = aggregate(config, &rows)?;
    Ok(ExperimentResult { config: config.clone(), rows, aggregates, elapsed })
}

fn run_replica(config: &ExperimentConfig, size: u64, replica: u32, seed: u64) -> ReplicaRow {
    let mut values = BTreeMap::new();
    let mut timed_out = false;
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        measure(config, size, seed, &mut values, &mut timed_out)
    }));
    let error = match outcome {
        Ok(Ok(())) => None,
        Ok(Err(e)) => Some(e.to_string()),
        Err(p) => Some(
            p.downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()),
        ),
    };
    ReplicaRow { size, replica, seed, values, timed_out, error }
}

enum Realized {
    Cm { seq: DegreeSequence, g: MultiGraph },
    Pam { g: PamGraph, view: MultiGraph },
}

impl Realized {
    fn graph(&self) -> &MultiGraph {
        match self {
            Realized::Cm { g, .. } => g,
            Realized::Pam { view, .. } => view,
        }
    }
}

fn realize(config: &ExperimentConfig, size: u64, seed: u64) -> Result<Realized> {
    match config.params {
        ModelParams::Cm { tau, d_min } => {
            let spec = PowerLawSpec { tau, d_min, n: size as usize };
            let seq = match config.degrees {
                DegreeMode::Quantile => quantile_sequence(spec)?,
                DegreeMode::Iid => sample_iid_powerlaw(spec, seed)?,
            }
            .fix_parity();
            let g = generate_cm(&seq, seed)?;
            Ok(Realized::Cm { seq, g })
        }
        ModelParams::Pam { m, delta } => {
            let g = generate_pam(PamParams::new(m, delta)?, size as u32, seed)?;
            let view = g.undirected_view();
            Ok(Realized::Pam { g, view })
        }
    }
}

fn core_of(config: &ExperimentConfig, r: &Realized) -> Result<CoreSet> {
    match r {
        Realized::Cm { g, .. } => extract_core_cm(g, config.params.tau(), config.sigma),
        Realized::Pam { g, .. } => extract_core_pam(g, config.sigma),
    }
}

fn measure(
    config: &ExperimentConfig,
    size: u64,
    seed: u64,
    values: &mut BTreeMap<String, f64>,
    timed_out: &mut bool,
) -> Result<()> {
    let start = Instant::now();
    let over = || config.timeout_secs.is_some_and(|b| start.elapsed().as_secs_f64() > b);
    let consts = asymptotic_constants(&config.params)?;
    let r = realize(config, size, seed)?;
    let g = r.graph();
    let mut put = |k: &str, v: f64| {
        values.insert(k.to_string(), v);
    };
    put("edges", g.num_edges() as f64);
    put("self_loops", g.self_loop_count() as f64);
    if let Realized::Cm { seq, .. } = &r {
        put("d_max", seq.d_max().unwrap_or(0) as f64);
    }
    let mut core: Option<CoreSet> = None;

    for &m in &config.measurements {
        if over() {
            *timed_out = true;
            break;
        }
        match m {
            Measurement::Diameter => {
                let d = diameter(g, config.diameter_method)?;
                put("diam", d.diam as f64);
                put("lcc_fraction", d.component_fraction);
            }
            Measurement::Typical => {
                let t = typical_distance_sample(g, config.typical_pairs, seed ^ 0x5eed_d157)?;
                let fin = t.finite();
                put("typ_connected", fin.len() as f64 / t.pairs.len().max(1) as f64);
                if let Some(mx) = t.max_finite() {
                    put("typ_max", mx as f64);
                    put("typ_median", t.median_finite().unwrap_or(f64::NAN));
                    put("typ_mean", fin.iter().map(|&d| d as f64).sum::<f64>() / fin.len() as f64);
                }
            }
            Measurement::Mkc => {
                let k = config.mkc_k.unwrap_or(consts.k_minus(size, config.epsilon).max(0) as u32);
                put("mkc_k", k as f64);
                let census = match &r {
                    Realized::Cm { g, .. } => census_mkc_cm(g, k)?,
                    Realized::Pam { g, .. } => census_mkc_pam(g, k)?,
                };
                put("mkc_count", census.count as f64);
            }
            Measurement::Core => {
                let c = core_of(config, &r)?;
                put("core_size", c.len() as f64);
                if !c.is_empty() {
                    if let Some(d) = core_diameter(g, &c)? {
                        put("core_diam", d as f64);
                    }
                    let dist = distance_to_core(g, &c)?;
                    if let Some(mx) = dist.max {
                        put("core_dist_max", mx as f64);
                    }
                    let reference = core_reference(config, &consts, size);
                    put("core_dist_within_ref", dist.fraction_within(reference));
                }
                core = Some(c);
            }
            Measurement::Exploration => {
                if core.is_none() {
                    core = Some(core_of(config, &r)?);
                }
                let k = consts.k_plus(size, config.epsilon).max(0) as u32;
                put("expl_k", k as f64);
                let (multi, total_coll, n) = exploration_stats(&r, k, core.as_ref())?;
                put("expl_frac_multi_collision", multi as f64 / n as f64);
                put("expl_mean_collisions", total_coll as f64 / n as f64);
            }
            Measurement::Connectors => {
                if let Realized::Pam { g, .. } = &r {
                    let (count, a_weight, i_deg) = connector_sample(g, seed)?;
                    put("connectors", count as f64);
                    put("connector_da", a_weight as f64);
                    put("connector_di", i_deg as f64);
                } else {
                    return Err(invalid("connectors are defined for PAM only"));
                }
            }
        }
    }
    Ok(())
}

/// `k_n^+ + h_n` (CM) or `k_n^+ + 2 h_n` (PAM).
pub fn core_reference(config: &ExperimentConfig, consts: &AsymptoticConstants, size: u64) -> u32 {
    let (b, c) = config.h_constants();
    let h = AsymptoticConstants::h(size, b, c).max(0);
    let k = consts.k_plus(size, config.epsilon).max(0);
    (k + consts.c_dist as i64 * h) as u32
}

fn exploration_stats(r: &Realized, k: u32, core: Option<&CoreSet>) -> Result<(usize, usize, usize)> {
    let (mut multi, mut total) = (0usize, 0usize);
    match r {
        Realized::Cm { g, .. } => {
            let mut ex = CmExplorer::new(g);
            for v in 0..g.n() as u32 {
                let e = ex.explore(v, k, core)?;
                multi += (e.collisions_before_core >= 2) as usize;
                total += e.collisions.len();
            }
            Ok((multi, total, g.n()))
        }
        Realized::Pam { g, .. } => {
            let mut ex = PamExplorer::new(g);
            for v in 1..=g.t() {
                let e = ex.explore(v, k, core)?;
                multi += (e.collisions_before_core >= 2) as usize;
                total += e.collisions.len();
            }
            Ok((multi, total, g.t() as usize))
        }
    }
}

/// Connectors between the 50 highest-degree vertices of `[t/2]` (at time
/// `t/2`) and one other random vertex of `[t/2]`.
fn connector_sample(g: &PamGraph, seed: u64) -> Result<(usize, u64, u32)> {
    let half = g.t() / 2;
    let deg = g.degrees_at(half);
    let mut order: Vec<u32> = (1..=half).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(deg[v as usize - 1]), v));
    let top = order.len().min(50);
    if top == order.len() {
        return Err(invalid("t too small for a connector query"));
    }
    let a = &order[..top];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0ee_c702);
    let i = order[rng.random_range(top..order.len())];
    let q = find_connectors(g, a, i)?;
    let da: u64 = a.iter().map(|&v| deg[v as usize - 1] as u64).sum();
    Ok((q.connectors.len(), da, deg[i as usize - 1]))
}

fn summarize(values: &mut [f64]) -> ColumnSummary {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let stderr = if n > 1 {
        let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    let q = |p: f64| {
        let h = p * (n - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        values[lo] + (h - lo as f64) * (values[hi] - values[lo])
    };
    ColumnSummary {
        count: n,
        mean,
        stderr,
        q05: q(0.05),
        q25: q(0.25),
        q50: q(0.5),
        q75: q(0.75),
        q95: q(0.95),
    }
}

fn theory_columns(config: &ExperimentConfig, size: u64) -> Result<BTreeMap<String, f64>> {
    let c = asymptotic_constants(&config.params)?;
    let (b, cc) = config.h_constants();
    let ll = (size as f64).ln().ln();
    let mut t = BTreeMap::new();
    t.insert("diam_constant".into(), c.diam_constant);
    t.insert("typ_constant".into(), c.typ_constant);
    t.insert("loglog_n".into(), ll);
    t.insert("diam_reference".into(), c.diam_constant * ll);
    t.insert("typ_reference".into(), c.typ_constant * ll);
    t.insert("k_minus".into(), c.k_minus(size, config.epsilon) as f64);
    t.insert("k_plus".into(), c.k_plus(size, config.epsilon) as f64);
    t.insert("k_bar".into(), c.k_bar(size, config.epsilon) as f64);
    t.insert("h".into(), AsymptoticConstants::h(size, b, cc) as f64);
    t.insert("core_reference".into(), core_reference(config, &c, size) as f64);
    if let (ModelParams::Cm { tau, d_min }, DegreeMode::Quantile) = (config.params, config.degrees) {
        if config.measurements.contains(&Measurement::Mkc) {
            let seq = quantile_sequence(PowerLawSpec { tau, d_min, n: size as usize })?.fix_parity();
            let k = config.mkc_k.unwrap_or(c.k_minus(size, config.epsilon).max(0) as u32);
            if let Ok(e) = cm_mk_first_moment(&seq, k) {
                t.insert("mkc_expected".into(), e);
            }
        }
    }
    Ok(t)
}

/// Per-size summaries of every numeric column, plus theory columns.
pub fn aggregate(config: &ExperimentConfig, rows: &[ReplicaRow]) -> Result<Vec<SizeAggregate>> {
    let mut out = Vec::new();
    for &size in &config.sizes {
        let here: Vec<&ReplicaRow> = rows.iter().filter(|r| r.size == size).collect();
        let mut cols: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for r in &here {
            for (k, &v) in &r.values {
                if v.is_finite() {
                    cols.entry(k.clone()).or_default().push(v);
                }
            }
        }
        out.push(SizeAggregate {
            size,
            rows: here.len(),
            failures: here.iter().filter(|r| r.error.is_some()).count(),
            timed_out: here.iter().filter(|r| r.timed_out).count(),
            columns: cols.into_iter().map(|(k, mut v)| (k, summarize(&mut v))).collect(),
            theory: theory_columns(config, size)?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Gnuplot,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "gnuplot" => Ok(Self::Gnuplot),
            other => Err(invalid(format!("unknown report format {other:?}"))),
        }
    }
}

fn value_columns(rows: &[ReplicaRow]) -> Vec<String> {
    let set: BTreeSet<&String> = rows.iter().flat_map(|r| r.values.keys()).collect();
    set.into_iter().cloned().collect()
}

/// Per-row CSV; missing values are empty cells.
pub fn write_rows_csv(rows: &[ReplicaRow], w: impl Write) -> Result<()> {
    let cols = value_columns(rows);
    let mut wr = csv::Writer::from_writer(w);
    let mut header = vec!["size".to_string(), "replica".into(), "seed".into()];
    header.extend(cols.iter().cloned());
    header.extend(["timed_out".to_string(), "error".into()]);
    wr.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.size.to_string(), r.replica.to_string(), r.seed.to_string()];
        for c in &cols {
            rec.push(r.values.get(c).map(|v| v.to_string()).unwrap_or_default());
        }
        rec.push(r.timed_out.to_string());
        rec.push(r.error.clone().unwrap_or_default());
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_rows_csv(r: impl Read) -> Result<Vec<ReplicaRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    let parse_err = |line: usize, msg: String| Error::Parse { line, msg };
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let mut row = ReplicaRow {
            size: 0,
            replica: 0,
            seed: 0,
            values: BTreeMap::new(),
            timed_out: false,
            error: None,
        };
        for (name, cell) in header.iter().zip(rec.iter()) {
            match name.as_str() {
                "size" => row.size = cell.parse().map_err(|e| parse_err(line, format!("size: {e}")))?,
                "replica" => row.replica = cell.parse().map_err(|e| parse_err(line, format!("replica: {e}")))?,
                "seed" => row.seed = cell.parse().map_err(|e| parse_err(line, format!("seed: {e}")))?,
                "timed_out" => row.timed_out = cell == "true",
                "error" => row.error = (!cell.is_empty()).then(|| cell.to_string()),
                col if !cell.is_empty() => {
                    let v: f64 = cell.parse().map_err(|e| parse_err(line, format!("{col}: {e}")))?;
                    row.values.insert(col.to_string(), v);
                }
                _ => {}
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

fn write_gnuplot(result: &ExperimentResult, mut w: impl Write) -> Result<()> {
    let cols: BTreeSet<&String> = result.aggregates.iter().flat_map(|a| a.columns.keys()).collect();
    let theory: BTreeSet<&String> = result.aggregates.iter().flat_map(|a| a.theory.keys()).collect();
    write!(w, "# size")?;
    for c in &cols {
        write!(w, " {c}_mean {c}_stderr")?;
    }
    for t in &theory {
        write!(w, " {t}")?;
    }
    writeln!(w)?;
    for a in &result.aggregates {
        write!(w, "{}", a.size)?;
        for c in &cols {
            match a.columns.get(*c) {
                Some(s) => write!(w, " {} {}", s.mean, s.stderr)?,
                None => write!(w, " NaN NaN")?,
            }
        }
        for t in &theory {
            write!(w, " {}", a.theory.get(*t).copied().unwrap_or(f64::NAN))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Writes `rows.csv`, `aggregate.json` or `aggregate.dat` into `dir`.
pub fn report(result: &ExperimentResult, format: ReportFormat, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    match format {
        ReportFormat::Csv => write_rows_csv(&result.rows, fs::File::create(dir.join("rows.csv"))?),
        ReportFormat::Json => {
            let doc = serde_json::json!({
                "config": result.config,
                "aggregates": result.aggregates,
            });
            let mut f = fs::File::create(dir.join("aggregate.json"))?;
            serde_json::to_writer_pretty(&mut f, &doc)?;
            writeln!(f)?;
            Ok(())
        }
        ReportFormat::Gnuplot => write_gnuplot(result, fs::File::create(dir.join("aggregate.dat"))?),
    }
}

/// Per-row wall-clock times, written next to the deterministic outputs.
pub fn write_timings(result: &ExperimentResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut wr = csv::Writer::from_path(dir.join("timing.csv"))?;
    wr.write_record(["size", "replica", "seed", "elapsed_secs"])?;
    for (r, t) in result.rows.iter().zip(&result.elapsed) {
        wr.write_record([r.size.to_string(), r.replica.to_string(), r.seed.to_string(), t.to_string()])?;
    }
    wr.flush()?;
    Ok(())
}
