//! Preferential attachment with `m` edges per vertex and additive shift `delta`.
//!
//! Vertices are labelled `1..=t` by arrival time. Edge `(w, j)` is the `j`-th
//! out-edge of `w` and points to `xi(w, j) <= w`; equality is a self-loop.
//! Attachment is sequential in `(w, j)`: an existing vertex `v < w` is chosen
//! with weight `D(v) + delta`, the new vertex itself with weight
//! `D(w) + 1 + j delta / m`, where degrees are those just before the edge.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::MultiGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PamParams {
    pub m: u32,
    pub delta: f64,
}

impl PamParams {
    pub fn new(m: u32, delta: f64) -> Result<Self> {
        let p = Self { m, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(invalid("m must be at least 1"));
        }
        if !(self.delta > -(self.m as f64)) || !self.delta.is_finite() {
            return Err(invalid(format!("delta must exceed -m, got {}", self.delta)));
        }
        Ok(())
    }

    pub fn tau(&self) -> f64 {
        3.0 + self.delta / self.m as f64
    }

    pub fn gamma(&self) -> f64 {
        self.m as f64 / (2.0 * self.m as f64 + self.delta)
    }

    /// Total attachment weight at step `(t, j)`.
    pub fn normalizer(&self, t: u64, j: u32) -> f64 {
        let m = self.m as f64;
        let dm = self.delta / m;
        (m * (t as f64 - 1.0) + (j as f64 - 1.0)) * (2.0 + dm) + 1.0 + dm
    }
}

/// Binary indexed tree over nonnegative f64 weights, 1-based.
struct Fenwick {
    tree: Vec<f64>,
    top: usize,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        let top = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        Self { tree: vec![0.0; n + 1], top }
    }

    fn add(&mut self, mut i: usize, w: f64) {
        while i < self.tree.len() {
            self.tree[i] += w;
            i += i & i.wrapping_neg();
        }
    }

    /// Smallest `i` with `prefix(i) > u`, capped at `limit`.
    fn find(&self, mut u: f64, limit: usize) -> usize {
        let mut pos = 0;
        let mut step = self.top;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= u {
                pos = next;
                u -= self.tree[next];
            }
            step >>= 1;
        }
        (pos + 1).min(limit)
    }
}

/// A realization of the preferential attachment graph.
#[derive(Debug, Clone, PartialEq)]
pub struct PamGraph {
    params: PamParams,
    t: u32,
    xi: Vec<u32>,
    degree: Vec<u32>,
    in_offsets: Vec<usize>,
    in_edges: Vec<u32>,
}

impl PamGraph {
    /// Wraps an attachment array laid out as `xi[(w-1) m + (j-1)]`.
    pub fn from_xi(params: PamParams, xi: Vec<u32>) -> Result<Self> {
        params.validate()?;
        let m = params.m as usize;
        if xi.len() % m != 0 {
            return Err(invalid("attachment array length is not a multiple of m"));
        }
        let t = xi.len() / m;
        for (e, &x) in xi.iter().enumerate() {
            let w = e / m + 1;
            if x == 0 || x as usize > w || (w == 1 && x != 1) {
                return Err(invalid(format!("xi({w},{}) = {x} is not in [1,{w}]", e % m + 1)));
            }
        }
        let mut degree = vec![params.m; t];
        let mut counts = vec![0usize; t + 1];
        for &x in &xi {
            degree[x as usize - 1] += 1;
            counts[x as usize] += 1;
        }
        let mut in_offsets = vec![0usize; t + 1];
        for v in 1..=t {
            in_offsets[v] = in_offsets[v - 1] + counts[v];
        }
        let mut fill = in_offsets.clone();
        let mut in_edges = vec![0u32; xi.len()];
        for (e, &x) in xi.iter().enumerate() {
            let v = x as usize - 1;
            in_edges[fill[v]] = e as u32;
            fill[v] += 1;
        }
        Ok(Self { params, t: t as u32, xi, degree, in_offsets, in_edges })
    }

    pub fn params(&self) -> PamParams {
        self.params
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn m(&self) -> u32 {
        self.params.m
    }

    /// Full attachment array, `xi[(w-1) m + (j-1)]`.
    pub fn xi_all(&self) -> &[u32] {
        &self.xi
    }

    /// Targets of the out-edges of `w` in label order.
    pub fn out_edges(&self, w: u32) -> &[u32] {
        let m = self.params.m as usize;
        let s = (w as usize - 1) * m;
        &self.xi[s..s + m]
    }

    pub fn xi(&self, w: u32, j: u32) -> u32 {
        self.out_edges(w)[j as usize - 1]
    }

    /// Final degree `D_t(v)`.
    pub fn degree(&self, v: u32) -> u32 {
        self.degree[v as usize - 1]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degree
    }

    fn check_vertex(&self, v: u32) -> Result<()> {
        if v == 0 || v > self.t {
            return Err(Error::VertexOutOfRange { vertex: v as u64, n: self.t as u64 });
        }
        Ok(())
    }

    /// `D_{s,j}(v)`: degree of `v` right after edge `(s, j)`.
    pub fn degree_at(&self, v: u32, s: u32, j: u32) -> Result<u32> {
        self.check_vertex(v)?;
        self.check_vertex(s)?;
        if v > s {
            return Err(invalid(format!("vertex {v} does not exist at time {s}")));
        }
        if j == 0 || j > self.params.m {
            return Err(invalid(format!("edge label {j} not in [1,{}]", self.params.m)));
        }
        let m = self.params.m;
        let own = if s > v { m } else { j };
        let last = ((s - 1) * m + (j - 1)) as u32;
        let ins = &self.in_edges[self.in_offsets[v as usize - 1]..self.in_offsets[v as usize]];
        Ok(own + ins.partition_point(|&e| e <= last) as u32)
    }

    /// Degrees of vertices `1..=s` at time `s`, indexed by `v - 1`.
    pub fn degrees_at(&self, s: u32) -> Vec<u32> {
        let s = s.min(self.t) as usize;
        let m = self.params.m as usize;
        let mut d = vec![self.params.m; s];
        for &x in &self.xi[..s * m] {
            d[x as usize - 1] += 1;
        }
        d
    }

    /// Undirected multigraph with edge `{w, xi(w, j)}` for every `(w, j)`.
    /// Vertex `v` of the view is label `v + 1`.
    pub fn undirected_view(&self) -> MultiGraph {
        let m = self.params.m as usize;
        let edges: Vec<(u32, u32)> = self
            .xi
            .iter()
            .enumerate()
            .map(|(e, &x)| ((e / m) as u32, x - 1))
            .collect();
        MultiGraph::from_edges(self.t as usize, &edges).expect("labels are in range")
    }

    /// Writes `w j xi` triples, one edge per line.
    pub fn write_triples(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "# pam m {} delta {} t {}", self.params.m, self.params.delta, self.t)?;
        let m = self.params.m as usize;
        for (e, &x) in self.xi.iter().enumerate() {
            writeln!(w, "{} {} {}", e / m + 1, e % m + 1, x)?;
        }
        Ok(())
    }

    /// Reads triples written by [`PamGraph::write_triples`]. `delta` is taken
    /// from the header when present, else from `fallback_delta`.
    pub fn read_triples(reader: impl BufRead, fallback_delta: Option<f64>) -> Result<Self> {
        let mut delta = fallback_delta;
        let mut m_header: Option<u32> = None;
        let mut rows: Vec<(u32, u32, u32)> = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let s = line.trim();
            if let Some(rest) = s.strip_prefix('#') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                for pair in toks.windows(2) {
                    match pair[0] {
                        "m" => m_header = pair[1].parse().ok(),
                        "delta" => delta = pair[1].parse().ok().or(delta),
                        _ => {}
                    }
                }
                continue;
            }
            if s.is_empty() {
                continue;
            }
            let nums: Vec<u32> = s
                .split_whitespace()
                .map(|x| x.parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
            if nums.len() != 3 {
                return Err(Error::Parse { line: i + 1, msg: "expected `w j xi`".into() });
            }
            rows.push((nums[0], nums[1], nums[2]));
        }
        let m = m_header
            .or_else(|| rows.iter().map(|r| r.1).max())
            .ok_or(Error::Empty("attachment table"))?;
        let delta = delta.ok_or_else(|| invalid("delta missing from header and arguments"))?;
        let t = rows.iter().map(|r| r.0).max().unwrap_or(0) as usize;
        let mut xi = vec![0u32; t * m as usize];
        for &(w, j, x) in &rows {
            if w == 0 || j == 0 || j > m {
                return Err(invalid(format!("bad edge label ({w},{j})")));
            }
            xi[(w as usize - 1) * m as usize + (j as usize - 1)] = x;
        }
        Self::from_xi(PamParams::new(m, delta)?, xi)
    }
}

/// Samples a preferential attachment graph on `t` vertices.
pub fn generate_pam(params: PamParams, t: u32, seed: u64) -> Result<PamGraph> {
    params.validate()?;
    if t < 1 {
        return Err(invalid("t must be at least 1"));
    }
    let m = params.m;
    let delta = params.delta;
    let dm = delta / m as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fen = Fenwick::new(t as usize);
    let mut existing = 0.0f64;
    let mut xi = Vec::with_capacity(t as usize * m as usize);

    for s in 1..=t {
        let mut own = 0u32;
        for j in 1..=m {
            let self_w = own as f64 + 1.0 + j as f64 * dm;
            let c = params.normalizer(s as u64, j);
            debug_assert!(
                ((existing + self_w) - c).abs() <= 1e-9 * c,
                "attachment weights do not sum to the normalizer at ({s},{j})"
            );
            let u = rng.random::<f64>() * (existing + self_w);
            if s > 1 && u < existing {
                let v = fen.find(u, s as usize - 1);
                fen.add(v, 1.0);
                existing += 1.0;
                xi.push(v as u32);
                own += 1;
            } else {
                xi.push(s);
                own += 2;
            }
        }
        let w = own as f64 + delta;
        fen.add(s as usize, w);
        existing += w;
    }
    PamGraph::from_xi(params, xi)
}
