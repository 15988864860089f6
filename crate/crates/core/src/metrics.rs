//! Hop distances, diameters, typical distances and the high-degree core.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::MultiGraph;
use crate::pam::PamGraph;

/// Marker for an unreachable vertex.
pub const INF: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceReport {
    pub source: u32,
    /// Hop counts, `INF` when unreachable.
    pub distances: Vec<u32>,
    /// Largest finite distance.
    pub eccentricity: u32,
}

/// Reusable BFS buffers.
struct Bfs {
    dist: Vec<u32>,
    queue: Vec<u32>,
}

impl Bfs {
    fn new(n: usize) -> Self {
        Self { dist: vec![INF; n], queue: Vec::with_capacity(n) }
    }

    /// Multi-source BFS; returns the eccentricity of the source set. Leaves
    /// `dist` set for visited vertices and the visit order in `queue`.
    fn run(&mut self, g: &MultiGraph, sources: &[u32]) -> u32 {
        for &v in &self.queue {
            self.dist[v as usize] = INF;
        }
        self.queue.clear();
        for &s in sources {
            if self.dist[s as usize] == INF {
                self.dist[s as usize] = 0;
                self.queue.push(s);
            }
        }
        let mut head = 0;
        let mut ecc = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            let du = self.dist[u as usize];
            ecc = du;
            for &w in g.neighbors(u) {
                if self.dist[w as usize] == INF {
                    self.dist[w as usize] = du + 1;
                    self.queue.push(w);
                }
            }
        }
        ecc
    }
}

fn check_vertex(g: &MultiGraph, v: u32) -> Result<()> {
    if v as usize >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: v as u64, n: g.n() as u64 });
    }
    Ok(())
}

/// Single-source hop distances; parallel edges and self-loops are ignored.
pub fn bfs(g: &MultiGraph, source: u32) -> Result<DistanceReport> {
    check_vertex(g, source)?;
    let mut b = Bfs::new(g.n());
    let ecc = b.run(g, &[source]);
    Ok(DistanceReport { source, distances: b.dist, eccentricity: ecc })
}

/// Multi-source hop distances from `sources`.
pub fn multi_source_bfs(g: &MultiGraph, sources: &[u32]) -> Result<Vec<u32>> {
    for &s in sources {
        check_vertex(g, s)?;
    }
    let mut b = Bfs::new(g.n());
    b.run(g, sources);
    Ok(b.dist)
}

/// Component label per vertex and component sizes.
pub fn components(g: &MultiGraph) -> (Vec<u32>, Vec<usize>) {
    let n = g.n();
    let mut label = vec![INF; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for s in 0..n {
        if label[s] != INF {
            continue;
        }
        let c = sizes.len() as u32;
        label[s] = c;
        stack.push(s as u32);
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &w in g.neighbors(u) {
                if label[w as usize] == INF {
                    label[w as usize] = c;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    (label, sizes)
}

/// Vertices of the largest connected component, ascending. Ties go to the
/// component containing the smallest vertex id.
pub fn largest_component(g: &MultiGraph) -> Vec<u32> {
    let (label, sizes) = components(g);
    let Some(best) = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i as u32)
    else {
        return Vec::new();
    };
    (0..g.n() as u32).filter(|&v| label[v as usize] == best).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiameterMethod {
    /// Eccentricity of every vertex of the component.
    AllSources,
    /// Iterative fringe upper bound; exact, usually far fewer BFS runs.
    Ifub,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diameter {
    pub diam: u32,
    /// `|LCC| / n`.
    pub component_fraction: f64,
    /// Number of BFS traversals performed.
    pub bfs_runs: usize,
}

/// Exact diameter of the largest connected component.
pub fn diameter(g: &MultiGraph, method: DiameterMethod) -> Result<Diameter> {
    if g.n() == 0 {
        return Err(Error::Empty("graph"));
    }
    let lcc = largest_component(g);
    let component_fraction = lcc.len() as f64 / g.n() as f64;
    let (diam, bfs_runs) = match method {
        DiameterMethod::AllSources => {
            let diam = lcc
                .par_iter()
                .map_init(|| Bfs::new(g.n()), |b, &v| b.run(g, &[v]))
                .max()
                .unwrap_or(0);
            (diam, lcc.len())
        }
        DiameterMethod::Ifub => ifub(g, &lcc),
    };
    Ok(Diameter { diam, component_fraction, bfs_runs })
}

/// Vertex on a shortest path from the last BFS source to `far`, halfway.
fn midpoint(g: &MultiGraph, b: &Bfs, far: u32) -> u32 {
    let mut v = far;
    let target = b.dist[far as usize] / 2;
    while b.dist[v as usize] > target {
        let d = b.dist[v as usize];
        v = *g.neighbors(v).iter().find(|&&w| b.dist[w as usize] + 1 == d).expect("BFS parent exists");
    }
    v
}

/// 4-sweep: two double sweeps, each restarted at the midpoint of the
/// previous long path. Returns the midpoint and a diameter lower bound.
fn four_sweep(g: &MultiGraph, b: &mut Bfs, start: u32) -> (u32, u32) {
    let mut lb = 0;
    let mut r = start;
    for _ in 0..2 {
        lb = lb.max(b.run(g, &[r]));
        let a = *b.queue.last().expect("source is visited");
        lb = lb.max(b.run(g, &[a]));
        let far = *b.queue.last().expect("source is visited");
        r = midpoint(g, b, far);
    }
    (r, lb)
}

/// BFS levels of `root`, leaving `b` holding its distances.
fn levels_from(g: &MultiGraph, b: &mut Bfs, root: u32) -> Vec<Vec<u32>> {
    let ecc = b.run(g, &[root]);
    let mut levels: Vec<Vec<u32>> = vec![Vec::new(); ecc as usize + 1];
    for &v in &b.queue {
        levels[b.dist[v as usize] as usize].push(v);
    }
    levels
}

/// iFUB. The root is whichever of the highest-degree vertex and the 4-sweep
/// centre has the smaller eccentricity, then the thinner outer fringe.
fn ifub(g: &MultiGraph, lcc: &[u32]) -> (u32, usize) {
    let Some(&hub) = lcc.iter().max_by_key(|&&v| (g.degree(v), std::cmp::Reverse(v))) else {
        return (0, 0);
    };
    let mut b = Bfs::new(g.n());
    let (centre, sweep_lb) = four_sweep(g, &mut b, hub);
    let mut runs = 4;
    let mut levels = levels_from(g, &mut b, hub);
    let alt = levels_from(g, &mut b, centre);
    runs += 2;
    let key = |l: &Vec<Vec<u32>>| (l.len(), l.last().map_or(0, Vec::len));
    if key(&alt) < key(&levels) {
        levels = alt;
    }
    let ecc_root = levels.len() as u32 - 1;
    let mut lb = ecc_root.max(sweep_lb);
    let mut i = ecc_root;
    // Invariant: every vertex above level i has eccentricity <= lb, and every
    // pair within levels <= i is at distance <= 2i.
    const CHUNK: usize = 64;
    'outer: while i > 0 && 2 * i > lb {
        for chunk in levels[i as usize].chunks(CHUNK) {
            let bi = chunk
                .par_iter()
                .map_init(|| Bfs::new(g.n()), |b, &v| b.run(g, &[v]))
                .max()
                .unwrap_or(0);
            runs += chunk.len();
            lb = lb.max(bi);
            if lb > 2 * (i - 1) {
                break 'outer;
            }
        }
        i -= 1;
    }
    (lb, runs)
}

/// Samples of the typical distance between independent uniform vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalDistances {
    pub pairs: Vec<(u32, u32)>,
    /// `None` when the pair is disconnected.
    pub distances: Vec<Option<u32>>,
}

impl TypicalDistances {
    pub fn finite(&self) -> Vec<u32> {
        self.distances.iter().flatten().copied().collect()
    }

    pub fn max_finite(&self) -> Option<u32> {
        self.distances.iter().flatten().copied().max()
    }

    pub fn median_finite(&self) -> Option<f64> {
        let mut f = self.finite();
        if f.is_empty() {
            return None;
        }
        f.sort_unstable();
        let k = f.len();
        Some(if k % 2 == 1 { f[k / 2] as f64 } else { (f[k / 2 - 1] + f[k / 2]) as f64 / 2.0 })
    }
}

/// Draws `pairs` i.i.d. uniform vertex pairs and measures their distances.
/// Pairs sharing a first vertex share one BFS.
pub fn typical_distance_sample(g: &MultiGraph, pairs: usize, seed: u64) -> Result<TypicalDistances> {
    if pairs == 0 {
        return Err(invalid("at least one pair is required"));
    }
    if g.n() == 0 {
        return Err(Error::Empty("graph"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n() as u32;
    let sampled: Vec<(u32, u32)> =
        (0..pairs).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect();
    let mut order: Vec<usize> = (0..pairs).collect();
    order.sort_by_key(|&i| sampled[i].0);
    let groups: Vec<&[usize]> = order.chunk_by(|&a, &b| sampled[a].0 == sampled[b].0).collect();
    let results: Vec<(usize, Option<u32>)> = groups
        .par_iter()
        .map_init(
            || Bfs::new(g.n()),
            |b, grp| {
                b.run(g, &[sampled[grp[0]].0]);
                grp.iter()
                    .map(|&i| {
                        let d = b.dist[sampled[i].1 as usize];
                        (i, (d != INF).then_some(d))
                    })
                    .collect::<Vec<_>>()
            },
        )
        .flatten()
        .collect();
    let mut distances = vec![None; pairs];
    for (i, d) in results {
        distances[i] = d;
    }
    Ok(TypicalDistances { pairs: sampled, distances })
}

/// Vertices whose degree reaches `(log n)^sigma` at the snapshot time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreSet {
    /// 0-based vertex ids, ascending.
    pub members: Vec<u32>,
    pub threshold: f64,
    pub sigma: f64,
    /// `n` for CM, `floor(t/2)` for PAM.
    pub snapshot_time: u64,
    #[serde(skip)]
    mask: Vec<bool>,
}

impl CoreSet {
    fn from_degrees(degrees: &[u32], n_total: usize, threshold: f64, sigma: f64, snapshot: u64) -> Self {
        let members: Vec<u32> = degrees
            .iter()
            .enumerate()
            .filter(|(_, &d)| d as f64 >= threshold)
            .map(|(v, _)| v as u32)
            .collect();
        let mut mask = vec![false; n_total];
        for &v in &members {
            mask[v as usize] = true;
        }
        Self { members, threshold, sigma, snapshot_time: snapshot, mask }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.mask.get(v as usize).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Core threshold `(log n)^sigma`.
pub fn core_threshold(n: u64, sigma: f64) -> f64 {
    (n as f64).ln().powf(sigma)
}

fn check_sigma(sigma: f64, tau: f64) -> Result<()> {
    if !(sigma > 1.0 / (3.0 - tau)) {
        return Err(invalid(format!("sigma must exceed 1/(3 - tau) = {}", 1.0 / (3.0 - tau))));
    }
    Ok(())
}

/// CM core: final degree at least `(log n)^sigma`.
pub fn extract_core_cm(g: &MultiGraph, tau: f64, sigma: f64) -> Result<CoreSet> {
    check_sigma(sigma, tau)?;
    let n = g.n();
    Ok(CoreSet::from_degrees(&g.degrees(), n, core_threshold(n as u64, sigma), sigma, n as u64))
}

/// PAM core: degree at time `floor(t/2)` at least `(log t)^sigma`. Ids are
/// 0-based to match [`PamGraph::undirected_view`].
pub fn extract_core_pam(g: &PamGraph, sigma: f64) -> Result<CoreSet> {
    check_sigma(sigma, g.params().tau())?;
    let t = g.t() as usize;
    let half = t / 2;
    Ok(CoreSet::from_degrees(
        &g.degrees_at(half as u32),
        t,
        core_threshold(t as u64, sigma),
        sigma,
        half as u64,
    ))
}

/// Largest whole-graph distance between two core members; `None` if two
/// members are disconnected.
pub fn core_diameter(g: &MultiGraph, core: &CoreSet) -> Result<Option<u32>> {
    if core.is_empty() {
        return Err(Error::EmptyCore);
    }
    let worst = core
        .members
        .par_iter()
        .map_init(
            || Bfs::new(g.n()),
            |b, &v| {
                b.run(g, &[v]);
                core.members.iter().map(|&w| b.dist[w as usize]).max().unwrap_or(0)
            },
        )
        .max()
        .unwrap_or(0);
    Ok((worst != INF).then_some(worst))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: u32) -> MultiGraph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        MultiGraph::from_edges(n as usize, &e).unwrap()
    }

    fn complete(n: u32) -> MultiGraph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        MultiGraph::from_edges(n as usize, &e).unwrap()
    }

    #[test]
    fn bfs_basics() {
        let r = bfs(&path(4), 0).unwrap();
        assert_eq!(r.distances, vec![0, 1, 2, 3]);
        assert_eq!(r.eccentricity, 3);
        assert_eq!(bfs(&complete(3), 2).unwrap().eccentricity, 1);
        assert!(bfs(&path(2), 5).is_err());
    }

    #[test]
    fn diameters() {
        for m in [DiameterMethod::AllSources, DiameterMethod::Ifub] {
            assert_eq!(diameter(&complete(5), m).unwrap().diam, 1);
            let two = MultiGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
            let d = diameter(&two, m).unwrap();
            assert_eq!((d.diam, d.component_fraction), (1, 0.5));
            assert_eq!(diameter(&path(9), m).unwrap().diam, 8);
        }
        assert!(diameter(&MultiGraph::from_edges(0, &[]).unwrap(), DiameterMethod::Ifub).is_err());
    }

    #[test]
    fn typical_on_complete_graph() {
        let t = typical_distance_sample(&complete(6), 500, 3).unwrap();
        for (&(u, v), d) in t.pairs.iter().zip(&t.distances) {
            assert_eq!(*d, Some(u32::from(u != v)));
        }
        let e = MultiGraph::from_edges(2, &[(0, 1)]).unwrap();
        let t = typical_distance_sample(&e, 50, 1).unwrap();
        assert!(t.finite().iter().all(|&d| d <= 1));
    }

    #[test]
    fn star_core() {
        let e: Vec<_> = (1..30).map(|i| (0, i)).collect();
        let g = MultiGraph::from_edges(30, &e).unwrap();
        let core = extract_core_cm(&g, 2.5, 2.1).unwrap();
        assert_eq!(core.members, vec![0]);
        assert_eq!(core_diameter(&g, &core).unwrap(), Some(0));
        let none = extract_core_cm(&g, 2.5, 5.0).unwrap();
        assert!(none.is_empty());
        assert!(matches!(core_diameter(&g, &none), Err(Error::EmptyCore)));
        assert!(extract_core_cm(&g, 2.5, 1.5).is_err());
    }
}
