//! Structural objects: minimally-k-connected vertices, k-exploration graphs
//! with their collisions, t-connectors and distances to the core.
//!
//! CM functions use 0-based vertex ids. PAM functions use arrival labels
//! `1..=t`; a [`CoreSet`] is always 0-based, so PAM label `v` is core vertex
//! `v - 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{i_k, ModelKind};
use crate::error::{invalid, Error, Result};
use crate::graph::MultiGraph;
use crate::metrics::{multi_source_bfs, CoreSet, INF};
use crate::pam::PamGraph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MkcCensus {
    pub k: u32,
    /// CM: 0-based ids. PAM: labels.
    pub members: Vec<u32>,
    pub count: usize,
    /// Edge count of the minimal tree (CM) or its vertex count (PAM).
    pub i_k: u64,
}

/// Epoch-stamped vertex marker, reset in O(1).
struct Marks {
    stamp: Vec<u32>,
    epoch: u32,
}

impl Marks {
    fn new(n: usize) -> Self {
        Self { stamp: vec![0; n], epoch: 0 }
    }

    fn clear(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
    }

    fn set(&mut self, i: usize) -> bool {
        let fresh = self.stamp[i] != self.epoch;
        self.stamp[i] = self.epoch;
        fresh
    }

    fn get(&self, i: usize) -> bool {
        self.stamp[i] == self.epoch
    }
}

/// Collects `U_{<=k}(v)`; gives up as soon as `accept` rejects a vertex.
fn ball(
    g: &MultiGraph,
    v: u32,
    k: u32,
    marks: &mut Marks,
    out: &mut Vec<u32>,
    accept: impl Fn(u32, u32) -> bool,
) -> bool {
    marks.clear();
    out.clear();
    marks.set(v as usize);
    out.push(v);
    if !accept(v, 0) {
        return false;
    }
    let mut start = 0;
    for depth in 1..=k {
        let end = out.len();
        for i in start..end {
            let u = out[i];
            for &w in g.neighbors(u) {
                if marks.set(w as usize) {
                    if !accept(w, depth) {
                        return false;
                    }
                    out.push(w);
                }
            }
        }
        start = end;
    }
    true
}

/// True when the subgraph spanned by the marked `vertices` has exactly
/// `|vertices| - 1` edges, counting self-loops and parallel edges.
fn spans_tree(g: &MultiGraph, vertices: &[u32], marks: &Marks) -> bool {
    let inside: usize = vertices
        .iter()
        .map(|&u| g.neighbors(u).iter().filter(|&&w| marks.get(w as usize)).count())
        .sum();
    inside == 2 * (vertices.len() - 1)
}

/// Explores `U_{<=k}(v)` and checks that every edge leaving a vertex at
/// depth `< k` reaches a fresh vertex (apart from the edge back to its
/// parent), and that all reached vertices satisfy `accept`. Edges between
/// depth-`k` vertices are not examined: they are not part of the `i_k`
/// pairings that build the tree.
fn grows_regular_tree(
    g: &MultiGraph,
    v: u32,
    k: u32,
    marks: &mut Marks,
    frontier: &mut Vec<(u32, u32)>,
    accept: impl Fn(u32) -> bool,
) -> bool {
    if !accept(v) {
        return false;
    }
    marks.clear();
    marks.set(v as usize);
    frontier.clear();
    frontier.push((v, u32::MAX));
    for _ in 0..k {
        let level = std::mem::take(frontier);
        for &(u, parent) in &level {
            let mut parent_seen = false;
            for &w in g.neighbors(u) {
                if w == parent && !parent_seen {
                    parent_seen = true;
                    continue;
                }
                if !marks.set(w as usize) || !accept(w) {
                    return false;
                }
                frontier.push((w, u));
            }
        }
    }
    true
}

/// CM census: `v` qualifies when the `i_k` edges explored from the vertices
/// at depth `< k` form a tree whose vertices all have the minimal degree.
pub fn census_mkc_cm(g: &MultiGraph, k: u32) -> Result<MkcCensus> {
    let Some(d_min) = g.degrees().into_iter().min() else {
        return Ok(MkcCensus { k, members: vec![], count: 0, i_k: 0 });
    };
    let ik = if d_min >= 2 { i_k(ModelKind::Cm, d_min, k)? } else { 0 };
    let members: Vec<u32> = (0..g.n() as u32)
        .into_par_iter()
        .map_init(
            || (Marks::new(g.n()), Vec::new()),
            |(marks, buf), v| {
                grows_regular_tree(g, v, k, marks, buf, |w| g.degree(w) == d_min).then_some(v)
            },
        )
        .flatten()
        .collect();
    Ok(MkcCensus { k, count: members.len(), members, i_k: ik })
}

/// PAM census: `v > t/2` with `D_t(v) = m`, every other ball vertex in
/// `(t/4, t/2]` with `D_t = m + 1`, and the ball a tree.
pub fn census_mkc_pam(g: &PamGraph, k: u32) -> Result<MkcCensus> {
    let t = g.t();
    let m = g.m();
    let (half, quarter) = (t / 2, t / 4);
    let view = g.undirected_view();
    let members: Vec<u32> = (half + 1..=t)
        .into_par_iter()
        .map_init(
            || (Marks::new(t as usize), Vec::new()),
            |(marks, buf), v| {
                let ok = ball(&view, v - 1, k, marks, buf, |w, depth| {
                    let label = w + 1;
                    if depth == 0 {
                        g.degree(label) == m
                    } else {
                        label > quarter && label <= half && g.degree(label) == m + 1
                    }
                }) && spans_tree(&view, buf, marks);
                ok.then_some(v)
            },
        )
        .flatten()
        .collect();
    let ik = if m >= 2 { i_k(ModelKind::Pam, m, k)? } else { k as u64 + 1 };
    Ok(MkcCensus { k, count: members.len(), members, i_k: ik })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    /// Level under construction when the collision occurred.
    pub level: u32,
    pub vertex: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationGraph {
    pub root: u32,
    pub k: u32,
    /// `levels[i]` lists the vertices first reached at distance `i`.
    pub levels: Vec<Vec<u32>>,
    pub collisions: Vec<Collision>,
    /// Level at which a core vertex was first included.
    pub hit_core: Option<u32>,
    /// Collisions recorded before the first core vertex was included.
    pub collisions_before_core: usize,
}

impl ExplorationGraph {
    pub fn boundary(&self) -> &[u32] {
        self.levels.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Collisions per level, `l_1..l_k`.
    pub fn collisions_per_level(&self) -> Vec<usize> {
        let mut out = vec![0; self.k as usize];
        for c in &self.collisions {
            out[c.level as usize - 1] += 1;
        }
        out
    }
}

struct Recorder<'a> {
    core: Option<&'a CoreSet>,
    hit: Option<u32>,
    before: usize,
    collisions: Vec<Collision>,
}

impl Recorder<'_> {
    fn enter(&mut self, core_id: u32, level: u32) {
        if self.hit.is_none() && self.core.is_some_and(|c| c.contains(core_id)) {
            self.hit = Some(level);
            self.before = self.collisions.len();
        }
    }

    fn finish(self, root: u32, k: u32, levels: Vec<Vec<u32>>) -> ExplorationGraph {
        let before = if self.hit.is_some() { self.before } else { self.collisions.len() };
        ExplorationGraph {
            root,
            k,
            levels,
            collisions: self.collisions,
            hit_core: self.hit,
            collisions_before_core: before,
        }
    }
}

/// Reusable CM explorer; buffers are sized to the graph once.
pub struct CmExplorer<'g> {
    g: &'g MultiGraph,
    d_min: u32,
    seen: Marks,
    used: Marks,
}

impl<'g> CmExplorer<'g> {
    pub fn new(g: &'g MultiGraph) -> Self {
        let d_min = g.degrees().into_iter().min().unwrap_or(0);
        Self { g, d_min, seen: Marks::new(g.n()), used: Marks::new(g.ell()) }
    }

    pub fn with_d_min(mut self, d_min: u32) -> Self {
        self.d_min = d_min;
        self
    }

    /// k-exploration graph of `root`: the root pairs its first `d_min`
    /// half-edges, later vertices their first `d_min - 1` still unused ones,
    /// all in slot order. A half-edge landing on an explored vertex is a
    /// collision.
    pub fn explore(&mut self, root: u32, k: u32, core: Option<&CoreSet>) -> Result<ExplorationGraph> {
        let g = self.g;
        if root as usize >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: root as u64, n: g.n() as u64 });
        }
        self.seen.clear();
        self.used.clear();
        self.seen.set(root as usize);
        let mut rec = Recorder { core, hit: None, before: 0, collisions: Vec::new() };
        rec.enter(root, 0);
        let mut levels = vec![vec![root]];
        for level in 1..=k {
            let budget = if level == 1 { self.d_min } else { self.d_min.saturating_sub(1) };
            let mut next = Vec::new();
            for &x in &levels[level as usize - 1] {
                let mut taken = 0;
                for h in g.half_edges(x) {
                    if taken == budget {
                        break;
                    }
                    if self.used.get(h) {
                        continue;
                    }
                    taken += 1;
                    let p = g.partner(h);
                    self.used.set(h);
                    self.used.set(p);
                    let w = g.owner(p);
                    if self.seen.set(w as usize) {
                        rec.enter(w, level);
                        next.push(w);
                    } else {
                        rec.collisions.push(Collision { level, vertex: w });
                    }
                }
            }
            levels.push(next);
        }
        Ok(rec.finish(root, k, levels))
    }
}

/// One-off CM exploration; see [`CmExplorer::explore`].
pub fn explore_cm(
    g: &MultiGraph,
    root: u32,
    k: u32,
    core: Option<&CoreSet>,
) -> Result<ExplorationGraph> {
    CmExplorer::new(g).explore(root, k, core)
}

/// Reusable PAM explorer following out-edges in label order.
pub struct PamExplorer<'g> {
    g: &'g PamGraph,
    seen: Marks,
}

impl<'g> PamExplorer<'g> {
    pub fn new(g: &'g PamGraph) -> Self {
        Self { g, seen: Marks::new(g.t() as usize + 1) }
    }

    pub fn explore(&mut self, root: u32, k: u32, core: Option<&CoreSet>) -> Result<ExplorationGraph> {
        let g = self.g;
        if root == 0 || root > g.t() {
            return Err(Error::VertexOutOfRange { vertex: root as u64, n: g.t() as u64 });
        }
        self.seen.clear();
        self.seen.set(root as usize);
        let mut rec = Recorder { core, hit: None, before: 0, collisions: Vec::new() };
        rec.enter(root - 1, 0);
        let mut levels = vec![vec![root]];
        for level in 1..=k {
            let mut next = Vec::new();
            for &x in &levels[level as usize - 1] {
                for &y in g.out_edges(x) {
                    if self.seen.set(y as usize) {
                        rec.enter(y - 1, level);
                        next.push(y);
                    } else {
                        rec.collisions.push(Collision { level, vertex: y });
                    }
                }
            }
            levels.push(next);
        }
        Ok(rec.finish(root, k, levels))
    }
}

pub fn explore_pam(
    g: &PamGraph,
    root: u32,
    k: u32,
    core: Option<&CoreSet>,
) -> Result<ExplorationGraph> {
    PamExplorer::new(g).explore(root, k, core)
}

/// Guaranteed boundary size `ceil(s(m,l) m^k)` with `s(m,l) = m^{-1-l/(m-1)}`.
pub fn boundary_lower_bound(m: u32, l: u32, k: u32) -> Result<u64> {
    if m < 2 {
        return Err(invalid("m must be at least 2"));
    }
    let e = k as f64 - 1.0 - l as f64 / (m as f64 - 1.0);
    let x = (m as f64).powf(e);
    let r = x.round();
    Ok(if (x - r).abs() <= 1e-9 * r.max(1.0) { r as u64 } else { x.ceil() as u64 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectorQuery {
    pub a: Vec<u32>,
    pub i: u32,
    /// Labels `j > t/2` with an out-edge into `a` and an out-edge to `i`.
    pub connectors: Vec<u32>,
}

pub fn find_connectors(g: &PamGraph, a: &[u32], i: u32) -> Result<ConnectorQuery> {
    let half = g.t() / 2;
    if let Some(&bad) = a.iter().find(|&&x| x == 0 || x > half) {
        return Err(invalid(format!("vertex {bad} of A is not in [t/2]")));
    }
    if i == 0 || i > half || a.contains(&i) {
        return Err(invalid(format!("vertex {i} is not in [t/2] minus A")));
    }
    let mut in_a = vec![false; half as usize + 1];
    for &x in a {
        in_a[x as usize] = true;
    }
    let connectors = (half + 1..=g.t())
        .filter(|&j| {
            let out = g.out_edges(j);
            out.iter().any(|&y| y <= half && in_a[y as usize]) && out.contains(&i)
        })
        .collect();
    Ok(ConnectorQuery { a: a.to_vec(), i, connectors })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreDistances {
    /// Hop distance to the nearest core vertex, `INF` if unreachable.
    pub distances: Vec<u32>,
    pub max: Option<u32>,
    pub unreachable: usize,
}

impl CoreDistances {
    /// Fraction of vertices within `bound` of the core.
    pub fn fraction_within(&self, bound: u32) -> f64 {
        let ok = self.distances.iter().filter(|&&d| d <= bound).count();
        ok as f64 / self.distances.len().max(1) as f64
    }
}

/// Multi-source BFS from every core vertex.
pub fn distance_to_core(g: &MultiGraph, core: &CoreSet) -> Result<CoreDistances> {
    if core.is_empty() {
        return Err(Error::EmptyCore);
    }
    let distances = multi_source_bfs(g, &core.members)?;
    let max = distances.iter().copied().filter(|&d| d != INF).max();
    let unreachable = distances.iter().filter(|&&d| d == INF).count();
    Ok(CoreDistances { distances, max, unreachable })
}

/// Boundary vertices within `h` hops of the core. Ids follow the graph
/// `dist` was computed on.
pub fn count_successes(boundary: &[u32], dist: &CoreDistances, h: u32) -> usize {
    boundary.iter().filter(|&&x| dist.distances[x as usize] <= h).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pam::PamParams;

    fn k4() -> MultiGraph {
        MultiGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    /// 3-cube: 4-cycles everywhere, so depth-1 balls are stars and depth-2
    /// balls are not trees.
    fn cube() -> MultiGraph {
        let e = [
            (0, 1), (1, 3), (3, 2), (2, 0),
            (4, 5), (5, 7), (7, 6), (6, 4),
            (0, 4), (1, 5), (2, 6), (3, 7),
        ];
        MultiGraph::from_edges(8, &e).unwrap()
    }

    #[test]
    fn census_cm_small_cases() {
        // Every vertex of K_4 reaches three fresh degree-3 vertices; the
        // edges among them join depth-1 vertices and are not explored.
        assert_eq!(census_mkc_cm(&k4(), 1).unwrap().count, 4);
        assert_eq!(census_mkc_cm(&k4(), 2).unwrap().count, 0);
        let c0 = census_mkc_cm(&k4(), 0).unwrap();
        assert_eq!(c0.count, 4);
        let c = census_mkc_cm(&cube(), 1).unwrap();
        assert_eq!(c.count, 8);
        assert_eq!(c.i_k, 3);
        assert_eq!(census_mkc_cm(&cube(), 2).unwrap().count, 0);
    }

    #[test]
    fn cm_exploration_tree_and_self_loop() {
        let c = cube();
        let ex = explore_cm(&c, 0, 1, None).unwrap();
        assert!(ex.collisions.is_empty());
        assert_eq!(ex.boundary().len(), 3);
        let ex2 = explore_cm(&c, 0, 2, None).unwrap();
        assert_eq!(ex2.boundary().len() + ex2.collisions.len(), 3 * 2);

        let g = MultiGraph::from_edges(3, &[(0, 0), (0, 1), (1, 2), (1, 2), (2, 2)]).unwrap();
        let ex = explore_cm(&g, 0, 1, None).unwrap();
        assert_eq!(ex.collisions, vec![Collision { level: 1, vertex: 0 }]);
        assert_eq!(explore_cm(&g, 0, 2, None).unwrap(), explore_cm(&g, 0, 2, None).unwrap());
    }

    #[test]
    fn pam_exploration_recursion() {
        let p = PamParams::new(2, -0.5).unwrap();
        let g = crate::pam::generate_pam(p, 3000, 4).unwrap();
        for root in [3000, 2500, 1700] {
            let ex = explore_pam(&g, root, 6, None).unwrap();
            let l = ex.collisions_per_level();
            for i in 1..=6 {
                assert_eq!(ex.levels[i].len(), 2 * ex.levels[i - 1].len() - l[i - 1]);
            }
        }
    }

    #[test]
    fn boundary_bound_values() {
        assert_eq!(boundary_lower_bound(2, 3, 10).unwrap(), 64);
        assert_eq!(boundary_lower_bound(3, 0, 4).unwrap(), 27);
        assert_eq!(boundary_lower_bound(2, 0, 7).unwrap(), 64);
        assert!(boundary_lower_bound(1, 0, 3).is_err());
    }

    #[test]
    fn connectors() {
        let p = PamParams::new(2, -1.0).unwrap();
        let g = PamGraph::from_xi(p, vec![1, 1, 1, 2]).unwrap();
        assert!(find_connectors(&g, &[1], 1).is_err());
        assert!(find_connectors(&g, &[1], 2).is_err());
        let g = PamGraph::from_xi(p, vec![1, 1, 1, 2, 1, 2, 2, 1]).unwrap();
        let q = find_connectors(&g, &[1], 2).unwrap();
        assert_eq!(q.connectors, vec![3, 4]);
        assert!(find_connectors(&g, &[], 2).unwrap().connectors.is_empty());
    }

    #[test]
    fn core_distances() {
        let e: Vec<_> = (1..30).map(|i| (0, i)).collect();
        let g = MultiGraph::from_edges(30, &e).unwrap();
        let core = crate::metrics::extract_core_cm(&g, 2.5, 2.1).unwrap();
        let d = distance_to_core(&g, &core).unwrap();
        assert_eq!(d.max, Some(1));
        let all = crate::metrics::extract_core_cm(&k4(), 2.5, 2.01).unwrap();
        assert_eq!(all.len(), 4);
        assert_eq!(distance_to_core(&k4(), &all).unwrap().max, Some(0));
    }
}
