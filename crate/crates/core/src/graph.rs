//! Undirected multigraph stored as paired half-edges.
//!
//! Vertex ids are 0-based in memory and 1-based in edge-list files.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Undirected multigraph with self-loops and parallel edges.
///
/// Half-edges of vertex `v` occupy the contiguous range
/// `offsets[v]..offsets[v + 1]`, in slot order. `partner[h]` is the half-edge
/// that `h` is matched with, and `nbr[h]` the vertex owning that partner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    offsets: Vec<usize>,
    partner: Vec<u32>,
    owner: Vec<u32>,
    nbr: Vec<u32>,
}

impl MultiGraph {
    /// Builds a graph from degrees and a perfect matching on the half-edges.
    pub fn from_matching(degrees: &[u32], partner: Vec<u32>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(degrees.len() + 1);
        offsets.push(0usize);
        for &d in degrees {
            offsets.push(offsets.last().unwrap() + d as usize);
        }
        let ell = *offsets.last().unwrap();
        if partner.len() != ell {
            return Err(Error::InvalidParameter(format!(
                "matching has {} entries, expected {ell}",
                partner.len()
            )));
        }
        let mut owner = vec![0u32; ell];
        for v in 0..degrees.len() {
            owner[offsets[v]..offsets[v + 1]].fill(v as u32);
        }
        for (h, &p) in partner.iter().enumerate() {
            let p = p as usize;
            if p >= ell || p == h || partner[p] as usize != h {
                return Err(Error::InvalidParameter(format!(
                    "half-edge {h} is not matched consistently"
                )));
            }
        }
        let nbr = partner.iter().map(|&p| owner[p as usize]).collect();
        Ok(Self { offsets, partner, owner, nbr })
    }

    /// Builds a graph from an edge list; slots are assigned in edge order.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut deg = vec![0u32; n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x as usize >= n {
                    return Err(Error::VertexOutOfRange { vertex: x as u64, n: n as u64 });
                }
                deg[x as usize] += 1;
            }
        }
        let mut next = Vec::with_capacity(n);
        let mut acc = 0usize;
        for &d in &deg {
            next.push(acc);
            acc += d as usize;
        }
        let mut partner = vec![0u32; acc];
        for &(u, v) in edges {
            let a = next[u as usize];
            next[u as usize] += 1;
            let b = next[v as usize];
            next[v as usize] += 1;
            partner[a] = b as u32;
            partner[b] = a as u32;
        }
        Self::from_matching(&deg, partner)
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of half-edges, `2 |E|`.
    pub fn ell(&self) -> usize {
        self.partner.len()
    }

    pub fn num_edges(&self) -> usize {
        self.partner.len() / 2
    }

    /// Degree of `v`; a self-loop contributes 2.
    pub fn degree(&self, v: u32) -> u32 {
        let v = v as usize;
        (self.offsets[v + 1] - self.offsets[v]) as u32
    }

    pub fn degrees(&self) -> Vec<u32> {
        (0..self.n() as u32).map(|v| self.degree(v)).collect()
    }

    /// Half-edge ids of `v` in slot order.
    pub fn half_edges(&self, v: u32) -> std::ops::Range<usize> {
        self.offsets[v as usize]..self.offsets[v as usize + 1]
    }

    /// Neighbours of `v` in slot order, with multiplicity.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.nbr[self.half_edges(v)]
    }

    pub fn partner(&self, h: usize) -> usize {
        self.partner[h] as usize
    }

    pub fn owner(&self, h: usize) -> u32 {
        self.owner[h]
    }

    /// Edges as vertex pairs, each listed once, ordered by lower half-edge id.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(h, &p)| h < p as usize)
            .map(|(h, &p)| (self.owner[h], self.owner[p as usize]))
    }

    pub fn self_loop_count(&self) -> usize {
        self.edges().filter(|(u, v)| u == v).count()
    }

    pub fn write_edge_list(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "# n {}", self.n())?;
        for (u, v) in self.edges() {
            writeln!(w, "{} {}", u + 1, v + 1)?;
        }
        Ok(())
    }

    /// Reads `u v` lines with 1-based ids. A `# n N` header fixes the vertex
    /// count so isolated vertices survive a round trip.
    pub fn read_edge_list(reader: impl BufRead) -> Result<Self> {
        let mut edges = Vec::new();
        let mut n_header: Option<usize> = None;
        let mut n_seen = 0usize;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let s = line.trim();
            if let Some(rest) = s.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                if it.next() == Some("n") {
                    n_header = it.next().and_then(|x| x.parse().ok());
                }
                continue;
            }
            if s.is_empty() {
                continue;
            }
            let parse = |tok: Option<&str>| -> Result<u32> {
                let x: u32 = tok
                    .ok_or_else(|| Error::Parse { line: i + 1, msg: "expected two ids".into() })?
                    .parse()
                    .map_err(|e: std::num::ParseIntError| Error::Parse {
                        line: i + 1,
                        msg: e.to_string(),
                    })?;
                if x == 0 {
                    return Err(Error::Parse { line: i + 1, msg: "ids are 1-based".into() });
                }
                Ok(x - 1)
            };
            let mut it = s.split_whitespace();
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            n_seen = n_seen.max(u as usize + 1).max(v as usize + 1);
            edges.push((u, v));
        }
        let n = n_header.unwrap_or(n_seen).max(n_seen);
        Self::from_edges(n, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_and_edges() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (1, 1), (1, 2), (0, 1)]).unwrap();
        assert_eq!(g.degrees(), vec![2, 5, 1]);
        assert_eq!(g.num_edges(), 4);
        assert_eq!(g.self_loop_count(), 1);
        assert_eq!(g.neighbors(1), &[0, 1, 1, 2, 0]);
        let total: u32 = g.degrees().iter().sum();
        assert_eq!(total as usize, 2 * g.num_edges());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = MultiGraph::from_edges(5, &[(0, 1), (2, 2), (1, 3)]).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("3 3"));
        let h = MultiGraph::read_edge_list(&buf[..]).unwrap();
        assert_eq!(h.n(), 5);
        assert_eq!(h.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(MultiGraph::from_edges(2, &[(0, 2)]).is_err());
        assert!(MultiGraph::read_edge_list(&b"0 1\n"[..]).is_err());
        assert!(MultiGraph::from_matching(&[2], vec![0, 1]).is_err());
    }
}
