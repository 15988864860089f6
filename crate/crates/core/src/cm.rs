//! Configuration model by uniform half-edge pairing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::degree::DegreeSequence;
use crate::error::{invalid, Error, Result};
use crate::graph::MultiGraph;

/// The `slot`-th half-edge of `vertex` (both 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge {
    pub vertex: u32,
    pub slot: u32,
}

const UNPAIRED: u32 = u32::MAX;

/// Partially built pairing.
///
/// Unpaired half-edges live in a compacted array with a position index, so a
/// uniform partner draw and its removal are both O(1).
#[derive(Debug, Clone)]
pub struct PairingState {
    offsets: Vec<usize>,
    degrees: Vec<u32>,
    unpaired: Vec<u32>,
    pos: Vec<u32>,
    partner: Vec<u32>,
    rng: ChaCha8Rng,
}

impl PairingState {
    pub fn new(seq: &DegreeSequence, seed: u64) -> Result<Self> {
        if seq.ell() % 2 == 1 {
            return Err(Error::OddTotalDegree(seq.ell()));
        }
        if seq.ell() >= UNPAIRED as u64 {
            return Err(invalid("too many half-edges for 32-bit ids"));
        }
        let mut offsets = Vec::with_capacity(seq.n() + 1);
        offsets.push(0);
        for &d in seq.degrees() {
            offsets.push(offsets.last().unwrap() + d as usize);
        }
        let ell = seq.ell() as usize;
        Ok(Self {
            offsets,
            degrees: seq.degrees().to_vec(),
            unpaired: (0..ell as u32).collect(),
            pos: (0..ell as u32).collect(),
            partner: vec![UNPAIRED; ell],
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn id(&self, h: HalfEdge) -> Result<usize> {
        let v = h.vertex as usize;
        if v >= self.degrees.len() {
            return Err(Error::VertexOutOfRange { vertex: v as u64, n: self.degrees.len() as u64 });
        }
        if h.slot >= self.degrees[v] {
            return Err(invalid(format!("slot {} exceeds degree of vertex {v}", h.slot)));
        }
        Ok(self.offsets[v] + h.slot as usize)
    }

    pub fn half_edge(&self, id: usize) -> HalfEdge {
        let v = self.offsets.partition_point(|&o| o <= id) - 1;
        HalfEdge { vertex: v as u32, slot: (id - self.offsets[v]) as u32 }
    }

    /// Ids of the half-edges not yet paired, in no particular order.
    pub fn unpaired(&self) -> &[u32] {
        &self.unpaired
    }

    pub fn is_unpaired(&self, id: usize) -> bool {
        self.partner[id] == UNPAIRED
    }

    pub fn partner_of(&self, id: usize) -> Option<usize> {
        match self.partner[id] {
            UNPAIRED => None,
            p => Some(p as usize),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.unpaired.is_empty()
    }

    fn remove(&mut self, id: usize) {
        let i = self.pos[id] as usize;
        let last = *self.unpaired.last().unwrap();
        self.unpaired.swap_remove(i);
        if last as usize != id {
            self.pos[last as usize] = i as u32;
        }
        self.pos[id] = UNPAIRED;
    }

    fn check_unpaired(&self, id: usize) -> Result<()> {
        if id >= self.partner.len() {
            return Err(invalid(format!("half-edge id {id} out of range")));
        }
        if !self.is_unpaired(id) {
            return Err(Error::AlreadyPaired(id));
        }
        Ok(())
    }

    /// Pairs `chosen` with a uniformly drawn other unpaired half-edge.
    pub fn pair_next(&mut self, chosen: HalfEdge) -> Result<HalfEdge> {
        let id = self.id(chosen)?;
        let p = self.pair_next_id(id)?;
        Ok(self.half_edge(p))
    }

    pub fn pair_next_id(&mut self, id: usize) -> Result<usize> {
        self.check_unpaired(id)?;
        if self.unpaired.len() < 2 {
            return Err(invalid("no unpaired half-edge left to pair with"));
        }
        self.remove(id);
        let j = self.rng.random_range(0..self.unpaired.len());
        let p = self.unpaired[j] as usize;
        self.remove(p);
        self.partner[id] = p as u32;
        self.partner[p] = id as u32;
        Ok(p)
    }

    /// Pairs two specific half-edges; used by enumeration drivers.
    pub fn pair_with(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(invalid("cannot pair a half-edge with itself"));
        }
        self.check_unpaired(a)?;
        self.check_unpaired(b)?;
        self.remove(a);
        self.remove(b);
        self.partner[a] = b as u32;
        self.partner[b] = a as u32;
        Ok(())
    }

    /// Pairs every remaining half-edge, always choosing the last unpaired one.
    pub fn complete(&mut self) {
        while let Some(&h) = self.unpaired.last() {
            self.pair_next_id(h as usize).expect("even number of half-edges");
        }
    }

    pub fn into_graph(self) -> Result<MultiGraph> {
        if !self.is_complete() {
            return Err(invalid("pairing is not complete"));
        }
        MultiGraph::from_matching(&self.degrees, self.partner)
    }
}

/// Uniform random pairing of all half-edges of `seq`.
pub fn generate_cm(seq: &DegreeSequence, seed: u64) -> Result<MultiGraph> {
    let mut st = PairingState::new(seq, seed)?;
    st.complete();
    st.into_graph()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(d: &[u32]) -> DegreeSequence {
        DegreeSequence::new(d.to_vec()).unwrap()
    }

    #[test]
    fn forced_pairings() {
        let g = generate_cm(&seq(&[1, 1]), 0).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        let g = generate_cm(&seq(&[2]), 0).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 0)]);
        assert_eq!(g.degree(0), 2);
    }

    #[test]
    fn odd_total_is_an_error() {
        assert!(matches!(generate_cm(&seq(&[1, 2]), 0), Err(Error::OddTotalDegree(3))));
    }

    #[test]
    fn pair_next_semantics() {
        let mut st = PairingState::new(&seq(&[1, 1]), 5).unwrap();
        let p = st.pair_next(HalfEdge { vertex: 0, slot: 0 }).unwrap();
        assert_eq!(p, HalfEdge { vertex: 1, slot: 0 });
        assert!(st.is_complete());
        assert!(matches!(
            st.pair_next(HalfEdge { vertex: 0, slot: 0 }),
            Err(Error::AlreadyPaired(0))
        ));
    }

    #[test]
    fn half_edge_ids_round_trip() {
        let st = PairingState::new(&seq(&[2, 3, 1]), 0).unwrap();
        for id in 0..6 {
            assert_eq!(st.id(st.half_edge(id)).unwrap(), id);
        }
        assert!(st.id(HalfEdge { vertex: 2, slot: 1 }).is_err());
    }

    #[test]
    fn self_loop_share_shrinks_with_n() {
        use crate::degree::{quantile_sequence, PowerLawSpec};
        let share = |n| {
            let s = quantile_sequence(PowerLawSpec { tau: 2.5, d_min: 3, n })
                .unwrap()
                .fix_parity();
            let loops: usize = (0..50).map(|i| generate_cm(&s, i).unwrap().self_loop_count()).sum();
            loops as f64 / (50.0 * s.ell() as f64 / 2.0)
        };
        assert!(share(10_000) < share(100));
    }
}
