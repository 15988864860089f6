//! Closed-form quantities and bounds evaluated numerically.
//!
//! Products with many factors are accumulated in log space.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degree::DegreeSequence;
use crate::error::{invalid, Error, Result};
use crate::pam::PamParams;
use crate::params::{round_half_up, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Cm,
    Pam,
}

/// Size of the minimal depth-`k` tree: its edge count for CM
/// (`sum_{l=1}^k d (d-1)^{l-1}`), its vertex count for PAM
/// (`sum_{i=0}^k m^i`).
pub fn i_k(model: ModelKind, d: u32, k: u32) -> Result<u64> {
    let overflow = || Error::Domain(format!("i_k overflows for d={d}, k={k}"));
    match model {
        ModelKind::Cm => {
            if d < 2 {
                return Err(invalid("d_min must be at least 2"));
            }
            let mut total = 0u64;
            let mut term = d as u64;
            for _ in 0..k {
                total = total.checked_add(term).ok_or_else(overflow)?;
                term = term.checked_mul(d as u64 - 1).ok_or_else(overflow)?;
            }
            Ok(total)
        }
        ModelKind::Pam => {
            if d < 1 {
                return Err(invalid("m must be at least 1"));
            }
            let mut total = 0u64;
            let mut term = 1u64;
            for _ in 0..=k {
                total = total.checked_add(term).ok_or_else(overflow)?;
                term = term.checked_mul(d as u64).ok_or_else(overflow)?;
            }
            Ok(total)
        }
    }
}

fn i_k_f64(d: u32, k: u32) -> f64 {
    let d = d as f64;
    (1..=k).map(|l| d * (d - 1.0).powi(l as i32 - 1)).sum()
}

fn min_degree_stats(seq: &DegreeSequence) -> Result<(u32, u64, f64)> {
    let d = seq.d_min().ok_or(Error::Empty("degree sequence"))?;
    if d < 2 {
        return Err(invalid("d_min must be at least 2"));
    }
    Ok((d, seq.count(d), seq.ell() as f64))
}

/// Expected number of minimally-k-connected vertices in CM.
pub fn cm_mk_first_moment(seq: &DegreeSequence, k: u32) -> Result<f64> {
    let (d, nd, ell) = min_degree_stats(seq)?;
    let ik = i_k(ModelKind::Cm, d, k)?;
    if nd <= ik {
        return Ok(0.0);
    }
    if ell <= 2.0 * ik as f64 {
        return Err(Error::Domain(format!("l_n = {ell} must exceed 2 i_k = {}", 2 * ik)));
    }
    let (df, ndf) = (d as f64, nd as f64);
    let log_prod: f64 = (1..=ik)
        .map(|i| {
            let i = i as f64;
            df.ln() + (ndf - i).ln() - (ell - 2.0 * i + 1.0).ln()
        })
        .sum();
    Ok((ndf.ln() + log_prod).exp())
}

/// Upper bound on the second moment of `M_k`; requires `l_n > 4 i_k`.
pub fn cm_mk_second_moment_bound(seq: &DegreeSequence, k: u32) -> Result<f64> {
    let (d, nd, ell) = min_degree_stats(seq)?;
    let ik = i_k_f64(d, k);
    if ell <= 4.0 * ik {
        return Err(Error::Domain(format!("l_n = {ell} must exceed 4 i_k = {}", 4.0 * ik)));
    }
    let e = cm_mk_first_moment(seq, k)?;
    let i2k = i_k_f64(d, 2 * k);
    Ok(e * e + e * ((ik + 1.0) + i2k * d as f64 * nd as f64 / (ell - 4.0 * ik)))
}

fn ell_of(seq: &DegreeSequence) -> Result<f64> {
    match seq.ell() {
        0 => Err(Error::Empty("degree sequence has no half-edges")),
        l => Ok(l as f64),
    }
}

/// `1 - F*_n(x)`: share of half-edges attached to vertices of degree `> x`.
pub fn size_biased_ccdf(seq: &DegreeSequence, x: f64) -> Result<f64> {
    let ell = ell_of(seq)?;
    let s: u64 = seq.histogram().range(..).filter(|(&d, _)| d as f64 > x).map(|(&d, &c)| d as u64 * c).sum();
    Ok(s as f64 / ell)
}

/// `nu_n(x) = (1/l_n) sum_v d_v (d_v - 1) 1{d_v <= x}`.
pub fn truncated_mean_nu(seq: &DegreeSequence, x: f64) -> Result<f64> {
    let ell = ell_of(seq)?;
    let s: f64 = seq
        .histogram()
        .iter()
        .filter(|(&d, _)| d as f64 <= x)
        .map(|(&d, &c)| d as f64 * (d as f64 - 1.0) * c as f64)
        .sum();
    Ok(s / ell)
}

/// `g_k = g_0^{p^k}` for `k < len`, with `g_0 = (log n)^{log log n}` and
/// `p = 1/(tau - 2 - 2 eta)`. Entries overflow to infinity for large `k`.
pub fn cm_growth_sequence(n: u64, tau: f64, eta: f64, len: usize) -> Result<Vec<f64>> {
    if !(tau > 2.0 && tau < 3.0) {
        return Err(invalid(format!("tau = {tau} outside (2,3)")));
    }
    if !(eta > 0.0 && 2.0 * eta < tau - 2.0) {
        return Err(invalid(format!("eta = {eta} must satisfy 0 < 2 eta < tau - 2")));
    }
    if n < 16 {
        return Err(invalid("n too small for log log n > 1"));
    }
    let ln = (n as f64).ln();
    let log_g0 = ln.ln() * ln.ln();
    let p = 1.0 / (tau - 2.0 - 2.0 * eta);
    Ok((0..len).map(|k| (log_g0 * p.powi(k as i32)).exp()).collect())
}

/// Right-hand side of the CM path-counting bound on
/// `P(dist(a,b) <= 2 k_bar)` for vertices of degrees `d_a`, `d_b`.
/// `g` must hold `g_0..=g_{2 k_bar}`.
pub fn cm_distance_bound(seq: &DegreeSequence, d_a: u32, d_b: u32, k_bar: u32, g: &[f64]) -> Result<f64> {
    if k_bar == 0 {
        return Ok(0.0);
    }
    let ell = ell_of(seq)?;
    let kk = 2 * k_bar as usize;
    if g.len() <= kk {
        return Err(invalid(format!("need {} growth terms, got {}", kk + 1, g.len())));
    }
    if d_a as f64 > g[0] || d_b as f64 > g[0] {
        return Err(invalid("endpoint degrees must not exceed g_0"));
    }
    if ell <= 4.0 * k_bar as f64 {
        return Err(Error::Domain(format!("k_bar = {k_bar} infeasible for l_n = {ell}")));
    }
    let nu: Vec<f64> = g.iter().map(|&x| truncated_mean_nu(seq, x)).collect::<Result<_>>()?;
    let nu_min = |a: usize, b: usize| if g[a] <= g[b] { nu[a] } else { nu[b] };
    let inflate = |k: usize| (1.0 - 2.0 * k as f64 / ell).powi(-(k as i32));

    let mut good = 0.0;
    for k in 1..=kk {
        let prod: f64 = (1..k).map(|l| nu_min(l, k - l)).product();
        good += inflate(k) * prod;
    }
    let mut bad = 0.0;
    for k in 1..=k_bar as usize {
        let prod: f64 = (1..k).map(|l| nu[l]).product();
        bad += inflate(k) * size_biased_ccdf(seq, g[k])? * prod;
    }
    Ok(d_a as f64 * d_b as f64 / ell * good + (d_a + d_b) as f64 * bad)
}

/// `prod_i C m / ((pi_i ^ pi_{i+1})^gamma (pi_i v pi_{i+1})^{1-gamma})`
/// over consecutive labels of a path of distinct vertices.
pub fn pam_path_weight(path: &[u32], c: f64, m: u32, gamma: f64) -> Result<f64> {
    if path.len() < 2 {
        return Err(invalid("path needs at least two vertices"));
    }
    let mut sorted = path.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("path repeats a vertex"));
    }
    if sorted[0] == 0 {
        return Err(invalid("labels are 1-based"));
    }
    let cm = c * m as f64;
    Ok(path
        .windows(2)
        .map(|w| {
            let (lo, hi) = (w[0].min(w[1]) as f64, w[0].max(w[1]) as f64);
            cm / (lo.powf(gamma) * hi.powf(1.0 - gamma))
        })
        .product())
}

/// Recursive sequences `g_k`, `alpha_k`, `beta_k` controlling path weights
/// from old vertices in PAM, together with the constant `c` they use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSequences {
    pub t: u64,
    pub r: f64,
    pub gamma: f64,
    /// Fitted constant of the summation lemma.
    pub c: f64,
    /// `g[k]` for `k = 0..=k_max`.
    pub g: Vec<u64>,
    /// `alpha[k]` for `k = 1..=k_max`; index 0 is unused.
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Some `g_k` (`k >= 1`) fell below 2 and was clamped to 1.
    pub degenerate: bool,
}

/// Smallest ratio `c` making the summation lemma hold for cut-off `g`.
fn summation_constant(t: u64, r: f64, gamma: f64, g: u64) -> f64 {
    let log_tg = (t as f64 / g as f64).ln();
    let (mut h_all, mut h_lower, mut s_up, mut s_down) = (0.0, 0.0, 0.0, 0.0);
    for n in g..=t {
        let x = n as f64;
        h_all += 1.0 / x;
        if n < t {
            h_lower += 1.0 / x;
        }
        s_up += x.powf(2.0 * gamma - 2.0);
        s_down += x.powf(-2.0 * gamma);
    }
    let c1 = (h_all / log_tg).max(s_up / (t as f64).powf(2.0 * gamma - 1.0));
    let c2 = (s_down / (g as f64).powf(1.0 - 2.0 * gamma)).max(h_lower / log_tg);
    r * c1.max(c2)
}

fn sequences_with_c(t: u64, r: f64, gamma: f64, k_max: u32, c: f64) -> Result<GrowthSequences> {
    let tf = t as f64;
    let lt = tf.ln();
    let g0 = (tf / (lt * lt)).ceil() as u64;
    let mut g = vec![g0];
    let mut alpha = vec![f64::NAN, r * (g0 as f64).powf(gamma - 1.0)];
    let mut beta = vec![f64::NAN, r * (g0 as f64).powf(-gamma)];
    let mut degenerate = false;
    for k in 1..=k_max as usize {
        let target = 6.0 / (PI * PI * (k * k) as f64 * lt * lt);
        let raw = (target * (1.0 - gamma) / alpha[k]).powf(1.0 / (1.0 - gamma));
        let mut gk = raw.ceil().max(1.0) as u64;
        // Guard against the ceiling landing one above due to rounding.
        if gk > 1 && alpha[k] * ((gk - 1) as f64).powf(1.0 - gamma) / (1.0 - gamma) >= target {
            gk -= 1;
        }
        if gk < 2 {
            degenerate = true;
        }
        if gk >= t {
            return Err(Error::Domain(format!("g_{k} = {gk} reaches t = {t}")));
        }
        g.push(gk);
        if k < k_max as usize {
            let log_tg = (tf / gk as f64).ln();
            alpha.push(c * (alpha[k] * log_tg + beta[k] * tf.powf(2.0 * gamma - 1.0)));
            beta.push(c * (alpha[k] * (gk as f64).powf(1.0 - 2.0 * gamma) + beta[k] * log_tg));
        }
    }
    Ok(GrowthSequences { t, r, gamma, c, g, alpha, beta, degenerate })
}

impl GrowthSequences {
    /// Builds the sequences up to `k_max`, fitting `c` as the least fixed
    /// point of "c covers every cut-off the recursion uses".
    pub fn new(t: u64, r: f64, gamma: f64, k_max: u32) -> Result<Self> {
        if t < 4 {
            return Err(invalid("t must be at least 4"));
        }
        if !(gamma > 0.5 && gamma < 1.0) {
            return Err(invalid(format!("gamma = {gamma} outside (1/2,1)")));
        }
        if !(r > 0.0) {
            return Err(invalid("R must be positive"));
        }
        if k_max == 0 {
            return Err(invalid("k_max must be at least 1"));
        }
        let mut c = 1.0f64;
        for _ in 0..200 {
            let s = sequences_with_c(t, r, gamma, k_max, c)?;
            let needed = s.g[1..k_max as usize]
                .iter()
                .map(|&g| summation_constant(t, r, gamma, g))
                .fold(1.0, f64::max);
            if needed <= c {
                return Ok(s);
            }
            c = needed;
        }
        Err(Error::Domain("constant c did not stabilise".into()))
    }

    pub fn k_max(&self) -> u32 {
        self.alpha.len() as u32 - 1
    }

    /// `alpha_k l^{-gamma} + 1{l > g_{k-1}} beta_k l^{gamma-1}`.
    pub fn f_bound(&self, k: u32, l: u64) -> f64 {
        let k = k as usize;
        let lf = l as f64;
        let tail = if l > self.g[k - 1] { self.beta[k] * lf.powf(self.gamma - 1.0) } else { 0.0 };
        self.alpha[k] * lf.powf(-self.gamma) + tail
    }

    /// `f_{k,t}(x, .)` for `k = 1..=k_max`, as vectors indexed by `l - 1`.
    pub fn f_exact_all(&self, x: u64) -> Result<Vec<Vec<f64>>> {
        let t = self.t as usize;
        if x == 0 || x > self.t {
            return Err(Error::VertexOutOfRange { vertex: x, n: self.t });
        }
        let gm = self.gamma;
        let up: Vec<f64> = (1..=t).map(|n| (n as f64).powf(gm - 1.0)).collect();
        let down: Vec<f64> = (1..=t).map(|n| (n as f64).powf(-gm)).collect();
        let r = self.r;
        let p = |a: usize, b: usize| r * down[a.min(b) - 1] * up[a.max(b) - 1];
        let first: Vec<f64> = if x >= self.g[0] {
            (1..=t).map(|l| p(x as usize, l)).collect()
        } else {
            vec![0.0; t]
        };
        let mut out = vec![first];
        for k in 1..self.k_max() as usize {
            let prev = &out[k - 1];
            let g = self.g[k] as usize;
            // below[w] = sum_{g <= z < w} f(z) z^{-gamma}
            // above[w] = sum_{z >= max(w, g)} f(z) z^{gamma-1}
            let mut above = vec![0.0; t + 2];
            for z in (1..=t).rev() {
                let term = if z >= g { prev[z - 1] * up[z - 1] } else { 0.0 };
                above[z] = above[z + 1] + term;
            }
            let mut next = vec![0.0; t];
            let mut below = 0.0;
            for w in 1..=t {
                next[w - 1] = r * (up[w - 1] * below + down[w - 1] * above[w]);
                if w >= g {
                    below += prev[w - 1] * down[w - 1];
                }
            }
            out.push(next);
        }
        Ok(out)
    }

    /// `f_{k,t}(x, l)` by the recursion.
    pub fn f_exact(&self, x: u64, l: u64, k: u32) -> Result<f64> {
        if k == 0 || k > self.k_max() {
            return Err(invalid(format!("k must lie in 1..={}", self.k_max())));
        }
        if l == 0 || l > self.t {
            return Err(Error::VertexOutOfRange { vertex: l, n: self.t });
        }
        Ok(self.f_exact_all(x)?[k as usize - 1][l as usize - 1])
    }

    /// Checks `f_exact <= f_bound` for every `x >= g_0`, `l`, `k`, allowing
    /// relative slack `rel_tol`. Returns the violations found.
    pub fn bound_violations(&self, rel_tol: f64) -> Result<Vec<(u64, u64, u32)>> {
        let bound: Vec<Vec<f64>> = (1..=self.k_max())
            .map(|k| (1..=self.t).map(|l| self.f_bound(k, l) * (1.0 + rel_tol)).collect())
            .collect();
        let xs: Vec<u64> = (self.g[0]..=self.t).collect();
        let per_x: Vec<Vec<(u64, u64, u32)>> = xs
            .par_iter()
            .map(|&x| {
                let f = self.f_exact_all(x)?;
                let mut bad = Vec::new();
                for (ki, row) in f.iter().enumerate() {
                    let k = ki as u32 + 1;
                    for (li, (&v, &b)) in row.iter().zip(&bound[ki]).enumerate() {
                        if v > b {
                            bad.push((x, li as u64 + 1, k));
                        }
                    }
                }
                Ok(bad)
            })
            .collect::<Result<_>>()?;
        Ok(per_x.into_iter().flatten().collect())
    }

    /// `eta_k = t / g_k`.
    pub fn eta(&self) -> Vec<f64> {
        self.g.iter().map(|&g| self.t as f64 / g as f64).collect()
    }

    /// Smallest `C` with `eta_{k+2}^{1-gamma} <= C (eta_k^gamma +
    /// eta_{k+1}^{1-gamma} log eta_{k+1})` along the computed sequence.
    pub fn eta_recursion_constant(&self) -> Option<f64> {
        let e = self.eta();
        let gm = self.gamma;
        e.windows(3)
            .map(|w| w[2].powf(1.0 - gm) / (w[0].powf(gm) + w[1].powf(1.0 - gm) * w[1].ln()))
            .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
    }
}

/// Whether `eta_k <= exp(B loglog t kappa^{k/2})` for `k <= k_max`, with
/// `kappa = gamma / (1 - gamma)`.
pub fn eta_growth_check(seq: &GrowthSequences, b: f64, k_max: u32) -> Result<bool> {
    let kappa = seq.gamma / (1.0 - seq.gamma);
    if kappa <= 1.0 {
        return Err(invalid("kappa must exceed 1"));
    }
    let lll = (seq.t as f64).ln().ln();
    let eta = seq.eta();
    if k_max as usize >= eta.len() {
        return Err(invalid(format!("sequences only reach k = {}", eta.len() - 1)));
    }
    Ok((0..=k_max as usize).all(|k| eta[k] <= (b * lll * kappa.powf(k as f64 / 2.0)).exp()))
}

/// Labelled directed tree describing a candidate ball `U_{<=k}(v)` in PAM:
/// `children[u]` lists the targets of `u`'s out-edges `j = 1..m` in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MkcTree {
    pub root: u32,
    /// `(vertex, ordered children)` for every vertex at depth `< k`.
    pub children: Vec<(u32, Vec<u32>)>,
}

impl MkcTree {
    pub fn singleton(root: u32) -> Self {
        Self { root, children: vec![] }
    }

    /// Every vertex with its parent (`None` for the root) and depth.
    fn layout(&self) -> Result<Vec<(u32, Option<u32>, u32)>> {
        let mut out = vec![(self.root, None, 0u32)];
        let mut i = 0;
        while i < out.len() {
            let (u, _, depth) = out[i];
            if let Some((_, kids)) = self.children.iter().find(|(w, _)| *w == u) {
                for &c in kids {
                    out.push((c, Some(u), depth + 1));
                }
            }
            i += 1;
        }
        if out.len() != 1 + self.children.iter().map(|(_, c)| c.len()).sum::<usize>() {
            return Err(Error::Inadmissible("children lists do not form a tree on the root".into()));
        }
        Ok(out)
    }
}

/// Probability that `H.root` is minimally-k-connected in `PA_t` with ball
/// exactly `H`, as the product of the attachment factors (`L_1`) and the
/// avoidance factors (`L_2`).
///
/// Avoidance at step `(u, j)` for a leaf `u` of `H` includes `u`'s own
/// attachment weight `j (1 + delta/m)`, since a self-loop would also raise
/// its degree. Steps before `min(H)` contribute 1 and are skipped.
pub fn pam_mkc_probability(params: PamParams, t: u32, h: &MkcTree) -> Result<f64> {
    params.validate()?;
    let m = params.m;
    let (half, quarter) = (t / 2, t / 4);
    let nodes = h.layout()?;
    let mut labels: Vec<u32> = nodes.iter().map(|n| n.0).collect();
    labels.sort_unstable();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Inadmissible("repeated vertex".into()));
    }
    if h.root <= half || h.root > t {
        return Err(Error::Inadmissible(format!("root {} not in (t/2, t]", h.root)));
    }
    if let Some(&(u, _, _)) = nodes[1..].iter().find(|n| n.0 <= quarter || n.0 > half) {
        return Err(Error::Inadmissible(format!("vertex {u} not in (t/4, t/2]")));
    }
    let k = nodes.iter().map(|n| n.2).max().unwrap_or(0);
    let interior: Vec<u32> = nodes.iter().filter(|n| n.2 < k).map(|n| n.0).collect();
    for &u in &interior {
        let kids = h.children.iter().find(|(w, _)| *w == u).map(|(_, c)| c.as_slice()).unwrap_or(&[]);
        if kids.len() != m as usize {
            return Err(Error::Inadmissible(format!("vertex {u} needs exactly {m} children")));
        }
        if kids.iter().any(|&c| c >= u) {
            return Err(Error::Inadmissible(format!("vertex {u} points to a younger vertex")));
        }
    }
    if h.children.iter().any(|(u, c)| !c.is_empty() && !interior.contains(u)) {
        return Err(Error::Inadmissible("leaves must have no listed children".into()));
    }

    let delta = params.delta;
    let mf = m as f64;
    let mut log_p = 0.0;
    for &u in &interior {
        for j in 1..=m {
            log_p += ((mf + delta) / params.normalizer(u as u64, j)).ln();
        }
    }
    let in_tree = |u: u32| labels.binary_search(&u).is_ok();
    let min_h = labels[0];
    for u in min_h..=t {
        if interior.contains(&u) {
            continue;
        }
        // Weight of the older part of H just before step u.
        let mut weight = 0.0;
        for &(w, parent, _) in &nodes {
            if w < u {
                let deg = mf + if parent.is_some_and(|p| p < u) { 1.0 } else { 0.0 };
                weight += deg + delta;
            }
        }
        let own = in_tree(u);
        for j in 1..=m {
            let self_term = if own { j as f64 * (1.0 + delta / mf) } else { 0.0 };
            let q = 1.0 - (weight + self_term) / params.normalizer(u as u64, j);
            if q <= 0.0 {
                return Ok(0.0);
            }
            log_p += q.ln();
        }
    }
    Ok(log_p.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    pub tau: f64,
    pub d_fwd: u32,
    pub c_dist: u32,
    pub diam_constant: f64,
    pub typ_constant: f64,
}

pub fn asymptotic_constants(params: &ModelParams) -> Result<AsymptoticConstants> {
    params.validate()?;
    let tau = params.tau();
    let d_fwd = params.d_fwd();
    if d_fwd < 2 {
        return Err(invalid("forward degree must be at least 2"));
    }
    let c_dist = params.c_dist();
    let typ = 2.0 * c_dist as f64 / (tau - 2.0).ln().abs();
    Ok(AsymptoticConstants {
        tau,
        d_fwd,
        c_dist,
        diam_constant: 2.0 / (d_fwd as f64).ln() + typ,
        typ_constant: typ,
    })
}

fn loglog(n: u64) -> f64 {
    (n as f64).ln().ln()
}

impl AsymptoticConstants {
    /// `(1 - eps) loglog n / log d_fwd`, rounded half up.
    pub fn k_minus(&self, n: u64, eps: f64) -> i64 {
        round_half_up((1.0 - eps) * loglog(n) / (self.d_fwd as f64).ln())
    }

    pub fn k_plus(&self, n: u64, eps: f64) -> i64 {
        round_half_up((1.0 + eps) * loglog(n) / (self.d_fwd as f64).ln())
    }

    /// `(1 - eps) c_dist loglog n / |log(tau - 2)|`, rounded half up.
    pub fn k_bar(&self, n: u64, eps: f64) -> i64 {
        round_half_up((1.0 - eps) * self.c_dist as f64 * loglog(n) / (self.tau - 2.0).ln().abs())
    }

    /// `ceil(B logloglog n + C)`.
    pub fn h(n: u64, b: f64, c: f64) -> i64 {
        (b * loglog(n).ln() + c).ceil() as i64
    }
}

/// Doubling-sequence parameters: growth rate `gamma_d`, slack `zeta` and
/// core exponent `sigma`, giving `B = 1/gamma_d`, `C = log(sigma / log 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingParams {
    pub gamma_d: f64,
    pub zeta: f64,
    pub sigma: f64,
}

impl DoublingParams {
    pub fn new(gamma_d: f64, zeta: f64, sigma: f64) -> Self {
        Self { gamma_d, zeta, sigma }
    }

    /// `gamma_d = zeta = 0.05`.
    pub fn default_for(sigma: f64) -> Self {
        Self::new(0.05, 0.05, sigma)
    }

    /// Largest `gamma_d` on a 0.01 grid keeping `xi >= 0.01`.
    pub fn largest_on_grid(tau: f64, zeta: f64, sigma: f64) -> Result<Self> {
        (1..=500)
            .rev()
            .map(|i| Self::new(i as f64 * 0.01, zeta, sigma))
            .find(|p| p.xi(tau) >= 0.01)
            .ok_or_else(|| invalid(format!("no feasible gamma_d for tau={tau}, zeta={zeta}")))
    }

    /// `1 - e^{gamma_d} (tau - 2 + zeta)`.
    pub fn xi(&self, tau: f64) -> f64 {
        1.0 - self.gamma_d.exp() * (tau - 2.0 + self.zeta)
    }

    pub fn b(&self) -> f64 {
        1.0 / self.gamma_d
    }

    pub fn c(&self) -> f64 {
        (self.sigma / 2f64.ln()).ln()
    }

    pub fn h(&self, n: u64) -> i64 {
        AsymptoticConstants::h(n, self.b(), self.c())
    }
}
