//! Power-law degree sequences.
//!
//! The reference law is the discrete Pareto-type tail
//! `P(D > x) = (d_min / (x + 1))^(tau - 1)` for `x >= d_min - 1`, so that
//! `P(D = d_min) > 0` and the polynomial tail bounds hold on both sides.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Prescribed vertex degrees with cached totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<u32>,
    ell: u64,
    hist: BTreeMap<u32, u64>,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<u32>) -> Result<Self> {
        if let Some(i) = degrees.iter().position(|&d| d == 0) {
            return Err(invalid(format!("degree of vertex {} is zero", i + 1)));
        }
        let mut hist = BTreeMap::new();
        let mut ell = 0u64;
        for &d in &degrees {
            *hist.entry(d).or_insert(0) += 1;
            ell += d as u64;
        }
        Ok(Self { degrees, ell, hist })
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Total degree `ell_n`.
    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// Histogram `k -> n_k`.
    pub fn histogram(&self) -> &BTreeMap<u32, u64> {
        &self.hist
    }

    pub fn count(&self, k: u32) -> u64 {
        self.hist.get(&k).copied().unwrap_or(0)
    }

    pub fn d_min(&self) -> Option<u32> {
        self.hist.keys().next().copied()
    }

    pub fn d_max(&self) -> Option<u32> {
        self.hist.keys().next_back().copied()
    }

    pub fn mean(&self) -> f64 {
        if self.degrees.is_empty() {
            return 0.0;
        }
        self.ell as f64 / self.n() as f64
    }

    /// Empirical `1 - F_n(x)`, the fraction of vertices with degree above `x`.
    pub fn empirical_ccdf(&self, x: f64) -> f64 {
        if self.degrees.is_empty() {
            return 0.0;
        }
        let above: u64 = self
            .hist
            .iter()
            .filter(|(&k, _)| k as f64 > x)
            .map(|(_, &c)| c)
            .sum();
        above as f64 / self.n() as f64
    }

    /// Returns a copy with the last degree incremented when `ell_n` is odd.
    pub fn fix_parity(&self) -> Self {
        let mut d = self.degrees.clone();
        if self.ell % 2 == 1 {
            if let Some(last) = d.last_mut() {
                *last += 1;
            }
        }
        Self::new(d).expect("degrees stay positive")
    }

    pub fn read_from(reader: impl BufRead) -> Result<Self> {
        let mut out = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let s = line.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let d = s.parse::<u32>().map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            out.push(d);
        }
        Self::new(out)
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        for d in &self.degrees {
            writeln!(w, "{d}")?;
        }
        Ok(())
    }
}

/// Parameters of the reference power law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSpec {
    pub tau: f64,
    pub d_min: u32,
    pub n: usize,
}

impl PowerLawSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 2.0 && self.tau < 3.0) {
            return Err(invalid(format!("tau must lie in (2,3), got {}", self.tau)));
        }
        if self.d_min < 1 {
            return Err(invalid("d_min must be at least 1"));
        }
        Ok(())
    }

    /// `1 - F(x)` of the reference law.
    pub fn ccdf(&self, x: f64) -> f64 {
        let d = self.d_min as f64;
        if x < d - 1.0 {
            return 1.0;
        }
        (d / (x + 1.0)).powf(self.tau - 1.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.ccdf(x)
    }
}

/// Draws `n` i.i.d. degrees from the reference law.
///
/// Degrees beyond `u32::MAX` are clamped; this only matters for draws with
/// probability far below machine precision.
pub fn sample_iid_powerlaw(spec: PowerLawSpec, seed: u64) -> Result<DegreeSequence> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = spec.d_min as f64;
    let inv = -1.0 / (spec.tau - 1.0);
    let degrees = (0..spec.n)
        .map(|_| {
            let u: f64 = 1.0 - rng.random::<f64>();
            let x = (d * u.powf(inv)).ceil() - 1.0;
            x.max(d).min(u32::MAX as f64) as u32
        })
        .collect();
    DegreeSequence::new(degrees)
}

/// Deterministic sequence with `n_k = ceil(n F(k)) - ceil(n F(k-1))`,
/// emitted in nondecreasing order.
pub fn quantile_sequence(spec: PowerLawSpec) -> Result<DegreeSequence> {
    spec.validate()?;
    let n = spec.n;
    let mut degrees = Vec::with_capacity(n);
    let nf = n as f64;
    let mut k = spec.d_min;
    let mut prev = 0usize;
    while prev < n {
        let cum = ((nf * spec.cdf(k as f64)).ceil() as usize).clamp(prev, n);
        // Guard against floating-point stalls in the far tail.
        let cum = if k == u32::MAX { n } else { cum };
        degrees.extend(std::iter::repeat_n(k, cum - prev));
        prev = cum;
        k += 1;
    }
    DegreeSequence::new(degrees)
}

/// Finite-n diagnostic of the two-sided polynomial tail condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialReport {
    pub alpha: f64,
    /// Largest `c1` with `1 - F(x) >= c1 x^{-(tau-1+delta)}` for `1 <= x <= n^alpha`.
    pub c1_hat: f64,
    /// Smallest `c2` with `1 - F(x) <= c2 x^{-(tau-1-delta)}` for all `x >= 1`.
    pub c2_hat: f64,
    pub holds_lower: bool,
    pub holds_upper: bool,
}

pub fn check_polynomial_condition(
    seq: &DegreeSequence,
    tau: f64,
    delta: f64,
) -> Result<PolynomialReport> {
    if seq.is_empty() {
        return Err(Error::Empty("degree sequence"));
    }
    if !(delta > 0.0) {
        return Err(invalid("delta must be positive"));
    }
    let alpha = (1.0 / (tau - 1.0 + delta)).min(0.6);
    let n = seq.n() as f64;
    let lo_exp = tau - 1.0 + delta;
    let hi_exp = tau - 1.0 - delta;

    // 1 - F is constant on [x, x+1); the lower ratio is minimised at the left
    // end, the upper ratio is approached at the right end.
    let x_max_lower = n.powf(alpha).floor().max(1.0) as u64;
    let d_max = seq.d_max().unwrap_or(0) as u64;
    let mut c1 = f64::INFINITY;
    let mut c2: f64 = 0.0;
    let mut above = seq.n() as u64;
    let mut hist = seq.histogram().iter().peekable();
    let last = x_max_lower.max(d_max);
    for x in 1..=last {
        while let Some((&k, &c)) = hist.peek() {
            if k as u64 <= x {
                above -= c;
                hist.next();
            } else {
                break;
            }
        }
        let tail = above as f64 / n;
        if x <= x_max_lower {
            c1 = c1.min(tail * (x as f64).powf(lo_exp));
        }
        c2 = c2.max(tail * (x as f64 + 1.0).powf(hi_exp));
    }
    Ok(PolynomialReport {
        alpha,
        c1_hat: c1,
        c2_hat: c2,
        holds_lower: c1 > 0.0,
        holds_upper: c2.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize) -> PowerLawSpec {
        PowerLawSpec { tau: 2.5, d_min: 3, n }
    }

    #[test]
    fn empty_and_support() {
        assert!(sample_iid_powerlaw(spec(0), 1).unwrap().is_empty());
        let s = sample_iid_powerlaw(spec(100_000), 7).unwrap();
        assert_eq!(s.d_min(), Some(3));
    }

    #[test]
    fn iid_is_reproducible() {
        let a = sample_iid_powerlaw(spec(1000), 42).unwrap();
        let b = sample_iid_powerlaw(spec(1000), 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn iid_tail_exponent() {
        let s = sample_iid_powerlaw(spec(100_000), 3).unwrap();
        let xs: Vec<f64> = (10..=100).map(|x| x as f64).collect();
        let pts: Vec<(f64, f64)> = xs
            .iter()
            .map(|&x| (x.ln(), s.empirical_ccdf(x).ln()))
            .collect();
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let (mx, my) = (sx / m, sy / m);
        let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let var: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let tau_hat = 1.0 - cov / var;
        assert!((tau_hat - 2.5).abs() < 0.15, "tau_hat = {tau_hat}");
    }

    #[test]
    fn quantile_counts() {
        let a = quantile_sequence(spec(100)).unwrap();
        assert_eq!(a, quantile_sequence(spec(100)).unwrap());
        assert_eq!(a.n(), 100);
        assert!(a.degrees().windows(2).all(|w| w[0] <= w[1]));

        let b = quantile_sequence(spec(10_000)).unwrap();
        let f3 = 1.0 - 0.75f64.powf(1.5);
        assert!((b.count(3) as f64 / 1e4 - f3).abs() < 0.02);
    }

    #[test]
    fn quantile_mean_converges() {
        let mean = |n| quantile_sequence(spec(n)).unwrap().mean();
        let big = mean(1_000_000);
        assert!((mean(100_000) - big).abs() < (mean(1_000) - big).abs());
    }

    #[test]
    fn polynomial_condition() {
        let constant = DegreeSequence::new(vec![3; 50]).unwrap();
        let r = check_polynomial_condition(&constant, 2.5, 0.1).unwrap();
        assert!(r.holds_upper);
        assert!((r.c2_hat - 3f64.powf(1.5 - 0.1)).abs() < 1e-12);

        let q = quantile_sequence(spec(10_000)).unwrap();
        let r = check_polynomial_condition(&q, 2.5, 0.1).unwrap();
        assert!(r.holds_lower && r.holds_upper);

        let one = DegreeSequence::new(vec![4]).unwrap();
        let r = check_polynomial_condition(&one, 2.5, 0.1).unwrap();
        assert_eq!(r.c1_hat, 1.0);

        let empty = DegreeSequence::new(vec![]).unwrap();
        assert!(check_polynomial_condition(&empty, 2.5, 0.1).is_err());
    }

    #[test]
    fn parity_and_io() {
        let s = DegreeSequence::new(vec![1, 2, 2]).unwrap();
        assert_eq!(s.fix_parity().degrees(), &[1, 2, 3]);
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        assert_eq!(DegreeSequence::read_from(&buf[..]).unwrap(), s);
        assert!(DegreeSequence::new(vec![0]).is_err());
    }
}
