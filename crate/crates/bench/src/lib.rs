//! Shared fixtures for the criterion benches.

use ultrasmall::{generate_cm, generate_pam, quantile_sequence, MultiGraph, PamGraph, PamParams, PowerLawSpec};

/// CM graph on the quantile sequence with `tau = 2.5`, `d_min = 3`.
pub fn cm_fixture(n: usize, seed: u64) -> MultiGraph {
    let seq = quantile_sequence(PowerLawSpec { tau: 2.5, d_min: 3, n })
        .expect("valid spec")
        .fix_parity();
    generate_cm(&seq, seed).expect("even total degree")
}

/// PAM graph with `m = 2`, `delta = -1`.
pub fn pam_fixture(t: u32, seed: u64) -> PamGraph {
    generate_pam(PamParams::new(2, -1.0).expect("valid params"), t, seed).expect("valid t")
}
