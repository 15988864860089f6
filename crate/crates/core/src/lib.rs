//! Configuration-model and preferential-attachment random graphs with
//! power-law degrees, the structural quantities that govern their
//! ultra-small distances, and the exact formulas and bounds used to check
//! simulations against theory.

pub mod bounds;
pub mod cm;
pub mod degree;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod pam;
pub mod params;
pub mod structure;

pub use bounds::{
    asymptotic_constants, cm_distance_bound, cm_growth_sequence, cm_mk_first_moment,
    cm_mk_second_moment_bound, eta_growth_check, i_k, pam_mkc_probability, pam_path_weight,
    size_biased_ccdf, truncated_mean_nu, AsymptoticConstants, DoublingParams, GrowthSequences,
    MkcTree, ModelKind,
};
pub use cm::{generate_cm, HalfEdge, PairingState};
pub use degree::{quantile_sequence, sample_iid_powerlaw, DegreeSequence, PowerLawSpec};
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, ExperimentResult, Measurement, ReplicaRow};
pub use graph::MultiGraph;
pub use metrics::{
    bfs, core_diameter, diameter, extract_core_cm, extract_core_pam, typical_distance_sample,
    CoreSet, Diameter, DiameterMethod,
};
pub use pam::{generate_pam, PamGraph, PamParams};
pub use params::ModelParams;
pub use structure::{
    boundary_lower_bound, census_mkc_cm, census_mkc_pam, distance_to_core, explore_cm,
    explore_pam, find_connectors, ExplorationGraph, MkcCensus,
};
