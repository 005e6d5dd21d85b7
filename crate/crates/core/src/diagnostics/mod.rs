//! Ω tables, cluster scans, summability, norm bounds, the exponential-weight constants,
//! the non-Arens witness and the classifier.

mod bounds;
mod classify;
mod cluster;
mod exponential;
mod omega;
mod summability;
mod sun;

pub use bounds::{multiplication_norm_bound, t2_upper_bound, Constituent, Decomposition, NormBound, Route};
pub use classify::{classify, recheck, CertificateLink, Classification, RecheckOutcome, Verdict, VerdictTier};
pub use cluster::{cluster_scan, non_arens_witness, ClusterScanResult, ClusterVerdict, PairWitness};
pub use exponential::{
    exp_lemma_constants, exp_modified_weight_check, ExpLemmaConstants, ModifiedWeightCheck, CUBE_SIDE_CAP,
};
pub use omega::{omega, omega_f64, omega_table, OmegaTable};
pub use summability::{two_summability, SummabilityStatus, TailBound, TwoSummability};
pub use sun::{calibrate_c2, su_n_omega_bound, C2Calibration};

use serde::Serialize;

use crate::measures::DEFAULT_TOLERANCE;

/// Published upper bound for the real Grothendieck constant.
pub const DEFAULT_KG: f64 = 1.7822140;

/// Default Ω threshold for the cluster scan.
pub const DEFAULT_CLUSTER_THRESHOLD: f64 = 1e-2;

/// Report schema version.
pub const REPORT_SCHEMA: &str = "hyplab-report/1";

/// Constants shared by the diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct DiagConfig {
    #[serde(rename = "K_G")]
    pub k_g: f64,
    #[serde(rename = "C_n")]
    pub c_n: Option<f64>,
    pub tolerance: f64,
    pub cluster_threshold: f64,
}

impl Default for DiagConfig {
    fn default() -> Self {
        DiagConfig {
            k_g: DEFAULT_KG,
            c_n: None,
            tolerance: DEFAULT_TOLERANCE,
            cluster_threshold: DEFAULT_CLUSTER_THRESHOLD,
        }
    }
}
