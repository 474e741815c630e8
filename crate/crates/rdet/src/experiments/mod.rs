//! Reproducible experiments built on the core kernels.

pub mod classify;
pub mod four_fifths;
pub mod sandwich;
pub mod sweep;
pub mod theorem_example;

use rdet_core::bounds::DetBounds;
use rdet_core::rational::format_fraction;
use serde::Serialize;

pub use classify::{classify, Classification, Thresholds, Verdict};
pub use four_fifths::{four_fifths_report, four_fifths_row, FourFifthsOptions, FourFifthsReport, FourFifthsRow};
pub use sandwich::{symbolic_sandwich, SandwichReport};
pub use sweep::{epsilon_sweep, Source, SweepEntry, SweepResult};
pub use theorem_example::{theorem_example_report, TheoremExampleOptions, TheoremExampleReport};

/// Exact determinism bounds with fractions rendered as `"num/den"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsSummary {
    pub t: u32,
    pub eps: String,
    /// `None` stands for a full period.
    pub m: Option<u64>,
    pub n_m: u64,
    pub n_circ_m: u64,
    pub n_1: u64,
    pub n_circ_1: u64,
    pub lower: String,
    pub upper: String,
    pub corr_lower: String,
    pub corr_upper: String,
    pub trivial: bool,
}

impl From<&DetBounds> for BoundsSummary {
    fn from(b: &DetBounds) -> Self {
        BoundsSummary {
            t: b.t,
            eps: format_fraction(&b.eps),
            m: b.m,
            n_m: b.n_m,
            n_circ_m: b.n_circ_m,
            n_1: b.n_1,
            n_circ_1: b.n_circ_1,
            lower: format_fraction(&b.lower),
            upper: format_fraction(&b.upper),
            corr_lower: format_fraction(&b.corr_lower()),
            corr_upper: format_fraction(&b.corr_upper()),
            trivial: b.trivial,
        }
    }
}
