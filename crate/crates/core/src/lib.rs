//! k-way min-cost perfect matching with delays (k-MPMD).
//!
//! The crate is organised along the processing pipeline:
//!
//! * [`gmetrics`]: finite generalized metrics on k-multisets, exhaustive axiom
//!   checks, family classification and the named example / counterexample tables.
//! * [`reduction`]: the induced pairwise metric of an H-metric and the
//!   `1/k³ · Σ d₂ ≤ d_H ≤ Σ d₂` sandwich check.
//! * [`embedding`]: randomized 2-HST embedding, unary-chain contraction and
//!   distortion measurement.
//! * [`delaymatch`]: the event-driven timer algorithm on tree metrics, with
//!   trace instrumentation and audits.
//! * [`oracle`]: brute-force offline optimum and exact strategy enumeration for
//!   the lower-bound distributions.
//! * [`adversary`]: generators for the lower-bound request distributions.
//! * [`harness`]: end-to-end pipeline and the experiment suites used by the CLI.

pub mod adversary;
pub mod delaymatch;
pub mod embedding;
pub mod error;
pub mod gmetrics;
pub mod harness;
pub mod oracle;
pub mod reduction;
pub mod tol;

mod request;

pub use delaymatch::{CostReport, MatchRecord, Request, SimulationTrace};
pub use embedding::{EmbedStats, TreeMetric};
pub use error::{Error, Result};
pub use gmetrics::{Axiom, AxiomReport, Family, HMetricTable, KMultiset, PointSet};
pub use oracle::{OptSolution, StrategyVector};
pub use reduction::{PairwiseMetric, SandwichReport};
pub use request::{requests_from_json, requests_to_json, RequestEntry, TimedRequest};
