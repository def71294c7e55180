//! Experiment harness for the activegm structure learners: seeded trial
//! batteries, effective-sample-complexity summaries, Hamming-error curves
//! and a concentration probe for sample partial correlations.

pub mod battery;
pub mod config;
pub mod error;
pub mod io;
pub mod probe;
pub mod summary;

pub use battery::{run_battery, TrialReport};
pub use config::{BenchConfig, BudgetRule, GraphFamily};
pub use error::{BenchError, Result};
pub use probe::{lemma4_decay_probe, DecayRow};
pub use summary::{esc_summary, hamming_curve, CurveRow, EscSummary};
