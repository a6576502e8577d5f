//! Core pipeline for basketball player-tracking data.
//!
//! A tracked game session spans 90+ wall-clock minutes, but only about 40 of
//! them are live play. This crate turns per-player sensor files into a wide
//! per-instant matrix, strips the inactive moments using lineup counts,
//! free-throw dwells and all-slow runs, splits the remainder into numbered
//! offense/defense actions, calibrates the run thresholds against a target
//! of active minutes, and computes the spacing and velocity statistics used
//! to sanity-check the result. A synthetic-game generator with exact ground
//! truth makes every stage verifiable without proprietary tracking data.

pub mod calibrate;
pub mod court;
pub mod filter;
pub mod ingest;
pub mod segment;
pub mod stats;
pub mod synth;

pub use court::CourtSpec;
pub use filter::{ActivePlay, FilterParams, FilterReport};
pub use ingest::{GameFrame, GameMetadata, GameTimeline, PlayerState, RawRecord};
pub use segment::{ActionSegment, ActionSummary, Phase, SideConfig};
