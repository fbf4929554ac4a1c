//! Slot-level model of uplink OFDMA channel access for real-time traffic.
//!
//! Stations regenerate one RTA frame at a time after exponential gaps and
//! send it either by OFDMA back-off in random-access (RA) RUs or in RUs the
//! AP assigns to them. Three AP schedulers are provided:
//!
//! * static UORA: a fixed number of RA RUs every slot;
//! * CRA: after an RA collision, poll every station cyclically, one per RU;
//! * GRA: after an RA collision, split stations into groups sharing an RU
//!   and re-split colliding groups. GRA relies on the modified access rule
//!   under which only stations with buffered data transmit in a shared RU.
//!
//! RUs not used for RTA traffic are counted as left to saturated non-RTA
//! flows. Frames are lost only to collisions.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod audit;
pub mod engine;
pub mod metrics;
pub mod model;
pub mod obo;
pub mod rng;
pub mod sched;
pub mod traffic;

pub use engine::{resolve_slot, run, ArrivalPlan, Engine, SlotRecord, Station};
pub use metrics::{merge, Estimate, MergedReport, MetricsError, MetricsReport};
pub use model::{
    ChannelRules, ConfigError, ConfigWarning, Frame, Nanos, RuAssignment, RuResult, SchedulerKind, ShuffleMode,
    SimConfig, SlotOutcome, SlotSchedule, StationId, StopRule, Violation,
};
