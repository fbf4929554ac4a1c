//! RU schedulers run by the AP at the start of every slot.
//!
//! Each scheduler alternates strictly between [`Scheduler::observe`] (the
//! schedule and per-RU outcome of the previous slot) and
//! [`Scheduler::build`] (the schedule for the current slot).

mod cra;
mod gra;
mod uora;

pub use cra::{Cra, CraPhase, CraState};
pub use gra::{Gra, GraPhase, GraState};
pub use uora::UoraStatic;

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::model::{SchedulerKind, ShuffleMode, SimConfig, SlotOutcome, SlotSchedule, StationId};
use crate::rng::{substream, Purpose, StreamRng, AP_ENTITY};

/// Permutes station lists before cycling or grouping.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Shuffler {
    Random(StreamRng),
    Identity,
}

impl Shuffler {
    pub fn from_config(config: &SimConfig) -> Self {
        match config.shuffle {
            ShuffleMode::Random => Shuffler::Random(substream(config.seed, AP_ENTITY, Purpose::Shuffle)),
            ShuffleMode::Identity => Shuffler::Identity,
        }
    }

    pub fn shuffle(&mut self, stations: &mut [StationId]) {
        if let Shuffler::Random(rng) = self {
            stations.shuffle(rng);
        }
    }
}

/// Splits `stations` round-robin into `min(groups, len)` non-empty groups
/// whose sizes differ by at most one; the first `len % groups` are larger.
///
/// Panics if `groups` is zero.
pub fn partition_into_groups(stations: &[StationId], groups: usize) -> Vec<Vec<StationId>> {
    assert!(groups >= 1, "group count must be positive");
    let count = groups.min(stations.len());
    let mut out: Vec<Vec<StationId>> = (0..count)
        .map(|_| Vec::with_capacity(stations.len().div_ceil(count.max(1))))
        .collect();
    for (i, &s) in stations.iter().enumerate() {
        out[i % count].push(s);
    }
    out
}

/// Any of the three schedulers, dispatched statically.
#[derive(Debug, Clone)]
pub enum Scheduler {
    Uora(UoraStatic),
    Cra(Cra),
    Gra(Gra),
}

impl Scheduler {
    pub fn from_config(config: &SimConfig) -> Self {
        let shuffler = Shuffler::from_config(config);
        match config.scheduler {
            SchedulerKind::UoraStatic => Scheduler::Uora(UoraStatic::new(config.f_ra, config.f_max)),
            SchedulerKind::Cra => Scheduler::Cra(Cra::new(config.n_stations, config.f_ra, config.f_max, shuffler)),
            SchedulerKind::Gra => Scheduler::Gra(Gra::new(config.n_stations, config.f_ra, config.f_max, shuffler)),
        }
    }

    pub fn kind(&self) -> SchedulerKind {
        match self {
            Scheduler::Uora(_) => SchedulerKind::UoraStatic,
            Scheduler::Cra(_) => SchedulerKind::Cra,
            Scheduler::Gra(_) => SchedulerKind::Gra,
        }
    }

    pub fn observe(&mut self, prev: &SlotSchedule, outcome: &SlotOutcome) {
        match self {
            Scheduler::Uora(_) => {}
            Scheduler::Cra(s) => s.observe(prev, outcome),
            Scheduler::Gra(s) => s.observe(prev, outcome),
        }
    }

    pub fn build(&mut self, slot_index: u64) -> SlotSchedule {
        match self {
            Scheduler::Uora(s) => s.build(slot_index),
            Scheduler::Cra(s) => s.build(slot_index),
            Scheduler::Gra(s) => s.build(slot_index),
        }
    }
}
