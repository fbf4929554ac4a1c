//! Cyclic Resource Assignment.
//!
//! While no collision is seen the AP offers only `f_ra` RA RUs. An RA
//! collision starts a cycle: station ids are shuffled once and then polled
//! `f_max - f_ra` at a time, one station per deterministic RU, next to the
//! RA RUs. The first collision-free slot ends the cycle.

use alloc::vec::Vec;

use super::Shuffler;
use crate::model::{RuAssignment, SlotOutcome, SlotSchedule, StationId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CraPhase {
    Idle,
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CraState {
    pub phase: CraPhase,
    pub order: Vec<StationId>,
    /// Index into `order` of the next station to poll.
    pub position: usize,
}

#[derive(Debug, Clone)]
pub struct Cra {
    n_stations: usize,
    f_ra: usize,
    f_max: usize,
    shuffler: Shuffler,
    state: CraState,
}

impl Cra {
    pub fn new(n_stations: usize, f_ra: usize, f_max: usize, shuffler: Shuffler) -> Self {
        Cra {
            n_stations,
            f_ra,
            f_max,
            shuffler,
            state: CraState {
                phase: CraPhase::Idle,
                order: Vec::new(),
                position: 0,
            },
        }
    }

    pub fn state(&self) -> &CraState {
        &self.state
    }

    pub fn with_state(mut self, state: CraState) -> Self {
        self.state = state;
        self
    }

    pub fn observe(&mut self, prev: &SlotSchedule, outcome: &SlotOutcome) {
        let st = &mut self.state;
        match st.phase {
            CraPhase::Idle => {
                if outcome.ra_collision(prev) {
                    st.order.clear();
                    st.order.extend(0..self.n_stations);
                    self.shuffler.shuffle(&mut st.order);
                    st.position = 0;
                    st.phase = CraPhase::Cycle;
                }
            }
            CraPhase::Cycle => {
                if !outcome.any_collision() {
                    st.phase = CraPhase::Idle;
                } else if self.n_stations > 0 {
                    st.position = (st.position + prev.deterministic_count()) % self.n_stations;
                }
            }
        }
    }

    pub fn build(&self, slot_index: u64) -> SlotSchedule {
        let mut schedule = SlotSchedule::random_access_only(slot_index, self.f_ra, self.f_max);
        let st = &self.state;
        if st.phase == CraPhase::Cycle && self.n_stations > 0 {
            let polled = (self.f_max - self.f_ra).min(self.n_stations);
            schedule.assignments.extend(
                (0..polled)
                    .map(|i| RuAssignment::Deterministic(alloc::vec![st.order[(st.position + i) % self.n_stations]])),
            );
            schedule.nonrta_rus -= polled;
        }
        schedule
    }
}
