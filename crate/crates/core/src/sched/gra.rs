//! Group Resource Assignment.
//!
//! Needs the modified access rule where only stations with buffered data
//! transmit in a shared RU. After an RA collision every station is split
//! into `f_max` groups, one RU each and no RA. Groups that collide are
//! marked; marked stations are reshuffled and re-split into
//! `f_max - f_ra` groups beside `f_ra` RA RUs until nothing is marked.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{partition_into_groups, Shuffler};
use crate::model::{RuAssignment, RuResult, SlotOutcome, SlotSchedule, StationId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraPhase {
    Idle,
    /// Next slot groups all stations, without RA.
    FullGrouping,
    /// Next slot groups the marked stations beside the RA RUs.
    Resolve,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraState {
    pub phase: GraPhase,
    pub marked: BTreeSet<StationId>,
}

impl GraState {
    pub fn idle() -> Self {
        GraState {
            phase: GraPhase::Idle,
            marked: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Gra {
    n_stations: usize,
    f_ra: usize,
    f_max: usize,
    shuffler: Shuffler,
    state: GraState,
    scratch: Vec<bool>,
}

impl Gra {
    pub fn new(n_stations: usize, f_ra: usize, f_max: usize, shuffler: Shuffler) -> Self {
        Gra {
            n_stations,
            f_ra,
            f_max,
            shuffler,
            state: GraState::idle(),
            scratch: Vec::new(),
        }
    }

    pub fn state(&self) -> &GraState {
        &self.state
    }

    pub fn with_state(mut self, state: GraState) -> Self {
        self.state = state;
        self
    }

    pub fn observe(&mut self, prev: &SlotSchedule, outcome: &SlotOutcome) {
        let st = &mut self.state;
        if st.phase == GraPhase::Idle {
            if outcome.ra_collision(prev) {
                st.phase = GraPhase::FullGrouping;
            }
            return;
        }

        let mut ra_collision = false;
        for (assignment, result) in prev.assignments.iter().zip(&outcome.results) {
            match assignment {
                RuAssignment::RandomAccess => ra_collision |= result.is_collision(),
                RuAssignment::Deterministic(group) => match result {
                    RuResult::Collision(_) => st.marked.extend(group.iter().copied()),
                    RuResult::Success {
                        station,
                        more_data: true,
                    } => {
                        for s in group {
                            st.marked.remove(s);
                        }
                        st.marked.insert(*station);
                    }
                    RuResult::Success { .. } | RuResult::Empty | RuResult::PaddingBusy(_) => {
                        for s in group {
                            st.marked.remove(s);
                        }
                    }
                },
            }
        }

        if ra_collision {
            // The AP cannot tell which unassigned stations contended, so it
            // marks all of them.
            self.scratch.clear();
            self.scratch.resize(self.n_stations, false);
            for s in prev.assignments.iter().flat_map(RuAssignment::stations) {
                self.scratch[*s] = true;
            }
            for (s, assigned) in self.scratch.iter().enumerate() {
                if !assigned {
                    st.marked.insert(s);
                }
            }
        }

        st.phase = if st.marked.is_empty() {
            GraPhase::Idle
        } else {
            GraPhase::Resolve
        };
    }

    pub fn build(&mut self, slot_index: u64) -> SlotSchedule {
        match self.state.phase {
            GraPhase::Idle => SlotSchedule::random_access_only(slot_index, self.f_ra, self.f_max),
            GraPhase::FullGrouping => {
                let mut all: Vec<StationId> = (0..self.n_stations).collect();
                self.shuffler.shuffle(&mut all);
                let groups = partition_into_groups(&all, self.f_max);
                let nonrta_rus = self.f_max - groups.len();
                SlotSchedule {
                    slot_index,
                    assignments: groups.into_iter().map(RuAssignment::Deterministic).collect(),
                    nonrta_rus,
                }
            }
            GraPhase::Resolve => {
                let mut marked: Vec<StationId> = self.state.marked.iter().copied().collect();
                self.shuffler.shuffle(&mut marked);
                let groups = partition_into_groups(&marked, self.f_max - self.f_ra);
                let mut schedule = SlotSchedule::random_access_only(slot_index, self.f_ra, self.f_max);
                schedule.nonrta_rus -= groups.len();
                schedule
                    .assignments
                    .extend(groups.into_iter().map(RuAssignment::Deterministic));
                schedule
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn gra(state: GraState) -> Gra {
        Gra::new(12, 1, 5, Shuffler::Identity).with_state(state)
    }

    fn marked(ids: &[StationId]) -> BTreeSet<StationId> {
        ids.iter().copied().collect()
    }

    fn groups(s: &SlotSchedule) -> Vec<Vec<StationId>> {
        s.assignments
            .iter()
            .filter(|a| !a.is_random_access())
            .map(|a| a.stations().to_vec())
            .collect()
    }

    #[test]
    fn idle_ra_collision_requests_full_grouping() {
        let mut g = gra(GraState::idle());
        let prev = g.build(1);
        g.observe(
            &prev,
            &SlotOutcome {
                results: vec![RuResult::Collision(vec![0, 1, 10, 11])],
            },
        );
        assert_eq!(g.state().phase, GraPhase::FullGrouping);
        assert!(g.state().marked.is_empty());
    }

    #[test]
    fn full_grouping_layout() {
        let mut g = gra(GraState {
            phase: GraPhase::FullGrouping,
            marked: BTreeSet::new(),
        });
        let s = g.build(2);
        assert_eq!(s.ra_count(), 0);
        assert_eq!(s.nonrta_rus, 0);
        assert_eq!(
            groups(&s),
            vec![vec![0, 5, 10], vec![1, 6, 11], vec![2, 7], vec![3, 8], vec![4, 9]]
        );
    }

    #[test]
    fn full_grouping_collisions_mark_groups() {
        let mut g = gra(GraState {
            phase: GraPhase::FullGrouping,
            marked: BTreeSet::new(),
        });
        let prev = g.build(2);
        let out = SlotOutcome {
            results: vec![
                RuResult::Collision(vec![0, 10]),
                RuResult::Collision(vec![1, 11]),
                RuResult::Empty,
                RuResult::Empty,
                RuResult::Empty,
            ],
        };
        g.observe(&prev, &out);
        assert_eq!(g.state().phase, GraPhase::Resolve);
        assert_eq!(g.state().marked, marked(&[0, 5, 10, 1, 6, 11]));
    }

    #[test]
    fn resolve_regroups_marked_beside_ra() {
        let mut g = gra(GraState {
            phase: GraPhase::Resolve,
            marked: marked(&[0, 1, 5, 6, 10, 11]),
        });
        let s = g.build(3);
        assert!(s.assignments[0].is_random_access());
        assert_eq!(groups(&s), vec![vec![0, 10], vec![1, 11], vec![5], vec![6]]);

        let out = SlotOutcome {
            results: vec![
                RuResult::Empty,
                RuResult::Collision(vec![0, 10]),
                RuResult::Collision(vec![1, 11]),
                RuResult::Empty,
                RuResult::Empty,
            ],
        };
        g.observe(&s, &out);
        assert_eq!(g.state().marked, marked(&[0, 1, 10, 11]));

        let s = g.build(4);
        assert_eq!(groups(&s), vec![vec![0], vec![1], vec![10], vec![11]]);
        let out = SlotOutcome {
            results: core::iter::once(RuResult::Empty)
                .chain([0, 1, 10, 11].map(|station| RuResult::Success {
                    station,
                    more_data: false,
                }))
                .collect(),
        };
        g.observe(&s, &out);
        assert_eq!(g.state(), &GraState::idle());
        assert_eq!(g.build(5).assignments, vec![RuAssignment::RandomAccess]);
    }

    #[test]
    fn more_data_keeps_only_transmitter() {
        let mut g = gra(GraState {
            phase: GraPhase::Resolve,
            marked: marked(&[2, 7]),
        });
        let s = g.build(3);
        assert_eq!(groups(&s), vec![vec![2], vec![7]]);
        let out = SlotOutcome {
            results: vec![
                RuResult::Empty,
                RuResult::Success {
                    station: 2,
                    more_data: true,
                },
                RuResult::Success {
                    station: 7,
                    more_data: false,
                },
            ],
        };
        g.observe(&s, &out);
        assert_eq!(g.state().marked, marked(&[2]));
        assert_eq!(g.state().phase, GraPhase::Resolve);
    }

    #[test]
    fn resolve_ra_collision_marks_unassigned() {
        let mut g = gra(GraState {
            phase: GraPhase::Resolve,
            marked: marked(&[0, 1]),
        });
        let s = g.build(3);
        let out = SlotOutcome {
            results: vec![
                RuResult::Collision(vec![3, 4]),
                RuResult::Success {
                    station: 0,
                    more_data: false,
                },
                RuResult::Empty,
            ],
        };
        g.observe(&s, &out);
        assert_eq!(g.state().marked, (2..12).collect());
    }

    #[test]
    fn idle_builds_ra_only() {
        let mut g = Gra::new(50, 1, 18, Shuffler::Identity);
        let s = g.build(0);
        assert_eq!(s.ra_count(), 1);
        assert_eq!(s.nonrta_rus, 17);
    }

    #[test]
    fn small_network_uses_fewer_groups() {
        let mut g = Gra::new(3, 1, 5, Shuffler::Identity).with_state(GraState {
            phase: GraPhase::FullGrouping,
            marked: BTreeSet::new(),
        });
        let s = g.build(0);
        assert_eq!(groups(&s), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(s.nonrta_rus, 2);
    }
}
