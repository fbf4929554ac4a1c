//! Slot-by-slot simulation loop.
//!
//! Slot `k` spans `[k * T, (k + 1) * T)`. A frame is eligible in slot `k`
//! iff it was generated at or before `k * T`, and a frame delivered in slot
//! `k` is timestamped `(k + 1) * T`.

use alloc::vec;
use alloc::vec::Vec;

use crate::metrics::MetricsReport;
use crate::model::{
    ChannelRules, ConfigError, Frame, Nanos, RuAssignment, RuResult, SimConfig, SlotOutcome, SlotSchedule, StationId,
    StopRule, Violation,
};
use crate::obo::{OboDecision, OboState, TxResult};
use crate::rng::{substream, Purpose, StreamRng};
use crate::sched::Scheduler;
use crate::traffic::StationTraffic;

/// Where stations' frames come from.
#[derive(Debug, Clone, PartialEq)]
pub enum ArrivalPlan {
    /// Exponential regeneration at `config.arrival_rate`.
    Poisson,
    /// Every station always holds a frame.
    Saturated,
    /// Explicit `(station, generation time)` pairs.
    Scripted(Vec<(StationId, Nanos)>),
}

#[derive(Debug, Clone)]
pub struct Station {
    pub traffic: StationTraffic,
    pub obo: OboState,
    init_rng: StreamRng,
    ru_rng: StreamRng,
}

/// Everything that happened in one slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotRecord {
    pub schedule: SlotSchedule,
    pub outcome: SlotOutcome,
    pub delivered: Vec<Frame>,
}

/// Resolves who transmitted in each RU and what the AP observes.
///
/// `ra_choices` lists `(station, index among the slot's RA RUs)` for every
/// station that decided to transmit in random access. `has_data` reports
/// whether a station holds an eligible frame. Returns the outcome and the
/// stations whose frames got through.
pub fn resolve_slot(
    schedule: &SlotSchedule,
    ra_choices: &[(StationId, usize)],
    rules: ChannelRules,
    has_data: impl Fn(StationId) -> bool,
) -> (SlotOutcome, Vec<StationId>) {
    let ra_positions: Vec<usize> = schedule
        .assignments
        .iter()
        .enumerate()
        .filter(|(_, a)| a.is_random_access())
        .map(|(i, _)| i)
        .collect();
    let mut ra_tx: Vec<Vec<StationId>> = vec![Vec::new(); ra_positions.len()];
    for &(s, r) in ra_choices {
        ra_tx[r].push(s);
    }

    let mut delivered = Vec::new();
    let mut ra_iter = ra_tx.into_iter();
    let results = schedule
        .assignments
        .iter()
        .map(|a| {
            let (data, padding): (Vec<StationId>, Vec<StationId>) = match a {
                RuAssignment::RandomAccess => (ra_iter.next().unwrap_or_default(), Vec::new()),
                RuAssignment::Deterministic(group) => match rules {
                    ChannelRules::Be => (group.iter().copied().filter(|&s| has_data(s)).collect(), Vec::new()),
                    ChannelRules::Ax => group.iter().copied().partition(|&s| has_data(s)),
                },
            };
            match (data.len(), padding.len()) {
                (0, 0) => RuResult::Empty,
                (1, 0) => {
                    delivered.push(data[0]);
                    RuResult::Success {
                        station: data[0],
                        more_data: false,
                    }
                }
                (0, 1) => RuResult::PaddingBusy(padding),
                _ => {
                    let mut all = data;
                    all.extend(padding);
                    all.sort_unstable();
                    RuResult::Collision(all)
                }
            }
        })
        .collect();
    (SlotOutcome { results }, delivered)
}

#[derive(Debug, Clone)]
pub struct Engine {
    config: SimConfig,
    clock: u64,
    stations: Vec<Station>,
    scheduler: Scheduler,
    metrics: MetricsReport,
    last: Option<SlotRecord>,
    assigned: Vec<bool>,
    ra_choices: Vec<(StationId, usize)>,
}

impl Engine {
    pub fn new(config: SimConfig, arrivals: ArrivalPlan) -> Result<Self, ConfigError> {
        let config = config.validate()?;
        let n = config.n_stations;
        let mut traffic: Vec<StationTraffic> = match arrivals {
            ArrivalPlan::Poisson => (0..n)
                .map(|s| {
                    StationTraffic::poisson(
                        s,
                        config.arrival_rate,
                        substream(config.seed, s as u64, Purpose::Traffic),
                    )
                })
                .collect(),
            ArrivalPlan::Saturated => (0..n).map(StationTraffic::saturated).collect(),
            ArrivalPlan::Scripted(script) => {
                let mut per_station: Vec<Vec<Nanos>> = vec![Vec::new(); n];
                for (s, t) in script {
                    per_station
                        .get_mut(s)
                        .ok_or_else(|| {
                            ConfigError::InvalidConfig(vec![Violation::ScriptedStationOutOfRange {
                                station: s,
                                n_stations: n,
                            }])
                        })?
                        .push(t);
                }
                per_station
                    .into_iter()
                    .enumerate()
                    .map(|(s, times)| StationTraffic::scripted(s, times))
                    .collect()
            }
        };
        let stations = traffic
            .drain(..)
            .map(|traffic| {
                let id = traffic.id() as u64;
                Station {
                    traffic,
                    obo: OboState::new(config.ocw_min),
                    init_rng: substream(config.seed, id, Purpose::OboInit),
                    ru_rng: substream(config.seed, id, Purpose::OboRu),
                }
            })
            .collect();
        Ok(Engine {
            scheduler: Scheduler::from_config(&config),
            metrics: MetricsReport::new(&config),
            clock: 0,
            stations,
            last: None,
            assigned: vec![false; n],
            ra_choices: Vec::new(),
            config,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// Index of the next slot to simulate.
    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    pub fn scheduler(&self) -> &Scheduler {
        &self.scheduler
    }

    pub fn metrics(&self) -> &MetricsReport {
        &self.metrics
    }

    pub fn last_slot(&self) -> Option<&SlotRecord> {
        self.last.as_ref()
    }

    fn slot_start(&self, slot: u64) -> Nanos {
        slot * self.config.slot_duration
    }

    /// Simulates one slot and returns what happened in it.
    pub fn step_slot(&mut self) -> &SlotRecord {
        if let Some(prev) = &self.last {
            self.scheduler.observe(&prev.schedule, &prev.outcome);
        }
        let schedule = self.scheduler.build(self.clock);

        let start = self.slot_start(self.clock);
        for st in &mut self.stations {
            st.traffic.advance_to(start);
        }

        self.assigned.iter_mut().for_each(|a| *a = false);
        for s in schedule.assignments.iter().flat_map(RuAssignment::stations) {
            self.assigned[*s] = true;
        }

        let num_ra = schedule.ra_count();
        self.ra_choices.clear();
        for (s, st) in self.stations.iter_mut().enumerate() {
            if self.assigned[s] || !st.traffic.has_pending() {
                continue;
            }
            if st.obo.counter().is_none() {
                st.obo.init_counter(&mut st.init_rng);
            }
            if let OboDecision::Transmit(ru) = st.obo.on_trigger(num_ra, &mut st.ru_rng) {
                self.ra_choices.push((s, ru));
            }
        }

        let stations = &self.stations;
        let (outcome, delivered_ids) = resolve_slot(&schedule, &self.ra_choices, self.config.rules, |s| {
            stations[s].traffic.has_pending()
        });

        let (ocw_min, ocw_max) = (self.config.ocw_min, self.config.ocw_max);
        for &(s, _) in &self.ra_choices {
            let result = if delivered_ids.contains(&s) {
                TxResult::Success
            } else {
                TxResult::Collision
            };
            let st = &mut self.stations[s];
            st.obo.on_result(result, ocw_min, ocw_max, &mut st.init_rng);
        }

        let end = self.slot_start(self.clock + 1);
        let record_metrics = self.clock >= self.config.warmup_slots;
        let mut delivered = Vec::with_capacity(delivered_ids.len());
        for s in delivered_ids {
            let st = &mut self.stations[s];
            let frame = st.traffic.on_delivery(end).expect("delivered station held a frame");
            st.obo.clear_counter();
            if record_metrics {
                self.metrics.record_delivery(frame.generated_at, end);
            }
            delivered.push(frame);
        }
        if record_metrics {
            self.metrics.record_slot(&schedule, &outcome);
        }

        self.clock += 1;
        self.last.insert(SlotRecord {
            schedule,
            outcome,
            delivered,
        })
    }

    fn stop_rule_met(&self) -> bool {
        match self.config.stop_rule {
            StopRule::PacketCount => self.metrics.delivered_count >= self.config.stop_value,
            StopRule::SlotCount => self.metrics.slot_count >= self.config.stop_value,
        }
    }

    /// Runs warm-up and then simulates until the stop rule (or `max_slots`)
    /// is reached.
    pub fn run_to_completion(mut self) -> MetricsReport {
        while !self.stop_rule_met() {
            if self.config.max_slots.is_some_and(|cap| self.clock >= cap) {
                self.metrics.hit_slot_cap = true;
                break;
            }
            self.step_slot();
        }
        self.metrics
    }
}

/// Validates `config` and runs it with Poisson traffic.
pub fn run(config: SimConfig) -> Result<MetricsReport, ConfigError> {
    Ok(Engine::new(config, ArrivalPlan::Poisson)?.run_to_completion())
}
