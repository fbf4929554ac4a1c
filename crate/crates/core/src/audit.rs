//! Invariant checks over schedules, outcomes and station state.
//!
//! Each check returns a description of the first violation it finds.
//! Randomized test suites drive the engine and call these after every slot.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::engine::{Engine, SlotRecord, Station};
use crate::model::{ChannelRules, RuAssignment, RuResult, SimConfig, StationId};

pub type AuditResult = Result<(), String>;

/// Groups must be `min(groups, len)` non-empty sets, sizes within one of
/// each other, together holding every input station exactly once.
pub fn partition(stations: &[StationId], groups: usize, out: &[Vec<StationId>]) -> AuditResult {
    let want = groups.min(stations.len());
    if out.len() != want {
        return Err(format!("{} groups, expected {want}", out.len()));
    }
    if let (Some(min), Some(max)) = (out.iter().map(Vec::len).min(), out.iter().map(Vec::len).max()) {
        if min == 0 || max - min > 1 {
            return Err(format!("group sizes range over {min}..={max}"));
        }
    }
    let mut flat: Vec<StationId> = out.iter().flatten().copied().collect();
    let mut input = stations.to_vec();
    flat.sort_unstable();
    input.sort_unstable();
    if flat != input {
        return Err(String::from("groups are not a partition of the input"));
    }
    Ok(())
}

/// For each station, whether it will hold an eligible frame when the
/// engine's next slot starts.
pub fn holders_at_next_slot(engine: &Engine) -> Vec<bool> {
    let start = engine.clock() * engine.config().slot_duration;
    engine
        .stations()
        .iter()
        .map(|s| s.traffic.has_pending() || s.traffic.next_arrival_at().is_some_and(|t| t <= start))
        .collect()
}

/// Budget conservation, index alignment, and per-RU outcomes consistent
/// with the channel rules given which stations held data at slot start.
pub fn slot(config: &SimConfig, record: &SlotRecord, holders: &[bool]) -> AuditResult {
    let schedule = &record.schedule;
    schedule
        .check(config.f_max, config.n_stations)
        .map_err(|v| format!("slot {}: {v:?}", schedule.slot_index))?;
    if schedule.assignments.len() + schedule.nonrta_rus != config.f_max {
        return Err(format!("slot {}: RU budget not conserved", schedule.slot_index));
    }
    if !record.outcome.is_aligned_with(schedule) {
        return Err(format!(
            "slot {}: outcome not aligned with schedule",
            schedule.slot_index
        ));
    }
    let assigned: Vec<StationId> = schedule
        .assignments
        .iter()
        .flat_map(RuAssignment::stations)
        .copied()
        .collect();
    let mut successes = Vec::new();
    for (i, (a, r)) in schedule.assignments.iter().zip(&record.outcome.results).enumerate() {
        let bad = |what: &str| Err(format!("slot {} RU {i}: {what}: {a:?} -> {r:?}", schedule.slot_index));
        match a {
            RuAssignment::RandomAccess => {
                let tx: &[StationId] = match r {
                    RuResult::Empty => &[],
                    RuResult::Success { station, .. } => core::slice::from_ref(station),
                    RuResult::Collision(s) if s.len() >= 2 => s,
                    _ => return bad("impossible RA result"),
                };
                if tx.iter().any(|s| !holders[*s] || assigned.contains(s)) {
                    return bad("RA transmitter without data or with an assigned RU");
                }
            }
            RuAssignment::Deterministic(group) => {
                let mut data: Vec<StationId> = group.iter().copied().filter(|s| holders[*s]).collect();
                let mut tx = match config.rules {
                    ChannelRules::Be => data.clone(),
                    ChannelRules::Ax => group.clone(),
                };
                data.sort_unstable();
                tx.sort_unstable();
                let expected = match (tx.len(), data.len()) {
                    (0, _) => RuResult::Empty,
                    (1, 1) => RuResult::Success {
                        station: data[0],
                        more_data: false,
                    },
                    (1, 0) => RuResult::PaddingBusy(tx),
                    _ => RuResult::Collision(tx),
                };
                if *r != expected {
                    return bad("unexpected deterministic result");
                }
            }
        }
        if let RuResult::Success { station, .. } = r {
            successes.push(*station);
        }
    }
    let mut delivered: Vec<StationId> = record.delivered.iter().map(|f| f.owner).collect();
    successes.sort_unstable();
    delivered.sort_unstable();
    if successes != delivered {
        return Err(format!(
            "slot {}: deliveries {delivered:?} differ from successes {successes:?}",
            schedule.slot_index
        ));
    }
    Ok(())
}

/// OBO window and counter bounds, and the single-frame buffer.
pub fn station(config: &SimConfig, st: &Station) -> AuditResult {
    let ocw = st.obo.ocw();
    if ocw < config.ocw_min || ocw > config.ocw_max {
        return Err(format!(
            "station {}: ocw {ocw} outside [{}, {}]",
            st.traffic.id(),
            config.ocw_min,
            config.ocw_max
        ));
    }
    if let Some(c) = st.obo.counter() {
        if c >= ocw {
            return Err(format!("station {}: counter {c} >= ocw {ocw}", st.traffic.id()));
        }
    }
    if !st.traffic.buffer_invariant_holds() {
        return Err(format!(
            "station {}: frame buffered while another is scheduled",
            st.traffic.id()
        ));
    }
    Ok(())
}

/// Steps `engine` for `slots` slots, auditing every slot and station.
pub fn run_audited(engine: &mut Engine, slots: u64) -> AuditResult {
    let config = engine.config().clone();
    for _ in 0..slots {
        let holders = holders_at_next_slot(engine);
        let record = engine.step_slot().clone();
        slot(&config, &record, &holders)?;
        for st in engine.stations() {
            station(&config, st)?;
        }
    }
    Ok(())
}
