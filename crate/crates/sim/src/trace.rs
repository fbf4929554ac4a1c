//! Per-slot RU traces of scripted-arrival runs, written as JSON lines.

use std::io::Write;

use rta_ofdma_core::{ArrivalPlan, Engine, Nanos, RuAssignment, RuResult, SimConfig, StationId, StopRule};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRu {
    /// `ra` or `det`.
    pub kind: String,
    /// Stations assigned to a deterministic RU; empty for RA RUs.
    pub stations: Vec<StationId>,
    /// `empty`, `success`, `collision` or `padding`.
    pub outcome: String,
    pub transmitters: Vec<StationId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub slot: u64,
    pub rus: Vec<TraceRu>,
    pub nonrta_rus: usize,
}

/// Reads `station_id,time_us` lines; `#` starts a comment.
pub fn parse_arrivals(text: &str) -> Result<Vec<(StationId, Nanos)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || {
            CliError::usage(format!(
                "arrivals line {}: expected station_id,time_us, got {raw:?}",
                i + 1
            ))
        };
        let (station, time) = line.split_once(',').ok_or_else(bad)?;
        let station: StationId = station.trim().parse().map_err(|_| bad())?;
        let time_us: f64 = time.trim().parse().map_err(|_| bad())?;
        if !time_us.is_finite() || time_us < 0.0 {
            return Err(bad());
        }
        out.push((station, (time_us * 1e3).round() as Nanos));
    }
    Ok(out)
}

fn ru_entry(assignment: &RuAssignment, result: &RuResult) -> TraceRu {
    let (outcome, transmitters) = match result {
        RuResult::Empty => ("empty", Vec::new()),
        RuResult::Success { station, .. } => ("success", vec![*station]),
        RuResult::Collision(s) => ("collision", s.clone()),
        RuResult::PaddingBusy(s) => ("padding", s.clone()),
    };
    TraceRu {
        kind: if assignment.is_random_access() { "ra" } else { "det" }.to_string(),
        stations: assignment.stations().to_vec(),
        outcome: outcome.to_string(),
        transmitters,
    }
}

/// Simulates `horizon` slots from t = 0 with the given arrivals and no
/// other traffic, returning one record per slot.
pub fn dump_trace(
    config: SimConfig,
    script: Vec<(StationId, Nanos)>,
    horizon: u64,
) -> Result<Vec<TraceRecord>, CliError> {
    let config = SimConfig {
        warmup_slots: 0,
        stop_rule: StopRule::SlotCount,
        stop_value: horizon.max(1),
        ..config
    };
    let mut engine = Engine::new(config, ArrivalPlan::Scripted(script))?;
    let mut records = Vec::with_capacity(horizon as usize);
    for _ in 0..horizon {
        let rec = engine.step_slot();
        records.push(TraceRecord {
            slot: rec.schedule.slot_index,
            rus: rec
                .schedule
                .assignments
                .iter()
                .zip(&rec.outcome.results)
                .map(|(a, r)| ru_entry(a, r))
                .collect(),
            nonrta_rus: rec.schedule.nonrta_rus,
        });
    }
    Ok(records)
}

pub fn write_trace<W: Write>(records: &[TraceRecord], out: &mut W) -> Result<(), CliError> {
    for r in records {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let a = parse_arrivals("# fixture\n0,0\n\n10, 250.5 # late\n").unwrap();
        assert_eq!(a, vec![(0, 0), (10, 250_500)]);
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let err = parse_arrivals("0,0\nx,1\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(parse_arrivals("3\n").is_err());
        assert!(parse_arrivals("3,-1\n").is_err());
    }

    #[test]
    fn empty_script_gives_idle_slots() {
        let cfg = SimConfig {
            n_stations: 12,
            f_max: 6,
            ..SimConfig::default()
        };
        let recs = dump_trace(cfg, Vec::new(), 3).unwrap();
        assert_eq!(recs.len(), 3);
        for (k, r) in recs.iter().enumerate() {
            assert_eq!(r.slot, k as u64);
            assert_eq!(r.rus.len(), 1);
            assert_eq!(r.rus[0].kind, "ra");
            assert_eq!(r.rus[0].outcome, "empty");
            assert_eq!(r.nonrta_rus, 5);
        }
    }

    #[test]
    fn out_of_range_station_is_config_error() {
        let cfg = SimConfig {
            n_stations: 2,
            ..SimConfig::default()
        };
        assert_eq!(dump_trace(cfg, vec![(5, 0)], 2).unwrap_err().exit_code(), 1);
    }
}
