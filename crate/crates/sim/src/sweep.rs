//! Parameter sweeps: seeded replications run in parallel, merged per point,
//! streamed out as CSV rows in axis order.

use std::io::Write;

use rayon::prelude::*;
use rta_ofdma_core::{merge, run, MergedReport, SimConfig};
use serde::Serialize;

use crate::settings::SweepSpec;
use crate::CliError;

pub const CSV_HEADER: &str = "axis,axis_value,scheduler,rules,f_ra,f_max,lambda,n_stations,delivered,\
p_late_mean,p_late_stderr,nonrta_share_mean,nonrta_share_stderr,mean_delay_us,seed_base,config_digest";

/// Serializable mirror of `SimConfig`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub n_stations: usize,
    pub arrival_rate: f64,
    pub f_ra: usize,
    pub f_max: usize,
    pub slot_duration_ns: u64,
    pub deadline_ns: u64,
    pub ocw_min: u32,
    pub ocw_max: u32,
    pub scheduler: &'static str,
    pub rules: &'static str,
    pub stop_rule: &'static str,
    pub stop_value: u64,
    pub seed: u64,
    pub warmup_slots: u64,
    pub max_slots: Option<u64>,
    pub identity_shuffle: bool,
}

impl From<&SimConfig> for ResolvedConfig {
    fn from(c: &SimConfig) -> Self {
        ResolvedConfig {
            n_stations: c.n_stations,
            arrival_rate: c.arrival_rate,
            f_ra: c.f_ra,
            f_max: c.f_max,
            slot_duration_ns: c.slot_duration,
            deadline_ns: c.deadline,
            ocw_min: c.ocw_min,
            ocw_max: c.ocw_max,
            scheduler: c.scheduler.name(),
            rules: c.rules.name(),
            stop_rule: c.stop_rule.name(),
            stop_value: c.stop_value,
            seed: c.seed,
            warmup_slots: c.warmup_slots,
            max_slots: c.max_slots,
            identity_shuffle: c.shuffle == rta_ofdma_core::ShuffleMode::Identity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis: &'static str,
    pub axis_value: f64,
    pub config: ResolvedConfig,
    pub replications: usize,
    pub delivered: u64,
    pub late: u64,
    pub slots: u64,
    pub p_late_mean: Option<f64>,
    pub p_late_stderr: Option<f64>,
    pub nonrta_share_mean: Option<f64>,
    pub nonrta_share_stderr: Option<f64>,
    pub mean_delay_us: Option<f64>,
    pub collision_slot_ratio: Option<f64>,
    /// Some replication stopped on `max_slots`.
    pub hit_slot_cap: bool,
    pub config_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub axis: &'static str,
    pub replications: usize,
    pub base: ResolvedConfig,
    pub rows: Vec<SweepRow>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SweepRow {
    fn new(axis: &'static str, axis_value: f64, config: &SimConfig, merged: &MergedReport) -> Self {
        let t = &merged.totals;
        SweepRow {
            axis,
            axis_value,
            config: config.into(),
            replications: merged.replications,
            delivered: t.delivered_count,
            late: t.late_count,
            slots: t.slot_count,
            p_late_mean: merged.p_late.map(|e| e.mean),
            p_late_stderr: merged.p_late.map(|e| e.stderr),
            nonrta_share_mean: merged.nonrta_share.map(|e| e.mean),
            nonrta_share_stderr: merged.nonrta_share.map(|e| e.stderr),
            mean_delay_us: t.mean_delay().ok().map(|ns| ns / 1e3),
            collision_slot_ratio: t.collision_slot_ratio().ok(),
            hit_slot_cap: t.hit_slot_cap,
            config_digest: format!("{:016x}", t.config_digest),
        }
    }

    pub fn csv_line(&self) -> String {
        let c = &self.config;
        [
            self.axis.to_string(),
            self.axis_value.to_string(),
            c.scheduler.to_string(),
            c.rules.to_string(),
            c.f_ra.to_string(),
            c.f_max.to_string(),
            c.arrival_rate.to_string(),
            c.n_stations.to_string(),
            self.delivered.to_string(),
            opt(self.p_late_mean),
            opt(self.p_late_stderr),
            opt(self.nonrta_share_mean),
            opt(self.nonrta_share_stderr),
            opt(self.mean_delay_us),
            c.seed.to_string(),
            self.config_digest.clone(),
        ]
        .join(",")
    }
}

/// Runs `spec.replications` replications (seeds `seed`, `seed + 1`, ...)
/// per axis value, writing the header and then one flushed row per point.
pub fn run_sweep<W: Write>(spec: &SweepSpec, csv: &mut W) -> Result<SweepSummary, CliError> {
    writeln!(csv, "{CSV_HEADER}")?;
    csv.flush()?;
    let mut rows = Vec::with_capacity(spec.values.len());
    for &value in &spec.values {
        let point = spec.point(value).validate()?;
        let reports = (0..spec.replications as u64)
            .into_par_iter()
            .map(|r| {
                run(SimConfig {
                    seed: point.seed.wrapping_add(r),
                    ..point.clone()
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let merged = merge(&reports)?;
        let row = SweepRow::new(spec.axis.name(), value, &point, &merged);
        writeln!(csv, "{}", row.csv_line())?;
        csv.flush()?;
        rows.push(row);
    }
    Ok(SweepSummary {
        axis: spec.axis.name(),
        replications: spec.replications,
        base: (&spec.base).into(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::settings::parse_invocation;

    fn spec(args: &str) -> SweepSpec {
        parse_invocation(std::iter::once("rta-ofdma").chain(args.split_whitespace())).unwrap()
    }

    #[test]
    fn header_then_one_row_per_point() {
        let s = spec("--scheduler cra --stations 4,6 --stop-value 200 --reps 2 --warmup-slots 0");
        let mut out = Vec::new();
        let summary = run_sweep(&s, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("stations,4,cra,be,1,18,200,4,"));
        assert_eq!(summary.rows.len(), 2);
        assert_eq!(lines[2].split(',').count(), CSV_HEADER.split(',').count());
    }

    #[test]
    fn empty_network_leaves_blank_p_late() {
        let s = spec("--scheduler uora --stations 0 --stop slot-count --stop-value 100 --reps 2");
        let mut out = Vec::new();
        let summary = run_sweep(&s, &mut out).unwrap();
        let row = &summary.rows[0];
        assert_eq!(row.p_late_mean, None);
        assert_eq!(row.nonrta_share_mean, Some(17.0 / 18.0));
        assert!(row.csv_line().contains(",0,,,"));
    }
}
