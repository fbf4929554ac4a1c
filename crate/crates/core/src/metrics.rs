//! Delay and RU-usage accounting, plus replication statistics.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{Nanos, SimConfig, SlotOutcome, SlotSchedule};

/// The delay histogram covers this many slots; longer delays overflow.
pub const HISTOGRAM_SLOTS: u64 = 16;
pub const BINS_PER_SLOT: u64 = 10;
pub const HISTOGRAM_BINS: usize = (HISTOGRAM_SLOTS * BINS_PER_SLOT) as usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricsError {
    NoSamples,
    NoReports,
    ConfigMismatch { expected: u64, found: u64 },
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::NoSamples => f.write_str("no samples recorded"),
            MetricsError::NoReports => f.write_str("nothing to merge"),
            MetricsError::ConfigMismatch { expected, found } => {
                write!(
                    f,
                    "config digest mismatch: expected {expected:016x}, found {found:016x}"
                )
            }
        }
    }
}

impl core::error::Error for MetricsError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsReport {
    pub slot_duration: Nanos,
    pub deadline: Nanos,
    pub f_max: usize,
    pub seed: u64,
    pub config_digest: u64,

    pub delivered_count: u64,
    pub late_count: u64,
    pub delay_sum: u128,
    /// `HISTOGRAM_BINS` bins of width `slot_duration / 10`, then one overflow bin.
    pub delay_histogram: Vec<u64>,

    pub slot_count: u64,
    pub ra_rus: u64,
    pub deterministic_rus: u64,
    pub nonrta_rus: u64,
    pub collision_rus: u64,
    /// Slots with at least one collided RU.
    pub collision_slots: u64,
    /// The run stopped on `max_slots` before its stop rule was met.
    pub hit_slot_cap: bool,
}

impl MetricsReport {
    pub fn new(config: &SimConfig) -> Self {
        MetricsReport {
            slot_duration: config.slot_duration,
            deadline: config.deadline,
            f_max: config.f_max,
            seed: config.seed,
            config_digest: config.digest(),
            delivered_count: 0,
            late_count: 0,
            delay_sum: 0,
            delay_histogram: vec![0; HISTOGRAM_BINS + 1],
            slot_count: 0,
            ra_rus: 0,
            deterministic_rus: 0,
            nonrta_rus: 0,
            collision_rus: 0,
            collision_slots: 0,
            hit_slot_cap: false,
        }
    }

    fn bin_width(&self) -> Nanos {
        (self.slot_duration / BINS_PER_SLOT).max(1)
    }

    /// Counts a delivered frame; it is late iff its delay strictly exceeds
    /// the deadline.
    pub fn record_delivery(&mut self, generated_at: Nanos, delivered_at: Nanos) {
        debug_assert!(delivered_at >= generated_at + self.slot_duration);
        let delay = delivered_at - generated_at;
        self.delivered_count += 1;
        if delay > self.deadline {
            self.late_count += 1;
        }
        self.delay_sum += delay as u128;
        let bin = ((delay / self.bin_width()) as usize).min(HISTOGRAM_BINS);
        self.delay_histogram[bin] += 1;
    }

    pub fn record_slot(&mut self, schedule: &SlotSchedule, outcome: &SlotOutcome) {
        let ra = schedule.ra_count() as u64;
        self.slot_count += 1;
        self.ra_rus += ra;
        self.deterministic_rus += schedule.assignments.len() as u64 - ra;
        self.nonrta_rus += schedule.nonrta_rus as u64;
        let collisions = outcome.collision_count() as u64;
        self.collision_rus += collisions;
        if collisions > 0 {
            self.collision_slots += 1;
        }
    }

    /// Fraction of delivered frames whose delay exceeded the deadline.
    pub fn p_late(&self) -> Result<f64, MetricsError> {
        if self.delivered_count == 0 {
            return Err(MetricsError::NoSamples);
        }
        Ok(self.late_count as f64 / self.delivered_count as f64)
    }

    /// Fraction of all RUs left to non-RTA traffic.
    pub fn nonrta_share(&self) -> Result<f64, MetricsError> {
        if self.slot_count == 0 {
            return Err(MetricsError::NoSamples);
        }
        Ok(self.nonrta_rus as f64 / (self.slot_count as f64 * self.f_max as f64))
    }

    pub fn collision_slot_ratio(&self) -> Result<f64, MetricsError> {
        if self.slot_count == 0 {
            return Err(MetricsError::NoSamples);
        }
        Ok(self.collision_slots as f64 / self.slot_count as f64)
    }

    /// Mean delay in nanoseconds.
    pub fn mean_delay(&self) -> Result<f64, MetricsError> {
        if self.delivered_count == 0 {
            return Err(MetricsError::NoSamples);
        }
        Ok(self.delay_sum as f64 / self.delivered_count as f64)
    }

    /// Adds the counters of `other` into `self`.
    pub fn absorb(&mut self, other: &MetricsReport) {
        self.delivered_count += other.delivered_count;
        self.late_count += other.late_count;
        self.delay_sum += other.delay_sum;
        for (a, b) in self.delay_histogram.iter_mut().zip(&other.delay_histogram) {
            *a += b;
        }
        self.slot_count += other.slot_count;
        self.ra_rus += other.ra_rus;
        self.deterministic_rus += other.deterministic_rus;
        self.nonrta_rus += other.nonrta_rus;
        self.collision_rus += other.collision_rus;
        self.collision_slots += other.collision_slots;
        self.hit_slot_cap |= other.hit_slot_cap;
    }
}

/// Mean and standard error of a per-replication statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    /// Sample mean with standard error `s / sqrt(n)`; a single sample has
    /// zero standard error. Identical samples give back exactly that value.
    pub fn from_samples(samples: &[f64]) -> Option<Estimate> {
        let n = samples.len();
        let &pivot = samples.first()?;
        let mean = pivot + samples.iter().map(|x| x - pivot).sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
            libm::sqrt(var / n as f64)
        } else {
            0.0
        };
        Some(Estimate {
            mean,
            stderr,
            samples: n,
        })
    }
}

/// Replications of one scenario merged together.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedReport {
    /// Counters summed over replications; `seed` is the first replication's.
    pub totals: MetricsReport,
    pub replications: usize,
    /// Over replications that delivered at least one frame.
    pub p_late: Option<Estimate>,
    pub nonrta_share: Option<Estimate>,
}

/// Sums counters and estimates P_late and non-RTA share across replications.
/// All reports must come from the same scenario (equal config digests).
pub fn merge(reports: &[MetricsReport]) -> Result<MergedReport, MetricsError> {
    let first = reports.first().ok_or(MetricsError::NoReports)?;
    let mut totals = first.clone();
    for r in &reports[1..] {
        if r.config_digest != first.config_digest {
            return Err(MetricsError::ConfigMismatch {
                expected: first.config_digest,
                found: r.config_digest,
            });
        }
        totals.absorb(r);
    }
    let p_late: Vec<f64> = reports.iter().filter_map(|r| r.p_late().ok()).collect();
    let share: Vec<f64> = reports.iter().filter_map(|r| r.nonrta_share().ok()).collect();
    Ok(MergedReport {
        totals,
        replications: reports.len(),
        p_late: Estimate::from_samples(&p_late),
        nonrta_share: Estimate::from_samples(&share),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RuAssignment;

    const MS: Nanos = 1_000_000;
    const US: Nanos = 1_000;

    fn report() -> MetricsReport {
        MetricsReport::new(&SimConfig::default())
    }

    #[test]
    fn early_delivery_not_late() {
        let mut r = report();
        r.record_delivery(0, 750 * US);
        assert_eq!(r.late_count, 0);
        assert_eq!(r.delivered_count, 1);
    }

    #[test]
    fn delivery_after_deadline_late() {
        let mut r = report();
        r.record_delivery(0, 1250 * US);
        assert_eq!(r.late_count, 1);
    }

    #[test]
    fn four_slot_delay_is_on_time() {
        // generated at the start of slot k, delivered at the end of slot k + 3
        let mut r = report();
        let k = 17;
        r.record_delivery(k * 250 * US, (k + 4) * 250 * US);
        assert_eq!(r.late_count, 0);
    }

    #[test]
    fn p_late_arithmetic() {
        let mut r = report();
        for d in [500 * US, 1200 * US, 900 * US, 2 * MS] {
            r.record_delivery(0, d);
        }
        assert_eq!(r.p_late(), Ok(0.5));
    }

    #[test]
    fn p_late_zero_and_no_samples() {
        let mut r = report();
        assert_eq!(r.p_late(), Err(MetricsError::NoSamples));
        r.record_delivery(0, 300 * US);
        assert_eq!(r.p_late(), Ok(0.0));
    }

    #[test]
    fn histogram_bins_and_overflow() {
        let mut r = report();
        r.record_delivery(0, 250 * US);
        r.record_delivery(0, 274 * US);
        r.record_delivery(0, 10 * MS);
        assert_eq!(r.delay_histogram[10], 2);
        assert_eq!(r.delay_histogram[HISTOGRAM_BINS], 1);
        assert_eq!(r.delay_histogram.iter().sum::<u64>(), r.delivered_count);
    }

    #[test]
    fn share_of_static_uora() {
        let mut r = report();
        let s = SlotSchedule::random_access_only(0, 1, 18);
        let o = SlotOutcome {
            results: alloc::vec![crate::model::RuResult::Empty],
        };
        for _ in 0..1000 {
            r.record_slot(&s, &o);
        }
        assert_eq!(r.nonrta_share(), Ok(17.0 / 18.0));
        assert_eq!(r.ra_rus + r.deterministic_rus + r.nonrta_rus, r.slot_count * 18);
    }

    #[test]
    fn full_cycle_leaves_nothing() {
        let cfg = SimConfig {
            f_max: 5,
            ..SimConfig::default()
        };
        let mut r = MetricsReport::new(&cfg);
        let mut s = SlotSchedule::random_access_only(0, 1, 5);
        s.assignments
            .extend((0..4).map(|i| RuAssignment::Deterministic(alloc::vec![i])));
        s.nonrta_rus = 0;
        let o = SlotOutcome {
            results: alloc::vec![crate::model::RuResult::Empty; 5],
        };
        r.record_slot(&s, &o);
        assert_eq!(r.nonrta_share(), Ok(0.0));
    }

    #[test]
    fn merge_doubles_counts() {
        let mut r = report();
        r.record_delivery(0, 500 * US);
        r.record_delivery(0, 1500 * US);
        let m = merge(&[r.clone(), r.clone()]).unwrap();
        assert_eq!(m.totals.delivered_count, 4);
        assert_eq!(m.totals.late_count, 2);
        assert_eq!(m.totals.p_late(), Ok(0.5));
        let est = m.p_late.unwrap();
        assert_eq!((est.mean, est.stderr, est.samples), (0.5, 0.0, 2));
    }

    #[test]
    fn merge_rejects_mixed_configs() {
        let a = report();
        let b = MetricsReport::new(&SimConfig {
            n_stations: 3,
            ..SimConfig::default()
        });
        assert!(matches!(merge(&[a, b]), Err(MetricsError::ConfigMismatch { .. })));
        assert_eq!(merge(&[]), Err(MetricsError::NoReports));
    }

    #[test]
    fn estimate_of_equal_samples_is_exact() {
        let x = 17.0 / 18.0;
        let e = Estimate::from_samples(&[x; 10]).unwrap();
        assert_eq!((e.mean, e.stderr), (x, 0.0));
    }

    #[test]
    fn estimate_stderr() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(e.mean, 2.5);
        // s^2 = 5/3, stderr = sqrt(5/12)
        assert!((e.stderr - libm::sqrt(5.0 / 12.0)).abs() < 1e-15);
    }
}
