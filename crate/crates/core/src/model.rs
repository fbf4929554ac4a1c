//! Domain types shared by every other module: scenario configuration, frames,
//! per-slot RU schedules and the outcomes the AP observes for them.

use alloc::vec::Vec;
use core::fmt;

/// Simulated time in integer nanoseconds.
pub type Nanos = u64;

/// Dense station index in `0..n_stations`.
pub type StationId = usize;

pub const NANOS_PER_SEC: f64 = 1e9;

/// Converts seconds to the nearest whole nanosecond.
pub fn secs_to_nanos(secs: f64) -> Nanos {
    libm::round(secs * NANOS_PER_SEC) as Nanos
}

pub fn nanos_to_secs(nanos: Nanos) -> f64 {
    nanos as f64 / NANOS_PER_SEC
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchedulerKind {
    /// Fixed number of RA RUs every slot, the rest left to non-RTA traffic.
    UoraStatic,
    /// Cyclic Resource Assignment.
    Cra,
    /// Group Resource Assignment.
    Gra,
}

impl SchedulerKind {
    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::UoraStatic => "uora",
            SchedulerKind::Cra => "cra",
            SchedulerKind::Gra => "gra",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "uora" | "uora-static" => Some(SchedulerKind::UoraStatic),
            "cra" => Some(SchedulerKind::Cra),
            "gra" => Some(SchedulerKind::Gra),
            _ => None,
        }
    }
}

/// Which stations transmit in a deterministic RU.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelRules {
    /// Every assigned station transmits, padding when it has no data.
    Ax,
    /// Only assigned stations holding buffered data transmit.
    Be,
}

impl ChannelRules {
    pub fn name(self) -> &'static str {
        match self {
            ChannelRules::Ax => "ax",
            ChannelRules::Be => "be",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "ax" => Some(ChannelRules::Ax),
            "be" => Some(ChannelRules::Be),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopRule {
    /// Stop once this many frames were delivered after warm-up.
    PacketCount,
    /// Stop after this many post-warm-up slots.
    SlotCount,
}

impl StopRule {
    pub fn name(self) -> &'static str {
        match self {
            StopRule::PacketCount => "packet-count",
            StopRule::SlotCount => "slot-count",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "packet-count" | "packets" => Some(StopRule::PacketCount),
            "slot-count" | "slots" => Some(StopRule::SlotCount),
            _ => None,
        }
    }
}

/// How schedulers permute station ids before cycling or grouping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShuffleMode {
    Random,
    /// Keep ids in ascending order; used by conformance fixtures.
    Identity,
}

/// Full scenario parameterization.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_stations: usize,
    /// RTA frame regeneration rate per station, in 1/s.
    pub arrival_rate: f64,
    /// RUs reserved for random access.
    pub f_ra: usize,
    /// Total RU budget per slot.
    pub f_max: usize,
    pub slot_duration: Nanos,
    pub deadline: Nanos,
    pub ocw_min: u32,
    pub ocw_max: u32,
    pub scheduler: SchedulerKind,
    pub rules: ChannelRules,
    pub stop_rule: StopRule,
    pub stop_value: u64,
    pub seed: u64,
    /// Leading slots excluded from metrics.
    pub warmup_slots: u64,
    /// Hard cap on simulated slots (warm-up included).
    pub max_slots: Option<u64>,
    pub shuffle: ShuffleMode,
}

impl Default for SimConfig {
    /// 18 RUs of 250 us, one RA RU, 1 ms deadline, OCW fixed at 1, GRA with
    /// the modified access rule.
    fn default() -> Self {
        SimConfig {
            n_stations: 50,
            arrival_rate: 200.0,
            f_ra: 1,
            f_max: 18,
            slot_duration: 250_000,
            deadline: 1_000_000,
            ocw_min: 1,
            ocw_max: 1,
            scheduler: SchedulerKind::Gra,
            rules: ChannelRules::Be,
            stop_rule: StopRule::PacketCount,
            stop_value: 10_000_000,
            seed: 0,
            warmup_slots: 1000,
            max_slots: None,
            shuffle: ShuffleMode::Random,
        }
    }
}

/// One violated configuration invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    FRaOutOfRange {
        f_ra: usize,
        f_max: usize,
    },
    NonPositiveArrivalRate(f64),
    ZeroSlotDuration,
    ZeroDeadline,
    ZeroOcwMin,
    OcwMaxBelowMin {
        ocw_min: u32,
        ocw_max: u32,
    },
    ZeroStopValue,
    GraRequiresBeRules,
    GraNeedsDeterministicRus,
    /// A packet-count run with no stations would never finish.
    PacketCountWithoutStations,
    ScriptedStationOutOfRange {
        station: StationId,
        n_stations: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FRaOutOfRange { f_ra, f_max } => {
                write!(f, "f_ra out of range: need 1 <= f_ra ({f_ra}) <= f_max ({f_max})")
            }
            Violation::NonPositiveArrivalRate(r) => {
                write!(f, "arrival_rate must be finite and > 0, got {r}")
            }
            Violation::ZeroSlotDuration => f.write_str("slot_duration must be > 0"),
            Violation::ZeroDeadline => f.write_str("deadline must be > 0"),
            Violation::ZeroOcwMin => f.write_str("ocw_min must be >= 1"),
            Violation::OcwMaxBelowMin { ocw_min, ocw_max } => {
                write!(f, "ocw_max ({ocw_max}) must be >= ocw_min ({ocw_min})")
            }
            Violation::ZeroStopValue => f.write_str("stop_value must be >= 1"),
            Violation::GraRequiresBeRules => {
                f.write_str("GRA requires modified (be) channel rules: shared RUs always collide under ax")
            }
            Violation::GraNeedsDeterministicRus => {
                f.write_str("GRA requires f_ra < f_max so marked stations can be granted group RUs")
            }
            Violation::PacketCountWithoutStations => {
                f.write_str("stop_rule packet-count needs n_stations >= 1; use slot-count")
            }
            Violation::ScriptedStationOutOfRange { station, n_stations } => {
                write!(
                    f,
                    "scripted arrival for station {station} but n_stations is {n_stations}"
                )
            }
        }
    }
}

/// Non-fatal configuration remarks.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigWarning {
    /// Doubling `ocw_min` never lands exactly on `ocw_max`; the window is
    /// clamped at `ocw_max` instead.
    OcwNotPowerOfTwoMultiple { ocw_min: u32, ocw_max: u32 },
    /// Static UORA with one RA RU and a unit window: two backlogged stations
    /// collide forever, so packet-count runs need `max_slots`.
    UoraMayLivelock,
}

impl fmt::Display for ConfigWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigWarning::OcwNotPowerOfTwoMultiple { ocw_min, ocw_max } => write!(
                f,
                "ocw_max ({ocw_max}) is not ocw_min ({ocw_min}) times a power of two; doubling clamps at ocw_max"
            ),
            ConfigWarning::UoraMayLivelock => f.write_str(
                "uora with f_ra = 1 and ocw_max = 1 livelocks once two stations are backlogged; set max_slots",
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    InvalidConfig(Vec<Violation>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::InvalidConfig(violations) => {
                f.write_str("invalid config")?;
                for (i, v) in violations.iter().enumerate() {
                    let sep = if i == 0 { ": " } else { "; " };
                    write!(f, "{sep}{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl core::error::Error for ConfigError {}

impl SimConfig {
    pub fn slot_duration_secs(&self) -> f64 {
        nanos_to_secs(self.slot_duration)
    }

    pub fn deadline_secs(&self) -> f64 {
        nanos_to_secs(self.deadline)
    }

    /// Returns `self` unchanged when every invariant holds, otherwise the
    /// full list of violations.
    pub fn validate(self) -> Result<SimConfig, ConfigError> {
        let mut v = Vec::new();
        if self.f_ra < 1 || self.f_ra > self.f_max {
            v.push(Violation::FRaOutOfRange {
                f_ra: self.f_ra,
                f_max: self.f_max,
            });
        }
        if !(self.arrival_rate.is_finite() && self.arrival_rate > 0.0) {
            v.push(Violation::NonPositiveArrivalRate(self.arrival_rate));
        }
        if self.slot_duration == 0 {
            v.push(Violation::ZeroSlotDuration);
        }
        if self.deadline == 0 {
            v.push(Violation::ZeroDeadline);
        }
        if self.ocw_min < 1 {
            v.push(Violation::ZeroOcwMin);
        }
        if self.ocw_max < self.ocw_min {
            v.push(Violation::OcwMaxBelowMin {
                ocw_min: self.ocw_min,
                ocw_max: self.ocw_max,
            });
        }
        if self.stop_value == 0 {
            v.push(Violation::ZeroStopValue);
        }
        if self.scheduler == SchedulerKind::Gra {
            if self.rules == ChannelRules::Ax {
                v.push(Violation::GraRequiresBeRules);
            }
            if self.f_ra >= self.f_max && self.f_ra >= 1 {
                v.push(Violation::GraNeedsDeterministicRus);
            }
        }
        if self.stop_rule == StopRule::PacketCount && self.n_stations == 0 {
            v.push(Violation::PacketCountWithoutStations);
        }
        if v.is_empty() {
            Ok(self)
        } else {
            Err(ConfigError::InvalidConfig(v))
        }
    }

    pub fn warnings(&self) -> Vec<ConfigWarning> {
        let mut w = Vec::new();
        if self.ocw_min >= 1 && self.ocw_max >= self.ocw_min {
            let mut ocw = self.ocw_min as u64;
            while ocw < self.ocw_max as u64 {
                ocw *= 2;
            }
            if ocw != self.ocw_max as u64 {
                w.push(ConfigWarning::OcwNotPowerOfTwoMultiple {
                    ocw_min: self.ocw_min,
                    ocw_max: self.ocw_max,
                });
            }
        }
        if self.scheduler == SchedulerKind::UoraStatic
            && self.f_ra == 1
            && self.ocw_max == 1
            && self.n_stations >= 2
            && self.stop_rule == StopRule::PacketCount
            && self.max_slots.is_none()
        {
            w.push(ConfigWarning::UoraMayLivelock);
        }
        w
    }

    /// 64-bit FNV-1a digest of every field except `seed`, so replications
    /// of one scenario share a digest.
    pub fn digest(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write_u64(self.n_stations as u64);
        h.write_u64(self.arrival_rate.to_bits());
        h.write_u64(self.f_ra as u64);
        h.write_u64(self.f_max as u64);
        h.write_u64(self.slot_duration);
        h.write_u64(self.deadline);
        h.write_u64(self.ocw_min as u64);
        h.write_u64(self.ocw_max as u64);
        h.write_bytes(self.scheduler.name().as_bytes());
        h.write_bytes(self.rules.name().as_bytes());
        h.write_bytes(self.stop_rule.name().as_bytes());
        h.write_u64(self.stop_value);
        h.write_u64(self.warmup_slots);
        h.write_u64(self.max_slots.map_or(u64::MAX, |m| m));
        h.write_u64(matches!(self.shuffle, ShuffleMode::Identity) as u64);
        h.finish()
    }
}

struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    fn write_bytes(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= *b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
        // field separator
        self.0 ^= 0xff;
        self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
    }

    fn write_u64(&mut self, v: u64) {
        self.write_bytes(&v.to_le_bytes());
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// An RTA frame. A station buffers at most one at a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frame {
    pub owner: StationId,
    pub generated_at: Nanos,
    pub delivered_at: Option<Nanos>,
}

impl Frame {
    pub fn new(owner: StationId, generated_at: Nanos) -> Self {
        Frame {
            owner,
            generated_at,
            delivered_at: None,
        }
    }

    pub fn delay(&self) -> Option<Nanos> {
        self.delivered_at.map(|d| d - self.generated_at)
    }
}

/// What a single RU in a slot is used for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuAssignment {
    RandomAccess,
    /// One station under CRA; a group of one or more under GRA.
    Deterministic(Vec<StationId>),
}

impl RuAssignment {
    pub fn is_random_access(&self) -> bool {
        matches!(self, RuAssignment::RandomAccess)
    }

    pub fn stations(&self) -> &[StationId] {
        match self {
            RuAssignment::RandomAccess => &[],
            RuAssignment::Deterministic(s) => s,
        }
    }
}

/// RU allocation for one slot. RUs not listed in `assignments` go to
/// non-RTA traffic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotSchedule {
    pub slot_index: u64,
    pub assignments: Vec<RuAssignment>,
    pub nonrta_rus: usize,
}

/// A schedule that breaks a structural invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleViolation {
    RuBudget { used: usize, f_max: usize },
    DuplicateStation(StationId),
    EmptyGroup(usize),
    UnknownStation(StationId),
}

impl SlotSchedule {
    pub fn random_access_only(slot_index: u64, f_ra: usize, f_max: usize) -> Self {
        SlotSchedule {
            slot_index,
            assignments: alloc::vec![RuAssignment::RandomAccess; f_ra],
            nonrta_rus: f_max - f_ra,
        }
    }

    pub fn ra_count(&self) -> usize {
        self.assignments.iter().filter(|a| a.is_random_access()).count()
    }

    pub fn deterministic_count(&self) -> usize {
        self.assignments.len() - self.ra_count()
    }

    /// Checks RU conservation and that no station holds two deterministic
    /// RUs in this slot.
    pub fn check(&self, f_max: usize, n_stations: usize) -> Result<(), ScheduleViolation> {
        let used = self.assignments.len() + self.nonrta_rus;
        if used != f_max {
            return Err(ScheduleViolation::RuBudget { used, f_max });
        }
        let mut seen = alloc::vec![false; n_stations];
        for (ru, a) in self.assignments.iter().enumerate() {
            if let RuAssignment::Deterministic(group) = a {
                if group.is_empty() {
                    return Err(ScheduleViolation::EmptyGroup(ru));
                }
                for &s in group {
                    let slot = seen.get_mut(s).ok_or(ScheduleViolation::UnknownStation(s))?;
                    if *slot {
                        return Err(ScheduleViolation::DuplicateStation(s));
                    }
                    *slot = true;
                }
            }
        }
        Ok(())
    }
}

/// Result the AP observes in one RU.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuResult {
    Empty,
    Success {
        station: StationId,
        more_data: bool,
    },
    /// Two or more simultaneous transmissions; nothing delivered.
    Collision(Vec<StationId>),
    /// Padding without data (802.11ax rules only); nothing delivered.
    PaddingBusy(Vec<StationId>),
}

impl RuResult {
    pub fn is_collision(&self) -> bool {
        matches!(self, RuResult::Collision(_))
    }
}

/// Per-RU results, index-aligned with `SlotSchedule::assignments`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotOutcome {
    pub results: Vec<RuResult>,
}

impl SlotOutcome {
    pub fn any_collision(&self) -> bool {
        self.results.iter().any(RuResult::is_collision)
    }

    /// Whether any random-access RU of `schedule` collided.
    pub fn ra_collision(&self, schedule: &SlotSchedule) -> bool {
        schedule
            .assignments
            .iter()
            .zip(&self.results)
            .any(|(a, r)| a.is_random_access() && r.is_collision())
    }

    pub fn collision_count(&self) -> usize {
        self.results.iter().filter(|r| r.is_collision()).count()
    }

    pub fn is_aligned_with(&self, schedule: &SlotSchedule) -> bool {
        self.results.len() == schedule.assignments.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn baseline_setup() -> SimConfig {
        SimConfig {
            n_stations: 50,
            arrival_rate: 200.0,
            f_ra: 1,
            f_max: 18,
            slot_duration: 250_000,
            deadline: 1_000_000,
            ocw_min: 1,
            ocw_max: 1,
            scheduler: SchedulerKind::Gra,
            rules: ChannelRules::Be,
            ..SimConfig::default()
        }
    }

    #[test]
    fn baseline_setup_is_valid() {
        let cfg = baseline_setup();
        assert_eq!(cfg.clone().validate(), Ok(cfg));
    }

    #[test]
    fn zero_ra_rus_rejected() {
        let cfg = SimConfig {
            f_ra: 0,
            ..baseline_setup()
        };
        let Err(ConfigError::InvalidConfig(v)) = cfg.validate() else {
            panic!()
        };
        assert_eq!(v, vec![Violation::FRaOutOfRange { f_ra: 0, f_max: 18 }]);
    }

    #[test]
    fn gra_under_ax_rejected() {
        let cfg = SimConfig {
            rules: ChannelRules::Ax,
            ..baseline_setup()
        };
        let Err(ConfigError::InvalidConfig(v)) = cfg.validate() else {
            panic!()
        };
        assert!(v.contains(&Violation::GraRequiresBeRules));
    }

    #[test]
    fn reports_every_violation() {
        let cfg = SimConfig {
            f_ra: 20,
            arrival_rate: -1.0,
            slot_duration: 0,
            ocw_min: 4,
            ocw_max: 2,
            ..baseline_setup()
        };
        let Err(ConfigError::InvalidConfig(v)) = cfg.validate() else {
            panic!()
        };
        assert_eq!(v.len(), 5, "{v:?}");
    }

    #[test]
    fn ocw_warning() {
        let ok = SimConfig {
            ocw_min: 8,
            ocw_max: 64,
            ..baseline_setup()
        };
        assert!(ok.warnings().is_empty());
        let odd = SimConfig {
            ocw_min: 8,
            ocw_max: 48,
            ..baseline_setup()
        };
        assert_eq!(odd.warnings().len(), 1);
    }

    #[test]
    fn digest_ignores_seed_only() {
        let a = baseline_setup();
        let b = SimConfig {
            seed: 99,
            ..baseline_setup()
        };
        let c = SimConfig {
            n_stations: 49,
            ..baseline_setup()
        };
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn schedule_check() {
        let s = SlotSchedule {
            slot_index: 0,
            assignments: vec![
                RuAssignment::RandomAccess,
                RuAssignment::Deterministic(vec![0, 1]),
                RuAssignment::Deterministic(vec![1]),
            ],
            nonrta_rus: 2,
        };
        assert_eq!(s.check(5, 4), Err(ScheduleViolation::DuplicateStation(1)));
        assert_eq!(s.check(6, 4), Err(ScheduleViolation::RuBudget { used: 5, f_max: 6 }));
        assert!(SlotSchedule::random_access_only(0, 1, 18).check(18, 0).is_ok());
    }
}
