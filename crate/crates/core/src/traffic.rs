//! Per-station RTA frame regeneration.
//!
//! A station buffers at most one frame. After delivering it, the next frame
//! appears after an exponential gap anchored at the delivery instant.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::model::{secs_to_nanos, Frame, Nanos, StationId};
use crate::rng::StreamRng;

/// Inverse-CDF exponential sample, in seconds. `draw` must lie in `[0, 1)`.
pub fn sample_interarrival(rate: f64, draw: f64) -> f64 {
    -libm::log(1.0 - draw) / rate
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrafficError {
    NoPendingFrame(StationId),
}

impl fmt::Display for TrafficError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrafficError::NoPendingFrame(s) => write!(f, "station {s} has no pending frame"),
        }
    }
}

impl core::error::Error for TrafficError {}

/// Where the next frame of a station comes from.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum ArrivalSource {
    /// Exponential gaps with the given rate (1/s).
    Poisson { rate: f64, rng: StreamRng },
    /// A new frame appears the instant the previous one is delivered.
    Saturated,
    /// Fixed arrival instants, consumed in order.
    Scripted(VecDeque<Nanos>),
}

#[derive(Debug, Clone)]
pub struct StationTraffic {
    id: StationId,
    pending: Option<Frame>,
    next_arrival_at: Option<Nanos>,
    source: ArrivalSource,
}

impl StationTraffic {
    /// Poisson source; the first arrival is one exponential gap after t = 0.
    pub fn poisson(id: StationId, rate: f64, mut rng: StreamRng) -> Self {
        let first = secs_to_nanos(sample_interarrival(rate, rng.gen()));
        StationTraffic {
            id,
            pending: None,
            next_arrival_at: Some(first),
            source: ArrivalSource::Poisson { rate, rng },
        }
    }

    /// Always backlogged: the first frame is generated at t = 0.
    pub fn saturated(id: StationId) -> Self {
        StationTraffic {
            id,
            pending: None,
            next_arrival_at: Some(0),
            source: ArrivalSource::Saturated,
        }
    }

    pub fn scripted(id: StationId, mut times: Vec<Nanos>) -> Self {
        times.sort_unstable();
        let mut queue: VecDeque<Nanos> = times.into();
        let next_arrival_at = queue.pop_front();
        StationTraffic {
            id,
            pending: None,
            next_arrival_at,
            source: ArrivalSource::Scripted(queue),
        }
    }

    pub fn id(&self) -> StationId {
        self.id
    }

    pub fn pending(&self) -> Option<&Frame> {
        self.pending.as_ref()
    }

    pub fn has_pending(&self) -> bool {
        self.pending.is_some()
    }

    pub fn next_arrival_at(&self) -> Option<Nanos> {
        self.next_arrival_at
    }

    /// Materializes the next frame if it arrived at or before `now`.
    pub fn advance_to(&mut self, now: Nanos) {
        if self.pending.is_some() {
            return;
        }
        if let Some(t) = self.next_arrival_at {
            if t <= now {
                self.pending = Some(Frame::new(self.id, t));
                self.next_arrival_at = None;
            }
        }
    }

    /// Marks the pending frame delivered at `at`, returns it, and schedules
    /// the next arrival.
    pub fn on_delivery(&mut self, at: Nanos) -> Result<Frame, TrafficError> {
        let mut frame = self.pending.take().ok_or(TrafficError::NoPendingFrame(self.id))?;
        frame.delivered_at = Some(at);
        self.next_arrival_at = match &mut self.source {
            ArrivalSource::Poisson { rate, rng } => Some(at + secs_to_nanos(sample_interarrival(*rate, rng.gen()))),
            ArrivalSource::Saturated => Some(at),
            ArrivalSource::Scripted(queue) => queue.pop_front(),
        };
        Ok(frame)
    }

    /// Single-frame buffer: never both a pending frame and a scheduled arrival.
    pub fn buffer_invariant_holds(&self) -> bool {
        !(self.pending.is_some() && self.next_arrival_at.is_some())
    }
}
