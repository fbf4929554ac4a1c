//! OFDMA back-off (OBO) for random-access RUs.

use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OboDecision {
    /// Transmit in the RA RU with this index among the slot's RA RUs.
    Transmit(usize),
    /// Keep waiting; carries the counter after decrement.
    Defer(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TxResult {
    Success,
    Collision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OboState {
    ocw: u32,
    counter: Option<u32>,
}

impl OboState {
    pub fn new(ocw_min: u32) -> Self {
        OboState {
            ocw: ocw_min,
            counter: None,
        }
    }

    pub fn ocw(&self) -> u32 {
        self.ocw
    }

    pub fn counter(&self) -> Option<u32> {
        self.counter
    }

    /// Draws the counter uniformly from `[0, ocw - 1]`.
    pub fn init_counter<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.counter = Some(rng.gen_range(0..self.ocw));
    }

    /// Reacts to a trigger frame offering `num_ra_rus` RA RUs.
    ///
    /// Panics if the counter is unset.
    pub fn on_trigger<R: Rng + ?Sized>(&mut self, num_ra_rus: usize, rng: &mut R) -> OboDecision {
        let counter = self.counter.expect("OBO counter must be initialized before a trigger");
        if (counter as usize) < num_ra_rus {
            OboDecision::Transmit(rng.gen_range(0..num_ra_rus))
        } else {
            let left = counter - num_ra_rus as u32;
            self.counter = Some(left);
            OboDecision::Defer(left)
        }
    }

    /// Updates the window after an RA transmission. A collision doubles the
    /// window (clamped to `ocw_max`) and redraws the counter from `rng`.
    pub fn on_result<R: Rng + ?Sized>(&mut self, result: TxResult, ocw_min: u32, ocw_max: u32, rng: &mut R) {
        match result {
            TxResult::Success => {
                self.ocw = ocw_min;
                self.counter = None;
            }
            TxResult::Collision => {
                self.ocw = self.ocw.saturating_mul(2).min(ocw_max);
                self.init_counter(rng);
            }
        }
    }

    /// Drops the countdown of a frame delivered outside random access.
    pub fn clear_counter(&mut self) {
        self.counter = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Purpose};

    fn rng() -> crate::rng::StreamRng {
        substream(11, 0, Purpose::OboInit)
    }

    #[test]
    fn unit_window_always_zero() {
        let mut r = rng();
        for _ in 0..1000 {
            let mut s = OboState::new(1);
            s.init_counter(&mut r);
            assert_eq!(s.counter(), Some(0));
        }
    }

    #[test]
    fn window_of_two_range() {
        let mut r = rng();
        let mut seen = [false; 2];
        for _ in 0..1000 {
            let mut s = OboState::new(2);
            s.init_counter(&mut r);
            seen[s.counter().unwrap() as usize] = true;
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn transmits_when_counter_below_ra_count() {
        let mut r = rng();
        let mut hits = [0u32; 3];
        for _ in 0..3000 {
            let mut s = OboState {
                ocw: 1,
                counter: Some(0),
            };
            match s.on_trigger(3, &mut r) {
                OboDecision::Transmit(ru) => hits[ru] += 1,
                d => panic!("{d:?}"),
            }
        }
        assert!(hits.iter().all(|&h| h > 800), "{hits:?}");
    }

    #[test]
    fn defers_and_decrements() {
        let mut s = OboState {
            ocw: 8,
            counter: Some(5),
        };
        assert_eq!(s.on_trigger(3, &mut rng()), OboDecision::Defer(2));
        assert_eq!(s.counter(), Some(2));
    }

    #[test]
    fn no_ra_rus_keeps_counter() {
        let mut s = OboState {
            ocw: 8,
            counter: Some(2),
        };
        assert_eq!(s.on_trigger(0, &mut rng()), OboDecision::Defer(2));
        assert_eq!(s.counter(), Some(2));
    }

    #[test]
    fn collision_doubles_window() {
        let mut s = OboState {
            ocw: 4,
            counter: Some(0),
        };
        s.on_result(TxResult::Collision, 1, 32, &mut rng());
        assert_eq!(s.ocw(), 8);
        assert!(s.counter().unwrap() < 8);
    }

    #[test]
    fn collision_at_max_keeps_window() {
        let mut s = OboState {
            ocw: 32,
            counter: Some(0),
        };
        s.on_result(TxResult::Collision, 1, 32, &mut rng());
        assert_eq!(s.ocw(), 32);
    }

    #[test]
    fn success_resets_window() {
        let mut s = OboState {
            ocw: 16,
            counter: Some(0),
        };
        s.on_result(TxResult::Success, 1, 32, &mut rng());
        assert_eq!(s, OboState { ocw: 1, counter: None });
    }
}
