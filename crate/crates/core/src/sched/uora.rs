use crate::model::SlotSchedule;

/// Plain UORA: the same `f_ra` RA RUs every slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UoraStatic {
    f_ra: usize,
    f_max: usize,
}

impl UoraStatic {
    pub fn new(f_ra: usize, f_max: usize) -> Self {
        UoraStatic { f_ra, f_max }
    }

    pub fn build(&self, slot_index: u64) -> SlotSchedule {
        SlotSchedule::random_access_only(slot_index, self.f_ra, self.f_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_ra_ru_of_eighteen() {
        let s = UoraStatic::new(1, 18).build(0);
        assert_eq!(s.ra_count(), 1);
        assert_eq!(s.nonrta_rus, 17);
    }

    #[test]
    fn all_ra() {
        let s = UoraStatic::new(18, 18).build(3);
        assert_eq!(s.ra_count(), 18);
        assert_eq!(s.nonrta_rus, 0);
    }

    #[test]
    fn identical_every_slot() {
        let u = UoraStatic::new(2, 18);
        let a = u.build(0);
        let b = u.build(1);
        assert_eq!(a.assignments, b.assignments);
        assert_eq!(a.nonrta_rus, 16);
    }
}
