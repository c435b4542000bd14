use crate::mac::TrafficClass;

/// DIFS, in slots, per traffic class. SYNC frames use the class-I value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DifsProfile {
    pub class1_slots: u32,
    pub class2_slots: u32,
}

impl Default for DifsProfile {
    fn default() -> Self {
        DifsProfile {
            class1_slots: 8,
            class2_slots: 15,
        }
    }
}

impl DifsProfile {
    /// Same DIFS for everything, as plain S-MAC does.
    pub fn uniform(slots: u32) -> Self {
        DifsProfile {
            class1_slots: slots,
            class2_slots: slots,
        }
    }

    pub fn slots(&self, class: Option<TrafficClass>) -> u32 {
        match class {
            Some(TrafficClass::ClassII) => self.class2_slots,
            Some(TrafficClass::ClassI) | None => self.class1_slots,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sync_uses_class1_value() {
        let d = DifsProfile::default();
        assert_eq!(d.slots(None), 8);
        assert_eq!(d.slots(Some(TrafficClass::ClassII)), 15);
        assert!(d.class1_slots < d.class2_slots);
    }
}
