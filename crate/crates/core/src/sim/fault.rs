//! Frame faults keyed by transmission ordinal (1-based, counted over every
//! frame the subnetwork carries).

use rand::Rng;

use crate::checksum::{fill_checksum, MIN_HEADER_LEN};
use crate::pdu::NLPID_ESIS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OctetChoice {
    At(usize),
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueChoice {
    Set(u8),
    /// A value that differs from the old one and is not its checksum alias
    /// (0x00 and 0xff are equal modulo 255).
    Random,
}

/// Overwrite one payload octet of a given frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Corruption {
    pub ordinal: u64,
    pub octet: OctetChoice,
    pub value: ValueChoice,
    /// Recompute the header checksum after the change, so the frame fails
    /// later validation instead of the checksum.
    pub reseal: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaultPlan {
    pub drops: Vec<u64>,
    pub corruptions: Vec<Corruption>,
}

#[derive(Debug, Default, PartialEq, Eq)]
pub(crate) struct FaultOutcome {
    dropped: bool,
    notes: Vec<String>,
}

impl FaultOutcome {
    pub(crate) fn dropped(&self) -> bool {
        self.dropped
    }

    pub(crate) fn note(&self) -> Option<String> {
        (!self.notes.is_empty()).then(|| self.notes.join(","))
    }
}

fn alias(v: u8) -> u8 {
    match v {
        0x00 => 0xff,
        0xff => 0x00,
        v => v,
    }
}

impl FaultPlan {
    pub fn is_empty(&self) -> bool {
        self.drops.is_empty() && self.corruptions.is_empty()
    }

    pub(crate) fn apply<R: Rng>(
        &self,
        ordinal: u64,
        payload: &mut [u8],
        rng: &mut R,
    ) -> FaultOutcome {
        let mut out = FaultOutcome::default();
        if self.drops.contains(&ordinal) {
            out.dropped = true;
            out.notes.push("drop".to_string());
            return out;
        }
        for c in self.corruptions.iter().filter(|c| c.ordinal == ordinal) {
            let index = match c.octet {
                OctetChoice::At(i) => i,
                OctetChoice::Random if payload.is_empty() => 0,
                OctetChoice::Random => rng.gen_range(0..payload.len()),
            };
            if index >= payload.len() {
                out.notes.push(format!("corrupt-skipped@{index}"));
                continue;
            }
            let old = payload[index];
            let new = match c.value {
                ValueChoice::Set(v) => v,
                ValueChoice::Random => loop {
                    let v: u8 = rng.gen();
                    if v != old && v != alias(old) {
                        break v;
                    }
                },
            };
            payload[index] = new;
            let mut note = format!("corrupt@{index}:{old:02x}>{new:02x}");
            if c.reseal && reseal(payload) {
                note.push_str("+reseal");
            }
            out.notes.push(note);
        }
        out
    }
}

/// Regenerates the checksum of an ES-IS header in place. Returns false when
/// the payload has no header to seal.
fn reseal(payload: &mut [u8]) -> bool {
    if payload.len() < MIN_HEADER_LEN || payload[0] != NLPID_ESIS {
        return false;
    }
    let span = usize::from(payload[1]).clamp(MIN_HEADER_LEN, payload.len());
    fill_checksum(&mut payload[..span]).is_ok()
}
