use crate::address::SnpaAddress;
use crate::engine::NLPID_CLNP;
use crate::pdu::{PduType, NLPID_ESIS};

/// All end systems multicast group.
pub const ALL_ES: SnpaAddress = SnpaAddress::new([0x09, 0x00, 0x2b, 0x00, 0x00, 0x04]);
/// All intermediate systems multicast group.
pub const ALL_IS: SnpaAddress = SnpaAddress::new([0x09, 0x00, 0x2b, 0x00, 0x00, 0x05]);
pub const BROADCAST: SnpaAddress = SnpaAddress::new([0xff; 6]);

/// A data-link frame on the simulated subnetwork.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub destination: SnpaAddress,
    pub source: SnpaAddress,
    /// Network-layer octets; the first one is the NLPID.
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(destination: SnpaAddress, source: SnpaAddress, payload: Vec<u8>) -> Self {
        Frame {
            destination,
            source,
            payload,
        }
    }

    pub fn is_group(&self) -> bool {
        self.destination.is_group()
    }

    /// Short protocol label taken from the NLPID and type octets.
    pub fn label(&self) -> &'static str {
        match self.payload.first() {
            Some(&NLPID_ESIS) => self
                .payload
                .get(4)
                .and_then(|&t| PduType::from_code(t & 0x1f))
                .map_or("ESIS?", PduType::name),
            Some(&NLPID_CLNP) => "CLNP",
            _ => "OTHER",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        let s = SnpaAddress::new([2; 6]);
        assert_eq!(Frame::new(ALL_IS, s, vec![0x82, 9, 1, 0, 2]).label(), "ESH");
        assert_eq!(Frame::new(ALL_IS, s, vec![0x81]).label(), "CLNP");
        assert_eq!(Frame::new(ALL_IS, s, vec![0x55]).label(), "OTHER");
        assert_eq!(Frame::new(ALL_IS, s, vec![0x82]).label(), "ESIS?");
        assert!(ALL_ES.is_group() && ALL_IS.is_group() && BROADCAST.is_group());
        assert!(!s.is_group());
    }
}
