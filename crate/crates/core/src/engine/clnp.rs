//! Two-address stand-in for a CLNP data PDU.
//!
//! Only enough of CLNP exists to exercise redirects: a frame payload of
//! `129, len, source, len, destination`.

use crate::address::{validate_nsap, NsapAddress, ValidationProfile};

/// NLPID of ISO 8473 (CLNP).
pub const NLPID_CLNP: u8 = 129;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalClnpPdu {
    pub source: NsapAddress,
    pub destination: NsapAddress,
}

impl MinimalClnpPdu {
    pub fn new(source: NsapAddress, destination: NsapAddress) -> Self {
        MinimalClnpPdu {
            source,
            destination,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = vec![NLPID_CLNP];
        for addr in [&self.source, &self.destination] {
            out.push(addr.len() as u8);
            out.extend_from_slice(addr.as_bytes());
        }
        out
    }

    /// Returns `None` for anything that is not a well-formed stub whose
    /// addresses pass `profile`.
    pub fn decode(raw: &[u8], profile: ValidationProfile) -> Option<Self> {
        let (&nlpid, mut rest) = raw.split_first()?;
        if nlpid != NLPID_CLNP {
            return None;
        }
        let mut next = || -> Option<NsapAddress> {
            let (&len, tail) = rest.split_first()?;
            let len = usize::from(len);
            let octets = tail.get(..len)?;
            rest = &tail[len..];
            validate_nsap(octets, profile).ok()?;
            NsapAddress::new(octets).ok()
        };
        let source = next()?;
        let destination = next()?;
        Some(MinimalClnpPdu::new(source, destination))
    }
}
