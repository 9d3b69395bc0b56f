//! Network and subnetwork addresses.
//!
//! NSAP addresses and NETs share the same octet form (1 to 20 octets); the
//! type distinction only records what the address names. SNPAs are 6-octet
//! station addresses on the simulated broadcast subnetwork.

use std::fmt;

use thiserror::Error;

/// Longest NSAP address, in octets.
pub const MAX_NSAP_LEN: usize = 20;

/// Octets in a subnetwork point of attachment.
pub const SNPA_LEN: usize = 6;

/// AFI used by the ATN addressing plan when no other value is configured.
pub const ATN_DEFAULT_AFI: u8 = 0x47;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AddressError {
    #[error("address length {0} outside 1..=20")]
    Length(usize),
    #[error("address AFI {found:#04x} does not match profile AFI {expected:#04x}")]
    Afi { expected: u8, found: u8 },
    #[error("SNPA must be 6 octets, got {0}")]
    SnpaLength(usize),
    #[error("invalid hex: {0}")]
    Hex(String),
}

/// Rules applied to received NSAP addresses and NETs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValidationProfile {
    /// Any length from 1 to 20 octets.
    #[default]
    Lenient,
    /// Exactly 20 octets whose first octet is the given AFI.
    Atn { afi: u8 },
}

impl ValidationProfile {
    pub fn atn() -> Self {
        ValidationProfile::Atn {
            afi: ATN_DEFAULT_AFI,
        }
    }
}

/// Checks an address against a validation profile.
pub fn validate_nsap(addr: &[u8], profile: ValidationProfile) -> Result<(), AddressError> {
    match profile {
        ValidationProfile::Lenient => {
            if addr.is_empty() || addr.len() > MAX_NSAP_LEN {
                return Err(AddressError::Length(addr.len()));
            }
        }
        ValidationProfile::Atn { afi } => {
            if addr.len() != MAX_NSAP_LEN {
                return Err(AddressError::Length(addr.len()));
            }
            if addr[0] != afi {
                return Err(AddressError::Afi {
                    expected: afi,
                    found: addr[0],
                });
            }
        }
    }
    Ok(())
}

/// Parses lowercase or uppercase hex, ignoring ASCII whitespace.
pub fn parse_hex(text: &str) -> Result<Vec<u8>, AddressError> {
    let compact: String = text.chars().filter(|c| !c.is_ascii_whitespace()).collect();
    hex::decode(&compact).map_err(|e| AddressError::Hex(e.to_string()))
}

macro_rules! nsap_like {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Vec<u8>);

        impl $name {
            pub fn new(octets: impl Into<Vec<u8>>) -> Result<Self, AddressError> {
                let octets = octets.into();
                validate_nsap(&octets, ValidationProfile::Lenient)?;
                Ok(Self(octets))
            }

            pub fn from_hex(text: &str) -> Result<Self, AddressError> {
                Self::new(parse_hex(text)?)
            }

            pub fn as_bytes(&self) -> &[u8] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn to_hex(&self) -> String {
                hex::encode(&self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.to_hex())
            }
        }
    };
}

nsap_like!(
    /// Network service access point address.
    NsapAddress
);

nsap_like!(
    /// Network entity title: an NSAP-format address naming a network entity.
    NetAddress
);

impl From<NetAddress> for NsapAddress {
    fn from(net: NetAddress) -> Self {
        NsapAddress(net.0)
    }
}

impl From<NsapAddress> for NetAddress {
    fn from(nsap: NsapAddress) -> Self {
        NetAddress(nsap.0)
    }
}

/// Subnetwork point of attachment (a 6-octet station address).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SnpaAddress(pub [u8; SNPA_LEN]);

impl SnpaAddress {
    pub const fn new(octets: [u8; SNPA_LEN]) -> Self {
        SnpaAddress(octets)
    }

    pub fn from_slice(octets: &[u8]) -> Result<Self, AddressError> {
        let arr: [u8; SNPA_LEN] = octets
            .try_into()
            .map_err(|_| AddressError::SnpaLength(octets.len()))?;
        Ok(SnpaAddress(arr))
    }

    /// Accepts plain hex or colon-separated pairs.
    pub fn from_hex(text: &str) -> Result<Self, AddressError> {
        Self::from_slice(&parse_hex(&text.replace(':', ""))?)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn is_group(&self) -> bool {
        self.0[0] & 0x01 != 0
    }
}

impl fmt::Display for SnpaAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}
