//! Option parameters carried after the address part.
//!
//! Each option is a `{code, length, value}` triple. Which codes a PDU may
//! carry depends on its type:
//!
//! | option        | code | legal on            | value                 |
//! |---------------|------|---------------------|-----------------------|
//! | Security      | 197  | all                 | 1..=254 opaque octets |
//! | Priority      | 205  | all                 | 1 octet, 0..=14       |
//! | Address Mask  | 225  | RD                  | 1..=254 octets        |
//! | SNPA Mask     | 226  | RD                  | 1..=254 octets        |
//! | ESCT          | 198  | ISH                 | 2 octets, seconds > 0 |

use super::{PduType, ProtocolErrorKind};

pub const SECURITY: u8 = 197;
pub const ESCT: u8 = 198;
pub const PRIORITY: u8 = 205;
pub const ADDRESS_MASK: u8 = 225;
pub const SNPA_MASK: u8 = 226;

/// Highest priority value.
pub const MAX_PRIORITY: u8 = 14;

/// Longest option value that fits the one-octet length field.
pub const MAX_OPTION_VALUE_LEN: usize = 254;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptionParam {
    pub code: u8,
    pub value: Vec<u8>,
}

impl OptionParam {
    pub fn new(code: u8, value: impl Into<Vec<u8>>) -> Self {
        OptionParam {
            code,
            value: value.into(),
        }
    }

    pub fn security(value: impl Into<Vec<u8>>) -> Self {
        Self::new(SECURITY, value)
    }

    pub fn priority(level: u8) -> Self {
        Self::new(PRIORITY, vec![level])
    }

    pub fn esct(seconds: u16) -> Self {
        Self::new(ESCT, seconds.to_be_bytes().to_vec())
    }

    pub fn address_mask(mask: impl Into<Vec<u8>>) -> Self {
        Self::new(ADDRESS_MASK, mask)
    }

    pub fn snpa_mask(mask: impl Into<Vec<u8>>) -> Self {
        Self::new(SNPA_MASK, mask)
    }

    pub fn encoded_len(&self) -> usize {
        2 + self.value.len()
    }

    /// Human-readable rendering of the value, used by the decoder dump.
    pub fn describe(&self) -> String {
        match self.code {
            PRIORITY if self.value.len() == 1 => format!("priority {}", self.value[0]),
            ESCT if self.value.len() == 2 => {
                format!(
                    "esct {}s",
                    u16::from_be_bytes([self.value[0], self.value[1]])
                )
            }
            _ => format!(
                "{} {}",
                name(self.code).unwrap_or("unknown"),
                hex::encode(&self.value)
            ),
        }
    }
}

/// Name of a known option code.
pub fn name(code: u8) -> Option<&'static str> {
    match code {
        SECURITY => Some("security"),
        ESCT => Some("esct"),
        PRIORITY => Some("priority"),
        ADDRESS_MASK => Some("address-mask"),
        SNPA_MASK => Some("snpa-mask"),
        _ => None,
    }
}

/// Inverse of [`name`], also accepting a decimal code.
pub fn code_from_name(text: &str) -> Option<u8> {
    match text {
        "security" => Some(SECURITY),
        "esct" => Some(ESCT),
        "priority" => Some(PRIORITY),
        "address-mask" | "addr-mask" => Some(ADDRESS_MASK),
        "snpa-mask" => Some(SNPA_MASK),
        _ => text.parse().ok(),
    }
}

pub fn is_legal(code: u8, pdu_type: PduType) -> bool {
    match code {
        SECURITY | PRIORITY => true,
        ADDRESS_MASK | SNPA_MASK => pdu_type == PduType::Rd,
        ESCT => pdu_type == PduType::Ish,
        _ => false,
    }
}

/// Checks one option against the code table, the legality matrix and the
/// per-code length and value rules. Duplicates are the caller's concern.
pub fn check(code: u8, value: &[u8], pdu_type: PduType) -> Result<(), ProtocolErrorKind> {
    if name(code).is_none() {
        return Err(ProtocolErrorKind::BadOptionCode);
    }
    if !is_legal(code, pdu_type) {
        return Err(ProtocolErrorKind::OptionIllegalForType);
    }
    if value.len() > MAX_OPTION_VALUE_LEN {
        return Err(ProtocolErrorKind::BadOptionLength);
    }
    match code {
        PRIORITY => {
            if value.len() != 1 {
                return Err(ProtocolErrorKind::BadOptionLength);
            }
            if value[0] > MAX_PRIORITY {
                return Err(ProtocolErrorKind::BadOptionValue);
            }
        }
        ESCT => {
            if value.len() != 2 {
                return Err(ProtocolErrorKind::BadOptionLength);
            }
            if value == [0, 0] {
                return Err(ProtocolErrorKind::BadOptionValue);
            }
        }
        // Security is opaque; the masks are validated for shape only.
        _ => {
            if value.is_empty() {
                return Err(ProtocolErrorKind::BadOptionLength);
            }
        }
    }
    Ok(())
}
