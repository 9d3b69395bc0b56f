//! ES-IS PDU wire format.
//!
//! Every PDU starts with the same 9-octet fixed part:
//!
//! ```text
//! offset  field
//!   0     network layer protocol identifier (130)
//!   1     length indicator (header octets, fixed part included)
//!   2     version / protocol id extension (1)
//!   3     reserved (0)
//!   4     type: 3 reserved bits (0) then a 5-bit type code
//!   5-6   holding time, seconds, big-endian
//!   7-8   checksum
//! ```
//!
//! followed by the type-specific address part and then option triples.
//!
//! | type | code | address part                                   |
//! |------|------|------------------------------------------------|
//! | ESH  | 2    | count, then `count` x {length, NSAP}           |
//! | ISH  | 4    | {length, NET}                                  |
//! | RD   | 6    | {length, DA} {length, BSNPA} {length, NET}     |
//! | RA   | 8    | none                                           |
//! | AA   | 10   | {length, NET}                                  |
//!
//! An RD without a redirect NET carries a zero NET length. RA has no use
//! for the holding time; it is emitted as zero and ignored on receipt.

mod decode;
pub mod dissect;
pub mod options;

use std::fmt;

use thiserror::Error;

use crate::address::{NetAddress, NsapAddress, SnpaAddress, SNPA_LEN};
use crate::checksum::fill_checksum;

pub use decode::{decode, decode_with};
pub use options::OptionParam;

/// Network layer protocol identifier of ES-IS.
pub const NLPID_ESIS: u8 = 130;
/// Version / protocol id extension.
pub const VERSION: u8 = 1;
pub const FIXED_PART_LEN: usize = 9;
/// The length indicator is a single octet.
pub const MAX_HEADER_LEN: usize = 255;
/// Upper three bits of the type octet.
pub const TYPE_RESERVED_MASK: u8 = 0xe0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum PduType {
    Esh = 2,
    Ish = 4,
    Rd = 6,
    Ra = 8,
    Aa = 10,
}

impl PduType {
    pub const ALL: [PduType; 5] = [
        PduType::Esh,
        PduType::Ish,
        PduType::Rd,
        PduType::Ra,
        PduType::Aa,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            2 => Some(PduType::Esh),
            4 => Some(PduType::Ish),
            6 => Some(PduType::Rd),
            8 => Some(PduType::Ra),
            10 => Some(PduType::Aa),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PduType::Esh => "ESH",
            PduType::Ish => "ISH",
            PduType::Rd => "RD",
            PduType::Ra => "RA",
            PduType::Aa => "AA",
        }
    }
}

impl fmt::Display for PduType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Why a received PDU was dropped. Discarding is a normal outcome of input
/// processing, so decode reports it as a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiscardReason {
    /// NLPID is not 130.
    NotEsIs,
    WrongVersion,
    ChecksumError,
    ProtocolError(ProtocolErrorKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolErrorKind {
    BadHeaderLength,
    NonzeroReserved,
    UnknownType,
    ZeroAddressCount,
    BadAddressLength,
    BadAddressValue,
    BadOptionCode,
    BadOptionLength,
    BadOptionValue,
    DuplicateOption,
    OptionIllegalForType,
    TruncatedPdu,
    /// A well-formed PDU the receiving role never accepts (RA or RD at an
    /// ES, AA or RD at an IS).
    WrongRole,
}

impl fmt::Display for ProtocolErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscardReason::ProtocolError(kind) => write!(f, "ProtocolError({kind})"),
            other => fmt::Debug::fmt(other, f),
        }
    }
}

impl From<ProtocolErrorKind> for DiscardReason {
    fn from(kind: ProtocolErrorKind) -> Self {
        DiscardReason::ProtocolError(kind)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

fn violation(msg: impl Into<String>) -> CodecError {
    CodecError::InvariantViolation(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPart {
    pub nlpid: u8,
    pub length_indicator: u8,
    pub version: u8,
    pub reserved: u8,
    pub pdu_type: PduType,
    pub holding_time: u16,
    pub checksum: [u8; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PduBody {
    Esh {
        source_addresses: Vec<NsapAddress>,
    },
    Ish {
        net: NetAddress,
    },
    Rd {
        destination: NsapAddress,
        better_snpa: SnpaAddress,
        redirect_net: Option<NetAddress>,
    },
    Ra,
    Aa {
        net: NetAddress,
    },
}

impl PduBody {
    pub fn pdu_type(&self) -> PduType {
        match self {
            PduBody::Esh { .. } => PduType::Esh,
            PduBody::Ish { .. } => PduType::Ish,
            PduBody::Rd { .. } => PduType::Rd,
            PduBody::Ra => PduType::Ra,
            PduBody::Aa { .. } => PduType::Aa,
        }
    }

    fn encoded_len(&self) -> usize {
        match self {
            PduBody::Esh { source_addresses } => {
                1 + source_addresses.iter().map(|a| 1 + a.len()).sum::<usize>()
            }
            PduBody::Ish { net } | PduBody::Aa { net } => 1 + net.len(),
            PduBody::Rd {
                destination,
                redirect_net,
                ..
            } => {
                1 + destination.len()
                    + 1
                    + SNPA_LEN
                    + 1
                    + redirect_net.as_ref().map_or(0, |n| n.len())
            }
            PduBody::Ra => 0,
        }
    }

    fn write(&self, out: &mut Vec<u8>) {
        match self {
            PduBody::Esh { source_addresses } => {
                out.push(source_addresses.len() as u8);
                for addr in source_addresses {
                    push_lv(out, addr.as_bytes());
                }
            }
            PduBody::Ish { net } | PduBody::Aa { net } => push_lv(out, net.as_bytes()),
            PduBody::Rd {
                destination,
                better_snpa,
                redirect_net,
            } => {
                push_lv(out, destination.as_bytes());
                push_lv(out, better_snpa.as_bytes());
                push_lv(out, redirect_net.as_ref().map_or(&[][..], |n| n.as_bytes()));
            }
            PduBody::Ra => {}
        }
    }
}

fn push_lv(out: &mut Vec<u8>, value: &[u8]) {
    out.push(value.len() as u8);
    out.extend_from_slice(value);
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pdu {
    pub fixed: FixedPart,
    pub body: PduBody,
    pub options: Vec<OptionParam>,
}

impl Pdu {
    /// Builds a PDU with a zeroed checksum and a length indicator matching
    /// the body. RA holding times are forced to zero.
    pub fn new(body: PduBody, holding_time: u16) -> Self {
        let pdu_type = body.pdu_type();
        let mut pdu = Pdu {
            fixed: FixedPart {
                nlpid: NLPID_ESIS,
                length_indicator: 0,
                version: VERSION,
                reserved: 0,
                pdu_type,
                holding_time: if pdu_type == PduType::Ra {
                    0
                } else {
                    holding_time
                },
                checksum: [0, 0],
            },
            body,
            options: Vec::new(),
        };
        pdu.refresh_length();
        pdu
    }

    pub fn esh(source_addresses: Vec<NsapAddress>, holding_time: u16) -> Self {
        Self::new(PduBody::Esh { source_addresses }, holding_time)
    }

    pub fn ish(net: NetAddress, holding_time: u16) -> Self {
        Self::new(PduBody::Ish { net }, holding_time)
    }

    pub fn rd(
        destination: NsapAddress,
        better_snpa: SnpaAddress,
        redirect_net: Option<NetAddress>,
        holding_time: u16,
    ) -> Self {
        Self::new(
            PduBody::Rd {
                destination,
                better_snpa,
                redirect_net,
            },
            holding_time,
        )
    }

    pub fn ra() -> Self {
        Self::new(PduBody::Ra, 0)
    }

    pub fn aa(net: NetAddress, holding_time: u16) -> Self {
        Self::new(PduBody::Aa { net }, holding_time)
    }

    pub fn with_option(mut self, option: OptionParam) -> Self {
        self.options.push(option);
        self.refresh_length();
        self
    }

    /// Recomputes the length indicator after editing body or options.
    /// Saturates at 255; [`encode`] rejects anything that long or longer
    /// that does not fit.
    pub fn refresh_length(&mut self) {
        self.fixed.length_indicator = self.encoded_len().min(MAX_HEADER_LEN) as u8;
    }

    pub fn encoded_len(&self) -> usize {
        FIXED_PART_LEN
            + self.body.encoded_len()
            + self
                .options
                .iter()
                .map(OptionParam::encoded_len)
                .sum::<usize>()
    }

    pub fn pdu_type(&self) -> PduType {
        self.fixed.pdu_type
    }

    pub fn holding_time(&self) -> u16 {
        self.fixed.holding_time
    }

    pub fn option(&self, code: u8) -> Option<&OptionParam> {
        self.options.iter().find(|o| o.code == code)
    }

    /// ES configuration timer suggested by an ISH, in seconds.
    pub fn esct(&self) -> Option<u16> {
        self.option(options::ESCT)
            .and_then(|o| <[u8; 2]>::try_from(o.value.as_slice()).ok())
            .map(u16::from_be_bytes)
    }

    /// Copy with the checksum octets cleared, for comparisons.
    pub fn without_checksum(&self) -> Self {
        let mut p = self.clone();
        p.fixed.checksum = [0, 0];
        p
    }

    pub fn check_invariants(&self) -> Result<(), CodecError> {
        let f = &self.fixed;
        if f.nlpid != NLPID_ESIS {
            return Err(violation(format!(
                "nlpid must be {NLPID_ESIS}, got {}",
                f.nlpid
            )));
        }
        if f.version != VERSION {
            return Err(violation(format!(
                "version must be {VERSION}, got {}",
                f.version
            )));
        }
        if f.reserved != 0 {
            return Err(violation("reserved octet must be 0"));
        }
        if f.pdu_type != self.body.pdu_type() {
            return Err(violation(format!(
                "type {} does not match {} body",
                f.pdu_type,
                self.body.pdu_type()
            )));
        }
        match &self.body {
            PduBody::Esh { source_addresses } => {
                if source_addresses.is_empty() {
                    return Err(violation("address count must be ≥ 1"));
                }
                if source_addresses.len() > usize::from(u8::MAX) {
                    return Err(violation("address count must fit one octet"));
                }
            }
            PduBody::Ra if f.holding_time != 0 => {
                return Err(violation("RA holding time must be 0"));
            }
            _ => {}
        }
        for (i, opt) in self.options.iter().enumerate() {
            if self.options[..i].iter().any(|o| o.code == opt.code) {
                return Err(violation(format!("option {} appears twice", opt.code)));
            }
            options::check(opt.code, &opt.value, f.pdu_type).map_err(|kind| {
                violation(format!("option {} on {}: {kind}", opt.code, f.pdu_type))
            })?;
        }
        let len = self.encoded_len();
        if len > MAX_HEADER_LEN {
            return Err(violation(format!(
                "header length {len} exceeds {MAX_HEADER_LEN}"
            )));
        }
        if usize::from(f.length_indicator) != len {
            return Err(violation(format!(
                "length indicator {} does not match encoded length {len}",
                f.length_indicator
            )));
        }
        Ok(())
    }
}

/// Encodes the header octets. The checksum octets are copied from
/// `pdu.fixed.checksum`; see [`encode_with_checksum`] to generate them.
pub fn encode(pdu: &Pdu) -> Result<Vec<u8>, CodecError> {
    pdu.check_invariants()?;
    let f = &pdu.fixed;
    let mut out = Vec::with_capacity(pdu.encoded_len());
    out.extend_from_slice(&[
        f.nlpid,
        f.length_indicator,
        f.version,
        f.reserved,
        f.pdu_type.code(),
    ]);
    out.extend_from_slice(&f.holding_time.to_be_bytes());
    out.extend_from_slice(&f.checksum);
    pdu.body.write(&mut out);
    for opt in &pdu.options {
        out.push(opt.code);
        push_lv(&mut out, &opt.value);
    }
    debug_assert_eq!(out.len(), usize::from(f.length_indicator));
    Ok(out)
}

/// Encodes and fills in the checksum octets.
pub fn encode_with_checksum(pdu: &Pdu) -> Result<Vec<u8>, CodecError> {
    let mut out = encode(pdu)?;
    fill_checksum(&mut out).expect("encoded header holds a fixed part");
    Ok(out)
}
