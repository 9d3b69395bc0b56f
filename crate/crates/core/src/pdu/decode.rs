//! Receive-side PDU processing.
//!
//! Checks run in a fixed order and the first failure decides the discard
//! reason: protocol identifier, version, checksum, fixed-part sanity,
//! address part, options.

use super::options;
use super::{
    DiscardReason, FixedPart, OptionParam, Pdu, PduBody, PduType, ProtocolErrorKind,
    FIXED_PART_LEN, NLPID_ESIS, TYPE_RESERVED_MASK, VERSION,
};
use crate::address::{
    validate_nsap, AddressError, NetAddress, NsapAddress, SnpaAddress, ValidationProfile,
    MAX_NSAP_LEN, SNPA_LEN,
};
use crate::checksum::{verify_checksum, ChecksumStatus};

use ProtocolErrorKind::*;

/// Decodes a frame payload under the default (lenient) address profile.
pub fn decode(raw: &[u8]) -> Result<Pdu, DiscardReason> {
    decode_with(raw, ValidationProfile::default())
}

pub fn decode_with(raw: &[u8], profile: ValidationProfile) -> Result<Pdu, DiscardReason> {
    match raw.first() {
        None => return Err(TruncatedPdu.into()),
        Some(&nlpid) if nlpid != NLPID_ESIS => return Err(DiscardReason::NotEsIs),
        _ => {}
    }
    match raw.get(2) {
        None => return Err(TruncatedPdu.into()),
        Some(&v) if v != VERSION => return Err(DiscardReason::WrongVersion),
        _ => {}
    }
    if raw.len() < FIXED_PART_LEN {
        return Err(TruncatedPdu.into());
    }
    let li = usize::from(raw[1]);
    if li > raw.len() {
        return Err(TruncatedPdu.into());
    }
    // A length indicator below the fixed part is a protocol error, but the
    // fixed part itself is still covered by the checksum.
    let covered = &raw[..li.max(FIXED_PART_LEN)];
    if verify_checksum(covered) == Ok(ChecksumStatus::Invalid) {
        return Err(DiscardReason::ChecksumError);
    }
    if li < FIXED_PART_LEN {
        return Err(BadHeaderLength.into());
    }
    let header = &raw[..li];
    if header[3] != 0 || header[4] & TYPE_RESERVED_MASK != 0 {
        return Err(NonzeroReserved.into());
    }
    let pdu_type = PduType::from_code(header[4]).ok_or(UnknownType)?;
    let holding_time = match pdu_type {
        PduType::Ra => 0,
        _ => u16::from_be_bytes([header[5], header[6]]),
    };
    let fixed = FixedPart {
        nlpid: NLPID_ESIS,
        length_indicator: raw[1],
        version: VERSION,
        reserved: 0,
        pdu_type,
        holding_time,
        checksum: [header[7], header[8]],
    };

    let mut cur = Cursor::new(&header[FIXED_PART_LEN..]);
    let body = decode_body(&mut cur, pdu_type, profile)?;
    let options = decode_options(&mut cur, pdu_type)?;
    Ok(Pdu {
        fixed,
        body,
        options,
    })
}

struct Cursor<'a> {
    buf: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Cursor { buf }
    }

    fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    fn u8(&mut self) -> Result<u8, ProtocolErrorKind> {
        let (&b, rest) = self.buf.split_first().ok_or(TruncatedPdu)?;
        self.buf = rest;
        Ok(b)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], ProtocolErrorKind> {
        if n > self.buf.len() {
            return Err(TruncatedPdu);
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }
}

fn address_fault(err: AddressError) -> ProtocolErrorKind {
    match err {
        AddressError::Afi { .. } => BadAddressValue,
        _ => BadAddressLength,
    }
}

fn read_address(
    cur: &mut Cursor<'_>,
    profile: ValidationProfile,
) -> Result<Vec<u8>, ProtocolErrorKind> {
    let len = usize::from(cur.u8()?);
    if len == 0 || len > MAX_NSAP_LEN {
        return Err(BadAddressLength);
    }
    let octets = cur.take(len)?;
    validate_nsap(octets, profile).map_err(address_fault)?;
    Ok(octets.to_vec())
}

// Addresses have passed validate_nsap, so the newtype constructors cannot fail.
fn nsap(octets: Vec<u8>) -> NsapAddress {
    NsapAddress::new(octets).expect("validated address")
}

fn net(octets: Vec<u8>) -> NetAddress {
    NetAddress::new(octets).expect("validated address")
}

fn decode_body(
    cur: &mut Cursor<'_>,
    pdu_type: PduType,
    profile: ValidationProfile,
) -> Result<PduBody, ProtocolErrorKind> {
    Ok(match pdu_type {
        PduType::Esh => {
            let count = cur.u8()?;
            if count == 0 {
                return Err(ZeroAddressCount);
            }
            let source_addresses = (0..count)
                .map(|_| read_address(cur, profile).map(nsap))
                .collect::<Result<_, _>>()?;
            PduBody::Esh { source_addresses }
        }
        PduType::Ish => PduBody::Ish {
            net: net(read_address(cur, profile)?),
        },
        PduType::Aa => PduBody::Aa {
            net: net(read_address(cur, profile)?),
        },
        PduType::Rd => {
            let destination = nsap(read_address(cur, profile)?);
            let snpa_len = usize::from(cur.u8()?);
            if snpa_len != SNPA_LEN {
                return Err(BadAddressLength);
            }
            let better_snpa =
                SnpaAddress::from_slice(cur.take(SNPA_LEN)?).map_err(|_| BadAddressLength)?;
            let net_len = usize::from(cur.u8()?);
            let redirect_net = if net_len == 0 {
                None
            } else {
                if net_len > MAX_NSAP_LEN {
                    return Err(BadAddressLength);
                }
                let octets = cur.take(net_len)?;
                validate_nsap(octets, profile).map_err(address_fault)?;
                Some(net(octets.to_vec()))
            };
            PduBody::Rd {
                destination,
                better_snpa,
                redirect_net,
            }
        }
        PduType::Ra => PduBody::Ra,
    })
}

fn decode_options(
    cur: &mut Cursor<'_>,
    pdu_type: PduType,
) -> Result<Vec<OptionParam>, ProtocolErrorKind> {
    let mut out: Vec<OptionParam> = Vec::new();
    while !cur.is_empty() {
        let code = cur.u8()?;
        let len = usize::from(cur.u8().map_err(|_| BadOptionLength)?);
        let value = cur.take(len).map_err(|_| BadOptionLength)?;
        if options::name(code).is_none() {
            return Err(BadOptionCode);
        }
        if !options::is_legal(code, pdu_type) {
            return Err(OptionIllegalForType);
        }
        if out.iter().any(|o| o.code == code) {
            return Err(DuplicateOption);
        }
        options::check(code, value, pdu_type)?;
        out.push(OptionParam::new(code, value));
    }
    Ok(out)
}
