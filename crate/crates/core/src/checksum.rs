//! Fletcher mod-255 header checksum.
//!
//! The checksum occupies octets 8 and 9 (1-indexed) of the fixed part. A
//! header checks out when running both Fletcher sums over every header
//! octet, checksum included, leaves them at zero mod 255. The pair (0, 0)
//! means the checksum is not in use.

use thiserror::Error;

/// Zero-based offset of the first checksum octet.
pub const CHECKSUM_OFFSET: usize = 7;

/// Smallest header that has room for the checksum field.
pub const MIN_HEADER_LEN: usize = 9;

#[derive(Error, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChecksumError {
    #[error("header of {0} octets is shorter than the 9-octet fixed part")]
    HeaderTooShort(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChecksumStatus {
    Valid,
    NotUsed,
    Invalid,
}

fn fletcher_sums(octets: &[u8]) -> (u32, u32) {
    let mut c0 = 0u32;
    let mut c1 = 0u32;
    for &b in octets {
        c0 = (c0 + u32::from(b)) % 255;
        c1 = (c1 + c0) % 255;
    }
    (c0, c1)
}

/// Returns a copy of `header` with the checksum octets filled in.
///
/// The whole slice is treated as the header.
pub fn generate_checksum(header: &[u8]) -> Result<Vec<u8>, ChecksumError> {
    let mut out = header.to_vec();
    fill_checksum(&mut out)?;
    Ok(out)
}

/// In-place form of [`generate_checksum`].
pub fn fill_checksum(header: &mut [u8]) -> Result<(), ChecksumError> {
    let len = header.len();
    if len < MIN_HEADER_LEN {
        return Err(ChecksumError::HeaderTooShort(len));
    }
    header[CHECKSUM_OFFSET] = 0;
    header[CHECKSUM_OFFSET + 1] = 0;
    let (c0, c1) = fletcher_sums(header);
    let (c0, c1) = (i64::from(c0), i64::from(c1));
    // Octet i (1-indexed) contributes to c1 with weight L - i + 1, so the
    // octets at positions 8 and 9 weigh L - 7 and L - 8.
    let l = len as i64;
    let x = ((l - 8) * c0 - c1).rem_euclid(255);
    let y = (c1 - (l - 7) * c0).rem_euclid(255);
    header[CHECKSUM_OFFSET] = if x == 0 { 255 } else { x as u8 };
    header[CHECKSUM_OFFSET + 1] = if y == 0 { 255 } else { y as u8 };
    Ok(())
}

/// Verifies the checksum over every octet of `header`.
pub fn verify_checksum(header: &[u8]) -> Result<ChecksumStatus, ChecksumError> {
    if header.len() < MIN_HEADER_LEN {
        return Err(ChecksumError::HeaderTooShort(header.len()));
    }
    let x = header[CHECKSUM_OFFSET];
    let y = header[CHECKSUM_OFFSET + 1];
    Ok(match (x, y) {
        (0, 0) => ChecksumStatus::NotUsed,
        (0, _) | (_, 0) => ChecksumStatus::Invalid,
        _ => match fletcher_sums(header) {
            (0, 0) => ChecksumStatus::Valid,
            _ => ChecksumStatus::Invalid,
        },
    })
}
