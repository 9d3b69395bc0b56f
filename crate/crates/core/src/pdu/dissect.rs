//! Best-effort field breakdown of raw header octets, for display.
//!
//! Unlike [`decode`](super::decode) this never rejects input: it walks as
//! far as the octets allow and stops at the first field it cannot read.

use super::{options, PduType, FIXED_PART_LEN};
use crate::checksum::{verify_checksum, ChecksumStatus};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub name: String,
    pub offset: usize,
    pub raw: Vec<u8>,
    pub value: String,
}

impl Field {
    fn new(name: impl Into<String>, offset: usize, raw: &[u8], value: impl Into<String>) -> Self {
        Field {
            name: name.into(),
            offset,
            raw: raw.to_vec(),
            value: value.into(),
        }
    }
}

pub fn dissect(raw: &[u8]) -> Vec<Field> {
    let mut fields = Vec::new();
    let fixed: [(&str, usize, usize); 7] = [
        ("nlpid", 0, 1),
        ("length_indicator", 1, 1),
        ("version", 2, 1),
        ("reserved", 3, 1),
        ("type", 4, 1),
        ("holding_time", 5, 2),
        ("checksum", 7, 2),
    ];
    for (name, offset, len) in fixed {
        let Some(octets) = raw.get(offset..offset + len) else {
            return fields;
        };
        let value = match name {
            "type" => {
                let code = octets[0] & 0x1f;
                match PduType::from_code(code) {
                    Some(t) if octets[0] & 0xe0 == 0 => t.name().to_string(),
                    Some(t) => format!("{} (reserved bits {:#04x})", t.name(), octets[0] & 0xe0),
                    None => format!("unknown ({code})"),
                }
            }
            "holding_time" => format!("{}s", u16::from_be_bytes([octets[0], octets[1]])),
            "checksum" => {
                let li = usize::from(raw[1]).clamp(FIXED_PART_LEN, raw.len());
                match verify_checksum(&raw[..li]) {
                    Ok(ChecksumStatus::Valid) => "valid".to_string(),
                    Ok(ChecksumStatus::NotUsed) => "not used".to_string(),
                    _ => "invalid".to_string(),
                }
            }
            _ => octets[0].to_string(),
        };
        fields.push(Field::new(name, offset, octets, value));
    }

    let li = usize::from(raw[1]);
    if !(FIXED_PART_LEN..=raw.len()).contains(&li) {
        return fields;
    }
    let Some(pdu_type) = PduType::from_code(raw[4] & 0x1f) else {
        return fields;
    };
    let header = &raw[..li];
    let mut pos = FIXED_PART_LEN;

    // Reads a {length, value} pair as two fields; None once out of octets.
    let lv = |fields: &mut Vec<Field>, pos: &mut usize, name: &str| -> Option<()> {
        let len = usize::from(*header.get(*pos)?);
        fields.push(Field::new(
            format!("{name}_length"),
            *pos,
            &header[*pos..*pos + 1],
            len.to_string(),
        ));
        let value = header.get(*pos + 1..*pos + 1 + len)?;
        fields.push(Field::new(name, *pos + 1, value, hex::encode(value)));
        *pos += 1 + len;
        Some(())
    };

    // Stops at the first field that runs past the header.
    let _ = (|| -> Option<()> {
        match pdu_type {
            PduType::Esh => {
                let count = *header.get(pos)?;
                fields.push(Field::new(
                    "address_count",
                    pos,
                    &header[pos..pos + 1],
                    count.to_string(),
                ));
                pos += 1;
                for i in 0..count {
                    lv(&mut fields, &mut pos, &format!("source_address[{i}]"))?;
                }
            }
            PduType::Ish | PduType::Aa => lv(&mut fields, &mut pos, "net")?,
            PduType::Rd => {
                lv(&mut fields, &mut pos, "destination")?;
                lv(&mut fields, &mut pos, "better_snpa")?;
                lv(&mut fields, &mut pos, "redirect_net")?;
            }
            PduType::Ra => {}
        }
        while pos < header.len() {
            let code = header[pos];
            let len = usize::from(*header.get(pos + 1)?);
            let value = header.get(pos + 2..pos + 2 + len)?;
            let opt = options::OptionParam::new(code, value);
            fields.push(Field::new(
                format!("option[{}]", options::name(code).unwrap_or("unknown")),
                pos,
                &header[pos..pos + 2 + len],
                opt.describe(),
            ));
            pos += 2 + len;
        }
        Some(())
    })();
    if li < raw.len() {
        fields.push(Field::new(
            "trailing",
            li,
            &raw[li..],
            format!("{} octets ignored", raw.len() - li),
        ));
    }
    fields
}
