//! Naive associative-array model of the RIB, plus a random operation
//! generator, shared by the model-equivalence tests.

#![allow(dead_code)]

use std::collections::HashMap;

use esis::rib::{NeighborAddress, NeighborKind, NextHop, Rib, Upsert};
use esis::{NetAddress, NsapAddress, SnpaAddress};
use rand::Rng;

const ADDRS: u8 = 6;
const SNPAS: u8 = 4;

#[derive(Debug, Clone, Copy)]
pub enum Op {
    Insert {
        is: bool,
        addr: u8,
        snpa: u8,
        ht: u16,
    },
    Lookup {
        addr: u8,
    },
    LookupKind {
        is: bool,
        addr: u8,
    },
    Count,
    Flush,
    Advance {
        dt: u64,
    },
    Redirect {
        dest: u8,
        snpa: u8,
        ht: u16,
    },
    RedirectLookup {
        dest: u8,
    },
    Refresh {
        dest: u8,
        snpa: u8,
        ht: u16,
    },
    NextHop {
        dest: u8,
    },
    NextExpiry,
}

pub fn random_op<R: Rng>(rng: &mut R) -> Op {
    let addr = rng.gen_range(0..ADDRS);
    let snpa = rng.gen_range(0..SNPAS);
    let ht = rng.gen_range(1..=40);
    match rng.gen_range(0..16) {
        0..=3 => Op::Insert {
            is: rng.gen(),
            addr,
            snpa,
            ht,
        },
        4 => Op::Lookup { addr },
        5 => Op::LookupKind {
            is: rng.gen(),
            addr,
        },
        6 => Op::Count,
        7 => Op::Flush,
        8 | 9 => Op::Advance {
            dt: rng.gen_range(0..15),
        },
        10 => Op::Redirect {
            dest: addr,
            snpa,
            ht,
        },
        11 => Op::RedirectLookup { dest: addr },
        12 => Op::Refresh {
            dest: addr,
            snpa,
            ht,
        },
        13 | 14 => Op::NextHop { dest: addr },
        _ => Op::NextExpiry,
    }
}

// ES and IS addresses come from disjoint pools so an address names one
// record at most.
fn es_addr(i: u8) -> Vec<u8> {
    vec![0x47, 0x00, 0x01, i]
}

fn is_addr(i: u8) -> Vec<u8> {
    vec![0x47, 0x00, 0x02, i]
}

fn addr_bytes(is: bool, i: u8) -> Vec<u8> {
    if is {
        is_addr(i)
    } else {
        es_addr(i)
    }
}

fn snpa(i: u8) -> SnpaAddress {
    SnpaAddress::new([0x0a, 0, 0, 0, 0, i])
}

#[derive(Debug, Clone)]
struct ModelEntry {
    snpa: SnpaAddress,
    expiry: u64,
    seq: u64,
}

#[derive(Debug, Default)]
pub struct Model {
    entries: HashMap<(bool, Vec<u8>), ModelEntry>,
    redirects: HashMap<Vec<u8>, (SnpaAddress, u16, u64)>,
    seq: u64,
}

impl Model {
    fn live(&self, now: u64) -> impl Iterator<Item = (&(bool, Vec<u8>), &ModelEntry)> {
        self.entries.iter().filter(move |(_, e)| e.expiry > now)
    }
}

/// Applies `ops` to a real RIB and to the model; returns the first
/// disagreement, if any.
pub fn check(ops: &[Op]) -> Result<(), String> {
    let mut rib = Rib::new();
    let mut model = Model::default();
    let mut now = 0u64;
    for (step, op) in ops.iter().enumerate() {
        let fail = |what: String| Err(format!("step {step} {op:?} at t={now}: {what}"));
        match *op {
            Op::Insert {
                is,
                addr,
                snpa: s,
                ht,
            } => {
                let bytes = addr_bytes(is, addr);
                let address = if is {
                    NeighborAddress::Is(NetAddress::new(bytes.clone()).unwrap())
                } else {
                    NeighborAddress::Es(NsapAddress::new(bytes.clone()).unwrap())
                };
                let got = rib.insert_entry(address, snpa(s), ht, now);
                model.seq += 1;
                let seq = model.seq;
                let expiry = now + u64::from(ht);
                let want = match model.entries.get_mut(&(is, bytes.clone())) {
                    Some(e) => {
                        e.snpa = snpa(s);
                        e.expiry = expiry;
                        Upsert::Replaced
                    }
                    None => {
                        model.entries.insert(
                            (is, bytes),
                            ModelEntry {
                                snpa: snpa(s),
                                expiry,
                                seq,
                            },
                        );
                        Upsert::Inserted
                    }
                };
                if got != want {
                    return fail(format!("insert {got:?} != {want:?}"));
                }
            }
            Op::Lookup { addr } => {
                for is in [false, true] {
                    let bytes = addr_bytes(is, addr);
                    let got = rib.lookup(&bytes, now).map(|e| (e.snpa, e.expiry));
                    let want = model
                        .entries
                        .get(&(is, bytes))
                        .filter(|e| e.expiry > now)
                        .map(|e| (e.snpa, e.expiry));
                    if got != want {
                        return fail(format!("lookup {got:?} != {want:?}"));
                    }
                }
            }
            Op::LookupKind { is, addr } => {
                let kind = if is {
                    NeighborKind::IsNeighbor
                } else {
                    NeighborKind::EsNeighbor
                };
                // Ask for the address under the other kind too: must miss.
                for bytes in [es_addr(addr), is_addr(addr)] {
                    let got = rib
                        .lookup_kind(kind, &bytes, now)
                        .map(|e| (e.snpa, e.expiry));
                    let want = model
                        .entries
                        .get(&(is, bytes))
                        .filter(|e| e.expiry > now)
                        .map(|e| (e.snpa, e.expiry));
                    if got != want {
                        return fail(format!("lookup_kind {got:?} != {want:?}"));
                    }
                }
            }
            Op::Count => {
                if rib.num_of_entry() != model.entries.len() {
                    return fail(format!(
                        "count {} != {}",
                        rib.num_of_entry(),
                        model.entries.len()
                    ));
                }
            }
            Op::Flush => {
                let got = rib.flush_expired(now);
                let before = model.entries.len() + model.redirects.len();
                model.entries.retain(|_, e| e.expiry > now);
                model.redirects.retain(|_, r| r.2 > now);
                let want = before - model.entries.len() - model.redirects.len();
                if got != want {
                    return fail(format!("flushed {got} != {want}"));
                }
            }
            Op::Advance { dt } => now += dt,
            Op::Redirect { dest, snpa: s, ht } => {
                let bytes = es_addr(dest);
                let got = rib.record_redirect(
                    NsapAddress::new(bytes.clone()).unwrap(),
                    snpa(s),
                    None,
                    ht,
                    now,
                );
                let want = if model.redirects.contains_key(&bytes) {
                    Upsert::Replaced
                } else {
                    Upsert::Inserted
                };
                model
                    .redirects
                    .insert(bytes, (snpa(s), ht, now + u64::from(ht)));
                if got != want {
                    return fail(format!("redirect {got:?} != {want:?}"));
                }
            }
            Op::RedirectLookup { dest } => {
                let bytes = es_addr(dest);
                let got = rib
                    .redirect(&bytes, now)
                    .map(|r| (r.better_snpa, r.holding_time, r.expiry));
                let want = model.redirects.get(&bytes).copied().filter(|r| r.2 > now);
                if got != want {
                    return fail(format!("redirect lookup {got:?} != {want:?}"));
                }
            }
            Op::Refresh { dest, snpa: s, ht } => {
                let bytes = es_addr(dest);
                let got = rib.refresh_redirect(&bytes, snpa(s), now, ht);
                let want = match model.redirects.get_mut(&bytes) {
                    Some(r) if r.0 == snpa(s) => {
                        r.2 = now + u64::from(ht);
                        true
                    }
                    _ => false,
                };
                if got != want {
                    return fail(format!("refresh {got} != {want}"));
                }
            }
            Op::NextHop { dest } => {
                let bytes = es_addr(dest);
                let got = rib.next_hop(&bytes, now);
                let redirect = model.redirects.get(&bytes).filter(|r| r.2 > now);
                let es = model
                    .entries
                    .get(&(false, bytes))
                    .filter(|e| e.expiry > now);
                let newest_is = model
                    .live(now)
                    .filter(|((is, _), _)| *is)
                    .max_by_key(|(_, e)| e.seq)
                    .map(|(_, e)| e.snpa);
                let want = match (redirect, es, newest_is) {
                    (Some(r), _, _) => NextHop::Direct(r.0),
                    (None, Some(e), _) => NextHop::Direct(e.snpa),
                    (None, None, Some(s)) => NextHop::ViaIs(s),
                    (None, None, None) => NextHop::Unknown,
                };
                if got != want {
                    return fail(format!("next_hop {got:?} != {want:?}"));
                }
            }
            Op::NextExpiry => {
                let got = rib.next_expiry();
                let want = model
                    .entries
                    .values()
                    .map(|e| e.expiry)
                    .chain(model.redirects.values().map(|r| r.2))
                    .min();
                if got != want {
                    return fail(format!("next_expiry {got:?} != {want:?}"));
                }
            }
        }
    }
    Ok(())
}
