//! Routing information base.
//!
//! Holds the neighbor configuration learned from hellos (ES and IS entries)
//! and the redirect cache learned from RD PDUs. Every record carries an
//! absolute expiry; a record whose expiry is at or before `now` is dead.
//! Dead records are never returned by queries, and [`Rib::flush_expired`]
//! removes them.
//!
//! Both collections keep insertion order, which the text dump preserves:
//!
//! ```text
//! ES <address-hex> via <snpa-hex> expires <t>
//! IS <address-hex> via <snpa-hex> expires <t>
//! RD <dest-hex> -> <snpa-hex> [net <net-hex>] expires <t>
//! ```

use std::fmt;

use crate::address::{NetAddress, NsapAddress, SnpaAddress};
use crate::Seconds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NeighborKind {
    EsNeighbor,
    IsNeighbor,
}

/// Address of a neighbor record; the variant decides the record's kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NeighborAddress {
    Es(NsapAddress),
    Is(NetAddress),
}

impl NeighborAddress {
    pub fn kind(&self) -> NeighborKind {
        match self {
            NeighborAddress::Es(_) => NeighborKind::EsNeighbor,
            NeighborAddress::Is(_) => NeighborKind::IsNeighbor,
        }
    }

    pub fn as_bytes(&self) -> &[u8] {
        match self {
            NeighborAddress::Es(a) => a.as_bytes(),
            NeighborAddress::Is(a) => a.as_bytes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RibEntry {
    pub address: NeighborAddress,
    pub snpa: SnpaAddress,
    pub expiry: Seconds,
}

impl RibEntry {
    pub fn kind(&self) -> NeighborKind {
        self.address.kind()
    }
}

impl fmt::Display for RibEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind() {
            NeighborKind::EsNeighbor => "ES",
            NeighborKind::IsNeighbor => "IS",
        };
        write!(
            f,
            "{tag} {} via {} expires {}",
            hex::encode(self.address.as_bytes()),
            self.snpa,
            self.expiry
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedirectEntry {
    pub destination: NsapAddress,
    pub better_snpa: SnpaAddress,
    pub redirect_net: Option<NetAddress>,
    /// Holding time the redirect was recorded with; reused on refresh.
    pub holding_time: u16,
    pub expiry: Seconds,
}

impl fmt::Display for RedirectEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RD {} -> {}", self.destination, self.better_snpa)?;
        if let Some(net) = &self.redirect_net {
            write!(f, " net {net}")?;
        }
        write!(f, " expires {}", self.expiry)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Upsert {
    Inserted,
    Replaced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NextHop {
    /// Destination reachable on this subnetwork at the given SNPA.
    Direct(SnpaAddress),
    /// Hand the traffic to the IS at the given SNPA.
    ViaIs(SnpaAddress),
    Unknown,
}

/// A record dropped by [`Rib::drain_expired`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expired {
    Entry(RibEntry),
    Redirect(RedirectEntry),
}

impl fmt::Display for Expired {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expired::Entry(e) => e.fmt(f),
            Expired::Redirect(r) => r.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Rib {
    entries: Vec<RibEntry>,
    redirects: Vec<RedirectEntry>,
}

impl Rib {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of neighbor entries, live or not yet flushed.
    pub fn num_of_entry(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = &RibEntry> {
        self.entries.iter()
    }

    pub fn redirects(&self) -> impl Iterator<Item = &RedirectEntry> {
        self.redirects.iter()
    }

    /// Records a neighbor, replacing the SNPA and expiry of an existing
    /// record for the same (kind, address).
    pub fn insert_entry(
        &mut self,
        address: NeighborAddress,
        snpa: SnpaAddress,
        holding_time: u16,
        now: Seconds,
    ) -> Upsert {
        debug_assert!(holding_time > 0);
        let expiry = now + Seconds::from(holding_time);
        if let Some(e) = self.entries.iter_mut().find(|e| e.address == address) {
            e.snpa = snpa;
            e.expiry = expiry;
            return Upsert::Replaced;
        }
        self.entries.push(RibEntry {
            address,
            snpa,
            expiry,
        });
        Upsert::Inserted
    }

    /// Live neighbor entry for an address of either kind.
    pub fn lookup(&self, address: &[u8], now: Seconds) -> Option<&RibEntry> {
        self.entries
            .iter()
            .find(|e| e.expiry > now && e.address.as_bytes() == address)
    }

    pub fn lookup_kind(
        &self,
        kind: NeighborKind,
        address: &[u8],
        now: Seconds,
    ) -> Option<&RibEntry> {
        self.entries
            .iter()
            .find(|e| e.expiry > now && e.kind() == kind && e.address.as_bytes() == address)
    }

    pub fn redirect(&self, destination: &[u8], now: Seconds) -> Option<&RedirectEntry> {
        self.redirects
            .iter()
            .find(|r| r.expiry > now && r.destination.as_bytes() == destination)
    }

    pub fn has_live_is(&self, now: Seconds) -> bool {
        self.entries
            .iter()
            .any(|e| e.expiry > now && e.kind() == NeighborKind::IsNeighbor)
    }

    /// Removes every record with `expiry <= now` and returns them in dump order.
    pub fn drain_expired(&mut self, now: Seconds) -> Vec<Expired> {
        let mut out = Vec::new();
        let (dead, live): (Vec<_>, Vec<_>) = std::mem::take(&mut self.entries)
            .into_iter()
            .partition(|e| e.expiry <= now);
        self.entries = live;
        let (dead_es, dead_is): (Vec<_>, Vec<_>) = dead
            .into_iter()
            .partition(|e| e.kind() == NeighborKind::EsNeighbor);
        out.extend(dead_es.into_iter().chain(dead_is).map(Expired::Entry));
        let (dead, live): (Vec<_>, Vec<_>) = std::mem::take(&mut self.redirects)
            .into_iter()
            .partition(|r| r.expiry <= now);
        self.redirects = live;
        out.extend(dead.into_iter().map(Expired::Redirect));
        out
    }

    pub fn flush_expired(&mut self, now: Seconds) -> usize {
        self.drain_expired(now).len()
    }

    /// Earliest expiry among all records, if any.
    pub fn next_expiry(&self) -> Option<Seconds> {
        self.entries
            .iter()
            .map(|e| e.expiry)
            .chain(self.redirects.iter().map(|r| r.expiry))
            .min()
    }

    pub fn record_redirect(
        &mut self,
        destination: NsapAddress,
        better_snpa: SnpaAddress,
        redirect_net: Option<NetAddress>,
        holding_time: u16,
        now: Seconds,
    ) -> Upsert {
        debug_assert!(holding_time > 0);
        let expiry = now + Seconds::from(holding_time);
        if let Some(r) = self
            .redirects
            .iter_mut()
            .find(|r| r.destination == destination)
        {
            r.better_snpa = better_snpa;
            r.redirect_net = redirect_net;
            r.holding_time = holding_time;
            r.expiry = expiry;
            return Upsert::Replaced;
        }
        self.redirects.push(RedirectEntry {
            destination,
            better_snpa,
            redirect_net,
            holding_time,
            expiry,
        });
        Upsert::Inserted
    }

    /// Extends a redirect when traffic for the reverse direction arrives over
    /// the same path, i.e. from the redirect's better SNPA.
    pub fn refresh_redirect(
        &mut self,
        destination: &[u8],
        observed_snpa: SnpaAddress,
        now: Seconds,
        holding_time: u16,
    ) -> bool {
        match self
            .redirects
            .iter_mut()
            .find(|r| r.destination.as_bytes() == destination)
        {
            Some(r) if r.better_snpa == observed_snpa => {
                r.expiry = now + Seconds::from(holding_time);
                true
            }
            _ => false,
        }
    }

    pub fn next_hop(&self, destination: &[u8], now: Seconds) -> NextHop {
        if let Some(r) = self.redirect(destination, now) {
            return NextHop::Direct(r.better_snpa);
        }
        if let Some(e) = self.lookup_kind(NeighborKind::EsNeighbor, destination, now) {
            return NextHop::Direct(e.snpa);
        }
        match self
            .entries
            .iter()
            .rev()
            .find(|e| e.expiry > now && e.kind() == NeighborKind::IsNeighbor)
        {
            Some(is) => NextHop::ViaIs(is.snpa),
            None => NextHop::Unknown,
        }
    }

    /// Text dump of the live records at `now`.
    pub fn dump(&self, now: Seconds) -> String {
        let mut out = String::new();
        for kind in [NeighborKind::EsNeighbor, NeighborKind::IsNeighbor] {
            for e in self
                .entries
                .iter()
                .filter(|e| e.kind() == kind && e.expiry > now)
            {
                out.push_str(&e.to_string());
                out.push('\n');
            }
        }
        for r in self.redirects.iter().filter(|r| r.expiry > now) {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn es(b: u8) -> NeighborAddress {
        NeighborAddress::Es(NsapAddress::new(vec![0x47, b]).unwrap())
    }

    fn is(b: u8) -> NeighborAddress {
        NeighborAddress::Is(NetAddress::new(vec![0x47, 0xff, b]).unwrap())
    }

    fn snpa(b: u8) -> SnpaAddress {
        SnpaAddress::new([0x0a, 0, 0, 0, 0, b])
    }

    fn nsap(b: u8) -> NsapAddress {
        NsapAddress::new(vec![0x47, b]).unwrap()
    }

    #[test]
    fn insert_replace_and_count() {
        let mut rib = Rib::new();
        assert_eq!(rib.insert_entry(es(1), snpa(1), 60, 0), Upsert::Inserted);
        assert_eq!(rib.num_of_entry(), 1);
        assert_eq!(rib.insert_entry(es(1), snpa(2), 60, 0), Upsert::Replaced);
        assert_eq!(rib.num_of_entry(), 1);
        assert_eq!(rib.lookup(&[0x47, 1], 0).unwrap().snpa, snpa(2));
        assert_eq!(rib.insert_entry(es(2), snpa(3), 60, 0), Upsert::Inserted);
        assert_eq!(rib.num_of_entry(), 2);
    }

    #[test]
    fn same_octets_different_kind_are_distinct() {
        let mut rib = Rib::new();
        let a = NsapAddress::new(vec![1, 2, 3]).unwrap();
        rib.insert_entry(NeighborAddress::Es(a.clone()), snpa(1), 10, 0);
        assert_eq!(
            rib.insert_entry(NeighborAddress::Is(a.into()), snpa(1), 10, 0),
            Upsert::Inserted
        );
        assert_eq!(rib.num_of_entry(), 2);
    }

    #[test]
    fn lookup_respects_expiry() {
        let mut rib = Rib::new();
        assert!(rib.lookup(&[0x47, 1], 0).is_none());
        rib.insert_entry(es(1), snpa(1), 60, 0);
        assert_eq!(rib.lookup(&[0x47, 1], 30).unwrap().snpa, snpa(1));
        assert!(rib.lookup(&[0x47, 1], 60).is_none());
        assert!(rib.lookup(&[0x47, 1], 61).is_none());
    }

    #[test]
    fn flush_boundaries() {
        let mut rib = Rib::new();
        assert_eq!(rib.flush_expired(0), 0);
        rib.insert_entry(es(1), snpa(1), 60, 0);
        assert_eq!(rib.flush_expired(60), 1);
        assert_eq!(rib.num_of_entry(), 0);

        rib.insert_entry(es(1), snpa(1), 50, 0);
        rib.insert_entry(es(2), snpa(2), 70, 0);
        assert_eq!(rib.flush_expired(60), 1);
        assert_eq!(rib.num_of_entry(), 1);
        assert_eq!(rib.next_expiry(), Some(70));
    }

    #[test]
    fn redirects_upsert_and_refresh() {
        let mut rib = Rib::new();
        assert!(!rib.refresh_redirect(&[0x47, 9], snpa(5), 0, 60));
        assert_eq!(
            rib.record_redirect(nsap(9), snpa(5), None, 100, 0),
            Upsert::Inserted
        );
        assert_eq!(
            rib.record_redirect(nsap(9), snpa(6), None, 100, 0),
            Upsert::Replaced
        );
        assert_eq!(rib.next_hop(&[0x47, 9], 1), NextHop::Direct(snpa(6)));
        assert_eq!(
            rib.record_redirect(nsap(8), snpa(5), None, 100, 0),
            Upsert::Inserted
        );
        assert_eq!(rib.redirects().count(), 2);

        let mut rib = Rib::new();
        rib.record_redirect(nsap(9), snpa(5), None, 60, 40);
        assert_eq!(rib.redirect(&[0x47, 9], 0).unwrap().expiry, 100);
        assert!(rib.refresh_redirect(&[0x47, 9], snpa(5), 90, 60));
        assert_eq!(rib.redirect(&[0x47, 9], 0).unwrap().expiry, 150);
        assert!(!rib.refresh_redirect(&[0x47, 9], snpa(7), 95, 60));
        assert_eq!(rib.redirect(&[0x47, 9], 0).unwrap().expiry, 150);
    }

    #[test]
    fn next_hop_precedence() {
        let mut rib = Rib::new();
        assert_eq!(rib.next_hop(&[0x47, 9], 0), NextHop::Unknown);
        rib.insert_entry(is(1), snpa(1), 60, 0);
        assert_eq!(rib.next_hop(&[0x47, 9], 0), NextHop::ViaIs(snpa(1)));
        rib.insert_entry(is(2), snpa(2), 60, 0);
        assert_eq!(rib.next_hop(&[0x47, 9], 0), NextHop::ViaIs(snpa(2)));
        rib.insert_entry(es(9), snpa(9), 60, 0);
        assert_eq!(rib.next_hop(&[0x47, 9], 0), NextHop::Direct(snpa(9)));
        rib.record_redirect(nsap(9), snpa(7), None, 60, 0);
        assert_eq!(rib.next_hop(&[0x47, 9], 0), NextHop::Direct(snpa(7)));
        // IS learned later expires first: fall back to the earlier one.
        let mut rib = Rib::new();
        rib.insert_entry(is(1), snpa(1), 60, 0);
        rib.insert_entry(is(2), snpa(2), 10, 0);
        assert_eq!(rib.next_hop(&[0x47, 9], 10), NextHop::ViaIs(snpa(1)));
    }

    #[test]
    fn dump_format_and_order() {
        let mut rib = Rib::new();
        rib.insert_entry(is(1), snpa(1), 20, 0);
        rib.insert_entry(es(2), snpa(2), 30, 0);
        rib.record_redirect(
            nsap(3),
            snpa(3),
            Some(NetAddress::new(vec![0x47, 0xff, 1]).unwrap()),
            40,
            0,
        );
        rib.record_redirect(nsap(4), snpa(4), None, 40, 0);
        assert_eq!(
            rib.dump(0),
            "ES 4702 via 0a0000000002 expires 30\n\
             IS 47ff01 via 0a0000000001 expires 20\n\
             RD 4703 -> 0a0000000003 net 47ff01 expires 40\n\
             RD 4704 -> 0a0000000004 expires 40\n"
        );
        assert_eq!(rib.dump(25).lines().count(), 3);
    }

    #[test]
    fn insert_is_idempotent() {
        let mut rib = Rib::new();
        rib.insert_entry(es(1), snpa(1), 60, 5);
        let before = rib.clone();
        assert_eq!(rib.insert_entry(es(1), snpa(1), 60, 5), Upsert::Replaced);
        assert_eq!(rib, before);
    }
}
