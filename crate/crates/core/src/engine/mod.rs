//! ES and IS role state machines.
//!
//! A [`Node`] owns its configuration and RIB and reacts to three inputs:
//! configuration timer firings, holding timer firings and received frames.
//! Every reaction is returned as an ordered list of [`EngineEvent`]s; the
//! node never touches the network or a clock itself.

mod clnp;

use thiserror::Error;

use crate::address::{NetAddress, NsapAddress, SnpaAddress, ValidationProfile, MAX_NSAP_LEN};
use crate::pdu::{
    decode_with, encode_with_checksum, DiscardReason, OptionParam, Pdu, PduBody, ProtocolErrorKind,
    NLPID_ESIS,
};
use crate::rib::{NeighborAddress, NeighborKind, Rib, Upsert};
use crate::sim::{Frame, ALL_ES, ALL_IS, BROADCAST};
use crate::Seconds;

pub use clnp::{MinimalClnpPdu, NLPID_CLNP};

pub const DEFAULT_CONFIGURATION_TIMER: u16 = 30;
pub const DEFAULT_HOLDING_MULTIPLIER: u16 = 2;

/// Octets of the IS NET kept as the prefix of an assigned temporary NET.
const TEMP_NET_PREFIX_LEN: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    EndSystem,
    IntermediateSystem,
}

/// Static route used by an IS to pick a better IS for redirects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub prefix: Vec<u8>,
    pub next_is_net: NetAddress,
    pub next_is_snpa: SnpaAddress,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("an intermediate system needs a NET")]
    MissingNet,
    #[error("configuration timer must be positive")]
    ZeroTimer,
    #[error("holding multiplier must be at least 2, got {0}")]
    MultiplierTooSmall(u16),
    #[error("holding time {0} does not fit in 16 bits")]
    HoldingTimeOverflow(u32),
    #[error("local addresses do not fit one ESH: {0}")]
    AddressesTooLong(String),
    #[error("ESCT suggestion must be positive")]
    ZeroEsct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeConfig {
    pub role: Role,
    pub snpa: SnpaAddress,
    /// ES only; empty makes the ES request an address with RA.
    pub local_nsaps: Vec<NsapAddress>,
    /// Mandatory for an IS. An ES configured with one behaves as if it had
    /// already been assigned it.
    pub local_net: Option<NetAddress>,
    pub configuration_timer: u16,
    pub holding_multiplier: u16,
    pub validation_profile: ValidationProfile,
    /// IS only.
    pub forwarding_table: Vec<Route>,
    /// IS only: configuration timer suggested to ESs through ESCT.
    pub suggested_esct: Option<u16>,
    /// First configuration timer firing; `None` picks the role default
    /// (0 for an ES, one timer period for an IS).
    pub first_timer: Option<Seconds>,
}

impl NodeConfig {
    pub fn end_system(snpa: SnpaAddress, local_nsaps: Vec<NsapAddress>) -> Self {
        NodeConfig {
            role: Role::EndSystem,
            snpa,
            local_nsaps,
            local_net: None,
            configuration_timer: DEFAULT_CONFIGURATION_TIMER,
            holding_multiplier: DEFAULT_HOLDING_MULTIPLIER,
            validation_profile: ValidationProfile::default(),
            forwarding_table: Vec::new(),
            suggested_esct: None,
            first_timer: None,
        }
    }

    pub fn intermediate_system(snpa: SnpaAddress, net: NetAddress) -> Self {
        NodeConfig {
            role: Role::IntermediateSystem,
            local_net: Some(net),
            ..Self::end_system(snpa, Vec::new())
        }
    }

    pub fn with_timer(mut self, seconds: u16) -> Self {
        self.configuration_timer = seconds;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.role == Role::IntermediateSystem && self.local_net.is_none() {
            return Err(ConfigError::MissingNet);
        }
        if self.configuration_timer == 0 {
            return Err(ConfigError::ZeroTimer);
        }
        if self.holding_multiplier < 2 {
            return Err(ConfigError::MultiplierTooSmall(self.holding_multiplier));
        }
        let ht = u32::from(self.holding_multiplier) * u32::from(self.configuration_timer);
        if ht > u32::from(u16::MAX) {
            return Err(ConfigError::HoldingTimeOverflow(ht));
        }
        if self.suggested_esct == Some(0) {
            return Err(ConfigError::ZeroEsct);
        }
        if !self.local_nsaps.is_empty() {
            crate::pdu::encode(&Pdu::esh(self.local_nsaps.clone(), 1))
                .map_err(|e| ConfigError::AddressesTooLong(e.to_string()))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RibChange {
    Added,
    Replaced,
    Refreshed,
    Expired,
}

impl RibChange {
    pub fn symbol(self) -> &'static str {
        match self {
            RibChange::Added => "+",
            RibChange::Replaced => "=",
            RibChange::Refreshed => "^",
            RibChange::Expired => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EngineEvent {
    SendFrame(Frame),
    RibChanged {
        change: RibChange,
        line: String,
    },
    Discarded(DiscardReason),
    AddressAssigned(NetAddress),
    RedirectIssued {
        destination: NsapAddress,
        snpa: SnpaAddress,
    },
    TimerSet {
        at: Seconds,
    },
}

#[derive(Debug, Clone)]
pub struct Node {
    config: NodeConfig,
    rib: Rib,
    acquired_net: Option<NetAddress>,
    configuration_timer: u16,
}

impl Node {
    pub fn new(config: NodeConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let acquired_net = match config.role {
            Role::EndSystem => config.local_net.clone(),
            Role::IntermediateSystem => None,
        };
        Ok(Node {
            configuration_timer: config.configuration_timer,
            acquired_net,
            rib: Rib::new(),
            config,
        })
    }

    pub fn config(&self) -> &NodeConfig {
        &self.config
    }

    pub fn role(&self) -> Role {
        self.config.role
    }

    pub fn snpa(&self) -> SnpaAddress {
        self.config.snpa
    }

    pub fn rib(&self) -> &Rib {
        &self.rib
    }

    /// Current configuration timer, which an ESCT suggestion may have changed.
    pub fn configuration_timer(&self) -> u16 {
        self.configuration_timer
    }

    pub fn holding_time(&self) -> u16 {
        self.config
            .holding_multiplier
            .saturating_mul(self.configuration_timer)
    }

    /// NET held by an ES after address assignment.
    pub fn acquired_net(&self) -> Option<&NetAddress> {
        self.acquired_net.as_ref()
    }

    pub fn first_timer_at(&self) -> Seconds {
        self.config.first_timer.unwrap_or(match self.config.role {
            Role::EndSystem => 0,
            Role::IntermediateSystem => Seconds::from(self.configuration_timer),
        })
    }

    pub fn next_expiry(&self) -> Option<Seconds> {
        self.rib.next_expiry()
    }

    pub fn listens_to(&self, destination: SnpaAddress) -> bool {
        destination == self.config.snpa
            || destination == BROADCAST
            || match self.config.role {
                Role::EndSystem => destination == ALL_ES,
                Role::IntermediateSystem => destination == ALL_IS,
            }
    }

    fn frame(&self, destination: SnpaAddress, payload: Vec<u8>) -> EngineEvent {
        EngineEvent::SendFrame(Frame::new(destination, self.config.snpa, payload))
    }

    fn send_pdu(&self, destination: SnpaAddress, pdu: &Pdu) -> EngineEvent {
        let raw = encode_with_checksum(pdu).expect("engine builds valid PDUs");
        self.frame(destination, raw)
    }

    /// Addresses an ES announces: its NSAPs, or the NET it was assigned.
    fn announced_addresses(&self) -> Vec<NsapAddress> {
        if !self.config.local_nsaps.is_empty() {
            return self.config.local_nsaps.clone();
        }
        self.acquired_net.iter().cloned().map(Into::into).collect()
    }

    fn esh(&self) -> Option<Pdu> {
        let addrs = self.announced_addresses();
        (!addrs.is_empty()).then(|| Pdu::esh(addrs, self.holding_time()))
    }

    fn ish(&self) -> Pdu {
        let net = self
            .config
            .local_net
            .clone()
            .expect("validated IS has a NET");
        let pdu = Pdu::ish(net, self.holding_time());
        match self.config.suggested_esct {
            Some(esct) => pdu.with_option(OptionParam::esct(esct)),
            None => pdu,
        }
    }

    fn flush(&mut self, now: Seconds) -> Vec<EngineEvent> {
        self.rib
            .drain_expired(now)
            .into_iter()
            .map(|gone| EngineEvent::RibChanged {
                change: RibChange::Expired,
                line: gone.to_string(),
            })
            .collect()
    }

    fn rib_event(change: Upsert, line: String) -> EngineEvent {
        EngineEvent::RibChanged {
            change: match change {
                Upsert::Inserted => RibChange::Added,
                Upsert::Replaced => RibChange::Replaced,
            },
            line,
        }
    }

    /// Report configuration (ESH or ISH) or request address (RA).
    pub fn on_config_timer(&mut self, now: Seconds) -> Vec<EngineEvent> {
        let mut events = self.flush(now);
        match self.config.role {
            Role::EndSystem => match self.esh() {
                Some(esh) => {
                    events.push(self.send_pdu(ALL_IS, &esh));
                    if !self.rib.has_live_is(now) {
                        events.push(self.send_pdu(ALL_ES, &esh));
                    }
                }
                None => events.push(self.send_pdu(ALL_IS, &Pdu::ra())),
            },
            Role::IntermediateSystem => {
                let ish = self.ish();
                events.push(self.send_pdu(ALL_ES, &ish));
            }
        }
        events.push(EngineEvent::TimerSet {
            at: now + Seconds::from(self.configuration_timer),
        });
        events
    }

    /// Flush driven by the earliest holding timer.
    pub fn on_holding_timer(&mut self, now: Seconds) -> Vec<EngineEvent> {
        self.flush(now)
    }

    pub fn handle_frame(&mut self, frame: &Frame, now: Seconds) -> Vec<EngineEvent> {
        if frame.source == self.config.snpa || !self.listens_to(frame.destination) {
            return Vec::new();
        }
        let profile = self.config.validation_profile;
        match frame.payload.first() {
            Some(&NLPID_ESIS) => {
                let mut events = self.flush(now);
                match decode_with(&frame.payload, profile) {
                    Ok(pdu) => events.extend(self.dispatch(&pdu, frame.source, now)),
                    Err(reason) => events.push(EngineEvent::Discarded(reason)),
                }
                events
            }
            Some(&NLPID_CLNP) => match MinimalClnpPdu::decode(&frame.payload, profile) {
                Some(clnp) => {
                    let mut events = self.flush(now);
                    events.extend(match self.config.role {
                        Role::IntermediateSystem => {
                            self.handle_clnp_at_is(&clnp, frame.source, now)
                        }
                        Role::EndSystem => self.handle_clnp_at_es(&clnp, frame.source, now),
                    });
                    events
                }
                None => Vec::new(),
            },
            _ => Vec::new(),
        }
    }

    fn dispatch(&mut self, pdu: &Pdu, source: SnpaAddress, now: Seconds) -> Vec<EngineEvent> {
        let ht = pdu.holding_time();
        match (&pdu.body, self.config.role) {
            (PduBody::Esh { source_addresses }, Role::IntermediateSystem) => {
                self.handle_esh(source_addresses, ht, source, now)
            }
            (PduBody::Esh { source_addresses }, Role::EndSystem) => {
                self.record_peer_esh(source_addresses, ht, source, now)
            }
            (PduBody::Ish { net }, Role::EndSystem) => {
                self.handle_ish(net, ht, pdu.esct(), source, now)
            }
            // ISs learn nothing from each other's hellos here.
            (PduBody::Ish { .. }, Role::IntermediateSystem) => Vec::new(),
            (PduBody::Ra, _) => self.handle_ra(source, now),
            (PduBody::Aa { net }, _) => self.handle_aa(net),
            (
                PduBody::Rd {
                    destination,
                    better_snpa,
                    redirect_net,
                },
                _,
            ) => self.handle_rd(destination, *better_snpa, redirect_net.as_ref(), ht, now),
        }
    }

    fn wrong_role() -> Vec<EngineEvent> {
        vec![EngineEvent::Discarded(DiscardReason::ProtocolError(
            ProtocolErrorKind::WrongRole,
        ))]
    }

    /// Record configuration at an IS, plus configuration notification when
    /// the sender is newly available.
    pub fn handle_esh(
        &mut self,
        source_addresses: &[NsapAddress],
        holding_time: u16,
        source: SnpaAddress,
        now: Seconds,
    ) -> Vec<EngineEvent> {
        if self.config.role != Role::IntermediateSystem {
            return Self::wrong_role();
        }
        if holding_time == 0 {
            return Vec::new();
        }
        let mut events = Vec::new();
        let mut newly_available = false;
        for nsap in source_addresses {
            let change =
                self.rib
                    .insert_entry(NeighborAddress::Es(nsap.clone()), source, holding_time, now);
            newly_available |= change == Upsert::Inserted;
            let line = self
                .rib
                .lookup_kind(NeighborKind::EsNeighbor, nsap.as_bytes(), now)
                .map(ToString::to_string)
                .unwrap_or_default();
            events.push(Self::rib_event(change, line));
        }
        if newly_available {
            let ish = self.ish();
            events.push(self.send_pdu(source, &ish));
        }
        events
    }

    /// An ES only keeps other ESs' hellos while it knows no IS; once an IS
    /// is known, routes come from the IS and its redirects.
    fn record_peer_esh(
        &mut self,
        source_addresses: &[NsapAddress],
        holding_time: u16,
        source: SnpaAddress,
        now: Seconds,
    ) -> Vec<EngineEvent> {
        if holding_time == 0 || self.rib.has_live_is(now) {
            return Vec::new();
        }
        source_addresses
            .iter()
            .map(|nsap| {
                let change = self.rib.insert_entry(
                    NeighborAddress::Es(nsap.clone()),
                    source,
                    holding_time,
                    now,
                );
                let line = self
                    .rib
                    .lookup_kind(NeighborKind::EsNeighbor, nsap.as_bytes(), now)
                    .map(ToString::to_string)
                    .unwrap_or_default();
                Self::rib_event(change, line)
            })
            .collect()
    }

    pub fn handle_ish(
        &mut self,
        net: &NetAddress,
        holding_time: u16,
        esct: Option<u16>,
        source: SnpaAddress,
        now: Seconds,
    ) -> Vec<EngineEvent> {
        if self.config.role != Role::EndSystem {
            return Vec::new();
        }
        let mut events = Vec::new();
        if holding_time > 0 {
            let change =
                self.rib
                    .insert_entry(NeighborAddress::Is(net.clone()), source, holding_time, now);
            let line = self
                .rib
                .lookup_kind(NeighborKind::IsNeighbor, net.as_bytes(), now)
                .map(ToString::to_string)
                .unwrap_or_default();
            events.push(Self::rib_event(change, line));
            if change == Upsert::Inserted {
                if let Some(esh) = self.esh() {
                    events.push(self.send_pdu(source, &esh));
                }
            }
        }
        if let Some(esct) = esct.filter(|&v| v > 0 && v != self.configuration_timer) {
            self.configuration_timer = esct;
            events.push(EngineEvent::TimerSet {
                at: now + Seconds::from(esct),
            });
        }
        events
    }

    /// Assign address: answer an RA with a temporary NET.
    pub fn handle_ra(&mut self, source: SnpaAddress, _now: Seconds) -> Vec<EngineEvent> {
        if self.config.role != Role::IntermediateSystem {
            return Self::wrong_role();
        }
        let aa = Pdu::aa(self.assign_temporary_net(source), self.holding_time());
        vec![self.send_pdu(source, &aa)]
    }

    /// Record address: the latest assignment wins.
    pub fn handle_aa(&mut self, net: &NetAddress) -> Vec<EngineEvent> {
        if self.config.role != Role::EndSystem {
            return Self::wrong_role();
        }
        self.acquired_net = Some(net.clone());
        vec![EngineEvent::AddressAssigned(net.clone())]
    }

    pub fn handle_rd(
        &mut self,
        destination: &NsapAddress,
        better_snpa: SnpaAddress,
        redirect_net: Option<&NetAddress>,
        holding_time: u16,
        now: Seconds,
    ) -> Vec<EngineEvent> {
        if self.config.role != Role::EndSystem {
            return Self::wrong_role();
        }
        if holding_time == 0 {
            return Vec::new();
        }
        let change = self.rib.record_redirect(
            destination.clone(),
            better_snpa,
            redirect_net.cloned(),
            holding_time,
            now,
        );
        let line = self
            .rib
            .redirect(destination.as_bytes(), now)
            .map(ToString::to_string)
            .unwrap_or_default();
        vec![Self::rib_event(change, line)]
    }

    /// Request redirect: tell the sending ES about a better first hop, and
    /// forward the traffic there.
    pub fn handle_clnp_at_is(
        &mut self,
        clnp: &MinimalClnpPdu,
        source: SnpaAddress,
        now: Seconds,
    ) -> Vec<EngineEvent> {
        if self.config.role != Role::IntermediateSystem {
            return Vec::new();
        }
        let dest = clnp.destination.as_bytes();
        let better = match self.rib.lookup_kind(NeighborKind::EsNeighbor, dest, now) {
            Some(es) => Some((es.snpa, None)),
            None => self
                .longest_prefix_route(dest)
                .map(|r| (r.next_is_snpa, Some(r.next_is_net.clone()))),
        };
        let Some((snpa, net)) = better else {
            return Vec::new();
        };
        if snpa == source {
            return Vec::new();
        }
        let rd = Pdu::rd(clnp.destination.clone(), snpa, net, self.holding_time());
        vec![
            self.send_pdu(source, &rd),
            EngineEvent::RedirectIssued {
                destination: clnp.destination.clone(),
                snpa,
            },
            self.frame(snpa, clnp.encode()),
        ]
    }

    fn longest_prefix_route(&self, destination: &[u8]) -> Option<&Route> {
        let mut best: Option<&Route> = None;
        for route in &self.config.forwarding_table {
            if destination.starts_with(&route.prefix)
                && best.is_none_or(|b| route.prefix.len() > b.prefix.len())
            {
                best = Some(route);
            }
        }
        best
    }

    /// Refresh redirect on traffic arriving from the redirect's next hop.
    pub fn handle_clnp_at_es(
        &mut self,
        clnp: &MinimalClnpPdu,
        source: SnpaAddress,
        now: Seconds,
    ) -> Vec<EngineEvent> {
        if self.config.role != Role::EndSystem {
            return Vec::new();
        }
        let src = clnp.source.as_bytes();
        let Some(holding_time) = self.rib.redirect(src, now).map(|r| r.holding_time) else {
            return Vec::new();
        };
        if !self.rib.refresh_redirect(src, source, now, holding_time) {
            return Vec::new();
        }
        let line = self
            .rib
            .redirect(src, now)
            .map(ToString::to_string)
            .unwrap_or_default();
        vec![EngineEvent::RibChanged {
            change: RibChange::Refreshed,
            line,
        }]
    }

    /// Sends a CLNP stub PDU toward `destination` using the RIB's next hop.
    pub fn originate_clnp(
        &mut self,
        source: NsapAddress,
        destination: NsapAddress,
        now: Seconds,
    ) -> Vec<EngineEvent> {
        let mut events = self.flush(now);
        let hop = match self.rib.next_hop(destination.as_bytes(), now) {
            crate::rib::NextHop::Direct(s) | crate::rib::NextHop::ViaIs(s) => s,
            crate::rib::NextHop::Unknown => return events,
        };
        let payload = MinimalClnpPdu::new(source, destination).encode();
        events.push(self.frame(hop, payload));
        events
    }

    /// Temporary NET for a requesting ES: the first 13 octets of this IS's
    /// NET (zero-padded if shorter), the requester's SNPA, and selector 0.
    pub fn assign_temporary_net(&self, requester: SnpaAddress) -> NetAddress {
        let own = self
            .config
            .local_net
            .as_ref()
            .map_or(&[][..], |n| n.as_bytes());
        let mut octets = vec![0u8; TEMP_NET_PREFIX_LEN];
        let n = own.len().min(TEMP_NET_PREFIX_LEN);
        octets[..n].copy_from_slice(&own[..n]);
        octets.extend_from_slice(requester.as_bytes());
        octets.push(0);
        debug_assert_eq!(octets.len(), MAX_NSAP_LEN);
        NetAddress::new(octets).expect("20-octet NET")
    }
}
