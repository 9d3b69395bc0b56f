//! Deterministic discrete-event model of one broadcast subnetwork.
//!
//! Events run in (virtual time, insertion sequence) order. Nodes react
//! synchronously; their outputs are turned into new events: frames become
//! deliveries after the link latency, timer requests become timer firings.
//! The only randomness is in the fault plan and it comes from a seeded
//! generator, so a run is a pure function of its inputs.
//!
//! Every step is recorded as a [`LogRecord`]:
//!
//! ```text
//! t=<int> node=<name> <EVENT> <details>
//! ```

mod fault;
mod frame;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::address::NsapAddress;
use crate::engine::{ConfigError, EngineEvent, Node, NodeConfig};
use crate::Seconds;

pub use fault::{Corruption, FaultPlan, OctetChoice, ValueChoice};
pub use frame::{Frame, ALL_ES, ALL_IS, BROADCAST};

pub const DEFAULT_LATENCY: Seconds = 1;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("duplicate node name {0:?}")]
    DuplicateName(String),
    #[error("SNPA {0} already used by another node")]
    DuplicateSnpa(String),
    #[error("node {name:?}: {source}")]
    Config { name: String, source: ConfigError },
    #[error("time {at} is before the current time {now}")]
    InPast { at: Seconds, now: Seconds },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScriptAction {
    SendClnp {
        node: String,
        source: NsapAddress,
        destination: NsapAddress,
    },
    NodeDown {
        node: String,
    },
    NodeUp {
        node: String,
    },
}

impl ScriptAction {
    fn node(&self) -> &str {
        match self {
            ScriptAction::SendClnp { node, .. }
            | ScriptAction::NodeDown { node }
            | ScriptAction::NodeUp { node } => node,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogEvent {
    Send,
    Recv,
    Discard,
    Rib,
    Timer,
    Assign,
    Redirect,
}

impl fmt::Display for LogEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogEvent::Send => "SEND",
            LogEvent::Recv => "RECV",
            LogEvent::Discard => "DISCARD",
            LogEvent::Rib => "RIB",
            LogEvent::Timer => "TIMER",
            LogEvent::Assign => "ASSIGN",
            LogEvent::Redirect => "REDIRECT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogRecord {
    pub at: Seconds,
    pub node: String,
    pub event: LogEvent,
    pub detail: String,
}

impl fmt::Display for LogRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t={} node={} {} {}",
            self.at, self.node, self.event, self.detail
        )
    }
}

#[derive(Debug, Clone)]
enum EventKind {
    Deliver {
        frame: Frame,
        ordinal: u64,
        to: usize,
    },
    ConfigTimer {
        node: usize,
        generation: u64,
    },
    HoldingTimer {
        node: usize,
        generation: u64,
    },
    Script(ScriptAction),
}

#[derive(Debug, Clone)]
struct Scheduled {
    at: Seconds,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        (self.at, self.seq) == (other.at, other.seq)
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Reversed so the max-heap pops the earliest event first.
impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        (other.at, other.seq).cmp(&(self.at, self.seq))
    }
}

#[derive(Debug)]
struct SimNode {
    name: String,
    engine: Node,
    up: bool,
    timer_generation: u64,
    timer_at: Option<Seconds>,
    holding_generation: u64,
    holding_at: Option<Seconds>,
}

#[derive(Debug)]
pub struct Simulator {
    nodes: Vec<SimNode>,
    queue: BinaryHeap<Scheduled>,
    seq: u64,
    now: Seconds,
    latency: Seconds,
    faults: FaultPlan,
    rng: ChaCha8Rng,
    frames_sent: u64,
    log: Vec<LogRecord>,
}

impl Simulator {
    pub fn new(seed: u64) -> Self {
        Simulator {
            nodes: Vec::new(),
            queue: BinaryHeap::new(),
            seq: 0,
            now: 0,
            latency: DEFAULT_LATENCY,
            faults: FaultPlan::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            frames_sent: 0,
            log: Vec::new(),
        }
    }

    pub fn set_latency(&mut self, latency: Seconds) {
        self.latency = latency;
    }

    pub fn set_fault_plan(&mut self, plan: FaultPlan) {
        self.faults = plan;
    }

    pub fn now(&self) -> Seconds {
        self.now
    }

    pub fn log(&self) -> &[LogRecord] {
        &self.log
    }

    /// Adds a node and arms its first configuration timer.
    pub fn add_node(&mut self, name: &str, config: NodeConfig) -> Result<(), SimError> {
        if self.nodes.iter().any(|n| n.name == name) {
            return Err(SimError::DuplicateName(name.to_string()));
        }
        if self.nodes.iter().any(|n| n.engine.snpa() == config.snpa) {
            return Err(SimError::DuplicateSnpa(config.snpa.to_hex()));
        }
        let engine = Node::new(config).map_err(|source| SimError::Config {
            name: name.to_string(),
            source,
        })?;
        let first = engine.first_timer_at().max(self.now);
        self.nodes.push(SimNode {
            name: name.to_string(),
            engine,
            up: true,
            timer_generation: 0,
            timer_at: None,
            holding_generation: 0,
            holding_at: None,
        });
        let idx = self.nodes.len() - 1;
        self.arm_config_timer(idx, first);
        Ok(())
    }

    pub fn node(&self, name: &str) -> Option<&Node> {
        self.nodes
            .iter()
            .find(|n| n.name == name)
            .map(|n| &n.engine)
    }

    pub fn node_names(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.name.as_str())
    }

    /// RIB text dump of a node at the current time.
    pub fn rib_dump(&self, name: &str) -> Option<String> {
        self.node(name).map(|n| n.rib().dump(self.now))
    }

    fn index_of(&self, name: &str) -> Result<usize, SimError> {
        self.nodes
            .iter()
            .position(|n| n.name == name)
            .ok_or_else(|| SimError::UnknownNode(name.to_string()))
    }

    fn schedule(&mut self, at: Seconds, kind: EventKind) {
        self.seq += 1;
        self.queue.push(Scheduled {
            at,
            seq: self.seq,
            kind,
        });
    }

    pub fn inject(&mut self, action: ScriptAction, at: Seconds) -> Result<(), SimError> {
        self.index_of(action.node())?;
        if at < self.now {
            return Err(SimError::InPast { at, now: self.now });
        }
        self.schedule(at, EventKind::Script(action));
        Ok(())
    }

    fn record(&mut self, node: usize, event: LogEvent, detail: String) {
        self.log.push(LogRecord {
            at: self.now,
            node: self.nodes[node].name.clone(),
            event,
            detail,
        });
    }

    fn arm_config_timer(&mut self, node: usize, at: Seconds) {
        let n = &mut self.nodes[node];
        n.timer_generation += 1;
        n.timer_at = Some(at);
        let generation = n.timer_generation;
        self.schedule(at, EventKind::ConfigTimer { node, generation });
    }

    /// Keeps one pending holding-timer event at the node's earliest expiry.
    fn sync_holding_timer(&mut self, node: usize) {
        let next = self.nodes[node].engine.next_expiry();
        let n = &mut self.nodes[node];
        if next == n.holding_at {
            return;
        }
        n.holding_generation += 1;
        n.holding_at = next;
        let generation = n.holding_generation;
        if let Some(at) = next {
            self.schedule(
                at.max(self.now),
                EventKind::HoldingTimer { node, generation },
            );
        }
    }

    /// Hands a frame to the subnetwork: applies the fault plan and schedules
    /// one delivery per receiver.
    pub fn transmit(&mut self, from: usize, mut frame: Frame) {
        self.frames_sent += 1;
        let ordinal = self.frames_sent;
        let outcome = self
            .faults
            .apply(ordinal, &mut frame.payload, &mut self.rng);
        let mut detail = format!(
            "#{ordinal} {} dst={} len={} hex={}",
            frame.label(),
            frame.destination,
            frame.payload.len(),
            hex::encode(&frame.payload)
        );
        if let Some(note) = outcome.note() {
            detail.push_str(" fault=");
            detail.push_str(&note);
        }
        self.record(from, LogEvent::Send, detail);
        if outcome.dropped() {
            return;
        }
        let at = self.now + self.latency;
        let receivers: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| i != from)
            .filter(|&i| {
                let node = &self.nodes[i].engine;
                if frame.is_group() {
                    node.listens_to(frame.destination)
                } else {
                    node.snpa() == frame.destination
                }
            })
            .collect();
        for to in receivers {
            self.schedule(
                at,
                EventKind::Deliver {
                    frame: frame.clone(),
                    ordinal,
                    to,
                },
            );
        }
    }

    fn apply_engine_events(&mut self, node: usize, events: Vec<EngineEvent>) {
        for event in events {
            match event {
                EngineEvent::SendFrame(frame) => self.transmit(node, frame),
                EngineEvent::RibChanged { change, line } => {
                    self.record(node, LogEvent::Rib, format!("{} {line}", change.symbol()))
                }
                EngineEvent::Discarded(reason) => {
                    self.record(node, LogEvent::Discard, reason.to_string())
                }
                EngineEvent::AddressAssigned(net) => {
                    self.record(node, LogEvent::Assign, format!("net={net}"))
                }
                EngineEvent::RedirectIssued { destination, snpa } => self.record(
                    node,
                    LogEvent::Redirect,
                    format!("dest={destination} snpa={snpa}"),
                ),
                EngineEvent::TimerSet { at } => {
                    self.record(node, LogEvent::Timer, format!("next={at}"));
                    self.arm_config_timer(node, at);
                }
            }
        }
        self.sync_holding_timer(node);
    }

    /// Processes every event scheduled at or before `t_end` and returns the
    /// complete log.
    pub fn run_until(&mut self, t_end: Seconds) -> &[LogRecord] {
        while self.queue.peek().is_some_and(|e| e.at <= t_end) {
            let event = self.queue.pop().expect("peeked");
            debug_assert!(event.at >= self.now);
            self.now = event.at;
            self.step(event.kind);
        }
        self.now = self.now.max(t_end);
        &self.log
    }

    fn step(&mut self, kind: EventKind) {
        let now = self.now;
        match kind {
            EventKind::Deliver { frame, ordinal, to } => {
                if !self.nodes[to].up {
                    return;
                }
                self.record(
                    to,
                    LogEvent::Recv,
                    format!(
                        "#{ordinal} {} src={} len={}",
                        frame.label(),
                        frame.source,
                        frame.payload.len()
                    ),
                );
                let events = self.nodes[to].engine.handle_frame(&frame, now);
                self.apply_engine_events(to, events);
            }
            EventKind::ConfigTimer { node, generation } => {
                let n = &self.nodes[node];
                if !n.up || n.timer_generation != generation {
                    return;
                }
                let events = self.nodes[node].engine.on_config_timer(now);
                self.apply_engine_events(node, events);
            }
            EventKind::HoldingTimer { node, generation } => {
                let n = &self.nodes[node];
                if !n.up || n.holding_generation != generation {
                    return;
                }
                self.nodes[node].holding_at = None;
                let events = self.nodes[node].engine.on_holding_timer(now);
                self.apply_engine_events(node, events);
            }
            EventKind::Script(action) => self.run_script(action),
        }
    }

    fn run_script(&mut self, action: ScriptAction) {
        let now = self.now;
        let Ok(idx) = self.index_of(action.node()) else {
            return;
        };
        match action {
            ScriptAction::SendClnp {
                source,
                destination,
                ..
            } => {
                if !self.nodes[idx].up {
                    return;
                }
                let events = self.nodes[idx]
                    .engine
                    .originate_clnp(source, destination, now);
                self.apply_engine_events(idx, events);
            }
            ScriptAction::NodeDown { .. } => {
                let n = &mut self.nodes[idx];
                if !n.up {
                    return;
                }
                n.up = false;
                // Invalidate pending timers; timer_at is kept to resume on
                // the same period boundaries.
                n.timer_generation += 1;
                n.holding_generation += 1;
                n.holding_at = None;
                self.record(idx, LogEvent::Timer, "stopped (node down)".to_string());
            }
            ScriptAction::NodeUp { .. } => {
                if self.nodes[idx].up {
                    return;
                }
                self.nodes[idx].up = true;
                let period = Seconds::from(self.nodes[idx].engine.configuration_timer());
                let next = match self.nodes[idx].timer_at {
                    Some(t) if t < now => t + (now - t).div_ceil(period) * period,
                    Some(t) => t,
                    None => now,
                };
                self.record(idx, LogEvent::Timer, format!("resumed next={next}"));
                self.arm_config_timer(idx, next);
                self.sync_holding_timer(idx);
            }
        }
    }
}

#[cfg(test)]
mod tests;
