//! Scenario files for `esis run`.
//!
//! Line-oriented `key = value` pairs grouped in sections. `#` starts a
//! comment. Unknown sections and keys are errors.
//!
//! ```text
//! [sim]
//! seed = 7            # fault plan RNG seed (default 0)
//! until = 60          # run horizon, overridable with --until
//! latency = 1         # link latency in seconds (default 1)
//!
//! [node es1]
//! role = es           # es | is
//! snpa = 0a:00:00:00:00:01
//! nsap = 470001...    # repeatable; none makes the ES ask for an address
//! ct = 10             # configuration timer (default 30)
//! multiplier = 2      # holding time = multiplier * ct (default 2)
//! start = 3           # first timer firing (default 0 for es, ct for is)
//! profile = atn       # lenient | atn | atn:<afi hex>
//!
//! [node is1]
//! role = is
//! snpa = 0a:00:00:00:00:09
//! net = 470001...
//! esct = 20           # suggest a configuration timer to ESs
//! route = 39 <next-is-net> <next-is-snpa>   # repeatable
//!
//! [fault]
//! drop = 3                       # frame ordinal, 1-based
//! corrupt = 1 12 ff              # ordinal, octet index, value
//! corrupt = 2 random random reseal
//!
//! [script]
//! at = 5 clnp es1 <src nsap> <dst nsap>
//! at = 35 down es1
//! at = 40 up es1
//! ```

use std::collections::HashSet;
use std::str::FromStr;

use thiserror::Error;

use crate::address::{AddressError, NetAddress, NsapAddress, SnpaAddress, ValidationProfile};
use crate::engine::{NodeConfig, Role, Route};
use crate::sim::{
    Corruption, FaultPlan, OctetChoice, ScriptAction, SimError, Simulator, ValueChoice,
    DEFAULT_LATENCY,
};
use crate::Seconds;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ScenarioError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioNode {
    pub name: String,
    pub config: NodeConfig,
    /// Line of the section header, for diagnostics.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub seed: u64,
    pub until: Option<Seconds>,
    pub latency: Seconds,
    pub nodes: Vec<ScenarioNode>,
    pub faults: FaultPlan,
    pub script: Vec<(Seconds, ScriptAction)>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            seed: 0,
            until: None,
            latency: DEFAULT_LATENCY,
            nodes: Vec::new(),
            faults: FaultPlan::default(),
            script: Vec::new(),
        }
    }
}

enum Section {
    None,
    Sim,
    Node(PartialNode),
    Fault,
    Script,
}

struct PartialNode {
    name: String,
    line: usize,
    role: Option<Role>,
    snpa: Option<SnpaAddress>,
    nsaps: Vec<NsapAddress>,
    net: Option<NetAddress>,
    ct: Option<u16>,
    multiplier: Option<u16>,
    start: Option<Seconds>,
    esct: Option<u16>,
    profile: ValidationProfile,
    routes: Vec<Route>,
}

impl PartialNode {
    fn new(name: String, line: usize) -> Self {
        PartialNode {
            name,
            line,
            role: None,
            snpa: None,
            nsaps: Vec::new(),
            net: None,
            ct: None,
            multiplier: None,
            start: None,
            esct: None,
            profile: ValidationProfile::Lenient,
            routes: Vec::new(),
        }
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ScenarioError> {
        match key {
            "role" => {
                self.role = Some(match value {
                    "es" => Role::EndSystem,
                    "is" => Role::IntermediateSystem,
                    other => return err(line, format!("role must be es or is, got {other:?}")),
                })
            }
            "snpa" => self.snpa = Some(address(key, line, SnpaAddress::from_hex(value))?),
            "nsap" => self
                .nsaps
                .push(address(key, line, NsapAddress::from_hex(value))?),
            "net" => self.net = Some(address(key, line, NetAddress::from_hex(value))?),
            "ct" => self.ct = Some(number(key, value, line)?),
            "multiplier" => self.multiplier = Some(number(key, value, line)?),
            "start" => self.start = Some(number(key, value, line)?),
            "esct" => self.esct = Some(number(key, value, line)?),
            "profile" => {
                self.profile = match value.split_once(':') {
                    None if value == "lenient" => ValidationProfile::Lenient,
                    None if value == "atn" => ValidationProfile::atn(),
                    Some(("atn", afi)) => match u8::from_str_radix(afi, 16) {
                        Ok(afi) => ValidationProfile::Atn { afi },
                        Err(_) => return err(line, format!("bad AFI {afi:?}")),
                    },
                    _ => return err(line, format!("unknown profile {value:?}")),
                }
            }
            "route" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                let [prefix, net, snpa] = parts[..] else {
                    return err(
                        line,
                        "route needs: <prefix hex> <next-is net> <next-is snpa>",
                    );
                };
                let prefix = address(key, line, crate::address::parse_hex(prefix))?;
                self.routes.push(Route {
                    prefix,
                    next_is_net: address(key, line, NetAddress::from_hex(net))?,
                    next_is_snpa: address(key, line, SnpaAddress::from_hex(snpa))?,
                });
            }
            other => return err(line, format!("unknown node key {other:?}")),
        }
        Ok(())
    }

    fn finish(self) -> Result<ScenarioNode, ScenarioError> {
        let line = self.line;
        let Some(role) = self.role else {
            return err(line, format!("node {}: missing role", self.name));
        };
        let Some(snpa) = self.snpa else {
            return err(line, format!("node {}: missing snpa", self.name));
        };
        if role == Role::IntermediateSystem && !self.nsaps.is_empty() {
            return err(line, format!("node {}: nsap is for end systems", self.name));
        }
        if role == Role::EndSystem && (self.esct.is_some() || !self.routes.is_empty()) {
            return err(
                line,
                format!(
                    "node {}: esct and route are for intermediate systems",
                    self.name
                ),
            );
        }
        let mut config = NodeConfig::end_system(snpa, self.nsaps);
        config.role = role;
        config.local_net = self.net;
        if let Some(ct) = self.ct {
            config.configuration_timer = ct;
        }
        if let Some(m) = self.multiplier {
            config.holding_multiplier = m;
        }
        config.first_timer = self.start;
        config.suggested_esct = self.esct;
        config.validation_profile = self.profile;
        config.forwarding_table = self.routes;
        if let Err(e) = config.validate() {
            return err(line, format!("node {}: {e}", self.name));
        }
        Ok(ScenarioNode {
            name: self.name,
            config,
            line,
        })
    }
}

fn address<T>(key: &str, line: usize, r: Result<T, AddressError>) -> Result<T, ScenarioError> {
    r.or_else(|e| err(line, format!("{key}: {e}")))
}

fn number<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, ScenarioError> {
    value
        .parse()
        .or_else(|_| err(line, format!("{key}: not a valid number: {value:?}")))
}

fn parse_corruption(value: &str, line: usize) -> Result<Corruption, ScenarioError> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    let (reseal, parts) = match parts.split_last() {
        Some((&"reseal", rest)) => (true, rest),
        _ => (false, &parts[..]),
    };
    let (ordinal, octet, val) = match parts {
        [o, i] => (*o, *i, "random"),
        [o, i, v] => (*o, *i, *v),
        _ => {
            return err(
                line,
                "corrupt needs: <ordinal> <index|random> [value|random] [reseal]",
            )
        }
    };
    let octet = match octet {
        "random" => OctetChoice::Random,
        i => OctetChoice::At(number("corrupt index", i, line)?),
    };
    let value = match val {
        "random" => ValueChoice::Random,
        v => match u8::from_str_radix(v, 16) {
            Ok(v) => ValueChoice::Set(v),
            Err(_) => {
                return err(
                    line,
                    format!("corrupt value must be a hex octet, got {v:?}"),
                )
            }
        },
    };
    Ok(Corruption {
        ordinal: number("corrupt ordinal", ordinal, line)?,
        octet,
        value,
        reseal,
    })
}

fn parse_action(value: &str, line: usize) -> Result<(Seconds, ScriptAction), ScenarioError> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    let usage = "expected: <t> clnp <node> <src> <dst> | <t> down <node> | <t> up <node>";
    let Some((t, rest)) = parts.split_first() else {
        return err(line, usage);
    };
    let at = number("at", t, line)?;
    let nsap = |s: &str| NsapAddress::from_hex(s).or_else(|e| err(line, format!("clnp: {e}")));
    let action = match rest {
        ["clnp", node, src, dst] => ScriptAction::SendClnp {
            node: node.to_string(),
            source: nsap(src)?,
            destination: nsap(dst)?,
        },
        ["down", node] => ScriptAction::NodeDown {
            node: node.to_string(),
        },
        ["up", node] => ScriptAction::NodeUp {
            node: node.to_string(),
        },
        _ => return err(line, usage),
    };
    Ok((at, action))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let mut scenario = Scenario::default();
        let mut section = Section::None;
        let mut script_lines = Vec::new();
        let mut seen_sim = false;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(header) = content.strip_prefix('[') {
                let Some(header) = header.strip_suffix(']') else {
                    return err(line, "unterminated section header");
                };
                if let Section::Node(node) = std::mem::replace(&mut section, Section::None) {
                    scenario.nodes.push(node.finish()?);
                }
                let words: Vec<&str> = header.split_whitespace().collect();
                section = match words[..] {
                    ["sim"] if !seen_sim => {
                        seen_sim = true;
                        Section::Sim
                    }
                    ["sim"] => return err(line, "duplicate [sim] section"),
                    ["node", name] => Section::Node(PartialNode::new(name.to_string(), line)),
                    ["fault"] => Section::Fault,
                    ["script"] => Section::Script,
                    _ => return err(line, format!("unknown section [{header}]")),
                };
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return err(line, "expected key = value");
            };
            let (key, value) = (key.trim(), value.trim());
            match &mut section {
                Section::None => return err(line, "key outside of any section"),
                Section::Sim => match key {
                    "seed" => scenario.seed = number(key, value, line)?,
                    "until" => scenario.until = Some(number(key, value, line)?),
                    "latency" => scenario.latency = number(key, value, line)?,
                    _ => return err(line, format!("unknown sim key {key:?}")),
                },
                Section::Node(node) => node.set(key, value, line)?,
                Section::Fault => match key {
                    "drop" => scenario.faults.drops.push(number(key, value, line)?),
                    "corrupt" => scenario
                        .faults
                        .corruptions
                        .push(parse_corruption(value, line)?),
                    _ => return err(line, format!("unknown fault key {key:?}")),
                },
                Section::Script => match key {
                    "at" => {
                        scenario.script.push(parse_action(value, line)?);
                        script_lines.push(line);
                    }
                    _ => return err(line, format!("unknown script key {key:?}")),
                },
            }
        }
        if let Section::Node(node) = section {
            scenario.nodes.push(node.finish()?);
        }

        let mut names = HashSet::new();
        let mut snpas = HashSet::new();
        for node in &scenario.nodes {
            if !names.insert(node.name.as_str()) {
                return err(node.line, format!("duplicate node name {:?}", node.name));
            }
            if !snpas.insert(node.config.snpa) {
                return err(node.line, format!("duplicate snpa {}", node.config.snpa));
            }
        }
        for ((_, action), &line) in scenario.script.iter().zip(&script_lines) {
            let node = match action {
                ScriptAction::SendClnp { node, .. }
                | ScriptAction::NodeDown { node }
                | ScriptAction::NodeUp { node } => node,
            };
            if !names.contains(node.as_str()) {
                return err(line, format!("unknown node {node:?}"));
            }
        }
        Ok(scenario)
    }

    /// A simulator loaded with the nodes, faults and script, at time 0.
    pub fn build(&self) -> Result<Simulator, SimError> {
        let mut sim = Simulator::new(self.seed);
        sim.set_latency(self.latency);
        sim.set_fault_plan(self.faults.clone());
        for node in &self.nodes {
            sim.add_node(&node.name, node.config.clone())?;
        }
        for (at, action) in &self.script {
            sim.inject(action.clone(), *at)?;
        }
        Ok(sim)
    }
}
