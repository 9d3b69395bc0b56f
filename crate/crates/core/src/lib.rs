//! End System to Intermediate System (ES-IS) routeing information exchange.
//!
//! The crate is split along the protocol's processing path:
//!
//! - [`address`]: NSAP, NET and SNPA address types and the NSAP validation profiles.
//! - [`checksum`]: the Fletcher mod-255 header checksum.
//! - [`pdu`]: bit-exact encoding, decoding and validation of ESH, ISH, RD, RA and AA PDUs.
//! - [`rib`]: the routing information base (neighbor table plus redirect cache).
//! - [`engine`]: ES and IS role state machines.
//! - [`sim`]: a deterministic discrete-event broadcast subnetwork.
//! - [`cli`]: the `esis` command-line front end and its scenario file format.

pub mod address;
pub mod checksum;
pub mod cli;
pub mod engine;
pub mod pdu;
pub mod rib;
pub mod sim;

/// Virtual time in whole seconds.
pub type Seconds = u64;

pub use address::{AddressError, NetAddress, NsapAddress, SnpaAddress, ValidationProfile};
pub use checksum::{generate_checksum, verify_checksum, ChecksumStatus};
pub use engine::{EngineEvent, Node, NodeConfig, Role};
pub use pdu::{decode, encode, DiscardReason, Pdu, PduBody, PduType, ProtocolErrorKind};
pub use rib::{NextHop, Rib};
pub use sim::{Frame, Simulator};
