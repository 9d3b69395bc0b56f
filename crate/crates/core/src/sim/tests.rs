use super::*;
use crate::address::{NetAddress, SnpaAddress};
use crate::engine::NodeConfig;

fn snpa(last: u8) -> SnpaAddress {
    SnpaAddress::new([0x0a, 0, 0, 0, 0, last])
}

fn nsap(tail: u8) -> NsapAddress {
    NsapAddress::new(vec![0x47, 0x00, 0x01, tail]).unwrap()
}

fn net() -> NetAddress {
    NetAddress::new((1..=20).collect::<Vec<u8>>()).unwrap()
}

fn pair(ct: u16) -> Simulator {
    let mut sim = Simulator::new(1);
    sim.add_node(
        "es1",
        NodeConfig::end_system(snpa(1), vec![nsap(1)]).with_timer(ct),
    )
    .unwrap();
    sim.add_node(
        "is1",
        NodeConfig::intermediate_system(snpa(9), net()).with_timer(ct),
    )
    .unwrap();
    sim
}

fn count(log: &[LogRecord], node: &str, event: LogEvent, needle: &str) -> usize {
    log.iter()
        .filter(|r| r.node == node && r.event == event && r.detail.contains(needle))
        .count()
}

#[test]
fn empty_simulation_logs_nothing() {
    let mut sim = Simulator::new(0);
    assert!(sim.run_until(100).is_empty());
    assert_eq!(sim.now(), 100);
}

#[test]
fn registration_errors() {
    let mut sim = pair(10);
    assert_eq!(
        sim.add_node("es1", NodeConfig::end_system(snpa(2), vec![])),
        Err(SimError::DuplicateName("es1".into()))
    );
    assert!(matches!(
        sim.add_node("es2", NodeConfig::end_system(snpa(1), vec![])),
        Err(SimError::DuplicateSnpa(_))
    ));
    let down = ScriptAction::NodeDown {
        node: "nope".into(),
    };
    assert_eq!(
        sim.inject(down, 5),
        Err(SimError::UnknownNode("nope".into()))
    );
    sim.run_until(10);
    let down = ScriptAction::NodeDown { node: "es1".into() };
    assert_eq!(
        sim.inject(down, 5),
        Err(SimError::InPast { at: 5, now: 10 })
    );
}

#[test]
fn both_roles_hello_periodically() {
    let mut sim = pair(10);
    let log = sim.run_until(25).to_vec();
    assert!(count(&log, "es1", LogEvent::Send, " ESH ") >= 2);
    assert!(count(&log, "is1", LogEvent::Send, " ISH ") >= 2);
    assert!(sim.node("es1").unwrap().rib().has_live_is(25));
    assert!(sim
        .rib_dump("is1")
        .unwrap()
        .contains("ES 47000101 via 0a0000000001"));
}

#[test]
fn log_lines_have_the_common_prefix() {
    let mut sim = pair(10);
    for r in sim.run_until(25) {
        let line = r.to_string();
        assert!(
            line.starts_with(&format!("t={} node={} ", r.at, r.node)),
            "{line}"
        );
    }
}

#[test]
fn unicast_reaches_only_its_target() {
    let mut sim = pair(10);
    sim.add_node(
        "es2",
        NodeConfig::end_system(snpa(2), vec![nsap(2)]).with_timer(10),
    )
    .unwrap();
    let frame = Frame::new(snpa(2), snpa(9), vec![0x55]);
    sim.transmit(2, frame);
    sim.run_until(1);
    let recv: Vec<_> = sim
        .log()
        .iter()
        .filter(|r| r.detail.starts_with("#1 "))
        .collect();
    assert_eq!(recv.len(), 1, "{recv:?}");
    assert_eq!(recv[0].event, LogEvent::Send);
}

#[test]
fn dropped_frame_is_not_delivered() {
    let mut sim = pair(10);
    sim.set_fault_plan(FaultPlan {
        drops: vec![1, 2],
        corruptions: vec![],
    });
    let log = sim.run_until(5).to_vec();
    assert_eq!(count(&log, "es1", LogEvent::Send, "fault=drop"), 2);
    assert!(sim.node("is1").unwrap().rib().num_of_entry() == 0);
}

#[test]
fn corrupted_hello_is_discarded() {
    let mut sim = pair(10);
    sim.set_fault_plan(FaultPlan {
        drops: vec![],
        corruptions: vec![Corruption {
            ordinal: 1,
            octet: OctetChoice::At(12),
            value: ValueChoice::Random,
            reseal: false,
        }],
    });
    let log = sim.run_until(5).to_vec();
    assert_eq!(count(&log, "is1", LogEvent::Discard, "ChecksumError"), 1);
    assert_eq!(sim.node("is1").unwrap().rib().num_of_entry(), 0);
}

#[test]
fn holding_timer_removes_entry_at_expiry() {
    let mut sim = pair(10);
    sim.inject(ScriptAction::NodeDown { node: "es1".into() }, 15)
        .unwrap();
    sim.run_until(29);
    // Last ESH at t=10, received at 11, held for 20.
    assert!(sim.rib_dump("is1").unwrap().contains("ES "));
    let log = sim.run_until(31).to_vec();
    assert!(!sim.rib_dump("is1").unwrap().contains("ES "));
    let gone: Vec<_> = log
        .iter()
        .filter(|r| r.node == "is1" && r.event == LogEvent::Rib && r.detail.starts_with("- ES"))
        .collect();
    assert_eq!(gone.len(), 1);
    assert_eq!(gone[0].at, 31);
}

#[test]
fn node_resumes_on_period_boundary() {
    let mut sim = pair(10);
    sim.inject(ScriptAction::NodeDown { node: "es1".into() }, 5)
        .unwrap();
    sim.inject(ScriptAction::NodeUp { node: "es1".into() }, 23)
        .unwrap();
    let log = sim.run_until(31).to_vec();
    assert!(log
        .iter()
        .any(|r| r.node == "es1" && r.detail == "resumed next=30"));
    let esh_times: Vec<_> = log
        .iter()
        .filter(|r| {
            r.node == "es1" && r.event == LogEvent::Send && r.detail.contains("dst=09002b000005")
        })
        .map(|r| r.at)
        .collect();
    assert_eq!(esh_times, vec![0, 30]);
}

#[test]
fn runs_are_reproducible() {
    let run = |seed| {
        let mut sim = pair(10);
        sim.rng = ChaCha8Rng::seed_from_u64(seed);
        sim.set_fault_plan(FaultPlan {
            drops: vec![3],
            corruptions: vec![Corruption {
                ordinal: 2,
                octet: OctetChoice::Random,
                value: ValueChoice::Random,
                reseal: false,
            }],
        });
        sim.run_until(100).to_vec()
    };
    assert_eq!(run(4), run(4));
}
