use esis::cli::Scenario;
use esis::engine::NodeConfig;
use esis::sim::{Corruption, FaultPlan, LogEvent, OctetChoice, ScriptAction, ValueChoice};
use esis::{NetAddress, NsapAddress, Simulator, SnpaAddress};

fn snpa(last: u8) -> SnpaAddress {
    SnpaAddress::new([0x0a, 0, 0, 0, 0, last])
}

fn nsap(tail: u8) -> NsapAddress {
    let mut v = vec![0x47, 0x00, 0x27, 0x81];
    v.resize(19, tail);
    v.push(1);
    NsapAddress::new(v).unwrap()
}

fn net() -> NetAddress {
    NetAddress::new(vec![
        0x47, 0x00, 0x27, 0x81, 9, 9, 9, 9, 9, 9, 9, 9, 9, 0x0a, 0, 0, 0, 0, 9, 0,
    ])
    .unwrap()
}

fn es(last: u8, ct: u16) -> NodeConfig {
    NodeConfig::end_system(snpa(last), vec![nsap(last)]).with_timer(ct)
}

fn is(ct: u16) -> NodeConfig {
    NodeConfig::intermediate_system(snpa(9), net()).with_timer(ct)
}

fn delayed(mut cfg: NodeConfig) -> NodeConfig {
    cfg.first_timer = Some(100);
    cfg
}

#[test]
fn group_hello_reaches_every_other_es() {
    // Only es1's first timer fires before t=100.
    let mut sim = Simulator::new(0);
    sim.add_node("es1", es(1, 30)).unwrap();
    sim.add_node("es2", delayed(es(2, 30))).unwrap();
    sim.add_node("es3", delayed(es(3, 30))).unwrap();
    sim.add_node("is1", delayed(is(30))).unwrap();
    let log = sim.run_until(1);
    let recv: Vec<_> = log
        .iter()
        .filter(|r| r.event == LogEvent::Recv && r.detail.starts_with("#2 "))
        .map(|r| r.node.as_str())
        .collect();
    // Frame #2 is the all-ES copy: every ES but the sender, and not the IS.
    assert_eq!(recv, ["es2", "es3"]);
}

#[test]
fn scripted_clnp_enters_the_is_one_latency_later() {
    let mut sim = Simulator::new(0);
    sim.add_node("es1", es(1, 30)).unwrap();
    sim.add_node("is1", is(30)).unwrap();
    sim.inject(
        ScriptAction::SendClnp {
            node: "es1".into(),
            source: nsap(1),
            destination: nsap(7),
        },
        15,
    )
    .unwrap();
    let log = sim.run_until(20);
    let clnp: Vec<_> = log.iter().filter(|r| r.detail.contains(" CLNP ")).collect();
    assert_eq!(clnp.len(), 2);
    assert_eq!((clnp[0].at, clnp[0].event), (15, LogEvent::Send));
    assert_eq!(
        (clnp[1].at, clnp[1].node.as_str(), clnp[1].event),
        (16, "is1", LogEvent::Recv)
    );
}

#[test]
fn down_es_is_flushed_one_holding_time_after_its_last_hello() {
    let mut sim = Simulator::new(0);
    let mut cfg = es(1, 30);
    cfg.holding_multiplier = 2;
    sim.add_node("es1", cfg).unwrap();
    sim.add_node("is1", is(30)).unwrap();
    sim.inject(ScriptAction::NodeDown { node: "es1".into() }, 40)
        .unwrap();
    // Last hello at 30, heard at 31, held 60.
    sim.run_until(90);
    assert!(sim
        .node("is1")
        .unwrap()
        .rib()
        .lookup(nsap(1).as_bytes(), 90)
        .is_some());
    sim.run_until(91);
    assert_eq!(sim.node("is1").unwrap().rib().num_of_entry(), 0);
}

#[test]
fn frames_to_a_down_node_are_lost() {
    let mut sim = Simulator::new(0);
    sim.add_node("es1", es(1, 10)).unwrap();
    sim.add_node("is1", is(10)).unwrap();
    sim.inject(ScriptAction::NodeDown { node: "is1".into() }, 0)
        .unwrap();
    let log = sim.run_until(30).to_vec();
    assert!(!log
        .iter()
        .any(|r| r.node == "is1" && r.event == LogEvent::Recv));
    assert_eq!(sim.node("is1").unwrap().rib().num_of_entry(), 0);
}

/// Virtual time never goes backwards in the log.
#[test]
fn log_time_is_monotonic() {
    let text = include_str!("../scenarios/redirect.scn");
    let mut sim = Scenario::parse(text).unwrap().build().unwrap();
    let log = sim.run_until(200);
    assert!(log.windows(2).all(|w| w[0].at <= w[1].at));
}

/// A randomly corrupted hello never changes the RIB. It is discarded with a
/// checksum error unless the damage is caught by an earlier check: a
/// changed NLPID makes it foreign traffic (ignored without a discard), a
/// changed version is WrongVersion, and a length indicator raised past the
/// frame's end is a truncated PDU.
#[test]
fn corrupted_hello_never_reaches_the_rib() {
    for seed in 0..400 {
        let mut sim = Simulator::new(seed);
        sim.add_node("es1", es(1, 10)).unwrap();
        sim.add_node("is1", is(50)).unwrap();
        sim.set_fault_plan(FaultPlan {
            drops: vec![],
            corruptions: vec![Corruption {
                ordinal: 1,
                octet: OctetChoice::Random,
                value: ValueChoice::Random,
                reseal: false,
            }],
        });
        let log = sim.run_until(1).to_vec();
        let send = &log[0];
        let note = send
            .detail
            .split("fault=corrupt@")
            .nth(1)
            .expect("corrupted");
        let (index, values) = note.split_once(':').unwrap();
        let index: usize = index.parse().unwrap();
        let new = u8::from_str_radix(&values[3..5], 16).unwrap();
        let discard = log
            .iter()
            .find(|r| r.node == "is1" && r.event == LogEvent::Discard)
            .map(|r| r.detail.as_str());
        let expected = match index {
            0 => None,
            1 if usize::from(new) > 31 => Some("ProtocolError(TruncatedPdu)"),
            2 => Some("WrongVersion"),
            _ => Some("ChecksumError"),
        };
        assert_eq!(discard, expected, "seed {seed}, octet {index} -> {new:02x}");
        assert_eq!(
            sim.node("is1").unwrap().rib().num_of_entry(),
            0,
            "seed {seed}"
        );
    }
}
