mod common;

use commonnet::codec::{encode_multicast_block, Codebook};
use commonnet::netgraph::LatentSource;
use commonnet::rlnc::{
    decode_generation, deliver_multicast, deliver_streams, packetize, plan_rounds, reassemble, run_session,
    GenerationResult, Session,
};
use commonnet::{Error, Network};
use common::*;
use indexmap::IndexMap;
use rand::Rng;

fn binding(pairs: &[(&str, &str)]) -> IndexMap<String, String> {
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

fn random_bytes(seed: u64, len: usize) -> Vec<u8> {
    let mut r = rng(seed);
    (0..len).map(|_| r.random()).collect()
}

fn line(capacity: u64) -> Network {
    Network::new(
        ["s", "r", "t"].map(String::from).to_vec(),
        vec![("s".into(), "r".into(), capacity), ("r".into(), "t".into(), capacity)],
        IndexMap::from([("X".to_string(), "s".to_string())]),
        vec!["t".into()],
    )
    .unwrap()
}

#[test]
fn butterfly_delivers_both_packets_in_one_round() {
    let net = net_fixture("butterfly.json");
    let streams = [("a", vec![1u8; 8]), ("b", vec![2u8; 8])];
    let packets = packetize(&streams, 8).unwrap();
    let session = Session::new(&net, &packets, &binding(&[("a", "s1"), ("b", "s2")]), 3).unwrap();
    let out = run_session(&session, 1).unwrap();
    for (terminal, got) in &out.received {
        assert!(got.len() >= 2, "{terminal} got {}", got.len());
        match decode_generation(got, 2).unwrap() {
            GenerationResult::Decoded(src) => assert_eq!(reassemble(&packets, &src).unwrap(), vec![vec![1; 8], vec![2; 8]]),
            other => panic!("{terminal}: {other:?}"),
        }
    }
}

#[test]
fn zero_rounds_is_an_argument_error() {
    let net = net_fixture("butterfly.json");
    let packets = packetize(&[("a", [0u8; 4])], 4).unwrap();
    let session = Session::new(&net, &packets, &binding(&[("a", "s1")]), 0).unwrap();
    assert!(matches!(run_session(&session, 0), Err(Error::InvalidArgument(_))));
}

#[test]
fn zero_capacity_carries_nothing() {
    let net = line(0);
    let packets = packetize(&[("a", [7u8; 10])], 4).unwrap();
    let b = binding(&[("a", "s")]);
    let session = Session::new(&net, &packets, &b, 0).unwrap();
    let out = run_session(&session, 5).unwrap();
    assert!(out.received["t"].is_empty());
    assert!(out.audit.iter().all(|e| e.packets == 0));
    assert!(matches!(plan_rounds(&net, &packets, &b, &["t"]), Err(Error::Precondition(_))));
}

#[test]
fn store_and_forward_needs_enough_rounds() {
    let net = line(1);
    let data = random_bytes(1, 30);
    let packets = packetize(&[("a", &data)], 10).unwrap();
    let b = binding(&[("a", "s")]);
    let session = Session::new(&net, &packets, &b, 5).unwrap();
    let short = run_session(&session, 2).unwrap();
    assert!(matches!(
        decode_generation(&short.received["t"], 3).unwrap(),
        GenerationResult::RankDeficit { rank: 2 }
    ));
    let delivered = deliver_streams(&net, &[("a".into(), data.clone())], &b, None, 5, 10).unwrap();
    assert_eq!(delivered.received["t"], vec![data]);
    assert!(delivered.rounds >= 3);
}

#[test]
fn random_butterfly_trials_almost_always_decode() {
    let net = net_fixture("butterfly.json");
    let b = binding(&[("a", "s1"), ("b", "s2")]);
    let mut ok = 0;
    for seed in 0..100 {
        let streams = [("a".to_string(), random_bytes(seed, 100)), ("b".to_string(), random_bytes(seed + 1000, 70))];
        if let Ok(d) = deliver_streams(&net, &streams, &b, None, seed, 16) {
            if d.received.values().all(|got| got[0] == streams[0].1 && got[1] == streams[1].1) {
                ok += 1;
            }
        }
    }
    assert!(ok >= 99, "{ok} of 100");
}

#[test]
fn sessions_are_deterministic_in_the_seed() {
    let net = net_fixture("relay_mesh.json");
    let streams = [("a", random_bytes(2, 90)), ("b", random_bytes(3, 90))];
    let packets = packetize(&streams, 16).unwrap();
    let b = binding(&[("a", "a"), ("b", "e")]);
    let run = |seed| run_session(&Session::new(&net, &packets, &b, seed).unwrap(), 8).unwrap();
    let (x, y, z) = (run(9), run(9), run(10));
    assert_eq!(x.received, y.received);
    assert_eq!(x.audit, y.audit);
    assert_ne!(x.received, z.received);
}

#[test]
fn audit_accounts_for_every_packet() {
    let net = net_fixture("relay_mesh.json");
    let packets = packetize(&[("a", random_bytes(4, 200)), ("b", random_bytes(5, 200))], 20).unwrap();
    let b = binding(&[("a", "a"), ("b", "e")]);
    let rounds = plan_rounds(&net, &packets, &b, &net.terminal_names()).unwrap();
    let out = run_session(&Session::new(&net, &packets, &b, 6).unwrap(), rounds).unwrap();
    assert_eq!(out.capacity_violations(), 0);
    assert_eq!(out.audit.len(), rounds * net.edges().len());
    assert_eq!(out.audit_jsonl().unwrap().lines().count(), out.audit.len());
    for (terminal, got) in &out.received {
        let inbound: u64 = out.audit.iter().filter(|e| &e.to == terminal).map(|e| e.packets).sum();
        assert_eq!(got.len() as u64, inbound);
        assert!(matches!(decode_generation(got, out.generation_size).unwrap(), GenerationResult::Decoded(_)));
    }
}

#[test]
fn multicast_block_crosses_the_example_network() {
    let pmf = pmf_fixture("shared_bit_source.json");
    let net = net_fixture("relay_mesh.json");
    let book = Codebook::from_pmf(&pmf, &["X", "Y"]).unwrap();
    let seqs = pmf.sample_iid(2000, 1).unwrap();
    let block = encode_multicast_block(&seqs, &book, 0.1).unwrap();
    let expanded = net
        .expand_with_latent_sources(&[
            LatentSource::new("s_X'", ["a"]),
            LatentSource::new("s_Y'", ["e"]),
            LatentSource::new("s_K", ["a", "e"]),
        ])
        .unwrap();
    let b = binding(&[("X'", "s_X'"), ("Y'", "s_Y'"), ("k'", "s_K")]);
    let d = deliver_multicast(&expanded, &block, &b, 1, 64).unwrap();
    assert_eq!(d.blocks.len(), 3);
    assert!(d.blocks.values().all(|got| got == &block));
    assert!(d.audit.iter().all(|e| e.packets <= e.capacity));
}

#[test]
fn overloaded_binding_is_refused_before_sending() {
    let pmf = pmf_fixture("independent_2bit.json");
    let net = net_fixture("butterfly.json");
    let book = Codebook::from_pmf(&pmf, &["X", "Y"]).unwrap();
    let seqs = pmf.sample_iid(1000, 2).unwrap();
    let block = encode_multicast_block(&seqs, &book, 0.1).unwrap();
    let b = binding(&[("X'", "s1"), ("Y'", "s2"), ("k'", "s1")]);
    assert!(matches!(deliver_multicast(&net, &block, &b, 1, 64), Err(Error::Precondition(_))));
}

#[test]
fn packetize_pads_and_reassembles() {
    let streams = [("a", random_bytes(7, 33)), ("b", Vec::new()), ("c", random_bytes(8, 16))];
    let packets = packetize(&streams, 16).unwrap();
    assert_eq!(packets.iter().map(|p| p.packets.len()).collect::<Vec<_>>(), [3, 0, 1]);
    assert_eq!(packets[0].padding(), 15);
    let flat: Vec<Vec<u8>> = packets.iter().flat_map(|p| p.packets.clone()).collect();
    let back = reassemble(&packets, &flat).unwrap();
    assert_eq!(back, streams.iter().map(|s| s.1.clone()).collect::<Vec<_>>());
    assert!(packetize(&streams, 0).is_err());
}
