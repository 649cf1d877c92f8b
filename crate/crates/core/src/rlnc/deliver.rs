use indexmap::IndexMap;

use super::{decode_generation, packetize, reassemble, run_session, AuditEntry, GenerationResult, PacketizedStream, Session};
use crate::codec::EncodedBlock;
use crate::error::{Error, Result};
use crate::netgraph::{independent_multicast_feasible, Network};

/// Injecting nodes beyond this count make round planning impractical.
const MAX_INJECTING_NODES: usize = 16;

/// Rounds needed so every set of injecting nodes can push its packets
/// through its cut to every receiver, plus headroom for rank lost to
/// unlucky coefficients.
pub fn plan_rounds<S: AsRef<str>>(
    net: &Network,
    streams: &[PacketizedStream],
    binding: &IndexMap<String, String>,
    receivers: &[S],
) -> Result<usize> {
    let mut load: IndexMap<usize, usize> = IndexMap::new();
    for s in streams {
        let node = binding
            .get(&s.name)
            .ok_or_else(|| Error::Binding(format!("stream `{}` has no injecting node", s.name)))?;
        *load.entry(net.node_index(node)?).or_default() += s.packets.len();
    }
    load.retain(|_, count| *count > 0);
    if load.len() > MAX_INJECTING_NODES {
        return Err(Error::arg(format!("more than {MAX_INJECTING_NODES} injecting nodes")));
    }
    let receivers = receivers
        .iter()
        .map(|t| net.node_index(t.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let nodes: Vec<usize> = load.keys().copied().collect();
    let mut needed = 0usize;
    for mask in 1u32..(1 << nodes.len()) {
        let set: Vec<usize> = (0..nodes.len()).filter(|i| mask >> i & 1 == 1).map(|i| nodes[i]).collect();
        let packets: usize = set.iter().map(|n| load[n]).sum();
        for &t in &receivers {
            let cut = net.min_cut_value(&set, t)? as usize;
            if cut == 0 {
                return Err(Error::Precondition(format!(
                    "no capacity from {{{}}} to `{}`",
                    set.iter().map(|&n| net.node_name(n)).collect::<Vec<_>>().join(","),
                    net.node_name(t)
                )));
            }
            needed = needed.max(packets.div_ceil(cut));
        }
    }
    Ok(needed + (needed / 8).max(3))
}

#[derive(Debug, Clone)]
pub struct StreamDelivery {
    pub rounds: usize,
    pub generation_size: usize,
    /// Reassembled streams per receiver, in input order.
    pub received: IndexMap<String, Vec<Vec<u8>>>,
    pub audit: Vec<AuditEntry>,
}

/// Sends byte streams from their bound nodes to `receivers` (all terminals
/// when `None`) in one generation and decodes at each receiver.
pub fn deliver_streams(
    net: &Network,
    streams: &[(String, Vec<u8>)],
    binding: &IndexMap<String, String>,
    receivers: Option<&[String]>,
    seed: u64,
    packet_size: usize,
) -> Result<StreamDelivery> {
    let receivers: Vec<String> = match receivers {
        Some(r) => r.to_vec(),
        None => net.terminal_names(),
    };
    let packets = packetize(streams, packet_size)?;
    let rounds = plan_rounds(net, &packets, binding, &receivers)?;
    let session = Session::new(net, &packets, binding, seed)?.with_receivers(&receivers)?;
    let outcome = run_session(&session, rounds)?;
    let g = outcome.generation_size;
    let mut received = IndexMap::new();
    for (terminal, got) in &outcome.received {
        match decode_generation(got, g)? {
            GenerationResult::Decoded(source) => {
                received.insert(terminal.clone(), reassemble(&packets, &source)?);
            }
            GenerationResult::RankDeficit { rank } => {
                return Err(Error::Delivery {
                    terminal: terminal.clone(),
                    rank,
                    needed: g,
                })
            }
        }
    }
    Ok(StreamDelivery {
        rounds,
        generation_size: g,
        received,
        audit: outcome.audit,
    })
}

#[derive(Debug, Clone)]
pub struct Delivery {
    pub rounds: usize,
    pub generation_size: usize,
    pub blocks: IndexMap<String, EncodedBlock>,
    pub audit: Vec<AuditEntry>,
}

/// Injects each stream of `block` at its bound node and rebuilds the block
/// at every terminal. Rejects bindings whose stream rates the network cannot
/// carry, before any packet is sent.
pub fn deliver_multicast(
    net: &Network,
    block: &EncodedBlock,
    binding: &IndexMap<String, String>,
    seed: u64,
    packet_size: usize,
) -> Result<Delivery> {
    let n = block.len() as f64;
    let mut rates: IndexMap<String, f64> = IndexMap::new();
    for s in block.streams() {
        let node = binding
            .get(&s.name)
            .ok_or_else(|| Error::Binding(format!("stream `{}` has no injecting node", s.name)))?;
        *rates.entry(node.clone()).or_default() += s.bits.len() as f64 / n;
    }
    let parts = block.to_parts();
    let payload_bits: usize = block.streams().iter().map(|s| s.bits.len()).sum();
    let framed_bits: usize = parts.iter().map(|(_, p)| p.len() * 8).sum();
    let report = independent_multicast_feasible(net, &rates)?.recheck((framed_bits - payload_bits) as f64 / n);
    if !report.is_feasible() {
        let violated: Vec<String> = report.violated().map(|c| c.label.clone()).collect();
        return Err(Error::Precondition(format!(
            "stream rates exceed the network: {}",
            violated.join("; ")
        )));
    }

    let delivered = deliver_streams(net, &parts, binding, None, seed, packet_size)?;
    let mut blocks = IndexMap::new();
    for (terminal, streams) in delivered.received {
        let bytes: Vec<u8> = streams.into_iter().flatten().collect();
        blocks.insert(terminal, EncodedBlock::from_bytes(&bytes)?);
    }
    Ok(Delivery {
        rounds: delivered.rounds,
        generation_size: delivered.generation_size,
        blocks,
        audit: delivered.audit,
    })
}
