//! Generation-based random linear network coding over GF(256).
//!
//! All source packets of a session form one generation. Source nodes start
//! with their own packets; every round, each node in topological order sends
//! on each outgoing edge as many random combinations of what it holds as the
//! edge capacity allows (but no more than its rank). Terminals decode by
//! Gaussian elimination once they hold a full-rank set.

mod deliver;
pub mod gf256;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::netgraph::Network;

pub use deliver::{deliver_multicast, deliver_streams, plan_rounds, Delivery, StreamDelivery};

/// Payload size used when none is given.
pub const DEFAULT_PACKET_SIZE: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub generation: u32,
    pub coefficients: Vec<u8>,
    pub payload: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketizedStream {
    pub name: String,
    /// Length before padding.
    pub byte_len: usize,
    pub packets: Vec<Vec<u8>>,
}

impl PacketizedStream {
    pub fn padding(&self) -> usize {
        self.packets.iter().map(Vec::len).sum::<usize>() - self.byte_len
    }
}

/// Splits each stream into `packet_size` payloads, zero-padding the last.
pub fn packetize<S: AsRef<str>, B: AsRef<[u8]>>(
    streams: &[(S, B)],
    packet_size: usize,
) -> Result<Vec<PacketizedStream>> {
    if packet_size == 0 {
        return Err(Error::arg("packet size must be at least one byte"));
    }
    if streams.is_empty() {
        return Err(Error::arg("no streams to packetize"));
    }
    Ok(streams
        .iter()
        .map(|(name, bytes)| {
            let bytes = bytes.as_ref();
            let packets = bytes
                .chunks(packet_size)
                .map(|c| {
                    let mut p = c.to_vec();
                    p.resize(packet_size, 0);
                    p
                })
                .collect();
            PacketizedStream {
                name: name.as_ref().to_owned(),
                byte_len: bytes.len(),
                packets,
            }
        })
        .collect())
}

/// Concatenates decoded source packets back into streams, dropping padding.
pub fn reassemble(streams: &[PacketizedStream], source_packets: &[Vec<u8>]) -> Result<Vec<Vec<u8>>> {
    let total: usize = streams.iter().map(|s| s.packets.len()).sum();
    if total != source_packets.len() {
        return Err(Error::arg(format!("{} packets for {total} slots", source_packets.len())));
    }
    let mut next = source_packets.iter();
    Ok(streams
        .iter()
        .map(|s| {
            let mut bytes: Vec<u8> = next.by_ref().take(s.packets.len()).flatten().copied().collect();
            bytes.truncate(s.byte_len);
            bytes
        })
        .collect())
}

/// Row-reduced span of coded packets: each row is coefficients followed by payload.
#[derive(Debug, Clone, Default)]
struct Subspace {
    g: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

impl Subspace {
    fn new(g: usize) -> Self {
        Subspace {
            g,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row; returns whether it increased the rank.
    fn insert(&mut self, mut row: Vec<u8>) -> bool {
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            let c = row[p];
            gf256::axpy(&mut row, c, r);
        }
        let Some(p) = row[..self.g].iter().position(|&c| c != 0) else {
            return false;
        };
        let lead = gf256::inv(row[p]);
        gf256::scale(&mut row, lead);
        for r in &mut self.rows {
            let c = r[p];
            gf256::axpy(r, c, &row);
        }
        self.rows.push(row);
        self.pivots.push(p);
        true
    }

    /// Random combination of the basis with nonzero coefficients.
    fn combine(&self, rng: &mut ChaCha8Rng, width: usize) -> Vec<u8> {
        let mut out = vec![0u8; width];
        for r in &self.rows {
            let c: u8 = rng.random_range(1..=255);
            gf256::axpy(&mut out, c, r);
        }
        out
    }

    /// Source packets in order, when the span is full.
    fn solved(&self) -> Option<Vec<Vec<u8>>> {
        if self.rank() < self.g {
            return None;
        }
        let mut out = vec![Vec::new(); self.g];
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            out[p] = r[self.g..].to_vec();
        }
        Some(out)
    }
}

/// A configured transport run: one generation injected at bound nodes.
#[derive(Debug, Clone)]
pub struct Session {
    net: Network,
    generation: u32,
    packet_size: usize,
    /// Source packet payloads, in stream order.
    sources: Vec<Vec<u8>>,
    /// Injecting node for each source packet.
    origin: Vec<usize>,
    receivers: Vec<usize>,
    seed: u64,
}

impl Session {
    /// Binds each stream to the node that injects it. Streams must share the
    /// packet size.
    pub fn new(
        net: &Network,
        streams: &[PacketizedStream],
        binding: &IndexMap<String, String>,
        seed: u64,
    ) -> Result<Self> {
        let mut sources = Vec::new();
        let mut origin = Vec::new();
        let mut packet_size = None;
        for s in streams {
            let node = binding
                .get(&s.name)
                .ok_or_else(|| Error::Binding(format!("stream `{}` has no injecting node", s.name)))?;
            let node = net.node_index(node)?;
            for p in &s.packets {
                if *packet_size.get_or_insert(p.len()) != p.len() {
                    return Err(Error::arg("packets differ in size"));
                }
                sources.push(p.clone());
                origin.push(node);
            }
        }
        Ok(Session {
            net: net.clone(),
            generation: 0,
            packet_size: packet_size.unwrap_or(0),
            sources,
            origin,
            receivers: net.terminals().to_vec(),
            seed,
        })
    }

    /// Restricts which terminals report received packets.
    pub fn with_receivers<S: AsRef<str>>(mut self, terminals: &[S]) -> Result<Self> {
        self.receivers = terminals
            .iter()
            .map(|t| self.net.node_index(t.as_ref()))
            .collect::<Result<_>>()?;
        Ok(self)
    }

    pub fn with_generation(mut self, id: u32) -> Self {
        self.generation = id;
        self
    }

    pub fn generation_size(&self) -> usize {
        self.sources.len()
    }

    pub fn packet_size(&self) -> usize {
        self.packet_size
    }

    pub fn network(&self) -> &Network {
        &self.net
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditEntry {
    pub round: usize,
    pub edge: usize,
    pub from: String,
    pub to: String,
    pub capacity: u64,
    pub packets: u64,
}

#[derive(Debug, Clone)]
pub struct SessionOutcome {
    pub generation_size: usize,
    pub received: IndexMap<String, Vec<Packet>>,
    pub audit: Vec<AuditEntry>,
}

impl SessionOutcome {
    /// One JSON object per line per edge per round.
    pub fn audit_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for e in &self.audit {
            out.push_str(&serde_json::to_string(e)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn capacity_violations(&self) -> usize {
        self.audit.iter().filter(|e| e.packets > e.capacity).count()
    }
}

/// Runs the session for `rounds` rounds. Deterministic in the session seed.
pub fn run_session(session: &Session, rounds: usize) -> Result<SessionOutcome> {
    if rounds == 0 {
        return Err(Error::arg("a session needs at least one round"));
    }
    let net = &session.net;
    let g = session.sources.len();
    let width = g + session.packet_size;
    let mut state: Vec<Subspace> = (0..net.nodes().len()).map(|_| Subspace::new(g)).collect();
    for (i, (payload, &node)) in session.sources.iter().zip(&session.origin).enumerate() {
        let mut row = vec![0u8; width];
        row[i] = 1;
        row[g..].copy_from_slice(payload);
        state[node].insert(row);
    }

    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); net.nodes().len()];
    for (i, e) in net.edges().iter().enumerate() {
        out_edges[e.from].push(i);
    }
    let mut received: Vec<Vec<Packet>> = vec![Vec::new(); net.nodes().len()];
    let mut audit = Vec::with_capacity(rounds * net.edges().len());
    let mut rng = ChaCha8Rng::seed_from_u64(session.seed);

    for round in 0..rounds {
        for &u in net.topological_order() {
            for &ei in &out_edges[u] {
                let e = &net.edges()[ei];
                let count = e.capacity.min(state[u].rank() as u64);
                for _ in 0..count {
                    let row = state[u].combine(&mut rng, width);
                    if session.receivers.contains(&e.to) {
                        received[e.to].push(Packet {
                            generation: session.generation,
                            coefficients: row[..g].to_vec(),
                            payload: row[g..].to_vec(),
                        });
                    }
                    state[e.to].insert(row);
                }
                audit.push(AuditEntry {
                    round,
                    edge: ei,
                    from: net.node_name(e.from).to_owned(),
                    to: net.node_name(e.to).to_owned(),
                    capacity: e.capacity,
                    packets: count,
                });
            }
        }
    }

    Ok(SessionOutcome {
        generation_size: g,
        received: session
            .receivers
            .iter()
            .map(|&t| (net.node_name(t).to_owned(), std::mem::take(&mut received[t])))
            .collect(),
        audit,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenerationResult {
    Decoded(Vec<Vec<u8>>),
    RankDeficit { rank: usize },
}

/// Gaussian elimination over the received coding vectors.
pub fn decode_generation(received: &[Packet], g: usize) -> Result<GenerationResult> {
    let Some(first) = received.first() else {
        return Ok(if g == 0 {
            GenerationResult::Decoded(Vec::new())
        } else {
            GenerationResult::RankDeficit { rank: 0 }
        });
    };
    let size = first.payload.len();
    let mut span = Subspace::new(g);
    for p in received {
        if p.generation != first.generation {
            return Err(Error::arg("packets from different generations"));
        }
        if p.payload.len() != size {
            return Err(Error::arg("inconsistent payload sizes"));
        }
        if p.coefficients.len() != g {
            return Err(Error::arg(format!(
                "coding vector of length {} for generation size {g}",
                p.coefficients.len()
            )));
        }
        let mut row = p.coefficients.clone();
        row.extend_from_slice(&p.payload);
        span.insert(row);
        if span.rank() == g {
            break;
        }
    }
    Ok(match span.solved() {
        Some(packets) => GenerationResult::Decoded(packets),
        None => GenerationResult::RankDeficit { rank: span.rank() },
    })
}
