//! Codebooks and self-delimiting encoded blocks for the common/residual split.

use bitvec::prelude::*;
use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::huffman::{Bits, CodeTable};
use crate::common_info::{decompose, decompose_source, ComponentPartition, SourceDecomposition};
use crate::error::{Error, Result};
use crate::probability::{typical_indices, JointPmf, SymbolSequence};

/// Name of the stream carrying the common part.
pub const COMMON_STREAM: &str = "k'";

/// Bits in the fixed header: block length, typicality flag, epsilon.
pub const HEADER_BITS: usize = 32 + 1 + 32;

const EPSILON_SCALE: f64 = (1u64 << 24) as f64;

pub fn residual_stream(var: &str) -> String {
    format!("{var}'")
}

/// Prefix-free tables for the common part and for each variable's index
/// within its component, plus a per-variable marginal table used where the
/// common part is not available.
#[derive(Debug, Clone)]
pub struct Codebook {
    partition: ComponentPartition,
    decomps: Vec<SourceDecomposition>,
    k_table: CodeTable,
    k_width: u32,
    within: Vec<Vec<CodeTable>>,
    marginal: Vec<CodeTable>,
}

/// Builds a codebook from a partition and one decomposition per partition
/// variable, in any order.
pub fn build_codebook(partition: ComponentPartition, decomps: Vec<SourceDecomposition>) -> Result<Codebook> {
    let vars = partition.variables().to_vec();
    let mut slots: Vec<Option<SourceDecomposition>> = vec![None; vars.len()];
    for d in decomps {
        let pos = partition.var_position(d.variable())?;
        if slots[pos].is_some() {
            return Err(Error::arg(format!("two decompositions of `{}`", d.variable())));
        }
        if d.component_count() != partition.len() {
            return Err(Error::arg(format!(
                "decomposition of `{}` comes from a different partition",
                d.variable()
            )));
        }
        slots[pos] = Some(d);
    }
    let decomps = slots
        .into_iter()
        .zip(&vars)
        .map(|(d, v)| d.ok_or_else(|| Error::arg(format!("no decomposition for `{v}`"))))
        .collect::<Result<Vec<_>>>()?;

    let k_table = CodeTable::from_probabilities(&partition.weights())?;
    let k_width = usize::BITS - (partition.len() - 1).leading_zeros();
    let mut within = Vec::with_capacity(vars.len());
    let mut marginal = Vec::with_capacity(vars.len());
    for d in &decomps {
        let mut tables = Vec::with_capacity(partition.len());
        let mut dist = vec![0.0; d.alphabet().len()];
        for c in 0..partition.len() {
            if d.members(c).is_empty() {
                return Err(Error::Structural(format!(
                    "component {c} has no `{}` symbols",
                    d.variable()
                )));
            }
            tables.push(CodeTable::from_probabilities(d.conditional(c))?);
            for (w, &x) in d.members(c).iter().enumerate() {
                dist[x] += d.weights()[c] * d.conditional(c)[w];
            }
        }
        within.push(tables);
        marginal.push(CodeTable::from_probabilities(&dist)?);
    }
    Ok(Codebook {
        partition,
        decomps,
        k_table,
        k_width,
        within,
        marginal,
    })
}

impl Codebook {
    /// Decomposes `pmf` over `vars` and builds the matching codebook.
    pub fn from_pmf<S: AsRef<str>>(pmf: &JointPmf, vars: &[S]) -> Result<Self> {
        let partition = decompose(pmf, vars)?;
        let decomps = vars
            .iter()
            .map(|v| decompose_source(pmf, &partition, v.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        build_codebook(partition, decomps)
    }

    pub fn partition(&self) -> &ComponentPartition {
        &self.partition
    }

    pub fn variables(&self) -> &[String] {
        self.partition.variables()
    }

    pub fn decomposition(&self, var: &str) -> Result<&SourceDecomposition> {
        Ok(&self.decomps[self.partition.var_position(var)?])
    }

    pub fn common_table(&self) -> &CodeTable {
        &self.k_table
    }

    /// Per-symbol width of the fixed-length fallback for the common part.
    pub fn fixed_width(&self) -> u32 {
        self.k_width
    }

    pub fn within_table(&self, var: &str, component: usize) -> Result<&CodeTable> {
        self.within[self.partition.var_position(var)?]
            .get(component)
            .ok_or_else(|| Error::arg(format!("no component {component}")))
    }

    pub fn marginal_table(&self, var: &str) -> Result<&CodeTable> {
        Ok(&self.marginal[self.partition.var_position(var)?])
    }

    /// Codes the common part, falling back to fixed width when `ks` is not
    /// strongly typical. Returns the typicality flag and the bits.
    fn encode_common(&self, ks: &[usize], epsilon: f64) -> Result<(bool, Bits)> {
        let typical = ks.is_empty() || typical_indices(ks, &self.partition.weights(), epsilon)?;
        let mut bits = Bits::new();
        for &k in ks {
            if typical {
                self.k_table.encode_into(k, &mut bits);
            } else {
                for i in (0..self.k_width).rev() {
                    bits.push(k >> i & 1 == 1);
                }
            }
        }
        Ok((typical, bits))
    }

    fn decode_common(&self, bits: &BitSlice<u8, Msb0>, count: usize, typical: bool) -> Result<Vec<usize>> {
        let mut pos = 0;
        let mut ks = Vec::with_capacity(count);
        for i in 0..count {
            let k = if typical {
                self.k_table
                    .decode_from(bits, &mut pos)
                    .ok_or_else(|| Error::decode(COMMON_STREAM, i, "no codeword"))?
            } else {
                let width = self.k_width as usize;
                let chunk = bits
                    .get(pos..pos + width)
                    .ok_or_else(|| Error::decode(COMMON_STREAM, i, "stream exhausted"))?;
                pos += width;
                let k = chunk.iter().fold(0usize, |acc, b| acc << 1 | *b as usize);
                if k >= self.partition.len() {
                    return Err(Error::decode(COMMON_STREAM, i, format!("component {k} out of range")));
                }
                k
            };
            ks.push(k);
        }
        expect_consumed(COMMON_STREAM, bits, pos, count)?;
        Ok(ks)
    }
}

fn expect_consumed(stream: &str, bits: &BitSlice<u8, Msb0>, pos: usize, count: usize) -> Result<()> {
    if pos != bits.len() {
        return Err(Error::decode(stream, count, format!("{} trailing bits", bits.len() - pos)));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockKind {
    /// Every source is described: the common part plus each residual.
    Multicast,
    /// Only the first source is recovered; the common part is described at
    /// the positions selected by `gamma` and `seed`.
    Helper { gamma: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    pub name: String,
    pub bits: Bits,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedBlock {
    n: usize,
    typical: bool,
    epsilon: f64,
    kind: BlockKind,
    streams: Vec<Stream>,
}

fn quantize_epsilon(epsilon: f64) -> Result<u32> {
    if !(epsilon > 0.0 && epsilon * EPSILON_SCALE < u32::MAX as f64) {
        return Err(Error::arg(format!("epsilon {epsilon} outside (0, 256)")));
    }
    Ok((epsilon * EPSILON_SCALE).round().max(1.0) as u32)
}

impl EncodedBlock {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_typical(&self) -> bool {
        self.typical
    }

    /// The epsilon actually used, after fixed-point quantization.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    pub fn streams(&self) -> &[Stream] {
        &self.streams
    }

    pub fn stream(&self, name: &str) -> Option<&Bits> {
        self.streams.iter().find(|s| s.name == name).map(|s| &s.bits)
    }

    fn require(&self, name: &str) -> Result<&Bits> {
        self.stream(name)
            .ok_or_else(|| Error::decode(name, 0, "stream missing from block"))
    }

    /// Drops a stream, as a receiver that never got it would see the block.
    pub fn without_stream(&self, name: &str) -> EncodedBlock {
        let mut out = self.clone();
        out.streams.retain(|s| s.name != name);
        out
    }

    pub fn stream_mut(&mut self, name: &str) -> Option<&mut Bits> {
        self.streams.iter_mut().find(|s| s.name == name).map(|s| &mut s.bits)
    }

    /// Bits per source symbol of each stream.
    pub fn rates(&self) -> IndexMap<String, f64> {
        self.streams
            .iter()
            .map(|s| (s.name.clone(), s.bits.len() as f64 / self.n as f64))
            .collect()
    }

    /// Payload bits per symbol over all streams, header excluded.
    pub fn total_rate(&self) -> f64 {
        self.streams.iter().map(|s| s.bits.len()).sum::<usize>() as f64 / self.n as f64
    }

    /// Serializes the block. Layout: 32-bit `n`, the typicality flag bit and
    /// a 32-bit Q8.24 epsilon, zero-padded to a byte; a kind tag (with gamma
    /// and seed for helper blocks); the stream count; then per stream its
    /// name, a 64-bit bit count and the bits zero-padded to a byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.to_parts().into_iter().flat_map(|(_, bytes)| bytes).collect()
    }

    /// The serialized block cut at stream boundaries, one part per stream.
    /// The first part also carries the block header. Concatenating the parts
    /// gives [`EncodedBlock::to_bytes`].
    pub fn to_parts(&self) -> Vec<(String, Vec<u8>)> {
        let mut header = Bits::with_capacity(HEADER_BITS);
        header.extend_from_bitslice((self.n as u32).to_be_bytes().view_bits::<Msb0>());
        header.push(self.typical);
        let eps = (self.epsilon * EPSILON_SCALE).round() as u32;
        header.extend_from_bitslice(eps.to_be_bytes().view_bits::<Msb0>());
        let mut head = header.into_vec();
        match self.kind {
            BlockKind::Multicast => head.push(0),
            BlockKind::Helper { gamma, seed } => {
                head.push(1);
                head.extend_from_slice(&gamma.to_be_bytes());
                head.extend_from_slice(&seed.to_be_bytes());
            }
        }
        head.push(self.streams.len() as u8);
        let mut parts: Vec<(String, Vec<u8>)> = self
            .streams
            .iter()
            .map(|s| {
                let mut out = Vec::new();
                out.push(s.name.len() as u8);
                out.extend_from_slice(s.name.as_bytes());
                out.extend_from_slice(&(s.bits.len() as u64).to_be_bytes());
                let mut bits = s.bits.clone();
                bits.set_uninitialized(false);
                out.extend_from_slice(bits.as_raw_slice());
                (s.name.clone(), out)
            })
            .collect();
        match parts.first_mut() {
            Some((_, first)) => {
                head.append(first);
                *first = head;
            }
            None => parts.push((String::new(), head)),
        }
        parts
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<EncodedBlock> {
        let mut r = Reader { bytes, pos: 0 };
        let head = r.take(9)?.view_bits::<Msb0>();
        let n = head[..32].load_be::<u32>() as usize;
        let typical = head[32];
        let eps = head[33..65].load_be::<u32>();
        let kind = match r.take(1)?[0] {
            0 => BlockKind::Multicast,
            1 => BlockKind::Helper {
                gamma: f64::from_be_bytes(r.array()?),
                seed: u64::from_be_bytes(r.array()?),
            },
            t => return Err(Error::InvalidInput(format!("unknown block kind {t}"))),
        };
        let count = r.take(1)?[0] as usize;
        let mut streams = Vec::with_capacity(count);
        for _ in 0..count {
            let name_len = r.take(1)?[0] as usize;
            let name = std::str::from_utf8(r.take(name_len)?)
                .map_err(|_| Error::InvalidInput("stream name is not UTF-8".into()))?
                .to_owned();
            let bit_len = u64::from_be_bytes(r.array()?) as usize;
            let raw = r.take(bit_len.div_ceil(8))?;
            let mut bits = Bits::from_slice(raw);
            bits.truncate(bit_len);
            streams.push(Stream { name, bits });
        }
        if r.pos != bytes.len() {
            return Err(Error::InvalidInput(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        Ok(EncodedBlock {
            n,
            typical,
            epsilon: eps as f64 / EPSILON_SCALE,
            kind,
            streams,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let out = self
            .bytes
            .get(self.pos..self.pos + len)
            .ok_or_else(|| Error::InvalidInput("block truncated".into()))?;
        self.pos += len;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }
}

/// Component index of every position, checking joint support.
fn common_indices(seqs: &[&SymbolSequence], book: &Codebook) -> Result<Vec<usize>> {
    let n = seqs[0].len();
    if n == 0 {
        return Err(Error::arg("empty block"));
    }
    if n > u32::MAX as usize {
        return Err(Error::arg("block longer than 2^32 - 1 symbols"));
    }
    for s in seqs {
        if s.len() != n {
            return Err(Error::arg("sequences differ in length"));
        }
    }
    let mut tuple = vec![0; seqs.len()];
    let mut ks = Vec::with_capacity(n);
    for i in 0..n {
        for (slot, s) in tuple.iter_mut().zip(seqs) {
            *slot = s.symbols()[i];
        }
        if !book.partition.in_support(&tuple) {
            return Err(Error::InvalidInput(format!("position {i} is outside the joint support")));
        }
        ks.push(book.partition.class_index(0, tuple[0]).expect("supported symbol has a class"));
    }
    Ok(ks)
}

/// Orders `seqs` to match the codebook's variables.
fn align<'a>(seqs: &'a [SymbolSequence], book: &Codebook) -> Result<Vec<&'a SymbolSequence>> {
    let vars = book.variables();
    if seqs.len() != vars.len() {
        return Err(Error::arg(format!("{} sequences for {} variables", seqs.len(), vars.len())));
    }
    vars.iter()
        .map(|v| {
            let s = seqs
                .iter()
                .find(|s| s.variable() == v)
                .ok_or_else(|| Error::UnknownVariable(v.clone()))?;
            if s.alphabet() != book.decomposition(v)?.alphabet() {
                return Err(Error::arg(format!("sequence alphabet of `{v}` differs from the codebook")));
            }
            Ok(s)
        })
        .collect()
}

/// Encodes one block of every source: the common part followed by each
/// source's within-component indices.
pub fn encode_multicast_block(seqs: &[SymbolSequence], book: &Codebook, epsilon: f64) -> Result<EncodedBlock> {
    let q = quantize_epsilon(epsilon)?;
    let epsilon = q as f64 / EPSILON_SCALE;
    let seqs = align(seqs, book)?;
    let ks = common_indices(&seqs, book)?;
    let (typical, k_bits) = book.encode_common(&ks, epsilon)?;
    let mut streams = vec![Stream {
        name: COMMON_STREAM.to_owned(),
        bits: k_bits,
    }];
    for (j, seq) in seqs.iter().enumerate() {
        let d = &book.decomps[j];
        let mut bits = Bits::new();
        for (&x, &k) in seq.symbols().iter().zip(&ks) {
            let (_, w) = d.forward(x).expect("supported symbol");
            book.within[j][k].encode_into(w, &mut bits);
        }
        streams.push(Stream {
            name: residual_stream(seq.variable()),
            bits,
        });
    }
    Ok(EncodedBlock {
        n: ks.len(),
        typical,
        epsilon,
        kind: BlockKind::Multicast,
        streams,
    })
}

fn decode_residual(block: &EncodedBlock, book: &Codebook, j: usize, ks: &[usize]) -> Result<SymbolSequence> {
    let d = &book.decomps[j];
    let name = residual_stream(d.variable());
    let bits = block.require(&name)?;
    let mut pos = 0;
    let mut symbols = Vec::with_capacity(ks.len());
    for (i, &k) in ks.iter().enumerate() {
        let w = book.within[j][k]
            .decode_from(bits, &mut pos)
            .ok_or_else(|| Error::decode(&name, i, "stream exhausted or no codeword"))?;
        symbols.push(d.inverse(k, w).expect("codeword maps to a member"));
    }
    expect_consumed(&name, bits, pos, ks.len())?;
    SymbolSequence::new(d.variable(), d.alphabet().to_vec(), symbols)
}

fn multicast_common(block: &EncodedBlock, book: &Codebook) -> Result<Vec<usize>> {
    if block.kind != BlockKind::Multicast {
        return Err(Error::arg("not a multicast block"));
    }
    book.decode_common(block.require(COMMON_STREAM)?, block.n, block.typical)
}

/// Recovers every source, in codebook variable order.
pub fn decode_multicast_block(block: &EncodedBlock, book: &Codebook) -> Result<Vec<SymbolSequence>> {
    let ks = multicast_common(block, book)?;
    (0..book.decomps.len()).map(|j| decode_residual(block, book, j, &ks)).collect()
}

/// Recovers one source using only the common stream and its own residual.
pub fn decode_variable(block: &EncodedBlock, book: &Codebook, var: &str) -> Result<SymbolSequence> {
    let j = book.partition.var_position(var)?;
    let ks = multicast_common(block, book)?;
    decode_residual(block, book, j, &ks)
}

/// Positions at which the helper describes the common part: a Bresenham
/// stride of density `gamma` with a seed-derived phase.
pub fn helper_positions(n: usize, gamma: f64, seed: u64) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::arg(format!("gamma {gamma} outside [0, 1]")));
    }
    let phase: f64 = ChaCha8Rng::seed_from_u64(seed).random();
    Ok((0..n)
        .map(|i| ((i + 1) as f64 * gamma + phase).floor() > (i as f64 * gamma + phase).floor())
        .collect())
}

/// Encodes `x` for a receiver aided by a helper observing `y`. The helper
/// stream carries the common part at the selected positions; the source
/// stream codes `x` within its component there and by its marginal elsewhere.
pub fn encode_ak(
    x: &SymbolSequence,
    y: &SymbolSequence,
    book: &Codebook,
    gamma: f64,
    seed: u64,
    epsilon: f64,
) -> Result<EncodedBlock> {
    let q = quantize_epsilon(epsilon)?;
    let epsilon = q as f64 / EPSILON_SCALE;
    let jx = book.partition.var_position(x.variable())?;
    let jy = book.partition.var_position(y.variable())?;
    if book.variables().len() != 2 || jx == jy {
        return Err(Error::arg("helper coding needs a two-variable codebook and distinct sequences"));
    }
    let pair = [x.clone(), y.clone()];
    let seqs = align(&pair, book)?;
    let ks = common_indices(&seqs, book)?;
    let selected = helper_positions(ks.len(), gamma, seed)?;

    let helper_ks: Vec<usize> = ks.iter().zip(&selected).filter(|(_, &s)| s).map(|(&k, _)| k).collect();
    let (typical, k_bits) = book.encode_common(&helper_ks, epsilon)?;
    let d = &book.decomps[jx];
    let mut bits = Bits::new();
    for ((&sym, &k), &sel) in x.symbols().iter().zip(&ks).zip(&selected) {
        if sel {
            let (_, w) = d.forward(sym).expect("supported symbol");
            book.within[jx][k].encode_into(w, &mut bits);
        } else {
            book.marginal[jx].encode_into(sym, &mut bits);
        }
    }
    Ok(EncodedBlock {
        n: ks.len(),
        typical,
        epsilon,
        kind: BlockKind::Helper { gamma, seed },
        streams: vec![
            Stream {
                name: COMMON_STREAM.to_owned(),
                bits: k_bits,
            },
            Stream {
                name: residual_stream(x.variable()),
                bits,
            },
        ],
    })
}

/// Recovers the source of a helper block. The helper stream is required
/// whenever any position was selected.
pub fn decode_ak(block: &EncodedBlock, book: &Codebook) -> Result<SymbolSequence> {
    let BlockKind::Helper { gamma, seed } = block.kind else {
        return Err(Error::arg("not a helper block"));
    };
    let (j, name) = book
        .variables()
        .iter()
        .enumerate()
        .map(|(j, v)| (j, residual_stream(v)))
        .find(|(_, name)| block.stream(name).is_some())
        .ok_or_else(|| Error::decode("source", 0, "no source stream in block"))?;
    let selected = helper_positions(block.n, gamma, seed)?;
    let count = selected.iter().filter(|&&s| s).count();
    let helper_ks = if count == 0 {
        Vec::new()
    } else {
        book.decode_common(block.require(COMMON_STREAM)?, count, block.typical)?
    };

    let d = &book.decomps[j];
    let bits = block.require(&name)?;
    let mut pos = 0;
    let mut next_k = helper_ks.into_iter();
    let mut symbols = Vec::with_capacity(block.n);
    for (i, &sel) in selected.iter().enumerate() {
        let sym = if sel {
            let k = next_k.next().expect("one component per selected position");
            let w = book.within[j][k]
                .decode_from(bits, &mut pos)
                .ok_or_else(|| Error::decode(&name, i, "stream exhausted or no codeword"))?;
            d.inverse(k, w).expect("codeword maps to a member")
        } else {
            book.marginal[j]
                .decode_from(bits, &mut pos)
                .ok_or_else(|| Error::decode(&name, i, "stream exhausted or no codeword"))?
        };
        symbols.push(sym);
    }
    expect_consumed(&name, bits, pos, block.n)?;
    SymbolSequence::new(d.variable(), d.alphabet().to_vec(), symbols)
}
