//! Canonical Huffman codes over small alphabets.

use bitvec::prelude::*;

use crate::error::{Error, Result};

pub type Bits = BitVec<u8, Msb0>;

/// Longest codeword the decoder accepts.
const MAX_LEN: u8 = 64;

/// Canonical prefix-free code. Symbols with zero probability get no codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeTable {
    /// Codeword length per symbol; `None` for symbols outside the support.
    lengths: Vec<Option<u8>>,
    codes: Vec<u64>,
    /// Supported symbols sorted by (length, symbol).
    order: Vec<usize>,
    /// Number of codewords of each length `0..=MAX_LEN`.
    counts: Vec<usize>,
}

impl CodeTable {
    /// Builds a code from symbol probabilities. Ties at equal probability are
    /// broken so that the smaller symbol never gets the longer codeword.
    pub fn from_probabilities(probs: &[f64]) -> Result<Self> {
        let support: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
        if support.is_empty() {
            return Err(Error::Structural("code over an empty support".into()));
        }
        let mut lengths = vec![None; probs.len()];
        if support.len() == 1 {
            lengths[support[0]] = Some(0);
            return Self::from_lengths(lengths);
        }

        // Plain Huffman merge; each node holds (weight, smallest symbol, leaves).
        let mut nodes: Vec<(f64, usize, Vec<usize>)> =
            support.iter().map(|&s| (probs[s], s, vec![s])).collect();
        let mut depth = vec![0u32; probs.len()];
        while nodes.len() > 1 {
            nodes.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)));
            let a = nodes.pop().expect("two nodes");
            let b = nodes.pop().expect("two nodes");
            for &s in a.2.iter().chain(&b.2) {
                depth[s] += 1;
            }
            let mut leaves = a.2;
            leaves.extend(b.2);
            nodes.push((a.0 + b.0, a.1.min(b.1), leaves));
        }

        // Within each group of equal probabilities, hand the shortest lengths
        // to the smallest symbols. The multiset of lengths is unchanged.
        let mut by_prob = support.clone();
        by_prob.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]).then(a.cmp(&b)));
        let mut start = 0;
        while start < by_prob.len() {
            let mut end = start + 1;
            while end < by_prob.len() && probs[by_prob[end]] == probs[by_prob[start]] {
                end += 1;
            }
            let group = &by_prob[start..end];
            let mut ls: Vec<u32> = group.iter().map(|&s| depth[s]).collect();
            ls.sort_unstable();
            for (&s, l) in group.iter().zip(ls) {
                depth[s] = l;
            }
            start = end;
        }

        for &s in &support {
            if depth[s] > MAX_LEN as u32 {
                return Err(Error::Structural(format!(
                    "codeword length {} exceeds {MAX_LEN}",
                    depth[s]
                )));
            }
            lengths[s] = Some(depth[s] as u8);
        }
        Self::from_lengths(lengths)
    }

    /// Assigns canonical codewords to a set of lengths satisfying Kraft.
    pub fn from_lengths(lengths: Vec<Option<u8>>) -> Result<Self> {
        let mut order: Vec<usize> = (0..lengths.len()).filter(|&i| lengths[i].is_some()).collect();
        order.sort_by_key(|&i| (lengths[i], i));
        let mut counts = vec![0usize; MAX_LEN as usize + 1];
        for &s in &order {
            let l = lengths[s].expect("filtered");
            if l > MAX_LEN {
                return Err(Error::Structural(format!("codeword length {l} exceeds {MAX_LEN}")));
            }
            counts[l as usize] += 1;
        }
        if counts[0] > 0 && order.len() > 1 {
            return Err(Error::Structural("empty codeword alongside others".into()));
        }
        let mut codes = vec![0u64; lengths.len()];
        let mut code: u128 = 0;
        let mut prev = 0u8;
        for (k, &s) in order.iter().enumerate() {
            let l = lengths[s].expect("filtered");
            if k > 0 {
                code = (code + 1) << (l - prev);
            } else {
                code <<= l;
            }
            if l > 0 && code >> l != 0 {
                return Err(Error::Structural("code lengths violate the Kraft inequality".into()));
            }
            codes[s] = code as u64;
            prev = l;
        }
        Ok(CodeTable {
            lengths,
            codes,
            order,
            counts,
        })
    }

    pub fn lengths(&self) -> &[Option<u8>] {
        &self.lengths
    }

    pub fn length(&self, symbol: usize) -> Option<u8> {
        self.lengths.get(symbol).copied().flatten()
    }

    /// Codeword bits of `symbol`, most significant first.
    pub fn codeword(&self, symbol: usize) -> Option<Bits> {
        let l = self.length(symbol)? as usize;
        let mut bits = Bits::with_capacity(l);
        for i in (0..l).rev() {
            bits.push(self.codes[symbol] >> i & 1 == 1);
        }
        Some(bits)
    }

    pub fn kraft_sum(&self) -> f64 {
        self.order
            .iter()
            .map(|&s| (-(self.lengths[s].expect("filtered") as f64)).exp2())
            .sum()
    }

    pub fn expected_length(&self, probs: &[f64]) -> f64 {
        self.order
            .iter()
            .map(|&s| probs.get(s).copied().unwrap_or(0.0) * self.lengths[s].expect("filtered") as f64)
            .sum()
    }

    /// Appends the codeword of `symbol`; `false` if it has none.
    pub fn encode_into(&self, symbol: usize, out: &mut Bits) -> bool {
        let Some(l) = self.length(symbol) else {
            return false;
        };
        for i in (0..l).rev() {
            out.push(self.codes[symbol] >> i & 1 == 1);
        }
        true
    }

    /// Reads one codeword starting at `*pos`, advancing it. `None` when the
    /// input ends mid-codeword or the bits match no codeword.
    pub fn decode_from(&self, bits: &BitSlice<u8, Msb0>, pos: &mut usize) -> Option<usize> {
        if self.counts[0] == 1 {
            return Some(self.order[0]);
        }
        let mut code: u64 = 0;
        let mut first: u64 = 0;
        let mut index = 0usize;
        for len in 1..=MAX_LEN as usize {
            let bit = *bits.get(*pos + len - 1)?;
            code = code << 1 | bit as u64;
            let count = self.counts[len] as u64;
            if code.wrapping_sub(first) < count {
                *pos += len;
                return Some(self.order[index + (code - first) as usize]);
            }
            index += count as usize;
            first = (first + count) << 1;
        }
        None
    }
}
