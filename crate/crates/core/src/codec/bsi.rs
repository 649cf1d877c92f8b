//! Degraded message codec for broadcast with side information.
//!
//! Message 1 carries the index of each source symbol inside its class under
//! the first side variable. Message `i` carries, for each symbol, the rank of
//! its class under side variable `i - 1` among the classes composing its
//! class under side variable `i`. A receiver holding side variable `i` reads
//! its coarsest class off the side information and descends through messages
//! `i, i - 1, ..., 1` to the exact symbol.

use super::huffman::{Bits, CodeTable};
use crate::common_info::{check_nesting, decompose_source, ComponentPartition, RefinementMap, SourceDecomposition};
use crate::error::{Error, Result};
use crate::feasibility::{nested_partitions, MessagePlan, PlanMode};
use crate::probability::{JointPmf, SymbolSequence};

#[derive(Debug, Clone)]
pub struct BsiCodebook {
    source: String,
    side: Vec<String>,
    partitions: Vec<ComponentPartition>,
    first: SourceDecomposition,
    first_tables: Vec<CodeTable>,
    /// `refinements[i]` maps classes under side `i` into classes under side `i + 1`.
    refinements: Vec<RefinementMap>,
    /// `rank_tables[i][c]` codes the rank of a side-`i` class inside class `c` under side `i + 1`.
    rank_tables: Vec<Vec<CodeTable>>,
}

impl BsiCodebook {
    /// Builds the tables for a plan in common-information mode.
    pub fn new(pmf: &JointPmf, plan: &MessagePlan) -> Result<Self> {
        if plan.mode != PlanMode::CommonInformation {
            return Err(Error::arg("only common-information plans have a codec"));
        }
        let source = plan.source.clone();
        let partitions = nested_partitions(pmf, &source, &plan.side)?;
        let first = decompose_source(pmf, &partitions[0], &source)?;
        let first_tables = (0..first.component_count())
            .map(|c| CodeTable::from_probabilities(first.conditional(c)))
            .collect::<Result<Vec<_>>>()?;

        let mut refinements = Vec::new();
        let mut rank_tables = Vec::new();
        for pair in partitions.windows(2) {
            let map = check_nesting(&pair[0], &pair[1], &source)?
                .ok_or_else(|| Error::Structural("classes are not nested".into()))?;
            let fine_w = pair[0].weights();
            let coarse_w = pair[1].weights();
            let tables = map
                .children
                .iter()
                .enumerate()
                .map(|(c, kids)| {
                    let probs: Vec<f64> = kids.iter().map(|&f| fine_w[f] / coarse_w[c]).collect();
                    CodeTable::from_probabilities(&probs)
                })
                .collect::<Result<Vec<_>>>()?;
            refinements.push(map);
            rank_tables.push(tables);
        }
        Ok(BsiCodebook {
            source,
            side: plan.side.clone(),
            partitions,
            first,
            first_tables,
            refinements,
            rank_tables,
        })
    }

    pub fn levels(&self) -> usize {
        self.partitions.len()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn side(&self) -> &[String] {
        &self.side
    }

    pub fn partitions(&self) -> &[ComponentPartition] {
        &self.partitions
    }
}

/// Produces messages `M_1..M_m` for a block of the source.
pub fn encode_bsi_messages(x: &SymbolSequence, book: &BsiCodebook) -> Result<Vec<Bits>> {
    if x.variable() != book.source {
        return Err(Error::arg(format!("expected a sequence of `{}`", book.source)));
    }
    if x.alphabet() != book.first.alphabet() {
        return Err(Error::arg("sequence alphabet differs from the codebook"));
    }
    let mut messages = vec![Bits::new(); book.levels()];
    for (i, &sym) in x.symbols().iter().enumerate() {
        let (k, w) = book
            .first
            .forward(sym)
            .ok_or_else(|| Error::InvalidInput(format!("position {i} is outside the support")))?;
        book.first_tables[k].encode_into(w, &mut messages[0]);
        let mut fine = k;
        for (level, map) in book.refinements.iter().enumerate() {
            let (coarse, rank) = map.locate(fine);
            book.rank_tables[level][coarse].encode_into(rank, &mut messages[level + 1]);
            fine = coarse;
        }
    }
    Ok(messages)
}

fn message_name(level: usize) -> String {
    format!("M{}", level + 1)
}

/// Recovers the source from messages `M_1..M_i` and side variable `i`.
pub fn decode_bsi(messages: &[Bits], side: &SymbolSequence, book: &BsiCodebook) -> Result<SymbolSequence> {
    let level = messages.len();
    if level == 0 || level > book.levels() {
        return Err(Error::arg(format!("{level} messages for {} levels", book.levels())));
    }
    let top = level - 1;
    if side.variable() != book.side[top] {
        return Err(Error::Binding(format!(
            "level {level} needs side information `{}`, got `{}`",
            book.side[top],
            side.variable()
        )));
    }
    let partition = &book.partitions[top];
    let mut cursors = vec![0usize; level];
    let mut symbols = Vec::with_capacity(side.len());
    for (i, &y) in side.symbols().iter().enumerate() {
        let mut class = partition
            .class_index(1, y)
            .ok_or_else(|| Error::decode(side.variable(), i, "side symbol outside the support"))?;
        for l in (1..level).rev() {
            let rank = book.rank_tables[l - 1][class]
                .decode_from(&messages[l], &mut cursors[l])
                .ok_or_else(|| Error::decode(&message_name(l), i, "stream exhausted or no codeword"))?;
            class = book.refinements[l - 1].children[class][rank];
        }
        let w = book.first_tables[class]
            .decode_from(&messages[0], &mut cursors[0])
            .ok_or_else(|| Error::decode(&message_name(0), i, "stream exhausted or no codeword"))?;
        let x = book.first.inverse(class, w).expect("codeword maps to a member");
        if !partition.in_support(&[x, y]) {
            return Err(Error::decode(
                side.variable(),
                i,
                "decoded symbol is inconsistent with the side information",
            ));
        }
        symbols.push(x);
    }
    for (l, (&pos, bits)) in cursors.iter().zip(messages).enumerate() {
        if pos != bits.len() {
            return Err(Error::decode(
                &message_name(l),
                side.len(),
                format!("{} trailing bits", bits.len() - pos),
            ));
        }
    }
    SymbolSequence::new(&book.source, book.first.alphabet().to_vec(), symbols)
}
