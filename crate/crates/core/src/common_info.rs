//! Gács-Körner common information via connected components of the support graph.
//!
//! The support graph has one node per supported symbol of each variable and
//! one hyperedge per support tuple. Its connected components index the common
//! part `K`; every variable determines `K` on its own, and each symbol is
//! re-expressed as `(component, position inside the component)`.

use std::collections::VecDeque;

use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::probability::{shannon_entropy, JointPmf};
use crate::TOLERANCE;

/// m-partite support representation of a pmf marginal.
#[derive(Debug, Clone)]
pub struct SupportGraph {
    variables: Vec<String>,
    parts: Vec<Vec<usize>>,
    hyperedges: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    node_count: usize,
}

impl SupportGraph {
    pub fn from_pmf<S: AsRef<str>>(pmf: &JointPmf, vars: &[S]) -> Result<Self> {
        let marginal = pmf.marginal(vars)?;
        let arity = marginal.variables().len();
        let mut offsets = Vec::with_capacity(arity);
        let mut node_count = 0;
        for alphabet in marginal.alphabets() {
            offsets.push(node_count);
            node_count += alphabet.len();
        }
        let mut present: Vec<Vec<bool>> = marginal
            .alphabets()
            .iter()
            .map(|a| vec![false; a.len()])
            .collect();
        let mut hyperedges = Vec::with_capacity(marginal.support_len());
        for (tuple, _) in marginal.support() {
            for (v, &s) in tuple.iter().enumerate() {
                present[v][s] = true;
            }
            hyperedges.push(tuple.to_vec());
        }
        let parts = present
            .iter()
            .map(|flags| (0..flags.len()).filter(|&s| flags[s]).collect())
            .collect();
        Ok(SupportGraph {
            variables: marginal.variables().to_vec(),
            parts,
            hyperedges,
            offsets,
            node_count,
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    /// Supported symbols of each variable.
    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    fn node(&self, var: usize, symbol: usize) -> usize {
        self.offsets[var] + symbol
    }
}

/// Disjoint-set forest with path halving and union by size.
struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// One connected component of the support graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// Member symbols per variable, ascending.
    pub members: Vec<Vec<usize>>,
    /// Total mass of the support tuples inside the component.
    pub weight: f64,
}

/// Maximal decomposition of the support graph into connected components.
///
/// Components are ordered by the smallest member symbol of the first variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentPartition {
    variables: Vec<String>,
    alphabets: Vec<Vec<String>>,
    components: Vec<Component>,
    class_of: Vec<Vec<Option<usize>>>,
    support: Vec<Vec<usize>>,
}

impl ComponentPartition {
    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn alphabets(&self) -> &[Vec<String>] {
        &self.alphabets
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Distribution of `K`.
    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.weight).collect()
    }

    /// `H(K)` in bits.
    pub fn entropy(&self) -> f64 {
        if self.components.len() == 1 {
            return 0.0;
        }
        shannon_entropy(self.components.iter().map(|c| c.weight))
    }

    pub fn var_position(&self, var: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::UnknownVariable(var.to_owned()))
    }

    /// Component of a symbol index of the variable at `var_pos`, if supported.
    pub fn class_index(&self, var_pos: usize, symbol: usize) -> Option<usize> {
        self.class_of.get(var_pos)?.get(symbol).copied().flatten()
    }

    /// Per-symbol component map of one variable.
    pub fn classes(&self, var_pos: usize) -> &[Option<usize>] {
        &self.class_of[var_pos]
    }

    /// Whether a tuple (in partition variable order) is in the support.
    pub fn in_support(&self, tuple: &[usize]) -> bool {
        self.support
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .is_ok()
    }

    pub fn support(&self) -> &[Vec<usize>] {
        &self.support
    }

    /// Re-derives the components by breadth-first search over the support
    /// tuples and checks that the result matches this partition.
    pub fn verify_maximal(&self) -> Result<()> {
        let arity = self.variables.len();
        let mut by_node: Vec<Vec<Vec<usize>>> = self
            .alphabets
            .iter()
            .map(|a| vec![Vec::new(); a.len()])
            .collect();
        for (e, tuple) in self.support.iter().enumerate() {
            for (v, &s) in tuple.iter().enumerate() {
                by_node[v][s].push(e);
            }
        }
        let mut edge_label = vec![usize::MAX; self.support.len()];
        let mut next_label = 0;
        for start in 0..self.support.len() {
            if edge_label[start] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([start]);
            edge_label[start] = next_label;
            while let Some(e) = queue.pop_front() {
                for v in 0..arity {
                    for &f in &by_node[v][self.support[e][v]] {
                        if edge_label[f] == usize::MAX {
                            edge_label[f] = next_label;
                            queue.push_back(f);
                        }
                    }
                }
            }
            next_label += 1;
        }
        if next_label != self.components.len() {
            return Err(Error::Structural(format!(
                "search found {next_label} components, partition has {}",
                self.components.len()
            )));
        }
        // Same labelling up to renaming: every tuple's coordinates agree on
        // a class and each search label maps to exactly one class.
        let mut label_to_class = vec![usize::MAX; next_label];
        for (e, tuple) in self.support.iter().enumerate() {
            let class = self.class_of[0][tuple[0]].ok_or_else(|| {
                Error::Structural("support symbol without a component".into())
            })?;
            if tuple
                .iter()
                .enumerate()
                .any(|(v, &s)| self.class_of[v][s] != Some(class))
            {
                return Err(Error::Structural("support tuple spans two components".into()));
            }
            let slot = &mut label_to_class[edge_label[e]];
            if *slot == usize::MAX {
                *slot = class;
            } else if *slot != class {
                return Err(Error::Structural("component is not connected".into()));
            }
        }
        Ok(())
    }

    /// JSON-friendly export with symbol labels.
    pub fn export(&self) -> PartitionExport {
        PartitionExport {
            variables: self.variables.clone(),
            entropy: self.entropy(),
            components: self
                .components
                .iter()
                .enumerate()
                .map(|(index, c)| ComponentExport {
                    index,
                    weight: c.weight,
                    members: self
                        .variables
                        .iter()
                        .zip(&c.members)
                        .zip(&self.alphabets)
                        .map(|((v, m), a)| (v.clone(), m.iter().map(|&s| a[s].clone()).collect()))
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionExport {
    pub variables: Vec<String>,
    pub entropy: f64,
    pub components: Vec<ComponentExport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentExport {
    pub index: usize,
    pub weight: f64,
    pub members: IndexMap<String, Vec<String>>,
}

/// Connected-component decomposition of the marginal of `pmf` on `vars`.
pub fn decompose<S: AsRef<str>>(pmf: &JointPmf, vars: &[S]) -> Result<ComponentPartition> {
    if vars.len() < 2 {
        return Err(Error::arg("common information needs at least two variables"));
    }
    let graph = SupportGraph::from_pmf(pmf, vars)?;
    let marginal = pmf.marginal(vars)?;
    let arity = graph.variables.len();

    let mut dsu = DisjointSet::new(graph.node_count);
    for tuple in &graph.hyperedges {
        let first = graph.node(0, tuple[0]);
        for (v, &s) in tuple.iter().enumerate().skip(1) {
            dsu.union(first, graph.node(v, s));
        }
    }

    // Number components by first appearance along the first variable's
    // supported symbols, which are ascending.
    let mut root_to_class = vec![usize::MAX; graph.node_count];
    let mut count = 0;
    for &s in &graph.parts[0] {
        let root = dsu.find(graph.node(0, s));
        if root_to_class[root] == usize::MAX {
            root_to_class[root] = count;
            count += 1;
        }
    }

    let mut class_of: Vec<Vec<Option<usize>>> = marginal
        .alphabets()
        .iter()
        .map(|a| vec![None; a.len()])
        .collect();
    let mut components = vec![
        Component {
            members: vec![Vec::new(); arity],
            weight: 0.0,
        };
        count
    ];
    for (v, part) in graph.parts.iter().enumerate() {
        for &s in part {
            let class = root_to_class[dsu.find(graph.node(v, s))];
            if class == usize::MAX {
                return Err(Error::Structural(
                    "supported symbol not connected to the first variable".into(),
                ));
            }
            class_of[v][s] = Some(class);
            components[class].members[v].push(s);
        }
    }
    for (tuple, p) in marginal.support() {
        let class = class_of[0][tuple[0]].expect("first coordinate is supported");
        components[class].weight += p;
    }

    let partition = ComponentPartition {
        variables: marginal.variables().to_vec(),
        alphabets: marginal.alphabets().to_vec(),
        components,
        class_of,
        support: graph.hyperedges,
    };
    partition.verify_maximal()?;
    Ok(partition)
}

/// `H(K)` of a partition.
pub fn gk_entropy(partition: &ComponentPartition) -> f64 {
    partition.entropy()
}

/// Component index of a symbol label.
pub fn class_of(partition: &ComponentPartition, var: &str, symbol: &str) -> Result<usize> {
    let pos = partition.var_position(var)?;
    let idx = partition.alphabets[pos]
        .iter()
        .position(|s| s == symbol)
        .ok_or_else(|| Error::arg(format!("symbol `{symbol}` not in alphabet of `{var}`")))?;
    partition
        .class_index(pos, idx)
        .ok_or_else(|| Error::NotInSupport {
            variable: var.to_owned(),
            symbol: symbol.to_owned(),
        })
}

/// Bijection `X -> (K, X')` for one variable of a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceDecomposition {
    variable: String,
    alphabet: Vec<String>,
    forward: Vec<Option<(usize, usize)>>,
    inverse: Vec<Vec<usize>>,
    conditionals: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SourceDecomposition {
    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    /// `(component, within-component index)` of a symbol index.
    pub fn forward(&self, symbol: usize) -> Option<(usize, usize)> {
        self.forward.get(symbol).copied().flatten()
    }

    /// Symbol index for `(component, within-component index)`.
    pub fn inverse(&self, component: usize, within: usize) -> Option<usize> {
        self.inverse.get(component)?.get(within).copied()
    }

    /// Symbols of a component in within-component order.
    pub fn members(&self, component: usize) -> &[usize] {
        &self.inverse[component]
    }

    /// `p(X | K = component)` in within-component order.
    pub fn conditional(&self, component: usize) -> &[f64] {
        &self.conditionals[component]
    }

    pub fn component_count(&self) -> usize {
        self.inverse.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `H(X' | K)` from the within-component conditionals.
    pub fn residual_entropy(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.conditionals)
            .map(|(w, c)| w * shannon_entropy(c.iter().copied()))
            .sum()
    }
}

/// Splits `var` into its component index and its rank inside the component.
pub fn decompose_source(
    pmf: &JointPmf,
    partition: &ComponentPartition,
    var: &str,
) -> Result<SourceDecomposition> {
    let pos = partition.var_position(var)?;
    let dist = pmf.marginal_dist(var)?;
    let alphabet = pmf.alphabet(var)?.to_vec();
    if alphabet != partition.alphabets[pos] {
        return Err(Error::arg(format!("alphabet of `{var}` differs from the partition's")));
    }
    for (s, &p) in dist.iter().enumerate() {
        if (p > 0.0) != partition.class_of[pos][s].is_some() {
            return Err(Error::arg(format!(
                "support of `{var}` does not match the partition"
            )));
        }
    }

    let k = partition.components.len();
    let mut forward = vec![None; alphabet.len()];
    let mut inverse = Vec::with_capacity(k);
    let mut conditionals = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    for (class, component) in partition.components.iter().enumerate() {
        let members = component.members[pos].clone();
        if members.is_empty() {
            return Err(Error::Structural(format!("component {class} has no `{var}` symbols")));
        }
        let weight: f64 = members.iter().map(|&s| dist[s]).sum();
        for (within, &s) in members.iter().enumerate() {
            forward[s] = Some((class, within));
        }
        conditionals.push(members.iter().map(|&s| dist[s] / weight).collect());
        inverse.push(members);
        weights.push(weight);
    }
    Ok(SourceDecomposition {
        variable: var.to_owned(),
        alphabet,
        forward,
        inverse,
        conditionals,
        weights,
    })
}

/// How the classes of a fine partition sit inside a coarse one, for one variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementMap {
    /// Coarse class of each fine class.
    pub fine_to_coarse: Vec<usize>,
    /// Fine classes inside each coarse class, ordered by smallest member symbol.
    pub children: Vec<Vec<usize>>,
    /// Position of each fine class within its coarse class.
    pub rank: Vec<usize>,
}

impl RefinementMap {
    /// `(coarse class, rank)` of a fine class.
    pub fn locate(&self, fine_class: usize) -> (usize, usize) {
        (self.fine_to_coarse[fine_class], self.rank[fine_class])
    }
}

/// Checks whether every class of `fine` (restricted to `var`) lies inside a
/// single class of `coarse`. Returns the refinement map when it does.
pub fn check_nesting(
    fine: &ComponentPartition,
    coarse: &ComponentPartition,
    var: &str,
) -> Result<Option<RefinementMap>> {
    let fp = fine.var_position(var)?;
    let cp = coarse.var_position(var)?;
    let fine_classes = &fine.class_of[fp];
    let coarse_classes = &coarse.class_of[cp];
    if fine_classes.len() != coarse_classes.len()
        || fine_classes
            .iter()
            .zip(coarse_classes)
            .any(|(a, b)| a.is_some() != b.is_some())
    {
        return Err(Error::arg(format!(
            "partitions cover different supports of `{var}`"
        )));
    }

    let mut fine_to_coarse = vec![usize::MAX; fine.components.len()];
    for (s, fc) in fine_classes.iter().enumerate() {
        let (Some(f), Some(c)) = (fc, coarse_classes[s]) else {
            continue;
        };
        match fine_to_coarse[*f] {
            usize::MAX => fine_to_coarse[*f] = c,
            existing if existing != c => return Ok(None),
            _ => {}
        }
    }

    let min_member = |f: usize| fine.components[f].members[fp][0];
    let mut children = vec![Vec::new(); coarse.components.len()];
    for (f, &c) in fine_to_coarse.iter().enumerate() {
        children[c].push(f);
    }
    let mut rank = vec![0; fine.components.len()];
    for list in &mut children {
        list.sort_by_key(|&f| min_member(f));
        for (r, &f) in list.iter().enumerate() {
            rank[f] = r;
        }
    }
    Ok(Some(RefinementMap {
        fine_to_coarse,
        children,
        rank,
    }))
}

/// `(coarse class, rank of the fine class within it)` for a symbol label.
pub fn refinement_index(
    fine: &ComponentPartition,
    coarse: &ComponentPartition,
    var: &str,
    symbol: &str,
) -> Result<(usize, usize)> {
    let map = check_nesting(fine, coarse, var)?
        .ok_or_else(|| Error::Structural(format!("classes of `{var}` are not nested")))?;
    let f = class_of(fine, var, symbol)?;
    Ok(map.locate(f))
}

/// `|H(K) - I(X;Y)| <= 1e-9` helper shared by callers that test equality.
pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE
}
