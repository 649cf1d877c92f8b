//! Capacitated acyclic networks and their cut structure.

use std::collections::{BTreeSet, VecDeque};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{FeasibilityReport, ReportBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub capacity: u64,
}

/// Directed acyclic network with integer edge capacities (bits per unit time),
/// named source bindings and a terminal list.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    sources: IndexMap<String, usize>,
    terminals: Vec<usize>,
    topo: Vec<usize>,
}

/// Value of a min-cut from a node set to one terminal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutValue {
    pub sources: Vec<String>,
    pub terminal: String,
    pub value: u64,
}

/// A virtual source attached to existing nodes by unbounded edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatentSource {
    pub name: String,
    pub attach: Vec<String>,
}

impl LatentSource {
    pub fn new<S: Into<String>>(name: impl Into<String>, attach: impl IntoIterator<Item = S>) -> Self {
        LatentSource {
            name: name.into(),
            attach: attach.into_iter().map(Into::into).collect(),
        }
    }
}

impl Network {
    /// Validates and builds a network.
    ///
    /// `sources` maps a variable name to the node where it is generated.
    pub fn new(
        nodes: Vec<String>,
        edges: Vec<(String, String, u64)>,
        sources: IndexMap<String, String>,
        terminals: Vec<String>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for n in &nodes {
            if n.is_empty() {
                return Err(Error::InvalidNetwork("empty node name".into()));
            }
            if !seen.insert(n.as_str()) {
                return Err(Error::InvalidNetwork(format!("duplicate node `{n}`")));
            }
        }
        let lookup = |name: &str| -> Result<usize> {
            nodes
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::UnknownNode(name.to_owned()))
        };
        let edges = edges
            .iter()
            .map(|(from, to, capacity)| {
                Ok(Edge {
                    from: lookup(from)?,
                    to: lookup(to)?,
                    capacity: *capacity,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let sources = sources
            .iter()
            .map(|(var, node)| Ok((var.clone(), lookup(node)?)))
            .collect::<Result<IndexMap<_, _>>>()?;
        let terminals = terminals
            .iter()
            .map(|t| lookup(t))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(nodes, edges, sources, terminals)
    }

    fn from_parts(
        nodes: Vec<String>,
        edges: Vec<Edge>,
        sources: IndexMap<String, usize>,
        terminals: Vec<usize>,
    ) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::InvalidNetwork("no sources".into()));
        }
        if terminals.is_empty() {
            return Err(Error::InvalidNetwork("no terminals".into()));
        }
        let distinct: BTreeSet<_> = terminals.iter().collect();
        if distinct.len() != terminals.len() {
            return Err(Error::InvalidNetwork("duplicate terminal".into()));
        }
        for &t in &terminals {
            if sources.values().any(|&s| s == t) {
                return Err(Error::InvalidNetwork(format!(
                    "node `{}` is both a source and a terminal",
                    nodes[t]
                )));
            }
        }
        let topo = topological_order(nodes.len(), &edges)
            .ok_or_else(|| Error::InvalidNetwork("graph has a cycle".into()))?;

        let mut reached = vec![false; nodes.len()];
        let mut queue: VecDeque<usize> = sources.values().copied().collect();
        for &s in &queue {
            reached[s] = true;
        }
        while let Some(u) = queue.pop_front() {
            for e in edges.iter().filter(|e| e.from == u) {
                if !reached[e.to] {
                    reached[e.to] = true;
                    queue.push_back(e.to);
                }
            }
        }
        if let Some(&t) = terminals.iter().find(|&&t| !reached[t]) {
            return Err(Error::InvalidNetwork(format!(
                "terminal `{}` is unreachable from every source",
                nodes[t]
            )));
        }
        Ok(Network {
            nodes,
            edges,
            sources,
            terminals,
            topo,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NetworkDoc = serde_json::from_str(text)?;
        Network::new(
            doc.nodes,
            doc.edges.into_iter().map(|e| (e.from, e.to, e.cap)).collect(),
            doc.sources,
            doc.terminals,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = NetworkDoc {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    from: self.nodes[e.from].clone(),
                    to: self.nodes[e.to].clone(),
                    cap: e.capacity,
                })
                .collect(),
            sources: self
                .sources
                .iter()
                .map(|(v, &n)| (v.clone(), self.nodes[n].clone()))
                .collect(),
            terminals: self.terminals.iter().map(|&t| self.nodes[t].clone()).collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Variable name to source node index.
    pub fn sources(&self) -> &IndexMap<String, usize> {
        &self.sources
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn terminal_names(&self) -> Vec<String> {
        self.terminals.iter().map(|&t| self.nodes[t].clone()).collect()
    }

    /// Nodes in a topological order.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn node_index(&self, name: &str) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownNode(name.to_owned()))
    }

    pub fn node_name(&self, idx: usize) -> &str {
        &self.nodes[idx]
    }

    /// Node where `var` is generated.
    pub fn source_node(&self, var: &str) -> Result<usize> {
        self.sources
            .get(var)
            .copied()
            .ok_or_else(|| Error::Binding(format!("variable `{var}` has no source node")))
    }

    pub fn total_capacity(&self) -> u64 {
        self.edges.iter().map(|e| e.capacity).fold(0, u64::saturating_add)
    }

    /// Min-cut value from a set of nodes to `to`, by blocking-flow max-flow.
    pub fn min_cut<S: AsRef<str>>(&self, from: &[S], to: &str) -> Result<CutValue> {
        let from_idx = from
            .iter()
            .map(|s| self.node_index(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let to_idx = self.node_index(to)?;
        Ok(CutValue {
            sources: from.iter().map(|s| s.as_ref().to_owned()).collect(),
            terminal: to.to_owned(),
            value: self.min_cut_value(&from_idx, to_idx)?,
        })
    }

    pub(crate) fn min_cut_value(&self, from: &[usize], to: usize) -> Result<u64> {
        if from.is_empty() {
            return Err(Error::arg("empty source set"));
        }
        if from.contains(&to) {
            return Err(Error::arg(format!(
                "terminal `{}` is inside the source set",
                self.nodes[to]
            )));
        }
        let n = self.nodes.len();
        let mut flow = Dinic::new(n + 1);
        for e in &self.edges {
            flow.add_edge(e.from, e.to, e.capacity);
        }
        let unbounded = self.total_capacity().saturating_add(1);
        for &s in from {
            flow.add_edge(n, s, unbounded);
        }
        Ok(flow.max_flow(n, to))
    }

    /// `min over terminals of min_cut(set, t)` for node indices.
    pub(crate) fn rho(&self, set: &[usize]) -> Result<u64> {
        let mut best = u64::MAX;
        for &t in &self.terminals {
            best = best.min(self.min_cut_value(set, t)?);
        }
        Ok(best)
    }

    /// The capacity function evaluated at each requested node set.
    pub fn capacity_function<S: AsRef<str>>(&self, sets: &[Vec<S>]) -> Result<Vec<CapacityValue>> {
        sets.iter()
            .map(|set| {
                if set.is_empty() {
                    return Err(Error::arg("empty node set in capacity request"));
                }
                let idx = set
                    .iter()
                    .map(|s| self.node_index(s.as_ref()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(CapacityValue {
                    set: set.iter().map(|s| s.as_ref().to_owned()).collect(),
                    value: self.rho(&idx)?,
                })
            })
            .collect()
    }

    /// Capacity function of the nodes bound to a set of variables.
    pub fn rho_of_vars<S: AsRef<str>>(&self, vars: &[S]) -> Result<u64> {
        let mut nodes: Vec<usize> = vars
            .iter()
            .map(|v| self.source_node(v.as_ref()))
            .collect::<Result<_>>()?;
        nodes.sort_unstable();
        nodes.dedup();
        self.rho(&nodes)
    }

    /// Same topology with every capacity multiplied by `n`.
    pub fn delayed(&self, n: u64) -> Result<Network> {
        if n == 0 {
            return Err(Error::arg("delay factor must be at least 1"));
        }
        let mut out = self.clone();
        for e in &mut out.edges {
            e.capacity = e.capacity.checked_mul(n).ok_or_else(|| Error::arg("capacity overflow"))?;
        }
        Ok(out)
    }

    /// Adds one node per latent source, joined to its attachment nodes by
    /// edges of capacity `1 + total finite capacity`, and binds each latent
    /// name as a source variable.
    pub fn expand_with_latent_sources(&self, latent: &[LatentSource]) -> Result<Network> {
        let unbounded = self.total_capacity().saturating_add(1);
        let mut nodes = self.nodes.clone();
        let mut edges = self.edges.clone();
        let mut sources = self.sources.clone();
        for l in latent {
            if nodes.contains(&l.name) || sources.contains_key(&l.name) {
                return Err(Error::arg(format!("latent name `{}` is already in use", l.name)));
            }
            if l.attach.is_empty() {
                return Err(Error::arg(format!("latent source `{}` attaches nowhere", l.name)));
            }
            let idx = nodes.len();
            nodes.push(l.name.clone());
            for target in &l.attach {
                let to = self.node_index(target)?;
                edges.push(Edge {
                    from: idx,
                    to,
                    capacity: unbounded,
                });
            }
            sources.insert(l.name.clone(), idx);
        }
        Network::from_parts(nodes, edges, sources, self.terminals.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapacityValue {
    pub set: Vec<String>,
    pub value: u64,
}

/// Checks every nonempty subset of the rated source nodes:
/// `sum of rates <= rho_G(subset)`.
pub fn independent_multicast_feasible(
    net: &Network,
    rates: &IndexMap<String, f64>,
) -> Result<FeasibilityReport> {
    let mut nodes = Vec::with_capacity(rates.len());
    for name in rates.keys() {
        let idx = net.node_index(name)?;
        if !net.sources.values().any(|&s| s == idx) {
            return Err(Error::Binding(format!("node `{name}` is not a source node")));
        }
        nodes.push(idx);
    }
    let rates: Vec<f64> = rates.values().copied().collect();
    let mut report = ReportBuilder::new("independent-multicast");
    for mask in 1u64..(1 << nodes.len()) {
        let members: Vec<usize> = (0..nodes.len()).filter(|i| mask >> i & 1 == 1).collect();
        let mut set: Vec<usize> = members.iter().map(|&i| nodes[i]).collect();
        set.sort_unstable();
        set.dedup();
        let lhs: f64 = members.iter().map(|&i| rates[i]).sum();
        let names: Vec<&str> = members.iter().map(|&i| net.nodes[nodes[i]].as_str()).collect();
        report.check(
            format!("R({0}) <= rho_G({0})", names.join(",")),
            lhs,
            net.rho(&set)? as f64,
        );
    }
    Ok(report.finish())
}

fn topological_order(n: usize, edges: &[Edge]) -> Option<Vec<usize>> {
    let mut indegree = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in edges {
        indegree[e.to] += 1;
        out[e.from].push(e.to);
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&u| indegree[u] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in &out[u] {
            indegree[v] -= 1;
            if indegree[v] == 0 {
                queue.push_back(v);
            }
        }
    }
    (order.len() == n).then_some(order)
}

#[derive(Debug, Clone)]
struct FlowEdge {
    to: usize,
    cap: u64,
    rev: usize,
}

/// Dinic's blocking-flow max-flow on a residual graph.
struct Dinic {
    graph: Vec<Vec<FlowEdge>>,
    level: Vec<usize>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            graph: vec![Vec::new(); n],
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: u64) {
        let rev_from = self.graph[to].len();
        let rev_to = self.graph[from].len();
        self.graph[from].push(FlowEdge {
            to,
            cap,
            rev: rev_from,
        });
        self.graph[to].push(FlowEdge {
            to: from,
            cap: 0,
            rev: rev_to,
        });
    }

    fn bfs(&mut self, s: usize) {
        self.level.fill(usize::MAX);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for e in &self.graph[u] {
                if e.cap > 0 && self.level[e.to] == usize::MAX {
                    self.level[e.to] = self.level[u] + 1;
                    queue.push_back(e.to);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, limit: u64) -> u64 {
        if u == t {
            return limit;
        }
        while self.iter[u] < self.graph[u].len() {
            let i = self.iter[u];
            let FlowEdge { to, cap, rev } = self.graph[u][i];
            if cap > 0 && self.level[u] < self.level[to] {
                let pushed = self.dfs(to, t, limit.min(cap));
                if pushed > 0 {
                    self.graph[u][i].cap -= pushed;
                    self.graph[to][rev].cap += pushed;
                    return pushed;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0u64;
        loop {
            self.bfs(s);
            if self.level[t] == usize::MAX {
                return total;
            }
            self.iter.fill(0);
            loop {
                let f = self.dfs(s, t, u64::MAX);
                if f == 0 {
                    break;
                }
                total = total.saturating_add(f);
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    nodes: Vec<String>,
    edges: Vec<EdgeDoc>,
    sources: IndexMap<String, String>,
    terminals: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    from: String,
    to: String,
    cap: u64,
}
