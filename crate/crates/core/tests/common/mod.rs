//! Independent reference computations and instance generators shared by the
//! integration tests. Nothing here calls into the library's algorithms.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, HashMap};

use commonnet::{JointPmf, Network};
use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn fixture_path(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn pmf_fixture(name: &str) -> JointPmf {
    JointPmf::from_json(&fixture(name)).unwrap()
}

pub fn net_fixture(name: &str) -> Network {
    Network::from_json(&fixture(name)).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A joint table as a plain map from symbol tuples to probabilities.
pub type Table = BTreeMap<Vec<usize>, f64>;

pub fn table_of(pmf: &JointPmf) -> Table {
    pmf.support().map(|(t, p)| (t.to_vec(), p)).collect()
}

/// `-sum p log2 p` over the marginal on `positions`.
pub fn entropy(table: &Table, positions: &[usize]) -> f64 {
    let mut marginal: HashMap<Vec<usize>, f64> = HashMap::new();
    for (t, &p) in table {
        *marginal.entry(positions.iter().map(|&i| t[i]).collect()).or_default() += p;
    }
    marginal.values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Components of the support graph on symbols of the given positions, found
/// by depth-first search. Returns, per position, the component label of every
/// supported symbol, and the component weights. Labels are assigned in order
/// of discovery, starting from the smallest supported symbol of the first
/// position.
pub struct Components {
    pub label: Vec<BTreeMap<usize, usize>>,
    pub weights: Vec<f64>,
}

pub fn components(table: &Table, positions: &[usize]) -> Components {
    // nodes are (position index, symbol)
    let mut adj: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    let mut mass: HashMap<Vec<usize>, f64> = HashMap::new();
    for (t, &p) in table {
        let tuple: Vec<usize> = positions.iter().map(|&i| t[i]).collect();
        *mass.entry(tuple.clone()).or_default() += p;
        for a in 0..tuple.len() {
            for b in 0..tuple.len() {
                if a != b {
                    adj.entry((a, tuple[a])).or_default().push((b, tuple[b]));
                }
            }
            adj.entry((a, tuple[a])).or_default();
        }
    }
    let mut label: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); positions.len()];
    let mut count = 0;
    let starts: Vec<(usize, usize)> = adj.keys().copied().collect();
    for start in starts {
        if label[start.0].contains_key(&start.1) {
            continue;
        }
        let mut stack = vec![start];
        label[start.0].insert(start.1, count);
        while let Some(node) = stack.pop() {
            for &next in &adj[&node] {
                if !label[next.0].contains_key(&next.1) {
                    label[next.0].insert(next.1, count);
                    stack.push(next);
                }
            }
        }
        count += 1;
    }
    let mut weights = vec![0.0; count];
    for (tuple, p) in mass {
        weights[label[0][&tuple[0]]] += p;
    }
    Components { label, weights }
}

pub fn shannon(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Largest `H(f(X))` over pairs of maps `f`, `g` into `0..range` with
/// `f(x) = g(y)` on the support of a two-variable table.
pub fn variational_common_entropy(table: &Table, nx: usize, ny: usize) -> f64 {
    let range = nx.min(ny);
    let mut best: f64 = 0.0;
    let mut f = vec![0usize; nx];
    loop {
        let mut g = vec![0usize; ny];
        loop {
            if table.keys().all(|t| f[t[0]] == g[t[1]]) {
                let mut w = vec![0.0; range];
                for (t, &p) in table {
                    w[f[t[0]]] += p;
                }
                best = best.max(shannon(&w));
            }
            if !increment(&mut g, range) {
                break;
            }
        }
        if !increment(&mut f, range) {
            break;
        }
    }
    best
}

fn increment(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Minimum over all vertex cuts separating `from` from `to` of the crossing
/// capacity. Exponential in the node count; for small networks only.
pub fn brute_min_cut(nodes: usize, edges: &[(usize, usize, u64)], from: &[usize], to: usize) -> u64 {
    let free: Vec<usize> = (0..nodes).filter(|v| !from.contains(v) && *v != to).collect();
    let mut best = u64::MAX;
    for mask in 0u64..(1 << free.len()) {
        let mut inside = vec![false; nodes];
        for &s in from {
            inside[s] = true;
        }
        for (i, &v) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                inside[v] = true;
            }
        }
        let cut = edges
            .iter()
            .filter(|(a, b, _)| inside[*a] && !inside[*b])
            .map(|e| e.2)
            .sum();
        best = best.min(cut);
    }
    best
}

pub fn edge_list(net: &Network) -> Vec<(usize, usize, u64)> {
    net.edges().iter().map(|e| (e.from, e.to, e.capacity)).collect()
}

/// Brute-force capacity function: min over terminals.
pub fn brute_rho(net: &Network, from: &[usize]) -> u64 {
    let edges = edge_list(net);
    net.terminals()
        .iter()
        .map(|&t| brute_min_cut(net.nodes().len(), &edges, from, t))
        .min()
        .unwrap()
}

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn normalize(cells: Vec<(Vec<usize>, f64)>) -> Vec<(Vec<usize>, f64)> {
    let total: f64 = cells.iter().map(|c| c.1).sum();
    let mut out: Vec<(Vec<usize>, f64)> = cells.into_iter().map(|(t, p)| (t, p / total)).collect();
    // absorb rounding into the largest cell so the sum is 1 within tolerance
    let sum: f64 = out.iter().map(|c| c.1).sum();
    let big = (0..out.len()).max_by(|&a, &b| out[a].1.total_cmp(&out[b].1)).unwrap();
    out[big].1 += 1.0 - sum;
    out
}

/// Random two-variable pmf on alphabets up to `max_x` by `max_y`. Half the
/// draws hide a block structure so the common part is nontrivial.
pub fn random_pair(rng: &mut ChaCha8Rng, max_x: usize, max_y: usize) -> JointPmf {
    let nx = rng.random_range(1..=max_x);
    let ny = rng.random_range(1..=max_y);
    random_pair_sized(rng, nx, ny)
}

pub fn random_pair_sized(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> JointPmf {
    let blocks = if rng.random_bool(0.5) {
        rng.random_range(1..=nx.min(ny))
    } else {
        1
    };
    let bx: Vec<usize> = (0..nx).map(|_| rng.random_range(0..blocks)).collect();
    let by: Vec<usize> = (0..ny).map(|_| rng.random_range(0..blocks)).collect();
    let density = rng.random_range(0.2..1.0);
    let mut cells = Vec::new();
    for x in 0..nx {
        for y in 0..ny {
            if bx[x] == by[y] && rng.random_bool(density) {
                cells.push((vec![x, y], rng.random_range(0.05..1.0)));
            }
        }
    }
    if cells.is_empty() {
        cells.push((vec![rng.random_range(0..nx), rng.random_range(0..ny)], 1.0));
    }
    JointPmf::new(
        vec!["X".into(), "Y".into()],
        vec![labels("x", nx), labels("y", ny)],
        normalize(cells),
    )
    .unwrap()
}

/// Random row-stochastic channel with at least one nonzero entry per row.
pub fn random_channel(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| {
            let density = rng.random_range(0.15..0.8);
            let mut row: Vec<f64> = (0..cols)
                .map(|_| if rng.random_bool(density) { rng.random_range(0.05..1.0) } else { 0.0 })
                .collect();
            if row.iter().all(|&v| v == 0.0) {
                row[rng.random_range(0..cols)] = 1.0;
            }
            let s: f64 = row.iter().sum();
            row.iter().map(|v| v / s).collect()
        })
        .collect()
}

/// Markov chain `X - Y1 - ... - Ym` from a random source and random channels.
pub fn random_chain(rng: &mut ChaCha8Rng, levels: usize, max_alphabet: usize) -> JointPmf {
    let sizes: Vec<usize> = (0..=levels).map(|_| rng.random_range(2..=max_alphabet)).collect();
    let px: Vec<f64> = {
        let raw: Vec<f64> = (0..sizes[0]).map(|_| rng.random_range(0.05..1.0)).collect();
        let s: f64 = raw.iter().sum();
        raw.iter().map(|v| v / s).collect()
    };
    let channels: Vec<Vec<Vec<f64>>> = (0..levels).map(|i| random_channel(rng, sizes[i], sizes[i + 1])).collect();
    let mut cells: Vec<(Vec<usize>, f64)> = (0..sizes[0]).map(|x| (vec![x], px[x])).collect();
    for ch in &channels {
        let mut next = Vec::new();
        for (t, p) in cells {
            let last = *t.last().unwrap();
            for (y, &w) in ch[last].iter().enumerate() {
                if w > 0.0 {
                    let mut t2 = t.clone();
                    t2.push(y);
                    next.push((t2, p * w));
                }
            }
        }
        cells = next;
    }
    let mut vars = vec!["X".to_string()];
    let mut alphabets = vec![labels("x", sizes[0])];
    for i in 1..=levels {
        vars.push(format!("Y{i}"));
        alphabets.push(labels("y", sizes[i]));
    }
    JointPmf::new(vars, alphabets, normalize(cells)).unwrap()
}

/// Random acyclic network with sources `X` at node `n0` and `Y` at `n1`,
/// one to three terminals among the last nodes, every terminal reachable.
pub fn random_network(rng: &mut ChaCha8Rng) -> Network {
    loop {
        let nodes = rng.random_range(4..=7);
        let names = labels("n", nodes);
        let mut edges = Vec::new();
        for a in 0..nodes {
            for b in (a + 1)..nodes {
                if (a, b) == (0, 1) {
                    continue;
                }
                if rng.random_bool(0.45) {
                    edges.push((names[a].clone(), names[b].clone(), rng.random_range(0..=3u64)));
                }
            }
        }
        let k = rng.random_range(1..=3.min(nodes - 2));
        let terminals: Vec<String> = names[nodes - k..].to_vec();
        let sources = IndexMap::from([("X".to_string(), names[0].clone()), ("Y".to_string(), names[1].clone())]);
        if let Ok(net) = Network::new(names.clone(), edges, sources, terminals) {
            return net;
        }
    }
}
