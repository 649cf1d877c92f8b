//! Finite joint distributions and the information measures derived from them.
//!
//! A [`JointPmf`] stores only positive-mass tuples; a tuple is in the support
//! exactly when it is present in the mass table. Symbols are kept as indices
//! into each variable's alphabet, labels are carried alongside for I/O.

use std::collections::{BTreeMap, BTreeSet};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::TOLERANCE;

/// Joint probability mass function over named finite-alphabet variables.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    variables: Vec<String>,
    alphabets: Vec<Vec<String>>,
    mass: BTreeMap<Vec<usize>, f64>,
}

impl JointPmf {
    /// Builds a pmf from symbol-index tuples.
    ///
    /// Entries with exactly zero mass are dropped. Negative or non-finite
    /// masses, duplicated tuples and out-of-range indices are rejected, as is
    /// a total mass further than `1e-9` from one.
    pub fn new<I>(variables: Vec<String>, alphabets: Vec<Vec<String>>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        if variables.is_empty() {
            return Err(Error::InvalidPmf("no variables".into()));
        }
        if variables.len() != alphabets.len() {
            return Err(Error::InvalidPmf(format!(
                "{} variables but {} alphabets",
                variables.len(),
                alphabets.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for name in &variables {
            if name.is_empty() {
                return Err(Error::InvalidPmf("empty variable name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidPmf(format!("duplicate variable `{name}`")));
            }
        }
        for (name, alphabet) in variables.iter().zip(&alphabets) {
            if alphabet.is_empty() {
                return Err(Error::InvalidPmf(format!("variable `{name}` has an empty alphabet")));
            }
            let distinct: BTreeSet<_> = alphabet.iter().collect();
            if distinct.len() != alphabet.len() {
                return Err(Error::InvalidPmf(format!(
                    "variable `{name}` has duplicate symbol labels"
                )));
            }
        }

        let mut mass = BTreeMap::new();
        for (tuple, p) in entries {
            if tuple.len() != variables.len() {
                return Err(Error::InvalidPmf(format!(
                    "tuple of arity {} for {} variables",
                    tuple.len(),
                    variables.len()
                )));
            }
            for (coord, alphabet) in tuple.iter().zip(&alphabets) {
                if *coord >= alphabet.len() {
                    return Err(Error::InvalidPmf(format!("symbol index {coord} out of range")));
                }
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidPmf(format!("invalid probability {p}")));
            }
            if p == 0.0 {
                continue;
            }
            if mass.insert(tuple.clone(), p).is_some() {
                return Err(Error::InvalidPmf(format!("duplicate tuple {tuple:?}")));
            }
        }
        if mass.is_empty() {
            return Err(Error::InvalidPmf("empty support".into()));
        }
        let total: f64 = mass.values().sum();
        if (total - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidPmf(format!("probabilities sum to {total}, not 1")));
        }
        Ok(JointPmf {
            variables,
            alphabets,
            mass,
        })
    }

    /// Builds a pmf from labelled tuples.
    pub fn from_labels<I, T, S>(
        variables: Vec<String>,
        alphabets: Vec<Vec<String>>,
        entries: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (T, f64)>,
        T: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut indexed = Vec::new();
        for (tuple, p) in entries {
            let mut coords = Vec::with_capacity(variables.len());
            for (pos, label) in tuple.into_iter().enumerate() {
                let label = label.as_ref();
                let alphabet = alphabets
                    .get(pos)
                    .ok_or_else(|| Error::InvalidPmf("tuple longer than variable list".into()))?;
                let idx = alphabet.iter().position(|s| s == label).ok_or_else(|| {
                    Error::InvalidPmf(format!(
                        "symbol `{label}` not in alphabet of `{}`",
                        variables[pos]
                    ))
                })?;
                coords.push(idx);
            }
            indexed.push((coords, p));
        }
        Self::new(variables, alphabets, indexed)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PmfDoc = serde_json::from_str(text)?;
        doc.try_into()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&PmfDoc::from(self))?)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn alphabets(&self) -> &[Vec<String>] {
        &self.alphabets
    }

    pub fn alphabet(&self, var: &str) -> Result<&[String]> {
        Ok(&self.alphabets[self.var_index(var)?])
    }

    pub fn var_index(&self, var: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::UnknownVariable(var.to_owned()))
    }

    /// Index of `label` in the alphabet of `var`.
    pub fn symbol_index(&self, var: &str, label: &str) -> Result<usize> {
        self.alphabet(var)?
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| Error::arg(format!("symbol `{label}` not in alphabet of `{var}`")))
    }

    /// Support tuples with their masses, in lexicographic index order.
    pub fn support(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.mass.iter().map(|(t, p)| (t.as_slice(), *p))
    }

    pub fn support_len(&self) -> usize {
        self.mass.len()
    }

    /// Mass of a full tuple; zero if absent.
    pub fn mass_of(&self, tuple: &[usize]) -> f64 {
        self.mass.get(tuple).copied().unwrap_or(0.0)
    }

    fn indices<S: AsRef<str>>(&self, vars: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(vars.len());
        for v in vars {
            let idx = self.var_index(v.as_ref())?;
            if out.contains(&idx) {
                return Err(Error::arg(format!("variable `{}` listed twice", v.as_ref())));
            }
            out.push(idx);
        }
        Ok(out)
    }

    fn marginal_mass(&self, idx: &[usize]) -> BTreeMap<Vec<usize>, f64> {
        let mut out = BTreeMap::new();
        for (tuple, p) in &self.mass {
            let key: Vec<usize> = idx.iter().map(|&i| tuple[i]).collect();
            *out.entry(key).or_insert(0.0) += *p;
        }
        out
    }

    /// The marginal pmf on `vars`, in the listed order.
    pub fn marginal<S: AsRef<str>>(&self, vars: &[S]) -> Result<JointPmf> {
        if vars.is_empty() {
            return Err(Error::arg("empty variable subset"));
        }
        let idx = self.indices(vars)?;
        Ok(JointPmf {
            variables: idx.iter().map(|&i| self.variables[i].clone()).collect(),
            alphabets: idx.iter().map(|&i| self.alphabets[i].clone()).collect(),
            mass: self.marginal_mass(&idx),
        })
    }

    /// Marginal distribution of one variable over its whole alphabet.
    pub fn marginal_dist(&self, var: &str) -> Result<Vec<f64>> {
        let i = self.var_index(var)?;
        let mut dist = vec![0.0; self.alphabets[i].len()];
        for (tuple, p) in &self.mass {
            dist[tuple[i]] += *p;
        }
        Ok(dist)
    }

    /// Joint entropy in bits of the marginal on `vars`.
    pub fn entropy<S: AsRef<str>>(&self, vars: &[S]) -> Result<f64> {
        if vars.is_empty() {
            return Err(Error::arg("empty variable subset"));
        }
        let idx = self.indices(vars)?;
        Ok(shannon_entropy(self.marginal_mass(&idx).into_values()))
    }

    /// `H(target | given)`, clamped at zero. An empty `given` yields `H(target)`.
    pub fn conditional_entropy<S: AsRef<str>, T: AsRef<str>>(
        &self,
        target: &[S],
        given: &[T],
    ) -> Result<f64> {
        if target.is_empty() {
            return Err(Error::arg("empty target subset"));
        }
        let t = self.indices(target)?;
        let g = self.indices(given)?;
        if t.iter().any(|i| g.contains(i)) {
            return Err(Error::arg("target and conditioning subsets overlap"));
        }
        let joint: Vec<usize> = t.iter().chain(&g).copied().collect();
        let h_joint = shannon_entropy(self.marginal_mass(&joint).into_values());
        let h_given = if g.is_empty() {
            0.0
        } else {
            shannon_entropy(self.marginal_mass(&g).into_values())
        };
        Ok((h_joint - h_given).max(0.0))
    }

    /// `I(a; b)`, clamped at zero.
    pub fn mutual_information<S: AsRef<str>, T: AsRef<str>>(&self, a: &[S], b: &[T]) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::arg("empty variable subset"));
        }
        let ia = self.indices(a)?;
        let ib = self.indices(b)?;
        if ia.iter().any(|i| ib.contains(i)) {
            return Err(Error::arg("subsets overlap"));
        }
        let both: Vec<usize> = ia.iter().chain(&ib).copied().collect();
        let h = |idx: &[usize]| shannon_entropy(self.marginal_mass(idx).into_values());
        Ok((h(&ia) + h(&ib) - h(&both)).max(0.0))
    }

    /// Whether the variables in `order` form a Markov chain.
    ///
    /// At every step the whole prefix must be conditionally independent of
    /// the next variable given the current one:
    /// `p(past, next | cur) = p(past | cur) p(next | cur)` within `1e-9`.
    /// For three variables this is the usual `A - B - C` condition.
    pub fn is_markov_chain<S: AsRef<str>>(&self, order: &[S]) -> Result<bool> {
        if order.len() < 3 {
            return Err(Error::arg("a Markov chain needs at least three variables"));
        }
        let idx = self.indices(order)?;
        for step in 1..idx.len() - 1 {
            let past = &idx[..step];
            let cur = idx[step];
            let next = idx[step + 1];

            let p_cur = self.marginal_mass(&[cur]);
            let mut pc_idx = past.to_vec();
            pc_idx.push(cur);
            let p_past_cur = self.marginal_mass(&pc_idx);
            let p_cur_next = self.marginal_mass(&[cur, next]);
            let mut all_idx = pc_idx.clone();
            all_idx.push(next);
            let p_all = self.marginal_mass(&all_idx);

            for (pc, p_ab) in &p_past_cur {
                let b = pc[pc.len() - 1];
                let pb = p_cur[&vec![b]];
                for (bc, p_bc) in p_cur_next.range(vec![b]..vec![b + 1]) {
                    let mut key = pc.clone();
                    key.push(bc[1]);
                    let joint = p_all.get(&key).copied().unwrap_or(0.0) / pb;
                    let product = (p_ab / pb) * (p_bc / pb);
                    if (joint - product).abs() > TOLERANCE {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Draws `n` i.i.d. tuples with a ChaCha8 generator seeded from `seed`.
    ///
    /// Returns one sequence per variable, in variable order.
    pub fn sample_iid(&self, n: usize, seed: u64) -> Result<Vec<SymbolSequence>> {
        if n == 0 {
            return Err(Error::arg("sample size must be at least 1"));
        }
        let tuples: Vec<&Vec<usize>> = self.mass.keys().collect();
        let dist = WeightedIndex::new(self.mass.values().copied())
            .map_err(|e| Error::InvalidPmf(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut columns = vec![Vec::with_capacity(n); self.variables.len()];
        for _ in 0..n {
            let t = tuples[dist.sample(&mut rng)];
            for (col, &s) in columns.iter_mut().zip(t.iter()) {
                col.push(s);
            }
        }
        Ok(columns
            .into_iter()
            .enumerate()
            .map(|(i, symbols)| SymbolSequence {
                variable: self.variables[i].clone(),
                alphabet: self.alphabets[i].clone(),
                symbols,
            })
            .collect())
    }
}

/// A length-n sequence of symbols from one variable's alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    variable: String,
    alphabet: Vec<String>,
    symbols: Vec<usize>,
}

impl SymbolSequence {
    pub fn new(variable: impl Into<String>, alphabet: Vec<String>, symbols: Vec<usize>) -> Result<Self> {
        if let Some(bad) = symbols.iter().find(|&&s| s >= alphabet.len()) {
            return Err(Error::arg(format!("symbol index {bad} out of alphabet range")));
        }
        Ok(SymbolSequence {
            variable: variable.into(),
            alphabet,
            symbols,
        })
    }

    /// Builds a sequence of `var` from symbol labels of `pmf`.
    pub fn from_labels<S: AsRef<str>>(pmf: &JointPmf, var: &str, labels: &[S]) -> Result<Self> {
        let alphabet = pmf.alphabet(var)?.to_vec();
        let symbols = labels
            .iter()
            .map(|l| pmf.symbol_index(var, l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(SymbolSequence {
            variable: var.to_owned(),
            alphabet,
            symbols,
        })
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.symbols.iter().map(|&s| self.alphabet[s].as_str())
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Strong typicality in relative form: `|count(a)/n - p(a)| <= epsilon * p(a)`
/// for every symbol, which forces zero counts on zero-mass symbols.
pub fn is_strongly_typical(seq: &SymbolSequence, dist: &[f64], epsilon: f64) -> Result<bool> {
    if seq.is_empty() {
        return Err(Error::arg("empty sequence"));
    }
    if dist.len() != seq.alphabet.len() {
        return Err(Error::arg(format!(
            "distribution has {} entries for an alphabet of {}",
            dist.len(),
            seq.alphabet.len()
        )));
    }
    typical_indices(&seq.symbols, dist, epsilon)
}

pub(crate) fn typical_indices(symbols: &[usize], dist: &[f64], epsilon: f64) -> Result<bool> {
    if symbols.is_empty() {
        return Err(Error::arg("empty sequence"));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::arg("epsilon must be positive"));
    }
    let mut counts = vec![0usize; dist.len()];
    for &s in symbols {
        match counts.get_mut(s) {
            Some(c) => *c += 1,
            None => return Err(Error::arg(format!("symbol index {s} outside distribution"))),
        }
    }
    let n = symbols.len() as f64;
    Ok(counts.iter().zip(dist).all(|(&c, &p)| {
        if p == 0.0 {
            c == 0
        } else {
            (c as f64 / n - p).abs() <= epsilon * p
        }
    }))
}

/// `h(gamma)` in bits.
pub fn binary_entropy(gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::arg(format!("gamma {gamma} outside [0, 1]")));
    }
    Ok(shannon_entropy([gamma, 1.0 - gamma]))
}

/// Shannon entropy in bits of a probability vector; zero entries contribute nothing.
pub fn shannon_entropy<I: IntoIterator<Item = f64>>(probs: I) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

#[derive(Serialize, Deserialize)]
struct PmfDoc {
    variables: Vec<String>,
    alphabets: BTreeMap<String, Vec<String>>,
    mass: Vec<MassDoc>,
}

#[derive(Serialize, Deserialize)]
struct MassDoc {
    tuple: Vec<String>,
    p: Prob,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Prob {
    Number(f64),
    Text(String),
}

impl Prob {
    fn value(&self) -> Result<f64> {
        match self {
            Prob::Number(p) => Ok(*p),
            Prob::Text(s) => parse_probability(s),
        }
    }
}

/// Parses `"a/b"` fractions or plain decimals.
pub fn parse_probability(text: &str) -> Result<f64> {
    let bad = || Error::InvalidPmf(format!("cannot parse probability `{text}`"));
    let text = text.trim();
    match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0.0 {
                return Err(bad());
            }
            Ok(num / den)
        }
        None => text.parse().map_err(|_| bad()),
    }
}

impl TryFrom<PmfDoc> for JointPmf {
    type Error = Error;

    fn try_from(mut doc: PmfDoc) -> Result<Self> {
        let mut alphabets = Vec::with_capacity(doc.variables.len());
        for v in &doc.variables {
            let alphabet = doc
                .alphabets
                .remove(v)
                .ok_or_else(|| Error::InvalidPmf(format!("no alphabet for variable `{v}`")))?;
            alphabets.push(alphabet);
        }
        if let Some(extra) = doc.alphabets.keys().next() {
            return Err(Error::InvalidPmf(format!("alphabet for unknown variable `{extra}`")));
        }
        let entries = doc
            .mass
            .into_iter()
            .map(|m| Ok((m.tuple, m.p.value()?)))
            .collect::<Result<Vec<_>>>()?;
        JointPmf::from_labels(doc.variables, alphabets, entries)
    }
}

impl From<&JointPmf> for PmfDoc {
    fn from(pmf: &JointPmf) -> Self {
        PmfDoc {
            variables: pmf.variables.clone(),
            alphabets: pmf
                .variables
                .iter()
                .cloned()
                .zip(pmf.alphabets.iter().cloned())
                .collect(),
            mass: pmf
                .mass
                .iter()
                .map(|(t, p)| MassDoc {
                    tuple: t
                        .iter()
                        .zip(&pmf.alphabets)
                        .map(|(&s, a)| a[s].clone())
                        .collect(),
                    p: Prob::Number(*p),
                })
                .collect(),
        }
    }
}
