//! Rate-region decision procedures.
//!
//! Every procedure returns a [`FeasibilityReport`] listing each inequality
//! with both sides and its slack, so callers can audit a verdict or re-run it
//! at a different tolerance with [`FeasibilityReport::recheck`].

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::Serialize;

use crate::common_info::{approx_eq, check_nesting, decompose, decompose_source, ComponentPartition};
use crate::error::{Error, Result};
use crate::netgraph::Network;
use crate::probability::{binary_entropy, shannon_entropy, JointPmf};

/// Additive tolerance for pure rate-versus-cut comparisons.
pub const DEFAULT_DELTA: f64 = 1e-9;

/// Default number of points in the uniform helper-rate sweep.
pub const DEFAULT_GAMMA_POINTS: usize = 1001;

/// Sources beyond this count make the subset enumeration impractical.
const MAX_SUBSET_SOURCES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; negative when violated.
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Feasible,
    Infeasible,
    /// All necessary cut conditions hold but they are not known to be sufficient.
    CutConditionsHold,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
            Verdict::CutConditionsHold => "cut-conditions-hold",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// Rates assigned to the latent sources of the expanded network.
    LatentRates { rates: IndexMap<String, f64> },
    /// Helper sweep over the time-sharing parameter.
    HelperSweep(HelperSweep),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HelperSweep {
    /// First grid point meeting both cut conditions.
    pub feasible_gamma: Option<f64>,
    pub rho_source: f64,
    pub rho_helper: f64,
    pub gamma: Vec<f64>,
    /// `H(X|U)` along the grid.
    pub source_rate: Vec<f64>,
    /// `H(U)` along the grid.
    pub helper_rate: Vec<f64>,
    /// `gamma * H(K)`, plain time-sharing of the common part.
    pub time_sharing_rate: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub scheme: String,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip)]
    necessary_only: bool,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn violated(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.holds)
    }

    pub fn check(&self, label: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.label == label)
    }

    /// Re-evaluates every inequality with an additive tolerance `delta`.
    pub fn recheck(&self, delta: f64) -> FeasibilityReport {
        let mut out = self.clone();
        for c in &mut out.checks {
            c.holds = c.lhs <= c.rhs + delta;
        }
        out.verdict = verdict_of(&out.checks, out.necessary_only);
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn verdict_of(checks: &[Check], necessary_only: bool) -> Verdict {
    match (checks.iter().all(|c| c.holds), necessary_only) {
        (false, _) => Verdict::Infeasible,
        (true, false) => Verdict::Feasible,
        (true, true) => Verdict::CutConditionsHold,
    }
}

pub(crate) struct ReportBuilder {
    scheme: String,
    checks: Vec<Check>,
    witness: Option<Witness>,
}

impl ReportBuilder {
    pub(crate) fn new(scheme: &str) -> Self {
        ReportBuilder {
            scheme: scheme.to_owned(),
            checks: Vec::new(),
            witness: None,
        }
    }

    pub(crate) fn check(&mut self, label: String, lhs: f64, rhs: f64) {
        self.checks.push(Check {
            label,
            lhs,
            rhs,
            slack: rhs - lhs,
            holds: lhs <= rhs + DEFAULT_DELTA,
        });
    }

    pub(crate) fn witness(&mut self, witness: Witness) {
        self.witness = Some(witness);
    }

    fn build(self, necessary_only: bool) -> FeasibilityReport {
        FeasibilityReport {
            verdict: verdict_of(&self.checks, necessary_only),
            scheme: self.scheme,
            checks: self.checks,
            witness: self.witness,
            necessary_only,
        }
    }

    pub(crate) fn finish(self) -> FeasibilityReport {
        self.build(false)
    }

    pub(crate) fn finish_necessary_only(self) -> FeasibilityReport {
        self.build(true)
    }
}

fn bind_all(net: &Network, pmf: &JointPmf) -> Result<()> {
    for v in pmf.variables() {
        net.source_node(v)?;
    }
    Ok(())
}

fn subsets(n: usize) -> Result<impl Iterator<Item = Vec<usize>>> {
    if n > MAX_SUBSET_SOURCES {
        return Err(Error::arg(format!(
            "{n} sources exceed the subset enumeration limit of {MAX_SUBSET_SOURCES}"
        )));
    }
    Ok((1u64..(1 << n)).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect()))
}

/// Correlated multicast: for every nonempty subset `S` of the sources,
/// `H(X_S | X_{S^c}) <= rho_G(S)`.
pub fn check_multicast(net: &Network, pmf: &JointPmf) -> Result<FeasibilityReport> {
    bind_all(net, pmf)?;
    let vars = pmf.variables();
    let mut report = ReportBuilder::new("multicast");
    for members in subsets(vars.len())? {
        let inside: Vec<&str> = members.iter().map(|&i| vars[i].as_str()).collect();
        let outside: Vec<&str> = (0..vars.len())
            .filter(|i| !members.contains(i))
            .map(|i| vars[i].as_str())
            .collect();
        let lhs = pmf.conditional_entropy(&inside, &outside)?;
        let label = if outside.is_empty() {
            format!("H({0}) <= rho_G({0})", inside.join(","))
        } else {
            format!("H({}|{}) <= rho_G({})", inside.join(","), outside.join(","), inside.join(","))
        };
        report.check(label, lhs, net.rho_of_vars(&inside)? as f64);
    }
    Ok(report.finish())
}

/// Sources compressed separately as if independent:
/// `sum_{j in S} H(X_j) <= rho_G(S)` for every nonempty subset.
pub fn check_independent(net: &Network, pmf: &JointPmf) -> Result<FeasibilityReport> {
    bind_all(net, pmf)?;
    let vars = pmf.variables();
    let entropies = vars
        .iter()
        .map(|v| pmf.entropy(&[v]))
        .collect::<Result<Vec<_>>>()?;
    let mut report = ReportBuilder::new("independent");
    for members in subsets(vars.len())? {
        let inside: Vec<&str> = members.iter().map(|&i| vars[i].as_str()).collect();
        let lhs: f64 = members.iter().map(|&i| entropies[i]).sum();
        let terms: Vec<String> = inside.iter().map(|v| format!("H({v})")).collect();
        report.check(
            format!("{} <= rho_G({})", terms.join("+"), inside.join(",")),
            lhs,
            net.rho_of_vars(&inside)? as f64,
        );
    }
    Ok(report.finish())
}

/// Separation by source decomposition for two sources.
pub fn check_separation(net: &Network, pmf: &JointPmf, vars: [&str; 2]) -> Result<FeasibilityReport> {
    let [x, y] = vars;
    net.source_node(x)?;
    net.source_node(y)?;
    let partition = decompose(pmf, &[x, y])?;
    let hx = decompose_source(pmf, &partition, x)?.residual_entropy();
    let hy = decompose_source(pmf, &partition, y)?.residual_entropy();
    let hk = partition.entropy();

    let mut report = ReportBuilder::new("separation");
    report.check(format!("H({x}|K) <= rho_G({x})"), hx, net.rho_of_vars(&[x])? as f64);
    report.check(format!("H({y}|K) <= rho_G({y})"), hy, net.rho_of_vars(&[y])? as f64);
    report.check(
        format!("H({x}|K)+H({y}|K)+H(K) <= rho_G({x},{y})"),
        hx + hy + hk,
        net.rho_of_vars(&[x, y])? as f64,
    );
    report.witness(Witness::LatentRates {
        rates: IndexMap::from([(format!("{x}'"), hx), (format!("{y}'"), hy), ("K".to_owned(), hk)]),
    });
    Ok(report.finish())
}

/// Whether the common part captures all the mutual information of a
/// two-variable pmf, `H(K) = I(X;Y)` within `1e-9`.
pub fn check_corollary_optimality(pmf: &JointPmf) -> Result<bool> {
    let vars = pmf.variables();
    if vars.len() != 2 {
        return Err(Error::arg("optimality check needs exactly two variables"));
    }
    let partition = decompose(pmf, vars)?;
    let mi = pmf.mutual_information(&vars[..1], &vars[1..])?;
    Ok(approx_eq(partition.entropy(), mi))
}

/// Separation with the common part of all `l` sources.
pub fn check_separation_l(net: &Network, pmf: &JointPmf) -> Result<FeasibilityReport> {
    let vars = pmf.variables();
    if vars.len() < 2 {
        return Err(Error::arg("need at least two sources"));
    }
    bind_all(net, pmf)?;
    let partition = decompose(pmf, vars)?;
    let hk = partition.entropy();
    let mut report = ReportBuilder::new("separation-l");
    let mut rates = IndexMap::new();
    let mut total = hk;
    for v in vars {
        let h = decompose_source(pmf, &partition, v)?.residual_entropy();
        report.check(format!("H({v}|K) <= rho_G({v})"), h, net.rho_of_vars(&[v])? as f64);
        rates.insert(format!("{v}'"), h);
        total += h;
    }
    rates.insert("K".to_owned(), hk);
    let terms: Vec<String> = vars.iter().map(|v| format!("H({v}|K)")).collect();
    report.check(
        format!("{}+H(K) <= rho_G({})", terms.join("+"), vars.join(",")),
        total,
        net.rho_of_vars(vars)? as f64,
    );
    report.witness(Witness::LatentRates { rates });
    Ok(report.finish())
}

/// Broadcast with side information. Side variable `i` is held at the
/// network's `i`-th terminal; checks `H(X|Y_i) <= rho(s; t_i)`, listed in
/// increasing order of `H(X|Y_i)`.
pub fn check_bsi<S: AsRef<str>>(
    net: &Network,
    pmf: &JointPmf,
    source_var: &str,
    side_vars: &[S],
) -> Result<FeasibilityReport> {
    if side_vars.len() != net.terminals().len() {
        return Err(Error::Binding(format!(
            "{} side variables for {} terminals",
            side_vars.len(),
            net.terminals().len()
        )));
    }
    let s = net.source_node(source_var)?;
    let mut rows = Vec::with_capacity(side_vars.len());
    for (side, &t) in side_vars.iter().zip(net.terminals()) {
        let side = side.as_ref();
        let h = pmf.conditional_entropy(&[source_var], &[side])?;
        rows.push((h, side, t));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut report = ReportBuilder::new("bsi");
    for (h, side, t) in rows {
        report.check(
            format!("H({source_var}|{side}) <= rho({};{})", net.node_name(s), net.node_name(t)),
            h,
            net.min_cut_value(&[s], t)? as f64,
        );
    }
    Ok(report.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanMode {
    /// Nested common-information refinements; realizable with the zero-error codec.
    CommonInformation,
    /// Successive-description rates `H(X|Y_i)`; rate accounting only.
    ConditionalEntropy,
}

impl FromStr for PlanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "common-information" => Ok(PlanMode::CommonInformation),
            "conditional-entropy" => Ok(PlanMode::ConditionalEntropy),
            other => Err(Error::arg(format!("unknown plan mode `{other}`"))),
        }
    }
}

/// What the bits of a message describe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    /// Index of the source symbol inside its class under the first side variable.
    WithinClassIndex { side: String },
    /// Rank of the finer class among the finer classes composing the coarser one.
    RefinementRank { fine: String, coarse: String },
    /// Bits of an external successive-description code, not built here.
    SuccessiveDescription { level: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Message {
    pub index: usize,
    pub rate: f64,
    pub payload: Payload,
}

/// Degraded message set: terminal `i` needs messages `1..=i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MessagePlan {
    pub mode: PlanMode,
    pub source: String,
    pub side: Vec<String>,
    pub messages: Vec<Message>,
    /// Rate of messages `1..=i`.
    pub cumulative: Vec<f64>,
}

impl MessagePlan {
    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }
}

/// Joint entropy of the classes of `var` under two partitions minus the
/// entropy under the coarse one: `H(K_fine | K_coarse)`.
fn class_conditional_entropy(
    pmf: &JointPmf,
    var: &str,
    fine: &ComponentPartition,
    coarse: &ComponentPartition,
) -> Result<f64> {
    let dist = pmf.marginal_dist(var)?;
    let fp = fine.var_position(var)?;
    let cp = coarse.var_position(var)?;
    let mut joint = vec![0.0; fine.len() * coarse.len()];
    let mut coarse_mass = vec![0.0; coarse.len()];
    for (s, &p) in dist.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let (Some(f), Some(c)) = (fine.class_index(fp, s), coarse.class_index(cp, s)) else {
            return Err(Error::Structural(format!("supported `{var}` symbol without a class")));
        };
        joint[f * coarse.len() + c] += p;
        coarse_mass[c] += p;
    }
    Ok((shannon_entropy(joint) - shannon_entropy(coarse_mass)).max(0.0))
}

/// Partitions `K_i` of `(X, Y_i)` for each side variable, checked to be nested.
pub(crate) fn nested_partitions<S: AsRef<str>>(
    pmf: &JointPmf,
    source_var: &str,
    side_vars: &[S],
) -> Result<Vec<ComponentPartition>> {
    let partitions = side_vars
        .iter()
        .map(|y| decompose(pmf, &[source_var, y.as_ref()]))
        .collect::<Result<Vec<_>>>()?;
    for pair in partitions.windows(2) {
        if check_nesting(&pair[0], &pair[1], source_var)?.is_none() {
            return Err(Error::Structural(format!(
                "classes of `{source_var}` are not nested along the chain"
            )));
        }
    }
    Ok(partitions)
}

/// Plans the degraded message set for broadcast with side information along
/// the Markov chain `X - Y_1 - ... - Y_m`.
pub fn plan_degraded_messages<S: AsRef<str>>(
    pmf: &JointPmf,
    source_var: &str,
    side_vars: &[S],
    mode: PlanMode,
) -> Result<MessagePlan> {
    if side_vars.is_empty() {
        return Err(Error::arg("no side variables"));
    }
    let side: Vec<String> = side_vars.iter().map(|s| s.as_ref().to_owned()).collect();
    if side.len() >= 2 {
        let mut order = vec![source_var.to_owned()];
        order.extend(side.iter().cloned());
        if !pmf.is_markov_chain(&order)? {
            return Err(Error::Precondition(format!(
                "{} is not a Markov chain",
                order.join(" - ")
            )));
        }
    } else {
        pmf.var_index(source_var)?;
        pmf.var_index(&side[0])?;
    }

    let mut messages = Vec::with_capacity(side.len());
    let mut cumulative = Vec::with_capacity(side.len());
    match mode {
        PlanMode::CommonInformation => {
            let partitions = nested_partitions(pmf, source_var, &side)?;
            let first = decompose_source(pmf, &partitions[0], source_var)?.residual_entropy();
            messages.push(Message {
                index: 1,
                rate: first,
                payload: Payload::WithinClassIndex { side: side[0].clone() },
            });
            for i in 1..side.len() {
                let rate =
                    class_conditional_entropy(pmf, source_var, &partitions[i - 1], &partitions[i])?;
                messages.push(Message {
                    index: i + 1,
                    rate,
                    payload: Payload::RefinementRank {
                        fine: side[i - 1].clone(),
                        coarse: side[i].clone(),
                    },
                });
            }
        }
        PlanMode::ConditionalEntropy => {
            let mut previous = 0.0;
            for (i, y) in side.iter().enumerate() {
                let h = pmf.conditional_entropy(&[source_var], &[y])?;
                messages.push(Message {
                    index: i + 1,
                    rate: (h - previous).max(0.0),
                    payload: Payload::SuccessiveDescription { level: i + 1 },
                });
                previous = previous.max(h);
            }
        }
    }
    let mut total = 0.0;
    for m in &messages {
        total += m.rate;
        cumulative.push(total);
    }
    Ok(MessagePlan {
        mode,
        source: source_var.to_owned(),
        side,
        messages,
        cumulative,
    })
}

/// Cut conditions for delivering a degraded message set from `source_node`
/// to `terminals` (in plan order). Sufficient for at most two terminals;
/// for more the verdict is at best [`Verdict::CutConditionsHold`].
pub fn check_dmb_support<S: AsRef<str>>(
    net: &Network,
    plan: &MessagePlan,
    source_node: &str,
    terminals: &[S],
) -> Result<FeasibilityReport> {
    if terminals.len() != plan.messages.len() {
        return Err(Error::Binding(format!(
            "{} terminals for {} messages",
            terminals.len(),
            plan.messages.len()
        )));
    }
    let s = net.node_index(source_node)?;
    let mut report = ReportBuilder::new("dmb");
    for (i, t) in terminals.iter().enumerate() {
        let t = t.as_ref();
        report.check(
            format!("R(M1..M{}) <= rho({source_node};{t})", i + 1),
            plan.cumulative[i],
            net.min_cut_value(&[s], net.node_index(t)?)? as f64,
        );
    }
    Ok(if terminals.len() <= 2 {
        report.finish()
    } else {
        report.finish_necessary_only()
    })
}

/// Source and helper rates `(H(X|U), H(U))` for `U` equal to `K` with
/// probability `gamma` and erased otherwise.
pub fn helper_rates(h_x: f64, h_x_given_k: f64, h_k: f64, gamma: f64) -> Result<(f64, f64)> {
    let h = binary_entropy(gamma)?;
    Ok((gamma * h_x_given_k + (1.0 - gamma) * h_x, gamma * h_k + h))
}

/// Helper-assisted delivery of `x_var`, with `helper_var` describing the
/// common part at a fraction `gamma` of positions. Feasible when some grid
/// point satisfies `rho_G(s_x) >= H(X|U)` and `rho_G(s_y) >= H(U)`.
pub fn check_ak(
    net: &Network,
    pmf: &JointPmf,
    x_var: &str,
    helper_var: &str,
    gamma_points: usize,
) -> Result<FeasibilityReport> {
    if gamma_points < 2 {
        return Err(Error::arg("the gamma grid needs at least two points"));
    }
    let partition = decompose(pmf, &[x_var, helper_var])?;
    let h_k = partition.entropy();
    let h_x = pmf.entropy(&[x_var])?;
    let h_x_given_k = decompose_source(pmf, &partition, x_var)?.residual_entropy();
    let rho_source = net.rho_of_vars(&[x_var])? as f64;
    let rho_helper = net.rho_of_vars(&[helper_var])? as f64;

    let mut gamma: Vec<f64> = (0..gamma_points)
        .map(|j| j as f64 / (gamma_points - 1) as f64)
        .collect();
    // stationary point of H(U): log2(gamma / (1 - gamma)) = H(K)
    let odds = h_k.exp2();
    gamma.push(odds / (1.0 + odds));
    gamma.sort_by(f64::total_cmp);
    gamma.dedup();

    let mut source_rate = Vec::with_capacity(gamma.len());
    let mut helper_rate = Vec::with_capacity(gamma.len());
    for &g in &gamma {
        let (s, h) = helper_rates(h_x, h_x_given_k, h_k, g)?;
        source_rate.push(s);
        helper_rate.push(h);
    }
    let time_sharing_rate = gamma.iter().map(|g| g * h_k).collect();

    let meets = |i: usize| {
        source_rate[i] <= rho_source + DEFAULT_DELTA && helper_rate[i] <= rho_helper + DEFAULT_DELTA
    };
    let feasible = (0..gamma.len()).find(|&i| meets(i));
    let shown = feasible.unwrap_or_else(|| {
        (0..gamma.len())
            .min_by(|&a, &b| {
                let excess = |i: usize| (source_rate[i] - rho_source).max(helper_rate[i] - rho_helper);
                excess(a).total_cmp(&excess(b))
            })
            .expect("grid is nonempty")
    });

    let mut report = ReportBuilder::new("ak");
    let g = gamma[shown];
    report.check(
        format!("H({x_var}|U) <= rho_G({x_var}) at gamma={g:.6}"),
        source_rate[shown],
        rho_source,
    );
    report.check(
        format!("H(U) <= rho_G({helper_var}) at gamma={g:.6}"),
        helper_rate[shown],
        rho_helper,
    );
    report.witness(Witness::HelperSweep(HelperSweep {
        feasible_gamma: feasible.map(|i| gamma[i]),
        rho_source,
        rho_helper,
        gamma,
        source_rate,
        helper_rate,
        time_sharing_rate,
    }));
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| i.to_string()).collect()
    }

    fn point_to_point(cap: u64) -> Network {
        Network::new(
            vec!["s".into(), "t".into()],
            vec![("s".into(), "t".into(), cap)],
            IndexMap::from([("X".to_string(), "s".to_string())]),
            vec!["t".into()],
        )
        .unwrap()
    }

    #[test]
    fn point_to_point_multicast() {
        let pmf = JointPmf::new(
            vec!["X".into()],
            vec![labels(4)],
            (0..4).map(|i| (vec![i], 0.25)),
        )
        .unwrap();
        assert!(check_multicast(&point_to_point(2), &pmf).unwrap().is_feasible());
        let tight = check_multicast(&point_to_point(1), &pmf).unwrap();
        assert_eq!(tight.verdict, Verdict::Infeasible);
        assert!((tight.checks[0].slack + 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbound_variable_is_a_binding_error() {
        let pmf = JointPmf::new(
            vec!["Z".into()],
            vec![labels(2)],
            [(vec![0], 0.5), (vec![1], 0.5)],
        )
        .unwrap();
        assert!(matches!(
            check_multicast(&point_to_point(1), &pmf),
            Err(Error::Binding(_))
        ));
    }

    #[test]
    fn recheck_moves_the_verdict() {
        let pmf = JointPmf::new(
            vec!["X".into()],
            vec![labels(3)],
            (0..3).map(|i| (vec![i], 1.0 / 3.0)),
        )
        .unwrap();
        let report = check_multicast(&point_to_point(1), &pmf).unwrap();
        assert!(!report.is_feasible());
        assert!(report.recheck(0.6).is_feasible());
    }

    #[test]
    fn helper_rates_at_endpoints() {
        assert_eq!(helper_rates(2.0, 0.5, 1.5, 0.0).unwrap(), (2.0, 0.0));
        assert_eq!(helper_rates(2.0, 0.5, 1.5, 1.0).unwrap(), (0.5, 1.5));
        assert!(helper_rates(2.0, 0.5, 1.5, 1.1).is_err());
    }

    #[test]
    fn plan_mode_parses() {
        assert_eq!("common-information".parse::<PlanMode>().unwrap(), PlanMode::CommonInformation);
        assert!("polar".parse::<PlanMode>().is_err());
    }
}
