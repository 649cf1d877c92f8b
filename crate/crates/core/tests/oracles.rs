//! Library results against the brute-force references in `common`.

mod common;

use commonnet::common_info::{check_nesting, class_of, decompose, decompose_source, gk_entropy, refinement_index};
use commonnet::feasibility::{
    check_ak, check_bsi, check_corollary_optimality, check_dmb_support, check_multicast, check_separation,
    check_separation_l, helper_rates, plan_degraded_messages, PlanMode, Verdict,
};
use commonnet::netgraph::{independent_multicast_feasible, LatentSource};
use commonnet::{Error, JointPmf, Network};
use common::*;
use indexmap::IndexMap;

const TOL: f64 = 1e-6;

#[test]
fn worked_table_quantities_match_direct_summation() {
    let pmf = pmf_fixture("worked_table.json");
    let t = table_of(&pmf);
    let comps = components(&t, &[0, 1]);
    assert_eq!(comps.weights.len(), 2);

    let hk = shannon(&comps.weights);
    let h_xy = entropy(&t, &[0, 1]);
    let h_x = entropy(&t, &[0]);
    let h_y = entropy(&t, &[1]);
    // H(X|K) = H(X) - H(K) because K is a function of X
    let h_x_k = h_x - hk;
    let h_y_k = h_y - hk;
    let mi = h_x + h_y - h_xy;
    for (oracle, value) in [
        (hk, 0.918296),
        (h_xy, 2.584963),
        (h_x, 1.554585),
        (h_y, 1.959148),
        (h_x_k, 0.636289),
        (h_y_k, 1.040852),
        (mi, 0.928770),
    ] {
        assert!((oracle - value).abs() < TOL, "{oracle} vs {value}");
    }

    let k = decompose(&pmf, &["X", "Y"]).unwrap();
    assert_eq!(k.len(), 2);
    let mut w = k.weights();
    w.sort_by(f64::total_cmp);
    assert!((w[0] - 1.0 / 3.0).abs() < 1e-12 && (w[1] - 2.0 / 3.0).abs() < 1e-12);
    assert!((gk_entropy(&k) - hk).abs() < 1e-12);
    assert!((pmf.entropy(&["X", "Y"]).unwrap() - h_xy).abs() < 1e-12);
    assert!((pmf.mutual_information(&["X"], &["Y"]).unwrap() - mi).abs() < 1e-12);
    assert!((decompose_source(&pmf, &k, "X").unwrap().residual_entropy() - h_x_k).abs() < 1e-12);
    assert!((decompose_source(&pmf, &k, "Y").unwrap().residual_entropy() - h_y_k).abs() < 1e-12);
    assert!((pmf.conditional_entropy(&["X"], &["Y"]).unwrap() - 0.625815).abs() < TOL);
}

#[test]
fn class_lookup_and_support_errors() {
    let pmf = pmf_fixture("worked_table.json");
    let k = decompose(&pmf, &["X", "Y"]).unwrap();
    assert_eq!(class_of(&k, "X", "x1").unwrap(), class_of(&k, "Y", "y1").unwrap());
    assert_eq!(class_of(&k, "X", "x2").unwrap(), class_of(&k, "Y", "y4").unwrap());
    assert_ne!(class_of(&k, "X", "x1").unwrap(), class_of(&k, "X", "x3").unwrap());
    assert!(class_of(&k, "X", "x9").is_err());
}

#[test]
fn mesh_cuts_match_brute_force() {
    let net = net_fixture("relay_mesh.json");
    let a = net.node_index("a").unwrap();
    let e = net.node_index("e").unwrap();
    let edges = edge_list(&net);
    for (from, to, value) in [(vec![a], "g", 1), (vec![a, e], "f", 3)] {
        let t = net.node_index(to).unwrap();
        assert_eq!(brute_min_cut(net.nodes().len(), &edges, &from, t), value);
        let names: Vec<&str> = from.iter().map(|&i| net.node_name(i)).collect();
        assert_eq!(net.min_cut(&names, to).unwrap().value, value);
    }
    assert_eq!(brute_rho(&net, &[a]), 1);
    assert_eq!(brute_rho(&net, &[e]), 1);
    assert_eq!(brute_rho(&net, &[a, e]), 3);
    let caps = net.capacity_function(&[vec!["a"], vec!["e"], vec!["a", "e"]]).unwrap();
    let values: Vec<u64> = caps.iter().map(|c| c.value).collect();
    assert_eq!(values, vec![1, 1, 3]);
    assert_eq!(net.rho_of_vars(&["X", "Y"]).unwrap(), 3);

    let delayed = net.delayed(4).unwrap();
    assert_eq!(delayed.capacity_function(&[vec!["a", "e"]]).unwrap()[0].value, 12);
    assert_eq!(net.delayed(1).unwrap(), net);
}

#[test]
fn butterfly_cuts() {
    let net = net_fixture("butterfly.json");
    let s1 = net.node_index("s1").unwrap();
    let s2 = net.node_index("s2").unwrap();
    assert_eq!(brute_rho(&net, &[s1, s2]), 2);
    assert_eq!(net.capacity_function(&[vec!["s1", "s2"]]).unwrap()[0].value, 2);
    assert_eq!(net.rho_of_vars(&["X"]).unwrap(), 1);

    let rates = IndexMap::from([("s1".to_string(), 1.0), ("s2".to_string(), 1.0)]);
    let r = independent_multicast_feasible(&net, &rates).unwrap();
    assert!(r.is_feasible());
    assert!(r.checks.last().unwrap().slack.abs() < 1e-12);

    let rates = IndexMap::from([("s1".to_string(), 1.5), ("s2".to_string(), 1.0)]);
    let r = independent_multicast_feasible(&net, &rates).unwrap();
    assert!(!r.is_feasible());
    assert_eq!(r.violated().count(), 2);
    assert!(r.violated().any(|c| c.label.contains("s1,s2")));

    let zero = IndexMap::from([("s1".to_string(), 0.0), ("s2".to_string(), 0.0)]);
    assert!(independent_multicast_feasible(&net, &zero).unwrap().is_feasible());
}

#[test]
fn expanded_mesh_cuts() {
    let net = net_fixture("relay_mesh.json");
    assert_eq!(net.expand_with_latent_sources(&[]).unwrap(), net);
    let expanded = net
        .expand_with_latent_sources(&[
            LatentSource::new("X'", ["a"]),
            LatentSource::new("Y'", ["e"]),
            LatentSource::new("K", ["a", "e"]),
        ])
        .unwrap();
    let k = expanded.node_index("K").unwrap();
    let xp = expanded.node_index("X'").unwrap();
    assert_eq!(brute_rho(&expanded, &[k]), 3);
    assert_eq!(expanded.capacity_function(&[vec!["K"]]).unwrap()[0].value, 3);
    assert_eq!(expanded.capacity_function(&[vec!["X'"]]).unwrap()[0].value, 1);
    assert_eq!(brute_rho(&expanded, &[xp]), 1);
    assert!(matches!(
        net.expand_with_latent_sources(&[LatentSource::new("a", ["e"])]),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn single_edge_network() {
    let net = Network::new(
        vec!["s".into(), "t".into()],
        vec![("s".into(), "t".into(), 5)],
        IndexMap::from([("X".to_string(), "s".to_string())]),
        vec!["t".into()],
    )
    .unwrap();
    assert_eq!(net.min_cut(&["s"], "t").unwrap().value, 5);
    assert_eq!(net.delayed(7).unwrap().min_cut(&["s"], "t").unwrap().value, 35);
}

#[test]
fn mesh_separation_and_multicast() {
    let net = net_fixture("relay_mesh.json");
    let pmf = pmf_fixture("shared_bit_source.json");
    assert!((pmf.entropy(&["X"]).unwrap() - 2.0).abs() < 1e-12);
    assert!((pmf.entropy(&["X", "Y"]).unwrap() - 3.0).abs() < 1e-12);

    let sep = check_separation(&net, &pmf, ["X", "Y"]).unwrap();
    assert_eq!(sep.verdict, Verdict::Feasible);
    assert_eq!(sep.checks.len(), 3);
    assert!(sep.checks.iter().all(|c| c.slack.abs() < 1e-12));

    let mc = check_multicast(&net, &pmf).unwrap();
    assert!(mc.is_feasible());
    let lhs: Vec<f64> = mc.checks.iter().map(|c| c.lhs).collect();
    assert!((lhs[0] - 1.0).abs() < 1e-12 && (lhs[1] - 1.0).abs() < 1e-12 && (lhs[2] - 3.0).abs() < 1e-12);

    let indep = pmf_fixture("independent_2bit.json");
    let r = check_multicast(&net, &indep).unwrap();
    assert_eq!(r.verdict, Verdict::Infeasible);
    assert!(r.check("H(X|Y) <= rho_G(X)").map(|c| !c.holds).unwrap());
}

#[test]
fn worked_table_separation_on_relay() {
    let net = net_fixture("two_source_relay.json");
    assert_eq!(net.rho_of_vars(&["X"]).unwrap(), 2);
    assert_eq!(net.rho_of_vars(&["Y"]).unwrap(), 2);
    assert_eq!(net.rho_of_vars(&["X", "Y"]).unwrap(), 3);
    let pmf = pmf_fixture("worked_table.json");
    let r = check_separation(&net, &pmf, ["X", "Y"]).unwrap();
    assert!(r.is_feasible());
    let lhs: Vec<f64> = r.checks.iter().map(|c| c.lhs).collect();
    assert!((lhs[0] - 0.636289).abs() < TOL);
    assert!((lhs[1] - 1.040852).abs() < TOL);
    // H(X|K) + H(Y|K) + H(K) exceeds H(X,Y) by I(X;Y|K)
    assert!((lhs[2] - 2.595437).abs() < TOL);
    assert!(lhs[2] > pmf.entropy(&["X", "Y"]).unwrap());
}

#[test]
fn optimality_examples() {
    assert!(check_corollary_optimality(&pmf_fixture("shared_bit_source.json")).unwrap());
    assert!(!check_corollary_optimality(&pmf_fixture("worked_table.json")).unwrap());
    let same = JointPmf::new(
        vec!["X".into(), "Y".into()],
        vec![labels("a", 3), labels("b", 3)],
        (0..3).map(|i| (vec![i, i], 1.0 / 3.0)),
    )
    .unwrap();
    assert!(check_corollary_optimality(&same).unwrap());
    assert!(check_corollary_optimality(&pmf_fixture("bsi_chain.json")).is_err());
}

fn three_source_net(single: u64, joint_extra: u64) -> Network {
    // each source has its own edge to t, plus a shared relay of capacity joint_extra
    let nodes = ["s1", "s2", "s3", "r", "t"].map(String::from).to_vec();
    let mut edges = vec![];
    for s in ["s1", "s2", "s3"] {
        edges.push((s.to_string(), "t".to_string(), single));
        edges.push((s.to_string(), "r".to_string(), joint_extra));
    }
    edges.push(("r".to_string(), "t".to_string(), joint_extra));
    Network::new(
        nodes,
        edges,
        IndexMap::from([
            ("X1".to_string(), "s1".to_string()),
            ("X2".to_string(), "s2".to_string()),
            ("X3".to_string(), "s3".to_string()),
        ]),
        vec!["t".into()],
    )
    .unwrap()
}

#[test]
fn separation_l_examples() {
    let vars = vec!["X1".to_string(), "X2".into(), "X3".into()];
    let identical = JointPmf::new(
        vars.clone(),
        vec![labels("a", 4), labels("a", 4), labels("a", 4)],
        (0..4).map(|i| (vec![i, i, i], 0.25)),
    )
    .unwrap();
    let r = check_separation_l(&three_source_net(0, 2), &identical).unwrap();
    assert!(r.is_feasible());
    assert!((r.checks.last().unwrap().lhs - 2.0).abs() < 1e-12);

    let bits = JointPmf::new(
        vars.clone(),
        vec![labels("b", 2), labels("b", 2), labels("b", 2)],
        (0..8).map(|i| (vec![i & 1, i >> 1 & 1, i >> 2], 0.125)),
    )
    .unwrap();
    let r = check_separation_l(&three_source_net(1, 0), &bits).unwrap();
    assert!(r.is_feasible());
    assert!(r.checks.iter().all(|c| c.slack.abs() < 1e-12));

    // X_j = (A_j, K) with independent fair bits
    let mut cells = Vec::new();
    for i in 0..16usize {
        let (a, b, c, k) = (i & 1, i >> 1 & 1, i >> 2 & 1, i >> 3);
        cells.push((vec![2 * a + k, 2 * b + k, 2 * c + k], 1.0 / 16.0));
    }
    let shared = JointPmf::new(vars, vec![labels("v", 4), labels("v", 4), labels("v", 4)], cells).unwrap();
    assert!((gk_entropy(&decompose(&shared, &["X1", "X2", "X3"]).unwrap()) - 1.0).abs() < 1e-12);
    let r = check_separation_l(&three_source_net(1, 1), &shared).unwrap();
    let lhs: Vec<f64> = r.checks.iter().map(|c| c.lhs).collect();
    assert!(lhs[..3].iter().all(|&h| (h - 1.0).abs() < 1e-12));
    assert!((lhs[3] - 4.0).abs() < 1e-12);
    assert!((r.checks[3].rhs - 4.0).abs() < 1e-12);
    assert!(r.is_feasible());
}

#[test]
fn bsi_examples() {
    let net = net_fixture("bsi_net.json");
    // perfect side information
    let perfect = JointPmf::new(
        vec!["X".into(), "Y1".into(), "Y2".into()],
        vec![labels("x", 3), labels("x", 3), labels("x", 3)],
        (0..3).map(|i| (vec![i, i, i], 1.0 / 3.0)),
    )
    .unwrap();
    let r = check_bsi(&net, &perfect, "X", &["Y1", "Y2"]).unwrap();
    assert!(r.is_feasible() && r.checks.iter().all(|c| c.lhs.abs() < 1e-12));

    // useless side information
    let useless = JointPmf::new(
        vec!["X".into(), "Y1".into(), "Y2".into()],
        vec![labels("x", 4), labels("y", 2), labels("y", 2)],
        (0..16).map(|i| (vec![i & 3, i >> 2 & 1, i >> 3], 1.0 / 16.0)),
    )
    .unwrap();
    let r = check_bsi(&net, &useless, "X", &["Y1", "Y2"]).unwrap();
    assert!(r.checks.iter().all(|c| (c.lhs - 2.0).abs() < 1e-12));
    assert_eq!(r.verdict, Verdict::Infeasible);

    // X two fair bits, Y1 reveals both, Y2 reveals the first: cuts (1, 2)
    let chain = JointPmf::new(
        vec!["X".into(), "Y1".into(), "Y2".into()],
        vec![labels("x", 4), labels("x", 4), labels("b", 2)],
        (0..4).map(|x| (vec![x, x, x >> 1], 0.25)),
    )
    .unwrap();
    let r = check_bsi(&net, &chain, "X", &["Y1", "Y2"]).unwrap();
    assert!((r.checks[0].lhs - 0.0).abs() < 1e-12 && (r.checks[1].lhs - 1.0).abs() < 1e-12);
    assert_eq!((r.checks[0].rhs, r.checks[1].rhs), (1.0, 2.0));
    assert!(r.is_feasible());

    assert!(matches!(check_bsi(&net, &chain, "X", &["Y1"]), Err(Error::Binding(_))));
}

#[test]
fn dmb_plan_examples() {
    let pmf = pmf_fixture("worked_table.json");
    let plan = plan_degraded_messages(&pmf, "X", &["Y"], PlanMode::CommonInformation).unwrap();
    assert_eq!(plan.len(), 1);
    assert!((plan.messages[0].rate - 0.636289).abs() < TOL);

    // Y1 = X, Y2 independent of X
    let extreme = JointPmf::new(
        vec!["X".into(), "Y1".into(), "Y2".into()],
        vec![labels("x", 3), labels("x", 3), labels("z", 2)],
        (0..6).map(|i| (vec![i % 3, i % 3, i / 3], 1.0 / 6.0)),
    )
    .unwrap();
    let plan = plan_degraded_messages(&extreme, "X", &["Y1", "Y2"], PlanMode::CommonInformation).unwrap();
    let h = 3f64.log2();
    assert!(plan.messages[0].rate.abs() < 1e-12 && (plan.messages[1].rate - h).abs() < 1e-12);
    assert!(plan.cumulative[0].abs() < 1e-12 && (plan.cumulative[1] - h).abs() < 1e-12);

    // worked table extended by an erasure channel: cumulative level 2 = H(X|K_2)
    let chain = pmf_fixture("bsi_chain.json");
    let plan = plan_degraded_messages(&chain, "X", &["Y1", "Y2"], PlanMode::CommonInformation).unwrap();
    let t = table_of(&chain);
    let k2 = components(&t, &[0, 2]);
    let k1 = components(&t, &[0, 1]);
    let h_x = entropy(&t, &[0]);
    assert!((plan.cumulative[0] - (h_x - shannon(&k1.weights))).abs() < 1e-9);
    assert!((plan.cumulative[1] - (h_x - shannon(&k2.weights))).abs() < 1e-9);

    let ce = plan_degraded_messages(&chain, "X", &["Y1", "Y2"], PlanMode::ConditionalEntropy).unwrap();
    assert!((ce.cumulative[0] - chain.conditional_entropy(&["X"], &["Y1"]).unwrap()).abs() < 1e-12);
    assert!((ce.cumulative[1] - chain.conditional_entropy(&["X"], &["Y2"]).unwrap()).abs() < 1e-12);

    // not a chain: Y2 = X xor Y1 given independent bits
    let xor = JointPmf::new(
        vec!["X".into(), "Y1".into(), "Y2".into()],
        vec![labels("b", 2), labels("b", 2), labels("b", 2)],
        (0..4).map(|i| (vec![i & 1, i >> 1, (i & 1) ^ (i >> 1)], 0.25)),
    )
    .unwrap();
    assert!(matches!(
        plan_degraded_messages(&xor, "X", &["Y2", "Y1"], PlanMode::CommonInformation),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn dmb_support_examples() {
    let net = net_fixture("bsi_net.json");
    let chain = JointPmf::new(
        vec!["X".into(), "Y1".into(), "Y2".into()],
        vec![labels("x", 4), labels("b", 2), labels("c", 1)],
        (0..4).map(|x| (vec![x, x >> 1, 0], 0.25)),
    )
    .unwrap();
    let plan = plan_degraded_messages(&chain, "X", &["Y1", "Y2"], PlanMode::CommonInformation).unwrap();
    assert!((plan.messages[0].rate - 1.0).abs() < 1e-12 && (plan.messages[1].rate - 1.0).abs() < 1e-12);
    let r = check_dmb_support(&net, &plan, "s", &["t1", "t2"]).unwrap();
    assert_eq!(r.verdict, Verdict::Feasible);

    let single = plan_degraded_messages(&chain, "X", &["Y1"], PlanMode::CommonInformation).unwrap();
    let r = check_dmb_support(&net, &single, "s", &["t1"]).unwrap();
    assert_eq!(r.checks.len(), 1);
    assert!(r.is_feasible());

    // three terminals: never more than the cut conditions
    let nodes = ["s", "t1", "t2", "t3"].map(String::from).to_vec();
    let edges = vec![
        ("s".to_string(), "t1".to_string(), 3),
        ("s".to_string(), "t2".to_string(), 3),
        ("s".to_string(), "t3".to_string(), 3),
    ];
    let wide = Network::new(
        nodes,
        edges,
        IndexMap::from([("X".to_string(), "s".to_string())]),
        vec!["t1".into(), "t2".into(), "t3".into()],
    )
    .unwrap();
    let deep = JointPmf::new(
        vec!["X".into(), "Y1".into(), "Y2".into(), "Y3".into()],
        vec![labels("x", 4), labels("x", 4), labels("b", 2), labels("c", 1)],
        (0..4).map(|x| (vec![x, x, x >> 1, 0], 0.25)),
    )
    .unwrap();
    let plan = plan_degraded_messages(&deep, "X", &["Y1", "Y2", "Y3"], PlanMode::CommonInformation).unwrap();
    let r = check_dmb_support(&wide, &plan, "s", &["t1", "t2", "t3"]).unwrap();
    assert!(r.all_hold());
    assert_eq!(r.verdict, Verdict::CutConditionsHold);
}

#[test]
fn ak_examples() {
    let pmf = pmf_fixture("worked_table.json");
    let h_x = pmf.entropy(&["X"]).unwrap();
    let (s, h) = helper_rates(h_x, 0.636289, 0.918296, 1.0).unwrap();
    assert!((s - 0.636289).abs() < TOL && (h - 0.918296).abs() < TOL);
    let (_, h) = helper_rates(h_x, 0.636289, 0.918296, 1.0 / 3.0).unwrap();
    assert!((h - 1.224395).abs() < TOL);
    assert!((h - commonnet::binary_entropy(1.0 / 3.0).unwrap() - 0.306099).abs() < TOL);

    let net = net_fixture("helper_net.json");
    let r = check_ak(&net, &pmf, "X", "Y", 1001).unwrap();
    assert!(r.is_feasible());
    let wide = Network::new(
        ["sx", "sy", "t"].map(String::from).to_vec(),
        vec![("sx".into(), "t".into(), 2), ("sy".into(), "t".into(), 0)],
        IndexMap::from([("X".to_string(), "sx".to_string()), ("Y".to_string(), "sy".to_string())]),
        vec!["t".into()],
    )
    .unwrap();
    let r = check_ak(&wide, &pmf, "X", "Y", 11).unwrap();
    assert!(r.is_feasible());
    match r.witness {
        Some(commonnet::feasibility::Witness::HelperSweep(s)) => assert_eq!(s.feasible_gamma, Some(0.0)),
        other => panic!("{other:?}"),
    }
    assert!(check_ak(&wide, &pmf, "X", "Y", 1).is_err());
}

#[test]
fn refinement_ranks_follow_symbol_order() {
    let chain = JointPmf::new(
        vec!["X".into(), "Y1".into(), "Y2".into()],
        vec![vec!["a".into(), "b".into()], labels("y", 2), labels("c", 1)],
        [(vec![0, 0, 0], 0.5), (vec![1, 1, 0], 0.5)],
    )
    .unwrap();
    let fine = decompose(&chain, &["X", "Y1"]).unwrap();
    let coarse = decompose(&chain, &["X", "Y2"]).unwrap();
    assert_eq!(refinement_index(&fine, &coarse, "X", "a").unwrap(), (0, 0));
    assert_eq!(refinement_index(&fine, &coarse, "X", "b").unwrap(), (0, 1));
    assert_eq!(refinement_index(&fine, &fine, "X", "b").unwrap().1, 0);
    assert!(check_nesting(&coarse, &fine, "X").unwrap().is_none());
    assert!(matches!(refinement_index(&coarse, &fine, "X", "a"), Err(Error::Structural(_))));
}
