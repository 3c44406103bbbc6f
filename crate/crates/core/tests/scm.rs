mod common;

use causal_blocking::par::Execution;
use causal_blocking::scm::{
    enumerate, enumerate_with, load_model, parse_model, sample, sample_with, true_effect,
    true_effect_with, variance_decomposition, Allocation, DiscreteScm, ScmError, StrataProfile,
};
use causal_blocking::{parse_graph, NodeSet};
use common::{corpus_dir, set};

fn model(graph: &str, body: &str) -> Result<DiscreteScm, ScmError> {
    let doc = format!("graph inline.graph\n{body}");
    parse_model(&doc, |_| Ok(parse_graph(graph)?))
}

fn corpus_model(name: &str) -> DiscreteScm {
    load_model(&corpus_dir().join(name)).unwrap()
}

const XY: &str = "node X\nnode Y\nedge X -> Y\ntreatment X\nresponse Y\n";

/// Joint table by integrating the full latent grid at once: every latent
/// gets `q` midpoints and every assignment multiplies all conditionals.
fn naive_joint(m: &DiscreteScm, intervention: Option<(usize, u8)>, q: usize) -> Vec<f64> {
    let g = m.graph();
    let n = g.len();
    let k = m.latents().len();
    let points: Vec<Vec<f64>> = m
        .latents()
        .iter()
        .map(|l| (0..q).map(|i| l.lower + (l.upper - l.lower) * (i as f64 + 0.5) / q as f64).collect())
        .collect();
    let cells = q.pow(k as u32);
    let mut joint = vec![0.0; 1 << n];
    let mut u = vec![0.0; k];
    for cell in 0..cells {
        let mut c = cell;
        for j in 0..k {
            u[j] = points[j][c % q];
            c /= q;
        }
        for (mask, slot) in joint.iter_mut().enumerate() {
            let values: Vec<u8> = (0..n).map(|v| (mask >> v & 1) as u8).collect();
            let mut p = 1.0;
            for v in 0..n {
                let p1 = match intervention {
                    Some((node, x)) if node == v => x as f64,
                    _ => m.prob_one(v, &values, &u),
                };
                p *= if values[v] == 1 { p1 } else { 1.0 - p1 };
            }
            *slot += p / cells as f64;
        }
    }
    joint
}

#[test]
fn coin_tables() {
    let one = model("node X\nnode Y\ntreatment X\nresponse Y\n", "mech X = 0.5\nmech Y = 0.25").unwrap();
    let t = enumerate(&one, None, 4).unwrap();
    assert_eq!(t.probs().len(), 4);
    for (mask, want) in [(0, 0.375), (1, 0.375), (2, 0.125), (3, 0.125)] {
        assert!((t.prob(mask) - want).abs() < 1e-15);
    }
    let two = model("node X\nnode Y\ntreatment X\nresponse Y\n", "mech X = 0.5\nmech Y = 0.5").unwrap();
    let t = enumerate(&two, None, 2).unwrap();
    assert!(t.probs().iter().all(|&p| (p - 0.25).abs() < 1e-15));
    assert!((t.marginal(0) - 0.5).abs() < 1e-15);
}

#[test]
fn deterministic_and_independent_effects() {
    let copy = model(XY, "mech X = 0.5\nmech Y = X").unwrap();
    assert!((true_effect(&copy).unwrap() - 1.0).abs() < 1e-15);
    let flat = model(XY, "mech X = 0.3\nmech Y = 0.6").unwrap();
    assert!(true_effect(&flat).unwrap().abs() < 1e-15);
}

#[test]
fn drug_models_load_and_sum_to_one() {
    for name in ["drug_bp_as_written.scm", "drug_bp.scm", "three_covariate.scm"] {
        let m = corpus_model(name);
        for q in [2, 3, 8, 32, 64] {
            let t = enumerate(&m, None, q).unwrap();
            assert!((t.total() - 1.0).abs() < 1e-9, "{name} q={q}");
            assert!(t.probs().iter().all(|&p| p >= 0.0));
        }
        let x = m.graph().treatment();
        let t = enumerate(&m, Some((m.graph().treatment_id().as_str(), 1)), 8).unwrap();
        assert!((t.total() - 1.0).abs() < 1e-9);
        assert_eq!(t.sum_where(|mask| mask >> x & 1 == 0), 0.0);
    }
}

#[test]
fn quadrature_refinement_converges() {
    for name in ["drug_bp_as_written.scm", "drug_bp.scm"] {
        let m = corpus_model(name);
        let coarse = enumerate(&m, None, 8).unwrap();
        let fine = enumerate(&m, None, 64).unwrap();
        for v in 0..m.graph().len() {
            assert!((coarse.marginal(v) - fine.marginal(v)).abs() < 1e-3, "{name} {}", m.graph().name(v));
        }
    }
}

#[test]
fn factorized_enumeration_matches_full_grid() {
    for name in ["drug_bp_as_written.scm", "drug_bp.scm", "three_covariate.scm"] {
        let m = corpus_model(name);
        let x = m.graph().treatment();
        let x_name = m.graph().treatment_id().as_str().to_string();
        for (iv, named) in [(None, None), (Some((x, 1u8)), Some((x_name.as_str(), 1u8)))] {
            let want = naive_joint(&m, iv, 5);
            let got = enumerate(&m, named, 5).unwrap();
            for (mask, w) in want.iter().enumerate() {
                assert!((got.prob(mask) - w).abs() < 1e-12, "{name} {mask}");
            }
        }
    }
}

#[test]
fn intervention_equals_conditioning_for_parentless_treatment() {
    let m = corpus_model("three_covariate.scm");
    let g = m.graph();
    let x = g.treatment();
    assert!(g.parents_of(x).is_empty());
    let obs = enumerate(&m, None, 16).unwrap();
    for value in [0u8, 1] {
        let iv = enumerate(&m, Some(("X", value)), 16).unwrap();
        let px = obs.sum_where(|mask| (mask >> x & 1) as u8 == value);
        for mask in 0..obs.probs().len() {
            let want = if (mask >> x & 1) as u8 == value { obs.prob(mask) / px } else { 0.0 };
            assert!((iv.prob(mask) - want).abs() < 1e-9);
        }
    }
}

#[test]
fn enumeration_limits() {
    let names: Vec<String> = (0..25).map(|i| format!("N{i}")).collect();
    let mut doc: String = names.iter().map(|n| format!("node {n}\n")).collect();
    doc.push_str("treatment N0\nresponse N1\n");
    let mechs: String = names.iter().map(|n| format!("mech {n} = 0.5\n")).collect();
    let big = model(&doc, &mechs).unwrap();
    assert!(matches!(enumerate(&big, None, 2), Err(ScmError::TooLarge(_))));
    let small = model(XY, "mech X = 0.5\nmech Y = X").unwrap();
    assert!(enumerate(&small, None, 1).is_err());
    assert!(matches!(enumerate(&small, Some(("Z", 1)), 4), Err(ScmError::UnknownNode(_))));
}

#[test]
fn load_errors() {
    let bi = "node X\nnode Y\nnode A\nedge X -> Y\nedge A -> Y\nbidirected A <-> Y\ntreatment X\nresponse Y\n";
    let cases: &[(&str, &str, &str)] = &[
        (XY, "mech X = Y\nmech Y = 0.5", "non-parent reference"),
        (XY, "mech X = 0.5", "missing mechanism"),
        (XY, "mech X = 0.5\nmech Y = 0.5\nmech Y = 0.4", "duplicate mechanism"),
        (XY, "mech X = 0.5\nmech Y = 0.5\nmech Q = 0.5", "unknown node"),
        (XY, "mech X = 0.5\nmech Y = 0.8 + 0.3 * X", "upper bound"),
        (XY, "mech X = 0.5\nmech Y = (0.5 + ", "syntax"),
        (XY, "mech X = 0.5\nmech Y = 0.5\nfrobnicate", "unknown directive"),
        (XY, "latent U uniform -0.1 0.1\nattach U X Y\nmech X = 0.5 + U\nmech Y = 0.5 + U", "latent without bidirected edge"),
        (bi, "mech X = 0.5\nmech A = 0.5\nmech Y = 0.5", "bidirected edge without latent"),
        (bi, "latent U uniform -0.1 0.1\nattach U A Y\nmech X = 0.5 + U\nmech A = 0.5 + U\nmech Y = 0.5 + U", "unattached latent"),
        (bi, "latent U uniform 0.2 0.1\nattach U A Y\nmech X = 0.5\nmech A = 0.5 + U\nmech Y = 0.5", "empty range"),
        (bi, "latent U uniform -0.2 0.2\nattach U A Y\nmech X = 0.5\nmech A = 0.9 + U\nmech Y = 0.5 + U", "latent bound"),
    ];
    for (graph, body, what) in cases {
        assert!(model(graph, body).is_err(), "{what} accepted");
    }
    assert!(model(bi, "latent U uniform -0.1 0.1\nattach U A Y\nmech X = 0.5\nmech A = 0.5 + U\nmech Y = 0.5 - U").is_ok());
    assert!(matches!(load_model(&corpus_dir().join("missing.scm")), Err(ScmError::Io { .. })));
}

#[test]
fn rounding_outside_bounds_is_clamped() {
    let m = model(XY, "mech X = 1.0000000000001\nmech Y = 0 - 0.0000000000001").unwrap();
    assert_eq!(m.prob_one(0, &[0, 0], &[]), 1.0);
    assert_eq!(m.prob_one(1, &[0, 0], &[]), 0.0);
    assert!(model(XY, "mech X = 1.00000000001\nmech Y = 0.5").is_err());
}

#[test]
fn coin_sample_mean() {
    let m = model("node X\nnode Y\ntreatment X\nresponse Y\n", "mech X = 0.5\nmech Y = 0.5").unwrap();
    for seed in [0, 1, 99] {
        let draws = sample(&m, None, seed, 100_000).unwrap();
        let mean = draws.iter().map(|d| d[0] as f64).sum::<f64>() / 1e5;
        assert!((0.49..=0.51).contains(&mean), "{mean}");
    }
}

#[test]
fn interventions_fix_the_node() {
    let m = corpus_model("drug_bp.scm");
    let drug = m.graph().index_of("Drug").unwrap();
    let draws = sample(&m, Some(("Drug", 1)), 5, 2000).unwrap();
    assert!(draws.iter().all(|d| d[drug] == 1));
    assert!(sample(&m, Some(("Nope", 1)), 5, 10).is_err());
}

#[test]
fn interventional_sample_matches_enumeration() {
    for name in ["drug_bp_as_written.scm", "drug_bp.scm"] {
        let m = corpus_model(name);
        let bp = m.graph().index_of("BloodPressure").unwrap();
        let exact = enumerate(&m, Some(("Drug", 1)), 64).unwrap().marginal(bp);
        let n = 100_000;
        let draws = sample(&m, Some(("Drug", 1)), 17, n).unwrap();
        let mean = draws.iter().map(|d| d[bp] as f64).sum::<f64>() / n as f64;
        let sigma = (exact * (1.0 - exact) / n as f64).sqrt();
        assert!((mean - exact).abs() <= 3.0 * sigma, "{name}: {mean} vs {exact}");
    }
}

#[test]
fn sample_agrees_with_enumeration_on_marginals_and_pairs() {
    let n = 100_000;
    for name in ["drug_bp_as_written.scm", "drug_bp.scm"] {
        let m = corpus_model(name);
        let t = enumerate(&m, None, 64).unwrap();
        let draws = sample(&m, None, 2024, n).unwrap();
        let k = m.graph().len();
        let band = |p: f64| 4.0 * (p * (1.0 - p) / n as f64).sqrt();
        for a in 0..k {
            let p = t.marginal(a);
            let emp = draws.iter().filter(|d| d[a] == 1).count() as f64 / n as f64;
            assert!((emp - p).abs() <= band(p), "{name} {}: {emp} vs {p}", m.graph().name(a));
            for b in a + 1..k {
                let pair = t.pairwise(a, b);
                for va in 0..2u8 {
                    for vb in 0..2u8 {
                        let p = pair[va as usize][vb as usize];
                        let emp = draws.iter().filter(|d| d[a] == va && d[b] == vb).count() as f64 / n as f64;
                        assert!((emp - p).abs() <= band(p), "{name} {a},{b}={va}{vb}: {emp} vs {p}");
                    }
                }
            }
        }
    }
}

#[test]
fn sampling_is_deterministic_and_schedule_free() {
    let m = corpus_model("drug_bp.scm");
    let a = sample_with(&m, None, 3, 5000, Execution::Sequential).unwrap();
    let b = sample_with(&m, None, 3, 5000, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, sample(&m, None, 3, 5000).unwrap());
    assert_ne!(a, sample(&m, None, 4, 5000).unwrap());
    assert_eq!(a[..100], sample(&m, None, 3, 100).unwrap()[..]);
    let e1 = enumerate_with(&m, None, 16, Execution::Sequential).unwrap();
    let e2 = enumerate_with(&m, None, 16, Execution::Parallel).unwrap();
    assert_eq!(e1, e2);
    assert_eq!(
        true_effect_with(&m, 16, Execution::Sequential).unwrap(),
        true_effect_with(&m, 16, Execution::Parallel).unwrap()
    );
}

fn allocation_for(m: &DiscreteScm, blocking: &NodeSet, n: usize) -> Allocation {
    StrataProfile::compute(m, blocking, 32, Execution::default())
        .unwrap()
        .balanced_allocation(n)
}

#[test]
fn within_term_vanishes_for_deterministic_response() {
    let g = "node X\nnode A\nnode Y\nedge X -> Y\nedge A -> Y\ntreatment X\nresponse Y\n";
    let m = model(g, "mech X = 0.5\nmech A = 0.4\nmech Y = A").unwrap();
    let z = set(&["A"]);
    let v = variance_decomposition(&m, &z, &allocation_for(&m, &z, 100)).unwrap();
    assert_eq!(v.within, 0.0);
}

#[test]
fn between_term_tracks_effect_heterogeneity() {
    let g = "node X\nnode A\nnode Y\nedge X -> Y\nedge A -> Y\ntreatment X\nresponse Y\n";
    let m = model(g, "mech X = 0.5\nmech A = 0.4\nmech Y = 0.2 + 0.6 * X * A").unwrap();
    let empty = NodeSet::new();
    let v = variance_decomposition(&m, &empty, &allocation_for(&m, &empty, 100)).unwrap();
    assert!(v.between_crd.abs() < 1e-15);
    let z = set(&["A"]);
    let v = variance_decomposition(&m, &z, &allocation_for(&m, &z, 100)).unwrap();
    // beta(A=1) = 0.6, beta(A=0) = 0, beta = 0.24
    let want = 0.4 * 0.36f64.powi(2) + 0.6 * 0.24f64.powi(2);
    assert!((v.between_crd - want).abs() < 1e-12);
    assert_eq!(v.between_rbd, 0.0);
    assert!(v.crd_total() > v.rbd_total());
}

#[test]
fn decomposition_matches_hand_computation_from_tables() {
    let m = corpus_model("three_covariate.scm");
    let g = m.graph();
    let (a, b, y) = (g.index_of("A").unwrap(), g.index_of("B").unwrap(), g.response());
    let t1 = enumerate(&m, Some(("X", 1)), 32).unwrap();
    let t0 = enumerate(&m, Some(("X", 0)), 32).unwrap();
    let z = set(&["A", "B"]);
    let alloc = allocation_for(&m, &z, 200);
    let v = variance_decomposition(&m, &z, &alloc).unwrap();

    let mut cells = Vec::new();
    for za in 0..2usize {
        for zb in 0..2usize {
            let in_cell = |mask: usize| (mask >> a & 1) == za && (mask >> b & 1) == zb;
            let p1 = t1.sum_where(in_cell);
            let p0 = t0.sum_where(in_cell);
            let m1 = t1.sum_where(|mk| in_cell(mk) && mk >> y & 1 == 1) / p1;
            let m0 = t0.sum_where(|mk| in_cell(mk) && mk >> y & 1 == 1) / p0;
            cells.push((vec![za as u8, zb as u8], (p1 + p0) / 2.0, m1, m0));
        }
    }
    let beta: f64 = cells.iter().map(|c| c.1 * (c.2 - c.3)).sum();
    assert!((beta - true_effect(&m).unwrap()).abs() < 1e-12);
    let mut within = 0.0;
    let mut between = 0.0;
    for (stratum, p, m1, m0) in &cells {
        let n1 = alloc[&(1, stratum.clone())] as f64;
        let n0 = alloc[&(0, stratum.clone())] as f64;
        assert_eq!(n1 as usize, ((200.0 * p / 2.0).floor() as usize).max(1));
        within += p * (m1 * (1.0 - m1) / n1 + m0 * (1.0 - m0) / n0);
        between += p * (m1 - m0 - beta).powi(2);
    }
    assert!((v.within - within).abs() < 1e-12);
    assert!((v.between_crd - between).abs() < 1e-12);
}

#[test]
fn missing_allocation_is_an_error() {
    let m = corpus_model("three_covariate.scm");
    let z = set(&["A"]);
    let mut alloc = allocation_for(&m, &z, 100);
    alloc.insert((1, vec![0]), 0);
    assert!(variance_decomposition(&m, &z, &alloc).is_err());
    alloc.remove(&(1, vec![0]));
    assert!(variance_decomposition(&m, &z, &alloc).is_err());
    assert!(variance_decomposition(&m, &set(&["Y"]), &Allocation::new()).is_err());
}

#[test]
fn crd_total_dominates_rbd_total_on_baselines() {
    for name in ["drug_bp_as_written.scm", "drug_bp.scm"] {
        let m = corpus_model(name);
        for line in ["", "FoodHabits", "FoodHabits,Alcohol", "FoodHabits,Alcohol,Cholesterol", "FoodHabits,Alcohol,Cholesterol,Age"] {
            let z = NodeSet::parse_list(line).unwrap();
            let v = variance_decomposition(&m, &z, &allocation_for(&m, &z, 100)).unwrap();
            assert!(v.crd_total() >= v.rbd_total() - 1e-9, "{name} {z}");
            assert!(v.within > 0.0 && v.between_crd >= 0.0);
        }
    }
}
