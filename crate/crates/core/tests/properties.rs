mod common;

use std::sync::OnceLock;

use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wck::calkin::{normalize_word, CalkinElement, Evaluator, Letter, Window};
use wck::cycle::{build_cycle, CycleModel};
use wck::findim::{random_block_algebra, FindimConfig, StarAlgebra};
use wck::fock::FockRep;
use wck::graph::{Graph, XiChoice};
use wck::ideals::{
    enumerate_families, family_of_subset, hereditary_saturated, verify_fully_invariant, DEFAULT_MAX_CANDIDATES,
};
use wck::linalg::{random_coeffs, BlockMat, C64};
use wck::tower::{base_generators, Tower, TowerConfig};
use wck::weights::WeightSpec;

fn cfg(stages: usize) -> TowerConfig {
    TowerConfig {
        stages,
        ..Default::default()
    }
}

/// Up to three vertices with random edges; vertices lacking an incoming or
/// outgoing edge get a loop.
fn small_graph(max_edges: usize) -> impl Strategy<Value = Graph> {
    (1usize..=3).prop_flat_map(move |nv| {
        proptest::collection::vec((0..nv, 0..nv), 0..=max_edges).prop_map(move |pairs| {
            let names: Vec<String> = (0..nv).map(|v| format!("v{v}")).collect();
            let mut edges: Vec<(usize, usize)> = pairs;
            for v in 0..nv {
                let has_out = edges.iter().any(|e| e.0 == v);
                let has_in = edges.iter().any(|e| e.1 == v);
                if !has_out || !has_in {
                    edges.push((v, v));
                }
            }
            let labelled: Vec<(String, String, String)> = edges
                .iter()
                .enumerate()
                .map(|(i, (s, r))| (format!("x{i}"), names[*s].clone(), names[*r].clone()))
                .collect();
            let v: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let e: Vec<(&str, &str, &str)> = labelled
                .iter()
                .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
                .collect();
            Graph::new(&v, &e).unwrap()
        })
    })
}

fn chord_graph() -> Graph {
    common::graph(
        &["a", "b", "c"],
        &[("x", "a", "b"), ("y", "b", "c"), ("z", "c", "a"), ("w", "a", "c")],
    )
}

fn letter(ne: usize, nv: usize) -> impl Strategy<Value = Letter> {
    prop_oneof![
        (0..ne).prop_map(Letter::U),
        (0..ne).prop_map(Letter::Ustar),
        Just(Letter::Z),
        (0..nv).prop_map(Letter::P),
    ]
}

fn words(ne: usize, nv: usize) -> impl Strategy<Value = Vec<Letter>> {
    proptest::collection::vec(letter(ne, nv), 0..8)
}

fn close(a: &BlockMat, b: &BlockMat, tol: f64) -> bool {
    a.sub(b).norm() <= tol * b.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normal_form_is_idempotent(w in words(4, 3)) {
        let g = chord_graph();
        if let Some(n) = normalize_word(&g, &w) {
            prop_assert_eq!(normalize_word(&g, &n), Some(n));
        }
    }

    #[test]
    fn adjoint_is_an_involution(a in words(4, 3), b in words(4, 3)) {
        let g = chord_graph();
        let x = CalkinElement::word(&g, &a).add(&CalkinElement::word(&g, &b).scale(C64::new(0.5, -2.0)));
        prop_assert_eq!(x.adjoint().adjoint(), x.clone());
        let y = CalkinElement::word(&g, &b);
        prop_assert_eq!(x.mul(&g, &y).adjoint(), y.adjoint().mul(&g, &x.adjoint()));
    }

    #[test]
    fn format_parse_round_trip(a in words(4, 3), b in words(4, 3), c in -3i32..3) {
        let g = chord_graph();
        let x = CalkinElement::word(&g, &a).add(&CalkinElement::word(&g, &b).scale(C64::new(c as f64, 1.0)));
        let back = CalkinElement::parse(&g, &x.format(&g)).unwrap();
        prop_assert!(back.sub(&x).terms().all(|(_, c)| c.norm() < 1e-12));
    }

    #[test]
    fn walks_round_trip_and_count(g in small_graph(5), k in 0usize..5) {
        let paths = g.paths(k);
        for p in &paths {
            prop_assert_eq!(&g.parse_walk(&g.walk_string(p)).unwrap(), p);
        }
        let a = g.adjacency();
        let n = g.vertex_count();
        let mut pow: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
        for _ in 0..k {
            pow = (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|l| pow[i][l] * a[l][j]).sum()).collect())
                .collect();
        }
        let total: u64 = pow.iter().flatten().sum();
        prop_assert_eq!(paths.len() as u64, total);
    }

    #[test]
    fn block_algebras_are_recovered(dims in proptest::collection::vec(1usize..=3, 1..=3), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = FindimConfig::default();
        let n: usize = dims.iter().sum();
        let gens = random_block_algebra(&dims, &mut rng);
        let a = StarAlgebra::closure_of(&gens, &BlockMat::identity(&[n]), &cfg).unwrap();
        let dec = a.central_decomposition(&mut rng, &cfg).unwrap();
        let mut want = dims.clone();
        want.sort();
        prop_assert_eq!(dec.dim_multiset(), want);
        prop_assert_eq!(a.ideal_lattice(&dec, &cfg).unwrap().len(), 1 << dims.len());
    }
}

fn positive_levels(g: &Graph, p: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    let sizes: Vec<usize> = (1..p).map(|j| g.paths(j).len()).collect();
    sizes
        .into_iter()
        .map(|s| proptest::collection::vec(0.25f64..4.0, s))
        .collect::<Vec<_>>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn diagonal_weights_are_periodic(
        (g, p, levels) in small_graph(3).prop_flat_map(|g| (1usize..=3).prop_flat_map(move |p| {
            let g2 = g.clone();
            positive_levels(&g, p).prop_map(move |l| (g2.clone(), p, l))
        }))
    ) {
        // the period check uses dense blocks per endpoint class
        prop_assume!(g.paths(3 * p + 2).len() <= 4096);
        let w = WeightSpec::diagonal(&g, p, 0, &levels).unwrap();
        prop_assert!(w.check_period(&g, p, 2 * p + 2).exact);
        prop_assert_eq!(p % w.minimal_period(&g), 0);
        let rep = FockRep::new(&g, &w, 6).unwrap();
        let report = rep.verify_relations(4);
        prop_assert!(report.passes(1e-12), "{report:?}");
    }

    #[test]
    fn unweighted_lattice_matches_vertex_sets(g in small_graph(4)) {
        let t = Tower::build(&g, &WeightSpec::unweighted(), &cfg(1)).unwrap();
        let lattice = enumerate_families(&t, 16, DEFAULT_MAX_CANDIDATES).unwrap();
        let mut got = lattice.families();
        let mut want: Vec<_> = hereditary_saturated(&g)
            .iter()
            .map(|s| family_of_subset(&lattice.corner_summands, &s.members))
            .collect();
        got.sort_by_key(|f| f.masks.clone());
        want.sort_by_key(|f| f.masks.clone());
        prop_assert_eq!(got, want);
        for (v, e) in t.embeddings[0].multiplicities.iter().enumerate() {
            for (w, m) in e.iter().enumerate() {
                let count = g.edges().iter().filter(|x| x.rng == v && x.src == w).count();
                prop_assert_eq!(*m, count);
            }
        }
    }
}

fn weighted_cycle() -> &'static (Tower, CycleModel) {
    static CELL: OnceLock<(Tower, CycleModel)> = OnceLock::new();
    CELL.get_or_init(|| {
        let (g, w, m) = build_cycle(3, &[2.0, 1.0, 3.0], 2).unwrap();
        (Tower::build(&g, &w, &cfg(2)).unwrap(), m)
    })
}

fn weighted_g2() -> &'static Tower {
    static CELL: OnceLock<Tower> = OnceLock::new();
    CELL.get_or_init(|| {
        let g = common::g2();
        let w = WeightSpec::diagonal(&g, 2, 0, &[vec![2.0, 1.0, 3.0]]).unwrap();
        Tower::build(&g, &w, &cfg(0)).unwrap()
    })
}

fn random_coords(rng: &mut ChaCha8Rng, n: usize) -> DVector<C64> {
    DVector::from_vec(random_coeffs(rng, n))
}

fn check_edge_maps(t: &Tower, seed: u64) {
    let g = t.graph();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for len in 1..=3 {
        for mu in g.paths(len) {
            let direct = t.pi_direct(&mu, &mu).unwrap();
            let composite = t.pi_path(&mu);
            assert!((&direct - &composite).norm() <= 1e-8 * composite.norm().max(1.0));
            let (from, to) = (&t.corners[mu.rng], &t.corners[mu.src]);
            let a = random_coords(&mut rng, from.dim());
            let b = random_coords(&mut rng, from.dim());
            let ab = from.regular_of(&a) * &b;
            let lhs = &composite * ab;
            let rhs = to.regular_of(&(&composite * &a)) * (&composite * &b);
            assert!((&lhs - &rhs).norm() <= 1e-8 * rhs.norm().max(1.0));
        }
    }
}

#[test]
fn edge_maps_compose_and_multiply() {
    check_edge_maps(&weighted_cycle().0, 1);
    check_edge_maps(weighted_g2(), 2);
    let t = Tower::build(&common::o2(), &WeightSpec::unweighted(), &cfg(1)).unwrap();
    check_edge_maps(&t, 3);
}

#[test]
fn tau_round_trip_and_psi_multiplicative() {
    let t = &weighted_cycle().0;
    proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(16))
        .run(&(0usize..t.stages.len(), any::<u64>()), |(n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = &t.stages[n].algebra;
            let y = a.random_element(&mut rng);
            let back = t.tau(n, &t.tau_inv(n, &y)).unwrap();
            prop_assert!(close(&back, &y, 1e-8));
            if n + 1 < t.stages.len() {
                let map = &t.embeddings[n].map;
                let b = &t.stages[n + 1].algebra;
                let x = a.random_element(&mut rng);
                let lhs = map.apply(a, &x.mul(&y));
                let rhs = map.apply(a, &x).mul(&map.apply(a, &y));
                prop_assert!(close(&lhs, &rhs, 1e-8));
                prop_assert!(close(&map.apply(a, &x.adjoint()), &map.apply(a, &x).adjoint(), 1e-8));
                prop_assert!(close(&map.apply(a, &a.unit), &b.unit, 1e-8));
            }
            Ok(())
        })
        .unwrap();
}

/// Degree-zero words `u_α z^l u_β*` on the weighted 3-cycle.
fn cycle_word() -> impl Strategy<Value = CalkinElement> {
    let (t, _) = weighted_cycle();
    let g = t.graph().clone();
    (0usize..4, any::<prop::sample::Index>(), any::<prop::sample::Index>(), 0usize..3).prop_map(
        move |(len, ia, ib, l)| {
            let paths = g.paths(len);
            let a = ia.get(&paths);
            let same: Vec<_> = paths.iter().filter(|b| b.src == a.src).collect();
            let b = ib.get(&same);
            CalkinElement::product(
                &g,
                &[&CalkinElement::u_path(a), &CalkinElement::z_pow(l), &CalkinElement::u_path_star(b)],
            )
        },
    )
}

#[test]
fn cycle_characters_are_multiplicative() {
    let (t, m) = weighted_cycle();
    let g = t.graph();
    let ev: &Evaluator = &t.ev;
    proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(128))
        .run(&(cycle_word(), cycle_word(), 0usize..6, 0usize..3), |(x, y, n, i)| {
            let xy = x.mul(g, &y);
            let lhs = m.char_phi(ev, &xy, n, i).unwrap();
            let rhs = m.char_phi(ev, &x, n, i).unwrap() * m.char_phi(ev, &y, n, i).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-9 * rhs.norm().max(1.0));
            Ok(())
        })
        .unwrap();
}

#[test]
fn cycle_characters_shift_along_edges() {
    let (t, m) = weighted_cycle();
    let g = t.graph();
    proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(64))
        .run(&(cycle_word(), 0usize..6, 0usize..3, 0usize..3), |(x, n, i, e)| {
            let ue = CalkinElement::u(g, e);
            let sandwich = CalkinElement::product(g, &[&ue.adjoint(), &x, &ue]);
            let lhs = m.char_phi(&t.ev, &sandwich, n, i).unwrap();
            let want = if e == (i + n) % 3 {
                m.char_phi(&t.ev, &x, n + 1, i).unwrap()
            } else {
                C64::new(0.0, 0.0)
            };
            prop_assert!((lhs - want).norm() <= 1e-9 * want.norm().max(1.0));
            Ok(())
        })
        .unwrap();
}

#[test]
fn cycle_corners_commute_on_the_window() {
    let (t, _) = weighted_cycle();
    let gens = base_generators(t.graph(), t.p());
    let win: Window = t.window;
    proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(64))
        .run(&(0..gens.len(), 0..gens.len(), 0usize..3), |(a, b, v)| {
            let e = t.corners[v].projection.clone();
            let g = t.graph();
            let x = t.ev.window(&CalkinElement::product(g, &[&e, &gens[a], &e]), win).unwrap();
            let y = t.ev.window(&CalkinElement::product(g, &[&e, &gens[b], &e]), win).unwrap();
            prop_assert!(x.commutator(&y).norm() <= 1e-9 * x.norm().max(1.0) * y.norm().max(1.0));
            Ok(())
        })
        .unwrap();
}

#[test]
fn reference_path_choice_is_invisible() {
    let graphs = [("O2", common::o2()), ("G2", common::g2()), ("C3+chord", chord_graph())];
    for (name, g) in graphs {
        let summary = |xi: XiChoice| {
            let t = Tower::build(&g, &WeightSpec::unweighted(), &TowerConfig { xi, ..cfg(1) }).unwrap();
            let dims: Vec<usize> = t.stages.iter().map(|s| s.dim()).collect();
            let lattice = enumerate_families(&t, 16, DEFAULT_MAX_CANDIDATES).unwrap();
            (dims, t.bratteli().multiplicity_multisets(), lattice.len())
        };
        assert_eq!(summary(XiChoice::LexMin), summary(XiChoice::LexMax), "{name}");
    }
}

#[test]
fn every_family_is_fully_invariant() {
    let mut towers: Vec<(&str, &Tower)> = vec![("C3 weighted", &weighted_cycle().0), ("G2 weighted", weighted_g2())];
    let built: Vec<(&str, Tower)> = common::corpus()
        .into_iter()
        .take(6)
        .map(|(n, g)| (n, Tower::build(&g, &WeightSpec::unweighted(), &cfg(1)).unwrap()))
        .collect();
    towers.extend(built.iter().map(|(n, t)| (*n, t)));
    for (name, t) in towers {
        let lattice = enumerate_families(t, 16, DEFAULT_MAX_CANDIDATES).unwrap();
        for f in lattice.families() {
            let r = verify_fully_invariant(t, &f, 3).unwrap();
            assert!(r.passes(), "{name} {:?}: {r:?}", f.masks);
        }
    }
}

#[test]
fn decompositions_do_not_depend_on_the_seed() {
    let (g, w, _) = build_cycle(3, &[2.0, 1.0, 3.0], 2).unwrap();
    let summary = |seed: u64| {
        let t = Tower::build(&g, &w, &TowerConfig { seed, ..cfg(1) }).unwrap();
        let dims: Vec<Vec<usize>> = t.corners.iter().map(|c| c.decomposition.dim_multiset()).collect();
        let lattice = enumerate_families(&t, 16, DEFAULT_MAX_CANDIDATES).unwrap();
        (dims, t.bratteli().multiplicity_multisets(), lattice.len())
    };
    let first = summary(0);
    for seed in 1..5 {
        assert_eq!(summary(seed), first, "seed {seed}");
    }
}
