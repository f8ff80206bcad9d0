#![allow(dead_code)]

use wck::graph::Graph;
use wck::weights::WeightSpec;

pub fn graph(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Graph {
    Graph::new(vertices, edges).unwrap()
}

pub fn o2() -> Graph {
    graph(&["v"], &[("e", "v", "v"), ("f", "v", "v")])
}

pub fn g2() -> Graph {
    graph(&["v1", "v2"], &[("l1", "v1", "v1"), ("l2", "v2", "v2"), ("a", "v1", "v2")])
}

pub fn c3() -> Graph {
    cycle(3)
}

pub fn cycle(k: usize) -> Graph {
    let names: Vec<String> = (1..=k).map(|i| format!("v{i}")).collect();
    let edges: Vec<(String, String, String)> = (0..k)
        .map(|i| (format!("e{}", i + 1), names[i].clone(), names[(i + 1) % k].clone()))
        .collect();
    let v: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let e: Vec<(&str, &str, &str)> = edges.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
    graph(&v, &e)
}

/// The alternating weights `(2, 1, 3)` on the 3-cycle.
pub fn c3_alternating(g: &Graph) -> WeightSpec {
    WeightSpec::diagonal(g, 2, 0, &[vec![2.0, 1.0, 3.0]]).unwrap()
}

/// Small graphs without sources or sinks, with a label.
pub fn corpus() -> Vec<(&'static str, Graph)> {
    vec![
        ("O2", o2()),
        ("G2", g2()),
        ("C2", cycle(2)),
        ("C3", c3()),
        ("C4", cycle(4)),
        (
            "C2+parallel",
            graph(&["a", "b"], &[("x", "a", "b"), ("y", "a", "b"), ("z", "b", "a")]),
        ),
        ("O3", graph(&["v"], &[("a", "v", "v"), ("b", "v", "v"), ("c", "v", "v")])),
        (
            "C3+chord",
            graph(
                &["a", "b", "c"],
                &[("x", "a", "b"), ("y", "b", "c"), ("z", "c", "a"), ("w", "a", "c")],
            ),
        ),
        (
            "loop+C2",
            graph(&["a", "b"], &[("l", "a", "a"), ("x", "a", "b"), ("y", "b", "a")]),
        ),
        (
            "chain3",
            graph(
                &["a", "b", "c"],
                &[("la", "a", "a"), ("lb", "b", "b"), ("lc", "c", "c"), ("x", "a", "b"), ("y", "b", "c")],
            ),
        ),
        (
            "fork",
            graph(
                &["a", "b", "c", "d"],
                &[("x", "a", "b"), ("y", "b", "c"), ("w", "b", "a"), ("z", "c", "d"), ("l", "d", "d")],
            ),
        ),
        (
            "two-loops",
            graph(&["a", "b"], &[("la", "a", "a"), ("lb", "b", "b")]),
        ),
        (
            "C5+chord",
            graph(
                &["a", "b", "c", "d", "e"],
                &[
                    ("x1", "a", "b"),
                    ("x2", "b", "c"),
                    ("x3", "c", "d"),
                    ("x4", "d", "e"),
                    ("x5", "e", "a"),
                    ("y", "c", "a"),
                ],
            ),
        ),
        (
            "C2-into-loop",
            graph(
                &["a", "b", "c"],
                &[("x", "a", "b"), ("y", "b", "a"), ("z", "b", "c"), ("l", "c", "c")],
            ),
        ),
    ]
}
