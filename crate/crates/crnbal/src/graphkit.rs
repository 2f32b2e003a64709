//! Structural graph algorithms on the graph of complexes: weak components,
//! strong connectivity, spanning-tree enumeration, cycle bases.
//!
//! The spanning-tree enumerator exists as a brute-force oracle against which
//! the cofactor computation is checked; it is capped and never on the main
//! path.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{integer_normalize, RationalMatrix};
use crate::model::MatrixBundle;
use crate::rational::Rational;

/// Default vertex cap for the spanning-tree oracle.
pub const TREE_ORACLE_CAP: usize = 8;

/// One directed edge of the graph of complexes, weighted by its rate constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Reaction index in network input order.
    pub id: usize,
    pub tail: usize,
    pub head: usize,
    pub weight: Rational,
}

/// A weakly connected component: its vertices (sorted global complex
/// indices) and the edges between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub edges: Vec<Edge>,
}

impl Component {
    fn local_index(&self, vertex: usize) -> usize {
        self.vertices.binary_search(&vertex).expect("vertex not in component")
    }
}

/// Partition of the graph of complexes into weakly connected components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    assignment: Vec<usize>,
    components: Vec<Component>,
}

impl ComponentPartition {
    /// Number of connected components.
    pub fn count(&self) -> usize {
        self.components.len()
    }

    /// Component index of each complex.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }
}

/// Extracts (tail, head) pairs from the columns of an incidence matrix.
pub fn incidence_edges(d: &RationalMatrix) -> Vec<(usize, usize)> {
    (0..d.cols())
        .map(|j| {
            let mut tail = None;
            let mut head = None;
            for i in 0..d.rows() {
                let x = &d[(i, j)];
                if x.is_zero() {
                    continue;
                } else if *x == -Rational::one() {
                    tail = Some(i);
                } else if *x == Rational::one() {
                    head = Some(i);
                } else {
                    panic!("incidence entry not in {{-1, 0, 1}}");
                }
            }
            (tail.expect("column without tail"), head.expect("column without head"))
        })
        .collect()
}

/// Weak-connectivity partition of the graph defined by the bundle's
/// incidence matrix, with edge weights taken from the rate matrix.
pub fn connected_components(bundle: &MatrixBundle) -> ComponentPartition {
    let c = bundle.d.rows();
    let endpoints = incidence_edges(&bundle.d);

    // Union-find over vertices.
    let mut parent: Vec<usize> = (0..c).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(t, h) in &endpoints {
        let (rt, rh) = (find(&mut parent, t), find(&mut parent, h));
        if rt != rh {
            parent[rt] = rh;
        }
    }

    let mut root_to_component = std::collections::BTreeMap::new();
    let mut assignment = vec![0usize; c];
    for v in 0..c {
        let root = find(&mut parent, v);
        let next = root_to_component.len();
        let comp = *root_to_component.entry(root).or_insert(next);
        assignment[v] = comp;
    }
    let mut components = vec![Component { vertices: Vec::new(), edges: Vec::new() }; root_to_component.len()];
    for v in 0..c {
        components[assignment[v]].vertices.push(v);
    }
    for (j, &(t, h)) in endpoints.iter().enumerate() {
        components[assignment[t]].edges.push(Edge {
            id: j,
            tail: t,
            head: h,
            weight: bundle.k[(j, t)].clone(),
        });
    }
    ComponentPartition { assignment, components }
}

/// True iff every vertex of the component is reachable from every other
/// along directed edges (Kosaraju's two-pass check on the component).
pub fn is_strongly_connected(component: &Component) -> bool {
    let n = component.vertices.len();
    if n <= 1 {
        return true;
    }
    let mut out = vec![Vec::new(); n];
    let mut rev = vec![Vec::new(); n];
    for e in &component.edges {
        let (t, h) = (component.local_index(e.tail), component.local_index(e.head));
        out[t].push(h);
        rev[h].push(t);
    }
    let reaches_all = |adj: &[Vec<usize>]| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reaches_all(&out) && reaches_all(&rev)
}

/// The spanning-tree oracle refused because the component is too large.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("spanning-tree oracle unavailable: component has {vertices} vertices, cap is {cap}")]
pub struct OracleCapExceeded {
    pub vertices: usize,
    pub cap: usize,
}

/// A spanning tree of one component, directed toward its root, with the
/// product of its edge weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    /// Reaction indices of the tree edges (component size - 1 of them).
    pub edges: Vec<usize>,
    pub root: usize,
    pub weight: Rational,
}

/// Exhaustively enumerates the spanning trees of `component` directed
/// toward `root` (a global complex index), at the default cap.
pub fn spanning_trees_toward(
    component: &Component,
    root: usize,
) -> Result<Vec<SpanningTree>, OracleCapExceeded> {
    spanning_trees_toward_capped(component, root, TREE_ORACLE_CAP)
}

/// Cap-configurable variant of [`spanning_trees_toward`].
///
/// A tree directed toward the root gives every non-root vertex exactly one
/// outgoing tree edge, so the enumeration picks one out-edge per non-root
/// vertex and keeps the choices whose paths all reach the root.
pub fn spanning_trees_toward_capped(
    component: &Component,
    root: usize,
    cap: usize,
) -> Result<Vec<SpanningTree>, OracleCapExceeded> {
    let n = component.vertices.len();
    if n > cap {
        return Err(OracleCapExceeded { vertices: n, cap });
    }
    let root_local = component.local_index(root);
    let mut out_edges = vec![Vec::new(); n];
    for (ei, e) in component.edges.iter().enumerate() {
        out_edges[component.local_index(e.tail)].push(ei);
    }
    let choosers: Vec<usize> = (0..n).filter(|&v| v != root_local).collect();
    let mut trees = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(choosers.len());

    fn recurse(
        component: &Component,
        out_edges: &[Vec<usize>],
        choosers: &[usize],
        root_local: usize,
        chosen: &mut Vec<usize>,
        trees: &mut Vec<SpanningTree>,
        root: usize,
    ) {
        if chosen.len() == choosers.len() {
            // Follow the unique out-edge from every vertex; a tree means
            // every walk ends at the root without revisiting anything.
            let n = out_edges.len();
            let mut next = vec![usize::MAX; n];
            for (pos, &ei) in chosen.iter().enumerate() {
                let e = &component.edges[ei];
                next[choosers[pos]] = component.local_index(e.head);
            }
            for start in 0..n {
                if start == root_local {
                    continue;
                }
                let mut hops = 0;
                let mut v = start;
                while v != root_local {
                    v = next[v];
                    hops += 1;
                    if hops > n {
                        return; // cycle
                    }
                }
            }
            let mut weight = Rational::one();
            let mut edges = Vec::with_capacity(chosen.len());
            for &ei in chosen.iter() {
                weight *= &component.edges[ei].weight;
                edges.push(component.edges[ei].id);
            }
            edges.sort_unstable();
            trees.push(SpanningTree { edges, root, weight });
            return;
        }
        let v = choosers[chosen.len()];
        for &ei in &out_edges[v] {
            chosen.push(ei);
            recurse(component, out_edges, choosers, root_local, chosen, trees, root);
            chosen.pop();
        }
    }
    recurse(component, &out_edges, &choosers, root_local, &mut chosen, &mut trees, root);
    Ok(trees)
}

/// Integer basis of `ker D_bar` from fundamental cycles of a spanning
/// forest; dimension is `r_bar - c + l` and every entry set is coprime.
pub fn cycle_space_basis(d_bar: &RationalMatrix) -> Vec<Vec<BigInt>> {
    let c = d_bar.rows();
    let endpoints = incidence_edges(d_bar);
    let r_bar = endpoints.len();

    // Spanning forest over the undirected support.
    let mut adjacency = vec![Vec::new(); c]; // (neighbor, edge, +1 if traversed tail->head)
    for (j, &(t, h)) in endpoints.iter().enumerate() {
        adjacency[t].push((h, j, 1i8));
        adjacency[h].push((t, j, -1i8));
    }
    let mut in_forest = vec![false; r_bar];
    let mut visited = vec![false; c];
    for start in 0..c {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(w, j, _) in &adjacency[v] {
                if !visited[w] {
                    visited[w] = true;
                    in_forest[j] = true;
                    queue.push_back(w);
                }
            }
        }
    }

    // One fundamental cycle per non-forest edge: the edge itself plus the
    // forest path from its head back to its tail.
    let mut basis = Vec::new();
    for (j, &(tail, head)) in endpoints.iter().enumerate() {
        if in_forest[j] {
            continue;
        }
        let mut sigma = vec![Rational::zero(); r_bar];
        sigma[j] = Rational::one();
        for (edge, dir) in forest_path(&adjacency, &in_forest, head, tail) {
            sigma[edge] = if dir > 0 { Rational::one() } else { -Rational::one() };
        }
        basis.push(integer_normalize(&sigma).expect("cycle vector is nonzero"));
    }
    basis
}

/// BFS path `from -> to` through forest edges, as (edge, direction) steps.
fn forest_path(
    adjacency: &[Vec<(usize, usize, i8)>],
    in_forest: &[bool],
    from: usize,
    to: usize,
) -> Vec<(usize, i8)> {
    if from == to {
        return Vec::new();
    }
    let n = adjacency.len();
    let mut prev: Vec<Option<(usize, usize, i8)>> = vec![None; n];
    let mut visited = vec![false; n];
    visited[from] = true;
    let mut queue = std::collections::VecDeque::from([from]);
    'outer: while let Some(v) = queue.pop_front() {
        for &(w, j, dir) in &adjacency[v] {
            if !in_forest[j] || visited[w] {
                continue;
            }
            visited[w] = true;
            prev[w] = Some((v, j, dir));
            if w == to {
                break 'outer;
            }
            queue.push_back(w);
        }
    }
    let mut path = Vec::new();
    let mut v = to;
    while v != from {
        let (p, j, dir) = prev[v].expect("forest path exists within a component");
        path.push((j, dir));
        v = p;
    }
    path.reverse();
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank;
    use crate::model::{build_matrices, ArithmeticMode, NetworkBuilder};
    use crate::rational::rational_int;

    fn cycle3_bundle(reversible: bool) -> MatrixBundle {
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let c: Vec<usize> =
            ["C1", "C2", "C3"].iter().map(|n| b.complex(&[(n, 1)]).unwrap()).collect();
        let cycle = [(c[0], c[1]), (c[1], c[2]), (c[2], c[0])];
        for (i, &(s, p)) in cycle.iter().enumerate() {
            b.reaction(s, p, rational_int(i as i64 + 1)).unwrap();
            if reversible {
                b.reaction(p, s, rational_int(i as i64 + 4)).unwrap();
            }
        }
        build_matrices(&b.finish().unwrap())
    }

    #[test]
    fn cycle_is_one_component_and_rank_matches() {
        let bundle = cycle3_bundle(true);
        let partition = connected_components(&bundle);
        assert_eq!(partition.count(), 1);
        assert_eq!(rank(&bundle.d), bundle.d.rows() - partition.count());
    }

    #[test]
    fn disjoint_union_has_two_components() {
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let c: Vec<usize> =
            ["C1", "C2", "C3"].iter().map(|n| b.complex(&[(n, 1)]).unwrap()).collect();
        let cycle = [(c[0], c[1]), (c[1], c[2]), (c[2], c[0])];
        for &(s, p) in &cycle {
            b.reaction(s, p, rational_int(1)).unwrap();
            b.reaction(p, s, rational_int(1)).unwrap();
        }
        let a = b.complex(&[("A", 1)]).unwrap();
        let bb = b.complex(&[("B", 1)]).unwrap();
        b.reaction(a, bb, rational_int(2)).unwrap();
        b.reaction(bb, a, rational_int(3)).unwrap();
        let bundle = build_matrices(&b.finish().unwrap());
        let partition = connected_components(&bundle);
        assert_eq!(partition.count(), 2);
        assert_eq!(partition.assignment(), &[0, 0, 0, 1, 1]);
        assert_eq!(rank(&bundle.d), 5 - 2);
    }

    #[test]
    fn one_directional_cycle_is_strongly_connected() {
        let bundle = cycle3_bundle(false);
        let partition = connected_components(&bundle);
        assert!(is_strongly_connected(&partition.components()[0]));
    }

    #[test]
    fn single_irreversible_reaction_is_not_strongly_connected() {
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let a = b.complex(&[("A", 1)]).unwrap();
        let bb = b.complex(&[("B", 1)]).unwrap();
        b.reaction(a, bb, rational_int(1)).unwrap();
        let bundle = build_matrices(&b.finish().unwrap());
        let partition = connected_components(&bundle);
        assert!(!is_strongly_connected(&partition.components()[0]));
    }

    #[test]
    fn reversible_components_are_always_strongly_connected() {
        let bundle = cycle3_bundle(true);
        let partition = connected_components(&bundle);
        assert!(is_strongly_connected(&partition.components()[0]));
    }

    #[test]
    fn cycle3_spanning_trees_match_hand_enumeration() {
        // Reversible cycle with kp = (1, 2, 3), km = (4, 5, 6). Toward C1 the
        // three in-trees have weights k2+ k3+, k1- k3+, k1- k2-.
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let c: Vec<usize> =
            ["C1", "C2", "C3"].iter().map(|n| b.complex(&[(n, 1)]).unwrap()).collect();
        let kp = [1i64, 2, 3];
        let km = [4i64, 5, 6];
        let cycle = [(c[0], c[1]), (c[1], c[2]), (c[2], c[0])];
        for (i, &(s, p)) in cycle.iter().enumerate() {
            b.reaction(s, p, rational_int(kp[i])).unwrap();
            b.reaction(p, s, rational_int(km[i])).unwrap();
        }
        let bundle = build_matrices(&b.finish().unwrap());
        let partition = connected_components(&bundle);
        let trees = spanning_trees_toward(&partition.components()[0], 0).unwrap();
        let mut weights: Vec<Rational> = trees.iter().map(|t| t.weight.clone()).collect();
        weights.sort();
        let mut expected = vec![
            rational_int(2 * 3), // k2+ k3+
            rational_int(4 * 3), // k1- k3+
            rational_int(4 * 5), // k1- k2-
        ];
        expected.sort();
        assert_eq!(weights, expected);
    }

    #[test]
    fn two_vertex_trees() {
        // A <-> B, root A: single tree {B->A} with weight kr.
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let a = b.complex(&[("A", 1)]).unwrap();
        let bb = b.complex(&[("B", 1)]).unwrap();
        b.reaction(a, bb, rational_int(2)).unwrap();
        b.reaction(bb, a, rational_int(3)).unwrap();
        let bundle = build_matrices(&b.finish().unwrap());
        let partition = connected_components(&bundle);
        let comp = &partition.components()[0];
        let trees = spanning_trees_toward(comp, a).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].weight, rational_int(3));
        assert_eq!(trees[0].edges, vec![1]);

        // A -> B, root A: no tree toward A.
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let a = b.complex(&[("A", 1)]).unwrap();
        let bb = b.complex(&[("B", 1)]).unwrap();
        b.reaction(a, bb, rational_int(2)).unwrap();
        let bundle = build_matrices(&b.finish().unwrap());
        let partition = connected_components(&bundle);
        let comp = &partition.components()[0];
        assert!(spanning_trees_toward(comp, a).unwrap().is_empty());
        assert_eq!(spanning_trees_toward(comp, bb).unwrap().len(), 1);
    }

    #[test]
    fn oracle_cap_is_enforced() {
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let verts: Vec<usize> = (0..9)
            .map(|i| b.complex(&[(format!("V{i}").as_str(), 1)]).unwrap())
            .collect();
        for w in verts.windows(2) {
            b.reaction(w[0], w[1], rational_int(1)).unwrap();
        }
        let bundle = build_matrices(&b.finish().unwrap());
        let partition = connected_components(&bundle);
        let comp = &partition.components()[0];
        let err = spanning_trees_toward(comp, 8).unwrap_err();
        assert_eq!(err, OracleCapExceeded { vertices: 9, cap: TREE_ORACLE_CAP });
        assert!(spanning_trees_toward_capped(comp, 8, 9).is_ok());
    }

    #[test]
    fn strong_connectivity_agrees_with_tree_existence() {
        // On every component within the cap: strongly connected iff a
        // spanning tree exists toward every vertex.
        for reversible in [false, true] {
            let bundle = cycle3_bundle(reversible);
            let partition = connected_components(&bundle);
            for comp in partition.components() {
                let all_roots_reachable = comp
                    .vertices
                    .iter()
                    .all(|&v| !spanning_trees_toward(comp, v).unwrap().is_empty());
                assert_eq!(is_strongly_connected(comp), all_roots_reachable);
            }
        }
    }

    fn check_basis(d_bar: &RationalMatrix, expected_dim: usize) -> Vec<Vec<BigInt>> {
        let basis = cycle_space_basis(d_bar);
        assert_eq!(basis.len(), expected_dim);
        for sigma in &basis {
            let v: Vec<Rational> = sigma.iter().cloned().map(Rational::from).collect();
            assert!(d_bar.mul_vec(&v).iter().all(Zero::is_zero));
        }
        basis
    }

    #[test]
    fn cycle_basis_of_triangle() {
        let d_bar = RationalMatrix::from_i64_rows(&[
            vec![-1, 0, 1],
            vec![1, -1, 0],
            vec![0, 1, -1],
        ]);
        let basis = check_basis(&d_bar, 1);
        let ones: Vec<BigInt> = vec![BigInt::from(1); 3];
        assert_eq!(basis[0], ones);
    }

    #[test]
    fn acyclic_graph_has_empty_cycle_basis() {
        let d_bar = RationalMatrix::from_i64_rows(&[vec![-1, 0], vec![1, -1], vec![0, 1]]);
        check_basis(&d_bar, 0);
    }

    #[test]
    fn parallel_edges_form_a_cycle() {
        let d_bar = RationalMatrix::from_i64_rows(&[vec![-1, -1], vec![1, 1]]);
        let basis = check_basis(&d_bar, 1);
        assert_eq!(basis[0], vec![BigInt::from(1), BigInt::from(-1)]);
    }

    #[test]
    fn basis_rank_is_full_on_two_component_graph() {
        // Triangle plus a separate doubled edge: dimension (3+2) - 5 + 2 = 2.
        let d_bar = RationalMatrix::from_i64_rows(&[
            vec![-1, 0, 1, 0, 0],
            vec![1, -1, 0, 0, 0],
            vec![0, 1, -1, 0, 0],
            vec![0, 0, 0, -1, -1],
            vec![0, 0, 0, 1, 1],
        ]);
        let basis = check_basis(&d_bar, 2);
        let rows: Vec<Vec<Rational>> = basis
            .iter()
            .map(|v| v.iter().cloned().map(Rational::from).collect())
            .collect();
        assert_eq!(rank(&RationalMatrix::from_rows(rows)), 2);
    }
}
