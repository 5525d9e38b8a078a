//! Weighted multigraphs with a marked boundary, and the Kirchhoff / response pipeline.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::Deref;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::LabeledMatrix;
use crate::scalar::{Rational, Scalar, Weight};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub boundary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: String,
    pub v: String,
    pub weight: Weight,
    /// Optional name; transforms pass it on to the edge that takes over the same role.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Edge {
    pub fn new(u: impl Into<String>, v: impl Into<String>, w: impl Into<Weight>) -> Self {
        Edge { u: u.into(), v: v.into(), weight: w.into(), label: None }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn joins(&self, a: &str, b: &str) -> bool {
        (self.u == a && self.v == b) || (self.u == b && self.v == a)
    }

    pub fn touches(&self, x: &str) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint other than `x`.
    pub fn other(&self, x: &str) -> &str {
        if self.u == x {
            &self.v
        } else {
            &self.u
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Network {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub boundary_order: Vec<String>,
}

impl Network {
    /// Builds and validates a network; `boundary_order` lists the boundary vertices circularly.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, boundary_order: Vec<String>) -> Result<Self> {
        let net = Network { vertices, edges, boundary_order };
        net.validate()?;
        Ok(net)
    }

    /// Convenience constructor: boundary ids in circular order, then interior ids.
    pub fn from_parts(boundary: &[&str], interior: &[&str], edges: Vec<Edge>) -> Result<Self> {
        let vertices = boundary
            .iter()
            .map(|b| Vertex { id: b.to_string(), boundary: true })
            .chain(interior.iter().map(|i| Vertex { id: i.to_string(), boundary: false }))
            .collect();
        Self::new(vertices, edges, boundary.iter().map(|s| s.to_string()).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::InvalidNetwork("no vertices".into()));
        }
        let mut seen = HashMap::new();
        for v in &self.vertices {
            if seen.insert(v.id.as_str(), v.boundary).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate vertex {}", v.id)));
            }
        }
        for e in &self.edges {
            for x in [&e.u, &e.v] {
                if !seen.contains_key(x.as_str()) {
                    return Err(Error::UnknownVertex(x.clone()));
                }
            }
            if e.weight.value().is_zero() {
                return Err(Error::ZeroWeight(format!("edge {}-{}", e.u, e.v)));
            }
        }
        let nb = self.vertices.iter().filter(|v| v.boundary).count();
        let mut in_order = HashSet::new();
        for b in &self.boundary_order {
            match seen.get(b.as_str()) {
                Some(true) => {}
                Some(false) => {
                    return Err(Error::InvalidNetwork(format!("{b} in boundary_order is interior")))
                }
                None => return Err(Error::UnknownVertex(b.clone())),
            }
            if !in_order.insert(b.as_str()) {
                return Err(Error::InvalidNetwork(format!("{b} repeated in boundary_order")));
            }
        }
        if in_order.len() != nb {
            return Err(Error::InvalidNetwork("boundary_order must list every boundary vertex".into()));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let net: Network = serde_json::from_str(s)?;
        net.validate()?;
        Ok(net)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn has_vertex(&self, id: &str) -> bool {
        self.vertex(id).is_some()
    }

    pub fn is_boundary(&self, id: &str) -> bool {
        self.vertex(id).is_some_and(|v| v.boundary)
    }

    pub fn boundary(&self) -> &[String] {
        &self.boundary_order
    }

    pub fn interior(&self) -> Vec<String> {
        self.vertices
            .iter()
            .filter(|v| !v.boundary)
            .map(|v| v.id.clone())
            .collect()
    }

    /// Indices of edges incident to `x`, loops included once.
    pub fn incident(&self, x: &str) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].touches(x)).collect()
    }

    /// Number of non-loop edge ends at `x`.
    pub fn degree(&self, x: &str) -> usize {
        self.edges.iter().filter(|e| e.touches(x) && !e.is_loop()).count()
    }

    pub fn edges_between(&self, a: &str, b: &str) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].joins(a, b)).collect()
    }

    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.label.as_deref() == Some(label))
    }

    pub fn all_positive(&self) -> bool {
        self.edges.iter().all(|e| e.weight.is_positive())
    }

    /// A vertex id not used yet, derived from `stem`.
    pub fn fresh_id(&self, stem: &str) -> String {
        if !self.has_vertex(stem) {
            return stem.to_string();
        }
        (1..)
            .map(|k| format!("{stem}~{k}"))
            .find(|c| !self.has_vertex(c))
            .expect("unbounded search")
    }

    /// Removes a vertex and every incident edge.
    pub(crate) fn drop_vertex(&mut self, x: &str) {
        self.vertices.retain(|v| v.id != x);
        self.edges.retain(|e| !e.touches(x));
        self.boundary_order.retain(|b| b != x);
    }

    /// Edge multiset keyed by unordered endpoints, for structural comparisons.
    pub fn edge_multiset(&self) -> BTreeMap<(String, String), Vec<Weight>> {
        let mut m: BTreeMap<(String, String), Vec<Weight>> = BTreeMap::new();
        for e in &self.edges {
            let key = if e.u <= e.v {
                (e.u.clone(), e.v.clone())
            } else {
                (e.v.clone(), e.u.clone())
            };
            m.entry(key).or_default().push(e.weight.clone());
        }
        for ws in m.values_mut() {
            ws.sort();
        }
        m
    }
}

/// Symmetric matrix indexed by vertex ids.
pub type SymmetricMatrix = LabeledMatrix<Rational>;

/// Response matrix on the boundary, `K / K_II`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ResponseMatrix<T: Scalar = Rational>(pub LabeledMatrix<T>);

impl<T: Scalar> Deref for ResponseMatrix<T> {
    type Target = LabeledMatrix<T>;
    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl<T: Scalar> ResponseMatrix<T> {
    pub fn into_inner(self) -> LabeledMatrix<T> {
        self.0
    }
}

impl ResponseMatrix<Rational> {
    /// Symmetry, zero row sums, and the sign pattern of positive networks.
    pub fn check_invariants(&self, positive: bool) -> bool {
        let n = self.n();
        if !self.is_symmetric() {
            return false;
        }
        if (0..n).any(|i| !self.row_sum(i).is_zero()) {
            return false;
        }
        if positive {
            for i in 0..n {
                for j in 0..n {
                    let v = self.at(i, j);
                    if (i == j && v.is_positive()) || (i != j && v.is_negative()) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Vertex order used for the Kirchhoff matrix: boundary in circular order, then interior.
fn kirchhoff_labels(net: &Network) -> Vec<String> {
    let mut labels = net.boundary_order.clone();
    labels.extend(net.interior());
    labels
}

pub fn kirchhoff_matrix(net: &Network) -> SymmetricMatrix {
    kirchhoff_as::<Rational>(net)
}

/// Kirchhoff matrix in any scalar type; loops contribute nothing.
pub fn kirchhoff_as<T: Scalar>(net: &Network) -> LabeledMatrix<T> {
    let labels = kirchhoff_labels(net);
    let mut k = LabeledMatrix::<T>::zeros(labels).expect("vertex ids are unique");
    for e in &net.edges {
        if e.is_loop() {
            continue;
        }
        let (i, j) = (k.position(&e.u).unwrap(), k.position(&e.v).unwrap());
        let w = T::from_rational(e.weight.value());
        k.add_at(i, j, w.clone());
        k.add_at(j, i, w.clone());
        k.add_at(i, i, -w.clone());
        k.add_at(j, j, -w);
    }
    k
}

pub fn schur_complement(m: &SymmetricMatrix, interior: &[String]) -> Result<SymmetricMatrix> {
    m.schur_complement(interior)
}

/// Interior components that reach no boundary vertex.
fn stranded_components(net: &Network) -> Vec<Vec<String>> {
    let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
    for e in &net.edges {
        if !e.is_loop() {
            adj.entry(&e.u).or_default().push(&e.v);
            adj.entry(&e.v).or_default().push(&e.u);
        }
    }
    let mut seen: HashSet<&str> = HashSet::new();
    let mut stack: Vec<&str> = net.boundary_order.iter().map(String::as_str).collect();
    seen.extend(stack.iter().copied());
    while let Some(x) = stack.pop() {
        for &y in adj.get(x).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    let mut out = Vec::new();
    for v in &net.vertices {
        if seen.contains(v.id.as_str()) {
            continue;
        }
        let mut comp = vec![v.id.clone()];
        let mut st = vec![v.id.as_str()];
        seen.insert(&v.id);
        while let Some(x) = st.pop() {
            for &y in adj.get(x).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(y) {
                    comp.push(y.to_string());
                    st.push(y);
                }
            }
        }
        out.push(comp);
    }
    out
}

pub fn response_matrix(net: &Network) -> Result<ResponseMatrix> {
    response_matrix_as::<Rational>(net)
}

/// Response matrix computed in the given scalar type (use `f64` only for large truncations).
pub fn response_matrix_as<T: Scalar>(net: &Network) -> Result<ResponseMatrix<T>> {
    if let Some(c) = stranded_components(net).into_iter().next() {
        return Err(Error::DisconnectedInterior(c));
    }
    let k = kirchhoff_as::<T>(net);
    Ok(ResponseMatrix(k.schur_complement(&net.interior())?))
}

/// Connected network on `boundary` boundary vertices "1", "2", ... and `interior` vertices
/// "v1", "v2", ..., with `extra` edges beyond a random spanning tree. Extra edges may repeat
/// pairs or be loops. Weights are `p/q` with `1 <= p <= max_num`, `1 <= q <= max_den`.
pub fn random_network(
    rng: &mut impl rand::Rng,
    boundary: usize,
    interior: usize,
    extra: usize,
    max_num: i64,
    max_den: i64,
) -> Network {
    let ids: Vec<String> = (1..=boundary).map(|i| i.to_string()).chain((1..=interior).map(|i| format!("v{i}"))).collect();
    fn weight(rng: &mut impl rand::Rng, max_num: i64, max_den: i64) -> Weight {
        Weight(crate::scalar::rat(rng.gen_range(1..=max_num), rng.gen_range(1..=max_den)))
    }
    let mut order: Vec<usize> = (0..ids.len()).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), rng);
    let mut edges = Vec::new();
    for t in 1..order.len() {
        let u = order[rng.gen_range(0..t)];
        edges.push(Edge { u: ids[u].clone(), v: ids[order[t]].clone(), weight: weight(rng, max_num, max_den), label: None });
    }
    for _ in 0..extra {
        let (u, v) = (rng.gen_range(0..ids.len()), rng.gen_range(0..ids.len()));
        edges.push(Edge { u: ids[u].clone(), v: ids[v].clone(), weight: weight(rng, max_num, max_den), label: None });
    }
    let vertices = ids.iter().enumerate().map(|(i, id)| Vertex { id: id.clone(), boundary: i < boundary }).collect();
    Network { vertices, edges, boundary_order: ids[..boundary].to_vec() }
}

/// Re-marks `vs` as interior and drops them from the boundary order.
pub fn interiorize(net: &Network, vs: &[String]) -> Result<Network> {
    let mut out = net.clone();
    for v in vs {
        let vert = out
            .vertices
            .iter_mut()
            .find(|x| &x.id == v)
            .ok_or_else(|| Error::UnknownVertex(v.clone()))?;
        vert.boundary = false;
        out.boundary_order.retain(|b| b != v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn triangle(w12: i64, w13: i64, w23: i64) -> Network {
        Network::from_parts(
            &["1", "2", "3"],
            &[],
            vec![Edge::new("1", "2", w12), Edge::new("1", "3", w13), Edge::new("2", "3", w23)],
        )
        .unwrap()
    }

    #[test]
    fn kirchhoff_single_edge() {
        let net = Network::from_parts(&["1", "2"], &[], vec![Edge::new("1", "2", 5)]).unwrap();
        let k = kirchhoff_matrix(&net);
        assert_eq!(k.get("1", "1"), Some(&int(-5)));
        assert_eq!(k.get("1", "2"), Some(&int(5)));
    }

    #[test]
    fn kirchhoff_path_and_triangle() {
        let net = Network::from_parts(
            &["1", "2"],
            &["m"],
            vec![Edge::new("1", "m", 2), Edge::new("m", "2", 2)],
        )
        .unwrap();
        let k = kirchhoff_matrix(&net);
        assert_eq!(k.get("m", "m"), Some(&int(-4)));
        assert_eq!(k.get("1", "1"), Some(&int(-2)));
        assert_eq!(k.get("1", "2"), Some(&int(0)));
        let t = kirchhoff_matrix(&triangle(1, 2, 3));
        assert_eq!(t.get("1", "1"), Some(&int(-3)));
        assert_eq!(t.get("2", "2"), Some(&int(-4)));
        assert_eq!(t.get("3", "3"), Some(&int(-5)));
        assert_eq!(t.get("2", "3"), Some(&int(3)));
    }

    #[test]
    fn loops_are_invisible() {
        let mut net = triangle(1, 1, 1);
        net.edges.push(Edge::new("1", "1", 7));
        assert_eq!(kirchhoff_matrix(&net), kirchhoff_matrix(&triangle(1, 1, 1)));
    }

    #[test]
    fn star_response() {
        let net = Network::from_parts(
            &["1", "2", "3"],
            &["c"],
            vec![Edge::new("c", "1", 3), Edge::new("c", "2", 3), Edge::new("c", "3", 3)],
        )
        .unwrap();
        let l = response_matrix(&net).unwrap();
        assert_eq!(l.get("1", "2"), Some(&int(1)));
        assert_eq!(l.get("3", "3"), Some(&int(-2)));
        assert!(l.check_invariants(true));
    }

    #[test]
    fn parallel_edges_add() {
        let net = Network::from_parts(
            &["1", "2"],
            &[],
            vec![Edge::new("1", "2", 1), Edge::new("1", "2", 2)],
        )
        .unwrap();
        let l = response_matrix(&net).unwrap();
        assert_eq!(l.get("1", "2"), Some(&int(3)));
        assert_eq!(l.get("2", "2"), Some(&int(-3)));
    }

    #[test]
    fn triangle_response_is_kirchhoff() {
        let net = triangle(1, 1, 1);
        let l = response_matrix(&net).unwrap();
        assert_eq!(l.0, kirchhoff_matrix(&net));
    }

    #[test]
    fn interiorize_path() {
        let net = Network::from_parts(
            &["1", "m", "2"],
            &[],
            vec![Edge::new("1", "m", 2), Edge::new("m", "2", 2)],
        )
        .unwrap();
        let same = interiorize(&net, &[]).unwrap();
        assert_eq!(same, net);
        let inner = interiorize(&net, &["m".into()]).unwrap();
        assert_eq!(inner.boundary(), &["1".to_string(), "2".to_string()][..]);
        let l = response_matrix(&inner).unwrap();
        assert_eq!(l.get("1", "2"), Some(&int(1)));
        assert!(matches!(interiorize(&net, &["x".into()]), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn stranded_interior_rejected() {
        let net = Network::from_parts(
            &["1", "2"],
            &["x", "y"],
            vec![Edge::new("1", "2", 1), Edge::new("x", "y", 1)],
        )
        .unwrap();
        assert!(matches!(response_matrix(&net), Err(Error::DisconnectedInterior(_))));
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"vertices":[{"id":"1","boundary":true},{"id":"m","boundary":false},{"id":"2","boundary":true}],
                    "edges":[{"u":"1","v":"m","weight":"6/4"},{"u":"m","v":"2","weight":"2"}],
                    "boundary_order":["1","2"]}"#;
        let net = Network::from_json(s).unwrap();
        assert_eq!(net.edges[0].weight.value(), &rat(3, 2));
        let back = Network::from_json(&net.to_json()).unwrap();
        assert_eq!(back, net);
        assert!(net.to_json().contains("\"3/2\""));
    }

    #[test]
    fn validation_errors() {
        let bad = Network::from_parts(&["1"], &[], vec![Edge::new("1", "9", 1)]);
        assert!(matches!(bad, Err(Error::UnknownVertex(_))));
        let zero = Network::from_parts(&["1", "2"], &[], vec![Edge::new("1", "2", 0)]);
        assert!(matches!(zero, Err(Error::ZeroWeight(_))));
    }
}
