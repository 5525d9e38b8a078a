//! Cylindrical networks, their universal cover and its truncations, and cylindrical total nonnegativity.
//!
//! Rim vertices are named `1..n` (left) and `1'..n'` (right). In the cover, the lift of rim
//! vertex `i` to sheet `s` is called `i + s*n` (primed on the right), and the lift of an
//! interior vertex `v` is `v@s`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{det, LabeledMatrix};
use crate::netcore::{response_matrix, response_matrix_as, Edge, Network, ResponseMatrix, Vertex};
use crate::rmatrix::NmWeights;
use crate::scalar::{Rational, Scalar, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylVertex {
    pub id: String,
    #[serde(default)]
    pub side: Option<Side>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylEdge {
    pub u: String,
    pub v: String,
    pub weight: Weight,
    /// Signed number of times the edge wraps the cylinder going from `u` to `v`.
    #[serde(default)]
    pub winding: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylNetwork {
    pub period: usize,
    pub vertices: Vec<CylVertex>,
    pub edges: Vec<CylEdge>,
    /// Number of layers when interior ids follow the `M{j}_{i}` scheme of `N(m)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<usize>,
}

/// A rim label of the cover: `k` on the left or `k'` on the right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RimLabel {
    pub side: Side,
    pub k: i64,
}

impl RimLabel {
    pub fn left(k: i64) -> Self {
        RimLabel { side: Side::Left, k }
    }

    pub fn right(k: i64) -> Self {
        RimLabel { side: Side::Right, k }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let (body, side) = match s.strip_suffix('\'') {
            Some(b) => (b, Side::Right),
            None => (s, Side::Left),
        };
        let k = body
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("not a rim label: {s:?}")))?;
        Ok(RimLabel { side, k })
    }

    pub fn shift(self, d: i64) -> Self {
        RimLabel { k: self.k + d, ..self }
    }

    /// Position in the two-sided order `... < 0 < 1 < ... < 1' < 0' < ...`.
    pub fn key(self) -> (u8, i64) {
        match self.side {
            Side::Left => (0, self.k),
            Side::Right => (1, -self.k),
        }
    }
}

impl std::fmt::Display for RimLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.side {
            Side::Left => write!(f, "{}", self.k),
            Side::Right => write!(f, "{}'", self.k),
        }
    }
}

pub fn left(k: i64) -> String {
    RimLabel::left(k).to_string()
}

pub fn right(k: i64) -> String {
    RimLabel::right(k).to_string()
}

/// Id of the vertex of `N(m)` at depth `j` (0 = left rim, m = right rim) and position `i` in `1..=n`.
pub fn nm_vertex(m: usize, j: usize, i: usize) -> String {
    if j == 0 {
        i.to_string()
    } else if j == m {
        format!("{i}'")
    } else {
        format!("M{j}_{i}")
    }
}

fn parse_layered(id: &str) -> Option<(usize, usize)> {
    let rest = id.strip_prefix('M')?;
    let (j, i) = rest.split_once('_')?;
    Some((j.parse().ok()?, i.parse().ok()?))
}

impl CylNetwork {
    pub fn validate(&self) -> Result<()> {
        let n = self.period;
        if n == 0 {
            return Err(Error::BadDimensions("period must be positive".into()));
        }
        let mut ids = HashMap::new();
        for v in &self.vertices {
            if ids.insert(v.id.as_str(), v.side).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate vertex {}", v.id)));
            }
            if let Some(side) = v.side {
                let r = RimLabel::parse(&v.id)?;
                if r.side != side || r.k < 1 || r.k > n as i64 {
                    return Err(Error::InvalidNetwork(format!("rim vertex {} out of range", v.id)));
                }
            }
        }
        for i in 1..=n as i64 {
            if ids.get(left(i).as_str()) != Some(&Some(Side::Left))
                || ids.get(right(i).as_str()) != Some(&Some(Side::Right))
            {
                return Err(Error::InvalidNetwork(format!("rim vertex {i} or {i}' missing")));
            }
        }
        for e in &self.edges {
            for x in [&e.u, &e.v] {
                if !ids.contains_key(x.as_str()) {
                    return Err(Error::UnknownVertex(x.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: CylNetwork = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cylinder network serializes")
    }

    fn side_of(&self, id: &str) -> Option<Side> {
        self.vertices.iter().find(|v| v.id == id).and_then(|v| v.side)
    }

    /// Name of the lift of base vertex `id` to sheet `s`.
    pub fn lift(&self, id: &str, s: i64) -> String {
        match self.side_of(id) {
            Some(side) => {
                let r = RimLabel::parse(id).expect("validated rim id");
                RimLabel { side, k: r.k + s * self.period as i64 }.to_string()
            }
            None => format!("{id}@{s}"),
        }
    }

    pub fn all_positive(&self) -> bool {
        self.edges.iter().all(|e| e.weight.is_positive())
    }
}

/// The cylindrical network `N(m)` with the given layer weights.
pub fn make_nm(w: &NmWeights) -> Result<CylNetwork> {
    let (n, m) = (w.n, w.m);
    if n == 0 || m == 0 || w.layers.len() != m || w.layers.iter().any(|l| l.high.len() != n || l.low.len() != n) {
        return Err(Error::BadDimensions(format!("N(m) needs n, m >= 1 and m layers of n weights (n={n}, m={m})")));
    }
    let mut vertices = Vec::with_capacity(n * (m + 1));
    for j in 0..=m {
        for i in 1..=n {
            let side = match j {
                0 => Some(Side::Left),
                _ if j == m => Some(Side::Right),
                _ => None,
            };
            vertices.push(CylVertex { id: nm_vertex(m, j, i), side });
        }
    }
    // keep rims first so that the compact network lists boundary vertices up front
    vertices.sort_by_key(|v| match v.side {
        Some(Side::Left) => 0,
        None => 1,
        Some(Side::Right) => 2,
    });
    let mut edges = Vec::with_capacity(2 * n * m);
    for (j, layer) in w.layers.iter().enumerate() {
        for i in 1..=n {
            let prev = if i == 1 { n } else { i - 1 };
            edges.push(CylEdge {
                u: nm_vertex(m, j, i),
                v: nm_vertex(m, j + 1, i),
                weight: Weight(layer.low[i - 1].clone()),
                winding: 0,
                label: Some(format!("l{}_{}", j + 1, i)),
            });
            edges.push(CylEdge {
                u: nm_vertex(m, j, i),
                v: nm_vertex(m, j + 1, prev),
                weight: Weight(layer.high[i - 1].clone()),
                winding: if i == 1 { -1 } else { 0 },
                label: Some(format!("h{}_{}", j + 1, i)),
            });
        }
    }
    let c = CylNetwork { period: n, vertices, edges, layers: Some(m) };
    c.validate()?;
    Ok(c)
}

#[derive(Clone, Debug)]
pub struct Truncation {
    pub radius: usize,
    pub net: Network,
    /// (base vertex, sheet) -> vertex id in `net`.
    pub lift_map: BTreeMap<(String, i64), String>,
}

impl Truncation {
    /// Rim labels of the truncation whose every neighbour in the cover lies in `V_N`.
    pub fn settled_rim(&self, cyl: &CylNetwork) -> Vec<String> {
        let n = self.radius as i64;
        let inside = |s: i64| (-n..=n).contains(&s);
        let mut ok: BTreeMap<String, bool> = BTreeMap::new();
        for e in &cyl.edges {
            for s in -n - e.winding.abs() - 1..=n + e.winding.abs() + 1 {
                let (a, b) = ((e.u.as_str(), s), (e.v.as_str(), s + e.winding));
                for (x, y) in [(a, b), (b, a)] {
                    if cyl.side_of(x.0).is_some() {
                        let good = inside(y.1) && inside(x.1);
                        let lab = cyl.lift(x.0, x.1);
                        let entry = ok.entry(lab).or_insert(true);
                        *entry &= good;
                    }
                }
            }
        }
        self.net
            .boundary()
            .iter()
            .filter(|b| ok.get(*b).copied().unwrap_or(false))
            .cloned()
            .collect()
    }
}

/// The finite network `G(N)` on sheets `-N..=N`.
pub fn truncate(cyl: &CylNetwork, radius: usize) -> Result<Truncation> {
    cyl.validate()?;
    let big = radius as i64;
    let inside = |s: i64| (-big..=big).contains(&s);
    let mut present: BTreeSet<(usize, i64)> = BTreeSet::new();
    let pos: HashMap<&str, usize> = cyl.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
    let mut edges = Vec::new();
    for e in &cyl.edges {
        let w = e.winding;
        for s in -big - w.abs()..=big + w.abs() {
            let t = s + w;
            if !(inside(s) || inside(t)) {
                continue;
            }
            present.insert((pos[e.u.as_str()], s));
            present.insert((pos[e.v.as_str()], t));
            edges.push(Edge { u: cyl.lift(&e.u, s), v: cyl.lift(&e.v, t), weight: e.weight.clone(), label: None });
        }
    }
    let mut lefts = Vec::new();
    let mut rights = Vec::new();
    let mut bottom = Vec::new();
    let mut top = Vec::new();
    let mut vertices = Vec::new();
    let mut lift_map = BTreeMap::new();
    for &(vi, s) in &present {
        let v = &cyl.vertices[vi];
        let id = cyl.lift(&v.id, s);
        lift_map.insert((v.id.clone(), s), id.clone());
        match v.side {
            Some(_) => {
                let r = RimLabel::parse(&id)?;
                if r.side == Side::Left {
                    lefts.push((r.k, id.clone()));
                } else {
                    rights.push((r.k, id.clone()));
                }
                vertices.push(Vertex { id, boundary: true });
            }
            None if inside(s) => vertices.push(Vertex { id, boundary: false }),
            None => {
                if s > big {
                    bottom.push(((vi, s), id.clone()));
                } else {
                    top.push(((vi, s), id.clone()));
                }
                vertices.push(Vertex { id, boundary: true });
            }
        }
    }
    lefts.sort();
    rights.sort_by(|a, b| b.0.cmp(&a.0));
    bottom.sort();
    top.sort_by(|a, b| b.0.cmp(&a.0));
    let order: Vec<String> = lefts
        .into_iter()
        .map(|x| x.1)
        .chain(bottom.into_iter().map(|x| x.1))
        .chain(rights.into_iter().map(|x| x.1))
        .chain(top.into_iter().map(|x| x.1))
        .collect();
    let net = Network::new(vertices, edges, order)?;
    Ok(Truncation { radius, net, lift_map })
}

/// Rim labels `lo..=hi` on both sides, left ones first.
pub fn rim_window(lo: i64, hi: i64) -> Vec<String> {
    (lo..=hi).map(left).chain((lo..=hi).map(right)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct UniversalResponseWindow<T: Scalar> {
    pub window: Vec<String>,
    /// Truncation radii actually evaluated.
    pub schedule: Vec<usize>,
    /// Windowed values at each radius of `schedule`.
    pub history: Vec<LabeledMatrix<T>>,
    /// Last windowed values.
    pub entries: LabeledMatrix<T>,
    /// Difference between the last two steps (zero if only one step ran).
    pub last_increment: LabeledMatrix<T>,
    pub converged: Vec<Vec<bool>>,
    /// Off-diagonal pairs whose value decreased between consecutive steps.
    pub monotone_violations: Vec<(String, String, usize)>,
    /// |L(i,j) - L(i+n,j+n)| for pairs whose shift stays in the window.
    pub periodicity_residuals: Vec<(String, String, f64)>,
    pub stopped_early: bool,
}

impl<T: Scalar> UniversalResponseWindow<T> {
    pub fn max_increment(&self) -> f64 {
        let n = self.last_increment.n();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.last_increment.at(i, j).approx().abs())
            .fold(0.0, f64::max)
    }

    pub fn max_periodicity_residual(&self) -> f64 {
        self.periodicity_residuals.iter().map(|r| r.2).fold(0.0, f64::max)
    }

    pub fn value(&self, a: &str, b: &str) -> Result<&T> {
        self.entries.entry(a, b)
    }
}

/// Windowed response of one truncation.
pub fn truncation_window<T: Scalar>(cyl: &CylNetwork, radius: usize, window: &[String]) -> Result<LabeledMatrix<T>> {
    let t = truncate(cyl, radius)?;
    let l = response_matrix_as::<T>(&t.net)?;
    for w in window {
        if !l.contains(w) {
            return Err(Error::WindowTooSmall(format!("{w} is not a boundary vertex of G({radius})")));
        }
    }
    l.restrict(window)
}

/// Universal response entries on `window`, approximated along `schedule`.
///
/// Truncations are evaluated in parallel; the result is the same as a sequential run that
/// stops after two consecutive steps with every increment below `tol`.
pub fn universal_response<T: Scalar>(
    cyl: &CylNetwork,
    window: &[String],
    schedule: &[usize],
    tol: Option<f64>,
) -> Result<UniversalResponseWindow<T>> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadDimensions("schedule must be nonempty and strictly increasing".into()));
    }
    let all: Vec<LabeledMatrix<T>> = schedule
        .par_iter()
        .map(|&r| truncation_window::<T>(cyl, r, window))
        .collect::<Result<_>>()?;
    let k = window.len();
    let diff = |a: &LabeledMatrix<T>, b: &LabeledMatrix<T>| -> LabeledMatrix<T> {
        let data = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .map(|(i, j)| b.at(i, j).clone() - a.at(i, j).clone())
            .collect();
        LabeledMatrix::from_data(window.to_vec(), data).expect("window labels are unique")
    };
    let small = |d: &LabeledMatrix<T>, t: f64| (0..k).all(|i| (0..k).all(|j| d.at(i, j).approx().abs() < t));
    let mut used = all.len();
    let mut stopped_early = false;
    if let Some(t) = tol {
        let mut streak = 0;
        for s in 1..all.len() {
            if small(&diff(&all[s - 1], &all[s]), t) {
                streak += 1;
                if streak >= 2 {
                    used = s + 1;
                    stopped_early = used < all.len();
                    break;
                }
            } else {
                streak = 0;
            }
        }
    }
    let history: Vec<LabeledMatrix<T>> = all.into_iter().take(used).collect();
    let entries = history.last().unwrap().clone();
    let last_increment = if history.len() >= 2 {
        diff(&history[history.len() - 2], &entries)
    } else {
        LabeledMatrix::zeros(window.to_vec())?
    };
    let converged = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| history.len() >= 2 && tol.is_some_and(|t| last_increment.at(i, j).approx().abs() < t))
                .collect()
        })
        .collect();
    let mut monotone_violations = Vec::new();
    for s in 1..history.len() {
        let d = diff(&history[s - 1], &history[s]);
        for i in 0..k {
            for j in 0..k {
                let v = d.at(i, j).approx();
                let neg = if T::EXACT { v < 0.0 } else { v < -1e-12 * (1.0 + history[s].at(i, j).approx().abs()) };
                if i != j && neg {
                    monotone_violations.push((window[i].clone(), window[j].clone(), schedule[s]));
                }
            }
        }
    }
    let n = cyl.period as i64;
    let mut periodicity_residuals = Vec::new();
    for a in window {
        for b in window {
            let (Ok(ra), Ok(rb)) = (RimLabel::parse(a), RimLabel::parse(b)) else { continue };
            let (sa, sb) = (ra.shift(n).to_string(), rb.shift(n).to_string());
            if let (Some(x), Some(y)) = (entries.get(a, b), entries.get(&sa, &sb)) {
                periodicity_residuals.push((a.clone(), b.clone(), (x.clone() - y.clone()).approx().abs()));
            }
        }
    }
    Ok(UniversalResponseWindow {
        window: window.to_vec(),
        schedule: schedule[..used].to_vec(),
        history,
        entries,
        last_increment,
        converged,
        monotone_violations,
        periodicity_residuals,
        stopped_early,
    })
}

/// The `m`-fold cyclic cover, a cylindrical network of period `m*n`.
pub fn finite_cover(cyl: &CylNetwork, m: usize) -> Result<CylNetwork> {
    if m == 0 {
        return Err(Error::BadDimensions("cover degree must be positive".into()));
    }
    let n = cyl.period;
    let mi = m as i64;
    let name = |id: &str, t: usize| -> String {
        if let Ok(r) = RimLabel::parse(id) {
            if cyl.side_of(id).is_some() {
                return r.shift((t * n) as i64).to_string();
            }
        }
        match (cyl.layers, parse_layered(id)) {
            (Some(_), Some((j, i))) => format!("M{j}_{}", i + t * n),
            _ => format!("{id}#{t}"),
        }
    };
    let mut vertices = Vec::new();
    for t in 0..m {
        for v in &cyl.vertices {
            vertices.push(CylVertex { id: name(&v.id, t), side: v.side });
        }
    }
    vertices.sort_by_key(|v| match v.side {
        Some(Side::Left) => 0,
        None => 1,
        Some(Side::Right) => 2,
    });
    let mut edges = Vec::new();
    for t in 0..m {
        for e in &cyl.edges {
            let target = t as i64 + e.winding;
            edges.push(CylEdge {
                u: name(&e.u, t),
                v: name(&e.v, target.rem_euclid(mi) as usize),
                weight: e.weight.clone(),
                winding: target.div_euclid(mi),
                label: e.label.as_ref().map(|l| match (cyl.layers, l.split_at(1)) {
                    (Some(_), (kind, rest)) if parse_layered(&format!("M{rest}")).is_some() => {
                        let (j, i) = parse_layered(&format!("M{rest}")).unwrap();
                        format!("{kind}{j}_{}", i + t * n)
                    }
                    _ => l.clone(),
                }),
            });
        }
    }
    let c = CylNetwork { period: n * m, vertices, edges, layers: cyl.layers };
    c.validate()?;
    Ok(c)
}

/// The compact network obtained by forgetting windings; rims are the boundary.
pub fn compact_network(cyl: &CylNetwork) -> Result<Network> {
    cyl.validate()?;
    let n = cyl.period as i64;
    let vertices = cyl
        .vertices
        .iter()
        .map(|v| Vertex { id: v.id.clone(), boundary: v.side.is_some() })
        .collect();
    let edges = cyl
        .edges
        .iter()
        .map(|e| Edge { u: e.u.clone(), v: e.v.clone(), weight: e.weight.clone(), label: e.label.clone() })
        .collect();
    let order = (1..=n).map(left).chain((1..=n).rev().map(right)).collect();
    Network::new(vertices, edges, order)
}

pub fn cylinder_response(cyl: &CylNetwork) -> Result<ResponseMatrix> {
    response_matrix(&compact_network(cyl)?)
}

/// Glues the right rim of `left` to the left rim of `right`; the glued vertices become interior.
pub fn concatenate(left_net: &CylNetwork, right_net: &CylNetwork) -> Result<CylNetwork> {
    left_net.validate()?;
    right_net.validate()?;
    if left_net.period != right_net.period {
        return Err(Error::PeriodMismatch(left_net.period, right_net.period));
    }
    let n = left_net.period;
    let layered = match (left_net.layers, right_net.layers) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    };
    let glued = |i: i64| match layered {
        Some((a, _)) => format!("M{a}_{i}"),
        None => format!("J{i}"),
    };
    let lname = |id: &str| -> String {
        match left_net.side_of(id) {
            Some(Side::Right) => glued(RimLabel::parse(id).unwrap().k),
            Some(Side::Left) => id.to_string(),
            None if layered.is_some() => id.to_string(),
            None => format!("L:{id}"),
        }
    };
    let rname = |id: &str| -> String {
        match right_net.side_of(id) {
            Some(Side::Left) => glued(RimLabel::parse(id).unwrap().k),
            Some(Side::Right) => id.to_string(),
            None => match (layered, parse_layered(id)) {
                (Some((a, _)), Some((j, i))) => format!("M{}_{i}", j + a),
                _ => format!("R:{id}"),
            },
        }
    };
    let mut vertices: Vec<CylVertex> = Vec::new();
    for v in &left_net.vertices {
        let side = if v.side == Some(Side::Right) { None } else { v.side };
        vertices.push(CylVertex { id: lname(&v.id), side });
    }
    for v in &right_net.vertices {
        if v.side == Some(Side::Left) {
            continue;
        }
        vertices.push(CylVertex { id: rname(&v.id), side: v.side });
    }
    vertices.sort_by_key(|v| match v.side {
        Some(Side::Left) => 0,
        None => 1,
        Some(Side::Right) => 2,
    });
    let relabel = |l: &Option<String>, shift: usize| -> Option<String> {
        let l = l.as_ref()?;
        if shift == 0 {
            return Some(l.clone());
        }
        let (kind, rest) = l.split_at(1);
        match rest.split_once('_') {
            Some((j, i)) if (kind == "l" || kind == "h") && j.parse::<usize>().is_ok() => {
                Some(format!("{kind}{}_{i}", j.parse::<usize>().unwrap() + shift))
            }
            _ => Some(l.clone()),
        }
    };
    let mut edges = Vec::new();
    for e in &left_net.edges {
        edges.push(CylEdge { u: lname(&e.u), v: lname(&e.v), label: e.label.clone(), ..e.clone() });
    }
    let shift = layered.map_or(0, |(a, _)| a);
    for e in &right_net.edges {
        edges.push(CylEdge { u: rname(&e.u), v: rname(&e.v), label: relabel(&e.label, shift), ..e.clone() });
    }
    let c = CylNetwork { period: n, vertices, edges, layers: layered.map(|(a, b)| a + b) };
    c.validate()?;
    Ok(c)
}

fn cyclic_split<K: Ord + Copy>(i_set: &[K], j_set: &[K]) -> Option<(Vec<K>, Vec<K>)> {
    let mut all: Vec<(K, bool)> = i_set.iter().map(|&x| (x, true)).chain(j_set.iter().map(|&x| (x, false))).collect();
    all.sort();
    if all.windows(2).any(|w| w[0].0 == w[1].0) {
        return None;
    }
    let len = all.len();
    // the I-block must be one cyclic run: exactly one J->I transition
    let starts: Vec<usize> = (0..len).filter(|&p| all[p].1 && !all[(p + len - 1) % len].1).collect();
    if starts.len() != 1 {
        return None;
    }
    let rot: Vec<(K, bool)> = (0..len).map(|t| all[(starts[0] + t) % len]).collect();
    let rows: Vec<K> = rot.iter().filter(|x| x.1).map(|x| x.0).collect();
    let mut cols: Vec<K> = rot.iter().filter(|x| !x.1).map(|x| x.0).collect();
    cols.reverse();
    Some((rows, cols))
}

/// Whether `(I, J)` is a circular pair for the given circular order: disjoint, of equal size,
/// and not interleaved.
pub fn is_circular_pair(i_set: &[String], j_set: &[String], order: &[String]) -> Result<bool> {
    if i_set.len() != j_set.len() {
        return Err(Error::SizeMismatch(i_set.len(), j_set.len()));
    }
    let pos: HashMap<&str, usize> = order.iter().enumerate().map(|(p, x)| (x.as_str(), p)).collect();
    let look = |xs: &[String]| -> Result<Vec<usize>> {
        xs.iter().map(|x| pos.get(x.as_str()).copied().ok_or_else(|| Error::UnknownVertex(x.clone()))).collect()
    };
    let (a, b) = (look(i_set)?, look(j_set)?);
    Ok(!a.is_empty() && cyclic_split(&a, &b).is_some())
}

/// Circular pair under the cylindrical order of rim labels.
pub fn is_cylindrical_pair(i_set: &[String], j_set: &[String]) -> Result<bool> {
    if i_set.len() != j_set.len() {
        return Err(Error::SizeMismatch(i_set.len(), j_set.len()));
    }
    let keys = |xs: &[String]| -> Result<Vec<(u8, i64)>> { xs.iter().map(|x| RimLabel::parse(x).map(RimLabel::key)).collect() };
    let (a, b) = (keys(i_set)?, keys(j_set)?);
    Ok(!a.is_empty() && cyclic_split(&a, &b).is_some())
}

/// Rows and columns of the minor of a cylindrical pair, ordered so that
/// `i_1..i_k, j_k..j_1` is cyclically increasing.
pub fn cylindrical_minor_order(i_set: &[String], j_set: &[String]) -> Result<Option<(Vec<String>, Vec<String>)>> {
    let parse = |xs: &[String]| -> Result<Vec<RimLabel>> { xs.iter().map(|x| RimLabel::parse(x)).collect() };
    let (a, b) = (parse(i_set)?, parse(j_set)?);
    let to_key: BTreeMap<(u8, i64), RimLabel> = a.iter().chain(&b).map(|r| (r.key(), *r)).collect();
    let ka: Vec<_> = a.iter().map(|r| r.key()).collect();
    let kb: Vec<_> = b.iter().map(|r| r.key()).collect();
    Ok(cyclic_split(&ka, &kb).map(|(r, c)| {
        (
            r.iter().map(|k| to_key[k].to_string()).collect(),
            c.iter().map(|k| to_key[k].to_string()).collect(),
        )
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct TnnViolation {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub det: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TnnReport {
    pub checked: usize,
    pub violations: Vec<TnnViolation>,
}

impl TnnReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Checks `det L_{I,J} >= 0` (or `>= -tol` for floats) over every cylindrical pair of the
/// window's rim labels with `|I| <= max_k`.
pub fn check_cylindrical_tnn<T: Scalar>(entries: &LabeledMatrix<T>, max_k: usize, tol: f64) -> Result<TnnReport> {
    let mut rims: Vec<RimLabel> = entries.labels().iter().filter_map(|l| RimLabel::parse(l).ok()).collect();
    rims.sort_by_key(|r| r.key());
    if rims.len() < 2 * max_k {
        return Err(Error::WindowTooSmall(format!("{} rim labels for minors of size {max_k}", rims.len())));
    }
    let names: Vec<String> = rims.iter().map(|r| r.to_string()).collect();
    let mut checked = 0;
    let mut violations = Vec::new();
    for k in 1..=max_k {
        for u in subsets(names.len(), 2 * k) {
            for start in 0..2 * k {
                let rows: Vec<String> = (0..k).map(|t| names[u[(start + t) % (2 * k)]].clone()).collect();
                let mut cols: Vec<String> = (k..2 * k).map(|t| names[u[(start + t) % (2 * k)]].clone()).collect();
                cols.reverse();
                let block = entries.block(&rows, &cols)?;
                let d = det(&block);
                checked += 1;
                let bad = if T::EXACT { d.approx() < 0.0 } else { d.approx() < -tol };
                if bad {
                    violations.push(TnnViolation { rows, cols, det: d.render() });
                }
            }
        }
    }
    Ok(TnnReport { checked, violations })
}

/// Exact universal response of an `N(2)` network, summed star by star (each middle vertex of
/// `N(2)` sees only rim vertices in the cover).
pub fn n2_universal_entry(w: &NmWeights, a: &str, b: &str) -> Result<Rational> {
    if w.m != 2 {
        return Err(Error::BadDimensions("star formula needs m = 2".into()));
    }
    let n = w.n as i64;
    let (ra, rb) = (RimLabel::parse(a)?, RimLabel::parse(b)?);
    let mut total = Rational::from_integer(0.into());
    // middle vertex with lift index t touches left t (low), left t+1 (high),
    // right t' (low of layer 2), right (t-1)' (high of layer 2)
    let lo = ra.k.min(rb.k) - 2;
    let hi = ra.k.max(rb.k) + 2;
    let diag = a == b;
    for t in lo..=hi {
        let idx = |k: i64| (k - 1).rem_euclid(n) as usize;
        let nb = [
            (RimLabel::left(t), w.layers[0].low[idx(t)].clone()),
            (RimLabel::left(t + 1), w.layers[0].high[idx(t + 1)].clone()),
            (RimLabel::right(t), w.layers[1].low[idx(t)].clone()),
            (RimLabel::right(t - 1), w.layers[1].high[idx(t)].clone()),
        ];
        let s: Rational = nb.iter().map(|x| x.1.clone()).sum();
        let wa = nb.iter().find(|x| x.0 == ra).map(|x| x.1.clone());
        let wb = nb.iter().find(|x| x.0 == rb).map(|x| x.1.clone());
        if let (Some(x), Some(y)) = (wa, wb) {
            if diag {
                total += &x * &x / &s - &x;
            } else {
                total += &x * &y / &s;
            }
        }
    }
    Ok(total)
}
