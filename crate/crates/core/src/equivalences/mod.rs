//! Local electrical equivalences: series, parallel, loops, pendants, and the star-triangle pair.
//!
//! Every move takes an explicit site and returns the new network together with a
//! [`TransformRecord`]. New edges are appended; surviving edges keep their relative order.
//! Parallel edges created along the way are never merged implicitly.

mod tetra;

pub use tetra::{tetrahedron_cycle, TetraSite, WiringNetwork, TETRA_CYCLE};

use num::Zero;
use serde::{Deserialize, Serialize};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::netcore::{response_matrix, Edge, Network, Vertex};
use crate::scalar::{Rational, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Series,
    Parallel,
    Loop,
    Pendant,
    YToDelta,
    DeltaToY,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub kind: TransformKind,
    /// Vertex ids consumed or addressed.
    pub site: Vec<String>,
    /// Edge indices addressed in the before-network.
    pub edges: Vec<usize>,
    /// Ids created: vertices, or edges written as "u-v".
    pub produced: Vec<String>,
    pub weights_before: Vec<Weight>,
    pub weights_after: Vec<Weight>,
}

/// A place where one of the moves applies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Site {
    Parallel(String, String),
    Series(String),
    Loop(usize),
    Pendant(String),
    Star(String),
    Triangle([usize; 3]),
}

pub type Step = (Network, TransformRecord);

fn record(kind: TransformKind) -> TransformRecord {
    TransformRecord {
        kind,
        site: Vec::new(),
        edges: Vec::new(),
        produced: Vec::new(),
        weights_before: Vec::new(),
        weights_after: Vec::new(),
    }
}

fn edge_name(e: &Edge) -> String {
    format!("{}-{}", e.u, e.v)
}

fn remove_indices(net: &mut Network, idx: &[usize]) {
    let mut keep = vec![true; net.edges.len()];
    for &i in idx {
        keep[i] = false;
    }
    let mut it = keep.into_iter();
    net.edges.retain(|_| it.next().unwrap());
}

/// Merges every edge between `u` and `v` into one whose weight is their sum; a zero sum deletes them.
pub fn parallel_reduce(net: &Network, u: &str, v: &str) -> Result<Step> {
    let idx: Vec<usize> = net
        .edges_between(u, v)
        .into_iter()
        .filter(|&i| !net.edges[i].is_loop())
        .collect();
    if idx.len() < 2 {
        return Err(Error::NoParallelEdges(u.into(), v.into()));
    }
    let mut rec = record(TransformKind::Parallel);
    rec.site = vec![u.into(), v.into()];
    rec.edges = idx.clone();
    let mut total = Rational::zero();
    for &i in &idx {
        total += net.edges[i].weight.value();
        rec.weights_before.push(net.edges[i].weight.clone());
    }
    let mut out = net.clone();
    if total.is_zero() {
        remove_indices(&mut out, &idx);
    } else {
        out.edges[idx[0]].weight = Weight(total);
        rec.weights_after.push(out.edges[idx[0]].weight.clone());
        rec.produced.push(edge_name(&out.edges[idx[0]]));
        remove_indices(&mut out, &idx[1..]);
    }
    Ok((out, rec))
}

/// Replaces an interior degree-two vertex by a single edge of weight `ab/(a+b)`.
pub fn series_reduce(net: &Network, m: &str) -> Result<Step> {
    let bad = || Error::NotSeriesSite(m.into());
    let v = net.vertex(m).ok_or_else(|| Error::UnknownVertex(m.into()))?;
    if v.boundary {
        return Err(bad());
    }
    let inc: Vec<usize> = net.incident(m).into_iter().filter(|&i| !net.edges[i].is_loop()).collect();
    if inc.len() != 2 {
        return Err(bad());
    }
    let (e1, e2) = (&net.edges[inc[0]], &net.edges[inc[1]]);
    let (x, y) = (e1.other(m).to_string(), e2.other(m).to_string());
    if x == y {
        return Err(bad());
    }
    let (a, b) = (e1.weight.value(), e2.weight.value());
    let s = a + b;
    if s.is_zero() {
        return Err(Error::ZeroDenominator(format!("series at {m}")));
    }
    let w = Weight(a * b / s);
    let mut rec = record(TransformKind::Series);
    rec.site = vec![m.into()];
    rec.edges = inc.clone();
    rec.weights_before = vec![e1.weight.clone(), e2.weight.clone()];
    rec.weights_after = vec![w.clone()];
    let mut ne = Edge::new(x, y, w);
    ne.label = e1.label.clone();
    rec.produced = vec![edge_name(&ne)];
    let mut out = net.clone();
    out.drop_vertex(m);
    out.edges.push(ne);
    Ok((out, rec))
}

pub fn remove_loop(net: &Network, edge: usize) -> Result<Step> {
    let e = net.edges.get(edge).ok_or(Error::NotALoop(edge))?;
    if !e.is_loop() {
        return Err(Error::NotALoop(edge));
    }
    let mut rec = record(TransformKind::Loop);
    rec.site = vec![e.u.clone()];
    rec.edges = vec![edge];
    rec.weights_before = vec![e.weight.clone()];
    let mut out = net.clone();
    out.edges.remove(edge);
    Ok((out, rec))
}

/// Deletes an interior vertex with exactly one non-loop edge.
pub fn remove_pendant(net: &Network, v: &str) -> Result<Step> {
    let vert = net.vertex(v).ok_or_else(|| Error::UnknownVertex(v.into()))?;
    let inc = net.incident(v);
    let proper: Vec<usize> = inc.iter().copied().filter(|&i| !net.edges[i].is_loop()).collect();
    if vert.boundary || proper.len() != 1 {
        return Err(Error::NotAPendant(v.into()));
    }
    let mut rec = record(TransformKind::Pendant);
    rec.site = vec![v.into()];
    rec.edges = inc.clone();
    rec.weights_before = inc.iter().map(|&i| net.edges[i].weight.clone()).collect();
    let mut out = net.clone();
    out.drop_vertex(v);
    Ok((out, rec))
}

/// Star to triangle: the edge opposite neighbour `x` gets `bc/(a+b+c)` and inherits the label of the star edge to `x`.
pub fn y_to_delta(net: &Network, center: &str) -> Result<Step> {
    let bad = || Error::NotAStarSite(center.into());
    let v = net.vertex(center).ok_or_else(|| Error::UnknownVertex(center.into()))?;
    if v.boundary {
        return Err(bad());
    }
    let inc: Vec<usize> = net.incident(center).into_iter().filter(|&i| !net.edges[i].is_loop()).collect();
    if inc.len() != 3 {
        return Err(bad());
    }
    let es: Vec<&Edge> = inc.iter().map(|&i| &net.edges[i]).collect();
    let nb: Vec<String> = es.iter().map(|e| e.other(center).to_string()).collect();
    if nb[0] == nb[1] || nb[0] == nb[2] || nb[1] == nb[2] {
        return Err(bad());
    }
    let w: Vec<&Rational> = es.iter().map(|e| e.weight.value()).collect();
    let s = w[0] + w[1] + w[2];
    if s.is_zero() {
        return Err(Error::ZeroDenominator(format!("y_to_delta at {center}")));
    }
    let mut rec = record(TransformKind::YToDelta);
    rec.site = vec![center.into()];
    rec.edges = inc.clone();
    rec.weights_before = es.iter().map(|e| e.weight.clone()).collect();
    let mut new_edges = Vec::with_capacity(3);
    for k in 0..3 {
        let (p, q) = ((k + 1) % 3, (k + 2) % 3);
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        let wt = Weight(w[lo] * w[hi] / &s);
        let mut ne = Edge::new(nb[lo].clone(), nb[hi].clone(), wt.clone());
        ne.label = es[k].label.clone();
        rec.weights_after.push(wt);
        rec.produced.push(edge_name(&ne));
        new_edges.push(ne);
    }
    let mut out = net.clone();
    out.drop_vertex(center);
    out.edges.extend(new_edges);
    Ok((out, rec))
}

/// Triangle to star on three explicit edges. The star edge to a corner gets `(AB+AC+BC)/A`,
/// with `A` the opposite triangle edge, and inherits that edge's label.
pub fn delta_to_y_at(net: &Network, edges: [usize; 3], name: Option<&str>) -> Result<Step> {
    let es: Vec<&Edge> = edges
        .iter()
        .map(|&i| net.edges.get(i).ok_or_else(|| Error::SiteNotFound(format!("edge {i}"))))
        .collect::<Result<_>>()?;
    let not_tri = || Error::NotATriangle(es[0].u.clone(), es[0].v.clone(), es[1].other(&es[0].u).to_string());
    if es.iter().any(|e| e.is_loop()) || edges[0] == edges[1] || edges[0] == edges[2] || edges[1] == edges[2] {
        return Err(not_tri());
    }
    // corner opposite edge k is the endpoint not on edge k
    let mut corners = Vec::with_capacity(3);
    for k in 0..3 {
        let others = [es[(k + 1) % 3], es[(k + 2) % 3]];
        let shared = [&others[0].u, &others[0].v]
            .into_iter()
            .find(|x| others[1].touches(x) && !es[k].touches(x));
        corners.push(shared.ok_or_else(not_tri)?.clone());
    }
    if corners[0] == corners[1] || corners[0] == corners[2] || corners[1] == corners[2] {
        return Err(not_tri());
    }
    let w: Vec<&Rational> = es.iter().map(|e| e.weight.value()).collect();
    if w.iter().any(|x| x.is_zero()) {
        return Err(Error::ZeroWeight("delta_to_y".into()));
    }
    let sigma = w[0] * w[1] + w[0] * w[2] + w[1] * w[2];
    let center = net.fresh_id(name.unwrap_or("y"));
    let mut rec = record(TransformKind::DeltaToY);
    rec.site = corners.clone();
    rec.edges = edges.to_vec();
    rec.produced = vec![center.clone()];
    rec.weights_before = es.iter().map(|e| e.weight.clone()).collect();
    let mut new_edges = Vec::with_capacity(3);
    for k in 0..3 {
        let wt = Weight(&sigma / w[k]);
        let mut ne = Edge::new(center.clone(), corners[k].clone(), wt.clone());
        ne.label = es[k].label.clone();
        rec.weights_after.push(wt);
        new_edges.push(ne);
    }
    let mut out = net.clone();
    remove_indices(&mut out, &edges);
    out.vertices.push(Vertex { id: center, boundary: false });
    out.edges.extend(new_edges);
    Ok((out, rec))
}

/// Triangle to star on corners `x, y, z`; each side must carry exactly one edge.
pub fn delta_to_y(net: &Network, x: &str, y: &str, z: &str) -> Result<Step> {
    let not_tri = || Error::NotATriangle(x.into(), y.into(), z.into());
    let side = |p: &str, q: &str| -> Result<usize> {
        let e: Vec<usize> = net.edges_between(p, q).into_iter().filter(|&i| !net.edges[i].is_loop()).collect();
        if e.len() == 1 {
            Ok(e[0])
        } else {
            Err(not_tri())
        }
    };
    for c in [x, y, z] {
        if !net.has_vertex(c) {
            return Err(Error::UnknownVertex(c.into()));
        }
    }
    let a = side(y, z)?;
    let b = side(x, z)?;
    let c = side(x, y)?;
    delta_to_y_at(net, [a, b, c], None)
}

/// Every site where some move applies.
pub fn applicable_sites(net: &Network) -> Vec<Site> {
    let mut out = Vec::new();
    let mut pairs = std::collections::BTreeSet::new();
    for e in &net.edges {
        if e.is_loop() {
            continue;
        }
        let key = if e.u <= e.v { (e.u.clone(), e.v.clone()) } else { (e.v.clone(), e.u.clone()) };
        if !pairs.insert(key.clone()) {
            let s = Site::Parallel(key.0, key.1);
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    for (i, e) in net.edges.iter().enumerate() {
        if e.is_loop() {
            out.push(Site::Loop(i));
        }
    }
    for v in &net.vertices {
        if v.boundary {
            continue;
        }
        let nbrs: Vec<&str> = net
            .edges
            .iter()
            .filter(|e| e.touches(&v.id) && !e.is_loop())
            .map(|e| e.other(&v.id))
            .collect();
        let distinct = |k: usize| {
            let mut s = nbrs.clone();
            s.sort_unstable();
            s.dedup();
            s.len() == k
        };
        match nbrs.len() {
            1 => out.push(Site::Pendant(v.id.clone())),
            2 if distinct(2) => out.push(Site::Series(v.id.clone())),
            3 if distinct(3) => out.push(Site::Star(v.id.clone())),
            _ => {}
        }
    }
    let m = net.edges.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let t = [i, j, k];
                if t.iter().any(|&x| net.edges[x].is_loop()) {
                    continue;
                }
                let mut ends: Vec<&str> = t
                    .iter()
                    .flat_map(|&x| [net.edges[x].u.as_str(), net.edges[x].v.as_str()])
                    .collect();
                ends.sort_unstable();
                let ok = ends.len() == 6
                    && ends[0] == ends[1]
                    && ends[2] == ends[3]
                    && ends[4] == ends[5]
                    && ends[1] != ends[2]
                    && ends[3] != ends[4];
                if ok {
                    out.push(Site::Triangle(t));
                }
            }
        }
    }
    out
}

/// Applies the move at `site`.
pub fn apply_site(net: &Network, site: &Site) -> Result<Step> {
    match site {
        Site::Parallel(u, v) => parallel_reduce(net, u, v),
        Site::Series(m) => series_reduce(net, m),
        Site::Loop(i) => remove_loop(net, *i),
        Site::Pendant(v) => remove_pendant(net, v),
        Site::Star(c) => y_to_delta(net, c),
        Site::Triangle(t) => delta_to_y_at(net, *t, None),
    }
}

/// Re-applies a recorded move to its before-network.
pub fn replay(net: &Network, rec: &TransformRecord) -> Result<Network> {
    let site = |k: usize| rec.site.get(k).map(String::as_str).ok_or_else(|| Error::SiteNotFound("record site".into()));
    let (out, _) = match rec.kind {
        TransformKind::Parallel => parallel_reduce(net, site(0)?, site(1)?)?,
        TransformKind::Series => series_reduce(net, site(0)?)?,
        TransformKind::Loop => remove_loop(net, *rec.edges.first().ok_or(Error::NotALoop(usize::MAX))?)?,
        TransformKind::Pendant => remove_pendant(net, site(0)?)?,
        TransformKind::YToDelta => y_to_delta(net, site(0)?)?,
        TransformKind::DeltaToY => {
            let e: [usize; 3] = rec
                .edges
                .clone()
                .try_into()
                .map_err(|_| Error::SiteNotFound("triangle edges".into()))?;
            delta_to_y_at(net, e, rec.produced.first().map(String::as_str))?
        }
    };
    Ok(out)
}

/// Outcome of applying every applicable move to one network.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SiteSweep {
    pub applied: BTreeMap<String, usize>,
    /// Sites whose move changed the response matrix or failed.
    pub failures: Vec<(Site, String)>,
}

impl SiteSweep {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: SiteSweep) {
        for (k, c) in other.applied {
            *self.applied.entry(k).or_default() += c;
        }
        self.failures.extend(other.failures);
    }
}

/// Applies each move of [`applicable_sites`] to `net` and compares response matrices exactly.
pub fn sweep_sites(net: &Network) -> Result<SiteSweep> {
    let before = response_matrix(net)?;
    let mut out = SiteSweep::default();
    for site in applicable_sites(net) {
        let (after, rec) = match apply_site(net, &site) {
            Ok(step) => step,
            Err(e) => {
                out.failures.push((site, e.to_string()));
                continue;
            }
        };
        let kind = serde_json::to_value(rec.kind)?.as_str().unwrap_or_default().to_string();
        *out.applied.entry(kind).or_default() += 1;
        match response_matrix(&after) {
            Ok(r) if r == before => {}
            Ok(_) => out.failures.push((site, "response changed".into())),
            Err(e) => out.failures.push((site, e.to_string())),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::response_matrix;
    use crate::scalar::{int, rat};

    fn w(e: &Edge) -> Rational {
        e.weight.value().clone()
    }

    fn star(a: Rational, b: Rational, c: Rational) -> Network {
        Network::from_parts(
            &["x", "y", "z"],
            &["o"],
            vec![
                Edge::new("o", "x", Weight(a)),
                Edge::new("o", "y", Weight(b)),
                Edge::new("o", "z", Weight(c)),
            ],
        )
        .unwrap()
    }

    fn tri(a: Rational, b: Rational, c: Rational) -> Network {
        Network::from_parts(
            &["x", "y", "z"],
            &[],
            vec![
                Edge::new("y", "z", Weight(a)),
                Edge::new("x", "z", Weight(b)),
                Edge::new("x", "y", Weight(c)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn parallel_examples() {
        let net = Network::from_parts(&["1", "2"], &[], vec![Edge::new("1", "2", 1), Edge::new("1", "2", 2)]).unwrap();
        let (out, rec) = parallel_reduce(&net, "1", "2").unwrap();
        assert_eq!(out.edges.len(), 1);
        assert_eq!(w(&out.edges[0]), int(3));
        assert_eq!(rec.kind, TransformKind::Parallel);

        let mut net2 = net.clone();
        net2.edges = vec![Edge::new("1", "2", Weight(rat(3, 7))), Edge::new("2", "1", Weight(rat(-3, 7)))];
        assert!(parallel_reduce(&net2, "1", "2").unwrap().0.edges.is_empty());

        net2.edges = vec![
            Edge::new("1", "2", Weight(rat(1, 2))),
            Edge::new("1", "2", Weight(rat(1, 3))),
            Edge::new("1", "2", Weight(rat(1, 6))),
        ];
        assert_eq!(w(&parallel_reduce(&net2, "1", "2").unwrap().0.edges[0]), int(1));
        net2.edges.truncate(1);
        assert!(matches!(parallel_reduce(&net2, "1", "2"), Err(Error::NoParallelEdges(..))));
    }

    #[test]
    fn series_examples() {
        let path = |a: i64, b: i64| {
            Network::from_parts(&["1", "2"], &["m"], vec![Edge::new("1", "m", a), Edge::new("m", "2", b)]).unwrap()
        };
        assert_eq!(w(&series_reduce(&path(2, 2), "m").unwrap().0.edges[0]), int(1));
        assert_eq!(w(&series_reduce(&path(1, 3), "m").unwrap().0.edges[0]), rat(3, 4));
        assert!(matches!(series_reduce(&path(2, -2), "m"), Err(Error::ZeroDenominator(_))));
        assert!(matches!(series_reduce(&path(2, 2), "1"), Err(Error::NotSeriesSite(_))));
    }

    #[test]
    fn loop_and_pendant() {
        let mut net = star(int(1), int(2), int(3));
        net.edges.push(Edge::new("o", "o", 5));
        let before = response_matrix(&net).unwrap();
        let (out, _) = remove_loop(&net, 3).unwrap();
        assert_eq!(out.edges.len(), 3);
        assert_eq!(response_matrix(&out).unwrap(), before);
        assert!(matches!(remove_loop(&net, 0), Err(Error::NotALoop(0))));

        let mut t = tri(int(1), int(1), int(1));
        t.vertices.push(Vertex { id: "p".into(), boundary: false });
        t.edges.push(Edge::new("x", "p", 4));
        let before = response_matrix(&t).unwrap();
        let (out, _) = remove_pendant(&t, "p").unwrap();
        assert_eq!(response_matrix(&out).unwrap(), before);
        assert!(matches!(remove_pendant(&t, "x"), Err(Error::NotAPendant(_))));
    }

    #[test]
    fn y_to_delta_examples() {
        let (out, rec) = y_to_delta(&star(int(3), int(3), int(3)), "o").unwrap();
        assert!(out.edges.iter().all(|e| w(e) == int(1)));
        assert_eq!(rec.weights_after.len(), 3);

        let (out, _) = y_to_delta(&star(int(1), int(2), int(3)), "o").unwrap();
        let find = |a: &str, b: &str| w(&out.edges[out.edges_between(a, b)[0]]);
        assert_eq!(find("y", "z"), int(1));
        assert_eq!(find("x", "z"), rat(1, 2));
        assert_eq!(find("x", "y"), rat(1, 3));

        let (out, _) = y_to_delta(&star(int(-1), int(2), int(3)), "o").unwrap();
        let find = |a: &str, b: &str| w(&out.edges[out.edges_between(a, b)[0]]);
        assert_eq!(find("y", "z"), rat(3, 2));
        assert_eq!(find("x", "z"), rat(-3, 4));
        assert_eq!(find("x", "y"), rat(-1, 2));

        assert!(matches!(y_to_delta(&star(int(1), int(1), int(-2)), "o"), Err(Error::ZeroDenominator(_))));
    }

    #[test]
    fn delta_to_y_examples() {
        let (out, rec) = delta_to_y(&tri(int(1), int(1), int(1)), "x", "y", "z").unwrap();
        assert!(out.edges.iter().all(|e| w(e) == int(3)));
        assert_eq!(rec.produced.len(), 1);

        let (out, _) = delta_to_y(&tri(int(1), rat(1, 2), rat(1, 3)), "x", "y", "z").unwrap();
        let c = &rec.produced[0];
        let find = |a: &str| w(&out.edges[out.edges_between(c, a)[0]]);
        assert_eq!(find("x"), int(1));
        assert_eq!(find("y"), int(2));
        assert_eq!(find("z"), int(3));
        let mut net = tri(int(1), int(1), int(1));
        net.edges.pop();
        assert!(matches!(delta_to_y(&net, "x", "y", "z"), Err(Error::NotATriangle(..))));
    }

    #[test]
    fn labels_follow_crossings() {
        let mut net = star(int(1), int(2), int(3));
        for (e, l) in net.edges.iter_mut().zip(["ex", "ey", "ez"]) {
            e.label = Some(l.into());
        }
        let (t, _) = y_to_delta(&net, "o").unwrap();
        assert!(t.edges[t.find_label("ex").unwrap()].joins("y", "z"));
        let (s, rec) = delta_to_y(&t, "x", "y", "z").unwrap();
        let c = &rec.produced[0];
        assert!(s.edges[s.find_label("ex").unwrap()].joins(c, "x"));
    }

    #[test]
    fn replay_reproduces() {
        let net = star(int(2), int(5), int(7));
        let (out, rec) = y_to_delta(&net, "o").unwrap();
        assert_eq!(replay(&net, &rec).unwrap(), out);
        let (back, rec2) = delta_to_y(&out, "x", "y", "z").unwrap();
        assert_eq!(replay(&out, &rec2).unwrap(), back);
    }

    #[test]
    fn scanner_finds_sites() {
        let net = star(int(1), int(1), int(1));
        assert_eq!(applicable_sites(&net), vec![Site::Star("o".into())]);
        let t = tri(int(1), int(1), int(1));
        assert_eq!(applicable_sites(&t), vec![Site::Triangle([0, 1, 2])]);
    }
}
