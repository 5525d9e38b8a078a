//! The tetrahedron relation, realised on the network of a wiring diagram.
//!
//! A reduced word in the gaps `1..W-1` of `W` wires determines a planar network: its vertices
//! are the regions of the diagram at even depth, and each crossing is an edge. A crossing in
//! an odd gap joins the even regions above and below it; one in an even gap joins the regions
//! to its left and right. Edges are labelled by the pair of wires that cross. A braid move
//! `j,j+1,j <-> j+1,j,j+1` is a star-triangle move; a commutation leaves the network alone.
//! Walking once around the octagon of reduced words of the longest element of S_4 returns
//! every conductance to its starting value.

use serde::{Deserialize, Serialize};

use super::{delta_to_y_at, y_to_delta, TransformRecord};
use crate::error::{Error, Result};
use crate::netcore::{Edge, Network, Vertex};
use crate::scalar::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    Braid(usize),
    Commute(usize),
}

/// Moves taking `121321` once around the octagon and back to a commutation-equivalent word.
pub const TETRA_CYCLE: [Move; 14] = [
    Move::Braid(0),
    Move::Braid(2),
    Move::Commute(1),
    Move::Commute(4),
    Move::Braid(2),
    Move::Braid(0),
    Move::Commute(2),
    Move::Braid(3),
    Move::Braid(1),
    Move::Commute(0),
    Move::Commute(3),
    Move::Braid(1),
    Move::Braid(3),
    Move::Commute(2),
];

const START: [usize; 6] = [1, 2, 1, 3, 2, 1];

/// Vertex ids of the configuration around which the cycle runs: the top and bottom regions
/// and the three regions at depth two, left to right. The middle one must be interior.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TetraSite {
    pub b0: String,
    pub b4: String,
    pub g2a: String,
    pub g2b: String,
    pub g2c: String,
}

impl Default for TetraSite {
    fn default() -> Self {
        TetraSite {
            b0: "B0".into(),
            b4: "B4".into(),
            g2a: "G2a".into(),
            g2b: "G2b".into(),
            g2c: "G2c".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct WiringNetwork {
    pub wires: usize,
    pub word: Vec<usize>,
    /// Region ids per depth, left to right; odd depths hold placeholders.
    pub regions: Vec<Vec<String>>,
    pub net: Network,
    prefix: String,
}

fn count(word: &[usize], gap: usize, upto: usize) -> usize {
    word[..upto].iter().filter(|&&g| g == gap).count()
}

fn crossing_pairs(wires: usize, word: &[usize]) -> Vec<(usize, usize)> {
    let mut slots: Vec<usize> = (1..=wires).collect();
    word.iter()
        .map(|&g| {
            let (a, b) = (slots[g - 1], slots[g]);
            slots.swap(g - 1, g);
            (a.min(b), a.max(b))
        })
        .collect()
}

impl WiringNetwork {
    /// Standalone network of a reduced word, one weight per crossing in word order.
    pub fn new(wires: usize, word: &[usize], weights: &[Weight]) -> Result<Self> {
        if wires < 2 || wires % 2 != 0 || word.iter().any(|&g| g == 0 || g >= wires) {
            return Err(Error::BadDimensions(format!("word {word:?} on {wires} wires")));
        }
        if weights.len() != word.len() {
            return Err(Error::BadDimensions("one weight per crossing".into()));
        }
        let regions: Vec<Vec<String>> = (0..=wires)
            .map(|lvl| {
                let k = if lvl == 0 || lvl == wires { 1 } else { count(word, lvl, word.len()) + 1 };
                (0..k)
                    .map(|t| {
                        if lvl == 0 || lvl == wires {
                            format!("B{lvl}")
                        } else if lvl % 2 == 0 {
                            format!("G{lvl}{}", (b'a' + t as u8) as char)
                        } else {
                            format!("-{lvl}.{t}")
                        }
                    })
                    .collect()
            })
            .collect();
        let mut w = WiringNetwork {
            wires,
            word: word.to_vec(),
            regions,
            net: Network { vertices: vec![], edges: vec![], boundary_order: vec![] },
            prefix: String::new(),
        };
        w.net = w.rebuild(weights)?;
        Ok(w)
    }

    /// The Figure-3 style configuration: word 121321 on four wires.
    pub fn tetrahedron(weights: &[Weight]) -> Result<Self> {
        Self::new(4, &START, weights)
    }

    pub fn label(&self, pair: (usize, usize)) -> String {
        format!("{}w{}{}", self.prefix, pair.0, pair.1)
    }

    /// Endpoints of the crossing at `q` in the current word.
    fn ends(&self, q: usize) -> (String, String) {
        let g = self.word[q];
        if g % 2 == 1 {
            let up = &self.regions[g - 1][count(&self.word, g - 1, q).min(self.regions[g - 1].len() - 1)];
            let dn = &self.regions[g + 1][count(&self.word, g + 1, q).min(self.regions[g + 1].len() - 1)];
            (up.clone(), dn.clone())
        } else {
            let t = count(&self.word, g, q);
            (self.regions[g][t].clone(), self.regions[g][t + 1].clone())
        }
    }

    /// Network determined by the word and region names, with the given crossing weights.
    pub fn rebuild(&self, weights: &[Weight]) -> Result<Network> {
        let wv = self.wires;
        let mut vertices = Vec::new();
        for lvl in (0..=wv).step_by(2) {
            let k = self.regions[lvl].len();
            for (t, id) in self.regions[lvl].iter().enumerate() {
                let boundary = lvl == 0 || lvl == wv || t == 0 || t + 1 == k;
                vertices.push(Vertex { id: id.clone(), boundary });
            }
        }
        let pairs = crossing_pairs(wv, &self.word);
        let edges = (0..self.word.len())
            .map(|q| {
                let (u, v) = self.ends(q);
                Edge::new(u, v, weights[q].clone()).labeled(self.label(pairs[q]))
            })
            .collect();
        let mut order = vec![self.regions[0][0].clone()];
        for lvl in (2..wv).step_by(2) {
            order.push(self.regions[lvl].last().unwrap().clone());
        }
        order.push(self.regions[wv][0].clone());
        for lvl in (2..wv).step_by(2).rev() {
            order.push(self.regions[lvl][0].clone());
        }
        Network::new(vertices, edges, order)
    }

    /// Crossing weights in word order, read from the current network by label.
    pub fn weights(&self) -> Result<Vec<Weight>> {
        crossing_pairs(self.wires, &self.word)
            .into_iter()
            .map(|p| {
                let l = self.label(p);
                self.net
                    .find_label(&l)
                    .map(|i| self.net.edges[i].weight.clone())
                    .ok_or(Error::SiteNotFound(l))
            })
            .collect()
    }

    pub fn commute(&self, p: usize) -> Result<Self> {
        let (a, b) = match (self.word.get(p), self.word.get(p + 1)) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Err(Error::SiteNotFound(format!("commutation at {p}"))),
        };
        if a.abs_diff(b) < 2 {
            return Err(Error::SiteNotFound(format!("gaps {a},{b} at {p} do not commute")));
        }
        let mut out = self.clone();
        out.word.swap(p, p + 1);
        Ok(out)
    }

    pub fn braid(&self, p: usize) -> Result<(Self, TransformRecord)> {
        let tri = self.word.get(p..p + 3).ok_or_else(|| Error::SiteNotFound(format!("braid at {p}")))?;
        let (x, y, z) = (tri[0], tri[1], tri[2]);
        if x != z || x.abs_diff(y) != 1 {
            return Err(Error::SiteNotFound(format!("no braid at {p} in {:?}", self.word)));
        }
        // the inner region at depth x disappears, a new one at depth y appears
        let gone_idx = count(&self.word, x, p) + 1;
        let new_idx = count(&self.word, y, p) + 1;
        let mut out = self.clone();
        let rec = if x % 2 == 0 {
            let center = self.regions[x][gone_idx].clone();
            let (net, rec) = y_to_delta(&self.net, &center)?;
            out.net = net;
            out.regions[x].remove(gone_idx);
            out.regions[y].insert(new_idx, format!("-{y}.{}", self.net.edges.len()));
            rec
        } else {
            let pairs = crossing_pairs(self.wires, &self.word);
            let mut idx = [0usize; 3];
            for k in 0..3 {
                let l = self.label(pairs[p + k]);
                idx[k] = self.net.find_label(&l).ok_or(Error::SiteNotFound(l))?;
            }
            let stem = format!("G{y}");
            let (net, rec) = delta_to_y_at(&self.net, idx, Some(&stem))?;
            out.net = net;
            out.regions[x].remove(gone_idx);
            out.regions[y].insert(new_idx, rec.produced[0].clone());
            rec
        };
        out.word[p] = y;
        out.word[p + 1] = x;
        out.word[p + 2] = y;
        Ok((out, rec))
    }

    pub fn apply(&self, m: Move) -> Result<(Self, Option<TransformRecord>)> {
        match m {
            Move::Braid(p) => self.braid(p).map(|(w, r)| (w, Some(r))),
            Move::Commute(p) => self.commute(p).map(|w| (w, None)),
        }
    }
}

/// Runs the eight star-triangle moves of the octagon around `site` and returns the final
/// network, which equals the input, together with the transcript.
pub fn tetrahedron_cycle(net: &Network, site: &TetraSite) -> Result<(Network, Vec<TransformRecord>)> {
    let ids = [&site.b0, &site.b4, &site.g2a, &site.g2b, &site.g2c];
    for id in ids {
        if !net.has_vertex(id) {
            return Err(Error::SiteNotFound(format!("vertex {id}")));
        }
    }
    if net.is_boundary(&site.g2b) || net.degree(&site.g2b) != 4 {
        return Err(Error::SiteNotFound(format!("{} must be interior of degree 4", site.g2b)));
    }
    let prefix = "\u{1}tetra:";
    let mut w = WiringNetwork {
        wires: 4,
        word: START.to_vec(),
        regions: vec![
            vec![site.b0.clone()],
            vec!["-1.0".into(), "-1.1".into(), "-1.2".into(), "-1.3".into()],
            vec![site.g2a.clone(), site.g2b.clone(), site.g2c.clone()],
            vec!["-3.0".into(), "-3.1".into()],
            vec![site.b4.clone()],
        ],
        net: net.clone(),
        prefix: prefix.into(),
    };
    let pairs = crossing_pairs(4, &START);
    let mut saved = Vec::with_capacity(6);
    for q in 0..START.len() {
        let (u, v) = w.ends(q);
        let e = net.edges_between(&u, &v);
        if e.len() != 1 {
            return Err(Error::SiteNotFound(format!("expected one edge {u}-{v}, found {}", e.len())));
        }
        saved.push((e[0], net.edges[e[0]].label.clone()));
        w.net.edges[e[0]].label = Some(w.label(pairs[q]));
    }
    let mut log = Vec::new();
    for m in TETRA_CYCLE {
        let (next, rec) = w.apply(m)?;
        w = next;
        log.extend(rec);
    }
    debug_assert_eq!(w.word, START.to_vec());
    // the middle region at depth two is a fresh vertex now; give it back its name
    let fresh = w.regions[2][1].clone();
    let mut out = w.net;
    for v in out.vertices.iter_mut() {
        if v.id == fresh {
            v.id = site.g2b.clone();
        }
    }
    for e in out.edges.iter_mut() {
        if e.u == fresh {
            e.u = site.g2b.clone();
        }
        if e.v == fresh {
            e.v = site.g2b.clone();
        }
    }
    // move the vertex and the six edges back to their original positions
    let vpos = net.vertices.iter().position(|v| v.id == site.g2b).unwrap();
    let vi = out.vertices.iter().position(|v| v.id == site.g2b).unwrap();
    let vert = out.vertices.remove(vi);
    out.vertices.insert(vpos, vert);
    let mut restored: Vec<(usize, Edge)> = Vec::new();
    for (q, (orig_idx, orig_label)) in saved.into_iter().enumerate() {
        let l = format!("{prefix}w{}{}", pairs[q].0, pairs[q].1);
        let i = out.find_label(&l).ok_or(Error::SiteNotFound(l))?;
        let mut e = out.edges.remove(i);
        e.label = orig_label;
        let o = &net.edges[orig_idx];
        if e.u != o.u {
            std::mem::swap(&mut e.u, &mut e.v);
        }
        restored.push((orig_idx, e));
    }
    restored.sort_by_key(|(i, _)| *i);
    for (i, e) in restored {
        out.edges.insert(i, e);
    }
    Ok((out, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::response_matrix;

    fn ws(v: &[i64]) -> Vec<Weight> {
        v.iter().map(|&x| Weight::from(x)).collect()
    }

    #[test]
    fn start_network_shape() {
        let w = WiringNetwork::tetrahedron(&ws(&[1, 2, 3, 4, 5, 6])).unwrap();
        let net = &w.net;
        assert_eq!(net.interior(), vec!["G2b".to_string()]);
        assert_eq!(net.degree("G2b"), 4);
        assert_eq!(net.boundary(), &["B0", "G2c", "B4", "G2a"].map(String::from)[..]);
        assert_eq!(net.edges_between("B0", "G2a").len(), 1);
        assert_eq!(net.edges_between("B0", "G2c").len(), 1);
    }

    #[test]
    fn every_move_matches_the_rebuilt_network() {
        let mut w = WiringNetwork::tetrahedron(&ws(&[2, 3, 5, 7, 11, 13])).unwrap();
        let l0 = response_matrix(&w.net).unwrap();
        for m in TETRA_CYCLE {
            w = w.apply(m).unwrap().0;
            let rebuilt = w.rebuild(&w.weights().unwrap()).unwrap();
            assert_eq!(rebuilt.edge_multiset(), w.net.edge_multiset(), "after {m:?}");
            assert_eq!(response_matrix(&w.net).unwrap(), l0);
        }
        assert_eq!(w.word, START.to_vec());
    }

    #[test]
    fn cycle_is_identity() {
        let w = WiringNetwork::tetrahedron(&ws(&[1, 2, 3, 4, 5, 6])).unwrap();
        let (out, log) = tetrahedron_cycle(&w.net, &TetraSite::default()).unwrap();
        assert_eq!(log.len(), 8);
        assert_eq!(out, w.net);
    }

    #[test]
    fn missing_site_reported() {
        let w = WiringNetwork::tetrahedron(&ws(&[1; 6])).unwrap();
        let mut site = TetraSite::default();
        site.g2b = "nope".into();
        assert!(matches!(tetrahedron_cycle(&w.net, &site), Err(Error::SiteNotFound(_))));
    }
}
