//! The electrical R-matrix acting on adjacent layers of `N(m)`.
//!
//! A block of two adjacent layers is described by four length-`n` lists: `a_i` on the edge
//! from `i` to `M_{i-1}`, `b_i` from `i` to `M_i`, `c_{i+1}` from `M_i` to `i'` and `d_i` from
//! `M_i` to `(i-1)'`. Indices are 0-based and reduced mod `n`.
//!
//! The closed form is a map on tuples. The network produced by threading the virtual
//! parameter around the cylinder is `N(2)` again, but with its slots permuted: the new `a`
//! sits where the closed form puts `c`, and `b` where it puts `d`. [`r_matrix`] applies that
//! permutation, which is what makes the move preserve the universal response and swap the
//! radii.

use num::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::equivalences::{delta_to_y_at, parallel_reduce, y_to_delta, TransformRecord};
use crate::error::{Error, Result};
use crate::netcore::{Edge, Network, Vertex};
use crate::scalar::{fmt_rational, int, rat, rational_vec, Rational};

/// Weights of one layer of `N(m)`: `high[i]` joins `M_i^{(j-1)}` to `M_{i-1}^{(j)}`,
/// `low[i]` joins `M_i^{(j-1)}` to `M_i^{(j)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerWeights {
    #[serde(alias = "a", with = "rational_vec")]
    pub high: Vec<Rational>,
    #[serde(alias = "b", with = "rational_vec")]
    pub low: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NmWeights {
    pub n: usize,
    pub m: usize,
    pub layers: Vec<LayerWeights>,
}

/// The `(a, b, c, d)` view of two adjacent layers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerPairWeights {
    #[serde(with = "rational_vec")]
    pub a: Vec<Rational>,
    #[serde(with = "rational_vec")]
    pub b: Vec<Rational>,
    #[serde(with = "rational_vec")]
    pub c: Vec<Rational>,
    #[serde(with = "rational_vec")]
    pub d: Vec<Rational>,
}

/// Smallest integer `f` with `f^n >= x`.
fn limit_up(x: &Rational, n: usize) -> Rational {
    let mut f = int(crate::scalar::to_f64(x).powf(1.0 / n as f64).floor().max(1.0) as i64);
    while num::pow(f.clone(), n) < *x {
        f += int(1);
    }
    f
}

/// Per-layer ratios `R_k = prod(high) / prod(low)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Radii(#[serde(with = "rational_vec")] pub Vec<Rational>);

impl Radii {
    pub fn is_nonincreasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn all_distinct(&self) -> bool {
        let mut v = self.0.clone();
        v.sort();
        v.windows(2).all(|w| w[0] != w[1])
    }
}

impl NmWeights {
    pub fn new(layers: Vec<LayerWeights>) -> Result<Self> {
        let n = layers.first().map_or(0, |l| l.high.len());
        let w = NmWeights { n, m: layers.len(), layers };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 || self.layers.len() != self.m {
            return Err(Error::BadDimensions(format!("n={}, m={}, {} layers", self.n, self.m, self.layers.len())));
        }
        for l in &self.layers {
            if l.high.len() != self.n || l.low.len() != self.n {
                return Err(Error::BadDimensions(format!("layer lists must have length n={}", self.n)));
            }
            if l.high.iter().chain(&l.low).any(Zero::is_zero) {
                return Err(Error::ZeroWeight("layer weight".into()));
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let w: NmWeights = serde_json::from_str(s)?;
        w.validate()?;
        Ok(w)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("weights serialize")
    }

    pub fn uniform(n: usize, m: usize, t: Rational) -> Self {
        let layer = LayerWeights { high: vec![t.clone(); n], low: vec![t; n] };
        NmWeights { n, m, layers: vec![layer; m] }
    }

    /// Period-one weights from `(high, low)` per layer.
    pub fn n1(layers: &[(Rational, Rational)]) -> Self {
        let layers = layers
            .iter()
            .map(|(h, l)| LayerWeights { high: vec![h.clone()], low: vec![l.clone()] })
            .collect::<Vec<_>>();
        NmWeights { n: 1, m: layers.len(), layers }
    }

    /// Weights of `N(2)` with the given block.
    pub fn from_block(p: &LayerPairWeights) -> Self {
        let n = p.a.len();
        let mut w = NmWeights::uniform(n, 2, int(1));
        w.set_block(1, p).expect("two layers");
        w
    }

    /// The same weights seen on the `t`-fold cover (period `t*n`).
    pub fn repeat(&self, t: usize) -> Self {
        let rep = |v: &Vec<Rational>| v.iter().cycle().take(v.len() * t).cloned().collect();
        NmWeights {
            n: self.n * t,
            m: self.m,
            layers: self.layers.iter().map(|l| LayerWeights { high: rep(&l.high), low: rep(&l.low) }).collect(),
        }
    }

    /// Random positive weights `p/q` with `1 <= p <= max_num`, `1 <= q <= max_den`.
    pub fn random(n: usize, m: usize, rng: &mut impl Rng, max_num: i64, max_den: i64) -> Self {
        let mut draw = || rat(rng.gen_range(1..=max_num), rng.gen_range(1..=max_den));
        let layers = (0..m)
            .map(|_| LayerWeights { high: (0..n).map(|_| draw()).collect(), low: (0..n).map(|_| draw()).collect() })
            .collect();
        NmWeights { n, m, layers }
    }

    /// Random weights whose radii decrease by a factor of at least `ratio` from layer to layer.
    /// Layers that are too close get their high weights scaled up.
    pub fn random_separated(n: usize, m: usize, rng: &mut impl Rng, ratio: i64) -> Self {
        let mut w = Self::random(n, m, rng, 5, 3);
        for k in (0..m.saturating_sub(1)).rev() {
            let r = radii(&w).0;
            let need = &r[k + 1] * int(ratio) / &r[k];
            if need > int(1) {
                // spread the factor over the layer so no single edge dominates
                let f = limit_up(&need, n) * rat(rng.gen_range(4..=6), 4);
                for h in &mut w.layers[k].high {
                    *h = &*h * &f;
                }
            }
        }
        w
    }

    fn check_layer(&self, k: usize) -> Result<()> {
        if k == 0 || k >= self.m {
            return Err(Error::BadLayer { k, m: self.m });
        }
        Ok(())
    }

    /// The block formed by layers `k` and `k+1` (1-based).
    pub fn block(&self, k: usize) -> Result<LayerPairWeights> {
        self.check_layer(k)?;
        let n = self.n;
        let (x, y) = (&self.layers[k - 1], &self.layers[k]);
        Ok(LayerPairWeights {
            a: x.high.clone(),
            b: x.low.clone(),
            c: (0..n).map(|t| y.low[(t + n - 1) % n].clone()).collect(),
            d: y.high.clone(),
        })
    }

    pub fn set_block(&mut self, k: usize, p: &LayerPairWeights) -> Result<()> {
        self.check_layer(k)?;
        let n = self.n;
        if p.a.len() != n {
            return Err(Error::SizeMismatch(p.a.len(), n));
        }
        self.layers[k - 1] = LayerWeights { high: p.a.clone(), low: p.b.clone() };
        self.layers[k] = LayerWeights { high: p.d.clone(), low: (0..n).map(|i| p.c[(i + 1) % n].clone()).collect() };
        Ok(())
    }
}

impl LayerPairWeights {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a.len();
        if n == 0 || self.b.len() != n || self.c.len() != n || self.d.len() != n {
            return Err(Error::BadDimensions("a, b, c, d must have the same positive length".into()));
        }
        if self.a.iter().chain(&self.b).chain(&self.c).chain(&self.d).any(Zero::is_zero) {
            return Err(Error::ZeroWeight("block weight".into()));
        }
        Ok(())
    }

    pub fn n1(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        LayerPairWeights { a: vec![a], b: vec![b], c: vec![c], d: vec![d] }
    }
}

fn prod<'a>(xs: impl Iterator<Item = &'a Rational>) -> Rational {
    xs.fold(Rational::one(), |acc, x| acc * x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RPolynomials {
    pub tau: Rational,
    pub kappa: Rational,
    pub q: Rational,
}

/// `tau_i`, `kappa_i` and `Q` of a block.
pub fn r_polynomials(w: &LayerPairWeights, i: usize) -> RPolynomials {
    let n = w.n();
    let g = |v: &Vec<Rational>, k: usize| v[k % n].clone();
    let ac = |k: usize| g(&w.a, k) * g(&w.c, k);
    let bd = |k: usize| g(&w.b, k) * g(&w.d, k);
    let ac_run = |lo: usize, hi: usize| (lo..hi).fold(Rational::one(), |p, k| p * ac(k));
    let bd_run = |lo: usize, hi: usize| (lo..hi).fold(Rational::one(), |p, k| p * bd(k));
    let sa = |k: usize| g(&w.a, k) + g(&w.c, k);
    let sb = |k: usize| g(&w.b, k) + g(&w.d, k);
    let i = i % n;
    let mut tau = Rational::zero();
    for j in 0..n {
        tau += sa(i + j) * ac_run(i, i + j) * bd_run(i + j, i + n);
        tau += sb(i + j) * ac_run(i, i + j + 1) * bd_run(i + j + 1, i + n);
    }
    let mut kappa = sa(i) * ac_run(i + 1, i + n) + sb(i) * bd_run(i + 1, i + n);
    for j in 1..n {
        kappa += sa(i + j) * ac_run(i + 1, i + j) * bd_run(i + j, i + n);
        kappa += sb(i + j) * ac_run(i + 1, i + j + 1) * bd_run(i + j + 1, i + n);
    }
    let q = -prod(w.a.iter()) * prod(w.c.iter()) + prod(w.b.iter()) * prod(w.d.iter());
    RPolynomials { tau, kappa, q }
}

/// The closed-form tuple `(tau_i/(a_i k_i), tau_{i+1}/(b_i k_i), tau_i/(c_i k_i), tau_{i+1}/(d_i k_i))`.
pub fn closed_form_r(w: &LayerPairWeights) -> Result<LayerPairWeights> {
    w.validate()?;
    let n = w.n();
    let polys: Vec<RPolynomials> = (0..n).map(|i| r_polynomials(w, i)).collect();
    if let Some(i) = polys.iter().position(|p| p.kappa.is_zero()) {
        return Err(Error::ZeroDenominator(format!("kappa_{}", i + 1)));
    }
    let mut out = LayerPairWeights { a: vec![], b: vec![], c: vec![], d: vec![] };
    for i in 0..n {
        let (t0, t1, k) = (&polys[i].tau, &polys[(i + 1) % n].tau, &polys[i].kappa);
        out.a.push(t0 / (&w.a[i] * k));
        out.b.push(t1 / (&w.b[i] * k));
        out.c.push(t0 / (&w.c[i] * k));
        out.d.push(t1 / (&w.d[i] * k));
    }
    if out.a.iter().chain(&out.b).chain(&out.c).chain(&out.d).any(Zero::is_zero) {
        return Err(Error::ZeroDenominator("tau vanishes".into()));
    }
    Ok(out)
}

/// The R-matrix as a move on `N(2)`: the closed form followed by the slot permutation
/// `(a, b, c, d) -> (c, d, a, b)` read off the threading transcript.
pub fn r_matrix(w: &LayerPairWeights) -> Result<LayerPairWeights> {
    let t = closed_form_r(w)?;
    Ok(LayerPairWeights { a: t.c, b: t.d, c: t.a, d: t.b })
}

#[derive(Clone, Debug, Serialize)]
pub struct Threading {
    pub transcript: Vec<TransformRecord>,
    pub result: LayerPairWeights,
    /// Value of the virtual parameter at each site visited, ending with the value after one revolution.
    #[serde(with = "rational_vec")]
    pub p: Vec<Rational>,
    /// Weight of the star edge towards the middle vertex after each Delta-Y move.
    #[serde(with = "rational_vec")]
    pub q: Vec<Rational>,
}

/// Compact `N(2)` network of a block with edges labelled `a{i}`, `b{i}`, `c{i}`, `d{i}` (1-based).
pub fn block_network(w: &LayerPairWeights) -> Result<Network> {
    w.validate()?;
    let n = w.n();
    let lv = |i: usize| format!("{}", i % n + 1);
    let rv = |i: usize| format!("{}'", i % n + 1);
    let mv = |i: usize| format!("M1_{}", i % n + 1);
    let mut vertices = Vec::new();
    for i in 0..n {
        vertices.push(Vertex { id: lv(i), boundary: true });
    }
    for i in 0..n {
        vertices.push(Vertex { id: mv(i), boundary: false });
    }
    for i in 0..n {
        vertices.push(Vertex { id: rv(i), boundary: true });
    }
    let mut edges = Vec::new();
    for i in 0..n {
        let s = i + 1;
        edges.push(Edge::new(lv(i), mv(i + n - 1), w.a[i].clone()).labeled(format!("a{s}")));
        edges.push(Edge::new(lv(i), mv(i), w.b[i].clone()).labeled(format!("b{s}")));
        edges.push(Edge::new(mv(i + n - 1), rv(i + n - 1), w.c[i].clone()).labeled(format!("c{s}")));
        edges.push(Edge::new(mv(i), rv(i + n - 1), w.d[i].clone()).labeled(format!("d{s}")));
    }
    let order = (0..n).map(lv).chain((0..n).rev().map(rv)).collect();
    Network::new(vertices, edges, order)
}

fn label_weight(net: &Network, label: &str) -> Result<Rational> {
    net.find_label(label)
        .map(|e| net.edges[e].weight.0.clone())
        .ok_or_else(|| Error::InvalidNetwork(format!("threaded network lost edge {label}")))
}

/// Threads the virtual pair `(p, -p)` once around the cylinder starting at `(1, n')`.
pub fn thread_parameter(w: &LayerPairWeights) -> Result<Threading> {
    thread_parameter_at(w, 0)
}

/// Threading with the virtual pair attached between `s+1` and `s'` (0-based `s`).
pub fn thread_parameter_at(w: &LayerPairWeights, s: usize) -> Result<Threading> {
    let n = w.n();
    let polys = r_polynomials(w, s);
    if polys.q.is_zero() {
        return Err(Error::DegenerateQ);
    }
    if polys.kappa.is_zero() {
        return Err(Error::ZeroDenominator(format!("kappa_{}", s % n + 1)));
    }
    let p0 = &polys.q / &polys.kappa;
    let mut net = block_network(w)?;
    let lv = |i: usize| format!("{}", i % n + 1);
    let rv = |i: usize| format!("{}'", (i + n - 1) % n + 1);
    net.edges.push(Edge::new(lv(s), rv(s), p0.clone()).labeled("p"));
    net.edges.push(Edge::new(lv(s), rv(s), -p0.clone()).labeled("-p"));
    let mut transcript = Vec::new();
    let mut ps = vec![p0.clone()];
    let mut qs = Vec::new();
    for t in 0..n {
        let f = (s + n - t % n) % n;
        let find = |net: &Network, l: &str| {
            net.find_label(l).ok_or_else(|| Error::InvalidNetwork(format!("missing edge {l} while threading")))
        };
        let tri = [find(&net, &format!("a{}", f + 1))?, find(&net, &format!("c{}", f + 1))?, find(&net, "p")?];
        let middle = net.edges[tri[0]].other(&lv(f)).to_string();
        let (next, rec) = delta_to_y_at(&net, tri, Some(&format!("Y{}", f + 1)))?;
        transcript.push(rec);
        qs.push(label_weight(&next, "p")?);
        let (next, rec) = y_to_delta(&next, &middle)?;
        transcript.push(rec);
        ps.push(label_weight(&next, "p")?);
        net = next;
    }
    let (net, rec) = parallel_reduce(&net, &lv(s), &rv(s))?;
    transcript.push(rec);
    if net.edges_between(&lv(s), &rv(s)).iter().any(|&e| !net.edges[e].weight.0.is_zero()) {
        return Err(Error::InvalidNetwork(format!(
            "virtual pair did not cancel after one revolution (p_0 = {}, p_n = {})",
            fmt_rational(&p0),
            fmt_rational(ps.last().unwrap())
        )));
    }
    let get = |x: char, i: usize| label_weight(&net, &format!("{x}{}", i + 1));
    let mut result = LayerPairWeights { a: vec![], b: vec![], c: vec![], d: vec![] };
    for i in 0..n {
        result.a.push(get('c', i)?);
        result.b.push(get('d', i)?);
        result.c.push(get('a', i)?);
        result.d.push(get('b', i)?);
    }
    Ok(Threading { transcript, result, p: ps, q: qs })
}

pub fn radii(w: &NmWeights) -> Radii {
    Radii(w.layers.iter().map(|l| prod(l.high.iter()) / prod(l.low.iter())).collect())
}

/// Applies the R-matrix to layers `k` and `k+1` (1-based).
pub fn apply_r_at(w: &NmWeights, k: usize) -> Result<NmWeights> {
    let block = w.block(k)?;
    let mut out = w.clone();
    out.set_block(k, &r_matrix(&block)?)?;
    Ok(out)
}

/// Applies `apply_r_at` along a word of layer indices, left to right.
pub fn apply_word(w: &NmWeights, word: &[usize]) -> Result<NmWeights> {
    word.iter().try_fold(w.clone(), |acc, &k| apply_r_at(&acc, k))
}

#[derive(Clone, Debug, Serialize)]
pub struct YangBaxterReport {
    pub equal: bool,
    pub left: NmWeights,
    pub right: NmWeights,
    /// Largest absolute difference between corresponding weights.
    pub residual: String,
}

/// Compares `R_1 R_2 R_1` with `R_2 R_1 R_2` on three consecutive layers.
pub fn yang_baxter_check(w: &NmWeights) -> Result<YangBaxterReport> {
    if w.m != 3 {
        return Err(Error::BadLayer { k: 2, m: w.m });
    }
    let (left, right) = rayon::join(|| apply_word(w, &[1, 2, 1]), || apply_word(w, &[2, 1, 2]));
    let (left, right) = (left?, right?);
    let residual = max_difference(&left, &right);
    Ok(YangBaxterReport { equal: left == right, residual: fmt_rational(&residual), left, right })
}

pub fn max_difference(x: &NmWeights, y: &NmWeights) -> Rational {
    x.layers
        .iter()
        .zip(&y.layers)
        .flat_map(|(p, q)| p.high.iter().zip(&q.high).chain(p.low.iter().zip(&q.low)))
        .map(|(u, v)| (u - v).abs())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
}

/// Bubble-sorts the radii into nonincreasing order with adjacent R-moves; equal neighbours
/// are left in place. Returns the sorted weights, the moves applied, and `perm` where
/// `perm[k]` is the original position of the layer whose radius now sits at `k`.
pub fn sort_radii(w: &NmWeights) -> Result<(NmWeights, Vec<usize>, Vec<usize>)> {
    let mut cur = w.clone();
    let mut perm: Vec<usize> = (0..w.m).collect();
    let mut moves = Vec::new();
    loop {
        let r = radii(&cur);
        let Some(k) = (0..w.m.saturating_sub(1)).find(|&k| r.0[k] < r.0[k + 1]) else { break };
        cur = apply_r_at(&cur, k + 1)?;
        perm.swap(k, k + 1);
        moves.push(k + 1);
    }
    Ok((cur, moves, perm))
}
