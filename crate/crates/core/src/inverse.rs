//! Recovering the weights of `N(m)` from its universal response.
//!
//! Layer 1 is estimated edge by edge from grove ratios on a truncation, then peeled off the
//! response, and the procedure repeats on the remaining `N(m-1)`. The last layer is read off
//! directly. The result is only determined up to the `S_m` action of the R-matrix, so the
//! solver reports the representative with nonincreasing radii together with its orbit.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cylinder::{concatenate, left, make_nm, nm_vertex, right, truncate, CylNetwork, RimLabel};
use crate::error::{Error, Result};
use crate::groves::{make_sigma_k, make_sigma_low, make_tau_k, make_tau_low, upr_value, Partition, UprOptions};
use crate::matrix::{inverse, matmul, transpose, LabeledMatrix};
use crate::netcore::{kirchhoff_matrix, response_matrix};
use crate::rmatrix::{apply_r_at, radii, sort_radii, LayerWeights, NmWeights};
use crate::scalar::{fmt_rational, limit_denominator, rational_vec, to_f64, Rational};

/// Denominator bound applied to estimates and peeled responses, which are approximate anyway;
/// it keeps exact arithmetic on later layers from growing without bound.
const ROUNDING_DENOMINATOR: u64 = 1 << 40;

/// Truncation responses of an `N(m)` network, in strip boundary order.
pub trait ResponseSource: Sync {
    fn period(&self) -> usize;
    fn layers(&self) -> usize;
    fn truncation_response(&self, radius: usize) -> Result<LabeledMatrix<Rational>>;
}

/// Test-mode source: responses computed from known weights.
pub struct HiddenNm {
    weights: NmWeights,
    cyl: CylNetwork,
}

impl HiddenNm {
    pub fn new(weights: NmWeights) -> Result<Self> {
        let cyl = make_nm(&weights)?;
        Ok(HiddenNm { weights, cyl })
    }

    pub fn weights(&self) -> &NmWeights {
        &self.weights
    }
}

impl ResponseSource for HiddenNm {
    fn period(&self) -> usize {
        self.weights.n
    }

    fn layers(&self) -> usize {
        self.weights.m
    }

    fn truncation_response(&self, radius: usize) -> Result<LabeledMatrix<Rational>> {
        Ok(response_matrix(&truncate(&self.cyl, radius)?.net)?.into_inner())
    }
}

/// Data-mode source: responses supplied per truncation radius.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TabulatedResponses {
    pub n: usize,
    pub m: usize,
    pub truncations: Vec<TabulatedTruncation>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TabulatedTruncation {
    pub radius: usize,
    pub labels: Vec<String>,
    /// Row-major entries as rational strings.
    pub entries: Vec<Vec<String>>,
}

impl TabulatedResponses {
    pub fn from_source(src: &dyn ResponseSource, radii: &[usize]) -> Result<Self> {
        let truncations = radii
            .iter()
            .map(|&r| {
                let m = src.truncation_response(r)?;
                let k = m.n();
                Ok(TabulatedTruncation {
                    radius: r,
                    labels: m.labels().to_vec(),
                    entries: (0..k).map(|i| (0..k).map(|j| fmt_rational(m.at(i, j))).collect()).collect(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(TabulatedResponses { n: src.period(), m: src.layers(), truncations })
    }
}

impl ResponseSource for TabulatedResponses {
    fn period(&self) -> usize {
        self.n
    }

    fn layers(&self) -> usize {
        self.m
    }

    fn truncation_response(&self, radius: usize) -> Result<LabeledMatrix<Rational>> {
        let t = self
            .truncations
            .iter()
            .find(|t| t.radius == radius)
            .ok_or_else(|| Error::WindowTooSmall(format!("no data for truncation radius {radius}")))?;
        let rows = t
            .entries
            .iter()
            .map(|r| r.iter().map(|x| crate::scalar::parse_rational(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        LabeledMatrix::from_rows(t.labels.clone(), rows)
    }
}

/// Source for `N(m-1)` obtained by peeling a known first layer off another source.
pub struct Peeled<'a> {
    inner: &'a dyn ResponseSource,
    layer: LayerWeights,
}

impl<'a> Peeled<'a> {
    pub fn new(inner: &'a dyn ResponseSource, layer: LayerWeights) -> Result<Self> {
        if inner.layers() < 2 {
            return Err(Error::BadLayer { k: 1, m: inner.layers() });
        }
        Ok(Peeled { inner, layer })
    }
}

impl ResponseSource for Peeled<'_> {
    fn period(&self) -> usize {
        self.inner.period()
    }

    fn layers(&self) -> usize {
        self.inner.layers() - 1
    }

    fn truncation_response(&self, radius: usize) -> Result<LabeledMatrix<Rational>> {
        let y = self.inner.truncation_response(radius)?;
        let out = peel_response(&y, self.inner.period(), self.inner.layers(), &self.layer, radius)?;
        Ok(out.map(|x| limit_denominator(x, ROUNDING_DENOMINATOR)))
    }
}

/// Structural strip-ordered boundary of `G(N)` for `N(m)` of period `n`.
pub fn truncation_boundary(n: usize, m: usize, radius: usize) -> Result<Vec<String>> {
    let cyl = make_nm(&NmWeights::uniform(n, m, Rational::from_integer(1.into())))?;
    Ok(truncate(&cyl, radius)?.net.boundary().to_vec())
}

/// Truncation response of the remainder `X'` of `Y = N(1) ∘ X'`, given the response of `G_Y(N)`
/// and the weights of the first layer.
///
/// `G_Y(N)` is the layer-one edges glued to `G_{X'}(N)` along the middle vertices `mu`. With
/// `B` the (square, lower bidiagonal) block of layer-one conductances between the left lifts
/// `l` on sheets `-N..=N` and `mu`, and `A = K_mumu + L'_mumu`, the Schur identities
///
/// ```text
/// K_ll - Y_ll = B A^-1 B^T,   (K - Y)_lW = B A^-1 L'_muW,   Y_WW = K_WW + L'_WW - L'_Wmu A^-1 L'_muW
/// ```
///
/// determine `L'` on the middle vertices and the rest `W` of the boundary.
pub fn peel_response(
    y: &LabeledMatrix<Rational>,
    n: usize,
    m: usize,
    layer: &LayerWeights,
    radius: usize,
) -> Result<LabeledMatrix<Rational>> {
    if m < 2 {
        return Err(Error::BadLayer { k: 1, m });
    }
    if layer.high.len() != n || layer.low.len() != n {
        return Err(Error::SizeMismatch(layer.high.len(), n));
    }
    let big = radius as i64;
    let ni = n as i64;
    // layer one alone is N(1); its right rim is the middle layer of Y
    let one = make_nm(&NmWeights { n, m: 1, layers: vec![layer.clone()] })?;
    let t1 = truncate(&one, radius)?;
    let mid = |label: &str| -> Result<String> {
        let r = RimLabel::parse(label)?;
        let s = (r.k - 1).div_euclid(ni);
        let i = (r.k - 1).rem_euclid(ni) + 1;
        Ok(format!("{}@{s}", nm_vertex(m, 1, i as usize)))
    };
    let k1 = kirchhoff_matrix(&t1.net);
    let rename: Vec<String> = k1
        .labels()
        .iter()
        .map(|l| if l.ends_with('\'') { mid(l) } else { Ok(l.clone()) })
        .collect::<Result<_>>()?;
    let k1 = k1.relabeled(rename)?;
    let zero = Rational::from_integer(0.into());
    let kget = |a: &str, b: &str| k1.get(a, b).cloned().unwrap_or_else(|| zero.clone());
    let yget = |a: &str, b: &str| y.entry(a, b).cloned();

    let mut lv = Vec::new();
    let mut mu = Vec::new();
    for s in -big..=big {
        for i in 1..=ni {
            lv.push(left(i + s * ni));
            mu.push(format!("{}@{s}", nm_vertex(m, 1, i as usize)));
        }
    }
    let w: Vec<String> = y.labels().iter().filter(|l| RimLabel::parse(l).map_or(true, |r| r.side == crate::cylinder::Side::Right)).cloned().collect();
    let v = lv.len();
    let mut e = vec![vec![zero.clone(); v]; v];
    let mut b = vec![vec![zero.clone(); v]; v];
    for (p, lp) in lv.iter().enumerate() {
        for (q, lq) in lv.iter().enumerate() {
            e[p][q] = kget(lp, lq) - yget(lp, lq)?;
        }
        for (q, mq) in mu.iter().enumerate() {
            b[p][q] = kget(lp, mq);
        }
    }
    let binv = inverse(&b)?;
    let ainv = matmul(&matmul(&binv, &e), &transpose(&binv));
    let a = inverse(&ainv)?;
    let mut dlw = vec![vec![zero.clone(); w.len()]; v];
    for (p, lp) in lv.iter().enumerate() {
        for (q, wq) in w.iter().enumerate() {
            dlw[p][q] = kget(lp, wq) - yget(lp, wq)?;
        }
    }
    let lmw = matmul(&matmul(&a, &binv), &dlw);
    let corr = matmul(&matmul(&transpose(&lmw), &ainv), &lmw);

    let labels: Vec<String> = mu.iter().chain(&w).cloned().collect();
    let mut out = LabeledMatrix::zeros(labels)?;
    for p in 0..v {
        for q in 0..v {
            *out.at_mut(p, q) = a[p][q].clone() - kget(&mu[p], &mu[q]);
        }
        for q in 0..w.len() {
            *out.at_mut(p, v + q) = lmw[p][q].clone();
            *out.at_mut(v + q, p) = lmw[p][q].clone();
        }
    }
    for p in 0..w.len() {
        for q in 0..w.len() {
            *out.at_mut(v + p, v + q) = yget(&w[p], &w[q])? - kget(&w[p], &w[q]) + corr[p][q].clone();
        }
    }
    // relabel to N(m-1): M1_i@s becomes left rim i + s n, deeper layers move up by one
    let relabel = |l: &str| -> String {
        if let Some((id, s)) = l.split_once('@') {
            let rest = id.trim_start_matches('M');
            if let Some((j, i)) = rest.split_once('_') {
                let (j, i): (usize, i64) = (j.parse().unwrap_or(0), i.parse().unwrap_or(0));
                let s: i64 = s.parse().unwrap_or(0);
                return if j == 1 { left(i + s * ni) } else { format!("{}@{s}", nm_vertex(m - 1, j - 1, i as usize)) };
            }
        }
        l.to_string()
    };
    let renamed: Vec<String> = out.labels().iter().map(|l| relabel(l)).collect();
    let out = out.relabeled(renamed)?;
    out.restrict(&truncation_boundary(n, m - 1, radius)?)
}

/// The network `Z ∘ Y`, where `Z` is the layer `x` with its conductances negated and high and low
/// swapped (`low_i = -a_i`, `high_i = -b_{i-1}`). Its rim label `k` corresponds to label `k-1`
/// of the remainder; on labels away from the ends of a truncation the two have the same
/// truncation responses.
pub fn peel_layer(y: &CylNetwork, x: &LayerWeights) -> Result<CylNetwork> {
    let n = y.period;
    if x.high.len() != n || x.low.len() != n {
        return Err(Error::SizeMismatch(x.high.len(), n));
    }
    let z = LayerWeights {
        high: (0..n).map(|i| -x.low[(i + n - 1) % n].clone()).collect(),
        low: x.high.iter().map(|a| -a.clone()).collect(),
    };
    let zc = make_nm(&NmWeights { n, m: 1, layers: vec![z] })?;
    concatenate(&zc, y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    High,
    Low,
}

/// A first-layer edge at left rim vertex `i` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId {
    pub kind: EdgeKind,
    pub i: usize,
}

impl std::fmt::Display for EdgeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            EdgeKind::High => write!(f, "h1_{}", self.i),
            EdgeKind::Low => write!(f, "l1_{}", self.i),
        }
    }
}

/// The `(sigma, tau)` pair whose grove ratio tends to the weight of `edge`.
pub fn estimator_partitions(edge: EdgeId, k: usize) -> Result<(Partition, Partition)> {
    let (s, t) = match edge.kind {
        EdgeKind::High => (make_sigma_k(k), make_tau_k(k)),
        EdgeKind::Low => (make_sigma_low(k), make_tau_low(k)),
    };
    let d = edge.i as i64 - 1;
    Ok((s.shifted(d)?, t.shifted(d)?))
}

/// One grove-ratio estimate read from the strip-ordered response `resp` of a truncation.
pub fn estimate_from_response(resp: &LabeledMatrix<Rational>, edge: EdgeId, k: usize) -> Result<Rational> {
    let ground = resp.labels().to_vec();
    let (sigma, tau) = estimator_partitions(edge, k)?;
    let lift = |p: &Partition| {
        p.with_ground(ground.clone()).map_err(|e| match e {
            Error::UnknownVertex(v) => Error::WindowTooSmall(format!("{v} is not on the truncation boundary")),
            e => e,
        })
    };
    let (sigma, tau) = (lift(&sigma)?, lift(&tau)?);
    let opts = UprOptions {
        forced_singletons: ground.iter().filter(|l| RimLabel::parse(l).is_err()).cloned().collect(),
        ..UprOptions::default()
    };
    let entry = |a: &str, b: &str| resp.get(a, b).cloned();
    let num = upr_value(&sigma, &entry, &opts)?;
    let den = upr_value(&tau, &entry, &opts)?;
    let zero = Rational::from_integer(0.into());
    if den <= zero || num <= zero {
        return Err(Error::EstimateDiverged(format!(
            "{edge} at K={k}: ratio {} / {} is not positive",
            fmt_rational(&num),
            fmt_rational(&den)
        )));
    }
    Ok(num / den)
}

/// The `(K, N)` pairs at which estimates are taken, in increasing order of `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub pairs: Vec<(usize, usize)>,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::offset(&[1, 2, 3], 4)
    }
}

impl Schedule {
    /// `N = K + c` for each `K`.
    pub fn offset(ks: &[usize], c: usize) -> Self {
        Schedule { pairs: ks.iter().map(|&k| (k, k + c)).collect() }
    }

    /// Parses "K:N,K:N,...".
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("schedule {s:?} is not a list of K:N pairs"));
        let pairs = s
            .split(',')
            .map(|p| {
                let (k, n) = p.trim().split_once(':').ok_or_else(bad)?;
                Ok((k.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<(usize, usize)>>>()?;
        let sched = Schedule { pairs };
        sched.validate()?;
        Ok(sched)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pairs.is_empty() {
            return Err(Error::BadDimensions("schedule needs at least one K".into()));
        }
        if let Some(&(k, n)) = self.pairs.iter().find(|(k, n)| *k == 0 || n < k) {
            return Err(Error::WindowTooSmall(format!("pair {k}:{n} needs 1 <= K <= N")));
        }
        Ok(())
    }

    /// Same `K`, with the margin `N - K` doubled.
    pub fn widened(&self) -> Self {
        Schedule { pairs: self.pairs.iter().map(|&(k, n)| (k, n + (n - k))).collect() }
    }

    pub fn largest_radius(&self) -> usize {
        self.pairs.iter().map(|p| p.1).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimatePoint {
    pub k: usize,
    pub radius: usize,
    #[serde(serialize_with = "ser_rational")]
    pub estimate: Rational,
    pub approx: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub target_edge: String,
    pub layer: usize,
    pub values: Vec<EstimatePoint>,
    #[serde(serialize_with = "ser_rational")]
    pub final_estimate: Rational,
    /// Consecutive estimates move in one direction.
    pub monotone_trend: bool,
    /// |last - previous| (zero with a single estimate).
    pub spread: f64,
    /// The schedule that produced these estimates, after any widening.
    pub schedule: Schedule,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

fn estimate_series(src: &dyn ResponseSource, edge: EdgeId, schedule: &Schedule, layer: usize) -> Result<EstimateReport> {
    let mut values = Vec::new();
    for &(k, radius) in &schedule.pairs {
        let resp = src.truncation_response(radius)?;
        let est = estimate_from_response(&resp, edge, k)?;
        values.push(EstimatePoint { k, radius, approx: to_f64(&est), estimate: est });
    }
    let last = values.last().ok_or_else(|| Error::BadDimensions("empty schedule".into()))?.estimate.clone();
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1].approx - w[0].approx).collect();
    let monotone_trend = diffs.iter().all(|d| *d >= 0.0) || diffs.iter().all(|d| *d <= 0.0);
    let spread = diffs.last().map_or(0.0, |d| d.abs());
    Ok(EstimateReport {
        target_edge: edge.to_string(),
        layer,
        values,
        final_estimate: last,
        monotone_trend,
        spread,
        schedule: schedule.clone(),
    })
}

/// Estimates one first-layer edge of `N(m)` with known weights along the schedule.
pub fn asw_estimate_edge(w: &NmWeights, edge: EdgeId, schedule: &Schedule) -> Result<EstimateReport> {
    let r = radii(w);
    if !r.is_nonincreasing() {
        return Err(Error::RadiiNotSorted(format!(
            "radii {:?} must be nonincreasing",
            r.0.iter().map(fmt_rational).collect::<Vec<_>>()
        )));
    }
    estimate_series(&HiddenNm::new(w.clone())?, edge, schedule, 1)
}

/// Distinct images of `w` under the `S_m` action, found by breadth-first search over adjacent moves.
pub fn s_m_orbit(w: &NmWeights) -> Result<Vec<NmWeights>> {
    let mut seen: HashSet<String> = HashSet::from([w.to_json()]);
    let mut out = vec![w.clone()];
    let mut frontier = vec![w.clone()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for k in 1..w.m {
                let y = apply_r_at(x, k)?;
                if seen.insert(y.to_json()) {
                    out.push(y.clone());
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificates {
    /// Largest spread between the last two estimates of any edge.
    pub max_estimate_spread: f64,
    /// Every edge's estimates moved in one direction.
    pub all_monotone: bool,
    pub schedule: Schedule,
}

#[derive(Clone, Debug, Serialize)]
pub struct InverseSolution {
    pub canonical: NmWeights,
    /// Weights as assembled layer by layer, before sorting radii.
    pub recovered: NmWeights,
    #[serde(with = "rational_vec")]
    pub radii: Vec<Rational>,
    /// Adjacent moves `k` (acting on layers `k, k+1`) generating the orbit.
    pub orbit_generators: Vec<usize>,
    pub orbit: Vec<NmWeights>,
    pub certified_orbit_size: usize,
    pub estimates: Vec<EstimateReport>,
    pub certificates: Certificates,
}

/// Reads `N(1)` weights off a truncation response: `L_{i,i'} = b_i`, `L_{i,(i-1)'} = a_i`.
pub fn read_n1(resp: &LabeledMatrix<Rational>, n: usize) -> Result<LayerWeights> {
    let mut high = Vec::with_capacity(n);
    let mut low = Vec::with_capacity(n);
    for i in 1..=n as i64 {
        low.push(resp.entry(&left(i), &right(i))?.clone());
        high.push(resp.entry(&left(i), &right(i - 1))?.clone());
    }
    Ok(LayerWeights { high, low })
}

const MAX_DOUBLINGS: usize = 2;

fn estimate_layer(src: &dyn ResponseSource, schedule: &Schedule, layer: usize) -> Result<Vec<EstimateReport>> {
    let n = src.period();
    let edges: Vec<EdgeId> = [EdgeKind::High, EdgeKind::Low]
        .iter()
        .flat_map(|&kind| (1..=n).map(move |i| EdgeId { kind, i }))
        .collect();
    let mut sched = schedule.clone();
    let mut last_err = None;
    for _ in 0..=MAX_DOUBLINGS {
        let res: Result<Vec<EstimateReport>> =
            edges.par_iter().map(|&e| estimate_series(src, e, &sched, layer)).collect();
        match res {
            Ok(r) => return Ok(r),
            Err(Error::EstimateDiverged(msg)) => {
                last_err = Some(msg);
                sched = sched.widened();
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::EstimateDiverged(last_err.unwrap_or_default()))
}

fn peel_all(
    src: &dyn ResponseSource,
    schedule: &Schedule,
    j: usize,
    layers: &mut Vec<LayerWeights>,
    reports: &mut Vec<EstimateReport>,
) -> Result<()> {
    let n = src.period();
    if src.layers() == 1 {
        let radius = schedule.largest_radius();
        layers.push(read_n1(&src.truncation_response(radius)?, n)?);
        return Ok(());
    }
    let reps = estimate_layer(src, schedule, j)?;
    let pick = |kind: EdgeKind| -> Vec<Rational> {
        let prefix = if kind == EdgeKind::High { 'h' } else { 'l' };
        reps.iter()
            .filter(|r| r.target_edge.starts_with(prefix))
            .map(|r| limit_denominator(&r.final_estimate, ROUNDING_DENOMINATOR))
            .collect()
    };
    let layer = LayerWeights { high: pick(EdgeKind::High), low: pick(EdgeKind::Low) };
    reports.extend(reps);
    layers.push(layer.clone());
    peel_all(&Peeled::new(src, layer)?, schedule, j + 1, layers, reports)
}

/// Solves the inverse problem for `N(m)`: peel layers one at a time, then sort radii.
pub fn solve_nm(src: &dyn ResponseSource, schedule: &Schedule) -> Result<InverseSolution> {
    let (n, m) = (src.period(), src.layers());
    schedule.validate()?;
    let mut layers = Vec::with_capacity(m);
    let mut reports = Vec::new();
    peel_all(src, schedule, 1, &mut layers, &mut reports)?;
    let recovered = NmWeights { n, m, layers };
    recovered.validate()?;
    let (canonical, _, _) = sort_radii(&recovered)?;
    let orbit = s_m_orbit(&canonical)?;
    let certificates = Certificates {
        max_estimate_spread: reports.iter().map(|r| r.spread).fold(0.0, f64::max),
        all_monotone: reports.iter().all(|r| r.monotone_trend),
        schedule: schedule.clone(),
    };
    Ok(InverseSolution {
        radii: radii(&canonical).0,
        certified_orbit_size: orbit.len(),
        orbit_generators: (1..m).collect(),
        orbit,
        canonical,
        recovered,
        estimates: reports,
        certificates,
    })
}

/// Largest relative difference between corresponding weights.
pub fn relative_error(x: &NmWeights, truth: &NmWeights) -> f64 {
    x.layers
        .iter()
        .zip(&truth.layers)
        .flat_map(|(p, q)| p.high.iter().zip(&q.high).chain(p.low.iter().zip(&q.low)))
        .map(|(u, v)| (to_f64(u) - to_f64(v)).abs() / to_f64(v).abs())
        .fold(0.0, f64::max)
}

/// Windowed truncation responses of every orbit member, keyed by radius.
pub fn orbit_responses(orbit: &[NmWeights], radius: usize) -> Result<Vec<LabeledMatrix<Rational>>> {
    orbit.iter().map(|w| HiddenNm::new(w.clone())?.truncation_response(radius)).collect()
}

/// Labels of a truncation whose cover neighbours all lie inside it.
pub fn settled_labels(w: &NmWeights, radius: usize) -> Result<Vec<String>> {
    let cyl = make_nm(w)?;
    Ok(truncate(&cyl, radius)?.settled_rim(&cyl))
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitCheck {
    pub radius: usize,
    pub labels: usize,
    pub max_difference: String,
}

/// Compares all orbit members' truncation responses on the labels settled in every member.
pub fn check_orbit_responses(orbit: &[NmWeights], radius: usize) -> Result<OrbitCheck> {
    let resp = orbit_responses(orbit, radius)?;
    let keep = settled_labels(&orbit[0], radius)?;
    let base = resp[0].restrict(&keep)?;
    let mut worst = Rational::from_integer(0.into());
    for r in &resp[1..] {
        let r = r.restrict(&keep)?;
        for i in 0..keep.len() {
            for j in 0..keep.len() {
                let d = (r.at(i, j) - base.at(i, j)).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
    }
    Ok(OrbitCheck { radius, labels: keep.len(), max_difference: fmt_rational(&worst) })
}

/// Per-radius estimates for the convergence study of one edge.
pub fn convergence_table(w: &NmWeights, edge: EdgeId, ks: &[usize], c: usize) -> Result<BTreeMap<usize, f64>> {
    let rep = asw_estimate_edge(w, edge, &Schedule::offset(ks, c))?;
    Ok(rep.values.iter().map(|p| (p.k, p.approx)).collect())
}

use num::Signed;
