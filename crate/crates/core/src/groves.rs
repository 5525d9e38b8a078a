//! Groves, planar partitions, and the polynomials expressing grove ratios in response entries.
//!
//! A partition lives on an ordered ground (the circular boundary order, or the strip order of
//! a truncation). Labels outside every listed part are singletons and are never stored.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use num::bigint::BigInt;
use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cylinder::RimLabel;
use crate::error::{Error, Result};
use crate::matrix::{det, LabeledMatrix};
use crate::netcore::Network;
use crate::scalar::{Rational, Scalar};

pub const DEFAULT_SUPPORT_LIMIT: usize = 16;
const GROVE_EDGE_LIMIT: usize = 24;
const TREE_PART_LIMIT: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPartition")]
pub struct Partition {
    #[serde(rename = "support")]
    ground: Vec<String>,
    parts: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct RawPartition {
    #[serde(alias = "ground")]
    support: Vec<String>,
    parts: Vec<Vec<String>>,
}

impl TryFrom<RawPartition> for Partition {
    type Error = Error;
    fn try_from(r: RawPartition) -> Result<Self> {
        Partition::new(r.support, r.parts)
    }
}

impl Partition {
    pub fn new(ground: Vec<String>, parts: Vec<Vec<String>>) -> Result<Self> {
        let pos: HashMap<&str, usize> = ground.iter().enumerate().map(|(i, x)| (x.as_str(), i)).collect();
        if pos.len() != ground.len() {
            return Err(Error::InvalidNetwork("repeated label in partition ground".into()));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for p in parts {
            for x in &p {
                if !pos.contains_key(x.as_str()) {
                    return Err(Error::UnknownVertex(x.clone()));
                }
                if !seen.insert(x.clone()) {
                    return Err(Error::InvalidNetwork(format!("{x} lies in two parts")));
                }
            }
            if p.len() >= 2 {
                let mut p = p;
                p.sort_by_key(|x| pos[x.as_str()]);
                out.push(p);
            }
        }
        out.sort_by_key(|p| pos[p[0].as_str()]);
        Ok(Partition { ground, parts: out })
    }

    /// The all-singletons partition.
    pub fn uncrossing(ground: Vec<String>) -> Self {
        Partition { ground, parts: vec![] }
    }

    /// Rim-label parts over the ground of their own labels in strip order.
    pub fn on_rim(parts: Vec<Vec<String>>) -> Result<Self> {
        let mut ground: Vec<RimLabel> = parts.iter().flatten().map(|x| RimLabel::parse(x)).collect::<Result<_>>()?;
        ground.sort_by_key(|r| r.key());
        Partition::new(ground.iter().map(|r| r.to_string()).collect(), parts)
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    /// Nonsingleton parts in ground order.
    pub fn parts(&self) -> &[Vec<String>] {
        &self.parts
    }

    pub fn support(&self) -> Vec<String> {
        let set: HashSet<&String> = self.parts.iter().flatten().collect();
        self.ground.iter().filter(|x| set.contains(x)).cloned().collect()
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn with_ground(&self, ground: Vec<String>) -> Result<Self> {
        Partition::new(ground, self.parts.clone())
    }

    /// Same parts, ground rotated left by `r`.
    pub fn rotated(&self, r: usize) -> Self {
        let n = self.ground.len().max(1);
        let mut g = self.ground.clone();
        g.rotate_left(r % n);
        Partition::new(g, self.parts.clone()).expect("rotation keeps labels")
    }

    /// Shifts every rim label by `d` (the ground must consist of rim labels).
    pub fn shifted(&self, d: i64) -> Result<Self> {
        let sh = |x: &String| RimLabel::parse(x).map(|r| r.shift(d).to_string());
        let g = self.ground.iter().map(sh).collect::<Result<_>>()?;
        let p = self.parts.iter().map(|p| p.iter().map(sh).collect::<Result<_>>()).collect::<Result<_>>()?;
        Partition::new(g, p)
    }

    fn positions(&self) -> HashMap<&str, usize> {
        self.ground.iter().enumerate().map(|(i, x)| (x.as_str(), i)).collect()
    }

    fn masks(&self) -> Result<Vec<u128>> {
        if self.ground.len() > 128 {
            return Err(Error::TooLarge(format!("ground of {} labels", self.ground.len())));
        }
        let pos = self.positions();
        Ok(canon(self.parts.iter().map(|p| p.iter().fold(0u128, |m, x| m | 1 << pos[x.as_str()])).collect()))
    }

    fn from_masks(ground: &[String], labels: &[String], masks: &[u128]) -> Self {
        let parts = masks.iter().map(|&m| bits(m).map(|b| labels[b as usize].clone()).collect()).collect();
        Partition::new(ground.to_vec(), parts).expect("masks come from the ground")
    }

    pub fn is_planar(&self) -> bool {
        let pos = self.positions();
        for (i, p) in self.parts.iter().enumerate() {
            for q in &self.parts[i + 1..] {
                let mut tags: Vec<(usize, bool)> =
                    p.iter().map(|x| (pos[x.as_str()], true)).chain(q.iter().map(|x| (pos[x.as_str()], false))).collect();
                tags.sort();
                let switches = tags.windows(2).filter(|w| w[0].1 != w[1].1).count();
                if switches >= 3 {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("(uncrossing)");
        }
        let ps: Vec<String> = self.parts.iter().map(|p| p.join(",")).collect();
        write!(f, "{{{}}}", ps.join(" | "))
    }
}

pub fn is_planar(p: &Partition) -> bool {
    p.is_planar()
}

fn bits(m: u128) -> impl Iterator<Item = u32> {
    let mut m = m;
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros();
            m &= m - 1;
            b
        })
    })
}

fn next_after(m: u128, x: u32) -> Option<u32> {
    if x >= 127 {
        return None;
    }
    let r = m & (!0u128 << (x + 1));
    (r != 0).then(|| r.trailing_zeros())
}

fn canon(mut v: Vec<u128>) -> Vec<u128> {
    v.retain(|m| m.count_ones() >= 2);
    v.sort_unstable();
    v
}

/// Lexicographically smallest crossing `a<b<c<d` with `a,c` in one part and `b,d` in another.
fn find_crossing(parts: &[u128]) -> Option<(usize, usize, [u32; 4])> {
    let mut best: Option<(usize, usize, [u32; 4])> = None;
    for (i, &p) in parts.iter().enumerate() {
        for (j, &q) in parts.iter().enumerate() {
            if i == j {
                continue;
            }
            for a in bits(p) {
                let Some(b) = next_after(q, a) else { break };
                let Some(c) = next_after(p, b) else { break };
                let Some(d) = next_after(q, c) else { break };
                let quad = [a, b, c, d];
                if best.as_ref().map_or(true, |x| quad < x.2) {
                    best = Some((i, j, quad));
                }
                break;
            }
        }
    }
    best
}

fn between(m: u128, lo: u32, hi: u32) -> u128 {
    // elements strictly between lo and hi
    let above = if lo >= 127 { 0 } else { !0u128 << (lo + 1) };
    let below = if hi == 0 { 0 } else { (1u128 << hi) - 1 };
    m & above & below
}

/// One application of Rule 1, or `None` when `rho` is planar.
///
/// The crossing parts `P ∋ a, c` and `Q ∋ b, d` are cut along the chords `bd` and `ac`:
/// `C` is the part of `P` strictly between `b` and `d`, `B` the part of `Q` strictly between
/// `a` and `c`. Cutting on singletons instead can loop forever, e.g. on `{1,3,5 | 2,4,6}`.
fn rule1_terms(rho: &[u128]) -> Option<Vec<(i64, Vec<u128>)>> {
    let (i, j, [a, b, c, d]) = find_crossing(rho)?;
    let (p, q) = (rho[i], rho[j]);
    let rest: Vec<u128> = rho.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|x| *x.1).collect();
    let cc = between(p, b, d);
    let aa = p & !cc;
    let bb = between(q, a, c);
    let dd = q & !bb;
    let term = |x: u128, y: u128| {
        let mut v = rest.clone();
        v.push(x);
        v.push(y);
        canon(v)
    };
    Some(vec![
        (1, term(aa, bb | cc | dd)),
        (1, term(bb, aa | cc | dd)),
        (1, term(cc, aa | bb | dd)),
        (1, term(dd, aa | bb | cc)),
        (-1, term(aa | bb, cc | dd)),
        (-1, term(aa | dd, bb | cc)),
    ])
}

/// Number of parts, singletons included, on a ground of `g` labels.
fn part_count(rho: &[u128], g: usize) -> usize {
    let covered: u32 = rho.iter().map(|m| m.count_ones()).sum();
    g - covered as usize + rho.len()
}

fn key_string(rho: &[u128]) -> String {
    format!("{rho:x?}")
}

#[derive(Default)]
struct FullExpander {
    g: usize,
    memo: HashMap<Vec<u128>, BTreeMap<Vec<u128>, i64>>,
    stack: HashSet<Vec<u128>>,
}

impl FullExpander {
    fn expand(&mut self, rho: &[u128]) -> Result<BTreeMap<Vec<u128>, i64>> {
        if let Some(r) = self.memo.get(rho) {
            return Ok(r.clone());
        }
        let out = match rule1_terms(rho) {
            None => BTreeMap::from([(rho.to_vec(), 1)]),
            Some(terms) => {
                if !self.stack.insert(rho.to_vec()) {
                    return Err(Error::RuleCycle(key_string(rho)));
                }
                let mut acc: BTreeMap<Vec<u128>, i64> = BTreeMap::new();
                for (s, t) in terms {
                    assert_eq!(part_count(&t, self.g), part_count(rho, self.g), "Rule 1 changed the part count");
                    for (k, v) in self.expand(&t)? {
                        *acc.entry(k).or_insert(0) += s * v;
                    }
                }
                acc.retain(|_, v| *v != 0);
                self.stack.remove(rho);
                acc
            }
        };
        self.memo.insert(rho.to_vec(), out.clone());
        Ok(out)
    }
}

/// Expands `tau` into planar partitions by Rule 1; the map holds the coefficients `P_{sigma,tau}`.
pub fn rule1_expand(tau: &Partition) -> Result<BTreeMap<Partition, i64>> {
    let masks = tau.masks()?;
    let mut ex = FullExpander { g: tau.ground.len(), ..Default::default() };
    let out = ex.expand(&masks)?;
    Ok(out.into_iter().map(|(k, v)| (Partition::from_masks(&tau.ground, &tau.ground, &k), v)).collect())
}

/// The same expansion computed in the ground rotated by `r`: Rule 1 then cuts different
/// crossings, but the coefficients must not change.
pub fn rule1_expand_rotated(tau: &Partition, r: usize) -> Result<BTreeMap<Partition, i64>> {
    let out = rule1_expand(&tau.rotated(r))?;
    out.into_iter().map(|(k, v)| Ok((k.with_ground(tau.ground.clone())?, v))).collect()
}

/// Coefficient of one fixed planar `sigma` in the expansion of `rho`, with pruning.
struct Coefficient<'a> {
    sigma: Vec<u128>,
    s_mask: u128,
    allowed: &'a [u128],
    memo: HashMap<Vec<u128>, i64>,
    stack: HashSet<Vec<u128>>,
}

impl Coefficient<'_> {
    fn coef(&mut self, rho: &[u128]) -> Result<i64> {
        if let Some(&v) = self.memo.get(rho) {
            return Ok(v);
        }
        let union = rho.iter().fold(0u128, |a, b| a | b);
        let pruned = self.s_mask & !union != 0
            || rho.iter().any(|&p| bits(p).any(|x| p & !self.allowed[x as usize] & !(1u128 << x) != 0));
        let v = if pruned {
            0
        } else {
            match rule1_terms(rho) {
                None => i64::from(rho == self.sigma.as_slice()),
                Some(terms) => {
                    if !self.stack.insert(rho.to_vec()) {
                        return Err(Error::RuleCycle(key_string(rho)));
                    }
                    let mut s = 0;
                    for (sign, t) in terms {
                        s += sign * self.coef(&t)?;
                    }
                    self.stack.remove(rho);
                    s
                }
            }
        };
        self.memo.insert(rho.to_vec(), v);
        Ok(v)
    }
}

#[derive(Clone, Debug)]
pub struct UprOptions {
    /// Largest allowed support of `sigma`.
    pub support_limit: usize,
    /// Ground labels that must stay singletons in every `tau` (cut vertices of a truncation).
    pub forced_singletons: Vec<String>,
}

impl Default for UprOptions {
    fn default() -> Self {
        UprOptions { support_limit: DEFAULT_SUPPORT_LIMIT, forced_singletons: vec![] }
    }
}

/// The terms `P_{sigma,tau} L_tau` of `uPr(sigma)`: each `tau` as a list of parts.
#[derive(Clone, Debug)]
pub struct UprExpansion {
    pub terms: Vec<(Vec<Vec<String>>, i64)>,
}

/// Finds every `tau` with a nonzero coefficient of `sigma`.
///
/// A contributing `tau` has the same number of parts as `sigma` over the whole ground, and each
/// of its parts only joins pairs `x, y` such that both arcs from `x` to `y` contain two
/// elements of a part of `sigma`. So `tau` covers the support `S` of `sigma` plus at most
/// `|S| - 2r` further labels, `r` being the number of nonsingleton parts of `sigma`.
pub fn upr_expansion(sigma: &Partition, opts: &UprOptions) -> Result<UprExpansion> {
    if !sigma.is_planar() {
        return Err(Error::InvalidNetwork(format!("{sigma} is not planar")));
    }
    let g = sigma.ground.len();
    let pos = sigma.positions();
    let s_set: Vec<usize> = sigma.support().iter().map(|x| pos[x.as_str()]).collect();
    if s_set.len() > opts.support_limit {
        return Err(Error::SupportTooLarge { size: s_set.len(), limit: opts.support_limit });
    }
    let r = sigma.num_parts();
    if r == 0 {
        return Ok(UprExpansion { terms: vec![(vec![], 1)] });
    }
    // prefix[p][i] = elements of part p at positions < i
    let prefix: Vec<Vec<usize>> = sigma
        .parts
        .iter()
        .map(|p| {
            let mut mark = vec![0usize; g + 1];
            for x in p {
                mark[pos[x.as_str()] + 1] = 1;
            }
            for i in 0..g {
                mark[i + 1] += mark[i];
            }
            mark
        })
        .collect();
    let arc_ok = |i: usize, j: usize| {
        prefix.iter().any(|c| {
            let n = if i <= j { c[j + 1] - c[i] } else { c[g] - c[i] + c[j + 1] };
            n >= 2
        })
    };
    let allowed = |i: usize, j: usize| i != j && arc_ok(i, j) && arc_ok(j, i);
    let forced: HashSet<&str> = opts.forced_singletons.iter().map(String::as_str).collect();
    let s_lookup: HashSet<usize> = s_set.iter().copied().collect();
    let cand: Vec<usize> = (0..g)
        .filter(|&x| s_lookup.contains(&x) || (!forced.contains(sigma.ground[x].as_str()) && (0..g).any(|y| allowed(x, y))))
        .collect();
    if cand.len() > 128 {
        return Err(Error::TooLarge(format!("{} candidate labels", cand.len())));
    }
    let labels: Vec<String> = cand.iter().map(|&x| sigma.ground[x].clone()).collect();
    let allowed_mask: Vec<u128> = cand
        .iter()
        .map(|&x| cand.iter().enumerate().filter(|(_, &y)| allowed(x, y)).fold(0u128, |m, (k, _)| m | 1 << k))
        .collect();
    let cpos: HashMap<usize, usize> = cand.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let sig_masks = canon(
        sigma.parts.iter().map(|p| p.iter().fold(0u128, |m, x| m | 1 << cpos[&pos[x.as_str()]])).collect(),
    );
    let s_mask = sig_masks.iter().fold(0u128, |a, b| a | b);
    let s_idx: Vec<u32> = bits(s_mask).collect();
    let others: Vec<u32> = (0..cand.len() as u32).filter(|k| s_mask >> k & 1 == 0).collect();
    let mut engine =
        Coefficient { sigma: sig_masks, s_mask, allowed: &allowed_mask, memo: HashMap::new(), stack: HashSet::new() };
    let mut terms = Vec::new();
    let max_extra = s_idx.len() - 2 * r;
    for extra in 0..=max_extra.min(others.len()) {
        for a_set in combinations(&others, extra) {
            let mut t: Vec<u32> = s_idx.iter().chain(&a_set).copied().collect();
            t.sort_unstable();
            let mut taus = Vec::new();
            set_partitions(&t, r + extra, &allowed_mask, &mut Vec::new(), 0, &mut taus);
            for tau in taus {
                let tau = canon(tau);
                let c = engine.coef(&tau)?;
                if c != 0 {
                    let parts = tau.iter().map(|&m| bits(m).map(|b| labels[b as usize].clone()).collect()).collect();
                    terms.push((parts, c));
                }
            }
        }
    }
    Ok(UprExpansion { terms })
}

fn combinations(xs: &[u32], k: usize) -> Vec<Vec<u32>> {
    fn rec(xs: &[u32], k: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..xs.len() {
            if xs.len() - i < k - cur.len() {
                break;
            }
            cur.push(xs[i]);
            rec(xs, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(xs, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Partitions of `t` into exactly `nb` blocks of size at least two, each pairwise allowed.
fn set_partitions(t: &[u32], nb: usize, allowed: &[u128], blocks: &mut Vec<u128>, i: usize, out: &mut Vec<Vec<u128>>) {
    let singles = blocks.iter().filter(|b| b.count_ones() == 1).count();
    let left = t.len() - i;
    if singles + 2 * (nb - blocks.len()) > left {
        return;
    }
    if i == t.len() {
        if blocks.len() == nb {
            out.push(blocks.clone());
        }
        return;
    }
    let x = t[i];
    for k in 0..blocks.len() {
        if blocks[k] & !allowed[x as usize] == 0 {
            blocks[k] |= 1 << x;
            set_partitions(t, nb, allowed, blocks, i + 1, out);
            blocks[k] &= !(1u128 << x);
        }
    }
    if blocks.len() < nb {
        blocks.push(1 << x);
        set_partitions(t, nb, allowed, blocks, i + 1, out);
        blocks.pop();
    }
}

/// Sum over spanning trees of `part` of the product of `L_{ij}` over tree edges.
pub fn tree_sum<T: Scalar>(part: &[String], entry: &impl Fn(&str, &str) -> Option<T>) -> Result<T> {
    let get = |a: &str, b: &str| entry(a, b).ok_or_else(|| Error::MissingEntry(a.to_string(), b.to_string()));
    match part.len() {
        0 | 1 => Ok(T::one()),
        2 => get(&part[0], &part[1]),
        k => {
            let mut lap = vec![vec![T::zero(); k]; k];
            for i in 0..k {
                for j in 0..k {
                    if i != j {
                        let w = get(&part[i], &part[j])?;
                        lap[i][j] = -w.clone();
                        lap[i][i] = lap[i][i].clone() + w;
                    }
                }
            }
            let minor: Vec<Vec<T>> = lap[1..].iter().map(|row| row[1..].to_vec()).collect();
            Ok(det(&minor))
        }
    }
}

/// `uPr(sigma)` evaluated at concrete response entries.
pub fn upr_value<T: Scalar>(
    sigma: &Partition,
    entry: &impl Fn(&str, &str) -> Option<T>,
    opts: &UprOptions,
) -> Result<T> {
    let ex = upr_expansion(sigma, opts)?;
    let mut cache: HashMap<Vec<String>, T> = HashMap::new();
    let mut total = T::zero();
    for (parts, c) in &ex.terms {
        let mut t = T::from_rational(&Rational::from_integer(BigInt::from(*c)));
        for p in parts {
            let v = match cache.get(p) {
                Some(v) => v.clone(),
                None => {
                    let v = tree_sum(p, entry)?;
                    cache.insert(p.clone(), v.clone());
                    v
                }
            };
            t = t * v;
        }
        total = total + t;
    }
    Ok(total)
}

pub fn matrix_entry<T: Scalar>(m: &LabeledMatrix<T>) -> impl Fn(&str, &str) -> Option<T> + '_ {
    move |a, b| m.get(a, b).cloned()
}

/// A monomial: a multiset of unordered symbols `L_{ij}`, each stored with `i <= j`.
pub type Monomial = Vec<(String, String)>;

fn symbol(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrovePolynomial {
    pub terms: BTreeMap<Monomial, BigInt>,
}

impl GrovePolynomial {
    pub fn one() -> Self {
        GrovePolynomial { terms: BTreeMap::from([(vec![], BigInt::one())]) }
    }

    pub fn var(a: &str, b: &str) -> Self {
        GrovePolynomial { terms: BTreeMap::from([(vec![symbol(a, b)], BigInt::one())]) }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, other: &GrovePolynomial, scale: &BigInt) {
        for (m, c) in &other.terms {
            let e = self.terms.entry(m.clone()).or_insert_with(BigInt::zero);
            *e += c * scale;
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn mul(&self, other: &GrovePolynomial) -> GrovePolynomial {
        let mut out = GrovePolynomial::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m: Monomial = m1.iter().chain(m2).cloned().collect();
                m.sort();
                *out.terms.entry(m).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn degrees(&self) -> BTreeSet<usize> {
        self.terms.keys().map(Vec::len).collect()
    }

    pub fn is_homogeneous(&self, degree: usize) -> bool {
        self.terms.keys().all(|m| m.len() == degree)
    }

    pub fn symbols(&self) -> BTreeSet<(String, String)> {
        self.terms.keys().flatten().cloned().collect()
    }

    pub fn evaluate<T: Scalar>(&self, entry: &impl Fn(&str, &str) -> Option<T>) -> Result<T> {
        let mut total = T::zero();
        for (m, c) in &self.terms {
            let mut t = T::from_rational(&Rational::from_integer(c.clone()));
            for (a, b) in m {
                t = t * entry(a, b).ok_or_else(|| Error::MissingEntry(a.clone(), b.clone()))?;
            }
            total = total + t;
        }
        Ok(total)
    }
}

impl fmt::Display for GrovePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let body: Vec<String> = m.iter().map(|(a, b)| format!("L[{a},{b}]")).collect();
            let body = body.join("*");
            let sign = if c < &BigInt::zero() { "-" } else if first { "" } else { "+" };
            let mag = if c < &BigInt::zero() { -c.clone() } else { c.clone() };
            if !first {
                f.write_str(" ")?;
            }
            match (body.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{sign}{mag}")?,
                (false, true) => write!(f, "{sign}{body}")?,
                (false, false) => write!(f, "{sign}{mag}*{body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl Serialize for GrovePolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            coef: String,
            monomial: &'a Monomial,
        }
        let ts: Vec<Term> = self.terms.iter().map(|(m, c)| Term { coef: c.to_string(), monomial: m }).collect();
        ts.serialize(s)
    }
}

fn tree_polynomial(part: &[String]) -> Result<GrovePolynomial> {
    let k = part.len();
    if k > TREE_PART_LIMIT {
        return Err(Error::TooLarge(format!("spanning trees of a part of size {k}")));
    }
    if k <= 1 {
        return Ok(GrovePolynomial::one());
    }
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let mut out = GrovePolynomial::default();
    for chosen in combinations(&(0..pairs.len() as u32).collect::<Vec<_>>(), k - 1) {
        let mut root: Vec<usize> = (0..k).collect();
        fn find(r: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while r[x] != x {
                r[x] = r[r[x]];
                x = r[x];
            }
            x
        }
        let mut tree = true;
        let mut mono = Vec::new();
        for &e in &chosen {
            let (i, j) = pairs[e as usize];
            let (a, b) = (find(&mut root, i), find(&mut root, j));
            if a == b {
                tree = false;
                break;
            }
            root[a] = b;
            mono.push(symbol(&part[i], &part[j]));
        }
        if tree {
            mono.sort();
            *out.terms.entry(mono).or_insert_with(BigInt::zero) += 1;
        }
    }
    Ok(out)
}

/// `L_tau`: the forest polynomial whose trees span the parts of `tau`.
pub fn l_tau(tau: &Partition) -> Result<GrovePolynomial> {
    tau.parts.iter().try_fold(GrovePolynomial::one(), |acc, p| Ok(acc.mul(&tree_polynomial(p)?)))
}

/// `uPr(sigma)` as a polynomial in the response entries.
pub fn upr_polynomial(sigma: &Partition, opts: &UprOptions) -> Result<GrovePolynomial> {
    let ex = upr_expansion(sigma, opts)?;
    let mut out = GrovePolynomial::default();
    for (parts, c) in &ex.terms {
        let term = parts.iter().try_fold(GrovePolynomial::one(), |acc, p| Ok::<_, Error>(acc.mul(&tree_polynomial(p)?)))?;
        out.add(&term, &BigInt::from(*c));
    }
    Ok(out)
}

/// Total grove weight by boundary partition, by exhaustive search over edge subsets.
pub fn enumerate_groves(net: &Network) -> Result<BTreeMap<Partition, Rational>> {
    let m = net.edges.len();
    if m > GROVE_EDGE_LIMIT {
        return Err(Error::TooLarge(format!("{m} edges (grove enumeration handles at most {GROVE_EDGE_LIMIT})")));
    }
    let idx: HashMap<&str, usize> = net.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
    let ends: Vec<(usize, usize)> = net.edges.iter().map(|e| (idx[e.u.as_str()], idx[e.v.as_str()])).collect();
    let nv = net.vertices.len();
    let ground = net.boundary().to_vec();
    let boundary: Vec<bool> = net.vertices.iter().map(|v| v.boundary).collect();
    let weights: Vec<&Rational> = net.edges.iter().map(|e| &e.weight.0).collect();
    let mut acc: HashMap<Vec<u8>, Rational> = HashMap::new();
    let mut dfs = Forests { ends: &ends, weights: &weights, boundary: &boundary, parent: (0..nv).collect(), acc: &mut acc };
    dfs.walk(0, Rational::one());
    let mut out = BTreeMap::new();
    let bidx: Vec<usize> = (0..nv).filter(|&i| boundary[i]).collect();
    for (key, w) in acc {
        let mut parts: BTreeMap<u8, Vec<String>> = BTreeMap::new();
        for (&i, &c) in bidx.iter().zip(&key) {
            parts.entry(c).or_default().push(net.vertices[i].id.clone());
        }
        out.insert(Partition::new(ground.clone(), parts.into_values().collect())?, w);
    }
    Ok(out)
}

/// Depth-first walk over forests, one edge decision per level, with an undoable union-find.
struct Forests<'a> {
    ends: &'a [(usize, usize)],
    weights: &'a [&'a Rational],
    boundary: &'a [bool],
    parent: Vec<usize>,
    acc: &'a mut HashMap<Vec<u8>, Rational>,
}

impl Forests<'_> {
    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn walk(&mut self, e: usize, w: Rational) {
        if e == self.ends.len() {
            let roots: Vec<usize> = (0..self.parent.len()).map(|v| self.find(v)).collect();
            let mut has_boundary = vec![false; roots.len()];
            for (v, &r) in roots.iter().enumerate() {
                has_boundary[r] |= self.boundary[v];
            }
            if roots.iter().any(|&r| !has_boundary[r]) {
                return;
            }
            let mut seen: Vec<usize> = Vec::new();
            let key = (0..roots.len())
                .filter(|&v| self.boundary[v])
                .map(|v| match seen.iter().position(|&r| r == roots[v]) {
                    Some(i) => i as u8,
                    None => {
                        seen.push(roots[v]);
                        (seen.len() - 1) as u8
                    }
                })
                .collect();
            *self.acc.entry(key).or_insert_with(Rational::zero) += w;
            return;
        }
        let (u, v) = self.ends[e];
        let (a, b) = (self.find(u), self.find(v));
        if a != b {
            self.parent[a] = b;
            self.walk(e + 1, &w * self.weights[e]);
            self.parent[a] = a;
        }
        self.walk(e + 1, w);
    }
}

/// `Pr(sigma) / Pr(uncrossing)` by enumeration.
pub fn grove_ratio(net: &Network, sigma: &Partition) -> Result<Rational> {
    let groves = enumerate_groves(net)?;
    let sigma = sigma.with_ground(net.boundary().to_vec())?;
    let unc = groves.get(&Partition::uncrossing(net.boundary().to_vec())).cloned().unwrap_or_else(Rational::zero);
    if unc.is_zero() {
        return Err(Error::NoUncrossingGrove);
    }
    Ok(groves.get(&sigma).cloned().unwrap_or_else(Rational::zero) / unc)
}

fn pair(a: RimLabel, b: RimLabel) -> Vec<String> {
    vec![a.to_string(), b.to_string()]
}

fn strip(parts: Vec<Vec<String>>) -> Partition {
    Partition::on_rim(parts).expect("rim labels")
}

fn tau_parts(k: usize) -> Vec<Vec<String>> {
    let k = k as i64;
    let mut parts: Vec<Vec<String>> = (2..=k).map(|j| pair(RimLabel::left(j), RimLabel::right(j - 1))).collect();
    parts.extend((-k..=0).map(|j| pair(RimLabel::left(j), RimLabel::right(j))));
    parts
}

/// `tau_K`: pairs `{k, (k-1)'}` for `2 <= k <= K` and `{k, k'}` for `-K <= k <= 0`.
pub fn make_tau_k(k: usize) -> Partition {
    strip(tau_parts(k))
}

/// `sigma_K`: `tau_K` with `{0, 0'}` grown to `{1, 0, 0'}`.
pub fn make_sigma_k(k: usize) -> Partition {
    let mut parts = tau_parts(k);
    for p in parts.iter_mut() {
        if p == &pair(RimLabel::left(0), RimLabel::right(0)) {
            p.insert(0, "1".into());
        }
    }
    strip(parts)
}

fn tau_low_parts(k: usize) -> Vec<Vec<String>> {
    let k = k as i64;
    let mut parts: Vec<Vec<String>> = (2..=k + 1).map(|j| pair(RimLabel::left(j), RimLabel::right(j - 1))).collect();
    parts.extend((-k..=0).map(|j| pair(RimLabel::left(j), RimLabel::right(j))));
    parts
}

/// Mirror of `tau_K` used for the low edge at `1`: pairs `{k, (k-1)'}` for `2 <= k <= K+1`
/// and `{k, k'}` for `-K <= k <= 0`.
pub fn make_tau_low(k: usize) -> Partition {
    strip(tau_low_parts(k))
}

/// `make_tau_low` with `{2, 1'}` grown to `{1, 2, 1'}`.
pub fn make_sigma_low(k: usize) -> Partition {
    let mut parts = tau_low_parts(k);
    for p in parts.iter_mut() {
        if p == &pair(RimLabel::left(2), RimLabel::right(1)) {
            p.insert(0, "1".into());
        }
    }
    strip(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{response_matrix, Edge};
    use crate::scalar::{int, rat};

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn part(ground: &[&str], parts: &[&[&str]]) -> Partition {
        Partition::new(s(ground), parts.iter().map(|p| s(p)).collect()).unwrap()
    }

    fn triangle() -> Network {
        Network::from_parts(
            &["1", "2", "3"],
            &[],
            vec![Edge::new("1", "2", int(2)), Edge::new("1", "3", int(3)), Edge::new("2", "3", int(5))],
        )
        .unwrap()
    }

    #[test]
    fn planarity() {
        let g = ["1", "2", "3", "4"];
        assert!(!part(&g, &[&["1", "3"], &["2", "4"]]).is_planar());
        assert!(part(&g, &[&["1", "2"], &["3", "4"]]).is_planar());
        assert!(part(&g, &[&["1", "4"], &["2", "3"]]).is_planar());
    }

    #[test]
    fn triangle_groves() {
        let net = triangle();
        let gr = enumerate_groves(&net).unwrap();
        let g = ["1", "2", "3"];
        assert_eq!(gr[&part(&g, &[&["1", "2"]])], int(2));
        assert_eq!(gr[&part(&g, &[&["1", "2", "3"]])], int(6 + 10 + 15));
        assert_eq!(gr[&Partition::uncrossing(s(&g))], int(1));
        let l = response_matrix(&net).unwrap();
        let sig = part(&g, &[&["1", "2"]]);
        let poly = upr_polynomial(&sig, &UprOptions::default()).unwrap();
        assert_eq!(poly.evaluate(&matrix_entry(&l)).unwrap(), grove_ratio(&net, &sig).unwrap());
    }

    #[test]
    fn star_ratio_matches_response() {
        let net = Network::from_parts(
            &["1", "2", "3"],
            &["c"],
            vec![Edge::new("1", "c", int(3)), Edge::new("2", "c", int(3)), Edge::new("3", "c", int(3))],
        )
        .unwrap();
        let sig = part(&["1", "2", "3"], &[&["1", "2"]]);
        assert_eq!(grove_ratio(&net, &sig).unwrap(), int(1));
        assert!(enumerate_groves(&net).unwrap().values().all(|w| w > &int(0)));
    }

    #[test]
    fn rule1_on_basic_crossing() {
        let g = ["1", "2", "3", "4"];
        let out = rule1_expand(&part(&g, &[&["1", "3"], &["2", "4"]])).unwrap();
        let expect: BTreeMap<Partition, i64> = [
            (part(&g, &[&["2", "3", "4"]]), 1),
            (part(&g, &[&["1", "3", "4"]]), 1),
            (part(&g, &[&["1", "2", "4"]]), 1),
            (part(&g, &[&["1", "2", "3"]]), 1),
            (part(&g, &[&["1", "2"], &["3", "4"]]), -1),
            (part(&g, &[&["1", "4"], &["2", "3"]]), -1),
        ]
        .into_iter()
        .collect();
        assert_eq!(out, expect);
        let planar = part(&g, &[&["1", "2"]]);
        assert_eq!(rule1_expand(&planar).unwrap(), BTreeMap::from([(planar, 1)]));
    }

    #[test]
    fn interleaved_triples_terminate() {
        let g = ["1", "2", "3", "4", "5", "6"];
        let tau = part(&g, &[&["1", "3", "5"], &["2", "4", "6"]]);
        let a = rule1_expand(&tau).unwrap();
        for r in 1..6 {
            assert_eq!(rule1_expand_rotated(&tau, r).unwrap(), a);
        }
        assert!(a.keys().all(|p| p.is_planar()));
    }

    #[test]
    fn forest_polynomials() {
        let g = ["1", "2", "3", "4"];
        assert_eq!(l_tau(&part(&g, &[&["1", "2"]])).unwrap(), GrovePolynomial::var("1", "2"));
        let t = l_tau(&part(&g, &[&["1", "2", "3"]])).unwrap();
        assert_eq!(t.terms.len(), 3);
        let ones = |_: &str, _: &str| Some(int(1));
        assert_eq!(t.evaluate(&ones).unwrap(), int(3));
        let t = l_tau(&part(&g, &[&["1", "2"], &["3", "4"]])).unwrap();
        assert_eq!(t, GrovePolynomial::var("1", "2").mul(&GrovePolynomial::var("3", "4")));
        assert_eq!(tree_sum(&s(&["1", "2", "3", "4"]), &ones).unwrap(), int(16));
    }

    #[test]
    fn pair_sigma_gives_its_entry() {
        let g = ["1", "2", "3", "4"];
        let p = upr_polynomial(&part(&g, &[&["1", "2"]]), &UprOptions::default()).unwrap();
        assert_eq!(p, GrovePolynomial::var("1", "2"));
        let u = upr_polynomial(&Partition::uncrossing(s(&g)), &UprOptions::default()).unwrap();
        assert_eq!(u, GrovePolynomial::one());
    }

    #[test]
    fn missing_entry_reported() {
        let p = GrovePolynomial::var("1", "9");
        let e = |a: &str, b: &str| if a == "1" && b == "2" { Some(rat(1, 2)) } else { None };
        assert!(matches!(p.evaluate(&e), Err(Error::MissingEntry(..))));
    }

    #[test]
    fn estimator_partitions() {
        let t1 = make_tau_k(1);
        assert_eq!(t1.support(), s(&["-1", "0", "0'", "-1'"]));
        let t2 = make_tau_k(2);
        assert!(t2.parts().contains(&s(&["2", "1'"])));
        let s2 = make_sigma_k(2);
        assert!(s2.parts().contains(&s(&["0", "1", "0'"])));
        for k in 1..=4 {
            assert_eq!(make_tau_k(k).support().len(), 2 * (k - 1) + 2 * (k + 1));
            assert_eq!(make_sigma_k(k).support().len(), 4 * k + 1);
            assert!(make_sigma_k(k).is_planar() && make_sigma_low(k).is_planar());
        }
        assert!(make_sigma_low(1).parts().contains(&s(&["1", "2", "1'"])));
    }

    #[test]
    fn support_guard() {
        let sig = make_sigma_k(4);
        let err = upr_expansion(&sig, &UprOptions::default()).unwrap_err();
        assert!(matches!(err, Error::SupportTooLarge { size: 17, limit: 16 }));
    }

    #[test]
    fn partition_json() {
        let p: Partition = serde_json::from_str(r#"{"support":["1","2","3"],"parts":[["3","1"]]}"#).unwrap();
        assert_eq!(p.parts(), &[s(&["1", "3"])]);
        assert!(serde_json::from_str::<Partition>(r#"{"support":["1"],"parts":[["1","2"]]}"#).is_err());
    }
}
