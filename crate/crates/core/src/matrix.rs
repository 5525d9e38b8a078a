//! Dense square matrices whose rows and columns carry vertex labels.

use std::collections::{HashMap, HashSet};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledMatrix<T> {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<T>,
}

impl<T: Scalar> LabeledMatrix<T> {
    pub fn zeros(labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        Self::from_data(labels, vec![T::zero(); n * n])
    }

    pub fn from_data(labels: Vec<String>, data: Vec<T>) -> Result<Self> {
        let n = labels.len();
        if data.len() != n * n {
            return Err(Error::BadDimensions(format!(
                "{} entries for {n} labels",
                data.len()
            )));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate label {l}")));
            }
        }
        Ok(LabeledMatrix { labels, index, data })
    }

    pub fn from_rows(labels: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self> {
        let data = rows.into_iter().flatten().collect();
        Self::from_data(labels, data)
    }

    /// Same entries under new labels, position by position.
    pub fn relabeled(self, labels: Vec<String>) -> Result<Self> {
        Self::from_data(labels, self.data)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n() + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        let n = self.n();
        &mut self.data[i * n + j]
    }

    pub fn get(&self, a: &str, b: &str) -> Option<&T> {
        Some(self.at(self.position(a)?, self.position(b)?))
    }

    /// Entry lookup that reports the missing label.
    pub fn entry(&self, a: &str, b: &str) -> Result<&T> {
        self.get(a, b)
            .ok_or_else(|| Error::MissingEntry(a.to_string(), b.to_string()))
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: T) {
        let e = self.at_mut(i, j);
        *e = e.clone() + v;
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LabeledMatrix<U> {
        LabeledMatrix {
            labels: self.labels.clone(),
            index: self.index.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }

    pub fn row_sum(&self, i: usize) -> T {
        (0..self.n()).fold(T::zero(), |acc, j| acc + self.at(i, j).clone())
    }

    /// Copy restricted to `keep`, in that order.
    pub fn restrict(&self, keep: &[String]) -> Result<Self> {
        let pos: Vec<usize> = keep
            .iter()
            .map(|l| self.position(l).ok_or_else(|| Error::UnknownVertex(l.clone())))
            .collect::<Result<_>>()?;
        let data = pos
            .iter()
            .flat_map(|&i| pos.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.at(i, j).clone())
            .collect();
        Self::from_data(keep.to_vec(), data)
    }

    /// Rectangular block with the given row and column labels.
    pub fn block(&self, rows: &[String], cols: &[String]) -> Result<Vec<Vec<T>>> {
        let find = |l: &String| self.position(l).ok_or_else(|| Error::UnknownVertex(l.clone()));
        let r: Vec<usize> = rows.iter().map(find).collect::<Result<_>>()?;
        let c: Vec<usize> = cols.iter().map(find).collect::<Result<_>>()?;
        Ok(r.iter()
            .map(|&i| c.iter().map(|&j| self.at(i, j).clone()).collect())
            .collect())
    }

    /// `M_JJ - M_JI M_II^{-1} M_IJ` where `I = interior` and `J` is everything else, in the original order.
    pub fn schur_complement(&self, interior: &[String]) -> Result<Self> {
        let n = self.n();
        let mut is_int = vec![false; n];
        let mut int_idx = Vec::with_capacity(interior.len());
        for l in interior {
            let i = self
                .position(l)
                .ok_or_else(|| Error::UnknownVertex(l.clone()))?;
            if !is_int[i] {
                is_int[i] = true;
                int_idx.push(i);
            }
        }
        if int_idx.is_empty() {
            return Ok(self.clone());
        }
        let mut rows: Vec<Vec<T>> = (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].to_vec())
            .collect();
        let mut live_col = vec![true; n];
        let mut free_rows: HashSet<usize> = int_idx.iter().copied().collect();
        let mut dead_row = vec![false; n];
        for &c in &int_idx {
            let pick = if T::EXACT && free_rows.contains(&c) && !rows[c][c].is_zero() {
                Some(c)
            } else {
                let mut best: Option<(f64, usize)> = None;
                let mut cand: Vec<usize> = free_rows.iter().copied().collect();
                cand.sort_unstable();
                for r in cand {
                    let s = rows[r][c].pivot_score();
                    if s > 0.0 && best.map_or(true, |(bs, _)| s > bs) {
                        best = Some((s, r));
                    }
                }
                best.map(|(_, r)| r)
            };
            let r = pick.ok_or_else(|| Error::SingularBlock(self.labels[c].clone()))?;
            free_rows.remove(&r);
            dead_row[r] = true;
            live_col[c] = false;
            let piv = rows[r][c].clone();
            let support: Vec<usize> = (0..n)
                .filter(|&j| live_col[j] && !rows[r][j].is_zero())
                .collect();
            let prow: Vec<T> = support.iter().map(|&j| rows[r][j].clone()).collect();
            for x in 0..n {
                if dead_row[x] || rows[x][c].is_zero() {
                    continue;
                }
                let f = rows[x][c].clone() / piv.clone();
                for (k, &j) in support.iter().enumerate() {
                    let v = rows[x][j].clone() - f.clone() * prow[k].clone();
                    rows[x][j] = v;
                }
                rows[x][c] = T::zero();
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&i| !is_int[i]).collect();
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let data = keep
            .iter()
            .flat_map(|&i| keep.iter().map(move |&j| (i, j)))
            .map(|(i, j)| rows[i][j].clone())
            .collect();
        Self::from_data(labels, data)
    }
}

/// Determinant by elimination with pivoting; exact for rationals.
pub fn det<T: Scalar>(m: &[Vec<T>]) -> T {
    let k = m.len();
    let mut a: Vec<Vec<T>> = m.to_vec();
    let mut d = T::one();
    for c in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for (r, row) in a.iter().enumerate().skip(c) {
            let s = row[c].pivot_score();
            if s > 0.0 && best.map_or(true, |(bs, _)| s > bs) {
                best = Some((s, r));
            }
        }
        let Some((_, r)) = best else {
            return T::zero();
        };
        if r != c {
            a.swap(r, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d = d * piv.clone();
        for r in c + 1..k {
            if a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone() / piv.clone();
            for j in c..k {
                let v = a[r][j].clone() - f.clone() * a[c][j].clone();
                a[r][j] = v;
            }
        }
    }
    d
}

/// Solves `A X = B` for square invertible `A`.
pub fn solve<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let k = a.len();
    let w = b.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb).cloned().collect())
        .collect();
    for c in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for (r, row) in m.iter().enumerate().skip(c) {
            let s = row[c].pivot_score();
            if s > 0.0 && best.map_or(true, |(bs, _)| s > bs) {
                best = Some((s, r));
            }
        }
        let (_, r) = best.ok_or_else(|| Error::SingularBlock(format!("column {c}")))?;
        m.swap(r, c);
        let piv = m[c][c].clone();
        for v in m[c].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        let prow = m[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                *x = x.clone() - f.clone() * p.clone();
            }
        }
    }
    Ok(m.into_iter().map(|row| row[k..k + w].to_vec()).collect())
}

pub fn inverse<T: Scalar>(a: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let k = a.len();
    let id: Vec<Vec<T>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    solve(a, &id)
}

pub fn matmul<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    let inner = b.len();
    let w = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..w)
                .map(|j| {
                    (0..inner).fold(T::zero(), |acc, t| {
                        if row[t].is_zero() || b[t][j].is_zero() {
                            acc
                        } else {
                            acc + row[t].clone() * b[t][j].clone()
                        }
                    })
                })
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    let w = a.first().map_or(0, Vec::len);
    (0..w).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

impl<T: Scalar> Serialize for LabeledMatrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.n();
        let rows: Vec<Vec<String>> = (0..n)
            .map(|i| (0..n).map(|j| self.at(i, j).render()).collect())
            .collect();
        let mut st = s.serialize_struct("LabeledMatrix", 2)?;
        st.serialize_field("labels", &self.labels)?;
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn empty_complement_is_identity() {
        let m = LabeledMatrix::from_rows(
            labels(&["1", "2"]),
            vec![vec![int(-2), int(2)], vec![int(2), int(-2)]],
        )
        .unwrap();
        assert_eq!(m.schur_complement(&[]).unwrap(), m);
    }

    #[test]
    fn path_complement_is_series() {
        let m = LabeledMatrix::from_rows(
            labels(&["1", "m", "2"]),
            vec![
                vec![int(-2), int(2), int(0)],
                vec![int(2), int(-4), int(2)],
                vec![int(0), int(2), int(-2)],
            ],
        )
        .unwrap();
        let s = m.schur_complement(&labels(&["m"])).unwrap();
        assert_eq!(s.labels(), &labels(&["1", "2"])[..]);
        assert_eq!(s.get("1", "2"), Some(&int(1)));
        assert_eq!(s.get("1", "1"), Some(&int(-1)));
    }

    #[test]
    fn zero_diagonal_needs_pivoting() {
        // [[0,1],[1,0]] on the interior is invertible although both diagonals vanish
        let m = LabeledMatrix::from_rows(
            labels(&["b", "x", "y"]),
            vec![
                vec![int(1), int(1), int(2)],
                vec![int(1), int(0), int(1)],
                vec![int(2), int(1), int(0)],
            ],
        )
        .unwrap();
        let s = m.schur_complement(&labels(&["x", "y"])).unwrap();
        // 1 - [1 2] [[0,1],[1,0]]^{-1} [1 2]^T = 1 - 4
        assert_eq!(s.get("b", "b"), Some(&int(-3)));
    }

    #[test]
    fn singular_block_detected() {
        let m = LabeledMatrix::from_rows(
            labels(&["b", "x"]),
            vec![vec![int(1), int(1)], vec![int(1), int(0)]],
        )
        .unwrap();
        assert!(matches!(
            m.schur_complement(&labels(&["x"])),
            Err(Error::SingularBlock(_))
        ));
    }

    #[test]
    fn det_and_inverse() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        assert_eq!(det(&a), int(5));
        let inv = inverse(&a).unwrap();
        assert_eq!(inv[0][0], rat(3, 5));
        assert_eq!(matmul(&a, &inv)[1][1], Rational::from_integer(1.into()));
        assert_eq!(det::<Rational>(&[]), int(1));
    }
}
