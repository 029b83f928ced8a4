//! ABF and half-lattice path models: validation, weights, vertex words,
//! exhaustive enumeration and brute-force generating functions.
//!
//! Everything here is deliberately naive. These routines are the oracle
//! against which the bosonic and fermionic expressions are checked.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::qpoly::QExponent;
use crate::QPoly;

/// A vertex type: `N` for a peak or valley, `S` for a straight vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    N,
    S,
}

/// The sequence of vertex types of a path, one per vertex `0..=L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexWord(pub Vec<Symbol>);

impl VertexWord {
    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// Path length `L`; the word has `L + 1` symbols.
    pub fn path_len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// Number of `S` symbols.
    pub fn straight_count(&self) -> usize {
        self.0.iter().filter(|&&s| s == Symbol::S).count()
    }

    /// Positions of the `N` symbols, ascending.
    pub fn n_positions(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == Symbol::N)
            .map(|(i, _)| i)
            .collect()
    }

    /// Builds a word of length `len` with `N` exactly at `positions`.
    pub fn from_n_positions(len: usize, positions: &[usize]) -> Self {
        let mut v = vec![Symbol::S; len];
        for &j in positions {
            v[j] = Symbol::N;
        }
        VertexWord(v)
    }
}

impl fmt::Display for VertexWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Symbol::N => "N",
                Symbol::S => "S",
            })?;
        }
        Ok(())
    }
}

impl FromStr for VertexWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .trim()
            .chars()
            .map(|c| match c {
                'N' | 'n' => Ok(Symbol::N),
                'S' | 's' => Ok(Symbol::S),
                other => Err(Error::MalformedInput(format!("vertex symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if symbols.is_empty() {
            return Err(Error::MalformedInput("empty vertex word".into()));
        }
        Ok(VertexWord(symbols))
    }
}

/// An ABF path `h_{-1}, h_0, ..., h_L, h_{L+1}` in the band `1..=p`, with
/// `h_{-1} = a + 1 - 2e` and `h_{L+1} = b + 1 - 2f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbfPath {
    p: i64,
    heights: Vec<i64>,
}

fn pre_flag(a: i64, h_before: i64) -> Option<u8> {
    match a + 1 - h_before {
        0 => Some(0),
        2 => Some(1),
        _ => None,
    }
}

impl AbfPath {
    /// Validates and wraps a full height sequence including both segments.
    pub fn new(p: i64, heights: Vec<i64>) -> Result<Self> {
        if heights.len() < 3 {
            return Err(Error::MalformedInput("a path needs h_-1, h_0 and h_L+1".into()));
        }
        if heights.windows(2).any(|w| (w[0] - w[1]).abs() != 1) {
            return Err(Error::MalformedInput(format!("non-unit step in {heights:?}")));
        }
        let body = &heights[1..heights.len() - 1];
        if body.iter().any(|&h| h < 1 || h > p) {
            return Err(Error::MalformedInput(format!(
                "heights {heights:?} leave the band 1..={p}"
            )));
        }
        Ok(AbfPath { p, heights })
    }

    /// Reconstructs the path with `h_0 = a`, `h_{-1} = a + 1 - 2e` whose
    /// vertex word is `word`, then validates it against band `p`.
    pub fn from_vertex_word(word: &VertexWord, p: i64, a: i64, e: u8) -> Result<Self> {
        AbfPath::new(p, heights_from_vertex_word(word, a, e))
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    /// Path length `L`.
    pub fn len(&self) -> usize {
        self.heights.len() - 3
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `h_i` for `-1 <= i <= L + 1`.
    pub fn h(&self, i: i64) -> i64 {
        self.heights[(i + 1) as usize]
    }

    /// The full sequence `h_{-1}, ..., h_{L+1}`.
    pub fn heights(&self) -> &[i64] {
        &self.heights
    }

    pub fn a(&self) -> i64 {
        self.h(0)
    }

    pub fn b(&self) -> i64 {
        self.h(self.len() as i64)
    }

    pub fn e(&self) -> u8 {
        pre_flag(self.a(), self.h(-1)).expect("validated")
    }

    pub fn f(&self) -> u8 {
        pre_flag(self.b(), self.h(self.len() as i64 + 1)).expect("validated")
    }

    /// The weight `(1/4) sum_{i=1}^{L} i |h_{i+1} - h_{i-1}|`.
    pub fn weight(&self) -> QExponent {
        let l = self.len() as i64;
        let eighths: i64 = (1..=l).map(|i| 2 * i * (self.h(i + 1) - self.h(i - 1)).abs()).sum();
        QExponent::from_eighths(eighths)
    }

    pub fn vertex_word(&self) -> VertexWord {
        let l = self.len() as i64;
        VertexWord(
            (0..=l)
                .map(|i| {
                    if self.h(i + 1) == self.h(i - 1) {
                        Symbol::N
                    } else {
                        Symbol::S
                    }
                })
                .collect(),
        )
    }

    /// `m(h)`, the number of straight vertices.
    pub fn straight_count(&self) -> usize {
        self.vertex_word().straight_count()
    }

    /// `xi(h)`, the number of valleys at even height, computed from the
    /// vertex word.
    pub fn even_valley_count(&self) -> usize {
        even_valley_count_from_word(&self.vertex_word(), self.a(), self.e())
    }

    /// Geometric count of valleys `h_{i-1} = h_{i+1} = h_i + 1` at even
    /// height, for `0 <= i <= L`.
    pub fn even_valley_scan(&self) -> usize {
        let l = self.len() as i64;
        (0..=l)
            .filter(|&i| self.h(i - 1) == self.h(i) + 1 && self.h(i + 1) == self.h(i) + 1 && self.h(i) % 2 == 0)
            .count()
    }

    /// Heights of all valleys at vertices `0..=L`, in order.
    pub fn valley_heights(&self) -> Vec<i64> {
        let l = self.len() as i64;
        (0..=l)
            .filter(|&i| self.h(i - 1) == self.h(i) + 1 && self.h(i + 1) == self.h(i) + 1)
            .map(|i| self.h(i))
            .collect()
    }

    /// The dump line `e f w/8 h_-1 ... h_L+1`.
    pub fn dump_line(&self) -> String {
        dump_line(self.e(), self.f(), self.weight(), &self.heights)
    }
}

fn dump_line(e: u8, f: u8, w: QExponent, heights: &[i64]) -> String {
    let hs: Vec<String> = heights.iter().map(|h| h.to_string()).collect();
    format!("{e} {f} {}/8 {}", w.eighths, hs.join(" "))
}

/// Left-to-right reconstruction of `h_{-1}, ..., h_{L+1}` from a vertex
/// word, with no band check.
pub fn heights_from_vertex_word(word: &VertexWord, a: i64, e: u8) -> Vec<i64> {
    let mut heights = Vec::with_capacity(word.0.len() + 2);
    let before = a + 1 - 2 * e as i64;
    heights.push(before);
    heights.push(a);
    let mut dir = a - before;
    let mut h = a;
    for s in &word.0 {
        if *s == Symbol::N {
            dir = -dir;
        }
        h += dir;
        heights.push(h);
    }
    heights
}

/// `L(L+1)/4 - (1/2) sum of N positions`, i.e. half the sum of the `S`
/// positions.
pub fn weight_from_word(word: &VertexWord) -> QExponent {
    let l = word.path_len() as i64;
    let n_sum: i64 = word.n_positions().iter().map(|&j| j as i64).sum();
    QExponent::from_eighths(2 * l * (l + 1) - 4 * n_sum)
}

/// `xi` from the `N` positions `j_0 < j_1 < ...`. The valleys are the
/// `j_i` with `i = e (mod 2)`, and the height at `j` has the parity of
/// `a + j`, so a valley is at even height exactly when `j_i = a (mod 2)`.
pub fn even_valley_count_from_word(word: &VertexWord, a: i64, e: u8) -> usize {
    word.n_positions()
        .iter()
        .enumerate()
        .filter(|&(i, &j)| (i as i64 - e as i64) % 2 == 0 && (j as i64 - a).rem_euclid(2) == 0)
        .count()
}

/// Depth-first enumeration of interior heights `h_0..=h_L` in the band
/// `lo..=hi`, from `start` to `end`, in lexicographic order. `accept` sees
/// the prefix after each step and may prune.
fn walk<F, V>(lo: i64, hi: i64, start: i64, end: i64, steps: usize, accept: &F, visit: &mut V)
where
    F: Fn(&[i64]) -> bool,
    V: FnMut(&[i64]),
{
    fn go<F, V>(lo: i64, hi: i64, end: i64, steps: usize, buf: &mut Vec<i64>, accept: &F, visit: &mut V)
    where
        F: Fn(&[i64]) -> bool,
        V: FnMut(&[i64]),
    {
        let done = buf.len() - 1;
        let cur = *buf.last().unwrap();
        if done == steps {
            if cur == end {
                visit(buf);
            }
            return;
        }
        for next in [cur - 1, cur + 1] {
            if next < lo || next > hi || (next - end).abs() > (steps - done - 1) as i64 {
                continue;
            }
            buf.push(next);
            if accept(buf) {
                go(lo, hi, end, steps, buf, accept, visit);
            }
            buf.pop();
        }
    }
    if start < lo || start > hi {
        return;
    }
    let mut buf = vec![start];
    go(lo, hi, end, steps, &mut buf, accept, visit);
}

fn check_flags(e: u8, f: u8) -> Result<()> {
    if e > 1 || f > 1 {
        return Err(Error::InvalidParameters(format!(
            "flags must be 0 or 1, got e={e} f={f}"
        )));
    }
    Ok(())
}

/// All paths of the ABF set with band `p`, endpoints `a`, `b`, segment
/// flags `e`, `f` and length `L`, in lexicographic height order.
pub fn enumerate_abf(p: i64, a: i64, b: i64, e: u8, f: u8, l: usize) -> Result<Vec<AbfPath>> {
    check_flags(e, f)?;
    let mut out = Vec::new();
    walk(1, p, a, b, l, &|_| true, &mut |body: &[i64]| {
        let mut hs = Vec::with_capacity(body.len() + 2);
        hs.push(a + 1 - 2 * e as i64);
        hs.extend_from_slice(body);
        hs.push(b + 1 - 2 * f as i64);
        out.push(AbfPath { p, heights: hs });
    });
    Ok(out)
}

fn accumulate(map: &mut BTreeMap<usize, BTreeMap<i64, i64>>, m: usize, w: QExponent) {
    *map.entry(m).or_default().entry(w.eighths).or_insert(0) += 1;
}

fn to_polys(map: BTreeMap<usize, BTreeMap<i64, i64>>) -> BTreeMap<usize, QPoly> {
    map.into_iter()
        .map(|(m, ws)| {
            let poly = QPoly::from_terms(
                ws.into_iter()
                    .map(|(e, c)| (QExponent::from_eighths(e), BigInt::from(c))),
            );
            (m, poly)
        })
        .collect()
}

fn abf_gf_by_m(p: i64, a: i64, b: i64, e: u8, f: u8, l: usize, restricted: bool) -> Result<BTreeMap<usize, QPoly>> {
    let mut map = BTreeMap::new();
    for path in enumerate_abf(p, a, b, e, f, l)? {
        if restricted && path.even_valley_count() != 0 {
            continue;
        }
        accumulate(&mut map, path.straight_count(), path.weight());
    }
    Ok(to_polys(map))
}

/// The generating function of the ABF set, split by the straight-vertex
/// count `m`.
pub fn gf_abf_by_m(p: i64, a: i64, b: i64, e: u8, f: u8, l: usize) -> Result<BTreeMap<usize, QPoly>> {
    abf_gf_by_m(p, a, b, e, f, l, false)
}

/// `sum q^{w(h)}` over the ABF set.
pub fn gf_abf(p: i64, a: i64, b: i64, e: u8, f: u8, l: usize) -> Result<QPoly> {
    Ok(gf_abf_by_m(p, a, b, e, f, l)?.into_values().sum())
}

/// As [`gf_abf`], restricted to paths with exactly `m` straight vertices.
pub fn gf_abf_m(p: i64, a: i64, b: i64, e: u8, f: u8, l: usize, m: usize) -> Result<QPoly> {
    Ok(gf_abf_by_m(p, a, b, e, f, l)?.remove(&m).unwrap_or_default())
}

/// Valley-restricted generating functions (no valleys at even height),
/// split by `m`.
pub fn gf_abf_restricted_by_m(p: i64, a: i64, b: i64, e: u8, f: u8, l: usize) -> Result<BTreeMap<usize, QPoly>> {
    abf_gf_by_m(p, a, b, e, f, l, true)
}

pub fn gf_abf_restricted(p: i64, a: i64, b: i64, e: u8, f: u8, l: usize) -> Result<QPoly> {
    Ok(gf_abf_restricted_by_m(p, a, b, e, f, l)?.into_values().sum())
}

pub fn gf_abf_restricted_m(p: i64, a: i64, b: i64, e: u8, f: u8, l: usize, m: usize) -> Result<QPoly> {
    Ok(gf_abf_restricted_by_m(p, a, b, e, f, l)?.remove(&m).unwrap_or_default())
}

/// A half-lattice path, stored with every height doubled: entry `s` of
/// the sequence is `2 h_{(s-1)/2}` for `s = 0 ..= 2L + 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfLatticePath {
    t: HalfInt,
    doubled_heights: Vec<i64>,
}

impl HalfLatticePath {
    pub fn t(&self) -> HalfInt {
        self.t
    }

    /// The length `L` (possibly a half-integer).
    pub fn len(&self) -> HalfInt {
        HalfInt::from_doubled(self.doubled_heights.len() as i64 - 3)
    }

    pub fn is_empty(&self) -> bool {
        self.doubled_heights.len() == 3
    }

    /// `2 h_x` for `x = -1/2, 0, 1/2, ..., L + 1/2`.
    pub fn doubled_heights(&self) -> &[i64] {
        &self.doubled_heights
    }

    pub fn a(&self) -> HalfInt {
        HalfInt::from_doubled(self.doubled_heights[1])
    }

    pub fn b(&self) -> HalfInt {
        HalfInt::from_doubled(self.doubled_heights[self.doubled_heights.len() - 2])
    }

    pub fn e(&self) -> u8 {
        pre_flag(self.doubled_heights[1], self.doubled_heights[0]).expect("validated")
    }

    pub fn f(&self) -> u8 {
        let n = self.doubled_heights.len();
        pre_flag(self.doubled_heights[n - 2], self.doubled_heights[n - 1]).expect("validated")
    }

    /// Positions `s = 2x` (`0 <= s <= 2L`) of the straight vertices.
    pub fn straight_positions(&self) -> Vec<i64> {
        let d = &self.doubled_heights;
        (1..d.len() - 1)
            .filter(|&k| d[k - 1] != d[k + 1])
            .map(|k| k as i64 - 1)
            .collect()
    }

    /// Half the sum of the `x` at which the path has a straight vertex.
    pub fn weight(&self) -> QExponent {
        let sum_s: i64 = self.straight_positions().iter().sum();
        // (1/2) * sum (s/2) = sum s / 4 = 2 * sum s eighths
        QExponent::from_eighths(2 * sum_s)
    }

    /// The same path read as an ABF path of length `2L` in band `2t - 1`,
    /// via `h -> 2h - 1`.
    pub fn to_abf(&self) -> AbfPath {
        AbfPath {
            p: self.t.doubled() - 1,
            heights: self.doubled_heights.iter().map(|d| d - 1).collect(),
        }
    }

    pub fn dump_line(&self) -> String {
        dump_line(self.e(), self.f(), self.weight(), &self.doubled_heights)
    }
}

fn is_forbidden_valley(before: i64, at: i64, after: i64) -> bool {
    before == at + 1 && after == at + 1 && at % 2 != 0
}

/// All valley-restricted half-lattice paths in the band `1 <= h <= t`
/// from `a` to `b` of length `L` with segment flags `e`, `f`.
/// Unreachable parameter combinations give an empty set.
pub fn enumerate_half(t: HalfInt, a: HalfInt, b: HalfInt, e: u8, f: u8, l: HalfInt) -> Result<Vec<HalfLatticePath>> {
    check_flags(e, f)?;
    if l.doubled() < 0 {
        return Err(Error::InvalidParameters(format!("negative length {l}")));
    }
    let steps = l.doubled() as usize;
    let (ad, bd) = (a.doubled(), b.doubled());
    let pre = ad + 1 - 2 * e as i64;
    let post = bd + 1 - 2 * f as i64;
    let accept = |prefix: &[i64]| {
        // prefix holds doubled h_0 .. h_x; check the vertex before the last
        let k = prefix.len();
        let before = if k >= 3 { prefix[k - 3] } else { pre };
        !is_forbidden_valley(before, prefix[k - 2], prefix[k - 1])
    };
    let mut out = Vec::new();
    walk(2, t.doubled(), ad, bd, steps, &accept, &mut |body: &[i64]| {
        let k = body.len();
        let before = if k >= 2 { body[k - 2] } else { pre };
        if is_forbidden_valley(before, body[k - 1], post) {
            return;
        }
        let mut hs = Vec::with_capacity(k + 2);
        hs.push(pre);
        hs.extend_from_slice(body);
        hs.push(post);
        out.push(HalfLatticePath { t, doubled_heights: hs });
    });
    Ok(out)
}

/// `sum q^{w(h)}` over the valley-restricted half-lattice set.
pub fn gf_half(t: HalfInt, a: HalfInt, b: HalfInt, e: u8, f: u8, l: HalfInt) -> Result<QPoly> {
    let mut weights: BTreeMap<i64, i64> = BTreeMap::new();
    for path in enumerate_half(t, a, b, e, f, l)? {
        *weights.entry(path.weight().eighths).or_insert(0) += 1;
    }
    Ok(QPoly::from_terms(
        weights
            .into_iter()
            .map(|(e, c)| (QExponent::from_eighths(e), BigInt::from(c))),
    ))
}

/// Rescales a valley-restricted ABF generating function in band `2t - 1`
/// at length `2L` to the half-lattice one, by `q -> q^{1/2}`.
pub fn half_from_restricted(restricted_gf: &QPoly) -> Result<QPoly> {
    restricted_gf.substitute_power(Rational64::new(1, 2))
}
