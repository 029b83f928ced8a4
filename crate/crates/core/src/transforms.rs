//! The C1 (dilation), C2 (particle insertion) and C3 (particle wave)
//! transforms on vertex words, their composite and its inverse, plus the
//! exhaustive checks of the bijection and of the generating-function
//! identities it implies.

use std::collections::BTreeSet;

use serde_json::json;

use crate::error::{Error, Result};
use crate::paths::{enumerate_abf, gf_abf_by_m, gf_abf_restricted_by_m, AbfPath, Symbol, VertexWord};
use crate::qpoly::QExponent;
use crate::qspecial::{q_binomial, q_binomial_base};
use crate::report::CheckRecord;
use crate::QPoly;

/// A partition stored as weakly decreasing nonnegative parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn largest(&self) -> usize {
        self.0.first().copied().unwrap_or(0)
    }

    /// All partitions with exactly `n` parts (zeros allowed) in `0..=max`,
    /// i.e. the set `P_{n,max}`. For `max < 0` only `n = 0` gives the
    /// single empty partition.
    pub fn in_box(n: usize, max: i64) -> Vec<Partition> {
        if max < 0 {
            return if n == 0 { vec![Partition::empty()] } else { Vec::new() };
        }
        let mut out = Vec::new();
        let mut buf = Vec::with_capacity(n);
        fn go(n: usize, cap: usize, buf: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if buf.len() == n {
                out.push(Partition(buf.clone()));
                return;
            }
            for part in (0..=cap).rev() {
                buf.push(part);
                go(n, part, buf, out);
                buf.pop();
            }
        }
        go(n, max as usize, &mut buf, &mut out);
        out
    }
}

/// The pre-image of a composite transform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CDecomposition {
    pub base: AbfPath,
    pub n: usize,
    pub lambda: Partition,
}

fn word_of(h: &AbfPath) -> VertexWord {
    h.vertex_word()
}

/// C1: in band `p + 1`, starting at `a + e`, with the `i`-th `N` symbol
/// moved from `j_i` to `j_i + i`.
pub fn c1_transform(h: &AbfPath) -> Result<AbfPath> {
    let word = word_of(h);
    let l = h.len();
    if l == 0 && h.e() != h.f() {
        return Err(Error::UndefinedTransform(
            "C1 is not defined on zero-length paths with e != f".into(),
        ));
    }
    let js = word.n_positions();
    let new_word = if js.is_empty() {
        // only S symbols: the image has L of them
        VertexWord(vec![Symbol::S; l])
    } else {
        let k = js.len() - 1;
        let shifted: Vec<usize> = js.iter().enumerate().map(|(i, j)| j + i).collect();
        VertexWord::from_n_positions(l + k + 1, &shifted)
    };
    AbfPath::from_vertex_word(&new_word, h.p() + 1, h.a() + h.e() as i64, h.e())
}

/// C2(n): appends `2n` symbols `N` to the vertex word.
pub fn c2_insert(h: &AbfPath, n: usize) -> Result<AbfPath> {
    let mut word = word_of(h);
    word.0.extend(std::iter::repeat_n(Symbol::N, 2 * n));
    AbfPath::from_vertex_word(&word, h.p(), h.a(), h.e())
}

/// Splits a word obtained by C2 into its particle-free part and `n`.
fn strip_inserted(word: &VertexWord) -> (VertexWord, usize) {
    let trailing = word.0.iter().rev().take_while(|&&s| s == Symbol::N).count();
    let n = trailing / 2;
    let base = VertexWord(word.0[..word.0.len() - 2 * n].to_vec());
    (base, n)
}

/// Inserts, for each part, a pair `NN` with exactly that many `S`
/// symbols to its right.
fn insert_pairs(base: &VertexWord, parts: &[usize]) -> VertexWord {
    let m = base.straight_count();
    let mut counts = vec![0usize; m + 1];
    for &part in parts {
        counts[part] += 1;
    }
    let mut out = Vec::with_capacity(base.0.len() + 2 * parts.len());
    let mut seen = 0;
    for &s in &base.0 {
        if s == Symbol::S {
            let right = m - seen;
            out.extend(std::iter::repeat_n(Symbol::N, 2 * counts[right]));
            seen += 1;
        }
        out.push(s);
    }
    out.extend(std::iter::repeat_n(Symbol::N, 2 * counts[0]));
    VertexWord(out)
}

/// C3(lambda) on a path produced by C2: each inserted particle is moved
/// left past `lambda_i` symbols `S`.
pub fn c3_wave(h: &AbfPath, lambda: &Partition) -> Result<AbfPath> {
    let (base, n) = strip_inserted(&word_of(h));
    if base.0.windows(2).any(|w| w == [Symbol::N, Symbol::N]) {
        return Err(Error::MalformedInput(format!(
            "{} is not a particle-free word followed by inserted particles",
            word_of(h)
        )));
    }
    let m = base.straight_count();
    if lambda.len() > n {
        return Err(Error::LambdaOutOfRange {
            lambda: lambda.parts().to_vec(),
            reason: format!("more parts than the {n} inserted particles"),
        });
    }
    if lambda.largest() > m {
        return Err(Error::LambdaOutOfRange {
            lambda: lambda.parts().to_vec(),
            reason: format!("largest part exceeds m = {m}"),
        });
    }
    let mut parts = lambda.parts().to_vec();
    parts.resize(n, 0);
    AbfPath::from_vertex_word(&insert_pairs(&base, &parts), h.p(), h.a(), h.e())
}

/// The composite `C(n, lambda) = C3(lambda) . C2(n) . C1`.
pub fn c_transform(h: &AbfPath, n: usize, lambda: &Partition) -> Result<AbfPath> {
    c3_wave(&c2_insert(&c1_transform(h)?, n)?, lambda)
}

/// Inverts [`c_transform`]: strips `floor(r/2)` pairs from every maximal
/// run of `r` symbols `N`, records each pair's excitation, and undoes C1.
/// When `expected_m` is given, the base path must have that many straight
/// vertices.
pub fn c_decompose(h_prime: &AbfPath, expected_m: Option<usize>) -> Result<CDecomposition> {
    let word = word_of(h_prime);
    let total_s = word.straight_count();
    let mut reduced = Vec::with_capacity(word.0.len());
    let mut parts = Vec::new();
    let mut seen_s = 0;
    let mut i = 0;
    while i < word.0.len() {
        if word.0[i] == Symbol::S {
            reduced.push(Symbol::S);
            seen_s += 1;
            i += 1;
            continue;
        }
        let run = word.0[i..].iter().take_while(|&&s| s == Symbol::N).count();
        for _ in 0..run / 2 {
            parts.push(total_s - seen_s);
        }
        if run % 2 == 1 {
            reduced.push(Symbol::N);
        }
        i += run;
    }
    let h0 = VertexWord(reduced);
    let l = h0.straight_count();
    let js = h0.n_positions();
    let base_word = if js.is_empty() {
        VertexWord(vec![Symbol::S; l + 1])
    } else {
        let unshifted: Vec<usize> = js.iter().enumerate().map(|(i, j)| j - i).collect();
        VertexWord::from_n_positions(l + 1, &unshifted)
    };
    let e = h_prime.e();
    let a = h_prime.a() - e as i64;
    let base = AbfPath::from_vertex_word(&base_word, h_prime.p() - 1, a, e)
        .map_err(|err| Error::MalformedInput(format!("{} has no pre-image: {err}", word)))?;
    if base.is_empty() && base.e() != base.f() {
        return Err(Error::MalformedInput(format!(
            "{word} decomposes onto an undefined C1 case"
        )));
    }
    if let Some(m) = expected_m {
        if base.straight_count() != m {
            return Err(Error::MalformedInput(format!(
                "{word}: base has m = {} but {m} was expected",
                base.straight_count()
            )));
        }
    }
    Ok(CDecomposition {
        n: parts.len(),
        lambda: Partition::new(parts),
        base,
    })
}

fn idx(p: i64, a: i64, b: i64, e: u8, f: u8, l: usize, lp: usize) -> serde_json::Value {
    json!({ "p": p, "a": a, "b": b, "e": e, "f": f, "L": l, "Lp": lp })
}

/// Round-trips `c_decompose(c_transform(h, n, lambda))` over every path of
/// the band-`p` sets with length `<= l_max`, every `n <= n_max` and every
/// admissible `lambda`, also checking the weight law and membership of the
/// image.
pub fn verify_round_trips(p: i64, l_max: usize, n_max: usize) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for a in 1..=p {
        for b in 1..=p {
            for e in 0..=1u8 {
                for f in 0..=1u8 {
                    for l in 0..=l_max {
                        if l == 0 && e != f {
                            continue;
                        }
                        let paths = match enumerate_abf(p, a, b, e, f, l) {
                            Ok(ps) => ps,
                            Err(err) => {
                                out.push(CheckRecord::error(
                                    "c_round_trip",
                                    json!({"p": p, "a": a, "b": b, "e": e, "f": f, "L": l}),
                                    err,
                                ));
                                continue;
                            }
                        };
                        let mut ok = true;
                        let mut note = None;
                        'paths: for h in &paths {
                            let m = h.straight_count();
                            for n in 0..=n_max {
                                for lambda in Partition::in_box(n, l as i64) {
                                    let image = match c_transform(h, n, &lambda) {
                                        Ok(img) => img,
                                        Err(err) => {
                                            ok = false;
                                            note = Some(format!("{}: {err}", h.vertex_word()));
                                            break 'paths;
                                        }
                                    };
                                    let lp = 2 * l - m + 2 * n;
                                    let expected_w = h.weight()
                                        + QExponent::from_eighths(
                                            4 * l as i64 * (l as i64 - m as i64) + 8 * lambda.size() as i64,
                                        );
                                    let shape_ok = image.len() == lp
                                        && image.straight_count() == l
                                        && image.a() == a + e as i64
                                        && image.b() == b + f as i64
                                        && image.e() == e
                                        && image.f() == f
                                        && image.weight() == expected_w;
                                    let back = c_decompose(&image, Some(m));
                                    let trip_ok = matches!(&back, Ok(d) if d.base == *h && d.n == n && d.lambda.parts().iter().filter(|&&x| x > 0).eq(lambda.parts().iter().filter(|&&x| x > 0)));
                                    if !(shape_ok && trip_ok) {
                                        ok = false;
                                        note = Some(format!(
                                            "h={} n={n} lambda={:?} image={} back={:?}",
                                            h.vertex_word(),
                                            lambda.parts(),
                                            image.vertex_word(),
                                            back.map(|d| (d.base.vertex_word().to_string(), d.n, d.lambda))
                                        ));
                                        break 'paths;
                                    }
                                }
                            }
                        }
                        out.push(CheckRecord::boolean(
                            "c_round_trip",
                            json!({"p": p, "a": a, "b": b, "e": e, "f": f, "L": l, "n_max": n_max}),
                            ok,
                            note,
                        ));
                    }
                }
            }
        }
    }
    out
}

/// The identity
/// `X^{p+1}_{a+e,b+f}(L', L) = sum_n q^{L(L-m)/2} [n+L, n] X^p_{a,b}(L, m)`,
/// `m = 2L - L' + 2n`, for the given parameters.
pub fn check_transform_gf(p: i64, a: i64, b: i64, e: u8, f: u8, l: usize, lp: usize) -> CheckRecord {
    let id = idx(p, a, b, e, f, l, lp);
    let lhs = match gf_abf_by_m(p + 1, a + e as i64, b + f as i64, e, f, lp) {
        Ok(mut by_m) => by_m.remove(&l).unwrap_or_default(),
        Err(err) => return CheckRecord::error("transform_gf", id, err),
    };
    let base = match gf_abf_by_m(p, a, b, e, f, l) {
        Ok(by_m) => by_m,
        Err(err) => return CheckRecord::error("transform_gf", id, err),
    };
    let mut rhs = QPoly::zero();
    for (&m, poly) in &base {
        let twice_n = lp as i64 + m as i64 - 2 * l as i64;
        if twice_n < 0 || twice_n % 2 != 0 {
            continue;
        }
        let n = twice_n / 2;
        let shift = QExponent::from_eighths(4 * (l as i64) * (l as i64 - m as i64));
        rhs += &(q_binomial(n, l as i64) * poly).shift(shift);
    }
    CheckRecord::compare("transform_gf", id, &lhs, &rhs)
}

/// The valley-restricted identity
/// `Xbar^{p+1}(L', L) = sum_n q^{L(L-m)/2 + n T^R} [n + (L-T^L-T^R)/2, n]'_{q^2} Xbar^p(L, m)`.
#[allow(clippy::too_many_arguments)]
pub fn check_restricted_transform_gf(
    p: i64,
    a: i64,
    b: i64,
    e: u8,
    f: u8,
    l: usize,
    lp: usize,
    modified: bool,
) -> CheckRecord {
    let id = idx(p, a, b, e, f, l, lp);
    let name = if modified {
        "restricted_transform_gf"
    } else {
        "restricted_transform_gf_plain"
    };
    let lhs = match gf_abf_restricted_by_m(p + 1, a + e as i64, b + f as i64, e, f, lp) {
        Ok(mut by_m) => by_m.remove(&l).unwrap_or_default(),
        Err(err) => return CheckRecord::error(name, id, err),
    };
    let base = match gf_abf_restricted_by_m(p, a, b, e, f, l) {
        Ok(by_m) => by_m,
        Err(err) => return CheckRecord::error(name, id, err),
    };
    let tl = (a + 1).rem_euclid(2);
    let tr = (b + 1).rem_euclid(2);
    let top = l as i64 - tl - tr;
    let mut rhs = QPoly::zero();
    for (&m, poly) in &base {
        let twice_n = lp as i64 + m as i64 - 2 * l as i64;
        if twice_n < 0 || twice_n % 2 != 0 || top % 2 != 0 {
            continue;
        }
        let n = twice_n / 2;
        let shift = QExponent::from_eighths(4 * (l as i64) * (l as i64 - m as i64) + 8 * n * tr);
        let binom = q_binomial_base(n, top / 2, 2, modified);
        rhs += &(binom * poly).shift(shift);
    }
    CheckRecord::compare(name, id, &lhs, &rhs)
}

/// Exhaustive check that the composite transform restricts to a bijection
/// between valley-restricted sets, with `lambda_i = 2 mu_i + T^R` and
/// `mu` in `P_{n,(L-T^L-T^R)/2}`, and with the weight law
/// `w(h') = w(h) + L(L-m)/2 + 2|mu| + n T^R`.
///
/// Zero-length bases use the convention that `P_{0,-1}` holds the empty
/// partition. Zero-length bases with `e != f` lie outside the transform's
/// domain and yield no records.
pub fn refined_bijection_check(p: i64, a: i64, b: i64, e: u8, f: u8, l: usize, lp: usize) -> Vec<CheckRecord> {
    let id = idx(p, a, b, e, f, l, lp);
    if l == 0 && e != f {
        return Vec::new();
    }
    let tl = (a + 1).rem_euclid(2);
    let tr = (b + 1).rem_euclid(2);
    let mu_max = (l as i64 - tl - tr).div_euclid(2);
    let mut out = Vec::new();

    // forward: restricted bases and mu give restricted images with the weight law
    let bases = match enumerate_abf(p, a, b, e, f, l) {
        Ok(ps) => ps,
        Err(err) => return vec![CheckRecord::error("refined_bijection", id, err)],
    };
    let mut forward: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut forward_ok = true;
    let mut forward_note = None;
    let mut produced = 0usize;
    for h in bases.iter().filter(|h| h.even_valley_count() == 0) {
        let m = h.straight_count() as i64;
        let twice_n = lp as i64 + m - 2 * l as i64;
        if twice_n < 0 || twice_n % 2 != 0 {
            continue;
        }
        let n = (twice_n / 2) as usize;
        for mu in Partition::in_box(n, mu_max) {
            let lambda = Partition::new(mu.parts().iter().map(|&x| 2 * x + tr as usize).collect());
            let image = match c_transform(h, n, &lambda) {
                Ok(img) => img,
                Err(err) => {
                    forward_ok = false;
                    forward_note = Some(format!("{}: {err}", h.vertex_word()));
                    continue;
                }
            };
            produced += 1;
            let expected = h.weight()
                + QExponent::from_eighths(4 * (l as i64) * (l as i64 - m) + 16 * mu.size() as i64 + 8 * n as i64 * tr);
            if image.even_valley_count() != 0 || image.weight() != expected {
                forward_ok = false;
                forward_note = Some(format!(
                    "h={} mu={:?} image={}",
                    h.vertex_word(),
                    mu.parts(),
                    image.vertex_word()
                ));
            }
            forward.insert(image.heights().to_vec());
        }
    }
    let injective = forward.len() == produced;
    out.push(CheckRecord::boolean(
        "refined_bijection_forward",
        id.clone(),
        forward_ok && injective,
        forward_note,
    ));

    // backward: every restricted image decomposes with parity-T^R parts
    let images = match enumerate_abf(p + 1, a + e as i64, b + f as i64, e, f, lp) {
        Ok(ps) => ps,
        Err(err) => return vec![CheckRecord::error("refined_bijection", id, err)],
    };
    let mut parity_ok = true;
    let mut parity_note = None;
    let mut covered = true;
    let mut restricted_images = 0usize;
    for img in images
        .iter()
        .filter(|h| h.straight_count() == l && h.even_valley_count() == 0)
    {
        restricted_images += 1;
        if !forward.contains(img.heights()) {
            covered = false;
        }
        match c_decompose(img, None) {
            Ok(d) => {
                let parts_ok = d.lambda.parts().iter().all(|&x| x as i64 % 2 == tr)
                    && d.lambda.parts().iter().all(|&x| (x as i64 - tr) / 2 <= mu_max)
                    && d.base.even_valley_count() == 0;
                if !parts_ok {
                    parity_ok = false;
                    parity_note = Some(format!("{} -> lambda {:?}", img.vertex_word(), d.lambda.parts()));
                }
            }
            Err(err) => {
                parity_ok = false;
                parity_note = Some(err.to_string());
            }
        }
    }
    out.push(CheckRecord::boolean(
        "refined_bijection_parity",
        id.clone(),
        parity_ok,
        parity_note,
    ));
    out.push(CheckRecord::boolean(
        "refined_bijection_onto",
        id,
        covered && restricted_images == forward.len(),
        (!(covered && restricted_images == forward.len()))
            .then(|| format!("{restricted_images} restricted images, {} produced", forward.len())),
    ));
    out
}
