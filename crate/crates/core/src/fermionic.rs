//! Fermionic (manifestly positive) multi-sum expressions: the finitized
//! ABF, half-lattice and valley-restricted generating functions, and the
//! `L -> infinity` character sums, parametrised by case tables.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use serde_json::json;

use crate::bosonic::{y_polynomial, CharacterParams};
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::qpoly::QExponent;
use crate::qspecial::{inv_pochhammer_finite, q_binomial, q_binomial_base};
use crate::report::CheckRecord;
use crate::{QPoly, Series};

fn pabs(x: i64) -> i64 {
    x.max(0)
}

/// A {0,1}-vector, indexed from 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParityVector(pub Vec<u8>);

impl ParityVector {
    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    /// Entry `i`, for `1 <= i <= len`.
    pub fn get(&self, i: usize) -> u8 {
        self.0[i - 1]
    }

    /// The vector with its first component dropped.
    pub fn tilde(&self) -> ParityVector {
        ParityVector(self.0.iter().skip(1).copied().collect())
    }
}

impl fmt::Display for ParityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn check_parity_args(c: i64, j: i64) -> Result<()> {
    if j < 0 || c < 1 || c > j + 1 {
        return Err(Error::InvalidParameters(format!(
            "parity vector needs 1 <= c <= j+1, got c={c}, j={j}"
        )));
    }
    Ok(())
}

/// `Q^{(c,j)}_i = |c-1-i|_+ mod 2`.
pub fn parity_q(c: i64, j: i64) -> Result<ParityVector> {
    check_parity_args(c, j)?;
    Ok(ParityVector((1..=j).map(|i| (pabs(c - 1 - i) % 2) as u8).collect()))
}

/// `R^{(c,j)}_i = (|i+c-j-1|_+ + c + 1) mod 2`.
pub fn parity_r(c: i64, j: i64) -> Result<ParityVector> {
    check_parity_args(c, j)?;
    Ok(ParityVector(
        (1..=j).map(|i| ((pabs(i + c - j - 1) + c + 1) % 2) as u8).collect(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    /// Finitized ABF generating functions.
    AbfFinitized,
    /// Finitized half-lattice generating functions.
    HalfFinitized,
    /// Finitized valley-restricted ABF generating functions.
    RestrictedFinitized,
    /// `chi^{p,p+1}_{r,s}`.
    AbfCharacter,
    /// `chi^{t,2t+1}_{r,2a}`.
    HalfCharacter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseId {
    A,
    B,
    C,
    D,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [CaseId::A, CaseId::B, CaseId::C, CaseId::D];

    pub fn letter(self) -> char {
        match self {
            CaseId::A => 'a',
            CaseId::B => 'b',
            CaseId::C => 'c',
            CaseId::D => 'd',
        }
    }

    /// The `(e, f)` flags targeted by a finitized row.
    pub fn flags(self) -> (u8, u8) {
        match self {
            CaseId::A => (1, 1),
            CaseId::B => (0, 1),
            CaseId::C => (0, 0),
            CaseId::D => (1, 0),
        }
    }

    /// The finitized row targeting flags `(e, f)`.
    pub fn for_flags(e: u8, f: u8) -> Option<CaseId> {
        CaseId::ALL.into_iter().find(|c| c.flags() == (e, f))
    }
}

impl std::str::FromStr for CaseId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" | "A" => Ok(CaseId::A),
            "b" | "B" => Ok(CaseId::B),
            "c" | "C" => Ok(CaseId::C),
            "d" | "D" => Ok(CaseId::D),
            other => Err(Error::MalformedInput(format!("unknown case {other:?}"))),
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BinomialKind {
    Plain,
    Modified,
}

/// One row of one case table, instantiated at concrete parameters.
///
/// The sum runs over `n = (n_1, ..., n_{size-1})` (characters drop
/// `n_1`), with `m_i = 2 sum_{k>i} (k-i) n_k - Delta_i` for
/// `0 <= i < size`, quadratic form `C^{(size-2)}` on `m_1..m_{size-2}`,
/// and binomials on `i = 1 ..= size-2`.
#[derive(Clone, Debug, Serialize)]
pub struct FermionicCase {
    family: Family,
    case_id: CaseId,
    params: serde_json::Value,
    size: usize,
    ell: usize,
    delta: Vec<i64>,
    t_left: Option<ParityVector>,
    t_right: Option<ParityVector>,
    /// Per index `i` (slot 0 unused): modified binomial or not.
    modified: Vec<bool>,
    base_power: u32,
    /// Eighths per unit of `m C m^T - 2 m_ell + 4 n.T^R`.
    scale: i64,
    prefactor: QExponent,
}

fn excluded(case: CaseId, reason: String) -> Error {
    Error::ExcludedCase {
        case: case.letter(),
        reason,
    }
}

impl FermionicCase {
    #[allow(clippy::too_many_arguments)]
    fn build(
        family: Family,
        case_id: CaseId,
        params: serde_json::Value,
        size: i64,
        ell: i64,
        delta: impl Fn(i64) -> i64,
        parity: Option<(ParityVector, ParityVector, BinomialKind)>,
        base_power: u32,
        scale: i64,
        prefactor: QExponent,
    ) -> FermionicCase {
        let size = size as usize;
        let (t_left, t_right, kind) = match parity {
            Some((l, r, k)) => (Some(l), Some(r), k),
            None => (None, None, BinomialKind::Plain),
        };
        FermionicCase {
            family,
            case_id,
            params,
            size,
            ell: ell as usize,
            delta: (0..size as i64).map(delta).collect(),
            t_left,
            t_right,
            modified: vec![kind == BinomialKind::Modified; size],
            base_power,
            scale,
            prefactor,
        }
    }

    /// A row of the finitized ABF table; targets flags `case.flags()`.
    pub fn abf(case: CaseId, p: i64, a: i64, b: i64) -> Result<Self> {
        if p < 3 || !(1..=p).contains(&a) || !(1..=p).contains(&b) {
            return Err(Error::InvalidParameters(format!(
                "need p >= 3, 1 <= a,b <= p; got p={p}, a={a}, b={b}"
            )));
        }
        let (ell, delta): (i64, Box<dyn Fn(i64) -> i64>) = match case {
            CaseId::A => {
                if a == 1 || b == 1 {
                    return Err(excluded(case, "a = 1 or b = 1".into()));
                }
                (a - 1, Box::new(move |i| pabs(a - 1 - i) + pabs(b - 1 - i)))
            }
            CaseId::B => {
                if a == p || b == 1 {
                    return Err(excluded(case, "a = p or b = 1".into()));
                }
                (p - a, Box::new(move |i| pabs(p - a - i) + pabs(b - 1 - i) + p - 1 - i))
            }
            CaseId::C => {
                if a == p || b == p {
                    return Err(excluded(case, "a = p or b = p".into()));
                }
                (p - a, Box::new(move |i| pabs(p - a - i) + pabs(p - b - i)))
            }
            CaseId::D => {
                if a == 1 || b == p {
                    return Err(excluded(case, "a = 1 or b = p".into()));
                }
                (a - 1, Box::new(move |i| pabs(a - 1 - i) + pabs(p - b - i) + p - 1 - i))
            }
        };
        let params = json!({ "p": p, "a": a, "b": b });
        Ok(Self::build(
            Family::AbfFinitized,
            case,
            params,
            p,
            ell,
            delta,
            None,
            1,
            2,
            QExponent::ZERO,
        ))
    }

    /// A row of the finitized valley-restricted table.
    pub fn restricted(case: CaseId, p: i64, a: i64, b: i64) -> Result<Self> {
        if p < 3 || !(1..=p).contains(&a) || !(1..=p).contains(&b) {
            return Err(Error::InvalidParameters(format!(
                "need p >= 3, 1 <= a,b <= p; got p={p}, a={a}, b={b}"
            )));
        }
        let j = p - 1;
        let (ell, delta, tl, tr): (i64, Box<dyn Fn(i64) -> i64>, _, _) = match case {
            CaseId::A => {
                if a == 1 || b == 1 {
                    return Err(excluded(case, "a = 1 or b = 1".into()));
                }
                let d = move |i| pabs(a - 1 - i) + pabs(b - 1 - i);
                (a - 1, Box::new(d), parity_q(a, j)?, parity_q(b, j)?)
            }
            CaseId::B => {
                if a == p || b == 1 {
                    return Err(excluded(case, "a = p or b = 1".into()));
                }
                let d = move |i| pabs(p - a - i) + pabs(b - 1 - i) + p - 1 - i;
                (p - a, Box::new(d), parity_r(a, j)?, parity_q(b, j)?)
            }
            CaseId::C => {
                if a == p || b == p {
                    return Err(excluded(case, "a = p or b = p".into()));
                }
                let d = move |i| pabs(p - a - i) + pabs(p - b - i);
                (p - a, Box::new(d), parity_r(a, j)?, parity_r(b, j)?)
            }
            CaseId::D => {
                if a == 1 || b == p {
                    return Err(excluded(case, "a = 1 or b = p".into()));
                }
                let d = move |i| pabs(a - 1 - i) + pabs(p - b - i) + p - 1 - i;
                (a - 1, Box::new(d), parity_q(a, j)?, parity_r(b, j)?)
            }
        };
        let params = json!({ "p": p, "a": a, "b": b });
        let parity = Some((tl, tr, BinomialKind::Modified));
        Ok(Self::build(
            Family::RestrictedFinitized,
            case,
            params,
            p,
            ell,
            delta,
            parity,
            2,
            2,
            QExponent::ZERO,
        ))
    }

    /// A row of the finitized half-lattice table; `a`, `b` may be
    /// half-integers.
    pub fn half(case: CaseId, t: HalfInt, a: HalfInt, b: HalfInt) -> Result<Self> {
        let one = HalfInt::from_int(1);
        if t < HalfInt::from_int(2) || a < one || b < one || a > t || b > t {
            return Err(Error::InvalidParameters(format!(
                "need t >= 2, 1 <= a,b <= t; got t={t}, a={a}, b={b}"
            )));
        }
        let (tt, aa, bb) = (t.doubled(), a.doubled(), b.doubled());
        let j = tt - 2;
        let (ell, delta, tl, tr): (i64, Box<dyn Fn(i64) -> i64>, _, _) = match case {
            CaseId::A => {
                if a == one || b == one {
                    return Err(excluded(case, "a = 1 or b = 1".into()));
                }
                let d = move |i| pabs(aa - 2 - i) + pabs(bb - 2 - i);
                (aa - 2, Box::new(d), parity_q(aa - 1, j)?, parity_q(bb - 1, j)?)
            }
            CaseId::B => {
                if a == t || b == one {
                    return Err(excluded(case, "a = t or b = 1".into()));
                }
                let d = move |i| pabs(tt - aa - i) + pabs(bb - 2 - i) + tt - 2 - i;
                (tt - aa, Box::new(d), parity_r(aa - 1, j)?, parity_q(bb - 1, j)?)
            }
            CaseId::C => {
                if a == t || b == t {
                    return Err(excluded(case, "a = t or b = t".into()));
                }
                let d = move |i| pabs(tt - aa - i) + pabs(tt - bb - i);
                (tt - aa, Box::new(d), parity_r(aa - 1, j)?, parity_r(bb - 1, j)?)
            }
            CaseId::D => {
                if a == one || b == t {
                    return Err(excluded(case, "a = 1 or b = t".into()));
                }
                let d = move |i| pabs(aa - 2 - i) + pabs(tt - bb - i) + tt - 2 - i;
                (aa - 2, Box::new(d), parity_q(aa - 1, j)?, parity_r(bb - 1, j)?)
            }
        };
        let params = json!({ "t": t, "a": a, "b": b });
        let parity = Some((tl, tr, BinomialKind::Modified));
        Ok(Self::build(
            Family::HalfFinitized,
            case,
            params,
            tt - 1,
            ell,
            delta,
            parity,
            1,
            1,
            QExponent::ZERO,
        ))
    }

    /// A row of the `chi^{p,p+1}_{r,s}` table.
    pub fn abf_character(case: CaseId, p: i64, r: i64, s: i64) -> Result<Self> {
        if p < 3 || !(1..p).contains(&r) || !(1..=p).contains(&s) {
            return Err(Error::InvalidParameters(format!(
                "need p >= 3, 1 <= r < p, 1 <= s <= p; got p={p}, r={r}, s={s}"
            )));
        }
        let (ell, delta): (i64, Box<dyn Fn(i64) -> i64>) = match case {
            CaseId::A => {
                if r == 1 || s == 1 {
                    return Err(excluded(case, "r = 1 or s = 1".into()));
                }
                (s - 1, Box::new(move |i| pabs(s - 1 - i) + pabs(r - i)))
            }
            CaseId::B => {
                if r == 1 || s == p {
                    return Err(excluded(case, "r = 1 or s = p".into()));
                }
                (p - s, Box::new(move |i| pabs(p - s - i) + pabs(r - i) + p - 1 - i))
            }
            CaseId::C => {
                if r == p - 1 || s == p {
                    return Err(excluded(case, "r = p-1 or s = p".into()));
                }
                (p - s, Box::new(move |i| pabs(p - s - i) + pabs(p - r - i)))
            }
            CaseId::D => {
                if r == p - 1 || s == 1 {
                    return Err(excluded(case, "r = p-1 or s = 1".into()));
                }
                (s - 1, Box::new(move |i| pabs(s - 1 - i) + pabs(p - r - i) + p - 1 - i))
            }
        };
        let params = json!({ "p": p, "r": r, "s": s });
        let d = s - r;
        let prefactor = QExponent::from_eighths(-2 * d * (d - 1));
        Ok(Self::build(
            Family::AbfCharacter,
            case,
            params,
            p,
            ell,
            delta,
            None,
            1,
            2,
            prefactor,
        ))
    }

    /// A row of the `chi^{t,2t+1}_{r,2a}` table.
    pub fn half_character(case: CaseId, t: HalfInt, r: i64, a: i64) -> Result<Self> {
        if t < HalfInt::from_int(2) || r < 1 || HalfInt::from_int(r) >= t || a < 1 || HalfInt::from_int(a) > t {
            return Err(Error::InvalidParameters(format!(
                "need t >= 2, 1 <= r < t, 1 <= a <= t; got t={t}, r={r}, a={a}"
            )));
        }
        let tt = t.doubled();
        let j = tt - 2;
        let top_r = HalfInt::from_int(r) == t - HalfInt::from_doubled(1);
        let a_top = HalfInt::from_int(a) == t;
        let (ell, delta, tl, tr, kind): (i64, Box<dyn Fn(i64) -> i64>, _, _, _) = match case {
            CaseId::A => {
                if r == 1 || a == 1 {
                    return Err(excluded(case, "r = 1 or a = 1".into()));
                }
                let d = move |i| pabs(2 * a - 2 - i) + pabs(2 * r - 1 - i);
                (
                    2 * a - 2,
                    Box::new(d),
                    parity_q(2 * a - 1, j)?,
                    parity_q(2 * r, j)?,
                    BinomialKind::Plain,
                )
            }
            CaseId::B => {
                if r == 1 || a_top {
                    return Err(excluded(case, "r = 1 or a = t".into()));
                }
                let d = move |i| pabs(tt - 2 * a - i) + pabs(2 * r - 1 - i) + tt - 2 - i;
                (
                    tt - 2 * a,
                    Box::new(d),
                    parity_r(2 * a - 1, j)?,
                    parity_q(2 * r, j)?,
                    BinomialKind::Modified,
                )
            }
            CaseId::C => {
                if top_r || a_top {
                    return Err(excluded(case, "r = t - 1/2 or a = t".into()));
                }
                let d = move |i| pabs(tt - 2 * a - i) + pabs(tt - 2 * r - i);
                (
                    tt - 2 * a,
                    Box::new(d),
                    parity_r(2 * a - 1, j)?,
                    parity_r(2 * r - 1, j)?,
                    BinomialKind::Modified,
                )
            }
            CaseId::D => {
                if top_r || a == 1 {
                    return Err(excluded(case, "r = t - 1/2 or a = 1".into()));
                }
                let d = move |i| pabs(2 * a - 2 - i) + pabs(tt - 2 * r - i) + tt - 2 - i;
                (
                    2 * a - 2,
                    Box::new(d),
                    parity_q(2 * a - 1, j)?,
                    parity_r(2 * r - 1, j)?,
                    BinomialKind::Modified,
                )
            }
        };
        let params = json!({ "t": t, "r": r, "a": a });
        let d = a - r;
        let prefactor = QExponent::from_eighths(-(4 * d * d - 2 * d));
        let parity = Some((tl, tr, kind));
        Ok(Self::build(
            Family::HalfCharacter,
            case,
            params,
            tt - 1,
            ell,
            delta,
            parity,
            1,
            1,
            prefactor,
        ))
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn case_id(&self) -> CaseId {
        self.case_id
    }

    pub fn params(&self) -> &serde_json::Value {
        &self.params
    }

    /// One more than the number of summation variables `n_i`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `Delta_i` for `0 <= i < size`.
    pub fn delta(&self) -> &[i64] {
        &self.delta
    }

    pub fn t_left(&self) -> Option<&ParityVector> {
        self.t_left.as_ref()
    }

    pub fn t_right(&self) -> Option<&ParityVector> {
        self.t_right.as_ref()
    }

    /// The `(e, f)` flags of the generating function a finitized row
    /// computes.
    pub fn flags(&self) -> (u8, u8) {
        self.case_id.flags()
    }

    pub fn is_character(&self) -> bool {
        matches!(self.family, Family::AbfCharacter | Family::HalfCharacter)
    }

    pub fn binomial_kind_at(&self, i: usize) -> BinomialKind {
        if self.modified[i] {
            BinomialKind::Modified
        } else {
            BinomialKind::Plain
        }
    }

    /// The same row with every binomial of the given kind.
    pub fn with_binomials(&self, kind: BinomialKind) -> Self {
        let mut out = self.clone();
        out.modified.fill(kind == BinomialKind::Modified);
        out
    }

    /// The same row with a plain binomial at index `i` only.
    pub fn with_plain_at(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.modified[i] = false;
        out
    }

    /// Solves for `m` (and `hat m`) from `n = (n_1, ..., n_{size-1})`.
    pub fn m_system(&self, n: &[i64]) -> Result<MSystem> {
        if n.len() != self.size - 1 {
            return Err(Error::InvalidParameters(format!(
                "expected {} summation variables, got {}",
                self.size - 1,
                n.len()
            )));
        }
        let mut m = vec![0i64; self.size];
        // m_i = 2 sum_{k>i} (k-i) n_k - Delta_i, accumulated from the top.
        let (mut tail_sum, mut tail_weighted) = (0i64, 0i64);
        for i in (0..self.size).rev() {
            m[i] = 2 * (tail_weighted - i as i64 * tail_sum) - self.delta[i];
            if i >= 1 {
                tail_sum += n[i - 1];
                tail_weighted += i as i64 * n[i - 1];
            }
        }
        let hat_m = match (&self.t_left, &self.t_right) {
            (Some(tl), Some(tr)) => {
                let mut hat = vec![0i64; self.size];
                for i in 1..self.size {
                    let v = m[i] - tl.get(i) as i64 - tr.get(i) as i64;
                    if v % 2 != 0 {
                        return Err(Error::InvalidParameters(format!(
                            "hat m_{i} is not an integer for n={n:?}"
                        )));
                    }
                    hat[i] = v / 2;
                }
                Some(hat)
            }
            _ => None,
        };
        Ok(MSystem {
            n: n.to_vec(),
            m,
            hat_m,
        })
    }

    /// Exponent of the summand (without binomials), in eighths.
    fn exponent(&self, sys: &MSystem) -> i64 {
        let m = &sys.m;
        let top = self.size - 2;
        let mut quad = 0;
        for i in 1..=top {
            quad += 2 * m[i] * m[i];
            if i < top {
                quad -= 2 * m[i] * m[i + 1];
            }
        }
        let mut lin = -2 * m[self.ell];
        if let Some(tr) = &self.t_right {
            for (k, nk) in sys.n.iter().enumerate() {
                lin += 4 * tr.get(k + 1) as i64 * nk;
            }
        }
        self.scale * (quad + lin) + self.prefactor.eighths
    }

    /// The `i`-th binomial factor (for `1 <= i <= size - 2`).
    fn binomial(&self, sys: &MSystem, i: usize, cache: &mut BinomialCache) -> QPoly {
        let n = sys.n[i - 1];
        match &sys.hat_m {
            None => cache.get(n, sys.m[i], 1, false),
            Some(hat) => cache.get(n, hat[i], self.base_power, self.modified[i]),
        }
    }

    /// The second index of the factor at `i` (`m_i` or `hat m_i`).
    fn lower_index(&self, sys: &MSystem, i: usize) -> i64 {
        match &sys.hat_m {
            None => sys.m[i],
            Some(hat) => hat[i],
        }
    }
}

/// The linear system linking the summation variables to `m` and `hat m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MSystem {
    /// `n_1 .. n_{size-1}`.
    pub n: Vec<i64>,
    /// `m_0 .. m_{size-1}`.
    pub m: Vec<i64>,
    /// `hat m_0 .. hat m_{size-1}` (slot 0 unused) where parity vectors
    /// apply.
    pub hat_m: Option<Vec<i64>>,
}

struct BinomialCache(HashMap<(i64, i64, u32, bool), QPoly>);

impl BinomialCache {
    fn new() -> Self {
        BinomialCache(HashMap::new())
    }

    fn get(&mut self, n: i64, m: i64, base: u32, modified: bool) -> QPoly {
        if base == 1 && !modified {
            return q_binomial(n, m);
        }
        self.0
            .entry((n, m, base, modified))
            .or_insert_with(|| q_binomial_base(n, m, base, modified))
            .clone()
    }
}

/// Calls `visit` with every `n = (n_lo, ..., n_hi)` of non-negative
/// integers with `sum k n_k = total`, written into `n[lo-1 .. hi]`.
fn for_each_weighted(total: i64, lo: usize, hi: usize, n: &mut Vec<i64>, visit: &mut dyn FnMut(&[i64])) {
    fn rec(k: usize, lo: usize, left: i64, n: &mut Vec<i64>, visit: &mut dyn FnMut(&[i64])) {
        if k == lo {
            if left % k as i64 == 0 {
                n[k - 1] = left / k as i64;
                visit(n);
                n[k - 1] = 0;
            }
            return;
        }
        for c in 0..=left / k as i64 {
            n[k - 1] = c;
            rec(k - 1, lo, left - c * k as i64, n, visit);
        }
        n[k - 1] = 0;
    }
    if total < 0 {
        return;
    }
    if hi < lo {
        if total == 0 {
            visit(n);
        }
        return;
    }
    rec(hi, lo, total, n, visit);
}

fn require_family(case: &FermionicCase, families: &[Family]) -> Result<()> {
    if families.contains(&case.family) {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!(
            "operation does not apply to a {:?} row",
            case.family
        )))
    }
}

/// The finitized multi-sum subject to `m_0 = target`.
fn finitized_sum(case: &FermionicCase, target: i64) -> Result<QPoly> {
    let twice = target + case.delta[0];
    if twice < 0 || twice % 2 != 0 {
        return Ok(QPoly::zero());
    }
    let mut cache = BinomialCache::new();
    let mut acc: HashMap<i64, QPoly> = HashMap::new();
    let mut failure = None;
    let mut n = vec![0i64; case.size - 1];
    for_each_weighted(twice / 2, 1, case.size - 1, &mut n, &mut |n| {
        if failure.is_some() {
            return;
        }
        let sys = match case.m_system(n) {
            Ok(s) => s,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let mut prod = QPoly::one();
        for i in 1..=case.size - 2 {
            let b = case.binomial(&sys, i, &mut cache);
            if b.is_zero() {
                return;
            }
            prod = prod * b;
        }
        let e = case.exponent(&sys);
        *acc.entry(e).or_insert_with(QPoly::zero) += &prod;
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(acc.into_iter().map(|(e, p)| p.shift(QExponent::from_eighths(e))).sum())
}

/// The finitized ABF generating function (flags `case.flags()`) at
/// length `L`.
pub fn melzer_finitized(case: &FermionicCase, l: usize) -> Result<QPoly> {
    require_family(case, &[Family::AbfFinitized])?;
    finitized_sum(case, l as i64)
}

/// The finitized valley-restricted ABF generating function at length `L`.
pub fn rabf_finitized(case: &FermionicCase, l: usize) -> Result<QPoly> {
    require_family(case, &[Family::RestrictedFinitized])?;
    finitized_sum(case, l as i64)
}

/// The finitized half-lattice generating function at length `L`.
pub fn hl_finitized(case: &FermionicCase, l: HalfInt) -> Result<QPoly> {
    require_family(case, &[Family::HalfFinitized])?;
    if l.doubled() < 0 {
        return Err(Error::InvalidParameters(format!("negative length {l}")));
    }
    let (a, b) = (half_from_json(&case.params["a"]), half_from_json(&case.params["b"]));
    if !(l + a + b).is_integer() {
        return Ok(QPoly::zero());
    }
    finitized_sum(case, l.doubled())
}

/// Radius `R` such that any `m` with `scale (m C m^T - 2 m_ell) + prefactor
/// <= order` (all in eighths) has `|m_i| <= R`. Uses the smallest
/// eigenvalue `4 sin^2(pi / (2(d+1)))` of the `d x d` Cartan matrix and
/// `|m_ell| <= |m|`; the `n.T^R` term is non-negative and dropped.
fn box_radius(case: &FermionicCase, order_eighths: i64) -> i64 {
    let d = (case.size - 2) as f64;
    let lambda = 4.0 * (std::f64::consts::PI / (2.0 * (d + 1.0))).sin().powi(2) * (1.0 - 1e-9);
    let budget = ((order_eighths - case.prefactor.eighths) as f64 / case.scale as f64).max(0.0);
    // lambda x^2 - 2x <= budget
    let x = (1.0 + (1.0 + lambda * budget).sqrt()) / lambda;
    x.ceil() as i64 + 1
}

/// Visits every `n = (0, ..., 0, n_lo, ..., n_{size-1})`, `lo >= 2`,
/// whose `m_{lo-1}, ..., m_{size-2}` all lie in `[-radius, radius]`.
fn for_each_in_box(case: &FermionicCase, lo: usize, radius: i64, visit: &mut dyn FnMut(&[i64])) {
    struct Walk<'a> {
        case: &'a FermionicCase,
        lo: usize,
        radius: i64,
        n: Vec<i64>,
    }
    impl Walk<'_> {
        fn rec(&mut self, k: usize, tail_sum: i64, tail_weighted: i64, visit: &mut dyn FnMut(&[i64])) {
            if k < self.lo {
                visit(&self.n);
                return;
            }
            // m_{k-1} = 2 (sum_{j>=k} j n_j - (k-1) sum_{j>=k} n_j) - Delta_{k-1},
            // increasing in n_k.
            let i = k as i64 - 1;
            for c in 0.. {
                let (ts, tw) = (tail_sum + c, tail_weighted + c * k as i64);
                let m = 2 * (tw - i * ts) - self.case.delta[k - 1];
                if m > self.radius {
                    break;
                }
                if m >= -self.radius {
                    self.n[k - 1] = c;
                    self.rec(k - 1, ts, tw, visit);
                }
            }
            self.n[k - 1] = 0;
        }
    }
    assert!(lo >= 2);
    let mut walk = Walk {
        case,
        lo,
        radius,
        n: vec![0; case.size - 1],
    };
    walk.rec(case.size - 1, 0, 0, visit);
}

/// Character-level sum up to and including `q^order`, over the finite set
/// of `n` whose `m` lies in the box from [`box_radius`].
fn character_sum(case: &FermionicCase, order: i64) -> Result<Series> {
    let ord = QExponent::from_int(order);
    let radius = box_radius(case, ord.eighths);
    let mut cache = BinomialCache::new();
    let mut inverse: HashMap<(i64, i64), Series> = HashMap::new();
    let mut acc = QPoly::zero();
    let mut failure = None;
    for_each_in_box(case, 2, radius, &mut |n| {
        if failure.is_some() {
            return;
        }
        let sys = match case.m_system(n) {
            Ok(s) => s,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let e = case.exponent(&sys);
        if e > ord.eighths {
            return;
        }
        let m1 = case.lower_index(&sys, 1);
        if m1 < 0 {
            return;
        }
        let mut prod = QPoly::one();
        for i in 2..=case.size - 2 {
            let b = case.binomial(&sys, i, &mut cache);
            if b.is_zero() {
                return;
            }
            prod = prod * b;
        }
        let rel = ord.eighths - e;
        let inv = inverse
            .entry((m1, rel))
            .or_insert_with(|| inv_pochhammer_finite(m1, QExponent::from_eighths(rel)));
        let term = inv.mul_poly(&prod).truncate(QExponent::from_eighths(rel));
        acc += &term.poly().shift(QExponent::from_eighths(e));
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(Series::new(acc, ord)),
    }
}

/// `chi^{p,p+1}_{r,s}` from a row of its case table, to `order`.
pub fn melzer_character(case: &FermionicCase, order: i64) -> Result<Series> {
    require_family(case, &[Family::AbfCharacter])?;
    character_sum(case, order)
}

/// `chi^{t,2t+1}_{r,2a}` from a row of its case table, to `order`.
pub fn hl_character(case: &FermionicCase, order: i64) -> Result<Series> {
    require_family(case, &[Family::HalfCharacter])?;
    character_sum(case, order)
}

/// `chi^{t,2t+1}_{b,2a} + q^{a-b} chi^{t,2t+1}_{b-1,2a}` as the large-`L`
/// limit of `Y^{1;t}_{a,b}(L)`, using `L = 2*order` and checking that
/// `L + 1` agrees.
pub fn hl_character_pair(t: HalfInt, a: i64, b: i64, order: i64) -> Result<Series> {
    if b <= 1 || HalfInt::from_int(b) >= t || a < 1 || HalfInt::from_int(a) > t {
        return Err(Error::InvalidParameters(format!(
            "need 1 < b < t, 1 <= a <= t; got t={t}, a={a}, b={b}"
        )));
    }
    let ord = QExponent::from_int(order);
    let l = 2 * order.max(0);
    let series = y_polynomial(1, t, a, b, l).truncate(ord);
    if series != y_polynomial(1, t, a, b, l + 1).truncate(ord) {
        return Err(Error::InvalidParameters(format!("limit not yet stable at L={l}")));
    }
    Ok(series)
}

/// The character parameters `(p, p', r, s)` that a character row computes.
pub fn character_params(case: &FermionicCase) -> Result<CharacterParams> {
    let get = |k: &str| case.params[k].clone();
    match case.family {
        Family::AbfCharacter => {
            let p = get("p").as_i64().expect("recorded");
            let r = get("r").as_i64().expect("recorded");
            let s = get("s").as_i64().expect("recorded");
            CharacterParams::new(HalfInt::from_int(p), p + 1, HalfInt::from_int(r), s)
        }
        Family::HalfCharacter => {
            let t: HalfInt = half_from_json(&get("t"));
            let r = get("r").as_i64().expect("recorded");
            let a = get("a").as_i64().expect("recorded");
            CharacterParams::half_lattice(t, r, a)
        }
        _ => Err(Error::InvalidParameters("not a character row".into())),
    }
}

fn half_from_json(v: &serde_json::Value) -> HalfInt {
    match v {
        serde_json::Value::Number(n) => HalfInt::from_int(n.as_i64().expect("integer")),
        serde_json::Value::String(s) => s.parse().expect("serialized half-integer"),
        other => panic!("not a half-integer: {other}"),
    }
}

/// Where a modified binomial is needed, as listed for each row: `true`
/// iff replacing the modified binomial at index `i` by a plain one may
/// change the value.
pub fn modified_binomial_required(case: &FermionicCase, i: i64) -> bool {
    let p = &case.params;
    let int = |k: &str| p[k].as_i64();
    match case.family {
        Family::RestrictedFinitized => {
            let (pp, a, b) = (int("p").unwrap(), int("a").unwrap(), int("b").unwrap());
            let same = |x: i64, y: i64| (x - y).rem_euclid(2) == 0;
            match case.case_id {
                CaseId::A => a == b && a > 2 && i < a && same(i, a),
                CaseId::B => a > 1 && b == pp && i > pp - a && same(i, pp),
                CaseId::C => a > 1 && b > 1 && i > (pp - a).max(pp - b) && same(i, pp),
                CaseId::D => a == pp && b > 1 && i > pp - b && same(i, pp),
            }
        }
        Family::HalfFinitized => {
            let (t, a, b) = (
                half_from_json(&p["t"]),
                half_from_json(&p["a"]),
                half_from_json(&p["b"]),
            );
            let (tt, aa, bb) = (t.doubled(), a.doubled(), b.doubled());
            let one = HalfInt::from_int(1);
            let differ = |x: i64, y: i64| (x - y).rem_euclid(2) != 0;
            match case.case_id {
                CaseId::A => a == b && a >= HalfInt::from_int(2) && i < aa - 1 && differ(i, aa),
                CaseId::B => a > one && b == t && i > tt - aa && differ(i, tt),
                CaseId::C => a > one && b > one && i > (tt - aa).max(tt - bb) && differ(i, tt),
                CaseId::D => a == t && b > one && i > tt - bb && differ(i, tt),
            }
        }
        Family::HalfCharacter => {
            let t = half_from_json(&p["t"]);
            let (r, a) = (int("r").unwrap(), int("a").unwrap());
            let tt = t.doubled();
            let differ = |x: i64, y: i64| (x - y).rem_euclid(2) != 0;
            match case.case_id {
                CaseId::A => false,
                CaseId::B => a > 1 && 2 * r == tt - 1 && i > tt - 2 * a && differ(i, tt),
                CaseId::C => a > 1 && r > 1 && i > (tt - 2 * a).max(tt - 2 * r) && differ(i, tt),
                CaseId::D => 2 * a == tt && r > 1 && i > tt - 2 * r && differ(i, tt),
            }
        }
        Family::AbfFinitized | Family::AbfCharacter => false,
    }
}

/// Dual evaluation of a row with a modified-binomial table: for each
/// binomial index `i`, whether making that one factor plain changes the
/// finitized value at some length in `lengths` (doubled for half-lattice
/// rows) or the character to `order`, compared with the listed
/// requirement.
pub fn modified_binomial_dual_check(case: &FermionicCase, lengths: &[i64], order: i64) -> Result<Vec<CheckRecord>> {
    let first = if case.is_character() { 2 } else { 1 };
    let eval = |c: &FermionicCase| -> Result<Vec<QPoly>> {
        if c.is_character() {
            return Ok(vec![character_sum(c, order)?.into_poly()]);
        }
        lengths.iter().map(|&l| finitized_sum(c, l)).collect()
    };
    let reference = eval(case)?;
    let mut out = Vec::new();
    for i in first..=(case.size as i64 - 2) {
        let plain = eval(&case.with_plain_at(i as usize))?;
        let observed = plain != reference;
        let predicted = modified_binomial_required(case, i);
        let idx = json!({
            "family": case.family,
            "case": case.case_id,
            "params": case.params,
            "i": i,
            "observed": observed,
            "predicted": predicted,
        });
        out.push(CheckRecord::boolean(
            "modified_binomial_required",
            idx,
            observed == predicted,
            None,
        ));
    }
    Ok(out)
}

/// Structural checks on the linear systems: `m_{size-1} = 0`, integrality
/// of `hat m`, and `m_0 = target` for every enumerated `n`.
pub fn verify_m_systems(case: &FermionicCase, target: i64) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let twice = target + case.delta[0];
    if twice < 0 || twice % 2 != 0 {
        return out;
    }
    let mut n = vec![0i64; case.size - 1];
    for_each_weighted(twice / 2, 1, case.size - 1, &mut n, &mut |n| {
        let idx = json!({ "family": case.family, "case": case.case_id, "params": case.params, "n": n });
        match case.m_system(n) {
            Ok(sys) => {
                let ok = sys.m[case.size - 1] == 0 && sys.m[0] == target;
                out.push(CheckRecord::boolean("m_system", idx, ok, None));
            }
            Err(e) => out.push(CheckRecord::error("m_system", idx, &e)),
        }
    });
    out
}
