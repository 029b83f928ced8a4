//! Sparse Laurent polynomials in `q` with exponents in `(1/8)Z`, plus
//! order-truncated power series.
//!
//! The coefficient ring is a type parameter. Every generating function in
//! this crate is exact, so the concrete aliases at the crate root use
//! [`num_bigint::BigInt`], but the arithmetic itself only asks for
//! [`num_traits::Num`] and works equally well over `i64` or rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Num, One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Scalar types usable as coefficients.
pub trait Coefficient:
    Num + Clone + Neg<Output = Self> + fmt::Debug + fmt::Display + FromStr + Send + Sync + 'static
{
}

impl<T> Coefficient for T where
    T: Num + Clone + Neg<Output = T> + fmt::Debug + fmt::Display + FromStr + Send + Sync + 'static
{
}

/// An exponent of `q`, stored as an integer number of eighths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QExponent {
    pub eighths: i64,
}

impl QExponent {
    pub const DENOMINATOR: i64 = 8;
    pub const ZERO: QExponent = QExponent { eighths: 0 };

    pub const fn from_eighths(eighths: i64) -> Self {
        QExponent { eighths }
    }

    pub const fn from_int(n: i64) -> Self {
        QExponent { eighths: 8 * n }
    }

    /// `num/den`, failing unless the reduced denominator divides 8.
    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::ExponentNotRepresentable(format!("{num}/0")));
        }
        let scaled = num * 8;
        if scaled % den != 0 {
            return Err(Error::ExponentNotRepresentable(format!("{num}/{den}")));
        }
        Ok(QExponent::from_eighths(scaled / den))
    }

    pub fn is_integer(self) -> bool {
        self.eighths % 8 == 0
    }

    /// The exponent as a reduced fraction `(num, den)`.
    pub fn as_ratio(self) -> (i64, i64) {
        let g = self.eighths.gcd(&8);
        (self.eighths / g, 8 / g)
    }
}

impl fmt::Display for QExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_ratio() {
            (n, 1) => write!(f, "{n}"),
            (n, d) => write!(f, "{n}/{d}"),
        }
    }
}

impl Add for QExponent {
    type Output = QExponent;
    fn add(self, rhs: Self) -> Self {
        QExponent::from_eighths(self.eighths + rhs.eighths)
    }
}

impl Sub for QExponent {
    type Output = QExponent;
    fn sub(self, rhs: Self) -> Self {
        QExponent::from_eighths(self.eighths - rhs.eighths)
    }
}

impl Neg for QExponent {
    type Output = QExponent;
    fn neg(self) -> Self {
        QExponent::from_eighths(-self.eighths)
    }
}

impl Mul<i64> for QExponent {
    type Output = QExponent;
    fn mul(self, rhs: i64) -> Self {
        QExponent::from_eighths(self.eighths * rhs)
    }
}

// Dense scratch buffers are used when the exponent lattice spanned by an
// operation has at most this many points.
const DENSE_LIMIT: i64 = 1 << 22;

/// A Laurent polynomial `sum c_e q^e` in canonical form: terms sorted by
/// strictly increasing exponent, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly<C> {
    terms: Vec<(QExponent, C)>,
}

impl<C: Coefficient> LaurentPoly<C> {
    pub fn zero() -> Self {
        LaurentPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(C::one(), QExponent::ZERO)
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, QExponent::ZERO)
    }

    pub fn monomial(c: C, e: QExponent) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            LaurentPoly { terms: vec![(e, c)] }
        }
    }

    /// `q^e` with unit coefficient.
    pub fn q_pow(e: QExponent) -> Self {
        Self::monomial(C::one(), e)
    }

    /// `q^n` for an integer `n`.
    pub fn q_int(n: i64) -> Self {
        Self::q_pow(QExponent::from_int(n))
    }

    /// Builds a polynomial from arbitrary terms, merging repeated exponents
    /// and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (QExponent, C)>>(terms: I) -> Self {
        let mut map: BTreeMap<QExponent, C> = BTreeMap::new();
        for (e, c) in terms {
            match map.get_mut(&e) {
                Some(acc) => *acc = acc.clone() + c,
                None => {
                    map.insert(e, c);
                }
            }
        }
        Self::from_sorted_unchecked(map.into_iter())
    }

    /// Builds from integer exponents, e.g. `from_int_coeffs([(0, 1), (1, -1)])` is `1 - q`.
    pub fn from_int_terms<I: IntoIterator<Item = (i64, C)>>(terms: I) -> Self {
        Self::from_terms(terms.into_iter().map(|(e, c)| (QExponent::from_int(e), c)))
    }

    fn from_sorted_unchecked<I: Iterator<Item = (QExponent, C)>>(iter: I) -> Self {
        LaurentPoly {
            terms: iter.filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == QExponent::ZERO && self.terms[0].1.is_one()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (QExponent, &C)> + ExactSizeIterator {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn into_terms(self) -> Vec<(QExponent, C)> {
        self.terms
    }

    pub fn coeff(&self, e: QExponent) -> C {
        match self.terms.binary_search_by(|(x, _)| x.cmp(&e)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => C::zero(),
        }
    }

    /// Coefficient of `q^n` for integer `n`.
    pub fn coeff_int(&self, n: i64) -> C {
        self.coeff(QExponent::from_int(n))
    }

    pub fn min_exponent(&self) -> Option<QExponent> {
        self.terms.first().map(|(e, _)| *e)
    }

    pub fn max_exponent(&self) -> Option<QExponent> {
        self.terms.last().map(|(e, _)| *e)
    }

    /// Value at `q = 1`.
    pub fn eval_at_one(&self) -> C {
        self.terms.iter().fold(C::zero(), |acc, (_, c)| acc + c.clone())
    }

    /// Multiplication by `q^e`.
    pub fn shift(&self, e: QExponent) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(x, c)| (*x + e, c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self::from_sorted_unchecked(self.terms.iter().map(|(e, c)| (*e, c.clone() * k.clone())))
    }

    pub fn map_coefficients<D: Coefficient, F: FnMut(&C) -> D>(&self, mut f: F) -> LaurentPoly<D> {
        LaurentPoly::from_sorted_unchecked(self.terms.iter().map(|(e, c)| (*e, f(c))))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact quotient `self / divisor` in the Laurent-polynomial ring.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let (a_min, a_max) = (self.terms[0].0, self.terms[self.terms.len() - 1].0);
        let (b_min, b_max) = (divisor.terms[0].0, divisor.terms[divisor.terms.len() - 1].0);
        if a_max - a_min < b_max - b_min {
            return Err(Error::NonExactDivision);
        }
        let stride = lattice_stride(self, a_min, divisor, b_min);
        let span = (a_max.eighths - a_min.eighths) / stride;
        if span <= DENSE_LIMIT {
            self.div_exact_dense(divisor, stride)
        } else {
            self.div_exact_sparse(divisor)
        }
    }

    fn div_exact_dense(&self, divisor: &Self, stride: i64) -> Result<Self> {
        let a_min = self.terms[0].0;
        let a_max = self.terms[self.terms.len() - 1].0;
        let (b_min, b_lead) = (divisor.terms[0].0, &divisor.terms[0].1);
        let b_max = divisor.terms[divisor.terms.len() - 1].0;
        let q_max = a_max - b_max;
        let len = ((a_max.eighths - a_min.eighths) / stride + 1) as usize;
        let mut rem: Vec<C> = vec![C::zero(); len];
        for (e, c) in &self.terms {
            rem[((e.eighths - a_min.eighths) / stride) as usize] = c.clone();
        }
        let offsets: Vec<(usize, &C)> = divisor
            .terms
            .iter()
            .map(|(e, c)| (((e.eighths - b_min.eighths) / stride) as usize, c))
            .collect();
        let mut quotient = Vec::new();
        for i in 0..len {
            if rem[i].is_zero() {
                continue;
            }
            let qe = QExponent::from_eighths(a_min.eighths + i as i64 * stride) - b_min;
            if qe > q_max {
                return Err(Error::NonExactDivision);
            }
            let qc = exact_quotient(&rem[i], b_lead)?;
            for &(off, bc) in &offsets {
                let j = i + off;
                if j >= len {
                    return Err(Error::NonExactDivision);
                }
                rem[j] = rem[j].clone() - qc.clone() * bc.clone();
            }
            quotient.push((qe, qc));
        }
        Ok(Self::from_sorted_unchecked(quotient.into_iter()))
    }

    fn div_exact_sparse(&self, divisor: &Self) -> Result<Self> {
        let b_max = divisor.terms[divisor.terms.len() - 1].0;
        let q_max = self.terms[self.terms.len() - 1].0 - b_max;
        let (b_min, b_lead) = (divisor.terms[0].0, &divisor.terms[0].1);
        let mut rem: BTreeMap<QExponent, C> = self.terms.iter().cloned().collect();
        let mut quotient = Vec::new();
        while let Some((&e, c)) = rem.iter().next() {
            let qe = e - b_min;
            if qe > q_max {
                return Err(Error::NonExactDivision);
            }
            let qc = exact_quotient(c, b_lead)?;
            for (be, bc) in &divisor.terms {
                let key = qe + *be;
                let cur = rem.remove(&key).unwrap_or_else(C::zero);
                let next = cur - qc.clone() * bc.clone();
                if !next.is_zero() {
                    rem.insert(key, next);
                }
            }
            quotient.push((qe, qc));
        }
        Ok(Self::from_sorted_unchecked(quotient.into_iter()))
    }

    /// Replaces `q` by `q^k`, mapping every exponent `e` to `k*e`.
    pub fn substitute_power(&self, k: Rational64) -> Result<Self> {
        let (num, den) = (*k.numer(), *k.denom());
        let mut out = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let scaled = e.eighths * num;
            if scaled % den != 0 {
                return Err(Error::ExponentNotRepresentable(format!("({}) * {}", e, k)));
            }
            out.push((QExponent::from_eighths(scaled / den), c.clone()));
        }
        if num > 0 {
            Ok(Self::from_sorted_unchecked(out.into_iter()))
        } else {
            Ok(Self::from_terms(out))
        }
    }

    /// Drops every term with exponent above `order`.
    pub fn truncate(&self, order: QExponent) -> TruncatedSeries<C> {
        TruncatedSeries::new(self.clone(), order)
    }

    fn mul_impl(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let a_min = self.terms[0].0;
        let b_min = rhs.terms[0].0;
        let stride = lattice_stride(self, a_min, rhs, b_min);
        let a_span = (self.terms[self.terms.len() - 1].0.eighths - a_min.eighths) / stride;
        let b_span = (rhs.terms[rhs.terms.len() - 1].0.eighths - b_min.eighths) / stride;
        let span = a_span + b_span;
        if span > DENSE_LIMIT {
            return Self::from_terms(self.terms.iter().flat_map(|(ea, ca)| {
                rhs.terms
                    .iter()
                    .map(move |(eb, cb)| (*ea + *eb, ca.clone() * cb.clone()))
            }));
        }
        let mut acc: Vec<C> = vec![C::zero(); span as usize + 1];
        for (ea, ca) in &self.terms {
            let ia = ((ea.eighths - a_min.eighths) / stride) as usize;
            for (eb, cb) in &rhs.terms {
                let ib = ((eb.eighths - b_min.eighths) / stride) as usize;
                let slot = &mut acc[ia + ib];
                *slot = slot.clone() + ca.clone() * cb.clone();
            }
        }
        let base = a_min + b_min;
        Self::from_sorted_unchecked(
            acc.into_iter()
                .enumerate()
                .map(|(i, c)| (QExponent::from_eighths(base.eighths + i as i64 * stride), c)),
        )
    }

    fn merge_with(&self, rhs: &Self, negate_rhs: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        let take_rhs = |c: &C| if negate_rhs { -c.clone() } else { c.clone() };
        while i < self.terms.len() && j < rhs.terms.len() {
            let (ea, ca) = &self.terms[i];
            let (eb, cb) = &rhs.terms[j];
            match ea.cmp(eb) {
                Ordering::Less => {
                    out.push((*ea, ca.clone()));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((*eb, take_rhs(cb)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = ca.clone() + take_rhs(cb);
                    if !c.is_zero() {
                        out.push((*ea, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(rhs.terms[j..].iter().map(|(e, c)| (*e, take_rhs(c))));
        LaurentPoly { terms: out }
    }
}

fn exact_quotient<C: Coefficient>(num: &C, den: &C) -> Result<C> {
    let q = num.clone() / den.clone();
    if q.clone() * den.clone() == *num {
        Ok(q)
    } else {
        Err(Error::NonExactDivision)
    }
}

/// Largest stride `g` (in eighths) such that every exponent of `a` is
/// `a_min + k*g` and every exponent of `b` is `b_min + k*g`.
fn lattice_stride<C>(a: &LaurentPoly<C>, a_min: QExponent, b: &LaurentPoly<C>, b_min: QExponent) -> i64 {
    let g = a
        .terms
        .iter()
        .map(|(e, _)| e.eighths - a_min.eighths)
        .chain(b.terms.iter().map(|(e, _)| e.eighths - b_min.eighths))
        .fold(0i64, |g, d| g.gcd(&d));
    if g == 0 {
        1
    } else {
        g
    }
}

impl<C: Coefficient> Default for LaurentPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<'a, C: Coefficient> Add<&'a LaurentPoly<C>> for &'a LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn add(self, rhs: &'a LaurentPoly<C>) -> LaurentPoly<C> {
        self.merge_with(rhs, false)
    }
}

impl<'a, C: Coefficient> Sub<&'a LaurentPoly<C>> for &'a LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn sub(self, rhs: &'a LaurentPoly<C>) -> LaurentPoly<C> {
        self.merge_with(rhs, true)
    }
}

impl<'a, C: Coefficient> Mul<&'a LaurentPoly<C>> for &'a LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn mul(self, rhs: &'a LaurentPoly<C>) -> LaurentPoly<C> {
        self.mul_impl(rhs)
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl<C: Coefficient> $tr for LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $method(self, rhs: LaurentPoly<C>) -> LaurentPoly<C> {
                (&self).$method(&rhs)
            }
        }
        impl<'a, C: Coefficient> $tr<&'a LaurentPoly<C>> for LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $method(self, rhs: &'a LaurentPoly<C>) -> LaurentPoly<C> {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl<C: Coefficient> AddAssign<&LaurentPoly<C>> for LaurentPoly<C> {
    fn add_assign(&mut self, rhs: &LaurentPoly<C>) {
        *self = self.merge_with(rhs, false);
    }
}

impl<C: Coefficient> SubAssign<&LaurentPoly<C>> for LaurentPoly<C> {
    fn sub_assign(&mut self, rhs: &LaurentPoly<C>) {
        *self = self.merge_with(rhs, true);
    }
}

impl<C: Coefficient> Neg for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        LaurentPoly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl<C: Coefficient> Neg for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        -(self.clone())
    }
}

impl<C: Coefficient> Zero for LaurentPoly<C> {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Coefficient> One for LaurentPoly<C> {
    fn one() -> Self {
        LaurentPoly::one()
    }
}

impl<C: Coefficient> std::iter::Sum for LaurentPoly<C> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, p| acc + p)
    }
}

impl<C: Coefficient> fmt::Display for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let s = c.to_string();
            let (neg, mag) = match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let unit = mag == "1";
            if *e == QExponent::ZERO {
                write!(f, "{mag}")?;
                continue;
            }
            if !unit {
                write!(f, "{mag}")?;
            }
            match e.as_ratio() {
                (1, 1) => write!(f, "q")?,
                (n, 1) => write!(f, "q^{n}")?,
                (n, d) => write!(f, "q^({n}/{d})")?,
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct WirePoly {
    den: i64,
    terms: Vec<(i64, String)>,
}

impl<C: Coefficient> Serialize for LaurentPoly<C> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WirePoly {
            den: QExponent::DENOMINATOR,
            terms: self.terms.iter().map(|(e, c)| (e.eighths, c.to_string())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, C: Coefficient> Deserialize<'de> for LaurentPoly<C> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = WirePoly::deserialize(deserializer)?;
        if wire.den != QExponent::DENOMINATOR {
            return Err(D::Error::custom(format!(
                "unsupported exponent denominator {}",
                wire.den
            )));
        }
        let mut terms = Vec::with_capacity(wire.terms.len());
        for (e, c) in wire.terms {
            let c = c
                .parse::<C>()
                .map_err(|_| D::Error::custom(format!("bad coefficient {c:?}")))?;
            terms.push((QExponent::from_eighths(e), c));
        }
        Ok(LaurentPoly::from_terms(terms))
    }
}

/// A Laurent series known exactly up to and including `order`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(serialize = "C: Coefficient", deserialize = "C: Coefficient"))]
pub struct TruncatedSeries<C> {
    poly: LaurentPoly<C>,
    order: QExponent,
}

impl<C: Coefficient> TruncatedSeries<C> {
    pub fn new(poly: LaurentPoly<C>, order: QExponent) -> Self {
        let cut = poly.terms.partition_point(|(e, _)| *e <= order);
        let mut terms = poly.terms;
        terms.truncate(cut);
        TruncatedSeries {
            poly: LaurentPoly { terms },
            order,
        }
    }

    pub fn zero(order: QExponent) -> Self {
        TruncatedSeries {
            poly: LaurentPoly::zero(),
            order,
        }
    }

    pub fn poly(&self) -> &LaurentPoly<C> {
        &self.poly
    }

    pub fn into_poly(self) -> LaurentPoly<C> {
        self.poly
    }

    pub fn order(&self) -> QExponent {
        self.order
    }

    pub fn coeff(&self, e: QExponent) -> Option<C> {
        (e <= self.order).then(|| self.poly.coeff(e))
    }

    /// Re-truncates at a lower order.
    pub fn truncate(&self, order: QExponent) -> Self {
        TruncatedSeries::new(self.poly.clone(), order.min(self.order))
    }

    /// Lowest exponent at which the series may be nonzero.
    fn valuation_bound(&self) -> QExponent {
        self.poly.min_exponent().unwrap_or(self.order)
    }

    pub fn shift(&self, e: QExponent) -> Self {
        TruncatedSeries {
            poly: self.poly.shift(e),
            order: self.order + e,
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        TruncatedSeries {
            poly: self.poly.scale(k),
            order: self.order,
        }
    }

    /// Multiplies by an exact polynomial.
    pub fn mul_poly(&self, p: &LaurentPoly<C>) -> Self {
        if p.is_zero() {
            return TruncatedSeries::zero(self.order);
        }
        let v = p.min_exponent().unwrap_or(QExponent::ZERO);
        TruncatedSeries::new(&self.poly * p, self.order + v)
    }

    /// Power-series reciprocal of `p` to the given order. The lowest
    /// coefficient of `p` must be a unit of the coefficient ring.
    pub fn reciprocal(p: &LaurentPoly<C>, order: QExponent) -> Result<Self> {
        let (v, lead) = match p.terms.first() {
            Some((e, c)) => (*e, c.clone()),
            None => return Err(Error::DivisionByZero),
        };
        let inv_lead = exact_quotient(&C::one(), &lead)?;
        // Normalise to 1 + (higher terms) at exponent 0.
        let unit = p.shift(-v).scale(&inv_lead);
        let shifted_order = order + v;
        let mut result: BTreeMap<QExponent, C> = BTreeMap::new();
        // Long division of 1 by `unit`, ascending.
        let mut rem: BTreeMap<QExponent, C> = BTreeMap::new();
        rem.insert(QExponent::ZERO, C::one());
        while let Some((&e, c)) = rem.iter().next() {
            if e > shifted_order {
                break;
            }
            let c = c.clone();
            for (ue, uc) in &unit.terms {
                let key = e + *ue;
                if key > shifted_order {
                    break;
                }
                let cur = rem.remove(&key).unwrap_or_else(C::zero);
                let next = cur - c.clone() * uc.clone();
                if !next.is_zero() {
                    rem.insert(key, next);
                }
            }
            result.insert(e, c);
        }
        let poly = LaurentPoly::from_sorted_unchecked(result.into_iter()).scale(&inv_lead);
        Ok(TruncatedSeries::new(poly.shift(-v), order))
    }
}

impl<'a, C: Coefficient> Add<&'a TruncatedSeries<C>> for &'a TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn add(self, rhs: &'a TruncatedSeries<C>) -> TruncatedSeries<C> {
        TruncatedSeries::new(&self.poly + &rhs.poly, self.order.min(rhs.order))
    }
}

impl<'a, C: Coefficient> Sub<&'a TruncatedSeries<C>> for &'a TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn sub(self, rhs: &'a TruncatedSeries<C>) -> TruncatedSeries<C> {
        TruncatedSeries::new(&self.poly - &rhs.poly, self.order.min(rhs.order))
    }
}

impl<'a, C: Coefficient> Mul<&'a TruncatedSeries<C>> for &'a TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn mul(self, rhs: &'a TruncatedSeries<C>) -> TruncatedSeries<C> {
        // The product is exact up to min(o_a + v_b, o_b + v_a); for series
        // starting at a nonnegative exponent that is at least min(o_a, o_b).
        let exact_to = (self.order + rhs.valuation_bound()).min(rhs.order + self.valuation_bound());
        let order = self.order.min(rhs.order).min(exact_to);
        TruncatedSeries::new(&self.poly * &rhs.poly, order)
    }
}

impl<C: Coefficient> Add for TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<C: Coefficient> Sub for TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl<C: Coefficient> Mul for TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<C: Coefficient> fmt::Display for TruncatedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(q^{})", self.poly, self.order + QExponent::from_eighths(1))
    }
}

impl<C: Coefficient> fmt::Debug for TruncatedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries({} | order {})", self.poly, self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::{BigRational, Ratio};

    type P = LaurentPoly<BigInt>;

    fn p(terms: &[(i64, i64)]) -> P {
        P::from_int_terms(terms.iter().map(|&(e, c)| (e, BigInt::from(c))))
    }

    fn half() -> QExponent {
        QExponent::from_eighths(4)
    }

    #[test]
    fn add_cancels_to_canonical_form() {
        let sum = p(&[(0, 1), (1, 1)]) + p(&[(1, -1)]);
        assert_eq!(sum, P::one());
        assert_eq!(sum.len(), 1);
    }

    #[test]
    fn zero_is_additive_identity() {
        let x = p(&[(-2, 3), (0, 1), (5, -7)]);
        assert_eq!(P::zero() + x.clone(), x);
        assert!((x.clone() - x).is_zero());
    }

    #[test]
    fn like_terms_merge_at_half_exponent() {
        let h = P::q_pow(half());
        let twice = &h + &h;
        assert_eq!(twice.coeff(half()), BigInt::from(2));
        assert_eq!(twice.len(), 1);
    }

    #[test]
    fn product_examples() {
        assert_eq!(p(&[(0, 1), (1, 1)]) * p(&[(0, 1), (1, -1)]), p(&[(0, 1), (2, -1)]));
        assert_eq!(P::q_pow(half()) * P::q_pow(half()), P::q_int(1));
        let x = p(&[(0, 1), (1, 1), (2, 1)]);
        assert_eq!(x.clone() * P::one(), x);
    }

    #[test]
    fn exact_division_examples() {
        let one_minus_q = p(&[(0, 1), (1, -1)]);
        assert_eq!(
            p(&[(0, 1), (2, -1)]).div_exact(&one_minus_q).unwrap(),
            p(&[(0, 1), (1, 1)])
        );
        let x = p(&[(-3, 2), (4, 9)]);
        assert_eq!(x.div_exact(&P::one()).unwrap(), x);
        // (q)_2 / (q)_1 = 1 - q^2
        let poch2 = p(&[(0, 1), (1, -1)]) * p(&[(0, 1), (2, -1)]);
        assert_eq!(poch2.div_exact(&one_minus_q).unwrap(), p(&[(0, 1), (2, -1)]));
    }

    #[test]
    fn non_exact_division_is_reported() {
        let err = p(&[(0, 1), (1, 1)]).div_exact(&p(&[(0, 1), (1, -1)]));
        assert!(matches!(err, Err(Error::NonExactDivision)));
        let err = p(&[(0, 3)]).div_exact(&p(&[(0, 2)]));
        assert!(matches!(err, Err(Error::NonExactDivision)));
        assert!(matches!(P::one().div_exact(&P::zero()), Err(Error::DivisionByZero)));
    }

    #[test]
    fn division_over_rationals_allows_non_unit_leads() {
        type R = LaurentPoly<BigRational>;
        let two = BigRational::from_integer(BigInt::from(2));
        let a = R::constant(two.clone())
            * R::from_int_terms([(0, Ratio::from_integer(1.into())), (1, Ratio::from_integer(1.into()))]);
        let b = R::constant(two.clone() * two.clone());
        let q = a.div_exact(&b).unwrap();
        assert_eq!(q.coeff_int(1), Ratio::new(BigInt::from(1), BigInt::from(2)));
    }

    #[test]
    fn substitute_power_examples() {
        assert_eq!(
            p(&[(0, 1), (2, 1)]).substitute_power(Rational64::new(1, 2)).unwrap(),
            p(&[(0, 1), (1, 1)])
        );
        assert_eq!(
            P::q_int(1).substitute_power(Rational64::from_integer(2)).unwrap(),
            P::q_int(2)
        );
        let x = P::one() + P::q_pow(half());
        let y = P::one() + P::q_pow(QExponent::from_eighths(2));
        assert_eq!(x.substitute_power(Rational64::new(1, 2)).unwrap(), y);
    }

    #[test]
    fn substitute_power_rejects_sub_eighth_exponents() {
        let x = P::q_pow(QExponent::from_eighths(1));
        assert!(matches!(
            x.substitute_power(Rational64::new(1, 2)),
            Err(Error::ExponentNotRepresentable(_))
        ));
    }

    #[test]
    fn truncate_examples() {
        let t = p(&[(0, 1), (1, 1), (3, 1)]).truncate(QExponent::from_int(2));
        assert_eq!(t.poly(), &p(&[(0, 1), (1, 1)]));
        assert_eq!(t.order(), QExponent::from_int(2));
        assert!(P::zero().truncate(QExponent::from_int(7)).poly().is_zero());
        let t = p(&[(0, 1), (21, 1)]).truncate(QExponent::from_int(20));
        assert_eq!(t.poly(), &P::one());
    }

    #[test]
    fn truncated_product_uses_smaller_order() {
        let a = p(&[(0, 1), (1, 1), (2, 1)]).truncate(QExponent::from_int(2));
        let b = p(&[(0, 1), (1, 1)]).truncate(QExponent::from_int(5));
        let c = &a * &b;
        assert_eq!(c.order(), QExponent::from_int(2));
        assert_eq!(c.poly(), &p(&[(0, 1), (1, 2), (2, 2)]));
    }

    #[test]
    fn reciprocal_of_one_minus_q_is_geometric() {
        let s = TruncatedSeries::reciprocal(&p(&[(0, 1), (1, -1)]), QExponent::from_int(6)).unwrap();
        assert_eq!(s.poly(), &P::from_int_terms((0..=6).map(|e| (e, BigInt::from(1)))));
    }

    #[test]
    fn display_is_readable() {
        let x = p(&[(0, 1), (1, -2)]) + P::q_pow(QExponent::from_eighths(-12));
        assert_eq!(x.to_string(), "q^(-3/2) + 1 - 2q");
        assert_eq!(P::zero().to_string(), "0");
    }

    #[test]
    fn json_wire_format() {
        let x = p(&[(0, 1), (1, -2)]) + P::q_pow(half());
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"den":8,"terms":[[0,"1"],[4,"1"],[8,"-2"]]}"#);
        let back: P = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<P>(r#"{"den":4,"terms":[]}"#).is_err());
    }

    #[test]
    fn exponent_ratio_helpers() {
        assert_eq!(QExponent::from_ratio(3, 4).unwrap().eighths, 6);
        assert!(QExponent::from_ratio(1, 3).is_err());
        assert_eq!(QExponent::from_eighths(-12).to_string(), "-3/2");
    }
}
