//! q-Pochhammer symbols, Gaussian binomials (plain, modified and in base
//! `q^k`), q-trinomial coefficients in both defining forms, and a
//! verification suite for their recurrences, symmetry and limits.

use std::cell::RefCell;
use std::collections::HashMap;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::Rational64;
use serde_json::json;

use crate::qpoly::{QExponent, TruncatedSeries};
use crate::report::CheckRecord;
use crate::{QPoly, Series};

/// `(q)_n = (1-q)(1-q^2)...(1-q^n)`.
pub fn q_pochhammer(n: usize) -> QPoly {
    let mut acc = QPoly::one();
    for i in 1..=n as i64 {
        acc = &acc - &acc.shift(QExponent::from_int(i));
    }
    acc
}

/// `1/(q)_inf`, the partition generating function, up to `order`.
pub fn inv_pochhammer_truncated(order: QExponent) -> Series {
    let top = order.eighths.div_euclid(8).max(0) as usize;
    TruncatedSeries::reciprocal(&q_pochhammer(top), order).expect("(q)_n has unit constant term")
}

/// `1/(q)_m` as a truncated series, zero for `m < 0`.
pub fn inv_pochhammer_finite(m: i64, order: QExponent) -> Series {
    if m < 0 {
        return Series::zero(order);
    }
    let top = order.eighths.div_euclid(8).max(0);
    let factors = q_pochhammer(m.min(top) as usize);
    TruncatedSeries::reciprocal(&factors, order).expect("(q)_m has unit constant term")
}

thread_local! {
    static BINOMIALS: RefCell<HashMap<(i64, i64), QPoly>> = RefCell::new(HashMap::new());
    static TRINOMIALS: RefCell<HashMap<(i64, i64, i64), QPoly>> = RefCell::new(HashMap::new());
}

/// The Gaussian binomial `[n+m, n]_q = (q)_{n+m} / ((q)_n (q)_m)` for
/// `n, m >= 0`, and zero otherwise. Results are memoized per thread.
pub fn q_binomial(n: i64, m: i64) -> QPoly {
    if n < 0 || m < 0 {
        return QPoly::zero();
    }
    let key = (n.min(m), n.max(m));
    if let Some(hit) = BINOMIALS.with(|c| c.borrow().get(&key).cloned()) {
        return hit;
    }
    let value = binomial_uncached(key.0, key.1);
    BINOMIALS.with(|c| c.borrow_mut().insert(key, value.clone()));
    value
}

fn binomial_uncached(n: i64, m: i64) -> QPoly {
    let k = n.min(m);
    let big = n + m;
    // After step j the accumulator is [big-k+j, j]_q.
    let mut acc = QPoly::one();
    for j in 1..=k {
        acc = &acc - &acc.shift(QExponent::from_int(big - k + j));
        acc = acc
            .div_exact(&one_minus_q_pow(j))
            .expect("Gaussian binomials are polynomials");
    }
    acc
}

/// As [`q_binomial`], but equal to 1 at `(n, m) = (0, -1)`.
pub fn q_binomial_modified(n: i64, m: i64) -> QPoly {
    if n == 0 && m == -1 {
        QPoly::one()
    } else {
        q_binomial(n, m)
    }
}

/// The (optionally modified) binomial with `q` replaced by `q^base_power`.
pub fn q_binomial_base(n: i64, m: i64, base_power: u32, modified: bool) -> QPoly {
    let b = if modified {
        q_binomial_modified(n, m)
    } else {
        q_binomial(n, m)
    };
    if base_power == 1 {
        return b;
    }
    b.substitute_power(Rational64::from_integer(base_power as i64))
        .expect("integer substitution keeps exponents in eighths")
}

fn one_minus_q_pow(i: i64) -> QPoly {
    QPoly::from_int_terms([(0, BigInt::from(1)), (i, BigInt::from(-1))])
}

/// Indices of the q-trinomial `T(n; d, L)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrinomialIndex {
    pub n: i64,
    pub d: i64,
    pub l: i64,
}

/// `T(n; d, L)` from the sum over `k` with Gaussian-binomial factors.
/// Zero when `L < 0` or `|d| > L`. Memoized per thread.
pub fn q_trinomial(n: i64, d: i64, l: i64) -> QPoly {
    if l < 0 || d.abs() > l {
        return QPoly::zero();
    }
    if let Some(hit) = TRINOMIALS.with(|c| c.borrow().get(&(n, d, l)).cloned()) {
        return hit;
    }
    let value = trinomial_uncached(n, d, l);
    TRINOMIALS.with(|c| c.borrow_mut().insert((n, d, l), value.clone()));
    value
}

fn trinomial_uncached(n: i64, d: i64, l: i64) -> QPoly {
    let mut acc = QPoly::zero();
    let k_min = 0.max(-d);
    let k_max = (l - d).div_euclid(2);
    for k in k_min..=k_max {
        // (q)_L / ((q)_k (q)_{k+d} (q)_{L-2k-d}) = [L, k] [L-k, k+d]
        let coeff = q_binomial(k, l - k) * q_binomial(k + d, l - 2 * k - d);
        acc += &coeff.shift(QExponent::from_int(k * (k + d - n)));
    }
    acc
}

/// `T(n; d, L)` from the alternative sum over `r`, with its quarter-integer
/// prefactor. The multinomial factor is computed by direct division of
/// Pochhammer products, independently of [`q_trinomial`].
pub fn q_trinomial_alt(n: i64, d: i64, l: i64) -> QPoly {
    if l < 0 || d.abs() > l {
        return QPoly::zero();
    }
    let top = q_pochhammer(l as usize);
    let mut acc = QPoly::zero();
    for r in 0..=(l - d.abs()) {
        if (l - d - r) % 2 != 0 {
            continue;
        }
        let lo = (l - d - r) / 2;
        let hi = (l + d - r) / 2;
        let denom = q_pochhammer(lo as usize) * q_pochhammer(hi as usize) * q_pochhammer(r as usize);
        let multinomial = top.div_exact(&denom).expect("q-multinomials are polynomials");
        // q^{((L-n-r)^2 - (d-n)^2)/4}, in eighths.
        let e = 2 * ((l - n - r).pow(2) - (d - n).pow(2));
        acc += &multinomial.shift(QExponent::from_eighths(e));
    }
    acc
}

/// Index ranges for [`verify_trinomial_identities`].
#[derive(Clone, Debug)]
pub struct TrinomialRanges {
    pub n: RangeInclusive<i64>,
    pub d: RangeInclusive<i64>,
    pub l: RangeInclusive<i64>,
}

impl Default for TrinomialRanges {
    fn default() -> Self {
        TrinomialRanges {
            n: 0..=3,
            d: -6..=6,
            l: 0..=12,
        }
    }
}

fn q(e: i64) -> QPoly {
    QPoly::q_int(e)
}

/// Checks the two defining forms against each other, the `d -> -d`
/// symmetry, the four three-term recurrences (for `L >= 1`), the two paired
/// identities and the mixed five-term identity, exactly, over the ranges.
pub fn verify_trinomial_identities(ranges: &TrinomialRanges) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for n in ranges.n.clone() {
        for d in ranges.d.clone() {
            for l in ranges.l.clone() {
                let idx = json!({ "n": n, "d": d, "L": l });
                let t = q_trinomial;
                let here = t(n, d, l);

                out.push(CheckRecord::compare(
                    "trinomial_forms",
                    idx.clone(),
                    &here,
                    &q_trinomial_alt(n, d, l),
                ));
                out.push(CheckRecord::compare(
                    "trinomial_symmetry",
                    idx.clone(),
                    &t(n, -d, l),
                    &here.shift(QExponent::from_int(-n * d)),
                ));

                if l >= 1 {
                    let m = l - 1;
                    let rec1 = q(l - d) * t(n + 1, d - 1, m) + t(n, d, m) + q(l + d - n) * t(n, d + 1, m);
                    let rec2 = q(l - d) * t(n, d - 1, m) + t(n - 1, d, m) + q(d - n + 1) * t(n - 1, d + 1, m);
                    let rec3 = q(l - d) * t(n, d - 1, m) + t(n, d, m) + q(l - n - 1) * t(n + 1, d + 1, m);
                    let rec4 = t(n - 1, d - 1, m) + q(d) * t(n - 1, d, m) + q(l + d - n) * t(n, d + 1, m);
                    out.push(CheckRecord::compare(
                        "trinomial_recurrence_1",
                        idx.clone(),
                        &here,
                        &rec1,
                    ));
                    out.push(CheckRecord::compare(
                        "trinomial_recurrence_2",
                        idx.clone(),
                        &here,
                        &rec2,
                    ));
                    out.push(CheckRecord::compare(
                        "trinomial_recurrence_3",
                        idx.clone(),
                        &here,
                        &rec3,
                    ));
                    out.push(CheckRecord::compare(
                        "trinomial_recurrence_4",
                        idx.clone(),
                        &here,
                        &rec4,
                    ));

                    let pair_a_lhs = q(l + 1 - d) * t(n + 1, d - 1, l) + here.clone();
                    let pair_a_rhs = t(n - 1, d - 1, l) + q(d) * t(n - 1, d, l);
                    out.push(CheckRecord::compare(
                        "trinomial_pair_1",
                        idx.clone(),
                        &pair_a_lhs,
                        &pair_a_rhs,
                    ));

                    let pair_b_lhs = q(l - n) * t(n + 1, d + 1, l) + here.clone();
                    let pair_b_rhs = q(d - n + 1) * t(n - 1, d + 1, l) + t(n - 1, d, l);
                    out.push(CheckRecord::compare(
                        "trinomial_pair_2",
                        idx.clone(),
                        &pair_b_lhs,
                        &pair_b_rhs,
                    ));

                    let mixed_lhs = t(n, d + 1, l) + q(l - d) * t(n + 1, d, l);
                    let mixed_rhs =
                        q(l) * t(n + 1, d + 1, l) + q(n) * here.clone() + (QPoly::one() - q(n)) * t(n - 1, d, l);
                    out.push(CheckRecord::compare("trinomial_five_term", idx, &mixed_lhs, &mixed_rhs));
                }
            }
        }
    }
    out
}

/// A length past which `T(n; d, L)` agrees with its limit below `order`.
///
/// The first finite-`L` correction of the `k`-th term of the defining sum
/// sits at `q^{k(k+d-n) + L-2k-d+1}`, whose minimum over `k` is at least
/// `L - (n+2+|d|)^2/4 - |d| + 1`. Never less than `2*order`.
pub fn limit_length(n: i64, d: i64, order: i64) -> i64 {
    let spread = n.abs() + 2 + d.abs();
    (2 * order).max(order + (spread * spread + 3) / 4 + d.abs() + 1)
}

/// Large-`L` limits, truncated at `order`:
/// `T(0; d) -> 1/(q)_inf`, `T(1; d) -> (1+q^d)/(q)_inf`, and
/// `lim T(n+1; d) = lim T(n; d-1) + q^d lim T(n; d)` for `n` in `shift_n`.
/// Each check runs at [`limit_length`] and is paired with a stability
/// check against the next length.
pub fn verify_trinomial_limits(
    order: i64,
    d_range: RangeInclusive<i64>,
    shift_n: RangeInclusive<i64>,
) -> Vec<CheckRecord> {
    let ord = QExponent::from_int(order);
    let inv = inv_pochhammer_truncated(ord);
    let mut out = Vec::new();
    let stable = |out: &mut Vec<CheckRecord>, n: i64, d: i64, l: i64| {
        let idx = json!({ "n": n, "d": d, "L": l, "order": order });
        let a = q_trinomial(n, d, l).truncate(ord);
        let b = q_trinomial(n, d, l + 1).truncate(ord);
        out.push(CheckRecord::compare_series("trinomial_limit_stable", idx, &a, &b));
    };
    for d in d_range {
        let l = limit_length(0, d, order);
        let idx = json!({ "d": d, "L": l, "order": order });
        let t0 = q_trinomial(0, d, l).truncate(ord);
        out.push(CheckRecord::compare_series("trinomial_limit_n0", idx, &t0, &inv));
        stable(&mut out, 0, d, l);

        let l = limit_length(1, d, order);
        let idx = json!({ "d": d, "L": l, "order": order });
        let t1 = q_trinomial(1, d, l).truncate(ord);
        let rhs1 = inv.mul_poly(&(QPoly::one() + q(d)));
        out.push(CheckRecord::compare_series("trinomial_limit_n1", idx, &t1, &rhs1));
        stable(&mut out, 1, d, l);

        for n in shift_n.clone() {
            let l = limit_length(n + 1, d.abs() + 1, order);
            let idx = json!({ "n": n, "d": d, "L": l, "order": order });
            let lhs = q_trinomial(n + 1, d, l).truncate(ord);
            let rhs = (q_trinomial(n, d - 1, l) + q(d) * q_trinomial(n, d, l)).truncate(ord);
            out.push(CheckRecord::compare_series("trinomial_limit_shift", idx, &lhs, &rhs));
            stable(&mut out, n + 1, d, l);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(i64, i64)]) -> QPoly {
        QPoly::from_int_terms(terms.iter().map(|&(e, c)| (e, BigInt::from(c))))
    }

    #[test]
    fn pochhammer_small() {
        assert_eq!(q_pochhammer(0), QPoly::one());
        assert_eq!(q_pochhammer(1), p(&[(0, 1), (1, -1)]));
    }

    #[test]
    fn binomial_small() {
        assert_eq!(q_binomial(0, 0), QPoly::one());
        assert_eq!(q_binomial(1, 1), p(&[(0, 1), (1, 1)]));
        assert!(q_binomial(-1, 2).is_zero());
        assert_eq!(q_binomial(2, 2), p(&[(0, 1), (1, 1), (2, 2), (3, 1), (4, 1)]));
    }

    #[test]
    fn modified_binomial_cases() {
        assert_eq!(q_binomial_modified(0, -1), QPoly::one());
        assert_eq!(q_binomial_modified(2, 1), q_binomial(2, 1));
        assert!(q_binomial_modified(1, -1).is_zero());
        assert!(q_binomial(0, -1).is_zero());
    }

    #[test]
    fn binomial_in_base_q_squared() {
        assert_eq!(q_binomial_base(1, 1, 2, false), p(&[(0, 1), (2, 1)]));
        assert_eq!(q_binomial_base(0, -1, 2, true), QPoly::one());
        assert!(q_binomial_base(-2, 0, 2, false).is_zero());
    }

    #[test]
    fn trinomial_small() {
        assert_eq!(q_trinomial(0, 0, 0), QPoly::one());
        assert_eq!(q_trinomial(0, 0, 2), p(&[(0, 1), (1, 1), (2, 1)]));
        assert!(q_trinomial(0, 3, 2).is_zero());
        assert_eq!(
            q_trinomial(1, -2, 4),
            q_trinomial(1, 2, 4).shift(QExponent::from_int(-2))
        );
        assert_eq!(q_trinomial(1, -2, 2), QPoly::q_int(-2));
    }

    #[test]
    fn partition_counts() {
        let s = inv_pochhammer_truncated(QExponent::from_int(3));
        assert_eq!(s.poly(), &p(&[(0, 1), (1, 1), (2, 2), (3, 3)]));
        assert_eq!(inv_pochhammer_truncated(QExponent::ZERO).poly(), &QPoly::one());
    }
}
