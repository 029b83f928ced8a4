use num_bigint::BigInt;
use proptest::prelude::*;
use virpath::qspecial::{
    inv_pochhammer_truncated, limit_length, q_binomial, q_binomial_modified, q_pochhammer, q_trinomial,
    q_trinomial_alt, verify_trinomial_identities, verify_trinomial_limits, TrinomialRanges,
};
use virpath::{QExponent, QPoly};

fn binomial(n: i64, k: i64) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

/// Walks of `l` steps in {-1, 0, +1} summing to `d`, by dynamic programming.
fn walks(l: i64, d: i64) -> BigInt {
    let width = (2 * l + 1) as usize;
    let mut counts = vec![BigInt::from(0); width];
    counts[l as usize] = BigInt::from(1);
    for _ in 0..l {
        let mut next = vec![BigInt::from(0); width];
        for (i, c) in counts.iter().enumerate() {
            for step in [-1i64, 0, 1] {
                let j = i as i64 + step;
                if (0..width as i64).contains(&j) {
                    next[j as usize] += c;
                }
            }
        }
        counts = next;
    }
    if d.abs() > l {
        BigInt::from(0)
    } else {
        counts[(l + d) as usize].clone()
    }
}

#[test]
fn binomials_count_subsets_at_q_one() {
    for n in 0..=10 {
        for m in 0..=10 {
            assert_eq!(q_binomial(n, m).eval_at_one(), binomial(n + m, n), "n={n} m={m}");
        }
    }
}

#[test]
fn trinomials_count_walks_at_q_one() {
    for n in 0..=3 {
        for l in 0..=12 {
            for d in -14..=14 {
                assert_eq!(q_trinomial(n, d, l).eval_at_one(), walks(l, d), "n={n} d={d} L={l}");
                if d.abs() > l {
                    assert!(q_trinomial(n, d, l).is_zero());
                }
            }
        }
    }
}

#[test]
fn trinomial_identities_hold_on_the_standard_ranges() {
    let records = verify_trinomial_identities(&TrinomialRanges::default());
    let bad: Vec<_> = records
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} {}", r.identity, r.indices))
        .collect();
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn durfee_limit_at_length_forty() {
    let order = QExponent::from_int(20);
    assert_eq!(q_trinomial(0, 0, 40).truncate(order), inv_pochhammer_truncated(order));
}

#[test]
fn limits_hold_with_the_length_bound() {
    let records = verify_trinomial_limits(12, -6..=6, 0..=2);
    assert!(records.iter().all(|r| r.pass));
    assert_eq!(limit_length(0, 0, 20), 40);
    assert!(limit_length(3, -7, 20) > 40);
}

#[test]
fn modified_binomial_differs_only_at_zero_top() {
    for n in 0..=6 {
        for m in -2..=6 {
            let plain = q_binomial(n, m);
            let modified = q_binomial_modified(n, m);
            if m == -1 && n == 0 {
                assert!(plain.is_zero() && modified.is_one());
            } else {
                assert_eq!(plain, modified, "n={n} m={m}");
            }
        }
    }
}

proptest! {
    #[test]
    fn binomial_symmetry_and_pascal(n in 0i64..9, m in 0i64..9) {
        prop_assert_eq!(q_binomial(n, m), q_binomial(m, n));
        if n > 0 && m > 0 {
            // [n+m, n] = [n+m-1, n-1] + q^n [n+m-1, n]
            let rhs = &q_binomial(n - 1, m) + &q_binomial(n, m - 1).shift(QExponent::from_int(n));
            prop_assert_eq!(q_binomial(n, m), rhs);
        }
    }

    #[test]
    fn binomial_is_pochhammer_ratio(n in 0usize..9, m in 0usize..9) {
        let denom = &q_pochhammer(n) * &q_pochhammer(m);
        prop_assert_eq!(q_pochhammer(n + m).div_exact(&denom).unwrap(), q_binomial(n as i64, m as i64));
    }

    #[test]
    fn trinomial_forms_agree(n in -2i64..5, d in -8i64..8, l in 0i64..11) {
        prop_assert_eq!(q_trinomial(n, d, l), q_trinomial_alt(n, d, l));
    }

    #[test]
    fn trinomial_symmetry(n in -2i64..5, d in -8i64..8, l in 0i64..11) {
        prop_assert_eq!(q_trinomial(n, -d, l), q_trinomial(n, d, l).shift(QExponent::from_int(-n * d)));
    }

    #[test]
    fn trinomial_of_zero_length(n in -3i64..4, d in -3i64..4) {
        let want = if d == 0 { QPoly::one() } else { QPoly::zero() };
        prop_assert_eq!(q_trinomial(n, d, 0), want);
    }
}
