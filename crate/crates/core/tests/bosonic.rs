use virpath::bosonic::{
    abf_bosonic_finitized, half_bosonic_finitized, rocha_caridi, rocha_caridi_window_stable,
    verify_bosonic_recurrences, y_limits_check, y_polynomial, CharacterParams, RecurrenceRanges,
};
use virpath::paths::{enumerate_abf, gf_half};
use virpath::{HalfInt, QExponent, QPoly};

fn hi(s: &str) -> HalfInt {
    s.parse().unwrap()
}

fn failures(records: &[virpath::CheckRecord]) -> Vec<String> {
    records
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} {}", r.identity, r.indices))
        .collect()
}

#[test]
fn recurrences_and_boundaries_hold() {
    for t in ["2", "5/2", "3", "7/2"] {
        let ranges = RecurrenceRanges {
            l_max: 6,
            ..Default::default()
        };
        let records = verify_bosonic_recurrences(hi(t), &ranges);
        assert!(!records.is_empty());
        let bad = failures(&records);
        assert!(bad.is_empty(), "t={t}: {bad:?}");
    }
}

#[test]
fn recurrence_example_values() {
    // f=0 recurrence at t=3, a=b=2, L=4, directly.
    let t = hi("3");
    let h = |b: i64, f: u8, l: i64| {
        gf_half(
            t,
            HalfInt::from_int(2),
            HalfInt::from_int(b),
            0,
            f,
            HalfInt::from_int(l),
        )
        .unwrap()
    };
    let q8 = |e: i64| QPoly::q_pow(QExponent::from_eighths(e));
    let rhs = q8(30) * h(1, 0, 3) + h(2, 0, 3) + q8(14) * h(3, 1, 3);
    assert_eq!(h(2, 0, 4), rhs);

    // Second Y-recurrence at n=1, t=5/2, a=2, b=1, L=3.
    let t = hi("5/2");
    let y = |n, b, l| y_polynomial(n, t, 2, b, l);
    let rhs = QPoly::q_int(1) * y(0, 0, 2) + y(0, 1, 2) + QPoly::q_int(3 - 2 + 1) * y(1, 2, 2);
    assert_eq!(y(1, 1, 3), rhs);
}

#[test]
fn y_limits_match_characters() {
    for (t, a, b) in [("5/2", 1, 1), ("3", 2, 2), ("7/2", 2, 3), ("3", 1, 2)] {
        let records = y_limits_check(hi(t), a, b, 15).unwrap();
        let bad = failures(&records);
        assert!(bad.is_empty(), "t={t} a={a} b={b}: {bad:?}");
    }
}

#[test]
fn half_integer_character_symmetry() {
    // chi^{t,2t+1}_{r,2a} = chi^{t+1/2,2t}_{a,2r}
    for (t, r, a) in [("5/2", 1, 1), ("5/2", 2, 1), ("3", 1, 2), ("7/2", 2, 3)] {
        let t = hi(t);
        let lhs = rocha_caridi(&CharacterParams::half_lattice(t, r, a).unwrap(), 20);
        let swapped =
            CharacterParams::new(t + HalfInt::from_doubled(1), t.doubled(), HalfInt::from_int(a), 2 * r).unwrap();
        assert_eq!(lhs, rocha_caridi(&swapped, 20), "t={t} r={r} a={a}");
    }
}

#[test]
fn rocha_caridi_window_is_stable_and_starts_at_one() {
    for (p, pp) in [(2, 5), (3, 4), (3, 5), (3, 7), (4, 7)] {
        for r in 1..p {
            for s in 1..pp {
                let params = CharacterParams::new(HalfInt::from_int(p), pp, HalfInt::from_int(r), s).unwrap();
                assert!(rocha_caridi_window_stable(&params, 20));
                let zero = rocha_caridi(&params, 0);
                assert_eq!(zero.poly(), &QPoly::one(), "({p},{pp}) r={r} s={s}");
            }
        }
    }
}

#[test]
fn abf_bosonic_counts_paths_at_q_one() {
    for p in 3..=4 {
        for a in 1..=p {
            for b in 1..=p {
                for l in 0..=8usize {
                    let gf = abf_bosonic_finitized(p, a, b, 1, 1, l).unwrap();
                    let count = enumerate_abf(p, a, b, 1, 1, l).unwrap().len();
                    assert_eq!(gf.eval_at_one(), count.into());
                }
            }
        }
    }
}

#[test]
fn abf_bosonic_initial_value() {
    for p in 3..=5 {
        for a in 1..=p {
            for b in 1..=p {
                let gf = abf_bosonic_finitized(p, a, b, 0, 1, 0).unwrap();
                let want = if a == b { QPoly::one() } else { QPoly::zero() };
                assert_eq!(gf, want);
            }
        }
    }
}

#[test]
fn half_bosonic_rejects_half_integer_start() {
    let r = half_bosonic_finitized(hi("5/2"), hi("3/2"), hi("2"), 0, 0, hi("1/2"));
    assert!(r.is_err());
}
