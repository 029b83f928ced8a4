use proptest::prelude::*;
use virpath::paths::{
    enumerate_abf, enumerate_half, even_valley_count_from_word, gf_abf, gf_abf_m, gf_abf_restricted,
    gf_abf_restricted_m, gf_half, half_from_restricted, heights_from_vertex_word, weight_from_word, AbfPath, Symbol,
    VertexWord,
};
use virpath::{HalfInt, QExponent, QPoly};

/// The four paths sharing the interior heights of `h`, indexed by `(e, f)`.
fn quadruple(h: &AbfPath) -> [[AbfPath; 2]; 2] {
    let body = &h.heights()[1..h.heights().len() - 1];
    let (a, b) = (h.a(), h.b());
    let make = |e: i64, f: i64| {
        let mut hs = vec![a + 1 - 2 * e];
        hs.extend_from_slice(body);
        hs.push(b + 1 - 2 * f);
        AbfPath::new(h.p(), hs).unwrap()
    };
    [[make(0, 0), make(0, 1)], [make(1, 0), make(1, 1)]]
}

fn half_q(l: usize) -> QExponent {
    QExponent::from_eighths(4 * l as i64)
}

#[test]
fn weight_and_straight_count_under_segment_changes() {
    for p in 1..=5 {
        for a in 1..=p {
            for b in 1..=p {
                // At L = 0 both segments meet at the single vertex and the
                // switching relations need not hold.
                for l in 1..=8usize {
                    for h in enumerate_abf(p, a, b, 0, 0, l).unwrap() {
                        let q4 = quadruple(&h);
                        let w = |e: usize, f: usize| q4[e][f].weight();
                        let m = |e: usize, f: usize| q4[e][f].straight_count() as i64;
                        for x in 0..2 {
                            assert_eq!(w(0, x), w(1, x));
                            for y in 0..2 {
                                assert_eq!((m(x, y) - (l + x + y) as i64).rem_euclid(2), 0);
                            }
                            if a == 1 {
                                assert_eq!(m(0, x), m(1, x) - 1);
                            }
                            if a == p {
                                assert_eq!(m(1, x), m(0, x) - 1);
                            }
                            if b == 1 {
                                assert_eq!(w(x, 1), w(x, 0) + half_q(l));
                                assert_eq!(m(x, 0), m(x, 1) - 1);
                            }
                            if b == p {
                                assert_eq!(w(x, 0), w(x, 1) + half_q(l));
                                assert_eq!(m(x, 1), m(x, 0) - 1);
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn generating_function_shift_identities() {
    type Gf = fn(i64, i64, i64, u8, u8, usize, usize) -> virpath::Result<QPoly>;
    for gf in [gf_abf_m as Gf, gf_abf_restricted_m as Gf] {
        for p in 2..=5 {
            for c in 1..=p {
                for x in 0..=1u8 {
                    for l in 1..=7usize {
                        for m in 0..=l + 1 {
                            let below = |v: QPoly| if m == 0 { QPoly::zero() } else { v };
                            let at = |a, b, e, f, mm| gf(p, a, b, e, f, l, mm).unwrap();
                            let shift = QPoly::q_pow(half_q(l));
                            assert_eq!(at(1, c, 1, x, m), below(at(1, c, 0, x, m.saturating_sub(1))));
                            assert_eq!(at(p, c, 0, x, m), below(at(p, c, 1, x, m.saturating_sub(1))));
                            assert_eq!(at(c, 1, x, 1, m), below(&shift * &at(c, 1, x, 0, m.saturating_sub(1))));
                            assert_eq!(at(c, p, x, 0, m), below(&shift * &at(c, p, x, 1, m.saturating_sub(1))));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn generating_functions_split_by_straight_count() {
    for p in 2..=4 {
        for a in 1..=p {
            for b in 1..=p {
                for (e, f) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    for l in 0..=7usize {
                        let sum: QPoly = (0..=l + 1).map(|m| gf_abf_m(p, a, b, e, f, l, m).unwrap()).sum();
                        assert_eq!(sum, gf_abf(p, a, b, e, f, l).unwrap());
                        let sum: QPoly = (0..=l + 1)
                            .map(|m| gf_abf_restricted_m(p, a, b, e, f, l, m).unwrap())
                            .sum();
                        assert_eq!(sum, gf_abf_restricted(p, a, b, e, f, l).unwrap());
                        for m in 0..=l + 1 {
                            if (m + l + (e + f) as usize) % 2 == 1 {
                                assert!(gf_abf_m(p, a, b, e, f, l, m).unwrap().is_zero());
                            }
                        }
                    }
                    for m in 0..=2 {
                        let want = a == b && m == (e as usize).abs_diff(f as usize);
                        assert_eq!(gf_abf_m(p, a, b, e, f, 0, m).unwrap().is_one(), want);
                    }
                    assert_eq!(gf_abf(p, a, b, 0, f, 5).unwrap(), gf_abf(p, a, b, 1, f, 5).unwrap());
                }
            }
        }
    }
}

#[test]
fn words_determine_paths_and_weights() {
    for p in 2..=5 {
        for a in 1..=p {
            for b in 1..=p {
                for (e, f) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    for l in 0..=8usize {
                        for h in enumerate_abf(p, a, b, e, f, l).unwrap() {
                            let word = h.vertex_word();
                            assert_eq!(word.0.len(), l + 1);
                            assert_eq!(weight_from_word(&word), h.weight());
                            assert_eq!(AbfPath::from_vertex_word(&word, p, a, e).unwrap(), h);
                            assert_eq!(word.straight_count(), h.straight_count());
                            assert_eq!(even_valley_count_from_word(&word, a, e), h.even_valley_scan());
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn half_lattice_valleys_are_at_integer_heights() {
    for t in ["1", "3/2", "2", "5/2", "3", "7/2"] {
        let t: HalfInt = t.parse().unwrap();
        let ends: Vec<HalfInt> = (2..=t.doubled()).map(HalfInt::from_doubled).collect();
        for &a in &ends {
            for &b in &ends {
                for (e, f) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    for ld in 0..=9 {
                        for h in enumerate_half(t, a, b, e, f, HalfInt::from_doubled(ld)).unwrap() {
                            for w in h.doubled_heights().windows(3) {
                                if w[0] > w[1] && w[2] > w[1] {
                                    assert_eq!(w[1] % 2, 0, "{}", h.dump_line());
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn half_lattice_equals_rescaled_restricted_paths() {
    for t in ["2", "5/2", "3", "7/2"] {
        let t: HalfInt = t.parse().unwrap();
        let p = t.doubled() - 1;
        for ad in 2..=t.doubled() {
            for bd in 2..=t.doubled() {
                for (e, f) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    for ld in 0..=10 {
                        let (a, b, l) = (
                            HalfInt::from_doubled(ad),
                            HalfInt::from_doubled(bd),
                            HalfInt::from_doubled(ld),
                        );
                        let lhs = gf_half(t, a, b, e, f, l).unwrap();
                        let rhs =
                            half_from_restricted(&gf_abf_restricted(p, ad - 1, bd - 1, e, f, ld as usize).unwrap());
                        assert_eq!(lhs, rhs.unwrap(), "t={t} a={a} b={b} L={l}");
                    }
                }
            }
        }
    }
}

fn word() -> impl Strategy<Value = VertexWord> {
    prop::collection::vec(prop::bool::ANY, 1..16).prop_map(|bits| {
        VertexWord(
            bits.into_iter()
                .map(|n| if n { Symbol::N } else { Symbol::S })
                .collect(),
        )
    })
}

proptest! {
    #[test]
    fn word_round_trip(w in word(), e in 0u8..2) {
        // A band wide enough that no reconstruction leaves it.
        let a = w.0.len() as i64 + 2;
        let p = 2 * a;
        let h = AbfPath::new(p, heights_from_vertex_word(&w, a, e)).unwrap();
        prop_assert_eq!(h.e(), e);
        prop_assert_eq!(&h.vertex_word(), &w);
        prop_assert_eq!(weight_from_word(&w), h.weight());
        let n_count = w.0.len() - w.straight_count();
        prop_assert_eq!((n_count as i64 - 1 - (h.e() + h.f()) as i64).rem_euclid(2), 0);
    }
}

#[test]
fn zero_length_switching_depends_on_the_other_segment() {
    let one = |e: i64, f: i64| AbfPath::new(3, vec![2 - 2 * e, 1, 2 - 2 * f]).unwrap().straight_count() as i64;
    // f = 0: switching e adds a straight vertex, as for L > 0.
    assert_eq!((one(0, 0), one(1, 0)), (0, 1));
    // f = 1: it removes one.
    assert_eq!((one(0, 1), one(1, 1)), (1, 0));
    for (e, f) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        assert_eq!((one(e, f) - e - f).rem_euclid(2), 0);
    }
}
