use virpath::bosonic::{rocha_caridi, CharacterParams};
use virpath::fermionic::{
    hl_character, hl_character_pair, hl_finitized, melzer_character, melzer_finitized, modified_binomial_dual_check,
    rabf_finitized, verify_m_systems, CaseId, FermionicCase,
};
use virpath::paths::{gf_abf, gf_abf_restricted, gf_half};
use virpath::{Error, HalfInt, QExponent, QPoly};

fn hi(s: &str) -> HalfInt {
    s.parse().unwrap()
}

#[test]
fn melzer_matches_enumeration() {
    for p in 3..=5 {
        for a in 1..=p {
            for b in 1..=p {
                for case in CaseId::ALL {
                    let Ok(row) = FermionicCase::abf(case, p, a, b) else {
                        continue;
                    };
                    let (e, f) = row.flags();
                    for l in 0..=9 {
                        let lhs = melzer_finitized(&row, l).unwrap();
                        assert_eq!(
                            lhs,
                            gf_abf(p, a, b, e, f, l).unwrap(),
                            "p={p} a={a} b={b} case {case} L={l}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn melzer_small_examples() {
    let row = FermionicCase::abf(CaseId::A, 3, 2, 2).unwrap();
    assert_eq!(melzer_finitized(&row, 2).unwrap(), gf_abf(3, 2, 2, 1, 1, 2).unwrap());
    assert_eq!(melzer_finitized(&row, 0).unwrap(), QPoly::one());
    assert!(melzer_finitized(&row, 1).unwrap().is_zero());
}

#[test]
fn restricted_matches_enumeration() {
    for p in 3..=6 {
        for a in 1..=p {
            for b in 1..=p {
                for case in CaseId::ALL {
                    let Ok(row) = FermionicCase::restricted(case, p, a, b) else {
                        continue;
                    };
                    let (e, f) = row.flags();
                    for l in 0..=8 {
                        let lhs = rabf_finitized(&row, l).unwrap();
                        let rhs = gf_abf_restricted(p, a, b, e, f, l).unwrap();
                        assert_eq!(lhs, rhs, "p={p} a={a} b={b} case {case} L={l}");
                    }
                }
            }
        }
    }
}

#[test]
fn restricted_examples() {
    let row = FermionicCase::restricted(CaseId::A, 3, 2, 2).unwrap();
    assert_eq!(
        rabf_finitized(&row, 4).unwrap(),
        gf_abf_restricted(3, 2, 2, 1, 1, 4).unwrap()
    );
    let row = FermionicCase::restricted(CaseId::B, 4, 3, 4).unwrap();
    assert_eq!(
        rabf_finitized(&row, 3).unwrap(),
        gf_abf_restricted(4, 3, 4, 0, 1, 3).unwrap()
    );
}

fn half_values(t: HalfInt) -> Vec<HalfInt> {
    (2..=t.doubled()).map(HalfInt::from_doubled).collect()
}

#[test]
fn half_lattice_matches_enumeration_and_rescaling() {
    for t in ["2", "5/2", "3"] {
        let t = hi(t);
        for a in half_values(t) {
            for b in half_values(t) {
                for case in CaseId::ALL {
                    let Ok(row) = FermionicCase::half(case, t, a, b) else {
                        continue;
                    };
                    let (e, f) = row.flags();
                    let prow =
                        FermionicCase::restricted(case, t.doubled() - 1, a.doubled() - 1, b.doubled() - 1).unwrap();
                    for ld in 0..=8 {
                        let l = HalfInt::from_doubled(ld);
                        let lhs = hl_finitized(&row, l).unwrap();
                        let rhs = gf_half(t, a, b, e, f, l).unwrap();
                        assert_eq!(lhs, rhs, "t={t} a={a} b={b} case {case} L={l}");
                        if (l + a + b).is_integer() {
                            let rescaled = rabf_finitized(&prow, ld as usize).unwrap();
                            let rescaled = rescaled.substitute_power(num_rational::Rational64::new(1, 2)).unwrap();
                            assert_eq!(lhs, rescaled);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn half_lattice_examples() {
    let t = hi("3");
    let row = FermionicCase::half(CaseId::A, t, hi("2"), hi("2")).unwrap();
    assert_eq!(
        hl_finitized(&row, hi("2")).unwrap(),
        gf_half(t, hi("2"), hi("2"), 1, 1, hi("2")).unwrap()
    );
    let t = hi("5/2");
    let row = FermionicCase::half(CaseId::D, t, hi("2"), hi("1")).unwrap();
    assert_eq!(
        hl_finitized(&row, hi("3/2")).unwrap(),
        gf_half(t, hi("2"), hi("1"), 1, 0, hi("3/2")).unwrap()
    );
    // L + a + b must be an integer
    assert!(hl_finitized(&row, hi("3/2")).unwrap().is_zero());
    assert!(!hl_finitized(&row, hi("3")).unwrap().is_zero());
}

#[test]
fn m_systems_are_consistent() {
    for t in ["2", "5/2", "3", "7/2"] {
        let t = hi(t);
        for a in half_values(t) {
            for b in half_values(t) {
                for case in CaseId::ALL {
                    let Ok(row) = FermionicCase::half(case, t, a, b) else {
                        continue;
                    };
                    for target in 0..=10 {
                        let records = verify_m_systems(&row, target);
                        assert!(
                            records.iter().all(|r| r.pass),
                            "t={t} a={a} b={b} case {case} 2L={target}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn abf_characters_match_rocha_caridi() {
    for p in 3..=5 {
        for r in 1..p {
            for s in 1..=p {
                let want = rocha_caridi(
                    &CharacterParams::new(HalfInt::from_int(p), p + 1, HalfInt::from_int(r), s).unwrap(),
                    20,
                );
                for case in CaseId::ALL {
                    let Ok(row) = FermionicCase::abf_character(case, p, r, s) else {
                        continue;
                    };
                    assert_eq!(
                        melzer_character(&row, 20).unwrap(),
                        want,
                        "p={p} r={r} s={s} case {case}"
                    );
                }
            }
        }
    }
}

#[test]
fn half_characters_match_rocha_caridi() {
    for t in ["2", "5/2", "3", "7/2"] {
        let t = hi(t);
        for r in 1..t.floor() + 1 {
            if HalfInt::from_int(r) >= t {
                continue;
            }
            for a in 1..=t.floor() {
                let want = rocha_caridi(&CharacterParams::half_lattice(t, r, a).unwrap(), 20);
                for case in CaseId::ALL {
                    let Ok(row) = FermionicCase::half_character(case, t, r, a) else {
                        continue;
                    };
                    assert_eq!(hl_character(&row, 20).unwrap(), want, "t={t} r={r} a={a} case {case}");
                }
            }
        }
    }
}

#[test]
fn character_pair_matches_two_characters() {
    for (t, a, b) in [("3", 2, 2), ("7/2", 2, 3)] {
        let t = hi(t);
        let pair = hl_character_pair(t, a, b, 15).unwrap();
        let chi = |r| rocha_caridi(&CharacterParams::half_lattice(t, r, a).unwrap(), 15);
        let want = &chi(b) + &chi(b - 1).shift(QExponent::from_int(a - b));
        let common = want.order().min(pair.order());
        assert_eq!(pair.truncate(common), want.truncate(common));
    }
    assert!(hl_character_pair(hi("3"), 2, 1, 10).is_err());
}

#[test]
fn excluded_rows_are_rejected() {
    assert!(matches!(
        FermionicCase::abf_character(CaseId::A, 3, 1, 2),
        Err(Error::ExcludedCase { .. })
    ));
    assert!(matches!(
        FermionicCase::half_character(CaseId::A, hi("5/2"), 1, 1),
        Err(Error::ExcludedCase { .. })
    ));
}

#[test]
fn modified_binomials_needed_exactly_where_listed() {
    let lengths: Vec<i64> = (0..=10).collect();
    for p in 3..=7 {
        for a in 1..=p {
            for b in 1..=p {
                for case in CaseId::ALL {
                    let Ok(row) = FermionicCase::restricted(case, p, a, b) else {
                        continue;
                    };
                    let records = modified_binomial_dual_check(&row, &lengths, 0).unwrap();
                    let bad: Vec<_> = records
                        .iter()
                        .filter(|r| !r.pass)
                        .map(|r| r.indices.to_string())
                        .collect();
                    assert!(bad.is_empty(), "{bad:#?}");
                }
            }
        }
    }
}
