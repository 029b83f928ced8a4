//! Verification sweeps over parameter ranges, with deterministic JSON
//! reports, and tabulation of truncated characters.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::bosonic::{
    abf_bosonic_finitized, half_bosonic_finitized, rocha_caridi, verify_bosonic_recurrences, y_limits_check,
    CharacterParams, RecurrenceRanges,
};
use crate::error::{Error, Result};
use crate::fermionic::{
    hl_character, hl_finitized, melzer_character, melzer_finitized, modified_binomial_dual_check, rabf_finitized,
    verify_m_systems, CaseId, FermionicCase,
};
use crate::halfint::HalfInt;
use crate::paths::{gf_abf, gf_abf_restricted, gf_half, half_from_restricted};
use crate::qpoly::QExponent;
use crate::qspecial::{verify_trinomial_identities, verify_trinomial_limits, TrinomialRanges};
use crate::report::CheckRecord;
use crate::transforms::{
    check_restricted_transform_gf, check_transform_gf, refined_bijection_check, verify_round_trips,
};
use crate::Series;

/// Largest truncation order a sweep accepts.
pub const MAX_ORDER: i64 = 200;
/// Largest length bound a sweep accepts.
pub const MAX_LENGTH: i64 = 40;

/// Minimal models covered by the character suite by default, as `(p, p')`.
pub const DEFAULT_MODELS: [(i64, i64); 5] = [(2, 5), (3, 5), (3, 4), (3, 7), (4, 7)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// q-trinomial identities and limits.
    Trinomial,
    /// Finitized ABF: enumeration = bosonic = fermionic.
    Abf,
    /// Finitized half-lattice: enumeration = bosonic = fermionic.
    Hl,
    /// Valley-restricted sums and the `q -> q^{1/2}` rescaling to half-lattice.
    Rabf,
    /// Transform round trips and transform generating-function identities.
    Bijection,
    /// Character sums against Rocha-Caridi characters.
    Characters,
    /// Half-lattice and Y-polynomial recurrences and boundary identities.
    Recurrences,
    /// Where modified binomials are needed.
    Modified,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Trinomial,
        Suite::Abf,
        Suite::Hl,
        Suite::Rabf,
        Suite::Bijection,
        Suite::Characters,
        Suite::Recurrences,
        Suite::Modified,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Trinomial => "trinomial",
            Suite::Abf => "abf",
            Suite::Hl => "hl",
            Suite::Rabf => "rabf",
            Suite::Bijection => "bijection",
            Suite::Characters => "characters",
            Suite::Recurrences => "recurrences",
            Suite::Modified => "modified",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::MalformedInput(format!("unknown suite {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// What to sweep and how.
///
/// `l_max` is the length bound: plain lengths for ABF-type suites, doubled
/// lengths for half-lattice ones. `a` and `b`, when given, restrict the
/// endpoints; otherwise every valid endpoint is used.
#[derive(Clone, Debug, Serialize)]
pub struct SweepConfig {
    pub suite: Suite,
    pub p: Vec<i64>,
    pub t: Vec<HalfInt>,
    pub a: Option<Vec<HalfInt>>,
    pub b: Option<Vec<HalfInt>>,
    pub e: Vec<u8>,
    pub f: Vec<u8>,
    pub l_max: i64,
    pub order: i64,
    pub models: Vec<(i64, i64)>,
    #[serde(skip)]
    pub jobs: usize,
}

impl SweepConfig {
    pub fn new(suite: Suite) -> Self {
        let p = match suite {
            Suite::Bijection => vec![2, 3],
            _ => vec![3, 4, 5],
        };
        let l_max = match suite {
            Suite::Trinomial => 12,
            Suite::Bijection | Suite::Recurrences => 8,
            _ => 10,
        };
        SweepConfig {
            suite,
            p,
            t: ["2", "5/2", "3", "7/2"]
                .iter()
                .map(|s| s.parse().expect("literal"))
                .collect(),
            a: None,
            b: None,
            e: vec![0, 1],
            f: vec![0, 1],
            l_max,
            order: 20,
            models: DEFAULT_MODELS.to_vec(),
            jobs: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        if self.l_max < 0 || self.l_max > MAX_LENGTH {
            return bad(format!("length bound {} outside 0..={MAX_LENGTH}", self.l_max));
        }
        if self.order < 0 || self.order > MAX_ORDER {
            return bad(format!("order {} outside 0..={MAX_ORDER}", self.order));
        }
        if self.e.iter().chain(&self.f).any(|&x| x > 1) {
            return bad("flags must be 0 or 1".into());
        }
        if self.p.iter().any(|&p| p < 1) {
            return bad("p must be positive".into());
        }
        if self.t.iter().any(|t| t.doubled() < 2) {
            return bad("t must be at least 1".into());
        }
        if self.models.iter().any(|&(p, pp)| p < 2 || pp < 2) {
            return bad("model parameters must be at least 2".into());
        }
        Ok(())
    }

    fn keep_a(&self, a: HalfInt) -> bool {
        self.a.as_ref().is_none_or(|v| v.contains(&a))
    }

    fn keep_b(&self, b: HalfInt) -> bool {
        self.b.as_ref().is_none_or(|v| v.contains(&b))
    }

    fn int_endpoints(&self, top: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for a in 1..=top {
            for b in 1..=top {
                if self.keep_a(HalfInt::from_int(a)) && self.keep_b(HalfInt::from_int(b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn flag_pairs(&self) -> Vec<(u8, u8)> {
        let mut out = Vec::new();
        for &e in &self.e {
            for &f in &self.f {
                out.push((e, f));
            }
        }
        out
    }
}

/// The outcome of a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub suite: Suite,
    pub config: SweepConfig,
    pub total: usize,
    pub failed: usize,
    pub pass: bool,
    pub records: Vec<CheckRecord>,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }
}

type Task = Box<dyn Fn() -> Vec<CheckRecord> + Send + Sync>;

/// Runs the configured suite. Work is spread over `config.jobs` threads
/// (0 means one per core); the record order does not depend on it.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let tasks = build_tasks(config);
    let run = || -> Vec<CheckRecord> { tasks.par_iter().flat_map_iter(|task| task()).collect() };
    let records = if config.jobs == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::InvalidParameters(format!("thread pool: {e}")))?
            .install(run)
    };
    let failed = records.iter().filter(|r| !r.pass).count();
    Ok(SweepReport {
        suite: config.suite,
        config: config.clone(),
        total: records.len(),
        failed,
        pass: failed == 0,
        records,
    })
}

fn build_tasks(config: &SweepConfig) -> Vec<Task> {
    match config.suite {
        Suite::Trinomial => trinomial_tasks(config),
        Suite::Abf => abf_tasks(config),
        Suite::Hl => hl_tasks(config),
        Suite::Rabf => rabf_tasks(config),
        Suite::Bijection => bijection_tasks(config),
        Suite::Characters => character_tasks(config),
        Suite::Recurrences => recurrence_tasks(config),
        Suite::Modified => modified_tasks(config),
    }
}

fn trinomial_tasks(config: &SweepConfig) -> Vec<Task> {
    let mut tasks: Vec<Task> = Vec::new();
    let l_max = config.l_max;
    for n in 0..=3 {
        for d in -6..=6 {
            tasks.push(Box::new(move || {
                verify_trinomial_identities(&TrinomialRanges {
                    n: n..=n,
                    d: d..=d,
                    l: 0..=l_max,
                })
            }));
        }
    }
    let order = config.order;
    for d in -6..=6 {
        tasks.push(Box::new(move || verify_trinomial_limits(order, d..=d, 0..=2)));
    }
    tasks
}

fn abf_tasks(config: &SweepConfig) -> Vec<Task> {
    let mut tasks: Vec<Task> = Vec::new();
    for &p in &config.p {
        for (a, b) in config.int_endpoints(p) {
            for (e, f) in config.flag_pairs() {
                let l_max = config.l_max;
                tasks.push(Box::new(move || abf_triple(p, a, b, e, f, l_max)));
            }
        }
    }
    tasks
}

fn abf_triple(p: i64, a: i64, b: i64, e: u8, f: u8, l_max: i64) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let row = CaseId::for_flags(e, f).and_then(|c| FermionicCase::abf(c, p, a, b).ok());
    for l in 0..=l_max as usize {
        if (l as i64 + a + b) % 2 != 0 {
            continue;
        }
        let idx = json!({ "p": p, "a": a, "b": b, "e": e, "f": f, "L": l });
        let paths = match gf_abf(p, a, b, e, f, l) {
            Ok(g) => g,
            Err(err) => {
                out.push(CheckRecord::error("abf_paths", idx, err));
                continue;
            }
        };
        out.push(match abf_bosonic_finitized(p, a, b, e, f, l) {
            Ok(bos) => CheckRecord::compare("abf_bosonic", idx.clone(), &paths, &bos),
            Err(err) => CheckRecord::error("abf_bosonic", idx.clone(), err),
        });
        if let Some(row) = &row {
            let mut idx = idx;
            idx["case"] = json!(row.case_id());
            out.push(match melzer_finitized(row, l) {
                Ok(fer) => CheckRecord::compare("abf_fermionic", idx, &paths, &fer),
                Err(err) => CheckRecord::error("abf_fermionic", idx, err),
            });
        }
    }
    out
}

fn half_endpoints(config: &SweepConfig, t: HalfInt) -> Vec<(HalfInt, HalfInt)> {
    let values: Vec<HalfInt> = (2..=t.doubled()).map(HalfInt::from_doubled).collect();
    let mut out = Vec::new();
    for &a in &values {
        for &b in &values {
            if config.keep_a(a) && config.keep_b(b) {
                out.push((a, b));
            }
        }
    }
    out
}

fn hl_tasks(config: &SweepConfig) -> Vec<Task> {
    let mut tasks: Vec<Task> = Vec::new();
    for &t in &config.t {
        for (a, b) in half_endpoints(config, t) {
            for (e, f) in config.flag_pairs() {
                let l_max = config.l_max;
                tasks.push(Box::new(move || hl_triple(t, a, b, e, f, l_max)));
            }
        }
    }
    tasks
}

fn hl_triple(t: HalfInt, a: HalfInt, b: HalfInt, e: u8, f: u8, l_max: i64) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let row = if t >= HalfInt::from_int(2) {
        CaseId::for_flags(e, f).and_then(|c| FermionicCase::half(c, t, a, b).ok())
    } else {
        None
    };
    for ld in 0..=l_max {
        let l = HalfInt::from_doubled(ld);
        if !(l + a + b).is_integer() {
            continue;
        }
        let idx = json!({ "t": t, "a": a, "b": b, "e": e, "f": f, "L": l });
        let paths = match gf_half(t, a, b, e, f, l) {
            Ok(g) => g,
            Err(err) => {
                out.push(CheckRecord::error("hl_paths", idx, err));
                continue;
            }
        };
        if a.is_integer() {
            out.push(match half_bosonic_finitized(t, a, b, e, f, l) {
                Ok(bos) => CheckRecord::compare("hl_bosonic", idx.clone(), &paths, &bos),
                Err(err) => CheckRecord::error("hl_bosonic", idx.clone(), err),
            });
        }
        if let Some(row) = &row {
            let mut idx = idx;
            idx["case"] = json!(row.case_id());
            out.push(match hl_finitized(row, l) {
                Ok(fer) => CheckRecord::compare("hl_fermionic", idx, &paths, &fer),
                Err(err) => CheckRecord::error("hl_fermionic", idx, err),
            });
        }
    }
    out
}

fn rabf_tasks(config: &SweepConfig) -> Vec<Task> {
    let mut tasks: Vec<Task> = Vec::new();
    for &p in &config.p {
        for (a, b) in config.int_endpoints(p) {
            for (e, f) in config.flag_pairs() {
                let l_max = config.l_max;
                tasks.push(Box::new(move || rabf_checks(p, a, b, e, f, l_max)));
            }
        }
    }
    tasks
}

fn rabf_checks(p: i64, a: i64, b: i64, e: u8, f: u8, l_max: i64) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let row = CaseId::for_flags(e, f).and_then(|c| FermionicCase::restricted(c, p, a, b).ok());
    // Band p = 2t - 1 with odd endpoints corresponds to half-lattice paths.
    let t = HalfInt::from_doubled(p + 1);
    let half_row = CaseId::for_flags(e, f).and_then(|c| {
        let (ha, hb) = (HalfInt::from_doubled(a + 1), HalfInt::from_doubled(b + 1));
        FermionicCase::half(c, t, ha, hb).ok()
    });
    for l in 0..=l_max as usize {
        if (l as i64 + a + b) % 2 != 0 {
            continue;
        }
        let idx = json!({ "p": p, "a": a, "b": b, "e": e, "f": f, "L": l });
        let paths = match gf_abf_restricted(p, a, b, e, f, l) {
            Ok(g) => g,
            Err(err) => {
                out.push(CheckRecord::error("rabf_paths", idx, err));
                continue;
            }
        };
        let fermionic = row.as_ref().map(|row| rabf_finitized(row, l));
        if let (Some(row), Some(fer)) = (&row, &fermionic) {
            let mut idx = idx.clone();
            idx["case"] = json!(row.case_id());
            out.push(match fer {
                Ok(fer) => CheckRecord::compare("rabf_fermionic", idx, &paths, fer),
                Err(err) => CheckRecord::error("rabf_fermionic", idx, err),
            });
        }
        if p >= 3 {
            let ha = HalfInt::from_doubled(a + 1);
            let hb = HalfInt::from_doubled(b + 1);
            let hl = HalfInt::from_doubled(l as i64);
            let half_idx = json!({ "p": p, "a": a, "b": b, "e": e, "f": f, "L": l, "t": t, "half_a": ha, "half_b": hb, "half_L": hl });
            match (gf_half(t, ha, hb, e, f, hl), half_from_restricted(&paths)) {
                (Ok(half), Ok(rescaled)) => {
                    out.push(CheckRecord::compare(
                        "rescaling_paths",
                        half_idx.clone(),
                        &half,
                        &rescaled,
                    ));
                    if let (Some(Ok(fer)), Some(hrow)) = (&fermionic, &half_row) {
                        let lhs = hl_finitized(hrow, hl)
                            .and_then(|h| Ok((h, fer.substitute_power(num_rational::Rational64::new(1, 2))?)));
                        out.push(match lhs {
                            Ok((h, r)) => CheckRecord::compare("rescaling_fermionic", half_idx, &h, &r),
                            Err(err) => CheckRecord::error("rescaling_fermionic", half_idx, err),
                        });
                    }
                }
                (Err(err), _) | (_, Err(err)) => out.push(CheckRecord::error("rescaling_paths", half_idx, err)),
            }
        }
    }
    out
}

fn bijection_tasks(config: &SweepConfig) -> Vec<Task> {
    let mut tasks: Vec<Task> = Vec::new();
    let l_max = config.l_max.max(0) as usize;
    let round_trip_l = l_max.min(5);
    for &p in &config.p {
        tasks.push(Box::new(move || verify_round_trips(p, round_trip_l, 3)));
        for (a, b) in config.int_endpoints(p) {
            for (e, f) in config.flag_pairs() {
                tasks.push(Box::new(move || {
                    let mut out = Vec::new();
                    for l in 0..=l_max {
                        for lp in 0..=l_max {
                            out.push(check_transform_gf(p, a, b, e, f, l, lp));
                            out.push(check_restricted_transform_gf(p, a, b, e, f, l, lp, true));
                        }
                    }
                    for l in 0..=l_max {
                        for lp in 0..=l_max {
                            out.extend(refined_bijection_check(p, a, b, e, f, l, lp));
                        }
                    }
                    out
                }));
            }
        }
    }
    tasks
}

/// The half-lattice parameter `t` under which `(p, p')` appears, if any.
fn model_t(p: i64, pp: i64) -> Option<HalfInt> {
    if pp == 2 * p + 1 {
        Some(HalfInt::from_int(p))
    } else if pp == 2 * p - 1 {
        Some(HalfInt::from_doubled(2 * p - 1))
    } else {
        None
    }
}

fn character_tasks(config: &SweepConfig) -> Vec<Task> {
    let mut tasks: Vec<Task> = Vec::new();
    let order = config.order;
    for &(p, pp) in &config.models {
        if pp == p + 1 && p >= 3 {
            for r in 1..p {
                for s in 1..=p {
                    tasks.push(Box::new(move || abf_character_checks(p, r, s, order)));
                }
            }
        }
        if let Some(t) = model_t(p, pp) {
            if t < HalfInt::from_int(2) {
                continue;
            }
            for r in 1..=t.floor() {
                if HalfInt::from_int(r) >= t {
                    continue;
                }
                for a in 1..=t.floor() {
                    tasks.push(Box::new(move || half_character_checks(t, r, a, order)));
                }
            }
        }
    }
    tasks
}

fn abf_character_checks(p: i64, r: i64, s: i64, order: i64) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let params = match CharacterParams::new(HalfInt::from_int(p), p + 1, HalfInt::from_int(r), s) {
        Ok(c) => c,
        Err(err) => {
            return vec![CheckRecord::error(
                "abf_character",
                json!({ "p": p, "r": r, "s": s }),
                err,
            )]
        }
    };
    let want = rocha_caridi(&params, order);
    for case in CaseId::ALL {
        let Ok(row) = FermionicCase::abf_character(case, p, r, s) else {
            continue;
        };
        let idx = json!({ "p": p, "p_prime": p + 1, "r": r, "s": s, "case": case, "order": order });
        out.push(match melzer_character(&row, order) {
            Ok(got) => CheckRecord::compare_series("abf_character", idx, &got, &want),
            Err(err) => CheckRecord::error("abf_character", idx, err),
        });
    }
    out
}

fn half_character_checks(t: HalfInt, r: i64, a: i64, order: i64) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let base = json!({ "t": t, "r": r, "a": a, "order": order });
    let want = match CharacterParams::half_lattice(t, r, a) {
        Ok(params) => rocha_caridi(&params, order),
        Err(err) => return vec![CheckRecord::error("hl_character", base, err)],
    };
    if !t.is_integer() {
        // chi^{t,2t+1}_{r,2a} = chi^{t+1/2,2t}_{a,2r}, a genuine minimal model.
        let genuine = CharacterParams::new(t + HalfInt::from_doubled(1), t.doubled(), HalfInt::from_int(a), 2 * r)
            .map(|params| rocha_caridi(&params, order));
        out.push(match genuine {
            Ok(g) => CheckRecord::compare_series("character_symmetry", base.clone(), &want, &g),
            Err(err) => CheckRecord::error("character_symmetry", base.clone(), err),
        });
    }
    for case in CaseId::ALL {
        let Ok(row) = FermionicCase::half_character(case, t, r, a) else {
            continue;
        };
        let mut idx = base.clone();
        idx["case"] = json!(case);
        out.push(match hl_character(&row, order) {
            Ok(got) => CheckRecord::compare_series("hl_character", idx, &got, &want),
            Err(err) => CheckRecord::error("hl_character", idx, err),
        });
    }
    // Large-L limits of Y at endpoint b = r.
    match y_limits_check(t, a, r, order) {
        Ok(recs) => out.extend(recs),
        Err(err) => out.push(CheckRecord::error("y_limit", base, err)),
    }
    out
}

fn recurrence_tasks(config: &SweepConfig) -> Vec<Task> {
    let mut tasks: Vec<Task> = Vec::new();
    for &t in &config.t {
        let ranges = RecurrenceRanges {
            l_max: config.l_max,
            ..Default::default()
        };
        tasks.push(Box::new(move || verify_bosonic_recurrences(t, &ranges)));
    }
    tasks
}

fn modified_tasks(config: &SweepConfig) -> Vec<Task> {
    let mut tasks: Vec<Task> = Vec::new();
    let lengths: Vec<i64> = (0..=config.l_max).collect();
    let order = config.order;
    for &p in &config.p {
        for (a, b) in config.int_endpoints(p) {
            for case in CaseId::ALL {
                let Ok(row) = FermionicCase::restricted(case, p, a, b) else {
                    continue;
                };
                let lengths = lengths.clone();
                tasks.push(Box::new(move || dual(&row, &lengths, order)));
            }
        }
    }
    for &t in &config.t {
        if t < HalfInt::from_int(2) {
            continue;
        }
        for (a, b) in half_endpoints(config, t) {
            for case in CaseId::ALL {
                let Ok(row) = FermionicCase::half(case, t, a, b) else {
                    continue;
                };
                let lengths = lengths.clone();
                tasks.push(Box::new(move || {
                    let mut out = dual(&row, &lengths, order);
                    for &l in &lengths {
                        out.extend(verify_m_systems(&row, l));
                    }
                    out
                }));
            }
        }
        for r in 1..=t.floor() {
            if HalfInt::from_int(r) >= t {
                continue;
            }
            for a in 1..=t.floor() {
                for case in CaseId::ALL {
                    let Ok(row) = FermionicCase::half_character(case, t, r, a) else {
                        continue;
                    };
                    tasks.push(Box::new(move || dual(&row, &[], order)));
                }
            }
        }
    }
    tasks
}

fn dual(row: &FermionicCase, lengths: &[i64], order: i64) -> Vec<CheckRecord> {
    match modified_binomial_dual_check(row, lengths, order) {
        Ok(recs) => recs,
        Err(err) => vec![CheckRecord::error(
            "modified_binomial_required",
            json!({ "case": row.case_id(), "params": row.params() }),
            err,
        )],
    }
}

/// A character to tabulate.
#[derive(Clone, Debug)]
pub enum CharacterModel {
    /// `chi^{p,p'}_{r,s}`; when `p' = p + 1` the fermionic rows are added.
    Virasoro(CharacterParams),
    /// `chi^{t,2t+1}_{r,2a}` with all applicable fermionic rows.
    HalfLattice { t: HalfInt, r: i64, a: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::MalformedInput(format!("unknown format {other:?}"))),
        }
    }
}

/// Named truncated series sharing one order.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub order: i64,
    pub columns: Vec<(String, Series)>,
}

impl CharacterTable {
    /// Exponents with a row: the integers `0..=order` plus any other
    /// exponent carrying a coefficient.
    fn exponents(&self) -> Vec<QExponent> {
        let mut es: Vec<QExponent> = (0..=self.order).map(QExponent::from_int).collect();
        for (_, s) in &self.columns {
            es.extend(s.poly().terms().map(|(e, _)| e));
        }
        es.sort();
        es.dedup();
        es
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("exponent");
        for (name, _) in &self.columns {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for e in self.exponents() {
            out.push_str(&e.to_string());
            for (_, s) in &self.columns {
                out.push(',');
                out.push_str(&s.poly().coeff(e).to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .exponents()
            .into_iter()
            .map(|e| {
                let cs: Vec<String> = self
                    .columns
                    .iter()
                    .map(|(_, s)| s.poly().coeff(e).to_string())
                    .collect();
                json!({ "exponent": e.to_string(), "coefficients": cs })
            })
            .collect();
        let names: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        serde_json::to_string_pretty(&json!({ "order": self.order, "columns": names, "rows": rows }))
            .expect("table serializes")
    }
}

/// The bosonic character and every applicable fermionic row, to `order`.
pub fn character_table(model: &CharacterModel, order: i64) -> Result<CharacterTable> {
    if !(0..=MAX_ORDER).contains(&order) {
        return Err(Error::InvalidParameters(format!(
            "order {order} outside 0..={MAX_ORDER}"
        )));
    }
    let mut columns = Vec::new();
    match model {
        CharacterModel::Virasoro(params) => {
            columns.push(("rocha_caridi".to_string(), rocha_caridi(params, order)));
            let (p, r, s, pp) = (params.p.to_int(), params.r.to_int(), params.s, params.p_prime);
            if let (Some(p), Some(r)) = (p, r) {
                if pp == p + 1 {
                    for case in CaseId::ALL {
                        if let Ok(row) = FermionicCase::abf_character(case, p, r, s) {
                            columns.push((format!("case_{case}"), melzer_character(&row, order)?));
                        }
                    }
                }
                // chi^{t,2t+1}_{r,2a}, directly or through its half-integer-t dual.
                if let (Some(t), 0) = (model_t(p, pp), s % 2) {
                    let (hr, ha) = if t.is_integer() { (r, s / 2) } else { (s / 2, r) };
                    half_columns(&mut columns, t, hr, ha, order)?;
                }
            }
        }
        CharacterModel::HalfLattice { t, r, a } => {
            let params = CharacterParams::half_lattice(*t, *r, *a)?;
            columns.push(("rocha_caridi".to_string(), rocha_caridi(&params, order)));
            half_columns(&mut columns, *t, *r, *a, order)?;
        }
    }
    Ok(CharacterTable { order, columns })
}

fn half_columns(columns: &mut Vec<(String, Series)>, t: HalfInt, r: i64, a: i64, order: i64) -> Result<()> {
    for case in CaseId::ALL {
        if let Ok(row) = FermionicCase::half_character(case, t, r, a) {
            columns.push((format!("case_{case}"), hl_character(&row, order)?));
        }
    }
    Ok(())
}

/// Renders [`character_table`] in the requested format.
pub fn emit_character(model: &CharacterModel, order: i64, format: OutputFormat) -> Result<String> {
    let table = character_table(model, order)?;
    Ok(match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_json(),
    })
}
