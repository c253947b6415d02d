//! The verification checks. Each returns a [`Report`] with one entry per
//! order, or per labelled sub-check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{Engine, Report, Settings};
use crate::algebra::pit::{self, error_bound_log2};
use crate::algebra::{
    bracket_class, bracket_monomial, rat_equal, BracketSum, CompareMode, FactoredRat, Fp,
    LaurentPoly, Monomial, RatFunc, VarGroup, VarSet, Vars, GRID,
};
use crate::error::{Error, Result};
use crate::partitions::{enumerate, enumerate_tuples, permutations4, PartitionTuple};
use crate::series::{bracket_pair_series, f_t, ClosedForm, Series};
use crate::vertex::{
    expected_framing_limit, fixed_pair_dimension, framing_limit, np_weight,
    weight_permuted_equal,
};

const BIN: &str = "magvertex";

/// Solid partition counts for sizes 0..=6.
pub const SOLID_COUNTS: [usize; 7] = [1, 1, 4, 10, 26, 59, 140];

fn base_report(check: &str, s: &Settings) -> Report {
    Report::new(check)
        .param("mode", s.mode.name())
        .param("seed", s.seed)
        .param("trials", s.trials)
}

fn record(
    rep: &mut Report,
    n: usize,
    label: &str,
    outcome: Result<bool>,
    witness: impl FnOnce() -> Value,
    ms: u64,
) {
    let label = Some(label.to_string());
    match outcome {
        Ok(true) => rep.push(n, label, true, None, ms),
        Ok(false) => rep.push(n, label, false, Some(witness()), ms),
        Err(e) => rep.push(n, label, false, Some(json!({ "error": e.to_string() })), ms),
    }
}

fn point_json(vars: &Vars, pt: &[Fp]) -> Value {
    let mut m = serde_json::Map::new();
    for (name, v) in vars.names().iter().zip(pt) {
        m.insert(name.clone(), json!(v.value()));
    }
    Value::Object(m)
}

fn point_arg(pt: &[Fp]) -> String {
    pt.iter()
        .map(|v| v.value().to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// A point where `a` and `b` take different values. Point entries are the
/// fourth roots of the variables.
fn mismatch_witness(a: &BracketSum, b: &BracketSum, seed: u64, reproduce: &[String]) -> Value {
    let vars = a.vars().clone();
    let mut rng = pit::rng(seed, 7);
    for _ in 0..16 {
        let got = pit::sample_until_defined(&mut rng, vars.len(), &mut |pt: &[Fp]| {
            Ok((pt.to_vec(), a.eval(pt)?, b.eval(pt)?))
        });
        if let Ok((pt, x, y)) = got {
            if x != y {
                let at = point_arg(&pt);
                return json!({
                    "reproduce": reproduce.iter().map(|c| format!("{c} --at {at}")).collect::<Vec<_>>(),
                    "point": point_json(&vars, &pt),
                    "lhs": x.value(),
                    "rhs": y.value(),
                });
            }
        }
    }
    json!({ "reproduce": reproduce, "note": "no separating point found in 16 draws" })
}

fn series_cmd(kind: &str, r: usize, order: usize, specialize: Option<&str>) -> String {
    let mut c = format!("{BIN} series --kind {kind} --r {r} --order {order}");
    if let Some(s) = specialize {
        c.push_str(&format!(" --specialize {s}"));
    }
    c
}

fn weight_cmd(t: &PartitionTuple, specialize: Option<&str>) -> String {
    let mut c = format!("{BIN} weight --tuple '{}'", t.to_json_string());
    if let Some(s) = specialize {
        c.push_str(&format!(" --specialize {s}"));
    }
    c
}

/// Images sending every `y_i` to `t4` and fixing the rest.
pub fn y_to_t4_images(vars: &Vars) -> Result<Vec<Monomial>> {
    let t4 = vars.parse_monomial("t4")?;
    let mut images = vars.embedding(vars)?;
    for (i, img) in images.iter_mut().enumerate() {
        if vars.group(i) == VarGroup::Y {
            *img = t4.clone();
        }
    }
    Ok(images)
}

fn y_to_t4_arg(r: usize) -> String {
    (1..=r)
        .map(|i| format!("y{i}=t4"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Coefficientwise comparison run in parallel over the orders.
fn compare_series(
    engine: &Engine,
    rep: &mut Report,
    label: &str,
    lhs: &Series<BracketSum>,
    rhs: &Series<BracketSum>,
    from: usize,
    s: &Settings,
    reproduce: &[String],
) {
    let orders: Vec<usize> = (from..=lhs.order()).collect();
    let results: Vec<(usize, Result<bool>, Option<f64>, u64)> = engine.install(|| {
        orders
            .par_iter()
            .map(|&n| {
                let clock = engine.clock();
                let mode = s.compare_mode(n);
                let out = lhs.coeff(n).equals(rhs.coeff(n), mode);
                let bound = match mode {
                    CompareMode::Random { trials, .. } => {
                        let d = lhs.coeff(n).sub(rhs.coeff(n)).degree_bound();
                        Some(error_bound_log2(d, trials))
                    }
                    CompareMode::Exact => None,
                };
                (n, out, bound, clock.ms())
            })
            .collect()
    });
    let mut worst: Option<f64> = None;
    for (n, out, bound, ms) in results {
        if let Some(b) = bound {
            worst = Some(worst.map_or(b, |w: f64| w.max(b)));
        }
        let with_order: Vec<String> = reproduce
            .iter()
            .map(|c| c.replace("{n}", &n.to_string()))
            .collect();
        record(
            rep,
            n,
            label,
            out,
            || {
                let mut w =
                    mismatch_witness(lhs.coeff(n), rhs.coeff(n), s.seed ^ n as u64, &with_order);
                w["order"] = json!(n);
                w
            },
            ms,
        );
    }
    if let Some(w) = worst {
        let key = format!("{label}_error_log2");
        rep.params.insert(key, json!((w * 100.0).round() / 100.0));
    }
}

/// `Z_r` against the closed form at `y = y1 ... yr`. For `r > 1` the
/// w-independence entries come first.
pub fn verify_main(engine: &Engine, r: usize, order: usize, s: &Settings) -> Result<Report> {
    let mut rep = base_report("main", s).param("r", r).param("order", order);
    if r > 1 {
        rep.absorb("w-independence", verify_w_independence(engine, r, order, s)?);
    }
    let vars = VarSet::standard(r, &[]);
    let z = engine.localization_series(r, order)?;
    let cf = ClosedForm::magnificent(&vars)?.series(&vars, order)?;
    let cmds = [
        series_cmd("localization", r, order, None),
        series_cmd("magnificent", r, order, None),
    ];
    compare_series(engine, &mut rep, "series", &z, &cf, 0, s, &cmds);
    Ok(rep)
}

/// Draws point pairs that differ only at `idx`. Returns the first pair
/// where `c` takes different values.
fn find_dependence(
    c: &BracketSum,
    idx: &[usize],
    trials: u32,
    seed: u64,
) -> Result<Option<(Vec<Fp>, Vec<Fp>, Fp, Fp)>> {
    let n = c.vars().len();
    let mut rng = pit::rng(seed, 3);
    for _ in 0..trials {
        let (p, q, a, b) = pit::sample_until_defined(&mut rng, n + idx.len(), &mut |pt: &[Fp]| {
            let p = pt[..n].to_vec();
            let mut q = p.clone();
            for (k, &i) in idx.iter().enumerate() {
                q[i] = pt[n + k];
            }
            Ok((p.clone(), q.clone(), c.eval(&p)?, c.eval(&q)?))
        })?;
        if a != b {
            return Ok(Some((p, q, a, b)));
        }
    }
    Ok(None)
}

fn dependence_witness(vars: &Vars, found: &(Vec<Fp>, Vec<Fp>, Fp, Fp), reproduce: &str) -> Value {
    let (p, q, a, b) = found;
    json!({
        "reproduce": [
            format!("{reproduce} --at {}", point_arg(p)),
            format!("{reproduce} --at {}", point_arg(q)),
        ],
        "point": point_json(vars, p),
        "shifted": point_json(vars, q),
        "lhs": a.value(),
        "rhs": b.value(),
    })
}

fn group_indices(vars: &Vars, g: VarGroup) -> Vec<usize> {
    (0..vars.len()).filter(|&i| vars.group(i) == g).collect()
}

/// `c` is unchanged by `w_i -> w_i u` for every `i`, compared exactly.
fn w_scaling_invariant(c: &BracketSum, r: usize) -> Result<bool> {
    let vars = c.vars().clone();
    let ext = VarSet::standard(r, &["u"]);
    let base = c.substitute(&ext, &vars.embedding(&ext)?)?;
    for i in 1..=r {
        let mut images = vars.embedding(&ext)?;
        let w = vars.index(&format!("w{i}"))?;
        images[w] = ext.parse_monomial(&format!("w{i}*u"))?;
        if !c.substitute(&ext, &images)?.equals(&base, CompareMode::Exact)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Independence of the framing parameters, order by order. Randomized at
/// every order; exact for `n <= 2` (and everywhere in exact mode). A last
/// entry confirms that a single unsummed weight is detected as dependent.
pub fn verify_w_independence(
    engine: &Engine,
    r: usize,
    order: usize,
    s: &Settings,
) -> Result<Report> {
    if r < 2 {
        return Err(Error::Precondition(
            "w-independence needs rank at least 2".into(),
        ));
    }
    let mut rep = base_report("w-independence", s)
        .param("r", r)
        .param("order", order);
    let vars = VarSet::standard(r, &[]);
    let w_idx = group_indices(&vars, VarGroup::W);
    let z = engine.localization_series(r, order)?;
    let entries: Vec<_> = engine.install(|| {
        (0..=order)
            .into_par_iter()
            .map(|n| {
                let clock = engine.clock();
                let c = z.coeff(n);
                let found = find_dependence(c, &w_idx, s.trials, s.seed ^ (n as u64) << 8);
                let rand_ms = clock.ms();
                let exact = if n <= 2 || s.mode == super::Mode::Exact {
                    let clock = engine.clock();
                    Some((w_scaling_invariant(c, r), clock.ms()))
                } else {
                    None
                };
                (n, found, rand_ms, exact)
            })
            .collect()
    });
    for (n, found, ms, exact) in entries {
        let cmd = series_cmd("localization", r, order, None);
        match found {
            Ok(None) => rep.push(n, Some("random".into()), true, None, ms),
            Ok(Some(f)) => {
                let mut w = dependence_witness(&vars, &f, &cmd);
                w["order"] = json!(n);
                rep.push(n, Some("random".into()), false, Some(w), ms)
            }
            Err(e) => record(&mut rep, n, "random", Err(e), || Value::Null, ms),
        }
        if let Some((out, ms)) = exact {
            record(
                &mut rep,
                n,
                "exact",
                out,
                || json!({ "order": n, "reproduce": [cmd.clone()] }),
                ms,
            );
        }
    }
    // one summand keeps its w-dependence
    let clock = engine.clock();
    let mut parts = PartitionTuple::empty(r).parts;
    parts[0] = enumerate(4, 1)?.remove(0);
    let single = PartitionTuple::new(parts)?;
    let w = BracketSum::from(&np_weight(&vars, &single)?);
    let found = find_dependence(&w, &w_idx, s.trials, s.seed)?;
    rep.push(
        1,
        Some("single-summand-is-dependent".into()),
        found.is_some(),
        Some(json!({ "tuple": single.to_json_string(), "reproduce": [weight_cmd(&single, None)] })),
        clock.ms(),
    );
    Ok(rep)
}

/// Per-partition check of a specialization: non-plane tuples must vanish,
/// and, if `plane_nonzero`, plane tuples must survive.
fn specialized_vanishing(
    engine: &Engine,
    rep: &mut Report,
    r: usize,
    order: usize,
    plane_nonzero: bool,
) -> Result<()> {
    let vars = VarSet::standard(r, &[]);
    let images = y_to_t4_images(&vars)?;
    let arg = y_to_t4_arg(r);
    for n in 1..=order {
        let clock = engine.clock();
        let mut bad: Option<(PartitionTuple, bool)> = None;
        let mut survivors = 0usize;
        for (t, w) in engine.weights(r, n)? {
            let spec = w.substitute(&vars, &images)?;
            let plane = t.is_plane();
            if !spec.is_zero() {
                survivors += 1;
            }
            let ok = if plane {
                !plane_nonzero || !spec.is_zero()
            } else {
                spec.is_zero()
            };
            if !ok && bad.is_none() {
                bad = Some((t, plane));
            }
        }
        let ms = clock.ms();
        let label = format!("vanishing ({survivors} survive)");
        match bad {
            None => rep.push(n, Some(label), true, None, ms),
            Some((t, plane)) => rep.push(
                n,
                Some(label),
                false,
                Some(json!({
                    "tuple": t.to_json_string(),
                    "plane": plane,
                    "reproduce": [weight_cmd(&t, Some(&arg))],
                })),
                ms,
            ),
        }
    }
    Ok(())
}

/// Rank 1 at `y = t4`: weights off the hyperplane `x4 = 0` vanish, plane
/// ones survive, and the series becomes the three-dimensional vertex.
pub fn verify_reduction(engine: &Engine, order: usize, s: &Settings) -> Result<Report> {
    let mut rep = base_report("reduction", s).param("order", order);
    specialized_vanishing(engine, &mut rep, 1, order, true)?;
    let vars = VarSet::standard(1, &[]);
    let z = engine
        .localization_series(1, order)?
        .substitute(&vars, &y_to_t4_images(&vars)?)?;
    let dt = ClosedForm::Dt3.series(&vars, order)?;
    let cmds = [
        series_cmd("localization", 1, order, Some("y1=t4")),
        series_cmd("dt3", 1, order, None),
    ];
    compare_series(engine, &mut rep, "series", &z, &dt, 0, s, &cmds);
    Ok(rep)
}

/// Rank `r` with every `y_i = t4` against the Awata-Kanno closed form.
pub fn verify_awata_kanno(engine: &Engine, r: usize, order: usize, s: &Settings) -> Result<Report> {
    let mut rep = base_report("awata-kanno", s)
        .param("r", r)
        .param("order", order);
    specialized_vanishing(engine, &mut rep, r, order, false)?;
    let vars = VarSet::standard(r, &[]);
    let z = engine
        .localization_series(r, order)?
        .substitute(&vars, &y_to_t4_images(&vars)?)?;
    let ak = ClosedForm::AwataKanno(r as u32).series(&vars, order)?;
    let cmds = [
        series_cmd("localization", r, order, Some(&y_to_t4_arg(r))),
        series_cmd("awata-kanno", r, order, None),
    ];
    compare_series(engine, &mut rep, "series", &z, &ak, 0, s, &cmds);
    Ok(rep)
}

/// `H = Log Z_1 / F_t`: free of `t1, t2, t3` and equal to
/// `[y] / ([y^(1/2) q][y^(1/2) q^-1])`.
pub fn verify_log_structure(engine: &Engine, order: usize, s: &Settings) -> Result<Report> {
    let mut rep = base_report("log-structure", s).param("order", order);
    let vars = VarSet::standard(1, &[]);
    let clock = engine.clock();
    let z = engine.localization_series(1, order)?;
    let h = z.pleth_log()?.mul_factored(&f_t(&vars)?.inv()?);
    rep.params.insert("log_ms".into(), json!(clock.ms()));
    let t_idx = group_indices(&vars, VarGroup::T);
    let cmd = format!("{} --reduced-log", series_cmd("localization", 1, order, None));
    let results: Vec<_> = engine.install(|| {
        (1..=order)
            .into_par_iter()
            .map(|n| {
                let clock = engine.clock();
                (
                    n,
                    find_dependence(h.coeff(n), &t_idx, s.trials, s.seed ^ (n as u64) << 16),
                    clock.ms(),
                )
            })
            .collect()
    });
    for (n, found, ms) in results {
        match found {
            Ok(None) => rep.push(n, Some("t-independence".into()), true, None, ms),
            Ok(Some(f)) => {
                let mut w = dependence_witness(&vars, &f, &cmd);
                w["order"] = json!(n);
                w["note"] = json!("the log series is divided by F_t before evaluation");
                rep.push(n, Some("t-independence".into()), false, Some(w), ms)
            }
            Err(e) => record(&mut rep, n, "t-independence", Err(e), || Value::Null, ms),
        }
    }
    let y = vars.parse_monomial("y1")?;
    let pair = bracket_pair_series(&vars, &y.sqrt()?, order)?;
    let by = BracketSum::from(&FactoredRat::from_brackets(&vars, [(&y, 1)])?);
    let want = pair.map(|p| by.mul_poly(p));
    compare_series(engine, &mut rep, "bracket-pair", &h, &want, 1, s, std::slice::from_ref(&cmd));
    Ok(rep)
}

/// Framing limits `w_i = L^i` of `[-v_ab][-v_ba]` for all tuples of total
/// size at most `max_size` and all `a < b`.
pub fn verify_offdiag(engine: &Engine, r: usize, max_size: usize, s: &Settings) -> Result<Report> {
    if r < 2 {
        return Err(Error::Precondition(
            "off-diagonal limits need rank at least 2".into(),
        ));
    }
    let mut rep = base_report("offdiag", s)
        .param("r", r)
        .param("max_size", max_size);
    let vars = VarSet::standard(r, &["L"]);
    for n in 0..=max_size {
        let clock = engine.clock();
        let mut checked = 0usize;
        let mut bad: Option<Value> = None;
        for t in enumerate_tuples(r, n)? {
            for a in 1..=r {
                for b in a + 1..=r {
                    checked += 1;
                    let got = framing_limit(&vars, &t, a, b)?;
                    let want = expected_framing_limit(&vars, &t, a, b)?;
                    let ok = got.l_degree == 0
                        && (got.limit == want
                            || BracketSum::from(&got.limit)
                                .equals(&BracketSum::from(&want), CompareMode::Exact)?);
                    if !ok && bad.is_none() {
                        bad = Some(json!({
                            "tuple": t.to_json_string(),
                            "pair": [a, b],
                            "l_degree": got.l_degree as f64 / GRID as f64,
                            "limit": got.limit.to_string(),
                            "expected": want.to_string(),
                            "reproduce": [weight_cmd(&t, None)],
                        }));
                    }
                }
            }
        }
        let label = Some(format!("pairs ({checked})"));
        let ok = bad.is_none();
        rep.push(n, label, ok, bad, clock.ms());
    }
    Ok(rep)
}

fn random_monomial<R: Rng>(rng: &mut R, vars: &Vars, names: &[&str], half: bool) -> Monomial {
    loop {
        let mut m = vars.one();
        for name in names {
            let i = vars.index(name).expect("known variable");
            let e: i32 = rng.gen_range(-2..=2);
            m.0[i] = e * if half { GRID / 2 } else { GRID };
        }
        if !m.is_one() {
            return m;
        }
    }
}

fn random_class<R: Rng>(rng: &mut R, vars: &Vars) -> LaurentPoly {
    let mut p = LaurentPoly::zero(vars);
    for _ in 0..rng.gen_range(1..=4) {
        let m = random_monomial(rng, vars, &["t1", "t2", "t3"], false);
        let c: i64 = [-2, -1, 1, 2][rng.gen_range(0..4)];
        p.add_term(m, BigRational::from_integer(c.into()));
    }
    p
}

/// `[V]` as one quotient, one monomial bracket at a time.
fn termwise_bracket(v: &LaurentPoly) -> Result<RatFunc> {
    let vars = v.vars();
    let mut num = LaurentPoly::one(vars);
    let mut den = LaurentPoly::one(vars);
    for (m, c) in v.terms() {
        let k: i64 = c.to_integer().try_into().map_err(|_| {
            Error::NonIntegerCoefficient(c.to_string())
        })?;
        let b = bracket_monomial(vars, m)?;
        if k > 0 {
            num = &num * &b.pow(k as u32);
        } else {
            den = &den * &b.pow((-k) as u32);
        }
    }
    RatFunc::new(num, den)
}

fn random_coefficient<R: Rng>(rng: &mut R, vars: &Vars, pool: &[Monomial]) -> Result<BracketSum> {
    let mut c = BracketSum::zero(vars);
    for _ in 0..rng.gen_range(1..=2) {
        let m = random_monomial(rng, vars, &["a", "b"], false);
        let k: i64 = rng.gen_range(1..=3);
        let p = LaurentPoly::term(vars, m, BigRational::new(k.into(), BigInt::from(rng.gen_range(1..=2))));
        let d = &pool[rng.gen_range(0..pool.len())];
        let f = FactoredRat::from_brackets(vars, [(d, -1)])?;
        c = c.add(&BracketSum::from(&f).mul_poly(&p));
    }
    Ok(c)
}

/// `([x q][x q^-1]) * pair(x) = 1` through order `n`, using
/// `[x q][x q^-1] = x + x^-1 - q - q^-1`.
pub fn pair_back_multiplies(vars: &Vars, x: &Monomial, n: usize) -> Result<bool> {
    // one extra order so every product coefficient up to n is complete
    let s = bracket_pair_series(vars, x, n + 1)?;
    let c = |k: i64| -> LaurentPoly {
        if k < 0 || k as usize > n + 1 {
            LaurentPoly::zero(vars)
        } else {
            s.coeff(k as usize).clone()
        }
    };
    let mut xx = LaurentPoly::monomial(vars, x.clone());
    xx.add_term(x.inv(), BigRational::one());
    for k in -1..=n as i64 {
        let got = &(&xx * &c(k)) - &(&c(k - 1) + &c(k + 1));
        let want = if k == 0 {
            LaurentPoly::one(vars)
        } else {
            LaurentPoly::zero(vars)
        };
        if got != want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The three-term bracket identity, bracket laws on random classes, the
/// plethystic inverse pair and the pair-series back-multiplication.
pub fn verify_identities(engine: &Engine, s: &Settings) -> Result<Report> {
    let mut rep = base_report("identities", s);

    let clock = engine.clock();
    let abc = VarSet::new(&["a", "b", "c"])?;
    let m = |e: &str| abc.parse_monomial(e);
    let term = |num: Monomial, d1: Monomial, d2: Monomial| -> Result<BracketSum> {
        Ok(BracketSum::from(&FactoredRat::from_brackets(
            &abc,
            [(&num, 1), (&d1, -1), (&d2, -1)],
        )?))
    };
    let lhs = term(m("a")?, m("a^1/2*b^1/2*c")?, m("a^1/2*b^-1/2*c^-1")?)?.add(&term(
        m("b")?,
        m("a^-1/2*b^1/2*c")?,
        m("a^1/2*b^1/2*c^-1")?,
    )?);
    let rhs = term(m("a*b")?, m("a^1/2*b^1/2*c")?, m("a^1/2*b^1/2*c^-1")?)?;
    let out = lhs.equals(&rhs, CompareMode::Exact);
    record(
        &mut rep,
        0,
        "three-term-identity",
        out,
        || mismatch_witness(&lhs, &rhs, s.seed, &[]),
        clock.ms(),
    );

    let clock = engine.clock();
    let t = VarSet::standard(0, &[]);
    let mut rng = pit::rng(s.seed, 11);
    let mut bad = None;
    for i in 0..100 {
        let v = random_class(&mut rng, &t);
        let w = random_class(&mut rng, &t);
        let sum = &v + &w;
        let direct = bracket_class(&sum)?;
        let ok = if direct.is_zero() {
            termwise_bracket(&v)?.mul(&termwise_bracket(&w)?)?.is_zero()
        } else {
            let prod = termwise_bracket(&v)?.mul(&termwise_bracket(&w)?)?;
            rat_equal(&direct.expand(), &prod, CompareMode::Exact)?
        };
        if !ok && bad.is_none() {
            bad = Some(json!({ "sample": i, "v": v.to_string(), "w": w.to_string() }));
        }
    }
    rep.push(0, Some("bracket-multiplicative".into()), bad.is_none(), bad, clock.ms());

    let clock = engine.clock();
    let mut bad = None;
    for i in 0..100 {
        let mm = random_monomial(&mut rng, &t, &["t1", "t2", "t3"], true);
        let up = bracket_monomial(&t, &mm)?;
        let down = bracket_monomial(&t, &mm.inv())?;
        if down != -up && bad.is_none() {
            bad = Some(json!({ "sample": i, "monomial": mm.display(&t).to_string() }));
        }
    }
    rep.push(0, Some("bracket-antisymmetric".into()), bad.is_none(), bad, clock.ms());

    let clock = engine.clock();
    let ab = VarSet::new(&["a", "b"])?;
    let pool = [
        ab.parse_monomial("a")?,
        ab.parse_monomial("b")?,
        ab.parse_monomial("a*b^-1")?,
    ];
    let samples: Vec<Series<BracketSum>> = (0..20)
        .map(|_| {
            let mut coeffs = vec![BracketSum::zero(&ab)];
            for _ in 1..=5 {
                coeffs.push(random_coefficient(&mut rng, &ab, &pool)?);
            }
            Series::new(coeffs)
        })
        .collect::<Result<_>>()?;
    let outcomes: Vec<Result<bool>> = engine.install(|| {
        samples
            .par_iter()
            .map(|f| {
                let back = f.pleth_exp()?.pleth_log()?;
                for k in 0..=5 {
                    if !back.coeff(k).equals(f.coeff(k), CompareMode::Exact)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            })
            .collect()
    });
    let mut out = Ok(true);
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(true) => {}
            other => {
                out = other.map(|_| false);
                rep.params.insert("first_inverse_failure".into(), json!(i));
                break;
            }
        }
    }
    record(
        &mut rep,
        5,
        "plethystic-inverse",
        out,
        || json!({ "note": "see first_inverse_failure" }),
        clock.ms(),
    );

    let clock = engine.clock();
    let v1 = VarSet::standard(1, &[]);
    let kappa = v1.parse_monomial("t1*t2*t3")?;
    let xs = [
        v1.parse_monomial("y1^1/2")?,
        kappa.sqrt()?,
        kappa.mul(&kappa.sqrt()?),
    ];
    let mut out = Ok(true);
    let mut failed = None;
    for x in &xs {
        match pair_back_multiplies(&v1, x, 8) {
            Ok(true) => {}
            other => {
                failed = Some(x.display(&v1).to_string());
                out = other.map(|_| false);
                break;
            }
        }
    }
    record(
        &mut rep,
        8,
        "pair-back-multiplication",
        out,
        || json!({ "x": failed }),
        clock.ms(),
    );
    Ok(rep)
}

/// `Exp(q / (1 - q)^e)` coefficients through `q^n` over the rationals.
pub fn product_counts(e: usize, n: usize) -> Result<Vec<BigRational>> {
    // q / (1 - q)^e = sum_k binom(k + e - 2, e - 1) q^k
    let mut coeffs = vec![BigRational::zero()];
    for k in 1..=n {
        let mut c = BigInt::one();
        for i in 0..e - 1 {
            c = c * BigInt::from(k - 1 + e - 1 - i) / BigInt::from(i + 1);
        }
        coeffs.push(BigRational::from_integer(c));
    }
    Ok(Series::new(coeffs)?.pleth_exp()?.into_coeffs())
}

/// Enumeration counts, product formulas in dimensions 2 and 3, the parity
/// lemma with its fixed-part form, and the sign statistics.
pub fn verify_counts(engine: &Engine, max_n: usize, s: &Settings) -> Result<Report> {
    let mut rep = base_report("counts", s).param("max_n", max_n);
    let clock = engine.clock();
    let levels: Vec<Vec<_>> = (0..=max_n)
        .map(|n| enumerate(4, n))
        .collect::<Result<_>>()?;
    let counts: Vec<usize> = levels.iter().map(Vec::len).collect();
    rep.params.insert("counts".into(), json!(counts));
    let ms = clock.ms();
    for n in 1..=max_n {
        match SOLID_COUNTS.get(n) {
            Some(&want) => rep.push(
                n,
                Some("dim4".into()),
                counts[n] == want,
                Some(json!({ "count": counts[n], "expected": want })),
                ms,
            ),
            None => rep.skip(n, Some("dim4".into()), "no reference count"),
        }
    }

    let product_order = max_n.max(8);
    for (dim, e, label) in [(2usize, 1usize, "euler"), (3, 2, "macmahon")] {
        let clock = engine.clock();
        let want = product_counts(e, product_order)?;
        let mut bad = None;
        for (n, w) in want.iter().enumerate() {
            let got = enumerate(dim, n)?.len();
            if BigRational::from_integer(got.into()) != *w && bad.is_none() {
                bad = Some(json!({ "size": n, "count": got, "expected": w.to_string() }));
            }
        }
        rep.push(product_order, Some(label.into()), bad.is_none(), bad, clock.ms());
    }

    let vars = VarSet::standard(1, &[]);
    for (n, parts) in levels.iter().enumerate().skip(1) {
        let clock = engine.clock();
        let mut bad = None;
        for p in parts {
            let pairs = p.fixed_pairs();
            let dim = fixed_pair_dimension(p, &vars);
            if (pairs % 2 != p.k_stat() % 2 || dim != pairs as i64) && bad.is_none() {
                bad = Some(json!({
                    "partition": serde_json::to_value(p)?,
                    "fixed_pairs": pairs,
                    "fixed_part_dimension": dim,
                    "k": p.k_stat(),
                }));
            }
        }
        rep.push(n, Some("parity".into()), bad.is_none(), bad, clock.ms());

        let clock = engine.clock();
        let mut bad = None;
        for p in parts {
            let mu = p.mu();
            if ((p.is_plane() && mu != 0) || mu > p.k_stat()) && bad.is_none() {
                bad = Some(json!({ "partition": serde_json::to_value(p)?, "mu": mu, "k": p.k_stat() }));
            }
        }
        rep.push(n, Some("statistics".into()), bad.is_none(), bad, clock.ms());
    }
    Ok(rep)
}

/// The weight of a permuted partition equals the weight with permuted
/// parameters, for every partition of size at most `max_n` and all 24
/// permutations.
pub fn verify_permutations(engine: &Engine, max_n: usize, s: &Settings) -> Result<Report> {
    let mut rep = base_report("permutations", s).param("max_n", max_n);
    let vars = VarSet::standard(1, &[]);
    let perms = permutations4();
    for n in 0..=max_n {
        let clock = engine.clock();
        let mode = s.compare_mode(n);
        let tuples: Vec<PartitionTuple> = enumerate(4, n)?
            .into_iter()
            .map(PartitionTuple::single)
            .collect();
        let outcomes: Vec<(usize, usize, Result<bool>)> = engine.install(|| {
            tuples
                .par_iter()
                .enumerate()
                .flat_map_iter(|(i, t)| {
                    let vars = &vars;
                    perms
                        .iter()
                        .enumerate()
                        .map(move |(j, sigma)| (i, j, weight_permuted_equal(vars, t, sigma, mode)))
                })
                .collect()
        });
        let mut out: Result<bool> = Ok(true);
        let mut witness = None;
        for (i, j, o) in outcomes {
            match o {
                Ok(true) => {}
                other => {
                    witness = Some(json!({
                        "tuple": tuples[i].to_json_string(),
                        "sigma": perms[j],
                        "reproduce": [
                            weight_cmd(&tuples[i], None),
                            weight_cmd(&tuples[i].permute(&perms[j]), None),
                        ],
                    }));
                    out = other.map(|_| false);
                    break;
                }
            }
        }
        let label = format!("{} partitions x {}", tuples.len(), perms.len());
        let ms = clock.ms();
        record(&mut rep, n, &label, out, || witness.unwrap_or(Value::Null), ms);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine() -> Engine {
        Engine::new(2).unwrap().with_timings(false)
    }

    #[test]
    fn product_counts_match_known_values() {
        let euler: Vec<_> = product_counts(1, 6).unwrap();
        let want = [1, 1, 2, 3, 5, 7, 11];
        for (c, w) in euler.iter().zip(want) {
            assert_eq!(*c, BigRational::from_integer(w.into()));
        }
        let mac: Vec<_> = product_counts(2, 6).unwrap();
        let want = [1, 1, 3, 6, 13, 24, 48];
        for (c, w) in mac.iter().zip(want) {
            assert_eq!(*c, BigRational::from_integer(w.into()));
        }
    }

    #[test]
    fn main_rank_one_low_orders() {
        let rep = verify_main(&engine(), 1, 2, &Settings::default()).unwrap();
        assert!(rep.passed(), "{}", rep.to_text());
        assert_eq!(rep.orders.len(), 3);
    }

    #[test]
    fn w_independence_rank_two_first_order() {
        let rep = verify_w_independence(&engine(), 2, 1, &Settings::default()).unwrap();
        assert!(rep.passed(), "{}", rep.to_text());
        assert!(rep
            .orders
            .iter()
            .any(|e| e.label.as_deref() == Some("single-summand-is-dependent")));
    }

    #[test]
    fn a_wrong_closed_form_fails_with_a_witness() {
        let e = engine();
        let vars = VarSet::standard(1, &[]);
        let z = e.localization_series(1, 1).unwrap();
        let wrong = ClosedForm::Dt3.series(&vars, 1).unwrap();
        let mut rep = Report::new("probe");
        compare_series(&e, &mut rep, "series", &z, &wrong, 0, &Settings::default(), &["x".into()]);
        assert!(!rep.passed());
        let f = rep.failures().next().unwrap();
        assert_eq!(f.n, 1);
        let w = f.witness.as_ref().unwrap();
        assert!(w["point"].is_object());
        assert_ne!(w["lhs"], w["rhs"]);
    }

    #[test]
    fn identities_pass() {
        let rep = verify_identities(&engine(), &Settings::default()).unwrap();
        assert!(rep.passed(), "{}", rep.to_text());
    }

    #[test]
    fn pair_back_multiplication_for_two_arguments() {
        let v = VarSet::standard(1, &[]);
        let x = v.parse_monomial("y1^1/2").unwrap();
        assert!(pair_back_multiplies(&v, &x, 6).unwrap());
        assert!(pair_back_multiplies(&v, &x.pow(2), 6).unwrap());
    }

    #[test]
    fn offdiag_small_sizes() {
        let rep = verify_offdiag(&engine(), 2, 1, &Settings::default()).unwrap();
        assert!(rep.passed(), "{}", rep.to_text());
    }

    #[test]
    fn counts_to_five() {
        let rep = verify_counts(&engine(), 5, &Settings::default()).unwrap();
        assert!(rep.passed(), "{}", rep.to_text());
    }
}
