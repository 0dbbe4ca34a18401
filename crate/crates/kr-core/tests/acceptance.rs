//! Acceptance gate: one test per agreed criterion, each printing a single
//! PASS or FAIL line with its wall time.  All comparisons are exact unless a
//! criterion explicitly allows sampling.

use std::time::Instant;

use kr_core::qsystem::{
    check_linear_recurrence, coeff_c1_orbit, coeff_c1_zero, coeff_c2, f4_node1_series,
    f4_node2_series, lambda_table, q1_f4, QEngine, QError,
};
use kr_core::weylgrp::{enumerate_parabolic, group_order, orbit};
use kr_core::{
    coeff_d_scaled, mul_weyl_denominator, partial_fractions_row, polyhedral_spec, run_pipeline,
    CartanType, CharCache, CheckStatus, CosetTable, GroupRingElem, Mode, MultFormula,
    PolyhedralSpec, RandomPoint, RootSystem, VerifierConfig, Weight, WeylElement,
};

fn f4() -> RootSystem {
    RootSystem::new(CartanType::parse("F4").unwrap()).unwrap()
}

fn line(criterion: &str, pass: bool, seconds: f64, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} {criterion} ({seconds:.2}s): {detail}");
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn criterion_1_f4_node2_exact_proof() {
    let t = Instant::now();
    let config = VerifierConfig::new("F4", 2);
    let report = run_pipeline(&config).unwrap();
    let seconds = t.elapsed().as_secs_f64();

    let mut missing = Vec::new();
    for name in [
        "residue_at_origin",
        "residue_at_omega1",
        "residue_at_omega2",
        "residue_at_2omega4",
        "vanishing_at_2omega3",
        "vanishing_at_omega2",
        "vanishing_at_omega1",
    ] {
        let check = report.checks.iter().find(|c| c.name == name);
        match check {
            Some(c) if c.status == CheckStatus::Proved => {}
            Some(c) => missing.push(format!("{name} is {:?}", c.status)),
            None => missing.push(format!("{name} missing")),
        }
    }
    let pairing = report
        .checks
        .iter()
        .find(|c| c.name == "vanishing_at_omega1")
        .map(|c| c.detail.contains("12 representatives canceling in 6 pairs"))
        .unwrap_or(false);
    if !pairing {
        missing.push("omega1 certificate does not show 6 pairs over 12 representatives".into());
    }
    if seconds > 1450.0 {
        missing.push(format!("wall time {seconds:.0}s exceeds the 1450s budget"));
    }
    let target_note = if seconds <= 300.0 {
        "within the 300s target"
    } else {
        "over the 300s target but within the hard budget"
    };
    line(
        "criterion 1 (second-node formula proved exactly)",
        missing.is_empty() && report.verified,
        seconds,
        &if missing.is_empty() {
            format!(
                "four residue equalities and three vanishing certificates proved; {target_note}"
            )
        } else {
            missing.join("; ")
        },
    );
}

#[test]
fn criterion_2_structural_counts() {
    let t = Instant::now();
    let rs = f4();
    let w_order = group_order(&rs);
    let orbit_size = orbit(&rs, &Weight::from_coords(vec![1, 0, 0, 0])).len();
    let cosets = CosetTable::in_full_group(&rs, &[0, 2, 3]).unwrap().reps.len();
    let subgroup = enumerate_parabolic(&rs, &[0, 2, 3]).unwrap().len();
    let seconds = t.elapsed().as_secs_f64();
    let got = (w_order, orbit_size, cosets, subgroup);
    line(
        "criterion 2 (structural counts)",
        got == (1152, 24, 96, 12) && seconds <= 5.0,
        seconds,
        &format!("(|W|, |O(omega1)|, cosets, subgroup order) = {got:?}, expected (1152, 24, 96, 12)"),
    );
}

#[test]
fn criterion_3_cross_route_residues() {
    let t = Instant::now();
    let mut failures = Vec::new();
    for (name, node) in [("A1", 1), ("A2", 1), ("A2", 2), ("C2", 1), ("C2", 2)] {
        let report = run_pipeline(&VerifierConfig::new(name, node)).unwrap();
        let check = report
            .checks
            .iter()
            .find(|c| c.name == "cross_route_residue")
            .unwrap();
        if check.status != CheckStatus::Proved {
            failures.push(format!("{name} node {node}: {:?}", check.status));
        }
    }
    let seconds = t.elapsed().as_secs_f64();
    line(
        "criterion 3 (cross-route residues for the small types)",
        failures.is_empty() && seconds <= 60.0,
        seconds,
        &if failures.is_empty() {
            "series residues equal the product coefficients exactly in all five pipelines".into()
        } else {
            failures.join("; ")
        },
    );
}

#[test]
fn criterion_4_term_by_term_consistency() {
    let t = Instant::now();
    let rs = f4();
    let cache = CharCache::new(rs.clone());
    let spec2 = polyhedral_spec(&rs, 2).unwrap();
    let series = f4_node2_series(&cache, 3).unwrap();
    let mut failures = Vec::new();
    for m in 0..=3 {
        if *series.term(m) != spec2.multiplicities_direct(m).unwrap() {
            failures.push(format!("second node level {m}"));
        }
    }
    let spec1 = polyhedral_spec(&rs, 1).unwrap();
    for m in 0..=6 {
        if q1_f4(&rs, m).unwrap() != spec1.multiplicities_direct(m).unwrap() {
            failures.push(format!("first node level {m}"));
        }
    }
    let seconds = t.elapsed().as_secs_f64();
    line(
        "criterion 4 (recursion equals the direct multiplicity sums)",
        failures.is_empty() && seconds <= 600.0,
        seconds,
        &if failures.is_empty() {
            "second node agrees through level 3, first node through level 6".into()
        } else {
            format!("disagreements at: {}", failures.join(", "))
        },
    );
}

#[test]
fn criterion_5_linear_recurrences() {
    let t = Instant::now();
    let rs = f4();
    let table = lambda_table(&rs, 1).unwrap();
    let series = f4_node1_series(&rs, 30).unwrap();
    let report = check_linear_recurrence(&rs, &table, &series).unwrap();
    let spare = report.checked_through + 1 - report.deg_d;

    let a1 = RootSystem::new(CartanType::parse("A1").unwrap()).unwrap();
    let cache1 = CharCache::new(a1.clone());
    let engine = QEngine::new(&cache1);
    let table1 = lambda_table(&a1, 1).unwrap();
    let series1 = engine.series(1, table1.deg_d(&a1) + 6).unwrap();
    let report1 = check_linear_recurrence(&a1, &table1, &series1).unwrap();
    let a1_unit = report1.numerator == vec![GroupRingElem::one(1)];

    let seconds = t.elapsed().as_secs_f64();
    line(
        "criterion 5 (linear recurrences with exact remainders)",
        report.deg_d == 25 && spare >= 5 && a1_unit,
        seconds,
        &format!(
            "F4 first node: degree {} with {spare} vanishing terms past the numerator \
             (need >= 5); A1 numerator is the unit: {a1_unit}",
            report.deg_d
        ),
    );
}

#[test]
fn criterion_6_property_invariants() {
    let t = Instant::now();
    let rs = f4();
    let mut failures = Vec::new();

    // Computed characters are Weyl invariant.
    let cache = CharCache::new(rs.clone());
    let chi = cache.character(&Weight::from_coords(vec![0, 0, 0, 1])).unwrap();
    for a in 0..rs.rank {
        let s = WeylElement::simple(&rs, a).unwrap();
        if chi.weyl_act(&s) != *chi {
            failures.push(format!("character not invariant under reflection {a}"));
        }
    }

    // Partial-fraction rows re-sum to the product form at random points for
    // 20 random Weyl elements.
    let spec = polyhedral_spec(&rs, 2).unwrap();
    let point = RandomPoint::new(rs.rank, 20260816);
    let mut word = Vec::new();
    let mut state = 0x243F6A8885A308D3u64;
    for i in 0..20 {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        word.push((state >> 33) as usize % rs.rank);
        let w = WeylElement::from_word(&rs, &word).unwrap();
        let row = partial_fractions_row(&rs, &spec, &w).unwrap();
        if !row_resums_at_point(&spec, &row, &point) {
            failures.push(format!("row {i} does not re-sum"));
        }
    }

    // Normalization is idempotent.
    let mut f = coeff_c1_fund(&rs);
    f.normalize();
    let once = f.clone();
    f.normalize();
    if !f.equals(&once) || f.denom_factors != once.denom_factors {
        failures.push("normalization is not idempotent".into());
    }

    // Dually-run checks agree between exact and probabilistic modes.
    for (name, node) in [("A2", 1), ("C2", 2)] {
        let exact = run_pipeline(&VerifierConfig::new(name, node)).unwrap();
        let prob = run_pipeline(
            &VerifierConfig::new(name, node).with_mode(Mode::Probabilistic),
        )
        .unwrap();
        for (e, p) in exact.checks.iter().zip(&prob.checks) {
            let agree = (e.status == CheckStatus::Failed) == (p.status == CheckStatus::Failed);
            if e.name != p.name || !agree {
                failures.push(format!("{name} node {node}: {} disagrees across modes", e.name));
            }
        }
    }

    let seconds = t.elapsed().as_secs_f64();
    line(
        "criterion 6 (property invariants)",
        failures.is_empty(),
        seconds,
        &if failures.is_empty() {
            "Weyl invariance, 20 partial-fraction re-sums, idempotent normalization, \
             and exact/probabilistic agreement all hold"
                .into()
        } else {
            failures.join("; ")
        },
    );
}

fn coeff_c1_fund(rs: &RootSystem) -> kr_core::GeoFraction {
    kr_core::qsystem::coeff_c1_fund(rs, 1).unwrap()
}

/// Numerically re-sums one row's partial fractions against the direct
/// product form of the same row.
fn row_resums_at_point(
    spec: &PolyhedralSpec,
    row: &kr_core::PartialFractionRow,
    point: &RandomPoint,
) -> bool {
    use kr_core::groupring::{addmod, modinv, modpow, mulmod, submod, PRIME};

    // tau is a free evaluation for the auxiliary variable.
    let tau = 987654321098765u64 % PRIME;
    let w = &row.w;
    let mut product = 1u64;
    for f in &spec.factors {
        let ew = point.eval_weight(&w.apply(&f.weight));
        let tpow = modpow(tau, u64::from(f.t_degree));
        let base = submod(1, mulmod(ew, tpow));
        if base == 0 {
            return true; // unluckily degenerate; nothing to compare
        }
        product = mulmod(product, modpow(modinv(base), u64::from(f.power)));
    }

    let mut resum = 0u64;
    let eval = |f: &kr_core::GeoFraction| point.eval_fraction(f);
    for (mu, part) in &row.simple_parts {
        let Ok(v) = eval(part) else { return true };
        let base = submod(1, mulmod(point.eval_weight(&w.apply(mu)), tau));
        if base == 0 {
            return true;
        }
        resum = addmod(resum, mulmod(v, modinv(base)));
    }
    for (mu, c0, c1) in &row.quad_parts {
        let Ok(v0) = eval(c0) else { return true };
        let Ok(v1) = eval(c1) else { return true };
        let base = submod(1, mulmod(point.eval_weight(&w.apply(mu)), mulmod(tau, tau)));
        if base == 0 {
            return true;
        }
        let num = addmod(v0, mulmod(v1, tau));
        resum = addmod(resum, mulmod(num, modinv(base)));
    }
    for (mu, part) in &row.double_parts {
        let Ok(v) = eval(part) else { return true };
        let base = submod(1, mulmod(point.eval_weight(&w.apply(mu)), tau));
        if base == 0 {
            return true;
        }
        let inv = modinv(base);
        resum = addmod(resum, mulmod(v, mulmod(inv, inv)));
    }
    resum == product
}

#[test]
fn criterion_7_negative_controls() {
    let t = Instant::now();
    let rs = f4();
    let mut failures = Vec::new();

    // Dropping the (j4 + 1) multiplier is dropping the square on the last
    // factor of the generating product; the residue comparison must detect
    // it and pin down a witness term.
    let good = polyhedral_spec(&rs, 2).unwrap();
    let mut factors = good.factors.clone();
    for f in &mut factors {
        if f.power == 2 {
            f.power = 1;
        }
    }
    let perturbed = PolyhedralSpec::from_parts(&rs, 2, factors, MultFormula::One).unwrap();
    let omega2 = Weight::from_coords(vec![0, 1, 0, 0]);
    let mut c1 = coeff_c1_orbit(&rs, 1).unwrap();
    c1.push((Weight::zero(rs.rank), coeff_c1_zero(&rs, 1).unwrap()));
    let pair = coeff_c2(&rs, &c1, &omega2).unwrap();
    let scaled = mul_weyl_denominator(&rs, pair);
    let row = coeff_d_scaled(&rs, &perturbed, &omega2, None, 96).unwrap();
    let diff = scaled.sub(&row);
    if diff.is_zero() {
        failures.push("perturbed multiplicity formula passed the residue comparison".into());
    } else {
        let witness = diff
            .num
            .iter_weights()
            .min_by(|a, b| {
                (a.0.scale, a.0.coords.as_slice()).cmp(&(b.0.scale, b.0.coords.as_slice()))
            })
            .map(|(w, c)| format!("{c} * e^{w}"))
            .unwrap();
        println!("  witness for the perturbed formula: minimal difference term {witness}");
    }

    // A spurious summand in one series term must trip the recurrence at
    // exactly that index.
    let mut series = f4_node1_series(&rs, 30).unwrap();
    series.terms[27].add_scaled_assign(
        &kr_core::CharCombo::single(&Weight::zero(rs.rank), 1),
        &num_bigint_one(),
    );
    let table = lambda_table(&rs, 1).unwrap();
    match check_linear_recurrence(&rs, &table, &series) {
        Err(QError::RecurrenceViolation { index: 27 }) => {}
        other => failures.push(format!("tampered series not rejected at 27: {other:?}")),
    }

    let seconds = t.elapsed().as_secs_f64();
    line(
        "criterion 7 (negative controls detect corruption)",
        failures.is_empty(),
        seconds,
        &if failures.is_empty() {
            "perturbed multiplicities fail the residue comparison with a minimized witness; \
             a tampered series term is rejected at its exact index"
                .into()
        } else {
            failures.join("; ")
        },
    );
}

fn num_bigint_one() -> num_bigint::BigInt {
    num_bigint::BigInt::from(1)
}
