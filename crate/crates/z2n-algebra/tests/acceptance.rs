//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `cargo test --test acceptance -- --nocapture`).
//! Every check is exact; the stated wall-clock budgets are asserted.

mod common;

use std::time::Instant;

use common::*;
use rand::Rng;
use z2n_algebra::atlas::{
    check_cocycle, check_global_section, check_transition, Atlas, Chart, SectionWitness,
    Transition,
};
use z2n_algebra::oracle::naive_product;
use z2n_algebra::parse::parse_series;
use z2n_algebra::session::parse_session;
use z2n_algebra::{
    frac, rat, realize_sign_rule, Error, FormalSignature, Morphism, Series,
    SuperdomainSignature, Valuation,
};

struct Criterion {
    number: u32,
    label: &'static str,
    start: Instant,
    budget_ms: Option<u128>,
    failures: Vec<String>,
}

impl Criterion {
    fn new(number: u32, label: &'static str, budget_ms: Option<u128>) -> Self {
        Criterion {
            number,
            label,
            start: Instant::now(),
            budget_ms,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(detail());
        }
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed();
        if let Some(budget) = self.budget_ms {
            if elapsed.as_millis() > budget {
                self.failures.push(format!(
                    "exceeded time budget: {} ms > {budget} ms",
                    elapsed.as_millis()
                ));
            }
        }
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:02} {}: {verdict} ({:.2} ms)",
            self.number,
            self.label,
            elapsed.as_secs_f64() * 1e3
        );
        assert!(
            self.failures.is_empty(),
            "criterion {:02} {}:\n{}",
            self.number,
            self.label,
            self.failures.join("\n")
        );
    }
}

#[test]
fn criterion_01_quaternion_grading() {
    let degrees = [dv(&[1, 1, 0]), dv(&[1, 0, 1]), dv(&[0, 1, 1])];
    let mut c = Criterion::new(1, "quaternion sign rule", Some(1));
    for i in 0..3 {
        for j in 0..3 {
            if i > j {
                continue;
            }
            let sign = degrees[i].commutation_sign(&degrees[j]).unwrap();
            let expected = if i == j { 1 } else { -1 };
            c.check(sign == expected, || {
                format!("pair ({i},{j}): sign {sign}, expected {expected}")
            });
        }
    }
    c.finish();
}

#[test]
fn criterion_02_sign_rule_realization() {
    let mut c = Criterion::new(2, "sign-table realization", Some(1000));
    let mut r = rng(1002);
    for case in 0..200 {
        let m = r.random_range(1..=6);
        let table = random_symmetric_sign_table(&mut r, m);
        match realize_sign_rule(&table) {
            Err(e) => c.check(false, || format!("case {case}: {e}")),
            Ok(a) => {
                c.check(a.grading_length() == 2 * m, || {
                    format!("case {case}: n = {} instead of {}", a.grading_length(), 2 * m)
                });
                c.check(a.realizes(&table), || {
                    format!("case {case}: some pair violates the table")
                });
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_03_inversion() {
    let mut c = Criterion::new(3, "series inversion", Some(5000));
    let mut r = rng(1003);
    let mut nontrivial = 0;
    for case in 0..100 {
        let order = r.random_range(1..=6);
        let sig = random_signature(&mut r, 4, order);
        // invertible: shift the center value away from zero
        let mut w = random_series(&mut r, &sig, 4);
        let center = w.base_projection().constant_term();
        if num::Zero::is_zero(&center) {
            w = w.add(&Series::constant(&sig, rat(2))).unwrap();
        }
        if w.num_terms() > 1 {
            nontrivial += 1;
        }
        match w.invert() {
            Err(e) => c.check(false, || format!("case {case}: inversion failed: {e}")),
            Ok(inv) => {
                let one = Series::one(&sig);
                c.check(w.mul(&inv).unwrap() == one, || {
                    format!("case {case}: w * w^-1 differs from 1")
                });
                c.check(inv.mul(&w).unwrap() == one, || {
                    format!("case {case}: w^-1 * w differs from 1")
                });
            }
        }

        // not invertible: force the center value to zero
        let v = random_series(&mut r, &sig, 4);
        let centered = v
            .sub(&Series::constant(&sig, v.base_projection().constant_term()))
            .unwrap();
        c.check(
            matches!(centered.invert(), Err(Error::NotInvertible)),
            || format!("case {case}: inversion of a non-unit did not fail"),
        );
    }
    c.check(nontrivial >= 50, || {
        format!("only {nontrivial}/100 units had more than one term")
    });
    c.finish();
}

#[test]
fn criterion_04_product_oracle_equivalence() {
    let mut c = Criterion::new(4, "product vs word-rewriting oracle", Some(10_000));
    let mut r = rng(1004);
    let mut nonzero = 0;
    for case in 0..500 {
        let order = r.random_range(1..=4);
        let sig = if case % 2 == 0 {
            block_signature(order)
        } else {
            random_signature(&mut r, 4, order)
        };
        let a = random_series(&mut r, &sig, 4);
        let b = random_series(&mut r, &sig, 4);
        let fast = a.mul(&b).unwrap();
        let slow = naive_product(&a, &b).unwrap();
        if !fast.is_zero() {
            nonzero += 1;
        }
        c.check(fast == slow, || {
            format!("case {case}: product disagrees with the oracle\n  a = {a}\n  b = {b}")
        });
    }
    c.check(nonzero >= 200, || {
        format!("only {nonzero}/500 products were nonzero")
    });
    c.finish();
}

fn random_morphism_setup(r: &mut rand_chacha::ChaCha8Rng) -> (Morphism, FormalSignature) {
    let order = r.random_range(2..=4);
    let source = SuperdomainSignature::new(random_signature(r, 3, order));
    let n = source.formal().grading_len();
    let tgt_p = r.random_range(0..=2);
    let tgt_q = r.random_range(1..=3);
    let degrees = (0..tgt_q)
        .map(|_| random_nonzero_degree(r, n))
        .collect();
    let target_formal = FormalSignature::new(n, tgt_p, degrees, order).unwrap();
    let target = SuperdomainSignature::new(target_formal.clone());
    (
        random_centered_morphism(r, &source, &target),
        target_formal,
    )
}

#[test]
fn criterion_05_morphism_laws() {
    let mut c = Criterion::new(5, "pullback laws and continuity", Some(20_000));
    let mut r = rng(1005);
    let mut nonzero = 0;
    for case in 0..100 {
        let (m, tgt) = random_morphism_setup(&mut r);
        let g = random_series(&mut r, &tgt, 3);
        let h = random_series(&mut r, &tgt, 3);

        // multiplicativity and unitality
        let lhs = m.pullback(&g.mul(&h).unwrap()).unwrap();
        let rhs = m.pullback(&g).unwrap().mul(&m.pullback(&h).unwrap()).unwrap();
        c.check(lhs == rhs, || format!("case {case}: pullback not multiplicative"));
        c.check(
            m.pullback(&Series::one(&tgt)).unwrap() == Series::one(m.source().formal()),
            || format!("case {case}: pullback not unital"),
        );

        // degree preservation on a homogeneous sample
        let d = random_nonzero_degree(&mut r, tgt.grading_len());
        let hom = random_homogeneous_series(&mut r, &tgt, &d, 3, 0);
        c.check(
            m.pullback(&hom).unwrap().is_homogeneous_of(&d),
            || format!("case {case}: pullback does not preserve degree {d}"),
        );

        // projection onto the base commutes with the pullback
        let src = m.source().formal();
        let lhs = m.pullback(&g).unwrap().base_projection();
        let rhs = compose_into(
            &g.base_projection(),
            m.base_map(),
            src.base_vars(),
            src.order(),
        );
        c.check(lhs == rhs, || {
            format!("case {case}: base projection does not commute")
        });

        // adic-order monotonicity
        let pulled = m.pullback(&g).unwrap();
        if !pulled.is_zero() {
            nonzero += 1;
        }
        c.check(pulled.j_adic_order() >= g.j_adic_order(), || {
            format!(
                "case {case}: formal-ideal order dropped from {} to {}",
                g.j_adic_order(),
                pulled.j_adic_order()
            )
        });
        c.check(pulled.m_adic_order() >= g.m_adic_order(), || {
            format!(
                "case {case}: maximal-ideal order dropped from {} to {}",
                g.m_adic_order(),
                pulled.m_adic_order()
            )
        });
    }
    c.check(nonzero >= 30, || {
        format!("only {nonzero}/100 pullbacks were nonzero")
    });
    c.finish();
}

#[test]
fn criterion_06_taylor_expansion_equivalence() {
    let mut c = Criterion::new(6, "substitution vs Taylor-derivative sum", None);
    let mut r = rng(1006);
    let mut nonzero = 0;
    for case in 0..100 {
        let (m, tgt) = random_morphism_setup(&mut r);
        let g_nu = random_jet(&mut r, tgt.base_vars(), tgt.order(), 3);
        let by_substitution = m
            .pullback(&Series::from_jet(&tgt, g_nu.clone()).unwrap())
            .unwrap();
        let by_taylor = taylor_coefficient_pullback(&m, &g_nu);
        if !by_substitution.is_zero() {
            nonzero += 1;
        }
        c.check(by_substitution == by_taylor, || {
            format!("case {case}: routes disagree for coefficient {g_nu}")
        });
    }
    c.check(nonzero >= 30, || {
        format!("only {nonzero}/100 coefficient pullbacks were nonzero")
    });
    c.finish();
}

#[test]
fn criterion_07_reconstruction() {
    let mut c = Criterion::new(7, "morphism reconstruction from coordinates", None);
    let mut r = rng(1007);
    let mut tested = 0;
    for case in 0..10 {
        let (m, tgt) = random_morphism_setup(&mut r);
        // read the coordinate images back through the pullback machinery
        let base = (1..=tgt.base_vars())
            .map(|j| m.pullback(&Series::base_variable(&tgt, j).unwrap()).unwrap())
            .collect();
        let formal = (1..=tgt.formal_vars())
            .map(|b| m.pullback(&Series::formal_variable(&tgt, b).unwrap()).unwrap())
            .collect();
        let rebuilt = Morphism::from_coordinate_pullbacks(
            m.source().clone(),
            m.target().clone(),
            base,
            formal,
        )
        .unwrap();
        for _ in 0..6 {
            let g = random_series(&mut r, &tgt, 3);
            tested += 1;
            c.check(
                m.pullback(&g).unwrap() == rebuilt.pullback(&g).unwrap(),
                || format!("case {case}: rebuilt morphism pulls back differently"),
            );
        }
    }
    c.check(tested >= 50, || format!("only {tested} series tested"));
    c.finish();
}

#[test]
fn criterion_08_polynomial_approximation() {
    let mut c = Criterion::new(8, "polynomial approximation order bound", None);
    let mut r = rng(1008);
    for case in 0..100 {
        let order = r.random_range(1..=6);
        let sig = random_signature(&mut r, 3, order);
        let f = random_series(&mut r, &sig, 5);
        for k in 1..=order {
            let p = f.polynomial_approximation(k).unwrap();
            let rem = f.sub(&p).unwrap();
            c.check(rem.m_adic_order() >= Valuation::Finite(k), || {
                format!(
                    "case {case}, k = {k}: remainder order {} below {k}",
                    rem.m_adic_order()
                )
            });
            // coefficients of P are polynomials of base degree < k
            let degree_ok = p
                .iter_terms()
                .all(|(_, jet)| jet.iter_terms().all(|(e, _)| {
                    e.iter().map(|&x| x as usize).sum::<usize>() < k
                }));
            c.check(degree_ok, || {
                format!("case {case}, k = {k}: a coefficient has degree >= {k}")
            });
        }
    }
    c.finish();
}

#[test]
fn criterion_09_truncation_consistency() {
    let mut c = Criterion::new(9, "evaluation commutes with truncation", None);
    let mut r = rng(1009);
    let sig8 = block_signature(8);
    let sig4 = block_signature(4);
    let mut deep = 0;
    for case in 0..50 {
        let tree = random_expr(&mut r, &sig8, 3);
        let at8 = eval_expr(&tree, &sig8);
        let at4 = eval_expr(&tree, &sig4);
        if at8.m_adic_order() <= Valuation::Finite(8)
            && at8.iter_terms().any(|(m, jet)| {
                jet.iter_terms().any(|(e, _)| {
                    e.iter().map(|&x| x as usize).sum::<usize>() + m.weight() > 4
                })
            })
        {
            deep += 1;
        }
        c.check(at8.truncate(4).unwrap() == at4, || {
            format!("case {case}: truncating the order-8 result differs from evaluating at 4")
        });
    }
    c.check(deep >= 15, || {
        format!("only {deep}/50 trees produced content beyond order 4")
    });
    c.finish();
}

/// Invertible coordinate-transformation family on the block signature,
/// parametrized by a scalar.
fn transformation(sig: &SuperdomainSignature, k: i64) -> Morphism {
    let fs = sig.formal();
    let x1 = Series::base_variable(fs, 1).unwrap();
    let xi = Series::formal_variable(fs, 1).unwrap();
    let eta = Series::formal_variable(fs, 2).unwrap();
    let theta = Series::formal_variable(fs, 3).unwrap();
    let y = x1
        .add(&x1.mul(&x1).unwrap().scale(&rat(k)))
        .unwrap()
        .add(&theta.mul(&xi).unwrap().mul(&eta).unwrap())
        .unwrap();
    let alpha = xi
        .add(&x1.mul(&theta).unwrap().mul(&eta).unwrap().scale(&rat(k)))
        .unwrap();
    let beta = eta.add(&theta.mul(&xi).unwrap().scale(&rat(k))).unwrap();
    let gamma = theta
        .add(&x1.mul(&theta).unwrap().scale(&rat(k)))
        .unwrap()
        .add(&xi.mul(&eta).unwrap())
        .unwrap();
    Morphism::from_coordinate_pullbacks(sig.clone(), sig.clone(), vec![y], vec![alpha, beta, gamma])
        .unwrap()
}

fn sample_atlas(order: usize) -> Atlas {
    let sig = SuperdomainSignature::new(block_signature(order));
    let charts = vec![
        Chart { id: "A".into(), signature: sig.clone() },
        Chart { id: "B".into(), signature: sig.clone() },
        Chart { id: "C".into(), signature: sig.clone() },
    ];
    let phi_a = transformation(&sig, 1);
    let phi_b = transformation(&sig, 2);
    let phi_c = transformation(&sig, -1);
    let mut transitions = Vec::new();
    for (from, to, pf, pt) in [
        ("A", "B", &phi_a, &phi_b),
        ("B", "C", &phi_b, &phi_c),
        ("A", "C", &phi_a, &phi_c),
    ] {
        let forward = pf.compose(&pt.invert().unwrap()).unwrap();
        let backward = forward.invert().unwrap();
        transitions.push(Transition {
            from: from.into(),
            to: to.into(),
            forward,
            backward,
        });
    }
    Atlas::new(charts, transitions).unwrap()
}

#[test]
fn criterion_10_atlas_checks() {
    let mut c = Criterion::new(10, "atlas transition/cocycle checks", Some(5000));
    let atlas = sample_atlas(4);

    for t in atlas.transitions() {
        let report = check_transition(t).unwrap();
        c.check(report.passed(), || format!("{report}"));
    }
    for (a, b, g) in [("A", "B", "C"), ("A", "C", "B"), ("B", "C", "A"), ("C", "A", "B")] {
        let report = check_cocycle(&atlas, a, b, g).unwrap();
        c.check(report.passed(), || format!("{report}"));
    }

    // Perturbation 1: bump one coefficient of a backward morphism.
    let mut t0 = atlas.transitions()[0].clone();
    let sig = t0.backward.source().clone();
    let bump = Series::formal_variable(sig.formal(), 1).unwrap().scale(&frac(1, 9));
    let formal = vec![
        t0.backward.formal_pullbacks()[0].add(&bump).unwrap(),
        t0.backward.formal_pullbacks()[1].clone(),
        t0.backward.formal_pullbacks()[2].clone(),
    ];
    t0.backward = Morphism::from_coordinate_pullbacks(
        sig,
        t0.backward.target().clone(),
        t0.backward.base_pullbacks().to_vec(),
        formal,
    )
    .unwrap();
    let report = check_transition(&t0).unwrap();
    c.check(!report.passed(), || "perturbed transition still passes".into());
    c.check(report.to_string().contains("coordinate"), || {
        format!("perturbed transition lacks a located counterexample: {report}")
    });

    // Perturbation 2: flip the sign of an odd coordinate pullback.
    let mut transitions = atlas.transitions().to_vec();
    let t = &mut transitions[0];
    let formal = vec![
        t.forward.formal_pullbacks()[0].neg(),
        t.forward.formal_pullbacks()[1].clone(),
        t.forward.formal_pullbacks()[2].clone(),
    ];
    t.forward = Morphism::from_coordinate_pullbacks(
        t.forward.source().clone(),
        t.forward.target().clone(),
        t.forward.base_pullbacks().to_vec(),
        formal,
    )
    .unwrap();
    let flipped = Atlas::new(atlas.charts().to_vec(), transitions).unwrap();
    let report = check_cocycle(&flipped, "A", "B", "C").unwrap();
    c.check(!report.passed(), || "sign-flipped cocycle still passes".into());
    c.check(report.to_string().contains("t1"), || {
        format!("cocycle failure not located: {report}")
    });

    // Perturbation 3: witness with one mismatched degree block.
    let fs = atlas.chart("A").unwrap().signature.formal().clone();
    let on_a = Series::base_variable(&fs, 1)
        .unwrap()
        .mul(&Series::formal_variable(&fs, 3).unwrap())
        .unwrap()
        .add(&Series::one(&fs))
        .unwrap();
    let transported = |chart: &str| {
        atlas
            .morphism(chart, "A")
            .unwrap()
            .pullback(&on_a)
            .unwrap()
    };
    let good = SectionWitness {
        name: "transported".into(),
        locals: [
            ("A".to_string(), on_a.clone()),
            ("B".to_string(), transported("B")),
            ("C".to_string(), transported("C")),
        ]
        .into(),
    };
    for report in check_global_section(&atlas, &good).unwrap() {
        c.check(report.passed(), || format!("{report}"));
    }
    let mut locals = good.locals.clone();
    locals.insert("C".to_string(), Series::formal_variable(&fs, 1).unwrap());
    let broken = SectionWitness { name: "mismatched".into(), locals };
    let reports = check_global_section(&atlas, &broken).unwrap();
    c.check(reports.iter().any(|x| !x.passed()), || {
        "mismatched witness still passes".into()
    });

    c.finish();
}

#[test]
fn criterion_11_golden_roundtrip() {
    let mut c = Criterion::new(11, "parse-print-parse on the golden corpus", None);
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .expect("golden corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "session"))
        .collect();
    files.sort();
    c.check(files.len() >= 30, || {
        format!("golden corpus has only {} files", files.len())
    });
    for required in ["example_blocks.session", "example_transformation.session"] {
        c.check(files.iter().any(|f| f.ends_with(required)), || {
            format!("golden corpus lacks {required}")
        });
    }
    for file in &files {
        let text = std::fs::read_to_string(file).unwrap();
        let session = match parse_session(&text, None) {
            Ok(s) => s,
            Err(e) => {
                c.check(false, || format!("{}: {e}", file.display()));
                continue;
            }
        };
        for (name, series) in &session.definitions {
            let printed = series.to_string();
            match parse_series(&session.signature, &printed) {
                Ok(back) => c.check(back == *series, || {
                    format!(
                        "{}: `{name}` changed under round trip\n  printed: {printed}",
                        file.display()
                    )
                }),
                Err(e) => c.check(false, || {
                    format!("{}: `{name}` failed to re-parse `{printed}`: {e}", file.display())
                }),
            }
        }
    }
    c.finish();
}
