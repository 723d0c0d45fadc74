//! Shared generators and independent oracles for the integration suites.
//!
//! Everything is seeded: reruns are deterministic. The oracles here
//! deliberately take different routes than the library (explicit Taylor
//! sums via derivatives, word rewriting) so that agreement is evidence.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use z2n_algebra::{
    frac, DegreeVector, FormalSignature, Jet, Monomial, Morphism, Series, SignTable,
    SuperdomainSignature,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dv(bits: &[u8]) -> DegreeVector {
    DegreeVector::new(bits.iter().copied())
}

/// The 1|1|1|1 signature over Z2^2: base x1, formal (t1, t2, t3) of
/// degrees (0,1), (1,0), (1,1).
pub fn block_signature(order: usize) -> FormalSignature {
    FormalSignature::new(2, 1, vec![dv(&[0, 1]), dv(&[1, 0]), dv(&[1, 1])], order).unwrap()
}

/// Quaternion-type grading over Z2^3 with no base variables.
pub fn quaternion_signature(order: usize) -> FormalSignature {
    FormalSignature::new(
        3,
        0,
        vec![dv(&[1, 1, 0]), dv(&[1, 0, 1]), dv(&[0, 1, 1])],
        order,
    )
    .unwrap()
}

pub fn random_nonzero_degree(rng: &mut ChaCha8Rng, n: usize) -> DegreeVector {
    loop {
        let bits: Vec<u8> = (0..n).map(|_| rng.random_range(0..=1)).collect();
        let d = DegreeVector::new(bits);
        if !d.is_zero() {
            return d;
        }
    }
}

pub fn random_signature(rng: &mut ChaCha8Rng, max_q: usize, order: usize) -> FormalSignature {
    let n = rng.random_range(1..=3);
    let p = rng.random_range(0..=2);
    let q = rng.random_range(1..=max_q);
    let degrees = (0..q).map(|_| random_nonzero_degree(rng, n)).collect();
    FormalSignature::new(n, p, degrees, order).unwrap()
}

pub fn random_symmetric_sign_table(rng: &mut ChaCha8Rng, m: usize) -> SignTable {
    let mut upper = Vec::new();
    for i in 1..=m {
        for j in i..=m {
            upper.push((i, j, if rng.random_bool(0.5) { 1 } else { -1 }));
        }
    }
    SignTable::from_upper_triangle(m, upper).unwrap()
}

/// Sparse random jet with small rational coefficients.
pub fn random_jet(rng: &mut ChaCha8Rng, vars: usize, order: usize, max_terms: usize) -> Jet {
    let mut terms = Vec::new();
    for _ in 0..rng.random_range(1..=max_terms.max(1)) {
        let mut budget = order as u32;
        let e: Vec<u32> = (0..vars)
            .map(|_| {
                let k = rng.random_range(0..=budget.min(2));
                budget -= k;
                k
            })
            .collect();
        let num = loop {
            let n = rng.random_range(-5i64..=5);
            if n != 0 {
                break n;
            }
        };
        let den = rng.random_range(1i64..=3);
        terms.push((e, frac(num, den)));
    }
    Jet::from_terms(vars, order, terms).unwrap()
}

/// Random monomial respecting the odd-exponent bound, with weight at most
/// `max_weight`.
pub fn random_monomial(rng: &mut ChaCha8Rng, sig: &FormalSignature, max_weight: usize) -> Monomial {
    let q = sig.formal_vars();
    let mut e = vec![0u32; q];
    let mut budget = max_weight.min(sig.order());
    for (slot, degree) in e.iter_mut().zip(sig.degrees()) {
        if budget == 0 {
            break;
        }
        let cap = if degree.is_odd() { 1 } else { budget.min(2) };
        let k = rng.random_range(0..=cap as u32);
        *slot = k;
        budget -= k as usize;
    }
    Monomial::new(e)
}

/// Rejection-samples a monomial of the exact degree, weight at least
/// `min_weight`; `None` if the degree never came up.
pub fn random_monomial_of_degree(
    rng: &mut ChaCha8Rng,
    sig: &FormalSignature,
    degree: &DegreeVector,
    min_weight: usize,
) -> Option<Monomial> {
    for _ in 0..60 {
        let m = random_monomial(rng, sig, sig.order().min(4));
        if m.weight() >= min_weight && m.degree(sig) == *degree {
            return Some(m);
        }
    }
    None
}

/// Sparse random series with a handful of terms.
pub fn random_series(rng: &mut ChaCha8Rng, sig: &FormalSignature, max_terms: usize) -> Series {
    let mut terms = Vec::new();
    for _ in 0..rng.random_range(1..=max_terms.max(1)) {
        let m = random_monomial(rng, sig, sig.order());
        // keep the attached jet inside the storage bound most of the time
        let headroom = sig.order().saturating_sub(m.weight());
        let jet = random_jet(rng, sig.base_vars(), headroom.min(sig.order()), 3);
        let jet = Jet::from_terms(
            sig.base_vars(),
            sig.order(),
            jet.iter_terms().map(|(e, c)| (e.to_vec(), c.clone())),
        )
        .unwrap();
        terms.push((m, jet));
    }
    Series::from_terms(sig, terms).unwrap()
}

/// Random series all of whose monomials carry one fixed degree.
pub fn random_homogeneous_series(
    rng: &mut ChaCha8Rng,
    sig: &FormalSignature,
    degree: &DegreeVector,
    max_terms: usize,
    min_weight: usize,
) -> Series {
    let mut terms = Vec::new();
    for _ in 0..max_terms {
        if let Some(m) = random_monomial_of_degree(rng, sig, degree, min_weight) {
            let jet = random_jet(rng, sig.base_vars(), sig.order(), 2);
            terms.push((m, jet));
        }
    }
    Series::from_terms(sig, terms).unwrap()
}

/// Random centered morphism between superdomains sharing n and T.
pub fn random_centered_morphism(
    rng: &mut ChaCha8Rng,
    source: &SuperdomainSignature,
    target: &SuperdomainSignature,
) -> Morphism {
    let src = source.formal();
    let tgt = target.formal();
    let zero_degree = DegreeVector::zero(src.grading_len());
    let base = (0..tgt.base_vars())
        .map(|_| {
            // centered jet part on the empty monomial
            let jet = random_jet(rng, src.base_vars(), src.order(), 3);
            let centered = jet
                .sub(&Jet::constant(
                    src.base_vars(),
                    src.order(),
                    jet.constant_term(),
                ))
                .unwrap();
            let mut s = Series::from_jet(src, centered).unwrap();
            // plus a couple of degree-0 formal terms
            for _ in 0..2 {
                if let Some(m) = random_monomial_of_degree(rng, src, &zero_degree, 1) {
                    let jet = random_jet(rng, src.base_vars(), src.order(), 2);
                    s = s
                        .add(&Series::from_terms(src, [(m, jet)]).unwrap())
                        .unwrap();
                }
            }
            s
        })
        .collect();
    let formal = (0..tgt.formal_vars())
        .map(|b| {
            let tau = tgt.degree_of(b + 1).unwrap().clone();
            random_homogeneous_series(rng, src, &tau, 3, 0)
        })
        .collect();
    Morphism::from_coordinate_pullbacks(source.clone(), target.clone(), base, formal)
        .expect("generated pullbacks are valid by construction")
}

/// Composes a jet with argument jets, embedding the result in `vars`
/// variables even when the jet has no variables of its own.
pub fn compose_into(jet: &Jet, args: &[Jet], vars: usize, order: usize) -> Jet {
    if args.is_empty() {
        return Jet::constant(vars, order, jet.constant_term());
    }
    jet.compose(args).unwrap()
}

/// Independent route for the coefficient pullback: the explicit Taylor sum
/// over multi-indices of derivative jets times powers of the formal parts,
/// computed with jet derivatives only.
pub fn taylor_coefficient_pullback(m: &Morphism, g_nu: &Jet) -> Series {
    let src = m.source().formal();
    let u = m.target().formal().base_vars();
    let phi = m.base_map();
    // j^i = s^i minus its own base jet: the formal part of each pullback
    let j_parts: Vec<Series> = m
        .base_pullbacks()
        .iter()
        .zip(phi)
        .map(|(s, f)| s.sub(&Series::from_jet(src, f.clone()).unwrap()).unwrap())
        .collect();

    let mut acc = Series::zero(src);
    let mut alpha = vec![0u32; u];
    taylor_walk(m, g_nu, phi, &j_parts, &mut alpha, 0, g_nu.order() as u32, &mut acc);
    acc
}

#[allow(clippy::too_many_arguments)]
fn taylor_walk(
    m: &Morphism,
    g_nu: &Jet,
    phi: &[Jet],
    j_parts: &[Series],
    alpha: &mut [u32],
    slot: usize,
    budget: u32,
    acc: &mut Series,
) {
    let src = m.source().formal();
    if slot == alpha.len() {
        // (1/alpha!) d^alpha g_nu, evaluated along the base map
        let mut d = g_nu.clone();
        let mut factorial = z2n_algebra::rat(1);
        for (i, &k) in alpha.iter().enumerate() {
            for step in 1..=k {
                d = d.derivative(i + 1).unwrap();
                factorial *= z2n_algebra::rat(step as i64);
            }
        }
        if d.is_zero() {
            return;
        }
        let coeff = compose_into(&d, phi, src.base_vars(), src.order())
            .scale(&factorial.recip());
        let mut term = Series::from_jet(src, coeff).unwrap();
        for (i, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                if term.is_zero() {
                    return;
                }
                term = term.mul(&j_parts[i]).unwrap();
            }
        }
        *acc = acc.add(&term).unwrap();
        return;
    }
    for k in 0..=budget {
        alpha[slot] = k;
        taylor_walk(m, g_nu, phi, j_parts, alpha, slot + 1, budget - k, acc);
    }
    alpha[slot] = 0;
}

/// Symbolic expression trees over one signature, evaluated at any order.
/// Leaves store raw term data so the same tree can be ingested at
/// different truncation orders.
/// Raw data of one leaf term: formal exponents plus jet terms given as
/// (base exponents, numerator, denominator).
pub type LeafTerm = (Vec<u32>, Vec<(Vec<u32>, i64, i64)>);

#[derive(Debug, Clone)]
pub enum Expr {
    Leaf(Vec<LeafTerm>),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Inv(Box<Expr>),
}

pub fn random_expr(rng: &mut ChaCha8Rng, sig: &FormalSignature, depth: usize) -> Expr {
    if depth == 0 || rng.random_range(0..4) == 0 {
        let mut terms = Vec::new();
        for _ in 0..rng.random_range(1..=3) {
            let m = random_monomial(rng, sig, 3);
            let mut jet_terms = Vec::new();
            for _ in 0..rng.random_range(0..=2) {
                let e: Vec<u32> = (0..sig.base_vars()).map(|_| rng.random_range(0..=2)).collect();
                jet_terms.push((e, rng.random_range(-4i64..=4), rng.random_range(1i64..=3)));
            }
            terms.push((m.exponents().to_vec(), jet_terms));
        }
        return Expr::Leaf(terms);
    }
    let a = Box::new(random_expr(rng, sig, depth - 1));
    match rng.random_range(0..3) {
        0 => Expr::Add(a, Box::new(random_expr(rng, sig, depth - 1))),
        1 => Expr::Mul(a, Box::new(random_expr(rng, sig, depth - 1))),
        _ => Expr::Inv(a),
    }
}

/// Evaluates a tree in the quotient at the order carried by `sig`.
/// Inversion operands are shifted by 1 when their center value is zero;
/// the shift depends only on the operand's constant term, which truncation
/// never changes, so evaluation commutes with passing to a smaller order.
pub fn eval_expr(expr: &Expr, sig: &FormalSignature) -> Series {
    match expr {
        Expr::Leaf(terms) => {
            let mapped = terms.iter().map(|(m, jet_terms)| {
                let jet = Jet::from_terms(
                    sig.base_vars(),
                    sig.order(),
                    jet_terms.iter().map(|(e, n, d)| (e.clone(), frac(*n, *d))),
                )
                .unwrap();
                (Monomial::new(m.clone()), jet)
            });
            Series::from_terms(sig, mapped).unwrap()
        }
        Expr::Add(a, b) => eval_expr(a, sig).add(&eval_expr(b, sig)).unwrap(),
        Expr::Mul(a, b) => eval_expr(a, sig).mul(&eval_expr(b, sig)).unwrap(),
        Expr::Inv(a) => {
            let mut v = eval_expr(a, sig);
            if num::Zero::is_zero(&v.base_projection().constant_term()) {
                v = v.add(&Series::one(sig)).unwrap();
            }
            v.invert().unwrap()
        }
    }
}
