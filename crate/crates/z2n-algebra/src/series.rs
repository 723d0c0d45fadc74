//! Z2^n-commutative formal power series over jet coefficients, computed in
//! the quotient by the (T+1)-st power of the maximal homogeneous ideal at
//! the center.
//!
//! A series is a finite sum of (formal monomial, jet) terms subject to the
//! storage bound `valuation(jet) + |monomial| <= T`: everything of higher
//! adic order is identified with zero. The truncation order T is part of
//! the signature, and operations never mix orders. Formal variables carry
//! nonzero degrees; products resolve signs by stable insertion sorting of
//! the concatenated variable word, one Koszul factor per transposition, and
//! odd variables square to zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::grading::DegreeVector;
use crate::jet::{Jet, Valuation};
use crate::Rational;

/// The shape of a series algebra: grading length n, p base variables,
/// q formal variables with their nonzero degrees, and the truncation
/// order T shared by the whole computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSignature {
    grading_len: usize,
    base_vars: usize,
    degrees: Vec<DegreeVector>,
    order: usize,
}

impl FormalSignature {
    pub fn new(
        grading_len: usize,
        base_vars: usize,
        degrees: Vec<DegreeVector>,
        order: usize,
    ) -> Result<Self> {
        for (a, d) in degrees.iter().enumerate() {
            if d.len() != grading_len {
                return Err(Error::DegreeLengthMismatch {
                    left: grading_len,
                    right: d.len(),
                });
            }
            if d.is_zero() {
                return Err(Error::ZeroDegree { variable: a + 1 });
            }
        }
        Ok(FormalSignature {
            grading_len,
            base_vars,
            degrees,
            order,
        })
    }

    pub fn grading_len(&self) -> usize {
        self.grading_len
    }

    pub fn base_vars(&self) -> usize {
        self.base_vars
    }

    pub fn formal_vars(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[DegreeVector] {
        &self.degrees
    }

    /// Degree of the a-th formal variable, 1-based.
    pub fn degree_of(&self, a: usize) -> Result<&DegreeVector> {
        self.degrees.get(a - 1).ok_or(Error::VariableOutOfRange {
            index: a,
            count: self.degrees.len(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Same signature at a different truncation order.
    pub fn with_order(&self, order: usize) -> FormalSignature {
        FormalSignature {
            order,
            ..self.clone()
        }
    }

    /// How many formal variables carry each occurring degree, listed in
    /// lexicographic degree order. Together with `base_vars` this is the
    /// dimension of the superdomain.
    pub fn multiplicities(&self) -> Vec<(DegreeVector, usize)> {
        let mut counts: BTreeMap<DegreeVector, usize> = BTreeMap::new();
        for d in &self.degrees {
            *counts.entry(d.clone()).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }

    /// The full dimension vector: for each of the 2^n - 1 nonzero degrees
    /// in lexicographic order, how many formal variables carry it. Only
    /// sensible for small grading lengths; callers with n above 16 should
    /// use [`FormalSignature::multiplicities`] instead.
    pub fn dimension_counts(&self) -> Vec<usize> {
        assert!(self.grading_len <= 16, "dimension vector too large");
        let n = self.grading_len;
        (1u32..(1 << n))
            .map(|v| {
                let bits: Vec<u8> = (0..n).map(|t| ((v >> (n - 1 - t)) & 1) as u8).collect();
                let d = DegreeVector::new(bits);
                self.degrees.iter().filter(|&x| *x == d).count()
            })
            .collect()
    }

    fn zero_degree(&self) -> DegreeVector {
        DegreeVector::zero(self.grading_len)
    }
}

/// A formal monomial: one exponent per formal variable, with exponents of
/// odd variables at most 1. Ordered by (total exponent, then lex).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    /// The empty monomial on q variables.
    pub fn unit(q: usize) -> Self {
        Monomial(vec![0; q])
    }

    /// The single variable `xi_a`, 1-based.
    pub fn variable(q: usize, a: usize) -> Result<Self> {
        if a == 0 || a > q {
            return Err(Error::VariableOutOfRange { index: a, count: q });
        }
        let mut e = vec![0; q];
        e[a - 1] = 1;
        Ok(Monomial(e))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// The number of formal generators `|mu|`.
    pub fn weight(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// The Z2^n-degree `sum mu_a * sigma_a`.
    pub fn degree(&self, signature: &FormalSignature) -> DegreeVector {
        let mut acc = signature.zero_degree();
        for (a, &e) in self.0.iter().enumerate() {
            if e % 2 == 1 {
                acc = acc
                    .add(&signature.degrees[a])
                    .expect("signature degrees share one length");
            }
        }
        acc
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of the quotient algebra: finitely many (monomial, jet) terms
/// in canonical form, under one signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    signature: FormalSignature,
    terms: BTreeMap<Monomial, Jet>,
}

impl Series {
    pub fn zero(signature: &FormalSignature) -> Self {
        Series {
            signature: signature.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(signature: &FormalSignature) -> Self {
        Series::constant(signature, Rational::one())
    }

    pub fn constant(signature: &FormalSignature, c: Rational) -> Self {
        let jet = Jet::constant(signature.base_vars, signature.order, c);
        let mut s = Series::zero(signature);
        s.accumulate(Monomial::unit(signature.formal_vars()), jet);
        s
    }

    /// Embeds a jet as the coefficient of the empty monomial.
    pub fn from_jet(signature: &FormalSignature, jet: Jet) -> Result<Self> {
        let mut s = Series::zero(signature);
        s.check_jet(&jet)?;
        s.accumulate(Monomial::unit(signature.formal_vars()), jet);
        Ok(s)
    }

    /// The base coordinate `x_i` as a series (1-based).
    pub fn base_variable(signature: &FormalSignature, i: usize) -> Result<Self> {
        let jet = Jet::variable(signature.base_vars, signature.order, i)?;
        Series::from_jet(signature, jet)
    }

    /// The formal variable `xi_a` as a series (1-based).
    pub fn formal_variable(signature: &FormalSignature, a: usize) -> Result<Self> {
        let m = Monomial::variable(signature.formal_vars(), a)?;
        let mut s = Series::zero(signature);
        s.accumulate(m, Jet::one(signature.base_vars, signature.order));
        Ok(s)
    }

    /// Normalizing constructor: validates monomials against the signature,
    /// accumulates duplicates and applies the storage truncation.
    pub fn from_terms(
        signature: &FormalSignature,
        terms: impl IntoIterator<Item = (Monomial, Jet)>,
    ) -> Result<Self> {
        let mut s = Series::zero(signature);
        for (m, jet) in terms {
            s.check_monomial(&m)?;
            s.check_jet(&jet)?;
            s.accumulate(m, jet);
        }
        Ok(s)
    }

    fn check_monomial(&self, m: &Monomial) -> Result<()> {
        let q = self.signature.formal_vars();
        if m.0.len() != q {
            return Err(Error::ArityMismatch {
                expected: q,
                found: m.0.len(),
            });
        }
        for (a, &e) in m.0.iter().enumerate() {
            if e > 1 && self.signature.degrees[a].is_odd() {
                return Err(Error::OddExponent { variable: a + 1 });
            }
        }
        Ok(())
    }

    fn check_jet(&self, jet: &Jet) -> Result<()> {
        if jet.vars() != self.signature.base_vars || jet.order() != self.signature.order {
            return Err(Error::JetShapeMismatch {
                expected_vars: self.signature.base_vars,
                expected_order: self.signature.order,
                found_vars: jet.vars(),
                found_order: jet.order(),
            });
        }
        Ok(())
    }

    /// Adds a term, clipping the jet to the storage bound for the weight of
    /// the monomial and dropping the term when nothing is left.
    fn accumulate(&mut self, m: Monomial, jet: Jet) {
        let weight = m.weight();
        if weight > self.signature.order {
            return;
        }
        let clipped = jet.drop_above_degree(self.signature.order - weight);
        if clipped.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(clipped);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&clipped).expect("stored jets share one shape");
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn signature(&self) -> &FormalSignature {
        &self.signature
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterates terms in canonical (weight, then lex) monomial order.
    pub fn iter_terms(&self) -> impl Iterator<Item = (&Monomial, &Jet)> {
        self.terms.iter()
    }

    /// The jet attached to a monomial (zero if absent).
    pub fn coefficient(&self, m: &Monomial) -> Jet {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| Jet::zero(self.signature.base_vars, self.signature.order))
    }

    fn signature_check(&self, other: &Series) -> Result<()> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.signature_check(other)?;
        let mut out = self.clone();
        for (m, jet) in &other.terms {
            out.accumulate(m.clone(), jet.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series {
        let mut out = self.clone();
        for jet in out.terms.values_mut() {
            *jet = jet.neg();
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Series {
        if s.is_zero() {
            return Series::zero(&self.signature);
        }
        let mut out = self.clone();
        for jet in out.terms.values_mut() {
            *jet = jet.scale(s);
        }
        out
    }

    /// The graded product. Monomial words are concatenated and brought to
    /// normal form by stable insertion sort, one Koszul sign per adjacent
    /// transposition; odd squares annihilate; the result is truncated at
    /// the storage bound.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.signature_check(other)?;
        let sig = &self.signature;
        let mut out = Series::zero(sig);
        for (mu, f) in &self.terms {
            for (nu, g) in &other.terms {
                if mu.weight() + nu.weight() > sig.order {
                    continue;
                }
                let annihilates = mu
                    .0
                    .iter()
                    .zip(&nu.0)
                    .enumerate()
                    .any(|(a, (&x, &y))| x + y > 1 && sig.degrees[a].is_odd());
                if annihilates {
                    continue;
                }
                let sign = koszul_sort_sign(sig, mu, nu);
                let mut jet = f.mul(g)?;
                if sign < 0 {
                    jet = jet.neg();
                }
                let merged = Monomial(mu.0.iter().zip(&nu.0).map(|(x, y)| x + y).collect());
                out.accumulate(merged, jet);
            }
        }
        Ok(out)
    }

    /// Splits into homogeneous pieces keyed by Z2^n-degree. The sum of the
    /// components is the series; jets are of degree zero, so the degree of
    /// a term is the degree of its monomial.
    pub fn homogeneous_components(&self) -> BTreeMap<DegreeVector, Series> {
        let mut out: BTreeMap<DegreeVector, Series> = BTreeMap::new();
        for (m, jet) in &self.terms {
            let d = m.degree(&self.signature);
            out.entry(d)
                .or_insert_with(|| Series::zero(&self.signature))
                .accumulate(m.clone(), jet.clone());
        }
        out
    }

    /// True when every stored monomial has the given degree. The zero
    /// series is homogeneous of every degree.
    pub fn is_homogeneous_of(&self, degree: &DegreeVector) -> bool {
        self.terms
            .keys()
            .all(|m| m.degree(&self.signature) == *degree)
    }

    /// The common degree of all terms. By convention the zero series
    /// reports the zero degree (it is homogeneous of every degree).
    pub fn degree(&self) -> Result<DegreeVector> {
        let mut keys = self.terms.keys();
        let first = match keys.next() {
            None => return Ok(self.signature.zero_degree()),
            Some(m) => m.degree(&self.signature),
        };
        for m in keys {
            if m.degree(&self.signature) != first {
                return Err(Error::NotHomogeneous);
            }
        }
        Ok(first)
    }

    /// Sets all formal variables to zero: the jet attached to the empty
    /// monomial. This is the projection onto the base, a unital algebra
    /// morphism with kernel the terms of positive formal weight.
    pub fn base_projection(&self) -> Jet {
        self.coefficient(&Monomial::unit(self.signature.formal_vars()))
    }

    /// Minimal number of formal generators over the stored terms; infinity
    /// for zero. This is the order of the filtration by the ideal
    /// generated by the formal variables.
    pub fn j_adic_order(&self) -> Valuation {
        match self.terms.keys().next() {
            Some(m) => Valuation::Finite(m.weight()),
            None => Valuation::Infinite,
        }
    }

    /// Minimal (jet valuation + formal weight) over the stored terms;
    /// infinity for zero. This is the induced valuation of the filtration
    /// by the maximal homogeneous ideal at the center.
    pub fn m_adic_order(&self) -> Valuation {
        self.terms
            .iter()
            .map(|(m, jet)| jet.valuation().plus(m.weight()))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// Multiplicative inverse, exact in the quotient. With `c` the value
    /// of the independent term at the center, `w = c(1 - v)` where `v`
    /// has positive adic order, so `w^-1 = c^-1 sum_k v^k` terminates.
    /// Fails exactly when the independent term vanishes at the center.
    pub fn invert(&self) -> Result<Series> {
        let c = self.base_projection().constant_term();
        if c.is_zero() {
            return Err(Error::NotInvertible);
        }
        let c_inv = c.recip();
        let v = Series::one(&self.signature).sub(&self.scale(&c_inv))?;
        let mut sum = Series::one(&self.signature);
        let mut power = v.clone();
        while !power.is_zero() {
            sum = sum.add(&power)?;
            power = power.mul(&v)?;
        }
        Ok(sum.scale(&c_inv))
    }

    /// The polynomial part of the Taylor split at adic order `k`: keeps,
    /// for each monomial of weight below `k`, the jet terms of base degree
    /// below `k - weight`. The remainder `self - P` has adic order at
    /// least `k`, and the coefficients of `P` are polynomials of base
    /// degree below `k`.
    pub fn polynomial_approximation(&self, k: usize) -> Result<Series> {
        if k == 0 {
            return Err(Error::ZeroApproximationDegree);
        }
        if k > self.signature.order {
            return Err(Error::OrderExceeded {
                requested: k,
                maximum: self.signature.order,
            });
        }
        let mut out = Series::zero(&self.signature);
        for (m, jet) in &self.terms {
            let w = m.weight();
            if w >= k {
                continue;
            }
            out.accumulate(m.clone(), jet.drop_above_degree(k - 1 - w));
        }
        Ok(out)
    }

    /// Passes to the quotient at a smaller truncation order: drops every
    /// term and jet contribution of adic order above `order`.
    pub fn truncate(&self, order: usize) -> Result<Series> {
        if order > self.signature.order {
            return Err(Error::OrderExceeded {
                requested: order,
                maximum: self.signature.order,
            });
        }
        let target = self.signature.with_order(order);
        let mut out = Series::zero(&target);
        for (m, jet) in &self.terms {
            if m.weight() > order {
                continue;
            }
            let jet = jet
                .truncate(order)
                .expect("target order is within the stored order");
            out.accumulate(m.clone(), jet);
        }
        Ok(out)
    }
}

/// Stable insertion sort of the concatenated variable word, accumulating
/// one scalar-product exponent per adjacent transposition. Indices are
/// 0-based positions into the signature degrees.
fn koszul_sort_sign(sig: &FormalSignature, left: &Monomial, right: &Monomial) -> i8 {
    let mut word: Vec<usize> = Vec::with_capacity(left.weight() + right.weight());
    for m in [left, right] {
        for (a, &e) in m.0.iter().enumerate() {
            for _ in 0..e {
                word.push(a);
            }
        }
    }
    let mut exponent = 0u8;
    for i in 1..word.len() {
        let mut j = i;
        while j > 0 && word[j - 1] > word[j] {
            exponent ^= sig.degrees[word[j - 1]]
                .scalar_product(&sig.degrees[word[j]])
                .expect("signature degrees share one length");
            word.swap(j - 1, j);
            j -= 1;
        }
    }
    if exponent == 0 {
        1
    } else {
        -1
    }
}
