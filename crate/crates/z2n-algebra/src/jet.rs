//! The coefficient ring: jets, i.e. polynomials in the base variables
//! truncated at a total degree bound, over exact rationals.
//!
//! A jet models the germ of a smooth coefficient at a centered base point
//! through its Taylor polynomial. Coefficients are never floats: equality
//! checks are exact, and every operation (product, composition, inversion)
//! is exact within the truncation order.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// The minimal total degree of a term, or infinity for zero.
///
/// Used both for jet valuations and for the adic orders of series; the
/// derived ordering puts every finite value below `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(usize),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<usize> {
        match self {
            Valuation::Finite(k) => Some(k),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// Adds a constant shift, absorbing it into infinity.
    pub fn plus(self, k: usize) -> Valuation {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v + k),
            Valuation::Infinite => Valuation::Infinite,
        }
    }

}

impl std::ops::Add for Valuation {
    type Output = Valuation;

    /// Sum of two valuations (infinite absorbs).
    fn add(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl std::fmt::Display for Valuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Valuation::Finite(k) => write!(f, "{k}"),
            Valuation::Infinite => write!(f, "infinity"),
        }
    }
}

/// Exponent vector ordered by (total degree, then lexicographic).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Exponents(pub Vec<u32>);

impl Exponents {
    pub fn total(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A truncated polynomial in `vars` base variables: finitely many
/// (exponent vector, rational) terms of total degree at most `order`.
///
/// No zero coefficients are stored, and two jets are equal iff they have
/// the same variable count, the same truncation order and the same terms.
/// Mixing truncation orders is an error, never a silent coercion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Jet {
    vars: usize,
    order: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl Jet {
    pub fn zero(vars: usize, order: usize) -> Self {
        Jet {
            vars,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: usize, order: usize) -> Self {
        Jet::constant(vars, order, Rational::one())
    }

    pub fn constant(vars: usize, order: usize, c: Rational) -> Self {
        let mut jet = Jet::zero(vars, order);
        if !c.is_zero() {
            jet.terms.insert(Exponents(vec![0; vars]), c);
        }
        jet
    }

    /// The coordinate jet `x_i` (1-based index). Truncates to zero when
    /// `order` is 0.
    pub fn variable(vars: usize, order: usize, i: usize) -> Result<Self> {
        if i == 0 || i > vars {
            return Err(Error::VariableOutOfRange {
                index: i,
                count: vars,
            });
        }
        let mut jet = Jet::zero(vars, order);
        if order >= 1 {
            let mut e = vec![0; vars];
            e[i - 1] = 1;
            jet.terms.insert(Exponents(e), Rational::one());
        }
        Ok(jet)
    }

    /// Normalizing constructor: accumulates duplicate exponents, drops zero
    /// coefficients and terms beyond the truncation order.
    pub fn from_terms(
        vars: usize,
        order: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self> {
        let mut jet = Jet::zero(vars, order);
        for (e, c) in terms {
            if e.len() != vars {
                return Err(Error::ArityMismatch {
                    expected: vars,
                    found: e.len(),
                });
            }
            jet.accumulate(Exponents(e), c);
        }
        Ok(jet)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates terms in graded-lex order of the exponents.
    pub fn iter_terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.0.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The coefficient attached to an exponent vector (zero if absent).
    pub fn coefficient(&self, exponents: &[u32]) -> Rational {
        debug_assert_eq!(exponents.len(), self.vars);
        self.terms
            .get(&Exponents(exponents.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// The independent (degree-0) term.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&vec![0; self.vars])
    }

    fn shape_check(&self, other: &Jet) -> Result<()> {
        if self.vars != other.vars || self.order != other.order {
            return Err(Error::JetShapeMismatch {
                expected_vars: self.vars,
                expected_order: self.order,
                found_vars: other.vars,
                found_order: other.order,
            });
        }
        Ok(())
    }

    fn accumulate(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() || e.total() > self.order {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.shape_check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.accumulate(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Jet {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -&*c;
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Jet {
        if s.is_zero() {
            return Jet::zero(self.vars, self.order);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = &*c * s;
        }
        out
    }

    /// Polynomial product; terms of total degree beyond the truncation
    /// order are discarded.
    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.shape_check(other)?;
        let mut out = Jet::zero(self.vars, self.order);
        for (ea, ca) in &self.terms {
            let da = ea.total();
            for (eb, cb) in &other.terms {
                if da + eb.total() > self.order {
                    continue;
                }
                let e = Exponents(ea.0.iter().zip(&eb.0).map(|(a, b)| a + b).collect());
                out.accumulate(e, ca * cb);
            }
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to `x_i` (1-based). The
    /// truncation order is kept unchanged, so the top-degree information
    /// of the operand is lost by one degree.
    pub fn derivative(&self, i: usize) -> Result<Jet> {
        if i == 0 || i > self.vars {
            return Err(Error::VariableOutOfRange {
                index: i,
                count: self.vars,
            });
        }
        let mut out = Jet::zero(self.vars, self.order);
        for (e, c) in &self.terms {
            let k = e.0[i - 1];
            if k == 0 {
                continue;
            }
            let mut d = e.0.clone();
            d[i - 1] = k - 1;
            out.accumulate(Exponents(d), c * Rational::from_integer(k.into()));
        }
        Ok(out)
    }

    /// Substitutes the `args` (one per variable of `self`, each with zero
    /// constant term) and truncates. Centered composition keeps the result
    /// exact within the truncation order.
    pub fn compose(&self, args: &[Jet]) -> Result<Jet> {
        if args.len() != self.vars {
            return Err(Error::ArityMismatch {
                expected: self.vars,
                found: args.len(),
            });
        }
        let (out_vars, out_order) = match args.first() {
            Some(a) => (a.vars, a.order),
            None => (0, self.order),
        };
        for a in args {
            if a.vars != out_vars || a.order != self.order {
                return Err(Error::JetShapeMismatch {
                    expected_vars: out_vars,
                    expected_order: self.order,
                    found_vars: a.vars,
                    found_order: a.order,
                });
            }
            if !a.constant_term().is_zero() {
                return Err(Error::NonzeroConstantTerm);
            }
        }
        // Memoized powers; args have valuation >= 1, so powers die out.
        let mut powers: Vec<Vec<Jet>> = args
            .iter()
            .map(|a| vec![Jet::one(out_vars, out_order), a.clone()])
            .collect();
        let power = |j: usize, k: usize, powers: &mut Vec<Vec<Jet>>| -> Jet {
            while powers[j].len() <= k {
                let last = powers[j].last().unwrap();
                let next = last.mul(&powers[j][1]).expect("powers share one shape");
                powers[j].push(next);
            }
            powers[j][k].clone()
        };
        let mut out = Jet::zero(out_vars, out_order);
        for (e, c) in &self.terms {
            let mut term = Jet::constant(out_vars, out_order, c.clone());
            for (j, &k) in e.0.iter().enumerate() {
                if k == 0 || term.is_zero() {
                    continue;
                }
                term = term.mul(&power(j, k as usize, &mut powers))?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Multiplicative inverse, exact within the truncation order. The jet
    /// `w = c(1 - u)` with nonzero constant `c` has inverse
    /// `c^-1 * sum_k u^k`; the sum terminates because `u` has valuation
    /// at least 1.
    pub fn invert(&self) -> Result<Jet> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::NotInvertible);
        }
        let c_inv = c.recip();
        let u = Jet::one(self.vars, self.order).sub(&self.scale(&c_inv))?;
        let mut sum = Jet::one(self.vars, self.order);
        let mut power = u.clone();
        while !power.is_zero() {
            sum = sum.add(&power)?;
            power = power.mul(&u)?;
        }
        Ok(sum.scale(&c_inv))
    }

    /// Minimal total degree of a stored term; infinity for the zero jet.
    pub fn valuation(&self) -> Valuation {
        match self.terms.keys().next() {
            Some(e) => Valuation::Finite(e.total()),
            None => Valuation::Infinite,
        }
    }

    /// Re-truncates to a smaller order, dropping the higher terms.
    pub fn truncate(&self, order: usize) -> Result<Jet> {
        if order > self.order {
            return Err(Error::OrderExceeded {
                requested: order,
                maximum: self.order,
            });
        }
        let mut out = Jet::zero(self.vars, order);
        for (e, c) in &self.terms {
            if e.total() <= order {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// Drops terms of total degree above `degree`, keeping the truncation
    /// order. Used by the series layer to enforce the combined bound
    /// (base valuation + formal weight <= order) per term.
    pub(crate) fn drop_above_degree(&self, degree: usize) -> Jet {
        let mut out = Jet::zero(self.vars, self.order);
        for (e, c) in &self.terms {
            if e.total() <= degree {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

}
