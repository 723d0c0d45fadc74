//! Canonical text form for jets and series.
//!
//! The format is deterministic so that printed output can be used in
//! golden tests and re-ingested losslessly: series terms are listed by
//! (formal weight, then lex exponents), jet terms by graded-lex exponents,
//! rationals as `num` or `num/den`. Sums are joined by ` + ` with negative
//! coefficients carrying a leading `-`, which keeps every printed string
//! inside the expression grammar of the parser.

use std::fmt;

use num::{One, Zero};

use crate::grading::DegreeAssignment;
use crate::jet::Jet;
use crate::series::{Monomial, Series};
use crate::Rational;

pub(crate) fn rational_string(c: &Rational) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn power_string(prefix: &str, index: usize, exponent: u32) -> String {
    if exponent == 1 {
        format!("{prefix}{index}")
    } else {
        format!("{prefix}{index}^{exponent}")
    }
}

fn monomial_string(prefix: &str, exponents: &[u32]) -> String {
    let factors: Vec<String> = exponents
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| power_string(prefix, i + 1, e))
        .collect();
    factors.join("*")
}

fn jet_term_string(exponents: &[u32], c: &Rational) -> String {
    let mono = monomial_string("x", exponents);
    if mono.is_empty() {
        rational_string(c)
    } else if c.is_one() {
        mono
    } else if (-c).is_one() {
        format!("-{mono}")
    } else {
        format!("{}*{}", rational_string(c), mono)
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .iter_terms()
            .map(|(e, c)| jet_term_string(e, c))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            write!(f, "1")
        } else {
            write!(f, "{}", monomial_string("t", self.exponents()))
        }
    }
}

/// True when the jet is a bare rational constant.
fn constant_of(jet: &Jet) -> Option<Rational> {
    if jet.num_terms() == 1 {
        let (e, c) = jet.iter_terms().next().expect("one term");
        if e.iter().all(|&k| k == 0) {
            return Some(c.clone());
        }
    }
    if jet.is_zero() {
        return Some(Rational::zero());
    }
    None
}

fn series_term_string(m: &Monomial, jet: &Jet) -> String {
    if m.is_unit() {
        return jet.to_string();
    }
    match constant_of(jet) {
        Some(c) if c.is_one() => m.to_string(),
        Some(c) if (-&c).is_one() => format!("-{m}"),
        Some(c) => format!("{} * {m}", rational_string(&c)),
        None => format!("({jet}) * {m}"),
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .iter_terms()
            .map(|(m, jet)| series_term_string(m, jet))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// The first stored term of a series in canonical order, as text. Used by
/// verification reports to name a counterexample.
pub fn leading_term(s: &Series) -> String {
    match s.iter_terms().next() {
        None => "0".to_string(),
        Some((m, jet)) => {
            let lead = Jet::from_terms(
                jet.vars(),
                jet.order(),
                jet.iter_terms()
                    .take(1)
                    .map(|(e, c)| (e.to_vec(), c.clone())),
            )
            .expect("term taken from a valid jet");
            series_term_string(m, &lead)
        }
    }
}

impl fmt::Display for DegreeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, d) in self.degrees().iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            let bits: Vec<String> = d.bits().iter().map(|b| b.to_string()).collect();
            write!(f, "sigma.{} = {}", k + 1, bits.join(" "))?;
        }
        Ok(())
    }
}
