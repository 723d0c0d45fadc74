//! Brute-force product oracle, structurally independent of the main
//! multiplication path.
//!
//! Each monomial is expanded into a word of variable indices. The product
//! word is normalized by rewriting: scan for the leftmost reducible spot,
//! either an out-of-order adjacent pair (swap it, picking up the Koszul
//! sign) or an adjacent equal pair of odd degree (the whole word is zero),
//! and repeat until the word is sorted. The main path sorts by stable
//! insertion and rules out odd squares up front, so agreement between the
//! two is a meaningful check rather than a tautology.

use crate::error::Result;
use crate::series::{FormalSignature, Monomial, Series};

enum Rewritten {
    Sorted(i8),
    Zero,
}

/// Normalizes a word in place, one adjacent rewrite at a time.
fn rewrite_word(sig: &FormalSignature, word: &mut [usize]) -> Rewritten {
    let mut sign = 1i8;
    'scan: loop {
        for i in 0..word.len().saturating_sub(1) {
            let (a, b) = (word[i], word[i + 1]);
            if a == b && sig.degrees()[a].is_odd() {
                return Rewritten::Zero;
            }
            if a > b {
                let product = sig.degrees()[a]
                    .scalar_product(&sig.degrees()[b])
                    .expect("signature degrees share one length");
                if product == 1 {
                    sign = -sign;
                }
                word.swap(i, i + 1);
                continue 'scan;
            }
        }
        return Rewritten::Sorted(sign);
    }
}

fn word_of(m: &Monomial) -> Vec<usize> {
    let mut word = Vec::with_capacity(m.weight());
    for (a, &e) in m.exponents().iter().enumerate() {
        for _ in 0..e {
            word.push(a);
        }
    }
    word
}

fn monomial_of(word: &[usize], q: usize) -> Monomial {
    let mut e = vec![0u32; q];
    for &a in word {
        e[a] += 1;
    }
    Monomial::new(e)
}

/// Same contract as the graded product, computed the slow way.
pub fn naive_product(a: &Series, b: &Series) -> Result<Series> {
    if a.signature() != b.signature() {
        return Err(crate::error::Error::SignatureMismatch);
    }
    let sig = a.signature();
    let q = sig.formal_vars();
    let mut out = Series::zero(sig);
    for (mu, f) in a.iter_terms() {
        for (nu, g) in b.iter_terms() {
            let mut word = word_of(mu);
            word.extend(word_of(nu));
            match rewrite_word(sig, &mut word) {
                Rewritten::Zero => continue,
                Rewritten::Sorted(sign) => {
                    let mut jet = f.mul(g)?;
                    if sign < 0 {
                        jet = jet.neg();
                    }
                    let terms = [(monomial_of(&word, q), jet)];
                    out = out.add(&Series::from_terms(sig, terms)?)?;
                }
            }
        }
    }
    Ok(out)
}
