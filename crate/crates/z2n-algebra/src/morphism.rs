//! Morphisms of Z2^n-superdomains in the quotient model.
//!
//! A morphism is determined by the pullbacks of the target coordinates:
//! one degree-0 centered series per base coordinate and one series of the
//! matching nonzero degree per formal coordinate. The pullback of an
//! arbitrary series substitutes these coordinate images and truncates;
//! because the base pullbacks are centered, substitution into polynomial
//! jet coefficients is exact in the quotient and agrees with the formal
//! Taylor expansion around the image of the center.
//!
//! Morphisms here are centered: the base point maps to the target center.
//! A non-centered map is expressed by re-centering the target signature
//! upstream.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::series::{FormalSignature, Monomial, Series};
use crate::{rat, Rational};

/// Axis-aligned box in the base space, with the origin in its interior.
/// Retained as a target-domain witness for range conditions; the jet model
/// only ever samples the center, where containment is automatic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainBox {
    bounds: Vec<(Rational, Rational)>,
}

impl DomainBox {
    pub fn new(bounds: Vec<(Rational, Rational)>) -> Result<Self> {
        let zero = Rational::zero();
        for (lo, hi) in &bounds {
            if !(lo < &zero && &zero < hi) {
                return Err(Error::InvalidDomainBox);
            }
        }
        Ok(DomainBox { bounds })
    }

    pub fn bounds(&self) -> &[(Rational, Rational)] {
        &self.bounds
    }
}

/// A formal signature together with an optional base-domain box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperdomainSignature {
    formal: FormalSignature,
    domain: Option<DomainBox>,
}

impl SuperdomainSignature {
    pub fn new(formal: FormalSignature) -> Self {
        SuperdomainSignature {
            formal,
            domain: None,
        }
    }

    pub fn with_domain(formal: FormalSignature, domain: DomainBox) -> Result<Self> {
        if domain.bounds.len() != formal.base_vars() {
            return Err(Error::ArityMismatch {
                expected: formal.base_vars(),
                found: domain.bounds.len(),
            });
        }
        Ok(SuperdomainSignature {
            formal,
            domain: Some(domain),
        })
    }

    pub fn formal(&self) -> &FormalSignature {
        &self.formal
    }

    pub fn domain(&self) -> Option<&DomainBox> {
        self.domain.as_ref()
    }
}

/// A centered morphism between superdomains, stored through the pullbacks
/// of the target coordinates and the induced base map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    source: SuperdomainSignature,
    target: SuperdomainSignature,
    base_pullbacks: Vec<Series>,
    formal_pullbacks: Vec<Series>,
    base_map: Vec<Jet>,
}

impl Morphism {
    /// Builds the unique morphism with the prescribed coordinate pullbacks.
    ///
    /// Each base pullback must be homogeneous of degree zero and centered
    /// (zero constant term); each formal pullback must be homogeneous of
    /// the degree of its target coordinate. Both superdomains must share
    /// the grading length and the truncation order.
    pub fn from_coordinate_pullbacks(
        source: SuperdomainSignature,
        target: SuperdomainSignature,
        base_pullbacks: Vec<Series>,
        formal_pullbacks: Vec<Series>,
    ) -> Result<Self> {
        let src = source.formal();
        let tgt = target.formal();
        if src.grading_len() != tgt.grading_len() || src.order() != tgt.order() {
            return Err(Error::SignatureMismatch);
        }
        if base_pullbacks.len() != tgt.base_vars() {
            return Err(Error::ArityMismatch {
                expected: tgt.base_vars(),
                found: base_pullbacks.len(),
            });
        }
        if formal_pullbacks.len() != tgt.formal_vars() {
            return Err(Error::ArityMismatch {
                expected: tgt.formal_vars(),
                found: formal_pullbacks.len(),
            });
        }
        let zero_degree = crate::grading::DegreeVector::zero(src.grading_len());
        for (j, s) in base_pullbacks.iter().enumerate() {
            if s.signature() != src {
                return Err(Error::SignatureMismatch);
            }
            if !s.is_homogeneous_of(&zero_degree) {
                return Err(Error::DegreeMismatch {
                    coordinate: format!("x{}", j + 1),
                });
            }
            if !s.base_projection().constant_term().is_zero() {
                return Err(Error::NotCentered {
                    coordinate: format!("x{}", j + 1),
                });
            }
        }
        for (b, zeta) in formal_pullbacks.iter().enumerate() {
            if zeta.signature() != src {
                return Err(Error::SignatureMismatch);
            }
            let tau = tgt.degree_of(b + 1)?;
            if !zeta.is_homogeneous_of(tau) {
                return Err(Error::DegreeMismatch {
                    coordinate: format!("t{}", b + 1),
                });
            }
        }
        let base_map = base_pullbacks.iter().map(Series::base_projection).collect();
        Ok(Morphism {
            source,
            target,
            base_pullbacks,
            formal_pullbacks,
            base_map,
        })
    }

    /// The identity morphism: every coordinate pulls back to itself.
    pub fn identity(signature: &SuperdomainSignature) -> Self {
        let sig = signature.formal();
        let base = (1..=sig.base_vars())
            .map(|i| Series::base_variable(sig, i).expect("index within range"))
            .collect();
        let formal = (1..=sig.formal_vars())
            .map(|a| Series::formal_variable(sig, a).expect("index within range"))
            .collect();
        Morphism::from_coordinate_pullbacks(signature.clone(), signature.clone(), base, formal)
            .expect("coordinates satisfy their own contract")
    }

    pub fn source(&self) -> &SuperdomainSignature {
        &self.source
    }

    pub fn target(&self) -> &SuperdomainSignature {
        &self.target
    }

    /// Pullbacks of the target base coordinates, in coordinate order.
    pub fn base_pullbacks(&self) -> &[Series] {
        &self.base_pullbacks
    }

    /// Pullbacks of the target formal coordinates, in coordinate order.
    pub fn formal_pullbacks(&self) -> &[Series] {
        &self.formal_pullbacks
    }

    /// The induced map of base jets (the formal-variable-free part of the
    /// base pullbacks).
    pub fn base_map(&self) -> &[Jet] {
        &self.base_map
    }

    /// Pulls a series over the target back to the source: substitutes the
    /// coordinate images into every term and truncates. Coefficient jets
    /// are evaluated at the base pullbacks; the formal monomial is replaced
    /// by the power product of the formal pullbacks in coordinate order.
    pub fn pullback(&self, g: &Series) -> Result<Series> {
        if g.signature() != self.target.formal() {
            return Err(Error::SignatureMismatch);
        }
        let src = self.source.formal();
        let mut base_powers: Vec<Vec<Series>> = self
            .base_pullbacks
            .iter()
            .map(|_| vec![Series::one(src)])
            .collect();
        let mut formal_powers: Vec<Vec<Series>> = self
            .formal_pullbacks
            .iter()
            .map(|_| vec![Series::one(src)])
            .collect();
        let mut out = Series::zero(src);
        for (nu, g_nu) in g.iter_terms() {
            let coeff = self.eval_jet(g_nu, &mut base_powers)?;
            if coeff.is_zero() {
                continue;
            }
            let mut image = coeff;
            for (b, &k) in nu.exponents().iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let zk = grow_powers(&self.formal_pullbacks[b], &mut formal_powers[b], k as usize);
                image = image.mul(zk)?;
                if image.is_zero() {
                    break;
                }
            }
            out = out.add(&image)?;
        }
        Ok(out)
    }

    /// Evaluates a polynomial jet of the target base ring at the base
    /// pullbacks. Exact in the quotient because the pullbacks are centered.
    fn eval_jet(&self, jet: &Jet, base_powers: &mut [Vec<Series>]) -> Result<Series> {
        let src = self.source.formal();
        let mut acc = Series::zero(src);
        for (alpha, c) in jet.iter_terms() {
            let mut term = Series::constant(src, c.clone());
            for (j, &k) in alpha.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let sk = grow_powers(&self.base_pullbacks[j], &mut base_powers[j], k as usize);
                term = term.mul(sk)?;
                if term.is_zero() {
                    break;
                }
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Composes with a following morphism: `self: M -> N`, `other: N -> P`
    /// gives `M -> P`, whose pullback is `self.pullback . other.pullback`.
    pub fn compose(&self, other: &Morphism) -> Result<Morphism> {
        if self.target.formal() != other.source.formal() {
            return Err(Error::SignatureMismatch);
        }
        let base = other
            .base_pullbacks
            .iter()
            .map(|s| self.pullback(s))
            .collect::<Result<Vec<_>>>()?;
        let formal = other
            .formal_pullbacks
            .iter()
            .map(|z| self.pullback(z))
            .collect::<Result<Vec<_>>>()?;
        Morphism::from_coordinate_pullbacks(self.source.clone(), other.target.clone(), base, formal)
    }

    /// Inverts the morphism order by order. The exact inverse of the
    /// linear part seeds the iteration; each step composes with the
    /// first-order correction `c -> 2c - h*(c)` of the current defect
    /// `h = self . g`, which strictly raises the adic order of the error.
    /// Fails when the base Jacobian or the formal linear block at the
    /// center is singular.
    pub fn invert(&self) -> Result<Morphism> {
        let src = self.source.formal();
        let tgt = self.target.formal();
        if src.base_vars() != tgt.base_vars() || src.formal_vars() != tgt.formal_vars() {
            return Err(Error::NotInvertible);
        }
        let p = src.base_vars();
        let q = src.formal_vars();

        // Linear part on the base: A[j][i] = d(s^j)/dx_i at 0.
        let a = (0..p)
            .map(|j| {
                let jet = &self.base_map[j];
                (0..p)
                    .map(|i| {
                        let mut e = vec![0u32; p];
                        e[i] = 1;
                        jet.coefficient(&e)
                    })
                    .collect()
            })
            .collect();
        // Linear part on the formal variables: B[b][a] = constant
        // coefficient of xi_a in zeta^b.
        let b = (0..q)
            .map(|bb| {
                let zeta = &self.formal_pullbacks[bb];
                (0..q)
                    .map(|aa| {
                        let m = Monomial::variable(q, aa + 1).expect("index within range");
                        zeta.coefficient(&m).constant_term()
                    })
                    .collect()
            })
            .collect();
        let a_inv = invert_matrix(a).ok_or(Error::NotInvertible)?;
        let b_inv = invert_matrix(b).ok_or(Error::NotInvertible)?;

        // Seed: the exact inverse of the linear part, as a morphism N -> M.
        let lin_base = (0..p)
            .map(|i| {
                let mut s = Series::zero(tgt);
                for (j, c) in a_inv[i].iter().enumerate() {
                    let yj = Series::base_variable(tgt, j + 1)?;
                    s = s.add(&yj.scale(c))?;
                }
                Ok(s)
            })
            .collect::<Result<Vec<_>>>()?;
        let lin_formal = (0..q)
            .map(|aa| {
                let mut z = Series::zero(tgt);
                for (bb, c) in b_inv[aa].iter().enumerate() {
                    let eb = Series::formal_variable(tgt, bb + 1)?;
                    z = z.add(&eb.scale(c))?;
                }
                Ok(z)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut g = Morphism::from_coordinate_pullbacks(
            self.target.clone(),
            self.source.clone(),
            lin_base,
            lin_formal,
        )?;

        let id_source = Morphism::identity(&self.source);
        let id_target = Morphism::identity(&self.target);
        for _ in 0..=src.order() + 2 {
            let h = self.compose(&g)?;
            if h == id_source {
                return if g.compose(self)? == id_target {
                    Ok(g)
                } else {
                    Err(Error::NotInvertible)
                };
            }
            // Correction morphism r: M -> M, coordinate c -> 2c - h*(c).
            let two = rat(2);
            let base = h
                .base_pullbacks
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let c = Series::base_variable(src, i + 1)?;
                    c.scale(&two).sub(s)
                })
                .collect::<Result<Vec<_>>>()?;
            let formal = h
                .formal_pullbacks
                .iter()
                .enumerate()
                .map(|(aa, z)| {
                    let c = Series::formal_variable(src, aa + 1)?;
                    c.scale(&two).sub(z)
                })
                .collect::<Result<Vec<_>>>()?;
            let r = Morphism::from_coordinate_pullbacks(
                self.source.clone(),
                self.source.clone(),
                base,
                formal,
            )?;
            g = g.compose(&r)?;
        }
        Err(Error::NotInvertible)
    }
}

/// Extends the cached powers of a series up to exponent `k` and returns
/// the k-th power.
fn grow_powers<'a>(base: &Series, cache: &'a mut Vec<Series>, k: usize) -> &'a Series {
    while cache.len() <= k {
        let next = cache
            .last()
            .unwrap()
            .mul(base)
            .expect("powers share one signature");
        cache.push(next);
    }
    &cache[k]
}

/// True iff the two morphisms are mutually inverse in the quotient, i.e.
/// both composites equal the identity on all coordinate pullbacks.
pub fn check_inverse_pair(f: &Morphism, g: &Morphism) -> Result<bool> {
    if f.target.formal() != g.source.formal() || g.target.formal() != f.source.formal() {
        return Err(Error::SignatureMismatch);
    }
    let fg = f.compose(g)?;
    let gf = g.compose(f)?;
    Ok(fg == Morphism::identity(f.source()) && gf == Morphism::identity(g.source()))
}

/// Gauss-Jordan inverse over the rationals; `None` when singular.
fn invert_matrix(matrix: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let n = matrix.len();
    let mut work = matrix;
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !work[r][col].is_zero())?;
        work.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = work[col][col].clone();
        for x in work[col].iter_mut().chain(inv[col].iter_mut()) {
            *x = &*x / &pivot;
        }
        for row in 0..n {
            if row == col || work[row][col].is_zero() {
                continue;
            }
            let factor = work[row][col].clone();
            for k in 0..n {
                let d = &work[col][k] * &factor;
                work[row][k] = &work[row][k] - &d;
                let d = &inv[col][k] * &factor;
                inv[row][k] = &inv[row][k] - &d;
            }
        }
    }
    Some(inv)
}
