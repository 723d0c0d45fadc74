//! Degree vectors of Z2^n, the scalar-product sign rule, and the constructive
//! realization of arbitrary symmetric sign tables as Z2^(2m)-gradings.
//!
//! The commutation rule between homogeneous elements of degrees `d1`, `d2` is
//! `a*b = (-1)^<d1,d2> * b*a`, where `<-,->` is the mod-2 dot product. Parity
//! (odd/even) is the total degree mod 2, which coincides with `<d,d>`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, ParseError, Result};

/// An element of Z2^n: a fixed-length bit vector. Addition is componentwise
/// mod 2, so every element is its own inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DegreeVector {
    bits: Vec<u8>,
}

impl DegreeVector {
    /// Builds a degree vector, reducing every entry mod 2.
    pub fn new(bits: impl IntoIterator<Item = u8>) -> Self {
        DegreeVector {
            bits: bits.into_iter().map(|b| b & 1).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        DegreeVector { bits: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    fn check_len(&self, other: &DegreeVector) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DegreeLengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    /// Componentwise sum mod 2.
    pub fn add(&self, other: &DegreeVector) -> Result<DegreeVector> {
        self.check_len(other)?;
        Ok(DegreeVector {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| (a + b) & 1)
                .collect(),
        })
    }

    /// The mod-2 dot product `<d1,d2> = sum d1[t]*d2[t] mod 2`.
    pub fn scalar_product(&self, other: &DegreeVector) -> Result<u8> {
        self.check_len(other)?;
        let s: u8 = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a * b)
            .fold(0, |acc, x| (acc + x) & 1);
        Ok(s)
    }

    /// Total degree mod 2. Equals `scalar_product(d, d)`.
    pub fn parity(&self) -> u8 {
        self.bits.iter().fold(0, |acc, b| (acc + b) & 1)
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == 1
    }

    /// The Koszul sign `(-1)^<d1,d2>` governing `a*b = sign * b*a`.
    pub fn commutation_sign(&self, other: &DegreeVector) -> Result<i8> {
        Ok(if self.scalar_product(other)? == 0 {
            1
        } else {
            -1
        })
    }

    /// Lexicographic comparison of the bit sequences.
    pub fn lex_order(&self, other: &DegreeVector) -> Result<Ordering> {
        self.check_len(other)?;
        Ok(self.bits.cmp(&other.bits))
    }
}

impl fmt::Display for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.bits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

/// A symmetric +/-1-valued function on `{1..m} x {1..m}`, prescribing the
/// commutation rule `y^i y^j = entries(i,j) y^j y^i` of m generators.
///
/// Entries are stored raw so that a table read from user input can be
/// validated after the fact; see [`validate_commutation_factor`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignTable {
    size: usize,
    entries: Vec<i8>,
}

impl SignTable {
    /// Builds a table from a function on ordered index pairs (1-based).
    pub fn from_fn(size: usize, f: impl Fn(usize, usize) -> i8) -> Self {
        let mut entries = vec![0; size * size];
        for i in 1..=size {
            for j in 1..=size {
                entries[(i - 1) * size + (j - 1)] = f(i, j);
            }
        }
        SignTable { size, entries }
    }

    /// Builds a symmetric table from the upper triangle (including the
    /// diagonal), given as `(i, j, sign)` with `i <= j`, 1-based.
    pub fn from_upper_triangle(
        size: usize,
        entries: impl IntoIterator<Item = (usize, usize, i8)>,
    ) -> Result<Self> {
        let mut table = vec![None; size * size];
        for (i, j, s) in entries {
            if i == 0 || j == 0 || i > size || j > size || i > j {
                return Err(Error::InvalidSignTable {
                    reason: format!("entry ({i},{j}) is not in the upper triangle of a {size}x{size} table"),
                });
            }
            if s != 1 && s != -1 {
                return Err(Error::InvalidSignTable {
                    reason: format!("entry ({i},{j}) has sign {s}, expected +1 or -1"),
                });
            }
            let (a, b) = (i - 1, j - 1);
            if table[a * size + b].replace(s).is_some() {
                return Err(Error::InvalidSignTable {
                    reason: format!("duplicate entry ({i},{j})"),
                });
            }
            table[b * size + a] = Some(s);
        }
        if let Some(pos) = table.iter().position(Option::is_none) {
            let (i, j) = (pos / size + 1, pos % size + 1);
            return Err(Error::InvalidSignTable {
                reason: format!("missing entry ({i},{j})"),
            });
        }
        Ok(SignTable {
            size,
            entries: table.into_iter().map(Option::unwrap).collect(),
        })
    }

    /// Reads the text format: first line `m`, then `m(m+1)/2` lines `i j s`
    /// with `s` one of `+1`, `-1`, covering the upper triangle.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, first) = lines
            .next()
            .ok_or_else(|| ParseError::new(1, 1, "empty sign table file"))?;
        let m: usize = first
            .parse()
            .map_err(|_| ParseError::new(line_no, 1, format!("expected table size, found `{first}`")))?;
        let mut triples = Vec::new();
        for (line_no, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(ParseError::new(line_no, 1, "expected `i j s`").into());
            }
            let parse_idx = |s: &str| -> std::result::Result<usize, Error> {
                s.parse()
                    .map_err(|_| ParseError::new(line_no, 1, format!("bad index `{s}`")).into())
            };
            let i = parse_idx(fields[0])?;
            let j = parse_idx(fields[1])?;
            let s = match fields[2] {
                "+1" | "1" => 1,
                "-1" => -1,
                other => {
                    return Err(
                        ParseError::new(line_no, 1, format!("bad sign `{other}`, expected +1 or -1")).into(),
                    )
                }
            };
            triples.push((i, j, s));
        }
        SignTable::from_upper_triangle(m, triples)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry at the 1-based pair `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> i8 {
        self.entries[(i - 1) * self.size + (j - 1)]
    }

    /// Parity p(i,j) of the entry: `(-1)^p(i,j) = entry(i,j)`.
    fn entry_parity(&self, i: usize, j: usize) -> u8 {
        if self.entry(i, j) == 1 {
            0
        } else {
            1
        }
    }
}

/// Checks the raw-input contract of a sign table: symmetric with entries
/// in {+1,-1}. Biadditivity is automatic once the table is realized by a
/// grading, so it is not part of this check.
pub fn validate_commutation_factor(table: &SignTable) -> bool {
    let m = table.size;
    for i in 1..=m {
        for j in 1..=m {
            let e = table.entry(i, j);
            if e != 1 && e != -1 {
                return false;
            }
            if e != table.entry(j, i) {
                return false;
            }
        }
    }
    true
}

/// Degrees in Z2^n assigned to m generators, realizing a sign table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeAssignment {
    n: usize,
    degrees: Vec<DegreeVector>,
}

impl DegreeAssignment {
    pub fn grading_length(&self) -> usize {
        self.n
    }

    pub fn degrees(&self) -> &[DegreeVector] {
        &self.degrees
    }

    /// Checks that the assignment reproduces the table:
    /// `(-1)^<sigma_i,sigma_j> = entries(i,j)` for every pair.
    pub fn realizes(&self, table: &SignTable) -> bool {
        if self.degrees.len() != table.size() {
            return false;
        }
        for i in 1..=table.size() {
            for j in 1..=table.size() {
                let sign = self.degrees[i - 1]
                    .commutation_sign(&self.degrees[j - 1])
                    .expect("assignment degrees share one length");
                if sign != table.entry(i, j) {
                    return false;
                }
            }
        }
        true
    }
}

/// Realizes a symmetric sign table as a Z2^(2m)-grading by the inductive
/// construction, one generator at a time.
///
/// Z2^(2m) is taken as the set of functions `{+-1, ..., +-m} -> Z2`,
/// linearized in the order `(1, -1, 2, -2, ..., m, -m)`; only scalar
/// products matter, so any fixed linearization is valid, and this one is
/// kept stable so that outputs are reproducible bit for bit. The result is
/// returned unreduced: no attempt is made to shrink n below 2m.
pub fn realize_sign_rule(table: &SignTable) -> Result<DegreeAssignment> {
    if !validate_commutation_factor(table) {
        return Err(Error::InvalidSignTable {
            reason: "table must be symmetric with entries +1/-1".into(),
        });
    }
    let m = table.size();
    let n = 2 * m;
    // slot(k) for k in {1,..,m}: position of k; slot(-k): position of -k.
    let pos = |k: usize| 2 * (k - 1);
    let neg = |k: usize| 2 * (k - 1) + 1;

    let mut sigma = vec![vec![0u8; n]; m];
    for step in 1..=m {
        // Fix sigma_step on the slots +-step; earlier slots were already set.
        let prior: u8 = (1..step)
            .map(|k| sigma[step - 1][pos(k)] + sigma[step - 1][neg(k)])
            .fold(0, |acc, x| (acc + x) & 1);
        sigma[step - 1][pos(step)] = 1;
        sigma[step - 1][neg(step)] = (1 + prior + table.entry_parity(step, step)) & 1;
        // Fix the slots +-step of all later generators.
        for j in step + 1..=m {
            let cross: u8 = (1..step)
                .map(|k| {
                    sigma[j - 1][pos(k)] * sigma[step - 1][pos(k)]
                        + sigma[j - 1][neg(k)] * sigma[step - 1][neg(k)]
                })
                .fold(0, |acc, x| (acc + x) & 1);
            sigma[j - 1][pos(step)] = (cross + table.entry_parity(j, step)) & 1;
            sigma[j - 1][neg(step)] = 0;
        }
    }

    Ok(DegreeAssignment {
        n,
        degrees: sigma.into_iter().map(DegreeVector::new).collect(),
    })
}

/// The three classical sign conventions on bidegrees `(m,n)`, `(k,l)`:
/// the exponent `mk` (grading by the first component only), the
/// Bernstein-Leites exponent `(m+n)(k+l)` (total parity), and the Deligne
/// scalar product `mk + nl`. Returns the three signs in that order.
pub fn compare_conventions(bideg1: (u64, u64), bideg2: (u64, u64)) -> [i8; 3] {
    let (m, n) = bideg1;
    let (k, l) = bideg2;
    let sign = |e: u64| if e.is_multiple_of(2) { 1 } else { -1 };
    [sign(m * k), sign((m + n) * (k + l)), sign(m * k + n * l)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(bits: &[u8]) -> DegreeVector {
        DegreeVector::new(bits.iter().copied())
    }

    #[test]
    fn scalar_product_quaternion_pair() {
        // deg i = (1,1,0), deg j = (1,0,1)
        assert_eq!(dv(&[1, 1, 0]).scalar_product(&dv(&[1, 0, 1])).unwrap(), 1);
        assert_eq!(dv(&[0, 0, 0]).scalar_product(&dv(&[1, 0, 1])).unwrap(), 0);
        assert_eq!(dv(&[1, 1]).scalar_product(&dv(&[1, 1])).unwrap(), 0);
    }

    #[test]
    fn scalar_product_length_mismatch() {
        assert!(matches!(
            dv(&[1]).scalar_product(&dv(&[1, 0])),
            Err(Error::DegreeLengthMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn parity_matches_self_product() {
        assert_eq!(dv(&[1, 1, 0]).parity(), 0);
        assert_eq!(dv(&[0, 0, 0, 0]).parity(), 0);
        assert_eq!(dv(&[1, 0]).parity(), 1);
        for bits in [[1u8, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]] {
            let d = dv(&bits);
            assert_eq!(d.parity(), d.scalar_product(&d).unwrap());
        }
    }

    #[test]
    fn commutation_signs() {
        assert_eq!(dv(&[1, 1, 0]).commutation_sign(&dv(&[1, 0, 1])).unwrap(), -1);
        assert_eq!(dv(&[1, 1, 0]).commutation_sign(&dv(&[1, 1, 0])).unwrap(), 1);
        assert_eq!(dv(&[1, 0]).commutation_sign(&dv(&[1, 0])).unwrap(), -1);
    }

    #[test]
    fn degenerate_length_zero_is_classical() {
        let z = DegreeVector::zero(0);
        assert_eq!(z.parity(), 0);
        assert_eq!(z.commutation_sign(&z).unwrap(), 1);
    }

    #[test]
    fn lex_order_examples() {
        assert_eq!(dv(&[0, 1]).lex_order(&dv(&[1, 0])).unwrap(), Ordering::Less);
        assert_eq!(dv(&[1, 0]).lex_order(&dv(&[1, 0])).unwrap(), Ordering::Equal);
        assert_eq!(dv(&[1, 1]).lex_order(&dv(&[1, 0])).unwrap(), Ordering::Greater);
    }

    fn quaternion_table() -> SignTable {
        SignTable::from_fn(3, |i, j| if i == j { 1 } else { -1 })
    }

    #[test]
    fn validate_tables() {
        let all_plus = SignTable::from_fn(2, |_, _| 1);
        assert!(validate_commutation_factor(&all_plus));
        let broken = SignTable::from_fn(2, |i, j| if (i, j) == (1, 2) { 1 } else { -1 });
        assert!(!validate_commutation_factor(&broken));
        assert!(validate_commutation_factor(&quaternion_table()));
        let bad_value = SignTable::from_fn(1, |_, _| 0);
        assert!(!validate_commutation_factor(&bad_value));
    }

    #[test]
    fn realize_anticommuting_single_generator() {
        let table = SignTable::from_fn(1, |_, _| -1);
        let a = realize_sign_rule(&table).unwrap();
        assert_eq!(a.grading_length(), 2);
        assert_eq!(a.degrees()[0], dv(&[1, 0]));
        assert_eq!(a.degrees()[0].scalar_product(&a.degrees()[0]).unwrap(), 1);
        assert!(a.realizes(&table));
    }

    #[test]
    fn realize_commuting_single_generator() {
        let table = SignTable::from_fn(1, |_, _| 1);
        let a = realize_sign_rule(&table).unwrap();
        assert_eq!(a.degrees()[0], dv(&[1, 1]));
        assert!(a.realizes(&table));
    }

    #[test]
    fn realize_quaternion_table() {
        let a = realize_sign_rule(&quaternion_table()).unwrap();
        assert_eq!(a.grading_length(), 6);
        assert!(a.realizes(&quaternion_table()));
        // Frozen output of the inductive construction in the fixed
        // linearization (1,-1,2,-2,3,-3).
        assert_eq!(a.degrees()[0], dv(&[1, 1, 0, 0, 0, 0]));
        assert_eq!(a.degrees()[1], dv(&[1, 0, 1, 0, 0, 0]));
        assert_eq!(a.degrees()[2], dv(&[1, 0, 0, 0, 1, 0]));
    }

    #[test]
    fn realize_rejects_asymmetric_table() {
        let broken = SignTable::from_fn(2, |i, j| if (i, j) == (1, 2) { 1 } else { -1 });
        assert!(matches!(
            realize_sign_rule(&broken),
            Err(Error::InvalidSignTable { .. })
        ));
    }

    #[test]
    fn conventions_on_tangent_lift_bidegrees() {
        // (0,1) vs (1,1): only the Deligne scalar product makes them anticommute.
        assert_eq!(compare_conventions((0, 1), (1, 1)), [1, 1, -1]);
        assert_eq!(compare_conventions((0, 0), (7, 5)), [1, 1, 1]);
        assert_eq!(compare_conventions((1, 1), (1, 1)), [-1, 1, 1]);
    }

    #[test]
    fn sign_table_from_text() {
        let text = "3\n1 1 +1\n1 2 -1\n1 3 -1\n2 2 +1\n2 3 -1\n3 3 +1\n";
        let table = SignTable::from_text(text).unwrap();
        assert_eq!(table, quaternion_table());

        assert!(SignTable::from_text("2\n1 1 +1\n").is_err());
        assert!(SignTable::from_text("1\n1 1 +2\n").is_err());
        assert!(SignTable::from_text("1\n1 1 +1\n1 1 -1\n").is_err());
    }

    #[test]
    fn biadditivity_of_commutation_sign() {
        // (-1)^<d1+d2,d3> = (-1)^<d1,d3> * (-1)^<d2,d3> over a full sweep of Z2^3.
        let all: Vec<DegreeVector> = (0..8u8)
            .map(|k| dv(&[(k >> 2) & 1, (k >> 1) & 1, k & 1]))
            .collect();
        for d1 in &all {
            for d2 in &all {
                for d3 in &all {
                    let lhs = d1.add(d2).unwrap().commutation_sign(d3).unwrap();
                    let rhs = d1.commutation_sign(d3).unwrap() * d2.commutation_sign(d3).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn symmetry_of_commutation_sign() {
        let all: Vec<DegreeVector> = (0..8u8)
            .map(|k| dv(&[(k >> 2) & 1, (k >> 1) & 1, k & 1]))
            .collect();
        for d1 in &all {
            for d2 in &all {
                assert_eq!(
                    d1.commutation_sign(d2).unwrap() * d2.commutation_sign(d1).unwrap(),
                    1
                );
            }
        }
    }
}
