//! Exact domain types: the bounded open domain, endpoint multisets, vocabularies
//! and profiles, together with the word/endpoint duality and betweenness.
//!
//! A vocabulary over `m + 1` ordered words is a labeled interval partition of
//! the domain `X = (lower, upper)`. Word `k` (1-based) has the half-open extent
//! `[s^{k-1}, s^k)` where `s^0 = inf X` and `s^{m+1} = sup X`; the first active
//! extent is open at `inf X`. Inactive words are encoded by repeated endpoints,
//! so every vocabulary (partial or complete) corresponds to exactly one
//! nondecreasing sequence of `m` endpoints drawn from the closure of `X`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

/// Exact rational number. Canonical form (reduced, positive denominator) is
/// maintained by `num_rational`.
pub type Rational = BigRational;

/// `numer / denom` as an exact rational. Panics if `denom == 0`.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A bounded open interval `X = (lower, upper)` with rational bounds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Domain {
    lower: Rational,
    upper: Rational,
}

impl Domain {
    pub fn new(lower: Rational, upper: Rational) -> Result<Self> {
        if lower >= upper {
            return Err(Error::InvalidDomain(format!(
                "lower bound {lower} must be below upper bound {upper}"
            )));
        }
        Ok(Domain { lower, upper })
    }

    /// The unit interval `(0, 1)`.
    pub fn unit() -> Self {
        Domain {
            lower: int(0),
            upper: int(1),
        }
    }

    /// `inf X`.
    pub fn lower(&self) -> &Rational {
        &self.lower
    }

    /// `sup X`.
    pub fn upper(&self) -> &Rational {
        &self.upper
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    /// `x ∈ X`.
    pub fn contains(&self, x: &Rational) -> bool {
        &self.lower < x && x < &self.upper
    }

    /// `x ∈ X ∪ {inf X, sup X}`.
    pub fn contains_closed(&self, x: &Rational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    /// The order-reversing involution `x ↦ inf X + sup X − x`.
    pub fn reflect(&self, x: &Rational) -> Rational {
        &self.lower + &self.upper - x
    }
}

/// The ordered multiset `s^1 ≤ … ≤ s^m` of endpoints identifying a (possibly
/// partial) vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EndpointMultiset {
    domain: Domain,
    values: Vec<Rational>,
}

impl EndpointMultiset {
    pub fn new(domain: Domain, values: Vec<Rational>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !domain.contains_closed(v)) {
            return Err(Error::InvalidEndpoints(format!(
                "endpoint {bad} lies outside [{}, {}]",
                domain.lower, domain.upper
            )));
        }
        if let Some(k) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidEndpoints(format!(
                "endpoints must be nondecreasing, but s^{} = {} > s^{} = {}",
                k + 1,
                values[k],
                k + 2,
                values[k + 1]
            )));
        }
        Ok(EndpointMultiset { domain, values })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    /// Number of endpoints `m`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `s^k` for `k ∈ 0..=m+1`, with the domain bounds at both ends.
    pub fn padded(&self, k: usize) -> &Rational {
        if k == 0 {
            &self.domain.lower
        } else if k > self.values.len() {
            &self.domain.upper
        } else {
            &self.values[k - 1]
        }
    }

    /// Activity flag of each of the `m + 1` words.
    pub fn active_words(&self) -> Vec<bool> {
        (1..=self.values.len() + 1)
            .map(|k| self.padded(k - 1) < self.padded(k))
            .collect()
    }

    pub fn active_word_count(&self) -> usize {
        self.active_words().into_iter().filter(|a| *a).count()
    }

    /// Strictly increasing with every endpoint proper: all `m + 1` words active.
    pub fn is_complete(&self) -> bool {
        self.active_words().into_iter().all(|a| a)
    }
}

impl fmt::Display for EndpointMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// The extent of an active word: `[left, right)`, or `(left, right)` when
/// `left = inf X`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Extent {
    pub left: Rational,
    pub right: Rational,
}

impl Extent {
    pub fn new(left: Rational, right: Rational) -> Self {
        Extent { left, right }
    }

    /// Whether the extent contains its left endpoint (false only at `inf X`).
    pub fn left_closed(&self, domain: &Domain) -> bool {
        &self.left > domain.lower()
    }

    pub fn contains(&self, domain: &Domain, x: &Rational) -> bool {
        let above = if self.left_closed(domain) {
            &self.left <= x
        } else {
            &self.left < x
        };
        above && x < &self.right
    }

    /// Interval notation under the left-closed convention.
    pub fn describe(&self, domain: &Domain) -> String {
        let open = if self.left_closed(domain) { '[' } else { '(' };
        format!("{open}{}, {})", self.left, self.right)
    }
}

/// A labeled interval partition of the domain over a fixed ordered word list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vocabulary {
    domain: Domain,
    words: Vec<String>,
    extents: Vec<Option<Extent>>,
}

/// Labels `w1 … w{count}`.
pub fn default_words(count: usize) -> Vec<String> {
    (1..=count).map(|k| format!("w{k}")).collect()
}

impl Vocabulary {
    /// Builds a vocabulary, rejecting overlapping, out-of-order or
    /// non-covering extents and vocabularies with fewer than two active words.
    pub fn new(domain: Domain, words: Vec<String>, extents: Vec<Option<Extent>>) -> Result<Self> {
        let v = Vocabulary { domain, words, extents };
        v.validate()?;
        Ok(v)
    }

    /// Checks the partition structure and the two-active-words requirement.
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidVocabulary(msg));
        if self.words.len() != self.extents.len() {
            return invalid(format!(
                "{} labels but {} extents",
                self.words.len(),
                self.extents.len()
            ));
        }
        if self.words.len() < 2 {
            return invalid("a vocabulary needs at least two words".into());
        }
        let mut cursor: Option<&Rational> = None;
        let mut last_label = "";
        for (label, extent) in self.words.iter().zip(&self.extents) {
            let Some(e) = extent else { continue };
            if e.left >= e.right {
                return invalid(format!(
                    "extent of {label} is empty or reversed: [{}, {})",
                    e.left, e.right
                ));
            }
            if !self.domain.contains_closed(&e.left) || !self.domain.contains_closed(&e.right) {
                return invalid(format!("extent of {label} leaves the domain"));
            }
            match cursor {
                None if e.left != self.domain.lower => {
                    return invalid(format!(
                        "first active word {label} starts at {} instead of {}",
                        e.left, self.domain.lower
                    ));
                }
                Some(prev) if &e.left < prev => {
                    return invalid(format!(
                        "extent of {label} overlaps or precedes the extent of {last_label}"
                    ));
                }
                Some(prev) if &e.left > prev => {
                    return invalid(format!(
                        "extents of {last_label} and {label} leave the gap ({prev}, {})",
                        e.left
                    ));
                }
                _ => {}
            }
            cursor = Some(&e.right);
            last_label = label;
        }
        match cursor {
            None => return invalid("no active words".into()),
            Some(end) if end != &self.domain.upper => {
                return invalid(format!(
                    "last active word {last_label} ends at {end} instead of {}",
                    self.domain.upper
                ));
            }
            _ => {}
        }
        if self.active_count() < 2 {
            return invalid("fewer than two active words".into());
        }
        Ok(())
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn extents(&self) -> &[Option<Extent>] {
        &self.extents
    }

    pub fn extent_of(&self, label: &str) -> Option<&Extent> {
        self.words
            .iter()
            .position(|w| w == label)
            .and_then(|k| self.extents[k].as_ref())
    }

    pub fn active_count(&self) -> usize {
        self.extents.iter().filter(|e| e.is_some()).count()
    }

    /// Active flags in word order.
    pub fn active_words(&self) -> Vec<bool> {
        self.extents.iter().map(Option::is_some).collect()
    }

    /// A one-word vocabulary covers all of `X` and carries no information.
    pub fn is_degenerate(&self) -> bool {
        self.active_count() < 2
    }

    /// Replaces the labels, keeping extents.
    pub fn with_words(mut self, words: Vec<String>) -> Result<Self> {
        if words.len() != self.extents.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} words",
                words.len(),
                self.extents.len()
            )));
        }
        self.words = words;
        Ok(self)
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (label, extent) in self.words.iter().zip(&self.extents) {
            if let Some(e) = extent {
                if !first {
                    write!(f, "; ")?;
                }
                write!(f, "{label} on {}", e.describe(&self.domain))?;
                first = false;
            }
        }
        Ok(())
    }
}

/// Maps a vocabulary to its endpoint multiset.
///
/// `s^k` is the right end of the last active word among `w_1 … w_k`, or
/// `inf X` when none of them is active. Inactive words therefore repeat the
/// boundary of the preceding active word, or `inf X` / `sup X` at the ends.
pub fn encode_vocabulary(v: &Vocabulary) -> Result<EndpointMultiset> {
    v.validate()?;
    let m = v.extents.len() - 1;
    let mut values = Vec::with_capacity(m);
    let mut boundary = v.domain.lower.clone();
    for extent in &v.extents[..m] {
        if let Some(e) = extent {
            boundary = e.right.clone();
        }
        values.push(boundary.clone());
    }
    EndpointMultiset::new(v.domain.clone(), values)
}

/// Maps an endpoint multiset back to the vocabulary with default labels.
///
/// The result can be degenerate (one active word) when every proper endpoint
/// is missing; see [`Vocabulary::is_degenerate`].
pub fn decode_endpoints(s: &EndpointMultiset) -> Vocabulary {
    decode_with_words(s, default_words(s.len() + 1)).expect("default labels always match the word count")
}

/// [`decode_endpoints`] with caller-supplied labels.
pub fn decode_with_words(s: &EndpointMultiset, words: Vec<String>) -> Result<Vocabulary> {
    let m = s.len();
    if words.len() != m + 1 {
        return Err(Error::ShapeMismatch(format!(
            "{} labels for {} endpoints (need {})",
            words.len(),
            m,
            m + 1
        )));
    }
    let extents = (1..=m + 1)
        .map(|k| {
            let (left, right) = (s.padded(k - 1), s.padded(k));
            (left < right).then(|| Extent::new(left.clone(), right.clone()))
        })
        .collect();
    Ok(Vocabulary {
        domain: s.domain.clone(),
        words,
        extents,
    })
}

/// `x ∈ ⟨y, z⟩`: `x` lies between `y` and `z` in either direction.
pub fn between(x: &Rational, y: &Rational, z: &Rational) -> bool {
    (y <= x && x <= z) || (z <= x && x <= y)
}

/// Componentwise betweenness of endpoint sequences.
pub fn multiset_between(s1: &EndpointMultiset, s2: &EndpointMultiset, s3: &EndpointMultiset) -> Result<bool> {
    if s1.len() != s2.len() || s1.len() != s3.len() {
        return Err(Error::ShapeMismatch(format!(
            "endpoint counts {}, {}, {} differ",
            s1.len(),
            s2.len(),
            s3.len()
        )));
    }
    Ok(s1
        .values
        .iter()
        .zip(&s2.values)
        .zip(&s3.values)
        .all(|((x, y), z)| between(x, y, z)))
}

/// The `n × m` arrangement of individual endpoints, one row per agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    domain: Domain,
    m: usize,
    rows: Vec<EndpointMultiset>,
}

impl Profile {
    pub fn new(domain: Domain, rows: Vec<EndpointMultiset>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::ShapeMismatch("a profile needs at least one agent".into()));
        };
        let m = first.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::ShapeMismatch(format!(
                    "agent {} reports {} endpoints, agent 1 reports {m}",
                    i + 1,
                    row.len()
                )));
            }
            if row.domain != domain {
                return Err(Error::DomainMismatch(format!(
                    "agent {} uses a different domain",
                    i + 1
                )));
            }
        }
        Ok(Profile { domain, m, rows })
    }

    /// Builds and validates every row from raw values.
    pub fn from_values(domain: Domain, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| EndpointMultiset::new(domain.clone(), r))
            .collect::<Result<Vec<_>>>()?;
        Profile::new(domain, rows)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Number of agents.
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Number of endpoints per agent.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> &[EndpointMultiset] {
        &self.rows
    }

    /// Row of agent `i` (0-based).
    pub fn row(&self, i: usize) -> &EndpointMultiset {
        &self.rows[i]
    }

    /// Column `k` (0-based): the `k+1`-th endpoints of all agents.
    pub fn column(&self, k: usize) -> Vec<Rational> {
        self.rows.iter().map(|r| r.values[k].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rational>> {
        (0..self.m).map(|k| self.column(k)).collect()
    }

    /// Replaces the row of agent `i` (0-based).
    pub fn with_row(&self, i: usize, row: EndpointMultiset) -> Result<Self> {
        if i >= self.rows.len() {
            return Err(Error::IndexOutOfRange {
                index: i + 1,
                len: self.rows.len(),
            });
        }
        let mut rows = self.rows.clone();
        rows[i] = row;
        Profile::new(self.domain.clone(), rows)
    }

    /// Rows reordered so that row `j` of the result is row `perm[j]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Profile {
            domain: self.domain.clone(),
            m: self.m,
            rows: perm.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    pub fn same_shape(&self, other: &Profile) -> bool {
        self.n() == other.n() && self.m == other.m
    }
}

/// Row-wise componentwise betweenness `M1 ∈ ⟨M2, M3⟩`.
pub fn profile_between(m1: &Profile, m2: &Profile, m3: &Profile) -> Result<bool> {
    if !m1.same_shape(m2) || !m1.same_shape(m3) {
        return Err(Error::ShapeMismatch(format!(
            "profiles of shape {}x{}, {}x{}, {}x{}",
            m1.n(),
            m1.m(),
            m2.n(),
            m2.m(),
            m3.n(),
            m3.m()
        )));
    }
    for ((r1, r2), r3) in m1.rows.iter().zip(&m2.rows).zip(&m3.rows) {
        if !multiset_between(r1, r2, r3)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_set(values: Vec<Rational>) -> EndpointMultiset {
        EndpointMultiset::new(Domain::unit(), values).unwrap()
    }

    fn vocab(extents: Vec<Option<(Rational, Rational)>>) -> Result<Vocabulary> {
        let n = extents.len();
        Vocabulary::new(
            Domain::unit(),
            default_words(n),
            extents.into_iter().map(|e| e.map(|(l, r)| Extent::new(l, r))).collect(),
        )
    }

    #[test]
    fn encodes_missing_interior_word_as_repeated_endpoint() {
        let (a, b) = (rat(3, 10), rat(7, 10));
        let v = vocab(vec![
            Some((int(0), a.clone())),
            Some((a.clone(), b.clone())),
            None,
            Some((b.clone(), int(1))),
        ])
        .unwrap();
        assert_eq!(encode_vocabulary(&v).unwrap().values(), &[a, b.clone(), b]);
    }

    #[test]
    fn encodes_missing_second_word() {
        let (a, b) = (rat(1, 4), rat(1, 2));
        let v = vocab(vec![
            Some((int(0), a.clone())),
            None,
            Some((a.clone(), b.clone())),
            Some((b.clone(), int(1))),
        ])
        .unwrap();
        assert_eq!(encode_vocabulary(&v).unwrap().values(), &[a.clone(), a, b]);
    }

    #[test]
    fn encodes_missing_first_word_with_lower_bound() {
        let a = rat(2, 5);
        let v = vocab(vec![None, Some((int(0), a.clone())), None, Some((a.clone(), int(1)))]).unwrap();
        assert_eq!(encode_vocabulary(&v).unwrap().values(), &[int(0), a.clone(), a]);
    }

    #[test]
    fn decodes_partial_vocabulary() {
        let (a, b) = (rat(3, 10), rat(7, 10));
        let v = decode_endpoints(&unit_set(vec![a.clone(), b.clone(), b.clone()]));
        assert_eq!(v.active_words(), vec![true, true, false, true]);
        assert_eq!(v.extents()[0], Some(Extent::new(int(0), a.clone())));
        assert_eq!(v.extents()[1], Some(Extent::new(a, b.clone())));
        assert_eq!(v.extents()[3], Some(Extent::new(b, int(1))));
        assert_eq!(v.to_string(), "w1 on (0, 3/10); w2 on [3/10, 7/10); w4 on [7/10, 1)");
    }

    #[test]
    fn decodes_complete_vocabulary() {
        let v = decode_endpoints(&unit_set(vec![rat(1, 5), rat(1, 2)]));
        assert_eq!(v.active_count(), 3);
        assert!(!v.is_degenerate());
    }

    #[test]
    fn degenerate_decode_is_flagged_and_not_encodable() {
        let s = unit_set(vec![int(0), int(0)]);
        let v = decode_endpoints(&s);
        assert!(v.is_degenerate());
        assert_eq!(v.active_words(), vec![false, false, true]);
        assert!(matches!(encode_vocabulary(&v), Err(Error::InvalidVocabulary(_))));
    }

    #[test]
    fn rejects_overlap_order_and_single_word() {
        let overlap = vocab(vec![Some((int(0), rat(1, 2))), Some((rat(1, 4), int(1)))]);
        assert!(matches!(overlap, Err(Error::InvalidVocabulary(_))));
        let reversed = vocab(vec![Some((rat(1, 2), int(1))), Some((int(0), rat(1, 2)))]);
        assert!(matches!(reversed, Err(Error::InvalidVocabulary(_))));
        let hole = vocab(vec![Some((int(0), rat(1, 4))), Some((rat(1, 2), int(1)))]);
        assert!(matches!(hole, Err(Error::InvalidVocabulary(_))));
        let single = vocab(vec![Some((int(0), int(1))), None]);
        assert!(matches!(single, Err(Error::InvalidVocabulary(_))));
    }

    #[test]
    fn endpoint_multiset_invariants() {
        assert!(EndpointMultiset::new(Domain::unit(), vec![rat(1, 2), rat(1, 4)]).is_err());
        assert!(EndpointMultiset::new(Domain::unit(), vec![int(2)]).is_err());
        assert!(EndpointMultiset::new(Domain::unit(), vec![int(0), int(1)]).is_ok());
        assert!(Domain::new(int(1), int(1)).is_err());
    }

    #[test]
    fn betweenness() {
        assert!(between(&int(5), &int(2), &int(9)));
        assert!(between(&int(5), &int(9), &int(2)));
        assert!(!between(&int(1), &int(2), &int(9)));
    }

    #[test]
    fn profile_betweenness() {
        let d = Domain::new(int(0), int(10)).unwrap();
        let p = |r: [i64; 2]| Profile::from_values(d.clone(), vec![vec![int(r[0]), int(r[1])]]).unwrap();
        assert!(profile_between(&p([3, 6]), &p([3, 6]), &p([1, 9])).unwrap());
        assert!(profile_between(&p([3, 6]), &p([2, 5]), &p([4, 7])).unwrap());
        assert!(!profile_between(&p([1, 6]), &p([2, 5]), &p([4, 7])).unwrap());
        let wide = Profile::from_values(d.clone(), vec![vec![int(1)], vec![int(2)]]).unwrap();
        assert!(matches!(
            profile_between(&p([1, 2]), &wide, &p([1, 2])),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn profile_rejects_ragged_rows() {
        let d = Domain::unit();
        let r = Profile::from_values(d, vec![vec![rat(1, 2)], vec![rat(1, 3), rat(1, 2)]]);
        assert!(matches!(r, Err(Error::ShapeMismatch(_))));
    }
}
