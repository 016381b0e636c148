//! Vocabularies induced by labeled exemplars and their aggregation through
//! gaps.
//!
//! When agents only label finitely many shared exemplars, each word is known
//! on the hull of its exemplars and the boundaries between words are only
//! known to lie in open *gaps*. Gaps play the role endpoints play for complete
//! vocabularies: there are always exactly `m` of them, and aggregating them
//! column by column yields an incomplete collective vocabulary.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::rules::PositionVector;
use crate::vocab::{default_words, Domain, Extent, Rational, Vocabulary};

/// One agent's labels: strictly increasing exemplars, each tagged with a
/// 1-based word index, nondecreasing along the exemplars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledExemplars {
    domain: Domain,
    points: Vec<(Rational, usize)>,
}

impl LabeledExemplars {
    pub fn new(domain: Domain, points: Vec<(Rational, usize)>) -> Result<Self> {
        for (e, w) in &points {
            if !domain.contains(e) {
                return Err(Error::InvalidEndpoints(format!("exemplar {e} lies outside the domain")));
            }
            if *w == 0 {
                return Err(Error::InconsistentLabels("word indices are 1-based".into()));
            }
        }
        for pair in points.windows(2) {
            let ((e1, w1), (e2, w2)) = (&pair[0], &pair[1]);
            if e1 >= e2 {
                return Err(Error::InvalidEndpoints(format!(
                    "exemplars must be strictly increasing, got {e1} then {e2}"
                )));
            }
            if w1 > w2 {
                return Err(Error::InconsistentLabels(format!(
                    "exemplar {e2} is labeled w{w2} but the smaller exemplar {e1} is labeled w{w1}"
                )));
            }
        }
        Ok(LabeledExemplars { domain, points })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn points(&self) -> &[(Rational, usize)] {
        &self.points
    }
}

/// A subset of `X` described by its two ends and whether each is included.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Span {
    pub left: Rational,
    pub right: Rational,
    pub left_closed: bool,
    pub right_closed: bool,
}

impl Span {
    pub fn closed(left: Rational, right: Rational) -> Self {
        Span {
            left,
            right,
            left_closed: true,
            right_closed: true,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self.left.cmp(&self.right) {
            Ordering::Less => false,
            Ordering::Equal => !(self.left_closed && self.right_closed),
            Ordering::Greater => true,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = if self.left_closed {
            &self.left <= x
        } else {
            &self.left < x
        };
        let below = if self.right_closed {
            x <= &self.right
        } else {
            x < &self.right
        };
        above && below
    }

    /// Set inclusion `other ⊆ self` for nonempty spans.
    pub fn includes(&self, other: &Span) -> bool {
        let left_ok = self.left < other.left || (self.left == other.left && (self.left_closed || !other.left_closed));
        let right_ok =
            self.right > other.right || (self.right == other.right && (self.right_closed || !other.right_closed));
        left_ok && right_ok
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.left_closed { '[' } else { '(' };
        let close = if self.right_closed { ']' } else { ')' };
        write!(f, "{open}{}, {}{close}", self.left, self.right)
    }
}

/// Per word, the part of `X` known to carry it, or `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedVocabulary {
    domain: Domain,
    spans: Vec<Option<Span>>,
}

impl InducedVocabulary {
    /// Validates that spans are nonempty, inside the closed domain and
    /// ordered by word. Neighbouring spans may touch at a point that at most
    /// one of them contains.
    pub fn from_spans(domain: Domain, spans: Vec<Option<Span>>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidVocabulary(msg));
        if spans.is_empty() {
            return bad("an induced vocabulary needs at least one word".into());
        }
        let mut previous: Option<(usize, &Span)> = None;
        for (k, span) in spans.iter().enumerate() {
            let Some(span) = span else { continue };
            if span.is_empty() {
                return bad(format!("w{} has an empty span {span}", k + 1));
            }
            if !domain.contains_closed(&span.left) || !domain.contains_closed(&span.right) {
                return bad(format!("w{} span {span} leaves the domain", k + 1));
            }
            if let Some((j, prev)) = previous {
                let ordered =
                    prev.right < span.left || (prev.right == span.left && !(prev.right_closed && span.left_closed));
                if !ordered {
                    return bad(format!("w{} span {prev} overlaps w{} span {span}", j + 1, k + 1));
                }
            }
            previous = Some((k, span));
        }
        Ok(InducedVocabulary { domain, spans })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn spans(&self) -> &[Option<Span>] {
        &self.spans
    }

    /// Number of gaps, one less than the number of words.
    pub fn m(&self) -> usize {
        self.spans.len() - 1
    }

    /// 1-based indices of words with a span.
    pub fn attributed_words(&self) -> Vec<usize> {
        (1..=self.spans.len())
            .filter(|&k| self.spans[k - 1].is_some())
            .collect()
    }

    /// Whether the spans cover all of `X`.
    pub fn is_complete(&self) -> bool {
        let present: Vec<&Span> = self.spans.iter().flatten().collect();
        let (Some(first), Some(last)) = (present.first(), present.last()) else {
            return false;
        };
        &first.left == self.domain.lower()
            && &last.right == self.domain.upper()
            && present
                .windows(2)
                .all(|w| w[0].right == w[1].left && (w[0].right_closed || w[1].left_closed))
    }

    /// Converts a complete induced vocabulary with left-closed, right-open
    /// spans into a [`Vocabulary`].
    pub fn to_vocabulary(&self) -> Result<Vocabulary> {
        if !self.is_complete() {
            return Err(Error::InvalidVocabulary("induced vocabulary leaves gaps".into()));
        }
        let extents = self
            .spans
            .iter()
            .map(|s| {
                s.as_ref().map(|s| {
                    let left_ok = s.left_closed != (&s.left == self.domain.lower());
                    (left_ok && !s.right_closed).then(|| Extent::new(s.left.clone(), s.right.clone()))
                })
            })
            .map(|e| match e {
                None => Ok(None),
                Some(Some(extent)) => Ok(Some(extent)),
                Some(None) => Err(Error::InvalidVocabulary(
                    "spans do not follow the left-closed convention".into(),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        Vocabulary::new(self.domain.clone(), default_words(self.spans.len()), extents)
    }
}

impl fmt::Display for InducedVocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, span) in self.spans.iter().enumerate() {
            if let Some(span) = span {
                if !first {
                    write!(f, "; ")?;
                }
                first = false;
                write!(f, "w{} on {span}", k + 1)?;
            }
        }
        if first {
            write!(f, "no word attributed")?;
        }
        Ok(())
    }
}

/// Hull of each word's exemplars, with the first and last word extended to
/// the domain bounds when observed.
pub fn induce(ex: &LabeledExemplars, m: usize) -> Result<InducedVocabulary> {
    let words = m + 1;
    if let Some((e, w)) = ex.points.iter().find(|(_, w)| *w > words) {
        return Err(Error::InconsistentLabels(format!(
            "exemplar {e} is labeled w{w} but there are only {words} words"
        )));
    }
    let d = &ex.domain;
    let spans = (1..=words)
        .map(|k| {
            let mut hits = ex.points.iter().filter(|(_, w)| *w == k).map(|(e, _)| e);
            let lo = hits.next()?;
            let hi = hits.next_back().unwrap_or(lo);
            let mut span = Span::closed(lo.clone(), hi.clone());
            if k == 1 {
                span.left = d.lower().clone();
                span.left_closed = false;
            }
            if k == words {
                span.right = d.upper().clone();
                span.right_closed = false;
            }
            Some(span)
        })
        .collect();
    InducedVocabulary::from_spans(d.clone(), spans)
}

/// The open interval `(left, right)` known to contain a word boundary.
/// `left == right` is a zero-length gap between touching observations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gap {
    pub left: Rational,
    pub right: Rational,
}

impl Gap {
    pub fn new(left: Rational, right: Rational) -> Self {
        Gap { left, right }
    }

    pub fn is_zero_length(&self) -> bool {
        self.left == self.right
    }

    /// `self ⊆ other` as intervals.
    pub fn within(&self, other: &Gap) -> bool {
        other.left <= self.left && self.right <= other.right
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.left, self.right)
    }
}

/// The `m` gaps of an induced vocabulary, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapSequence {
    domain: Domain,
    gaps: Vec<Gap>,
}

impl GapSequence {
    pub fn new(domain: Domain, gaps: Vec<Gap>) -> Result<Self> {
        for g in &gaps {
            if g.left > g.right || !domain.contains_closed(&g.left) || !domain.contains_closed(&g.right) {
                return Err(Error::MalformedGaps(format!(
                    "gap {g} is not an interval of the domain"
                )));
            }
        }
        Ok(GapSequence { domain, gaps })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    /// Whether lefts and rights are both nondecreasing.
    pub fn is_ordered(&self) -> bool {
        self.gaps
            .windows(2)
            .all(|w| w[0].left <= w[1].left && w[0].right <= w[1].right)
    }
}

impl fmt::Display for GapSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, g) in self.gaps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ")")
    }
}

/// Gap `k` runs from the last observation of words `1..=k` to the first
/// observation of words `k+1..=m+1`, defaulting to the domain bounds.
pub fn gaps_of(v: &InducedVocabulary) -> GapSequence {
    let d = &v.domain;
    let gaps = (1..=v.m())
        .map(|k| {
            let left = v.spans[..k]
                .iter()
                .flatten()
                .map(|s| &s.right)
                .max()
                .unwrap_or(d.lower());
            let right = v.spans[k..]
                .iter()
                .flatten()
                .map(|s| &s.left)
                .min()
                .unwrap_or(d.upper());
            Gap::new(left.clone(), right.clone())
        })
        .collect();
    GapSequence {
        domain: d.clone(),
        gaps,
    }
}

/// How gaps from different agents are ranked within a column.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum GapOrder {
    /// By left end, ties broken by right end.
    #[default]
    Lexicographic,
    /// By right end, ties broken by left end.
    ByRight,
    /// By midpoint, ties broken lexicographically.
    ByMidpoint,
}

impl GapOrder {
    pub fn compare(self, a: &Gap, b: &Gap) -> Ordering {
        let lex = || a.left.cmp(&b.left).then_with(|| a.right.cmp(&b.right));
        match self {
            GapOrder::Lexicographic => lex(),
            GapOrder::ByRight => a.right.cmp(&b.right).then_with(|| a.left.cmp(&b.left)),
            GapOrder::ByMidpoint => (&a.left + &a.right).cmp(&(&b.left + &b.right)).then_with(lex),
        }
    }
}

/// Positional gap aggregation with the lexicographic order.
pub fn aggregate_gaps(matrix: &[GapSequence], p: &PositionVector) -> Result<GapSequence> {
    aggregate_gaps_with(matrix, p, GapOrder::Lexicographic)
}

/// Selects, for each column `k`, the `p_k`-th smallest gap under `order`.
pub fn aggregate_gaps_with(matrix: &[GapSequence], p: &PositionVector, order: GapOrder) -> Result<GapSequence> {
    let Some(first) = matrix.first() else {
        return Err(Error::ShapeMismatch("no gap rows".into()));
    };
    let m = first.len();
    if let Some(row) = matrix.iter().find(|g| g.len() != m) {
        return Err(Error::ShapeMismatch(format!(
            "gap rows of length {m} and {}",
            row.len()
        )));
    }
    if matrix.iter().any(|g| g.domain != first.domain) {
        return Err(Error::DomainMismatch("gap rows use different domains".into()));
    }
    p.check_shape(matrix.len(), m)?;
    let gaps = (0..m)
        .map(|k| {
            let mut column: Vec<&Gap> = matrix.iter().map(|g| &g.gaps[k]).collect();
            column.sort_by(|a, b| order.compare(a, b));
            column[p.positions()[k] - 1].clone()
        })
        .collect();
    Ok(GapSequence {
        domain: first.domain.clone(),
        gaps,
    })
}

/// Attributes each segment between consecutive distinct gaps to the word it
/// separates. Coincident gaps leave the words they jointly bound without a
/// segment. At a zero-length gap the point itself goes to the word on its
/// right, matching left-closed extents.
pub fn collective_incomplete(g: &GapSequence) -> Result<InducedVocabulary> {
    if !g.is_ordered() {
        return Err(Error::MalformedGaps(format!("gaps {g} are not ordered")));
    }
    let d = &g.domain;
    let m = g.len();
    let start = |k: usize| -> (Rational, bool) {
        if k == 0 {
            (d.lower().clone(), false)
        } else {
            (g.gaps[k - 1].right.clone(), g.gaps[k - 1].right != *d.upper())
        }
    };
    let end = |k: usize| -> (Rational, bool) {
        if k == m {
            (d.upper().clone(), false)
        } else {
            let gap = &g.gaps[k];
            (gap.left.clone(), !gap.is_zero_length() && gap.left != *d.lower())
        }
    };
    let spans = (0..=m)
        .map(|k| {
            if k > 0 && k < m && g.gaps[k - 1] == g.gaps[k] {
                return None;
            }
            let ((left, left_closed), (right, right_closed)) = (start(k), end(k));
            let span = Span {
                left,
                right,
                left_closed,
                right_closed,
            };
            (!span.is_empty()).then_some(span)
        })
        .collect();
    InducedVocabulary::from_spans(d.clone(), spans)
}

/// Every agent labels the same exemplars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExemplarProfile {
    domain: Domain,
    m: usize,
    exemplars: Vec<Rational>,
    labels: Vec<Vec<usize>>,
}

impl ExemplarProfile {
    pub fn new(domain: Domain, m: usize, exemplars: Vec<Rational>, labels: Vec<Vec<usize>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::ShapeMismatch(
                "an exemplar profile needs at least one agent".into(),
            ));
        }
        let profile = ExemplarProfile {
            domain,
            m,
            exemplars,
            labels,
        };
        for (i, row) in profile.labels.iter().enumerate() {
            if row.len() != profile.exemplars.len() {
                return Err(Error::ShapeMismatch(format!(
                    "agent {} labels {} of {} exemplars",
                    i + 1,
                    row.len(),
                    profile.exemplars.len()
                )));
            }
            induce(&profile.agent(i)?, m)?;
        }
        Ok(profile)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn exemplars(&self) -> &[Rational] {
        &self.exemplars
    }

    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    /// Agent `i` (0-based) as labeled exemplars.
    pub fn agent(&self, i: usize) -> Result<LabeledExemplars> {
        let points = self
            .exemplars
            .iter()
            .cloned()
            .zip(self.labels[i].iter().copied())
            .collect();
        LabeledExemplars::new(self.domain.clone(), points)
    }

    pub fn induced(&self) -> Result<Vec<InducedVocabulary>> {
        (0..self.n()).map(|i| induce(&self.agent(i)?, self.m)).collect()
    }

    pub fn gap_matrix(&self) -> Result<Vec<GapSequence>> {
        Ok(self.induced()?.iter().map(gaps_of).collect())
    }

    /// Collective gaps under `p` and the incomplete vocabulary they induce.
    pub fn collective(&self, p: &PositionVector) -> Result<(GapSequence, InducedVocabulary)> {
        let gaps = aggregate_gaps(&self.gap_matrix()?, p)?;
        let vocabulary = collective_incomplete(&gaps)?;
        Ok((gaps, vocabulary))
    }

    /// Adds exemplars with one label per agent each.
    pub fn extended(&self, additions: &[(Rational, Vec<usize>)]) -> Result<Self> {
        let mut points: Vec<(Rational, Vec<usize>)> = self
            .exemplars
            .iter()
            .enumerate()
            .map(|(j, e)| (e.clone(), self.labels.iter().map(|row| row[j]).collect()))
            .collect();
        points.extend(additions.iter().cloned());
        points.sort_by(|a, b| a.0.cmp(&b.0));
        let exemplars = points.iter().map(|(e, _)| e.clone()).collect();
        let labels = (0..self.n())
            .map(|i| points.iter().map(|(_, ls)| ls.get(i).copied().unwrap_or(0)).collect())
            .collect();
        ExemplarProfile::new(self.domain.clone(), self.m, exemplars, labels)
    }
}

/// Outcome of comparing collective results before and after more exemplars
/// are labeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncrementalReport {
    pub before: GapSequence,
    pub after: GapSequence,
    /// 1-based gaps that did not contract.
    pub widened_gaps: Vec<usize>,
    /// 1-based words whose collective span shrank or vanished.
    pub shrunk_words: Vec<usize>,
}

impl IncrementalReport {
    pub fn holds(&self) -> bool {
        self.widened_gaps.is_empty() && self.shrunk_words.is_empty()
    }
}

/// Labeling more exemplars may only contract collective gaps and expand
/// collective word spans.
pub fn check_incremental_consistency(
    before: &ExemplarProfile,
    after: &ExemplarProfile,
    p: &PositionVector,
) -> Result<IncrementalReport> {
    if before.domain != after.domain || before.m != after.m || before.n() != after.n() {
        return Err(Error::Precondition("profiles differ in domain, words or agents".into()));
    }
    for (j, e) in before.exemplars.iter().enumerate() {
        let Some(j2) = after.exemplars.iter().position(|x| x == e) else {
            return Err(Error::Precondition(format!("exemplar {e} was dropped")));
        };
        if let Some(i) = (0..before.n()).find(|&i| before.labels[i][j] != after.labels[i][j2]) {
            return Err(Error::Precondition(format!("agent {} relabeled exemplar {e}", i + 1)));
        }
    }
    let (gaps_before, vocab_before) = before.collective(p)?;
    let (gaps_after, vocab_after) = after.collective(p)?;
    let widened_gaps = (0..gaps_before.len())
        .filter(|&k| !gaps_after.gaps[k].within(&gaps_before.gaps[k]))
        .map(|k| k + 1)
        .collect();
    let shrunk_words = vocab_before
        .spans
        .iter()
        .zip(&vocab_after.spans)
        .enumerate()
        .filter(|(_, (b, a))| match (b, a) {
            (Some(b), Some(a)) => !a.includes(b),
            (Some(_), None) => true,
            _ => false,
        })
        .map(|(k, _)| k + 1)
        .collect();
    Ok(IncrementalReport {
        before: gaps_before,
        after: gaps_after,
        widened_gaps,
        shrunk_words,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::{int, rat};

    fn midpoint(a: &Rational, b: &Rational) -> Rational {
        (a + b) / int(2)
    }

    fn abc() -> (Rational, Rational, Rational) {
        (rat(1, 5), rat(1, 2), rat(7, 10))
    }

    fn three_exemplars() -> ExemplarProfile {
        let (a, b, c) = abc();
        ExemplarProfile::new(
            Domain::unit(),
            3,
            vec![a, b, c],
            vec![vec![1, 3, 4], vec![2, 2, 3], vec![1, 3, 3]],
        )
        .unwrap()
    }

    fn gap(l: &Rational, r: &Rational) -> Gap {
        Gap::new(l.clone(), r.clone())
    }

    #[test]
    fn gap_matrix_rows() {
        let (a, b, c) = abc();
        let (zero, one) = (int(0), int(1));
        let rows = three_exemplars().gap_matrix().unwrap();
        assert_eq!(rows[0].gaps(), &[gap(&a, &b), gap(&a, &b), gap(&b, &c)]);
        assert_eq!(rows[1].gaps(), &[gap(&zero, &a), gap(&b, &c), gap(&c, &one)]);
        assert_eq!(rows[2].gaps(), &[gap(&a, &b), gap(&a, &b), gap(&c, &one)]);
    }

    #[test]
    fn median_gaps_and_collective_words() {
        let (a, b, c) = abc();
        let p = PositionVector::uniform(2, 3).unwrap();
        let (gaps, vocab) = three_exemplars().collective(&p).unwrap();
        assert_eq!(gaps.gaps(), &[gap(&a, &b), gap(&a, &b), gap(&c, &int(1))]);
        assert_eq!(vocab.attributed_words(), vec![1, 3]);
        let w1 = vocab.spans()[0].as_ref().unwrap();
        assert_eq!(w1.to_string(), "(0, 1/5]");
        let w3 = vocab.spans()[2].as_ref().unwrap();
        assert_eq!(*w3, Span::closed(b, c));
        assert_eq!(vocab.to_string(), "w1 on (0, 1/5]; w3 on [1/2, 7/10]");
    }

    #[test]
    fn induce_extends_boundary_words() {
        let d = Domain::unit();
        let ex = LabeledExemplars::new(
            d.clone(),
            vec![(rat(1, 10), 2), (rat(2, 10), 3), (rat(3, 10), 3), (rat(5, 10), 6)],
        )
        .unwrap();
        let v = induce(&ex, 5).unwrap();
        assert_eq!(v.spans()[2], Some(Span::closed(rat(1, 5), rat(3, 10))));
        assert_eq!(v.spans()[5].as_ref().unwrap().to_string(), "[1/2, 1)");
        assert_eq!(v.spans()[1], Some(Span::closed(rat(1, 10), rat(1, 10))));
        assert!(induce(&ex, 4).is_err());
    }

    #[test]
    fn order_violation_is_rejected() {
        let err = LabeledExemplars::new(Domain::unit(), vec![(rat(1, 10), 3), (rat(2, 10), 2)]);
        assert!(matches!(err, Err(Error::InconsistentLabels(_))));
    }

    #[test]
    fn zero_length_gaps_decode_like_endpoints() {
        let d = Domain::unit();
        let g = GapSequence::new(
            d.clone(),
            vec![gap(&rat(1, 4), &rat(1, 4)), gap(&rat(1, 2), &rat(1, 2))],
        )
        .unwrap();
        let v = collective_incomplete(&g).unwrap();
        assert!(v.is_complete());
        assert_eq!(
            v.to_vocabulary().unwrap().to_string(),
            "w1 on (0, 1/4); w2 on [1/4, 1/2); w3 on [1/2, 1)"
        );
        let whole = GapSequence::new(d.clone(), vec![gap(&int(0), &int(1)); 2]).unwrap();
        assert!(collective_incomplete(&whole).unwrap().attributed_words().is_empty());
        let tangled = GapSequence::new(d, vec![gap(&rat(1, 2), &rat(3, 4)), gap(&rat(1, 4), &rat(3, 4))]).unwrap();
        assert!(matches!(collective_incomplete(&tangled), Err(Error::MalformedGaps(_))));
    }

    #[test]
    fn incremental_consistency_on_three_exemplars() {
        let before = three_exemplars();
        let d_point = midpoint(&abc().2, &int(1));
        let after = before.extended(&[(d_point.clone(), vec![4, 4, 4])]).unwrap();
        let p = PositionVector::uniform(2, 3).unwrap();
        let report = check_incremental_consistency(&before, &after, &p).unwrap();
        assert!(report.holds());
        assert_eq!(report.after.gaps()[2], gap(&abc().2, &d_point));
        let same = check_incremental_consistency(&before, &before, &p).unwrap();
        assert!(same.holds() && same.before == same.after);
        let (a, b, c) = abc();
        let relabeled = ExemplarProfile::new(
            Domain::unit(),
            3,
            vec![a, b, c],
            vec![vec![1, 3, 4], vec![2, 2, 3], vec![1, 1, 3]],
        )
        .unwrap();
        assert!(check_incremental_consistency(&before, &relabeled, &p).is_err());
    }

    #[test]
    fn unanimous_gap_rows_are_fixed() {
        let row = three_exemplars().gap_matrix().unwrap()[1].clone();
        let p = PositionVector::uniform(2, 3).unwrap();
        let out = aggregate_gaps(&[row.clone(), row.clone(), row.clone()], &p).unwrap();
        assert_eq!(out, row);
        let single = aggregate_gaps(std::slice::from_ref(&row), &PositionVector::uniform(1, 3).unwrap()).unwrap();
        assert_eq!(single, row);
    }
}
