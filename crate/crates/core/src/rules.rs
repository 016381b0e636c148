//! Endpoint aggregation rules: order statistics and p-rules, the symmetric
//! median, the mean, dictatorships, the (non-separable) multiset rule and
//! extended medians with phantom voters.

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::vocab::{Domain, EndpointMultiset, Profile, Rational};

/// Anything that maps a profile to a sequence of `m` collective endpoints.
///
/// The output is not required to be ordered; consistency is a property the
/// checkers in [`crate::axioms`] verify.
pub trait Aggregator {
    /// Short descriptor used in reports.
    fn describe(&self) -> String;

    fn evaluate(&self, profile: &Profile) -> Result<Vec<Rational>>;
}

/// The `k`-th smallest element (1-based, counting multiplicity).
pub fn order_statistic(xs: &[Rational], k: usize) -> Result<Rational> {
    if k == 0 || k > xs.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: xs.len(),
        });
    }
    let mut buf = xs.to_vec();
    let (_, kth, _) = buf.select_nth_unstable(k - 1);
    Ok(kth.clone())
}

/// Positions `1 ≤ p_1 ≤ … ≤ p_m` of a p-rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PositionVector(Vec<usize>);

impl PositionVector {
    pub fn new(positions: Vec<usize>) -> Result<Self> {
        if positions.contains(&0) {
            return Err(Error::InvalidPositions(
                "positions are 1-based and must be nonzero".into(),
            ));
        }
        if let Some(k) = positions.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidPositions(format!(
                "positions must be nondecreasing, but p_{} = {} > p_{} = {}",
                k + 1,
                positions[k],
                k + 2,
                positions[k + 1]
            )));
        }
        Ok(PositionVector(positions))
    }

    /// The same position for every endpoint.
    pub fn uniform(position: usize, m: usize) -> Result<Self> {
        PositionVector::new(vec![position; m])
    }

    pub fn positions(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks `p_m ≤ n` and `len = m`.
    pub fn check_shape(&self, n: usize, m: usize) -> Result<()> {
        if self.0.len() != m {
            return Err(Error::ShapeMismatch(format!(
                "{} positions for {m} endpoints",
                self.0.len()
            )));
        }
        if let Some(&p) = self.0.last() {
            if p > n {
                return Err(Error::ShapeMismatch(format!(
                    "position {p} exceeds the number of agents {n}"
                )));
            }
        }
        Ok(())
    }

    /// Every nondecreasing position vector of length `m` over `1..=n`.
    pub fn enumerate(n: usize, m: usize) -> Vec<PositionVector> {
        fn extend(n: usize, m: usize, prefix: &mut Vec<usize>, out: &mut Vec<PositionVector>) {
            if prefix.len() == m {
                out.push(PositionVector(prefix.clone()));
                return;
            }
            let start = prefix.last().copied().unwrap_or(1);
            for p in start..=n {
                prefix.push(p);
                extend(n, m, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        extend(n, m, &mut Vec::with_capacity(m), &mut out);
        out
    }
}

impl fmt::Display for PositionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `p_k + p_{m−k+1} = n + 1` for every `k`.
pub fn is_symmetric(p: &PositionVector, n: usize) -> bool {
    let ps = p.positions();
    ps.iter().zip(ps.iter().rev()).all(|(a, b)| a + b == n + 1)
}

/// The symmetric median positions: `⌊(n+1)/2⌋` on the first half of the
/// endpoints and `⌈(n+1)/2⌉` on the second half.
///
/// For odd `m` the middle endpoint must satisfy `2 p = n + 1`, so `n` has to
/// be odd as well.
pub fn median_positions(n: usize, m: usize) -> Result<PositionVector> {
    if n == 0 {
        return Err(Error::ShapeMismatch("no agents".into()));
    }
    if m % 2 == 1 && n.is_multiple_of(2) {
        return Err(Error::ParityViolation { n, m });
    }
    let low = n.div_ceil(2);
    let high = n / 2 + 1;
    let half = m.div_ceil(2);
    let positions = (1..=m).map(|k| if k <= half { low } else { high });
    PositionVector::new(positions.collect())
}

fn check_nonempty(profile: &Profile) -> Result<()> {
    if profile.n() == 0 {
        return Err(Error::ShapeMismatch("no agents".into()));
    }
    Ok(())
}

/// `(M^1_(p_1), …, M^m_(p_m))`.
pub fn apply_p_rule(profile: &Profile, p: &PositionVector) -> Result<EndpointMultiset> {
    let values = p_rule_values(profile, p)?;
    EndpointMultiset::new(profile.domain().clone(), values)
}

fn p_rule_values(profile: &Profile, p: &PositionVector) -> Result<Vec<Rational>> {
    check_nonempty(profile)?;
    p.check_shape(profile.n(), profile.m())?;
    p.positions()
        .iter()
        .enumerate()
        .map(|(k, &pk)| order_statistic(&profile.column(k), pk))
        .collect()
}

/// Exact column means.
pub fn apply_mean(profile: &Profile) -> Result<EndpointMultiset> {
    EndpointMultiset::new(profile.domain().clone(), mean_values(profile)?)
}

fn mean_values(profile: &Profile) -> Result<Vec<Rational>> {
    check_nonempty(profile)?;
    let n = Rational::from_integer(BigInt::from(profile.n()));
    Ok((0..profile.m())
        .map(|k| profile.column(k).into_iter().sum::<Rational>() / &n)
        .collect())
}

/// The row of agent `agent` (1-based).
pub fn apply_dictator(profile: &Profile, agent: usize) -> Result<EndpointMultiset> {
    if agent == 0 || agent > profile.n() {
        return Err(Error::IndexOutOfRange {
            index: agent,
            len: profile.n(),
        });
    }
    Ok(profile.row(agent - 1).clone())
}

/// Pools all `n·m` endpoints, cuts the sorted pool into `m` groups of `n`
/// and takes the median of each group.
pub fn apply_multiset_rule(profile: &Profile) -> Result<EndpointMultiset> {
    EndpointMultiset::new(profile.domain().clone(), multiset_values(profile)?)
}

fn multiset_values(profile: &Profile) -> Result<Vec<Rational>> {
    check_nonempty(profile)?;
    let n = profile.n();
    if n.is_multiple_of(2) {
        return Err(Error::EvenAgentCount(n));
    }
    let mut pool: Vec<Rational> = profile.rows().iter().flat_map(|r| r.values().iter().cloned()).collect();
    pool.sort();
    Ok(pool.chunks(n).map(|group| group[(n - 1) / 2].clone()).collect())
}

/// Calibration parameters `q^1 … q^m` of an extended median rule: one
/// nondecreasing column of `n − 1` phantoms per endpoint, nondecreasing in `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhantomMatrix {
    domain: Domain,
    columns: Vec<Vec<Rational>>,
}

impl PhantomMatrix {
    pub fn new(domain: Domain, columns: Vec<Vec<Rational>>) -> Result<Self> {
        let width = columns.first().map_or(0, Vec::len);
        for (k, col) in columns.iter().enumerate() {
            if col.len() != width {
                return Err(Error::InvalidPhantoms(format!(
                    "column {} has {} phantoms, column 1 has {width}",
                    k + 1,
                    col.len()
                )));
            }
            if let Some(q) = col.iter().find(|q| !domain.contains_closed(q)) {
                return Err(Error::InvalidPhantoms(format!(
                    "phantom {q} in column {} lies outside the closed domain",
                    k + 1
                )));
            }
            if col.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::InvalidPhantoms(format!("column {} is not nondecreasing", k + 1)));
            }
        }
        for k in 1..columns.len() {
            if let Some(l) = (0..width).find(|&l| columns[k - 1][l] > columns[k][l]) {
                return Err(Error::InvalidPhantoms(format!(
                    "phantom {} decreases from column {k} to column {}",
                    l + 1,
                    k + 1
                )));
            }
        }
        Ok(PhantomMatrix { domain, columns })
    }

    /// The phantoms reproducing the p-rule `p` with `n` agents: column `k`
    /// holds `n − p_k` copies of `inf X` followed by `p_k − 1` copies of `sup X`.
    pub fn for_positions(domain: Domain, p: &PositionVector, n: usize) -> Result<Self> {
        p.check_shape(n, p.len())?;
        let columns = p
            .positions()
            .iter()
            .map(|&pk| {
                let mut col = vec![domain.lower().clone(); n - pk];
                col.extend(std::iter::repeat_n(domain.upper().clone(), pk - 1));
                col
            })
            .collect();
        PhantomMatrix::new(domain, columns)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn columns(&self) -> &[Vec<Rational>] {
        &self.columns
    }

    /// Number of endpoints `m`.
    pub fn m(&self) -> usize {
        self.columns.len()
    }

    /// Number of agents the matrix is calibrated for.
    pub fn n(&self) -> usize {
        self.columns.first().map_or(1, |c| c.len() + 1)
    }

    /// Whether every phantom is `inf X` or `sup X`, i.e. the rule is a p-rule.
    pub fn is_improper(&self) -> bool {
        self.columns
            .iter()
            .flatten()
            .all(|q| q == self.domain.lower() || q == self.domain.upper())
    }
}

/// `med(s_1, …, s_n, q_1, …, q_{n−1})`: the middle of the `2n − 1` pooled values.
pub fn extended_median(column: &[Rational], phantoms: &[Rational]) -> Result<Rational> {
    if column.is_empty() || phantoms.len() + 1 != column.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} reports need {} phantoms, got {}",
            column.len(),
            column.len().saturating_sub(1),
            phantoms.len()
        )));
    }
    let pool: Vec<Rational> = column.iter().chain(phantoms).cloned().collect();
    order_statistic(&pool, column.len())
}

/// Declarative aggregation rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rule {
    PRule(PositionVector),
    ExtendedMedian(PhantomMatrix),
    Mean,
    Multiset,
    /// Dictatorship of the given agent (1-based).
    Dictator(usize),
}

impl Rule {
    /// The symmetric median p-rule for `n` agents and `m` endpoints.
    pub fn median(n: usize, m: usize) -> Result<Self> {
        median_positions(n, m).map(Rule::PRule)
    }

    /// Validates the rule against a profile shape before evaluation.
    pub fn check_shape(&self, n: usize, m: usize) -> Result<()> {
        match self {
            Rule::PRule(p) => p.check_shape(n, m),
            Rule::ExtendedMedian(q) => {
                if q.m() != m || (m > 0 && q.n() != n) {
                    Err(Error::ShapeMismatch(format!(
                        "phantom matrix is {}x{} but the profile needs {m} columns of {} phantoms",
                        q.m(),
                        q.n() - 1,
                        n.saturating_sub(1)
                    )))
                } else {
                    Ok(())
                }
            }
            Rule::Mean => Ok(()),
            Rule::Multiset if n.is_multiple_of(2) => Err(Error::EvenAgentCount(n)),
            Rule::Multiset => Ok(()),
            Rule::Dictator(i) if *i == 0 || *i > n => Err(Error::IndexOutOfRange { index: *i, len: n }),
            Rule::Dictator(_) => Ok(()),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::PRule(p) => {
                let parts: Vec<String> = p.positions().iter().map(ToString::to_string).collect();
                write!(f, "p:{}", parts.join(","))
            }
            Rule::ExtendedMedian(_) => write!(f, "emed"),
            Rule::Mean => write!(f, "mean"),
            Rule::Multiset => write!(f, "multiset"),
            Rule::Dictator(i) => write!(f, "dictator:{i}"),
        }
    }
}

impl Aggregator for Rule {
    fn describe(&self) -> String {
        self.to_string()
    }

    fn evaluate(&self, profile: &Profile) -> Result<Vec<Rational>> {
        check_nonempty(profile)?;
        self.check_shape(profile.n(), profile.m())?;
        match self {
            Rule::PRule(p) => p_rule_values(profile, p),
            Rule::ExtendedMedian(q) => {
                if q.domain() != profile.domain() {
                    return Err(Error::DomainMismatch(
                        "phantoms and profile use different domains".into(),
                    ));
                }
                q.columns()
                    .iter()
                    .enumerate()
                    .map(|(k, qk)| extended_median(&profile.column(k), qk))
                    .collect()
            }
            Rule::Mean => mean_values(profile),
            Rule::Multiset => multiset_values(profile),
            Rule::Dictator(i) => Ok(apply_dictator(profile, *i)?.into_values()),
        }
    }
}

impl<A: Aggregator + ?Sized> Aggregator for &A {
    fn describe(&self) -> String {
        (**self).describe()
    }

    fn evaluate(&self, profile: &Profile) -> Result<Vec<Rational>> {
        (**self).evaluate(profile)
    }
}

/// Evaluates `rule` on `profile`, validating the shape first and the
/// ordering of the result.
pub fn apply_rule(profile: &Profile, rule: &Rule) -> Result<EndpointMultiset> {
    let values = rule.evaluate(profile)?;
    EndpointMultiset::new(profile.domain().clone(), values)
}

/// Reflects every row through `x ↦ inf X + sup X − x` and restores the
/// nondecreasing order, which reverses the column order.
pub fn reflect_profile(profile: &Profile) -> Profile {
    let d = profile.domain();
    let rows = profile
        .rows()
        .iter()
        .map(|r| r.values().iter().rev().map(|x| d.reflect(x)).collect())
        .collect();
    Profile::from_values(d.clone(), rows).expect("reflection preserves row validity")
}

/// Evaluates the rule under the reversed order on `X`, reporting the result
/// in the original coordinates and in the reversed reading direction.
///
/// For a symmetric p-rule this equals the ordinary result read right to left.
pub fn evaluate_reversed<A: Aggregator + ?Sized>(rule: &A, profile: &Profile) -> Result<Vec<Rational>> {
    let d = profile.domain();
    let out = rule.evaluate(&reflect_profile(profile))?;
    Ok(out.iter().map(|x| d.reflect(x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::{int, rat};

    fn profile(lower: i64, upper: i64, rows: &[&[i64]]) -> Profile {
        let d = Domain::new(int(lower), int(upper)).unwrap();
        Profile::from_values(d, rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn order_statistics() {
        assert_eq!(order_statistic(&ints(&[2, 6, 4, 4, 5]), 3).unwrap(), int(4));
        assert_eq!(order_statistic(&ints(&[7]), 1).unwrap(), int(7));
        assert_eq!(order_statistic(&ints(&[1, 2, 3, 4, 5]), 2).unwrap(), int(2));
        assert!(matches!(
            order_statistic(&ints(&[1, 2]), 3),
            Err(Error::IndexOutOfRange { index: 3, len: 2 })
        ));
        assert!(order_statistic(&ints(&[1, 2]), 0).is_err());
    }

    #[test]
    fn median_position_formula() {
        assert_eq!(median_positions(3, 4).unwrap().positions(), &[2, 2, 2, 2]);
        assert_eq!(median_positions(4, 2).unwrap().positions(), &[2, 3]);
        assert_eq!(median_positions(4, 4).unwrap().positions(), &[2, 2, 3, 3]);
        assert_eq!(median_positions(5, 3).unwrap().positions(), &[3, 3, 3]);
        assert_eq!(median_positions(4, 3), Err(Error::ParityViolation { n: 4, m: 3 }));
        for n in 1..8 {
            for m in 0..7 {
                if let Ok(p) = median_positions(n, m) {
                    assert!(is_symmetric(&p, n), "n={n} m={m} p={p}");
                }
            }
        }
    }

    #[test]
    fn symmetry() {
        assert!(is_symmetric(&PositionVector::new(vec![2, 3, 4]).unwrap(), 5));
        assert!(!is_symmetric(&PositionVector::new(vec![1, 1]).unwrap(), 3));
        assert!(is_symmetric(&PositionVector::new(vec![2, 2, 2, 2]).unwrap(), 3));
    }

    #[test]
    fn position_vector_validation() {
        assert!(PositionVector::new(vec![2, 1]).is_err());
        assert!(PositionVector::new(vec![0, 1]).is_err());
        let p = PositionVector::new(vec![1, 4]).unwrap();
        assert!(matches!(p.check_shape(3, 2), Err(Error::ShapeMismatch(_))));
        assert_eq!(PositionVector::enumerate(3, 2).len(), 6);
    }

    #[test]
    fn dictator_and_mean_edge_cases() {
        let single = profile(0, 10, &[&[3, 7]]);
        assert_eq!(apply_dictator(&single, 1).unwrap().values(), &ints(&[3, 7])[..]);
        assert_eq!(apply_mean(&single).unwrap().values(), &ints(&[3, 7])[..]);
        let three = profile(0, 10, &[&[1], &[2], &[3]]);
        assert!(matches!(
            apply_dictator(&three, 4),
            Err(Error::IndexOutOfRange { index: 4, len: 3 })
        ));
        assert!(apply_dictator(&three, 0).is_err());
    }

    #[test]
    fn multiset_edge_cases() {
        let single = profile(0, 10, &[&[3, 7]]);
        assert_eq!(apply_multiset_rule(&single).unwrap().values(), &ints(&[3, 7])[..]);
        let same = profile(0, 10, &[&[1, 5], &[1, 5], &[1, 5]]);
        assert_eq!(apply_multiset_rule(&same).unwrap().values(), &ints(&[1, 5])[..]);
        let even = profile(0, 10, &[&[1], &[2]]);
        assert_eq!(apply_multiset_rule(&even), Err(Error::EvenAgentCount(2)));
    }

    #[test]
    fn extended_median_with_phantoms() {
        let col = ints(&[2, 5, 9]);
        assert_eq!(extended_median(&col, &ints(&[0, 100])).unwrap(), int(5));
        assert_eq!(extended_median(&col, &ints(&[0, 0])).unwrap(), int(2));
        assert_eq!(extended_median(&col, &ints(&[100, 100])).unwrap(), int(9));
        let half = extended_median(&[rat(1, 5), rat(7, 10)], &[rat(1, 2)]).unwrap();
        assert_eq!(half, rat(1, 2));
        assert!(matches!(
            extended_median(&col, &ints(&[1])),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn phantom_matrix_validation() {
        let d = Domain::unit();
        assert!(PhantomMatrix::new(d.clone(), vec![vec![rat(1, 2), rat(1, 4)]]).is_err());
        assert!(PhantomMatrix::new(d.clone(), vec![vec![int(2)]]).is_err());
        assert!(PhantomMatrix::new(d.clone(), vec![vec![rat(1, 2)], vec![rat(1, 4)]]).is_err());
        assert!(PhantomMatrix::new(d.clone(), vec![vec![rat(1, 2)], vec![rat(1, 2), int(1)]]).is_err());
        let q = PhantomMatrix::new(d, vec![vec![int(0), rat(1, 3)], vec![rat(1, 4), int(1)]]).unwrap();
        assert_eq!((q.n(), q.m()), (3, 2));
        assert!(!q.is_improper());
    }

    #[test]
    fn rule_shape_is_checked_before_evaluation() {
        let m = profile(0, 10, &[&[1, 2], &[3, 4]]);
        let r = Rule::PRule(PositionVector::new(vec![1, 2, 2]).unwrap());
        assert!(matches!(apply_rule(&m, &r), Err(Error::ShapeMismatch(_))));
        assert_eq!(apply_rule(&m, &Rule::Multiset), Err(Error::EvenAgentCount(2)));
        assert!(apply_rule(&m, &Rule::Dictator(3)).is_err());
        let q = PhantomMatrix::new(Domain::new(int(0), int(10)).unwrap(), vec![vec![int(5)]]).unwrap();
        assert!(matches!(
            apply_rule(&m, &Rule::ExtendedMedian(q)),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn rule_descriptors() {
        assert_eq!(Rule::median(3, 4).unwrap().to_string(), "p:2,2,2,2");
        assert_eq!(Rule::Dictator(2).to_string(), "dictator:2");
        assert_eq!(Rule::Mean.to_string(), "mean");
    }
}
