//! Executable axiom checkers.
//!
//! Universal axioms (anonymity, stability, …) quantify over infinitely many
//! profiles and transformations, so every checker here is a sampler: a
//! `HoldsOnSample` verdict is evidence, a `Violated` verdict carries a witness
//! that [`AxiomReport::recheck`] can replay independently.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rules::{order_statistic, Aggregator, PhantomMatrix, Rule};
use crate::sample::{self, ProfileSampler};
use crate::vocab::{Domain, Profile, Rational};

/// Increasing or decreasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// A strictly monotone piecewise-linear bijection of the closed domain onto
/// itself, given by its breakpoints (corners included).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PiecewiseLinearMap {
    domain: Domain,
    points: Vec<(Rational, Rational)>,
    direction: Direction,
}

impl PiecewiseLinearMap {
    pub fn new(domain: Domain, points: Vec<(Rational, Rational)>, direction: Direction) -> Result<Self> {
        let bad = |msg: &str| Err(Error::Precondition(format!("piecewise-linear map: {msg}")));
        if points.len() < 2 {
            return bad("needs at least the two corner points");
        }
        let (first, last) = (&points[0], &points[points.len() - 1]);
        if &first.0 != domain.lower() || &last.0 != domain.upper() {
            return bad("x-coordinates must span the closed domain");
        }
        let (y_start, y_end) = match direction {
            Direction::Increasing => (domain.lower(), domain.upper()),
            Direction::Decreasing => (domain.upper(), domain.lower()),
        };
        if &first.1 != y_start || &last.1 != y_end {
            return bad("corners must map onto the domain bounds");
        }
        for w in points.windows(2) {
            if w[0].0 >= w[1].0 {
                return bad("x-coordinates must be strictly increasing");
            }
            let monotone = match direction {
                Direction::Increasing => w[0].1 < w[1].1,
                Direction::Decreasing => w[0].1 > w[1].1,
            };
            if !monotone {
                return bad("y-coordinates must be strictly monotone");
            }
        }
        Ok(PiecewiseLinearMap {
            domain,
            points,
            direction,
        })
    }

    pub fn identity(domain: &Domain) -> Self {
        let corners = vec![
            (domain.lower().clone(), domain.lower().clone()),
            (domain.upper().clone(), domain.upper().clone()),
        ];
        PiecewiseLinearMap {
            domain: domain.clone(),
            points: corners,
            direction: Direction::Increasing,
        }
    }

    /// `x ↦ inf X + sup X − x`.
    pub fn reflection(domain: &Domain) -> Self {
        let corners = vec![
            (domain.lower().clone(), domain.upper().clone()),
            (domain.upper().clone(), domain.lower().clone()),
        ];
        PiecewiseLinearMap {
            domain: domain.clone(),
            points: corners,
            direction: Direction::Decreasing,
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Evaluates the map at `x ∈ [inf X, sup X]`.
    pub fn apply(&self, x: &Rational) -> Rational {
        assert!(self.domain.contains_closed(x), "{x} outside the closed domain");
        let i = self
            .points
            .partition_point(|(px, _)| px <= x)
            .clamp(1, self.points.len() - 1);
        let (x0, y0) = &self.points[i - 1];
        let (x1, y1) = &self.points[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Maps an ordered endpoint sequence, restoring nondecreasing order
    /// (which reverses it for a decreasing map).
    pub fn apply_sequence(&self, values: &[Rational]) -> Vec<Rational> {
        let mut out: Vec<Rational> = values.iter().map(|x| self.apply(x)).collect();
        if self.direction == Direction::Decreasing {
            out.reverse();
        }
        out
    }

    /// `φ(M)`, with rows re-sorted.
    pub fn apply_profile(&self, profile: &Profile) -> Profile {
        let rows = profile.rows().iter().map(|r| self.apply_sequence(r.values())).collect();
        Profile::from_values(profile.domain().clone(), rows).expect("monotone image of a valid profile")
    }
}

impl fmt::Display for PiecewiseLinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
        };
        write!(f, "{dir} pl[")?;
        for (i, (x, y)) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "({x},{y})")?;
        }
        write!(f, "]")
    }
}

/// A random monotone map with one to eight interior breakpoints.
pub fn random_monotone_map(domain: &Domain, seed: u64, direction: Direction) -> PiecewiseLinearMap {
    random_map_with(&mut sample::rng(seed), domain, direction)
}

pub fn random_map_with<R: Rng + ?Sized>(rng: &mut R, domain: &Domain, direction: Direction) -> PiecewiseLinearMap {
    const DENOM: u64 = 97;
    let count = rng.gen_range(1..=8usize);
    let draw = |rng: &mut R| {
        let picked = rand::seq::index::sample(rng, DENOM as usize - 1, count);
        let mut ks: Vec<u64> = picked.into_iter().map(|k| k as u64 + 1).collect();
        ks.sort_unstable();
        ks.into_iter()
            .map(|k| sample::lattice_point(domain, k, DENOM))
            .collect::<Vec<_>>()
    };
    let xs = draw(rng);
    let mut ys = draw(rng);
    let (y_start, y_end) = match direction {
        Direction::Increasing => (domain.lower().clone(), domain.upper().clone()),
        Direction::Decreasing => {
            ys.reverse();
            (domain.upper().clone(), domain.lower().clone())
        }
    };
    let mut points = vec![(domain.lower().clone(), y_start)];
    points.extend(xs.into_iter().zip(ys));
    points.push((domain.upper().clone(), y_end));
    PiecewiseLinearMap::new(domain.clone(), points, direction).expect("sorted distinct breakpoints")
}

/// The properties the checkers can report on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    Consistency,
    StrictConsistency,
    Unanimity,
    Anonymity,
    Stability,
    StrongStability,
    Continuity,
    MajoritarianWords,
    MajoritarianExtents,
    WeakMajoritarianExtents,
    StrictResponsiveness,
    Separability,
    Uncompromisingness,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Consistency => "consistency",
            Axiom::StrictConsistency => "strict_consistency",
            Axiom::Unanimity => "unanimity",
            Axiom::Anonymity => "anonymity",
            Axiom::Stability => "stability",
            Axiom::StrongStability => "strong_stability",
            Axiom::Continuity => "continuity",
            Axiom::MajoritarianWords => "majoritarian_words",
            Axiom::MajoritarianExtents => "majoritarian_extents",
            Axiom::WeakMajoritarianExtents => "weak_majoritarian_extents",
            Axiom::StrictResponsiveness => "strict_responsiveness",
            Axiom::Separability => "separability",
            Axiom::Uncompromisingness => "uncompromisingness",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    HoldsOnSample,
    Violated,
}

/// What kind of counterexample a witness records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessDetail {
    /// Collective endpoints `position` and `position + 1` (1-based) are out of order.
    Ordering { position: usize },
    /// These columns (1-based) are constant across agents.
    ConstantColumns(Vec<usize>),
    /// `transformed` is `profile` with rows reordered by this permutation (0-based).
    Permutation(Vec<usize>),
    /// `transformed` is `φ(profile)`.
    Map(PiecewiseLinearMap),
    /// `transformed` is within `epsilon` of `profile` entrywise.
    Perturbation { epsilon: Rational },
    /// Word `word` (1-based) is active for `supporters` agents yet collectively inactive.
    InactiveWord { word: usize, supporters: usize },
    /// `supporters` agents place `(a, b)` inside word `word`, the collective word does not cover it.
    Extent {
        word: usize,
        a: Rational,
        b: Rational,
        supporters: usize,
        weak: bool,
    },
    /// Column `column` (1-based) of `transformed` strictly dominates that of `profile`.
    Responsiveness { column: usize },
    /// `profile` and `transformed` agree on column `column` (1-based) only.
    SharedColumn { column: usize },
    /// `transformed` replaces row `agent` (1-based) of `profile`; the change in
    /// collective endpoint `column` is not bracketed.
    Deviation { agent: usize, column: usize },
}

/// A counterexample: the profile, its transformation, and what the axiom
/// expected versus what the rule produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub profile: Option<Profile>,
    pub transformed: Option<Profile>,
    pub detail: WitnessDetail,
    pub expected: Vec<Rational>,
    pub actual: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub rule: String,
    pub seed: Option<u64>,
    pub samples: usize,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl AxiomReport {
    fn holds(axiom: Axiom, rule: String, seed: Option<u64>, samples: usize) -> Self {
        AxiomReport {
            axiom,
            rule,
            seed,
            samples,
            verdict: Verdict::HoldsOnSample,
            witness: None,
        }
    }

    fn violated(axiom: Axiom, rule: String, seed: Option<u64>, samples: usize, witness: Witness) -> Self {
        AxiomReport {
            axiom,
            rule,
            seed,
            samples,
            verdict: Verdict::Violated,
            witness: Some(witness),
        }
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }

    /// Replays the witness against `rule`. Returns `true` when the recorded
    /// counterexample still demonstrates the violation; `false` for reports
    /// without a witness.
    pub fn recheck<A: Aggregator + ?Sized>(&self, rule: &A) -> Result<bool> {
        let Some(w) = &self.witness else {
            return Ok(false);
        };
        let strict = self.axiom == Axiom::StrictConsistency;
        let need = |p: &Option<Profile>| {
            p.clone()
                .ok_or_else(|| Error::Precondition("witness lacks a profile".into()))
        };
        match &w.detail {
            WitnessDetail::Ordering { position } => {
                let (a, b) = (&w.actual[position - 1], &w.actual[*position]);
                Ok(if strict { a >= b } else { a > b })
            }
            WitnessDetail::ConstantColumns(cols) => {
                let m = need(&w.profile)?;
                let out = rule.evaluate(&m)?;
                Ok(cols.iter().any(|&c| {
                    let col = m.column(c - 1);
                    col.iter().all(|x| x == &col[0]) && out[c - 1] != col[0]
                }))
            }
            WitnessDetail::Permutation(perm) => {
                let m = need(&w.profile)?;
                Ok(rule.evaluate(&m)? != rule.evaluate(&m.permuted(perm))?)
            }
            WitnessDetail::Map(phi) => {
                let m = need(&w.profile)?;
                let lhs = phi.apply_sequence(&rule.evaluate(&m)?);
                let rhs = rule.evaluate(&phi.apply_profile(&m))?;
                Ok(lhs != rhs)
            }
            WitnessDetail::Perturbation { epsilon } => {
                let (m, t) = (need(&w.profile)?, need(&w.transformed)?);
                if max_entry_distance(&m, &t) > *epsilon {
                    return Ok(false);
                }
                let change = max_distance(&rule.evaluate(&m)?, &rule.evaluate(&t)?);
                Ok(change > *epsilon)
            }
            WitnessDetail::InactiveWord { word, .. } => {
                let m = need(&w.profile)?;
                let supporters = majority_word_sets(&m)[word - 1].len();
                let out = rule.evaluate(&m)?;
                Ok(2 * supporters > m.n() && padded(&out, m.domain(), word - 1) >= padded(&out, m.domain(), *word))
            }
            WitnessDetail::Extent { word, a, b, weak, .. } => {
                let m = need(&w.profile)?;
                let report = check_majoritarian_extents(rule, &m, *word, a, b, *weak)?;
                Ok(report.is_violated())
            }
            WitnessDetail::Responsiveness { column } => {
                let (m, t) = (need(&w.profile)?, need(&w.transformed)?);
                let k = column - 1;
                let dominated = m.column(k).iter().zip(t.column(k)).all(|(x, y)| x < &y);
                Ok(dominated && rule.evaluate(&m)?[k] >= rule.evaluate(&t)?[k])
            }
            WitnessDetail::SharedColumn { column } => {
                let (m, t) = (need(&w.profile)?, need(&w.transformed)?);
                let k = column - 1;
                Ok(m.column(k) == t.column(k) && rule.evaluate(&m)?[k] != rule.evaluate(&t)?[k])
            }
            WitnessDetail::Deviation { agent, column } => {
                let (m, t) = (need(&w.profile)?, need(&w.transformed)?);
                let others_fixed = (0..m.n()).all(|i| i + 1 == *agent || m.row(i) == t.row(i));
                if !others_fixed {
                    return Ok(false);
                }
                let report = crate::strategic::check_uncompromising(rule, &m, *agent, t.row(agent - 1), *column)?;
                Ok(report.case == crate::strategic::DeviationCase::Violated)
            }
        }
    }
}

/// `s^k` of a raw endpoint sequence with `s^0 = inf X` and `s^{m+1} = sup X`.
pub(crate) fn padded<'a>(values: &'a [Rational], domain: &'a Domain, k: usize) -> &'a Rational {
    if k == 0 {
        domain.lower()
    } else if k > values.len() {
        domain.upper()
    } else {
        &values[k - 1]
    }
}

fn abs_diff(a: &Rational, b: &Rational) -> Rational {
    if a > b {
        a - b
    } else {
        b - a
    }
}

fn max_distance(xs: &[Rational], ys: &[Rational]) -> Rational {
    xs.iter()
        .zip(ys)
        .map(|(x, y)| abs_diff(x, y))
        .max()
        .unwrap_or_else(|| Rational::from_integer(BigInt::from(0)))
}

fn max_entry_distance(m1: &Profile, m2: &Profile) -> Rational {
    m1.rows()
        .iter()
        .zip(m2.rows())
        .map(|(r1, r2)| max_distance(r1.values(), r2.values()))
        .max()
        .unwrap_or_else(|| Rational::from_integer(BigInt::from(0)))
}

/// Weak (`f^1 ≤ … ≤ f^m`) or strict (`<`) ordering of collective endpoints.
pub fn check_consistency(values: &[Rational], strict: bool) -> AxiomReport {
    let axiom = if strict {
        Axiom::StrictConsistency
    } else {
        Axiom::Consistency
    };
    let bad = values
        .windows(2)
        .position(|w| if strict { w[0] >= w[1] } else { w[0] > w[1] });
    match bad {
        None => AxiomReport::holds(axiom, String::new(), None, 1),
        Some(k) => AxiomReport::violated(
            axiom,
            String::new(),
            None,
            1,
            Witness {
                profile: None,
                transformed: None,
                detail: WitnessDetail::Ordering { position: k + 1 },
                expected: Vec::new(),
                actual: values.to_vec(),
            },
        ),
    }
}

/// A random profile whose columns in `cols` (0-based, ascending) are constant.
fn profile_with_constant_columns<R: Rng + ?Sized>(sampler: &ProfileSampler, rng: &mut R, cols: &[usize]) -> Profile {
    let mut constants: Vec<Rational> = cols.iter().map(|_| sampler.value(rng)).collect();
    constants.sort();
    let rows = (0..sampler.n)
        .map(|_| {
            let mut row: Vec<Rational> = (0..sampler.m)
                .map(|j| {
                    if let Some(idx) = cols.iter().position(|&c| c == j) {
                        return constants[idx].clone();
                    }
                    let x = sampler.value(rng);
                    let before = cols.iter().rposition(|&c| c < j).map(|i| &constants[i]);
                    let after = cols.iter().position(|&c| c > j).map(|i| &constants[i]);
                    let x = match before {
                        Some(lo) if &x < lo => lo.clone(),
                        _ => x,
                    };
                    match after {
                        Some(hi) if &x > hi => hi.clone(),
                        _ => x,
                    }
                })
                .collect();
            row.sort();
            row
        })
        .collect();
    Profile::from_values(sampler.domain.clone(), rows).expect("clamped sorted rows")
}

/// If every agent reports the same `k`-th endpoint, the rule must select it.
pub fn check_unanimity<A: Aggregator + ?Sized>(
    rule: &A,
    sampler: &ProfileSampler,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let mut rng = sample::rng(seed);
    for t in 0..trials {
        let cols: Vec<usize> = if sampler.m == 0 {
            Vec::new()
        } else if t % 2 == 0 {
            (0..sampler.m).collect()
        } else {
            let mut c: Vec<usize> = (0..sampler.m).filter(|_| rng.gen_bool(0.5)).collect();
            if c.is_empty() {
                c.push(rng.gen_range(0..sampler.m));
            }
            c
        };
        let m = profile_with_constant_columns(sampler, &mut rng, &cols);
        let out = rule.evaluate(&m)?;
        if let Some(&c) = cols.iter().find(|&&c| out[c] != m.row(0).values()[c]) {
            let expected = cols.iter().map(|&c| m.row(0).values()[c].clone()).collect();
            let actual = cols.iter().map(|&c| out[c].clone()).collect();
            let _ = c;
            return Ok(AxiomReport::violated(
                Axiom::Unanimity,
                rule.describe(),
                Some(seed),
                t + 1,
                Witness {
                    profile: Some(m),
                    transformed: None,
                    detail: WitnessDetail::ConstantColumns(cols.iter().map(|c| c + 1).collect()),
                    expected,
                    actual,
                },
            ));
        }
    }
    Ok(AxiomReport::holds(
        Axiom::Unanimity,
        rule.describe(),
        Some(seed),
        trials,
    ))
}

/// `f(M) = f(πM)` for random profiles and row permutations.
pub fn check_anonymity<A: Aggregator + ?Sized>(
    rule: &A,
    sampler: &ProfileSampler,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let mut rng = sample::rng(seed);
    for t in 0..trials {
        let m = sampler.profile(&mut rng);
        let perm = sampler.permutation(&mut rng);
        let permuted = m.permuted(&perm);
        let (out, out_perm) = (rule.evaluate(&m)?, rule.evaluate(&permuted)?);
        if out != out_perm {
            return Ok(AxiomReport::violated(
                Axiom::Anonymity,
                rule.describe(),
                Some(seed),
                t + 1,
                Witness {
                    profile: Some(m),
                    transformed: Some(permuted),
                    detail: WitnessDetail::Permutation(perm),
                    expected: out,
                    actual: out_perm,
                },
            ));
        }
    }
    Ok(AxiomReport::holds(
        Axiom::Anonymity,
        rule.describe(),
        Some(seed),
        trials,
    ))
}

/// `φ(f(M)) = f(φ(M))` for one map. A decreasing map checks strong stability.
pub fn check_stability<A: Aggregator + ?Sized>(
    rule: &A,
    profile: &Profile,
    phi: &PiecewiseLinearMap,
) -> Result<AxiomReport> {
    stability_trial(rule, profile, phi, None, 1)
}

fn stability_trial<A: Aggregator + ?Sized>(
    rule: &A,
    profile: &Profile,
    phi: &PiecewiseLinearMap,
    seed: Option<u64>,
    samples: usize,
) -> Result<AxiomReport> {
    if phi.domain() != profile.domain() {
        return Err(Error::DomainMismatch("map and profile use different domains".into()));
    }
    let axiom = match phi.direction() {
        Direction::Increasing => Axiom::Stability,
        Direction::Decreasing => Axiom::StrongStability,
    };
    let transformed = phi.apply_profile(profile);
    let lhs = phi.apply_sequence(&rule.evaluate(profile)?);
    let rhs = rule.evaluate(&transformed)?;
    if lhs == rhs {
        return Ok(AxiomReport::holds(axiom, rule.describe(), seed, samples));
    }
    Ok(AxiomReport::violated(
        axiom,
        rule.describe(),
        seed,
        samples,
        Witness {
            profile: Some(profile.clone()),
            transformed: Some(transformed),
            detail: WitnessDetail::Map(phi.clone()),
            expected: lhs,
            actual: rhs,
        },
    ))
}

/// Stability over random profiles and random monotone maps of one direction.
pub fn check_stability_sampled<A: Aggregator + ?Sized>(
    rule: &A,
    sampler: &ProfileSampler,
    direction: Direction,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let mut rng = sample::rng(seed);
    let axiom = match direction {
        Direction::Increasing => Axiom::Stability,
        Direction::Decreasing => Axiom::StrongStability,
    };
    for t in 0..trials {
        let m = sampler.profile(&mut rng);
        let phi = random_map_with(&mut rng, &sampler.domain, direction);
        let report = stability_trial(rule, &m, &phi, Some(seed), t + 1)?;
        if report.is_violated() {
            return Ok(report);
        }
    }
    Ok(AxiomReport::holds(axiom, rule.describe(), Some(seed), trials))
}

/// Perturbs every entry by at most `epsilon` (multiples of `epsilon / 4`,
/// staying in the closed domain), re-sorts rows, and requires every
/// collective endpoint to move by at most `epsilon`.
///
/// This 1-Lipschitz bound in the sup norm holds for order statistics, the
/// mean, the multiset rule and extended medians; it is a stronger
/// requirement than continuity.
pub fn check_lipschitz<A: Aggregator + ?Sized>(
    rule: &A,
    profile: &Profile,
    epsilon: &Rational,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let mut rng = sample::rng(seed);
    lipschitz_trials(rule, profile, epsilon, trials, seed, &mut rng, 0)
}

fn perturb<R: Rng + ?Sized>(profile: &Profile, epsilon: &Rational, rng: &mut R) -> Profile {
    let d = profile.domain();
    let rows = profile
        .rows()
        .iter()
        .map(|r| {
            let mut row: Vec<Rational> = r
                .values()
                .iter()
                .map(|x| {
                    let step: i64 = rng.gen_range(-4..=4);
                    let y = x + epsilon * Rational::new(BigInt::from(step), BigInt::from(4));
                    if d.contains_closed(&y) {
                        y
                    } else {
                        x.clone()
                    }
                })
                .collect();
            row.sort();
            row
        })
        .collect();
    Profile::from_values(d.clone(), rows).expect("sorted in-domain rows")
}

fn lipschitz_trials<A: Aggregator + ?Sized, R: Rng + ?Sized>(
    rule: &A,
    profile: &Profile,
    epsilon: &Rational,
    trials: usize,
    seed: u64,
    rng: &mut R,
    done: usize,
) -> Result<AxiomReport> {
    if epsilon < &Rational::from_integer(BigInt::from(0)) {
        return Err(Error::Precondition("epsilon must be nonnegative".into()));
    }
    let base = rule.evaluate(profile)?;
    for t in 0..trials {
        let perturbed = perturb(profile, epsilon, rng);
        let out = rule.evaluate(&perturbed)?;
        if max_distance(&base, &out) > *epsilon {
            return Ok(AxiomReport::violated(
                Axiom::Continuity,
                rule.describe(),
                Some(seed),
                done + t + 1,
                Witness {
                    profile: Some(profile.clone()),
                    transformed: Some(perturbed),
                    detail: WitnessDetail::Perturbation {
                        epsilon: epsilon.clone(),
                    },
                    expected: base,
                    actual: out,
                },
            ));
        }
    }
    Ok(AxiomReport::holds(
        Axiom::Continuity,
        rule.describe(),
        Some(seed),
        done + trials,
    ))
}

/// The Lipschitz surrogate over random profiles, one perturbation each.
pub fn check_lipschitz_sampled<A: Aggregator + ?Sized>(
    rule: &A,
    sampler: &ProfileSampler,
    epsilon: &Rational,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let mut rng = sample::rng(seed);
    for t in 0..trials {
        let m = sampler.profile(&mut rng);
        let report = lipschitz_trials(rule, &m, epsilon, 1, seed, &mut rng, t)?;
        if report.is_violated() {
            return Ok(report);
        }
    }
    Ok(AxiomReport::holds(
        Axiom::Continuity,
        rule.describe(),
        Some(seed),
        trials,
    ))
}

/// Unanimity, anonymity, stability and the continuity surrogate on a common
/// seeded sample of `trials` profiles each.
pub fn check_core_axioms<A: Aggregator + ?Sized>(
    rule: &A,
    sampler: &ProfileSampler,
    trials: usize,
    seed: u64,
) -> Result<Vec<AxiomReport>> {
    let epsilon = sampler.domain.width() / Rational::from_integer(BigInt::from(sampler.grid * 8));
    Ok(vec![
        check_unanimity(rule, sampler, trials, seed)?,
        check_anonymity(rule, sampler, trials, seed)?,
        check_stability_sampled(rule, sampler, Direction::Increasing, trials, seed)?,
        check_lipschitz_sampled(rule, sampler, &epsilon, trials, seed)?,
    ])
}

/// For each of the `m + 1` words, the agents (1-based) for whom it is active.
pub fn majority_word_sets(profile: &Profile) -> Vec<BTreeSet<usize>> {
    (1..=profile.m() + 1)
        .map(|word| {
            profile
                .rows()
                .iter()
                .enumerate()
                .filter(|(_, r)| r.padded(word - 1) < r.padded(word))
                .map(|(i, _)| i + 1)
                .collect()
        })
        .collect()
}

/// Words active for a strict majority must stay active collectively.
pub fn check_majoritarian_words<A: Aggregator + ?Sized>(rule: &A, profile: &Profile) -> Result<AxiomReport> {
    let out = rule.evaluate(profile)?;
    let d = profile.domain();
    for (k, supporters) in majority_word_sets(profile).iter().enumerate() {
        let word = k + 1;
        if 2 * supporters.len() > profile.n() && padded(&out, d, word - 1) >= padded(&out, d, word) {
            return Ok(AxiomReport::violated(
                Axiom::MajoritarianWords,
                rule.describe(),
                None,
                1,
                Witness {
                    profile: Some(profile.clone()),
                    transformed: None,
                    detail: WitnessDetail::InactiveWord {
                        word,
                        supporters: supporters.len(),
                    },
                    expected: Vec::new(),
                    actual: out,
                },
            ));
        }
    }
    Ok(AxiomReport::holds(Axiom::MajoritarianWords, rule.describe(), None, 1))
}

/// Agents (1-based) whose word `word` covers `(a, b)`: `s^{word-1} ≤ a < b ≤ s^{word}`.
pub fn extent_supporters(profile: &Profile, word: usize, a: &Rational, b: &Rational) -> Vec<usize> {
    profile
        .rows()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.padded(word - 1) <= a && b <= r.padded(word))
        .map(|(i, _)| i + 1)
        .collect()
}

/// If a strict (or, with `weak`, a 50%) majority places `(a, b)` inside word
/// `word` (1-based), the collective word must cover `(a, b)` as well.
pub fn check_majoritarian_extents<A: Aggregator + ?Sized>(
    rule: &A,
    profile: &Profile,
    word: usize,
    a: &Rational,
    b: &Rational,
    weak: bool,
) -> Result<AxiomReport> {
    let d = profile.domain();
    if word == 0 || word > profile.m() + 1 {
        return Err(Error::IndexOutOfRange {
            index: word,
            len: profile.m() + 1,
        });
    }
    if a >= b || !d.contains(a) || !d.contains(b) {
        return Err(Error::Precondition(format!(
            "need inf X < a < b < sup X, got a = {a}, b = {b}"
        )));
    }
    let axiom = if weak {
        Axiom::WeakMajoritarianExtents
    } else {
        Axiom::MajoritarianExtents
    };
    let supporters = extent_supporters(profile, word, a, b).len();
    let majority = if weak {
        2 * supporters >= profile.n()
    } else {
        2 * supporters > profile.n()
    };
    if !majority {
        return Ok(AxiomReport::holds(axiom, rule.describe(), None, 1));
    }
    let out = rule.evaluate(profile)?;
    let (lo, hi) = (padded(&out, d, word - 1), padded(&out, d, word));
    if lo <= a && b <= hi {
        return Ok(AxiomReport::holds(axiom, rule.describe(), None, 1));
    }
    Ok(AxiomReport::violated(
        axiom,
        rule.describe(),
        None,
        1,
        Witness {
            profile: Some(profile.clone()),
            transformed: None,
            detail: WitnessDetail::Extent {
                word,
                a: a.clone(),
                b: b.clone(),
                supporters,
                weak,
            },
            expected: vec![a.clone(), b.clone()],
            actual: vec![lo.clone(), hi.clone()],
        },
    ))
}

/// Random search for a majoritarian-extent violation. Intervals `(a, b)` are
/// drawn between adjacent half-lattice points so they fit between sampled
/// endpoints.
pub fn search_majoritarian_extents<A: Aggregator + ?Sized>(
    rule: &A,
    sampler: &ProfileSampler,
    weak: bool,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let mut rng = sample::rng(seed);
    let fine = 2 * sampler.grid;
    for t in 0..trials {
        let m = sampler.profile(&mut rng);
        let word = rng.gen_range(1..=sampler.m + 1);
        let k = rng.gen_range(1..fine - 1);
        let span = rng.gen_range(1..=(fine - 1 - k).min(2));
        let a = sample::lattice_point(&sampler.domain, k, fine);
        let b = sample::lattice_point(&sampler.domain, k + span, fine);
        let mut report = check_majoritarian_extents(rule, &m, word, &a, &b, weak)?;
        report.seed = Some(seed);
        report.samples = t + 1;
        if report.is_violated() {
            return Ok(report);
        }
    }
    let axiom = if weak {
        Axiom::WeakMajoritarianExtents
    } else {
        Axiom::MajoritarianExtents
    };
    Ok(AxiomReport::holds(axiom, rule.describe(), Some(seed), trials))
}

/// The strict-responsiveness counterexample around an interior phantom: for
/// the first phantom `q^k_ℓ ∉ {inf X, sup X}`, a profile with `n − ℓ` reports
/// below and `ℓ` above it, and the same profile with every report in column
/// `k` raised without crossing `q^k_ℓ`. The extended median returns `q^k_ℓ`
/// for both. Returns `(column, profile, raised profile)`, column 1-based.
pub fn phantom_plateau_witness(phantoms: &PhantomMatrix) -> Option<(usize, Profile, Profile)> {
    let d = phantoms.domain();
    let n = phantoms.n();
    let m = phantoms.m();
    let two = Rational::from_integer(BigInt::from(2));
    for (k, col) in phantoms.columns().iter().enumerate() {
        let Some(l) = col.iter().position(|q| d.contains(q)) else {
            continue;
        };
        let q = &col[l];
        let ell = l + 1;
        let below = (d.lower() + q) / &two;
        let above = (q + d.upper()) / &two;
        let eps = (q - &below) / &two;
        let build = |shift: &Rational| {
            let rows = (0..n)
                .map(|i| {
                    let x = if i < n - ell { &below + shift } else { &above + shift };
                    (0..m)
                        .map(|j| match j.cmp(&k) {
                            std::cmp::Ordering::Less => d.lower().clone(),
                            std::cmp::Ordering::Equal => x.clone(),
                            std::cmp::Ordering::Greater => d.upper().clone(),
                        })
                        .collect()
                })
                .collect();
            Profile::from_values(d.clone(), rows).expect("rows bracketed by the domain bounds")
        };
        let zero = Rational::from_integer(BigInt::from(0));
        return Some((k + 1, build(&zero), build(&eps)));
    }
    None
}

/// Strictly raising every report in a column must strictly raise the
/// collective endpoint. Samples whole-row upward shifts; for extended medians
/// also runs the deterministic interior-phantom construction.
pub fn check_strict_responsiveness(
    rule: &Rule,
    sampler: &ProfileSampler,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let mut samples = 0;
    let violated = |m: Profile, t: Profile, column: usize, samples: usize| -> Result<AxiomReport> {
        let (before, after) = (rule.evaluate(&m)?, rule.evaluate(&t)?);
        Ok(AxiomReport::violated(
            Axiom::StrictResponsiveness,
            rule.describe(),
            Some(seed),
            samples,
            Witness {
                profile: Some(m),
                transformed: Some(t),
                detail: WitnessDetail::Responsiveness { column },
                expected: before,
                actual: after,
            },
        ))
    };
    if let Rule::ExtendedMedian(q) = rule {
        if let Some((column, m, raised)) = phantom_plateau_witness(q) {
            samples += 1;
            let k = column - 1;
            if rule.evaluate(&m)?[k] >= rule.evaluate(&raised)?[k] {
                return violated(m, raised, column, samples);
            }
        }
    }
    let mut rng = sample::rng(seed);
    let d = &sampler.domain;
    for _ in 0..trials {
        samples += 1;
        let m = sampler.profile(&mut rng);
        let rows = m
            .rows()
            .iter()
            .map(|r| {
                let top = r.values().last().cloned().unwrap_or_else(|| d.lower().clone());
                let room = d.upper() - &top;
                let shift = sample::rational_between(&mut rng, &Rational::from_integer(BigInt::from(0)), &room);
                r.values().iter().map(|x| x + &shift).collect()
            })
            .collect();
        let raised = Profile::from_values(d.clone(), rows)?;
        let (before, after) = (rule.evaluate(&m)?, rule.evaluate(&raised)?);
        if let Some(k) = (0..before.len()).find(|&k| before[k] >= after[k]) {
            return violated(m, raised, k + 1, samples);
        }
    }
    Ok(AxiomReport::holds(
        Axiom::StrictResponsiveness,
        rule.describe(),
        Some(seed),
        samples,
    ))
}

/// Counterexample rules showing the four axioms characterizing p-rules are
/// independent. Each violates exactly one of unanimity, anonymity, stability
/// and continuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fixture {
    /// Dictatorship of agent 1: not anonymous.
    Dictator,
    /// Column means: not stable.
    Mean,
    /// First endpoint pinned to `inf X`, the rest take the column maximum:
    /// not unanimous.
    InfRule,
    /// First endpoint is the column minimum when all reports differ and the
    /// maximum otherwise, the rest take the column maximum: not continuous.
    /// Needs `n ≥ 3`.
    DiscontinuousRule,
}

impl Fixture {
    pub const ALL: [Fixture; 4] = [
        Fixture::Dictator,
        Fixture::Mean,
        Fixture::InfRule,
        Fixture::DiscontinuousRule,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Dictator => "dictator",
            Fixture::Mean => "mean",
            Fixture::InfRule => "inf_rule",
            Fixture::DiscontinuousRule => "discontinuous_rule",
        }
    }

    /// The one axiom this fixture fails.
    pub fn violated_axiom(self) -> Axiom {
        match self {
            Fixture::Dictator => Axiom::Anonymity,
            Fixture::Mean => Axiom::Stability,
            Fixture::InfRule => Axiom::Unanimity,
            Fixture::DiscontinuousRule => Axiom::Continuity,
        }
    }
}

pub fn fixture_rule(name: &str) -> Result<Fixture> {
    Fixture::ALL
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}

impl Aggregator for Fixture {
    fn describe(&self) -> String {
        format!("fixture:{}", self.name())
    }

    fn evaluate(&self, profile: &Profile) -> Result<Vec<Rational>> {
        let n = profile.n();
        let column_max = |k: usize| order_statistic(&profile.column(k), n);
        match self {
            Fixture::Dictator => Rule::Dictator(1).evaluate(profile),
            Fixture::Mean => Rule::Mean.evaluate(profile),
            Fixture::InfRule => (0..profile.m())
                .map(|k| {
                    if k == 0 {
                        Ok(profile.domain().lower().clone())
                    } else {
                        column_max(k)
                    }
                })
                .collect(),
            Fixture::DiscontinuousRule => {
                if n < 3 {
                    return Err(Error::RuleNotApplicable(format!(
                        "discontinuous_rule needs at least 3 agents, got {n}"
                    )));
                }
                (0..profile.m())
                    .map(|k| {
                        if k > 0 {
                            return column_max(k);
                        }
                        let col = profile.column(0);
                        let distinct = col.iter().collect::<BTreeSet<_>>().len() == col.len();
                        order_statistic(&col, if distinct { 1 } else { n })
                    })
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::PositionVector;
    use crate::vocab::{int, rat};

    fn hundred() -> Domain {
        Domain::new(int(0), int(100)).unwrap()
    }

    #[test]
    fn map_corners_and_interpolation() {
        let d = hundred();
        let phi = PiecewiseLinearMap::new(
            d.clone(),
            vec![(int(0), int(0)), (int(40), int(80)), (int(100), int(100))],
            Direction::Increasing,
        )
        .unwrap();
        assert_eq!(phi.apply(&int(30)), int(60));
        assert_eq!(phi.apply(&int(60)), rat(260, 3));
        assert_eq!(phi.apply(&int(0)), int(0));
        assert_eq!(phi.apply(&int(100)), int(100));
        let rho = PiecewiseLinearMap::reflection(&d);
        assert_eq!(rho.apply(&int(30)), int(70));
        assert_eq!(PiecewiseLinearMap::identity(&d).apply(&rat(1, 3)), rat(1, 3));
    }

    #[test]
    fn map_validation() {
        let d = hundred();
        let bad = PiecewiseLinearMap::new(
            d.clone(),
            vec![
                (int(0), int(0)),
                (int(50), int(50)),
                (int(40), int(60)),
                (int(100), int(100)),
            ],
            Direction::Increasing,
        );
        assert!(bad.is_err());
        let flat = PiecewiseLinearMap::new(
            d.clone(),
            vec![(int(0), int(0)), (int(50), int(0)), (int(100), int(100))],
            Direction::Increasing,
        );
        assert!(flat.is_err());
        let wrong_corner =
            PiecewiseLinearMap::new(d, vec![(int(0), int(0)), (int(100), int(100))], Direction::Decreasing);
        assert!(wrong_corner.is_err());
    }

    #[test]
    fn random_maps_are_valid() {
        let d = hundred();
        for seed in 0..50 {
            for dir in [Direction::Increasing, Direction::Decreasing] {
                let phi = random_monotone_map(&d, seed, dir);
                let interior = phi.points().len() - 2;
                assert!((1..=8).contains(&interior));
                assert!(PiecewiseLinearMap::new(d.clone(), phi.points().to_vec(), dir).is_ok());
            }
        }
    }

    #[test]
    fn mean_is_not_stable_under_a_kinked_map() {
        let d = hundred();
        let m = Profile::from_values(d.clone(), vec![vec![int(10)], vec![int(20)], vec![int(60)]]).unwrap();
        let phi = PiecewiseLinearMap::new(
            d,
            vec![(int(0), int(0)), (int(40), int(80)), (int(100), int(100))],
            Direction::Increasing,
        )
        .unwrap();
        let report = check_stability(&Rule::Mean, &m, &phi).unwrap();
        assert!(report.is_violated());
        let w = report.witness.as_ref().unwrap();
        assert_eq!(w.expected, vec![int(60)]);
        assert_eq!(w.actual, vec![rat(440, 9)]);
        assert!(report.recheck(&Rule::Mean).unwrap());
    }

    #[test]
    fn identity_map_is_always_stable() {
        let d = hundred();
        let m = Profile::from_values(d.clone(), vec![vec![int(10), int(30)], vec![int(20), int(90)]]).unwrap();
        let id = PiecewiseLinearMap::identity(&d);
        for rule in [
            Rule::Mean,
            Rule::Dictator(2),
            Rule::PRule(PositionVector::new(vec![1, 2]).unwrap()),
        ] {
            assert!(!check_stability(&rule, &m, &id).unwrap().is_violated());
        }
    }

    #[test]
    fn consistency_checks() {
        let good = [int(20), int(40), int(55), int(70)];
        assert!(!check_consistency(&good, true).is_violated());
        let tied = [int(1), int(2), int(5), int(5), int(6)];
        let strict = check_consistency(&tied, true);
        assert!(strict.is_violated());
        assert_eq!(
            strict.witness.as_ref().unwrap().detail,
            WitnessDetail::Ordering { position: 3 }
        );
        assert!(strict.recheck(&Rule::Mean).unwrap());
        assert!(!check_consistency(&tied, false).is_violated());
        assert!(!check_consistency(&[], true).is_violated());
    }

    #[test]
    fn lipschitz_on_a_single_column() {
        let d = Domain::new(int(0), int(10)).unwrap();
        let m = Profile::from_values(d.clone(), vec![vec![int(1)], vec![int(2)], vec![int(3)]]).unwrap();
        let moved = Profile::from_values(d, vec![vec![rat(11, 10)], vec![rat(41, 20)], vec![rat(29, 10)]]).unwrap();
        let rule = Rule::PRule(PositionVector::new(vec![2]).unwrap());
        let change = max_distance(&rule.evaluate(&m).unwrap(), &rule.evaluate(&moved).unwrap());
        assert_eq!(change, rat(1, 20));
        assert!(change <= rat(1, 10));
        let zero = check_lipschitz(&rule, &m, &int(0), 20, 1).unwrap();
        assert!(!zero.is_violated());
    }

    #[test]
    fn discontinuous_fixture_breaks_near_a_tie() {
        let d = Domain::new(int(0), int(10)).unwrap();
        let tied = Profile::from_values(d, vec![vec![int(2)], vec![int(2)], vec![int(5)]]).unwrap();
        let f = Fixture::DiscontinuousRule;
        assert_eq!(f.evaluate(&tied).unwrap(), vec![int(5)]);
        let report = check_lipschitz(&f, &tied, &rat(1, 100), 200, 3).unwrap();
        assert!(report.is_violated());
        assert!(report.recheck(&f).unwrap());
    }

    #[test]
    fn fixture_lookup() {
        assert_eq!(fixture_rule("inf_rule").unwrap(), Fixture::InfRule);
        assert_eq!(fixture_rule("nope"), Err(Error::UnknownFixture("nope".into())));
        let d = Domain::new(int(0), int(10)).unwrap();
        let distinct = Profile::from_values(d.clone(), vec![vec![int(1)], vec![int(2)], vec![int(3)]]).unwrap();
        assert_eq!(Fixture::DiscontinuousRule.evaluate(&distinct).unwrap(), vec![int(1)]);
        assert_eq!(Fixture::InfRule.evaluate(&distinct).unwrap(), vec![int(0)]);
        assert_eq!(Fixture::Dictator.evaluate(&distinct).unwrap(), vec![int(1)]);
        let two = Profile::from_values(d, vec![vec![int(1)], vec![int(2)]]).unwrap();
        assert!(Fixture::DiscontinuousRule.evaluate(&two).is_err());
    }

    #[test]
    fn majority_sets_on_a_homogeneous_profile() {
        let d = Domain::new(int(0), int(10)).unwrap();
        let m = Profile::from_values(
            d,
            vec![vec![int(1), int(5)], vec![int(2), int(6)], vec![int(3), int(4)]],
        )
        .unwrap();
        let all: BTreeSet<usize> = [1, 2, 3].into();
        assert!(majority_word_sets(&m).iter().all(|s| *s == all));
        let median = Rule::median(3, 2).unwrap();
        assert!(!check_majoritarian_words(&median, &m).unwrap().is_violated());
    }

    #[test]
    fn extents_precondition() {
        let d = Domain::new(int(0), int(10)).unwrap();
        let m = Profile::from_values(d, vec![vec![int(5)]]).unwrap();
        assert!(check_majoritarian_extents(&Rule::Mean, &m, 1, &int(3), &int(2), false).is_err());
        assert!(check_majoritarian_extents(&Rule::Mean, &m, 3, &int(1), &int(2), false).is_err());
    }

    #[test]
    fn plateau_witness_for_interior_phantom() {
        let q = PhantomMatrix::new(Domain::unit(), vec![vec![rat(1, 2)]]).unwrap();
        let (col, m, raised) = phantom_plateau_witness(&q).unwrap();
        assert_eq!(col, 1);
        let rule = Rule::ExtendedMedian(q);
        assert_eq!(rule.evaluate(&m).unwrap(), vec![rat(1, 2)]);
        assert_eq!(rule.evaluate(&raised).unwrap(), vec![rat(1, 2)]);
        let improper = PhantomMatrix::new(Domain::unit(), vec![vec![int(0)]]).unwrap();
        assert!(phantom_plateau_witness(&improper).is_none());
    }
}
