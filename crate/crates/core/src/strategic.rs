//! Single-peaked preferences, manipulation search and the deviation
//! properties underlying strategy-proofness.

use num_bigint::BigInt;
use rand::Rng;

use crate::axioms::{Axiom, AxiomReport, Verdict, Witness, WitnessDetail};
use crate::error::{Error, Result};
use crate::rules::{Aggregator, Rule};
use crate::sample::{self, ProfileSampler};
use crate::vocab::{between, EndpointMultiset, Profile, Rational};

/// Additive single-peaked preference: `u(s) = −Σ_k w_k · |s^k − peak^k|`.
///
/// Any `s₁` componentwise between the peak and `s₂` is weakly preferred to
/// `s₂`, so this family sits inside the betweenness-monotone class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinglePeakedPreference {
    peak: EndpointMultiset,
    weights: Vec<Rational>,
}

impl SinglePeakedPreference {
    pub fn new(peak: EndpointMultiset, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != peak.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for {} endpoints",
                weights.len(),
                peak.len()
            )));
        }
        let zero = Rational::from_integer(BigInt::from(0));
        if let Some(w) = weights.iter().find(|w| **w <= zero) {
            return Err(Error::Precondition(format!("weights must be positive, got {w}")));
        }
        Ok(SinglePeakedPreference { peak, weights })
    }

    /// All weights equal to one.
    pub fn uniform(peak: EndpointMultiset) -> Self {
        let weights = vec![Rational::from_integer(BigInt::from(1)); peak.len()];
        SinglePeakedPreference { peak, weights }
    }

    /// Weights drawn from `{a/b : 1 ≤ a ≤ 4, 1 ≤ b ≤ 3}`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, peak: EndpointMultiset) -> Self {
        let weights = (0..peak.len())
            .map(|_| {
                let a: i64 = rng.gen_range(1..=4);
                let b: i64 = rng.gen_range(1..=3);
                Rational::new(BigInt::from(a), BigInt::from(b))
            })
            .collect();
        SinglePeakedPreference { peak, weights }
    }

    pub fn peak(&self) -> &EndpointMultiset {
        &self.peak
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn utility(&self, s: &EndpointMultiset) -> Result<Rational> {
        self.utility_of(s.values())
    }

    /// Utility of a raw endpoint sequence, as returned by [`Aggregator::evaluate`].
    pub fn utility_of(&self, values: &[Rational]) -> Result<Rational> {
        if values.len() != self.peak.len() {
            return Err(Error::ShapeMismatch(format!(
                "outcome has {} endpoints, preference has {}",
                values.len(),
                self.peak.len()
            )));
        }
        let loss = values.iter().zip(self.peak.values()).zip(&self.weights).fold(
            Rational::from_integer(BigInt::from(0)),
            |acc, ((s, p), w)| {
                let d = if s > p { s - p } else { p - s };
                acc + w * d
            },
        );
        Ok(-loss)
    }
}

/// Which clause of uncompromisingness a deviation satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviationCase {
    /// The collective endpoint did not move.
    Unchanged,
    /// It moved, but the old outcome lies between the truthful report and the
    /// new outcome, and the new outcome lies between the misreport and the
    /// old outcome.
    Bracketed,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationReport {
    pub case: DeviationCase,
    pub report: Rational,
    pub misreport: Rational,
    pub before: Rational,
    pub after: Rational,
}

/// Classifies the effect of agent `agent` (1-based) replacing its row with
/// `misreport` on collective endpoint `column` (1-based).
pub fn check_uncompromising<A: Aggregator + ?Sized>(
    rule: &A,
    profile: &Profile,
    agent: usize,
    misreport: &EndpointMultiset,
    column: usize,
) -> Result<DeviationReport> {
    if agent == 0 || agent > profile.n() {
        return Err(Error::IndexOutOfRange {
            index: agent,
            len: profile.n(),
        });
    }
    if column == 0 || column > profile.m() {
        return Err(Error::IndexOutOfRange {
            index: column,
            len: profile.m(),
        });
    }
    let deviated = profile.with_row(agent - 1, misreport.clone())?;
    let k = column - 1;
    let before = rule.evaluate(profile)?[k].clone();
    let after = rule.evaluate(&deviated)?[k].clone();
    let report = profile.row(agent - 1).values()[k].clone();
    let mis = misreport.values()[k].clone();
    let case = if before == after {
        DeviationCase::Unchanged
    } else if between(&before, &report, &after) && between(&after, &mis, &before) {
        DeviationCase::Bracketed
    } else {
        DeviationCase::Violated
    };
    Ok(DeviationReport {
        case,
        report,
        misreport: mis,
        before,
        after,
    })
}

/// Random unilateral deviations, every column checked.
pub fn uncompromising_fuzz<A: Aggregator + ?Sized>(
    rule: &A,
    sampler: &ProfileSampler,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let mut rng = sample::rng(seed);
    for t in 0..trials {
        let m = sampler.profile(&mut rng);
        let agent = rng.gen_range(1..=sampler.n);
        let misreport = sampler.row(&mut rng);
        for column in 1..=sampler.m {
            let r = check_uncompromising(rule, &m, agent, &misreport, column)?;
            if r.case == DeviationCase::Violated {
                let deviated = m.with_row(agent - 1, misreport.clone())?;
                return Ok(AxiomReport {
                    axiom: Axiom::Uncompromisingness,
                    rule: rule.describe(),
                    seed: Some(seed),
                    samples: t + 1,
                    verdict: Verdict::Violated,
                    witness: Some(Witness {
                        profile: Some(m),
                        transformed: Some(deviated),
                        detail: WitnessDetail::Deviation { agent, column },
                        expected: vec![r.report, r.misreport],
                        actual: vec![r.before, r.after],
                    }),
                });
            }
        }
    }
    Ok(AxiomReport {
        axiom: Axiom::Uncompromisingness,
        rule: rule.describe(),
        seed: Some(seed),
        samples: trials,
        verdict: Verdict::HoldsOnSample,
        witness: None,
    })
}

/// A profitable unilateral misreport.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManipulationWitness {
    pub rule: String,
    /// 1-based.
    pub agent: usize,
    /// Truthful reports; row `agent` is the manipulator's peak.
    pub truthful: Profile,
    pub misreport: EndpointMultiset,
    pub preference: SinglePeakedPreference,
    pub truthful_outcome: Vec<Rational>,
    pub manipulated_outcome: Vec<Rational>,
    pub gain: Rational,
}

impl ManipulationWitness {
    /// Re-evaluates both outcomes and the utility gain.
    pub fn verify<A: Aggregator + ?Sized>(&self, rule: &A) -> Result<bool> {
        let truthful = rule.evaluate(&self.truthful)?;
        let manipulated = rule.evaluate(&self.truthful.with_row(self.agent - 1, self.misreport.clone())?)?;
        let gain = self.preference.utility_of(&manipulated)? - self.preference.utility_of(&truthful)?;
        Ok(truthful == self.truthful_outcome
            && manipulated == self.manipulated_outcome
            && gain == self.gain
            && gain > Rational::from_integer(BigInt::from(0)))
    }
}

fn replaced(row: &EndpointMultiset, k: usize, value: &Rational) -> EndpointMultiset {
    let mut values = row.values().to_vec();
    values[k] = value.clone();
    values.sort();
    EndpointMultiset::new(row.domain().clone(), values).expect("sorted values in the closed domain")
}

/// Searches for a profitable misreport.
///
/// Each trial draws truthful peaks, a manipulator with random additive
/// weights and a column `k`. Candidate misreports move the manipulator's
/// `k`-th endpoint to every point of a `grid`-step lattice on the closed
/// domain, to the other agents' `k`-th endpoints, to the `k`-th phantoms of an
/// extended median and to the domain bounds; a few unrelated random rows are
/// tried as well. Returns the first candidate with strictly higher utility.
pub fn sp_fuzz(
    rule: &Rule,
    sampler: &ProfileSampler,
    trials: usize,
    seed: u64,
    grid: u64,
) -> Result<Option<ManipulationWitness>> {
    let mut rng = sample::rng(seed);
    let d = &sampler.domain;
    let grid = grid.max(1);
    let lattice: Vec<Rational> = (0..=grid).map(|j| sample::lattice_point(d, j, grid)).collect();
    let free = sampler.clone().with_bounds(true);
    for _ in 0..trials {
        let truthful = sampler.profile(&mut rng);
        let agent = rng.gen_range(1..=sampler.n);
        let peak = truthful.row(agent - 1).clone();
        let pref = SinglePeakedPreference::random(&mut rng, peak.clone());
        let base = rule.evaluate(&truthful)?;
        let base_utility = pref.utility_of(&base)?;

        let mut candidates = Vec::new();
        if sampler.m > 0 {
            let k = rng.gen_range(0..sampler.m);
            let mut values: Vec<Rational> = lattice.clone();
            values.extend(truthful.column(k));
            if let Rule::ExtendedMedian(q) = rule {
                values.extend(q.columns()[k].iter().cloned());
            }
            values.sort();
            values.dedup();
            candidates.extend(values.iter().map(|v| replaced(&peak, k, v)));
        }
        candidates.extend((0..3).map(|_| free.row(&mut rng)));

        for misreport in candidates {
            if misreport == peak {
                continue;
            }
            let deviated = truthful.with_row(agent - 1, misreport.clone())?;
            let outcome = rule.evaluate(&deviated)?;
            let gain = pref.utility_of(&outcome)? - &base_utility;
            if gain > Rational::from_integer(BigInt::from(0)) {
                return Ok(Some(ManipulationWitness {
                    rule: rule.describe(),
                    agent,
                    truthful,
                    misreport,
                    preference: pref,
                    truthful_outcome: base,
                    manipulated_outcome: outcome,
                    gain,
                }));
            }
        }
    }
    Ok(None)
}

/// A random row whose `k`-th (0-based) endpoint is `x`.
fn row_through<R: Rng + ?Sized>(sampler: &ProfileSampler, rng: &mut R, k: usize, x: &Rational) -> Vec<Rational> {
    let mut row: Vec<Rational> = (0..sampler.m)
        .map(|j| {
            let v = sampler.value(rng);
            match j.cmp(&k) {
                std::cmp::Ordering::Less if &v > x => x.clone(),
                std::cmp::Ordering::Greater if &v < x => x.clone(),
                std::cmp::Ordering::Equal => x.clone(),
                _ => v,
            }
        })
        .collect();
    row.sort();
    row
}

/// Samples profile pairs that agree on one column and differ elsewhere, and
/// reports a pair on which the collective endpoint of the shared column
/// differs. A strategy-proof rule is separable, so any such pair also rules
/// out strategy-proofness.
pub fn check_separability_on_deviations<A: Aggregator + ?Sized>(
    rule: &A,
    sampler: &ProfileSampler,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let mut rng = sample::rng(seed);
    for t in 0..trials {
        if sampler.m == 0 {
            break;
        }
        let m = sampler.profile(&mut rng);
        let k = rng.gen_range(0..sampler.m);
        let rows = m
            .rows()
            .iter()
            .map(|r| row_through(sampler, &mut rng, k, &r.values()[k]))
            .collect();
        let other = Profile::from_values(sampler.domain.clone(), rows)?;
        let (before, after) = (rule.evaluate(&m)?, rule.evaluate(&other)?);
        if before[k] != after[k] {
            return Ok(AxiomReport {
                axiom: Axiom::Separability,
                rule: rule.describe(),
                seed: Some(seed),
                samples: t + 1,
                verdict: Verdict::Violated,
                witness: Some(Witness {
                    profile: Some(m),
                    transformed: Some(other),
                    detail: WitnessDetail::SharedColumn { column: k + 1 },
                    expected: before,
                    actual: after,
                }),
            });
        }
    }
    Ok(AxiomReport {
        axiom: Axiom::Separability,
        rule: rule.describe(),
        seed: Some(seed),
        samples: trials,
        verdict: Verdict::HoldsOnSample,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::{int, Domain};

    fn hundred() -> Domain {
        Domain::new(int(0), int(100)).unwrap()
    }

    fn row(d: &Domain, xs: &[i64]) -> EndpointMultiset {
        EndpointMultiset::new(d.clone(), xs.iter().map(|&x| int(x)).collect()).unwrap()
    }

    fn column_profile(d: &Domain, xs: &[i64]) -> Profile {
        Profile::from_values(d.clone(), xs.iter().map(|&x| vec![int(x)]).collect()).unwrap()
    }

    #[test]
    fn additive_utility() {
        let d = hundred();
        let pref = SinglePeakedPreference::uniform(row(&d, &[20, 40, 60, 80]));
        assert_eq!(pref.utility(&row(&d, &[20, 40, 55, 70])).unwrap(), int(-15));
        assert_eq!(pref.utility(&row(&d, &[20, 40, 60, 80])).unwrap(), int(0));
        assert!(pref.utility(&row(&d, &[1])).is_err());
        let single = SinglePeakedPreference::uniform(row(&d, &[20]));
        assert_eq!(single.utility(&row(&d, &[30])).unwrap(), int(-10));
        assert_eq!(single.utility(&row(&d, &[40])).unwrap(), int(-20));
        assert!(SinglePeakedPreference::new(row(&d, &[20]), vec![int(0)]).is_err());
    }

    #[test]
    fn median_deviation_is_bracketed() {
        let d = hundred();
        let m = column_profile(&d, &[2, 5, 9]);
        let median = Rule::median(3, 1).unwrap();
        let r = check_uncompromising(&median, &m, 1, &row(&d, &[7]), 1).unwrap();
        assert_eq!((r.before.clone(), r.after.clone()), (int(5), int(7)));
        assert_eq!(r.case, DeviationCase::Bracketed);
        let r = check_uncompromising(&median, &m, 1, &row(&d, &[4]), 1).unwrap();
        assert_eq!(r.case, DeviationCase::Unchanged);
    }

    #[test]
    fn mean_deviation_overshoots() {
        let d = Domain::new(int(-50), int(50)).unwrap();
        let m = column_profile(&d, &[0, 10]);
        let r = check_uncompromising(&Rule::Mean, &m, 1, &row(&d, &[2]), 1).unwrap();
        assert_eq!((r.before.clone(), r.after.clone()), (int(5), int(6)));
        assert_eq!(r.case, DeviationCase::Violated);
    }

    #[test]
    fn mean_manipulation_by_hand() {
        let d = hundred();
        let truthful = column_profile(&d, &[10, 30, 80]);
        let pref = SinglePeakedPreference::uniform(row(&d, &[30]));
        let honest = Rule::Mean.evaluate(&truthful).unwrap();
        let lied = Rule::Mean
            .evaluate(&truthful.with_row(1, row(&d, &[1])).unwrap())
            .unwrap();
        assert_eq!(honest, vec![int(40)]);
        assert!(pref.utility_of(&lied).unwrap() > pref.utility_of(&honest).unwrap());
    }

    #[test]
    fn fuzz_finds_mean_witness() {
        let sampler = ProfileSampler::new(hundred(), 3, 2);
        let w = sp_fuzz(&Rule::Mean, &sampler, 50, 5, 10)
            .unwrap()
            .expect("mean is manipulable");
        assert!(w.verify(&Rule::Mean).unwrap());
        assert!(w.gain > int(0));
    }

    #[test]
    fn median_survives_a_short_fuzz() {
        let sampler = ProfileSampler::new(hundred(), 3, 2);
        let median = Rule::median(3, 2).unwrap();
        assert!(sp_fuzz(&median, &sampler, 100, 5, 10).unwrap().is_none());
        assert!(!uncompromising_fuzz(&median, &sampler, 100, 5).unwrap().is_violated());
    }

    #[test]
    fn separability() {
        let sampler = ProfileSampler::new(hundred(), 3, 3);
        let median = Rule::median(3, 3).unwrap();
        assert!(!check_separability_on_deviations(&median, &sampler, 200, 1)
            .unwrap()
            .is_violated());
        assert!(!check_separability_on_deviations(&Rule::Mean, &sampler, 200, 1)
            .unwrap()
            .is_violated());
        let report = check_separability_on_deviations(&Rule::Multiset, &sampler, 500, 1).unwrap();
        assert!(report.is_violated());
        assert!(report.recheck(&Rule::Multiset).unwrap());
    }
}
