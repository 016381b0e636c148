//! Seeded generators for profiles and rationals used by the randomized checkers.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::vocab::{Domain, EndpointMultiset, Profile, Rational};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `lower + (upper − lower) · k / denom`.
pub fn lattice_point(domain: &Domain, k: u64, denom: u64) -> Rational {
    domain.lower() + domain.width() * Rational::new(BigInt::from(k), BigInt::from(denom))
}

/// A uniformly drawn lattice point strictly between `lo` and `hi`
/// (`lo < hi`), on a lattice with a random denominator.
pub fn rational_between<R: Rng + ?Sized>(rng: &mut R, lo: &Rational, hi: &Rational) -> Rational {
    let denom: u64 = rng.gen_range(2..=64);
    let k: u64 = rng.gen_range(1..denom);
    lo + (hi - lo) * Rational::new(BigInt::from(k), BigInt::from(denom))
}

/// Shape and value lattice for random profiles.
///
/// Endpoints are drawn from the lattice `lower + width · j / grid`. A coarse
/// grid makes ties frequent, which is where order-statistic rules and their
/// counterexamples differ most.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileSampler {
    pub domain: Domain,
    pub n: usize,
    pub m: usize,
    pub grid: u64,
    /// Whether `inf X` and `sup X` may appear (heterogeneous vocabularies).
    pub include_bounds: bool,
}

impl ProfileSampler {
    pub fn new(domain: Domain, n: usize, m: usize) -> Self {
        ProfileSampler {
            domain,
            n,
            m,
            grid: 12,
            include_bounds: false,
        }
    }

    pub fn with_grid(mut self, grid: u64) -> Self {
        self.grid = grid.max(2);
        self
    }

    pub fn with_bounds(mut self, include_bounds: bool) -> Self {
        self.include_bounds = include_bounds;
        self
    }

    pub fn value<R: Rng + ?Sized>(&self, rng: &mut R) -> Rational {
        let k = if self.include_bounds {
            rng.gen_range(0..=self.grid)
        } else {
            rng.gen_range(1..self.grid)
        };
        lattice_point(&self.domain, k, self.grid)
    }

    pub fn row<R: Rng + ?Sized>(&self, rng: &mut R) -> EndpointMultiset {
        let mut values: Vec<Rational> = (0..self.m).map(|_| self.value(rng)).collect();
        values.sort();
        EndpointMultiset::new(self.domain.clone(), values).expect("sorted lattice values")
    }

    /// A strictly increasing interior row; needs `m < grid`.
    pub fn strict_row<R: Rng + ?Sized>(&self, rng: &mut R) -> EndpointMultiset {
        let mut ks: Vec<u64> = (1..self.grid).collect();
        ks.shuffle(rng);
        let mut ks: Vec<u64> = ks.into_iter().take(self.m).collect();
        ks.sort_unstable();
        let values = ks
            .into_iter()
            .map(|k| lattice_point(&self.domain, k, self.grid))
            .collect();
        EndpointMultiset::new(self.domain.clone(), values).expect("sorted lattice values")
    }

    pub fn profile<R: Rng + ?Sized>(&self, rng: &mut R) -> Profile {
        let rows = (0..self.n).map(|_| self.row(rng)).collect();
        Profile::new(self.domain.clone(), rows).expect("uniform shape")
    }

    pub fn strict_profile<R: Rng + ?Sized>(&self, rng: &mut R) -> Profile {
        let rows = (0..self.n).map(|_| self.strict_row(rng)).collect();
        Profile::new(self.domain.clone(), rows).expect("uniform shape")
    }

    /// A random permutation of `0..n`.
    pub fn permutation<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.n).collect();
        perm.shuffle(rng);
        perm
    }
}

/// Every profile whose endpoints lie on `lower + width · j / (points + 1)`,
/// `j = 1..=points`. Grows as `C(points + m − 1, m)^n`; meant for tiny grids.
pub fn enumerate_profiles(domain: &Domain, n: usize, m: usize, points: u64) -> Vec<Profile> {
    let values: Vec<Rational> = (1..=points).map(|j| lattice_point(domain, j, points + 1)).collect();
    let mut rows: Vec<Vec<Rational>> = vec![Vec::new()];
    for _ in 0..m {
        rows = rows
            .into_iter()
            .flat_map(|row| {
                let start = row
                    .last()
                    .map(|x| values.iter().position(|v| v == x).unwrap())
                    .unwrap_or(0);
                values[start..].iter().map(move |v| {
                    let mut next = row.clone();
                    next.push(v.clone());
                    next
                })
            })
            .collect();
    }
    let mut profiles: Vec<Vec<Vec<Rational>>> = vec![Vec::new()];
    for _ in 0..n {
        profiles = profiles
            .into_iter()
            .flat_map(|p| {
                rows.iter().map(move |r| {
                    let mut next = p.clone();
                    next.push(r.clone());
                    next
                })
            })
            .collect();
    }
    profiles
        .into_iter()
        .map(|rows| Profile::from_values(domain.clone(), rows).expect("sorted lattice rows"))
        .collect()
}
