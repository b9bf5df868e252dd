//! Degree laws and the conditional neighbor-degree belief family.
//!
//! A player of degree `d` believes its `d` neighbors have degrees drawn from
//! an exchangeable law `P(· | d)`. Neighbor degrees start at 1: a neighbor
//! always has at least the edge back to the believer.
//!
//! Association between own degree and neighbor degrees is audited against
//! a finite family of non-decreasing test functions, so a "positive" verdict
//! means no counterexample was found in that family.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{input, Error, Result};
use crate::seed::rng_from_seed;
use crate::tuples::{for_each_tuple, tuple_count};

/// Tolerance on probability sums and expectation comparisons.
pub const PROB_TOL: f64 = 1e-12;

/// Largest own degree for which explicit joint laws are accepted.
pub const DEFAULT_JOINT_MAX_DEGREE: usize = 4;

/// Population degree law over `0..=max_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pmf: Vec<f64>,
}

impl DegreeDistribution {
    pub fn new(pmf: Vec<f64>) -> Result<Self> {
        if pmf.len() < 2 {
            return Err(input("degree law needs a maximum degree of at least 1"));
        }
        check_probability_vector(&pmf, "degree law")?;
        Ok(DegreeDistribution { pmf })
    }

    /// Normalizes non-negative weights into a law.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(input("degree weights must be non-negative with a positive sum"));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn point_mass(degree: usize) -> Result<Self> {
        let mut pmf = vec![0.0; degree.max(1) + 1];
        pmf[degree] = 1.0;
        Self::new(pmf)
    }

    pub fn max_degree(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn prob(&self, degree: usize) -> f64 {
        self.pmf.get(degree).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(d, p)| d as f64 * p)
            .sum()
    }
}

fn check_probability_vector(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::Input(format!("{what}: entries must be finite and non-negative")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::Input(format!("{what}: entries sum to {total}, expected 1")));
    }
    Ok(())
}

/// How neighbor degrees are modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeliefKind {
    /// Same i.i.d. neighbor-degree law for every own degree.
    Independent,
    /// Neighbor degrees i.i.d. from a row `Q[d]` that depends on own degree.
    ConditionalIid,
    /// Explicit exchangeable joint law per own degree.
    FullJoint,
}

impl BeliefKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BeliefKind::Independent => "independent",
            BeliefKind::ConditionalIid => "conditional-iid",
            BeliefKind::FullJoint => "full-joint",
        }
    }
}

/// One outcome of a joint neighbor-degree law: the degree tuple and its
/// probability.
pub type JointOutcome = (Vec<usize>, f64);

#[derive(Debug, Clone, PartialEq)]
enum BeliefLaw {
    /// `rows[i][k]` = P(neighbor degree k + 1 | own degree `degrees[i]`).
    Rows(Vec<Vec<f64>>),
    Joint(Vec<Vec<JointOutcome>>),
}

/// The belief family: for each own degree in the support, a law over the
/// degrees of its neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborBeliefs {
    kind: BeliefKind,
    max_degree: usize,
    degrees: Vec<usize>,
    law: BeliefLaw,
}

impl NeighborBeliefs {
    /// Every own degree in `degrees` draws neighbor degrees i.i.d. from
    /// `row`, where `row[k]` is the probability of degree `k + 1`.
    pub fn independent(row: Vec<f64>, degrees: Vec<usize>) -> Result<Self> {
        let rows = vec![row; degrees.len()];
        let mut b = Self::conditional_iid(degrees.into_iter().zip(rows).collect())?;
        b.kind = BeliefKind::Independent;
        Ok(b)
    }

    /// Rows keyed by own degree. Every row has the same length, the maximum
    /// neighbor degree; entry `k` is the probability of degree `k + 1`.
    pub fn conditional_iid(rows: Vec<(usize, Vec<f64>)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(input("beliefs need at least one own degree"));
        }
        let max_degree = rows[0].1.len();
        if max_degree == 0 {
            return Err(input("belief rows must cover at least neighbor degree 1"));
        }
        let mut by_degree = BTreeMap::new();
        for (d, row) in rows {
            if d == 0 {
                return Err(input("own degree 0 has no neighbors to hold beliefs about"));
            }
            if row.len() != max_degree {
                return Err(Error::Input(format!(
                    "belief row for degree {d} has {} entries, expected {max_degree}",
                    row.len()
                )));
            }
            check_probability_vector(&row, &format!("belief row for degree {d}"))?;
            if by_degree.insert(d, row).is_some() {
                return Err(Error::Input(format!("duplicate belief row for degree {d}")));
            }
        }
        Ok(NeighborBeliefs {
            kind: BeliefKind::ConditionalIid,
            max_degree,
            degrees: by_degree.keys().copied().collect(),
            law: BeliefLaw::Rows(by_degree.into_values().collect()),
        })
    }

    /// Degree-`degree` players whose neighbors all have degree `degree`.
    pub fn regular(degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(input("regular beliefs need degree at least 1"));
        }
        let mut row = vec![0.0; degree];
        row[degree - 1] = 1.0;
        let mut b = Self::conditional_iid(vec![(degree, row)])?;
        b.kind = BeliefKind::Independent;
        Ok(b)
    }

    /// Explicit joint laws. Each outcome tuple has length equal to its own
    /// degree; laws must be invariant under permutation of coordinates.
    pub fn full_joint(laws: Vec<(usize, Vec<JointOutcome>)>, joint_max_degree: usize) -> Result<Self> {
        if laws.is_empty() {
            return Err(input("beliefs need at least one own degree"));
        }
        let mut by_degree = BTreeMap::new();
        let mut max_degree = 1;
        for (d, outcomes) in laws {
            if d == 0 || d > joint_max_degree {
                return Err(Error::Input(format!(
                    "joint beliefs are limited to own degrees 1..={joint_max_degree}, got {d}"
                )));
            }
            let mut merged: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
            for (tuple, p) in outcomes {
                if tuple.len() != d {
                    return Err(Error::Input(format!(
                        "joint outcome {tuple:?} for degree {d} has the wrong length"
                    )));
                }
                if tuple.contains(&0) {
                    return Err(input("neighbor degrees must be at least 1"));
                }
                if !p.is_finite() || p < 0.0 {
                    return Err(input("joint probabilities must be finite and non-negative"));
                }
                max_degree = max_degree.max(*tuple.iter().max().unwrap_or(&1));
                *merged.entry(tuple).or_insert(0.0) += p;
            }
            let total: f64 = merged.values().sum();
            if (total - 1.0).abs() > PROB_TOL {
                return Err(Error::Input(format!(
                    "joint law for degree {d} sums to {total}, expected 1"
                )));
            }
            if let Some(t) = exchangeability_violation(&merged) {
                return Err(Error::Input(format!(
                    "joint law for degree {d} is not exchangeable at {t:?}"
                )));
            }
            let outcomes: Vec<JointOutcome> = merged.into_iter().filter(|(_, p)| *p > 0.0).collect();
            if by_degree.insert(d, outcomes).is_some() {
                return Err(Error::Input(format!("duplicate joint law for degree {d}")));
            }
        }
        Ok(NeighborBeliefs {
            kind: BeliefKind::FullJoint,
            max_degree,
            degrees: by_degree.keys().copied().collect(),
            law: BeliefLaw::Joint(by_degree.into_values().collect()),
        })
    }

    pub fn kind(&self) -> BeliefKind {
        self.kind
    }

    /// Largest neighbor degree the beliefs can produce.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Own degrees with beliefs, ascending.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn contains(&self, degree: usize) -> bool {
        self.position(degree).is_some()
    }

    fn position(&self, degree: usize) -> Option<usize> {
        self.degrees.binary_search(&degree).ok()
    }

    /// The i.i.d. row for `degree` (None for joint beliefs).
    pub fn row(&self, degree: usize) -> Option<&[f64]> {
        match &self.law {
            BeliefLaw::Rows(rows) => self.position(degree).map(|i| rows[i].as_slice()),
            BeliefLaw::Joint(_) => None,
        }
    }

    pub fn joint(&self, degree: usize) -> Option<&[JointOutcome]> {
        match &self.law {
            BeliefLaw::Joint(laws) => self.position(degree).map(|i| laws[i].as_slice()),
            BeliefLaw::Rows(_) => None,
        }
    }

    /// Law of a single neighbor's degree, indexed like a row.
    pub fn marginal(&self, degree: usize) -> Option<Vec<f64>> {
        match &self.law {
            BeliefLaw::Rows(_) => self.row(degree).map(|r| r.to_vec()),
            BeliefLaw::Joint(_) => {
                let outcomes = self.joint(degree)?;
                let mut m = vec![0.0; self.max_degree];
                for (t, p) in outcomes {
                    m[t[0] - 1] += p;
                }
                Some(m)
            }
        }
    }

    /// Neighbor degrees with positive probability for a degree-`degree` player.
    pub fn neighbor_support(&self, degree: usize) -> Option<Vec<usize>> {
        let m = self.marginal(degree)?;
        Some(
            m.iter()
                .enumerate()
                .filter(|(_, p)| **p > 0.0)
                .map(|(k, _)| k + 1)
                .collect(),
        )
    }

    /// Swaps the beliefs held by own degrees `a` and `b` (i.i.d. kinds only).
    pub fn with_rows_swapped(&self, a: usize, b: usize) -> Result<Self> {
        let (ia, ib) = match (self.position(a), self.position(b)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(input("both degrees must be in the belief support")),
        };
        match &self.law {
            BeliefLaw::Rows(rows) => {
                let mut rows = rows.clone();
                rows.swap(ia, ib);
                let kind = if rows.windows(2).all(|w| w[0] == w[1]) {
                    BeliefKind::Independent
                } else {
                    BeliefKind::ConditionalIid
                };
                Ok(NeighborBeliefs {
                    kind,
                    max_degree: self.max_degree,
                    degrees: self.degrees.clone(),
                    law: BeliefLaw::Rows(rows),
                })
            }
            BeliefLaw::Joint(_) => Err(input("row swaps need i.i.d. beliefs")),
        }
    }
}

/// Returns a tuple whose probability differs from one of its adjacent
/// transpositions, if any.
fn exchangeability_violation(law: &BTreeMap<Vec<usize>, f64>) -> Option<Vec<usize>> {
    for (t, p) in law {
        for i in 0..t.len().saturating_sub(1) {
            let mut s = t.clone();
            s.swap(i, i + 1);
            let q = law.get(&s).copied().unwrap_or(0.0);
            if (p - q).abs() > PROB_TOL {
                return Some(t.clone());
            }
        }
    }
    None
}

/// A real function on `{1..=domain_max}^arity`, stored as a lookup table in
/// row-major order (first coordinate most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneTable {
    domain_max: usize,
    arity: usize,
    values: Vec<f64>,
}

impl MonotoneTable {
    /// Builds a table without checking monotonicity; see
    /// [`MonotoneTable::first_violation`].
    pub fn new(domain_max: usize, arity: usize, values: Vec<f64>) -> Result<Self> {
        if domain_max == 0 || arity == 0 {
            return Err(input("test functions need domain_max >= 1 and arity >= 1"));
        }
        let expected = tuple_count(domain_max, arity);
        if values.len() as u64 != expected {
            return Err(Error::Input(format!(
                "table has {} entries, expected {expected}",
                values.len()
            )));
        }
        Ok(MonotoneTable {
            domain_max,
            arity,
            values,
        })
    }

    pub fn from_fn(domain_max: usize, arity: usize, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let mut values = Vec::new();
        let mut shifted = vec![0; arity];
        for_each_tuple(domain_max, arity, |t| {
            for (s, x) in shifted.iter_mut().zip(t) {
                *s = x + 1;
            }
            values.push(f(&shifted));
        });
        Self::new(domain_max, arity, values)
    }

    /// `F(d_1..d_m) = d_1 + ... + d_m`.
    pub fn identity_sum(domain_max: usize, arity: usize) -> Result<Self> {
        Self::from_fn(domain_max, arity, |t| t.iter().sum::<usize>() as f64)
    }

    /// `F(d_1..d_m) = max_j d_j`.
    pub fn coordinate_max(domain_max: usize, arity: usize) -> Result<Self> {
        Self::from_fn(domain_max, arity, |t| *t.iter().max().unwrap_or(&0) as f64)
    }

    pub fn domain_max(&self) -> usize {
        self.domain_max
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn offset(&self, tuple: &[usize]) -> Option<usize> {
        if tuple.len() != self.arity {
            return None;
        }
        let mut idx = 0;
        for &x in tuple {
            if x == 0 || x > self.domain_max {
                return None;
            }
            idx = idx * self.domain_max + (x - 1);
        }
        Some(idx)
    }

    /// Value at a degree tuple, `None` outside the domain.
    pub fn get(&self, tuple: &[usize]) -> Option<f64> {
        self.offset(tuple).map(|i| self.values[i])
    }

    /// Scans every unit-increment pair; returns `(tuple, axis)` where raising
    /// coordinate `axis` by one lowers the value.
    pub fn first_violation(&self) -> Option<(Vec<usize>, usize)> {
        let mut found = None;
        let mut t1 = vec![0; self.arity];
        for_each_tuple(self.domain_max, self.arity, |t| {
            if found.is_some() {
                return;
            }
            for (s, x) in t1.iter_mut().zip(t) {
                *s = x + 1;
            }
            let here = self.values[self.offset(&t1).unwrap()];
            for axis in 0..self.arity {
                if t1[axis] < self.domain_max {
                    t1[axis] += 1;
                    let up = self.values[self.offset(&t1).unwrap()];
                    t1[axis] -= 1;
                    if up < here {
                        found = Some((t1.clone(), axis));
                        return;
                    }
                }
            }
        });
        found
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.first_violation().is_none()
    }

    /// Number of unit-increment pairs the monotonicity scan inspects.
    pub fn adjacent_pair_count(&self) -> u64 {
        self.arity as u64
            * tuple_count(self.domain_max, self.arity - 1)
            * (self.domain_max as u64 - 1)
    }
}

/// `E_{P(·|d)}[F]` over the first `m` neighbor coordinates.
pub fn subset_expectation(
    beliefs: &NeighborBeliefs,
    degree: usize,
    f: &MonotoneTable,
    m: usize,
) -> Result<f64> {
    if m == 0 || m > degree {
        return Err(Error::Domain(format!(
            "subset size {m} must satisfy 1 <= m <= degree {degree}"
        )));
    }
    if f.arity() != m {
        return Err(Error::Input(format!(
            "test function has arity {}, subset size is {m}",
            f.arity()
        )));
    }
    if !beliefs.contains(degree) {
        return Err(Error::Input(format!("no beliefs held by degree {degree}")));
    }
    if let Some(row) = beliefs.row(degree) {
        let support: Vec<(usize, f64)> = row
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(k, p)| (k + 1, *p))
            .collect();
        if let Some((k, _)) = support.iter().find(|(k, _)| *k > f.domain_max()) {
            return Err(Error::Input(format!(
                "test function undefined at reachable neighbor degree {k}"
            )));
        }
        let mut total = 0.0;
        let mut tuple = vec![0; m];
        for_each_tuple(support.len(), m, |idx| {
            let mut p = 1.0;
            for (slot, &i) in tuple.iter_mut().zip(idx) {
                *slot = support[i].0;
                p *= support[i].1;
            }
            total += p * f.get(&tuple).unwrap();
        });
        Ok(total)
    } else {
        let outcomes = beliefs.joint(degree).unwrap();
        let mut total = 0.0;
        for (t, p) in outcomes {
            let v = f.get(&t[..m]).ok_or_else(|| {
                Error::Input(format!("test function undefined at reachable tuple {:?}", &t[..m]))
            })?;
            total += p * v;
        }
        Ok(total)
    }
}

/// A finite association audit: one subset size, a family of non-decreasing
/// test functions, and the own-degree pairs `(k, k')` with `k' > k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationTest {
    m: usize,
    functions: Vec<MonotoneTable>,
    pairs: Vec<(usize, usize)>,
}

impl AssociationTest {
    pub fn new(m: usize, functions: Vec<MonotoneTable>, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if functions.is_empty() {
            return Err(input("association test needs at least one test function"));
        }
        if pairs.is_empty() {
            return Err(input("association test needs at least one degree pair"));
        }
        for (i, f) in functions.iter().enumerate() {
            if f.arity() != m {
                return Err(Error::Input(format!(
                    "test function {i} has arity {}, subset size is {m}",
                    f.arity()
                )));
            }
            if let Some((t, axis)) = f.first_violation() {
                return Err(Error::Input(format!(
                    "test function {i} decreases along axis {axis} at {t:?}"
                )));
            }
        }
        for &(k, k2) in &pairs {
            if k2 <= k {
                return Err(Error::Input(format!("degree pair ({k}, {k2}) needs k' > k")));
            }
            if m > k {
                return Err(Error::Domain(format!(
                    "subset size {m} exceeds the smaller degree {k} of pair ({k}, {k2})"
                )));
            }
        }
        Ok(AssociationTest { m, functions, pairs })
    }

    /// All ordered pairs of own degrees in the support that can host a
    /// subset of size `m`.
    pub fn all_pairs(beliefs: &NeighborBeliefs, m: usize, functions: Vec<MonotoneTable>) -> Result<Self> {
        let degrees: Vec<usize> = beliefs.degrees().iter().copied().filter(|&d| d >= m).collect();
        let mut pairs = Vec::new();
        for (i, &k) in degrees.iter().enumerate() {
            for &k2 in &degrees[i + 1..] {
                pairs.push((k, k2));
            }
        }
        Self::new(m, functions, pairs)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn functions(&self) -> &[MonotoneTable] {
        &self.functions
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssociationVerdict {
    /// `E[F | k'] >= E[F | k]` for every pair and function (weak).
    Positive,
    /// `E[F | k'] < E[F | k]` for every pair and function (strict).
    Negative,
    Neither,
}

impl AssociationVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            AssociationVerdict::Positive => "satisfies-positive",
            AssociationVerdict::Negative => "satisfies-negative",
            AssociationVerdict::Neither => "neither",
        }
    }
}

/// One `(pair, function)` comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRow {
    pub lower_degree: usize,
    pub higher_degree: usize,
    pub function: usize,
    pub expectation_lower: f64,
    pub expectation_higher: f64,
    /// `expectation_higher - expectation_lower`.
    pub difference: f64,
    /// The row verdict is `Positive` when the difference is within tolerance
    /// of non-negative, `Negative` otherwise.
    pub verdict: AssociationVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationReport {
    pub rows: Vec<AssociationRow>,
    pub verdict: AssociationVerdict,
    /// First row that breaks positive association.
    pub positive_witness: Option<usize>,
    /// First row that breaks negative association.
    pub negative_witness: Option<usize>,
}

pub fn check_association(beliefs: &NeighborBeliefs, test: &AssociationTest) -> Result<AssociationReport> {
    let mut rows = Vec::with_capacity(test.pairs.len() * test.functions.len());
    for &(k, k2) in &test.pairs {
        for (fi, f) in test.functions.iter().enumerate() {
            let lo = subset_expectation(beliefs, k, f, test.m)?;
            let hi = subset_expectation(beliefs, k2, f, test.m)?;
            let diff = hi - lo;
            rows.push(AssociationRow {
                lower_degree: k,
                higher_degree: k2,
                function: fi,
                expectation_lower: lo,
                expectation_higher: hi,
                difference: diff,
                verdict: if diff >= -PROB_TOL {
                    AssociationVerdict::Positive
                } else {
                    AssociationVerdict::Negative
                },
            });
        }
    }
    let positive_witness = rows.iter().position(|r| r.verdict != AssociationVerdict::Positive);
    let negative_witness = rows.iter().position(|r| r.verdict != AssociationVerdict::Negative);
    let verdict = match (positive_witness, negative_witness) {
        (None, _) => AssociationVerdict::Positive,
        (Some(_), None) => AssociationVerdict::Negative,
        _ => AssociationVerdict::Neither,
    };
    Ok(AssociationReport {
        rows,
        verdict,
        positive_witness,
        negative_witness,
    })
}

/// A seeded family of non-decreasing tables on `{1..=domain_max}^m`.
///
/// The canonical functions (coordinate sum, then coordinate max, deduplicated
/// when they coincide at `m = 1`) always come first; random tables fill the
/// list up to `how_many`. Random tables are `m`-dimensional prefix sums of
/// strictly positive increments, mostly small with occasional large jumps,
/// which makes them strictly increasing and lets them approximate indicators
/// of upper sets.
pub fn generate_monotone_test_functions(
    domain_max: usize,
    m: usize,
    how_many: usize,
    seed: u64,
) -> Result<Vec<MonotoneTable>> {
    if how_many == 0 {
        return Err(input("how_many must be at least 1"));
    }
    let mut out = vec![MonotoneTable::identity_sum(domain_max, m)?];
    let max = MonotoneTable::coordinate_max(domain_max, m)?;
    if max != out[0] {
        out.push(max);
    }
    let mut rng = rng_from_seed(seed);
    let len = tuple_count(domain_max, m) as usize;
    while out.len() < how_many {
        let jump_rate: f64 = rng.gen_range(0.05..0.5);
        let mut values: Vec<f64> = (0..len)
            .map(|_| {
                if rng.gen::<f64>() < jump_rate {
                    rng.gen_range(0.5..2.0)
                } else {
                    rng.gen_range(1e-3..1e-2)
                }
            })
            .collect();
        values[0] = rng.gen_range(-1.0..1.0);
        prefix_sum_all_axes(&mut values, domain_max, m);
        out.push(MonotoneTable::new(domain_max, m, values)?);
    }
    Ok(out)
}

fn prefix_sum_all_axes(values: &mut [f64], domain_max: usize, m: usize) {
    let mut stride = 1;
    for _ in 0..m {
        for i in 0..values.len() {
            if (i / stride) % domain_max != 0 {
                values[i] += values[i - stride];
            }
        }
        stride *= domain_max;
    }
}
