use std::fmt;

use num_traits::{One, Zero};

use super::PiecewiseMap;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::scalar::Rational;

/// Default cap on `branch_count^n` for exhaustive word enumeration.
pub const DEFAULT_WORD_BUDGET: u128 = 1 << 22;

/// Symbolic address of a branch of `f^n`: the branch index used at each step.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchWord(pub Vec<usize>);

impl BranchWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for BranchWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl From<Vec<usize>> for BranchWord {
    fn from(v: Vec<usize>) -> Self {
        BranchWord(v)
    }
}

/// One monotone branch of `f^n`: on `domain`, `f^n(x) = slope·x + intercept`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneBranch {
    pub word: BranchWord,
    pub domain: Interval,
    pub slope: Rational,
    pub intercept: Rational,
}

impl MonotoneBranch {
    pub fn eval(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }

    pub fn image(&self) -> Interval {
        self.domain.affine_image(&self.slope, &self.intercept)
    }

    /// Unique fixed point of the composed branch inside its domain. Errors
    /// when the branch is the identity (a whole interval of fixed points).
    pub fn fixed_point(&self) -> Result<Option<Rational>> {
        if self.slope.is_one() {
            if self.intercept.is_zero() {
                return Err(Error::NonIsolatedPeriodicPoints(self.word.to_string()));
            }
            return Ok(None);
        }
        let x = &self.intercept / (Rational::one() - &self.slope);
        Ok(self.domain.contains(&x).then_some(x))
    }

    /// The branch of `f^{n+1}` obtained by following `self` with branch `i`.
    pub fn extend(&self, f: &PiecewiseMap, i: usize) -> Option<MonotoneBranch> {
        let (s, t) = f.affine(i).ok()?;
        let hit = self.image().intersect(&f.branch_domain(i));
        if hit.is_empty() {
            return None;
        }
        let domain = hit.affine_preimage(&self.slope, &self.intercept).intersect(&self.domain);
        if domain.is_empty() {
            return None;
        }
        let mut word = self.word.clone();
        word.0.push(i);
        Some(MonotoneBranch { word, domain, slope: s * &self.slope, intercept: s * &self.intercept + t })
    }
}

/// The identity as the single branch of `f^0`.
pub fn identity_branch(f: &PiecewiseMap) -> MonotoneBranch {
    MonotoneBranch {
        word: BranchWord::default(),
        domain: f.domain(),
        slope: Rational::one(),
        intercept: Rational::zero(),
    }
}

/// The maximal closed interval realizing `word`, with the composed affine
/// data. `None` when no point follows the word. A single-point domain is
/// returned as such.
pub fn compose_branch(f: &PiecewiseMap, word: &BranchWord) -> Result<Option<MonotoneBranch>> {
    f.require_affine()?;
    if let Some(&bad) = word.0.iter().find(|&&i| i >= f.branch_count()) {
        return Err(Error::InvalidArgument(format!("branch index {bad} out of range")));
    }
    let mut cur = identity_branch(f);
    for &i in &word.0 {
        match cur.extend(f, i) {
            Some(next) => cur = next,
            None => return Ok(None),
        }
    }
    Ok(Some(cur))
}

/// All branches of `f^n` with nondegenerate domain, in lexicographic word
/// order. Their closures cover the domain and overlap only at endpoints.
///
/// Refuses when `branch_count^n` exceeds `budget`.
pub fn monotone_branches(f: &PiecewiseMap, n: usize, budget: u128) -> Result<Vec<MonotoneBranch>> {
    f.require_affine()?;
    let words = (f.branch_count() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if words > budget {
        return Err(Error::BudgetExceeded { words, budget });
    }
    let mut out = Vec::new();
    let mut stack = vec![identity_branch(f)];
    while let Some(cur) = stack.pop() {
        if cur.word.len() == n {
            out.push(cur);
            continue;
        }
        // Push in reverse so the smallest index is expanded first.
        for i in (0..f.branch_count()).rev() {
            if let Some(next) = cur.extend(f, i) {
                if !next.domain.is_degenerate() {
                    stack.push(next);
                }
            }
        }
    }
    Ok(out)
}

/// Branches of `f^{n+1}` refining the given branches of `f^n`, keeping
/// only nondegenerate domains and preserving lexicographic order.
pub fn refine(f: &PiecewiseMap, level: &[MonotoneBranch]) -> Vec<MonotoneBranch> {
    level
        .iter()
        .flat_map(|b| (0..f.branch_count()).filter_map(move |i| b.extend(f, i)))
        .filter(|b| !b.domain.is_degenerate())
        .collect()
}

/// Branch indices visited by the orbit of `x` for `n` steps, taking the
/// leftmost admissible branch at breakpoints.
pub fn itinerary(f: &PiecewiseMap, x: &Rational, n: usize) -> Result<BranchWord> {
    let mut word = Vec::with_capacity(n);
    let mut y = x.clone();
    for _ in 0..n {
        let i = f.branch_at(&y)?;
        let (s, t) = f.affine(i)?;
        y = s * &y + t;
        word.push(i);
    }
    Ok(BranchWord(word))
}
