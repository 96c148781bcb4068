//! Executable property suites: each compares a fast path against an
//! independent oracle and reports counterexamples.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::padic::{
    binomial, central_binomial_valuation, factorial_valuation, is_power_of, stirling_column,
    stirling_valuation_closed, valuation, Prime, Valuation,
};
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::tree::{
    brute_force_classify, brute_force_split, digit_tuples, LabelRule, NodeLabel, ResidueClass,
    SplitAnalysis, SplitKind, Splitter, TreeBuilder, ValuationTree, DEFAULT_NODE_BUDGET,
};

/// Counterexamples kept per report.
const MAX_FAILURES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub suite: String,
    /// What one check is, e.g. "star nodes".
    pub unit: String,
    pub checked: usize,
    pub failed: usize,
    pub failures: Vec<String>,
    /// Extra summary lines.
    pub notes: Vec<String>,
}

impl VerifyReport {
    fn new(suite: &str, unit: &str) -> Self {
        VerifyReport {
            suite: suite.into(),
            unit: unit.into(),
            checked: 0,
            failed: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_FAILURES {
                self.failures.push(describe());
            }
        }
    }

    fn absorb(&mut self, other: VerifyReport) {
        self.checked += other.checked;
        self.failed += other.failed;
        let room = MAX_FAILURES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = self.checked - self.failed;
        if self.passed() {
            writeln!(f, "OK: {ok}/{} {} matched oracle", self.checked, self.unit)?;
        } else {
            writeln!(
                f,
                "FAIL: {ok}/{} {} matched oracle",
                self.checked, self.unit
            )?;
        }
        for note in &self.notes {
            writeln!(f, "  {note}")?;
        }
        for failure in &self.failures {
            writeln!(f, "  counterexample: {failure}")?;
        }
        Ok(())
    }
}

/// Dense polynomial of exact total degree `degree` with coefficients
/// uniform in `[-p^2, p^2]`, resampled until it is nonzero mod `p`.
pub fn random_polynomial<T: Scalar, R: Rng>(
    rng: &mut R,
    degree: u32,
    p: Prime,
) -> Result<Polynomial<T>> {
    let bound = (p.get() * p.get()) as i64;
    loop {
        let mut terms = Vec::new();
        for total in 0..=degree {
            for x in 0..=total {
                let c = rng.gen_range(-bound..=bound);
                terms.push((x, total - x, T::from_i64(c).ok_or(Error::Overflow)?));
            }
        }
        let f = Polynomial::from_terms(terms)?;
        let exact_degree = f.total_degree() == crate::poly::Degree::Finite(degree);
        let pt: T = p.as_scalar()?;
        let nonzero_mod_p = f.terms().any(|(_, c)| !c.is_multiple_of(&pt));
        if exact_degree && nonzero_mod_p {
            return Ok(f);
        }
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Outcome of comparing the gradient classifier with the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarCheck {
    pub class: String,
    pub level: u32,
    pub linearized: SplitAnalysis,
    pub brute: SplitAnalysis,
}

impl StarCheck {
    pub fn agrees(&self, p: Prime) -> bool {
        let arity = self.linearized.lin.len() as u32;
        let stars = self.brute.star_digits.len() as u64;
        let allowed = [0, p.get().pow(arity - 1), p.get().pow(arity)];
        self.linearized == self.brute
            && !matches!(self.brute.kind, SplitKind::Irregular(_))
            && allowed.contains(&stars)
    }
}

/// Visits every starred class at levels `1..max_depth` of the modular-rule
/// tree without materializing it. Children are found by the oracle, so
/// the walk itself does not trust the classifier.
pub fn walk_stars<T: Scalar>(
    f: &Polynomial<T>,
    p: Prime,
    arity: usize,
    max_depth: u32,
    mut visit: impl FnMut(StarCheck) -> bool,
) -> Result<()> {
    let splitter = Splitter::new(f, p)?;
    let pt: T = p.as_scalar()?;
    let mut stack: Vec<ResidueClass<T>> = ResidueClass::root(arity)
        .children(p)?
        .into_iter()
        .filter(|c| {
            f.evaluate_at(&c.residues)
                .map(|v| v.is_multiple_of(&pt))
                .unwrap_or(true)
        })
        .rev()
        .collect();
    while let Some(class) = stack.pop() {
        if class.level >= max_depth {
            continue;
        }
        let brute = brute_force_split(f, p, &class)?;
        let linearized = splitter.split(&class)?;
        let children: Vec<ResidueClass<T>> = brute
            .star_digits
            .iter()
            .map(|d| {
                let offset = d
                    .iter()
                    .map(|x| T::from_u64_exact(*x))
                    .collect::<Result<Vec<_>>>()?;
                let residues = class.member(&offset)?;
                Ok(ResidueClass {
                    level: class.level + 1,
                    residues,
                    modulus: class.modulus.mul_checked(&pt)?,
                })
            })
            .collect::<Result<_>>()?;
        let check = StarCheck {
            class: class.to_string(),
            level: class.level,
            linearized,
            brute,
        };
        if !visit(check) {
            return Ok(());
        }
        stack.extend(children.into_iter().rev());
    }
    Ok(())
}

/// Checks every starred node of a materialized tree: the stored split
/// (gradient classifier) against the oracle, and the children's labels
/// against the split's starred digits.
pub fn check_tree_stars<T: Scalar>(
    t: &ValuationTree<T>,
    mut visit: impl FnMut(StarCheck, bool) -> bool,
) -> Result<()> {
    for node in t.nodes() {
        if node.label != NodeLabel::Star || node.class.level == 0 {
            continue;
        }
        let linearized = node
            .split
            .clone()
            .ok_or_else(|| Error::Inconsistent(format!("star node {} has no split", node.class)))?;
        let brute = brute_force_classify(&t.f, t.p, node)?;
        let digits = digit_tuples(t.p, t.arity);
        let labels_agree = node.children.len() == digits.len()
            && node.children.iter().zip(&digits).all(|(child, d)| {
                let starred = matches!(child.label, NodeLabel::Star | NodeLabel::Frontier);
                starred == linearized.star_digits.contains(d)
            });
        let check = StarCheck {
            class: node.class.to_string(),
            level: node.class.level,
            linearized,
            brute,
        };
        if !visit(check, labels_agree) {
            break;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrichotomySummary {
    pub polynomials: usize,
    pub star_nodes: usize,
    pub kinds: BTreeMap<&'static str, usize>,
    /// Polynomials whose tree exceeded the node budget and were checked by
    /// the streaming walk instead.
    pub walked: usize,
}

fn check_one<T: Scalar>(
    f: &Polynomial<T>,
    p: Prime,
    depth: u32,
    limit: usize,
) -> Result<(VerifyReport, TrichotomySummary)> {
    let mut report = VerifyReport::new("trichotomy", "star nodes");
    let mut summary = TrichotomySummary {
        polynomials: 1,
        ..Default::default()
    };
    let tally = |check: StarCheck,
                 extra_ok: bool,
                 report: &mut VerifyReport,
                 summary: &mut TrichotomySummary| {
        let ok = extra_ok && check.agrees(p);
        *summary.kinds.entry(check.brute.kind.name()).or_default() += 1;
        summary.star_nodes += 1;
        report.record(ok, || {
            format!(
                "f = {f}, p = {p}, node {} (level {}): gradient {:?} vs oracle {:?}{}",
                check.class,
                check.level,
                check.linearized,
                check.brute,
                if extra_ok {
                    ""
                } else {
                    " (child labels disagree)"
                }
            )
        });
        report.checked < limit
    };
    let built = TreeBuilder::new(p)
        .arity(2)
        .rule(LabelRule::Modular)
        .max_depth(depth)
        .node_budget(DEFAULT_NODE_BUDGET)
        .build(f);
    match built {
        Ok(tree) => check_tree_stars(&tree, |c, ok| tally(c, ok, &mut report, &mut summary))?,
        Err(Error::BudgetExceeded { .. }) => {
            summary.walked = 1;
            walk_stars(f, p, 2, depth, |c| {
                tally(c, true, &mut report, &mut summary)
            })?;
        }
        Err(e) => return Err(e),
    }
    Ok((report, summary))
}

/// Trichotomy over `polynomials` random bivariate polynomials of the given
/// degree, every starred node at levels `1..depth`.
pub fn trichotomy_suite<T: Scalar>(
    degree: u32,
    p: Prime,
    polynomials: usize,
    depth: u32,
    seed: u64,
) -> Result<(VerifyReport, TrichotomySummary)> {
    let mut rng = seeded_rng(seed);
    let polys = (0..polynomials)
        .map(|_| random_polynomial::<T, _>(&mut rng, degree, p))
        .collect::<Result<Vec<_>>>()?;
    let results = polys
        .par_iter()
        .map(|f| check_one(f, p, depth, usize::MAX))
        .collect::<Result<Vec<_>>>()?;
    let mut report = VerifyReport::new("trichotomy", "star nodes");
    let mut summary = TrichotomySummary::default();
    for (r, s) in results {
        report.absorb(r);
        summary.polynomials += s.polynomials;
        summary.star_nodes += s.star_nodes;
        summary.walked += s.walked;
        for (k, n) in s.kinds {
            *summary.kinds.entry(k).or_default() += n;
        }
    }
    report.notes.push(format!(
        "{} polynomials of degree {degree}, p = {p}, depth {depth}; splits {:?}",
        summary.polynomials, summary.kinds
    ));
    Ok((report, summary))
}

/// Checks exactly `samples` starred nodes drawn from a seeded stream of
/// random polynomials, at most [`STARS_PER_POLYNOMIAL`] from each.
pub const STARS_PER_POLYNOMIAL: usize = 10;

pub fn trichotomy_samples<T: Scalar>(
    degree: u32,
    p: Prime,
    samples: usize,
    depth: u32,
    seed: u64,
) -> Result<VerifyReport> {
    let mut rng = seeded_rng(seed);
    let mut report = VerifyReport::new("trichotomy", "star nodes");
    let mut polys = 0usize;
    while report.checked < samples {
        let f = random_polynomial::<T, _>(&mut rng, degree, p)?;
        polys += 1;
        let take = (samples - report.checked).min(STARS_PER_POLYNOMIAL);
        let (r, _) = check_one(&f, p, depth, take)?;
        report.absorb(r);
        if polys > 1000 * samples.max(1) {
            return Err(Error::Inconsistent(
                "random polynomials produced no starred nodes".into(),
            ));
        }
    }
    report.notes.push(format!(
        "{polys} polynomials of degree {degree}, p = {p}, depth {depth}, seed {seed}"
    ));
    Ok(report)
}

/// Gradient mod `p` from formal derivatives against the hand-expanded
/// degree-2 coefficients `2a20 i0 + a11 j0 + a10` and `2a02 j0 + a11 i0 + a01`.
pub fn gradient_identity_suite(samples: usize, seed: u64) -> Result<VerifyReport> {
    let mut rng = seeded_rng(seed);
    let primes = [2u64, 3, 5, 7, 11, 13];
    let mut report = VerifyReport::new("eq4", "base points");
    for _ in 0..samples {
        let p = Prime::new(primes[rng.gen_range(0..primes.len())])?;
        let f: Polynomial<BigInt> = random_polynomial(&mut rng, 2, p)?;
        let modulus = p.get().pow(4);
        let (b, c) = (rng.gen_range(0..modulus), rng.gen_range(0..modulus));
        let got = Splitter::new(&f, p)?.gradient(&[BigInt::from(b), BigInt::from(c)])?;
        let a = |l, m| f.coeff(l, m);
        let (i0, j0) = (BigInt::from(b % p.get()), BigInt::from(c % p.get()));
        let pb = BigInt::from(p.get());
        let ex = (BigInt::from(2) * a(2, 0) * &i0 + a(1, 1) * &j0 + a(1, 0)).mod_floor(&pb);
        let ey = (BigInt::from(2) * a(0, 2) * &j0 + a(1, 1) * &i0 + a(0, 1)).mod_floor(&pb);
        let expected: Vec<u64> = vec![ex.try_into().unwrap(), ey.try_into().unwrap()];
        report.record(got == expected, || {
            format!(
                "f = {f}, p = {p}, point ({b}, {c}): derivative {got:?} vs explicit {expected:?}"
            )
        });
    }
    Ok(report)
}

/// Both Legendre forms against direct factorization of `n!`.
pub fn legendre_suite(n_max: u64, primes: &[u64]) -> Result<VerifyReport> {
    let mut report = VerifyReport::new("legendre", "(n, p) pairs");
    for &p in primes {
        let p = Prime::new(p)?;
        let mut fact = BigInt::from(1);
        for n in 0..=n_max {
            if n > 0 {
                fact *= n;
            }
            let direct = valuation(&fact, p);
            let formula = factorial_valuation(n, p);
            let ok = matches!((&formula, direct), (Ok(v), Valuation::Finite(d)) if *v == d as u64);
            report.record(ok, || {
                format!("n = {n}, p = {p}: formula {formula:?}, direct {direct}")
            });
        }
    }
    Ok(report)
}

/// `nu_2(C(2n, n)) = s_2(n)` and `C(2n, n) / 2` odd iff `n` is a power of 2.
pub fn central_binomial_suite(n_max: u64) -> VerifyReport {
    let two = Prime::new(2).expect("2 is prime");
    let mut report = VerifyReport::new("central-binomial", "values of n");
    for n in 0..=n_max {
        let c = binomial(2 * n, n);
        let direct = valuation(&c, two);
        let claimed = central_binomial_valuation(n);
        let mut ok = direct == Valuation::Finite(claimed as u32);
        if n >= 1 {
            let half_odd = (c / 2u32).is_odd();
            ok &= half_odd == is_power_of(n, two);
        }
        report.record(ok, || {
            format!("n = {n}: s_2 = {claimed}, nu_2(C(2n,n)) = {direct}")
        });
    }
    report
}

/// Closed forms for `nu_2(S(n, k))`, `1 <= k <= 4`, `k <= n <= n_max`.
pub fn stirling_suite(n_max: u64) -> Result<VerifyReport> {
    let two = Prime::new(2)?;
    let mut report = VerifyReport::new("stirling", "(n, k) pairs");
    for k in 1..=4u64 {
        let column = stirling_column(n_max, k);
        for n in k..=n_max {
            let direct = valuation(&column[n as usize], two);
            let closed = stirling_valuation_closed(n, k)?;
            report.record(direct == Valuation::Finite(closed as u32), || {
                format!("n = {n}, k = {k}: closed form {closed}, nu_2(S) = {direct}")
            });
        }
    }
    Ok(report)
}

/// In the tree of `f`, each non-terminal node at level `k >= min_level`
/// (below the depth limit) must have exactly two children: one terminal
/// with valuation `k + offset`, the other starred or terminal with
/// valuation `> k + offset`.
pub fn binary_splitting_check<T: Scalar>(
    t: &ValuationTree<T>,
    min_level: u32,
    offset: u32,
) -> VerifyReport {
    let mut report = VerifyReport::new("splitting", "non-terminal nodes");
    for node in t.nodes() {
        if node.label != NodeLabel::Star || node.class.level < min_level {
            continue;
        }
        let k = node.class.level;
        let want = k + offset;
        let terminal_k = node
            .children
            .iter()
            .filter(|c| c.label == NodeLabel::Terminal(want))
            .count();
        let deeper = node
            .children
            .iter()
            .filter(|c| match c.label {
                NodeLabel::Terminal(v) => v > want,
                _ => true,
            })
            .count();
        let ok = node.children.len() == 2 && terminal_k == 1 && deeper == 1;
        report.record(ok, || {
            let labels: Vec<String> = node
                .children
                .iter()
                .map(|c| format!("{} {}", c.class, c.label))
                .collect();
            format!(
                "node {} at level {k}: children [{}], wanted one terminal {want}",
                node.class,
                labels.join(", ")
            )
        });
    }
    report
}

/// The n^2 + 7 splitting statement at `p = 2`: a non-terminal node at
/// level `k >= 3` has one terminal child with valuation `k` and one child
/// with valuation at least `k + 1`.
pub fn n2plus7_suite(depth: u32) -> Result<VerifyReport> {
    let f: Polynomial<BigInt> = "x^2 + 7".parse()?;
    let t = TreeBuilder::new(Prime::new(2)?)
        .arity(1)
        .max_depth(depth)
        .build(&f)?;
    let mut report = binary_splitting_check(&t, 3, 0);
    report.suite = "n2plus7".into();
    Ok(report)
}
