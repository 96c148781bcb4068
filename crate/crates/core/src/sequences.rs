//! Valuations of polynomial values over integer grids: the value set, the
//! minimal period, and sampled valuation trees for sequences without a
//! polynomial formula (Stirling numbers).

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{is_power_of, stirling_column, valuation, Prime, Valuation};
use crate::poly::Polynomial;
use crate::scalar::Scalar;

pub const DEFAULT_WITNESSES: usize = 8;

/// `nu_p(f(n, m))` for `0 <= n, m < window` (just `n` when univariate),
/// row-major in `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationGrid {
    pub p: u64,
    pub arity: usize,
    pub window: usize,
    values: Vec<Valuation>,
}

impl ValuationGrid {
    pub fn get(&self, n: usize, m: usize) -> Valuation {
        match self.arity {
            1 => self.values[n],
            _ => self.values[n * self.window + m],
        }
    }

    pub fn values(&self) -> &[Valuation] {
        &self.values
    }

    pub fn rows(&self) -> Vec<&[Valuation]> {
        match self.arity {
            1 => vec![&self.values[..]],
            _ => self.values.chunks(self.window).collect(),
        }
    }

    /// Distinct finite values.
    pub fn vset(&self) -> BTreeSet<u32> {
        self.values.iter().filter_map(|v| v.finite()).collect()
    }

    /// Rows of comma-separated values, `inf` for infinite valuations.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Grid over the polynomial's natural arity.
pub fn valuation_grid<T: Scalar>(
    f: &Polynomial<T>,
    p: Prime,
    window: usize,
) -> Result<ValuationGrid> {
    valuation_grid_with_arity(f, p, window, f.natural_arity())
}

pub fn valuation_grid_with_arity<T: Scalar>(
    f: &Polynomial<T>,
    p: Prime,
    window: usize,
    arity: usize,
) -> Result<ValuationGrid> {
    if window == 0 {
        return Err(Error::OutOfRange("window must be at least 1".into()));
    }
    if !(1..=2).contains(&arity) {
        return Err(Error::OutOfRange(format!("arity {arity} (must be 1 or 2)")));
    }
    let cols = if arity == 2 { window } else { 1 };
    let values = (0..window)
        .into_par_iter()
        .map(|n| {
            (0..cols)
                .map(|m| {
                    let v = f.evaluate(
                        &T::from_usize(n).ok_or(Error::Overflow)?,
                        &T::from_usize(m).ok_or(Error::Overflow)?,
                    )?;
                    Ok(valuation(&v, p))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .concat();
    Ok(ValuationGrid {
        p: p.get(),
        arity,
        window,
        values,
    })
}

/// Smallest `d <= window / 2` such that shifting by `d` in every variable
/// leaves the grid unchanged inside the window. `None` means inconclusive
/// at this window, including whenever some value is infinite.
pub fn minimal_period(grid: &ValuationGrid) -> Option<usize> {
    if grid.values.iter().any(|v| v.is_infinite()) {
        return None;
    }
    let n = grid.window;
    let cols = if grid.arity == 2 { n } else { 1 };
    (1..=n / 2).find(|&d| {
        (0..n).all(|a| {
            (0..cols).all(|b| {
                let here = grid.get(a, b);
                let down = a + d >= n || grid.get(a + d, b) == here;
                let right = grid.arity == 1 || b + d >= n || grid.get(a, b + d) == here;
                down && right
            })
        })
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub p: u64,
    pub window: usize,
    pub arity: usize,
    pub grid: Vec<Vec<Valuation>>,
    pub vset: BTreeSet<u32>,
    pub period: Option<usize>,
    pub is_power_of_p: bool,
}

impl PeriodReport {
    pub fn from_grid(grid: &ValuationGrid) -> Self {
        let period = minimal_period(grid);
        let p = Prime::new(grid.p).expect("grid built from a validated prime");
        PeriodReport {
            p: grid.p,
            window: grid.window,
            arity: grid.arity,
            grid: grid.rows().into_iter().map(<[Valuation]>::to_vec).collect(),
            vset: grid.vset(),
            period,
            is_power_of_p: period.is_some_and(|d| is_power_of(d as u64, p)),
        }
    }
}

pub fn period_report<T: Scalar>(
    f: &Polynomial<T>,
    p: Prime,
    window: usize,
) -> Result<PeriodReport> {
    Ok(PeriodReport::from_grid(&valuation_grid(f, p, window)?))
}

/// Finite valuations over the triangle `0 <= m <= n < bound`; a
/// univariate `f` just runs over `0 <= n < bound`.
pub fn vset<T: Scalar>(f: &Polynomial<T>, p: Prime, bound: usize) -> Result<BTreeSet<u32>> {
    if bound == 0 {
        return Err(Error::OutOfRange("bound must be at least 1".into()));
    }
    let univariate = f.natural_arity() == 1;
    let mut out = BTreeSet::new();
    for n in 0..bound {
        let top = if univariate { 0 } else { n };
        for m in 0..=top {
            let v = f.evaluate(
                &T::from_usize(n).ok_or(Error::Overflow)?,
                &T::from_usize(m).ok_or(Error::Overflow)?,
            )?;
            out.extend(valuation(&v, p).finite());
        }
    }
    Ok(out)
}

/// Finite valuations over the full square `0 <= n, m < bound`.
pub fn vset_full<T: Scalar>(f: &Polynomial<T>, p: Prime, bound: usize) -> Result<BTreeSet<u32>> {
    Ok(valuation_grid(f, p, bound)?.vset())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EmpiricalStatus {
    /// The first `witnesses` members all had this valuation.
    Terminal {
        valuation: u32,
        witnesses: usize,
    },
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalNode {
    pub level: u32,
    pub residue: u64,
    pub modulus: u64,
    #[serde(flatten)]
    pub status: EmpiricalStatus,
}

/// Sampled valuation tree of an integer sequence. Terminal claims are
/// evidence from `witnesses` members, not proofs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalTreeReport {
    pub sequence: String,
    pub p: u64,
    pub depth: u32,
    pub witnesses: usize,
    /// Classes start at this index.
    pub start: u64,
    /// Mixed classes per level `0..=depth`.
    pub non_terminal_counts: Vec<usize>,
    pub nodes: Vec<EmpiricalNode>,
}

impl EmpiricalTreeReport {
    pub fn level(&self, level: u32) -> impl Iterator<Item = &EmpiricalNode> {
        self.nodes.iter().filter(move |n| n.level == level)
    }
}

/// Largest index the sampled tree can touch.
fn sample_bound(p: Prime, depth: u32, witnesses: usize, start: u64) -> Result<u64> {
    let m = p.get().checked_pow(depth).ok_or(Error::Overflow)?;
    m.checked_mul(witnesses as u64 + 1)
        .and_then(|x| x.checked_add(start))
        .ok_or(Error::Overflow)
}

/// Builds the class tree of `n -> values[n]` over `n >= start`, where the
/// class `(m, j)` holds `p^m i + j` for those `i` with `p^m i + j >= start`.
pub fn empirical_tree(
    sequence: impl Into<String>,
    values: &[Valuation],
    start: u64,
    p: Prime,
    depth: u32,
    witnesses: usize,
) -> Result<EmpiricalTreeReport> {
    if depth == 0 {
        return Err(Error::OutOfRange("depth must be at least 1".into()));
    }
    if witnesses < 2 {
        return Err(Error::OutOfRange(
            "at least 2 witnesses are required".into(),
        ));
    }
    let mut nodes = Vec::new();
    let mut counts = vec![0; depth as usize + 1];
    let mut queue = vec![(0u32, 0u64, 1u64)];
    while let Some((level, residue, modulus)) = queue.pop() {
        let first = if residue >= start {
            residue
        } else {
            residue + (start - residue).div_ceil(modulus) * modulus
        };
        let sample: Vec<Valuation> = (0..witnesses as u64)
            .map(|i| {
                let n = (first + i * modulus) as usize;
                values.get(n).copied().ok_or_else(|| {
                    Error::OutOfRange(format!("sequence too short: index {n} needed"))
                })
            })
            .collect::<Result<_>>()?;
        let status = match sample[0] {
            Valuation::Finite(v) if sample.iter().all(|s| *s == sample[0]) => {
                EmpiricalStatus::Terminal {
                    valuation: v,
                    witnesses,
                }
            }
            _ => EmpiricalStatus::Mixed,
        };
        if status == EmpiricalStatus::Mixed {
            counts[level as usize] += 1;
            if level < depth {
                // pushed in reverse so that children pop in digit order
                for d in (0..p.get()).rev() {
                    queue.push((level + 1, residue + d * modulus, modulus * p.get()));
                }
            }
        }
        nodes.push(EmpiricalNode {
            level,
            residue,
            modulus,
            status,
        });
    }
    Ok(EmpiricalTreeReport {
        sequence: sequence.into(),
        p: p.get(),
        depth,
        witnesses,
        start,
        non_terminal_counts: counts,
        nodes,
    })
}

/// Sampled valuation tree of `n -> S(n, k)` over `n >= k`.
pub fn stirling_tree(
    k: u64,
    p: Prime,
    depth: u32,
    witnesses: usize,
) -> Result<EmpiricalTreeReport> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    if depth == 0 {
        return Err(Error::OutOfRange("depth must be at least 1".into()));
    }
    if witnesses < 2 {
        return Err(Error::OutOfRange(
            "at least 2 witnesses are required".into(),
        ));
    }
    let bound = sample_bound(p, depth, witnesses, k)?;
    let values: Vec<Valuation> = stirling_column(bound, k)
        .iter()
        .map(|s| valuation(s, p))
        .collect();
    empirical_tree(format!("stirling-{k}"), &values, k, p, depth, witnesses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Poly;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn poly(s: &str) -> Poly {
        s.parse().unwrap()
    }

    const QUADRIC: &str = "x^2 + y^2 + x*y + x + y + 1";

    #[test]
    fn grid_examples() {
        let g = valuation_grid(&poly(QUADRIC), pr(2), 4).unwrap();
        for n in 0..4 {
            for m in 0..4 {
                let expected = Valuation::Finite(u32::from(n % 2 == 1 && m % 2 == 1));
                assert_eq!(g.get(n, m), expected);
            }
        }
        assert_eq!(g.vset(), BTreeSet::from([0, 1]));

        let g = valuation_grid(&poly("x^2 + 5"), pr(2), 6).unwrap();
        let vals: Vec<_> = g.values().iter().map(|v| v.finite().unwrap()).collect();
        assert_eq!(vals, vec![0, 1, 0, 1, 0, 1]);

        let g = valuation_grid(&poly("0"), pr(3), 2).unwrap();
        assert!(g.values().iter().all(|v| v.is_infinite()));
        assert!(g.vset().is_empty());
        assert!(valuation_grid(&poly("x"), pr(3), 0).is_err());
    }

    #[test]
    fn period_examples() {
        let r = period_report(&poly(QUADRIC), pr(2), 8).unwrap();
        assert_eq!((r.period, r.is_power_of_p), (Some(2), true));
        let r = period_report(&poly("x^2 + 5"), pr(2), 8).unwrap();
        assert_eq!((r.period, r.is_power_of_p), (Some(2), true));
        let r = period_report(&poly("x^2 + 7"), pr(2), 64).unwrap();
        assert_eq!(r.period, None);
        assert!(!r.is_power_of_p);
        // 3 | x^2 + 1 never, so the valuation is identically 0
        let r = period_report(&poly("x^2 + 1"), pr(3), 9).unwrap();
        assert_eq!(r.period, Some(1));
        // an infinite entry makes detection inconclusive
        assert_eq!(
            period_report(&poly("x - 3"), pr(2), 16).unwrap().period,
            None
        );
    }

    #[test]
    fn period_shift_invariance_holds() {
        for src in [QUADRIC, "x^2 + y^2 + 1", "x*y + 3", "x^2 - 3*y^2 + 2"] {
            for p in [2, 3] {
                let g = valuation_grid(&poly(src), pr(p), 18).unwrap();
                if let Some(d) = minimal_period(&g) {
                    for a in 0..18 - d {
                        for b in 0..18 {
                            assert_eq!(g.get(a, b), g.get(a + d, b));
                            assert_eq!(g.get(b, a), g.get(b, a + d));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn vset_examples() {
        assert_eq!(
            vset(&poly(QUADRIC), pr(2), 10).unwrap(),
            BTreeSet::from([0, 1])
        );
        assert_eq!(
            vset(&poly("x^2 + y^2"), pr(5), 10).unwrap(),
            BTreeSet::from([0, 1, 2])
        );
        assert_eq!(vset(&poly("1"), pr(7), 5).unwrap(), BTreeSet::from([0]));
        // the full square sees (x, y) = (1, 3) etc. too
        assert_eq!(
            vset_full(&poly(QUADRIC), pr(2), 10).unwrap(),
            BTreeSet::from([0, 1])
        );
    }

    #[test]
    fn csv_export() {
        let g = valuation_grid(&poly("x*y"), pr(2), 3).unwrap();
        assert_eq!(g.to_csv(), "inf,inf,inf\ninf,0,1\ninf,1,2\n");
        let g = valuation_grid(&poly("x^2 + 5"), pr(2), 4).unwrap();
        assert_eq!(g.to_csv(), "0,1,0,1\n");
    }

    fn level1(k: u64) -> Vec<(u64, EmpiricalStatus)> {
        let r = stirling_tree(k, pr(2), 2, 8).unwrap();
        r.level(1).map(|n| (n.residue, n.status)).collect()
    }

    #[test]
    fn stirling_tree_examples() {
        let t = |v| EmpiricalStatus::Terminal {
            valuation: v,
            witnesses: 8,
        };
        assert_eq!(level1(3), vec![(0, t(1)), (1, t(0))]);
        assert_eq!(level1(4), vec![(0, t(0)), (1, t(1))]);
        let r = stirling_tree(1, pr(2), 1, 8).unwrap();
        assert_eq!(r.nodes.len(), 1);
        assert_eq!(r.nodes[0].status, t(0));
        assert_eq!(r.non_terminal_counts, vec![0, 0]);
    }

    #[test]
    fn stirling_tree_rejects_bad_arguments() {
        assert!(stirling_tree(0, pr(2), 2, 8).is_err());
        assert!(stirling_tree(3, pr(2), 0, 8).is_err());
        assert!(stirling_tree(3, pr(2), 2, 1).is_err());
    }

    #[test]
    fn stirling_class_start_shift() {
        // class (m=1, j=0) for k = 3 starts at n = 4, not 0 or 2
        let r = stirling_tree(3, pr(2), 1, 2).unwrap();
        assert_eq!(r.start, 3);
        let even = r.level(1).next().unwrap();
        assert_eq!(
            even.status,
            EmpiricalStatus::Terminal {
                valuation: 1,
                witnesses: 2
            }
        );
    }
}
