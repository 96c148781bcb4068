//! How a starred vertex splits.
//!
//! At a starred class `(b, c) mod p^k` with `k >= 1`, write
//! `f(b, c) = alpha * p^k`. Because `p^{2k}` vanishes modulo `p^{k+1}`,
//!
//! ```text
//! f(b + p^k i, c + p^k j) = p^k (alpha + f_x(b,c) i + f_y(b,c) j)   (mod p^{k+1})
//! ```
//!
//! so the starred children are the solutions of a linear congruence
//! modulo `p`: none, all of them, or a line of `p^(arity-1)` digit tuples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::Prime;
use crate::poly::{Horner, Polynomial, Var};
use crate::scalar::Scalar;

use super::{digits_at, NodeLabel, ResidueClass, TreeNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    AllStar,
    AllTerminal,
    /// `p` starred children (one in the univariate case).
    ExactlyP,
    /// A starred-child count outside the trichotomy. Only the brute-force
    /// oracle can report this.
    Irregular(usize),
}

impl SplitKind {
    pub fn name(self) -> &'static str {
        match self {
            SplitKind::AllStar => "all_star",
            SplitKind::AllTerminal => "all_terminal",
            SplitKind::ExactlyP => "exactly_p",
            SplitKind::Irregular(_) => "irregular",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplitAnalysis {
    /// `f(b, c) / p^k mod p`.
    pub alpha: u64,
    /// Gradient at the base point mod `p`, one entry per variable.
    pub lin: Vec<u64>,
    pub kind: SplitKind,
    /// Digit tuples of the starred children, lexicographic.
    pub star_digits: Vec<Vec<u64>>,
}

impl SplitAnalysis {
    /// Solves `alpha + lin . d = 0 (mod p)` for the digits `d`.
    pub fn from_congruence(alpha: u64, lin: Vec<u64>, p: Prime) -> Self {
        let pv = p.get() as u128;
        let star_digits: Vec<Vec<u64>> = (0..p.get().pow(lin.len() as u32))
            .filter(|i| {
                let s = lin
                    .iter()
                    .zip(digits_at(*i, p, lin.len()))
                    .fold(alpha as u128, |acc, (l, d)| {
                        (acc + *l as u128 * d as u128) % pv
                    });
                s == 0
            })
            .map(|i| digits_at(i, p, lin.len()).collect())
            .collect();
        let kind = match (lin.iter().all(|l| *l == 0), alpha == 0) {
            (true, true) => SplitKind::AllStar,
            (true, false) => SplitKind::AllTerminal,
            (false, _) => SplitKind::ExactlyP,
        };
        SplitAnalysis {
            alpha,
            lin,
            kind,
            star_digits,
        }
    }

    pub fn lin_x(&self) -> u64 {
        self.lin[0]
    }

    pub fn lin_y(&self) -> Option<u64> {
        self.lin.get(1).copied()
    }
}

/// Caches the gradient of `f` so that many vertices can be classified.
#[derive(Debug, Clone)]
pub struct Splitter<T> {
    f: Horner<T>,
    fx: Horner<T>,
    fy: Horner<T>,
    p: Prime,
}

impl<T: Scalar> Splitter<T> {
    pub fn new(f: &Polynomial<T>, p: Prime) -> Result<Self> {
        Ok(Splitter {
            f: Horner::new(f),
            fx: Horner::new(&f.partial_derivative(Var::X)?),
            fy: Horner::new(&f.partial_derivative(Var::Y)?),
            p,
        })
    }

    /// Linearized split of a starred class at level `>= 1`.
    pub fn split(&self, class: &ResidueClass<T>) -> Result<SplitAnalysis> {
        if class.level == 0 {
            return Err(Error::Precondition(
                "the root split is not governed by the linear congruence".into(),
            ));
        }
        let p: T = self.p.as_scalar()?;
        let alpha = cofactor(self.f.evaluate_at(&class.residues)?, class, &p)?;
        let lin = self.gradient(&class.residues)?;
        Ok(SplitAnalysis::from_congruence(alpha, lin, self.p))
    }

    pub(crate) fn value_at(&self, point: &[T]) -> Result<T> {
        self.f.evaluate_at(point)
    }

    /// Formal gradient at `point` reduced mod `p`, one entry per coordinate.
    pub fn gradient(&self, point: &[T]) -> Result<Vec<u64>> {
        let p: T = self.p.as_scalar()?;
        let mut lin = vec![reduce(&self.fx.evaluate_at(point)?, &p)];
        if point.len() == 2 {
            lin.push(reduce(&self.fy.evaluate_at(point)?, &p));
        }
        Ok(lin)
    }
}

fn reduce<T: Scalar>(v: &T, p: &T) -> u64 {
    v.rem_floor(p).to_u64().expect("residue below a u64 prime")
}

/// `value / p^k mod p` for `value = f(rep)`, failing unless `p^k | f(rep)`.
fn cofactor<T: Scalar>(value: T, class: &ResidueClass<T>, p: &T) -> Result<u64> {
    let (q, r) = value.div_rem(&class.modulus);
    if !r.is_zero() {
        return Err(Error::Precondition(format!(
            "f is not divisible by {} on {class}; the class is not starred",
            class.modulus
        )));
    }
    Ok(reduce(&q, p))
}

fn check_star<T: Scalar>(node: &TreeNode<T>) -> Result<()> {
    match node.label {
        NodeLabel::Star | NodeLabel::Frontier if node.class.level >= 1 => Ok(()),
        NodeLabel::Star | NodeLabel::Frontier => {
            Err(Error::Precondition("cannot classify the root split".into()))
        }
        NodeLabel::Terminal(v) => Err(Error::Precondition(format!(
            "node {} is terminal (label {v}), not starred",
            node.class
        ))),
    }
}

/// Trichotomy classification from the gradient congruence.
pub fn classify_star<T: Scalar>(
    f: &Polynomial<T>,
    p: Prime,
    node: &TreeNode<T>,
) -> Result<SplitAnalysis> {
    check_star(node)?;
    Splitter::new(f, p)?.split(&node.class)
}

/// Oracle: classifies by evaluating `f` on every child class.
pub fn brute_force_classify<T: Scalar>(
    f: &Polynomial<T>,
    p: Prime,
    node: &TreeNode<T>,
) -> Result<SplitAnalysis> {
    check_star(node)?;
    brute_force_split(f, p, &node.class)
}

/// Oracle on a bare class. `alpha` is read off `f(rep)`, the gradient from
/// first differences `(f(rep + p^k e) - f(rep)) / p^k`, and the starred
/// children by direct evaluation modulo `p^{k+1}`.
pub fn brute_force_split<T: Scalar>(
    f: &Polynomial<T>,
    p: Prime,
    class: &ResidueClass<T>,
) -> Result<SplitAnalysis> {
    if class.level == 0 {
        return Err(Error::Precondition("cannot classify the root split".into()));
    }
    let pt: T = p.as_scalar()?;
    let base = f.evaluate_at(&class.residues)?;
    let alpha = cofactor(base.clone(), class, &pt)?;
    let arity = class.arity();
    let mut lin = Vec::with_capacity(arity);
    for axis in 0..arity {
        let mut offset = vec![T::zero(); arity];
        offset[axis] = T::one();
        let shifted = f.evaluate_at(&class.member(&offset)?)?;
        let diff = shifted.sub_checked(&base)?;
        lin.push(reduce(&(diff / class.modulus.clone()), &pt));
    }
    let next = class.modulus.mul_checked(&pt)?;
    let mut star_digits = Vec::new();
    let steps = (0..p.get())
        .map(|d| class.modulus.mul_checked(&T::from_u64_exact(d)?))
        .collect::<Result<Vec<_>>>()?;
    let mut point = class.residues.clone();
    for i in 0..p.get().pow(arity as u32) {
        for ((coord, r), d) in point
            .iter_mut()
            .zip(&class.residues)
            .zip(digits_at(i, p, arity))
        {
            *coord = r.add_checked(&steps[d as usize])?;
        }
        if f.evaluate_at(&point)?.rem_floor(&next).is_zero() {
            star_digits.push(digits_at(i, p, arity).collect());
        }
    }
    let total = (p.get() as usize).pow(arity as u32);
    let kind = match star_digits.len() {
        0 => SplitKind::AllTerminal,
        n if n == total => SplitKind::AllStar,
        n if n == total / p.get() as usize => SplitKind::ExactlyP,
        n => SplitKind::Irregular(n),
    };
    Ok(SplitAnalysis {
        alpha,
        lin,
        kind,
        star_digits,
    })
}
