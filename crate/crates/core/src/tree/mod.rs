//! Labelled p-adic valuation trees.
//!
//! Level-`m` vertices are residue classes modulo `p^m` (pairs of classes in
//! the bivariate case). A vertex whose valuation is determined carries a
//! terminal label; otherwise it is starred and splits into `p^arity`
//! children, one per new base-`p` digit tuple.

mod closed_form;
mod constant;
mod split;

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::padic::{valuation, Prime, Valuation};
use crate::poly::{Polynomial, Var};
use crate::scalar::Scalar;

pub use closed_form::{closed_form, ClosedFormReport, Piece};
pub use constant::constant_valuation;
pub use split::{
    brute_force_classify, brute_force_split, classify_star, SplitAnalysis, SplitKind, Splitter,
};

pub const DEFAULT_NODE_BUDGET: usize = 200_000;
pub const DEFAULT_DEPTH: u32 = 4;

/// Levels below this are expanded in parallel.
const PARALLEL_LEVELS: u32 = 2;

/// The set `{ r + p^m * t }` (componentwise) for one or two variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueClass<T> {
    pub level: u32,
    pub residues: Vec<T>,
    pub modulus: T,
}

impl<T: Scalar> ResidueClass<T> {
    /// Level 0: every input.
    pub fn root(arity: usize) -> Self {
        ResidueClass {
            level: 0,
            residues: vec![T::zero(); arity],
            modulus: T::one(),
        }
    }

    pub fn new(level: u32, residues: Vec<T>, p: Prime) -> Result<Self> {
        if !(1..=2).contains(&residues.len()) {
            return Err(Error::OutOfRange(format!(
                "arity {} (must be 1 or 2)",
                residues.len()
            )));
        }
        let modulus = p.pow::<T>(level)?;
        if let Some(r) = residues.iter().find(|r| r.is_negative() || **r >= modulus) {
            return Err(Error::OutOfRange(format!(
                "residue {r} not in [0, {modulus})"
            )));
        }
        Ok(ResidueClass {
            level,
            residues,
            modulus,
        })
    }

    pub fn arity(&self) -> usize {
        self.residues.len()
    }

    pub fn contains(&self, point: &[T]) -> bool {
        self.residues
            .iter()
            .zip(point)
            .all(|(r, x)| x.rem_floor(&self.modulus) == *r)
    }

    /// The member `r + modulus * offset` (componentwise).
    pub fn member(&self, offset: &[T]) -> Result<Vec<T>> {
        self.residues
            .iter()
            .zip(offset)
            .map(|(r, o)| r.add_checked(&self.modulus.mul_checked(o)?))
            .collect()
    }

    /// The `p^arity` refinements at the next level, ordered
    /// lexicographically by the new digits.
    pub fn children(&self, p: Prime) -> Result<Vec<Self>> {
        let modulus = self.modulus.mul_checked(&p.as_scalar()?)?;
        let steps = (0..p.get())
            .map(|d| self.modulus.mul_checked(&T::from_u64_exact(d)?))
            .collect::<Result<Vec<_>>>()?;
        let count = p.get().pow(self.arity() as u32);
        let mut out = Vec::with_capacity(count as usize);
        for i in 0..count {
            let digits = digits_at(i, p, self.arity());
            let residues = self
                .residues
                .iter()
                .zip(digits)
                .map(|(r, d)| r.add_checked(&steps[d as usize]))
                .collect::<Result<_>>()?;
            out.push(ResidueClass {
                level: self.level + 1,
                residues,
                modulus: modulus.clone(),
            });
        }
        Ok(out)
    }
}

impl<T: Scalar> fmt::Display for ResidueClass<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.residues.as_slice() {
            [r] => write!(f, "({r} mod {})", self.modulus),
            rs => {
                let parts: Vec<String> = rs.iter().map(ToString::to_string).collect();
                write!(f, "(({}) mod {})", parts.join(", "), self.modulus)
            }
        }
    }
}

/// All digit tuples in `[0, p)^arity`, lexicographic.
pub(crate) fn digit_tuples(p: Prime, arity: usize) -> Vec<Vec<u64>> {
    (0..p.get().pow(arity as u32))
        .map(|i| digits_at(i, p, arity).collect())
        .collect()
}

/// The `i`-th digit tuple in lexicographic order.
pub(crate) fn digits_at(i: u64, p: Prime, arity: usize) -> impl Iterator<Item = u64> {
    let p = p.get();
    (0..arity as u32).rev().map(move |k| i / p.pow(k) % p)
}

/// Refinements of `c` at the next level.
pub fn child_classes<T: Scalar>(c: &ResidueClass<T>, p: Prime) -> Result<Vec<ResidueClass<T>>> {
    c.children(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeLabel {
    Terminal(u32),
    Star,
    Frontier,
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeLabel::Terminal(v) => v.fmt(f),
            NodeLabel::Star => f.write_str("*"),
            NodeLabel::Frontier => f.write_str("frontier"),
        }
    }
}

/// When a vertex counts as terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelRule {
    /// Level `l` vertex is terminal iff `f != 0 (mod p^l)` on it; its label
    /// is then `l - 1`.
    Modular,
    /// Terminal iff `nu_p(f)` takes the same value at every member.
    Constant,
}

impl LabelRule {
    /// `Constant` for one variable, `Modular` for two.
    pub fn default_for(arity: usize) -> Self {
        if arity == 1 {
            LabelRule::Constant
        } else {
            LabelRule::Modular
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LabelRule::Modular => "modular",
            LabelRule::Constant => "constant",
        }
    }
}

/// Label of class `c` under `rule`. For the modular rule at level `l` the
/// parent is assumed starred, so a terminal label is always `l - 1`.
pub fn node_label<T: Scalar>(
    f: &Polynomial<T>,
    c: &ResidueClass<T>,
    p: Prime,
    rule: LabelRule,
) -> Result<NodeLabel> {
    match rule {
        LabelRule::Modular => Ok(modular_label(&f.evaluate_at(&c.residues)?, c, p)),
        LabelRule::Constant => Ok(match constant_valuation(f, c, p)? {
            Some(v) => NodeLabel::Terminal(v),
            None => NodeLabel::Star,
        }),
    }
}

fn modular_label<T: Scalar>(value: &T, c: &ResidueClass<T>, p: Prime) -> NodeLabel {
    match valuation(value, p) {
        Valuation::Finite(v) if v < c.level => NodeLabel::Terminal(v),
        _ => NodeLabel::Star,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode<T> {
    pub class: ResidueClass<T>,
    pub label: NodeLabel,
    pub children: Vec<TreeNode<T>>,
    pub split: Option<SplitAnalysis>,
}

impl<T: Scalar> TreeNode<T> {
    pub fn leaf(class: ResidueClass<T>, label: NodeLabel) -> Self {
        TreeNode {
            class,
            label,
            children: Vec::new(),
            split: None,
        }
    }

    /// Preorder traversal.
    pub fn iter(&self) -> impl Iterator<Item = &TreeNode<T>> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let node = stack.pop()?;
            stack.extend(node.children.iter().rev());
            Some(node)
        })
    }

    pub fn count(&self) -> usize {
        self.iter().count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationTree<T> {
    pub f: Polynomial<T>,
    pub p: Prime,
    pub arity: usize,
    pub max_depth: u32,
    pub rule: LabelRule,
    pub root: TreeNode<T>,
}

impl<T: Scalar> ValuationTree<T> {
    pub fn nodes(&self) -> impl Iterator<Item = &TreeNode<T>> {
        self.root.iter()
    }

    pub fn node_count(&self) -> usize {
        self.root.count()
    }

    pub fn frontier(&self) -> impl Iterator<Item = &TreeNode<T>> {
        self.nodes().filter(|n| n.label == NodeLabel::Frontier)
    }

    /// Nodes at a given level, left to right.
    pub fn level(&self, level: u32) -> Vec<&TreeNode<T>> {
        self.nodes().filter(|n| n.class.level == level).collect()
    }

    /// Deepest node whose class contains `point`.
    pub fn locate(&self, point: &[T]) -> &TreeNode<T> {
        let mut node = &self.root;
        while let Some(next) = node.children.iter().find(|c| c.class.contains(point)) {
            node = next;
        }
        node
    }
}

/// Configures and runs tree construction.
#[derive(Debug, Clone)]
pub struct TreeBuilder {
    p: Prime,
    arity: Option<usize>,
    max_depth: u32,
    rule: Option<LabelRule>,
    node_budget: usize,
}

impl TreeBuilder {
    pub fn new(p: Prime) -> Self {
        TreeBuilder {
            p,
            arity: None,
            max_depth: DEFAULT_DEPTH,
            rule: None,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    /// Defaults to 2 when the polynomial mentions `y`, else 1.
    pub fn arity(mut self, arity: usize) -> Self {
        self.arity = Some(arity);
        self
    }

    pub fn max_depth(mut self, depth: u32) -> Self {
        self.max_depth = depth;
        self
    }

    /// Defaults to [`LabelRule::default_for`] the arity.
    pub fn rule(mut self, rule: LabelRule) -> Self {
        self.rule = Some(rule);
        self
    }

    pub fn node_budget(mut self, budget: usize) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn build<T: Scalar>(&self, f: &Polynomial<T>) -> Result<ValuationTree<T>> {
        let arity = self.arity.unwrap_or_else(|| f.natural_arity());
        if !(1..=2).contains(&arity) {
            return Err(Error::OutOfRange(format!("arity {arity} (must be 1 or 2)")));
        }
        if arity == 1 && f.depends_on(Var::Y) {
            return Err(Error::Precondition(
                "a univariate tree needs a polynomial without `y`".into(),
            ));
        }
        if self.max_depth == 0 {
            return Err(Error::OutOfRange("depth must be at least 1".into()));
        }
        let rule = self.rule.unwrap_or(LabelRule::default_for(arity));
        let ctx = Builder {
            f,
            splitter: Splitter::new(f, self.p)?,
            p: self.p,
            rule,
            max_depth: self.max_depth,
            budget: self.node_budget,
            used: AtomicUsize::new(1),
        };
        let class = ResidueClass::root(arity);
        let label = match rule {
            LabelRule::Modular => NodeLabel::Star,
            LabelRule::Constant => node_label(f, &class, self.p, rule)?,
        };
        let root = ctx.grow(class, label)?;
        Ok(ValuationTree {
            f: f.clone(),
            p: self.p,
            arity,
            max_depth: self.max_depth,
            rule,
            root,
        })
    }
}

/// `build_tree(f, p, arity, max_depth)` with the default rule and budget.
pub fn build_tree<T: Scalar>(
    f: &Polynomial<T>,
    p: Prime,
    arity: usize,
    max_depth: u32,
) -> Result<ValuationTree<T>> {
    TreeBuilder::new(p)
        .arity(arity)
        .max_depth(max_depth)
        .build(f)
}

struct Builder<'a, T> {
    f: &'a Polynomial<T>,
    splitter: Splitter<T>,
    p: Prime,
    rule: LabelRule,
    max_depth: u32,
    budget: usize,
    used: AtomicUsize,
}

impl<T: Scalar> Builder<'_, T> {
    fn grow(&self, class: ResidueClass<T>, label: NodeLabel) -> Result<TreeNode<T>> {
        if label != NodeLabel::Star {
            return Ok(TreeNode::leaf(class, label));
        }
        if class.level >= self.max_depth {
            return Ok(TreeNode::leaf(class, NodeLabel::Frontier));
        }
        let classes = class.children(self.p)?;
        let added = self.used.fetch_add(classes.len(), Ordering::Relaxed) + classes.len();
        if added > self.budget {
            return Err(Error::BudgetExceeded { limit: self.budget });
        }
        let split = if class.level >= 1 {
            Some(self.splitter.split(&class)?)
        } else {
            None
        };
        let expand = |c: ResidueClass<T>| {
            let label = match self.rule {
                LabelRule::Modular => {
                    modular_label(&self.splitter.value_at(&c.residues)?, &c, self.p)
                }
                LabelRule::Constant => node_label(self.f, &c, self.p, self.rule)?,
            };
            self.grow(c, label)
        };
        let children = if class.level < PARALLEL_LEVELS {
            classes
                .into_par_iter()
                .map(expand)
                .collect::<Result<Vec<_>>>()?
        } else {
            classes
                .into_iter()
                .map(expand)
                .collect::<Result<Vec<_>>>()?
        };
        Ok(TreeNode {
            class,
            label,
            children,
            split,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Poly;
    use num_bigint::BigInt;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn poly(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn class(level: u32, rs: &[i64], p: u64) -> ResidueClass<BigInt> {
        ResidueClass::new(level, rs.iter().map(|r| BigInt::from(*r)).collect(), pr(p)).unwrap()
    }

    fn residues(c: &ResidueClass<BigInt>) -> Vec<i64> {
        c.residues.iter().map(|r| r.try_into().unwrap()).collect()
    }

    #[test]
    fn child_class_examples() {
        let kids = child_classes(&class(1, &[1], 2), pr(2)).unwrap();
        assert_eq!(
            kids.iter().map(residues).collect::<Vec<_>>(),
            vec![vec![1], vec![3]]
        );
        assert!(kids
            .iter()
            .all(|k| k.level == 2 && k.modulus == BigInt::from(4)));

        let kids = child_classes(&class(1, &[1, 1], 2), pr(2)).unwrap();
        assert_eq!(
            kids.iter().map(residues).collect::<Vec<_>>(),
            vec![vec![1, 1], vec![1, 3], vec![3, 1], vec![3, 3]]
        );

        let kids = child_classes(&ResidueClass::<BigInt>::root(2), pr(3)).unwrap();
        assert_eq!(kids.len(), 9);
        assert_eq!(residues(&kids[5]), vec![1, 2]);
    }

    #[test]
    fn residue_class_validation() {
        assert!(ResidueClass::<i64>::new(2, vec![4], pr(2)).is_err());
        assert!(ResidueClass::<i64>::new(2, vec![-1], pr(2)).is_err());
        assert!(ResidueClass::<i64>::new(1, vec![0, 0, 0], pr(2)).is_err());
        let c = ResidueClass::<i64>::new(2, vec![3, 1], pr(3)).unwrap();
        assert!(c.contains(&[12, 10]));
        assert!(c.contains(&[-6, 1]));
        assert!(!c.contains(&[12, 11]));
        assert_eq!(c.to_string(), "((3, 1) mod 9)");
    }

    #[test]
    fn node_label_examples() {
        let f = poly("x^2 + 5");
        assert_eq!(
            node_label(&f, &class(1, &[0], 2), pr(2), LabelRule::Modular).unwrap(),
            NodeLabel::Terminal(0)
        );
        assert_eq!(
            node_label(&f, &class(1, &[0], 2), pr(2), LabelRule::Constant).unwrap(),
            NodeLabel::Terminal(0)
        );
        // f = 6 (mod 8) on the odd class, so the constant rule stops at level 1.
        assert_eq!(
            node_label(&f, &class(1, &[1], 2), pr(2), LabelRule::Constant).unwrap(),
            NodeLabel::Terminal(1)
        );
        assert_eq!(
            node_label(&f, &class(1, &[1], 2), pr(2), LabelRule::Modular).unwrap(),
            NodeLabel::Star
        );

        let g = poly("x^2 + y^2 + x*y + x + y + 1");
        assert_eq!(
            node_label(&g, &class(1, &[1, 1], 2), pr(2), LabelRule::Modular).unwrap(),
            NodeLabel::Star
        );
        assert_eq!(
            node_label(&g, &class(2, &[1, 3], 2), pr(2), LabelRule::Modular).unwrap(),
            NodeLabel::Terminal(1)
        );
    }

    #[test]
    fn square_plus_five_tree() {
        let t = build_tree(&poly("x^2 + 5"), pr(2), 1, 4).unwrap();
        assert_eq!(t.rule, LabelRule::Constant);
        assert_eq!(t.root.label, NodeLabel::Star);
        let labels: Vec<_> = t.root.children.iter().map(|c| c.label).collect();
        assert_eq!(labels, vec![NodeLabel::Terminal(0), NodeLabel::Terminal(1)]);
        assert_eq!(t.node_count(), 3);
    }

    #[test]
    fn quadric_tree() {
        let t = build_tree(&poly("x^2 + y^2 + x*y + x + y + 1"), pr(2), 2, 4).unwrap();
        let level1: Vec<_> = t.level(1).iter().map(|n| n.label).collect();
        assert_eq!(
            level1,
            vec![
                NodeLabel::Terminal(0),
                NodeLabel::Terminal(0),
                NodeLabel::Terminal(0),
                NodeLabel::Star
            ]
        );
        let level2: Vec<_> = t.level(2).iter().map(|n| n.label).collect();
        assert_eq!(level2, vec![NodeLabel::Terminal(1); 4]);
        assert_eq!(t.node_count(), 9);
        let star = &t.root.children[3];
        assert_eq!(star.split.as_ref().unwrap().kind, SplitKind::AllTerminal);
    }

    #[test]
    fn modular_rule_terminal_labels_are_level_minus_one() {
        for src in ["x^2 + 7", "x^3 - 2", "x^2 + 5"] {
            let t = TreeBuilder::new(pr(2))
                .max_depth(7)
                .rule(LabelRule::Modular)
                .build(&poly(src))
                .unwrap();
            for n in t.nodes() {
                if let NodeLabel::Terminal(v) = n.label {
                    assert_eq!(v + 1, n.class.level, "{src}");
                }
            }
        }
    }

    #[test]
    fn frontier_only_at_max_depth() {
        let t = build_tree(&poly("x^2 + 7"), pr(2), 1, 6).unwrap();
        assert!(t.frontier().count() > 0);
        for n in t.nodes() {
            if n.label == NodeLabel::Frontier {
                assert_eq!(n.class.level, 6);
            }
            if n.class.level == 6 {
                assert_ne!(n.label, NodeLabel::Star);
            }
        }
    }

    #[test]
    fn zero_polynomial_is_all_frontier() {
        let t = build_tree(&poly("0"), pr(2), 2, 2).unwrap();
        assert_eq!(t.frontier().count(), 16);
        assert!(t
            .nodes()
            .all(|n| matches!(n.label, NodeLabel::Star | NodeLabel::Frontier)));
        let t = build_tree(&poly("0"), pr(3), 1, 3).unwrap();
        assert_eq!(t.frontier().count(), 27);
    }

    #[test]
    fn budget_is_enforced() {
        let err = TreeBuilder::new(pr(5))
            .max_depth(5)
            .node_budget(1000)
            .build(&poly("x^2 + y^2"))
            .unwrap_err();
        assert_eq!(err, Error::BudgetExceeded { limit: 1000 });
    }

    #[test]
    fn arity_validation() {
        assert!(matches!(
            build_tree(&poly("x + y"), pr(2), 1, 3),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            build_tree(&poly("x + 1"), pr(2), 3, 3),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            build_tree(&poly("x + 1"), pr(2), 1, 0),
            Err(Error::OutOfRange(_))
        ));
        // a univariate polynomial can still be viewed in the plane
        let t = build_tree(&poly("x^2 + 5"), pr(2), 2, 3).unwrap();
        assert_eq!(t.root.children.len(), 4);
    }

    #[test]
    fn constant_rule_root_can_be_terminal() {
        let t = build_tree(&poly("x^2 + x + 1"), pr(2), 1, 3).unwrap();
        assert_eq!(t.root.label, NodeLabel::Terminal(0));
        assert!(t.root.children.is_empty());
        let t = TreeBuilder::new(pr(2))
            .max_depth(3)
            .build(&poly("2^20"))
            .unwrap();
        assert_eq!(t.root.label, NodeLabel::Terminal(20));
    }

    #[test]
    fn fixed_width_matches_bigint() {
        let src = "3*x^3 - x*y^2 + 6*y - 9";
        let big = build_tree(&poly(src), pr(3), 2, 4).unwrap();
        let small = build_tree(&src.parse::<Polynomial<i64>>().unwrap(), pr(3), 2, 4).unwrap();
        assert_eq!(big.node_count(), small.node_count());
        for (a, b) in big.nodes().zip(small.nodes()) {
            assert_eq!(a.label, b.label);
            assert_eq!(a.split, b.split);
        }
    }
}
