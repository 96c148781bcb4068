use std::fmt;

use crate::scalar::Scalar;

use super::{NodeLabel, ResidueClass, TreeNode, ValuationTree};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece<T> {
    pub class: ResidueClass<T>,
    pub valuation: u32,
}

/// Piecewise description of `nu_p(f)` read off a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosedFormReport<T> {
    /// The terminal classes partition all inputs; the valuation is
    /// constant on each.
    Closed { pieces: Vec<Piece<T>> },
    /// Some branch reached the depth limit.
    Unresolved {
        depth: u32,
        frontier: Vec<ResidueClass<T>>,
    },
}

impl<T: Scalar> ClosedFormReport<T> {
    pub fn is_closed(&self) -> bool {
        matches!(self, ClosedFormReport::Closed { .. })
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        match self {
            ClosedFormReport::Closed { pieces } => pieces,
            ClosedFormReport::Unresolved { .. } => &[],
        }
    }

    /// Valuation at `point` by table lookup; `None` if unresolved.
    pub fn lookup(&self, point: &[T]) -> Option<u32> {
        self.pieces()
            .iter()
            .find(|piece| piece.class.contains(point))
            .map(|piece| piece.valuation)
    }
}

/// Collects terminal leaves, or the frontier when the tree is not finite.
pub fn closed_form<T: Scalar>(t: &ValuationTree<T>) -> ClosedFormReport<T> {
    let frontier: Vec<_> = t.frontier().map(|n| n.class.clone()).collect();
    if !frontier.is_empty() {
        return ClosedFormReport::Unresolved {
            depth: t.max_depth,
            frontier,
        };
    }
    let pieces = t
        .nodes()
        .filter_map(|n: &TreeNode<T>| match n.label {
            NodeLabel::Terminal(v) => Some(Piece {
                class: n.class.clone(),
                valuation: v,
            }),
            _ => None,
        })
        .collect();
    ClosedFormReport::Closed { pieces }
}

fn describe<T: Scalar>(class: &ResidueClass<T>) -> String {
    if class.level == 0 {
        return "all inputs".into();
    }
    match class.residues.as_slice() {
        [r] => format!("x = {r} (mod {})", class.modulus),
        [r, s] => format!("(x, y) = ({r}, {s}) (mod {})", class.modulus),
        _ => unreachable!("arity is 1 or 2"),
    }
}

impl<T: Scalar> fmt::Display for ClosedFormReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedFormReport::Closed { pieces } => {
                writeln!(f, "CLOSED ({} pieces)", pieces.len())?;
                for piece in pieces {
                    writeln!(f, "  {} -> {}", describe(&piece.class), piece.valuation)?;
                }
            }
            ClosedFormReport::Unresolved { depth, frontier } => {
                writeln!(
                    f,
                    "UNRESOLVED at depth {depth} ({} frontier classes)",
                    frontier.len()
                )?;
                for class in frontier {
                    writeln!(f, "  {} -> >= {}", describe(class), class.level)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Prime;
    use crate::tree::build_tree;
    use crate::Poly;
    use num_bigint::BigInt;

    #[test]
    fn square_plus_five_closed_form() {
        let f: Poly = "x^2 + 5".parse().unwrap();
        let report = closed_form(&build_tree(&f, Prime::new(2).unwrap(), 1, 4).unwrap());
        assert_eq!(
            report.to_string(),
            "CLOSED (2 pieces)\n  x = 0 (mod 2) -> 0\n  x = 1 (mod 2) -> 1\n"
        );
        assert_eq!(report.lookup(&[BigInt::from(7)]), Some(1));
    }

    #[test]
    fn quadric_closed_form() {
        let f: Poly = "x^2 + y^2 + x*y + x + y + 1".parse().unwrap();
        let report = closed_form(&build_tree(&f, Prime::new(2).unwrap(), 2, 4).unwrap());
        assert!(report.is_closed());
        for x in 0..6 {
            for y in 0..6 {
                let expected = u32::from(x % 2 == 1 && y % 2 == 1);
                assert_eq!(
                    report.lookup(&[BigInt::from(x), BigInt::from(y)]),
                    Some(expected)
                );
            }
        }
    }

    #[test]
    fn n_squared_plus_seven_is_unresolved() {
        let f: Poly = "x^2 + 7".parse().unwrap();
        let report = closed_form(&build_tree(&f, Prime::new(2).unwrap(), 1, 6).unwrap());
        match report {
            ClosedFormReport::Unresolved { depth, frontier } => {
                assert_eq!(depth, 6);
                assert!(!frontier.is_empty());
            }
            other => panic!("expected unresolved, got {other:?}"),
        }
    }
}
