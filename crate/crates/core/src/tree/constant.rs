//! Deciding whether `nu_p(f)` is constant on a residue class.

use crate::error::Result;
use crate::padic::{valuation, Prime, Valuation};
use crate::poly::{Polynomial, Var};
use crate::scalar::Scalar;

use super::ResidueClass;

/// `Some(v)` when `nu_p(f(z)) = v` for every member `z` of `class`.
///
/// Let `g(s, t) = f(b + p^m s, c + p^m t)` and `v = nu_p(g(0, 0))`. The
/// valuation is constant iff `p^v | g` everywhere and `g / p^v` never
/// vanishes mod `p`. The first condition holds iff every forward difference
/// of `g` at the origin is divisible by `p^v` (Newton basis of an
/// integer-valued polynomial). Given it, `g / p^v mod p` is periodic with
/// period `p^e` in each variable, where `p^e` exceeds the degree, so the
/// second condition needs only a box of side `p^e`.
pub fn constant_valuation<T: Scalar>(
    f: &Polynomial<T>,
    class: &ResidueClass<T>,
    p: Prime,
) -> Result<Option<u32>> {
    let arity = class.arity();
    let at = |s: u64, t: u64| -> Result<T> {
        let offset = [T::from_u64_exact(s)?, T::from_u64_exact(t)?];
        f.evaluate_at(&class.member(&offset[..arity])?)
    };
    let v = match valuation(&at(0, 0)?, p) {
        Valuation::Finite(v) => v,
        Valuation::Infinite => return Ok(None),
    };
    if v < class.level {
        // f is constant mod p^level on the class
        return Ok(Some(v));
    }

    let dx = f.degree_in(Var::X) as usize;
    let dy = if arity == 2 {
        f.degree_in(Var::Y) as usize
    } else {
        0
    };
    let mut table = Vec::with_capacity(dx + 1);
    for s in 0..=dx {
        let row = (0..=dy)
            .map(|t| at(s as u64, t as u64))
            .collect::<Result<Vec<T>>>()?;
        table.push(row);
    }
    for step in 1..=dx {
        for s in (step..=dx).rev() {
            let (lower, upper) = table.split_at_mut(s);
            for (cur, prev) in upper[0].iter_mut().zip(&lower[s - 1]) {
                *cur = cur.sub_checked(prev)?;
            }
        }
    }
    for row in table.iter_mut() {
        for step in 1..=dy {
            for t in (step..=dy).rev() {
                row[t] = row[t].sub_checked(&row[t - 1])?;
            }
        }
    }
    let pv: T = p.pow(v)?;
    let divisible = table
        .iter()
        .flatten()
        .all(|d| d.is_zero() || d.is_multiple_of(&pv));
    if !divisible {
        return Ok(None);
    }

    let degree = dx.max(dy) as u64;
    let mut side = 1u64;
    while side <= degree {
        side *= p.get();
    }
    let t_side = if arity == 2 { side } else { 1 };
    for s in 0..side {
        for t in 0..t_side {
            if valuation(&at(s, t)?, p) != Valuation::Finite(v) {
                return Ok(None);
            }
        }
    }
    Ok(Some(v))
}
