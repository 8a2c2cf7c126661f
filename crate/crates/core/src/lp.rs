//! Dense primal simplex over exact rationals.
//!
//! Solves `max cᵀx` subject to `Ax ≤ b`, `x ≥ 0` with `b ≥ 0`, so the origin
//! is a feasible starting basis. Bland's rule prevents cycling.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Unbounded,
}

pub fn rational(v: f64) -> Rational {
    Rational::from_float(v).expect("finite value")
}

pub fn rational_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Panics if `b` has a negative entry.
pub fn maximize(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    assert!(
        b.iter().all(|v| !v.is_negative()),
        "origin must be feasible"
    );
    // tableau rows: [A | I | b], objective row: [-c | 0 | 0]
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, bi))| {
            let mut r = Vec::with_capacity(width);
            r.extend(row.iter().cloned());
            r.extend((0..m).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r.push(bi.clone());
            r
        })
        .collect();
    let mut obj: Vec<Rational> = c.iter().map(|v| -v.clone()).collect();
    obj.extend((0..=m).map(|_| Rational::zero()));
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(enter) = (0..n + m).find(|&j| obj[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width - 1] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            return LpOutcome::Unbounded;
        };
        pivot(&mut t, &mut obj, pr, enter);
        basis[pr] = enter;
    }

    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1].clone();
        }
    }
    LpOutcome::Optimal {
        x,
        value: obj[width - 1].clone(),
    }
}

fn pivot(t: &mut [Vec<Rational>], obj: &mut [Rational], pr: usize, pc: usize) {
    let p = t[pr][pc].clone();
    for v in t[pr].iter_mut() {
        *v = &*v / &p;
    }
    let prow = t[pr].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for (v, pv) in row.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
    if !obj[pc].is_zero() {
        let f = obj[pc].clone();
        for (v, pv) in obj.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}

/// Solves the square system `m x = rhs` exactly; `None` if singular.
pub fn solve(m: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = &*v / &p;
        }
        let prow = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= &f * pv;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Rational {
        rational_int(v)
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), value 36
        let out = maximize(
            &[q(3), q(5)],
            &[vec![q(1), q(0)], vec![q(0), q(2)], vec![q(3), q(2)]],
            &[q(4), q(12), q(18)],
        );
        assert_eq!(
            out,
            LpOutcome::Optimal {
                x: vec![q(2), q(6)],
                value: q(36)
            }
        );
    }

    #[test]
    fn unbounded_direction() {
        let out = maximize(&[q(1), q(0)], &[vec![q(0), q(1)]], &[q(1)]);
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_zero_optimum() {
        // max s with s ≤ x and x ≤ 0
        let out = maximize(
            &[q(0), q(1)],
            &[vec![q(-1), q(1)], vec![q(1), q(0)]],
            &[q(0), q(0)],
        );
        match out {
            LpOutcome::Optimal { value, .. } => assert!(value.is_zero()),
            _ => panic!("bounded"),
        }
    }

    #[test]
    fn exact_solve() {
        let x = solve(&[vec![q(2), q(1)], vec![q(1), q(3)]], &[q(1), q(2)]).unwrap();
        assert_eq!(
            x,
            vec![
                Rational::new(1.into(), 5.into()),
                Rational::new(3.into(), 5.into())
            ]
        );
        assert!(solve(&[vec![q(1), q(2)], vec![q(2), q(4)]], &[q(1), q(2)]).is_none());
    }
}
