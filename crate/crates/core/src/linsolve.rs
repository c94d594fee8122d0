//! Dense exact linear algebra over the rationals, used for coefficient
//! matching (gluing sections, counting morphisms).

use num_traits::Zero;

use crate::ring::Rational;

/// Row-reduces `a` in place and returns the pivot columns.
pub fn row_reduce(a: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row >= a.len() {
            break;
        }
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let (src, dst) = if r < row {
                    let (lo, hi) = a.split_at_mut(row);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = a.split_at_mut(r);
                    (&lo[row], &mut hi[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    if !s.is_zero() {
                        *d -= &f * s;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    let mut a = rows.to_vec();
    row_reduce(&mut a, ncols).len()
}

/// Dimension of `{x : A x = 0}`.
pub fn nullity(rows: &[Vec<Rational>], ncols: usize) -> usize {
    ncols - rank(rows, ncols)
}

/// Some solution of `A x = b`, or `None` if the system is inconsistent.
pub fn solve(rows: &[Vec<Rational>], rhs: &[Rational], ncols: usize) -> Option<Vec<Rational>> {
    let mut aug: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][ncols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;
    use num_traits::One;

    fn q(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn rank_and_nullity() {
        let a = q(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank(&a, 3), 2);
        assert_eq!(nullity(&a, 3), 1);
        assert_eq!(nullity(&[], 4), 4);
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = q(&[&[1, 1], &[1, -1]]);
        let x = solve(&a, &[rat(3), rat(1)], 2).unwrap();
        assert_eq!(x, vec![rat(2), rat(1)]);
        let a = q(&[&[1, 1], &[2, 2]]);
        assert!(solve(&a, &[rat(1), rat(3)], 2).is_none());
        assert!(Rational::one() == solve(&a, &[rat(1), rat(2)], 2).unwrap()[0]);
    }
}
