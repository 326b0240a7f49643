//! Dense linear algebra over any [`Field`]; used by oracles and tests only.

use crate::error::{Error, Result};
use crate::field::Field;

/// Solve `m x = rhs` for square `m` (rows of equal length) by Gaussian
/// elimination.
pub fn solve<F: Field>(f: &F, m: &[Vec<F::Elem>], rhs: &[F::Elem]) -> Result<Vec<F::Elem>> {
    let n = m.len();
    if rhs.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::Length {
            expected: n,
            got: rhs.len(),
        });
    }
    let mut a: Vec<Vec<F::Elem>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !f.is_zero(&a[r][col]))
            .ok_or(Error::SingularSystem)?;
        a.swap(col, piv);
        let inv = f.inv(&a[col][col])?;
        for v in a[col].iter_mut() {
            *v = f.mul(v, &inv);
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || f.is_zero(&row[col]) {
                continue;
            }
            let c = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = f.sub(v, &f.mul(&c, pv));
            }
        }
    }
    Ok(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Determinant by cofactor expansion along the first row (small sizes only).
pub fn det_cofactor<F: Field>(f: &F, m: &[Vec<F::Elem>]) -> F::Elem {
    let n = m.len();
    if n == 0 {
        return f.one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = f.zero();
    for j in 0..n {
        let minor: Vec<Vec<F::Elem>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = f.mul(&m[0][j], &det_cofactor(f, &minor));
        acc = if j % 2 == 0 {
            f.add(&acc, &term)
        } else {
            f.sub(&acc, &term)
        };
    }
    acc
}

pub fn mat_vec<F: Field>(f: &F, m: &[Vec<F::Elem>], v: &[F::Elem]) -> Vec<F::Elem> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solve_random_systems() {
        let f = Fp::new(10007).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..10 {
            let m: Vec<Vec<u64>> = (0..n)
                .map(|_| (0..n).map(|_| f.random(&mut rng)).collect())
                .collect();
            let x: Vec<u64> = (0..n).map(|_| f.random(&mut rng)).collect();
            let b = mat_vec(&f, &m, &x);
            if det_cofactor(&f, &m) != 0 {
                assert_eq!(solve(&f, &m, &b).unwrap(), x);
            }
        }
        assert_eq!(
            solve(&f, &[vec![1, 2], vec![2, 4]], &[1, 1]),
            Err(Error::SingularSystem)
        );
    }
}
