//! Base-field operation counting and the small vector primitives used by the
//! straight-line programs (concatenation, componentwise product, rotation,
//! inner product).

use crate::field::{Field, Fp};

/// Tally of base-field additions and multiplications.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub adds: u64,
    pub muls: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> u64 {
        self.adds + self.muls
    }

    #[inline]
    pub fn add(&mut self, n: usize) {
        self.adds += n as u64;
    }

    #[inline]
    pub fn mul(&mut self, n: usize) {
        self.muls += n as u64;
    }
}

impl std::ops::AddAssign for OpCounter {
    fn add_assign(&mut self, o: Self) {
        self.adds += o.adds;
        self.muls += o.muls;
    }
}

pub fn inner(fp: &Fp, a: &[u64], b: &[u64], ops: &mut OpCounter) -> u64 {
    ops.mul(a.len());
    ops.add(a.len().saturating_sub(1));
    a.iter()
        .zip(b)
        .fold(0, |acc, (x, y)| fp.add(&acc, &fp.mul(x, y)))
}

pub fn hadamard(fp: &Fp, a: &[u64], b: &[u64], ops: &mut OpCounter) -> Vec<u64> {
    ops.mul(a.len());
    a.iter().zip(b).map(|(x, y)| fp.mul(x, y)).collect()
}

/// `sigma(a)_l = a_{l-1}`.
pub fn rotate(a: &[u64]) -> Vec<u64> {
    let n = a.len();
    (0..n).map(|l| a[(l + n - 1) % n]).collect()
}

/// `sigma^{-1}(a)_l = a_{l+1}`.
pub fn rotate_inv(a: &[u64]) -> Vec<u64> {
    let n = a.len();
    (0..n).map(|l| a[(l + 1) % n]).collect()
}

pub fn add_vec(fp: &Fp, a: &[u64], b: &[u64], ops: &mut OpCounter) -> Vec<u64> {
    ops.add(a.len());
    a.iter().zip(b).map(|(x, y)| fp.add(x, y)).collect()
}

pub fn sub_vec(fp: &Fp, a: &[u64], b: &[u64], ops: &mut OpCounter) -> Vec<u64> {
    ops.add(a.len());
    a.iter().zip(b).map(|(x, y)| fp.sub(x, y)).collect()
}

/// `(lo + hi)/2` and `(lo - hi)/2` for the two halves of `v`.
pub fn symmetrize(fp: &Fp, v: &[u64], ops: &mut OpCounter) -> (Vec<u64>, Vec<u64>) {
    let h = v.len() / 2;
    let half = fp.half();
    let (lo, hi) = v.split_at(h);
    ops.add(2 * h);
    ops.mul(2 * h);
    let plus = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| fp.mul(&half, &fp.add(a, b)))
        .collect();
    let minus = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| fp.mul(&half, &fp.sub(a, b)))
        .collect();
    (plus, minus)
}

/// `(a + b) ⊕ (a - b)`.
pub fn recombine(fp: &Fp, a: &[u64], b: &[u64], ops: &mut OpCounter) -> Vec<u64> {
    ops.add(2 * a.len());
    let mut out = Vec::with_capacity(2 * a.len());
    out.extend(a.iter().zip(b).map(|(x, y)| fp.add(x, y)));
    out.extend(a.iter().zip(b).map(|(x, y)| fp.sub(x, y)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_convention() {
        assert_eq!(rotate(&[1, 2, 3, 4]), vec![4, 1, 2, 3]);
        assert_eq!(rotate_inv(&rotate(&[1, 2, 3, 4])), vec![1, 2, 3, 4]);
    }

    #[test]
    fn counts_accumulate() {
        let fp = Fp::new(13).unwrap();
        let mut ops = OpCounter::new();
        assert_eq!(inner(&fp, &[1, 2], &[3, 4], &mut ops), 11);
        assert_eq!(ops, OpCounter { adds: 1, muls: 2 });
    }
}
