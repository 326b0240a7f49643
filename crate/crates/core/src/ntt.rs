//! Radix-2 Cooley–Tukey transform at the powers of a primitive `d`-th root
//! of unity (decimation in time, bit-reversed input order).

use crate::error::{check_len, Error, Result};
use crate::field::{Field, Fp};
use crate::ops::OpCounter;

#[derive(Clone, Debug)]
pub struct NttCtx {
    pub fp: Fp,
    pub d: usize,
    pub omega: u64,
    roots: Vec<u64>,
    inv_roots: Vec<u64>,
    inv_d: u64,
}

impl NttCtx {
    pub fn new(fp: Fp, d: usize) -> Result<Self> {
        let omega = fp
            .root_of_unity(d as u64)
            .ok_or_else(|| Error::Unavailable(format!("no {d}-th root of unity mod {}", fp.modulus())))?;
        Self::with_root(fp, d, omega)
    }

    /// Context for a given primitive `d`-th root `omega`.
    pub fn with_root(fp: Fp, d: usize, omega: u64) -> Result<Self> {
        if d == 0 || !d.is_power_of_two() {
            return Err(Error::Config(format!("d = {d} is not a power of two")));
        }
        let primitive = fp.pow_u64(&omega, d as u64) == 1
            && (d == 1 || fp.pow_u64(&omega, (d / 2) as u64) == fp.neg(&1));
        if !primitive {
            return Err(Error::Config(format!("{omega} is not a primitive {d}-th root of unity")));
        }
        let half = (d / 2).max(1);
        let powers = |w: u64| {
            let mut v = Vec::with_capacity(half);
            let mut cur = 1u64;
            for _ in 0..half {
                v.push(cur);
                cur = fp.mul(&cur, &w);
            }
            v
        };
        let inv_omega = fp.inv(&omega)?;
        Ok(NttCtx {
            fp,
            d,
            omega,
            roots: powers(omega),
            inv_roots: powers(inv_omega),
            inv_d: fp.inv(&(d as u64 % fp.modulus()))?,
        })
    }

    fn transform(&self, a: &[u64], roots: &[u64], ops: &mut OpCounter) -> Vec<u64> {
        let fp = &self.fp;
        let n = self.d;
        let bits = n.trailing_zeros();
        let mut v: Vec<u64> = if n == 1 {
            a.to_vec()
        } else {
            (0..n)
                .map(|i| a[i.reverse_bits() >> (usize::BITS - bits)])
                .collect()
        };
        let mut len = 2;
        while len <= n {
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..len / 2 {
                    let w = roots[k * stride];
                    let x = v[start + k];
                    let y = fp.mul(&v[start + k + len / 2], &w);
                    v[start + k] = fp.add(&x, &y);
                    v[start + k + len / 2] = fp.sub(&x, &y);
                }
            }
            ops.mul(n / 2);
            ops.add(n);
            len *= 2;
        }
        v
    }

    /// `(P(omega^j))_j` for `P = sum a_l X^l`.
    pub fn forward(&self, a: &[u64], ops: &mut OpCounter) -> Result<Vec<u64>> {
        check_len(self.d, a.len())?;
        Ok(self.transform(a, &self.roots, ops))
    }

    pub fn inverse(&self, vals: &[u64], ops: &mut OpCounter) -> Result<Vec<u64>> {
        check_len(self.d, vals.len())?;
        let v = self.transform(vals, &self.inv_roots, ops);
        ops.mul(self.d);
        Ok(v.iter().map(|x| self.fp.mul(x, &self.inv_d)).collect())
    }

    /// Cyclic convolution modulo `X^d - 1`.
    pub fn cyclic_convolution(&self, a: &[u64], b: &[u64], ops: &mut OpCounter) -> Result<Vec<u64>> {
        let fa = self.forward(a, ops)?;
        let fb = self.forward(b, ops)?;
        ops.mul(self.d);
        let prod: Vec<u64> = fa.iter().zip(&fb).map(|(x, y)| self.fp.mul(x, y)).collect();
        self.inverse(&prod, ops)
    }
}

/// `O(d^2)` discrete Fourier transform.
pub fn naive_dft(fp: &Fp, omega: u64, a: &[u64]) -> Vec<u64> {
    let n = a.len();
    (0..n)
        .map(|j| {
            let w = fp.pow_u64(&omega, j as u64);
            a.iter().rev().fold(0, |acc, c| fp.add(&fp.mul(&acc, &w), c))
        })
        .collect()
}

pub fn naive_cyclic_convolution(fp: &Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len();
    let mut out = vec![0u64; n];
    for i in 0..n {
        for j in 0..n {
            let k = (i + j) % n;
            out[k] = fp.add(&out[k], &fp.mul(&a[i], &b[j]));
        }
    }
    out
}
