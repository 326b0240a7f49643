//! The bases `u` and `v` of `L(<t>)`, the translated abscissae `x_l`, the
//! linear base changes between `u` and `v`, and dense reference routines for
//! evaluation, interpolation and reduction.
//!
//! `u_l = u_{lt,(l+1)t} + (1 - a)/d`, `v_0 = 1`, `v_l = u_{O,lt}`,
//! `x_l = x o tau_{-lt}`.

use serde::{Deserialize, Serialize};

use crate::curve::{Curve, Point};
use crate::error::{check_len, Error, Result};
use crate::field::{Field, Fp};
use crate::linalg;
use crate::ops::OpCounter;

/// Meaning of a coefficient or value vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisTag {
    U,
    V,
    X,
    Eval,
}

/// Basis data for `L(<t>)` with `t` of order `d` (`d = 1` is the constants).
#[derive(Clone, Debug)]
pub struct BasisCtx<F: Field> {
    pub curve: Curve<F>,
    pub t: Point<F::Elem>,
    pub d: usize,
    /// `l t` for `0 <= l < d`.
    pub mults: Vec<Point<F::Elem>>,
    /// The constant `sum_l u_{lt,(l+1)t}`.
    pub a: F::Elem,
    /// `a_l` with `v_l = sum_{m<l} u_m + a_l`.
    pub a_vec: Vec<F::Elem>,
    shift: F::Elem,
}

impl<F: Field> BasisCtx<F> {
    pub fn new(curve: &Curve<F>, t: &Point<F::Elem>, d: usize) -> Result<Self> {
        let f = curve.field.clone();
        if d == 0 || !d.is_power_of_two() {
            return Err(Error::Config(format!("d = {d} is not a power of two")));
        }
        if !curve.mul(t, d as u64).is_infinity()
            || (d > 1 && curve.mul(t, (d / 2) as u64).is_infinity())
        {
            return Err(Error::WrongOrder(format!("t does not have order {d}")));
        }
        let mults = curve.multiples(t, d);
        if d == 1 {
            return Ok(BasisCtx {
                curve: curve.clone(),
                t: t.clone(),
                d,
                mults,
                a: f.one(),
                a_vec: vec![f.one()],
                shift: f.zero(),
            });
        }
        // Gamma(O, (k-1)t, kt) = slope(kt, -(k-1)t)
        let gam = |k: usize| curve.slope(&mults[k], &curve.neg(&mults[k - 1]));
        let mut a = f.neg(&curve.a1);
        for k in 2..d {
            a = f.add(&a, &gam(k)?);
        }
        let dinv = f.inv(&f.from_u64(d as u64))?;
        let am1 = f.mul(&f.sub(&a, &f.one()), &dinv);
        let mut a_vec = Vec::with_capacity(d);
        a_vec.push(f.one());
        let mut gsum = f.zero();
        let mut lterm = f.zero();
        for l in 1..d {
            lterm = f.add(&lterm, &am1);
            if l >= 2 {
                gsum = f.add(&gsum, &gam(l)?);
            }
            a_vec.push(f.sub(&lterm, &gsum));
        }
        let shift = f.mul(&f.sub(&f.one(), &a), &dinv);
        Ok(BasisCtx {
            curve: curve.clone(),
            t: t.clone(),
            d,
            mults,
            a,
            a_vec,
            shift,
        })
    }

    fn field(&self) -> &F {
        &self.curve.field
    }

    /// Values of all `d` functions of the chosen basis at `p`.
    pub fn row(&self, tag: BasisTag, p: &Point<F::Elem>) -> Result<Vec<F::Elem>> {
        let e = &self.curve;
        let f = self.field();
        if self.d == 1 && tag != BasisTag::X {
            return Ok(vec![f.one()]);
        }
        match tag {
            BasisTag::U => {
                let mt = e.neg(&self.t);
                self.mults
                    .iter()
                    .map(|lt| Ok(f.add(&e.slope(&e.sub(p, lt), &mt)?, &self.shift)))
                    .collect()
            }
            BasisTag::V => {
                let mut out = vec![f.one()];
                for lt in &self.mults[1..] {
                    out.push(e.slope(p, &e.neg(lt))?);
                }
                Ok(out)
            }
            BasisTag::X => self
                .mults
                .iter()
                .map(|lt| match e.sub(p, lt) {
                    Point::Affine(x, _) => Ok(x),
                    Point::Infinity => Err(Error::Pole),
                })
                .collect(),
            BasisTag::Eval => Err(Error::Mismatch("Eval is not a basis".into())),
        }
    }

    /// Dense evaluation at each point.
    pub fn evaluate(
        &self,
        tag: BasisTag,
        coeffs: &[F::Elem],
        points: &[Point<F::Elem>],
    ) -> Result<Vec<F::Elem>> {
        check_len(self.d, coeffs.len())?;
        let f = self.field();
        points
            .iter()
            .map(|p| {
                let r = self.row(tag, p)?;
                Ok(r.iter()
                    .zip(coeffs)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b))))
            })
            .collect()
    }

    /// `u`-coordinates of the unique `f` in `L(<t>)` taking `values` at `points`.
    pub fn interpolate(&self, values: &[F::Elem], points: &[Point<F::Elem>]) -> Result<Vec<F::Elem>> {
        check_len(self.d, values.len())?;
        check_len(self.d, points.len())?;
        let m: Vec<Vec<F::Elem>> = points
            .iter()
            .map(|p| self.row(BasisTag::U, p))
            .collect::<Result<_>>()?;
        linalg::solve(self.field(), &m, values)
    }

    /// `u`-coordinates of the element of `L(<t>)` agreeing on `points` with
    /// `sum F_l x_l`.
    pub fn reduce(&self, xcoeffs: &[F::Elem], points: &[Point<F::Elem>]) -> Result<Vec<F::Elem>> {
        let vals = self.evaluate(BasisTag::X, xcoeffs, points)?;
        self.interpolate(&vals, points)
    }

    /// `(b + l t)_l`.
    pub fn coset(&self, b: &Point<F::Elem>) -> Vec<Point<F::Elem>> {
        self.mults.iter().map(|lt| self.curve.add(b, lt)).collect()
    }

    pub fn u_to_v(&self, c: &[F::Elem]) -> Vec<F::Elem> {
        u_to_v(self.field(), &self.a_vec, c)
    }

    pub fn v_to_u(&self, c: &[F::Elem]) -> Vec<F::Elem> {
        v_to_u(self.field(), &self.a_vec, c)
    }
}

/// `v`-coordinates from `u`-coordinates: `c_l = f_{l-1} - f_l` for `l >= 1`,
/// `c_0 = f_{d-1} - sum_{l>=1} c_l a_l`.
pub fn u_to_v<F: Field>(f: &F, a_vec: &[F::Elem], u: &[F::Elem]) -> Vec<F::Elem> {
    let d = u.len();
    let mut c = vec![f.zero(); d];
    let mut s = u[d - 1].clone();
    for l in 1..d {
        c[l] = f.sub(&u[l - 1], &u[l]);
        s = f.sub(&s, &f.mul(&c[l], &a_vec[l]));
    }
    c[0] = s;
    c
}

/// `u`-coordinates from `v`-coordinates: `f_m = <c, a> + sum_{l>m} c_l`.
pub fn v_to_u<F: Field>(f: &F, a_vec: &[F::Elem], v: &[F::Elem]) -> Vec<F::Elem> {
    let d = v.len();
    let s = v
        .iter()
        .zip(a_vec)
        .fold(f.zero(), |acc, (c, a)| f.add(&acc, &f.mul(c, a)));
    let mut out = vec![f.zero(); d];
    let mut tail = f.zero();
    for m in (0..d).rev() {
        out[m] = f.add(&s, &tail);
        tail = f.add(&tail, &v[m]);
    }
    out
}

pub fn u_to_v_counted(fp: &Fp, a_vec: &[u64], u: &[u64], ops: &mut OpCounter) -> Vec<u64> {
    let d = u.len();
    ops.add(2 * (d - 1));
    ops.mul(d - 1);
    u_to_v(fp, a_vec, u)
}

pub fn v_to_u_counted(fp: &Fp, a_vec: &[u64], v: &[u64], ops: &mut OpCounter) -> Vec<u64> {
    let d = v.len();
    ops.add(2 * d - 1 + d.saturating_sub(1));
    ops.mul(d);
    v_to_u(fp, a_vec, v)
}
