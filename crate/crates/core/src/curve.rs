//! Long Weierstrass curves
//! `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`, the group law, the
//! degree-two functions `u_{A,B}`, `Gamma`, `theta`, and the Vélu quotient by
//! a rational point of order two.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ExtField, Field, Fp};

/// A point in affine coordinates, or the origin `O = (0:1:0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Point<E> {
    Infinity,
    Affine(E, E),
}

impl<E: Clone> Point<E> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&E> {
        match self {
            Point::Affine(x, _) => Some(x),
            Point::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&E> {
        match self {
            Point::Affine(_, y) => Some(y),
            Point::Infinity => None,
        }
    }

    pub fn map<G, M: Fn(&E) -> G>(&self, f: M) -> Point<G> {
        match self {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(f(x), f(y)),
        }
    }
}

/// Curve over any field implementing [`Field`].
#[derive(Clone, Debug)]
pub struct Curve<F: Field> {
    pub field: F,
    pub a1: F::Elem,
    pub a2: F::Elem,
    pub a3: F::Elem,
    pub a4: F::Elem,
    pub a6: F::Elem,
}

impl<F: Field> PartialEq for Curve<F> {
    fn eq(&self, o: &Self) -> bool {
        self.coeffs() == o.coeffs()
    }
}

impl<F: Field> Curve<F> {
    pub fn new(field: F, a: [F::Elem; 5]) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = a;
        let c = Curve {
            field,
            a1,
            a2,
            a3,
            a4,
            a6,
        };
        if c.field.is_zero(&c.discriminant()) {
            return Err(Error::SingularCurve);
        }
        Ok(c)
    }

    pub fn coeffs(&self) -> [F::Elem; 5] {
        [
            self.a1.clone(),
            self.a2.clone(),
            self.a3.clone(),
            self.a4.clone(),
            self.a6.clone(),
        ]
    }

    fn k(&self, v: u64) -> F::Elem {
        self.field.from_u64(v)
    }

    pub fn b2(&self) -> F::Elem {
        let f = &self.field;
        f.add(&f.square(&self.a1), &f.mul(&self.k(4), &self.a2))
    }

    pub fn b4(&self) -> F::Elem {
        let f = &self.field;
        f.add(&f.mul(&self.a1, &self.a3), &f.mul(&self.k(2), &self.a4))
    }

    pub fn b6(&self) -> F::Elem {
        let f = &self.field;
        f.add(&f.square(&self.a3), &f.mul(&self.k(4), &self.a6))
    }

    pub fn b8(&self) -> F::Elem {
        let f = &self.field;
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let t1 = f.mul(&f.square(a1), a6);
        let t2 = f.mul(&self.k(4), &f.mul(a2, a6));
        let t3 = f.mul(a1, &f.mul(a3, a4));
        let t4 = f.mul(a2, &f.square(a3));
        let t5 = f.square(a4);
        f.sub(&f.add(&f.sub(&f.add(&t1, &t2), &t3), &t4), &t5)
    }

    pub fn discriminant(&self) -> F::Elem {
        let f = &self.field;
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        let t1 = f.neg(&f.mul(&f.square(&b2), &b8));
        let t2 = f.mul(&self.k(8), &f.mul(&f.square(&b4), &b4));
        let t3 = f.mul(&self.k(27), &f.square(&b6));
        let t4 = f.mul(&self.k(9), &f.mul(&b2, &f.mul(&b4, &b6)));
        f.add(&f.sub(&f.sub(&t1, &t2), &t3), &t4)
    }

    /// `x^3 + a2 x^2 + a4 x + a6`.
    fn rhs(&self, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        let x2 = f.square(x);
        f.add(
            &f.add(&f.mul(&x2, x), &f.mul(&self.a2, &x2)),
            &f.add(&f.mul(&self.a4, x), &self.a6),
        )
    }

    pub fn contains(&self, p: &Point<F::Elem>) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => {
                let f = &self.field;
                let lhs = f.mul(y, &f.add(y, &f.add(&f.mul(&self.a1, x), &self.a3)));
                lhs == self.rhs(x)
            }
        }
    }

    pub fn point(&self, x: F::Elem, y: F::Elem) -> Result<Point<F::Elem>> {
        let p = Point::Affine(x, y);
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(Error::NotOnCurve)
        }
    }

    pub fn neg(&self, p: &Point<F::Elem>) -> Point<F::Elem> {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let f = &self.field;
                let ny = f.sub(&f.neg(y), &f.add(&f.mul(&self.a1, x), &self.a3));
                Point::Affine(x.clone(), ny)
            }
        }
    }

    /// Slope of the secant through `p`, `q`, or of the tangent when `p = q`.
    /// Vertical lines (including those through `O`) are poles.
    pub fn slope(&self, p: &Point<F::Elem>, q: &Point<F::Elem>) -> Result<F::Elem> {
        let f = &self.field;
        match (p, q) {
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => {
                if x1 != x2 {
                    return f.div(&f.sub(y2, y1), &f.sub(x2, x1)).map_err(|_| Error::Pole);
                }
                if y1 != y2 {
                    return Err(Error::Pole);
                }
                let den = f.add(
                    &f.add(&f.mul(&self.k(2), y1), &f.mul(&self.a1, x1)),
                    &self.a3,
                );
                if f.is_zero(&den) {
                    return Err(Error::Pole);
                }
                let num = f.sub(
                    &f.add(
                        &f.add(
                            &f.mul(&self.k(3), &f.square(x1)),
                            &f.mul(&self.k(2), &f.mul(&self.a2, x1)),
                        ),
                        &self.a4,
                    ),
                    &f.mul(&self.a1, y1),
                );
                Ok(f.div(&num, &den)?)
            }
            _ => Err(Error::Pole),
        }
    }

    pub fn add(&self, p: &Point<F::Elem>, q: &Point<F::Elem>) -> Point<F::Elem> {
        let (x1, y1, x2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(x1, y1), Point::Affine(x2, _)) => (x1, y1, x2),
        };
        let lam = match self.slope(p, q) {
            Ok(l) => l,
            Err(_) => return Point::Infinity,
        };
        let f = &self.field;
        let x3 = f.sub(
            &f.sub(
                &f.sub(&f.add(&f.square(&lam), &f.mul(&self.a1, &lam)), &self.a2),
                x1,
            ),
            x2,
        );
        let nu = f.sub(y1, &f.mul(&lam, x1));
        let y3 = f.sub(
            &f.sub(&f.neg(&f.mul(&f.add(&lam, &self.a1), &x3)), &nu),
            &self.a3,
        );
        Point::Affine(x3, y3)
    }

    pub fn sub(&self, p: &Point<F::Elem>, q: &Point<F::Elem>) -> Point<F::Elem> {
        self.add(p, &self.neg(q))
    }

    pub fn double(&self, p: &Point<F::Elem>) -> Point<F::Elem> {
        self.add(p, p)
    }

    /// `n * p` by double-and-add.
    pub fn mul(&self, p: &Point<F::Elem>, n: u64) -> Point<F::Elem> {
        let mut acc = Point::Infinity;
        for i in (0..64 - n.leading_zeros()).rev() {
            acc = self.double(&acc);
            if (n >> i) & 1 == 1 {
                acc = self.add(&acc, p);
            }
        }
        acc
    }

    pub fn mul_signed(&self, p: &Point<F::Elem>, n: i64) -> Point<F::Elem> {
        let q = self.mul(p, n.unsigned_abs());
        if n < 0 {
            self.neg(&q)
        } else {
            q
        }
    }

    /// `(0, p, 2p, ..., (n-1)p)`.
    pub fn multiples(&self, p: &Point<F::Elem>, n: usize) -> Vec<Point<F::Elem>> {
        let mut out = Vec::with_capacity(n);
        let mut acc = Point::Infinity;
        for _ in 0..n {
            out.push(acc.clone());
            acc = self.add(&acc, p);
        }
        out
    }

    /// Smallest `2^k` with `2^k p = O`, searching `k <= max_k`.
    pub fn two_power_order(&self, p: &Point<F::Elem>, max_k: u32) -> Option<u32> {
        let mut q = p.clone();
        for k in 0..=max_k {
            if q.is_infinity() {
                return Some(k);
            }
            q = self.double(&q);
        }
        None
    }

    /// `u_{A,B}(P)`: slope through `P - A` and `A - B`.
    pub fn u_func(
        &self,
        a: &Point<F::Elem>,
        b: &Point<F::Elem>,
        p: &Point<F::Elem>,
    ) -> Result<F::Elem> {
        if a == b {
            return Err(Error::Degenerate("u_{A,B} needs A != B".into()));
        }
        self.slope(&self.sub(p, a), &self.sub(a, b))
    }

    /// `Gamma(A,B,C)`: slope through `C - A` and `A - B`.
    pub fn gamma(
        &self,
        a: &Point<F::Elem>,
        b: &Point<F::Elem>,
        c: &Point<F::Elem>,
    ) -> Result<F::Elem> {
        if a == b && b == c {
            return Err(Error::Degenerate("Gamma needs two distinct points".into()));
        }
        self.slope(&self.sub(c, a), &self.sub(a, b))
    }

    /// `theta(P) = u_{O,T}(P) + a1/2` for `T` of order two.
    pub fn theta(&self, t2: &Point<F::Elem>, p: &Point<F::Elem>) -> Result<F::Elem> {
        let f = &self.field;
        let s = self.slope(p, &self.neg(t2))?;
        Ok(f.add(&s, &f.mul(&self.a1, &f.half())))
    }

    /// Points with the given x-coordinate that are defined over the field.
    pub fn points_with_x(&self, x: &F::Elem) -> Vec<Point<F::Elem>> {
        let f = &self.field;
        // y^2 + (a1 x + a3) y - rhs = 0
        let bq = f.add(&f.mul(&self.a1, x), &self.a3);
        let disc = f.add(&f.square(&bq), &f.mul(&self.k(4), &self.rhs(x)));
        match f.sqrt(&disc) {
            None => Vec::new(),
            Some(s) => {
                let half = f.half();
                let y1 = f.mul(&half, &f.sub(&s, &bq));
                let y2 = f.mul(&half, &f.sub(&f.neg(&s), &bq));
                if y1 == y2 {
                    vec![Point::Affine(x.clone(), y1)]
                } else {
                    vec![Point::Affine(x.clone(), y1), Point::Affine(x.clone(), y2)]
                }
            }
        }
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point<F::Elem> {
        loop {
            let x = self.field.random(rng);
            let pts = self.points_with_x(&x);
            if !pts.is_empty() {
                let i = rng.gen_range(0..pts.len());
                return pts[i].clone();
            }
        }
    }

    /// Coefficients `(c2, c1, c0)` of the quadratic factor of the 2-division
    /// polynomial `4x^3 + b2 x^2 + 2 b4 x + b6` after removing the root `x0`.
    pub fn two_division_cofactor(&self, x0: &F::Elem) -> [F::Elem; 3] {
        let f = &self.field;
        let c2 = self.k(4);
        let c1 = f.add(&self.b2(), &f.mul(&c2, x0));
        let c0 = f.add(&f.mul(&self.k(2), &self.b4()), &f.mul(x0, &c1));
        [c2, c1, c0]
    }

    /// Image under `x = X + r`, `y = Y + sX + w`: the curve in `(X, Y)`.
    pub fn change_coords(&self, r: &F::Elem, s: &F::Elem, w: &F::Elem) -> Result<Curve<F>> {
        let f = &self.field;
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let two = self.k(2);
        let three = self.k(3);
        let na1 = f.add(a1, &f.mul(&two, s));
        let na2 = f.sub(
            &f.add(&f.sub(a2, &f.mul(s, a1)), &f.mul(&three, r)),
            &f.square(s),
        );
        let na3 = f.add(&f.add(a3, &f.mul(r, a1)), &f.mul(&two, w));
        let na4 = f.add(
            &f.sub(
                &f.sub(a4, &f.mul(s, a3)),
                &f.mul(&two, &f.mul(s, w)),
            ),
            &f.sub(
                &f.add(&f.mul(&two, &f.mul(r, a2)), &f.mul(&three, &f.square(r))),
                &f.mul(&f.add(&f.mul(w, &self.k(1)), &f.mul(r, s)), a1),
            ),
        );
        let na6 = f.sub(
            &f.sub(
                &f.add(
                    &f.add(a6, &f.mul(r, a4)),
                    &f.add(&f.mul(&f.square(r), a2), &f.mul(&f.square(r), r)),
                ),
                &f.mul(w, a3),
            ),
            &f.add(&f.square(w), &f.mul(w, &f.mul(r, a1))),
        );
        Curve::new(f.clone(), [na1, na2, na3, na4, na6])
    }

    /// Point map matching [`Curve::change_coords`].
    pub fn change_point(
        &self,
        p: &Point<F::Elem>,
        r: &F::Elem,
        s: &F::Elem,
        w: &F::Elem,
    ) -> Point<F::Elem> {
        let f = &self.field;
        p.clone().as_affine().map_or(Point::Infinity, |(x, y)| {
            let nx = f.sub(&x, r);
            let ny = f.sub(&f.sub(&y, &f.mul(s, &nx)), w);
            Point::Affine(nx, ny)
        })
    }
}

impl<E> Point<E> {
    fn as_affine(self) -> Option<(E, E)> {
        match self {
            Point::Affine(x, y) => Some((x, y)),
            Point::Infinity => None,
        }
    }
}

impl Curve<Fp> {
    pub fn from_u64(fp: Fp, a: [u64; 5]) -> Result<Self> {
        Curve::new(fp, a.map(|v| v % fp.modulus()))
    }

    /// The same curve over an extension of its base field.
    pub fn lift(&self, ext: &ExtField) -> Curve<ExtField> {
        Curve {
            field: ext.clone(),
            a1: ext.embed(self.a1),
            a2: ext.embed(self.a2),
            a3: ext.embed(self.a3),
            a4: ext.embed(self.a4),
            a6: ext.embed(self.a6),
        }
    }

    /// Number of rational points by direct Legendre-symbol summation.
    pub fn count_points_naive(&self) -> u64 {
        let f = &self.field;
        let mut n = 1u64;
        for x in 0..f.modulus() {
            let bq = f.add(&f.mul(&self.a1, &x), &self.a3);
            let disc = f.add(&f.square(&bq), &f.mul(&4, &self.rhs(&x)));
            n += if disc == 0 {
                1
            } else if f.is_square(&disc) {
                2
            } else {
                0
            };
        }
        n
    }
}

pub fn lift_point(ext: &ExtField, p: &Point<u64>) -> Point<Vec<u64>> {
    p.map(|v| ext.embed(*v))
}

/// Base-field point, if every coordinate descends.
pub fn descend_point(ext: &ExtField, p: &Point<Vec<u64>>) -> Option<Point<u64>> {
    match p {
        Point::Infinity => Some(Point::Infinity),
        Point::Affine(x, y) => Some(Point::Affine(ext.descend(x)?, ext.descend(y)?)),
    }
}

/// Degree-two separable isogeny with kernel `{O, T}`.
#[derive(Clone, Debug)]
pub struct Isogeny2<F: Field> {
    pub domain: Curve<F>,
    pub codomain: Curve<F>,
    pub kernel: Point<F::Elem>,
    pub w4: F::Elem,
    pub w6: F::Elem,
}

impl<F: Field> Isogeny2<F> {
    pub fn new(e: &Curve<F>, t2: &Point<F::Elem>) -> Result<Self> {
        let (x0, y0) = match t2 {
            Point::Affine(x, y) if e.double(t2).is_infinity() && e.contains(t2) => {
                (x.clone(), y.clone())
            }
            _ => return Err(Error::WrongOrder("kernel point must have order 2".into())),
        };
        let f = &e.field;
        let k = |v| f.from_u64(v);
        let (b2, b4, b6) = (e.b2(), e.b4(), e.b6());
        let x2 = f.square(&x0);
        let w4 = f.sub(
            &f.add(
                &f.add(&f.mul(&k(3), &x2), &f.mul(&k(2), &f.mul(&e.a2, &x0))),
                &e.a4,
            ),
            &f.mul(&e.a1, &y0),
        );
        let w6 = f.add(
            &f.add(
                &f.mul(&k(7), &f.mul(&x2, &x0)),
                &f.mul(&f.add(&f.mul(&k(2), &e.a2), &b2), &x2),
            ),
            &f.add(
                &f.mul(
                    &f.add(&e.a4, &f.sub(&f.mul(&k(2), &b4), &f.mul(&y0, &e.a1))),
                    &x0,
                ),
                &b6,
            ),
        );
        let a4n = f.sub(&e.a4, &f.mul(&k(5), &w4));
        let a6n = f.sub(&f.sub(&e.a6, &f.mul(&b2, &w4)), &f.mul(&k(7), &w6));
        let codomain = Curve::new(
            f.clone(),
            [e.a1.clone(), e.a2.clone(), e.a3.clone(), a4n, a6n],
        )?;
        Ok(Isogeny2 {
            domain: e.clone(),
            codomain,
            kernel: t2.clone(),
            w4,
            w6,
        })
    }

    /// `P -> (x + x(P+T) - x(T), y + y(P+T) - y(T))`.
    pub fn map(&self, p: &Point<F::Elem>) -> Point<F::Elem> {
        let e = &self.domain;
        let f = &e.field;
        let (x, y) = match p {
            Point::Infinity => return Point::Infinity,
            Point::Affine(x, y) => (x, y),
        };
        let pt = e.add(p, &self.kernel);
        let (xt, yt) = match (&pt, &self.kernel) {
            (Point::Affine(a, b), Point::Affine(x0, y0)) => (f.sub(a, x0), f.sub(b, y0)),
            _ => return Point::Infinity,
        };
        Point::Affine(f.add(x, &xt), f.add(y, &yt))
    }

    /// All preimages of `q` defined over the field (zero or two points).
    pub fn preimages(&self, q: &Point<F::Elem>) -> Vec<Point<F::Elem>> {
        let e = &self.domain;
        let f = &e.field;
        let (qx, _) = match q {
            Point::Infinity => return vec![Point::Infinity, self.kernel.clone()],
            Point::Affine(x, y) => (x, y),
        };
        let x0 = self.kernel.x().unwrap();
        // x' = x + w4/(x - x0)  <=>  x^2 - (x0 + x') x + x0 x' + w4 = 0
        let bq = f.neg(&f.add(x0, qx));
        let cq = f.add(&f.mul(x0, qx), &self.w4);
        let disc = f.sub(&f.square(&bq), &f.mul(&f.from_u64(4), &cq));
        let Some(s) = f.sqrt(&disc) else {
            return Vec::new();
        };
        let half = f.half();
        let mut out = Vec::new();
        for root in [f.mul(&half, &f.sub(&s, &bq)), f.mul(&half, &f.sub(&f.neg(&s), &bq))] {
            for p in e.points_with_x(&root) {
                if self.map(&p) == *q && !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }
}

/// Curve over `F_p` with a point of exact order `2^delta` and an auxiliary
/// point `r` with `2^delta r != O`.
#[derive(Clone, Debug)]
pub struct TorsionCurve {
    pub curve: Curve<Fp>,
    pub t: Point<u64>,
    pub r: Point<u64>,
    pub delta: u32,
    /// Group order when it could be pinned down uniquely.
    pub order: Option<u64>,
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Hasse interval `[p + 1 - 2 sqrt p, p + 1 + 2 sqrt p]`.
pub fn hasse_interval(p: u64) -> (u64, u64) {
    let w = isqrt(4 * p) + 1;
    ((p + 1).saturating_sub(w), p + 1 + w)
}

/// Multiples of `m` in the Hasse interval annihilating `pt`.
fn annihilating_multiples(e: &Curve<Fp>, pt: &Point<u64>, m: u64, among: &[u64]) -> Vec<u64> {
    if among.is_empty() {
        return Vec::new();
    }
    let step = e.mul(pt, m);
    let mut cur = e.mul(pt, among[0]);
    let mut last = among[0];
    let mut out = Vec::new();
    for &n in among {
        while last < n {
            cur = e.add(&cur, &step);
            last += m;
        }
        if cur.is_infinity() {
            out.push(n);
        }
    }
    out
}

/// Random curve with a point of order `d = 2^delta`, deterministic in `seed`.
///
/// Candidates are `y^2 = x^3 + a2 x^2 + a4 x` (forced 2-torsion). Only group
/// orders in the Hasse interval divisible by `d` are probed, then the curve is
/// moved to a general long Weierstrass model.
pub fn find_torsion_curve(fp: Fp, delta: u32, seed: u64) -> Result<TorsionCurve> {
    if delta == 0 || delta > 62 {
        return Err(Error::Config("delta must be in 1..=62".into()));
    }
    let p = fp.modulus();
    let d = 1u64 << delta;
    let (lo, hi) = hasse_interval(p);
    let first = lo.div_ceil(d) * d;
    if first > hi || first == 0 {
        return Err(Error::SearchExhausted(format!(
            "no multiple of {d} in the Hasse interval [{lo}, {hi}] for p = {p}"
        )));
    }
    let candidates: Vec<u64> = (0..).map(|k| first + k * d).take_while(|&n| n <= hi).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7045_7253_696f_6e00);
    let max_curves = 400 * d.max(64) + 20_000;
    for _ in 0..max_curves {
        let a2 = fp.random(&mut rng);
        let a4 = fp.random(&mut rng);
        let Ok(e) = Curve::new(fp, [0, a2, 0, a4, 0]) else {
            continue;
        };
        let p0 = e.random_point(&mut rng);
        let cands = annihilating_multiples(&e, &p0, d, &candidates);
        let Some(&n) = cands.first() else { continue };
        // 2-part of the order of a few random points
        let mut t = None;
        for attempt in 0..8 {
            let pt = if attempt == 0 {
                p0.clone()
            } else {
                e.random_point(&mut rng)
            };
            let v = n.trailing_zeros();
            let q = e.mul(&pt, n >> v);
            if let Some(k) = e.two_power_order(&q, v) {
                if k >= delta {
                    let mut tt = q;
                    for _ in 0..(k - delta) {
                        tt = e.double(&tt);
                    }
                    t = Some(tt);
                    break;
                }
            }
        }
        let Some(t) = t else { continue };
        // pin down the order among the surviving candidates
        let mut survivors = cands;
        for _ in 0..16 {
            if survivors.len() <= 1 {
                break;
            }
            let pt = e.random_point(&mut rng);
            survivors = annihilating_multiples(&e, &pt, d, &survivors);
        }
        let order = (survivors.len() == 1).then(|| survivors[0]);
        // random long-form model with a1, a3 != 0
        let (r, s, w) = loop {
            let r = fp.random(&mut rng);
            let s = fp.random(&mut rng);
            let w = fp.random(&mut rng);
            if s != 0 && w != 0 {
                break (r, s, w);
            }
        };
        let ec = e.change_coords(&r, &s, &w)?;
        let tc = e.change_point(&t, &r, &s, &w);
        debug_assert!(ec.contains(&tc));
        let mut rp = None;
        for _ in 0..64 {
            let cand = ec.random_point(&mut rng);
            if !ec.mul(&cand, d).is_infinity() {
                rp = Some(cand);
                break;
            }
        }
        let Some(rp) = rp else { continue };
        return Ok(TorsionCurve {
            curve: ec,
            t: tc,
            r: rp,
            delta,
            order,
        });
    }
    Err(Error::SearchExhausted(format!(
        "no curve with a point of order {d} found over F_{p} after {max_curves} tries"
    )))
}

/// Random rational point `q` with `m q != O`.
pub fn find_point_not_killed_by(e: &Curve<Fp>, m: u64, seed: u64) -> Result<Point<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9_0157);
    for _ in 0..256 {
        let q = e.random_point(&mut rng);
        if !e.mul(&q, m).is_infinity() {
            return Ok(q);
        }
    }
    Err(Error::SearchExhausted(format!("no point with {m}Q != O")))
}
