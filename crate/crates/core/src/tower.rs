//! Precomputation for the butterflies: the chain of Vélu 2-quotients
//! `E = E_delta -> ... -> E_0` and the constant vectors of every level.
//!
//! Levels are stored bottom-first: `levels[i]` works at size `d = 2^(i+1)`
//! and `levels[..i]` is the tower of its quotient.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::basis::{u_to_v, BasisCtx, BasisTag};
use crate::butterfly;
use crate::curve::{lift_point, Curve, Isogeny2, Point};
use crate::error::{Error, Result};
use crate::field::{ExtField, Field, Fp};
use crate::ops::OpCounter;

/// The point `b` defining the coset `B = b + <t>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BPoint {
    Rational(Point<u64>),
    /// Point over `F_p[X]/(modulus)`.
    Extension {
        modulus: Vec<u64>,
        point: Point<Vec<u64>>,
    },
}

impl BPoint {
    pub fn is_rational(&self) -> bool {
        matches!(self, BPoint::Rational(_))
    }

    pub fn rational(&self) -> Option<&Point<u64>> {
        match self {
            BPoint::Rational(p) => Some(p),
            BPoint::Extension { .. } => None,
        }
    }

    fn ext(fp: Fp, modulus: &[u64]) -> ExtField {
        ExtField::from_checked(fp, modulus.to_vec())
    }

    /// Rational form when every coordinate descends.
    fn normalized(self, fp: Fp) -> BPoint {
        match &self {
            BPoint::Extension { modulus, point } => {
                let ext = Self::ext(fp, modulus);
                match crate::curve::descend_point(&ext, point) {
                    Some(p) => BPoint::Rational(p),
                    None => self,
                }
            }
            BPoint::Rational(_) => self,
        }
    }

    fn map(&self, iso: &Isogeny2<Fp>) -> Result<BPoint> {
        let fp = iso.domain.field;
        Ok(match self {
            BPoint::Rational(p) => BPoint::Rational(iso.map(p)),
            BPoint::Extension { modulus, point } => {
                let ext = Self::ext(fp, modulus);
                let lifted = Isogeny2::new(&iso.domain.lift(&ext), &lift_point(&ext, &iso.kernel))?;
                BPoint::Extension {
                    modulus: modulus.clone(),
                    point: lifted.map(point),
                }
                .normalized(fp)
            }
        })
    }

    fn is_killed_by(&self, e: &Curve<Fp>, n: u64) -> bool {
        match self {
            BPoint::Rational(p) => e.mul(p, n).is_infinity(),
            BPoint::Extension { modulus, point } => {
                let ext = Self::ext(e.field, modulus);
                e.lift(&ext).mul(point, n).is_infinity()
            }
        }
    }

    fn check_on(&self, e: &Curve<Fp>) -> Result<()> {
        let ok = match self {
            BPoint::Rational(p) => e.contains(p),
            BPoint::Extension { modulus, point } => {
                e.lift(&Self::ext(e.field, modulus)).contains(point)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NotOnCurve)
        }
    }

    /// Checks that Frobenius maps `b` into `b + <t>`.
    fn check_galois_stable(&self, e: &Curve<Fp>, t: &Point<u64>, d: usize) -> Result<()> {
        let BPoint::Extension { modulus, point } = self else {
            return Ok(());
        };
        let ext = Self::ext(e.field, modulus);
        let el = e.lift(&ext);
        let frob = point.map(|c| ext.frobenius(c));
        let tl = lift_point(&ext, t);
        let mut q = point.clone();
        for _ in 0..d {
            if q == frob {
                return Ok(());
            }
            q = el.add(&q, &tl);
        }
        Err(Error::NoDescent("coset b + <t> is not Galois-stable".into()))
    }
}

/// Constant vectors of one level, named after the fraktur letters they
/// stand for. Vectors have length `d' = d/2` unless noted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelConsts {
    pub d: usize,
    /// `b_0 = 1`, `b_l = -theta(lt)`.
    pub b: Vec<u64>,
    /// `c_0 = 1`, `c_l = theta(lt)`.
    pub c: Vec<u64>,
    /// `a`-vector of the quotient basis.
    pub a_q: Vec<u64>,
    /// `a`-vector of this level (length `d`).
    pub a: Vec<u64>,
    /// `v'_l(U')`.
    pub v_q: Vec<u64>,
    pub m_q: Vec<u64>,
    pub n_q: Vec<u64>,
    /// Coefficients of `xi_b`; index 0 holds the `x'` coefficient.
    pub xi: Vec<u64>,
    pub e: Vec<u64>,
    pub f: Vec<u64>,
    /// `1/theta(lt)`, with `i_0 = 0` unused.
    pub i: Vec<u64>,
    /// `y' mod B'` in the basis `v'`.
    pub h: Vec<u64>,
    /// `(1 - xi_b) / theta` in the basis `v` (length `d`).
    pub l: Vec<u64>,
    pub l_star: u64,
    pub p: Vec<u64>,
    pub p_star: u64,
    pub x_t: u64,
    /// `x'(b' + lt') - x'(U')`, rational `b` only.
    pub x_q: Option<Vec<u64>>,
    /// `theta(b + lt)`, rational `b` only.
    pub theta_b: Option<Vec<u64>>,
    pub theta_b_inv: Option<Vec<u64>>,
    /// Precomputed cyclic bidiagonal solver for `(b, c)`.
    pub solver: butterfly::BidiagSolver,
}

/// Geometry of one level.
#[derive(Clone, Debug)]
pub struct LevelGeom {
    pub d: usize,
    pub curve: Curve<Fp>,
    pub t: Point<u64>,
    /// `T = (d/2) t`.
    pub t2: Point<u64>,
    pub iso: Isogeny2<Fp>,
    pub t_q: Point<u64>,
    pub u_q: Point<u64>,
    pub b: BPoint,
    pub b_q: BPoint,
    pub basis: BasisCtx<Fp>,
    pub basis_q: BasisCtx<Fp>,
}

#[derive(Clone, Debug)]
pub struct LevelCtx {
    pub geom: LevelGeom,
    pub c: LevelConsts,
}

/// Borrowed prefix of a tower.
#[derive(Clone, Copy, Debug)]
pub struct TowerRef<'a> {
    pub fp: Fp,
    pub levels: &'a [LevelCtx],
    /// `x(b_0)` on the last quotient.
    pub bottom_x: u64,
}

impl<'a> TowerRef<'a> {
    pub fn d(&self) -> usize {
        1 << self.levels.len()
    }

    /// Tower of the quotient of the top level.
    pub fn sub(&self) -> TowerRef<'a> {
        TowerRef {
            levels: &self.levels[..self.levels.len() - 1],
            ..*self
        }
    }

    pub fn top(&self) -> Option<&'a LevelCtx> {
        self.levels.last()
    }
}

#[derive(Clone, Debug)]
pub struct Tower {
    pub fp: Fp,
    pub levels: Vec<LevelCtx>,
    pub bottom_x: u64,
}

/// `U' = phi(U)` for a 2-torsion point `U` outside `<T>`, searched over
/// `F_p` and, failing that, over `F_{p^2}`; cross-checked against
/// `x'(U') = -b2/4 - 2 x(T)`.
pub fn find_u_prime(e: &Curve<Fp>, t2: &Point<u64>, iso: &Isogeny2<Fp>) -> Result<Point<u64>> {
    let fp = e.field;
    let x0 = *t2.x().ok_or_else(|| Error::WrongOrder("T = O".into()))?;
    let [c2, c1, c0] = e.two_division_cofactor(&x0);
    let disc = fp.sub(&fp.square(&c1), &fp.mul(&fp.mul(&4, &c2), &c0));
    let half = fp.half();
    let u_q = if let Some(s) = fp.sqrt(&disc) {
        let inv2a = fp.inv(&fp.mul(&2, &c2))?;
        let r1 = fp.mul(&fp.sub(&s, &c1), &inv2a);
        let r2 = fp.mul(&fp.sub(&fp.neg(&s), &c1), &inv2a);
        let x = r1.min(r2);
        let y = fp.neg(&fp.mul(&half, &fp.add(&fp.mul(&e.a1, &x), &e.a3)));
        iso.map(&Point::Affine(x, y))
    } else {
        let ext = ExtField::of_degree(fp, 2);
        let s = ext
            .sqrt(&ext.embed(disc))
            .ok_or_else(|| Error::Degenerate("2-division quadratic has no roots".into()))?;
        let inv2a = ext.inv(&ext.embed(fp.mul(&2, &c2)))?;
        let nc1 = ext.embed(c1);
        let r1 = ext.mul(&ext.sub(&s, &nc1), &inv2a);
        let r2 = ext.mul(&ext.sub(&ext.neg(&s), &nc1), &inv2a);
        let x = r1.min(r2);
        let el = e.lift(&ext);
        let y = ext.neg(&ext.mul(
            &ext.embed(half),
            &ext.add(&ext.mul(&el.a1, &x), &el.a3),
        ));
        let iso_l = Isogeny2::new(&el, &lift_point(&ext, t2))?;
        let img = iso_l.map(&Point::Affine(x, y));
        crate::curve::descend_point(&ext, &img)
            .ok_or_else(|| Error::NoDescent("U' is not rational".into()))?
    };
    let eq = &iso.codomain;
    let xc = fp.sub(
        &fp.neg(&fp.mul(&e.b2(), &fp.inv(&4)?)),
        &fp.mul(&2, &x0),
    );
    let ok = match &u_q {
        Point::Affine(x, _) => *x == xc && eq.contains(&u_q) && eq.double(&u_q).is_infinity(),
        Point::Infinity => false,
    };
    if !ok {
        return Err(Error::Degenerate("U' inconsistent with the closed form".into()));
    }
    Ok(u_q)
}

fn geometry(curve: &Curve<Fp>, t: &Point<u64>, b: BPoint) -> Result<Vec<LevelGeom>> {
    let fp = curve.field;
    let delta = curve
        .two_power_order(t, 62)
        .ok_or_else(|| Error::WrongOrder("t must have 2-power order".into()))?;
    if delta == 0 {
        return Err(Error::WrongOrder("t must have order at least 2".into()));
    }
    let d = 1usize << delta;
    b.check_on(curve)?;
    if b.is_killed_by(curve, d as u64) {
        return Err(Error::Degenerate("d b = O".into()));
    }
    b.check_galois_stable(curve, t, d)?;
    let mut out = Vec::with_capacity(delta as usize);
    let (mut e, mut t, mut b) = (curve.clone(), t.clone(), b.normalized(fp));
    let mut dd = d;
    while dd >= 2 {
        let t2 = e.mul(&t, (dd / 2) as u64);
        let iso = Isogeny2::new(&e, &t2)?;
        let u_q = find_u_prime(&e, &t2, &iso)?;
        let t_q = iso.map(&t);
        let b_q = b.map(&iso)?;
        let basis = BasisCtx::new(&e, &t, dd)?;
        let basis_q = BasisCtx::new(&iso.codomain, &t_q, dd / 2)?;
        let next = (iso.codomain.clone(), t_q.clone(), b_q.clone());
        out.push(LevelGeom {
            d: dd,
            curve: e,
            t,
            t2,
            iso,
            t_q,
            u_q,
            b,
            b_q,
            basis,
            basis_q,
        });
        (e, t, b) = next;
        dd /= 2;
    }
    out.reverse();
    Ok(out)
}

fn bottom_x(levels: &[LevelGeom]) -> Result<u64> {
    match &levels[0].b_q {
        BPoint::Rational(Point::Affine(x, _)) => Ok(*x),
        BPoint::Rational(Point::Infinity) => Err(Error::Degenerate("d b = O".into())),
        BPoint::Extension { .. } => Err(Error::NoDescent(
            "image of b on the last quotient is not rational".into(),
        )),
    }
}

fn xy(p: &Point<u64>) -> Result<(u64, u64)> {
    match p {
        Point::Affine(x, y) => Ok((*x, *y)),
        Point::Infinity => Err(Error::Pole),
    }
}

/// `xi_b` coefficients `(xi_*, xi_1, ..., xi_{d'-1})` from one reduction of
/// `x'` modulo `B'`: `xi_b = (x' - w)/(x'(U') - w(U'))` with `w = x' mod B'`.
pub fn compute_xi_coeffs(sub: TowerRef, a_q: &[u64], v_q: &[u64], x_u: u64) -> Result<Vec<u64>> {
    let fp = sub.fp;
    let h = sub.d();
    let mut e0 = vec![0u64; h];
    e0[0] = 1;
    let w = butterfly::reduce(sub, &e0, &mut OpCounter::new())?;
    let wv = u_to_v(&fp, a_q, &w);
    let w_u = v_q.iter().zip(&wv).fold(0, |acc, (a, b)| fp.add(&acc, &fp.mul(a, b)));
    let c = fp.inv(&fp.sub(&x_u, &w_u)).map_err(|_| Error::SingularSystem)?;
    let mut out = vec![c];
    out.extend(wv[1..].iter().map(|v| fp.neg(&fp.mul(&c, v))));
    Ok(out)
}

/// `xi_b` coefficients by a dense `(d'+1) x (d'+1)` solve; rational `b` only.
pub fn compute_xi_coeffs_dense(g: &LevelGeom) -> Result<Vec<u64>> {
    let fp = g.curve.field;
    let bq = g
        .b_q
        .rational()
        .ok_or_else(|| Error::Unavailable("dense solve needs rational b".into()))?;
    let h = g.d / 2;
    let eq = &g.basis_q;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for p in eq.coset(bq).iter().chain(std::iter::once(&g.u_q)) {
        let mut row = vec![xy(p)?.0];
        row.extend(eq.row(BasisTag::V, p)?);
        rows.push(row);
        rhs.push(0);
    }
    rhs[h] = 1;
    let sol = crate::linalg::solve(&fp, &rows, &rhs)?;
    let mut out = vec![sol[0]];
    out.extend_from_slice(&sol[2..]);
    Ok(out)
}

/// `y' mod B'` in the basis `v'`.
pub fn compute_h_coeffs(g: &LevelGeom, sub: TowerRef) -> Result<Vec<u64>> {
    let fp = g.curve.field;
    let h = g.d / 2;
    match &g.b_q {
        BPoint::Rational(bq) => {
            let vals: Vec<u64> = g
                .basis_q
                .coset(bq)
                .iter()
                .map(|p| xy(p).map(|(_, y)| y))
                .collect::<Result<_>>()?;
            if h == 1 {
                return Ok(vals);
            }
            let u = butterfly::interpolate(sub, &vals, &mut OpCounter::new())?;
            Ok(u_to_v(&fp, &g.basis_q.a_vec, &u))
        }
        BPoint::Extension { .. } => compute_h_coeffs_dense(g),
    }
}

/// `y' mod B'` by dense interpolation, in the extension field if needed.
pub fn compute_h_coeffs_dense(g: &LevelGeom) -> Result<Vec<u64>> {
    let fp = g.curve.field;
    match &g.b_q {
        BPoint::Rational(bq) => {
            let pts = g.basis_q.coset(bq);
            let vals: Vec<u64> = pts.iter().map(|p| xy(p).map(|(_, y)| y)).collect::<Result<_>>()?;
            let u = g.basis_q.interpolate(&vals, &pts)?;
            Ok(g.basis_q.u_to_v(&u))
        }
        BPoint::Extension { modulus, point } => {
            let ext = ExtField::from_checked(fp, modulus.clone());
            let el = g.iso.codomain.lift(&ext);
            let bl = BasisCtx::new(&el, &lift_point(&ext, &g.t_q), g.d / 2)?;
            let pts = bl.coset(point);
            let vals: Vec<Vec<u64>> = pts
                .iter()
                .map(|p| p.y().cloned().ok_or(Error::Pole))
                .collect::<Result<_>>()?;
            let v = bl.u_to_v(&bl.interpolate(&vals, &pts)?);
            v.iter()
                .map(|c| {
                    ext.descend(c)
                        .ok_or_else(|| Error::NoDescent("y' mod B' coefficient".into()))
                })
                .collect()
        }
    }
}

/// `v`-coordinates of `(1 - xi_b o phi) / theta`, from the closed forms
/// `(v'_l - v'_l(U'))/theta = i_l (v_l - v_{l+d'}) + 1` and
/// `theta (u_0 - u_{d'}) = (x' - x'(U')) + c_1 (v'_1 - v'_1(U'))`.
pub fn compute_l_coeffs(fp: &Fp, a: &[u64], c1: u64, i: &[u64], xi: &[u64]) -> (Vec<u64>, u64) {
    let d = a.len();
    let h = d / 2;
    let mut e = vec![0u64; d];
    e[0] = 1;
    e[h] = fp.neg(&1);
    let mut y = u_to_v(fp, a, &e);
    if h == 1 {
        let half = fp.half();
        y.iter_mut().for_each(|v| *v = fp.mul(v, &half));
    } else {
        let w = fp.mul(&c1, &i[1]);
        y[1] = fp.sub(&y[1], &w);
        y[1 + h] = fp.add(&y[1 + h], &w);
        y[0] = fp.sub(&y[0], &c1);
    }
    let mut l: Vec<u64> = y.iter().map(|v| fp.neg(&fp.mul(v, &xi[0]))).collect();
    for k in 1..h {
        let w = fp.mul(&xi[k], &i[k]);
        l[k] = fp.sub(&l[k], &w);
        l[k + h] = fp.add(&l[k + h], &w);
        l[0] = fp.sub(&l[0], &xi[k]);
    }
    let ls = l[h];
    (l, ls)
}

/// Value of `xi_b` at a point of `E'`.
pub fn eval_xi(g: &LevelGeom, xi: &[u64], q: &Point<u64>) -> Result<u64> {
    let fp = g.curve.field;
    let (xu, _) = xy(&g.u_q)?;
    let (xq, _) = xy(q)?;
    let vq = g.basis_q.row(BasisTag::V, q)?;
    let vu = g.basis_q.row(BasisTag::V, &g.u_q)?;
    let mut acc = fp.add(&1, &fp.mul(&xi[0], &fp.sub(&xq, &xu)));
    for l in 1..g.d / 2 {
        acc = fp.add(&acc, &fp.mul(&xi[l], &fp.sub(&vq[l], &vu[l])));
    }
    Ok(acc)
}

/// `l`-coefficients by dense interpolation of `(1 - xi_b o phi)/theta` on
/// the probe coset `r + <t>`.
pub fn compute_l_coeffs_probe(g: &LevelGeom, xi: &[u64], r: &Point<u64>) -> Result<Vec<u64>> {
    let fp = g.curve.field;
    let pts = g.basis.coset(r);
    let vals: Vec<u64> = pts
        .iter()
        .map(|p| {
            let th = g.curve.theta(&g.t2, p)?;
            let xv = eval_xi(g, xi, &g.iso.map(p))?;
            Ok(fp.mul(&fp.sub(&1, &xv), &fp.inv(&th)?))
        })
        .collect::<Result<_>>()?;
    Ok(g.basis.u_to_v(&g.basis.interpolate(&vals, &pts)?))
}

fn level_consts(g: &LevelGeom, sub: TowerRef) -> Result<LevelConsts> {
    let fp = g.curve.field;
    let e = &g.curve;
    let d = g.d;
    let h = d / 2;
    let mults = &g.basis.mults;
    let th: Vec<u64> = (1..h)
        .map(|l| e.theta(&g.t2, &mults[l]))
        .collect::<Result<_>>()?;
    let one_then = |f: &dyn Fn(u64) -> u64, first: u64| {
        std::iter::once(first).chain(th.iter().map(|&v| f(v))).collect::<Vec<u64>>()
    };
    let b = one_then(&|v| fp.neg(&v), 1);
    let c = one_then(&|v| v, 1);
    let a_q = g.basis_q.a_vec.clone();
    let a = g.basis.a_vec.clone();
    let v_q = g.basis_q.row(BasisTag::V, &g.u_q)?;
    let m_q: Vec<u64> = b.iter().zip(&v_q).map(|(x, y)| fp.mul(x, y)).collect();
    let cv: Vec<u64> = c.iter().zip(&v_q).map(|(x, y)| fp.mul(x, y)).collect();
    let n_q: Vec<u64> = (0..h).map(|l| fp.add(&m_q[l], &cv[(l + 1) % h])).collect();
    let half_a1 = fp.mul(&e.a1, &fp.half());
    let ev: Vec<u64> = std::iter::once(Ok(0))
        .chain((1..h).map(|l| Ok(fp.sub(&xy(&mults[l])?.0, &xy(&mults[l + h])?.0))))
        .collect::<Result<_>>()?;
    let f = one_then(&|v| v, half_a1);
    let i: Vec<u64> = std::iter::once(Ok(0))
        .chain(th.iter().map(|v| fp.inv(v).map_err(Error::from)))
        .collect::<Result<_>>()?;
    let (xu, yu) = xy(&g.u_q)?;
    let p: Vec<u64> = (0..h)
        .map(|l| {
            let xs = xy(&g.iso.codomain.add(&g.u_q, &g.basis_q.mults[l]))?.0;
            Ok(fp.add(&fp.mul(&ev[l], &v_q[l]), &fp.mul(&f[l], &xs)))
        })
        .collect::<Result<_>>()?;
    let p_star = fp.sub(&fp.sub(&p[0], &fp.mul(&f[0], &xu)), &yu);
    let x_t = xy(&g.t2)?.0;
    let (x_q, theta_b, theta_b_inv) = match (&g.b, &g.b_q) {
        (BPoint::Rational(bp), BPoint::Rational(bq)) => {
            let xq: Vec<u64> = g
                .basis_q
                .coset(bq)
                .iter()
                .map(|q| Ok(fp.sub(&xy(q)?.0, &xu)))
                .collect::<Result<_>>()?;
            let tb: Vec<u64> = g.basis.coset(bp)[..h]
                .iter()
                .map(|q| e.theta(&g.t2, q))
                .collect::<Result<_>>()?;
            let tbi: Vec<u64> = tb
                .iter()
                .map(|v| fp.inv(v).map_err(Error::from))
                .collect::<Result<_>>()?;
            (Some(xq), Some(tb), Some(tbi))
        }
        _ => (None, None, None),
    };
    let xi = compute_xi_coeffs(sub, &a_q, &v_q, xu)?;
    let hh = compute_h_coeffs(g, sub)?;
    let c1 = if h > 1 { c[1] } else { 0 };
    let (l, l_star) = compute_l_coeffs(&fp, &a, c1, &i, &xi);
    let solver = butterfly::BidiagSolver::new(&fp, &b, &c)?;
    Ok(LevelConsts {
        d,
        b,
        c,
        a_q,
        a,
        v_q,
        m_q,
        n_q,
        xi,
        e: ev,
        f,
        i,
        h: hh,
        l,
        l_star,
        p,
        p_star,
        x_t,
        x_q,
        theta_b,
        theta_b_inv,
        solver,
    })
}

/// Hex SHA-256 of the canonical JSON of `v`.
fn digest_of<T: Serialize>(v: &T) -> String {
    let bytes = serde_json::to_vec(v).expect("serializable");
    hex::encode(Sha256::digest(&bytes))
}

/// Cache key of the tower for `(p, E, t, b)` (`t` fixes `delta`).
pub fn cache_key(p: u64, curve: [u64; 5], t: &Point<u64>, b: &BPoint) -> String {
    digest_of(&("tower-cache", p, curve, t, b))
}

pub const TOWER_FORMAT: &str = "ellbutterfly-tower";
pub const TOWER_VERSION: u32 = 1;

/// On-disk form of a [`Tower`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerFile {
    pub format: String,
    pub version: u32,
    pub p: u64,
    pub delta: u32,
    pub curve: [u64; 5],
    pub t: Point<u64>,
    pub b: BPoint,
    pub bottom_x: u64,
    pub level_digests: Vec<String>,
    pub digest: String,
    pub levels: Vec<LevelConsts>,
}

impl Tower {
    /// Builds the tower for `(E, t, b)` with `t` of order `2^delta >= 2`
    /// and `d b != O`.
    pub fn build(curve: &Curve<Fp>, t: &Point<u64>, b: BPoint) -> Result<Tower> {
        let geoms = geometry(curve, t, b)?;
        let bx = bottom_x(&geoms)?;
        let fp = curve.field;
        let mut levels: Vec<LevelCtx> = Vec::with_capacity(geoms.len());
        for g in geoms {
            let sub = TowerRef {
                fp,
                levels: &levels,
                bottom_x: bx,
            };
            let c = level_consts(&g, sub)?;
            levels.push(LevelCtx { geom: g, c });
        }
        Ok(Tower {
            fp,
            levels,
            bottom_x: bx,
        })
    }

    pub fn build_rational(curve: &Curve<Fp>, t: &Point<u64>, b: &Point<u64>) -> Result<Tower> {
        Self::build(curve, t, BPoint::Rational(b.clone()))
    }

    pub fn view(&self) -> TowerRef<'_> {
        TowerRef {
            fp: self.fp,
            levels: &self.levels,
            bottom_x: self.bottom_x,
        }
    }

    pub fn d(&self) -> usize {
        1 << self.levels.len()
    }

    pub fn delta(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn top(&self) -> &LevelCtx {
        self.levels.last().expect("towers have at least one level")
    }

    pub fn curve(&self) -> &Curve<Fp> {
        &self.top().geom.curve
    }

    pub fn t(&self) -> &Point<u64> {
        &self.top().geom.t
    }

    pub fn b(&self) -> &BPoint {
        &self.top().geom.b
    }

    pub fn basis(&self) -> &BasisCtx<Fp> {
        &self.top().geom.basis
    }

    pub fn is_rational(&self) -> bool {
        self.b().is_rational()
    }

    /// `(b + lt)_l` for rational `b`.
    pub fn coset(&self) -> Option<Vec<Point<u64>>> {
        self.b().rational().map(|b| self.basis().coset(b))
    }

    pub fn evaluate(&self, f: &[u64]) -> Result<Vec<u64>> {
        butterfly::evaluate(self.view(), f, &mut OpCounter::new())
    }

    pub fn interpolate(&self, alpha: &[u64]) -> Result<Vec<u64>> {
        butterfly::interpolate(self.view(), alpha, &mut OpCounter::new())
    }

    pub fn reduce(&self, fx: &[u64]) -> Result<Vec<u64>> {
        butterfly::reduce(self.view(), fx, &mut OpCounter::new())
    }

    pub fn digest(&self) -> String {
        self.to_file().digest
    }

    pub fn to_file(&self) -> TowerFile {
        let consts: Vec<LevelConsts> = self.levels.iter().map(|l| l.c.clone()).collect();
        let level_digests: Vec<String> = consts.iter().map(digest_of).collect();
        let curve = self.curve().coeffs();
        let header = (self.fp.modulus(), self.delta(), curve, self.t(), self.b(), self.bottom_x);
        let digest = digest_of(&(&header, &level_digests));
        TowerFile {
            format: TOWER_FORMAT.into(),
            version: TOWER_VERSION,
            p: self.fp.modulus(),
            delta: self.delta(),
            curve,
            t: self.t().clone(),
            b: self.b().clone(),
            bottom_x: self.bottom_x,
            level_digests,
            digest,
            levels: consts,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("serializable")
    }

    /// Rebuilds the geometry and attaches the stored constants after
    /// verifying every digest.
    pub fn from_file(file: TowerFile) -> Result<Tower> {
        if file.format != TOWER_FORMAT || file.version != TOWER_VERSION {
            return Err(Error::Integrity(format!(
                "unknown format {} v{}",
                file.format, file.version
            )));
        }
        if file.levels.len() != file.delta as usize || file.level_digests.len() != file.levels.len() {
            return Err(Error::Integrity("level count does not match delta".into()));
        }
        for (k, (c, dg)) in file.levels.iter().zip(&file.level_digests).enumerate() {
            if digest_of(c) != *dg {
                return Err(Error::Integrity(format!("digest mismatch at level {k}")));
            }
        }
        let header = (file.p, file.delta, file.curve, &file.t, &file.b, file.bottom_x);
        if digest_of(&(&header, &file.level_digests)) != file.digest {
            return Err(Error::Integrity("header digest mismatch".into()));
        }
        let fp = Fp::new(file.p)?;
        let curve = Curve::from_u64(fp, file.curve)?;
        let geoms = geometry(&curve, &file.t, file.b)?;
        if geoms.len() != file.levels.len() || bottom_x(&geoms)? != file.bottom_x {
            return Err(Error::Integrity("geometry does not match stored data".into()));
        }
        let mut levels = Vec::with_capacity(geoms.len());
        for (g, c) in geoms.into_iter().zip(file.levels) {
            if c.d != g.d || c.b.len() != g.d / 2 || c.l.len() != g.d {
                return Err(Error::Integrity(format!("malformed level d = {}", g.d)));
            }
            levels.push(LevelCtx { geom: g, c });
        }
        Ok(Tower {
            fp,
            levels,
            bottom_x: file.bottom_x,
        })
    }

    pub fn from_json(s: &str) -> Result<Tower> {
        let file: TowerFile =
            serde_json::from_str(s).map_err(|e| Error::Integrity(format!("parse: {e}")))?;
        Self::from_file(file)
    }
}

/// Which identity failed and at which level, if any.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdentityReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the defining identities of every constant of `level` at `n`
/// random rational points.
pub fn verify_level_identities(level: &LevelCtx, n: usize, seed: u64) -> Result<IdentityReport> {
    let g = &level.geom;
    let c = &level.c;
    let fp = g.curve.field;
    let e = &g.curve;
    let eq = &g.iso.codomain;
    let d = g.d;
    let h = d / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = IdentityReport::default();
    let (xu, yu) = xy(&g.u_q)?;
    let vu = &c.v_q;
    let xq_u: Vec<u64> = (0..h)
        .map(|l| Ok(xy(&eq.sub(&g.u_q, &g.basis_q.mults[l]))?.0))
        .collect::<Result<_>>()?;
    let check = |name: &str, lhs: u64, rhs: u64, rep: &mut IdentityReport| {
        rep.checked += 1;
        if lhs != rhs {
            rep.failures.push(format!("{name} at d = {d}"));
        }
    };
    let mut done = 0;
    let mut tries = 0;
    while done < n {
        tries += 1;
        if tries > 100 * n + 100 {
            return Err(Error::SearchExhausted("no pole-free probe points".into()));
        }
        let pt = e.random_point(&mut rng);
        let q = g.iso.map(&pt);
        let vals = (|| -> Result<_> {
            let th = e.theta(&g.t2, &pt)?;
            let u = g.basis.row(BasisTag::U, &pt)?;
            let v = g.basis.row(BasisTag::V, &pt)?;
            let x = g.basis.row(BasisTag::X, &pt)?;
            let vq = g.basis_q.row(BasisTag::V, &q)?;
            let xq = g.basis_q.row(BasisTag::X, &q)?;
            let (x1, y1) = xy(&q)?;
            Ok((th, u, v, x, vq, xq, x1, y1))
        })();
        let Ok((th, u, v, x, vq, xq, x1, y1)) = vals else {
            continue;
        };
        if th == 0 {
            continue;
        }
        done += 1;
        let dv = |l: usize| fp.sub(&vq[l], &vu[l]);
        let dx = fp.sub(&x1, &xu);
        let thd = |a: u64, b: u64| fp.mul(&th, &fp.sub(&a, &b));
        if h == 1 {
            check("deq2chb", thd(u[0], u[1]), fp.mul(&2, &dx), &mut rep);
        } else {
            for l in 1..h.saturating_sub(1) {
                let rhs = fp.add(&fp.mul(&c.b[l], &dv(l)), &fp.mul(&c.c[l + 1], &dv(l + 1)));
                check("chb", thd(u[l], u[l + h]), rhs, &mut rep);
            }
            check("chb2", thd(u[0], u[h]), fp.add(&dx, &fp.mul(&c.c[1], &dv(1))), &mut rep);
            let rhs3 = fp.add(&fp.mul(&c.b[h - 1], &dv(h - 1)), &dx);
            check("chb3", thd(u[h - 1], u[d - 1]), rhs3, &mut rep);
        }
        for l in 1..h {
            let rhs = fp.add(
                &fp.mul(&c.f[l], &fp.sub(&xq[l], &xq_u[l])),
                &fp.mul(&c.e[l], &dv(l)),
            );
            check("chbx", thd(x[l], x[l + h]), rhs, &mut rep);
            let thi = fp.inv(&th)?;
            let rhs = fp.add(&fp.mul(&c.i[l], &fp.sub(&v[l], &v[l + h])), &1);
            check("passv", fp.mul(&dv(l), &thi), rhs, &mut rep);
        }
        let rhs = fp.add(&fp.mul(&c.f[0], &dx), &fp.sub(&y1, &yu));
        check("chbx2", thd(x[0], x[h]), rhs, &mut rep);
        let xi = eval_xi(g, &c.xi, &q)?;
        let lhs = fp.mul(&fp.sub(&1, &xi), &fp.inv(&th)?);
        let rhs = v.iter().zip(&c.l).fold(0, |a, (p, q)| fp.add(&a, &fp.mul(p, q)));
        check("passxi", lhs, rhs, &mut rep);
        let su: u64 = (0..h).fold(0, |a, l| fp.add(&a, &fp.add(&u[l], &u[l + h])));
        check("tgot2", su, 1, &mut rep);
    }
    check("xi(U')", eval_xi(g, &c.xi, &g.u_q)?, 1, &mut rep);
    if let BPoint::Rational(bq) = &g.b_q {
        for p in g.basis_q.coset(bq) {
            check("xi(B')", eval_xi(g, &c.xi, &p)?, 0, &mut rep);
            let hv = g.basis_q.row(BasisTag::V, &p)?;
            let s = hv.iter().zip(&c.h).fold(0, |a, (x, y)| fp.add(&a, &fp.mul(x, y)));
            check("hgot", s, xy(&p)?.1, &mut rep);
        }
    }
    for l in 1..h {
        check("b+c", fp.add(&c.b[l], &c.c[l]), 0, &mut rep);
        check("i*f", fp.mul(&c.i[l], &c.f[l]), 1, &mut rep);
    }
    Ok(rep)
}

impl Tower {
    pub fn verify_identities(&self, n: usize, seed: u64) -> Result<IdentityReport> {
        let mut all = IdentityReport::default();
        for (k, lv) in self.levels.iter().enumerate() {
            let r = verify_level_identities(lv, n, seed.wrapping_add(k as u64))?;
            all.checked += r.checked;
            all.failures.extend(r.failures);
        }
        Ok(all)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::find_torsion_curve;

    fn tower(p: u64, delta: u32, seed: u64) -> (Tower, crate::curve::TorsionCurve) {
        let tc = find_torsion_curve(Fp::new(p).unwrap(), delta, seed).unwrap();
        (Tower::build_rational(&tc.curve, &tc.t, &tc.r).unwrap(), tc)
    }

    #[test]
    fn delta_one_tower_stores_bottom_x() {
        let (tw, _) = tower(10007, 1, 1);
        assert_eq!(tw.levels.len(), 1);
        let g = &tw.levels[0].geom;
        assert_eq!(Some(&tw.bottom_x), g.b_q.rational().unwrap().x());
        let c = &tw.levels[0].c;
        let fp = tw.fp;
        let xb = tw.bottom_x;
        let xu = *g.u_q.x().unwrap();
        assert_eq!(c.xi, vec![fp.neg(&fp.inv(&fp.sub(&xb, &xu)).unwrap())]);
        assert_eq!(c.h, vec![*g.b_q.rational().unwrap().y().unwrap()]);
    }

    #[test]
    fn u_prime_is_two_torsion_and_theta_vanishes_at_u() {
        for seed in 0..6 {
            let tc = find_torsion_curve(Fp::new(10007).unwrap(), 2, seed).unwrap();
            let e = &tc.curve;
            let t2 = e.mul(&tc.t, 2);
            let iso = Isogeny2::new(e, &t2).unwrap();
            let uq = find_u_prime(e, &t2, &iso).unwrap();
            assert!(!uq.is_infinity());
            assert!(iso.codomain.double(&uq).is_infinity());
            // U over F_{p^2}
            let ext = ExtField::of_degree(e.field, 2);
            let el = e.lift(&ext);
            let x0 = *t2.x().unwrap();
            let [c2, c1, c0] = e.two_division_cofactor(&x0);
            let disc = ext.embed(e.field.sub(&e.field.square(&c1), &e.field.mul(&16, &c0)));
            let s = ext.sqrt(&disc).unwrap();
            let x = ext.mul(&ext.sub(&s, &ext.embed(c1)), &ext.inv(&ext.embed(2 * c2)).unwrap());
            let y = ext.neg(&ext.mul(&ext.half(), &ext.add(&ext.mul(&el.a1, &x), &el.a3)));
            let u = Point::Affine(x, y);
            assert!(el.contains(&u));
            let th = el.theta(&lift_point(&ext, &t2), &u).unwrap();
            assert!(ext.is_zero(&th));
        }
    }

    #[test]
    fn identities_hold_on_every_level() {
        for (p, delta, seed) in [(10007, 1, 2), (10007, 3, 3), (1000000007, 4, 4), (10007, 5, 5)] {
            let (tw, _) = tower(p, delta, seed);
            let rep = tw.verify_identities(10, 9).unwrap();
            assert!(rep.ok(), "{:?}", rep.failures);
            assert!(rep.checked > 0);
        }
    }

    #[test]
    fn fast_constants_match_dense_oracles() {
        for (p, delta, seed) in [(10007, 1, 6), (10007, 2, 7), (10007, 4, 8), (1000000007, 3, 9)] {
            let (tw, tc) = tower(p, delta, seed);
            for lv in &tw.levels {
                assert_eq!(compute_xi_coeffs_dense(&lv.geom).unwrap(), lv.c.xi);
                assert_eq!(compute_h_coeffs_dense(&lv.geom).unwrap(), lv.c.h);
                let e = &lv.geom.curve;
                let probe = crate::curve::find_point_not_killed_by(e, lv.geom.d as u64, seed).unwrap();
                let _ = &tc;
                assert_eq!(compute_l_coeffs_probe(&lv.geom, &lv.c.xi, &probe).unwrap(), lv.c.l);
                assert_eq!(lv.c.l_star, lv.c.l[lv.geom.d / 2]);
            }
        }
    }

    #[test]
    fn chain_is_consistent() {
        let (tw, _) = tower(10007, 4, 10);
        for k in 1..tw.levels.len() {
            let lo = &tw.levels[k - 1].geom;
            let hi = &tw.levels[k].geom;
            assert_eq!(lo.curve, hi.iso.codomain);
            assert_eq!(lo.t, hi.t_q);
            assert_eq!(lo.b, hi.b_q);
            assert!(hi.curve.double(&hi.t2).is_infinity());
        }
    }

    #[test]
    fn serialization_roundtrip_and_tamper_detection() {
        let (tw, _) = tower(10007, 3, 11);
        let s = tw.to_json();
        let back = Tower::from_json(&s).unwrap();
        assert_eq!(back.digest(), tw.digest());
        for (a, b) in back.levels.iter().zip(&tw.levels) {
            assert_eq!(a.c, b.c);
        }
        let mut file: TowerFile = serde_json::from_str(&s).unwrap();
        file.levels[1].h[0] = (file.levels[1].h[0] + 1) % 10007;
        assert!(matches!(Tower::from_file(file), Err(Error::Integrity(_))));
        assert!(matches!(Tower::from_json("{"), Err(Error::Integrity(_))));
    }

    #[test]
    fn rejects_bad_b() {
        let tc = find_torsion_curve(Fp::new(10007).unwrap(), 2, 12).unwrap();
        assert!(Tower::build_rational(&tc.curve, &tc.t, &tc.t).is_err());
        assert!(Tower::build_rational(&tc.curve, &tc.t, &Point::Infinity).is_err());
    }
}
