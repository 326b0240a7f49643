//! Multiplication in the residue ring `L` at `B = b + <t>` in the basis
//! `theta_l = u_l mod B`, and normal bases of `F_p`-extensions of degree
//! `2^delta`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basis::{BasisCtx, BasisTag};
use crate::butterfly;
use crate::curve::{find_point_not_killed_by, find_torsion_curve, lift_point, Curve, Isogeny2, Point};
use crate::error::{check_len, Error, Result};
use crate::field::{ExtField, Field, Fp};
use crate::ntt::NttCtx;
use crate::ops::{add_vec, hadamard, rotate, sub_vec, OpCounter};
use crate::tower::{BPoint, Tower};

/// Residue ring at `b + <t>` with an auxiliary rational coset `R + <t>`.
#[derive(Clone, Debug)]
pub struct RingCtx {
    b: Tower,
    r: Tower,
}

impl RingCtx {
    pub fn new(b: Tower, r: Tower) -> Result<Self> {
        if !r.is_rational() {
            return Err(Error::Mismatch("R must be rational".into()));
        }
        if b.curve() != r.curve() || b.t() != r.t() {
            return Err(Error::Mismatch("towers for b and R use different (E, t)".into()));
        }
        Ok(RingCtx { b, r })
    }

    /// The case `b = R`.
    pub fn diagonal(r: Tower) -> Result<Self> {
        Self::new(r.clone(), r)
    }

    pub fn d(&self) -> usize {
        self.b.d()
    }

    pub fn fp(&self) -> Fp {
        self.b.curve().field
    }

    pub fn tower_b(&self) -> &Tower {
        &self.b
    }

    pub fn tower_r(&self) -> &Tower {
        &self.r
    }

    pub fn is_diagonal(&self) -> bool {
        self.b.b() == self.r.b()
    }

    /// Coordinates of `1`.
    pub fn one(&self) -> Vec<u64> {
        vec![1; self.d()]
    }

    pub fn multiply(&self, f: &[u64], g: &[u64], ops: &mut OpCounter) -> Result<Vec<u64>> {
        check_len(self.d(), f.len())?;
        check_len(self.d(), g.len())?;
        let fp = self.fp();
        let rv = self.r.view();
        let alpha = butterfly::evaluate(rv, f, ops)?;
        let beta = butterfly::evaluate(rv, g, ops)?;
        let df = sub_vec(&fp, f, &rotate(f), ops);
        let dg = sub_vec(&fp, g, &rotate(g), ops);
        let hx = hadamard(&fp, &df, &dg, ops);
        let hr = butterfly::reduce(rv, &hx, ops)?;
        let gamma = butterfly::evaluate(rv, &hr, ops)?;
        let ab = hadamard(&fp, &alpha, &beta, ops);
        let delta = sub_vec(&fp, &ab, &gamma, ops);
        let k = butterfly::interpolate(rv, &delta, ops)?;
        let hb = butterfly::reduce(self.b.view(), &hx, ops)?;
        Ok(add_vec(&fp, &hb, &k, ops))
    }

    pub fn multiply_diagonal(&self, f: &[u64], g: &[u64], ops: &mut OpCounter) -> Result<Vec<u64>> {
        if !self.is_diagonal() {
            return Err(Error::Mismatch("b != R".into()));
        }
        let fp = self.fp();
        let rv = self.r.view();
        let alpha = butterfly::evaluate(rv, f, ops)?;
        let beta = butterfly::evaluate(rv, g, ops)?;
        butterfly::interpolate(rv, &hadamard(&fp, &alpha, &beta, ops), ops)
    }
}

fn pointwise<F: Field>(
    basis: &BasisCtx<F>,
    pts: &[Point<F::Elem>],
    f: &[F::Elem],
    g: &[F::Elem],
) -> Result<Vec<F::Elem>> {
    let fld = &basis.curve.field;
    let a = basis.evaluate(BasisTag::U, f, pts)?;
    let b = basis.evaluate(BasisTag::U, g, pts)?;
    let prod: Vec<F::Elem> = a.iter().zip(&b).map(|(x, y)| fld.mul(x, y)).collect();
    basis.interpolate(&prod, pts)
}

/// Dense reference product: evaluate both factors on `B` (over the field of
/// definition of `b`), multiply pointwise and interpolate.
pub fn multiply_oracle(tw: &Tower, f: &[u64], g: &[u64]) -> Result<Vec<u64>> {
    check_len(tw.d(), f.len())?;
    check_len(tw.d(), g.len())?;
    match tw.b() {
        BPoint::Rational(b) => {
            let basis = tw.basis();
            pointwise(basis, &basis.coset(b), f, g)
        }
        BPoint::Extension { modulus, point } => {
            let ext = ExtField::new(tw.curve().field, modulus.clone())?;
            let el = tw.curve().lift(&ext);
            let basis = BasisCtx::new(&el, &lift_point(&ext, tw.t()), tw.d())?;
            let lift = |v: &[u64]| v.iter().map(|&c| ext.embed(c)).collect::<Vec<_>>();
            let out = pointwise(&basis, &basis.coset(point), &lift(f), &lift(g))?;
            out.iter()
                .map(|c| ext.descend(c).ok_or_else(|| Error::NoDescent("product coordinate".into())))
                .collect()
        }
    }
}

/// `d = 2^delta`-extension of `F_p` with a normal basis `Theta` on which
/// Frobenius acts as the cyclic shift `sigma`.
#[derive(Clone, Debug)]
pub enum NormalBasisField {
    Kummer(KummerField),
    Elliptic(EllipticField),
}

/// `L = F_p[X]/(X^d - a)` with `a` generating the 2-Sylow subgroup of
/// `F_p^*`; `theta = sum_k X^k`.
#[derive(Clone, Debug)]
pub struct KummerField {
    pub fp: Fp,
    pub d: usize,
    pub a: u64,
    /// `t = a^((p-1)/d)`, so that `X^p = t X`.
    pub t: u64,
    theta_pi: NttCtx,
    conv: NttCtx,
    ext: ExtField,
}

impl KummerField {
    pub fn new(fp: Fp, delta: u32) -> Result<Self> {
        let d = 1usize << delta;
        let p = fp.modulus();
        let nu = fp.two_adicity();
        if nu < delta + 1 {
            return Err(Error::Unavailable(format!(
                "Kummer branch needs 2d | p - 1 (p = {p}, d = {d})"
            )));
        }
        let a = fp.pow_u64(&fp.primitive_root(), (p - 1) >> nu);
        let t = fp.pow_u64(&a, (p - 1) / d as u64);
        let mut modulus = vec![0u64; d + 1];
        modulus[0] = fp.neg(&a);
        modulus[d] = 1;
        Ok(KummerField {
            fp,
            d,
            a,
            t,
            theta_pi: NttCtx::with_root(fp, d, t)?,
            conv: NttCtx::new(fp, 2 * d)?,
            ext: ExtField::new(fp, modulus)?,
        })
    }

    /// `Pi = (1, X, ..., X^{d-1})` coordinates from `Theta` coordinates.
    pub fn theta_to_pi(&self, c: &[u64], ops: &mut OpCounter) -> Result<Vec<u64>> {
        self.theta_pi.forward(c, ops)
    }

    pub fn pi_to_theta(&self, c: &[u64], ops: &mut OpCounter) -> Result<Vec<u64>> {
        self.theta_pi.inverse(c, ops)
    }

    /// Product in the basis `Pi`.
    pub fn multiply_pi(&self, f: &[u64], g: &[u64], ops: &mut OpCounter) -> Result<Vec<u64>> {
        check_len(self.d, f.len())?;
        check_len(self.d, g.len())?;
        let fp = &self.fp;
        let pad = |v: &[u64]| {
            let mut w = v.to_vec();
            w.resize(2 * self.d, 0);
            w
        };
        let full = self.conv.cyclic_convolution(&pad(f), &pad(g), ops)?;
        ops.mul(self.d);
        ops.add(self.d);
        Ok((0..self.d)
            .map(|k| fp.add(&full[k], &fp.mul(&self.a, &full[k + self.d])))
            .collect())
    }

    pub fn multiply(&self, f: &[u64], g: &[u64], ops: &mut OpCounter) -> Result<Vec<u64>> {
        let pf = self.theta_to_pi(f, ops)?;
        let pg = self.theta_to_pi(g, ops)?;
        let ph = self.multiply_pi(&pf, &pg, ops)?;
        self.pi_to_theta(&ph, ops)
    }

    pub fn to_ext(&self, c: &[u64]) -> Result<Vec<u64>> {
        self.theta_to_pi(c, &mut OpCounter::new())
    }
}

/// Residue field at an irreducible fiber `B = b + <t>` with
/// `Frob(b) = b - t`, so that `theta_l = u_l mod B` is a normal basis.
#[derive(Clone, Debug)]
pub struct EllipticField {
    pub ring: RingCtx,
    ext: ExtField,
    /// `u_l(b)` in `F_p[X]/(modulus)`.
    u_at_b: Vec<Vec<u64>>,
}

impl EllipticField {
    /// Searches `E`, `t`, `b` and `R` over `F_p`, deterministic in `seed`.
    pub fn search(fp: Fp, delta: u32, seed: u64) -> Result<Self> {
        let d = 1usize << delta;
        let ext = ExtField::of_degree(fp, d);
        for attempt in 0..32u64 {
            let s = seed.wrapping_mul(1_000_003).wrapping_add(attempt);
            let tc = find_torsion_curve(fp, delta, s)?;
            let mut chain: Vec<Isogeny2<Fp>> = Vec::new();
            let (mut e, mut t) = (tc.curve.clone(), tc.t.clone());
            for k in (0..delta).rev() {
                let iso = Isogeny2::new(&e, &e.mul(&t, 1 << k))?;
                t = iso.map(&t);
                e = iso.codomain.clone();
                chain.push(iso);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x6e6f_726d);
            for _ in 0..8 {
                let r0 = e.random_point(&mut rng);
                if r0.is_infinity() {
                    continue;
                }
                let Some(b) = pull_back(&ext, &chain, &r0) else {
                    continue;
                };
                if let Some(f) = Self::from_point(&tc.curve, &tc.t, d, &ext, b, s)? {
                    return Ok(f);
                }
            }
        }
        Err(Error::SearchExhausted(format!(
            "no irreducible fiber of degree {d} over F_{}",
            fp.modulus()
        )))
    }

    /// `None` if Frobenius does not act on `b + <t>` as a `d`-cycle.
    fn from_point(
        e: &Curve<Fp>,
        t: &Point<u64>,
        d: usize,
        ext: &ExtField,
        b: Point<Vec<u64>>,
        seed: u64,
    ) -> Result<Option<Self>> {
        let el = e.lift(ext);
        if el.mul(&b, d as u64).is_infinity() {
            return Ok(None);
        }
        let frob = b.map(|c| ext.frobenius(c));
        let diff = el.sub(&frob, &b);
        let Some(k) = (0..d).find(|&k| lift_point(ext, &e.mul(t, k as u64)) == diff) else {
            return Ok(None);
        };
        if k % 2 == 0 {
            return Ok(None);
        }
        let t_new = e.mul_signed(t, -(k as i64));
        let r = find_point_not_killed_by(e, d as u64, seed)?;
        let tb = Tower::build(
            e,
            &t_new,
            BPoint::Extension {
                modulus: ext.modulus().to_vec(),
                point: b.clone(),
            },
        )?;
        let tr = Tower::build_rational(e, &t_new, &r)?;
        let basis = BasisCtx::new(&el, &lift_point(ext, &t_new), d)?;
        let u_at_b = basis.row(BasisTag::U, &b)?;
        Ok(Some(EllipticField {
            ring: RingCtx::new(tb, tr)?,
            ext: ext.clone(),
            u_at_b,
        }))
    }

    pub fn to_ext(&self, c: &[u64]) -> Result<Vec<u64>> {
        check_len(self.u_at_b.len(), c.len())?;
        let ext = &self.ext;
        Ok(c.iter()
            .zip(&self.u_at_b)
            .fold(ext.zero(), |acc, (ci, u)| ext.add(&acc, &ext.mul(&ext.embed(*ci), u))))
    }
}

/// A point of `E(F_{p^d})` above `r0` through the chain of 2-isogenies.
fn pull_back(ext: &ExtField, chain: &[Isogeny2<Fp>], r0: &Point<u64>) -> Option<Point<Vec<u64>>> {
    let mut q = lift_point(ext, r0);
    for iso in chain.iter().rev() {
        let li = Isogeny2::new(&iso.domain.lift(ext), &lift_point(ext, &iso.kernel)).ok()?;
        q = li.preimages(&q).into_iter().next()?;
    }
    Some(q)
}

impl NormalBasisField {
    /// Kummer branch when `2d | p - 1`, elliptic branch otherwise. Fails
    /// outside `4 d^4 <= p` unless `force` is set.
    pub fn build(fp: Fp, delta: u32, seed: u64, force: bool) -> Result<Self> {
        if delta == 0 || delta > 20 {
            return Err(Error::Config("delta must be in 1..=20".into()));
        }
        if !force && !Self::within_hypothesis(fp, delta) {
            return Err(Error::Config(format!(
                "4 d^4 > p for d = {}, p = {}",
                1u64 << delta,
                fp.modulus()
            )));
        }
        if fp.two_adicity() > delta {
            Ok(NormalBasisField::Kummer(KummerField::new(fp, delta)?))
        } else {
            Ok(NormalBasisField::Elliptic(EllipticField::search(fp, delta, seed)?))
        }
    }

    pub fn within_hypothesis(fp: Fp, delta: u32) -> bool {
        let d = 1u128 << delta;
        4 * d.pow(4) <= fp.modulus() as u128
    }

    pub fn d(&self) -> usize {
        match self {
            NormalBasisField::Kummer(k) => k.d,
            NormalBasisField::Elliptic(e) => e.ring.d(),
        }
    }

    pub fn fp(&self) -> Fp {
        match self {
            NormalBasisField::Kummer(k) => k.fp,
            NormalBasisField::Elliptic(e) => e.ring.fp(),
        }
    }

    pub fn is_kummer(&self) -> bool {
        matches!(self, NormalBasisField::Kummer(_))
    }

    /// Coordinates of `1`.
    pub fn one(&self) -> Vec<u64> {
        match self {
            NormalBasisField::Kummer(k) => {
                let inv = k.fp.inv(&(k.d as u64)).expect("d < p");
                vec![inv; k.d]
            }
            NormalBasisField::Elliptic(e) => e.ring.one(),
        }
    }

    pub fn multiply(&self, f: &[u64], g: &[u64], ops: &mut OpCounter) -> Result<Vec<u64>> {
        match self {
            NormalBasisField::Kummer(k) => k.multiply(f, g, ops),
            NormalBasisField::Elliptic(e) => e.ring.multiply(f, g, ops),
        }
    }

    /// The polynomial quotient `F_p[X]/(m)` that [`Self::to_ext`] maps into.
    pub fn ext(&self) -> &ExtField {
        match self {
            NormalBasisField::Kummer(k) => &k.ext,
            NormalBasisField::Elliptic(e) => &e.ext,
        }
    }

    /// Field isomorphism from `Theta`-coordinates into [`Self::ext`].
    pub fn to_ext(&self, c: &[u64]) -> Result<Vec<u64>> {
        match self {
            NormalBasisField::Kummer(k) => k.to_ext(c),
            NormalBasisField::Elliptic(e) => e.to_ext(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::find_torsion_curve;

    fn rv(fp: &Fp, n: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
        (0..n).map(|_| fp.random(rng)).collect()
    }

    fn split_ring(p: u64, delta: u32, seed: u64) -> RingCtx {
        let tc = find_torsion_curve(Fp::new(p).unwrap(), delta, seed).unwrap();
        let b = find_point_not_killed_by(&tc.curve, 1 << delta, seed + 100).unwrap();
        RingCtx::new(
            Tower::build_rational(&tc.curve, &tc.t, &b).unwrap(),
            Tower::build_rational(&tc.curve, &tc.t, &tc.r).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn split_ring_matches_oracle_and_axioms() {
        for (p, delta, seed) in [(10007, 1, 1), (10007, 2, 2), (1000000007, 3, 3), (10007, 4, 4)] {
            let ring = split_ring(p, delta, seed);
            let fp = ring.fp();
            let d = ring.d();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ops = OpCounter::new();
            for _ in 0..3 {
                let (f, g, h) = (rv(&fp, d, &mut rng), rv(&fp, d, &mut rng), rv(&fp, d, &mut rng));
                let fg = ring.multiply(&f, &g, &mut ops).unwrap();
                assert_eq!(fg, multiply_oracle(ring.tower_b(), &f, &g).unwrap());
                assert_eq!(fg, ring.multiply(&g, &f, &mut ops).unwrap());
                let l = ring.multiply(&fg, &h, &mut ops).unwrap();
                let gh = ring.multiply(&g, &h, &mut ops).unwrap();
                assert_eq!(l, ring.multiply(&f, &gh, &mut ops).unwrap());
                assert_eq!(ring.multiply(&f, &ring.one(), &mut ops).unwrap(), f);
            }
        }
    }

    #[test]
    fn diagonal_agrees_and_evaluate_is_multiplicative() {
        let tc = find_torsion_curve(Fp::new(10007).unwrap(), 3, 5).unwrap();
        let ring = RingCtx::diagonal(Tower::build_rational(&tc.curve, &tc.t, &tc.r).unwrap()).unwrap();
        let fp = ring.fp();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut ops = OpCounter::new();
        let f = rv(&fp, 8, &mut rng);
        let g = rv(&fp, 8, &mut rng);
        let a = ring.multiply_diagonal(&f, &g, &mut ops).unwrap();
        assert_eq!(a, ring.multiply(&f, &g, &mut ops).unwrap());
        let tw = ring.tower_r();
        let lhs = tw.evaluate(&a).unwrap();
        let rhs: Vec<u64> = tw
            .evaluate(&f)
            .unwrap()
            .iter()
            .zip(tw.evaluate(&g).unwrap())
            .map(|(x, y)| fp.mul(x, &y))
            .collect();
        assert_eq!(lhs, rhs);
        assert!(split_ring(10007, 2, 6).multiply_diagonal(&f[..4], &g[..4], &mut ops).is_err());
    }

    fn check_normal(nb: &NormalBasisField, seed: u64) {
        let fp = nb.fp();
        let d = nb.d();
        let ext = nb.ext();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ops = OpCounter::new();
        assert_eq!(nb.to_ext(&nb.one()).unwrap(), ext.one());
        for _ in 0..3 {
            let f = rv(&fp, d, &mut rng);
            let g = rv(&fp, d, &mut rng);
            let xf = nb.to_ext(&f).unwrap();
            assert_eq!(ext.frobenius(&xf), nb.to_ext(&rotate(&f)).unwrap());
            let fg = nb.multiply(&f, &g, &mut ops).unwrap();
            assert_eq!(nb.to_ext(&fg).unwrap(), ext.mul(&xf, &nb.to_ext(&g).unwrap()));
        }
    }

    #[test]
    fn kummer_normal_basis() {
        for delta in 1..=4 {
            let nb = NormalBasisField::build(Fp::new(998244353).unwrap(), delta, 0, false).unwrap();
            assert!(nb.is_kummer());
            check_normal(&nb, delta as u64);
        }
    }

    #[test]
    fn elliptic_normal_basis() {
        for delta in 1..=3 {
            let nb = NormalBasisField::build(Fp::new(100003).unwrap(), delta, 7, false).unwrap();
            assert!(!nb.is_kummer());
            check_normal(&nb, delta as u64);
            let NormalBasisField::Elliptic(e) = &nb else { unreachable!() };
            let f: Vec<u64> = (1..=nb.d() as u64).collect();
            let g: Vec<u64> = (0..nb.d() as u64).map(|v| v * v + 3).collect();
            assert_eq!(
                e.ring.multiply(&f, &g, &mut OpCounter::new()).unwrap(),
                multiply_oracle(e.ring.tower_b(), &f, &g).unwrap()
            );
        }
    }

    #[test]
    fn hypothesis_bound() {
        let fp = Fp::new(10007).unwrap();
        assert!(NormalBasisField::build(fp, 3, 0, false).is_err());
        assert!(NormalBasisField::within_hypothesis(fp, 2));
    }
}
