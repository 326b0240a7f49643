//! The `[d, d/2, d/2 + 1]` code of `iota`-invariant functions of `L(<t>)`
//! evaluated on `Q + <t>`, with basis `l_0 = 1`, `l_l = v_l - v_{-l}`.

use crate::basis::{u_to_v_counted, v_to_u_counted};
use crate::butterfly;
use crate::curve::find_torsion_curve;
use crate::error::{check_len, Error, Result};
use crate::field::{Field, Fp};
use crate::ops::OpCounter;
use crate::tower::Tower;

#[derive(Clone, Debug)]
pub struct GoppaCode {
    tower: Tower,
}

impl GoppaCode {
    /// Needs a rational `Q` with `2 d Q != O`.
    pub fn new(tower: Tower) -> Result<Self> {
        let q = tower
            .b()
            .rational()
            .ok_or_else(|| Error::Config("evaluation coset must be rational".into()))?;
        let e = tower.curve();
        if e.mul(q, 2 * tower.d() as u64).is_infinity() {
            return Err(Error::Degenerate("2 d Q = O".into()));
        }
        Ok(GoppaCode { tower })
    }

    /// Random curve with `d`-torsion and a suitable `Q`.
    pub fn search(fp: Fp, delta: u32, seed: u64) -> Result<Self> {
        let tc = find_torsion_curve(fp, delta, seed)?;
        let e = &tc.curve;
        let m = 2u64 << delta;
        let q = if e.mul(&tc.r, m).is_infinity() {
            crate::curve::find_point_not_killed_by(e, m, seed)?
        } else {
            tc.r.clone()
        };
        Self::new(Tower::build_rational(e, &tc.t, &q)?)
    }

    /// `q >= max(d^4/4, (2d+1)^2 + 1)`.
    pub fn within_bound(fp: Fp, delta: u32) -> bool {
        let d = 1u128 << delta;
        let q = fp.modulus() as u128;
        4 * q >= d.pow(4) && q > (2 * d + 1).pow(2)
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn fp(&self) -> Fp {
        self.tower.curve().field
    }

    /// Code length.
    pub fn n(&self) -> usize {
        self.tower.d()
    }

    /// Dimension.
    pub fn k(&self) -> usize {
        self.tower.d() / 2
    }

    /// `v`-coordinates of the function with `l`-coordinates `msg`.
    pub fn message_to_v(&self, msg: &[u64]) -> Result<Vec<u64>> {
        check_len(self.k(), msg.len())?;
        let fp = self.fp();
        let d = self.n();
        let mut n = vec![0u64; d];
        n[0] = msg[0];
        for l in 1..self.k() {
            n[l] = msg[l];
            n[d - l] = fp.neg(&msg[l]);
        }
        Ok(n)
    }

    pub fn encode(&self, msg: &[u64], ops: &mut OpCounter) -> Result<Vec<u64>> {
        let n = self.message_to_v(msg)?;
        let fp = self.fp();
        let u = v_to_u_counted(&fp, &self.tower.basis().a_vec, &n, ops);
        butterfly::evaluate(self.tower.view(), &u, ops)
    }

    /// The message if `word` is a codeword.
    pub fn check(&self, word: &[u64], ops: &mut OpCounter) -> Result<Option<Vec<u64>>> {
        check_len(self.n(), word.len())?;
        let fp = self.fp();
        let d = self.n();
        let h = self.k();
        let u = butterfly::interpolate(self.tower.view(), word, ops)?;
        let n = u_to_v_counted(&fp, &self.tower.basis().a_vec, &u, ops);
        ops.add(h - 1);
        let ok = n[h] == 0 && (1..h).all(|l| fp.add(&n[l], &n[d - l]) == 0);
        Ok(ok.then(|| n[..h].to_vec()))
    }

    /// Minimum nonzero codeword weight by enumerating all `q^{d/2}` messages.
    pub fn minimum_distance_exhaustive(&self) -> Result<usize> {
        let q = self.fp().modulus();
        let k = self.k() as u32;
        let total = (q as u128).pow(k);
        if total > 50_000_000 {
            return Err(Error::Config(format!("{total} codewords is too many to enumerate")));
        }
        let mut msg = vec![0u64; self.k()];
        let mut best = usize::MAX;
        let mut ops = OpCounter::new();
        for idx in 1..total as u64 {
            let mut r = idx;
            for m in msg.iter_mut() {
                *m = r % q;
                r /= q;
            }
            let w = self.encode(&msg, &mut ops)?;
            best = best.min(w.iter().filter(|&&x| x != 0).count());
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisTag;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rv(fp: &Fp, n: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
        (0..n).map(|_| fp.random(rng)).collect()
    }

    #[test]
    fn constant_message() {
        let code = GoppaCode::search(Fp::new(10007).unwrap(), 3, 1).unwrap();
        let mut msg = vec![0; 4];
        msg[0] = 1;
        assert_eq!(code.encode(&msg, &mut OpCounter::new()).unwrap(), vec![1; 8]);
    }

    #[test]
    fn encode_matches_dense_basis() {
        let code = GoppaCode::search(Fp::new(10007).unwrap(), 3, 2).unwrap();
        let fp = code.fp();
        let basis = code.tower().basis();
        let pts = code.tower().coset().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let msg = rv(&fp, 4, &mut rng);
        let v = code.message_to_v(&msg).unwrap();
        let dense = basis.evaluate(BasisTag::V, &v, &pts).unwrap();
        assert_eq!(code.encode(&msg, &mut OpCounter::new()).unwrap(), dense);
        // the function is iota-invariant: same values at -(Q + lt)
        let neg: Vec<_> = pts.iter().map(|p| basis.curve.neg(p)).collect();
        assert_eq!(basis.evaluate(BasisTag::V, &v, &neg).unwrap(), dense);
    }

    #[test]
    fn roundtrip_corruption_and_random_words() {
        let code = GoppaCode::search(Fp::new(10007).unwrap(), 3, 3).unwrap();
        let fp = code.fp();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut ops = OpCounter::new();
        for _ in 0..20 {
            let m = rv(&fp, 4, &mut rng);
            let w = code.encode(&m, &mut ops).unwrap();
            assert_eq!(code.check(&w, &mut ops).unwrap(), Some(m));
            for pos in 0..8 {
                let mut bad = w.clone();
                bad[pos] = fp.add(&bad[pos], &(1 + fp.random(&mut rng) % 10006));
                assert_eq!(code.check(&bad, &mut ops).unwrap(), None);
            }
        }
        let accepted = (0..200)
            .filter(|_| code.check(&rv(&fp, 8, &mut rng), &mut ops).unwrap().is_some())
            .count();
        assert_eq!(accepted, 0);
    }

    #[test]
    fn linearity() {
        let code = GoppaCode::search(Fp::new(1000000007).unwrap(), 4, 4).unwrap();
        let fp = code.fp();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut ops = OpCounter::new();
        let (a, b) = (rv(&fp, 8, &mut rng), rv(&fp, 8, &mut rng));
        let s = fp.random(&mut rng);
        let wa = code.encode(&a, &mut ops).unwrap();
        let wb = code.encode(&b, &mut ops).unwrap();
        let w: Vec<u64> = wa.iter().zip(&wb).map(|(x, y)| fp.add(&fp.mul(&s, x), y)).collect();
        let m: Vec<u64> = a.iter().zip(&b).map(|(x, y)| fp.add(&fp.mul(&s, x), y)).collect();
        assert_eq!(code.check(&w, &mut ops).unwrap(), Some(m));
    }

    #[test]
    fn mds_at_d4() {
        let code = GoppaCode::search(Fp::new(101).unwrap(), 2, 5).unwrap();
        assert_eq!(code.minimum_distance_exhaustive().unwrap(), 3);
    }

    #[test]
    fn d2_and_bounds() {
        let code = GoppaCode::search(Fp::new(10007).unwrap(), 1, 6).unwrap();
        let w = code.encode(&[5], &mut OpCounter::new()).unwrap();
        assert_eq!(w, vec![5, 5]);
        assert!(code.check(&[5, 6], &mut OpCounter::new()).unwrap().is_none());
        assert!(GoppaCode::within_bound(Fp::new(10007).unwrap(), 3));
        assert!(GoppaCode::within_bound(Fp::new(101).unwrap(), 2));
        assert!(!GoppaCode::within_bound(Fp::new(101).unwrap(), 3));
    }
}
