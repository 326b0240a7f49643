//! Toy Elliptic-LWE encryption over the multiplication law of a residue
//! ring, single-bit and multi-bit (`beta` bits in each of `ell^2` slots).
//!
//! Experimental only: nothing here is constant time.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{find_point_not_killed_by, find_torsion_curve};
use crate::error::{check_len, Error, Result};
use crate::field::{Field, Fp};
use crate::ops::{inner, OpCounter};
use crate::ring::RingCtx;
use crate::tower::Tower;

/// Error distribution on `Z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ChiSpec {
    Zero,
    /// Centered binomial: `sum of eta bits - sum of eta bits`.
    Binomial { eta: u32 },
    /// Discrete Gaussian with parameter `sigma`, cut at `10 sigma`.
    Gaussian { sigma: f64 },
}

#[derive(Clone, Debug)]
pub struct Chi {
    pub spec: ChiSpec,
    tail: i64,
    cdf: Vec<f64>,
}

impl Chi {
    pub fn new(spec: ChiSpec) -> Result<Self> {
        let (tail, cdf) = match &spec {
            ChiSpec::Zero => (0, Vec::new()),
            ChiSpec::Binomial { eta } => {
                if *eta == 0 || *eta > 64 {
                    return Err(Error::Config("eta must be in 1..=64".into()));
                }
                (*eta as i64, Vec::new())
            }
            ChiSpec::Gaussian { sigma } => {
                if !(*sigma > 0.0 && *sigma < 1e6) {
                    return Err(Error::Config(format!("bad sigma {sigma}")));
                }
                let tail = (10.0 * sigma).ceil() as i64;
                let mut acc = 0.0;
                let cdf = (-tail..=tail)
                    .map(|x| {
                        acc += (-((x * x) as f64) / (2.0 * sigma * sigma)).exp();
                        acc
                    })
                    .collect();
                (tail, cdf)
            }
        };
        Ok(Chi { spec, tail, cdf })
    }

    /// Every sample lies in `[-bound, bound]`.
    pub fn bound(&self) -> i64 {
        self.tail
    }

    pub fn variance(&self) -> f64 {
        match &self.spec {
            ChiSpec::Zero => 0.0,
            ChiSpec::Binomial { eta } => *eta as f64 / 2.0,
            ChiSpec::Gaussian { sigma } => sigma * sigma,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        match &self.spec {
            ChiSpec::Zero => 0,
            ChiSpec::Binomial { eta } => {
                let mask = if *eta == 64 { u64::MAX } else { (1u64 << eta) - 1 };
                let a = (rng.gen::<u64>() & mask).count_ones() as i64;
                let b = (rng.gen::<u64>() & mask).count_ones() as i64;
                a - b
            }
            ChiSpec::Gaussian { .. } => {
                let u = rng.gen::<f64>() * self.cdf[self.cdf.len() - 1];
                self.cdf.partition_point(|&c| c <= u) as i64 - self.tail
            }
        }
    }

    pub fn sample_vec<R: Rng + ?Sized>(&self, fp: &Fp, n: usize, rng: &mut R) -> Vec<u64> {
        (0..n).map(|_| fp.from_i64(self.sample(rng))).collect()
    }
}

/// Construction parameters, enough to rebuild the scheme deterministically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LweParams {
    pub q: u64,
    pub delta: u32,
    pub chi: ChiSpec,
    /// Bits per slot.
    pub beta: u32,
    /// `ell` secrets, `ell^2` slots.
    pub ell: usize,
    /// Seed of the curve search.
    pub curve_seed: u64,
    /// Failure rate the preset is meant to stay under.
    pub failure_target: f64,
}

impl LweParams {
    /// `q = 32749`, `d = 256`, centered binomial `eta = 2`, single bit.
    pub fn toy() -> Self {
        LweParams {
            q: 32749,
            delta: 8,
            chi: ChiSpec::Binomial { eta: 2 },
            beta: 1,
            ell: 1,
            curve_seed: 1,
            failure_target: 0.01,
        }
    }

    /// `q = O(d)` and `sigma = O(sqrt d)`: `d = 128`, `q = 2^17 - 1`,
    /// `sigma = sqrt(d)/2`.
    pub fn guideline() -> Self {
        LweParams {
            q: 131071,
            delta: 7,
            chi: ChiSpec::Gaussian {
                sigma: (128f64).sqrt() / 2.0,
            },
            beta: 1,
            ell: 1,
            curve_seed: 1,
            failure_target: 0.01,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "toy" => Ok(Self::toy()),
            "guideline" => Ok(Self::guideline()),
            _ => Err(Error::Config(format!("unknown preset {name}"))),
        }
    }
}

/// Explicit matrix `M` of `x -> a (x) x` in the `u`-coordinates;
/// `M^T` is the transpose map.
#[derive(Clone, Debug)]
pub struct TransposeMap {
    m: Vec<Vec<u64>>,
}

impl TransposeMap {
    pub fn build(ring: &RingCtx, a: &[u64]) -> Result<Self> {
        let d = ring.d();
        let mut m = vec![vec![0u64; d]; d];
        let mut ej = vec![0u64; d];
        for j in 0..d {
            ej[j] = 1;
            let col = ring.multiply(a, &ej, &mut OpCounter::new())?;
            ej[j] = 0;
            for i in 0..d {
                m[i][j] = col[i];
            }
        }
        Ok(TransposeMap { m })
    }

    pub fn apply(&self, fp: &Fp, x: &[u64], ops: &mut OpCounter) -> Vec<u64> {
        self.m.iter().map(|row| inner(fp, row, x, ops)).collect()
    }

    pub fn apply_transpose(&self, fp: &Fp, y: &[u64], ops: &mut OpCounter) -> Vec<u64> {
        let d = y.len();
        let mut out = vec![0u64; d];
        for (i, row) in self.m.iter().enumerate() {
            for j in 0..d {
                out[j] = fp.add(&out[j], &fp.mul(&row[j], &y[i]));
            }
        }
        ops.mul(d * d);
        ops.add(d * d);
        out
    }
}

#[derive(Clone, Debug)]
pub struct PublicKey {
    pub a: Vec<u64>,
    pub w: Vec<Vec<u64>>,
    phi: TransposeMap,
}

impl PublicKey {
    pub fn transpose_map(&self) -> &TransposeMap {
        &self.phi
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretKey {
    pub s: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ciphertext {
    /// `ell` vectors.
    pub c1: Vec<Vec<u64>>,
    /// `ell x ell` scalars, row `i` for `r_i`.
    pub c2: Vec<Vec<u64>>,
}

/// Randomness of one encryption, for white-box checks.
#[derive(Clone, Debug)]
pub struct EncRandomness {
    pub r: Vec<Vec<u64>>,
    pub e1: Vec<Vec<u64>>,
    pub e2: Vec<Vec<u64>>,
}

#[derive(Clone, Debug)]
pub struct Lwe {
    pub params: LweParams,
    pub ring: RingCtx,
    pub chi: Chi,
}

impl Lwe {
    /// Searches a curve with a point of order `d` and two rational cosets.
    pub fn new(params: LweParams) -> Result<Self> {
        if params.beta == 0 || params.beta > 16 || params.ell == 0 {
            return Err(Error::Config("need 1 <= beta <= 16 and ell >= 1".into()));
        }
        let fp = Fp::new(params.q)?;
        if (params.q >> params.beta) < 2 {
            return Err(Error::Config("q too small for beta".into()));
        }
        let tc = find_torsion_curve(fp, params.delta, params.curve_seed)?;
        let d = 1u64 << params.delta;
        let b = find_point_not_killed_by(&tc.curve, d, params.curve_seed ^ 0xb)?;
        let ring = RingCtx::new(
            Tower::build_rational(&tc.curve, &tc.t, &b)?,
            Tower::build_rational(&tc.curve, &tc.t, &tc.r)?,
        )?;
        let chi = Chi::new(params.chi.clone())?;
        Ok(Lwe { params, ring, chi })
    }

    pub fn from_ring(params: LweParams, ring: RingCtx) -> Result<Self> {
        if ring.fp().modulus() != params.q || ring.d() != 1 << params.delta {
            return Err(Error::Mismatch("ring does not match (q, d)".into()));
        }
        let chi = Chi::new(params.chi.clone())?;
        Ok(Lwe { params, ring, chi })
    }

    pub fn fp(&self) -> Fp {
        self.ring.fp()
    }

    pub fn d(&self) -> usize {
        self.ring.d()
    }

    /// Slot scale `floor(q / 2^beta)`.
    pub fn scale(&self) -> u64 {
        self.params.q >> self.params.beta
    }

    pub fn public_key(&self, a: Vec<u64>, w: Vec<Vec<u64>>) -> Result<PublicKey> {
        check_len(self.d(), a.len())?;
        check_len(self.params.ell, w.len())?;
        for wi in &w {
            check_len(self.d(), wi.len())?;
        }
        let phi = TransposeMap::build(&self.ring, &a)?;
        Ok(PublicKey { a, w, phi })
    }

    pub fn keygen<R: Rng + ?Sized>(&self, rng: &mut R, ops: &mut OpCounter) -> Result<(PublicKey, SecretKey)> {
        let fp = self.fp();
        let d = self.d();
        let a: Vec<u64> = (0..d).map(|_| fp.random(rng)).collect();
        let mut s = Vec::new();
        let mut w = Vec::new();
        for _ in 0..self.params.ell {
            let si = self.chi.sample_vec(&fp, d, rng);
            let ei = self.chi.sample_vec(&fp, d, rng);
            let prod = self.ring.multiply(&a, &si, ops)?;
            ops.add(d);
            w.push(prod.iter().zip(&ei).map(|(x, y)| fp.add(x, y)).collect());
            s.push(si);
        }
        Ok((self.public_key(a, w)?, SecretKey { s }))
    }

    pub fn sample_randomness<R: Rng + ?Sized>(&self, rng: &mut R) -> EncRandomness {
        let fp = self.fp();
        let d = self.d();
        let ell = self.params.ell;
        let mut r = Vec::new();
        let mut e1 = Vec::new();
        for _ in 0..ell {
            r.push(self.chi.sample_vec(&fp, d, rng));
            e1.push(self.chi.sample_vec(&fp, d, rng));
        }
        let e2 = (0..ell).map(|_| self.chi.sample_vec(&fp, ell, rng)).collect();
        EncRandomness { r, e1, e2 }
    }

    /// Encrypts `ell^2` slot values below `2^beta` with given randomness.
    pub fn encrypt_with(
        &self,
        pk: &PublicKey,
        slots: &[u64],
        rnd: &EncRandomness,
        ops: &mut OpCounter,
    ) -> Result<Ciphertext> {
        let ell = self.params.ell;
        check_len(ell * ell, slots.len())?;
        if let Some(&bad) = slots.iter().find(|&&m| m >> self.params.beta != 0) {
            return Err(Error::Config(format!("slot value {bad} exceeds beta bits")));
        }
        let fp = self.fp();
        let delta = self.scale();
        let mut c1 = Vec::with_capacity(ell);
        let mut c2 = Vec::with_capacity(ell);
        for i in 0..ell {
            let t = pk.phi.apply_transpose(&fp, &rnd.r[i], ops);
            ops.add(t.len());
            c1.push(t.iter().zip(&rnd.e1[i]).map(|(x, y)| fp.add(x, y)).collect());
            let row: Vec<u64> = (0..ell)
                .map(|j| {
                    let ip = inner(&fp, &rnd.r[i], &pk.w[j], ops);
                    let m = fp.mul(&delta, &slots[i * ell + j]);
                    ops.add(2);
                    ops.mul(1);
                    fp.add(&fp.add(&ip, &rnd.e2[i][j]), &m)
                })
                .collect();
            c2.push(row);
        }
        Ok(Ciphertext { c1, c2 })
    }

    pub fn encrypt<R: Rng + ?Sized>(
        &self,
        pk: &PublicKey,
        slots: &[u64],
        rng: &mut R,
        ops: &mut OpCounter,
    ) -> Result<Ciphertext> {
        let rnd = self.sample_randomness(rng);
        self.encrypt_with(pk, slots, &rnd, ops)
    }

    /// `p_{ij} = c2_{ij} - <c1_i, s_j>`.
    pub fn phases(&self, sk: &SecretKey, ct: &Ciphertext, ops: &mut OpCounter) -> Result<Vec<u64>> {
        let ell = self.params.ell;
        let fp = self.fp();
        check_len(ell, ct.c1.len())?;
        check_len(ell, ct.c2.len())?;
        check_len(ell, sk.s.len())?;
        let mut out = Vec::with_capacity(ell * ell);
        for i in 0..ell {
            check_len(self.d(), ct.c1[i].len())?;
            check_len(ell, ct.c2[i].len())?;
            for j in 0..ell {
                let ip = inner(&fp, &ct.c1[i], &sk.s[j], ops);
                ops.add(1);
                out.push(fp.sub(&ct.c2[i][j], &ip));
            }
        }
        Ok(out)
    }

    pub fn decrypt(&self, sk: &SecretKey, ct: &Ciphertext, ops: &mut OpCounter) -> Result<Vec<u64>> {
        let q = self.params.q;
        let beta = self.params.beta;
        let phases = self.phases(sk, ct, ops)?;
        if beta == 1 {
            // closer to 0 than to round(q/2)
            let half = q.div_ceil(2);
            return Ok(phases
                .iter()
                .map(|&p| {
                    let d0 = p.min(q - p);
                    let d1 = p.abs_diff(half).min(q - p.abs_diff(half));
                    u64::from(d1 < d0)
                })
                .collect());
        }
        let delta = self.scale() as u128;
        Ok(phases
            .iter()
            .map(|&p| (((2 * p as u128 + delta) / (2 * delta)) as u64) & ((1 << beta) - 1))
            .collect())
    }

    pub fn encrypt_bit<R: Rng + ?Sized>(&self, pk: &PublicKey, mu: bool, rng: &mut R) -> Result<Ciphertext> {
        self.single_bit_only()?;
        self.encrypt(pk, &[u64::from(mu)], rng, &mut OpCounter::new())
    }

    pub fn decrypt_bit(&self, sk: &SecretKey, ct: &Ciphertext) -> Result<bool> {
        self.single_bit_only()?;
        Ok(self.decrypt(sk, ct, &mut OpCounter::new())?[0] == 1)
    }

    fn single_bit_only(&self) -> Result<()> {
        if self.params.beta == 1 && self.params.ell == 1 {
            Ok(())
        } else {
            Err(Error::Config("single-bit calls need beta = ell = 1".into()))
        }
    }
}

/// `beta`-bit slot values from little-endian bits.
pub fn bits_to_slots(bits: &[bool], beta: u32) -> Vec<u64> {
    bits.chunks(beta as usize)
        .map(|c| c.iter().enumerate().fold(0, |acc, (k, &b)| acc | (u64::from(b) << k)))
        .collect()
}

pub fn slots_to_bits(slots: &[u64], beta: u32) -> Vec<bool> {
    slots
        .iter()
        .flat_map(|&s| (0..beta).map(move |k| (s >> k) & 1 == 1))
        .collect()
}

/// Fraction of single-bit decryption failures over `trials` random bits.
pub fn failure_rate<R: Rng + ?Sized>(
    lwe: &Lwe,
    pk: &PublicKey,
    sk: &SecretKey,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut fails = 0usize;
    for _ in 0..trials {
        let mu = rng.gen::<bool>();
        let ct = lwe.encrypt_bit(pk, mu, rng)?;
        if lwe.decrypt_bit(sk, &ct)? != mu {
            fails += 1;
        }
    }
    Ok(fails as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small(chi: ChiSpec, beta: u32, ell: usize) -> Lwe {
        Lwe::new(LweParams {
            q: 10007,
            delta: 4,
            chi,
            beta,
            ell,
            curve_seed: 3,
            failure_target: 0.01,
        })
        .unwrap()
    }

    fn centered(fp: &Fp, v: u64) -> i64 {
        let q = fp.modulus();
        if v > q / 2 {
            v as i64 - q as i64
        } else {
            v as i64
        }
    }

    #[test]
    fn samplers_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for spec in [ChiSpec::Zero, ChiSpec::Binomial { eta: 3 }, ChiSpec::Gaussian { sigma: 2.5 }] {
            let chi = Chi::new(spec).unwrap();
            let xs: Vec<i64> = (0..20000).map(|_| chi.sample(&mut rng)).collect();
            assert!(xs.iter().all(|x| x.abs() <= chi.bound()));
            let mean = xs.iter().sum::<i64>() as f64 / xs.len() as f64;
            let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / xs.len() as f64;
            assert!(mean.abs() < 0.1);
            assert!((var - chi.variance()).abs() <= 0.1 * chi.variance() + 1e-9);
        }
        assert!(Chi::new(ChiSpec::Gaussian { sigma: -1.0 }).is_err());
    }

    #[test]
    fn zero_noise_keygen_and_decryption() {
        let lwe = small(ChiSpec::Zero, 1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (pk, sk) = lwe.keygen(&mut rng, &mut OpCounter::new()).unwrap();
        assert_eq!(pk.w[0], lwe.ring.multiply(&pk.a, &sk.s[0], &mut OpCounter::new()).unwrap());
        for mu in [false, true, false, true] {
            let ct = lwe.encrypt_bit(&pk, mu, &mut rng).unwrap();
            assert_eq!(lwe.decrypt_bit(&sk, &ct).unwrap(), mu);
        }
    }

    #[test]
    fn transpose_is_adjoint() {
        let lwe = small(ChiSpec::Binomial { eta: 2 }, 1, 1);
        let fp = lwe.fp();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (pk, _) = lwe.keygen(&mut rng, &mut OpCounter::new()).unwrap();
        let mut ops = OpCounter::new();
        for _ in 0..20 {
            let x: Vec<u64> = (0..16).map(|_| fp.random(&mut rng)).collect();
            let y: Vec<u64> = (0..16).map(|_| fp.random(&mut rng)).collect();
            let ax = lwe.ring.multiply(&pk.a, &x, &mut ops).unwrap();
            assert_eq!(pk.phi.apply(&fp, &x, &mut ops), ax);
            let aty = pk.phi.apply_transpose(&fp, &y, &mut ops);
            assert_eq!(inner(&fp, &ax, &y, &mut ops), inner(&fp, &x, &aty, &mut ops));
        }
    }

    #[test]
    fn correctness_identity() {
        let lwe = small(ChiSpec::Binomial { eta: 4 }, 1, 1);
        let fp = lwe.fp();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut ops = OpCounter::new();
        let (pk, sk) = lwe.keygen(&mut rng, &mut ops).unwrap();
        let e: Vec<u64> = pk.w[0]
            .iter()
            .zip(lwe.ring.multiply(&pk.a, &sk.s[0], &mut ops).unwrap())
            .map(|(w, p)| fp.sub(w, &p))
            .collect();
        assert!(e.iter().all(|&v| centered(&fp, v).abs() <= 4));
        for mu in [0u64, 1] {
            let rnd = lwe.sample_randomness(&mut rng);
            let ct = lwe.encrypt_with(&pk, &[mu], &rnd, &mut ops).unwrap();
            let p = lwe.phases(&sk, &ct, &mut ops).unwrap()[0];
            let noise = fp.add(
                &fp.sub(&inner(&fp, &rnd.r[0], &e, &mut ops), &inner(&fp, &rnd.e1[0], &sk.s[0], &mut ops)),
                &rnd.e2[0][0],
            );
            assert_eq!(fp.sub(&p, &fp.mul(&mu, &(10007 / 2))), noise);
        }
    }

    #[test]
    fn multi_bit_roundtrip_and_degenerate_case() {
        let lwe = small(ChiSpec::Zero, 4, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut ops = OpCounter::new();
        let (pk, sk) = lwe.keygen(&mut rng, &mut ops).unwrap();
        let bits: Vec<bool> = (0..36).map(|_| rng.gen()).collect();
        let slots = bits_to_slots(&bits, 4);
        let ct = lwe.encrypt(&pk, &slots, &mut rng, &mut ops).unwrap();
        assert_eq!(slots_to_bits(&lwe.decrypt(&sk, &ct, &mut ops).unwrap(), 4), bits);
        assert!(lwe.encrypt(&pk, &[16; 9], &mut rng, &mut ops).is_err());

        let noisy = small(ChiSpec::Binomial { eta: 2 }, 4, 2);
        let (pk, sk) = noisy.keygen(&mut rng, &mut ops).unwrap();
        for _ in 0..20 {
            let slots: Vec<u64> = (0..4).map(|_| rng.gen_range(0..16)).collect();
            let ct = noisy.encrypt(&pk, &slots, &mut rng, &mut ops).unwrap();
            assert_eq!(noisy.decrypt(&sk, &ct, &mut ops).unwrap(), slots);
        }

        // beta = ell = 1 against the single-bit path, same stream
        let single = small(ChiSpec::Binomial { eta: 2 }, 1, 1);
        let (pk, _) = single.keygen(&mut rng, &mut ops).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(6);
        let mut r2 = r1.clone();
        let a = single.encrypt_bit(&pk, true, &mut r1).unwrap();
        let b = single.encrypt(&pk, &[1], &mut r2, &mut ops).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.c2[0][0], {
            let fp = single.fp();
            let rnd = single.sample_randomness(&mut ChaCha8Rng::seed_from_u64(6));
            fp.add(&fp.add(&inner(&fp, &rnd.r[0], &pk.w[0], &mut ops), &rnd.e2[0][0]), &(10007 / 2))
        });
    }

    #[test]
    fn encryption_op_count() {
        let lwe = small(ChiSpec::Binomial { eta: 1 }, 2, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (pk, _) = lwe.keygen(&mut rng, &mut OpCounter::new()).unwrap();
        let mut ops = OpCounter::new();
        lwe.encrypt(&pk, &[1; 16], &mut rng, &mut ops).unwrap();
        let (d, ell) = (16u64, 4u64);
        // ell transposes (2 d^2 + d) plus ell^2 inner products (2d - 1) and 3 slot ops
        assert_eq!(ops.total(), ell * (2 * d * d + d) + ell * ell * (2 * d - 1 + 3));
    }

    #[test]
    fn failure_rate_grows_with_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut rates = Vec::new();
        for sigma in [8.0, 14.0, 20.0] {
            let lwe = small(ChiSpec::Gaussian { sigma }, 1, 1);
            let (pk, sk) = lwe.keygen(&mut rng, &mut OpCounter::new()).unwrap();
            rates.push(failure_rate(&lwe, &pk, &sk, 2000, &mut rng).unwrap());
        }
        assert!(rates[0] <= rates[1] + 0.02 && rates[1] <= rates[2] + 0.02, "{rates:?}");
        assert!(rates[2] > rates[0]);
    }
}
