//! The three straight-line programs (evaluation, interpolation, reduction)
//! over a precomputed [`Tower`](crate::tower::Tower), and cyclic bidiagonal
//! systems
//!
//! ```text
//! s_0 = b_0 t_0 + c_0 t_{n-1},   s_i = c_i t_{i-1} + b_i t_i.
//! ```

use serde::{Deserialize, Serialize};

use crate::basis::{u_to_v_counted, v_to_u_counted};
use crate::error::{check_len, Error, Result};
use crate::field::{Field, Fp};
use crate::ops::{hadamard, inner, recombine, symmetrize, OpCounter};
use crate::tower::TowerRef;

pub fn bidiagonal_apply(fp: &Fp, b: &[u64], c: &[u64], t: &[u64], ops: &mut OpCounter) -> Vec<u64> {
    let n = t.len();
    ops.mul(2 * n);
    ops.add(n);
    (0..n)
        .map(|i| {
            let prev = t[(i + n - 1) % n];
            fp.add(&fp.mul(&b[i], &t[i]), &fp.mul(&c[i], &prev))
        })
        .collect()
}

/// `prod b - (-1)^n prod c`.
pub fn bidiagonal_det(fp: &Fp, b: &[u64], c: &[u64]) -> u64 {
    let n = b.len();
    let pb = b.iter().fold(1, |a, x| fp.mul(&a, x));
    let pc = c.iter().fold(1, |a, x| fp.mul(&a, x));
    if n.is_multiple_of(2) {
        fp.sub(&pb, &pc)
    } else {
        fp.add(&pb, &pc)
    }
}

/// `sum_k (-1)^(n-1-k) (prod_{l<k} b_l) (prod_{l>k} c_l) / det`, so that
/// `t_{n-1} = <w, s>`. For even `n` this is
/// `-sum_k (-1)^k (prod_{l<k} b_l) (prod_{l>k} c_l) / det`.
fn last_row_weights(fp: &Fp, b: &[u64], c: &[u64], det_inv: u64) -> Vec<u64> {
    let n = b.len();
    let mut suffix = vec![1u64; n + 1];
    for k in (0..n).rev() {
        suffix[k] = fp.mul(&suffix[k + 1], &c[k]);
    }
    let mut prefix = 1u64;
    let mut w = Vec::with_capacity(n);
    for k in 0..n {
        let mut v = fp.mul(&fp.mul(&prefix, &suffix[k + 1]), &det_inv);
        if (n - 1 - k) % 2 == 1 {
            v = fp.neg(&v);
        }
        w.push(v);
        prefix = fp.mul(&prefix, &b[k]);
    }
    w
}

/// Solves `M t = s` in `O(n)`, using the `b`-branch when every `b_i` is
/// invertible and the `c`-branch otherwise.
pub fn bidiagonal_solve(fp: &Fp, b: &[u64], c: &[u64], s: &[u64]) -> Result<Vec<u64>> {
    let n = s.len();
    check_len(n, b.len())?;
    check_len(n, c.len())?;
    if n == 1 {
        let den = fp.add(&b[0], &c[0]);
        return Ok(vec![fp.div(&s[0], &den).map_err(|_| Error::SingularSystem)?]);
    }
    let det = bidiagonal_det(fp, b, c);
    let det_inv = fp.inv(&det).map_err(|_| Error::SingularSystem)?;
    let w = last_row_weights(fp, b, c, det_inv);
    let mut t = vec![0u64; n];
    t[n - 1] = w.iter().zip(s).fold(0, |a, (x, y)| fp.add(&a, &fp.mul(x, y)));
    if b.iter().all(|&x| x != 0) {
        let mut prev = t[n - 1];
        for i in 0..n - 1 {
            t[i] = fp.mul(&fp.sub(&s[i], &fp.mul(&c[i], &prev)), &fp.inv(&b[i])?);
            prev = t[i];
        }
    } else if c.iter().all(|&x| x != 0) {
        for i in (1..n).rev() {
            t[i - 1] = fp.mul(&fp.sub(&s[i], &fp.mul(&b[i], &t[i])), &fp.inv(&c[i])?);
        }
    } else {
        unreachable!("a field with det != 0 has all b_i or all c_i invertible");
    }
    Ok(t)
}

/// Solver with every inverse precomputed (the `b`-branch).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BidiagSolver {
    w: Vec<u64>,
    b_inv: Vec<u64>,
    c: Vec<u64>,
}

impl BidiagSolver {
    pub fn new(fp: &Fp, b: &[u64], c: &[u64]) -> Result<Self> {
        let n = b.len();
        check_len(n, c.len())?;
        let w = if n == 1 {
            vec![fp.inv(&fp.add(&b[0], &c[0])).map_err(|_| Error::SingularSystem)?]
        } else {
            let det_inv = fp.inv(&bidiagonal_det(fp, b, c)).map_err(|_| Error::SingularSystem)?;
            last_row_weights(fp, b, c, det_inv)
        };
        let b_inv = b
            .iter()
            .map(|x| fp.inv(x).map_err(|_| Error::SingularSystem))
            .collect::<Result<_>>()?;
        Ok(BidiagSolver {
            w,
            b_inv,
            c: c.to_vec(),
        })
    }

    pub fn solve(&self, fp: &Fp, s: &[u64], ops: &mut OpCounter) -> Vec<u64> {
        let n = s.len();
        let last = inner(fp, &self.w, s, ops);
        if n == 1 {
            return vec![last];
        }
        ops.mul(2 * (n - 1));
        ops.add(n - 1);
        let mut t = vec![0u64; n];
        let mut prev = last;
        for i in 0..n - 1 {
            t[i] = fp.mul(&fp.sub(&s[i], &fp.mul(&self.c[i], &prev)), &self.b_inv[i]);
            prev = t[i];
        }
        t[n - 1] = last;
        t
    }
}

fn need_rational(tw: &TowerRef) -> Result<()> {
    if tw.levels.iter().all(|l| l.c.theta_b.is_some()) {
        Ok(())
    } else {
        Err(Error::Unavailable(
            "evaluation and interpolation need a rational coset".into(),
        ))
    }
}

/// Values `f(b + lt)` of `f = sum f_l u_l`.
pub fn evaluate(tw: TowerRef, f: &[u64], ops: &mut OpCounter) -> Result<Vec<u64>> {
    check_len(tw.d(), f.len())?;
    need_rational(&tw)?;
    Ok(eval_rec(tw, f, ops))
}

fn eval_rec(tw: TowerRef, f: &[u64], ops: &mut OpCounter) -> Vec<u64> {
    let Some(lv) = tw.top() else {
        return f.to_vec();
    };
    let fp = &tw.fp;
    let c = &lv.c;
    let sub = tw.sub();
    let h = f.len() / 2;
    let (fplus, g) = symmetrize(fp, f, ops);
    let ap = eval_rec(sub, &fplus, ops);
    let r = fp.add(&fp.mul(&c.b[0], &g[0]), &fp.mul(&c.c[0], &g[h - 1]));
    ops.mul(2);
    ops.add(1);
    let t = if h > 1 {
        let nm = fp.sub(&c.n_q[h - 1], &c.m_q[h - 1]);
        let s = fp.add(&fp.mul(&c.m_q[0], &g[0]), &fp.mul(&nm, &g[h - 1]));
        ops.mul(2);
        ops.add(3);
        fp.sub(&s, &inner(fp, &c.n_q, &g, ops))
    } else {
        0
    };
    let mut s = bidiagonal_apply(fp, &c.b, &c.c, &g, ops);
    s[0] = t;
    let s = v_to_u_counted(fp, &c.a_q, &s, ops);
    let am = eval_rec(sub, &s, ops);
    let xq = c.x_q.as_ref().expect("checked rational");
    let ti = c.theta_b_inv.as_ref().expect("checked rational");
    ops.mul(2 * h);
    ops.add(h);
    let am: Vec<u64> = (0..h)
        .map(|l| fp.mul(&fp.add(&am[l], &fp.mul(&r, &xq[l])), &ti[l]))
        .collect();
    recombine(fp, &ap, &am, ops)
}

/// `u`-coordinates of the `f` with `f(b + lt) = alpha_l`.
pub fn interpolate(tw: TowerRef, alpha: &[u64], ops: &mut OpCounter) -> Result<Vec<u64>> {
    check_len(tw.d(), alpha.len())?;
    need_rational(&tw)?;
    Ok(interp_rec(tw, alpha, ops))
}

fn interp_rec(tw: TowerRef, alpha: &[u64], ops: &mut OpCounter) -> Vec<u64> {
    let Some(lv) = tw.top() else {
        return alpha.to_vec();
    };
    let fp = &tw.fp;
    let c = &lv.c;
    let sub = tw.sub();
    let h = alpha.len() / 2;
    let (ap, am) = symmetrize(fp, alpha, ops);
    let fplus = interp_rec(sub, &ap, ops);
    let am1 = hadamard(fp, c.theta_b.as_ref().expect("checked rational"), &am, ops);
    let fm = interp_rec(sub, &am1, ops);
    let mut fm = u_to_v_counted(fp, &c.a_q, &fm, ops);
    let fs = inner(fp, &c.v_q, &fm, ops);
    ops.mul(h);
    ops.add(h - 1);
    for l in 1..h {
        fm[l] = fp.sub(&fm[l], &fp.mul(&fs, &c.xi[l]));
    }
    fm[0] = fp.neg(&fp.mul(&c.xi[0], &fs));
    let fm = c.solver.solve(fp, &fm, ops);
    recombine(fp, &fplus, &fm, ops)
}

/// `u`-coordinates of the `f` in `L(<t>)` agreeing with `F = sum F_l x_l`
/// on `b + <t>`.
pub fn reduce(tw: TowerRef, fx: &[u64], ops: &mut OpCounter) -> Result<Vec<u64>> {
    check_len(tw.d(), fx.len())?;
    Ok(reduce_rec(tw, fx, ops))
}

fn reduce_rec(tw: TowerRef, fx: &[u64], ops: &mut OpCounter) -> Vec<u64> {
    let fp = &tw.fp;
    let Some(lv) = tw.top() else {
        ops.mul(fx.len());
        return fx.iter().map(|v| fp.mul(&tw.bottom_x, v)).collect();
    };
    let c = &lv.c;
    let sub = tw.sub();
    let d = fx.len();
    let h = d / 2;
    let (fplus_in, g) = symmetrize(fp, fx, ops);
    let sum = fplus_in.iter().fold(0, |a, x| fp.add(&a, x));
    let fstar = fp.mul(&c.x_t, &sum);
    ops.add(h);
    ops.mul(1);
    let fplus: Vec<u64> = reduce_rec(sub, &fplus_in, ops)
        .iter()
        .map(|v| fp.add(v, &fstar))
        .collect();
    let fg = hadamard(fp, &c.f, &g, ops);
    let f1u = reduce_rec(sub, &fg, ops);
    let mut f1 = u_to_v_counted(fp, &c.a_q, &f1u, ops);
    ops.mul(2 * h);
    ops.add(2 * h);
    for l in 0..h {
        let extra = fp.add(&fp.mul(&c.e[l], &g[l]), &fp.mul(&g[0], &c.h[l]));
        f1[l] = fp.add(&f1[l], &extra);
    }
    let pg = inner(fp, &c.p, &g, ops);
    f1[0] = fp.sub(&fp.add(&f1[0], &fp.mul(&c.p_star, &g[0])), &pg);
    ops.mul(1);
    ops.add(2);
    let fs = inner(fp, &c.v_q, &f1, ops);
    // v-coordinates of the T-odd part
    let mut cv: Vec<u64> = c.l.iter().map(|v| fp.mul(v, &fs)).collect();
    ops.mul(d + (h - 1));
    ops.add(3 * (h - 1));
    for k in 1..h {
        let w = fp.mul(&c.i[k], &f1[k]);
        cv[0] = fp.add(&cv[0], &f1[k]);
        cv[k] = fp.add(&cv[k], &w);
        cv[k + h] = fp.sub(&cv[k + h], &w);
    }
    // g_m = (1/2) sum_{l=m+1}^{m+h} cv_l
    let half = fp.half();
    let mut win = cv[1..=h].iter().fold(0, |a, x| fp.add(&a, x));
    let mut gm = Vec::with_capacity(h);
    for m in 0..h {
        gm.push(fp.mul(&half, &win));
        win = fp.add(&fp.sub(&win, &cv[m + 1]), &cv[(m + 1 + h) % d]);
    }
    ops.add(h + 2 * h);
    ops.mul(h);
    recombine(fp, &fplus, &gm, ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisTag;
    use crate::curve::find_torsion_curve;
    use crate::linalg;
    use crate::tower::Tower;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(fp: &Fp, n: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
        (0..n).map(|_| fp.random(rng)).collect()
    }

    fn dense(b: &[u64], c: &[u64]) -> Vec<Vec<u64>> {
        let n = b.len();
        let mut m = vec![vec![0u64; n]; n];
        for i in 0..n {
            m[i][i] = b[i];
            let j = (i + n - 1) % n;
            m[i][j] = if n == 1 { b[i] + c[i] } else { c[i] };
        }
        m
    }

    #[test]
    fn bidiagonal_examples() {
        let fp = Fp::new(13).unwrap();
        let mut ops = OpCounter::new();
        assert_eq!(bidiagonal_apply(&fp, &[1; 4], &[0; 4], &[3, 1, 4, 1], &mut ops), vec![3, 1, 4, 1]);
        assert_eq!(bidiagonal_solve(&fp, &[1; 4], &[0; 4], &[3, 1, 4, 1]).unwrap(), vec![3, 1, 4, 1]);
        assert_eq!(bidiagonal_apply(&fp, &[2, 3], &[5, 7], &[1, 0], &mut ops), vec![2, 7]);
    }

    #[test]
    fn bidiagonal_solve_roundtrip_and_dense() {
        let fp = Fp::new(1000000007).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut ops = OpCounter::new();
        for n in 1..=64 {
            for _ in 0..3 {
                let mut b = rand_vec(&fp, n, &mut rng);
                let c = rand_vec(&fp, n, &mut rng);
                if rng.gen_bool(0.3) && n > 1 {
                    b[rng.gen_range(0..n)] = 0;
                }
                let t = rand_vec(&fp, n, &mut rng);
                let s = bidiagonal_apply(&fp, &b, &c, &t, &mut ops);
                assert_eq!(bidiagonal_solve(&fp, &b, &c, &s).unwrap(), t);
                if b.iter().all(|&x| x != 0) {
                    let sv = BidiagSolver::new(&fp, &b, &c).unwrap();
                    assert_eq!(sv.solve(&fp, &s, &mut ops), t);
                }
                if n == 8 {
                    assert_eq!(linalg::solve(&fp, &dense(&b, &c), &s).unwrap(), t);
                }
            }
        }
        assert_eq!(bidiagonal_solve(&fp, &[1, 1], &[1, 1], &[1, 2]), Err(Error::SingularSystem));
    }

    #[test]
    fn determinant_matches_cofactor() {
        let fp = Fp::new(10007).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..=4 {
            for _ in 0..20 {
                let b = rand_vec(&fp, n, &mut rng);
                let c = rand_vec(&fp, n, &mut rng);
                assert_eq!(bidiagonal_det(&fp, &b, &c), linalg::det_cofactor(&fp, &dense(&b, &c)));
            }
        }
    }

    fn setup(p: u64, delta: u32, seed: u64) -> Tower {
        let tc = find_torsion_curve(Fp::new(p).unwrap(), delta, seed).unwrap();
        Tower::build_rational(&tc.curve, &tc.t, &tc.r).unwrap()
    }

    #[test]
    fn butterflies_match_oracles() {
        for (p, delta, seed) in [(10007, 1, 1), (10007, 2, 2), (10007, 3, 3), (1000000007, 4, 4), (998244353, 5, 5)] {
            let tw = setup(p, delta, seed);
            let fp = tw.fp;
            let bc = tw.basis();
            let pts = tw.coset().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = tw.d();
            for _ in 0..5 {
                let f = rand_vec(&fp, d, &mut rng);
                assert_eq!(tw.evaluate(&f).unwrap(), bc.evaluate(BasisTag::U, &f, &pts).unwrap(), "eval d={d}");
                assert_eq!(tw.interpolate(&f).unwrap(), bc.interpolate(&f, &pts).unwrap(), "interp d={d}");
                assert_eq!(tw.reduce(&f).unwrap(), bc.reduce(&f, &pts).unwrap(), "reduce d={d}");
            }
            assert_eq!(tw.evaluate(&vec![1; d]).unwrap(), vec![1; d]);
            assert_eq!(tw.interpolate(&vec![1; d]).unwrap(), vec![1; d]);
            assert_eq!(tw.reduce(&vec![0; d]).unwrap(), vec![0; d]);
        }
    }

    #[test]
    fn roundtrip_large() {
        let tw = setup(998244353, 10, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = rand_vec(&tw.fp, 1024, &mut rng);
        assert_eq!(tw.interpolate(&tw.evaluate(&f).unwrap()).unwrap(), f);
        assert_eq!(tw.evaluate(&tw.interpolate(&f).unwrap()).unwrap(), f);
    }

    #[test]
    fn linearity() {
        let tw = setup(10007, 4, 9);
        let fp = tw.fp;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let f = rand_vec(&fp, 16, &mut rng);
        let g = rand_vec(&fp, 16, &mut rng);
        let (l, m) = (fp.random(&mut rng), fp.random(&mut rng));
        let comb = |a: &[u64], b: &[u64]| -> Vec<u64> {
            a.iter().zip(b).map(|(x, y)| fp.add(&fp.mul(&l, x), &fp.mul(&m, y))).collect()
        };
        let h = comb(&f, &g);
        type Op = fn(&Tower, &[u64]) -> Result<Vec<u64>>;
        let progs: [Op; 3] = [Tower::evaluate, Tower::interpolate, Tower::reduce];
        for op in progs {
            assert_eq!(op(&tw, &h).unwrap(), comb(&op(&tw, &f).unwrap(), &op(&tw, &g).unwrap()));
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let tw = setup(10007, 2, 11);
        assert!(matches!(tw.evaluate(&[1, 2]), Err(Error::Length { .. })));
    }
}
