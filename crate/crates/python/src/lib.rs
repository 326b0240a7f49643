//! Python bindings: towers, rings, Goppa codes, LWE and the NTT.

use ::ellbutterfly as core;
use core::curve::{find_point_not_killed_by, find_torsion_curve, Point};
use core::goppa::GoppaCode;
use core::lwe::{Ciphertext, Lwe, LweParams, PublicKey, SecretKey};
use core::ntt::NttCtx;
use core::ops::OpCounter;
use core::ring::{NormalBasisField, RingCtx};
use core::tower::Tower;
use core::Fp;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

create_exception!(ellbutterfly, EllbutterflyError, PyValueError);

fn err(e: core::Error) -> PyErr {
    EllbutterflyError::new_err(e.to_string())
}

fn fp(p: u64) -> PyResult<Fp> {
    Fp::new(p).map_err(|e| err(e.into()))
}

fn point(p: &Point<u64>) -> Option<(u64, u64)> {
    match p {
        Point::Affine(x, y) => Some((*x, *y)),
        Point::Infinity => None,
    }
}

/// Tables for fast evaluation on `b + <t>` in the `u`-basis.
#[pyclass(name = "Tower", module = "ellbutterfly", frozen)]
struct PyTower(Tower);

#[pymethods]
impl PyTower {
    /// Searches a curve with a point `t` of order `2^delta` and builds the
    /// tower over `b + <t>` (`R + <t>` when `use_r`).
    #[staticmethod]
    #[pyo3(signature = (p, delta, seed = 0, use_r = false))]
    fn search(p: u64, delta: u32, seed: u64, use_r: bool) -> PyResult<Self> {
        let tc = find_torsion_curve(fp(p)?, delta, seed).map_err(err)?;
        let b = if use_r {
            tc.r
        } else {
            find_point_not_killed_by(&tc.curve, 1 << delta, seed ^ 0xb).map_err(err)?
        };
        Ok(PyTower(Tower::build_rational(&tc.curve, &tc.t, &b).map_err(err)?))
    }

    /// Explicit curve `a1..a6`, `t` and rational `b` as `(x, y)` pairs.
    #[staticmethod]
    fn build(p: u64, curve: [u64; 5], t: (u64, u64), b: (u64, u64)) -> PyResult<Self> {
        let e = core::curve::Curve::from_u64(fp(p)?, curve).map_err(err)?;
        let tw = Tower::build_rational(&e, &Point::Affine(t.0, t.1), &Point::Affine(b.0, b.1)).map_err(err)?;
        Ok(PyTower(tw))
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(PyTower(Tower::from_json(s).map_err(err)?))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.curve().field.modulus()
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn delta(&self) -> u32 {
        self.0.delta()
    }

    #[getter]
    fn curve(&self) -> [u64; 5] {
        self.0.curve().coeffs()
    }

    #[getter]
    fn t(&self) -> Option<(u64, u64)> {
        point(self.0.t())
    }

    #[getter]
    fn b(&self) -> Option<(u64, u64)> {
        self.0.b().rational().and_then(point)
    }

    #[getter]
    fn digest(&self) -> String {
        self.0.digest()
    }

    fn evaluate(&self, f: Vec<u64>) -> PyResult<Vec<u64>> {
        self.0.evaluate(&f).map_err(err)
    }

    fn interpolate(&self, values: Vec<u64>) -> PyResult<Vec<u64>> {
        self.0.interpolate(&values).map_err(err)
    }

    fn reduce(&self, f: Vec<u64>) -> PyResult<Vec<u64>> {
        self.0.reduce(&f).map_err(err)
    }

    /// Field operations used by `evaluate`, `interpolate` or `reduce`.
    fn op_count(&self, op: &str, x: Vec<u64>) -> PyResult<u64> {
        let mut ops = OpCounter::new();
        let tw = self.0.view();
        match op {
            "evaluate" => core::butterfly::evaluate(tw, &x, &mut ops),
            "interpolate" => core::butterfly::interpolate(tw, &x, &mut ops),
            "reduce" => core::butterfly::reduce(tw, &x, &mut ops),
            _ => return Err(PyValueError::new_err(format!("unknown op {op:?}"))),
        }
        .map_err(err)?;
        Ok(ops.total())
    }

    /// Number of failed identities at `n` random points (0 when sound).
    #[pyo3(signature = (n = 10, seed = 0))]
    fn verify_identities(&self, n: usize, seed: u64) -> PyResult<usize> {
        Ok(self.0.verify_identities(n, seed).map_err(err)?.failures.len())
    }

    fn __repr__(&self) -> String {
        format!("Tower(p={}, d={})", self.p(), self.d())
    }
}

/// `F_p[u]`-coordinates of functions with the product of pointwise values.
#[pyclass(name = "Ring", module = "ellbutterfly", frozen)]
struct PyRing(RingCtx);

#[pymethods]
impl PyRing {
    /// Omit `tower_r` for the diagonal ring.
    #[new]
    #[pyo3(signature = (tower_b, tower_r = None))]
    fn new(tower_b: &PyTower, tower_r: Option<&PyTower>) -> PyResult<Self> {
        let ring = match tower_r {
            Some(r) => RingCtx::new(tower_b.0.clone(), r.0.clone()),
            None => RingCtx::diagonal(tower_b.0.clone()),
        };
        Ok(PyRing(ring.map_err(err)?))
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    fn one(&self) -> Vec<u64> {
        self.0.one()
    }

    fn multiply(&self, f: Vec<u64>, g: Vec<u64>) -> PyResult<Vec<u64>> {
        self.0.multiply(&f, &g, &mut OpCounter::new()).map_err(err)
    }
}

/// `F_{p^d}` in a normal basis.
#[pyclass(name = "NormalBasisField", module = "ellbutterfly", frozen)]
struct PyNormalBasisField(NormalBasisField);

#[pymethods]
impl PyNormalBasisField {
    #[new]
    #[pyo3(signature = (p, delta, seed = 0, force = false))]
    fn new(p: u64, delta: u32, seed: u64, force: bool) -> PyResult<Self> {
        Ok(PyNormalBasisField(
            NormalBasisField::build(fp(p)?, delta, seed, force).map_err(err)?,
        ))
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        if self.0.is_kummer() {
            "kummer"
        } else {
            "elliptic"
        }
    }

    /// Monic modulus of the polynomial representation, low to high.
    #[getter]
    fn modulus(&self) -> Vec<u64> {
        self.0.ext().modulus().to_vec()
    }

    fn one(&self) -> Vec<u64> {
        self.0.one()
    }

    fn multiply(&self, f: Vec<u64>, g: Vec<u64>) -> PyResult<Vec<u64>> {
        self.0.multiply(&f, &g, &mut OpCounter::new()).map_err(err)
    }

    /// Coefficients of the element in `F_p[X]/(m)`.
    fn to_polynomial(&self, c: Vec<u64>) -> PyResult<Vec<u64>> {
        self.0.to_ext(&c).map_err(err)
    }
}

#[pyclass(name = "GoppaCode", module = "ellbutterfly", frozen)]
struct PyGoppaCode(GoppaCode);

#[pymethods]
impl PyGoppaCode {
    #[new]
    #[pyo3(signature = (p, delta, seed = 0))]
    fn new(p: u64, delta: u32, seed: u64) -> PyResult<Self> {
        Ok(PyGoppaCode(GoppaCode::search(fp(p)?, delta, seed).map_err(err)?))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    fn encode(&self, msg: Vec<u64>) -> PyResult<Vec<u64>> {
        self.0.encode(&msg, &mut OpCounter::new()).map_err(err)
    }

    /// The message, or `None` for a non-codeword.
    fn check(&self, word: Vec<u64>) -> PyResult<Option<Vec<u64>>> {
        self.0.check(&word, &mut OpCounter::new()).map_err(err)
    }
}

#[pyclass(name = "PublicKey", module = "ellbutterfly", frozen)]
struct PyPublicKey(PublicKey);

#[pyclass(name = "SecretKey", module = "ellbutterfly", frozen)]
struct PySecretKey(SecretKey);

#[pyclass(name = "Ciphertext", module = "ellbutterfly", frozen)]
struct PyCiphertext(Ciphertext);

#[pymethods]
impl PyCiphertext {
    #[getter]
    fn c1(&self) -> Vec<Vec<u64>> {
        self.0.c1.clone()
    }

    #[getter]
    fn c2(&self) -> Vec<Vec<u64>> {
        self.0.c2.clone()
    }
}

/// Ring-LWE encryption of `beta`-bit slots.
#[pyclass(name = "Lwe", module = "ellbutterfly")]
struct PyLwe {
    lwe: Lwe,
    rng: ChaCha20Rng,
}

#[pymethods]
impl PyLwe {
    /// Preset `toy` or `guideline`, or parameters as JSON.
    #[new]
    #[pyo3(signature = (preset = "toy", params_json = None, seed = 0))]
    fn new(preset: &str, params_json: Option<&str>, seed: u64) -> PyResult<Self> {
        let params = match params_json {
            Some(s) => serde_json::from_str(s).map_err(|e| PyValueError::new_err(e.to_string()))?,
            None => LweParams::preset(preset).map_err(err)?,
        };
        Ok(PyLwe {
            lwe: Lwe::new(params).map_err(err)?,
            rng: ChaCha20Rng::seed_from_u64(seed),
        })
    }

    #[getter]
    fn q(&self) -> u64 {
        self.lwe.params.q
    }

    #[getter]
    fn d(&self) -> usize {
        self.lwe.d()
    }

    #[getter]
    fn slots(&self) -> usize {
        self.lwe.params.ell * self.lwe.params.ell
    }

    fn params_json(&self) -> String {
        serde_json::to_string(&self.lwe.params).expect("serializable")
    }

    fn keygen(&mut self) -> PyResult<(PyPublicKey, PySecretKey)> {
        let (pk, sk) = self.lwe.keygen(&mut self.rng, &mut OpCounter::new()).map_err(err)?;
        Ok((PyPublicKey(pk), PySecretKey(sk)))
    }

    fn encrypt(&mut self, pk: &PyPublicKey, slots: Vec<u64>) -> PyResult<PyCiphertext> {
        let ct = self
            .lwe
            .encrypt(&pk.0, &slots, &mut self.rng, &mut OpCounter::new())
            .map_err(err)?;
        Ok(PyCiphertext(ct))
    }

    fn decrypt(&self, sk: &PySecretKey, ct: &PyCiphertext) -> PyResult<Vec<u64>> {
        self.lwe.decrypt(&sk.0, &ct.0, &mut OpCounter::new()).map_err(err)
    }
}

/// Forward NTT of length `len(a)` modulo `p`.
#[pyfunction]
fn ntt_forward(p: u64, a: Vec<u64>) -> PyResult<Vec<u64>> {
    let ctx = NttCtx::new(fp(p)?, a.len()).map_err(err)?;
    ctx.forward(&a, &mut OpCounter::new()).map_err(err)
}

#[pyfunction]
fn ntt_inverse(p: u64, a: Vec<u64>) -> PyResult<Vec<u64>> {
    let ctx = NttCtx::new(fp(p)?, a.len()).map_err(err)?;
    ctx.inverse(&a, &mut OpCounter::new()).map_err(err)
}

#[pymodule]
#[pyo3(name = "ellbutterfly")]
fn ellbutterfly_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("EllbutterflyError", m.py().get_type::<EllbutterflyError>())?;
    m.add_class::<PyTower>()?;
    m.add_class::<PyRing>()?;
    m.add_class::<PyNormalBasisField>()?;
    m.add_class::<PyGoppaCode>()?;
    m.add_class::<PyPublicKey>()?;
    m.add_class::<PySecretKey>()?;
    m.add_class::<PyCiphertext>()?;
    m.add_class::<PyLwe>()?;
    m.add_function(wrap_pyfunction!(ntt_forward, m)?)?;
    m.add_function(wrap_pyfunction!(ntt_inverse, m)?)?;
    Ok(())
}
