"""Smoke test of the Python bindings.

    pip install --no-build-isolation -e crates/python
    python python/smoke_test.py
"""

import json
import random

import ellbutterfly as eb


def polymulmod(a, b, m, p):
    """a * b mod the monic m over F_p, coefficients low to high."""
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    n = len(m) - 1
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n + 1):
                prod[k - n + i] = (prod[k - n + i] - c * m[i]) % p
    return (prod + [0] * n)[:n]


def main():
    rng = random.Random(7)
    p = 998244353

    tw = eb.Tower.search(p, 5, seed=3)
    d = tw.d
    f = [rng.randrange(p) for _ in range(d)]
    vals = tw.evaluate(f)
    assert tw.interpolate(vals) == f
    assert tw.verify_identities(5) == 0
    again = eb.Tower.from_json(tw.to_json())
    assert again.digest == tw.digest and again.evaluate(f) == vals
    bad = json.loads(tw.to_json())
    bad["p"] += 2
    try:
        eb.Tower.from_json(json.dumps(bad))
        raise AssertionError("tampered tower accepted")
    except eb.EllbutterflyError:
        pass
    print(f"tower: {tw!r}, {tw.op_count('evaluate', f)} ops to evaluate")

    tr = eb.Tower.search(p, 5, seed=3, use_r=True)
    ring = eb.Ring(tw, tr)
    g = [rng.randrange(p) for _ in range(d)]
    fg = ring.multiply(f, g)
    vg = tw.evaluate(g)
    assert tw.evaluate(fg) == [x * y % p for x, y in zip(vals, vg)]
    assert ring.multiply(f, ring.one()) == f
    print(f"ring: d = {ring.d} product matches pointwise values")

    a = [rng.randrange(p) for _ in range(d)]
    assert eb.ntt_inverse(p, eb.ntt_forward(p, a)) == a

    code = eb.GoppaCode(10007, 3, seed=1)
    msg = [1, 2, 3, 4]
    word = code.encode(msg)
    assert code.check(word) == msg
    word[0] = (word[0] + 1) % 10007
    assert code.check(word) is None
    print(f"goppa: [{code.n}, {code.k}] code round trip")

    q = 100003
    nb = eb.NormalBasisField(q, 2, seed=5)
    m = nb.modulus
    assert nb.to_polynomial(nb.one()) == [1] + [0] * (nb.d - 1)
    for _ in range(5):
        x = [rng.randrange(q) for _ in range(nb.d)]
        y = [rng.randrange(q) for _ in range(nb.d)]
        px, py = nb.to_polynomial(x), nb.to_polynomial(y)
        assert nb.to_polynomial(nb.multiply(x, y)) == polymulmod(px, py, m, q)
    print(f"normal basis: F_{q}^{nb.d} ({nb.kind})")

    lwe = eb.Lwe("toy", seed=11)
    pk, sk = lwe.keygen()
    for bit in [0, 1, 1, 0, 1]:
        assert lwe.decrypt(sk, lwe.encrypt(pk, [bit])) == [bit]
    print(f"lwe: q = {lwe.q}, d = {lwe.d}, 5 bits round trip")
    print("smoke test ok")


if __name__ == "__main__":
    main()
