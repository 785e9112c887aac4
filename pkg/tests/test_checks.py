import numpy as np
import pytest

from nervess.checks import (check_d_squared, check_instance, check_leibniz, random_instance,
                            run_random_checks)
from nervess.exactla import SparseMatrix, as_field
from nervess.simpl import box_product, cyclic_group, nerve, random_poset_nerve
from nervess.totss import DoubleComplex, TotalComplex


# the structural suite: 100 seeded instances over three fields
@pytest.mark.parametrize("seed, count, field", [(11, 40, 2), (12, 40, 3), (13, 20, 0)])
def test_random_structural_suite(seed, count, field):
    out = run_random_checks(seed, count, field)
    assert out["count"] == count
    bad = [i for i in out["instances"] if not i["ok"]]
    assert out["failures"] == 0, bad
    assert len(out["instances"]) == count


def test_random_instances_are_deterministic():
    a = run_random_checks(5, 4, 3)
    b = run_random_checks(5, 4, 3)
    assert a == b


def test_random_instance_kinds_cover_generators():
    kinds = {random_instance(s)[0].split()[0] for s in range(60)}
    assert {"groupoid", "poset", "nerve", "constant"} <= kinds


def test_check_instance_counts():
    name, b, rng = random_instance(3)
    info = check_instance(b, 3, rng)
    assert info["leibniz_pairs"] > 0
    assert info["dims"][0] >= 1


# mutation sanity: the checks must notice a broken sign

def _negated(M):
    rows, cols, vals = M._coo()
    vals = [-v for v in vals] if isinstance(vals, list) else -np.asarray(vals)
    return SparseMatrix.from_coo(M.field, M.nrows, M.ncols, rows, cols, vals)


def _test_complex(field):
    rng = np.random.default_rng(0)
    b = box_product(nerve(cyclic_group(3), 3), random_poset_nerve(rng, 3, 3))
    return DoubleComplex(b, as_field(field))


def test_mutation_vertical_sign_is_caught(monkeypatch):
    dc = _test_complex(3)
    assert check_d_squared(TotalComplex(dc))
    orig = DoubleComplex.dv

    # cancel the (-1)^p in front of d^v
    def bad_dv(self, p, q):
        M = orig(self, p, q)
        return _negated(M) if p % 2 else M
    monkeypatch.setattr(DoubleComplex, "dv", bad_dv)
    dc = _test_complex(3)
    with pytest.raises(AssertionError, match="delta"):
        check_d_squared(TotalComplex(dc))


def test_mutation_cup_sign_is_caught(monkeypatch):
    F = as_field(3)
    dc = _test_complex(3)
    check_leibniz(TotalComplex(dc), np.random.default_rng(1))
    orig = DoubleComplex.cup_T

    # drop the (-1)^{q p'} sign of the product
    def bad_cup(self, w, p, q, e, p2, q2):
        out = orig(self, w, p, q, e, p2, q2)
        if (q * p2) % 2:
            out = (-out) % F.p
        return out
    monkeypatch.setattr(DoubleComplex, "cup_T", bad_cup)
    dc = _test_complex(3)
    with pytest.raises(AssertionError, match="Leibniz"):
        check_leibniz(TotalComplex(dc), np.random.default_rng(1), trials=5)


def test_mutation_horizontal_face_is_caught(monkeypatch):
    dc = _test_complex(0)
    orig = DoubleComplex.dh

    # a d^h that is no longer a differential
    def bad_dh(self, p, q):
        M = orig(self, p, q)
        return _negated(M) if (p, q) == (1, 0) else M
    monkeypatch.setattr(DoubleComplex, "dh", bad_dh)
    dc = _test_complex(0)
    with pytest.raises(AssertionError):
        dc.check()
