import json

import pytest

from twoclass.tower import (
    STRUCTURE_PROVENANCE,
    OnePrime,
    OutOfHypothesis,
    TwoPrimes,
    Unsupported,
    classify_d,
    pi_candidates,
    predict,
)
from twoclass.unit_lattice import HypothesisError


def test_classify():
    assert classify_d(33) == TwoPrimes(3, 11)
    assert classify_d(73) == OnePrime(73)
    assert classify_d(41) == Unsupported("quartic symbol -1")
    assert classify_d(17) == Unsupported("mod-16 class (need p = 9 mod 16)")
    assert isinstance(classify_d(21), Unsupported)
    assert isinstance(classify_d(3 * 11 * 19), Unsupported)
    with pytest.raises(ValueError):
        classify_d(12)


@pytest.mark.parametrize("n", range(1, 6))
def test_predict_two_primes(n):
    p = predict(33, n)
    assert p.cl2_type == (2, 2 ** (n + 1))
    assert p.tower_length == (1,)
    assert p.capitulation_per_quad_ext == {"abelian": 4}
    assert p.h2_genus == 2 ** (n + 1)
    assert p.provenance == STRUCTURE_PROVENANCE


def test_predict_one_prime():
    p = predict(73, 1)
    assert (p.cl2_type, p.m, p.galois_label) == ((2, 8), 4, "abelian(Z/2 x Z/8)")
    p = predict(73, 2)
    assert p.tower_length == (1, 2)
    assert p.galois_label == "abelian_or_modular"


def test_predict_rejects():
    for d in (41, 17):
        with pytest.raises(HypothesisError):
            predict(d, 1)
    with pytest.raises(ValueError):
        predict(33, 0)
    assert issubclass(OutOfHypothesis, ValueError)


def test_prediction_json():
    data = predict(33, 1).to_json()
    assert data["cl2_type"] == ["2", "4"]
    assert data["cl2_provenance"] == "cited structure theorem"
    json.dumps(data)


def test_pi_candidates():
    pc = pi_candidates(73)
    assert set(pc.gaussian) == {"3 + 8i", "3 - 8i"}
    assert set(pc.real_quad) == {"19 + 12*sqrt(2)", "19 - 12*sqrt(2)"}
    assert pc.norms_ok() and pc.congruence_ok()
    assert pc.selection == "undetermined"
    for p in (41, 17, 71):
        with pytest.raises(HypothesisError):
            pi_candidates(p)


def test_pi_candidates_scan():
    from twoclass.arith import primes_upto, quartic_residue_2

    for p in primes_upto(3000):
        if p % 16 == 9 and quartic_residue_2(p) == 1:
            assert pi_candidates(p).norms_ok()
