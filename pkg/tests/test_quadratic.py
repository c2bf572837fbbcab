import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from twoclass.arith import is_perfect_square, is_squarefree, kronecker
from twoclass.quadratic import (
    QuadForm,
    check_fundamental,
    class_data,
    class_number_imaginary,
    class_number_real,
    fundamental_discriminant,
    fundamental_unit,
    h2,
    reduced_forms_imaginary,
    unit_nonsquare_values,
)

SQUAREFREE = [d for d in range(2, 200) if is_squarefree(d)]


PELL_SEARCH = 20000


def _pell_oracle(d):
    """Smallest unit > 1 by direct search over Y <= PELL_SEARCH, or None.

    Units are (X + Y sqrt d)/2 with X^2 - d Y^2 = +-4 when d = 1 mod 4, else X + Y sqrt d.
    """
    half = d % 4 == 1
    for y in range(1, PELL_SEARCH + 1):
        for sign in (-1, 1):
            X2 = d * y * y + (4 * sign if half else sign)
            X = is_perfect_square(X2) if X2 > 0 else None
            if X is not None:
                return (X, y, 2, sign) if half else (X, y, 1, sign)
    return None


@pytest.mark.parametrize("d", SQUAREFREE)
def test_fundamental_unit_matches_search(d):
    u = fundamental_unit(d)
    assert u.check()
    found = _pell_oracle(d)
    if found is None:
        # the unit lies beyond the search window
        assert u.y_num > PELL_SEARCH
        return
    X, Y, den, norm = found
    if den == 2 and X % 2 == 0:
        X, Y, den = X // 2, Y // 2, 1
    assert (u.x_num, u.y_num, u.denom, u.norm) == (X, Y, den, norm)


def test_unit_examples():
    assert str(fundamental_unit(2)) == "1 + 1*sqrt(2)"
    u = fundamental_unit(33)
    assert (u.x_num, u.y_num, u.denom, u.norm) == (23, 4, 1, 1)
    u = fundamental_unit(5)
    assert (u.x_num, u.y_num, u.denom, u.norm) == (1, 1, 2, -1)
    u = fundamental_unit(66)
    assert (u.x_num, u.y_num, u.norm) == (65, 8, 1)
    with pytest.raises(ValueError):
        fundamental_unit(12)
    with pytest.raises(ValueError):
        fundamental_unit(1)


def _forms_b_outer(D):
    """Reduced positive definite forms of discriminant D < 0, enumerated b first."""
    count = 0
    bmax = math.isqrt(-D // 3)
    for b in range(-bmax, bmax + 1):
        if (b - D) % 2:
            continue
        n = (b * b - D) // 4
        for a in range(max(1, abs(b)), math.isqrt(n) + 1):
            if n % a:
                continue
            c = n // a
            if c < a or (b < 0 and (abs(b) == a or a == c)):
                continue
            if math.gcd(math.gcd(a, abs(b)), c) == 1:
                count += 1
    return count


def _fundamental_discs(lo, hi):
    out = []
    for D in range(lo, hi):
        try:
            check_fundamental(D)
        except ValueError:
            continue
        out.append(D)
    return out


def test_imaginary_class_numbers_two_orders():
    for D in _fundamental_discs(-3000, -2):
        assert class_number_imaginary(D) == _forms_b_outer(D), D


def test_imaginary_class_numbers_analytic():
    # h = -(1/|D|) sum a chi(a) for D < -4
    for D in _fundamental_discs(-1500, -4):
        s = sum(a * kronecker(D, a) for a in range(1, -D))
        assert class_number_imaginary(D) == -s // -D


def test_real_class_numbers_analytic():
    # h * log(eps) = -(1/2) sum chi(a) log sin(pi a / D)
    for D in _fundamental_discs(5, 1200):
        d = D if D % 4 == 1 else D // 4
        u = fundamental_unit(d)
        eps = (u.x_num + u.y_num * math.sqrt(d)) / u.denom
        s = -0.5 * sum(kronecker(D, a) * math.log(math.sin(math.pi * a / D)) for a in range(1, D))
        h_narrow, h_wide = class_number_real(D)
        assert round(s / math.log(eps)) == h_wide, D
        assert h_narrow == (2 * h_wide if u.norm == 1 else h_wide)


def test_class_number_examples():
    assert class_number_imaginary(-4) == 1
    assert class_number_imaginary(-132) == 4
    assert class_number_imaginary(-264) == 8
    assert class_number_real(8) == (1, 1)
    assert class_number_real(264) == (4, 2)
    assert class_number_real(12) == (2, 1)
    with pytest.raises(ValueError):
        class_number_imaginary(-16)


def test_class_data_examples():
    cd = class_data(-66)
    assert (cd.disc, cd.h2, cd.m) == (-264, 8, 3)
    assert class_data(6).h_wide == 1
    assert class_data(-33).m == 2
    cd = class_data(-146)
    assert (cd.h_wide, cd.m) == (16, 4)
    assert h2(3) == 1


def test_reduced_forms_are_reduced_and_distinct():
    forms = reduced_forms_imaginary(-264)
    assert len(forms) == 8
    assert all(f.is_reduced() and f.disc == -264 for f in forms)
    assert len(set(forms)) == 8


def test_rho_preserves_discriminant():
    f = QuadForm(1, 16, -2)
    for _ in range(6):
        f = f.rho()
        assert f.disc == 264


def test_fundamental_discriminant():
    assert fundamental_discriminant(3) == 12
    assert fundamental_discriminant(5) == 5
    assert fundamental_discriminant(-66) == -264
    assert fundamental_discriminant(-3) == -3


def test_quadratic_table_small():
    ps = [3, 7, 11, 19, 23, 31, 43]
    for q in ps:
        assert h2(q) == h2(-q) == h2(2 * q) == 1
        if q % 8 == 3:
            assert h2(-2 * q) == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5000).filter(is_squarefree))
def test_unit_nonsquare_values(d):
    for label, v in unit_nonsquare_values(d).items():
        assert is_perfect_square(v) is None, (d, label)


def test_unit_nonsquare_random_sample():
    rng = random.Random(11)
    ds = [d for d in range(2, 20000) if is_squarefree(d)]
    for d in rng.sample(ds, 100):
        for label, v in unit_nonsquare_values(d).items():
            assert is_perfect_square(v) is None, (d, label)
