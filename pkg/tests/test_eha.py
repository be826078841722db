import sympy
from hypothesis import given, strategies as st

from hallpath import combinatorics as cb
from hallpath.eha import e_act, h_poly, psi_coeffs, psi_exponential, psi_rational
from hallpath.polyrep import Vect, apply_word
from hallpath.qtfield import ZERO, g_factored, g_poly
from hallpath.words import e_word

z1, z2 = sympy.symbols("z1 z2")


@given(st.sampled_from(cb.partitions_upto(4)), st.sampled_from("+-"))
def test_psi_two_routes_agree(lam, sign):
    assert psi_rational(sign, lam, 4) == psi_exponential(sign, lam, 4)


def test_psi_coeffs_checked_form():
    vals = psi_coeffs("+", (1,), 3)
    assert len(vals) == 4 and vals[0] != ZERO


def test_h_poly_against_sympy():
    for m in range(-5, 6):
        h = sum(c * z1**a * z2**b for (a, b), c in h_poly(m - 1).items())
        assert sympy.simplify((z1 - z2) * h - (z1**m - z2**m)) == 0


def test_g_expanded_equals_factored():
    assert g_poly() == g_factored()


@given(st.sampled_from(cb.partitions_upto(3)), st.integers(-2, 2))
def test_e_act_is_the_word(lam, m):
    v = Vect.basis(cb_state(lam))
    assert e_act(m, v) == apply_word(e_word(m), v)


def cb_state(lam):
    from hallpath.eha import level0
    return level0(lam)
