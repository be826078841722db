import itertools

import pytest
from hypothesis import given, strategies as st

from hallpath import combinatorics as cb
from hallpath.qtfield import Q, T

PARTS = cb.partitions_upto(6)
partitions = st.sampled_from(PARTS)


def test_partition_counts():
    assert [len(cb.partitions_of(n)) for n in range(9)] == [1, 1, 2, 3, 5, 7, 11, 15, 22]
    assert len(cb.partitions_upto(4)) == 1 + 1 + 2 + 3 + 5


@given(partitions)
def test_addable_and_removable_by_brute_force(lam):
    rows = len(lam) + 1
    cand = [cb.BoxPos(r, c) for r in range(1, rows + 1) for c in range(1, (lam[0] if lam else 0) + 2)]

    def is_partition(parts):
        return all(a >= b for a, b in zip(parts, parts[1:])) and all(p >= 0 for p in parts)

    def bump(x, d):
        parts = list(lam) + [0]
        parts[x.row - 1] += d
        return parts
    add = {x for x in cand if x.col == (lam.part(x.row) + 1) and is_partition(bump(x, 1))}
    rem = {x for x in cand if x.col == lam.part(x.row) and x.col > 0 and is_partition(bump(x, -1))}
    assert set(cb.addable_boxes(lam)) == add
    assert set(cb.removable_boxes(lam)) == rem


@given(partitions)
def test_c_forms_agree(lam):
    for x in cb.addable_boxes(lam):
        assert cb.c_lambda_form(lam, x) == cb.c_product_form(lam, x)


@given(partitions)
def test_cstar_product_matches_shifted_lambda_form(mu):
    for x in cb.removable_boxes(mu):
        assert cb.cstar_coeff(mu, x) == cb.cstar_product_form(mu, x)
        assert cb.cstar_product_form(mu, x) == cb.cstar_lambda_form_shifted(mu, x)


@given(partitions)
def test_cstar_literal_lambda_form_differs_by_one_factor(mu):
    # the literal genus form is the product form times (1 - qt)/(1 - qt x)
    for x in cb.removable_boxes(mu):
        ratio = cb.cstar_product_form(mu, x) / cb.cstar_lambda_form(mu, x)
        assert ratio == (1 - Q * T * x.content) / (1 - Q * T)


@given(partitions)
def test_ratio_lemma_holds_for_literal_form(mu):
    for x in cb.removable_boxes(mu):
        lam = mu.remove(x)
        lhs = cb.c_lambda_form(lam, x) / cb.cstar_lambda_form(mu, x)
        rhs = -(1 - Q) * (1 - T) * cb.d_lambda(mu) / ((1 - Q * T) * cb.d_lambda(lam))
        assert lhs == rhs


@given(partitions)
def test_monodromy(lam):
    for x, y in itertools.permutations(cb.addable_boxes(lam), 2):
        a, b = cb.monodromy_check(lam, x, y)
        assert a == b
    for x, y in itertools.permutations(cb.removable_boxes(lam), 2):
        a, b = cb.dual_monodromy_check(lam, x, y)
        assert a == b


def test_add_remove_inverse_and_errors():
    lam = cb.Partition((3, 1))
    for x in cb.addable_boxes(lam):
        assert lam.add(x).remove(x) == lam
    with pytest.raises(ValueError):
        lam.add(cb.BoxPos(3, 2))
    with pytest.raises(ValueError):
        cb.Partition((1, 2))


def test_exp_identity_series():
    a, b = cb.exp_identity_series(5)
    assert a == b
