from __future__ import annotations

import pytest

from ellischub.bottsamelson import (H, KLTViolation, bs_local_class, boundary_multiplicities,
                                    enumerate_fixed_points, fixed_point, local_klt_class, point_mults)
from ellischub.exactseries import UsageError, mono
from ellischub.rootdata import build_root_datum
from ellischub.theta import delta


def test_fixed_points_are_01_words():
    d = build_root_datum("a2")
    pts = enumerate_fixed_points(d, (1, 2, 1))
    assert len(pts) == 8
    assert {str(x) for x in pts} == {f"{a}{b}{c}" for a in "01" for b in "01" for c in "01"}
    images = [x.image for x in pts]
    assert images.count(d.group.longest()) == 1
    assert images.count(d.group.identity) == 2


def test_non_reduced_word_rejected():
    with pytest.raises(UsageError):
        enumerate_fixed_points(build_root_datum("a2"), (1, 1))
    with pytest.raises(UsageError):
        fixed_point(build_root_datum("a2"), (1, 2), (1, 2))


def test_boundary_multiplicities_a2():
    d = build_root_datum("a2")
    assert boundary_multiplicities(d, (1, 2)) == (mono("mu3/mu1"), mono("mu3/mu2"))


def test_klt_violation():
    with pytest.raises(KLTViolation):
        local_klt_class([mono("z1")], [H])
    assert local_klt_class([mono("z1")], [mono("mu1")]).structural_key() == delta("z1", "h/mu1").structural_key()


@pytest.mark.parametrize("name", ["a2", "c2"])
def test_one_letter_recursion_matches_klt_product(name, checker):
    # the recursive class is the KLT product at the fixed point
    d = build_root_datum(name)
    word = d.group.longest().word
    for x in enumerate_fixed_points(d, word):
        assert checker.equal(bs_local_class(d, x), local_klt_class(x.tangent_chars, point_mults(x)))
