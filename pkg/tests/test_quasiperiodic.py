import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fractalzeta.analysis import numeric_residue, pole_scan
from fractalzeta.closed_forms import cantor_distance_zeta_form
from fractalzeta.core_model import CantorBlock, UnionOfDescriptors
from fractalzeta.exceptions import DomainError, IndependenceError
from fractalzeta.quasiperiodic import (
    ExponentVector, assembly_form, assembly_numeric, assembly_zeta, build_assembly, exponent_vectors,
    rationally_independent,
)
from fractalzeta.zeta_numeric import distance_zeta_1d


def test_exponent_vector_examples():
    v = exponent_vectors([2, 3])
    assert v[0].primes == (2, 3) and [x.exponents for x in v] == [(1, 0), (0, 1)]
    assert [x.exponents for x in exponent_vectors([6, 12])] == [(1, 1), (2, 1)]
    v = exponent_vectors([2, 4])
    assert v[0].primes == (2,) and [x.exponents for x in v] == [(1,), (2,)]


def test_independence_examples():
    assert rationally_independent(exponent_vectors([2, 3])).independent
    dep = rationally_independent(exponent_vectors([2, 4]))
    assert not dep.independent and dep.dependency == (2, -1)
    res = rationally_independent(exponent_vectors([6, 12, 18]))
    assert not res.independent and res.rank == 2
    vecs = [np.array(v.exponents) for v in exponent_vectors([6, 12, 18])]
    assert not np.any(sum(c * v for c, v in zip(res.dependency, vecs)))


def test_build_assembly_two_three():
    asm = build_assembly(2, 0.5, [2, 3])
    assert [c.params.ratio for c in asm.components] == pytest.approx([1 / 4, 1 / 9], rel=1e-14)
    assert asm.periods == pytest.approx((math.log(4), math.log(9)), rel=1e-14)
    assert all(c.dimension == 0.5 for c in asm.components)
    dims = asm.principal_dims(6.0)
    expected = sorted({k * 2 * math.pi / T for T in (math.log(4), math.log(9)) for k in range(-3, 4)
                       if abs(k * 2 * math.pi / T) <= 6})
    assert len(expected) == 7
    assert [d.imag for d in dims] == pytest.approx(expected)
    assert "conditional" in asm.label


def test_build_assembly_rejects_dependent():
    with pytest.raises(IndependenceError) as exc:
        build_assembly(2, 0.5, [2, 4])
    assert exc.value.certificate.dependency == (2, -1)
    assert "2*e_1 - 1*e_2" in str(exc.value)
    with pytest.raises(IndependenceError):
        build_assembly(3, 0.5, [6, 12, 18])


def test_build_assembly_three_primes():
    asm = build_assembly(3, 0.4, [2, 3, 5])
    assert asm.n == 3 and asm.certificate.independent
    assert len(set(asm.periods)) == 3


def test_build_assembly_argument_errors():
    with pytest.raises(DomainError):
        build_assembly(2, 1.2, [2, 3])
    with pytest.raises(DomainError):
        build_assembly(3, 0.5, [2, 3])


def test_placements_are_disjoint_unit_intervals():
    asm = build_assembly(3, 0.4, [2, 3, 5])
    hulls = asm.placements
    assert all(hi - lo == 1 for lo, hi in hulls)
    assert all(b[0] - a[1] == 1 for a, b in zip(hulls, hulls[1:]))


def test_assembly_zeta_matches_numeric():
    asm = build_assembly(2, 0.5, [2, 3])
    num = assembly_numeric(asm, 0.7, levels=20)
    assert abs(assembly_zeta(asm, 0.7) - num.value) <= 1e-5


def test_residue_at_D_is_sum_of_components():
    asm = build_assembly(2, 0.5, [2, 3])
    form = assembly_form(asm)
    comps = sum(cantor_distance_zeta_form(c.params, 0.5).residue(0.5) for c in asm.components)
    assert abs(numeric_residue(form, 0.5, 0.2) - comps) <= 1e-9
    assert abs(form.residue(0.5) - comps) <= 1e-14


def test_pole_scan_finds_both_lattices():
    asm = build_assembly(2, 0.5, [2, 3])
    poles = pole_scan(assembly_form(asm), (0.3, 0.7, -15, 15))
    expected = asm.principal_dims(15.0)
    assert len(poles) == len(expected)
    for p, q in zip(poles, expected):
        assert abs(p.location - q) <= 1e-6


@settings(max_examples=40, deadline=None)
@given(ms=st.lists(st.integers(2, 60), min_size=2, max_size=4), seed=st.integers(0, 1000))
def test_independence_permutation_symmetric(ms, seed):
    base = rationally_independent(exponent_vectors(ms))
    perm = np.random.default_rng(seed).permutation(len(ms))
    shuffled = rationally_independent(exponent_vectors([ms[i] for i in perm]))
    assert base.independent == shuffled.independent and base.rank == shuffled.rank


@settings(max_examples=40, deadline=None)
@given(ms=st.lists(st.integers(2, 60), min_size=2, max_size=4), i=st.integers(0, 3), j=st.integers(0, 3),
       c=st.integers(-3, 3))
def test_independence_unimodular_invariant(ms, i, j, c):
    vecs = exponent_vectors(ms)
    i, j = i % len(vecs), j % len(vecs)
    if i == j:
        return
    new = list(vecs)
    e = tuple(a + c * b for a, b in zip(vecs[i].exponents, vecs[j].exponents))
    new[i] = ExponentVector(0, vecs[i].primes, e)
    assert rationally_independent(new).rank == rationally_independent(vecs).rank


@settings(max_examples=20, deadline=None)
@given(x=st.floats(0.55, 1.5), y=st.floats(-15, 15))
def test_assembly_conjugate_symmetry(x, y):
    asm = build_assembly(2, 0.5, [2, 3])
    s = complex(x, y)
    assert abs(assembly_zeta(asm, s) - np.conj(assembly_zeta(asm, s.conjugate()))) <= 1e-10 * abs(assembly_zeta(asm, s))


@pytest.mark.parametrize("lam", [0.5, 2.0])
@pytest.mark.parametrize("s", [0.7, 0.9 + 2j, 1.3 - 5j])
def test_assembly_scaling(lam, s):
    asm = build_assembly(2, 0.5, [2, 3])
    blocks = tuple(CantorBlock(c.params, lam * c.offset, lam) for c in asm.components)
    scaled = UnionOfDescriptors(blocks, tuple((lam * lo, lam * hi) for lo, hi in asm.placements))
    lhs = distance_zeta_1d(scaled, 0.5 * lam, s, levels=20).value
    rhs = lam ** s * assembly_zeta(asm, s)
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)
