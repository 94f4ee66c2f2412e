"""Unions of generalized Cantor sets with a common dimension and incommensurable periods.

Each component is C^(m_i, a_i) with a_i = m_i^(-1/D), so all components share
the box dimension D while their multiplicative periods T_i = log(m_i) / D
are pairwise incommensurable exactly when the exponent vectors of the m_i
over their common primes are linearly independent over the rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .closed_forms import MeromorphicForm, cantor_distance_zeta_form
from .core_model import CantorBlock, GeneralizedCantorParams, UnionOfDescriptors
from .exceptions import DomainError, IndependenceError

#: Half-width of the collars used for every component; blocks are one unit apart.
ASSEMBLY_DELTA = 0.5


@dataclass(frozen=True)
class ExponentVector:
    m: int
    primes: tuple
    exponents: tuple

    def value(self) -> int:
        out = 1
        for p, e in zip(self.primes, self.exponents):
            out *= p ** e
        return out


def _factor(n: int) -> dict:
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def exponent_vectors(m_list) -> list:
    """Prime exponent vectors of each m over the union of their prime factors.

    Examples
    --------
    >>> [v.exponents for v in exponent_vectors([6, 12])]
    [(1, 1), (2, 1)]
    """
    ms = [int(m) for m in m_list]
    if any(m < 2 for m in ms):
        raise DomainError("every m must be an integer >= 2")
    facts = [_factor(m) for m in ms]
    primes = tuple(sorted(set().union(*facts)))
    return [ExponentVector(m, primes, tuple(f.get(p, 0) for p in primes)) for m, f in zip(ms, facts)]


@dataclass(frozen=True)
class IndependenceResult:
    """Outcome of the exact rank test.

    ``echelon`` holds the reduced rows when independent; ``dependency`` holds
    integer coefficients c with sum_i c_i e_i = 0 otherwise.
    """

    independent: bool
    rank: int
    echelon: tuple = ()
    dependency: tuple = ()

    def __bool__(self):
        return self.independent


def rationally_independent(vectors) -> IndependenceResult:
    """Exact rank of the exponent vectors over the rationals.

    Rows are reduced with Fraction arithmetic while tracking the combination
    of original rows, so a zero row directly yields a dependency vector.
    """
    vectors = list(vectors)
    if not vectors:
        raise DomainError("need at least one vector")
    width = len(vectors[0].exponents)
    if any(len(v.exponents) != width or v.primes != vectors[0].primes for v in vectors):
        raise DomainError("vectors must share a prime basis")
    n = len(vectors)
    rows = [[Fraction(e) for e in v.exponents] for v in vectors]
    combo = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    pivot_row = 0
    for col in range(width):
        piv = next((r for r in range(pivot_row, n) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[pivot_row], rows[piv] = rows[piv], rows[pivot_row]
        combo[pivot_row], combo[piv] = combo[piv], combo[pivot_row]
        p = rows[pivot_row][col]
        rows[pivot_row] = [x / p for x in rows[pivot_row]]
        combo[pivot_row] = [x / p for x in combo[pivot_row]]
        for r in range(n):
            if r != pivot_row and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[pivot_row])]
                combo[r] = [x - f * y for x, y in zip(combo[r], combo[pivot_row])]
        pivot_row += 1
    rank = pivot_row
    if rank == n:
        return IndependenceResult(True, rank, echelon=tuple(tuple(r) for r in rows))
    dep = combo[rank]
    lcm = math.lcm(*(x.denominator for x in dep))
    ints = [int(x * lcm) for x in dep]
    g = math.gcd(*ints)
    ints = [x // g for x in ints]
    # make the first nonzero coefficient positive
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return IndependenceResult(False, rank, dependency=tuple(ints))


@dataclass(frozen=True)
class QuasiperiodicAssembly:
    """Components placed in [2(i-1), 2(i-1) + 1], i = 1..n.

    ``label`` records that transcendental quasiperiodicity is conditional on
    the independence certificate; only rational independence is checked.
    """

    components: tuple
    common_D: float
    m_list: tuple
    periods: tuple
    certificate: IndependenceResult
    label: str

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def placements(self) -> tuple:
        return tuple(block.hull for block in self.components)

    @property
    def union(self) -> UnionOfDescriptors:
        return UnionOfDescriptors(self.components, self.placements)

    @property
    def lattice_spacings(self) -> tuple:
        return tuple(2 * math.pi / T for T in self.periods)

    def principal_dims(self, im_max: float) -> list:
        """D + i (union of (2 pi / T_i) Z) with |Im| <= im_max, sorted by imaginary part."""
        ims = set()
        for sp in self.lattice_spacings:
            k = int(math.floor(im_max / sp + 1e-12))
            ims.update(round(j * sp, 12) for j in range(-k, k + 1))
        return [complex(self.common_D, y) for y in sorted(ims)]

    def to_record(self) -> dict:
        return {
            "n": self.n, "D": self.common_D, "m": list(self.m_list),
            "a": [c.params.ratio for c in self.components],
            "periods": list(self.periods),
            "placements": [list(p) for p in self.placements],
            "oscillatory_periods": list(self.lattice_spacings),
            "independent": self.certificate.independent,
            "echelon": [[str(x) for x in row] for row in self.certificate.echelon],
            "label": self.label,
        }


def build_assembly(n: int, D: float, m_list) -> QuasiperiodicAssembly:
    """Quasiperiodic union of n generalized Cantor sets of common dimension D.

    Raises
    ------
    IndependenceError
        When the exponent vectors are rationally dependent; the dependency
        vector is attached as ``certificate``.
    """
    m_list = tuple(int(m) for m in m_list)
    if n < 2 or len(m_list) != n:
        raise DomainError("need n >= 2 and exactly n values of m")
    if not 0 < D < 1:
        raise DomainError("D must lie in (0, 1)")
    cert = rationally_independent(exponent_vectors(m_list))
    if not cert.independent:
        terms = " ".join(f"{'-' if c < 0 else '+'} {abs(c)}*e_{i + 1}"
                         for i, c in enumerate(cert.dependency) if c).lstrip("+ ")
        raise IndependenceError(f"exponent vectors are dependent: {terms} = 0", cert)
    comps = []
    for i, m in enumerate(m_list):
        params = GeneralizedCantorParams.from_dimension(m, D)
        if not params.ratio < 1 / m:
            raise DomainError(f"a_{i + 1} = {params.ratio} is not below 1/m")
        comps.append(CantorBlock(params, offset=2.0 * i))
    periods = tuple(math.log(m) / D for m in m_list)
    label = f"transcendentally {n}-quasiperiodic (conditional on rational independence)"
    return QuasiperiodicAssembly(tuple(comps), float(D), m_list, periods, cert, label)


def _pow(base, s):
    return np.exp(np.asarray(s, dtype=complex) * math.log(base))


def assembly_form(assembly: QuasiperiodicAssembly, delta: float = ASSEMBLY_DELTA) -> MeromorphicForm:
    """Distance zeta function of the union as a sum of component closed forms.

    Each component uses the same delta.  When 2 delta exceeds the unit gap
    between neighbouring blocks, the doubly counted collars are replaced by
    the gap's own contribution; that correction is entire.
    """
    forms = [cantor_distance_zeta_form(c.params, delta) for c in assembly.components]
    hulls = sorted(assembly.placements)
    gaps = [b[0] - a[1] for a, b in zip(hulls, hulls[1:])]
    overlapping = [g for g in gaps if g < 2 * delta]

    def correction(s):
        out = np.zeros_like(np.asarray(s, dtype=complex))
        for g in overlapping:
            out = out + 2 * (_pow(g / 2, s) - _pow(delta, s)) / s
        return out

    def f(s):
        total = sum(form.evaluator(s) for form in forms)
        return total + correction(s) if overlapping else total

    lattices = []
    for form in forms:
        lattices.extend(form.lattices)

    def res(p):
        return sum(form.residue(p) for form in forms if form.is_pole(p))

    return MeromorphicForm(f, (), tuple(lattices), res, name=f"assembly {assembly.m_list}",
                           removable=(0j,), info={"delta": delta, "D": assembly.common_D})


def assembly_zeta(assembly: QuasiperiodicAssembly, s, delta: float = ASSEMBLY_DELTA):
    """Value of the closed-form distance zeta function of the union at s."""
    return assembly_form(assembly, delta)(s)


def assembly_numeric(assembly: QuasiperiodicAssembly, s, delta: float = ASSEMBLY_DELTA, levels: int = 20):
    """Independent evaluation from level sums of the union (see ``distance_zeta_1d``)."""
    from .zeta_numeric import distance_zeta_1d
    return distance_zeta_1d(assembly.union, delta, s, levels=levels)
