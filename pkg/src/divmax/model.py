"""Exponential family models: loading, validation, kernel bases, moment map."""

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _exact


class InvalidModelError(ValueError):
    """Malformed model data (bad matrix, reference measure, permutation)."""


class StructuralError(ValueError):
    """Model violates a structural assumption (constant row not in the row span)."""


@dataclass(frozen=True)
class ExponentialFamilyModel:
    name: str
    states: tuple
    A: tuple          # h x N integer matrix, row-major
    r: tuple          # N strictly positive Fractions
    symmetry_generators: tuple

    @property
    def n_states(self):
        return len(self.states)

    @property
    def h(self):
        return len(self.A)


@dataclass(frozen=True)
class KernelBasis:
    vectors: tuple    # k integer vectors of length N
    rank_a: int

    @property
    def dim(self):
        return len(self.vectors)

    def matrix(self):
        n = len(self.vectors[0]) if self.vectors else 0
        return np.array(self.vectors, dtype=float).reshape(len(self.vectors), n)


def make_model(data):
    """Validate a model dict and build an ExponentialFamilyModel."""
    try:
        name = str(data["name"])
        states = [str(s) for s in data["states"]]
        a_rows = data["A"]
        r_raw = data["r"]
        gens = data.get("symmetry_generators", [])
    except (KeyError, TypeError) as exc:
        raise InvalidModelError(f"missing or malformed field: {exc}") from exc
    n = len(states)
    if n == 0:
        raise InvalidModelError("model needs at least one state")
    mat = []
    for i, row in enumerate(a_rows):
        if len(row) != n:
            raise InvalidModelError(f"row {i} of A has {len(row)} entries, expected {n}")
        for v in row:
            if v != int(v):
                raise InvalidModelError(f"non-integer entry {v!r} in row {i} of A")
        mat.append(tuple(int(v) for v in row))
    if not mat:
        raise InvalidModelError("A has no rows")
    if len(r_raw) != n:
        raise InvalidModelError(f"r has {len(r_raw)} entries, expected {n}")
    r = []
    for x, v in enumerate(r_raw):
        try:
            rv = Fraction(v)
        except (ValueError, TypeError) as exc:
            raise InvalidModelError(f"bad reference measure entry {v!r}") from exc
        if rv <= 0:
            raise InvalidModelError(
                f"reference measure must be strictly positive (state {states[x]})"
            )
        r.append(rv)
    perms = []
    for g in gens:
        p = tuple(int(v) for v in g)
        if sorted(p) != list(range(n)):
            raise InvalidModelError(f"malformed permutation {g!r}")
        perms.append(p)
    if not _exact.in_row_span(mat, [1] * n):
        raise StructuralError("the all-ones row must lie in the row span of A")
    return ExponentialFamilyModel(
        name=name,
        states=tuple(states),
        A=tuple(mat),
        r=tuple(r),
        symmetry_generators=tuple(perms),
    )


def load_model(path):
    """Read and validate a model file (JSON)."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidModelError(f"cannot parse model file {path}: {exc}") from exc
    return make_model(data)


@lru_cache(maxsize=256)
def a_array(model):
    return np.array(model.A, dtype=float)


@lru_cache(maxsize=256)
def r_array(model):
    return np.array([float(v) for v in model.r])


def moment_map(model, p):
    """A.P, the sufficient statistics of the distribution P."""
    p = np.asarray(p, dtype=float)
    if p.shape != (model.n_states,):
        raise ValueError(f"expected a vector of length {model.n_states}")
    return a_array(model) @ p


@lru_cache(maxsize=256)
def kernel_basis(model):
    """Exact integer basis of ker A, one vector per free column."""
    vectors = _exact.integer_kernel_basis(model.A)
    rank_a = model.n_states - len(vectors)
    return KernelBasis(vectors=tuple(tuple(v) for v in vectors), rank_a=rank_a)


def dim_family(model):
    """Dimension of the exponential family (rank A minus one)."""
    return kernel_basis(model).rank_a - 1


@lru_cache(maxsize=256)
def symmetry_group(model, cap=100000):
    """All permutations generated by the model's symmetry generators."""
    n = model.n_states
    ident = tuple(range(n))
    group = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for g in frontier:
            for gen in model.symmetry_generators:
                comp = tuple(g[gen[i]] for i in range(n))
                if comp not in group:
                    group.add(comp)
                    new.append(comp)
        if len(group) > cap:
            raise ValueError(f"symmetry group larger than cap {cap}")
        frontier = new
    return tuple(sorted(group))


def facial_support(model, b):
    """States that can carry positive mass in the fiber {Q >= 0, AQ = b}.

    This is the support of the rI-projection of any P with AP = b.  One
    exact LP per undecided state; every LP witness settles all states it
    touches.
    """
    b_ex = [Fraction(v) if not isinstance(v, Fraction) else v for v in b]
    if len(b_ex) != model.h:
        raise ValueError(f"expected a moment vector of length {model.h}")
    witness = _exact.lp_feasible(model.A, b_ex)
    if witness is None:
        raise ValueError("moment vector lies outside the convex support")
    n = model.n_states
    positive = {x for x in range(n) if witness[x] > 0}
    zero = set()
    for x in range(n):
        if x in positive or x in zero:
            continue
        obj = [Fraction(0)] * n
        obj[x] = Fraction(1)
        value, opt = _exact.lp_solve(model.A, b_ex, obj)
        if value > 0:
            positive.update(y for y in range(n) if opt[y] > 0)
        else:
            zero.add(x)
    return tuple(sorted(positive))
