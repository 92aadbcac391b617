"""Sign vectors of ker A: circuits, composition closure, filters, canonical forms."""

import functools
import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import _exact
from .model import dim_family, kernel_basis, symmetry_group

if os.environ.get("DIVMAX_NO_EXT"):
    from . import _closure_py as _backend
else:
    try:
        from . import _closure as _backend
    except ImportError:
        from . import _closure_py as _backend


def backend_name():
    """Name of the active closure backend: 'compiled' or 'numpy'."""
    return "compiled" if _backend.__name__.endswith("_closure") else "numpy"


class CapExceeded(RuntimeError):
    """Sign-vector enumeration hit the configured cap."""

    def __init__(self, count, partial):
        super().__init__(f"sign-vector enumeration exceeded the cap at {count} classes")
        self.count = count
        self.partial = partial


@dataclass(frozen=True)
class SignVector:
    sigma: tuple

    @staticmethod
    def from_string(s):
        return SignVector(tuple({"+": 1, "-": -1, "0": 0}[ch] for ch in s))

    def __str__(self):
        return "".join({1: "+", -1: "-", 0: "0"}[v] for v in self.sigma)

    @property
    def support(self):
        return tuple(i for i, v in enumerate(self.sigma) if v != 0)

    @property
    def plus(self):
        return tuple(i for i, v in enumerate(self.sigma) if v > 0)

    @property
    def minus(self):
        return tuple(i for i, v in enumerate(self.sigma) if v < 0)

    def negate(self):
        return SignVector(tuple(-v for v in self.sigma))


def as_sign_vector(sigma):
    """Coerce a tuple, string, array, or SignVector to a SignVector."""
    if isinstance(sigma, SignVector):
        return sigma
    if isinstance(sigma, str):
        return SignVector.from_string(sigma)
    return SignVector(tuple(int(v) for v in sigma))


@dataclass(frozen=True)
class Circuit:
    sign: SignVector
    vector: tuple


@dataclass(frozen=True)
class CircuitSet:
    circuits: tuple

    def __len__(self):
        return len(self.circuits)


def _sign_normalized(vec):
    # orient so the first nonzero entry is positive
    for v in vec:
        if v:
            return vec if v > 0 else tuple(-w for w in vec)
    return vec


@functools.lru_cache(maxsize=64)
def circuits(model, basis=None):
    """All circuits of ker A, one representative per +- pair.

    Depth-first search over independent column subsets in increasing
    index order; each dependent extension is the unique fundamental
    circuit of its support, recorded only when the dependency touches
    every chosen column.
    """
    if basis is None:
        basis = kernel_basis(model)
    n = model.n_states
    reduced, _ = _exact.rref([[Fraction(v) for v in row] for row in model.A])
    rows = [_exact._primitive(row) for row in reduced]
    rank = len(rows)
    cols = [tuple(row[x] for row in rows) for x in range(n)]
    found = []

    def reduce_col(vec, elim):
        v = list(vec)
        for pivot, w in elim:
            if v[pivot]:
                a, b = w[pivot], v[pivot]
                v = [a * vi - b * wi for vi, wi in zip(v, w)]
        g = 0
        for vi in v:
            g = gcd(g, abs(vi))
            if g == 1:
                break
        if g > 1:
            v = [vi // g for vi in v]
        return v

    def record_circuit(members, x):
        mat = [[Fraction(cols[s][i]) for s in members] for i in range(rank)]
        rhs = [Fraction(cols[x][i]) for i in range(rank)]
        coeffs = _exact.solve_linear(mat, rhs)
        if any(c == 0 for c in coeffs):
            return
        full = [Fraction(0)] * n
        full[x] = Fraction(1)
        for s, c in zip(members, coeffs):
            full[s] = -c
        vec = _sign_normalized(_exact._primitive(full))
        found.append(Circuit(sign=SignVector(tuple(np.sign(vec).tolist())), vector=vec))

    def dfs(elim, members, start):
        for x in range(start, n):
            v = reduce_col(cols[x], elim)
            pivot = next((i for i, vi in enumerate(v) if vi), None)
            if pivot is None:
                if members:
                    record_circuit(members, x)
            elif len(members) < rank:
                dfs(elim + [(pivot, v)], members + [x], x + 1)

    dfs([], [], 0)
    found.sort(key=lambda c: c.vector)
    return CircuitSet(circuits=tuple(found))


def compose(s1, s2):
    """Componentwise composition: s1 where nonzero, else s2."""
    a, b = as_sign_vector(s1), as_sign_vector(s2)
    if len(a.sigma) != len(b.sigma):
        raise ValueError("sign vectors have different lengths")
    return SignVector(tuple(x if x else y for x, y in zip(a.sigma, b.sigma)))


def is_sign_vector(model, sigma):
    """Exact realizability test: is there u in ker A with sgn(u) = sigma?

    Substituting u = sigma * (1 + w) with w >= 0 turns the open orthant
    condition into an LP feasibility problem; returns (flag, witness).
    """
    sigma = as_sign_vector(sigma)
    if len(sigma.sigma) != model.n_states:
        raise ValueError("sign vector length does not match the model")
    supp = sigma.support
    if not supp:
        return True, tuple([0] * model.n_states)
    a_rows = [
        [Fraction(row[x] * sigma.sigma[x]) for x in supp] for row in model.A
    ]
    b = [-sum(row) for row in a_rows]
    w = _exact.lp_feasible(a_rows, b)
    if w is None:
        return False, None
    u = [Fraction(0)] * model.n_states
    for i, x in enumerate(supp):
        u[x] = sigma.sigma[x] * (1 + w[i])
    return True, _exact.scaled_integers(u)


def filter_var0(model, basis, sigma):
    """Zero-set condition: every kernel basis vector sums to 0 off supp(sigma)."""
    sigma = as_sign_vector(sigma)
    zero = [x for x, v in enumerate(sigma.sigma) if v == 0]
    return all(sum(vec[x] for x in zero) == 0 for vec in basis.vectors)


def filter_support_bound(model, sigma):
    """Cardinality bound: min(|sigma+|, |sigma-|) <= dim(E) + 1."""
    sigma = as_sign_vector(sigma)
    return min(len(sigma.plus), len(sigma.minus)) <= dim_family(model) + 1


def canonicalize(model, sigma):
    """Lexicographic minimum over the symmetry group times {+-1} orbit."""
    sigma = as_sign_vector(sigma)
    best = None
    for g in symmetry_group(model):
        for cand in (
            tuple(sigma.sigma[i] for i in g),
            tuple(-sigma.sigma[i] for i in g),
        ):
            if best is None or cand < best:
                best = cand
    return SignVector(best)


def _pow3(n):
    return np.array([3 ** (n - 1 - j) for j in range(n)], dtype=np.int64)


def _unpack(keys, n):
    keys = np.asarray(keys, dtype=np.int64)
    out = np.empty((len(keys), n), dtype=np.int8)
    rem = keys.copy()
    for j in range(n):
        p = 3 ** (n - 1 - j)
        out[:, j] = rem // p
        rem = rem % p
    return out - 1


def _closure_enumerate(model, circs, cap):
    n = model.n_states
    perms = np.array(symmetry_group(model), dtype=np.int64)
    pow3 = _pow3(n)
    raw = [c.sign.sigma for c in circs.circuits]
    circ_all = np.array(raw + [tuple(-v for v in s) for s in raw], dtype=np.int8)
    start_keys = _backend.canonical_keys(
        np.ascontiguousarray(circ_all + 1, dtype=np.int8), perms, pow3
    )
    seen = set(int(k) for k in start_keys)
    frontier = sorted(seen)
    chunk_rows = max(1, (1 << 22) // max(1, len(circ_all)))
    while frontier:
        fresh = set()
        for lo in range(0, len(frontier), chunk_rows):
            vecs = _unpack(frontier[lo : lo + chunk_rows], n)
            keys_raw = np.unique(_backend.compose_pack(vecs, circ_all, pow3))
            comp = _unpack(keys_raw, n)
            ckeys = _backend.canonical_keys(
                np.ascontiguousarray(comp + 1, dtype=np.int8), perms, pow3
            )
            for k in np.unique(ckeys).tolist():
                if k not in seen:
                    seen.add(k)
                    fresh.add(k)
            if cap is not None and len(seen) > cap:
                raise CapExceeded(len(seen), sorted(seen))
        frontier = sorted(fresh)
    return sorted(seen)


def _closure_enumerate_tuples(model, circs, cap):
    # fallback for state spaces too large to pack into int64 keys
    group = symmetry_group(model)

    def canon(s):
        best = None
        for g in group:
            for cand in (tuple(s[i] for i in g), tuple(-s[i] for i in g)):
                if best is None or cand < best:
                    best = cand
        return best

    raw = [c.sign.sigma for c in circs.circuits]
    raw = raw + [tuple(-v for v in s) for s in raw]
    seen = set(canon(s) for s in raw)
    frontier = sorted(seen)
    while frontier:
        fresh = set()
        for s in frontier:
            for c in raw:
                k = canon(tuple(x if x else y for x, y in zip(s, c)))
                if k not in seen:
                    seen.add(k)
                    fresh.add(k)
            if cap is not None and len(seen) > cap:
                raise CapExceeded(len(seen), sorted(seen))
        frontier = sorted(fresh)
    return sorted(seen)


def enumerate_sign_vectors(model, circs=None, mode="closure", cap=None, allow_long=False):
    """Canonical nonzero sign-vector classes of ker A.

    closure mode composes circuits transitively; scan mode tests every
    ternary pattern with the exact LP (cross-check for small N).
    Raises CapExceeded (carrying the partial class list) past the cap.
    """
    n = model.n_states
    if mode == "closure":
        if circs is None:
            circs = circuits(model)
        if not len(circs):
            return []
        if n <= 39:
            try:
                keys = _closure_enumerate(model, circs, cap)
            except CapExceeded as exc:
                partial = [SignVector(tuple(v)) for v in _unpack(exc.partial, n).tolist()]
                raise CapExceeded(exc.count, partial) from None
            return [SignVector(tuple(v)) for v in _unpack(keys, n).tolist()]
        try:
            return [SignVector(s) for s in _closure_enumerate_tuples(model, circs, cap)]
        except CapExceeded as exc:
            raise CapExceeded(exc.count, [SignVector(s) for s in exc.partial]) from None
    if mode != "scan":
        raise ValueError(f"unknown mode {mode!r}")
    if 3**n > 600_000 and not allow_long:
        raise ValueError(
            f"scan mode visits 3^{n} patterns; pass allow_long to run anyway"
        )
    group = symmetry_group(model)
    member = set()
    rejected = set()
    pattern = [0] * n

    def canon(s):
        best = None
        for g in group:
            for cand in (tuple(s[i] for i in g), tuple(-s[i] for i in g)):
                if best is None or cand < best:
                    best = cand
        return best

    def walk(i):
        if i == n:
            s = canon(tuple(pattern))
            if any(s) and s not in member and s not in rejected:
                ok, _ = is_sign_vector(model, SignVector(s))
                (member if ok else rejected).add(s)
                if cap is not None and len(member) > cap:
                    raise CapExceeded(len(member), sorted(member))
            return
        for v in (-1, 0, 1):
            pattern[i] = v
            walk(i + 1)

    try:
        walk(0)
    except CapExceeded as exc:
        raise CapExceeded(exc.count, [SignVector(s) for s in exc.partial]) from None
    return [SignVector(s) for s in sorted(member)]
