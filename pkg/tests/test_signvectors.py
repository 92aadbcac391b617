"""Sign vector enumeration: circuits, composition closure, canonical classes."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divmax import (
    CapExceeded,
    SignVector,
    canonicalize,
    circuits,
    compose,
    enumerate_sign_vectors,
    filter_support_bound,
    filter_var0,
    is_sign_vector,
    kernel_basis,
    make_model,
    symmetry_group,
)


def independence_model(*sizes):
    """Independence model on a product of finite factors, uniform reference.

    Symmetry generators: level permutations per factor and swaps of
    equal-size factors.
    """
    states = [()]
    for k in sizes:
        states = [s + (i,) for s in states for i in range(k)]
    index = {s: i for i, s in enumerate(states)}
    rows = [[1] * len(states)]
    for axis, k in enumerate(sizes):
        for level in range(k):
            rows.append([1 if s[axis] == level else 0 for s in states])

    def perm_of(f):
        return [index[f(s)] for s in states]

    gens = []
    for axis, k in enumerate(sizes):
        swap = {0: 1, 1: 0}

        def tr(s, axis=axis, swap=swap):
            return s[:axis] + (swap.get(s[axis], s[axis]),) + s[axis + 1 :]

        gens.append(perm_of(tr))
        if k > 2:
            def cyc(s, axis=axis, k=k):
                return s[:axis] + ((s[axis] + 1) % k,) + s[axis + 1 :]

            gens.append(perm_of(cyc))
    for a in range(len(sizes)):
        for b in range(a + 1, len(sizes)):
            if sizes[a] == sizes[b]:
                def ab(s, a=a, b=b):
                    t = list(s)
                    t[a], t[b] = t[b], t[a]
                    return tuple(t)

                gens.append(perm_of(ab))
    return make_model(
        {
            "name": "x".join(map(str, sizes)),
            "states": ["".join(map(str, s)) for s in states],
            "A": rows,
            "r": [1] * len(states),
            "symmetry_generators": gens,
        }
    )


signs = st.lists(st.sampled_from([-1, 0, 1]), min_size=6, max_size=6).map(
    lambda s: SignVector(tuple(s))
)


@given(signs, signs)
@settings(max_examples=200, deadline=None)
def test_compose_laws(a, b):
    c = compose(a, b)
    # composition keeps a where a is nonzero, fills with b elsewhere
    for x, (va, vb, vc) in enumerate(zip(a.sigma, b.sigma, c.sigma)):
        assert vc == (va if va != 0 else vb)
    assert compose(a, a) == a
    assert compose(a, a.negate()) == a


@given(signs, signs, signs)
@settings(max_examples=200, deadline=None)
def test_compose_associative(a, b, c):
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_circuit_counts(golden):
    assert len(circuits(golden["binary_independence"].model)) == 1
    assert len(circuits(golden["three_state_toy"].model)) == 1
    assert len(circuits(golden["four_two"].model)) == 140
    assert len(circuits(golden["two_three_three"].model)) == 1740


def test_circuits_are_kernel_vectors_with_minimal_support(golden):
    model = golden["four_two"].model
    a = np.array(model.A, dtype=int)
    supports = set()
    for c in circuits(model).circuits:
        vec = np.array(c.vector, dtype=int)
        assert not np.any(a @ vec)
        assert c.sign.sigma == tuple(int(np.sign(v)) for v in c.vector)
        supports.add(frozenset(c.sign.support))
    # circuit supports form an antichain
    for s in supports:
        for t in supports:
            assert s == t or not s < t


def test_is_sign_vector_witness(golden):
    model = golden["binary_independence"].model
    ok, witness = is_sign_vector(model, "+--+")
    assert ok
    a = np.array(model.A, dtype=int)
    assert not np.any(a @ np.array(witness, dtype=int))
    assert tuple(int(np.sign(v)) for v in witness) == (1, -1, -1, 1)
    ok, witness = is_sign_vector(model, "+++-")
    assert not ok and witness is None
    # the zero sign vector is always realizable
    ok, witness = is_sign_vector(model, "0000")
    assert ok and witness == (0, 0, 0, 0)


def test_closure_equals_scan_small(golden):
    for name in ("binary_independence", "three_state_toy"):
        model = golden[name].model
        close = {str(s) for s in enumerate_sign_vectors(model, mode="closure")}
        scan = {str(s) for s in enumerate_sign_vectors(model, mode="scan")}
        assert close == scan
        assert len(close) == 1


def test_closure_equals_scan_2x2x2():
    model = independence_model(2, 2, 2)
    close = {str(s) for s in enumerate_sign_vectors(model, mode="closure")}
    scan = {str(s) for s in enumerate_sign_vectors(model, mode="scan")}
    assert close == scan


@pytest.mark.long
def test_closure_equals_scan_2x2x3():
    model = independence_model(2, 2, 3)
    close = {str(s) for s in enumerate_sign_vectors(model, mode="closure")}
    scan = {str(s) for s in enumerate_sign_vectors(model, mode="scan")}
    assert close == scan


def test_every_class_is_realizable():
    model = independence_model(2, 2, 2)
    for s in enumerate_sign_vectors(model, mode="closure"):
        ok, witness = is_sign_vector(model, s)
        assert ok
        assert canonicalize(model, s) == s


def test_canonicalize_orbit_invariant(golden):
    model = golden["four_two"].model
    group = symmetry_group(model)
    rng = np.random.default_rng(17)
    classes = enumerate_sign_vectors(model, mode="closure")
    for s in classes[:20]:
        canon = canonicalize(model, s)
        for g in rng.choice(len(group), size=5, replace=False):
            perm = group[g]
            moved = SignVector(tuple(s.sigma[perm[i]] for i in range(len(perm))))
            assert canonicalize(model, moved) == canon
        assert canonicalize(model, s.negate()) == canon


def test_filters_are_orbit_invariant(golden):
    model = golden["four_two"].model
    basis = kernel_basis(model)
    group = symmetry_group(model)
    classes = enumerate_sign_vectors(model, mode="closure")
    rng = np.random.default_rng(23)
    for s in classes:
        f0 = filter_var0(model, basis, s)
        fb = filter_support_bound(model, s)
        perm = group[rng.integers(len(group))]
        moved = SignVector(tuple(s.sigma[perm[i]] for i in range(len(perm))))
        assert filter_var0(model, basis, moved) == f0
        assert filter_support_bound(model, moved) == fb


def test_four_two_class_counts(golden):
    model = golden["four_two"].model
    basis = kernel_basis(model)
    classes = enumerate_sign_vectors(model, mode="closure")
    assert len(classes) == 73
    v0 = [s for s in classes if filter_var0(model, basis, s)]
    assert len(v0) == 20
    vb = [s for s in v0 if filter_support_bound(model, s)]
    assert len(vb) == 20


def test_cap_exceeded_partial(golden):
    model = golden["two_three_three"].model
    with pytest.raises(CapExceeded) as exc_info:
        enumerate_sign_vectors(model, mode="closure", cap=500)
    exc = exc_info.value
    assert exc.count >= 500
    assert all(isinstance(s, SignVector) for s in exc.partial)
    assert len(exc.partial) == exc.count


def test_scan_needs_allow_long(golden):
    with pytest.raises(ValueError):
        enumerate_sign_vectors(golden["four_two"].model, mode="scan")
