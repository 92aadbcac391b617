"""Pure numpy fallback for the compiled sign-vector closure kernels."""

import numpy as np


def canonical_keys(trits, perms, pow3):
    """Minimal packed key over the group orbit and global negation.

    trits holds sigma + 1 per entry (values 0, 1, 2); perms act by
    (g.sigma)[i] = sigma[g[i]]; keys pack base 3 with state 0 most
    significant, so key order matches lexicographic order on sigma.
    """
    t = np.asarray(trits, dtype=np.int64)
    best = None
    for g in np.asarray(perms, dtype=np.int64):
        pg = t[:, g]
        k = np.minimum(pg @ pow3, (2 - pg) @ pow3)
        if best is None:
            best = k
        else:
            np.minimum(best, k, out=best)
    return best


def compose_pack(frontier, circuits, pow3):
    """Packed keys of all compositions frontier[i] o circuits[j]."""
    f = np.asarray(frontier, dtype=np.int64)[:, None, :]
    c = np.asarray(circuits, dtype=np.int64)[None, :, :]
    comp = np.where(f != 0, f, c)
    return ((comp + 1) @ pow3).reshape(-1)
