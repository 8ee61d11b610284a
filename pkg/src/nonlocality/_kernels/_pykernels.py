"""Pure-numpy versions of the assignment kernels.

A global assignment for n parties is packed as ``sum_p a_p * 4**(n-1-p)``
where ``a_p = o(p, setting 0) | o(p, setting 1) << 1`` and an outcome bit of 1
means '-'.  Contexts and joint outcomes use party 1 as the most significant bit.
"""
import numpy as np


def prefix_tables(support: np.ndarray, n: int):
    """agg[d][ps, u]: prefix outcome ``u`` of parties 0..d is possible under every
    context whose first d+1 settings are ``ps``."""
    support = np.asarray(support, dtype=bool)
    dim = 1 << n
    out = []
    for d in range(n):
        w = 1 << (d + 1)
        pref = support.reshape(dim, w, dim // w).any(axis=2)
        out.append(np.ascontiguousarray(pref.reshape(w, dim // w, w).all(axis=1)))
    return out


def consistent_codes(support: np.ndarray, n: int) -> np.ndarray:
    agg = prefix_tables(support, n)
    codes = np.zeros(1, dtype=np.int64)
    u_prev = np.zeros((1, 1), dtype=np.int64)
    choice = np.arange(4, dtype=np.int64)
    for d in range(n):
        w = 1 << (d + 1)
        k = codes.size
        codes = (codes[:, None] * 4 + choice[None, :]).reshape(-1)
        a = np.tile(choice, k)
        ps = np.arange(w)
        parent = u_prev[:, ps >> 1].repeat(4, axis=0)
        bit = np.where((ps & 1)[None, :] == 1, (a >> 1)[:, None], (a & 1)[:, None])
        u = (parent << 1) | bit
        ok = agg[d][ps[None, :], u].all(axis=1)
        codes = codes[ok]
        u_prev = u[ok]
        if codes.size == 0:
            break
    return codes


def outcome_matrix(codes: np.ndarray, n: int) -> np.ndarray:
    """out[k, c] = joint outcome index of assignment k restricted to context c."""
    codes = np.asarray(codes, dtype=np.int64)
    ctx = np.arange(1 << n)
    out = np.zeros((codes.size, 1 << n), dtype=np.int64)
    for p in range(n):
        shift = n - 1 - p
        a = (codes >> (2 * shift)) & 3
        s = (ctx >> shift) & 1
        out |= ((a[:, None] >> s[None, :]) & 1) << shift
    return out


def hit_sections(codes: np.ndarray, n: int) -> np.ndarray:
    dim = 1 << n
    hits = np.zeros((dim, dim), dtype=np.uint8)
    if len(codes):
        out = outcome_matrix(codes, n)
        hits[np.broadcast_to(np.arange(dim), out.shape), out] = 1
    return hits
