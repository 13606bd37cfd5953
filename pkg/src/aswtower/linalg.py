"""Dense exact linear algebra over F_{p^nu} on numpy arrays of field codes.

Prime fields use plain modular integer arithmetic.  Extension fields are
handled through table lookups for elimination and through coordinate planes
(one integer matrix per power-basis coordinate) for matrix products.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .algebra import GF


@lru_cache(maxsize=None)
def _tables(F: GF):
    add = np.array(F.add_t, dtype=np.int64)
    mul = np.array(F.mul_t, dtype=np.int64)
    neg = np.array(F.neg_t, dtype=np.int64)
    inv = np.array([0] + [F.inv_t[a] for a in range(1, F.q)], dtype=np.int64)
    frob = np.array(F.frob_t, dtype=np.int64)
    frobinv = np.array(F.frobinv_t, dtype=np.int64)
    return add, mul, neg, inv, frob, frobinv


def row_reduce(F: GF, M: np.ndarray) -> tuple[np.ndarray, list]:
    """Reduced row echelon form and pivot columns."""
    A = np.array(M, dtype=np.int64, copy=True)
    rows, cols = A.shape
    pivots = []
    r = 0
    prime = F.nu == 1
    p = F.p
    if not prime:
        add, mul, neg, inv, _, _ = _tables(F)
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            A[[r, k]] = A[[k, r]]
        if prime:
            A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
            factors = A[:, c].copy()
            factors[r] = 0
            A = (A - np.outer(factors, A[r])) % p
        else:
            A[r] = mul[inv[A[r, c]], A[r]]
            factors = A[:, c].copy()
            factors[r] = 0
            A = add[A, mul[neg[factors][:, None], A[r][None, :]]]
        pivots.append(c)
        r += 1
    return A, pivots


def rank(F: GF, M: np.ndarray) -> int:
    if M.size == 0:
        return 0
    return len(row_reduce(F, M)[1])


def nullity(F: GF, M: np.ndarray) -> int:
    return M.shape[1] - rank(F, M)


def _planes(F: GF, M: np.ndarray) -> list:
    out = []
    rest = np.array(M, dtype=np.int64)
    for _ in range(F.nu):
        out.append(rest % F.p)
        rest = rest // F.p
    return out


def _from_planes(F: GF, planes) -> np.ndarray:
    code = np.zeros_like(planes[0])
    for plane in reversed(planes):
        code = code * F.p + plane
    return code


def matmul(F: GF, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    p = F.p
    if F.nu == 1:
        return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64)) % p
    nu = F.nu
    mod = F.params.modulus
    Ap, Bp = _planes(F, A), _planes(F, B)
    prod = [np.zeros((A.shape[0], B.shape[1]), dtype=np.int64) for _ in range(2 * nu - 1)]
    for s in range(nu):
        for t in range(nu):
            prod[s + t] = (prod[s + t] + Ap[s] @ Bp[t]) % p
    for k in range(2 * nu - 2, nu - 1, -1):
        top = prod[k]
        for i in range(nu):
            prod[k - nu + i] = (prod[k - nu + i] - top * mod[i]) % p
    return _from_planes(F, prod[:nu])


def frobenius_twist(F: GF, M: np.ndarray, k: int) -> np.ndarray:
    """Apply sigma^k entrywise (negative k for the inverse Frobenius)."""
    if F.nu == 1 or k % F.nu == 0:
        return np.array(M, dtype=np.int64, copy=True)
    _, _, _, _, frob, frobinv = _tables(F)
    table = frob if k > 0 else frobinv
    out = np.asarray(M, dtype=np.int64)
    for _ in range(abs(k) % F.nu):
        out = table[out]
    return out


def is_zero(M: np.ndarray) -> bool:
    return not np.any(M)
