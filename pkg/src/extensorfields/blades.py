"""Bitmask blade arithmetic for the exterior algebra over R^n.

A basis blade e_{i1} ^ ... ^ e_{ik} (i1 < ... < ik) is encoded as an n-bit
mask with bits i1..ik set (0-based).  All dense kernels below operate on
flat coefficient arrays of length 2^n indexed by mask.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

MAX_DIM = 8


def check_dim(n: int) -> int:
    if not (1 <= n <= MAX_DIM):
        raise ValueError(f"dimension must be in 1..{MAX_DIM}, got {n}")
    return n


def grade(mask: int) -> int:
    return int(mask).bit_count()


def blades_of_grade(n: int, g: int) -> list[int]:
    return [m for m in range(1 << n) if grade(m) == g]


def blades_of_grades(n: int, grades) -> list[int]:
    gs = set(grades)
    return [m for m in range(1 << n) if grade(m) in gs]


def wedge_sign(a: int, b: int) -> int:
    """Sign of e_a ^ e_b relative to the canonical blade e_{a|b}.

    Zero if the masks share an index.  Otherwise (-1)^s where s is the
    number of transpositions needed to interleave the two ascending index
    lists (pairs i in a, j in b with i > j).
    """
    if a & b:
        return 0
    swaps = 0
    while b:
        j = b & -b
        # indices of a strictly above the lowest index of b
        swaps += grade(a & ~(j | (j - 1)))
        b ^= j
    return -1 if swaps & 1 else 1


@lru_cache(maxsize=64)
def _wedge_table(n: int):
    ia, ib, io, sg = [], [], [], []
    for a in range(1 << n):
        for b in range(1 << n):
            s = wedge_sign(a, b)
            if s:
                ia.append(a)
                ib.append(b)
                io.append(a | b)
                sg.append(s)
    return (np.array(ia), np.array(ib), np.array(io), np.array(sg, dtype=float))


@lru_cache(maxsize=64)
def _contract_table(n: int, right: bool):
    # out[K] += sign * phi[J] * x[J|K] over disjoint J, K.
    # left:  sign = wedge_sign(J, K)   (adjunction <Psi, <Phi,X|> = <Phi^Psi, X>)
    # right: sign = wedge_sign(K, J)   (adjunction <Psi^Phi, X> = <Psi, |Phi,X>>)
    ij, il, io, sg = [], [], [], []
    for j in range(1 << n):
        rest = ((1 << n) - 1) ^ j
        k = rest
        while True:
            s = wedge_sign(k, j) if right else wedge_sign(j, k)
            if s:
                ij.append(j)
                il.append(j | k)
                io.append(k)
                sg.append(s)
            if k == 0:
                break
            k = (k - 1) & rest
    return (np.array(ij), np.array(il), np.array(io), np.array(sg, dtype=float))


def wedge_coeffs(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Exterior product on coefficient arrays; broadcasts over leading axes."""
    ia, ib, io, sg = _wedge_table(n)
    if a.ndim == 1 and b.ndim == 1:
        return np.bincount(io, weights=sg * a[ia] * b[ib], minlength=1 << n)
    out = np.zeros(np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (1 << n,))
    np.add.at(out, (..., io), sg * a[..., ia] * b[..., ib])
    return out


def contract_coeffs(phi: np.ndarray, x: np.ndarray, n: int, right: bool) -> np.ndarray:
    """Left/right contraction kernel on coefficient arrays (side-agnostic)."""
    ij, il, io, sg = _contract_table(n, right)
    if phi.ndim == 1 and x.ndim == 1:
        return np.bincount(io, weights=sg * phi[ij] * x[il], minlength=1 << n)
    out = np.zeros(np.broadcast_shapes(phi.shape[:-1], x.shape[:-1]) + (1 << n,))
    np.add.at(out, (..., io), sg * phi[..., ij] * x[..., il])
    return out


@lru_cache(maxsize=64)
def grade_mask_vector(n: int, grades: frozenset) -> np.ndarray:
    return np.array([1.0 if grade(m) in grades else 0.0 for m in range(1 << n)])


def outer_extension(mat: np.ndarray) -> np.ndarray:
    """Outermorphism extension of an n x n matrix to 2^n x 2^n.

    Column for blade mask {i1<...<ik} is mat[:,i1] ^ ... ^ mat[:,ik].
    """
    n = mat.shape[0]
    dim = 1 << n
    cols = np.zeros((dim, dim))
    cols[0, 0] = 1.0
    for mask in range(1, dim):
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        vec = np.zeros(dim)
        vec[1 << np.arange(n)] = mat[:, i]
        cols[:, mask] = wedge_coeffs(vec, cols[:, rest], n)
    return cols


def outer_extension_jet(mat: np.ndarray, dmats: np.ndarray):
    """Outermorphism extension together with its directional derivatives.

    dmats has shape (m, n, n); returns (M, dMs) with dMs of shape
    (m, 2^n, 2^n), using the product rule down the blade recursion.
    """
    n = mat.shape[0]
    m = dmats.shape[0]
    dim = 1 << n
    cols = np.zeros((dim, dim))
    dcols = np.zeros((m, dim, dim))
    cols[0, 0] = 1.0
    idx1 = 1 << np.arange(n)
    for mask in range(1, dim):
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        vec = np.zeros(dim)
        vec[idx1] = mat[:, i]
        dvec = np.zeros((m, dim))
        dvec[:, idx1] = dmats[:, :, i]
        cols[:, mask] = wedge_coeffs(vec, cols[:, rest], n)
        for d in range(m):
            dcols[d, :, mask] = wedge_coeffs(dvec[d], cols[:, rest], n) + wedge_coeffs(vec, dcols[d, :, rest], n)
    return cols, dcols


@lru_cache(maxsize=64)
def _derivation_basis(n: int) -> np.ndarray:
    """Stack of derivation extensions of the elementary matrices E_kj."""
    dim = 1 << n
    out = np.zeros((n, n, dim, dim))
    for k in range(n):
        for j in range(n):
            for mask in range(dim):
                if not (mask >> j) & 1:
                    continue
                # replace factor e_j by e_k inside the blade
                rest = mask ^ (1 << j)
                if (rest >> k) & 1:
                    continue
                # e_blade = (+-) e_j ^ e_rest; replace e_j by e_k and re-sort
                lower = rest & ((1 << j) - 1)
                lower_k = rest & ((1 << k) - 1)
                s = (-1) ** (grade(lower) + grade(lower_k))
                out[k, j, (1 << k) | rest, mask] = s
    return out


def derivation_extension(mat: np.ndarray) -> np.ndarray:
    """Derivation (generalized) extension: zero on scalars, mat on vectors,
    Leibniz over the exterior product."""
    n = mat.shape[0]
    return np.einsum("kj,kjab->ab", mat, _derivation_basis(n))
