"""Geometry of the unit ball of C^n.

Points are complex numpy arrays of shape ``(n,)``; batches have shape
``(k, n)``. A length-2n real vector ``(re_1, im_1, ..., re_n, im_n)`` converts
with :func:`from_real` / :func:`to_real`.
"""

import numpy as np

from . import kernels

SPHERE_TOL = 1e-12


def from_real(coords):
    """Interleaved real coordinates -> complex vector."""
    x = np.asarray(coords, dtype=float)
    if x.shape[-1] % 2:
        raise ValueError("need an even number of real coordinates")
    return x[..., 0::2] + 1j * x[..., 1::2]


def to_real(v):
    v = np.asarray(v, dtype=complex)
    out = np.empty(v.shape[:-1] + (2 * v.shape[-1],))
    out[..., 0::2] = v.real
    out[..., 1::2] = v.imag
    return out


def as_cvector(v):
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"expected a non-empty 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite coordinates")
    return v


def ball_point(v):
    """Validate ``|v| < 1`` and return ``v`` as a complex vector."""
    v = as_cvector(v)
    if np.vdot(v, v).real >= 1.0:
        raise ValueError(f"|v| = {np.linalg.norm(v)} is not inside the unit ball")
    return v


def sphere_point(v):
    v = as_cvector(v)
    if abs(np.linalg.norm(v) - 1.0) > SPHERE_TOL:
        raise ValueError(f"|v| = {np.linalg.norm(v)!r} is not on the unit sphere")
    return v


def basis(n, k=0):
    e = np.zeros(n, dtype=complex)
    e[k] = 1.0
    return e


def herm_inner(z, w):
    """<z, w> = sum z_i conj(w_i)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if z.shape[-1] != w.shape[-1]:
        raise ValueError(f"dimension mismatch: {z.shape[-1]} vs {w.shape[-1]}")
    return np.sum(z * w.conj(), axis=-1)


def involution(a, w):
    """The involutive automorphism phi_a swapping 0 and ``a``.

    ``w`` may be a single point or a ``(k, n)`` batch. For ``a = 0`` this is
    ``-w``.
    """
    a = np.ascontiguousarray(a, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if w.shape[-1] != a.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {w.shape[-1]}")
    if w.ndim == 1:
        return kernels.involution(a, np.ascontiguousarray(w[None, :]))[0]
    return kernels.involution(a, np.ascontiguousarray(w))


def jacobian_real(a, w):
    """Real Jacobian determinant of phi_a at ``w``."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    t = 1.0 - herm_inner(a, w)
    return ((1.0 - np.vdot(a, a).real) / np.abs(t) ** 2) ** (n + 1)


def align_unitary(z):
    """Unitary ``U`` with ``(U xi)_1 = <xi, z> / |z|`` for every ``xi``.

    The columns of ``U^*`` are ``z/|z|`` followed by the standard basis vectors
    made orthonormal by two-pass Gram-Schmidt; basis vectors are tried in order
    of increasing ``|z_j|`` (ties by index) so the construction is stable.
    """
    z = as_cvector(z)
    nz = np.linalg.norm(z)
    if nz == 0.0:
        raise ValueError("align_unitary needs a nonzero vector")
    n = z.size
    cols = [z / nz]
    for j in sorted(range(n), key=lambda j: (abs(z[j]), j)):
        if len(cols) == n:
            break
        v = basis(n, j)
        for _ in range(2):
            for q in cols:
                v = v - np.vdot(q, v) * q
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            cols.append(v / norm)
    V = np.column_stack(cols)
    return V.conj().T
