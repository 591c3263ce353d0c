"""
Small dense complex linear-algebra helpers.

Every lifted quantity in the package uses the column-major ``vec``
convention, so ``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.
"""

import numpy as np

# Relative tolerance for the Hermitian check.
HERM_TOL = 1e-12
# Reconstruction / orthonormality tolerance for herm_eig.
RECON_TOL = 1e-10
# Hard cap on Kronecker result size (entries).
MAX_KRON_ENTRIES = 1 << 26


class ValidationError(ValueError):
    """Input does not satisfy a structural precondition."""


class NumericalError(ArithmeticError):
    """A numerical routine failed to converge."""


def as_matrix(a):
    a = np.asarray(a)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(-1, 1)
    elif a.ndim != 2:
        raise ValidationError(f"expected a matrix, got ndim={a.ndim}")
    return a


def kron(a, b):
    """Kronecker product ``a ⊗ b``; block ``(i, j)`` equals ``a[i, j] * b``."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.size == 0 or b.size == 0:
        raise ValidationError("kron of an empty matrix")
    if a.size * b.size > MAX_KRON_ENTRIES:
        raise ValidationError(
            f"kron result of {a.size * b.size} entries exceeds {MAX_KRON_ENTRIES}")
    return np.kron(a, b)


def vec(a):
    """Stack the columns of ``a`` top to bottom into a 1-D vector."""
    return as_matrix(a).reshape(-1, order="F")


def unvec(v, rows, cols=None):
    """Inverse of :func:`vec`."""
    cols = rows if cols is None else cols
    return np.asarray(v).reshape(rows, cols, order="F")


def is_hermitian(h, tol=HERM_TOL):
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return False
    scale = max(np.abs(h).max(initial=0.0), 1.0)
    return bool(np.abs(h - h.conj().T).max(initial=0.0) <= tol * scale)


def hermitian_part(a):
    a = np.asarray(a)
    return 0.5 * (a + a.conj().T)


def _check_hermitian(h):
    h = as_matrix(h)
    if not is_hermitian(h):
        raise ValidationError("matrix is not Hermitian within tolerance")
    return h


def herm_eig(h):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    h : array_like
        Hermitian matrix (checked to ``HERM_TOL`` relative).

    Returns
    -------
    lam : ndarray
        Real eigenvalues in descending order.
    vecs : ndarray
        Orthonormal eigenvectors as columns, ``vecs[:, k]`` pairs with
        ``lam[k]``. Each vector's phase is fixed so that its largest-magnitude
        entry is real and positive, and ties in ``lam`` are ordered
        lexicographically on the real parts of the entries.
    """
    h = _check_hermitian(h)
    try:
        lam, vecs = np.linalg.eigh(hermitian_part(h))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(str(exc)) from exc
    # deterministic phase
    idx = np.argmax(np.abs(vecs), axis=0)
    piv = vecs[idx, np.arange(vecs.shape[1])]
    vecs = vecs * (np.abs(piv) / np.where(piv == 0, 1, piv))[None, :]
    # descending, ties (to RECON_TOL of the spectral scale) broken by entries
    scale = max(np.abs(lam).max(initial=0.0), 1.0)
    keys = np.round(lam / (scale * RECON_TOL))
    order = sorted(range(len(lam)),
                   key=lambda k: (-keys[k], tuple(-vecs[:, k].real)))
    return lam[order], vecs[:, order]


def embed_real(h):
    """Real symmetric embedding ``[[Re h, -Im h], [Im h, Re h]]``.

    For Hermitian ``A`` and ``G``, ``trace(embed_real(A) @ embed_real(G))``
    equals ``2 * trace(A @ G)``; the spectrum of the embedding is that of
    ``h`` with each eigenvalue doubled in multiplicity.
    """
    h = as_matrix(h)
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def unembed_real(x):
    """Map a real symmetric ``2n x 2n`` matrix back to Hermitian ``n x n``.

    Averages over the two copies, so it is a left inverse of
    :func:`embed_real` and the projection of arbitrary symmetric input onto
    the image of the embedding.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0] // 2
    x11, x12 = x[:n, :n], x[:n, n:]
    x21, x22 = x[n:, :n], x[n:, n:]
    g = 0.5 * (x11 + x22) + 0.5j * (x21 - x12)
    return hermitian_part(g)


def quad_form(w, a):
    """Return ``w^H a w``."""
    w = np.asarray(w).reshape(-1)
    a = as_matrix(a)
    if a.shape != (w.size, w.size):
        raise ValidationError(
            f"dimension mismatch: w has {w.size} entries, matrix is {a.shape}")
    return complex(np.vdot(w, a @ w))


def quad_forms(ws, a):
    """Real parts of ``w^H a w`` for each row ``w`` of ``ws``."""
    ws = np.atleast_2d(ws)
    return np.einsum("ki,ij,kj->k", ws.conj(), a, ws).real


def crandn(rng, *shape):
    """Circularly-symmetric complex Gaussian samples of unit variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def null_basis(a, rtol=1e-10):
    """Orthonormal basis (columns) of the null space of ``a``."""
    a = as_matrix(a)
    _, s, vh = np.linalg.svd(a)
    tol = rtol * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    return vh[rank:].conj().T
