"""Dense complex tensor kernels.

Everything in this module is a pure function of numpy arrays; tensors are
complex128 throughout. All fidelity formulas in the package reduce to the
primitives here: pairwise contraction, truncated SVD, trace norm, Hermitian
eigendecomposition, PSD factorization, and the closed-form solution of the
trace-norm maximization over isometries.

Axis ordering rule for :func:`contract`: the result carries the unpaired axes
of ``a`` first, then the unpaired axes of ``b``, each in their original order
(the ``numpy.tensordot`` convention).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    NotPositiveSemidefiniteError,
    NumericError,
    ValidationError,
)

#: Relative tolerance below which a negative eigenvalue of a nominally PSD
#: matrix is treated as roundoff and clipped to zero.  Anything more negative
#: is a caller bug and raises.
PSD_CLIP_RTOL = 1e-12

#: Relative max-abs tolerance for accepting a matrix as Hermitian.
HERMITIAN_RTOL = 1e-10


@dataclass(frozen=True)
class TruncationSpec:
    """Bond-truncation policy for :func:`svd_truncate`.

    ``max_rank=None`` means unbounded rank; ``weight_cutoff`` discards the
    longest trailing run of singular values whose squared sum stays at or
    below the cutoff.  The default keeps everything.
    """

    max_rank: int | None = None
    weight_cutoff: float = 0.0

    def __post_init__(self) -> None:
        if self.max_rank is not None and self.max_rank < 1:
            raise ValidationError(f"max_rank must be >= 1, got {self.max_rank}")
        if self.weight_cutoff < 0:
            raise ValidationError(
                f"weight_cutoff must be >= 0, got {self.weight_cutoff}"
            )


#: Spec that keeps every singular value.
NO_TRUNCATION = TruncationSpec()


@dataclass(frozen=True)
class SvdResult:
    """Truncated SVD ``m ~ u @ diag(s) @ v.conj().T``.

    ``u`` holds left singular vectors as columns, ``v`` right singular
    vectors as columns, ``s`` is real and descending, and
    ``discarded_weight`` is the squared sum of the dropped singular values.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    discarded_weight: float

    @property
    def rank(self) -> int:
        return len(self.s)


def _as_complex(a) -> np.ndarray:
    return np.asarray(a, dtype=np.complex128)


def contract(a, b, axis_pairs: list[tuple[int, int]]) -> np.ndarray:
    """Contract tensors ``a`` and ``b`` over the given ``(axis_a, axis_b)`` pairs.

    Paired axes must have equal extents.  The result's axes are the unpaired
    axes of ``a`` followed by those of ``b``, in original order.
    """
    a = _as_complex(a)
    b = _as_complex(b)
    if not axis_pairs:
        return np.tensordot(a, b, axes=0)
    ax_a = [p[0] for p in axis_pairs]
    ax_b = [p[1] for p in axis_pairs]
    if len(set(ax_a)) != len(ax_a) or len(set(ax_b)) != len(ax_b):
        raise ValidationError(f"repeated axis in pairs: {axis_pairs}")
    for i, j in axis_pairs:
        if not (-a.ndim <= i < a.ndim) or not (-b.ndim <= j < b.ndim):
            raise ValidationError(f"axis pair ({i}, {j}) out of range")
        if a.shape[i] != b.shape[j]:
            raise DimensionError(
                f"extent mismatch on axes ({i}, {j}): {a.shape[i]} vs {b.shape[j]}"
            )
    return np.tensordot(a, b, axes=(ax_a, ax_b))


def _svd_with_fallback(m: np.ndarray):
    try:
        return np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails to converge; retry with the slower gesvd.
        try:
            import scipy.linalg

            return scipy.linalg.svd(m, full_matrices=False, lapack_driver="gesvd")
        except Exception as exc:  # pragma: no cover - pathological inputs
            raise NumericError(f"SVD did not converge: {exc}") from exc


def svd_truncate(m, spec: TruncationSpec = NO_TRUNCATION) -> SvdResult:
    """Truncated SVD of a rank-2 tensor.

    Singular values come out descending.  Truncation first discards the
    trailing values whose squared sum is at most ``spec.weight_cutoff``,
    then caps the rank at ``spec.max_rank``.
    """
    m = _as_complex(m)
    if m.ndim != 2:
        raise ValidationError(f"svd_truncate needs a rank-2 tensor, got rank {m.ndim}")
    u, s, vh = _svd_with_fallback(m)
    if not np.all(np.isfinite(s)):
        raise NumericError("SVD produced non-finite singular values")

    keep = len(s)
    if spec.weight_cutoff > 0 and keep > 0:
        tail = np.cumsum((s**2)[::-1])[::-1]  # tail[i] = sum of s[i:]**2
        while keep > 0 and tail[keep - 1] <= spec.weight_cutoff:
            keep -= 1
    if spec.max_rank is not None:
        keep = min(keep, spec.max_rank)
    discarded = float(np.sum(s[keep:] ** 2))
    return SvdResult(
        u=u[:, :keep], s=s[:keep].copy(), v=vh[:keep].conj().T, discarded_weight=discarded
    )


def singular_values(m) -> np.ndarray:
    """Singular values of a rank-2 tensor, descending."""
    m = _as_complex(m)
    if m.ndim != 2:
        raise ValidationError(f"expected a rank-2 tensor, got rank {m.ndim}")
    try:
        s = np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError:
        s = _svd_with_fallback(m)[1]
    if not np.all(np.isfinite(s)):
        raise NumericError("SVD produced non-finite singular values")
    return s


def trace_norm(m) -> float:
    """Sum of singular values of a rank-2 tensor."""
    return float(np.sum(singular_values(m)))


def hermitian_decompose(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvectors as columns,
    so ``m ~ eigenvectors @ diag(eigenvalues) @ eigenvectors.conj().T``.
    Raises if ``m`` deviates from Hermiticity by more than
    ``HERMITIAN_RTOL`` relative to its largest entry.
    """
    m = _as_complex(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square rank-2 tensor, got shape {m.shape}")
    scale = np.max(np.abs(m)) if m.size else 0.0
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if scale > 0 and dev > HERMITIAN_RTOL * scale:
        raise ValidationError(
            f"matrix is not Hermitian: max deviation {dev:.3e} vs scale {scale:.3e}"
        )
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    return w[::-1].copy(), v[:, ::-1].copy()


def psd_factor(m) -> np.ndarray:
    """Factor a PSD matrix as ``m = c @ c.conj().T``.

    The returned ``c`` has one column per strictly positive eigenvalue
    (after clipping roundoff negatives above ``-PSD_CLIP_RTOL * lambda_max``
    to zero), so its width is the numerical rank.  A genuinely negative
    eigenvalue raises :class:`NotPositiveSemidefiniteError`.
    """
    w, v = hermitian_decompose(m)
    if len(w) == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    lmax = max(float(w[0]), 0.0)
    floor = -PSD_CLIP_RTOL * lmax
    if np.any(w < floor):
        raise NotPositiveSemidefiniteError(
            f"eigenvalue {w.min():.3e} below clip tolerance {floor:.3e}"
        )
    keep = w > PSD_CLIP_RTOL * lmax
    return v[:, keep] * np.sqrt(w[keep])


def optimal_isometry(m) -> tuple[np.ndarray, float]:
    """Maximize ``|trace(w @ m)|`` over isometric ``w``.

    For ``m`` of shape ``(r, c)`` returns ``(w, value)`` with ``w`` of shape
    ``(c, r)``, isometric on its smaller dimension, ``trace(w @ m)`` real and
    equal to ``value``, and ``value`` the trace norm of ``m`` (no isometry
    can do better).
    """
    m = _as_complex(m)
    if m.ndim != 2:
        raise ValidationError(f"expected a rank-2 tensor, got rank {m.ndim}")
    res = svd_truncate(m)
    w = res.v @ res.u.conj().T
    return w, float(np.sum(res.s))


def inner_core(x_a, x_b) -> np.ndarray:
    """Small matrix with the singular values of ``x_b.conj().T @ x_a``.

    Both factors are wide, shape ``(small, big)``; the QR factors of their
    conjugate transposes compress the product to ``(small, small)`` without
    forming the big matrix.
    """
    x_a = _as_complex(x_a)
    x_b = _as_complex(x_b)
    _, r_a = np.linalg.qr(x_a.conj().T)
    _, r_b = np.linalg.qr(x_b.conj().T)
    return r_b @ r_a.conj().T


def random_isometry(n_rows: int, n_cols: int, rng: np.random.Generator) -> np.ndarray:
    """Random isometry: ``w @ w.conj().T = 1`` if rows <= cols, else ``w.conj().T @ w = 1``."""
    g = rng.standard_normal((n_rows, n_cols)) + 1j * rng.standard_normal((n_rows, n_cols))
    res = svd_truncate(g)
    return res.u @ res.v.conj().T


def polar_isometry(m) -> np.ndarray:
    """Isometric factor of the polar decomposition of a rank-2 tensor."""
    res = svd_truncate(m)
    return res.u @ res.v.conj().T
