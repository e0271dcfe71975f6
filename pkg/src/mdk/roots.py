"""Simultaneous polynomial root finding.

Aberth-Ehrlich iteration on dense complex coefficient arrays, with a
companion-matrix (numpy.roots) fallback when the iteration stalls.  Roots
are accepted only after a residual test, scaled against the coefficient
magnitude at the root, so callers get a guaranteed backward error.
"""

from __future__ import annotations

import numpy as np

from .errors import RootFindingFailure


def poly_eval(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate sum_k coeffs[k] x^k by Horner (coeffs ascending)."""
    out = np.zeros_like(x, dtype=complex) + coeffs[-1]
    for c in coeffs[-2::-1]:
        out = out * x + c
    return out


def poly_derivative(coeffs: np.ndarray) -> np.ndarray:
    n = len(coeffs) - 1
    return coeffs[1:] * np.arange(1, n + 1)


def residual_scale(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """sum_k |coeffs[k]| |x|^k, the natural backward-error scale."""
    ax = np.abs(x)
    out = np.zeros_like(ax) + abs(coeffs[-1])
    for c in coeffs[-2::-1]:
        out = out * ax + abs(c)
    return out


def relative_residuals(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    return np.abs(poly_eval(coeffs, roots)) / residual_scale(coeffs, roots)


def _initial_guesses(coeffs: np.ndarray) -> np.ndarray:
    n = len(coeffs) - 1
    r = (abs(coeffs[0]) / abs(coeffs[-1])) ** (1.0 / n) if coeffs[0] != 0 else 1.0
    # golden-angle stagger avoids symmetric stalling configurations
    angles = 2.0 * np.pi * (np.arange(n) + 0.26) / n + 0.4 * np.arange(n)
    return r * np.exp(1j * angles)


def aberth(
    coeffs,
    start: np.ndarray | None = None,
    tol: float = 1e-13,
    max_iter: int = 120,
) -> np.ndarray:
    """All roots of the polynomial with ascending complex ``coeffs``.

    ``start`` (warm start) is used when given; coincident or missing start
    values are perturbed/filled from the default circle.  Falls back to
    numpy's companion-matrix roots if the iteration does not converge, and
    raises ``RootFindingFailure`` if even those fail the residual test.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if abs(coeffs[-1]) == 0.0:
        raise ValueError("leading coefficient vanishes")
    n = len(coeffs) - 1
    if n == 0:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return np.array([-coeffs[0] / coeffs[1]])

    if start is not None and len(start) == n:
        x = np.array(start, dtype=complex)
        # split exactly coincident warm-start points
        for i in range(n):
            close = np.abs(x - x[i]) < 1e-300
            close[i] = False
            if close.any():
                x[i] = x[i] * (1 + 1e-8) + 1e-12
    else:
        x = _initial_guesses(coeffs)

    dcoeffs = poly_derivative(coeffs)
    converged = False
    for _ in range(max_iter):
        p = poly_eval(coeffs, x)
        dp = poly_eval(dcoeffs, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = np.where(dp != 0, p / np.where(dp == 0, 1, dp), 0.0)
            diff = x[:, None] - x[None, :]
            np.fill_diagonal(diff, np.inf)
            sums = np.sum(1.0 / diff, axis=1)
            denom = 1.0 - newton * sums
            step = np.where(np.abs(denom) > 1e-300, newton / denom, newton)
        x = x - step
        if np.all(np.abs(step) <= tol * (1.0 + np.abs(x))):
            converged = True
            break

    res = relative_residuals(coeffs, x)
    if not converged or np.any(res > 1e-10):
        x = np.roots(coeffs[::-1])
        res = relative_residuals(coeffs, x)
        if np.any(res > 1e-9):
            raise RootFindingFailure(
                f"root residuals too large: max {res.max():.3e} (degree {n})"
            )
    return x
