"""Even real trigonometric polynomials and the circulant matrices they generate.

A spectral function here is a finite cosine series

    f(theta) = a_0 + sum_{m=1..K} a_m cos(m theta),

which is automatically real and even. Such a function generates a real symmetric
circulant matrix whose eigenvalues are the symbol samples f(2 pi j / N). Both the
coupling spectrum of the oscillator chain and the width spectrum of the initial
Gaussian state live in this class.
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy.linalg import circulant as _circulant_from_row
from scipy.optimize import minimize_scalar

from .errors import CriticalSymbolError, SpectralSpecError

# Relative threshold below which a refined minimum counts as a zero of the symbol.
_CRITICAL_REL_TOL = 1e-9


@dataclasses.dataclass(frozen=True)
class TrigPolynomial:
    """Finite even cosine series; `coeffs[m]` multiplies cos(m theta)."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if arr.ndim != 1 or arr.size == 0:
            raise SpectralSpecError("coefficient vector must be a non-empty 1-d array")
        if not np.all(np.isfinite(arr)):
            raise SpectralSpecError("coefficient vector contains non-finite entries")
        # trim trailing exact zeros so `degree` is meaningful, but keep a_0
        last = arr.size
        while last > 1 and arr[last - 1] == 0.0:
            last -= 1
        object.__setattr__(self, "coeffs", arr[:last].copy())
        self.coeffs.setflags(write=False)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, theta):
        return evaluate(self, theta)


@dataclasses.dataclass(frozen=True)
class CirculantMatrix:
    """Real symmetric circulant matrix, stored as its first row."""

    first_row: np.ndarray
    size: int

    def to_dense(self) -> np.ndarray:
        return _circulant_from_row(self.first_row).T

    def eigenvalues(self) -> np.ndarray:
        """Spectrum in mode order j = 0..N-1 (equals symbol samples)."""
        return np.fft.fft(self.first_row).real


@dataclasses.dataclass(frozen=True)
class SpectralExtrema:
    minimum: float
    maximum: float
    argmin: float
    argmax: float


def evaluate(f: TrigPolynomial, theta):
    """Evaluate a_0 + sum a_m cos(m theta); vectorized over theta."""
    th = np.asarray(theta, dtype=float)
    m = np.arange(f.coeffs.size)
    vals = np.cos(np.multiply.outer(th, m)) @ f.coeffs
    return vals if th.ndim else float(vals)


def gap_family(c: float) -> TrigPolynomial:
    """The (c - cos theta)^2 family as an explicit cosine series.

    Expanding with cos^2 = 1/2 + cos(2 theta)/2 gives coefficients
    (c^2 + 1/2, -2c, 1/2). The symbol touches zero when |c| <= 1 (critical
    coupling); that is allowed, construction does not reject it.
    """
    c = float(c)
    return TrigPolynomial(np.array([c * c + 0.5, -2.0 * c, 0.5]))


def parse_spectral_spec(text: str) -> TrigPolynomial:
    """Parse `poly:a0,a1,...` or `gap:c=<value>` into a TrigPolynomial."""
    if not isinstance(text, str):
        raise SpectralSpecError(f"spectral spec must be a string, got {type(text).__name__}")
    spec = text.strip()
    if spec.startswith("poly:"):
        body = spec[len("poly:"):]
        try:
            coeffs = np.array([float(p) for p in body.split(",")])
        except ValueError as exc:
            raise SpectralSpecError(f"bad polynomial coefficients in {text!r}") from exc
        return TrigPolynomial(coeffs)
    if spec.startswith("gap:"):
        body = spec[len("gap:"):]
        if not body.startswith("c="):
            raise SpectralSpecError(f"gap family spec must look like gap:c=<value>, got {text!r}")
        try:
            return gap_family(float(body[2:]))
        except ValueError as exc:
            raise SpectralSpecError(f"bad gap parameter in {text!r}") from exc
    raise SpectralSpecError(f"unknown spectral spec format: {text!r}")


def format_spectral_spec(f: TrigPolynomial) -> str:
    return "poly:" + ",".join(repr(float(a)) for a in f.coeffs)


def build_circulant(f: TrigPolynomial, N: int) -> CirculantMatrix:
    """Circulant matrix with symbol f.

    The Fourier integral of cos(m theta) puts a_m/2 at offsets +-m and a_0 on
    the diagonal. N must exceed 2K so the wrapped offsets stay unambiguous.
    """
    K = f.degree
    if N <= 2 * K:
        raise SpectralSpecError(f"size N={N} too small for degree K={K}; need N > 2K")
    row = np.zeros(N)
    row[0] = f.coeffs[0]
    for m in range(1, K + 1):
        row[m] += 0.5 * f.coeffs[m]
        row[N - m] += 0.5 * f.coeffs[m]
    return CirculantMatrix(first_row=row, size=N)


def extrema(f: TrigPolynomial, grid_size: int = 4096) -> SpectralExtrema:
    """Global extrema over one period: dense grid scan plus local refinement.

    Refinement runs bounded scalar minimization on the neighbouring grid cell,
    which converges far below the requested 1e-10 for these smooth symbols.
    """
    if grid_size < max(4 * f.degree, 16):
        grid_size = max(4 * f.degree, 16)
    th = np.linspace(0.0, 2.0 * np.pi, grid_size, endpoint=False)
    vals = evaluate(f, th)
    h = 2.0 * np.pi / grid_size

    def refine(idx, sign):
        lo, hi = th[idx] - h, th[idx] + h
        res = minimize_scalar(lambda x: sign * evaluate(f, x), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12})
        return float(res.x), float(sign * res.fun)

    amin, vmin = refine(int(np.argmin(vals)), +1.0)
    amax, vmax = refine(int(np.argmax(vals)), -1.0)
    return SpectralExtrema(minimum=vmin, maximum=vmax,
                           argmin=amin % (2.0 * np.pi), argmax=amax % (2.0 * np.pi))


def is_critical(f: TrigPolynomial) -> bool:
    """True when the symbol's refined minimum is (numerically) zero."""
    ext = extrema(f)
    return ext.minimum <= _CRITICAL_REL_TOL * max(1.0, abs(ext.maximum))


def require_positive(f: TrigPolynomial, name: str = "symbol") -> None:
    ext = extrema(f)
    if ext.minimum <= 0.0 or is_critical(f):
        raise SpectralSpecError(
            f"{name} must be strictly positive; refined minimum {ext.minimum:g} "
            f"at theta={ext.argmin:g}")


def require_nonnegative(f: TrigPolynomial, name: str = "symbol") -> None:
    ext = extrema(f)
    if ext.minimum < -1e-12 * max(1.0, abs(ext.maximum)):
        raise SpectralSpecError(
            f"{name} must be non-negative; refined minimum {ext.minimum:g} "
            f"at theta={ext.argmin:g}")


def group_velocity_bound(lam: TrigPolynomial) -> float:
    """Propagation-speed bound K * max(lambda) / sqrt(min(lambda)).

    Only defined for gapped symbols; a critical coupling has no finite bound
    of this form and is rejected with a distinct error.
    """
    if lam.degree == 0:
        return 0.0
    ext = extrema(lam)
    if is_critical(lam) or ext.minimum <= 0.0:
        raise CriticalSymbolError(
            "group-velocity bound undefined for critical coupling (min lambda = 0)")
    return lam.degree * ext.maximum / np.sqrt(ext.minimum)
