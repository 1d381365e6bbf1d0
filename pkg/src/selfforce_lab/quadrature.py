"""Adaptive quadrature and the semi-infinite spherical-Bessel integrator.

`integrate` is a globally adaptive 7/15-point Gauss-Kronrod rule.  Integrands
are called with a 1-D ``numpy`` array of abscissae and must return an array of
the same shape.

`integrate_oscillatory_bessel` evaluates

    C(chi) = int_0^inf j1(x)^2 cos(chi x) dx

as a finite-range quadrature on ``[0, cutoff]`` plus a tail.  Beyond the
cutoff ``j1(x)^2`` is an exact finite sum of ``trig(w x) / x**n`` terms, so the
tail splits into a handful of single-frequency pieces.  Each piece is summed
over half-period panels and the partial sums are accelerated by repeated
averaging.  A zero-frequency piece (chi = 0 or chi = 2) does not oscillate and
is integrated in closed form.
"""
from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .kernels import DomainError

__all__ = [
    "QuadratureError",
    "QuadratureSpec",
    "OscillatorySpec",
    "integrate",
    "integrate_oscillatory_bessel",
    "bessel_product_integral",
    "repeated_average",
    "spherical_bessel_j1",
    "J1_SERIES_SWITCH",
]

# Kronrod abscissae on [0, 1] (odd indices are the 7-point Gauss nodes).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-point node set on [-1, 1] and the matching weights.
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_K_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_WEIGHTS = np.zeros(15)
_G_WEIGHTS[1:7:2] = _WG[:3]
_G_WEIGHTS[7] = _WG[3]
_G_WEIGHTS[9:15:2] = _WG[2::-1]

_EPS = np.finfo(float).eps


class QuadratureError(RuntimeError):
    """Tolerance not reached within the subdivision or panel budget."""

    def __init__(self, message, value=math.nan, err_est=math.nan, worst_panel=None):
        super().__init__(message)
        self.value = value
        self.err_est = err_est
        self.worst_panel = worst_panel


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 10**6
    breakpoints: tuple = ()

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("rel_tol and abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        bp = tuple(float(b) for b in self.breakpoints)
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise DomainError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bp)

    def with_breakpoints(self, breakpoints) -> "QuadratureSpec":
        return QuadratureSpec(self.rel_tol, self.abs_tol, self.max_subdivisions,
                              tuple(breakpoints))


@dataclass(frozen=True)
class OscillatorySpec:
    # panel length in the phase variable w*x; pi means half a period
    period_window: float = math.pi
    initial_cutoff: float = 50.0
    acceleration_depth: int = 12
    target_abs_err: float = 1e-8
    max_panels: int = 2000

    def __post_init__(self):
        if not self.period_window > 0:
            raise DomainError("period_window must be positive")
        if self.acceleration_depth < 1:
            raise DomainError("acceleration_depth must be >= 1")
        if not (self.initial_cutoff > 0 and self.target_abs_err > 0):
            raise DomainError("initial_cutoff and target_abs_err must be positive")


def _gk15(fn, lo, hi):
    """Kronrod estimate, |K - G| and integral of |f| on each panel."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = center[:, None] + half[:, None] * _NODES[None, :]
    flat = x.ravel()
    y = np.broadcast_to(np.asarray(fn(flat), dtype=float), flat.shape).reshape(x.shape)
    if not np.all(np.isfinite(y)):
        raise QuadratureError("integrand returned a non-finite value")
    kron = half * (y @ _K_WEIGHTS)
    gauss = half * (y @ _G_WEIGHTS)
    resabs = np.abs(half) * (np.abs(y) @ _K_WEIGHTS)
    return kron, np.abs(kron - gauss), resabs


def integrate(fn, a: float, b: float, spec: QuadratureSpec | None = None):
    """Integrate `fn` over ``[a, b]`` to ``max(abs_tol, rel_tol*|value|)``.

    Parameters
    ----------
    fn : callable
        Vectorized integrand, ``fn(ndarray) -> ndarray``.
    a, b : float
        Limits, ``a <= b``.
    spec : QuadratureSpec, optional
        Tolerances and interior breakpoints.  Every kink or jump of `fn`
        should be declared as a breakpoint.

    Returns
    -------
    value, err_est : float
        The integral and the engine's error estimate.

    Raises
    ------
    QuadratureError
        If `max_subdivisions` is exhausted; the exception carries the best
        value, its error estimate and the worst panel.
    """
    spec = spec or QuadratureSpec()
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integration limits must be finite")
    if a > b:
        raise DomainError(f"need a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0, 0.0
    bp = spec.breakpoints
    if bp and (bp[0] <= a or bp[-1] >= b):
        raise DomainError("breakpoints must lie strictly inside (a, b)")

    edges = np.array((a, *bp, b))
    kron, err, resabs = _gk15(fn, edges[:-1], edges[1:])
    heap = [(-e, lo, hi, k, r) for e, lo, hi, k, r in zip(err, edges[:-1], edges[1:], kron, resabs)]
    heapq.heapify(heap)
    value = float(np.sum(kron))
    total_err = float(np.sum(err))
    total_abs = float(np.sum(resabs))
    n_sub = len(heap)

    def tolerance():
        return max(spec.abs_tol, spec.rel_tol * abs(value), 50 * _EPS * total_abs)

    while total_err > tolerance():
        if n_sub >= spec.max_subdivisions:
            worst = heap[0]
            raise QuadratureError(
                f"no convergence after {n_sub} subdivisions; worst panel "
                f"[{worst[1]:.17g}, {worst[2]:.17g}] with error {-worst[0]:.3g}",
                value, total_err, (worst[1], worst[2]),
            )
        neg_e, lo, hi, k, r = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            # panel at machine resolution; nothing further to gain
            heapq.heappush(heap, (neg_e, lo, hi, k, r))
            raise QuadratureError(
                f"panel [{lo:.17g}, {hi:.17g}] cannot be subdivided further",
                value, total_err, (lo, hi),
            )
        k2, e2, r2 = _gk15(fn, np.array([lo, mid]), np.array([mid, hi]))
        value += float(k2.sum()) - k
        total_err += float(e2.sum()) + neg_e
        total_abs += float(r2.sum()) - r
        heapq.heappush(heap, (-e2[0], lo, mid, k2[0], r2[0]))
        heapq.heappush(heap, (-e2[1], mid, hi, k2[1], r2[1]))
        n_sub += 1

    # re-sum to shed the drift of the running updates
    value = math.fsum(item[3] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)
    return value, total_err


# --- spherical Bessel function ------------------------------------------------

J1_SERIES_SWITCH = 0.5
# x * sum_k (-x^2/2)^k / (k! (2k+3)!!), first 9 terms
_J1_SERIES = np.array([
    (-0.5) ** k / (math.factorial(k) * math.prod(range(1, 2 * k + 4, 2)))
    for k in range(9)
])


def spherical_bessel_j1(x):
    """j1(x) = sin(x)/x^2 - cos(x)/x, with a power series for |x| < 0.5."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < J1_SERIES_SWITCH
    safe = np.where(small, 1.0, x)
    closed = np.sin(safe) / safe**2 - np.cos(safe) / safe
    series = x * np.polyval(_J1_SERIES[::-1], x * x)
    out = np.where(small, series, closed)
    return float(out) if out.ndim == 0 else out


# --- semi-infinite j1^2 integrals ----------------------------------------------

# j1(x)^2 = (1 + cos 2x)/(2x^2) - sin 2x / x^3 + (1 - cos 2x)/(2x^4), exactly.
_J1_SQUARED_TERMS = (
    (0.5, "cos", 0.0, 2),
    (0.5, "cos", 2.0, 2),
    (-1.0, "sin", 2.0, 3),
    (0.5, "cos", 0.0, 4),
    (-0.5, "cos", 2.0, 4),
)

# frequencies below this are treated as exactly zero
_ZERO_FREQUENCY = 1e-9


def _trig_product(kind1, w1, kind2, w2):
    """Expand trig(w1 x) * trig(w2 x) into (factor, kind, frequency) terms."""
    if kind1 == "cos" and kind2 == "cos":
        return [(0.5, "cos", w1 + w2), (0.5, "cos", w1 - w2)]
    if kind1 == "sin" and kind2 == "cos":
        return [(0.5, "sin", w1 + w2), (0.5, "sin", w1 - w2)]
    if kind1 == "cos" and kind2 == "sin":
        return [(0.5, "sin", w1 + w2), (-0.5, "sin", w1 - w2)]
    return [(0.5, "cos", w1 - w2), (-0.5, "cos", w1 + w2)]


def _tail_groups(chi, kind, power):
    """Group the tail integrand into {(kind, w): {n: coefficient}}."""
    groups = defaultdict(lambda: defaultdict(float))
    for coef, k1, w1, n in _J1_SQUARED_TERMS:
        for factor, k, w in _trig_product(k1, w1, kind, chi):
            c = coef * factor
            if w < 0:
                w = -w
                if k == "sin":
                    c = -c
            if w < _ZERO_FREQUENCY:
                if k == "sin":
                    continue
                w = 0.0
            groups[(k, w)][n + power] += c
    return groups


def repeated_average(partial_sums, depth: int):
    """Average neighbouring partial sums `depth` times.

    Returns the last accelerated value and the difference between the last two
    entries at the deepest level, which serves as an error estimate.
    """
    s = np.asarray(partial_sums, dtype=float)
    if s.size < depth + 2:
        raise ValueError("need at least depth + 2 partial sums")
    for _ in range(depth):
        s = 0.5 * (s[:-1] + s[1:])
    return float(s[-1]), float(abs(s[-1] - s[-2]))


def _oscillatory_tail(kind, w, poly, x0, spec: OscillatorySpec, target):
    powers = np.array(sorted(poly))
    coefs = np.array([poly[n] for n in powers])
    trig = np.cos if kind == "cos" else np.sin

    def fn(x):
        return trig(w * x) * np.sum(coefs[:, None] * x[None, :] ** (-powers[:, None]), axis=0)

    # align panel ends with the zeros of trig(w x)
    offset = 0.5 * math.pi if kind == "cos" else 0.0
    step = spec.period_window / w
    m = math.floor((w * x0 - offset) / math.pi) + 1
    first = (offset + m * math.pi) / w
    panel_spec = QuadratureSpec(rel_tol=1e-12, abs_tol=target * 1e-3)

    sums = [integrate(fn, x0, first, panel_spec)[0]]
    edge = first
    batch = spec.acceleration_depth + 2
    previous = None
    while len(sums) < spec.max_panels:
        for _ in range(batch):
            sums.append(sums[-1] + integrate(fn, edge, edge + step, panel_spec)[0])
            edge += step
        value, err = repeated_average(sums, spec.acceleration_depth)
        if previous is not None:
            err = max(err, abs(value - previous))
        if err <= target:
            return value
        previous = value
        batch = 8
    raise QuadratureError(
        f"tail acceleration did not settle for frequency {w:.6g} within "
        f"{spec.max_panels} panels (last change {err:.3g})",
        value, err,
    )


def bessel_product_integral(chi: float, kind: str = "cos", power: int = 0,
                            spec: OscillatorySpec | None = None) -> float:
    """``int_0^inf j1(x)^2 trig(chi x) x**(-power) dx`` for trig in {cos, sin}.

    ``power`` may be 0 or 1; ``kind="sin"`` with ``power=1`` is the
    chi-antiderivative of the cosine transform.
    """
    spec = spec or OscillatorySpec()
    if not (math.isfinite(chi) and chi >= 0):
        raise DomainError(f"chi must be finite and >= 0, got {chi!r}")
    if kind not in ("cos", "sin") or power not in (0, 1):
        raise DomainError("unsupported trig kind or power")
    trig = np.cos if kind == "cos" else np.sin
    cutoff = spec.initial_cutoff

    def head_fn(x):
        return spherical_bessel_j1(x) ** 2 * trig(chi * x) / x**power

    panel = min(0.5, math.pi / (2.0 + chi))
    head_spec = QuadratureSpec(rel_tol=1e-13, abs_tol=spec.target_abs_err * 1e-3,
                               breakpoints=tuple(np.arange(panel, cutoff - 0.5 * panel, panel)))
    head, _ = integrate(head_fn, 0.0, cutoff, head_spec)

    groups = _tail_groups(chi, kind, power)
    share = spec.target_abs_err / (2 * max(len(groups), 1))
    tail = 0.0
    for (k, w), poly in sorted(groups.items()):
        if w == 0.0:
            tail += sum(c * cutoff ** (1 - n) / (n - 1) for n, c in poly.items())
        else:
            tail += _oscillatory_tail(k, w, poly, cutoff, spec, share)
    return head + tail


def integrate_oscillatory_bessel(chi: float, spec: OscillatorySpec | None = None) -> float:
    """``C(chi) = int_0^inf j1(x)^2 cos(chi x) dx`` to ``spec.target_abs_err``."""
    return bessel_product_integral(chi, "cos", 0, spec)
