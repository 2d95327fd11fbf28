"""Shared one-dimensional search and log-domain helpers."""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize, special

from ..config import Tolerances
from ..exceptions import BracketFailureError, NumericalFailureError

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class GoldenSectionResult:
    """Outcome of a golden-section maximization."""

    x: float
    fx: float
    lower: float
    upper: float
    iterations: int
    trace: list[tuple[float, float]] = field(default_factory=list)


def golden_section_maximize(
    func: Callable[[float], float],
    lower: float,
    upper: float,
    xtol: float = Tolerances.GOLDEN_SECTION_XTOL,
    max_iter: int = 500,
) -> GoldenSectionResult:
    """Maximize a unimodal function on [lower, upper].

    Args:
        func: Objective to maximize.
        lower: Left end of the bracket.
        upper: Right end of the bracket.
        xtol: Absolute bracket width at which the search stops.
        max_iter: Iteration cap.

    Returns:
        The best point seen, the final bracket and the evaluation trace.

    Raises:
        BracketFailureError: If the bracket is empty or not finite.
    """
    if not (math.isfinite(lower) and math.isfinite(upper)) or upper <= lower:
        raise BracketFailureError("invalid search bracket", lower, upper)

    trace: list[tuple[float, float]] = []

    def evaluate(x: float) -> float:
        value = float(func(x))
        trace.append((x, value))
        return value

    a, b = lower, upper
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = evaluate(c), evaluate(d)

    iterations = 0
    while b - a > xtol and iterations < max_iter:
        iterations += 1
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = evaluate(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = evaluate(d)

    # Endpoints are included so a monotone objective reports its boundary.
    best_x, best_f = max(trace, key=lambda point: point[1])
    for endpoint in (lower, upper):
        f_end = evaluate(endpoint)
        if f_end > best_f:
            best_x, best_f = endpoint, f_end

    logger.debug(
        f"Golden section converged to x={best_x:.10g} after {iterations} iterations"
    )
    return GoldenSectionResult(best_x, best_f, a, b, iterations, trace)


def find_root(
    func: Callable[[float], float],
    lower: float,
    upper: float,
    xtol: float = Tolerances.MATCH_BISECTION,
    rtol: float = 4 * np.finfo(float).eps,
    method: str = "brentq",
) -> float:
    """Find a sign change of func inside [lower, upper].

    Args:
        func: Continuous function with opposite signs at the endpoints.
        lower: Left end of the bracket.
        upper: Right end of the bracket.
        xtol: Absolute tolerance on the root.
        rtol: Relative tolerance on the root.
        method: "brentq" or "bisect".

    Returns:
        The located root.

    Raises:
        BracketFailureError: If the endpoints do not bracket a root.
        NumericalFailureError: If the solver does not converge.
    """
    f_lower = float(func(lower))
    f_upper = float(func(upper))
    if f_lower == 0.0:
        return lower
    if f_upper == 0.0:
        return upper
    if not (math.isfinite(f_lower) and math.isfinite(f_upper)) or f_lower * f_upper > 0:
        raise BracketFailureError("endpoints do not bracket a root", lower, upper, f_lower, f_upper)

    solver = optimize.bisect if method == "bisect" else optimize.brentq
    root, info = solver(
        func,
        lower,
        upper,
        xtol=xtol,
        rtol=rtol,
        maxiter=Tolerances.BISECTION_MAX_ITER,
        full_output=True,
        disp=False,
    )
    if not info.converged:
        raise NumericalFailureError(f"root search did not converge: {info.flag}")
    return float(root)


def log_mean_exp(values: np.ndarray) -> float:
    """Return log(mean(exp(values))) without overflow."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise NumericalFailureError("cannot average an empty sample")
    return float(special.logsumexp(values) - math.log(values.size))


def perron_pair(matrix: np.ndarray) -> tuple[float, np.ndarray]:
    """Return the dominant real eigenvalue of a 2x2 Metzler matrix and its positive right eigenvector.

    Raises:
        NumericalFailureError: If the eigenvector has a non-positive component,
            which happens for reducible matrices.
    """
    values, vectors = linalg.eig(matrix)
    k = int(np.argmax(values.real))
    vector = vectors[:, k].real
    vector = vector / vector[np.argmax(np.abs(vector))]
    if not (np.all(np.isfinite(vector)) and np.all(vector > 0)):
        raise NumericalFailureError(f"no positive Perron vector for {matrix.tolist()}")
    return float(values[k].real), vector
