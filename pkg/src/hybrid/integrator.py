import numpy as np

from src.hybrid.errors import IntegrationDiverged


def rk4_step(f, x: np.ndarray, u: np.ndarray, h: float) -> np.ndarray:
    """
    One classical Runge-Kutta step of x' = f(x, u) with u held constant over h.

    The increment is formed as h * ((k1 + 2 k2 + 2 k3 + k4) / 6), so a constant field c
    advances x by exactly h * c (clocks stay exact).

    Args:
        f: Vector field f(x, u).
        x (np.ndarray): Current point.
        u (np.ndarray): Constant input over the step.
        h (float): Step length, > 0.

    Returns:
        np.ndarray: The point after one step.

    Raises:
        ValueError: if h <= 0.
        IntegrationDiverged: if the result is not finite.
    """
    if not h > 0.0:
        raise ValueError(f"step length must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    k1 = np.asarray(f(x, u), dtype=float)
    k2 = np.asarray(f(x + (h / 2.0) * k1, u), dtype=float)
    k3 = np.asarray(f(x + (h / 2.0) * k2, u), dtype=float)
    k4 = np.asarray(f(x + h * k3, u), dtype=float)
    result = x + h * ((k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0)
    if not np.all(np.isfinite(result)):
        raise IntegrationDiverged(f"non-finite state after RK4 step of length {h}")
    return result
