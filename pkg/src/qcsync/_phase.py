import numpy as np

TWO_PI = 2.0 * np.pi


def wrap_phase(x):
    """Reduce angles into (-pi, pi]; an exact -pi maps to +pi.

    Values already inside the interval come back bit-for-bit unchanged.
    """
    arr = np.asarray(x, dtype=float)
    inside = (arr > -np.pi) & (arr <= np.pi)
    out = np.where(inside, arr, np.pi - np.mod(np.pi - arr, TWO_PI))
    return out if np.ndim(x) else float(out)
