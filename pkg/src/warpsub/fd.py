"""Central finite-difference stencils with coordinate-scaled steps."""
import numpy as np

H1 = 1e-5  # first derivatives
H2 = 1e-4  # derivatives of already differentiated quantities
H3 = 1e-3  # third-derivative quantities


def steps(x, base=H1):
    """Per-coordinate step ``base * max(1, |x_i|)``."""
    x = np.asarray(x, dtype=float)
    return base * np.maximum(1.0, np.abs(x))


def partials(fun, x, base=H1):
    """Stack of central differences ``d fun / d x_k`` along axis 0.

    Parameters
    ----------
    fun : callable
        Maps a coordinate vector to an array of any shape.
    x : array_like
        Base point.
    base : float
        Relative step size.

    Returns
    -------
    ndarray
        Array of shape ``(len(x),) + fun(x).shape``.
    """
    x = np.asarray(x, dtype=float)
    h = steps(x, base)
    out = []
    for k in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[k] += h[k]
        xm[k] -= h[k]
        out.append((np.asarray(fun(xp)) - np.asarray(fun(xm))) / (2.0 * h[k]))
    return np.array(out)


def directional(fun, x, direction, base=H1):
    """Central difference of ``fun`` along a straight coordinate segment."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(direction, dtype=float)
    size = np.max(np.abs(d))
    if size == 0.0:
        return np.zeros_like(np.asarray(fun(x), dtype=float))
    t = base * max(1.0, np.max(np.abs(x))) / size
    return (np.asarray(fun(x + t * d)) - np.asarray(fun(x - t * d))) / (2.0 * t)


def second_partials(fun, x, base=H2):
    """Symmetric matrix of second differences of a scalar function."""
    x = np.asarray(x, dtype=float)
    h = steps(x, base)
    n = x.size
    out = np.empty((n, n))
    f0 = fun(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h[i]
        out[i, i] = (fun(x + ei) - 2.0 * f0 + fun(x - ei)) / h[i] ** 2
        for j in range(i):
            ej = np.zeros(n)
            ej[j] = h[j]
            val = (fun(x + ei + ej) - fun(x + ei - ej)
                   - fun(x - ei + ej) + fun(x - ei - ej)) / (4.0 * h[i] * h[j])
            out[i, j] = out[j, i] = val
    return out
