"""NumPy implementation of the population-dynamics kernels.

Used when the compiled extension is unavailable, and as the reference the
extension is tested against.  A payoff tensor arrives as four flat arrays:
sorted strategy triples ``a <= b <= c`` and their payoffs.
"""
import numpy as np

# shares below this are set to zero so triple products never go subnormal
FLOOR = 1e-100


class _Groups:
    """Triples split by repetition pattern, so each pattern is one vectorized pass."""

    def __init__(self, a, b, c, val):
        distinct = (a < b) & (b < c)
        aab = (a == b) & (b < c)
        abb = (a < b) & (b == c)
        aaa = (a == c)
        self.d = (a[distinct], b[distinct], c[distinct], 2.0 * val[distinct])
        self.aab = (a[aab], c[aab], val[aab])
        self.abb = (a[abb], b[abb], val[abb])
        self.aaa = (a[aaa], val[aaa])

    def payoffs(self, q, n):
        u = np.zeros(n)
        a, b, c, w = self.d
        qa, qb, qc = q[a], q[b], q[c]
        u += np.bincount(a, w * qb * qc, minlength=n)
        u += np.bincount(b, w * qa * qc, minlength=n)
        u += np.bincount(c, w * qa * qb, minlength=n)
        # {x, x, y}: orderings (x,x,y) (x,y,x) (y,x,x)
        x, y, w = self.aab
        qx, qy = q[x], q[y]
        u += np.bincount(x, 2.0 * w * qx * qy, minlength=n)
        u += np.bincount(y, w * qx * qx, minlength=n)
        x, y, w = self.abb
        qx, qy = q[x], q[y]
        u += np.bincount(y, 2.0 * w * qx * qy, minlength=n)
        u += np.bincount(x, w * qy * qy, minlength=n)
        x, w = self.aaa
        u += np.bincount(x, w * q[x] * q[x], minlength=n)
        return u


def expected_payoffs(a, b, c, val, q):
    q = np.asarray(q, dtype=np.float64)
    return _Groups(a, b, c, val).payoffs(q, q.shape[0])


def run(a, b, c, val, q0, max_iter, eps):
    """Iterate the growth transform from ``q0``.

    Returns ``(q, iterations, converged, status)``; ``status`` is 1 when the
    mean payoff vanished and the state could not be updated.
    """
    g = _Groups(a, b, c, val)
    q = np.array(q0, dtype=np.float64)
    n = q.shape[0]
    for it in range(1, max_iter + 1):
        u = g.payoffs(q, n)
        total = float(q @ u)
        if not total > 0.0:
            return q, it - 1, False, 1
        new = q * u / total
        new /= new.sum()
        new[new < FLOOR] = 0.0
        delta = float(np.max(np.abs(new - q)))
        q = new
        if delta < eps:
            return q, it, True, 0
    return q, max_iter, False, 0
