"""Hot numeric kernels: pairwise energy sums and the projected-ascent loop.

The jitted versions (numba, nopython) are used by default; set
``QHM_PURE_NUMPY=1`` to force the vectorized numpy fallbacks, e.g. when numba
is unavailable or for benchmarking (see benchmarks/bench_kernels.py, which
times both paths side by side). ``HAS_NUMBA`` reports which path is active.

Energy sums run in fixed row-major pair order with Kahan-compensated
accumulation on the jitted path, so results are reproducible bit-for-bit on a
given platform. The numpy fallbacks use BLAS dot products; the two paths agree
to ~1e-14 relative, well inside every tolerance used by callers.
"""

import os

import numpy as np

# ascent loop exit status codes
ASCENT_MAXITER = 0
ASCENT_CONVERGED = 1
ASCENT_BLOWUP = 2


def _numba_wanted() -> bool:
    flag = os.environ.get("QHM_PURE_NUMPY", "").strip()
    return flag in ("", "0", "false", "no")


# -- pure numpy implementations (always defined) -----------------------------

def energy_bilinear_np(dist: np.ndarray, w1: np.ndarray, w2: np.ndarray) -> float:
    return float(w1 @ (dist @ w2))


def potential_np(dist: np.ndarray, w: np.ndarray) -> np.ndarray:
    return dist @ w


def worst_triangle_deficit_np(dist: np.ndarray):
    """Largest d(i,j) - (d(i,k) + d(k,j)) over all triples, with its argmax."""
    n = dist.shape[0]
    worst = -np.inf
    at = (0, 0, 0)
    for k in range(n):
        deficit = dist - (dist[:, k, None] + dist[None, k, :])
        m = float(deficit.max())
        if m > worst:
            worst = m
            i, j = np.unravel_index(int(np.argmax(deficit)), deficit.shape)
            at = (int(i), int(j), k)
    return worst, at[0], at[1], at[2]


def ascent_np(dist, w0, iterations, step, blowup, grad_tol, stride):
    """Projected gradient ascent on the energy over the mass-1 affine slice.

    Records (iteration, best value, best measure) every `stride` iterations
    and at exit. Returns (rec_it, rec_val, rec_w, best, best_w, status,
    last_it) with status one of the ASCENT_* codes.
    """
    n = w0.shape[0]
    w = w0.copy()
    max_rec = iterations // stride + 3
    rec_it = np.empty(max_rec, dtype=np.int64)
    rec_val = np.empty(max_rec, dtype=np.float64)
    rec_w = np.empty((max_rec, n), dtype=np.float64)
    best = -np.inf
    best_w = w.copy()
    n_rec = 0
    status = ASCENT_MAXITER
    last_it = 0
    for it in range(iterations + 1):
        last_it = it
        d = dist @ w
        val = float(w @ d)
        if val > best:
            best = val
            best_w[:] = w
        g = 2.0 * (d - d.mean())
        done = False
        if best > blowup:
            status = ASCENT_BLOWUP
            done = True
        elif np.abs(g).max() < grad_tol:
            status = ASCENT_CONVERGED
            done = True
        elif it == iterations:
            status = ASCENT_MAXITER
            done = True
        if it % stride == 0 or done:
            rec_it[n_rec] = it
            rec_val[n_rec] = best
            rec_w[n_rec] = best_w
            n_rec += 1
        if done:
            break
        w = w + step * g
    return (rec_it[:n_rec], rec_val[:n_rec], rec_w[:n_rec], best, best_w,
            status, last_it)


# -- jitted implementations ---------------------------------------------------

HAS_NUMBA = False
if _numba_wanted():
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:
        HAS_NUMBA = False

if HAS_NUMBA:

    @njit(cache=True)
    def energy_bilinear_nb(dist, w1, w2):
        n = dist.shape[0]
        acc = 0.0
        comp = 0.0
        for i in range(n):
            wi = w1[i]
            for j in range(n):
                term = dist[i, j] * wi * w2[j]
                y = term - comp
                t = acc + y
                comp = (t - acc) - y
                acc = t
        return acc

    @njit(cache=True)
    def potential_nb(dist, w):
        n = dist.shape[0]
        out = np.empty(n, dtype=np.float64)
        for i in range(n):
            acc = 0.0
            comp = 0.0
            for j in range(n):
                term = dist[i, j] * w[j]
                y = term - comp
                t = acc + y
                comp = (t - acc) - y
                acc = t
            out[i] = acc
        return out

    @njit(cache=True)
    def ascent_nb(dist, w0, iterations, step, blowup, grad_tol, stride):
        n = w0.shape[0]
        w = w0.copy()
        max_rec = iterations // stride + 3
        rec_it = np.empty(max_rec, dtype=np.int64)
        rec_val = np.empty(max_rec, dtype=np.float64)
        rec_w = np.empty((max_rec, n), dtype=np.float64)
        best = -np.inf
        best_w = w.copy()
        n_rec = 0
        status = 0
        last_it = 0
        d = np.empty(n, dtype=np.float64)
        for it in range(iterations + 1):
            last_it = it
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += dist[i, j] * w[j]
                d[i] = acc
            val = 0.0
            for i in range(n):
                val += w[i] * d[i]
            if val > best:
                best = val
                for i in range(n):
                    best_w[i] = w[i]
            mean = 0.0
            for i in range(n):
                mean += d[i]
            mean /= n
            gmax = 0.0
            for i in range(n):
                g = 2.0 * (d[i] - mean)
                ag = abs(g)
                if ag > gmax:
                    gmax = ag
            done = False
            if best > blowup:
                status = 2
                done = True
            elif gmax < grad_tol:
                status = 1
                done = True
            elif it == iterations:
                status = 0
                done = True
            if it % stride == 0 or done:
                rec_it[n_rec] = it
                rec_val[n_rec] = best
                rec_w[n_rec] = best_w
                n_rec += 1
            if done:
                break
            for i in range(n):
                w[i] = w[i] + step * 2.0 * (d[i] - mean)
        return (rec_it[:n_rec], rec_val[:n_rec], rec_w[:n_rec], best, best_w,
                status, last_it)

    @njit(cache=True)
    def worst_triangle_deficit_nb(dist):
        n = dist.shape[0]
        worst = -np.inf
        wi = 0
        wj = 0
        wk = 0
        for k in range(n):
            for i in range(n):
                dik = dist[i, k]
                for j in range(n):
                    deficit = dist[i, j] - (dik + dist[k, j])
                    if deficit > worst:
                        worst = deficit
                        wi = i
                        wj = j
                        wk = k
        return worst, wi, wj, wk

    energy_bilinear_kernel = energy_bilinear_nb
    potential_kernel = potential_nb
    ascent_kernel = ascent_nb
    worst_triangle_deficit = worst_triangle_deficit_nb
else:
    energy_bilinear_kernel = energy_bilinear_np
    potential_kernel = potential_np
    ascent_kernel = ascent_np
    worst_triangle_deficit = worst_triangle_deficit_np
