"""Pure numpy versions of the compiled kernels in ``_ckernels.pyx``."""
import numpy as np

_CHUNK = 1 << 12


def density_accumulate(xs, ys, weights, width, height, sigma_d):
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if xs.size == 0:
        return np.zeros((height, width))
    inv = 1.0 / (2.0 * sigma_d * sigma_d)
    dx = np.arange(width, dtype=np.float64)[None, :] - xs[:, None]
    dy = np.arange(height, dtype=np.float64)[None, :] - ys[:, None]
    gx = np.exp(-dx * dx * inv)
    gy = np.exp(-dy * dy * inv) * weights[:, None]
    # separable Gaussian: sum_f gy_f(y) gx_f(x)
    return gy.T @ gx


def pairwise_intersection(stack):
    stack = np.asarray(stack, dtype=np.float64)
    m = stack.shape[0]
    out = np.zeros((m, m))
    for i in range(m):
        out[i, i] = stack[i].sum()
        for j in range(i + 1, m):
            out[i, j] = out[j, i] = np.minimum(stack[i], stack[j]).sum()
    return out


def enumerate_objectives(sim, lambda_d, eps):
    sim = np.asarray(sim, dtype=np.float64)
    m = sim.shape[0]
    total = (1 << m) - 1
    offdiag = ~np.eye(m, dtype=bool)
    sim_off = np.where(offdiag, sim, 0.0)
    dis = np.where(offdiag, 1.0 - sim, 0.0)
    bits = np.arange(m)
    out = np.empty(total)
    for start in range(1, total + 1, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, total + 1))
        alpha = ((masks[:, None] >> bits[None, :]) & 1).astype(np.float64)
        n_sel = alpha.sum(axis=1)
        cover = (alpha[:, None, :] * sim_off[None, :, :]).max(axis=2)
        rep = ((1.0 - alpha) * cover).sum(axis=1) / ((m - n_sel) + eps)
        div_num = np.einsum("ci,ij,cj->c", alpha, dis, alpha)
        div = div_num / (n_sel * (n_sel - 1) + eps)
        out[start - 1:start - 1 + masks.size] = rep + lambda_d * div
    return out
