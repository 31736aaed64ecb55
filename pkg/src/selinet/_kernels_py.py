"""Numpy implementations of the batched hot kernels.

Shared signature contract with the compiled extension `_kernels_c`:
arrays are C-contiguous float32 or float64, batch axis first, and every
function returns freshly allocated arrays of the input dtype.
"""

import numpy as np


def affine_fwd(X, W, b):
    """Y[B,m] = X[B,n] @ W[m,n].T + b[m]."""
    return X @ W.T + b


def affine_bwd(X, W, dY):
    """Gradients of affine_fwd: returns (dX, dW, db)."""
    dX = dY @ W
    dW = dY.T @ X
    db = dY.sum(axis=0)
    return dX, dW, db


def attn_pool_fwd(F, w, b):
    """Location-softmax attention pooling.

    F[B,C,L] are per-location feature columns, w[C]/b the score
    parameters.  Returns (V[B,C], alpha[B,L]) where alpha are the
    softmax weights (cached for the backward pass).
    """
    e = np.einsum("bcl,c->bl", F, w) + b
    e -= e.max(axis=1, keepdims=True)
    alpha = np.exp(e)
    alpha /= alpha.sum(axis=1, keepdims=True)
    V = np.einsum("bcl,bl->bc", F, alpha)
    return V, alpha


def attn_pool_bwd(F, alpha, dV):
    """Gradients of attn_pool_fwd w.r.t. the score parameters.

    Returns (dw[C], db scalar); gradients w.r.t. F are never needed
    because feature maps are frozen inputs.
    """
    dalpha = np.einsum("bcl,bc->bl", F, dV)
    de = alpha * (dalpha - (alpha * dalpha).sum(axis=1, keepdims=True))
    dw = np.einsum("bcl,bl->c", F, de)
    return dw, float(de.sum())


def mean_pool(F):
    """Spatial mean over locations: F[B,C,L] -> V[B,C]."""
    return F.mean(axis=2)
