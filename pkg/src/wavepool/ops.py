"""Differentiable network operations built on the autodiff tape.

Layout convention: image tensors are (batch, channel, height, width);
convolution weights are (out_channels, in_channels, kh, kw); linear weights
are (out_features, in_features).  Convolution is cross-correlation (no
kernel flip), the usual deep-learning convention.

``conv2d`` supports three padding modes: "same" (zero padding preserving
spatial size at stride 1, odd kernels only), "valid" (no padding), and
"circular" (periodic wrap padding).  Circular padding makes a stride-1
convolution exactly shift-equivariant on the torus, which is what lets a
network of circular convolutions plus wavelet pooling achieve perfect
consistency under full-stride input shifts.

The forward pass extracts strided patch views (im2col) and reduces with one
tensordot; backward folds per-tap contributions back with k*k strided slice
additions, so both directions are dominated by GEMMs.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import as_strided

from .autodiff import Tensor, make_op
from .errors import InputTooShort, InvalidHyperparameter, OddLengthInput, ShapeMismatch

PAD_MODES = ("same", "valid", "circular")


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _fold_axis_wrap(a: np.ndarray, p: int, n: int, axis: int) -> np.ndarray:
    """Fold periodic padding gradient back: strip of width p on each side of
    an axis of core length n is added to the opposite end of the core."""
    if p == 0:
        return a
    idx = [slice(None)] * a.ndim

    def take(s):
        idx[axis] = s
        return a[tuple(idx)]

    core = take(slice(p, p + n)).copy()
    cidx = [slice(None)] * a.ndim
    cidx[axis] = slice(n - p, n)
    core[tuple(cidx)] += take(slice(0, p))
    cidx[axis] = slice(0, p)
    core[tuple(cidx)] += take(slice(p + n, p + n + p))
    return core


def conv2d(x, w, b=None, stride: int = 1, pad: str = "same") -> Tensor:
    """2D cross-correlation with optional bias.

    Parameters
    ----------
    x : Tensor, shape (N, C, H, W)
    w : Tensor, shape (F, C, kh, kw)
    b : Tensor of shape (F,), optional
    stride : 1 or 2
    pad : "same", "valid" or "circular"
    """
    x, w = _as_tensor(x), _as_tensor(w)
    if x.ndim != 4 or w.ndim != 4:
        raise ShapeMismatch(f"conv2d: need 4D input/weight, got {x.shape} and {w.shape}")
    N, C, H, W = x.shape
    F, Cw, kh, kw = w.shape
    if C != Cw:
        raise ShapeMismatch(f"conv2d: input has {C} channels, weight expects {Cw}")
    if stride not in (1, 2):
        raise InvalidHyperparameter(f"conv2d: stride must be 1 or 2, got {stride}")
    if pad not in PAD_MODES:
        raise InvalidHyperparameter(f"conv2d: pad must be one of {PAD_MODES}, got {pad!r}")
    if stride == 2 and (H % 2 or W % 2):
        raise OddLengthInput(f"conv2d: stride 2 requires even spatial dims, got {H}x{W}")
    if b is not None:
        b = _as_tensor(b)
        if b.shape != (F,):
            raise ShapeMismatch(f"conv2d: bias shape {b.shape} != ({F},)")

    if pad == "valid":
        ph = pw = 0
        xp = x.data
    else:
        if kh % 2 == 0 or kw % 2 == 0:
            raise InvalidHyperparameter(f"conv2d: {pad} padding requires odd kernels, got {kh}x{kw}")
        ph, pw = kh // 2, kw // 2
        if pad == "circular" and (ph > H or pw > W):
            raise InputTooShort(f"conv2d: circular pad {ph}x{pw} exceeds input {H}x{W}")
        mode = "wrap" if pad == "circular" else "constant"
        xp = np.pad(x.data, ((0, 0), (0, 0), (ph, ph), (pw, pw)), mode=mode)

    Hp, Wp = xp.shape[2:]
    if Hp < kh or Wp < kw:
        raise InputTooShort(f"conv2d: padded input {Hp}x{Wp} smaller than kernel {kh}x{kw}")
    Ho = (Hp - kh) // stride + 1
    Wo = (Wp - kw) // stride + 1
    sn, sc, sh, sw = xp.strides
    patches = as_strided(
        xp,
        shape=(N, C, Ho, Wo, kh, kw),
        strides=(sn, sc, sh * stride, sw * stride, sh, sw),
        writeable=False,
    )
    out = np.tensordot(patches, w.data, axes=([1, 4, 5], [1, 2, 3]))  # (N, Ho, Wo, F)
    out = np.ascontiguousarray(out.transpose(0, 3, 1, 2))
    if b is not None:
        out += b.data[None, :, None, None]

    def backward_fn(g):
        dw = None
        if w.requires_grad:
            dw = np.tensordot(g, patches, axes=([0, 2, 3], [0, 2, 3]))
        dx = None
        if x.requires_grad:
            dxp = np.zeros_like(xp)
            for u in range(kh):
                for v in range(kw):
                    tap = np.tensordot(g, w.data[:, :, u, v], axes=([1], [0]))  # (N,Ho,Wo,C)
                    dxp[:, :, u:u + stride * Ho:stride, v:v + stride * Wo:stride] += (
                        tap.transpose(0, 3, 1, 2)
                    )
            if ph or pw:
                if pad == "circular":
                    dxp = _fold_axis_wrap(dxp, ph, H, axis=2)
                    dxp = _fold_axis_wrap(dxp, pw, W, axis=3)
                else:
                    dxp = dxp[:, :, ph:ph + H, pw:pw + W]
            dx = dxp
        if b is None:
            return (dx, dw)
        db = g.sum(axis=(0, 2, 3)) if b.requires_grad else None
        return (dx, dw, db)

    parents = (x, w) if b is None else (x, w, b)
    return make_op(out, parents, backward_fn)


def batchnorm2d(
    x,
    gamma,
    beta,
    running_mean: np.ndarray,
    running_var: np.ndarray,
    training: bool,
    momentum: float = 0.1,
    eps: float = 1e-5,
) -> Tensor:
    """Per-channel batch normalization with running statistics.

    In training mode the batch mean/variance normalize and the running
    buffers are updated in place (exponential moving average, the unbiased
    variance estimate enters the buffer).  In eval mode the running buffers
    normalize, making the op a fixed per-channel affine map.
    """
    x = _as_tensor(x)
    gamma, beta = _as_tensor(gamma), _as_tensor(beta)
    if x.ndim != 4:
        raise ShapeMismatch(f"batchnorm2d: need 4D input, got {x.shape}")
    C = x.shape[1]
    for name, v in (("gamma", gamma.data), ("beta", beta.data),
                    ("running_mean", running_mean), ("running_var", running_var)):
        if v.shape != (C,):
            raise ShapeMismatch(f"batchnorm2d: {name} shape {v.shape} != ({C},)")

    if training:
        n = x.data.shape[0] * x.data.shape[2] * x.data.shape[3]
        mu = x.data.mean(axis=(0, 2, 3))
        var = x.data.var(axis=(0, 2, 3))
        running_mean *= 1.0 - momentum
        running_mean += momentum * mu
        var_unbiased = var * (n / (n - 1)) if n > 1 else var
        running_var *= 1.0 - momentum
        running_var += momentum * var_unbiased
    else:
        n = 0
        mu = running_mean.copy()
        var = running_var.copy()

    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu[None, :, None, None]) * inv[None, :, None, None]
    out = gamma.data[None, :, None, None] * xhat + beta.data[None, :, None, None]

    def backward_fn(g):
        dgamma = (g * xhat).sum(axis=(0, 2, 3)) if gamma.requires_grad else None
        dbeta = g.sum(axis=(0, 2, 3)) if beta.requires_grad else None
        dx = None
        if x.requires_grad:
            if training:
                dxhat = g * gamma.data[None, :, None, None]
                s1 = dxhat.sum(axis=(0, 2, 3), keepdims=True)
                s2 = (dxhat * xhat).sum(axis=(0, 2, 3), keepdims=True)
                dx = (inv[None, :, None, None] / n) * (n * dxhat - s1 - xhat * s2)
            else:
                dx = g * (gamma.data * inv)[None, :, None, None]
        return (dx, dgamma, dbeta)

    return make_op(out, (x, gamma, beta), backward_fn)


def relu(x) -> Tensor:
    x = _as_tensor(x)
    mask = x.data > 0

    def backward_fn(g):
        return (g * mask,)

    return make_op(np.where(mask, x.data, 0.0), (x,), backward_fn)


def linear(x, w, b=None) -> Tensor:
    """Affine map: out = x @ w.T + b, with w of shape (out, in)."""
    x, w = _as_tensor(x), _as_tensor(w)
    if x.ndim != 2 or w.ndim != 2 or x.shape[1] != w.shape[1]:
        raise ShapeMismatch(f"linear: {x.shape} incompatible with weight {w.shape}")
    if b is not None:
        b = _as_tensor(b)
        if b.shape != (w.shape[0],):
            raise ShapeMismatch(f"linear: bias shape {b.shape} != ({w.shape[0]},)")
    out = x.data @ w.data.T
    if b is not None:
        out = out + b.data[None, :]

    def backward_fn(g):
        dx = g @ w.data if x.requires_grad else None
        dw = g.T @ x.data if w.requires_grad else None
        if b is None:
            return (dx, dw)
        return (dx, dw, g.sum(axis=0) if b.requires_grad else None)

    parents = (x, w) if b is None else (x, w, b)
    return make_op(out, parents, backward_fn)


def global_avg_pool(x) -> Tensor:
    """(N, C, H, W) -> (N, C) spatial mean."""
    x = _as_tensor(x)
    if x.ndim != 4:
        raise ShapeMismatch(f"global_avg_pool: need 4D input, got {x.shape}")
    N, C, H, W = x.shape

    def backward_fn(g):
        return (np.broadcast_to(g[:, :, None, None] / (H * W), (N, C, H, W)),)

    return make_op(x.data.mean(axis=(2, 3)), (x,), backward_fn)


def _log_softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=1, keepdims=True))


def _check_logits_labels(logits: Tensor, labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels)
    if logits.ndim != 2:
        raise ShapeMismatch(f"need (batch, classes) logits, got {logits.shape}")
    if labels.shape != (logits.shape[0],) or not np.issubdtype(labels.dtype, np.integer):
        raise ShapeMismatch(f"labels must be {logits.shape[0]} integers, got {labels.shape}")
    if labels.min(initial=0) < 0 or labels.max(initial=0) >= logits.shape[1]:
        raise ShapeMismatch("label id outside class range")
    return labels


def softmax_cross_entropy(logits, labels) -> Tensor:
    """Mean cross-entropy between softmax(logits) and integer labels."""
    logits = _as_tensor(logits)
    labels = _check_logits_labels(logits, labels)
    N = logits.shape[0]
    logp = _log_softmax(logits.data)
    loss = -logp[np.arange(N), labels].mean()

    def backward_fn(g):
        dz = np.exp(logp)
        dz[np.arange(N), labels] -= 1.0
        return (g * dz / N,)

    return make_op(np.asarray(loss), (logits,), backward_fn)


def kd_loss(student_logits, teacher_logits, hard_labels, temperature: float = 4.0,
            mix: float = 0.5) -> Tensor:
    """Distillation objective mixing hard and soft targets.

    loss = mix * CE(student, hard) +
           (1 - mix) * T^2 * KL(softmax(teacher/T) || softmax(student/T))

    The KL term is a mean over the batch.  Gradients flow to the student
    logits only; the teacher enters as a constant.
    """
    if not temperature > 0:
        raise InvalidHyperparameter(f"temperature must be > 0, got {temperature}")
    if not 0.0 <= mix <= 1.0:
        raise InvalidHyperparameter(f"mix must lie in [0, 1], got {mix}")
    student = _as_tensor(student_logits)
    labels = _check_logits_labels(student, hard_labels)
    teacher = teacher_logits.data if isinstance(teacher_logits, Tensor) else np.asarray(
        teacher_logits, dtype=np.float64)
    if teacher.shape != student.shape:
        raise ShapeMismatch(f"teacher logits {teacher.shape} != student {student.shape}")
    N = student.shape[0]
    T = float(temperature)

    logp_hard = _log_softmax(student.data)
    ce = -logp_hard[np.arange(N), labels].mean()

    logq = _log_softmax(student.data / T)
    logp_t = _log_softmax(teacher / T)
    p_t = np.exp(logp_t)
    kl = float((p_t * (logp_t - logq)).sum(axis=1).mean())
    loss = mix * ce + (1.0 - mix) * T * T * kl

    def backward_fn(g):
        d_hard = np.exp(logp_hard)
        d_hard[np.arange(N), labels] -= 1.0
        d_soft = np.exp(logq) - p_t
        return (g * (mix * d_hard + (1.0 - mix) * T * d_soft) / N,)

    return make_op(np.asarray(loss), (student,), backward_fn)
