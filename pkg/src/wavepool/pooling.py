"""Down-sampling operators: wavelet low-pass pooling and its baselines.

All operators map (N, C, H, W) tensors to (N, C, H/2, W/2) and carry exact
backward passes:

- ``wavelet_pool``: keeps the LL subband of a single-level 2D DWT.  High
  frequencies are discarded rather than folded, which is the entire
  anti-aliasing story.  The backward pass is the adjoint of the analysis
  operator (embed the gradient in the LL slot, apply the transpose with the
  analysis filters).  For biorthogonal wavelets this differs from running
  the synthesis filters; only the adjoint is the true gradient, and the
  finite-difference tests pin that choice.
- ``max_pool2`` / ``avg_pool2``: 2x2 window, stride 2.  Max routes the
  gradient to the window argmax with first-index tie-break.
- ``blur_pool``: depthwise separable binomial blur (reflect padding)
  followed by stride-2 subsampling at even indices.
- ``subsample2``: naive decimation at even indices; the aliasing-prone
  baseline a strided convolution reduces to for frequency analysis.

``PoolKind`` is the small config value the backbone builder consumes; it is
parsed from strings like "max", "avg", "strided", "blur:1-2-1" or
"wavelet:haar".
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .autodiff import Tensor, make_op
from .errors import InputTooShort, InvalidHyperparameter, OddLengthInput, ShapeMismatch
from .filterbank import WaveletSpec, parse_wavelet
from .ops import _as_tensor, conv2d
from .transforms import _analyze_ll, _analyze_ll_adjoint

DEFAULT_BLUR_KERNEL = (0.25, 0.5, 0.25)


class PoolFamily(enum.Enum):
    MAX_POOL2 = "max"
    AVG_POOL2 = "avg"
    STRIDED_CONV = "strided"
    BLUR_POOL = "blur"
    WAVELET_POOL = "wavelet"


@dataclass(frozen=True)
class PoolKind:
    """Which down-sampling operator a network site uses.

    ``blur_kernel`` is set only for BLUR_POOL (non-negative, unit sum, odd
    length); ``wavelet`` only for WAVELET_POOL.
    """

    family: PoolFamily
    blur_kernel: tuple[float, ...] | None = None
    wavelet: WaveletSpec | None = None

    def __post_init__(self):
        if self.family is PoolFamily.BLUR_POOL:
            k = self.blur_kernel
            if k is None or len(k) % 2 == 0 or len(k) < 1:
                raise InvalidHyperparameter("blur kernel must have odd length")
            if any(v < 0 for v in k):
                raise InvalidHyperparameter("blur kernel must be non-negative")
            if abs(sum(k) - 1.0) > 1e-12:
                raise InvalidHyperparameter(f"blur kernel must sum to 1, got {sum(k)}")
        elif self.blur_kernel is not None:
            raise InvalidHyperparameter("blur_kernel only valid for blur pooling")
        if (self.wavelet is not None) != (self.family is PoolFamily.WAVELET_POOL):
            raise InvalidHyperparameter("wavelet spec required iff family is wavelet")

    @classmethod
    def max_pool2(cls) -> "PoolKind":
        return cls(PoolFamily.MAX_POOL2)

    @classmethod
    def avg_pool2(cls) -> "PoolKind":
        return cls(PoolFamily.AVG_POOL2)

    @classmethod
    def strided_conv(cls) -> "PoolKind":
        return cls(PoolFamily.STRIDED_CONV)

    @classmethod
    def blur_pool(cls, kernel=DEFAULT_BLUR_KERNEL) -> "PoolKind":
        return cls(PoolFamily.BLUR_POOL, blur_kernel=tuple(float(v) for v in kernel))

    @classmethod
    def wavelet_pool(cls, spec) -> "PoolKind":
        if isinstance(spec, str):
            spec = parse_wavelet(spec)
        return cls(PoolFamily.WAVELET_POOL, wavelet=spec)

    def config_string(self) -> str:
        if self.family is PoolFamily.BLUR_POOL:
            scale = min(v for v in self.blur_kernel if v > 0)
            ints = [v / scale for v in self.blur_kernel]
            if all(abs(v - round(v)) < 1e-9 for v in ints):
                return "blur:" + "-".join(str(int(round(v))) for v in ints)
            return "blur:" + "-".join(repr(v) for v in self.blur_kernel)
        if self.family is PoolFamily.WAVELET_POOL:
            return f"wavelet:{self.wavelet.name}"
        return self.family.value


def parse_pool(text: str) -> PoolKind:
    """Parse a pool config string: max | avg | strided | blur[:a-b-c] |
    wavelet:<name>."""
    text = text.strip()
    head, _, arg = text.partition(":")
    if head == "max" and not arg:
        return PoolKind.max_pool2()
    if head == "avg" and not arg:
        return PoolKind.avg_pool2()
    if head == "strided" and not arg:
        return PoolKind.strided_conv()
    if head == "blur":
        if not arg:
            return PoolKind.blur_pool()
        try:
            weights = [float(v) for v in arg.split("-")]
        except ValueError:
            raise InvalidHyperparameter(f"cannot parse blur kernel {arg!r}") from None
        total = sum(weights)
        if total <= 0:
            raise InvalidHyperparameter(f"blur kernel must have positive sum, got {arg!r}")
        return PoolKind.blur_pool([v / total for v in weights])
    if head == "wavelet" and arg:
        return PoolKind.wavelet_pool(arg)
    raise InvalidHyperparameter(f"cannot parse pool kind {text!r}")


def _check_even_4d(x: Tensor, op: str) -> tuple[int, int, int, int]:
    if x.ndim != 4:
        raise ShapeMismatch(f"{op}: need (N, C, H, W) input, got {x.shape}")
    N, C, H, W = x.shape
    if H % 2 or W % 2:
        raise OddLengthInput(f"{op}: spatial dims must be even, got {H}x{W}")
    return N, C, H, W


def wavelet_pool(x, spec: WaveletSpec) -> Tensor:
    """LL subband of each channel: anti-aliased 2x down-sampling.

    Output values carry the transform's DC gain of 2 relative to a plain
    average; the batchnorm that follows every pooling site in the backbone
    absorbs the constant.
    """
    x = _as_tensor(x)
    N, C, H, W = _check_even_4d(x, "wavelet_pool")
    if H < spec.max_length or W < spec.max_length:
        raise InputTooShort(
            f"wavelet_pool: input {H}x{W} shorter than filter length {spec.max_length}"
        )

    def backward_fn(g):
        return (_analyze_ll_adjoint(g, spec, H, W),)

    return make_op(_analyze_ll(x.data, spec), (x,), backward_fn)


def _windows(data: np.ndarray) -> np.ndarray:
    """(N, C, H, W) -> (N, C, H/2, W/2, 4) view-free window expansion in
    row-major window order (0,0), (0,1), (1,0), (1,1)."""
    N, C, H, W = data.shape
    r = data.reshape(N, C, H // 2, 2, W // 2, 2)
    return r.transpose(0, 1, 2, 4, 3, 5).reshape(N, C, H // 2, W // 2, 4)


def max_pool2(x) -> Tensor:
    """2x2 max pooling, stride 2; ties break to the first window index."""
    x = _as_tensor(x)
    N, C, H, W = _check_even_4d(x, "max_pool2")
    win = _windows(x.data)
    amax = win.argmax(axis=-1)
    out = np.take_along_axis(win, amax[..., None], axis=-1)[..., 0]

    def backward_fn(g):
        dwin = np.zeros_like(win)
        np.put_along_axis(dwin, amax[..., None], g[..., None], axis=-1)
        dx = (
            dwin.reshape(N, C, H // 2, W // 2, 2, 2)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(N, C, H, W)
        )
        return (dx,)

    return make_op(out, (x,), backward_fn)


def avg_pool2(x) -> Tensor:
    """2x2 average pooling, stride 2."""
    x = _as_tensor(x)
    N, C, H, W = _check_even_4d(x, "avg_pool2")

    def backward_fn(g):
        dx = np.repeat(np.repeat(g, 2, axis=2), 2, axis=3)
        return (dx * 0.25,)

    return make_op(_windows(x.data).mean(axis=-1), (x,), backward_fn)


def subsample2(x) -> Tensor:
    """Naive stride-2 decimation at even indices (what a strided identity
    convolution computes); the aliasing-prone reference point."""
    x = _as_tensor(x)
    N, C, H, W = _check_even_4d(x, "subsample2")

    def backward_fn(g):
        dx = np.zeros((N, C, H, W))
        dx[:, :, ::2, ::2] = g
        return (dx,)

    return make_op(x.data[:, :, ::2, ::2].copy(), (x,), backward_fn)


def _reflect_index(j: np.ndarray, n: int) -> np.ndarray:
    """Reflect indices into [0, n) without repeating the edge sample."""
    j = np.abs(j)
    return np.where(j >= n, 2 * (n - 1) - j, j)


def _blur_last(data: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    n = data.shape[-1]
    p = kernel.size // 2
    src = _reflect_index(np.arange(n)[:, None] + np.arange(-p, p + 1)[None, :], n)
    return data[..., src] @ kernel


def _blur_last_adjoint(g: np.ndarray, kernel: np.ndarray, n: int) -> np.ndarray:
    p = kernel.size // 2
    src = _reflect_index(np.arange(n)[:, None] + np.arange(-p, p + 1)[None, :], n)
    gm = np.moveaxis(g, -1, 0)
    acc = np.zeros((n,) + gm.shape[1:])
    for t in range(kernel.size):
        np.add.at(acc, src[:, t], kernel[t] * gm)
    return np.moveaxis(acc, 0, -1)


def blur_pool(x, kernel=DEFAULT_BLUR_KERNEL) -> Tensor:
    """Separable depthwise blur (reflect padding) then stride-2 subsample."""
    x = _as_tensor(x)
    N, C, H, W = _check_even_4d(x, "blur_pool")
    k = np.asarray(kernel, dtype=np.float64)
    if k.ndim != 1 or k.size % 2 == 0:
        raise InvalidHyperparameter(f"blur kernel must be 1D odd-length, got shape {k.shape}")
    if k.min() < 0 or abs(k.sum() - 1.0) > 1e-12:
        raise InvalidHyperparameter("blur kernel must be non-negative and sum to 1")
    p = k.size // 2
    if p >= min(H, W):
        raise InputTooShort(f"blur kernel radius {p} too large for {H}x{W} input")

    blurred = _blur_last(np.swapaxes(_blur_last(x.data, k), -1, -2), k)
    out = np.swapaxes(blurred, -1, -2)[:, :, ::2, ::2].copy()

    def backward_fn(g):
        gfull = np.zeros((N, C, H, W))
        gfull[:, :, ::2, ::2] = g
        d = _blur_last_adjoint(np.swapaxes(gfull, -1, -2), k, H)
        return (_blur_last_adjoint(np.swapaxes(d, -1, -2), k, W),)

    return make_op(out, (x,), backward_fn)


def make_pool(kind: PoolKind):
    """Turn a PoolKind into a unary Tensor -> Tensor operator.

    STRIDED_CONV has no standalone pooling action (the decimation lives in
    the convolution); its operator is naive subsampling, which is exactly
    what the frequency analysis needs as the aliasing baseline.
    """
    fam = kind.family
    if fam is PoolFamily.MAX_POOL2:
        return max_pool2
    if fam is PoolFamily.AVG_POOL2:
        return avg_pool2
    if fam is PoolFamily.BLUR_POOL:
        kernel = kind.blur_kernel

        def blur(x):
            return blur_pool(x, kernel)

        return blur
    if fam is PoolFamily.WAVELET_POOL:
        spec = kind.wavelet

        def wave(x):
            return wavelet_pool(x, spec)

        return wave
    return subsample2


def apply_replacement(kind: PoolKind, conv_weights=None, pad: str = "same"):
    """Compose the anti-aliased substitute for a stride-2 down-sampling site.

    Two sites exist in a standard backbone, distinguished by whether the
    original operator carried convolution weights:

    - bare 2x2 max pool (no weights): the substitute is the pooling
      operator alone;
    - stride-2 convolution (weights given): the substitute keeps the same
      weight tensor as a stride-1 convolution and appends the pooling
      operator after it, the main-path order.

    With ``kind`` = StridedConv the site is left as the original stride-2
    convolution, which therefore requires its weights.
    """
    if kind.family is PoolFamily.STRIDED_CONV:
        if conv_weights is None:
            raise ShapeMismatch("strided convolution site requires its conv weights")

        def strided(x):
            return conv2d(x, conv_weights, stride=2, pad=pad)

        return strided

    pool_fn = make_pool(kind)
    if conv_weights is None:
        return pool_fn

    def composed(x):
        return pool_fn(conv2d(x, conv_weights, stride=1, pad=pad))

    return composed
