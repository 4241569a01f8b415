"""Residual micro-networks with selectable down-sampling and accounting.

A network is stem -> stages of bottleneck blocks -> global average pool ->
linear classifier.  Three block orders exist at down-sampling blocks:

- Original ("a"): stride-2 convolutions on both the main and skip path;
- PoolBeforeConvSkip ("b"): the stride-2 convs become stride-1 convs and a
  pooling operator; the pool sits after the 3x3 conv on the main path but
  before the 1x1 conv on the skip path;
- ConsistentPoolAfterConv ("c"): pooling after the conv on both paths.

The main paths of (b) and (c) are identical by construction; the variants
differ only in skip-path order.  For 1x1 bias-free skip convs and a linear
pooling operator the two skip orders commute exactly, which the test suite
asserts.  Blocks that do not down-sample are identical across variants.

Down-sampling sites elsewhere (a stem stride-2 conv, a stem max pool)
follow the same substitution whenever ``pool`` is not StridedConv: a
stride-2 conv keeps its weights as a stride-1 conv followed by the pool; a
bare max pool site becomes the pool alone.

Conventions used by the counters (all integers, per single input image):

- conv/linear: 2 FLOPs per multiply-accumulate, plus one per output
  element when a bias is present;
- batchnorm: 2 FLOPs per element; relu: 1; residual add: 1;
- pooling: 1 FLOP per produced element per filter tap, as the operators
  are actually implemented (wavelet pooling runs separable passes, so a
  filter of length L costs L*(H*W/2) + L*(H*W/4) per channel; 2x2
  max/avg cost 4 per output element; blur costs its two full-resolution
  separable passes plus the subsample);
- global average pooling: H*W + 1 per channel.

Parameter counts sum learnable tensors only (conv/linear weights and
biases, batchnorm scale and shift); batchnorm running statistics are state,
not parameters, though checkpoints carry them.

Convolutions default to circular padding so that the whole network is
exactly equivariant to full-stride circular shifts of its input, making
shift-consistency at full stride an identity rather than an approximation;
zero padding remains available via ``conv_pad="same"``.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, replace

import numpy as np

from .autodiff import Parameter, Tensor, make_rng
from .errors import InvalidConfig, ShapeMismatch, UnsupportedFormat
from .ops import batchnorm2d, conv2d, global_avg_pool, linear, relu
from .pooling import PoolFamily, PoolKind, make_pool

CHECKPOINT_MAGIC = b"WVPK"
CHECKPOINT_VERSION = 1


class BlockOrderVariant(enum.Enum):
    ORIGINAL = "a"
    POOL_BEFORE_CONV_SKIP = "b"
    CONSISTENT_POOL_AFTER_CONV = "c"


_VARIANT_ALIASES = {
    "a": BlockOrderVariant.ORIGINAL,
    "original": BlockOrderVariant.ORIGINAL,
    "b": BlockOrderVariant.POOL_BEFORE_CONV_SKIP,
    "pool_before_conv_skip": BlockOrderVariant.POOL_BEFORE_CONV_SKIP,
    "c": BlockOrderVariant.CONSISTENT_POOL_AFTER_CONV,
    "consistent_pool_after_conv": BlockOrderVariant.CONSISTENT_POOL_AFTER_CONV,
}


def parse_variant(text: str) -> BlockOrderVariant:
    try:
        return _VARIANT_ALIASES[text.strip().lower()]
    except KeyError:
        raise InvalidConfig(f"unknown block variant {text!r}") from None


@dataclass(frozen=True)
class StageSchedule:
    """Stage layout plus stem shape.

    ``stages`` holds (block_count, bottleneck_width, downsample) triples.
    ``stem_pool`` names the stem's original pooling site (None for none);
    ``expansion`` is the bottleneck output multiple (stage output channels
    are width * expansion).
    """

    stages: tuple[tuple[int, int, bool], ...]
    stem_channels: int = 16
    stem_kernel: int = 3
    stem_stride: int = 1
    stem_pool: PoolKind | None = None
    expansion: int = 4

    def __post_init__(self):
        if not self.stages:
            raise InvalidConfig("schedule needs at least one stage")
        for count, width, _down in self.stages:
            if count < 1 or width < 1:
                raise InvalidConfig(f"stage ({count}, {width}) must have positive sizes")
        if self.stem_channels < 1 or self.expansion < 1:
            raise InvalidConfig("stem channels and expansion must be positive")
        if self.stem_kernel % 2 == 0:
            raise InvalidConfig("stem kernel must be odd")
        if self.stem_stride not in (1, 2):
            raise InvalidConfig("stem stride must be 1 or 2")

    @property
    def downsample_count(self) -> int:
        return (
            (1 if self.stem_stride == 2 else 0)
            + (1 if self.stem_pool is not None else 0)
            + sum(1 for _c, _w, down in self.stages if down)
        )


def micro_schedule() -> StageSchedule:
    """Three-stage micro net: [(2,16,T),(2,32,T),(2,64,T)], expansion 2.

    On 32x32 inputs the head sees a 4x4 map; parameter count stays under
    0.2 M for small class counts.
    """
    return StageSchedule(
        stages=((2, 16, True), (2, 32, True), (2, 64, True)),
        stem_channels=16,
        stem_kernel=3,
        stem_stride=1,
        stem_pool=None,
        expansion=2,
    )


def resnet50_schedule() -> StageSchedule:
    """ResNet50-shaped layout: used for counter validation, not training."""
    return StageSchedule(
        stages=((3, 64, False), (4, 128, True), (6, 256, True), (3, 512, True)),
        stem_channels=64,
        stem_kernel=7,
        stem_stride=2,
        stem_pool=PoolKind.max_pool2(),
        expansion=4,
    )


def bottom_heavy(schedule: StageSchedule, shift: int = 2) -> StageSchedule:
    """Re-allocate ``shift`` blocks from the deepest stage to earlier stages.

    Donated blocks are handed round-robin to the earliest stages, so every
    down-sampling transition happens later in depth while the total
    down-sampling count and the output shape are unchanged.  Interior
    bottleneck blocks cost the same FLOPs at every stage (channel width
    doubles exactly as spatial area quarters), so the swap trades a large
    parameter reduction for a near-zero FLOP change.
    """
    if len(schedule.stages) < 2:
        raise InvalidConfig("bottom_heavy needs at least 2 stages")
    if shift < 0:
        raise InvalidConfig(f"shift must be >= 0, got {shift}")
    if shift == 0:
        return schedule
    counts = [c for c, _w, _d in schedule.stages]
    if counts[-1] - shift < 1:
        raise InvalidConfig(
            f"shift {shift} would empty the deepest stage ({counts[-1]} blocks)"
        )
    counts[-1] -= shift
    for i in range(shift):
        counts[i % (len(counts) - 1)] += 1
    stages = tuple(
        (counts[i], schedule.stages[i][1], schedule.stages[i][2])
        for i in range(len(counts))
    )
    return replace(schedule, stages=stages)


# ---------------------------------------------------------------------------
# layers


def _kaiming_uniform(rng: np.random.Generator, shape, fan_in: int) -> np.ndarray:
    bound = float(np.sqrt(6.0 / fan_in))
    return rng.uniform(-bound, bound, size=shape)


class _Conv:
    def __init__(self, name, in_ch, out_ch, kernel, stride, pad, rng, bias=False):
        self.name = name
        self.in_ch, self.out_ch, self.kernel = in_ch, out_ch, kernel
        self.stride, self.pad = stride, pad
        fan_in = in_ch * kernel * kernel
        self.weight = Parameter(_kaiming_uniform(rng, (out_ch, in_ch, kernel, kernel), fan_in))
        self.bias = Parameter(np.zeros(out_ch)) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        return conv2d(x, self.weight, self.bias, stride=self.stride, pad=self.pad)

    def parameters(self):
        return [self.weight] + ([self.bias] if self.bias is not None else [])

    def state(self):
        items = [(f"{self.name}.weight", self.weight.data)]
        if self.bias is not None:
            items.append((f"{self.name}.bias", self.bias.data))
        return items

    def out_hw(self, h, w):
        return (h // self.stride, w // self.stride) if self.pad != "valid" else (
            (h - self.kernel) // self.stride + 1,
            (w - self.kernel) // self.stride + 1,
        )

    def flops(self, h, w) -> int:
        oh, ow = self.out_hw(h, w)
        macs = self.kernel * self.kernel * self.in_ch * self.out_ch * oh * ow
        return 2 * macs + (self.out_ch * oh * ow if self.bias is not None else 0)


class _BatchNorm:
    def __init__(self, name, ch):
        self.name = name
        self.ch = ch
        self.gamma = Parameter(np.ones(ch))
        self.beta = Parameter(np.zeros(ch))
        self.running_mean = np.zeros(ch)
        self.running_var = np.ones(ch)

    def __call__(self, x: Tensor, training: bool) -> Tensor:
        return batchnorm2d(
            x, self.gamma, self.beta, self.running_mean, self.running_var, training
        )

    def parameters(self):
        return [self.gamma, self.beta]

    def state(self):
        return [
            (f"{self.name}.gamma", self.gamma.data),
            (f"{self.name}.beta", self.beta.data),
            (f"{self.name}.running_mean", self.running_mean),
            (f"{self.name}.running_var", self.running_var),
        ]

    def flops(self, h, w) -> int:
        return 2 * self.ch * h * w


class _Linear:
    def __init__(self, name, in_features, out_features, rng):
        self.name = name
        self.in_features, self.out_features = in_features, out_features
        self.weight = Parameter(_kaiming_uniform(rng, (out_features, in_features), in_features))
        self.bias = Parameter(np.zeros(out_features))

    def __call__(self, x: Tensor) -> Tensor:
        return linear(x, self.weight, self.bias)

    def parameters(self):
        return [self.weight, self.bias]

    def state(self):
        return [(f"{self.name}.weight", self.weight.data), (f"{self.name}.bias", self.bias.data)]

    def flops(self) -> int:
        return 2 * self.in_features * self.out_features + self.out_features


def _pool_flops(kind: PoolKind, ch: int, h: int, w: int) -> int:
    """FLOPs of one pooling application on a (ch, h, w) map, per the
    1-FLOP-per-tap-per-produced-element convention."""
    fam = kind.family
    if fam in (PoolFamily.MAX_POOL2, PoolFamily.AVG_POOL2):
        return 4 * ch * (h // 2) * (w // 2)
    if fam is PoolFamily.WAVELET_POOL:
        L = int(kind.wavelet.analysis_low.size)
        return ch * (L * h * (w // 2) + L * (h // 2) * (w // 2))
    if fam is PoolFamily.BLUR_POOL:
        T = len(kind.blur_kernel)
        return ch * (2 * T * h * w + (h // 2) * (w // 2))
    return ch * (h // 2) * (w // 2)  # naive decimation: one tap per output


# ---------------------------------------------------------------------------
# blocks and networks


class Block:
    """Bottleneck residual block: 1x1 -> 3x3 -> 1x1 with skip connection."""

    def __init__(self, name, in_ch, out_ch, downsample, pool, variant, expansion, pad, rng):
        if in_ch < 1 or out_ch < 1:
            raise InvalidConfig(f"{name}: channel counts must be positive")
        if variant is not BlockOrderVariant.ORIGINAL and pool.family is PoolFamily.STRIDED_CONV:
            raise InvalidConfig(
                f"{name}: variant {variant.value!r} requires a pooling operator, "
                "not StridedConv"
            )
        self.name = name
        self.in_ch, self.out_ch = in_ch, out_ch
        self.downsample = bool(downsample)
        self.pool_kind = pool
        self.variant = variant
        width = max(1, out_ch // expansion)
        self.width = width

        strided = self.downsample and variant is BlockOrderVariant.ORIGINAL
        pooled = self.downsample and variant is not BlockOrderVariant.ORIGINAL
        self._pool = make_pool(pool) if pooled else None

        self.conv1 = _Conv(f"{name}.conv1", in_ch, width, 1, 1, pad, rng)
        self.bn1 = _BatchNorm(f"{name}.bn1", width)
        self.conv2 = _Conv(f"{name}.conv2", width, width, 3, 2 if strided else 1, pad, rng)
        self.bn2 = _BatchNorm(f"{name}.bn2", width)
        self.conv3 = _Conv(f"{name}.conv3", width, out_ch, 1, 1, pad, rng)
        self.bn3 = _BatchNorm(f"{name}.bn3", out_ch)

        self.has_skip_conv = self.downsample or in_ch != out_ch
        if self.has_skip_conv:
            self.skip_conv = _Conv(
                f"{name}.skip_conv", in_ch, out_ch, 1, 2 if strided else 1, pad, rng
            )
            self.skip_bn = _BatchNorm(f"{name}.skip_bn", out_ch)

    def forward(self, x: Tensor, training: bool) -> Tensor:
        h = relu(self.bn1(self.conv1(x), training))
        h = self.conv2(h)
        if self._pool is not None:
            h = self._pool(h)
        h = relu(self.bn2(h, training))
        h = self.bn3(self.conv3(h), training)

        if self.has_skip_conv:
            s = x
            if self._pool is not None and self.variant is BlockOrderVariant.POOL_BEFORE_CONV_SKIP:
                s = self._pool(s)
            s = self.skip_conv(s)
            if (
                self._pool is not None
                and self.variant is BlockOrderVariant.CONSISTENT_POOL_AFTER_CONV
            ):
                s = self._pool(s)
            s = self.skip_bn(s, training)
        else:
            s = x
        return relu(h + s)

    def skip_path(self, x: Tensor, training: bool) -> Tensor:
        """The skip branch alone; exposed for the order-commutation tests."""
        if not self.has_skip_conv:
            return x
        s = x
        if self._pool is not None and self.variant is BlockOrderVariant.POOL_BEFORE_CONV_SKIP:
            s = self._pool(s)
        s = self.skip_conv(s)
        if self._pool is not None and self.variant is BlockOrderVariant.CONSISTENT_POOL_AFTER_CONV:
            s = self._pool(s)
        return self.skip_bn(s, training)

    def layers(self):
        out = [self.conv1, self.bn1, self.conv2, self.bn2, self.conv3, self.bn3]
        if self.has_skip_conv:
            out += [self.skip_conv, self.skip_bn]
        return out

    def parameters(self):
        return [p for layer in self.layers() for p in layer.parameters()]

    def state(self):
        return [item for layer in self.layers() for item in layer.state()]

    def out_hw(self, h, w):
        return (h // 2, w // 2) if self.downsample else (h, w)

    def check_dims(self, h, w):
        if self.downsample and (h % 2 or w % 2):
            raise InvalidConfig(f"{self.name}: odd spatial dim {h}x{w} at downsample")

    def flops(self, h, w) -> int:
        self.check_dims(h, w)
        oh, ow = self.out_hw(h, w)
        pooled = self._pool is not None
        total = self.conv1.flops(h, w) + self.bn1.flops(h, w) + self.width * h * w  # relu1
        total += self.conv2.flops(h, w)  # stride already encoded for variant a
        if pooled:
            total += _pool_flops(self.pool_kind, self.width, h, w)
        total += self.bn2.flops(oh, ow) + self.width * oh * ow  # relu2
        total += self.conv3.flops(oh, ow) + self.bn3.flops(oh, ow)
        if self.has_skip_conv:
            if pooled and self.variant is BlockOrderVariant.POOL_BEFORE_CONV_SKIP:
                total += _pool_flops(self.pool_kind, self.in_ch, h, w)
                total += self.skip_conv.flops(oh, ow)
            elif pooled:  # consistent order: conv at full resolution, then pool
                total += self.skip_conv.flops(h, w)
                total += _pool_flops(self.pool_kind, self.out_ch, h, w)
            else:
                total += self.skip_conv.flops(h, w)
            total += self.skip_bn.flops(oh, ow)
        total += self.out_ch * oh * ow  # residual add
        total += self.out_ch * oh * ow  # relu3
        return total


def build_block(
    in_ch: int,
    out_ch: int,
    downsample: bool,
    pool: PoolKind,
    variant: BlockOrderVariant,
    expansion: int = 4,
    pad: str = "circular",
    rng=None,
    name: str = "block",
) -> Block:
    """Standalone bottleneck block constructor (see Block)."""
    if rng is None:
        rng = make_rng(0)
    return Block(name, in_ch, out_ch, downsample, pool, variant, expansion, pad, rng)


class Network:
    """Stem -> bottleneck stages -> global average pool -> classifier."""

    def __init__(self, schedule, pool, variant, num_classes, seed, conv_pad,
                 input_mean=None, input_std=None, in_channels=3):
        if variant is not BlockOrderVariant.ORIGINAL and pool.family is PoolFamily.STRIDED_CONV:
            raise InvalidConfig("variants b/c require a pooling operator, not StridedConv")
        if num_classes < 2:
            raise InvalidConfig(f"num_classes must be >= 2, got {num_classes}")
        self.schedule = schedule
        self.pool_kind = pool
        self.variant = variant
        self.num_classes = num_classes
        self.conv_pad = conv_pad
        self.in_channels = in_channels
        if (input_mean is None) != (input_std is None):
            raise InvalidConfig("input_mean and input_std must be given together")
        if input_mean is not None:
            input_mean = np.asarray(input_mean, dtype=np.float64).reshape(-1)
            input_std = np.asarray(input_std, dtype=np.float64).reshape(-1)
            if input_mean.shape != (in_channels,) or input_std.shape != (in_channels,):
                raise ShapeMismatch("normalization stats must have one entry per channel")
            if np.any(input_std <= 0):
                raise InvalidConfig("input_std entries must be positive")
        self.input_mean, self.input_std = input_mean, input_std

        rng = make_rng(seed)
        replace_sites = pool.family is not PoolFamily.STRIDED_CONV

        # stem: stride-2 conv and pool sites substituted like any other site
        stem_conv_stride = schedule.stem_stride
        self._stem_conv_pool = None
        if schedule.stem_stride == 2 and replace_sites:
            stem_conv_stride = 1
            self._stem_conv_pool = make_pool(pool)
        self.stem_conv = _Conv(
            "stem.conv", in_channels, schedule.stem_channels, schedule.stem_kernel,
            stem_conv_stride, conv_pad, rng,
        )
        self.stem_bn = _BatchNorm("stem.bn", schedule.stem_channels)
        self._stem_pool_kind = None
        if schedule.stem_pool is not None:
            self._stem_pool_kind = pool if replace_sites else schedule.stem_pool
            self._stem_pool = make_pool(self._stem_pool_kind)

        self.blocks: list[Block] = []
        in_ch = schedule.stem_channels
        for si, (count, width, down) in enumerate(schedule.stages):
            out_ch = width * schedule.expansion
            for bi in range(count):
                block = Block(
                    f"stage{si + 1}.block{bi}",
                    in_ch,
                    out_ch,
                    down and bi == 0,
                    pool,
                    variant,
                    schedule.expansion,
                    conv_pad,
                    rng,
                )
                self.blocks.append(block)
                in_ch = out_ch
        self.feature_channels = in_ch
        self.fc = _Linear("head.fc", in_ch, num_classes, rng)

    # -- shape bookkeeping --------------------------------------------------

    def _stem_sites(self):
        """(name, halves?, kind) tuples for stem down-sampling sites."""
        sites = []
        if self.schedule.stem_stride == 2 or self._stem_conv_pool is not None:
            sites.append("stem.conv")
        if self._stem_pool_kind is not None:
            sites.append("stem.pool")
        return sites

    def trace_shapes(self, h: int, w: int):
        """Walk spatial dims; raise InvalidConfig naming the first layer that
        would halve an odd dimension."""
        for site in self._stem_sites():
            if h % 2 or w % 2:
                raise InvalidConfig(f"{site}: odd spatial dim {h}x{w} at downsample")
            h, w = h // 2, w // 2
        for block in self.blocks:
            block.check_dims(h, w)
            h, w = block.out_hw(h, w)
        return h, w

    # -- forward ------------------------------------------------------------

    def forward(self, x, training: bool = False) -> Tensor:
        x = x if isinstance(x, Tensor) else Tensor(x)
        if x.ndim != 4 or x.shape[1] != self.in_channels:
            raise ShapeMismatch(
                f"expected (N, {self.in_channels}, H, W) input, got {x.shape}"
            )
        self.trace_shapes(x.shape[2], x.shape[3])
        if self.input_mean is not None:
            x = (x + Tensor(-self.input_mean[None, :, None, None])) * Tensor(
                1.0 / self.input_std[None, :, None, None]
            )
        h = self.stem_conv(x)
        if self._stem_conv_pool is not None:
            h = self._stem_conv_pool(h)
        h = relu(self.stem_bn(h, training))
        if self._stem_pool_kind is not None:
            h = self._stem_pool(h)
        for block in self.blocks:
            h = block.forward(h, training)
        return self.fc(global_avg_pool(h))

    __call__ = forward

    # -- parameters and serialization ----------------------------------------

    def parameters(self):
        params = self.stem_conv.parameters() + self.stem_bn.parameters()
        for block in self.blocks:
            params += block.parameters()
        return params + self.fc.parameters()

    def state(self):
        items = self.stem_conv.state() + self.stem_bn.state()
        for block in self.blocks:
            items += block.state()
        return items + self.fc.state()

    def state_dict(self) -> dict[str, np.ndarray]:
        return dict(self.state())

    def load_state(self, tensors: dict[str, np.ndarray]) -> None:
        own = self.state()
        own_names = [name for name, _arr in own]
        missing = [n for n in own_names if n not in tensors]
        extra = [n for n in tensors if n not in set(own_names)]
        if missing or extra:
            raise ShapeMismatch(
                f"checkpoint does not match model (missing {missing[:3]}, "
                f"unexpected {extra[:3]})"
            )
        for name, arr in own:
            new = tensors[name]
            if new.shape != arr.shape:
                raise ShapeMismatch(f"{name}: checkpoint shape {new.shape} != {arr.shape}")
            arr[...] = new


def build_network(
    schedule: StageSchedule,
    pool: PoolKind,
    variant: BlockOrderVariant,
    num_classes: int,
    seed: int = 0,
    conv_pad: str = "circular",
    input_mean=None,
    input_std=None,
    in_channels: int = 3,
) -> Network:
    return Network(
        schedule, pool, variant, num_classes, seed, conv_pad, input_mean, input_std, in_channels
    )


# ---------------------------------------------------------------------------
# counters


def count_params(model: Network) -> int:
    return int(sum(p.data.size for p in model.parameters() if p.learnable))


def count_flops(model: Network, h: int, w: int) -> int:
    """Forward FLOPs for one (in_channels, h, w) image per the documented
    integer conventions."""
    model.trace_shapes(h, w)
    total = 0
    ch = model.schedule.stem_channels
    if model.input_mean is not None:
        total += 2 * model.in_channels * h * w
    total += model.stem_conv.flops(h, w)
    h2, w2 = model.stem_conv.out_hw(h, w)
    if model._stem_conv_pool is not None:
        total += _pool_flops(model.pool_kind, ch, h2, w2)
        h2, w2 = h2 // 2, w2 // 2
    total += model.stem_bn.flops(h2, w2) + ch * h2 * w2  # bn + relu
    if model._stem_pool_kind is not None:
        total += _pool_flops(model._stem_pool_kind, ch, h2, w2)
        h2, w2 = h2 // 2, w2 // 2
    for block in model.blocks:
        total += block.flops(h2, w2)
        h2, w2 = block.out_hw(h2, w2)
    total += model.feature_channels * (h2 * w2 + 1)  # global average pool
    total += model.fc.flops()
    return int(total)


# ---------------------------------------------------------------------------
# checkpoints


def save_checkpoint(model: Network, path) -> None:
    """Versioned flat binary of named tensors, little-endian doubles."""
    items = model.state()
    with open(path, "wb") as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(struct.pack("<II", CHECKPOINT_VERSION, len(items)))
        for name, arr in items:
            encoded = name.encode("utf-8")
            f.write(struct.pack("<H", len(encoded)))
            f.write(encoded)
            f.write(struct.pack("<B", arr.ndim))
            f.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            f.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_checkpoint(path) -> dict[str, np.ndarray]:
    with open(path, "rb") as f:
        blob = f.read()
    if blob[:4] != CHECKPOINT_MAGIC:
        raise UnsupportedFormat(f"{path}: not a checkpoint file (bad magic)")
    version, count = struct.unpack_from("<II", blob, 4)
    if version != CHECKPOINT_VERSION:
        raise UnsupportedFormat(f"{path}: checkpoint version {version} unsupported")
    off = 12
    tensors: dict[str, np.ndarray] = {}
    try:
        for _ in range(count):
            (name_len,) = struct.unpack_from("<H", blob, off)
            off += 2
            name = blob[off:off + name_len].decode("utf-8")
            off += name_len
            (ndim,) = struct.unpack_from("<B", blob, off)
            off += 1
            shape = struct.unpack_from(f"<{ndim}I", blob, off)
            off += 4 * ndim
            n = int(np.prod(shape, dtype=np.int64)) if ndim else 1
            arr = np.frombuffer(blob, dtype="<f8", count=n, offset=off).reshape(shape)
            off += 8 * n
            tensors[name] = arr.astype(np.float64)
    except (struct.error, ValueError) as exc:
        raise UnsupportedFormat(f"{path}: truncated or corrupt checkpoint") from exc
    return tensors


def load_checkpoint(model: Network, path) -> None:
    model.load_state(read_checkpoint(path))
