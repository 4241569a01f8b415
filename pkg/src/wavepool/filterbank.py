"""Wavelet filter banks used by every transform and pooling operation.

Each wavelet is a set of four FIR filters: analysis low/high-pass used for
decomposition, and synthesis (dual) low/high-pass used for reconstruction.
For orthogonal wavelets the synthesis filters equal the analysis filters;
biorthogonal (Cohen/CDF) wavelets carry a distinct, shorter dual pair.

Normalization convention: every low-pass filter sums to sqrt(2) (so a
constant signal gains sqrt(2) per transformed axis) and every high-pass
filter sums to zero.  High-pass filters follow the alternating-sign
quadrature-mirror rule h[n] = (-1)^n * l~[L-1-n] built from the opposite
branch's low-pass filter, which for orthogonal wavelets reduces to
h[n] = (-1)^n * l[L-1-n].

Filters of different lengths are center-aligned: a synthesis filter of
length K pairs with an analysis filter of length J by shifting its support
(J - K) / 2 taps, exposed as ``synthesis_low_offset``/``synthesis_high_offset``
and consumed by the transforms when building the adjoint operators.  All
coefficients are frozen double-precision literals (exact rationals times
sqrt(2) for the Cohen family, 60-digit spectral factorization rounded to
double for Daubechies) and are re-validated by the test suite through
``check_biorthogonality`` and round-trip reconstruction.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedWavelet

_SQRT2 = math.sqrt(2.0)
_INVSQRT2 = 1.0 / math.sqrt(2.0)


class Family(enum.Enum):
    ORTHOGONAL = "orthogonal"
    BIORTHOGONAL = "biorthogonal"


@dataclass(frozen=True, eq=False)
class WaveletSpec:
    """A named wavelet: four filter coefficient vectors plus family tag."""

    name: str
    analysis_low: np.ndarray
    analysis_high: np.ndarray
    synthesis_low: np.ndarray
    synthesis_high: np.ndarray
    family: Family

    def __post_init__(self):
        for attr in ("analysis_low", "analysis_high", "synthesis_low", "synthesis_high"):
            arr = np.asarray(getattr(self, attr), dtype=np.float64)
            if arr.ndim != 1 or arr.size < 2 or arr.size % 2 != 0:
                raise UnsupportedWavelet(
                    f"{self.name}: filter '{attr}' must be a 1D even-length vector of >= 2 taps"
                )
            arr.flags.writeable = False
            object.__setattr__(self, attr, arr)

    def __eq__(self, other):
        if not isinstance(other, WaveletSpec):
            return NotImplemented
        return (
            self.name == other.name
            and self.family is other.family
            and all(
                np.array_equal(getattr(self, a), getattr(other, a))
                for a in ("analysis_low", "analysis_high", "synthesis_low", "synthesis_high")
            )
        )

    def __hash__(self):
        return hash((self.name, self.family))

    @property
    def max_length(self) -> int:
        return max(self.analysis_low.size, self.analysis_high.size)

    @property
    def synthesis_low_offset(self) -> int:
        """Support shift aligning synthesis_low with analysis_low."""
        return (self.analysis_low.size - self.synthesis_low.size) // 2

    @property
    def synthesis_high_offset(self) -> int:
        """Support shift aligning synthesis_high with analysis_high."""
        return (self.analysis_high.size - self.synthesis_high.size) // 2


@dataclass(frozen=True)
class ResidualReport:
    """Maximum absolute violation of each filter-duality condition.

    Conditions, over every integer shift m (filters center-aligned):
      low/low:   sum_n l[n] * l~[n - 2m] = delta_m
      high/high: sum_n h[n] * h~[n - 2m] = delta_m
      low/high:  sum_n l[n] * h~[n - 2m] = 0
      high/low:  sum_n h[n] * l~[n - 2m] = 0
    """

    residuals: dict[str, float] = field(repr=False)
    max_residual: float = 0.0


def _qmf(low_dual: np.ndarray) -> np.ndarray:
    """Alternating-sign mirror: h[n] = (-1)^n * low_dual[L-1-n]."""
    L = low_dual.size
    signs = np.where(np.arange(L) % 2 == 0, 1.0, -1.0)
    return signs * low_dual[::-1]


def _spec(name, analysis_low, synthesis_low=None, family=Family.ORTHOGONAL):
    l = np.asarray(analysis_low, dtype=np.float64)
    lt = l if synthesis_low is None else np.asarray(synthesis_low, dtype=np.float64)
    return WaveletSpec(
        name=name,
        analysis_low=l,
        analysis_high=_qmf(lt),
        synthesis_low=lt,
        synthesis_high=_qmf(l),
        family=family,
    )


# Daubechies analysis low-pass filters (min-phase, sum = sqrt(2)).
_DB_LOW = {
    1: (_INVSQRT2, _INVSQRT2),
    2: (
        0.48296291314453416,
        0.8365163037378079,
        0.2241438680420134,
        -0.12940952255126037,
    ),
    3: (
        0.33267055295008263,
        0.8068915093110925,
        0.45987750211849154,
        -0.13501102001025458,
        -0.08544127388202666,
        0.03522629188570953,
    ),
    4: (
        0.2303778133088965,
        0.7148465705529157,
        0.6308807679298589,
        -0.027983769416859854,
        -0.18703481171909309,
        0.030841381835560764,
        0.0328830116668852,
        -0.010597401785069032,
    ),
}

# Cohen (CDF spline) pairs: analysis low is the long filter, synthesis low
# the short B-spline dual.  Exact values: ch3.3 analysis = sqrt(2)/64 *
# [3,-9,-7,45,45,-7,-9,3], synthesis = sqrt(2)/8 * [1,3,3,1]; ch5.5
# analysis = sqrt(2)/4096 * [35,-175,120,800,-1357,-1575,4200,4200,-1575,
# -1357,800,120,-175,35], synthesis = sqrt(2)/32 * [1,5,10,10,5,1].
_COHEN = {
    (3, 3): (
        (
            0.06629126073623882,
            -0.1988737822087165,
            -0.15467960838455727,
            0.9943689110435825,
            0.9943689110435825,
            -0.15467960838455727,
            -0.1988737822087165,
            0.06629126073623882,
        ),
        (
            0.1767766952966369,
            0.5303300858899106,
            0.5303300858899106,
            0.1767766952966369,
        ),
    ),
    (5, 5): (
        (
            0.012084344405043537,
            -0.060421722025217686,
            0.04143203796014927,
            0.27621358640099514,
            -0.468527295932688,
            -0.5437954982269592,
            1.4501213286052244,
            1.4501213286052244,
            -0.5437954982269592,
            -0.468527295932688,
            0.27621358640099514,
            0.04143203796014927,
            -0.060421722025217686,
            0.012084344405043537,
        ),
        (
            0.04419417382415922,
            0.2209708691207961,
            0.4419417382415922,
            0.4419417382415922,
            0.2209708691207961,
            0.04419417382415922,
        ),
    ),
}


def make_haar() -> WaveletSpec:
    """Orthonormal Haar wavelet: analysis_low = [1/sqrt2, 1/sqrt2]."""
    return _spec("haar", _DB_LOW[1])


def make_daubechies(k: int) -> WaveletSpec:
    """Length-2k orthonormal Daubechies filter set, 1 <= k <= 4.

    Daubechies(1) is the Haar wavelet.
    """
    if k not in _DB_LOW:
        raise UnsupportedWavelet(f"Daubechies order {k} not supported (1..4)")
    return _spec(f"db{k}", _DB_LOW[k])


def make_cohen(k: int, k_dual: int) -> WaveletSpec:
    """Biorthogonal Cohen (CDF spline) wavelet for (k, k_dual) in
    {(1,1), (3,3), (5,5)}.

    Cohen(1,1) is coefficient-identical to Haar and therefore orthogonal.
    """
    if (k, k_dual) == (1, 1):
        return _spec("ch1.1", _DB_LOW[1])
    if (k, k_dual) not in _COHEN:
        raise UnsupportedWavelet(f"Cohen({k},{k_dual}) not supported")
    ana, syn = _COHEN[(k, k_dual)]
    return _spec(f"ch{k}.{k_dual}", ana, syn, family=Family.BIORTHOGONAL)


_NAME_RE = re.compile(r"^(haar|db(?P<db>\d+)|ch(?P<ck>\d+)\.(?P<ckd>\d+))$")


def parse_wavelet(name: str) -> WaveletSpec:
    """Build a spec from a config string: "haar", "db{k}" or "ch{k}.{k~}"."""
    m = _NAME_RE.match(name.strip())
    if m is None:
        raise UnsupportedWavelet(f"cannot parse wavelet name {name!r}")
    if m.group("db") is not None:
        return make_daubechies(int(m.group("db")))
    if m.group("ck") is not None:
        return make_cohen(int(m.group("ck")), int(m.group("ckd")))
    return make_haar()


def supported_wavelets() -> tuple[str, ...]:
    return ("haar", "db1", "db2", "db3", "db4", "ch1.1", "ch3.3", "ch5.5")


def _aligned_correlation(a: np.ndarray, b: np.ndarray, offset: int) -> np.ndarray:
    """sum_n a[n] * b[n - 2m - offset] for every m with support overlap.

    Returns the sequence indexed so that m = 0 sits at the center entry.
    """
    J, K = a.size, b.size
    span = (J + K) // 2 + abs(offset)
    ms = np.arange(-span, span + 1)
    out = np.zeros(ms.size)
    for i, m in enumerate(ms):
        shift = 2 * int(m) + offset
        n_lo = max(0, shift)
        n_hi = min(J, K + shift)
        if n_lo < n_hi:
            out[i] = float(np.dot(a[n_lo:n_hi], b[n_lo - shift:n_hi - shift]))
    return out


def check_biorthogonality(spec: WaveletSpec) -> ResidualReport:
    """Evaluate the four filter-duality conditions, center-aligned.

    For orthogonal specs (synthesis = analysis) this reduces to the usual
    orthonormality conditions sum_n l[n] l[n-2m] = delta_m.
    """
    pairs = {
        "low_low": (spec.analysis_low, spec.synthesis_low, spec.synthesis_low_offset, True),
        "high_high": (spec.analysis_high, spec.synthesis_high, spec.synthesis_high_offset, True),
        "low_high": (spec.analysis_low, spec.synthesis_high, spec.synthesis_high_offset, False),
        "high_low": (spec.analysis_high, spec.synthesis_low, spec.synthesis_low_offset, False),
    }
    residuals = {}
    for cond, (a, b, off, is_delta) in pairs.items():
        corr = _aligned_correlation(a, b, off)
        if is_delta:
            corr = corr.copy()
            corr[corr.size // 2] -= 1.0
        residuals[cond] = float(np.max(np.abs(corr)))
    return ResidualReport(residuals=residuals, max_residual=max(residuals.values()))
