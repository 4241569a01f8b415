"""Two-dimensional wavelet analysis of a synthetic scene.

Builds a 64x64 image with a smooth gradient, a high-frequency texture
patch, and an edge; decomposes it into LL/LH/HL/HH subbands; reports how
the energy splits; and confirms the round trip back to the input is exact
to double precision.

Run:  python3 demos/subband_transforms.py
"""

import numpy as np

from wavepool.filterbank import parse_wavelet
from wavepool.transforms import dwt2d, idwt2d, reconstruct_lowpass


def make_scene(size=64):
    i, j = np.indices((size, size))
    image = 0.3 + 0.4 * (i + j) / (2 * size)          # smooth diagonal ramp
    patch = slice(8, 24)
    image[patch, patch] += 0.2 * ((i + j) % 2 - 0.5)[patch, patch]  # texture
    image[:, size // 2] += 0.3                         # vertical edge
    return image


def main():
    image = make_scene()
    total = float(np.sum(image**2))
    print(f"input: 64x64 scene, energy {total:.3f}")
    print("=" * 60)
    for name in ("haar", "db4", "ch5.5"):
        spec = parse_wavelet(name)
        bands = dwt2d(image, spec)
        rebuilt = idwt2d(bands, spec)
        err = float(np.max(np.abs(rebuilt - image)))
        energy = {
            "ll": float(np.sum(bands.ll**2)),
            "lh": float(np.sum(bands.lh**2)),
            "hl": float(np.sum(bands.hl**2)),
            "hh": float(np.sum(bands.hh**2)),
        }
        subtotal = sum(energy.values())
        print(f"\n{name}")
        for band, e in energy.items():
            bar = "#" * int(round(50 * e / subtotal))
            print(f"  {band}  {e / subtotal:7.2%}  {bar}")
        print(f"  reconstruction error {err:.3e}")

    # The low-pass projection keeps the smooth ramp and suppresses the
    # texture patch: compare residual energy inside vs outside the patch.
    spec = parse_wavelet("haar")
    lowpass = reconstruct_lowpass(image, spec)
    residual = image - lowpass
    patch = slice(8, 24)
    inside = float(np.sum(residual[patch, patch] ** 2))
    print(f"\nhaar low-pass projection: {inside / np.sum(residual**2):.1%} of the")
    print("discarded energy sits in the 16x16 texture patch (6% of the area)")


if __name__ == "__main__":
    main()
