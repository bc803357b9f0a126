"""Coefficient carriers: where the "LL" and "HH" embedding slots live.

A carrier splits one image layer into two real-valued coefficient planes,
``LL`` (coarse / low frequency) and ``HH`` (fine / high frequency), and puts
a layer back together from (possibly modified) planes. All coefficients not
exposed through the two planes pass through untouched.

``dwt``
    The first-level D4 subbands LL and HH (each H/2 x W/2). LH and HL are
    carried through unchanged.
``dct`` / ``wht``
    Orthonormal 8x8 block DCT-II / sequency-ordered Walsh-Hadamard. In each
    transform block the first 32 coefficients in JPEG zigzag order (DC plus
    31 lowest) form the low group and the last 32 the high group. A group is
    written row-major into a 4x8 tile placed at the block's grid position, so
    each plane is (H/2) x W.
``dft``
    Unitary 8x8 block DFT. Of the 64 bins, 34 are independent for real input
    (4 self-conjugate bins plus one of each conjugate pair, the lexicographic
    smaller). These are ordered by squared signed frequency, then (u, v). The
    16 lowest form the low group and the 16 highest the high group (the two
    middle bins are untouched), each written into a 4x4 tile, giving planes
    of (H/2) x (W/2). The plane value of a bin is its signed magnitude along
    the phase of the reference (cover) coefficient; modifying it changes the
    magnitude and its conjugate partner follows, so the layer stays real.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .transforms import (
    SubbandSet,
    dct2_block,
    dwt2_forward,
    dwt2_inverse,
    from_blocks,
    idct2_block,
    iwht2_block,
    to_blocks,
    wht2_block,
    zigzag_order,
)

__all__ = ["Carrier", "get_carrier", "CARRIERS"]

BANDS = ("LL", "HH")


class Carrier:
    name = ""

    def split(self, plane, reference=None):
        """Return ({'LL': plane, 'HH': plane}, state)."""
        raise NotImplementedError

    def merge(self, state, bands) -> np.ndarray:
        raise NotImplementedError


class DwtCarrier(Carrier):
    name = "dwt"

    def split(self, plane, reference=None):
        sb = dwt2_forward(plane)
        return {"LL": sb.ll.copy(), "HH": sb.hh.copy()}, sb

    def merge(self, state: SubbandSet, bands):
        return dwt2_inverse(state.replace(ll=bands["LL"], hh=bands["HH"]))


def _group_to_plane(values: np.ndarray, tile: tuple[int, int]) -> np.ndarray:
    nr, nc, _ = values.shape
    return from_blocks(values.reshape(nr, nc, *tile))


def _plane_to_group(plane: np.ndarray, grid: tuple[int, int], tile: tuple[int, int]) -> np.ndarray:
    nr, nc = grid
    th, tw = tile
    return plane.reshape(nr, th, nc, tw).swapaxes(1, 2).reshape(nr, nc, th * tw)


@dataclass
class _BlockState:
    coeffs: np.ndarray  # (nr, nc, 8, 8)
    extra: object = None


class _GroupedBlockCarrier(Carrier):
    """Block transform whose 8x8 coefficients are split into two groups."""

    tile = (4, 8)

    def __init__(self, forward, inverse):
        self._forward = forward
        self._inverse = inverse
        zz = zigzag_order(8)
        self._low = tuple(np.array(v) for v in zip(*zz[:32]))
        self._high = tuple(np.array(v) for v in zip(*zz[32:]))

    def split(self, plane, reference=None):
        tiles = to_blocks(self._forward(plane)).copy()
        grid = tiles.shape[:2]
        bands = {
            "LL": _group_to_plane(tiles[:, :, self._low[0], self._low[1]], self.tile),
            "HH": _group_to_plane(tiles[:, :, self._high[0], self._high[1]], self.tile),
        }
        return bands, _BlockState(tiles, grid)

    def merge(self, state: _BlockState, bands):
        tiles = state.coeffs.copy()
        grid = state.extra
        tiles[:, :, self._low[0], self._low[1]] = _plane_to_group(np.asarray(bands["LL"]), grid, self.tile)
        tiles[:, :, self._high[0], self._high[1]] = _plane_to_group(np.asarray(bands["HH"]), grid, self.tile)
        return self._inverse(from_blocks(tiles))


class DctCarrier(_GroupedBlockCarrier):
    name = "dct"

    def __init__(self):
        super().__init__(dct2_block, idct2_block)


class WhtCarrier(_GroupedBlockCarrier):
    name = "wht"

    def __init__(self):
        super().__init__(wht2_block, iwht2_block)


def _dft_bins(n: int = 8):
    def signed(u):
        return u if u <= n // 2 else u - n

    reps = []
    for u in range(n):
        for v in range(n):
            pu, pv = (-u) % n, (-v) % n
            if (u, v) <= (pu, pv):
                reps.append((u, v))
    reps.sort(key=lambda b: (signed(b[0]) ** 2 + signed(b[1]) ** 2, b[0], b[1]))
    return reps


class DftCarrier(Carrier):
    name = "dft"
    tile = (4, 4)

    def __init__(self):
        reps = _dft_bins(8)
        low, high = reps[:16], reps[-16:]
        self._low = tuple(np.array(v) for v in zip(*low))
        self._high = tuple(np.array(v) for v in zip(*high))
        self._low_conj = tuple((-a) % 8 for a in self._low)
        self._high_conj = tuple((-a) % 8 for a in self._high)

    @staticmethod
    def _unit(coeffs: np.ndarray) -> np.ndarray:
        mag = np.abs(coeffs)
        unit = np.ones_like(coeffs)
        nz = mag > 0
        unit[nz] = coeffs[nz] / mag[nz]
        # self-conjugate bins are real for real input; pin them to +/-1
        for u in (0, 4):
            for v in (0, 4):
                unit[:, :, u, v] = np.where(coeffs[:, :, u, v].real < 0, -1.0, 1.0)
        return unit

    def split(self, plane, reference=None):
        tiles = np.fft.fft2(to_blocks(np.asarray(plane, dtype=np.float64)), axes=(2, 3), norm="ortho")
        grid = tiles.shape[:2]
        unit = reference.extra if reference is not None else self._unit(tiles)
        signed = (tiles * np.conj(unit)).real
        bands = {
            "LL": _group_to_plane(signed[:, :, self._low[0], self._low[1]], self.tile),
            "HH": _group_to_plane(signed[:, :, self._high[0], self._high[1]], self.tile),
        }
        return bands, _BlockState(tiles, unit)

    def merge(self, state: _BlockState, bands):
        tiles = state.coeffs.copy()
        unit = state.extra
        grid = tiles.shape[:2]
        for name, idx, conj in (("LL", self._low, self._low_conj), ("HH", self._high, self._high_conj)):
            values = _plane_to_group(np.asarray(bands[name]), grid, self.tile)
            new = values * unit[:, :, idx[0], idx[1]]
            tiles[:, :, idx[0], idx[1]] = new
            tiles[:, :, conj[0], conj[1]] = np.conj(new)
        layer = np.fft.ifft2(tiles, axes=(2, 3), norm="ortho").real
        return from_blocks(layer)


CARRIERS = {"dwt": DwtCarrier, "dct": DctCarrier, "wht": WhtCarrier, "dft": DftCarrier}


def get_carrier(name: str) -> Carrier:
    try:
        return CARRIERS[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown transform {name!r}; choose from {sorted(CARRIERS)}") from None
