"""Baseline demand-private scheme: AIR-coded placement plus a demand-independent broadcast.

Every file splits into a coded-cached part (L equal pieces, encoded by a K x L
AIR matrix into one block per cache) and a broadcast remainder. Delivery never
looks at the demands, so privacy is structural; every user decodes all N files.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .gf2 import build_air, gf2_solve_window
from .model import Bits, CacheContent, CodedBlock, PlacementState, concat_bits, xor_bits


@dataclass(frozen=True)
class BaselineParams:
    K: int
    L: int
    N: int
    F: int
    M: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "M", Fraction(self.M))
        if self.K < 2 or not 1 <= self.L < self.K:
            raise ValueError(f"need 1 <= L < K, got K={self.K}, L={self.L}")
        if self.N < 1 or self.F < 1:
            raise ValueError("N and F must be positive")
        if not 0 <= self.M <= Fraction(self.N, self.L):
            raise ValueError(f"M={self.M} outside [0, N/L] = [0, {Fraction(self.N, self.L)}]")
        part = self.M * self.F / self.N
        if part.denominator != 1:
            raise ValueError(f"M*F/N = {part} is not an integer; adjust F")

    @property
    def part_bits(self) -> int:
        """Size of each of the L pieces of the cached file part (= coded block size)."""
        return int(self.M * self.F / self.N)

    @property
    def cached_bits(self) -> int:
        return self.L * self.part_bits

    @property
    def broadcast_bits(self) -> int:
        return self.F - self.cached_bits

    @property
    def rate(self) -> Fraction:
        return self.N - self.L * self.M


def _split_file(params: BaselineParams, f: Bits) -> tuple[list[Bits], Bits]:
    b = params.part_bits
    parts = [f.slice(i * b, (i + 1) * b) for i in range(params.L)]
    return parts, f.slice(params.cached_bits, params.F)


def baseline_place(params: BaselineParams, files: Sequence[Bits]) -> PlacementState:
    """Cache k holds, for every file n, the AIR-coded block over the file's L cached pieces."""
    if len(files) != params.N or any(f.n != params.F for f in files):
        raise ValueError(f"expected {params.N} files of {params.F} bits")
    air = build_air(params.K, params.L)
    caches = []
    for k in range(1, params.K + 1):
        row = air.rows[k - 1]
        coded = []
        for n in range(1, params.N + 1):
            parts, _ = _split_file(params, files[n - 1])
            block = xor_bits(
                (parts[c] for c in range(params.L) if (row >> c) & 1), n=params.part_bits
            )
            coded.append(CodedBlock(("C", n, k), block))
        caches.append(CacheContent(frozenset(), tuple(coded)))
    return tuple(caches)


def baseline_deliver(params: BaselineParams, files: Sequence[Bits]) -> tuple[Bits, Fraction]:
    """Broadcast the uncached remainder of every file, in file order; demand-independent."""
    payload = concat_bits(_split_file(params, f)[1] for f in files)
    return payload, params.rate


def baseline_decode(
    params: BaselineParams, k: int, payload: Bits, placement: PlacementState
) -> list[Bits]:
    """Reconstruct all N files from user k's L coded cache blocks plus the broadcast."""
    air = build_air(params.K, params.L)
    window = [(k - 1 + i) % params.K for i in range(params.L)]
    w2_bits = params.broadcast_bits
    out = []
    for n in range(1, params.N + 1):
        rhs = []
        for c in window:
            (block,) = [cb.block for cb in placement[c].coded if cb.label == ("C", n, c + 1)]
            rhs.append(block)
        parts = gf2_solve_window(air, k, rhs)
        w2 = payload.slice((n - 1) * w2_bits, n * w2_bits)
        out.append(concat_bits(parts).concat(w2))
    return out


def memory_grid_file_size(N: int, L: int, grid: Sequence[Union[Fraction, int]]) -> int:
    """Smallest F (a multiple of N*L) making every grid point's block sizes integral."""
    from math import lcm

    denom = lcm(1, *(Fraction(m).denominator for m in grid))
    return N * L * denom
