"""Non-private multi-access schemes with uncoded, file-symmetric placement.

Both shipped schemes satisfy condition C1 (pairwise-disjoint subfile sets across
any user's accessible caches) and work for any file count N, which lets the
lifting transform run them unmodified over virtual libraries.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Callable, Sequence

from .model import (
    Bits,
    CacheContent,
    NetworkConfig,
    PlacementState,
    SubfileLibrary,
    accessible_caches,
    concat_bits,
    mod_index,
    xor_bits,
)

# A payload plan is an ordered tuple of XOR groups; each group is a tuple of
# (file, subfile) references whose XOR forms one payload block. The broadcast
# payload is the concatenation of the groups in order.
PayloadPlan = tuple[tuple[tuple[int, int], ...], ...]

SubfileLookup = Callable[[int, int], Bits]


class NonPrivateScheme(ABC):
    """Behavioral contract: placement map, deterministic delivery, per-user decode.

    Decode receives the full demand vector: in the non-private setting every
    user learns all demands during delivery.
    """

    name: str

    def validate(self, cfg: NetworkConfig) -> None:
        if cfg.subfiles_per_file != self.subfiles_per_file(cfg):
            raise ValueError(
                f"{self.name} needs subfiles_per_file={self.subfiles_per_file(cfg)}, "
                f"got {cfg.subfiles_per_file}"
            )

    @abstractmethod
    def subfiles_per_file(self, cfg: NetworkConfig) -> int: ...

    @abstractmethod
    def memory_per_cache(self, cfg: NetworkConfig) -> Fraction:
        """Per-cache memory M in file units."""

    @abstractmethod
    def placement_map(self, cfg: NetworkConfig) -> tuple[frozenset[int], ...]:
        """For each cache k, the subfile indices j stored (for every file n)."""

    @abstractmethod
    def payload_plan(self, cfg: NetworkConfig, demands: Sequence[int]) -> PayloadPlan: ...

    @abstractmethod
    def decode(
        self,
        cfg: NetworkConfig,
        k: int,
        payload: Bits,
        lookup: SubfileLookup,
        demands: Sequence[int],
    ) -> Bits:
        """Recover W_{d_k} from the payload and cached subfiles (via `lookup`)."""

    def rate(self, cfg: NetworkConfig) -> Fraction:
        """Declared delivery rate in file units (demand-independent for shipped schemes)."""
        plan = self.payload_plan(cfg, [1] * cfg.K)
        return Fraction(len(plan) * cfg.subfile_bits, cfg.F)

    def deliver(
        self, cfg: NetworkConfig, library: SubfileLibrary, demands: Sequence[int]
    ) -> tuple[Bits, Fraction]:
        self.validate(cfg)
        if any(not 1 <= d <= cfg.N for d in demands) or len(demands) != cfg.K:
            raise ValueError(f"bad demand vector {tuple(demands)} for N={cfg.N}, K={cfg.K}")
        plan = self.payload_plan(cfg, demands)
        payload = concat_bits(
            xor_bits((library.subfile(n, j) for n, j in group), n=cfg.subfile_bits)
            for group in plan
        )
        return payload, self.rate(cfg)

    def place(self, cfg: NetworkConfig) -> PlacementState:
        jmap = self.placement_map(cfg)
        return tuple(
            CacheContent(
                frozenset((n, j) for n in range(1, cfg.N + 1) for j in jmap[c]), ()
            )
            for c in range(cfg.K)
        )

    def stored_subfile_indices(self, cfg: NetworkConfig, k: int) -> frozenset[int]:
        jmap = self.placement_map(cfg)
        return frozenset().union(*(jmap[c - 1] for c in accessible_caches(k, cfg)))

    def missing_subfile_indices(self, cfg: NetworkConfig, k: int) -> tuple[int, ...]:
        stored = self.stored_subfile_indices(cfg, k)
        return tuple(j for j in range(1, cfg.subfiles_per_file + 1) if j not in stored)


def check_condition_c1(scheme: NonPrivateScheme, cfg: NetworkConfig) -> bool:
    """C1: the caches accessible to any one user hold pairwise-disjoint subfile sets."""
    jmap = scheme.placement_map(cfg)
    for k in range(1, cfg.K + 1):
        window = accessible_caches(k, cfg)
        for a in range(len(window)):
            for b in range(a + 1, len(window)):
                if jmap[window[a] - 1] & jmap[window[b] - 1]:
                    return False
    return True


class CyclicUncodedScheme(NonPrivateScheme):
    """Stride-L cyclic placement with unicast delivery of each user's missing subfiles.

    Each file splits into K subfiles; cache k stores indices {<k + iL>_K} for
    i < t_placement. The stride keeps any L consecutive caches disjoint, so C1
    holds by construction. Delivery is plain unicast, user-major then ascending
    subfile index.
    """

    name = "cyclic-uncoded"

    def __init__(self, t_placement: int):
        if t_placement < 0:
            raise ValueError("t_placement must be non-negative")
        self.t_placement = t_placement

    def subfiles_per_file(self, cfg: NetworkConfig) -> int:
        return cfg.K

    def validate(self, cfg: NetworkConfig) -> None:
        super().validate(cfg)
        if self.t_placement > cfg.K // cfg.L:
            raise ValueError(
                f"t_placement={self.t_placement} exceeds floor(K/L)={cfg.K // cfg.L}"
            )

    def memory_per_cache(self, cfg: NetworkConfig) -> Fraction:
        return Fraction(self.t_placement * cfg.N, cfg.K)

    def placement_map(self, cfg: NetworkConfig) -> tuple[frozenset[int], ...]:
        return tuple(
            frozenset(mod_index(k + i * cfg.L, cfg.K) for i in range(self.t_placement))
            for k in range(1, cfg.K + 1)
        )

    def payload_plan(self, cfg: NetworkConfig, demands: Sequence[int]) -> PayloadPlan:
        return tuple(
            ((demands[k - 1], j),)
            for k in range(1, cfg.K + 1)
            for j in self.missing_subfile_indices(cfg, k)
        )

    def decode(self, cfg, k, payload, lookup, demands) -> Bits:
        missing = self.missing_subfile_indices(cfg, k)
        b = cfg.subfile_bits
        offset = (k - 1) * len(missing) * b  # all users miss the same count
        parts = {}
        for pos, j in enumerate(missing):
            parts[j] = payload.slice(offset + pos * b, offset + (pos + 1) * b)
        for j in self.stored_subfile_indices(cfg, k):
            parts[j] = lookup(demands[k - 1], j)
        return concat_bits(parts[j] for j in range(1, cfg.K + 1))


class Example1Scheme(NonPrivateScheme):
    """K=3, L=2 scheme with one subfile per cache and a single coded broadcast.

    Cache j stores W_{n,j} for all n; the delivery is the lone XOR block
    W_{d_1,3} + W_{d_2,1} + W_{d_3,2}, giving rate 1/3.
    """

    name = "example1"

    def subfiles_per_file(self, cfg: NetworkConfig) -> int:
        return 3

    def validate(self, cfg: NetworkConfig) -> None:
        super().validate(cfg)
        if cfg.K != 3 or cfg.L != 2:
            raise ValueError(f"{self.name} requires K=3, L=2, got K={cfg.K}, L={cfg.L}")

    def memory_per_cache(self, cfg: NetworkConfig) -> Fraction:
        return Fraction(cfg.N, 3)

    def placement_map(self, cfg: NetworkConfig) -> tuple[frozenset[int], ...]:
        return tuple(frozenset({k}) for k in range(1, 4))

    @staticmethod
    def _missing(k: int) -> int:
        return mod_index(k + 2, 3)

    def payload_plan(self, cfg: NetworkConfig, demands: Sequence[int]) -> PayloadPlan:
        return (tuple((demands[k - 1], self._missing(k)) for k in range(1, 4)),)

    def decode(self, cfg, k, payload, lookup, demands) -> Bits:
        # Strip the other users' terms: their missing indices are exactly the
        # two subfile indices user k holds in cache.
        block = payload
        for k2 in range(1, 4):
            if k2 != k:
                block = block ^ lookup(demands[k2 - 1], self._missing(k2))
        parts = {self._missing(k): block}
        for j in (k, mod_index(k + 1, 3)):
            parts[j] = lookup(demands[k - 1], j)
        return concat_bits(parts[j] for j in range(1, 4))


SCHEME_NAMES = {
    "cyclic-uncoded": CyclicUncodedScheme,
    "example1": Example1Scheme,
}


def make_scheme(name: str, t_placement: int = 1) -> NonPrivateScheme:
    if name == "cyclic-uncoded":
        return CyclicUncodedScheme(t_placement)
    if name == "example1":
        return Example1Scheme()
    raise ValueError(f"unknown scheme {name!r}; known: {sorted(SCHEME_NAMES)}")
