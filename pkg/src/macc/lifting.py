"""Lifting transform: wrap a C1-compliant non-private scheme into a demand-private one.

Round 1 copies the base placement. Round 2 draws, per user and per private-set
slot, a uniform coefficient vector over the N files and stores one coded key
share per missing subfile index in that slot's cache. Delivery masks each
demand inside a coefficient column q_k and runs the base scheme over K virtual
files, one per user.

Coefficient vectors over files are plain ints: bit (n-1) selects file n.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import (
    Bits,
    CacheContent,
    CodedBlock,
    NetworkConfig,
    PlacementState,
    SubfileLibrary,
    accessible_caches,
    concat_bits,
    mod_index,
    xor_bits,
)
from .private_sets import is_private_set
from .schemes import NonPrivateScheme, check_condition_c1


@dataclass(frozen=True)
class KeyMaterial:
    """K*t uniform coefficient vectors over GF(2)^N, regenerable from the seed."""

    K: int
    t: int
    N: int
    seed: int | None
    p: tuple[tuple[int, ...], ...]  # p[k-1][alpha-1], each an N-bit mask

    def __post_init__(self) -> None:
        if len(self.p) != self.K or any(len(row) != self.t for row in self.p):
            raise ValueError("key material shape mismatch")
        if any(not 0 <= v < (1 << self.N) for row in self.p for v in row):
            raise ValueError("key vector does not fit N bits")

    @classmethod
    def generate(cls, K: int, t: int, N: int, seed: int) -> "KeyMaterial":
        rng = random.Random(seed)
        p = tuple(tuple(rng.getrandbits(N) for _ in range(t)) for _ in range(K))
        return cls(K, t, N, seed, p)

    @classmethod
    def from_int(cls, K: int, t: int, N: int, x: int) -> "KeyMaterial":
        """Unpack an enumeration index, user-major then slot-major, MSB-first."""
        total = K * t * N
        if not 0 <= x < (1 << total):
            raise ValueError("key index out of range")
        vecs = []
        for i in range(K * t):
            shift = total - (i + 1) * N
            vecs.append((x >> shift) & ((1 << N) - 1))
        p = tuple(tuple(vecs[k * t + a] for a in range(t)) for k in range(K))
        return cls(K, t, N, None, p)

    def r(self, k: int) -> int:
        """Combined mask r_k, the XOR of user k's t vectors."""
        out = 0
        for v in self.p[k - 1]:
            out ^= v
        return out


def coeff_xor_subfiles(coeff: int, library: SubfileLibrary, j: int) -> Bits:
    """XOR of the j-th subfiles of the files selected by the coefficient mask."""
    return xor_bits(
        (library.subfile(n, j) for n in range(1, library.n_files + 1) if (coeff >> (n - 1)) & 1),
        n=library.subfile_bits,
    )


def lifted_memory(M: Fraction, t: int, L: int, N: int) -> Fraction:
    return Fraction(M) + t * (1 - Fraction(L) * M / N)


def share_cache(offsets: Sequence[int], k: int, alpha: int, K: int) -> int:
    """Cache holding user k's alpha-th key share (1-based alpha)."""
    return mod_index(offsets[alpha - 1] + k - 1, K)


def lift_place(
    base: NonPrivateScheme,
    cfg: NetworkConfig,
    offsets: Sequence[int],
    library: SubfileLibrary,
    keys: KeyMaterial,
    enforce_private: bool = True,
) -> PlacementState:
    """Two-round placement: the base placement plus coded key shares on the private sets.

    `offsets` are user 1's private-set cache indices; other users' sets follow
    by cyclic shift. `enforce_private=False` permits invalid key placements
    (used to demonstrate the known-broken naive placement).
    """
    base.validate(cfg)
    offsets = tuple(sorted(offsets))
    t = len(offsets)
    if not check_condition_c1(base, cfg):
        raise ValueError("base scheme violates condition C1")
    if enforce_private and not is_private_set(offsets, 1, cfg):
        raise ValueError(f"offsets {offsets} do not form a private set for K={cfg.K}, L={cfg.L}")
    if (keys.K, keys.t, keys.N) != (cfg.K, t, cfg.N):
        raise ValueError("key material shape does not match the configuration")

    round1 = base.place(cfg)
    extra: list[list[CodedBlock]] = [[] for _ in range(cfg.K)]
    for k in range(1, cfg.K + 1):
        for j in base.missing_subfile_indices(cfg, k):
            for alpha in range(1, t + 1):
                block = coeff_xor_subfiles(keys.p[k - 1][alpha - 1], library, j)
                target = share_cache(offsets, k, alpha, cfg.K)
                extra[target - 1].append(CodedBlock(("S", k, alpha, j), block))
    return tuple(
        CacheContent(round1[c].uncoded, tuple(sorted(extra[c], key=lambda cb: cb.label)))
        for c in range(cfg.K)
    )


@dataclass(frozen=True)
class LiftedTransmission:
    q_columns: tuple[int, ...]  # column k at index k-1, an N-bit mask
    n_files: int
    payload: Bits
    rate: Fraction

    @property
    def q_bits(self) -> int:
        """Q overhead in bits: K columns of N bits, accounted separately from the rate."""
        return len(self.q_columns) * self.n_files


def lift_deliver(
    base: NonPrivateScheme,
    cfg: NetworkConfig,
    keys: KeyMaterial,
    library: SubfileLibrary,
    demands: Sequence[int],
) -> LiftedTransmission:
    """Broadcast (Q, payload): masked demand columns plus the base delivery over virtual files."""
    if len(demands) != cfg.K or any(not 1 <= d <= cfg.N for d in demands):
        raise ValueError(f"bad demand vector {tuple(demands)} for N={cfg.N}, K={cfg.K}")
    q = tuple(keys.r(k) ^ (1 << (demands[k - 1] - 1)) for k in range(1, cfg.K + 1))
    vcfg = NetworkConfig(cfg.K, cfg.L, cfg.K, cfg.F, cfg.subfiles_per_file)
    vlib = SubfileLibrary(
        tuple(
            tuple(coeff_xor_subfiles(q[k], library, j) for j in range(1, cfg.subfiles_per_file + 1))
            for k in range(cfg.K)
        )
    )
    payload, rate = base.deliver(vcfg, vlib, tuple(range(1, cfg.K + 1)))
    return LiftedTransmission(q, cfg.N, payload, rate)


def lift_decode(
    base: NonPrivateScheme,
    cfg: NetworkConfig,
    k: int,
    tx: LiftedTransmission,
    placement: PlacementState,
    library: SubfileLibrary,
    d_k: int,
) -> Bits:
    """Recover W_{d_k} from user k's caches, its own demand, and the transmission.

    Only content reachable through user k's accessible caches is touched; the
    library is consulted strictly through cached uncoded references.
    """
    window = accessible_caches(k, cfg)
    reachable = frozenset().union(*(placement[c - 1].uncoded for c in window))

    def cached(n: int, j: int) -> Bits:
        if (n, j) not in reachable:
            raise LookupError(f"subfile W_{{{n},{j}}} not in user {k}'s caches")
        return library.subfile(n, j)

    # Virtual subfiles are computable from cached real subfiles because the
    # round-1 placement is file symmetric.
    def virtual(v: int, j: int) -> Bits:
        return xor_bits(
            (cached(n, j) for n in range(1, cfg.N + 1) if (tx.q_columns[v - 1] >> (n - 1)) & 1),
            n=cfg.subfile_bits,
        )

    vcfg = NetworkConfig(cfg.K, cfg.L, cfg.K, cfg.F, cfg.subfiles_per_file)
    vfile = base.decode(vcfg, k, tx.payload, virtual, tuple(range(1, cfg.K + 1)))

    shares: dict[tuple[int, int], Bits] = {}
    for c in window:
        for cb in placement[c - 1].coded:
            tag, owner, alpha, j = cb.label
            if tag == "S" and owner == k:
                shares[(alpha, j)] = cb.block

    b = cfg.subfile_bits
    parts = []
    stored = base.stored_subfile_indices(cfg, k)
    for j in range(1, cfg.subfiles_per_file + 1):
        if j in stored:
            parts.append(cached(d_k, j))
        else:
            key_shares = [blk for (alpha, jj), blk in shares.items() if jj == j]
            parts.append(xor_bits([vfile.slice((j - 1) * b, j * b)] + key_shares))
    return concat_bits(parts)
