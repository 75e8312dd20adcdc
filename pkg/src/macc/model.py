"""Cyclic multi-access network model: topology, index arithmetic, bit blocks, libraries."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union


@dataclass(frozen=True)
class Bits:
    """Fixed-length bit string. ``v`` holds the bits MSB-first, so bit 0 is the leftmost."""

    n: int
    v: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"negative bit length {self.n}")
        if not 0 <= self.v < (1 << self.n):
            raise ValueError(f"value {self.v} does not fit in {self.n} bits")

    def __xor__(self, other: "Bits") -> "Bits":
        if self.n != other.n:
            raise ValueError(f"XOR length mismatch: {self.n} vs {other.n}")
        return Bits(self.n, self.v ^ other.v)

    def bit(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.v >> (self.n - 1 - i)) & 1

    def slice(self, start: int, stop: int) -> "Bits":
        if not 0 <= start <= stop <= self.n:
            raise IndexError((start, stop))
        m = stop - start
        return Bits(m, (self.v >> (self.n - stop)) & ((1 << m) - 1))

    def concat(self, other: "Bits") -> "Bits":
        return Bits(self.n + other.n, (self.v << other.n) | other.v)

    def to01(self) -> str:
        return format(self.v, f"0{self.n}b") if self.n else ""

    def to_hex(self) -> str:
        digits = (self.n + 3) // 4
        return format(self.v, f"0{digits}x") if self.n else ""

    @classmethod
    def from01(cls, s: str) -> "Bits":
        return cls(len(s), int(s, 2) if s else 0)

    @classmethod
    def from_hex(cls, s: str, n: int) -> "Bits":
        return cls(n, int(s, 16) if s else 0)

    @classmethod
    def zeros(cls, n: int) -> "Bits":
        return cls(n, 0)


def concat_bits(blocks: Iterable[Bits]) -> Bits:
    out = Bits.zeros(0)
    for b in blocks:
        out = out.concat(b)
    return out


def xor_bits(blocks: Iterable[Bits], n: Union[int, None] = None) -> Bits:
    """XOR-fold equal-length blocks; ``n`` supplies the length for an empty fold."""
    out: Union[Bits, None] = None
    for b in blocks:
        out = b if out is None else out ^ b
    if out is None:
        if n is None:
            raise ValueError("empty XOR with unknown length")
        return Bits.zeros(n)
    return out


@dataclass(frozen=True)
class NetworkConfig:
    """A (K, L, N) cyclic multi-access network with F-bit files."""

    K: int
    L: int
    N: int
    F: int
    subfiles_per_file: int

    def __post_init__(self) -> None:
        if self.K < 2 or not 1 <= self.L < self.K:
            raise ValueError(f"need 1 <= L < K, got K={self.K}, L={self.L}")
        if self.N < 1:
            raise ValueError(f"need N >= 1, got {self.N}")
        if self.F < 1 or self.subfiles_per_file < 1:
            raise ValueError("F and subfiles_per_file must be positive")
        if self.F % self.subfiles_per_file:
            raise ValueError(
                f"F={self.F} not divisible by subfiles_per_file={self.subfiles_per_file}"
            )

    @property
    def subfile_bits(self) -> int:
        return self.F // self.subfiles_per_file


def mod_index(i: int, K: int) -> int:
    """Cyclic index in [1..K]: i mod K, with multiples of K mapping to K."""
    if K < 1:
        raise ValueError(f"need K >= 1, got {K}")
    r = i % K
    return r if r else K


def cyclic_range(a: int, b: int, K: int) -> list[int]:
    """Closed wrap-around interval [a..b] on a K-cycle."""
    if not (1 <= a <= K and 1 <= b <= K):
        raise ValueError(f"endpoints out of range: a={a}, b={b}, K={K}")
    if a <= b:
        return list(range(a, b + 1))
    return list(range(a, K + 1)) + list(range(1, b + 1))


def accessible_caches(k: int, cfg: NetworkConfig) -> list[int]:
    """The L cyclically consecutive cache indices user k can read, starting at k."""
    if not 1 <= k <= cfg.K:
        raise ValueError(f"user index {k} out of range [1..{cfg.K}]")
    return [mod_index(k + i, cfg.K) for i in range(cfg.L)]


@dataclass(frozen=True)
class SubfileLibrary:
    """N files, each an ordered tuple of equal-length subfiles."""

    files: tuple[tuple[Bits, ...], ...]

    def __post_init__(self) -> None:
        if not self.files:
            raise ValueError("library must hold at least one file")
        s = len(self.files[0])
        if s < 1 or any(len(f) != s for f in self.files):
            raise ValueError("all files must have the same positive subfile count")
        b = self.files[0][0].n
        if any(sf.n != b for f in self.files for sf in f):
            raise ValueError("all subfiles must have equal bit length")

    @property
    def n_files(self) -> int:
        return len(self.files)

    @property
    def subfiles_per_file(self) -> int:
        return len(self.files[0])

    @property
    def subfile_bits(self) -> int:
        return self.files[0][0].n

    @property
    def file_bits(self) -> int:
        return self.subfiles_per_file * self.subfile_bits

    def subfile(self, n: int, j: int) -> Bits:
        """Subfile W_{n,j}; both indices 1-based."""
        return self.files[n - 1][j - 1]

    def file(self, n: int) -> Bits:
        return concat_bits(self.files[n - 1])


RawFile = Union[str, Bits]


def split_library(raw_files: Sequence[RawFile], subfiles_per_file: int) -> SubfileLibrary:
    """Split each raw file into equal-size subfiles, order-preserving."""
    if subfiles_per_file < 1:
        raise ValueError("subfiles_per_file must be positive")
    files = []
    for raw in raw_files:
        bits = Bits.from01(raw) if isinstance(raw, str) else raw
        if bits.n % subfiles_per_file:
            raise ValueError(
                f"file size {bits.n} not divisible by {subfiles_per_file} subfiles"
            )
        b = bits.n // subfiles_per_file
        files.append(tuple(bits.slice(i * b, (i + 1) * b) for i in range(subfiles_per_file)))
    return SubfileLibrary(tuple(files))


def random_library(N: int, F: int, subfiles_per_file: int, seed: int) -> SubfileLibrary:
    import random

    rng = random.Random(seed)
    raw = [Bits(F, rng.getrandbits(F)) for _ in range(N)]
    return split_library(raw, subfiles_per_file)


def library_from_int(N: int, subfiles_per_file: int, subfile_bits: int, x: int) -> SubfileLibrary:
    """Decode an enumeration index into a library: file 1 occupies the most significant bits."""
    total = N * subfiles_per_file * subfile_bits
    whole = Bits(total, x)
    b = subfile_bits
    files = tuple(
        tuple(
            whole.slice(((n * subfiles_per_file) + j) * b, ((n * subfiles_per_file) + j + 1) * b)
            for j in range(subfiles_per_file)
        )
        for n in range(N)
    )
    return SubfileLibrary(files)


@dataclass(frozen=True)
class DemandVector:
    demands: tuple[int, ...]

    def validated(self, cfg: NetworkConfig) -> "DemandVector":
        if len(self.demands) != cfg.K:
            raise ValueError(f"expected {cfg.K} demands, got {len(self.demands)}")
        if any(not 1 <= d <= cfg.N for d in self.demands):
            raise ValueError(f"demand out of range [1..{cfg.N}]: {self.demands}")
        return self


def all_demand_vectors(N: int, K: int) -> Iterator[tuple[int, ...]]:
    import itertools

    return itertools.product(range(1, N + 1), repeat=K)


@dataclass(frozen=True)
class CodedBlock:
    """A stored coded block plus the coefficient metadata identifying it."""

    label: tuple
    block: Bits


@dataclass(frozen=True)
class CacheContent:
    """One cache: uncoded (file, subfile) references plus coded blocks."""

    uncoded: frozenset[tuple[int, int]]
    coded: tuple[CodedBlock, ...]

    def stored_bits(self, subfile_bits: int) -> int:
        return len(self.uncoded) * subfile_bits + sum(cb.block.n for cb in self.coded)


PlacementState = tuple[CacheContent, ...]


# --- JSON layout ------------------------------------------------------------
# Config: {"K":, "L":, "N":, "F":, "subfiles_per_file":}
# Library: {"subfiles_per_file":, "file_bits":, "files": [hex, ...]} with each
# file serialized MSB-first and left-padded to ceil(F/4) hex digits.


def config_to_json(cfg: NetworkConfig) -> str:
    return json.dumps(
        {"K": cfg.K, "L": cfg.L, "N": cfg.N, "F": cfg.F, "subfiles_per_file": cfg.subfiles_per_file}
    )


def config_from_json(s: str) -> NetworkConfig:
    d = json.loads(s)
    return NetworkConfig(d["K"], d["L"], d["N"], d["F"], d["subfiles_per_file"])


def library_to_json(lib: SubfileLibrary) -> str:
    return json.dumps(
        {
            "subfiles_per_file": lib.subfiles_per_file,
            "file_bits": lib.file_bits,
            "files": [lib.file(n).to_hex() for n in range(1, lib.n_files + 1)],
        }
    )


def library_from_json(s: str) -> SubfileLibrary:
    d = json.loads(s)
    raw = [Bits.from_hex(h, d["file_bits"]) for h in d["files"]]
    return split_library(raw, d["subfiles_per_file"])
