"""Subfile partition, cache contents and byte-level library slicing."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import prod
from typing import NamedTuple, Sequence

from .errors import InvalidArgumentError
from .model import MemoryAllocation, Topology
from .symfunc import elem_sym

__all__ = [
    "SubfileId",
    "PlacementSpec",
    "Library",
    "subpacketize",
    "build_placement",
    "verify_placement",
    "clique_count",
    "placement_to_json",
    "placement_from_json",
]


class SubfileId(NamedTuple):
    """Subfile ``(tau, m)``: stored exactly in the caches ``tau``, ``m``-th of its class."""

    tau: tuple[int, ...]
    m: int

    @property
    def label(self) -> str:
        return ",".join(map(str, self.tau)) + f":{self.m}"

    @classmethod
    def parse(cls, text: str) -> "SubfileId":
        try:
            tau_part, m_part = text.rsplit(":", 1)
            tau = tuple(int(x) for x in tau_part.split(",")) if tau_part else ()
            return cls(tau, int(m_part))
        except ValueError as exc:
            raise InvalidArgumentError(f"malformed subfile label {text!r}") from exc

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class PlacementSpec:
    topo: Topology
    t: int
    S: int
    subfiles: tuple[SubfileId, ...]
    contents: tuple[frozenset, ...]
    _index: dict = field(repr=False, compare=False, default_factory=dict)

    def cache(self, label: int) -> frozenset:
        """Subfile ids stored by cache ``label`` (same for every file)."""
        return self.contents[label - 1]

    def position(self, sid: SubfileId) -> int:
        """0-based position of ``sid`` in the canonical order."""
        return self._index[sid]

    def class_size(self, tau: Sequence[int]) -> int:
        """``|A_tau|``, the number of subfiles stored exactly in ``tau``."""
        return prod(self.topo.occupancy(lab) for lab in tau)


def subpacketize(topo: Topology, t: int) -> int:
    """Number of subfiles per file, ``e_t(L)`` (1 for ``t = 0``)."""
    return elem_sym(topo.L, topo.check_budget(t))


def build_placement(topo: Topology, t: int) -> PlacementSpec:
    """Split every file into ``e_t(L)`` subfiles and fill the caches.

    Subfile classes ``tau`` run over the t-subsets of labels in lexicographic
    order, each with ``prod(L[tau])`` members numbered from 1.  Cache ``l``
    stores every subfile whose class contains ``l``.  ``t = 0`` yields the single
    class ``()`` that no cache stores.
    """
    t = topo.check_budget(t)
    subfiles = []
    stored = [set() for _ in topo.labels]
    for tau in combinations(topo.labels, t):
        count = prod(topo.occupancy(lab) for lab in tau)
        for m in range(1, count + 1):
            sid = SubfileId(tau, m)
            subfiles.append(sid)
            for lab in tau:
                stored[lab - 1].add(sid)
    subfiles = tuple(subfiles)
    index = {sid: i for i, sid in enumerate(subfiles)}
    return PlacementSpec(
        topo=topo,
        t=t,
        S=len(subfiles),
        subfiles=subfiles,
        contents=tuple(frozenset(s) for s in stored),
        _index=index,
    )


def verify_placement(spec: PlacementSpec, alloc: MemoryAllocation) -> bool:
    """Regularity and size accounting of a placement against an allocation."""
    if spec.S != len(spec.subfiles) or spec.S != subpacketize(spec.topo, spec.t):
        return False
    copies = Counter()
    for stored in spec.contents:
        copies.update(stored)
    if any(copies[sid] != spec.t for sid in spec.subfiles):
        return False
    if any(sid not in spec._index for sid in copies):
        return False
    if len(alloc.gamma) != spec.topo.Lambda:
        return False
    return all(len(stored) == g * spec.S for stored, g in zip(spec.contents, alloc.gamma))


def clique_count(topo: Topology, Q: Sequence[int]) -> int:
    """``P_Q = prod_{l in Q} L_l``: XORs needed for the (t+1)-set ``Q``."""
    for lab in Q:
        if not 1 <= lab <= topo.Lambda:
            raise InvalidArgumentError(f"unknown cache label {lab}")
    if len(set(Q)) != len(Q):
        raise InvalidArgumentError(f"cache set has repeated labels: {list(Q)}")
    return prod(topo.occupancy(lab) for lab in Q)


class Library:
    """Byte payloads of ``N`` files, zero-padded and cut into ``S`` subfiles each.

    Subfile ``k`` (canonical position) of file ``n`` is the slice
    ``[k * subfile_length, (k + 1) * subfile_length)`` of the padded payload.
    Files are numbered from 1.
    """

    def __init__(self, payloads: Sequence[bytes], S: int):
        if S < 1:
            raise InvalidArgumentError(f"subpacketization must be positive, got {S}")
        if not payloads:
            raise InvalidArgumentError("library needs at least one file")
        self.S = S
        self.lengths = tuple(len(p) for p in payloads)
        longest = max(max(self.lengths), 1)
        self.subfile_length = -(-longest // S)
        size = self.subfile_length * S
        self._files = tuple(bytes(p) + bytes(size - len(p)) for p in payloads)

    @classmethod
    def random(cls, N: int, S: int, subfile_length: int = 8, seed: int = 0) -> "Library":
        rng = random.Random(seed)
        return cls([rng.randbytes(subfile_length * S) for _ in range(N)], S)

    @property
    def N(self) -> int:
        return len(self._files)

    @property
    def file_bytes(self) -> int:
        """Padded file length in bytes."""
        return self.subfile_length * self.S

    def payload(self, n: int) -> bytes:
        """Original (unpadded) bytes of file ``n``."""
        return self._files[n - 1][: self.lengths[n - 1]]

    def padded(self, n: int) -> bytes:
        return self._files[n - 1]

    def subfile(self, n: int, position: int) -> bytes:
        w = self.subfile_length
        return self._files[n - 1][position * w:(position + 1) * w]

    def split(self, n: int) -> list[bytes]:
        return [self.subfile(n, k) for k in range(self.S)]

    def assemble(self, n: int, pieces: Sequence[bytes]) -> bytes:
        """Inverse of :meth:`split`, with the padding stripped."""
        return b"".join(pieces)[: self.lengths[n - 1]]


def placement_to_json(spec: PlacementSpec) -> dict:
    """Placement dump: occupancies, budget and per-cache subfile labels."""
    return {
        "L": list(spec.topo.L),
        "t": spec.t,
        "S": spec.S,
        "caches": {
            str(lab): [sid.label for sid in spec.subfiles if sid in spec.cache(lab)]
            for lab in spec.topo.labels
        },
    }


def placement_from_json(obj: dict) -> PlacementSpec:
    """Rebuild a placement from its dump, rejecting dumps that were altered."""
    try:
        topo = Topology(tuple(obj["L"]))
        spec = build_placement(topo, int(obj["t"]))
        caches = obj["caches"]
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed placement dump: {exc}") from exc
    for lab in topo.labels:
        listed = {SubfileId.parse(s) for s in caches.get(str(lab), [])}
        if listed != spec.cache(lab):
            raise InvalidArgumentError(f"placement dump for cache {lab} does not match L and t")
    if "S" in obj and obj["S"] != spec.S:
        raise InvalidArgumentError(f"placement dump has S={obj['S']}, expected {spec.S}")
    return spec
