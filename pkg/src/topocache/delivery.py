"""Clique-XOR delivery: scheduling, byte-level decoding and delivery times."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DecodeError, InvalidArgumentError
from .model import RationalLike, Topology, split_budget
from .placement import Library, PlacementSpec, SubfileId, build_placement
from .symfunc import elem_sym

__all__ = [
    "Demand",
    "Transmission",
    "DeliveryReport",
    "schedule",
    "decode",
    "deliver",
    "delivery_time",
    "schedule_fractional",
    "xor_bytes",
]


@dataclass(frozen=True)
class Demand:
    """Requested file of every user plus the user-to-cache association.

    ``d[k - 1]`` is the file (1-based) wanted by user ``k``;
    ``users_per_cache[l - 1]`` lists the users attached to cache ``l``.
    """

    d: tuple[int, ...]
    users_per_cache: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        d = tuple(self.d)
        groups = tuple(tuple(sorted(g)) for g in self.users_per_cache)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "users_per_cache", groups)
        for n in d:
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                raise InvalidArgumentError(f"file indices start at 1, got {n!r}")
        users = [u for g in groups for u in g]
        if sorted(users) != list(range(1, len(d) + 1)):
            raise InvalidArgumentError(
                f"users_per_cache must partition users 1..{len(d)}, got {list(groups)}"
            )

    @classmethod
    def contiguous(cls, occupancy: Sequence[int], d: Sequence[int] | None = None) -> "Demand":
        """Attach users ``1..L_1`` to cache 1, the next ``L_2`` to cache 2, and so on.

        Without ``d`` every user requests a different file (``d = 1..K``).
        """
        groups, nxt = [], 1
        for count in occupancy:
            if count < 0:
                raise InvalidArgumentError(f"negative occupancy {count}")
            groups.append(tuple(range(nxt, nxt + count)))
            nxt += count
        if d is None:
            d = range(1, nxt)
        return cls(tuple(d), tuple(groups))

    @classmethod
    def from_json(cls, obj: dict, occupancy: Sequence[int] | None = None) -> "Demand":
        """Parse ``{"d": [...], "users_per_cache": [...]}``.

        ``users_per_cache`` may hold either user-id lists or plain counts; a
        missing entry falls back to ``occupancy`` with contiguous numbering.
        """
        if not isinstance(obj, dict):
            raise InvalidArgumentError(f"demand must be a JSON object, got {type(obj).__name__}")
        d = obj.get("d")
        upc = obj.get("users_per_cache")
        if upc is None:
            if occupancy is None:
                raise InvalidArgumentError("demand needs users_per_cache")
            return cls.contiguous(occupancy, d)
        if all(isinstance(x, int) for x in upc):
            return cls.contiguous(upc, d)
        if d is None:
            d = range(1, sum(len(g) for g in upc) + 1)
        return cls(tuple(d), tuple(tuple(g) for g in upc))

    def to_json(self) -> dict:
        return {"d": list(self.d), "users_per_cache": [list(g) for g in self.users_per_cache]}

    @property
    def K(self) -> int:
        return len(self.d)

    @property
    def occupancy(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.users_per_cache)

    @property
    def distinct(self) -> bool:
        return len(set(self.d)) == len(self.d)

    def users(self, label: int) -> tuple[int, ...]:
        return self.users_per_cache[label - 1]

    def cache_of(self, user: int) -> int:
        for lab, group in enumerate(self.users_per_cache, start=1):
            if user in group:
                return lab
        raise InvalidArgumentError(f"unknown user {user}")

    def file_of(self, user: int) -> int:
        return self.d[user - 1]


@dataclass(frozen=True)
class Transmission:
    """``X_Q(j)``: XOR of one wanted subfile per participating cache of ``Q``.

    ``constituents`` holds ``(user, subfile)`` pairs; ``payload`` is ``None``
    when the schedule was built without a library.
    """

    Q: tuple[int, ...]
    j: int
    constituents: tuple[tuple[int, SubfileId], ...]
    payload: bytes | None = None


@dataclass(frozen=True)
class DeliveryReport:
    num_transmissions: int
    S: int
    T: Fraction
    decode_ok: tuple[bool, ...]
    T_realized: Fraction | None = None
    granule: Fraction | None = None
    rounds: tuple[tuple[int, int, int], ...] = ()

    @property
    def all_decoded(self) -> bool:
        return all(self.decode_ok)


def xor_bytes(chunks: Iterable[bytes], length: int) -> bytes:
    acc = 0
    for c in chunks:
        acc ^= int.from_bytes(c, "big")
    return acc.to_bytes(length, "big")


def _check_files(demand: Demand, library: Library | None) -> None:
    if library is not None and max(demand.d, default=0) > library.N:
        raise InvalidArgumentError(
            f"demand requests file {max(demand.d)} but the library has {library.N} files"
        )


def _clique_schedule(spec, demand, library, allow_padding):
    """Shared core of the aware and the mismatched schedulers.

    For each (t+1)-set ``Q`` and each ``l`` in ``Q`` the subfiles of class
    ``Q - l`` wanted by the users of cache ``l`` are listed (users ascending,
    then ``m`` ascending) and slot ``j`` of every list is XORed together.
    """
    if len(demand.users_per_cache) != spec.topo.Lambda:
        raise InvalidArgumentError(
            f"demand covers {len(demand.users_per_cache)} caches, placement has {spec.topo.Lambda}"
        )
    _check_files(demand, library)
    txs = []
    for Q in combinations(spec.topo.labels, spec.t + 1):
        wanted = []
        for lam in Q:
            tau = tuple(x for x in Q if x != lam)
            size = spec.class_size(tau)
            wanted.append(
                [(u, SubfileId(tau, m)) for u in demand.users(lam) for m in range(1, size + 1)]
            )
        lengths = {len(w) for w in wanted}
        if not allow_padding and len(lengths) > 1:
            raise InvalidArgumentError(
                f"demand occupancy {demand.occupancy} does not match placement L={spec.topo.L}"
            )
        for j in range(max(lengths)):
            parts = tuple(w[j] for w in wanted if j < len(w))
            payload = None
            if library is not None:
                payload = xor_bytes(
                    (library.subfile(demand.file_of(u), spec.position(sid)) for u, sid in parts),
                    library.subfile_length,
                )
            txs.append(Transmission(Q, j + 1, parts, payload))
    return txs


def schedule(spec: PlacementSpec, demand: Demand, library: Library | None = None) -> list[Transmission]:
    """Clique-XOR schedule for a placement whose topology matches the demand.

    Emits ``prod(L[Q])`` XORs per (t+1)-set ``Q``, ``e_{t+1}(L)`` in total.
    Payloads are filled in when ``library`` is given.
    """
    if demand.occupancy != spec.topo.L:
        raise InvalidArgumentError(
            f"demand occupancy {demand.occupancy} does not match placement L={spec.topo.L}"
        )
    return _clique_schedule(spec, demand, library, allow_padding=False)


def decode(
    spec: PlacementSpec, demand: Demand, txs: Sequence[Transmission], library: Library
) -> dict[int, bytes]:
    """Recover every user's requested file from its cache and the transmissions.

    A user only ever reads subfiles its own cache stores; every other piece
    must come out of a transmission in which all remaining constituents are
    cached locally.  Returns the unpadded file bytes per user.
    """
    _check_files(demand, library)
    by_constituent = {}
    for tx in txs:
        for u, sid in tx.constituents:
            by_constituent[(u, sid)] = tx
    out = {}
    for lam, group in enumerate(demand.users_per_cache, start=1):
        cached = spec.cache(lam)
        for user in group:
            n = demand.file_of(user)
            pieces = []
            for pos, sid in enumerate(spec.subfiles):
                if sid in cached:
                    pieces.append(library.subfile(n, pos))
                    continue
                tx = by_constituent.get((user, sid))
                if tx is None:
                    raise DecodeError(user, sid, "no transmission carries it")
                if tx.payload is None:
                    raise DecodeError(user, sid, "transmission has no payload")
                side = []
                for other, osid in tx.constituents:
                    if (other, osid) == (user, sid):
                        continue
                    if osid not in cached:
                        raise DecodeError(user, sid, f"interference {osid} is not cached at {lam}")
                    side.append(library.subfile(demand.file_of(other), spec.position(osid)))
                pieces.append(xor_bytes([tx.payload, *side], library.subfile_length))
            out[user] = library.assemble(n, pieces)
    return out


def _decode_ok(decoded: dict[int, bytes], demand: Demand, library: Library) -> tuple[bool, ...]:
    return tuple(decoded.get(u) == library.payload(demand.file_of(u)) for u in range(1, demand.K + 1))


def deliver(spec: PlacementSpec, demand: Demand, library: Library) -> DeliveryReport:
    """Schedule, transmit and decode; report the exact delivery time."""
    txs = schedule(spec, demand, library)
    decoded = decode(spec, demand, txs, library)
    return DeliveryReport(
        num_transmissions=len(txs),
        S=spec.S,
        T=Fraction(len(txs), spec.S),
        decode_ok=_decode_ok(decoded, demand, library),
    )


def _integer_time(L: Sequence[int], t: int) -> Fraction:
    return Fraction(elem_sym(L, t + 1), elem_sym(L, t))


def delivery_time(topo: Topology, t: RationalLike) -> Fraction:
    """Achievable worst-case delivery time.

    Integer budgets give ``e_{t+1}(L) / e_t(L)``; fractional budgets are the
    memory-sharing mix of the two neighbouring integer points.
    """
    t = topo.check_rational_budget(t)
    share = split_budget(t, topo.Lambda)
    low = _integer_time(topo.L, share.floor_budget)
    if share.floor_budget == share.ceil_budget:
        return low
    return share.alpha * low + (1 - share.alpha) * _integer_time(topo.L, share.ceil_budget)


def _payloads(library) -> list[bytes]:
    if isinstance(library, Library):
        return [library.payload(n) for n in range(1, library.N + 1)]
    return [bytes(p) for p in library]


def schedule_fractional(topo: Topology, t: RationalLike, demand: Demand, library) -> DeliveryReport:
    """Two-round memory-sharing delivery for a possibly fractional budget.

    Every file is zero-padded to the common length ``F`` and cut at
    ``floor(alpha * F)`` bytes.  The head is placed and delivered with budget
    ``floor(t)``, the tail with ``ceil(t)``.  ``T`` is the exact mixed delivery
    time; ``T_realized`` counts the bytes actually sent over ``F``.  Per-subfile
    padding (at most one byte per XOR, plus the cut rounding) keeps
    ``|T_realized - T| <= granule``.
    """
    t = topo.check_rational_budget(t)
    if demand.occupancy != topo.L:
        raise InvalidArgumentError(f"demand occupancy {demand.occupancy} does not match L={topo.L}")
    payloads = _payloads(library)
    F = max((len(p) for p in payloads), default=0)
    if F == 0:
        raise InvalidArgumentError("library files must be non-empty")
    padded = [p + bytes(F - len(p)) for p in payloads]
    share = split_budget(t, topo.Lambda)
    if share.floor_budget == share.ceil_budget:
        parts = [(share.floor_budget, padded)]
    else:
        cut = (share.alpha * F).__floor__()
        parts = [
            (share.floor_budget, [p[:cut] for p in padded]),
            (share.ceil_budget, [p[cut:] for p in padded]),
        ]
    recovered = {u: b"" for u in range(1, demand.K + 1)}
    rounds, sent, n_total = [], 0, 0
    bound = 0
    for budget, chunks in parts:
        spec = build_placement(topo, budget)
        if all(len(c) == 0 for c in chunks):
            # nothing sent, but the exact time still charges this round
            rounds.append((budget, spec.S, 0))
            bound += elem_sym(topo.L, budget + 1)
            continue
        lib = Library(chunks, spec.S)
        txs = schedule(spec, demand, lib)
        decoded = decode(spec, demand, txs, lib)
        for u in recovered:
            recovered[u] += decoded[u]
        rounds.append((budget, spec.S, len(txs)))
        sent += len(txs) * lib.subfile_length
        n_total += len(txs)
        # head round: cut and padding errors cancel within one byte per XOR
        bound += len(txs) if budget == share.floor_budget else 2 * len(txs)
    ok = tuple(recovered[u][:len(payloads[demand.file_of(u) - 1])] == payloads[demand.file_of(u) - 1]
               for u in range(1, demand.K + 1))
    return DeliveryReport(
        num_transmissions=n_total,
        S=rounds[-1][1],
        T=delivery_time(topo, t),
        decode_ok=ok,
        T_realized=Fraction(sent, F),
        granule=Fraction(bound, F),
        rounds=tuple(rounds),
    )
