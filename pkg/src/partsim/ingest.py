"""Recorded-snapshot ingestion: parsing, IP-to-AS resolution, series assembly.

Snapshot files are single JSON documents (see docs/formats.md). Address
resolution uses a bitwise trie over CIDR prefixes so every lookup walks at
most 32 bits. Unresolved addresses are kept, grouped under the reserved
AS 0 / org "UNKNOWN", so totals and CDFs stay unbiased.
"""

from __future__ import annotations

import ipaddress
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DataError, DomainError, ParseError, SchemaError
from .topology import UNRESOLVED_ASN, UNRESOLVED_ORG, NetworkSnapshot, NodeRecord

#: Default slack when checking snapshot cadence, as a fraction of cadence.
DEFAULT_JITTER_TOLERANCE = 0.10


class PrefixTable:
    """Immutable longest-prefix-match table over IPv4 CIDR prefixes.

    Internally a binary trie keyed by address bits (most significant first);
    lookups are O(32) regardless of table size. Safe to share across threads
    once loaded.
    """

    __slots__ = ("_root", "_entries")

    def __init__(self, entries: Iterable[tuple[str, int, str]] = ()):
        # trie node: [zero_child, one_child, payload]
        self._root: list = [None, None, None]
        self._entries: list[tuple[str, int, str]] = []
        for prefix, asn, org in entries:
            self.add(prefix, asn, org)

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entries(self) -> tuple[tuple[str, int, str], ...]:
        return tuple(self._entries)

    def add(self, prefix: str, asn: int, org: str) -> None:
        try:
            net = ipaddress.IPv4Network(prefix, strict=True)
        except (ipaddress.AddressValueError, ipaddress.NetmaskValueError, ValueError) as e:
            raise ParseError(f"malformed CIDR prefix {prefix!r}: {e}") from None
        base = int(net.network_address)
        masklen = net.prefixlen
        node = self._root
        for i in range(masklen):
            bit = (base >> (31 - i)) & 1
            if node[bit] is None:
                node[bit] = [None, None, None]
            node = node[bit]
        if node[2] is not None:
            raise DataError(f"duplicate prefix {net.with_prefixlen}")
        node[2] = (asn, org)
        self._entries.append((net.with_prefixlen, asn, org))

    def lookup(self, address: str) -> tuple[int, str] | None:
        """Longest-prefix match; None when no prefix covers the address."""
        a = int(ipaddress.IPv4Address(address))
        node = self._root
        best = node[2]
        for i in range(32):
            node = node[(a >> (31 - i)) & 1]
            if node is None:
                break
            if node[2] is not None:
                best = node[2]
        return best


def resolve_asn(address: str, table: PrefixTable) -> tuple[int, str] | None:
    """Resolve an address to (asn, org); None is the unresolved marker."""
    return table.lookup(address)


def resolve_linear(address: str, entries: Sequence[tuple[str, int, str]]) -> tuple[int, str] | None:
    """Linear-scan longest-match oracle used to cross-check the trie."""
    a = int(ipaddress.IPv4Address(address))
    best = None
    best_len = -1
    for prefix, asn, org in entries:
        net = ipaddress.IPv4Network(prefix)
        shift = 32 - net.prefixlen
        if (a >> shift) == (int(net.network_address) >> shift) and net.prefixlen > best_len:
            best = (asn, org)
            best_len = net.prefixlen
    return best


def load_prefix_table(text: str) -> PrefixTable:
    """Parse a prefix CSV: ``prefix/masklen,asn,org`` per row, header optional."""
    table = PrefixTable()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",", 2)
        if lineno == 1 and parts[0].lower() in ("prefix", "cidr"):
            continue
        if len(parts) != 3:
            raise ParseError(f"prefix row {lineno}: expected 'prefix,asn,org', got {line!r}")
        prefix, asn_s, org = (p.strip() for p in parts)
        try:
            asn = int(asn_s)
        except ValueError:
            raise ParseError(f"prefix row {lineno}: asn {asn_s!r} is not an integer") from None
        try:
            table.add(prefix, asn, org)
        except ParseError as e:
            raise ParseError(f"prefix row {lineno}: {e}") from None
        except DataError as e:
            raise DataError(f"prefix row {lineno}: {e}") from None
    return table


def _require(doc: dict, key: str, types, where: str):
    if key not in doc:
        raise SchemaError(f"{where}: missing mandatory field {key!r}")
    value = doc[key]
    if not isinstance(value, types) or isinstance(value, bool):
        raise SchemaError(f"{where}: field {key!r} has wrong type {type(value).__name__}")
    return value


def parse_snapshot(data: bytes | str) -> NetworkSnapshot:
    """Parse one snapshot document; unknown fields are ignored.

    Node identifiers are derived from addresses; a repeated address gets a
    ``#k`` suffix so node_ids stay unique within the snapshot.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top level: expected a JSON object")
    timestamp = _require(doc, "timestamp", int, "top level")
    raw_nodes = _require(doc, "nodes", list, "top level")
    nodes = []
    seen: dict[str, int] = {}
    for i, nd in enumerate(raw_nodes):
        where = f"nodes[{i}]"
        if not isinstance(nd, dict):
            raise SchemaError(f"{where}: expected an object")
        address = _require(nd, "address", str, where)
        try:
            ipaddress.IPv4Address(address)
        except ipaddress.AddressValueError:
            raise SchemaError(f"{where}: invalid IPv4 address {address!r}") from None
        height = _require(nd, "height", int, where)
        if height < 0:
            raise SchemaError(f"{where}: height must be >= 0")
        version = _require(nd, "version", str, where)
        asn = nd.get("asn", UNRESOLVED_ASN)
        if not isinstance(asn, int) or isinstance(asn, bool) or asn < 0:
            raise SchemaError(f"{where}: field 'asn' must be a non-negative integer")
        org = nd.get("org", UNRESOLVED_ORG)
        if not isinstance(org, str):
            raise SchemaError(f"{where}: field 'org' must be a string")
        count = seen.get(address, 0)
        node_id = address if count == 0 else f"{address}#{count}"
        seen[address] = count + 1
        nodes.append(NodeRecord(node_id, address, asn, org, height, version))
    return NetworkSnapshot(timestamp=timestamp, nodes=tuple(nodes))


def serialize_snapshot(snapshot: NetworkSnapshot) -> str:
    """Canonical JSON form; parse(serialize(s)) == s."""
    doc = {
        "timestamp": snapshot.timestamp,
        "nodes": [
            {
                "address": n.address,
                "asn": n.asn,
                "org": n.org,
                "height": n.height,
                "version": n.version,
            }
            for n in snapshot.nodes
        ],
    }
    return json.dumps(doc, indent=1)


def resolve_snapshot(snapshot: NetworkSnapshot, table: PrefixTable) -> NetworkSnapshot:
    """Fill in asn/org for unresolved nodes via longest-prefix match."""
    nodes = []
    for n in snapshot.nodes:
        if n.asn == UNRESOLVED_ASN:
            hit = table.lookup(n.address)
            if hit is not None:
                n = NodeRecord(n.node_id, n.address, hit[0], hit[1], n.height, n.version)
        nodes.append(n)
    return NetworkSnapshot(timestamp=snapshot.timestamp, nodes=tuple(nodes))


@dataclass(frozen=True)
class GapReport:
    """One cadence gap: expected samples missing after a snapshot."""

    after_timestamp: int
    gap_seconds: int
    missing_samples: int


@dataclass(frozen=True)
class SnapshotSeries:
    """Time-ordered snapshots at a fixed cadence with a gap report."""

    cadence_seconds: int
    snapshots: tuple[NetworkSnapshot, ...]
    gaps: tuple[GapReport, ...] = field(default=())


def assemble_series(
    snapshots: Iterable[NetworkSnapshot],
    cadence_seconds: int,
    jitter_tolerance: float = DEFAULT_JITTER_TOLERANCE,
) -> SnapshotSeries:
    """Order snapshots by timestamp and flag gaps larger than cadence + tolerance."""
    if cadence_seconds <= 0:
        raise DomainError("cadence_seconds must be positive")
    ordered = sorted(snapshots, key=lambda s: s.timestamp)
    for a, b in zip(ordered, ordered[1:]):
        if a.timestamp == b.timestamp:
            raise DataError(f"duplicate snapshot timestamp {a.timestamp}")
    tol = cadence_seconds * jitter_tolerance
    gaps = []
    for a, b in zip(ordered, ordered[1:]):
        delta = b.timestamp - a.timestamp
        if delta > cadence_seconds + tol:
            missing = round(delta / cadence_seconds) - 1
            gaps.append(GapReport(a.timestamp, delta, max(1, missing)))
    return SnapshotSeries(cadence_seconds, tuple(ordered), tuple(gaps))
