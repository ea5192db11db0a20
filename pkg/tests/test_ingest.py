import ipaddress
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partsim.errors import DataError, ParseError, SchemaError
from partsim.ingest import (
    PrefixTable,
    assemble_series,
    load_prefix_table,
    parse_snapshot,
    resolve_asn,
    resolve_linear,
    resolve_snapshot,
    serialize_snapshot,
)
from partsim.topology import UNRESOLVED_ASN, UNRESOLVED_ORG


def make_doc(nodes, timestamp=1000):
    return json.dumps({"timestamp": timestamp, "nodes": nodes})


class TestParseSnapshot:
    def test_empty_nodes(self):
        snap = parse_snapshot(make_doc([]))
        assert snap.timestamp == 1000
        assert snap.nodes == ()

    def test_single_node_identity(self):
        snap = parse_snapshot(
            make_doc(
                [{"address": "1.2.3.4", "height": 500000,
                  "version": "Satoshi:0.16.0", "asn": 45102,
                  "org": "AliBaba (China)"}]
            )
        )
        (n,) = snap.nodes
        assert (n.address, n.asn, n.org, n.height, n.version) == (
            "1.2.3.4", 45102, "AliBaba (China)", 500000, "Satoshi:0.16.0"
        )

    def test_unknown_fields_ignored(self):
        snap = parse_snapshot(
            make_doc([{"address": "1.2.3.4", "height": 1, "version": "v", "extra": 9}])
        )
        assert snap.nodes[0].height == 1

    def test_missing_field(self):
        with pytest.raises(SchemaError, match="version"):
            parse_snapshot(make_doc([{"address": "1.2.3.4", "height": 1}]))

    def test_malformed_json_has_context(self):
        with pytest.raises(ParseError, match="line"):
            parse_snapshot(b'{"timestamp": 1,')

    def test_bad_address(self):
        with pytest.raises(SchemaError, match="nodes\\[0\\]"):
            parse_snapshot(make_doc([{"address": "999.1.1.1", "height": 1, "version": "v"}]))

    def test_negative_height(self):
        with pytest.raises(SchemaError, match="height"):
            parse_snapshot(make_doc([{"address": "1.2.3.4", "height": -1, "version": "v"}]))

    def test_unresolved_marker(self):
        snap = parse_snapshot(make_doc([{"address": "1.2.3.4", "height": 1, "version": "v"}]))
        assert snap.nodes[0].asn == UNRESOLVED_ASN
        assert snap.nodes[0].org == UNRESOLVED_ORG

    def test_duplicate_addresses_get_distinct_ids(self):
        snap = parse_snapshot(
            make_doc(
                [{"address": "1.2.3.4", "height": 1, "version": "v"},
                 {"address": "1.2.3.4", "height": 2, "version": "v"}]
            )
        )
        assert snap.nodes[0].node_id != snap.nodes[1].node_id

    def test_roundtrip_fixed_point(self):
        doc = make_doc(
            [{"address": "1.2.3.4", "height": 5, "version": "a", "asn": 7, "org": "x"},
             {"address": "4.3.2.1", "height": 9, "version": "b"}]
        )
        once = parse_snapshot(doc)
        again = parse_snapshot(serialize_snapshot(once))
        assert once == again

    @settings(max_examples=40, deadline=None)
    @given(
        nodes=st.lists(
            st.fixed_dictionaries(
                {
                    "address": st.integers(0, 2**32 - 1).map(
                        lambda a: str(ipaddress.IPv4Address(a))
                    ),
                    "height": st.integers(0, 10**7),
                    "version": st.text(
                        alphabet=st.characters(min_codepoint=32, max_codepoint=126),
                        max_size=12,
                    ),
                    "asn": st.integers(0, 70000),
                    "org": st.text(
                        alphabet=st.characters(min_codepoint=32, max_codepoint=126),
                        max_size=10,
                    ),
                }
            ),
            max_size=8,
        ),
        timestamp=st.integers(0, 2**31),
    )
    def test_roundtrip_property(self, nodes, timestamp):
        snap = parse_snapshot(make_doc(nodes, timestamp))
        assert parse_snapshot(serialize_snapshot(snap)) == snap


class TestPrefixTable:
    def test_longest_prefix_wins(self):
        table = PrefixTable([("10.0.0.0/8", 1, "A"), ("10.1.0.0/16", 2, "B")])
        assert resolve_asn("10.1.2.3", table) == (2, "B")
        assert resolve_asn("10.2.3.4", table) == (1, "A")

    def test_no_match(self):
        table = PrefixTable([("10.0.0.0/8", 1, "A")])
        assert resolve_asn("11.0.0.1", table) is None

    def test_empty_table(self):
        assert resolve_asn("1.2.3.4", PrefixTable()) is None

    def test_default_route(self):
        table = PrefixTable([("0.0.0.0/0", 99, "default")])
        assert resolve_asn("200.1.2.3", table) == (99, "default")

    def test_duplicate_rejected(self):
        with pytest.raises(DataError):
            PrefixTable([("10.0.0.0/8", 1, "A"), ("10.0.0.0/8", 2, "B")])

    def test_load_csv(self):
        table = load_prefix_table("10.0.0.0/8,1,OrgA\n")
        assert len(table) == 1
        assert resolve_asn("10.9.9.9", table) == (1, "OrgA")

    def test_load_header_optional(self):
        table = load_prefix_table("prefix,asn,org\n10.0.0.0/8,1,OrgA\n")
        assert len(table) == 1

    def test_mask_33_rejected(self):
        with pytest.raises(ParseError, match="row 1"):
            load_prefix_table("10.0.0.0/33,1,OrgA\n")

    def test_host_bits_rejected(self):
        with pytest.raises(ParseError):
            load_prefix_table("10.0.0.1/8,1,OrgA\n")

    def test_bad_asn_named_row(self):
        with pytest.raises(ParseError, match="row 2"):
            load_prefix_table("10.0.0.0/8,1,OrgA\n10.1.0.0/16,xx,OrgB\n")

    def test_resolve_snapshot_fills_unresolved(self):
        snap = parse_snapshot(
            make_doc(
                [{"address": "10.1.2.3", "height": 1, "version": "v"},
                 {"address": "10.1.2.4", "height": 1, "version": "v", "asn": 5, "org": "keep"}]
            )
        )
        table = PrefixTable([("10.0.0.0/8", 7, "filled")])
        resolved = resolve_snapshot(snap, table)
        assert resolved.nodes[0].asn == 7 and resolved.nodes[0].org == "filled"
        assert resolved.nodes[1].asn == 5 and resolved.nodes[1].org == "keep"

    @settings(max_examples=40, deadline=None)
    @given(data=st.data())
    def test_matches_linear_oracle(self, data):
        entries = []
        seen = set()
        for _ in range(data.draw(st.integers(0, 25))):
            masklen = data.draw(st.integers(0, 32))
            base = data.draw(st.integers(0, 2**32 - 1))
            net = ipaddress.IPv4Network((base >> (32 - masklen) << (32 - masklen) if masklen else 0, masklen))
            key = net.with_prefixlen
            if key in seen:
                continue
            seen.add(key)
            entries.append((key, len(seen), f"org{len(seen)}"))
        table = PrefixTable(entries)
        for _ in range(30):
            addr = str(ipaddress.IPv4Address(data.draw(st.integers(0, 2**32 - 1))))
            assert table.lookup(addr) == resolve_linear(addr, entries)

    def test_thousand_entry_table_against_oracle(self):
        rng = random.Random(1234)
        entries = []
        seen = set()
        while len(entries) < 1000:
            masklen = rng.randint(1, 32)
            base = rng.getrandbits(32)
            base = (base >> (32 - masklen)) << (32 - masklen)
            net = ipaddress.IPv4Network((base, masklen))
            if net.with_prefixlen in seen:
                continue
            seen.add(net.with_prefixlen)
            entries.append((net.with_prefixlen, rng.randint(1, 65000), f"org{len(entries)}"))
        table = PrefixTable(entries)
        # linear-scan oracle over pre-parsed entries
        parsed = [
            (int(ipaddress.IPv4Network(p).network_address), ipaddress.IPv4Network(p).prefixlen, (asn, org))
            for p, asn, org in entries
        ]

        def oracle(addr_int):
            best, best_len = None, -1
            for base, masklen, payload in parsed:
                shift = 32 - masklen
                if (addr_int >> shift) == (base >> shift) and masklen > best_len:
                    best, best_len = payload, masklen
            return best

        mismatches = 0
        for _ in range(10_000):
            a = rng.getrandbits(32)
            if table.lookup(str(ipaddress.IPv4Address(a))) != oracle(a):
                mismatches += 1
        assert mismatches == 0


class TestAssembleSeries:
    def _snap(self, ts):
        return parse_snapshot(make_doc([], timestamp=ts))

    def test_clean_series(self):
        series = assemble_series([self._snap(0), self._snap(600), self._snap(1200)], 600)
        assert [s.timestamp for s in series.snapshots] == [0, 600, 1200]
        assert series.gaps == ()

    def test_sorted_even_if_unordered(self):
        series = assemble_series([self._snap(1200), self._snap(0), self._snap(600)], 600)
        ts = [s.timestamp for s in series.snapshots]
        assert ts == sorted(ts)

    def test_gap_flagged(self):
        series = assemble_series([self._snap(0), self._snap(1800)], 600)
        assert len(series.gaps) == 1
        gap = series.gaps[0]
        assert gap.after_timestamp == 0
        assert gap.missing_samples == 2

    def test_jitter_tolerated(self):
        series = assemble_series([self._snap(0), self._snap(650)], 600)
        assert series.gaps == ()

    def test_duplicate_timestamps_rejected(self):
        with pytest.raises(DataError):
            assemble_series([self._snap(0), self._snap(0)], 600)

    @settings(max_examples=40, deadline=None)
    @given(times=st.sets(st.integers(0, 10**6), min_size=1, max_size=12))
    def test_strictly_increasing(self, times):
        series = assemble_series([self._snap(t) for t in times], 600)
        ts = [s.timestamp for s in series.snapshots]
        assert all(a < b for a, b in zip(ts, ts[1:]))
