"""TLE parser, checksum, catalog and filter tests."""

import random
from datetime import datetime, timezone

import pytest

from orco.errors import (
    ChecksumError,
    FieldSyntaxError,
    IdMismatchError,
    InvalidRange,
    IoFailure,
    LineLengthError,
)
from orco.tle import (
    CatalogSource,
    OrbitalFilter,
    TleRecord,
    build_snapshot,
    checksum,
    filter_catalog,
    format_tle,
    load_catalog,
    parse_catalog_text,
    parse_tle,
)

from helpers import corrupt_checksum, line_checksum, make_tle

ISS_L1 = "1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927"
ISS_L2 = "2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537"


# --- checksum ----------------------------------------------------------------

def test_checksum_all_spaces_is_zero():
    assert checksum(" " * 68) == 0


def test_checksum_counts_minus_as_one():
    assert checksum("-" * 68) == 68 % 10


def test_checksum_rejects_wrong_length():
    with pytest.raises(LineLengthError):
        checksum(" " * 67)


def test_checksum_matches_independent_oracle_on_real_lines(verification_pairs):
    for l1, l2 in verification_pairs:
        for line in (l1, l2):
            assert str(checksum(line[:-1])) == line_checksum(line[:-1]) == line[-1]


# --- parse_tle ---------------------------------------------------------------

def test_parse_iss_fields():
    rec = parse_tle("0 ISS (ZARYA)", ISS_L1, ISS_L2)
    assert rec.norad_id == 25544
    assert rec.name == "ISS (ZARYA)"
    assert rec.eccentricity == pytest.approx(0.0006703, abs=0)
    assert rec.inclination_deg == pytest.approx(51.6416)
    assert rec.raan_deg == pytest.approx(247.4627)
    assert rec.arg_perigee_deg == pytest.approx(130.5360)
    assert rec.mean_anomaly_deg == pytest.approx(325.0288)
    assert rec.mean_motion == pytest.approx(15.72125391)
    assert rec.bstar == pytest.approx(-0.11606e-4)
    assert rec.ndot == pytest.approx(2 * -0.00002182)
    assert rec.element_set_no == 292
    assert rec.rev_at_epoch == 56353
    # epoch: 2008, day 264.51782528
    assert rec.epoch.year == 2008
    assert rec.epoch.tzinfo is not None


def test_parse_epoch_year_pivot():
    l1, l2 = make_tle(10000, epoch_year=1957, epoch_day=300.0)
    rec = parse_tle(None, l1, l2)
    assert rec.epoch.year == 1957
    l1, l2 = make_tle(10000, epoch_year=2056, epoch_day=300.0)
    rec = parse_tle(None, l1, l2)
    assert rec.epoch.year == 2056


def test_parse_epoch_fractional_day_exact():
    l1, l2 = make_tle(10000, epoch_year=2025, epoch_day=100.25)
    rec = parse_tle(None, l1, l2)
    assert rec.epoch == datetime(2025, 4, 10, 6, 0, 0, tzinfo=timezone.utc)


def test_parse_implied_decimal_eccentricity():
    # field "0006703" carries an implied leading "0."
    assert parse_tle(None, ISS_L1, ISS_L2).eccentricity == 0.0006703


def test_parse_line_length_error():
    with pytest.raises(LineLengthError):
        parse_tle(None, ISS_L1[:-1], ISS_L2)
    with pytest.raises(LineLengthError):
        parse_tle(None, ISS_L1, ISS_L2 + " ")


def test_parse_checksum_mismatch_reports_digits():
    bad = corrupt_checksum(ISS_L1)
    with pytest.raises(ChecksumError) as err:
        parse_tle(None, bad, ISS_L2)
    assert err.value.computed == int(ISS_L1[-1])
    assert err.value.stored == bad[-1]


def test_parse_id_mismatch():
    l1a, _ = make_tle(11111)
    _, l2b = make_tle(22222)
    with pytest.raises(IdMismatchError):
        parse_tle(None, l1a, l2b)


def test_parse_field_syntax_reports_columns():
    l1, l2 = make_tle(10000)
    bad = l2[:26] + "00x6703" + l2[33:]
    bad = bad[:-1] + line_checksum(bad[:-1])
    with pytest.raises(FieldSyntaxError) as err:
        parse_tle(None, l1, bad)
    assert err.value.col_start == 27
    assert err.value.col_end == 33
    assert "00x6703" in str(err.value)


def test_parse_rejects_wrong_line_tag():
    swapped = "9" + ISS_L1[1:]
    swapped = swapped[:-1] + line_checksum(swapped[:-1])
    with pytest.raises(FieldSyntaxError):
        parse_tle(None, swapped, ISS_L2)


def test_roundtrip_through_raw_lines(verification_pairs):
    for l1, l2 in verification_pairs:
        rec = parse_tle(None, l1, l2)
        assert parse_tle(None, *format_tle(rec)) == rec


def test_constructed_lines_roundtrip_values():
    l1, l2 = make_tle(31415, inclination=97.44, raan=301.5, eccentricity=0.0123456,
                      arg_perigee=12.3, mean_anomaly=359.9, mean_motion=14.9,
                      bstar=-3.2e-5, epoch_day=42.125)
    rec = parse_tle(None, l1, l2)
    assert rec.inclination_deg == pytest.approx(97.44)
    assert rec.eccentricity == pytest.approx(0.0123456, abs=1e-12)
    assert rec.bstar == pytest.approx(-3.2e-5, rel=1e-4)
    assert rec.mean_anomaly_deg == pytest.approx(359.9)


# --- catalog loading ---------------------------------------------------------

def test_load_catalog_three_line_sets(tmp_path):
    a = make_tle(10001, mean_motion=15.1)
    b = make_tle(10002, mean_motion=14.2)
    text = "0 OBJ A\n{}\n{}\n0 OBJ B\n{}\n{}\n".format(a[0], a[1], b[0], b[1])
    path = tmp_path / "cat.tle"
    path.write_text(text)
    snap, rejects = load_catalog(path)
    assert len(snap) == 2
    assert rejects == []
    assert snap.get(10001).name == "OBJ A"
    assert snap.source == CatalogSource.FILE


def test_load_catalog_collects_rejects(tmp_path):
    good = make_tle(10001)
    bad = make_tle(10002)
    text = "{}\n{}\n{}\n{}\n".format(good[0], good[1],
                                     corrupt_checksum(bad[0]), bad[1])
    path = tmp_path / "cat.tle"
    path.write_text(text)
    snap, rejects = load_catalog(path)
    assert len(snap) == 1
    assert len(rejects) == 1
    assert rejects[0].error_code == "ChecksumMismatch"


def test_load_catalog_duplicate_keeps_latest_epoch(tmp_path):
    older = make_tle(10001, epoch_day=100.0)
    newer = make_tle(10001, epoch_day=200.0)
    path = tmp_path / "cat.tle"
    path.write_text("\n".join([*older, *newer]) + "\n")
    snap, rejects = load_catalog(path)
    assert len(snap) == 1
    assert snap.get(10001).epoch.timetuple().tm_yday == 200


def test_load_catalog_missing_file():
    with pytest.raises(IoFailure):
        load_catalog("/nonexistent/catalog.tle")


def test_loaded_records_satisfy_invariants(tmp_path, verification_tle_path):
    snap, rejects = load_catalog(verification_tle_path)
    assert rejects == []
    for rec in snap:
        assert len(rec.line1_raw) == 69 and len(rec.line2_raw) == 69
        assert 0.0 <= rec.eccentricity < 1.0
        assert 0.0 <= rec.inclination_deg <= 180.0
        assert rec.mean_motion > 0
        assert str(checksum(rec.line1_raw[:-1])) == rec.line1_raw[-1]


# --- filtering ---------------------------------------------------------------

def _random_catalog(n=100, seed=7):
    rng = random.Random(seed)
    recs = []
    for k in range(n):
        l1, l2 = make_tle(
            20000 + k,
            inclination=round(rng.uniform(0.0, 179.0), 4),
            eccentricity=round(rng.uniform(0.0, 0.05), 7),
            mean_motion=round(rng.uniform(11.25, 16.4), 8),
            raan=round(rng.uniform(0, 359.9), 4),
        )
        recs.append(parse_tle(None, l1, l2))
    return build_snapshot(recs, datetime.now(timezone.utc), CatalogSource.FILE)


def test_filter_no_ranges_is_identity():
    snap = _random_catalog(30)
    out = filter_catalog(snap, OrbitalFilter())
    assert out.records == snap.records


def test_filter_inclination_band():
    recs = [parse_tle(None, *make_tle(1, inclination=51.6)),
            parse_tle(None, *make_tle(2, inclination=98.2))]
    snap = build_snapshot(recs, datetime.now(timezone.utc), CatalogSource.FILE)
    out = filter_catalog(snap, OrbitalFilter(inclination_deg=(97.0, 99.0)))
    assert set(out.records) == {2}


def test_filter_invalid_range():
    snap = _random_catalog(5)
    with pytest.raises(InvalidRange):
        filter_catalog(snap, OrbitalFilter(perigee_alt_km=(800.0, 400.0)))


def test_filter_altitude_matches_bruteforce_oracle():
    from orco.constants import MU_EARTH, R_EARTH, SECONDS_PER_DAY, TWOPI

    snap = _random_catalog(100, seed=13)
    lo, hi = 500.0, 800.0
    out = filter_catalog(snap, OrbitalFilter(perigee_alt_km=(lo, hi)))

    expected = set()
    for rec in snap:
        n = rec.mean_motion * TWOPI / SECONDS_PER_DAY
        a = (MU_EARTH / n ** 2) ** (1.0 / 3.0)
        perigee = a * (1 - rec.eccentricity) - R_EARTH
        if lo <= perigee <= hi:
            expected.add(rec.norad_id)
    assert set(out.records) == expected


def test_filter_result_is_subset_and_universal_range_is_identity():
    snap = _random_catalog(60, seed=99)
    out = filter_catalog(snap, OrbitalFilter(eccentricity=(0.0, 0.02)))
    assert set(out.records) <= set(snap.records)
    universal = OrbitalFilter(inclination_deg=(0.0, 180.0),
                              eccentricity=(0.0, 1.0),
                              mean_motion=(0.0, 20.0),
                              perigee_alt_km=(-1e6, 1e6),
                              apogee_alt_km=(-1e6, 1e6))
    assert filter_catalog(snap, universal).records == snap.records


def test_parse_catalog_text_mixed_two_and_three_line():
    a = make_tle(10001)
    b = make_tle(10002)
    text = "{}\n{}\n0 NAMED\n{}\n{}\n".format(a[0], a[1], b[0], b[1])
    records, rejects = parse_catalog_text(text)
    assert [r.norad_id for r in records] == [10001, 10002]
    assert records[1].name == "NAMED"
    assert rejects == []
