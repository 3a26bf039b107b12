"""Two-line element parsing, validation, catalog storage and filtering.

The fixed-column layout (1-indexed columns):

line 1:  col 1 '1', 3-7 catalog number, 19-20 epoch year, 21-32 epoch day,
         34-43 first derivative of mean motion / 2, 45-52 second derivative
         / 6 (implied decimal + exponent), 54-61 bstar (implied decimal +
         exponent), 65-68 element set number, 69 checksum.
line 2:  col 1 '2', 3-7 catalog number, 9-16 inclination, 18-25 RAAN,
         27-33 eccentricity (implied leading "0."), 35-42 argument of
         perigee, 44-51 mean anomaly, 53-63 mean motion, 64-68 rev number,
         69 checksum.

Value columns are parsed strictly; only layout-defined padding tolerates
blanks.  ``ndot``/``nddot`` are stored as the actual derivatives (the raw
fields carry n-dot/2 and n-double-dot/6).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional

from .constants import MU_EARTH, R_EARTH, SECONDS_PER_DAY, TWOPI
from .errors import (
    ChecksumError,
    FieldSyntaxError,
    IdMismatchError,
    InvalidRange,
    IoFailure,
    LineLengthError,
)
from .timeutil import UTC, tle_epoch_to_datetime, to_utc

LINE_LENGTH = 69


def checksum(line_body: str) -> int:
    """Modulo-10 checksum of a 68-character line body.

    Digits count their value, '-' counts 1, everything else 0.
    """
    if len(line_body) != LINE_LENGTH - 1:
        raise LineLengthError(0, len(line_body))
    total = 0
    for ch in line_body:
        if ch.isdigit():
            total += int(ch)
        elif ch == "-":
            total += 1
    return total % 10


@dataclass(frozen=True)
class TleRecord:
    """One parsed, checksum-validated element set."""

    norad_id: int
    name: Optional[str]
    epoch: datetime
    mean_motion: float          # rev/day
    eccentricity: float
    inclination_deg: float
    raan_deg: float
    arg_perigee_deg: float
    mean_anomaly_deg: float
    bstar: float                # 1/earth radii
    ndot: float                 # rev/day^2
    nddot: float                # rev/day^3
    element_set_no: int
    rev_at_epoch: int
    line1_raw: str
    line2_raw: str

    def semi_major_axis_km(self) -> float:
        """Two-body semi-major axis from the mean motion: a = (mu/n^2)^(1/3)."""
        n_rad_s = self.mean_motion * TWOPI / SECONDS_PER_DAY
        return (MU_EARTH / (n_rad_s * n_rad_s)) ** (1.0 / 3.0)

    def perigee_altitude_km(self) -> float:
        return self.semi_major_axis_km() * (1.0 - self.eccentricity) - R_EARTH

    def apogee_altitude_km(self) -> float:
        return self.semi_major_axis_km() * (1.0 + self.eccentricity) - R_EARTH

    def period_minutes(self) -> float:
        return 1440.0 / self.mean_motion


class CatalogSource(Enum):
    FILE = "file"
    SPACE_TRACK = "space_track"


@dataclass(frozen=True)
class CatalogSnapshot:
    """Immutable catalog keyed by norad_id; at most one record per object."""

    fetched_at: datetime
    records: Mapping[int, TleRecord]
    source: CatalogSource

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[TleRecord]:
        return iter(self.records.values())

    def get(self, norad_id: int) -> Optional[TleRecord]:
        return self.records.get(norad_id)


@dataclass(frozen=True)
class TleReject:
    """First error seen for one unparseable element set."""

    lines: tuple[str, ...]
    error_code: str
    message: str


@dataclass(frozen=True)
class OrbitalFilter:
    """Conjunction of optional closed ranges on orbital parameters.

    Altitudes are derived from the mean elements via the two-body relation;
    a record passes only if every supplied range contains its value.
    """

    inclination_deg: Optional[tuple[float, float]] = None
    eccentricity: Optional[tuple[float, float]] = None
    mean_motion: Optional[tuple[float, float]] = None
    perigee_alt_km: Optional[tuple[float, float]] = None
    apogee_alt_km: Optional[tuple[float, float]] = None

    def validate(self) -> None:
        for label, rng in (
            ("inclination_deg", self.inclination_deg),
            ("eccentricity", self.eccentricity),
            ("mean_motion", self.mean_motion),
            ("perigee_alt_km", self.perigee_alt_km),
            ("apogee_alt_km", self.apogee_alt_km),
        ):
            if rng is not None and rng[0] > rng[1]:
                raise InvalidRange(f"{label}: min {rng[0]} > max {rng[1]}")

    def matches(self, rec: TleRecord) -> bool:
        def inside(value: float, rng: Optional[tuple[float, float]]) -> bool:
            return rng is None or (rng[0] <= value <= rng[1])

        return (
            inside(rec.inclination_deg, self.inclination_deg)
            and inside(rec.eccentricity, self.eccentricity)
            and inside(rec.mean_motion, self.mean_motion)
            and inside(rec.perigee_altitude_km(), self.perigee_alt_km)
            and inside(rec.apogee_altitude_km(), self.apogee_alt_km)
        )


# --- field helpers -----------------------------------------------------------

def _slice(line: str, col_start: int, col_end: int) -> str:
    # columns are 1-indexed and inclusive
    return line[col_start - 1:col_end]


def _parse_int(line: str, line_no: int, col_start: int, col_end: int,
               allow_blank: bool = False) -> int:
    text = _slice(line, col_start, col_end)
    stripped = text.strip()
    if stripped == "" and allow_blank:
        return 0
    try:
        return int(stripped)
    except ValueError:
        raise FieldSyntaxError(line_no, col_start, col_end, text) from None


def _parse_float(line: str, line_no: int, col_start: int, col_end: int) -> float:
    text = _slice(line, col_start, col_end)
    try:
        return float(text)
    except ValueError:
        raise FieldSyntaxError(line_no, col_start, col_end, text) from None


def _parse_implied_decimal(line: str, line_no: int, col_start: int,
                           col_end: int) -> float:
    """Decode the 'smmmmm se' mantissa+exponent form, e.g. ' 29661-4'."""
    text = _slice(line, col_start, col_end)
    body = text.strip()
    if body in ("", "00000-0", "00000+0"):
        return 0.0
    sign = 1.0
    if body and body[0] in "+-":
        if body[0] == "-":
            sign = -1.0
        body = body[1:]
    if len(body) < 2:
        raise FieldSyntaxError(line_no, col_start, col_end, text)
    exp_part = body[-2:]
    mant_part = body[:-2]
    if exp_part[0] in "+-":
        exp_sign = -1 if exp_part[0] == "-" else 1
        exp_digits = exp_part[1]
    elif exp_part[0] == " ":
        exp_sign = 1
        exp_digits = exp_part[1]
    else:
        raise FieldSyntaxError(line_no, col_start, col_end, text)
    if not (mant_part.isdigit() and exp_digits.isdigit()):
        raise FieldSyntaxError(line_no, col_start, col_end, text)
    mantissa = float("0." + mant_part)
    return sign * mantissa * 10.0 ** (exp_sign * int(exp_digits))


def _parse_implied_point(line: str, line_no: int, col_start: int,
                         col_end: int) -> float:
    """Decode an all-digit field with an implied leading '0.'."""
    text = _slice(line, col_start, col_end)
    if not text.isdigit():
        raise FieldSyntaxError(line_no, col_start, col_end, text)
    return float("0." + text)


def _validate_line(line: str, line_no: int, expected_tag: str) -> None:
    if len(line) != LINE_LENGTH:
        raise LineLengthError(line_no, len(line))
    if line[0] != expected_tag:
        raise FieldSyntaxError(line_no, 1, 1, line[0],
                               f"expected line tag {expected_tag!r}")
    computed = checksum(line[:-1])
    stored = line[-1]
    if not stored.isdigit() or int(stored) != computed:
        raise ChecksumError(line_no, computed, stored)


def parse_tle(line0: Optional[str], line1: str, line2: str) -> TleRecord:
    """Parse a 2- or 3-line element set into a validated TleRecord."""
    _validate_line(line1, 1, "1")
    _validate_line(line2, 2, "2")

    norad1 = _parse_int(line1, 1, 3, 7)
    norad2 = _parse_int(line2, 2, 3, 7)
    if norad1 != norad2:
        raise IdMismatchError(norad1, norad2)

    year2 = _parse_int(line1, 1, 19, 20)
    day_of_year = _parse_float(line1, 1, 21, 32)
    epoch = tle_epoch_to_datetime(year2, day_of_year)

    ndot_half = _parse_float(line1, 1, 34, 43)
    nddot_sixth = _parse_implied_decimal(line1, 1, 45, 52)
    bstar = _parse_implied_decimal(line1, 1, 54, 61)
    elset = _parse_int(line1, 1, 65, 68, allow_blank=True)

    inclination = _parse_float(line2, 2, 9, 16)
    raan = _parse_float(line2, 2, 18, 25)
    ecc = _parse_implied_point(line2, 2, 27, 33)
    argp = _parse_float(line2, 2, 35, 42)
    mean_anom = _parse_float(line2, 2, 44, 51)
    mean_motion = _parse_float(line2, 2, 53, 63)
    rev = _parse_int(line2, 2, 64, 68, allow_blank=True)

    if mean_motion <= 0.0:
        raise FieldSyntaxError(2, 53, 63, _slice(line2, 53, 63),
                               "mean motion must be positive")
    if not (0.0 <= ecc < 1.0):
        raise FieldSyntaxError(2, 27, 33, _slice(line2, 27, 33),
                               "eccentricity out of [0, 1)")
    if not (0.0 <= inclination <= 180.0):
        raise FieldSyntaxError(2, 9, 16, _slice(line2, 9, 16),
                               "inclination out of [0, 180]")
    for label, val, c0, c1 in (
        ("raan", raan, 18, 25),
        ("arg of perigee", argp, 35, 42),
        ("mean anomaly", mean_anom, 44, 51),
    ):
        if not (0.0 <= val < 360.0):
            raise FieldSyntaxError(2, c0, c1, _slice(line2, c0, c1),
                                   f"{label} out of [0, 360)")

    name = None
    if line0 is not None:
        name = line0.strip()
        if name.startswith("0 "):
            name = name[2:].strip()
        if name == "":
            name = None

    return TleRecord(
        norad_id=norad1,
        name=name,
        epoch=epoch,
        mean_motion=mean_motion,
        eccentricity=ecc,
        inclination_deg=inclination,
        raan_deg=raan,
        arg_perigee_deg=argp,
        mean_anomaly_deg=mean_anom,
        bstar=bstar,
        ndot=2.0 * ndot_half,
        nddot=6.0 * nddot_sixth,
        element_set_no=elset,
        rev_at_epoch=rev,
        line1_raw=line1,
        line2_raw=line2,
    )


def format_tle(rec: TleRecord) -> tuple[str, str]:
    """Return the raw line pair; parse_tle(format_tle(r)) round-trips."""
    return rec.line1_raw, rec.line2_raw


def _iter_element_sets(lines: list[str]) -> Iterator[tuple[Optional[str], str, str]]:
    """Group raw text lines into (name, line1, line2) triples.

    Supports mixed 2-line and 3-line sets; blank lines are skipped.
    """
    pending_name: Optional[str] = None
    i = 0
    n = len(lines)
    while i < n:
        line = lines[i].rstrip("\r\n")
        if line.strip() == "":
            i += 1
            continue
        if line.startswith("1 ") and len(line.strip()) > 60:
            if i + 1 < n:
                line2 = lines[i + 1].rstrip("\r\n")
                yield pending_name, line, line2
                pending_name = None
                i += 2
                continue
            yield pending_name, line, ""
            pending_name = None
            i += 1
        else:
            pending_name = line
            i += 1
    if pending_name is not None:
        # trailing name line with no element lines
        yield pending_name, "", ""


def parse_catalog_text(text: str) -> tuple[list[TleRecord], list[TleReject]]:
    """Parse concatenated 2-/3-line element sets; never drops entries silently."""
    records: list[TleRecord] = []
    rejects: list[TleReject] = []
    for name, l1, l2 in _iter_element_sets(text.splitlines()):
        group = tuple(x for x in (name, l1, l2) if x)
        try:
            if l1 == "" or l2 == "":
                raise LineLengthError(1 if l1 == "" else 2, 0)
            records.append(parse_tle(name, l1, l2))
        except Exception as exc:  # collect, never drop
            code = getattr(exc, "code", type(exc).__name__)
            rejects.append(TleReject(lines=group, error_code=code,
                                     message=str(exc)))
    return records, rejects


def build_snapshot(records: Iterable[TleRecord], fetched_at: datetime,
                   source: CatalogSource) -> CatalogSnapshot:
    """Deduplicate by norad_id keeping the latest epoch."""
    by_id: dict[int, TleRecord] = {}
    for rec in records:
        prev = by_id.get(rec.norad_id)
        if prev is None or rec.epoch > prev.epoch:
            by_id[rec.norad_id] = rec
    return CatalogSnapshot(fetched_at=to_utc(fetched_at),
                           records=dict(sorted(by_id.items())),
                           source=source)


def load_catalog(path, now: Optional[datetime] = None
                 ) -> tuple[CatalogSnapshot, list[TleReject]]:
    """Load a TLE catalog file into a snapshot plus a rejects report."""
    try:
        with open(path, "r", encoding="ascii", errors="replace") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    records, rejects = parse_catalog_text(text)
    fetched_at = to_utc(now) if now is not None else datetime.now(UTC)
    snapshot = build_snapshot(records, fetched_at, CatalogSource.FILE)
    return snapshot, rejects


def filter_catalog(snapshot: CatalogSnapshot,
                   predicate: OrbitalFilter) -> CatalogSnapshot:
    """Snapshot restricted to records satisfying every supplied range."""
    predicate.validate()
    kept = {nid: rec for nid, rec in snapshot.records.items()
            if predicate.matches(rec)}
    return replace(snapshot, records=kept)
