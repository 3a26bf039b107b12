"""Shared test fixtures: synthetic TLE construction.

The line builder composes fixed-column TLE text directly (independent of
the package's parsing code) so tests can fabricate catalogs with known
element values and valid checksums.
"""

from __future__ import annotations


def line_checksum(body: str) -> str:
    """Independent 5-line checksum oracle: digits count, '-' counts 1."""
    total = 0
    for ch in body:
        if ch.isdigit():
            total += int(ch)
        if ch == "-":
            total += 1
    return str(total % 10)


def _exp_field(value: float) -> str:
    """8-char 'smmmmm-e' implied-decimal field (0.mmmmm * 10^-e)."""
    if value == 0.0:
        return " 00000-0"
    sign = "-" if value < 0 else " "
    mag = abs(value)
    exp = 0
    while mag < 0.1:
        mag *= 10.0
        exp -= 1
        if exp < -9:
            return " 00000-0"
    while mag >= 1.0:
        mag /= 10.0
        exp += 1
    mantissa = round(mag * 1e5)
    if mantissa >= 100000:
        mantissa = 99999
    exp_char = f"{exp:+d}" if exp != 0 else "+0"
    return f"{sign}{mantissa:05d}{exp_char}"


def make_tle(norad_id: int, *, epoch_year: int = 2025, epoch_day: float = 100.5,
             inclination: float = 51.6, raan: float = 120.0,
             eccentricity: float = 0.001, arg_perigee: float = 90.0,
             mean_anomaly: float = 0.0, mean_motion: float = 15.5,
             bstar: float = 1e-4, ndot_half: float = 0.0,
             elset: int = 999, rev: int = 1234,
             intl: str = "25001A") -> tuple[str, str]:
    """Build a checksum-valid TLE line pair from element values."""
    yy = epoch_year % 100
    frac8 = f"{abs(ndot_half):.8f}".split(".")[1]
    ndot_text = ("-." if ndot_half < 0 else " .") + frac8
    l1 = (f"1 {norad_id:05d}U {intl:<8s} {yy:02d}{epoch_day:012.8f} "
          f"{ndot_text} {_exp_field(0.0)} {_exp_field(bstar)} 0 {elset:4d}")
    assert len(l1) == 68, (len(l1), l1)
    l1 += line_checksum(l1)

    ecc_text = f"{eccentricity:.7f}".split(".")[1]
    l2 = (f"2 {norad_id:05d} {inclination:8.4f} {raan:8.4f} {ecc_text} "
          f"{arg_perigee:8.4f} {mean_anomaly:8.4f} {mean_motion:11.8f}"
          f"{rev:5d}")
    assert len(l2) == 68, (len(l2), l2)
    l2 += line_checksum(l2)
    return l1, l2


def corrupt_checksum(line: str) -> str:
    """Increment the stored checksum digit mod 10."""
    return line[:-1] + str((int(line[-1]) + 1) % 10)
