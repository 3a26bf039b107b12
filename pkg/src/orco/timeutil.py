"""UTC time handling: TLE epochs, Julian dates, ISO-8601 serialization.

All absolute times in the pipeline are timezone-aware UTC datetimes.  Leap
seconds are ignored inside a propagation window; the resulting sub-second
error is far below TLE accuracy.  TLE epoch fractions (8 decimal digits of
a day) are exact multiples of 864 microseconds, so microsecond-resolution
datetimes are lossless.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

UTC = timezone.utc

# Julian date of 1949 December 31 00:00 UT, the SGP4 internal epoch origin.
JD_1950 = 2433281.5


def to_utc(dt: datetime) -> datetime:
    """Coerce a datetime to timezone-aware UTC (naive input is taken as UTC)."""
    if dt.tzinfo is None:
        return dt.replace(tzinfo=UTC)
    return dt.astimezone(UTC)


def tle_epoch_to_datetime(two_digit_year: int, day_of_year: float) -> datetime:
    """Decode the TLE epoch field pair into an absolute UTC time.

    Years 57-99 map to 1957-1999, 00-56 to 2000-2056 (Sputnik-era pivot).
    ``day_of_year`` is 1-based: 1.0 means Jan 1 00:00:00.
    """
    if two_digit_year >= 57:
        year = 1900 + two_digit_year
    else:
        year = 2000 + two_digit_year
    jan1 = datetime(year, 1, 1, tzinfo=UTC)
    # Split into whole microseconds to avoid timedelta float rounding.
    total_us = round((day_of_year - 1.0) * 86400.0 * 1e6)
    return jan1 + timedelta(microseconds=total_us)


def julian_date(dt: datetime) -> tuple[float, float]:
    """Return (whole-day JD at 12:00 UT boundary, day fraction).

    The split form preserves full double precision when the two parts are
    combined downstream.
    """
    dt = to_utc(dt)
    year, mon, day = dt.year, dt.month, dt.day
    jd = (367.0 * year
          - int((7 * (year + int((mon + 9) / 12.0))) * 0.25)
          + int(275 * mon / 9.0)
          + day + 1721013.5)
    fr = (dt.hour * 3600.0 + dt.minute * 60.0 + dt.second
          + dt.microsecond * 1e-6) / 86400.0
    return jd, fr


def days_since_1950(dt: datetime) -> float:
    """Days elapsed since 1949-12-31 00:00 UT (SGP4 epoch convention)."""
    jd, fr = julian_date(dt)
    return (jd - JD_1950) + fr


def minutes_between(t0: datetime, t1: datetime) -> float:
    """Minutes from t0 to t1 (signed)."""
    return (to_utc(t1) - to_utc(t0)).total_seconds() / 60.0


def isoformat_ms(dt: datetime) -> str:
    """ISO-8601 UTC with exactly millisecond precision, Z suffix."""
    dt = to_utc(dt)
    us = dt.microsecond
    ms = round(us / 1000.0)
    if ms == 1000:
        dt = dt + timedelta(seconds=1)
        ms = 0
    return dt.strftime("%Y-%m-%dT%H:%M:%S") + f".{ms:03d}Z"


def parse_iso(text: str) -> datetime:
    """Parse ISO-8601 (with optional Z suffix / offset) into aware UTC."""
    cleaned = text.strip()
    if cleaned.endswith("Z"):
        cleaned = cleaned[:-1] + "+00:00"
    return to_utc(datetime.fromisoformat(cleaned))
