"""Independent reference propagator used as the test oracle.

``vendored_sgp4.py`` is the established third-party implementation
(vendored verbatim, including its deep-space branch).  The adapter below
drives it directly from raw TLE text with its own minimal fixed-column
extraction, so the oracle path shares no code with the package under test.
"""

from math import pi
from types import SimpleNamespace

from . import vendored_sgp4

WGS72 = vendored_sgp4.getgravconst("wgs72")

_DEG2RAD = pi / 180.0
_XPDOTP = 1440.0 / (2.0 * pi)   # rev/day -> rad/min divisor


def _jday(year, mon, day, hr, minute, sec):
    return (367.0 * year -
            7.0 * (year + ((mon + 9.0) // 12.0)) * 0.25 // 1.0 +
            275.0 * mon / 9.0 // 1.0 + day + 1721013.5 +
            ((sec / 60.0 + minute) / 60.0 + hr) / 24.0)


def _days2mdhms(year, days):
    lmonth = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]
    if year % 4 == 0:
        lmonth[1] = 29
    dayofyr = int(days // 1.0)
    i = 1
    inttemp = 0
    while dayofyr > inttemp + lmonth[i - 1] and i < 12:
        inttemp += lmonth[i - 1]
        i += 1
    mon = i
    day = dayofyr - inttemp
    temp = (days - dayofyr) * 24.0
    hr = int(temp // 1.0)
    temp = (temp - hr) * 60.0
    minute = int(temp // 1.0)
    sec = (temp - minute) * 60.0
    return mon, day, hr, minute, sec


def reference_satrec(line1, line2, opsmode="i"):
    """Initialize a reference satrec from raw TLE lines (own field slicing)."""
    sat = SimpleNamespace()
    sat.error = 0
    sat.error_message = None
    sat.whichconst = WGS72

    sat.satnum = int(line1[2:7])
    epochyr = int(line1[18:20])
    epochdays = float(line1[20:32])
    sat.ndot = float(line1[33:43])
    sat.nddot = float(line1[44] + "." + line1[45:50]) * 10.0 ** int(line1[50:52])
    sat.bstar = float(line1[53] + "." + line1[54:59]) * 10.0 ** int(line1[59:61])

    sat.inclo = float(line2[8:16]) * _DEG2RAD
    sat.nodeo = float(line2[17:25]) * _DEG2RAD
    sat.ecco = float("." + line2[26:33])
    sat.argpo = float(line2[34:42]) * _DEG2RAD
    sat.mo = float(line2[43:51]) * _DEG2RAD
    sat.no_kozai = float(line2[52:63]) / _XPDOTP

    year = epochyr + 2000 if epochyr < 57 else epochyr + 1900
    mon, day, hr, minute, sec = _days2mdhms(year, epochdays)
    sat.jdsatepoch = _jday(year, mon, day, hr, minute, sec)
    sat.epochyr = year
    sat.epochdays = epochdays

    vendored_sgp4.sgp4init(
        WGS72, opsmode, sat.satnum, sat.jdsatepoch - 2433281.5,
        sat.bstar, sat.ndot, sat.nddot, sat.ecco, sat.argpo,
        sat.inclo, sat.mo, sat.no_kozai, sat.nodeo, sat)
    return sat


def reference_state(sat, tsince_min):
    """Position/velocity at minutes past epoch; raises if the model errors."""
    r, v = vendored_sgp4.sgp4(sat, tsince_min)
    if sat.error != 0:
        raise RuntimeError(f"reference error {sat.error}: {sat.error_message}")
    return r, v
