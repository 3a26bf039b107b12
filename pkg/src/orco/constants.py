"""WGS-72 gravity model constants.

The WGS-72 set is the canonical one for TLE-based propagation; every module
in the pipeline (propagator, element fitting, altitude filters) must use
these same values so that derived quantities stay mutually consistent.
"""

from math import pi, sqrt

MU_EARTH = 398600.8            # km^3/s^2
R_EARTH = 6378.135             # km
J2 = 0.001082616
J3 = -0.00000253881
J4 = -0.00000165597
J3OJ2 = J3 / J2

# Kepler's third law in canonical SGP4 units (earth radii, minutes).
XKE = 60.0 / sqrt(R_EARTH * R_EARTH * R_EARTH / MU_EARTH)
TUMIN = 1.0 / XKE

TWOPI = 2.0 * pi
DEG2RAD = pi / 180.0
RAD2DEG = 180.0 / pi

MINUTES_PER_DAY = 1440.0
SECONDS_PER_DAY = 86400.0

# rev/day -> rad/min
REV_PER_DAY_TO_RAD_PER_MIN = TWOPI / MINUTES_PER_DAY
