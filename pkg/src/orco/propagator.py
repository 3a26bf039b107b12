"""Deterministic propagation of element sets to TEME state vectors.

``propagate`` is the single entry point the rest of the pipeline uses; it
accepts either a parsed :class:`~orco.tle.TleRecord` or a bare
:class:`MeanElements` set (the uncertainty machinery perturbs elements
directly, bypassing the fixed-column TLE quantization).

Everything stays in the TEME frame end-to-end.  All comparisons downstream
are object-vs-object in the same frame, so the TEME->J2000 rotation would
cancel and is deliberately omitted.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timedelta
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from .constants import DEG2RAD, MU_EARTH, REV_PER_DAY_TO_RAD_PER_MIN
from .errors import EmptyWindow, HorizonExceeded, PropagationError
from .sgp4 import NearEarthModel
from .timeutil import days_since_1950, minutes_between, to_utc
from .tle import TleRecord

DEFAULT_HORIZON_DAYS = 30.0


@dataclass(frozen=True)
class MeanElements:
    """SGP4 mean element set in native units (radians, radians/minute).

    This is the exact-precision form of a TLE's element content; perturbed
    sets produced by the uncertainty machinery live here, free of the
    fixed-column formatting quantization.
    """

    epoch: datetime
    no_kozai: float          # rad/min
    eccentricity: float
    inclination: float       # rad
    raan: float              # rad
    arg_perigee: float       # rad
    mean_anomaly: float      # rad
    bstar: float             # 1/earth radii
    norad_id: int = 0

    @classmethod
    def from_record(cls, record: TleRecord) -> "MeanElements":
        return cls(
            epoch=record.epoch,
            no_kozai=record.mean_motion * REV_PER_DAY_TO_RAD_PER_MIN,
            eccentricity=record.eccentricity,
            inclination=record.inclination_deg * DEG2RAD,
            raan=record.raan_deg * DEG2RAD,
            arg_perigee=record.arg_perigee_deg * DEG2RAD,
            mean_anomaly=record.mean_anomaly_deg * DEG2RAD,
            bstar=record.bstar,
            norad_id=record.norad_id,
        )

    def with_vector(self, x: np.ndarray) -> "MeanElements":
        """Copy with the six free elements replaced by vector x.

        Order: [no_kozai, eccentricity, inclination, raan, arg_perigee,
        mean_anomaly].  Drag terms and epoch are preserved.
        """
        return MeanElements(
            epoch=self.epoch,
            no_kozai=float(x[0]),
            eccentricity=float(x[1]),
            inclination=float(x[2]),
            raan=float(x[3]),
            arg_perigee=float(x[4]),
            mean_anomaly=float(x[5]),
            bstar=self.bstar,
            norad_id=self.norad_id,
        )

    def vector(self) -> np.ndarray:
        return np.array([self.no_kozai, self.eccentricity, self.inclination,
                         self.raan, self.arg_perigee, self.mean_anomaly])


@dataclass(frozen=True)
class StateVector:
    """Epoch-stamped TEME position/velocity."""

    epoch: datetime
    position: tuple[float, float, float]   # km
    velocity: tuple[float, float, float]   # km/s
    norad_id: int = 0

    @property
    def r(self) -> np.ndarray:
        return np.array(self.position)

    @property
    def v(self) -> np.ndarray:
        return np.array(self.velocity)

    def rv(self) -> np.ndarray:
        return np.array(self.position + self.velocity)

    def specific_energy(self) -> float:
        """v^2/2 - mu/|r| (km^2/s^2); negative for bound orbits."""
        r = np.linalg.norm(self.position)
        v2 = float(np.dot(self.velocity, self.velocity))
        return 0.5 * v2 - MU_EARTH / r


@dataclass(frozen=True)
class Ephemeris:
    norad_id: int
    start: datetime
    stop: datetime
    step: float                       # seconds
    states: tuple[StateVector, ...]

    def positions(self) -> np.ndarray:
        return np.array([s.position for s in self.states])

    def to_csv(self, path) -> None:
        """epoch ISO-8601, rx, ry, rz, vx, vy, vz — column order fixed."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "rx", "ry", "rz", "vx", "vy", "vz"])
            for s in self.states:
                writer.writerow([s.epoch.isoformat(),
                                 repr(s.position[0]), repr(s.position[1]),
                                 repr(s.position[2]), repr(s.velocity[0]),
                                 repr(s.velocity[1]), repr(s.velocity[2])])


@lru_cache(maxsize=8192)
def _model_for(elements: MeanElements) -> NearEarthModel:
    return NearEarthModel(
        epoch_days_1950=days_since_1950(elements.epoch),
        bstar=elements.bstar,
        ecco=elements.eccentricity,
        argpo=elements.arg_perigee,
        inclo=elements.inclination,
        mo=elements.mean_anomaly,
        no_kozai=elements.no_kozai,
        nodeo=elements.raan,
    )


Propagatable = Union[TleRecord, MeanElements]


def _as_elements(source: Propagatable) -> MeanElements:
    if isinstance(source, MeanElements):
        return source
    return MeanElements.from_record(source)


def propagate(source: Propagatable, t: datetime,
              horizon_days: Optional[float] = DEFAULT_HORIZON_DAYS
              ) -> StateVector:
    """TEME state of the object at absolute time t.

    Raises DeepSpaceUnsupported for periods >= 225 min, DecayedOrbit when
    the model decays (subterranean radius or degenerate elements), and
    HorizonExceeded when |t - epoch| exceeds the horizon (pass
    ``horizon_days=None`` to disable the check).
    """
    elements = _as_elements(source)
    t = to_utc(t)
    tsince = minutes_between(elements.epoch, t)
    if horizon_days is not None and abs(tsince) > horizon_days * 1440.0:
        raise HorizonExceeded(
            f"|t - epoch| = {abs(tsince) / 1440.0:.2f} d exceeds horizon "
            f"{horizon_days:g} d")
    model = _model_for(elements)
    r, v = model.state_at(tsince)
    return StateVector(epoch=t, position=r, velocity=v,
                       norad_id=elements.norad_id)


def make_ephemeris(source: Propagatable, start: datetime, stop: datetime,
                   step: float,
                   horizon_days: Optional[float] = DEFAULT_HORIZON_DAYS
                   ) -> Ephemeris:
    """States on the uniform grid start + k*step, inclusive of any grid
    point <= stop.  Propagation failure at any grid point aborts with the
    failing time attached."""
    start = to_utc(start)
    stop = to_utc(stop)
    if not start < stop:
        raise EmptyWindow(f"start {start.isoformat()} !< stop {stop.isoformat()}")
    if step <= 0.0:
        raise EmptyWindow(f"step {step:g} s must be positive")
    elements = _as_elements(source)
    n_steps = int((stop - start).total_seconds() / step + 1e-9)
    states = []
    for k in range(n_steps + 1):
        t = start + timedelta(seconds=k * step)
        try:
            states.append(propagate(elements, t, horizon_days))
        except PropagationError as exc:
            raise type(exc)(
                f"{exc.message} (at grid point {t.isoformat()})") from exc
    return Ephemeris(norad_id=elements.norad_id, start=start,
                     stop=states[-1].epoch, step=step, states=tuple(states))


def propagation_test_times(epoch: datetime,
                           offsets_min: Sequence[float]) -> list[datetime]:
    """Absolute times at the given minute offsets from epoch."""
    return [epoch + timedelta(minutes=m) for m in offsets_min]
