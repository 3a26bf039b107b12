"""Osculating-state <-> mean-element machinery.

The propagation model consumes mean elements, not Cartesian states, so
Cartesian perturbations (uncertainty samples, sigma points, re-centered
moments) have to be converted back into element sets.  This is done by
differential correction: Newton iterations on the six mean elements
driving the model's epoch state onto the target state.  A shared Jacobian
(chord Newton) is reused across nearby targets for speed; convergence is
declared on epoch position error below ``tol_km``.
"""

from __future__ import annotations

import math
from datetime import datetime
from typing import Optional

import numpy as np

from .constants import MU_EARTH, TWOPI
from .errors import FitFailure, PropagationError
from .propagator import MeanElements, propagate

# Newton runs in equinoctial-style variables y = [n, e*cos(argp),
# e*sin(argp), incl, raan, argp + M]: the classical (argp, M) pair is
# numerically degenerate for near-circular orbits (the Jacobian condition
# number grows like 1/e), while this parameterization stays well
# conditioned through e -> 0.
_DIFF_STEPS = np.array([1e-9, 1e-8, 1e-8, 1e-8, 1e-8, 1e-8])

_ECC_MIN = 1e-9
_ECC_MAX = 0.99


def to_equinoctial(x: np.ndarray) -> np.ndarray:
    """Classical element vector -> [n, e*cos(argp), e*sin(argp), i, raan,
    argp + M]."""
    n, ecc, incl, raan, argp, m = x
    return np.array([n, ecc * math.cos(argp), ecc * math.sin(argp),
                     incl, raan, argp + m])


def from_equinoctial(y: np.ndarray) -> np.ndarray:
    n, ex, ey, incl, raan, lam = y
    ecc = math.hypot(ex, ey)
    if ecc > _ECC_MAX:
        scale = _ECC_MAX / ecc
        ex, ey, ecc = ex * scale, ey * scale, _ECC_MAX
    argp = math.atan2(ey, ex) if ecc > 1e-15 else 0.0
    return np.array([n, ecc, incl, raan, argp, lam - argp])


_to_newton_vars = to_equinoctial
_from_newton_vars = from_equinoctial


def epoch_state6(elements: MeanElements) -> np.ndarray:
    """Model state at the element set's own epoch as a 6-vector (km, km/s)."""
    s = propagate(elements, elements.epoch, horizon_days=None)
    return s.rv()


def _eval_newton_vars(template: MeanElements, y: np.ndarray) -> np.ndarray:
    return epoch_state6(template.with_vector(_from_newton_vars(y)))


def state_jacobian(elements: MeanElements) -> np.ndarray:
    """d(epoch state)/d(Newton variables) by central differences
    (12 evaluations)."""
    y0 = _to_newton_vars(elements.vector())
    jac = np.empty((6, 6))
    for j in range(6):
        step = _DIFF_STEPS[j]
        yp = y0.copy()
        yp[j] += step
        ym = y0.copy()
        ym[j] -= step
        sp = _eval_newton_vars(elements, yp)
        sm = _eval_newton_vars(elements, ym)
        jac[:, j] = (sp - sm) / (2.0 * step)
    return jac


def fit_elements(target6: np.ndarray, template: MeanElements,
                 jacobian: Optional[np.ndarray] = None,
                 tol_km: float = 1e-9, max_iter: int = 30
                 ) -> tuple[MeanElements, int]:
    """Differentially correct the template's elements until its epoch state
    matches ``target6`` within ``tol_km`` of position (and the matching
    velocity tolerance of ``tol_km``/1000 per second, so pure-velocity
    offsets cannot be declared converged while unapplied).

    Returns the fitted elements and the number of model evaluations spent.
    A supplied ``jacobian`` turns the loop into chord Newton (no fresh
    linearization); otherwise one Jacobian is computed at the template and
    refreshed once at the midpoint if convergence is slow.
    """
    target = np.asarray(target6, dtype=float)
    tol_km_s = tol_km / 1000.0
    y = _to_newton_vars(template.vector())
    evals = 0
    refreshed = jacobian is not None   # a caller-supplied chord stays fixed
    prev_err = math.inf
    dy = None
    pos_err = math.inf
    for it in range(max_iter):
        try:
            current = _eval_newton_vars(template, y)
            evals += 1
        except PropagationError:
            # trial iterate left the model's domain: damp the last step
            evals += 1
            if dy is None:
                raise
            for _ in range(8):
                dy = 0.5 * dy
                y = y - dy
                try:
                    current = _eval_newton_vars(template, y)
                    evals += 1
                    break
                except PropagationError:
                    evals += 1
                    continue
            else:
                raise FitFailure("element fit trapped outside model domain")
        resid = target - current
        pos_err = float(np.linalg.norm(resid[:3]))
        vel_err = float(np.linalg.norm(resid[3:]))
        if pos_err < tol_km and vel_err < tol_km_s:
            return template.with_vector(_from_newton_vars(y)), evals
        if jacobian is None:
            jacobian = state_jacobian(
                template.with_vector(_from_newton_vars(y)))
            evals += 12
        elif not refreshed and it >= 4 and pos_err > 0.3 * prev_err:
            # slow linear convergence: relinearize once at the current point
            jacobian = state_jacobian(
                template.with_vector(_from_newton_vars(y)))
            evals += 12
            refreshed = True
        prev_err = pos_err
        dy = np.linalg.lstsq(jacobian, resid, rcond=None)[0]
        y = y + dy
    raise FitFailure(
        f"element fit did not reach {tol_km:g} km in {max_iter} iterations "
        f"(residual {pos_err:.3e} km)")


def elements_from_state(state6: np.ndarray, epoch: datetime,
                        template: MeanElements) -> MeanElements:
    """Initial-guess element set from an osculating state (two-body
    conversion); drag terms carried over from the template.

    The guess is only the Newton starting point: mean and osculating
    elements differ by short-period terms of a few km, which the fit
    removes.
    """
    r = np.asarray(state6[:3], dtype=float)
    v = np.asarray(state6[3:], dtype=float)
    rn = float(np.linalg.norm(r))
    v2 = float(np.dot(v, v))

    h = np.cross(r, v)
    hn = float(np.linalg.norm(h))
    node = np.cross([0.0, 0.0, 1.0], h)
    nn = float(np.linalg.norm(node))

    e_vec = ((v2 - MU_EARTH / rn) * r - float(np.dot(r, v)) * v) / MU_EARTH
    ecc = float(np.linalg.norm(e_vec))
    energy = 0.5 * v2 - MU_EARTH / rn
    if energy >= 0.0:
        raise FitFailure("state is not on a bound orbit")
    a = -MU_EARTH / (2.0 * energy)

    incl = math.acos(max(-1.0, min(1.0, h[2] / hn)))

    if nn > 1e-12:
        raan = math.acos(max(-1.0, min(1.0, node[0] / nn)))
        if node[1] < 0.0:
            raan = TWOPI - raan
    else:
        raan = 0.0

    if nn > 1e-12 and ecc > 1e-12:
        argp = math.acos(max(-1.0, min(1.0, float(np.dot(node, e_vec)) / (nn * ecc))))
        if e_vec[2] < 0.0:
            argp = TWOPI - argp
    else:
        argp = 0.0

    if ecc > 1e-12:
        nu = math.acos(max(-1.0, min(1.0, float(np.dot(e_vec, r)) / (ecc * rn))))
        if float(np.dot(r, v)) < 0.0:
            nu = TWOPI - nu
        ecc_anom = 2.0 * math.atan2(math.sqrt(1.0 - ecc) * math.sin(nu / 2.0),
                                    math.sqrt(1.0 + ecc) * math.cos(nu / 2.0))
        mean_anom = (ecc_anom - ecc * math.sin(ecc_anom)) % TWOPI
    else:
        # circular: use argument of latitude as the anomaly
        if nn > 1e-12:
            u = math.acos(max(-1.0, min(1.0, float(np.dot(node, r)) / (nn * rn))))
            if r[2] < 0.0:
                u = TWOPI - u
        else:
            u = math.atan2(r[1], r[0]) % TWOPI
        mean_anom = u

    n_rad_min = math.sqrt(MU_EARTH / (a * a * a)) * 60.0
    return MeanElements(
        epoch=epoch,
        no_kozai=n_rad_min,
        eccentricity=max(ecc, _ECC_MIN),
        inclination=incl,
        raan=raan,
        arg_perigee=argp,
        mean_anomaly=mean_anom,
        bstar=template.bstar,
        norad_id=template.norad_id,
    )


def refit_at_epoch(state6: np.ndarray, epoch: datetime,
                   template: MeanElements,
                   tol_km: float = 1e-9) -> tuple[MeanElements, int]:
    """Fit a fresh element set (new epoch) whose model state at that epoch
    reproduces ``state6``; used when re-centering a distribution mid-arc."""
    guess = elements_from_state(state6, epoch, template)
    try:
        return fit_elements(state6, guess, jacobian=None, tol_km=tol_km)
    except (FitFailure, PropagationError):
        # two-body guess can land outside the model's domain for strongly
        # perturbed states; retry from the template's own elements
        retry = MeanElements(
            epoch=epoch, no_kozai=template.no_kozai,
            eccentricity=template.eccentricity,
            inclination=template.inclination, raan=template.raan,
            arg_perigee=template.arg_perigee,
            mean_anomaly=template.mean_anomaly, bstar=template.bstar,
            norad_id=template.norad_id)
        return fit_elements(state6, retry, jacobian=None, tol_km=tol_km)
