"""Near-Earth SGP4 analytic propagation core.

Implements the standard near-Earth formulation (Brouwer mean-element theory
with secular J2/J3/J4 terms, B*-drag, and long-/short-period periodic
corrections) over the WGS-72 gravity constants.  Objects in the deep-space
regime (period >= 225 minutes after un-Kozai-ing the mean motion) are
rejected; the deep-space resonance and lunar-solar machinery is out of
scope here.

Outputs are TEME-frame position (km) and velocity (km/s).  The model is a
pure function of its mean elements and the time offset, so identical
inputs always yield bit-identical outputs.

Variable names follow the conventional SGP4 symbols (cc1, t2cof, xmcof,
...) used across the established implementations of this algorithm; they
are terms of art, and renaming them would only obscure cross-checking.
"""

from __future__ import annotations

from math import atan2, cos, fabs, pi, sin, sqrt

from .constants import J2, J3OJ2, J4, R_EARTH, XKE
from .errors import DecayedOrbit, DeepSpaceUnsupported

TWOPI = 2.0 * pi
X2O3 = 2.0 / 3.0
DEEP_SPACE_PERIOD_MIN = 225.0


class NearEarthModel:
    """Initialized SGP4 coefficients for one near-Earth element set.

    Parameters are the TLE mean elements in SGP4-native units: angles in
    radians, mean motion in radians/minute (Kozai convention), epoch in
    days since 1949-12-31 00:00 UT, bstar in inverse earth radii.
    """

    __slots__ = (
        "epoch_days_1950", "bstar", "ecco", "argpo", "inclo", "mo",
        "no_kozai", "nodeo", "no_unkozai", "isimp", "aycof", "con41",
        "cc1", "cc4", "cc5", "d2", "d3", "d4", "delmo", "eta", "argpdot",
        "omgcof", "sinmao", "t2cof", "t3cof", "t4cof", "t5cof", "x1mth2",
        "x7thm1", "mdot", "nodedot", "xlcof", "xmcof", "nodecf",
    )

    def __init__(self, epoch_days_1950: float, bstar: float, ecco: float,
                 argpo: float, inclo: float, mo: float, no_kozai: float,
                 nodeo: float):
        self.epoch_days_1950 = epoch_days_1950
        self.bstar = bstar
        self.ecco = ecco
        self.argpo = argpo
        self.inclo = inclo
        self.mo = mo
        self.no_kozai = no_kozai
        self.nodeo = nodeo

        if no_kozai <= 0.0:
            raise DecayedOrbit(f"mean motion {no_kozai:g} rad/min is non-positive")
        if not (0.0 <= ecco < 1.0):
            raise DecayedOrbit(f"epoch eccentricity {ecco:g} outside [0, 1)")

        temp4 = 1.5e-12

        ss = 78.0 / R_EARTH + 1.0
        qzms2ttemp = (120.0 - 78.0) / R_EARTH
        qzms2t = qzms2ttemp * qzms2ttemp * qzms2ttemp * qzms2ttemp

        # --- auxiliary epoch quantities / un-Kozai the mean motion ---
        eccsq = ecco * ecco
        omeosq = 1.0 - eccsq
        rteosq = sqrt(omeosq)
        cosio = cos(inclo)
        cosio2 = cosio * cosio

        ak = pow(XKE / no_kozai, X2O3)
        d1 = 0.75 * J2 * (3.0 * cosio2 - 1.0) / (rteosq * omeosq)
        del_ = d1 / (ak * ak)
        adel = ak * (1.0 - del_ * del_ - del_ *
                     (1.0 / 3.0 + 134.0 * del_ * del_ / 81.0))
        del_ = d1 / (adel * adel)
        no_unkozai = no_kozai / (1.0 + del_)
        self.no_unkozai = no_unkozai

        if no_unkozai <= 0.0:
            raise DecayedOrbit("non-positive mean motion after un-Kozai")
        if TWOPI / no_unkozai >= DEEP_SPACE_PERIOD_MIN:
            raise DeepSpaceUnsupported(
                f"orbital period {TWOPI / no_unkozai:.1f} min >= "
                f"{DEEP_SPACE_PERIOD_MIN:.0f} min (deep-space regime)")

        ao = pow(XKE / no_unkozai, X2O3)
        sinio = sin(inclo)
        po = ao * omeosq
        con42 = 1.0 - 5.0 * cosio2
        self.con41 = -con42 - cosio2 - cosio2
        posq = po * po
        rp = ao * (1.0 - ecco)

        self.isimp = 0
        if rp < 220.0 / R_EARTH + 1.0:
            self.isimp = 1
        sfour = ss
        qzms24 = qzms2t
        perige = (rp - 1.0) * R_EARTH

        # for perigees below 156 km the s and q constants are altered
        if perige < 156.0:
            sfour = perige - 78.0
            if perige < 98.0:
                sfour = 20.0
            qzms24temp = (120.0 - sfour) / R_EARTH
            qzms24 = qzms24temp * qzms24temp * qzms24temp * qzms24temp
            sfour = sfour / R_EARTH + 1.0

        pinvsq = 1.0 / posq

        tsi = 1.0 / (ao - sfour)
        self.eta = ao * ecco * tsi
        etasq = self.eta * self.eta
        eeta = ecco * self.eta
        psisq = fabs(1.0 - etasq)
        coef = qzms24 * pow(tsi, 4.0)
        coef1 = coef / pow(psisq, 3.5)
        cc2 = coef1 * no_unkozai * (ao * (1.0 + 1.5 * etasq + eeta *
              (4.0 + etasq)) + 0.375 * J2 * tsi / psisq * self.con41 *
              (8.0 + 3.0 * etasq * (8.0 + etasq)))
        self.cc1 = bstar * cc2
        cc3 = 0.0
        if ecco > 1.0e-4:
            cc3 = -2.0 * coef * tsi * J3OJ2 * no_unkozai * sinio / ecco
        self.x1mth2 = 1.0 - cosio2
        self.cc4 = 2.0 * no_unkozai * coef1 * ao * omeosq * \
            (self.eta * (2.0 + 0.5 * etasq) + ecco *
             (0.5 + 2.0 * etasq) - J2 * tsi / (ao * psisq) *
             (-3.0 * self.con41 * (1.0 - 2.0 * eeta + etasq *
              (1.5 - 0.5 * eeta)) + 0.75 * self.x1mth2 *
              (2.0 * etasq - eeta * (1.0 + etasq)) * cos(2.0 * argpo)))
        self.cc5 = 2.0 * coef1 * ao * omeosq * (1.0 + 2.75 *
                   (etasq + eeta) + eeta * etasq)
        cosio4 = cosio2 * cosio2
        temp1 = 1.5 * J2 * pinvsq * no_unkozai
        temp2 = 0.5 * temp1 * J2 * pinvsq
        temp3 = -0.46875 * J4 * pinvsq * pinvsq * no_unkozai
        self.mdot = no_unkozai + 0.5 * temp1 * rteosq * self.con41 + 0.0625 * \
            temp2 * rteosq * (13.0 - 78.0 * cosio2 + 137.0 * cosio4)
        self.argpdot = (-0.5 * temp1 * con42 + 0.0625 * temp2 *
                        (7.0 - 114.0 * cosio2 + 395.0 * cosio4) +
                        temp3 * (3.0 - 36.0 * cosio2 + 49.0 * cosio4))
        xhdot1 = -temp1 * cosio
        self.nodedot = xhdot1 + (0.5 * temp2 * (4.0 - 19.0 * cosio2) +
                                 2.0 * temp3 * (3.0 - 7.0 * cosio2)) * cosio
        self.omgcof = bstar * cc3 * cos(argpo)
        self.xmcof = 0.0
        if ecco > 1.0e-4:
            self.xmcof = -X2O3 * coef * bstar / eeta
        self.nodecf = 3.5 * omeosq * xhdot1 * self.cc1
        self.t2cof = 1.5 * self.cc1
        # guard the divide for inclination = 180 deg
        if fabs(cosio + 1.0) > 1.5e-12:
            self.xlcof = -0.25 * J3OJ2 * sinio * (3.0 + 5.0 * cosio) / (1.0 + cosio)
        else:
            self.xlcof = -0.25 * J3OJ2 * sinio * (3.0 + 5.0 * cosio) / temp4
        self.aycof = -0.5 * J3OJ2 * sinio
        delmotemp = 1.0 + self.eta * cos(mo)
        self.delmo = delmotemp * delmotemp * delmotemp
        self.sinmao = sin(mo)
        self.x7thm1 = 7.0 * cosio2 - 1.0

        self.d2 = 0.0
        self.d3 = 0.0
        self.d4 = 0.0
        self.t3cof = 0.0
        self.t4cof = 0.0
        self.t5cof = 0.0
        if self.isimp != 1:
            cc1sq = self.cc1 * self.cc1
            self.d2 = 4.0 * ao * tsi * cc1sq
            temp = self.d2 * tsi * self.cc1 / 3.0
            self.d3 = (17.0 * ao + sfour) * temp
            self.d4 = 0.5 * temp * ao * tsi * (221.0 * ao + 31.0 * sfour) * \
                self.cc1
            self.t3cof = self.d2 + 2.0 * cc1sq
            self.t4cof = 0.25 * (3.0 * self.d3 + self.cc1 *
                                 (12.0 * self.d2 + 10.0 * cc1sq))
            self.t5cof = 0.2 * (3.0 * self.d4 +
                                12.0 * self.cc1 * self.d3 +
                                6.0 * self.d2 * self.d2 +
                                15.0 * cc1sq * (2.0 * self.d2 + cc1sq))

        # propagate to epoch so element errors surface at init time
        self.state_at(0.0)

    def state_at(self, tsince: float) -> tuple[tuple[float, float, float],
                                               tuple[float, float, float]]:
        """TEME position (km) and velocity (km/s) at tsince minutes from epoch."""
        vkmpersec = R_EARTH * XKE / 60.0

        # --- secular gravity and atmospheric drag ---
        xmdf = self.mo + self.mdot * tsince
        argpdf = self.argpo + self.argpdot * tsince
        nodedf = self.nodeo + self.nodedot * tsince
        argpm = argpdf
        mm = xmdf
        t2 = tsince * tsince
        nodem = nodedf + self.nodecf * t2
        tempa = 1.0 - self.cc1 * tsince
        tempe = self.bstar * self.cc4 * tsince
        templ = self.t2cof * t2

        if self.isimp != 1:
            delomg = self.omgcof * tsince
            delmtemp = 1.0 + self.eta * cos(xmdf)
            delm = self.xmcof * \
                (delmtemp * delmtemp * delmtemp - self.delmo)
            temp = delomg + delm
            mm = xmdf + temp
            argpm = argpdf - temp
            t3 = t2 * tsince
            t4 = t3 * tsince
            tempa = tempa - self.d2 * t2 - self.d3 * t3 - self.d4 * t4
            tempe = tempe + self.bstar * self.cc5 * (sin(mm) - self.sinmao)
            templ = templ + self.t3cof * t3 + t4 * (self.t4cof +
                                                    tsince * self.t5cof)

        nm = self.no_unkozai
        em = self.ecco

        if nm <= 0.0:
            raise DecayedOrbit(f"mean motion {nm:f} is non-positive")

        am = pow((XKE / nm), X2O3) * tempa * tempa
        nm = XKE / pow(am, 1.5)
        em = em - tempe

        if em >= 1.0 or em < -0.001:
            raise DecayedOrbit(
                f"mean eccentricity {em:f} outside 0.0 <= e < 1.0")
        if em < 1.0e-6:
            em = 1.0e-6
        mm = mm + self.no_unkozai * templ
        xlm = mm + argpm + nodem

        nodem = nodem % TWOPI if nodem >= 0.0 else -(-nodem % TWOPI)
        argpm = argpm % TWOPI
        xlm = xlm % TWOPI
        mm = (xlm - argpm - nodem) % TWOPI

        # --- no lunar-solar periodics in the near-Earth branch ---
        sinim = sin(self.inclo)
        cosim = cos(self.inclo)
        ep = em
        xincp = self.inclo
        argpp = argpm
        nodep = nodem
        mp = mm
        sinip = sinim
        cosip = cosim

        # --- long period periodics ---
        axnl = ep * cos(argpp)
        temp = 1.0 / (am * (1.0 - ep * ep))
        aynl = ep * sin(argpp) + temp * self.aycof
        xl = mp + argpp + nodep + temp * self.xlcof * axnl

        # --- solve Kepler's equation ---
        u = (xl - nodep) % TWOPI
        eo1 = u
        tem5 = 9999.9
        ktr = 1
        while fabs(tem5) >= 1.0e-12 and ktr <= 10:
            sineo1 = sin(eo1)
            coseo1 = cos(eo1)
            tem5 = 1.0 - coseo1 * axnl - sineo1 * aynl
            tem5 = (u - aynl * coseo1 + axnl * sineo1 - eo1) / tem5
            if fabs(tem5) >= 0.95:
                tem5 = 0.95 if tem5 > 0.0 else -0.95
            eo1 = eo1 + tem5
            ktr = ktr + 1

        # --- short period preliminary quantities ---
        ecose = axnl * coseo1 + aynl * sineo1
        esine = axnl * sineo1 - aynl * coseo1
        el2 = axnl * axnl + aynl * aynl
        pl = am * (1.0 - el2)
        if pl < 0.0:
            raise DecayedOrbit(f"semilatus rectum {pl:f} is negative")

        rl = am * (1.0 - ecose)
        rdotl = sqrt(am) * esine / rl
        rvdotl = sqrt(pl) / rl
        betal = sqrt(1.0 - el2)
        temp = esine / (1.0 + betal)
        sinu = am / rl * (sineo1 - aynl - axnl * temp)
        cosu = am / rl * (coseo1 - axnl + aynl * temp)
        su = atan2(sinu, cosu)
        sin2u = (cosu + cosu) * sinu
        cos2u = 1.0 - 2.0 * sinu * sinu
        temp = 1.0 / pl
        temp1 = 0.5 * J2 * temp
        temp2 = temp1 * temp

        # --- short period periodics ---
        mrt = rl * (1.0 - 1.5 * temp2 * betal * self.con41) + \
            0.5 * temp1 * self.x1mth2 * cos2u
        su = su - 0.25 * temp2 * self.x7thm1 * sin2u
        xnode = nodep + 1.5 * temp2 * cosip * sin2u
        xinc = xincp + 1.5 * temp2 * cosip * sinip * cos2u
        mvt = rdotl - nm * temp1 * self.x1mth2 * sin2u / XKE
        rvdot = rvdotl + nm * temp1 * (self.x1mth2 * cos2u +
                                       1.5 * self.con41) / XKE

        # --- orientation vectors and state ---
        sinsu = sin(su)
        cossu = cos(su)
        snod = sin(xnode)
        cnod = cos(xnode)
        sini = sin(xinc)
        cosi = cos(xinc)
        xmx = -snod * cosi
        xmy = cnod * cosi
        ux = xmx * sinsu + cnod * cossu
        uy = xmy * sinsu + snod * cossu
        uz = sini * sinsu
        vx = xmx * cossu - cnod * sinsu
        vy = xmy * cossu - snod * sinsu
        vz = sini * cossu

        if mrt < 1.0:
            raise DecayedOrbit(
                f"radius {mrt * R_EARTH:.1f} km below Earth surface")

        _mr = mrt * R_EARTH
        r = (_mr * ux, _mr * uy, _mr * uz)
        v = ((mvt * ux + rvdot * vx) * vkmpersec,
             (mvt * uy + rvdot * vy) * vkmpersec,
             (mvt * uz + rvdot * vz) * vkmpersec)
        return r, v
