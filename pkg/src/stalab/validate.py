"""Golden-formula and oracle-equivalence checks behind `stalab validate`.

Every check compares an analytic result against either a published closed
form or a brute-force numerical twin and reports one line in the format
``case_id=... analytic=... oracle=... abs_err=... rel_err=... verdict=...``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import kinematics, oracle, phase, response
from .sequence import (PhysicalParams, build_butterfly, build_cab,
                       build_cab_kicktrain, build_const_accel_recoil,
                       build_mach_zehnder, build_recoil_triangle)


@dataclass(frozen=True)
class CheckResult:
    case_id: str
    analytic: float
    oracle: float
    tol: float
    rel_err: float

    @property
    def abs_err(self) -> float:
        return abs(self.analytic - self.oracle)

    @property
    def passed(self) -> bool:
        return self.rel_err <= self.tol

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"case_id={self.case_id} analytic={self.analytic:.12e} "
                f"oracle={self.oracle:.12e} abs_err={self.abs_err:.3e} "
                f"rel_err={self.rel_err:.3e} verdict={verdict}")


def _result(case_id: str, analytic: float, reference: float,
            tol: float) -> CheckResult:
    scale = max(abs(analytic), abs(reference), 1e-300)
    rel = abs(analytic - reference) / scale
    return CheckResult(case_id, analytic, reference, tol, rel)


def _params(n: int = 1) -> PhysicalParams:
    return PhysicalParams.rubidium87(n=n)


G0 = 9.8  # m/s^2, along k_hat in all stock checks


def _check_mz_phase() -> list[CheckResult]:
    out = []
    p = _params(n=2)
    T = Fraction(1, 10)
    g = tuple(G0 * p.k_hat)
    seq = build_mach_zehnder(p, T, g=g)
    bd = phase.total_phase(seq)
    expected = 2.0 * p.n * p.k_mag * G0 * float(T) ** 2
    out.append(_result("mz/phase-closed-form", bd.total, expected, 1e-12))
    out.append(_result("mz/phase-action-oracle", bd.total,
                       oracle.action_phase(seq), 1e-9))
    return out


def _check_mz_transfer() -> list[CheckResult]:
    p = _params()
    T = Fraction(1, 10)
    seq = build_mach_zehnder(p, T)
    omegas = np.geomspace(0.3 / float(T), 33.0 / float(T), 40)
    worst_g = worst_q = 0.0
    at_g = at_q = (0.0, 0.0)
    for w in omegas:
        r = response.sensitivity_R(seq, w)
        gold = abs(float(response.r_mz(w, T)))
        if abs(r - gold) / max(gold, 1e-12) > worst_g:
            worst_g = abs(r - gold) / max(gold, 1e-12)
            at_g = (r, gold)
        ac, _ = response.transfer(seq, w)
        qc, _ = oracle.quadrature_transfer(seq, w)
        scale = max(np.max(np.abs(ac)), 1e-18)
        dq = float(np.max(np.abs(ac - qc))) / scale
        if dq > worst_q:
            worst_q = dq
            at_q = (float(ac[2]), float(qc[2]))
    return [
        CheckResult("mz/transfer-golden", at_g[0], at_g[1], 1e-8, worst_g),
        CheckResult("mz/transfer-quadrature", at_q[0], at_q[1], 1e-8, worst_q),
    ]


def _check_cab() -> list[CheckResult]:
    out = []
    p = _params()
    T, T_r, n_b = Fraction(1, 8), Fraction(1, 400), 5
    g = tuple(G0 * p.k_hat)
    seq = build_cab(p, T, n_b, T_r=T_r, g=g)
    bd = phase.total_phase(seq)
    expected = (2.0 * (p.n + n_b * (0.5 - 2.0 * float(T_r) / float(T)))
                * p.k_mag * G0 * float(T) ** 2)
    out.append(_result("cab/phase-closed-form", bd.total, expected, 1e-12))
    out.append(_result("cab/phase-action-oracle", bd.total,
                       oracle.action_phase(seq), 1e-9))
    train = build_cab_kicktrain(p, T, n_b, T_r=T_r, g=g)
    rep = oracle.kicktrain_equivalence(seq, train)
    out.append(CheckResult("cab/kicktrain-area",
                           float(np.linalg.norm(rep.area_continuous)),
                           float(np.linalg.norm(rep.area_kicktrain)),
                           1e-12, rep.area_rel_err))
    seq0 = build_cab(p, T, 6, T_r=0)
    eps = 6 / (2.0 * p.n)
    omegas = np.linspace(0.7 / float(T), 30.0 / float(T), 40)
    worst = 0.0
    at = (0.0, 0.0)
    for w in omegas:
        r = response.sensitivity_R(seq0, w)
        gold = abs(float(response.r_cab(w, T, eps)))
        rel = abs(r - gold) / max(gold, 1e-12)
        if rel > worst:
            worst, at = rel, (r, gold)
    out.append(CheckResult("cab/transfer-golden", at[0], at[1], 1e-8, worst))
    return out


def _check_butterfly() -> list[CheckResult]:
    p = _params()
    T = Fraction(1, 5)
    seq = build_butterfly(p, T)
    area = float(np.linalg.norm(kinematics.space_time_area(seq)))
    out = [_result("butterfly/area-zero", area, 0.0, 0.0)]
    omegas = np.linspace(0.4 / float(T), 25.0 / float(T), 40)
    worst = 0.0
    at = (0.0, 0.0)
    for w in omegas:
        r = response.sensitivity_Rstar(seq, w)
        gold = abs(float(response.rstar_butterfly(w, T)))
        rel = abs(r - gold) / max(gold, 1e-10)
        if rel > worst:
            worst, at = rel, (r, gold)
    out.append(CheckResult("butterfly/rstar-golden", at[0], at[1], 1e-8,
                           worst))
    return out


def _check_laser() -> list[CheckResult]:
    p = _params(n=3)
    T = Fraction(1, 10)
    phis = (0.21, -0.4, 1.13)
    seq = build_mach_zehnder(p, T, phases=phis)
    expected = p.n * (phis[0] - 2 * phis[1] + phis[2])
    out = [_result("laser/mz-pattern", phase.laser_phase(seq), expected,
                   1e-12)]
    bp = (0.3, -0.7, 0.11, 0.5)
    n_b = 4
    seq2 = build_cab(p, T, n_b, T_r=Fraction(1, 200), phases=phis,
                     bloch_phases=bp)
    expected2 = (p.n * (phis[0] - 2 * phis[1] + phis[2])
                 + n_b * (bp[0] - bp[1] - bp[2] + bp[3]))
    out.append(_result("laser/cab-pattern", phase.laser_phase(seq2),
                       expected2, 1e-12))
    return out


def _check_recoil() -> list[CheckResult]:
    out = []
    p = _params(n=2)
    T = Fraction(3, 25)
    seq = build_recoil_triangle(p, T)
    expected = 8.0 * p.n**2 * p.recoil_frequency * float(T)
    out.append(_result("recoil/triangle-kinetic", phase.kinetic_phase(seq),
                       expected, 1e-12))
    n_b, tau_b = 7, Fraction(3, 25) / 14  # n_b = T / (2 tau_b)
    a = 2.0 * p.hbar * p.k_mag / (p.m * float(tau_b))
    g = tuple(G0 * p.k_hat)
    seq2 = build_const_accel_recoil(p, T, a, g=g)
    bd = phase.total_phase(seq2)
    expected2 = (8.0 / 3.0 * n_b**2 * p.recoil_frequency * float(T)
                 - n_b * p.k_mag * G0 * float(T) ** 2)
    out.append(_result("recoil/const-accel-phase", bd.total, expected2,
                       1e-10))
    tau = float(tau_b)
    rewritten = (2.0 * p.recoil_frequency / (3.0 * tau**2)
                 - p.k_mag * G0 / (2.0 * tau)) * float(T) ** 3
    out.append(_result("recoil/const-accel-T3-form", bd.total, rewritten,
                       1e-10))
    return out


def _check_separation() -> list[CheckResult]:
    p = _params(n=2)
    T = Fraction(1, 10)
    out = []
    for dt in (Fraction(1, 10**6), -Fraction(1, 10**6)):
        seq = build_mach_zehnder(p, T, last_pulse_offset=dt)
        got = phase.separation_phase(seq)
        expected = 8.0 * p.n**2 * p.recoil_frequency * float(dt)
        out.append(_result(f"separation/timing-offset({float(dt):+.0e})",
                           got, expected, 1e-9))
    closed = phase.separation_phase(build_mach_zehnder(p, T))
    out.append(_result("separation/closed-zero", closed, 0.0, 0.0))
    return out


def _check_sagnac() -> list[CheckResult]:
    p = _params()
    T = Fraction(1, 10)
    earth = 7.292e-5
    rot = (earth, 0.0, 0.0)
    v_i = (0.0, 0.25, 0.0)
    g = tuple(G0 * p.k_hat)
    out = []
    seq = build_mach_zehnder(p, T, g=g, omega=rot, v_i=v_i)
    got = phase.sagnac_phase(seq)
    cross = np.cross(rot, v_i)
    expected = -4.0 * p.n * float(T) ** 2 * float(np.dot(p.k_hat * p.k_mag,
                                                         cross))
    out.append(_result("sagnac/mz-closed-form", got, expected, 1e-10))
    out.append(_result("sagnac/mz-oracle", got, oracle.sagnac_oracle(seq),
                       1e-8))
    n_b = 4
    seq2 = build_cab(p, T, n_b, T_r=0, g=g, omega=rot, v_i=v_i)
    got2 = phase.sagnac_phase(seq2)
    tau = float(T) / (2 * n_b)
    expected2 = -(2.0 * p.n * float(T) ** 2 + float(T) ** 3 / (2 * tau)) \
        * float(np.dot(p.k_hat * p.k_mag, 2.0 * cross))
    out.append(_result("sagnac/cab-closed-form", got2, expected2, 1e-10))
    out.append(_result("sagnac/cab-oracle", got2, oracle.sagnac_oracle(seq2),
                       1e-8))
    return out


def _check_decomposition(seed: int = 0, cases: int = 20) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    p = _params()
    worst = 0.0
    at = (0.0, 0.0)
    for _ in range(cases):
        seq = oracle.random_closed_sequence(rng, p, Fraction(1, 10))
        g = tuple(float(rng.uniform(-15, 15)) * p.k_hat)
        analytic = math.fsum((phase.separation_phase(seq),
                              phase.kinetic_phase(seq),
                              phase.inertial_phase(seq, g)))
        brute = oracle.action_phase(seq, g)
        rel = abs(analytic - brute) / max(abs(analytic), abs(brute), 1e-300)
        if rel > worst:
            worst, at = rel, (analytic, brute)
    return [CheckResult("decomposition/randomized", at[0], at[1], 1e-9,
                        worst)]


def _check_symmetry(seed: int = 1, cases: int = 10) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    p = _params()
    worst = 0.0
    for kind in ("i", "ii"):
        for _ in range(cases):
            seq = oracle.random_mirrored_sequence(rng, p, Fraction(1, 10),
                                                  kind)
            ta, tb = kinematics.arm_trajectories(seq)
            scale = 0.5 * p.m / p.hbar * float(
                kinematics.speed_squared_integral_exact(ta)
                + kinematics.speed_squared_integral_exact(tb))
            rel = abs(phase.kinetic_phase(seq)) / max(scale, 1e-300)
            worst = max(worst, rel)
    return [CheckResult("symmetry/kinetic-cancellation", worst, 0.0, 1e-12,
                        worst)]


_CHECKS: dict[str, Callable[[], list[CheckResult]]] = {
    "mz/phase": _check_mz_phase,
    "mz/transfer": _check_mz_transfer,
    "cab": _check_cab,
    "butterfly": _check_butterfly,
    "laser": _check_laser,
    "recoil": _check_recoil,
    "separation": _check_separation,
    "sagnac": _check_sagnac,
    "decomposition": _check_decomposition,
    "symmetry": _check_symmetry,
}


def run_checks(filter_substr: str = "") -> list[CheckResult]:
    """Run the check groups whose name contains ``filter_substr``."""
    results: list[CheckResult] = []
    for group, check in _CHECKS.items():
        if filter_substr and filter_substr not in group:
            continue
        results.extend(check())
    return results
