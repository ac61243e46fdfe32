"""Cross-check suite: identities, mode agreement, oracle equality, MC sanity."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .enumeration import oracle_conditional_law, oracle_joint_masses
from .exactlaws import (
    binary_conditional_law,
    expected_vertices_on_event,
    joint_mass,
    leaf_law,
    leaf_series,
    plugin_conditional_law,
    ratio_conditional_law,
    v_conditional_moments,
)
from .offspring import NAMED_DISTRIBUTIONS, OffspringDistribution, reduce_distribution
from .powerseries import leaf_numerators, verify_gf_identities
from .trees import subtree_profile
from .treesim import rejection_sample, sample_trees

__all__ = ["CheckResult", "LEVELS", "run_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}" + (f": {self.detail}" if self.detail else "")


LEVELS = {
    "quick": dict(series=30, joint=12, oracle=5, mc_ell=5, mc_accepted=2000, fuzz=2000),
    "full": dict(series=60, joint=30, oracle=7, mc_ell=8, mc_accepted=10000, fuzz=20000),
}


def _gf_identities(d, cfg):
    report = verify_gf_identities(d, cfg["series"])
    return report.agree, f"checked through order {report.checked_through}"


def _quadratic_vs_table(d, cfg):
    n = cfg["series"]
    naive = leaf_numerators(d, n)
    table = leaf_series(d, n)
    bad = [m for m in range(1, n + 1) if naive.coeff(m) != table[m]]
    return not bad, f"first mismatch at {bad[0]}" if bad else f"orders 1..{n}"


def _reduction(d, cfg):
    n = cfg["series"]
    r = reduce_distribution(d)
    first = leaf_series(d, n).first_mismatch(leaf_series(r, n))
    return first is None, "leaf series of reduced law" + (f" differs at {first}" if first else " agrees")


def _joint_modes(d, cfg):
    top = cfg["joint"]
    for ell in range(1, top + 1):
        for t in range(1, ell + 1):
            if joint_mass(d, ell, t, "recursion") != joint_mass(d, ell, t, "closed"):
                return False, f"ell={ell}, t={t}"
    return True, f"all t <= ell <= {top}"


def _joint_sum(d, cfg):
    top = cfg["joint"]
    for ell in range(1, top + 1):
        total = sum((joint_mass(d, ell, t) for t in range(1, ell + 1)), Fraction(0))
        if total != expected_vertices_on_event(d, ell):
            return False, f"ell={ell}"
    return True, f"ell <= {top}"


def _v_moments(d, cfg):
    top = cfg["joint"]
    for ell in range(1, top + 1):
        mom = v_conditional_moments(d, ell)
        if mom.mean != expected_vertices_on_event(d, ell) / leaf_law(d, ell) or mom.variance < 0:
            return False, f"ell={ell}"
        if d == NAMED_DISTRIBUTIONS["binary"] and (mom.mean != 2 * ell - 1 or mom.variance != 0):
            return False, f"binary V not deterministic at ell={ell}"
    return True, f"ell <= {top}"


def _plugin_residual(d, cfg):
    ell = cfg["joint"]
    law = plugin_conditional_law(d, ell)
    ok = law.total() + law.residual == 1
    ratio = ratio_conditional_law(d, ell)
    ok = ok and ratio.total() == 1
    return ok, f"ell={ell}, plug-in residual {float(law.residual):.3g}"


def _oracle_cap(d, ell):
    # the 4l default is exponential in l once unary chains are allowed
    return 2 * ell - 1 if d.p1 == 0 else 2 * ell + 1


def _oracle(d, cfg):
    reduced_binary = reduce_distribution(d) == NAMED_DISTRIBUTIONS["binary"]
    for ell in range(1, cfg["oracle"] + 1):
        law = oracle_conditional_law(d, ell, _oracle_cap(d, ell))
        if d.p1 == 0 and law.residual != 0:
            return False, f"nonzero residual without unary vertices at ell={ell}"
        if reduced_binary and any(law.mass(t) != binary_conditional_law(ell).mass(t)
                                  for t in range(1, ell + 1)):
            return False, f"oracle differs from the binary law at ell={ell}"
        masses, _ = oracle_joint_masses(d, ell, _oracle_cap(d, ell))
        for t in range(1, ell + 1):
            mass, exact = masses[t], joint_mass(d, ell, t)
            if (d.p1 == 0 and mass != exact) or mass > exact:
                return False, f"oracle joint mass off at ell={ell}, t={t}"
    return True, f"ell <= {cfg['oracle']}"


def _mc(d, cfg):
    ell = cfg["mc_ell"]
    run = rejection_sample(d, ell, cfg["mc_accepted"], seed=20240601)
    again = rejection_sample(d, ell, cfg["mc_accepted"], seed=20240601)
    if run.estimates != again.estimates:
        return False, "not reproducible"
    oracle = oracle_conditional_law(d, ell, _oracle_cap(d, ell))
    # truncation bias of the normalised oracle is at most 2 P(cap missed | L=ell)
    slack = 2 * float(oracle.residual / leaf_law(d, ell))
    worst = 0.0
    for e in run.estimates:
        z = abs(e.point - oracle.float_mass(e.t))
        if z > 4 * e.stderr + slack + 1e-12:
            return False, f"t={e.t}: |{e.point:.5f} - {oracle.float_mass(e.t):.5f}| > 4 se"
        if e.stderr:
            worst = max(worst, z / e.stderr)
    return True, f"ell={ell}, max |z| = {worst:.2f}"


def _profiles(d, cfg):
    n = 0
    for tree in sample_trees(d, cfg["fuzz"], seed=7, node_cap=10**4):
        if not hasattr(tree, "degrees"):
            continue
        prof = subtree_profile(tree)
        n += 1
        if (sum(prof.counts.values()) != prof.vertices
                or prof.counts.get(1, 0) < prof.leaves
                or prof.counts.get(prof.leaves, 0) < 1
                or max(prof.counts) != prof.leaves):
            return False, f"bad profile for {tree.degrees[:20]}"
    return True, f"{n} sampled trees"


CHECKS: list[tuple[str, Callable]] = [
    ("gf-identities", _gf_identities),
    ("recurrence-vs-quadratic", _quadratic_vs_table),
    ("reduction-invariance", _reduction),
    ("joint-mass-modes", _joint_modes),
    ("joint-mass-sum", _joint_sum),
    ("v-moments", _v_moments),
    ("plugin-residual", _plugin_residual),
    ("oracle", _oracle),
    ("subtree-profiles", _profiles),
    ("monte-carlo", _mc),
]


def run_checks(d: OffspringDistribution, level: str = "quick") -> list[CheckResult]:
    d.require_critical()
    cfg = LEVELS[level]
    out = []
    for name, check in CHECKS:
        try:
            ok, detail = check(d, cfg)
        except Exception as exc:  # a crash is a failed check, not an abort
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(ok), detail))
    return out
