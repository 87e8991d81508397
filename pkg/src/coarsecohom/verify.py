"""Named verification suites over a chosen space: each bundles law audits
into a pass/fail report the CLI can run and serialize.
"""

from __future__ import annotations

from dataclasses import dataclass

from .averaging import (ball_average, conv_norm_audit, convolve,
                        dirac_family, homotopy_defect, normalize_to_prob,
                        pairs_within, tf_identity)
from .coefficients import (L1, L1_ZERO, SCALAR, boundary_pairs, entry_gap,
                           include_in_l1, l1_distance, lift_boundary,
                           lift_scalar, pi_sum)
from .cochains import (EXACT_TOL, IDENTITY_TOL, Cochain, audit_equal,
                       audit_zero, cochain_add, cochain_scale, diff_D,
                       diff_D_norm_audit, diff_d, diff_d_norm_audit,
                       johnson_cocycles, seminorm, split_s,
                       split_s_norm_audit)
from .randomgen import (random_cochain, random_pair_field, random_prob_family,
                        random_unit_sum_cochain, random_x_independent_cochain,
                        random_zero_sum_vector)
from .sequences import counterexample_s_not_invariant
from .space import FiniteMetricSpace, derive_seed

SUITE_NAMES = ("complex-identities", "splitting", "johnson", "convolution",
               "defect-bound", "pairing", "ses", "counterexample")

_BIDEGREES = ((0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1))
_MODULES = (L1, L1_ZERO, SCALAR)


@dataclass
class VerifyOptions:
    """Shared audit configuration for the CLI suites."""
    seed: int = 0
    count: int | None = None
    r_list: tuple = (1.0, 2.0)
    budget: int = 4000
    sample_size: int = 700
    identity_tol: float = IDENTITY_TOL
    exact_tol: float = EXACT_TOL

    def resolved_count(self, default: int) -> int:
        return default if self.count is None else self.count


def pick_bidegree(i: int):
    return _BIDEGREES[i % len(_BIDEGREES)]


def pick_module(i: int) -> str:
    return _MODULES[i % len(_MODULES)]


def identity_checks_for(phi: Cochain, r_list, budget: int, sample_size: int,
                        seed: int, tol: float = IDENTITY_TOL):
    """The five complex identities, audited where they apply to phi."""
    checks = []
    dd_left = diff_D(diff_D(phi))
    dd_right = diff_d(diff_d(phi))
    anti = cochain_add(diff_D(diff_d(phi)), diff_d(diff_D(phi)))
    hom = None
    row = None
    if phi.q >= 0:
        hom = cochain_add(diff_d(split_s(phi)), split_s(diff_d(phi)))
    else:
        row = split_s(diff_d(phi))
    for r in r_list:
        kw = dict(budget=budget, sample_size=sample_size, seed=seed, tol=tol)
        checks.append(audit_zero("DD=0", dd_left, r, **kw))
        checks.append(audit_zero("dd=0", dd_right, r, **kw))
        checks.append(audit_zero("Dd+dD=0", anti, r, **kw))
        if hom is not None:
            checks.append(audit_equal("ds+sd=id", hom, phi, r, **kw))
        if row is not None:
            checks.append(audit_equal("sd=id(row-1)", row, phi, r, **kw))
    return checks


def _suite(name: str, checks: list) -> dict:
    return {"suite": name, "passed": all(c.get("ok") for c in checks),
            "checks": checks}


def run_complex_identities(space: FiniteMetricSpace,
                           opts: VerifyOptions) -> dict:
    count = opts.resolved_count(200)
    checks = []
    for i in range(count):
        p, q = pick_bidegree(i)
        phi = random_cochain(space, p, q, pick_module(i),
                             derive_seed(opts.seed, "ci", i))
        for rep in identity_checks_for(phi, opts.r_list, opts.budget,
                                       opts.sample_size, opts.seed,
                                       opts.identity_tol):
            checks.append(rep.to_json() | {"instance": i})
        for r in opts.r_list:
            checks.append(diff_D_norm_audit(
                phi, r, budget=opts.budget, sample_size=opts.sample_size,
                seed=opts.seed).to_json() | {"instance": i})
            checks.append(diff_d_norm_audit(
                phi, r, budget=opts.budget, sample_size=opts.sample_size,
                seed=opts.seed).to_json() | {"instance": i})
    return _suite("complex-identities", checks)


def run_splitting(space: FiniteMetricSpace, opts: VerifyOptions) -> dict:
    count = opts.resolved_count(60)
    checks = []
    for i in range(count):
        q = (-1, 0, 1)[i % 3]
        p = (0, 1)[i % 2]
        phi = random_cochain(space, p, q, pick_module(i),
                             derive_seed(opts.seed, "split", i))
        kw = dict(budget=opts.budget, sample_size=opts.sample_size,
                  seed=opts.seed, tol=opts.identity_tol)
        for r in opts.r_list:
            if q >= 0:
                hom = cochain_add(diff_d(split_s(phi)), split_s(diff_d(phi)))
                checks.append(audit_equal("ds+sd=id", hom, phi, r,
                                          **kw).to_json() | {"instance": i})
                checks.append(split_s_norm_audit(
                    phi, r, budget=opts.budget,
                    sample_size=opts.sample_size,
                    seed=opts.seed).to_json() | {"instance": i})
            else:
                checks.append(audit_equal(
                    "sd=id(row-1)", split_s(diff_d(phi)), phi, r,
                    **kw).to_json() | {"instance": i})
    return _suite("splitting", checks)


def run_johnson(space: FiniteMetricSpace, opts: VerifyOptions) -> dict:
    j01, j10, hom = johnson_cocycles(space, audit=False)
    kw = dict(budget=opts.budget, sample_size=opts.sample_size,
              seed=opts.seed, tol=opts.exact_tol)
    checks = []
    for r in opts.r_list:
        checks.append(audit_zero("D(j01)=0", diff_D(j01), r, **kw).to_json())
        checks.append(audit_zero("d(j01)=0", diff_d(j01), r, **kw).to_json())
        checks.append(audit_equal("D(hom)=-j10", diff_D(hom),
                                  cochain_scale(j10, -1.0), r, **kw).to_json())
        checks.append(audit_equal("d(hom)=j01", diff_d(hom), j01, r,
                                  **kw).to_json())
        rep = seminorm(j01, r, budget=opts.budget,
                       sample_size=opts.sample_size, seed=opts.seed)
        checks.append(rep.to_json() | {
            "check": "seminorm(j01)=2",
            "ok": abs(rep.value - 2.0) <= opts.exact_tol})
    return _suite("johnson", checks)


def run_convolution(space: FiniteMetricSpace, opts: VerifyOptions) -> dict:
    count = opts.resolved_count(40)
    checks = []
    delta = dirac_family(space).as_cochain()
    kw = dict(budget=opts.budget, sample_size=opts.sample_size,
              seed=opts.seed)
    for i in range(count):
        q = (-1, 0, 1)[i % 3]
        module = (L1, L1_ZERO, SCALAR)[(i // 3) % 3]
        theta = random_cochain(space, 0, q, module,
                               derive_seed(opts.seed, "conv-t", i))
        f = random_cochain(space, (0, 1)[i % 2], -1, L1,
                           derive_seed(opts.seed, "conv-f", i))
        checks.append(audit_equal(
            "delta*theta=theta", convolve(delta, theta), theta, opts.r_list[0],
            tol=opts.exact_tol, **kw).to_json() | {"instance": i})
        conv = convolve(f, theta)
        checks.append(audit_equal(
            "D(f*theta)=(Df)*theta", diff_D(conv),
            convolve(diff_D(f), theta), opts.r_list[0],
            tol=opts.identity_tol, **kw).to_json() | {"instance": i})
        d_right = convolve(f, diff_d(theta))
        if f.p % 2 == 1:
            d_right = cochain_scale(d_right, -1.0)
        checks.append(audit_equal(
            "d(f*theta)=(-1)^p f*(d theta)", diff_d(conv), d_right,
            opts.r_list[0],
            tol=opts.identity_tol, **kw).to_json() | {"instance": i})
        for r in opts.r_list:
            checks.append(conv_norm_audit(f, theta, r, **kw).to_json()
                          | {"instance": i})
        prob = random_prob_family(space, 1.0 + (i % 2),
                                  derive_seed(opts.seed, "conv-p", i))
        xind = random_x_independent_cochain(space, q, module,
                                            derive_seed(opts.seed, "conv-x", i))
        checks.append(audit_equal(
            "prob*xindep=xindep", convolve(prob.as_cochain(), xind), xind,
            opts.r_list[0], tol=opts.exact_tol, **kw).to_json()
            | {"instance": i})
    return _suite("convolution", checks)


def run_defect_bound(space: FiniteMetricSpace, opts: VerifyOptions) -> dict:
    count = opts.resolved_count(30)
    checks = []
    for i in range(count):
        s = 1.0 + (i % 2)
        kind = i % 3
        if kind == 0:
            fam = ball_average(space, s)
        elif kind == 1:
            fam = random_prob_family(space, s,
                                     derive_seed(opts.seed, "def-f", i))
        else:
            fam = dirac_family(space)
        phi = random_cochain(space, 0, (-1, 0, 1)[i % 3],
                             (L1, L1_ZERO)[i % 2],
                             derive_seed(opts.seed, "def-t", i))
        try:
            _, rep = homotopy_defect(fam, phi, budget=opts.budget,
                                     sample_size=opts.sample_size,
                                     seed=opts.seed)
        except AssertionError as exc:
            checks.append({"check": "homotopy_defect", "instance": i,
                           "ok": False, "error": str(exc)})
            continue
        checks.append(rep.to_json() | {
            "instance": i,
            "ok": rep.ok and rep.telescope_gap <= opts.exact_tol})
    return _suite("defect-bound", checks)


def run_pairing(space: FiniteMetricSpace, opts: VerifyOptions) -> dict:
    count = opts.resolved_count(20)
    checks = []
    for i in range(count):
        field = random_pair_field(space, 1.0 + (i % 2),
                                  derive_seed(opts.seed, "pair-f", i),
                                  lift_style=i % 2 == 1)
        theta = random_cochain(space, 0, (-1, 0, 1)[i % 3],
                               (L1, L1_ZERO, SCALAR)[i % 3],
                               derive_seed(opts.seed, "pair-t", i))
        rep = tf_identity(field, theta, budget=opts.budget,
                          sample_size=opts.sample_size, seed=opts.seed)
        checks.append(rep.to_json() | {"instance": i})
    rng_points = space.n
    for i in range(opts.resolved_count(20)):
        h = random_zero_sum_vector(space, derive_seed(opts.seed, "lift", i))
        base = derive_seed(opts.seed, "lift-base", i) % rng_points
        lifted = lift_boundary(h, base)
        round_trip = entry_gap(boundary_pairs(lifted), h)
        norm_ok = lifted.norm <= h.norm + opts.exact_tol
        supp_ok = all(z0 == base and z1 in h.support
                      for z0, z1 in lifted.support)
        bd = boundary_pairs(lifted)
        contract = bd.norm <= 2.0 * lifted.norm + opts.exact_tol
        checks.append({"check": "lift_round_trip", "instance": i,
                       "max_violation": round_trip,
                       "norm_ok": norm_ok, "support_ok": supp_ok,
                       "boundary_contraction_ok": contract,
                       "ok": (round_trip <= opts.exact_tol and norm_ok
                              and supp_ok and contract)})
    return _suite("pairing", checks)


def run_ses(space: FiniteMetricSpace, opts: VerifyOptions) -> dict:
    checks = []
    for i in range(opts.resolved_count(25)):
        v = random_zero_sum_vector(space, derive_seed(opts.seed, "ses-v", i))
        drift = abs(pi_sum(include_in_l1(v)))
        checks.append({"check": "pi.iota=0", "instance": i,
                       "max_violation": drift,
                       "ok": drift <= opts.exact_tol})
        lam = 0.5 + i
        point = derive_seed(opts.seed, "ses-p", i) % space.n
        got = pi_sum(lift_scalar(lam, point))
        checks.append({"check": "pi.lift_scalar=id", "instance": i,
                       "max_violation": abs(got - lam),
                       "ok": abs(got - lam) <= opts.exact_tol})
    for s in (1.0, 2.0):
        phi = random_unit_sum_cochain(space, s,
                                      derive_seed(opts.seed, "ses-fam", s))
        fam = normalize_to_prob(phi)
        phi_vecs = [phi((x,), ()) for x in range(space.n)]
        supp_ok = all(fam.vectors[x].support == phi_vecs[x].support
                      for x in range(space.n))
        for r in opts.r_list:
            pairs = pairs_within(space, r)
            nu_phi = max((l1_distance(phi_vecs[i], phi_vecs[j])
                          for i, j in pairs), default=0.0)
            nu_f = max((l1_distance(fam.vectors[i], fam.vectors[j])
                        for i, j in pairs), default=0.0)
            checks.append({
                "check": "normalize_round_trip", "S": s, "R": r,
                "nu_f": nu_f, "nu_phi": nu_phi, "supports_unchanged": supp_ok,
                "ok": supp_ok and nu_f <= 2.0 * nu_phi + opts.exact_tol})
    return _suite("ses", checks)


def run_counterexample(space: FiniteMetricSpace, opts: VerifyOptions) -> dict:
    rep = counterexample_s_not_invariant(space, budget=opts.budget,
                                         seed=opts.seed)
    witness = rep["witness"]
    check = dict(rep)
    check["check"] = "s_breaks_invariance"
    check["witness"] = (None if witness is None
                        else [list(witness[0]), list(witness[1])])
    check["ok"] = rep["passed"]
    return _suite("counterexample", [check])


_RUNNERS = {
    "complex-identities": run_complex_identities,
    "splitting": run_splitting,
    "johnson": run_johnson,
    "convolution": run_convolution,
    "defect-bound": run_defect_bound,
    "pairing": run_pairing,
    "ses": run_ses,
    "counterexample": run_counterexample,
}


def run_suite(name: str, space: FiniteMetricSpace,
              opts: VerifyOptions | None = None) -> dict:
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from "
                         f"{', '.join(SUITE_NAMES)}")
    return _RUNNERS[name](space, opts or VerifyOptions())


def run_suites(names, space: FiniteMetricSpace,
               opts: VerifyOptions | None = None) -> list[dict]:
    return [run_suite(name, space, opts) for name in names]
