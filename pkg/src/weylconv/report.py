"""Run configuration, the check registry, and report emission.

``run_verify`` executes every applicable check of the static registry at the
configured parameters and writes a JSON report; a nonzero exit status is
reserved for failing assertion-grade checks (report-grade checks never fail
a build).  Identical configurations (seed included) reproduce identical
numbers: the generator is consumed sequentially in registry order.
"""

from __future__ import annotations

import csv
import datetime
import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from . import backend, checks, convolution, haar, quadrature, sampling
from .chamber import HypergroupElement, multiplicity_from, rho
from .special import c_function

SUITES = ("verify", "scan", "walk", "tables")

DEFAULT_TOLERANCES = {
    "quadrature_mass": 1e-12,
    "rank1_product_formula": 1e-8,
    "mc_z": 3.0,
    "support_violations": 0.0,
    "positivity_floor": -1e-12,
    "involution": 1e-10,
    "kappa_exact": 1e-12,
    "c_at_rho": 1e-12,
    "haar_conjugation": 1e-6,
    "branch_jump": 0.1,
    "signed_tv": 1e-12,
    "torus_mod": 1e-8,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    q: int = 1
    p: float = 3.0
    l: float = 0.5
    lam: tuple[complex, ...] = (0.5,)
    n_samples: int = 100_000
    seed: int = 42
    suite: str = "verify"
    tolerances: dict = field(default_factory=dict)
    output_path: str = "weylconv_report.json"

    def validate(self) -> "RunConfig":
        if self.q < 1 or int(self.q) != self.q:
            raise ConfigError("q: must be a positive integer")
        if not np.isfinite(self.p) or self.p < 2 * self.q - 1:
            raise ConfigError(f"p: must satisfy p >= 2q-1 = {2 * self.q - 1}")
        if not np.isfinite(self.l):
            raise ConfigError("l: must be finite")
        if self.n_samples < 1:
            raise ConfigError("n_samples: must be >= 1")
        if self.seed < 0 or self.seed > 2**64 - 1:
            raise ConfigError("seed: must fit in 64 unsigned bits")
        if self.suite not in SUITES:
            raise ConfigError(f"suite: must be one of {SUITES}")
        for name, tol in self.tolerances.items():
            if name not in DEFAULT_TOLERANCES:
                raise ConfigError(f"tolerances.{name}: unknown tolerance name")
            if name not in ("positivity_floor", "support_violations") and tol <= 0:
                raise ConfigError(f"tolerances.{name}: must be positive")
        return self

    def tol(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def as_dict(self) -> dict:
        d = asdict(self)
        d["lam"] = [str(x) for x in self.lam]
        d["tolerances"] = dict(self.tolerances)
        return d


def config_from_dict(data: dict) -> RunConfig:
    known = {f for f in RunConfig.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown config field")
    if "lam" in data:
        data = dict(data)
        data["lam"] = tuple(complex(str(x).replace(" ", "")) for x in data["lam"])
    cfg = RunConfig(**data)
    return cfg.validate()


def load_config(path: str) -> RunConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# check registry


@dataclass
class CheckOutcome:
    check: str
    grade: str
    value: float
    tol: float
    stderr: float | None
    passed: bool
    note: str = ""

    def as_dict(self) -> dict:
        return {"check": self.check, "grade": self.grade, "value": self.value,
                "tol": self.tol, "stderr": self.stderr, "pass": self.passed,
                "note": self.note}


def _chk_quadrature_mass(cfg, rng):
    conv = quadrature.convolve_quadrature_rank1((1.0, 0.3), (0.7, -0.2), cfg.p, 200, 200)
    value = abs(conv.integrate(lambda d, th: np.ones_like(d)) - 1.0)
    tol = cfg.tol("quadrature_mass")
    return CheckOutcome("quadrature_mass", "assert", value, tol, None, value <= tol)


def _chk_rank1_product(cfg, rng):
    worst = 0.0
    for lam in cfg.lam:
        for s, t in ((0.5, 1.5), (1.5, 1.5), (0.3, 2.0)):
            worst = max(worst, quadrature.product_formula_residual_rank1(
                lam, cfg.l, cfg.p, s, t, 0.4, -1.1, 200, 200))
    tol = cfg.tol("rank1_product_formula")
    return CheckOutcome("rank1_product_formula", "assert", worst, tol, None, worst <= tol)


def _chk_constant_character(cfg, rng):
    s = checks.random_chamber(cfg.q, rng, 1.5)
    t = checks.random_chamber(cfg.q, rng, 1.5)
    est, se = checks.check_constant_character((s, 0.0), (t, 0.0), cfg.p, cfg.l,
                                              cfg.n_samples, rng)
    target = checks.constant_character_target(s, t, cfg.l)
    z = abs(est - target) / se if se > 0 else (0.0 if est == target else math.inf)
    tol = cfg.tol("mc_z")
    return CheckOutcome("constant_character", "assert", z, tol, se, z <= tol)


def _chk_support_bound(cfg, rng):
    viol = checks.support_bound_violations(cfg.q, cfg.n_samples, rng)
    tol = cfg.tol("support_violations")
    return CheckOutcome("support_bound", "assert", float(viol), tol, None, viol <= tol)


def _chk_positivity(cfg, rng):
    rows = checks.scan_positivity(cfg.p, cfg.q, [cfg.l], cfg.n_samples, rng)
    value = rows[0]["min_weight"]
    floor = cfg.tol("positivity_floor")
    guaranteed = abs(cfg.l) <= 1.0 / cfg.q
    grade = "assert" if guaranteed else "report"
    passed = value >= floor if guaranteed else True
    note = "" if guaranteed else "no positivity guarantee for |l| > 1/q"
    return CheckOutcome("positivity_min", grade, value, floor, None, passed, note)


def _chk_involution(cfg, rng):
    worst = 0.0
    for _ in range(10):
        t = checks.random_chamber(cfg.q, rng, 2.5)
        theta = rng.uniform(-math.pi, math.pi)
        direct, _ = checks.check_involution(t, theta, cfg.p, 1000, rng)
        worst = max(worst, direct)
    tol = cfg.tol("involution")
    return CheckOutcome("involution_identity", "assert", worst, tol, None, worst <= tol)


def _chk_commutativity(cfg, rng):
    worst = 0.0
    for _ in range(2):
        s = (checks.random_chamber(cfg.q, rng, 2.0), rng.uniform(-1, 1))
        t = (checks.random_chamber(cfg.q, rng, 2.0), rng.uniform(-1, 1))
        worst = max(worst, checks.check_commutativity(s, t, cfg.p, cfg.n_samples, rng))
    tol = cfg.tol("mc_z")
    return CheckOutcome("commutativity", "assert", worst, tol, None, worst <= tol)


def _chk_associativity(cfg, rng):
    worst = 0.0
    for _ in range(2):
        r = (checks.random_chamber(cfg.q, rng, 1.5), rng.uniform(-1, 1))
        s = (checks.random_chamber(cfg.q, rng, 1.5), rng.uniform(-1, 1))
        t = (checks.random_chamber(cfg.q, rng, 1.5), rng.uniform(-1, 1))
        worst = max(worst, checks.check_associativity(r, s, t, cfg.p, cfg.n_samples, rng))
    tol = cfg.tol("mc_z")
    return CheckOutcome("associativity", "assert", worst, tol, None, worst <= tol)


def _chk_kappa_exact(cfg, rng):
    value = max(abs(sampling.kappa(3.0, 1) - math.pi / 2.0),
                abs(sampling.kappa(2.0, 1) - math.pi))
    tol = cfg.tol("kappa_exact")
    return CheckOutcome("kappa_exact", "assert", value, tol, None, value <= tol)


def _chk_kappa_mc(cfg, rng):
    est, se = sampling.kappa_mc(cfg.p, cfg.q, cfg.n_samples, rng)
    z = abs(est - sampling.kappa(cfg.p, cfg.q)) / se
    tol = cfg.tol("mc_z")
    return CheckOutcome("kappa_mc", "assert", z, tol, se, z <= tol)


def _chk_c_at_rho(cfg, rng):
    worst = 0.0
    for _ in range(20):
        q = int(rng.integers(1, 4))
        p = 2 * q - 1 + float(rng.uniform(0.1, 4.0))
        l = float(rng.uniform(-1.5, 1.5))
        k = multiplicity_from(p, q, l)
        worst = max(worst, abs(c_function(rho(k), k) - 1.0))
    tol = cfg.tol("c_at_rho")
    return CheckOutcome("c_function_at_rho", "assert", worst, tol, None, worst <= tol)


def _chk_c_growth(cfg, rng):
    vals = checks.c_growth_probe(cfg.q)
    seq = [v["inv_c_abs"] for v in vals]
    ratio = seq[-1] / seq[0] if seq[0] != 0 else math.inf
    monotone = all(a <= b * 1.05 for a, b in zip(seq, seq[1:]))
    note = f"inverse-c along p=l grid: {['%.4g' % v for v in seq]}"
    return CheckOutcome("c_growth_probe", "report", ratio, math.inf, None, True, note)


def _chk_haar_conjugation(cfg, rng):
    f = haar.bump(0.8, 0.6)
    g = haar.bump(1.2, 0.7)
    worst = 0.0
    for convo in ("hypergroup", "signed"):
        worst = max(worst, haar.check_haar_rank1(cfg.p, cfg.l, f, g, x=0.7, T=2.0,
                                                 nodes=400, convolution=convo))
    tol = cfg.tol("haar_conjugation")
    return CheckOutcome("haar_conjugation", "assert", worst, tol, None, worst <= tol)


def _chk_branch_continuity(cfg, rng):
    segments = max(20, min(100, cfg.n_samples // 2000))
    value = checks.branch_continuity_probe(cfg.q, segments, 400, rng)
    tol = cfg.tol("branch_jump")
    return CheckOutcome("branch_continuity", "assert", value, tol, None, value < tol)


def _chk_signed_tv(cfg, rng):
    s = checks.random_chamber(cfg.q, rng, 2.0)
    t = checks.random_chamber(cfg.q, rng, 2.0)
    m = convolution.convolve_signed((s, 0.0), (t, 0.0), cfg.p, cfg.l,
                                    min(cfg.n_samples, 100_000), rng)
    value = abs(m.total_variation - 1.0)
    tol = cfg.tol("signed_tv")
    return CheckOutcome("signed_total_variation", "assert", value, tol, None, value <= tol)


def _chk_torus_mod(cfg, rng):
    s = (checks.random_chamber(cfg.q, rng, 2.0), 0.7)
    t = (checks.random_chamber(cfg.q, rng, 2.0), 2.9)
    value = checks.torus_projection_deviation(s, t, cfg.p, min(cfg.n_samples, 20_000), rng)
    tol = cfg.tol("torus_mod")
    return CheckOutcome("torus_projection", "assert", value, tol, None, value <= tol)


def _chk_degenerate_continuity(cfg, rng):
    z = checks.degenerate_continuity(cfg.q, cfg.n_samples, rng)
    tol = cfg.tol("mc_z")
    return CheckOutcome("degenerate_continuity", "assert", z, tol, None, z <= tol)


def _rank1_only(cfg):
    return cfg.q == 1


CHECK_REGISTRY = (
    ("quadrature_mass", _rank1_only, _chk_quadrature_mass),
    ("rank1_product_formula", _rank1_only, _chk_rank1_product),
    ("constant_character", lambda cfg: True, _chk_constant_character),
    ("support_bound", lambda cfg: True, _chk_support_bound),
    ("positivity_min", lambda cfg: True, _chk_positivity),
    ("involution_identity", lambda cfg: True, _chk_involution),
    ("commutativity", lambda cfg: True, _chk_commutativity),
    ("associativity", lambda cfg: True, _chk_associativity),
    ("kappa_exact", lambda cfg: True, _chk_kappa_exact),
    ("kappa_mc", lambda cfg: cfg.p > 2 * cfg.q - 1, _chk_kappa_mc),
    ("c_function_at_rho", lambda cfg: True, _chk_c_at_rho),
    ("c_growth_probe", lambda cfg: True, _chk_c_growth),
    ("haar_conjugation", lambda cfg: cfg.q == 1 and abs(cfg.l) <= 1.0, _chk_haar_conjugation),
    ("branch_continuity", lambda cfg: True, _chk_branch_continuity),
    ("signed_total_variation", lambda cfg: True, _chk_signed_tv),
    ("torus_projection", lambda cfg: True, _chk_torus_mod),
    ("degenerate_continuity", lambda cfg: True, _chk_degenerate_continuity),
)


def run_verify(cfg: RunConfig, write: bool = True) -> dict:
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    outcomes = []
    for name, applicable, fn in CHECK_REGISTRY:
        if not applicable(cfg):
            continue
        outcomes.append(fn(cfg, rng))
    all_pass = all(o.passed for o in outcomes if o.grade == "assert")
    report = {
        "schema": "weylconv-report-v1",
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "backend": backend.active_name(cfg.q),
        "config": cfg.as_dict(),
        "checks": [o.as_dict() for o in outcomes],
        "all_pass": all_pass,
    }
    if write and cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    return report


# ---------------------------------------------------------------------------
# tables / scan / walk suites


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def run_tables(cfg: RunConfig, out_dir: str | None = None) -> list[str]:
    """Emit kappa, c-function, invariant-density, and positivity tables."""
    cfg.validate()
    out_dir = out_dir or (cfg.output_path if os.path.isdir(cfg.output_path) else ".")
    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng(cfg.seed)
    written = []

    rows = []
    for q in (1, 2, 3):
        for p in (2.0, 3.0, 2 * q + 0.0, 2 * q + 0.5, 2 * q + 1.5):
            if p > 2 * q - 1:
                rows.append([q, p, sampling.kappa(p, q)])
    path = os.path.join(out_dir, "kappa.csv")
    _write_csv(path, ["q", "p", "kappa"], rows)
    written.append(path)

    k = multiplicity_from(cfg.p, cfg.q, cfg.l)
    rk = np.real(rho(k))
    rows = []
    for m in (0.25, 0.5, 1.0, 1.5, 2.0):
        lam = m * rk
        c = c_function(lam, k)
        rows.append([cfg.q, cfg.p, cfg.l, m, " ".join(f"{x:g}" for x in lam),
                     c.real, c.imag])
    path = os.path.join(out_dir, "c_function.csv")
    _write_csv(path, ["q", "p", "l", "m", "lambda", "c_re", "c_im"], rows)
    written.append(path)

    base = np.linspace(2.0, 1.0, cfg.q)
    tied = np.ones(cfg.q)
    zeroed = np.concatenate([base[:-1], [0.0]]) if cfg.q > 1 else np.zeros(1)
    rows = []
    for label, t in (("generic", base), ("tied", tied), ("wall", zeroed)):
        for variant, l in (("full", None), ("torus", None), ("chamber", cfg.l)):
            rows.append([cfg.q, cfg.p, variant, "" if l is None else l, label,
                         " ".join(f"{x:g}" for x in t),
                         haar.haar_density(cfg.p, cfg.q, variant, t, l)])
    path = os.path.join(out_dir, "haar_density.csv")
    _write_csv(path, ["q", "p", "variant", "l", "label", "t", "density"], rows)
    written.append(path)

    grid = np.round(np.linspace(-2.0 / cfg.q, 2.0 / cfg.q, 9), 12)
    scan = checks.scan_positivity(cfg.p, cfg.q, grid, min(cfg.n_samples, 200_000), rng)
    path = os.path.join(out_dir, "positivity_scan.csv")
    _write_csv(path, ["l", "min_weight", "frac_negative"],
               [[r["l"], r["min_weight"], r["frac_negative"]] for r in scan])
    written.append(path)
    return written


def run_scan(cfg: RunConfig, l_grid=None, out_path: str | None = None) -> dict:
    """Positivity scan over an l grid; exploratory, never assertion-grade."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    if l_grid is None:
        l_grid = np.round(np.linspace(-2.0, 2.0, 17), 12)
    rows = checks.scan_positivity(cfg.p, cfg.q, l_grid, cfg.n_samples, rng)
    guaranteed = [r for r in rows if abs(r["l"]) <= 1.0 / cfg.q]
    result = {
        "schema": "weylconv-scan-v1",
        "config": cfg.as_dict(),
        "rows": rows,
        "guaranteed_region_min": min((r["min_weight"] for r in guaranteed), default=None),
    }
    if out_path:
        with open(out_path, "w") as fh:
            json.dump(result, fh, indent=2, sort_keys=True)
    return result


def run_walk(cfg: RunConfig, steps: int = 200, out_path: str | None = None) -> dict:
    """Random walk driven by the convolution; reports the support-bound audit."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    start = HypergroupElement.identity(cfg.q)
    step = HypergroupElement.of(checks.random_chamber(cfg.q, rng, 1.0), 0.3)
    traj = convolution.random_walk(start, cfg.p, steps, step, rng)
    tops = np.array([x.t.top for x in traj])
    bound = start.t.top + np.arange(steps + 1) * step.t.top
    violations = int(np.sum(tops > bound + 1e-9))
    result = {
        "schema": "weylconv-walk-v1",
        "config": cfg.as_dict(),
        "steps": steps,
        "final_top": float(tops[-1]),
        "final_theta": float(traj[-1].theta),
        "support_violations": violations,
        "pass": violations == 0,
    }
    if out_path:
        with open(out_path, "w") as fh:
            json.dump(result, fh, indent=2, sort_keys=True)
    return result
