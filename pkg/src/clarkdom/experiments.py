"""Scenario-driven identity checks with deterministic CSV/JSON reports.

A scenario names an inner function (or just a domain, for kernel-only
checks), a list of checks and their resolutions. Every check yields report
rows ``(check, params, lhs, rhs, residual, tolerance, pass)``; failures are
recorded and the run continues.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from . import clark, dominant, model_space, probes
from .errors import ConfigError
from .geometry import ProductDomain, poisson_kernel, random_interior
from .inner import InnerFunction, inner_from_dict
from .quadrature import MONTE_CARLO, TENSOR, circle_nodes, integrate_boundary, lebesgue_quadrature

SCHEMA = "clarkdom-report/1"
CSV_COLUMNS = ("scenario", "check", "params", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
               "residual", "tolerance", "pass")
ROUNDOFF_FLOOR = 1e-13

DEFAULT_RESOLUTIONS = {
    "boundary": 2048,     # circle rule for boundary integrals on the disk
    "torus": 256,         # per-dimension tensor rule for boundary integrals on polydisks
    "alpha": 256,
    "slice": 512,
    "arc": 1024,
    "grid": [256, 512, 1024],
    "fourier": 1024,
    "trig": 32,
    "monte_carlo": 1_000_000,
}

# (atomic / one-variable, sliced / multivariable)
DEFAULT_TOLERANCES = {
    "poisson": (1e-10, 1e-10),
    "clark_certify": (1e-10, 1e-6),
    "support": (1e-8, 1e-8),
    "disintegration": (1e-8, 1e-6),
    "double_cauchy": (1e-12, 1e-6),
    "clark_norm": (1e-10, 1e-6),
    "composition": (1e-8, 1e-8),
    "measure": (1e-12, 1e-10),
    "dominance": (1e-8, 1e-4),
    "radial": (1e-6, 1e-6),
    "small_space": (1e-10, 1e-2),
    "slices": (1e-8, 1e-8),
}


@dataclass
class Row:
    check: str
    params: str
    lhs: complex
    rhs: complex
    residual: float
    tolerance: float
    passed: bool

    def as_list(self, scenario: str) -> list[str]:
        lhs, rhs = complex(self.lhs), complex(self.rhs)
        return [scenario, self.check, self.params, repr(lhs.real), repr(lhs.imag), repr(rhs.real),
                repr(rhs.imag), repr(float(self.residual)), repr(float(self.tolerance)),
                "true" if self.passed else "false"]

    def as_dict(self, scenario: str) -> dict:
        return dict(zip(CSV_COLUMNS, self.as_list(scenario)))


def _row(check, params, lhs, rhs, residual, tol, passed=None) -> Row:
    residual = float(residual)
    if passed is None:
        passed = bool(np.isfinite(residual) and residual < tol)
    return Row(check, params, complex(lhs), complex(rhs), residual, float(tol), bool(passed))


def _fmt(**kw) -> str:
    parts = []
    for key, val in kw.items():
        if isinstance(val, complex):
            val = f"{val.real:.6g}{val.imag:+.6g}j"
        elif isinstance(val, float):
            val = f"{val:.6g}"
        parts.append(f"{key}={val}")
    return ";".join(parts)


# --------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    scenario: str
    inner: InnerFunction | None
    domain: ProductDomain
    checks: list[str]
    resolutions: dict = field(default_factory=lambda: dict(DEFAULT_RESOLUTIONS))
    alphas: list[complex] | None = None
    alpha_count: int = 16
    targets: list[dominant.ArcSet] = field(default_factory=list)
    nodes: dict = field(default_factory=dict)
    samples: int = 100
    tolerances: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    seed: int | None = None
    output_path: str = "reports"
    output_format: str = "csv"

    @property
    def multivariable(self) -> bool:
        return self.domain.k > 1 or not self.domain.is_polydisk

    def tolerance(self, check: str) -> float:
        if check in self.tolerances:
            return float(self.tolerances[check])
        one, many = DEFAULT_TOLERANCES[check]
        return many if self.multivariable else one

    def alpha_values(self, rng) -> list[complex]:
        if self.alphas is not None:
            return list(self.alphas)
        return list(np.exp(2j * np.pi * rng.random(self.alpha_count)))


def _complex_field(value, where):
    try:
        if isinstance(value, (list, tuple)):
            return complex(float(value[0]), float(value[1]))
        return complex(value)
    except (TypeError, ValueError, IndexError):
        raise ConfigError(f"expected a complex number as [re, im], got {value!r}", where) from None


def parse_config(data: dict) -> ExperimentConfig:
    """Validate a decoded scenario; errors name the offending field."""
    if not isinstance(data, dict):
        raise ConfigError("top level must be an object")
    scenario = data.get("scenario")
    if not isinstance(scenario, str) or not scenario:
        raise ConfigError("missing scenario name", "scenario")
    inner = None
    if data.get("inner") is not None:
        try:
            inner = inner_from_dict(data["inner"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc), "inner") from None
    if "domain" in data:
        try:
            domain = ProductDomain.from_dict(data["domain"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc), "domain") from None
        if inner is not None and inner.domain != domain:
            raise ConfigError("domain does not match the inner function", "domain")
    elif inner is not None:
        domain = inner.domain
    else:
        raise ConfigError("need an inner function or a domain", "inner")
    checks = data.get("checks")
    if not isinstance(checks, list) or not checks:
        raise ConfigError("check list must be a nonempty list", "checks")
    for i, name in enumerate(checks):
        if name not in CHECKS:
            raise ConfigError(f"unknown check {name!r}; known: {sorted(CHECKS)}", f"checks[{i}]")
        if name != "poisson" and inner is None:
            raise ConfigError(f"check {name!r} needs an inner function", f"checks[{i}]")
    res = dict(DEFAULT_RESOLUTIONS)
    for key, val in (data.get("resolutions") or {}).items():
        if key not in DEFAULT_RESOLUTIONS:
            raise ConfigError(f"unknown resolution {key!r}", f"resolutions.{key}")
        vals = val if isinstance(val, list) else [val]
        if not vals or not all(isinstance(v, int) and v >= 2 for v in vals):
            raise ConfigError("resolutions must be integers >= 2", f"resolutions.{key}")
        res[key] = val
    alphas, alpha_count = None, 16
    alpha_spec = data.get("alphas")
    if isinstance(alpha_spec, dict):
        alpha_count = int(alpha_spec.get("count", 16))
        if alpha_count < 1:
            raise ConfigError("alpha count must be positive", "alphas.count")
    elif isinstance(alpha_spec, list):
        alphas = [_complex_field(a, f"alphas[{i}]") for i, a in enumerate(alpha_spec)]
        for i, a in enumerate(alphas):
            if abs(abs(a) - 1) > 1e-12:
                raise ConfigError("alpha must be unimodular", f"alphas[{i}]")
    elif alpha_spec is not None:
        raise ConfigError("alphas must be a list or {count: n}", "alphas")
    targets = []
    for i, t in enumerate(data.get("targets") or []):
        try:
            arcs = dominant.ArcSet.from_dict(t)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc), f"targets[{i}]") from None
        if not 0 < arcs.total_measure < 1:
            raise ConfigError("target needs 0 < m(Q) < 1", f"targets[{i}]")
        targets.append(arcs)
    if any(c in ("measure", "dominance") for c in checks) and not targets:
        raise ConfigError("dominance and measure checks need targets", "targets")
    tolerances = data.get("tolerances") or {}
    for key in tolerances:
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {key!r}", f"tolerances.{key}")
    seed = data.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise ConfigError("seed must be an integer", "seed")
    if seed is None and ("poisson" in checks and not domain.is_polydisk):
        raise ConfigError("Monte Carlo quadrature requested without a seed", "seed")
    output = data.get("output") or {}
    fmt = output.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("format must be csv or json", "output.format")
    return ExperimentConfig(
        scenario=scenario, inner=inner, domain=domain, checks=list(checks), resolutions=res,
        alphas=alphas, alpha_count=alpha_count, targets=targets, nodes=dict(data.get("nodes") or {}),
        samples=int(data.get("samples", 100)), tolerances=dict(tolerances),
        options=dict(data.get("options") or {}), seed=seed,
        output_path=output.get("path", "reports"), output_format=fmt,
    )


def load_config(path) -> ExperimentConfig:
    """Read a scenario file, or a bundled scenario by name."""
    path = Path(path)
    if path.exists():
        text = path.read_text()
    else:
        bundled = resources.files("clarkdom") / "scenarios" / f"{path.stem}.json"
        if not bundled.is_file():
            raise ConfigError(f"no such config file or bundled scenario: {path}")
        text = bundled.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, line=exc.lineno) from None
    return parse_config(data)


def bundled_scenarios() -> dict[str, str]:
    out = {}
    for entry in sorted((resources.files("clarkdom") / "scenarios").iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".json"):
            data = json.loads(entry.read_text())
            out[data["scenario"]] = data.get("description", "")
    return out


# --------------------------------------------------------------------------
# checks


def _combo(cfg: ExperimentConfig, rng, count=None, radius=None, normalize=False):
    count = count or int(cfg.nodes.get("count", 3))
    radius = radius or float(cfg.nodes.get("radius", 0.9))
    f = model_space.random_kernel_combination(cfg.inner, count, rng, radius)
    if normalize:
        f = model_space.KernelCombination(cfg.inner, f.nodes, f.coefficients / math.sqrt(f.norm_squared()))
    return f


def _boundary_rule(cfg: ExperimentConfig):
    if cfg.domain.k == 1:
        return lebesgue_quadrature(cfg.domain, cfg.resolutions["boundary"])
    return lebesgue_quadrature(cfg.domain, cfg.resolutions["torus"])


def _measure(cfg, alpha):
    return clark.clark_measure(cfg.inner, alpha, cfg.resolutions["slice"])


def check_poisson(cfg: ExperimentConfig, rng) -> list[Row]:
    """Poisson normalization: int P(z, .) dSigma = 1 (tensor rule on polydisks, Monte Carlo on balls)."""
    dom = cfg.domain
    count = int(cfg.options.get("poisson_points", 10))
    zs = random_interior(dom, count, rng, float(cfg.options.get("poisson_radius", 0.8)))
    rows = []
    if dom.is_polydisk:
        n = cfg.resolutions["torus"] if dom.k > 1 else cfg.resolutions["boundary"]
        rule = lebesgue_quadrature(dom, n, TENSOR)
        tol = cfg.tolerance("poisson")
        for i, z in enumerate(zs):
            val = integrate_boundary(rule, lambda p: poisson_kernel(dom, z, p))
            rows.append(_row("poisson", _fmt(i=i, rule="tensor", N=n), val, 1.0, abs(val - 1), tol))
    else:
        n = cfg.resolutions["monte_carlo"]
        rule = lebesgue_quadrature(dom, n, MONTE_CARLO, seed=int(rng.integers(2**32)))
        for i, z in enumerate(zs):
            val, se = integrate_boundary(rule, lambda p: poisson_kernel(dom, z, p), with_stderr=True)
            rows.append(_row("poisson", _fmt(i=i, rule="monte-carlo", N=n), val, 1.0, abs(val - 1), 3 * se))
    return rows


def check_clark_certify(cfg, rng) -> list[Row]:
    """Every sigma_alpha reproduces (1-|I|^2)/|alpha-I|^2 and sits on the level set I = alpha."""
    rows = []
    tol = cfg.tolerance("clark_certify")
    tol_support = cfg.tolerance("support")
    for alpha in cfg.alpha_values(rng):
        mu = _measure(cfg, alpha)
        z = random_interior(cfg.domain, cfg.samples, rng)
        got = mu.poisson_integral(z)
        want = clark.poisson_target(cfg.inner(z), alpha)
        rel = np.abs(got - want) / np.abs(want)
        worst = int(np.argmax(rel))
        rows.append(_row("clark_certify", _fmt(alpha=complex(alpha), test="poisson", points=cfg.samples),
                         got[worst], want[worst], rel[worst], tol))
        sup = mu.support_residual()
        rows.append(_row("clark_certify", _fmt(alpha=complex(alpha), test="support", atoms=len(mu.weights)),
                         sup, 0.0, sup, tol_support))
    return rows


def _trig_poly(k: int, degree: int, rng):
    """Random real-valued trigonometric polynomial of total degree <= ``degree``; returns (g, mean)."""
    ranges = np.meshgrid(*([np.arange(-degree, degree + 1)] * k), indexing="ij")
    ms = np.stack([r.ravel() for r in ranges], axis=-1)
    ms = ms[np.abs(ms).sum(axis=1) <= degree]
    coef = rng.standard_normal(len(ms)) + 1j * rng.standard_normal(len(ms))

    def g(p):
        ang = np.angle(p)
        return np.exp(1j * ang @ ms.T) @ coef

    zero = np.all(ms == 0, axis=1)
    return g, complex(coef[zero][0])


def check_disintegration(cfg, rng) -> list[Row]:
    """int_T int g dsigma_alpha dm(alpha) = int g dSigma for trigonometric polynomials g."""
    tol = cfg.tolerance("disintegration")
    k = cfg.domain.k
    rule = lebesgue_quadrature(cfg.domain, cfg.resolutions["trig"])
    g, mean = _trig_poly(k, int(cfg.options.get("trig_degree", 8)), rng)
    cases = [("one", lambda p: np.ones(p.shape[0]), 1.0), ("trig", g, mean),
             ("re_zeta1", lambda p: p[:, 0].real, 0.0)]
    rows = []
    for name, func, exact in cases:
        lhs, rhs, res = clark.disintegration_check(cfg.inner, func, cfg.resolutions["alpha"], rule,
                                                   cfg.resolutions["slice"])
        scale = max(1.0, abs(exact))
        rows.append(_row("disintegration", _fmt(g=name, alpha_nodes=cfg.resolutions["alpha"]), lhs, rhs,
                         max(res, abs(rhs - exact)) / scale, tol))
    return rows


def check_double_cauchy(cfg, rng) -> list[Row]:
    """int C(z, .) C(., w) dsigma_alpha against its closed form, random (z, w, alpha)."""
    tol = cfg.tolerance("double_cauchy")
    rows = []
    for i in range(cfg.samples):
        z, w = random_interior(cfg.domain, 2, rng)
        alpha = complex(np.exp(2j * np.pi * rng.random()))
        lhs, rhs, res = clark.double_cauchy_identity(cfg.inner, alpha, z, w,
                                                     slice_resolution=cfg.resolutions["slice"])
        rows.append(_row("double_cauchy", _fmt(i=i, alpha=alpha), lhs, rhs, res, tol))
    return rows


def check_clark_norm(cfg, rng) -> list[Row]:
    """||f||^2 = int |f|^2 dsigma_alpha and (f, g) = int f conj(g) dsigma_alpha for kernel combinations."""
    tol = cfg.tolerance("clark_norm")
    rows = []
    for alpha in cfg.alpha_values(rng):
        mu = _measure(cfg, alpha)
        f, g = _combo(cfg, rng), _combo(cfg, rng)
        nf = f.norm_squared()
        got = model_space.clark_inner_product(f, f, mu)
        rows.append(_row("clark_norm", _fmt(alpha=complex(alpha), form="norm"), got, nf, abs(got - nf) / nf, tol))
        ip = model_space.h2_inner_product(f, g)
        got = model_space.clark_inner_product(f, g, mu)
        scale = math.sqrt(nf * g.norm_squared())
        rows.append(_row("clark_norm", _fmt(alpha=complex(alpha), form="inner"), got, ip, abs(got - ip) / scale, tol))
    return rows


def check_composition(cfg, rng) -> list[Row]:
    """int (phi o I) f conj(g) dSigma = (int phi dm) (f, g) for smooth phi."""
    tol = cfg.tolerance("composition")
    rule = _boundary_rule(cfg)
    phis = [("one", lambda l: np.ones_like(l)), ("re", lambda l: l.real), ("square", lambda l: l ** 2),
            ("smooth", lambda l: np.exp(l.real) * (2 + l.imag))]
    rows = []
    radius = float(cfg.options.get("composition_radius", 0.9 if cfg.domain.k == 1 else 0.7))
    f = _combo(cfg, rng, radius=radius)
    g = _combo(cfg, rng, radius=radius)
    for name, phi in phis:
        lhs, rhs, res = model_space.composition_identity(f, g, phi, rule, cfg.resolutions["alpha"])
        rows.append(_row("composition", _fmt(phi=name, N=rule.node_count[0]), lhs, rhs, res, tol))
    return rows


def check_measure(cfg, rng) -> list[Row]:
    """Sigma(I^-1(Q)) = m(Q) when I(0) = 0; otherwise 0 < Sigma(E) < 1."""
    tol = cfg.tolerance("measure")
    rows = []
    grid = max(np.atleast_1d(cfg.resolutions["grid"]))
    centered = abs(cfg.inner.at_origin()) < 1e-15
    for i, q in enumerate(cfg.targets):
        e = dominant.preimage(cfg.inner, q)
        s = dominant.preimage_measure(e, int(grid))
        if centered:
            rows.append(_row("measure", _fmt(target=i, mQ=q.total_measure, form="equal"), s, q.total_measure,
                             abs(s - q.total_measure), tol))
        else:
            rows.append(_row("measure", _fmt(target=i, mQ=q.total_measure, form="proper"), s, q.total_measure,
                             abs(s - q.total_measure), float("nan"), 0.0 < s < 1.0))
    return rows


def check_dominance(cfg, rng) -> list[Row]:
    """m(Q) ||f||^2 = int_{I^-1(Q)} |f|^2 dSigma, plus the dominance-constant bound 1/m(Q)."""
    tol = cfg.tolerance("dominance")
    trials = int(cfg.nodes.get("trials", 10))
    count = int(cfg.nodes.get("count", 3))
    arc = cfg.resolutions["arc"]
    grids = [int(n) for n in np.atleast_1d(cfg.resolutions["grid"])]
    rows = []
    for i, q in enumerate(cfg.targets):
        e = dominant.preimage(cfg.inner, q)
        combos = [_combo(cfg, rng, count) for _ in range(trials)]
        ratios = []
        for t, f in enumerate(combos):
            lhs, rhs, res = dominant.dominance_check(f, e, arc, grids[-1])
            ratios.append(lhs / q.total_measure / rhs)
            rows.append(_row("dominance", _fmt(target=i, mQ=q.total_measure, trial=t), lhs, rhs, res, tol))
        bound = 1.0 / q.total_measure
        worst = max(ratios)
        rows.append(_row("dominance", _fmt(target=i, mQ=q.total_measure, form="constant"), worst, bound,
                         abs(worst - bound) / bound, tol, worst <= bound * (1 + tol)))
        if not e.is_exact and len(grids) > 1:
            errs = []
            for n in grids:
                errs.append(max(dominant.dominance_check(f, e, arc, n)[2] for f in combos))
            if max(errs) < ROUNDOFF_FLOOR:
                order, ok = float("inf"), True
            else:
                order = dominant.observed_order(grids, errs)
                ok = order >= 1.0
            rows.append(_row("dominance", _fmt(target=i, form="order", grids="/".join(map(str, grids))),
                             order, 1.0, errs[-1], 1.0, ok))
    return rows


def _adversarial_alphas(cfg, rng) -> list[complex]:
    alphas = cfg.alpha_values(rng)
    a0 = cfg.inner.at_origin()
    base = np.angle(a0) if abs(a0) > 0 else 0.0
    if cfg.alphas is None and len(alphas) >= 2:
        # two of them hug the direction of I(0)
        alphas[0] = complex(np.exp(1j * (base + 1e-6)))
        alphas[1] = complex(np.exp(1j * (base - 1e-9)))
    return alphas


def check_radial(cfg, rng) -> list[Row]:
    """Radial limits of small-space functions at every Clark atom."""
    tol = cfg.tolerance("radial")
    max_atoms = int(cfg.options.get("radial_max_atoms", 32))
    radius = float(cfg.options.get("radial_radius", 0.5))
    # 20 steps leave 2^-20 |d f/dr| of bias, above 1e-6 once the radial derivative exceeds ~1
    steps = int(cfg.options.get("radial_steps", 30))
    rows = []
    for alpha in _adversarial_alphas(cfg, rng):
        f = _combo(cfg, rng, radius=radius, normalize=True)
        mu = _measure(cfg, alpha)
        for j, res in enumerate(probes.radial_probe(f, cfg.inner, alpha, probes.default_radii(steps), mu, max_atoms)):
            last = res.values[-1] if res.values.size else complex("nan")
            bval = res.boundary_value if res.boundary_value is not None else complex("nan")
            err = res.limit_error
            rows.append(_row("radial", _fmt(alpha=complex(alpha), atom=j, converged=res.converged), last, bval,
                             err, tol, res.converged and err < tol))
    return rows


def check_small_space(cfg, rng) -> list[Row]:
    """Fourier residual of I conj(f) off the H^2_0 frequencies: small in one variable, large on polydisks."""
    n = cfg.resolutions["fourier"]
    expect = cfg.options.get("small_space_expect", "large" if cfg.domain.k > 1 else "small")
    rows = []
    if "small_space_nodes" in cfg.options:
        nodes = np.array([[complex(*x) for x in w] for w in cfg.options["small_space_nodes"]])
        combos = [model_space.KernelCombination(cfg.inner, nodes, np.ones(len(nodes)))]
    else:
        combos = [_combo(cfg, rng) for _ in range(int(cfg.nodes.get("trials", 5)))]
    for t, f in enumerate(combos):
        res = model_space.small_space_residual(f, cfg.inner, n)
        if expect == "small":
            tol = cfg.tolerances.get("small_space", DEFAULT_TOLERANCES["small_space"][0])
            rows.append(_row("small_space", _fmt(trial=t, expect="small", N=n), res, 0.0, res, tol))
        else:
            tol = cfg.tolerances.get("small_space", DEFAULT_TOLERANCES["small_space"][1])
            rows.append(_row("small_space", _fmt(trial=t, expect="large", N=n), res, 0.0, res, tol, res > tol))
    return rows


def check_slices(cfg, rng) -> list[Row]:
    """int g dSigma = int int g(lambda zeta) dm(lambda) dSigma(zeta)."""
    tol = cfg.tolerance("slices")
    k = cfg.domain.k
    n = int(cfg.options.get("slices_resolution", 512 if k == 1 else 128))
    rule = lebesgue_quadrature(cfg.domain, n)
    f = _combo(cfg, rng, radius=float(cfg.options.get("slices_radius", 0.9 if k == 1 else 0.7)))
    m = np.arange(1, k + 1)
    cases = [("one", lambda p: np.ones(p.shape[0])), ("character", lambda p: np.prod(p ** m, axis=-1)),
             ("abs_f_sq", lambda p: np.abs(f(p)) ** 2)]
    rows = []
    for name, g in cases:
        lhs, rhs, res = probes.slice_formula_check(g, rule)
        rows.append(_row("slices", _fmt(g=name, N=n), lhs, rhs, res / max(1.0, abs(lhs)), tol))
    return rows


CHECKS: dict[str, Callable] = {
    "poisson": check_poisson,
    "clark_certify": check_clark_certify,
    "disintegration": check_disintegration,
    "double_cauchy": check_double_cauchy,
    "clark_norm": check_clark_norm,
    "composition": check_composition,
    "measure": check_measure,
    "dominance": check_dominance,
    "radial": check_radial,
    "small_space": check_small_space,
    "slices": check_slices,
}


# --------------------------------------------------------------------------
# running and reporting


@dataclass
class RunResult:
    scenario: str
    rows: list[Row]
    dominance: list[list[str]] = field(default_factory=list)

    @property
    def failed(self) -> list[Row]:
        return [r for r in self.rows if not r.passed]

    @property
    def exit_status(self) -> int:
        return 1 if self.failed else 0


def _run_check(cfg: ExperimentConfig, index: int, name: str) -> list[Row]:
    # one generator per (seed, position): results do not depend on --jobs
    rng = np.random.default_rng([cfg.seed or 0, index])
    try:
        return CHECKS[name](cfg, rng)
    except Exception as exc:  # recorded, the run goes on
        return [Row(name, _fmt(error=type(exc).__name__), complex("nan"), complex("nan"), float("nan"),
                    float("nan"), False)]


def _dominance_table(cfg: ExperimentConfig, rows: list[Row]) -> list[list[str]]:
    table = []
    for i, q in enumerate(cfg.targets):
        dom_rows = [r for r in rows if r.check == "dominance" and f"target={i};" in r.params + ";"]
        trials = [r for r in dom_rows if "trial=" in r.params]
        const = [r for r in dom_rows if "form=constant" in r.params]
        if not trials or not const:
            continue
        e = dominant.preimage(cfg.inner, q)
        grid = int(max(np.atleast_1d(cfg.resolutions["grid"])))
        table.append([cfg.scenario, repr(q.total_measure), repr(dominant.preimage_measure(e, grid)),
                      repr(const[0].lhs.real), repr(max(r.residual for r in trials))])
    return table


def run(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    tasks = list(enumerate(cfg.checks))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(lambda t: _run_check(cfg, *t), tasks))
    else:
        chunks = [_run_check(cfg, i, name) for i, name in tasks]
    rows = [r for chunk in chunks for r in chunk]
    table = _dominance_table(cfg, rows) if "dominance" in cfg.checks else []
    return RunResult(cfg.scenario, rows, table)


def render(result: RunResult, fmt: str = "csv") -> str:
    if fmt == "json":
        payload = {"schema": SCHEMA, "scenario": result.scenario,
                   "rows": [r.as_dict(result.scenario) for r in result.rows]}
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in result.rows:
        writer.writerow(r.as_list(result.scenario))
    return buf.getvalue()


def render_dominance(result: RunResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("scenario",) + dominant.REPORT_COLUMNS[1:])
    writer.writerows(result.dominance)
    return buf.getvalue()


def write_reports(result: RunResult, out_dir, fmt: str = "csv") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    main = out / f"{result.scenario}.{fmt}"
    main.write_text(render(result, fmt))
    paths = [main]
    if result.dominance:
        extra = out / f"{result.scenario}_dominance.csv"
        extra.write_text(render_dominance(result))
        paths.append(extra)
    return paths
