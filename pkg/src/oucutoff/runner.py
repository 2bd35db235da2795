"""Config-driven experiment runner: parses a JSON experiment document,
executes it, and writes CSV curves plus a versioned JSON manifest.

Runs are deterministic: the seed is mandatory, no clocks or entropy enter
the outputs, and worker fan-out merges results by grid index.
"""

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .charfn import check_cf_tail_condition, default_t0_rule, smoothness_regime
from .cutoff import cutoff_schedule, distance_value, profile_curve, verify_cutoff
from .drift import asymptotic_decomposition, validate_mplus
from .ensembles import (
    AverageConfig,
    SuperpositionBlock,
    SuperpositionConfig,
    average_distance_mc,
    average_profile,
    average_schedule,
    superposition_limit_triple,
    superposition_profile,
    superposition_schedule,
    validate_superposition,
)
from .errors import OUCutoffError, ValidationError
from .models import (
    AtomLaw,
    AtomicMeasureJumps,
    CompoundPoissonJumps,
    ExponentialLaw,
    IsotropicStableJumps,
    LevyModel,
    ParetoLaw,
    PowerLogTailLaw,
    StableJumps,
    StableParams,
    char_exponent,
    check_orey_masuda,
    check_small_jump_activity,
    has_log_moment,
    reciprocal_factorial_atoms,
)
from .sampling import RngStream

MANIFEST_SCHEMA = "v1"

_KINDS = {
    "distancecurve": "distance_curve",
    "distance_curve": "distance_curve",
    "profile": "profile",
    "verifycutoff": "verify_cutoff",
    "verify_cutoff": "verify_cutoff",
    "superposition": "superposition",
    "average": "average",
    "conditionchecks": "condition_checks",
    "condition_checks": "condition_checks",
}


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


def _law_from_doc(doc, base_dir):
    kind = doc["type"]
    if kind == "atoms":
        return AtomLaw(doc["positions"], doc.get("weights"))
    if kind == "table":
        path = os.path.join(base_dir, doc["path"])
        if not os.path.exists(path):
            raise ValidationError(f"jump table not found: {path}")
        return AtomLaw.from_csv(path)
    if kind == "exponential":
        return ExponentialLaw(doc["rate"], doc.get("sign", 1.0))
    if kind == "pareto":
        return ParetoLaw(doc["exponent"], doc.get("x_min", 1.0),
                         doc.get("sign", 1.0))
    if kind == "power_log_tail":
        return PowerLogTailLaw(doc["log_power"], doc.get("x_min", math.e))
    raise ValidationError(f"unknown jump law type {kind!r}")


def _jump_from_doc(doc, base_dir):
    kind = doc["type"]
    if kind == "stable":
        return StableJumps(StableParams(doc["alpha"], doc.get("c", 1.0),
                                        doc.get("beta", 0.0), doc.get("a", 0.0)))
    if kind == "isotropic_stable":
        return IsotropicStableJumps(doc["alpha"], doc.get("c", 1.0),
                                    doc.get("dim", 2))
    if kind == "compound_poisson":
        return CompoundPoissonJumps(doc["rate"], _law_from_doc(doc["law"], base_dir))
    if kind == "factorial_atoms":
        return reciprocal_factorial_atoms(doc.get("n_terms", 170))
    if kind == "atomic":
        return AtomicMeasureJumps(doc["positions"], doc["masses"])
    raise ValidationError(f"unknown jump type {kind!r}")


def model_from_doc(doc, base_dir="."):
    jumps = [_jump_from_doc(j, base_dir) for j in doc.get("jumps", [])]
    return LevyModel(drift=doc.get("drift"), gaussian=doc.get("gaussian"),
                     jumps=jumps, dim=doc.get("dim"),
                     name=doc.get("name", "model"))


def matrix_from_doc(doc, base_dir="."):
    if isinstance(doc, dict) and "path" in doc:
        path = os.path.join(base_dir, doc["path"])
        if not os.path.exists(path):
            raise ValidationError(f"matrix file not found: {path}")
        return np.loadtxt(path, delimiter=",", ndmin=2)
    arr = np.asarray(doc, dtype=float)
    return arr.reshape(1, 1) if arr.ndim == 0 else np.atleast_2d(arr)


class ExperimentConfig:
    """Validated experiment document."""

    def __init__(self, doc, base_dir="."):
        if "kind" not in doc:
            raise ValidationError("config needs a 'kind' field")
        key = str(doc["kind"]).lower()
        if key not in _KINDS:
            raise ValidationError(f"unknown experiment kind {doc['kind']!r}")
        self.kind = _KINDS[key]
        if "seed" not in doc:
            raise ValidationError("config needs an explicit 'seed'")
        self.seed = int(doc["seed"])
        self.doc = doc
        self.base_dir = base_dir
        self.out_dir = doc.get("out_dir", "results")
        self.method = doc.get("method", "density")
        self.workers = int(doc.get("workers", 0)) or (os.cpu_count() or 1)
        self.grids = doc.get("grids", {})

        eps = doc.get("eps_list", doc.get("eps"))
        self.eps_list = None
        if eps is not None:
            self.eps_list = [float(e) for e in np.atleast_1d(eps)]
            for e in self.eps_list:
                if not 0.0 < e < 1.0:
                    raise ValidationError(f"epsilon out of (0,1): {e:g}")

        if self.kind in ("distance_curve", "profile", "verify_cutoff",
                         "condition_checks"):
            self.model = model_from_doc(doc.get("model", {}), base_dir)
            self.q = matrix_from_doc(doc.get("q", [[1.0]]), base_dir)
            self.x0 = np.atleast_1d(np.asarray(doc.get("x0", [1.0]), float))
        if self.kind == "superposition":
            blocks = [
                SuperpositionBlock(b["weight"], b["rate"], b["x"],
                                   model_from_doc(b["model"], base_dir))
                for b in doc["blocks"]
            ]
            self.superposition = SuperpositionConfig(
                blocks, rate_floor=doc.get("rate_floor"),
                tail_certificates=doc.get("tail_certificates", {}),
            )
        if self.kind == "average":
            a = doc["average"]
            self.average = AverageConfig(
                stable=StableParams(a["alpha"], a.get("c", 1.0),
                                    a.get("beta", 0.0), a.get("a", 0.0)),
                gamma=a["gamma"], x0=a["x0"], n=int(a["n"]),
                eps_n=float(a["eps_n"]),
            )

    def c_grid(self, default_lo=-4.0, default_hi=4.0, default_count=25):
        g = self.grids.get("c", {})
        lo = g.get("lo", default_lo)
        hi = g.get("hi", default_hi)
        count = int(g.get("count", default_count))
        if count < 1 or hi <= lo:
            raise ValidationError("empty c grid")
        return np.linspace(lo, hi, count)

    def t_grid(self):
        g = self.grids.get("t")
        if g is None:
            raise ValidationError("distance curves need grids.t")
        arr = np.asarray(g, dtype=float)
        if arr.size == 0:
            raise ValidationError("empty t grid")
        return arr


def load_config(path):
    with open(path) as fh:
        doc = json.load(fh)
    return ExperimentConfig(doc, base_dir=os.path.dirname(os.path.abspath(path)))


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _invariant_suite(model, spec):
    """Quick per-run invariant verdicts recorded in every manifest."""
    rng = np.random.default_rng(9090)
    zs = rng.standard_normal((16, model.dim)) * 3.0
    zflat = zs[:, 0] if model.dim == 1 else zs
    psi = char_exponent(model, zflat)
    conj_ok = bool(np.allclose(char_exponent(model, -zflat), np.conj(psi),
                               atol=1e-10))
    bounded = bool(np.all(np.abs(np.exp(psi)) <= 1.0 + 1e-12))
    return {
        "exponent_hermitian": conj_ok,
        "exponent_bounded": bounded,
        "log_moment": has_log_moment(model).verdict,
        "drift_spectrum_min_rate": spec.rate_min,
        "smoothness_regime": smoothness_regime(model, spec)[0],
    }


def _manifest(config, artifacts, verdicts, extra=None):
    doc = {
        "schema": MANIFEST_SCHEMA,
        "package_version": __version__,
        "kind": config.kind,
        "seed": config.seed,
        "inputs": config.doc,
        "artifacts": artifacts,
        "verdicts": verdicts,
    }
    if extra:
        doc.update(extra)
    return doc


# ---------------------------------------------------------------------------
# experiment bodies
# ---------------------------------------------------------------------------


def _point_distance(args):
    (model_doc, base_dir, q, eps, x0, t, method, seed, idx) = args
    model = model_from_doc(model_doc, base_dir)
    spec = validate_mplus(q)
    est = distance_value(model, spec, eps, x0, t, method=method,
                         rng=RngStream(seed, idx))
    return idx, est.value, est.stderr, tuple(est.diagnostics.get("flags", ()))


def _run_distance_curve(config, out):
    spec = validate_mplus(config.q)
    ts = config.t_grid()
    eps_list = config.eps_list or [1e-4]
    jobs = []
    idx = 0
    for eps in eps_list:
        for t in ts:
            jobs.append((config.doc.get("model", {}), config.base_dir,
                         config.q, eps, config.x0, float(t), config.method,
                         config.seed, idx))
            idx += 1
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = sorted(pool.map(_point_distance, jobs))
    else:
        results = sorted(_point_distance(j) for j in jobs)
    rows = []
    k = 0
    for eps in eps_list:
        for t in ts:
            _, value, stderr, flags = results[k]
            rows.append((float(eps), float(t), value, stderr, config.method,
                         "|".join(flags)))
            k += 1
    _write_csv(os.path.join(out, "distance_curve.csv"),
               ["eps", "t_or_c", "value", "stderr", "method", "flags"], rows)
    _write_csv(os.path.join(out, "plot_distance.csv"),
               ["t", "d", "stderr"],
               [(r[1], r[2], r[3]) for r in rows])
    verdicts = _invariant_suite(config.model, spec)
    return ["distance_curve.csv", "plot_distance.csv"], verdicts, {}


def _run_profile(config, out):
    spec = validate_mplus(config.q)
    asym = asymptotic_decomposition(spec, config.x0)
    cs = config.c_grid()
    eps_list = config.eps_list or [1e-6]
    rows = []
    for eps in eps_list:
        sched = cutoff_schedule(asym.gamma, asym.ell, eps)
        for c in cs:
            est = distance_value(config.model, spec, eps, config.x0,
                                 sched.time_at(c), method=config.method,
                                 rng=RngStream(config.seed, 1))
            rows.append((float(eps), float(c), est.value, est.stderr,
                         config.method, ""))
    prof = profile_curve(config.model, spec, asym, cs, method="density")
    for c, v in zip(cs, prof.values):
        rows.append((0.0, float(c), float(v), 0.0, "limit_profile", ""))
    _write_csv(os.path.join(out, "profile.csv"),
               ["eps", "t_or_c", "value", "stderr", "method", "flags"], rows)
    _write_csv(os.path.join(out, "plot_profile.csv"),
               ["c", "G", "stderr"],
               [(c, v, 0.0) for c, v in zip(cs, prof.values)])
    verdicts = _invariant_suite(config.model, spec)
    verdicts["profile_limits"] = prof.limits_check
    extra = {"schedule": {f"{e:g}": cutoff_schedule(asym.gamma, asym.ell, e).t_eps
                          for e in eps_list},
             "gamma": asym.gamma, "ell": asym.ell}
    return ["profile.csv", "plot_profile.csv"], verdicts, extra


def _run_verify(config, out):
    spec = validate_mplus(config.q)
    level = str(config.doc.get("level", "profile")).lower()
    if level not in ("cutoff", "window", "profile"):
        raise ValidationError(f"unknown verification level {level!r}")
    report = verify_cutoff(config.model, spec, config.eps_list, config.x0,
                           level=level, method=config.method)
    rows = []
    if "curves" in report:
        for eps_key, vals in report["curves"].items():
            for c, v in zip(report["c_grid"], vals):
                rows.append((float(eps_key), float(c), float(v), 0.0,
                             config.method, ""))
    if "distances" in report:
        for frac, vals in report["distances"].items():
            for eps, v in zip(report["eps"], vals):
                rows.append((float(eps), float(frac), float(v), 0.0,
                             config.method, "fraction_of_t"))
    _write_csv(os.path.join(out, "verify_cutoff.csv"),
               ["eps", "t_or_c", "value", "stderr", "method", "flags"], rows)
    verdicts = _invariant_suite(config.model, spec)
    verdicts["verify"] = {k: v for k, v in report.items()
                          if k in ("passed", "window_ok", "trend_ok",
                                   "max_profile_deviation", "profile_exists")}
    return ["verify_cutoff.csv"], verdicts, {"report": _jsonable(report)}


def _run_superposition(config, out):
    sup = config.superposition
    report = validate_superposition(sup)
    eps_list = config.eps_list or [1e-4]
    cs = config.c_grid()
    rows = []
    for c in cs:
        est = superposition_profile(sup, float(c))
        rows.append((0.0, float(c), est.value, est.stderr, "limit_profile", ""))
    _write_csv(os.path.join(out, "superposition_profile.csv"),
               ["eps", "t_or_c", "value", "stderr", "method", "flags"], rows)
    triple = superposition_limit_triple(sup, eps_list[0])
    sched = superposition_schedule(sup, eps_list[0])
    verdicts = {"validation": _jsonable(report)}
    extra = {"limit_triple": _jsonable(triple),
             "schedule": {"t": sched.t_eps, "w": sched.w_eps}}
    return ["superposition_profile.csv"], verdicts, extra


def _run_average(config, out):
    cfg = config.average
    sched = average_schedule(cfg)
    cs = config.c_grid(default_lo=-2.0, default_hi=2.0, default_count=5)
    paths = int(config.doc.get("paths", 100_000))
    rows = []
    for i, c in enumerate(cs):
        mc = average_distance_mc(cfg, sched.time_at(float(c)), paths,
                                 RngStream(config.seed, i), cross_check=True)
        prof = average_profile(cfg, float(c))
        rows.append((cfg.eps_n, float(c), mc.value, mc.stderr, "monte_carlo",
                     ""))
        rows.append((0.0, float(c), prof.value, 0.0, "limit_profile", ""))
    _write_csv(os.path.join(out, "average_process.csv"),
               ["eps", "t_or_c", "value", "stderr", "method", "flags"], rows)
    return (["average_process.csv"],
            {"schedule_positive": sched.t_eps > 0},
            {"schedule": {"t": sched.t_eps, "w": sched.w_eps}})


def _run_condition_checks(config, out):
    model = config.model
    spec = validate_mplus(config.q)
    reports = [has_log_moment(model)]
    for variant in ("kallenberg", "bk_1d"):
        if model.dim == 1:
            r_grid = np.geomspace(1e-2, 1e-120, 60)
            reports.append(check_small_jump_activity(model, r_grid, variant))
    om = config.doc.get("orey_masuda")
    if om:
        reports.append(check_orey_masuda(model, om["alpha"], om["c"]))
    if model.dim == 1 and config.doc.get("cf_tail", True):
        try:
            reports.append(check_cf_tail_condition(
                model, spec, np.array([4.0, 8.0, 16.0, 32.0]),
                default_t0_rule(spec)))
        except OUCutoffError:
            pass
    rows = []
    for rep in reports:
        for probe, value in rep.evidence[:40]:
            rows.append((0.0, probe, float(value) if np.isfinite(value) else value,
                         0.0, rep.condition, rep.verdict))
    _write_csv(os.path.join(out, "condition_checks.csv"),
               ["eps", "t_or_c", "value", "stderr", "method", "flags"], rows)
    verdicts = {rep.condition: rep.verdict for rep in reports}
    verdicts.update(_invariant_suite(model, spec))
    return ["condition_checks.csv"], verdicts, {}


_BODIES = {
    "distance_curve": _run_distance_curve,
    "profile": _run_profile,
    "verify_cutoff": _run_verify,
    "superposition": _run_superposition,
    "average": _run_average,
    "condition_checks": _run_condition_checks,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return str(obj)


def run(config_path, out_dir=None, seed_override=None, workers=None):
    """Execute one experiment config; returns the process exit code."""
    try:
        config = load_config(config_path)
        if seed_override is not None:
            config.seed = int(seed_override)
        if workers is not None:
            config.workers = max(1, int(workers))
        root = out_dir or os.environ.get("OUCUTOFF_OUT_ROOT", ".")
        out = os.path.join(root, config.out_dir)
        os.makedirs(out, exist_ok=True)
    except (ValidationError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(json.dumps({"error": {"stage": "validation", "message": str(exc)}}))
        return 2

    try:
        artifacts, verdicts, extra = _BODIES[config.kind](config, out)
    except ValidationError as exc:
        print(json.dumps({"error": {"stage": "validation", "message": str(exc)}}))
        return 2
    except OUCutoffError as exc:
        payload = {"stage": "numeric", "message": str(exc),
                   "type": type(exc).__name__}
        if hasattr(config, "model"):
            # attach the gating checker verdicts so the failure is diagnosable
            try:
                spec = validate_mplus(config.q)
                payload["checker_report"] = {
                    "log_moment": has_log_moment(config.model).verdict,
                    "smoothness_regime": smoothness_regime(config.model,
                                                           spec)[0],
                }
            except OUCutoffError:
                pass
        print(json.dumps({"error": payload}))
        return 3

    manifest = _manifest(config, artifacts, _jsonable(verdicts),
                         _jsonable(extra))
    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps({"ok": True, "out_dir": out, "artifacts": artifacts}))
    return 0


def describe(config_path):
    """Dry-run: print the resolved plan without writing anything."""
    try:
        config = load_config(config_path)
    except (ValidationError, json.JSONDecodeError, KeyError) as exc:
        print(json.dumps({"error": {"stage": "parse", "message": str(exc)}}))
        return 2
    plan = {"kind": config.kind, "seed": config.seed, "method": config.method,
            "workers": config.workers}
    if config.kind in ("profile", "verify_cutoff", "distance_curve"):
        spec = validate_mplus(config.q)
        asym = asymptotic_decomposition(spec, config.x0)
        plan["gamma"] = asym.gamma
        plan["ell"] = asym.ell
        plan["oscillatory"] = asym.oscillatory
        if config.eps_list:
            plan["schedules"] = {
                f"{e:g}": cutoff_schedule(asym.gamma, asym.ell, e).t_eps
                for e in config.eps_list
            }
        regime, _ = smoothness_regime(config.model, spec)
        plan["smoothness_regime"] = regime
    if config.kind == "average":
        sched = average_schedule(config.average)
        plan["schedule"] = {"t": sched.t_eps, "w": sched.w_eps}
    if config.kind == "superposition":
        plan["validation"] = _jsonable(validate_superposition(config.superposition))
    if config.kind == "distance_curve":
        plan["work_units"] = len(config.t_grid()) * len(config.eps_list or [1])
    elif config.kind in ("profile", "verify_cutoff"):
        plan["work_units"] = len(config.c_grid()) * len(config.eps_list or [1])
    print(json.dumps(plan, indent=2, sort_keys=True))
    return 0
