"""Command line pipeline: config ingestion, stage orchestration and
artifact emission.

Every run writes its artifacts atomically into ``--out`` together with a
``manifest.json`` (config hash, seed, library versions and the sha256 of
each file). Failures write ``error.json`` and exit with 2 for invalid input
or 3 for numerical failures.
"""

import argparse
import copy
import hashlib
import json
import math
import os
import platform
import sys
import tempfile
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .errors import JuliaThermoError, MissingArtifacts, NumericalError, ValidationError
from .fourier import fourier_decay, zeta_set
from .maps import RationalMap, certify_hyperbolic
from .measure import build_measure, gibbs_constant, regularity_scan, sample, samples_csv
from .models import circle_model, middle_thirds_cantor
from .nonconc import nonconc_exponent
from .potentials import parse_potential
from .spectral import dolgopyat_diagnostics, spectral_radius_profile
from .symbolic import MarkovModel, build_full_shift_model
from .thermo import conformal_potential, ergodic_constants, normalize, pfr_eigendata, pressure, solve_bowen, transfer_one_defect

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_INTERNAL = 0, 2, 3, 1

COMMANDS = ("certify", "model", "pressure", "dimension", "measure", "fourier", "nonconc", "spectral", "all", "report")

DEFAULTS = {
    "map": None,
    "model": {"type": "full_shift"},
    "potential": "conformal",
    "depths": {"eigen": 10, "pressure": 12, "measure": 14},
    "certify": {"n_max": 10, "sample_size": 1024, "max_period": 16},
    "measure": {"samples": 2000},
    "fourier": {"T": [4, 8, 16, 32, 64], "directions": 32, "moduli": 4, "method": "quadrature", "mc_count": 20000},
    "nonconc": {"n": 8, "sigma": [1e-1, 1e-3], "points": 9, "gamma_config": 0.1},
    "spectral": {"t": [-50, 50, 0.5], "l": [-10, 10], "n_window": [8, 14], "diagnostics": True},
    "seed": None,
}

ARTIFACTS = {
    "certificate": "certificate.json",
    "pressure": "pressure.json",
    "dimension": "dimension.json",
    "measure": "measure.json",
    "decay": "decay.json",
    "nonconc": "nonconc.json",
    "spectral": "spectral.json",
}


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------
def _merge(base, extra, path=""):
    out = copy.deepcopy(base)
    for k, v in extra.items():
        where = f"{path}{k}"
        if k not in base:
            raise ValidationError(f"unknown config key '{where}'", field=where)
        if isinstance(base[k], dict) and k != "model":
            if not isinstance(v, dict):
                raise ValidationError(f"'{where}' must be an object", field=where)
            out[k] = _merge(base[k], v, where + ".")
        else:
            out[k] = v
    return out


def _require(cond, msg, field):
    if not cond:
        raise ValidationError(msg, field=field)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def validate_config(cfg):
    """Check types and ranges; raise ValidationError naming the field."""
    seed = cfg["seed"]
    _require(seed is not None, "a seed is required (config 'seed' or --seed)", "seed")
    _require(_is_int(seed) and 0 <= seed < 2**64, "seed must be an unsigned 64-bit integer", "seed")
    for k, v in cfg["depths"].items():
        _require(_is_int(v) and v >= 4, f"depth '{k}' must be an integer >= 4", f"depths.{k}")
    _require(isinstance(cfg["potential"], str), "potential must be a string", "potential")
    m = cfg["model"]
    _require(isinstance(m, dict) and m.get("type") in ("full_shift", "file", "inline", "circle", "cantor"),
             "model.type must be one of full_shift, file, inline, circle, cantor", "model.type")
    if m["type"] == "full_shift":
        _require(cfg["map"] is not None, "a full-shift model needs a map", "map")
        if "radius" in m:
            _require(_is_num(m["radius"]) and m["radius"] > 0, "model.radius must be positive", "model.radius")
    if m["type"] == "file":
        _require(isinstance(m.get("path"), str), "model.path must be a string", "model.path")
    if m["type"] == "inline":
        _require(isinstance(m.get("data"), dict), "model.data must be an object", "model.data")
    if cfg["map"] is not None:
        _require(isinstance(cfg["map"], dict) and ("quadratic" in cfg["map"] or "num" in cfg["map"]),
                 "map needs 'quadratic' or 'num'", "map")
    f = cfg["fourier"]
    T = f["T"]
    _require(isinstance(T, list) and len(T) >= 4 and all(_is_num(x) and x > 0 for x in T), "fourier.T needs at least four positive values", "fourier.T")
    _require(f["method"] in ("quadrature", "montecarlo"), "fourier.method must be quadrature or montecarlo", "fourier.method")
    for k in ("directions", "moduli", "mc_count"):
        _require(_is_int(f[k]) and f[k] >= 1, f"fourier.{k} must be a positive integer", f"fourier.{k}")
    _require(f["directions"] * f["moduli"] >= 32, "fourier.directions * fourier.moduli must be at least 32 (samples per annulus)", "fourier.directions")
    nc = cfg["nonconc"]
    s = nc["sigma"]
    _require(isinstance(s, list) and len(s) == 2 and all(_is_num(x) and x > 0 for x in s) and s[0] > s[1],
             "nonconc.sigma must be a decreasing pair of positive numbers", "nonconc.sigma")
    _require(_is_int(nc["points"]) and nc["points"] >= 2, "nonconc.points must be an integer >= 2", "nonconc.points")
    _require(_is_int(nc["n"]) and nc["n"] >= 1, "nonconc.n must be a positive integer", "nonconc.n")
    _require(_is_num(nc["gamma_config"]), "nonconc.gamma_config must be a number", "nonconc.gamma_config")
    sp = cfg["spectral"]
    _require(isinstance(sp["t"], list) and len(sp["t"]) == 3 and all(_is_num(x) for x in sp["t"]) and sp["t"][2] > 0 and sp["t"][1] >= sp["t"][0],
             "spectral.t must be [start, stop, step] with step > 0", "spectral.t")
    _require(isinstance(sp["l"], list) and len(sp["l"]) == 2 and all(_is_int(x) for x in sp["l"]) and sp["l"][1] >= sp["l"][0],
             "spectral.l must be [lo, hi] integers", "spectral.l")
    nw = sp["n_window"]
    _require(isinstance(nw, list) and len(nw) == 2 and all(_is_int(x) for x in nw) and 1 <= nw[0] < nw[1],
             "spectral.n_window must be [n1, n2] with 1 <= n1 < n2", "spectral.n_window")
    for k, v in cfg["certify"].items():
        _require(_is_int(v) and v >= 1, f"certify.{k} must be a positive integer", f"certify.{k}")
    _require(_is_int(cfg["measure"]["samples"]) and cfg["measure"]["samples"] >= 1, "measure.samples must be a positive integer", "measure.samples")
    return cfg


def load_config(path=None, seed=None, overrides=(), text=None):
    """Read a JSON config, apply flag overrides and validate it."""
    if text is None:
        if path is None:
            raise ValidationError("--config is required for this command", field="config")
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read config: {exc}", field="config") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc.msg} at line {exc.lineno} column {exc.colno}", field="config") from exc
    _require(isinstance(raw, dict), "config must be a JSON object", "config")
    cfg = _merge(DEFAULTS, raw)
    if seed is not None:
        cfg["seed"] = seed
    for item in overrides:
        key, sep, val = item.partition("=")
        _require(sep and key in cfg["depths"], f"--depth-override expects K=V with K in {sorted(cfg['depths'])}", "depth-override")
        try:
            cfg["depths"][key] = int(val)
        except ValueError as exc:
            raise ValidationError(f"depth override '{item}' is not an integer", field=f"depths.{key}") from exc
    cfg = validate_config(cfg)
    cfg["_base"] = str(Path(path).resolve().parent) if path is not None else os.getcwd()
    return cfg


def config_hash(cfg):
    public = {k: v for k, v in cfg.items() if not k.startswith("_")}
    return hashlib.sha256(json.dumps(public, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------
def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    return obj


def dump_json(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def write_atomic(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_file(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out, command, cfg):
    """List every file of ``out`` with its sha256.

    Without a config (``report``) the config hash and seed of the previous
    manifest are kept.
    """
    path = Path(out) / "manifest.json"
    previous = {}
    if cfg is None and path.is_file():
        try:
            previous = json.loads(path.read_text())
        except json.JSONDecodeError:
            previous = {}
    files = {p.name: sha256_file(p) for p in sorted(Path(out).iterdir()) if p.is_file() and p.name != "manifest.json" and not p.name.startswith(".")}
    manifest = {
        "command": command,
        "config_sha256": config_hash(cfg) if cfg else previous.get("config_sha256"),
        "seed": cfg["seed"] if cfg else previous.get("seed"),
        "versions": {"juliathermo": __version__, "numpy": np.__version__, "scipy": scipy.__version__, "python": platform.python_version()},
        "files": files,
    }
    write_atomic(path, dump_json(manifest))


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------
def _complex(v, field):
    if _is_num(v):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(_is_num(x) for x in v):
        return complex(v[0], v[1])
    raise ValidationError(f"'{field}' must be a number or [re, im]", field=field)


class Pipeline:
    """Lazily built objects shared by the stages of one run."""

    def __init__(self, cfg, out, threads=1):
        self.cfg = cfg
        self.out = Path(out)
        self.threads = threads
        self.seed = cfg["seed"]
        self.depths = cfg["depths"]
        self._cache = {}
        self.written = []

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def write(self, name, text):
        write_atomic(self.out / name, text)
        self.written.append(name)

    # -- shared objects -------------------------------------------------------
    @property
    def fmap(self):
        def build():
            mcfg = self.cfg["map"]
            if mcfg is None:
                return self.model.map if self.model.branches.kind == "rational" else None
            if "quadratic" in mcfg:
                return RationalMap.quadratic(_complex(mcfg["quadratic"], "map.quadratic"))
            return RationalMap.from_dict(mcfg)

        return self._memo("map", build)

    @property
    def model(self):
        def build():
            m = self.cfg["model"]
            kind = m["type"]
            if kind == "circle":
                return circle_model()
            if kind == "cantor":
                return middle_thirds_cantor()
            if kind == "file":
                p = Path(m["path"])
                p = p if p.is_absolute() else Path(self.cfg["_base"]) / p
                try:
                    text = p.read_text()
                except OSError as exc:
                    raise ValidationError(f"cannot read model file: {exc}", field="model.path") from exc
                try:
                    return MarkovModel.from_json(text)
                except json.JSONDecodeError as exc:
                    raise ValidationError(f"malformed model JSON: {exc.msg}", field="model.path") from exc
            if kind == "inline":
                return MarkovModel.from_dict(m["data"])
            fmap = self.fmap
            center = _complex(m.get("center", 0.0), "model.center")
            radius = m.get("radius")
            if radius is None:
                cv = fmap.critical_values()
                radius = float(np.sqrt(np.abs(cv).max()) + 1) if cv.size else 2.0
            return build_full_shift_model(fmap, center, radius, name=m.get("name", ""))

        return self._memo("model", build)

    @property
    def potential(self):
        return self._memo("potential", lambda: parse_potential(self.cfg["potential"], self.model, self.depths["eigen"]))

    @property
    def normalized(self):
        def build():
            phi = self.potential
            return phi if phi.normalized else normalize(self.model, phi, self.depths["eigen"])

        return self._memo("normalized", build)

    @property
    def constants(self):
        return self._memo("constants", lambda: ergodic_constants(self.model, self.normalized, self.depths["eigen"]))

    @property
    def measure(self):
        return self._memo("measure", lambda: build_measure(self.model, self.normalized, self.depths["measure"]))

    # -- stages ---------------------------------------------------------------
    def certify(self):
        if self.fmap is None:
            raise ValidationError("certification needs a rational map", field="map")
        c = self.cfg["certify"]
        cert = certify_hyperbolic(self.fmap, n_max=c["n_max"], sample_size=c["sample_size"], max_period=c["max_period"], seed=self.seed)
        self.write("certificate.json", dump_json(cert.to_dict()))

    def model_stage(self):
        self.write("model.json", dump_json(self.model.to_dict()))

    def pressure(self):
        n, d = self.depths["pressure"], self.depths["eigen"]
        psi = self.potential
        pd = pfr_eigendata(self.model, psi, d)
        phi = self.normalized
        out = {
            "potential": psi.label,
            "n": n,
            "periodic": pressure(self.model, psi, n, "periodic"),
            "cylinder": pressure(self.model, psi, n, "cylinder"),
            "eigen": {"P": pd.P, "depth": d, "residual": pd.residual, "duality_defect": pd.duality_defect, "iterations": pd.iterations},
            "normalized": {"transfer_one_defect": transfer_one_defect(self.model, phi, d), "max_value": float(phi.on_level(self.model, d).max())},
        }
        out["estimator_gap"] = abs(out["periodic"] - out["cylinder"])
        self.write("pressure.json", dump_json(out))

    def dimension(self):
        n, d = self.depths["pressure"], self.depths["eigen"]
        b = solve_bowen(self.model, n)
        prev = solve_bowen(self.model, n - 2)
        ec = ergodic_constants(self.model, conformal_potential(self.model, d, n), d)
        out = {
            "delta": b.delta,
            "residual": b.residual,
            "n": n,
            "method": b.method,
            "delta_previous": prev.delta,
            "n_previous": n - 2,
            "relative_change": abs(b.delta - prev.delta) / abs(b.delta) if b.delta else None,
            "conformal": ec.to_dict(),
        }
        self.write("dimension.json", dump_json(out))

    def measure_stage(self):
        meas = self.measure
        pts, _ = sample(meas, self.cfg["measure"]["samples"], self.seed)
        reg = regularity_scan(meas, seed=self.seed)
        k = min(8, meas.depth)
        out = {
            "potential": self.normalized.label,
            "depth": meas.depth,
            "leaves": len(meas),
            "gibbs_constant": {"k": k, "C0": gibbs_constant(meas, k)},
            "ergodic": self.constants.to_dict(),
            "regularity": reg.to_dict(),
            "samples": self.cfg["measure"]["samples"],
        }
        self.write("measure.csv", meas.to_csv())
        self.write("samples.csv", samples_csv(pts))
        self.write("measure.json", dump_json(out))

    def fourier(self):
        f = self.cfg["fourier"]
        kw = {"threads": self.threads}
        if f["method"] == "montecarlo":
            kw.update(mc_count=f["mc_count"], seed=self.seed)
        rep = fourier_decay(self.measure, f["T"], f["directions"], f["moduli"], f["method"], **kw)
        out = rep.to_dict()
        out["T"] = f["T"]
        out["depth"] = self.measure.depth
        self.write("fourier.csv", rep.to_csv())
        self.write("decay.json", dump_json(out))

    def nonconc(self):
        c = self.cfg["nonconc"]
        n = c["n"]
        lv = self.model.tree.level(n)
        a = lv.words[0]
        lam = self.constants.lam
        _, values = zeta_set(self.model, n, a, a, lam)
        sigmas = np.logspace(np.log10(c["sigma"][0]), np.log10(c["sigma"][1]), c["points"])
        rep = nonconc_exponent(values, sigmas, gamma_config=c["gamma_config"])
        out = rep.to_dict()
        out.update(n=n, count=int(values.size), block=self.model.format_word(a), lam=lam, sigma_range=list(c["sigma"]))
        self.write("nonconc.csv", rep.to_csv())
        self.write("nonconc.json", dump_json(out))

    def spectral(self):
        s = self.cfg["spectral"]
        t0, t1, dt = s["t"]
        t_grid = np.round(np.arange(t0, t1 + dt / 2, dt), 12)
        l_grid = np.arange(s["l"][0], s["l"][1] + 1)
        rep = spectral_radius_profile(self.model, self.normalized, t_grid, l_grid, self.depths["eigen"], tuple(s["n_window"]), self.seed, self.threads)
        out = rep.to_dict()
        far = [r[2] for r in rep.rows if abs(r[0]) + abs(r[1]) > 1]
        out.update(
            n_window=s["n_window"],
            depth=self.depths["eigen"],
            rho_00=rep.rho_hat(0.0, 0) if 0.0 in t_grid and 0 in l_grid else None,
            uniformly_below_one=bool(max(far) < 1) if far else None,
            converged_fraction=float(np.mean([r[3] for r in rep.rows])),
        )
        if s["diagnostics"]:
            out["diagnostics"] = dolgopyat_diagnostics(self.model, depth=self.depths["eigen"], seed=self.seed)
        self.write("spectral.csv", rep.to_csv())
        self.write("spectral.json", dump_json(out))


STAGES = {
    "certify": "certify",
    "model": "model_stage",
    "pressure": "pressure",
    "dimension": "dimension",
    "measure": "measure_stage",
    "fourier": "fourier",
    "nonconc": "nonconc",
    "spectral": "spectral",
}


def run(cfg, command, out, threads=1):
    """Run one command (or ``all``) and return the list of written files."""
    pipe = Pipeline(cfg, out, threads)
    if command == "all":
        for name, method in STAGES.items():
            if name == "certify" and pipe.fmap is None:
                continue
            getattr(pipe, method)()
    else:
        getattr(pipe, STAGES[command])()
    return pipe.written


def _load_artifact(out, name):
    p = Path(out) / name
    if not p.is_file():
        return None
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{name} is not valid JSON: {exc.msg}", field=name) from exc


def report(out):
    """Merge per-stage JSON artifacts into ``summary.json`` with cross-checks."""
    sections = {key: _load_artifact(out, name) for key, name in ARTIFACTS.items()}
    if all(v is None for v in sections.values()):
        raise MissingArtifacts(f"no stage artifacts found in {out}")
    checks = {"delta_bowen_minus_entropy_over_lambda": None, "eps0_suggestion": None}
    dim = sections["dimension"]
    lam = None
    if dim is not None:
        conf = dim.get("conformal") or {}
        lam = conf.get("lambda")
        if lam and conf.get("entropy") is not None and dim.get("delta") is not None:
            checks["delta_bowen_minus_entropy_over_lambda"] = abs(dim["delta"] - conf["entropy"] / lam)
    if lam is None and sections["measure"] is not None:
        lam = (sections["measure"].get("ergodic") or {}).get("lambda")
    spc = sections["spectral"]
    if spc is not None and spc.get("rho") is not None and 0 < spc["rho"] < 1:
        cands = [-math.log(spc["rho"]) / 20]
        if lam:
            cands.append(lam / 2)
        checks["eps0_suggestion"] = {"value": min(cands), "rho": spc["rho"], "lambda": lam, "formula": "min(-ln(rho)/20, lambda/2)"}
    summary = dict(sections)
    summary["cross_checks"] = checks
    write_atomic(Path(out) / "summary.json", dump_json(summary))
    return summary


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------
def build_parser():
    p = argparse.ArgumentParser(prog="juliathermo", description="Thermodynamic formalism toolkit for hyperbolic rational maps.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.add_argument("--threads", type=int, default=1, help="worker threads for grid stages")
    p.add_argument("--depth-override", action="append", default=[], metavar="K=V", help="override depths.K (repeatable)")
    return p


def _fail(out, command, exc, code, cfg=None):
    err = exc.to_dict() if isinstance(exc, JuliaThermoError) else {"error": type(exc).__name__, "message": str(exc)}
    err.update(command=command, exit_code=code)
    print(f"juliathermo {command}: {err['error']}: {err['message']}", file=sys.stderr)
    try:
        Path(out).mkdir(parents=True, exist_ok=True)
        write_atomic(Path(out) / "error.json", dump_json(err))
        write_manifest(out, command, cfg)
    except OSError as io_exc:
        print(f"juliathermo: could not write error.json: {io_exc}", file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    cfg = None
    try:
        if args.threads < 1:
            raise ValidationError("--threads must be at least 1", field="threads")
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ValidationError("--seed must be an unsigned 64-bit integer", field="seed")
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "report":
            if args.config is not None:
                cfg = load_config(args.config, args.seed, args.depth_override)
            report(out)
            written = ["summary.json"]
        else:
            cfg = load_config(args.config, args.seed, args.depth_override)
            written = run(cfg, args.command, out, args.threads)
        stale = out / "error.json"
        if stale.exists():
            stale.unlink()
        write_manifest(out, args.command, cfg)
    except ValidationError as exc:
        return _fail(out, args.command, exc, EXIT_VALIDATION, cfg)
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail(out, args.command, exc, EXIT_NUMERIC, cfg)
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        return _fail(out, args.command, exc, EXIT_INTERNAL, cfg)
    print(f"juliathermo {args.command}: wrote {', '.join(written) or 'nothing'} to {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
