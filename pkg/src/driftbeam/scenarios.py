"""Scenario configuration, validation, and the built-in experiment presets.

A scenario is a JSON-serializable dict: array geometry, sources (angle,
carrier, offset), snapshot count, method, solver knobs, seed.  Unknown keys
are rejected anywhere in the tree.  The presets encode the reproduction
experiments: the M=120 study over four offset types, the M=300 scale study,
the joint-solver study with coincident carriers at M=15/30, and the
20-trial null-depth histogram study.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .array_model import ArrayConfig, OffsetTrajectory, SourceSpec, make_offset
from .dpss import DpssBasis, dpss_basis

__all__ = ["Scenario", "parse_config", "preset_config", "list_presets", "trial_offsets"]

_OFFSET_KEYS = {
    "static": {"kind", "value"},
    "linear": {"kind", "slope"},
    "zigzag": {"kind", "slope", "half_period"},
    "random": {"kind", "bound", "seed"},
}

_SOLVER_KEYS = {"l", "w", "eta", "iters", "rho", "eps", "eps_rel", "gamma0",
                "max_iters", "tol", "f1_hint"}

METHODS = ("smi", "anm1d", "ivdst", "anm2d")


@dataclass
class Scenario:
    """Validated runtime scenario."""

    m: int
    method: str
    array: ArrayConfig
    sources: list[SourceSpec]
    l: int
    w: float
    eta: float = 4.0
    iters: int = 200
    rho: float = 1.0
    eps: float = 0.0
    eps_rel: float = 0.0
    gamma0: float = 0.9
    max_iters: int = 6000
    tol: float = 2e-7
    f1_hint: float | None = None
    seed: int = 0
    raw: dict = field(default_factory=dict)

    def basis(self) -> DpssBasis:
        return dpss_basis(self.m, self.w, self.l)

    @property
    def k(self) -> int:
        return len(self.sources)


def _reject_unknown(d: dict, allowed: set, where: str) -> None:
    extra = set(d) - allowed
    if extra:
        raise ValueError(f"unknown keys {sorted(extra)} in {where}")


def _parse_offset(d: dict, m: int, base_seed: int, index: int) -> OffsetTrajectory:
    if "kind" not in d:
        raise ValueError("offset needs a 'kind'")
    kind = d["kind"]
    if kind not in _OFFSET_KEYS:
        raise ValueError(f"unknown offset kind {kind!r}")
    _reject_unknown(d, _OFFSET_KEYS[kind], f"offset[{kind}]")
    kw = {}
    if kind == "static":
        kw["value"] = float(d.get("value", 0.0))
    elif kind == "linear":
        kw["slope"] = float(d.get("slope", 0.0))
    elif kind == "zigzag":
        kw["slope"] = float(d.get("slope", 0.0))
        kw["half_period"] = int(d.get("half_period", max(1, m // 4)))
    else:
        kw["bound"] = float(d.get("bound", 0.01))
        kw["seed"] = int(d.get("seed", base_seed * 1000 + index))
    return make_offset(kind, m, **kw)


def parse_config(cfg: dict) -> Scenario:
    """Validate a config dict and build the runtime scenario."""
    _reject_unknown(cfg, {"m", "method", "array", "sources", "solver", "seed", "output"},
                    "scenario")
    for key in ("m", "method", "array", "sources", "solver"):
        if key not in cfg:
            raise ValueError(f"scenario is missing required key {key!r}")
    m = int(cfg["m"])
    method = cfg["method"]
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    seed = int(cfg.get("seed", 0))

    arr = cfg["array"]
    _reject_unknown(arr, {"n", "spacing", "positions", "wavenumber"}, "array")
    if "positions" in arr:
        array = ArrayConfig(positions=np.asarray(arr["positions"], dtype=float),
                            wavenumber=float(arr.get("wavenumber", 2 * np.pi)))
    else:
        array = ArrayConfig.uniform(int(arr["n"]), float(arr.get("spacing", 0.5)),
                                    float(arr.get("wavenumber", 2 * np.pi)))

    sources = []
    for i, s in enumerate(cfg["sources"]):
        _reject_unknown(s, {"angle", "carrier", "amplitude", "offset"}, f"sources[{i}]")
        amp = s.get("amplitude", 1.0)
        if isinstance(amp, (list, tuple)):
            amp = complex(amp[0], amp[1])
        sources.append(SourceSpec(
            angle_deg=float(s["angle"]), carrier=float(s["carrier"]),
            offset=_parse_offset(s["offset"], m, seed, i), amplitude=complex(amp)))

    sol = cfg["solver"]
    _reject_unknown(sol, _SOLVER_KEYS, "solver")
    l = int(sol["l"])
    w = sol.get("w")
    w = float(w) if w is not None else l / (2.0 * m)
    return Scenario(
        m=m, method=method, array=array, sources=sources, l=l, w=w,
        eta=float(sol.get("eta", 4.0)), iters=int(sol.get("iters", 200)),
        rho=float(sol.get("rho", 1.0)), eps=float(sol.get("eps", 0.0)),
        eps_rel=float(sol.get("eps_rel", 0.0)),
        gamma0=float(sol.get("gamma0", 0.9)), max_iters=int(sol.get("max_iters", 6000)),
        tol=float(sol.get("tol", 2e-7)),
        f1_hint=None if sol.get("f1_hint") is None else float(sol["f1_hint"]),
        seed=seed, raw=cfg)


# ---------------------------------------------------------------------------
# presets

_EXP1 = {"m": 120, "carriers": (0.1, 0.3, 0.5), "angles": (-20.0, -60.0, 20.0)}
_EXP2 = {"m": 300, "carriers": (0.2, 0.24, 0.3), "angles": (-20.0, -60.0, 20.0)}
_EXP3 = {"m": 15, "carriers": (0.2, 0.7, 0.7), "angles": (-20.0, -60.0, 20.0)}

# Offset parameter tables per experiment and type.  Drift magnitudes are
# chosen so the declared basis half-bandwidth covers each trajectory.
_EXP1_OFFSETS = {
    "static": [{"kind": "static", "value": v} for v in (0.003, -0.002, 0.004)],
    "linear": [{"kind": "linear", "slope": s} for s in (1.0e-4, -0.8e-4, 0.9e-4)],
    "zigzag": [{"kind": "zigzag", "slope": s, "half_period": 20}
               for s in (6.0e-4, -5.0e-4, 5.5e-4)],
    "random": [{"kind": "random", "bound": 0.02, "seed": s}
               for s in (2323, 3323, 4323)],
}
_EXP1_L = {  # per method
    "ivdst": {"static": 7, "linear": 2, "zigzag": 2, "random": 13},
    "anm1d": {"static": 7, "linear": 10, "zigzag": 10, "random": 13},
}
_EXP1_W = {
    "ivdst": {"static": 0.012, "linear": None, "zigzag": None, "random": None},
    "anm1d": {"static": 0.012, "linear": 0.022, "zigzag": 0.022, "random": None},
}

_EXP2_OFFSETS = {
    "static": [{"kind": "static", "value": v} for v in (0.0015, -0.001, 0.002)],
    "linear": [{"kind": "linear", "slope": s} for s in (2.0e-5, -1.5e-5, 1.8e-5)],
    "zigzag": [{"kind": "zigzag", "slope": s, "half_period": 30}
               for s in (1.0e-4, -0.8e-4, 0.9e-4)],
    "random": [{"kind": "random", "bound": 0.008, "seed": s}
               for s in (16, 1016, 2016)],
}

_EXP3_OFFSETS = {
    "static": [{"kind": "static", "value": v} for v in (0.03, 0.002, 0.002)],
    "linear": [{"kind": "linear", "slope": s} for s in (3.0e-3, -2.0e-3, 2.0e-3)],
    "zigzag": [{"kind": "zigzag", "slope": s, "half_period": 10}
               for s in (2.0e-3, -1.5e-3, 1.8e-3)],
    "random": [{"kind": "random", "bound": 0.03, "seed": s}
               for s in (7, 1007, 2007)],
}
_EXP3_L = {"static": 4, "linear": 4, "zigzag": 5, "random": 4}

OFFSET_TYPES = ("static", "linear", "zigzag", "random")


def _sources(base: dict, offsets: list[dict]) -> list[dict]:
    return [{"angle": a, "carrier": f, "offset": o}
            for a, f, o in zip(base["angles"], base["carriers"], offsets)]


def preset_config(name: str, method: str | None = None) -> dict:
    """Config dict for a named preset.

    Names: exp1-<type>, exp2-m300-<type>, exp3-2d-<type>, exp4-hist-<type>
    with <type> one of static/linear/zigzag/random; the bare names exp1,
    exp2-m300, exp3-2d, exp4-hist pick the static (exp1/exp3/exp4) or linear
    (exp2) variant.  `method` overrides the preset's default method.
    """
    aliases = {"exp1": "exp1-static", "exp2-m300": "exp2-m300-linear",
               "exp3-2d": "exp3-2d-static", "exp4-hist": "exp4-hist-static"}
    name = aliases.get(name, name)
    parts = name.split("-")
    typ = parts[-1]
    if typ not in OFFSET_TYPES:
        raise ValueError(f"unknown preset {name!r}")
    family = "-".join(parts[:-1])
    if family == "exp1":
        meth = method or "ivdst"
        if meth not in ("ivdst", "anm1d", "smi"):
            raise ValueError(f"preset {name} supports ivdst/anm1d/smi, not {meth}")
        table = _EXP1_L["anm1d" if meth == "smi" else meth]
        wtable = _EXP1_W["anm1d" if meth == "smi" else meth]
        return {
            "m": _EXP1["m"], "method": meth, "seed": 0,
            "array": {"n": 4, "spacing": 0.5},
            "sources": _sources(_EXP1, _EXP1_OFFSETS[typ]),
            "solver": ({"l": table[typ], "w": wtable[typ], "eta": 4.0, "iters": 200,
                        "gamma0": 0.9, "f1_hint": _EXP1["carriers"][0]}
                       | ({"eps_rel": 0.01, "max_iters": 8000} if meth == "anm1d" else {})),
        }
    if family == "exp2-m300":
        meth = method or "ivdst"
        if meth not in ("ivdst", "smi"):
            raise ValueError(f"preset {name} supports ivdst/smi (the structured SDP "
                             f"is impractically slow at M=300), not {meth}")
        return {
            "m": _EXP2["m"], "method": meth, "seed": 0,
            "array": {"n": 4, "spacing": 0.5},
            "sources": _sources(_EXP2, _EXP2_OFFSETS[typ]),
            "solver": {"l": 2, "w": None, "eta": 4.0, "iters": 200,
                       "gamma0": 0.9, "f1_hint": _EXP2["carriers"][0]},
        }
    if family in ("exp3-2d", "exp4-hist"):
        meth = method or "anm2d"
        if meth not in ("anm2d", "smi"):
            raise ValueError(f"preset {name} supports anm2d/smi, not {meth}")
        m = 30 if typ == "zigzag" else 15
        offsets = _EXP3_OFFSETS[typ]
        return {
            "m": m, "method": meth, "seed": 0,
            "array": {"n": 4, "spacing": 0.5},
            "sources": _sources(_EXP3, offsets),
            "solver": {"l": _EXP3_L[typ], "w": 0.09, "gamma0": 0.9,
                       "max_iters": 15000, "tol": 3e-7, "eps_rel": 0.01,
                       "f1_hint": _EXP3["carriers"][0]},
        }
    raise ValueError(f"unknown preset {name!r}")


def list_presets() -> list[str]:
    fams = ("exp1", "exp2-m300", "exp3-2d", "exp4-hist")
    return [f"{fam}-{t}" for fam in fams for t in OFFSET_TYPES]


def trial_offsets(typ: str, m: int, rng: np.random.Generator) -> list[dict]:
    """Random per-trial offset specs for the histogram study.

    Static values are random integers in [1, 6] scaled by +-0.01; linear
    and zigzag slopes the same integers scaled by +-0.001; random draws a
    fresh bounded walk.
    """
    signs = rng.choice([-1.0, 1.0], size=3)
    ints = rng.integers(1, 7, size=3)
    if typ == "static":
        return [{"kind": "static", "value": float(s * i * 0.01)}
                for s, i in zip(signs, ints)]
    if typ == "linear":
        return [{"kind": "linear", "slope": float(s * i * 0.001)}
                for s, i in zip(signs, ints)]
    if typ == "zigzag":
        return [{"kind": "zigzag", "slope": float(s * i * 0.001), "half_period": 10}
                for s, i in zip(signs, ints)]
    if typ == "random":
        return [{"kind": "random", "bound": 0.03, "seed": int(rng.integers(0, 2 ** 31))}
                for _ in range(3)]
    raise ValueError(f"unknown offset type {typ!r}")
