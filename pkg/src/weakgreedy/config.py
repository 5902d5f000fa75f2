"""INI experiment configuration.

Sections: ``[set]``, ``[norm]``, ``[greedy]``, ``[widths]``, ``[bounds]``
and ``[run]``.  A config may be a path or the name of a bundled config
(``diagonal_hilbert`` etc.).
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .bounds import COROLLARIES, RateParams
from .greedy import POLICIES, WeakGreedyParams
from .seqspace import NormKind, norm
from .sets import (Diagonal, DyadicBlocks, FromMatrix, ParametricSurrogate, RandomBall,
                   named_rng, random_p1p2_matrix, tight_sigmas)

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config", "bundled_configs",
           "resolve_config_path", "apply_override"]

SET_KINDS = ("diagonal", "frommatrix", "dyadic", "randomball", "parametric")
RANDOM_KINDS = ("frommatrix", "randomball")


class ConfigError(ValueError):
    pass


def bundled_configs() -> list:
    root = resources.files("weakgreedy") / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def resolve_config_path(name_or_path) -> Path:
    p = Path(name_or_path)
    if p.is_file():
        return p
    bundled = resources.files("weakgreedy") / "configs" / f"{name_or_path}.ini"
    if bundled.is_file():
        return Path(str(bundled))
    raise ConfigError(f"config not found: {name_or_path}")


def _floats(text: str) -> list:
    return [float(eval_number(t)) for t in text.replace("\n", ",").split(",") if t.strip()]


def eval_number(text: str) -> float:
    """A float, or ``a/b`` / ``a^b`` style literals such as ``1/3`` or ``2^-5``."""
    t = text.strip()
    try:
        return float(t)
    except ValueError:
        pass
    if "/" in t:
        a, b = t.split("/", 1)
        return eval_number(a) / eval_number(b)
    if "^" in t:
        a, b = t.split("^", 1)
        return eval_number(a) ** eval_number(b)
    raise ConfigError(f"not a number: {text!r}")


@dataclass
class ExperimentConfig:
    name: str
    set_kind: str
    set_options: dict
    norm_kind: NormKind
    greedy: WeakGreedyParams
    width_methods: list
    theorem: bool = True
    K_max: int = 6
    N_max: int | None = None
    corollaries: list = field(default_factory=list)
    rate: RateParams | None = None
    seed: int | None = None
    out: str | None = None
    grid: int = 64
    raw: dict = field(default_factory=dict)

    @property
    def randomized(self) -> bool:
        if self.set_kind == "frommatrix":
            return "matrix" not in self.set_options
        return self.set_kind in RANDOM_KINDS

    def set_spec(self):
        """The declarative set description, with matrices drawn from the seed stream."""
        o = self.set_options
        k = self.set_kind
        if k == "diagonal":
            return Diagonal(tuple(diagonal_values(o)))
        if k == "dyadic":
            return DyadicBlocks(float(o["alpha"]), int(o["levels"]))
        if k == "randomball":
            return RandomBall(int(o["dim"]), int(o["count"]), int(self.seed))
        if k == "parametric":
            lo = float(o.get("mu_min", -1.0))
            hi = float(o.get("mu_max", 1.0))
            return ParametricSurrogate(int(o["dim"]), int(o["count"]), (lo, hi))
        if k == "frommatrix":
            g = float(o.get("gamma", 1.0))
            if "matrix" in o:
                # rows separated by ';'
                A = np.array([_floats(row) for row in o["matrix"].split(";")])
                s = np.array(_floats(o["sigmas"])) if "sigmas" in o else tight_sigmas(A)
            else:
                rng = named_rng(int(self.seed), "sets.from_matrix")
                A, s = random_p1p2_matrix(int(o["K"]), g, rng, decay=float(o.get("decay", 0.8)),
                                          fill=float(o.get("fill", 0.9)))
            # rows must sit in the unit ball of the target norm; scaling keeps P1/P2
            scale = max(1.0, max(norm(r, self.norm_kind) for r in A))
            return FromMatrix(A / scale, s / scale, g)
        raise ConfigError(f"unknown set kind {k!r}")


def diagonal_values(o: dict) -> np.ndarray:
    rule = o.get("rule", "values")
    if rule == "values":
        if "values" not in o:
            raise ConfigError("[set] rule=values needs 'values'")
        return np.array(_floats(o["values"]))
    count = int(o["count"])
    j = np.arange(count, dtype=float)
    if rule == "geometric":
        return float(eval_number(o.get("ratio", "0.5"))) ** j
    C0 = float(eval_number(o.get("C0", "1")))
    alpha = float(eval_number(o.get("alpha", "1")))
    if rule == "power":
        return C0 * (j + 1) ** -alpha
    if rule == "exp":
        c0 = float(eval_number(o.get("c0", "1")))
        return C0 * np.exp(-c0 * j ** alpha)
    raise ConfigError(f"unknown diagonal rule {rule!r}")


def apply_override(cp: configparser.ConfigParser, text: str):
    """Apply ``section.key=value``."""
    if "=" not in text or "." not in text.split("=", 1)[0]:
        raise ConfigError(f"override must look like section.key=value, got {text!r}")
    lhs, value = text.split("=", 1)
    section, key = lhs.strip().split(".", 1)
    if not cp.has_section(section):
        cp.add_section(section)
    cp.set(section, key.strip(), value.strip())


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "yes", "true", "on"):
        return True
    if t in ("0", "no", "false", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_config(cp: configparser.ConfigParser, name: str = "config",
                 seed: int | None = None) -> ExperimentConfig:
    for sec in ("set", "norm", "greedy"):
        if not cp.has_section(sec):
            raise ConfigError(f"missing section [{sec}]")
    try:
        s = dict(cp["set"])
        kind = s.pop("kind", None)
        if kind not in SET_KINDS:
            raise ConfigError(f"[set] kind must be one of {SET_KINDS}")
        nk = NormKind.parse(cp["norm"].get("kind", "hilbert"))
        g = cp["greedy"]
        n_max = g.get("n_max")
        policy = g.get("policy", "argmax")
        if policy not in POLICIES:
            raise ConfigError(f"[greedy] policy must be one of {POLICIES}")
        params = WeakGreedyParams(
            gamma=eval_number(g.get("gamma", "1")),
            n_max=None if n_max in (None, "", "none") else int(n_max),
            policy=policy,
            termination_eps=eval_number(g.get("termination_eps", "1e-13")),
            mode=g.get("mode", "auto"),
            tol=eval_number(g.get("tol", "1e-9")),
        )
        w = cp["widths"] if cp.has_section("widths") else {}
        methods = [m.strip() for m in w.get("methods", "known, svd, greedy").split(",") if m.strip()]
        b = cp["bounds"] if cp.has_section("bounds") else {}
        corollaries = [c.strip() for c in b.get("corollaries", "").split(",") if c.strip()]
        for c in corollaries:
            if c not in COROLLARIES:
                raise ConfigError(f"unknown corollary {c!r}")
        rate = None
        rk = b.get("rate", "none")
        if rk != "none":
            beta = b.get("beta")
            c1p = b.get("c1_prime")
            rate = RateParams(
                alpha=eval_number(b.get("alpha", "1")),
                C0=eval_number(b.get("C0", "1")),
                c0=eval_number(b.get("c0", "1")),
                gamma=params.gamma,
                beta=None if beta is None else eval_number(beta),
                kind=rk,
                c1_scale=eval_number(b.get("c1_scale", "1")),
                c1_prime=None if c1p is None else eval_number(c1p),
            )
        r = cp["run"] if cp.has_section("run") else {}
        if seed is None and "seed" in r:
            seed = int(r["seed"])
        N_max = b.get("N_max")
        cfg = ExperimentConfig(
            name=name,
            set_kind=kind,
            set_options=s,
            norm_kind=nk,
            greedy=params,
            width_methods=methods,
            theorem=_bool(b.get("theorem", "yes")),
            K_max=int(b.get("K_max", "6")),
            N_max=None if N_max is None else int(N_max),
            corollaries=corollaries,
            rate=rate,
            seed=seed,
            out=r.get("out"),
            grid=int(w.get("grid", "64")),
            raw={sec: dict(cp[sec]) for sec in cp.sections()},
        )
    except ConfigError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid config {name}: {exc}") from exc
    if cfg.randomized and cfg.seed is None:
        raise ConfigError("a seed is required for randomized sets ([run] seed or --seed)")
    if cfg.rate is not None and not math.isfinite(cfg.rate.C1_hilbert):
        raise ConfigError("rate constants overflow")
    return cfg


def load_config(name_or_path, overrides=(), seed: int | None = None) -> ExperimentConfig:
    path = resolve_config_path(name_or_path)
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keep C0 / K case
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    for o in overrides:
        apply_override(cp, o)
    return parse_config(cp, name=path.stem, seed=seed)
