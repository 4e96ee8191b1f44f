"""Flat experiment configuration files.

The format is one ``section.key = value`` assignment per line, with ``#``
comments and blank lines ignored.  Sections are ``problem`` (label plus
scalar parameter overrides), ``sweep``, ``solver`` and ``run``.  Every
value is a scalar, a label, or a whitespace-separated list of numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .lab import SweepPlan
from .model import ProblemSpec
from .problems import DEFAULTS, build_problem
from .solver import SolverConfig

_SWEEP_KEYS = {
    "levels", "epsilons", "coupling", "diagonal_c", "diagonal_p",
    "reference", "reference_level", "reference_eps",
}
_SOLVER_KEYS = {
    "newton_tol", "newton_max_iter", "fixedpoint_tol", "fixedpoint_max_iter",
    "line_search", "contraction_factor", "min_step",
}
_RUN_KEYS = {"output_dir", "workers", "seed"}


@dataclass
class ExperimentConfig:
    label: str
    problem_overrides: dict = field(default_factory=dict)
    levels: tuple[int, ...] = (0, 1, 2, 3)
    epsilons: tuple[float, ...] = ()
    coupling: str = "diagonal"
    diagonal_c: float = 1.0
    diagonal_p: float = 1.0
    reference: str = "constrained_oracle"
    reference_level: int | None = None
    reference_eps: float = 1e-10
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_dir: str = "out"
    workers: int = 1
    seed: int = 0

    def problem(self) -> ProblemSpec:
        return build_problem(self.label, self.problem_overrides)

    def plan(self) -> SweepPlan:
        try:
            return SweepPlan(
                refinement_levels=self.levels,
                epsilons=self.epsilons,
                coupling=self.coupling,
                diagonal_c=self.diagonal_c,
                diagonal_p=self.diagonal_p,
                reference=self.reference,
                reference_level=self.reference_level,
                reference_epsilon=self.reference_eps,
            )
        except Exception as exc:
            raise ConfigError(f"invalid sweep section: {exc}")


def _num(field_name: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"field {field_name!r}: {raw!r} is not a number")


def _intval(field_name: str, raw: str) -> int:
    val = _num(field_name, raw)
    if val != int(val):
        raise ConfigError(f"field {field_name!r}: expected an integer, got {raw!r}")
    return int(val)


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")

    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'section.key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if "." not in key:
            raise ConfigError(f"{path}:{lineno}: field {key!r} misses its section")
        entries[key] = value

    label = entries.pop("problem.label", None)
    if label is None:
        raise ConfigError("field 'problem.label' is required")
    if label not in DEFAULTS:
        raise ConfigError(f"field 'problem.label': unknown label {label!r}")

    cfg = ExperimentConfig(label=label)
    for key, value in entries.items():
        section, name = key.split(".", 1)
        if section == "problem":
            if name not in DEFAULTS[label]:
                raise ConfigError(f"field {key!r} is not a parameter of {label}")
            cfg.problem_overrides[name] = _num(key, value)
        elif section == "sweep":
            if name not in _SWEEP_KEYS:
                raise ConfigError(f"unknown field {key!r}")
            if name == "levels":
                cfg.levels = tuple(_intval(key, v) for v in value.split())
            elif name == "epsilons":
                cfg.epsilons = tuple(_num(key, v) for v in value.split())
            elif name in ("coupling", "reference"):
                setattr(cfg, name, value)
            elif name == "reference_level":
                cfg.reference_level = _intval(key, value)
            elif name == "reference_eps":
                cfg.reference_eps = _num(key, value)
            else:
                setattr(cfg, name, _num(key, value))
        elif section == "solver":
            if name not in _SOLVER_KEYS:
                raise ConfigError(f"unknown field {key!r}")
            kwargs = {
                "newton_tol": cfg.solver.newton_tol,
                "newton_max_iter": cfg.solver.newton_max_iter,
                "fixedpoint_tol": cfg.solver.fixedpoint_tol,
                "fixedpoint_max_iter": cfg.solver.fixedpoint_max_iter,
                "line_search": cfg.solver.line_search,
                "contraction_factor": cfg.solver.contraction_factor,
                "min_step": cfg.solver.min_step,
            }
            if name in ("newton_max_iter", "fixedpoint_max_iter"):
                kwargs[name] = _intval(key, value)
            elif name == "line_search":
                kwargs[name] = value
            else:
                kwargs[name] = _num(key, value)
            try:
                cfg.solver = SolverConfig(**kwargs)
            except Exception as exc:
                raise ConfigError(f"field {key!r}: {exc}")
        elif section == "run":
            if name not in _RUN_KEYS:
                raise ConfigError(f"unknown field {key!r}")
            if name == "output_dir":
                cfg.output_dir = value
            elif name == "workers":
                cfg.workers = _intval(key, value)
                if cfg.workers < 1:
                    raise ConfigError("field 'run.workers' must be at least 1")
            else:
                cfg.seed = _intval(key, value)
        else:
            raise ConfigError(f"unknown section {section!r} in field {key!r}")

    try:
        cfg.problem()
        cfg.plan()
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(str(exc))
    return cfg
