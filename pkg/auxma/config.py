"""Experiment configuration: a YAML document resolved into a frozen :class:`ExperimentConfig`.

Schema::

    experiment: linfty            # one of ExperimentName
    n: 2                          # complex dimension
    N: 16                         # nodes per real axis (even)
    operator: {kind: hessian, k: 2}
    density: {recipe: random, amplitude: 0.3, seed: 7, modes: 2}
    tolerances: {residual: 1.0e-10, phi: 1.0e-6}
    params: {}                    # experiment-specific
    output: runs/linfty           # optional

``operator.k`` and ``operator.p`` are the degree of the Hessian and p-MA
operators. The output directory is taken from ``--out``, then
``AUXMA_OUT_DIR``, then ``output`` (see :meth:`ExperimentConfig.resolved`).
"""

from dataclasses import dataclass, field, replace
from os import environ
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import yaml

from .constants import PHI_TOL, RESIDUAL_TOL, DensityRecipe, ExperimentName, OperatorKind
from .errors import ConfigError

__all__ = (
    "OperatorConfig",
    "DensityConfig",
    "Tolerances",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "OUT_DIR_ENV",
)

OUT_DIR_ENV = "AUXMA_OUT_DIR"
DEFAULT_OUT_DIR = "auxma-out"

_TOP_LEVEL = {"experiment", "n", "N", "operator", "density", "tolerances", "params", "output"}


@dataclass(frozen=True)
class OperatorConfig:
    kind: OperatorKind = OperatorKind.MONGE_AMPERE
    degree: Optional[int] = None

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "degree": self.degree}


@dataclass(frozen=True)
class DensityConfig:
    recipe: DensityRecipe = DensityRecipe.ZERO
    amplitude: float = 0.0
    seed: int = 0
    modes: int = 2

    def to_json(self) -> dict:
        return {"recipe": self.recipe.value, "amplitude": self.amplitude, "seed": self.seed, "modes": self.modes}


@dataclass(frozen=True)
class Tolerances:
    residual: float = RESIDUAL_TOL
    phi: float = PHI_TOL

    def to_json(self) -> dict:
        return {"residual": self.residual, "phi": self.phi}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: ExperimentName
    n: int
    N: int
    operator: OperatorConfig = field(default_factory=OperatorConfig)
    density: DensityConfig = field(default_factory=DensityConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)
    params: Mapping[str, Any] = field(default_factory=dict)
    output: Optional[str] = None

    def param(self, name: str, default: Any = None) -> Any:
        return self.params.get(name, default)

    def with_overrides(self, seed: Optional[int] = None, output: Optional[Union[str, Path]] = None) -> "ExperimentConfig":
        config = self
        if seed is not None:
            if seed < 0:
                raise ConfigError("seed", f"must be a nonnegative integer, got {seed}")
            config = replace(config, density=replace(config.density, seed=int(seed)))
        if output is not None:
            config = replace(config, output=str(output))
        return config

    def output_dir(self) -> Path:
        """``output`` when set, else ``$AUXMA_OUT_DIR/<experiment>``."""

        if self.output is not None:
            return Path(self.output)
        return Path(environ.get(OUT_DIR_ENV, DEFAULT_OUT_DIR)) / self.experiment.value

    def resolved(self, seed: Optional[int] = None, out: Optional[Union[str, Path]] = None) -> "ExperimentConfig":
        """Apply command line overrides and pin the output directory.

        ``out`` beats ``AUXMA_OUT_DIR``, which beats the file's ``output``.
        """

        if out is None and OUT_DIR_ENV in environ:
            out = Path(environ[OUT_DIR_ENV]) / self.experiment.value
        config = self.with_overrides(seed=seed, output=out)
        return config.with_overrides(output=config.output_dir())

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment.value,
            "n": self.n,
            "N": self.N,
            "operator": self.operator.to_json(),
            "density": self.density.to_json(),
            "tolerances": self.tolerances.to_json(),
            "params": dict(self.params),
            "output": self.output,
        }


def _key_lines(node: Optional[yaml.Node], prefix: str = "") -> Dict[str, int]:
    """1-based line of every mapping key, dotted for nested mappings."""

    lines: Dict[str, int] = {}
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            name = f"{prefix}{key.value}"
            lines[name] = key.start_mark.line + 1
            lines.update(_key_lines(value, f"{name}."))
    return lines


class _Reader:
    def __init__(self, lines: Dict[str, int]) -> None:
        self.lines = lines

    def error(self, name: str, message: str) -> ConfigError:
        line = self.lines.get(name)
        while line is None and "." in name:
            name = name.rsplit(".", 1)[0]
            line = self.lines.get(name)
        return ConfigError(name, message, line)

    def mapping(self, value: Any, name: str) -> Mapping[str, Any]:
        if value is None:
            return {}
        if not isinstance(value, Mapping):
            raise self.error(name, f"must be a mapping, got {type(value).__name__}")
        return value

    def integer(self, value: Any, name: str, minimum: int) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.error(name, f"must be an integer, got {value!r}")
        if value < minimum:
            raise self.error(name, f"must be at least {minimum}, got {value}")
        return value

    def number(self, value: Any, name: str, positive: bool = False) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(name, f"must be a number, got {value!r}")
        if positive and not value > 0:
            raise self.error(name, f"must be positive, got {value}")
        return float(value)

    def choice(self, value: Any, name: str, enum):
        try:
            return enum(value)
        except ValueError:
            options = ", ".join(member.value for member in enum)
            raise self.error(name, f"must be one of {options}, got {value!r}") from None


def _operator(reader: _Reader, raw: Mapping[str, Any]) -> OperatorConfig:
    kind = reader.choice(raw.get("kind", OperatorKind.MONGE_AMPERE.value), "operator.kind", OperatorKind)
    degree = None
    for key in ("k", "p", "degree"):
        if key in raw:
            degree = reader.integer(raw[key], f"operator.{key}", 1)
    if kind is not OperatorKind.MONGE_AMPERE and degree is None:
        raise reader.error("operator", f"{kind.value} needs a degree (k or p)")
    return OperatorConfig(kind=kind, degree=degree)


def _density(reader: _Reader, raw: Mapping[str, Any]) -> DensityConfig:
    return DensityConfig(
        recipe=reader.choice(raw.get("recipe", DensityRecipe.ZERO.value), "density.recipe", DensityRecipe),
        amplitude=reader.number(raw.get("amplitude", 0.0), "density.amplitude"),
        seed=reader.integer(raw.get("seed", 0), "density.seed", 0),
        modes=reader.integer(raw.get("modes", 2), "density.modes", 1),
    )


def _tolerances(reader: _Reader, raw: Mapping[str, Any]) -> Tolerances:
    return Tolerances(
        residual=reader.number(raw.get("residual", RESIDUAL_TOL), "tolerances.residual", positive=True),
        phi=reader.number(raw.get("phi", PHI_TOL), "tolerances.phi", positive=True),
    )


def parse_config(text: str, experiment: Optional[Union[str, ExperimentName]] = None) -> ExperimentConfig:
    """Parse and validate a YAML configuration.

    ``experiment`` (the CLI subcommand) fills in a missing ``experiment`` key
    and must agree with it when both are given.

    :raises ConfigError: naming the offending field and, when known, its line.
    """

    try:
        raw = yaml.safe_load(text)
        lines = _key_lines(yaml.compose(text))
    except yaml.YAMLError as error:
        mark = getattr(error, "problem_mark", None)
        raise ConfigError("yaml", str(error).replace("\n", " "), mark.line + 1 if mark else None) from error

    reader = _Reader(lines)
    raw = reader.mapping(raw, "config")
    unknown = sorted(set(raw) - _TOP_LEVEL)
    if unknown:
        raise reader.error(unknown[0], "unknown configuration key")

    name = raw.get("experiment", experiment.value if isinstance(experiment, ExperimentName) else experiment)
    if name is None:
        raise ConfigError("experiment", "missing; set it in the file or pick a subcommand")
    chosen = reader.choice(name, "experiment", ExperimentName)
    if experiment is not None:
        requested = reader.choice(experiment, "experiment", ExperimentName)
        if requested is not chosen:
            raise reader.error("experiment", f"config is for {chosen.value!r}, not {requested.value!r}")

    if "n" not in raw or "N" not in raw:
        raise ConfigError("n" if "n" not in raw else "N", "missing")
    n = reader.integer(raw["n"], "n", 1)
    N = reader.integer(raw["N"], "N", 4)
    if N % 2:
        raise reader.error("N", f"must be even, got {N}")

    operator = _operator(reader, reader.mapping(raw.get("operator"), "operator"))
    if operator.degree is not None and operator.degree > n:
        raise reader.error("operator", f"degree {operator.degree} exceeds n = {n}")
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        raise reader.error("output", "must be a path string")

    return ExperimentConfig(
        experiment=chosen,
        n=n,
        N=N,
        operator=operator,
        density=_density(reader, reader.mapping(raw.get("density"), "density")),
        tolerances=_tolerances(reader, reader.mapping(raw.get("tolerances"), "tolerances")),
        params=dict(reader.mapping(raw.get("params"), "params")),
        output=output,
    )


def load_config(path: Union[str, Path], experiment: Optional[Union[str, ExperimentName]] = None) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigError("config", f"cannot read {path}: {error.strerror}") from error
    return parse_config(text, experiment)
