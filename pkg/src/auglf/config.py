"""INI scenario descriptions for the command line.

A scenario file has a ``[grid]`` section, a ``[source]`` section, one or
more numbered ``[stage.N]`` sections (N starting at 1, contiguous), and
optional ``[output]`` and ``[numerics]`` sections.  Every key is validated;
unknown sections or keys are rejected so typos fail loudly instead of
silently running with defaults.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass
from typing import Union

from .core import InvalidConfigurationError, PhaseSpaceGrid, make_grid
from .elements import (
    AmplitudeGrating,
    CubicPhase,
    Hologram,
    Lens,
    PhaseGrating,
    Pinhole,
    Prism,
    RectAperture,
    TwoPinholes,
)
from .scenarios import (
    Element,
    OpticalTrain,
    PlaneWave,
    PointSource,
    Propagate,
    TraceOptions,
)
from .wdf import WdfOptions


class ConfigError(InvalidConfigurationError):
    """A scenario file failed to parse or validate."""


_REQUIRED = object()

_GRID_KEYS = {
    "x_samples": int,
    "x_extent": float,
    "theta_samples": int,
    "theta_extent": float,
    "wavelength": float,
}

# kind -> (constructor, {key: (type, default-or-required)})
_SOURCE_SCHEMAS = {
    "plane_wave": (PlaneWave, {"angle": (float, 0.0)}),
    "point": (PointSource, {"position": (float, 0.0)}),
}

_ELEMENT_SCHEMAS = {
    "pinhole": (Pinhole, {"position": (float, 0.0)}),
    "two_pinholes": (TwoPinholes, {"a": (float, _REQUIRED), "b": (float, _REQUIRED)}),
    "rect_aperture": (RectAperture, {"width": (float, _REQUIRED)}),
    "amplitude_grating": (
        AmplitudeGrating,
        {"modulation": (float, _REQUIRED), "period": (float, _REQUIRED)},
    ),
    "prism": (Prism, {"phase_slope": (float, _REQUIRED)}),
    "lens": (Lens, {"focal_length": (float, _REQUIRED)}),
    "cubic_phase": (CubicPhase, {"coefficient": (float, _REQUIRED)}),
    "phase_grating": (
        PhaseGrating,
        {"depth": (float, _REQUIRED), "period": (float, _REQUIRED)},
    ),
    "hologram": (
        Hologram,
        {"source_distance": (float, _REQUIRED), "include_oscillatory": (bool, True)},
    ),
}

_OUTPUT_KEYS = {
    "snapshots": (bool, False),
    "tables": (bool, True),
    "heatmaps": (bool, True),
    "observation": (str, "intensity"),
}

_NUMERICS_KEYS = {
    "interp": (str, "linear"),
    "oracle_pad": (int, 2),
    "match_etendue": (bool, True),
    "abort_loss": (float, 0.9),
    "oversample": (int, 1),
    "window": (str, "none"),
}

_BOOL_STATES = {
    "1": True, "yes": True, "true": True, "on": True,
    "0": False, "no": False, "false": False, "off": False,
}


@dataclass(frozen=True)
class OutputOptions:
    snapshots: bool = False
    tables: bool = True
    heatmaps: bool = True
    observation: str = "intensity"


@dataclass(frozen=True)
class ScenarioConfig:
    """A parsed, fully validated scenario description."""

    x_samples: int
    x_extent: float
    theta_samples: int
    theta_extent: float
    wavelength: float
    source: Union[PlaneWave, PointSource]
    stages: tuple
    output: OutputOptions
    numerics: dict

    def grid(self, grid_scale: int = 1) -> PhaseSpaceGrid:
        return make_grid(
            self.x_samples * grid_scale,
            self.x_extent,
            self.theta_samples * grid_scale,
            self.theta_extent,
            self.wavelength,
        )

    def train(self, grid_scale: int = 1) -> OpticalTrain:
        return OpticalTrain(
            self.grid(grid_scale),
            self.source,
            self.stages,
            observation=self.output.observation,
        )

    def trace_options(self, compare_oracle: bool = True) -> TraceOptions:
        n = self.numerics
        return TraceOptions(
            interp=n["interp"],
            oracle_pad=n["oracle_pad"],
            match_etendue=n["match_etendue"],
            abort_loss=n["abort_loss"],
            compare_oracle=compare_oracle,
            wdf_options=WdfOptions(
                oversample_factor=n["oversample"], window=n["window"]
            ),
        )

    def echo(self, grid_scale: int = 1) -> dict:
        """Flat string map of every resolved setting, defaults included."""
        out = {
            "grid.x_samples": str(self.x_samples * grid_scale),
            "grid.x_extent": _fmt(self.x_extent),
            "grid.theta_samples": str(self.theta_samples * grid_scale),
            "grid.theta_extent": _fmt(self.theta_extent),
            "grid.wavelength": _fmt(self.wavelength),
            "grid.scale": str(grid_scale),
        }
        kind = "plane_wave" if isinstance(self.source, PlaneWave) else "point"
        out["source.kind"] = kind
        for f in dataclasses.fields(self.source):
            out[f"source.{f.name}"] = _fmt(getattr(self.source, f.name))
        for k, stage in enumerate(self.stages, start=1):
            prefix = f"stage.{k}"
            if isinstance(stage, Propagate):
                out[f"{prefix}.kind"] = "propagate"
                out[f"{prefix}.distance"] = _fmt(stage.distance)
            else:
                out[f"{prefix}.kind"] = "element"
                name = type(stage.spec).__name__
                label = next(
                    key for key, (cls, _) in _ELEMENT_SCHEMAS.items()
                    if cls.__name__ == name
                )
                out[f"{prefix}.element"] = label
                for f in dataclasses.fields(stage.spec):
                    out[f"{prefix}.{f.name}"] = _fmt(getattr(stage.spec, f.name))
        for f in dataclasses.fields(self.output):
            out[f"output.{f.name}"] = _fmt(getattr(self.output, f.name))
        for key, value in self.numerics.items():
            out[f"numerics.{key}"] = _fmt(value)
        return out


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _convert(raw: str, typ, where: str):
    raw = raw.strip()
    try:
        if typ is bool:
            state = _BOOL_STATES.get(raw.lower())
            if state is None:
                raise ValueError(raw)
            return state
        if typ is int:
            return int(raw)
        if typ is float:
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(
            f"{where}: cannot read {raw!r} as {typ.__name__}"
        ) from None


def _read_section(parser, section: str, schema: dict) -> dict:
    values = {}
    present = dict(parser.items(section)) if parser.has_section(section) else {}
    unknown = set(present) - set(schema)
    if unknown:
        raise ConfigError(
            f"[{section}]: unknown key(s) {', '.join(sorted(unknown))}"
        )
    for key, (typ, default) in schema.items():
        if key in present:
            values[key] = _convert(present[key], typ, f"[{section}] {key}")
        elif default is _REQUIRED:
            raise ConfigError(f"[{section}]: missing required key {key}")
        else:
            values[key] = default
    return values


def _read_spec_section(parser, section: str, kind_key: str, schemas: dict, noun: str):
    present = dict(parser.items(section))
    if kind_key not in present:
        raise ConfigError(f"[{section}]: missing required key {kind_key}")
    kind = present.pop(kind_key).strip()
    if kind not in schemas:
        raise ConfigError(
            f"[{section}]: unknown {noun} {kind!r}; expected one of "
            f"{', '.join(sorted(schemas))}"
        )
    cls, schema = schemas[kind]
    unknown = set(present) - set(schema)
    if unknown:
        raise ConfigError(
            f"[{section}]: unknown key(s) for {noun} {kind}: "
            f"{', '.join(sorted(unknown))}"
        )
    kwargs = {}
    for key, (typ, default) in schema.items():
        if key in present:
            kwargs[key] = _convert(present[key], typ, f"[{section}] {key}")
        elif default is _REQUIRED:
            raise ConfigError(f"[{section}]: missing required key {key}")
        else:
            kwargs[key] = default
    try:
        return cls(**kwargs)
    except InvalidConfigurationError as exc:
        raise ConfigError(f"[{section}]: {exc}") from None


def parse_config(path: str) -> ScenarioConfig:
    """Read and validate a scenario file.

    Raises ConfigError (a flavour of invalid-configuration error) on any
    syntax or schema problem; parse errors include the offending line.
    """
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    try:
        with open(path, "r", encoding="utf-8") as handle:
            parser.read_file(handle, source=path)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from None
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None

    sections = set(parser.sections())
    stage_numbers = {}
    known = {"grid", "source", "output", "numerics"}
    for name in sections:
        if name in known:
            continue
        if name.startswith("stage."):
            suffix = name[len("stage."):]
            if not suffix.isdigit() or int(suffix) < 1:
                raise ConfigError(
                    f"[{name}]: stage sections are numbered from 1 (stage.1, stage.2, ...)"
                )
            stage_numbers[int(suffix)] = name
            continue
        raise ConfigError(f"unknown section [{name}]")

    for required in ("grid", "source"):
        if required not in sections:
            raise ConfigError(f"missing required section [{required}]")
    if not stage_numbers:
        raise ConfigError("scenario has no [stage.N] sections")
    expected = set(range(1, len(stage_numbers) + 1))
    if set(stage_numbers) != expected:
        raise ConfigError(
            "stage numbers must be contiguous from 1, got "
            f"{sorted(stage_numbers)}"
        )

    grid_schema = {key: (typ, _REQUIRED) for key, typ in _GRID_KEYS.items()}
    grid_values = _read_section(parser, "grid", grid_schema)

    source = _read_spec_section(parser, "source", "kind", _SOURCE_SCHEMAS, "source")

    stages = []
    for n in sorted(stage_numbers):
        section = stage_numbers[n]
        kind = parser.get(section, "kind", fallback=None)
        if kind is None:
            raise ConfigError(f"[{section}]: missing required key kind")
        kind = kind.strip()
        if kind == "propagate":
            values = _read_section(
                parser, section, {"kind": (str, _REQUIRED), "distance": (float, _REQUIRED)}
            )
            try:
                stages.append(Propagate(values["distance"]))
            except InvalidConfigurationError as exc:
                raise ConfigError(f"[{section}]: {exc}") from None
        elif kind == "element":
            present = dict(parser.items(section))
            present.pop("kind")
            sub = configparser.ConfigParser(interpolation=None)
            sub.add_section(section)
            for key, val in present.items():
                sub.set(section, key, val)
            spec = _read_spec_section(sub, section, "element", _ELEMENT_SCHEMAS, "element")
            stages.append(Element(spec))
        else:
            raise ConfigError(
                f"[{section}]: kind must be propagate or element, got {kind!r}"
            )

    output_values = _read_section(parser, "output", _OUTPUT_KEYS)
    if output_values["observation"] not in ("intensity", "full-phase-space"):
        raise ConfigError(
            "[output]: observation must be intensity or full-phase-space, "
            f"got {output_values['observation']!r}"
        )
    numerics = _read_section(parser, "numerics", _NUMERICS_KEYS)
    if numerics["interp"] not in ("bandlimited", "linear"):
        raise ConfigError(
            f"[numerics]: interp must be bandlimited or linear, got {numerics['interp']!r}"
        )
    if numerics["window"] not in ("none", "raised-cosine"):
        raise ConfigError(
            f"[numerics]: window must be none or raised-cosine, got {numerics['window']!r}"
        )
    if numerics["oversample"] not in (1, 2, 4):
        raise ConfigError(
            f"[numerics]: oversample must be 1, 2 or 4, got {numerics['oversample']}"
        )
    if numerics["oracle_pad"] < 1:
        raise ConfigError(
            f"[numerics]: oracle_pad must be a positive integer, got {numerics['oracle_pad']}"
        )
    if not (0.0 < numerics["abort_loss"] <= 1.0):
        raise ConfigError(
            f"[numerics]: abort_loss must lie in (0, 1], got {numerics['abort_loss']}"
        )

    try:
        cfg = ScenarioConfig(
            x_samples=grid_values["x_samples"],
            x_extent=grid_values["x_extent"],
            theta_samples=grid_values["theta_samples"],
            theta_extent=grid_values["theta_extent"],
            wavelength=grid_values["wavelength"],
            source=source,
            stages=tuple(stages),
            output=OutputOptions(**output_values),
            numerics=numerics,
        )
        cfg.grid()
    except InvalidConfigurationError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    return cfg
