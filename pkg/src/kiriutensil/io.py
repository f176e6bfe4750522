"""Configuration documents and CSV formats.

Configuration is one JSON document::

    {
      "units": {"length": "mm", "force": "N", "pressure": "MPa"},
      "geometry": {"applied_moment_arm": 69.6, "kirigami_hypotenuse": 59.2,
                   "band_hypotenuse": 22.5, "kirigami_offset": 20.7,
                   "band_offset": 7.8},
      "spring": {"stiffness_factor": 4.55},
      "material": {"youngs_modulus": 14.9, "shore_label": null},
      "band": {"stiffness": 2.18, "present": true}
    }

``{"preset": "table1", "units": {...}}`` loads the reference constants;
any section given next to a preset overrides it field by field. Units other
than mm/N/MPa are rejected, never converted.

Measurement CSVs have the header ``delta_x_mm,force_n,trial_id`` with
optional ``e_mpa`` and ``size_scale`` columns. Lines starting with ``#`` are
comments; ``# key=value`` comments carry file-level metadata (``source``,
``label``, ``shore_label``, ``n_trials``). ``# source=simulated`` marks
model-generated data.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigError, CSVFormatError
from .identification import MeasurementSeries
from .statics import (
    TABLE1_BAND,
    TABLE1_GEOMETRY,
    TABLE1_MATERIAL,
    TABLE1_SPRING,
    BandSpec,
    KirigamiSpringModel,
    MaterialSpec,
    UtensilGeometry,
)

UNITS = {"length": "mm", "force": "N", "pressure": "MPa"}

SIMULATE_HEADER = ("delta_x_mm", "delta_y_mm", "f_k_n", "f_b_n", "f_a_n", "torque_nmm")
MEASUREMENT_COLUMNS = ("delta_x_mm", "force_n", "trial_id")
MEASUREMENT_OPTIONAL = ("e_mpa", "size_scale")
SIMULATED_MARKER = "# source=simulated"


def fmt(value: float) -> str:
    """Fixed 9-decimal rendering used by every table the CLI prints.

    Python's ``format`` ignores the process locale, so the separator is
    always ``.``. Negative zero prints as zero.
    """
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    text = format(float(value), ".9f")
    return "0.000000000" if text == "-0.000000000" else text


@dataclass(frozen=True)
class ToolConfig:
    geometry: UtensilGeometry
    spring: KirigamiSpringModel
    material: MaterialSpec
    band: BandSpec

    @classmethod
    def table1(cls) -> ToolConfig:
        return cls(TABLE1_GEOMETRY, TABLE1_SPRING, TABLE1_MATERIAL, TABLE1_BAND)

    def without_band(self) -> ToolConfig:
        return replace(self, band=BandSpec.absent())

    def to_dict(self) -> dict:
        g = self.geometry
        return {
            "units": dict(UNITS),
            "geometry": {
                "applied_moment_arm": g.applied_moment_arm,
                "kirigami_hypotenuse": g.kirigami_hypotenuse,
                "band_hypotenuse": g.band_hypotenuse,
                "kirigami_offset": g.kirigami_offset,
                "band_offset": g.band_offset,
            },
            "spring": {"stiffness_factor": self.spring.stiffness_factor},
            "material": {
                "youngs_modulus": self.material.youngs_modulus,
                "shore_label": self.material.shore_label,
            },
            "band": {"stiffness": self.band.stiffness, "present": self.band.present},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


PRESETS = {"table1": ToolConfig.table1}

_SECTIONS = {
    "geometry": ("applied_moment_arm", "kirigami_hypotenuse", "band_hypotenuse",
                 "kirigami_offset", "band_offset"),
    "spring": ("stiffness_factor",),
    "material": ("youngs_modulus", "shore_label"),
    "band": ("stiffness", "present"),
}


def _check_units(units):
    if not isinstance(units, dict):
        raise ConfigError("configuration needs a 'units' block")
    for key, expected in UNITS.items():
        if units.get(key) != expected:
            raise ConfigError(
                f"unit '{key}' must be '{expected}', got {units.get(key)!r}; "
                "unit conversion is not supported"
            )
    extra = set(units) - set(UNITS)
    if extra:
        raise ConfigError(f"unknown unit keys: {sorted(extra)}")


def config_from_dict(doc: dict) -> ToolConfig:
    """Build and validate a :class:`ToolConfig` from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(doc) - {"units", "preset", *_SECTIONS}
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    _check_units(doc.get("units"))

    preset = doc.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        base = PRESETS[preset]().to_dict()
    else:
        missing = [s for s in _SECTIONS if s not in doc]
        if missing:
            raise ConfigError(f"missing configuration sections: {missing}")
        base = {s: {} for s in _SECTIONS}

    merged = {}
    for section, keys in _SECTIONS.items():
        given = doc.get(section, {})
        if not isinstance(given, dict):
            raise ConfigError(f"section '{section}' must be an object")
        bad = set(given) - set(keys)
        if bad:
            raise ConfigError(f"unknown keys in '{section}': {sorted(bad)}")
        merged[section] = {**base.get(section, {}), **given}

    try:
        band = merged["band"]
        return ToolConfig(
            geometry=UtensilGeometry(**merged["geometry"]),
            spring=KirigamiSpringModel(**merged["spring"]),
            material=MaterialSpec(**merged["material"]),
            band=BandSpec(band.get("stiffness", 0.0), bool(band.get("present", True))),
        )
    except TypeError as exc:
        raise ConfigError(f"incomplete configuration: {exc}") from exc


def load_config(path) -> ToolConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return config_from_dict(doc)


# -- measurement CSV ---------------------------------------------------------

def _parse_float(text, name, line):
    try:
        value = float(text)
    except ValueError:
        raise CSVFormatError(f"{name} is not a number: {text!r}", line) from None
    if not math.isfinite(value):
        raise CSVFormatError(f"{name} is not finite: {text!r}", line)
    return value


def parse_measurements(text: str, label: str = "") -> list[MeasurementSeries]:
    """Parse a measurement CSV into one series per ``(trial_id, e_mpa, size_scale)``.

    Series come back in order of first appearance. Metadata comments apply
    to every series in the file.
    """
    meta: dict[str, str] = {}
    header = None
    header_line = None
    groups: dict[tuple, list] = {}
    rows_lines: dict[tuple, list] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        cells = next(csv.reader([line]))
        cells = [c.strip() for c in cells]
        if header is None:
            header, header_line = cells, lineno
            if tuple(header[:3]) != MEASUREMENT_COLUMNS:
                raise CSVFormatError(
                    "missing or invalid header; expected "
                    f"{','.join(MEASUREMENT_COLUMNS)}[,e_mpa,size_scale]",
                    lineno,
                )
            extra = header[3:]
            if len(set(extra)) != len(extra) or not set(extra) <= set(MEASUREMENT_OPTIONAL):
                raise CSVFormatError(f"unexpected columns {extra}", lineno)
            continue
        if len(cells) != len(header):
            raise CSVFormatError(
                f"expected {len(header)} fields, got {len(cells)}", lineno
            )
        rec = dict(zip(header, cells))
        x = _parse_float(rec["delta_x_mm"], "delta_x_mm", lineno)
        f = _parse_float(rec["force_n"], "force_n", lineno)
        try:
            trial = int(rec["trial_id"])
        except ValueError:
            raise CSVFormatError(f"trial_id is not an integer: {rec['trial_id']!r}", lineno) from None
        e = _parse_float(rec["e_mpa"], "e_mpa", lineno) if "e_mpa" in rec else None
        s = _parse_float(rec["size_scale"], "size_scale", lineno) if "size_scale" in rec else 1.0
        if x < 0:
            raise CSVFormatError("negative displacement", lineno)
        if e is not None and e <= 0:
            raise CSVFormatError("e_mpa must be > 0", lineno)
        if s <= 0:
            raise CSVFormatError("size_scale must be > 0", lineno)
        key = (trial, e, s)
        pts = groups.setdefault(key, [])
        if pts and x <= pts[-1][0]:
            raise CSVFormatError(
                f"displacements must increase within trial {trial}", lineno
            )
        pts.append((x, f))
        rows_lines.setdefault(key, []).append(lineno)

    if header is None:
        raise CSVFormatError("missing header", 1)
    if not groups:
        raise CSVFormatError("no data rows", header_line)

    label = meta.get("label", label)
    shore = meta.get("shore_label") or None
    try:
        n_trials = int(meta.get("n_trials", "1"))
    except ValueError:
        raise CSVFormatError(f"n_trials is not an integer: {meta['n_trials']!r}") from None
    synthetic = meta.get("source") == "simulated"
    return [
        MeasurementSeries(
            samples=tuple(pts),
            trial_id=trial,
            material=None if e is None else MaterialSpec(e, shore),
            size_scale=s,
            label=label,
            n_trials=n_trials,
            synthetic=synthetic,
        )
        for (trial, e, s), pts in groups.items()
    ]


def read_measurements(path) -> list[MeasurementSeries]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise CSVFormatError(f"{path}: not UTF-8 ({exc.reason})") from exc
    except OSError as exc:
        raise CSVFormatError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return parse_measurements(text, label=path.stem)
    except CSVFormatError as exc:
        raise CSVFormatError(f"{path}: {exc}") from exc


def _shared(series, attr):
    values = {getattr(s, attr) for s in series}
    if len(values) > 1:
        raise ValueError(f"series written to one file must share {attr}")
    return values.pop()


def format_measurements(series: Sequence[MeasurementSeries]) -> str:
    """Serialise series into one CSV text; floats use ``repr`` so they round-trip."""
    series = list(series)
    if not series:
        raise ValueError("nothing to write")
    has_e = [s.material is not None for s in series]
    if any(has_e) and not all(has_e):
        raise ValueError("either every series or none must carry a material")
    label = _shared(series, "label")
    n_trials = _shared(series, "n_trials")
    synthetic = _shared(series, "synthetic")
    shore = {s.material.shore_label for s in series if s.material is not None}
    if len(shore) > 1:
        raise ValueError("series written to one file must share shore_label")
    shore = shore.pop() if shore else None

    out = io.StringIO()
    out.write(SIMULATED_MARKER + "\n" if synthetic else "# source=measured\n")
    if label:
        out.write(f"# label={label}\n")
    if shore:
        out.write(f"# shore_label={shore}\n")
    if n_trials != 1:
        out.write(f"# n_trials={n_trials}\n")
    cols = list(MEASUREMENT_COLUMNS) + (["e_mpa"] if all(has_e) else []) + ["size_scale"]
    out.write(",".join(cols) + "\n")
    for s in series:
        for x, f in s.samples:
            cells = [repr(x), repr(f), str(s.trial_id)]
            if all(has_e):
                cells.append(repr(s.material.youngs_modulus))
            cells.append(repr(s.size_scale))
            out.write(",".join(cells) + "\n")
    return out.getvalue()


def write_measurements(path, series: Sequence[MeasurementSeries]) -> None:
    Path(path).write_text(format_measurements(series), encoding="utf-8")


def format_table(header: Iterable[str], rows: Iterable[Iterable], comments=()) -> str:
    """CSV text with the fixed numeric format; strings pass through unchanged."""
    out = io.StringIO()
    for c in comments:
        out.write(f"# {c}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    return out.getvalue()
