"""Sweep configuration: parsing, pre-flight validation and digesting."""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from ..constructions import FamilySpec
from ..geom import LINE_CAP, counting_constants
from ..gf import FieldError, field_create

POINT_CAP = 1 << 20

THEOREMS = (
    "identity",
    "et",
    "large_e",
    "large_e_general",
    "large_t",
    "large_t_general",
    "few_directions",
    "off_line",
    "on_line",
    "four_m_squared",
    "unique_bad_point",
)


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    fields: list[tuple[int, int]] = field(default_factory=lambda: [(3, 1), (5, 1)])
    dims: list[int] = field(default_factory=lambda: [2])
    families: list[FamilySpec] = field(default_factory=lambda: [FamilySpec("random")])
    theorems: list[str] = field(default_factory=lambda: ["identity"])
    M: list[int] = field(default_factory=lambda: [1, 2])
    C: list[Fraction] = field(default_factory=lambda: [Fraction(2)])
    k: list[int] = field(default_factory=list)
    k_lo: int = 2
    k_hi: int | None = None
    trials: int = 10
    seed: int = 0
    jobs: int = 1
    out: str | None = None
    format: str = "json"

    def canonical(self) -> dict:
        """Everything that determines report content (not out/jobs/format)."""
        d = asdict(self)
        d["families"] = [f.label() for f in self.families]
        d["C"] = [str(c) for c in self.C]
        for key in ("out", "jobs", "format"):
            d.pop(key)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def smoke_config() -> SweepConfig:
    """F_3^2 and F_5^2, identity checks over a few families."""
    return SweepConfig(
        fields=[(3, 1), (5, 1)],
        dims=[2],
        families=[
            FamilySpec("random"),
            FamilySpec("subspace", {"k": 1}),
            FamilySpec("concurrent_lines", {"m": 2}),
        ],
        theorems=["identity"],
        trials=25,
    )


# -- parsing --

_FAMILY_RE = re.compile(r"^\s*(\w+)\s*(?:\((.*)\))?\s*$")


def _scalar(text: str) -> Any:
    text = text.strip()
    if ":" in text:
        lo, hi = text.split(":", 1)
        return [int(lo), int(hi)]
    for conv in (int, Fraction):
        try:
            v = conv(text)
        except (ValueError, ZeroDivisionError):
            continue
        return v if conv is int else (int(v) if v.denominator == 1 else v)
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def parse_family(text: str) -> FamilySpec:
    """``kind`` or ``kind(key=value,...)``; ``n=lo:hi`` gives a size range."""
    m = _FAMILY_RE.match(text)
    if not m:
        raise ConfigError(f"cannot parse family {text!r}")
    kind, inner = m.group(1), m.group(2)
    params = {}
    if inner:
        for part in inner.split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise ConfigError(f"family parameter {part!r} needs key=value")
            key, val = part.split("=", 1)
            params[key.strip()] = _scalar(val)
    try:
        return FamilySpec(kind, params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _split_families(text: str) -> list[str]:
    """Split on ';' or on commas outside parentheses."""
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in ",;" and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [s for s in (x.strip() for x in out) if s]


def _int_list(value) -> list[int]:
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return [int(v) for v in str(value).replace(";", ",").split(",") if v.strip()]


def _parse_fields(value) -> list[tuple[int, int]]:
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    out = []
    for item in items:
        if isinstance(item, (list, tuple)):
            out.append((int(item[0]), int(item[1])))
            continue
        item = str(item).strip()
        if not item:
            continue
        if "^" in item:
            p, e = item.split("^")
            out.append((int(p), int(e)))
        else:
            out.append((int(item), 1))
    return out


def apply_settings(cfg: SweepConfig, settings: dict[str, Any]) -> SweepConfig:
    """Overlay flat key/value settings (from a file or the CLI) onto ``cfg``."""
    for key, value in settings.items():
        if value is None:
            continue
        if key == "fields":
            cfg.fields = _parse_fields(value)
        elif key in ("dims", "d"):
            cfg.dims = _int_list(value)
        elif key in ("families", "family"):
            texts = value if isinstance(value, list) else _split_families(str(value))
            cfg.families = [parse_family(t) for t in texts]
        elif key in ("theorems", "theorem"):
            names = value if isinstance(value, list) else str(value).replace(";", ",").split(",")
            cfg.theorems = [n.strip() for n in names if n.strip()]
        elif key == "M":
            cfg.M = _int_list(value)
        elif key == "C":
            items = value if isinstance(value, list) else str(value).replace(";", ",").split(",")
            cfg.C = [Fraction(str(c).strip()) for c in items if str(c).strip()]
        elif key == "k":
            cfg.k = _int_list(value)
        elif key in ("k_lo", "k_hi", "trials", "seed", "jobs"):
            setattr(cfg, key, int(value))
        elif key in ("out", "format"):
            setattr(cfg, key, str(value))
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    return cfg


def read_config_file(path: str | Path) -> dict[str, Any]:
    """A JSON object, or flat ``key = value`` lines with ``#`` comments."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return json.loads(text)
    settings = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, val = line.split("=", 1)
        settings[key.strip()] = val.strip()
    return settings


def validate(cfg: SweepConfig) -> None:
    """Reject the config up front if any cell is infeasible."""
    from ..geom import space

    bad = [t for t in cfg.theorems if t not in THEOREMS]
    if bad:
        raise ConfigError(f"unknown theorem selection {bad}; choose from {THEOREMS}")
    if any(m < 1 for m in cfg.M):
        raise ConfigError("M grid entries must be positive integers")
    if any(c <= 1 for c in cfg.C):
        raise ConfigError("C grid entries must exceed 1")
    if cfg.trials < 0 or cfg.jobs < 1:
        raise ConfigError("trials must be >= 0 and jobs >= 1")
    if cfg.format not in ("json", "csv"):
        raise ConfigError(f"unknown format {cfg.format!r}")
    for p, e in cfg.fields:
        try:
            f = field_create(p, e)
        except FieldError as exc:
            raise ConfigError(f"cell F_{p}^{e}: {exc}") from exc
        for d in cfg.dims:
            if d < 1:
                raise ConfigError(f"cell F_{p}^{e}, d={d}: dimension must be positive")
            counts = counting_constants(f.q, d)
            if counts.points_total > POINT_CAP or counts.lines_total > LINE_CAP:
                raise ConfigError(
                    f"cell F_{p}^{e}, d={d}: q^d = {counts.points_total} exceeds the desk cap"
                )
            sp = space(p, e, d)
            for fam in cfg.families:
                try:
                    fam.validate(sp)
                except ValueError as exc:
                    raise ConfigError(f"cell F_{p}^{e}, d={d}, family {fam.label()}: {exc}") from exc
