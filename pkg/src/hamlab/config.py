"""Pipeline configuration: desk-scale surrogate constants and caps.

The source arguments use an asymptotic constant hierarchy that never pins
concrete values; these defaults are surrogates chosen so that every stage can
execute on 12-40 vertex instances.  Reports carry the configuration so runs
are reproducible, and every stage revalidates its own hypotheses numerically
instead of trusting the hierarchy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Any

__all__ = ["PipelineConfig", "parse_fraction", "fraction_str"]


def parse_fraction(text: str | int | Fraction) -> Fraction:
    """Accepts "1/20", "0.05"-free rationals, and ints."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(text.strip())


def fraction_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


@dataclass(frozen=True)
class PipelineConfig:
    nu: Fraction = Fraction(1, 20)
    tau: Fraction = Fraction(1, 5)
    gamma: Fraction = Fraction(1, 25)
    epsilon: Fraction = Fraction(1, 10)
    rho: Fraction = Fraction(1, 20)
    alpha_digraph: Fraction = Fraction(1, 3)
    alpha_oriented: Fraction = Fraction(1, 4)
    expander_cap: int = 22
    hk_cap: int = 24
    swc_cap: int = 20
    oracle_budget: int = 400_000
    heuristic_budget: int = 20_000
    max_cut_size: int = 2
    seed: int = 0
    expander_diagnostics: bool = False

    def __post_init__(self):
        if not 0 < self.nu < self.tau < 1:
            raise ValueError("need 0 < nu < tau < 1")
        for name in ("gamma", "epsilon", "rho"):
            val = getattr(self, name)
            if not 0 < val < 1:
                raise ValueError(f"{name} must lie in (0,1)")

    @property
    def nu_nested(self) -> Fraction:
        """Rational surrogate for nu^(1/2), used by the nested witness check;
        clamped below tau so the parameter order survives desk-scale values."""
        candidate = Fraction(math.sqrt(float(self.nu))).limit_denominator(1000)
        return min(candidate, self.tau * 3 / 4)

    def to_json_dict(self) -> dict:
        out: dict[str, Any] = {}
        for f in fields(self):
            val = getattr(self, f.name)
            out[f.name] = fraction_str(val) if isinstance(val, Fraction) else val
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "PipelineConfig":
        kwargs: dict[str, Any] = {}
        frac_fields = {
            "nu", "tau", "gamma", "epsilon", "rho", "alpha_digraph", "alpha_oriented"
        }
        for f in fields(cls):
            if f.name not in data:
                continue
            val = data[f.name]
            kwargs[f.name] = parse_fraction(val) if f.name in frac_fields else val
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str) -> "PipelineConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))
