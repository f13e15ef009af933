"""Declarative parameter sweeps and the preset catalog.

A scenario fixes a model family, per-level energy and width trajectories that
are affine in the primary parameter (plus optional secondary-parameter terms),
the coupling, and the sweep grid.  Scenarios serialize to a JSON document::

    {"id": ..., "figure": ..., "model_kind": "TWO_LEVEL",
     "levels": [{"e": {"c": 1.0, "m": -0.5}, "gamma": {"c": -1.0}}, ...],
     "coupling": {"re": 0.05, "im": 0.0, "gaussian": false},
     "primary": {"param": "a", "value": 0.0},
     "secondary": {"param": "s", "value": 0.0} | null,
     "sweep": {"param": "a", "start": 0.3, "stop": 1.0, "points": 2001}}

``gamma`` is the full signed width (``eps = e + i gamma/2``).  For the PT
kinds the single level entry carries the mode energy and the gain/loss
strength, and ``coupling.re`` is the real coupling ``w``.  For N_CHANNEL the
level energies form the diagonal of H^B and ``coupling`` is
``{"v": [...], "alpha": {"c": ..., "m": ...}}``.
"""
from __future__ import annotations

import cmath
import enum
import json
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from . import ham

DEFAULT_POINTS = 2001

_TERMS = ("c", "m", "n", "cos", "sin")


class ModelKind(enum.Enum):
    TWO_LEVEL = "TWO_LEVEL"
    PT_BALANCED = "PT_BALANCED"
    PT_LOSSY = "PT_LOSSY"
    THREE_DOORWAY = "THREE_DOORWAY"
    N_CHANNEL = "N_CHANNEL"


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Affine:
    """c + m*a + n*y + cos*cos(y) + sin*sin(y), with y the secondary parameter."""

    c: float = 0.0
    m: float = 0.0
    n: float = 0.0
    cos: float = 0.0
    sin: float = 0.0

    def __call__(self, a, y=0.0):
        val = self.c + self.m * a + self.n * y
        if self.cos:
            val = val + self.cos * (cmath.cos(y) if isinstance(y, complex) else math.cos(y))
        if self.sin:
            val = val + self.sin * (cmath.sin(y) if isinstance(y, complex) else math.sin(y))
        return val

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in _TERMS if getattr(self, k) != 0.0 or k == "c"}

    @classmethod
    def from_dict(cls, d: dict | float | int) -> "Affine":
        if isinstance(d, (int, float)):
            return cls(c=float(d))
        unknown = set(d) - set(_TERMS)
        if unknown:
            raise ScenarioError(f"unknown trajectory terms {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in d.items()})


@dataclass(frozen=True)
class LevelTrajectory:
    e: Affine
    gamma: Affine = Affine()

    def to_dict(self) -> dict:
        return {"e": self.e.to_dict(), "gamma": self.gamma.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "LevelTrajectory":
        return cls(Affine.from_dict(d["e"]), Affine.from_dict(d.get("gamma", 0.0)))


@dataclass(frozen=True)
class CouplingSpec:
    re: float = 0.0
    im: float = 0.0
    gaussian: bool = False
    v: tuple[float, ...] = ()
    alpha: Affine | None = None

    @property
    def omega(self) -> complex:
        return complex(self.re, self.im)

    def to_dict(self, kind: ModelKind) -> dict:
        if kind is ModelKind.N_CHANNEL:
            return {"v": list(self.v), "alpha": self.alpha.to_dict()}
        return {"re": self.re, "im": self.im, "gaussian": self.gaussian}

    @classmethod
    def from_dict(cls, d: dict, kind: ModelKind) -> "CouplingSpec":
        if kind is ModelKind.N_CHANNEL:
            return cls(v=tuple(float(x) for x in d["v"]), alpha=Affine.from_dict(d["alpha"]))
        return cls(float(d.get("re", 0.0)), float(d.get("im", 0.0)), bool(d.get("gaussian", False)))


@dataclass(frozen=True)
class ParamSpec:
    param: str
    value: float = 0.0


@dataclass(frozen=True)
class SweepSpec:
    param: str
    start: float
    stop: float
    points: int = DEFAULT_POINTS

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class Scenario:
    model_kind: ModelKind
    levels: tuple[LevelTrajectory, ...]
    coupling: CouplingSpec
    sweep: SweepSpec
    primary: ParamSpec = ParamSpec("a")
    secondary: ParamSpec | None = None
    id: str = ""
    figure: str = ""

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        k = self.model_kind
        n = len(self.levels)
        expected = {
            ModelKind.TWO_LEVEL: 2,
            ModelKind.THREE_DOORWAY: 3,
            ModelKind.PT_BALANCED: 1,
            ModelKind.PT_LOSSY: 1,
        }.get(k)
        if expected is not None and n != expected:
            raise ScenarioError(f"{k.value} needs {expected} level entries, got {n}")
        if k is ModelKind.N_CHANNEL:
            if n < 2:
                raise ScenarioError("N_CHANNEL needs at least 2 levels")
            if len(self.coupling.v) != n or self.coupling.alpha is None:
                raise ScenarioError("N_CHANNEL coupling needs v of length N and alpha")
        sw = self.sweep
        if sw.points < 2:
            raise ScenarioError("sweep needs at least 2 points")
        if not sw.start < sw.stop:
            raise ScenarioError("sweep start must be below stop")
        names = {self.primary.param} | ({self.secondary.param} if self.secondary else set())
        if sw.param not in names:
            raise ScenarioError(f"sweep parameter {sw.param!r} is not one of {sorted(names)}")
        for lvl in self.levels:
            for aff in (lvl.e, lvl.gamma):
                if not all(math.isfinite(getattr(aff, t)) for t in _TERMS):
                    raise ScenarioError("trajectory coefficients must be finite")

    @property
    def n(self) -> int:
        if self.model_kind in (ModelKind.PT_BALANCED, ModelKind.PT_LOSSY):
            return 2
        return len(self.levels)

    @property
    def sweeps_secondary(self) -> bool:
        return self.secondary is not None and self.sweep.param == self.secondary.param

    def grid(self, points: int | None = None) -> np.ndarray:
        sw = self.sweep if points is None else replace(self.sweep, points=points)
        return sw.grid()

    def coordinates(self, x):
        """(primary, secondary) values at sweep value ``x``."""
        y0 = self.secondary.value if self.secondary else 0.0
        if self.sweeps_secondary:
            return self.primary.value, x
        return x, y0

    def matrix_at(self, x) -> ham.ModelMatrix:
        a, y = self.coordinates(x)
        return self.matrix_at_point(a, y)

    def matrix_at_point(self, a, y=0.0) -> ham.ModelMatrix:
        """Model matrix at primary ``a`` and secondary ``y``.

        Complex arguments give the analytic continuation of the family (used
        to locate exceptional points off the real parameter axis).
        """
        if isinstance(a, complex) or isinstance(y, complex):
            return self._continued(complex(a), complex(y))
        kind = self.model_kind
        cp = self.coupling
        if kind is ModelKind.N_CHANNEL:
            hb = [lvl.e(a, y) for lvl in self.levels]
            return ham.build_channel_model(hb, ham.ChannelVector(cp.v, cp.alpha(a, y)))
        if kind in (ModelKind.PT_BALANCED, ModelKind.PT_LOSSY):
            lvl = self.levels[0]
            return ham.build_pt(lvl.e(a, y), lvl.gamma(a, y), cp.re, kind is ModelKind.PT_LOSSY)
        levels = [ham.Level(lvl.e(a, y), lvl.gamma(a, y)) for lvl in self.levels]
        coupling = ham.Coupling(cp.omega, cp.gaussian)
        if kind is ModelKind.TWO_LEVEL:
            return ham.build_two_level(levels, coupling)
        return ham.build_three_level_doorway(levels, coupling)

    def _continued(self, a: complex, y: complex) -> ham.ModelMatrix:
        kind = self.model_kind
        cp = self.coupling
        if kind is ModelKind.N_CHANNEL:
            alpha = cp.alpha(a, y)
            v = cp.v
            diag = [lvl.e(a, y) - 1j * alpha * v[i] * v[i] for i, lvl in enumerate(self.levels)]
            pairs = {
                (i, j): -1j * alpha * v[i] * v[j]
                for i in range(len(v))
                for j in range(i + 1, len(v))
            }
            return ham.assemble(diag, pairs)
        if kind in (ModelKind.PT_BALANCED, ModelKind.PT_LOSSY):
            lvl = self.levels[0]
            e, g = lvl.e(a, y), lvl.gamma(a, y)
            lower = e if kind is ModelKind.PT_LOSSY else e + 0.5j * g
            return ham.assemble([e - 0.5j * g, lower], {(0, 1): complex(cp.re)})
        es = [lvl.e(a, y) for lvl in self.levels]
        diag = [e + 0.5j * lvl.gamma(a, y) for e, lvl in zip(es, self.levels)]
        partners = [1] if kind is ModelKind.TWO_LEVEL else [1, 2]

        def w(j):
            if cp.gaussian:
                return ham.gaussian_coupling(cp.omega, complex(es[0]), complex(es[j]))
            return cp.omega

        return ham.assemble(diag, {(0, j): w(j) for j in partners})

    def with_points(self, points: int) -> "Scenario":
        return replace(self, sweep=replace(self.sweep, points=points))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "figure": self.figure,
            "model_kind": self.model_kind.value,
            "levels": [lvl.to_dict() for lvl in self.levels],
            "coupling": self.coupling.to_dict(self.model_kind),
            "primary": {"param": self.primary.param, "value": self.primary.value},
            "secondary": (
                {"param": self.secondary.param, "value": self.secondary.value}
                if self.secondary
                else None
            ),
            "sweep": {
                "param": self.sweep.param,
                "start": self.sweep.start,
                "stop": self.sweep.stop,
                "points": self.sweep.points,
            },
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Scenario":
        try:
            kind = ModelKind(d["model_kind"])
            sec = d.get("secondary")
            prim = d.get("primary") or {"param": "a", "value": 0.0}
            sw = d["sweep"]
            return cls(
                model_kind=kind,
                levels=tuple(LevelTrajectory.from_dict(x) for x in d["levels"]),
                coupling=CouplingSpec.from_dict(d.get("coupling", {}), kind),
                sweep=SweepSpec(
                    str(sw["param"]),
                    float(sw["start"]),
                    float(sw["stop"]),
                    int(sw.get("points", DEFAULT_POINTS)),
                ),
                primary=ParamSpec(str(prim["param"]), float(prim.get("value", 0.0))),
                secondary=ParamSpec(str(sec["param"]), float(sec.get("value", 0.0))) if sec else None,
                id=str(d.get("id", "")),
                figure=str(d.get("figure", "")),
            )
        except (KeyError, TypeError) as exc:
            raise ScenarioError(f"malformed scenario document: {exc!r}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"invalid JSON: {exc}") from exc


# --- preset catalog ---------------------------------------------------------


def _lvl(e, half_width) -> LevelTrajectory:
    """Level from an energy trajectory and a caption-style half width gamma/2."""
    if isinstance(half_width, Affine):
        g = Affine(**{t: 2.0 * getattr(half_width, t) for t in _TERMS})
    else:
        g = Affine(c=2.0 * half_width)
    return LevelTrajectory(e if isinstance(e, Affine) else Affine(c=e), g)


def _two(sid, fig, half1, half2, omega, sweep, e1=Affine(1.0, -0.5), e2=Affine(0.0, 1.0), **kw):
    return Scenario(
        ModelKind.TWO_LEVEL,
        (_lvl(e1, half1), _lvl(e2, half2)),
        CouplingSpec(omega.real, omega.imag, kw.pop("gaussian", False)),
        sweep,
        id=sid,
        figure=fig,
        **kw,
    )


def _three(sid, fig, omega, half3, sweep, e3=Affine(-1.0 / 3.0, 1.5), **kw):
    levels = (
        _lvl(Affine(1.0, -0.5), -0.495),
        _lvl(Affine(0.0, 1.0), -0.495),
        _lvl(e3, half3),
    )
    return Scenario(
        ModelKind.THREE_DOORWAY,
        levels,
        CouplingSpec(omega.real, omega.imag, True),
        sweep,
        id=sid,
        figure=fig,
        **kw,
    )


def _gain_loss3(sid, fig, e3, half1, half2, half3, sweep, **kw):
    levels = (_lvl(0.5, half1), _lvl(0.5, half2), _lvl(e3, half3))
    return Scenario(
        ModelKind.THREE_DOORWAY, levels, CouplingSpec(0.05, 0.0, False), sweep, id=sid, figure=fig, **kw
    )


def _build_presets() -> dict[str, Scenario]:
    p: list[Scenario] = []
    fig1_sweep = SweepSpec("a", 0.3, 1.0)
    # Fig. 2 plots phases; a narrower window resolves the pi/4 jumps at 2001 points
    fig2_sweep = SweepSpec("a", 0.5, 0.85)
    omega_c = 0.025 * (1 + 1j)
    rows = {
        "ab": (-0.5, 0.05 + 0j),
        "cd": (-0.5505, omega_c),
        "ef": (-0.6, 0.05j),
    }
    for fig in ("1", "2"):
        for panel, (h1, om) in rows.items():
            p.append(_two(f"part1-fig{fig}{panel}", f"Part I Fig. {fig}({panel[0]},{panel[1]})", h1, -0.6, om, fig1_sweep if fig == "1" else fig2_sweep))

    d_sweep = SweepSpec("d", -1.0, 1.0)
    d_kw = dict(e1=Affine(2.0 / 3.0), e2=Affine(2.0 / 3.0, 1.0), primary=ParamSpec("d"))
    p.append(_two("part1-fig1a", "Part I Fig. 1a (d sweep)", -0.5, -0.5999, 0.05 + 0j, d_sweep, **d_kw))
    p.append(
        _two("part1-fig1b", "Part I Fig. 1b left", -0.5, -0.57, 0.05 * (1 + 1j) / math.sqrt(2), d_sweep, **d_kw)
    )
    p.append(_two("part1-fig1b-imag", "Part I Fig. 1b right", -0.5, -0.5, 0.05j, d_sweep, **d_kw))

    # the (a, theta) family whose EP is found by 2-D refinement
    p.append(
        _two(
            "part1-fig1ab-theta",
            "Part I Fig. 1(a,b) with e1 = 1 - a/2 + r cos(theta), e2 = a + r sin(theta), r = 0.05",
            -0.5,
            -0.6,
            0.05 + 0j,
            fig1_sweep,
            e1=Affine(1.0, -0.5, cos=0.05),
            e2=Affine(0.0, 1.0, sin=0.05),
            secondary=ParamSpec("theta", math.pi / 4),
        )
    )

    pt_sweep = SweepSpec("a", -3.0, 3.0)
    pt_level = (LevelTrajectory(Affine(0.5), Affine(0.0, 0.1)),)
    p.append(Scenario(ModelKind.PT_BALANCED, pt_level, CouplingSpec(0.05), pt_sweep, id="part1-fig3", figure="Part I Fig. 3 left"))
    p.append(Scenario(ModelKind.PT_LOSSY, pt_level, CouplingSpec(0.05), pt_sweep, id="part1-fig3-lossy", figure="Part I Fig. 3 right"))
    fig4_kw = dict(e1=Affine(0.5), e2=Affine(0.495))
    p.append(_two("part1-fig4", "Part I Fig. 4 left", Affine(0.0, -0.05), Affine(0.0, 0.05), 0.05 + 0j, pt_sweep, **fig4_kw))
    p.append(_two("part1-fig4-lossy", "Part I Fig. 4 right", Affine(0.0, -0.05), 0.0, 0.05 + 0j, pt_sweep, **fig4_kw))

    fig11_sweep = SweepSpec("a", 0.0, 2.0)
    fig11_kw = dict(e1=Affine(1.0, -0.5), e2=Affine(0.0, 0.5))
    p.append(_two("part1-fig11", "Part I Fig. 11 left", -0.05, 0.05, 0.05 + 0j, fig11_sweep, **fig11_kw))
    p.append(
        _two(
            "part1-fig11-complex",
            "Part I Fig. 11 right",
            -0.05,
            0.0205,
            0.05 * (1 + 1j) / math.sqrt(2),
            fig11_sweep,
            **fig11_kw,
        )
    )

    a_sweep = SweepSpec("a", 0.55, 0.8)
    for fig, om, h3 in (("5", 0.01 + 0j, -0.485), ("6", 0.01j, -0.4853)):
        p.append(_three(f"part2-fig{fig}", f"Part II Fig. {fig} right", om, h3, a_sweep))
        two = _two(
            f"part2-fig{fig}-n2",
            f"Part II Fig. {fig} left",
            -0.495,
            -0.495,
            om,
            a_sweep,
            gaussian=True,
        )
        p.append(two)

    s_sweep = SweepSpec("s", -0.1, 0.1)
    e3_s = Affine(-1.0 / 3.0, 1.5, n=1.0)
    for fig, om, h3, a2 in (("7", 0.01 + 0j, -0.485, 0.675), ("8", 0.01j, -0.4853, 0.6774)):
        for tag, a_fixed in (("acr", 2.0 / 3.0), ("a1", 0.6539), ("a2", a2)):
            p.append(
                _three(
                    f"part2-fig{fig}-{tag}",
                    f"Part II Fig. {fig}, a = {a_fixed!r}",
                    om,
                    h3,
                    s_sweep,
                    e3=e3_s,
                    primary=ParamSpec("a", a_fixed),
                    secondary=ParamSpec("s", 0.0),
                )
            )

    gain = Affine(0.0, 0.05)
    loss = Affine(0.0, -0.05)
    p.append(_gain_loss3("part2-fig9", "Part II Fig. 9 left", Affine(0.487), loss, gain, gain, SweepSpec("a", -6.0, 6.0)))
    p.append(
        _gain_loss3(
            "part2-fig9-s",
            "Part II Fig. 9 right",
            Affine(0.487, n=1.0),
            loss,
            gain,
            gain,
            SweepSpec("s", -0.1, 0.1),
            primary=ParamSpec("a", 0.0),
            secondary=ParamSpec("s", 0.0),
        )
    )
    p.append(_gain_loss3("part2-fig10", "Part II Fig. 10 left", Affine(0.5), loss, gain, 0.05, SweepSpec("a", -4.0, 4.0)))
    p.append(_gain_loss3("part2-fig10-right", "Part II Fig. 10 right", Affine(0.5), loss, 0.0, 0.0, SweepSpec("a", -4.0, 4.0)))

    p.append(
        Scenario(
            ModelKind.N_CHANNEL,
            tuple(LevelTrajectory(Affine(x)) for x in (0.0, 0.25, 0.5, 0.75)),
            CouplingSpec(v=(0.5, 0.5, 0.5, 0.5), alpha=Affine(0.0, 1.0)),
            SweepSpec("alpha", 0.0, 4.0),
            primary=ParamSpec("alpha"),
            id="channel-n4",
            figure="H^B - i alpha V V^T, four equidistant levels, one channel",
        )
    )
    return {s.id: s for s in p}


PRESETS: dict[str, Scenario] = _build_presets()


def list_scenarios() -> list[dict]:
    return [PRESETS[k].to_dict() for k in PRESETS]


def get_scenario(scenario_id: str) -> Scenario:
    try:
        return PRESETS[scenario_id]
    except KeyError:
        raise ScenarioError(f"unknown scenario {scenario_id!r}") from None
