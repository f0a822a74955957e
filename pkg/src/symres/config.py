"""Scenario configuration: flat key-value text with bracketed sections.

The format is deliberately trivial (configparser-compatible, no nesting);
every parameter is validated here with field-level diagnostics, and a seed
is mandatory whenever the field recipe draws random data.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from .errors import ConfigError

CHECK_NAMES = ("lemma-a1", "pi0", "idempotency", "residue", "oracle",
               "truncation", "commutator")

RECIPES = ("rank-one", "generic")


@dataclass(frozen=True)
class Scenario:
    name: str
    n: int = 1
    N: int = 64
    K: int = 8
    n_f: int = 32
    m: int = 2
    rank: int = 1
    recipe: str = "rank-one"
    epsilon: float = 0.2
    bandwidth: int = 2
    theta_bandwidth: int = 1
    margin_cells: int = 3
    seed: int | None = None
    order: int = 4
    contour_radius: float = 0.5
    contour_nodes: int = 64
    checks: tuple[str, ...] = ()
    tol_scale: float = 1.0

    def validate(self):
        def bad(fieldname, msg):
            raise ConfigError(f"{fieldname}: {msg}", field=fieldname)

        if self.n not in (1, 2):
            bad("manifold.n", "must be 1 or 2")
        for key, val in (("manifold.N", self.N), ("manifold.K", self.K)):
            if val < 8 or (val & (val - 1)) != 0:
                bad(key, "must be a power of two >= 8")
        if self.n_f < 1:
            bad("manifold.N_f", "must be >= 1")
        if not 1 <= self.rank < self.m:
            bad("field.beta_rank", f"must satisfy 1 <= rank < m = {self.m}")
        if self.recipe not in RECIPES:
            bad("field.recipe", f"must be one of {RECIPES}")
        if not 0.0 <= self.epsilon < 0.5:
            bad("field.epsilon", "must lie in [0, 0.5)")
        if self.margin_cells < 2:
            bad("field.margin_cells", "must be >= 2")
        if self.seed is None:
            bad("field.seed", "mandatory for randomized recipes")
        if self.order < 0:
            bad("projection.J", "must be >= 0")
        if not 0.0 < self.contour_radius < 1.0:
            bad("contour.radius", "must lie strictly in (0, 1)")
        M = self.contour_nodes
        if M < 32 or (M & (M - 1)) != 0:
            bad("contour.nodes", "must be a power of two >= 32")
        if self.tol_scale <= 0:
            bad("run.tol_scale", "must be positive")
        for c in self.checks:
            if c not in CHECK_NAMES:
                bad("checks.run", f"unknown check {c!r} "
                    f"(known: {', '.join(CHECK_NAMES)})")
        return self


def parse_scenario(text: str, name: str = "scenario",
                   tol_scale: float = 1.0) -> Scenario:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text, source=name)
    except configparser.Error as e:
        line = getattr(e, "lineno", None)
        raise ConfigError(f"parse error: {e}", line=line) from e

    def get(section, key, conv, default=None, fieldname=None):
        fieldname = fieldname or f"{section}.{key}"
        if not cp.has_option(section, key):
            return default
        raw = cp.get(section, key)
        try:
            return conv(raw)
        except ValueError as e:
            raise ConfigError(f"{fieldname}: cannot parse {raw!r}",
                              field=fieldname) from e

    checks_raw = get("checks", "run", str, default="")
    checks = tuple(c.strip() for c in checks_raw.split(",") if c.strip())

    sc = Scenario(
        name=name,
        n=get("manifold", "n", int, 1),
        N=get("manifold", "N", int, 64),
        K=get("manifold", "K", int, 8),
        n_f=get("manifold", "N_f", int, 32),
        m=get("field", "m", int, 2),
        rank=get("field", "beta_rank", int, 1),
        recipe=get("field", "recipe", str, "rank-one"),
        epsilon=get("field", "epsilon", float, 0.2),
        bandwidth=get("field", "bandwidth", int, 2),
        theta_bandwidth=get("field", "theta_bandwidth", int, 1),
        margin_cells=get("field", "margin_cells", int, 3),
        seed=get("field", "seed", int, None),
        order=get("projection", "J", int, 4),
        contour_radius=get("contour", "radius", float, 0.5),
        contour_nodes=get("contour", "nodes", int, 64),
        checks=checks,
        tol_scale=tol_scale,
    )
    return sc.validate()
