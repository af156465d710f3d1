"""Operator descriptors for bilinear forms ``a(u, v) = (L u, M v)_Y``.

A problem lists the trial-space blocks, the operators ``L`` and ``M`` as sums
of elementary terms per Y-component, and the V inner product written the same
way (``(u, v)_V = (N u, N v)``). The term kinds are the five needed by the
built-in benchmarks:

========== ============== ==========================
kind       block family   value
========== ============== ==========================
identity   any            scalar (Lagrange) / vector (RT0)
ddx        Lagrange, 1D   scalar
grad       Lagrange       vector
div        RT0            scalar
advective  Lagrange       scalar, ``b . grad u``
========== ============== ==========================

The advection field is affine, ``b(x) = matrix @ x + offset``, so every
integrand is a polynomial and the quadrature is exact.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import oracle
from .errors import CoercifyError, InvalidArgumentError

TERM_KINDS = ("identity", "ddx", "grad", "div", "advective")
FAMILIES = ("lagrange", "rt0")
BUILTINS = ("ivp-ls", "adv-diff-1d", "adv-diff-2d", "poisson-ls", "poisson-ls-rescaled", "unit")


@dataclass(frozen=True)
class OperatorTerm:
    kind: str
    block: int = 0
    multiplier: float = 1.0


@dataclass(frozen=True)
class Component:
    """One Y-component: a sum of terms sharing a value type."""

    terms: tuple
    value: str = "scalar"


@dataclass(frozen=True)
class Block:
    family: str
    bc: str = "none"


@dataclass(frozen=True)
class Advection:
    matrix: tuple
    offset: tuple = ()

    def __call__(self, points):
        """Field values at ``points`` of shape (..., dim)."""
        g = np.asarray(self.matrix, dtype=np.float64)
        c = np.asarray(self.offset if self.offset else np.zeros(g.shape[0]), dtype=np.float64)
        return np.einsum("ij,...j->...i", g, points) + c

    @property
    def divergence(self) -> float:
        return float(np.trace(np.asarray(self.matrix, dtype=np.float64)))

    @property
    def is_constant(self) -> bool:
        return not np.any(np.asarray(self.matrix, dtype=np.float64))


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    dim: int
    blocks: tuple
    L: tuple
    M: tuple
    norm: tuple
    advection: Advection | None = None
    exact_alpha: float | None = None
    provenance: str = ""

    def to_dict(self) -> dict:
        def op(components):
            return [
                {"value": c.value,
                 "terms": [{"kind": t.kind, "block": t.block, "multiplier": t.multiplier}
                           for t in c.terms]}
                for c in components
            ]

        out = {
            "name": self.name,
            "dim": self.dim,
            "blocks": [{"family": b.family, "bc": b.bc} for b in self.blocks],
            "L": op(self.L),
            "M": op(self.M),
            "norm": op(self.norm),
            "advection": None,
            "exact_alpha": self.exact_alpha,
            "provenance": self.provenance,
        }
        if self.advection is not None:
            out["advection"] = {"matrix": [list(r) for r in self.advection.matrix],
                                "offset": list(self.advection.offset)}
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemSpec":
        import jsonschema

        try:
            jsonschema.validate(data, problem_schema())
        except jsonschema.ValidationError as exc:
            raise InvalidArgumentError(f"problem JSON rejected: {exc.message}") from None

        def op(items):
            return tuple(
                Component(
                    terms=tuple(OperatorTerm(t["kind"], t.get("block", 0),
                                             float(t.get("multiplier", 1.0)))
                                for t in c["terms"]),
                    value=c["value"],
                )
                for c in items
            )

        adv = data.get("advection")
        return cls(
            name=data["name"],
            dim=int(data["dim"]),
            blocks=tuple(Block(b["family"], b.get("bc", "none")) for b in data["blocks"]),
            L=op(data["L"]),
            M=op(data["M"]),
            norm=op(data["norm"]),
            advection=None if adv is None else Advection(
                tuple(tuple(float(v) for v in row) for row in adv["matrix"]),
                tuple(float(v) for v in adv.get("offset", ()))),
            exact_alpha=data.get("exact_alpha"),
            provenance=data.get("provenance", ""),
        )

    @classmethod
    def from_json(cls, text: str) -> "ProblemSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)


def problem_schema() -> dict:
    text = resources.files("coercify").joinpath("problem.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


# ---------------------------------------------------------------- built-ins

def _t(kind, block=0, multiplier=1.0):
    return OperatorTerm(kind, block, multiplier)


def _c(*terms, value="scalar"):
    return Component(tuple(terms), value)


_H1_1D = (_c(_t("identity")), _c(_t("ddx")))
_H1_2D = (_c(_t("identity")), _c(_t("grad"), value="vector"))
_HDIV_H1 = (
    _c(_t("identity", 0), value="vector"),
    _c(_t("div", 0)),
    _c(_t("identity", 1)),
    _c(_t("grad", 1), value="vector"),
)


def _poisson_ls(name, grad_scale):
    op = (_c(_t("identity", 0), _t("grad", 1, grad_scale), value="vector"), _c(_t("div", 0)))
    return ProblemSpec(
        name=name, dim=2,
        blocks=(Block("rt0"), Block("lagrange", "full-dirichlet")),
        L=op, M=op, norm=_HDIV_H1,
    )


def builtin(name: str) -> ProblemSpec:
    """One of the built-in benchmark problems, with its exact constant attached."""
    if name == "ivp-ls":
        op = (_c(_t("ddx"), _t("identity", 0, -1.0)),)
        spec = ProblemSpec(name, 1, (Block("lagrange", "left-dirichlet"),), op, op, _H1_1D)
    elif name == "adv-diff-1d":
        spec = ProblemSpec(
            name, 1, (Block("lagrange", "both-dirichlet"),),
            L=(_c(_t("ddx")),), M=(_c(_t("identity"), _t("ddx")),), norm=_H1_1D,
        )
    elif name == "adv-diff-2d":
        spec = ProblemSpec(
            name, 2, (Block("lagrange", "full-dirichlet"),),
            L=(_c(_t("grad"), value="vector"), _c(_t("identity"), _t("advective"))),
            M=(_c(_t("grad"), value="vector"), _c(_t("identity"))),
            norm=_H1_2D,
            advection=Advection(((0.5, 0.0), (0.0, 0.5)), (0.0, 0.0)),
        )
    elif name == "poisson-ls":
        spec = _poisson_ls(name, 1.0)
    elif name == "poisson-ls-rescaled":
        spec = _poisson_ls(name, 2.0)
    elif name == "unit":
        spec = ProblemSpec(name, 1, (Block("lagrange", "left-dirichlet"),), _H1_1D, _H1_1D, _H1_1D)
    else:
        raise InvalidArgumentError(
            f"unknown problem {name!r}; built-ins are {', '.join(BUILTINS)}")
    exact = oracle.exact_alpha(name)
    return replace(spec, exact_alpha=exact.alpha, provenance=exact.provenance)


def load_problem(name_or_path) -> ProblemSpec:
    """A built-in by name, or a problem read from a JSON file."""
    if str(name_or_path) in BUILTINS:
        return builtin(str(name_or_path))
    path = Path(name_or_path)
    if path.suffix == ".json" and path.is_file():
        return ProblemSpec.from_json(path.read_text(encoding="utf-8"))
    raise InvalidArgumentError(
        f"unknown problem {name_or_path!r}; built-ins are {', '.join(BUILTINS)} "
        "or pass a path to a .json problem file")


# ---------------------------------------------------------------- validation

def term_value(term: OperatorTerm, block: Block) -> str:
    if term.kind == "identity":
        return "vector" if block.family == "rt0" else "scalar"
    return "vector" if term.kind == "grad" else "scalar"


def _structural(spec: ProblemSpec) -> list:
    issues = []
    if spec.dim not in (1, 2):
        issues.append(f"dimension must be 1 or 2, got {spec.dim}")
        return issues
    if not spec.blocks:
        issues.append("trial space has no blocks")
    for i, b in enumerate(spec.blocks):
        if b.family not in FAMILIES:
            issues.append(f"block {i}: unknown family {b.family!r}")
        if b.family == "rt0" and spec.dim != 2:
            issues.append(f"block {i}: Raviart-Thomas needs dim 2")
        if b.bc in ("left-dirichlet", "both-dirichlet") and spec.dim != 1:
            issues.append(f"block {i}: bc {b.bc!r} needs dim 1")
        if b.bc == "full-dirichlet" and spec.dim != 2:
            issues.append(f"block {i}: bc {b.bc!r} needs dim 2")
        if b.family == "rt0" and b.bc != "none":
            issues.append(f"block {i}: Raviart-Thomas blocks take no boundary condition")
    if spec.advection is not None:
        g = np.asarray(spec.advection.matrix, dtype=np.float64)
        off = spec.advection.offset
        if g.shape != (spec.dim, spec.dim) or (off and len(off) != spec.dim):
            issues.append("advection field does not match the problem dimension")

    for opname in ("L", "M", "norm"):
        comps = getattr(spec, opname)
        if not comps:
            issues.append(f"{opname}: no Y-components")
        for ci, comp in enumerate(comps):
            where = f"{opname}[{ci}]"
            if comp.value not in ("scalar", "vector"):
                issues.append(f"{where}: unknown value type {comp.value!r}")
            if not comp.terms:
                issues.append(f"{where}: component has no terms")
            for t in comp.terms:
                if t.kind not in TERM_KINDS:
                    issues.append(f"{where}: unknown term kind {t.kind!r}")
                    continue
                if not 0 <= t.block < len(spec.blocks):
                    issues.append(f"{where}: term {t.kind} refers to missing block {t.block}")
                    continue
                if not math.isfinite(t.multiplier):
                    issues.append(f"{where}: non-finite multiplier")
                block = spec.blocks[t.block]
                if t.kind in ("ddx", "grad", "advective") and block.family != "lagrange":
                    issues.append(f"{where}: type mismatch, {t.kind} on a {block.family} block")
                    continue
                if t.kind == "div" and block.family != "rt0":
                    issues.append(f"{where}: type mismatch, div on a {block.family} block")
                    continue
                if t.kind == "ddx" and spec.dim != 1:
                    issues.append(f"{where}: ddx needs dim 1 (use grad)")
                if t.kind == "advective" and spec.advection is None:
                    issues.append(f"{where}: advective term without an advection field")
                if term_value(t, block) != comp.value:
                    issues.append(
                        f"{where}: type mismatch, {t.kind} gives a {term_value(t, block)} "
                        f"in a {comp.value} component")
    if len(spec.L) != len(spec.M):
        issues.append("L and M have different numbers of Y-components")
    else:
        for ci, (a, b) in enumerate(zip(spec.L, spec.M)):
            if a.value != b.value:
                issues.append(f"L[{ci}] and M[{ci}] map into different value types")
    return issues


def validate(spec: ProblemSpec, samples: int = 100, seed: int = 0) -> list:
    """Diagnostics for ``spec``; an empty list means it is usable.

    Structural checks come first. If they pass, the form is assembled on a
    coarse mesh and ``a(u, u) > 0`` is tested on ``samples`` random discrete
    functions.
    """
    issues = _structural(spec)
    if issues:
        return issues
    from .assembly import assemble_unchecked
    from .mesh import unit_mesh

    try:
        system = assemble_unchecked(spec, unit_mesh(spec.dim, 4 if spec.dim == 1 else 2), 1)
    except CoercifyError as exc:
        return [f"assembly failed: {exc}"]
    if system.ndof == 0:
        return ["trial space has no free DOFs on the coarse check mesh"]
    a = system.A_hat
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((system.ndof, samples))
    vals = np.einsum("ij,ij->j", x, a @ x)
    bad = int(np.sum(vals <= 0.0))
    if bad:
        issues.append(f"sampled coercivity failure: a(u, u) <= 0 for {bad} of {samples} samples")
    bvals = np.einsum("ij,ij->j", x, system.B @ x)
    if np.any(bvals <= 0.0):
        issues.append("norm is not positive on sampled functions")
    return issues
