"""Degree-distribution algebra for LDPC ensembles.

Two views of an ensemble are used.  :class:`DegreeDistribution` is the edge
perspective pair ``(lambda, rho)``: ``lam[i]`` is the fraction of edges
attached to variable nodes of degree ``i``, and likewise ``rho`` for checks.
:class:`Ensemble` keeps the variable side as a node distribution instead,
which is the only way to describe matrices that have all-zero columns.

Coefficients may be ``int``, ``float`` or :class:`fractions.Fraction`; exact
inputs stay exact through every operation here.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Union

import numpy as np
from numba import njit

TOL = 1e-9

Coeffs = Mapping[int, Union[Fraction, float]]


def _clean(coeffs: Coeffs, name: str, *, allow_zero_degree: bool) -> dict:
    out = {}
    for deg, c in coeffs.items():
        deg = int(deg)
        if deg < 0 or (deg == 0 and not allow_zero_degree):
            raise ValueError(f"{name}: degree {deg} not allowed")
        if c < -TOL or c > 1 + TOL:
            raise ValueError(f"{name}: coefficient {c} of degree {deg} outside [0, 1]")
        if c != 0:
            out[deg] = c
    if out and abs(float(sum(out.values())) - 1.0) > TOL:
        raise ValueError(f"{name}: coefficients sum to {float(sum(out.values()))}, not 1")
    return dict(sorted(out.items()))


def _integral(coeffs: Coeffs):
    """``int_0^1 sum c_i x^(i-1) dx``."""
    return sum(_div(c, d) for d, c in coeffs.items())


def _div(a, b):
    if isinstance(a, (Fraction, int)) and isinstance(b, (Fraction, int)):
        return Fraction(a) / Fraction(b)
    return float(a) / float(b)


def _normalize(coeffs: dict) -> dict:
    total = sum(coeffs.values())
    return {d: _div(c, total) for d, c in sorted(coeffs.items()) if c != 0}


@dataclass(frozen=True)
class DegreeDistribution:
    """Edge-perspective degree distribution pair.

    An empty pair (no edges at all) describes a matrix with no rows.
    """

    lam: dict = field(default_factory=dict)
    rho: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lam", _clean(self.lam, "lambda", allow_zero_degree=False))
        object.__setattr__(self, "rho", _clean(self.rho, "rho", allow_zero_degree=False))
        if bool(self.lam) != bool(self.rho):
            raise ValueError("one side of the distribution is empty and the other is not")

    @property
    def is_empty(self) -> bool:
        return not self.lam

    @classmethod
    def regular(cls, var_degree: int, check_degree: int) -> DegreeDistribution:
        return cls({var_degree: Fraction(1)}, {check_degree: Fraction(1)})

    def __str__(self) -> str:
        return f"lambda={format_polynomial(self.lam)} rho={format_polynomial(self.rho)}"


@dataclass(frozen=True)
class NodeDistribution:
    """Fraction of variable nodes of each degree (degree 0 allowed)."""

    v: dict

    def __post_init__(self):
        cleaned = _clean(self.v, "v", allow_zero_degree=True)
        if not cleaned:
            raise ValueError("node distribution is empty")
        object.__setattr__(self, "v", cleaned)

    @property
    def mean_degree(self):
        return sum(d * c for d, c in self.v.items())


@dataclass(frozen=True)
class Ensemble:
    """Variable nodes in node perspective, checks in edge perspective."""

    nodes: NodeDistribution
    rho: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rho", _clean(self.rho, "rho", allow_zero_degree=False))
        if (self.nodes.mean_degree > 0) != bool(self.rho):
            raise ValueError("check side must be given exactly when there are edges")

    @property
    def checks_per_variable(self):
        """Ratio ``n_checks / n_vars``."""
        if not self.rho:
            return 0
        return self.nodes.mean_degree * _integral(self.rho)

    def to_edge(self) -> DegreeDistribution:
        """Edge-perspective view; fails if some but not all nodes have degree 0."""
        if self.nodes.mean_degree == 0:
            return DegreeDistribution()
        if 0 in self.nodes.v:
            raise ValueError("degree-0 variable nodes have no edge-perspective description")
        return DegreeDistribution(node_to_edge(self.nodes), self.rho)


EnsembleLike = Union[DegreeDistribution, Ensemble]


def as_ensemble(d: EnsembleLike) -> Ensemble:
    if isinstance(d, Ensemble):
        return d
    if d.is_empty:
        return Ensemble(NodeDistribution({0: Fraction(1)}), {})
    return Ensemble(edge_to_node(d), d.rho)


# -- conversions -----------------------------------------------------------


def edge_to_node(d: DegreeDistribution | Coeffs) -> NodeDistribution:
    """``v_i`` proportional to ``lambda_i / i``."""
    lam = d.lam if isinstance(d, DegreeDistribution) else d
    if not lam:
        raise ValueError("empty distribution has no node view")
    return NodeDistribution(_normalize({i: _div(c, i) for i, c in lam.items()}))


def node_to_edge(v: NodeDistribution | Coeffs) -> dict:
    """Edge-perspective variable coefficients; degree-0 nodes are dropped."""
    coeffs = v.v if isinstance(v, NodeDistribution) else v
    weighted = {i: i * c for i, c in coeffs.items() if i > 0 and c != 0}
    if not weighted:
        raise ValueError("every node has degree 0, so there are no edges")
    return _normalize(weighted)


def design_rate(d: EnsembleLike):
    """``1 - n_checks / n_vars`` for the ensemble."""
    return 1 - as_ensemble(d).checks_per_variable


# -- combining and splitting -----------------------------------------------


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {d: c for d, c in sorted(out.items()) if c != 0}


def _poly_div(num: dict, den: dict) -> dict | None:
    """Exact quotient ``num / den`` or None if the division leaves a remainder."""
    d0 = min(den)
    c0 = den[d0]
    top = max(num)
    rem = dict(num)
    quotient = {}
    for k in range(max(0, min(num) - d0), top - max(den) + 1):
        c = rem.get(k + d0, 0)
        if abs(float(c)) <= TOL:
            continue
        q = _div(c, c0)
        quotient[k] = q
        for j, y in den.items():
            rem[k + j] = rem.get(k + j, 0) - q * y
    if any(abs(float(c)) > TOL for c in rem.values()):
        return None
    return quotient


def combine_stacked(g: EnsembleLike, g1: EnsembleLike) -> DegreeDistribution:
    """Distribution of the vertically stacked matrix ``[G; G1]``.

    Column degrees add, so the node distributions multiply as generating
    functions.  Check degrees are untouched, so the check side is the mixture
    of both sides weighted by their edge counts.
    """
    return combine_stacked_nodes(g, g1).to_edge()


def combine_stacked_nodes(g: EnsembleLike, g1: EnsembleLike) -> Ensemble:
    """Like :func:`combine_stacked` but keeps the node view (degree 0 allowed)."""
    a, b = as_ensemble(g), as_ensemble(g1)
    nodes = NodeDistribution(_poly_mul(a.nodes.v, b.nodes.v))
    ea, eb = a.nodes.mean_degree, b.nodes.mean_degree
    total = ea + eb
    rho: dict = {}
    if total:
        for ens, weight in ((a, ea), (b, eb)):
            for d, c in ens.rho.items():
                rho[d] = rho.get(d, 0) + _div(weight * c, total)
    return Ensemble(nodes, rho)


def split_residual(d1: EnsembleLike, d2: EnsembleLike) -> Ensemble | None:
    """Ensemble ``R`` with ``combine_stacked(d2, R) == d1``, or None if none exists.

    The residual is infeasible when the variable generating functions do not
    divide exactly or when a coefficient on either side would be negative.
    """
    a, b = as_ensemble(d1), as_ensemble(d2)
    nodes = _poly_div(a.nodes.v, b.nodes.v)
    if nodes is None or any(float(c) < -TOL for c in nodes.values()):
        return None
    nodes = {d: c for d, c in nodes.items() if float(c) > TOL}
    ea, eb = a.nodes.mean_degree, b.nodes.mean_degree
    diff = ea - eb
    if float(diff) < -TOL:
        return None
    if abs(float(diff)) <= TOL:
        return Ensemble(NodeDistribution({0: Fraction(1)}), {})
    rho = {}
    for d in sorted(set(a.rho) | set(b.rho)):
        c = _div(ea * a.rho.get(d, 0) - eb * b.rho.get(d, 0), diff)
        if float(c) < -TOL:
            return None
        if float(c) > TOL:
            rho[d] = c
    try:
        return Ensemble(NodeDistribution(nodes), rho)
    except ValueError:
        return None


# -- density evolution -----------------------------------------------------


def evaluate(coeffs: Coeffs, x: float) -> float:
    """``sum c_i x^(i-1)``."""
    return float(sum(float(c) * x ** (d - 1) for d, c in coeffs.items()))


@njit(cache=True)
def _de_converges(eps, lam_deg, lam_c, rho_deg, rho_c, max_iter, target):
    x = eps
    for _ in range(max_iter):
        y = 1.0 - x
        r = 0.0
        for k in range(rho_deg.shape[0]):
            r += rho_c[k] * y ** (rho_deg[k] - 1)
        z = 1.0 - r
        lv = 0.0
        for k in range(lam_deg.shape[0]):
            lv += lam_c[k] * z ** (lam_deg[k] - 1)
        x = eps * lv
        if x < target:
            return True
    return False


def _arrays(coeffs: Coeffs):
    degs = np.array(sorted(coeffs), dtype=np.int64)
    vals = np.array([float(coeffs[d]) for d in degs], dtype=np.float64)
    return degs, vals


def de_converges(d: DegreeDistribution, eps: float, *, max_iter=5000, target=1e-8) -> bool:
    """Whether ``x <- eps * lambda(1 - rho(1 - x))`` from ``x = eps`` falls below ``target``."""
    return bool(_de_converges(float(eps), *_arrays(d.lam), *_arrays(d.rho), max_iter, target))


def de_threshold(
    d: EnsembleLike, *, tol: float = 1e-4, max_iter: int = 5000, target: float = 1e-8
) -> float:
    """Erasure threshold of the ensemble under peeling decoding.

    Bisection on the channel erasure probability; returns the largest value
    known to converge, accurate to ``tol``.
    """
    if isinstance(d, Ensemble):
        d = d.to_edge()
    if d.is_empty:
        return 1.0
    lam, rho = _arrays(d.lam), _arrays(d.rho)
    lo, hi = 0.0, 1.0
    if _de_converges(1.0, *lam, *rho, max_iter, target):
        return 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _de_converges(mid, *lam, *rho, max_iter, target):
            lo = mid
        else:
            hi = mid
    return lo


def swapped(d: DegreeDistribution) -> DegreeDistribution:
    """Pair for the transposed matrix: variable and check sides exchanged."""
    return DegreeDistribution(d.rho, d.lam)


# -- text formats ----------------------------------------------------------

_TERM = re.compile(r"^\s*([0-9.eE/+-]*)\s*\*?\s*(x(?:\s*\^\s*(\d+))?)?\s*$")


def _number(text: str):
    text = text.strip()
    if not text:
        return Fraction(1)
    try:
        return Fraction(text)
    except ValueError:
        return float(text)


def parse_polynomial(text: str, *, shift: int = 1) -> dict:
    """Parse ``"0.6087x+0.3913x^2"`` into ``{degree: coeff}``.

    The exponent of ``x`` is ``degree - shift``: edge distributions use the
    default ``shift=1``; node distributions use ``shift=0``.
    """
    body = text.replace(" ", "").replace("-", "+-").replace("e+-", "e-").replace("E+-", "E-")
    out: dict = {}
    for term in filter(None, body.split("+")):
        m = _TERM.match(term)
        if not m:
            raise ValueError(f"cannot parse polynomial term {term!r}")
        coef_text, has_x, power = m.groups()
        if coef_text in ("", "-") and not has_x:
            raise ValueError(f"cannot parse polynomial term {term!r}")
        coef = _number(coef_text) if coef_text != "-" else -1
        exponent = (int(power) if power else 1) if has_x else 0
        out[exponent + shift] = out.get(exponent + shift, 0) + coef
    return out


def format_polynomial(coeffs: Coeffs, *, shift: int = 1) -> str:
    terms = []
    for d, c in sorted(coeffs.items()):
        e = d - shift
        c_text = f"{float(c):.6g}"
        if e == 0:
            terms.append(c_text)
        else:
            terms.append(("" if c == 1 else c_text) + "x" + (f"^{e}" if e != 1 else ""))
    return "+".join(terms) if terms else "0"


def read_distribution(path) -> EnsembleLike:
    """Read ``lambda d c`` / ``rho d c`` / ``v d c`` lines.

    A file with ``v`` lines describes an :class:`Ensemble`; otherwise a
    :class:`DegreeDistribution`.  Blank lines and ``#`` comments are ignored.
    """
    sides: dict[str, dict] = {"lambda": {}, "rho": {}, "v": {}}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] not in sides:
            raise ValueError(f"{path}:{lineno}: expected '<lambda|rho|v> <degree> <coeff>'")
        sides[parts[0]][int(parts[1])] = _number(parts[2])
    if sides["v"]:
        if sides["lambda"]:
            raise ValueError(f"{path}: give either lambda or v lines, not both")
        return Ensemble(NodeDistribution(sides["v"]), sides["rho"])
    return DegreeDistribution(sides["lambda"], sides["rho"])


def write_distribution(d: EnsembleLike, path) -> None:
    lines = []
    if isinstance(d, Ensemble):
        lines += [f"v {k} {c}" for k, c in d.nodes.v.items()]
    else:
        lines += [f"lambda {k} {c}" for k, c in d.lam.items()]
    lines += [f"rho {k} {c}" for k, c in d.rho.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def coefficients_close(a: Coeffs, b: Coeffs, tol: float = TOL) -> bool:
    keys = set(a) | set(b)
    return all(math.isclose(float(a.get(k, 0)), float(b.get(k, 0)), abs_tol=tol) for k in keys)
