"""Closed-form compatibility regions and their boundary data.

The quarter-circle region (unit Euclidean ball restricted to the nonnegative
orthant) is the universal lower bound for noise robustness; the cloning
region is what universal asymmetric cloning machines achieve, with an
explicit inequality in every (g, d); and the simplex is its d -> infinity
limit.  Everything here is arithmetic - no solver - so these predicates
serve as independent cross-checks for the SDP results.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import NumericalBreakdown, OutOfRange, ZeroScaling
from .quantum import Membership, as_scaling_vector

__all__ = [
    "BOUNDARY_TOL",
    "CloneMembership",
    "RegionKind",
    "RegionQuery",
    "angular_directions",
    "boundary_csv",
    "clone_membership",
    "clone_pair_membership",
    "clone_triple_slice",
    "f_map",
    "qc_membership",
    "region_boundary_rows",
    "symmetric_clone_value",
    "zhu_region_scale",
]

BOUNDARY_TOL = 1e-9


class RegionKind(str, enum.Enum):
    QC = "QC"
    CLONE_GENERAL = "CloneGeneral"
    CLONE_SYMMETRIC_VALUE = "CloneSymmetricValue"
    CLONE_PAIR = "ClonePair"
    SIMPLEX_LIMIT = "SimplexLimit"


@dataclass(frozen=True)
class RegionQuery:
    """A membership question: which region, its parameters, and the point."""

    kind: RegionKind
    g: int
    d: int
    s: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", RegionKind(self.kind))
        object.__setattr__(self, "s", tuple(float(x) for x in self.s))
        if self.g >= 1 and len(self.s) != self.g:
            raise OutOfRange(
                f"point has {len(self.s)} components for g={self.g}"
            )


class CloneMembership(NamedTuple):
    """Cloning-region verdict; slack > 0 measures violation, <= 0 membership."""

    member: bool
    slack: float

    def __bool__(self) -> bool:
        return self.member


def qc_membership(s: Sequence[float]) -> Membership:
    """Is the point inside the nonnegative unit-ball region?  Margin 1 - sum s_i^2."""
    vec = as_scaling_vector(s)
    margin = 1.0 - float(sum(x * x for x in vec))
    return Membership(member=margin >= -BOUNDARY_TOL, margin=margin)


def clone_membership(g: int, d: int, s: Sequence[float]) -> CloneMembership:
    """Does an asymmetric universal cloning machine achieve scalings s?

    Two algebraically equivalent forms of the criterion are evaluated - the
    expanded inequality and, with t_i = s_i (d^2 - 1) + 1, the compact
    ||t||_1 - (sum sqrt(t_i))^2 / (g + d - 1) <= d (d - 1) - and their
    agreement is asserted before the compact form's slack is returned.
    """
    if g < 2 or d < 2:
        raise OutOfRange(f"cloning region needs g, d >= 2, got g={g}, d={d}")
    vec = as_scaling_vector(s, length=g, unit_interval=True)
    t = [x * (d * d - 1) + 1.0 for x in vec]
    root_sum = sum(math.sqrt(x) for x in t)
    denom = g + d - 1
    slack_compact = sum(t) - root_sum * root_sum / denom - d * (d - 1)
    lhs_expanded = denom * (g - d * d + d + (d * d - 1) * sum(vec))
    slack_expanded = lhs_expanded - root_sum * root_sum
    scale = max(1.0, abs(slack_expanded), denom * abs(slack_compact))
    if abs(slack_expanded - denom * slack_compact) > 1e-9 * scale:
        raise NumericalBreakdown(
            "the two cloning-criterion forms disagree: "
            f"{slack_expanded} vs {denom} * {slack_compact}"
        )
    return CloneMembership(member=bool(slack_compact <= BOUNDARY_TOL),
                           slack=float(slack_compact))


def clone_pair_membership(d: int, s: float, t: float) -> CloneMembership:
    """Two-clone criterion in closed form: s + t - (2/d) sqrt((1-s)(1-t)) <= 1."""
    if d < 2:
        raise OutOfRange(f"cloning region needs d >= 2, got d={d}")
    for name, v in (("s", s), ("t", t)):
        if not 0.0 <= v <= 1.0:
            raise OutOfRange(f"{name} must lie in [0, 1], got {v}")
    slack = s + t - (2.0 / d) * math.sqrt((1.0 - s) * (1.0 - t)) - 1.0
    return CloneMembership(member=bool(slack <= BOUNDARY_TOL), slack=float(slack))


def clone_triple_slice(d: int, s: float, t: float) -> CloneMembership:
    """Three-clone criterion on the symmetric slice (s, t, t)."""
    return clone_membership(3, d, (s, t, t))


def f_map(s: Sequence[float]) -> tuple[float, ...]:
    """Componentwise s -> s / (2 - s); carries [0, 1] onto [0, 1].

    Applied to scalings verified under tracial noise, the image is achievable
    under balanced noise.
    """
    vec = as_scaling_vector(s, unit_interval=True)
    return tuple(x / (2.0 - x) for x in vec)


def symmetric_clone_value(g: int, d: int) -> float:
    """The symmetric boundary point of the cloning region: (g + d) / (g (1 + d))."""
    if g < 1 or d < 1:
        raise OutOfRange(f"need g, d >= 1, got g={g}, d={d}")
    return (g + d) / (g * (1.0 + d))


def zhu_region_scale(g: int, d: int) -> float:
    """Radius sqrt(d - 1) of the ball certified incompatible beyond by the
    trace criterion (degenerate 0 at d = 1)."""
    if g < 1 or d < 1:
        raise OutOfRange(f"need g, d >= 1, got g={g}, d={d}")
    return math.sqrt(d - 1.0)


# --- boundary data --------------------------------------------------------

def angular_directions(count: int) -> list[tuple[float, float]]:
    """count planar unit directions (cos theta, sin theta), theta in (0, pi/2)."""
    if count < 1:
        raise OutOfRange(f"need count >= 1, got {count}")
    out = []
    for k in range(count):
        theta = (k + 0.5) * (math.pi / 2.0) / count
        out.append((math.cos(theta), math.sin(theta)))
    return out


def _ray_cap(direction: Sequence[float]) -> float:
    """Largest t keeping every t * u_i inside [0, 1]."""
    positive = [u for u in direction if u > 0.0]
    if not positive:
        raise ZeroScaling("direction must have at least one positive entry")
    return 1.0 / max(positive)


def _bisect_boundary(member_at, cap: float) -> float:
    """Largest t in [0, cap] with member_at(t), for monotone membership."""
    if member_at(cap):
        return cap
    lo, hi = 0.0, cap
    for _ in range(100):
        mid = (lo + hi) / 2.0
        if member_at(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    return lo


def region_boundary_rows(
    kind: RegionKind,
    g: int,
    d: int,
    directions: Iterable[Sequence[float]] = (),
) -> list[tuple[float, ...]]:
    """Boundary scaling t* along each direction, as rows (u..., t*).

    The symmetric-value kind ignores directions and emits its single
    closed-form point along (1, ..., 1).
    """
    kind = RegionKind(kind)
    if kind is RegionKind.CLONE_SYMMETRIC_VALUE:
        return [(1.0,) * g + (symmetric_clone_value(g, d),)]
    rows: list[tuple[float, ...]] = []
    for raw in directions:
        u = tuple(float(x) for x in raw)
        if kind is not RegionKind.CLONE_PAIR and len(u) != g:
            raise OutOfRange(f"direction {u} has {len(u)} components for g={g}")
        if any(x < 0.0 for x in u):
            raise OutOfRange(f"direction {u} has negative components")
        if kind is RegionKind.QC:
            norm = math.sqrt(sum(x * x for x in u))
            if norm == 0.0:
                raise ZeroScaling("direction must be nonzero")
            t_star = 1.0 / norm
        elif kind is RegionKind.SIMPLEX_LIMIT:
            total = sum(u)
            if total == 0.0:
                raise ZeroScaling("direction must be nonzero")
            t_star = 1.0 / total
        elif kind is RegionKind.CLONE_GENERAL:
            cap = _ray_cap(u)
            t_star = _bisect_boundary(
                lambda t: clone_membership(g, d, tuple(t * x for x in u)).member,
                cap)
        elif kind is RegionKind.CLONE_PAIR:
            if len(u) != 2:
                raise OutOfRange(f"pair boundary needs 2 components, got {len(u)}")
            cap = _ray_cap(u)
            t_star = _bisect_boundary(
                lambda t: clone_pair_membership(d, t * u[0], t * u[1]).member,
                cap)
        else:  # pragma: no cover - enum is exhaustive
            raise OutOfRange(f"unknown region kind {kind}")
        rows.append(u + (t_star,))
    return rows


def boundary_csv(
    kind: RegionKind,
    g: int,
    d: int,
    directions: Iterable[Sequence[float]] = (),
) -> str:
    """CSV text for the boundary rows: direction components, t_star, kind."""
    kind = RegionKind(kind)
    rows = region_boundary_rows(kind, g, d, directions)
    width = len(rows[0]) - 1 if rows else g
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"u{i + 1}" for i in range(width)] + ["t_star", "kind"])
    for row in rows:
        writer.writerow([repr(v) for v in row] + [kind.value])
    return buf.getvalue()
