"""Difference stencils for n-th order generalized derivatives.

A stencil is a finite node/coefficient pair (a_k, A_k) meant to satisfy the
moment conditions

    sum_k A_k a_k^j = 0      for j = 0..n-1,
    sum_k A_k a_k^n = n!,

so that sum_k A_k f(x + a_k h) / h^n converges to the n-th derivative for
smooth f.  This module builds the classical equally-spaced stencils and the
geometric-node (q-power) families in closed form, by exact linear solve, and
by recursion, entirely over the rationals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .qcore import q_binomial

KINDS = (
    "riemann",
    "riemann_symmetric",
    "gaussian_forward",
    "gaussian_shifted",
    "gaussian_symmetric",
    "mz",
    "custom",
)

GAUSSIAN_FAMILIES = ("forward", "shifted", "symmetric")


class StencilError(ValueError):
    """Invalid argument while building or manipulating a stencil."""


class ExcessNodesError(StencilError):
    """Node count other than order+1; only the no-excess case is supported."""


# -- rational plumbing shared with the CLI and JSON formats ------------------


def format_rational(x: Fraction | int) -> str:
    """Render an exact rational as 'p' or 'p/r' with r > 1."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse 'p' or 'p/r' into a Fraction; reject anything else."""
    if not isinstance(text, str):
        raise StencilError(f"expected a rational string, got {type(text).__name__}")
    s = text.strip()
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise StencilError(f"not a rational 'p' or 'p/r': {text!r}") from exc


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        # floats are exact binary rationals; accept them verbatim
        return Fraction(x)
    return Fraction(x)


def _validate_q(q) -> Fraction:
    q = _as_fraction(q)
    if q in (Fraction(0), Fraction(1), Fraction(-1)):
        raise StencilError("ratio q must avoid 0, 1 and -1")
    return q


# -- the stencil itself -------------------------------------------------------


@dataclass(frozen=True)
class Stencil:
    """Immutable node/coefficient stencil of a given derivative order.

    Nodes are kept sorted ascending with coefficients aligned; nodes must be
    distinct and coefficients nonzero.  Construction does not verify the
    moment conditions (see verify_vandermonde), so deliberately broken
    stencils can be represented and inspected.
    """

    order: int
    nodes: tuple
    coeffs: tuple
    kind: str = "custom"
    q: Fraction | None = None

    def __post_init__(self):
        if not isinstance(self.order, int) or self.order < 1:
            raise StencilError("order must be an integer >= 1")
        if self.kind not in KINDS:
            raise StencilError(f"unknown stencil kind {self.kind!r}")
        nodes = [_as_fraction(a) for a in self.nodes]
        coeffs = [_as_fraction(c) for c in self.coeffs]
        if len(nodes) != len(coeffs):
            raise StencilError("nodes and coeffs must have equal length")
        if not nodes:
            raise StencilError("a stencil needs at least one node")
        if len(set(nodes)) != len(nodes):
            raise StencilError("duplicate nodes")
        if any(c == 0 for c in coeffs):
            raise StencilError("zero coefficients are not stored; drop the node instead")
        paired = sorted(zip(nodes, coeffs), key=lambda t: t[0])
        object.__setattr__(self, "nodes", tuple(a for a, _ in paired))
        object.__setattr__(self, "coeffs", tuple(c for _, c in paired))
        object.__setattr__(self, "q", None if self.q is None else _as_fraction(self.q))

    def as_map(self) -> dict:
        return dict(zip(self.nodes, self.coeffs))

    def coeff_at(self, node) -> Fraction:
        node = _as_fraction(node)
        for a, c in zip(self.nodes, self.coeffs):
            if a == node:
                return c
        raise StencilError(f"no node {format_rational(node)} in stencil")

    def __len__(self) -> int:
        return len(self.nodes)


def same_difference(a: Stencil, b: Stencil) -> bool:
    """True when two stencils define the same difference: equal order and
    equal node->coefficient maps, ignoring kind/q bookkeeping."""
    return a.order == b.order and a.nodes == b.nodes and a.coeffs == b.coeffs


def _from_map(order: int, mapping: dict, kind: str, q: Fraction | None) -> Stencil:
    items = [(a, c) for a, c in mapping.items() if c != 0]
    return Stencil(
        order=order,
        nodes=tuple(a for a, _ in items),
        coeffs=tuple(c for _, c in items),
        kind=kind,
        q=q,
    )


# -- normalizing constants for the geometric-node families -------------------


@dataclass(frozen=True)
class GaussianNormalizer:
    """The rational factor that scales a raw q-power difference so its n-th
    moment equals n!.  family is one of forward / shifted / symmetric_even /
    symmetric_odd."""

    family: str
    value: Fraction

    @classmethod
    def compute(cls, family: str, n: int, q) -> "GaussianNormalizer":
        q = _validate_q(q)
        if not isinstance(n, int) or n < 1:
            raise StencilError("order must be an integer >= 1")
        qn = q**n
        if family == "forward":
            den = Fraction(1)
            for j in range(1, n):
                den *= qn - q**j
        elif family == "shifted":
            den = Fraction(1)
            for j in range(n):
                den *= qn - q**j
        elif family == "symmetric_even":
            if n % 2:
                raise StencilError("symmetric_even requires even order")
            den = Fraction(2)
            for j in range(2, n, 2):
                den *= qn - q**j
        elif family == "symmetric_odd":
            if n % 2 == 0:
                raise StencilError("symmetric_odd requires odd order")
            den = Fraction(2)
            for j in range(1, n, 2):
                den *= qn - q**j
        else:
            raise StencilError(f"unknown normalizer family {family!r}")
        return cls(family=family, value=Fraction(math.factorial(n)) / den)


# -- exact linear solve -------------------------------------------------------


def vandermonde_solve(nodes, n: int) -> Stencil:
    """Solve the moment system on the given nodes for derivative order n.

    Exactly n+1 distinct rational nodes are required (the square, uniquely
    solvable case); anything else is unsupported here.  Exact fraction
    elimination, no pivot growth concerns.
    """
    if not isinstance(n, int) or n < 1:
        raise StencilError("order must be an integer >= 1")
    pts = [_as_fraction(a) for a in nodes]
    if len(set(pts)) != len(pts):
        raise StencilError("duplicate nodes")
    if len(pts) != n + 1:
        raise ExcessNodesError(
            f"need exactly {n + 1} nodes for order {n}, got {len(pts)}; "
            "excess-node systems are not supported"
        )
    size = n + 1
    # rows j = 0..n: sum_k A_k a_k^j = (j == n) * n!
    aug = [[pts[k] ** j for k in range(size)] + [Fraction(math.factorial(n)) if j == n else Fraction(0)]
           for j in range(size)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if aug[r][col] != 0), None)
        if pivot is None:
            raise StencilError("singular moment system (nodes not distinct?)")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(size):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    coeffs = [aug[k][size] for k in range(size)]
    if any(c == 0 for c in coeffs):
        raise StencilError("moment solution has a zero coefficient; node set degenerate for this order")
    return Stencil(order=n, nodes=tuple(pts), coeffs=tuple(coeffs), kind="custom", q=None)


# -- closed-form families -----------------------------------------------------


def gaussian_forward(n: int, q) -> Stencil:
    """Order-n forward difference on nodes {0, 1, q, ..., q^(n-1)}."""
    q = _validate_q(q)
    if not isinstance(n, int) or n < 1:
        raise StencilError("order must be an integer >= 1")
    lam = GaussianNormalizer.compute("forward", n, q).value
    mapping = {}
    for k in range(n):
        sign = -1 if k % 2 else 1
        mapping[q ** (n - 1 - k)] = lam * sign * q ** math.comb(k + 1, 2) * q_binomial(n - 1, k)(q)
    tail = Fraction(1)
    for i in range(1, n):
        tail *= 1 - q**i
    mapping[Fraction(0)] = -lam * tail
    return _from_map(n, mapping, "gaussian_forward", q)


def gaussian_shifted(n: int, q) -> Stencil:
    """Order-n shifted difference on nodes {1, q, ..., q^n}."""
    q = _validate_q(q)
    if not isinstance(n, int) or n < 1:
        raise StencilError("order must be an integer >= 1")
    lam = GaussianNormalizer.compute("shifted", n, q).value
    mapping = {}
    for k in range(n + 1):
        sign = -1 if k % 2 else 1
        mapping[q ** (n - k)] = lam * sign * q ** math.comb(k, 2) * q_binomial(n, k)(q)
    return _from_map(n, mapping, "gaussian_shifted", q)


def _gaussian_symmetric_closed(n: int, q: Fraction) -> dict:
    """Raw node->coefficient map for the symmetric family, unnormalized."""
    m = (n + 1) // 2
    q2 = q * q
    mapping = {}
    if n % 2 == 0:
        for k in range(m):
            sign = -1 if k % 2 else 1
            c = sign * q ** (k * (k + 1)) * q_binomial(m - 1, k)(q2)
            node = q ** (m - 1 - k)
            mapping[node] = mapping.get(node, Fraction(0)) + c
            mapping[-node] = mapping.get(-node, Fraction(0)) + c
        center = Fraction(2)
        for i in range(1, m):
            center *= 1 - q ** (2 * i)
        mapping[Fraction(0)] = mapping.get(Fraction(0), Fraction(0)) - center
    else:
        for k in range(m):
            sign = -1 if k % 2 else 1
            c = sign * q ** (k * k) * q_binomial(m - 1, k)(q2)
            node = q ** (m - 1 - k)
            mapping[node] = mapping.get(node, Fraction(0)) + c
            mapping[-node] = mapping.get(-node, Fraction(0)) - c
    return mapping


def gaussian_symmetric(n: int, q) -> Stencil:
    """Order-n symmetric difference on nodes {+-q^i} (plus 0 for even n).

    The closed form is cross-validated against the exact moment solve on the
    same node set; the solver is authoritative, so a closed-form slip cannot
    ship silently.
    """
    q = _validate_q(q)
    if not isinstance(n, int) or n < 1:
        raise StencilError("order must be an integer >= 1")
    family = "symmetric_even" if n % 2 == 0 else "symmetric_odd"
    lam = GaussianNormalizer.compute(family, n, q).value
    mapping = {node: lam * c for node, c in _gaussian_symmetric_closed(n, q).items()}
    built = _from_map(n, mapping, "gaussian_symmetric", q)
    solved = vandermonde_solve(built.nodes, n)
    if not same_difference(built, solved):
        raise AssertionError(
            f"closed-form symmetric stencil disagrees with moment solve at n={n}, q={q}"
        )
    return built


def riemann_classic(n: int) -> Stencil:
    """Classical order-n difference: coefficient (-1)^k C(n,k) at node n-k."""
    if not isinstance(n, int) or n < 1:
        raise StencilError("order must be an integer >= 1")
    mapping = {Fraction(n - k): Fraction((-1) ** k * math.comb(n, k)) for k in range(n + 1)}
    return _from_map(n, mapping, "riemann", None)


def riemann_symmetric(n: int) -> Stencil:
    """Classical symmetric order-n difference: (-1)^k C(n,k) at node n/2 - k."""
    if not isinstance(n, int) or n < 1:
        raise StencilError("order must be an integer >= 1")
    mapping = {Fraction(n, 2) - k: Fraction((-1) ** k * math.comb(n, k)) for k in range(n + 1)}
    return _from_map(n, mapping, "riemann_symmetric", None)


def mz_stencil(n: int) -> Stencil:
    """The q = 2 forward stencil on nodes {0, 1, 2, 4, ..., 2^(n-1)}."""
    base = gaussian_forward(n, Fraction(2))
    return Stencil(order=n, nodes=base.nodes, coeffs=base.coeffs, kind="mz", q=Fraction(2))


# -- recursive construction ---------------------------------------------------


def _dilate(mapping: dict, r: Fraction) -> dict:
    return {r * a: c for a, c in mapping.items()}


def _combine(mapping_q: dict, mapping_1: dict, factor: Fraction) -> dict:
    """mapping_q - factor * mapping_1, dropping exact zeros."""
    out = dict(mapping_q)
    for a, c in mapping_1.items():
        out[a] = out.get(a, Fraction(0)) - factor * c
    return {a: c for a, c in out.items() if c != 0}


def recursive_build(family: str, n: int, q) -> Stencil:
    """Build a geometric-node stencil by the order-raising recursion.

    forward / shifted step from order r-1 to r via
        D_r(h) = D_{r-1}(q h) - q^(r-1) D_{r-1}(h),
    the symmetric family steps by two via
        D_r(h) = D_{r-2}(q h) - q^(r-2) D_{r-2}(h),
    each followed by the family's normalizing factor.  The result must equal
    the closed form exactly.
    """
    q = _validate_q(q)
    if not isinstance(n, int) or n < 1:
        raise StencilError("order must be an integer >= 1")
    if family == "forward":
        mapping = {Fraction(1): Fraction(1), Fraction(0): Fraction(-1)}
        for level in range(2, n + 1):
            mapping = _combine(_dilate(mapping, q), mapping, q ** (level - 1))
        lam = GaussianNormalizer.compute("forward", n, q).value
        kind = "gaussian_forward"
    elif family == "shifted":
        mapping = {q: Fraction(1), Fraction(1): Fraction(-1)}
        for level in range(2, n + 1):
            mapping = _combine(_dilate(mapping, q), mapping, q ** (level - 1))
        lam = GaussianNormalizer.compute("shifted", n, q).value
        kind = "gaussian_shifted"
    elif family == "symmetric":
        if n % 2:
            mapping = {Fraction(1): Fraction(1), Fraction(-1): Fraction(-1)}
            start = 3
            norm_family = "symmetric_odd"
        else:
            mapping = {Fraction(1): Fraction(1), Fraction(0): Fraction(-2), Fraction(-1): Fraction(1)}
            start = 4
            norm_family = "symmetric_even"
        for level in range(start, n + 1, 2):
            mapping = _combine(_dilate(mapping, q), mapping, q ** (level - 2))
        lam = GaussianNormalizer.compute(norm_family, n, q).value
        kind = "gaussian_symmetric"
    else:
        raise StencilError(f"unknown recursion family {family!r}; expected one of {GAUSSIAN_FAMILIES}")
    mapping = {a: lam * c for a, c in mapping.items()}
    return _from_map(n, mapping, kind, q)


# -- transforms and checks ----------------------------------------------------


def scale(s: Stencil, r) -> Stencil:
    """Scale a stencil by r: nodes r*a_k, coefficients r^(-n) A_k.

    Preserves every moment condition; kind and q are carried along as
    lineage, so scale(s, 1) == s and scale(scale(s, r), 1/r) == s exactly.
    """
    r = _as_fraction(r)
    if r == 0:
        raise StencilError("scale factor must be nonzero")
    rn = r ** (-s.order)
    return Stencil(
        order=s.order,
        nodes=tuple(r * a for a in s.nodes),
        coeffs=tuple(rn * c for c in s.coeffs),
        kind=s.kind,
        q=s.q,
    )


def verify_vandermonde(s: Stencil) -> list[tuple[int, Fraction]]:
    """Exact residuals (j, sum_k A_k a_k^j - target_j) for j = 0..order."""
    out = []
    for j in range(s.order + 1):
        total = sum((c * a**j for a, c in zip(s.nodes, s.coeffs)), Fraction(0))
        target = Fraction(math.factorial(s.order)) if j == s.order else Fraction(0)
        out.append((j, total - target))
    return out


def is_symmetric(s: Stencil) -> bool:
    """True iff the node set is symmetric about 0 with coefficients matching
    under a -> -a up to the parity sign (-1)^order."""
    sign = -1 if s.order % 2 else 1
    m = s.as_map()
    for a, c in m.items():
        if -a not in m or m[-a] != sign * c:
            return False
    return True


# -- canonical JSON -----------------------------------------------------------


def stencil_to_jsonable(s: Stencil) -> dict:
    """The canonical JSON object: fixed key order, 'p/r' rational strings,
    ascending nodes."""
    return {
        "order": s.order,
        "kind": s.kind,
        "q": None if s.q is None else format_rational(s.q),
        "nodes": [format_rational(a) for a in s.nodes],
        "coeffs": [format_rational(c) for c in s.coeffs],
    }


def stencil_to_json(s: Stencil) -> str:
    return json.dumps(stencil_to_jsonable(s), indent=2)


def stencil_from_json(text: str) -> Stencil:
    """Parse the canonical JSON form back into a Stencil."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StencilError(f"bad stencil JSON: {exc}") from exc
    required = {"order", "kind", "q", "nodes", "coeffs"}
    if not isinstance(obj, dict) or not required.issubset(obj):
        raise StencilError(f"stencil JSON must carry keys {sorted(required)}")
    return Stencil(
        order=obj["order"],
        nodes=tuple(parse_rational(a) for a in obj["nodes"]),
        coeffs=tuple(parse_rational(c) for c in obj["coeffs"]),
        kind=obj["kind"],
        q=None if obj["q"] is None else parse_rational(obj["q"]),
    )
