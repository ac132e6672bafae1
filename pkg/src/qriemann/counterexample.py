"""Group-supported functions that separate generalized from ordinary derivatives.

The machinery: take the multiplicative group G generated by a few primes, a
sign character chi on G, and a positive exponent s, and form

    f(x) = chi(x) * x^s   for x in G,   f(x) = 0 elsewhere (including x <= 0).

Applying an order-n stencil at the origin collapses, for steps h in G, to
chi(h) * phi(s) * h^s where phi is an exponential sum over the positive
stencil nodes that lie in G.  A root s* of phi in (n-1, n) then makes the
n-th difference quotient vanish while f itself is too rough for the ordinary
n-th derivative: exactly the separation the named cases below reproduce.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .evaluator import MP_DPS, _exact_apply, _mp_apply, _to_mpf, peano_bound_check, FunctionHandle
from .stencil import (
    Stencil,
    _as_fraction,
    format_rational,
    riemann_classic,
    riemann_symmetric,
    scale,
    stencil_to_jsonable,
    vandermonde_solve,
)

DEFAULT_SEED = 1729

UNBOUNDED_THRESHOLD = 1e6
UNBOUNDED_MAX_J = 60


class CounterexampleError(ValueError):
    """Invalid argument or violated precondition in counterexample machinery."""


class NoSignChangeError(CounterexampleError):
    """The bracketing interval carries no strict sign change of phi."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class MultiplicativeGroup:
    """The subgroup of positive rationals generated by distinct primes."""

    generators: tuple

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise CounterexampleError("need at least one generator")
        if len(set(gens)) != len(gens):
            raise CounterexampleError("generators must be distinct")
        for g in gens:
            if not isinstance(g, int) or not _is_prime(g):
                raise CounterexampleError(f"generator {g!r} is not a prime")
        object.__setattr__(self, "generators", gens)


def membership(group: MultiplicativeGroup, x) -> tuple | None:
    """Exponent vector of x over the generators, or None if x is outside G.

    Requires x > 0; the group lives in the positive rationals.
    """
    x = _as_fraction(x)
    if x <= 0:
        raise CounterexampleError("membership requires x > 0")
    num, den = x.numerator, x.denominator
    exps = []
    for g in group.generators:
        e = 0
        while num % g == 0:
            num //= g
            e += 1
        while den % g == 0:
            den //= g
            e -= 1
        exps.append(e)
    if num != 1 or den != 1:
        return None
    return tuple(exps)


@dataclass(frozen=True)
class GroupFunction:
    """f(x) = chi(x) x^s on G, 0 off G; chi is the sign character (-1)^(c.e)."""

    group: MultiplicativeGroup
    character: tuple
    exponent: object  # positive real: int, Fraction, or float

    def __post_init__(self):
        bits = tuple(self.character)
        if len(bits) != len(self.group.generators):
            raise CounterexampleError("character length must match generator count")
        if any(b not in (0, 1) for b in bits):
            raise CounterexampleError("character entries must be bits 0/1")
        object.__setattr__(self, "character", bits)
        s = self.exponent
        if isinstance(s, float):
            if not math.isfinite(s) or s <= 0:
                raise CounterexampleError("exponent must be a positive real")
        elif isinstance(s, (int, Fraction)):
            if s <= 0:
                raise CounterexampleError("exponent must be a positive real")
        else:
            raise CounterexampleError(f"bad exponent type {type(s).__name__}")

    def chi(self, exponents) -> int:
        return -1 if sum(c * e for c, e in zip(self.character, exponents)) % 2 else 1

    def _integer_exponent(self) -> int | None:
        s = self.exponent
        if isinstance(s, int):
            return s
        if isinstance(s, Fraction) and s.denominator == 1:
            return int(s)
        if isinstance(s, float) and s.is_integer():
            return int(s)
        return None

    def value_exact(self, x: Fraction) -> Fraction | None:
        """Exact value, or None when x is in G but the exponent is not integral.

        Off the support (x <= 0 or x outside G) the value is exactly 0
        whatever the exponent, so differences built entirely off-support
        cancel to literal zero.
        """
        x = _as_fraction(x)
        if x <= 0:
            return Fraction(0)
        e = membership(self.group, x)
        if e is None:
            return Fraction(0)
        n = self._integer_exponent()
        if n is None:
            return None
        return self.chi(e) * x**n

    def value_mp(self, x: Fraction):
        """mpmath value; call inside an mp.workdps block."""
        x = _as_fraction(x)
        if x <= 0:
            return mp.mpf(0)
        e = membership(self.group, x)
        if e is None:
            return mp.mpf(0)
        s = self.exponent
        sm = _to_mpf(s) if isinstance(s, Fraction) else mp.mpf(s)
        return self.chi(e) * mp.power(_to_mpf(x), sm)

    def handle(self) -> FunctionHandle:
        return FunctionHandle.group_function(self)


def evaluate(f: GroupFunction, x):
    """f at a single point: exact Fraction when available, else float."""
    x = _as_fraction(x)
    v = f.value_exact(x)
    if v is not None:
        return v
    with mp.workdps(MP_DPS):
        return float(f.value_mp(x))


# -- exponential sums ---------------------------------------------------------


@dataclass(frozen=True)
class ExponentialSum:
    """phi(s) = sum_i c_i * b_i^s with rational c_i != 0 and distinct rational
    bases b_i > 0, kept sorted by descending base."""

    terms: tuple

    def __post_init__(self):
        cleaned = []
        for c, b in self.terms:
            c, b = _as_fraction(c), _as_fraction(b)
            if b <= 0:
                raise CounterexampleError("bases must be positive")
            if c != 0:
                cleaned.append((c, b))
        if not cleaned:
            raise CounterexampleError("exponential sum needs at least one nonzero term")
        bases = [b for _, b in cleaned]
        if len(set(bases)) != len(bases):
            raise CounterexampleError("duplicate bases")
        cleaned.sort(key=lambda t: t[1], reverse=True)
        object.__setattr__(self, "terms", tuple(cleaned))

    def eval_exact(self, s: int) -> Fraction:
        if not isinstance(s, int) or s < 0:
            raise CounterexampleError("eval_exact requires an integer s >= 0")
        return sum((c * b**s for c, b in self.terms), Fraction(0))

    def eval_mp(self, s):
        """mpmath value; call inside an mp.workdps block."""
        sm = _to_mpf(s) if isinstance(s, Fraction) else mp.mpf(s)
        return mp.fsum(_to_mpf(c) * mp.power(_to_mpf(b), sm) for c, b in self.terms)

    def __call__(self, s) -> float:
        if isinstance(s, int) or (isinstance(s, float) and s.is_integer()):
            return float(self.eval_exact(int(s)))
        with mp.workdps(MP_DPS):
            return float(self.eval_mp(s))

    def primitive(self) -> tuple["ExponentialSum", Fraction]:
        """Divide out the positive rational content; returns (primitive, content)."""
        g = 0
        l = 1
        for c, _ in self.terms:
            g = math.gcd(g, abs(c.numerator))
            l = math.lcm(l, c.denominator)
        content = Fraction(g, l)
        return ExponentialSum(tuple((c / content, b) for c, b in self.terms)), content

    def negated(self) -> "ExponentialSum":
        return ExponentialSum(tuple((-c, b) for c, b in self.terms))


def eval_exact(phi: ExponentialSum, s: int) -> Fraction:
    return phi.eval_exact(s)


def phi_from_stencil(s: Stencil, f: GroupFunction) -> ExponentialSum:
    """The exponential sum governing steps inside G:

        sum_k A_k f(a_k h) = chi(h) * phi(s) * h^s   for h in G,

    with one term chi(a_k) A_k * a_k^s per positive node a_k in G.  Nodes
    that are nonpositive or outside G contribute nothing for h in G and are
    skipped.  The character's sign convention is kept raw here, so the
    identity above holds exactly; presentation-level sign or content
    normalization is a separate, named step.
    """
    terms = []
    for a, c in zip(s.nodes, s.coeffs):
        if a <= 0:
            continue
        e = membership(f.group, a)
        if e is None:
            continue
        terms.append((c * f.chi(e), a))
    if not terms:
        raise CounterexampleError("no positive stencil node lies in the group")
    return ExponentialSum(tuple(terms))


def _phi_signed_value(phi: ExponentialSum, s: float):
    """(sign, magnitude-ish value) of phi at s; exact at integers."""
    if float(s).is_integer():
        v = phi.eval_exact(int(round(s)))
        return v, (v > 0) - (v < 0)
    v = phi.eval_mp(s)
    return v, (1 if v > 0 else (-1 if v < 0 else 0))


def find_exponent(phi: ExponentialSum, lo, hi, tol: float = 1e-12) -> float:
    """Bisect a sign change of phi on [lo, hi] down to float resolution.

    Requires phi(lo) * phi(hi) < 0 strictly.  Integer probes are evaluated
    exactly, so an exact integer root is returned exactly.  Among the final
    bracketing endpoints the one with the smaller |phi| wins; refinement past
    tol is free and keeps the residual as small as doubles allow.
    """
    lo, hi = float(lo), float(hi)
    if not (lo < hi):
        raise CounterexampleError("need lo < hi")
    if not (tol > 0):
        raise CounterexampleError("tol must be positive")

    def as_mpf(v):
        return _to_mpf(v) if isinstance(v, Fraction) else v

    with mp.workdps(MP_DPS):
        vlo, slo = _phi_signed_value(phi, lo)
        vhi, shi = _phi_signed_value(phi, hi)
        if slo == 0 or shi == 0 or slo == shi:
            raise NoSignChangeError(
                f"phi({lo}) * phi({hi}) < 0 is required, strictly; "
                "no admissible sign change on this interval"
            )
        vlo, vhi = as_mpf(vlo), as_mpf(vhi)
        for _ in range(200):
            mid = (lo + hi) / 2
            if not (lo < mid < hi):
                break  # float resolution reached
            vmid, smid = _phi_signed_value(phi, mid)
            if smid == 0:
                return mid
            if smid == slo:
                lo, vlo = mid, as_mpf(vmid)
            else:
                hi, vhi = mid, as_mpf(vmid)
        return lo if abs(vlo) <= abs(vhi) else hi


# -- the full verification ----------------------------------------------------


@dataclass
class CounterexampleReport:
    """Everything the JSON report carries, plus working details for tests."""

    stencil: Stencil
    generators: tuple
    character: tuple
    exponent_interval: tuple
    exponent: float
    phi: ExponentialSum  # presentation form (content removed, sign as printed)
    phi_endpoints: tuple  # exact Fractions of phi at the interval endpoints
    checks: dict
    details: dict

    def passed(self) -> bool:
        return all(self.checks.values())

    def to_jsonable(self) -> dict:
        return {
            "stencil": stencil_to_jsonable(self.stencil),
            "generators": list(self.generators),
            "character": list(self.character),
            "exponent_interval": list(self.exponent_interval),
            "exponent": self.exponent,
            "phi_terms": [
                {"coeff": format_rational(c), "base": format_rational(b)}
                for c, b in self.phi.terms
            ],
            "phi_endpoints": [format_rational(v) for v in self.phi_endpoints],
            "checks": dict(self.checks),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_jsonable(), indent=2)


def _sample_members(group: MultiplicativeGroup, rng: random.Random, count: int,
                    max_exp: int = 10) -> list:
    """Members of G in (0, 1]: products of generator powers, exponents <= 0."""
    out = []
    k = len(group.generators)
    while len(out) < count:
        e = [rng.randint(-max_exp, 0) for _ in range(k)]
        if all(v == 0 for v in e):
            continue
        h = Fraction(1)
        for g, ei in zip(group.generators, e):
            h *= Fraction(g) ** ei
        out.append(h)
    return out


def _escape_primes(group: MultiplicativeGroup, count: int = 2) -> list:
    out = []
    p = 2
    while len(out) < count:
        if _is_prime(p) and p not in group.generators:
            out.append(p)
        p += 1
    return out


def _sample_nonmembers(group: MultiplicativeGroup, stencil: Stencil,
                       rng: random.Random, count: int) -> list:
    """Positive rationals outside G such that no positive stencil node maps
    them back into G; differences over them must cancel to literal zero."""
    primes = _escape_primes(group)
    positive_nodes = [a for a in stencil.nodes if a > 0]
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 50 * count:
            raise CounterexampleError("nonmember sampling failed to converge")
        if attempts % 3 == 0:
            h = Fraction(rng.random())  # exact dyadic; almost surely escapes G
            if h <= 0:
                continue
        else:
            base = _sample_members(group, rng, 1)[0]
            h = base / primes[attempts % len(primes)]
        if membership(group, h) is not None:
            continue
        if any(membership(group, a * h) is not None for a in positive_nodes):
            continue
        out.append(h)
    return out


def _check_difference_vanishes(stencil: Stencil, f: GroupFunction, s_star: float,
                               members: list, nonmembers: list) -> tuple[bool, dict]:
    handle = f.handle()
    x0 = Fraction(0)
    with mp.workdps(MP_DPS):
        s_mp = mp.mpf(s_star)
        worst = mp.mpf(0)
        for h in members:
            exact = _exact_apply(stencil, handle, x0, h)
            lhs = abs(_to_mpf(exact)) if exact is not None else abs(_mp_apply(stencil, handle, x0, h))
            rhs = mp.mpf("1e-9") * mp.power(_to_mpf(abs(h)), s_mp)
            ratio = lhs / rhs if rhs > 0 else mp.inf
            worst = max(worst, ratio)
            if lhs > rhs:
                return False, {"failed_at": float(h), "ratio_to_threshold": float(ratio)}
        for h in nonmembers:
            exact = _exact_apply(stencil, handle, x0, h)
            if exact is None or exact != 0:
                return False, {"failed_at": float(h), "nonmember_exact_zero": False}
        return True, {"worst_member_ratio_to_threshold": float(worst),
                      "members": len(members), "nonmembers": len(nonmembers)}


def _check_unbounded(stencil: Stencil, f: GroupFunction, s_star: float) -> tuple[bool, dict]:
    """Along h = g^-j the n-th quotient has magnitude g^(j(n-s)); find a j
    pushing it past the threshold, or (when s = n makes the magnitude stick
    at 1) certify a genuine +-1 oscillation, which denies the limit just as
    thoroughly."""
    n = stencil.order
    for gi, g in enumerate(f.group.generators):
        lg = math.log10(g)
        for j in range(UNBOUNDED_MAX_J + 1):
            log10_mag = j * (n - s_star) * lg
            if log10_mag > math.log10(UNBOUNDED_THRESHOLD):
                return True, {"witness_generator": g, "witness_j": j,
                              "log10_ratio": log10_mag, "oscillation": False}
    ratios = []
    for gi, g in enumerate(f.group.generators):
        lg = math.log10(g)
        for j in range(UNBOUNDED_MAX_J + 1):
            log10_mag = j * (n - s_star) * lg
            if abs(log10_mag) > 300:
                continue
            sign = -1 if (f.character[gi] * j) % 2 else 1
            ratios.append(sign * 10.0**log10_mag)
    if ratios and min(ratios) <= -0.5 and max(ratios) >= 0.5:
        return True, {"witness_generator": None, "witness_j": None,
                      "oscillation": True, "ratio_min": min(ratios), "ratio_max": max(ratios)}
    return False, {"witness_generator": None, "witness_j": None, "oscillation": False}


def verify_counterexample(
    stencil: Stencil,
    f: GroupFunction,
    lower_order: int,
    h_samples: dict | None = None,
    seed: int = DEFAULT_SEED,
    exponent_interval: tuple | None = None,
    flip_sign: bool = False,
) -> CounterexampleReport:
    """Check the three facts that make (stencil, f) a genuine separation:

    (a) the order-n difference at 0 vanishes to the phi-root tolerance for
        steps in G and exactly off G,
    (b) |f(h)| <= |h|^(lower_order + eps), so everything below lower_order
        is exactly as smooth as claimed,
    (c) the ordinary n-th quotient f(h)/h^n is unbounded (or oscillates
        between fixed opposite values) along generator rays, so the ordinary
        derivative cannot exist.
    """
    if not isinstance(lower_order, int) or lower_order < 0:
        raise CounterexampleError("lower_order must be an integer >= 0")
    s_star = float(f.exponent)
    if s_star <= lower_order:
        raise CounterexampleError("exponent must exceed lower_order")
    rng = random.Random(seed)
    if h_samples is None:
        members = _sample_members(f.group, rng, 100)
        nonmembers = _sample_nonmembers(f.group, stencil, rng, 100)
        peano_set = (
            _sample_members(f.group, rng, 60)
            + _sample_nonmembers(f.group, stencil, rng, 40)
            + [-h for h in _sample_members(f.group, rng, 10)]
        )
    else:
        members = list(h_samples["members"])
        nonmembers = list(h_samples["nonmembers"])
        peano_set = list(h_samples["peano"])

    raw_phi = phi_from_stencil(stencil, f)
    pres_phi, _content = raw_phi.primitive()
    if flip_sign:
        pres_phi = pres_phi.negated()

    ok_a, detail_a = _check_difference_vanishes(stencil, f, s_star, members, nonmembers)
    eps = min(0.5, (s_star - lower_order) / 2)
    ok_b = peano_bound_check(f.handle(), 0, lower_order, eps, peano_set)
    ok_c, detail_c = _check_unbounded(stencil, f, s_star)

    if exponent_interval is None:
        lo = int(math.floor(s_star))
        hi = int(math.ceil(s_star))
        if hi == lo:
            lo, hi = lo - 1, hi + 1
        exponent_interval = (lo, hi)
    endpoints = (
        pres_phi.eval_exact(int(exponent_interval[0])),
        pres_phi.eval_exact(int(exponent_interval[1])),
    )
    return CounterexampleReport(
        stencil=stencil,
        generators=f.group.generators,
        character=f.character,
        exponent_interval=tuple(exponent_interval),
        exponent=s_star,
        phi=pres_phi,
        phi_endpoints=endpoints,
        checks={
            "difference_vanishes": ok_a,
            "lower_peano_bound": ok_b,
            "nth_unbounded": ok_c,
        },
        details={"difference": detail_a, "unbounded": detail_c,
                 "peano_epsilon": eps, "peano_samples": len(peano_set)},
    )


# -- character search ---------------------------------------------------------


@dataclass(frozen=True)
class CharacterHit:
    character: tuple
    phi: ExponentialSum  # primitive presentation, no sign flip
    lo_value: Fraction
    hi_value: Fraction
    sign_change: bool


def character_search(stencil: Stencil, generators, lo: int, hi: int) -> list:
    """Evaluate phi at the integer endpoints for every sign character and
    flag the admissible ones: a root in (lo, hi) needs phi(lo)*phi(hi) < 0
    strictly, so an exact zero at an endpoint does not qualify."""
    group = MultiplicativeGroup(tuple(generators))
    if not (isinstance(lo, int) and isinstance(hi, int) and lo < hi):
        raise CounterexampleError("need integer endpoints lo < hi")
    k = len(group.generators)
    out = []
    for bits in _all_bits(k):
        gf = GroupFunction(group, bits, 1)
        phi, _ = phi_from_stencil(stencil, gf).primitive()
        vlo, vhi = phi.eval_exact(lo), phi.eval_exact(hi)
        out.append(CharacterHit(bits, phi, vlo, vhi, vlo * vhi < 0))
    return out


def _all_bits(k: int):
    for mask in range(2**k):
        yield tuple((mask >> (k - 1 - i)) & 1 for i in range(k))


def search_to_jsonable(stencil: Stencil, generators, lo: int, hi: int, hits: list) -> dict:
    return {
        "stencil": stencil_to_jsonable(stencil),
        "generators": list(generators),
        "interval": [lo, hi],
        "results": [
            {
                "character": list(h.character),
                "phi_terms": [
                    {"coeff": format_rational(c), "base": format_rational(b)}
                    for c, b in h.phi.terms
                ],
                "phi_endpoints": [format_rational(h.lo_value), format_rational(h.hi_value)],
                "sign_change": h.sign_change,
            }
            for h in hits
        ],
        "admissible": sum(1 for h in hits if h.sign_change),
    }


# -- named reproductions ------------------------------------------------------


@dataclass(frozen=True)
class NamedCase:
    name: str
    build: object  # () -> Stencil
    generators: tuple
    character: tuple
    interval: tuple
    lower_order: int
    flip_sign: bool  # presentation-only: phi as conventionally printed


NAMED_CASES = {
    "prop25": NamedCase(
        name="prop25",
        build=lambda: vandermonde_solve((1, 2, 3), 2),
        generators=(2, 3),
        character=(1, 1),
        interval=(1, 3),
        lower_order=1,
        flip_sign=False,
    ),
    "thm32a": NamedCase(
        name="thm32a",
        build=lambda: riemann_classic(7),
        generators=(2, 3, 5, 7),
        character=(0, 1, 1, 0),
        interval=(6, 7),
        lower_order=6,
        flip_sign=False,
    ),
    "thm32-n5": NamedCase(
        name="thm32-n5",
        build=lambda: scale(riemann_symmetric(5), 2),
        generators=(3, 5),
        character=(1, 1),
        interval=(3, 4),
        lower_order=3,
        flip_sign=True,
    ),
    "thm32-n6": NamedCase(
        name="thm32-n6",
        build=lambda: riemann_symmetric(6),
        generators=(2, 3),
        character=(1, 1),
        interval=(4, 5),
        lower_order=4,
        flip_sign=True,
    ),
    "thm32-n7": NamedCase(
        name="thm32-n7",
        build=lambda: scale(riemann_symmetric(7), 2),
        generators=(3, 5, 7),
        character=(0, 1, 1),
        interval=(5, 7),
        lower_order=5,
        flip_sign=True,
    ),
    "thm32-n8": NamedCase(
        name="thm32-n8",
        build=lambda: riemann_symmetric(8),
        generators=(2, 3),
        character=(1, 0),
        interval=(7, 8),
        lower_order=7,
        flip_sign=False,
    ),
}

SEARCH_CASES = {
    "search-n9": {
        "build": lambda: scale(riemann_symmetric(9), 2),
        "generators": (3, 5, 7),
        "interval": (7, 9),
    },
}


def run_case(name: str, seed: int = DEFAULT_SEED) -> CounterexampleReport:
    """Reproduce a named separation end to end: extract phi, locate the
    exponent in its pinned interval, then run all three checks."""
    if name not in NAMED_CASES:
        raise CounterexampleError(f"unknown case {name!r}; named cases: {sorted(NAMED_CASES)}")
    case = NAMED_CASES[name]
    stencil = case.build()
    group = MultiplicativeGroup(case.generators)
    probe = GroupFunction(group, case.character, 1)
    raw_phi = phi_from_stencil(stencil, probe)
    pres_phi, _ = raw_phi.primitive()
    if case.flip_sign:
        pres_phi = pres_phi.negated()
    s_star = find_exponent(pres_phi, case.interval[0], case.interval[1])
    f = GroupFunction(group, case.character, s_star)
    return verify_counterexample(
        stencil,
        f,
        case.lower_order,
        seed=seed,
        exponent_interval=case.interval,
        flip_sign=case.flip_sign,
    )


def run_search(name: str) -> dict:
    if name not in SEARCH_CASES:
        raise CounterexampleError(f"unknown search {name!r}; searches: {sorted(SEARCH_CASES)}")
    spec = SEARCH_CASES[name]
    stencil = spec["build"]()
    hits = character_search(stencil, spec["generators"], *spec["interval"])
    return search_to_jsonable(stencil, spec["generators"], *spec["interval"], hits)
