"""Randomized exact-identity suites.

Every check below is an equality of rationals or of integer-coefficient
polynomials, so a failure is a real defect, never numerical noise.  Random
inputs come from a seeded generator; the same seed reproduces the same
report byte for byte.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .qcore import (
    QPolynomial,
    pascal_check,
    q_binomial,
    q_binomial_by_factorials,
    qbinomial_expand,
)
from .stencil import (
    gaussian_forward,
    gaussian_shifted,
    gaussian_symmetric,
    recursive_build,
    riemann_classic,
    riemann_symmetric,
    same_difference,
    scale,
    vandermonde_solve,
    verify_vandermonde,
)

DEFAULT_SEED = 1729

# negative and non-integer ratios stress the sign/power bookkeeping
DEFAULT_Q_GRID = (
    Fraction(2),
    Fraction(3),
    Fraction(5),
    Fraction(1, 2),
    Fraction(-2),
    Fraction(5, 3),
    Fraction(-7, 4),
)

SCALING_Q_GRID = (Fraction(2), Fraction(3), Fraction(5, 2), Fraction(-2))


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    failures: list = field(default_factory=list)

    def check(self, ok: bool, message: str = ""):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < 20:
                self.failures.append(message)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    @property
    def total(self) -> int:
        return self.passed + self.failed

    def summary(self) -> str:
        if self.ok:
            return f"{self.name}: ok ({self.total} checks)"
        head = f"{self.name}: FAILED ({self.failed} of {self.total} checks)"
        return head + "".join(f"\n  - {m}" for m in self.failures)


def _random_rational(rng: random.Random, max_abs: int = 50, nonzero: bool = False,
                     exclude: tuple = ()) -> Fraction:
    while True:
        v = Fraction(rng.randint(-max_abs, max_abs), rng.randint(1, max_abs))
        if nonzero and v == 0:
            continue
        if v in exclude:
            continue
        return v


def _random_q(rng: random.Random, max_abs: int = 50) -> Fraction:
    return _random_rational(rng, max_abs, nonzero=True, exclude=(Fraction(1), Fraction(-1)))


# -- q-identity suites --------------------------------------------------------


def pascal_suite(max_n: int = 20) -> SuiteResult:
    res = SuiteResult("pascal")
    for n in range(2, max_n + 1):
        for k in range(1, n):
            res.check(pascal_check(n, k), f"pascal identity fails at n={n}, k={k}")
    return res


def qbinomial_consistency_suite(max_n: int = 20, cross_check_n: int = 12) -> SuiteResult:
    """Palindromy, classical values at q=1, and the factorial-quotient route."""
    res = SuiteResult("qbinomial-consistency")
    for n in range(0, max_n + 1):
        for k in range(0, n + 1):
            res.check(
                q_binomial(n, k) == q_binomial(n, n - k),
                f"[{n} {k}] != [{n} {n - k}]",
            )
            res.check(
                q_binomial(n, k)(1) == comb(n, k),
                f"[{n} {k}] at q=1 != C({n},{k})",
            )
    for n in range(0, cross_check_n + 1):
        for k in range(0, n + 1):
            res.check(
                q_binomial(n, k) == q_binomial_by_factorials(n, k),
                f"Pascal route != factorial route at n={n}, k={k}",
            )
    return res


def qbinomial_product_suite(count: int = 100, seed: int = DEFAULT_SEED,
                            max_n: int = 12) -> SuiteResult:
    """(a-b)(a-bq)...(a-bq^(n-1)) against its expansion, at random rationals."""
    res = SuiteResult("qbinomial-product")
    rng = random.Random(seed)
    for i in range(count):
        n = (i % max_n) + 1
        a = _random_rational(rng)
        b = _random_rational(rng)
        q = _random_q(rng)
        lhs = Fraction(1)
        for j in range(n):
            lhs *= a - b * q**j
        rhs = sum(
            (coeff(q) * a**pa * b**pb for coeff, pa, pb in qbinomial_expand(n)),
            Fraction(0),
        )
        res.check(lhs == rhs, f"product expansion fails at n={n}, a={a}, b={b}, q={q}")
    return res


def _alternating_sum(n: int, q: Fraction, point) -> Fraction:
    """sum_k (-1)^k q^C(k+1,2) [n-1 k]_q * point(k), the recurring left side."""
    total = Fraction(0)
    for k in range(n):
        sign = -1 if k % 2 else 1
        total += sign * q ** comb(k + 1, 2) * q_binomial(n - 1, k)(q) * point(k)
    return total


def qbinomial_specialized_suite(q_count: int = 20, seed: int = DEFAULT_SEED,
                                max_n: int = 12) -> SuiteResult:
    """The one-variable collapses of the product formula, at random rationals."""
    res = SuiteResult("qbinomial-specialized")
    rng = random.Random(seed)
    for _ in range(q_count):
        q = _random_q(rng)
        for n in range(1, max_n + 1):
            a = _random_rational(rng)
            lhs = Fraction(1)
            for i in range(1, n):
                lhs *= a - q**i
            rhs = _alternating_sum(n, q, lambda k: a ** (n - 1 - k))
            res.check(lhs == rhs, f"monic collapse fails at n={n}, a={a}, q={q}")

            ones = _alternating_sum(n, q, lambda k: Fraction(1))
            prod = Fraction(1)
            for i in range(1, n):
                prod *= 1 - q**i
            res.check(ones == prod, f"a=1 collapse fails at n={n}, q={q}")

            for j in range(1, n):
                momj = _alternating_sum(n, q, lambda k: (q ** (n - 1 - k)) ** j)
                res.check(momj == 0, f"vanishing moment j={j} fails at n={n}, q={q}")

            momn = _alternating_sum(n, q, lambda k: (q ** (n - 1 - k)) ** n)
            top = Fraction(1)
            for i in range(1, n):
                top *= q**n - q**i
            res.check(momn == top, f"top moment fails at n={n}, q={q}")
    return res


def qbinomial_squared_suite(q_count: int = 20, seed: int = DEFAULT_SEED,
                            max_m: int = 12) -> SuiteResult:
    """The even/odd-power product collapses in the squared ratio q^2."""
    res = SuiteResult("qbinomial-squared")
    rng = random.Random(seed)
    for _ in range(q_count):
        q = _random_q(rng)
        q2 = q * q
        for m in range(1, max_m + 1):
            a = _random_rational(rng)

            lhs_even = Fraction(1)
            for i in range(1, m):
                lhs_even *= a - q ** (2 * i)
            rhs_even = Fraction(0)
            for k in range(m):
                sign = -1 if k % 2 else 1
                rhs_even += sign * q ** (k * (k + 1)) * q_binomial(m - 1, k)(q2) * a ** (m - 1 - k)
            res.check(lhs_even == rhs_even, f"even-power collapse fails at m={m}, a={a}, q={q}")

            lhs_odd = Fraction(1)
            for i in range(1, m):
                lhs_odd *= a - q ** (2 * i - 1)
            rhs_odd = Fraction(0)
            for k in range(m):
                sign = -1 if k % 2 else 1
                rhs_odd += sign * q ** (k * k) * q_binomial(m - 1, k)(q2) * a ** (m - 1 - k)
            res.check(lhs_odd == rhs_odd, f"odd-power collapse fails at m={m}, a={a}, q={q}")
    return res


# -- stencil suites -----------------------------------------------------------


def closed_vs_solver_suite(max_n: int = 10, q_grid=DEFAULT_Q_GRID) -> SuiteResult:
    """Closed-form stencils must match the exact moment solve on their nodes."""
    res = SuiteResult("closed-vs-solver")
    builders = {
        "forward": gaussian_forward,
        "shifted": gaussian_shifted,
        "symmetric": gaussian_symmetric,
    }
    for family, build in builders.items():
        for n in range(1, max_n + 1):
            for q in q_grid:
                s = build(n, q)
                solved = vandermonde_solve(s.nodes, n)
                res.check(
                    same_difference(s, solved),
                    f"{family} closed form != solver at n={n}, q={q}",
                )
                res.check(
                    all(r == 0 for _, r in verify_vandermonde(s)),
                    f"{family} moment residual nonzero at n={n}, q={q}",
                )
    return res


def recursion_suite(max_n: int = 10, q_grid=DEFAULT_Q_GRID) -> SuiteResult:
    """The order-raising recursion must reproduce the closed forms exactly,
    and the q=2 forward family must sit on the doubling nodes {0,1,2,4,...}."""
    res = SuiteResult("recursion")
    builders = {
        "forward": gaussian_forward,
        "shifted": gaussian_shifted,
        "symmetric": gaussian_symmetric,
    }
    for family, build in builders.items():
        for n in range(1, max_n + 1):
            for q in q_grid:
                rec = recursive_build(family, n, q)
                res.check(
                    rec == build(n, q),
                    f"recursion != closed form for {family} at n={n}, q={q}",
                )
    for n in range(1, max_n + 1):
        expect = tuple(sorted({Fraction(0)} | {Fraction(2) ** i for i in range(n)}))
        res.check(
            gaussian_forward(n, 2).nodes == expect,
            f"doubling nodes wrong at n={n}",
        )
    return res


def scaling_suite(max_n: int = 8, q_grid=SCALING_Q_GRID, seed: int = DEFAULT_SEED,
                  random_count: int = 50) -> SuiteResult:
    """Scaling behavior: the q <-> 1/q reflection per family, scale-invariance
    of the moment conditions, and the classical coincidences at low order."""
    res = SuiteResult("scaling")
    for n in range(1, max_n + 1):
        for q in q_grid:
            res.check(
                same_difference(scale(gaussian_forward(n, 1 / q), q ** (n - 1)),
                                gaussian_forward(n, q)),
                f"forward reflection fails at n={n}, q={q}",
            )
            res.check(
                same_difference(scale(gaussian_shifted(n, 1 / q), q**n),
                                gaussian_shifted(n, q)),
                f"shifted reflection fails at n={n}, q={q}",
            )
            m = (n + 1) // 2
            res.check(
                same_difference(scale(gaussian_symmetric(n, 1 / q), q ** (m - 1)),
                                gaussian_symmetric(n, q)),
                f"symmetric reflection fails at n={n}, q={q}",
            )

    rng = random.Random(seed)
    builders = (gaussian_forward, gaussian_shifted, gaussian_symmetric)
    for _ in range(random_count):
        build = builders[rng.randrange(3)]
        n = rng.randint(1, 6)
        q = rng.choice(DEFAULT_Q_GRID)
        r = _random_rational(rng, 20, nonzero=True)
        s = scale(build(n, q), r)
        res.check(
            all(v == 0 for _, v in verify_vandermonde(s)),
            f"scaled stencil loses moments: n={n}, q={q}, r={r}",
        )
        res.check(
            scale(scale(build(n, q), r), 1 / r) == build(n, q),
            f"scale round-trip fails: n={n}, q={q}, r={r}",
        )

    res.check(
        same_difference(gaussian_symmetric(3, 3), scale(riemann_symmetric(3), 2)),
        "order-3 classical coincidence fails",
    )
    res.check(
        same_difference(gaussian_symmetric(4, 2), riemann_symmetric(4)),
        "order-4 classical coincidence fails",
    )
    res.check(
        same_difference(scale(riemann_classic(1), 1), gaussian_forward(1, 2)),
        "order-1 forward/classical coincidence fails",
    )
    return res


ALL_SUITES = (
    "pascal",
    "qbinomial-consistency",
    "qbinomial-product",
    "qbinomial-specialized",
    "qbinomial-squared",
    "closed-vs-solver",
    "recursion",
    "scaling",
)


def run_all(max_n: int = 10, seed: int = DEFAULT_SEED, q_grid=DEFAULT_Q_GRID) -> list:
    """Run every suite; max_n caps the stencil grids (the q-identity suites
    keep their own documented depths)."""
    if not isinstance(max_n, int) or not 1 <= max_n <= 12:
        raise ValueError("max_n must be an integer in 1..12")
    return [
        pascal_suite(),
        qbinomial_consistency_suite(),
        qbinomial_product_suite(seed=seed),
        qbinomial_specialized_suite(seed=seed),
        qbinomial_squared_suite(seed=seed),
        closed_vs_solver_suite(max_n=max_n, q_grid=q_grid),
        recursion_suite(max_n=max_n, q_grid=q_grid),
        scaling_suite(max_n=min(max_n, 8), seed=seed),
    ]
