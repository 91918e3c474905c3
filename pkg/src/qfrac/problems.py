"""Bundled regression problems with known exact solutions.

Two nonlinear problems exercise the solver end to end (both are anchored at
a lattice point A > 0, so every operator evaluation is an exact finite sum):

* ``singular_quadratic`` -- rhs proportional to y**2 with a weight built
  from negative-order q-power bases; the exact solution
  (1/lam) * R * (x - A)^(-v-d)_q vanishes at A and blows up off-lattice.
  Only the operator identity is exercised here (the quadratic rhs is
  attractive to solve only locally).
* ``sqrt_forcing`` -- rhs proportional to sqrt(y); y = 0 is also a solution,
  so Picard needs a positive starting iterate to reach the nonzero branch
  (lam * Gr)**2 * (x - A)^(2v+2d)_q.  The bundled problem carries such a
  seed value.

``make_linear_problem`` builds the q-Mittag-Leffler-solvable linear case.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .qcore import QParams, q_gamma, q_power_basis
from .qfracops import FracOrders
from .solver import CauchyProblem, LinearProblem

__all__ = [
    "BundledProblem",
    "make_example41",
    "make_example42",
    "make_linear_problem",
    "DEFAULT_ORDERS",
]

#: Orders with derived nu = 0.3, gamma = 0.6 used by both worked examples.
DEFAULT_ORDERS = FracOrders(alpha=0.4, beta=0.2, mu=0.5, n=1)


@dataclass(frozen=True)
class BundledProblem:
    """A Cauchy problem together with its exact solution and solve hints."""

    name: str
    problem: CauchyProblem
    exact: Callable[[float], float]
    seed_value: float | None = None  # constant positive Picard seed, if needed


def _mask_below(base: float, fn: Callable[[float], float]) -> Callable[[float], float]:
    def wrapped(x: float) -> float:
        if x < base * (1.0 - 1e-12):
            return 0.0
        return fn(x)

    return wrapped


def make_example41(params: QParams, *, b: float = 1.0, anchor: float | None = None,
                   anchor_exp: int = 10, lam: float = 1.0, delta: float = 0.2,
                   orders: FracOrders = DEFAULT_ORDERS) -> BundledProblem:
    """Quadratic-rhs problem with the singular exact solution.

    Anchored at A (default b q**anchor_exp); requires 2 nu + delta < 1.  The
    rhs is lam * (x - q**(-v-d) A)^(v+d)_q / (x - q**(-2v-d) A)^v_q * y**2,
    which at x = A is the 0 * inf limit of the closed form and evaluates to 0.
    """
    q = params.q
    nu, dl = orders.nu, delta
    if 2 * nu + dl >= 1.0:
        raise ValueError(f"need 2*nu + delta < 1, got {2 * nu + dl}")
    A = b * q**anchor_exp if anchor is None else anchor
    num_base = q ** (-nu - dl) * A
    den_base = q ** (-2 * nu - dl) * A
    R = q_gamma(params, 1.0 - nu - dl) / q_gamma(params, 1.0 - 2.0 * nu - dl)

    def rhs(x: float, y: float) -> float:
        if x <= A * (1.0 + 1e-12):  # 0*inf limit of the weight at the anchor
            return 0.0
        num = q_power_basis(params, x, num_base, nu + dl)
        den = q_power_basis(params, x, den_base, nu)
        return lam * num / den * y * y

    exact = _mask_below(A, lambda x: (1.0 / lam) * R * q_power_basis(params, x, A, -nu - dl))
    problem = CauchyProblem(
        orders=orders, a=A, b=b, rhs=rhs, xi=(0.0,) * orders.n,
        lipschitz_A=1.0, params=params,
    )
    return BundledProblem(name="singular_quadratic", problem=problem, exact=exact)


def make_example42(params: QParams, *, b: float = 1.0, anchor: float | None = None,
                   anchor_exp: int = 20, lam: float = 1.0, delta: float = 0.2,
                   orders: FracOrders = DEFAULT_ORDERS) -> BundledProblem:
    """Square-root-rhs problem with exact solution (lam Gr)^2 (x-A)^(2v+2d)_q.

    The sqrt branch is extended by 0 below y = 0 (inactive at the positive
    fixed point); the bundled seed sits above the exact solution so the
    monotone iteration descends onto the nonzero branch rather than the
    trivial one.
    """
    q = params.q
    nu, dl = orders.nu, delta
    A = b * q**anchor_exp if anchor is None else anchor
    den_base = q ** (nu + 2 * dl) * A
    Gr = q_gamma(params, nu + 2 * dl + 1.0) / q_gamma(params, 2 * nu + 2 * dl + 1.0)
    amp = (lam * Gr) ** 2

    def rhs(x: float, y: float) -> float:
        if x < A * (1.0 - 1e-12):
            return 0.0
        num = q_power_basis(params, x, A, 2 * nu + 2 * dl)
        den = q_power_basis(params, x, den_base, nu)
        return lam * max(num, 0.0) ** 0.5 / den * max(y, 0.0) ** 0.5

    exact = _mask_below(A, lambda x: amp * q_power_basis(params, x, A, 2 * nu + 2 * dl))
    seed = 1.5 * amp * q_power_basis(params, b, A, 2 * nu + 2 * dl) + 0.1
    problem = CauchyProblem(
        orders=orders, a=A, b=b, rhs=rhs, xi=(0.0,) * orders.n,
        lipschitz_A=0.85, params=params,
    )
    return BundledProblem(name="sqrt_forcing", problem=problem, exact=exact,
                          seed_value=seed)


def make_linear_problem(params: QParams, orders: FracOrders, lam: float,
                        forcing: Callable[[float], float], xi,
                        b: float = 1.0) -> LinearProblem:
    """Linear problem anchored at 0 (validates the convergence certificate)."""
    return LinearProblem(
        orders=orders, a=0.0, b=b, lam=lam, forcing=forcing, xi=tuple(xi),
        params=params,
    )
