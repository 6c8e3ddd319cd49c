"""Core geometry and shared plumbing.

Events live in reduced coordinates (t, r, tau) with r = |x| >= 0: every
quantity in this package is spherically symmetric in the spatial slice, so
a full 3-vector is accepted only to be reduced on entry.  Two quadratic
invariants drive everything:

    x2  = r^2 - t^2          (4D interval, mostly-plus metric)
    Q   = t^2 - r^2 - tau^2  (5D interval against the extra parameter)

Region tags name where an event sits relative to the two cones Q = 0 and
x2 = 0.  Cone membership is decided inside a relative band eps * s with
s = max(1, t^2 + r^2 + tau^2), so classification is scale-aware and points
within floating-point slop of a cone are never handed to a pointwise
evaluator that is singular there.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

#: relative half-width of the cone bands used by classify()
EPS_CONE = 1e-9


# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------

class GFError(Exception):
    """Base class; .code carries the stable machine-readable tag."""

    code = "ERROR"

    def __str__(self) -> str:  # keep the tag visible in logs
        base = super().__str__()
        return f"{self.code}: {base}" if base else self.code


class NonIntegrableError(GFError):
    """Integrand grows too fast at a singular locus for the pairing to exist."""

    code = "NONINTEGRABLE"


class BudgetExceededError(GFError):
    code = "BUDGET_EXCEEDED"


class NoConvergenceError(GFError):
    """A limit/extrapolation sequence failed its internal stability check."""

    code = "NO_CONVERGENCE"


class OnSingularSupportError(GFError):
    """Pointwise evaluation requested on (or within the band of) a cone."""

    code = "ON_SINGULAR_SUPPORT"


class DegenerateError(GFError):
    code = "DEGENERATE"


class UndefinedAtTauZeroError(GFError):
    """The two-piece closed-form route is not defined on the tau = 0 slice."""

    code = "UNDEFINED_AT_TAU_ZERO"


class DomainError(GFError):
    """Unsupported (signature, variant, ...) combination; CLI maps this to exit 2."""

    code = "DOMAIN"


#: diagnostic flags (attached to results, never raised)
GRID_TOO_COARSE = "GRID_TOO_COARSE"
DOMAIN_TRUNCATED = "DOMAIN_TRUNCATED"


# ---------------------------------------------------------------------------
# events and regions
# ---------------------------------------------------------------------------

class Region5(enum.Enum):
    TIMELIKE5 = "TIMELIKE5"      # Q > 0
    SPACELIKE4 = "SPACELIKE4"    # r^2 - t^2 > 0 (hence Q < 0)
    MIXED = "MIXED"              # t^2 - r^2 > 0 but Q < 0
    CONE4 = "CONE4"              # |x2| within band
    CONE5 = "CONE5"              # |Q| within band

    def __str__(self) -> str:
        return self.value


class Signature(enum.Enum):
    """Sign of the metric coefficient multiplying the extra-parameter block."""

    PLUS = +1    # O(4,1) wave operator: -d_t^2 + lap + d_tau^2
    MINUS = -1   # O(3,2) variant; only the principal-part closed form supports it

    @classmethod
    def from_int(cls, v: int) -> "Signature":
        try:
            return cls(int(v))
        except ValueError:
            raise DomainError(f"signature must be +1 or -1, got {v!r}") from None


@dataclass(frozen=True)
class Event5:
    """Reduced event (t, r, tau); r is the spatial radius and must be >= 0."""

    t: float
    r: float
    tau: float

    def __post_init__(self) -> None:
        if not (self.r >= 0.0):
            raise ValueError(f"radius must be >= 0, got {self.r}")

    @classmethod
    def from_xyz(cls, t: float, xyz: Sequence[float], tau: float) -> "Event5":
        x, y, z = xyz
        return cls(float(t), math.sqrt(x * x + y * y + z * z), float(tau))

    def scale(self) -> float:
        return max(1.0, self.t * self.t + self.r * self.r + self.tau * self.tau)


class Invariants(NamedTuple):
    x2: float    # r^2 - t^2
    Q: float     # t^2 - r^2 - tau^2
    rho2: float  # |r^2 - t^2|
    region: Region5


def invariants(e: Event5, eps: float = EPS_CONE) -> Invariants:
    x2 = e.r * e.r - e.t * e.t
    Q = -x2 - e.tau * e.tau
    return Invariants(x2, Q, abs(x2), classify(e, eps))


def classify(e: Event5, eps: float = EPS_CONE) -> Region5:
    """Region tag for one event.  Cone bands are checked first (5D cone
    before 4D cone), then open regions by the signs of Q and x2."""
    x2 = e.r * e.r - e.t * e.t
    Q = -x2 - e.tau * e.tau
    band = eps * e.scale()
    if abs(Q) <= band:
        return Region5.CONE5
    if abs(x2) <= band:
        return Region5.CONE4
    if Q > 0.0:
        return Region5.TIMELIKE5
    if x2 > 0.0:
        return Region5.SPACELIKE4
    return Region5.MIXED


# ---------------------------------------------------------------------------
# quadrature/limit configuration shared by the numerical routes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadSpec:
    """Knobs for the regulated integrals and limit extrapolations.

    eps_seq   strictly decreasing damping/regulator sequence (>= 3 entries)
    k_max     frequency-space truncation floor; k_max * min(eps) >= 5
    tol       target relative tolerance of the final extrapolated value
    grid      baseline nodes per axis for fixed tensor rules
    max_evals integrand-evaluation budget for one operation
    """

    eps_seq: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025)
    k_max: float = 240.0
    tol: float = 1e-3
    grid: int = 256
    max_evals: int = 80_000_000

    def __post_init__(self) -> None:
        eps = tuple(float(x) for x in self.eps_seq)
        object.__setattr__(self, "eps_seq", eps)
        if len(eps) < 3:
            raise ValueError("eps_seq needs at least 3 entries")
        if any(b >= a for a, b in zip(eps, eps[1:])) or eps[-1] <= 0:
            raise ValueError("eps_seq must be strictly decreasing and positive")
        if self.k_max * eps[-1] < 5.0:
            raise ValueError("k_max * min(eps_seq) must be >= 5")
        if not (self.tol > 0):
            raise ValueError("tol must be positive")
        if self.grid < 8:
            raise ValueError("grid too small")
        if self.max_evals <= 0:
            raise ValueError("max_evals must be positive")

    @classmethod
    def fast(cls) -> "QuadSpec":
        """Loose settings for smoke tests and interactive use."""
        return cls(eps_seq=(0.2, 0.1, 0.05), k_max=120.0, tol=1e-2,
                   grid=128, max_evals=20_000_000)
