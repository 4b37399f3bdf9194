"""Directional distributions of line orientations and their intensities.

Two families are supported: discrete laws with finitely many atoms on
[0, pi) (including the weighted three- and four-direction families and the
equal-weight k-direction law) and the uniform law.  Each distribution knows
its intersection intensity ``lambda_theta`` along a fixed line of direction
theta, the averaged intensity ``lambda_bar``, and how to sample the angle
variables used when growing the typical cell from its lowest vertex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

WEIGHT_TOL = 1e-12
ATOM_TOL = 1e-9
TWO_OVER_PI = 2.0 / math.pi


class DistributionError(ValueError):
    pass


class SpecParseError(DistributionError):
    """A distribution spec string could not be parsed; ``token`` is the culprit."""

    def __init__(self, token: str, message: str):
        super().__init__(f"{message}: {token!r}")
        self.token = token


@dataclass(frozen=True)
class IntensityProfile:
    lambda_of_theta: Callable
    lambda_bar: float


class DirectionalDistribution:
    """Common interface; see :class:`DiscreteDirections` and :class:`UniformDirections`."""

    name = "G"
    pseudo_isotropic = False

    @property
    def profile(self) -> IntensityProfile:
        return IntensityProfile(self.lambda_theta, self.lambda_bar)

    def lambda_theta(self, theta):
        raise NotImplementedError

    @property
    def lambda_bar(self) -> float:
        raise NotImplementedError

    def sample_theta(self, rng: np.random.Generator, size: int):
        """Return ``(angles, atoms)``; ``atoms`` is ``None`` for continuous laws."""
        raise NotImplementedError

    def sample_angle_pair(self, rng, size=None, fix_phi0=False):
        raise NotImplementedError

    def sample_phi2(self, phi1, rng):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class DiscreteDirections(DirectionalDistribution):
    angles: tuple
    weights: tuple
    name: str = "discrete"
    pseudo_isotropic: bool = False

    def __post_init__(self):
        if len(self.angles) != len(self.weights):
            raise DistributionError("angles and weights differ in length")
        pairs = sorted(zip((float(a) for a in self.angles), (float(w) for w in self.weights)))
        for a, w in pairs:
            if not 0.0 <= a < math.pi:
                raise DistributionError(f"atom angle {a} outside [0, pi)")
            if not w > 0.0:
                raise DistributionError(f"atom weight {w} must be positive")
        for (a, _), (b, _) in zip(pairs, pairs[1:]):
            if b - a < ATOM_TOL:
                raise DistributionError(f"duplicate atom angle {b}")
        total = sum(w for _, w in pairs)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise DistributionError(f"weights sum to {total!r}, not 1")
        if len(pairs) < 2:
            raise DistributionError("degenerate distribution: need at least two directions")
        object.__setattr__(self, "angles", tuple(a for a, _ in pairs))
        object.__setattr__(self, "weights", tuple(w for _, w in pairs))

    def __repr__(self):
        return f"DiscreteDirections({self.name})"

    @cached_property
    def _theta(self) -> np.ndarray:
        return np.asarray(self.angles)

    @cached_property
    def _w(self) -> np.ndarray:
        return np.asarray(self.weights)

    @cached_property
    def _sin_table(self) -> np.ndarray:
        t = self._theta
        return np.abs(np.sin(t[:, None] - t[None, :]))

    @cached_property
    def atom_lambdas(self) -> np.ndarray:
        return self._sin_table @ self._w

    def lambda_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        vals = np.abs(np.sin(theta[..., None] - self._theta)) @ self._w
        return float(vals) if vals.ndim == 0 else vals

    @cached_property
    def lambda_bar(self) -> float:
        return float(self._w @ self.atom_lambdas)

    def atom_index(self, theta) -> np.ndarray:
        """Index of the atom at orientation ``theta`` (taken mod pi)."""
        t = np.mod(np.asarray(theta, dtype=float), math.pi)
        t = np.where(t > math.pi - ATOM_TOL, t - math.pi, t)
        idx = np.searchsorted(self._theta, t - ATOM_TOL)
        idx = np.minimum(idx, len(self.angles) - 1)
        if np.any(np.abs(self._theta[idx] - t) > ATOM_TOL):
            raise DistributionError("angle is not an atom of the distribution")
        return idx

    def sample_theta(self, rng, size):
        atoms = rng.choice(len(self.angles), size=size, p=self._w)
        return self._theta[atoms], atoms

    @cached_property
    def pair_table(self):
        """Unordered atom pairs ``(i, j)``, ``i < j``, with their probabilities.

        An intersection of lines from atoms i and j occurs with probability
        proportional to ``w_i w_j |sin(theta_i - theta_j)|``; the ordered
        version counts each unordered pair twice.
        """
        k = len(self.angles)
        ii, jj = np.triu_indices(k, 1)
        p = 2.0 * self._w[ii] * self._w[jj] * self._sin_table[ii, jj] / self.lambda_bar
        return ii, jj, p

    @cached_property
    def _pair_cdf(self):
        cdf = np.cumsum(self.pair_table[2])
        cdf[-1] = 1.0
        return cdf

    def sample_pair_atoms(self, rng, size):
        """Atom indices ``(i0, i1)`` of the lower/upper edge directions at the lowest vertex."""
        ii, jj, _ = self.pair_table
        u = rng.random(size)
        sel = np.searchsorted(self._pair_cdf, u, side="right")
        sel = np.minimum(sel, len(ii) - 1)
        return ii[sel], jj[sel]

    def sample_angle_pair(self, rng, size=None, fix_phi0=False):
        n = 1 if size is None else size
        i0, i1 = self.sample_pair_atoms(rng, n)
        phi0, phi1 = self._theta[i0], self._theta[i1]
        if fix_phi0:
            if not self.pseudo_isotropic:
                raise DistributionError("phi0 can only be fixed for pseudo-isotropic laws")
            phi0, phi1 = np.zeros(n), phi1 - phi0
        if size is None:
            return float(phi0[0]), float(phi1[0])
        return phi0, phi1

    @cached_property
    def phi2_table(self):
        """Per atom ``i``: shifted candidate angles in ``[theta_i - pi, theta_i)`` and their probabilities."""
        t = self._theta
        shifted = np.where(t[None, :] >= t[:, None], t[None, :] - math.pi, t[None, :])
        shifted = np.broadcast_to(shifted, (len(t), len(t))).copy()
        prob = self._w[None, :] * self._sin_table
        np.fill_diagonal(prob, 0.0)
        prob /= prob.sum(axis=1, keepdims=True)
        return shifted, prob

    @cached_property
    def _phi2_cdf(self):
        cdf = np.cumsum(self.phi2_table[1], axis=1)
        cdf[:, -1] = 1.0
        return cdf

    def sample_phi2_atoms(self, i1, rng):
        """Atom index and shifted angle of the third edge given the atom of the second edge."""
        i1 = np.asarray(i1)
        u = rng.random(i1.shape)
        cdf = self._phi2_cdf[i1]
        j = (cdf <= u[..., None]).sum(axis=-1)
        j = np.minimum(j, len(self.angles) - 1)
        return j, self.phi2_table[0][i1, j]

    def sample_phi2(self, phi1, rng):
        scalar = np.ndim(phi1) == 0
        phi1 = np.asarray(phi1, dtype=float)
        i1 = self.atom_index(phi1)
        _, shifted = self.sample_phi2_atoms(i1, rng)
        # shift back by the whole turns separating phi1 from its atom
        out = shifted + (phi1 - self._theta[i1])
        return float(out) if scalar else out


@dataclass(frozen=True, eq=False)
class UniformDirections(DirectionalDistribution):
    name: str = "unif"
    pseudo_isotropic: bool = True

    def __repr__(self):
        return "UniformDirections()"

    def lambda_theta(self, theta):
        if np.ndim(theta) == 0:
            return TWO_OVER_PI
        return np.full(np.shape(theta), TWO_OVER_PI)

    @property
    def lambda_bar(self) -> float:
        return TWO_OVER_PI

    def sample_theta(self, rng, size):
        return rng.random(size) * math.pi, None

    def sample_angle_pair(self, rng, size=None, fix_phi0=False):
        n = 1 if size is None else size
        delta = sample_relative_angle(rng.random(n))
        if fix_phi0:
            phi0 = np.zeros(n)
        else:
            phi0 = rng.random(n) * (math.pi - delta)
        phi1 = phi0 + delta
        if size is None:
            return float(phi0[0]), float(phi1[0])
        return phi0, phi1

    def sample_phi2(self, phi1, rng):
        scalar = np.ndim(phi1) == 0
        phi1 = np.asarray(phi1, dtype=float)
        turn = np.arccos(1.0 - 2.0 * rng.random(phi1.shape))
        # the turn angle pi has probability zero but arccos can return it
        turn = np.where(turn >= math.pi, math.nextafter(math.pi, 0.0), turn)
        out = phi1 - turn
        return float(out) if scalar else out


def relative_angle_cdf(x):
    """CDF of the density ``(pi - x) sin(x) / pi`` on [0, pi]."""
    x = np.asarray(x, dtype=float)
    return (2.0 * math.pi * np.sin(0.5 * x) ** 2 - np.sin(x) + x * np.cos(x)) / math.pi


def relative_angle_pdf(x):
    x = np.asarray(x, dtype=float)
    return (math.pi - x) * np.sin(x) / math.pi


def sample_relative_angle(u, tol: float = 1e-12, max_iter: int = 100):
    """Invert :func:`relative_angle_cdf` by safeguarded Newton iteration."""
    u = np.asarray(u, dtype=float)
    lo = np.zeros_like(u)
    hi = np.full_like(u, math.pi)
    x = np.sqrt(2.0 * u).clip(0.0, math.pi) * 0.9 + 0.1 * math.pi * u
    for _ in range(max_iter):
        f = relative_angle_cdf(x) - u
        lo = np.where(f < 0, x, lo)
        hi = np.where(f > 0, x, hi)
        fp = relative_angle_pdf(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(fp > 0, f / fp, np.inf)
        xn = x - step
        bad = ~((xn > lo) & (xn < hi))
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        done = np.abs(xn - x) <= tol
        x = xn
        if done.all():
            break
    return x


# --- named constructors ---------------------------------------------------------

def g3(p: float, q: float) -> DiscreteDirections:
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0 and p + q < 1.0):
        raise DistributionError(f"G3 weights must satisfy 0<p,q and p+q<1, got p={p}, q={q}")
    pi_ = math.pi
    return DiscreteDirections((0.0, pi_ / 3, 2 * pi_ / 3), (p, q, 1.0 - p - q), name=f"g3:{p},{q}",
                              pseudo_isotropic=abs(p - 1 / 3) < 1e-15 and abs(q - 1 / 3) < 1e-15)


def g4(p: float, q: float, r: float) -> DiscreteDirections:
    if not (min(p, q, r) > 0.0 and p + q + r < 1.0):
        raise DistributionError(f"G4 weights must satisfy 0<p,q,r and p+q+r<1, got {p},{q},{r}")
    angles = tuple(i * math.pi / 4 for i in range(4))
    equal = all(abs(w - 0.25) < 1e-15 for w in (p, q, r))
    return DiscreteDirections(angles, (p, q, r, 1.0 - p - q - r), name=f"g4:{p},{q},{r}",
                              pseudo_isotropic=equal)


def gk(k: int) -> DiscreteDirections:
    if int(k) != k or k < 2:
        raise DistributionError(f"G_k needs an integer k >= 2, got {k}")
    k = int(k)
    return DiscreteDirections(tuple(l * math.pi / k for l in range(k)), (1.0 / k,) * k,
                              name=f"gk:{k}", pseudo_isotropic=True)


def unif() -> UniformDirections:
    return UniformDirections()


def discrete(angles: Sequence[float], weights: Sequence[float], name: Optional[str] = None) -> DiscreteDirections:
    from .geometry import normalize_direction
    angles = [normalize_direction(a) for a in angles]
    return DiscreteDirections(tuple(angles), tuple(weights), name=name or "discrete")


def _number(token: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise SpecParseError(token, "not a number") from None


def parse_distribution(spec: str) -> DirectionalDistribution:
    """Parse ``unif``, ``gk:<k>``, ``g3:<p>,<q>``, ``g4:<p>,<q>,<r>`` or
    ``discrete:[deg:]<theta>:<w>,...``."""
    spec = spec.strip()
    kind, _, rest = spec.partition(":")
    kind = kind.lower()
    if kind == "unif":
        if rest:
            raise SpecParseError(rest, "unif takes no parameters")
        return unif()
    if kind == "gk":
        try:
            k = int(rest)
        except ValueError:
            raise SpecParseError(rest, "k must be an integer") from None
        if k < 2:
            raise SpecParseError(rest, "k must be at least 2")
        return gk(k)
    if kind in ("g3", "g4"):
        tokens = rest.split(",")
        need = 2 if kind == "g3" else 3
        if len(tokens) != need:
            raise SpecParseError(rest, f"{kind} expects {need} comma-separated weights")
        vals = [_number(t) for t in tokens]
        try:
            return g3(*vals) if kind == "g3" else g4(*vals)
        except DistributionError as exc:
            raise SpecParseError(rest, str(exc)) from None
    if kind == "discrete":
        scale = 1.0
        if rest.lower().startswith("deg:"):
            scale = math.pi / 180.0
            rest = rest[4:]
        angles, weights = [], []
        for item in rest.split(","):
            a, sep, w = item.partition(":")
            if not sep:
                raise SpecParseError(item, "expected <angle>:<weight>")
            angles.append(_number(a) * scale)
            weights.append(_number(w))
        try:
            return discrete(angles, weights, name=spec)
        except DistributionError as exc:
            raise SpecParseError(rest, str(exc)) from None
    raise SpecParseError(kind, "unknown distribution kind")


# module-level aliases mirroring the method names
def lambda_theta(g: DirectionalDistribution, theta):
    return g.lambda_theta(theta)


def lambda_bar(g: DirectionalDistribution) -> float:
    return g.lambda_bar


def sample_angle_pair(g: DirectionalDistribution, rng, size=None, fix_phi0=False):
    return g.sample_angle_pair(rng, size=size, fix_phi0=fix_phi0)


def sample_phi2(g: DirectionalDistribution, phi1, rng):
    return g.sample_phi2(phi1, rng)
