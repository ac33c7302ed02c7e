"""Fourier data on a k-torus: measures, observables, character twists.

A measure is stored through the Fourier coefficients of its density
against Haar, rho(x) = sum_chi c_chi e^(2 pi i <chi, x>), indexed by
integer lattice vectors chi.  Everything here is exact linear algebra on
finitely supported coefficient maps; the only floating point error is
rounding.  The Wiener norm is sum |c_chi|, which dominates the sup norm
of the density.

Conventions: sigma_hat(chi) = c_chi (the density coefficient), and the
character psi_xi(x) = e^(2 pi i <xi, x>).  Integration against the
measure gives sigma(e^(2 pi i <eta, .>)) = c_{-eta}.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TorusMeasure",
    "TorusObservable",
    "TwistFunctional",
    "wiener_norm",
    "character_twist",
    "equivariance_check",
    "character_expansion_check",
]

_TWO_PI_I = 2j * math.pi


def _norm_key(chi, dim):
    if isinstance(chi, (int, np.integer)):
        chi = (int(chi),)
    else:
        chi = tuple(int(v) for v in chi)
    if len(chi) != dim:
        raise ValueError("character %r does not have %d components"
                         % (chi, dim))
    return chi


def _norm_coeffs(coeffs, dim):
    items = coeffs.items() if hasattr(coeffs, "items") else coeffs
    out = {}
    for chi, amp in items:
        key = _norm_key(chi, dim)
        out[key] = out.get(key, 0j) + complex(amp)
    return {k: v for k, v in sorted(out.items())}


class _FourierData:
    """Shared coefficient-map plumbing for measures and observables."""

    def __init__(self, dim, coeffs):
        dim = int(dim)
        if dim < 1:
            raise ValueError("dim must be a positive integer")
        self.dim = dim
        self.coeffs = _norm_coeffs(coeffs, dim)
        for amp in self.coeffs.values():
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise ValueError("coefficients must be finite")

    def coeff(self, chi):
        return self.coeffs.get(_norm_key(chi, self.dim), 0j)

    @property
    def support(self):
        return tuple(self.coeffs.keys())

    def bandwidth(self):
        """Per-axis maximum |chi_i| over the support."""
        bw = [0] * self.dim
        for chi in self.coeffs:
            for i, v in enumerate(chi):
                bw[i] = max(bw[i], abs(v))
        return tuple(bw)

    def value(self, x):
        """Pointwise evaluation sum_chi c_chi e^(2 pi i <chi, x>).

        Accepts a scalar (dim 1), a 1-D array of points (dim 1), or an
        array of shape (..., dim).  Returns complex values of matching
        shape.  Summation order is fixed (sorted support) so results are
        bit-reproducible.
        """
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        if self.dim == 1 and arr.ndim <= 1:
            pts = np.atleast_1d(arr)[:, None]
            shape = np.atleast_1d(arr).shape
        else:
            if arr.shape[-1] != self.dim:
                raise ValueError("points must have %d coordinates" % self.dim)
            shape = arr.shape[:-1]
            pts = arr.reshape(-1, self.dim)
        out = np.zeros(pts.shape[0], dtype=complex)
        for chi, amp in self.coeffs.items():
            out += amp * np.exp(_TWO_PI_I * (pts @ np.array(chi, dtype=float)))
        out = out.reshape(shape)
        return complex(out[()]) if scalar else out

    def to_json(self):
        return {"dim": self.dim,
                "coeffs": [{"chi": list(chi), "re": amp.real, "im": amp.imag}
                           for chi, amp in self.coeffs.items()]}

    @classmethod
    def _coeffs_from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        pairs = [(tuple(e["chi"]), complex(float(e.get("re", 0.0)),
                                           float(e.get("im", 0.0))))
                 for e in obj["coeffs"]]
        return int(obj["dim"]), pairs


def wiener_norm(m):
    """Sum of coefficient magnitudes; dominates the sup of the density."""
    return float(sum(abs(amp) for amp in m.coeffs.values()))


class TorusMeasure(_FourierData):
    """A measure given by the Fourier coefficients of its density.

    probability=True (default) enforces coefficient 1 at the zero
    character, i.e. total mass one.
    """

    def __init__(self, dim, coeffs, probability=True):
        super().__init__(dim, coeffs)
        if probability and abs(self.coeff((0,) * dim) - 1.0) > 1e-12:
            raise ValueError("probability measure needs coefficient 1 at "
                             "the zero character")
        self.probability = bool(probability)

    @classmethod
    def haar(cls, dim=1):
        return cls(dim, {(0,) * dim: 1.0})

    def is_real(self, tol=1e-12):
        """Conjugate symmetry c_{-chi} = conj(c_chi), i.e. real density."""
        for chi, amp in self.coeffs.items():
            neg = tuple(-v for v in chi)
            if abs(self.coeffs.get(neg, 0j) - amp.conjugate()) > tol:
                return False
        return True

    def integrate(self, phi):
        """sigma(phi) by exact coefficient pairing, sum c_chi phi_hat(-chi)."""
        if not isinstance(phi, TorusObservable):
            raise TypeError("expected a TorusObservable")
        if phi.dim != self.dim:
            raise ValueError("dimension mismatch")
        total = 0j
        for chi, amp in self.coeffs.items():
            total += amp * phi.coeffs.get(tuple(-v for v in chi), 0j)
        return total

    @classmethod
    def from_json(cls, obj, probability=True):
        dim, pairs = cls._coeffs_from_json(obj)
        return cls(dim, pairs, probability=probability)


class TorusObservable(_FourierData):
    """A trigonometric polynomial (function semantics)."""

    @property
    def degree(self):
        return max(self.bandwidth(), default=0) if self.coeffs else 0

    @classmethod
    def character(cls, dim, chi):
        """The single character e^(2 pi i <chi, x>)."""
        return cls(dim, {_norm_key(chi, dim): 1.0})

    @classmethod
    def constant(cls, dim, value=1.0):
        return cls(dim, {(0,) * dim: value})

    def translate(self, w):
        """x -> self(x + w); coefficients pick up e^(2 pi i <chi, w>)."""
        w = np.atleast_1d(np.asarray(w, dtype=float))
        if w.shape != (self.dim,):
            raise ValueError("translation needs %d coordinates" % self.dim)
        return TorusObservable(self.dim, {
            chi: amp * complex(np.exp(_TWO_PI_I * float(np.dot(chi, w))))
            for chi, amp in self.coeffs.items()})

    def conjugate(self):
        return TorusObservable(self.dim, {
            tuple(-v for v in chi): amp.conjugate()
            for chi, amp in self.coeffs.items()})

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = TorusObservable.constant(self.dim, other)
        if not isinstance(other, TorusObservable) or other.dim != self.dim:
            return NotImplemented
        out = dict(self.coeffs)
        for chi, amp in other.coeffs.items():
            out[chi] = out.get(chi, 0j) + amp
        return TorusObservable(self.dim, out)

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return TorusObservable(self.dim, {
                chi: amp * other for chi, amp in self.coeffs.items()})
        if not isinstance(other, TorusObservable) or other.dim != self.dim:
            return NotImplemented
        out = {}
        for chi1, a1 in self.coeffs.items():
            for chi2, a2 in other.coeffs.items():
                key = tuple(u + v for u, v in zip(chi1, chi2))
                out[key] = out.get(key, 0j) + a1 * a2
        return TorusObservable(self.dim, out)

    __rmul__ = __mul__

    @classmethod
    def from_json(cls, obj):
        dim, pairs = cls._coeffs_from_json(obj)
        return cls(dim, pairs)


@dataclass(frozen=True)
class TwistFunctional:
    """The functional eta -> measure(psi_xi * eta).

    On coefficient maps this is the shifted pairing
    sum_chi eta_hat(chi) * sigma_hat(-xi - chi).
    """
    measure: TorusMeasure
    xi: tuple

    def __call__(self, eta):
        if not isinstance(eta, TorusObservable):
            raise TypeError("expected a TorusObservable")
        if eta.dim != self.measure.dim:
            raise ValueError("dimension mismatch")
        total = 0j
        for chi, amp in eta.coeffs.items():
            key = tuple(-x - c for x, c in zip(self.xi, chi))
            total += amp * self.measure.coeffs.get(key, 0j)
        return total


def character_twist(m, xi):
    """Functional eta -> m(psi_xi * eta) for the lattice point xi.

    For Haar this is evaluation of eta_hat at -xi; in particular the
    twist of the constant 1 is 1 for xi = 0 and 0 otherwise.
    """
    if not isinstance(m, TorusMeasure):
        raise TypeError("expected a TorusMeasure")
    return TwistFunctional(measure=m, xi=_norm_key(xi, m.dim))


def equivariance_check(m, xi, w, eta):
    """Translation equivariance of the twist: compare

        lhs = nu_xi(eta o translation_w)   and
        rhs = e^(-2 pi i <xi, w>) * nu_xi(eta).

    Returns (lhs, rhs, |lhs - rhs|).  The two sides agree exactly when
    the underlying measure is translation invariant.
    """
    twist = character_twist(m, xi)
    w = np.atleast_1d(np.asarray(w, dtype=float))
    lhs = twist(eta.translate(w))
    phase = complex(np.exp(-_TWO_PI_I * float(np.dot(twist.xi, w))))
    rhs = phase * twist(eta)
    return lhs, rhs, abs(lhs - rhs)


def character_expansion_check(sigma, phi, direct=None, grid=4096):
    """Check the expansion sigma(Phi) = sum_chi sigma_hat(chi) nu_chi(Phi)
    with nu = Haar.

    Two call shapes.  If phi is a TorusObservable, the expanded side is
    the exact coefficient pairing and the direct side (unless supplied)
    is an independent uniform-grid quadrature of density * phi, exact
    for trigonometric data once the grid clears the joint bandwidth.
    If phi is a callable chi -> nu_chi(Phi) for a black-box integrand,
    a direct value must be supplied by the caller.

    Returns (direct, expanded, defect).
    """
    if not isinstance(sigma, TorusMeasure):
        raise TypeError("expected a TorusMeasure")
    if isinstance(phi, TorusObservable):
        if phi.dim != sigma.dim:
            raise ValueError("dimension mismatch")
        haar = TorusMeasure.haar(sigma.dim)
        expanded = 0j
        for chi, amp in sigma.coeffs.items():
            expanded += amp * character_twist(haar, chi)(phi)
        if direct is None:
            bw = [a + b + 1 for a, b in zip(sigma.bandwidth(),
                                            phi.bandwidth())]
            if sigma.dim == 1:
                n_axes = [max(bw[0], int(grid))]
            else:
                n_axes = [max(v, 64) for v in bw]
            axes = [(np.arange(n) + 0.5) / n for n in n_axes]
            mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
            vals = sigma.value(mesh) * phi.value(mesh)
            direct = complex(np.mean(vals))
        expanded = complex(expanded)
        return direct, expanded, abs(direct - expanded)
    if direct is None:
        raise ValueError("black-box functionals need an externally computed "
                         "direct value")
    expanded = 0j
    for chi, amp in sigma.coeffs.items():
        expanded += amp * complex(phi(chi))
    return complex(direct), complex(expanded), abs(direct - expanded)
