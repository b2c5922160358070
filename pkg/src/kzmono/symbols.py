"""Residue pairings of algebra-valued Laurent coefficients against the
quadratic current operators, independent of any module truncation.

A Laurent vector phi = sum_k X_k xi^{-k-1} d xi is stored by its finite
coefficient support. Two evaluations of the same pairing are provided: the
closed form (1 / 2(l + h_vee)) sum_k kappa(X_k, X_{m-k}), and the literal
double-residue expansion over an orthonormal basis, which for index 0 runs
through the ordering-free split of the quadratic zero-mode term. Their
agreement is the point of the module, so neither side shortcuts through the
other. The cocycle evaluation sum_k kappa(X_k, X_{n-k}) is the same sum
without the 1 / 2(l + h_vee) prefactor.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, ShapeError
from .liealg import OrthonormalBasis, killing_form
from .numerics import QuadExt


@dataclass(eq=False)
class LaurentGVector:
    """Finite support map k -> coefficient vector X_k in algebra coordinates."""

    algebra: object
    support: dict

    def __post_init__(self):
        clean = {}
        for k, vec in self.support.items():
            if len(vec) != self.algebra.dim:
                raise ShapeError(
                    f"coefficient at index {k} has length {len(vec)}, "
                    f"expected {self.algebra.dim}"
                )
            if any(vec):
                clean[int(k)] = list(vec)
        self.support = clean

    def coefficient(self, k):
        return self.support.get(k, [Fraction(0)] * self.algebra.dim)


@dataclass(frozen=True)
class FormalField:
    """The vector field xi^(n+1) d/dxi, kept only by its integer index."""

    index: int

    def evaluate(self, phi):
        return cocycle_evaluation(phi, self.index)


def symbol_pairing(phi, m, level):
    """(1 / 2(l + h_vee)) sum_k kappa(X_k, X_{m-k}), exact."""
    if not isinstance(level, int) or level < 1:
        raise DomainError(f"level must be a positive integer, got {level!r}")
    alg = phi.algebra
    norm = Fraction(1, 2 * (level + alg.dual_coxeter))
    return norm * cocycle_evaluation(phi, m)


def cocycle_evaluation(phi, n):
    """sum_k kappa(X_k, X_{n-k}), exact and finite by support."""
    return cocycle_cross(phi, phi, n)


def cocycle_cross(phi, psi, n):
    """Two-argument version sum_k kappa(X_k, Y_{n-k}); bilinear companion."""
    if phi.algebra is not psi.algebra:
        raise DomainError("Laurent vectors live over different algebras")
    alg = phi.algebra
    total = Fraction(0)
    for k, xk in phi.support.items():
        yk = psi.support.get(n - k)
        if yk is not None:
            total += killing_form(alg, xk, yk)
    return total


def residue_side(phi, m, level, basis):
    """The literal double-residue expansion of the pairing against the
    index-m quadratic operator, summed over an orthonormal basis.

    For m = 0 the evaluation follows the ordering-free rewriting: one
    (1/2(l+h_vee)) zero-mode square plus a (1/(l+h_vee)) tail over k >= 1.
    Returns an exact Fraction in symbolic mode, a complex number in float
    mode.
    """
    if not isinstance(basis, OrthonormalBasis):
        raise DomainError("residue_side needs an OrthonormalBasis")
    if basis.algebra is not phi.algebra:
        raise DomainError("basis and Laurent vector use different algebras")
    if not isinstance(level, int) or level < 1:
        raise DomainError(f"level must be a positive integer, got {level!r}")
    alg = phi.algebra
    hv = alg.dual_coxeter
    elements = basis.elements
    symbolic = basis.mode == "symbolic"

    def pair_sq(xk, xq):
        acc = QuadExt(0) if symbolic else 0j
        for j in elements:
            acc = acc + killing_form(alg, xk, j) * killing_form(alg, xq, j)
        return acc

    if m != 0:
        total = QuadExt(0) if symbolic else 0j
        for k in phi.support:
            other = phi.support.get(m - k)
            if other is not None:
                total = total + pair_sq(phi.support[k], other)
        total = total * Fraction(1, 2 * (level + hv))
    else:
        total = QuadExt(0) if symbolic else 0j
        x0 = phi.support.get(0)
        if x0 is not None:
            total = total + Fraction(1, 2 * (level + hv)) * pair_sq(x0, x0)
        tail = QuadExt(0) if symbolic else 0j
        for k in sorted(phi.support):
            if k >= 1 and (-k) in phi.support:
                tail = tail + pair_sq(phi.support[-k], phi.support[k])
        total = total + Fraction(1, level + hv) * tail
    if symbolic:
        return total.rational()
    return total


def random_laurent_vector(alg, rng, kmin=-4, kmax=4, max_terms=4, coeff_bound=3):
    """Seeded random Laurent vector for property trials."""
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    support = {}
    terms = rng.randint(1, max_terms)
    for _ in range(terms):
        k = rng.randint(kmin, kmax)
        vec = [Fraction(rng.randint(-coeff_bound, coeff_bound)) for _ in range(alg.dim)]
        if k in support:
            support[k] = [a + b for a, b in zip(support[k], vec)]
        else:
            support[k] = vec
    return LaurentGVector(algebra=alg, support=support)
