"""Enumeration of the truncated TLS (x) Fock basis.

Bath states are labelled by occupation shifts dn_k relative to a fixed
reference occupation n_k^eq per mode, with the excitation budget
sum_k |dn_k| <= n_ph and n_k^eq + dn_k >= 0.  The full basis is the tensor
product with the TLS; the state index is 2*bath_index + tls_bit, where
tls_bit = 0 is the sigma_z = +1 eigenstate.

Bath configurations are stored sparsely as tuples of (mode, dn) pairs with
dn != 0, sorted by mode, and enumerated in a canonical graded order: by total
excitation sum |dn|, then lexicographically by the sparse tuple.
"""

from __future__ import annotations

import hashlib
import math
from itertools import combinations, product

import numpy as np

from .bath import BathModes, BathSpec

#: default cap on the number of enumerated basis states
DEFAULT_MAX_STATES = 4_000_000


class BasisTooLargeError(ValueError):
    """Raised when the truncated basis would exceed the memory budget."""

    def __init__(self, count, budget):
        self.count = count
        self.budget = budget
        super().__init__(
            f"truncated basis would contain {count} states, exceeding the "
            f"budget of {budget}; reduce m_mod/n_ph or raise max_states"
        )


def hilbert_dimension(m_mod: int, n_ph: int) -> int:
    """Exact state count for an all-zero reference occupation (T=0).

    2 * (1 + sum_{j=1..n_ph} C(n_ph, j) * C(m_mod, j)): the leading 1 counts
    the zero-excitation reference configuration.
    """
    total = 1 + sum(
        math.comb(n_ph, j) * math.comb(m_mod, j) for j in range(1, n_ph + 1)
    )
    return 2 * total


def _compositions(total, parts):
    """Yield tuples of `parts` positive integers summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _enumerate_configs(m_mod, n_ph, n_eq, budget):
    configs = [()]
    for grade in range(1, n_ph + 1):
        for nsupp in range(1, grade + 1):
            for support in combinations(range(m_mod), nsupp):
                for comp in _compositions(grade, nsupp):
                    for signs in product((1, -1), repeat=nsupp):
                        dns = tuple(s * c for s, c in zip(signs, comp))
                        if any(
                            n_eq[k] + d < 0 for k, d in zip(support, dns)
                        ):
                            continue
                        configs.append(tuple(zip(support, dns)))
                        if len(configs) > budget // 2:
                            raise BasisTooLargeError(
                                f">{len(configs) * 2}", budget
                            )
    return configs


class TruncatedBasis:
    """Canonically ordered truncated basis with exact index lookup."""

    def __init__(self, spec: BathSpec, n_eq, max_states=DEFAULT_MAX_STATES):
        self.spec = spec
        self.n_eq = np.asarray(n_eq, dtype=np.int64)
        if len(self.n_eq) != spec.m_mod:
            raise ValueError("n_eq must have one entry per mode")
        if np.any(self.n_eq < 0):
            raise ValueError("reference occupations must be >= 0")

        if not np.any(self.n_eq):
            count = hilbert_dimension(spec.m_mod, spec.n_ph)
            if count > max_states:
                raise BasisTooLargeError(count, max_states)
        configs = _enumerate_configs(spec.m_mod, spec.n_ph, self.n_eq, max_states)
        configs.sort(key=lambda c: (sum(abs(d) for _, d in c), c))
        self.configs = configs
        self.lookup = {c: i for i, c in enumerate(configs)}
        self._op_cache = {}

    @property
    def n_bath(self):
        return len(self.configs)

    @property
    def dim(self):
        return 2 * len(self.configs)

    def index(self, tls_bit, config):
        """Ordinal of a (tls_bit, sparse bath config) basis state."""
        return 2 * self.lookup[config] + tls_bit

    def occupations(self, config):
        """Dense occupation-shift vector of a sparse config."""
        dn = np.zeros(self.spec.m_mod, dtype=np.int64)
        for k, d in config:
            dn[k] = d
        return dn

    def fingerprint(self):
        """Stable hash of the basis layout, used in checkpoint headers."""
        h = hashlib.sha256()
        h.update(
            repr(
                (
                    self.spec.alpha,
                    self.spec.omega_c,
                    self.spec.m_mod,
                    self.spec.n_ph,
                    self.spec.beta,
                    self.spec.s,
                )
            ).encode()
        )
        h.update(self.n_eq.tobytes())
        return h.hexdigest()[:16]


def enumerate_basis(
    spec: BathSpec,
    modes: BathModes = None,
    n_eq=None,
    max_states=DEFAULT_MAX_STATES,
) -> TruncatedBasis:
    """Build the truncated basis for a given reference occupation.

    `n_eq` defaults to the T=0 vacuum reference (all zeros).  `modes` is
    accepted for interface symmetry with the operator builders; the
    enumeration itself only needs the mode count.
    """
    if n_eq is None:
        n_eq = np.zeros(spec.m_mod, dtype=np.int64)
    return TruncatedBasis(spec, n_eq, max_states=max_states)
