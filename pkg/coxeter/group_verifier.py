from typing import Dict, List, Optional

import numpy as np

from algebra.multivector import batch_product, batch_reverse, rowwise_product
from coxeter.versor_groups import EVEN, VersorGroup, center, order_spectrum

# Binary polyhedral groups: order -> (label, order spectrum, center size)
BINARY_GROUPS: Dict[int, Dict] = {
    8: {"label": "Q", "spectrum": {1: 1, 2: 1, 4: 6}, "center": 2},
    24: {"label": "2T", "spectrum": {1: 1, 2: 1, 3: 8, 4: 6, 6: 8}, "center": 2},
    48: {"label": "2O", "spectrum": {1: 1, 2: 1, 3: 8, 4: 18, 6: 8, 8: 12}, "center": 2},
    120: {"label": "2I", "spectrum": {1: 1, 2: 1, 3: 20, 4: 30, 5: 24, 6: 20, 10: 24},
          "center": 2},
}

# Catalog source -> expected (spin order, pin order)
EXPECTED_ORDERS: Dict[str, Dict[str, int]] = {
    "A1A1A1": {EVEN: 8, "mixed": 16},
    "A3": {EVEN: 24, "mixed": 48},
    "B3": {EVEN: 48, "mixed": 96},
    "H3": {EVEN: 120, "mixed": 240},
}

SCOPE_NOTE = (
    "Identification is evidence-based (order, order spectrum, center size); "
    "no isomorphism search is performed. The evidence separates Q, 2T, 2O and 2I "
    "from every other group of the same order."
)


class GroupVerifier:
    """
    Checks the group axioms of a versor collection and identifies binary
    polyhedral groups. Failures are collected as records, never raised.
    """

    def __init__(self, group: VersorGroup, tol: float = 1e-9,
                 samples: int = 1000, seed: int = 0):
        self.group = group
        self.tol = tol
        self.samples = samples
        self.seed = seed
        self.size = group.sig.size

    # ========== AXIOM CHECKS ==========

    def check_identity(self) -> List[Dict]:
        """Scalar 1 must be an element"""
        if len(self.group) and self.group.identity_index(self.tol) >= 0:
            return []
        return [{
            'type': 'Identity Missing',
            'witnesses': [],
            'severity': 'CRITICAL',
            'description': "Scalar 1 is not an element of the set"
        }]

    def check_closure(self) -> List[Dict]:
        """Every product of two elements must be an element"""
        failures = []
        n = len(self.group)
        if n == 0:
            return failures
        products = batch_product(self.group.elements, self.group.elements, self.group.sig)
        found = self.group.index_of(products.reshape(-1, self.size), self.tol).reshape(n, n)

        for i, j in np.argwhere(found < 0)[:10]:
            failures.append({
                'type': 'Closure Failure',
                'witnesses': [int(i), int(j)],
                'severity': 'HIGH',
                'description': f"Product of elements {i} and {j} is not in the set"
            })
        return failures

    def check_inverses(self) -> List[Dict]:
        """The reverse of every unit versor is its inverse and must be present"""
        failures = []
        if len(self.group) == 0:
            return failures
        reverses = batch_reverse(self.group.elements, self.group.sig)
        found = self.group.index_of(reverses, self.tol)

        for i in np.flatnonzero(found < 0)[:10]:
            failures.append({
                'type': 'Inverse Missing',
                'witnesses': [int(i)],
                'severity': 'HIGH',
                'description': f"Reverse of element {i} is not in the set"
            })
        return failures

    def check_associativity(self, exhaustive: bool = False) -> List[Dict]:
        """(ab)c = a(bc) on sampled triples, or all triples when exhaustive"""
        failures = []
        n = len(self.group)
        if n == 0:
            return failures
        elements = self.group.elements
        sig = self.group.sig

        if exhaustive:
            products = batch_product(elements, elements, sig)
            pairs = products.reshape(-1, self.size)
            for i in range(n):
                ab_c = batch_product(products[i], elements, sig)
                a_bc = batch_product(elements[i:i + 1], pairs, sig).reshape(n, n, self.size)
                bad = np.argwhere(np.max(np.abs(ab_c - a_bc), axis=2) > self.tol)
                for j, k in bad[:10 - len(failures)]:
                    failures.append(self._associativity_failure(i, int(j), int(k)))
                if len(failures) >= 10:
                    break
            return failures

        rng = np.random.default_rng(self.seed)
        triples = rng.integers(0, n, size=(self.samples, 3))
        a, b, c = (elements[triples[:, k]] for k in range(3))
        ab_c = rowwise_product(rowwise_product(a, b, sig), c, sig)
        a_bc = rowwise_product(a, rowwise_product(b, c, sig), sig)
        bad = np.flatnonzero(np.max(np.abs(ab_c - a_bc), axis=1) > self.tol)
        for t in bad[:10]:
            failures.append(self._associativity_failure(*(int(x) for x in triples[t])))
        return failures

    # ========== REPORT ==========

    def verify(self, exhaustive: bool = False) -> Dict:
        """Run every check and attach identification evidence"""
        failures = (self.check_identity() + self.check_closure()
                    + self.check_inverses() + self.check_associativity(exhaustive))
        order = len(self.group)
        report = {
            'source': self.group.source,
            'parity': self.group.parity_class,
            'order': order,
            'passed': not failures,
            'failures': failures,
            'associativity': 'exhaustive' if exhaustive else f'sampled ({self.samples} triples)',
            'expected_order': self._expected_order(),
            'label': None,
            'order_spectrum': None,
            'center_size': None,
            'scope': SCOPE_NOTE,
        }
        if failures:
            return report

        spectrum = order_spectrum(self.group, self.tol)
        report['order_spectrum'] = {str(k): v for k, v in spectrum.items()}
        report['center_size'] = len(center(self.group, self.tol))
        report['label'] = self._identify(spectrum, report['center_size'])
        report['matches_expected'] = (report['expected_order'] is None
                                      or report['expected_order'] == order)
        return report

    # ========== HELPER METHODS ==========

    def _associativity_failure(self, i: int, j: int, k: int) -> Dict:
        return {
            'type': 'Associativity Failure',
            'witnesses': [i, j, k],
            'severity': 'CRITICAL',
            'description': f"(e{i} e{j}) e{k} differs from e{i} (e{j} e{k})"
        }

    def _expected_order(self) -> Optional[int]:
        expected = EXPECTED_ORDERS.get(self.group.source)
        return expected.get(self.group.parity_class) if expected else None

    def _identify(self, spectrum: Dict[int, int], center_size: int) -> Optional[str]:
        if self.group.parity_class != EVEN:
            return None
        known = BINARY_GROUPS.get(len(self.group))
        if known and known['spectrum'] == spectrum and known['center'] == center_size:
            return known['label']
        return None


def verify_group(vg: VersorGroup, tol: float = 1e-9, samples: int = 1000,
                 seed: int = 0, exhaustive: bool = False) -> Dict:
    return GroupVerifier(vg, tol=tol, samples=samples, seed=seed).verify(exhaustive)
