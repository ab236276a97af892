"""A tiny nodal-analysis solver for linear small-signal networks.

Only admittances, voltage-controlled current sources and independent current
sources are supported, which is all a transistor small-signal model needs.
Node ``"0"`` is ground.
"""

from __future__ import annotations

import numpy as np

GROUND = "0"


class SmallSignalNetwork:
    def __init__(self):
        self._nodes: dict[str, int] = {}
        self._admittances = []  # (n1, n2, y(w))
        self._vccs = []  # (out+, out-, ctrl+, ctrl-, gm)
        self._sources = []  # (n_from, n_to, amps)

    def _index(self, node: str):
        if node == GROUND:
            return None
        return self._nodes.setdefault(node, len(self._nodes))

    def admittance(self, n1: str, n2: str, y):
        """Branch admittance; ``y`` is a constant or a function of w (rad/s)."""
        self._admittances.append((self._index(n1), self._index(n2), y))

    def resistor(self, n1: str, n2: str, r: float):
        self.admittance(n1, n2, 1.0 / r)

    def capacitor(self, n1: str, n2: str, c: float):
        self.admittance(n1, n2, lambda w: 1j * w * c)

    def vccs(self, out_p: str, out_n: str, ctrl_p: str, ctrl_n: str, gm: float):
        """Current ``gm*(v(ctrl_p) - v(ctrl_n))`` flowing from ``out_p`` to ``out_n``
        through the source."""
        self._vccs.append(
            (self._index(out_p), self._index(out_n), self._index(ctrl_p), self._index(ctrl_n), gm)
        )

    def current_source(self, n_from: str, n_to: str, amps: complex):
        """Current ``amps`` driven out of ``n_from`` into ``n_to``."""
        self._sources.append((self._index(n_from), self._index(n_to), amps))

    def solve(self, w: float) -> dict[str, complex]:
        n = len(self._nodes)
        Y = np.zeros((n, n), dtype=complex)
        rhs = np.zeros(n, dtype=complex)
        for a, b, y in self._admittances:
            yv = y(w) if callable(y) else y
            for i, j, s in ((a, a, 1), (b, b, 1), (a, b, -1), (b, a, -1)):
                if i is not None and j is not None:
                    Y[i, j] += s * yv
        for op, on, cp, cn, gm in self._vccs:
            for row, rs in ((op, 1), (on, -1)):
                if row is None:
                    continue
                for col, cs in ((cp, 1), (cn, -1)):
                    if col is not None:
                        Y[row, col] += rs * cs * gm
        for a, b, amps in self._sources:
            if a is not None:
                rhs[a] -= amps
            if b is not None:
                rhs[b] += amps
        v = np.linalg.solve(Y, rhs)
        return {name: v[idx] for name, idx in self._nodes.items()}
