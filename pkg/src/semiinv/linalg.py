"""Incremental sparse row echelon form over an exact field.

Vectors are dicts keyed by monomials.  Each stored row is normalized so its
smallest key (the pivot) has coefficient 1; rows also carry the combination of
inserted labels they stand for, which yields membership certificates.
"""

from __future__ import annotations

import heapq

from .ring import CoefficientRing


class Echelon:
    def __init__(self, ring: CoefficientRing):
        if not ring.is_field:
            raise ValueError(f"exact elimination needs a field, got {ring}")
        self.ring = ring
        self._rows: dict = {}  # pivot -> (row, combination)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, vec: dict, combo: dict | None = None) -> tuple[dict, dict]:
        """Return ``(residual, combination)`` with ``vec - sum(c*row) = residual``.

        The residual has no entries on pivot keys; ``combination`` expresses what
        was subtracted in terms of inserted labels, added onto ``combo``.
        """
        ring = self.ring
        red = ring.reduce
        vec = {k: red(v) for k, v in vec.items() if red(v)}
        combo = dict(combo or {})
        heap = list(vec)
        heapq.heapify(heap)
        queued = set(heap)
        while heap:
            key = heapq.heappop(heap)
            queued.discard(key)
            c = vec.get(key)
            if not c or key not in self._rows:
                continue
            row, row_combo = self._rows[key]
            for k, v in row.items():
                nv = red(vec.get(k, 0) - c * v)
                if nv:
                    vec[k] = nv
                    if k not in queued:
                        heapq.heappush(heap, k)
                        queued.add(k)
                else:
                    vec.pop(k, None)
            for lab, v in row_combo.items():
                nv = red(combo.get(lab, 0) + c * v)
                if nv:
                    combo[lab] = nv
                else:
                    combo.pop(lab, None)
        return vec, combo

    def insert(self, vec: dict, label) -> bool:
        """Add a vector; return True iff it was independent of the stored rows."""
        residual, sub = self.reduce(vec)
        if not residual:
            return False
        ring = self.ring
        # residual = vec - sub  =>  combination of labels is {label: 1} - sub
        combo = {lab: ring.neg(v) for lab, v in sub.items()}
        combo[label] = ring.reduce(combo.get(label, 0) + 1)
        pivot = min(residual)
        inv = ring.inv(residual[pivot])
        row = {k: ring.reduce(v * inv) for k, v in residual.items()}
        combo = {lab: ring.reduce(v * inv) for lab, v in combo.items() if ring.reduce(v * inv)}
        self._rows[pivot] = (row, combo)
        return True

    def solve(self, vec: dict) -> dict | None:
        """Combination of inserted labels equal to ``vec``, or None if outside the span."""
        residual, combo = self.reduce(vec)
        if residual:
            return None
        return combo

    def copy(self) -> "Echelon":
        other = Echelon(self.ring)
        other._rows = dict(self._rows)
        return other
