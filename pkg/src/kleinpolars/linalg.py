"""Row reduction over a FieldTower (raw coefficients)."""

from __future__ import annotations

from .exactnum import FieldTower


def monomials(d: int):
    """Exponent triples of degree ``d``, grouped by increasing z-degree."""
    out = []
    for c in range(d + 1):
        for b in range(d - c, -1, -1):
            out.append((d - b - c, b, c))
    return out


class Echelon:
    """Incrementally maintained reduced row echelon form.

    Rows are dicts column -> raw coefficient; pivots are kept normalized to 1.
    """

    def __init__(self, T: FieldTower):
        self.T = T
        self.rows = {}  # pivot column -> row

    def __len__(self):
        return len(self.rows)

    def reduce(self, row: dict) -> dict:
        T = self.T
        r = {k: v for k, v in row.items() if not T.is_zero(v)}
        # pivot rows vanish on the other pivot columns, so one pass suffices
        for c in [c for c in r if c in self.rows]:
            f = r[c]
            for k, v in self.rows[c].items():
                nv = T.sub(r[k], T.mul(f, v)) if k in r else T.neg(T.mul(f, v))
                if T.is_zero(nv):
                    r.pop(k, None)
                else:
                    r[k] = nv
        return r

    def add(self, row: dict) -> bool:
        """Insert ``row``; False if it was already in the span."""
        T = self.T
        r = self.reduce(row)
        if not r:
            return False
        c = min(r)
        inv = T.inv(r[c])
        r = {k: T.mul(v, inv) for k, v in r.items()}
        # keep the form reduced: clear column c from the existing rows
        for p, other in self.rows.items():
            if c in other:
                f = other[c]
                for k, v in r.items():
                    nv = T.sub(other[k], T.mul(f, v)) if k in other else T.neg(T.mul(f, v))
                    if T.is_zero(nv):
                        other.pop(k, None)
                    else:
                        other[k] = nv
        self.rows[c] = r
        return True

    def contains(self, row: dict) -> bool:
        return not self.reduce(row)


def kernel(T: FieldTower, rows, ncols: int):
    """Basis of ``{v : row . v = 0 for every row}`` (rows as dicts)."""
    E = Echelon(T)
    for r in rows:
        E.add(r)
    pivots = set(E.rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = {f: T.one_raw}
        for p, r in E.rows.items():
            if f in r:
                v[p] = T.neg(r[f])
        basis.append(v)
    return basis
