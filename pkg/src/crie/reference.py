"""Published reference values of the interval entropy, five decimals.

Two blocks of four distributions, each evaluated on nine windows. The
column labelled ``Lomax(2,1)`` is reproduced by ``lomax:2,0.5``; the
literal reading ``lomax:2,1`` misses most of its cells, by up to 0.11 (see
:data:`LITERAL_SPECS`).
"""

from dataclasses import dataclass

from .distributions import parse_distribution
from .entropy import crie
from .truncation import truncate


@dataclass(frozen=True)
class ReferenceCell:
    label: str
    spec: str
    tau1: float
    tau2: float
    published: float


_UNIT_LABELS = ("PD(0.1,0.9)", "PD(0.3,0.9)", "Beta(0.2,1)", "Beta(0.5,1)")
_UNIT_SPECS = ("power:0.1,0.9", "power:0.3,0.9", "betac:0.2", "betac:0.5")
_UNIT_ROWS = {
    (0.1, 0.6): (0.13182, 0.13180, 0.13193, 0.13084),
    (0.3, 0.6): (0.07722, 0.07687, 0.07705, 0.07643),
    (0.5, 0.6): (0.02522, 0.02517, 0.02520, 0.02513),
    (0.1, 0.7): (0.15839, 0.15862, 0.15868, 0.15752),
    (0.3, 0.7): (0.10347, 0.10298, 0.10325, 0.10232),
    (0.5, 0.7): (0.05078, 0.05063, 0.05071, 0.05047),
    (0.1, 0.9): (0.21145, 0.21241, 0.21223, 0.21111),
    (0.3, 0.9): (0.15629, 0.15559, 0.15599, 0.15447),
    (0.5, 0.9): (0.10258, 0.10214, 0.10237, 0.10162),
}

_LIFE_LABELS = ("Exp(0.5)", "Exp(1)", "Lomax(2,1)", "Lomax(3,1)")
_LIFE_SPECS = ("exp:0.5", "exp:1", "lomax:2,0.5", "lomax:3,1")
_LIFE_ROWS = {
    (3, 10): (1.52470, 0.97614, 1.61098, 1.45535),
    (7, 10): (0.76254, 0.68870, 0.77343, 0.77164),
    (9, 10): (0.25514, 0.25652, 0.25364, 0.25439),
    (3, 12): (1.73694, 0.99480, 1.95250, 1.69662),
    (7, 12): (1.20018, 0.90432, 1.28394, 1.26233),
    (9, 12): (0.76254, 0.68870, 0.77200, 0.77252),
    (3, 15): (1.90245, 0.99955, 2.38429, 1.96523),
    (7, 15): (1.64355, 0.98871, 2.00701, 1.91438),
    (9, 15): (1.37740, 0.95123, 1.54259, 1.51885),
}

#: column label -> literal parameter reading, where it differs
LITERAL_SPECS = {"Lomax(2,1)": "lomax:2,1"}


def _cells(labels, specs, rows):
    return [ReferenceCell(lab, spec, float(t1), float(t2), val)
            for (t1, t2), vals in rows.items()
            for lab, spec, val in zip(labels, specs, vals)]


#: all 72 reference cells, row by row
REFERENCE_CELLS = tuple(_cells(_UNIT_LABELS, _UNIT_SPECS, _UNIT_ROWS)
                        + _cells(_LIFE_LABELS, _LIFE_SPECS, _LIFE_ROWS))


@dataclass(frozen=True)
class CellResult:
    cell: ReferenceCell
    spec: str
    computed: float

    @property
    def deviation(self):
        return abs(self.computed - self.cell.published)


def reproduce(literal=False, cfg=None):
    """Recompute every reference cell.

    With ``literal``, columns listed in :data:`LITERAL_SPECS` use their
    literal parameter reading instead.
    """
    out = []
    for cell in REFERENCE_CELLS:
        spec = LITERAL_SPECS.get(cell.label, cell.spec) if literal else cell.spec
        v = truncate(parse_distribution(spec), cell.tau1, cell.tau2)
        out.append(CellResult(cell, spec, crie(v, cfg=cfg)))
    return out
