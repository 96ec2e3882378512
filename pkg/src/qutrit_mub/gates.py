"""Qutrit gates F, R, X, the decomposition-word parser, and table verification.

Qutrit 1 is the leftmost tensor factor (most significant base-3 digit).
``X_ij`` has control ``i`` and target ``j`` and maps |i>|j> -> |i>|j - i mod 3>.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import mub as mub_mod
from .cxla import TOL_EQ
from .mub import OMEGA_POWERS, Basis, standard_basis

CONVENTIONS = ("left-first", "left-last")
PHASE_VARIANTS = ("paper", "diag-1-w-w2")

_W = OMEGA_POWERS
F = np.array([[_W[(l * j) % 3] for j in range(3)] for l in range(3)]) / np.sqrt(3)
PHASE_GATES = {
    "paper": np.diag([1, _W[1], _W[1]]),
    "diag-1-w-w2": np.diag([1, _W[1], _W[2]]),
}


class GateError(ValueError):
    pass


class ParseError(GateError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class GateToken:
    kind: str  # "F", "R" or "X"
    qutrits: tuple[int, ...]  # 1-based; (control, target) for X
    inverse: bool = False

    def __post_init__(self):
        if self.kind not in ("F", "R", "X"):
            raise GateError(f"unknown gate kind {self.kind!r}")
        want = 2 if self.kind == "X" else 1
        if len(self.qutrits) != want:
            raise GateError(f"{self.kind} takes {want} qutrit index(es), got {self.qutrits}")
        if self.kind == "X" and self.qutrits[0] == self.qutrits[1]:
            raise GateError("X source and target must differ")

    def render(self) -> str:
        return self.kind + "".join(map(str, self.qutrits)) + ("^-1" if self.inverse else "")


@dataclass(frozen=True)
class GateWord:
    tokens: tuple[GateToken, ...]
    n_qutrits: int

    def __post_init__(self):
        for t in self.tokens:
            if max(t.qutrits) > self.n_qutrits or min(t.qutrits) < 1:
                raise GateError(f"{t.render()} out of range for {self.n_qutrits} qutrit(s)")

    def render(self) -> str:
        return " ".join(t.render() for t in self.tokens)

    def inverse(self) -> GateWord:
        """The reversed word with every token inverted."""
        toks = tuple(GateToken(t.kind, t.qutrits, not t.inverse) for t in reversed(self.tokens))
        return GateWord(toks, self.n_qutrits)

    def count_nonlocal(self) -> int:
        return sum(t.kind == "X" for t in self.tokens)


_IGNORED = set(" \t_{}")


def parse_word(text: str, n_qutrits: int) -> GateWord:
    """Parse e.g. ``"F1^-1 X12 F2^-1 R2^-1"`` or ``"F_{1}^{-1}X_{12}"``.

    Whitespace, underscores and braces are ignored; errors carry the
    0-based position in ``text``.
    """
    if n_qutrits not in (1, 2, 3):
        raise GateError(f"n_qutrits must be 1, 2 or 3, got {n_qutrits}")
    chars = [(i, c) for i, c in enumerate(text) if c not in _IGNORED]
    tokens = []
    pos = 0

    def peek():
        return chars[pos] if pos < len(chars) else (len(text), "")

    while pos < len(chars):
        start, kind = chars[pos]
        if kind not in "FRX":
            raise ParseError(f"expected F, R or X, found {kind!r}", start)
        pos += 1
        idx = []
        for _ in range(2 if kind == "X" else 1):
            at, c = peek()
            if c not in ("1", "2", "3"):
                raise ParseError(f"expected qutrit index 1-3 after {kind}, found {c or 'end'!r}", at)
            if int(c) > n_qutrits:
                raise ParseError(f"qutrit index {c} exceeds {n_qutrits}", at)
            idx.append(int(c))
            pos += 1
        if kind == "X" and idx[0] == idx[1]:
            raise ParseError("X source equals target", start)
        inverse = False
        if peek()[1] == "^":
            seq = "".join(c for _, c in chars[pos : pos + 3])
            if seq != "^-1":
                raise ParseError(f"expected ^-1, found {seq!r}", peek()[0])
            inverse = True
            pos += 3
        tokens.append(GateToken(kind, tuple(idx), inverse))
    return GateWord(tuple(tokens), n_qutrits)


def _single(kind: str, variant: str) -> np.ndarray:
    if kind == "F":
        return F
    try:
        return PHASE_GATES[variant]
    except KeyError:
        raise GateError(f"unknown phase-gate variant {variant!r}") from None


def _controlled_minus(control: int, target: int, n: int) -> np.ndarray:
    dim = 3**n
    u = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        digits = [int(c) for c in np.base_repr(col, 3).zfill(n)]
        digits[target - 1] = (digits[target - 1] - digits[control - 1]) % 3
        row = int("".join(map(str, digits)), 3)
        u[row, col] = 1.0
    return u


def gate_unitary(token: GateToken, n_qutrits: int, variant: str = "paper") -> np.ndarray:
    if max(token.qutrits) > n_qutrits:
        raise GateError(f"{token.render()} out of range for {n_qutrits} qutrit(s)")
    if token.kind == "X":
        u = _controlled_minus(token.qutrits[0], token.qutrits[1], n_qutrits)
    else:
        u = np.ones((1, 1), dtype=complex)
        for q in range(1, n_qutrits + 1):
            u = np.kron(u, _single(token.kind, variant) if q == token.qutrits[0] else np.eye(3))
    return u.conj().T if token.inverse else u


def evaluate(word: GateWord, convention: str = "left-first", variant: str = "paper") -> np.ndarray:
    """Unitary of ``word``.

    ``left-first`` applies the leftmost token first (U = G_n ... G_1);
    ``left-last`` treats the text as a matrix product (U = G_1 ... G_n).
    """
    if convention not in CONVENTIONS:
        raise GateError(f"unknown convention {convention!r}")
    u = np.eye(3**word.n_qutrits, dtype=complex)
    for tok in word.tokens:
        g = gate_unitary(tok, word.n_qutrits, variant)
        u = g @ u if convention == "left-first" else u @ g
    return u


def basis_from_word(word: GateWord, convention: str = "left-first", variant: str = "paper",
                    label: str = "") -> Basis:
    return Basis(label or word.render() or "I", evaluate(word, convention, variant),
                 "gate-decomposition")


@dataclass(frozen=True)
class DecompositionTable:
    table_id: str  # "I", "II" or "III"
    n_qutrits: int
    rows: tuple[tuple[str, GateWord], ...]

    @property
    def includes_standard(self) -> bool:
        # Tables I and II start at basis 2; basis 1 is the computational one.
        return self.table_id in ("I", "II")

    def count_nonlocal(self) -> int:
        return sum(w.count_nonlocal() for _, w in self.rows)


_TABLE_FILES = {"I": ("table1.txt", 1), "II": ("table2.txt", 2), "III": ("table3.txt", 3)}
_ID_ALIASES = {"1": "I", "2": "II", "3": "III", "I": "I", "II": "II", "III": "III"}


def parse_table(text: str, table_id: str, n_qutrits: int) -> DecompositionTable:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        label, sep, word = line.partition(":")
        if not sep:
            raise GateError(f"line {lineno}: expected 'label: word'")
        try:
            rows.append((label.strip(), parse_word(word, n_qutrits)))
        except ParseError as e:
            raise GateError(f"line {lineno}: {e}") from e
    return DecompositionTable(table_id, n_qutrits, tuple(rows))


def load_table(table_id) -> DecompositionTable:
    try:
        tid = _ID_ALIASES[str(table_id).upper()]
    except KeyError:
        raise GateError(f"unknown table {table_id!r}") from None
    fname, n = _TABLE_FILES[tid]
    text = resources.files("qutrit_mub.tables").joinpath(fname).read_text(encoding="utf-8")
    return parse_table(text, tid, n)


def count_nonlocal(table: DecompositionTable) -> int:
    return table.count_nonlocal()


@dataclass
class RowVerdict:
    label: str
    unbiased_vs_all: bool
    worst_pair: str | None
    deviation: float
    field_match: str | None = None

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "unbiased_vs_all": self.unbiased_vs_all,
            "worst_pair": self.worst_pair,
            "deviation": self.deviation,
            "field_match": self.field_match,
        }


@dataclass
class TableReport:
    table_id: str
    convention_used: str
    phase_variant: str
    per_row: list[RowVerdict]
    pairs_checked: int
    pairs_passed: int
    max_deviation: float
    standard_unbiased_to_all: bool | None = None
    convention_scores: dict[str, int] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return self.pairs_passed == self.pairs_checked

    def to_dict(self) -> dict:
        return {
            "table_id": self.table_id,
            "convention_used": self.convention_used,
            "phase_variant": self.phase_variant,
            "per_row": [r.to_dict() for r in self.per_row],
            "pairs_checked": self.pairs_checked,
            "pairs_passed": self.pairs_passed,
            "all_passed": self.all_passed,
            "max_deviation": self.max_deviation,
            "standard_unbiased_to_all": self.standard_unbiased_to_all,
            "convention_scores": self.convention_scores,
        }


def _label_key(label: str):
    return (0, int(label), "") if label.isdigit() else (1, 0, label)


def verify_bases(bases, tol: float = TOL_EQ, table_id: str = "", convention: str = "",
                 variant: str = "", references=None) -> TableReport:
    """Per-basis unbiasedness verdicts for an arbitrary list of bases.

    ``references`` (optional) are bases each row is matched against,
    up to phase and relabelling, for the ``field_match`` column.
    """
    bases = sorted(bases, key=lambda b: _label_key(b.label))
    dev = mub_mod.overlap_deviations(bases)
    m = len(bases)
    rows = []
    for i, b in enumerate(bases):
        others = [j for j in range(m) if j != i]
        # include i itself: a non-orthonormal row fails regardless of partners
        worst_j = max(others + [i], key=lambda j: dev[i, j])
        worst = float(dev[i, worst_j])
        match = None
        if references is not None:
            match = next((r.label for r in references if mub_mod.same_basis(b, r)), None)
        rows.append(RowVerdict(b.label, worst <= tol, bases[worst_j].label if worst_j != i else None,
                               worst, match))
    iu = np.triu_indices(m, 1)
    pair_dev = dev[iu]
    return TableReport(table_id, convention, variant, rows, int(pair_dev.size),
                       int(np.sum(pair_dev <= tol)), float(dev.max()) if m else 0.0)


def table_bases(table: DecompositionTable, convention: str, variant: str = "paper") -> list[Basis]:
    bases = [basis_from_word(w, convention, variant, label) for label, w in table.rows]
    if table.includes_standard:
        bases.insert(0, standard_basis(3**table.n_qutrits, "1", "explicit-fixture"))
    return bases


def verify_table(table: DecompositionTable, convention: str = "auto", variant: str = "paper",
                 tol: float = TOL_EQ) -> TableReport:
    """Verify one table under a convention, or pick the best one with ``auto``.

    ``auto`` keeps the convention with the most unbiased pairs; ties go to
    ``left-first``.
    """
    d = 3**table.n_qutrits
    refs = mub_mod.build_field_mubs(d).bases
    tried = CONVENTIONS if convention == "auto" else (convention,)
    reports = {}
    for conv in tried:
        bases = table_bases(table, conv, variant)
        rep = verify_bases(bases, tol, table.table_id, conv, variant, refs)
        if not table.includes_standard:
            std = standard_basis(d, "std")
            # the first len(bases) pairs are (std, row)
            std_pairs = mub_mod.verify_unbiased([std] + bases, tol).pairs[: len(bases)]
            rep.standard_unbiased_to_all = all(p.passed for p in std_pairs)
        reports[conv] = rep
    best = max(tried, key=lambda c: reports[c].pairs_passed)
    rep = reports[best]
    rep.convention_scores = {c: reports[c].pairs_passed for c in tried}
    return rep


def sweep_table(table: DecompositionTable, tol: float = TOL_EQ) -> list[TableReport]:
    """Reports for every (convention, phase variant) combination, in fixed order."""
    return [verify_table(table, c, v, tol) for v in PHASE_VARIANTS for c in CONVENTIONS]
