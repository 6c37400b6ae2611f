"""Plain-text fixtures for the n = 6 spaces and symmetry subsets.

Grammar::

    # comment
    [inputs]
    100000
    ...
    [translations]
    ...
    [subset 1]
    T:
    000000
    ...
    X:
    ...
    R:
    100000        <- matrices are blocks of n rows; blank lines between
    ...              blocks are optional

Two files ship with the package. ``appendix_v_raw.txt`` is a verbatim
transcription, typos included. ``appendix_v_clean.txt`` carries the
repairs, each marked by a comment line, and is the one verified.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

from .gf2 import BitMatrix, BitVector, is_orthogonal, mat_apply, parity
from .symmetry import SymmetrySubset, symmetry_parameter_W


class FixtureParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class FixtureError(ValueError):
    """A loaded fixture violates one of its invariants."""

    def __init__(self, check: str, msg: str):
        super().__init__(f"{check}: {msg}")
        self.check = check


@dataclass
class FixtureSubset:
    m: int
    T: list[BitVector] = field(default_factory=list)
    X: list[BitVector] = field(default_factory=list)
    R: list[BitMatrix] = field(default_factory=list)

    def as_symmetry_subset(self) -> SymmetrySubset:
        return SymmetrySubset(self.m, tuple(self.T), tuple(self.X), tuple(self.X), construction="fixture", _R=tuple(self.R))


@dataclass
class FixtureSet:
    n: int
    inputs: list[BitVector]
    translations: list[BitVector]
    subsets: list[FixtureSubset]
    source: Optional[str] = None
    notes: list[str] = field(default_factory=list)


def _data_path(name: str) -> Path:
    return Path(str(resources.files("nlbox") / "data" / name))


def raw_fixture_path() -> Path:
    return _data_path("appendix_v_raw.txt")


def clean_fixture_path() -> Path:
    return _data_path("appendix_v_clean.txt")


def parse_fixture_text(text: str, source: Optional[str] = None) -> FixtureSet:
    n: Optional[int] = None
    inputs: list[BitVector] = []
    translations: list[BitVector] = []
    subsets: list[FixtureSubset] = []
    notes: list[str] = []
    section: Optional[str] = None
    part: Optional[str] = None
    pending: list[tuple[int, BitVector]] = []

    def flush_matrix(lineno):
        if not pending:
            return
        if len(pending) != n:
            raise FixtureParseError(pending[0][0], f"matrix block has {len(pending)} rows, expected {n}")
        subsets[-1].R.append(BitMatrix.from_vectors([v for _, v in pending]))
        pending.clear()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            notes.append(line[1:].strip())
            continue
        if not line:
            if part == "R":
                flush_matrix(lineno)
            continue
        if line.startswith("["):
            if part == "R":
                flush_matrix(lineno)
            part = None
            if line == "[inputs]":
                section = "inputs"
            elif line == "[translations]":
                section = "translations"
            elif line.startswith("[subset ") and line.endswith("]"):
                try:
                    m = int(line[len("[subset "):-1])
                except ValueError:
                    raise FixtureParseError(lineno, f"bad subset header {line!r}") from None
                subsets.append(FixtureSubset(m))
                section = "subset"
            else:
                raise FixtureParseError(lineno, f"unknown section {line!r}")
            continue
        if line in ("T:", "X:", "R:"):
            if section != "subset":
                raise FixtureParseError(lineno, f"{line} outside a subset section")
            if part == "R":
                flush_matrix(lineno)
            part = line[0]
            continue
        try:
            v = BitVector.parse(line)
        except ValueError:
            raise FixtureParseError(lineno, f"not a bitstring: {line!r}") from None
        if n is None:
            n = v.n
        elif v.n != n:
            raise FixtureParseError(lineno, f"length {v.n}, expected {n}")
        if section == "inputs":
            inputs.append(v)
        elif section == "translations":
            translations.append(v)
        elif section == "subset" and part == "T":
            subsets[-1].T.append(v)
        elif section == "subset" and part == "X":
            subsets[-1].X.append(v)
        elif section == "subset" and part == "R":
            pending.append((lineno, v))
            if len(pending) == n:
                flush_matrix(lineno)
        else:
            raise FixtureParseError(lineno, "bitstring outside any section")
    if part == "R":
        flush_matrix(None)
    if n is None:
        raise FixtureParseError(0, "empty fixture")
    return FixtureSet(n, inputs, translations, subsets, source, notes)


def _no_duplicates(vs: Sequence, where: str) -> None:
    seen = set()
    for v in vs:
        if v in seen:
            raise FixtureError("duplicate", f"{v} listed twice in {where}")
        seen.add(v)


def check_fixture_invariants(fx: FixtureSet) -> None:
    n = fx.n
    for v in fx.inputs:
        if parity(v) != 1:
            raise FixtureError("parity", f"odd parity required for input {v}")
    for v in fx.translations:
        if parity(v) != 0:
            raise FixtureError("parity", f"even parity required for translation {v}")
    _no_duplicates(fx.inputs, "inputs")
    _no_duplicates(fx.translations, "translations")
    full = 1 << (n - 1)
    if len(fx.inputs) != full or len(fx.translations) != full:
        raise FixtureError("count", f"expected {full} inputs and translations")
    cell = 1 << (n // 2)
    for s in fx.subsets:
        _no_duplicates(s.T, f"subset {s.m} T")
        _no_duplicates(s.X, f"subset {s.m} X")
        if len(s.T) != cell or len(s.X) != cell:
            raise FixtureError("count", f"subset {s.m} needs {cell} T and {cell} X entries")
        if len(s.R) < 4:
            raise FixtureError("count", f"subset {s.m} lists {len(s.R)} matrices, need at least 4")
        for v in s.X:
            if parity(v) != 1:
                raise FixtureError("parity", f"odd parity required for X entry {v}")
        for v in s.T:
            if parity(v) != 0:
                raise FixtureError("parity", f"even parity required for T entry {v}")


def load_fixture_file(path: Union[str, Path], strict: bool = True) -> FixtureSet:
    """Parse a fixture file; with ``strict`` every invariant is checked at load."""
    p = Path(path)
    fx = parse_fixture_text(p.read_text(), source=str(p))
    if strict:
        check_fixture_invariants(fx)
    return fx


def load_appendix_v(clean: bool = True) -> FixtureSet:
    if clean:
        return load_fixture_file(clean_fixture_path())
    return load_fixture_file(raw_fixture_path(), strict=False)


# ---------------------------------------------------------------- verification


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, key: str) -> Check:
        for c in self.checks:
            if c.name.startswith(key):
                return c
        raise KeyError(key)

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in self.checks]


def _xor_closed(ws: set[int]) -> bool:
    return all(a ^ b in ws for a in ws for b in ws)


def verify_appendix_v(fx: FixtureSet) -> VerificationReport:
    n = fx.n
    ones = (1 << n) - 1
    full = 1 << (n - 1)
    checks = []

    bad = [str(v) for v in fx.inputs if parity(v) != 1] + [str(v) for v in fx.translations if parity(v) != 0]
    ok = not bad and len(set(fx.inputs)) == full and len(set(fx.translations)) == full
    checks.append(Check("a parity and counts", ok,
                        f"{len(set(fx.inputs))} inputs, {len(set(fx.translations))} translations"
                        + (f"; wrong parity: {', '.join(bad)}" if bad else "")))

    fails = []
    for s in fx.subsets:
        ws = {t.word for t in s.T}
        if not _xor_closed(ws):
            fails.append(f"subset {s.m} not XOR-closed")
        if any((a & b).bit_count() & 1 for a in ws for b in ws):
            fails.append(f"subset {s.m} not self-orthogonal")
        if not {0, ones} <= ws:
            fails.append(f"subset {s.m} misses 0…0 or 1…1")
    checks.append(Check("b closure and self-orthogonality", not fails, "; ".join(fails) or f"{len(fx.subsets)} subsets"))

    fails = []
    for s in fx.subsets:
        ts = {t.word for t in s.T}
        if not s.X:
            fails.append(f"subset {s.m} has no inputs")
            continue
        x_ref = min(s.X)
        coset = {x_ref.word ^ t for t in ts}
        if coset != {x.word for x in s.X}:
            fails.append(f"subset {s.m}: X is not {x_ref} ⊕ T")
    checks.append(Check("c coset structure", not fails, "; ".join(fails) or "X_m = x_ref ⊕ T_m for every subset"))

    fails = []
    for a, b in itertools.combinations(fx.subsets, 2):
        inter = {t.word for t in a.T} & {t.word for t in b.T}
        if inter != {0, ones}:
            fails.append(f"subsets {a.m},{b.m} share {sorted(format(w, f'0{n}b') for w in inter)}")
    checks.append(Check("d pairwise intersection", not fails, "; ".join(fails) or "every pair meets in {0…0, 1…1}"))

    union = {t.word for s in fx.subsets for t in s.T}
    target = {t.word for t in fx.translations}
    missing = sorted(format(w, f"0{n}b") for w in target - union)
    extra = sorted(format(w, f"0{n}b") for w in union - target)
    ok = not missing and not extra and len(union) == full
    checks.append(Check("e cover", ok, f"union has {len(union)} translations"
                        + (f"; missing {missing}" if missing else "") + (f"; not listed {extra}" if extra else "")))

    fails = []
    count = 0
    for s in fx.subsets:
        members = set(s.T)
        for i, R in enumerate(s.R, start=1):
            count += 1
            if not is_orthogonal(R):
                fails.append(f"subset {s.m} matrix {i} not orthogonal")
            elif any(parity(r) != 1 for r in R.row_vectors() + R.column_vectors()):
                fails.append(f"subset {s.m} matrix {i} has an even-parity row or column")
            elif any(mat_apply(R, t) not in members for t in s.T):
                fails.append(f"subset {s.m} matrix {i} does not stabilize T_{s.m}")
    checks.append(Check("f matrices", not fails, "; ".join(fails) or f"{count} matrices orthogonal and stabilizing"))

    fails = []
    quads = 0
    for s in fx.subsets:
        for x1, x2, y1, y2 in itertools.product(s.X, repeat=4):
            quads += 1
            if symmetry_parameter_W(x1, x2, y1, y2):
                fails.append(f"subset {s.m}: W=1 at {x1},{x2},{y1},{y2}")
                break
    checks.append(Check("g W = 0 within subsets", not fails, "; ".join(fails) or f"{quads} quadruples"))
    return VerificationReport(checks)


# ---------------------------------------------------------------- raw listing repairs


def _span_words(ws: Sequence[int]) -> set[int]:
    s = {0}
    for w in ws:
        s |= {v ^ w for v in s}
    return s


@dataclass(frozen=True)
class Completion:
    m: int
    section: str
    duplicates: tuple[BitVector, ...]
    inferred: tuple[BitVector, ...]


def infer_completions(fx: FixtureSet) -> list[Completion]:
    """For subsets listing an entry twice, the element forced by XOR closure.

    T_m is completed to the span of its listed entries; X_m to the coset of
    that span through its least listed entry. A completion is reported only
    when it restores the expected size exactly.
    """
    out = []
    cell = 1 << (fx.n // 2)
    for s in fx.subsets:
        span = _span_words([t.word for t in s.T])
        for section, listed, closure in (
            ("T", s.T, span),
            ("X", s.X, {min(s.X).word ^ w for w in span} if s.X else set()),
        ):
            dups = tuple(v for v, k in _counts(listed).items() if k > 1)
            if not dups:
                continue
            have = {v.word for v in listed}
            add = closure - have
            if len(closure) == cell and len(have) + len(add) == cell:
                out.append(Completion(s.m, section, dups, tuple(BitVector(fx.n, w) for w in sorted(add))))
    return out


def _counts(vs):
    c: dict = {}
    for v in vs:
        c[v] = c.get(v, 0) + 1
    return c


def same_family(subsets: Sequence[SymmetrySubset], fx: FixtureSet) -> bool:
    """Whether a generated partition lists exactly the fixture's T_m sets."""
    a = {frozenset(s.T) for s in subsets}
    b = {frozenset(s.T) for s in fx.subsets}
    return a == b
