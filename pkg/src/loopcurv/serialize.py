"""JSON transport for algebras, fields and symbols.

Numbers travel as strings: ``"p/q"`` for rationals and the exact surd syntax
(``"1/2*2^(1/2)"``) where a Laplacian power produced an irrational radical.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .algebra import LieAlgebraSpec, builtin
from .errors import InputError, InvalidAlgebra
from .fields import LoopField
from .surd import Surd, format_surd
from .symbols import Symbol
from .trig import ExpPoly, TrigPoly

_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")
FIELD_KEYS = {"freq", "kind", "coeff"}
KINDS = ("sin", "cos", "const")


def parse_rational(text, position: str | None = None) -> Fraction:
    """Strict ``"p/q"`` (or integer) parser; floats and exponents are rejected."""
    if isinstance(text, bool):
        raise InputError(f"expected a rational string, got {text!r}", position)
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL.match(text):
        raise InputError(f"expected a rational 'p/q', got {text!r}", position)
    try:
        return Fraction(text.replace(" ", ""))
    except ZeroDivisionError:
        raise InputError(f"zero denominator in {text!r}", position) from None


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed {what} JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from None


def parse_field_spec(text, algebra: LieAlgebraSpec | None = None) -> LoopField:
    """Parse ``{"components": [[{"freq", "kind", "coeff"}, ...], ...]}``.

    ``text`` may be a JSON string or an already decoded dict.  Without an
    algebra the field is built over the abelian algebra of matching dimension
    (callers normally pass one).
    """
    data = _load_json(text, "field") if isinstance(text, str) else text
    if not isinstance(data, dict):
        raise InputError("field spec must be a JSON object", "$")
    extra = set(data) - {"components"}
    if extra:
        raise InputError(f"unknown keys {sorted(extra)}", "$")
    comps = data.get("components")
    if not isinstance(comps, list):
        raise InputError("'components' must be a list", "$.components")
    if algebra is None:
        algebra = builtin(f"abelian{max(len(comps), 1)}")
    if len(comps) != algebra.dim:
        raise InputError(
            f"{len(comps)} component lists for an algebra of dimension {algebra.dim}", "$.components"
        )
    polys = []
    for a, entries in enumerate(comps):
        where = f"$.components[{a}]"
        if not isinstance(entries, list):
            raise InputError("each component must be a list of terms", where)
        const = Fraction(0)
        cos: dict[int, Fraction] = {}
        sin: dict[int, Fraction] = {}
        for b, term in enumerate(entries):
            pos = f"{where}[{b}]"
            if not isinstance(term, dict):
                raise InputError("term must be an object", pos)
            unknown = set(term) - FIELD_KEYS
            if unknown:
                raise InputError(f"unknown keys {sorted(unknown)}", pos)
            missing = {"kind", "coeff"} - set(term)
            if missing:
                raise InputError(f"missing keys {sorted(missing)}", pos)
            kind = term["kind"]
            if kind not in KINDS:
                raise InputError(f"kind must be one of {KINDS}, got {kind!r}", f"{pos}.kind")
            freq = term.get("freq", 0)
            if isinstance(freq, bool) or not isinstance(freq, int):
                raise InputError(f"freq must be an integer, got {freq!r}", f"{pos}.freq")
            if freq < 0:
                raise InputError(f"freq must be non-negative, got {freq}", f"{pos}.freq")
            coeff = parse_rational(term["coeff"], f"{pos}.coeff")
            if kind == "const" or freq == 0:
                if kind == "sin":
                    continue  # sin(0) = 0
                const += coeff
            elif kind == "cos":
                cos[freq] = cos.get(freq, Fraction(0)) + coeff
            else:
                sin[freq] = sin.get(freq, Fraction(0)) + coeff
        polys.append(TrigPoly(const, cos, sin))
    return LoopField(algebra, tuple(polys))


def _number(x: Surd) -> str:
    return str(x.to_fraction()) if x.is_rational() else format_surd(x)


def field_to_json(X: LoopField) -> dict:
    comps = []
    for p in X.components:
        terms = []
        if p.constant:
            terms.append({"freq": 0, "kind": "const", "coeff": _number(p.constant)})
        for n, (a, b) in sorted(p.harmonics().items()):
            if a:
                terms.append({"freq": n, "kind": "cos", "coeff": _number(a)})
            if b:
                terms.append({"freq": n, "kind": "sin", "coeff": _number(b)})
        comps.append(terms)
    return {"components": comps}


def parse_algebra(text: str) -> LieAlgebraSpec:
    """A builtin name (``su2``, ``so3``, ``abelianN``) or inline JSON
    ``{"dim": d, "structure": C[k][i][j] as "p/q" strings, "labels": [...]}``."""
    stripped = text.strip()
    if not stripped.startswith("{"):
        try:
            return builtin(stripped)
        except InvalidAlgebra as exc:
            raise InputError(str(exc), "--algebra") from None
    data = _load_json(stripped, "algebra")
    extra = set(data) - {"dim", "structure", "labels", "name"}
    if extra:
        raise InputError(f"unknown keys {sorted(extra)}", "$")
    dim = data.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise InputError("'dim' must be a positive integer", "$.dim")
    C = data.get("structure")
    if not isinstance(C, list) or len(C) != dim:
        raise InputError(f"'structure' must be a {dim}x{dim}x{dim} array", "$.structure")
    parsed = []
    for k, row in enumerate(C):
        if not isinstance(row, list) or len(row) != dim:
            raise InputError(f"row must have {dim} entries", f"$.structure[{k}]")
        prow = []
        for i, col in enumerate(row):
            if not isinstance(col, list) or len(col) != dim:
                raise InputError(f"row must have {dim} entries", f"$.structure[{k}][{i}]")
            prow.append([parse_rational(v, f"$.structure[{k}][{i}][{j}]") for j, v in enumerate(col)])
        parsed.append(prow)
    try:
        return LieAlgebraSpec(dim, parsed, tuple(data.get("labels") or ()), data.get("name", "custom"))
    except InvalidAlgebra as exc:
        raise InputError(str(exc), "$") from None


def trig_to_json(p: TrigPoly) -> dict:
    out: dict = {}
    if p.constant:
        out["const"] = _number(p.constant)
    cos = {str(n): _number(a) for n, (a, _) in sorted(p.harmonics().items()) if a}
    sin = {str(n): _number(b) for n, (_, b) in sorted(p.harmonics().items()) if b}
    if cos:
        out["cos"] = cos
    if sin:
        out["sin"] = sin
    return out


def entry_to_json(e: ExpPoly | None) -> dict:
    if e is None or e.is_zero():
        return {"re": {}, "im": {}}
    return {"re": trig_to_json(e.real_part()), "im": trig_to_json(e.imag_part())}


def symbol_to_json(sym: Symbol, provenance: dict | None = None, audit: dict | None = None) -> dict:
    terms = []
    for t in sym.terms:
        terms.append(
            {
                "grade": {"a": str(t.grade.a), "b": t.grade.b, "value": str(t.grade.value)},
                "label": t.grade.label(),
                "parity": t.parity,
                "matrix": [[entry_to_json(e) for e in row] for row in t.coeff],
            }
        )
    out = {
        "provenance": dict(provenance or {}),
        "cutoff": None if sym.cutoff == float("-inf") else str(sym.cutoff),
        "terms": terms,
    }
    if audit is not None:
        out["audit"] = {k: symbol_to_json(v)["terms"] for k, v in audit.items() if not v.is_empty()}
    return out
