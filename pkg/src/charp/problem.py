"""Line-oriented problem files.

    # comment
    [context]
    prime = 3
    vars = x, y
    param = t                 (optional)

    [connection]
    mode = dr                 (dr | dol | hod | conj)
    rank = 2
    matrix A1 = [[0, x], [0, 0]]
    matrix A2 = [[0, 0], [0, 0]]

    [psi]                     (conj triples: psi matrices over F_p[x][t])
    matrix P1 = [[0, 1], [0, 0]]

    [higgs]                   (Higgs matrices over the twist, variables x', y')
    matrix B1 = [[0, x'], [0, 0]]

    [filtration]              (steps F^1, F^2, ... spanned by constant rows)
    step F1 = [[1, 0]]

    [lift]                    (Frobenius lift x_i -> x_i^p + p h_i)
    h1 = x*y

    [form]                    (a one-form w1 dx1 + w2 dx2)
    w1 = x^2

    [options]
    level = 9
    degree_bound = 4
    exponent = 3

``serialize`` writes the canonical form; parse(serialize(parse(s))) equals
parse(s).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .arith import ModPoly, PolyMatrix, PolyRing
from .connections import DR, ConnectionData
from .errors import CharPError, ParseError

__all__ = ["Problem", "parse_problem", "serialize", "load"]

SECTIONS = ("context", "connection", "psi", "higgs", "filtration", "lift", "form", "options")
MODES = ("dr", "dol", "hod", "conj")
OPTION_KEYS = ("level", "degree_bound", "exponent")


@dataclass(frozen=True)
class Problem:
    ring: PolyRing
    mode: str | None = None
    rank: int | None = None
    matrices: tuple = ()
    psi: tuple | None = None
    higgs: tuple | None = None
    filtration: tuple | None = None
    lifts: tuple | None = None
    form: tuple | None = None
    options: dict = field(default_factory=dict)

    @property
    def p(self):
        return self.ring.p

    def connection(self) -> ConnectionData:
        if self.mode is None:
            raise ParseError("problem has no [connection] section")
        mode = DR if self.mode == "conj" else self.mode
        return ConnectionData(self.ring, self.rank, mode, self.matrices)

    def option(self, key, default=None):
        return self.options.get(key, default)

    def with_options(self, **kw) -> "Problem":
        opts = dict(self.options)
        opts.update({k: v for k, v in kw.items() if v is not None})
        return replace(self, options=opts)


class _Line:
    __slots__ = ("no", "text", "key", "value", "value_col")

    def __init__(self, no, text, key, value, value_col):
        self.no, self.text, self.key, self.value, self.value_col = no, text, key, value, value_col


_SECTION = re.compile(r"\s*\[([A-Za-z_]+)\]\s*$")
_KEYVAL = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*(?:\s+[A-Za-z_][A-Za-z0-9_]*)?)\s*=\s*")


def _split_sections(text: str):
    sections: dict = {}
    current = None
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        m = _SECTION.match(body)
        if m:
            name = m.group(1).lower()
            if name not in SECTIONS:
                raise ParseError(f"unknown section [{name}]", no, body.index("[") + 1)
            if name in sections:
                raise ParseError(f"duplicate section [{name}]", no, body.index("[") + 1)
            sections[name] = []
            current = name
            continue
        if current is None:
            raise ParseError("entry outside of any section", no, 1)
        m = _KEYVAL.match(body)
        if not m:
            raise ParseError("expected 'key = value'", no, len(body) - len(body.lstrip()) + 1)
        key = " ".join(m.group(1).split())
        value = body[m.end():].rstrip()
        if not value:
            raise ParseError(f"missing value for {key!r}", no, m.end() + 1)
        sections[current].append(_Line(no, body, key, value, m.end() + 1))
    return sections


def _poly(ring: PolyRing, text: str, line: int, col: int) -> ModPoly:
    try:
        return ring.parse(text)
    except ParseError as e:
        raise ParseError(str(e).split(": ", 1)[-1], line, col + max(e.column, 1) - 1) from None


def _int(line: _Line, lo=None) -> int:
    try:
        v = int(line.value)
    except ValueError:
        raise ParseError(f"{line.key} must be an integer", line.no, line.value_col) from None
    if lo is not None and v < lo:
        raise ParseError(f"{line.key} must be at least {lo}", line.no, line.value_col)
    return v


def _nested_list(text: str, line: int, col: int):
    """Split '[[a, b], [c, d]]' into rows of (entry text, column) pairs."""
    s = text
    i = 0

    def err(msg, at):
        raise ParseError(msg, line, col + at)

    def skip(j):
        while j < len(s) and s[j] == " ":
            j += 1
        return j

    i = skip(i)
    if i >= len(s) or s[i] != "[":
        err("expected '['", i)
    i += 1
    rows = []
    while True:
        i = skip(i)
        if i < len(s) and s[i] == "]" and not rows:
            i += 1
            break
        if i >= len(s) or s[i] != "[":
            err("expected '[' to open a row", i)
        i += 1
        row = []
        start = i
        depth = 0
        while True:
            if i >= len(s):
                err("unterminated row", i)
            ch = s[i]
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif depth == 0 and ch in ",]":
                entry = s[start:i]
                lead = len(entry) - len(entry.lstrip())
                if not entry.strip():
                    err("empty entry", start)
                row.append((entry.strip(), start + lead))
                i += 1
                if ch == "]":
                    break
                start = i
                continue
            i += 1
        rows.append(row)
        i = skip(i)
        if i < len(s) and s[i] == ",":
            i += 1
            continue
        if i < len(s) and s[i] == "]":
            i += 1
            break
        err("expected ',' or ']'", i)
    i = skip(i)
    if i != len(s):
        err("trailing characters after matrix", i)
    return rows


def _matrix(ring, ln: _Line, square: int | None) -> PolyMatrix:
    rows = _nested_list(ln.value, ln.no, ln.value_col)
    if not rows:
        raise ParseError("empty matrix", ln.no, ln.value_col)
    width = len(rows[0])
    for r in rows:
        if len(r) != width:
            raise ParseError("rows have different lengths", ln.no, ln.value_col)
    if square is not None and (len(rows) != square or width != square):
        raise ParseError(f"expected a {square}x{square} matrix", ln.no, ln.value_col)
    return PolyMatrix(ring, [[_poly(ring, t, ln.no, ln.value_col + c) for t, c in r] for r in rows])


def _indexed(lines, prefix_kind, prefix, count, sec_name, default=None):
    """Collect entries 'prefix_kind prefix<i>' (or bare 'prefix<i>') for i = 1..count."""
    found = {}
    for ln in lines:
        parts = ln.key.split()
        if prefix_kind:
            if len(parts) != 2 or parts[0] != prefix_kind:
                raise ParseError(f"expected '{prefix_kind} {prefix}<i> = ...' in [{sec_name}]", ln.no, 1)
            name = parts[1]
        else:
            if len(parts) != 1:
                raise ParseError(f"expected '{prefix}<i> = ...' in [{sec_name}]", ln.no, 1)
            name = parts[0]
        m = re.fullmatch(re.escape(prefix) + r"([1-9][0-9]*)", name)
        if not m:
            raise ParseError(f"expected a name {prefix}<i>", ln.no, 1)
        idx = int(m.group(1))
        if idx in found:
            raise ParseError(f"duplicate entry {name}", ln.no, 1)
        if count is not None and idx > count:
            raise ParseError(f"index {idx} exceeds {count}", ln.no, 1)
        found[idx] = ln
    if count is None:
        count = max(found, default=0)
    missing = [i for i in range(1, count + 1) if i not in found]
    if missing and default is None:
        raise ParseError(f"[{sec_name}] is missing {prefix}{missing[0]}", 0, 0)
    return [found.get(i) for i in range(1, count + 1)]


def parse_problem(text: str, prime: int | None = None) -> Problem:
    """Parse a problem file; ``prime`` overrides the [context] prime."""
    sections = _split_sections(text)
    if "context" not in sections:
        raise ParseError("missing [context] section", 1, 1)
    ctx = {}
    for ln in sections["context"]:
        if ln.key not in ("prime", "vars", "param"):
            raise ParseError(f"unknown key {ln.key!r} in [context]", ln.no, 1)
        ctx[ln.key] = ln
    if "prime" not in ctx or "vars" not in ctx:
        raise ParseError("[context] needs 'prime' and 'vars'", 1, 1)
    p = prime if prime is not None else _int(ctx["prime"], 2)
    names = [n.strip() for n in ctx["vars"].value.split(",")]
    param = ctx["param"].value.strip() if "param" in ctx else None
    try:
        ring = PolyRing(p, tuple(names), param)
    except CharPError as e:
        ln = ctx["prime"] if "prime" in str(e) or "modulus" in str(e) else ctx["vars"]
        raise ParseError(str(e), ln.no, ln.value_col) from None
    base = ring.without_param()

    mode = rank = None
    matrices = ()
    if "connection" in sections:
        lines = sections["connection"]
        rest = []
        for ln in lines:
            if ln.key == "mode":
                mode = ln.value.strip().lower()
                if mode not in MODES:
                    raise ParseError(f"mode must be one of {', '.join(MODES)}", ln.no, ln.value_col)
            elif ln.key == "rank":
                rank = _int(ln, 1)
            else:
                rest.append(ln)
        if mode is None or rank is None:
            raise ParseError("[connection] needs 'mode' and 'rank'", lines[0].no if lines else 0, 1)
        if mode in ("hod", "conj") and not param:
            raise ParseError(f"mode {mode} needs 'param' in [context]", 1, 1)
        mats = _indexed(rest, "matrix", "A", ring.nvars, "connection")
        matrices = tuple(_matrix(ring, ln, rank) for ln in mats)

    psi = None
    if "psi" in sections:
        if mode != "conj":
            raise ParseError("[psi] requires mode = conj", sections["psi"][0].no if sections["psi"] else 0, 1)
        psi = tuple(_matrix(ring, ln, rank) for ln in _indexed(sections["psi"], "matrix", "P", ring.nvars, "psi"))
    elif mode == "conj":
        raise ParseError("mode conj needs a [psi] section", 0, 0)

    higgs = None
    if "higgs" in sections:
        tw = base.twisted()
        lines = _indexed(sections["higgs"], "matrix", "B", base.nvars, "higgs")
        higgs = tuple(_matrix(tw, ln, None) for ln in lines)
        d = higgs[0].shape[0]
        for ln, h in zip(lines, higgs):
            if h.shape != (d, d):
                raise ParseError("Higgs matrices must be square of equal size", ln.no, ln.value_col)

    filtration = None
    if "filtration" in sections:
        lines = _indexed(sections["filtration"], "step", "F", None, "filtration")
        steps = []
        for ln in lines:
            rows = _nested_list(ln.value, ln.no, ln.value_col)
            vecs = []
            for r in rows:
                vec = []
                for t, c in r:
                    try:
                        vec.append(int(t) % p)
                    except ValueError:
                        raise ParseError("filtration vectors have integer entries", ln.no, ln.value_col + c) from None
                if rank is not None and len(vec) != rank:
                    raise ParseError(f"filtration vector needs {rank} entries", ln.no, ln.value_col)
                vecs.append(tuple(vec))
            steps.append(tuple(vecs))
        filtration = tuple(steps)

    lifts = None
    if "lift" in sections:
        lines = _indexed(sections["lift"], None, "h", base.nvars, "lift")
        lifts = tuple(_poly(base, ln.value, ln.no, ln.value_col) for ln in lines)

    form = None
    if "form" in sections:
        lines = _indexed(sections["form"], None, "w", base.nvars, "form", default=0)
        form = tuple(_poly(base, ln.value, ln.no, ln.value_col) if ln else base.zero() for ln in lines)

    options = {}
    for ln in sections.get("options", []):
        if ln.key not in OPTION_KEYS:
            raise ParseError(f"unknown option {ln.key!r}", ln.no, 1)
        options[ln.key] = _int(ln, 0)

    return Problem(ring, mode, rank, matrices, psi, higgs, filtration, lifts, form, options)


def _mat(m: PolyMatrix) -> str:
    return "[" + ", ".join("[" + ", ".join(str(v) for v in r) + "]" for r in m.rows) + "]"


def serialize(pr: Problem) -> str:
    ring = pr.ring
    out = ["[context]", f"prime = {ring.p}", f"vars = {', '.join(ring.names)}"]
    if ring.param:
        out.append(f"param = {ring.param}")
    if pr.mode is not None:
        out += ["", "[connection]", f"mode = {pr.mode}", f"rank = {pr.rank}"]
        out += [f"matrix A{i + 1} = {_mat(m)}" for i, m in enumerate(pr.matrices)]
    if pr.psi is not None:
        out += ["", "[psi]"] + [f"matrix P{i + 1} = {_mat(m)}" for i, m in enumerate(pr.psi)]
    if pr.higgs is not None:
        out += ["", "[higgs]"] + [f"matrix B{i + 1} = {_mat(m)}" for i, m in enumerate(pr.higgs)]
    if pr.filtration is not None:
        out += ["", "[filtration]"]
        for n, step in enumerate(pr.filtration, start=1):
            out.append(f"step F{n} = [" + ", ".join("[" + ", ".join(map(str, v)) + "]" for v in step) + "]")
    if pr.lifts is not None:
        out += ["", "[lift]"] + [f"h{i + 1} = {h}" for i, h in enumerate(pr.lifts)]
    if pr.form is not None:
        out += ["", "[form]"] + [f"w{i + 1} = {w}" for i, w in enumerate(pr.form)]
    if pr.options:
        out += ["", "[options]"] + [f"{k} = {pr.options[k]}" for k in OPTION_KEYS if k in pr.options]
    return "\n".join(out) + "\n"


def load(path, prime: int | None = None) -> Problem:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read(), prime)
