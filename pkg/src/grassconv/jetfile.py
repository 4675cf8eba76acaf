"""Reader and writer for tabulated graph jets.

Format (UTF-8, whitespace separated)::

    n m count
    x_1 ... x_n                      # one line per sample
    Df[0,0] ... Df[n-1,m-1]          # n*m reals, row-major
    D2f[0,0,0] ... D2f[n-1,n-1,m-1]  # n*n*m reals, index order (i, j, a)

The x values must sit on one line; the derivative blocks may wrap across
lines. Blank lines and ``#`` comments are ignored.
"""
import numpy as np

from .graphs import GraphJet
from .numerics import DomainError


class JetFileError(DomainError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield no, body.split()


def _floats(tokens, line):
    try:
        vals = [float(t) for t in tokens]
    except ValueError as exc:
        raise JetFileError(line, f"not a number ({exc})") from None
    if not all(np.isfinite(vals)):
        raise JetFileError(line, "non-finite value")
    return vals


def parse_jets(text):
    lines = list(_lines(text))
    if not lines:
        raise JetFileError(1, "empty jet file")
    no, head = lines[0]
    if len(head) != 3:
        raise JetFileError(no, "header must be 'n m count'")
    try:
        n, m, count = (int(t) for t in head)
    except ValueError:
        raise JetFileError(no, "header must hold three integers") from None
    if n < 1 or m < 1 or count < 1:
        raise JetFileError(no, "n, m and count must be positive")

    jets = []
    k = 1
    for s in range(count):
        if k >= len(lines):
            raise JetFileError(lines[-1][0], f"file ends before sample {s + 1} of {count}")
        start, xt = lines[k]
        if len(xt) != n:
            raise JetFileError(start, f"expected {n} coordinates for x, got {len(xt)}")
        x = _floats(xt, start)
        k += 1
        need = n * m + n * n * m
        vals = []
        while len(vals) < need:
            if k >= len(lines):
                raise JetFileError(lines[-1][0], f"sample {s + 1}: derivative block truncated")
            no, toks = lines[k]
            vals.extend(_floats(toks, no))
            k += 1
        if len(vals) != need:
            raise JetFileError(no, f"sample {s + 1}: {len(vals) - need} extra values")
        Df = np.array(vals[: n * m]).reshape(n, m)
        D2f = np.array(vals[n * m:]).reshape(n, n, m)
        try:
            jets.append(GraphJet(np.array(x), Df, D2f))
        except DomainError as exc:
            raise JetFileError(start, f"sample {s + 1}: {exc}") from None
    if k < len(lines):
        raise JetFileError(lines[k][0], "trailing data after the last sample")
    return jets


def read_jets(path):
    with open(path, encoding="utf-8") as fh:
        return parse_jets(fh.read())


def format_jets(jets):
    jets = list(jets)
    n, m = jets[0].n, jets[0].m
    out = [f"{n} {m} {len(jets)}"]
    for j in jets:
        out.append(" ".join(repr(float(v)) for v in j.x))
        out.append(" ".join(repr(float(v)) for v in j.Df.ravel()))
        out.append(" ".join(repr(float(v)) for v in j.D2f.ravel()))
    return "\n".join(out) + "\n"
