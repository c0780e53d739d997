"""SL2(C) lifts, symmetric powers, exponent maps and unitary twists.

The composed coefficient system feeding the twisted Alexander pipeline is
``abar (x) rho_n``: a word w is sent to the scalar ``t^alpha(w)`` (or its
unit-circle evaluation) times the n-dimensional symmetric-power image of the
2x2 holonomy matrix of w.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from mpmath import mp, mpf, mpc, workprec, binomial

from .fpgroup import GroupPresentation, GroupRingElement, Word, ValidationReport
from .numerics import ComplexMatrix, DEFAULT_PRECISION, NumericsError, zero_threshold


class RepresentationError(ValueError):
    pass


def sym_power(m: ComplexMatrix, n: int) -> ComplexMatrix:
    """(n-1)-th symmetric power of a 2x2 matrix, acting on binary forms.

    Basis is the monomials x^{n-1-k} y^k with k ascending, so
    diag(l, 1/l) maps to diag(l^{n-1}, l^{n-3}, ..., l^{-(n-1)}) and the map
    is a homomorphism with determinant 1 on SL2.
    """
    if n < 1:
        raise RepresentationError("symmetric power needs n >= 1")
    if (m.rows, m.cols) != (2, 2):
        raise NumericsError("sym_power needs a 2x2 matrix")
    if n == 1:
        return ComplexMatrix(1, 1, [mpc(1)], m.precision_bits)
    if n == 2:
        return ComplexMatrix(2, 2, list(m.entries), m.precision_bits)
    a, b, c, d = m.entries
    with workprec(m.precision_bits):
        cols = []
        for k in range(n):
            # (a x + c y)^{n-1-k} (b x + d y)^k, collected by y-degree
            p1 = [binomial(n - 1 - k, i) * a ** (n - 1 - k - i) * c ** i
                  for i in range(n - k)]
            p2 = [binomial(k, i) * b ** (k - i) * d ** i for i in range(k + 1)]
            col = [mpc(0)] * n
            for i1, c1 in enumerate(p1):
                for i2, c2 in enumerate(p2):
                    col[i1 + i2] += c1 * c2
            cols.append(col)
        entries = [cols[k][j] for j in range(n) for k in range(n)]
    return ComplexMatrix(n, n, entries, m.precision_bits)


class HolonomyLift:
    """Per-generator SL2(C) matrices over a presentation.

    The relator residual (max over relators of the sup-norm distance of the
    evaluated relator from the identity) is computed on construction and
    kept as a certificate.
    """

    def __init__(self, presentation: GroupPresentation, matrices,
                 precision_bits=DEFAULT_PRECISION):
        if len(matrices) != presentation.generator_count:
            raise RepresentationError("one 2x2 matrix per generator required")
        for g in matrices:
            if (g.rows, g.cols) != (2, 2):
                raise RepresentationError("holonomy matrices must be 2x2")
        self.presentation = presentation
        self.precision_bits = precision_bits
        self.generators = [
            ComplexMatrix(2, 2, g.entries, precision_bits) for g in matrices
        ]
        self._inverses = [g.inverse2() for g in self.generators]
        self._sym_cache = {}
        self._lock = threading.Lock()
        self.relator_residual = self._relator_residual()

    def _relator_residual(self):
        with workprec(self.precision_bits):
            worst = mpf(0)
            for r in self.presentation.relators:
                m = self.evaluate_word(r, 2)
                ident = ComplexMatrix.identity(2, self.precision_bits)
                dev = max(abs(x - y) for x, y in zip(m.entries, ident.entries))
                worst = max(worst, dev)
            return worst

    def determinant_residuals(self):
        with workprec(self.precision_bits):
            out = []
            for g in self.generators:
                a, b, c, d = g.entries
                out.append(abs(a * d - b * c - 1))
            return out

    def sym_generator(self, index: int, n: int, inverse=False) -> ComplexMatrix:
        key = (index, n, inverse)
        with self._lock:
            hit = self._sym_cache.get(key)
        if hit is not None:
            return hit
        base = self._inverses[index] if inverse else self.generators[index]
        result = sym_power(base, n)
        with self._lock:
            self._sym_cache.setdefault(key, result)
        return result

    def evaluate_word(self, word: Word, n: int) -> ComplexMatrix:
        out = ComplexMatrix.identity(n, self.precision_bits)
        for g, e in word.letters:
            out = out * self.sym_generator(g, n, inverse=(e == -1))
        return out


class AlphaMap:
    """Epimorphism onto Z^r given by per-generator integer exponent vectors."""

    def __init__(self, presentation: GroupPresentation, exponents):
        exps = [tuple(int(x) for x in row) for row in exponents]
        if len(exps) != presentation.generator_count:
            raise RepresentationError("one exponent vector per generator required")
        ranks = {len(row) for row in exps}
        if len(ranks) != 1:
            raise RepresentationError("exponent vectors must share one rank")
        self.rank = ranks.pop()
        if self.rank < 1:
            raise RepresentationError("rank must be positive")
        self.presentation = presentation
        self.exponents = exps
        for i, rel in enumerate(presentation.relators):
            if any(v != 0 for v in self.of_word(rel)):
                raise RepresentationError(
                    "relator %d does not map to zero under alpha" % i
                )
        if not self._is_surjective():
            raise RepresentationError("alpha is not surjective onto Z^r")

    def of_word(self, word: Word):
        acc = [0] * self.rank
        for g, e in word.letters:
            row = self.exponents[g]
            for j in range(self.rank):
                acc[j] += e * row[j]
        return tuple(acc)

    def scalar_of_word(self, word: Word) -> int:
        """Total exponent for rank 1 (the knot-like case)."""
        if self.rank != 1:
            raise RepresentationError("scalar exponent needs rank 1")
        return self.of_word(word)[0]

    def _is_surjective(self):
        # Smith-form style elimination over Z on the r x g exponent matrix:
        # surjective onto Z^r iff all r elementary divisors are 1.
        rows = [list(col) for col in zip(*self.exponents)]  # r x g
        r = len(rows)
        g = len(rows[0]) if rows else 0
        i = j = 0
        divisors = []
        while i < r and j < g:
            piv = None
            best = None
            for ii in range(i, r):
                for jj in range(j, g):
                    v = abs(rows[ii][jj])
                    if v and (best is None or v < best):
                        best, piv = v, (ii, jj)
            if piv is None:
                break
            pi, pj = piv
            rows[i], rows[pi] = rows[pi], rows[i]
            for row in rows:
                row[j], row[pj] = row[pj], row[j]
            changed = True
            while changed:
                changed = False
                for ii in range(i + 1, r):
                    q = rows[ii][j] // rows[i][j]
                    if q:
                        for jj in range(j, g):
                            rows[ii][jj] -= q * rows[i][jj]
                    if rows[ii][j]:
                        rows[i], rows[ii] = rows[ii], rows[i]
                        changed = True
                for jj in range(j + 1, g):
                    q = rows[i][jj] // rows[i][j]
                    if q:
                        for ii in range(i, r):
                            rows[ii][jj] -= q * rows[ii][j]
                    if rows[i][jj]:
                        for ii in range(i, r):
                            rows[ii][j] += rows[ii][jj]
                        changed = True
            divisors.append(abs(rows[i][j]))
            i += 1
            j += 1
        return len(divisors) == r and all(d == 1 for d in divisors)


class TwistPoint:
    """A unit-modulus evaluation point zeta in (S^1)^r."""

    def __init__(self, values, precision_bits=DEFAULT_PRECISION):
        self.precision_bits = precision_bits
        with workprec(precision_bits):
            self.values = tuple(mpc(v) for v in values)
            tol = mpf(2) ** (-(precision_bits // 2))
            for v in self.values:
                if abs(abs(v) - 1) > tol:
                    raise RepresentationError(
                        "twist coordinates must have modulus 1 (got |%s|)" % mp.nstr(abs(v), 8)
                    )

    @property
    def rank(self):
        return len(self.values)

    def character(self, alpha_value):
        """zeta^v for an integer vector v (the unitary twist chi)."""
        if len(alpha_value) != self.rank:
            raise RepresentationError("rank mismatch between alpha and zeta")
        with workprec(self.precision_bits):
            out = mpc(1)
            for z, e in zip(self.values, alpha_value):
                if e:
                    out *= z ** e
            return out


@dataclass
class PeripheralData:
    """Per-cusp (meridian word, alpha-longitude word) pairs."""

    cusps: list

    def validate(self, alpha: AlphaMap):
        for i, (m, l) in enumerate(self.cusps):
            if any(v != 0 for v in alpha.of_word(l)):
                raise RepresentationError(
                    "cusp %d: longitude does not lie in ker(alpha)" % i
                )
            if all(v == 0 for v in alpha.of_word(m)):
                raise RepresentationError("cusp %d: alpha(meridian) = 0" % i)

    def meridian_exponents(self, alpha: AlphaMap):
        return [alpha.of_word(m) for m, _ in self.cusps]


def validate_representation(rho: HolonomyLift, tol, peripheral: PeripheralData = None) -> ValidationReport:
    """Report relator/determinant residuals and peripheral traces.

    With peripheral data, flags longitude traces away from -2 and meridian
    traces away from +-2 beyond ``tol``.
    """
    messages = []
    data = {}
    ok = True
    with workprec(rho.precision_bits):
        tol = mpf(tol)
        data["relator_residual"] = rho.relator_residual
        if rho.relator_residual > tol:
            ok = False
            messages.append(
                "relator residual %s exceeds tolerance" % mp.nstr(rho.relator_residual, 6)
            )
        dets = rho.determinant_residuals()
        data["determinant_residuals"] = dets
        for i, d in enumerate(dets):
            if d > tol:
                ok = False
                messages.append(
                    "generator %d determinant residual %s" % (i, mp.nstr(d, 6))
                )
        if peripheral is not None:
            traces = []
            for i, (m, l) in enumerate(peripheral.cusps):
                trl = rho.evaluate_word(l, 2).trace()
                trm = rho.evaluate_word(m, 2).trace()
                traces.append((trm, trl))
                if abs(trl + 2) > tol:
                    ok = False
                    messages.append(
                        "cusp %d: tr(longitude) = %s deviates from -2" % (i, mp.nstr(trl, 8))
                    )
                if min(abs(trm - 2), abs(trm + 2)) > tol:
                    ok = False
                    messages.append(
                        "cusp %d: tr(meridian) = %s deviates from +-2" % (i, mp.nstr(trm, 8))
                    )
            data["peripheral_traces"] = traces
    return ValidationReport(ok=ok, deficiency=rho.presentation.deficiency,
                            messages=messages, data=data)


def clebsch_gordan_residual(m: ComplexMatrix, n: int):
    """Deviation of tr Ad(Sym^{n-1} m) from the symmetric-power trace sum.

    Ad is conjugation on trace-zero n x n matrices, so its trace equals
    ``tr(g) tr(g^{-1}) - 1`` for ``g = Sym^{n-1}(m)``; the comparison value is
    ``sum_{k=1}^{n-1} tr Sym^{2k}(m)``.
    """
    if n < 2:
        raise RepresentationError("residual defined for n >= 2")
    with workprec(m.precision_bits):
        g = sym_power(m, n)
        a, b, c, d = m.entries
        det = a * d - b * c
        ginv = sym_power(ComplexMatrix(2, 2, [d / det, -b / det, -c / det, a / det],
                                       m.precision_bits), n)
        lhs = g.trace() * ginv.trace() - 1
        rhs = mpc(0)
        for k in range(1, n):
            rhs += sym_power(m, 2 * k + 1).trace()
        return abs(lhs - rhs)


def evaluate_group_ring(element: GroupRingElement, rho: HolonomyLift, n: int,
                        alpha: AlphaMap, at) -> ComplexMatrix:
    """Evaluate Sum coeff * zeta^alpha(w) * rho_n(w) over the element's terms.

    ``at`` is a :class:`TwistPoint` (any rank) or a single complex node for
    the rank-1 symbolic-determinant pipeline.
    """
    if rho.presentation is not alpha.presentation and \
            rho.presentation.generator_names != alpha.presentation.generator_names:
        raise RepresentationError("rho and alpha must live over one presentation")
    if isinstance(at, TwistPoint):
        def character(w):
            return at.character(alpha.of_word(w))
    else:
        if alpha.rank != 1:
            raise RepresentationError("scalar node evaluation needs rank 1")
        node = mpc(at)

        def character(w):
            return node ** alpha.scalar_of_word(w)

    bits = rho.precision_bits
    with workprec(bits):
        acc = [mpc(0)] * (n * n)
        for w, coeff in element.sorted_terms():
            scalar = coeff * character(w)
            mat = rho.evaluate_word(w, n)
            for i, v in enumerate(mat.entries):
                if v:
                    acc[i] += scalar * v
    return ComplexMatrix(n, n, acc, bits)


# -- fixture file formats ----------------------------------------------------

def parse_complex_token(token: str) -> mpc:
    """Parse ``re``, ``rei``/``imi`` or ``re+imi`` decimal strings."""
    s = token.strip().replace(" ", "")
    if not s:
        raise RepresentationError("empty complex token")
    if s.endswith("i"):
        body = s[:-1]
        # split at the last +/- that is not an exponent sign
        for pos in range(len(body) - 1, 0, -1):
            ch = body[pos]
            if ch in "+-" and body[pos - 1] not in "eE":
                re_part, im_part = body[:pos], body[pos:]
                break
        else:
            re_part, im_part = "0", body
        if im_part in ("+", "-"):
            im_part += "1"
        return mpc(mpf(re_part), mpf(im_part))
    return mpc(mpf(s), 0)


def format_complex(value, digits=40):
    re_s = mp.nstr(value.real, digits, strip_zeros=False)
    im_s = mp.nstr(value.imag, digits, strip_zeros=False)
    sign = "+" if not im_s.startswith("-") else ""
    return "%s%s%si" % (re_s, sign, im_s)


def parse_representation_file(text: str, presentation: GroupPresentation,
                              precision_bits=DEFAULT_PRECISION) -> HolonomyLift:
    """Representation file: optional ``digits:`` header, then per generator a
    line ``<name>: <m00> <m01> <m10> <m11>`` of complex decimal strings."""
    entries = {}
    source_digits = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("digits:"):
            source_digits = int(line[len("digits:"):])
            continue
        if ":" not in line:
            raise RepresentationError("line %d: expected '<gen>: entries'" % lineno)
        name, rest = line.split(":", 1)
        toks = rest.split()
        if len(toks) != 4:
            raise RepresentationError("line %d: need four matrix entries" % lineno)
        with workprec(max(precision_bits, 4 * (source_digits or 0))):
            vals = [parse_complex_token(t) for t in toks]
        entries[name.strip()] = vals
    mats = []
    for name in presentation.generator_names:
        if name not in entries:
            raise RepresentationError("no matrix for generator %r" % name)
        mats.append(ComplexMatrix(2, 2, entries[name], precision_bits))
    return HolonomyLift(presentation, mats, precision_bits)


def parse_alpha_file(text: str, presentation: GroupPresentation) -> AlphaMap:
    """Alpha file: per generator a line ``<name>: k_1 ... k_r``."""
    rows = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise RepresentationError("line %d: expected '<gen>: integers'" % lineno)
        name, rest = line.split(":", 1)
        rows[name.strip()] = tuple(int(t) for t in rest.split())
    exps = []
    for name in presentation.generator_names:
        if name not in rows:
            raise RepresentationError("no exponent vector for generator %r" % name)
        exps.append(rows[name])
    return AlphaMap(presentation, exps)


def parse_peripheral_file(text: str, presentation: GroupPresentation) -> PeripheralData:
    """Peripheral file: per cusp a line ``cusp: <meridian> <longitude>``."""
    cusps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not line.startswith("cusp:"):
            raise RepresentationError("line %d: expected 'cusp: m l'" % lineno)
        toks = line[len("cusp:"):].split()
        if len(toks) != 2:
            raise RepresentationError("line %d: need meridian and longitude" % lineno)
        cusps.append((presentation.word(toks[0]), presentation.word(toks[1])))
    if not cusps:
        raise RepresentationError("peripheral file lists no cusps")
    return PeripheralData(cusps=cusps)
