"""Free-group words, finite presentations and Fox free-differential calculus.

Words are stored freely reduced as tuples of ``(generator_index, exponent)``
with exponent +1 or -1.  Group-ring elements keep exact integer coefficients,
so the Fox calculus in this module is exact; all floating point enters later,
when a representation is applied.

The text format used by the CLI is one ``gens:`` line followed by ``rel:``
lines, where a word is a string of single letters and an uppercase letter
denotes the inverse of the lowercase generator (``abAB`` = a b a^-1 b^-1).
"""

from __future__ import annotations

from dataclasses import dataclass, field


class PresentationError(ValueError):
    """Raised for malformed words, relators or presentations."""


def _reduce(letters):
    out = []
    for g, e in letters:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


class Word:
    """A freely reduced word in a free group.

    Construction accepts any iterable of ``(generator_index, exponent)`` pairs;
    exponents may be arbitrary integers and are expanded into +-1 letters
    before free reduction.
    """

    __slots__ = ("letters",)

    def __init__(self, letters=()):
        expanded = []
        for g, e in letters:
            g = int(g)
            e = int(e)
            if g < 0:
                raise PresentationError("negative generator index %d" % g)
            if e == 0:
                continue
            step = 1 if e > 0 else -1
            expanded.extend([(g, step)] * abs(e))
        self.letters = _reduce(expanded)

    @classmethod
    def from_string(cls, text, names):
        """Parse a word string over single-letter generator names."""
        index = {name: i for i, name in enumerate(names)}
        letters = []
        for ch in text.strip():
            low = ch.lower()
            if low not in index:
                raise PresentationError("unknown generator letter %r" % ch)
            letters.append((index[low], 1 if ch.islower() else -1))
        return cls(letters)

    def to_string(self, names):
        return "".join(
            names[g] if e == 1 else names[g].upper() for g, e in self.letters
        )

    def __mul__(self, other):
        return Word(self.letters + other.letters)

    def inverse(self):
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def max_generator(self):
        return max((g for g, _ in self.letters), default=-1)

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __repr__(self):
        return "Word(%r)" % (self.letters,)


IDENTITY = Word()


class GroupRingElement:
    """Exact element of the integral group ring ZZ[F]."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        # terms: mapping Word -> int, zero coefficients pruned
        data = {}
        if terms:
            for w, c in dict(terms).items():
                if c:
                    data[w] = data.get(w, 0) + c
        self.terms = {w: c for w, c in data.items() if c}

    def __add__(self, other):
        data = dict(self.terms)
        for w, c in other.terms.items():
            data[w] = data.get(w, 0) + c
        return GroupRingElement(data)

    def __neg__(self):
        return GroupRingElement({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def left_mul(self, word):
        """Multiply on the left by a group element."""
        data = {}
        for w, c in self.terms.items():
            ww = word * w
            data[ww] = data.get(ww, 0) + c
        return GroupRingElement(data)

    def sorted_terms(self):
        """Deterministic (coefficient, word) list, sorted by word letters."""
        return sorted(self.terms.items(), key=lambda item: item[0].letters)

    def __eq__(self, other):
        return isinstance(other, GroupRingElement) and self.terms == other.terms

    def __repr__(self):
        return "GroupRingElement(%r)" % (self.terms,)

    @classmethod
    def one(cls):
        return cls({IDENTITY: 1})

    @classmethod
    def of_word(cls, word, coeff=1):
        return cls({word: coeff})


@dataclass(frozen=True)
class GroupPresentation:
    """A finite presentation <x_1,...,x_g | r_1,...,r_k>."""

    generator_names: tuple
    relators: tuple

    def __post_init__(self):
        names = tuple(self.generator_names)
        if not names:
            raise PresentationError("presentation needs at least one generator")
        if len(set(n.lower() for n in names)) != len(names):
            raise PresentationError("generator names must be distinct")
        rels = tuple(
            r if isinstance(r, Word) else Word.from_string(r, names)
            for r in self.relators
        )
        for r in rels:
            if len(r) == 0:
                raise PresentationError("relators must be nonempty after reduction")
            if r.max_generator() >= len(names):
                raise PresentationError("relator uses generator outside presentation")
        object.__setattr__(self, "generator_names", names)
        object.__setattr__(self, "relators", rels)

    @property
    def generator_count(self):
        return len(self.generator_names)

    @property
    def deficiency(self):
        return self.generator_count - len(self.relators)

    def word(self, text):
        return Word.from_string(text, self.generator_names)


def fox_derivative(relator: Word, generator: int, generator_count=None) -> GroupRingElement:
    """Fox free derivative d(relator)/d(x_generator) in ZZ[F].

    Satisfies dx_i/dx_j = delta_ij, d(x^-1)/dx = -x^-1 and the product rule
    d(uv)/dx = du/dx + u dv/dx, all with exact integer arithmetic.
    """
    if generator < 0 or (generator_count is not None and generator >= generator_count):
        raise PresentationError("generator index %d out of range" % generator)
    if generator_count is None and generator > max(relator.max_generator(), 0):
        # still legal (derivative is zero) unless caller declared a count
        pass
    terms = {}
    prefix = ()
    for g, e in relator.letters:
        if g == generator:
            if e == 1:
                key = Word(prefix)
                terms[key] = terms.get(key, 0) + 1
            else:
                key = Word(prefix + ((g, -1),))
                terms[key] = terms.get(key, 0) - 1
        prefix = _reduce(prefix + ((g, e),))
    return GroupRingElement(terms)


@dataclass
class ValidationReport:
    ok: bool
    deficiency: int
    messages: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def __str__(self):
        head = "ok" if self.ok else "FAILED"
        lines = ["validation: %s (deficiency %d)" % (head, self.deficiency)]
        lines += ["  - " + m for m in self.messages]
        return "\n".join(lines)


def validate_presentation(p: GroupPresentation) -> ValidationReport:
    """Check deficiency and reduction status; flag non-Wada presentations."""
    messages = []
    ok = True
    for i, r in enumerate(p.relators):
        if r.max_generator() >= p.generator_count:
            ok = False
            messages.append("relator %d uses out-of-range generator" % i)
    if p.deficiency != 1:
        messages.append(
            "deficiency %d != 1: Wada pipeline unavailable" % p.deficiency
        )
    return ValidationReport(ok=ok, deficiency=p.deficiency, messages=messages)


def parse_presentation(text: str) -> GroupPresentation:
    """Parse the CLI presentation format (gens:/rel: lines, # comments)."""
    names = None
    relators = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("gens:"):
            names = tuple(line[len("gens:"):].split())
            for n in names:
                if len(n) != 1 or not n.isalpha() or not n.islower():
                    raise PresentationError(
                        "line %d: generator names must be single lowercase letters" % lineno
                    )
        elif line.startswith("rel:"):
            if names is None:
                raise PresentationError("line %d: rel: before gens:" % lineno)
            relators.append(line[len("rel:"):].strip())
        else:
            raise PresentationError("line %d: unrecognized line %r" % (lineno, raw))
    if names is None:
        raise PresentationError("missing gens: line")
    return GroupPresentation(generator_names=names, relators=tuple(relators))
