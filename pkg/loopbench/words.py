"""Words over a finite alphabet and the two periodicity facts the construction relies on."""

from dataclasses import dataclass
from itertools import product
from math import gcd
from typing import Iterator, List, Sequence, Tuple

from loopbench.errors import InvalidInput


@dataclass(frozen=True)
class Word:
    """Immutable word over the alphabet [0, n).

    Slicing returns a new Word; concatenation with ``+`` accepts another Word
    or any sequence of letters.
    """

    letters: Tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(a) for a in self.letters))
        if self.n < 1:
            raise InvalidInput(f"alphabet size must be positive, got {self.n}")
        for i, a in enumerate(self.letters):
            if not 0 <= a < self.n:
                raise InvalidInput(f"letter {a} at index {i} outside [0, {self.n})")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, key):
        if isinstance(key, slice):
            return Word(self.letters[key], self.n)
        return self.letters[key]

    def __add__(self, other) -> "Word":
        tail = other.letters if isinstance(other, Word) else tuple(other)
        return Word(self.letters + tail, self.n)

    def to_json(self) -> List[int]:
        return list(self.letters)

    @classmethod
    def from_json(cls, data: Sequence[int], n: int) -> "Word":
        return cls(tuple(data), n)


def _letters(x) -> Tuple[int, ...]:
    return x.letters if isinstance(x, Word) else tuple(x)


def is_periodic(x, k: int) -> bool:
    """True iff x[i] == x[i + k] wherever both indices are valid."""
    if k < 1:
        raise InvalidInput(f"period must be at least 1, got {k}")
    xs = _letters(x)
    if k >= len(xs):
        return True
    return xs[: len(xs) - k] == xs[k:]


def shortest_period(x) -> int:
    xs = _letters(x)
    if not xs:
        raise InvalidInput("shortest period of the empty word is undefined")
    for k in range(1, len(xs) + 1):
        if xs[: len(xs) - k] == xs[k:]:
            return k
    return len(xs)


def periodicity_lemma_check(x, a: int, b: int) -> bool:
    """Instance of Fine and Wilf: long a- and b-periodic words are gcd(a, b)-periodic.

    Returns the truth value of the implication, so it is always True for a
    correct periodicity test.
    """
    xs = _letters(x)
    d = gcd(a, b)
    if len(xs) < a + b - d:
        return True
    if not (is_periodic(xs, a) and is_periodic(xs, b)):
        return True
    return is_periodic(xs, d)


def is_constant(x) -> bool:
    xs = _letters(x)
    return all(c == xs[0] for c in xs)


def all_words(n: int, length: int) -> Iterator[Tuple[int, ...]]:
    """All words of the given length in lexicographic order."""
    return product(range(n), repeat=length)


def periodic_extension(x, k: int, length: int) -> Tuple[int, ...]:
    """Extend the first k letters of x periodically to the given length."""
    xs = _letters(x)
    if k < 1 or k > len(xs):
        raise InvalidInput(f"cannot extend with period {k} from a word of length {len(xs)}")
    return tuple(xs[i % k] for i in range(length))
