"""
Word Module
Words in the free group on named generators, written as whitespace
separated tokens NAME or NAME^INT, for example "X^-1 Y^2".
"""
import re
from dataclasses import dataclass
from typing import List, Tuple

from utils.errors import WordSyntaxError

TOKEN_PATTERN = re.compile(r'^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$')


@dataclass(frozen=True)
class Word:
    """
    A word as a tuple of (generator name, nonzero exponent) letters.

    Construction does not reduce; call `reduced()` for the free reduction.
    The empty word is the identity.
    """
    letters: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        for name, exponent in self.letters:
            if exponent == 0:
                raise WordSyntaxError(f"Zero exponent on {name}")

    @classmethod
    def parse(cls, text: str) -> 'Word':
        """
        Parse the text grammar.

        Args:
            text: Tokens NAME or NAME^INT, INT nonzero; empty text is the identity

        Returns:
            The unreduced word

        Raises:
            WordSyntaxError: On a malformed token or a zero exponent
        """
        if not isinstance(text, str):
            raise WordSyntaxError(f"Word must be text, got {type(text).__name__}")
        letters = []
        for token in text.split():
            match = TOKEN_PATTERN.match(token)
            if not match:
                raise WordSyntaxError(f"Malformed token '{token}' in '{text}'")
            exponent = int(match.group(2)) if match.group(2) is not None else 1
            if exponent == 0:
                raise WordSyntaxError(f"Zero exponent in token '{token}'")
            letters.append((match.group(1), exponent))
        return cls(tuple(letters))

    @classmethod
    def generator(cls, name: str, exponent: int = 1) -> 'Word':
        return cls(((name, exponent),))

    def reduced(self) -> 'Word':
        """Free reduction: merge equal adjacent names and drop zero exponents."""
        stack: List[Tuple[str, int]] = []
        for name, exponent in self.letters:
            if stack and stack[-1][0] == name:
                merged = stack[-1][1] + exponent
                stack.pop()
                if merged != 0:
                    stack.append((name, merged))
            else:
                stack.append((name, exponent))
        return Word(tuple(stack))

    def inverse(self) -> 'Word':
        return Word(tuple((name, -exponent) for name, exponent in reversed(self.letters)))

    def concat(self, other: 'Word') -> 'Word':
        return Word(self.letters + other.letters)

    def __mul__(self, other: 'Word') -> 'Word':
        return self.concat(other)

    def length(self) -> int:
        """Sum of |exponent| over the letters of the reduced word."""
        return sum(abs(e) for _, e in self.reduced().letters)

    def generator_names(self) -> List[str]:
        return sorted({name for name, _ in self.letters})

    def reversal(self) -> 'Word':
        """The letters in reverse order, exponents kept."""
        return Word(tuple(reversed(self.letters)))

    def cyclic_permutations(self) -> List['Word']:
        """
        Cyclic rotations of the expanded letter sequence (one generator per
        step), reduced. Their traces agree with the trace of the word.
        """
        flat = [(name, 1 if e > 0 else -1) for name, e in self.reduced().letters for _ in range(abs(e))]
        if not flat:
            return [Word()]
        return [Word(tuple(flat[i:] + flat[:i])).reduced() for i in range(len(flat))]

    def is_identity(self) -> bool:
        return not self.reduced().letters

    def __str__(self) -> str:
        return " ".join(name if e == 1 else f"{name}^{e}" for name, e in self.letters)


def commutator(w1: Word, w2: Word) -> Word:
    """[w1, w2] = w1 w2 w1^-1 w2^-1."""
    return w1 * w2 * w1.inverse() * w2.inverse()


def enumerate_reduced_words(names: List[str], max_length: int) -> List[Word]:
    """
    All reduced words of length <= max_length in the letters name^+-1,
    breadth first, starting with the empty word. With n generators there
    are 1 + 2n((2n-1)^L - 1)/(2n-2) of them (1 + 2L when n = 1).
    """
    letters = [(name, s) for name in names for s in (1, -1)]
    frontier: List[Tuple[Tuple[str, int], ...]] = [()]
    words = [Word()]
    for _ in range(max_length):
        next_frontier = []
        for prefix in frontier:
            for letter in letters:
                if prefix and prefix[-1][0] == letter[0] and prefix[-1][1] == -letter[1]:
                    continue
                next_frontier.append(prefix + (letter,))
        words.extend(Word(w) for w in next_frontier)
        frontier = next_frontier
    return words


def conjugate_word(h: Word, w: Word) -> Word:
    """h w h^-1, reduced."""
    return (h * w * h.inverse()).reduced()
