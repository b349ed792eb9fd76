import pytest

from utils.errors import WordSyntaxError
from utils.words import Word, commutator, conjugate_word, enumerate_reduced_words


def test_parse_and_print():
    w = Word.parse("X^-1 Y^2")
    assert w.letters == (("X", -1), ("Y", 2))
    assert str(w) == "X^-1 Y^2"
    assert Word.parse("") == Word()
    assert Word.parse("  a_1^3   b ").letters == (("a_1", 3), ("b", 1))


@pytest.mark.parametrize("text", ["X^0", "X^", "1X", "X^1.5", "X Y^-"])
def test_malformed_words(text):
    with pytest.raises(WordSyntaxError):
        Word.parse(text)


def test_non_text_is_rejected():
    with pytest.raises(WordSyntaxError):
        Word.parse(3)


def test_reduction():
    assert Word.parse("X Y Y^-1 X^-1").reduced() == Word()
    assert Word.parse("X X^2 Y").reduced() == Word.parse("X^3 Y")
    assert Word.parse("X Y^-1 Y X^-1 Z").reduced() == Word.parse("Z")
    assert Word.parse("X Y X^-1").is_identity() is False


def test_inverse_and_length():
    w = Word.parse("X^-1 Y^3 X^-2")
    assert w.inverse() == Word.parse("X^2 Y^-3 X")
    assert (w * w.inverse()).is_identity()
    assert w.length() == 6
    assert w.generator_names() == ["X", "Y"]


def test_cyclic_permutations():
    perms = Word.parse("X Y^2").cyclic_permutations()
    assert perms == [Word.parse("X Y^2"), Word.parse("Y^2 X"), Word.parse("Y X Y")]
    assert Word().cyclic_permutations() == [Word()]


def test_commutator_and_conjugate():
    x, y = Word.generator("X"), Word.generator("Y")
    assert commutator(x, y) == Word.parse("X Y X^-1 Y^-1")
    assert conjugate_word(y, x) == Word.parse("Y X Y^-1")
    assert conjugate_word(x, x) == x


def test_enumerate_reduced_words_counts():
    for n in range(5):
        words = enumerate_reduced_words(["X", "Y"], n)
        assert len(words) == 1 + 2 * 2 * (3 ** n - 1) // 2
        assert len(set(words)) == len(words)
        assert all(w.length() == len(w.letters) for w in words)
    assert len(enumerate_reduced_words(["X"], 4)) == 9
    assert enumerate_reduced_words(["X", "Y"], 0) == [Word()]
