"""Independent reference computations used by the tests.

Nothing here imports the package's engine: vacuum expectation values are
evaluated by commuting annihilators to the right with the bare bracket
relations, and graded dimensions come from generating-function products.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


def graded_dims(top: int, min_part: int) -> list:
    """Coefficients of prod_{k >= min_part} 1/(1-q^k) up to q^top."""
    coeffs = [1] + [0] * top
    for k in range(min_part, top + 1):
        for n in range(k, top + 1):
            coeffs[n] += coeffs[n - k]
    return coeffs


def convolve(a: list, b: list) -> list:
    return [sum(a[i] * b[n - i] for i in range(n + 1)) for n in range(min(len(a), len(b)))]


def virasoro_bracket(c):
    c = Fraction(c)

    def bracket(a, b):
        # [L_a, L_b] = (a-b) L_{a+b} + c/12 (a^3-a) δ_{a+b,0}
        terms = []
        if a != b:
            terms.append((Fraction(a - b), (a + b,)))
        if a + b == 0 and a ** 3 - a:
            terms.append((c * (a ** 3 - a) / 12, ()))
        return terms

    return bracket


def heisenberg_bracket(a, b):
    return [(Fraction(a), ())] if a + b == 0 and a else []


def make_vev(bracket, kills_right, kills_left):
    """<Ω| X_{w_0} X_{w_1} ... X_{w_k} |Ω> for a word of mode indices."""

    @lru_cache(maxsize=None)
    def vev(word: tuple) -> Fraction:
        if not word:
            return Fraction(1)
        if kills_right(word[-1]) or kills_left(word[0]):
            return Fraction(0)
        # move the leftmost mode (an annihilator) one step right at a time
        first, rest = word[0], word[1:]
        total = Fraction(0)
        for i, r in enumerate(rest):
            for coeff, repl in bracket(first, r):
                total += coeff * vev(rest[:i] + repl + rest[i + 1:])
        # leftover term has `first` acting on Ω, which vanishes
        return total

    return vev


def virasoro_vev(c):
    return make_vev(virasoro_bracket(c), lambda n: n >= -1, lambda n: n <= 1)


def heisenberg_vev():
    return make_vev(heisenberg_bracket, lambda n: n >= 0, lambda n: n <= 0)


def creation_word(partition) -> tuple:
    """Mode word of X_{-λ_1} ... X_{-λ_k} Ω (applied right to left)."""
    return tuple(-p for p in partition)


def adjoint_word(partition) -> tuple:
    return tuple(reversed(partition))


def gram_oracle(vev, basis) -> list:
    return [[vev(adjoint_word(u) + creation_word(v)) for v in basis] for u in basis]


def matrix_element(vev, left, modes: tuple, right) -> Fraction:
    """<X_{-left} Ω | X_{m_1} ... X_{m_r} | X_{-right} Ω>."""
    return vev(adjoint_word(left) + tuple(modes) + creation_word(right))


def fock_norm(partition) -> int:
    """z_λ = prod_m m^{k_m} k_m!, the squared norm of α_{-λ}Ω."""
    out = 1
    for m in set(partition):
        k = partition.count(m)
        fact = 1
        for i in range(2, k + 1):
            fact *= i
        out *= m ** k * fact
    return out
