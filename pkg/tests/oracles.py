"""Independent slow oracles used by the tests.

These deliberately avoid the library's fraction-free elimination: the
determinant here is plain cofactor expansion over exact polynomials, so a
resultant computed both ways checks the Bareiss path against something it
shares no code with.
"""

from fractions import Fraction

from pearcey_wkb.multipoly import MultiPoly, sylvester_matrix


def det_cofactor(matrix):
    """Cofactor-expansion determinant of a matrix of MultiPoly entries."""
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    variables = matrix[0][0].variables
    total = MultiPoly.zero(variables)
    for j in range(n):
        entry = matrix[0][j]
        if entry.is_zero():
            continue
        minor = [row[:j] + row[j + 1 :] for row in matrix[1:]]
        term = entry * det_cofactor(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


def resultant_cofactor(p: MultiPoly, q: MultiPoly, name: str) -> MultiPoly:
    return det_cofactor(sylvester_matrix(p, q, name))


def random_multipoly(rng, variables, max_degree=2, max_terms=4, coeff_range=6):
    terms = {}
    for _ in range(rng.integers(1, max_terms + 1)):
        exps = tuple(int(rng.integers(0, max_degree + 1)) for _ in variables)
        c = int(rng.integers(-coeff_range, coeff_range + 1))
        if c:
            terms[exps] = Fraction(c)
    return MultiPoly(variables, terms)


def finite_difference(f, z0: complex, h: float = 1e-6) -> complex:
    """Central difference derivative of a complex function of one variable."""
    return (f(z0 + h) - f(z0 - h)) / (2 * h)
