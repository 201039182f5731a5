"""Explicit polynomials for n = 1..4, shared by the family and acceptance tests."""
import sympy

a, b, z = sympy.symbols("a b z")
R = sympy.Rational

# Explicit expressions for n = 1..4 with the correct p_4; P4_WITH_SLIPS is a
# variant with sign slips used by test_p4_with_slips_is_not_the_family.
GOLDEN = {
    1: dict(p=z + a, qstar=a**2 - b, cstar=a),
    2: dict(p=z**2 + a * z + (a**2 / 2 - b), qstar=a**3 - 4 * a * b + 2, cstar=R(3, 4) * a**2 - b),
    3: dict(
        p=z**3 + a * z**2 + (a**2 / 2 - R(3, 2) * b) * z - R(7, 6) * a * b + a**3 / 6 + 1,
        qstar=a**4 - 10 * a**2 * b + 12 * a + 9 * b**2,
        cstar=a**3 / 2 - R(5, 2) * a * b + R(3, 2),
    ),
    4: dict(
        p=z**4 + a * z**3 + (a**2 / 2 - 2 * b) * z**2 + (a**3 / 6 - R(5, 3) * a * b + 2) * z
        - R(2, 3) * a**2 * b + b**2 + R(5, 4) * a + a**4 / 24,
        qstar=42 * a**2 - 96 * b - 20 * a**3 * b + 64 * a * b**2 + a**5,
        cstar=R(21, 4) * a + R(5, 16) * a**4 - R(15, 4) * a**2 * b + 4 * b**2,
    ),
}

P4_WITH_SLIPS = (
    z**4 - a * z**3 + (a**2 / 2 - 2 * b) * z**2 - (2 + a**3 / 6 - R(5, 2) * a * b) * z
    - R(2, 3) * a**2 * b + b**2 + R(5, 4) * a + a**4 / 24
)
