"""Constant-coefficient alternating forms on a presented Lie algebra and
their cochain complex, in exact rational arithmetic.

The vector-field space is given by structure constants; antisymmetry
and the Jacobi identity are validated exactly. Forms of degree k are
alternating maps with one rational coefficient per strictly increasing
k-tuple of basis indices. With constant coefficients every derivation
term of the classical formulas vanishes, so the differential of a
1-form is minus its value on brackets, and higher degrees are pinned
down inductively by the Cartan identity

    interior(X, d w) = lie(X, w) - d(interior(X, w))

required for every basis field X. An independent alternating-sum
differential, sharing only the bracket with the inductive route, guards
the construction, and the complex report checks d after d vanishing
exactly before computing ranks by rational elimination.

No floating point enters this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import InputError, InternalInvariantError

Rat = Fraction


def _fr(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise InputError(f"expected exact rational, got {value!r}")


@dataclass(frozen=True)
class LieAlgebraPresentation:
    """Structure constants c[i][j][k] with bracket of basis i, j equal to
    the k-sum of c[i][j][k] times basis k."""

    dim: int
    basis: tuple[str, ...]
    c: tuple[tuple[tuple[Fraction, ...], ...], ...]

    def __post_init__(self):
        n = self.dim
        if n < 1:
            raise InputError("dimension must be at least 1")
        if len(self.basis) != n or len(set(self.basis)) != n:
            raise InputError("basis names must be distinct and match the dimension")
        c = self.c
        if len(c) != n or any(len(ci) != n for ci in c) or any(
            len(cij) != n for ci in c for cij in ci
        ):
            raise InputError("structure constants must form an n x n x n array")
        object.__setattr__(
            self,
            "c",
            tuple(
                tuple(tuple(_fr(v) for v in cij) for cij in ci) for ci in c
            ),
        )

    def bracket_basis(self, i: int, j: int) -> tuple[Fraction, ...]:
        return self.c[i][j]

    @classmethod
    def from_brackets(
        cls,
        dim: int,
        brackets: Iterable[tuple[int, int, Sequence]],
        basis: tuple[str, ...] | None = None,
    ) -> "LieAlgebraPresentation":
        """Build the tensor from sparse (i, j, coefficients) triples.

        The (j, i) entry is filled with the negated coefficients; giving
        both orientations is allowed when they are consistent.
        """
        names = basis if basis is not None else tuple(f"e{i+1}" for i in range(dim))
        c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        seen = {}
        for i, j, coeffs in brackets:
            if not (0 <= i < dim and 0 <= j < dim):
                raise InputError(f"bracket indices ({i}, {j}) out of range")
            coeffs = tuple(_fr(v) for v in coeffs)
            if len(coeffs) != dim:
                raise InputError(
                    f"bracket ({i}, {j}) needs {dim} coefficients, got {len(coeffs)}"
                )
            if (i, j) in seen and seen[(i, j)] != coeffs:
                raise InputError(f"conflicting entries for bracket ({i}, {j})")
            seen[(i, j)] = coeffs
            neg = tuple(-v for v in coeffs)
            if (j, i) in seen and seen[(j, i)] != neg:
                raise InputError(f"brackets ({i},{j}) and ({j},{i}) disagree")
            seen[(j, i)] = neg
            c[i][j] = list(coeffs)
            c[j][i] = list(neg)
        return cls(dim, names, tuple(tuple(tuple(r) for r in ci) for ci in c))


@dataclass(frozen=True)
class LieCertificate:
    antisymmetry_checked: int
    jacobi_checked: int


def validate_lie(g: LieAlgebraPresentation) -> LieCertificate:
    """Exact antisymmetry and Jacobi checks; raises naming the offender."""
    n = g.dim
    anti = 0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if g.c[i][j][k] != -g.c[j][i][k]:
                    raise InputError(
                        f"antisymmetry fails at c[{i}][{j}][{k}] = {g.c[i][j][k]} "
                        f"vs c[{j}][{i}][{k}] = {g.c[j][i][k]}"
                    )
                anti += 1
    jacobi = 0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    total = sum(
                        (
                            g.c[i][j][m] * g.c[m][k][l]
                            + g.c[j][k][m] * g.c[m][i][l]
                            + g.c[k][i][m] * g.c[m][j][l]
                            for m in range(n)
                        ),
                        Fraction(0),
                    )
                    if total != 0:
                        raise InputError(
                            f"Jacobi identity fails on basis triple "
                            f"({i}, {j}, {k}) at component {l}: sum {total}"
                        )
                jacobi += 1
    return LieCertificate(anti, jacobi)


def bracket(g: LieAlgebraPresentation, xv: Sequence, yv: Sequence) -> tuple[Fraction, ...]:
    """Bilinear extension of the structure constants to coefficient vectors."""
    xv = tuple(_fr(t) for t in xv)
    yv = tuple(_fr(t) for t in yv)
    n = g.dim
    if len(xv) != n or len(yv) != n:
        raise InputError(f"coefficient vectors must have length {n}")
    out = [Fraction(0)] * n
    for i in range(n):
        if xv[i] == 0:
            continue
        for j in range(n):
            if yv[j] == 0:
                continue
            for l in range(n):
                out[l] += xv[i] * yv[j] * g.c[i][j][l]
    return tuple(out)


def _sort_sign(indices: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Sorted tuple and permutation sign; sign 0 on repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return tuple(sorted(idx)), 0
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return tuple(idx), sign


@dataclass(frozen=True)
class KForm:
    """Alternating k-linear map with one coefficient per increasing tuple."""

    dim: int
    degree: int
    coeffs: Mapping[tuple[int, ...], Fraction]

    def __post_init__(self):
        if not 0 <= self.degree <= self.dim:
            raise InputError(
                f"degree {self.degree} out of range for dimension {self.dim}"
            )
        expected = set(combinations(range(self.dim), self.degree))
        table = {}
        for key, value in self.coeffs.items():
            key = tuple(key)
            if key not in expected:
                raise InputError(f"index tuple {key} is not strictly increasing")
            table[key] = _fr(value)
        for key in expected:
            table.setdefault(key, Fraction(0))
        object.__setattr__(self, "coeffs", table)

    @classmethod
    def zero(cls, dim: int, degree: int) -> "KForm":
        return cls(dim, degree, {})

    @classmethod
    def basis_dual(cls, dim: int, indices: Sequence[int]) -> "KForm":
        key = tuple(indices)
        return cls(dim, len(key), {key: Fraction(1)})

    def on_basis(self, indices: Sequence[int]) -> Fraction:
        """Value on basis fields in any order, via the permutation sign."""
        if len(indices) != self.degree:
            raise InputError(
                f"degree-{self.degree} form applied to {len(indices)} fields"
            )
        key, sign = _sort_sign(indices)
        if sign == 0:
            return Fraction(0)
        return sign * self.coeffs[key]

    def on_vectors(self, vectors: Sequence[Sequence]) -> Fraction:
        """Multilinear alternating evaluation on coefficient vectors."""
        if len(vectors) != self.degree:
            raise InputError(
                f"degree-{self.degree} form applied to {len(vectors)} fields"
            )
        vecs = [tuple(_fr(t) for t in v) for v in vectors]
        total = Fraction(0)
        for idx in combinations(range(self.dim), self.degree):
            coeff = self.coeffs[idx]
            if coeff == 0:
                continue
            total += coeff * _det([[v[i] for i in idx] for v in vecs])
        return total

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.coeffs.values())

    def scaled(self, factor) -> "KForm":
        factor = _fr(factor)
        return KForm(
            self.dim, self.degree,
            {k: factor * v for k, v in self.coeffs.items()},
        )

    def plus(self, other: "KForm") -> "KForm":
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise InputError("form mismatch in addition")
        return KForm(
            self.dim, self.degree,
            {k: v + other.coeffs[k] for k, v in self.coeffs.items()},
        )

    def __eq__(self, other):
        return (
            isinstance(other, KForm)
            and self.dim == other.dim
            and self.degree == other.degree
            and all(self.coeffs[k] == other.coeffs[k] for k in self.coeffs)
        )


def _det(rows) -> Fraction:
    n = len(rows)
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for j in range(n):
        if rows[0][j] == 0:
            continue
        minor = [[row[t] for t in range(n) if t != j] for row in rows[1:]]
        total += (-1) ** j * rows[0][j] * _det(minor)
    return total


def d_one_form(g: LieAlgebraPresentation, omega: KForm) -> KForm:
    """Differential of a 1-form: minus its value on brackets, since the
    derivation terms vanish on constant coefficients."""
    if omega.degree != 1:
        raise InputError(f"expected a 1-form, got degree {omega.degree}")
    if omega.dim != g.dim:
        raise InputError("form does not match the algebra dimension")
    if g.dim < 2:
        return KForm.zero(g.dim, g.dim)  # no degree-2 slots; truncation
    coeffs = {}
    for i, j in combinations(range(g.dim), 2):
        coeffs[(i, j)] = -sum(
            (g.c[i][j][l] * omega.coeffs[(l,)] for l in range(g.dim)),
            Fraction(0),
        )
    return KForm(g.dim, 2, coeffs)


def lie_derivative(g: LieAlgebraPresentation, field: Sequence, omega: KForm) -> KForm:
    """Lie derivative along a field; the leading derivation term vanishes
    on constant coefficients, leaving minus the sum over slots of the
    form with the bracket substituted."""
    field = tuple(_fr(t) for t in field)
    if len(field) != g.dim or omega.dim != g.dim:
        raise InputError("field or form does not match the algebra dimension")
    k = omega.degree
    coeffs = {}
    for idx in combinations(range(g.dim), k):
        total = Fraction(0)
        for slot in range(k):
            br = bracket(g, field, _unit(g.dim, idx[slot]))
            for l in range(g.dim):
                if br[l] == 0:
                    continue
                seq = idx[:slot] + (l,) + idx[slot + 1:]
                total -= br[l] * omega.on_basis(seq)
        coeffs[idx] = total
    return KForm(g.dim, k, coeffs)


def _unit(dim: int, i: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(1 if j == i else 0) for j in range(dim))


def interior_product(field: Sequence, omega: KForm) -> KForm:
    """Contraction in the first slot."""
    if omega.degree < 1:
        raise InputError("cannot contract a 0-form")
    field = tuple(_fr(t) for t in field)
    if len(field) != omega.dim:
        raise InputError("field does not match the form dimension")
    coeffs = {}
    for idx in combinations(range(omega.dim), omega.degree - 1):
        total = Fraction(0)
        for m in range(omega.dim):
            if field[m] == 0:
                continue
            total += field[m] * omega.on_basis((m,) + idx)
        coeffs[idx] = total
    return KForm(omega.dim, omega.degree - 1, coeffs)


def wedge(left: KForm, right: KForm) -> KForm:
    """Shuffle-signed product; degrees beyond the dimension collapse to
    the zero top form by convention."""
    if left.dim != right.dim:
        raise InputError("wedge of forms over different algebras")
    dim = left.dim
    degree = left.degree + right.degree
    if degree > dim:
        return KForm.zero(dim, dim)
    coeffs = {}
    for idx in combinations(range(dim), degree):
        total = Fraction(0)
        for picks in combinations(range(degree), left.degree):
            lpart = tuple(idx[p] for p in picks)
            rpart = tuple(idx[p] for p in range(degree) if p not in picks)
            _, sign = _sort_sign(lpart + rpart)
            total += sign * left.coeffs[lpart] * right.coeffs[rpart]
        coeffs[idx] = total
    return KForm(dim, degree, coeffs)


def exterior_derivative(g: LieAlgebraPresentation, omega: KForm) -> KForm:
    """Differential in every degree, defined inductively.

    Degree 0 dies, degree 1 is the bracket formula, and for k >= 2 each
    coefficient of the result on an increasing tuple (t0 < rest) is read
    off from the Cartan identity contracted with basis field t0, whose
    right side only involves degree k-1 differentials. The remaining
    contractions are then verified; a mismatch would contradict the
    construction and is raised as an internal error.
    """
    if omega.dim != g.dim:
        raise InputError("form does not match the algebra dimension")
    k = omega.degree
    if k == 0:
        return KForm.zero(g.dim, 1)
    if k == g.dim:
        result = KForm.zero(g.dim, g.dim)  # no degree n+1 slots
        _check_cartan_consistency(g, omega, result, top=True)
        return result
    if k == 1:
        return d_one_form(g, omega)
    coeffs = {}
    rhs = {}
    for j in range(g.dim):
        ej = _unit(g.dim, j)
        rhs[j] = lie_derivative(g, ej, omega).plus(
            exterior_derivative(g, interior_product(ej, omega)).scaled(-1)
        )
    for idx in combinations(range(g.dim), k + 1):
        t0, rest = idx[0], idx[1:]
        coeffs[idx] = rhs[t0].on_basis(rest)
    result = KForm(g.dim, k + 1, coeffs)
    for j in range(g.dim):
        got = interior_product(_unit(g.dim, j), result)
        if not got == rhs[j]:
            raise InternalInvariantError(
                f"inductive differential inconsistent when contracted with "
                f"basis field {j}"
            )
    return result


def _check_cartan_consistency(g, omega, d_omega, top=False):
    for j in range(g.dim):
        ej = _unit(g.dim, j)
        want = lie_derivative(g, ej, omega).plus(
            exterior_derivative(g, interior_product(ej, omega)).scaled(-1)
        )
        got = (
            KForm.zero(g.dim, omega.degree)
            if top
            else interior_product(ej, d_omega)
        )
        if not got == want:
            raise InternalInvariantError(
                f"top-degree differential inconsistent at basis field {j}"
            )


def ce_oracle(g: LieAlgebraPresentation, omega: KForm) -> KForm:
    """Alternating-sum differential used only to guard the inductive one.

    Shares nothing with the inductive route except the bracket: the
    coefficient on a tuple is the signed sum over index pairs of the form
    evaluated with that pair's bracket in front of the remaining indices.
    """
    if omega.dim != g.dim:
        raise InputError("form does not match the algebra dimension")
    k = omega.degree
    if k >= g.dim:
        return KForm.zero(g.dim, g.dim)
    coeffs = {}
    for idx in combinations(range(g.dim), k + 1):
        total = Fraction(0)
        for p in range(k + 1):
            for q in range(p + 1, k + 1):
                rest = tuple(
                    idx[r] for r in range(k + 1) if r != p and r != q
                )
                br = g.c[idx[p]][idx[q]]
                for l in range(g.dim):
                    if br[l] == 0:
                        continue
                    total += (-1) ** (p + q) * br[l] * omega.on_basis((l,) + rest)
        coeffs[idx] = total
    return KForm(g.dim, k + 1, coeffs)


def rational_rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    """Rank by fraction-exact Gaussian elimination."""
    rows = [list(r) for r in matrix]
    if not rows or not rows[0]:
        return 0
    ncols = len(rows[0])
    rank = 0
    col = 0
    for col in range(ncols):
        pivot = None
        for r in range(rank, len(rows)):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pv = rows[rank][col]
        rows[rank] = [v / pv for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


@dataclass(frozen=True)
class ComplexReport:
    """Differential matrices per degree, their ranks, and Betti numbers."""

    dim: int
    basis: tuple[str, ...]
    matrices: tuple[tuple[tuple[Fraction, ...], ...], ...]
    ranks: tuple[int, ...]
    betti: tuple[int, ...]

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * b for k, b in enumerate(self.betti))


def _degree_basis(dim: int, k: int):
    return list(combinations(range(dim), k))


def differential_matrix(g: LieAlgebraPresentation, k: int):
    """Matrix of the degree-k differential in the increasing-tuple bases;
    rows are (k+1)-tuples, columns are k-tuples."""
    rows = _degree_basis(g.dim, k + 1) if k < g.dim else []
    cols = _degree_basis(g.dim, k)
    matrix = []
    images = [exterior_derivative(g, KForm.basis_dual(g.dim, c)) for c in cols]
    for r in rows:
        matrix.append(tuple(img.coeffs[r] for img in images))
    return tuple(matrix), rows, cols


def de_rham_complex(g: LieAlgebraPresentation) -> ComplexReport:
    """Build every differential, verify d after d is exactly zero, and
    compute Betti numbers by exact elimination."""
    validate_lie(g)
    n = g.dim
    matrices = []
    ranks = []
    for k in range(n + 1):
        mat, rows, cols = differential_matrix(g, k)
        matrices.append(mat)
        ranks.append(rational_rank(mat))
    for k in range(n):
        if not _product_is_zero(matrices[k + 1], matrices[k]):
            raise InternalInvariantError(
                f"composite of differentials in degrees {k} and {k + 1} "
                f"is nonzero"
            )
    betti = []
    for k in range(n + 1):
        dim_k = len(_degree_basis(n, k))
        kernel = dim_k - ranks[k]
        image_prev = ranks[k - 1] if k >= 1 else 0
        betti.append(kernel - image_prev)
    return ComplexReport(
        n, g.basis, tuple(matrices), tuple(ranks), tuple(betti)
    )


def _product_is_zero(later, earlier) -> bool:
    if not later or not earlier:
        return True
    rows = len(later)
    mid = len(earlier)
    cols = len(earlier[0]) if earlier else 0
    if mid == 0:
        return True
    for r in range(rows):
        for c in range(cols):
            total = sum(
                (later[r][m] * earlier[m][c] for m in range(mid)), Fraction(0)
            )
            if total != 0:
                return False
    return True


def abelian(dim: int) -> LieAlgebraPresentation:
    return LieAlgebraPresentation.from_brackets(dim, [])


def heisenberg() -> LieAlgebraPresentation:
    return LieAlgebraPresentation.from_brackets(
        3, [(0, 1, (0, 0, 1))]
    )


def sl2() -> LieAlgebraPresentation:
    """Basis (h, e, f) with [h,e] = 2e, [h,f] = -2f, [e,f] = h."""
    return LieAlgebraPresentation.from_brackets(
        3,
        [
            (0, 1, (0, 2, 0)),
            (0, 2, (0, 0, -2)),
            (1, 2, (1, 0, 0)),
        ],
        basis=("h", "e", "f"),
    )
