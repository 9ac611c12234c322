"""The left-invariant frame of H^n and its graded exterior algebra.

Frame fields are indexed 1..2n+1: W_j = X_j for j <= n, W_{n+j} = Y_j,
and W_{2n+1} = T.  In coordinates,

    W_i = d/dw_i - (1/2) wtilde_i d/dt   (i <= 2n),      T = d/dt,

where the symplectic twist is wtilde_i = w_{n+i} for i <= n and
wtilde_i = -w_{i-n} for n < i <= 2n.  The dual coframe is theta_i = dx_i
(i <= n), theta_{n+i} = dy_i, and theta_{2n+1} = theta, the contact form
dt - (1/2) sum_j (x_j dy_j - y_j dx_j), with dtheta = -sum_j dx_j^dy_j.

Forms and multivectors are stored blade-sparsely: a mapping from strictly
increasing index tuples to PolyCoeff coefficients.  The two algebras
mirror each other but stay distinct types, since the Hodge star and the
duality pairing treat them asymmetrically.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Type, TypeVar, Union

from .coeff import PolyCoeff, Scalar

Blade = tuple[int, ...]
CoeffLike = Union[PolyCoeff, int, Fraction]

__all__ = [
    "Form",
    "MultiVector",
    "frame_apply",
    "wedge",
    "exterior_derivative",
    "hodge_star",
    "horizontal_gradient",
    "pairing",
    "inner",
    "dx",
    "dy",
    "contact_form",
    "d_contact_form",
    "blade_name",
    "all_blades",
    "form_to_json",
    "form_from_json",
]


def theta_index(n: int) -> int:
    return 2 * n + 1


def twist_polynomial(n: int, i: int) -> PolyCoeff:
    """wtilde_i as a coordinate polynomial, defined for i <= 2n."""
    if not 1 <= i <= 2 * n:
        raise IndexError(f"twist index {i} out of range 1..{2 * n}")
    if i <= n:
        return PolyCoeff.var(n, n + i)
    return -PolyCoeff.var(n, i - n)


def frame_apply(i: int, p: PolyCoeff) -> PolyCoeff:
    """Apply the frame derivation W_i to a polynomial."""
    n = p.n
    width = 2 * n + 1
    if not 1 <= i <= width:
        raise IndexError(f"frame index {i} out of range 1..{width}")
    dt = p.partial(width)
    if i == width:
        return dt
    return p.partial(i) - twist_polynomial(n, i) * dt * Fraction(1, 2)


def _merge_blades(a: Blade, b: Blade) -> tuple[Blade, int] | None:
    """Concatenate-and-sort two increasing blades.

    Returns (sorted blade, sign) or None when an index repeats.
    The sign is the parity of the merge permutation.
    """
    merged: list[int] = []
    sign = 1
    ia, ib = 0, 0
    while ia < len(a) and ib < len(b):
        if a[ia] == b[ib]:
            return None
        if a[ia] < b[ib]:
            merged.append(a[ia])
            ia += 1
        else:
            # b[ib] jumps over the remaining len(a)-ia entries of a.
            if (len(a) - ia) % 2:
                sign = -sign
            merged.append(b[ib])
            ib += 1
    merged.extend(a[ia:])
    merged.extend(b[ib:])
    return tuple(merged), sign


T_ = TypeVar("T_", bound="_GradedElement")


class _GradedElement:
    """Shared container logic for Form and MultiVector."""

    __slots__ = ("n", "degree", "coeffs")

    def __init__(self, n: int, degree: int, coeffs: Mapping[Blade, CoeffLike] | None = None):
        if n < 1:
            raise ValueError(f"ambient parameter n must be >= 1, got {n}")
        if degree < 0:
            raise ValueError(f"degree must be >= 0, got {degree}")
        self.n = n
        self.degree = degree
        width = 2 * n + 1
        clean: dict[Blade, PolyCoeff] = {}
        if coeffs:
            for blade, coeff in coeffs.items():
                blade = tuple(blade)
                if len(blade) != degree:
                    raise ValueError(f"blade {blade} has length {len(blade)}, expected degree {degree}")
                if any(not 1 <= i <= width for i in blade):
                    raise ValueError(f"blade {blade} has indices outside 1..{width}")
                if any(blade[k] >= blade[k + 1] for k in range(len(blade) - 1)):
                    raise ValueError(f"blade {blade} is not strictly increasing")
                if not isinstance(coeff, PolyCoeff):
                    coeff = PolyCoeff.const(n, coeff)
                if coeff.n != n:
                    raise ValueError(f"coefficient ambient n={coeff.n} does not match form n={n}")
                if not coeff.is_zero():
                    clean[blade] = coeff
        self.coeffs = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls: Type[T_], n: int, degree: int = 0) -> T_:
        return cls(n, degree)

    @classmethod
    def from_blade(cls: Type[T_], n: int, blade: Sequence[int], coeff: CoeffLike = 1) -> T_:
        blade = tuple(blade)
        return cls(n, len(blade), {blade: coeff})

    @classmethod
    def function(cls: Type[T_], p: PolyCoeff) -> T_:
        """Degree-0 element wrapping a scalar polynomial."""
        return cls(p.n, 0, {(): p})

    def scalar_part(self) -> PolyCoeff:
        if self.degree != 0:
            raise ValueError(f"degree-{self.degree} element has no scalar part")
        return self.coeffs.get((), PolyCoeff.zero(self.n))

    # -- linear structure ----------------------------------------------

    def _check_compatible(self, other: _GradedElement) -> None:
        if type(self) is not type(other):
            raise TypeError(f"cannot mix {type(self).__name__} with {type(other).__name__}")
        if self.n != other.n:
            raise ValueError(f"ambient dimension mismatch: n={self.n} vs n={other.n}")

    def __add__(self: T_, other: T_) -> T_:
        self._check_compatible(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        coeffs = dict(self.coeffs)
        for blade, coeff in other.coeffs.items():
            acc = coeffs.get(blade)
            acc = coeff if acc is None else acc + coeff
            if acc.is_zero():
                coeffs.pop(blade, None)
            else:
                coeffs[blade] = acc
        return type(self)(self.n, self.degree, coeffs)

    def __neg__(self: T_) -> T_:
        return type(self)(self.n, self.degree, {b: -c for b, c in self.coeffs.items()})

    def __sub__(self: T_, other: T_) -> T_:
        return self + (-other)

    def scale(self: T_, factor: CoeffLike) -> T_:
        if not isinstance(factor, PolyCoeff):
            factor = PolyCoeff.const(self.n, factor)
        return type(self)(self.n, self.degree, {b: factor * c for b, c in self.coeffs.items()})

    def __mul__(self: T_, factor) -> T_:
        if isinstance(factor, (int, Fraction, PolyCoeff)):
            return self.scale(factor)
        return NotImplemented

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        # Zero elements compare equal regardless of recorded degree; the
        # degree on a zero is error-message metadata only.
        return (
            self.n == other.n
            and self.coeffs == other.coeffs
            and (self.degree == other.degree or (self.is_zero() and other.is_zero()))
        )

    def wedge(self: T_, other: T_) -> T_:
        self._check_compatible(other)
        out_degree = self.degree + other.degree
        coeffs: dict[Blade, PolyCoeff] = {}
        for ba, ca in self.coeffs.items():
            for bb, cb in other.coeffs.items():
                merged = _merge_blades(ba, bb)
                if merged is None:
                    continue
                blade, sign = merged
                term = ca * cb if sign > 0 else -(ca * cb)
                acc = coeffs.get(blade)
                acc = term if acc is None else acc + term
                if acc.is_zero():
                    coeffs.pop(blade, None)
                else:
                    coeffs[blade] = acc
        if out_degree > 2 * self.n + 1:
            return type(self)(self.n, out_degree)
        return type(self)(self.n, out_degree, coeffs)

    def sorted_items(self) -> list[tuple[Blade, PolyCoeff]]:
        return sorted(self.coeffs.items(), key=lambda kv: kv[0])

    def __repr__(self) -> str:
        if self.is_zero():
            return f"{type(self).__name__}(n={self.n}, 0)"
        body = " + ".join(
            f"({coeff.to_text()}) {blade_name(self.n, blade, vector=isinstance(self, MultiVector))}"
            if blade
            else f"({coeff.to_text()})"
            for blade, coeff in self.sorted_items()
        )
        return f"{type(self).__name__}(n={self.n}, {body})"


class Form(_GradedElement):
    """An alternating covector field with polynomial coefficients."""

    __slots__ = ()


class MultiVector(_GradedElement):
    """An alternating multivector field over the frame W_1..W_{2n+1}."""

    __slots__ = ()


def wedge(a: T_, b: T_) -> T_:
    return a.wedge(b)


def dx(n: int, j: int = 1) -> Form:
    if not 1 <= j <= n:
        raise IndexError(f"dx index {j} out of range 1..{n}")
    return Form.from_blade(n, (j,))


def dy(n: int, j: int = 1) -> Form:
    if not 1 <= j <= n:
        raise IndexError(f"dy index {j} out of range 1..{n}")
    return Form.from_blade(n, (n + j,))


def contact_form(n: int) -> Form:
    return Form.from_blade(n, (theta_index(n),))


def d_contact_form(n: int) -> Form:
    """dtheta = -sum_j dx_j ^ dy_j."""
    coeffs = {(j, n + j): PolyCoeff.const(n, -1) for j in range(1, n + 1)}
    return Form(n, 2, coeffs)


def exterior_derivative(a: Form) -> Form:
    """The exterior derivative in the left-invariant coframe.

    Computed termwise: d(c . blade) = sum_i (W_i c) theta_i ^ blade
    plus c . d(blade), where the coframe satisfies d(dx_j) = d(dy_j) = 0
    and d(theta) = dtheta.
    """
    if not isinstance(a, Form):
        raise TypeError(f"exterior_derivative expects a Form, got {type(a).__name__}")
    n = a.n
    theta = theta_index(n)
    dtheta = d_contact_form(n)
    result = Form.zero(n, a.degree + 1)
    for blade, coeff in a.coeffs.items():
        for i in range(1, theta + 1):
            dc = frame_apply(i, coeff)
            if dc.is_zero():
                continue
            result = result + Form.from_blade(n, (i,), dc).wedge(Form.from_blade(n, blade))
        if blade and blade[-1] == theta:
            # theta is the largest index, so it always sits last in the
            # blade; splitting it off costs the Koszul sign (-1)^(len-1).
            rest = blade[:-1]
            sign = -1 if len(rest) % 2 else 1
            tail = Form.from_blade(n, rest, coeff if sign > 0 else -coeff).wedge(dtheta)
            result = result + tail
    return result


def _complement(n: int, blade: Blade) -> tuple[Blade, int]:
    """Complementary blade and the Hodge sign (-1)^sigma.

    sigma counts the pairs (a, b) with a in the blade, b in the
    complement, and a > b; equivalently the inversions of the shuffle
    (blade, complement).
    """
    width = 2 * n + 1
    inside = set(blade)
    comp = tuple(i for i in range(1, width + 1) if i not in inside)
    sigma = sum(1 for a in blade for b in comp if a > b)
    return comp, (-1 if sigma % 2 else 1)


def hodge_star(v: MultiVector) -> MultiVector:
    """The Hodge star on multivectors: *V_I = (-1)^sigma(I) V_{I*}."""
    if not isinstance(v, MultiVector):
        raise TypeError(f"hodge_star expects a MultiVector, got {type(v).__name__}")
    n = v.n
    if not 0 <= v.degree <= 2 * n + 1:
        raise ValueError(f"hodge_star degree {v.degree} out of range 0..{2 * n + 1}")
    coeffs: dict[Blade, PolyCoeff] = {}
    for blade, coeff in v.coeffs.items():
        comp, sign = _complement(n, blade)
        coeffs[comp] = coeff if sign > 0 else -coeff
    return MultiVector(n, 2 * n + 1 - v.degree, coeffs)


def horizontal_gradient(f: PolyCoeff) -> MultiVector:
    """grad_H f = sum_j (X_j f) X_j + (Y_j f) Y_j; no T component."""
    n = f.n
    coeffs: dict[Blade, PolyCoeff] = {}
    for j in range(1, 2 * n + 1):
        c = frame_apply(j, f)
        if not c.is_zero():
            coeffs[(j,)] = c
    return MultiVector(n, 1, coeffs)


def pairing(omega: Form, v: MultiVector) -> PolyCoeff:
    """Duality pairing; coframe and frame blades are orthonormal."""
    if not isinstance(omega, Form) or not isinstance(v, MultiVector):
        raise TypeError("pairing expects (Form, MultiVector)")
    if omega.n != v.n:
        raise ValueError(f"ambient dimension mismatch: n={omega.n} vs n={v.n}")
    if omega.degree != v.degree and not (omega.is_zero() or v.is_zero()):
        raise ValueError(f"degree mismatch: {omega.degree} vs {v.degree}")
    total = PolyCoeff.zero(omega.n)
    for blade, coeff in omega.coeffs.items():
        other = v.coeffs.get(blade)
        if other is not None:
            total = total + coeff * other
    return total


def inner(a: T_, b: T_) -> PolyCoeff:
    """Blade-orthonormal inner product of two like-graded elements."""
    if type(a) is not type(b):
        raise TypeError(f"cannot pair {type(a).__name__} with {type(b).__name__}")
    if a.n != b.n:
        raise ValueError(f"ambient dimension mismatch: n={a.n} vs n={b.n}")
    if a.degree != b.degree and not (a.is_zero() or b.is_zero()):
        raise ValueError(f"degree mismatch: {a.degree} vs {b.degree}")
    total = PolyCoeff.zero(a.n)
    for blade, coeff in a.coeffs.items():
        other = b.coeffs.get(blade)
        if other is not None:
            total = total + coeff * other
    return total


def all_blades(n: int, k: int) -> list[Blade]:
    """All degree-k blades over 1..2n+1, lexicographically sorted."""
    width = 2 * n + 1
    if k < 0 or k > width:
        return []
    out: list[Blade] = []

    def grow(start: int, chosen: list[int]) -> None:
        if len(chosen) == k:
            out.append(tuple(chosen))
            return
        for idx in range(start, width + 1):
            chosen.append(idx)
            grow(idx + 1, chosen)
            chosen.pop()

    grow(1, [])
    return out


def blade_name(n: int, blade: Blade, vector: bool = False) -> str:
    """Human-readable blade label, e.g. dx1^dy2^theta or X1^Y2^T.

    For n = 1 the subscript is dropped, matching the usual H^1 notation.
    """
    if not blade:
        return "1"
    names = []
    for i in blade:
        if i <= n:
            base = "X" if vector else "dx"
            names.append(base if n == 1 else f"{base}{i}")
        elif i <= 2 * n:
            base = "Y" if vector else "dy"
            names.append(base if n == 1 else f"{base}{i - n}")
        else:
            names.append("T" if vector else "theta")
    return "^".join(names)


def form_to_json(a: Form) -> dict:
    """JSON-ready dict: blades sorted, coefficients in text form."""
    return {
        "n": a.n,
        "degree": a.degree,
        "terms": [
            {"blade": list(blade), "coeff": coeff.to_text()}
            for blade, coeff in a.sorted_items()
        ],
    }


def form_from_json(data: Mapping) -> Form:
    n = int(data["n"])
    degree = int(data["degree"])
    coeffs: dict[Blade, PolyCoeff] = {}
    for term in data["terms"]:
        blade = tuple(int(i) for i in term["blade"])
        coeffs[blade] = PolyCoeff.from_text(n, term["coeff"])
    return Form(n, degree, coeffs)
