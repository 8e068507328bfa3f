"""Symmetrizable Cartan data, double quivers, relations and Euler forms.

A Cartan datum is a triple (C, D, Omega): a symmetrizable generalized
Cartan matrix C, a symmetrizer D = diag(c_i), and an acyclic orientation
Omega of the underlying graph.  From it we derive the double quiver (one
loop eps_i per vertex, g_ij arrows each way per edge) and the defining
relations of the preprojective algebra: nilpotency eps_i^{c_i} = 0,
commutativity eps_i^{f_ji} a_ij = a_ij eps_j^{f_ij}, and the mesh relation
at every vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm


class DatumError(ValueError):
    """Invalid Cartan datum; `code` identifies which condition failed."""

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# generators of the double quiver, used as dict keys and in relation words:
#   ("eps", i)        the loop at vertex i
#   ("arr", i, j, g)  the arrow a_ij^(g) with source j and target i
def eps_key(i):
    return ("eps", i)


def arrow_key(i, j, g):
    return ("arr", i, j, g)


def gen_source(gen):
    return gen[1] if gen[0] == "eps" else gen[2]


def gen_target(gen):
    return gen[1]


@dataclass(frozen=True)
class Relation:
    """A signed sum of words that must act by zero on every module."""

    label: str
    kind: str          # "nilpotency" | "commutativity" | "mesh"
    source: int
    target: int
    terms: tuple       # tuple of (coeff, word); word = tuple of generator keys

    def pretty(self):
        def wstr(word):
            return "*".join("eps%d" % g[1] if g[0] == "eps" else "a%d%d_%d" % (g[1], g[2], g[3])
                            for g in word) or "1"
        parts = []
        for coeff, word in self.terms:
            sign = "+" if coeff > 0 else "-"
            parts.append("%s %s" % (sign, wstr(word)))
        return " ".join(parts).lstrip("+ ")


@dataclass(frozen=True)
class DoubleQuiver:
    vertices: tuple
    arrows: tuple      # arrow keys ("arr", i, j, g)
    loops: tuple       # one eps per vertex
    gij: dict
    fij: dict
    sgn: dict          # sign on ordered pairs of the doubled orientation


@dataclass(frozen=True)
class RelationSet:
    relations: tuple

    def by_kind(self, kind):
        return [r for r in self.relations if r.kind == kind]


class CartanDatum:
    """A validated (C, D, Omega) with its derived double quiver and relations.

    Immutable after construction; safe to share.  Vertices are the given
    ordered labels, and all matrices/tuples follow that order.
    """

    def __init__(self, vertices, cartan, sym, orient):
        self.vertices = tuple(vertices)
        self.index = {v: k for k, v in enumerate(self.vertices)}
        self.cartan = tuple(tuple(row) for row in cartan)
        self.sym = tuple(sym)
        self.orient = tuple(tuple(p) for p in orient)
        self._quiver = None
        self._relations = None

    # raw accessors by vertex label
    def c(self, i, j):
        return self.cartan[self.index[i]][self.index[j]]

    def ci(self, i):
        return self.sym[self.index[i]]

    def n(self):
        return len(self.vertices)

    def edges(self):
        """Unordered pairs {i,j} with c_ij < 0, in vertex order."""
        out = []
        for a, i in enumerate(self.vertices):
            for j in self.vertices[a + 1:]:
                if self.c(i, j) < 0:
                    out.append((i, j))
        return out

    def double_orient(self):
        return self.orient + tuple((j, i) for (i, j) in self.orient)

    def gij(self, i, j):
        return gcd(abs(self.c(i, j)), abs(self.c(j, i)))

    def fij(self, i, j):
        return abs(self.c(i, j)) // self.gij(i, j)

    def sgn(self, i, j):
        if (i, j) in self.orient:
            return 1
        if (j, i) in self.orient:
            return -1
        raise KeyError("(%r,%r) is not an oriented edge" % (i, j))

    def arrow_keys(self):
        out = []
        for (i, j) in self.double_orient():
            for g in range(1, self.gij(i, j) + 1):
                out.append(arrow_key(i, j, g))
        return out

    def is_symmetric(self):
        return all(self.c(i, j) == self.c(j, i) for i in self.vertices for j in self.vertices)

    def quiver(self):
        if self._quiver is None:
            self._build()
        return self._quiver

    def relations(self):
        if self._relations is None:
            self._build()
        return self._relations

    def _build(self):
        gij = {}
        fij = {}
        sgn = {}
        for (i, j) in self.double_orient():
            gij[(i, j)] = self.gij(i, j)
            fij[(i, j)] = self.fij(i, j)
            sgn[(i, j)] = self.sgn(i, j)
        self._quiver = DoubleQuiver(
            vertices=self.vertices,
            arrows=tuple(self.arrow_keys()),
            loops=tuple(eps_key(i) for i in self.vertices),
            gij=gij, fij=fij, sgn=sgn)

        rels = []
        for i in self.vertices:
            word = (eps_key(i),) * self.ci(i)
            rels.append(Relation("nilpotency@%r" % (i,), "nilpotency", i, i, ((1, word),)))
        for (i, j) in self.double_orient():
            for g in range(1, self.gij(i, j) + 1):
                a = arrow_key(i, j, g)
                left = (eps_key(i),) * self.fij(j, i) + (a,)
                right = (a,) + (eps_key(j),) * self.fij(i, j)
                rels.append(Relation("commutativity@%r%r#%d" % (i, j, g),
                                     "commutativity", j, i, ((1, left), (-1, right))))
        for i in self.vertices:
            terms = []
            for j in self.vertices:
                if self.c(i, j) >= 0 or i == j:
                    continue
                s = self.sgn(i, j)
                fji = self.fij(j, i)
                for g in range(1, self.gij(i, j) + 1):
                    for f in range(fji):
                        word = ((eps_key(i),) * f
                                + (arrow_key(i, j, g), arrow_key(j, i, g))
                                + (eps_key(i),) * (fji - 1 - f))
                        terms.append((s, word))
            if terms:
                rels.append(Relation("mesh@%r" % (i,), "mesh", i, i, tuple(terms)))
        self._relations = RelationSet(tuple(rels))

    # serialization
    def to_json(self):
        return {
            "vertices": list(self.vertices),
            "cartan": [list(row) for row in self.cartan],
            "symmetrizer": list(self.sym),
            "orientation": [list(p) for p in self.orient],
        }

    def __eq__(self, other):
        if not isinstance(other, CartanDatum):
            return NotImplemented
        return (self.vertices, self.cartan, self.sym, self.orient) == \
               (other.vertices, other.cartan, other.sym, other.orient)

    def __hash__(self):
        return hash((self.vertices, self.cartan, self.sym, self.orient))

    def __repr__(self):
        return "CartanDatum(vertices=%r, C=%r, D=%r, Omega=%r)" % (
            self.vertices, self.cartan, self.sym, self.orient)


def _check_cartan_matrix(vertices, cartan):
    n = len(vertices)
    if len(cartan) != n or any(len(row) != n for row in cartan):
        raise DatumError("shape", "Cartan matrix must be %dx%d" % (n, n))
    for a in range(n):
        if cartan[a][a] != 2:
            raise DatumError("diagonal", "c_ii must equal 2 at vertex %r" % (vertices[a],))
        for b in range(n):
            if a == b:
                continue
            if cartan[a][b] > 0:
                raise DatumError("offdiag_positive",
                                 "c_ij must be <= 0 for i != j (at %r,%r)" % (vertices[a], vertices[b]))
            if (cartan[a][b] == 0) != (cartan[b][a] == 0):
                raise DatumError("zero_pattern",
                                 "c_ij = 0 must imply c_ji = 0 (at %r,%r)" % (vertices[a], vertices[b]))


def _find_cycle(vertices, arcs):
    """A directed cycle in (vertices, arcs) as a vertex list, or None."""
    succ = {v: [] for v in vertices}
    for (i, j) in arcs:
        succ[i].append(j)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in vertices}
    stack = []

    def dfs(v):
        color[v] = GRAY
        stack.append(v)
        for w in succ[v]:
            if color[w] == GRAY:
                return stack[stack.index(w):] + [w]
            if color[w] == WHITE:
                cyc = dfs(w)
                if cyc:
                    return cyc
        stack.pop()
        color[v] = BLACK
        return None

    for v in vertices:
        if color[v] == WHITE:
            cyc = dfs(v)
            if cyc:
                return cyc
    return None


def validate_datum(cartan, sym, orient, vertices=None):
    """Validate (C, D, Omega) and return the immutable datum.

    Raises DatumError with a distinct code for each violated condition:
    shape, diagonal, offdiag_positive, zero_pattern, symmetrizer_positive,
    dc_not_symmetric, orientation_pair, orientation_cycle.
    """
    n = len(cartan)
    if vertices is None:
        vertices = tuple(range(1, n + 1))
    vertices = tuple(vertices)
    if len(set(vertices)) != len(vertices):
        raise DatumError("shape", "duplicate vertex labels")
    _check_cartan_matrix(vertices, cartan)
    if len(sym) != n:
        raise DatumError("shape", "symmetrizer must have one entry per vertex")
    for a in range(n):
        if not isinstance(sym[a], int) or sym[a] < 1:
            raise DatumError("symmetrizer_positive",
                             "symmetrizer entries must be positive integers (vertex %r)" % (vertices[a],))
    for a in range(n):
        for b in range(n):
            if sym[a] * cartan[a][b] != sym[b] * cartan[b][a]:
                raise DatumError("dc_not_symmetric",
                                 "DC is not symmetric at (%r,%r)" % (vertices[a], vertices[b]))
    pairs = set()
    for p in orient:
        if len(p) != 2:
            raise DatumError("orientation_pair", "orientation entries must be pairs")
        pairs.add((p[0], p[1]))
    if len(pairs) != len(list(orient)):
        raise DatumError("orientation_pair", "duplicate pair in orientation")
    idx = {v: k for k, v in enumerate(vertices)}
    for (i, j) in pairs:
        if i not in idx or j not in idx or i == j:
            raise DatumError("orientation_pair", "orientation pair (%r,%r) is not an edge" % (i, j))
        if cartan[idx[i]][idx[j]] >= 0:
            raise DatumError("orientation_pair",
                             "orientation pair (%r,%r) has c_ij = 0" % (i, j))
    for a, i in enumerate(vertices):
        for j in vertices[a + 1:]:
            if cartan[idx[i]][idx[j]] < 0:
                hit = ((i, j) in pairs) + ((j, i) in pairs)
                if hit == 0:
                    raise DatumError("orientation_pair", "edge {%r,%r} is not oriented" % (i, j))
                if hit == 2:
                    raise DatumError("orientation_pair",
                                     "edge {%r,%r} is oriented in both directions" % (i, j))
    cyc = _find_cycle(vertices, pairs)
    if cyc:
        raise DatumError("orientation_cycle", "orientation contains the cycle %r" % (cyc,))
    return CartanDatum(vertices, cartan, sym, sorted(pairs, key=lambda p: (idx[p[0]], idx[p[1]])))


def default_orientation(cartan, vertices=None):
    """Every edge oriented from the smaller to the larger vertex label."""
    n = len(cartan)
    if vertices is None:
        vertices = tuple(range(1, n + 1))
    out = []
    for a in range(n):
        for b in range(a + 1, n):
            if cartan[a][b] < 0:
                out.append((vertices[a], vertices[b]))
    return out


def minimal_symmetrizer(cartan):
    """The entrywise-minimal symmetrizer of C (per connected component).

    Solves the ratio constraints c_i * c_ij = c_j * c_ji along a spanning
    tree of each component, checks consistency on the remaining edges, and
    clears denominators.  Raises DatumError("not_symmetrizable") when the
    constraints are inconsistent around a cycle.
    """
    n = len(cartan)
    vertices = tuple(range(n))
    _check_cartan_matrix(vertices, cartan)
    values = [None] * n
    for root in range(n):
        if values[root] is not None:
            continue
        values[root] = Fraction(1)
        queue = [root]
        comp = [root]
        while queue:
            a = queue.pop()
            for b in range(n):
                if a == b or cartan[a][b] == 0:
                    continue
                # c_a * c_ab = c_b * c_ba  =>  c_b = c_a * c_ab / c_ba
                want = values[a] * cartan[a][b] / cartan[b][a]
                if values[b] is None:
                    values[b] = want
                    queue.append(b)
                    comp.append(b)
                elif values[b] != want:
                    raise DatumError("not_symmetrizable",
                                     "no symmetrizer exists (cycle through %d,%d)" % (a, b))
        scale = lcm(*[values[v].denominator for v in comp])
        ints = [values[v] * scale for v in comp]
        shrink = gcd(*[int(x) for x in ints])
        for v, x in zip(comp, ints):
            values[v] = int(x) // shrink
    return [int(v) for v in values]


def build_double_quiver(datum):
    """The double quiver and the instantiated relation families of the datum."""
    return datum.quiver(), datum.relations()


def _check_rank_vector(datum, d):
    if len(d) != datum.n():
        raise ValueError("rank vector must have %d entries" % datum.n())
    return tuple(int(x) for x in d)


def alpha_form(datum, d, e):
    d = _check_rank_vector(datum, d)
    e = _check_rank_vector(datum, e)
    return sum(datum.sym[k] * d[k] * e[k] for k in range(datum.n()))


def beta_form(datum, d, e):
    d = _check_rank_vector(datum, d)
    e = _check_rank_vector(datum, e)
    total = 0
    for (i, j) in datum.orient:
        a, b = datum.index[i], datum.index[j]
        total += datum.sym[a] * abs(datum.cartan[a][b]) * d[a] * e[b]
    return total


def symmetrized_form(datum, d, e):
    return (alpha_form(datum, d, e) + alpha_form(datum, e, d)
            - beta_form(datum, d, e) - beta_form(datum, e, d))


def euler_forms(datum, d, e):
    """(alpha(d,e), beta(d,e), (d,e)) for rank vectors d, e."""
    return alpha_form(datum, d, e), beta_form(datum, d, e), symmetrized_form(datum, d, e)


def dim_formulas(datum, d, e):
    """Dimensions of the crystal-module variety, Hom_T, and GL for ranks d, e."""
    return {
        "dimRC": beta_form(datum, d, d),
        "dimHomT": alpha_form(datum, d, e),
        "dimGL": alpha_form(datum, d, d),
    }
