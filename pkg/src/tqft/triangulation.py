"""Triangulated pseudo 3-manifolds, shape structures and angle balancing.

Conventions: vertices of a tetrahedron are 0..3, face i is opposite vertex i,
and gluings identify faces by the order-preserving map of their vertices.
Angles are stored divided by 2 pi, so a balanced edge has weight 1 and each
tetrahedron satisfies a + b + c = 1/2 with a on edges 01/23, b on 02/13 and
c on 03/12.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from scipy.cluster.hierarchy import DisjointSet

EDGES = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
EDGE_NAMES = ["01", "02", "03", "12", "13", "23"]
ANGLE_OF = {"01": "a", "23": "a", "02": "b", "13": "b", "03": "c", "12": "c"}


class TriangulationError(Exception):
    pass


class MalformedDocument(TriangulationError):
    pass


class InconsistentGluing(TriangulationError):
    pass


class Infeasible(TriangulationError):
    pass


def face_vertices(f: int) -> tuple:
    return tuple(v for v in range(4) if v != f)


def face_edges(f: int) -> list[str]:
    v = face_vertices(f)
    return [f"{v[0]}{v[1]}", f"{v[0]}{v[2]}", f"{v[1]}{v[2]}"]


def parse_rational(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if isinstance(s, str):
        try:
            return Fraction(s)
        except ValueError as exc:
            raise MalformedDocument(f"bad rational {s!r}") from exc
    raise MalformedDocument(f"bad rational {s!r}")


@dataclass(frozen=True)
class TetRecord:
    id: int
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise MalformedDocument(f"tetrahedron {self.id}: sign must be +1 or -1")


@dataclass(frozen=True)
class FaceGluing:
    tet_a: int
    face_a: int
    tet_b: int
    face_b: int


@dataclass(frozen=True)
class Shape:
    a: Fraction
    b: Fraction
    c: Fraction

    def angle(self, which: str):
        return {"a": self.a, "b": self.b, "c": self.c}[which]


@dataclass
class PseudoManifold:
    name: str
    tets: list
    gluings: list
    edge_classes: list = field(default_factory=list)
    boundary_faces: list = field(default_factory=list)
    labels: list = field(default_factory=list)
    knot_edge: str | None = None
    shapes: dict = field(default_factory=dict)
    printed_edges: dict = field(default_factory=dict)

    def __post_init__(self):
        ids = [t.id for t in self.tets]
        if len(set(ids)) != len(ids):
            raise MalformedDocument("duplicate tetrahedron id")
        self._sign = {t.id: t.sign for t in self.tets}
        used = set()
        for g in self.gluings:
            for t, f in ((g.tet_a, g.face_a), (g.tet_b, g.face_b)):
                if t not in self._sign or f not in range(4):
                    raise MalformedDocument(f"gluing refers to unknown face ({t}, {f})")
                if (t, f) in used:
                    raise InconsistentGluing(f"face ({t}, {f}) glued twice")
                used.add((t, f))
        self.boundary_faces = [(t.id, f) for t in self.tets for f in range(4) if (t.id, f) not in used]
        self.edge_classes = _close(self.tets, self.gluings)
        self._class_index = {inc: i for i, cls in enumerate(self.edge_classes) for inc in cls}
        if not self.labels:
            self.labels = [f"e{i}" for i in range(len(self.edge_classes))]

    # -- queries
    def sign(self, tet: int) -> int:
        return self._sign[tet]

    def class_of(self, tet: int, edge: str) -> int:
        return self._class_index[(tet, edge)]

    def label_of(self, tet: int, edge: str) -> str:
        return self.labels[self.class_of(tet, edge)]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError as exc:
            raise KeyError(f"no edge labelled {label!r}") from exc

    def degree(self, e) -> int:
        return len(self.edge_classes[self._idx(e)])

    def boundary_edges(self) -> set:
        out = set()
        for t, f in self.boundary_faces:
            for e in face_edges(f):
                out.add(self.class_of(t, e))
        return out

    def internal_edges(self) -> list:
        bd = self.boundary_edges()
        return [i for i in range(len(self.edge_classes)) if i not in bd]

    def weight_form(self, e) -> dict:
        """Symbolic weight: {(tet, angle letter): multiplicity}."""
        out: dict = {}
        for t, name in sorted(self.edge_classes[self._idx(e)]):
            key = (t, ANGLE_OF[name])
            out[key] = out.get(key, 0) + 1
        return out

    def weight_string(self, e) -> str:
        form = self.weight_form(e)
        order = sorted(form, key=lambda k: (k[0], k[1]))
        parts = []
        for t, letter in order:
            n = form[(t, letter)]
            parts.append((f"{n}" if n > 1 else "") + f"{letter}{t}")
        return "+".join(parts)

    def _idx(self, e) -> int:
        return self.index(e) if isinstance(e, str) else int(e)

    def printed_discrepancies(self) -> list[str]:
        """Differences between the derived classes and the transcribed incidence lists."""
        out = []
        for label, incs in self.printed_edges.items():
            printed = [(int(t), str(n)) for t, n in incs]
            seen = set()
            for inc in printed:
                if inc in seen:
                    out.append(f"{label}: incidence {inc} listed twice")
                seen.add(inc)
                if inc not in self._class_index:
                    out.append(f"{label}: unknown incidence {inc}")
                elif self.labels[self._class_index[inc]] != label:
                    out.append(f"{label}: incidence {inc} belongs to {self.label_of(*inc)}")
            if label in self.labels:
                derived = self.edge_classes[self.index(label)]
                for inc in sorted(derived - seen):
                    out.append(f"{label}: incidence {inc} missing from the printed list")
        return out


def _close(tets, gluings) -> list:
    ds = DisjointSet([(t.id, e) for t in tets for e in EDGE_NAMES])
    for g in gluings:
        for ea, eb in zip(face_edges(g.face_a), face_edges(g.face_b)):
            # face edges are listed in vertex order, so position k matches position k
            ds.merge((g.tet_a, ea), (g.tet_b, eb))
    classes = [frozenset(s) for s in ds.subsets()]
    # deterministic order: by smallest incidence
    return sorted(classes, key=lambda c: min(c))


def orientation_ok(M: PseudoManifold, g: FaceGluing) -> bool:
    return M.sign(g.tet_a) * (-1) ** g.face_a + M.sign(g.tet_b) * (-1) ** g.face_b == 0


# --------------------------------------------------------------- documents

def load_triangulation(doc) -> PseudoManifold:
    """Build a PseudoManifold from a JSON string, a path or a parsed dict."""
    if isinstance(doc, Path):
        doc = doc.read_text(encoding="utf-8")
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(str(exc)) from exc
    if not isinstance(doc, dict) or "tets" not in doc or "gluings" not in doc:
        raise MalformedDocument("document needs 'tets' and 'gluings'")
    try:
        tets = [TetRecord(int(t["id"]), int(t["sign"])) for t in doc["tets"]]
        gluings = [FaceGluing(int(a[0]), int(a[1]), int(b[0]), int(b[1])) for a, b in doc["gluings"]]
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise MalformedDocument(f"bad tets/gluings entry: {exc}") from exc
    shapes = {}
    for k, v in doc.get("shapes", {}).items():
        try:
            shapes[int(k)] = Shape(parse_rational(v["a"]), parse_rational(v["b"]), parse_rational(v["c"]))
        except (KeyError, TypeError) as exc:
            raise MalformedDocument(f"bad shape for tetrahedron {k}") from exc
    M = PseudoManifold(doc.get("name", "unnamed"), tets, gluings, shapes=shapes,
                       knot_edge=doc.get("knot_edge"),
                       printed_edges=doc.get("printed_edges", {}))
    names = doc.get("edge_names")
    if names:
        labels = list(M.labels)
        for label, (t, e) in names.items():
            labels[M.class_of(int(t), str(e))] = label
        if len(set(labels)) != len(labels):
            raise MalformedDocument("edge_names do not separate the edge classes")
        M.labels = labels
    for g in gluings:
        if not orientation_ok(M, g):
            raise InconsistentGluing(f"gluing {g} does not reverse orientation")
    if M.knot_edge is not None and M.knot_edge not in M.labels:
        raise MalformedDocument(f"knot edge {M.knot_edge!r} is not a labelled edge")
    return M


CORPUS_DIR = Path(__file__).with_name("corpus")


def corpus_dir() -> Path:
    import os
    env = os.environ.get("TQFT_CORPUS_DIR")
    return Path(env) if env else CORPUS_DIR


def corpus_names(directory: Path | None = None) -> list[str]:
    d = directory or corpus_dir()
    return sorted(p.stem for p in d.glob("*.json"))


def load_corpus(name: str, directory: Path | None = None) -> PseudoManifold:
    d = directory or corpus_dir()
    path = d / f"{name}.json"
    if not path.exists():
        raise MalformedDocument(f"no corpus entry {name!r} in {d}")
    return load_triangulation(path)


# ----------------------------------------------------------------- weights

def weight(M: PseudoManifold, shapes: dict, e) -> Fraction:
    total = Fraction(0)
    for (t, letter), n in M.weight_form(e).items():
        total += n * shapes[t].angle(letter)
    return total


# --------------------------------------------------------- exact algebra

def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals; returns (rows, pivot columns)."""
    A = [list(map(Fraction, r)) for r in rows]
    if not A:
        return [], []
    n = len(A[0])
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(A)) if A[i][col] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][col]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(col)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def _maximin(p: list[Fraction], N: list[list[Fraction]], fixed: set[int] = frozenset()):
    """Exact simplex: maximise t subject to p + N y >= t componentwise.

    Returns (t, y). Coordinates in `fixed` are left out of the margin.
    Variables y are free; they are split as y = u - v with u, v >= 0.
    """
    n = len(p)
    k = len(N[0]) if N else 0
    idx = [i for i in range(n) if i not in fixed]
    # columns: u_1..u_k, v_1..v_k, t+ , slack_i ; maximise t with t <= cap
    # constraint i: -N_i u + N_i v + t + s_i = p_i
    cap = Fraction(1)
    ncol = 2 * k + 1 + len(idx) + 1
    tab = []
    for row, i in enumerate(idx):
        line = [-N[i][j] for j in range(k)] + [N[i][j] for j in range(k)] + [Fraction(1)]
        line += [Fraction(1) if r == row else Fraction(0) for r in range(len(idx))] + [Fraction(0)]
        tab.append(line + [p[i]])
    # cap row t + s = 1 keeps the problem bounded
    tab.append([Fraction(0)] * (2 * k) + [Fraction(1)] + [Fraction(0)] * len(idx) + [Fraction(1), cap])
    basis = [2 * k + 1 + r for r in range(len(idx))] + [ncol - 1]
    # phase one: p may have negative entries; use big-M style artificial shift
    shift = -min([p[i] for i in idx] + [Fraction(0)]) + 1
    # substitute t = t' - shift so rhs p_i + shift >= 1 > 0
    for r in range(len(idx)):
        tab[r][-1] = tab[r][-1] + shift
    tab[-1][-1] = cap + shift
    obj = [Fraction(0)] * (2 * k) + [Fraction(-1)] + [Fraction(0)] * (len(idx) + 1) + [Fraction(0)]
    while True:
        col = next((j for j in range(ncol) if obj[j] < 0), None)  # Bland
        if col is None:
            break
        best = None
        for r, line in enumerate(tab):
            if line[col] > 0:
                ratio = line[-1] / line[col]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            raise Infeasible("unbounded margin")
        r = best[1]
        pv = tab[r][col]
        tab[r] = [x / pv for x in tab[r]]
        for i in range(len(tab)):
            if i != r and tab[i][col] != 0:
                f = tab[i][col]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[r])]
        if obj[col] != 0:
            f = obj[col]
            obj = [x - f * y for x, y in zip(obj, tab[r])]
        basis[r] = col
    val = {b: tab[r][-1] for r, b in enumerate(basis)}
    y = [val.get(j, Fraction(0)) - val.get(k + j, Fraction(0)) for j in range(k)]
    t = val.get(2 * k, Fraction(0)) - shift
    return t, y


@dataclass
class BalanceSolution:
    variables: list            # [(tet, letter)]
    equations: list            # rows [coeffs..., rhs]
    reduced: list              # rref rows
    pivots: list
    particular: list           # one exact solution
    nullspace: list            # basis vectors
    sample: list               # strictly positive exact point (max-min margin)
    margin: Fraction
    knot_edge: str | None = None
    knot_form: dict | None = None

    def value(self, tet, letter) -> Fraction:
        return self.sample[self.variables.index((tet, letter))]

    def shapes(self) -> dict:
        return {t: Shape(self.value(t, "a"), self.value(t, "b"), self.value(t, "c"))
                for t in sorted({v[0] for v in self.variables})}

    def satisfies(self, point) -> bool:
        for row in self.equations:
            if sum(c * x for c, x in zip(row[:-1], point)) != row[-1]:
                return False
        return True

    def same_space(self, rows) -> bool:
        """True when `rows` (with rhs) cut out exactly the same affine set."""
        other, piv = rref(rows)
        return piv == self.pivots and other == self.reduced


def _row_for_form(form: dict, variables: list, rhs) -> list:
    row = [Fraction(0)] * (len(variables) + 1)
    for key, n in form.items():
        row[variables.index(key)] += n
    row[-1] = Fraction(rhs)
    return row


def solve_balanced(M: PseudoManifold, knot_edge: str | None = None) -> BalanceSolution:
    """Angle structures balancing every internal edge except the knot edge."""
    variables = [(t.id, x) for t in M.tets for x in "abc"]
    eqs = []
    for t in M.tets:
        eqs.append(_row_for_form({(t.id, x): 1 for x in "abc"}, variables, Fraction(1, 2)))
    skip = M.index(knot_edge) if knot_edge is not None else None
    for e in M.internal_edges():
        if e == skip:
            continue
        eqs.append(_row_for_form(M.weight_form(e), variables, 1))
    red, piv = rref(eqs)
    if any(all(x == 0 for x in r[:-1]) and r[-1] != 0 for r in red):
        raise Infeasible("balancing equations are inconsistent")
    n = len(variables)
    particular = [Fraction(0)] * n
    for r, c in zip(red, piv):
        particular[c] = r[-1]
    free = [j for j in range(n) if j not in piv]
    null = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, c in zip(red, piv):
            v[c] = -r[f]
        null.append(v)
    N = [[null[j][i] for j in range(len(null))] for i in range(n)]
    # with every other edge balanced the knot weight is forced to 0, so the
    # angles it carries may degenerate; they are left out of the margin
    fixed = set()
    if skip is not None:
        fixed = {variables.index(k) for k in M.weight_form(skip)}
    if null:
        margin, y = _maximin(particular, N, fixed)
        sample = [particular[i] + sum(N[i][j] * y[j] for j in range(len(null))) for i in range(n)]
    else:
        sample = particular
        margin = min(x for i, x in enumerate(particular) if i not in fixed)
    if margin <= 0 or any(sample[i] < 0 for i in fixed):
        raise Infeasible("no strictly positive angle structure")
    return BalanceSolution(variables, eqs, red, piv, particular, null, sample, margin,
                           knot_edge, M.weight_form(skip) if skip is not None else None)


def constraint_rows(M: PseudoManifold, relations: list[tuple[dict, object]]) -> list:
    """Rows for user-supplied linear relations {(tet, letter): coeff} = rhs, plus a+b+c = 1/2."""
    variables = [(t.id, x) for t in M.tets for x in "abc"]
    rows = [_row_for_form({(t.id, x): 1 for x in "abc"}, variables, Fraction(1, 2)) for t in M.tets]
    for form, rhs in relations:
        rows.append(_row_for_form(form, variables, rhs))
    return rows


def parse_relation(text: str) -> tuple[dict, Fraction]:
    """Parse 'a3 + a4 = a1 + a5' or '1/2 + b3 = a2' into ({(3,'a'): 1, ...}, rhs)."""
    lhs, rhs = text.replace(" ", "").split("=")
    form: dict = {}
    const = Fraction(0)
    for side, sgn in ((lhs, 1), (rhs, -1)):
        side = side.replace("-", "+-")
        for term in filter(None, side.split("+")):
            neg = term.startswith("-")
            term = term.lstrip("-")
            coeff = Fraction(-1 if neg else 1) * sgn
            num = ""
            while term and (term[0].isdigit() or term[0] == "/"):
                num += term[0]
                term = term[1:]
            if not term:
                const += coeff * Fraction(num)
                continue
            if num:
                coeff *= Fraction(num)
            letter, tet = term[0], int(term[1:])
            form[(tet, letter)] = form.get((tet, letter), 0) + coeff
    return {k: v for k, v in form.items() if v != 0}, -const


@dataclass
class ShapePath:
    """Straight line of angle structures base + eps * direction.

    At eps = 0 every edge but the knot is balanced and the knot carries
    weight 0. Because the weights always sum to the number of tetrahedra, a
    positive knot weight needs one more edge off balance; that is `slack`.
    """

    variables: list
    base: list
    direction: list
    knot_edge: str
    slack: str

    def at(self, eps) -> dict:
        eps = Fraction(eps)
        return {v: b + eps * d for v, b, d in zip(self.variables, self.base, self.direction)}

    def shapes(self, eps) -> dict:
        pt = self.at(eps)
        return {t: Shape(pt[(t, "a")], pt[(t, "b")], pt[(t, "c")])
                for t in sorted({v[0] for v in self.variables})}

    def positive_up_to(self) -> Fraction:
        """Largest eps keeping every non-knot angle positive (capped at 1)."""
        best = Fraction(1)
        for b, d in zip(self.base, self.direction):
            if d < 0 and b > 0:
                best = min(best, b / -d)
        return best


def knot_family_path(M: PseudoManifold, knot_edge: str, slack: str | None = None) -> ShapePath:
    """Path of shape structures degenerating onto the balanced one as eps -> 0.

    Along the path the knot edge has weight eps, `slack` has weight 1 - eps and
    every other edge stays balanced. The default slack is the non-knot edge of
    highest degree.
    """
    sol = solve_balanced(M, knot_edge)
    variables = sol.variables
    k = M.index(knot_edge)
    others = [e for e in M.internal_edges() if e != k]
    if slack is None:
        s = max(others, key=lambda e: (M.degree(e), -e))
    else:
        s = M.index(slack)
        if s not in others:
            raise TriangulationError(f"slack edge {slack!r} must be internal and not the knot")
    rows = [_row_for_form({(t.id, x): 1 for x in "abc"}, variables, 0) for t in M.tets]
    rows += [_row_for_form(M.weight_form(e), variables, 0) for e in others if e != s]
    rows.append(_row_for_form(M.weight_form(k), variables, 1))
    red, piv = rref(rows)
    if any(all(x == 0 for x in r[:-1]) and r[-1] != 0 for r in red):
        raise Infeasible("knot weight cannot move independently")
    direction = [Fraction(0)] * len(variables)
    for r, c in zip(red, piv):
        direction[c] = r[-1]
    return ShapePath(variables, list(sol.sample), direction, knot_edge, M.labels[s])


# ------------------------------------------------------ surface coordinates

def ptolemy_flip(a, b, c, d, e):
    """Length of the other diagonal after a flip: e e' = ac + bd."""
    for x in (a, b, c, d, e):
        if not x > 0:
            raise ValueError("lambda lengths must be positive")
    return (a * c + b * d) / e


def ratio_compose(kind: str, x, y):
    x1, x2 = x
    y1, y2 = y
    if min(x1, x2, y1, y2) <= 0 and kind == "star":
        raise ValueError("components must be positive")
    if kind == "dot":
        return (x1 * y1, x1 * y2 + x2)
    if kind == "star":
        d = x1 * y2 + x2
        return (x2 * y1 / d, y2 / d)
    raise ValueError(f"unknown kind {kind!r}")


def ratio_symplectic_defect(x, y) -> float:
    """Defect of the pullback of the log-area form under (x, y) -> (x.y, x*y).

    The form is sum_j dt1 ^ dt2 / (t1 t2) on each factor. The map preserves it
    exactly when the defect vanishes; the Jacobian is in closed form.
    """
    x1, x2 = x
    y1, y2 = y
    d = x1 * y2 + x2
    u1, u2 = x1 * y1, d
    v1, v2 = x2 * y1 / d, y2 / d
    # partial derivatives with respect to (x1, x2, y1, y2)
    du1 = [y1, 0, x1, 0]
    du2 = [y2, 1, 0, x1]
    dv1 = [-x2 * y1 * y2 / d ** 2, y1 / d - x2 * y1 / d ** 2, x2 / d, -x2 * y1 * x1 / d ** 2]
    dv2 = [-y2 * y2 / d ** 2, -y2 / d ** 2, 0, 1 / d - y2 * x1 / d ** 2]

    def wedge(f, g, i, j):
        return f[i] * g[j] - f[j] * g[i]

    defect = 0.0
    for i, j in combinations(range(4), 2):
        pulled = wedge(du1, du2, i, j) / (u1 * u2) + wedge(dv1, dv2, i, j) / (v1 * v2)
        src = 0.0
        if (i, j) == (0, 1):
            src = 1 / (x1 * x2)
        if (i, j) == (2, 3):
            src = 1 / (y1 * y2)
        defect = max(defect, abs(pulled - src))
    return defect
