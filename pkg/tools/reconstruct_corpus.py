"""Rebuild the shipped triangulation corpus from transcribed incidence data.

Only edge incidences and Boltzmann arguments are available in printed form,
so face pairings are recovered by exhaustive search: every orientation
reversing, order preserving pairing whose edge closure reproduces the given
classes is enumerated. The script fails if a document has no solution.

Run from the repository root:  python3 tools/reconstruct_corpus.py
"""
from __future__ import annotations

import json
import re
import sys
from itertools import product
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from tqft.triangulation import (EDGE_NAMES, FaceGluing, PseudoManifold,  # noqa: E402
                                TetRecord, face_edges)

OUT = Path(__file__).resolve().parents[1] / "src" / "tqft" / "corpus"
PAIRS = {"a": ("01", "23"), "b": ("02", "13"), "c": ("03", "12")}


def incidences(text: str) -> dict:
    """'x: 01^1 03^1 02^2' -> {'x': [[1, '01'], [1, '03'], [2, '02']]}"""
    out = {}
    for line in text.strip().splitlines():
        label, rest = line.split(":")
        out[label.strip()] = [[int(t), e] for e, t in re.findall(r"(\d\d)\^(\d+)", rest)]
    return out


def options_from_exact(printed: dict, tets: list) -> dict:
    lab = {}
    for label, incs in printed.items():
        for t, e in incs:
            lab.setdefault(t, {})[e] = label
    return {t: [lab[t]] for t in tets}


def _form(s: str) -> dict:
    out = {}
    for sg, v in re.findall(r"([+-]?)(x\d'?)", s.replace(" ", "")):
        out[v] = out.get(v, 0) + (-1 if sg == "-" else 1)
    return {k: v for k, v in out.items() if v}


def options_from_gargs(args: dict) -> dict:
    """Per-tet edge labels from g(x02+x13-x03-x12, x02+x13-x01-x23), up to swaps."""
    opts = {}
    for t, (s, tt) in args.items():
        S, T = _form(s), _form(tt)
        pairs = {
            "b": sorted(k for k, v in S.items() if v > 0),
            "c": sorted(k for k, v in S.items() if v < 0),
            "a": sorted(k for k, v in T.items() if v < 0),
        }
        for letter, p in pairs.items():
            if len(p) == 1:
                pairs[letter] = p * 2
            assert len(pairs[letter]) == 2, (t, letter, p)
        choices = []
        for flips in product((0, 1), repeat=3):
            d = {}
            for flip, letter in zip(flips, "abc"):
                l1, l2 = pairs[letter][::-1] if flip else pairs[letter]
                e1, e2 = PAIRS[letter]
                d[e1], d[e2] = l1, l2
            if d not in choices:
                choices.append(d)
        opts[t] = choices
    return opts


def search(signs: dict, options: dict, boundary_labels: set = frozenset(), limit: int = 50):
    tets = sorted(signs)
    labels = sorted({lab for t in tets for d in options[t] for lab in d.values()})
    found = []
    for pick in product(*(range(len(options[t])) for t in tets)):
        lab = {t: options[t][i] for t, i in zip(tets, pick)}
        faces = [(t, f) for t in tets for f in range(4)]
        triple = {(t, f): tuple(lab[t][e] for e in face_edges(f)) for t, f in faces}
        bfaces = [x for x in faces if boundary_labels and set(triple[x]) <= boundary_labels]
        for match in _matchings(faces, triple, signs, bfaces):
            M = PseudoManifold("tmp", [TetRecord(t, signs[t]) for t in tets], match)
            ok = True
            names = {}
            for cls in M.edge_classes:
                ls = {lab[t][e] for t, e in cls}
                if len(ls) != 1:
                    ok = False
                    break
                (name,) = ls
                if name in names:
                    ok = False  # one label split over two classes
                    break
                names[name] = cls
            if ok and set(names) == set(labels):
                found.append((match, lab))
                if len(found) >= limit:
                    return found
    return found


def _matchings(faces, triple, signs, bfaces):
    free = [x for x in faces]

    def rec(rem, acc, nb):
        if not rem:
            yield list(acc)
            return
        x = rem[0]
        t, f = x
        if x in bfaces and nb > 0:
            yield from rec(rem[1:], acc, nb - 1)
        for y in rem[1:]:
            u, g = y
            if triple[y] != triple[x]:
                continue
            if signs[t] * (-1) ** f + signs[u] * (-1) ** g != 0:
                continue
            acc.append(FaceGluing(t, f, u, g))
            rest = [z for z in rem[1:] if z != y]
            yield from rec(rest, acc, nb)
            acc.pop()

    yield from rec(free, [], len(bfaces))


def write(name, signs, gluings, lab, extra):
    tets = sorted(signs)
    names = {}
    for t in tets:
        for e in EDGE_NAMES:
            names.setdefault(lab[t][e], [t, e])
    doc = {
        "name": name,
        "tets": [{"id": t, "sign": signs[t]} for t in tets],
        "gluings": [[[g.tet_a, g.face_a], [g.tet_b, g.face_b]] for g in gluings],
        "edge_names": names,
    }
    doc.update(extra)
    OUT.mkdir(exist_ok=True)
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def build(name, signs, options, extra, boundary_labels=frozenset()):
    sols = search(signs, options, set(boundary_labels))
    if not sols:
        raise SystemExit(f"{name}: no gluing reproduces the edge data")
    gl, lab = sols[0]
    print(f"{name}: {len(sols)} solution(s){' (search capped)' if len(sols) >= 50 else ''}")
    write(name, signs, gl, lab, extra)


FIG8 = incidences("""
x: 01^1 03^1 23^1 02^2 12^2 13^2
y: 02^1 13^1 12^1 01^2 03^2 23^2
""")
# printed list repeats 23^2 inside y and omits 23^3; the Boltzmann weight of
# the third tetrahedron, g(0, x+z-x'-y), places 23^3 in y
FIG8_H_PRINTED = incidences("""
x: 01^1 03^1 02^2 02^3 03^3
y: 02^1 12^1 13^1 01^2 03^2 23^2 23^2
z: 23^1 12^2 13^2 12^3 13^3
x': 01^3
""")
FIG8_H = {k: [list(i) for i in v] for k, v in FIG8_H_PRINTED.items()}
FIG8_H["y"] = [[1, "02"], [1, "12"], [1, "13"], [2, "01"], [2, "03"], [2, "23"], [3, "23"]]
K52 = incidences("""
x: 02^1 12^1 13^2 23^2 01^3 23^3
y: 03^1 23^1 02^2 03^2 03^3 13^3 12^3
z: 01^1 13^1 01^2 12^2 02^3
""")
K52_H = incidences("""
x: 03^0 13^0 01^1 12^3 02^3
y: 03^1 12^1 13^1 02^2 03^2 03^3 23^3
z: 01^0 02^1 01^2 12^2 01^3 13^3
v: 02^0 12^0 23^1 13^2 23^2
x': 23^0
""")

# kernels <f0,f2|T|f1,f3> of the original formulation name the face states
K61_FACES = {1: ("w", "u", "t", "t"), 2: ("z", "v", "q", "u"), 3: ("x", "r", "q", "v"),
             4: ("s", "r", "y", "z"), 5: ("w", "y", "x", "s")}
K61_SIGNS = {1: -1, 2: 1, 3: -1, 4: 1, 5: 1}

XS_SIGNS = {1: 1, 2: -1, 3: 1, 4: 1, 5: -1, 6: 1}
XS_ARGS = {
    1: ("x7+x6-x4-x5", "x7+x6-x1'-x1"),
    2: ("x3'+x4-x1'-x7", "x3'+x4-x2'-x6"),
    3: ("x3'+x5-x2'-x7", "x3'+x5-x1'-x6"),
    4: ("x5+x4-x7-x6", "x5+x4-x2'-x2"),
    5: ("x7+x3-x4-x2", "x7+x3-x5-x1"),   # printed second argument garbled
    6: ("x6+x3-x4-x1", "x6+x3-x5-x2"),
}
XT_SIGNS = {1: -1, 2: 1, 3: 1, 4: -1, 5: -1, 6: 1}
XT_ARGS = {
    1: ("x5+x2'-x3'-x6", "x5+x2'-x1'-x4"),
    2: ("x3'+x2-x7-x4", "x3'+x2-x5-x6"),
    3: ("x5+x3-x7-x1", "x5+x3-x6-x2"),
    4: ("x3'+x5-x7-x1'", "x3'+x5-x2'-x6"),  # printed second argument has x3 for x3'
    5: ("x2'+x3-x7-x4", "x2'+x3-x6-x5"),
    6: ("x2+x5-x3-x6", "x2+x5-x4-x1"),
}
BOUNDARY = {"x1", "x2", "x3", "x1'", "x2'", "x3'"}


def main():
    build("4_1", {1: 1, 2: -1}, options_from_exact(FIG8, [1, 2]),
          {"printed_edges": FIG8, "knot": "4_1",
           "shapes": {"1": {"a": "1/6", "b": "1/6", "c": "1/6"},
                      "2": {"a": "1/6", "b": "1/6", "c": "1/6"}}})
    build("4_1_H", {1: 1, 2: -1, 3: 1}, options_from_exact(FIG8_H, [1, 2, 3]),
          {"printed_edges": FIG8_H_PRINTED, "knot": "4_1", "knot_edge": "x'"})
    build("5_2", {1: 1, 2: 1, 3: 1}, options_from_exact(K52, [1, 2, 3]),
          {"printed_edges": K52, "knot": "5_2"})
    build("5_2_H", {0: 1, 1: 1, 2: 1, 3: 1}, options_from_exact(K52_H, [0, 1, 2, 3]),
          {"printed_edges": K52_H, "knot": "5_2", "knot_edge": "x'"})

    # 6_1: gluings read directly from the face states
    where = {}
    for t, states in K61_FACES.items():
        for f, s in zip((0, 1, 2, 3), states):
            where.setdefault(s, []).append((t, f))
    gl = [FaceGluing(a[0], a[1], b[0], b[1]) for s, (a, b) in sorted(where.items())]
    M = PseudoManifold("6_1_H", [TetRecord(t, K61_SIGNS[t]) for t in sorted(K61_SIGNS)], gl)
    knot = [i for i, c in enumerate(M.edge_classes) if len(c) == 1]
    assert len(knot) == 1
    names = {"x'": list(min(M.edge_classes[knot[0]]))}
    for i, c in enumerate(M.edge_classes):
        if i != knot[0]:
            names[f"e{len(names)}"] = list(min(c))
    doc = {"name": "6_1_H", "tets": [{"id": t, "sign": K61_SIGNS[t]} for t in sorted(K61_SIGNS)],
           "gluings": [[[g.tet_a, g.face_a], [g.tet_b, g.face_b]] for g in gl],
           "edge_names": names, "knot": "6_1", "knot_edge": "x'",
           "face_states": {str(t): list(v) for t, v in K61_FACES.items()}}
    (OUT / "6_1_H.json").write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
    print(f"6_1_H: {len(M.edge_classes)} edge classes, degrees {[len(c) for c in M.edge_classes]}")

    build("X_S", XS_SIGNS, options_from_gargs(XS_ARGS),
          {"cobordism": "X_S"}, BOUNDARY)
    build("X_T", XT_SIGNS, options_from_gargs(XT_ARGS),
          {"cobordism": "X_T"}, BOUNDARY)


if __name__ == "__main__":
    main()
