"""Linear complementarity instances and complementary pivoting.

The module works in the convention ``s := q + M y + z*1``: find ``y >= 0``
with slack ``s >= 0``, ``y_i s_i = 0``, where ``z`` is the covering variable
driven to zero by the pivoting path.  The positive-principal-minor property
of the stored ``M`` is what makes ``z`` strictly decrease along that path.

Vertices of the augmented polytope carry their coordinates exactly.  The
optional lexicographic mode runs the same pivot rules on a symbolically
perturbed right-hand side ``q_i + eps^i``, where every coordinate becomes a
short tuple of rationals ordered lexicographically; exact ties then cannot
occur, and the answer is read off at ``eps = 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

from .errors import (
    DegeneracyError,
    DimensionError,
    InvariantViolationError,
    ParseError,
    PreconditionError,
)
from .qlinalg import (
    Q,
    QMatrix,
    QVector,
    data_lines,
    format_rational,
    principal_minor,
    rational,
    solve_columns,
)

FORWARD = "forward"
BACKWARD = "backward"

# A coordinate is a tuple of rationals compared lexicographically: plain mode
# uses 1-tuples, perturbed mode uses (d+1)-tuples (constant term first).
Coord = tuple[Fraction, ...]


# ----------------------------------------------------------------------------
# instances and outcomes


@dataclass(frozen=True)
class LcpInstance:
    """Matrix-vector pair (M, q) with dimension d."""

    m: QMatrix
    q: QVector

    def __post_init__(self):
        if not self.m.is_square:
            raise DimensionError("M must be square")
        if len(self.q) != self.m.rows:
            raise DimensionError("q length must match M")
        if self.m.rows < 1:
            raise DimensionError("dimension must be at least 1")

    @property
    def d(self) -> int:
        return self.m.rows

    def slack(self, y: QVector) -> QVector:
        """s = q + M y."""
        return self.q + self.m.apply(y)


@dataclass(frozen=True)
class Q1:
    """A solution vector for the instance."""

    y: QVector


@dataclass(frozen=True)
class Q2:
    """A non-positive principal minor witness: 1-based index set plus its minor."""

    index_set: frozenset[int]
    minor: Fraction


LcpOutcome = Union[Q1, Q2]


@dataclass(frozen=True)
class LemkeVertex:
    """A fully labeled vertex of the augmented polytope.

    ``tight`` holds constraint names ("y3", "s1", "z"); ``dup_label`` is the
    1-based index at which both y and s are tight, or None at a z=0 vertex.
    """

    y: QVector
    s: QVector
    z: Fraction
    tight: frozenset[str]
    dup_label: Optional[int]


@dataclass(frozen=True)
class Ray:
    """An unbounded edge direction; no constraint blocks the pivot."""

    dir_y: QVector
    dir_s: QVector
    dir_z: Fraction


@dataclass(frozen=True)
class LemkeResult:
    outcome: LcpOutcome
    trace: tuple[LemkeVertex, ...]


# ----------------------------------------------------------------------------
# variable-id helpers: 0..d-1 = y, d..2d-1 = s, 2d = z


def _var_name(var: int, d: int) -> str:
    if var < d:
        return f"y{var + 1}"
    if var < 2 * d:
        return f"s{var - d + 1}"
    return "z"


def _parse_var(name: str, d: int) -> int:
    name = name.strip()
    if name == "z":
        return 2 * d
    kind, idx = name[0], name[1:]
    if kind in ("y", "s") and idx.isdigit() and 1 <= int(idx) <= d:
        return (0 if kind == "y" else d) + int(idx) - 1
    raise PreconditionError(f"unknown variable {name!r} for dimension {d}")


# lexicographic coordinate helpers


def _c_add(a: Coord, b: Coord) -> Coord:
    return tuple(x + y for x, y in zip(a, b))


def _c_scale(a: Coord, c: Fraction) -> Coord:
    return tuple(c * x for x in a)


def _c_zero(width: int) -> Coord:
    return (Q(0),) * width


def _c_is_zero(a: Coord) -> bool:
    return all(x == 0 for x in a)


def _c_neg(a: Coord) -> Coord:
    return tuple(-x for x in a)


# ----------------------------------------------------------------------------
# tight-system machinery


def _equality_rows(inst: LcpInstance) -> list[tuple[Fraction, ...]]:
    """Rows of ``-M y + s - z 1 = q`` over variables (y, s, z)."""
    d = inst.d
    rows = []
    for i in range(d):
        row = [-inst.m[i, j] for j in range(d)]
        row += [Q(1) if j == i else Q(0) for j in range(d)]
        row.append(Q(-1))
        rows.append(tuple(row))
    return rows


def _unit_row(var: int, width: int) -> tuple[Fraction, ...]:
    return tuple(Q(1) if j == var else Q(0) for j in range(width))


def _tight_system(inst: LcpInstance, tight: frozenset[int]) -> QMatrix:
    """Equality rows followed by tight-bound unit rows sorted by variable index."""
    width = 2 * inst.d + 1
    rows = _equality_rows(inst)
    rows.extend(_unit_row(v, width) for v in sorted(tight))
    return QMatrix(tuple(rows))


def _rhs_columns(inst: LcpInstance, tight_count: int, perturbed: bool) -> list[tuple[Fraction, ...]]:
    """Right-hand side columns [q;0], plus one unit column per eps power if perturbed."""
    d = inst.d
    cols = [tuple(inst.q) + (Q(0),) * tight_count]
    if perturbed:
        for k in range(d):
            cols.append(tuple(Q(1) if i == k else Q(0) for i in range(d)) + (Q(0),) * tight_count)
    return cols


def _coords_from_tight(inst: LcpInstance, tight: frozenset[int], perturbed: bool) -> Optional[list[Coord]]:
    """Solve the tight system; coordinates per variable, or None if singular."""
    if len(tight) != inst.d + 1:
        raise InvariantViolationError("tight set must have d+1 members")
    a = _tight_system(inst, tight)
    cols = solve_columns(a, _rhs_columns(inst, len(tight), perturbed))
    if cols is None:
        return None
    width = 2 * inst.d + 1
    return [tuple(col[i] for col in cols) for i in range(width)]


def _direction(inst: LcpInstance, tight: frozenset[int], entering: int) -> list[Fraction]:
    """Edge direction when ``entering`` leaves the tight set, normalized to 1."""
    width = 2 * inst.d + 1
    rows = _equality_rows(inst)
    rows.extend(_unit_row(v, width) for v in sorted(tight) if v != entering)
    rows.append(_unit_row(entering, width))
    rhs = (Q(0),) * (width - 1) + (Q(1),)
    cols = solve_columns(QMatrix(tuple(rows)), [rhs])
    if cols is None:
        raise InvariantViolationError("edge direction undefined; vertex is degenerate")
    return cols[0]


@dataclass(frozen=True)
class _State:
    """Internal pivot state: exact coordinates plus the tight set."""

    coords: tuple[Coord, ...]
    tight: frozenset[int]

    def zvalue(self) -> Coord:
        return self.coords[-1]


def _dup_of_tight(tight: frozenset[int], d: int) -> Optional[int]:
    dups = [i for i in range(d) if i in tight and d + i in tight]
    if len(dups) > 1:
        raise DegeneracyError(
            "more than one duplicate label", ties=tuple(i + 1 for i in dups)
        )
    return dups[0] + 1 if dups else None


def _vertex_of_state(inst: LcpInstance, state: _State) -> LemkeVertex:
    d = inst.d
    vals = [c[0] for c in state.coords]
    return LemkeVertex(
        y=QVector(tuple(vals[:d])),
        s=QVector(tuple(vals[d : 2 * d])),
        z=vals[2 * d],
        tight=frozenset(_var_name(v, d) for v in state.tight),
        dup_label=_dup_of_tight(state.tight, d),
    )


def _state_of_vertex(inst: LcpInstance, v: LemkeVertex) -> _State:
    d = inst.d
    coords = [(x,) for x in v.y] + [(x,) for x in v.s] + [(v.z,)]
    tight = frozenset(_parse_var(name, d) for name in v.tight)
    return _State(tuple(coords), tight)


def _pivot_state(
    inst: LcpInstance, state: _State, entering: int
) -> Union[Ray, tuple[_State, int]]:
    """Minimum-ratio pivot relaxing ``entering``; returns Ray or (state, blocker)."""
    d = inst.d
    width = 2 * d + 1
    if entering not in state.tight:
        raise PreconditionError(f"{_var_name(entering, d)} is not tight at this vertex")
    sigma = _direction(inst, state.tight, entering)
    best_t: Optional[Coord] = None
    best_j: list[int] = []
    for j in range(width):
        if j in state.tight or sigma[j] >= 0:
            continue
        t = _c_scale(state.coords[j], Q(-1) / sigma[j])
        if best_t is None or t < best_t:
            best_t, best_j = t, [j]
        elif t == best_t:
            best_j.append(j)
    if best_t is None:
        return Ray(
            dir_y=QVector(tuple(sigma[:d])),
            dir_s=QVector(tuple(sigma[d : 2 * d])),
            dir_z=sigma[2 * d],
        )
    if len(best_j) > 1:
        names = tuple(_var_name(j, d) for j in best_j)
        raise DegeneracyError(f"ratio-test tie between {', '.join(names)}", ties=names)
    blocker = best_j[0]
    wcount = len(state.coords[0])
    new_coords = []
    for j in range(width):
        if j == blocker or (j in state.tight and j != entering):
            new_coords.append(_c_zero(wcount))
        else:
            new_coords.append(_c_add(state.coords[j], _c_scale(best_t, sigma[j])))
    new_tight = (state.tight - {entering}) | {blocker}
    return _State(tuple(new_coords), new_tight), blocker


def _start_state(inst: LcpInstance, perturbed: bool) -> _State:
    """The vertex where y = 0, z = |min q| and the minimal slack is tight."""
    d = inst.d
    width = d + 1 if perturbed else 1
    qs: list[Coord] = []
    for i in range(d):
        c = [Q(0)] * width
        c[0] = inst.q[i]
        if perturbed:
            c[i + 1] = Q(1)
        qs.append(tuple(c))
    if min(x[0] for x in qs) >= 0:
        raise PreconditionError("q >= 0: y = 0 solves the instance directly")
    if not perturbed:
        low = min(qs)
        ties = [i for i in range(d) if qs[i] == low]
        if len(ties) > 1:
            raise DegeneracyError(
                "tied minimum in q at indices " + ", ".join(str(i + 1) for i in ties),
                ties=tuple(i + 1 for i in ties),
            )
    argmin = min(range(d), key=lambda i: qs[i])
    z0 = _c_neg(qs[argmin])
    coords = [_c_zero(width) for _ in range(d)]
    coords += [_c_add(qs[i], z0) if i != argmin else _c_zero(width) for i in range(d)]
    coords.append(z0)
    tight = frozenset(range(d)) | {d + argmin}
    return _State(tuple(coords), tight)


# ----------------------------------------------------------------------------
# public operations


@dataclass(frozen=True)
class LcpSolutionReport:
    """Per-constraint verification outcome; indices are 1-based."""

    ok: bool
    y_negative: tuple[int, ...]
    s_negative: tuple[int, ...]
    not_complementary: tuple[int, ...]
    slack: QVector

    def __bool__(self) -> bool:
        return self.ok


def verify_lcp_solution(inst: LcpInstance, y: QVector) -> LcpSolutionReport:
    """Check y >= 0, q + M y >= 0, and exact componentwise complementarity."""
    if len(y) != inst.d:
        raise DimensionError("candidate length must be d")
    s = inst.slack(y)
    y_neg = tuple(i + 1 for i in range(inst.d) if y[i] < 0)
    s_neg = tuple(i + 1 for i in range(inst.d) if s[i] < 0)
    comp = tuple(i + 1 for i in range(inst.d) if y[i] * s[i] != 0)
    return LcpSolutionReport(
        ok=not (y_neg or s_neg or comp),
        y_negative=y_neg,
        s_negative=s_neg,
        not_complementary=comp,
        slack=s,
    )


def _subsets_lex(d: int):
    """Nonempty subsets of 1..d in lexicographic order of their sorted tuples."""
    return sorted(
        (tuple(c) for r in range(1, d + 1) for c in itertools.combinations(range(1, d + 1), r))
    )


def p_matrix_witness(m: QMatrix) -> Optional[Q2]:
    """The lexicographically smallest index set with a non-positive minor, if any."""
    if not m.is_square:
        raise DimensionError("P-matrix test needs a square matrix")
    for subset in _subsets_lex(m.rows):
        value = principal_minor(m, subset)
        if value <= 0:
            return Q2(frozenset(subset), value)
    return None


def is_p_matrix(m: QMatrix) -> bool:
    """True iff every principal minor is strictly positive."""
    # cheap rejection: 1x1 minors are the diagonal
    if any(m[i, i] <= 0 for i in range(m.rows)):
        return False
    return p_matrix_witness(m) is None


def lemke_start(inst: LcpInstance) -> LemkeVertex:
    """Start vertex: y = 0, z = |min q|, s = q + z*1."""
    return _vertex_of_state(inst, _start_state(inst, perturbed=False))


def lemke_pivot(inst: LcpInstance, v: LemkeVertex, entering: str) -> Union[LemkeVertex, Ray]:
    """Move to the adjacent vertex along the edge that relaxes ``entering``."""
    state = _state_of_vertex(inst, v)
    result = _pivot_state(inst, state, _parse_var(entering, inst.d))
    if isinstance(result, Ray):
        return result
    return _vertex_of_state(inst, result[0])


def duplicate_label(v: LemkeVertex) -> Optional[int]:
    """The unique 1-based l with y_l = s_l = 0, or None at a z = 0 solution vertex."""
    dups = [i + 1 for i in range(len(v.y)) if v.y[i] == 0 and v.s[i] == 0]
    if len(dups) > 1:
        raise DegeneracyError("two duplicate labels", ties=tuple(dups))
    return dups[0] if dups else None


# orientation: compare the edge direction lexicographically on (z, y, s).
# The label flips across an edge because the far endpoint sees the negated
# direction, and it is calibrated so the start vertex's pivot edge reads
# forward.


def _raw_sign(sigma: Sequence[Fraction], d: int) -> int:
    order = [2 * d] + list(range(2 * d))
    for var in order:
        if sigma[var] != 0:
            return 1 if sigma[var] < 0 else -1
    raise InvariantViolationError("zero edge direction")


@lru_cache(maxsize=None)
def _orientation_calibration(inst: LcpInstance) -> int:
    state = _start_state(inst, perturbed=False)
    dup = _dup_of_tight(state.tight, inst.d)
    if dup is None:
        raise InvariantViolationError("start vertex has no duplicate label")
    sigma = _direction(inst, state.tight, dup - 1)
    return _raw_sign(sigma, inst.d)


def _oriented_forward(inst: LcpInstance, tight: frozenset[int], entering: int) -> bool:
    sigma = _direction(inst, tight, entering)
    return _raw_sign(sigma, inst.d) * _orientation_calibration(inst) == 1


def todd_orientation(inst: LcpInstance, v: LemkeVertex, entering: str) -> str:
    """Direction label of the edge that relaxes ``entering`` at v."""
    state = _state_of_vertex(inst, v)
    var = _parse_var(entering, inst.d)
    if var not in state.tight:
        raise PreconditionError(f"{entering} is not tight at this vertex")
    return FORWARD if _oriented_forward(inst, state.tight, var) else BACKWARD


def q2_witness_at(inst: LcpInstance, y: QVector) -> Q2:
    """Witness extraction: try the support of y, then search all index sets."""
    support = frozenset(i + 1 for i in range(inst.d) if y[i] > 0)
    if support:
        value = principal_minor(inst.m, support)
        if value <= 0:
            return Q2(support, value)
    witness = p_matrix_witness(inst.m)
    if witness is None:
        raise InvariantViolationError("no non-positive principal minor exists")
    return witness


def lemke_solve(
    inst: LcpInstance, *, lexicographic: bool = False, budget: Optional[int] = None
) -> LemkeResult:
    """Complementary pivoting from the covering-variable start vertex.

    Returns Q1(y) when z reaches zero, or a verified Q2 witness when a
    secondary ray is hit or z fails to strictly decrease at some pivot.
    """
    d = inst.d
    if budget is None:
        budget = 2 ** (2 * d) + 1
    if all(x >= 0 for x in inst.q):
        return LemkeResult(Q1(QVector.zero(d)), ())

    state = _start_state(inst, perturbed=lexicographic)
    trace = [_vertex_of_state(inst, state)]
    dup = _dup_of_tight(state.tight, d)
    entering = dup - 1  # relax y at the duplicate label first

    while True:
        if len(trace) > budget:
            raise InvariantViolationError(f"pivot budget {budget} exceeded; cycling bug")
        result = _pivot_state(inst, state, entering)
        if isinstance(result, Ray):
            outcome = q2_witness_at(inst, trace[-1].y)
            return LemkeResult(outcome, tuple(trace))
        nstate, blocker = result
        if not nstate.zvalue() < state.zvalue():
            outcome = q2_witness_at(inst, trace[-1].y)
            return LemkeResult(outcome, tuple(trace))
        trace.append(_vertex_of_state(inst, nstate))
        if blocker == 2 * d:
            y = trace[-1].y
            if not verify_lcp_solution(inst, y):
                raise InvariantViolationError("pivoting produced an infeasible answer")
            return LemkeResult(Q1(y), tuple(trace))
        entering = blocker + d if blocker < d else blocker - d
        state = nstate


def brute_force_lcp(inst: LcpInstance) -> list[QVector]:
    """All solutions found by enumerating the 2^d complementary bases."""
    d = inst.d
    found: list[QVector] = []
    for bits in itertools.product((0, 1), repeat=d):
        alpha = [i for i in range(d) if bits[i]]
        y_vals = [Q(0)] * d
        if alpha:
            sub = inst.m.submatrix(alpha, alpha)
            rhs = QVector(tuple(-inst.q[i] for i in alpha))
            sol = solve_columns(sub, [tuple(rhs)])
            if sol is None:
                continue
            for pos, i in enumerate(alpha):
                y_vals[i] = sol[0][pos]
        y = QVector(tuple(y_vals))
        if verify_lcp_solution(inst, y) and y not in found:
            found.append(y)
    return found


# ----------------------------------------------------------------------------
# file formats


def load_lcp(text: str, paper_sign: bool = False) -> LcpInstance:
    """Parse: line 1 is d, then d rows of M, then one row for q.

    ``paper_sign`` negates M on ingestion, for data written in the
    opposite-sign convention ``M y <= q``.
    """
    lines = data_lines(text)
    if not lines:
        raise ParseError("empty instance file")
    try:
        d = int(lines[0][1])
    except ValueError as exc:
        raise ParseError(f"line {lines[0][0]}: bad dimension {lines[0][1]!r}") from exc
    if d < 1 or len(lines) != d + 2:
        raise ParseError(f"expected {d + 2} data lines for d={d}, got {len(lines)}")
    rows = []
    for num, ln in lines[1 : d + 1]:
        try:
            row = [rational(tok) for tok in ln.split()]
        except ParseError as exc:
            raise ParseError(f"line {num}: {exc}") from exc
        if len(row) != d:
            raise ParseError(f"line {num}: matrix row has {len(row)} entries, want {d}")
        rows.append(row)
    q_num, q_line = lines[d + 1]
    try:
        q_row = [rational(tok) for tok in q_line.split()]
    except ParseError as exc:
        raise ParseError(f"line {q_num}: {exc}") from exc
    if len(q_row) != d:
        raise ParseError(f"line {q_num}: q has {len(q_row)} entries, want {d}")
    if paper_sign:
        rows = [[-a for a in row] for row in rows]
    return LcpInstance(QMatrix.of(rows), QVector.of(q_row))


def dump_lcp(inst: LcpInstance) -> str:
    lines = [str(inst.d)]
    lines += [" ".join(format_rational(a) for a in row) for row in inst.m.entries]
    lines.append(" ".join(format_rational(a) for a in inst.q))
    return "\n".join(lines) + "\n"


def format_outcome(outcome: LcpOutcome) -> str:
    if isinstance(outcome, Q1):
        return "Q1 " + " ".join(format_rational(a) for a in outcome.y)
    idx = ",".join(str(i) for i in sorted(outcome.index_set))
    return f"Q2 S={{{idx}}} minor={format_rational(outcome.minor)}"


def parse_outcome(line: str) -> LcpOutcome:
    parts = line.split()
    if not parts:
        raise ParseError("empty outcome line")
    if parts[0] == "Q1":
        return Q1(QVector.of(parts[1:]))
    if parts[0] == "Q2":
        fields = dict(p.split("=", 1) for p in parts[1:] if "=" in p)
        if "S" not in fields or "minor" not in fields:
            raise ParseError(f"malformed Q2 line: {line!r}")
        idx = frozenset(int(tok) for tok in fields["S"].strip("{}").split(",") if tok)
        return Q2(idx, rational(fields["minor"]))
    raise ParseError(f"unknown outcome tag {parts[0]!r}")
