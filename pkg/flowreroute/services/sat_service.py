import logging
from collections import Counter
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from ..errors.errors import (
    AssignmentDoesNotSatisfyError,
    CycleError,
    DimacsFormatError,
    InternalSolverError,
    MalformedScheduleError,
    NotThreeSatError,
    PreconditionError,
)
from ..models.generators import Assignment, CnfFormula, GadgetKind, GadgetMeta
from ..models.network import Edge, FlowPair, Schedule, Update, UpdateFlowNetwork, Vertex
from .block_service import BlockService
from .network_service import NetworkService

logger = logging.getLogger(__name__)

SOURCE = "s"
TERMINAL = "t"
BLUE = 1
RED = 2


def u(clause: int, position: int) -> Vertex:
    return f"u^{clause}_{position}"


def v(variable: int, position: int) -> Vertex:
    return f"v^{variable}_{position}"


class SatService:

    @classmethod
    def parse_dimacs(cls, text: str) -> CnfFormula:
        """
        Read a DIMACS CNF document whose clauses have at most three literals
        """
        header: Optional[Tuple[int, int]] = None
        clauses: List[List[int]] = []
        current: List[int] = []
        for number, line in enumerate(text.splitlines(), start=1):
            tokens = line.split()
            if not tokens or tokens[0] == "c":
                continue
            if tokens[0] == "%":
                break
            if tokens[0] == "p":
                if header is not None:
                    raise DimacsFormatError(f"line {number}: second problem line")
                if len(tokens) != 4 or tokens[1] != "cnf":
                    raise DimacsFormatError(f"line {number}: expected 'p cnf <variables> <clauses>'")
                try:
                    header = (int(tokens[2]), int(tokens[3]))
                except ValueError:
                    raise DimacsFormatError(f"line {number}: non-numeric problem line")
                continue
            if header is None:
                raise DimacsFormatError(f"line {number}: clause before the problem line")
            for token in tokens:
                try:
                    literal = int(token)
                except ValueError:
                    raise DimacsFormatError(f"line {number}: {token!r} is not a literal")
                if literal != 0:
                    current.append(literal)
                    continue
                literals = sorted(set(current), key=lambda lit: (abs(lit), lit))
                if len({abs(lit) for lit in literals}) != len(literals):
                    raise DimacsFormatError(f"line {number}: clause {current} holds a variable and its negation")
                if len(literals) > 3:
                    raise NotThreeSatError(f"line {number}: clause {current} has {len(literals)} literals")
                clauses.append(literals)
                current = []
        if header is None:
            raise DimacsFormatError("missing problem line")
        if current:
            raise DimacsFormatError(f"clause {current} is not terminated by 0")
        if len(clauses) != header[1]:
            logger.warning("problem line announces %d clause(s), found %d", header[1], len(clauses))
        try:
            return CnfFormula(num_vars=header[0], clauses=tuple(tuple(c) for c in clauses))
        except ValidationError as e:
            raise DimacsFormatError(e.errors()[0]["msg"])

    @classmethod
    def satisfying_assignments(cls, formula: CnfFormula) -> Iterator[Assignment]:
        for values in product((True, False), repeat=formula.num_vars):
            assignment = Assignment(values={i: value for i, value in enumerate(values, start=1)})
            if assignment.satisfies(formula):
                yield assignment

    @classmethod
    def _network(cls, pairs: Sequence[FlowPair], capacity: Dict[Tuple[Vertex, Vertex], int]) -> UpdateFlowNetwork:
        edges = tuple(Edge(tail=key[0], head=key[1], capacity=c) for key, c in sorted(capacity.items()))
        return UpdateFlowNetwork(source=SOURCE, terminal=TERMINAL, edges=edges, pairs=tuple(pairs))

    @classmethod
    def _clause_width(cls, formula: CnfFormula, clause: int) -> int:
        return len(formula.clauses[clause - 1])

    @classmethod
    def gen_2flow_sat(cls, formula: CnfFormula) -> Tuple[UpdateFlowNetwork, GadgetMeta]:
        """
        Two unit flows on capacity 1 edges that can be rerouted iff the formula is satisfiable
        """
        n, m = formula.num_vars, formula.m

        def occurrences(literal: int) -> List[Vertex]:
            # descending clause order keeps (u^i_8, u^(i+1)_1) off the blue old path
            path: List[Vertex] = []
            for clause in reversed(formula.occurrences(literal)):
                position = formula.position(clause, literal)
                path += [u(clause, position), u(clause, position + 5)]
            return path

        blue_old = [SOURCE, "w1", "w2"]
        blue_new = [SOURCE, "w1"]
        for clause in range(1, m + 1):
            blue_new += [u(clause, 4), u(clause, 5)]
        blue_new.append("w2")
        for j in range(1, n + 1):
            blue_old += [v(j, 1), *occurrences(j), v(j, 2), v(j, 3), *occurrences(-j), v(j, 4)]
            blue_new += [v(j, 1), v(j, 3), v(j, 2), v(j, 4)]
        blue_old.append(TERMINAL)
        blue_new.append(TERMINAL)

        red_old = [SOURCE, "z1"]
        for j in range(1, n + 1):
            red_old += [v(j, 3), v(j, 2)]
        red_old.append("z2")
        red_new = [SOURCE, "z1", "w1", "w2", "z2"]
        for clause in range(1, m + 1):
            red_old += [u(clause, p) for p in range(1, 9)]
            width = cls._clause_width(formula, clause)
            for p in range(1, width + 1):
                red_new += [u(clause, p), u(clause, p + 5)]
            red_new += [u(clause, p) for p in range(width + 6, 9)]
        red_old.append(TERMINAL)
        red_new.append(TERMINAL)

        pairs = [
            FlowPair(id=BLUE, demand=1, old_path=tuple(blue_old), new_path=tuple(blue_new)),
            FlowPair(id=RED, demand=1, old_path=tuple(red_old), new_path=tuple(red_new)),
        ]
        capacity = {key: 1 for pair in pairs for key in pair.old_edges + pair.new_edges}
        net = cls._network(pairs, capacity)

        names = {name: name for name in ("s", "t", "w1", "w2", "z1", "z2")}
        names.update({u(i, p): u(i, p) for i in range(1, m + 1) for p in range(1, 9)})
        names.update({v(j, k): v(j, k) for j in range(1, n + 1) for k in range(1, 5)})
        meta = GadgetMeta(
            kind=GadgetKind.TWO_FLOW,
            formula=formula,
            names=names,
            flows={"B": BLUE, "R": RED},
            notes=(
                "red update path leaves the source through z1->w1",
                "positive occurrences of a variable are visited in descending clause order",
            ),
        )
        logger.info("two-flow gadget: %d vertices, %d edges", len(net.vertices), len(net.edges))
        return net, meta

    @classmethod
    def _greedy(cls, net: UpdateFlowNetwork, steps: Sequence[Sequence[Update]]) -> List[Update]:
        effective = set(NetworkService.effective_updates(net).effective)
        state = NetworkService.initial_state(net)
        order: List[Update] = []
        for number, step in enumerate(steps, start=1):
            pending = [x for x in dict.fromkeys(step) if x in effective and x not in state.resolved]
            while pending:
                for candidate in pending:
                    following = NetworkService.resolve_update(state, candidate)
                    if NetworkService.is_consistent(following):
                        state = following
                        order.append(candidate)
                        pending.remove(candidate)
                        break
                else:
                    raise InternalSolverError(f"step {number} cannot place {[(x.vertex, x.pair) for x in pending]}")
        return order

    @classmethod
    def schedule_2flow(cls, formula: CnfFormula, assignment: Assignment) -> Schedule:
        """
        Witness schedule of the two-flow gadget built from a satisfying assignment
        """
        if not assignment.satisfies(formula):
            raise AssignmentDoesNotSatisfyError(f"assignment {assignment.values} does not satisfy the formula")
        net, _ = cls.gen_2flow_sat(formula)
        n, m = formula.num_vars, formula.m
        value = assignment.values
        effective = NetworkService.effective_updates(net).effective

        def blue(vertex: Vertex) -> Update:
            return Update(vertex=vertex, pair=BLUE)

        def red(vertex: Vertex) -> Update:
            return Update(vertex=vertex, pair=RED)

        skips = []
        for clause in range(1, m + 1):
            literals = formula.clauses[clause - 1]
            first = next(lit for lit in literals if value[abs(lit)] == (lit > 0))
            skips.append(red(u(clause, formula.position(clause, first))))

        steps = [
            [blue(v(j, 1)) if value[j] else blue(v(j, 2)) for j in range(1, n + 1)],
            skips,
            [blue(u(i, p)) for i in range(1, m + 1) for p in (4, 5)],
            [blue("w1")],
            [red("w1"), red("w2")],
            [red("z1")],
            [x for j in range(1, n + 1) for x in (
                (blue(v(j, 2)), blue(v(j, 3))) if value[j] else (blue(v(j, 3)), blue(v(j, 1)))
            )],
            [x for x in effective if x.pair == BLUE],
            [red(v(j, k)) for j in range(1, n + 1) for k in (3, 2)]
            + [red(u(i, p)) for i in range(1, m + 1) for p in range(1, cls._clause_width(formula, i) + 1)],
            [x for x in effective if x.pair == RED],
        ]
        schedule = Schedule(rounds=tuple(frozenset([x]) for x in cls._greedy(net, steps)))
        report = NetworkService.verify_schedule(net, schedule)
        if not report.ok:
            raise InternalSolverError(f"two-flow witness fails at round {report.round}")
        return schedule

    @classmethod
    def blocking_violations(cls, net: UpdateFlowNetwork, meta: GadgetMeta, updates: Sequence[Update]) -> List[str]:
        """
        Conditions that hold in every consistent state of the two-flow gadget before (w1,B) resolves:
        (z1,R) is unresolved, B passes every v^j_1 without using (v^j_3,v^j_2), B uses all positive
        or all negative occurrence edges of every variable, R passes z1 and every u^i_1.
        """
        formula = meta.formula
        blue, red = meta.flows["B"], meta.flows["R"]
        state = NetworkService.resolve_all(NetworkService.initial_state(net), updates)
        if Update(vertex=meta.names["w1"], pair=blue) in state.resolved:
            return []
        blue_path = NetworkService.transient_path(state, blue)
        red_path = NetworkService.transient_path(state, red)
        if not (blue_path.ok and red_path.ok):
            return ["prefix has no transient flow"]

        violations = []
        if Update(vertex=meta.names["z1"], pair=red) in state.resolved:
            violations.append("(z1,R) resolved before (w1,B)")
        blue_edges = set(blue_path.edges)
        for j in range(1, formula.num_vars + 1):
            if meta.names[v(j, 1)] not in blue_path.vertices:
                violations.append(f"B misses v^{j}_1")
            if (meta.names[v(j, 3)], meta.names[v(j, 2)]) in blue_edges:
                violations.append(f"B uses (v^{j}_3,v^{j}_2)")
            sides = []
            for literal in (j, -j):
                edges = []
                for clause in formula.occurrences(literal):
                    p = formula.position(clause, literal)
                    edges.append((meta.names[u(clause, p)], meta.names[u(clause, p + 5)]))
                sides.append(all(edge in blue_edges for edge in edges))
            if not any(sides):
                violations.append(f"B skips occurrences of both literals of x{j}")
        red_vertices = set(red_path.vertices)
        for name in ["z1"] + [u(i, 1) for i in range(1, formula.m + 1)]:
            if meta.names[name] not in red_vertices:
                violations.append(f"R misses {name}")
        return violations

    @classmethod
    def dag_pair_ids(cls, formula: CnfFormula) -> Dict[str, int]:
        n, m = formula.num_vars, formula.m
        flows = {f"S{i}": i for i in range(1, n + 1)}
        flows.update({f"C{j}": n + j for j in range(1, m + 1)})
        flows["V"] = n + m + 1
        flows.update({f"L{i}": n + m + 1 + i for i in range(1, n + 1)})
        flows.update({f"Lbar{i}": 2 * n + m + 1 + i for i in range(1, n + 1)})
        return flows

    @classmethod
    def gen_dag_sat(cls, formula: CnfFormula) -> Tuple[UpdateFlowNetwork, GadgetMeta]:
        """
        Acyclic k-flow gadget: selectors, clauses, one validator and two literal flows per variable
        """
        if not formula.clauses:
            raise PreconditionError("the DAG gadget needs at least one clause")
        n, m = formula.num_vars, formula.m
        flows = cls.dag_pair_ids(formula)
        P, Q = "C1o(3)", "C1o(4)"
        pairs: List[FlowPair] = []
        capacity: Dict[Tuple[Vertex, Vertex], int] = {}

        def pair(name: str, demand: int, old: List[Vertex], new: List[Vertex]) -> None:
            pairs.append(FlowPair(id=flows[name], demand=demand, old_path=tuple(old), new_path=tuple(new)))

        for i in range(1, n + 1):
            a, b = f"S{i}o(2)", f"S{i}o(3)"
            c, d, e, f = (f"S{i}u({p})" for p in range(2, 6))
            pair(f"S{i}", 1, [SOURCE, a, b, TERMINAL], [SOURCE, c, d, e, f, TERMINAL])
            capacity[(a, b)] = 2
            capacity[(c, d)] = 2
            capacity[(e, f)] = m
        capacity[(f"S{n}u(5)", TERMINAL)] = m

        for j in range(1, m + 1):
            g, h = f"C{j}u(2)", f"C{j}u(3)"
            pair(f"C{j}", 1, [SOURCE, f"C{j}o(2)", P, Q, f"C{j}o(5)", TERMINAL], [SOURCE, g, h, TERMINAL])
            capacity[(g, h)] = len(formula.clauses[j - 1])
        capacity[(P, Q)] = m

        validator_old = [SOURCE]
        for i in range(1, n + 1):
            validator_old += [f"S{i}u(4)", f"S{i}u(5)"]
        pair("V", m, validator_old + [TERMINAL], [SOURCE, P, Q, TERMINAL])

        for i in range(1, n + 1):
            for name, literal in ((f"L{i}", i), (f"Lbar{i}", -i)):
                old = [SOURCE, f"{name}o(2)"]
                for clause in formula.occurrences(literal):
                    old += [f"C{clause}u(2)", f"C{clause}u(3)"]
                old += [f"S{i}u(2)", f"S{i}u(3)"]
                old += [f"{name}o({len(old) + 1})", TERMINAL]
                new = [SOURCE, f"{name}u(2)", f"S{i}o(2)", f"S{i}o(3)", f"{name}u(5)", TERMINAL]
                pair(name, 1, old, new)

        pairs.sort(key=lambda p: p.id)
        loads: Counter = Counter()
        for family in ("old", "new"):
            family_load: Counter = Counter()
            for p in pairs:
                for key in (p.old_edges if family == "old" else p.new_edges):
                    family_load[key] += p.demand
            for key, load in family_load.items():
                loads[key] = max(loads[key], load)
        for key, load in loads.items():
            capacity.setdefault(key, max(3, load))

        net = cls._network(pairs, capacity)
        try:
            BlockService.topological_order(net)
        except CycleError as e:
            raise InternalSolverError(f"DAG gadget is cyclic: {e}")

        names = {vertex: vertex for vertex in sorted(net.vertices)}
        meta = GadgetMeta(
            kind=GadgetKind.DAG,
            formula=formula,
            names=names,
            flows=flows,
            notes=(
                "path positions count vertices from the source, p(1) = s",
                "the validator switches before every selector: its old path holds each selector's capacity-m edge",
                "literal update paths start with a private vertex",
                "both literal flows enter their j-th clause at old path positions 2j+1 and 2j+2;"
                " 2j+3 would put the last occurrence on the position of the selector edge",
                "clause update edges (C_ju(2), C_ju(3)) have capacity |C_j|, the clause width",
            ),
        )
        logger.info("DAG gadget: %d pairs, %d vertices, %d edges", net.k, len(net.vertices), len(net.edges))
        return net, meta

    @classmethod
    def switch_rounds(cls, net: UpdateFlowNetwork, schedule: Schedule) -> Dict[int, int]:
        """
        Round in which every pair switches at the source
        """
        rounds = schedule.round_of()
        found = {}
        for pair in net.pairs:
            update = Update(vertex=net.source, pair=pair.id)
            if update not in rounds:
                raise MalformedScheduleError(f"pair {pair.id} never switches at the source")
            found[pair.id] = rounds[update]
        return found

    @classmethod
    def decode_assignment(cls, net: UpdateFlowNetwork, meta: GadgetMeta, schedule: Schedule) -> Assignment:
        """
        A variable is true when its positive literal flow switches before its selector
        """
        if meta.kind != GadgetKind.DAG or meta.formula is None:
            raise PreconditionError("metadata does not describe a DAG gadget")
        report = NetworkService.verify_schedule(net, schedule)
        if not report.ok:
            raise PreconditionError(f"schedule is not feasible (round {report.round})")
        rounds = cls.switch_rounds(net, schedule)
        values: Dict[int, bool] = {}
        for i in range(1, meta.formula.num_vars + 1):
            selector = rounds[meta.flows[f"S{i}"]]
            positive = rounds[meta.flows[f"L{i}"]]
            negative = rounds[meta.flows[f"Lbar{i}"]]
            if positive < selector < negative:
                values[i] = True
            elif negative < selector < positive:
                values[i] = False
            else:
                raise MalformedScheduleError(
                    f"selector S{i} (round {selector}) is not strictly between L{i} ({positive}) and Lbar{i} ({negative})"
                )
        assignment = Assignment(values=values)
        if not assignment.satisfies(meta.formula):
            raise InternalSolverError(f"decoded assignment {values} does not satisfy the formula")
        return assignment

    @classmethod
    def dag_observation_violations(cls, net: UpdateFlowNetwork, meta: GadgetMeta, schedule: Schedule) -> List[str]:
        """
        Selector between its literals, clauses before the validator, validator before the selectors
        """
        rounds = cls.switch_rounds(net, schedule)
        formula = meta.formula
        validator = rounds[meta.flows["V"]]
        violations = []
        for i in range(1, formula.num_vars + 1):
            selector = rounds[meta.flows[f"S{i}"]]
            literals = sorted((rounds[meta.flows[f"L{i}"]], rounds[meta.flows[f"Lbar{i}"]]))
            if not literals[0] < selector < literals[1]:
                violations.append(f"S{i} not between its literal flows")
            if not validator < selector:
                violations.append(f"V not before S{i}")
        for j in range(1, formula.m + 1):
            if not rounds[meta.flows[f"C{j}"]] < validator:
                violations.append(f"C{j} not before V")
        return violations
