class FlowUpdateError(Exception):
    code = 1
    description = "N/A"


class InstanceFormatError(FlowUpdateError):
    code = 2
    description = "Malformed instance or schedule document"

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


class InvalidInstanceError(FlowUpdateError):
    code = 2
    description = "Instance violates the update flow network invariants"

    def __init__(self, violations):
        super().__init__(f"{len(violations)} violation(s)")
        self.violations = violations


class DuplicateUpdateError(FlowUpdateError):
    code = 1
    description = "Update already resolved"


class PreconditionError(FlowUpdateError):
    code = 1
    description = "Operation precondition violated"


class CycleError(FlowUpdateError):
    code = 2
    description = "Instance is not a DAG"

    def __init__(self, cycle):
        super().__init__("cycle " + " -> ".join(cycle))
        self.cycle = tuple(cycle)


class BlockNotUpdatableError(FlowUpdateError):
    code = 2
    description = "No congestion free label exists for a block"

    def __init__(self, block):
        super().__init__(f"block {block.key} of pair {block.pair} cannot be updated")
        self.block = block


class CongestionError(FlowUpdateError):
    code = 2
    description = "Block update exceeds an edge capacity"

    def __init__(self, edge, load: int, capacity: int):
        super().__init__(f"edge {edge[0]}->{edge[1]} load {load} > capacity {capacity}")
        self.edge = edge
        self.load = load
        self.capacity = capacity


class DimacsFormatError(FlowUpdateError):
    code = 2
    description = "Malformed DIMACS CNF"


class NotThreeSatError(DimacsFormatError):
    description = "Clause has more than three literals"


class AssignmentDoesNotSatisfyError(FlowUpdateError):
    code = 2
    description = "Assignment does not satisfy the formula"


class MalformedScheduleError(FlowUpdateError):
    code = 2
    description = "Schedule contradicts the gadget structure"


class SearchLimitExceeded(FlowUpdateError):
    code = 3
    description = "Search limit exceeded"


class InternalSolverError(FlowUpdateError):
    code = 4
    description = "Internal error"
