"""Exception hierarchy shared across the package.

Every error the wire protocol can report subclasses :class:`ElqaError`; the
class name doubles as the machine-readable error code in server messages.
"""


class ElqaError(Exception):
    """Base class for all package errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- store ------------------------------------------------------------

class MissingFile(ElqaError):
    pass


class MalformedRow(ElqaError):
    """A CSV/journal row that cannot be parsed; names file and line number."""

    def __init__(self, file: str, line: int, reason: str):
        super().__init__(f"{file}:{line}: {reason}")
        self.file = file
        self.line = line
        self.reason = reason


class DanglingReference(ElqaError):
    """A row references an id that does not exist."""

    def __init__(self, ref_id: str, detail: str = ""):
        super().__init__(f"dangling reference {ref_id!r}" + (f": {detail}" if detail else ""))
        self.ref_id = ref_id


class UnknownField(ElqaError):
    pass


class UnknownMeasurement(ElqaError):
    pass


class UnknownCircuit(ElqaError):
    pass


# --- synth ------------------------------------------------------------

class InvalidConfig(ElqaError):
    pass


class IoError(ElqaError):
    pass


# --- features ---------------------------------------------------------

class EmptyInput(ElqaError):
    pass


class DegenerateVariance(ElqaError):
    pass


class DegenerateTimes(ElqaError):
    pass


class LengthMismatch(ElqaError):
    pass


class MissingDataExcessive(ElqaError):
    pass


class AllMissing(ElqaError):
    pass


class FlatVoltage(ElqaError):
    pass


# --- miners -----------------------------------------------------------

class BadK(ElqaError):
    pass


class BadParam(ElqaError):
    pass


class UnknownMethod(ElqaError):
    pass


# --- document / dashboard ----------------------------------------------

class DuplicateRegistration(ElqaError):
    pass


class NoHandler(ElqaError):
    pass


class InvalidPayload(ElqaError):
    pass


class RevisionGap(ElqaError):
    pass


class UnknownModel(ElqaError):
    pass


class SchemaViolation(ElqaError):
    pass


class UnknownParameter(ElqaError):
    pass


class BadTemplate(ElqaError):
    pass


# --- server -----------------------------------------------------------

class UnknownDashboard(ElqaError):
    pass


class UnknownSession(ElqaError):
    pass


class MalformedMessage(ElqaError):
    pass
