"""Exception types raised across the pipeline."""


class PemError(Exception):
    """Base class for all pemsignal errors."""


class DataError(PemError, ValueError):
    """Input data is malformed or inconsistent (CLI exit code 2)."""


class FileError(DataError):
    pass


class SchemaError(DataError):
    def __init__(self, message, path=None, row=None):
        self.path = path
        self.row = row
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ReadcodeError(DataError):
    pass


class InvalidLength(ReadcodeError):
    pass


class InvalidPadding(ReadcodeError):
    pass


class EmptyLevel1(ReadcodeError):
    pass


class InvalidCharacter(ReadcodeError):
    pass


class EmptyPrescriptionList(DataError):
    pass


class EmptyCohort(DataError):
    pass


class TooFewPatients(DataError):
    pass


class LengthMismatch(DataError):
    pass


class TooFewGroups(DataError):
    pass


class DomainError(PemError, ValueError):
    pass


class EmptySample(DataError):
    pass


class ZeroPopulation(DataError):
    pass


class ColumnMapMismatch(DataError):
    pass


class EmptyReferenceSet(DataError):
    pass


class InvalidConfig(PemError, ValueError):
    pass


class IoError(PemError, OSError):
    pass
