"""Shared exception types.

DataError covers everything wrong with user-supplied data: malformed or
truncated files, dimension mismatches, out-of-range labels, missing seeds.
The CLI maps it to exit code 3; unexpected exceptions map to 4.
"""


class VertegrowError(Exception):
    pass


class DataError(VertegrowError):
    pass


class MissingSeedsError(DataError):
    """Segmentation was asked to run without both seed polarities."""

