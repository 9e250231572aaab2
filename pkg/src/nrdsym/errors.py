"""Exception hierarchy shared by all nrdsym modules."""


class NrdError(Exception):
    """Base class for every error raised by nrdsym."""


class InvalidInputError(NrdError, ValueError):
    """Malformed or inconsistent input (bad weights, duplicate scopes, ...)."""


class SizeLimitError(NrdError):
    """A desk-scale enumeration guard would be exceeded."""


class TrivialPredicateError(InvalidInputError):
    """Operation requires a non-trivial predicate (W is neither empty nor full)."""


class NoCertificateError(NrdError):
    """No capturing polynomial can exist for the requested target and degree."""


class IncompleteSearchError(NrdError):
    """A certificate should exist but the modulus search did not produce one."""
