"""Exception hierarchy. Everything raised on purpose derives from ArcvaultError."""


class ArcvaultError(Exception):
    """Base class for all arcvault errors."""


class RepoConflict(ArcvaultError):
    """Target path exists but holds something that is not a repository."""


class NotARepo(ArcvaultError):
    """Path does not contain a repository layout."""


class NoDefaultRepo(ArcvaultError):
    """A locator-less call was made and no default repository is set."""


class NotFound(ArcvaultError):
    """No artifact matches the given hash, prefix, or address."""


class InvalidPayload(ArcvaultError):
    """Payload violates the invariants of its kind."""


class HashMismatch(ArcvaultError):
    """Stored blob bytes no longer digest to their filename stem."""


class Busy(ArcvaultError):
    """Could not acquire the repository writer lock within the timeout."""


class RemoteUnavailable(ArcvaultError):
    """Remote repository could not be reached, or answered with an error."""


class CorruptRemoteIndex(ArcvaultError):
    """Fetched index file is not a usable repository index."""


class MalformedAddress(ArcvaultError):
    """Address text does not end in a hex hash segment."""


class MalformedTemplate(ArcvaultError):
    """URL template cannot be rendered with the given parameters."""


class UnknownInput(ArcvaultError):
    """Pipeline step references an input hash that is not in the repository."""


class CyclicProvenance(ArcvaultError):
    """Relation tags form a cycle; the pedigree cannot be reconstructed."""


class NoSessionRecorded(ArcvaultError):
    """Artifact was saved without a session manifest link."""


class IoError(ArcvaultError):
    """Filesystem operation failed (permissions, missing parent, ...)."""
