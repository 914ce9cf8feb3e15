class IntegrityError(Exception):
    """A self-check failed: corrupted cache/state file or a partition audit
    that does not balance.  Carries the offending detail in args."""


class NotSquarefreeError(ValueError):
    """Polynomial has a repeated factor mod p (gcd(f, f') != 1)."""
