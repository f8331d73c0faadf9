"""Exception types shared across the package."""


class QueueExhausted(RuntimeError):
    """Raised when the candidate queue is empty before the horizon is reached.

    Only possible with pruning enabled, in which case the incumbent best
    value is already certified optimal over the search domain.
    """
