class QVError(Exception):
    """Base class for every error raised by the election engine."""


class ShapeError(QVError, ValueError):
    """
    Error: a vote or utility matrix has the wrong shape.

    Parameters
    ----------
        what : str
            Name of the offending matrix or label list.
        detail : str
            Description of the mismatch.
    """

    def __init__(self, what: str, detail: str):
        self.what = what
        super().__init__(f"{what}: {detail}")


class ConfigError(QVError, ValueError):
    """Error: an election configuration is invalid or of the wrong variant."""


class BudgetError(QVError, ValueError):
    """
    Error: an agent's ballot costs more than the fixed budget.

    Parameters
    ----------
        agent : int
            Index of the offending agent.
        cost : int
            Credits the ballot costs.
        budget : int
            Credits available to every agent.
    """

    def __init__(self, agent: int, cost: int, budget: int):
        self.agent = agent
        self.cost = cost
        self.budget = budget
        super().__init__(f"agent {agent} spends {cost} credits, budget is {budget}")


class RefundUndefinedError(QVError, ZeroDivisionError):
    """Error: the refund divides by N - 1, so it is undefined for a single agent."""

    def __init__(self):
        super().__init__("refund is undefined for an election with a single agent")


class InvalidArgumentError(QVError, ValueError):
    """Error: an operation received arguments outside its domain."""


class PreconditionError(QVError, ValueError):
    """Error: the input does not satisfy an algorithm's precondition."""


class OracleLimitError(QVError, RuntimeError):
    """
    Error: the brute-force search space is larger than the configured ceiling.

    Parameters
    ----------
        size : int
            Number of ballots the search would enumerate.
        ceiling : int
            Largest number of ballots the oracle accepts.
    """

    def __init__(self, size: int, ceiling: int):
        self.size = size
        self.ceiling = ceiling
        super().__init__(f"oracle search space of {size} ballots exceeds the ceiling of {ceiling}")


class ElectionFileError(QVError, ValueError):
    """
    Error: an election file could not be parsed or validated.

    Parameters
    ----------
        field : str
            The offending key of the election file.
        detail : str
            What is wrong with it.
    """

    def __init__(self, field: str, detail: str):
        self.field = field
        super().__init__(f'field "{field}": {detail}')
