"""Exception types raised by the solvers and evaluators."""


class LQGameError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSpec(LQGameError):
    def __init__(self, report):
        self.report = report
        super().__init__("invalid game spec: " + "; ".join(str(v) for v in report.errors))


class SingularPhi(LQGameError):
    """The stacked Nash system at time ``t`` is numerically singular."""

    def __init__(self, t: int, condition_estimate: float):
        self.t = t
        self.condition_estimate = condition_estimate
        super().__init__(
            f"Nash block matrix singular at t={t} (condition ~ {condition_estimate:.3e})"
        )


class Diverged(LQGameError):
    def __init__(self, t: int, what: str = "value"):
        self.t = t
        super().__init__(f"non-finite {what} at t={t}")


class SingularCovariance(LQGameError):
    def __init__(self, t: int, sigma_min: float):
        self.t = t
        self.sigma_min = sigma_min
        super().__init__(f"state covariance singular at t={t} (sigma_min={sigma_min:.3e})")


class CholeskyFailure(LQGameError):
    pass


class AlphaNonpositive(LQGameError):
    """The contraction constant is not positive; ``report`` holds the details."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"alpha_hat={report.alpha_hat:.3e} <= 0; system-noise condition fails")
