"""Error types shared by the numerical core."""


class NumericalError(RuntimeError):
  """A computation ran but did not produce a trustworthy number."""

  def __init__(self, message: str, residual_norm: float | None = None) -> None:
    if residual_norm is not None:
      message = f"{message} (residual norm {residual_norm:.3e})"
    super().__init__(message)
    self.residual_norm = residual_norm
