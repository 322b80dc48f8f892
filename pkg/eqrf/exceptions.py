from typing import Any, Optional, Sequence

from typing_extensions import Annotated, Doc


class EQRFError(RuntimeError):
    """
    A generic, EQRF-specific error.
    """


class PhiDomainError(EQRFError, ValueError):
    """
    Raised when a phi function (or Gamma) is requested outside its domain:
    non-positive order, non-finite argument, or a pole of Gamma.
    """


class PhiAccuracyError(EQRFError):
    """
    A special-function evaluation whose internal error estimate exceeds the
    accuracy contract. The value is reported, never silently returned.

    ## Example

    ```python
    from eqrf import phi_frac_report
    from eqrf.exceptions import PhiAccuracyError

    try:
        report = phi_frac_report(0.5, 1e4 + 0j)
    except PhiAccuracyError as exc:
        print(exc.value, exc.est_rel_error)
    ```
    """

    def __init__(
        self,
        value: Annotated[
            complex,
            Doc(
                """
                The best value the evaluator produced.
                """
            ),
        ],
        est_rel_error: Annotated[
            float,
            Doc(
                """
                Estimated relative error of `value`.
                """
            ),
        ],
        detail: Annotated[
            Optional[str],
            Doc(
                """
                Optional human-readable context.
                """
            ),
        ] = None,
    ) -> None:
        self.value = value
        self.est_rel_error = est_rel_error
        self.detail = detail or "phi evaluation exceeded its accuracy contract"
        super().__init__(f"{self.detail} (estimated relative error {est_rel_error:.3e})")

    def __repr__(self) -> str:
        class_name = self.__class__.__name__
        return f"{class_name}(value={self.value!r}, est_rel_error={self.est_rel_error!r})"


class OscillationError(EQRFError, ValueError):
    """
    Direct quadrature was asked to resolve more oscillations than its budget allows.
    """


class QuadratureRangeError(EQRFError, ValueError):
    """
    Quadrature rule parameters (number of nodes, weight exponent) out of range.
    """


class NodeSetError(EQRFError, ValueError):
    """
    Confluent collocation nodes or an unsupported (family, nu) combination.
    """


class OperatorError(EQRFError, ValueError):
    """
    Invalid operator size or coefficient, or a failed eigen-decomposition.
    """


class InterpolationError(EQRFError):
    """
    The generalized Vandermonde system of the fractional interpolation could
    not be solved to the required residual.
    """

    def __init__(self, residual: float, bound: float) -> None:
        self.residual = residual
        self.bound = bound
        super().__init__(f"interpolation residual {residual:.3e} exceeds {bound:.3e}")


class NonFiniteStateError(EQRFError):
    """
    A time march produced NaN or Inf entries.
    """

    def __init__(self, step: int) -> None:
        self.step = step
        super().__init__(f"non-finite state after step {step}")

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(step={self.step!r})"


class FormulationMismatchError(EQRFError):
    """
    Debug cross-check: the fractional-phi and quadrature formulations (or a
    kernel weight and its quadrature oracle) disagree beyond tolerance.
    """

    def __init__(self, discrepancy: float, tolerance: float, where: str) -> None:
        self.discrepancy = discrepancy
        self.tolerance = tolerance
        self.where = where
        super().__init__(f"{where}: discrepancy {discrepancy:.3e} exceeds {tolerance:.3e}")


class ReferenceAccuracyError(EQRFError):
    """
    A reference solution could not reach the requested tolerance.
    """

    def __init__(self, achieved: float, requested: float, method: str) -> None:
        self.achieved = achieved
        self.requested = requested
        self.method = method
        super().__init__(f"{method} reference reached {achieved:.3e}, requested {requested:.3e}")

    def __repr__(self) -> str:
        class_name = self.__class__.__name__
        return f"{class_name}(achieved={self.achieved!r}, requested={self.requested!r}, method={self.method!r})"


class FitError(EQRFError, ValueError):
    """
    Order fit on degenerate data (too few points, non-positive errors).
    """


class ValidationException(EQRFError):
    def __init__(self, errors: Sequence[Any]) -> None:
        self._errors = errors
        super().__init__("; ".join(_format_error(e) for e in errors) or "invalid input")

    def errors(self) -> Sequence[Any]:
        return self._errors


class StudySpecError(ValidationException, ValueError):
    def __init__(self, errors: Sequence[Any], *, source: Any = None) -> None:
        super().__init__(errors)
        self.source = source


def _format_error(error: Any) -> str:
    if isinstance(error, dict):
        loc = ".".join(str(part) for part in error.get("loc", ()))
        msg = error.get("msg", "")
        return f"{loc}: {msg}" if loc else str(msg)
    return str(error)
