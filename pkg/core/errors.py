"""
Exception hierarchy shared by the symbolic kernels, the engines and the CLI.

Kernels raise, the CLI catches at the boundary and maps to exit codes.
"""

from typing import List, Optional


class JcondError(Exception):
    """Base class for every error raised by jcond."""


class InconsistentJetBinding(JcondError):
    """A derivative jet is bound incompatibly with its base binding (or left unbound)."""


class UnsupportedDistributionalProduct(JcondError):
    """A product such as δ·δ or H·δ was requested; the calculus has no value for it."""


class KOperatorRangeError(JcondError, ValueError):
    """K_{p,l} requested outside 0 <= l <= |p| - 1 or with |p| = 0."""


class DecompositionFailed(JcondError):
    """A verified MH certificate did not yield a resoluble certificate (internal defect)."""


class MHOrderError(JcondError, ValueError):
    """An MH quadratic entry P has order above one."""


class ParseError(JcondError):
    """Raised by the DSL front end; carries every diagnostic collected."""

    def __init__(self, diagnostics: List["object"]):
        self.diagnostics = list(diagnostics)
        first = str(self.diagnostics[0]) if self.diagnostics else "parse failed"
        super().__init__(first)


class ScenarioError(JcondError):
    """A numerical scenario violates one of its preconditions."""


class GradientDegenerate(ScenarioError):
    """grad γ vanishes (numerically) at a sampled point of Γ."""


class GridTooCoarse(ScenarioError):
    """Grid spacing exceeds ε/4 inside the mollification band."""


class MissingTraceError(ScenarioError):
    """The input lacks closed-form traces, γ or coefficient values needed by numcheck."""


class InconclusiveStudy(JcondError):
    """Neither the consistent nor the violated criterion was met."""

    def __init__(self, message: str, report: Optional[object] = None):
        super().__init__(message)
        self.report = report
