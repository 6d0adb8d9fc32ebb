from dataclasses import dataclass

from ..constants import OperatorKind
from ..errors import ArgumentError


@dataclass(frozen=True)
class OperatorSpec:
    """A symmetric cone Γ and a degree-one operator f(λ) on it.

    ``degree`` is the σ_k index for the Hessian operator and the form degree
    p for the p-Monge-Ampère operator; it equals ``n`` for Monge-Ampère.
    ``gamma`` is the structural lower bound on ``∏ ∂f/∂λ_j``.
    """

    kind: OperatorKind
    n: int
    degree: int
    gamma: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", OperatorKind(self.kind))
        if self.n < 1:
            raise ArgumentError(f"complex dimension must be positive, got {self.n}")
        if not 1 <= self.degree <= self.n:
            raise ArgumentError(f"degree must lie in 1..{self.n}, got {self.degree}")
        if self.kind is OperatorKind.MONGE_AMPERE and self.degree != self.n:
            raise ArgumentError("the Monge-Ampère operator has degree n")
        if not self.gamma > 0:
            raise ArgumentError("structural constant gamma must be positive")

    @property
    def label(self) -> str:
        if self.kind is OperatorKind.MONGE_AMPERE:
            return f"MA(n={self.n})"
        if self.kind is OperatorKind.HESSIAN:
            return f"sigma_{self.degree}(n={self.n})"
        return f"{self.degree}-MA(n={self.n})"

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "n": self.n, "degree": self.degree, "gamma": self.gamma}

    @classmethod
    def from_json(cls, json: dict) -> "OperatorSpec":
        return cls(
            kind=OperatorKind(json["kind"]),
            n=int(json["n"]),
            degree=int(json["degree"]),
            gamma=float(json["gamma"]),
        )
