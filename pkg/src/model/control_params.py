from dataclasses import dataclass


@dataclass(frozen=True)
class ControlParams:
    """
    Gains and tolerances of the motion laws.
    dt is one simulation step, heading_quantum 1 rounds headings to whole degrees (0 disables it).
    """
    k_prop: float = 1.0
    delta: float = 0.3
    d_tol: float = 0.3
    dt: float = 1.0
    heading_quantum: int = 1

    def __post_init__(self):
        if self.k_prop <= 0:
            raise ValueError("k_prop must be > 0")
        if self.delta <= 0:
            raise ValueError("delta must be > 0")
        if self.d_tol <= 0:
            raise ValueError("d_tol must be > 0")
        if self.dt != 1:
            raise ValueError("dt is fixed at one step")
        if self.heading_quantum not in (0, 1):
            raise ValueError("heading_quantum must be 0 (off) or 1 (degree)")
