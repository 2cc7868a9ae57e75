from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.model.enums import Detection
from src.model.errors import MissingRangeError, NegativeDistanceError


def _distances(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise NegativeDistanceError("Distance must be >= 0")
    return r


def _like_input(value: np.ndarray, r):
    # scalars in, floats out
    return float(value) if np.ndim(r) == 0 else value


@dataclass(frozen=True)
class SensorModel:
    """
    The sensor detection model beta(r) = 1 - k exp(-alpha r^2), an upside down Gaussian.
    beta is the fraction of uncertainty that remains after a search at distance r, so 1 - beta is the
    sensor effectiveness. With a range R the sensor is ineffective beyond R.
    All functions accept scalars or numpy arrays of distances.
    """
    k: float = 0.5
    alpha: float = 0.5
    range: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.k < 1:
            raise ValueError("k must be in (0, 1)")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.range is not None and self.range <= 0:
            raise ValueError("range must be > 0")

    @property
    def ranged(self) -> bool:
        return self.range is not None

    def _require_range(self, what: str) -> float:
        if self.range is None:
            raise MissingRangeError(what)
        return self.range

    def beta(self, r):
        """
        beta(r) = 1 - k exp(-alpha r^2), ignoring any range limit
        :param r: Distance(s) >= 0
        :raise NegativeDistanceError: if any distance is negative
        """
        d = _distances(r)
        return _like_input(1.0 - self.k * np.exp(-self.alpha * d * d), r)

    def beta_tilde(self, r):
        """
        beta saturated at beta(R) beyond the range
        """
        big_r = self._require_range("beta_tilde")
        d = _distances(r)
        return _like_input(np.where(d < big_r, self.beta(d), self.beta(big_r)), r)

    def beta_hat(self, r):
        """
        beta shifted up by 1 - beta(R) inside the range and exactly one beyond it,
        so a search never reduces uncertainty out of range. Continuous at R.
        """
        big_r = self._require_range("beta_hat")
        d = _distances(r)
        inside = 1.0 - self.k * (np.exp(-self.alpha * d * d) - np.exp(-self.alpha * big_r * big_r))
        return _like_input(np.where(d < big_r, inside, 1.0), r)

    def detection(self, r):
        """
        The factor a search multiplies the density with: beta_hat when ranged, beta otherwise
        """
        return self.beta_hat(r) if self.ranged else self.beta(r)

    def effectiveness(self, r):
        """
        1 - detection(r): the fraction of uncertainty removed at distance r
        """
        return _like_input(1.0 - np.asarray(self.detection(r)), r)

    def default_detection(self) -> Detection:
        return Detection.BETA_HAT if self.ranged else Detection.BETA

    def objective_weight(self, r, detection: Optional[Detection] = None):
        """
        Per cell integrand of the objective (without the density), 1 - detection function.
        BETA_TILDE integrates over the range limited region only, so it is zero beyond R.
        """
        detection = detection or self.default_detection()
        d = _distances(r)
        if detection is Detection.BETA:
            w = 1.0 - self.beta(d)
        elif detection is Detection.BETA_TILDE:
            w = np.where(d <= self._require_range("beta_tilde"), 1.0 - self.beta_tilde(d), 0.0)
        else:
            w = 1.0 - self.beta_hat(d)
        return _like_input(w, r)

    def perceived_weight(self, r, detection: Optional[Detection] = None):
        """
        The density weight k exp(-alpha r^2) a sensor 'perceives', ie. minus the radial part of the gradient of
        the objective weight. For the range limited variants it vanishes beyond R. BETA_HAT is built from its own
        detection function plus the constant shift, so it agrees with BETA_TILDE up to rounding.
        """
        detection = detection or self.default_detection()
        d = _distances(r)
        if detection is Detection.BETA:
            w = 1.0 - self.beta(d)
        elif detection is Detection.BETA_TILDE:
            big_r = self._require_range("beta_tilde")
            w = np.where(d <= big_r, 1.0 - self.beta_tilde(d), 0.0)
        else:
            big_r = self._require_range("beta_hat")
            shift = 1.0 - self.beta(big_r)
            w = np.where(d <= big_r, (1.0 - self.beta_hat(d)) + shift, 0.0)
        return _like_input(w, r)
