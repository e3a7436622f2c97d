"""Log-scale real numbers for quantities of factorial magnitude.

``ScaledReal(m, s)`` represents m * e^s with the mantissa normalized to
1 <= |m| < e (or m = 0 with s = -inf).  Petersson norms reach (12k)!-size
magnitudes; carrying the natural-log offset separately keeps every
intermediate well inside float/mpf exponent ranges and makes slopes
lambda = -1/2 ln <f,f> a cheap exact-form read-off.
"""

from __future__ import annotations

from mpmath import mp, mpf

from .errors import DomainError

_E = None  # lazily built per-precision constant


def _e():
    return mp.e


class ScaledReal:
    __slots__ = ("mantissa", "log_scale")

    def __init__(self, mantissa, log_scale=0):
        m = mpf(mantissa)
        s = mpf(log_scale)
        if m == 0:
            self.mantissa = mpf(0)
            self.log_scale = mpf("-inf")
            return
        # renormalize so 1 <= |m| < e
        k = mp.floor(mp.log(abs(m)))
        if k != 0:
            m = m / mp.exp(k)
            s = s + k
        # guard against boundary rounding
        while abs(m) >= _e():
            m = m / _e()
            s = s + 1
        while abs(m) < 1:
            m = m * _e()
            s = s - 1
        self.mantissa = m
        self.log_scale = s

    @classmethod
    def from_log(cls, log_value, sign=1) -> "ScaledReal":
        """Number with ln|x| = log_value and the given sign."""
        out = cls.__new__(cls)
        out.mantissa = mpf(sign)
        out.log_scale = mpf(log_value)
        return out

    def is_zero(self):
        return self.mantissa == 0

    def sign(self):
        return 0 if self.mantissa == 0 else (1 if self.mantissa > 0 else -1)

    def ln(self):
        """Natural log; requires a positive value."""
        if self.mantissa <= 0:
            raise DomainError("ln of a nonpositive ScaledReal")
        return mp.log(self.mantissa) + self.log_scale

    def to_mpf(self):
        """Collapse to a plain mpf (may over/underflow only at absurd scales)."""
        if self.is_zero():
            return mpf(0)
        return self.mantissa * mp.exp(self.log_scale)

    def __float__(self):
        return float(self.to_mpf())

    # -- arithmetic (only what the Gram/height pipelines need) ----------

    def __mul__(self, other):
        if isinstance(other, ScaledReal):
            if self.is_zero() or other.is_zero():
                return ScaledReal(0)
            return ScaledReal(self.mantissa * other.mantissa,
                              self.log_scale + other.log_scale)
        return ScaledReal(self.mantissa * mpf(other), self.log_scale)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScaledReal):
            if other.is_zero():
                raise ZeroDivisionError("ScaledReal division by zero")
            if self.is_zero():
                return ScaledReal(0)
            return ScaledReal(self.mantissa / other.mantissa,
                              self.log_scale - other.log_scale)
        return ScaledReal(self.mantissa / mpf(other), self.log_scale)

    def __add__(self, other):
        if not isinstance(other, ScaledReal):
            other = ScaledReal(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        # rebase onto the larger scale; the exp argument is <= 0
        if self.log_scale >= other.log_scale:
            big, small = self, other
        else:
            big, small = other, self
        m = big.mantissa + small.mantissa * mp.exp(small.log_scale - big.log_scale)
        return ScaledReal(m, big.log_scale)

    def __neg__(self):
        out = ScaledReal.__new__(ScaledReal)
        out.mantissa = -self.mantissa
        out.log_scale = self.log_scale
        return out

    def __sub__(self, other):
        if not isinstance(other, ScaledReal):
            other = ScaledReal(other)
        return self + (-other)

    def sqrt(self):
        if self.mantissa < 0:
            raise DomainError("sqrt of a negative ScaledReal")
        if self.is_zero():
            return ScaledReal(0)
        return ScaledReal(mp.sqrt(self.mantissa), self.log_scale / 2)

    # -- comparisons -----------------------------------------------------

    def _cmp(self, other):
        if not isinstance(other, ScaledReal):
            other = ScaledReal(other)
        d = (self - other).mantissa
        return 0 if d == 0 else (1 if d > 0 else -1)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, (ScaledReal, int, float, mpf)):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self):
        return hash(self.to_mpf())

    def __repr__(self):
        if self.is_zero():
            return "ScaledReal(0)"
        return f"ScaledReal({mp.nstr(self.mantissa, 8)} * e^{mp.nstr(self.log_scale, 8)})"

    # -- serialization ----------------------------------------------------

    def to_pair(self):
        """(mantissa, log_scale) as strings, for JSON round-trips."""
        return (mp.nstr(self.mantissa, int(mp.dps) + 5),
                mp.nstr(self.log_scale, int(mp.dps) + 5))

    @classmethod
    def from_pair(cls, pair):
        return cls(mpf(pair[0]), mpf(pair[1]))
