import os
from dataclasses import dataclass, fields, replace

from .errors import ValidationError

_ENV = {
    "bits": "CMLL_BITS",
    "prec": "CMLL_PREC",
    "deg": "CMLL_DEG",
    "cap_norm": "CMLL_CAP_NORM",
}


@dataclass(frozen=True)
class Config:
    bits: int = 256
    deg: int = 32
    prec: int = 16
    cap_norm: int = 10**6
    cap_order: int = 10**5

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValidationError(f"config value {f.name} must be positive")

    @classmethod
    def from_env(cls, environ=None, **overrides):
        """Defaults, then environment, then explicit overrides (None is ignored)."""
        environ = os.environ if environ is None else environ
        values = {}
        for name, var in _ENV.items():
            raw = environ.get(var)
            if raw is None:
                continue
            try:
                values[name] = int(raw)
            except ValueError:
                raise ValidationError(f"{var} must be an integer, got {raw!r}") from None
        values.update({k: v for k, v in overrides.items() if v is not None})
        return replace(cls(), **values)


DEFAULT = Config()
