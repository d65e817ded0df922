"""Quaternion NTRU-like public-key cryptosystem over Z_q[x,y]/(x^n-1, y^n-1).

Top-level convenience re-exports; the submodules hold the full API
(ring, quat, ideal, lattice, scheme, ntru, analysis, cli).
"""

from .params import HIGHEST, MODERATE, PARAM_SETS, TOY, Params, get_params
from .scheme import (
    Ciphertext,
    PrivateKey,
    PublicKey,
    decode_message,
    decrypt,
    encode_message,
    encrypt,
    keygen,
    message_capacity,
)

__version__ = "0.1.0"

__all__ = [
    "Ciphertext",
    "HIGHEST",
    "MODERATE",
    "PARAM_SETS",
    "Params",
    "PrivateKey",
    "PublicKey",
    "TOY",
    "decode_message",
    "decrypt",
    "encode_message",
    "encrypt",
    "get_params",
    "keygen",
    "message_capacity",
    "__version__",
]
