"""Device-classification attacks on blockchain IoT transaction ledgers.

Thin binding over the C++ core: trace synthesis, hash-chained ledger
population, the three timestamp obfuscation defenses, gap-window features,
the CART attacker and the sweep harness.
"""

from ledgerprint._core import *  # noqa: F401,F403
from ledgerprint._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
