"""Compilers from classical machine models to process programs."""

from .dispatch import dispatch_process, finite_dispatch, prepend_word
from .tm import encode_tm
from .atm import encode_atm
from .ram import encode_pram, encode_ram
from .circuit import encode_circuit
from .rtm import encode_rtm, internal_choice
from .wrappers import offline_from_online, online_from_offline, serverize

__all__ = [
    "dispatch_process", "finite_dispatch", "prepend_word",
    "encode_tm", "encode_atm", "encode_ram", "encode_pram",
    "encode_circuit", "encode_rtm", "internal_choice",
    "serverize", "offline_from_online", "online_from_offline",
]
