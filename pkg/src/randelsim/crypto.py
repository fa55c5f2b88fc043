"""Key hierarchy, authentication vectors, and identity concealment.

All derivations are modeled with one keyed pseudorandom function
(HMAC-SHA256) using string labels for domain separation. The root secret K
lives only in SubscriberRecord (home network) and UsimState (device); every
serving-network key derives from its parent plus public context, so a holder
of an anchor key can produce the session keys without ever seeing K.
"""

from __future__ import annotations

import hashlib
import hmac
import random
from dataclasses import dataclass, field

KEY_LEN = 32  # 256-bit keys everywhere
RAND_LEN = 16

# Fixed network-operator concealment key for the modeled SUCI transform.
_CONCEAL_KEY = hashlib.sha256(b"randelsim/suci-concealment").digest()


class MacFailure(Exception):
    """Challenge MAC did not verify under the device's root secret."""


class SyncFailure(Exception):
    """Sequence number not fresh: the challenge is stale or replayed."""


@dataclass(frozen=True)
class RootSecret:
    """Per-subscriber symmetric root key. Must never appear in RAN-side types."""

    value: bytes

    def __post_init__(self):
        if len(self.value) != KEY_LEN:
            raise ValueError("root secret must be 256 bits")

    def __repr__(self) -> str:  # keep key material out of logs
        return "RootSecret(<hidden>)"


@dataclass
class SequenceState:
    """Home-network side counter; strictly increases per generated vector."""

    sqn_network: int = 0


@dataclass
class UsimState:
    """Device-side credentials: root secret plus highest accepted counter."""

    k: RootSecret
    sqn_ue: int = 0


@dataclass(frozen=True)
class Autn:
    """Network authentication token: counter plus MAC over (counter, nonce)."""

    sqn: int
    mac: bytes


@dataclass(frozen=True)
class AuthenticationVector:
    rand: bytes
    autn: Autn
    xres: bytes
    k_derived: bytes  # anchor key shipped with the vector


@dataclass(frozen=True)
class SessionKeys:
    k_amf: bytes
    k_nas: bytes
    k_up: bytes
    k_rrc: bytes


@dataclass(frozen=True)
class KeyHierarchy:
    k_ausf: bytes
    k_seaf: bytes
    k_amf: bytes
    k_nas: bytes
    k_up: bytes
    k_rrc: bytes
    serving_network: str


@dataclass(frozen=True)
class UeIdentity:
    supi: str
    suci: str
    cached_id: bytes  # SHA-256 of the concealed identifier


def prf(key: bytes, label: str, context: bytes = b"") -> bytes:
    """Keyed PRF with domain-separating label."""
    if not label:
        raise ValueError("label must be nonempty")
    return hmac.new(key, label.encode() + b"\x00" + context, hashlib.sha256).digest()


def derive_key(parent: bytes, label: str, context: bytes = b"") -> bytes:
    if not label:
        raise ValueError("label must be nonempty")
    return prf(parent, label, context)


def conceal_identity(supi: str) -> UeIdentity:
    """Model SUCI as a keyed transform of SUPI; cache key is SHA-256(SUCI)."""
    if not supi:
        raise ValueError("supi must be nonempty")
    suci = "suci-" + prf(_CONCEAL_KEY, "SUCI", supi.encode()).hex()[:32]
    cached_id = hashlib.sha256(suci.encode()).digest()
    return UeIdentity(supi=supi, suci=suci, cached_id=cached_id)


def _mac_over(k: bytes, sqn: int, rand: bytes) -> bytes:
    return prf(k, "MAC", sqn.to_bytes(8, "big") + rand)


def _response(k: bytes, rand: bytes) -> bytes:
    return prf(k, "RES", rand)


def generate_av(root: RootSecret, sequence: SequenceState, serving_network: str,
                rng: random.Random) -> AuthenticationVector:
    """Produce a fresh vector bound to the serving network; bumps the counter."""
    if not serving_network:
        raise ValueError("serving_network must be nonempty")
    rand = rng.randbytes(RAND_LEN)
    sequence.sqn_network += 1
    sqn = sequence.sqn_network
    autn = Autn(sqn=sqn, mac=_mac_over(root.value, sqn, rand))
    xres = _response(root.value, rand)
    k_ausf = derive_key(root.value, "AUSF", serving_network.encode() + rand)
    return AuthenticationVector(rand=rand, autn=autn, xres=xres, k_derived=k_ausf)


def derive_k_seaf(k_ausf: bytes, serving_network: str) -> bytes:
    return derive_key(k_ausf, "SEAF", serving_network.encode())


def derive_session_keys(k_seaf: bytes, cached_id: bytes) -> SessionKeys:
    """Session keys from the anchor alone; no root secret required."""
    k_amf = derive_key(k_seaf, "AMF", cached_id)
    k_nas = derive_key(k_amf, "NAS", cached_id)
    k_up = derive_key(k_seaf, "UP", cached_id)
    k_rrc = derive_key(k_seaf, "RRC", cached_id)
    return SessionKeys(k_amf=k_amf, k_nas=k_nas, k_up=k_up, k_rrc=k_rrc)


def build_hierarchy(k_ausf: bytes, serving_network: str, cached_id: bytes) -> KeyHierarchy:
    k_seaf = derive_k_seaf(k_ausf, serving_network)
    sk = derive_session_keys(k_seaf, cached_id)
    return KeyHierarchy(k_ausf=k_ausf, k_seaf=k_seaf, k_amf=sk.k_amf,
                        k_nas=sk.k_nas, k_up=sk.k_up, k_rrc=sk.k_rrc,
                        serving_network=serving_network)


def ue_verify_and_respond(usim: UsimState, rand: bytes, autn: Autn) -> bytes:
    """Device side of the challenge: verify MAC and freshness, answer, advance.

    Raises MacFailure on a wrong key, SyncFailure on a stale (replayed) counter.
    """
    expected_mac = _mac_over(usim.k.value, autn.sqn, rand)
    if not hmac.compare_digest(expected_mac, autn.mac):
        raise MacFailure("authentication token MAC mismatch")
    if autn.sqn <= usim.sqn_ue:
        raise SyncFailure("sequence number not fresh")
    usim.sqn_ue = autn.sqn
    return _response(usim.k.value, rand)


def express_response_mac(k_seaf: bytes, cached_id: bytes, nonce: bytes) -> bytes:
    """Local re-registration proof: MAC under the NAS key derived from the anchor."""
    k_nas = derive_session_keys(k_seaf, cached_id).k_nas
    return prf(k_nas, "EXPRESS-RESP", nonce)
