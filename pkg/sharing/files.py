"""
On-disk formats. Both files are JSON with a fixed field order and
lowercase hex, so parse(emit(x)) reproduces x byte for byte.

Control area:
    {"version", "scheme_id", "hash", "n", "digest_len", "basis",
     "entries": {"1,3,5": "<hex c_i>", ...},
     "commitments": {"1": "<hex g_1>", ...}}      (commitments optional)

Share file:
    {"participant", "version", "share": "<hex s_i>", "scheme_id"}
"""

import os
from dataclasses import dataclass
from typing import List

from utils.logging_helper import get_module_logger
from utils.storage import atomic_write_text, dump_canonical, read_json

from .access_structures import AccessStructureBasis, subset_key
from .errors import (
    AccessStructureError,
    MalformedFileError,
    ShareBindingError,
    SharingError,
    VersionError,
)
from .hss import ControlEntry, HashSpec, PublicControlArea, Share

logger = get_module_logger(__name__)

CONTROL_AREA_FIELDS = ("version", "scheme_id", "hash", "n", "digest_len", "basis", "entries")
SHARE_FILE_FIELDS = ("participant", "version", "share", "scheme_id")


@dataclass(frozen=True)
class ShareFile:
    participant: int
    version: int
    share: bytes
    scheme_id: str

    def to_share(self) -> Share:
        return Share(self.participant, self.share)


def _decode_hex(text, length: int, what: str) -> bytes:
    if not isinstance(text, str) or text != text.lower():
        raise MalformedFileError(f"{what} must be a lowercase hex string")
    try:
        value = bytes.fromhex(text)
    except ValueError:
        raise MalformedFileError(f"{what} is not valid hex")
    if len(value) != length:
        raise MalformedFileError(f"{what} decodes to {len(value)} bytes, expected {length}")
    return value


def _require_int(raw: dict, name: str, minimum: int = 1) -> int:
    value = raw.get(name)
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise MalformedFileError(f"field {name!r} must be an integer >= {minimum}")
    return value


def control_area_to_dict(public: PublicControlArea) -> dict:
    data = {
        "version": public.version,
        "scheme_id": public.scheme_id,
        "hash": public.hash_spec.label,
        "n": public.n,
        "digest_len": public.hash_spec.digest_length,
        "basis": [list(s) for s in public.basis],
        "entries": {subset_key(s): public.entries[subset_key(s)].value.hex() for s in public.basis},
    }
    if public.commitments is not None:
        data["commitments"] = {str(p): public.commitments[p].hex() for p in sorted(public.commitments)}
    return data


def control_area_from_dict(raw) -> PublicControlArea:
    if not isinstance(raw, dict):
        raise MalformedFileError("control area must be a JSON object")
    missing = [name for name in CONTROL_AREA_FIELDS if name not in raw]
    if missing:
        raise MalformedFileError(f"control area missing fields {missing}")
    unknown = sorted(set(raw) - set(CONTROL_AREA_FIELDS) - {"commitments"})
    if unknown:
        raise MalformedFileError(f"control area has unknown fields {unknown}")

    version = _require_int(raw, "version")
    n = _require_int(raw, "n")
    digest_len = _require_int(raw, "digest_len")
    scheme_id = raw["scheme_id"]
    if not isinstance(scheme_id, str):
        raise MalformedFileError("scheme_id must be a string")

    try:
        hash_spec = HashSpec.from_label(raw["hash"])
        basis_raw = raw["basis"]
        if not isinstance(basis_raw, list) or not all(isinstance(s, list) for s in basis_raw):
            raise MalformedFileError("basis must be an array of arrays of integers")
        basis = AccessStructureBasis(n=n, minimal_subsets=tuple(tuple(s) for s in basis_raw))
    except MalformedFileError:
        raise
    except (SharingError, TypeError, ValueError) as e:
        raise MalformedFileError(f"invalid scheme description: {e}")

    if hash_spec.digest_length != digest_len:
        raise MalformedFileError(f"digest_len {digest_len} does not match hash {hash_spec.label}")
    if [list(s) for s in basis] != basis_raw:
        raise MalformedFileError("basis is not in canonical order")

    entries_raw = raw["entries"]
    if not isinstance(entries_raw, dict) or list(entries_raw) != basis.keys():
        raise MalformedFileError("entry keys must match the canonical keys of the basis, in order")
    entries = {
        key: ControlEntry(key, _decode_hex(value, digest_len, f"entry {key}"))
        for key, value in entries_raw.items()
    }

    commitments = None
    if "commitments" in raw:
        commitments_raw = raw["commitments"]
        if not isinstance(commitments_raw, dict):
            raise MalformedFileError("commitments must be an object")
        commitments = {}
        for pid, value in commitments_raw.items():
            if not pid.isdigit() or str(int(pid)) != pid:
                raise MalformedFileError(f"commitment key {pid!r} is not a participant id")
            commitments[int(pid)] = _decode_hex(value, digest_len, f"commitment {pid}")

    try:
        return PublicControlArea(
            version=version,
            hash_spec=hash_spec,
            basis=basis,
            entries=entries,
            commitments=commitments,
            scheme_id=scheme_id,
        )
    except AccessStructureError as e:
        raise MalformedFileError(str(e))


def share_file_to_dict(share_file: ShareFile) -> dict:
    return {
        "participant": share_file.participant,
        "version": share_file.version,
        "share": share_file.share.hex(),
        "scheme_id": share_file.scheme_id,
    }


def share_file_from_dict(raw, digest_len: int) -> ShareFile:
    if not isinstance(raw, dict) or sorted(raw) != sorted(SHARE_FILE_FIELDS):
        raise MalformedFileError(f"share file must have exactly the fields {list(SHARE_FILE_FIELDS)}")
    if not isinstance(raw["scheme_id"], str):
        raise MalformedFileError("scheme_id must be a string")
    return ShareFile(
        participant=_require_int(raw, "participant"),
        version=_require_int(raw, "version"),
        share=_decode_hex(raw["share"], digest_len, "share"),
        scheme_id=raw["scheme_id"],
    )


def emit_control_area(public: PublicControlArea) -> str:
    return dump_canonical(control_area_to_dict(public))


def emit_share_file(share_file: ShareFile) -> str:
    return dump_canonical(share_file_to_dict(share_file))


def _load(path: str):
    try:
        return read_json(path)
    except ValueError as e:
        raise MalformedFileError(f"{path}: not valid JSON ({e})")


def load_control_area(path: str) -> PublicControlArea:
    return control_area_from_dict(_load(path))


def load_share_file(path: str, digest_len: int) -> ShareFile:
    return share_file_from_dict(_load(path), digest_len)


def write_control_area(path: str, public: PublicControlArea) -> None:
    atomic_write_text(path, emit_control_area(public))


def share_file_name(participant: int) -> str:
    return f"share_{participant}.json"


def staged_share_file_name(participant: int, version: int) -> str:
    return f"share_{participant}.v{version}.json"


def _write_share(path: str, public: PublicControlArea, share: Share) -> None:
    record = ShareFile(share.participant, public.version, share.value, public.scheme_id)
    atomic_write_text(path, emit_share_file(record))


def write_share_files(directory: str, public: PublicControlArea, shares) -> List[str]:
    paths = []
    for share in shares:
        path = os.path.join(directory, share_file_name(share.participant))
        _write_share(path, public, share)
        paths.append(path)
    logger.info(f"✅ Wrote {len(paths)} share files for v{public.version} to {directory}")
    return paths


def replace_scheme_files(
    directory: str, control_path: str, public: PublicControlArea, shares
) -> List[str]:
    """
    Swap in a refreshed dealing without ever leaving the directory with
    no recoverable version.

    New shares are staged as share_<i>.v<N>.json, then the control area
    is replaced atomically, then the staged files are renamed over the
    old shares. If staging or the control-area write fails the staged
    files are removed and the previous version is untouched. A failure
    during the final renames leaves the remaining v<N> files staged next
    to the new control area; renaming them by hand completes the refresh.
    """
    staged = []
    try:
        for share in shares:
            staged_path = os.path.join(directory, staged_share_file_name(share.participant, public.version))
            final_path = os.path.join(directory, share_file_name(share.participant))
            _write_share(staged_path, public, share)
            staged.append((staged_path, final_path))
        write_control_area(control_path, public)
    except Exception:
        for staged_path, _ in staged:
            if os.path.exists(staged_path):
                os.remove(staged_path)
        logger.error(f"❌ Refresh to v{public.version} aborted; v{public.version - 1} files left in place")
        raise

    for staged_path, final_path in staged:
        os.replace(staged_path, final_path)
    logger.info(f"✅ Replaced {len(staged)} share files and the control area with v{public.version}")
    return [final_path for _, final_path in staged]


def check_binding(share_file: ShareFile, public: PublicControlArea) -> None:
    """Reject shares from another scheme or another version of this one."""
    if share_file.scheme_id != public.scheme_id:
        raise ShareBindingError(
            f"share of participant {share_file.participant} belongs to scheme {share_file.scheme_id}, "
            f"control area is {public.scheme_id}"
        )
    if share_file.version != public.version:
        raise VersionError(
            f"share of participant {share_file.participant} is version {share_file.version}, "
            f"control area is version {public.version}"
        )
    if share_file.participant > public.n:
        raise MalformedFileError(f"participant {share_file.participant} outside 1..{public.n}")
