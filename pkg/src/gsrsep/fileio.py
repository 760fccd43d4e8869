"""File formats: WAV audio, pitch contour CSV, and the binary dictionary file.

The dictionary format is deliberately minimal::

    magic   8 bytes   b"GSDICT1\\n"
    m, k, fft_size    little-endian uint32
    sample_rate_hz    little-endian float64
    kappa             little-endian uint32 (0 = no group partition)
    blocks            kappa * uint32
    atoms             m*k float64, column-major (atoms are contiguous)

Round trips are bit exact.  WAV support covers RIFF/WAVE with 16-bit PCM
or 32-bit IEEE float payloads, mono or stereo (stereo is averaged down).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .annotation import PitchContour
from .dictionary import Dictionary
from .dsp import AudioClip
from .errors import CorruptFileError, DataFormatError, UnsupportedFormatError

__all__ = [
    "load_wav",
    "save_wav",
    "parse_pitch",
    "write_pitch",
    "save_dict",
    "load_dict",
    "DICT_MAGIC",
]

DICT_MAGIC = b"GSDICT1\n"


def load_wav(path):
    """Read a RIFF/WAVE file as a mono clip with samples in [-1, 1]."""
    data = Path(path).read_bytes()
    if len(data) < 12:
        raise DataFormatError(f"{path}: truncated RIFF header (need 12 bytes, have {len(data)})")
    if data[:4] != b"RIFF":
        raise DataFormatError(f"{path}: missing RIFF tag at byte 0")
    if data[8:12] != b"WAVE":
        raise DataFormatError(f"{path}: missing WAVE tag at byte 8")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + chunk_size]
        if len(body) < chunk_size:
            raise DataFormatError(
                f"{path}: chunk {chunk_id!r} at byte {pos} claims {chunk_size} "
                f"bytes but only {len(body)} remain"
            )
        if chunk_id == b"fmt ":
            if chunk_size < 16:
                raise DataFormatError(f"{path}: fmt chunk at byte {pos} too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            payload = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word aligned

    if fmt is None:
        raise DataFormatError(f"{path}: missing fmt chunk")
    if payload is None:
        raise DataFormatError(f"{path}: missing data chunk")

    audio_format, channels, rate, _, _, bits = fmt
    if channels not in (1, 2):
        raise UnsupportedFormatError(f"{path}: {channels} channels unsupported (mono/stereo only)")
    if (audio_format, bits) == (1, 16):
        samples = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    elif (audio_format, bits) == (3, 32):
        samples = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise UnsupportedFormatError(
            f"{path}: codec (format={audio_format}, bits={bits}) unsupported; "
            "expected 16-bit PCM or 32-bit IEEE float"
        )
    if samples.size == 0:
        raise DataFormatError(f"{path}: data chunk holds no samples")
    if channels == 2:
        if samples.size % 2:
            raise DataFormatError(f"{path}: stereo data chunk has an odd sample count")
        samples = samples.reshape(-1, 2).mean(axis=1)
    return AudioClip(samples=samples, sample_rate_hz=float(rate))


def save_wav(path, clip):
    """Write a clip as mono 16-bit PCM (no dither; values clipped to full scale)."""
    scaled = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    payload = scaled.tobytes()
    rate = int(round(clip.sample_rate_hz))
    header = b"".join([
        b"RIFF",
        struct.pack("<I", 36 + len(payload)),
        b"WAVE",
        b"fmt ",
        struct.pack("<IHHIIHH", 16, 1, 1, rate, rate * 2, 2, 16),
        b"data",
        struct.pack("<I", len(payload)),
    ])
    Path(path).write_bytes(header + payload + (b"\x00" if len(payload) & 1 else b""))


def parse_pitch(path, frame_period=None):
    """Parse a pitch contour file.

    The standard layout is a ``time_sec,f0_hz`` header followed by one
    comma-separated record per line (f0 = 0 marks unvoiced).  With
    ``frame_period`` set, a headerless single-column file of f0 values is
    accepted instead, timestamped at multiples of the period.
    """
    lines = Path(path).read_text().splitlines()
    records = [(i + 1, line.strip()) for i, line in enumerate(lines) if line.strip()]
    if not records:
        raise DataFormatError(f"{path}: no pitch records found")

    times = []
    f0s = []
    if frame_period is not None:
        if frame_period <= 0:
            raise ValueError("frame_period must be positive")
        for row, (lineno, text) in enumerate(records):
            try:
                value = float(text)
            except ValueError:
                raise DataFormatError(
                    f"{path}:{lineno}: expected a single f0 value, got {text!r}"
                ) from None
            times.append(row * frame_period)
            f0s.append(value)
    else:
        header_line, header = records[0]
        if header.replace(" ", "") != "time_sec,f0_hz":
            raise DataFormatError(
                f"{path}:{header_line}: expected header 'time_sec,f0_hz', got {header!r}"
            )
        for lineno, text in records[1:]:
            parts = text.split(",")
            if len(parts) != 2:
                raise DataFormatError(
                    f"{path}:{lineno}: expected 'time,f0', got {text!r}"
                )
            try:
                t, f0 = float(parts[0]), float(parts[1])
            except ValueError:
                raise DataFormatError(
                    f"{path}:{lineno}: non-numeric record {text!r}"
                ) from None
            if times and t <= times[-1]:
                raise DataFormatError(
                    f"{path}:{lineno}: times must be strictly increasing "
                    f"({t} after {times[-1]})"
                )
            times.append(t)
            f0s.append(f0)
        if not times:
            raise DataFormatError(f"{path}: header present but no records follow")

    for (lineno, _), f0 in zip(records if frame_period is not None else records[1:], f0s):
        if f0 < 0:
            raise DataFormatError(f"{path}:{lineno}: negative f0 {f0}")
    return PitchContour(times=np.array(times), f0=np.array(f0s))


def write_pitch(path, contour):
    """Write the standard two-column contour file (full float precision)."""
    lines = ["time_sec,f0_hz"]
    lines += [f"{float(t)!r},{float(f0)!r}" for t, f0 in zip(contour.times, contour.f0)]
    Path(path).write_text("\n".join(lines) + "\n")


def save_dict(path, dictionary):
    """Serialize a dictionary (bit-exact round trip with :func:`load_dict`)."""
    atoms = dictionary.atoms
    m, k = atoms.shape
    groups = dictionary.groups or ()
    blob = b"".join([
        DICT_MAGIC,
        struct.pack("<III", m, k, dictionary.fft_size),
        struct.pack("<d", dictionary.sample_rate_hz),
        struct.pack("<I", len(groups)),
        struct.pack(f"<{len(groups)}I", *groups) if groups else b"",
        atoms.astype("<f8").tobytes(order="F"),
    ])
    Path(path).write_bytes(blob)


def load_dict(path):
    """Load and validate a serialized dictionary."""
    data = Path(path).read_bytes()
    if data[:8] != DICT_MAGIC:
        raise DataFormatError(f"{path}: bad magic bytes {data[:8]!r}")
    if len(data) < 32:
        raise CorruptFileError(f"{path}: header truncated ({len(data)} bytes)")
    m, k, fft_size = struct.unpack_from("<III", data, 8)
    (sample_rate,) = struct.unpack_from("<d", data, 20)
    (kappa,) = struct.unpack_from("<I", data, 28)
    expected = 32 + 4 * kappa + 8 * m * k
    if len(data) != expected:
        raise CorruptFileError(
            f"{path}: file is {len(data)} bytes but the header implies {expected}"
        )
    groups = struct.unpack_from(f"<{kappa}I", data, 32) if kappa else None
    atoms = np.frombuffer(data, dtype="<f8", offset=32 + 4 * kappa).reshape((m, k), order="F")
    if np.any(atoms < 0):
        raise CorruptFileError(f"{path}: atom matrix contains negative entries")
    try:
        return Dictionary(
            atoms=atoms.copy(),
            sample_rate_hz=sample_rate,
            fft_size=fft_size,
            groups=groups,
        )
    except ValueError as exc:
        raise CorruptFileError(f"{path}: {exc}") from None
