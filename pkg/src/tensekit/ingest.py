"""Parsers for corpus manifests, formant track tables, Praat Formant
exports, and 16-bit PCM WAV audio.

Everything here is total: a parse either returns a fully validated value
or raises ParseError with a line number where one makes sense. Missing
optional measurements (e.g. absent F0) are represented as NaN inside
FormantTrack so downstream numpy code can mask them uniformly.
"""

import csv
import io
import math
import re
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError

TRACK_HEADER = ("time_ms", "f1_hz", "f2_hz", "f3_hz", "f0_hz")
MANIFEST_HEADER = (
    "path", "vowel_label", "class_label", "language", "source",
    "onset_ms", "offset_ms",
)

CHANNELS = ("f1", "f2", "f3", "f0")


@dataclass
class FormantTrack:
    """Time-stamped formant frames. NaN marks a missing measurement."""

    time_ms: np.ndarray
    f1_hz: np.ndarray
    f2_hz: np.ndarray
    f3_hz: np.ndarray
    f0_hz: np.ndarray
    source_id: str = ""

    def __post_init__(self):
        for name in ("time_ms", "f1_hz", "f2_hz", "f3_hz", "f0_hz"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        n = len(self.time_ms)
        if n < 2:
            raise ParseError(f"track needs at least 2 frames, got {n}")
        if not np.all(np.isfinite(self.time_ms)):
            raise ParseError("frame times must be finite")
        if not np.all(np.diff(self.time_ms) > 0):
            raise ParseError("frame times must be strictly increasing")
        for name in ("f1_hz", "f2_hz", "f3_hz", "f0_hz"):
            values = getattr(self, name)
            if len(values) != n:
                raise ParseError(f"{name} length {len(values)} != {n} frames")
            present = values[~np.isnan(values)]
            if np.any(~np.isfinite(present)) or np.any(present <= 0.0):
                raise ParseError(f"{name} values must be positive and finite")

    def channel(self, name):
        """Return the value array for channel 'f1' | 'f2' | 'f3' | 'f0'."""
        if name not in CHANNELS:
            raise KeyError(f"unknown channel {name!r}; expected one of {CHANNELS}")
        return getattr(self, f"{name}_hz")

    @property
    def span_ms(self):
        return float(self.time_ms[0]), float(self.time_ms[-1])

    def shifted(self, offset_ms):
        """Copy of the track with all timestamps shifted by offset_ms."""
        return FormantTrack(
            self.time_ms + offset_ms, self.f1_hz, self.f2_hz,
            self.f3_hz, self.f0_hz, self.source_id,
        )


@dataclass
class AudioBuffer:
    """Mono audio, samples scaled to [-1, 1]."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1 or len(self.samples) == 0:
            raise ParseError("audio must be a non-empty mono sample sequence")
        if self.sample_rate_hz < 8000:
            raise ParseError(
                f"sample rate {self.sample_rate_hz} Hz too low (need >= 8000)"
            )
        peak = float(np.max(np.abs(self.samples)))
        if not math.isfinite(peak) or peak > 1.0:
            raise ParseError(f"samples must lie in [-1, 1], peak is {peak}")

    @property
    def duration_ms(self):
        return 1000.0 * len(self.samples) / self.sample_rate_hz


@dataclass
class ManifestEntry:
    path: str
    vowel_label: str
    class_label: str
    language: str
    source: str
    onset_ms: float
    offset_ms: float


@dataclass
class CorpusManifest:
    entries: list = field(default_factory=list)

    @property
    def class_labels(self):
        """The run's closed set of class labels, in first-seen order."""
        seen = {}
        for e in self.entries:
            seen.setdefault(e.class_label, None)
        return tuple(seen)


def _parse_float(text, line, column):
    text = text.strip()
    if text == "":
        return float("nan")
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"column {column!r}: bad number {text!r}", line=line) from None
    if not np.isfinite(value):
        raise ParseError(f"column {column!r}: non-finite value {text!r}", line=line)
    return value


def parse_track_csv(text, source_id=""):
    """Parse a formant track CSV (header time_ms,f1_hz,f2_hz,f3_hz,f0_hz).

    Empty cells are missing values. Lines starting with '#' are treated as
    embedded metadata and skipped. Extra columns after f0_hz are ignored so
    simulator outputs with auxiliary columns remain ingestible.
    """
    rows = []
    header = None
    header_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("#") or raw.strip() == "":
            continue
        cells = next(csv.reader([raw]))
        if header is None:
            header = tuple(c.strip() for c in cells)
            header_line = lineno
            if header[: len(TRACK_HEADER)] != TRACK_HEADER:
                raise ParseError(
                    f"expected header {','.join(TRACK_HEADER)}, got {raw!r}",
                    line=lineno,
                )
            continue
        if len(cells) < len(TRACK_HEADER):
            raise ParseError(
                f"expected {len(TRACK_HEADER)} columns, got {len(cells)}", line=lineno
            )
        values = [
            _parse_float(cells[i], lineno, TRACK_HEADER[i])
            for i in range(len(TRACK_HEADER))
        ]
        if np.isnan(values[0]):
            raise ParseError("time_ms cell may not be empty", line=lineno)
        if rows and values[0] <= rows[-1][1][0]:
            raise ParseError(
                f"time {values[0]} does not increase past {rows[-1][1][0]}",
                line=lineno,
            )
        rows.append((lineno, values))
    if header is None:
        raise ParseError("empty file: no header row")
    if len(rows) < 2:
        raise ParseError(
            "track needs at least 2 data rows", line=rows[-1][0] if rows else header_line
        )
    data = np.array([v for _, v in rows], dtype=float)
    return FormantTrack(
        data[:, 0], data[:, 1], data[:, 2], data[:, 3], data[:, 4], source_id
    )


def _format_number(x):
    """17 significant digits: parses back to the identical double."""
    return "" if np.isnan(x) else format(float(x), ".17g")


def format_track_csv(track):
    """Serialize a FormantTrack; parse_track_csv() round-trips bit-exactly."""
    lines = [",".join(TRACK_HEADER)]
    for i in range(len(track.time_ms)):
        lines.append(
            ",".join(
                _format_number(v)
                for v in (
                    track.time_ms[i], track.f1_hz[i], track.f2_hz[i],
                    track.f3_hz[i], track.f0_hz[i],
                )
            )
        )
    return "\n".join(lines) + "\n"


# Praat text files come in a long variant (labelled fields, bracketed frame
# indices) and a short one (bare numbers). Both carry the same token stream
# once labels, '=' signs, and bracketed indices are dropped, so a single
# tokenizer serves both.
_PRAAT_TOKEN = re.compile(
    r'"([^"]*)"'                                             # quoted string
    r"|(?<![\w.])([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"  # standalone number
    r"|(\[)|(\])"
)


def _praat_tokens(text):
    strings, numbers = [], []
    depth = 0
    for m in _PRAAT_TOKEN.finditer(text):
        quoted, number, lbrack, rbrack = m.groups()
        if lbrack:
            depth += 1
        elif rbrack:
            depth = max(0, depth - 1)
        elif quoted is not None:
            strings.append(quoted)
        elif number is not None and depth == 0:
            numbers.append(float(number))
    return strings, numbers


def parse_praat_formant(text, source_id=""):
    """Parse a Praat Formant object text file (long or short variant)."""
    strings, numbers = _praat_tokens(text)
    if not strings or strings[0] != "ooTextFile":
        raise ParseError('not a Praat text file (missing "ooTextFile" token)')
    if len(strings) < 2 or not strings[1].startswith("Formant"):
        got = strings[1] if len(strings) > 1 else "<none>"
        raise ParseError(f'expected a Formant object, got class {got!r}')

    cursor = iter(numbers)

    def take(what):
        try:
            return next(cursor)
        except StopIteration:
            raise ParseError(f"file ended while reading {what}") from None

    take("xmin")
    take("xmax")
    nx = int(take("nx"))
    dx = take("dx")
    x1 = take("x1")
    take("maxnFormants")
    if dx <= 0:
        raise ParseError(f"frame step dx must be positive, got {dx}")
    if nx < 2:
        raise ParseError(f"need at least 2 frames, got nx={nx}")

    time_ms = np.empty(nx)
    formants = np.full((nx, 3), np.nan)
    for i in range(nx):
        time_ms[i] = (x1 + i * dx) * 1000.0
        take(f"intensity of frame {i + 1}")
        n_formants = int(take(f"nFormants of frame {i + 1}"))
        for j in range(n_formants):
            freq = take(f"formant {j + 1} frequency of frame {i + 1}")
            take(f"formant {j + 1} bandwidth of frame {i + 1}")
            if j < 3 and freq > 0:
                formants[i, j] = freq
    leftover = sum(1 for _ in cursor)
    if leftover:
        raise ParseError(
            f"nx={nx} does not match frame data ({leftover} extra numbers)"
        )
    f0 = np.full(nx, np.nan)
    return FormantTrack(
        time_ms, formants[:, 0], formants[:, 1], formants[:, 2], f0, source_id
    )


def read_wav(data):
    """Decode RIFF/WAVE bytes: PCM, 16-bit, mono only.

    Samples are scaled to [-1, 1] by division by 32768.
    """
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise ParseError("not a RIFF/WAVE file")
    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack("<I", data[pos + 4 : pos + 8])
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise ParseError(
                f"truncated {chunk_id.decode('ascii', 'replace')!r} chunk: "
                f"declared {size} bytes, found {len(body)}"
            )
        if chunk_id == b"fmt ":
            if size < 16:
                raise ParseError("fmt chunk too short")
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif chunk_id == b"data":
            payload = body
        pos += 8 + size + (size % 2)  # chunks are word-aligned
    if fmt is None or payload is None:
        raise ParseError("missing fmt or data chunk")
    codec, channels, rate, _byte_rate, _align, bits = fmt
    if codec != 1:
        raise ParseError(f"unsupported codec tag {codec}; only PCM (1) is handled")
    if channels != 1:
        raise ParseError(
            f"{channels}-channel audio not supported; mix down to mono first"
        )
    if bits != 16:
        raise ParseError(f"only 16-bit PCM supported, got {bits}-bit")
    if len(payload) % 2:
        raise ParseError("data chunk length is not a whole number of samples")
    samples = np.frombuffer(payload, dtype="<i2").astype(float) / 32768.0
    return AudioBuffer(samples, int(rate))


def write_wav(buffer):
    """Encode an AudioBuffer as 16-bit PCM mono WAV bytes (test fixtures)."""
    pcm = np.clip(np.round(buffer.samples * 32768.0), -32768, 32767).astype("<i2")
    body = pcm.tobytes()
    out = io.BytesIO()
    out.write(b"RIFF")
    out.write(struct.pack("<I", 36 + len(body)))
    out.write(b"WAVE")
    out.write(b"fmt ")
    rate = buffer.sample_rate_hz
    out.write(struct.pack("<IHHIIHH", 16, 1, 1, rate, rate * 2, 2, 16))
    out.write(b"data")
    out.write(struct.pack("<I", len(body)))
    out.write(body)
    return out.getvalue()


def parse_manifest(text):
    """Parse a corpus manifest CSV.

    Header: path,vowel_label,class_label,language,source,onset_ms,offset_ms.
    Mixed class-label schemes (tense/lax alongside HL/LH) are accepted; the
    closed set for a run is whatever labels the manifest declares.
    """
    reader = csv.reader(io.StringIO(text))
    entries = []
    header = None
    for lineno, cells in enumerate(reader, start=1):
        if not cells or (len(cells) == 1 and cells[0].strip() == ""):
            continue
        if cells and cells[0].startswith("#"):
            continue
        if header is None:
            header = tuple(c.strip() for c in cells)
            if header != MANIFEST_HEADER:
                raise ParseError(
                    f"expected header {','.join(MANIFEST_HEADER)}", line=lineno
                )
            continue
        if len(cells) != len(MANIFEST_HEADER):
            raise ParseError(
                f"expected {len(MANIFEST_HEADER)} columns, got {len(cells)}",
                line=lineno,
            )
        path = cells[0].strip()
        if not path:
            raise ParseError("empty path", line=lineno)
        onset = _parse_float(cells[5], lineno, "onset_ms")
        offset = _parse_float(cells[6], lineno, "offset_ms")
        if np.isnan(onset) or np.isnan(offset):
            raise ParseError("onset_ms/offset_ms may not be empty", line=lineno)
        if onset >= offset:
            raise ParseError(
                f"onset_ms {onset} must be < offset_ms {offset}", line=lineno
            )
        entries.append(
            ManifestEntry(
                path, cells[1].strip(), cells[2].strip(), cells[3].strip(),
                cells[4].strip(), onset, offset,
            )
        )
    if header is None:
        raise ParseError("empty manifest: no header row")
    return CorpusManifest(entries)
