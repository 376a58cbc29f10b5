"""Binary PPM/PGM readers and writers for the corpus image files.

Color images are P6 (8-bit RGB), depth images are P5 with maxval 65535
(16-bit big-endian, millimeters, 0 = no hit), masks are P5 with maxval 255
(0 or 255). Writers produce byte-stable output for identical arrays.
"""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np


def write_ppm(path, color: np.ndarray) -> None:
    color = np.asarray(color, dtype=np.uint8)
    if color.ndim != 3 or color.shape[2] != 3:
        raise ValueError("color image must be HxWx3")
    h, w = color.shape[:2]
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(color.tobytes())


def write_pgm16(path, depth_mm: np.ndarray) -> None:
    depth_mm = np.asarray(depth_mm, dtype=np.uint16)
    h, w = depth_mm.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        f.write(depth_mm.astype(">u2").tobytes())


def write_pgm8(path, mask: np.ndarray) -> None:
    arr = np.where(np.asarray(mask).astype(bool), 255, 0).astype(np.uint8)
    h, w = arr.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(arr.tobytes())


def _read_header(f: io.BufferedReader, magic: bytes) -> tuple[int, int, int]:
    if f.read(2) != magic:
        raise ValueError(f"not a {magic.decode()} file")
    fields = []
    while len(fields) < 3:
        tok = b""
        ch = f.read(1)
        while ch.isspace():
            ch = f.read(1)
        if ch == b"#":  # comment to end of line
            while ch not in (b"\n", b""):
                ch = f.read(1)
            continue
        while ch and not ch.isspace():
            tok += ch
            ch = f.read(1)
        if not tok.isdigit():
            raise ValueError("malformed netpbm header")
        fields.append(int(tok))
    return fields[0], fields[1], fields[2]


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as f:
        w, h, maxval = _read_header(f, b"P6")
        if maxval != 255:
            raise ValueError("only 8-bit PPM supported")
        data = f.read(w * h * 3)
    return np.frombuffer(data, dtype=np.uint8).reshape(h, w, 3)


def read_pgm(path) -> np.ndarray:
    """Read a P5 file; returns uint16 (maxval > 255) or uint8."""
    with open(path, "rb") as f:
        w, h, maxval = _read_header(f, b"P5")
        if maxval > 255:
            data = f.read(w * h * 2)
            return np.frombuffer(data, dtype=">u2").reshape(h, w).astype(np.uint16)
        data = f.read(w * h)
        return np.frombuffer(data, dtype=np.uint8).reshape(h, w)


def ensure_parent(path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    return p
