"""LRMK binary container.

Layout (little-endian): magic ``b"LRMK"``, one format-version byte, one
type-tag byte, a u32 section count, then the sections. Each section is a
kind byte followed by a u64 payload length and the payload:

* ``KIND_INTS``: int64 values.
* ``KIND_BITS``: u64 bit count, one byte of zero padding bits, packed bytes
  (first bit in the least significant position of the first byte).
"""
from __future__ import annotations

import struct
from typing import Union

import numpy as np

from .errors import LRMKitError

MAGIC = b"LRMK"
VERSION = 1

TAG_LRM_TREE = 1
TAG_RMQ_PLAIN = 2
TAG_RMQ_STRICT_RUNS = 3
TAG_RMQ_RUNS = 4
TAG_PERMCODE = 5

KIND_INTS = 1
KIND_BITS = 2


class ContainerError(LRMKitError, ValueError):
    """Malformed, truncated or version-mismatched container."""


class Writer:
    def __init__(self, tag: int):
        self.tag = tag
        self._sections: list[bytes] = []

    def ints(self, values) -> "Writer":
        arr = np.asarray(values, dtype="<i8")
        self._sections.append(bytes([KIND_INTS]) + struct.pack("<Q", arr.nbytes) + arr.tobytes())
        return self

    def bits(self, bits) -> "Writer":
        arr = np.asarray(bits, dtype=np.uint8)
        nbits = arr.size
        pad = (-nbits) % 8
        packed = np.packbits(arr, bitorder="little").tobytes()
        payload = struct.pack("<QB", nbits, pad) + packed
        self._sections.append(bytes([KIND_BITS]) + struct.pack("<Q", len(payload)) + payload)
        return self

    def to_bytes(self) -> bytes:
        head = MAGIC + bytes([VERSION, self.tag]) + struct.pack("<I", len(self._sections))
        return head + b"".join(self._sections)


class Reader:
    def __init__(self, data: bytes, expect_tag: Union[int, None] = None):
        if len(data) < 10 or data[:4] != MAGIC:
            raise ContainerError("not an LRMK container")
        if data[4] != VERSION:
            raise ContainerError(f"LRMK format version {data[4]} is not supported (expected {VERSION})")
        self.tag = data[5]
        if expect_tag is not None and self.tag != expect_tag:
            raise ContainerError(f"container holds type {self.tag}, expected {expect_tag}")
        (count,) = struct.unpack_from("<I", data, 6)
        self._sections: list[tuple[int, bytes]] = []
        pos = 10
        for _ in range(count):
            if pos + 9 > len(data):
                raise ContainerError("truncated section header")
            kind = data[pos]
            (length,) = struct.unpack_from("<Q", data, pos + 1)
            pos += 9
            if pos + length > len(data):
                raise ContainerError("truncated section payload")
            self._sections.append((kind, data[pos:pos + length]))
            pos += length
        if pos != len(data):
            raise ContainerError("trailing bytes after last section")
        self._next = 0

    def _take(self, kind: int) -> bytes:
        if self._next >= len(self._sections):
            raise ContainerError("missing section")
        k, payload = self._sections[self._next]
        if k != kind:
            raise ContainerError(f"section {self._next} has kind {k}, expected {kind}")
        self._next += 1
        return payload

    def ints(self) -> np.ndarray:
        payload = self._take(KIND_INTS)
        if len(payload) % 8:
            raise ContainerError("integer section length not a multiple of 8")
        return np.frombuffer(payload, dtype="<i8").astype(np.int64)

    def bits(self) -> np.ndarray:
        payload = self._take(KIND_BITS)
        if len(payload) < 9:
            raise ContainerError("truncated bit section")
        nbits, pad = struct.unpack_from("<QB", payload, 0)
        body = np.frombuffer(payload[9:], dtype=np.uint8)
        if body.size * 8 != nbits + pad or pad >= 8:
            raise ContainerError("bit section padding does not match its length")
        return np.unpackbits(body, bitorder="little")[:nbits]

    def done(self) -> None:
        if self._next != len(self._sections):
            raise ContainerError("unexpected extra sections")


def read_file(path: str, expect_tag: Union[int, None] = None) -> Reader:
    with open(path, "rb") as fh:
        return Reader(fh.read(), expect_tag)


def write_file(path: str, writer: Writer) -> None:
    with open(path, "wb") as fh:
        fh.write(writer.to_bytes())
