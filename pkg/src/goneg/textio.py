"""Opening plain or gzip-compressed text from paths and streams."""

from __future__ import annotations

import contextlib
import gzip
import io
import os
from typing import IO, Iterator, Union

Source = Union[str, os.PathLike, IO[bytes], IO[str]]

_GZIP_MAGIC = b"\x1f\x8b"


def source_name(source: Source) -> str | None:
    if isinstance(source, (str, os.PathLike)):
        return os.fspath(source)
    return getattr(source, "name", None) if isinstance(getattr(source, "name", None), str) else None


@contextlib.contextmanager
def open_text(source: Source) -> Iterator[IO[str]]:
    """Yield a text stream for a path, a binary stream or a text stream.

    Gzip input is detected from the magic bytes, not the file extension.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as raw:
            with _wrap_binary(raw) as text:
                yield text
        return
    if isinstance(source, io.TextIOBase):
        yield source
        return
    with _wrap_binary(source) as text:
        yield text


@contextlib.contextmanager
def _wrap_binary(raw: IO[bytes]) -> Iterator[IO[str]]:
    buffered = raw if hasattr(raw, "peek") else io.BufferedReader(raw)  # type: ignore[arg-type]
    head = buffered.peek(2)[:2]
    stream: IO[bytes] = gzip.GzipFile(fileobj=buffered) if head == _GZIP_MAGIC else buffered
    text = io.TextIOWrapper(stream, encoding="utf-8", errors="replace", newline=None)
    try:
        yield text
    finally:
        text.detach()
