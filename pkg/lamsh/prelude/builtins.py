"""Host implementations behind the prelude's functions and conversions."""
from pathlib import Path
from typing import Any, Iterable, Iterator
import csv
import io

from lamsh.core.config import settings
from lamsh.models.expression import LIST, STR, apply_type
from lamsh.models.values import (
    ByteStreamValue,
    LineSeqValue,
    ListValue,
    PairValue,
    TextReaderValue,
    TextWriterValue,
)
from lamsh.streaming.pump import StreamHandle, iter_lines, open_text

INT_BITS = 64
_MODULUS = 1 << INT_BITS
_HALF = 1 << (INT_BITS - 1)


def wrap_int(value: int) -> int:
    """Two's-complement wrap to a signed 64-bit integer."""
    return ((value + _HALF) % _MODULUS) - _HALF


# --- arithmetic -----------------------------------------------------------

def int_add(a: int, b: int) -> int:
    return wrap_int(a + b)


def int_subtract(a: int, b: int) -> int:
    return wrap_int(a - b)


def int_multiply(a: int, b: int) -> int:
    return wrap_int(a * b)


def int_divide(a: int, b: int) -> int:
    """Division truncating toward zero."""
    if b == 0:
        raise ZeroDivisionError("division by zero")
    quotient = abs(a) // abs(b)
    return wrap_int(quotient if (a < 0) == (b < 0) else -quotient)


def float_divide(a: float, b: float) -> float:
    if b == 0:
        raise ZeroDivisionError("division by zero")
    return a / b


# --- conversions of scalars -----------------------------------------------

def to_int(text: str) -> int:
    return wrap_int(int(text.strip()))


def to_int_radix(text: str, radix: int) -> int:
    return wrap_int(int(text.strip(), radix))


def to_str(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


# --- text and files -------------------------------------------------------

def echo(text: str) -> TextWriterValue:
    return TextWriterValue(text=text + "\n")


def cat(path: str) -> TextReaderValue:
    if not Path(path).is_file():
        raise FileNotFoundError(f"no such file: {path}")
    return TextReaderValue(path=path)


def parse_csv(reader: TextReaderValue) -> LineSeqValue:
    row_type = apply_type(LIST, STR)

    def rows() -> Iterator[ListValue]:
        for row in csv.reader(io.StringIO(open_text(reader))):
            yield ListValue(items=tuple(row), element_type=STR)

    return LineSeqValue(producer=rows, element_type=row_type)


def element_at(index: int, rows: LineSeqValue) -> LineSeqValue:
    def column() -> Iterator[str]:
        for row in rows:
            if not 0 <= index < len(row):
                raise IndexError(f"row has no column {index}: {list(row)}")
            yield row.items[index]

    return LineSeqValue(producer=column, element_type=STR)


def distinct(lines: LineSeqValue) -> LineSeqValue:
    """Unique items in first-occurrence order."""

    def unique() -> Iterator[Any]:
        seen = set()
        for item in lines:
            if item not in seen:
                seen.add(item)
                yield item

    return LineSeqValue(producer=unique, element_type=lines.element_type)


def count_items(items: Iterable[Any]) -> int:
    return sum(1 for _ in items)


def make_pair(first: Any, second: Any) -> PairValue:
    return PairValue(first=first, second=second)


# --- stream conversions ---------------------------------------------------

def _encode(text: str) -> bytes:
    return text.encode(settings.ENCODING)


def writer_to_stream(writer: TextWriterValue) -> ByteStreamValue:
    return ByteStreamValue(data=_encode(writer.text))


def reader_to_stream(reader: TextReaderValue) -> ByteStreamValue:
    if reader.stream is not None:
        return reader.stream.reopen()
    return ByteStreamValue(data=_encode(open_text(reader)))


def lines_to_stream(lines: LineSeqValue) -> ByteStreamValue:
    return ByteStreamValue(data=_encode("".join(f"{line}\n" for line in lines)))


def stream_to_reader(stream: ByteStreamValue) -> TextReaderValue:
    return TextReaderValue(stream=StreamHandle(stream).take())


def writer_to_reader(writer: TextWriterValue) -> TextReaderValue:
    return TextReaderValue(text=writer.text)


def to_lines(value: Any) -> LineSeqValue:
    """Lines of a stream or reader, read afresh on every iteration.

    A raw stream is claimed here; each iteration re-runs an unread copy.
    """
    if isinstance(value, ByteStreamValue):
        source = StreamHandle(value).take()
        return LineSeqValue(producer=lambda: iter_lines(source.reopen()), element_type=STR)
    return LineSeqValue(producer=lambda: iter_lines(value), element_type=STR)
