"""Fixed CSV formats: '.' decimal, ',' separator, 9 significant digits,
header row.  Every file written here is re-parseable by the readers below."""

import csv
import io


def fmt(value):
    """One CSV cell: floats at 9 significant digits, everything else as str."""
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def write_rows(header, rows):
    """CSV text for a header and an iterable of row sequences."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(cell) for cell in row])
    return buf.getvalue()


def _convert(cell):
    if cell == "":
        return None
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def read_rows(text):
    """Parse CSV text back to (header, rows-of-parsed-cells)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = [[_convert(cell) for cell in row] for row in reader]
    return header, rows


def read_records(text):
    """Parse CSV text to a list of {column: value} dicts."""
    header, rows = read_rows(text)
    return [dict(zip(header, row)) for row in rows]
