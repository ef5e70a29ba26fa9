"""
Text forms of results: CSV rows at full double precision and JSON
records.

>>> list(csv_lines(['t', 'E'], [(0.0, 1 / 3)]))
['t,E', '0,0.33333333333333331']
"""

import csv
import io
import itertools
import json
import numbers


def number(value):
    """
    >>> number(0.1), number(3), number('Conserved'), number(True)
    ('0.10000000000000001', '3', 'Conserved', 'True')
    """
    if isinstance(value, numbers.Real) and not isinstance(value, (bool, numbers.Integral)):
        return '%.17g' % value
    return str(value)


def csv_lines(header, rows):
    "One CSV line per row, header first, without line terminators."
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    for row in itertools.chain([header], rows):
        writer.writerow(map(number, row))
        yield buffer.getvalue()[:-1]
        buffer.seek(0)
        buffer.truncate()


def record_json(record):
    """
    >>> record_json({'kind': 'Conserved', 'b1': 0.5})
    '{"kind": "Conserved", "b1": 0.5}'
    """
    return json.dumps(record, allow_nan=False)


def parse_record(text):
    return json.loads(text)
