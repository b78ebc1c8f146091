"""
SqlEquivJsonEncoder Object
"""

import json


class SqlEquivJsonEncoder(json.JSONEncoder):
    """
    JSON encoder for report-facing pySqlEquiv objects.

    Objects with a `__sqlequiv_json__` method are encoded as what it returns;
    sets and frozensets become sorted lists.
    """

    def default(self, o):
        if hasattr(o, "__sqlequiv_json__"):
            return o.__sqlequiv_json__()
        if isinstance(o, (set, frozenset)):
            return sorted(o, key=str)
        return super().default(o)
