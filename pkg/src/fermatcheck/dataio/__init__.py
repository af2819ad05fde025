from .formats import dump_json, field_from_json, field_to_json, newforms_from_json, newforms_to_json
from .store import FixtureStore, load_field, load_newforms

__all__ = [
    "FixtureStore",
    "dump_json",
    "field_from_json",
    "field_to_json",
    "load_field",
    "load_newforms",
    "newforms_from_json",
    "newforms_to_json",
]
