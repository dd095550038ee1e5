"""Reference-sample cache and report files."""
from .reference_cache import ReferenceCache, ReferenceKey, parse_header
