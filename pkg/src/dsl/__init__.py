from src.dsl.fixture import (
    FixtureFile,
    format_fixture,
    parse,
    parse_bytes,
    parse_file,
    parse_ideal,
)

__all__ = ["FixtureFile", "format_fixture", "parse", "parse_bytes", "parse_file", "parse_ideal"]
