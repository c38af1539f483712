from pytest import fixture

from src.ingest.catalog import ItemCatalog
from src.ingest.sessions import parse_sessions


# Matrix=1, StarWars=2, Fargo=3, PulpFiction=4
@fixture
def movie_catalog():
    return ItemCatalog(["1", "2", "3", "4"])


@fixture
def movie_data(movie_catalog):
    "The two-user movie example: V1 = (1, 4), V2 = (2, 4, 1)."
    return parse_sessions(["1 4", "2 4 1"], catalog=movie_catalog)


@fixture
def write_sessions(tmp_path):
    "Write session lines to a file under tmp_path and return its path."

    def write(name, lines):
        path = tmp_path / name
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return path

    return write
