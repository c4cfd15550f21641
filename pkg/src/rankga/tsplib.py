"""Reading and writing TSPLIB ``EUC_2D`` instances."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

SUPPORTED_EDGE_WEIGHT_TYPES = ("EUC_2D",)

_HEADER = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?::\s*(.*?))?\s*$")


class TsplibError(ValueError):
    """Raised for any malformed or unsupported TSPLIB input."""

    def __init__(self, message: str, line_no: int | None = None, line: str | None = None):
        self.line_no = line_no
        self.line = line
        if line_no is not None:
            message = f"line {line_no}: {message}: {line!r}"
        super().__init__(message)


@dataclass(frozen=True)
class TsplibHeader:
    name: str
    dimension: int
    edge_weight_type: str = "EUC_2D"


@dataclass(frozen=True, eq=False)
class TspInstance:
    """Cities of a Euclidean TSP instance, 0-based."""

    name: str
    cities: np.ndarray
    comment: str = ""
    _distances: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        cities = np.ascontiguousarray(self.cities, dtype=float)
        if cities.ndim != 2 or cities.shape[1] != 2:
            raise ValueError("cities must be an (n, 2) array")
        cities.setflags(write=False)
        object.__setattr__(self, "cities", cities)

    @property
    def dimension(self) -> int:
        return self.cities.shape[0]

    def __eq__(self, other):
        if not isinstance(other, TspInstance):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.cities, other.cities)

    def __hash__(self):
        return hash((self.name, self.cities.tobytes()))

    def distance_matrix(self, rounded: bool = False) -> np.ndarray:
        """Pairwise Euclidean distances, optionally rounded to the nearest integer as TSPLIB does."""
        if rounded not in self._distances:
            delta = self.cities[:, None, :] - self.cities[None, :, :]
            d = np.hypot(delta[..., 0], delta[..., 1])
            if rounded:
                d = np.floor(d + 0.5)
            d.setflags(write=False)
            self._distances[rounded] = d
        return self._distances[rounded]


def _split_lines(text: str | bytes) -> list[str]:
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TsplibError(f"input is not valid UTF-8 ({exc.reason})") from None
    return text.splitlines()


def parse_tsplib(text: str | bytes) -> TspInstance:
    """Parse TSPLIB text holding a ``NODE_COORD_SECTION`` with ``EUC_2D`` weights.

    Raises
    ------
    TsplibError
        If ``DIMENSION`` is missing or invalid, the edge weight type is not
        supported, a coordinate line is malformed, or the number of
        coordinates disagrees with ``DIMENSION``.
    """
    lines = _split_lines(text)
    header: dict[str, str] = {}
    comments: list[str] = []
    coords: dict[int, tuple[float, float]] = {}
    in_coords = False
    seen_coords = False

    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if in_coords and not line[0].isalpha():
            parts = line.split()
            if len(parts) != 3:
                raise TsplibError("malformed coordinate line", line_no, raw)
            try:
                index = int(parts[0])
                x, y = float(parts[1]), float(parts[2])
            except ValueError:
                raise TsplibError("malformed coordinate line", line_no, raw) from None
            if not (np.isfinite(x) and np.isfinite(y)):
                raise TsplibError("non-finite coordinate", line_no, raw)
            if index in coords:
                raise TsplibError("duplicate node index", line_no, raw)
            coords[index] = (x, y)
            continue
        in_coords = False
        if line == "EOF":
            break
        match = _HEADER.match(line)
        if match is None:
            raise TsplibError("unrecognised line", line_no, raw)
        key, value = match.group(1).upper(), match.group(2)
        if key == "NODE_COORD_SECTION":
            if seen_coords:
                raise TsplibError("repeated NODE_COORD_SECTION", line_no, raw)
            in_coords = seen_coords = True
            continue
        if key.endswith("_SECTION"):
            # other sections (display data, tours) are skipped wholesale
            continue
        if value is None:
            raise TsplibError("header line without a value", line_no, raw)
        if key == "COMMENT":
            comments.append(value)
        elif key == "EDGE_WEIGHT_TYPE" and value.upper() not in SUPPORTED_EDGE_WEIGHT_TYPES:
            raise TsplibError(f"unsupported EDGE_WEIGHT_TYPE {value!r}", line_no, raw)
        else:
            header[key] = value

    if "DIMENSION" not in header:
        raise TsplibError("missing DIMENSION")
    try:
        dimension = int(header["DIMENSION"])
    except ValueError:
        raise TsplibError(f"DIMENSION is not an integer: {header['DIMENSION']!r}") from None
    if dimension <= 0:
        raise TsplibError(f"DIMENSION must be positive, got {dimension}")
    if "EDGE_WEIGHT_TYPE" not in header:
        raise TsplibError("missing EDGE_WEIGHT_TYPE")
    if len(coords) != dimension:
        raise TsplibError(f"DIMENSION is {dimension} but {len(coords)} coordinates were given")
    if sorted(coords) != list(range(1, dimension + 1)):
        raise TsplibError(f"node indices must be exactly 1..{dimension}")

    cities = np.array([coords[i] for i in range(1, dimension + 1)], dtype=float)
    return TspInstance(name=header.get("NAME", ""), cities=cities, comment="\n".join(comments))


def load_tsplib(path: str | Path) -> TspInstance:
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read TSPLIB file {path}: {exc.strerror}") from exc
    try:
        return parse_tsplib(text)
    except TsplibError as exc:
        raise TsplibError(f"{path}: {exc}") from None


def to_tsplib(instance: TspInstance) -> str:
    """Serialise `instance`; ``parse_tsplib(to_tsplib(x)) == x`` holds exactly."""
    out = [f"NAME : {instance.name}"]
    out += [f"COMMENT : {c}" for c in instance.comment.splitlines()]
    out += ["TYPE : TSP", f"DIMENSION : {instance.dimension}", "EDGE_WEIGHT_TYPE : EUC_2D", "NODE_COORD_SECTION"]
    out += [f"{i} {x!r} {y!r}" for i, (x, y) in enumerate(instance.cities.tolist(), start=1)]
    out.append("EOF")
    return "\n".join(out) + "\n"


def parse_tour(text: str | bytes) -> list[int]:
    """Read a TSPLIB ``TOUR_SECTION`` and return the tour as 0-based city indices."""
    tour: list[int] = []
    in_tour = False
    for line_no, raw in enumerate(_split_lines(text), start=1):
        line = raw.strip()
        if line.upper().startswith("TOUR_SECTION"):
            in_tour = True
            continue
        if not in_tour or not line:
            continue
        if line in ("-1", "EOF"):
            break
        try:
            tour.extend(int(tok) - 1 for tok in line.split())
        except ValueError:
            raise TsplibError("malformed tour line", line_no, raw) from None
    if sorted(tour) != list(range(len(tour))) or not tour:
        raise TsplibError("tour is not a permutation of 1..n")
    return tour


def instance_checksum(instance: TspInstance) -> str:
    """64-bit content digest (hex) of the dimension and coordinates."""
    h = hashlib.blake2b(digest_size=8)
    h.update(instance.dimension.to_bytes(8, "little"))
    h.update(np.ascontiguousarray(instance.cities, dtype="<f8").tobytes())
    return h.hexdigest()


def wi29() -> TspInstance:
    """The bundled 29-city Western Sahara instance."""
    return parse_tsplib(resources.files("rankga.data").joinpath("wi29.tsp").read_bytes())


def wi29_optimal_tour() -> list[int]:
    return parse_tour(resources.files("rankga.data").joinpath("wi29.opt.tour").read_bytes())
