"""On-disk formats.

Matrix file: 8-byte ASCII magic ``SSMMAT01``, rows and cols as little-endian
uint32, then ``rows * cols`` little-endian float64 values in row-major order.

Model file: magic ``SSMMODEL``, a fixed header (version, N_g, N_l, alpha, T,
kernel_k), then the Q matrix, R factor and per-vertex bandwidths as embedded
matrix records, and finally a length-prefixed JSON manifest describing the
vertex order and the remaining learning options.
"""

import csv
import io
import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, ShapeError
from .graph import AffinityGraph

MATRIX_MAGIC = b"SSMMAT01"
MODEL_MAGIC = b"SSMMODEL"
MODEL_VERSION = 1

_MATRIX_HEADER = struct.Struct("<8sII")
_MODEL_HEADER = struct.Struct("<8sIIIdII")
_U32 = struct.Struct("<I")


# -- matrices ---------------------------------------------------------------

def _matrix_bytes(m):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ShapeError(f"matrix files hold non-empty 2-D matrices, got shape {m.shape}")
    if max(m.shape) > 0xFFFFFFFF:
        raise ShapeError(f"matrix {m.shape} too large for the file header")
    return _MATRIX_HEADER.pack(MATRIX_MAGIC, *m.shape) + m.astype("<f8").tobytes(order="C")


def _read_exact(f, size, what):
    offset = f.tell()
    data = f.read(size)
    if len(data) != size:
        raise FormatError(f"truncated {what} at byte {offset}: wanted {size} bytes, got {len(data)}")
    return data


def _read_matrix_header(f):
    offset = f.tell()
    magic, rows, cols = _MATRIX_HEADER.unpack(_read_exact(f, _MATRIX_HEADER.size, "matrix header"))
    if magic != MATRIX_MAGIC:
        raise FormatError(f"bad matrix magic {magic!r} at byte {offset}")
    if rows == 0 or cols == 0:
        raise FormatError(f"empty {rows}x{cols} matrix at byte {offset}")
    return rows, cols


def _read_matrix(f):
    rows, cols = _read_matrix_header(f)
    payload = _read_exact(f, rows * cols * 8, "matrix payload")
    return np.frombuffer(payload, dtype="<f8").reshape(rows, cols).astype(np.float64)


def write_matrix(path, m):
    data = _matrix_bytes(m)
    with open(path, "wb") as f:
        f.write(data)


def read_matrix(path):
    with open(path, "rb") as f:
        m = _read_matrix(f)
        trailing = f.read(1)
        if trailing:
            raise FormatError(f"unexpected trailing data at byte {f.tell() - 1}")
    return m


def iter_matrix_rows(path):
    """Yield rows of a matrix file one at a time without loading the payload."""
    with open(path, "rb") as f:
        rows, cols = _read_matrix_header(f)
        for _ in range(rows):
            yield np.frombuffer(_read_exact(f, cols * 8, "matrix row"), dtype="<f8").astype(np.float64)


def read_csv_matrix(path):
    with open(path, newline="") as f:
        rows = [[float(x) for x in row] for row in csv.reader(f) if row]
    if not rows or len({len(r) for r in rows}) != 1:
        raise FormatError(f"{path}: expected a non-empty rectangular CSV of numbers")
    return np.array(rows, dtype=np.float64)


def iter_csv_rows(path):
    with open(path, newline="") as f:
        for row in csv.reader(f):
            if row:
                yield np.array([float(x) for x in row], dtype=np.float64)


def load_any_matrix(path):
    return read_csv_matrix(path) if str(path).endswith(".csv") else read_matrix(path)


def iter_any_rows(path):
    return iter_csv_rows(path) if str(path).endswith(".csv") else iter_matrix_rows(path)


# -- labels -----------------------------------------------------------------

def read_labels(path):
    """Read ``index,block,identity`` rows.

    Returns ``(gallery_indices, labeled_indices, labeled_identities)`` with each
    block sorted by index.
    """
    gallery, labeled = [], []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != ["index", "block", "identity"]:
            raise FormatError(f"{path}: header must be 'index,block,identity'")
        for line, row in enumerate(reader, start=2):
            try:
                idx = int(row["index"])
            except (TypeError, ValueError):
                raise FormatError(f"{path}:{line}: bad index {row['index']!r}") from None
            block = (row["block"] or "").strip()
            ident = (row["identity"] or "").strip()
            if block == "gallery":
                gallery.append(idx)
            elif block == "labeled":
                if not ident:
                    raise FormatError(f"{path}:{line}: labeled row without identity")
                try:
                    labeled.append((idx, int(ident)))
                except ValueError:
                    raise FormatError(f"{path}:{line}: identity must be an integer, got {ident!r}") from None
            else:
                raise FormatError(f"{path}:{line}: block must be 'gallery' or 'labeled', got {block!r}")
    labeled.sort()
    return sorted(gallery), [i for i, _ in labeled], [c for _, c in labeled]


def write_labels(path, gallery_indices, labeled_indices, labeled_identities):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["index", "block", "identity"])
        for idx in gallery_indices:
            w.writerow([idx, "gallery", ""])
        for idx, ident in zip(labeled_indices, labeled_identities):
            w.writerow([idx, "labeled", ident])


# -- model ------------------------------------------------------------------

@dataclass
class ModelFile:
    n_gallery: int
    n_labeled: int
    alpha: float
    iterations: int
    kernel_k: int
    q: np.ndarray
    r: np.ndarray
    sigmas: np.ndarray
    manifest: dict = field(default_factory=dict)

    @property
    def vertex_indices(self):
        """Input-file index of each vertex, in ``[gallery | labeled]`` order."""
        return np.asarray(self.manifest["vertex_indices"], dtype=np.int64)

    @property
    def gallery_indices(self):
        return self.vertex_indices[: self.n_gallery]

    def probe_graph(self):
        """Bandwidth-only graph view, enough to build probe transition rows."""
        return AffinityGraph(w=None, p=None, sigmas=self.sigmas, kernel_k=self.kernel_k,
                             sigma_floor=float(self.manifest["sigma_floor"]))


def _manifest_bytes(manifest):
    return json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")


def model_bytes(model):
    n = model.n_gallery + model.n_labeled
    if model.q.shape != (n, n) or model.r.shape != (n, model.n_gallery) or model.sigmas.shape != (n,):
        raise ShapeError(f"inconsistent model shapes: q {model.q.shape}, r {model.r.shape}, "
                         f"sigmas {model.sigmas.shape} for N_g={model.n_gallery}, N_l={model.n_labeled}")
    buf = io.BytesIO()
    buf.write(_MODEL_HEADER.pack(MODEL_MAGIC, MODEL_VERSION, model.n_gallery, model.n_labeled,
                                 float(model.alpha), model.iterations, model.kernel_k))
    buf.write(_matrix_bytes(model.q))
    buf.write(_matrix_bytes(model.r))
    buf.write(_matrix_bytes(model.sigmas[None, :]))
    manifest = _manifest_bytes(model.manifest)
    buf.write(_U32.pack(len(manifest)))
    buf.write(manifest)
    return buf.getvalue()


def save_model(path, model):
    data = model_bytes(model)
    with open(path, "wb") as f:
        f.write(data)


def load_model(path):
    with open(path, "rb") as f:
        magic, version, n_g, n_l, alpha, iters, kernel_k = _MODEL_HEADER.unpack(
            _read_exact(f, _MODEL_HEADER.size, "model header"))
        if magic != MODEL_MAGIC:
            raise FormatError(f"bad model magic {magic!r} at byte 0")
        if version != MODEL_VERSION:
            raise FormatError(f"unsupported model version {version} at byte 8")
        n = n_g + n_l
        sections = []
        for name, shape in (("Q", (n, n)), ("R", (n, n_g)), ("sigmas", (1, n))):
            offset = f.tell()
            m = _read_matrix(f)
            if m.shape != shape:
                raise FormatError(f"{name} section at byte {offset} has shape {m.shape}, expected {shape}")
            sections.append(m)
        (length,) = _U32.unpack(_read_exact(f, _U32.size, "manifest length"))
        offset = f.tell()
        raw = _read_exact(f, length, "manifest")
        try:
            manifest = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"corrupt manifest at byte {offset}: {exc}") from None
        if f.read(1):
            raise FormatError(f"unexpected trailing data at byte {f.tell() - 1}")
    q, r, sigmas = sections
    return ModelFile(n_gallery=n_g, n_labeled=n_l, alpha=alpha, iterations=iters, kernel_k=kernel_k,
                     q=q, r=r, sigmas=sigmas[0], manifest=manifest)


# -- rankings and ground truth ---------------------------------------------

RANKING_HEADER = ["probe", "rank", "gallery_index", "score"]


def write_rankings(f, probe, ranking, gallery_indices, top=None):
    """Append one probe's ranked list to an open CSV writer."""
    order = ranking.order if top is None else ranking.order[:top]
    for rank, pos in enumerate(order, start=1):
        f.writerow([probe, rank, int(gallery_indices[pos]), repr(float(ranking.scores[pos]))])


def read_rankings(path):
    """Return ``{probe: [(rank, gallery_index, score), ...]}`` in rank order."""
    out = {}
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != RANKING_HEADER:
            raise FormatError(f"{path}: header must be {','.join(RANKING_HEADER)}")
        for line, row in enumerate(reader, start=2):
            try:
                out.setdefault(int(row["probe"]), []).append(
                    (int(row["rank"]), int(row["gallery_index"]), float(row["score"])))
            except (TypeError, ValueError):
                raise FormatError(f"{path}:{line}: malformed ranking row") from None
    for rows in out.values():
        rows.sort()
    return out


def write_truth(path, probe_identities, gallery_indices, gallery_identities):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["role", "index", "identity"])
        for i, ident in enumerate(probe_identities):
            w.writerow(["probe", i, ident])
        for idx, ident in zip(gallery_indices, gallery_identities):
            w.writerow(["gallery", idx, ident])


def read_truth(path):
    """Return ``(probe_identities, gallery_indices, gallery_identities)``.

    Probes are listed by probe number; gallery rows keep file order.
    """
    probes, g_idx, g_ids = {}, [], []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != ["role", "index", "identity"]:
            raise FormatError(f"{path}: header must be 'role,index,identity'")
        for line, row in enumerate(reader, start=2):
            try:
                idx, ident = int(row["index"]), int(row["identity"])
            except (TypeError, ValueError):
                raise FormatError(f"{path}:{line}: malformed truth row") from None
            if row["role"] == "probe":
                probes[idx] = ident
            elif row["role"] == "gallery":
                g_idx.append(idx)
                g_ids.append(ident)
            else:
                raise FormatError(f"{path}:{line}: role must be 'probe' or 'gallery'")
    if sorted(probes) != list(range(len(probes))):
        raise FormatError(f"{path}: probe numbers must be 0..{len(probes) - 1}")
    return [probes[i] for i in range(len(probes))], g_idx, g_ids
