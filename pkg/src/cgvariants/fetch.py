"""Download and cache Matrix Market test matrices.

Matrices are looked up by name in a cache directory (``$CGVARIANTS_CACHE`` or
``~/.cache/cgvariants``).  On a miss the archive is downloaded from the first
base URL that has it, decompressed, validated by parsing, and only then
written to the cache together with its SHA-256 in ``index.json``.
"""

from __future__ import annotations

import gzip
import hashlib
import io
import json
import logging
import os
import tarfile
import tempfile
import urllib.error
import urllib.request
from pathlib import Path

from .mmio import MatrixMarketError, parse_matrix_market
from .reference import GROUPS

log = logging.getLogger(__name__)

CACHE_ENV = "CGVARIANTS_CACHE"
BASE_URL_ENV = "CGVARIANTS_BASE_URL"

# ``{group}`` and ``{name}`` are substituted; the suffix decides decompression.
DEFAULT_BASE_URLS = (
    "https://sparse.tamu.edu/MM/{group}/{name}.tar.gz",
    "https://suitesparse-collection-website.herokuapp.com/MM/{group}/{name}.tar.gz",
)


class FetchError(RuntimeError):
    """Base class for matrix acquisition failures."""


class MatrixNotFound(FetchError):
    pass


class NetworkError(FetchError):
    pass


class OfflineCacheMiss(NetworkError):
    """The matrix is not cached and no source could be reached."""


class HashMismatch(FetchError):
    pass


class CorruptDownload(FetchError):
    """Downloaded content did not decompress or parse as a Matrix Market file."""


class TransportError(Exception):
    """Raised by transports; ``status`` is the HTTP status when known."""

    def __init__(self, message, status=None):
        super().__init__(message)
        self.status = status


def urllib_transport(url, timeout=60):
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            return resp.read()
    except urllib.error.HTTPError as exc:
        raise TransportError(str(exc), status=exc.code) from exc
    except (urllib.error.URLError, OSError) as exc:
        raise TransportError(str(exc)) from exc


def default_cache_dir():
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "cgvariants"


def base_urls():
    env = os.environ.get(BASE_URL_ENV)
    if env:
        return tuple(u for u in env.split(",") if u.strip())
    return DEFAULT_BASE_URLS


def _extract(url, payload, name):
    """Return the ``.mtx`` text inside a downloaded payload."""
    if url.endswith((".tar.gz", ".tgz")):
        with tarfile.open(fileobj=io.BytesIO(payload), mode="r:gz") as tar:
            members = [m for m in tar.getmembers() if m.isfile() and m.name.endswith(f"{name}.mtx")]
            if not members:
                raise CorruptDownload(f"archive from {url} has no {name}.mtx")
            return tar.extractfile(members[0]).read()
    if url.endswith(".gz"):
        return gzip.decompress(payload)
    return payload


def _sha256(data):
    return hashlib.sha256(data).hexdigest()


class _Index:
    def __init__(self, cache_dir):
        self.path = Path(cache_dir) / "index.json"

    def load(self):
        if not self.path.exists():
            return {}
        return json.loads(self.path.read_text())

    def record(self, name, digest):
        data = self.load()
        data[name] = digest
        _atomic_write(self.path, json.dumps(data, indent=1, sort_keys=True).encode())


def _atomic_write(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cached_path(name, cache_dir=None):
    return Path(cache_dir or default_cache_dir()) / f"{name}.mtx"


def fetch_matrix(name, cache_dir=None, transport=None, urls=None, refresh=False):
    """Return the path of the cached ``name.mtx``, downloading it if needed.

    Parameters
    ----------
    name : str
        Matrix name, e.g. ``"nos4"``.
    cache_dir : path, optional
    transport : callable, optional
        ``transport(url) -> bytes``; raises :class:`TransportError`.
    urls : sequence of str, optional
        URL templates with ``{group}`` and ``{name}`` placeholders.
    refresh : bool
        Download even when cached; the content must hash to the recorded value.

    Raises
    ------
    MatrixNotFound, OfflineCacheMiss, NetworkError, CorruptDownload, HashMismatch
    """
    cache_dir = Path(cache_dir or default_cache_dir())
    target = cached_path(name, cache_dir)
    index = _Index(cache_dir)
    known = index.load().get(name)
    if target.exists() and not refresh:
        if known is not None and _sha256(target.read_bytes()) != known:
            raise HashMismatch(f"cached {target} does not match its recorded hash")
        return target

    transport = transport or urllib_transport
    group = GROUPS.get(name, "HB")
    failures, not_found = [], 0
    templates = urls or base_urls()
    for template in templates:
        url = template.format(name=name, group=group)
        log.info("fetching %s", url)
        try:
            payload = transport(url)
        except TransportError as exc:
            if exc.status == 404:
                not_found += 1
            failures.append(f"{url}: {exc}")
            continue
        try:
            text = _extract(url, payload, name)
            parse_matrix_market(text)
        except (MatrixMarketError, tarfile.TarError, OSError, EOFError) as exc:
            raise CorruptDownload(f"{url}: {exc}") from exc
        digest = _sha256(text)
        if known is not None and digest != known:
            raise HashMismatch(f"{name}: downloaded content hash {digest[:12]} != recorded {known[:12]}")
        _atomic_write(target, text)
        if known is None:
            index.record(name, digest)
        return target

    detail = "; ".join(failures)
    if templates and not_found == len(templates):
        raise MatrixNotFound(f"{name} not found at any source: {detail}")
    raise OfflineCacheMiss(f"{name} is not cached in {cache_dir} and no source was reachable: {detail}")


__all__ = [
    "CorruptDownload", "DEFAULT_BASE_URLS", "FetchError", "HashMismatch", "MatrixNotFound", "NetworkError",
    "OfflineCacheMiss", "TransportError", "cached_path", "default_cache_dir", "fetch_matrix", "urllib_transport",
]
