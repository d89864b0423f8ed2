"""Segmented sieves and the persistent prime store.

The store keeps every prime up to ``limit`` (uint32/uint64 array) together with
checkpointed prefix sums of 1/p.  Those sums are held as exact fixed-point
integers: each 1/p is rounded down to ``prec + 32`` fractional bits, so the
accumulated error after pi(x) terms is below pi(x) * 2^-(prec+32), well under
the 2^(-prec+24) * pi(x) budget.  Sums of log(p)^j / p are only needed at
double accuracy (they feed tail checks and oracles) and use math.fsum per
segment.

Cache layout (``cache_dir``)::

    primes-<limit>.bin      MAGIC | header | little-endian prime array | checkpoint ints
    primes-<limit>.json     sidecar manifest: version, limit, prec, sha256 of .bin
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import struct
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import mpmath
import numpy as np
from mpmath import mpf

from .numkernel import DEFAULT_PREC, check_prec, precision

log = logging.getLogger(__name__)

SEGMENT = 1 << 20
CACHE_VERSION = 1
MAGIC = b"MERTPRM1"
FRAC_GUARD = 32
PREFIX_BLOCK = 256
ENV_CACHE_DIR = "MERTENS_CACHE_DIR"


class PrimeLimitError(ValueError):
    pass


def simple_sieve(n: int) -> np.ndarray:
    """Monolithic sieve of Eratosthenes; primes <= n as int64."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for i in range(3, math.isqrt(n) + 1, 2):
        if flags[i]:
            flags[i * i :: 2 * i] = False
    return np.flatnonzero(flags).astype(np.int64)


def primes_in_segment(lo: int, hi: int, base: np.ndarray | None = None) -> np.ndarray:
    """Primes p with lo <= p < hi."""
    lo = max(lo, 2)
    if hi <= lo:
        return np.zeros(0, dtype=np.int64)
    root = math.isqrt(hi - 1)
    if base is None:
        base = simple_sieve(root)
    flags = np.ones(hi - lo, dtype=bool)
    for p in base:
        p = int(p)
        if p > root:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        flags[start - lo :: p] = False
    return np.flatnonzero(flags).astype(np.int64) + lo


def segments(limit: int, size: int = SEGMENT) -> Iterator[tuple[int, int]]:
    lo = 0
    while lo <= limit:
        hi = min(lo + size, limit + 1)
        yield lo, hi
        lo = hi


def sieve_primes(limit: int, segment: int = SEGMENT) -> Iterator[int]:
    """Primes <= limit in increasing order, memory O(sqrt(limit) + segment)."""
    if limit < 2:
        return
    base = simple_sieve(math.isqrt(limit))
    for lo, hi in segments(limit, segment):
        for p in primes_in_segment(lo, hi, base).tolist():
            yield p


def prime_array(limit: int, segment: int = SEGMENT) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    base = simple_sieve(math.isqrt(limit))
    parts = [primes_in_segment(lo, hi, base) for lo, hi in segments(limit, segment)]
    return np.concatenate(parts)


# ---------------------------------------------------------------------------
# Omega sieve


@dataclass(frozen=True)
class OmegaBlock:
    lo: int
    hi: int
    omega: np.ndarray  # uint8, omega[i] = Omega(lo + i)

    def __getitem__(self, n: int) -> int:
        if not self.lo <= n < self.hi:
            raise IndexError(n)
        return int(self.omega[n - self.lo])


def omega_sieve(lo: int, hi: int, base: np.ndarray | None = None) -> OmegaBlock:
    """Omega(n) for lo <= n < hi.

    Every prime power p^e <= hi with p <= sqrt(hi) adds one to its multiples
    while the cofactor is divided out; a cofactor > 1 left over is a single
    prime above sqrt(hi) and adds one more.
    """
    if lo < 1 or hi <= lo:
        raise ValueError("omega_sieve needs 1 <= lo < hi")
    root = math.isqrt(hi - 1)
    if base is None:
        base = simple_sieve(root)
    omega = np.zeros(hi - lo, dtype=np.uint8)
    rest = np.arange(lo, hi, dtype=np.int64)
    for p in base:
        p = int(p)
        if p > root:
            break
        q = p
        while q < hi:
            start = ((lo + q - 1) // q) * q
            if start < hi:
                omega[start - lo :: q] += 1
                rest[start - lo :: q] //= p
            if q > (hi - 1) // p:
                break
            q *= p
    omega += (rest > 1).astype(np.uint8)
    return OmegaBlock(lo, hi, omega)


def omega_naive(n: int) -> int:
    count, p = 0, 2
    while p * p <= n:
        while n % p == 0:
            n //= p
            count += 1
        p += 1
    return count + (1 if n > 1 else 0)


# ---------------------------------------------------------------------------
# Prime store


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "mertens"


@dataclass
class PrimeStore:
    """Primes up to ``limit`` with checkpointed high-precision sums of 1/p."""

    limit: int
    prec: int
    primes: np.ndarray
    checkpoints: tuple  # x values: multiples of SEGMENT, then limit
    recip_fixed: tuple  # exact fixed-point sums of floor(2^F/p) for p <= checkpoint
    cache_dir: Path | None = None
    _float_prefix: np.ndarray | None = field(default=None, repr=False)
    _logpow: dict = field(default_factory=dict, repr=False)

    @property
    def frac_bits(self) -> int:
        return self.prec + FRAC_GUARD

    # construction -----------------------------------------------------

    @classmethod
    def compute(cls, limit: int, prec: int | None = None) -> "PrimeStore":
        prec = check_prec(prec)
        if limit < 2:
            raise PrimeLimitError("limit must be >= 2")
        if limit >= 1 << 40:
            raise PrimeLimitError("sieving beyond 2^40 is not supported")
        one = 1 << (prec + FRAC_GUARD)
        base = simple_sieve(math.isqrt(limit))
        parts, cps, sums = [], [], []
        acc = 0
        for lo, hi in segments(limit):
            seg = primes_in_segment(lo, hi, base)
            parts.append(seg)
            acc += sum(one // p for p in seg.tolist())
            cps.append(hi - 1)
            sums.append(acc)
        primes = np.concatenate(parts)
        dtype = np.uint32 if limit < 1 << 32 else np.uint64
        return cls(limit, prec, primes.astype(dtype), tuple(cps), tuple(sums))

    @classmethod
    def load_or_build(cls, limit: int, prec: int | None = None,
                      cache_dir: str | Path | None = None) -> "PrimeStore":
        prec = check_prec(prec)
        cdir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
        try:
            store = cls.load(limit, prec, cdir)
            if store is not None:
                return store
        except (OSError, ValueError, struct.error) as exc:
            log.warning("prime cache in %s unreadable (%s); rebuilding", cdir, exc)
        store = cls.compute(limit, prec)
        store.cache_dir = cdir
        try:
            store.save(cdir)
        except OSError as exc:
            log.warning("could not write prime cache to %s: %s", cdir, exc)
        return store

    # persistence ------------------------------------------------------

    def _paths(self, cdir: Path) -> tuple[Path, Path]:
        return _cache_paths(cdir, self.limit, self.prec)

    def to_bytes(self) -> bytes:
        nbytes = (self.frac_bits + 64) // 8 + 8
        head = struct.pack("<IQIIQ", CACHE_VERSION, self.limit, self.prec,
                           self.primes.dtype.itemsize, len(self.primes))
        body = self.primes.astype(self.primes.dtype.newbyteorder("<")).tobytes()
        cps = struct.pack(f"<I{len(self.checkpoints)}Q", len(self.checkpoints), *self.checkpoints)
        sums = b"".join(s.to_bytes(nbytes, "little") for s in self.recip_fixed)
        return MAGIC + head + struct.pack("<I", nbytes) + body + cps + sums

    @classmethod
    def from_bytes(cls, data: bytes) -> "PrimeStore":
        if data[:8] != MAGIC:
            raise ValueError("bad magic")
        off = 8
        version, limit, prec, isz, count = struct.unpack_from("<IQIIQ", data, off)
        off += struct.calcsize("<IQIIQ")
        if version != CACHE_VERSION:
            raise ValueError(f"cache version {version} != {CACHE_VERSION}")
        (nbytes,) = struct.unpack_from("<I", data, off)
        off += 4
        dtype = np.dtype("<u4" if isz == 4 else "<u8")
        primes = np.frombuffer(data, dtype=dtype, count=count, offset=off).astype(dtype.newbyteorder("="))
        off += isz * count
        (ncp,) = struct.unpack_from("<I", data, off)
        off += 4
        cps = struct.unpack_from(f"<{ncp}Q", data, off)
        off += 8 * ncp
        sums = []
        for _ in range(ncp):
            sums.append(int.from_bytes(data[off : off + nbytes], "little"))
            off += nbytes
        if off != len(data):
            raise ValueError("trailing bytes in prime cache")
        return cls(limit, prec, primes, tuple(cps), tuple(sums))

    def save(self, cdir: str | Path) -> Path:
        cdir = Path(cdir)
        cdir.mkdir(parents=True, exist_ok=True)
        binp, jsp = self._paths(cdir)
        data = self.to_bytes()
        tmp = binp.with_suffix(".tmp")
        tmp.write_bytes(data)
        tmp.replace(binp)
        manifest = {
            "version": CACHE_VERSION,
            "limit": self.limit,
            "prec_bits": self.prec,
            "segment": SEGMENT,
            "prime_count": int(len(self.primes)),
            "sha256": hashlib.sha256(data).hexdigest(),
        }
        jsp.write_text(json.dumps(manifest, indent=2, sort_keys=True))
        self.cache_dir = cdir
        return binp

    @classmethod
    def load(cls, limit: int, prec: int, cdir: str | Path) -> "PrimeStore | None":
        binp, jsp = _cache_paths(Path(cdir), limit, prec)
        if not binp.exists() or not jsp.exists():
            return None
        manifest = json.loads(jsp.read_text())
        data = binp.read_bytes()
        if manifest.get("version") != CACHE_VERSION:
            raise ValueError("manifest version mismatch")
        if manifest.get("sha256") != hashlib.sha256(data).hexdigest():
            raise ValueError("checksum mismatch")
        store = cls.from_bytes(data)
        if store.limit != limit or store.prec != prec:
            raise ValueError("cache parameters do not match request")
        store.cache_dir = Path(cdir)
        return store

    # queries ----------------------------------------------------------

    def _check(self, x: int) -> int:
        x = int(x)
        if x > self.limit:
            raise PrimeLimitError(
                f"x = {x} exceeds the sieved limit {self.limit}; rebuild with a larger limit"
            )
        return x

    def pi(self, x: int) -> int:
        x = self._check(x)
        return int(np.searchsorted(self.primes, x, side="right"))

    def primes_upto(self, x: int) -> np.ndarray:
        return self.primes[: self.pi(x)]

    def recip_fixed_prefix(self, x: int) -> int:
        """Sum of floor(2^F/p) over p <= x, F = prec + 32."""
        x = self._check(x)
        if x < 2:
            return 0
        i = bisect_right(self.checkpoints, x) - 1
        if i >= 0:
            acc, start = self.recip_fixed[i], self.checkpoints[i]
        else:
            acc, start = 0, 1
        lo = int(np.searchsorted(self.primes, start, side="right"))
        hi = int(np.searchsorted(self.primes, x, side="right"))
        one = 1 << self.frac_bits
        return acc + sum(one // p for p in self.primes[lo:hi].tolist())

    def mertens_prefix(self, x: int) -> mpf:
        """sum_{p<=x} 1/p, absolute error below pi(x) * 2^-(prec+32)."""
        fixed = self.recip_fixed_prefix(x)
        with precision(self.prec):
            return mpmath.ldexp(mpf(fixed), -self.frac_bits)

    def mertens_prefix_budget(self, x: int) -> mpf:
        with precision(64):
            return mpf(self.pi(x) + 1) * mpf(2) ** (-self.frac_bits) + mpf(2) ** (-self.prec)

    def logpow_prefix(self, j: int, x: int) -> mpf:
        """sum_{p<=x} log(p)^j / p; j = 0 is the exact-rounded Mertens sum.

        For j >= 1 the terms are double precision and summed with math.fsum, so
        the relative error is about (j + 2) * 2^-53.
        """
        if j < 0:
            raise ValueError("j must be >= 0")
        if j == 0:
            return self.mertens_prefix(x)
        x = self._check(x)
        cps, sums = self._logpow_table(j)
        i = bisect_right(cps, x) - 1
        acc = sums[i] if i >= 0 else 0.0
        start = cps[i] if i >= 0 else 1
        lo = int(np.searchsorted(self.primes, start, side="right"))
        hi = int(np.searchsorted(self.primes, x, side="right"))
        seg = self.primes[lo:hi].astype(np.float64)
        extra = math.fsum((np.log(seg) ** j / seg).tolist())
        with precision(self.prec):
            return mpf(acc) + mpf(extra)

    def _logpow_table(self, j: int) -> tuple:
        if j not in self._logpow:
            sums, acc = [], mpf(0)
            lo = 0
            p = self.primes.astype(np.float64)
            vals = np.log(p) ** j / p
            with precision(self.prec):
                for cp in self.checkpoints:
                    hi = int(np.searchsorted(self.primes, cp, side="right"))
                    acc += mpf(math.fsum(vals[lo:hi].tolist()))
                    sums.append(acc)
                    lo = hi
            self._logpow[j] = (self.checkpoints, tuple(sums))
        return self._logpow[j]

    def recip_prefix_float(self) -> np.ndarray:
        """F[i] = sum of 1/p over the first i primes, as doubles (F[0] = 0).

        Block offsets come from the exact fixed-point sums, so each entry is
        within PREFIX_BLOCK + 2 rounding steps of 2^-51 of the true prefix.
        """
        if self._float_prefix is None:
            inv = 1.0 / self.primes.astype(np.float64)
            out = np.empty(len(inv) + 1)
            out[0] = 0.0
            block = PREFIX_BLOCK
            one = 1 << self.frac_bits
            acc = 0
            for start in range(0, len(inv), block):
                stop = min(start + block, len(inv))
                base = float(mpmath.ldexp(mpf(acc), -self.frac_bits)) if acc else 0.0
                out[start + 1 : stop + 1] = base + np.cumsum(inv[start:stop])
                acc += sum(one // p for p in self.primes[start:stop].tolist())
            self._float_prefix = out
        return self._float_prefix

    def s1_float(self, y) -> np.ndarray:
        """Vectorized sum_{p<=y} 1/p in double precision."""
        y = np.asarray(y)
        if y.size and np.max(y) > self.limit:
            raise PrimeLimitError(f"query {np.max(y)} exceeds limit {self.limit}")
        idx = np.searchsorted(self.primes, y, side="right")
        return self.recip_prefix_float()[idx]


def _cache_paths(cdir: Path, limit: int, prec: int) -> tuple[Path, Path]:
    stem = f"primes-{limit}-p{prec}"
    return cdir / f"{stem}.bin", cdir / f"{stem}.json"


_STORES: dict = {}


def get_store(limit: int, prec: int | None = None, cache_dir: str | Path | None = None,
              use_cache: bool = True) -> PrimeStore:
    """Process-wide shared store, reusing any store whose limit covers the request."""
    prec = check_prec(prec)
    for (lim, pr), st in _STORES.items():
        if lim >= limit and pr == prec:
            return st
    if use_cache:
        store = PrimeStore.load_or_build(limit, prec, cache_dir)
    else:
        store = PrimeStore.compute(limit, prec)
    _STORES[(limit, prec)] = store
    return store


def mertens_prefix(x: int, prec: int | None = None) -> mpf:
    return get_store(max(int(x), 2), prec, use_cache=False).mertens_prefix(x)


def logpow_prefix(j: int, x: int, prec: int | None = None) -> mpf:
    return get_store(max(int(x), 2), prec, use_cache=False).logpow_prefix(j, x)


__all__ = [
    "SEGMENT", "PrimeLimitError", "simple_sieve", "primes_in_segment", "sieve_primes",
    "prime_array", "OmegaBlock", "omega_sieve", "omega_naive", "PrimeStore", "get_store",
    "mertens_prefix", "logpow_prefix", "default_cache_dir", "DEFAULT_PREC",
]
