# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
# distutils: language = c++
"""Compiled orbit kernels: breadth-first expansion, streaming dedup, and
nearest-neighbor queries.  Mirrors rotorb._kernels_py exactly; see that
module for the interface contract."""

import numpy as np

cimport numpy as cnp
from cython.operator cimport dereference
from libc.math cimport fabs, floor, pow as cpow, sqrt
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

cnp.import_array()

BACKEND_NAME = "compiled"

ctypedef cnp.int64_t i64
ctypedef cnp.float64_t f64

cdef extern from *:
    """
    static inline long long rotorb_mix(long long ix, long long iy, long long iz) {
        unsigned long long h = 0x9E3779B97F4A7C15ULL * (unsigned long long)ix;
        h ^= 0xC2B2AE3D27D4EB4FULL * (unsigned long long)iy + (h << 6) + (h >> 2);
        h ^= 0x165667B19E3779F9ULL * (unsigned long long)iz + (h << 5) + (h >> 3);
        return (long long)h;
    }
    """
    long long rotorb_mix(long long ix, long long iy, long long iz) nogil


# hash collisions are harmless: buckets are candidate lists and every
# candidate is re-verified by a real distance test


def expand_stationary(points, last, lin, shift, movegen):
    points = np.ascontiguousarray(points, dtype=np.float64)
    last = np.ascontiguousarray(last, dtype=np.int64)
    lin = np.ascontiguousarray(lin, dtype=np.float64)
    shift = np.ascontiguousarray(shift, dtype=np.float64)
    movegen = np.ascontiguousarray(movegen, dtype=np.int64)

    cdef f64[:, ::1] p = points
    cdef i64[::1] lastv = last
    cdef f64[:, :, ::1] linv = lin
    cdef f64[:, ::1] shiftv = shift
    cdef i64[::1] mg = movegen
    cdef Py_ssize_t n_nodes = p.shape[0], dim = p.shape[1], n_moves = mg.shape[0]
    cdef Py_ssize_t n, m, i, j, k = 0

    for n in range(n_nodes):
        for m in range(n_moves):
            if mg[m] != lastv[n]:
                k += 1

    child_points = np.empty((k, dim), dtype=np.float64)
    child_parent = np.empty(k, dtype=np.int64)
    child_move = np.empty(k, dtype=np.int64)
    cdef f64[:, ::1] cp = child_points
    cdef i64[::1] cpar = child_parent
    cdef i64[::1] cmv = child_move
    cdef f64 acc

    k = 0
    with nogil:
        for n in range(n_nodes):
            for m in range(n_moves):
                if mg[m] == lastv[n]:
                    continue
                for j in range(dim):
                    acc = shiftv[m, j]
                    for i in range(dim):
                        acc += p[n, i] * linv[m, i, j]
                    cp[k, j] = acc
                cpar[k] = n
                cmv[k] = m
                k += 1
    return child_points, child_parent, child_move


def expand_peripatetic_2d(points, axes, last, cosv, sinv, movegen):
    points = np.ascontiguousarray(points, dtype=np.float64)
    axes = np.ascontiguousarray(axes, dtype=np.float64)
    last = np.ascontiguousarray(last, dtype=np.int64)
    cosv = np.ascontiguousarray(cosv, dtype=np.float64)
    sinv = np.ascontiguousarray(sinv, dtype=np.float64)
    movegen = np.ascontiguousarray(movegen, dtype=np.int64)

    cdef f64[:, ::1] p = points
    cdef f64[:, :, ::1] ax = axes
    cdef i64[::1] lastv = last
    cdef f64[::1] cv = cosv
    cdef f64[::1] sv = sinv
    cdef i64[::1] mg = movegen
    cdef Py_ssize_t n_nodes = p.shape[0], n_gens = ax.shape[1], n_moves = mg.shape[0]
    cdef Py_ssize_t n, m, g, k = 0

    for n in range(n_nodes):
        for m in range(n_moves):
            if mg[m] != lastv[n]:
                k += 1

    child_points = np.empty((k, 2), dtype=np.float64)
    child_axes = np.empty((k, n_gens, 2), dtype=np.float64)
    child_parent = np.empty(k, dtype=np.int64)
    child_move = np.empty(k, dtype=np.int64)
    cdef f64[:, ::1] cp = child_points
    cdef f64[:, :, ::1] cax = child_axes
    cdef i64[::1] cpar = child_parent
    cdef i64[::1] cmv = child_move
    cdef f64 c, s, ox, oy, rx, ry

    k = 0
    with nogil:
        for n in range(n_nodes):
            for m in range(n_moves):
                if mg[m] == lastv[n]:
                    continue
                c = cv[m]
                s = sv[m]
                ox = ax[n, mg[m], 0]
                oy = ax[n, mg[m], 1]
                rx = p[n, 0] - ox
                ry = p[n, 1] - oy
                cp[k, 0] = rx * c - ry * s + ox
                cp[k, 1] = rx * s + ry * c + oy
                for g in range(n_gens):
                    rx = ax[n, g, 0] - ox
                    ry = ax[n, g, 1] - oy
                    cax[k, g, 0] = rx * c - ry * s + ox
                    cax[k, g, 1] = rx * s + ry * c + oy
                cpar[k] = n
                cmv[k] = m
                k += 1
    return child_points, child_axes, child_parent, child_move


def expand_peripatetic_3d(points, base, dirs, last, cosv, sinv, movegen):
    points = np.ascontiguousarray(points, dtype=np.float64)
    base = np.ascontiguousarray(base, dtype=np.float64)
    dirs = np.ascontiguousarray(dirs, dtype=np.float64)
    last = np.ascontiguousarray(last, dtype=np.int64)
    cosv = np.ascontiguousarray(cosv, dtype=np.float64)
    sinv = np.ascontiguousarray(sinv, dtype=np.float64)
    movegen = np.ascontiguousarray(movegen, dtype=np.int64)

    cdef f64[:, ::1] p = points
    cdef f64[:, :, ::1] bs = base
    cdef f64[:, :, ::1] dr = dirs
    cdef i64[::1] lastv = last
    cdef f64[::1] cv = cosv
    cdef f64[::1] sv = sinv
    cdef i64[::1] mg = movegen
    cdef Py_ssize_t n_nodes = p.shape[0], n_gens = bs.shape[1], n_moves = mg.shape[0]
    cdef Py_ssize_t n, m, g, i, j, k = 0

    for n in range(n_nodes):
        for m in range(n_moves):
            if mg[m] != lastv[n]:
                k += 1

    child_points = np.empty((k, 3), dtype=np.float64)
    child_base = np.empty((k, n_gens, 3), dtype=np.float64)
    child_dirs = np.empty((k, n_gens, 3), dtype=np.float64)
    child_parent = np.empty(k, dtype=np.int64)
    child_move = np.empty(k, dtype=np.int64)
    cdef f64[:, ::1] cp = child_points
    cdef f64[:, :, ::1] cbs = child_base
    cdef f64[:, :, ::1] cdr = child_dirs
    cdef i64[::1] cpar = child_parent
    cdef i64[::1] cmv = child_move
    cdef f64 c, s, one_c, u0, u1, u2
    cdef f64 L[3][3]
    cdef f64 o[3]
    cdef f64 r[3]
    cdef f64 acc, nrm

    k = 0
    with nogil:
        for n in range(n_nodes):
            for m in range(n_moves):
                if mg[m] == lastv[n]:
                    continue
                c = cv[m]
                s = sv[m]
                one_c = 1.0 - c
                u0 = dr[n, mg[m], 0]
                u1 = dr[n, mg[m], 1]
                u2 = dr[n, mg[m], 2]
                L[0][0] = c + one_c * u0 * u0
                L[0][1] = one_c * u0 * u1 + s * u2
                L[0][2] = one_c * u0 * u2 - s * u1
                L[1][0] = one_c * u1 * u0 - s * u2
                L[1][1] = c + one_c * u1 * u1
                L[1][2] = one_c * u1 * u2 + s * u0
                L[2][0] = one_c * u2 * u0 + s * u1
                L[2][1] = one_c * u2 * u1 - s * u0
                L[2][2] = c + one_c * u2 * u2
                for j in range(3):
                    o[j] = bs[n, mg[m], j]
                    r[j] = p[n, j] - o[j]
                for j in range(3):
                    acc = o[j]
                    for i in range(3):
                        acc += r[i] * L[i][j]
                    cp[k, j] = acc
                for g in range(n_gens):
                    for j in range(3):
                        r[j] = bs[n, g, j] - o[j]
                    for j in range(3):
                        acc = o[j]
                        for i in range(3):
                            acc += r[i] * L[i][j]
                        cbs[k, g, j] = acc
                    for j in range(3):
                        acc = 0.0
                        for i in range(3):
                            acc += dr[n, g, i] * L[i][j]
                        cdr[k, g, j] = acc
                    nrm = sqrt(cdr[k, g, 0] * cdr[k, g, 0]
                               + cdr[k, g, 1] * cdr[k, g, 1]
                               + cdr[k, g, 2] * cdr[k, g, 2])
                    for j in range(3):
                        cdr[k, g, j] /= nrm
                cpar[k] = n
                cmv[k] = m
                k += 1
    return child_points, child_base, child_dirs, child_parent, child_move


cdef class Dedup:
    """Streaming spatial-hash deduplicator; see the python backend docstring."""

    cdef public int dim
    cdef public double cell
    cdef unordered_map[long long, vector[int]] table
    cdef vector[double] coords

    def __init__(self, dim, cell):
        if dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if not cell > 0:
            raise ValueError("cell must be positive")
        self.dim = dim
        self.cell = float(cell)

    def __len__(self):
        return self.coords.size() // self.dim

    def add_batch(self, points):
        points = np.ascontiguousarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != self.dim:
            raise ValueError("bad points shape")
        keep = np.zeros(points.shape[0], dtype=np.uint8)
        cdef f64[:, ::1] p = points
        cdef cnp.uint8_t[::1] kv = keep
        cdef Py_ssize_t n = p.shape[0], i, j
        cdef int dim = self.dim, idx
        cdef double cell = self.cell, d, dd
        cdef long long kx, ky, kz, dx, dy, dz, key
        cdef bint ok
        cdef vector[int] * bucket
        cdef unordered_map[long long, vector[int]].iterator it

        with nogil:
            for i in range(n):
                kx = <long long>floor(p[i, 0] / cell)
                ky = <long long>floor(p[i, 1] / cell)
                kz = <long long>floor(p[i, 2] / cell) if dim == 3 else 0
                ok = True
                for dx in range(-1, 2):
                    for dy in range(-1, 2):
                        for dz in range(-1, 2):
                            if dim == 2 and dz != 0:
                                continue
                            it = self.table.find(rotorb_mix(kx + dx, ky + dy, kz + dz))
                            if it == self.table.end():
                                continue
                            bucket = &(dereference(it).second)
                            for j in range(<Py_ssize_t>bucket.size()):
                                idx = bucket[0][j]
                                d = fabs(p[i, 0] - self.coords[idx * dim])
                                dd = fabs(p[i, 1] - self.coords[idx * dim + 1])
                                if dd > d:
                                    d = dd
                                if dim == 3:
                                    dd = fabs(p[i, 2] - self.coords[idx * dim + 2])
                                    if dd > d:
                                        d = dd
                                if d < cell:
                                    ok = False
                                    break
                            if not ok:
                                break
                        if not ok:
                            break
                    if not ok:
                        break
                if ok:
                    idx = <int>(self.coords.size() // dim)
                    for j in range(dim):
                        self.coords.push_back(p[i, j])
                    self.table[rotorb_mix(kx, ky, kz)].push_back(idx)
                    kv[i] = 1
        return keep.view(np.bool_)


cdef class GridIndex:
    """Spatial hash over a fixed point set for nearest-neighbor distances."""

    cdef public object points
    cdef f64[:, ::1] pts
    cdef public double cell
    cdef public int dim
    cdef unordered_map[long long, vector[int]] table
    cdef long long key_lo[3]
    cdef long long key_hi[3]

    def __init__(self, points, cell=None):
        points = np.ascontiguousarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] not in (2, 3):
            raise ValueError("points must be (N,2) or (N,3)")
        if len(points) == 0:
            raise ValueError("empty point set")
        self.points = points
        self.pts = points
        self.dim = points.shape[1]
        if cell is None:
            extent = float((points.max(axis=0) - points.min(axis=0)).max())
            root = cpow(<double>points.shape[0], 1.0 / <double>self.dim)
            cell = max(extent / max(root, 1.0), 1e-12)
        if not cell > 0:
            raise ValueError("cell must be positive")
        self.cell = float(cell)

        cdef Py_ssize_t i, j
        cdef long long kk[3]
        for j in range(3):
            self.key_lo[j] = 0
            self.key_hi[j] = 0
        for i in range(self.pts.shape[0]):
            for j in range(self.dim):
                kk[j] = <long long>floor(self.pts[i, j] / self.cell)
            if self.dim == 2:
                kk[2] = 0
            for j in range(3):
                if i == 0 or kk[j] < self.key_lo[j]:
                    self.key_lo[j] = kk[j]
                if i == 0 or kk[j] > self.key_hi[j]:
                    self.key_hi[j] = kk[j]
            self.table[rotorb_mix(kk[0], kk[1], kk[2])].push_back(<int>i)

    cdef double _nearest(self, double qx, double qy, double qz, int exclude) nogil:
        cdef double cell = self.cell, best = 1e308, d, dx0, dy0, dz0
        cdef long long kq[3]
        cdef long long lo[3]
        cdef long long hi[3]
        cdef long long ring, ring_min, max_ring, dx, dy, dz, m, v
        cdef long long x0, x1, y0, y1, z0, z1
        cdef int idx, dim = self.dim
        cdef Py_ssize_t i, j
        cdef vector[int] * bucket
        cdef unordered_map[long long, vector[int]].iterator it

        kq[0] = <long long>floor(qx / cell)
        kq[1] = <long long>floor(qy / cell)
        kq[2] = <long long>floor(qz / cell) if dim == 3 else 0
        # occupied-cell window relative to the query cell; rings outside it
        # hold no points, so jump to the first ring touching it
        ring_min = 0
        max_ring = 0
        for i in range(3):
            lo[i] = self.key_lo[i] - kq[i]
            hi[i] = self.key_hi[i] - kq[i]
            if lo[i] > ring_min:
                ring_min = lo[i]
            if -hi[i] > ring_min:
                ring_min = -hi[i]
            v = lo[i] if lo[i] >= 0 else -lo[i]
            if v > max_ring:
                max_ring = v
            v = hi[i] if hi[i] >= 0 else -hi[i]
            if v > max_ring:
                max_ring = v

        for ring in range(ring_min, max_ring + 1):
            x0 = -ring if -ring > lo[0] else lo[0]
            x1 = ring if ring < hi[0] else hi[0]
            y0 = -ring if -ring > lo[1] else lo[1]
            y1 = ring if ring < hi[1] else hi[1]
            z0 = -ring if -ring > lo[2] else lo[2]
            z1 = ring if ring < hi[2] else hi[2]
            for dx in range(x0, x1 + 1):
                for dy in range(y0, y1 + 1):
                    for dz in range(z0, z1 + 1):
                        m = dx if dx >= 0 else -dx
                        v = dy if dy >= 0 else -dy
                        if v > m:
                            m = v
                        v = dz if dz >= 0 else -dz
                        if v > m:
                            m = v
                        if m != ring:
                            continue
                        it = self.table.find(rotorb_mix(kq[0] + dx, kq[1] + dy, kq[2] + dz))
                        if it == self.table.end():
                            continue
                        bucket = &(dereference(it).second)
                        for j in range(<Py_ssize_t>bucket.size()):
                            idx = bucket[0][j]
                            if idx == exclude:
                                continue
                            dx0 = self.pts[idx, 0] - qx
                            dy0 = self.pts[idx, 1] - qy
                            d = dx0 * dx0 + dy0 * dy0
                            if dim == 3:
                                dz0 = self.pts[idx, 2] - qz
                                d += dz0 * dz0
                            d = sqrt(d)
                            if d < best:
                                best = d
            # any unexplored ring holds only points at distance >= ring*cell
            if best <= ring * cell:
                break
        return best

    def nearest_dist(self, q, exclude=-1):
        q = np.asarray(q, dtype=np.float64)
        cdef double qx = q[0], qy = q[1], qz = q[2] if self.dim == 3 else 0.0
        cdef double out = self._nearest(qx, qy, qz, int(exclude))
        return float("inf") if out >= 1e308 else out

    def nearest_batch(self, queries):
        queries = np.ascontiguousarray(queries, dtype=np.float64)
        if queries.ndim != 2 or queries.shape[1] != self.dim:
            raise ValueError("bad queries shape")
        out = np.empty(queries.shape[0], dtype=np.float64)
        cdef f64[:, ::1] qv = queries
        cdef f64[::1] ov = out
        cdef Py_ssize_t i
        cdef int dim = self.dim
        with nogil:
            for i in range(qv.shape[0]):
                ov[i] = self._nearest(qv[i, 0], qv[i, 1],
                                      qv[i, 2] if dim == 3 else 0.0, -1)
        np.copyto(out, np.where(out >= 1e308, np.inf, out))
        return out

    def min_pairwise(self):
        if self.pts.shape[0] < 2:
            return float("inf")
        cdef double best = 1e308, d
        cdef Py_ssize_t i
        cdef int dim = self.dim
        with nogil:
            for i in range(self.pts.shape[0]):
                d = self._nearest(self.pts[i, 0], self.pts[i, 1],
                                  self.pts[i, 2] if dim == 3 else 0.0, <int>i)
                if d < best:
                    best = d
        return float("inf") if best >= 1e308 else best
