# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled minimum-spacing grid: open-addressing cell hash + chained points."""

from libc.math cimport floor
from libc.stdlib cimport free, malloc, realloc

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.int32_t i32

cdef inline i64 _pack(long long ix, long long iy, long long iz) nogil:
    # 21 bits per axis; wraparound only causes harmless extra distance checks
    return (((ix & 0x1FFFFF) << 42)
            | ((iy & 0x1FFFFF) << 21)
            | (iz & 0x1FFFFF))

cdef inline size_t _mix(i64 key) nogil:
    cdef unsigned long long h = <unsigned long long> key
    h ^= h >> 33
    h *= 0xFF51AFD7ED558CCDULL
    h ^= h >> 33
    h *= 0xC4CEB9FE1A85EC53ULL
    h ^= h >> 33
    return <size_t> h


cdef class PoissonGrid:
    """Incremental first-wins acceptance with a minimum Euclidean spacing."""

    cdef readonly double spacing
    cdef double _inv, _r2
    cdef i64* _keys          # packed cell key per slot, -1 = empty
    cdef i32* _head          # first point index per slot, -1 = none
    cdef size_t _tsize, _tmask, _ncells
    cdef i32* _next          # chain within a cell
    cdef double* _px
    cdef double* _py
    cdef double* _pz
    cdef size_t _npts, _cap

    def __cinit__(self, double spacing):
        if spacing <= 0:
            raise ValueError("spacing must be > 0")
        self.spacing = spacing
        self._inv = 1.0 / spacing
        self._r2 = spacing * spacing
        self._tsize = 1024
        self._tmask = self._tsize - 1
        self._ncells = 0
        self._keys = <i64*> malloc(self._tsize * sizeof(i64))
        self._head = <i32*> malloc(self._tsize * sizeof(i32))
        cdef size_t i
        for i in range(self._tsize):
            self._keys[i] = -1
            self._head[i] = -1
        self._cap = 1024
        self._npts = 0
        self._next = <i32*> malloc(self._cap * sizeof(i32))
        self._px = <double*> malloc(self._cap * sizeof(double))
        self._py = <double*> malloc(self._cap * sizeof(double))
        self._pz = <double*> malloc(self._cap * sizeof(double))
        if (self._keys == NULL or self._head == NULL or self._next == NULL
                or self._px == NULL or self._py == NULL or self._pz == NULL):
            raise MemoryError()

    def __dealloc__(self):
        free(self._keys)
        free(self._head)
        free(self._next)
        free(self._px)
        free(self._py)
        free(self._pz)

    @property
    def point_count(self):
        return self._npts

    @property
    def cell_count(self):
        return self._ncells

    cdef int _grow_points(self) except -1:
        cdef size_t cap = self._cap * 2
        self._next = <i32*> realloc(self._next, cap * sizeof(i32))
        self._px = <double*> realloc(self._px, cap * sizeof(double))
        self._py = <double*> realloc(self._py, cap * sizeof(double))
        self._pz = <double*> realloc(self._pz, cap * sizeof(double))
        if (self._next == NULL or self._px == NULL or self._py == NULL
                or self._pz == NULL):
            raise MemoryError()
        self._cap = cap
        return 0

    cdef int _rehash(self) except -1:
        cdef size_t tsize = self._tsize * 2
        cdef size_t tmask = tsize - 1
        cdef i64* keys = <i64*> malloc(tsize * sizeof(i64))
        cdef i32* head = <i32*> malloc(tsize * sizeof(i32))
        if keys == NULL or head == NULL:
            free(keys)
            free(head)
            raise MemoryError()
        cdef size_t i, s
        for i in range(tsize):
            keys[i] = -1
            head[i] = -1
        for i in range(self._tsize):
            if self._keys[i] == -1:
                continue
            s = _mix(self._keys[i]) & tmask
            while keys[s] != -1:
                s = (s + 1) & tmask
            keys[s] = self._keys[i]
            head[s] = self._head[i]
        free(self._keys)
        free(self._head)
        self._keys = keys
        self._head = head
        self._tsize = tsize
        self._tmask = tmask
        return 0

    cdef inline long long _find(self, i64 key) nogil:
        # returns slot with this key, or first empty slot (key -1 there)
        cdef size_t s = _mix(key) & self._tmask
        while self._keys[s] != -1 and self._keys[s] != key:
            s = (s + 1) & self._tmask
        return <long long> s

    def insert(self, cnp.ndarray[double, ndim=2, mode="c"] pos not None):
        """Try to insert each row of ``pos`` (N, 3) in order.

        Returns a boolean mask of accepted rows; accepted points constrain
        later candidates, including within the same batch.
        """
        cdef Py_ssize_t n = pos.shape[0]
        cdef cnp.ndarray[cnp.uint8_t, ndim=1] mask = np.zeros(n, dtype=np.uint8)
        cdef Py_ssize_t i
        cdef double x, y, z, dx, dy, dz
        cdef long long ix, iy, iz, cx, cy, cz, slot
        cdef i64 key
        cdef i32 j
        cdef bint ok
        for i in range(n):
            x = pos[i, 0]
            y = pos[i, 1]
            z = pos[i, 2]
            ix = <long long> floor(x * self._inv)
            iy = <long long> floor(y * self._inv)
            iz = <long long> floor(z * self._inv)
            ok = True
            for cx in range(ix - 1, ix + 2):
                for cy in range(iy - 1, iy + 2):
                    for cz in range(iz - 1, iz + 2):
                        slot = self._find(_pack(cx, cy, cz))
                        j = self._head[slot] if self._keys[slot] != -1 else -1
                        while j != -1:
                            dx = self._px[j] - x
                            dy = self._py[j] - y
                            dz = self._pz[j] - z
                            if dx * dx + dy * dy + dz * dz < self._r2:
                                ok = False
                                break
                            j = self._next[j]
                        if not ok:
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if not ok:
                continue
            if self._npts == self._cap:
                self._grow_points()
            if self._ncells * 10 > self._tsize * 6:
                self._rehash()
            key = _pack(ix, iy, iz)
            slot = self._find(key)
            if self._keys[slot] == -1:
                self._keys[slot] = key
                self._ncells += 1
            self._px[self._npts] = x
            self._py[self._npts] = y
            self._pz[self._npts] = z
            self._next[self._npts] = self._head[slot]
            self._head[slot] = <i32> self._npts
            self._npts += 1
            mask[i] = 1
        return mask.view(np.bool_)
