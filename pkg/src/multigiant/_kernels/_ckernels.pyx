# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: exploration process, union-find, branching process.

Every routine mirrors the pure-Python version in ``_pykernels`` draw for
draw; uniforms come from the caller's ``numpy.random.Generator`` through
its ``bitgen_t`` capsule.
"""
import numpy as np
cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.stdint cimport int64_t, int32_t
from numpy.random cimport bitgen_t

cnp.import_array()

cdef enum:
    SLEEPING = 0
    ACTIVE = 1
    DEAD = 2

cdef enum:
    EV_INIT = 0
    EV_RESTART = 1
    EV_BACK = 2
    EV_WAKE = 3


cdef bitgen_t* _bitgen(object rng) except NULL:
    capsule = rng.bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("invalid bit generator capsule")
    return <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef inline int64_t _pick(bitgen_t* g, int64_t size) noexcept nogil:
    cdef int64_t k = <int64_t>(g.next_double(g.state) * size)
    if k >= size:
        k = size - 1
    return k


cdef inline void _remove(int64_t* arr, int64_t* pos, int64_t* size, int64_t item) noexcept nogil:
    cdef int64_t p = pos[item]
    cdef int64_t last = arr[size[0] - 1]
    arr[p] = last
    pos[last] = p
    size[0] -= 1
    pos[item] = -1


cdef inline void _append(int64_t* arr, int64_t* pos, int64_t* size, int64_t item) noexcept nogil:
    arr[size[0]] = item
    pos[item] = size[0]
    size[0] += 1


def explore(object rng, const int64_t[::1] vertex_ptr, const int64_t[::1] partner,
            int64_t log_capacity=0):
    """Run the exploration process over a pre-matched clone graph.

    Returns ``(labels, case1_steps, starts, log, logged)`` where ``labels``
    numbers components in discovery order and ``log`` is an
    ``(log_capacity, 4)`` ring buffer of ``(k, event, clone, other)``.
    """
    cdef int64_t n = vertex_ptr.shape[0] - 1
    cdef int64_t C = partner.shape[0]
    cdef bitgen_t* g = _bitgen(rng)

    labels_arr = np.full(n, -1, dtype=np.int64)
    clone_vertex_arr = np.empty(C, dtype=np.int64)
    status_arr = np.zeros(C, dtype=np.int8)
    active_arr = np.empty(C, dtype=np.int64)
    active_pos_arr = np.full(C, -1, dtype=np.int64)
    sleep_arr = np.arange(C, dtype=np.int64)
    sleep_pos_arr = np.arange(C, dtype=np.int64)
    vsleep_arr = np.arange(n, dtype=np.int64)
    vsleep_pos_arr = np.arange(n, dtype=np.int64)
    cap = log_capacity if log_capacity > 0 else 1
    log_arr = np.zeros((cap, 4), dtype=np.int64)

    cdef int64_t[::1] labels = labels_arr
    cdef int64_t[::1] clone_vertex = clone_vertex_arr
    cdef cnp.int8_t[::1] status = status_arr
    cdef int64_t[::1] active = active_arr
    cdef int64_t[::1] active_pos = active_pos_arr
    cdef int64_t[::1] sleep = sleep_arr
    cdef int64_t[::1] sleep_pos = sleep_pos_arr
    cdef int64_t[::1] vsleep = vsleep_arr
    cdef int64_t[::1] vsleep_pos = vsleep_pos_arr
    cdef int64_t[:, ::1] log = log_arr

    cdef int64_t v, c, c2, w, k = 0, comp = 0, case1 = 0, starts = 0, logged = 0
    cdef int64_t n_active = 0, n_sleep = C, n_vsleep = n, ev = 0, slot

    for v in range(n):
        for c in range(vertex_ptr[v], vertex_ptr[v + 1]):
            clone_vertex[c] = v

    with rng.bit_generator.lock:
      with nogil:
        if n > 0:
            # initialisation: a uniformly random sleeping vertex
            v = vsleep[_pick(g, n_vsleep)]
            _remove(&vsleep[0], &vsleep_pos[0], &n_vsleep, v)
            labels[v] = comp
            for c in range(vertex_ptr[v], vertex_ptr[v + 1]):
                _remove(&sleep[0], &sleep_pos[0], &n_sleep, c)
                status[c] = ACTIVE
                _append(&active[0], &active_pos[0], &n_active, c)
            starts += 1
            if log_capacity > 0:
                slot = logged % log_capacity
                log[slot, 0] = k; log[slot, 1] = EV_INIT; log[slot, 2] = -1; log[slot, 3] = v
                logged += 1
            k += 1
        while True:
            while n_active > 0:
                c = active[_pick(g, n_active)]
                _remove(&active[0], &active_pos[0], &n_active, c)
                status[c] = DEAD
                c2 = partner[c]
                if status[c2] == ACTIVE:
                    _remove(&active[0], &active_pos[0], &n_active, c2)
                    status[c2] = DEAD
                    ev = EV_BACK
                else:
                    w = clone_vertex[c2]
                    _remove(&vsleep[0], &vsleep_pos[0], &n_vsleep, w)
                    labels[w] = comp
                    for v in range(vertex_ptr[w], vertex_ptr[w + 1]):
                        _remove(&sleep[0], &sleep_pos[0], &n_sleep, v)
                        if v == c2:
                            status[v] = DEAD
                        else:
                            status[v] = ACTIVE
                            _append(&active[0], &active_pos[0], &n_active, v)
                    ev = EV_WAKE
                case1 += 1
                if log_capacity > 0:
                    slot = logged % log_capacity
                    log[slot, 0] = k; log[slot, 1] = ev; log[slot, 2] = c; log[slot, 3] = c2
                    logged += 1
                k += 1
            if n_sleep == 0:
                break
            # restart from a uniformly random sleeping clone
            c = sleep[_pick(g, n_sleep)]
            w = clone_vertex[c]
            comp += 1
            _remove(&vsleep[0], &vsleep_pos[0], &n_vsleep, w)
            labels[w] = comp
            for v in range(vertex_ptr[w], vertex_ptr[w + 1]):
                _remove(&sleep[0], &sleep_pos[0], &n_sleep, v)
                status[v] = ACTIVE
                _append(&active[0], &active_pos[0], &n_active, v)
            starts += 1
            if log_capacity > 0:
                slot = logged % log_capacity
                log[slot, 0] = k; log[slot, 1] = EV_RESTART; log[slot, 2] = c; log[slot, 3] = w
                logged += 1
            k += 1

    # clone-free vertices never reached by the process are singletons
    for v in range(n):
        if labels[v] == -1:
            comp += 1
            labels[v] = comp
    return labels_arr, case1, starts, log_arr[:min(logged, log_capacity)], logged


cdef inline int64_t _find(int64_t* parent, int64_t x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def union_find(int64_t n, const int64_t[::1] us, const int64_t[::1] vs):
    """Root of every vertex after uniting the given edges (union by size,
    path halving).  Roots are arbitrary representatives."""
    parent_arr = np.arange(n, dtype=np.int64)
    size_arr = np.ones(n, dtype=np.int64)
    cdef int64_t[::1] parent = parent_arr
    cdef int64_t[::1] size = size_arr
    cdef int64_t e, a, b, m = us.shape[0]
    with nogil:
        for e in range(m):
            a = _find(&parent[0], us[e])
            b = _find(&parent[0], vs[e])
            if a == b:
                continue
            if size[a] < size[b] or (size[a] == size[b] and b < a):
                a, b = b, a
            parent[b] = a
            size[a] += size[b]
        for e in range(n):
            parent[e] = _find(&parent[0], e)
    return parent_arr


cdef inline int64_t _search(const double* cdf, int64_t lo, int64_t hi, double u) noexcept nogil:
    # first index in [lo, hi) with cdf > u; the last atom absorbs rounding
    cdef int64_t a = lo, b = hi - 1, mid
    while a < b:
        mid = (a + b) >> 1
        if cdf[mid] > u:
            b = mid
        else:
            a = mid + 1
    return a


def simulate_bp(object rng, int64_t cap,
                const double[::1] root_cdf, const int32_t[:, ::1] root_children,
                const int64_t[::1] type_ptr, const double[::1] type_cdf,
                const int32_t[:, ::1] type_children, int64_t max_children):
    """One breadth-first run of the multi-type branching process.

    Returns ``(survived, size)``; survival means the total population
    exceeded ``cap``.
    """
    cdef int64_t N = type_ptr.shape[0] - 1
    cdef bitgen_t* g = _bitgen(rng)
    queue_arr = np.empty(cap + max_children + 2, dtype=np.int64)
    cdef int64_t[::1] queue = queue_arr
    cdef int64_t head = 0, tail = 0, born = 1, a, s, t, r
    cdef bint survived = False
    with rng.bit_generator.lock:
      with nogil:
        a = _search(&root_cdf[0], 0, root_cdf.shape[0], g.next_double(g.state))
        for s in range(N):
            for r in range(root_children[a, s]):
                queue[tail] = s
                tail += 1
        born += tail
        if born > cap:
            survived = True
        while not survived and head < tail:
            t = queue[head]
            head += 1
            a = _search(&type_cdf[0], type_ptr[t], type_ptr[t + 1], g.next_double(g.state))
            for s in range(N):
                for r in range(type_children[a, s]):
                    queue[tail] = s
                    tail += 1
                    born += 1
            if born > cap:
                survived = True
    return bool(survived), born
