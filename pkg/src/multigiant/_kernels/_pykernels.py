"""Pure-Python kernels, draw-for-draw identical to the compiled ones.

Used when the extension is not built (or ``MULTIGIANT_PURE=1``) and as the
reference the compiled module is tested against.
"""
import numpy as np

SLEEPING, ACTIVE, DEAD = 0, 1, 2
EV_INIT, EV_RESTART, EV_BACK, EV_WAKE = 0, 1, 2, 3


def _pick(u, size):
    k = int(u * size)
    return size - 1 if k >= size else k


class IndexedSet:
    """Dense array with O(1) append and swap-removal."""

    __slots__ = ("items", "pos")

    def __init__(self, capacity, items=()):
        self.items = []
        self.pos = [-1] * capacity
        for x in items:
            self.add(x)

    def __len__(self):
        return len(self.items)

    def add(self, x):
        self.pos[x] = len(self.items)
        self.items.append(x)

    def remove(self, x):
        p = self.pos[x]
        last = self.items.pop()
        if last != x:
            self.items[p] = last
            self.pos[last] = p
        self.pos[x] = -1

    def __getitem__(self, k):
        return self.items[k]


class Explorer:
    """Stepwise exploration process on a clone graph with fixed matching.

    ``vertex_ptr[v]:vertex_ptr[v+1]`` are the clone ids owned by vertex
    ``v``; ``partner[c]`` is the clone matched with ``c``.
    """

    def __init__(self, vertex_ptr, partner):
        self.vertex_ptr = [int(x) for x in vertex_ptr]
        self.partner = [int(x) for x in partner]
        n = len(self.vertex_ptr) - 1
        C = len(self.partner)
        self.n = n
        self.clone_vertex = [0] * C
        for v in range(n):
            for c in range(self.vertex_ptr[v], self.vertex_ptr[v + 1]):
                self.clone_vertex[c] = v
        self.status = [SLEEPING] * C
        self.active = IndexedSet(C)
        self.sleeping = IndexedSet(C, range(C))
        self.sleeping_vertices = IndexedSet(n, range(n))
        self.labels = [-1] * n
        self.comp = -1
        self.k = 0
        self.case1 = 0
        self.starts = 0

    @classmethod
    def from_status(cls, vertex_ptr, partner, status):
        """Frozen mid-run state; sleeping clones must belong to sleeping vertices."""
        self = cls(vertex_ptr, partner)
        for c, s in enumerate(status):
            s = int(s)
            if s == SLEEPING:
                continue
            self.sleeping.remove(c)
            self.status[c] = s
            if s == ACTIVE:
                self.active.add(c)
            v = self.clone_vertex[c]
            if self.sleeping_vertices.pos[v] != -1:
                self.sleeping_vertices.remove(v)
        for v in range(self.n):
            if self.sleeping_vertices.pos[v] == -1:
                self.labels[v] = 0
        self.comp = 0
        return self

    def _wake(self, w, killed=-1):
        self.sleeping_vertices.remove(w)
        self.labels[w] = self.comp
        for c in range(self.vertex_ptr[w], self.vertex_ptr[w + 1]):
            self.sleeping.remove(c)
            if c == killed:
                self.status[c] = DEAD
            else:
                self.status[c] = ACTIVE
                self.active.add(c)

    def initialise(self, u):
        v = self.sleeping_vertices[_pick(u, len(self.sleeping_vertices))]
        self.comp += 1
        self._wake(v)
        self.starts += 1
        self.k += 1
        return EV_INIT, -1, v

    def step(self, u):
        """One Case-1 step: kill a uniform active clone and reveal its partner."""
        c = self.active[_pick(u, len(self.active))]
        self.active.remove(c)
        self.status[c] = DEAD
        c2 = self.partner[c]
        if self.status[c2] == ACTIVE:
            self.active.remove(c2)
            self.status[c2] = DEAD
            ev = EV_BACK
        else:
            self._wake(self.clone_vertex[c2], killed=c2)
            ev = EV_WAKE
        self.case1 += 1
        self.k += 1
        return ev, c, c2

    def restart(self, u):
        """Case-2 step: wake the vertex of a uniform sleeping clone."""
        c = self.sleeping[_pick(u, len(self.sleeping))]
        w = self.clone_vertex[c]
        self.comp += 1
        self._wake(w)
        self.starts += 1
        self.k += 1
        return EV_RESTART, c, w


def explore(rng, vertex_ptr, partner, log_capacity=0):
    ex = Explorer(vertex_ptr, partner)
    log = []
    logged = 0

    def record(k, event):
        nonlocal logged
        if log_capacity > 0:
            row = (k,) + tuple(event)
            if len(log) < log_capacity:
                log.append(row)
            else:
                log[logged % log_capacity] = row
            logged += 1

    if ex.n > 0:
        k = ex.k
        record(k, ex.initialise(rng.random()))
    while True:
        while len(ex.active):
            k = ex.k
            record(k, ex.step(rng.random()))
        if not len(ex.sleeping):
            break
        k = ex.k
        record(k, ex.restart(rng.random()))
    labels = ex.labels
    comp = ex.comp
    for v in range(ex.n):
        if labels[v] == -1:
            comp += 1
            labels[v] = comp
    log_arr = np.array(log, dtype=np.int64).reshape(-1, 4)
    return np.array(labels, dtype=np.int64), ex.case1, ex.starts, log_arr, logged


def union_find(n, us, vs):
    parent = list(range(n))
    size = [1] * n

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in zip(us.tolist(), vs.tolist()):
        a, b = find(a), find(b)
        if a == b:
            continue
        if size[a] < size[b] or (size[a] == size[b] and b < a):
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
    return np.array([find(x) for x in range(n)], dtype=np.int64)


def _search(cdf, lo, hi, u):
    a, b = lo, hi - 1
    while a < b:
        mid = (a + b) >> 1
        if cdf[mid] > u:
            b = mid
        else:
            a = mid + 1
    return a


def simulate_bp(rng, cap, root_cdf, root_children, type_ptr, type_cdf, type_children, max_children):
    N = len(type_ptr) - 1
    root_cdf = root_cdf.tolist()
    type_cdf = type_cdf.tolist()
    type_ptr = type_ptr.tolist()
    root_children = root_children.tolist()
    type_children = type_children.tolist()
    queue = []
    a = _search(root_cdf, 0, len(root_cdf), rng.random())
    for s in range(N):
        queue.extend([s] * root_children[a][s])
    born = 1 + len(queue)
    head = 0
    while born <= cap and head < len(queue):
        t = queue[head]
        head += 1
        a = _search(type_cdf, type_ptr[t], type_ptr[t + 1], rng.random())
        row = type_children[a]
        for s in range(N):
            if row[s]:
                queue.extend([s] * row[s])
                born += row[s]
    return born > cap, born
