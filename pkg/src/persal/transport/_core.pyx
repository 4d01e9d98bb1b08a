# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled transportation kernel: primal-dual successive shortest paths.

Same method as persal.transport._pyref (kept in sync by the backend
equivalence tests): one Dijkstra with node potentials per phase, then a
saturating push through the zero-reduced-cost (admissible) subgraph via
repeated DFS augmentation. Flow only travels on admissible arcs, so the
result is exactly optimal. The Dijkstra here uses a lazy-deletion binary
heap instead of the reference implementation's vectorized min-scan.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc

cnp.import_array()

DEF EPS = 1e-12
DEF RC_TOL = 1e-10  # fp slack when testing reduced costs for admissibility
cdef double INF = float("inf")


cdef struct Heap:
    double *key
    Py_ssize_t *node
    Py_ssize_t size
    Py_ssize_t cap


cdef inline int heap_push(Heap *h, double key, Py_ssize_t node) noexcept nogil:
    cdef Py_ssize_t i, parent
    cdef double *nk
    cdef Py_ssize_t *nn
    if h.size == h.cap:
        nk = <double *> malloc(2 * h.cap * sizeof(double))
        nn = <Py_ssize_t *> malloc(2 * h.cap * sizeof(Py_ssize_t))
        if nk == NULL or nn == NULL:
            free(nk)
            free(nn)
            return -1
        for i in range(h.size):
            nk[i] = h.key[i]
            nn[i] = h.node[i]
        free(h.key)
        free(h.node)
        h.key = nk
        h.node = nn
        h.cap *= 2
    i = h.size
    h.size += 1
    while i > 0:
        parent = (i - 1) >> 1
        if h.key[parent] <= key:
            break
        h.key[i] = h.key[parent]
        h.node[i] = h.node[parent]
        i = parent
    h.key[i] = key
    h.node[i] = node
    return 0


cdef inline Py_ssize_t heap_pop(Heap *h) noexcept nogil:
    # caller checks size > 0; returns the node with the smallest key
    cdef Py_ssize_t top = h.node[0]
    cdef double key
    cdef Py_ssize_t node, i, child
    h.size -= 1
    if h.size == 0:
        return top
    key = h.key[h.size]
    node = h.node[h.size]
    i = 0
    while True:
        child = 2 * i + 1
        if child >= h.size:
            break
        if child + 1 < h.size and h.key[child + 1] < h.key[child]:
            child += 1
        if h.key[child] >= key:
            break
        h.key[i] = h.key[child]
        h.node[i] = h.node[child]
        i = child
    h.key[i] = key
    h.node[i] = node
    return top


def solve_transport(supply, demand, cost):
    """Minimize sum(F * cost) with row sums == supply, column sums == demand."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sup = np.ascontiguousarray(supply, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dem = np.ascontiguousarray(demand, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] C = np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t S = C.shape[0]
    cdef Py_ssize_t T = C.shape[1]
    if sup.shape[0] != S or dem.shape[0] != T:
        raise ValueError("supply/demand shapes do not match the cost matrix")
    cdef double mass = np.sum(sup)
    if abs(mass - np.sum(dem)) > 1e-6 * max(1.0, mass):
        raise ValueError("transportation problem must be balanced")

    cdef cnp.ndarray[cnp.float64_t, ndim=1] rem_s = sup.copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rem_d = dem.copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=2] flow = np.zeros((S, T), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pot_s = np.zeros(S, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pot_t = np.zeros(T, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist_s = np.empty(S, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist_t = np.empty(T, dtype=np.float64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] done_s = np.empty(S, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] done_t = np.empty(T, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] visited_s = np.empty(S, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] visited_t = np.empty(T, dtype=np.uint8)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] cur_s = np.empty(S, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] cur_t = np.empty(T, dtype=np.intp)
    # DFS path of alternating node ids: 0..S-1 sources, S..S+T-1 sinks
    cdef cnp.ndarray[cnp.intp_t, ndim=1] path = np.empty(S + T + 2, dtype=np.intp)

    cdef Heap heap
    heap.cap = 4 * (S + T) + 64
    heap.size = 0
    heap.key = <double *> malloc(heap.cap * sizeof(double))
    heap.node = <Py_ssize_t *> malloc(heap.cap * sizeof(Py_ssize_t))
    if heap.key == NULL or heap.node == NULL:
        free(heap.key)
        free(heap.node)
        raise MemoryError()

    cdef double total = mass
    cdef Py_ssize_t max_phases = 100 * (S + T) + 1000
    cdef Py_ssize_t phases = 0
    cdef Py_ssize_t i, j, node, root, target, plen, k, pick
    cdef double d, nd, reach, delta
    cdef bint have_target, found
    cdef Heap *hp = &heap

    try:
        while total > EPS:
            phases += 1
            if phases > max_phases:
                raise RuntimeError("transportation solver failed to converge")

            # --- Dijkstra over the residual graph with potentials ---
            hp.size = 0
            for i in range(S):
                done_s[i] = 0
                if rem_s[i] > EPS:
                    dist_s[i] = 0.0
                    if heap_push(hp, 0.0, i) < 0:
                        raise MemoryError()
                else:
                    dist_s[i] = INF
            for j in range(T):
                dist_t[j] = INF
                done_t[j] = 0
            have_target = 0
            reach = 0.0

            while hp.size > 0:
                d = hp.key[0]
                node = heap_pop(hp)
                if node < S:
                    i = node
                    if done_s[i] or d > dist_s[i]:
                        continue  # stale entry
                    done_s[i] = 1
                    for j in range(T):  # relax forward edges (source i -> every sink)
                        if not done_t[j]:
                            nd = d + pot_s[i] + C[i, j] - pot_t[j]
                            if nd < d:
                                nd = d
                            if nd < dist_t[j]:
                                dist_t[j] = nd
                                if heap_push(hp, nd, S + j) < 0:
                                    raise MemoryError()
                else:
                    j = node - S
                    if done_t[j] or d > dist_t[j]:
                        continue
                    done_t[j] = 1
                    if rem_d[j] > EPS:
                        have_target = 1
                        if d > reach:
                            reach = d  # finalized in key order, so this ends maximal
                    for i in range(S):  # relax reverse edges (sink j -> sources with flow)
                        if flow[i, j] > EPS and not done_s[i]:
                            nd = d + pot_t[j] - C[i, j] - pot_s[i]
                            if nd < d:
                                nd = d
                            if nd < dist_s[i]:
                                dist_s[i] = nd
                                if heap_push(hp, nd, i) < 0:
                                    raise MemoryError()
            if not have_target:
                raise RuntimeError("transportation network disconnected")

            for i in range(S):
                pot_s[i] += dist_s[i] if dist_s[i] < reach else reach
            for j in range(T):
                pot_t[j] += dist_t[j] if dist_t[j] < reach else reach

            # --- saturate the admissible subgraph by DFS augmentation ---
            found = 1
            while found:
                found = 0
                for i in range(S):
                    visited_s[i] = 0
                    cur_s[i] = 0
                for j in range(T):
                    visited_t[j] = 0
                    cur_t[j] = 0
                for root in range(S):
                    if found or rem_s[root] <= EPS or visited_s[root]:
                        continue
                    visited_s[root] = 1
                    path[0] = root
                    plen = 1
                    while plen > 0:
                        node = path[plen - 1]
                        if node < S:
                            i = node
                            pick = -1
                            while cur_s[i] < T:
                                j = cur_s[i]
                                cur_s[i] += 1
                                if not visited_t[j] and C[i, j] + pot_s[i] - pot_t[j] <= RC_TOL:
                                    pick = j
                                    break
                            if pick < 0:
                                plen -= 1  # retreat; the sink below resumes its scan
                                continue
                            visited_t[pick] = 1
                            path[plen] = S + pick
                            plen += 1
                            if rem_d[pick] > EPS:
                                target = pick
                                # bottleneck over root supply, sink demand,
                                # and every reverse arc on the path
                                delta = rem_s[root]
                                if rem_d[target] < delta:
                                    delta = rem_d[target]
                                for k in range(2, plen - 1, 2):
                                    if flow[path[k], path[k - 1] - S] < delta:
                                        delta = flow[path[k], path[k - 1] - S]
                                for k in range(0, plen - 1, 2):
                                    flow[path[k], path[k + 1] - S] += delta
                                for k in range(2, plen - 1, 2):
                                    flow[path[k], path[k - 1] - S] -= delta
                                rem_s[root] -= delta
                                rem_d[target] -= delta
                                total -= delta
                                found = 1
                                break
                        else:
                            j = node - S
                            pick = -1
                            while cur_t[j] < S:
                                i = cur_t[j]
                                cur_t[j] += 1
                                if not visited_s[i] and flow[i, j] > EPS:
                                    pick = i
                                    break
                            if pick < 0:
                                plen -= 1
                                continue
                            visited_s[pick] = 1
                            path[plen] = pick
                            plen += 1
    finally:
        free(heap.key)
        free(heap.node)

    return flow
