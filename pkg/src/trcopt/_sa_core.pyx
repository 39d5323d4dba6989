# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulated-annealing kernel.

Mirrors ``trcopt._sa_ref`` operation for operation (same splitmix64
stream, same float arithmetic order) so both kernels produce identical
results; this one is the fast path for paper-scale sweeps.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport exp, pow
from libc.stdlib cimport free, malloc

cnp.import_array()

KERNEL_NAME = "compiled"

cdef extern from *:
    """
    #include <stdint.h>
    static const uint64_t TRC_GOLDEN = 0x9E3779B97F4A7C15ULL;
    static inline uint64_t trc_mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    """
    unsigned long long TRC_GOLDEN
    unsigned long long trc_mix(unsigned long long z) nogil


cdef inline unsigned long long _next_u64(unsigned long long* state) nogil:
    state[0] += TRC_GOLDEN
    return trc_mix(state[0])


cdef inline double _uniform(unsigned long long* state) nogil:
    return <double>(_next_u64(state) >> 11) * (1.0 / 9007199254740992.0)


def sample(qsym, diag, int num_reads, int sweeps, double beta_min,
           double beta_max, object seed):
    """Same contract as trcopt._sa_ref.sample."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] q = \
        np.ascontiguousarray(qsym, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] d = \
        np.ascontiguousarray(diag, dtype=np.float64)
    cdef int n = d.shape[0]
    cdef unsigned long long base_seed = <unsigned long long>(int(seed) & ((1 << 64) - 1))

    cdef cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] states = \
        np.empty((num_reads, n), dtype=np.uint8)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] energies = \
        np.empty(num_reads, dtype=np.float64)

    cdef double ratio = beta_max / beta_min
    cdef int denom = sweeps - 1 if sweeps > 1 else 1

    cdef unsigned long long rng
    cdef int read, sweep, i, j, step
    cdef double beta, delta, energy, best_energy
    cdef unsigned char* x = <unsigned char*>malloc(n * sizeof(unsigned char))
    cdef unsigned char* best = <unsigned char*>malloc(n * sizeof(unsigned char))
    cdef double* field = <double*>malloc(n * sizeof(double))
    if x == NULL or best == NULL or field == NULL:
        free(x); free(best); free(field)
        raise MemoryError()

    try:
        with nogil:
            for read in range(num_reads):
                rng = base_seed + (<unsigned long long>(read + 1)) * TRC_GOLDEN
                for i in range(n):
                    x[i] = <unsigned char>(_next_u64(&rng) >> 63)
                for i in range(n):
                    field[i] = d[i]
                    for j in range(n):
                        if x[j]:
                            field[i] += q[i, j]
                energy = 0.0
                for i in range(n):
                    if x[i]:
                        energy += d[i]
                for i in range(n):
                    if x[i]:
                        energy += 0.5 * (field[i] - d[i])
                best_energy = energy
                for i in range(n):
                    best[i] = x[i]

                for sweep in range(sweeps):
                    beta = beta_min * pow(ratio, (<double>sweep) / denom)
                    for i in range(n):
                        delta = (1 - 2 * <int>x[i]) * field[i]
                        if delta <= 0.0 or _uniform(&rng) < exp(-beta * delta):
                            step = 1 - 2 * <int>x[i]
                            x[i] ^= 1
                            energy += delta
                            for j in range(n):
                                field[j] += step * q[i, j]
                            if energy < best_energy:
                                best_energy = energy
                                for j in range(n):
                                    best[j] = x[j]

                for i in range(n):
                    states[read, i] = best[i]
                energies[read] = best_energy
    finally:
        free(x)
        free(best)
        free(field)
    return np.asarray(states), np.asarray(energies)
