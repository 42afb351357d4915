# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled satisfaction kernel.

Interprets the flat formula programs produced by keislerlab.engine over a
structure packed into contiguous integer tables. Node kinds, array layout,
and slot conventions are defined in engine.py; the pure backend is the
reference and this kernel must match it exactly.
"""

from libc.stdlib cimport free, malloc

DEF T_VAR = 0
DEF T_CONSTV = 1
DEF T_FUNC = 2
DEF F_REL = 10
DEF F_EQ = 11
DEF F_NOT = 12
DEF F_AND = 13
DEF F_OR = 14
DEF F_IMP = 15
DEF F_IFF = 16
DEF F_ALL = 17
DEF F_EX = 18


cdef struct Ctx:
    int n
    const unsigned char *rel_data
    const int *rel_offsets
    const int *func_data
    const int *func_offsets
    const int *kind
    const int *a
    const int *b
    const int *c
    const int *pool
    int *env


cdef int eval_term(Ctx *ctx, int node) noexcept nogil:
    cdef int k = ctx.kind[node]
    cdef int idx, i, arity, offset
    if k == T_VAR:
        return ctx.env[ctx.a[node]]
    if k == T_CONSTV:
        return ctx.a[node]
    # T_FUNC: flattened row-major lookup
    arity = ctx.c[node]
    offset = ctx.b[node]
    idx = 0
    for i in range(arity):
        idx = idx * ctx.n + eval_term(ctx, ctx.pool[offset + i])
    return ctx.func_data[ctx.func_offsets[ctx.a[node]] + idx]


cdef bint eval_formula(Ctx *ctx, int node) noexcept nogil:
    cdef int k = ctx.kind[node]
    cdef int idx, i, arity, offset, slot, v
    cdef bint left
    if k == F_REL:
        arity = ctx.c[node]
        offset = ctx.b[node]
        idx = 0
        for i in range(arity):
            idx = idx * ctx.n + eval_term(ctx, ctx.pool[offset + i])
        return ctx.rel_data[ctx.rel_offsets[ctx.a[node]] + idx] != 0
    if k == F_EQ:
        return eval_term(ctx, ctx.a[node]) == eval_term(ctx, ctx.b[node])
    if k == F_NOT:
        return not eval_formula(ctx, ctx.a[node])
    if k == F_AND:
        return eval_formula(ctx, ctx.a[node]) and eval_formula(ctx, ctx.b[node])
    if k == F_OR:
        return eval_formula(ctx, ctx.a[node]) or eval_formula(ctx, ctx.b[node])
    if k == F_IMP:
        return (not eval_formula(ctx, ctx.a[node])) or eval_formula(ctx, ctx.b[node])
    if k == F_IFF:
        left = eval_formula(ctx, ctx.a[node])
        return left == eval_formula(ctx, ctx.b[node])
    if k == F_ALL:
        slot = ctx.a[node]
        for v in range(ctx.n):
            ctx.env[slot] = v
            if not eval_formula(ctx, ctx.b[node]):
                return False
        return True
    # F_EX
    slot = ctx.a[node]
    for v in range(ctx.n):
        ctx.env[slot] = v
        if eval_formula(ctx, ctx.b[node]):
            return True
    return False


def sat_rows(
    int n,
    const unsigned char[:] rel_data,
    const int[:] rel_offsets,
    const int[:] func_data,
    const int[:] func_offsets,
    const int[:] kind,
    const int[:] a,
    const int[:] b,
    const int[:] c,
    const int[:] pool,
    int root,
    int nslots,
    const int[:] x_flat,
    int x_arity,
    int x_count,
    const int[:] y_flat,
    int y_arity,
    int y_count,
    unsigned char[:] out,
):
    """Fill out[j * x_count + i] with satisfaction at (x_tuples[i], y_tuples[j])."""
    cdef Ctx ctx
    cdef int i, j, k_
    cdef int *env = <int *> malloc(sizeof(int) * (nslots if nslots > 0 else 1))
    if env is NULL:
        raise MemoryError()
    # memoryviews of empty arrays have no data pointer; substitute a dummy
    cdef unsigned char dummy_byte = 0
    cdef int dummy_int = 0
    ctx.n = n
    ctx.rel_data = &rel_data[0] if rel_data.shape[0] > 0 else &dummy_byte
    ctx.rel_offsets = &rel_offsets[0] if rel_offsets.shape[0] > 0 else &dummy_int
    ctx.func_data = &func_data[0] if func_data.shape[0] > 0 else &dummy_int
    ctx.func_offsets = &func_offsets[0] if func_offsets.shape[0] > 0 else &dummy_int
    ctx.kind = &kind[0]
    ctx.a = &a[0]
    ctx.b = &b[0]
    ctx.c = &c[0]
    ctx.pool = &pool[0] if pool.shape[0] > 0 else &dummy_int
    ctx.env = env
    try:
        with nogil:
            for j in range(y_count):
                for k_ in range(y_arity):
                    env[x_arity + k_] = y_flat[j * y_arity + k_]
                for i in range(x_count):
                    for k_ in range(x_arity):
                        env[k_] = x_flat[i * x_arity + k_]
                    out[j * x_count + i] = 1 if eval_formula(&ctx, root) else 0
    finally:
        free(env)
