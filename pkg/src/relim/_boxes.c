/* Compiled core for the maximal-box closure.
 *
 * Mirrors the pure-Python engine in roundelim.py: iterated consensus on
 * canonical slot-sorted cubes, an antichain of survivors bucketed by
 * slot-union mask, and a strongest-first worklist.  Restricted to cubes of
 * width at most 12 over label masks that fit in 63 bits; the caller falls
 * back to the Python engine outside that range.
 *
 * The result set is the same mathematical object the Python engine
 * produces (every maximal box of the consensus closure), so the two
 * engines agree exactly even though their traversal orders differ.
 * Budget accounting mirrors the Python spend sites: one unit per popped
 * cube, the bucket length per absorption scan, the number of inspected
 * entries per domination sweep, and the number of slot pairings per merge.
 */

#define PY_SSIZE_T_CLEAN
#include <Python.h>

#include <stdint.h>
#include <stdlib.h>
#include <string.h>

typedef uint64_t u64;
typedef uint32_t u32;

#define MAXW 12
#define EMPTY_SLOT 0xFFFFFFFFu

enum { ST_PENDING = 1, ST_PRIME = 2, ST_SEEN = 3 };

typedef struct {
    u64 slot[MAXW];
    u64 u;                /* union of slots */
    unsigned short wgt;   /* sum of slot popcounts */
    unsigned char prof[MAXW]; /* slot popcounts, descending */
    unsigned char status;
} Entry;

typedef struct {
    u64 key;              /* union mask shared by the bucket's cubes */
    u32 *it;              /* entry indices */
    u32 n, cap;
} Bucket;

typedef struct { u32 wgt, idx; } HeapItem;

typedef struct {
    int w;
    u64 limit, used;
    int aborted;          /* budget exceeded */
    int oom;

    Entry *ent;
    u32 n_ent, cap_ent;

    u32 *tab;             /* open-addressed: entry index or EMPTY_SLOT */
    u64 tab_size;         /* power of two */
    u32 tab_used;

    Bucket *bk;
    u32 n_bk, cap_bk;
    u32 *btab;            /* union mask -> bucket index, open-addressed */
    u64 btab_size;

    HeapItem *heap;
    u32 n_heap, cap_heap;

    u32 purge_at;
} Eng;

/* ------------------------------------------------------------------ */
/* hashing */

static u64 hash_slots(const u64 *s, int w) {
    u64 h = 1469598103934665603ull;
    for (int i = 0; i < w; i++) {
        h ^= s[i];
        h *= 1099511628211ull;
        h ^= h >> 29;
    }
    return h;
}

static u64 hash_u64(u64 x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ull;
    x ^= x >> 33;
    return x;
}

/* ------------------------------------------------------------------ */
/* entry table */

static int tab_grow(Eng *E) {
    u64 ns = E->tab_size ? E->tab_size * 2 : (1u << 16);
    u32 *nt = malloc(ns * sizeof(u32));
    if (!nt) { E->oom = 1; E->aborted = 1; return 0; }
    memset(nt, 0xFF, ns * sizeof(u32));
    for (u32 i = 0; i < E->n_ent; i++) {
        u64 j = hash_slots(E->ent[i].slot, E->w) & (ns - 1);
        while (nt[j] != EMPTY_SLOT) j = (j + 1) & (ns - 1);
        nt[j] = i;
    }
    free(E->tab);
    E->tab = nt;
    E->tab_size = ns;
    return 1;
}

/* Find the entry holding the given canonical cube, or create one with the
 * given status.  Returns the entry index, with *fresh set when created. */
static u32 ent_intern(Eng *E, const u64 *slots, int *fresh) {
    *fresh = 0;
    if ((u64)(E->tab_used + 1) * 10 >= E->tab_size * 7) {
        if (!tab_grow(E)) return 0;
    }
    u64 mask = E->tab_size - 1;
    u64 j = hash_slots(slots, E->w) & mask;
    while (E->tab[j] != EMPTY_SLOT) {
        Entry *e = &E->ent[E->tab[j]];
        if (memcmp(e->slot, slots, (size_t)E->w * sizeof(u64)) == 0)
            return E->tab[j];
        j = (j + 1) & mask;
    }
    if (E->n_ent == E->cap_ent) {
        u32 nc = E->cap_ent ? E->cap_ent * 2 : (1u << 14);
        Entry *ne = realloc(E->ent, (size_t)nc * sizeof(Entry));
        if (!ne) { E->oom = 1; E->aborted = 1; return 0; }
        E->ent = ne;
        E->cap_ent = nc;
    }
    u32 idx = E->n_ent++;
    Entry *e = &E->ent[idx];
    memset(e, 0, sizeof(Entry));
    memcpy(e->slot, slots, (size_t)E->w * sizeof(u64));
    u64 u = 0;
    unsigned sum = 0;
    for (int k = 0; k < E->w; k++) {
        u |= slots[k];
        unsigned pc = (unsigned)__builtin_popcountll(slots[k]);
        e->prof[k] = (unsigned char)pc;
        sum += pc;
    }
    /* profile sorts descending; insertion sort on at most 12 bytes */
    for (int a = 1; a < E->w; a++) {
        unsigned char v = e->prof[a];
        int b = a;
        while (b > 0 && e->prof[b - 1] < v) { e->prof[b] = e->prof[b - 1]; b--; }
        e->prof[b] = v;
    }
    e->u = u;
    e->wgt = (unsigned short)sum;
    e->status = 0;
    E->tab[j] = idx;
    E->tab_used++;
    *fresh = 1;
    return idx;
}

/* ------------------------------------------------------------------ */
/* prime buckets */

static int btab_grow(Eng *E) {
    u64 ns = E->btab_size ? E->btab_size * 2 : (1u << 10);
    u32 *nt = malloc(ns * sizeof(u32));
    if (!nt) { E->oom = 1; E->aborted = 1; return 0; }
    memset(nt, 0xFF, ns * sizeof(u32));
    for (u32 i = 0; i < E->n_bk; i++) {
        u64 j = hash_u64(E->bk[i].key) & (ns - 1);
        while (nt[j] != EMPTY_SLOT) j = (j + 1) & (ns - 1);
        nt[j] = i;
    }
    free(E->btab);
    E->btab = nt;
    E->btab_size = ns;
    return 1;
}

static Bucket *bucket_for(Eng *E, u64 key) {
    if ((u64)(E->n_bk + 1) * 10 >= E->btab_size * 7) {
        if (!btab_grow(E)) return NULL;
    }
    u64 mask = E->btab_size - 1;
    u64 j = hash_u64(key) & mask;
    while (E->btab[j] != EMPTY_SLOT) {
        if (E->bk[E->btab[j]].key == key) return &E->bk[E->btab[j]];
        j = (j + 1) & mask;
    }
    if (E->n_bk == E->cap_bk) {
        u32 nc = E->cap_bk ? E->cap_bk * 2 : 256;
        Bucket *nb = realloc(E->bk, (size_t)nc * sizeof(Bucket));
        if (!nb) { E->oom = 1; E->aborted = 1; return NULL; }
        E->bk = nb;
        E->cap_bk = nc;
    }
    u32 bi = E->n_bk++;
    Bucket *b = &E->bk[bi];
    b->key = key;
    b->it = NULL;
    b->n = b->cap = 0;
    E->btab[j] = bi;
    return b;
}

static int bucket_push(Eng *E, Bucket *b, u32 idx) {
    if (b->n == b->cap) {
        u32 nc = b->cap ? b->cap * 2 : 4;
        u32 *ni = realloc(b->it, (size_t)nc * sizeof(u32));
        if (!ni) { E->oom = 1; E->aborted = 1; return 0; }
        b->it = ni;
        b->cap = nc;
    }
    b->it[b->n++] = idx;
    return 1;
}

/* ------------------------------------------------------------------ */
/* heap (max by weight) */

static int heap_push(Eng *E, u32 wgt, u32 idx) {
    if (E->n_heap == E->cap_heap) {
        u32 nc = E->cap_heap ? E->cap_heap * 2 : (1u << 14);
        HeapItem *nh = realloc(E->heap, (size_t)nc * sizeof(HeapItem));
        if (!nh) { E->oom = 1; E->aborted = 1; return 0; }
        E->heap = nh;
        E->cap_heap = nc;
    }
    u32 i = E->n_heap++;
    while (i > 0) {
        u32 parent = (i - 1) / 2;
        if (E->heap[parent].wgt >= wgt) break;
        E->heap[i] = E->heap[parent];
        i = parent;
    }
    E->heap[i].wgt = wgt;
    E->heap[i].idx = idx;
    return 1;
}

static u32 heap_pop(Eng *E) {
    u32 top = E->heap[0].idx;
    HeapItem last = E->heap[--E->n_heap];
    u32 i = 0;
    for (;;) {
        u32 l = 2 * i + 1, r = l + 1, big = i;
        u32 w = last.wgt;
        if (l < E->n_heap && E->heap[l].wgt > w) { big = l; w = E->heap[l].wgt; }
        if (r < E->n_heap && E->heap[r].wgt > w) big = r;
        if (big == i) break;
        E->heap[i] = E->heap[big];
        i = big;
    }
    if (E->n_heap) E->heap[i] = last;
    return top;
}

/* ------------------------------------------------------------------ */
/* slot matching: can each slot of c go to a distinct covering slot of p? */

static int fits_aug(int i, const unsigned short *adj, int *mp, unsigned *vis,
                    int w) {
    for (int j = 0; j < w; j++) {
        if ((adj[i] >> j & 1) && !(*vis >> j & 1)) {
            *vis |= 1u << j;
            if (mp[j] < 0 || fits_aug(mp[j], adj, mp, vis, w)) {
                mp[j] = i;
                return 1;
            }
        }
    }
    return 0;
}

static int fits(const u64 *c, const u64 *p, int w) {
    unsigned short adj[MAXW];
    int mp[MAXW];
    for (int i = 0; i < w; i++) {
        unsigned short m = 0;
        for (int j = 0; j < w; j++)
            if ((c[i] & ~p[j]) == 0) m |= (unsigned short)(1u << j);
        if (!m) return 0;
        adj[i] = m;
    }
    for (int j = 0; j < w; j++) mp[j] = -1;
    for (int i = 0; i < w; i++) {
        unsigned vis = 0;
        if (!fits_aug(i, adj, mp, &vis, w)) return 0;
    }
    return 1;
}

/* ------------------------------------------------------------------ */
/* purge: drop absorbed cubes to bound memory; survivors keep working.
 * Sound because absorption is permanent, so the seen marks only save
 * rescans and can be discarded wholesale. */

static void purge(Eng *E) {
    u32 *remap = malloc((size_t)E->n_ent * sizeof(u32));
    if (!remap) return; /* skip the purge; memory pressure stays */
    u32 live = 0;
    for (u32 i = 0; i < E->n_ent; i++) {
        if (E->ent[i].status == ST_SEEN) {
            remap[i] = EMPTY_SLOT;
        } else {
            if (live != i) E->ent[live] = E->ent[i];
            remap[i] = live++;
        }
    }
    E->n_ent = live;
    E->tab_used = live;
    memset(E->tab, 0xFF, E->tab_size * sizeof(u32));
    for (u32 i = 0; i < live; i++) {
        u64 j = hash_slots(E->ent[i].slot, E->w) & (E->tab_size - 1);
        while (E->tab[j] != EMPTY_SLOT) j = (j + 1) & (E->tab_size - 1);
        E->tab[j] = i;
    }
    for (u32 i = 0; i < E->n_heap; i++)
        E->heap[i].idx = remap[E->heap[i].idx];
    for (u32 b = 0; b < E->n_bk; b++)
        for (u32 k = 0; k < E->bk[b].n; k++)
            E->bk[b].it[k] = remap[E->bk[b].it[k]];
    free(remap);
    u32 next = live + 2000000u;
    E->purge_at = next < 4000000u ? 4000000u : next;
}

/* ------------------------------------------------------------------ */
/* the absorbed / drop / insert trio over the antichain */

static int absorbed(Eng *E, const u64 *cs, u64 cu, unsigned cw,
                    const unsigned char *cp) {
    for (u32 bi = 0; bi < E->n_bk; bi++) {
        Bucket *b = &E->bk[bi];
        if (b->n == 0 || (cu & b->key) != cu) continue;
        E->used += b->n;
        if (E->used > E->limit) { E->aborted = 1; return 0; }
        for (u32 k = 0; k < b->n; k++) {
            Entry *p = &E->ent[b->it[k]];
            if (p->wgt < cw) continue;
            int dom = 1;
            for (int t = 0; t < E->w; t++)
                if (cp[t] > p->prof[t]) { dom = 0; break; }
            if (!dom) continue;
            if (memcmp(cp, p->prof, (size_t)E->w) == 0) continue;
            if (fits(cs, p->slot, E->w)) return 1;
        }
    }
    return 0;
}

static void drop_dominated(Eng *E, const u64 *cs, u64 cu, unsigned cw,
                           const unsigned char *cp) {
    for (u32 bi = 0; bi < E->n_bk; bi++) {
        Bucket *b = &E->bk[bi];
        if (b->n == 0 || (b->key & cu) != b->key) continue;
        for (u32 k = 0; k < b->n; k++) {
            Entry *p = &E->ent[b->it[k]];
            if (p->wgt > cw) continue;
            E->used += 1;
            if (E->used > E->limit) { E->aborted = 1; return; }
            int dom = 1;
            for (int t = 0; t < E->w; t++)
                if (p->prof[t] > cp[t]) { dom = 0; break; }
            if (!dom) continue;
            if (memcmp(p->prof, cp, (size_t)E->w) == 0) continue;
            if (fits(p->slot, cs, E->w)) {
                p->status = ST_SEEN;
                b->it[k] = b->it[--b->n];
                k--;
            }
        }
    }
}

static int insert_prime(Eng *E, u32 idx) {
    Bucket *b = bucket_for(E, E->ent[idx].u);
    if (!b) return 0;
    if (!bucket_push(E, b, idx)) return 0;
    E->ent[idx].status = ST_PRIME;
    return 1;
}

/* ------------------------------------------------------------------ */
/* consensus merge of two cubes given as slot-group runs */

typedef struct {
    Eng *E;
    int r, s;
    u64 am[MAXW], bm[MAXW];
    int an[MAXW], bn[MAXW];
    u64 meets[MAXW][MAXW];
    unsigned char zero[MAXW][MAXW];
    int mat[MAXW][MAXW];
    int colrem[MAXW];
    u64 leaves;
} Merge;

/* Queue one consensus cube: canonicalize, dedup, absorb-or-push. */
static void emit(Eng *E, u64 *cube) {
    int w = E->w;
    for (int a = 1; a < w; a++) { /* ascending insertion sort */
        u64 v = cube[a];
        int b = a;
        while (b > 0 && cube[b - 1] > v) { cube[b] = cube[b - 1]; b--; }
        cube[b] = v;
    }
    int fresh = 0;
    u32 idx = ent_intern(E, cube, &fresh);
    if (E->aborted || !fresh) return;
    Entry *e = &E->ent[idx];
    u64 cs[MAXW];
    memcpy(cs, e->slot, (size_t)w * sizeof(u64));
    u64 cu = e->u;
    unsigned cw = e->wgt;
    unsigned char cp[MAXW];
    memcpy(cp, e->prof, (size_t)w);
    if (absorbed(E, cs, cu, cw, cp)) {
        E->ent[idx].status = ST_SEEN;
        return;
    }
    if (E->aborted) return;
    E->ent[idx].status = ST_PENDING;
    heap_push(E, cw, idx);
    if (E->n_ent >= E->purge_at) purge(E);
}

static void emit_table(Merge *g, int conflicts) {
    Eng *E = g->E;
    u64 cube[MAXW];
    if (conflicts) {
        int n = 0;
        for (int i = 0; i < g->r; i++)
            for (int j = 0; j < g->s; j++) {
                int v = g->mat[i][j];
                if (!v) continue;
                if (g->meets[i][j]) {
                    for (int t = 0; t < v; t++) cube[n++] = g->meets[i][j];
                } else {
                    cube[n++] = g->am[i] | g->bm[j];
                }
            }
        emit(E, cube);
        return;
    }
    for (int wi = 0; wi < g->r; wi++)
        for (int wj = 0; wj < g->s; wj++) {
            if (!g->mat[wi][wj]) continue;
            u64 a = g->am[wi], b = g->bm[wj];
            u64 m = a & b;
            if (m == a || m == b) continue; /* nested pair: rebuilds a parent */
            int n = 0;
            for (int i = 0; i < g->r; i++)
                for (int j = 0; j < g->s; j++) {
                    int v = g->mat[i][j];
                    if (!v) continue;
                    if (i == wi && j == wj) {
                        cube[n++] = a | b;
                        v--;
                    }
                    for (int t = 0; t < v; t++) cube[n++] = g->meets[i][j];
                }
            emit(E, cube);
            if (E->aborted) return;
        }
}

static void fill(Merge *g, int i, int j, int left, int conflicts) {
    if (g->E->aborted) return;
    if (j == g->s) {
        if (left) return;
        if (i + 1 < g->r) { fill(g, i + 1, 0, g->an[i + 1], conflicts); return; }
        g->leaves++;
        emit_table(g, conflicts);
        return;
    }
    int top = left < g->colrem[j] ? left : g->colrem[j];
    for (int v = 0; v <= top; v++) {
        int nc = g->zero[i][j] ? conflicts + v : conflicts;
        if (nc > 1) break;
        g->mat[i][j] = v;
        g->colrem[j] -= v;
        fill(g, i, j + 1, left - v, nc);
        g->colrem[j] += v;
        g->mat[i][j] = 0;
        if (g->E->aborted) return;
    }
}

static int groups_of(const u64 *slots, int w, u64 *gm, int *gn) {
    int r = 0;
    for (int i = 0; i < w; i++) {
        if (r && gm[r - 1] == slots[i]) {
            gn[r - 1]++;
        } else {
            gm[r] = slots[i];
            gn[r] = 1;
            r++;
        }
    }
    return r;
}

static void merge_pair(Eng *E, const u64 *ca, const u64 *cb) {
    Merge g;
    g.E = E;
    g.r = groups_of(ca, E->w, g.am, g.an);
    g.s = groups_of(cb, E->w, g.bm, g.bn);
    for (int i = 0; i < g.r; i++)
        for (int j = 0; j < g.s; j++) {
            u64 m = g.am[i] & g.bm[j];
            g.meets[i][j] = m;
            g.zero[i][j] = (m == 0);
            g.mat[i][j] = 0;
        }
    for (int j = 0; j < g.s; j++) g.colrem[j] = g.bn[j];
    g.leaves = 0;
    fill(&g, 0, 0, g.an[0], 0);
    E->used += g.leaves;
    if (E->used > E->limit) E->aborted = 1;
}

/* ------------------------------------------------------------------ */
/* driver */

static void eng_free(Eng *E) {
    free(E->ent);
    free(E->tab);
    for (u32 i = 0; i < E->n_bk; i++) free(E->bk[i].it);
    free(E->bk);
    free(E->btab);
    free(E->heap);
}

static int run(Eng *E, const u64 *start, u32 n_start) {
    for (u32 i = 0; i < n_start; i++) {
        int fresh = 0;
        u32 idx = ent_intern(E, start + (size_t)i * E->w, &fresh);
        if (E->aborted) return 0;
        if (!fresh) continue;
        E->ent[idx].status = ST_PENDING;
        if (!heap_push(E, E->ent[idx].wgt, idx)) return 0;
    }
    while (E->n_heap) {
        u32 ci = heap_pop(E);
        E->used += 1;
        if (E->used > E->limit) { E->aborted = 1; return 0; }
        if (E->ent[ci].status == ST_PRIME) continue;
        u64 cs[MAXW];
        memcpy(cs, E->ent[ci].slot, (size_t)E->w * sizeof(u64));
        u64 cu = E->ent[ci].u;
        unsigned cw = E->ent[ci].wgt;
        unsigned char cp[MAXW];
        memcpy(cp, E->ent[ci].prof, (size_t)E->w);
        if (absorbed(E, cs, cu, cw, cp)) {
            E->ent[ci].status = ST_SEEN;
            continue;
        }
        if (E->aborted) return 0;
        drop_dominated(E, cs, cu, cw, cp);
        if (E->aborted) return 0;
        if (!insert_prime(E, ci)) return 0;
        /* merge against every current prime, the new one included; the
         * antichain cannot change during this loop, so iterating the live
         * buckets equals the snapshot the Python engine takes */
        for (u32 bi = 0; bi < E->n_bk && !E->aborted; bi++) {
            Bucket *b = &E->bk[bi];
            for (u32 k = 0; k < b->n && !E->aborted; k++) {
                u64 ps[MAXW];
                memcpy(ps, E->ent[b->it[k]].slot, (size_t)E->w * sizeof(u64));
                merge_pair(E, cs, ps);
            }
        }
        if (E->aborted) return 0;
    }
    return 1;
}

/* ------------------------------------------------------------------ */
/* sorting the result (GIL held, so a file-scope width is safe) */

static int g_sort_w;

static int cmp_rows(const void *x, const void *y) {
    const u64 *a = x, *b = y;
    for (int i = 0; i < g_sort_w; i++) {
        if (a[i] < b[i]) return -1;
        if (a[i] > b[i]) return 1;
    }
    return 0;
}

/* ------------------------------------------------------------------ */
/* python binding */

static PyObject *py_maximal(PyObject *self, PyObject *args) {
    PyObject *cubes;
    int width;
    unsigned long long limit;
    (void)self;
    if (!PyArg_ParseTuple(args, "OiK", &cubes, &width, &limit))
        return NULL;
    if (width < 1 || width > MAXW) {
        PyErr_SetString(PyExc_ValueError, "width out of range for this engine");
        return NULL;
    }
    PyObject *fast = PySequence_Fast(cubes, "cube list expected");
    if (!fast) return NULL;
    Py_ssize_t n = PySequence_Fast_GET_SIZE(fast);
    u64 *start = malloc((size_t)(n ? n : 1) * (size_t)width * sizeof(u64));
    if (!start) { Py_DECREF(fast); return PyErr_NoMemory(); }
    for (Py_ssize_t i = 0; i < n; i++) {
        PyObject *cfg = PySequence_Fast_GET_ITEM(fast, i);
        PyObject *row = PySequence_Fast(cfg, "cube tuple expected");
        if (!row) { free(start); Py_DECREF(fast); return NULL; }
        if (PySequence_Fast_GET_SIZE(row) != width) {
            Py_DECREF(row); free(start); Py_DECREF(fast);
            PyErr_SetString(PyExc_ValueError, "cube width mismatch");
            return NULL;
        }
        for (int k = 0; k < width; k++) {
            u64 v = PyLong_AsUnsignedLongLong(
                PySequence_Fast_GET_ITEM(row, k));
            if (v == (u64)-1 && PyErr_Occurred()) {
                Py_DECREF(row); free(start); Py_DECREF(fast);
                return NULL;
            }
            start[(size_t)i * width + k] = v;
        }
        Py_DECREF(row);
    }
    Py_DECREF(fast);

    Eng E;
    memset(&E, 0, sizeof(E));
    E.w = width;
    E.limit = limit;
    E.purge_at = 4000000u;
    int ok;
    Py_BEGIN_ALLOW_THREADS
    ok = run(&E, start, (u32)n);
    Py_END_ALLOW_THREADS
    free(start);
    if (E.oom) {
        eng_free(&E);
        return PyErr_NoMemory();
    }
    if (!ok) {
        u64 used = E.used;
        eng_free(&E);
        return Py_BuildValue("OK", Py_None, (unsigned long long)used);
    }

    u32 live = 0;
    for (u32 i = 0; i < E.n_ent; i++)
        if (E.ent[i].status == ST_PRIME) live++;
    u64 *rows = malloc((size_t)(live ? live : 1) * (size_t)width * sizeof(u64));
    if (!rows) { eng_free(&E); return PyErr_NoMemory(); }
    u32 at = 0;
    for (u32 i = 0; i < E.n_ent; i++)
        if (E.ent[i].status == ST_PRIME)
            memcpy(rows + (size_t)(at++) * width, E.ent[i].slot,
                   (size_t)width * sizeof(u64));
    g_sort_w = width;
    qsort(rows, live, (size_t)width * sizeof(u64), cmp_rows);

    PyObject *out = PyList_New(live);
    if (!out) { free(rows); eng_free(&E); return NULL; }
    for (u32 i = 0; i < live; i++) {
        PyObject *tup = PyTuple_New(width);
        if (!tup) { Py_DECREF(out); free(rows); eng_free(&E); return NULL; }
        for (int k = 0; k < width; k++) {
            PyObject *v = PyLong_FromUnsignedLongLong(
                rows[(size_t)i * width + k]);
            if (!v) {
                Py_DECREF(tup); Py_DECREF(out); free(rows); eng_free(&E);
                return NULL;
            }
            PyTuple_SET_ITEM(tup, k, v);
        }
        PyList_SET_ITEM(out, i, tup);
    }
    free(rows);
    u64 used = E.used;
    eng_free(&E);
    PyObject *res = Py_BuildValue("OK", out, (unsigned long long)used);
    Py_DECREF(out);
    return res;
}

static PyMethodDef methods[] = {
    {"maximal", py_maximal, METH_VARARGS,
     "maximal(cubes, width, budget) -> (boxes | None, steps_spent)\n\n"
     "All maximal boxes of the union of the given canonical cubes, or\n"
     "None with the step count when the budget runs out first."},
    {NULL, NULL, 0, NULL},
};

static struct PyModuleDef moduledef = {
    PyModuleDef_HEAD_INIT, "_boxes",
    "Compiled maximal-box closure over 63-bit label masks.",
    -1, methods, NULL, NULL, NULL, NULL,
};

PyMODINIT_FUNC PyInit__boxes(void) {
    return PyModule_Create(&moduledef);
}
