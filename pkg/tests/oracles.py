"""Brute-force oracles, written without touching the package's search code."""

import itertools
from math import gcd


def perm_mul(p, q):
    # apply p first, then q
    return tuple(q[p[i]] for i in range(len(p)))


def perm_inv(p):
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def perm_eval(word, images, n):
    acc = tuple(range(n))
    for x in word:
        g = images[abs(x) - 1]
        acc = perm_mul(acc, g if x > 0 else perm_inv(g))
    return acc


def sym(n):
    return list(itertools.permutations(range(n)))


def brute_perm_homs(ngens, relators, n):
    """Every assignment of generators to Sym_n that kills all relators."""
    e = tuple(range(n))
    return [imgs for imgs in itertools.product(sym(n), repeat=ngens)
            if all(perm_eval(r, imgs, n) == e for r in relators)]


def table_eval(table, identity, word, images):
    inv = {}
    for x in range(len(table)):
        for y in range(len(table)):
            if table[x][y] == identity:
                inv[x] = y
    acc = identity
    for x in word:
        g = images[abs(x) - 1]
        acc = table[acc][g if x > 0 else inv[g]]
    return acc


def brute_table_homs(ngens, relators, table, identity):
    n = len(table)
    return sum(1 for imgs in itertools.product(range(n), repeat=ngens)
               if all(table_eval(table, identity, r, imgs) == identity for r in relators))


def element_orders(table, identity):
    out = []
    for x in range(len(table)):
        k, acc = 1, x
        while acc != identity:
            acc = table[acc][x]
            k += 1
        out.append(k)
    return sorted(out)


def is_group(table, identity):
    n = len(table)
    r = range(n)
    if any(table[identity][x] != x or table[x][identity] != x for x in r):
        return False
    if any(identity not in table[x] for x in r):
        return False
    return all(table[table[x][y]][z] == table[x][table[y][z]] for x in r for y in r for z in r)


def stallings_index(words, ngens):
    """Index in the free group of the subgroup generated by ``words``.

    Folds the bouquet of loops (union-find with a merge queue); returns the
    number of vertices when the folded graph is a complete covering, else
    ``None``.
    """
    parent, adj, queue = [], [], []

    def new():
        parent.append(len(parent))
        adj.append({})
        return len(parent) - 1

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def link(u, x, v):
        u = find(u)
        t = adj[u].get(x)
        if t is None:
            adj[u][x] = v
        else:
            queue.append((t, v))

    def fold():
        while queue:
            a, b = map(find, queue.pop())
            if a == b:
                continue
            if len(adj[a]) < len(adj[b]):
                a, b = b, a
            parent[b] = a
            moved, adj[b] = adj[b], {}
            for x, t in moved.items():
                link(a, x, t)

    root = new()
    for w in words:
        v = root
        for i, x in enumerate(w):
            u = root if i == len(w) - 1 else new()
            link(v, x, u)
            link(u, -x, v)
            v = u
        fold()
    live = {find(v) for v in range(len(parent))}
    letters = [s * g for g in range(1, ngens + 1) for s in (1, -1)]
    if any(x not in adj[v] for v in live for x in letters):
        return None
    return len(live)


def hermite_rows(vectors):
    """Row-style Hermite basis of the integer lattice spanned by ``vectors``."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return []
    ncols = len(rows[0])
    basis = []
    col = 0
    while rows and col < ncols:
        nz = [r for r in rows if r[col] != 0]
        if not nz:
            col += 1
            continue
        while len([r for r in rows if r[col] != 0]) > 1:
            nz = sorted([r for r in rows if r[col] != 0], key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for k in range(ncols):
                    r[k] -= q * piv[k]
            rows = [r for r in rows if any(r)]
        piv = next(r for r in rows if r[col] != 0)
        if piv[col] < 0:
            piv = [-x for x in piv]
        basis.append(piv)
        rows = [r for r in rows if r[col] == 0 and any(r) and r is not piv]
        col += 1
    return basis


def in_lattice(v, basis):
    v = list(v)
    for b in basis:
        col = next(i for i, x in enumerate(b) if x)
        if v[col] % b[col]:
            return False
        q = v[col] // b[col]
        v = [x - q * y for x, y in zip(v, b)]
    return not any(v)


def lattice_index(basis, dim):
    if len(basis) != dim:
        return None
    out = 1
    for b in basis:
        out *= abs(next(x for x in b if x))
    return out


def lcm_upto(i):
    out = 1
    for k in range(1, i + 1):
        out = out * k // gcd(out, k)
    return out


def cyclic_core_order(n, i):
    """|Z/n : C_i(Z/n)| by listing the subgroups of Z/n.

    Subgroups of Z/n are dZ/n for d | n, of index d; the intersection of
    those of index at most i has index lcm of such d.
    """
    out = 1
    for d in range(1, n + 1):
        if n % d == 0 and d <= i:
            out = out * d // gcd(out, d)
    return out


def minors_gcd(m, r):
    rows, cols = len(m), len(m[0]) if m else 0
    g = 0
    for rs in itertools.combinations(range(rows), r):
        for cs in itertools.combinations(range(cols), r):
            g = gcd(g, det([[m[i][j] for j in cs] for i in rs]))
    return g


def det(m):
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(n))


def free_reduce(word):
    out = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)
