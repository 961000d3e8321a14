"""Numba kernels for the growth processes.

The random stream is xoshiro256** seeded through splitmix64, chosen so runs
are bit-reproducible across platforms and library versions.  Weighted draws
use Fenwick (prefix-sum) trees: one over member degrees, one per color over
group sizes, giving O(log n) per event.

Colors are RED=0, BLUE=1 throughout.
"""

import numpy as np
from numba import njit

U64 = np.uint64
_SPLITMIX_GAMMA = U64(0x9E3779B97F4A7C15)
_SPLITMIX_M1 = U64(0xBF58476D1CE4E5B9)
_SPLITMIX_M2 = U64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0

STATUS_OK = 0
STATUS_GUARD_TRIPPED = 1


@njit(cache=True)
def seed_state(seed):
    s = np.empty(4, np.uint64)
    z = U64(seed)
    for i in range(4):
        z = z + _SPLITMIX_GAMMA
        w = z
        w = (w ^ (w >> U64(30))) * _SPLITMIX_M1
        w = (w ^ (w >> U64(27))) * _SPLITMIX_M2
        s[i] = w ^ (w >> U64(31))
    if s[0] | s[1] | s[2] | s[3] == U64(0):
        s[0] = U64(1)
    return s


@njit(inline="always")
def _next_u64(s):
    x = s[1] * U64(5)
    result = ((x << U64(7)) | (x >> U64(57))) * U64(9)
    t = s[1] << U64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = (s[3] << U64(45)) | (s[3] >> U64(19))
    return result


@njit(inline="always")
def _next_double(s):
    return float(_next_u64(s) >> U64(11)) * _INV_2_53


@njit(inline="always")
def _fenwick_add(tree, i, delta):
    i += 1
    n = len(tree) - 1
    while i <= n:
        tree[i] += delta
        i += i & (-i)


@njit(inline="always")
def _fenwick_sample(tree, bitmask, target):
    """Return the 0-based index whose cumulative weight interval holds target."""
    pos = 0
    n = len(tree) - 1
    bm = bitmask
    while bm != 0:
        nxt = pos + bm
        if nxt <= n and tree[nxt] <= target:
            pos = nxt
            target -= tree[nxt]
        bm >>= 1
    return pos


@njit(inline="always")
def _top_bit(n):
    bm = 1
    while bm * 2 <= n:
        bm *= 2
    return bm


@njit(cache=True)
def grow_bipartite(t_max, alpha, eta, r, xi,
                   rho_p_red, rho_p_blue, rho_u_red, rho_u_blue,
                   adjusted_coloring, literal, guard, seed, record):
    """One full bipartite growth run; returns trimmed state arrays.

    Every step adds exactly one edge.  Initial state (t=2): member 0 is red
    in red group 0, member 1 is blue in blue group 1.
    """
    s = seed_state(seed)
    mcap = t_max + 2
    gcap = t_max + 2

    member_color = np.zeros(mcap, np.int8)
    member_degree = np.zeros(mcap, np.int32)
    group_color = np.zeros(gcap, np.int8)
    group_size = np.zeros(gcap, np.int32)
    group_creator = np.zeros(gcap, np.int32)
    group_birth = np.zeros(gcap, np.int32)
    edge_member = np.zeros(t_max, np.int32)
    edge_group = np.zeros(t_max, np.int32)
    member_tree = np.zeros(mcap + 1, np.int64)
    group_tree = np.zeros((2, gcap + 1), np.int64)
    color_groups = np.zeros((2, gcap), np.int32)
    m_bitmask = _top_bit(mcap)
    g_bitmask = _top_bit(gcap)

    ecap = t_max if record else 1
    ev_action = np.zeros(ecap, np.int8)
    ev_member = np.zeros(ecap, np.int32)
    ev_group = np.zeros(ecap, np.int32)
    ev_created = np.zeros(ecap, np.int8)
    ev_mech = np.zeros(ecap, np.int8)
    ev_rej = np.zeros(ecap, np.int32)

    n_members = 2
    n_groups = 2
    n_m = np.zeros(2, np.int64)
    n_g = np.zeros(2, np.int64)
    e_m = np.zeros(2, np.int64)
    e_g = np.zeros(2, np.int64)

    # t = 2 bootstrap: one red pair and one blue pair.
    for c in range(2):
        member_color[c] = c
        member_degree[c] = 1
        group_color[c] = c
        group_size[c] = 1
        group_creator[c] = c
        group_birth[c] = c + 1
        edge_member[c] = c
        edge_group[c] = c
        _fenwick_add(member_tree, c, 1)
        _fenwick_add(group_tree[c], c, 1)
        color_groups[c, 0] = c
        n_m[c] += 1
        n_g[c] += 1
        e_m[c] += 1
        e_g[c] += 1
    t = 2

    status = STATUS_OK
    while t < t_max:
        # --- Member Growth ---
        if _next_double(s) < alpha:
            m = n_members
            mc = 0 if _next_double(s) < r else 1
            member_color[m] = mc
            n_members += 1
            n_m[mc] += 1
            action = 0
        else:
            target = np.int64(_next_double(s) * t)
            m = _fenwick_sample(member_tree, m_bitmask, target)
            mc = member_color[m]
            action = 1

        rp = rho_p_red if mc == 0 else rho_p_blue
        ru = rho_u_red if mc == 0 else rho_u_blue
        created = 0
        mech = 2
        rejections = 0

        if _next_double(s) < eta:
            # --- Group Growth ---
            g = n_groups
            if adjusted_coloring:
                gc = 0 if _next_double(s) < r else 1
            else:
                gc = mc
            group_color[g] = gc
            group_creator[g] = m
            group_birth[g] = t + 1
            color_groups[gc, n_g[gc]] = g
            n_groups += 1
            n_g[gc] += 1
            created = 1
        else:
            # --- Connection Growth ---
            o = 1 - mc
            if literal:
                while True:
                    if _next_double(s) < xi:
                        target = np.int64(_next_double(s) * t)
                        if target < e_g[0]:
                            gc = 0
                            g = _fenwick_sample(group_tree[0], g_bitmask, target)
                        else:
                            gc = 1
                            g = _fenwick_sample(group_tree[1], g_bitmask,
                                                target - e_g[0])
                        pref = True
                    else:
                        g = np.int64(_next_double(s) * n_groups)
                        gc = group_color[g]
                        pref = False
                    if gc == mc:
                        break
                    acc = rp if pref else ru
                    if _next_double(s) < acc:
                        break
                    rejections += 1
                    if rejections >= guard:
                        status = STATUS_GUARD_TRIPPED
                        break
                if status != STATUS_OK:
                    break
                mech = 0 if pref else 1
            else:
                # Exact mixture over (mechanism, group color); within a
                # component the pick is size-proportional or uniform.
                w1 = xi * e_g[mc] * n_groups
                w2 = xi * rp * e_g[o] * n_groups
                w3 = (1.0 - xi) * n_g[mc] * t
                w4 = (1.0 - xi) * ru * n_g[o] * t
                u = _next_double(s) * (w1 + w2 + w3 + w4)
                if u < w1 + w2:
                    gc = mc if u < w1 else o
                    target = np.int64(_next_double(s) * e_g[gc])
                    g = _fenwick_sample(group_tree[gc], g_bitmask, target)
                    mech = 0
                else:
                    gc = mc if u < w1 + w2 + w3 else o
                    g = color_groups[gc, np.int64(_next_double(s) * n_g[gc])]
                    mech = 1

        # --- attach the edge ---
        edge_member[t] = m
        edge_group[t] = g
        group_size[g] += 1
        _fenwick_add(group_tree[gc], g, 1)
        e_g[gc] += 1
        member_degree[m] += 1
        _fenwick_add(member_tree, m, 1)
        e_m[mc] += 1
        if record:
            ev_action[t] = action
            ev_member[t] = m
            ev_group[t] = g
            ev_created[t] = created
            ev_mech[t] = mech
            ev_rej[t] = rejections
        t += 1

    # the two bootstrap edges are fixed state, not growth events
    return (member_color[:n_members], member_degree[:n_members],
            group_color[:n_groups], group_size[:n_groups],
            group_creator[:n_groups], group_birth[:n_groups],
            edge_member[:t], edge_group[:t],
            n_m, n_g, e_m, e_g, status,
            ev_action[2:t], ev_member[2:t], ev_group[2:t],
            ev_created[2:t], ev_mech[2:t], ev_rej[2:t])


@njit(cache=True)
def grow_unipartite(n, r, xi, rho_p_red, rho_p_blue, rho_u_red, rho_u_blue,
                    literal, guard, seed):
    """One-mode growth: every arrival adds one member and one edge.

    Initial state (n=2): red member 0 joined to blue member 1.  The new
    member is excluded from its own target pool, so no self-loops occur.
    """
    s = seed_state(seed)
    member_color = np.zeros(n, np.int8)
    member_degree = np.zeros(n, np.int32)
    n_edges = n - 1
    edge_a = np.zeros(n_edges, np.int32)
    edge_b = np.zeros(n_edges, np.int32)
    tree = np.zeros((2, n + 1), np.int64)
    color_members = np.zeros((2, n), np.int32)
    bitmask = _top_bit(n)

    member_color[0] = 0
    member_color[1] = 1
    member_degree[0] = 1
    member_degree[1] = 1
    edge_a[0] = 0
    edge_b[0] = 1
    _fenwick_add(tree[0], 0, 1)
    _fenwick_add(tree[1], 1, 1)
    color_members[0, 0] = 0
    color_members[1, 0] = 1
    n_m = np.zeros(2, np.int64)
    e_m = np.zeros(2, np.int64)
    n_m[0] = 1
    n_m[1] = 1
    e_m[0] = 1
    e_m[1] = 1
    total_members = 2
    total_degree = 2

    status = STATUS_OK
    for i in range(2, n):
        mc = 0 if _next_double(s) < r else 1
        o = 1 - mc
        rp = rho_p_red if mc == 0 else rho_p_blue
        ru = rho_u_red if mc == 0 else rho_u_blue
        if literal:
            rejections = 0
            target_m = -1
            while True:
                if _next_double(s) < xi:
                    target = np.int64(_next_double(s) * total_degree)
                    if target < e_m[0]:
                        tc = 0
                        target_m = _fenwick_sample(tree[0], bitmask, target)
                    else:
                        tc = 1
                        target_m = _fenwick_sample(tree[1], bitmask,
                                                   target - e_m[0])
                    pref = True
                else:
                    target_m = np.int64(_next_double(s) * total_members)
                    tc = member_color[target_m]
                    pref = False
                if tc == mc:
                    break
                acc = rp if pref else ru
                if _next_double(s) < acc:
                    break
                rejections += 1
                if rejections >= guard:
                    status = STATUS_GUARD_TRIPPED
                    break
            if status != STATUS_OK:
                break
        else:
            w1 = xi * e_m[mc] * total_members
            w2 = xi * rp * e_m[o] * total_members
            w3 = (1.0 - xi) * n_m[mc] * total_degree
            w4 = (1.0 - xi) * ru * n_m[o] * total_degree
            u = _next_double(s) * (w1 + w2 + w3 + w4)
            if u < w1 + w2:
                tc = mc if u < w1 else o
                target = np.int64(_next_double(s) * e_m[tc])
                target_m = _fenwick_sample(tree[tc], bitmask, target)
            else:
                tc = mc if u < w1 + w2 + w3 else o
                target_m = color_members[tc, np.int64(_next_double(s) * n_m[tc])]

        member_color[i] = mc
        member_degree[i] = 1
        member_degree[target_m] += 1
        edge_a[i - 1] = i
        edge_b[i - 1] = target_m
        _fenwick_add(tree[mc], i, 1)
        _fenwick_add(tree[tc], target_m, 1)
        color_members[mc, n_m[mc]] = i
        n_m[mc] += 1
        e_m[mc] += 1
        e_m[tc] += 1
        total_members += 1
        total_degree += 2

    n_done = total_members
    return (member_color[:n_done], member_degree[:n_done],
            edge_a[:n_done - 1], edge_b[:n_done - 1], n_m, e_m, status)


@njit(cache=True)
def literal_connection_counts(group_size, group_color, member_col,
                              xi, rho_p, rho_u, n_draws, guard, seed):
    """Run the literal restart loop n_draws times on a frozen state and count
    which group each draw lands on.  Used to validate mixture sampling."""
    s = seed_state(seed)
    n_groups = len(group_size)
    tree = np.zeros((2, n_groups + 1), np.int64)
    e_g = np.zeros(2, np.int64)
    for g in range(n_groups):
        c = group_color[g]
        _fenwick_add(tree[c], g, group_size[g])
        e_g[c] += group_size[g]
    bitmask = _top_bit(n_groups)
    total = e_g[0] + e_g[1]
    counts = np.zeros(n_groups, np.int64)
    for _ in range(n_draws):
        rejections = 0
        while True:
            if _next_double(s) < xi:
                target = np.int64(_next_double(s) * total)
                if target < e_g[0]:
                    gc = 0
                    g = _fenwick_sample(tree[0], bitmask, target)
                else:
                    gc = 1
                    g = _fenwick_sample(tree[1], bitmask, target - e_g[0])
                pref = True
            else:
                g = np.int64(_next_double(s) * n_groups)
                gc = group_color[g]
                pref = False
            if gc == member_col:
                break
            acc = rho_p if pref else rho_u
            if _next_double(s) < acc:
                break
            rejections += 1
            if rejections >= guard:
                return counts, STATUS_GUARD_TRIPPED
        counts[g] += 1
    return counts, STATUS_OK
