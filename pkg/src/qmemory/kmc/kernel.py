"""Compiled inner loop of the event-driven Monte Carlo.

Events are (qubit, Pauli kind).  For the stabilizer energy an event's
omega depends only on how many of the checks it toggles are currently
violated (its ``level``), so events live in buckets indexed by
u = deg - 2*level.  Buckets are contiguous slices of ``perm``; moving an
event to a neighbouring bucket is a single swap with the boundary element.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ..decoders.toric_fast import cluster_sector

# status codes returned by run_events
ST_TIME, ST_MAX_EVENTS, ST_FAILURE, ST_SEPARATION, ST_ANNIHILATED, ST_FAULT = 0, 1, 2, 3, 4, -1
ST_CHECKPOINT = 5

# int state slots
I_CLS, I_NEV, I_NVIOL, I_SIDX, I_NREC = 0, 1, 2, 3, 4
# float state slots
F_T, F_FAIL_CTIME = 0, 1


@njit(cache=True)
def _move_down(e, perm, pos, bstart, b):
    # event e sits in bucket b; becomes the last element of bucket b-1
    i = pos[e]
    j = bstart[b]
    f = perm[j]
    perm[j] = e
    perm[i] = f
    pos[e] = j
    pos[f] = i
    bstart[b] += 1


@njit(cache=True)
def _move_up(e, perm, pos, bstart, b):
    i = pos[e]
    j = bstart[b + 1] - 1
    f = perm[j]
    perm[j] = e
    perm[i] = f
    pos[e] = j
    pos[f] = i
    bstart[b + 1] -= 1


@njit(cache=True)
def init_buckets(ev_deg, level, maxdeg, nb):
    ne = ev_deg.shape[0]
    bucket = np.empty(ne, np.int64)
    for e in range(ne):
        bucket[e] = ev_deg[e] - 2 * level[e] + maxdeg
    perm = np.argsort(bucket, kind="mergesort").astype(np.int64)
    pos = np.empty(ne, np.int64)
    for i in range(ne):
        pos[perm[i]] = i
    bstart = np.zeros(nb + 1, np.int64)
    for e in range(ne):
        bstart[bucket[e] + 1] += 1
    for b in range(nb):
        bstart[b + 1] += bstart[b]
    return perm, pos, bstart


@njit(cache=True)
def compute_levels(ev_ptr, ev_chk, viol):
    ne = ev_ptr.shape[0] - 1
    level = np.zeros(ne, np.int64)
    for e in range(ne):
        s = 0
        for k in range(ev_ptr[e], ev_ptr[e + 1]):
            s += viol[ev_chk[k]]
        level[e] = s
    return level


@njit(cache=True)
def total_rate(gam, bstart):
    R = 0.0
    for b in range(gam.shape[0]):
        R += (bstart[b + 1] - bstart[b]) * gam[b]
    return R


@njit(cache=True)
def _toggle_check(c, viol, level, perm, pos, bstart, chk_ptr, chk_ev, ev_deg, maxdeg,
                  chk_sec, vlist, vcount, vpos, occ, cx, cy, ints):
    was = viol[c]
    viol[c] = 1 - was
    s = chk_sec[c]
    if was == 0:
        vpos[c] = vcount[s]
        vlist[s, vcount[s]] = c
        vcount[s] += 1
        ints[I_NVIOL] += 1
        if occ.shape[1] > 0:
            occ[s, cx[c], cy[c]] = c
    else:
        p = vpos[c]
        last = vlist[s, vcount[s] - 1]
        vlist[s, p] = last
        vpos[last] = p
        vcount[s] -= 1
        vpos[c] = -1
        ints[I_NVIOL] -= 1
        if occ.shape[1] > 0:
            occ[s, cx[c], cy[c]] = -1
    if c < 62:
        ints[I_SIDX] ^= np.int64(1) << np.int64(c)
    for j in range(chk_ptr[c], chk_ptr[c + 1]):
        e2 = chk_ev[j]
        b = ev_deg[e2] - 2 * level[e2] + maxdeg
        if was == 0:
            level[e2] += 1
            _move_down(e2, perm, pos, bstart, b)
            _move_down(e2, perm, pos, bstart, b - 1)
        else:
            level[e2] -= 1
            _move_up(e2, perm, pos, bstart, b)
            _move_up(e2, perm, pos, bstart, b + 1)
    return was


@njit(cache=True)
def _pair_update(flip, nflip, was, chk_sec, partner, ctime, t, last_ctime):
    # flip[:nflip] are the checks toggled by one event, was[] their prior states.
    for s in range(2):
        a = -1
        b = -1
        wa = 0
        wb = 0
        cnt = 0
        for i in range(nflip):
            c = flip[i]
            if chk_sec[c] == s:
                if cnt == 0:
                    a = c
                    wa = was[i]
                else:
                    b = c
                    wb = was[i]
                cnt += 1
        if cnt != 2:
            continue
        if wa == 0 and wb == 0:
            partner[a] = b
            partner[b] = a
            ctime[a] = t
            ctime[b] = t
            last_ctime[s] = t
        elif wa == 1 and wb == 1:
            if partner[a] == b:
                last_ctime[s] = ctime[a]
            else:
                pa = partner[a]
                pb = partner[b]
                tc = min(ctime[a], ctime[b])
                partner[pa] = pb
                partner[pb] = pa
                ctime[pa] = tc
                ctime[pb] = tc
                last_ctime[s] = tc
            partner[a] = -1
            partner[b] = -1
        else:
            if wa == 0:
                a, b = b, a
            # anyon moves from a (was violated) to b
            pa = partner[a]
            partner[b] = pa
            if pa >= 0:
                partner[pa] = b
            ctime[b] = ctime[a]
            partner[a] = -1
            last_ctime[s] = ctime[b]


@njit(cache=True)
def run_events(ev_ptr, ev_chk, chk_ptr, chk_ev, ev_q, ev_kind, ev_deg, ev_logmask, maxdeg,
               gam, omega_b,
               viol, level, perm, pos, bstart, frame_x, frame_z, ints, fl,
               chk_sec, vlist, vcount, vpos,
               occ, cx, cy, L, seam, sector_mask, exposed_mask,
               partner, ctime, track_pairs, last_ctime,
               dec_mode, dec_table, stop_sep2,
               dbuf_parent, dbuf_active, dbuf_label, dbuf_x0, dbuf_y0, dbuf_full, dbuf_stats,
               rec_t, rec_e, rec_w,
               t_stop, max_events, rng, interval):
    """Advance until t_stop, max_events, or a stop condition.

    dec_mode: 0 none, 1 syndrome lookup table, 2 toric cluster decoder.
    stop_sep2 > 0 stops once the single live pair's squared separation
    reaches it (or the pair annihilates).

    interval > 0 places readout checkpoints on the grid k*interval. A
    checkpoint only matters if some event happened since the previous one.
    With no violated checks it is settled here (failure iff the frame is a
    logical); otherwise the loop returns ST_CHECKPOINT with t on the grid
    so the caller can run a full decoder.
    """
    nb = gam.shape[0]
    flip = np.empty(64, np.int64)
    was = np.empty(64, np.int64)
    done = 0
    dirty = False
    next_cp = math.inf
    while done < max_events:
        R = total_rate(gam, bstart)
        if not R > 0.0:
            return ST_FAULT
        dt = -math.log(1.0 - rng.random()) / R
        if dirty and next_cp < t_stop and fl[F_T] + dt >= next_cp:
            # the pending event is discarded; waiting times are memoryless
            fl[F_T] = next_cp
            dirty = False
            if vcount[0] + vcount[1] > 0:
                return ST_CHECKPOINT
            if (ints[I_CLS] & exposed_mask) != 0:
                fl[F_FAIL_CTIME] = next_cp
                return ST_FAILURE
            continue
        if fl[F_T] + dt >= t_stop:
            fl[F_T] = t_stop
            return ST_TIME
        # bucket then member
        target = rng.random() * R
        acc = 0.0
        chosen = -1
        for b in range(nb):
            cnt = bstart[b + 1] - bstart[b]
            if cnt == 0 or gam[b] == 0.0:
                continue
            chosen = b
            acc += cnt * gam[b]
            if target < acc:
                break
        b = chosen
        cnt = bstart[b + 1] - bstart[b]
        k = int(rng.random() * cnt)
        if k >= cnt:
            k = cnt - 1
        e = perm[bstart[b] + k]
        t = fl[F_T] + dt
        fl[F_T] = t
        # apply
        q = ev_q[e]
        kd = ev_kind[e]
        frame_x[q] ^= kd & 1
        frame_z[q] ^= kd >> 1
        ints[I_CLS] ^= ev_logmask[e]
        nflip = 0
        for idx in range(ev_ptr[e], ev_ptr[e + 1]):
            c = ev_chk[idx]
            w0 = _toggle_check(c, viol, level, perm, pos, bstart, chk_ptr, chk_ev, ev_deg,
                               maxdeg, chk_sec, vlist, vcount, vpos, occ, cx, cy, ints)
            if nflip < 64:
                flip[nflip] = c
                was[nflip] = w0
                nflip += 1
        if track_pairs:
            _pair_update(flip, nflip, was, chk_sec, partner, ctime, t, last_ctime)
        ints[I_NEV] += 1
        done += 1
        if interval > 0.0 and not dirty:
            dirty = True
            next_cp = (math.floor(t / interval) + 1.0) * interval
        nr = ints[I_NREC]
        if nr < rec_t.shape[0]:
            rec_t[nr] = t
            rec_e[nr] = e
            rec_w[nr] = omega_b[b]
            ints[I_NREC] = nr + 1
        # stop conditions
        if stop_sep2 > 0:
            tot = vcount[0] + vcount[1]
            if tot == 0:
                return ST_ANNIHILATED
            for s in range(2):
                if vcount[s] == 2:
                    c1 = vlist[s, 0]
                    c2 = vlist[s, 1]
                    dx = abs(cx[c1] - cx[c2])
                    dx = min(dx, L - dx)
                    dy = abs(cy[c1] - cy[c2])
                    dy = min(dy, L - dy)
                    if dx * dx + dy * dy >= stop_sep2:
                        return ST_SEPARATION
        if dec_mode == 1:
            corr = dec_table[ints[I_SIDX]]
            if ((ints[I_CLS] ^ corr) & exposed_mask) != 0:
                fl[F_FAIL_CTIME] = t
                return ST_FAILURE
        elif dec_mode == 2:
            corr = 0
            for s in range(2):
                corr ^= cluster_sector(vlist[s], vcount[s], cx, cy, L, occ[s], vpos,
                                       seam[s, 0], seam[s, 1], dbuf_parent, dbuf_active,
                                       dbuf_label, dbuf_x0, dbuf_y0, dbuf_full, dbuf_stats)
            diff = (ints[I_CLS] ^ corr) & exposed_mask
            if diff != 0:
                tc = t
                for s in range(2):
                    if diff & sector_mask[s]:
                        tc = last_ctime[s]
                        break
                fl[F_FAIL_CTIME] = tc
                return ST_FAILURE
    return ST_MAX_EVENTS
