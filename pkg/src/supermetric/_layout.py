"""Flat tree layout shared by the compiled and the pure-Python query kernels.

Every node owns one row of ``ni`` (int64, 6 columns) and ``nf`` (float64,
9 columns); what the columns mean depends on the node kind:

leaf       ni = [leaf_off, leaf_cnt]
partition  ni = [piv_off, piv_cnt, anc_off, anc_cnt, ip_off, ancd_off]
binary     ni = [p1, p2, left, right]            (monotone, balanced monotone, LRT)
           nf = [delta, split, cos, sin, h, cr_left_p1, cr_left_p2, cr_right_p1, cr_right_p2]
vpt        ni = [pivot, inside, outside]
           nf = [lo_inside, hi_inside, lo_outside, hi_outside]

Child slots hold -1 when the child is empty.
"""

LEAF = 0
PARTITION = 1
MONO = 2
MONO_BALANCED = 3
LRT = 4
VPT = 5

NI = 6
NF = 9

# kernel metric codes
EUCLIDEAN = 0
JSD = 2
TRIANGULAR = 3
MANHATTAN = 4
CHEBYSHEV = 5
