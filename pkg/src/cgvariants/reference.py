"""Published convergence summaries used as reference points.

Each entry maps ``(matrix, preconditioner)`` to
``(n, nnz, iterations, min_log10_error)`` where the last two are tuples in
the variant order ``HS, CG_CG, M, PR, GV, PIPE_PR_M, PIPE_PR``.  ``None``
marks a variant that never reached the 1e-5 error reduction.
"""

VARIANT_ORDER = ("HS", "CG_CG", "M", "PR", "GV", "PIPE_PR_M", "PIPE_PR")

TABLE3 = {
    ("1138_bus", "none"): (1138, 4054, (1721, 1753, 1797, 1727, 1870, 1799, 1733), (-12.69, -12.52, -12.7, -12.73, -6.54, -11.85, -11.85)),
    ("494_bus", "none"): (494, 1666, (898, 917, 941, 899, 1040, 957, 909), (-13.14, -12.48, -13.11, -13.11, -6.89, -12.24, -12.16)),
    ("662_bus", "none"): (662, 2474, (443, 447, 451, 444, 464, 451, 444), (-13.93, -13.21, -13.93, -13.95, -8.78, -12.67, -13.35)),
    ("685_bus", "none"): (685, 3249, (437, 456, 455, 439, 485, 471, 445), (-14.36, -14.1, -14.31, -14.36, -9.53, -13.15, -13.06)),
    ("bcsstk03", "none"): (112, 640, (364, 439, 425, 380, 598, 492, 411), (-14.55, -14.49, -14.4, -14.43, -6.86, -12.65, -12.96)),
    ("bcsstk14", "none"): (1806, 63454, (3982, 4060, 4045, 4003, 4212, 4096, 4014), (-14.31, -14.19, -14.3, -14.29, -5.32, -14.24, -14.26)),
    ("bcsstk15", "none"): (3948, 117816, (5702, 5777, 5782, 5721, 5951, 5820, 5738), (-13.77, -13.4, -13.79, -13.79, -5.6, -13.61, -13.74)),
    ("bcsstk16", "none"): (4884, 290378, (429, 430, 430, 430, 818, 431, 430), (-14.48, -14.34, -14.47, -14.47, -5.07, -14.18, -14.2)),
    ("bcsstk17", "none"): (10974, 428650, (17568, 18103, 18174, 17590, None, 18497, 17795), (-13.42, -12.85, -13.42, -13.45, -4.25, -12.06, -12.3)),
    ("bcsstk18", "none"): (11948, 149090, (42525, 43366, 43118, 42652, 49210, 43704, 42908), (-13.18, -13.15, -13.16, -13.18, -5.0, -13.15, -13.18)),
    ("bcsstk27", "none"): (1224, 56126, (519, 521, 523, 520, 531, 523, 520), (-14.42, -14.26, -14.42, -14.43, -9.85, -14.04, -14.1)),
    ("bcsstm19", "none"): (817, 817, (274, 287, 286, 274, 334, 299, 277), (-14.84, -14.84, -14.82, -14.82, -9.63, -14.59, -14.67)),
    ("bcsstm20", "none"): (485, 485, (203, 219, 221, 205, 239, 228, 208), (-15.06, -14.95, -15.09, -15.13, -9.81, -14.92, -14.89)),
    ("bcsstm21", "none"): (3600, 3600, (3, 3, 3, 3, 3, 3, 3), (-15.69, -15.68, -15.69, -16.47, -14.58, -14.92, -14.92)),
    ("bcsstm22", "none"): (138, 138, (43, 43, 43, 43, 43, 43, 43), (-15.43, -15.43, -15.48, -15.43, -12.51, -15.26, -15.07)),
    ("bcsstm23", "none"): (3134, 3134, (1325, 1376, 1360, 1342, 1434, 1367, 1346), (-14.35, -14.29, -14.31, -14.36, -6.87, -14.3, -14.34)),
    ("bcsstm24", "none"): (3562, 3562, (1573, 1689, 1686, 1595, 19411, 1698, 1605), (-14.14, -13.97, -14.05, -14.13, -5.0, -13.83, -14.04)),
    ("bcsstm25", "none"): (15439, 15439, (10089, 10948, 10963, 10293, 12736, 11245, 10400), (-13.84, -13.74, -13.68, -13.81, -5.5, -13.62, -13.76)),
    ("model_48_8_3", "none"): (48, 2304, (43, 42, 45, 44, 45, 43, 44), (-14.32, -14.28, -14.31, -14.32, -10.23, -13.67, -13.66)),
    ("nos1", "none"): (237, 1017, (1846, 1895, 2008, 1843, 2305, 1999, 1870), (-12.81, -13.07, -12.83, -12.8, -5.81, -12.15, -11.82)),
    ("nos2", "none"): (957, 4137, (29829, 30672, 32717, 29706, None, 32157, 29744), (-11.29, -11.21, -11.3, -11.29, -3.23, -10.99, -10.99)),
    ("nos3", "none"): (960, 15844, (221, 221, 221, 221, 221, 221, 221), (-13.39, -13.58, -13.39, -13.39, -9.86, -13.36, -13.22)),
    ("nos4", "none"): (100, 594, (72, 72, 72, 72, 72, 72, 72), (-14.33, -14.41, -14.32, -14.33, -11.47, -14.19, -14.19)),
    ("nos5", "none"): (468, 5172, (315, 315, 316, 316, 317, 316, 316), (-14.98, -14.97, -15.0, -14.99, -10.97, -14.91, -14.89)),
    ("nos6", "none"): (675, 3255, (551, 555, 582, 555, 672, 601, 589), (-12.21, -12.28, -12.23, -12.22, -6.67, -10.21, -10.21)),
    ("nos7", "none"): (729, 4617, (2869, 2798, 3536, 2874, None, 3416, 2899), (-9.01, -8.74, -8.97, -9.01, -0.65, -6.8, -7.24)),
    ("s1rmq4m1", "none"): (5489, 281111, (3406, 3447, 3432, 3410, 3603, 3442, 3434), (-13.54, -13.53, -13.55, -13.56, -8.23, -13.47, -13.43)),
    ("s1rmt3m1", "none"): (5489, 219521, (3890, 3932, 3910, 3895, 4076, 3916, 3908), (-13.39, -13.28, -13.39, -13.4, -7.35, -13.34, -13.22)),
    ("s2rmq4m1", "none"): (5489, 281111, (10476, 10699, 10651, 10491, 11622, 10693, 10615), (-13.09, -13.32, -13.11, -13.12, -6.07, -12.78, -13.19)),
    ("s2rmt3m1", "none"): (5489, 219521, (14484, 14727, 14655, 14533, None, 14679, 14620), (-12.83, -12.7, -12.82, -12.81, -4.55, -12.59, -12.78)),
    ("s3rmq4m1", "none"): (5489, 281111, (26628, 29395, 28004, 26937, None, 28822, 28161), (-12.06, -11.94, -12.06, -12.1, -4.2, -11.69, -11.59)),
    ("s3rmt3m1", "none"): (5489, 219521, (38459, 41037, 40188, 38471, None, 40839, 40105), (-12.04, -11.86, -12.08, -12.07, -4.07, -11.54, -11.28)),
    ("s3rmt3m3", "none"): (5357, 207695, (69095, 72598, 71471, 69051, None, 72258, 70852), (-12.6, -11.72, -12.59, -12.71, -4.2, -11.65, -11.13)),
    ("1138_bus", "jacobi"): (1138, 4054, (734, 734, 734, 734, 734, 734, 734), (-12.69, -12.75, -12.67, -12.7, -8.62, -12.66, -12.65)),
    ("494_bus", "jacobi"): (494, 1666, (371, 371, 371, 371, 371, 371, 371), (-13.15, -13.09, -13.09, -13.15, -9.84, -13.14, -13.16)),
    ("662_bus", "jacobi"): (662, 2474, (166, 166, 166, 166, 166, 166, 166), (-14.16, -14.12, -14.15, -14.19, -10.94, -14.11, -13.76)),
    ("685_bus", "jacobi"): (685, 3249, (192, 192, 192, 192, 192, 192, 192), (-14.48, -14.36, -14.59, -14.46, -11.32, -14.51, -14.33)),
    ("bcsstk03", "jacobi"): (112, 640, (118, 118, 120, 120, 120, 120, 121), (-14.1, -14.11, -14.1, -14.05, -9.48, -13.48, -13.5)),
    ("bcsstk14", "jacobi"): (1806, 63454, (198, 198, 198, 198, 198, 198, 198), (-14.78, -14.73, -14.66, -14.67, -11.18, -14.35, -14.36)),
    ("bcsstk15", "jacobi"): (3948, 117816, (442, 442, 443, 444, 444, 444, 444), (-14.1, -14.08, -14.11, -14.1, -10.05, -13.95, -13.93)),
    ("bcsstk16", "jacobi"): (4884, 290378, (132, 132, 132, 132, 132, 132, 132), (-14.61, -14.51, -14.6, -14.6, -10.98, -14.24, -14.2)),
    ("bcsstk17", "jacobi"): (10974, 428650, (2203, 2205, 2210, 2212, 2218, 2214, 2216), (-13.98, -13.71, -13.98, -14.0, -7.99, -13.4, -13.32)),
    ("bcsstk18", "jacobi"): (11948, 149090, (536, 537, 539, 541, 542, 541, 542), (-14.57, -14.54, -14.57, -14.55, -10.12, -14.3, -14.3)),
    ("bcsstk27", "jacobi"): (1224, 56126, (173, 173, 173, 174, 174, 174, 174), (-14.67, -14.41, -14.67, -14.7, -10.45, -13.99, -14.03)),
    ("model_48_8_3", "jacobi"): (48, 2304, (49, 48, 50, 50, 52, 50, 50), (-14.3, -14.25, -14.28, -14.29, -10.66, -13.7, -13.72)),
    ("nos1", "jacobi"): (237, 1017, (306, 314, 322, 312, 346, 323, 326), (-12.98, -12.79, -12.93, -12.96, -6.7, -12.67, -12.28)),
    ("nos2", "jacobi"): (957, 4137, (3047, 3184, 3197, 3097, None, 3326, 3303), (-11.27, -11.32, -11.3, -11.27, -3.44, -11.23, -11.12)),
    ("nos3", "jacobi"): (960, 15844, (186, 186, 186, 186, 186, 186, 186), (-13.38, -13.42, -13.37, -13.39, -9.62, -13.55, -13.53)),
    ("nos4", "jacobi"): (100, 594, (67, 67, 67, 67, 67, 67, 67), (-14.3, -14.39, -14.34, -14.36, -11.76, -14.22, -14.14)),
    ("nos5", "jacobi"): (468, 5172, (136, 136, 136, 136, 136, 136, 136), (-15.07, -14.99, -15.11, -15.08, -12.02, -14.82, -14.89)),
    ("nos6", "jacobi"): (675, 3255, (71, 71, 71, 71, 71, 71, 71), (-12.17, -12.0, -12.19, -12.2, -9.1, -12.14, -12.14)),
    ("nos7", "jacobi"): (729, 4617, (67, 67, 67, 67, 67, 67, 67), (-8.91, -9.21, -8.9, -8.88, -6.41, -9.42, -9.41)),
    ("s1rmq4m1", "jacobi"): (5489, 281111, (595, 595, 596, 596, 597, 597, 597), (-13.95, -13.86, -13.97, -13.9, -8.49, -13.67, -13.65)),
    ("s1rmt3m1", "jacobi"): (5489, 219521, (674, 674, 674, 675, 675, 675, 676), (-13.58, -13.76, -13.6, -13.62, -8.76, -13.71, -13.2)),
    ("s2rmq4m1", "jacobi"): (5489, 281111, (1437, 1437, 1438, 1439, 1439, 1439, 1440), (-13.16, -12.65, -13.15, -13.23, -6.65, -13.1, -12.81)),
    ("s2rmt3m1", "jacobi"): (5489, 219521, (2030, 2028, 2033, 2034, 2040, 2037, 2039), (-12.84, -12.65, -12.83, -12.81, -6.19, -12.47, -12.19)),
    ("s3dkq4m2", "jacobi"): (90449, 4820891, (25527, 25513, 25548, 25553, None, 25576, 25582), (-11.09, -11.17, -11.1, -11.09, -4.03, -11.12, -11.21)),
    ("s3dkt3m2", "jacobi"): (90449, 3753461, (36195, 36152, 36247, 36263, None, 36327, 36348), (-11.39, -10.91, -11.39, -11.39, -3.97, -11.09, -10.82)),
    ("s3rmq4m1", "jacobi"): (5489, 281111, (5743, 5726, 5775, 5780, None, 5800, 5806), (-12.06, -12.14, -12.03, -12.04, -3.82, -12.0, -12.06)),
    ("s3rmt3m1", "jacobi"): (5489, 219521, (8827, 8806, 8867, 8871, None, 8908, 8917), (-12.07, -11.78, -12.09, -12.1, -3.78, -11.57, -11.41)),
    ("s3rmt3m3", "jacobi"): (5357, 207695, (10251, 10248, 10317, 10324, None, 10385, 10404), (-12.84, -11.77, -12.58, -12.93, -4.43, -11.66, -11.95)),
}

# SuiteSparse collection groups for the matrices above.
GROUPS = {name: "Cylshell" if name.startswith(("s1", "s2", "s3")) else "HB"
          for name, _ in TABLE3 if not name.startswith("model_")}


def reference(name, preconditioner="none"):
    """Return the reference row as a dict, or None when not tabulated."""
    row = TABLE3.get((name, preconditioner))
    if row is None:
        return None
    n, nnz, iters, errs = row
    return {
        "n": n,
        "nnz": nnz,
        "iterations": dict(zip(VARIANT_ORDER, iters)),
        "min_log10_err": dict(zip(VARIANT_ORDER, errs)),
    }


def matrix_names():
    return sorted(GROUPS)
