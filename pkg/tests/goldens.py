"""Published reference values, transcribed to two or four decimals."""

K3_M = [
    [1.0, 0, 0, 0, 0, 0, 0, 0],
    [0.18, 0.09, 0.27, 0.09, 0.27, 0.09, 0, 0],
    [0.18, 0.27, 0.09, 0.09, 0.27, 0, 0.09, 0],
    [0, 0.09, 0.09, 0.09, 0, 0.27, 0.27, 0.18],
    [0.18, 0.27, 0.27, 0, 0.09, 0.09, 0.09, 0],
    [0, 0.09, 0, 0.27, 0.09, 0.09, 0.27, 0.18],
    [0, 0, 0.09, 0.27, 0.09, 0.27, 0.09, 0.18],
    [0, 0, 0, 0, 0, 0, 0, 1.0],
]

K3_N = [
    [1.7897, 0.9385, 0.6329, 0.9385, 0.6329, 0.5675],
    [0.9385, 1.7897, 0.6329, 0.9385, 0.5675, 0.6329],
    [0.6329, 0.6329, 1.7897, 0.5675, 0.9385, 0.9385],
    [0.9385, 0.9385, 0.5675, 1.7897, 0.6329, 0.6329],
    [0.6329, 0.5675, 0.9385, 0.6329, 1.7897, 0.9385],
    [0.5675, 0.6329, 0.9385, 0.6329, 0.9385, 1.7897],
]

K3_B = [
    [0.6667, 0.3333],
    [0.6667, 0.3333],
    [0.3333, 0.6667],
    [0.6667, 0.3333],
    [0.3333, 0.6667],
    [0.3333, 0.6667],
]

# K4, k=2: state -> (P(consensus on 1), P(consensus on 2), E[t])
K4_TABLE = {
    "1112": (0.75, 0.25, 6.13),
    "1121": (0.75, 0.25, 6.13),
    "1122": (0.50, 0.50, 7.73),
    "1211": (0.75, 0.25, 6.13),
    "1212": (0.50, 0.50, 7.73),
    "1221": (0.50, 0.50, 7.73),
    "1222": (0.25, 0.75, 6.13),
    "2111": (0.75, 0.25, 6.13),
    "2112": (0.50, 0.50, 7.73),
    "2121": (0.50, 0.50, 7.73),
    "2122": (0.25, 0.75, 6.13),
    "2211": (0.50, 0.50, 7.73),
    "2212": (0.25, 0.75, 6.13),
    "2221": (0.25, 0.75, 6.13),
}

# (family, n, k, distance) -> (low, high) or None for an empty cell
_RAW = {
    1: {
        "complete": [
            [(5.5, 5.5), (5.5, 5.5), (5.5, 5.5)],
            [(6.13, 6.13), (6.13, 6.13), (6.13, 6.13)],
            [(7.59, 7.59), (7.59, 7.59), (7.59, 7.59)],
        ],
        "star": [
            [(4.79, 5.88), (5.09, 5.57), (5.18, 5.49)],
            [(7.11, 7.89), (7.31, 7.69), (7.38, 7.62)],
            [(10.01, 10.61), (10.16, 10.46), (10.21, 10.41)],
        ],
        "ring-bidirectional": [
            [(5.50, 5.50), (5.50, 5.50), (5.50, 5.50)],
            [(5.89, 5.89), (5.89, 5.89), (5.89, 5.89)],
            [(7.31, 7.31), (7.31, 7.31), (7.31, 7.31)],
        ],
    },
    2: {
        "complete": [
            [None, (7.33, 7.33), (7.33, 7.33)],
            [(7.73, 7.73), (8.34, 8.63), (8.57, 8.70)],
            [(10.56, 10.56), (10.9349, 11.1012), (11.13, 11.22)],
        ],
        "star": [
            [None, (7.00, 7.00), (7.00, 7.00)],
            [(9.50, 9.50), (10.24, 10.59), (10.52, 10.68)],
            [(14.37, 14.47), (14.94, 15.17), (15.20, 15.33)],
        ],
        "ring-bidirectional": [
            [None, (7.33, 7.33), (7.33, 7.33)],
            [(7.20, 7.66), (7.99, 8.27), (8.21, 8.34)],
            [(10.00, 10.25), (10.46, 10.63), (10.64, 10.73)],
        ],
    },
    3: {
        "complete": [
            [None, None, None],
            [None, None, (9.99, 9.99)],
            [None, (12.70, 12.70), (13.03, 13.10)],
        ],
        "star": [
            [None, None, None],
            [None, None, (12.25, 12.25)],
            [None, (17.35, 17.36), (17.81, 17.91)],
        ],
        "ring-bidirectional": [
            [None, None, None],
            [None, None, (9.54, 9.54)],
            [None, (12.07, 12.14), (12.41, 12.48)],
        ],
    },
}

SWEEP_TABLE = {
    (family, n, k, d): _RAW[d][family][n - 3][k - 2]
    for d in _RAW
    for family in _RAW[d]
    for n in (3, 4, 5)
    for k in (2, 3, 4)
}
