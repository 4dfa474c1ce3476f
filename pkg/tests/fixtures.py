"""Frozen expected values."""

# (G, team goals with player off, m, c, a); gf = G - off
TOP_ALTRUISTIC_FORWARDS = {
    "H. Sedin": (162, 95, 67, 9, 58),
    "J. Toews": (167, 98, 69, 20, 49),
    "D. Sedin": (162, 93, 69, 22, 47),
    "R. Getzlaf": (134, 79, 55, 8, 47),
    "B. Boyes": (162, 106, 56, 9, 47),
}
