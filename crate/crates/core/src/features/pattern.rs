// Generated once from a seeded Gaussian sampler (sigma = 31/5, clipped to the
// 31x31 patch, seed 20240611). Any change to the table needs a new
// `PATTERN_VERSION`.

pub const PATTERN_VERSION: u32 = 1;

/// Sampling pairs `[(x1, y1), (x2, y2)]` as offsets from the keypoint.
pub const SAMPLING_PATTERN: [[(i8, i8); 2]; 256] = [
    [(-8, -7), (0, 4)],
    [(-2, -12), (-2, 4)],
    [(-6, -12), (1, 1)],
    [(-3, 4), (-3, -2)],
    [(5, 1), (0, 5)],
    [(-4, 2), (9, -1)],
    [(-1, -6), (11, -5)],
    [(0, 10), (8, -3)],
    [(-4, 4), (4, -7)],
    [(9, -4), (4, -8)],
    [(-4, 4), (9, -2)],
    [(-2, 2), (-8, 5)],
    [(-6, 11), (6, 6)],
    [(-1, -2), (-5, -8)],
    [(-2, -10), (-5, -15)],
    [(5, -3), (-15, -4)],
    [(0, 6), (1, -10)],
    [(-2, 1), (1, -14)],
    [(8, -6), (7, -8)],
    [(-1, 9), (-8, 2)],
    [(-2, -2), (3, -4)],
    [(-6, 2), (4, 2)],
    [(-15, 1), (-1, -4)],
    [(0, 2), (6, -5)],
    [(2, 0), (-10, 4)],
    [(2, -9), (2, -6)],
    [(2, -2), (0, 0)],
    [(-1, -4), (-6, 12)],
    [(-11, 7), (-2, -1)],
    [(-5, -4), (2, -1)],
    [(6, 0), (-9, 1)],
    [(-3, 10), (-7, 4)],
    [(2, -2), (-2, 5)],
    [(2, 10), (-7, 6)],
    [(1, -6), (-3, -6)],
    [(1, 0), (3, -5)],
    [(-5, -2), (-5, 8)],
    [(-14, -2), (-9, -1)],
    [(4, -11), (3, -12)],
    [(-8, 3), (7, 1)],
    [(6, 2), (-2, 11)],
    [(-1, -9), (-1, 4)],
    [(0, 11), (8, 2)],
    [(-2, -2), (1, -15)],
    [(2, 2), (2, -5)],
    [(-10, 0), (1, -6)],
    [(4, 5), (-8, -4)],
    [(-10, -9), (-15, 2)],
    [(-2, 1), (-1, -4)],
    [(1, -10), (10, -10)],
    [(-1, 4), (-7, -2)],
    [(-9, -5), (-8, 9)],
    [(-6, -6), (9, 1)],
    [(9, 9), (12, 0)],
    [(-3, -7), (-6, -13)],
    [(12, -7), (9, 0)],
    [(5, 0), (-1, 4)],
    [(-4, -11), (12, 4)],
    [(7, 8), (-10, 2)],
    [(-7, -5), (-5, 0)],
    [(5, 4), (2, -7)],
    [(3, -5), (4, -15)],
    [(6, 3), (-7, 1)],
    [(7, 5), (-12, -7)],
    [(-6, 8), (-3, 9)],
    [(-4, 6), (-3, -1)],
    [(-5, -5), (-12, -4)],
    [(7, 0), (-7, 6)],
    [(2, -2), (-3, 12)],
    [(-2, -3), (-14, -2)],
    [(6, -15), (-2, -6)],
    [(-10, 1), (15, 2)],
    [(-2, -10), (0, 1)],
    [(-10, 8), (-2, 5)],
    [(-4, -6), (-2, -3)],
    [(9, 8), (0, 8)],
    [(2, 5), (13, 6)],
    [(5, -1), (6, -5)],
    [(-3, -3), (2, -6)],
    [(5, 5), (4, -7)],
    [(0, -14), (5, -3)],
    [(2, 6), (1, 3)],
    [(3, 1), (-7, -1)],
    [(-2, -6), (2, 1)],
    [(-8, -5), (-9, 7)],
    [(-9, -2), (-1, -10)],
    [(-7, -8), (-3, 6)],
    [(-9, 6), (7, 1)],
    [(-13, 5), (-5, 12)],
    [(-8, -4), (3, -2)],
    [(4, 1), (0, 2)],
    [(-10, 8), (-5, -2)],
    [(-9, -8), (2, 6)],
    [(7, 6), (6, 2)],
    [(-1, 0), (-1, 2)],
    [(-2, 9), (-9, -9)],
    [(10, 8), (-1, -11)],
    [(6, -5), (3, 5)],
    [(5, 4), (3, 0)],
    [(-6, 7), (6, 1)],
    [(-4, 1), (1, -8)],
    [(11, -4), (-4, 6)],
    [(0, -4), (-2, 6)],
    [(-14, -4), (2, 6)],
    [(-7, 8), (10, -1)],
    [(0, 6), (1, -8)],
    [(-8, -1), (6, -6)],
    [(-5, -5), (-1, 5)],
    [(-7, 2), (1, 7)],
    [(-12, -3), (0, -5)],
    [(8, 8), (-1, 7)],
    [(-6, 2), (3, -9)],
    [(-4, 4), (0, -12)],
    [(3, 8), (-6, 3)],
    [(-10, -2), (-2, -3)],
    [(-7, -8), (2, 5)],
    [(1, -5), (5, -2)],
    [(1, 2), (3, -13)],
    [(-11, 1), (0, 3)],
    [(0, 0), (2, 4)],
    [(12, -4), (0, 1)],
    [(-1, 2), (-11, -1)],
    [(-15, 0), (-4, -6)],
    [(-8, 4), (1, 11)],
    [(5, 8), (-6, -2)],
    [(11, 5), (3, -3)],
    [(5, -5), (0, 5)],
    [(-6, -12), (8, 8)],
    [(7, -15), (12, -6)],
    [(-3, -2), (9, -1)],
    [(3, 0), (-2, 5)],
    [(5, 7), (4, -7)],
    [(15, -9), (-2, -1)],
    [(3, -1), (11, -4)],
    [(7, 6), (10, 3)],
    [(-3, 2), (0, 0)],
    [(10, -10), (-7, -5)],
    [(3, 6), (13, -2)],
    [(2, -4), (-6, 2)],
    [(-14, -12), (10, -3)],
    [(0, 0), (-14, -5)],
    [(-1, -3), (8, 1)],
    [(0, -10), (-1, -6)],
    [(8, 6), (-7, -6)],
    [(-4, -2), (1, 0)],
    [(1, -12), (-14, -6)],
    [(-9, 9), (-5, -2)],
    [(0, -6), (-2, -8)],
    [(5, 4), (-15, 5)],
    [(0, -10), (5, 3)],
    [(-2, 5), (4, 2)],
    [(8, 1), (-1, -4)],
    [(-1, -12), (-3, 2)],
    [(7, 5), (4, -3)],
    [(4, -7), (3, 3)],
    [(-6, -4), (-6, -3)],
    [(-4, -5), (-7, 10)],
    [(-9, -1), (-6, 11)],
    [(10, 3), (-5, 2)],
    [(-5, 6), (1, -1)],
    [(2, 3), (-10, 12)],
    [(-1, 2), (-1, -11)],
    [(-5, -8), (0, -6)],
    [(10, -1), (-8, 1)],
    [(0, 9), (0, -1)],
    [(-1, -5), (0, 8)],
    [(-2, -1), (7, 0)],
    [(2, -3), (-15, 1)],
    [(4, -8), (-6, -2)],
    [(1, -7), (-5, 9)],
    [(-1, 4), (11, -4)],
    [(-7, 7), (-3, -8)],
    [(1, -3), (-1, -5)],
    [(6, 0), (-8, -8)],
    [(-5, -6), (-5, 3)],
    [(1, 2), (6, -15)],
    [(-4, 2), (-6, 11)],
    [(-4, 5), (-6, 1)],
    [(-2, 3), (-4, 4)],
    [(12, -5), (-6, 8)],
    [(9, 3), (-1, -4)],
    [(-12, -1), (6, 13)],
    [(-5, -5), (4, -3)],
    [(-3, 11), (4, 10)],
    [(5, 1), (15, 5)],
    [(0, -5), (-2, 1)],
    [(-3, 0), (4, 3)],
    [(-5, -5), (-2, 0)],
    [(7, -13), (-5, -5)],
    [(-8, 11), (-9, 2)],
    [(3, -7), (-8, -4)],
    [(-7, -8), (-8, 6)],
    [(-9, 4), (-3, 8)],
    [(11, -9), (14, -9)],
    [(7, 2), (-3, 5)],
    [(-5, -2), (-3, 6)],
    [(-1, 3), (-1, -6)],
    [(-6, 3), (-7, -5)],
    [(5, 0), (9, -10)],
    [(0, 3), (0, 0)],
    [(4, 3), (0, 10)],
    [(-3, 3), (-1, 3)],
    [(-3, -3), (-6, -6)],
    [(-3, -8), (5, -6)],
    [(10, -2), (-2, 3)],
    [(-2, -6), (7, -5)],
    [(-1, 1), (1, 9)],
    [(11, -4), (13, -2)],
    [(-6, -2), (8, 1)],
    [(6, 6), (5, -2)],
    [(1, 15), (-4, 2)],
    [(6, 2), (3, 9)],
    [(1, -8), (6, 1)],
    [(-3, -7), (1, 1)],
    [(-6, 4), (1, -13)],
    [(2, 1), (3, -1)],
    [(7, -3), (-4, -15)],
    [(-2, -3), (-1, -6)],
    [(-10, -1), (3, -14)],
    [(0, -1), (11, -4)],
    [(-2, -9), (-15, -14)],
    [(0, 0), (4, 1)],
    [(-11, -3), (7, 5)],
    [(3, -4), (-1, 7)],
    [(-2, -7), (8, -4)],
    [(1, 5), (1, 7)],
    [(5, -8), (0, 1)],
    [(9, 15), (-2, 5)],
    [(11, -3), (5, 8)],
    [(-15, 4), (-5, 2)],
    [(4, -7), (-2, -2)],
    [(4, 1), (2, -10)],
    [(2, 5), (1, -2)],
    [(4, 8), (5, 3)],
    [(7, -3), (8, 1)],
    [(1, -8), (2, -9)],
    [(2, -4), (-3, -15)],
    [(3, 5), (0, -8)],
    [(10, 6), (3, 1)],
    [(-1, -8), (6, 2)],
    [(-6, -1), (6, 3)],
    [(13, 2), (0, 3)],
    [(8, -2), (-9, -1)],
    [(1, -2), (3, 7)],
    [(-3, 2), (1, 7)],
    [(-4, 10), (-9, -5)],
    [(-2, 14), (5, -4)],
    [(8, -10), (-1, 8)],
    [(-8, -6), (0, -6)],
    [(-3, -13), (1, -5)],
    [(-6, 0), (5, 2)],
    [(4, -1), (0, -5)],
    [(-8, 1), (-8, -9)],
    [(5, 4), (3, -11)],
    [(1, -12), (-3, -5)],
    [(-2, -3), (9, -5)],
];
