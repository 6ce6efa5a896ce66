from dataclasses import dataclass
import math
import numpy as np
from PIL import Image
from scipy.spatial.distance import cdist
from ..Core.Types import CostMatrix, SimplexVector
from ..Core.Errors import ShapeMismatch, TooSmallProblem


# CONSTANTS.
FOREGROUND_AREA = 0.2
FOREGROUND_HIGH = 3.0
BACKGROUND_HIGH = 1.0
BACKGROUND_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class ImageMarginal:
    '''
    Synthetic s x s greyscale image and its flattened (row-major) simplex
    vector. 'foreground' holds (top, left, size) of the bright square.
    '''
    pixels: np.ndarray
    normalized: SimplexVector
    foreground: tuple = (0, 0, 0)

    @property
    def side(self) -> int:
        return self.pixels.shape[0]

    def to_image(self) -> Image.Image:
        '''
        Greyscale preview, brightest pixel mapped to 255.
        '''
        peak = float(self.pixels.max())
        scaled = self.pixels / peak if peak > 0 else self.pixels
        return Image.fromarray(np.round(255.0 * scaled).astype(np.uint8))


def gen_synthetic_image(side: int, seed) -> ImageMarginal:
    '''
    Square foreground of side floor(side * sqrt(0.2)) at a uniformly random
    position, foreground pixels ~ U[0, 3], background pixels ~ U[0, 1].
    The image is normalized, lifted by 1e-6 / n and renormalized so every
    entry is strictly positive.

    Notes
    -----
    'seed' may be an int or a numpy SeedSequence. Draw order: foreground
    top, foreground left, background pixels, foreground pixels.
    '''
    if not isinstance(side, int) or side < 2:
        raise TooSmallProblem(f"ImageGenerator.gen_synthetic_image(): side must be an integer >= 2, got {side!r}.")
    rng = np.random.default_rng(seed)
    size = math.floor(side * math.sqrt(FOREGROUND_AREA))
    top, left = int(rng.integers(side - size + 1)), int(rng.integers(side - size + 1))
    pixels = rng.uniform(0.0, BACKGROUND_HIGH, size=(side, side))
    pixels[top:top + size, left:left + size] = rng.uniform(0.0, FOREGROUND_HIGH, size=(size, size))

    n = side * side
    values = pixels.ravel() / pixels.sum()
    values += BACKGROUND_FLOOR / n
    values /= values.sum()
    pixels.flags.writeable = False
    return ImageMarginal(pixels=pixels, normalized=SimplexVector(values), foreground=(top, left, size))


def gen_image_pair(side: int, seed: int) -> tuple:
    '''
    Two independent images drawn from the children of SeedSequence(seed).
    '''
    first, second = np.random.SeedSequence(seed).spawn(2)
    return gen_synthetic_image(side, first), gen_synthetic_image(side, second)


def grid_coordinates(side: int) -> np.ndarray:
    # (row, col) of every pixel in row-major order.
    rows, cols = np.divmod(np.arange(side * side), side)
    return np.column_stack((rows, cols)).astype(np.float64)


def grid_cost(side: int) -> CostMatrix:
    '''
    C_ij = |r_i - r_j| + |c_i - c_j| over the pixel grid.
    '''
    coordinates = grid_coordinates(side)
    return CostMatrix(cdist(coordinates, coordinates, metric='cityblock'))


def image_pair_to_problem(a: ImageMarginal, b: ImageMarginal) -> tuple:
    '''
    Returns (p, q, C) with the l1 pixel-grid ground cost.
    '''
    if a.pixels.shape != b.pixels.shape:
        raise ShapeMismatch(f"ImageGenerator.image_pair_to_problem(): image shapes {a.pixels.shape} "
                            f"and {b.pixels.shape} differ.")
    return a.normalized, b.normalized, grid_cost(a.side)
