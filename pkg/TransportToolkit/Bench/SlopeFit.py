import numpy as np
from scipy.stats import linregress
from ..Core.Errors import DegenerateInput


def fit_loglog_slope(points) -> tuple:
    '''
    Ordinary least squares of ln y on ln x. Returns (slope, intercept, r2).

    Notes
    -----
    r2 is 1.0 when every y is equal (the fit is exact with slope 0).
    '''
    data = np.asarray(list(points), dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != 2:
        raise DegenerateInput("SlopeFit.fit_loglog_slope(): expected a list of (x, y) pairs.")
    if np.any(data <= 0):
        raise DegenerateInput("SlopeFit.fit_loglog_slope(): x and y must be positive.")
    if np.unique(data[:, 0]).shape[0] < 2:
        raise DegenerateInput("SlopeFit.fit_loglog_slope(): at least two distinct x values are needed.")
    log_x, log_y = np.log(data[:, 0]), np.log(data[:, 1])
    if np.all(log_y == log_y[0]):
        return 0.0, float(log_y[0]), 1.0
    fit = linregress(log_x, log_y)
    return float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2)
