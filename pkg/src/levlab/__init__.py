"""levlab: a numerical laboratory for critical zeros of Dirichlet L-functions.

Modules
-------
constants   closed-form Levinson constants C, C*, c and the kappa' objective
dirichlet   character arithmetic, L(s, chi) numerics, critical-line zeros
mollifier   Mobius-weighted mollifier coefficients and bilinear sums
moments     mollified second moments and their family averages
bound       Littlewood-integral lower bounds on critical zero counts
cli         deterministic JSON/CSV command-line front end
"""

__version__ = "0.1.0"
