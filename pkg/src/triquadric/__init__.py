"""triquadric: exact certification machinery for triples of quadratic forms.

Subpackages by topic: `exact` (rational linear algebra and form types),
`pencil` (determinant forms and pair certification), `fano` (dimension
formulas for planes in quadrics plus a finite-field counting oracle),
`localsolve` (local solvability, lifting, weak approximation), `planes`
(isotropic vectors, hyperbolic splitting, admissibility), `descent`
(the end-to-end certificate pipeline), and `cli`.
"""

__version__ = "0.1.0"
