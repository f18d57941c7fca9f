"""Zero-curvature residuals of the hard-edge and soft-edge Lax pairs along
numerically integrated Painleve data."""

from hardedge import acceptance

for r in (acceptance.check_1(), acceptance.check_4(), acceptance.check_7()):
    print(r.line())
