"""Named input specs for the CLI (``affine-focal fixtures list``)."""

FIXTURES = {
    "ellipse": {
        "command": "planar",
        "description": "ellipse a=2, b=1: constant affine curvature 2^(-2/3)",
        "spec": {"curve": {"kind": "ellipse", "a": 2.0, "b": 1.0}},
    },
    "oval-six-vertex": {
        "command": "planar",
        "description": "oval r = 1 + 0.1 cos 3t (has flat points at t = pi/3, pi, 5pi/3)",
        "spec": {"curve": {"kind": "fourier_oval", "radial_coeffs": [1.0, 0.0, 0.0, 0.1]}},
    },
    "oval-convex": {
        "command": "planar",
        "description": "strictly convex oval r = 1 + 0.05 cos 3t with support function about 0",
        "spec": {"curve": {"kind": "fourier_oval", "radial_coeffs": [1.0, 0.0, 0.0, 0.05]},
                 "O": [0.0, 0.0]},
    },
    "helix": {
        "command": "spatial",
        "description": "circular helix: rho = 1, tau = 0, cylindrical",
        "spec": {"curve": {"kind": "helix", "r": 1.0, "pitch": 1.0}},
    },
    "area-lift": {
        "command": "spatial",
        "description": "(G, Z) with Z the area function of the convex oval: cylindrical",
        "spec": {"lift": {"curve": {"kind": "fourier_oval", "radial_coeffs": [1.0, 0.0, 0.0, 0.05]},
                          "O": [0.0, 0.0]}},
    },
    "latitude-on-sphere": {
        "command": "darboux",
        "description": "latitude z = 0.6 on the unit sphere: focal set is the z-axis",
        "spec": {"curve": {"kind": "latitude", "z": 0.6}, "surface": {"kind": "sphere", "r": 1.0}},
    },
    "circle-on-cone": {
        "command": "darboux",
        "description": "circle z = 1 on the cone x^2 + y^2 = z^2: O = 0, Q = (0, 0, 1)",
        "spec": {"curve": {"kind": "trig", "components": [
                     {"terms": [[1, 1.0, 0.0]]}, {"terms": [[1, 0.0, 1.0]]}, {"const": 1.0}]},
                 "surface": {"kind": "cone", "apex": [0.0, 0.0, 0.0],
                             "base_curve": {"kind": "trig", "components": [
                                 {"terms": [[1, 1.0, 0.0]]}, {"terms": [[1, 0.0, 1.0]]},
                                 {"const": 1.0}]}}},
    },
    "perturbed-ellipsoid": {
        "command": "darboux",
        "description": "curve on a cubically perturbed ellipsoid: cuspidal edge and swallowtails",
        "spec": {"curve": {"kind": "radial",
                           "surface": {"kind": "implicit_poly", "coeffs": [
                               [2, 0, 0, 0.4444444444444444], [0, 2, 0, 1.0], [0, 0, 2, 1.5625],
                               [3, 0, 0, 0.08], [1, 1, 1, 0.1], [0, 0, 0, -1.0]]},
                           "direction": {"kind": "spherical",
                                         "z_terms": [[0, 0.3, 0.0], [2, 0.1, 0.05], [3, 0.0, 0.07]]}},
                 "surface": {"kind": "implicit_poly", "coeffs": [
                     [2, 0, 0, 0.4444444444444444], [0, 2, 0, 1.0], [0, 0, 2, 1.5625],
                     [3, 0, 0, 0.08], [1, 1, 1, 0.1], [0, 0, 0, -1.0]]}},
    },
    "graph-curve": {
        "command": "darboux",
        "description": "lifted ellipse on a cubic graph surface: generic focal sheet",
        "spec": {"curve": {"kind": "graph_curve",
                           "base_curve": {"kind": "ellipse", "a": 0.8, "b": 0.6,
                                          "center": [0.1, 0.05]},
                           "terms": [[2, 0, 0.5], [0, 2, 0.5], [3, 0, 0.1], [1, 2, 0.05]]},
                 "surface": {"kind": "graph",
                             "terms": [[2, 0, 0.5], [0, 2, 0.5], [3, 0, 0.1], [1, 2, 0.05]]}},
    },
    "support-curve": {
        "command": "darboux",
        "description": "(G', [G - O, G']) of the convex oval on its cone: tau = -rho'",
        "spec": {"support_of": {"kind": "fourier_oval", "radial_coeffs": [1.0, 0.0, 0.0, 0.05]},
                 "O": [0.0, 0.0]},
    },
    "sphere-umbilic": {
        "command": "umbilic",
        "description": "unit sphere about its center: phi lies in a hyperplane",
        "spec": {"f": {"kind": "sphere", "r": 1.0}, "O": [0.0, 0.0, 0.0], "round_trip": True},
    },
    "paraboloid-umbilic": {
        "command": "umbilic",
        "description": "paraboloid about the origin: phi is not hyperplanar",
        "spec": {"f": {"kind": "paraboloid", "half_width": 1.0}, "O": [0.0, 0.0, 0.0]},
    },
    "circle-umbilic": {
        "command": "umbilic",
        "description": "unit circle (n = 1) about its center, with round trip",
        "spec": {"f": {"kind": "circle", "r": 1.0}, "O": [0.0, 0.0], "round_trip": True},
    },
    "sphere-inverse": {
        "command": "umbilic-inverse",
        "description": "recover the sphere from its umbilic immersion",
        "spec": {"phi": {"kind": "umbilic_of", "f": {"kind": "sphere", "r": 1.0},
                         "O": [0.0, 0.0, 0.0]}},
    },
    "product-circles": {
        "command": "focal",
        "description": "unit circle x unit circle: q = (1 - r)(1 - s), r = a + b, s = a",
        "spec": {"fixture": "product", "alpha": {"kind": "circle", "r": 1.0},
                 "beta": {"kind": "circle", "r": 1.0}, "stride": 16},
    },
    "umbilic-frame": {
        "command": "focal",
        "description": "umbilic frame data n = 3: q is a single line of multiplicity 3",
        "spec": {"n": 3, "grid": [0.0], "mu": [[0.5, 0.5, 0.5]],
                 "sigma": [[[2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]]]},
    },
}


def fixture_names():
    return sorted(FIXTURES)
